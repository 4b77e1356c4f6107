//! Auditable provenance for every bound: an ordered list of reduction
//! steps that can be replayed to reproduce the number exactly.

use serde::{Deserialize, Serialize};

use super::{
    add, cubic_closed, lemma21_transform, quartic_closed, strip_linear, u_bound, BoundsError,
    CubicVariant, DegreeProfile, Int, Strategy, UClause,
};

/// The lemma behind one step, with the data needed to replay it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "lemma", rename_all = "kebab-case")]
pub enum StepKind {
    /// One diagonal reduction step at the profile's top degree.
    DiagonalStep { degree: u32, phi: Int, hb: bool, fallback: bool },
    /// Closed form for all applications at degree 4.
    QuarticClosed { phi: Int, hb: bool, fallback: bool },
    /// Closed form for all applications at degree 3; the constant folds
    /// the stage cost together with the absorbed linear count.
    CubicClosed {
        variant: CubicVariant,
        psi: Int,
        fallback: bool,
    },
    /// Additive separation of the linear count.
    StripLinear,
    /// Terminal threshold for the remaining quadratic system.
    QuadraticSystem { clause: UClause },
    /// Terminal subspace dimension for the empty system.
    Terminal { m: Int },
    /// A directly known threshold (no reduction performed).
    Known { value: Int },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReductionStep {
    #[serde(flatten)]
    pub kind: StepKind,
    pub input: Vec<Int>,
    pub output: Vec<Int>,
    pub constant: Int,
    pub note: String,
}

impl ReductionStep {
    /// Recompute this step's output and constant from its input.
    fn recompute(&self, p: u64) -> Result<(Vec<Int>, Int), BoundsError> {
        match &self.kind {
            StepKind::DiagonalStep { phi, hb, .. } => {
                let profile = DegreeProfile::new(&self.input)?;
                let out = lemma21_transform(&profile, *phi)?;
                Ok((out.desc(), if *hb { 0 } else { *phi }))
            }
            StepKind::QuarticClosed { phi, hb, .. } => {
                if self.input.len() != 4 {
                    return Err(BoundsError::TraceMismatch(
                        "quartic step expects a degree-4 profile".into(),
                    ));
                }
                let (cost, (alpha, beta, gamma)) = quartic_closed(
                    self.input[0],
                    self.input[1],
                    self.input[2],
                    self.input[3],
                    *phi,
                )?;
                Ok((vec![alpha, beta, gamma], if *hb { 0 } else { cost }))
            }
            StepKind::CubicClosed { variant, psi, .. } => {
                if self.input.len() != 3 {
                    return Err(BoundsError::TraceMismatch(
                        "cubic step expects a degree-3 profile".into(),
                    ));
                }
                let (cost, alpha, beta) =
                    cubic_closed(self.input[0], self.input[1], self.input[2], *psi, *variant)?;
                Ok((vec![alpha, 0], add(cost, beta)?))
            }
            StepKind::StripLinear => {
                let profile = DegreeProfile::new(&self.input)?;
                let (r1, rest) = strip_linear(&profile);
                Ok((rest.desc(), r1))
            }
            StepKind::QuadraticSystem { clause } => {
                let r = *self.input.first().unwrap_or(&0);
                let (value, chosen) = u_bound(r, p)?;
                if chosen != *clause {
                    return Err(BoundsError::TraceMismatch(format!(
                        "clause {chosen} chosen on replay, trace says {clause}"
                    )));
                }
                Ok((Vec::new(), value))
            }
            StepKind::Terminal { m } => Ok((Vec::new(), *m)),
            StepKind::Known { value } => Ok((Vec::new(), *value)),
        }
    }

    fn describe(&self) -> String {
        match &self.kind {
            StepKind::DiagonalStep { degree, phi, hb, fallback } => format!(
                "diagonal-step d={degree} phi={phi}{}{}",
                if *hb { " (cost dropped)" } else { "" },
                if *fallback { " (fallback phi)" } else { "" }
            ),
            StepKind::QuarticClosed { phi, hb, fallback } => format!(
                "quartic-closed phi={phi}{}{}",
                if *hb { " (cost dropped)" } else { "" },
                if *fallback { " (fallback phi)" } else { "" }
            ),
            StepKind::CubicClosed { variant, psi, fallback } => {
                let v = match variant {
                    CubicVariant::Wooley => "wooley",
                    CubicVariant::HeathBrown => "hb",
                    CubicVariant::NewResult => "newresult",
                };
                if matches!(variant, CubicVariant::NewResult) {
                    format!("cubic-closed {v}")
                } else {
                    format!(
                        "cubic-closed {v} psi={psi}{}",
                        if *fallback { " (fallback phi)" } else { "" }
                    )
                }
            }
            StepKind::StripLinear => "strip-linear".into(),
            StepKind::QuadraticSystem { clause } => format!("quadratic-system {clause}"),
            StepKind::Terminal { m } => format!("terminal m={m}"),
            StepKind::Known { value } => format!("known value {value}"),
        }
    }
}

/// Ordered reduction steps and the bound they add up to. The bound is
/// the sum of the step constants, and replaying every step from its
/// recorded input reproduces both the intermediate profiles and the
/// final number.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReductionTrace {
    pub p: u64,
    pub strategy: Strategy,
    pub steps: Vec<ReductionStep>,
    pub bound: Int,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub note: String,
}

impl ReductionTrace {
    /// Re-derive the bound from the steps; any disagreement with the
    /// stored data is an error.
    pub fn replay(&self) -> Result<Int, BoundsError> {
        let mut total: Int = 0;
        for (i, step) in self.steps.iter().enumerate() {
            let (output, constant) = step.recompute(self.p)?;
            if output != step.output {
                return Err(BoundsError::TraceMismatch(format!(
                    "step {i} output {:?} != replayed {:?}",
                    step.output, output
                )));
            }
            if constant != step.constant {
                return Err(BoundsError::TraceMismatch(format!(
                    "step {i} constant {} != replayed {constant}",
                    step.constant
                )));
            }
            total = add(total, constant)?;
        }
        if total != self.bound {
            return Err(BoundsError::TraceMismatch(format!(
                "constants sum to {total}, bound says {}",
                self.bound
            )));
        }
        Ok(total)
    }

    /// Aligned text rendering of the chain.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for step in &self.steps {
            let lhs = profile_str(&step.input);
            let rhs = if step.output.is_empty() {
                format!("{}", step.constant)
            } else if step.constant != 0 {
                format!("{} + {}", profile_str(&step.output), step.constant)
            } else {
                profile_str(&step.output)
            };
            let note = if step.note.is_empty() {
                step.describe()
            } else {
                format!("{}; {}", step.describe(), step.note)
            };
            out.push_str(&format!("  {lhs:<26} <=  {rhs:<32} [{note}]\n"));
        }
        out.push_str(&format!("  bound                      =  {}\n", self.bound));
        if !self.note.is_empty() {
            out.push_str(&format!("  note: {}\n", self.note));
        }
        out
    }
}

fn profile_str(desc: &[Int]) -> String {
    if desc.is_empty() {
        return "V()".into();
    }
    let inner: Vec<String> = desc.iter().map(|r| r.to_string()).collect();
    format!("V({})", inner.join(","))
}
