//! Exact-integer reduction engine for solubility thresholds of systems
//! of forms: the diagonal reduction step, closed forms for the quartic
//! and cubic stages, thresholds for systems of quadratic forms, and the
//! per-prime chains built from them. All arithmetic is checked 128-bit;
//! overflow is an error, never wraparound.

mod chains;
mod trace;

pub use chains::{
    admissible_requirement, corollary_bounds, evaluate_v, evaluate_v_with, overall_v5, v5_bound,
    wooley_v5,
};
pub use trace::{ReductionStep, ReductionTrace, StepKind};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// All bound arithmetic runs over checked `i128`.
pub type Int = i128;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BoundsError {
    #[error("arithmetic overflow in exact integer chain")]
    Overflow,
    #[error("inexact division: {numerator} is not divisible by {denominator}")]
    InexactDivision { numerator: Int, denominator: Int },
    #[error("phi_{d}({p}) is not tabulated (the d^2 fallback is disabled)")]
    PhiUnavailable { d: u32, p: u64 },
    #[error("profile degree {0} exceeds the supported maximum 5")]
    DegreeTooLarge(u32),
    #[error("reduction step requires a form of degree >= 2")]
    NothingToReduce,
    #[error("step requires a positive count at degree 3")]
    EmptyCubicCount,
    #[error("the cubic-system reduction is not available at p = 3")]
    NewResultAtThree,
    #[error("unsupported prime {0}")]
    UnsupportedPrime(u64),
    #[error("invalid profile: {0}")]
    InvalidProfile(String),
    #[error("trace replay mismatch: {0}")]
    TraceMismatch(String),
}

pub(crate) fn add(a: Int, b: Int) -> Result<Int, BoundsError> {
    a.checked_add(b).ok_or(BoundsError::Overflow)
}

pub(crate) fn mul(a: Int, b: Int) -> Result<Int, BoundsError> {
    a.checked_mul(b).ok_or(BoundsError::Overflow)
}

/// Exact division; a nonzero remainder is an internal-error signal, not
/// a rounding.
pub(crate) fn div_exact(n: Int, d: Int) -> Result<Int, BoundsError> {
    if n % d != 0 {
        return Err(BoundsError::InexactDivision {
            numerator: n,
            denominator: d,
        });
    }
    Ok(n / d)
}

/// Binomial coefficient with the convention `C(a, b) = 0` for `a < b`.
pub fn binom(n: Int, k: u32) -> Result<Int, BoundsError> {
    if n < 0 {
        return Err(BoundsError::InvalidProfile(format!(
            "binomial of negative argument {n}"
        )));
    }
    if (n as u128) < k as u128 {
        return Ok(0);
    }
    let mut acc: Int = 1;
    for i in 1..=k as Int {
        acc = mul(acc, n - k as Int + i)?;
        acc /= i; // exact: product of i consecutive integers
    }
    Ok(acc)
}

/// A system profile `(r_d, ..., r_1)` of form counts per degree, plus
/// the subspace dimension `m` (default 0) used by the terminal
/// convention `V^(m)(0, ..., 0) = m`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeProfile {
    /// counts[i] holds the number of forms of degree i + 1.
    counts: Vec<Int>,
    m: Int,
}

impl DegreeProfile {
    /// Build from the conventional descending list `(r_d, ..., r_1)`.
    pub fn new(desc: &[Int]) -> Result<Self, BoundsError> {
        Self::with_subspace(desc, 0)
    }

    pub fn with_subspace(desc: &[Int], m: Int) -> Result<Self, BoundsError> {
        if desc.is_empty() {
            return Err(BoundsError::InvalidProfile("empty profile".into()));
        }
        if desc.len() > 32 {
            return Err(BoundsError::InvalidProfile(format!(
                "profile degree {} is unreasonably large",
                desc.len()
            )));
        }
        if desc.iter().any(|&r| r < 0) || m < 0 {
            return Err(BoundsError::InvalidProfile(
                "profile entries must be non-negative".into(),
            ));
        }
        let mut counts: Vec<Int> = desc.to_vec();
        counts.reverse();
        Ok(DegreeProfile { counts, m })
    }

    pub fn parse(s: &str) -> Result<Self, BoundsError> {
        let desc = s
            .split(',')
            .map(|part| {
                part.trim()
                    .parse::<Int>()
                    .map_err(|_| BoundsError::InvalidProfile(format!("bad entry {part:?}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(&desc)
    }

    /// Number of forms of the given degree (0 above the stored range).
    pub fn count(&self, degree: u32) -> Int {
        if degree == 0 || degree as usize > self.counts.len() {
            return 0;
        }
        self.counts[degree as usize - 1]
    }

    pub fn subspace_dim(&self) -> Int {
        self.m
    }

    /// Highest degree with a nonzero count; 0 for the empty system.
    pub fn top_degree(&self) -> u32 {
        for d in (1..=self.counts.len()).rev() {
            if self.counts[d - 1] > 0 {
                return d as u32;
            }
        }
        0
    }

    /// Stored degree span, counting leading zeros.
    pub fn nominal_degree(&self) -> u32 {
        self.counts.len() as u32
    }

    /// The profile as the descending list `(r_d, ..., r_1)`.
    pub fn desc(&self) -> Vec<Int> {
        self.counts.iter().rev().copied().collect()
    }

    pub fn is_empty_system(&self) -> bool {
        self.counts.iter().all(|&r| r == 0)
    }

    fn from_counts(counts: Vec<Int>, m: Int) -> Self {
        DegreeProfile { counts, m }
    }
}

impl std::fmt::Display for DegreeProfile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.m > 0 {
            write!(f, "V^({})(", self.m)?;
        } else {
            write!(f, "V(")?;
        }
        let desc = self.desc();
        for (i, r) in desc.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{r}")?;
        }
        write!(f, ")")
    }
}

/// Reduction strategies for the cubic stage (and the cost convention of
/// the higher stages).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    /// Diagonal reduction with the additive diagonal cost at each step.
    Wooley,
    /// The improved step that drops the additive cost.
    #[serde(rename = "hb")]
    HeathBrown,
    /// The cubic-system reduction valid for p != 3 (cost free, no
    /// diagonal threshold needed at the cubic stage).
    #[serde(rename = "newresult")]
    NewResult,
    /// Take the best admissible strategy and record the winner.
    Best,
}

impl Strategy {
    pub fn name(&self) -> &'static str {
        match self {
            Strategy::Wooley => "wooley",
            Strategy::HeathBrown => "hb",
            Strategy::NewResult => "newresult",
            Strategy::Best => "best",
        }
    }
}

impl std::str::FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "wooley" => Ok(Strategy::Wooley),
            "hb" | "heath-brown" | "heathbrown" => Ok(Strategy::HeathBrown),
            "newresult" | "new-result" => Ok(Strategy::NewResult),
            "best" => Ok(Strategy::Best),
            other => Err(format!("unknown strategy: {other}")),
        }
    }
}

impl std::fmt::Display for Strategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Cubic-stage closed-form variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CubicVariant {
    Wooley,
    #[serde(rename = "hb")]
    HeathBrown,
    #[serde(rename = "newresult")]
    NewResult,
}

const PHI_PRIMES: [u64; 6] = [2, 3, 5, 7, 11, 13];

/// phi_d(p) for d = 2..5 (columns) and the tabled primes (rows).
const PHI_VALUES: [[Int; 4]; 6] = [
    [4, 3, 15, 5],  // p = 2
    [4, 4, 8, 5],   // p = 3
    [4, 3, 16, 7],  // p = 5
    [4, 6, 8, 5],   // p = 7
    [4, 3, 8, 15],  // p = 11
    [4, 6, 12, 5],  // p = 13
];

/// Solubility thresholds for diagonal forms of degree `d` over `Q_p`:
/// tabulated for `2 <= d <= 5` and the six small primes, with an
/// optional `d^2` fallback for anything else.
#[derive(Debug, Clone, Copy)]
pub struct PhiTable {
    fallback: bool,
}

impl PhiTable {
    /// Strictly the tabulated values.
    pub fn paper() -> Self {
        PhiTable { fallback: false }
    }

    /// Fall back to the universal bound `phi_d <= d^2` off the table.
    pub fn with_fallback() -> Self {
        PhiTable { fallback: true }
    }

    /// Returns the threshold and whether the fallback produced it.
    pub fn phi(&self, d: u32, p: u64) -> Result<(Int, bool), BoundsError> {
        if !(2..=5).contains(&d) {
            return Err(BoundsError::PhiUnavailable { d, p });
        }
        if let Some(row) = PHI_PRIMES.iter().position(|&q| q == p) {
            return Ok((PHI_VALUES[row][d as usize - 2], false));
        }
        if self.fallback {
            return Ok(((d as Int) * (d as Int), true));
        }
        Err(BoundsError::PhiUnavailable { d, p })
    }
}

/// Tabulated or fallback diagonal threshold.
pub fn phi(d: u32, p: u64, fallback: bool) -> Result<Int, BoundsError> {
    let table = if fallback {
        PhiTable::with_fallback()
    } else {
        PhiTable::paper()
    };
    table.phi(d, p).map(|(v, _)| v)
}

/// Which clause produced a quadratic-system threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", content = "part", rename_all = "kebab-case")]
pub enum UClause {
    /// r = 0: the empty system.
    Empty,
    /// The all-primes lemma, parts 1..8.
    General(u8),
    /// The sharper lemma for p >= 11, parts 1..7.
    LargePrime(u8),
}

impl std::fmt::Display for UClause {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            UClause::Empty => write!(f, "empty"),
            UClause::General(part) => write!(f, "general.{part}"),
            UClause::LargePrime(part) => write!(f, "p>=11.{part}"),
        }
    }
}

/// Threshold for a system of `r` quadratic forms over `Q_p`: the
/// minimum over every applicable clause of the two lemmas, with the
/// chosen clause recorded.
pub fn u_bound(r: Int, p: u64) -> Result<(Int, UClause), BoundsError> {
    if r < 0 {
        return Err(BoundsError::InvalidProfile(format!(
            "negative quadratic count {r}"
        )));
    }
    if r == 0 {
        return Ok((0, UClause::Empty));
    }
    let mut candidates: Vec<(Int, UClause)> = Vec::new();
    // Valid for every prime.
    match r {
        1 => candidates.push((4, UClause::General(1))),
        2 => candidates.push((8, UClause::General(2))),
        3 => candidates.push((16, UClause::General(3))),
        4 => candidates.push((24, UClause::General(4))),
        5 => candidates.push((40, UClause::General(5))),
        6 => candidates.push((56, UClause::General(6))),
        _ => {
            let sq = mul(2, mul(r, r)?)?;
            if r % 2 == 0 && r >= 8 {
                candidates.push((add(sq, -16)?, UClause::General(7)));
            }
            if r % 2 == 1 && r >= 7 {
                candidates.push((add(sq, -14)?, UClause::General(8)));
            }
        }
    }
    if p >= 11 {
        match r {
            3 => candidates.push((12, UClause::LargePrime(1))),
            4 => candidates.push((24, UClause::LargePrime(2))),
            5 => candidates.push((32, UClause::LargePrime(3))),
            6 => candidates.push((56, UClause::LargePrime(4))),
            _ => {
                let base = add(mul(2, mul(r, r)?)?, mul(-2, r)?)?;
                if r % 3 == 1 && r >= 7 {
                    candidates.push((add(base, -12)?, UClause::LargePrime(5)));
                }
                if r % 3 == 2 && r >= 8 {
                    candidates.push((add(base, -8)?, UClause::LargePrime(6)));
                }
                if r % 3 == 0 && r >= 9 {
                    candidates.push((add(base, -8)?, UClause::LargePrime(7)));
                }
            }
        }
    }
    let best = candidates
        .into_iter()
        .min_by_key(|(v, _)| *v)
        .expect("every positive r is covered by some clause");
    Ok(best)
}

/// The profile transformation of the diagonal reduction step at the
/// profile's top degree `d`: one degree-`d` form is traded for
/// `r'_j = sum_{i=j..d} r_i * C(phi + i - j - 1, i - j)` forms of each
/// lower degree `j`.
pub(crate) fn lemma21_transform(
    profile: &DegreeProfile,
    phi: Int,
) -> Result<DegreeProfile, BoundsError> {
    let d = profile.top_degree();
    if d < 2 {
        return Err(BoundsError::NothingToReduce);
    }
    let mut counts = vec![0 as Int; d as usize];
    counts[d as usize - 1] = add(profile.count(d), -1)?;
    for j in 1..d {
        let mut total: Int = 0;
        for i in j..=d {
            let weight = binom(add(phi, (i - j) as Int - 1)?, i - j)?;
            total = add(total, mul(profile.count(i), weight)?)?;
        }
        counts[j as usize - 1] = total;
    }
    Ok(DegreeProfile::from_counts(counts, profile.subspace_dim()))
}

/// One application of the diagonal reduction step at the profile's top
/// degree. The cost is the diagonal threshold, or zero under the
/// improved variant (which keeps the same profile growth).
pub fn lemma21_step(
    profile: &DegreeProfile,
    p: u64,
    use_hb: bool,
) -> Result<(Int, DegreeProfile), BoundsError> {
    let d = profile.top_degree();
    if d < 2 {
        return Err(BoundsError::NothingToReduce);
    }
    if d > 5 {
        return Err(BoundsError::DegreeTooLarge(d));
    }
    let (phi, _) = PhiTable::paper().phi(d, p)?;
    let out = lemma21_transform(profile, phi)?;
    Ok((if use_hb { 0 } else { phi }, out))
}

/// Closed form for `a` applications of the reduction step on a quartic
/// profile `(a, b, c, d)`: cost `a * phi` and the resulting cubic
/// profile `(alpha, beta, gamma)`. Every division is exact on the
/// combined numerator; a nonzero remainder aborts.
pub fn quartic_closed(
    a: Int,
    b: Int,
    c: Int,
    d: Int,
    phi: Int,
) -> Result<(Int, (Int, Int, Int)), BoundsError> {
    if a < 0 {
        return Err(BoundsError::InvalidProfile("negative quartic count".into()));
    }
    let cost = mul(a, phi)?;

    // alpha = b + (phi/2) a (a+1)
    let alpha = add(b, div_exact(mul(phi, mul(a, add(a, 1)?)?)?, 2)?)?;

    // beta = c + phi a b
    //      + [ 6 phi (phi+1) a^2 - 3 phi a (a-1) + phi^2 a (a-1)(4a+1) ] / 12
    let mut beta_num = mul(mul(6, mul(phi, add(phi, 1)?)?)?, mul(a, a)?)?;
    beta_num = add(beta_num, -mul(mul(3, phi)?, mul(a, add(a, -1)?)?)?)?;
    beta_num = add(
        beta_num,
        mul(
            mul(phi, phi)?,
            mul(a, mul(add(a, -1)?, add(mul(4, a)?, 1)?)?)?,
        )?,
    )?;
    let beta = add(add(c, mul(phi, mul(a, b)?)?)?, div_exact(beta_num, 12)?)?;

    // gamma = d + [ 4 phi a X + 2 phi a (a-1) Y
    //             + 2 phi^2 a (a-1)(2a-1)(phi a - 1) - phi^3 a^2 (a-1)^2 ] / 24
    // with X = 2a + 3b + 6c + 3 phi (a+b) + phi^2 a
    // and  Y = -2 + 6 phi (a+b) + 3 phi^2 a.
    let x = add(
        add(add(mul(2, a)?, mul(3, b)?)?, mul(6, c)?)?,
        add(mul(mul(3, phi)?, add(a, b)?)?, mul(mul(phi, phi)?, a)?)?,
    )?;
    let y = add(
        -2,
        add(mul(mul(6, phi)?, add(a, b)?)?, mul(mul(3, mul(phi, phi)?)?, a)?)?,
    )?;
    let mut gamma_num = mul(mul(4, phi)?, mul(a, x)?)?;
    gamma_num = add(gamma_num, mul(mul(2, phi)?, mul(mul(a, add(a, -1)?)?, y)?)?)?;
    gamma_num = add(
        gamma_num,
        mul(
            mul(2, mul(phi, phi)?)?,
            mul(
                mul(a, add(a, -1)?)?,
                mul(add(mul(2, a)?, -1)?, add(mul(phi, a)?, -1)?)?,
            )?,
        )?,
    )?;
    gamma_num = add(
        gamma_num,
        -mul(
            mul(phi, mul(phi, phi)?)?,
            mul(mul(a, a)?, mul(add(a, -1)?, add(a, -1)?)?)?,
        )?,
    )?;
    let gamma = add(d, div_exact(gamma_num, 24)?)?;

    Ok((cost, (alpha, beta, gamma)))
}

/// Closed form for `a` applications of the chosen cubic-stage reduction
/// on `(a, b, c)`: returns `(cost, alpha, beta)` such that the system
/// reduces to `alpha` quadratic forms plus the additive constant `beta`.
pub fn cubic_closed(
    a: Int,
    b: Int,
    c: Int,
    psi: Int,
    variant: CubicVariant,
) -> Result<(Int, Int, Int), BoundsError> {
    if a < 0 {
        return Err(BoundsError::InvalidProfile("negative cubic count".into()));
    }
    match variant {
        CubicVariant::Wooley | CubicVariant::HeathBrown => {
            let cost = match variant {
                CubicVariant::Wooley => mul(a, psi)?,
                _ => 0,
            };
            // alpha = b + (psi/2) a (a+1)
            let alpha = add(b, div_exact(mul(psi, mul(a, add(a, 1)?)?)?, 2)?)?;
            // beta = c + psi a b
            //      + [ 4 psi^2 a (a^2 - 1) + 3 psi (psi+1) a (a+1) ] / 12
            let mut beta_num = mul(
                mul(4, mul(psi, psi)?)?,
                mul(a, add(mul(a, a)?, -1)?)?,
            )?;
            beta_num = add(
                beta_num,
                mul(mul(3, mul(psi, add(psi, 1)?)?)?, mul(a, add(a, 1)?)?)?,
            )?;
            let beta = add(add(c, mul(psi, mul(a, b)?)?)?, div_exact(beta_num, 12)?)?;
            Ok((cost, alpha, beta))
        }
        CubicVariant::NewResult => {
            // alpha = b + 3a(a-1); beta = c + 3a(2b+3a) + a(a-1)(24a-21)/2
            let alpha = add(b, mul(3, mul(a, add(a, -1)?)?)?)?;
            let mut beta = add(c, mul(mul(3, a)?, add(mul(2, b)?, mul(3, a)?)?)?)?;
            beta = add(
                beta,
                div_exact(
                    mul(mul(a, add(a, -1)?)?, add(mul(24, a)?, -21)?)?,
                    2,
                )?,
            )?;
            Ok((0, alpha, beta))
        }
    }
}

/// One application of the cubic-system reduction (valid for p != 3):
/// `(r3, r2, r1) -> (r3 - 1, r2 + 6(r3 - 1), r1 + 6 r2 + 9 r3)`.
pub fn newresult_step(r3: Int, r2: Int, r1: Int) -> Result<(Int, Int, Int), BoundsError> {
    if r3 <= 0 {
        return Err(BoundsError::EmptyCubicCount);
    }
    Ok((
        add(r3, -1)?,
        add(r2, mul(6, add(r3, -1)?)?)?,
        add(r1, add(mul(6, r2)?, mul(9, r3)?)?)?,
    ))
}

/// Split off the linear count additively: `V(r_d,...,r_2,r_1) =
/// V(r_d,...,r_2,0) + r_1`.
pub fn strip_linear(profile: &DegreeProfile) -> (Int, DegreeProfile) {
    let r1 = profile.count(1);
    let mut counts = profile.counts.clone();
    counts[0] = 0;
    (r1, DegreeProfile::from_counts(counts, profile.m))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_table_values() {
        assert_eq!(phi(4, 2, false).unwrap(), 15);
        assert_eq!(phi(5, 11, false).unwrap(), 15);
        assert_eq!(phi(5, 17, true).unwrap(), 25);
        assert_eq!(
            phi(5, 17, false),
            Err(BoundsError::PhiUnavailable { d: 5, p: 17 })
        );
        assert_eq!(phi(2, 13, false).unwrap(), 4);
    }

    #[test]
    fn u_bound_paper_values() {
        assert_eq!(u_bound(380, 2).unwrap(), (288784, UClause::General(7)));
        assert_eq!(u_bound(500, 3).unwrap(), (499984, UClause::General(7)));
        assert_eq!(u_bound(1495, 5).unwrap(), (4470036, UClause::General(8)));
        assert_eq!(u_bound(290, 7).unwrap(), (168184, UClause::General(7)));
        assert_eq!(u_bound(410, 11).unwrap(), (335372, UClause::LargePrime(6)));
        assert_eq!(u_bound(290, 13).unwrap(), (167612, UClause::LargePrime(6)));
        assert_eq!(
            u_bound(1_842_300, 11).unwrap(),
            (6_788_134_895_392, UClause::LargePrime(7))
        );
        assert_eq!(u_bound(0, 7).unwrap(), (0, UClause::Empty));
        assert_eq!(u_bound(1, 11).unwrap(), (4, UClause::General(1)));
        assert_eq!(u_bound(6, 13).unwrap().0, 56);
    }

    #[test]
    fn u_bound_monotone_in_r() {
        for p in [2u64, 3, 5, 7, 11, 13] {
            let mut prev = 0;
            for r in 0..=10_000 {
                let (v, _) = u_bound(r, p).unwrap();
                assert!(v >= prev, "u({r};{p}) = {v} < {prev}");
                prev = v;
            }
        }
    }

    #[test]
    fn lemma21_step_examples() {
        let quintic = DegreeProfile::new(&[1, 0, 0, 0, 0]).unwrap();
        let (cost, out) = lemma21_step(&quintic, 11, false).unwrap();
        assert_eq!(cost, 15);
        assert_eq!(out.desc(), vec![0, 15, 120, 680, 3060]);

        let (cost_hb, out_hb) = lemma21_step(&quintic, 11, true).unwrap();
        assert_eq!(cost_hb, 0);
        assert_eq!(out_hb, out);

        let quad = DegreeProfile::new(&[1, 0]).unwrap();
        let (cost, out) = lemma21_step(&quad, 7, false).unwrap();
        assert_eq!(cost, 4);
        assert_eq!(out.desc(), vec![0, 4]);
    }

    #[test]
    fn quartic_closed_examples() {
        let (cost, (alpha, beta, gamma)) = quartic_closed(15, 120, 680, 3060, 8).unwrap();
        assert_eq!(cost, 120);
        assert_eq!((alpha, beta, gamma), (1080, 91080, 4410900));

        let (cost, out) = quartic_closed(0, 7, 8, 9, 15).unwrap();
        assert_eq!(cost, 0);
        assert_eq!(out, (7, 8, 9));
    }

    #[test]
    fn quartic_single_application_matches_step() {
        let profile = DegreeProfile::new(&[1, 120, 680, 3060]).unwrap();
        let (cost, stepped) = lemma21_step(&profile, 11, false).unwrap();
        let (ccost, (alpha, beta, gamma)) = quartic_closed(1, 120, 680, 3060, 8).unwrap();
        assert_eq!(cost, ccost);
        assert_eq!(stepped.desc(), vec![0, alpha, beta, gamma]);
    }

    #[test]
    fn cubic_closed_examples() {
        let (cost, alpha, beta) =
            cubic_closed(1080, 91080, 4410900, 3, CubicVariant::Wooley).unwrap();
        assert_eq!(cost, 3240);
        assert_eq!(alpha, 1_842_300);
        assert_eq!(beta, 4_082_145_300);

        let (cost, alpha, beta) = cubic_closed(15, 20, 25, 3, CubicVariant::HeathBrown).unwrap();
        assert_eq!(cost, 0);
        assert_eq!((alpha, beta), (380, 11725));

        let (cost, alpha, beta) = cubic_closed(10, 20, 25, 0, CubicVariant::NewResult).unwrap();
        assert_eq!(cost, 0);
        assert_eq!((alpha, beta), (290, 11980));
    }

    #[test]
    fn newresult_step_examples() {
        assert_eq!(newresult_step(1, 1, 0).unwrap(), (0, 1, 15));
        assert_eq!(newresult_step(2, 0, 0).unwrap(), (1, 6, 18));
        assert_eq!(newresult_step(1, 0, 0).unwrap(), (0, 0, 9));
        assert_eq!(newresult_step(0, 5, 5), Err(BoundsError::EmptyCubicCount));
    }

    #[test]
    fn strip_linear_examples() {
        let p = DegreeProfile::new(&[15, 20, 25]).unwrap();
        let (r1, rest) = strip_linear(&p);
        assert_eq!(r1, 25);
        assert_eq!(rest.desc(), vec![15, 20, 0]);

        let p = DegreeProfile::new(&[0, 0, 7]).unwrap();
        let (r1, rest) = strip_linear(&p);
        assert_eq!(r1, 7);
        assert!(rest.is_empty_system());

        let p = DegreeProfile::new(&[1, 0]).unwrap();
        let (r1, rest) = strip_linear(&p);
        assert_eq!(r1, 0);
        assert_eq!(rest.desc(), vec![1, 0]);
    }

    #[test]
    fn binomial_convention() {
        assert_eq!(binom(3, 5).unwrap(), 0);
        assert_eq!(binom(18, 4).unwrap(), 3060);
        assert_eq!(binom(0, 0).unwrap(), 1);
    }

    #[test]
    fn overflow_is_reported() {
        let huge = Int::MAX / 2;
        assert_eq!(
            quartic_closed(huge, huge, huge, huge, 16),
            Err(BoundsError::Overflow)
        );
    }

    /// Iterated single steps must agree with the closed forms. The
    /// iteration below re-derives each step from the generic transform,
    /// which the closed forms never call.
    #[test]
    fn closed_forms_match_iteration() {
        let mut state = 0x1234_5678_9abc_def0u64;
        let mut next = move |bound: u64| {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 33) % bound
        };
        let phis: [Int; 6] = [3, 4, 6, 8, 15, 16];
        for case in 0..1000 {
            let a = next(20) as Int + 1;
            let b = next(1_000_000) as Int;
            let c = next(1_000_000) as Int;
            let d = next(1_000_000) as Int;
            let phi = phis[(case % 6) as usize];

            // Quartic closed form vs a-fold stepping.
            let (cost, (alpha, beta, gamma)) = quartic_closed(a, b, c, d, phi).unwrap();
            let mut profile = DegreeProfile::new(&[a, b, c, d]).unwrap();
            let mut total_cost: Int = 0;
            for _ in 0..a {
                let out = lemma21_transform(&profile, phi).unwrap();
                total_cost += phi;
                profile = out;
            }
            assert_eq!(total_cost, cost);
            assert_eq!(profile.desc(), vec![0, alpha, beta, gamma]);

            // Cubic closed form (with additive cost) vs a-fold stepping;
            // the iterated quadratic/linear counts land in (alpha, beta).
            let (ccost, calpha, cbeta) = cubic_closed(a, b, c, phi, CubicVariant::Wooley).unwrap();
            let mut profile = DegreeProfile::new(&[a, b, c]).unwrap();
            let mut total: Int = 0;
            for _ in 0..a {
                let out = lemma21_transform(&profile, phi).unwrap();
                total += phi;
                profile = out;
            }
            assert_eq!(total, ccost);
            let (lin, rest) = strip_linear(&profile);
            assert_eq!(rest.desc(), vec![0, calpha, 0]);
            assert_eq!(lin, cbeta);

            // Cubic closed form, p != 3 variant, vs a-fold stepping.
            let (_, nalpha, nbeta) = cubic_closed(a, b, c, 0, CubicVariant::NewResult).unwrap();
            let (mut r3, mut r2, mut r1) = (a, b, c);
            for _ in 0..a {
                (r3, r2, r1) = newresult_step(r3, r2, r1).unwrap();
            }
            assert_eq!((r3, r2, r1), (0, nalpha, nbeta));
        }
    }

    #[test]
    fn newresult_closed_small_case() {
        let (_, alpha, beta) = cubic_closed(2, 0, 0, 0, CubicVariant::NewResult).unwrap();
        assert_eq!((alpha, beta), (6, 63));
    }
}
