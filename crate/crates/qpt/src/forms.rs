//! Sparse homogeneous forms over `Z/p^k`: evaluation, Hasse
//! differentiation, and the five fixed coefficient shapes used by the
//! verification engine.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::LazyLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::residue::{mul_mod, pow_mod, Modulus, PowerTables, Residue, ResidueError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormError {
    #[error("point has {got} coordinates, form has {expected} variables")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("exponent vector {0:?} does not sum to the declared degree {1}")]
    DegreeMismatch(Vec<u32>, u32),
    #[error("exponent vector {0:?} has wrong length for {1} variables")]
    BadExponentVector(Vec<u32>, usize),
    #[error("operation requires degree {expected}, form has degree {got}")]
    WrongDegree { expected: u32, got: u32 },
    #[error("coefficient {0} is not reduced modulo {1}")]
    CoefficientOutOfRange(u64, u64),
    #[error("slot {0} is missing an assignment")]
    MissingSlot(String),
    #[error("unknown slot {0}")]
    UnknownSlot(String),
    #[error("slot {slot} requires a unit, got {value}")]
    NonUnitSlot { slot: String, value: u64 },
    #[error("template {template} requires modulus {expected}, got {got}")]
    WrongModulus {
        template: ShapeTag,
        expected: String,
        got: String,
    },
    #[error(transparent)]
    Residue(#[from] ResidueError),
}

/// One monomial: an exponent vector together with a reduced coefficient.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Term {
    pub exps: Vec<u32>,
    pub coeff: u64,
}

/// A sparse homogeneous form of degree `d` in `n` variables over
/// `Z/p^k`. Terms are kept sorted lexicographically by exponent vector,
/// with no duplicates and no zero coefficients, so equality is
/// structural. Immutable after construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Form {
    n: usize,
    d: u32,
    modulus: Modulus,
    terms: Vec<Term>,
}

impl Form {
    /// Canonicalises the term list: duplicate exponent vectors are merged
    /// modulo `m` and zero coefficients dropped.
    pub fn new(n: usize, d: u32, modulus: Modulus, terms: Vec<Term>) -> Result<Form, FormError> {
        let m = modulus.m();
        let mut map: BTreeMap<Vec<u32>, u64> = BTreeMap::new();
        for t in terms {
            if t.exps.len() != n {
                return Err(FormError::BadExponentVector(t.exps, n));
            }
            if t.exps.iter().sum::<u32>() != d {
                return Err(FormError::DegreeMismatch(t.exps, d));
            }
            if t.coeff >= m {
                return Err(FormError::CoefficientOutOfRange(t.coeff, m));
            }
            let slot = map.entry(t.exps).or_insert(0);
            *slot = (*slot + t.coeff) % m;
        }
        let terms = map
            .into_iter()
            .filter(|(_, c)| *c != 0)
            .map(|(exps, coeff)| Term { exps, coeff })
            .collect();
        Ok(Form {
            n,
            d,
            modulus,
            terms,
        })
    }

    pub fn zero(n: usize, d: u32, modulus: Modulus) -> Form {
        Form {
            n,
            d,
            modulus,
            terms: Vec::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> u32 {
        self.d
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn check_point(&self, point: &[u64]) -> Result<(), FormError> {
        if point.len() != self.n {
            return Err(FormError::DimensionMismatch {
                expected: self.n,
                got: point.len(),
            });
        }
        Ok(())
    }

    /// Evaluate at a point with entries reduced modulo `m`.
    pub fn evaluate(&self, point: &[u64]) -> Result<Residue, FormError> {
        self.check_point(point)?;
        let m = self.modulus.m();
        let mut acc: u64 = 0;
        for t in &self.terms {
            let mut v = t.coeff;
            for (x, &e) in point.iter().zip(&t.exps) {
                if e > 0 {
                    v = mul_mod(v, pow_mod(*x % m, e as u64, m), m);
                }
            }
            acc = (acc + v) % m;
        }
        Ok(Residue::new(acc as i128, self.modulus))
    }

    /// Evaluate through precomputed power tables; result is identical to
    /// [`Form::evaluate`].
    pub fn evaluate_with(&self, point: &[u64], tables: &PowerTables) -> Result<Residue, FormError> {
        self.check_point(point)?;
        assert_eq!(tables.modulus(), self.modulus, "power tables for wrong modulus");
        assert!(tables.degree() >= self.d, "power tables too shallow");
        let m = self.modulus.m();
        let mut acc: u64 = 0;
        for t in &self.terms {
            let mut v = t.coeff;
            for (x, &e) in point.iter().zip(&t.exps) {
                if e > 0 {
                    v = mul_mod(v, tables.raise(*x, e), m);
                }
            }
            acc = (acc + v) % m;
        }
        Ok(Residue::new(acc as i128, self.modulus))
    }

    /// The Hasse derivative of the given order in one variable: the term
    /// with exponent vector `e` maps to `C(e_i, r)` times the coefficient
    /// on `e - r·unit_i`. Multiplying by `r!` recovers the classical
    /// `r`-th partial, so no division by factorials ever occurs.
    pub fn hasse_derivative(&self, var: usize, order: u32) -> Form {
        assert!(var < self.n, "variable index out of range");
        assert!(order <= self.d, "derivative order exceeds degree");
        if order == 0 {
            return self.clone();
        }
        let m = self.modulus.m();
        let mut terms = Vec::new();
        for t in &self.terms {
            let e = t.exps[var];
            if e < order {
                continue;
            }
            let coeff = mul_mod(t.coeff, binom_small(e, order) % m, m);
            if coeff == 0 {
                continue;
            }
            let mut exps = t.exps.clone();
            exps[var] -= order;
            terms.push(Term { exps, coeff });
        }
        Form::new(self.n, self.d - order, self.modulus, terms)
            .expect("hasse derivative of a valid form is valid")
    }

    /// First classical partial in one variable (coincides with the Hasse
    /// derivative of order one).
    pub fn partial(&self, var: usize) -> Form {
        self.hasse_derivative(var, 1)
    }

    /// All first partials evaluated at a point.
    pub fn gradient(&self, point: &[u64]) -> Result<Vec<Residue>, FormError> {
        self.check_point(point)?;
        (0..self.n)
            .map(|i| self.partial(i).evaluate(point))
            .collect()
    }

    /// Rescale variables `t_i -> lambda_i t_i`; each coefficient picks up
    /// the monomial's diagonal factor.
    pub fn diagonal_substitute(&self, lambdas: &[u64]) -> Result<Form, FormError> {
        if lambdas.len() != self.n {
            return Err(FormError::DimensionMismatch {
                expected: self.n,
                got: lambdas.len(),
            });
        }
        let m = self.modulus.m();
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let mut coeff = t.coeff;
                for (l, &e) in lambdas.iter().zip(&t.exps) {
                    if e > 0 {
                        coeff = mul_mod(coeff, pow_mod(*l % m, e as u64, m), m);
                    }
                }
                Term {
                    exps: t.exps.clone(),
                    coeff,
                }
            })
            .collect();
        Form::new(self.n, self.d, self.modulus, terms)
    }

    /// Number of stored (nonzero) coefficients of a quadratic form.
    pub fn quadratic_length(&self) -> Result<usize, FormError> {
        if self.d != 2 {
            return Err(FormError::WrongDegree {
                expected: 2,
                got: self.d,
            });
        }
        Ok(self.terms.len())
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0 (mod {})", self.modulus);
        }
        let mut first = true;
        for t in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let mut wrote = false;
            if t.coeff != 1 || t.exps.iter().all(|&e| e == 0) {
                write!(f, "{}", t.coeff)?;
                wrote = true;
            }
            for (i, &e) in t.exps.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if wrote {
                    write!(f, "*")?;
                }
                wrote = true;
                write!(f, "t{}", i + 1)?;
                if e > 1 {
                    write!(f, "^{e}")?;
                }
            }
        }
        write!(f, " (mod {})", self.modulus)
    }
}

fn binom_small(n: u32, k: u32) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 1..=k as u64 {
        acc = acc * (n as u64 - k as u64 + i) / i;
    }
    acc
}

/// Serialisable document for a form: `{p, k, n, d, terms}` with
/// coefficients reduced into `[0, p^k)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FormFile {
    pub p: u64,
    pub k: u32,
    pub n: usize,
    pub d: u32,
    pub terms: Vec<TermFile>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TermFile {
    pub exps: Vec<u32>,
    pub coeff: u64,
}

impl Form {
    pub fn to_file(&self) -> FormFile {
        FormFile {
            p: self.modulus.p(),
            k: self.modulus.k(),
            n: self.n,
            d: self.d,
            terms: self
                .terms
                .iter()
                .map(|t| TermFile {
                    exps: t.exps.clone(),
                    coeff: t.coeff,
                })
                .collect(),
        }
    }

    pub fn from_file(file: &FormFile) -> Result<Form, FormError> {
        let modulus = Modulus::new(file.p, file.k)?;
        Form::new(
            file.n,
            file.d,
            modulus,
            file.terms
                .iter()
                .map(|t| Term {
                    exps: t.exps.clone(),
                    coeff: t.coeff,
                })
                .collect(),
        )
    }
}

/// The five fixed coefficient shapes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShapeTag {
    R1,
    R1Star,
    R2,
    R3,
    CubicAd,
}

impl ShapeTag {
    pub const ALL: [ShapeTag; 5] = [
        ShapeTag::R1,
        ShapeTag::R1Star,
        ShapeTag::R2,
        ShapeTag::R3,
        ShapeTag::CubicAd,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ShapeTag::R1 => "r1",
            ShapeTag::R1Star => "r1star",
            ShapeTag::R2 => "r2",
            ShapeTag::R3 => "r3",
            ShapeTag::CubicAd => "cubic-ad",
        }
    }
}

impl fmt::Display for ShapeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for ShapeTag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "r1" => Ok(ShapeTag::R1),
            "r1star" | "r1*" => Ok(ShapeTag::R1Star),
            "r2" => Ok(ShapeTag::R2),
            "r3" => Ok(ShapeTag::R3),
            "cubic-ad" | "cubic_ad" | "cubicad" => Ok(ShapeTag::CubicAd),
            other => Err(format!("unknown shape: {other}")),
        }
    }
}

/// A named coefficient slot of a shape: the monomial it controls and
/// whether the slot must hold a unit.
#[derive(Debug, Clone)]
pub struct SlotDesc {
    pub name: String,
    pub exps: Vec<u32>,
    pub unit: bool,
}

/// A coefficient-slot pattern: variable count, degree and ordered slots.
#[derive(Debug, Clone)]
pub struct ShapeTemplate {
    pub tag: ShapeTag,
    pub n: usize,
    pub d: u32,
    pub slots: Vec<SlotDesc>,
}

fn unit_slot(name: String, n: usize, assignments: &[(usize, u32)]) -> SlotDesc {
    slot(name, n, assignments, true)
}

fn free_slot(name: String, n: usize, assignments: &[(usize, u32)]) -> SlotDesc {
    slot(name, n, assignments, false)
}

fn slot(name: String, n: usize, assignments: &[(usize, u32)], unit: bool) -> SlotDesc {
    let mut exps = vec![0u32; n];
    for &(var, e) in assignments {
        exps[var] = e;
    }
    SlotDesc { name, exps, unit }
}

fn build_template(tag: ShapeTag) -> ShapeTemplate {
    match tag {
        ShapeTag::R1 | ShapeTag::R1Star => {
            let n = 3;
            let mut slots = Vec::new();
            for i in 0..3 {
                slots.push(unit_slot(format!("a{}", i + 1), n, &[(i, 5)]));
            }
            for i in 0..3 {
                for j in (i + 1)..3 {
                    slots.push(free_slot(
                        format!("b{}{}", i + 1, j + 1),
                        n,
                        &[(i, 1), (j, 4)],
                    ));
                }
            }
            if tag == ShapeTag::R1Star {
                slots.push(free_slot("c123".into(), n, &[(0, 1), (1, 1), (2, 3)]));
            }
            ShapeTemplate { tag, n, d: 5, slots }
        }
        ShapeTag::R2 => {
            let n = 4;
            let mut slots = Vec::new();
            for i in 0..4 {
                slots.push(unit_slot(format!("a{}", i + 1), n, &[(i, 5)]));
            }
            for i in 0..4 {
                for j in (i + 1)..4 {
                    slots.push(free_slot(
                        format!("b{}{}", i + 1, j + 1),
                        n,
                        &[(i, 1), (j, 4)],
                    ));
                }
            }
            for (i, j) in [(0, 1), (0, 2), (1, 2)] {
                slots.push(free_slot(
                    format!("c{}{}4", i + 1, j + 1),
                    n,
                    &[(i, 1), (j, 1), (3, 3)],
                ));
            }
            ShapeTemplate { tag, n, d: 5, slots }
        }
        ShapeTag::R3 => {
            let n = 6;
            let mut slots = Vec::new();
            for i in 0..6 {
                slots.push(unit_slot(format!("a{}", i + 1), n, &[(i, 5)]));
            }
            for i in 0..6 {
                for j in (i + 1)..6 {
                    slots.push(free_slot(
                        format!("b{}{}", i + 1, j + 1),
                        n,
                        &[(i, 1), (j, 4)],
                    ));
                }
            }
            for (i, j) in [(0, 1), (0, 2), (0, 3), (1, 2)] {
                slots.push(free_slot(
                    format!("c{}{}5", i + 1, j + 1),
                    n,
                    &[(i, 1), (j, 1), (4, 3)],
                ));
            }
            for i in 0..5 {
                for j in (i + 1)..5 {
                    slots.push(free_slot(
                        format!("c{}{}6", i + 1, j + 1),
                        n,
                        &[(i, 1), (j, 1), (5, 3)],
                    ));
                }
            }
            ShapeTemplate { tag, n, d: 5, slots }
        }
        ShapeTag::CubicAd => {
            let n = 3;
            let slots = vec![
                unit_slot("a".into(), n, &[(0, 3)]),
                free_slot("b".into(), n, &[(0, 1), (1, 2)]),
                unit_slot("c".into(), n, &[(1, 3)]),
                free_slot("d".into(), n, &[(0, 1), (2, 2)]),
                free_slot("e".into(), n, &[(1, 1), (2, 2)]),
                unit_slot("f".into(), n, &[(2, 3)]),
            ];
            ShapeTemplate { tag, n, d: 3, slots }
        }
    }
}

static TEMPLATES: LazyLock<Vec<ShapeTemplate>> =
    LazyLock::new(|| ShapeTag::ALL.iter().map(|&t| build_template(t)).collect());

/// The fixed template for a shape tag.
pub fn template(tag: ShapeTag) -> &'static ShapeTemplate {
    &TEMPLATES[ShapeTag::ALL.iter().position(|&t| t == tag).unwrap()]
}

impl ShapeTemplate {
    /// Which moduli the shape is defined over: `R3` lives over `Z/25`,
    /// everything else over a prime field.
    pub fn check_modulus(&self, modulus: Modulus) -> Result<(), FormError> {
        let ok = match self.tag {
            ShapeTag::R3 => modulus.p() == 5 && modulus.k() == 2,
            _ => modulus.k() == 1,
        };
        if ok {
            Ok(())
        } else {
            Err(FormError::WrongModulus {
                template: self.tag,
                expected: match self.tag {
                    ShapeTag::R3 => "5^2".into(),
                    _ => "a prime p".into(),
                },
                got: modulus.to_string(),
            })
        }
    }

    /// Instantiate from values aligned with the slot order. Unit slots
    /// must hold units; zero-valued free slots are simply omitted from
    /// the stored form.
    pub fn instantiate(&self, values: &[u64], modulus: Modulus) -> Result<Form, FormError> {
        self.check_modulus(modulus)?;
        if values.len() != self.slots.len() {
            return Err(if values.len() < self.slots.len() {
                FormError::MissingSlot(self.slots[values.len()].name.clone())
            } else {
                FormError::UnknownSlot(format!("#{}", self.slots.len()))
            });
        }
        let m = modulus.m();
        let mut terms = Vec::with_capacity(values.len());
        for (slot, &v) in self.slots.iter().zip(values) {
            if v >= m {
                return Err(FormError::CoefficientOutOfRange(v, m));
            }
            if slot.unit && v % modulus.p() == 0 {
                return Err(FormError::NonUnitSlot {
                    slot: slot.name.clone(),
                    value: v,
                });
            }
            if v != 0 {
                terms.push(Term {
                    exps: slot.exps.clone(),
                    coeff: v,
                });
            }
        }
        Form::new(self.n, self.d, modulus, terms)
    }

    /// Instantiate from a named slot-value map; every slot must be
    /// assigned and no extra keys are allowed.
    pub fn instantiate_named(
        &self,
        assignment: &BTreeMap<String, u64>,
        modulus: Modulus,
    ) -> Result<Form, FormError> {
        for key in assignment.keys() {
            if !self.slots.iter().any(|s| &s.name == key) {
                return Err(FormError::UnknownSlot(key.clone()));
            }
        }
        let values = self
            .slots
            .iter()
            .map(|s| {
                assignment
                    .get(&s.name)
                    .copied()
                    .ok_or_else(|| FormError::MissingSlot(s.name.clone()))
            })
            .collect::<Result<Vec<u64>, _>>()?;
        self.instantiate(&values, modulus)
    }
}

/// Convenience wrapper matching the shape of the other module-level
/// operations.
pub fn instantiate_shape(
    tag: ShapeTag,
    assignment: &BTreeMap<String, u64>,
    modulus: Modulus,
) -> Result<Form, FormError> {
    template(tag).instantiate_named(assignment, modulus)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn named(pairs: &[(&str, u64)]) -> BTreeMap<String, u64> {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn instantiate_r1_diagonal() {
        let m2 = Modulus::prime(2).unwrap();
        let f = instantiate_shape(
            ShapeTag::R1,
            &named(&[
                ("a1", 1),
                ("a2", 1),
                ("a3", 1),
                ("b12", 0),
                ("b13", 0),
                ("b23", 0),
            ]),
            m2,
        )
        .unwrap();
        assert_eq!(f.terms().len(), 3);
        assert_eq!(f.evaluate(&[1, 1, 0]).unwrap().value(), 0);
        assert_eq!(f.to_string(), "t1^5 + t2^5 + t3^5 (mod 2)");
    }

    #[test]
    fn instantiate_rejects_nonunit_slot() {
        let m7 = Modulus::prime(7).unwrap();
        let err = instantiate_shape(
            ShapeTag::R1Star,
            &named(&[
                ("a1", 1),
                ("a2", 0),
                ("a3", 1),
                ("b12", 0),
                ("b13", 0),
                ("b23", 0),
                ("c123", 0),
            ]),
            m7,
        )
        .unwrap_err();
        assert!(matches!(err, FormError::NonUnitSlot { .. }));
    }

    #[test]
    fn instantiate_rejects_missing_slot_and_wrong_modulus() {
        let m7 = Modulus::prime(7).unwrap();
        let err =
            instantiate_shape(ShapeTag::R1, &named(&[("a1", 1)]), m7).unwrap_err();
        assert!(matches!(err, FormError::MissingSlot(_)));
        // R3 must live over 5^2.
        let values = vec![1u64; template(ShapeTag::R3).slots.len()];
        let err = template(ShapeTag::R3).instantiate(&values, m7).unwrap_err();
        assert!(matches!(err, FormError::WrongModulus { .. }));
        let m25 = Modulus::new(5, 2).unwrap();
        assert!(template(ShapeTag::R3).instantiate(&values, m25).is_ok());
    }

    #[test]
    fn cubic_ad_fermat_instance() {
        let m5 = Modulus::prime(5).unwrap();
        let f = instantiate_shape(
            ShapeTag::CubicAd,
            &named(&[("a", 1), ("b", 0), ("c", 1), ("d", 0), ("e", 0), ("f", 1)]),
            m5,
        )
        .unwrap();
        assert_eq!(f.to_string(), "t1^3 + t2^3 + t3^3 (mod 5)");
        assert_eq!(f.evaluate(&[1, 4, 0]).unwrap().value(), 0);
    }

    #[test]
    fn evaluate_examples() {
        let m25 = Modulus::new(5, 2).unwrap();
        let f = Form::new(
            2,
            5,
            m25,
            vec![
                Term { exps: vec![5, 0], coeff: 1 },
                Term { exps: vec![0, 5], coeff: 1 },
            ],
        )
        .unwrap();
        // 1 + 4^5 = 1025 = 41 * 25.
        assert_eq!(f.evaluate(&[1, 4]).unwrap().value(), 0);
    }

    #[test]
    fn gradient_examples() {
        let m2 = Modulus::prime(2).unwrap();
        let f = Form::new(
            3,
            5,
            m2,
            (0..3)
                .map(|i| {
                    let mut exps = vec![0, 0, 0];
                    exps[i] = 5;
                    Term { exps, coeff: 1 }
                })
                .collect(),
        )
        .unwrap();
        let grad: Vec<u64> = f
            .gradient(&[1, 1, 0])
            .unwrap()
            .iter()
            .map(|r| r.value())
            .collect();
        assert_eq!(grad, vec![1, 1, 0]);

        let m25 = Modulus::new(5, 2).unwrap();
        let diag6 = Form::new(
            6,
            5,
            m25,
            (0..6)
                .map(|i| {
                    let mut exps = vec![0; 6];
                    exps[i] = 5;
                    Term { exps, coeff: 1 }
                })
                .collect(),
        )
        .unwrap();
        let grad: Vec<u64> = diag6
            .gradient(&[1, 4, 0, 0, 0, 0])
            .unwrap()
            .iter()
            .map(|r| r.value())
            .collect();
        // 5 * 4^4 = 1280 = 51 * 25 + 5.
        assert_eq!(grad, vec![5, 5, 0, 0, 0, 0]);

        // Gradient at the origin vanishes whenever all monomials have
        // degree >= 2 in every variable pattern used by the shapes.
        let grad0 = diag6.gradient(&[0; 6]).unwrap();
        assert!(grad0.iter().all(|r| r.is_zero()));
    }

    #[test]
    fn hasse_examples() {
        let m11 = Modulus::prime(11).unwrap();
        let f = Form::new(1, 5, m11, vec![Term { exps: vec![5], coeff: 1 }]).unwrap();
        let h2 = f.hasse_derivative(0, 2);
        assert_eq!(h2.terms(), &[Term { exps: vec![3], coeff: 10 }]);
        assert_eq!(f.hasse_derivative(0, 0), f);

        let g = Form::new(
            2,
            5,
            m11,
            vec![Term { exps: vec![1, 4], coeff: 1 }],
        )
        .unwrap();
        let h = g.hasse_derivative(1, 4);
        assert_eq!(h.terms(), &[Term { exps: vec![1, 0], coeff: 1 }]);
    }

    #[test]
    fn iterated_hasse_matches_scaled_hasse() {
        // Applying the order-1 derivative r times equals r! times the
        // order-r Hasse derivative, coefficient by coefficient.
        let m13 = Modulus::prime(13).unwrap();
        let f = Form::new(
            2,
            5,
            m13,
            vec![
                Term { exps: vec![5, 0], coeff: 3 },
                Term { exps: vec![1, 4], coeff: 7 },
                Term { exps: vec![2, 3], coeff: 11 },
            ],
        )
        .unwrap();
        for r in 1..=3u32 {
            for var in 0..2 {
                let mut iterated = f.clone();
                for _ in 0..r {
                    iterated = iterated.partial(var);
                }
                let mut factorial = 1u64;
                for i in 2..=r as u64 {
                    factorial *= i;
                }
                let scaled = Form::new(
                    2,
                    5 - r,
                    m13,
                    f.hasse_derivative(var, r)
                        .terms()
                        .iter()
                        .map(|t| Term {
                            exps: t.exps.clone(),
                            coeff: mul_mod(t.coeff, factorial % 13, 13),
                        })
                        .collect(),
                )
                .unwrap();
                assert_eq!(iterated, scaled, "var {var} order {r}");
            }
        }
    }

    #[test]
    fn quadratic_length_examples() {
        let m11 = Modulus::prime(11).unwrap();
        let q = Form::new(
            3,
            2,
            m11,
            vec![
                Term { exps: vec![1, 1, 0], coeff: 1 },
                Term { exps: vec![1, 0, 1], coeff: 1 },
                Term { exps: vec![0, 1, 1], coeff: 1 },
            ],
        )
        .unwrap();
        assert_eq!(q.quadratic_length().unwrap(), 3);
        assert_eq!(Form::zero(3, 2, m11).quadratic_length().unwrap(), 0);
        let sq = Form::new(1, 2, m11, vec![Term { exps: vec![2], coeff: 1 }]).unwrap();
        assert_eq!(sq.quadratic_length().unwrap(), 1);
        let cubic = Form::zero(3, 3, m11);
        assert!(cubic.quadratic_length().is_err());
    }

    #[test]
    fn form_file_round_trip() {
        let m25 = Modulus::new(5, 2).unwrap();
        let f = Form::new(
            2,
            5,
            m25,
            vec![
                Term { exps: vec![5, 0], coeff: 24 },
                Term { exps: vec![1, 4], coeff: 13 },
            ],
        )
        .unwrap();
        let json = serde_json::to_string(&f.to_file()).unwrap();
        let back = Form::from_file(&serde_json::from_str(&json).unwrap()).unwrap();
        assert_eq!(back, f);
    }

    /// Draw a random template instance for property tests.
    fn arb_template_form() -> impl Strategy<Value = Form> {
        (0usize..5, proptest::collection::vec(0u64..10_000, 40), 0usize..6).prop_map(
            |(ti, raw, pi)| {
                let tag = ShapeTag::ALL[ti];
                let tpl = template(tag);
                let modulus = match tag {
                    ShapeTag::R3 => Modulus::new(5, 2).unwrap(),
                    _ => Modulus::prime([2u64, 3, 5, 7, 11, 13][pi]).unwrap(),
                };
                let m = modulus.m();
                let p = modulus.p();
                let values: Vec<u64> = tpl
                    .slots
                    .iter()
                    .zip(&raw)
                    .map(|(slot, r)| {
                        if slot.unit {
                            let units: Vec<u64> = (1..m).filter(|v| v % p != 0).collect();
                            units[(*r as usize) % units.len()]
                        } else {
                            r % m
                        }
                    })
                    .collect();
                tpl.instantiate(&values, modulus).unwrap()
            },
        )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(256))]

        #[test]
        fn euler_identity(f in arb_template_form(), seed in 0u64..1_000_000) {
            // d * f(t) = sum_i t_i * df/dt_i(t) for homogeneous degree d.
            let m = f.modulus().m();
            let mut state = seed;
            let point: Vec<u64> = (0..f.n())
                .map(|_| {
                    state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
                    (state >> 33) % m
                })
                .collect();
            let lhs = mul_mod(f.degree() as u64 % m, f.evaluate(&point).unwrap().value(), m);
            let grad = f.gradient(&point).unwrap();
            let mut rhs = 0u64;
            for (x, g) in point.iter().zip(&grad) {
                rhs = (rhs + mul_mod(*x, g.value(), m)) % m;
            }
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn tables_match_naive_eval(f in arb_template_form(), seed in 0u64..1_000_000) {
            let tables = PowerTables::up_to(f.modulus(), f.degree());
            let m = f.modulus().m();
            let mut state = seed ^ 0x9e3779b97f4a7c15;
            let point: Vec<u64> = (0..f.n())
                .map(|_| {
                    state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
                    (state >> 33) % m
                })
                .collect();
            prop_assert_eq!(
                f.evaluate(&point).unwrap(),
                f.evaluate_with(&point, &tables).unwrap()
            );
        }
    }
}
