//! Exact arithmetic in `Z/p^k`: valuations, units, power-coset
//! representatives and the lookup tables used for fast evaluation.

use thiserror::Error;

/// Largest prime accepted by [`Modulus::new`]. Primality is checked by
/// deterministic trial division, which is exact in this range.
pub const MAX_PRIME: u64 = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ResidueError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("prime {0} exceeds the supported maximum {MAX_PRIME}")]
    PrimeTooLarge(u64),
    #[error("modulus exponent must be at least 1")]
    ZeroExponent,
    #[error("p^k does not fit in 64 bits")]
    ModulusOverflow,
    #[error("{value} is not a unit modulo {modulus}")]
    NotAUnit { value: u64, modulus: u64 },
}

/// Deterministic trial-division primality check.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// A prime-power modulus `p^k` with `p` verified prime and `p^k` held in
/// 64 bits. Immutable after construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Modulus {
    p: u64,
    k: u32,
    m: u64,
}

impl Modulus {
    pub fn new(p: u64, k: u32) -> Result<Self, ResidueError> {
        if p > MAX_PRIME {
            return Err(ResidueError::PrimeTooLarge(p));
        }
        if !is_prime(p) {
            return Err(ResidueError::NotPrime(p));
        }
        if k == 0 {
            return Err(ResidueError::ZeroExponent);
        }
        let mut m: u64 = 1;
        for _ in 0..k {
            m = m.checked_mul(p).ok_or(ResidueError::ModulusOverflow)?;
        }
        Ok(Modulus { p, k, m })
    }

    /// The field modulus `p^1`.
    pub fn prime(p: u64) -> Result<Self, ResidueError> {
        Modulus::new(p, 1)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// The ring size `p^k`.
    pub fn m(&self) -> u64 {
        self.m
    }

    /// Reduce an arbitrary integer into `[0, m)`.
    pub fn reduce(&self, n: i128) -> u64 {
        n.rem_euclid(self.m as i128) as u64
    }
}

impl std::fmt::Display for Modulus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.k == 1 {
            write!(f, "{}", self.p)
        } else {
            write!(f, "{}^{}", self.p, self.k)
        }
    }
}

pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    base %= m;
    let mut acc: u64 = 1 % m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// An element of `Z/p^k`, always stored reduced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Residue {
    value: u64,
    modulus: Modulus,
}

impl Residue {
    pub fn new(value: i128, modulus: Modulus) -> Self {
        Residue {
            value: modulus.reduce(value),
            modulus,
        }
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    /// True when the value is invertible, i.e. not divisible by `p`.
    pub fn is_unit(&self) -> bool {
        self.value % self.modulus.p != 0
    }

    pub fn add(&self, other: &Residue) -> Residue {
        self.check(other);
        let m = self.modulus.m;
        Residue {
            value: (self.value + other.value) % m,
            modulus: self.modulus,
        }
    }

    pub fn sub(&self, other: &Residue) -> Residue {
        self.check(other);
        let m = self.modulus.m;
        Residue {
            value: (self.value + m - other.value) % m,
            modulus: self.modulus,
        }
    }

    /// Product with 128-bit widening before reduction.
    pub fn mul(&self, other: &Residue) -> Residue {
        self.check(other);
        Residue {
            value: mul_mod(self.value, other.value, self.modulus.m),
            modulus: self.modulus,
        }
    }

    pub fn pow(&self, exp: u64) -> Residue {
        Residue {
            value: pow_mod(self.value, exp, self.modulus.m),
            modulus: self.modulus,
        }
    }

    /// Multiplicative inverse; fails on non-units.
    pub fn inverse(&self) -> Result<Residue, ResidueError> {
        let m = self.modulus.m;
        let inv = inverse_mod(self.value, m).ok_or(ResidueError::NotAUnit {
            value: self.value,
            modulus: m,
        })?;
        Ok(Residue {
            value: inv,
            modulus: self.modulus,
        })
    }

    fn check(&self, other: &Residue) {
        assert_eq!(
            self.modulus, other.modulus,
            "residue arithmetic across different moduli"
        );
    }
}

/// Extended-gcd inverse of `a` modulo `m`, if it exists.
pub(crate) fn inverse_mod(a: u64, m: u64) -> Option<u64> {
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 != 1 {
        return None;
    }
    Some(t0.rem_euclid(m as i128) as u64)
}

/// The p-adic valuation of an integer, with a distinguished infinity
/// for zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Valuation {
    Finite(u32),
    Infinite,
}

impl Valuation {
    pub fn is_infinite(&self) -> bool {
        matches!(self, Valuation::Infinite)
    }

    pub fn finite(&self) -> Option<u32> {
        match self {
            Valuation::Finite(v) => Some(*v),
            Valuation::Infinite => None,
        }
    }
}

/// `v_p(n)`: the exponent of the largest power of `p` dividing `n`.
pub fn valuation(n: i128, p: u64) -> Valuation {
    debug_assert!(is_prime(p));
    if n == 0 {
        return Valuation::Infinite;
    }
    let p = p as i128;
    let mut n = n.abs();
    let mut v = 0u32;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    Valuation::Finite(v)
}

/// Minimal positive representatives for the cosets of the `e`-th powers
/// inside the unit group of `Z/p^k`.
pub fn power_coset_reps(modulus: Modulus, e: u32) -> Vec<u64> {
    let m = modulus.m();
    let p = modulus.p();
    let mut is_power = vec![false; m as usize];
    for x in 1..m {
        if x % p != 0 {
            is_power[pow_mod(x, e as u64, m) as usize] = true;
        }
    }
    let powers: Vec<u64> = (1..m).filter(|&x| is_power[x as usize]).collect();
    let mut covered = vec![false; m as usize];
    let mut reps = Vec::new();
    for c in 1..m {
        if c % p == 0 || covered[c as usize] {
            continue;
        }
        reps.push(c);
        for &w in &powers {
            covered[mul_mod(c, w, m) as usize] = true;
        }
    }
    reps
}

/// Coset representatives of `(F_p*)^5` in `F_p*`; there are
/// `gcd(5, p-1)` of them, each the least positive member of its coset.
pub fn fifth_power_classes(p: u64) -> Result<Vec<u64>, ResidueError> {
    Ok(power_coset_reps(Modulus::prime(p)?, 5))
}

/// Precomputed `x^e mod m` for every `x` in `[0, m)`.
#[derive(Debug, Clone)]
pub struct PowerTable {
    exponent: u32,
    modulus: Modulus,
    table: Vec<u64>,
}

impl PowerTable {
    pub fn new(modulus: Modulus, exponent: u32) -> Self {
        let m = modulus.m();
        let table = (0..m).map(|x| pow_mod(x, exponent as u64, m)).collect();
        PowerTable {
            exponent,
            modulus,
            table,
        }
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn get(&self, x: u64) -> u64 {
        self.table[x as usize]
    }
}

/// Power tables for every exponent up to a degree bound.
#[derive(Debug, Clone)]
pub struct PowerTables {
    modulus: Modulus,
    tables: Vec<PowerTable>,
}

impl PowerTables {
    pub fn up_to(modulus: Modulus, degree: u32) -> Self {
        let tables = (0..=degree).map(|e| PowerTable::new(modulus, e)).collect();
        PowerTables { modulus, tables }
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    pub fn degree(&self) -> u32 {
        self.tables.len() as u32 - 1
    }

    pub fn raise(&self, x: u64, e: u32) -> u64 {
        self.tables[e as usize].get(x)
    }
}
