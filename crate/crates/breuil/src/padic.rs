//! Exact arithmetic in `Z/p^m` with per-value precision tracking.
//!
//! Every [`PadicInt`] knows the precision it is valid at; binary operations
//! return results at the minimum of the two operand precisions. Division by
//! `p` is exact and consumes one unit of precision.

use crate::{Error, Result};

/// The arithmetic context: a prime `p`, a ramification degree `e` given by an
/// Eisenstein polynomial `E(u)`, and a working precision `N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PadicConfig {
    p: u64,
    e_coeffs: Vec<i64>,
    n: u32,
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// `p^m` as a `u64`, or an error when it does not fit.
pub fn pow_checked(p: u64, m: u32) -> Result<u64> {
    let mut acc: u64 = 1;
    for _ in 0..m {
        acc = acc
            .checked_mul(p)
            .ok_or_else(|| Error::InternalPrecisionExceeded(format!("p^{m} overflows u64")))?;
    }
    Ok(acc)
}

impl PadicConfig {
    /// Build a context from `p`, the coefficients `c_0, ..., c_e` of `E(u)`
    /// (constant term first, leading coefficient last) and precision `N`.
    pub fn new(p: u64, e_coeffs: Vec<i64>, n: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::Semantic(format!("p = {p} is not prime")));
        }
        if n < 1 {
            return Err(Error::Semantic("precision N must be at least 1".into()));
        }
        if e_coeffs.len() < 2 {
            return Err(Error::Semantic("E(u) must have degree at least 1".into()));
        }
        let e = e_coeffs.len() - 1;
        if *e_coeffs.last().unwrap() != 1 {
            return Err(Error::Semantic("E(u) must be monic".into()));
        }
        let pi = p as i64;
        for &c in &e_coeffs[..e] {
            if c % pi != 0 {
                return Err(Error::Semantic(format!(
                    "E(u) is not Eisenstein: p does not divide coefficient {c}"
                )));
            }
        }
        if e_coeffs[0] % (pi * pi) == 0 {
            return Err(Error::Semantic(
                "E(u) is not Eisenstein: p^2 divides the constant term".into(),
            ));
        }
        // reject contexts whose working modulus cannot be represented
        pow_checked(p, n)?;
        Ok(PadicConfig { p, e_coeffs, n })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// Ramification degree `e = deg E`.
    pub fn e(&self) -> usize {
        self.e_coeffs.len() - 1
    }

    pub fn precision(&self) -> u32 {
        self.n
    }

    /// Coefficients of `E(u)`, constant term first.
    pub fn e_coeffs(&self) -> &[i64] {
        &self.e_coeffs
    }

    /// `q(i) = floor(i / e)`, the divided-power index of the basis monomial `u^i`.
    pub fn q(&self, i: u32) -> u32 {
        i / self.e() as u32
    }

    /// Legendre valuation `v_p(m!)` together with the unit part of `m!`
    /// reported modulo `p^N`.
    pub fn factorial_unit(&self, m: u32) -> (u32, PadicInt) {
        let mut val = 0u32;
        let mut acc = 1u64;
        let modulus = pow_checked(self.p, self.n).expect("validated in new");
        for k in 2..=m as u64 {
            let mut k = k;
            while k % self.p == 0 {
                val += 1;
                k /= self.p;
            }
            acc = mulmod(acc, k % modulus, modulus);
        }
        (val, PadicInt::new(self.p, self.n, acc))
    }
}

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// A residue class modulo `p^prec`, canonically reduced into `[0, p^prec)`.
///
/// Precision 0 is permitted and represents the zero ring (every value is 0).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PadicInt {
    p: u64,
    prec: u32,
    value: u64,
}

impl PadicInt {
    pub fn new(p: u64, prec: u32, value: u64) -> Self {
        let modulus = pow_checked(p, prec).expect("modulus must fit u64");
        PadicInt { p, prec, value: value % modulus }
    }

    pub fn from_i64(p: u64, prec: u32, value: i64) -> Self {
        let modulus = pow_checked(p, prec).expect("modulus must fit u64") as i64;
        let v = value.rem_euclid(modulus) as u64;
        PadicInt { p, prec, value: v }
    }

    pub fn zero(p: u64, prec: u32) -> Self {
        PadicInt { p, prec, value: 0 }
    }

    pub fn one(p: u64, prec: u32) -> Self {
        PadicInt::new(p, prec, 1)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn modulus(&self) -> u64 {
        pow_checked(self.p, self.prec).expect("modulus fits")
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    pub fn is_unit(&self) -> bool {
        self.prec > 0 && self.value % self.p != 0
    }

    /// Reduce to a (not larger) precision.
    pub fn reduce_to(&self, prec: u32) -> Self {
        assert!(prec <= self.prec, "cannot raise precision by reduction");
        PadicInt::new(self.p, prec, self.value)
    }

    /// The canonical representative reinterpreted at a higher precision.
    /// This is a choice of lift, not new information.
    pub fn lift_to(&self, prec: u32) -> Self {
        assert!(prec >= self.prec);
        PadicInt { p: self.p, prec, value: self.value }
    }

    fn binop(&self, other: &Self) -> (u32, u64) {
        assert_eq!(self.p, other.p, "mixed primes");
        let prec = self.prec.min(other.prec);
        (prec, pow_checked(self.p, prec).expect("modulus fits"))
    }

    pub fn add(&self, other: &Self) -> Self {
        let (prec, m) = self.binop(other);
        PadicInt { p: self.p, prec, value: (self.value % m + other.value % m) % m }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let (prec, m) = self.binop(other);
        PadicInt { p: self.p, prec, value: (self.value % m + m - other.value % m) % m }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (prec, m) = self.binop(other);
        PadicInt { p: self.p, prec, value: mulmod(self.value % m, other.value % m, m) }
    }

    pub fn neg(&self) -> Self {
        let m = self.modulus();
        PadicInt { p: self.p, prec: self.prec, value: (m - self.value) % m }
    }

    pub fn mul_u64(&self, k: u64) -> Self {
        let m = self.modulus();
        PadicInt { p: self.p, prec: self.prec, value: mulmod(self.value, k % m, m) }
    }

    /// `p`-adic valuation: the largest `v <= prec` with `p^v | value`, or
    /// `None` when the value is 0 at this precision (valuation only known to
    /// be `>= prec`).
    pub fn valuation(&self) -> Option<u32> {
        if self.value == 0 {
            return None;
        }
        let mut v = 0;
        let mut x = self.value;
        while x % self.p == 0 {
            v += 1;
            x /= self.p;
        }
        Some(v)
    }

    /// Exact division by `p`; the result is known one precision unit lower.
    pub fn div_p(&self) -> Result<Self> {
        if self.prec == 0 {
            return Err(Error::PrecisionExhausted);
        }
        if self.value % self.p != 0 {
            return Err(Error::NotDivisible);
        }
        if self.prec == 1 {
            return Err(Error::PrecisionExhausted);
        }
        Ok(PadicInt { p: self.p, prec: self.prec - 1, value: self.value / self.p })
    }

    /// Exact division by `p^k`, dropping `k` units of precision.
    pub fn div_p_pow(&self, k: u32) -> Result<Self> {
        let mut x = *self;
        for _ in 0..k {
            x = x.div_p()?;
        }
        Ok(x)
    }

    /// Multiplicative inverse modulo `p^prec` (extended Euclid).
    pub fn inverse(&self) -> Result<Self> {
        if !self.is_unit() {
            return Err(Error::NotAUnit);
        }
        let m = self.modulus();
        // extended euclid on (value, p^prec)
        let (mut r0, mut r1) = (self.value as i128, m as i128);
        let (mut s0, mut s1) = (1i128, 0i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (s0, s1) = (s1, s0 - q * s1);
        }
        debug_assert_eq!(r0, 1);
        let inv = s0.rem_euclid(m as i128) as u64;
        Ok(PadicInt { p: self.p, prec: self.prec, value: inv })
    }
}
