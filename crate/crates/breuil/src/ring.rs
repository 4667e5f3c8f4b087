//! Exact arithmetic in `S_N = S/p^N` on the divided-power basis
//! `b(i) = u^i / q(i)!` with `q(i) = floor(i/e)`, together with the
//! filtration `Fil^1`, the Frobenius `phi`, the divided Frobenius `phi_1`,
//! the structure unit `c = phi_1(E(u))` and unit inversion.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::padic::{pow_checked, PadicConfig, PadicInt};
use crate::{Error, Result};

/// An element of `S/p^m` as a finitely supported coefficient vector over the
/// divided-power basis. Zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SElem {
    cfg: Arc<PadicConfig>,
    prec: u32,
    coeffs: BTreeMap<u32, u64>,
}

/// An element of `(Z/p^m)[u]/(E(u))`, canonically reduced modulo the monic
/// `E(u)`; the image of `S` under `u -> pi`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OKElem {
    cfg: Arc<PadicConfig>,
    prec: u32,
    coeffs: Vec<u64>,
}

impl SElem {
    pub fn zero(cfg: &Arc<PadicConfig>, prec: u32) -> Self {
        SElem { cfg: cfg.clone(), prec, coeffs: BTreeMap::new() }
    }

    pub fn one(cfg: &Arc<PadicConfig>, prec: u32) -> Self {
        SElem::basis(cfg, 0, prec)
    }

    /// The basis element `b(i) = u^i / q(i)!`.
    pub fn basis(cfg: &Arc<PadicConfig>, i: u32, prec: u32) -> Self {
        SElem::single(cfg, i, PadicInt::one(cfg.p(), prec))
    }

    /// `a * b(i)`.
    pub fn single(cfg: &Arc<PadicConfig>, i: u32, a: PadicInt) -> Self {
        let mut coeffs = BTreeMap::new();
        if !a.is_zero() {
            coeffs.insert(i, a.value());
        }
        SElem { cfg: cfg.clone(), prec: a.prec(), coeffs }
    }

    /// Build from `(index, coefficient)` pairs at the given precision.
    pub fn from_coeffs(cfg: &Arc<PadicConfig>, prec: u32, pairs: &[(u32, i64)]) -> Self {
        let mut out = SElem::zero(cfg, prec);
        for &(i, c) in pairs {
            let v = PadicInt::from_i64(cfg.p(), prec, c);
            if !v.is_zero() {
                let entry = out.coeffs.entry(i).or_insert(0);
                *entry = PadicInt::new(cfg.p(), prec, *entry).add(&v).value();
                if *entry == 0 {
                    out.coeffs.remove(&i);
                }
            }
        }
        out
    }

    /// Interpret an ordinary polynomial `sum c_j u^j` in the PD basis:
    /// `u^j = q(j)! * b(j)`.
    pub fn from_poly(cfg: &Arc<PadicConfig>, prec: u32, poly: &[i64]) -> Self {
        let mut out = SElem::zero(cfg, prec);
        for (j, &cj) in poly.iter().enumerate() {
            if cj == 0 {
                continue;
            }
            let j = j as u32;
            let (v, unit) = cfg.factorial_unit(cfg.q(j));
            if v >= prec {
                continue;
            }
            let scale = PadicInt::from_i64(cfg.p(), prec, cj)
                .mul(&PadicInt::new(cfg.p(), prec, unit.value()))
                .mul(&PadicInt::new(cfg.p(), prec, pow_checked(cfg.p(), v).unwrap()));
            out = out.add(&SElem::single(cfg, j, scale));
        }
        out
    }

    /// `u` as an element of `S`.
    pub fn u(cfg: &Arc<PadicConfig>, prec: u32) -> Self {
        SElem::from_poly(cfg, prec, &[0, 1])
    }

    /// `E(u)` as an element of `S` (note `q(e)! = 1`, so the PD and
    /// polynomial coefficients agree).
    pub fn eisenstein(cfg: &Arc<PadicConfig>, prec: u32) -> Self {
        SElem::from_poly(cfg, prec, cfg.e_coeffs())
    }

    pub fn cfg(&self) -> &Arc<PadicConfig> {
        &self.cfg
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn support(&self) -> impl Iterator<Item = u32> + '_ {
        self.coeffs.keys().copied()
    }

    /// Coefficient of `b(i)` as a tracked residue.
    pub fn coeff(&self, i: u32) -> PadicInt {
        PadicInt::new(self.cfg.p(), self.prec, self.coeffs.get(&i).copied().unwrap_or(0))
    }

    pub fn coeff_pairs(&self) -> impl Iterator<Item = (u32, u64)> + '_ {
        self.coeffs.iter().map(|(&i, &v)| (i, v))
    }

    fn check_cfg(&self, other: &Self) -> Result<()> {
        if self.cfg != other.cfg {
            return Err(Error::ConfigMismatch);
        }
        Ok(())
    }

    /// Reduce to a (not larger) precision, dropping coefficients that vanish.
    pub fn reduce_to(&self, prec: u32) -> Self {
        assert!(prec <= self.prec, "cannot raise precision by reduction");
        let m = pow_checked(self.cfg.p(), prec).unwrap();
        let coeffs = self
            .coeffs
            .iter()
            .filter_map(|(&i, &v)| if v % m != 0 { Some((i, v % m)) } else { None })
            .collect();
        SElem { cfg: self.cfg.clone(), prec, coeffs }
    }

    /// Canonical representative reinterpreted at a higher precision (a choice
    /// of lift, not new information).
    pub fn lift_to(&self, prec: u32) -> Self {
        assert!(prec >= self.prec);
        SElem { cfg: self.cfg.clone(), prec, coeffs: self.coeffs.clone() }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_cfg(other).expect("config mismatch in add");
        let prec = self.prec.min(other.prec);
        let m = pow_checked(self.cfg.p(), prec).unwrap();
        let mut coeffs = BTreeMap::new();
        for (&i, &v) in self.coeffs.iter() {
            let v = v % m;
            if v != 0 {
                coeffs.insert(i, v);
            }
        }
        for (&i, &v) in other.coeffs.iter() {
            let entry = coeffs.entry(i).or_insert(0);
            *entry = (*entry + v % m) % m;
            if *entry == 0 {
                coeffs.remove(&i);
            }
        }
        SElem { cfg: self.cfg.clone(), prec, coeffs }
    }

    pub fn neg(&self) -> Self {
        let m = pow_checked(self.cfg.p(), self.prec).unwrap();
        let coeffs = self.coeffs.iter().map(|(&i, &v)| (i, (m - v) % m)).collect();
        SElem { cfg: self.cfg.clone(), prec: self.prec, coeffs }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scalar_mul(&self, a: &PadicInt) -> Self {
        let prec = self.prec.min(a.prec());
        let mut out = SElem::zero(&self.cfg, prec);
        for (&i, &v) in self.coeffs.iter() {
            let c = PadicInt::new(self.cfg.p(), prec, v).mul(&PadicInt::new(self.cfg.p(), prec, a.value()));
            if !c.is_zero() {
                out.coeffs.insert(i, c.value());
            }
        }
        out
    }

    pub fn mul_i64(&self, k: i64) -> Self {
        self.scalar_mul(&PadicInt::from_i64(self.cfg.p(), self.prec, k))
    }

    /// Exact scalar multiplication by `p^k` into a window `k` units wider is
    /// not needed; this is plain multiplication by `p^k` at the same precision.
    pub fn mul_p_pow(&self, k: u32) -> Self {
        match pow_checked(self.cfg.p(), k) {
            Ok(pk) => self.mul_i64(pk as i64),
            Err(_) => SElem::zero(&self.cfg, self.prec),
        }
    }

    /// Exact coefficient-wise division by `p^k`, dropping `k` units of
    /// precision.
    pub fn div_p_pow(&self, k: u32) -> Result<Self> {
        let mut out = SElem::zero(&self.cfg, self.prec.checked_sub(k).ok_or(Error::PrecisionExhausted)?);
        for (&i, &v) in self.coeffs.iter() {
            let c = PadicInt::new(self.cfg.p(), self.prec, v).div_p_pow(k)?;
            if !c.is_zero() {
                out.coeffs.insert(i, c.value());
            }
        }
        Ok(out)
    }

    /// Product in `S`, using the basis law
    /// `b(i) * b(j) = [q(i+j)! / (q(i)! q(j)!)] * b(i+j)`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_cfg(other)?;
        let prec = self.prec.min(other.prec);
        let mut out = SElem::zero(&self.cfg, prec);
        let p = self.cfg.p();
        for (&i, &a) in self.coeffs.iter() {
            for (&j, &b) in other.coeffs.iter() {
                let (vi, ui) = self.cfg.factorial_unit(self.cfg.q(i));
                let (vj, uj) = self.cfg.factorial_unit(self.cfg.q(j));
                let (vij, uij) = self.cfg.factorial_unit(self.cfg.q(i + j));
                let v = vij - vi - vj; // the ratio is an integer
                if v >= prec {
                    continue;
                }
                let unit = uij.mul(&ui.inverse().unwrap()).mul(&uj.inverse().unwrap());
                let term = PadicInt::new(p, prec, a)
                    .mul(&PadicInt::new(p, prec, b))
                    .mul(&PadicInt::new(p, prec, unit.value()))
                    .mul(&PadicInt::new(p, prec, pow_checked(p, v).unwrap()));
                if !term.is_zero() {
                    out = out.add(&SElem::single(&self.cfg, i + j, term));
                }
            }
        }
        Ok(out.reduce_to(prec))
    }

    pub fn pow(&self, k: u32) -> Result<Self> {
        let mut acc = SElem::one(&self.cfg, self.prec);
        for _ in 0..k {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// The Frobenius `phi` with `phi(u) = u^p` (coefficient-wise trivial for
    /// residue field `F_p`): `b(i) -> [q(pi)!/q(i)!] * b(pi)`.
    pub fn frobenius(&self) -> Self {
        let p = self.cfg.p();
        let prec = self.prec;
        let mut out = SElem::zero(&self.cfg, prec);
        for (&i, &a) in self.coeffs.iter() {
            let (vi, ui) = self.cfg.factorial_unit(self.cfg.q(i));
            let (vpi, upi) = self.cfg.factorial_unit(self.cfg.q(i * p as u32));
            let v = vpi - vi;
            if v >= prec {
                continue;
            }
            let unit = upi.mul(&ui.inverse().unwrap());
            let term = PadicInt::new(p, prec, a)
                .mul(&PadicInt::new(p, prec, unit.value()))
                .mul(&PadicInt::new(p, prec, pow_checked(p, v).unwrap()));
            if !term.is_zero() {
                out = out.add(&SElem::single(&self.cfg, i * p as u32, term));
            }
        }
        out.reduce_to(prec)
    }

    /// Image under the projection `S -> O_K/p^m`, `u -> pi`. Each `b(i)` maps
    /// to `(u^i mod E) / q(i)!`; the division is exact and is carried out by
    /// lifting the (exact) Eisenstein data to precision `m + v_p(q(i)!)`.
    pub fn project_ok(&self) -> Result<OKElem> {
        let e = self.cfg.e();
        let p = self.cfg.p();
        let prec = self.prec;
        let mut acc = vec![PadicInt::zero(p, prec); e];
        for (&i, &a) in self.coeffs.iter() {
            let (v, unit) = self.cfg.factorial_unit(self.cfg.q(i));
            let lifted = prec + v;
            // reject only when the boosted modulus cannot be represented
            pow_checked(p, lifted).map_err(|_| {
                Error::InternalPrecisionExceeded(format!(
                    "projection of b({i}) needs internal precision {lifted}"
                ))
            })?;
            let upow = u_pow_mod_e(&self.cfg, i, lifted);
            let unit_inv = unit.inverse().unwrap();
            for (j, cj) in upow.iter().enumerate() {
                // c_j is divisible by p^v because pi^i / q(i)! is integral
                let reduced = cj.div_p_pow(v).map_err(|_| {
                    Error::InternalPrecisionExceeded(format!(
                        "projection of b({i}): coefficient not divisible by p^{v}"
                    ))
                })?;
                let term = reduced
                    .reduce_to(prec)
                    .mul(&PadicInt::new(p, prec, a))
                    .mul(&PadicInt::new(p, prec, unit_inv.value()));
                acc[j] = acc[j].add(&term);
            }
        }
        Ok(OKElem { cfg: self.cfg.clone(), prec, coeffs: acc.iter().map(|c| c.value()).collect() })
    }

    /// `Fil^1` membership, decided through the kernel characterization
    /// `Fil^1 S_m = ker(S_m -> O_K/p^m)`.
    pub fn in_fil1(&self) -> Result<bool> {
        Ok(self.project_ok()?.is_zero())
    }

    /// Divided Frobenius `phi_1 = phi/p` on `Fil^1`. The input must be known
    /// at precision `m+1`; the result is known at `m`.
    pub fn phi1(&self) -> Result<Self> {
        if self.prec < 2 {
            return Err(Error::PrecisionExhausted);
        }
        if !self.in_fil1()? {
            return Err(Error::NotInFil1);
        }
        self.frobenius().div_p_pow(1)
    }

    /// The divided power `gamma_i = E(u)^i / i!` at full working precision,
    /// computed from the exact integer expansion of `E(u)^i`.
    pub fn gamma(cfg: &Arc<PadicConfig>, i: u32) -> Result<Self> {
        assert!(i >= 1);
        let n = cfg.precision();
        let p = cfg.p();
        // exact E(u)^i over Z
        let mut poly: Vec<BigInt> = vec![BigInt::from(1)];
        let e_poly: Vec<BigInt> = cfg.e_coeffs().iter().map(|&c| BigInt::from(c)).collect();
        for _ in 0..i {
            let mut next = vec![BigInt::zero(); poly.len() + e_poly.len() - 1];
            for (a, ca) in poly.iter().enumerate() {
                for (b, cb) in e_poly.iter().enumerate() {
                    next[a + b] += ca * cb;
                }
            }
            poly = next;
        }
        let (vi, ui) = cfg.factorial_unit(i);
        let ui_inv = ui.inverse().unwrap();
        let mut out = SElem::zero(cfg, n);
        for (k, ck) in poly.iter().enumerate() {
            if ck.is_zero() {
                continue;
            }
            let k = k as u32;
            let (vq, uq) = cfg.factorial_unit(cfg.q(k));
            let (vc, uc) = bigint_val_unit(ck, p, n);
            let vtot = (vc + vq).checked_sub(vi).ok_or_else(|| {
                Error::InternalPrecisionExceeded(format!(
                    "gamma_{i}: coefficient of u^{k} is not p-integral"
                ))
            })?;
            if vtot >= n {
                continue;
            }
            let coeff = uc
                .mul(&uq)
                .mul(&ui_inv)
                .mul(&PadicInt::new(p, n, pow_checked(p, vtot).unwrap()));
            out = out.add(&SElem::single(cfg, k, coeff));
        }
        Ok(out)
    }

    /// The structure unit `c = phi_1(E(u))`, known at precision `N-1`.
    pub fn breuil_c(cfg: &Arc<PadicConfig>) -> Self {
        let e = SElem::eisenstein(cfg, cfg.precision());
        let c = e.phi1().expect("E(u) lies in Fil1");
        debug_assert!(c.coeff(0).is_unit(), "c must be a unit of S");
        c
    }

    /// Residue in `F_p` under `S -> O_K -> k`: the constant basis coefficient
    /// modulo `p`.
    pub fn residue(&self) -> u64 {
        self.coeff(0).value() % self.cfg.p()
    }

    pub fn is_unit(&self) -> bool {
        self.prec > 0 && self.residue() != 0
    }

    /// Inverse of a unit, by the geometric series over the nil maximal-ideal
    /// part. A safety cap of `e * N * p^2` iterations guards termination.
    pub fn inverse(&self) -> Result<Self> {
        if !self.is_unit() {
            return Err(Error::NotAUnit);
        }
        let a0 = self.coeff(0);
        let a0_inv = a0.inverse()?;
        // z = a0^{-1} a - 1 lies in the maximal ideal
        let z = self.scalar_mul(&a0_inv).sub(&SElem::one(&self.cfg, self.prec));
        let cap = self.cfg.e() as u64 * self.cfg.precision() as u64 * self.cfg.p() * self.cfg.p();
        let minus_z = z.neg();
        let mut acc = SElem::one(&self.cfg, self.prec);
        let mut pow = SElem::one(&self.cfg, self.prec);
        let mut k = 0u64;
        loop {
            pow = pow.mul(&minus_z)?;
            if pow.is_zero() {
                break;
            }
            acc = acc.add(&pow);
            k += 1;
            if k > cap {
                return Err(Error::NonTermination);
            }
        }
        Ok(acc.scalar_mul(&a0_inv))
    }
}

/// `u^i mod E(u)` over `Z/p^prec`, coefficients of `1, u, ..., u^{e-1}`.
fn u_pow_mod_e(cfg: &Arc<PadicConfig>, i: u32, prec: u32) -> Vec<PadicInt> {
    let e = cfg.e();
    let p = cfg.p();
    let mut cur = vec![PadicInt::zero(p, prec); e];
    cur[0] = PadicInt::one(p, prec);
    for _ in 0..i {
        // multiply by u
        let top = cur[e - 1];
        for j in (1..e).rev() {
            cur[j] = cur[j - 1];
        }
        cur[0] = PadicInt::zero(p, prec);
        if !top.is_zero() {
            // u^e = -(E_0 + E_1 u + ... + E_{e-1} u^{e-1})
            for j in 0..e {
                let ej = PadicInt::from_i64(p, prec, cfg.e_coeffs()[j]);
                cur[j] = cur[j].sub(&top.mul(&ej));
            }
        }
    }
    cur
}

fn bigint_val_unit(c: &BigInt, p: u64, n: u32) -> (u32, PadicInt) {
    let pb = BigInt::from(p);
    let mut x = c.clone();
    let mut v = 0u32;
    while (&x % &pb).is_zero() {
        x /= &pb;
        v += 1;
        if v > 10_000 {
            break; // cannot happen for nonzero input
        }
    }
    let modulus = BigInt::from(pow_checked(p, n).unwrap());
    let r = ((&x % &modulus) + &modulus) % &modulus;
    let val: u64 = r.magnitude().iter_u64_digits().next().unwrap_or(0);
    (v, PadicInt::new(p, n, val))
}

impl OKElem {
    pub fn zero(cfg: &Arc<PadicConfig>, prec: u32) -> Self {
        OKElem { cfg: cfg.clone(), prec, coeffs: vec![0; cfg.e()] }
    }

    pub fn cfg(&self) -> &Arc<PadicConfig> {
        &self.cfg
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn from_coeffs(cfg: &Arc<PadicConfig>, prec: u32, coeffs: Vec<u64>) -> Self {
        assert_eq!(coeffs.len(), cfg.e());
        let m = pow_checked(cfg.p(), prec).unwrap();
        OKElem { cfg: cfg.clone(), prec, coeffs: coeffs.into_iter().map(|c| c % m).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.cfg, other.cfg);
        let prec = self.prec.min(other.prec);
        let m = pow_checked(self.cfg.p(), prec).unwrap();
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| (a % m + b % m) % m)
            .collect();
        OKElem { cfg: self.cfg.clone(), prec, coeffs }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cfg, other.cfg);
        let prec = self.prec.min(other.prec);
        let p = self.cfg.p();
        let e = self.cfg.e();
        let mut wide = vec![PadicInt::zero(p, prec); 2 * e - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                let t = PadicInt::new(p, prec, a).mul(&PadicInt::new(p, prec, b));
                wide[i + j] = wide[i + j].add(&t);
            }
        }
        // reduce degrees >= e using u^e = -(lower part of E)
        for d in (e..2 * e - 1).rev() {
            let top = wide[d];
            if top.is_zero() {
                continue;
            }
            wide[d] = PadicInt::zero(p, prec);
            for j in 0..e {
                let ej = PadicInt::from_i64(p, prec, self.cfg.e_coeffs()[j]);
                wide[d - e + j] = wide[d - e + j].sub(&top.mul(&ej));
            }
        }
        OKElem {
            cfg: self.cfg.clone(),
            prec,
            coeffs: wide[..e].iter().map(|c| c.value()).collect(),
        }
    }
}

impl fmt::Display for SElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "S{{ @{} }}", self.prec);
        }
        write!(f, "S{{ ")?;
        for (k, (&i, &v)) in self.coeffs.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{i}:{v}@{}", self.prec)?;
        }
        write!(f, " }}")
    }
}


#[cfg(test)]
mod proptests {
    use super::tests_support::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn ring_laws(seed in any::<u64>()) {
            for cfg in all_cfgs() {
                let n = cfg.precision();
                let mut rng = Lcg(seed);
                let a = rand_selem(&cfg, n, &mut rng);
                let b = rand_selem(&cfg, n, &mut rng);
                let c = rand_selem(&cfg, n, &mut rng);
                prop_assert_eq!(a.add(&b), b.add(&a));
                prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
                prop_assert_eq!(
                    a.mul(&b).unwrap().mul(&c).unwrap(),
                    a.mul(&b.mul(&c).unwrap()).unwrap()
                );
                prop_assert_eq!(
                    a.mul(&b.add(&c)).unwrap(),
                    a.mul(&b).unwrap().add(&a.mul(&c).unwrap())
                );
            }
        }

        #[test]
        fn frobenius_is_ring_hom(seed in any::<u64>()) {
            for cfg in all_cfgs() {
                let n = cfg.precision();
                let mut rng = Lcg(seed);
                let a = rand_selem(&cfg, n, &mut rng);
                let b = rand_selem(&cfg, n, &mut rng);
                prop_assert_eq!(a.add(&b).frobenius(), a.frobenius().add(&b.frobenius()));
                prop_assert_eq!(
                    a.mul(&b).unwrap().frobenius(),
                    a.frobenius().mul(&b.frobenius()).unwrap()
                );
            }
        }

        #[test]
        fn projection_is_ring_hom(seed in any::<u64>()) {
            for cfg in all_cfgs() {
                let n = cfg.precision();
                let mut rng = Lcg(seed);
                let a = rand_selem(&cfg, n, &mut rng);
                let b = rand_selem(&cfg, n, &mut rng);
                prop_assert_eq!(
                    a.add(&b).project_ok().unwrap(),
                    a.project_ok().unwrap().add(&b.project_ok().unwrap())
                );
                prop_assert_eq!(
                    a.mul(&b).unwrap().project_ok().unwrap(),
                    a.project_ok().unwrap().mul(&b.project_ok().unwrap())
                );
            }
        }

        #[test]
        fn phi1_semilinearity(seed in any::<u64>()) {
            // phi1(s * t) = phi(s) * phi1(t) for t in Fil1
            for cfg in all_cfgs() {
                let n = cfg.precision();
                let mut rng = Lcg(seed);
                let s = rand_selem(&cfg, n, &mut rng);
                let t = rand_fil1(&cfg, n, &mut rng);
                prop_assert!(t.in_fil1().unwrap());
                let lhs = s.mul(&t).unwrap().phi1().unwrap();
                let rhs = s.frobenius().mul(&t.phi1().unwrap()).unwrap();
                prop_assert_eq!(lhs, rhs.reduce_to(n - 1));
            }
        }
    }
}

#[cfg(test)]
pub(crate) mod tests_support {
    use super::*;

    pub struct Lcg(pub u64);

    impl Lcg {
        pub fn next(&mut self) -> u64 {
            self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            self.0 >> 11
        }
    }

    pub fn all_cfgs() -> Vec<Arc<PadicConfig>> {
        vec![
            Arc::new(PadicConfig::new(2, vec![-2, 1], 5).unwrap()),
            Arc::new(PadicConfig::new(3, vec![-3, 1], 4).unwrap()),
            Arc::new(PadicConfig::new(3, vec![-3, 0, 1], 4).unwrap()),
        ]
    }

    pub fn rand_selem(cfg: &Arc<PadicConfig>, prec: u32, rng: &mut Lcg) -> SElem {
        let mut out = SElem::zero(cfg, prec);
        let terms = 1 + rng.next() % 5;
        for _ in 0..terms {
            let i = (rng.next() % (3 * cfg.e() as u64 + 2)) as u32;
            let v = rng.next() as i64;
            out = out.add(&SElem::single(cfg, i, PadicInt::from_i64(cfg.p(), prec, v)));
        }
        out
    }

    /// A random element of Fil1: an S-combination of E and gamma_2(E).
    pub fn rand_fil1(cfg: &Arc<PadicConfig>, prec: u32, rng: &mut Lcg) -> SElem {
        let s1 = rand_selem(cfg, prec, rng);
        let s2 = rand_selem(cfg, prec, rng);
        let g1 = SElem::eisenstein(cfg, prec);
        let g2 = SElem::gamma(cfg, 2).unwrap().reduce_to(prec);
        s1.mul(&g1).unwrap().add(&s2.mul(&g2).unwrap())
    }
}
