//! Torsion modules presented as certified cokernels of maps of strongly
//! divisible modules, the coefficient object `S_oo = S (x) K0 / W`, the
//! duality on torsion objects and the extension resolver.
//!
//! A presentation is a pair of strongly divisible modules `cover` and `sub`
//! of the same rank together with a morphism `iota: sub -> cover` and a
//! witness `W` with `iota W = W iota = p^n Id`. The torsion module is
//! `cover / iota(sub)`; the certificate makes every quotient computation a
//! finite exact check.

use std::sync::Arc;

use crate::matrix::SMat;
use crate::module::{SDivModule, SDivMorphism};
use crate::padic::{PadicConfig, PadicInt};
use crate::ring::SElem;
use crate::{Error, Result};

/// A class `p^(-m) . numer` in `S_oo`, normalized so that either `m = 0`
/// (the zero class) or the numerator is not divisible by `p`. The numerator
/// is carried at precision exactly `m`, which is all the class depends on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SInfElem {
    denom_exp: u32,
    numer: SElem,
}

impl SInfElem {
    pub fn new(m: u32, numer: &SElem) -> Self {
        let mut m = m.min(numer.prec());
        let mut numer = numer.reduce_to(m);
        while m > 0 {
            if numer.is_zero() {
                m = 0;
                numer = numer.reduce_to(0);
                break;
            }
            match numer.div_p_pow(1) {
                Ok(n) => {
                    numer = n;
                    m -= 1;
                }
                Err(_) => break,
            }
        }
        if m == 0 {
            numer = SElem::zero(numer.cfg(), 0);
        }
        SInfElem { denom_exp: m, numer }
    }

    pub fn zero(cfg: &Arc<PadicConfig>) -> Self {
        SInfElem { denom_exp: 0, numer: SElem::zero(cfg, 0) }
    }

    pub fn cfg(&self) -> &Arc<PadicConfig> {
        self.numer.cfg()
    }

    pub fn denom_exp(&self) -> u32 {
        self.denom_exp
    }

    pub fn numer(&self) -> &SElem {
        &self.numer
    }

    pub fn is_zero(&self) -> bool {
        self.denom_exp == 0
    }

    pub fn add(&self, other: &Self) -> Self {
        let m = self.denom_exp.max(other.denom_exp);
        let a = self.numer.lift_to(m).mul_p_pow(m - self.denom_exp);
        let b = other.numer.lift_to(m).mul_p_pow(m - other.denom_exp);
        SInfElem::new(m, &a.add(&b))
    }

    pub fn neg(&self) -> Self {
        SInfElem { denom_exp: self.denom_exp, numer: self.numer.neg() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// The `S`-module action.
    pub fn scalar_mul(&self, s: &SElem) -> Result<Self> {
        if self.is_zero() {
            return Ok(self.clone());
        }
        let s = s.reduce_to(self.denom_exp.min(s.prec()));
        if s.prec() < self.denom_exp {
            return Err(Error::PrecisionExhausted);
        }
        Ok(SInfElem::new(self.denom_exp, &self.numer.mul(&s)?))
    }

    /// Membership in the image of `Fil^1 S_K0` in `S_oo`, decided on the
    /// numerator at the denominator precision.
    pub fn in_fil1(&self) -> Result<bool> {
        if self.is_zero() {
            return Ok(true);
        }
        self.numer.in_fil1()
    }
}

/// An element of the torsion quotient, given by a lift in the cover and an
/// optional second representative lying in `Fil^1` of the cover.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TorsionElem {
    pub lift: Vec<SElem>,
    pub fil1_witness: Option<Vec<SElem>>,
}

/// An element of the dual torsion module, represented by a functional on the
/// sub cover (a coordinate row against its adapted basis).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TorsionDualElem {
    pub functional: Vec<SElem>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TorsionPresentation {
    cover: SDivModule,
    sub: SDivModule,
    iota: SMat,
    kill_exp: u32,
    witness: SMat,
}

impl TorsionPresentation {
    /// Build a presentation, verifying every certificate identity.
    pub fn make(
        cover: SDivModule,
        sub: SDivModule,
        iota: SMat,
        kill_exp: u32,
        witness: SMat,
    ) -> Result<Self> {
        let t = TorsionPresentation::new_unchecked(cover, sub, iota, kill_exp, witness);
        t.validate()?;
        Ok(t)
    }

    /// Build without validation (for deserialization; run `validate` before
    /// computing with the result).
    pub fn new_unchecked(
        cover: SDivModule,
        sub: SDivModule,
        iota: SMat,
        kill_exp: u32,
        witness: SMat,
    ) -> Self {
        TorsionPresentation { cover, sub, iota, kill_exp, witness }
    }

    pub fn validate(&self) -> Result<()> {
        let TorsionPresentation { cover, sub, iota, kill_exp, witness } = self;
        let kill_exp = *kill_exp;
        if cover.cfg() != sub.cfg() || iota.cfg() != cover.cfg() || witness.cfg() != cover.cfg() {
            return Err(Error::ConfigMismatch);
        }
        let d = cover.rank();
        if sub.rank() != d
            || iota.rows() != d
            || iota.cols() != d
            || witness.rows() != d
            || witness.cols() != d
        {
            return Err(Error::Shape("presentation matrices must all be square of the rank".into()));
        }
        if kill_exp < 1 {
            return Err(Error::CertificateFailure("kill exponent must be at least 1".into()));
        }
        if cover.prec() < kill_exp + 2 {
            return Err(Error::CertificateFailure(format!(
                "cover precision {} is below the guard n + 2 = {}",
                cover.prec(),
                kill_exp + 2
            )));
        }
        let cert_prec = cover.prec().min(iota.prec()).min(witness.prec());
        let pn = SMat::identity(cover.cfg(), d, cert_prec).mul_p_pow(kill_exp);
        if iota.mul(&witness)?.reduce_to(cert_prec) != pn {
            return Err(Error::CertificateFailure("iota o W != p^n id".into()));
        }
        if witness.mul(&iota)?.reduce_to(cert_prec) != pn {
            return Err(Error::CertificateFailure("W o iota != p^n id".into()));
        }
        SDivMorphism::new(sub.clone(), cover.clone(), iota.clone())?
            .validate()
            .map_err(|e| Error::CertificateFailure(format!("iota is not a morphism: {e}")))?;
        Ok(())
    }

    pub fn cfg(&self) -> &Arc<PadicConfig> {
        self.cover.cfg()
    }

    pub fn cover(&self) -> &SDivModule {
        &self.cover
    }

    pub fn sub(&self) -> &SDivModule {
        &self.sub
    }

    pub fn iota(&self) -> &SMat {
        &self.iota
    }

    pub fn kill_exp(&self) -> u32 {
        self.kill_exp
    }

    pub fn witness(&self) -> &SMat {
        &self.witness
    }

    pub fn rank(&self) -> usize {
        self.cover.rank()
    }

    pub fn elem(&self, lift: Vec<SElem>) -> Result<TorsionElem> {
        if lift.len() != self.rank() {
            return Err(Error::Shape("lift length does not match the rank".into()));
        }
        Ok(TorsionElem { lift, fil1_witness: None })
    }

    /// An element together with a `Fil^1` representative (checked).
    pub fn elem_with_witness(&self, lift: Vec<SElem>, witness: Vec<SElem>) -> Result<TorsionElem> {
        if lift.len() != self.rank() || witness.len() != self.rank() {
            return Err(Error::Shape("lift length does not match the rank".into()));
        }
        if !self.cover.fil1_contains(&witness)? {
            return Err(Error::NotInFil1);
        }
        let w = TorsionElem { lift: witness.clone(), fil1_witness: None };
        let x = TorsionElem { lift: lift.clone(), fil1_witness: None };
        if !self.equal(&x, &w)? {
            return Err(Error::Semantic("witness is not equivalent to the lift".into()));
        }
        Ok(TorsionElem { lift, fil1_witness: Some(witness) })
    }

    pub fn zero_elem(&self) -> TorsionElem {
        let z = vec![SElem::zero(self.cfg(), self.cover.prec()); self.rank()];
        TorsionElem { lift: z.clone(), fil1_witness: Some(z) }
    }

    /// Basis class `e_i` of the cover.
    pub fn basis_elem(&self, i: usize) -> TorsionElem {
        let prec = self.cover.prec();
        let mut lift = vec![SElem::zero(self.cfg(), prec); self.rank()];
        lift[i] = SElem::one(self.cfg(), prec);
        TorsionElem { lift, fil1_witness: None }
    }

    /// Quotient equality, decided through the certificate: `d` lies in the
    /// image of `iota` iff `W d` is exactly divisible by `p^n` and `iota` of
    /// the quotient reproduces `d`.
    pub fn equal(&self, x: &TorsionElem, y: &TorsionElem) -> Result<bool> {
        if x.lift.len() != self.rank() || y.lift.len() != self.rank() {
            return Err(Error::Shape("element does not match the presentation".into()));
        }
        let d: Vec<SElem> = x.lift.iter().zip(&y.lift).map(|(a, b)| a.sub(b)).collect();
        let wd = self.witness.mul_vec(&d)?;
        let mut q = Vec::with_capacity(self.rank());
        for z in &wd {
            match z.div_p_pow(self.kill_exp) {
                Ok(v) => q.push(v),
                Err(Error::NotDivisible) => return Ok(false),
                Err(e) => return Err(e),
            }
        }
        let prec = q.iter().map(SElem::prec).min().unwrap_or(0);
        let back = self.iota.mul_vec(&q)?;
        Ok(back
            .iter()
            .zip(&d)
            .all(|(b, dd)| b.reduce_to(prec.min(b.prec())) == dd.reduce_to(prec.min(dd.prec()))))
    }

    /// `phi_1` on the quotient, computed on the stored `Fil^1` representative.
    pub fn phi1(&self, x: &TorsionElem) -> Result<TorsionElem> {
        let w = match &x.fil1_witness {
            Some(w) => w.clone(),
            None => {
                if self.cover.fil1_contains(&x.lift)? {
                    x.lift.clone()
                } else {
                    return Err(Error::MissingWitness);
                }
            }
        };
        let out = self.cover.phi1_apply(&w)?;
        self.elem(out)
    }

    /// The dual presentation: the two covers are dualized and swapped, and
    /// `iota`, `W` are transposed; the kill exponent is unchanged.
    pub fn dual(&self) -> Result<TorsionPresentation> {
        let cover = self.sub.dual()?;
        let sub = self.cover.dual()?;
        let prec = cover.prec().min(sub.prec());
        TorsionPresentation::make(
            cover,
            sub,
            self.iota.transpose().reduce_to(prec),
            self.kill_exp,
            self.witness.transpose().reduce_to(prec),
        )
    }

    pub fn dual_elem(&self, functional: Vec<SElem>) -> Result<TorsionDualElem> {
        if functional.len() != self.rank() {
            return Err(Error::Shape("functional length does not match the rank".into()));
        }
        Ok(TorsionDualElem { functional })
    }

    /// Evaluation pairing: the class `p^(-n) . f(W lift(x))` in `S_oo`
    /// (`W lift(x)` is the sub-cover preimage of `p^n lift(x)`).
    pub fn dual_eval(&self, f: &TorsionDualElem, x: &TorsionElem) -> Result<SInfElem> {
        if f.functional.len() != self.rank() || x.lift.len() != self.rank() {
            return Err(Error::Shape("element does not match the presentation".into()));
        }
        let w = self.witness.mul_vec(&x.lift)?;
        let prec = w
            .iter()
            .chain(&f.functional)
            .map(SElem::prec)
            .min()
            .unwrap_or(self.cover.prec());
        let mut acc = SElem::zero(self.cfg(), prec);
        for (fi, wi) in f.functional.iter().zip(&w) {
            acc = acc.add(&fi.mul(wi)?);
        }
        Ok(SInfElem::new(self.kill_exp, &acc))
    }

    /// Membership of a functional in `Fil^1` of the dual torsion module: its
    /// values on the adapted generators of `Fil^1` of the cover must land in
    /// `Fil^1 S_oo`.
    pub fn fil1_dual_contains(&self, f: &TorsionDualElem) -> Result<bool> {
        let prec = self.cover.prec();
        let e = SElem::eisenstein(self.cfg(), prec);
        for i in 0..self.rank() {
            let mut gen = vec![SElem::zero(self.cfg(), prec); self.rank()];
            gen[i] = if self.cover.types()[i] == 1 {
                e.clone()
            } else {
                SElem::one(self.cfg(), prec)
            };
            let v = self.dual_eval(f, &TorsionElem { lift: gen, fil1_witness: None })?;
            if !v.in_fil1()? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `phi_1` on the dual torsion module. The functional is first lifted to
    /// `Fil^1` of the dual of the sub cover: coordinates sitting at type-1
    /// slots of that dual must lie in `Fil^1 S`, and are corrected by the
    /// admissible modification `p^n . h` (exactly the image of the dual of
    /// the cover under the transposed certificate), which requires the
    /// residual projection to `O_K` to be divisible by `p^n`.
    pub fn dual_phi1(&self, f: &TorsionDualElem) -> Result<TorsionDualElem> {
        if !self.fil1_dual_contains(f)? {
            return Err(Error::NotInFil1);
        }
        let dual_cover = self.sub.dual()?;
        let prec = dual_cover
            .prec()
            .min(f.functional.iter().map(SElem::prec).min().unwrap_or(dual_cover.prec()));
        let n = self.kill_exp;
        let mut lifted = Vec::with_capacity(self.rank());
        for (j, fj) in f.functional.iter().enumerate() {
            let fj = fj.reduce_to(prec);
            if dual_cover.types()[j] == 0 || fj.in_fil1()? {
                lifted.push(fj);
                continue;
            }
            // correct by -p^n . (polynomial lift of proj(f_j) / p^n)
            let proj = fj.project_ok()?;
            let p = self.cfg().p();
            let mut corr = SElem::zero(self.cfg(), prec);
            for (k, &v) in proj.coeffs().iter().enumerate() {
                let q = PadicInt::new(p, prec, v).div_p_pow(n).map_err(|_| {
                    Error::LiftFailure(format!(
                        "coordinate {j} has O_K projection not divisible by p^{n}"
                    ))
                })?;
                // u^k with k < e is the divided-power basis element b(k)
                corr = corr.add(&SElem::single(
                    self.cfg(),
                    k as u32,
                    PadicInt::new(p, prec, q.value()),
                ));
            }
            let fj = fj.sub(&corr.mul_p_pow(n));
            if !fj.in_fil1()? {
                return Err(Error::LiftFailure(format!(
                    "coordinate {j} admits no Fil1-compatible lift at precision {prec}"
                )));
            }
            lifted.push(fj);
        }
        let out = dual_cover.phi1_apply(&lifted)?;
        Ok(TorsionDualElem { functional: out })
    }

    /// Equality of dual elements, decided in the dual presentation.
    pub fn dual_equal(&self, f: &TorsionDualElem, g: &TorsionDualElem) -> Result<bool> {
        let dual = self.dual()?;
        let prec = dual.cover.prec();
        let reduce = |v: &[SElem]| -> Vec<SElem> {
            v.iter().map(|e| e.reduce_to(prec.min(e.prec()))).collect()
        };
        dual.equal(
            &TorsionElem { lift: reduce(&f.functional), fil1_witness: None },
            &TorsionElem { lift: reduce(&g.functional), fil1_witness: None },
        )
    }
}

/// Choice data for the extension resolver: `t` holds the cover lift of the
/// second factor's generators (the first-factor component of each lift) and
/// `xhat` the chosen common antecedents, whose second-factor block must
/// reproduce that factor's structure matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtensionData {
    pub t: SMat,
    pub xhat: SMat,
}

impl ExtensionData {
    /// The split extension: zero lift corrections, antecedents straight from
    /// the second factor.
    pub fn split(res_m: &TorsionPresentation, res_n: &TorsionPresentation) -> Self {
        let cfg = res_m.cfg();
        let dm = res_m.rank();
        let dn = res_n.rank();
        let prec = res_m.cover().prec().min(res_n.cover().prec());
        let t = SMat::zero(cfg, dm, dn, prec);
        let xhat = SMat::block2(
            &SMat::zero(cfg, dm, dn, prec),
            &SMat::zero(cfg, dm, 0, prec),
            &res_n.cover().structure().reduce_to(prec),
            &SMat::zero(cfg, dn, 0, prec),
        )
        .unwrap();
        ExtensionData { t, xhat }
    }
}

/// Resolve an extension of the quotient of `res_n` by the quotient of
/// `res_m` into a presentation of the extension: the cover is the direct sum
/// with the Frobenius structure twisted by the chosen antecedents, the sub
/// cover is the kernel basis built from the corrected lifts, and the
/// certificate is assembled blockwise with kill exponent `n_M + n_N`.
pub fn extension_resolve(
    res_m: &TorsionPresentation,
    res_n: &TorsionPresentation,
    ext: &ExtensionData,
) -> Result<TorsionPresentation> {
    if res_m.cfg() != res_n.cfg() {
        return Err(Error::ConfigMismatch);
    }
    let cfg = res_m.cfg();
    let dm = res_m.rank();
    let dn = res_n.rank();
    let prec = res_m.cover().prec().min(res_n.cover().prec());
    if ext.t.rows() != dm || ext.t.cols() != dn {
        return Err(Error::InvalidExtensionData(format!(
            "lift block is {}x{}, expected {}x{}",
            ext.t.rows(),
            ext.t.cols(),
            dm,
            dn
        )));
    }
    if ext.xhat.rows() != dm + dn || ext.xhat.cols() != dn {
        return Err(Error::InvalidExtensionData(format!(
            "antecedent block is {}x{}, expected {}x{}",
            ext.xhat.rows(),
            ext.xhat.cols(),
            dm + dn,
            dn
        )));
    }
    // the antecedents must project onto the second factor's structure columns
    let a_n = res_n.cover().structure().reduce_to(prec);
    for j in 0..dn {
        for i in 0..dn {
            let got = ext.xhat.at(dm + i, j).reduce_to(prec.min(ext.xhat.at(dm + i, j).prec()));
            if got != *a_n.at(i, j) {
                return Err(Error::InvalidExtensionData(format!(
                    "antecedent {j} does not project onto the structure column"
                )));
            }
        }
    }
    // generators of the second factor chosen in Fil^1 must have lift
    // corrections in Fil^1 at the first factor's type-1 slots
    for j in 0..dn {
        if res_n.cover().types()[j] == 0 {
            for i in 0..dm {
                if res_m.cover().types()[i] == 1 && !ext.t.at(i, j).in_fil1()? {
                    return Err(Error::InvalidExtensionData(format!(
                        "lift of generator {j} does not lie in Fil1"
                    )));
                }
            }
        }
    }
    // cover: direct sum with twisted Frobenius structure
    let mut types: Vec<u8> = res_m.cover().types().to_vec();
    types.extend_from_slice(res_n.cover().types());
    let c_block = SMat::from_fn(cfg, dm, dn, |i, j| ext.xhat.at(i, j).reduce_to(prec));
    let a_x = SMat::block2(
        &res_m.cover().structure().reduce_to(prec),
        &c_block,
        &SMat::zero(cfg, dn, dm, prec),
        &a_n,
    )?;
    let cover = SDivModule::new(cfg, types, a_x)?;
    // certificate
    let n_m = res_m.kill_exp();
    let n_n = res_n.kill_exp();
    let nu = n_m + n_n;
    let t_iota_n = ext.t.reduce_to(prec).mul(&res_n.iota().reduce_to(prec))?;
    let iota_x = SMat::block2(
        &res_m.iota().reduce_to(prec),
        &t_iota_n,
        &SMat::zero(cfg, dn, dm, prec),
        &res_n.iota().reduce_to(prec),
    )?;
    let w_m = res_m.witness().reduce_to(prec);
    let w_n = res_n.witness().reduce_to(prec);
    let w_x = SMat::block2(
        &w_m.mul_p_pow(n_n),
        &w_m.mul(&t_iota_n)?.mul(&w_n)?.neg(),
        &SMat::zero(cfg, dn, dm, prec),
        &w_n.mul_p_pow(n_m),
    )?;
    // sub cover: structure solved generator-wise through the certificate
    let mut sub_types: Vec<u8> = res_m.sub().types().to_vec();
    sub_types.extend_from_slice(res_n.sub().types());
    let e = SElem::eisenstein(cfg, prec);
    let mut a_sub_cols: Vec<Vec<SElem>> = Vec::with_capacity(dm + dn);
    for j in 0..dm + dn {
        let mut gen = iota_x.column(j);
        if sub_types[j] == 1 {
            for g in &mut gen {
                *g = g.mul(&e)?;
            }
        }
        let v = cover.phi1_apply(&gen)?;
        let wv = w_x.mul_vec(&v)?;
        let mut y = Vec::with_capacity(dm + dn);
        for z in &wv {
            y.push(z.div_p_pow(nu).map_err(|_| {
                Error::InvalidExtensionData(format!(
                    "kernel structure column {j} is not solvable through the certificate"
                ))
            })?);
        }
        let yprec = y.iter().map(SElem::prec).min().unwrap_or(prec);
        let back = iota_x.mul_vec(&y)?;
        for (b, vv) in back.iter().zip(&v) {
            if b.reduce_to(yprec.min(b.prec())) != vv.reduce_to(yprec.min(vv.prec())) {
                return Err(Error::InvalidExtensionData(format!(
                    "kernel structure column {j} fails the certificate check"
                )));
            }
        }
        a_sub_cols.push(y);
    }
    // the solved columns are certified one nu-division below the cover, but
    // their diagonal blocks are forced to restrict to the input sub
    // structures, which are known one unit below the cover; only the coupling
    // block is genuinely new, and any lift of it defines the same strongly
    // divisible sub module up to the ambiguity killed by iota, so it is
    // lifted canonically and re-verified by the validation below
    let sub_prec = prec - 1;
    let a_sm = res_m.sub().structure().reduce_to(sub_prec);
    let a_sn = res_n.sub().structure().reduce_to(sub_prec);
    let a_sub = SMat::from_fn(cfg, dm + dn, dm + dn, |i, j| {
        if i < dm && j < dm {
            a_sm.at(i, j).clone()
        } else if i >= dm && j >= dm {
            a_sn.at(i - dm, j - dm).clone()
        } else {
            a_sub_cols[j][i].lift_to(sub_prec)
        }
    });
    for (j, col) in a_sub_cols.iter().enumerate() {
        for (i, y) in col.iter().enumerate() {
            let m = y.prec().min(sub_prec);
            if a_sub.at(i, j).reduce_to(m) != y.reduce_to(m) {
                return Err(Error::InvalidExtensionData(format!(
                    "kernel structure column {j} does not restrict to the factors"
                )));
            }
        }
    }
    let sub = SDivModule::new(cfg, sub_types, a_sub)?;
    TorsionPresentation::make(cover, sub, iota_x, nu, w_x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::pow_checked;
    use crate::ring::tests_support::{rand_fil1, rand_selem, Lcg};
    use proptest::prelude::*;

    // duals and resolver outputs lose precision units, so torsion tests run
    // at a deeper window than the ring-level suites
    fn all_cfgs() -> Vec<Arc<PadicConfig>> {
        vec![
            Arc::new(PadicConfig::new(2, vec![-2, 1], 5).unwrap()),
            Arc::new(PadicConfig::new(3, vec![-3, 1], 5).unwrap()),
            Arc::new(PadicConfig::new(3, vec![-3, 0, 1], 5).unwrap()),
        ]
    }

    fn rand_sinf(cfg: &Arc<PadicConfig>, rng: &mut Lcg) -> SInfElem {
        let m = (rng.next() % (cfg.precision() as u64 + 1)) as u32;
        SInfElem::new(m, &rand_selem(cfg, cfg.precision(), rng))
    }

    /// `cover / p^n cover`.
    fn mod_pn(m: &SDivModule, n: u32) -> TorsionPresentation {
        let d = m.rank();
        let prec = m.prec();
        let iota = SMat::identity(m.cfg(), d, prec).mul_p_pow(n);
        let w = SMat::identity(m.cfg(), d, prec);
        TorsionPresentation::make(m.clone(), m.clone(), iota, n, w).unwrap()
    }

    fn mult1(cfg: &Arc<PadicConfig>) -> SDivModule {
        let n = cfg.precision();
        SDivModule::new(cfg, vec![1], SMat::identity(cfg, 1, n)).unwrap()
    }

    fn et1(cfg: &Arc<PadicConfig>) -> SDivModule {
        let n = cfg.precision();
        SDivModule::new(cfg, vec![0], SMat::identity(cfg, 1, n)).unwrap()
    }

    #[test]
    fn sinf_normalization() {
        let cfg = all_cfgs().remove(0);
        let p = cfg.p() as i64;
        // p^m . (m, s) = 0
        let s = SElem::from_coeffs(&cfg, 3, &[(0, 1), (2, 3)]);
        let x = SInfElem::new(3, &s);
        let killed = x.scalar_mul(&SElem::from_coeffs(&cfg, 3, &[(0, p * p * p)])).unwrap();
        assert!(killed.is_zero());
        // common factor with the denominator is cancelled
        let y = SInfElem::new(2, &SElem::from_coeffs(&cfg, 2, &[(1, p)]));
        assert_eq!(y.denom_exp(), 1);
        assert_eq!(y.numer(), &SElem::from_coeffs(&cfg, 1, &[(1, 1)]));
        // integral classes are zero
        assert!(SInfElem::new(2, &SElem::from_coeffs(&cfg, 2, &[(0, 4)])).is_zero());
    }

    #[test]
    fn sinf_laws() {
        let mut rng = Lcg(11);
        for cfg in all_cfgs() {
            for _ in 0..200 {
                let a = rand_sinf(&cfg, &mut rng);
                let b = rand_sinf(&cfg, &mut rng);
                let c = rand_sinf(&cfg, &mut rng);
                assert_eq!(a.add(&b), b.add(&a));
                assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
                assert!(a.sub(&a).is_zero());
                // p^m kills
                let pm = pow_checked(cfg.p(), a.denom_exp()).unwrap() as i64;
                let s = SElem::from_coeffs(&cfg, cfg.precision(), &[(0, pm)]);
                assert!(a.scalar_mul(&s).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn sinf_fil1_closure() {
        let mut rng = Lcg(23);
        for cfg in all_cfgs() {
            let n = cfg.precision();
            for _ in 0..200 {
                let m = 1 + (rng.next() % (n as u64 - 1)) as u32;
                let a = SInfElem::new(m, &rand_fil1(&cfg, n, &mut rng).reduce_to(m));
                let b = SInfElem::new(m, &rand_fil1(&cfg, n, &mut rng).reduce_to(m));
                assert!(a.in_fil1().unwrap());
                assert!(a.add(&b).in_fil1().unwrap());
                let s = rand_selem(&cfg, n, &mut rng);
                assert!(a.scalar_mul(&s).unwrap().in_fil1().unwrap());
            }
        }
    }

    #[test]
    fn make_validates_certificates() {
        let cfg = all_cfgs().remove(0);
        let m = mult1(&cfg);
        mod_pn(&m, 1);
        mod_pn(&m, 2);
        // zero witness must be rejected
        let prec = m.prec();
        let iota = SMat::identity(&cfg, 1, prec).mul_p_pow(1);
        let w0 = SMat::zero(&cfg, 1, 1, prec);
        assert!(matches!(
            TorsionPresentation::make(m.clone(), m.clone(), iota, 1, w0),
            Err(Error::CertificateFailure(_))
        ));
        // precision guard
        let small = m.reduce_to(2);
        let iota = SMat::identity(&cfg, 1, 2).mul_p_pow(1);
        let w = SMat::identity(&cfg, 1, 2);
        assert!(matches!(
            TorsionPresentation::make(small.clone(), small, iota, 1, w),
            Err(Error::CertificateFailure(_))
        ));
    }

    #[test]
    fn equality_in_quotient() {
        for cfg in all_cfgs() {
            let p = cfg.p() as i64;
            let t = mod_pn(&mult1(&cfg), 1);
            let e1 = t.basis_elem(0);
            assert!(t.equal(&e1, &e1).unwrap());
            // e1 + iota(anything) is the same class
            let shift = t
                .elem(vec![e1.lift[0].add(&SElem::from_coeffs(&cfg, cfg.precision(), &[(0, p), (1, 3 * p)]))])
                .unwrap();
            assert!(t.equal(&e1, &shift).unwrap());
            // but p.e1 is not e1 when e1 != 0
            let twice = t.elem(vec![e1.lift[0].mul_i64(1 + p)]).unwrap();
            assert!(t.equal(&e1, &twice).unwrap());
            let pe = t.elem(vec![e1.lift[0].mul_i64(p)]).unwrap();
            assert!(!t.equal(&e1, &pe).unwrap());
            assert!(t.equal(&pe, &t.zero_elem()).unwrap());
        }
    }

    #[test]
    fn phi1_on_quotient() {
        let cfg = all_cfgs().remove(0);
        let n = cfg.precision();
        let t = mod_pn(&mult1(&cfg), 1);
        // phi_1(class(E e1)) = class(e1)
        let x = t.elem(vec![SElem::eisenstein(&cfg, n)]).unwrap();
        let out = t.phi1(&x).unwrap();
        let e1 = t.elem(vec![SElem::one(&cfg, n - 1)]).unwrap();
        assert!(t.equal(&out, &e1).unwrap());
        // phi_1(0) = 0
        let z = t.phi1(&t.zero_elem()).unwrap();
        assert!(t.equal(&z, &t.zero_elem()).unwrap());
        // no witness and lift not in Fil1
        let bad = t.elem(vec![SElem::u(&cfg, n)]).unwrap();
        assert_eq!(t.phi1(&bad), Err(Error::MissingWitness));
    }

    #[test]
    fn phi1_well_defined_on_classes() {
        let mut rng = Lcg(77);
        for cfg in all_cfgs() {
            let n = cfg.precision();
            let t = mod_pn(&mult1(&cfg), 1);
            for _ in 0..20 {
                let w = rand_fil1(&cfg, n, &mut rng);
                // add iota of a Fil1 element of the sub cover
                let extra = rand_fil1(&cfg, n, &mut rng).mul_p_pow(1);
                let x = t.elem_with_witness(vec![w.clone()], vec![w.clone()]).unwrap();
                let y = t
                    .elem_with_witness(vec![w.add(&extra)], vec![w.add(&extra)])
                    .unwrap();
                let fx = t.phi1(&x).unwrap();
                let fy = t.phi1(&y).unwrap();
                assert!(t.equal(&fx, &fy).unwrap());
            }
        }
    }

    #[test]
    fn dual_presentation_shapes() {
        for cfg in all_cfgs() {
            let t = mod_pn(&mult1(&cfg), 1);
            let d = t.dual().unwrap();
            // multiplicative-type quotient dualizes to etale type
            assert_eq!(d.cover().types(), &[0]);
            assert_eq!(d.kill_exp(), 1);
            // double dual has the original cover data
            let dd = d.dual().unwrap();
            assert_eq!(dd.cover().types(), t.cover().types());
            assert_eq!(
                dd.cover().structure(),
                &t.cover().structure().reduce_to(dd.cover().prec())
            );
        }
    }

    #[test]
    fn dual_eval_examples() {
        let cfg = all_cfgs().remove(0);
        let n = cfg.precision();
        let t = mod_pn(&mult1(&cfg), 1);
        let f = t.dual_elem(vec![SElem::one(&cfg, n)]).unwrap();
        let x = t.basis_elem(0);
        let v = t.dual_eval(&f, &x).unwrap();
        assert_eq!(v.denom_exp(), 1);
        assert_eq!(v.numer(), &SElem::one(&cfg, 1));
        // p . x evaluates to an integral class, hence 0
        let px = t.elem(vec![x.lift[0].mul_i64(2)]).unwrap();
        assert!(t.dual_eval(&f, &px).unwrap().is_zero());
    }

    #[test]
    fn dual_eval_independences() {
        let mut rng = Lcg(3);
        for cfg in all_cfgs() {
            let n = cfg.precision();
            for _ in 0..100 {
                let t = mod_pn(&mult1(&cfg), 1);
                let f = t.dual_elem(vec![rand_selem(&cfg, n, &mut rng)]).unwrap();
                let x = t.elem(vec![rand_selem(&cfg, n, &mut rng)]).unwrap();
                let base = t.dual_eval(&f, &x).unwrap();
                // lift change by iota(y)
                let y = rand_selem(&cfg, n, &mut rng);
                let x2 = t.elem(vec![x.lift[0].add(&t.iota().at(0, 0).mul(&y).unwrap())]).unwrap();
                assert_eq!(t.dual_eval(&f, &x2).unwrap(), base);
                // raising the exponent: same iota, witness p.W with n+1
                let t3 = TorsionPresentation::make(
                    t.cover().clone(),
                    t.sub().clone(),
                    t.iota().clone(),
                    2,
                    t.witness().mul_p_pow(1),
                )
                .unwrap();
                assert_eq!(t3.dual_eval(&f, &x).unwrap(), base);
            }
        }
    }

    #[test]
    fn fil1_dual_membership() {
        let cfg = all_cfgs().remove(0);
        let n = cfg.precision();
        let t = mod_pn(&mult1(&cfg), 1);
        let zero = t.dual_elem(vec![SElem::zero(&cfg, n)]).unwrap();
        assert!(t.fil1_dual_contains(&zero).unwrap());
        // on the multiplicative fixture the canonical generator is in Fil1:
        // its value on E.e1 is p^{-1} E which lies in Fil1 S_oo
        let f = t.dual_elem(vec![SElem::one(&cfg, n)]).unwrap();
        assert!(t.fil1_dual_contains(&f).unwrap());
        // on the etale fixture the generator e1 itself generates Fil1, and
        // p^{-1}.1 is not in Fil1 S_oo
        let te = mod_pn(&et1(&cfg), 1);
        let fe = te.dual_elem(vec![SElem::one(&cfg, n)]).unwrap();
        assert!(!te.fil1_dual_contains(&fe).unwrap());
        // but p . functional is integral-valued, hence in Fil1
        let fep = te.dual_elem(vec![SElem::from_coeffs(&cfg, n, &[(0, 2)])]).unwrap();
        assert!(te.fil1_dual_contains(&fep).unwrap());
    }

    #[test]
    fn dual_phi1_fixture() {
        for cfg in all_cfgs() {
            let n = cfg.precision();
            let t = mod_pn(&mult1(&cfg), 1);
            // zero maps to zero
            let zero = t.dual_elem(vec![SElem::zero(&cfg, n)]).unwrap();
            let out = t.dual_phi1(&zero).unwrap();
            assert!(out.functional.iter().all(SElem::is_zero));
            // the canonical Fil1 dual generator reproduces the dual structure
            // constant c: dual cover of the mult fixture is etale with
            // structure c, and phi_1(1 . e*) = phi(1) . c = c
            let f = t.dual_elem(vec![SElem::one(&cfg, n)]).unwrap();
            let out = t.dual_phi1(&f).unwrap();
            assert_eq!(out.functional, vec![SElem::breuil_c(&cfg).reduce_to(out.functional[0].prec())]);
        }
    }

    #[test]
    fn dual_phi1_lift_independence() {
        let mut rng = Lcg(13);
        for cfg in all_cfgs() {
            let n = cfg.precision();
            let t = mod_pn(&mult1(&cfg), 1);
            for _ in 0..10 {
                let f0 = rand_selem(&cfg, n, &mut rng);
                let f = t.dual_elem(vec![f0.clone()]).unwrap();
                if !t.fil1_dual_contains(&f).unwrap() {
                    continue;
                }
                // another representative of the same dual class: add the
                // image of the dual of the cover, i.e. g . iota^T
                let g = rand_selem(&cfg, n, &mut rng);
                let shifted = t
                    .dual_elem(vec![f0.add(&g.mul(t.iota().at(0, 0)).unwrap())])
                    .unwrap();
                assert!(t.fil1_dual_contains(&shifted).unwrap());
                let a = t.dual_phi1(&f).unwrap();
                let b = t.dual_phi1(&shifted).unwrap();
                assert!(t.dual_equal(&a, &b).unwrap());
            }
        }
    }

    #[test]
    fn resolver_split_extension() {
        for cfg in all_cfgs() {
            let tm = mod_pn(&mult1(&cfg), 1);
            let tn = mod_pn(&et1(&cfg), 1);
            let ext = ExtensionData::split(&tm, &tn);
            let tx = extension_resolve(&tm, &tn, &ext).unwrap();
            assert_eq!(tx.rank(), 2);
            assert_eq!(tx.cover().types(), &[1, 0]);
            assert_eq!(tx.kill_exp(), 2);
            // block-diagonal iota
            assert!(tx.iota().at(0, 1).is_zero());
            assert!(tx.iota().at(1, 0).is_zero());
        }
    }

    #[test]
    fn resolver_nontrivial_lift() {
        // extension of an etale-type quotient by a multiplicative-type one
        // with a nontrivial lift choice
        for cfg in all_cfgs() {
            let n = cfg.precision();
            let tm = mod_pn(&mult1(&cfg), 1);
            let tn = mod_pn(&et1(&cfg), 1);
            let mut ext = ExtensionData::split(&tm, &tn);
            // N generator has type 0, M slot has type 1: the lift correction
            // must be taken in Fil1
            ext.t.set(0, 0, SElem::eisenstein(&cfg, n));
            ext.xhat.set(0, 0, SElem::u(&cfg, n));
            let tx = extension_resolve(&tm, &tn, &ext).unwrap();
            assert_eq!(tx.cover().types(), &[1, 0]);
            assert_eq!(tx.cover().structure().at(0, 1), &SElem::u(&cfg, n));
            // non-Fil1 lift correction is rejected
            let mut bad = ext.clone();
            bad.t.set(0, 0, SElem::u(&cfg, n));
            assert!(matches!(
                extension_resolve(&tm, &tn, &bad),
                Err(Error::InvalidExtensionData(_))
            ));
            // antecedent must project onto the structure column
            let mut bad = ext.clone();
            bad.xhat.set(1, 0, SElem::u(&cfg, n));
            assert!(matches!(
                extension_resolve(&tm, &tn, &bad),
                Err(Error::InvalidExtensionData(_))
            ));
        }
    }

    #[test]
    fn resolver_projects_back() {
        // the quotient of the resolved presentation restricted to the second
        // block reproduces the second factor's quotient on generators
        for cfg in all_cfgs() {
            let n = cfg.precision();
            let tm = mod_pn(&mult1(&cfg), 1);
            let tn = mod_pn(&et1(&cfg), 1);
            let mut ext = ExtensionData::split(&tm, &tn);
            ext.t.set(0, 0, SElem::eisenstein(&cfg, n));
            let tx = extension_resolve(&tm, &tn, &ext).unwrap();
            // e2 and e2 + iota_N(s) project to equal classes in X
            let s = SElem::from_coeffs(&cfg, n, &[(0, 3), (1, 1)]);
            let shift = tn.iota().at(0, 0).mul(&s).unwrap();
            let x1 = tx.elem(vec![SElem::zero(&cfg, n), SElem::one(&cfg, n)]).unwrap();
            // the lift of iota_N(s) into X is (t . iota_N(s), iota_N(s))
            let x2 = tx
                .elem(vec![
                    ext.t.at(0, 0).mul(&shift).unwrap(),
                    SElem::one(&cfg, n).add(&shift),
                ])
                .unwrap();
            assert!(tx.equal(&x1, &x2).unwrap());
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(8))]

        #[test]
        fn resolver_random_ext_data(seed in any::<u64>()) {
            for cfg in all_cfgs() {
                let n = cfg.precision();
                let mut rng = Lcg(seed);
                for (a, b) in [(0u8, 0u8), (0, 1), (1, 0), (1, 1)] {
                    let mk = |t: u8| {
                        let m = SDivModule::new(
                            &cfg,
                            vec![t],
                            SMat::identity(&cfg, 1, n),
                        )
                        .unwrap();
                        mod_pn(&m, 1)
                    };
                    let tm = mk(a);
                    let tn = mk(b);
                    let mut ext = ExtensionData::split(&tm, &tn);
                    let tcorr = if b == 0 && a == 1 {
                        rand_fil1(&cfg, n, &mut rng)
                    } else {
                        rand_selem(&cfg, n, &mut rng)
                    };
                    ext.t.set(0, 0, tcorr);
                    ext.xhat.set(0, 0, rand_selem(&cfg, n, &mut rng));
                    let tx = extension_resolve(&tm, &tn, &ext).unwrap();
                    prop_assert_eq!(tx.cover().types(), &[a, b][..]);
                    prop_assert_eq!(tx.kill_exp(), 2);
                }
            }
        }
    }
}
