//! Dense matrices over the coefficient ring `S_N`. The ring is local, so a
//! square matrix is invertible exactly when its determinant is a unit, i.e.
//! when the residue determinant mod `(p, fil)` is nonzero; inversion uses the
//! adjugate in small dimension and Gaussian elimination with unit pivots
//! otherwise.

use std::fmt;
use std::sync::Arc;

use crate::padic::PadicConfig;
use crate::ring::SElem;
use crate::{Error, Result};

/// A `rows x cols` matrix over `S/p^m`, stored row-major. All entries share
/// one configuration; precision is the minimum of the entries' precisions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SMat {
    cfg: Arc<PadicConfig>,
    rows: usize,
    cols: usize,
    entries: Vec<SElem>,
}

impl SMat {
    pub fn zero(cfg: &Arc<PadicConfig>, rows: usize, cols: usize, prec: u32) -> Self {
        SMat {
            cfg: cfg.clone(),
            rows,
            cols,
            entries: vec![SElem::zero(cfg, prec); rows * cols],
        }
    }

    pub fn identity(cfg: &Arc<PadicConfig>, n: usize, prec: u32) -> Self {
        let mut m = SMat::zero(cfg, n, n, prec);
        for i in 0..n {
            m.set(i, i, SElem::one(cfg, prec));
        }
        m
    }

    pub fn from_rows(cfg: &Arc<PadicConfig>, rows: Vec<Vec<SElem>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut entries = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::Shape("ragged rows".into()));
            }
            for e in row {
                if e.cfg() != cfg {
                    return Err(Error::ConfigMismatch);
                }
                entries.push(e);
            }
        }
        Ok(SMat { cfg: cfg.clone(), rows: r, cols: c, entries })
    }

    pub fn from_fn(
        cfg: &Arc<PadicConfig>,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> SElem,
    ) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        SMat { cfg: cfg.clone(), rows, cols, entries }
    }

    /// Column vector from a slice.
    pub fn col_vec(cfg: &Arc<PadicConfig>, v: &[SElem]) -> Self {
        SMat {
            cfg: cfg.clone(),
            rows: v.len(),
            cols: 1,
            entries: v.to_vec(),
        }
    }

    pub fn cfg(&self) -> &Arc<PadicConfig> {
        &self.cfg
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> &SElem {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: SElem) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn prec(&self) -> u32 {
        self.entries.iter().map(SElem::prec).min().unwrap_or(self.cfg.precision())
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(SElem::is_zero)
    }

    pub fn reduce_to(&self, prec: u32) -> Self {
        self.map(|e| e.reduce_to(prec.min(e.prec())))
    }

    pub fn map(&self, f: impl Fn(&SElem) -> SElem) -> Self {
        SMat {
            cfg: self.cfg.clone(),
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    pub fn column(&self, j: usize) -> Vec<SElem> {
        (0..self.rows).map(|i| self.at(i, j).clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        SMat::from_fn(&self.cfg, self.cols, self.rows, |i, j| self.at(j, i).clone())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Shape(format!(
                "add {}x{} with {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(SMat {
            cfg: self.cfg.clone(),
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a.add(b))
                .collect(),
        })
    }

    pub fn neg(&self) -> Self {
        self.map(SElem::neg)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn scalar_mul(&self, s: &SElem) -> Result<Self> {
        let mut out = self.clone();
        for e in &mut out.entries {
            *e = e.mul(s)?;
        }
        Ok(out)
    }

    pub fn mul_p_pow(&self, k: u32) -> Self {
        self.map(|e| e.mul_p_pow(k))
    }

    pub fn div_p_pow(&self, k: u32) -> Result<Self> {
        let mut out = self.clone();
        for e in &mut out.entries {
            *e = e.div_p_pow(k)?;
        }
        Ok(out)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "mul {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let prec = self.prec().min(other.prec());
        let mut out = SMat::zero(&self.cfg, self.rows, other.cols, prec);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = SElem::zero(&self.cfg, prec);
                for k in 0..self.cols {
                    acc = acc.add(&self.at(i, k).mul(other.at(k, j))?);
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[SElem]) -> Result<Vec<SElem>> {
        if self.cols != v.len() {
            return Err(Error::Shape(format!(
                "mul {}x{} by vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        let prec = self.prec().min(v.iter().map(SElem::prec).min().unwrap_or(self.prec()));
        let mut out = Vec::with_capacity(self.rows);
        for i in 0..self.rows {
            let mut acc = SElem::zero(&self.cfg, prec);
            for k in 0..self.cols {
                acc = acc.add(&self.at(i, k).mul(&v[k])?);
            }
            out.push(acc);
        }
        Ok(out)
    }

    /// Assemble a block matrix from a 2x2 grid of blocks with compatible
    /// shapes.
    pub fn block2(tl: &SMat, tr: &SMat, bl: &SMat, br: &SMat) -> Result<SMat> {
        if tl.rows != tr.rows || bl.rows != br.rows || tl.cols != bl.cols || tr.cols != br.cols {
            return Err(Error::Shape("incompatible block shapes".into()));
        }
        let rows = tl.rows + bl.rows;
        let cols = tl.cols + tr.cols;
        Ok(SMat::from_fn(&tl.cfg, rows, cols, |i, j| {
            match (i < tl.rows, j < tl.cols) {
                (true, true) => tl.at(i, j).clone(),
                (true, false) => tr.at(i, j - tl.cols).clone(),
                (false, true) => bl.at(i - tl.rows, j).clone(),
                (false, false) => br.at(i - tl.rows, j - tl.cols).clone(),
            }
        }))
    }

    pub fn det(&self) -> Result<SElem> {
        if self.rows != self.cols {
            return Err(Error::Shape("determinant of a non-square matrix".into()));
        }
        Ok(det_minor(self, &(0..self.rows).collect::<Vec<_>>(), &(0..self.cols).collect::<Vec<_>>()))
    }

    /// True when the matrix is invertible over the local ring `S/p^m`,
    /// i.e. its determinant has unit residue.
    pub fn is_invertible(&self) -> bool {
        self.rows == self.cols && self.det().map_or(false, |d| d.is_unit())
    }

    pub fn inverse(&self) -> Result<SMat> {
        if self.rows != self.cols {
            return Err(Error::Shape("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(self.clone());
        }
        if n <= 4 {
            self.inverse_adjugate()
        } else {
            self.inverse_gauss()
        }
    }

    fn inverse_adjugate(&self) -> Result<SMat> {
        let n = self.rows;
        let det = self.det()?;
        let det_inv = det.inverse().map_err(|_| Error::NotInvertible)?;
        let all: Vec<usize> = (0..n).collect();
        let mut adj = SMat::zero(&self.cfg, n, n, self.prec());
        for i in 0..n {
            for j in 0..n {
                let rows: Vec<usize> = all.iter().copied().filter(|&r| r != j).collect();
                let cols: Vec<usize> = all.iter().copied().filter(|&c| c != i).collect();
                let mut m = det_minor(self, &rows, &cols);
                if (i + j) % 2 == 1 {
                    m = m.neg();
                }
                adj.set(i, j, m);
            }
        }
        adj.scalar_mul(&det_inv)
    }

    fn inverse_gauss(&self) -> Result<SMat> {
        let n = self.rows;
        let prec = self.prec();
        let mut a = self.reduce_to(prec);
        let mut inv = SMat::identity(&self.cfg, n, prec);
        for col in 0..n {
            // a pivot with unit residue must exist in every column of an
            // invertible matrix over a local ring
            let pivot = (col..n)
                .find(|&r| a.at(r, col).is_unit())
                .ok_or(Error::NotInvertible)?;
            if pivot != col {
                for j in 0..n {
                    let tmp = a.at(col, j).clone();
                    a.set(col, j, a.at(pivot, j).clone());
                    a.set(pivot, j, tmp);
                    let tmp = inv.at(col, j).clone();
                    inv.set(col, j, inv.at(pivot, j).clone());
                    inv.set(pivot, j, tmp);
                }
            }
            let piv_inv = a.at(col, col).inverse()?;
            for j in 0..n {
                a.set(col, j, a.at(col, j).mul(&piv_inv)?);
                inv.set(col, j, inv.at(col, j).mul(&piv_inv)?);
            }
            for r in 0..n {
                if r == col || a.at(r, col).is_zero() {
                    continue;
                }
                let f = a.at(r, col).clone();
                for j in 0..n {
                    a.set(r, j, a.at(r, j).sub(&f.mul(a.at(col, j))?));
                    inv.set(r, j, inv.at(r, j).sub(&f.mul(inv.at(col, j))?));
                }
            }
        }
        Ok(inv)
    }

    /// Solve `self * x = b` for a column vector `x`, requiring `self`
    /// invertible.
    pub fn solve(&self, b: &[SElem]) -> Result<Vec<SElem>> {
        self.inverse()?.mul_vec(b)
    }
}

fn det_minor(m: &SMat, rows: &[usize], cols: &[usize]) -> SElem {
    let prec = m.prec();
    match rows.len() {
        0 => SElem::one(m.cfg(), prec),
        1 => m.at(rows[0], cols[0]).clone(),
        _ => {
            let mut acc = SElem::zero(m.cfg(), prec);
            let sub_rows = &rows[1..];
            for (k, &c) in cols.iter().enumerate() {
                let e = m.at(rows[0], c);
                if e.is_zero() {
                    continue;
                }
                let sub_cols: Vec<usize> =
                    cols.iter().copied().filter(|&cc| cc != c).collect();
                let mut term = e.mul(&det_minor(m, sub_rows, &sub_cols)).unwrap();
                if k % 2 == 1 {
                    term = term.neg();
                }
                acc = acc.add(&term);
            }
            acc
        }
    }
}

impl fmt::Display for SMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.at(i, j))?;
            }
        }
        write!(f, "]")
    }
}
