//! Matrices over Q_p, exact Gaussian elimination with norm pivoting, row
//! spaces for spin/annihilator computations, and Z_p-lattice operations
//! (inclusion, equality up to unimodular change, intersection via a
//! Smith-style reduction over the valuation ring).

use num::bigint::BigInt;
use num::rational::BigRational;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::padic::{norm_rational, NormInfo, PadicNumber};

#[derive(Clone, Debug)]
pub struct PadicMatrix {
    p: u64,
    rows: usize,
    cols: usize,
    entries: Vec<PadicNumber>,
}

impl PadicMatrix {
    pub fn from_fn(p: u64, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> PadicNumber) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                let e = f(r, c);
                debug_assert_eq!(e.prime(), p);
                entries.push(e);
            }
        }
        PadicMatrix { p, rows, cols, entries }
    }

    pub fn from_rows(p: u64, rows_vec: Vec<Vec<PadicNumber>>) -> Result<Self> {
        let rows = rows_vec.len();
        let cols = rows_vec.first().map(|r| r.len()).unwrap_or(0);
        for r in &rows_vec {
            if r.len() != cols {
                return Err(Error::IndexMismatch(r.len(), cols));
            }
        }
        Ok(Self::from_fn(p, rows, cols, |i, j| rows_vec[i][j].clone()))
    }

    pub fn zero(p: u64, rows: usize, cols: usize) -> Self {
        Self::from_fn(p, rows, cols, |_, _| PadicNumber::zero(p))
    }

    pub fn identity(p: u64, n: usize, prec: u32) -> Self {
        Self::from_fn(p, n, n, |r, c| {
            if r == c {
                PadicNumber::one(p, prec)
            } else {
                PadicNumber::zero(p)
            }
        })
    }

    pub fn permutation(p: u64, perm: &[usize], prec: u32) -> Self {
        let n = perm.len();
        Self::from_fn(p, n, n, |r, c| {
            if perm[r] == c {
                PadicNumber::one(p, prec)
            } else {
                PadicNumber::zero(p)
            }
        })
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, r: usize, c: usize) -> &PadicNumber {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: PadicNumber) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> Vec<PadicNumber> {
        (0..self.cols).map(|c| self.at(r, c).clone()).collect()
    }

    pub fn col(&self, c: usize) -> Vec<PadicNumber> {
        (0..self.rows).map(|r| self.at(r, c).clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.p, self.cols, self.rows, |r, c| self.at(c, r).clone())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.p != other.p {
            return Err(Error::PrimeMismatch(self.p, other.p));
        }
        if self.cols != other.rows {
            return Err(Error::IndexMismatch(self.cols, other.rows));
        }
        let mut out = Self::zero(self.p, self.rows, other.cols);
        for r in 0..self.rows {
            for c in 0..other.cols {
                let mut acc = PadicNumber::zero(self.p);
                for k in 0..self.cols {
                    acc = acc.add(&self.at(r, k).mul(other.at(k, c))?)?;
                }
                out.set(r, c, acc);
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[PadicNumber]) -> Result<Vec<PadicNumber>> {
        if v.len() != self.cols {
            return Err(Error::IndexMismatch(v.len(), self.cols));
        }
        let mut out = Vec::with_capacity(self.rows);
        for r in 0..self.rows {
            let mut acc = PadicNumber::zero(self.p);
            for k in 0..self.cols {
                acc = acc.add(&self.at(r, k).mul(&v[k])?)?;
            }
            out.push(acc);
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::IndexMismatch(self.rows * self.cols, other.rows * other.cols));
        }
        let mut out = self.clone();
        for i in 0..self.entries.len() {
            out.entries[i] = self.entries[i].add(&other.entries[i])?;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for e in &mut out.entries {
            *e = e.neg();
        }
        out
    }

    pub fn scalar_mul(&self, a: &PadicNumber) -> Result<Self> {
        let mut out = self.clone();
        for e in &mut out.entries {
            *e = e.mul(a)?;
        }
        Ok(out)
    }

    /// True iff every entry certainly lies in Z_p.
    pub fn is_integral(&self) -> Option<bool> {
        let mut all = true;
        for e in &self.entries {
            match e.is_integral() {
                Some(true) => {}
                Some(false) => return Some(false),
                None => all = false,
            }
        }
        if all {
            Some(true)
        } else {
            None
        }
    }

    /// Max norm of the entries; errors when a bound-only entry could be the
    /// maximum.
    pub fn max_entry_norm(&self) -> Result<BigRational> {
        let mut best: Option<i64> = None;
        let mut bound: Option<i64> = None;
        for e in &self.entries {
            match e.norm_info() {
                NormInfo::Zero => {}
                NormInfo::Exact(v) => {
                    best = Some(best.map_or(v, |b| b.min(v)));
                }
                NormInfo::AtMost(m) => {
                    bound = Some(bound.map_or(m, |b| b.min(m)));
                }
            }
        }
        match (best, bound) {
            (None, None) => Ok(BigRational::from_integer(BigInt::from(0))),
            (Some(v), None) => Ok(norm_rational(self.p, v)),
            (Some(v), Some(m)) if m > v => Ok(norm_rational(self.p, v)),
            _ => Err(Error::PrecisionExhausted("entry norms undecidable".into())),
        }
    }

    pub fn agrees(&self, other: &Self) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self
                .entries
                .iter()
                .zip(&other.entries)
                .all(|(a, b)| a.agrees(b))
    }

    pub fn is_identity_at_prec(&self) -> bool {
        if self.rows != self.cols {
            return false;
        }
        let one = PadicNumber::one(self.p, 1);
        (0..self.rows).all(|r| {
            (0..self.cols).all(|c| {
                if r == c {
                    self.at(r, c).agrees(&one)
                } else {
                    self.at(r, c).is_zero_decided() != Some(false)
                }
            })
        })
    }

    /// Gauss-Jordan inverse with max-norm pivoting; ties broken by lowest
    /// row index.
    pub fn inverse(&self) -> Result<Self> {
        if self.rows != self.cols {
            return Err(Error::IndexMismatch(self.rows, self.cols));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(self.p, n, max_prec(self).unwrap_or(crate::padic::DEFAULT_PREC));
        for col in 0..n {
            let candidates: Vec<PadicNumber> = (col..n).map(|r| a.at(r, col).clone()).collect();
            let pivot_rel = pick_pivot_strict(&candidates, false)?;
            let pivot_row = col + pivot_rel;
            if pivot_row != col {
                a.swap_rows(pivot_row, col);
                inv.swap_rows(pivot_row, col);
            }
            let piv = a.at(col, col).clone();
            for c in 0..n {
                a.set(col, c, a.at(col, c).div(&piv)?);
                inv.set(col, c, inv.at(col, c).div(&piv)?);
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let factor = a.at(r, col).clone();
                if factor.is_zero_decided() == Some(true) {
                    continue;
                }
                for c in 0..n {
                    let t = a.at(r, c).sub(&factor.mul(a.at(col, c))?)?;
                    a.set(r, c, t);
                    let t = inv.at(r, c).sub(&factor.mul(inv.at(col, c))?)?;
                    inv.set(r, c, t);
                }
            }
        }
        Ok(inv)
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for c in 0..self.cols {
            self.entries.swap(i * self.cols + c, j * self.cols + c);
        }
    }

    /// Valuation of the determinant, computed by elimination.
    pub fn det_valuation(&self) -> Result<i64> {
        if self.rows != self.cols {
            return Err(Error::IndexMismatch(self.rows, self.cols));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut total = 0i64;
        for col in 0..n {
            let candidates: Vec<PadicNumber> = (col..n).map(|r| a.at(r, col).clone()).collect();
            let pivot_rel = pick_pivot_strict(&candidates, false)?;
            let pivot_row = col + pivot_rel;
            a.swap_rows(pivot_row, col);
            let piv = a.at(col, col).clone();
            total += piv.known_val().ok_or(Error::SingularMatrix)?;
            for r in col + 1..n {
                let factor = a.at(r, col).div(&piv)?;
                if factor.is_zero_decided() == Some(true) {
                    continue;
                }
                for c in col..n {
                    let t = a.at(r, c).sub(&factor.mul(a.at(col, c))?)?;
                    a.set(r, c, t);
                }
            }
        }
        Ok(total)
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            (0..self.rows)
                .map(|r| Value::Array((0..self.cols).map(|c| self.at(r, c).to_json()).collect()))
                .collect(),
        )
    }

    pub fn from_json(v: &Value, p: u64, prec: u32) -> Result<Self> {
        let rows = v
            .as_array()
            .ok_or_else(|| Error::ParseError("matrix must be an array of rows".into()))?;
        let mut data = Vec::new();
        for row in rows {
            let cells = row
                .as_array()
                .ok_or_else(|| Error::ParseError("matrix row must be an array".into()))?;
            let mut out = Vec::new();
            for cell in cells {
                out.push(PadicNumber::from_json(cell, p, prec)?);
            }
            data.push(out);
        }
        if data.is_empty() {
            return Err(Error::ParseError("empty matrix".into()));
        }
        Self::from_rows(p, data)
    }
}

pub(crate) fn max_prec(m: &PadicMatrix) -> Option<u32> {
    (0..m.rows())
        .flat_map(|r| (0..m.cols()).map(move |c| (r, c)))
        .filter_map(|(r, c)| m.at(r, c).relative_prec())
        .max()
}

/// Select the index of a maximal-norm entry. With `prefer_rightmost` ties go
/// to the largest index, otherwise to the smallest. `Ok(None)` means every
/// entry is indistinguishable from zero at the working precision; an
/// undecidable comparison is an error.
pub fn pick_pivot(entries: &[PadicNumber], prefer_rightmost: bool) -> Result<Option<usize>> {
    let mut best: Option<(i64, usize)> = None;
    let mut weakest_bound: Option<i64> = None;
    for (i, e) in entries.iter().enumerate() {
        match e.norm_info() {
            NormInfo::Zero => {}
            NormInfo::AtMost(m) => {
                weakest_bound = Some(weakest_bound.map_or(m, |b| b.min(m)));
            }
            NormInfo::Exact(v) => {
                best = match best {
                    None => Some((v, i)),
                    Some((bv, bi)) => {
                        if v < bv || (v == bv && prefer_rightmost && i > bi) {
                            Some((v, i))
                        } else {
                            Some((bv, bi))
                        }
                    }
                };
            }
        }
    }
    match (best, weakest_bound) {
        (None, None) => Ok(None),
        (None, Some(_)) => Ok(None),
        (Some((v, i)), bound) => {
            if let Some(m) = bound {
                // A bound-only entry could still dominate or tie the best
                // known entry.
                if m <= v {
                    return Err(Error::PrecisionExhausted(
                        "pivot selection ambiguous at working precision".into(),
                    ));
                }
            }
            Ok(Some(i))
        }
    }
}

/// Pivot selection for inversion-style algorithms, where a usable pivot
/// must exist: all-exact-zero candidates mean a singular input, while a
/// bound-only candidate set is a precision failure.
pub fn pick_pivot_strict(entries: &[PadicNumber], prefer_rightmost: bool) -> Result<usize> {
    match pick_pivot(entries, prefer_rightmost)? {
        Some(i) => Ok(i),
        None => {
            if entries.iter().all(|e| e.is_exact_zero()) {
                Err(Error::SingularMatrix)
            } else {
                Err(Error::PrecisionExhausted(
                    "no decidable pivot at working precision".into(),
                ))
            }
        }
    }
}

/// Row-echelonized subspace of Q_p^n with pivot entries scaled to 1 and
/// cleared above and below; supports membership tests and closure under
/// linear maps.
#[derive(Clone, Debug)]
pub struct Subspace {
    p: u64,
    ambient: usize,
    basis: Vec<Vec<PadicNumber>>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn empty(p: u64, ambient: usize) -> Self {
        Subspace { p, ambient, basis: Vec::new(), pivots: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn basis(&self) -> &[Vec<PadicNumber>] {
        &self.basis
    }

    /// Reduce `v` against the basis; the result has decided-zero (or
    /// bound-only) entries at every pivot position.
    pub fn reduce(&self, v: &[PadicNumber]) -> Result<Vec<PadicNumber>> {
        let mut w = v.to_vec();
        for (b, &piv) in self.basis.iter().zip(&self.pivots) {
            let coeff = w[piv].clone();
            if coeff.is_zero_decided() == Some(true) {
                continue;
            }
            for j in 0..self.ambient {
                w[j] = w[j].sub(&coeff.mul(&b[j])?)?;
            }
        }
        Ok(w)
    }

    /// Insert `v` if independent; returns whether the dimension grew. A
    /// residual with no decidable nonzero entry counts as dependent at the
    /// working precision.
    pub fn insert(&mut self, v: &[PadicNumber]) -> Result<bool> {
        if v.len() != self.ambient {
            return Err(Error::IndexMismatch(v.len(), self.ambient));
        }
        if let Some(x) = v.first() {
            if x.prime() != self.p {
                return Err(Error::PrimeMismatch(x.prime(), self.p));
            }
        }
        let w = self.reduce(v)?;
        let piv = match pick_pivot(&w, false)? {
            None => return Ok(false),
            Some(i) => i,
        };
        let head = w[piv].clone();
        let mut row = Vec::with_capacity(self.ambient);
        for x in &w {
            row.push(x.div(&head)?);
        }
        // Clear the new pivot position in the existing rows.
        for (b, _) in self.basis.iter_mut().zip(&self.pivots) {
            let coeff = b[piv].clone();
            if coeff.is_zero_decided() == Some(true) {
                continue;
            }
            for j in 0..row.len() {
                b[j] = b[j].sub(&coeff.mul(&row[j])?)?;
            }
        }
        self.basis.push(row);
        self.pivots.push(piv);
        Ok(true)
    }

    pub fn contains(&self, v: &[PadicNumber]) -> Result<bool> {
        let w = self.reduce(v)?;
        Ok(pick_pivot(&w, false)?.is_none())
    }

    pub fn contains_subspace(&self, other: &Subspace) -> Result<bool> {
        for b in &other.basis {
            if !self.contains(b)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn same_space(&self, other: &Subspace) -> Result<bool> {
        Ok(self.dim() == other.dim() && self.contains_subspace(other)?)
    }
}

/// Kernel of a matrix as a list of basis vectors (solutions of A x = 0).
pub fn kernel(a: &PadicMatrix) -> Result<Vec<Vec<PadicNumber>>> {
    let p = a.prime();
    let rows = a.rows();
    let cols = a.cols();
    let mut m = a.clone();
    let mut pivot_cols = Vec::new();
    let mut r = 0usize;
    for c in 0..cols {
        if r >= rows {
            break;
        }
        let candidates: Vec<PadicNumber> = (r..rows).map(|i| m.at(i, c).clone()).collect();
        let rel = match pick_pivot(&candidates, false)? {
            None => continue,
            Some(i) => i,
        };
        m.swap_rows(r + rel, r);
        let piv = m.at(r, c).clone();
        for j in 0..cols {
            m.set(r, j, m.at(r, j).div(&piv)?);
        }
        for i in 0..rows {
            if i == r {
                continue;
            }
            let f = m.at(i, c).clone();
            if f.is_zero_decided() == Some(true) {
                continue;
            }
            for j in 0..cols {
                let t = m.at(i, j).sub(&f.mul(m.at(r, j))?)?;
                m.set(i, j, t);
            }
        }
        pivot_cols.push(c);
        r += 1;
    }
    let prec = max_prec(a).unwrap_or(crate::padic::DEFAULT_PREC);
    let mut out = Vec::new();
    for free in 0..cols {
        if pivot_cols.contains(&free) {
            continue;
        }
        let mut v = vec![PadicNumber::zero(p); cols];
        v[free] = PadicNumber::one(p, prec);
        for (row_idx, &pc) in pivot_cols.iter().enumerate() {
            v[pc] = m.at(row_idx, free).neg();
        }
        out.push(v);
    }
    Ok(out)
}

/// Whether the lattice spanned by the columns of `a` is contained in the one
/// spanned by the columns of `b`.
pub fn is_sublattice(a: &PadicMatrix, b: &PadicMatrix) -> Result<bool> {
    let t = b.inverse()?.mul(a)?;
    match t.is_integral() {
        Some(ans) => Ok(ans),
        None => Err(Error::PrecisionExhausted("lattice inclusion undecidable".into())),
    }
}

/// Equality of column lattices up to a unimodular integral change of basis.
pub fn lattice_eq(a: &PadicMatrix, b: &PadicMatrix) -> Result<bool> {
    Ok(is_sublattice(a, b)? && is_sublattice(b, a)?)
}

/// Smith-style diagonalization over Z_p: returns the diagonal valuations and
/// the accumulated column transform `c` with `row_ops * t * c = diag`.
/// Both transforms are unimodular over Z_p because every multiplier divides
/// by the minimal-valuation pivot.
fn smith_zp(t: &PadicMatrix) -> Result<(Vec<i64>, PadicMatrix)> {
    let n = t.rows();
    if n != t.cols() {
        return Err(Error::IndexMismatch(t.rows(), t.cols()));
    }
    let p = t.prime();
    let prec = max_prec(t).unwrap_or(crate::padic::DEFAULT_PREC);
    let mut m = t.clone();
    let mut c = PadicMatrix::identity(p, n, prec);
    let mut diag_vals = Vec::with_capacity(n);
    for k in 0..n {
        // Global minimal-valuation pivot in the trailing block.
        let mut flat = Vec::new();
        for i in k..n {
            for j in k..n {
                flat.push(m.at(i, j).clone());
            }
        }
        let idx = pick_pivot_strict(&flat, false)?;
        let (pi, pj) = (k + idx / (n - k), k + idx % (n - k));
        m.swap_rows(pi, k);
        if pj != k {
            swap_cols(&mut m, pj, k);
            swap_cols(&mut c, pj, k);
        }
        let piv = m.at(k, k).clone();
        for i in k + 1..n {
            let f = m.at(i, k).div(&piv)?;
            if f.is_zero_decided() == Some(true) {
                continue;
            }
            for j in k..n {
                let v = m.at(i, j).sub(&f.mul(m.at(k, j))?)?;
                m.set(i, j, v);
            }
        }
        for j in k + 1..n {
            let f = m.at(k, j).div(&piv)?;
            if f.is_zero_decided() == Some(true) {
                continue;
            }
            for i in k..n {
                let v = m.at(i, j).sub(&f.mul(m.at(i, k))?)?;
                m.set(i, j, v);
            }
            for i in 0..n {
                let v = c.at(i, j).sub(&f.mul(c.at(i, k))?)?;
                c.set(i, j, v);
            }
        }
        diag_vals.push(piv.known_val().ok_or_else(|| {
            Error::PrecisionExhausted("diagonal valuation undecidable".into())
        })?);
    }
    Ok((diag_vals, c))
}

fn swap_cols(m: &mut PadicMatrix, i: usize, j: usize) {
    if i == j {
        return;
    }
    for r in 0..m.rows() {
        let a = m.at(r, i).clone();
        let b = m.at(r, j).clone();
        m.set(r, i, b);
        m.set(r, j, a);
    }
}

/// Basis of the intersection of the column lattices of `a` and `b`.
pub fn lattice_intersection(a: &PadicMatrix, b: &PadicMatrix) -> Result<PadicMatrix> {
    let p = a.prime();
    let n = a.rows();
    let t = b.inverse()?.mul(a)?;
    let (vals, c) = smith_zp(&t)?;
    let prec = max_prec(a).unwrap_or(crate::padic::DEFAULT_PREC);
    // Columns a * c * diag(p^{max(0,-e_i)}) span {x in L_a : x in L_b}.
    let d = PadicMatrix::from_fn(p, n, n, |r, col| {
        if r == col {
            PadicNumber::one(p, prec).shift((-vals[col]).max(0))
        } else {
            PadicNumber::zero(p)
        }
    });
    a.mul(&c)?.mul(&d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::bigint::BigInt;

    fn q(n: i64, d: i64, p: u64) -> PadicNumber {
        PadicNumber::from_rational(&BigInt::from(n), &BigInt::from(d), p, 24).unwrap()
    }

    fn mat(p: u64, rows: Vec<Vec<i64>>) -> PadicMatrix {
        PadicMatrix::from_fn(p, rows.len(), rows[0].len(), |r, c| q(rows[r][c], 1, p))
    }

    #[test]
    fn inverse_round_trip() {
        let a = mat(5, vec![vec![1, 2], vec![3, 4]]);
        let inv = a.inverse().unwrap();
        assert!(a.mul(&inv).unwrap().is_identity_at_prec());
        assert!(inv.mul(&a).unwrap().is_identity_at_prec());
    }

    #[test]
    fn singular_detected() {
        let a = mat(5, vec![vec![1, 2], vec![2, 4]]);
        // Entries are exact integers, so the dependent column reduces to a
        // zero-at-precision column and pivoting cannot proceed.
        assert!(a.inverse().is_err());
    }

    #[test]
    fn subspace_membership() {
        let p = 7;
        let mut s = Subspace::empty(p, 3);
        assert!(s.insert(&[q(1, 1, p), q(2, 1, p), q(0, 1, p)]).unwrap());
        assert!(s.insert(&[q(0, 1, p), q(1, 1, p), q(1, 1, p)]).unwrap());
        assert!(!s.insert(&[q(1, 1, p), q(3, 1, p), q(1, 1, p)]).unwrap());
        assert_eq!(s.dim(), 2);
        assert!(s.contains(&[q(2, 1, p), q(5, 1, p), q(1, 1, p)]).unwrap());
        assert!(!s.contains(&[q(0, 1, p), q(0, 1, p), q(1, 1, p)]).unwrap());
    }

    #[test]
    fn kernel_of_rank_one() {
        let a = mat(5, vec![vec![1, 2, 3]]);
        let k = kernel(&a).unwrap();
        assert_eq!(k.len(), 2);
        for v in &k {
            let img = a.mul_vec(v).unwrap();
            assert!(img[0].is_zero_decided() != Some(false));
        }
    }

    #[test]
    fn lattice_inclusion_and_intersection() {
        let p = 3;
        let l = PadicMatrix::identity(p, 2, 24);
        let sub = PadicMatrix::from_fn(p, 2, 2, |r, c| {
            if r == c {
                if r == 1 {
                    q(3, 1, p)
                } else {
                    q(1, 1, p)
                }
            } else {
                q(0, 1, p)
            }
        });
        assert!(is_sublattice(&sub, &l).unwrap());
        assert!(!is_sublattice(&l, &sub).unwrap());
        // [[ -1, 1/3], [0, 1 ]] * Z_3^2 intersected with Z_3^2 is Z_3 + 3 Z_3.
        let g = PadicMatrix::from_fn(p, 2, 2, |r, c| match (r, c) {
            (0, 0) => q(-1, 1, p),
            (0, 1) => q(1, 3, p),
            (1, 1) => q(1, 1, p),
            _ => q(0, 1, p),
        });
        let inter = lattice_intersection(&l, &g.mul(&l).unwrap()).unwrap();
        assert!(lattice_eq(&inter, &sub).unwrap());
    }
}
