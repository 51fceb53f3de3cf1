//! Normalized LUP decomposition of GL_n(Q_p): every invertible matrix
//! factors uniquely as b * u * s with b upper-triangular invertible, u a
//! normalized representative (integral, each row of max norm 1, the entry
//! in the greatest column among norm-1 entries equal to 1) and s a
//! permutation of the canonical basis.
//!
//! The elimination runs bottom-up; each row is cleared at the pivot columns
//! of the rows below it and then scaled so that its rightmost maximal-norm
//! entry becomes 1. Uniqueness of the factorization makes the output
//! independent of everything except this pivot rule, which mirrors the
//! greatest-column normalization clause.

use num::bigint::BigInt;

use crate::error::{Error, Result};
use crate::matrix::{pick_pivot, pick_pivot_strict, PadicMatrix};
use crate::padic::PadicNumber;

/// Dimensions above this are refused.
pub const MAX_DIM: usize = 4;

/// Pivot entries must keep at least this many digits.
const GUARD_DIGITS: u32 = 2;

#[derive(Clone, Debug)]
pub struct BksDecomposition {
    /// Upper-triangular invertible factor.
    pub b: PadicMatrix,
    /// Normalized factor in K^-.
    pub u: PadicMatrix,
    /// Permutation: row j of the permutation matrix has its 1 in column
    /// `perm[j]`.
    pub perm: Vec<usize>,
}

impl BksDecomposition {
    pub fn s_matrix(&self, prec: u32) -> PadicMatrix {
        PadicMatrix::permutation(self.b.prime(), &self.perm, prec)
    }

    /// The product u * s, i.e. the K^- S representative of the coset.
    pub fn us(&self) -> Result<PadicMatrix> {
        let prec = self
            .u
            .at(0, 0)
            .relative_prec()
            .unwrap_or(crate::padic::DEFAULT_PREC);
        self.u.mul(&self.s_matrix(prec))
    }

    pub fn reconstruct(&self) -> Result<PadicMatrix> {
        self.b.mul(&self.us()?)
    }
}

fn entry_is_one(e: &PadicNumber) -> bool {
    e.known_val() == Some(0) && e.agrees(&PadicNumber::one(e.prime(), 1))
}

/// Normalization predicate for K^- representatives: integral entries, every
/// row attains max norm 1, and in each row the entry in the greatest column
/// among norm-1 entries equals 1.
pub fn is_normalized(u: &PadicMatrix) -> bool {
    if u.is_integral() != Some(true) {
        return false;
    }
    for r in 0..u.rows() {
        let mut last_unit_col = None;
        for c in 0..u.cols() {
            if u.at(r, c).known_val() == Some(0) {
                last_unit_col = Some(c);
            }
        }
        match last_unit_col {
            None => return false,
            Some(c) => {
                if !entry_is_one(u.at(r, c)) {
                    return false;
                }
            }
        }
    }
    true
}

/// Normalize a lower-triangular matrix: returns (N, D) with N = D * L,
/// D invertible diagonal, N normalized.
pub fn normalize_lower(l: &PadicMatrix) -> Result<(PadicMatrix, PadicMatrix)> {
    let
        n = l.rows();
    if n != l.cols() {
        return Err(Error::IndexMismatch(l.rows(), l.cols()));
    }
    let p = l.prime();
    for r in 0..n {
        for c in r + 1..n {
            if l.at(r, c).is_zero_decided() == Some(false) {
                return Err(Error::BadElement(format!(
                    "entry ({r},{c}) above the diagonal is nonzero"
                )));
            }
        }
    }
    let mut nmat = l.clone();
    let mut d = PadicMatrix::zero(p, n, n);
    for r in 0..n {
        let row: Vec<PadicNumber> = (0..=r).map(|c| l.at(r, c).clone()).collect();
        let piv_col = match pick_pivot(&row, true)? {
            Some(c) => c,
            None => {
                // No decided-nonzero entry: an exactly-zero row is a domain
                // error, a bound-only row is a precision failure.
                if row.iter().all(|e| e.is_exact_zero()) {
                    return Err(Error::SingularMatrix);
                }
                return Err(Error::PrecisionExhausted(format!(
                    "row {r} has no decidable maximal entry"
                )));
            }
        };
        let piv = l.at(r, piv_col).clone();
        let scale = piv.pow(-1)?;
        for c in 0..n {
            nmat.set(r, c, l.at(r, c).mul(&scale)?);
        }
        nmat.set(r, piv_col, PadicNumber::one(p, piv.relative_prec().unwrap_or(1)));
        d.set(r, r, scale);
    }
    Ok((nmat, d))
}

/// Decompose g = b * u * s. Deterministic: internal pivot ties break to the
/// largest column index, matching the greatest-column normalization.
pub fn decompose_bks(g: &PadicMatrix) -> Result<BksDecomposition> {
    let n = g.rows();
    if n != g.cols() {
        return Err(Error::IndexMismatch(g.rows(), g.cols()));
    }
    if n > MAX_DIM {
        return Err(Error::Unsupported(format!("dimension {n} exceeds {MAX_DIM}")));
    }
    let p = g.prime();
    let prec = crate::matrix::max_prec(g).unwrap_or(crate::padic::DEFAULT_PREC);
    let mut m = g.clone();
    let mut b = PadicMatrix::identity(p, n, prec);
    let mut pivots: Vec<Option<usize>> = vec![None; n];
    for i in (0..n).rev() {
        // Clear this row at the pivot columns of all processed rows,
        // deepest row first: row j is already zero at the pivot columns of
        // rows below it, so each subtraction cannot disturb a column
        // cleared earlier in this loop. The corresponding column operations
        // keep b upper-triangular because they only mix a column into an
        // earlier one.
        for j in (i + 1..n).rev() {
            let cj = pivots[j].expect("processed row has a pivot");
            let f = m.at(i, cj).clone();
            if f.is_zero_decided() == Some(true) {
                continue;
            }
            for c in 0..n {
                let t = m.at(i, c).sub(&f.mul(m.at(j, c))?)?;
                m.set(i, c, t);
            }
            // row_i -= f row_j means b gains col_j += f col_i
            for r in 0..n {
                let t = b.at(r, j).add(&f.mul(b.at(r, i))?)?;
                b.set(r, j, t);
            }
            // The cleared entry is exactly zero in the true factorization.
            m.set(i, cj, PadicNumber::zero(p));
        }
        let row = m.row(i);
        let piv_col = pick_pivot_strict(&row, true)?;
        let piv = m.at(i, piv_col).clone();
        if piv.relative_prec().unwrap_or(0) < GUARD_DIGITS {
            return Err(Error::PrecisionExhausted(format!(
                "pivot of row {i} retains fewer than {GUARD_DIGITS} digits"
            )));
        }
        let inv = piv.pow(-1)?;
        for c in 0..n {
            m.set(i, c, m.at(i, c).mul(&inv)?);
        }
        m.set(i, piv_col, PadicNumber::one(p, piv.relative_prec().unwrap_or(1)));
        for r in 0..n {
            let t = b.at(r, i).mul(&piv)?;
            b.set(r, i, t);
        }
        pivots[i] = Some(piv_col);
    }
    let perm: Vec<usize> = pivots.into_iter().map(|x| x.expect("every row pivoted")).collect();
    let u = PadicMatrix::from_fn(p, n, n, |r, j| m.at(r, perm[j]).clone());
    Ok(BksDecomposition { b, u, perm })
}

/// Decompose from exact rational entries, retrying once at doubled
/// precision if a pivot decision runs out of digits.
pub fn decompose_bks_rational(
    entries: &[Vec<(BigInt, BigInt)>],
    p: u64,
    prec: u32,
) -> Result<BksDecomposition> {
    let build = |prec: u32| -> Result<PadicMatrix> {
        let mut rows = Vec::new();
        for row in entries {
            let mut out = Vec::new();
            for (num, den) in row {
                out.push(PadicNumber::from_rational(num, den, p, prec)?);
            }
            rows.push(out);
        }
        PadicMatrix::from_rows(p, rows)
    };
    match decompose_bks(&build(prec)?) {
        Err(Error::PrecisionExhausted(_)) => decompose_bks(&build(prec * 2)?),
        other => other,
    }
}

/// The coordinate projections of the factorization G = B^+ x K^- S:
/// p1(g) = b and p2(g) = u s.
pub fn p1p2(g: &PadicMatrix) -> Result<(PadicMatrix, PadicMatrix)> {
    let d = decompose_bks(g)?;
    Ok((d.b.clone(), d.us()?))
}

/// Whether k is a canonical K^- S representative, i.e. its upper factor is
/// the identity.
pub fn is_canonical_ks(k: &PadicMatrix) -> Result<bool> {
    let (b, _) = p1p2(k)?;
    Ok(b.is_identity_at_prec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::bigint::BigInt;

    fn q(n: i64, d: i64, p: u64, prec: u32) -> PadicNumber {
        PadicNumber::from_rational(&BigInt::from(n), &BigInt::from(d), p, prec).unwrap()
    }

    fn mat(p: u64, prec: u32, rows: Vec<Vec<(i64, i64)>>) -> PadicMatrix {
        PadicMatrix::from_fn(p, rows.len(), rows[0].len(), |r, c| {
            q(rows[r][c].0, rows[r][c].1, p, prec)
        })
    }

    #[test]
    fn normalize_integral_unipotent_is_identity_transform() {
        let p = 3;
        let l = mat(p, 16, vec![vec![(1, 1), (0, 1)], vec![(2, 1), (1, 1)]]);
        let (n, d) = normalize_lower(&l).unwrap();
        assert!(n.agrees(&l));
        assert!(d.is_identity_at_prec());
        assert!(is_normalized(&n));
    }

    #[test]
    fn normalize_scales_row_to_rightmost_unit() {
        // [[1,0],[2,3]] over Q3: row two scales by 1/2, giving [1, 3/2].
        let p = 3;
        let l = mat(p, 16, vec![vec![(1, 1), (0, 1)], vec![(2, 1), (3, 1)]]);
        let (n, d) = normalize_lower(&l).unwrap();
        assert!(n.at(1, 0).agrees(&q(1, 1, p, 16)));
        assert!(n.at(1, 1).agrees(&q(3, 2, p, 16)));
        assert!(d.at(1, 1).agrees(&q(1, 2, p, 16)));
        assert!(is_normalized(&n));
    }

    #[test]
    fn normalize_large_entry() {
        // [[1,0],[x,1]] with |x| > 1 becomes [[1,0],[1,1/x]].
        let p = 5;
        let l = mat(p, 16, vec![vec![(1, 1), (0, 1)], vec![(1, 25), (1, 1)]]);
        let (n, d) = normalize_lower(&l).unwrap();
        assert!(n.at(1, 0).agrees(&q(1, 1, p, 16)));
        assert!(n.at(1, 1).agrees(&q(25, 1, p, 16)));
        assert!(d.at(1, 1).agrees(&q(25, 1, p, 16)));
        assert!(is_normalized(&n));
    }

    #[test]
    fn normalization_idempotent() {
        let p = 3;
        let l = mat(p, 16, vec![vec![(1, 1), (0, 1)], vec![(2, 1), (3, 1)]]);
        let (n, _) = normalize_lower(&l).unwrap();
        let (n2, d2) = normalize_lower(&n).unwrap();
        assert!(n2.agrees(&n));
        assert!(d2.is_identity_at_prec());
    }

    #[test]
    fn permutation_matrix_decomposes_trivially() {
        let p = 5;
        let s = PadicMatrix::permutation(p, &[1, 0], 16);
        let d = decompose_bks(&s).unwrap();
        assert!(d.b.is_identity_at_prec());
        assert!(d.u.is_identity_at_prec());
        assert_eq!(d.perm, vec![1, 0]);
        assert!(d.reconstruct().unwrap().agrees(&s));
    }

    #[test]
    fn upper_triangular_decomposes_trivially() {
        let p = 5;
        let g = mat(p, 16, vec![vec![(5, 1), (7, 1)], vec![(0, 1), (1, 5)]]);
        let d = decompose_bks(&g).unwrap();
        assert!(d.b.agrees(&g));
        assert!(d.u.is_identity_at_prec());
        assert_eq!(d.perm, vec![0, 1]);
    }

    #[test]
    fn generic_two_by_two() {
        let p = 5;
        let g = mat(p, 16, vec![vec![(1, 1), (2, 1)], vec![(3, 1), (4, 1)]]);
        let d = decompose_bks(&g).unwrap();
        assert!(d.reconstruct().unwrap().agrees(&g));
        assert!(is_normalized(&d.u));
        // determinant bookkeeping: diagonal valuations of b sum to v(det g)
        let det_val = g.det_valuation().unwrap();
        let b_val: i64 = (0..2).map(|i| d.b.at(i, i).known_val().unwrap()).sum();
        assert_eq!(det_val, b_val);
    }

    #[test]
    fn deep_cell_goes_to_swap_component() {
        // [[1,0],[1,g]] with |g| < 1 lands in the swapped component with a
        // sub-unit unipotent coordinate.
        let p = 3;
        let g = mat(p, 16, vec![vec![(1, 1), (0, 1)], vec![(1, 1), (3, 1)]]);
        let d = decompose_bks(&g).unwrap();
        assert_eq!(d.perm, vec![1, 0]);
        assert!(d.u.at(1, 0).agrees(&q(3, 1, p, 16)));
        assert!(d.reconstruct().unwrap().agrees(&g));
    }

    #[test]
    fn p1p2_examples() {
        let p = 5;
        // an element already of the canonical K^- S form maps to (I, itself)
        let k = mat(p, 16, vec![vec![(1, 1), (0, 1)], vec![(2, 1), (1, 1)]]);
        let (b, kk) = p1p2(&k).unwrap();
        assert!(b.is_identity_at_prec());
        assert!(kk.agrees(&k));
        assert!(is_canonical_ks(&k).unwrap());
        // b * k recovers the factors
        let bmat = mat(p, 16, vec![vec![(5, 1), (1, 1)], vec![(0, 1), (1, 1)]]);
        let g = bmat.mul(&k).unwrap();
        let (b2, k2) = p1p2(&g).unwrap();
        assert!(b2.agrees(&bmat));
        assert!(k2.agrees(&k));
        // idempotence through reconstruction
        let (b3, k3) = p1p2(&b2.mul(&k2).unwrap()).unwrap();
        assert!(b3.agrees(&b2));
        assert!(k3.agrees(&k2));
    }

    #[test]
    fn permutation_factor_composes_like_the_group() {
        // the s factor of a product of permutation matrices is the
        // composed permutation
        let p = 3;
        let s1 = PadicMatrix::permutation(p, &[1, 2, 0], 12);
        let s2 = PadicMatrix::permutation(p, &[2, 0, 1], 12);
        let d1 = decompose_bks(&s1).unwrap();
        let d12 = decompose_bks(&s1.mul(&s2).unwrap()).unwrap();
        let ds1s1 = decompose_bks(&s1.mul(&s1).unwrap()).unwrap();
        assert!(d12.b.is_identity_at_prec());
        assert!(d12.u.is_identity_at_prec());
        assert!(d12
            .s_matrix(12)
            .agrees(&d1.s_matrix(12).mul(&decompose_bks(&s2).unwrap().s_matrix(12)).unwrap()));
        assert!(ds1s1.s_matrix(12).agrees(&s1.mul(&s1).unwrap()));
    }

    #[test]
    fn rejects_oversized_and_singular() {
        let p = 3;
        let g = PadicMatrix::identity(p, 5, 8);
        assert!(matches!(decompose_bks(&g), Err(Error::Unsupported(_))));
        let z = PadicMatrix::zero(p, 2, 2);
        assert!(matches!(decompose_bks(&z), Err(Error::SingularMatrix)));
    }

    #[test]
    fn rational_wrapper_retries() {
        let entries = vec![
            vec![(BigInt::from(1), BigInt::from(1)), (BigInt::from(2), BigInt::from(1))],
            vec![(BigInt::from(3), BigInt::from(1)), (BigInt::from(4), BigInt::from(1))],
        ];
        let d = decompose_bks_rational(&entries, 5, 12).unwrap();
        assert!(is_normalized(&d.u));
    }

    #[test]
    fn rational_wrapper_needs_the_retry_for_deep_cancellation() {
        // [[1, 1], [1, 1 + p^11]] at 12 digits: eliminating the top row
        // leaves a pivot with a single tracked digit, below the guard, so
        // the first attempt fails and the doubled-precision retry succeeds.
        let p = 5i64;
        let deep = BigInt::from(1) + BigInt::from(p).pow(11);
        let entries = vec![
            vec![(BigInt::from(1), BigInt::from(1)), (BigInt::from(1), BigInt::from(1))],
            vec![(BigInt::from(1), BigInt::from(1)), (deep.clone(), BigInt::from(1))],
        ];
        let g12 = PadicMatrix::from_rows(
            5,
            entries
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|(n, d)| PadicNumber::from_rational(n, d, 5, 12).unwrap())
                        .collect()
                })
                .collect(),
        )
        .unwrap();
        assert!(matches!(decompose_bks(&g12), Err(Error::PrecisionExhausted(_))));
        let d = decompose_bks_rational(&entries, 5, 12).unwrap();
        assert!(d.reconstruct().unwrap().agrees(&g12));
        assert_eq!(d.b.at(0, 0).known_val(), Some(11));
    }
}
