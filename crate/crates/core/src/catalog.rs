//! Built-in finite groups, characters, and small representations used by
//! the verification suites and the CLI selftest.

use std::sync::Arc;

use num::Integer;

use crate::error::{Error, Result};
use crate::matrix::PadicMatrix;
use crate::padic::{root_of_unity, PadicNumber};
use crate::rep::{LatticeRep, Subgroup};
use crate::tower::QuotientTower;

pub fn cyclic(n: usize) -> Arc<QuotientTower> {
    let table = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
    QuotientTower::finite(table).expect("cyclic table is a group")
}

/// Z/2 x Z/2 with elements encoded as two bits.
pub fn klein_four() -> Arc<QuotientTower> {
    let table = (0..4).map(|a| (0..4).map(|b| a ^ b).collect()).collect();
    QuotientTower::finite(table).expect("klein table is a group")
}

/// Permutations of three points in lexicographic one-line order; the product
/// s * t acts by x -> s(t(x)).
pub fn symmetric_3() -> Arc<QuotientTower> {
    let perms = s3_perms();
    let n = perms.len();
    let mut table = vec![vec![0usize; n]; n];
    for (i, s) in perms.iter().enumerate() {
        for (j, t) in perms.iter().enumerate() {
            let prod: Vec<usize> = (0..3).map(|x| s[t[x]]).collect();
            table[i][j] = perms.iter().position(|p| *p == prod).expect("closure");
        }
    }
    QuotientTower::finite(table).expect("S3 table is a group")
}

fn s3_perms() -> Vec<Vec<usize>> {
    vec![
        vec![0, 1, 2],
        vec![0, 2, 1],
        vec![1, 0, 2],
        vec![1, 2, 0],
        vec![2, 0, 1],
        vec![2, 1, 0],
    ]
}

/// Dihedral group of order 8 with elements r^a s^b indexed by a + 4 b.
pub fn dihedral_4() -> Arc<QuotientTower> {
    let idx = |a: usize, b: usize| a + 4 * b;
    let mut table = vec![vec![0usize; 8]; 8];
    for a1 in 0..4 {
        for b1 in 0..2 {
            for a2 in 0..4 {
                for b2 in 0..2 {
                    // r^a1 s^b1 r^a2 s^b2 = r^{a1 + (-1)^{b1} a2} s^{b1+b2}
                    let a = if b1 == 0 { (a1 + a2) % 4 } else { (a1 + 4 - a2 % 4) % 4 };
                    table[idx(a1, b1)][idx(a2, b2)] = idx(a, (b1 + b2) % 2);
                }
            }
        }
    }
    QuotientTower::finite(table).expect("D4 table is a group")
}

pub fn trivial_rep(tower: Arc<QuotientTower>, level: u32, p: u64, prec: u32) -> Result<LatticeRep> {
    let n = tower.element_count(level)?;
    let id = PadicMatrix::identity(p, 1, prec);
    LatticeRep::new(tower, level, vec![id.clone(); n], id)
}

pub fn sign_rep_z2(p: u64, prec: u32) -> Result<LatticeRep> {
    let t = cyclic(2);
    let id = PadicMatrix::identity(p, 1, prec);
    let minus = id.neg();
    LatticeRep::new(t, 0, vec![id.clone(), minus], id)
}

/// Left regular representation of one level of a group tower.
pub fn regular_rep(tower: Arc<QuotientTower>, level: u32, p: u64, prec: u32) -> Result<LatticeRep> {
    let elems = tower.elements(level)?;
    let n = elems.len();
    let mut action = Vec::with_capacity(n);
    for &g in &elems {
        let mut perm = vec![0usize; n];
        for &h in &elems {
            perm[tower.mul(level, g, h)?] = h;
        }
        // column h maps to row g*h
        action.push(PadicMatrix::from_fn(p, n, n, |r, c| {
            if perm[r] == c {
                PadicNumber::one(p, prec)
            } else {
                PadicNumber::zero(p)
            }
        }));
    }
    LatticeRep::new(tower, level, action, PadicMatrix::identity(p, n, prec))
}

/// Two-dimensional standard representation of S3 on the sum-zero subspace of
/// the permutation module, in the basis e0 - e1, e1 - e2; all matrices are
/// integral with unit determinant.
pub fn standard_rep_s3(p: u64, prec: u32) -> Result<LatticeRep> {
    let t = symmetric_3();
    let perms = s3_perms();
    let one = PadicNumber::one(p, prec);
    let mut action = Vec::with_capacity(6);
    for s in &perms {
        // s(e0 - e1) and s(e1 - e2) expressed back in the basis; e_a - e_b
        // decomposes as the signed interval sum of basis differences.
        let expand = |a: usize, b: usize| -> [i64; 2] {
            let mut coeffs = [0i64; 2];
            let (lo, hi, sgn) = if a <= b { (a, b, 1) } else { (b, a, -1) };
            for k in lo..hi {
                coeffs[k] += sgn;
            }
            coeffs
        };
        let c1 = expand(s[0], s[1]);
        let c2 = expand(s[1], s[2]);
        action.push(PadicMatrix::from_fn(p, 2, 2, |r, c| {
            let v = if c == 0 { c1[r] } else { c2[r] };
            match v {
                0 => PadicNumber::zero(p),
                1 => one.clone(),
                -1 => one.neg(),
                _ => unreachable!("coefficients of adjacent differences"),
            }
        }));
    }
    LatticeRep::new(t, 0, action, PadicMatrix::identity(p, 2, prec))
}

/// The standard S3 representation conjugated by diag(1, p): integrality of
/// the off-diagonal entries breaks, but the representation stays
/// unitarisable with stable lattice diag(1, p).
pub fn skew_standard_rep_s3(p: u64, prec: u32) -> Result<LatticeRep> {
    let base = standard_rep_s3(p, prec)?;
    let c = PadicMatrix::from_fn(p, 2, 2, |r, col| {
        if r != col {
            PadicNumber::zero(p)
        } else if r == 0 {
            PadicNumber::one(p, prec)
        } else {
            PadicNumber::one(p, prec).shift(1)
        }
    });
    let c_inv = c.inverse()?;
    let mut action = Vec::with_capacity(6);
    for g in 0..6 {
        action.push(c.mul(base.act(g))?.mul(&c_inv)?);
    }
    LatticeRep::new(base.tower().clone(), 0, action, PadicMatrix::identity(p, 2, prec))
}

/// Two-dimensional rotation-reflection representation of D4; integral over
/// every Q_p.
pub fn standard_rep_d4(p: u64, prec: u32) -> Result<LatticeRep> {
    let t = dihedral_4();
    let one = PadicNumber::one(p, prec);
    let zero = PadicNumber::zero(p);
    let rot = PadicMatrix::from_rows(
        p,
        vec![vec![zero.clone(), one.neg()], vec![one.clone(), zero.clone()]],
    )?;
    let refl = PadicMatrix::from_rows(
        p,
        vec![vec![one.clone(), zero.clone()], vec![zero.clone(), one.neg()]],
    )?;
    // index convention a + 4b matches the table construction
    let mut action = Vec::with_capacity(8);
    for b in 0..2 {
        for a in 0..4 {
            let mut m = PadicMatrix::identity(p, 2, prec);
            for _ in 0..a {
                m = m.mul(&rot)?;
            }
            if b == 1 {
                m = m.mul(&refl)?;
            }
            action.push(m);
        }
    }
    LatticeRep::new(t, 0, action, PadicMatrix::identity(p, 2, prec))
}

/// The alternating subgroup of the built-in S3 tower.
pub fn subgroup_a3(s3: &Arc<QuotientTower>) -> Result<Subgroup> {
    // identity and the two 3-cycles in the fixed enumeration
    Subgroup::new(s3.clone(), 0, vec![0, 3, 4])
}

/// Z/2 acting by [[-1, 1/p], [0, 1]]: bounded but not integral on the
/// standard lattice; its stable lattice is Z_p + p Z_p.
pub fn shear_rep_z2(p: u64, prec: u32) -> Result<LatticeRep> {
    let t = cyclic(2);
    let id = PadicMatrix::identity(p, 2, prec);
    let one = PadicNumber::one(p, prec);
    let a = PadicMatrix::from_rows(
        p,
        vec![
            vec![one.neg(), one.clone().shift(-1)],
            vec![PadicNumber::zero(p), one.clone()],
        ],
    )?;
    LatticeRep::new(t, 0, vec![id.clone(), a], id)
}

fn element_order(tower: &Arc<QuotientTower>, level: u32, g: usize) -> Result<usize> {
    let e = tower.identity(level)?;
    let mut acc = g;
    let mut k = 1usize;
    while acc != e {
        acc = tower.mul(level, acc, g)?;
        k += 1;
    }
    Ok(k)
}

fn exponent(tower: &Arc<QuotientTower>, level: u32) -> Result<usize> {
    let mut m = 1usize;
    for g in tower.elements(level)? {
        m = m.lcm(&element_order(tower, level, g)?);
    }
    Ok(m)
}

/// All one-dimensional characters of a finite level with values in the
/// roots of unity available in Q_p, enumerated as exponent homomorphisms
/// into Z/m for m = gcd(exponent(G), p-1).
pub fn characters(tower: &Arc<QuotientTower>, level: u32, p: u64, prec: u32) -> Result<Vec<LatticeRep>> {
    let n = tower.element_count(level)?;
    let m = exponent(tower, level)?.gcd(&((p - 1) as usize));
    let zeta = root_of_unity(p, m as u32, prec)?;
    let mut zeta_pows = Vec::with_capacity(m);
    let mut acc = PadicNumber::one(p, prec);
    for _ in 0..m {
        zeta_pows.push(acc.clone());
        acc = acc.mul(&zeta)?;
    }
    let mut out = Vec::new();
    let total = (m as u64).checked_pow(n as u32);
    if total.is_none() || total.unwrap() > 2_000_000 {
        return Err(Error::LevelTooLarge(format!("character search over {m}^{n} assignments")));
    }
    let mut assign = vec![0usize; n];
    loop {
        let is_hom = (0..n).all(|a| {
            (0..n).all(|b| {
                let ab = tower.mul(level, a, b).expect("group level");
                (assign[a] + assign[b]) % m == assign[ab]
            })
        });
        if is_hom {
            let action: Vec<PadicMatrix> = assign
                .iter()
                .map(|&e| PadicMatrix::from_rows(p, vec![vec![zeta_pows[e].clone()]]).expect("1x1"))
                .collect();
            out.push(LatticeRep::new(
                tower.clone(),
                level,
                action,
                PadicMatrix::identity(p, 1, prec),
            )?);
        }
        // next assignment in base m
        let mut i = 0;
        loop {
            if i == n {
                return Ok(out);
            }
            assign[i] += 1;
            if assign[i] < m {
                break;
            }
            assign[i] = 0;
            i += 1;
        }
    }
}

/// Block-diagonal direct sum.
pub fn direct_sum(a: &LatticeRep, b: &LatticeRep) -> Result<LatticeRep> {
    if **a.tower() != **b.tower() || a.level() != b.level() {
        return Err(Error::TowerMismatch);
    }
    let p = a.prime();
    let (da, db) = (a.dim(), b.dim());
    let n = a.tower().element_count(a.level())?;
    let embed = |top: &PadicMatrix, bottom: &PadicMatrix| {
        PadicMatrix::from_fn(p, da + db, da + db, |r, c| {
            if r < da && c < da {
                top.at(r, c).clone()
            } else if r >= da && c >= da {
                bottom.at(r - da, c - da).clone()
            } else {
                PadicNumber::zero(p)
            }
        })
    };
    let action: Vec<PadicMatrix> = (0..n).map(|g| embed(a.act(g), b.act(g))).collect();
    let lattice = embed(a.lattice(), b.lattice());
    LatticeRep::new(a.tower().clone(), a.level(), action, lattice)
}

/// Every subgroup of a small finite level, by closed-subset enumeration.
pub fn all_subgroups(tower: &Arc<QuotientTower>, level: u32) -> Result<Vec<Subgroup>> {
    let n = tower.element_count(level)?;
    if n > 16 {
        return Err(Error::LevelTooLarge(format!("subgroup enumeration over {n} elements")));
    }
    let e = tower.identity(level)?;
    let mut out = Vec::new();
    for mask in 0u32..(1 << n) {
        if mask & (1 << e) == 0 {
            continue;
        }
        let subset: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
        let closed = subset.iter().all(|&a| {
            subset
                .iter()
                .all(|&b| subset.contains(&tower.mul(level, a, b).expect("group level")))
        });
        if closed {
            out.push(Subgroup::new(tower.clone(), level, subset)?);
        }
    }
    Ok(out)
}

/// Unitary representations of dimension <= 2 used by the verification grid:
/// all characters plus pairwise direct sums of distinct characters.
pub fn small_rep_catalog(tower: &Arc<QuotientTower>, level: u32, p: u64, prec: u32) -> Result<Vec<LatticeRep>> {
    let chars = characters(tower, level, p, prec)?;
    let mut out = chars.clone();
    for i in 0..chars.len() {
        for j in i..chars.len() {
            out.push(direct_sum(&chars[i], &chars[j])?);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn group_orders() {
        assert_eq!(cyclic(4).element_count(0).unwrap(), 4);
        assert_eq!(klein_four().element_count(0).unwrap(), 4);
        assert_eq!(symmetric_3().element_count(0).unwrap(), 6);
        assert_eq!(dihedral_4().element_count(0).unwrap(), 8);
    }

    #[test]
    fn s3_has_six_subgroups() {
        let s3 = symmetric_3();
        let subs = all_subgroups(&s3, 0).unwrap();
        assert_eq!(subs.len(), 6);
        let orders: Vec<usize> = subs.iter().map(|s| s.order()).collect();
        assert_eq!(orders.iter().filter(|&&o| o == 2).count(), 3);
        assert!(orders.contains(&3));
        assert!(orders.contains(&6));
    }

    #[test]
    fn d4_has_ten_subgroups() {
        let d4 = dihedral_4();
        assert_eq!(all_subgroups(&d4, 0).unwrap().len(), 10);
    }

    #[test]
    fn character_counts() {
        // Z/4 over Q5: four characters through i in Z_5.
        let c4 = cyclic(4);
        assert_eq!(characters(&c4, 0, 5, 16).unwrap().len(), 4);
        // S3 over Q7: only the trivial and sign characters.
        let s3 = symmetric_3();
        assert_eq!(characters(&s3, 0, 7, 16).unwrap().len(), 2);
        // Klein four over Q3: all four sign patterns.
        let v4 = klein_four();
        assert_eq!(characters(&v4, 0, 3, 16).unwrap().len(), 4);
        // Z/3 over Q7: three characters through the cube root of unity.
        let c3 = cyclic(3);
        assert_eq!(characters(&c3, 0, 7, 16).unwrap().len(), 3);
    }

    #[test]
    fn characters_are_homomorphisms() {
        let d4 = dihedral_4();
        let chars = characters(&d4, 0, 5, 16).unwrap();
        assert_eq!(chars.len(), 4);
        for ch in &chars {
            assert!(ch.is_unitary());
        }
    }

    #[test]
    fn d4_standard_rep_validates() {
        let rep = standard_rep_d4(3, 16).unwrap();
        assert!(rep.is_unitary());
        assert_eq!(rep.dim(), 2);
    }

    #[test]
    fn skew_rep_is_not_integral() {
        let rep = skew_standard_rep_s3(5, 16).unwrap();
        assert!(!rep.is_unitary());
    }
}
