//! Locally constant k-valued functions at a level, the integration pairing
//! against measures, contractive maps and their transposes, and the
//! double-dual identity check for the finite-level duality between
//! C_0(I, k) and (Z_p)^I.

use std::collections::BTreeMap;
use std::sync::Arc;

use num::rational::BigRational;
use num::Zero;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::matrix::{pick_pivot, PadicMatrix};
use crate::measure::Measure;
use crate::padic::{is_prime, norm_rational, NormInfo, PadicNumber};
use crate::tower::QuotientTower;

#[derive(Clone, Debug)]
pub struct LCFunction {
    tower: Arc<QuotientTower>,
    level: u32,
    p: u64,
    values: BTreeMap<usize, PadicNumber>,
}

impl LCFunction {
    pub fn zero(tower: Arc<QuotientTower>, level: u32, p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidPrime(p));
        }
        tower.element_count(level)?;
        Ok(LCFunction { tower, level, p, values: BTreeMap::new() })
    }

    pub fn from_values(
        tower: Arc<QuotientTower>,
        level: u32,
        p: u64,
        values: BTreeMap<usize, PadicNumber>,
    ) -> Result<Self> {
        let mut f = Self::zero(tower, level, p)?;
        let count = f.tower.element_count(level)?;
        for (g, v) in values {
            if g >= count {
                return Err(Error::BadElement(format!("index {g} out of range")));
            }
            if v.prime() != p {
                return Err(Error::PrimeMismatch(v.prime(), p));
            }
            if v.is_zero_decided() != Some(true) {
                f.values.insert(g, v);
            }
        }
        Ok(f)
    }

    /// Characteristic function of one level class.
    pub fn indicator(tower: Arc<QuotientTower>, level: u32, g: usize, p: u64, prec: u32) -> Result<Self> {
        let mut values = BTreeMap::new();
        values.insert(g, PadicNumber::one(p, prec));
        Self::from_values(tower, level, p, values)
    }

    pub fn constant(tower: Arc<QuotientTower>, level: u32, c: PadicNumber) -> Result<Self> {
        let p = c.prime();
        let mut values = BTreeMap::new();
        for g in tower.elements(level)? {
            values.insert(g, c.clone());
        }
        Self::from_values(tower, level, p, values)
    }

    pub fn tower(&self) -> &Arc<QuotientTower> {
        &self.tower
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn value(&self, g: usize) -> PadicNumber {
        self.values.get(&g).cloned().unwrap_or_else(|| PadicNumber::zero(self.p))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if *self.tower != *other.tower {
            return Err(Error::TowerMismatch);
        }
        if self.level != other.level {
            return Err(Error::LevelMismatch(self.level, other.level));
        }
        let mut values = self.values.clone();
        for (&g, v) in &other.values {
            let cur = values.remove(&g).unwrap_or_else(|| PadicNumber::zero(self.p));
            let s = cur.add(v)?;
            if s.is_zero_decided() != Some(true) {
                values.insert(g, s);
            }
        }
        Ok(LCFunction { tower: self.tower.clone(), level: self.level, p: self.p, values })
    }

    pub fn scale(&self, a: &PadicNumber) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (&g, v) in &self.values {
            let s = v.mul(a)?;
            if s.is_zero_decided() != Some(true) {
                values.insert(g, s);
            }
        }
        Ok(LCFunction { tower: self.tower.clone(), level: self.level, p: self.p, values })
    }

    /// Sup norm; exact rational in p^Z union {0}. Errors only when a
    /// bound-only value could dominate every decided one.
    pub fn sup_norm(&self) -> Result<BigRational> {
        let mut best: Option<i64> = None;
        let mut bound: Option<i64> = None;
        for v in self.values.values() {
            match v.norm_info() {
                NormInfo::Zero => {}
                NormInfo::Exact(val) => best = Some(best.map_or(val, |b| b.min(val))),
                NormInfo::AtMost(m) => bound = Some(bound.map_or(m, |b| b.min(m))),
            }
        }
        match (best, bound) {
            (None, None) => Ok(BigRational::zero()),
            (Some(v), None) => Ok(norm_rational(self.p, v)),
            (Some(v), Some(m)) if m > v => Ok(norm_rational(self.p, v)),
            _ => Err(Error::PrecisionExhausted("sup norm undecidable".into())),
        }
    }

    pub fn to_json(&self) -> Value {
        let mut values = Map::new();
        for (&g, v) in &self.values {
            let key = self.tower.elem_key(self.level, g).expect("stored index is valid");
            values.insert(key, v.to_json());
        }
        json!({
            "tower": self.tower.descriptor(),
            "level": self.level,
            "p": self.p,
            "values": Value::Object(values),
        })
    }

    pub fn from_json(v: &Value, default_prec: u32) -> Result<Self> {
        let tower = QuotientTower::from_json(
            v.get("tower").ok_or_else(|| Error::ParseError("function needs a tower".into()))?,
        )?;
        let level = v
            .get("level")
            .and_then(|x| x.as_u64())
            .ok_or_else(|| Error::ParseError("function needs a level".into()))? as u32;
        let p = match v.get("p").and_then(|x| x.as_u64()) {
            Some(p) => p,
            None => tower
                .tower_prime()
                .ok_or_else(|| Error::ParseError("function over a finite tower needs an explicit p".into()))?,
        };
        let prec = v.get("prec").and_then(|x| x.as_u64()).map(|x| x as u32).unwrap_or(default_prec);
        let mut values = BTreeMap::new();
        if let Some(map) = v.get("values").and_then(|x| x.as_object()) {
            for (k, val) in map {
                let g = tower.parse_key(level, k)?;
                values.insert(g, PadicNumber::from_json(val, p, prec)?);
            }
        }
        Self::from_values(tower, level, p, values)
    }
}

/// Integration pairing: sum over level classes of f * mu. The function may
/// live at a coarser level; its values are pulled back along the projection.
pub fn integrate(f: &LCFunction, mu: &Measure) -> Result<PadicNumber> {
    if *f.tower() != *mu.tower() {
        return Err(Error::TowerMismatch);
    }
    if f.prime() != mu.prime() {
        return Err(Error::PrimeMismatch(f.prime(), mu.prime()));
    }
    if f.level() > mu.level() {
        return Err(Error::LevelMismatch(f.level(), mu.level()));
    }
    let mut acc = PadicNumber::zero(f.prime());
    for g in mu.support() {
        let down = mu.tower().project(mu.level(), f.level(), g)?;
        let term = f.value(down).mul(&mu.coeff_padic(g))?;
        acc = acc.add(&term)?;
    }
    Ok(acc)
}

/// The canonical pairing of an integral vector against a function vector on
/// the same finite index set: sum of a_i * f_i.
pub fn canonical_pair(a: &[PadicNumber], f: &[PadicNumber]) -> Result<PadicNumber> {
    if a.len() != f.len() {
        return Err(Error::IndexMismatch(a.len(), f.len()));
    }
    if a.is_empty() {
        return Err(Error::IndexMismatch(0, 0));
    }
    let p = a[0].prime();
    for x in a {
        if x.is_integral() == Some(false) {
            return Err(Error::NotIntegral);
        }
    }
    let mut acc = PadicNumber::zero(p);
    for (x, y) in a.iter().zip(f) {
        acc = acc.add(&x.mul(y)?)?;
    }
    Ok(acc)
}

/// A norm-nonincreasing linear map in the lattice model: an integral matrix.
#[derive(Clone, Debug)]
pub struct ContractiveMap {
    matrix: PadicMatrix,
}

impl ContractiveMap {
    pub fn new(matrix: PadicMatrix) -> Result<Self> {
        if matrix.is_integral() != Some(true) {
            return Err(Error::NotIntegral);
        }
        Ok(ContractiveMap { matrix })
    }

    pub fn matrix(&self) -> &PadicMatrix {
        &self.matrix
    }

    pub fn transpose(&self) -> Self {
        ContractiveMap { matrix: self.matrix.transpose() }
    }

    pub fn compose(&self, other: &Self) -> Result<Self> {
        Ok(ContractiveMap { matrix: self.matrix.mul(&other.matrix)? })
    }

    pub fn apply(&self, v: &[PadicNumber]) -> Result<Vec<PadicNumber>> {
        self.matrix.mul_vec(v)
    }
}

#[derive(Clone, Debug)]
pub struct DoubleDualReport {
    pub ok: bool,
    pub gram: PadicMatrix,
    pub composite: Option<PadicMatrix>,
}

/// Compose the two duality identifications through the canonical pairing.
///
/// `fun_basis` columns span C_0(I, k) and `lat_basis` columns span the
/// lattice (Z_p)^I. The Gram matrix of the pairing must be unimodular over
/// Z_p, and representing the evaluation functionals back through the pairing
/// must reproduce the identity matrix.
pub fn double_dual_check(
    fun_basis: &PadicMatrix,
    lat_basis: &PadicMatrix,
    cap: usize,
) -> Result<DoubleDualReport> {
    let n = fun_basis.rows();
    if n != fun_basis.cols() || n != lat_basis.rows() || n != lat_basis.cols() {
        return Err(Error::IndexMismatch(fun_basis.cols(), lat_basis.rows()));
    }
    if n > cap {
        return Err(Error::LevelTooLarge(format!("index set of size {n} exceeds cap {cap}")));
    }
    let p = fun_basis.prime();
    let mut gram = PadicMatrix::zero(p, n, n);
    for i in 0..n {
        let fi = fun_basis.col(i);
        for j in 0..n {
            let cj = lat_basis.col(j);
            gram.set(i, j, canonical_pair(&cj, &fi)?);
        }
    }
    let unimodular = match (gram.is_integral(), gram.inverse().ok().map(|gi| (gi.clone(), gi.is_integral()))) {
        (Some(true), Some((gi, Some(true)))) => Some(gi),
        _ => None,
    };
    let gi = match unimodular {
        None => return Ok(DoubleDualReport { ok: false, gram, composite: None }),
        Some(gi) => gi,
    };
    // Each evaluation functional at a function basis vector, written in the
    // lattice dual basis, is the corresponding row of the Gram matrix;
    // solving the pairing sends it back to coordinates in the function
    // basis. Collectively that is (G^T)^{-1} G^T.
    let composite = gi.transpose().mul(&gram.transpose())?;
    let ok = composite.is_identity_at_prec();
    Ok(DoubleDualReport { ok, gram, composite: Some(composite) })
}

/// Perfectness of the level pairing: the matrix of the pairing between the
/// coset indicators and the coset Dirac measures is the identity.
pub fn level_pairing_matrix(
    tower: &Arc<QuotientTower>,
    level: u32,
    p: u64,
    prec: u32,
) -> Result<PadicMatrix> {
    let elems = tower.elements(level)?;
    let n = elems.len();
    let mut m = PadicMatrix::zero(p, n, n);
    for (i, &g) in elems.iter().enumerate() {
        let f = LCFunction::indicator(tower.clone(), level, g, p, prec)?;
        for (j, &h) in elems.iter().enumerate() {
            let mu = Measure::dirac(tower.clone(), level, h, p, prec)?;
            m.set(i, j, integrate(&f, &mu)?);
        }
    }
    Ok(m)
}

/// Residual-based pivot check helper used by tests: whether a vector has any
/// decided-nonzero entry.
pub fn vector_is_zero_at_prec(v: &[PadicNumber]) -> Result<bool> {
    Ok(pick_pivot(v, false)?.is_none())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::bigint::BigInt;
    use num::One;

    fn q(n: i64, d: i64, p: u64) -> PadicNumber {
        PadicNumber::from_rational(&BigInt::from(n), &BigInt::from(d), p, 16).unwrap()
    }

    #[test]
    fn sup_norm_examples() {
        let t = QuotientTower::zp_additive(3).unwrap();
        let one = LCFunction::constant(t.clone(), 1, q(1, 1, 3)).unwrap();
        assert_eq!(one.sup_norm().unwrap(), BigRational::one());
        let mut vals = BTreeMap::new();
        vals.insert(0usize, q(1, 1, 3));
        vals.insert(1usize, q(3, 1, 3));
        let f = LCFunction::from_values(t.clone(), 1, 3, vals).unwrap();
        assert_eq!(f.sup_norm().unwrap(), BigRational::one());
        let g = f.scale(&q(3, 1, 3)).unwrap();
        assert_eq!(g.sup_norm().unwrap(), f.sup_norm().unwrap() / BigRational::from_integer(3.into()));
        let z = LCFunction::zero(t, 1, 3).unwrap();
        assert_eq!(z.sup_norm().unwrap(), BigRational::zero());
    }

    #[test]
    fn integration_against_dirac_is_evaluation() {
        let t = QuotientTower::zp_additive(5).unwrap();
        let mut vals = BTreeMap::new();
        for g in 0..5usize {
            vals.insert(g, q(g as i64 + 1, 3, 5));
        }
        let f = LCFunction::from_values(t.clone(), 1, 5, vals).unwrap();
        for g in 0..5usize {
            let mu = Measure::dirac(t.clone(), 1, g, 5, 16).unwrap();
            assert!(integrate(&f, &mu).unwrap().agrees(&f.value(g)));
        }
    }

    #[test]
    fn indicator_pairing_detects_membership() {
        // Pairing a coarse coset indicator with a fine Dirac sees exactly
        // whether the point lies in the coset.
        let t = QuotientTower::zp_additive(3).unwrap();
        let chi = LCFunction::indicator(t.clone(), 1, 1, 3, 16).unwrap();
        let inside = Measure::dirac(t.clone(), 2, 4, 3, 16).unwrap();
        let outside = Measure::dirac(t.clone(), 2, 5, 3, 16).unwrap();
        assert!(integrate(&chi, &inside).unwrap().agrees(&q(1, 1, 3)));
        assert_eq!(integrate(&chi, &outside).unwrap().is_zero_decided(), Some(true));
    }

    #[test]
    fn integration_linear_and_contractive() {
        let t = QuotientTower::zp_additive(2).unwrap();
        let mut vals = BTreeMap::new();
        vals.insert(0usize, q(1, 2, 2));
        vals.insert(1usize, q(3, 1, 2));
        vals.insert(2usize, q(7, 4, 2));
        vals.insert(3usize, q(0, 1, 2));
        let f1 = LCFunction::from_values(t.clone(), 2, 2, vals.clone()).unwrap();
        let f2 = LCFunction::indicator(t.clone(), 2, 2, 2, 16).unwrap();
        let mu = Measure::dirac(t.clone(), 2, 2, 2, 16)
            .unwrap()
            .add(&Measure::dirac(t.clone(), 2, 3, 2, 16).unwrap())
            .unwrap();
        let lhs = integrate(&f1.add(&f2).unwrap(), &mu).unwrap();
        let rhs = integrate(&f1, &mu).unwrap().add(&integrate(&f2, &mu).unwrap()).unwrap();
        assert!(lhs.agrees(&rhs));
        let bound = f1.sup_norm().unwrap();
        assert!(integrate(&f1, &mu).unwrap().abs_bound() <= bound);
    }

    #[test]
    fn integration_attains_sup_norm_at_argmax_dirac() {
        let t = QuotientTower::zp_additive(3).unwrap();
        let mut vals = BTreeMap::new();
        vals.insert(0usize, q(9, 1, 3));
        vals.insert(1usize, q(1, 3, 3));
        vals.insert(2usize, q(2, 1, 3));
        let f = LCFunction::from_values(t.clone(), 1, 3, vals).unwrap();
        let sup = f.sup_norm().unwrap();
        let argmax = Measure::dirac(t, 1, 1, 3, 16).unwrap();
        assert_eq!(integrate(&f, &argmax).unwrap().abs().unwrap(), sup);
    }

    #[test]
    fn canonical_pair_examples() {
        let p = 5;
        let a = vec![q(1, 1, p), q(1, 1, p)];
        let f = vec![q(1, 1, p), q(5, 1, p)];
        assert!(canonical_pair(&a, &f).unwrap().agrees(&q(6, 1, p)));
        let zero = vec![PadicNumber::zero(p), PadicNumber::zero(p)];
        assert_eq!(canonical_pair(&zero, &f).unwrap().is_zero_decided(), Some(true));
        assert!(canonical_pair(&a, &f[..1].to_vec()).is_err());
        let bad = vec![q(1, 5, p), q(1, 1, p)];
        assert!(matches!(canonical_pair(&bad, &f), Err(Error::NotIntegral)));
    }

    #[test]
    fn canonical_pair_matches_independent_summation() {
        // random vectors over an index set of size 5 against a reversed,
        // explicitly accumulated sum
        let p = 5;
        let a: Vec<PadicNumber> = [3, 0, 7, 1, 4].iter().map(|&n| q(n, 1, p)).collect();
        let f: Vec<PadicNumber> = [(1, 5), (2, 1), (-3, 1), (9, 5), (0, 1)]
            .iter()
            .map(|&(n, d)| q(n, d, p))
            .collect();
        let got = canonical_pair(&a, &f).unwrap();
        let mut oracle = PadicNumber::zero(p);
        for i in (0..5).rev() {
            oracle = oracle.add(&f[i].mul(&a[i]).unwrap()).unwrap();
        }
        assert!(got.agrees(&oracle));
    }

    #[test]
    fn transpose_involution_and_adjunction() {
        let p = 7;
        let m = PadicMatrix::from_fn(p, 3, 3, |r, c| q((r * 3 + c) as i64 % 5, 1, p));
        let a = ContractiveMap::new(m).unwrap();
        assert!(a.transpose().transpose().matrix().agrees(a.matrix()));
        let id = ContractiveMap::new(PadicMatrix::identity(p, 3, 16)).unwrap();
        assert!(id.transpose().matrix().agrees(id.matrix()));
        // pairing adjunction <A^T a, f> = <a, A f>
        let avec = vec![q(1, 1, p), q(2, 1, p), q(3, 1, p)];
        let fvec = vec![q(1, 3, p), q(5, 1, p), q(-2, 1, p)];
        let lhs = canonical_pair(&a.transpose().apply(&avec).unwrap(), &fvec).unwrap();
        let rhs = canonical_pair(&avec, &a.apply(&fvec).unwrap()).unwrap();
        assert!(lhs.agrees(&rhs));
        // composition transposes in reverse order
        let b = ContractiveMap::new(PadicMatrix::from_fn(p, 3, 3, |r, c| {
            q(if r <= c { 1 } else { 0 }, 1, p)
        }))
        .unwrap();
        let lhs = a.compose(&b).unwrap().transpose();
        let rhs = b.transpose().compose(&a.transpose()).unwrap();
        assert!(lhs.matrix().agrees(rhs.matrix()));
    }

    #[test]
    fn double_dual_standard_bases() {
        for n in [1usize, 3] {
            let id = PadicMatrix::identity(5, n, 16);
            let rep = double_dual_check(&id, &id, 64).unwrap();
            assert!(rep.ok);
            assert!(rep.gram.is_identity_at_prec());
        }
    }

    #[test]
    fn double_dual_rejects_non_unimodular() {
        let p = 5;
        let id = PadicMatrix::identity(p, 2, 16);
        let mut bad = id.clone();
        bad.set(0, 0, q(5, 1, p));
        let rep = double_dual_check(&bad, &id, 64).unwrap();
        assert!(!rep.ok);
    }

    #[test]
    fn function_json_round_trip() {
        let t = QuotientTower::zp_additive(3).unwrap();
        let mut vals = BTreeMap::new();
        vals.insert(0usize, q(5, 7, 3));
        vals.insert(2usize, q(-1, 3, 3));
        let f = LCFunction::from_values(t, 1, 3, vals).unwrap();
        let back = LCFunction::from_json(&f.to_json(), 16).unwrap();
        for g in 0..3 {
            assert!(back.value(g).agrees(&f.value(g)));
        }
        assert_eq!(back.sup_norm().unwrap(), f.sup_norm().unwrap());
    }

    #[test]
    fn sup_norm_undecidable_when_a_bound_dominates() {
        let t = QuotientTower::zp_additive(3).unwrap();
        let x = q(1, 3, 3);
        let cancel = x.sub(&x).unwrap();
        assert!(cancel.is_zero_at_prec());
        let mut vals = BTreeMap::new();
        // the cancelled value is only bounded by 3^-15, which could exceed
        // the decided 3^-16 entry
        vals.insert(0usize, cancel);
        vals.insert(1usize, q(43046721, 1, 3));
        let f = LCFunction::from_values(t, 1, 3, vals).unwrap();
        assert!(matches!(f.sup_norm(), Err(Error::PrecisionExhausted(_))));
    }

    #[test]
    fn level_pairing_is_identity() {
        let t = QuotientTower::zp_additive(3).unwrap();
        let m = level_pairing_matrix(&t, 1, 3, 12).unwrap();
        assert!(m.is_identity_at_prec());
    }
}
