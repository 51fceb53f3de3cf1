//! Finite-level lattice representations: validation of the homomorphism
//! law, unitarity in a lattice basis, unitarization by lattice intersection,
//! the measure-algebra action, dual representations, restriction, spin
//! closure, and a sound simplicity semidecision.

use std::collections::BTreeMap;
use std::sync::Arc;

use num::rational::BigRational;
use num::One;
use rand::Rng;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::matrix::{lattice_intersection, pick_pivot, PadicMatrix, Subspace};
use crate::measure::Measure;
use crate::padic::PadicNumber;
use crate::tower::QuotientTower;

/// Homomorphism validation is exhaustive up to this many pairs, sampled
/// beyond it.
const VALIDATION_PAIR_CAP: usize = 40_000;

#[derive(Clone, Debug)]
pub struct LatticeRep {
    tower: Arc<QuotientTower>,
    level: u32,
    dim: usize,
    action: Vec<PadicMatrix>,
    lattice: PadicMatrix,
}

impl LatticeRep {
    /// Validate and build a representation. The homomorphism law is checked
    /// exhaustively on small levels and on sampled pairs beyond the cap.
    pub fn new(
        tower: Arc<QuotientTower>,
        level: u32,
        action: Vec<PadicMatrix>,
        lattice: PadicMatrix,
    ) -> Result<Self> {
        if !tower.is_group() {
            return Err(Error::NoGroupStructure);
        }
        let n = tower.element_count(level)?;
        if action.len() != n {
            return Err(Error::NotARepresentation(format!(
                "action table has {} entries for {} level elements",
                action.len(),
                n
            )));
        }
        let dim = action.first().map(|m| m.rows()).unwrap_or(0);
        if dim == 0 {
            return Err(Error::NotARepresentation("empty action table".into()));
        }
        for m in &action {
            if m.rows() != dim || m.cols() != dim {
                return Err(Error::NotARepresentation("inconsistent matrix sizes".into()));
            }
        }
        if lattice.rows() != dim || lattice.cols() != dim {
            return Err(Error::BadLattice(format!(
                "lattice is {}x{} for dimension {}",
                lattice.rows(),
                lattice.cols(),
                dim
            )));
        }
        lattice.inverse().map_err(|_| Error::BadLattice("lattice basis is singular".into()))?;
        let e = tower.identity(level)?;
        if !action[e].is_identity_at_prec() {
            return Err(Error::NotARepresentation("identity does not act trivially".into()));
        }
        let rep = LatticeRep { tower, level, dim, action, lattice };
        let pairs = n * n;
        if pairs <= VALIDATION_PAIR_CAP {
            for a in 0..n {
                for b in 0..n {
                    rep.check_pair(a, b)?;
                }
            }
        } else {
            let mut rng = crate::selftest::seeded_rng(0x9e37_79b9);
            for _ in 0..2000 {
                let a = rng.gen_range(0..n);
                let b = rng.gen_range(0..n);
                rep.check_pair(a, b)?;
            }
        }
        Ok(rep)
    }

    fn check_pair(&self, a: usize, b: usize) -> Result<()> {
        let ab = self.tower.mul(self.level, a, b)?;
        let prod = self.action[a].mul(&self.action[b])?;
        if !prod.agrees(&self.action[ab]) {
            return Err(Error::NotARepresentation(format!(
                "action({a})*action({b}) differs from action({ab})"
            )));
        }
        Ok(())
    }

    pub fn tower(&self) -> &Arc<QuotientTower> {
        &self.tower
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn prime(&self) -> u64 {
        self.lattice.prime()
    }

    pub fn act(&self, g: usize) -> &PadicMatrix {
        &self.action[g]
    }

    pub fn lattice(&self) -> &PadicMatrix {
        &self.lattice
    }

    pub fn with_lattice(&self, lattice: PadicMatrix) -> Result<Self> {
        lattice.inverse().map_err(|_| Error::BadLattice("lattice basis is singular".into()))?;
        Ok(LatticeRep {
            tower: self.tower.clone(),
            level: self.level,
            dim: self.dim,
            action: self.action.clone(),
            lattice,
        })
    }

    /// Action matrix conjugated into the lattice basis.
    pub fn conjugated(&self, g: usize) -> Result<PadicMatrix> {
        let inv = self.lattice.inverse()?;
        inv.mul(&self.action[g])?.mul(&self.lattice)
    }

    /// True iff every action matrix preserves the lattice, i.e. every
    /// conjugated matrix (and, by the group law, its inverse) is integral.
    pub fn is_unitary(&self) -> bool {
        let inv = match self.lattice.inverse() {
            Ok(m) => m,
            Err(_) => return false,
        };
        for m in &self.action {
            let conj = match inv.mul(m).and_then(|x| x.mul(&self.lattice)) {
                Ok(c) => c,
                Err(_) => return false,
            };
            if conj.is_integral() != Some(true) {
                return false;
            }
        }
        true
    }

    /// Max operator norm over the group image, with respect to the current
    /// lattice norm.
    pub fn max_operator_norm(&self) -> Result<BigRational> {
        let inv = self.lattice.inverse()?;
        let mut best = BigRational::one();
        for m in &self.action {
            let conj = inv.mul(m)?.mul(&self.lattice)?;
            let norm = conj.max_entry_norm()?;
            if norm > best {
                best = norm;
            }
        }
        Ok(best)
    }

    /// Replace the lattice by the intersection of its translates under the
    /// whole group image: the unit ball of the sup norm over the orbit,
    /// rounded into |k|. Returns the sandwich constants (R1, R2) with
    /// R1^-1 R2 |v| <= sup_g |gv| <= R1 R2^-1 |v|.
    pub fn unitarize(&self) -> Result<(Self, BigRational, BigRational)> {
        let r1 = self.max_operator_norm()?;
        let r2 = BigRational::one();
        let mut current = self.lattice.clone();
        for (g, m) in self.action.iter().enumerate() {
            if g == self.tower.identity(self.level)? {
                continue;
            }
            let translated = m.mul(&self.lattice)?;
            current = lattice_intersection(&current, &translated)?;
        }
        let out = self.with_lattice(current)?;
        Ok((out, r1, r2))
    }

    /// Dual representation: g acts by the transpose of action(g^{-1});
    /// the lattice becomes the dual lattice.
    pub fn dual(&self) -> Result<Self> {
        let n = self.action.len();
        let mut action = Vec::with_capacity(n);
        for g in 0..n {
            let ginv = self.tower.inv(self.level, g)?;
            action.push(self.action[ginv].transpose());
        }
        let lattice = self.lattice.transpose().inverse()?;
        Ok(LatticeRep {
            tower: self.tower.clone(),
            level: self.level,
            dim: self.dim,
            action,
            lattice,
        })
    }

    /// Apply a measure through the finite-level algebra map: the linear
    /// combination sum mu(c) action(c) v after projecting the measure down
    /// to the representation level.
    pub fn act_measure(&self, mu: &Measure, v: &[PadicNumber]) -> Result<Vec<PadicNumber>> {
        if **mu.tower() != *self.tower {
            return Err(Error::TowerMismatch);
        }
        if mu.prime() != self.prime() {
            return Err(Error::PrimeMismatch(mu.prime(), self.prime()));
        }
        if mu.level() < self.level {
            return Err(Error::LevelMismatch(mu.level(), self.level));
        }
        if v.len() != self.dim {
            return Err(Error::IndexMismatch(v.len(), self.dim));
        }
        let mu = mu.project(self.level)?;
        let mut acc = vec![PadicNumber::zero(self.prime()); self.dim];
        for g in mu.support() {
            let c = mu.coeff_padic(g);
            let gv = self.action[g].mul_vec(v)?;
            for i in 0..self.dim {
                acc[i] = acc[i].add(&c.mul(&gv[i])?)?;
            }
        }
        Ok(acc)
    }

    /// Smallest action-stable subspace containing v, as an echelonized
    /// basis.
    pub fn spin(&self, v: &[PadicNumber]) -> Result<Subspace> {
        if v.len() != self.dim {
            return Err(Error::IndexMismatch(v.len(), self.dim));
        }
        if pick_pivot(v, false)?.is_none() {
            // nonzero-ness of the seed must be decidable
            if v.iter().all(|x| x.is_exact_zero()) {
                return Err(Error::BadElement("spin of the zero vector".into()));
            }
            return Err(Error::PrecisionExhausted(
                "spin seed indistinguishable from zero".into(),
            ));
        }
        let mut space = Subspace::empty(self.prime(), self.dim);
        space.insert(v)?;
        let mut frontier = vec![v.to_vec()];
        while let Some(w) = frontier.pop() {
            if space.dim() == self.dim {
                break;
            }
            for m in &self.action {
                let u = m.mul_vec(&w)?;
                if space.insert(&u)? {
                    frontier.push(u);
                }
            }
        }
        Ok(space)
    }

    pub fn to_json(&self) -> Value {
        let mut action = Map::new();
        for (g, m) in self.action.iter().enumerate() {
            let key = self.tower.elem_key(self.level, g).expect("stored index is valid");
            action.insert(key, m.to_json());
        }
        json!({
            "tower": self.tower.descriptor(),
            "level": self.level,
            "dim": self.dim,
            "p": self.prime(),
            "action": Value::Object(action),
            "lattice": self.lattice.to_json(),
        })
    }

    pub fn from_json(v: &Value, default_prec: u32) -> Result<Self> {
        let tower = QuotientTower::from_json(
            v.get("tower").ok_or_else(|| Error::ParseError("rep needs a tower".into()))?,
        )?;
        let level = v
            .get("level")
            .and_then(|x| x.as_u64())
            .ok_or_else(|| Error::ParseError("rep needs a level".into()))? as u32;
        let p = match v.get("p").and_then(|x| x.as_u64()) {
            Some(p) => p,
            None => tower
                .tower_prime()
                .ok_or_else(|| Error::ParseError("rep over a finite tower needs an explicit p".into()))?,
        };
        let prec = v.get("prec").and_then(|x| x.as_u64()).map(|x| x as u32).unwrap_or(default_prec);
        let dim = v
            .get("dim")
            .and_then(|x| x.as_u64())
            .ok_or_else(|| Error::ParseError("rep needs a dim".into()))? as usize;
        let action_map = v
            .get("action")
            .and_then(|x| x.as_object())
            .ok_or_else(|| Error::ParseError("rep needs an action table".into()))?;
        let n = tower.element_count(level)?;
        let mut action = vec![None; n];
        for (k, mv) in action_map {
            let g = tower.parse_key(level, k)?;
            action[g] = Some(PadicMatrix::from_json(mv, p, prec)?);
        }
        let action: Result<Vec<PadicMatrix>> = action
            .into_iter()
            .enumerate()
            .map(|(g, m)| m.ok_or_else(|| Error::NotARepresentation(format!("missing action for element {g}"))))
            .collect();
        let lattice = match v.get("lattice") {
            Some(lv) => PadicMatrix::from_json(lv, p, prec)?,
            None => PadicMatrix::identity(p, dim, prec),
        };
        Self::new(tower, level, action?, lattice)
    }
}

/// A subgroup of one level of a group tower, with its own constant tower
/// and the embedding back into the parent level.
#[derive(Clone, Debug)]
pub struct Subgroup {
    parent: Arc<QuotientTower>,
    level: u32,
    /// Sorted parent-level indices of the subgroup elements.
    elements: Vec<usize>,
    /// Constant tower on the re-indexed elements.
    tower: Arc<QuotientTower>,
}

impl Subgroup {
    pub fn new(parent: Arc<QuotientTower>, level: u32, mut elements: Vec<usize>) -> Result<Self> {
        if !parent.is_group() {
            return Err(Error::NoGroupStructure);
        }
        elements.sort_unstable();
        elements.dedup();
        if elements.is_empty() {
            return Err(Error::NotASubgroup("empty subset".into()));
        }
        let count = parent.element_count(level)?;
        if elements.iter().any(|&g| g >= count) {
            return Err(Error::NotASubgroup("element out of range".into()));
        }
        let e = parent.identity(level)?;
        if !elements.contains(&e) {
            return Err(Error::NotASubgroup("missing identity".into()));
        }
        let pos = |g: usize| elements.binary_search(&g);
        let n = elements.len();
        let mut table = vec![vec![0usize; n]; n];
        for (i, &a) in elements.iter().enumerate() {
            for (j, &b) in elements.iter().enumerate() {
                let ab = parent.mul(level, a, b)?;
                match pos(ab) {
                    Ok(k) => table[i][j] = k,
                    Err(_) => {
                        return Err(Error::NotASubgroup(format!(
                            "not closed: {a} * {b} leaves the subset"
                        )))
                    }
                }
            }
        }
        let tower = QuotientTower::finite(table)?;
        Ok(Subgroup { parent, level, elements, tower })
    }

    /// The whole level as a subgroup of itself.
    pub fn full(parent: Arc<QuotientTower>, level: u32) -> Result<Self> {
        let elems = parent.elements(level)?;
        Self::new(parent, level, elems)
    }

    pub fn parent(&self) -> &Arc<QuotientTower> {
        &self.parent
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn tower(&self) -> &Arc<QuotientTower> {
        &self.tower
    }

    /// Parent-level index of local element i.
    pub fn embed(&self, i: usize) -> usize {
        self.elements[i]
    }

    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    /// Local index of a parent element when it lies in the subgroup.
    pub fn local_index(&self, g: usize) -> Option<usize> {
        self.elements.binary_search(&g).ok()
    }

    pub fn contains(&self, g: usize) -> bool {
        self.local_index(g).is_some()
    }
}

/// Restrict a representation to a subgroup of its level: same space and
/// lattice, action table restricted along the embedding.
pub fn restrict(rep: &LatticeRep, sub: &Subgroup) -> Result<LatticeRep> {
    if **sub.parent() != **rep.tower() || sub.level() != rep.level() {
        return Err(Error::TowerMismatch);
    }
    let action: Vec<PadicMatrix> = (0..sub.order()).map(|i| rep.act(sub.embed(i)).clone()).collect();
    LatticeRep::new(sub.tower().clone(), 0, action, rep.lattice().clone())
}

/// Annihilator of a subspace under the coordinate pairing; a subspace of the
/// dual coordinate space of complementary dimension.
pub fn annihilator(space: &Subspace, dim: usize, p: u64, prec: u32) -> Result<Subspace> {
    let rows = space.basis().len();
    let mut out = Subspace::empty(p, dim);
    if rows == 0 {
        for i in 0..dim {
            let mut v = vec![PadicNumber::zero(p); dim];
            v[i] = PadicNumber::one(p, prec);
            out.insert(&v)?;
        }
        return Ok(out);
    }
    let m = PadicMatrix::from_fn(p, rows, dim, |r, c| space.basis()[r][c].clone());
    for v in crate::matrix::kernel(&m)? {
        out.insert(&v)?;
    }
    Ok(out)
}

/// Whether a subspace is stable under every action matrix.
pub fn is_invariant(rep: &LatticeRep, space: &Subspace) -> Result<bool> {
    for g in 0..rep.tower().element_count(rep.level())? {
        for b in space.basis() {
            let img = rep.act(g).mul_vec(b)?;
            if !space.contains(&img)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[derive(Clone, Debug)]
pub enum Verdict {
    NotSimple { witness: Vec<Vec<PadicNumber>> },
    SimpleCertified,
    Unknown,
}

/// Which certificate, if any, may upgrade "no counterexample found" to
/// `SimpleCertified`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Certification {
    None,
    /// Exhaustive spin cover of the residue module: if the reduction of a
    /// lattice-stable action modulo p is a simple F_p[G]-module, every
    /// proper invariant subspace over Q_p would meet the lattice in a
    /// saturated sublattice with proper nonzero reduction, so none exists.
    ResidueProbeCover,
}

/// Semidecision for simplicity. NotSimple verdicts carry a checkable
/// witness; SimpleCertified requires the configured certificate.
pub fn simplicity(rep: &LatticeRep, probes: &[Vec<PadicNumber>], certify: Certification) -> Result<Verdict> {
    if rep.dim() == 1 {
        return Ok(Verdict::SimpleCertified);
    }
    for v in probes {
        let space = match rep.spin(v) {
            Ok(s) => s,
            Err(Error::BadElement(_)) | Err(Error::PrecisionExhausted(_)) => continue,
            Err(e) => return Err(e),
        };
        if space.dim() > 0 && space.dim() < rep.dim() {
            return Ok(Verdict::NotSimple { witness: space.basis().to_vec() });
        }
    }
    if certify == Certification::ResidueProbeCover {
        if residue_module_is_simple(rep)? {
            return Ok(Verdict::SimpleCertified);
        }
    }
    Ok(Verdict::Unknown)
}

/// Exhaustive simplicity check of the mod-p reduction of the conjugated
/// (lattice-basis) action. Requires a unitary representation and a residue
/// space of at most 10^5 vectors.
fn residue_module_is_simple(rep: &LatticeRep) -> Result<bool> {
    if !rep.is_unitary() {
        return Ok(false);
    }
    let p = rep.prime();
    let d = rep.dim();
    let total = (p as u128).checked_pow(d as u32).unwrap_or(u128::MAX);
    if total > 100_000 {
        return Ok(false);
    }
    let n = rep.tower().element_count(rep.level())?;
    let mut mats = Vec::with_capacity(n);
    for g in 0..n {
        let conj = rep.conjugated(g)?;
        let mut m = vec![0u64; d * d];
        for r in 0..d {
            for c in 0..d {
                let res = conj.at(r, c).to_residue(1)?;
                m[r * d + c] = (res % num::bigint::BigUint::from(p))
                    .to_u64_digits()
                    .first()
                    .copied()
                    .unwrap_or(0);
            }
        }
        mats.push(m);
    }
    // Spin every nonzero residue vector over F_p.
    let total = total as u64;
    for code in 1..total {
        let mut v = vec![0u64; d];
        let mut c = code;
        for x in v.iter_mut() {
            *x = c % p;
            c /= p;
        }
        if fp_spin_dim(&mats, &v, d, p) < d {
            return Ok(false);
        }
    }
    Ok(true)
}

fn fp_spin_dim(mats: &[Vec<u64>], v: &[u64], d: usize, p: u64) -> usize {
    let mut basis: Vec<Vec<u64>> = Vec::new();
    let mut pivots: Vec<usize> = Vec::new();
    let reduce_insert = |basis: &mut Vec<Vec<u64>>, pivots: &mut Vec<usize>, w: &[u64]| -> bool {
        let mut w = w.to_vec();
        for (b, &piv) in basis.iter().zip(pivots.iter()) {
            let f = w[piv] % p;
            if f != 0 {
                for j in 0..d {
                    w[j] = (w[j] + p * p - f * b[j] % p) % p;
                }
            }
        }
        if let Some(piv) = (0..d).find(|&j| w[j] % p != 0) {
            let inv = modpow_u64(w[piv], p - 2, p);
            for x in w.iter_mut() {
                *x = *x * inv % p;
            }
            basis.push(w);
            pivots.push(piv);
            true
        } else {
            false
        }
    };
    reduce_insert(&mut basis, &mut pivots, v);
    let mut frontier = vec![v.to_vec()];
    while let Some(w) = frontier.pop() {
        if basis.len() == d {
            break;
        }
        for m in mats {
            let mut img = vec![0u64; d];
            for r in 0..d {
                let mut acc = 0u128;
                for c in 0..d {
                    acc += m[r * d + c] as u128 * w[c] as u128;
                }
                img[r] = (acc % p as u128) as u64;
            }
            if reduce_insert(&mut basis, &mut pivots, &img) {
                frontier.push(img);
            }
        }
    }
    basis.len()
}

fn modpow_u64(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}

/// Pushforward of a measure on a subgroup's own tower into the parent level
/// along the embedding.
pub fn include_measure(mu: &Measure, sub: &Subgroup, prec: u32) -> Result<Measure> {
    if **mu.tower() != **sub.tower() {
        return Err(Error::TowerMismatch);
    }
    let mut coeffs = BTreeMap::new();
    for g in mu.support() {
        coeffs.insert(sub.embed(g), mu.coeff(g));
    }
    Measure::from_coeffs(sub.parent().clone(), sub.level(), mu.prime(), prec.min(mu.prec()), coeffs)
}
