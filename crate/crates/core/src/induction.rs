//! Induction at a finite level in three models and their comparisons.
//!
//! * the function model: H-equivariant functions on the group, carried on a
//!   right-coset transversal, with right-translation action;
//! * the measure-quotient model: Dirac symbols delta_(g, m) modulo the
//!   scalar, additivity, and H-equivariance relation families, reduced to a
//!   normal form on the transversal grid;
//! * the completed-tensor model for GL_n(Q_p): K^- S representatives paired
//!   with a Borel module, acted on through the p1/p2 projections of the
//!   normalized LUP factorization.
//!
//! The duality check certifies the evaluation pairing between the first two
//! models: well-defined on relation classes, perfect over the lattices, and
//! equivariant for the right-translation/left-translation-dual conventions.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::gln::{is_canonical_ks, p1p2};
use crate::matrix::PadicMatrix;
use crate::padic::PadicNumber;
use crate::rep::{LatticeRep, Subgroup};


/// Right-coset transversal of a subgroup: parent indices t_i with the level
/// partitioned as the disjoint union of the cosets H t_i, plus the lookup
/// from any element to its coset position.
fn right_transversal(sub: &Subgroup) -> Result<(Vec<usize>, Vec<usize>)> {
    let parent = sub.parent();
    let level = sub.level();
    let n = parent.element_count(level)?;
    let mut coset_of = vec![usize::MAX; n];
    let mut transversal = Vec::new();
    for g in 0..n {
        if coset_of[g] != usize::MAX {
            continue;
        }
        let idx = transversal.len();
        transversal.push(g);
        for i in 0..sub.order() {
            let hg = parent.mul(level, sub.embed(i), g)?;
            coset_of[hg] = idx;
        }
    }
    Ok((transversal, coset_of))
}

/// Write g = h t_j with h in the subgroup; returns (local index of h, j).
fn factor_left(sub: &Subgroup, coset_of: &[usize], transversal: &[usize], g: usize) -> Result<(usize, usize)> {
    let parent = sub.parent();
    let level = sub.level();
    let j = coset_of[g];
    let tj_inv = parent.inv(level, transversal[j])?;
    let h = parent.mul(level, g, tj_inv)?;
    let h_loc = sub
        .local_index(h)
        .ok_or_else(|| Error::NotASubgroup("coset factorization left the subgroup".into()))?;
    Ok((h_loc, j))
}

#[derive(Clone, Debug)]
pub struct InducedFunctionRep {
    pub subgroup: Subgroup,
    pub base: LatticeRep,
    pub transversal: Vec<usize>,
    coset_of: Vec<usize>,
    pub rep: LatticeRep,
}

/// Induce a unitary representation of a subgroup up to the whole level:
/// functions f with f(hg) = h f(g), determined by their transversal values,
/// with (g f)(g') = f(g' g).
pub fn induce_functions(sub: &Subgroup, base: &LatticeRep) -> Result<InducedFunctionRep> {
    if **base.tower() != **sub.tower() {
        return Err(Error::TowerMismatch);
    }
    if !base.is_unitary() {
        return Err(Error::NotUnitary);
    }
    let parent = sub.parent().clone();
    let level = sub.level();
    let (transversal, coset_of) = right_transversal(sub)?;
    let r = transversal.len();
    let d0 = base.dim();
    let dim = r * d0;
    let p = base.prime();
    let n = parent.element_count(level)?;
    let mut action = Vec::with_capacity(n);
    for g in 0..n {
        let mut m = PadicMatrix::zero(p, dim, dim);
        for (i, &ti) in transversal.iter().enumerate() {
            let tig = parent.mul(level, ti, g)?;
            let (h_loc, j) = factor_left(sub, &coset_of, &transversal, tig)?;
            let block = base.act(h_loc);
            for rr in 0..d0 {
                for cc in 0..d0 {
                    m.set(i * d0 + rr, j * d0 + cc, block.at(rr, cc).clone());
                }
            }
        }
        action.push(m);
    }
    let base_lat = base.lattice();
    let lattice = PadicMatrix::from_fn(p, dim, dim, |rr, cc| {
        if rr / d0 == cc / d0 {
            base_lat.at(rr % d0, cc % d0).clone()
        } else {
            PadicNumber::zero(p)
        }
    });
    let rep = LatticeRep::new(parent, level, action, lattice)?;
    Ok(InducedFunctionRep {
        subgroup: sub.clone(),
        base: base.clone(),
        transversal,
        coset_of,
        rep,
    })
}

impl InducedFunctionRep {
    /// Value f(g) of a carrier vector, through the H-equivariance
    /// condition: f(h t_j) = rho0(h) f(t_j).
    pub fn value_at(&self, coords: &[PadicNumber], g: usize) -> Result<Vec<PadicNumber>> {
        let d0 = self.base.dim();
        if coords.len() != self.rep.dim() {
            return Err(Error::IndexMismatch(coords.len(), self.rep.dim()));
        }
        let (h_loc, j) = factor_left(&self.subgroup, &self.coset_of, &self.transversal, g)?;
        let block: Vec<PadicNumber> = coords[j * d0..(j + 1) * d0].to_vec();
        self.base.act(h_loc).mul_vec(&block)
    }
}

#[derive(Clone, Debug)]
pub struct InducedMeasureModule {
    pub subgroup: Subgroup,
    /// The base module M0 with its H-action (for dual data, pass the dual
    /// representation of the function-model base).
    pub base: LatticeRep,
    pub transversal: Vec<usize>,
    coset_of: Vec<usize>,
    pub rank: usize,
    action: Vec<PadicMatrix>,
    lattice: PadicMatrix,
}

/// Present the induced measure module: the free module on Dirac symbols
/// delta_(g, m) over (transversal) x (base module), with the scalar,
/// additivity, and H-equivariance relations realized by a normal form.
pub fn induce_measures(sub: &Subgroup, base: &LatticeRep) -> Result<InducedMeasureModule> {
    if **base.tower() != **sub.tower() {
        return Err(Error::TowerMismatch);
    }
    if !base.is_unitary() {
        return Err(Error::NotUnitary);
    }
    let parent = sub.parent().clone();
    let level = sub.level();
    let (transversal, coset_of) = right_transversal(sub)?;
    let r = transversal.len();
    let d0 = base.dim();
    let rank = r * d0;
    let p = base.prime();
    let n = parent.element_count(level)?;
    let prec = base
        .lattice()
        .at(0, 0)
        .relative_prec()
        .unwrap_or(crate::padic::DEFAULT_PREC);

    let nf = |g: usize, m: &[PadicNumber]| -> Result<Vec<PadicNumber>> {
        let (h_loc, j) = factor_left(sub, &coset_of, &transversal, g)?;
        let h_inv = sub.tower().inv(0, h_loc)?;
        let moved = base.act(h_inv).mul_vec(m)?;
        let mut out = vec![PadicNumber::zero(p); rank];
        out[j * d0..(j + 1) * d0].clone_from_slice(&moved);
        Ok(out)
    };

    // g . delta_(g', m) = delta_(g' g^{-1}, m), pinned by the equivariance
    // requirement against the right-translation function model.
    let mut action = Vec::with_capacity(n);
    for g in 0..n {
        let ginv = parent.inv(level, g)?;
        let mut mat = PadicMatrix::zero(p, rank, rank);
        for (j, &tj) in transversal.iter().enumerate() {
            let moved_point = parent.mul(level, tj, ginv)?;
            for l in 0..d0 {
                let mut e = vec![PadicNumber::zero(p); d0];
                e[l] = PadicNumber::one(p, prec);
                let col = nf(moved_point, &e)?;
                for (row, val) in col.into_iter().enumerate() {
                    mat.set(row, j * d0 + l, val);
                }
            }
        }
        action.push(mat);
    }
    let base_lat = base.lattice();
    let lattice = PadicMatrix::from_fn(p, rank, rank, |rr, cc| {
        if rr / d0 == cc / d0 {
            base_lat.at(rr % d0, cc % d0).clone()
        } else {
            PadicNumber::zero(p)
        }
    });
    Ok(InducedMeasureModule {
        subgroup: sub.clone(),
        base: base.clone(),
        transversal,
        coset_of,
        rank,
        action,
        lattice,
    })
}

impl InducedMeasureModule {
    /// Coordinates of the class of delta_(g, m) on the transversal grid.
    pub fn normal_form(&self, g: usize, m: &[PadicNumber]) -> Result<Vec<PadicNumber>> {
        if m.len() != self.base.dim() {
            return Err(Error::IndexMismatch(m.len(), self.base.dim()));
        }
        let p = self.base.prime();
        let d0 = self.base.dim();
        let (h_loc, j) = factor_left(&self.subgroup, &self.coset_of, &self.transversal, g)?;
        let h_inv = self.subgroup.tower().inv(0, h_loc)?;
        let moved = self.base.act(h_inv).mul_vec(m)?;
        let mut out = vec![PadicNumber::zero(p); self.rank];
        out[j * d0..(j + 1) * d0].clone_from_slice(&moved);
        Ok(out)
    }

    pub fn act(&self, g: usize) -> &PadicMatrix {
        &self.action[g]
    }

    pub fn act_vec(&self, g: usize, x: &[PadicNumber]) -> Result<Vec<PadicNumber>> {
        self.action[g].mul_vec(x)
    }

    pub fn lattice(&self) -> &PadicMatrix {
        &self.lattice
    }
}

#[derive(Clone, Debug)]
pub struct DualityCertificate {
    /// Gram matrix of the evaluation pairing in the lattice bases.
    pub gram: PadicMatrix,
    pub rank: usize,
}

impl DualityCertificate {
    pub fn to_json(&self) -> Value {
        json!({"gram": self.gram.to_json(), "rank": self.rank, "pass": true})
    }
}

fn vec_sub(a: &[PadicNumber], b: &[PadicNumber]) -> Result<Vec<PadicNumber>> {
    a.iter().zip(b).map(|(x, y)| x.sub(y)).collect()
}

fn vec_agrees_zero(v: &[PadicNumber]) -> bool {
    v.iter().all(|x| x.is_zero_decided() != Some(false))
}

/// Certify the evaluation pairing <f, class(delta_(g,m))> = <f(g), m>
/// between the function model and the measure model built from dual data:
/// well-defined on relation classes, perfect over the lattices (unimodular
/// Gram matrix), and G-equivariant. Any violation is an error, never a
/// silent failure.
pub fn duality_check(
    ind_f: &InducedFunctionRep,
    ind_m: &InducedMeasureModule,
) -> Result<DualityCertificate> {
    let sub = &ind_f.subgroup;
    if sub.elements() != ind_m.subgroup.elements()
        || *sub.parent() != ind_m.subgroup.parent().clone()
        || sub.level() != ind_m.subgroup.level()
    {
        return Err(Error::TheoremCheckFailed("models built from different subgroups".into()));
    }
    if ind_f.base.dim() != ind_m.base.dim() || ind_f.rep.dim() != ind_m.rank {
        return Err(Error::TheoremCheckFailed("dimension mismatch between the two models".into()));
    }
    let p = ind_f.base.prime();
    let d0 = ind_f.base.dim();
    let rank = ind_m.rank;
    let parent = sub.parent().clone();
    let level = sub.level();
    let prec = ind_f
        .base
        .lattice()
        .at(0, 0)
        .relative_prec()
        .unwrap_or(crate::padic::DEFAULT_PREC);
    let std_basis = |l: usize| -> Vec<PadicNumber> {
        let mut e = vec![PadicNumber::zero(p); d0];
        e[l] = PadicNumber::one(p, prec);
        e
    };

    // Raw pairing against a symbol (g, m): evaluate the carrier function at
    // g through H-equivariance and pair coordinatewise with m.
    let raw_pair = |coords: &[PadicNumber], g: usize, m: &[PadicNumber]| -> Result<PadicNumber> {
        let fg = ind_f.value_at(coords, g)?;
        let mut acc = PadicNumber::zero(p);
        for (x, y) in fg.iter().zip(m) {
            acc = acc.add(&x.mul(y)?)?;
        }
        Ok(acc)
    };

    // Carrier basis vectors in standard coordinates.
    let carrier_basis: Vec<Vec<PadicNumber>> = (0..rank)
        .map(|i| {
            let mut v = vec![PadicNumber::zero(p); rank];
            v[i] = PadicNumber::one(p, prec);
            v
        })
        .collect();

    // Well-definedness: the H-equivariance relation family, exhaustively
    // over the subgroup and the transversal against every carrier basis
    // function, both through the raw pairing and through the normal form.
    for h_loc in 0..sub.order() {
        let h = sub.embed(h_loc);
        let h_inv_loc = sub.tower().inv(0, h_loc)?;
        for &tj in &ind_m.transversal {
            let htj = parent.mul(level, h, tj)?;
            for l in 0..d0 {
                let e = std_basis(l);
                let moved = ind_m.base.act(h_inv_loc).mul_vec(&e)?;
                let nf_lhs = ind_m.normal_form(htj, &e)?;
                let nf_rhs = ind_m.normal_form(tj, &moved)?;
                if !vec_agrees_zero(&vec_sub(&nf_lhs, &nf_rhs)?) {
                    return Err(Error::TheoremCheckFailed(format!(
                        "equivariance relation broken at h={h}, t={tj}, basis {l}"
                    )));
                }
                for f in &carrier_basis {
                    let lhs = raw_pair(f, htj, &e)?;
                    let rhs = raw_pair(f, tj, &moved)?;
                    if lhs.sub(&rhs)?.is_zero_decided() == Some(false) {
                        return Err(Error::TheoremCheckFailed(format!(
                            "pairing not constant on a relation class at h={h}, t={tj}"
                        )));
                    }
                }
            }
        }
    }
    // Scalar and additivity relation families on sampled data.
    {
        use rand::Rng;
        let mut rng = crate::selftest::seeded_rng(0x5ca1_ab1e);
        let n = parent.element_count(level)?;
        for _ in 0..20 {
            let g = rng.gen_range(0..n);
            let a = PadicNumber::from_integer(rng.gen_range(0..64), p, prec)?;
            let m1: Vec<PadicNumber> = (0..d0)
                .map(|_| PadicNumber::from_integer(rng.gen_range(-8..8), p, prec))
                .collect::<Result<_>>()?;
            let m2: Vec<PadicNumber> = (0..d0)
                .map(|_| PadicNumber::from_integer(rng.gen_range(-8..8), p, prec))
                .collect::<Result<_>>()?;
            let am: Vec<PadicNumber> = m1.iter().map(|x| x.mul(&a)).collect::<Result<_>>()?;
            let sum: Vec<PadicNumber> =
                m1.iter().zip(&m2).map(|(x, y)| x.add(y)).collect::<Result<_>>()?;
            let scaled_nf: Vec<PadicNumber> = ind_m
                .normal_form(g, &m1)?
                .iter()
                .map(|x| x.mul(&a))
                .collect::<Result<_>>()?;
            if !vec_agrees_zero(&vec_sub(&ind_m.normal_form(g, &am)?, &scaled_nf)?) {
                return Err(Error::TheoremCheckFailed("scalar relation broken".into()));
            }
            let sum_nf: Vec<PadicNumber> = ind_m
                .normal_form(g, &m1)?
                .iter()
                .zip(&ind_m.normal_form(g, &m2)?)
                .map(|(x, y)| x.add(y))
                .collect::<Result<_>>()?;
            if !vec_agrees_zero(&vec_sub(&ind_m.normal_form(g, &sum)?, &sum_nf)?) {
                return Err(Error::TheoremCheckFailed("additivity relation broken".into()));
            }
        }
    }

    // Perfectness over the lattices: the Gram matrix of the pairing in the
    // two lattice bases must be unimodular over Z_p.
    let gram = ind_f.rep.lattice().transpose().mul(ind_m.lattice())?;
    let unimodular = gram.is_integral() == Some(true)
        && gram
            .inverse()
            .ok()
            .map(|gi| gi.is_integral() == Some(true))
            .unwrap_or(false);
    if !unimodular {
        return Err(Error::TheoremCheckFailed("Gram matrix is not unimodular over Z_p".into()));
    }

    // Equivariance <g f, x> = <f, g^{-1} x>: in standard coordinates the
    // pairing matrix is the identity, so this is tau(g)^T = gamma(g^{-1}).
    let n = parent.element_count(level)?;
    for g in 0..n {
        let ginv = parent.inv(level, g)?;
        if !ind_f.rep.act(g).transpose().agrees(ind_m.act(ginv)) {
            return Err(Error::TheoremCheckFailed(format!(
                "pairing is not equivariant at group element {g}"
            )));
        }
    }
    Ok(DualityCertificate { gram, rank })
}

/// Classical induced module as an independent cross-check: the tensor model
/// on a left-coset transversal with g (s_i (x) v) = s_j (x) rho0(h) v where
/// g s_i = s_j h.
pub fn classical_induced_rep(sub: &Subgroup, base: &LatticeRep) -> Result<LatticeRep> {
    if **base.tower() != **sub.tower() {
        return Err(Error::TowerMismatch);
    }
    let parent = sub.parent().clone();
    let level = sub.level();
    let n = parent.element_count(level)?;
    let mut left_coset_of = vec![usize::MAX; n];
    let mut transversal = Vec::new();
    for g in 0..n {
        if left_coset_of[g] != usize::MAX {
            continue;
        }
        let idx = transversal.len();
        transversal.push(g);
        for i in 0..sub.order() {
            let gh = parent.mul(level, g, sub.embed(i))?;
            left_coset_of[gh] = idx;
        }
    }
    let r = transversal.len();
    let d0 = base.dim();
    let dim = r * d0;
    let p = base.prime();
    let mut action = Vec::with_capacity(n);
    for g in 0..n {
        let mut m = PadicMatrix::zero(p, dim, dim);
        for (i, &si) in transversal.iter().enumerate() {
            let gsi = parent.mul(level, g, si)?;
            let j = left_coset_of[gsi];
            let sj_inv = parent.inv(level, transversal[j])?;
            let h = parent.mul(level, sj_inv, gsi)?;
            let h_loc = sub
                .local_index(h)
                .ok_or_else(|| Error::NotASubgroup("left coset factorization failed".into()))?;
            let block = base.act(h_loc);
            for rr in 0..d0 {
                for cc in 0..d0 {
                    m.set(j * d0 + rr, i * d0 + cc, block.at(rr, cc).clone());
                }
            }
        }
        action.push(m);
    }
    let base_lat = base.lattice();
    let lattice = PadicMatrix::from_fn(p, dim, dim, |rr, cc| {
        if rr / d0 == cc / d0 {
            base_lat.at(rr % d0, cc % d0).clone()
        } else {
            PadicNumber::zero(p)
        }
    });
    LatticeRep::new(parent, level, action, lattice)
}

/// Explicit comparison map from the tensor model onto the function model:
/// s_i (x) v goes to the function x -> rho0(x s_i) v supported on the coset
/// H s_i^{-1}. Columns are indexed like `classical_induced_rep`, rows like
/// the function carrier.
pub fn classical_intertwiner(
    sub: &Subgroup,
    base: &LatticeRep,
    ind_f: &InducedFunctionRep,
) -> Result<PadicMatrix> {
    let parent = sub.parent().clone();
    let level = sub.level();
    let n = parent.element_count(level)?;
    let mut left_coset_of = vec![usize::MAX; n];
    let mut left_transversal = Vec::new();
    for g in 0..n {
        if left_coset_of[g] != usize::MAX {
            continue;
        }
        let idx = left_transversal.len();
        left_transversal.push(g);
        for i in 0..sub.order() {
            let gh = parent.mul(level, g, sub.embed(i))?;
            left_coset_of[gh] = idx;
        }
    }
    let d0 = base.dim();
    let dim = ind_f.rep.dim();
    let p = base.prime();
    let mut t = PadicMatrix::zero(p, dim, dim);
    for (m, &tm) in ind_f.transversal.iter().enumerate() {
        for (i, &si) in left_transversal.iter().enumerate() {
            let tmsi = parent.mul(level, tm, si)?;
            if let Some(h_loc) = sub.local_index(tmsi) {
                let block = base.act(h_loc);
                for rr in 0..d0 {
                    for cc in 0..d0 {
                        t.set(m * d0 + rr, i * d0 + cc, block.at(rr, cc).clone());
                    }
                }
            }
        }
    }
    Ok(t)
}

/// Explicit invertible intertwiner T with T a(g) = b(g) T for all g, found
/// by a linear solve; None when the representations are not isomorphic.
pub fn find_intertwiner(a: &LatticeRep, b: &LatticeRep) -> Result<Option<PadicMatrix>> {
    if **a.tower() != **b.tower() || a.level() != b.level() || a.dim() != b.dim() {
        return Ok(None);
    }
    let p = a.prime();
    let d = a.dim();
    let n = a.tower().element_count(a.level())?;
    let prec = crate::matrix::max_prec(a.lattice()).unwrap_or(crate::padic::DEFAULT_PREC);
    let mut rows = Vec::new();
    for g in 0..n {
        let ag = a.act(g);
        let bg = b.act(g);
        for r in 0..d {
            for c in 0..d {
                let mut row = vec![PadicNumber::zero(p); d * d];
                for k in 0..d {
                    // coefficient of T[r][k] from (T A)_{rc}
                    row[r * d + k] = row[r * d + k].add(ag.at(k, c))?;
                    // coefficient of T[k][c] from (B T)_{rc}
                    row[k * d + c] = row[k * d + c].sub(bg.at(r, k))?;
                }
                rows.push(row);
            }
        }
    }
    let system = PadicMatrix::from_rows(p, rows)?;
    let null = crate::matrix::kernel(&system)?;
    if null.is_empty() {
        return Ok(None);
    }
    let as_matrix = |v: &[PadicNumber]| PadicMatrix::from_fn(p, d, d, |r, c| v[r * d + c].clone());
    for v in &null {
        let t = as_matrix(v);
        if t.inverse().is_ok() {
            return Ok(Some(t));
        }
    }
    // Random integral combinations of the kernel basis.
    use rand::Rng;
    let mut rng = crate::selftest::seeded_rng(0x1d10_7ab5);
    for _ in 0..40 {
        let mut v = vec![PadicNumber::zero(p); d * d];
        for base_vec in &null {
            let c = PadicNumber::from_integer(rng.gen_range(-5..=5), p, prec)?;
            for (acc, x) in v.iter_mut().zip(base_vec) {
                *acc = acc.add(&c.mul(x)?)?;
            }
        }
        let t = as_matrix(&v);
        if t.inverse().is_ok() {
            return Ok(Some(t));
        }
    }
    Ok(None)
}

/// The Borel-side module datum for the completed-tensor model: built-in
/// characters of the diagonal torus, extended trivially on the unipotent
/// part.
#[derive(Clone, Debug)]
pub enum BorelModule {
    /// One-dimensional: b acts by the product of its diagonal entries
    /// raised to the listed exponents.
    TorusCharacter { exponents: Vec<i64> },
    /// Direct sum of torus characters acting diagonally.
    DiagonalCharacters { exponents: Vec<Vec<i64>> },
}

impl BorelModule {
    pub fn dim(&self) -> usize {
        match self {
            BorelModule::TorusCharacter { .. } => 1,
            BorelModule::DiagonalCharacters { exponents } => exponents.len(),
        }
    }

    fn character(b: &PadicMatrix, exponents: &[i64]) -> Result<PadicNumber> {
        if exponents.len() != b.rows() {
            return Err(Error::IndexMismatch(exponents.len(), b.rows()));
        }
        let p = b.prime();
        let mut acc = PadicNumber::one(p, crate::matrix::max_prec(b).unwrap_or(crate::padic::DEFAULT_PREC));
        for (i, &e) in exponents.iter().enumerate() {
            acc = acc.mul(&b.at(i, i).pow(e)?)?;
        }
        Ok(acc)
    }

    /// Action of b^{-1} on a module vector.
    pub fn act_inverse(&self, b: &PadicMatrix, m: &[PadicNumber]) -> Result<Vec<PadicNumber>> {
        if m.len() != self.dim() {
            return Err(Error::IndexMismatch(m.len(), self.dim()));
        }
        match self {
            BorelModule::TorusCharacter { exponents } => {
                let chi_inv = Self::character(b, exponents)?.pow(-1)?;
                Ok(vec![m[0].mul(&chi_inv)?])
            }
            BorelModule::DiagonalCharacters { exponents } => {
                let mut out = Vec::with_capacity(m.len());
                for (mi, exps) in m.iter().zip(exponents) {
                    let chi_inv = Self::character(b, exps)?.pow(-1)?;
                    out.push(mi.mul(&chi_inv)?);
                }
                Ok(out)
            }
        }
    }
}

/// One step of the completed-tensor action:
/// (g, [k] (x) m) -> [p2(k g^{-1})] (x) p1(k g^{-1})^{-1} m.
pub fn completed_tensor_action(
    g: &PadicMatrix,
    k: &PadicMatrix,
    m: &[PadicNumber],
    module: &BorelModule,
) -> Result<(PadicMatrix, Vec<PadicNumber>)> {
    if g.rows() != g.cols() || k.rows() != k.cols() || g.rows() != k.rows() {
        return Err(Error::IndexMismatch(g.rows(), k.rows()));
    }
    if module.dim() != m.len() {
        return Err(Error::IndexMismatch(module.dim(), m.len()));
    }
    if !is_canonical_ks(k)? {
        return Err(Error::BadElement("k is not a canonical K^- S representative".into()));
    }
    let g_inv = g.inverse()?;
    let kg_inv = k.mul(&g_inv)?;
    let (h, k_next) = p1p2(&kg_inv)?;
    let m_next = module.act_inverse(&h, m)?;
    Ok((k_next, m_next))
}
