//! Integral measures at a working level: coefficient vectors over level
//! cosets with values in Z_p tracked modulo p^prec. Convolution is the
//! group-algebra product in (Z_p / p^prec)[G/K_n]; all measure arithmetic
//! is exact in that quotient ring.
//!
//! The weak and strong topologies on the full measure module coincide on
//! every finite level, so no topological structure is represented here;
//! the compatible-family condition survives as the projection coherence
//! law tested against convolution.

use std::collections::BTreeMap;
use std::sync::Arc;

use num::bigint::BigUint;
use num::Zero;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::padic::{is_prime, p_pow, PadicNumber};
use crate::tower::QuotientTower;

#[derive(Clone, Debug)]
pub struct Measure {
    tower: Arc<QuotientTower>,
    level: u32,
    p: u64,
    prec: u32,
    coeffs: BTreeMap<usize, BigUint>,
}

impl PartialEq for Measure {
    fn eq(&self, other: &Self) -> bool {
        *self.tower == *other.tower
            && self.level == other.level
            && self.p == other.p
            && self.prec == other.prec
            && self.coeffs == other.coeffs
    }
}

impl Measure {
    pub fn zero(tower: Arc<QuotientTower>, level: u32, p: u64, prec: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidPrime(p));
        }
        tower.element_count(level)?;
        Ok(Measure { tower, level, p, prec, coeffs: BTreeMap::new() })
    }

    /// Unit point mass at a level element.
    pub fn dirac(tower: Arc<QuotientTower>, level: u32, g: usize, p: u64, prec: u32) -> Result<Self> {
        let mut m = Self::zero(tower, level, p, prec)?;
        if g >= m.tower.element_count(level)? {
            return Err(Error::BadElement(format!("index {g} out of range at level {level}")));
        }
        m.coeffs.insert(g, BigUint::from(1u32));
        Ok(m)
    }

    pub fn from_coeffs(
        tower: Arc<QuotientTower>,
        level: u32,
        p: u64,
        prec: u32,
        coeffs: BTreeMap<usize, BigUint>,
    ) -> Result<Self> {
        let mut m = Self::zero(tower, level, p, prec)?;
        let count = m.tower.element_count(level)?;
        let modulus = p_pow(p, prec);
        for (g, c) in coeffs {
            if g >= count {
                return Err(Error::BadElement(format!("index {g} out of range")));
            }
            let r = c % &modulus;
            if !r.is_zero() {
                m.coeffs.insert(g, r);
            }
        }
        Ok(m)
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

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.coeffs.keys().copied()
    }

    pub fn coeff(&self, g: usize) -> BigUint {
        self.coeffs.get(&g).cloned().unwrap_or_else(BigUint::zero)
    }

    /// Coefficient lifted to a tracked p-adic value (known mod p^prec).
    pub fn coeff_padic(&self, g: usize) -> PadicNumber {
        match self.coeffs.get(&g) {
            None => PadicNumber::zero(self.p),
            Some(r) => PadicNumber::from_residue(self.p, r, self.prec),
        }
    }

    pub fn total_mass(&self) -> BigUint {
        let modulus = p_pow(self.p, self.prec);
        let mut acc = BigUint::zero();
        for c in self.coeffs.values() {
            acc = (acc + c) % &modulus;
        }
        acc
    }

    fn align(&self, prec: u32) -> Self {
        if prec >= self.prec {
            return self.clone();
        }
        let modulus = p_pow(self.p, prec);
        let mut coeffs = BTreeMap::new();
        for (&g, c) in &self.coeffs {
            let r = c % &modulus;
            if !r.is_zero() {
                coeffs.insert(g, r);
            }
        }
        Measure { tower: self.tower.clone(), level: self.level, p: self.p, prec, coeffs }
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if *self.tower != *other.tower {
            return Err(Error::TowerMismatch);
        }
        if self.p != other.p {
            return Err(Error::PrimeMismatch(self.p, other.p));
        }
        if self.level != other.level {
            return Err(Error::LevelMismatch(self.level, other.level));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let prec = self.prec.min(other.prec);
        let a = self.align(prec);
        let b = other.align(prec);
        let modulus = p_pow(self.p, prec);
        let mut coeffs = a.coeffs;
        for (g, c) in b.coeffs {
            let entry = coeffs.entry(g).or_insert_with(BigUint::zero);
            *entry = (&*entry + c) % &modulus;
        }
        coeffs.retain(|_, c| !c.is_zero());
        Ok(Measure { tower: self.tower.clone(), level: self.level, p: self.p, prec, coeffs })
    }

    pub fn neg(&self) -> Self {
        let modulus = p_pow(self.p, self.prec);
        let coeffs = self
            .coeffs
            .iter()
            .map(|(&g, c)| (g, (&modulus - c) % &modulus))
            .filter(|(_, c)| !c.is_zero())
            .collect();
        Measure { tower: self.tower.clone(), level: self.level, p: self.p, prec: self.prec, coeffs }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    /// Scale by an integral p-adic number; the working precision drops to
    /// what the scalar justifies.
    pub fn scale(&self, a: &PadicNumber) -> Result<Self> {
        if a.prime() != self.p {
            return Err(Error::PrimeMismatch(a.prime(), self.p));
        }
        if a.is_integral() != Some(true) {
            return Err(Error::NotIntegral);
        }
        if a.is_exact_zero() {
            return Measure::zero(self.tower.clone(), self.level, self.p, self.prec);
        }
        let abs_prec = match (a.known_val(), a.relative_prec(), a.val_lower_bound()) {
            (Some(v), Some(k), _) => (v + k as i64).min(self.prec as i64) as u32,
            (None, None, Some(m)) => m.min(self.prec as i64) as u32,
            _ => self.prec,
        };
        if abs_prec == 0 {
            return Err(Error::PrecisionExhausted("scalar carries no integral digits".into()));
        }
        let r = a.to_residue(abs_prec)?;
        let base = self.align(abs_prec);
        let modulus = p_pow(self.p, abs_prec);
        let coeffs = base
            .coeffs
            .iter()
            .map(|(&g, c)| (g, (c * &r) % &modulus))
            .filter(|(_, c)| !c.is_zero())
            .collect();
        Ok(Measure { tower: self.tower.clone(), level: self.level, p: self.p, prec: abs_prec, coeffs })
    }

    /// Convolution: (mu * nu)(c) = sum over a b = c of mu(a) nu(b), the
    /// group-algebra product at the working level.
    pub fn convolve(&self, other: &Self) -> Result<Self> {
        if !self.tower.is_group() {
            return Err(Error::NoGroupStructure);
        }
        self.check_compatible(other)?;
        let prec = self.prec.min(other.prec);
        let a = self.align(prec);
        let b = other.align(prec);
        let modulus = p_pow(self.p, prec);
        let mut coeffs: BTreeMap<usize, BigUint> = BTreeMap::new();
        for (&ga, ca) in &a.coeffs {
            for (&gb, cb) in &b.coeffs {
                let g = self.tower.mul(self.level, ga, gb)?;
                let entry = coeffs.entry(g).or_insert_with(BigUint::zero);
                *entry = (&*entry + ca * cb) % &modulus;
            }
        }
        coeffs.retain(|_, c| !c.is_zero());
        Ok(Measure { tower: self.tower.clone(), level: self.level, p: self.p, prec, coeffs })
    }

    /// Push the measure down a level: the coefficient of a coarse class is
    /// the sum of the coefficients of its fibers.
    pub fn project(&self, target: u32) -> Result<Self> {
        if target > self.level {
            return Err(Error::BadLevelOrder(self.level, target));
        }
        let modulus = p_pow(self.p, self.prec);
        let mut coeffs: BTreeMap<usize, BigUint> = BTreeMap::new();
        for (&g, c) in &self.coeffs {
            let down = self.tower.project(self.level, target, g)?;
            let entry = coeffs.entry(down).or_insert_with(BigUint::zero);
            *entry = (&*entry + c) % &modulus;
        }
        coeffs.retain(|_, c| !c.is_zero());
        Ok(Measure { tower: self.tower.clone(), level: target, p: self.p, prec: self.prec, coeffs })
    }

    pub fn to_json(&self) -> Value {
        let mut coeffs = Map::new();
        for (&g, c) in &self.coeffs {
            let key = self.tower.elem_key(self.level, g).expect("stored index is valid");
            coeffs.insert(key, Value::String(c.to_string()));
        }
        json!({
            "tower": self.tower.descriptor(),
            "level": self.level,
            "p": self.p,
            "prec": self.prec,
            "coeffs": Value::Object(coeffs),
        })
    }

    /// Parse the JSON form. `p` may be omitted when the tower carries one.
    pub fn from_json(v: &Value, default_prec: u32) -> Result<Self> {
        let tower_v = v
            .get("tower")
            .ok_or_else(|| Error::ParseError("measure needs a tower".into()))?;
        let tower = QuotientTower::from_json(tower_v)?;
        let level = v
            .get("level")
            .and_then(|x| x.as_u64())
            .ok_or_else(|| Error::ParseError("measure needs a level".into()))? as u32;
        let p = match v.get("p").and_then(|x| x.as_u64()) {
            Some(p) => p,
            None => tower
                .tower_prime()
                .ok_or_else(|| Error::ParseError("measure over a finite tower needs an explicit p".into()))?,
        };
        let prec = v.get("prec").and_then(|x| x.as_u64()).map(|x| x as u32).unwrap_or(default_prec);
        let mut coeffs = BTreeMap::new();
        if let Some(map) = v.get("coeffs").and_then(|x| x.as_object()) {
            for (k, val) in map {
                let g = tower.parse_key(level, k)?;
                let s = val
                    .as_str()
                    .map(|s| s.to_string())
                    .or_else(|| val.as_i64().map(|n| n.to_string()))
                    .ok_or_else(|| Error::ParseError("coefficient must be an integer string".into()))?;
                let c = parse_integer_mod(&s, p, prec)?;
                coeffs.insert(g, c);
            }
        }
        Self::from_coeffs(tower, level, p, prec, coeffs)
    }
}

fn parse_integer_mod(s: &str, p: u64, prec: u32) -> Result<BigUint> {
    let n = s
        .trim()
        .parse::<num::bigint::BigInt>()
        .map_err(|e| Error::ParseError(format!("bad coefficient {s:?}: {e}")))?;
    let modulus = num::bigint::BigInt::from(p_pow(p, prec));
    let mut r = n % &modulus;
    if r < num::bigint::BigInt::from(0) {
        r += &modulus;
    }
    Ok(r.to_biguint().expect("nonnegative"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn zp(p: u64) -> Arc<QuotientTower> {
        QuotientTower::zp_additive(p).unwrap()
    }

    #[test]
    fn dirac_convolution_is_point_composition() {
        let t = zp(2);
        let a = Measure::dirac(t.clone(), 2, 1, 2, 8).unwrap();
        let b = Measure::dirac(t.clone(), 2, 3, 2, 8).unwrap();
        let c = a.convolve(&b).unwrap();
        let expect = Measure::dirac(t, 2, 0, 2, 8).unwrap();
        assert_eq!(c, expect);
    }

    #[test]
    fn dirac_unit_law() {
        let t = catalog::symmetric_3();
        let e = t.identity(0).unwrap();
        let unit = Measure::dirac(t.clone(), 0, e, 5, 8).unwrap();
        for g in t.elements(0).unwrap() {
            let mu = Measure::dirac(t.clone(), 0, g, 5, 8).unwrap();
            assert_eq!(unit.convolve(&mu).unwrap(), mu);
            assert_eq!(mu.convolve(&unit).unwrap(), mu);
        }
    }

    #[test]
    fn square_of_uniform_on_z2() {
        // (d0 + d1) * (d0 + d1) = 2 d0 + 2 d1 in Z[Z/2].
        let t = zp(2);
        let u = Measure::dirac(t.clone(), 1, 0, 2, 8)
            .unwrap()
            .add(&Measure::dirac(t.clone(), 1, 1, 2, 8).unwrap())
            .unwrap();
        let sq = u.convolve(&u).unwrap();
        assert_eq!(sq.coeff(0), BigUint::from(2u32));
        assert_eq!(sq.coeff(1), BigUint::from(2u32));
    }

    #[test]
    fn addition_and_scaling() {
        let t = zp(5);
        let d = Measure::dirac(t.clone(), 1, 2, 5, 6).unwrap();
        let twice = d.add(&d).unwrap();
        assert_eq!(twice.coeff(2), BigUint::from(2u32));
        let z = Measure::zero(t.clone(), 1, 5, 6).unwrap();
        assert_eq!(d.add(&z).unwrap(), d);
        let p_scalar = PadicNumber::from_integer(5, 5, 6).unwrap();
        let scaled = d.scale(&p_scalar).unwrap();
        let lifted = scaled.coeff_padic(2);
        assert_eq!(lifted.known_val(), Some(1));
        let non_integral = PadicNumber::from_rational(
            &num::bigint::BigInt::from(1),
            &num::bigint::BigInt::from(5),
            5,
            6,
        )
        .unwrap();
        assert_eq!(d.scale(&non_integral), Err(Error::NotIntegral));
    }

    #[test]
    fn scaling_by_an_uncertain_zero_keeps_only_certified_digits() {
        let t = zp(5);
        let d = Measure::dirac(t, 1, 2, 5, 16).unwrap();
        let x = PadicNumber::from_integer(1, 5, 3).unwrap();
        let almost_zero = x.sub(&x).unwrap();
        assert!(almost_zero.is_zero_at_prec());
        let scaled = d.scale(&almost_zero).unwrap();
        assert_eq!(scaled.prec(), 3);
        assert_eq!(scaled.total_mass(), BigUint::from(0u32));
    }

    #[test]
    fn projection_preserves_mass_and_diracs() {
        let t = zp(3);
        let mut coeffs = BTreeMap::new();
        coeffs.insert(0usize, BigUint::from(1u32));
        coeffs.insert(1usize, BigUint::from(1u32));
        coeffs.insert(2usize, BigUint::from(1u32));
        let mu = Measure::from_coeffs(t.clone(), 2, 3, 8, coeffs).unwrap();
        let down = mu.project(1).unwrap();
        assert_eq!(down.total_mass(), mu.total_mass());
        // Fibers of 0,1,2 mod 3 each received exactly one unit.
        assert_eq!(down.coeff(0), BigUint::from(1u32));
        assert_eq!(down.coeff(1), BigUint::from(1u32));
        assert_eq!(down.coeff(2), BigUint::from(1u32));
        let d = Measure::dirac(t.clone(), 2, 7, 3, 8).unwrap();
        assert_eq!(d.project(1).unwrap(), Measure::dirac(t, 1, 1, 3, 8).unwrap());
    }

    #[test]
    fn convolution_rejects_spaces_without_group_law() {
        let t = QuotientTower::kminus(2, 3).unwrap();
        let a = Measure::dirac(t.clone(), 1, 0, 3, 8).unwrap();
        assert_eq!(a.convolve(&a), Err(Error::NoGroupStructure));
    }

    #[test]
    fn level_mismatch_rejected() {
        let t = zp(3);
        let a = Measure::dirac(t.clone(), 1, 0, 3, 8).unwrap();
        let b = Measure::dirac(t, 2, 0, 3, 8).unwrap();
        assert_eq!(a.add(&b), Err(Error::LevelMismatch(1, 2)));
    }

    #[test]
    fn json_round_trip() {
        let t = zp(3);
        let mu = Measure::dirac(t.clone(), 2, 4, 3, 16)
            .unwrap()
            .add(&Measure::dirac(t, 2, 7, 3, 16).unwrap())
            .unwrap();
        let v = mu.to_json();
        let back = Measure::from_json(&v, 32).unwrap();
        assert_eq!(mu, back);
    }
}
