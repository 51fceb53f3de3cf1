//! Exact p-adic arithmetic over Q_p with explicit relative-precision
//! tracking.
//!
//! A nonzero value is stored as `p^val * (unit + O(p^prec))` with `unit`
//! coprime to `p` and reduced modulo `p^prec`. Exact zero (valuation +inf)
//! is distinguished from "zero at precision" `O(p^m)`, which records only a
//! lower bound `m` on the valuation after full cancellation. Comparisons
//! against a zero-at-precision value are three-valued; contexts that need a
//! decision surface `PrecisionExhausted` instead of guessing.

use std::cmp::Ordering;
use std::fmt;

use num::bigint::{BigInt, BigUint, Sign};
use num::integer::Integer;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};

/// Default relative precision in p-adic digits.
pub const DEFAULT_PREC: u32 = 32;

#[derive(Clone, Debug)]
pub struct PadicNumber {
    p: u64,
    form: Form,
}

#[derive(Clone, Debug)]
enum Form {
    /// Exact zero; valuation +inf.
    Zero,
    /// All tracked digits cancelled: the value lies in `p^min_val * Z_p`.
    ZeroAtPrec { min_val: i64 },
    /// `p^val * (unit + O(p^prec))`, `unit` invertible mod p, `< p^prec`.
    Unit { val: i64, unit: BigUint, prec: u32 },
}

/// What is known about the norm of a value; `Exact(v)` means |x| = p^{-v},
/// `AtMost(m)` means |x| <= p^{-m} with the exact size unknown.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormInfo {
    Zero,
    AtMost(i64),
    Exact(i64),
}

pub(crate) fn p_pow(p: u64, k: u32) -> BigUint {
    BigUint::from(p).pow(k)
}

/// Deterministic Miller-Rabin for u64.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &q in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == q {
            return true;
        }
        if n % q == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut r = 0u32;
    while d % 2 == 0 {
        d /= 2;
        r += 1;
    }
    let mulmod = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let powmod = |mut b: u64, mut e: u64| {
        let mut acc = 1u64;
        b %= n;
        while e > 0 {
            if e & 1 == 1 {
                acc = mulmod(acc, b);
            }
            b = mulmod(b, b);
            e >>= 1;
        }
        acc
    };
    'witness: for &a in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..r - 1 {
            x = mulmod(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn vp_biguint(x: &BigUint, p: u64) -> (u32, BigUint) {
    debug_assert!(!x.is_zero());
    let pb = BigUint::from(p);
    let mut v = 0u32;
    let mut rest = x.clone();
    loop {
        let (q, r) = rest.div_rem(&pb);
        if r.is_zero() {
            v += 1;
            rest = q;
        } else {
            return (v, rest);
        }
    }
}

fn mod_inverse(a: &BigUint, m: &BigUint) -> Option<BigUint> {
    let a = BigInt::from(a.clone());
    let m_int = BigInt::from(m.clone());
    let e = a.extended_gcd(&m_int);
    if !e.gcd.is_one() {
        return None;
    }
    let mut x = e.x % &m_int;
    if x.is_negative() {
        x += &m_int;
    }
    Some(x.to_biguint().expect("reduced residue is nonnegative"))
}

impl PadicNumber {
    pub fn zero(p: u64) -> Self {
        PadicNumber { p, form: Form::Zero }
    }

    /// A value known only to lie in `p^min_val * Z_p`.
    pub fn zero_at_prec(p: u64, min_val: i64) -> Self {
        PadicNumber { p, form: Form::ZeroAtPrec { min_val } }
    }

    /// Build from raw parts; `unit` is reduced mod `p^prec` and any p-power
    /// it contains is shifted into the valuation.
    pub fn from_unit(p: u64, val: i64, unit: BigUint, prec: u32) -> Result<Self> {
        if prec == 0 {
            return Err(Error::PrecisionExhausted("precision must be positive".into()));
        }
        let modulus = p_pow(p, prec);
        let reduced = unit % &modulus;
        if reduced.is_zero() {
            return Ok(PadicNumber { p, form: Form::ZeroAtPrec { min_val: val + prec as i64 } });
        }
        let (shift, u) = vp_biguint(&reduced, p);
        if shift >= prec {
            return Ok(PadicNumber { p, form: Form::ZeroAtPrec { min_val: val + prec as i64 } });
        }
        let new_prec = prec - shift;
        Ok(PadicNumber {
            p,
            form: Form::Unit { val: val + shift as i64, unit: u % p_pow(p, new_prec), prec: new_prec },
        })
    }

    pub fn from_integer(n: i64, p: u64, prec: u32) -> Result<Self> {
        Self::from_rational(&BigInt::from(n), &BigInt::one(), p, prec)
    }

    /// Canonical representative of `numer/denom` to relative precision `prec`.
    pub fn from_rational(numer: &BigInt, denom: &BigInt, p: u64, prec: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidPrime(p));
        }
        if denom.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if prec == 0 {
            return Err(Error::PrecisionExhausted("precision must be positive".into()));
        }
        if numer.is_zero() {
            return Ok(Self::zero(p));
        }
        let (vn, un) = vp_biguint(numer.magnitude(), p);
        let (vd, ud) = vp_biguint(denom.magnitude(), p);
        let modulus = p_pow(p, prec);
        let mut u = un % &modulus;
        let inv = mod_inverse(&(ud % &modulus), &modulus).expect("denominator unit part is coprime to p");
        u = (u * inv) % &modulus;
        if numer.sign() == Sign::Minus && !u.is_zero() {
            u = &modulus - u;
        }
        if denom.sign() == Sign::Minus && !u.is_zero() {
            u = &modulus - u;
        }
        Ok(PadicNumber {
            p,
            form: Form::Unit { val: vn as i64 - vd as i64, unit: u, prec },
        })
    }

    pub fn one(p: u64, prec: u32) -> Self {
        PadicNumber { p, form: Form::Unit { val: 0, unit: BigUint::one(), prec } }
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn is_exact_zero(&self) -> bool {
        matches!(self.form, Form::Zero)
    }

    pub fn is_zero_at_prec(&self) -> bool {
        matches!(self.form, Form::ZeroAtPrec { .. })
    }

    /// `Some(true)`: definitely zero; `Some(false)`: definitely nonzero;
    /// `None`: unknown at this precision.
    pub fn is_zero_decided(&self) -> Option<bool> {
        match self.form {
            Form::Zero => Some(true),
            Form::ZeroAtPrec { .. } => None,
            Form::Unit { .. } => Some(false),
        }
    }

    /// Valuation when it is known exactly.
    pub fn known_val(&self) -> Option<i64> {
        match self.form {
            Form::Unit { val, .. } => Some(val),
            _ => None,
        }
    }

    /// A certified lower bound on the valuation; `None` means +inf.
    pub fn val_lower_bound(&self) -> Option<i64> {
        match self.form {
            Form::Zero => None,
            Form::ZeroAtPrec { min_val } => Some(min_val),
            Form::Unit { val, .. } => Some(val),
        }
    }

    pub fn relative_prec(&self) -> Option<u32> {
        match self.form {
            Form::Unit { prec, .. } => Some(prec),
            _ => None,
        }
    }

    pub fn unit_part(&self) -> Option<&BigUint> {
        match &self.form {
            Form::Unit { unit, .. } => Some(unit),
            _ => None,
        }
    }

    pub fn norm_info(&self) -> NormInfo {
        match self.form {
            Form::Zero => NormInfo::Zero,
            Form::ZeroAtPrec { min_val } => NormInfo::AtMost(min_val),
            Form::Unit { val, .. } => NormInfo::Exact(val),
        }
    }

    /// `Some(true)` iff the value certainly lies in Z_p.
    pub fn is_integral(&self) -> Option<bool> {
        match self.form {
            Form::Zero => Some(true),
            Form::ZeroAtPrec { min_val } => {
                if min_val >= 0 {
                    Some(true)
                } else {
                    None
                }
            }
            Form::Unit { val, .. } => Some(val >= 0),
        }
    }

    /// Exact norm |x| = p^{-v} as a rational; errors when only a bound is
    /// known.
    pub fn abs(&self) -> Result<BigRational> {
        match self.form {
            Form::Zero => Ok(BigRational::zero()),
            Form::ZeroAtPrec { min_val } => Err(Error::PrecisionExhausted(format!(
                "norm only bounded by {}^-{}",
                self.p, min_val
            ))),
            Form::Unit { val, .. } => Ok(norm_rational(self.p, val)),
        }
    }

    /// Certified upper bound on |x|.
    pub fn abs_bound(&self) -> BigRational {
        match self.form {
            Form::Zero => BigRational::zero(),
            Form::ZeroAtPrec { min_val } => norm_rational(self.p, min_val),
            Form::Unit { val, .. } => norm_rational(self.p, val),
        }
    }

    fn check_prime(&self, other: &Self) -> Result<()> {
        if self.p != other.p {
            return Err(Error::PrimeMismatch(self.p, other.p));
        }
        Ok(())
    }

    pub fn neg(&self) -> Self {
        match &self.form {
            Form::Unit { val, unit, prec } => {
                let m = p_pow(self.p, *prec);
                PadicNumber {
                    p: self.p,
                    form: Form::Unit { val: *val, unit: &m - unit, prec: *prec },
                }
            }
            _ => self.clone(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_prime(other)?;
        let p = self.p;
        let out = match (&self.form, &other.form) {
            (Form::Zero, _) => other.clone(),
            (_, Form::Zero) => self.clone(),
            (Form::ZeroAtPrec { min_val: m1 }, Form::ZeroAtPrec { min_val: m2 }) => {
                Self::zero_at_prec(p, (*m1).min(*m2))
            }
            (Form::ZeroAtPrec { min_val }, Form::Unit { val, unit, prec })
            | (Form::Unit { val, unit, prec }, Form::ZeroAtPrec { min_val }) => {
                if *min_val > *val {
                    let new_prec = (*prec).min((min_val - val) as u32);
                    PadicNumber {
                        p,
                        form: Form::Unit {
                            val: *val,
                            unit: unit % p_pow(p, new_prec),
                            prec: new_prec,
                        },
                    }
                } else {
                    Self::zero_at_prec(p, *min_val)
                }
            }
            (
                Form::Unit { val: v1, unit: u1, prec: k1 },
                Form::Unit { val: v2, unit: u2, prec: k2 },
            ) => {
                let (v1, u1, k1, v2, u2, k2) = if v1 <= v2 {
                    (*v1, u1, *k1, *v2, u2, *k2)
                } else {
                    (*v2, u2, *k2, *v1, u1, *k1)
                };
                let abs_prec = (v1 + k1 as i64).min(v2 + k2 as i64);
                let k = (abs_prec - v1) as u32;
                let m = p_pow(p, k);
                let shift = (v2 - v1) as u64;
                let sum = if shift >= k as u64 {
                    u1 % &m
                } else {
                    (u1 + u2 * p_pow(p, shift as u32)) % &m
                };
                return PadicNumber::from_unit(p, v1, sum, k);
            }
        };
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_prime(other)?;
        let p = self.p;
        let out = match (&self.form, &other.form) {
            (Form::Zero, _) | (_, Form::Zero) => Self::zero(p),
            (Form::ZeroAtPrec { min_val: m1 }, Form::ZeroAtPrec { min_val: m2 }) => {
                Self::zero_at_prec(p, m1 + m2)
            }
            (Form::ZeroAtPrec { min_val }, Form::Unit { val, .. })
            | (Form::Unit { val, .. }, Form::ZeroAtPrec { min_val }) => {
                Self::zero_at_prec(p, min_val + val)
            }
            (
                Form::Unit { val: v1, unit: u1, prec: k1 },
                Form::Unit { val: v2, unit: u2, prec: k2 },
            ) => {
                let k = (*k1).min(*k2);
                let m = p_pow(p, k);
                PadicNumber {
                    p,
                    form: Form::Unit { val: v1 + v2, unit: (u1 * u2) % m, prec: k },
                }
            }
        };
        Ok(out)
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.check_prime(other)?;
        let p = self.p;
        match (&self.form, &other.form) {
            (_, Form::Zero) => Err(Error::DivisionByZero),
            (_, Form::ZeroAtPrec { .. }) => Err(Error::PrecisionExhausted(
                "divisor is indistinguishable from zero".into(),
            )),
            (Form::Zero, _) => Ok(Self::zero(p)),
            (Form::ZeroAtPrec { min_val }, Form::Unit { val, .. }) => {
                Ok(Self::zero_at_prec(p, min_val - val))
            }
            (
                Form::Unit { val: v1, unit: u1, prec: k1 },
                Form::Unit { val: v2, unit: u2, prec: k2 },
            ) => {
                let k = (*k1).min(*k2);
                let m = p_pow(p, k);
                let inv = mod_inverse(&(u2 % &m), &m).expect("unit part is invertible");
                Ok(PadicNumber {
                    p,
                    form: Form::Unit { val: v1 - v2, unit: (u1 * inv) % m, prec: k },
                })
            }
        }
    }

    pub fn pow(&self, n: i64) -> Result<Self> {
        let p = self.p;
        if n == 0 {
            return Ok(Self::one(p, self.relative_prec().unwrap_or(DEFAULT_PREC)));
        }
        match &self.form {
            Form::Zero => {
                if n > 0 {
                    Ok(Self::zero(p))
                } else {
                    Err(Error::DivisionByZero)
                }
            }
            Form::ZeroAtPrec { min_val } => {
                if n > 0 {
                    Ok(Self::zero_at_prec(p, min_val * n))
                } else {
                    Err(Error::PrecisionExhausted(
                        "negative power of a value indistinguishable from zero".into(),
                    ))
                }
            }
            Form::Unit { val, unit, prec } => {
                let m = p_pow(p, *prec);
                let e = BigUint::from(n.unsigned_abs());
                let mut u = unit.modpow(&e, &m);
                if n < 0 {
                    u = mod_inverse(&u, &m).expect("unit part is invertible");
                }
                Ok(PadicNumber { p, form: Form::Unit { val: val * n, unit: u, prec: *prec } })
            }
        }
    }

    /// Multiply by p^k.
    pub fn shift(&self, k: i64) -> Self {
        let form = match &self.form {
            Form::Zero => Form::Zero,
            Form::ZeroAtPrec { min_val } => Form::ZeroAtPrec { min_val: min_val + k },
            Form::Unit { val, unit, prec } => {
                Form::Unit { val: val + k, unit: unit.clone(), prec: *prec }
            }
        };
        PadicNumber { p: self.p, form }
    }

    /// True iff the two tracked cosets intersect (consistency at the joint
    /// precision). This is the right notion of test equality for values
    /// computed along different routes.
    pub fn agrees(&self, other: &Self) -> bool {
        if self.p != other.p {
            return false;
        }
        match self.sub(other) {
            Ok(d) => d.is_zero_decided() != Some(false),
            Err(_) => false,
        }
    }

    /// Compare |self| and |other| when the precision permits.
    pub fn cmp_abs(&self, other: &Self) -> Option<Ordering> {
        use NormInfo::*;
        match (self.norm_info(), other.norm_info()) {
            (Zero, Zero) => Some(Ordering::Equal),
            (Zero, Exact(_)) => Some(Ordering::Less),
            (Exact(_), Zero) => Some(Ordering::Greater),
            (Exact(a), Exact(b)) => Some(b.cmp(&a)),
            (AtMost(m), Exact(v)) => {
                if m > v {
                    Some(Ordering::Less)
                } else {
                    None
                }
            }
            (Exact(v), AtMost(m)) => {
                if m > v {
                    Some(Ordering::Greater)
                } else {
                    None
                }
            }
            (Zero, AtMost(_)) | (AtMost(_), Zero) | (AtMost(_), AtMost(_)) => None,
        }
    }

    /// Canonical residue mod p^target for an integral value.
    pub fn to_residue(&self, target: u32) -> Result<BigUint> {
        match &self.form {
            Form::Zero => Ok(BigUint::zero()),
            Form::ZeroAtPrec { min_val } => {
                if *min_val >= target as i64 {
                    Ok(BigUint::zero())
                } else if *min_val < 0 {
                    Err(Error::NotIntegral)
                } else {
                    Err(Error::PrecisionExhausted(format!(
                        "residue mod {}^{} requested from a value known mod {}^{}",
                        self.p, target, self.p, min_val
                    )))
                }
            }
            Form::Unit { val, unit, prec } => {
                if *val < 0 {
                    return Err(Error::NotIntegral);
                }
                if *val >= target as i64 {
                    return Ok(BigUint::zero());
                }
                let needed = target - *val as u32;
                if *prec < needed {
                    return Err(Error::PrecisionExhausted(format!(
                        "residue mod {}^{} requested from {} digits",
                        self.p, target, prec
                    )));
                }
                Ok((unit % p_pow(self.p, needed)) * p_pow(self.p, *val as u32))
            }
        }
    }

    /// Lift a residue class mod p^prec back to a tracked value.
    pub fn from_residue(p: u64, r: &BigUint, prec: u32) -> Self {
        if r.is_zero() {
            return Self::zero_at_prec(p, prec as i64);
        }
        Self::from_unit(p, 0, r.clone(), prec).expect("positive precision")
    }

    pub fn to_json(&self) -> Value {
        match &self.form {
            Form::Zero => json!({"p": self.p, "val": "inf"}),
            Form::ZeroAtPrec { min_val } => {
                json!({"p": self.p, "val": min_val, "zero_at_precision": true})
            }
            Form::Unit { val, unit, prec } => {
                json!({"p": self.p, "val": val, "unit": unit.to_string(), "prec": prec})
            }
        }
    }

    /// Parse the JSON literal form, a rational shorthand string `"a/b"` or
    /// `"n"`, or a plain integer. `p`/`prec` supply the ambient context for
    /// the shorthand forms.
    pub fn from_json(v: &Value, p: u64, prec: u32) -> Result<Self> {
        match v {
            Value::Number(n) => {
                let i = n
                    .as_i64()
                    .ok_or_else(|| Error::ParseError(format!("not an integer: {}", n)))?;
                Self::from_integer(i, p, prec)
            }
            Value::String(s) => Self::parse_rational_str(s, p, prec),
            Value::Object(map) => {
                let p_field = map
                    .get("p")
                    .and_then(|x| x.as_u64())
                    .ok_or_else(|| Error::ParseError("missing prime field".into()))?;
                match map.get("val") {
                    Some(Value::String(s)) if s == "inf" => Ok(Self::zero(p_field)),
                    Some(Value::Number(n)) => {
                        let val = n
                            .as_i64()
                            .ok_or_else(|| Error::ParseError("bad valuation".into()))?;
                        if map.get("zero_at_precision").and_then(|x| x.as_bool()) == Some(true) {
                            return Ok(Self::zero_at_prec(p_field, val));
                        }
                        let unit_s = map
                            .get("unit")
                            .and_then(|x| x.as_str())
                            .ok_or_else(|| Error::ParseError("missing unit field".into()))?;
                        let unit = unit_s
                            .parse::<BigUint>()
                            .map_err(|e| Error::ParseError(format!("bad unit: {e}")))?;
                        let prec_field = map
                            .get("prec")
                            .and_then(|x| x.as_u64())
                            .ok_or_else(|| Error::ParseError("missing prec field".into()))?
                            as u32;
                        if !is_prime(p_field) {
                            return Err(Error::InvalidPrime(p_field));
                        }
                        Self::from_unit(p_field, val, unit, prec_field)
                    }
                    _ => Err(Error::ParseError("missing or malformed val field".into())),
                }
            }
            _ => Err(Error::ParseError(format!("cannot read a p-adic value from {v}"))),
        }
    }

    pub fn parse_rational_str(s: &str, p: u64, prec: u32) -> Result<Self> {
        let s = s.trim();
        let (num_s, den_s) = match s.split_once('/') {
            Some((a, b)) => (a.trim(), b.trim()),
            None => (s, "1"),
        };
        let numer = num_s
            .parse::<BigInt>()
            .map_err(|e| Error::ParseError(format!("bad numerator {num_s:?}: {e}")))?;
        let denom = den_s
            .parse::<BigInt>()
            .map_err(|e| Error::ParseError(format!("bad denominator {den_s:?}: {e}")))?;
        Self::from_rational(&numer, &denom, p, prec)
    }
}

pub(crate) fn norm_rational(p: u64, val: i64) -> BigRational {
    if val >= 0 {
        BigRational::new(BigInt::one(), BigInt::from(p_pow(p, val as u32)))
    } else {
        BigRational::new(BigInt::from(p_pow(p, (-val) as u32)), BigInt::one())
    }
}

/// A primitive root of unity of the given order in Z_p, computed by lifting
/// a residue of that order; requires `order | p - 1`.
pub fn root_of_unity(p: u64, order: u32, prec: u32) -> Result<PadicNumber> {
    if !is_prime(p) {
        return Err(Error::InvalidPrime(p));
    }
    if order == 0 || (p - 1) % order as u64 != 0 {
        return Err(Error::Unsupported(format!(
            "no primitive root of unity of order {order} in Q_{p}"
        )));
    }
    if order == 1 {
        return Ok(PadicNumber::one(p, prec));
    }
    let mulmod = |a: u64, b: u64| ((a as u128 * b as u128) % p as u128) as u64;
    let powmod = |mut b: u64, mut e: u64| {
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = mulmod(acc, b);
            }
            b = mulmod(b, b);
            e >>= 1;
        }
        acc
    };
    let exact_order = |x: u64| {
        let mut k = 1u32;
        let mut acc = x;
        while acc != 1 {
            acc = mulmod(acc, x);
            k += 1;
        }
        k
    };
    let mut base = 0u64;
    for c in 2..p {
        let x = powmod(c, (p - 1) / order as u64);
        if x != 1 && exact_order(x) == order {
            base = x;
            break;
        }
    }
    if base == 0 {
        return Err(Error::Unsupported(format!("no residue of order {order} mod {p}")));
    }
    // Newton iteration on X^order - 1; the derivative is a unit, so each
    // step doubles the number of correct digits.
    let modulus = p_pow(p, prec);
    let ord = BigUint::from(order);
    let mut x = BigUint::from(base);
    for _ in 0..(32 - prec.leading_zeros()) + 2 {
        let f = (x.modpow(&ord, &modulus) + &modulus - BigUint::one()) % &modulus;
        let df = (&ord * x.modpow(&(&ord - BigUint::one()), &modulus)) % &modulus;
        let inv = mod_inverse(&df, &modulus).expect("derivative is a unit");
        x = (&x + &modulus - (f * inv) % &modulus) % &modulus;
    }
    PadicNumber::from_unit(p, 0, x, prec)
}

impl fmt::Display for PadicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.form {
            Form::Zero => write!(f, "0"),
            Form::ZeroAtPrec { min_val } => write!(f, "O({}^{})", self.p, min_val),
            Form::Unit { val, unit, prec } => {
                if *val == 0 {
                    write!(f, "{} + O({}^{})", unit, self.p, val + *prec as i64)
                } else {
                    write!(f, "{}^{}*{} + O({}^{})", self.p, val, unit, self.p, val + *prec as i64)
                }
            }
        }
    }
}
