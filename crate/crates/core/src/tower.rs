//! Profinite groups and profinite spaces presented as towers of finite
//! levels with surjective transition maps.
//!
//! Supported towers: the additive group Z_p (level n = Z/p^n), GL_d(Z_p)
//! (level n = GL_d(Z/p^n)), constant towers of finite groups given by a
//! multiplication table, and the space of normalized lower-triangular
//! representatives K^- in dimension 2 or 3 (no group structure). Level data
//! is enumerated lazily and memoized behind a lock so towers can be shared
//! across threads.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::padic::is_prime;

/// Hard refusal threshold for level enumeration.
pub const DEFAULT_LEVEL_CAP: u64 = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TowerKind {
    ZpAdditive { p: u64 },
    GlZp { d: usize, p: u64 },
    Finite { table: Vec<Vec<usize>> },
    KminusSpace { n: usize, p: u64 },
}

/// Canonical representation of one level element: a vector of residues
/// (a single residue for Z_p levels, a row-major entry list for matrix
/// towers, a bare index for finite groups).
type ElemRepr = Vec<u64>;

struct LevelData {
    elems: Vec<ElemRepr>,
    index: HashMap<ElemRepr, usize>,
    identity: Option<usize>,
}

pub struct QuotientTower {
    kind: TowerKind,
    cap: u64,
    levels: RwLock<HashMap<u32, Arc<LevelData>>>,
}

impl PartialEq for QuotientTower {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

impl std::fmt::Debug for QuotientTower {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "QuotientTower({:?})", self.kind)
    }
}

fn pow_checked(p: u64, e: u32, cap: u64) -> Option<u64> {
    let mut acc: u64 = 1;
    for _ in 0..e {
        acc = acc.checked_mul(p)?;
        if acc > cap.saturating_mul(16) {
            return None;
        }
    }
    Some(acc)
}

impl QuotientTower {
    pub fn zp_additive(p: u64) -> Result<Arc<Self>> {
        if !is_prime(p) {
            return Err(Error::InvalidPrime(p));
        }
        Ok(Arc::new(QuotientTower {
            kind: TowerKind::ZpAdditive { p },
            cap: DEFAULT_LEVEL_CAP,
            levels: RwLock::new(HashMap::new()),
        }))
    }

    pub fn gl_zp(d: usize, p: u64) -> Result<Arc<Self>> {
        if !is_prime(p) {
            return Err(Error::InvalidPrime(p));
        }
        if d == 0 || d > 4 {
            return Err(Error::Unsupported(format!("GL_{d} tower not supported")));
        }
        Ok(Arc::new(QuotientTower {
            kind: TowerKind::GlZp { d, p },
            cap: DEFAULT_LEVEL_CAP,
            levels: RwLock::new(HashMap::new()),
        }))
    }

    /// Constant tower of a finite group given by its multiplication table;
    /// the table is validated for associativity, identity, and inverses.
    pub fn finite(table: Vec<Vec<usize>>) -> Result<Arc<Self>> {
        let n = table.len();
        if n == 0 {
            return Err(Error::NotAGroup("empty table".into()));
        }
        for row in &table {
            if row.len() != n || row.iter().any(|&x| x >= n) {
                return Err(Error::NotAGroup("table is not square over 0..n".into()));
            }
        }
        let mut identity = None;
        for e in 0..n {
            if (0..n).all(|a| table[e][a] == a && table[a][e] == a) {
                identity = Some(e);
                break;
            }
        }
        let e = identity.ok_or_else(|| Error::NotAGroup("no identity element".into()))?;
        for a in 0..n {
            if !(0..n).any(|b| table[a][b] == e) {
                return Err(Error::NotAGroup(format!("element {a} has no inverse")));
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(Error::NotAGroup(format!(
                            "associativity fails at ({a},{b},{c})"
                        )));
                    }
                }
            }
        }
        Ok(Arc::new(QuotientTower {
            kind: TowerKind::Finite { table },
            cap: DEFAULT_LEVEL_CAP,
            levels: RwLock::new(HashMap::new()),
        }))
    }

    /// The profinite space of normalized lower-triangular representatives in
    /// dimension 2 or 3; no group structure.
    pub fn kminus(n: usize, p: u64) -> Result<Arc<Self>> {
        if !is_prime(p) {
            return Err(Error::InvalidPrime(p));
        }
        if n != 2 && n != 3 {
            return Err(Error::Unsupported(format!(
                "K^- levels only modeled for dimensions 2 and 3, got {n}"
            )));
        }
        Ok(Arc::new(QuotientTower {
            kind: TowerKind::KminusSpace { n, p },
            cap: DEFAULT_LEVEL_CAP,
            levels: RwLock::new(HashMap::new()),
        }))
    }

    pub fn from_json(v: &Value) -> Result<Arc<Self>> {
        let kind = v
            .get("kind")
            .and_then(|x| x.as_str())
            .ok_or_else(|| Error::ParseError("tower descriptor needs a kind".into()))?;
        match kind {
            "zp" => {
                let p = v
                    .get("p")
                    .and_then(|x| x.as_u64())
                    .ok_or_else(|| Error::ParseError("zp tower needs p".into()))?;
                Self::zp_additive(p)
            }
            "gl" => {
                let p = v
                    .get("p")
                    .and_then(|x| x.as_u64())
                    .ok_or_else(|| Error::ParseError("gl tower needs p".into()))?;
                let d = v
                    .get("d")
                    .and_then(|x| x.as_u64())
                    .ok_or_else(|| Error::ParseError("gl tower needs d".into()))?;
                Self::gl_zp(d as usize, p)
            }
            "finite" => {
                let table = v
                    .get("table")
                    .and_then(|x| x.as_array())
                    .ok_or_else(|| Error::ParseError("finite tower needs a table".into()))?;
                let mut rows = Vec::new();
                for row in table {
                    let cells = row
                        .as_array()
                        .ok_or_else(|| Error::ParseError("table row must be an array".into()))?;
                    let mut out = Vec::new();
                    for c in cells {
                        out.push(
                            c.as_u64()
                                .ok_or_else(|| Error::ParseError("table entry must be an index".into()))?
                                as usize,
                        );
                    }
                    rows.push(out);
                }
                Self::finite(rows)
            }
            "kminus" => {
                let p = v
                    .get("p")
                    .and_then(|x| x.as_u64())
                    .ok_or_else(|| Error::ParseError("kminus tower needs p".into()))?;
                let n = v
                    .get("n")
                    .and_then(|x| x.as_u64())
                    .ok_or_else(|| Error::ParseError("kminus tower needs n".into()))?;
                Self::kminus(n as usize, p)
            }
            other => Err(Error::ParseError(format!("unknown tower kind {other:?}"))),
        }
    }

    pub fn descriptor(&self) -> Value {
        match &self.kind {
            TowerKind::ZpAdditive { p } => json!({"kind": "zp", "p": p}),
            TowerKind::GlZp { d, p } => json!({"kind": "gl", "d": d, "p": p}),
            TowerKind::Finite { table } => json!({"kind": "finite", "table": table}),
            TowerKind::KminusSpace { n, p } => json!({"kind": "kminus", "n": n, "p": p}),
        }
    }

    pub fn kind(&self) -> &TowerKind {
        &self.kind
    }

    /// Same tower with a different enumeration cap and a fresh cache.
    pub fn with_cap(&self, cap: u64) -> Arc<Self> {
        Arc::new(QuotientTower {
            kind: self.kind.clone(),
            cap,
            levels: RwLock::new(HashMap::new()),
        })
    }

    pub fn cap(&self) -> u64 {
        self.cap
    }

    pub fn is_group(&self) -> bool {
        !matches!(self.kind, TowerKind::KminusSpace { .. })
    }

    /// The prime of the tower's residue structure, when it has one.
    pub fn tower_prime(&self) -> Option<u64> {
        match self.kind {
            TowerKind::ZpAdditive { p }
            | TowerKind::GlZp { p, .. }
            | TowerKind::KminusSpace { p, .. } => Some(p),
            TowerKind::Finite { .. } => None,
        }
    }

    /// Number of elements at a level, computed by formula (no enumeration).
    pub fn level_size(&self, level: u32) -> Result<u64> {
        let too_large = |what: String| Error::LevelTooLarge(what);
        match &self.kind {
            TowerKind::ZpAdditive { p } => pow_checked(*p, level, self.cap)
                .filter(|&s| s <= self.cap)
                .ok_or_else(|| too_large(format!("Z_{p} level {level}"))),
            TowerKind::GlZp { d, p } => {
                if level == 0 {
                    return Ok(1);
                }
                let d32 = *d as u32;
                let base = pow_checked(*p, d32, u64::MAX / 2)
                    .ok_or_else(|| too_large(format!("GL_{d}(Z/{p}^{level})")))?;
                let mut gl_fp: u64 = 1;
                let mut pk: u64 = 1;
                for _ in 0..d32 {
                    gl_fp = gl_fp
                        .checked_mul(base - pk)
                        .ok_or_else(|| too_large(format!("GL_{d}(Z/{p}^{level})")))?;
                    pk = pk
                        .checked_mul(*p)
                        .ok_or_else(|| too_large(format!("GL_{d}(Z/{p}^{level})")))?;
                }
                let lift = pow_checked(*p, (level - 1) * d32 * d32, u64::MAX / 2)
                    .ok_or_else(|| too_large(format!("GL_{d}(Z/{p}^{level})")))?;
                let total = gl_fp
                    .checked_mul(lift)
                    .ok_or_else(|| too_large(format!("GL_{d}(Z/{p}^{level})")))?;
                if total > self.cap {
                    return Err(too_large(format!("GL_{d}(Z/{p}^{level}) has {total} elements")));
                }
                Ok(total)
            }
            TowerKind::Finite { table } => Ok(table.len() as u64),
            TowerKind::KminusSpace { n, p } => {
                if level == 0 {
                    return Err(Error::BadElement("K^- levels start at 1".into()));
                }
                let pm = pow_checked(*p, level, self.cap).ok_or_else(|| too_large("K^-".into()))?;
                let pm1 = pm / p;
                let row2 = pm + pm1;
                let total = if *n == 2 {
                    row2
                } else {
                    let row3 = pm
                        .checked_mul(pm)
                        .and_then(|a| a.checked_add(pm.checked_mul(pm1)?))
                        .and_then(|a| a.checked_add(pm1.checked_mul(pm1)?))
                        .ok_or_else(|| too_large("K^-".into()))?;
                    row2.checked_mul(row3).ok_or_else(|| too_large("K^-".into()))?
                };
                if total > self.cap {
                    return Err(too_large(format!("K^- level {level} has {total} classes")));
                }
                Ok(total)
            }
        }
    }

    fn level_data(&self, level: u32) -> Result<Arc<LevelData>> {
        if let Some(d) = self.levels.read().expect("tower cache lock").get(&level) {
            return Ok(d.clone());
        }
        let size = self.level_size(level)?;
        let data = Arc::new(self.enumerate_level(level, size)?);
        self.levels
            .write()
            .expect("tower cache lock")
            .insert(level, data.clone());
        Ok(data)
    }

    fn enumerate_level(&self, level: u32, expected: u64) -> Result<LevelData> {
        let mut elems: Vec<ElemRepr> = Vec::with_capacity(expected as usize);
        match &self.kind {
            TowerKind::ZpAdditive { .. } => {
                for r in 0..expected {
                    elems.push(vec![r]);
                }
            }
            TowerKind::Finite { table } => {
                for i in 0..table.len() {
                    elems.push(vec![i as u64]);
                }
            }
            TowerKind::GlZp { d, p } => {
                let dd = d * d;
                if level == 0 {
                    // the trivial quotient: one class, represented by the
                    // zero residue matrix mod 1
                    elems.push(vec![0u64; dd]);
                    let mut index = HashMap::new();
                    index.insert(vec![0u64; dd], 0usize);
                    return Ok(LevelData { elems, index, identity: Some(0) });
                }
                let m = pow_checked(*p, level, u64::MAX / 2).expect("size checked");
                let mut cur = vec![0u64; dd];
                loop {
                    if det_unit_mod_p(&cur, *d, *p) {
                        elems.push(cur.clone());
                    }
                    // Lexicographic increment over (Z/p^level)^{d*d}.
                    let mut i = dd;
                    loop {
                        if i == 0 {
                            break;
                        }
                        i -= 1;
                        cur[i] += 1;
                        if cur[i] < m {
                            break;
                        }
                        cur[i] = 0;
                        if i == 0 {
                            i = usize::MAX;
                            break;
                        }
                    }
                    if i == usize::MAX {
                        break;
                    }
                }
            }
            TowerKind::KminusSpace { n, p } => {
                let m = pow_checked(*p, level, u64::MAX / 2).expect("size checked");
                let row_shapes = |len: usize| -> Vec<Vec<Vec<u64>>> {
                    // All normalized forms of a lower-triangular row with
                    // `len` potentially nonzero leading entries: the pivot
                    // column holds an exact 1, entries to its right are in
                    // p Z_p, entries to its left are unrestricted integral.
                    let mut shapes = Vec::new();
                    for pivot in (0..len).rev() {
                        let mut rows: Vec<Vec<u64>> = vec![Vec::new()];
                        for col in 0..len {
                            let choices: Vec<u64> = if col == pivot {
                                vec![1]
                            } else if col < pivot {
                                (0..m).collect()
                            } else {
                                (0..m / p).map(|t| t * p).collect()
                            };
                            let mut next = Vec::with_capacity(rows.len() * choices.len());
                            for r in &rows {
                                for &ch in &choices {
                                    let mut rr = r.clone();
                                    rr.push(ch);
                                    next.push(rr);
                                }
                            }
                            rows = next;
                        }
                        shapes.push(rows);
                    }
                    shapes
                };
                let full_row = |prefix: &[u64], n: usize| -> Vec<u64> {
                    let mut r = prefix.to_vec();
                    r.resize(n, 0);
                    r
                };
                if *n == 2 {
                    for shapes in row_shapes(2) {
                        for r2 in shapes {
                            let mut e = vec![1, 0];
                            e.extend(full_row(&r2, 2));
                            elems.push(e);
                        }
                    }
                } else {
                    let shapes2: Vec<Vec<u64>> = row_shapes(2).into_iter().flatten().collect();
                    let shapes3: Vec<Vec<u64>> = row_shapes(3).into_iter().flatten().collect();
                    for r2 in &shapes2 {
                        for r3 in &shapes3 {
                            let mut e = vec![1, 0, 0];
                            e.extend(full_row(r2, 3));
                            e.extend(full_row(r3, 3));
                            elems.push(e);
                        }
                    }
                }
            }
        }
        debug_assert_eq!(elems.len() as u64, expected);
        let mut index = HashMap::with_capacity(elems.len());
        for (i, e) in elems.iter().enumerate() {
            index.insert(e.clone(), i);
        }
        let identity = match &self.kind {
            TowerKind::ZpAdditive { .. } => Some(0),
            TowerKind::Finite { table } => {
                let n = table.len();
                (0..n).find(|&e| (0..n).all(|a| table[e][a] == a && table[a][e] == a))
            }
            TowerKind::GlZp { d, p } => {
                let m = pow_checked(*p, level, u64::MAX / 2).expect("size checked");
                let mut id = vec![0u64; d * d];
                for i in 0..*d {
                    id[i * d + i] = 1 % m;
                }
                index.get(&id).copied()
            }
            TowerKind::KminusSpace { .. } => None,
        };
        Ok(LevelData { elems, index, identity })
    }

    pub fn elements(&self, level: u32) -> Result<Vec<usize>> {
        let d = self.level_data(level)?;
        Ok((0..d.elems.len()).collect())
    }

    pub fn element_count(&self, level: u32) -> Result<usize> {
        Ok(self.level_data(level)?.elems.len())
    }

    pub fn repr(&self, level: u32, idx: usize) -> Result<ElemRepr> {
        let d = self.level_data(level)?;
        d.elems
            .get(idx)
            .cloned()
            .ok_or_else(|| Error::BadElement(format!("index {idx} out of range at level {level}")))
    }

    pub fn index_of(&self, level: u32, repr: &[u64]) -> Result<usize> {
        let d = self.level_data(level)?;
        d.index
            .get(repr)
            .copied()
            .ok_or_else(|| Error::BadElement(format!("{repr:?} is not a level-{level} element")))
    }

    pub fn identity(&self, level: u32) -> Result<usize> {
        let d = self.level_data(level)?;
        d.identity.ok_or(Error::NoGroupStructure)
    }

    pub fn mul(&self, level: u32, a: usize, b: usize) -> Result<usize> {
        if !self.is_group() {
            return Err(Error::NoGroupStructure);
        }
        let data = self.level_data(level)?;
        let ra = data
            .elems
            .get(a)
            .ok_or_else(|| Error::BadElement(format!("index {a}")))?;
        let rb = data
            .elems
            .get(b)
            .ok_or_else(|| Error::BadElement(format!("index {b}")))?;
        match &self.kind {
            TowerKind::ZpAdditive { p } => {
                let m = pow_checked(*p, level, u64::MAX / 2).expect("size checked");
                Ok(((ra[0] + rb[0]) % m) as usize)
            }
            TowerKind::Finite { table } => Ok(table[ra[0] as usize][rb[0] as usize]),
            TowerKind::GlZp { d, p } => {
                if level == 0 {
                    return Ok(0);
                }
                let m = pow_checked(*p, level, u64::MAX / 2).expect("size checked");
                let prod = mat_mul_mod(ra, rb, *d, m);
                data.index
                    .get(&prod)
                    .copied()
                    .ok_or_else(|| Error::BadElement("product left the level".into()))
            }
            TowerKind::KminusSpace { .. } => unreachable!("guarded by is_group"),
        }
    }

    pub fn inv(&self, level: u32, a: usize) -> Result<usize> {
        if !self.is_group() {
            return Err(Error::NoGroupStructure);
        }
        let data = self.level_data(level)?;
        let ra = data
            .elems
            .get(a)
            .ok_or_else(|| Error::BadElement(format!("index {a}")))?;
        match &self.kind {
            TowerKind::ZpAdditive { p } => {
                let m = pow_checked(*p, level, u64::MAX / 2).expect("size checked");
                Ok(((m - ra[0]) % m) as usize)
            }
            TowerKind::Finite { table } => {
                let e = self.identity(level)?;
                (0..table.len())
                    .find(|&b| table[ra[0] as usize][b] == e)
                    .ok_or_else(|| Error::NotAGroup("missing inverse".into()))
            }
            TowerKind::GlZp { d, p } => {
                if level == 0 {
                    return Ok(0);
                }
                let m = pow_checked(*p, level, u64::MAX / 2).expect("size checked");
                let inv = mat_inv_mod(ra, *d, *p, m)
                    .ok_or_else(|| Error::BadElement("element not invertible".into()))?;
                data.index
                    .get(&inv)
                    .copied()
                    .ok_or_else(|| Error::BadElement("inverse left the level".into()))
            }
            TowerKind::KminusSpace { .. } => unreachable!("guarded by is_group"),
        }
    }

    /// Transition map from level `m` down to level `n <= m`.
    pub fn project(&self, m: u32, n: u32, a: usize) -> Result<usize> {
        if n > m {
            return Err(Error::BadLevelOrder(m, n));
        }
        let src = self.level_data(m)?;
        let ra = src
            .elems
            .get(a)
            .ok_or_else(|| Error::BadElement(format!("index {a}")))?;
        match &self.kind {
            TowerKind::Finite { .. } => Ok(a),
            TowerKind::ZpAdditive { p } | TowerKind::GlZp { p, .. } | TowerKind::KminusSpace { p, .. } => {
                let modulus = pow_checked(*p, n, u64::MAX / 2)
                    .ok_or_else(|| Error::LevelTooLarge("projection target".into()))?;
                let reduced: ElemRepr = ra.iter().map(|&x| x % modulus).collect();
                self.index_of(n, &reduced)
            }
        }
    }

    /// Canonical serialization of a level element, used as a JSON map key.
    pub fn elem_key(&self, level: u32, idx: usize) -> Result<String> {
        let r = self.repr(level, idx)?;
        Ok(r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
    }

    pub fn parse_key(&self, level: u32, key: &str) -> Result<usize> {
        let repr: std::result::Result<ElemRepr, _> =
            key.split(',').map(|s| s.trim().parse::<u64>()).collect();
        let repr = repr.map_err(|e| Error::ParseError(format!("bad element key {key:?}: {e}")))?;
        self.index_of(level, &repr)
    }
}

fn mat_mul_mod(a: &[u64], b: &[u64], d: usize, m: u64) -> Vec<u64> {
    let mut out = vec![0u64; d * d];
    for i in 0..d {
        for j in 0..d {
            let mut acc: u128 = 0;
            for k in 0..d {
                acc += a[i * d + k] as u128 * b[k * d + j] as u128;
            }
            out[i * d + j] = (acc % m as u128) as u64;
        }
    }
    out
}

fn det_unit_mod_p(a: &[u64], d: usize, p: u64) -> bool {
    // Determinant mod p by elimination over F_p.
    let mut m: Vec<u64> = a.iter().map(|&x| x % p).collect();
    let inv_mod_p = |x: u64| -> Option<u64> {
        if x % p == 0 {
            return None;
        }
        let mut acc = 1u64;
        let mut b = x % p;
        let mut e = p - 2;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * b % p;
            }
            b = b * b % p;
            e >>= 1;
        }
        Some(acc)
    };
    for col in 0..d {
        let pivot = (col..d).find(|&r| m[r * d + col] % p != 0);
        let pr = match pivot {
            None => return false,
            Some(r) => r,
        };
        if pr != col {
            for c in 0..d {
                m.swap(pr * d + c, col * d + c);
            }
        }
        let inv = inv_mod_p(m[col * d + col]).expect("pivot is a unit");
        for r in col + 1..d {
            let f = m[r * d + col] * inv % p;
            for c in col..d {
                m[r * d + c] = (m[r * d + c] + p * p - f * m[col * d + c] % p) % p;
            }
        }
    }
    true
}

fn mat_inv_mod(a: &[u64], d: usize, p: u64, m: u64) -> Option<Vec<u64>> {
    // Gauss-Jordan over Z/m. Because det is a unit mod p, a unit pivot can
    // always be found in every column.
    let inv_unit = |x: u64| -> Option<u64> {
        // Extended Euclid over u128 to invert a unit mod m.
        let (mut r0, mut r1) = (m as i128, (x % m) as i128);
        let (mut s0, mut s1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            let r = r0 - q * r1;
            r0 = r1;
            r1 = r;
            let s = s0 - q * s1;
            s0 = s1;
            s1 = s;
        }
        if r0 != 1 {
            return None;
        }
        let mut s = s0 % m as i128;
        if s < 0 {
            s += m as i128;
        }
        Some(s as u64)
    };
    let mut work: Vec<u64> = a.iter().map(|&x| x % m).collect();
    let mut inv = vec![0u64; d * d];
    for i in 0..d {
        inv[i * d + i] = 1 % m;
    }
    for col in 0..d {
        let pr = (col..d).find(|&r| work[r * d + col] % p != 0)?;
        if pr != col {
            for c in 0..d {
                work.swap(pr * d + c, col * d + c);
                inv.swap(pr * d + c, col * d + c);
            }
        }
        let piv_inv = inv_unit(work[col * d + col])?;
        for c in 0..d {
            work[col * d + c] = mulm(work[col * d + c], piv_inv, m);
            inv[col * d + c] = mulm(inv[col * d + c], piv_inv, m);
        }
        for r in 0..d {
            if r == col {
                continue;
            }
            let f = work[r * d + col];
            if f == 0 {
                continue;
            }
            for c in 0..d {
                work[r * d + c] = subm(work[r * d + c], mulm(f, work[col * d + c], m), m);
                inv[r * d + c] = subm(inv[r * d + c], mulm(f, inv[col * d + c], m), m);
            }
        }
    }
    Some(inv)
}

fn mulm(a: u64, b: u64, m: u64) -> u64 {
    (a as u128 * b as u128 % m as u128) as u64
}

fn subm(a: u64, b: u64, m: u64) -> u64 {
    (a + m - b % m) % m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn zp_level_sizes() {
        let t = QuotientTower::zp_additive(3).unwrap();
        assert_eq!(t.level_size(1).unwrap(), 3);
        assert_eq!(t.level_size(2).unwrap(), 9);
        assert_eq!(t.level_size(3).unwrap(), 27);
    }

    #[test]
    fn gl2_f2_has_six_elements() {
        let t = QuotientTower::gl_zp(2, 2).unwrap();
        assert_eq!(t.element_count(1).unwrap(), 6);
        assert_eq!(t.element_count(2).unwrap(), 96);
    }

    #[test]
    fn finite_tower_is_constant() {
        let t = catalog::symmetric_3();
        assert_eq!(t.element_count(1).unwrap(), 6);
        assert_eq!(t.element_count(5).unwrap(), 6);
    }

    #[test]
    fn bad_table_rejected() {
        // 2x2 table without an identity.
        let r = QuotientTower::finite(vec![vec![1, 0], vec![1, 0]]);
        assert!(matches!(r, Err(Error::NotAGroup(_))));
    }

    #[test]
    fn zp_level_mul_and_identity() {
        let t = QuotientTower::zp_additive(3).unwrap();
        assert_eq!(t.mul(2, 4, 7).unwrap(), 2);
        let e = t.identity(2).unwrap();
        for a in t.elements(2).unwrap() {
            assert_eq!(t.mul(2, e, a).unwrap(), a);
        }
    }

    #[test]
    fn gl_level_zero_is_trivial() {
        let t = QuotientTower::gl_zp(2, 3).unwrap();
        assert_eq!(t.element_count(0).unwrap(), 1);
        let e = t.identity(0).unwrap();
        assert_eq!(t.mul(0, e, e).unwrap(), e);
        assert_eq!(t.inv(0, e).unwrap(), e);
        for a in t.elements(1).unwrap() {
            assert_eq!(t.project(1, 0, a).unwrap(), e);
        }
    }

    #[test]
    fn gl_mul_matches_matrix_product() {
        let t = QuotientTower::gl_zp(2, 3).unwrap();
        let a = t.index_of(1, &[1, 1, 0, 1]).unwrap();
        let b = t.index_of(1, &[1, 0, 1, 1]).unwrap();
        let c = t.mul(1, a, b).unwrap();
        assert_eq!(t.repr(1, c).unwrap(), vec![2, 1, 1, 1]);
    }

    #[test]
    fn projection_functorial_and_homomorphic() {
        let t = QuotientTower::zp_additive(2).unwrap();
        assert_eq!(t.project(3, 2, 5).unwrap(), 1);
        for a in t.elements(3).unwrap() {
            assert_eq!(t.project(3, 3, a).unwrap(), a);
            assert_eq!(
                t.project(3, 1, a).unwrap(),
                t.project(2, 1, t.project(3, 2, a).unwrap()).unwrap()
            );
        }
        for a in t.elements(2).unwrap() {
            for b in t.elements(2).unwrap() {
                let ab = t.mul(2, a, b).unwrap();
                assert_eq!(
                    t.project(2, 1, ab).unwrap(),
                    t.mul(1, t.project(2, 1, a).unwrap(), t.project(2, 1, b).unwrap())
                        .unwrap()
                );
            }
        }
        assert!(matches!(t.project(1, 2, 0), Err(Error::BadLevelOrder(1, 2))));
    }

    #[test]
    fn gl_projection_stays_invertible() {
        let t = QuotientTower::gl_zp(2, 3).unwrap();
        for a in t.elements(2).unwrap() {
            let down = t.project(2, 1, a).unwrap();
            assert!(t.inv(1, down).is_ok());
        }
    }

    #[test]
    fn kminus_level_counts() {
        for p in [2u64, 3, 5] {
            let t = QuotientTower::kminus(2, p).unwrap();
            for n in 1..=3u32 {
                let expected = p.pow(n) + p.pow(n - 1);
                assert_eq!(t.element_count(n).unwrap() as u64, expected, "p={p} n={n}");
            }
        }
    }

    #[test]
    fn kminus_has_no_group_structure() {
        let t = QuotientTower::kminus(2, 3).unwrap();
        assert!(matches!(t.mul(1, 0, 0), Err(Error::NoGroupStructure)));
    }

    #[test]
    fn kminus_projection_surjective() {
        let t = QuotientTower::kminus(2, 3).unwrap();
        let mut hit = vec![false; t.element_count(1).unwrap()];
        for a in t.elements(2).unwrap() {
            hit[t.project(2, 1, a).unwrap()] = true;
        }
        assert!(hit.iter().all(|&h| h));
    }

    #[test]
    fn level_cap_enforced() {
        let t = QuotientTower::gl_zp(3, 5).unwrap();
        assert!(matches!(t.level_size(1), Err(Error::LevelTooLarge(_))));
        let small = QuotientTower::zp_additive(2).unwrap().with_cap(8);
        assert!(small.level_size(3).is_ok());
        assert!(matches!(small.level_size(4), Err(Error::LevelTooLarge(_))));
    }

    #[test]
    fn transition_functorial_on_all_tower_kinds() {
        let towers = [
            QuotientTower::gl_zp(2, 2).unwrap(),
            QuotientTower::kminus(2, 3).unwrap(),
            QuotientTower::kminus(3, 2).unwrap(),
        ];
        for t in towers {
            for a in t.elements(3).unwrap() {
                let direct = t.project(3, 1, a).unwrap();
                let via = t.project(2, 1, t.project(3, 2, a).unwrap()).unwrap();
                assert_eq!(direct, via);
            }
        }
        // group-law compatibility along GL transitions
        let gl = QuotientTower::gl_zp(2, 2).unwrap();
        for a in gl.elements(2).unwrap() {
            for b in gl.elements(2).unwrap() {
                let ab = gl.mul(2, a, b).unwrap();
                assert_eq!(
                    gl.project(2, 1, ab).unwrap(),
                    gl.mul(1, gl.project(2, 1, a).unwrap(), gl.project(2, 1, b).unwrap())
                        .unwrap()
                );
            }
        }
    }

    #[test]
    fn descriptor_round_trip() {
        for t in [
            QuotientTower::zp_additive(5).unwrap(),
            QuotientTower::gl_zp(2, 3).unwrap(),
            QuotientTower::kminus(2, 7).unwrap(),
            catalog::dihedral_4(),
        ] {
            let back = QuotientTower::from_json(&t.descriptor()).unwrap();
            assert_eq!(&*back, &*t);
        }
    }

    #[test]
    fn concurrent_level_enumeration() {
        let t = QuotientTower::gl_zp(2, 3).unwrap();
        std::thread::scope(|s| {
            for _ in 0..8 {
                let t = t.clone();
                s.spawn(move || {
                    for _ in 0..50 {
                        assert_eq!(t.element_count(1).unwrap(), 48);
                        let a = t.index_of(1, &[1, 1, 0, 1]).unwrap();
                        assert!(t.inv(1, a).is_ok());
                    }
                });
            }
        });
    }

    #[test]
    fn element_keys_round_trip() {
        let t = QuotientTower::gl_zp(2, 2).unwrap();
        for a in t.elements(1).unwrap() {
            let k = t.elem_key(1, a).unwrap();
            assert_eq!(t.parse_key(1, &k).unwrap(), a);
        }
    }
}
