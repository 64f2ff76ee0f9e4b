//! Numerical calculus on the Z/2 × Z/2 cover φ: X → Y.
//!
//! Every curve on X that we touch is numerically a pull-back: a reduced
//! branch preimage is ½φ*(c), anything else is φ*(c). We store the class v
//! with `curve ≡ φ*(v)`, so that `C·C' = 4·(v·v')`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::picard::{canonical_class, h0, pair, DivClass};
use crate::rational::{fmt_q, q, qr, Q};
use crate::surface::{Catalog, SurfaceError, RIGID_NAMES};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BicoverError {
    #[error("use bound operations for symbolic divisors")]
    Residual,
    #[error("unknown curve on X: `{0}`")]
    UnknownCurve(String),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error("m must be positive")]
    BadM,
    #[error("eigenspace index must be 0..=3, got {0}")]
    BadIndex(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CurveX {
    /// E1, E2, E3, E4 (the full preimage of e4), H12.., T11.. or `pull(x)`.
    pub name: String,
    /// Downstairs rigid curve, when there is one.
    pub down_name: Option<String>,
    pub down: DivClass,
    pub ram: u8,
}

impl CurveX {
    /// Upstairs rigid curve by name (`H13`, `E4`, `T22`, ...).
    pub fn named(cat: &Catalog, name: &str) -> Result<CurveX, BicoverError> {
        let down = name.to_ascii_lowercase();
        if name.chars().next().map_or(true, |c| !c.is_ascii_uppercase()) || !RIGID_NAMES.contains(&down.as_str()) {
            return Err(BicoverError::UnknownCurve(name.to_string()));
        }
        let c = cat.lookup(&down)?;
        Ok(CurveX {
            name: name.to_string(),
            down_name: Some(down),
            down: c.cls.clone(),
            ram: if c.branch.is_some() { 2 } else { 1 },
        })
    }

    /// The preimage of a downstairs curve that is not rigid or not in B:
    /// any catalog name, with ramification from its branch flag.
    pub fn over(cat: &Catalog, down: &str) -> Result<CurveX, BicoverError> {
        let c = cat.lookup(down)?;
        if c.mobile {
            return Ok(CurveX::pull(c.cls.clone(), down));
        }
        CurveX::named(cat, &down.to_ascii_uppercase())
    }

    /// φ*(c) for an arbitrary class.
    pub fn pull(c: DivClass, label: &str) -> CurveX {
        CurveX { name: format!("pull({label})"), down_name: None, down: c, ram: 1 }
    }

    /// v with `self ≡ φ*(v)`.
    pub fn class(&self) -> DivClass {
        self.down.scale(&qr(1, self.ram as i64))
    }

    pub fn is_rigid(&self) -> bool {
        self.down_name.is_some()
    }
}

/// A formal Q-combination of curves on X.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct QDivisorX {
    terms: BTreeMap<String, (CurveX, Q)>,
    /// Set when the divisor carries a symbolic remainder; pure numerical
    /// operations refuse such divisors.
    pub symbolic: bool,
}

impl QDivisorX {
    pub fn new() -> Self {
        QDivisorX::default()
    }

    pub fn single(c: CurveX, k: Q) -> Self {
        let mut d = QDivisorX::new();
        d.add(c, k);
        d
    }

    pub fn add(&mut self, c: CurveX, k: Q) {
        let e = self.terms.entry(c.name.clone()).or_insert((c, Q::zero()));
        e.1 += k;
        if e.1.is_zero() {
            let n = e.0.name.clone();
            self.terms.remove(&n);
        }
    }

    pub fn plus(&self, o: &QDivisorX) -> QDivisorX {
        let mut d = self.clone();
        for (c, k) in o.terms.values() {
            d.add(c.clone(), k.clone());
        }
        d.symbolic |= o.symbolic;
        d
    }

    pub fn scale(&self, k: &Q) -> QDivisorX {
        let mut d = QDivisorX::new();
        for (c, v) in self.terms.values() {
            d.add(c.clone(), v * k);
        }
        d.symbolic = self.symbolic;
        d
    }

    pub fn terms(&self) -> impl Iterator<Item = (&CurveX, &Q)> {
        self.terms.values().map(|(c, k)| (c, k))
    }

    pub fn coef(&self, name: &str) -> Q {
        self.terms.get(name).map(|t| t.1.clone()).unwrap_or_else(Q::zero)
    }

    pub fn is_effective(&self) -> bool {
        self.terms.values().all(|(_, k)| !k.is_negative())
    }

    /// Is `self - other` effective, term by term?
    pub fn contains(&self, other: &QDivisorX) -> bool {
        other.terms.values().all(|(c, k)| self.coef(&c.name) >= *k)
    }

    /// v with `self ≡ φ*(v)`.
    pub fn class(&self) -> DivClass {
        self.terms.values().fold(DivClass::zero(), |acc, (c, k)| &acc + &c.class().scale(k))
    }
}

impl fmt::Display for QDivisorX {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .terms
            .values()
            .map(|(c, k)| if k.is_one() { c.name.clone() } else { format!("{}*{}", fmt_q(k), c.name) })
            .collect();
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// K_X as ½φ*(-K_Y).
pub fn canonical_x() -> QDivisorX {
    QDivisorX::single(CurveX::pull(-canonical_class(), "-K_Y"), qr(1, 2))
}

pub fn ixn_curves(a: &CurveX, b: &CurveX) -> Q {
    q(4) * pair(&a.class(), &b.class())
}

pub fn ixn(a: &QDivisorX, b: &QDivisorX) -> Result<Q, BicoverError> {
    if a.symbolic || b.symbolic {
        return Err(BicoverError::Residual);
    }
    Ok(q(4) * pair(&a.class(), &b.class()))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Invariants {
    pub k2: Q,
    pub pg: i64,
    pub chi: Q,
    pub q: Q,
}

pub fn invariants(cat: &Catalog) -> Invariants {
    let k = canonical_x();
    let ky = canonical_class();
    let pg_y = h0(&ky).expect("integral") as i64;
    let pg = pg_y + (1..=3u8).map(|i| h0(&(cat.l_class(i) + &ky)).expect("integral") as i64).sum::<i64>();
    let mut chi = q(4);
    for i in 1..=3u8 {
        let l = cat.l_class(i);
        chi += pair(l, &(l + &ky)) / q(2);
    }
    Invariants {
        k2: ixn(&k, &k).expect("numerical"),
        pg,
        q: q(1) + q(pg) - &chi,
        chi,
    }
}

/// K_X·C for every curve in the intersection table, labelled.
pub fn lemma1_table(cat: &Catalog) -> Vec<(String, Q)> {
    let k = canonical_x();
    let mut rows = Vec::new();
    let mut push = |label: String, c: CurveX| {
        rows.push((label, ixn(&k, &QDivisorX::single(c, Q::one())).expect("numerical")));
    };
    for i in 1..=3 {
        push(format!("K.E{i}"), CurveX::named(cat, &format!("E{i}")).unwrap());
    }
    push("K.E4".into(), CurveX::named(cat, "E4").unwrap());
    push("K.pull(l)".into(), CurveX::pull(DivClass::l(), "l"));
    for i in 1..=4 {
        push(format!("K.pull(t{i})"), CurveX::pull(DivClass::t(i), &format!("t{i}")));
    }
    for (i, j) in [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)] {
        push(format!("K.H{i}{j}"), CurveX::named(cat, &format!("H{i}{j}")).unwrap());
    }
    for i in 1..=3 {
        push(format!("K.T{i}{i}"), CurveX::named(cat, &format!("T{i}{i}")).unwrap());
    }
    rows
}

/// The reduced ramification divisor R_k over B_k.
pub fn ramification(cat: &Catalog, k: u8) -> QDivisorX {
    let mut d = QDivisorX::new();
    for c in cat.branch_components(k) {
        d.add(CurveX::over(cat, &c.name).expect("rigid"), Q::one());
    }
    d
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EigenSystem {
    pub fixed: QDivisorX,
    pub mobile_class: DivClass,
    pub dim: u64,
}

/// Fixed part, mobile class and dimension of |mK_X|_i.
pub fn eigen_system(cat: &Catalog, m: u64, i: usize) -> Result<EigenSystem, BicoverError> {
    if m == 0 {
        return Err(BicoverError::BadM);
    }
    if i > 3 {
        return Err(BicoverError::BadIndex(i));
    }
    let ky = canonical_class();
    let b = &(cat.displayed_b(1) + cat.displayed_b(2)) + cat.displayed_b(3);
    let n = q((m / 2) as i64);
    let r = |k: u8| ramification(cat, k);
    let (fixed, mobile) = if m % 2 == 0 {
        let base = (&ky.scale(&q(2)) + &b).scale(&n);
        if i == 0 {
            (QDivisorX::new(), base)
        } else {
            let others: Vec<u8> = (1..=3).filter(|&k| k as usize != i).collect();
            (r(others[0]).plus(&r(others[1])), &base - cat.l_class(i as u8))
        }
    } else {
        let base = &ky.scale(&(q(2) * &n + q(1))) + &b.scale(&n);
        if i == 0 {
            (r(1).plus(&r(2)).plus(&r(3)), base)
        } else {
            (r(i as u8), &base + cat.l_class(i as u8))
        }
    };
    let dim = h0(&mobile).expect("integral");
    Ok(EigenSystem { fixed, mobile_class: mobile, dim })
}

/// Σ_i dim |mK_X|_i.
pub fn plurigenus(cat: &Catalog, m: u64) -> Result<u64, BicoverError> {
    (0..=3).map(|i| eigen_system(cat, m, i).map(|e| e.dim)).sum()
}

/// The class v with `D ≡ φ*(v)`.
pub fn class_of_member(d: &QDivisorX) -> Result<DivClass, BicoverError> {
    if d.symbolic {
        return Err(BicoverError::Residual);
    }
    Ok(d.class())
}

/// Is `d` an effective member of |mK_X|_i: right class and containing the
/// fixed part of that eigensystem?
pub fn is_member(cat: &Catalog, d: &QDivisorX, m: u64, i: usize) -> Result<bool, BicoverError> {
    let cls = class_of_member(d)?;
    let want = (-canonical_class()).scale(&qr(m as i64, 2));
    let sys = eigen_system(cat, m, i)?;
    Ok(cls == want && d.is_effective() && d.contains(&sys.fixed))
}

/// Closed form 1 + 5m(m-1)/2.
pub fn plurigenus_formula(m: u64) -> u64 {
    (q(1) + q(5) * q(m as i64) * q(m as i64 - 1) / q(2)).to_integer().to_u64().unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cat() -> &'static Catalog {
        Catalog::standard()
    }

    fn cx(n: &str) -> QDivisorX {
        QDivisorX::single(CurveX::named(cat(), n).unwrap(), Q::one())
    }

    #[test]
    fn intersection_examples() {
        let k = canonical_x();
        assert_eq!(ixn(&k, &cx("E1")).unwrap(), q(1));
        assert_eq!(ixn(&k, &cx("E4")).unwrap(), q(2));
        let t2 = QDivisorX::single(CurveX::pull(DivClass::t(2), "t2"), Q::one());
        assert_eq!(ixn(&cx("T33"), &t2).unwrap(), q(2));
        assert_eq!(ixn(&cx("H24"), &cx("H24")).unwrap(), q(-1));
        let mut sym = cx("E1");
        sym.symbolic = true;
        assert_eq!(ixn(&sym, &k), Err(BicoverError::Residual));
    }

    #[test]
    fn invariants_of_x() {
        let inv = invariants(cat());
        assert_eq!(inv, Invariants { k2: q(5), pg: 0, chi: q(1), q: q(0) });
    }

    #[test]
    fn lemma1_values() {
        let t = lemma1_table(cat());
        assert_eq!(t.len(), 18);
        for (label, v) in t {
            let want = if label.starts_with("K.E4") || label.starts_with("K.T") {
                2
            } else if label == "K.pull(l)" {
                6
            } else if label.starts_with("K.pull(t") {
                4
            } else {
                1
            };
            assert_eq!(v, q(want), "{label}");
        }
    }

    #[test]
    fn eigen_examples() {
        let e = eigen_system(cat(), 4, 1).unwrap();
        assert_eq!(e.mobile_class, DivClass::from_ints([3, 0, -2, -1, -1]));
        assert_eq!(eigen_system(cat(), 2, 1).unwrap().dim, 0);
        let e3 = eigen_system(cat(), 3, 0).unwrap();
        assert!(e3.mobile_class.is_zero());
        assert_eq!(e3.dim, 1);
        assert_eq!(plurigenus(cat(), 2).unwrap(), 6);
        assert_eq!(plurigenus(cat(), 3).unwrap(), 16);
        assert_eq!(plurigenus(cat(), 4).unwrap(), 31);
    }

    #[test]
    fn membership() {
        let mut e = QDivisorX::new();
        for (n, k) in [("H13", 4), ("E3", 2), ("E1", 2), ("H24", 2)] {
            e.add(CurveX::named(cat(), n).unwrap(), q(k));
        }
        assert_eq!(class_of_member(&e).unwrap(), -canonical_class());
        assert!(is_member(cat(), &e, 2, 0).unwrap());
        assert!(!is_member(cat(), &cx("E1"), 2, 0).unwrap());
    }
}
