//! Log canonical thresholds of divisors supported on rigid catalog curves,
//! where every point carries at most two smooth transversal branches.

use std::cmp::Ordering;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::bicover::{ramification, CurveX, QDivisorX};
use crate::picard::{is_effective, DivClass};
use crate::rational::{q, Q};
use crate::surface::{Catalog, SurfaceError, RIGID_NAMES};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LctError {
    #[error("negative coefficient in a local model")]
    Negative,
    #[error("lct undefined for general members")]
    MobileSupport,
    #[error("no decomposition found")]
    NoDecomposition,
    #[error("target class is not effective")]
    NotEffective,
    #[error("`{0}` and `{1}` do not meet")]
    NoSuchPoint(String, String),
    #[error("witness needs n >= {0}")]
    WitnessRange(i64),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LocalModel {
    Smooth(Q),
    Crossing(Q, Q),
}

/// 1/a for one branch, 1/max for two transversal branches; `None` is +∞.
pub fn lct_local(m: &LocalModel) -> Result<Option<Q>, LctError> {
    let top = match m {
        LocalModel::Smooth(a) => {
            if a.is_negative() {
                return Err(LctError::Negative);
            }
            a.clone()
        }
        LocalModel::Crossing(a, b) => {
            if a.is_negative() || b.is_negative() {
                return Err(LctError::Negative);
            }
            if a >= b { a.clone() } else { b.clone() }
        }
    };
    Ok(if top.is_zero() { None } else { Some(Q::one() / top) })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LctResult {
    /// `None` for the zero divisor.
    pub value: Option<Q>,
    /// Sorted curve names of the minimising point: two for a crossing,
    /// one for a general point of a single curve.
    pub point: Vec<String>,
}

fn cmp_lct(a: &Option<Q>, b: &Option<Q>) -> Ordering {
    match (a, b) {
        (None, None) => Ordering::Equal,
        (None, Some(_)) => Ordering::Greater,
        (Some(_), None) => Ordering::Less,
        (Some(x), Some(y)) => x.cmp(y),
    }
}

fn rigid_support(d: &QDivisorX) -> Result<Vec<(&CurveX, &Q)>, LctError> {
    let mut out = Vec::new();
    for (c, k) in d.terms() {
        if k.is_negative() {
            return Err(LctError::Negative);
        }
        if !c.is_rigid() {
            return Err(LctError::MobileSupport);
        }
        out.push((c, k));
    }
    Ok(out)
}

fn down(c: &CurveX) -> &str {
    c.down_name.as_deref().expect("rigid")
}

/// lct at a single named point: `[C]` for a general point of C, `[C, C']`
/// for their crossing.
pub fn lct_at(cat: &Catalog, d: &QDivisorX, point: &[&str]) -> Result<Option<Q>, LctError> {
    rigid_support(d)?;
    match point {
        [a] => lct_local(&LocalModel::Smooth(d.coef(a))),
        [a, b] => {
            let ca = CurveX::named(cat, a).map_err(|_| SurfaceError::UnknownCurve(a.to_string()))?;
            let cb = CurveX::named(cat, b).map_err(|_| SurfaceError::UnknownCurve(b.to_string()))?;
            if !cat.meets(down(&ca), down(&cb))? {
                return Err(LctError::NoSuchPoint(a.to_string(), b.to_string()));
            }
            lct_local(&LocalModel::Crossing(d.coef(a), d.coef(b)))
        }
        _ => Err(LctError::NoSuchPoint(point.join(","), String::new())),
    }
}

/// Minimum of the local thresholds over every point of the configuration.
/// Crossings are preferred as the reported point; ties go to the
/// lexicographically least name pair.
pub fn lct_divisor(cat: &Catalog, d: &QDivisorX) -> Result<LctResult, LctError> {
    let supp = rigid_support(d)?;
    let mut best: Option<(Option<Q>, bool, Vec<String>)> = None;
    let mut consider = |v: Option<Q>, smooth: bool, mut names: Vec<String>| {
        names.sort();
        let better = match &best {
            None => true,
            Some((bv, bs, bn)) => cmp_lct(&v, bv)
                .then(smooth.cmp(bs))
                .then_with(|| names.cmp(bn))
                == Ordering::Less,
        };
        if better {
            best = Some((v, smooth, names));
        }
    };
    for (i, (a, ka)) in supp.iter().enumerate() {
        consider(lct_local(&LocalModel::Smooth((*ka).clone()))?, true, vec![a.name.clone()]);
        for (b, kb) in &supp[i + 1..] {
            if cat.meets(down(a), down(b))? {
                let v = lct_local(&LocalModel::Crossing((*ka).clone(), (*kb).clone()))?;
                consider(v, false, vec![a.name.clone(), b.name.clone()]);
            }
        }
    }
    Ok(match best {
        Some((value, _, point)) => LctResult { value, point },
        None => LctResult { value: None, point: Vec::new() },
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Witness {
    /// R2 + R3 + (4n-4)H12 + (2n-2)H34 + 2nE1 + (2n-4)E2 in |2nK_X|_1
    D1Even,
    /// R + (4n-4)H13 + (2n-2)E3 + (2n-2)E1 + (2n-2)H24 in |(2n+1)K_X|_0
    D0Odd,
    /// (2n-1)E1 + (2n+2)E2 + 4nH12 + H23 + H24 + 2nH34 + T22 in |(2n+1)K_X|_1
    D1Odd,
}

impl Witness {
    pub fn parse(s: &str) -> Option<Witness> {
        match s {
            "D1-even" => Some(Witness::D1Even),
            "D0-odd" => Some(Witness::D0Odd),
            "D1-odd" => Some(Witness::D1Odd),
            _ => None,
        }
    }

    pub fn min_n(self) -> i64 {
        match self {
            Witness::D1Even => 2,
            _ => 1,
        }
    }

    /// m and eigen-index of the linear system the witness lives in.
    pub fn system(self, n: i64) -> (u64, usize) {
        match self {
            Witness::D1Even => (2 * n as u64, 1),
            Witness::D0Odd => (2 * n as u64 + 1, 0),
            Witness::D1Odd => (2 * n as u64 + 1, 1),
        }
    }

    /// Closed form of the threshold: 1/(4n-3), 1/(4n-3), 1/(4n).
    pub fn expected(self, n: i64) -> Q {
        match self {
            Witness::D1Even | Witness::D0Odd => Q::one() / q(4 * n - 3),
            Witness::D1Odd => Q::one() / q(4 * n),
        }
    }

    /// The crossing singled out for the closed form.
    pub fn designated_point(self) -> [&'static str; 2] {
        match self {
            Witness::D1Even | Witness::D1Odd => ["H12", "H34"],
            Witness::D0Odd => ["E3", "H13"],
        }
    }

    pub fn build(self, cat: &Catalog, n: i64) -> Result<QDivisorX, LctError> {
        if n < self.min_n() {
            return Err(LctError::WitnessRange(self.min_n()));
        }
        let c = |name: &str| CurveX::named(cat, name).expect("rigid name");
        let mut d = QDivisorX::new();
        match self {
            Witness::D1Even => {
                d = ramification(cat, 2).plus(&ramification(cat, 3));
                for (name, k) in [("H12", 4 * n - 4), ("H34", 2 * n - 2), ("E1", 2 * n), ("E2", 2 * n - 4)] {
                    d.add(c(name), q(k));
                }
            }
            Witness::D0Odd => {
                d = ramification(cat, 1).plus(&ramification(cat, 2)).plus(&ramification(cat, 3));
                for (name, k) in [("H13", 4 * n - 4), ("E3", 2 * n - 2), ("E1", 2 * n - 2), ("H24", 2 * n - 2)] {
                    d.add(c(name), q(k));
                }
            }
            Witness::D1Odd => {
                for (name, k) in [
                    ("E1", 2 * n - 1),
                    ("E2", 2 * n + 2),
                    ("H12", 4 * n),
                    ("H23", 1),
                    ("H24", 1),
                    ("H34", 2 * n),
                    ("T22", 1),
                ] {
                    d.add(c(name), q(k));
                }
            }
        }
        Ok(d)
    }
}

/// Pull-back of a downstairs integral combination of rigid curves: branch
/// curves double (φ*(c) = 2C), e4 keeps its coefficient.
pub fn pull_back(cat: &Catalog, coeffs: &[u32]) -> QDivisorX {
    let mut d = QDivisorX::new();
    for (name, &k) in RIGID_NAMES.iter().zip(coeffs) {
        if k > 0 {
            let c = CurveX::over(cat, name).expect("rigid");
            d.add(c.clone(), q(k as i64 * c.ram as i64));
        }
    }
    d
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GlctSearch {
    pub bound: Q,
    /// Coefficients on RIGID_NAMES of the reported witness.
    pub witness: Vec<u32>,
    pub pullback: QDivisorX,
    pub point: Vec<String>,
    /// Every decomposition attaining the bound, sorted.
    pub minimizers: Vec<Vec<u32>>,
    pub explored: usize,
}

fn compositions(parts: usize, total: u32, cap: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if parts == 0 {
        if total == 0 {
            out.push(prefix.clone());
        }
        return;
    }
    for k in 0..=cap.min(total) {
        prefix.push(k);
        compositions(parts - 1, total - k, cap, prefix, out);
        prefix.pop();
    }
}

/// Upper bound for glct over integral decompositions of `target` into rigid
/// curves with coefficients at most `max_coeff`.
pub fn glct_upper_search(cat: &Catalog, target: &DivClass, max_coeff: u32) -> Result<GlctSearch, LctError> {
    if !is_effective(target) {
        return Err(LctError::NotEffective);
    }
    if !target.is_integral() {
        return Err(LctError::NoDecomposition);
    }
    let deg = target.degree().to_integer();
    let deg: u32 = deg.try_into().map_err(|_| LctError::NoDecomposition)?;
    // the nine degree-one curves carry the l-coordinate; e1..e4 then follow
    let lines: Vec<DivClass> = RIGID_NAMES[4..].iter().map(|n| cat.lookup(n).unwrap().cls.clone()).collect();
    let firsts: Vec<u32> = (0..=max_coeff.min(deg)).collect();
    let per_prefix: Vec<Vec<(Vec<u32>, Q)>> = firsts
        .par_iter()
        .map(|&k0| {
            let mut tails = Vec::new();
            compositions(lines.len() - 1, deg - k0, max_coeff, &mut vec![k0], &mut tails);
            let mut found = Vec::new();
            for tail in tails {
                let mut rest = target.clone();
                for (k, c) in tail.iter().zip(&lines) {
                    rest = &rest - &c.scale(&q(*k as i64));
                }
                let mut es = Vec::with_capacity(4);
                let ok = rest.0[0].is_zero()
                    && (1..=4).all(|i| {
                        let v = &rest.0[i];
                        if v.is_negative() || *v > q(max_coeff as i64) {
                            return false;
                        }
                        es.push(v.to_integer().try_into().unwrap());
                        true
                    });
                if ok {
                    let mut full = es;
                    full.extend(tail);
                    let top = RIGID_NAMES
                        .iter()
                        .zip(&full)
                        .map(|(n, &k)| {
                            let ram = if cat.lookup(n).unwrap().branch.is_some() { 2 } else { 1 };
                            q(k as i64 * ram)
                        })
                        .max()
                        .unwrap();
                    found.push((full, top));
                }
            }
            found
        })
        .collect();
    let all: Vec<(Vec<u32>, Q)> = per_prefix.into_iter().flatten().collect();
    let explored = all.len();
    let best_top = all.iter().map(|(_, t)| t.clone()).max().ok_or(LctError::NoDecomposition)?;
    let mut minimizers: Vec<Vec<u32>> = all.into_iter().filter(|(_, t)| *t == best_top).map(|(v, _)| v).collect();
    minimizers.sort();
    let witness = minimizers[0].clone();
    let pullback = pull_back(cat, &witness);
    let res = lct_divisor(cat, &pullback)?;
    let bound = res.value.clone().ok_or(LctError::NoDecomposition)?;
    debug_assert_eq!(bound, Q::one() / &best_top);
    Ok(GlctSearch { bound, witness, pullback, point: res.point, minimizers, explored })
}

/// Permutations of {1,2,3,4} that carry the branch configuration to itself
/// (permuting B1, B2, B3 among themselves).
pub fn configuration_symmetries(cat: &Catalog) -> Vec<[u8; 4]> {
    let mut out = Vec::new();
    for sigma in permutations4() {
        let Some(map) = rename_map(&sigma) else { continue };
        let blocks: Vec<Vec<&str>> = (1..=3u8)
            .map(|k| {
                let mut v: Vec<&str> = cat.branch_components(k).iter().map(|c| c.name.as_str()).collect();
                v.sort();
                v
            })
            .collect();
        let ok = blocks.iter().all(|b| {
            let mut img: Vec<&str> = b.iter().map(|n| map(n)).collect();
            img.sort();
            blocks.contains(&img)
        });
        if ok {
            out.push(sigma);
        }
    }
    out
}

fn permutations4() -> Vec<[u8; 4]> {
    let mut out = Vec::new();
    for a in 1..=4u8 {
        for b in 1..=4u8 {
            for c in 1..=4u8 {
                for d in 1..=4u8 {
                    let s = [a, b, c, d];
                    let mut t = s;
                    t.sort();
                    if t == [1, 2, 3, 4] {
                        out.push(s);
                    }
                }
            }
        }
    }
    out
}

/// Index relabelling of rigid names under σ, if σ keeps t11, t22, t33 rigid.
pub fn rename_map(sigma: &[u8; 4]) -> Option<impl Fn(&str) -> &'static str + '_> {
    if (1..=3).any(|i| sigma[i - 1] == 4) {
        return None;
    }
    Some(move |name: &str| {
        let s = |ch: u8| sigma[(ch - b'0') as usize - 1];
        let b = name.as_bytes();
        let img = match b[0] {
            b'e' => format!("e{}", s(b[1])),
            b'h' => {
                let (x, y) = (s(b[1]), s(b[2]));
                format!("h{}{}", x.min(y), x.max(y))
            }
            _ => format!("t{0}{0}", s(b[1])),
        };
        *RIGID_NAMES.iter().find(|n| **n == img).expect("image is rigid")
    })
}

/// Apply σ to a coefficient vector on RIGID_NAMES.
pub fn permute_coeffs(sigma: &[u8; 4], coeffs: &[u32]) -> Option<Vec<u32>> {
    let map = rename_map(sigma)?;
    let mut out = vec![0; RIGID_NAMES.len()];
    for (name, &k) in RIGID_NAMES.iter().zip(coeffs) {
        let img = map(name);
        out[RIGID_NAMES.iter().position(|n| *n == img).unwrap()] = k;
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::picard::canonical_class;
    use crate::rational::qr;

    fn cat() -> &'static Catalog {
        Catalog::standard()
    }

    #[test]
    fn local_models() {
        assert_eq!(lct_local(&LocalModel::Crossing(q(4), q(2))), Ok(Some(qr(1, 4))));
        assert_eq!(lct_local(&LocalModel::Crossing(q(1), q(1))), Ok(Some(q(1))));
        assert_eq!(lct_local(&LocalModel::Crossing(q(3), q(5))), Ok(Some(qr(1, 5))));
        assert_eq!(lct_local(&LocalModel::Smooth(q(0))), Ok(None));
        assert_eq!(lct_local(&LocalModel::Smooth(q(-1))), Err(LctError::Negative));
    }

    #[test]
    fn prop4_divisor() {
        let e = pull_back(cat(), &[1, 0, 1, 0, 0, 2, 0, 0, 1, 0, 0, 0, 0]);
        assert_eq!(e.to_string(), "2*E1 + 2*E3 + 4*H13 + 2*H24");
        let r = lct_divisor(cat(), &e).unwrap();
        assert_eq!(r.value, Some(qr(1, 4)));
        assert_eq!(r.point, vec!["E1", "H13"]);
        assert_eq!(lct_at(cat(), &e, &["E3", "H13"]), Ok(Some(qr(1, 4))));
    }

    #[test]
    fn mobile_support_rejected() {
        let d = QDivisorX::single(CurveX::pull(DivClass::t(4), "t4"), q(1));
        assert_eq!(lct_divisor(cat(), &d), Err(LctError::MobileSupport));
    }

    #[test]
    fn witnesses_at_small_n() {
        let d = Witness::D1Even.build(cat(), 2).unwrap();
        assert_eq!(lct_divisor(cat(), &d).unwrap().value, Some(qr(1, 5)));
        assert_eq!(lct_at(cat(), &d, &["H12", "H34"]), Ok(Some(qr(1, 5))));
        let d = Witness::D0Odd.build(cat(), 3).unwrap();
        assert_eq!(lct_divisor(cat(), &d).unwrap().value, Some(qr(1, 9)));
        let d = Witness::D1Odd.build(cat(), 1).unwrap();
        assert_eq!(lct_divisor(cat(), &d).unwrap().value, Some(qr(1, 4)));
        assert_eq!(Witness::D1Even.build(cat(), 1), Err(LctError::WitnessRange(2)));
    }

    #[test]
    fn search_examples() {
        let r = glct_upper_search(cat(), &-canonical_class(), 4).unwrap();
        assert_eq!(r.bound, qr(1, 4));
        let r = glct_upper_search(cat(), &DivClass::e(1), 1).unwrap();
        assert_eq!(r.bound, qr(1, 2));
        assert_eq!(glct_upper_search(cat(), &-canonical_class(), 0), Err(LctError::NoDecomposition));
        assert_eq!(glct_upper_search(cat(), &-DivClass::l(), 3), Err(LctError::NotEffective));
    }

    #[test]
    fn symmetries_fix_four() {
        let syms = configuration_symmetries(cat());
        assert!(syms.contains(&[1, 2, 3, 4]));
        assert!(syms.contains(&[2, 3, 1, 4]));
        assert!(syms.iter().all(|s| s[3] == 4));
    }
}
