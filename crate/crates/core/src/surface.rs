//! The curve catalog on Y, branch membership and the incidence relation of
//! the branch configuration.
//!
//! General position is encoded combinatorially: two rigid curves meet iff
//! the rules in [`rule_meets`] say so, and then they meet transversally in a
//! single point.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use serde::Deserialize;
use thiserror::Error;

use crate::picard::{canonical_class, DivClass};
use crate::rational::q;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SurfaceError {
    #[error("unknown curve `{0}`")]
    UnknownCurve(String),
    #[error("incidence undefined for general members")]
    MobileIncidence,
    #[error("a curve is not a distinct partner of itself: `{0}`")]
    SameCurve(String),
    #[error("catalog: {0}")]
    Catalog(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveY {
    pub name: String,
    pub cls: DivClass,
    /// 1, 2 or 3 for a component of B_k.
    pub branch: Option<u8>,
    pub mobile: bool,
}

#[derive(Clone, Debug)]
pub struct Catalog {
    curves: Vec<CurveY>,
    by_name: BTreeMap<String, usize>,
    /// displayed classes of B1..B3
    b: [DivClass; 3],
    l: [DivClass; 3],
}

#[derive(Deserialize)]
struct RawCurve {
    name: String,
    class: [i64; 5],
    #[serde(default)]
    branch: Option<u8>,
    #[serde(default)]
    mobile: bool,
}

#[derive(Deserialize)]
struct RawBuilding {
    b: [[i64; 5]; 3],
    l: [[i64; 5]; 3],
}

#[derive(Deserialize)]
struct RawCatalog {
    curve: Vec<RawCurve>,
    building: RawBuilding,
}

/// The 18 names a catalog must provide, in canonical order.
pub const CURVE_NAMES: [&str; 18] = [
    "l", "e1", "e2", "e3", "e4", "h12", "h13", "h14", "h23", "h24", "h34", "t1", "t2", "t3", "t4", "t11", "t22",
    "t33",
];

/// Rigid curves in canonical order.
pub const RIGID_NAMES: [&str; 13] =
    ["e1", "e2", "e3", "e4", "h12", "h13", "h14", "h23", "h24", "h34", "t11", "t22", "t33"];

const DEFAULT_CATALOG: &str = include_str!("../data/catalog.toml");

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Shape {
    E(u8),
    H(u8, u8),
    T(u8),
}

fn shape(name: &str) -> Option<Shape> {
    let d: Vec<u8> = name[1..].bytes().map(|b| b.wrapping_sub(b'0')).collect();
    match (name.as_bytes().first()?, d.as_slice()) {
        (b'e', [i]) if (1..=4).contains(i) => Some(Shape::E(*i)),
        (b'h', [i, j]) if i < j && (1..=4).contains(i) && (1..=4).contains(j) => Some(Shape::H(*i, *j)),
        (b't', [i, j]) if i == j && (1..=3).contains(i) => Some(Shape::T(*i)),
        _ => None,
    }
}

/// The incidence rules of the configuration on rigid curve names.
pub fn rule_meets(a: &str, b: &str) -> Option<bool> {
    use Shape::*;
    let (x, y) = (shape(a)?, shape(b)?);
    Some(match (x, y) {
        (E(_), E(_)) => false,
        (E(i), H(j, k)) | (H(j, k), E(i)) => i == j || i == k,
        (H(i, j), H(k, l)) => i != k && i != l && j != k && j != l,
        (T(i), E(j)) | (E(j), T(i)) => i == j,
        (T(i), H(j, k)) | (H(j, k), T(i)) => i != j && i != k,
        (T(i), T(j)) => i != j,
    })
}

impl Catalog {
    pub fn from_toml(text: &str) -> Result<Catalog, SurfaceError> {
        let raw: RawCatalog = toml::from_str(text).map_err(|e| SurfaceError::Catalog(e.to_string()))?;
        let mut curves = Vec::new();
        let mut by_name = BTreeMap::new();
        for rc in raw.curve {
            if !CURVE_NAMES.contains(&rc.name.as_str()) {
                return Err(SurfaceError::UnknownCurve(rc.name));
            }
            if let Some(k) = rc.branch {
                if !(1..=3).contains(&k) {
                    return Err(SurfaceError::Catalog(format!("branch index {k} of `{}`", rc.name)));
                }
            }
            if by_name.insert(rc.name.clone(), curves.len()).is_some() {
                return Err(SurfaceError::Catalog(format!("duplicate curve `{}`", rc.name)));
            }
            curves.push(CurveY {
                name: rc.name,
                cls: DivClass::from_ints(rc.class),
                branch: rc.branch,
                mobile: rc.mobile,
            });
        }
        for n in CURVE_NAMES {
            if !by_name.contains_key(n) {
                return Err(SurfaceError::Catalog(format!("missing curve `{n}`")));
            }
        }
        Ok(Catalog {
            curves,
            by_name,
            b: raw.building.b.map(DivClass::from_ints),
            l: raw.building.l.map(DivClass::from_ints),
        })
    }

    /// The shipped catalog.
    pub fn standard() -> &'static Catalog {
        static CAT: OnceLock<Catalog> = OnceLock::new();
        CAT.get_or_init(|| Catalog::from_toml(DEFAULT_CATALOG).expect("embedded catalog parses"))
    }

    pub fn curves(&self) -> &[CurveY] {
        &self.curves
    }

    pub fn lookup(&self, name: &str) -> Result<&CurveY, SurfaceError> {
        self.by_name
            .get(name)
            .map(|&i| &self.curves[i])
            .ok_or_else(|| SurfaceError::UnknownCurve(name.to_string()))
    }

    pub fn rigid(&self) -> impl Iterator<Item = &CurveY> {
        RIGID_NAMES.iter().map(|n| self.lookup(n).expect("catalog is complete"))
    }

    pub fn branch_components(&self, k: u8) -> Vec<&CurveY> {
        self.rigid().filter(|c| c.branch == Some(k)).collect()
    }

    pub fn displayed_b(&self, k: u8) -> &DivClass {
        &self.b[k as usize - 1]
    }

    pub fn l_class(&self, k: u8) -> &DivClass {
        &self.l[k as usize - 1]
    }

    /// Sum of the component classes of B_k.
    pub fn b_class(&self, k: u8) -> DivClass {
        self.branch_components(k).iter().fold(DivClass::zero(), |acc, c| &acc + &c.cls)
    }

    pub fn meets(&self, a: &str, b: &str) -> Result<bool, SurfaceError> {
        let (ca, cb) = (self.lookup(a)?, self.lookup(b)?);
        if ca.mobile || cb.mobile {
            return Err(SurfaceError::MobileIncidence);
        }
        if a == b {
            return Err(SurfaceError::SameCurve(a.to_string()));
        }
        rule_meets(a, b).ok_or_else(|| SurfaceError::UnknownCurve(format!("{a}/{b}")))
    }

    /// All unordered meeting pairs of rigid curves, sorted.
    pub fn meeting_pairs(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        for (i, a) in RIGID_NAMES.iter().enumerate() {
            for b in &RIGID_NAMES[i + 1..] {
                if self.meets(a, b).unwrap_or(false) {
                    let (x, y) = if a < b { (a, b) } else { (b, a) };
                    out.push((x.to_string(), y.to_string()));
                }
            }
        }
        out.sort();
        out
    }

    pub fn validate_building_data(&self) -> BuildingReport {
        let mut checks = Vec::new();
        for k in 1..=3u8 {
            let got = self.b_class(k);
            let want = self.displayed_b(k);
            checks.push(Check {
                name: format!("class(B{k})"),
                expected: want.to_string(),
                computed: got.to_string(),
                pass: &got == want,
            });
        }
        for (i, j, k) in [(1u8, 2u8, 3u8), (2, 1, 3), (3, 1, 2)] {
            let lhs = self.l_class(i).scale(&q(2));
            let rhs = self.displayed_b(j) + self.displayed_b(k);
            checks.push(Check {
                name: format!("2L{i} = B{j} + B{k}"),
                expected: rhs.to_string(),
                computed: lhs.to_string(),
                pass: lhs == rhs,
            });
        }
        let b = &(self.displayed_b(1) + self.displayed_b(2)) + self.displayed_b(3);
        let lhs = &canonical_class().scale(&q(2)) + &b;
        let rhs = -canonical_class();
        checks.push(Check {
            name: "2K_Y + B = -K_Y".to_string(),
            expected: rhs.to_string(),
            computed: lhs.to_string(),
            pass: lhs == rhs,
        });
        BuildingReport { checks }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub expected: String,
    pub computed: String,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BuildingReport {
    pub checks: Vec<Check>,
}

impl BuildingReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::picard::pair;

    #[test]
    fn lookups() {
        let cat = Catalog::standard();
        assert_eq!(cat.lookup("h13").unwrap().cls, DivClass::h(1, 3));
        assert_eq!(cat.lookup("t33").unwrap().branch, Some(2));
        assert_eq!(cat.lookup("e4").unwrap().branch, None);
        assert_eq!(cat.lookup("t11").unwrap().cls, DivClass::t(1));
        assert!(matches!(cat.lookup("e5"), Err(SurfaceError::UnknownCurve(_))));
        assert_eq!(cat.curves().len(), 18);
    }

    #[test]
    fn incidence_examples() {
        let cat = Catalog::standard();
        assert_eq!(cat.meets("e3", "h13"), Ok(true));
        assert_eq!(cat.meets("e1", "e2"), Ok(false));
        assert_eq!(cat.meets("t11", "e4"), Ok(false));
        assert_eq!(cat.meets("h12", "h34"), Ok(true));
        assert_eq!(cat.meets("h12", "h13"), Ok(false));
        assert_eq!(cat.meets("t22", "t33"), Ok(true));
        assert_eq!(cat.meets("t4", "e1"), Err(SurfaceError::MobileIncidence));
    }

    #[test]
    fn meeting_pairs_are_transversal_single_points() {
        let cat = Catalog::standard();
        for a in RIGID_NAMES {
            for b in RIGID_NAMES {
                if a == b {
                    continue;
                }
                let m = cat.meets(a, b).unwrap();
                assert_eq!(m, cat.meets(b, a).unwrap());
                let p = pair(&cat.lookup(a).unwrap().cls, &cat.lookup(b).unwrap().cls);
                assert_eq!(p == q(1), m, "{a} {b}");
                if !m {
                    assert_eq!(p, q(0), "{a} {b}");
                }
            }
        }
    }

    #[test]
    fn branch_points_lie_on_at_most_two_divisors() {
        let cat = Catalog::standard();
        for (a, b) in cat.meeting_pairs() {
            let ba = cat.lookup(&a).unwrap().branch;
            let bb = cat.lookup(&b).unwrap().branch;
            // each B_k is a disjoint union, so two meeting curves never share it
            if let (Some(x), Some(y)) = (ba, bb) {
                assert_ne!(x, y, "{a} {b}");
            }
        }
    }

    #[test]
    fn building_data() {
        let r = Catalog::standard().validate_building_data();
        assert_eq!(r.checks.len(), 7);
        assert!(r.all_pass(), "{r:?}");
    }

    #[test]
    fn corrupted_catalog_fails_validation() {
        let bad = DEFAULT_CATALOG.replace("name = \"h23\"\nclass = [1, 0, -1, -1, 0]", "name = \"h23\"\nclass = [1, 0, -1, 0, -1]");
        assert_ne!(bad, DEFAULT_CATALOG);
        let cat = Catalog::from_toml(&bad).unwrap();
        assert!(!cat.validate_building_data().all_pass());
    }
}
