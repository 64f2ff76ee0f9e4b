//! The Picard lattice of Y, the blow-up of P² at four general points.
//!
//! Classes are stored as raw signed coordinates in the basis (l, e1..e4),
//! so `3l + e1 - 3e2 - e3 - e4` is `[3, 1, -3, -1, -1]`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::OnceLock;

use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::cone::extreme_rays;
use crate::linarith::{lp_feasible, Constraint};
use crate::poly::Poly;
use crate::rational::{fmt_q, q, Q};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PicardError {
    #[error("h0 requires an integral class")]
    NonIntegral,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DivClass(pub [Q; 5]);

impl DivClass {
    pub fn new(c: [Q; 5]) -> Self {
        DivClass(c)
    }

    pub fn from_ints(c: [i64; 5]) -> Self {
        DivClass(c.map(q))
    }

    pub fn zero() -> Self {
        DivClass::from_ints([0; 5])
    }

    pub fn l() -> Self {
        DivClass::from_ints([1, 0, 0, 0, 0])
    }

    /// Exceptional class e_i, i in 1..=4.
    pub fn e(i: usize) -> Self {
        assert!((1..=4).contains(&i));
        let mut c = [0; 5];
        c[i] = 1;
        DivClass::from_ints(c)
    }

    /// h_ij = l - e_i - e_j
    pub fn h(i: usize, j: usize) -> Self {
        &(&DivClass::l() - &DivClass::e(i)) - &DivClass::e(j)
    }

    /// t_i = l - e_i
    pub fn t(i: usize) -> Self {
        &DivClass::l() - &DivClass::e(i)
    }

    pub fn coords(&self) -> &[Q; 5] {
        &self.0
    }

    pub fn scale(&self, k: &Q) -> Self {
        DivClass(self.0.clone().map(|x| x * k))
    }

    pub fn is_integral(&self) -> bool {
        self.0.iter().all(|x| x.is_integer())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    /// Degree against the class of a line.
    pub fn degree(&self) -> Q {
        self.0[0].clone()
    }
}

/// The intersection form diag(1, -1, -1, -1, -1).
pub fn pair(a: &DivClass, b: &DivClass) -> Q {
    let mut s = &a.0[0] * &b.0[0];
    for i in 1..5 {
        s -= &a.0[i] * &b.0[i];
    }
    s
}

/// K_Y = -3l + e1 + e2 + e3 + e4.
pub fn canonical_class() -> DivClass {
    DivClass::from_ints([-3, 1, 1, 1, 1])
}

/// Names of the ten (-1)-curves, in the fixed reduction order.
pub const NEGATIVE_CURVE_NAMES: [&str; 10] = ["e1", "e2", "e3", "e4", "h12", "h13", "h14", "h23", "h24", "h34"];

/// e1..e4 followed by h12, h13, h14, h23, h24, h34.
pub fn negative_curves() -> Vec<DivClass> {
    let mut v: Vec<DivClass> = (1..=4).map(DivClass::e).collect();
    for i in 1..=4 {
        for j in i + 1..=4 {
            v.push(DivClass::h(i, j));
        }
    }
    v
}

/// Extreme rays of the nef cone, the dual of the cone spanned by the
/// (-1)-curves. Computed once.
pub fn nef_rays() -> &'static [DivClass] {
    static RAYS: OnceLock<Vec<DivClass>> = OnceLock::new();
    RAYS.get_or_init(|| {
        // pair(x, C) ≥ 0 written as row·x with row = C·diag(1,-1,-1,-1,-1)
        let rows: Vec<Vec<Q>> = negative_curves()
            .iter()
            .map(|c| c.0.iter().enumerate().map(|(i, x)| if i == 0 { x.clone() } else { -x.clone() }).collect())
            .collect();
        extreme_rays(&rows)
            .into_iter()
            .map(|r| DivClass(r.try_into().expect("rank 5")))
            .collect()
    })
}

pub fn is_nef(c: &DivClass) -> bool {
    negative_curves().iter().all(|n| !pair(c, n).is_negative())
}

/// Exact cone membership: is `c` a nonnegative rational combination of the
/// (-1)-curves?
pub fn is_effective_cone(c: &DivClass) -> bool {
    let curves = negative_curves();
    let lam: Vec<Poly> = (0..curves.len()).map(|k| Poly::var(&format!("lam{k}"))).collect();
    let mut sys: Vec<Constraint> = lam.iter().map(|v| Constraint::ge(v, &Poly::zero())).collect();
    for i in 0..5 {
        let mut e = Poly::constant(-c.0[i].clone());
        for (k, curve) in curves.iter().enumerate() {
            e = &e + &lam[k].scale(&curve.0[i]);
        }
        sys.push(Constraint::new(e, crate::linarith::Rel::Eq));
    }
    lp_feasible(&sys).is_some()
}

/// Strips (-1)-curves that pair negatively until the class is nef, or
/// until a nef ray certifies it is not effective. Integral classes only.
/// Returns the nef remainder on success.
pub fn reduce_to_nef(c: &DivClass) -> Option<DivClass> {
    let curves = negative_curves();
    let mut cur = c.clone();
    loop {
        if nef_rays().iter().any(|n| pair(&cur, n).is_negative()) {
            return None;
        }
        match curves.iter().find(|n| pair(&cur, n).is_negative()) {
            Some(n) => cur = &cur - n,
            None => return Some(cur),
        }
    }
}

pub fn is_effective_reduction(c: &DivClass) -> bool {
    reduce_to_nef(c).is_some()
}

/// Effectivity. Rational classes use cone membership; integral classes run
/// both procedures and insist they agree.
pub fn is_effective(c: &DivClass) -> bool {
    let cone = is_effective_cone(c);
    if c.is_integral() {
        let red = is_effective_reduction(c);
        assert_eq!(cone, red, "effectivity procedures disagree on {c}");
    }
    cone
}

/// Riemann–Roch: 1 + (c² - c·K)/2.
pub fn chi(c: &DivClass) -> Q {
    Q::one() + (pair(c, c) - pair(c, &canonical_class())) / q(2)
}

/// Number of independent global sections of an integral class.
pub fn h0(c: &DivClass) -> Result<u64, PicardError> {
    if !c.is_integral() {
        return Err(PicardError::NonIntegral);
    }
    Ok(match reduce_to_nef(c) {
        None => 0,
        Some(nef) => chi(&nef).to_integer().to_u64().expect("nef classes have positive chi"),
    })
}

impl fmt::Display for DivClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = ["l", "e1", "e2", "e3", "e4"];
        let mut first = true;
        for (x, name) in self.0.iter().zip(names) {
            if x.is_zero() {
                continue;
            }
            let a = x.abs();
            let sign = if x.is_negative() { "-" } else { "+" };
            if first {
                if x.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            if a.is_one() {
                write!(f, "{name}")?;
            } else if a.is_integer() {
                write!(f, "{}{name}", fmt_q(&a))?;
            } else {
                write!(f, "({}){name}", fmt_q(&a))?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl Add for &DivClass {
    type Output = DivClass;
    fn add(self, o: &DivClass) -> DivClass {
        DivClass(std::array::from_fn(|i| &self.0[i] + &o.0[i]))
    }
}

impl Sub for &DivClass {
    type Output = DivClass;
    fn sub(self, o: &DivClass) -> DivClass {
        DivClass(std::array::from_fn(|i| &self.0[i] - &o.0[i]))
    }
}

impl Neg for &DivClass {
    type Output = DivClass;
    fn neg(self) -> DivClass {
        DivClass(std::array::from_fn(|i| -&self.0[i]))
    }
}

impl Mul<&DivClass> for &Q {
    type Output = DivClass;
    fn mul(self, o: &DivClass) -> DivClass {
        o.scale(self)
    }
}

impl Add for DivClass {
    type Output = DivClass;
    fn add(self, o: DivClass) -> DivClass {
        &self + &o
    }
}

impl Sub for DivClass {
    type Output = DivClass;
    fn sub(self, o: DivClass) -> DivClass {
        &self - &o
    }
}

impl Neg for DivClass {
    type Output = DivClass;
    fn neg(self) -> DivClass {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn form_values() {
        let mk = -canonical_class();
        assert_eq!(pair(&DivClass::l(), &DivClass::l()), q(1));
        assert_eq!(pair(&mk, &mk), q(5));
        assert_eq!(pair(&DivClass::h(1, 3), &DivClass::h(2, 4)), q(1));
        assert_eq!(pair(&canonical_class(), &DivClass::l()), q(-3));
        assert_eq!(canonical_class(), DivClass::from_ints([-3, 1, 1, 1, 1]));
    }

    #[test]
    fn negative_curve_list() {
        let v = negative_curves();
        assert_eq!(v.len(), 10);
        for c in &v {
            assert_eq!(pair(c, c), q(-1));
            assert_eq!(pair(c, &canonical_class()), q(-1));
        }
    }

    #[test]
    fn nef_cone_has_ten_rays() {
        let rays = nef_rays();
        assert_eq!(rays.len(), 10);
        let expect = [
            DivClass::from_ints([1, 0, 0, 0, 0]),
            DivClass::from_ints([1, -1, 0, 0, 0]),
            DivClass::from_ints([2, -1, -1, -1, -1]),
            DivClass::from_ints([2, -1, -1, -1, 0]),
        ];
        for e in &expect {
            assert!(rays.contains(e), "missing {e}");
        }
    }

    #[test]
    fn effectivity_examples() {
        assert!(!is_effective(&(&DivClass::e(1) - &DivClass::e(2))));
        assert!(is_effective(&-canonical_class()));
        assert!(!is_effective(&-DivClass::l()));
        // half a (-1)-curve is effective as a Q-class
        assert!(is_effective(&DivClass::e(1).scale(&crate::rational::qr(1, 2))));
    }

    #[test]
    fn section_counts() {
        assert_eq!(h0(&DivClass::from_ints([0, -1, 1, 0, 0])), Ok(0));
        assert_eq!(h0(&DivClass::l()), Ok(3));
        assert_eq!(h0(&DivClass::from_ints([3, 0, -2, -1, -1])), Ok(5));
        assert_eq!(h0(&DivClass::l().scale(&crate::rational::qr(1, 2))), Err(PicardError::NonIntegral));
        assert_eq!(h0(&DivClass::zero()), Ok(1));
    }

    #[test]
    fn display() {
        assert_eq!(DivClass::from_ints([3, 1, -3, -1, -1]).to_string(), "3l + e1 - 3e2 - e3 - e4");
        assert_eq!(DivClass::zero().to_string(), "0");
    }
}
