//! Sparse multivariate polynomials with rational coefficients.
//!
//! Only degree ≤ 2 ever shows up in practice. The linear-arithmetic layer
//! treats every non-constant monomial as an opaque atom.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use crate::rational::{fmt_q, q, Q};

/// A monomial: sorted variable names with repetition. Empty means constant.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Mono(Vec<String>);

impl Mono {
    pub fn one() -> Self {
        Mono(Vec::new())
    }

    pub fn var(name: &str) -> Self {
        Mono(vec![name.to_string()])
    }

    pub fn vars(&self) -> &[String] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn is_const(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mul(&self, other: &Mono) -> Mono {
        let mut v = self.0.clone();
        v.extend(other.0.iter().cloned());
        v.sort();
        Mono(v)
    }
}

impl fmt::Display for Mono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", self.0.join("*"))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Poly {
    terms: BTreeMap<Mono, Q>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn constant(c: Q) -> Self {
        let mut p = Poly::zero();
        p.add_term(Mono::one(), c);
        p
    }

    pub fn int(c: i64) -> Self {
        Poly::constant(q(c))
    }

    pub fn var(name: &str) -> Self {
        let mut p = Poly::zero();
        p.add_term(Mono::var(name), Q::one());
        p
    }

    pub fn term(c: Q, m: Mono) -> Self {
        let mut p = Poly::zero();
        p.add_term(m, c);
        p
    }

    pub fn add_term(&mut self, m: Mono, c: Q) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(m.clone()).or_insert_with(Q::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &Q)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Mono) -> Q {
        self.terms.get(m).cloned().unwrap_or_else(Q::zero)
    }

    pub fn const_term(&self) -> Q {
        self.coeff(&Mono::one())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Mono::is_const)
    }

    pub fn as_constant(&self) -> Option<Q> {
        self.is_constant().then(|| self.const_term())
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(Mono::degree).max().unwrap_or(0)
    }

    /// Non-constant monomials, i.e. the atoms seen by linear arithmetic.
    pub fn atoms(&self) -> impl Iterator<Item = &Mono> {
        self.terms.keys().filter(|m| !m.is_const())
    }

    pub fn variables(&self) -> BTreeSet<String> {
        self.terms
            .keys()
            .flat_map(|m| m.vars().iter().cloned())
            .collect()
    }

    pub fn scale(&self, c: &Q) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    /// Replaces every occurrence of `name` by `value`.
    pub fn subst(&self, name: &str, value: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut acc = Poly::constant(c.clone());
            let mut rest = Vec::new();
            for v in m.vars() {
                if v == name {
                    acc = &acc * value;
                } else {
                    rest.push(v.clone());
                }
            }
            let rest = Mono(rest);
            for (m2, c2) in acc.terms {
                out.add_term(m2.mul(&rest), c2);
            }
        }
        out
    }

    /// Evaluates with every variable bound; `None` if one is missing.
    pub fn eval(&self, env: &BTreeMap<String, Q>) -> Option<Q> {
        let mut total = Q::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for v in m.vars() {
                t *= env.get(v)?;
            }
            total += t;
        }
        Some(total)
    }

    /// Evaluates treating each monomial as an atom with a value of its own.
    pub fn eval_atoms(&self, env: &BTreeMap<Mono, Q>) -> Q {
        let mut total = Q::zero();
        for (m, c) in &self.terms {
            if m.is_const() {
                total += c;
            } else {
                total += c * env.get(m).cloned().unwrap_or_else(Q::zero);
            }
        }
        total
    }

    /// Splits off the coefficient of the linear atom `name`; fails if `name`
    /// also sits inside a product.
    pub fn linear_coeff(&self, name: &str) -> Option<Q> {
        let mut c = Q::zero();
        for (m, v) in &self.terms {
            let k = m.vars().iter().filter(|x| *x == name).count();
            match (k, m.degree()) {
                (0, _) => {}
                (1, 1) => c += v,
                _ => return None,
            }
        }
        Some(c)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        // constant last reads more naturally: 4n - 3
        let mut ordered: Vec<_> = self.terms.iter().filter(|(m, _)| !m.is_const()).collect();
        if let Some(c) = self.terms.get_key_value(&Mono::one()) {
            ordered.push(c);
        }
        for (m, c) in ordered {
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            if m.is_const() {
                write!(f, "{}", fmt_q(&a))?;
            } else if a.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{}{}", fmt_q(&a), m)?;
            }
        }
        Ok(())
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(&-Q::one())
    }
}

macro_rules! owned_ops {
    ($tr:ident, $f:ident) => {
        impl $tr for Poly {
            type Output = Poly;
            fn $f(self, rhs: Poly) -> Poly {
                (&self).$f(&rhs)
            }
        }
    };
}
owned_ops!(Add, add);
owned_ops!(Sub, sub);
owned_ops!(Mul, mul);

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qr;

    #[test]
    fn arithmetic_and_display() {
        let n = Poly::var("n");
        let p = &n.scale(&q(4)) - &Poly::int(3);
        assert_eq!(p.to_string(), "4n - 3");
        let sq = &p * &p;
        assert_eq!(sq.coeff(&Mono::var("n").mul(&Mono::var("n"))), q(16));
        assert_eq!(sq.const_term(), q(9));
        assert_eq!((&p - &p), Poly::zero());
    }

    #[test]
    fn substitution_and_eval() {
        let x = Poly::var("x");
        let y = Poly::var("y");
        let p = &(&x * &y) + &x;
        let s = p.subst("x", &Poly::constant(qr(1, 2)));
        let mut env = BTreeMap::new();
        env.insert("y".to_string(), q(4));
        assert_eq!(s.eval(&env), Some(q(2) + qr(1, 2)));
        assert_eq!(p.linear_coeff("x"), None);
        assert_eq!(p.linear_coeff("z"), Some(q(0)));
    }
}
