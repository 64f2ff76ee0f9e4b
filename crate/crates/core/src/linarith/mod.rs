//! Exact linear arithmetic over the rationals.
//!
//! Constraints are `expr ≥ 0`, `expr > 0` or `expr = 0`. Non-constant
//! monomials of `expr` are opaque atoms, so products introduced by the
//! certificate layer are handled as fresh unknowns.

mod farkas;
mod fm;
mod simplex;

use std::collections::BTreeMap;
use std::fmt;

pub use farkas::Farkas;
pub use fm::{fm_infeasible, FmOutcome};
pub use simplex::{lp_feasible, lp_maximize, LpOutcome};

use crate::poly::{Mono, Poly};
use crate::rational::Q;
use num_traits::{Signed, Zero};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rel {
    Ge,
    Gt,
    Eq,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub expr: Poly,
    pub rel: Rel,
}

impl Constraint {
    pub fn new(expr: Poly, rel: Rel) -> Self {
        Constraint { expr, rel }
    }

    /// `lhs ≥ rhs`
    pub fn ge(lhs: &Poly, rhs: &Poly) -> Self {
        Constraint::new(lhs - rhs, Rel::Ge)
    }

    /// `lhs > rhs`
    pub fn gt(lhs: &Poly, rhs: &Poly) -> Self {
        Constraint::new(lhs - rhs, Rel::Gt)
    }

    /// `lhs ≤ rhs`
    pub fn le(lhs: &Poly, rhs: &Poly) -> Self {
        Constraint::new(rhs - lhs, Rel::Ge)
    }

    /// `lhs < rhs`
    pub fn lt(lhs: &Poly, rhs: &Poly) -> Self {
        Constraint::new(rhs - lhs, Rel::Gt)
    }

    pub fn eq(lhs: &Poly, rhs: &Poly) -> Self {
        Constraint::new(lhs - rhs, Rel::Eq)
    }

    pub fn is_strict(&self) -> bool {
        self.rel == Rel::Gt
    }

    /// The constraints whose conjunction is the negation of `self`.
    /// An equality negates to a disjunction, so it yields two alternatives.
    pub fn negations(&self) -> Vec<Constraint> {
        match self.rel {
            Rel::Ge => vec![Constraint::new(-&self.expr, Rel::Gt)],
            Rel::Gt => vec![Constraint::new(-&self.expr, Rel::Ge)],
            Rel::Eq => vec![
                Constraint::new(self.expr.clone(), Rel::Gt),
                Constraint::new(-&self.expr, Rel::Gt),
            ],
        }
    }

    pub fn holds_at(&self, env: &BTreeMap<Mono, Q>) -> bool {
        let v = self.expr.eval_atoms(env);
        match self.rel {
            Rel::Ge => !v.is_negative(),
            Rel::Gt => v.is_positive(),
            Rel::Eq => v.is_zero(),
        }
    }

    pub fn subst(&self, name: &str, value: &Poly) -> Constraint {
        Constraint::new(self.expr.subst(name, value), self.rel)
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = match self.rel {
            Rel::Ge => ">=",
            Rel::Gt => ">",
            Rel::Eq => "=",
        };
        write!(f, "{} {} 0", self.expr, op)
    }
}

/// Does `store` entail `claim` over the rationals? Returns the Farkas
/// certificate(s) refuting `store ∧ ¬claim` on success.
pub fn entails(store: &[Constraint], claim: &Constraint) -> Option<Vec<Farkas>> {
    let mut certs = Vec::new();
    for neg in claim.negations() {
        let mut sys = store.to_vec();
        sys.push(neg);
        match fm_infeasible(&sys) {
            FmOutcome::Infeasible(f) => certs.push(f),
            FmOutcome::Feasible(_) => return None,
        }
    }
    Some(certs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn v(s: &str) -> Poly {
        Poly::var(s)
    }

    #[test]
    fn entailment_through_a_chain() {
        let store = vec![
            Constraint::ge(&v("x"), &v("y")),
            Constraint::gt(&v("y"), &Poly::int(2)),
        ];
        assert!(entails(&store, &Constraint::gt(&v("x"), &Poly::int(2))).is_some());
        assert!(entails(&store, &Constraint::gt(&v("x"), &Poly::int(3))).is_none());
        let eq = vec![Constraint::eq(&v("x"), &Poly::constant(q(1)))];
        assert!(entails(&eq, &Constraint::eq(&v("x"), &Poly::int(1))).is_some());
    }
}
