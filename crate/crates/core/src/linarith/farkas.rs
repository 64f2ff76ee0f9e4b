use std::collections::BTreeMap;

use num_traits::{Signed, Zero};

use super::{Constraint, Rel};
use crate::poly::Poly;
use crate::rational::Q;

/// Multipliers over the rows of a system whose combination is a constant
/// contradiction: `Σ λᵢ·exprᵢ = c` with `c < 0`, or `c = 0` and some strict
/// row used with positive weight. Equality rows may take either sign.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Farkas {
    pub multipliers: BTreeMap<usize, Q>,
}

impl Farkas {
    pub fn combination(&self, rows: &[Constraint]) -> Option<Poly> {
        let mut sum = Poly::zero();
        for (&i, lam) in &self.multipliers {
            sum = &sum + &rows.get(i)?.expr.scale(lam);
        }
        Some(sum)
    }

    pub fn verify(&self, rows: &[Constraint]) -> bool {
        let mut strict = false;
        for (&i, lam) in &self.multipliers {
            let Some(row) = rows.get(i) else { return false };
            match row.rel {
                Rel::Eq => {}
                Rel::Ge | Rel::Gt if lam.is_negative() => return false,
                Rel::Gt if lam.is_positive() => strict = true,
                _ => {}
            }
        }
        let Some(sum) = self.combination(rows) else {
            return false;
        };
        match sum.as_constant() {
            Some(c) => c.is_negative() || (c.is_zero() && strict),
            None => false,
        }
    }
}
