//! Dense exact simplex (Bland's rule, two phases). Used as an oracle that is
//! independent of Fourier–Motzkin, and for cone-membership tests.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Signed, Zero};

use super::{Constraint, Rel};
use crate::poly::Mono;
use crate::rational::Q;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Infeasible,
    Unbounded,
    Optimal { value: Q, point: Vec<Q> },
}

struct Tableau {
    // basic[i] = b[i] - Σ_k a[i][k] · nonbasic[k]
    a: Vec<Vec<Q>>,
    b: Vec<Q>,
    c: Vec<Q>,
    v: Q,
    basic: Vec<usize>,
    nonbasic: Vec<usize>,
}

impl Tableau {
    fn pivot(&mut self, l: usize, e: usize) {
        let piv = self.a[l][e].clone();
        let inv = Q::one() / &piv;
        // row l now expresses the entering variable
        self.b[l] = &self.b[l] * &inv;
        for k in 0..self.nonbasic.len() {
            if k != e {
                self.a[l][k] = &self.a[l][k] * &inv;
            }
        }
        self.a[l][e] = inv.clone();
        for i in 0..self.b.len() {
            if i == l || self.a[i][e].is_zero() {
                continue;
            }
            let f = self.a[i][e].clone();
            self.b[i] = &self.b[i] - &f * &self.b[l];
            for k in 0..self.nonbasic.len() {
                if k != e {
                    let t = &f * &self.a[l][k];
                    self.a[i][k] -= t;
                }
            }
            self.a[i][e] = -&f * &inv;
        }
        let f = self.c[e].clone();
        if !f.is_zero() {
            self.v = &self.v + &f * &self.b[l];
            for k in 0..self.nonbasic.len() {
                if k != e {
                    let t = &f * &self.a[l][k];
                    self.c[k] -= t;
                }
            }
            self.c[e] = -&f * &inv;
        }
        std::mem::swap(&mut self.basic[l], &mut self.nonbasic[e]);
    }

    /// Runs to optimality; `false` if unbounded.
    fn optimize(&mut self) -> bool {
        loop {
            let entering = (0..self.nonbasic.len())
                .filter(|&k| self.c[k].is_positive())
                .min_by_key(|&k| self.nonbasic[k]);
            let Some(e) = entering else { return true };
            let mut leave: Option<(usize, Q)> = None;
            for i in 0..self.b.len() {
                if self.a[i][e].is_positive() {
                    let r = &self.b[i] / &self.a[i][e];
                    let better = match &leave {
                        None => true,
                        Some((li, lr)) => r < *lr || (r == *lr && self.basic[i] < self.basic[*li]),
                    };
                    if better {
                        leave = Some((i, r));
                    }
                }
            }
            match leave {
                Some((l, _)) => self.pivot(l, e),
                None => return false,
            }
        }
    }
}

/// Maximise `c·y` subject to `A y ≤ b`, `y ≥ 0`.
pub fn lp_maximize(a: &[Vec<Q>], b: &[Q], c: &[Q]) -> LpOutcome {
    let m = b.len();
    let n = c.len();
    let mut t = Tableau {
        a: a.to_vec(),
        b: b.to_vec(),
        c: vec![Q::zero(); n],
        v: Q::zero(),
        basic: (n..n + m).collect(),
        nonbasic: (0..n).collect(),
    };
    let worst = (0..m).min_by(|&i, &j| t.b[i].cmp(&t.b[j]));
    if let Some(l) = worst.filter(|&l| t.b[l].is_negative()) {
        // phase one with the auxiliary variable x0 = n + m
        let x0 = n + m;
        for row in t.a.iter_mut() {
            row.push(-Q::one());
        }
        t.nonbasic.push(x0);
        t.c = vec![Q::zero(); n + 1];
        t.c[n] = -Q::one();
        t.pivot(l, n);
        t.optimize();
        if t.v.is_negative() {
            return LpOutcome::Infeasible;
        }
        if let Some(i) = t.basic.iter().position(|&x| x == x0) {
            let e = (0..t.nonbasic.len()).find(|&k| !t.a[i][k].is_zero()).expect("degenerate auxiliary row");
            t.pivot(i, e);
        }
        let k = t.nonbasic.iter().position(|&x| x == x0).unwrap();
        for row in t.a.iter_mut() {
            row.remove(k);
        }
        t.nonbasic.remove(k);
        t.c = vec![Q::zero(); n];
        t.v = Q::zero();
    }
    // express the objective in the current nonbasic variables
    for (j, cj) in c.iter().enumerate() {
        if cj.is_zero() {
            continue;
        }
        if let Some(k) = t.nonbasic.iter().position(|&x| x == j) {
            t.c[k] += cj;
        } else {
            let i = t.basic.iter().position(|&x| x == j).unwrap();
            t.v = &t.v + cj * &t.b[i];
            for k in 0..t.nonbasic.len() {
                let d = cj * &t.a[i][k];
                t.c[k] -= d;
            }
        }
    }
    if !t.optimize() {
        return LpOutcome::Unbounded;
    }
    let mut point = vec![Q::zero(); n];
    for (i, &x) in t.basic.iter().enumerate() {
        if x < n {
            point[x] = t.b[i].clone();
        }
    }
    LpOutcome::Optimal { value: t.v, point }
}

/// Feasibility of a constraint system over the rationals (atoms free).
/// Strict rows are handled by maximising a common slack `s ≤ 1`.
pub fn lp_feasible(sys: &[Constraint]) -> Option<BTreeMap<Mono, Q>> {
    let mut atoms: Vec<Mono> = Vec::new();
    let mut index: HashMap<Mono, usize> = HashMap::new();
    for c in sys {
        for a in c.expr.atoms() {
            if !index.contains_key(a) {
                index.insert(a.clone(), atoms.len());
                atoms.push(a.clone());
            }
        }
    }
    let k = atoms.len();
    // columns: u_0..u_k, v_0..v_k (atom = u - v), s
    let width = 2 * k + 1;
    let s = 2 * k;
    let mut a = Vec::new();
    let mut b = Vec::new();
    let push_ge = |c: &Constraint, strict: bool, sign: Q, a: &mut Vec<Vec<Q>>, b: &mut Vec<Q>| {
        // sign·expr ≥ (s if strict) becomes -sign·lin + s ≤ sign·const
        let mut row = vec![Q::zero(); width];
        for (m, v) in c.expr.terms() {
            if !m.is_const() {
                let j = index[m];
                row[j] = -&sign * v;
                row[k + j] = &sign * v;
            }
        }
        if strict {
            row[s] = Q::one();
        }
        a.push(row);
        b.push(&sign * c.expr.const_term());
    };
    let mut any_strict = false;
    for c in sys {
        match c.rel {
            Rel::Ge => push_ge(c, false, Q::one(), &mut a, &mut b),
            Rel::Gt => {
                any_strict = true;
                push_ge(c, true, Q::one(), &mut a, &mut b)
            }
            Rel::Eq => {
                push_ge(c, false, Q::one(), &mut a, &mut b);
                push_ge(c, false, -Q::one(), &mut a, &mut b);
            }
        }
    }
    let mut cap = vec![Q::zero(); width];
    cap[s] = Q::one();
    a.push(cap);
    b.push(Q::one());
    let mut obj = vec![Q::zero(); width];
    obj[s] = Q::one();
    match lp_maximize(&a, &b, &obj) {
        LpOutcome::Infeasible => None,
        LpOutcome::Unbounded => unreachable!("slack is capped"),
        LpOutcome::Optimal { value, point } => {
            if any_strict && !value.is_positive() {
                return None;
            }
            Some(atoms.into_iter().enumerate().map(|(j, m)| (m, &point[j] - &point[k + j])).collect())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Poly;
    use crate::rational::q;

    #[test]
    fn small_lp() {
        // max 3x + 2y, x + y ≤ 4, x + 3y ≤ 6, x ≤ 3
        let a = vec![vec![q(1), q(1)], vec![q(1), q(3)], vec![q(1), q(0)]];
        let b = vec![q(4), q(6), q(3)];
        match lp_maximize(&a, &b, &[q(3), q(2)]) {
            LpOutcome::Optimal { value, .. } => assert_eq!(value, q(11)),
            o => panic!("{o:?}"),
        }
    }

    #[test]
    fn phase_one_detects_infeasible() {
        let a = vec![vec![q(1)], vec![q(-1)]];
        assert_eq!(lp_maximize(&a, &[q(1), q(-2)], &[q(0)]), LpOutcome::Infeasible);
    }

    #[test]
    fn strictness() {
        let x = Poly::var("x");
        let open = vec![Constraint::gt(&x, &Poly::int(0)), Constraint::lt(&x, &Poly::int(0))];
        assert!(lp_feasible(&open).is_none());
        let closed = vec![Constraint::ge(&x, &Poly::int(0)), Constraint::le(&x, &Poly::int(0))];
        let env = lp_feasible(&closed).unwrap();
        assert!(closed.iter().all(|c| c.holds_at(&env)));
    }
}
