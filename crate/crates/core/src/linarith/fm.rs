//! Fourier–Motzkin elimination with Chernikov pruning.
//!
//! Every derived row remembers its multipliers over the input rows, so an
//! infeasibility comes with a Farkas certificate that is checked before it
//! is returned. A feasible system yields a witness by back-substitution,
//! which is also checked.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Signed, Zero};

use super::{Constraint, Farkas, Rel};
use crate::poly::Mono;
use crate::rational::{q, Q};

#[derive(Clone, Debug)]
pub enum FmOutcome {
    Infeasible(Farkas),
    /// Values for every atom of the input; absent atoms are zero.
    Feasible(BTreeMap<Mono, Q>),
}

impl FmOutcome {
    pub fn is_infeasible(&self) -> bool {
        matches!(self, FmOutcome::Infeasible(_))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
struct Bits(Vec<u64>);

impl Bits {
    fn single(i: usize) -> Self {
        let mut b = Bits(vec![0; i / 64 + 1]);
        b.0[i / 64] |= 1 << (i % 64);
        b
    }

    fn union(&self, o: &Bits) -> Bits {
        let n = self.0.len().max(o.0.len());
        Bits((0..n)
            .map(|k| self.0.get(k).copied().unwrap_or(0) | o.0.get(k).copied().unwrap_or(0))
            .collect())
    }

    fn count(&self) -> u32 {
        self.0.iter().map(|w| w.count_ones()).sum()
    }
}

#[derive(Clone, Debug)]
struct Row {
    coefs: Vec<Q>,
    constant: Q,
    strict: bool,
    prov: BTreeMap<usize, Q>,
    hist: Bits,
}

impl Row {
    fn is_trivial(&self) -> bool {
        self.coefs.iter().all(Zero::is_zero)
    }

    /// `self + k·other`
    fn axpy(&self, k: &Q, other: &Row) -> Row {
        let coefs = self.coefs.iter().zip(&other.coefs).map(|(a, b)| a + k * b).collect();
        let mut prov = self.prov.clone();
        for (i, m) in &other.prov {
            let e = prov.entry(*i).or_insert_with(Q::zero);
            *e += k * m;
            if e.is_zero() {
                prov.remove(i);
            }
        }
        Row {
            coefs,
            constant: &self.constant + k * &other.constant,
            strict: self.strict,
            prov,
            hist: self.hist.clone(),
        }
    }

    fn scaled(&self, k: &Q) -> Row {
        Row {
            coefs: self.coefs.iter().map(|a| a * k).collect(),
            constant: &self.constant * k,
            strict: self.strict,
            prov: self.prov.iter().map(|(i, m)| (*i, m * k)).collect(),
            hist: self.hist.clone(),
        }
    }

    fn value_without(&self, skip: usize, env: &[Option<Q>]) -> Q {
        let mut v = self.constant.clone();
        for (j, c) in self.coefs.iter().enumerate() {
            if j != skip && !c.is_zero() {
                if let Some(x) = &env[j] {
                    v += c * x;
                }
            }
        }
        v
    }
}

enum Step {
    /// atom = -(rest of row)/coef
    Subst(usize, Row),
    Elim(usize, Vec<Row>),
}

/// Decides feasibility of `sys` over the rationals (atoms are independent).
pub fn fm_infeasible(sys: &[Constraint]) -> FmOutcome {
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
    let width = atoms.len();
    let mut eqs = Vec::new();
    let mut ineqs = Vec::new();
    for (i, c) in sys.iter().enumerate() {
        let mut coefs = vec![Q::zero(); width];
        for (m, v) in c.expr.terms() {
            if !m.is_const() {
                coefs[index[m]] = v.clone();
            }
        }
        let row = Row {
            coefs,
            constant: c.expr.const_term(),
            strict: c.rel == Rel::Gt,
            prov: BTreeMap::from([(i, Q::one())]),
            hist: if c.rel == Rel::Eq { Bits::default() } else { Bits::single(i) },
        };
        if c.rel == Rel::Eq {
            eqs.push(row);
        } else {
            ineqs.push(row);
        }
    }

    // Chernikov pruning may discard a strict row that is implied only in its
    // non-strict form; a witness that fails the input sends us to the full
    // elimination, which is exact.
    for prune in [true, false] {
        let mut steps = Vec::new();
        match run(eqs.clone(), ineqs.clone(), &mut steps, prune) {
            Some(prov) => {
                let f = Farkas { multipliers: prov };
                assert!(f.verify(sys), "internal error: Fourier-Motzkin produced an invalid Farkas certificate");
                return FmOutcome::Infeasible(f);
            }
            None => {
                let env = back_substitute(width, &steps);
                let out: BTreeMap<Mono, Q> =
                    atoms.iter().cloned().zip(env).map(|(a, v)| (a, v.unwrap_or_else(Q::zero))).collect();
                if sys.iter().all(|c| c.holds_at(&out)) {
                    return FmOutcome::Feasible(out);
                }
                assert!(prune, "internal error: Fourier-Motzkin witness fails the input system");
            }
        }
    }
    unreachable!()
}

fn contradiction(row: &Row) -> bool {
    row.constant.is_negative() || (row.constant.is_zero() && row.strict)
}

fn run(mut eqs: Vec<Row>, mut ineqs: Vec<Row>, steps: &mut Vec<Step>, prune: bool) -> Option<BTreeMap<usize, Q>> {
    // Gaussian substitution of equalities.
    while let Some(e) = eqs.pop() {
        let Some(j) = e.coefs.iter().position(|c| !c.is_zero()) else {
            if e.constant.is_zero() {
                continue;
            }
            let s = if e.constant.is_positive() { -Q::one() } else { Q::one() };
            return Some(e.scaled(&s).prov);
        };
        let c = e.coefs[j].clone();
        for r in eqs.iter_mut().chain(ineqs.iter_mut()) {
            if !r.coefs[j].is_zero() {
                let k = -&r.coefs[j] / &c;
                *r = r.axpy(&k, &e);
            }
        }
        steps.push(Step::Subst(j, e));
    }

    let mut eliminated = 0u32;
    loop {
        let mut kept: Vec<Row> = Vec::new();
        for r in ineqs.drain(..) {
            if r.is_trivial() {
                if contradiction(&r) {
                    return Some(r.prov);
                }
            } else {
                kept.push(r);
            }
        }
        let rows = dedupe(kept);
        let width = rows.first().map(|r| r.coefs.len()).unwrap_or(0);
        let mut best: Option<(usize, i64)> = None;
        for j in 0..width {
            let (p, n) = rows.iter().fold((0i64, 0i64), |(p, n), r| {
                if r.coefs[j].is_positive() {
                    (p + 1, n)
                } else if r.coefs[j].is_negative() {
                    (p, n + 1)
                } else {
                    (p, n)
                }
            });
            if p + n == 0 {
                continue;
            }
            let cost = p * n - p - n;
            if best.map_or(true, |(_, b)| cost < b) {
                best = Some((j, cost));
            }
        }
        let Some((j, _)) = best else {
            return None;
        };
        eliminated += 1;
        let (with, without): (Vec<Row>, Vec<Row>) = rows.into_iter().partition(|r| !r.coefs[j].is_zero());
        let mut next = without;
        let pos: Vec<&Row> = with.iter().filter(|r| r.coefs[j].is_positive()).collect();
        let neg: Vec<&Row> = with.iter().filter(|r| r.coefs[j].is_negative()).collect();
        for p in &pos {
            for n in &neg {
                let hist = p.hist.union(&n.hist);
                if prune && hist.count() > eliminated + 1 {
                    continue;
                }
                let a = Q::one() / &p.coefs[j];
                let b = Q::one() / -&n.coefs[j];
                let mut r = p.scaled(&a).axpy(&b, n);
                r.coefs[j] = Q::zero();
                r.strict = p.strict || n.strict;
                r.hist = hist;
                next.push(r);
            }
        }
        steps.push(Step::Elim(j, with));
        ineqs = next;
    }
}

/// Keeps the tightest row per direction.
fn dedupe(rows: Vec<Row>) -> Vec<Row> {
    let mut best: HashMap<Vec<Q>, Row> = HashMap::new();
    let mut order = Vec::new();
    for r in rows {
        let lead = r.coefs.iter().find(|c| !c.is_zero()).expect("non-trivial row").abs();
        let r = r.scaled(&(Q::one() / lead));
        let key = r.coefs.clone();
        match best.get(&key) {
            Some(old) => {
                let tighter = r.constant < old.constant || (r.constant == old.constant && r.strict && !old.strict);
                if tighter {
                    best.insert(key, r);
                }
            }
            None => {
                order.push(key.clone());
                best.insert(key, r);
            }
        }
    }
    order.into_iter().map(|k| best.remove(&k).unwrap()).collect()
}

fn back_substitute(width: usize, steps: &[Step]) -> Vec<Option<Q>> {
    let mut env: Vec<Option<Q>> = vec![None; width];
    for step in steps.iter().rev() {
        match step {
            Step::Elim(j, rows) => {
                let mut lo: Option<(Q, bool)> = None;
                let mut hi: Option<(Q, bool)> = None;
                for r in rows {
                    let c = &r.coefs[*j];
                    let bound = -r.value_without(*j, &env) / c;
                    if c.is_positive() {
                        if lo.as_ref().map_or(true, |(b, s)| bound > *b || (bound == *b && r.strict && !s)) {
                            lo = Some((bound, r.strict));
                        }
                    } else if hi.as_ref().map_or(true, |(b, s)| bound < *b || (bound == *b && r.strict && !s)) {
                        hi = Some((bound, r.strict));
                    }
                }
                let v = match (lo, hi) {
                    (Some((l, _)), Some((h, _))) if l < h => (l + h) / q(2),
                    (Some((l, _)), Some(_)) => l,
                    (Some((l, s)), None) => if s { l + Q::one() } else { l },
                    (None, Some((h, s))) => if s { h - Q::one() } else { h },
                    (None, None) => Q::zero(),
                };
                env[*j] = Some(v);
            }
            Step::Subst(j, row) => {
                let v = -row.value_without(*j, &env) / &row.coefs[*j];
                env[*j] = Some(v);
            }
        }
    }
    env
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Poly;

    fn v(s: &str) -> Poly {
        Poly::var(s)
    }

    #[test]
    fn strict_tie_is_infeasible() {
        let sys = vec![
            Constraint::le(&v("x"), &Poly::int(2)),
            Constraint::gt(&v("x"), &Poly::int(2)),
        ];
        assert!(fm_infeasible(&sys).is_infeasible());
    }

    #[test]
    fn symbolic_n_chain() {
        // n ≥ 2, 2n ≥ a - b + 3, 2n + a - b > 4n - 3
        let n = v("n");
        let ab = &v("a") - &v("b");
        let sys = vec![
            Constraint::ge(&n, &Poly::int(2)),
            Constraint::ge(&n.scale(&q(2)), &(&ab + &Poly::int(3))),
            Constraint::gt(&(&n.scale(&q(2)) + &ab), &(&n.scale(&q(4)) - &Poly::int(3))),
        ];
        assert!(fm_infeasible(&sys).is_infeasible());
    }

    #[test]
    fn witness_satisfies_system() {
        let sys = vec![
            Constraint::ge(&v("x"), &Poly::int(1)),
            Constraint::lt(&(&v("x") + &v("y")), &Poly::int(3)),
            Constraint::eq(&(&v("y") - &v("z")), &Poly::int(1)),
            Constraint::gt(&v("z"), &Poly::int(-5)),
        ];
        match fm_infeasible(&sys) {
            FmOutcome::Feasible(env) => assert!(sys.iter().all(|c| c.holds_at(&env))),
            FmOutcome::Infeasible(_) => panic!("system is satisfiable"),
        }
    }

    #[test]
    fn inconsistent_equalities() {
        let sys = vec![
            Constraint::eq(&v("x"), &Poly::int(1)),
            Constraint::eq(&v("x"), &Poly::int(2)),
        ];
        assert!(fm_infeasible(&sys).is_infeasible());
    }
}
