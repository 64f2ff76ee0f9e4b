//! Step-by-step replay of a certificate against a linear constraint store.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Signed, Zero};

use super::ast::{fixed_part, BPrime, Case, Certificate, DAtom, Decomposition, DivExpr, Step, StepKind, Tag};
use crate::bicover::CurveX;
use crate::linarith::{entails, fm_infeasible, Constraint, FmOutcome, Rel};
use crate::picard::{canonical_class, is_effective, is_nef, pair, DivClass};
use crate::poly::{Mono, Poly};
use crate::rational::{fmt_q, q, qr, Q};
use crate::surface::Catalog;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Valid,
    Invalid { step: String, reason: String },
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        *self == Verdict::Valid
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Valid => write!(f, "VALID"),
            Verdict::Invalid { step, reason } => write!(f, "INVALID at step {step}: {reason}"),
        }
    }
}

struct Fail(String);

type Res<T> = Result<T, Fail>;

fn fail<T>(msg: impl Into<String>) -> Res<T> {
    Err(Fail(msg.into()))
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Side {
    Up,
    Down,
}

#[derive(Clone)]
struct Frame {
    side: Side,
    /// λ with target ≡ φ*(λ(-K_Y)) upstairs or λ(-K_Y) downstairs.
    lambda: Poly,
    /// (variable, curve) for every term; curve names in the case of the side.
    terms: Vec<(String, String)>,
    atleast: Vec<(String, Q)>,
}

#[derive(Clone)]
struct State<'a> {
    cat: &'a Catalog,
    tag: Tag,
    n_value: Option<Q>,
    n_lo: Option<i64>,
    store: Vec<Constraint>,
    frame: Frame,
    /// Upper-case names of rigid curves in the fixed part, with multiplicity.
    fixed: BTreeMap<String, Q>,
    inside: Vec<String>,
    outside: Vec<String>,
    off_branch: bool,
    mult: Option<String>,
}

fn negk() -> DivClass {
    -canonical_class()
}

fn up(name: &str) -> String {
    name.to_ascii_uppercase()
}

impl<'a> State<'a> {
    fn fix(&self, p: &Poly) -> Poly {
        match &self.n_value {
            Some(v) => p.subst("n", &Poly::constant(v.clone())),
            None => p.clone(),
        }
    }

    fn fixc(&self, c: &Constraint) -> Constraint {
        Constraint::new(self.fix(&c.expr), c.rel)
    }

    fn tau(&self) -> Poly {
        self.fix(&self.tag.threshold())
    }

    fn push(&mut self, c: Constraint) {
        let c = self.fixc(&c);
        self.store.push(c);
    }

    fn entailed(&self, c: &Constraint) -> bool {
        entails(&self.store, &self.fixc(c)).is_some()
    }

    fn require(&self, c: &Constraint, what: &str) -> Res<()> {
        if self.entailed(c) {
            Ok(())
        } else {
            fail(format!("{what}: the store does not entail {}", self.fixc(c)))
        }
    }

    fn meets(&self, a: &str, b: &str) -> bool {
        self.cat.meets(&a.to_ascii_lowercase(), &b.to_ascii_lowercase()).unwrap_or(false)
    }

    fn is_branch(&self, name: &str) -> bool {
        self.cat.lookup(&name.to_ascii_lowercase()).map(|c| c.branch.is_some()).unwrap_or(false)
    }

    /// Can the point lie on this rigid curve? Names in either case.
    fn possible(&self, name: &str) -> bool {
        let n = up(name);
        if self.outside.contains(&n) {
            return false;
        }
        if self.off_branch {
            return !self.is_branch(&n);
        }
        match self.inside.as_slice() {
            [] => true,
            [a] => *a == n || self.meets(a, &n),
            v => v.contains(&n),
        }
    }

    fn certain(&self, name: &str) -> bool {
        self.inside.contains(&up(name))
    }

    fn var_of(&self, curve: &str) -> Option<&str> {
        self.frame.terms.iter().find(|(_, c)| c == curve).map(|(v, _)| v.as_str())
    }

    fn atleast_of(&self, curve: &str) -> Option<&Q> {
        self.frame.atleast.iter().find(|(c, _)| c == curve).map(|(_, k)| k)
    }

    /// The class v with atom ≡ φ*(v) upstairs, or the class of the atom downstairs.
    /// Symbolic atoms are not classes.
    fn atom_class(&self, a: &DAtom) -> Res<DivClass> {
        match (a, self.frame.side) {
            (DAtom::Curve(c), Side::Up) => CurveX::named(self.cat, c).map(|x| x.class()).or_else(|e| fail(e.to_string())),
            (DAtom::Curve(c), Side::Down) | (DAtom::Pull(c), _) => {
                self.cat.lookup(c).map(|x| x.cls.clone()).or_else(|e| fail(e.to_string()))
            }
            (DAtom::K, Side::Up) => Ok(negk().scale(&qr(1, 2))),
            (DAtom::K, Side::Down) => Ok(canonical_class()),
            _ => unreachable!("symbolic atoms carry no class"),
        }
    }

    fn factor(&self) -> Q {
        match self.frame.side {
            Side::Up => q(4),
            Side::Down => q(1),
        }
    }

    fn ixn_classes(&self, a: &DivClass, b: &DivClass) -> Q {
        self.factor() * pair(a, b)
    }

    /// target·Y for a numeric class v of Y.
    fn target_dot(&self, v: &DivClass) -> Poly {
        self.fix(&self.frame.lambda).scale(&self.ixn_classes(&negk(), v))
    }

    /// Σ a_v C_v · Y
    fn terms_dot(&self, v: &DivClass, skip: &BTreeSet<String>) -> Res<Poly> {
        let mut p = Poly::zero();
        for (var, c) in &self.frame.terms {
            if skip.contains(c) {
                continue;
            }
            let cv = self.atom_class(&DAtom::Curve(c.clone()))?;
            p = &p + &Poly::var(var).scale(&self.ixn_classes(&cv, v));
        }
        Ok(p)
    }

    fn atleast_dot(&self, v: &DivClass) -> Res<Q> {
        let mut s = Q::zero();
        for (c, k) in &self.frame.atleast {
            s += k * self.ixn_classes(&self.atom_class(&DAtom::Curve(c.clone()))?, v);
        }
        Ok(s)
    }

    fn numeric_class(&self, e: &DivExpr) -> Res<DivClass> {
        let mut acc = DivClass::zero();
        for (a, k) in &e.parts {
            acc = &acc + &self.atom_class(a)?.scale(k);
        }
        Ok(acc)
    }

    /// Ω·Y = target·Y − Σ a_v C_v·Y
    fn residual_dot(&self, v: &DivClass) -> Res<Poly> {
        Ok(&self.target_dot(v) - &self.terms_dot(v, &BTreeSet::new())?)
    }

    fn curve_class(&self, c: &str) -> Res<DivClass> {
        self.atom_class(&DAtom::Curve(c.to_string()))
    }

    fn is_term(&self, c: &str) -> bool {
        self.var_of(c).is_some()
    }

    fn b_coefficient(&self, c: &str) -> Poly {
        if self.frame.side == Side::Down && self.is_branch(c) {
            self.tau().scale(&qr(1, 2))
        } else {
            Poly::zero()
        }
    }
}

/// Checks a certificate over its declared domain.
pub fn check_certificate(cat: &Catalog, cert: &Certificate) -> Verdict {
    run(cat, cert, None)
}

/// Checks a certificate with n fixed to `n`.
pub fn check_at(cat: &Catalog, cert: &Certificate, n: i64) -> Verdict {
    run(cat, cert, Some(n))
}

fn run(cat: &Catalog, cert: &Certificate, n: Option<i64>) -> Verdict {
    let invalid = |step: &str, reason: String| Verdict::Invalid { step: step.into(), reason };
    if let (Some(k), Some(lo)) = (n, cert.n_min) {
        if k < lo {
            return invalid("domain", format!("n = {k} lies outside n >= {lo}"));
        }
    }
    let d = &cert.decomposition;
    let fixed = fixed_part(cat, cert.tag);
    let mut st = State {
        cat,
        tag: cert.tag,
        n_value: n.filter(|_| cert.n_min.is_some()).map(q),
        n_lo: cert.n_min,
        store: Vec::new(),
        frame: Frame {
            side: Side::Up,
            lambda: cert.tag.lambda(),
            terms: d.terms.iter().map(|t| (t.var.clone(), t.curve.clone())).collect(),
            atleast: d.atleast.clone(),
        },
        fixed,
        inside: cert.locus.inside.clone(),
        outside: cert.locus.outside.clone(),
        off_branch: cert.locus.off_branch,
        mult: None,
    };
    if let Err(Fail(r)) = validate_decomposition(&st, d, Side::Up) {
        return invalid("decompose", r);
    }
    if st.n_value.is_none() {
        if let Some(lo) = cert.n_min {
            st.push(Constraint::ge(&Poly::var("n"), &Poly::int(lo)));
        }
    }
    for t in &d.terms {
        st.push(Constraint::ge(&Poly::var(&t.var), &Poly::constant(t.lower.clone())));
    }
    match steps(&mut st, &cert.steps) {
        Ok(()) => Verdict::Valid,
        Err((step, reason)) => invalid(&step, reason),
    }
}

fn validate_decomposition(st: &State, d: &Decomposition, side: Side) -> Res<()> {
    let ram = |c: &str| if side == Side::Down && st.is_branch(c) { q(2) } else { q(1) };
    let f = |c: &str| st.fixed.get(&up(c)).cloned().unwrap_or_else(Q::zero) / ram(c);
    for t in &d.terms {
        if t.lower.is_negative() || t.lower > f(&t.curve) {
            return fail(format!(
                "the bound {} >= {} is not justified by the fixed part (multiplicity {} along {})",
                t.var,
                fmt_q(&t.lower),
                fmt_q(&f(&t.curve)),
                t.curve
            ));
        }
    }
    let terms: BTreeSet<&str> = d.terms.iter().map(|t| t.curve.as_str()).collect();
    let excl: BTreeSet<&str> = d.exclude.iter().map(String::as_str).collect();
    if terms != excl {
        return fail("the residual must exclude exactly the term curves");
    }
    for (c, k) in &d.atleast {
        if terms.contains(c.as_str()) {
            return fail(format!("{c} is a term and cannot carry an atleast bound"));
        }
        if *k > f(c) {
            return fail(format!("the residual need not contain {} {c}", fmt_q(k)));
        }
    }
    Ok(())
}

fn steps(st: &mut State, list: &[Step]) -> Result<(), (String, String)> {
    for (i, s) in list.iter().enumerate() {
        let last = i + 1 == list.len();
        match &s.kind {
            StepKind::Split { var, cases } => {
                if !last {
                    return Err((s.id.clone(), "a split must be the last step".into()));
                }
                return split(st, s, var, cases);
            }
            StepKind::Contradiction => {
                return match fm_infeasible(&st.store) {
                    FmOutcome::Infeasible(_) => Ok(()),
                    FmOutcome::Feasible(w) => Err((s.id.clone(), format!("the store is satisfiable, e.g. {}", show_witness(&w)))),
                };
            }
            kind => step(st, kind).map_err(|Fail(r)| (s.id.clone(), r))?,
        }
    }
    let at = list.last().map_or_else(|| "end".to_string(), |s| s.id.clone());
    Err((at, "the steps end without a contradiction".into()))
}

fn show_witness(w: &BTreeMap<Mono, Q>) -> String {
    let parts: Vec<String> = w.iter().map(|(m, v)| format!("{m} = {}", fmt_q(v))).collect();
    if parts.is_empty() {
        "the empty assignment".into()
    } else {
        parts.join(", ")
    }
}

fn step(st: &mut State, kind: &StepKind) -> Res<()> {
    match kind {
        StepKind::Ixn { x, y, value } => ixn(st, x, y, value),
        StepKind::Mult { var } => {
            if st.frame.side != Side::Up {
                return fail("mult is an upstairs step");
            }
            let mu = Poly::var(var);
            let mut total = mu.clone();
            for (v, c) in st.frame.terms.clone() {
                if st.possible(&c) {
                    total = &total + &Poly::var(&v);
                }
            }
            st.push(Constraint::ge(&mu, &Poly::zero()));
            let tau = st.tau();
            st.push(Constraint::gt(&total, &tau));
            st.mult = Some(var.clone());
            Ok(())
        }
        StepKind::MultBound { var, curve } => {
            if st.frame.side != Side::Up || st.mult.as_deref() != Some(var.as_str()) {
                return fail("mult-bound needs a preceding mult step on X");
            }
            if !st.is_term(curve) || !st.certain(curve) {
                return fail(format!("{curve} must be a term curve through the point"));
            }
            let v = st.curve_class(curve)?;
            let bound = st.residual_dot(&v)?;
            st.push(Constraint::le(&Poly::var(var), &bound));
            Ok(())
        }
        StepKind::Adjunction { curve, drop, local, gives } => {
            adjunction(st, curve, drop, *local)?;
            if let Some(g) = gives {
                st.require(g, "gives")?;
                st.push(g.clone());
            }
            Ok(())
        }
        StepKind::Pushforward { decomposition } => {
            let lambda = match decomposition {
                Some(d) => d.lambda.clone(),
                None => st.tag.lambda(),
            };
            if st.fix(&lambda) != st.fix(&st.tag.lambda()) {
                return fail(format!("the push-forward has class {}(-K_Y)", st.tag.lambda()));
            }
            st.frame = Frame { side: Side::Down, lambda, terms: Vec::new(), atleast: Vec::new() };
            if let Some(d) = decomposition {
                validate_decomposition(st, d, Side::Down)?;
                st.frame.terms = d.terms.iter().map(|t| (t.var.clone(), t.curve.clone())).collect();
                st.frame.atleast = d.atleast.clone();
                for t in &d.terms {
                    st.push(Constraint::ge(&Poly::var(&t.var), &Poly::constant(t.lower.clone())));
                }
            }
            Ok(())
        }
        StepKind::Glct { mu } => glct(st, mu),
        StepKind::Product { x, y } => {
            let (x, y) = (st.fix(x), st.fix(y));
            let zero = Poly::zero();
            st.require(&Constraint::ge(&x, &zero), "product")?;
            st.require(&Constraint::ge(&y, &zero), "product")?;
            let strict = st.entailed(&Constraint::gt(&x, &zero)) && st.entailed(&Constraint::gt(&y, &zero));
            let xy = &x * &y;
            if xy.degree() > 2 {
                return fail("products are limited to degree two");
            }
            st.push(Constraint::new(xy, if strict { Rel::Gt } else { Rel::Ge }));
            Ok(())
        }
        StepKind::Round { claim } => round(st, claim),
        StepKind::Infer { claim } => {
            st.require(claim, "infer")?;
            st.push(claim.clone());
            Ok(())
        }
        StepKind::JiangZou { bprime, drop } => jiang_zou(st, bprime, drop),
        StepKind::Split { .. } | StepKind::Contradiction => unreachable!("handled by the caller"),
    }
}

fn ixn(st: &mut State, x: &DivExpr, y: &DivExpr, value: &Poly) -> Res<()> {
    let value = st.fix(value);
    let (sym, other) = match (x.is_symbolic(), y.is_symbolic()) {
        (true, true) => return fail("at most one side may be the target or the residual"),
        (true, false) => (Some(x), y),
        (false, true) => (Some(y), x),
        (false, false) => (None, x),
    };
    let Some(sym) = sym else {
        let got = st.ixn_classes(&st.numeric_class(x)?, &st.numeric_class(y)?);
        if value != Poly::constant(got.clone()) {
            return fail(format!("the intersection number is {}, not {value}", fmt_q(&got)));
        }
        return Ok(());
    };
    let one = |a: DAtom| sym.parts.len() == 1 && sym.parts.get(&a).is_some_and(Q::is_one);
    let on_target = one(DAtom::Target);
    if !on_target && !one(DAtom::Residual) {
        return fail("the symbolic side must be the target or the residual alone");
    }
    let v = st.numeric_class(other)?;
    let expected = if on_target { st.target_dot(&v) } else { st.residual_dot(&v)? };
    if value != expected {
        return fail(format!("the intersection number is {expected}, not {value}"));
    }
    // Ω − L is effective with no term curve in its support.
    let usable = other.parts.iter().all(|(a, k)| {
        k.is_positive()
            && match a {
                DAtom::Curve(c) if st.is_term(c) => true,
                a => st.atom_class(a).is_ok_and(|cl| is_nef(&cl)),
            }
    });
    if usable {
        let omega = if on_target { &value - &st.terms_dot(&v, &BTreeSet::new())? } else { value };
        let l = st.atleast_dot(&v)?;
        st.push(Constraint::ge(&omega, &Poly::constant(l)));
    }
    Ok(())
}

fn adjunction(st: &mut State, curve: &str, drop: &[String], local: bool) -> Res<()> {
    let Some(a_c) = st.var_of(curve).map(str::to_string) else {
        return fail(format!("{curve} is not a term of the decomposition"));
    };
    if !st.certain(curve) {
        return fail(format!("the point is not known to lie on {curve}"));
    }
    for c in drop {
        if c == curve || (!st.is_term(c) && st.atleast_of(c).is_none()) {
            return fail(format!("{c} cannot be dropped"));
        }
        if st.possible(c) {
            return fail(format!("{c} may pass through the point and cannot be dropped"));
        }
    }
    let tau = st.tau();
    let own = &Poly::var(&a_c) + &st.b_coefficient(curve);
    st.require(&Constraint::le(&own, &tau), "adjunction guard")?;

    let cv = st.curve_class(curve)?;
    let dropped: BTreeSet<String> = drop.iter().cloned().collect();
    let mut value = if local {
        let mut v = Poly::zero();
        for (var, c) in &st.frame.terms {
            if c != curve && !dropped.contains(c) && st.possible(c) && st.meets(c, curve) {
                v = &v + &Poly::var(var);
            }
        }
        let best = st
            .frame
            .atleast
            .iter()
            .filter(|(c, _)| !dropped.contains(c) && st.possible(c) && st.meets(c, curve))
            .map(|(_, k)| k.clone())
            .max()
            .unwrap_or_else(Q::zero);
        let global_omega = &st.residual_dot(&cv)? - &Poly::constant(st.atleast_dot(&cv)?);
        &(&v + &Poly::constant(best)) + &global_omega
    } else {
        let mut skip = dropped.clone();
        skip.insert(curve.to_string());
        let mut v = &st.target_dot(&cv) - &Poly::var(&a_c).scale(&st.ixn_classes(&cv, &cv));
        for (var, c) in &st.frame.terms {
            if dropped.contains(c) {
                v = &v - &Poly::var(var).scale(&st.ixn_classes(&cv, &st.curve_class(c)?));
            }
        }
        for (c, k) in &st.frame.atleast {
            if dropped.contains(c) {
                v = &v - &Poly::constant(k * st.ixn_classes(&cv, &st.curve_class(c)?));
            }
        }
        v
    };
    if st.frame.side == Side::Down {
        let b: Vec<String> = st
            .cat
            .curves()
            .iter()
            .filter(|c| c.branch.is_some() && c.name != curve && st.possible(&c.name) && st.meets(&c.name, curve))
            .map(|c| c.name.clone())
            .collect();
        value = &value + &st.tau().scale(&qr(b.len() as i64, 2));
    }
    st.push(Constraint::gt(&value, &tau));
    Ok(())
}

fn glct(st: &mut State, mu: &Poly) -> Res<()> {
    if st.frame.side != Side::Down || !st.off_branch {
        return fail("glct applies downstairs at a point off the branch locus");
    }
    let mu = st.fix(mu);
    st.require(&Constraint::ge(&mu, &Poly::zero()), "glct")?;
    // μ(-K_Y) − class(d') with d' = d − Σ (f_C / ram) c
    let mut fixed_down = DivClass::zero();
    for (c, f) in &st.fixed {
        let ram = if st.is_branch(c) { q(2) } else { q(1) };
        fixed_down = &fixed_down + &st.cat.lookup(&c.to_ascii_lowercase()).map_err(|e| Fail(e.to_string()))?.cls.scale(&(f / ram));
    }
    let gap = &mu - &st.fix(&st.frame.lambda);
    if gap.degree() > 1 || gap.variables().iter().any(|v| v != "n") {
        return fail("μ must be affine in n");
    }
    let slope = gap.coeff(&Mono::var("n"));
    let class_at = |n0: &Q| &negk().scale(&(gap.const_term() + &slope * n0)) + &fixed_down;
    let ok = match st.n_lo {
        Some(lo) if st.n_value.is_none() && !slope.is_zero() => is_effective(&class_at(&q(lo))) && is_effective(&negk().scale(&slope)),
        _ => is_effective(&class_at(&st.n_value.clone().unwrap_or_else(Q::zero))),
    };
    if !ok {
        return fail("the push-forward is not dominated by μ(-K_Y)");
    }
    let tau = st.tau();
    st.push(Constraint::lt(&tau, &mu.scale(&q(2))));
    Ok(())
}

fn round(st: &mut State, claim: &Constraint) -> Res<()> {
    let c = st.fixc(claim);
    let mut lin = c.expr.clone();
    let k = lin.const_term();
    lin.add_term(Mono::one(), -k.clone());
    let integral = |v: &String| v == "n" || (st.tag.integral_terms() && st.frame.side == Side::Up && st.is_var_term(v));
    for (m, coef) in lin.terms() {
        if m.degree() != 1 || !coef.is_integer() || !integral(&m.vars()[0]) {
            return fail("rounding needs integer coefficients on integral variables");
        }
    }
    if c.rel == Rel::Eq {
        return fail("rounding applies to inequalities");
    }
    st.require(&c, "round")?;
    // lin + k ⋈ 0 with lin integral
    let bound = match c.rel {
        Rel::Gt => (-&k).floor() + Q::one(),
        _ => (-&k).ceil(),
    };
    st.push(Constraint::ge(&lin, &Poly::constant(bound)));
    Ok(())
}

impl State<'_> {
    fn is_var_term(&self, v: &str) -> bool {
        self.frame.terms.iter().any(|(x, _)| x == v)
    }
}

fn jiang_zou(st: &mut State, bprime: &BPrime, drop: &[String]) -> Res<()> {
    if st.frame.side != Side::Up {
        return fail("jiang-zou is an upstairs step");
    }
    for c in drop {
        if !st.is_term(c) {
            return fail(format!("{c} is not a term and cannot be dropped"));
        }
        if st.possible(c) {
            return fail(format!("{c} may pass through the point and cannot be dropped"));
        }
    }
    let dropped: BTreeSet<String> = drop.iter().cloned().collect();
    let terms = st.frame.terms.clone();
    let (m, value) = match bprime {
        BPrime::Curves(cs) => {
            if cs.is_empty() || cs.len() > 2 {
                return fail("B' consists of one or two term curves");
            }
            if cs.len() == 2 && !st.meets(&cs[0], &cs[1]) {
                return fail("the two curves of B' must meet");
            }
            let mut m = Poly::zero();
            let mut value = Poly::zero();
            for c in cs {
                let Some(v) = st.var_of(c).map(str::to_string) else { return fail(format!("{c} is not a term")) };
                if !st.certain(c) {
                    return fail(format!("the point is not known to lie on {c}"));
                }
                if dropped.contains(c) {
                    return fail(format!("{c} is in B' and cannot be dropped"));
                }
                m = &m + &Poly::var(&v);
                // C_v · (D − B' − dropped)
                let cv = st.curve_class(c)?;
                let mut inner = st.target_dot(&cv);
                for (w, cw) in &terms {
                    if cs.contains(cw) || dropped.contains(cw) {
                        inner = &inner - &Poly::var(w).scale(&st.ixn_classes(&cv, &st.curve_class(cw)?));
                    }
                }
                value = &value + &(&Poly::var(&v) * &inner);
            }
            (m, value)
        }
        BPrime::Residual(mu) => {
            if st.mult.as_deref() != Some(mu.as_str()) {
                return fail("a residual B' needs its multiplicity from a mult step");
            }
            // (Σ kept a_v C_v) · Ω
            let mut value = Poly::zero();
            for (v, c) in &terms {
                if dropped.contains(c) {
                    continue;
                }
                let cv = st.curve_class(c)?;
                value = &value + &(&Poly::var(v) * &st.residual_dot(&cv)?);
            }
            (Poly::var(mu), value)
        }
    };
    let tau = st.tau();
    st.require(&Constraint::le(&m, &tau), "jiang-zou guard")?;
    st.require(&Constraint::gt(&m, &Poly::zero()), "jiang-zou guard")?;
    let rhs = &tau * &m;
    if value.degree() > 2 || rhs.degree() > 2 {
        return fail("jiang-zou produces terms of degree above two");
    }
    st.push(Constraint::gt(&value, &rhs));
    Ok(())
}

/// Integer interval `[lo, hi]` of n cut out by `conds`; `None` bounds are open.
fn n_interval(conds: &[Constraint]) -> Option<(Option<Q>, Option<Q>)> {
    let (mut lo, mut hi): (Option<Q>, Option<Q>) = (None, None);
    let raise = |lo: &mut Option<Q>, x: Q| {
        if lo.as_ref().map_or(true, |l| x > *l) {
            *lo = Some(x)
        }
    };
    let lower = |hi: &mut Option<Q>, x: Q| {
        if hi.as_ref().map_or(true, |h| x < *h) {
            *hi = Some(x)
        }
    };
    for c in conds {
        let a = c.expr.coeff(&Mono::var("n"));
        let b = c.expr.const_term();
        if a.is_zero() {
            let ok = match c.rel {
                Rel::Ge => !b.is_negative(),
                Rel::Gt => b.is_positive(),
                Rel::Eq => b.is_zero(),
            };
            if !ok {
                return None;
            }
            continue;
        }
        let root = -&b / &a;
        match (c.rel, a.is_positive()) {
            (Rel::Eq, _) => {
                if !root.is_integer() {
                    return None;
                }
                raise(&mut lo, root.clone());
                lower(&mut hi, root);
            }
            (Rel::Ge, true) => raise(&mut lo, root.ceil()),
            (Rel::Gt, true) => raise(&mut lo, root.floor() + Q::one()),
            (Rel::Ge, false) => lower(&mut hi, root.floor()),
            (Rel::Gt, false) => lower(&mut hi, root.ceil() - Q::one()),
        }
    }
    if let (Some(l), Some(h)) = (&lo, &hi) {
        if l > h {
            return None;
        }
    }
    Some((lo, hi))
}

fn split(st: &State, s: &Step, var: &str, cases: &[Case]) -> Result<(), (String, String)> {
    let err = |r: String| Err((s.id.clone(), r));
    if var == "n" {
        for c in cases {
            for cond in &c.conditions {
                if cond.expr.variables().iter().any(|v| v != "n") || cond.expr.degree() > 1 {
                    return err("the cases of an n split constrain n alone".into());
                }
            }
        }
        let dom: (Q, Option<Q>) = match (&st.n_value, st.n_lo) {
            (Some(v), _) => (v.clone(), Some(v.clone())),
            (None, Some(lo)) => (q(lo), None),
            (None, None) => return err("n is not a parameter here".into()),
        };
        // intersect every case with the domain
        let mut pieces = Vec::new();
        for (i, c) in cases.iter().enumerate() {
            let Some((lo, hi)) = n_interval(&c.conditions) else { continue };
            let lo = lo.map_or(dom.0.clone(), |l| l.max(dom.0.clone()));
            let hi = match (hi, &dom.1) {
                (Some(h), Some(d)) => Some(h.min(d.clone())),
                (h, d) => h.or(d.clone()),
            };
            if hi.as_ref().is_some_and(|h| *h < lo) {
                continue;
            }
            pieces.push((i, lo, hi));
        }
        let mut sorted = pieces.clone();
        sorted.sort_by(|a, b| a.1.cmp(&b.1));
        let mut next = dom.0.clone();
        let mut done = false;
        for (_, lo, hi) in &sorted {
            if *lo > next {
                break;
            }
            match hi {
                None => {
                    done = true;
                    break;
                }
                Some(h) => next = next.max(h + Q::one()),
            }
            if dom.1.as_ref().is_some_and(|d| next > *d) {
                done = true;
                break;
            }
        }
        if !done {
            return err(format!("the cases leave n = {} uncovered", fmt_q(&next)));
        }
        for (i, lo, hi) in pieces {
            let case = &cases[i];
            let mut sub = st.clone();
            if hi.as_ref() == Some(&lo) && sub.n_value.is_none() {
                let v = Poly::constant(lo.clone());
                sub.store = sub.store.iter().map(|c| c.subst("n", &v)).collect();
                sub.n_value = Some(lo);
            } else {
                for cond in &case.conditions {
                    sub.push(cond.clone());
                }
            }
            branch(sub, case)?;
        }
        Ok(())
    } else {
        // rational coverage: no point of the store escapes every case
        let mut combos: Vec<Vec<Constraint>> = vec![Vec::new()];
        for c in cases {
            let negs: Vec<Constraint> = c.conditions.iter().flat_map(|x| st.fixc(x).negations()).collect();
            let mut out = Vec::new();
            for base in &combos {
                for ng in &negs {
                    let mut b = base.clone();
                    b.push(ng.clone());
                    out.push(b);
                }
            }
            combos = out;
        }
        for extra in combos {
            let mut sys = st.store.clone();
            sys.extend(extra);
            if let FmOutcome::Feasible(w) = fm_infeasible(&sys) {
                return err(format!("the cases do not cover {}", show_witness(&w)));
            }
        }
        for case in cases {
            let mut sub = st.clone();
            for cond in &case.conditions {
                sub.push(cond.clone());
            }
            branch(sub, case)?;
        }
        Ok(())
    }
}

fn branch(mut sub: State, case: &Case) -> Result<(), (String, String)> {
    if case.steps.is_empty() {
        return match fm_infeasible(&sub.store) {
            FmOutcome::Infeasible(_) => Ok(()),
            FmOutcome::Feasible(w) => Err((
                format!("case at {}", case.pos),
                format!("an empty case must be infeasible, but {} satisfies it", show_witness(&w)),
            )),
        };
    }
    steps(&mut sub, &case.steps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certs::ast::parse;

    const CASE_2_1: &str = r#"(certificate "thm1-case2.1" (domain) (threshold 4) (locus (in E3) (out H13))
      (decompose D (class 2K) (term a3 E3 (>= a3 0)) (term a13 H13 (>= a13 0)) (residual Omega (exclude E3 H13)))
      (step ixn D (pull t3) 8) (step adjunction E3 (drop H13)) (step ixn D H13 2) (step contradiction))"#;

    fn verdict(text: &str) -> Verdict {
        let cat = Catalog::standard();
        check_certificate(cat, &parse(text, cat).unwrap())
    }

    #[test]
    fn case_2_1_closes() {
        assert_eq!(verdict(CASE_2_1), Verdict::Valid);
    }

    #[test]
    fn wrong_identity_is_rejected_at_its_step() {
        let v = verdict(&CASE_2_1.replace("(pull t3) 8", "(pull t3) 9"));
        assert!(matches!(v, Verdict::Invalid { ref step, .. } if step == "1"), "{v}");
    }

    #[test]
    fn missing_guard_is_rejected_at_the_adjunction() {
        let v = verdict(&CASE_2_1.replace("(step ixn D (pull t3) 8) ", ""));
        assert!(matches!(v, Verdict::Invalid { ref step, ref reason } if step == "1" && reason.contains("guard")), "{v}");
    }

    #[test]
    fn intervals_of_n() {
        let n = Poly::var("n");
        let c = [Constraint::ge(&n, &Poly::int(2)), Constraint::lt(&n, &Poly::constant(qr(7, 2)))];
        assert_eq!(n_interval(&c), Some((Some(q(2)), Some(q(3)))));
        assert_eq!(n_interval(&[Constraint::eq(&n, &Poly::constant(qr(1, 2)))]), None);
    }
}
