//! Certificate syntax tree, with every name resolved against the catalog.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Signed, Zero};

use super::error::{ErrorKind, ParseError};
use super::sexpr::{read_all, Pos, SExpr};
use crate::linarith::Constraint;
use crate::poly::Poly;
use crate::rational::{parse_q, q, qr, Q};
use crate::surface::{Catalog, CURVE_NAMES, RIGID_NAMES};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Tag {
    Thm1,
    Thm2Inv,
    Thm2Anti,
    Thm3Inv,
    Thm3Anti,
}

impl Tag {
    pub const ALL: [Tag; 5] = [Tag::Thm1, Tag::Thm2Inv, Tag::Thm2Anti, Tag::Thm3Inv, Tag::Thm3Anti];

    pub fn name(self) -> &'static str {
        match self {
            Tag::Thm1 => "thm1",
            Tag::Thm2Inv => "thm2-inv",
            Tag::Thm2Anti => "thm2-anti",
            Tag::Thm3Inv => "thm3-inv",
            Tag::Thm3Anti => "thm3-anti",
        }
    }

    pub fn parse(s: &str) -> Option<Tag> {
        Tag::ALL.into_iter().find(|t| t.name() == s)
    }

    /// The tag named by the longest matching id prefix.
    pub fn from_id(id: &str) -> Option<Tag> {
        Tag::ALL
            .into_iter()
            .filter(|t| id == t.name() || id.starts_with(&format!("{}-", t.name())))
            .max_by_key(|t| t.name().len())
    }

    /// τ, the reciprocal of the claimed lct bound.
    pub fn threshold(self) -> Poly {
        match self {
            Tag::Thm1 => Poly::int(4),
            Tag::Thm2Inv | Tag::Thm3Anti => affine(4, 0),
            Tag::Thm2Anti | Tag::Thm3Inv => affine(4, -3),
        }
    }

    /// m with D ∈ |m K_X|.
    pub fn k_multiple(self) -> Poly {
        match self {
            Tag::Thm1 => Poly::int(2),
            Tag::Thm2Inv | Tag::Thm2Anti => affine(2, 0),
            Tag::Thm3Inv | Tag::Thm3Anti => affine(2, 1),
        }
    }

    /// λ with D ≡ φ*(λ(-K_Y)).
    pub fn lambda(self) -> Poly {
        self.k_multiple().scale(&qr(1, 2))
    }

    pub fn min_n(self) -> Option<i64> {
        match self {
            Tag::Thm1 => None,
            Tag::Thm2Anti => Some(2),
            _ => Some(1),
        }
    }

    /// Branch indices k whose ramification R_k is a fixed part of the system.
    pub fn fixed_branches(self) -> &'static [u8] {
        match self {
            Tag::Thm1 | Tag::Thm2Inv => &[],
            Tag::Thm2Anti => &[2, 3],
            Tag::Thm3Inv => &[1, 2, 3],
            Tag::Thm3Anti => &[1],
        }
    }

    /// Members of a linear system have integral coefficients.
    pub fn integral_terms(self) -> bool {
        self != Tag::Thm1
    }
}

fn affine(a: i64, b: i64) -> Poly {
    &Poly::var("n").scale(&q(a)) + &Poly::int(b)
}

/// Multiplicity of each rigid curve of X in the fixed part for `tag`.
pub fn fixed_part(cat: &Catalog, tag: Tag) -> BTreeMap<String, Q> {
    let mut out = BTreeMap::new();
    for &k in tag.fixed_branches() {
        for c in cat.branch_components(k) {
            *out.entry(c.name.to_ascii_uppercase()).or_insert_with(Q::zero) += Q::one();
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum DAtom {
    /// A rigid curve: upper case on X, lower case on Y.
    Curve(String),
    /// φ*(x) for a catalog name x.
    Pull(String),
    /// K_X upstairs, K_Y downstairs.
    K,
    Target,
    Residual,
}

/// A rational combination of divisor atoms.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DivExpr {
    pub parts: BTreeMap<DAtom, Q>,
}

impl DivExpr {
    pub fn atom(a: DAtom) -> Self {
        let mut d = DivExpr::default();
        d.parts.insert(a, Q::one());
        d
    }

    fn add(&mut self, o: &DivExpr, k: &Q) {
        for (a, c) in &o.parts {
            let e = self.parts.entry(a.clone()).or_insert_with(Q::zero);
            *e += c * k;
            if e.is_zero() {
                self.parts.remove(a);
            }
        }
    }

    pub fn is_symbolic(&self) -> bool {
        self.parts.contains_key(&DAtom::Target) || self.parts.contains_key(&DAtom::Residual)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub var: String,
    pub curve: String,
    pub lower: Q,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub target: String,
    /// λ with target ≡ φ*(λ(-K_Y)) upstairs, or target ≡ λ(-K_Y) downstairs.
    pub lambda: Poly,
    pub terms: Vec<Term>,
    pub residual: String,
    pub exclude: Vec<String>,
    pub atleast: Vec<(String, Q)>,
    pub pos: Pos,
}

impl Decomposition {
    pub fn term(&self, curve: &str) -> Option<&Term> {
        self.terms.iter().find(|t| t.curve == curve)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Locus {
    pub inside: Vec<String>,
    pub outside: Vec<String>,
    pub off_branch: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BPrime {
    Curves(Vec<String>),
    Residual(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StepKind {
    Ixn { x: DivExpr, y: DivExpr, value: Poly },
    Mult { var: String },
    MultBound { var: String, curve: String },
    Adjunction { curve: String, drop: Vec<String>, local: bool, gives: Option<Constraint> },
    Pushforward { decomposition: Option<Decomposition> },
    Glct { mu: Poly },
    Product { x: Poly, y: Poly },
    Round { claim: Constraint },
    Infer { claim: Constraint },
    JiangZou { bprime: BPrime, drop: Vec<String> },
    Split { var: String, cases: Vec<Case> },
    Contradiction,
}

impl StepKind {
    pub fn name(&self) -> &'static str {
        match self {
            StepKind::Ixn { .. } => "ixn",
            StepKind::Mult { .. } => "mult",
            StepKind::MultBound { .. } => "mult-bound",
            StepKind::Adjunction { .. } => "adjunction",
            StepKind::Pushforward { .. } => "pushforward",
            StepKind::Glct { .. } => "glct",
            StepKind::Product { .. } => "product",
            StepKind::Round { .. } => "round",
            StepKind::Infer { .. } => "infer",
            StepKind::JiangZou { .. } => "jiang-zou",
            StepKind::Split { .. } => "split",
            StepKind::Contradiction => "contradiction",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Case {
    pub conditions: Vec<Constraint>,
    pub steps: Vec<Step>,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    /// 1-based path, e.g. `3` or `7.2.1` inside a split.
    pub id: String,
    pub pos: Pos,
    pub kind: StepKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub id: String,
    pub tag: Tag,
    /// Lower bound on n; `None` when n does not occur.
    pub n_min: Option<i64>,
    pub threshold: Poly,
    pub locus: Locus,
    pub decomposition: Decomposition,
    pub steps: Vec<Step>,
}

impl Certificate {
    pub fn variables(&self) -> Vec<&str> {
        self.decomposition.terms.iter().map(|t| t.var.as_str()).collect()
    }

    pub fn step_count(&self) -> usize {
        fn count(v: &[Step]) -> usize {
            v.iter()
                .map(|s| match &s.kind {
                    StepKind::Split { cases, .. } => 1 + cases.iter().map(|c| count(&c.steps)).sum::<usize>(),
                    _ => 1,
                })
                .sum()
        }
        count(&self.steps)
    }
}

fn err<T>(pos: Pos, kind: ErrorKind) -> Result<T, ParseError> {
    Err(ParseError::new(pos, kind))
}

fn malformed<T>(pos: Pos, msg: impl Into<String>) -> Result<T, ParseError> {
    err(pos, ErrorKind::Malformed(msg.into()))
}

fn invalid<T>(pos: Pos, msg: impl Into<String>) -> Result<T, ParseError> {
    err(pos, ErrorKind::Invalid(msg.into()))
}

/// `4n-3`, `n`, `-n`, `2n+1/2`; `None` if the token is not of this shape.
pub fn parse_affine_token(t: &str) -> Option<(Q, Q)> {
    let i = t.find('n')?;
    let (head, tail) = (&t[..i], &t[i + 1..]);
    let a = match head {
        "" => Q::one(),
        "-" => -Q::one(),
        h => {
            if !h.chars().all(|c| c.is_ascii_digit() || c == '/' || c == '-') {
                return None;
            }
            parse_q(h)?
        }
    };
    let b = if tail.is_empty() {
        Q::zero()
    } else {
        let sign = match tail.as_bytes()[0] {
            b'+' => Q::one(),
            b'-' => -Q::one(),
            _ => return None,
        };
        let rest = &tail[1..];
        if rest.is_empty() || !rest.chars().all(|c| c.is_ascii_digit() || c == '/') {
            return None;
        }
        sign * parse_q(rest)?
    };
    Some((a, b))
}

fn is_number(t: &str) -> bool {
    !t.is_empty() && t.chars().all(|c| c.is_ascii_digit() || c == '/' || c == '-') && parse_q(t).is_some()
}

fn is_identifier(t: &str) -> bool {
    let mut cs = t.chars();
    matches!(cs.next(), Some(c) if c.is_ascii_lowercase()) && cs.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Side {
    Up,
    Down,
}

struct Ctx<'a> {
    cat: &'a Catalog,
    vars: BTreeSet<String>,
    has_n: bool,
    side: Side,
    target: String,
    residual: String,
    mult_var: Option<String>,
}

impl Ctx<'_> {
    fn declare(&mut self, name: &str, pos: Pos) -> Result<(), ParseError> {
        if !is_identifier(name) || name == "n" || CURVE_NAMES.contains(&name) || name == "d" {
            return invalid(pos, format!("`{name}` cannot name a variable"));
        }
        if !self.vars.insert(name.to_string()) {
            return invalid(pos, format!("variable `{name}` declared twice"));
        }
        Ok(())
    }

    fn expr(&self, e: &SExpr) -> Result<Poly, ParseError> {
        match e {
            SExpr::Atom(t, pos) => {
                if is_number(t) {
                    return Ok(Poly::constant(parse_q(t).unwrap()));
                }
                if let Some((a, b)) = parse_affine_token(t) {
                    if !self.has_n {
                        return err(*pos, ErrorKind::UndeclaredVariable("n".into()));
                    }
                    return Ok(&Poly::var("n").scale(&a) + &Poly::constant(b));
                }
                if is_identifier(t) {
                    if self.vars.contains(t) {
                        return Ok(Poly::var(t));
                    }
                    return err(*pos, ErrorKind::UndeclaredVariable(t.clone()));
                }
                malformed(*pos, format!("unexpected token `{t}`"))
            }
            SExpr::Str(_, pos) => malformed(*pos, "string in arithmetic"),
            SExpr::List(items, pos) => {
                let op = e.head().ok_or(()).or_else(|_| malformed(*pos, "missing operator"))?;
                let args: Vec<Poly> = items[1..].iter().map(|x| self.expr(x)).collect::<Result<_, _>>()?;
                match (op, args.len()) {
                    ("+", _) => Ok(args.iter().fold(Poly::zero(), |a, b| &a + b)),
                    ("-", 1) => Ok(-&args[0]),
                    ("-", k) if k >= 2 => Ok(args[1..].iter().fold(args[0].clone(), |a, b| &a - b)),
                    ("*", k) if k >= 1 => Ok(args[1..].iter().fold(args[0].clone(), |a, b| &a * b)),
                    _ => malformed(*pos, format!("bad arithmetic form `{op}`")),
                }
            }
        }
    }

    fn relation(&self, e: &SExpr) -> Result<Constraint, ParseError> {
        let pos = e.pos();
        let items = e.list().ok_or(()).or_else(|_| malformed(pos, "expected a relation"))?;
        if items.len() != 3 {
            return malformed(pos, "a relation takes two sides");
        }
        let (l, r) = (self.expr(&items[1])?, self.expr(&items[2])?);
        match e.head() {
            Some(">=") => Ok(Constraint::ge(&l, &r)),
            Some(">") => Ok(Constraint::gt(&l, &r)),
            Some("<=") => Ok(Constraint::le(&l, &r)),
            Some("<") => Ok(Constraint::lt(&l, &r)),
            Some("=") => Ok(Constraint::eq(&l, &r)),
            _ => malformed(pos, "expected one of >= > <= < ="),
        }
    }

    fn curve_name(&self, e: &SExpr) -> Result<String, ParseError> {
        let pos = e.pos();
        let t = e.atom().ok_or(()).or_else(|_| malformed(pos, "expected a curve name"))?;
        self.resolve_curve(t, pos)
    }

    fn resolve_curve(&self, t: &str, pos: Pos) -> Result<String, ParseError> {
        let ok = match self.side {
            Side::Up => t.chars().next().is_some_and(|c| c.is_ascii_uppercase()) && RIGID_NAMES.contains(&t.to_ascii_lowercase().as_str()),
            Side::Down => RIGID_NAMES.contains(&t),
        };
        if ok {
            self.cat.lookup(&t.to_ascii_lowercase()).map_err(|_| ParseError::new(pos, ErrorKind::UnknownCurve(t.into())))?;
            Ok(t.to_string())
        } else {
            err(pos, ErrorKind::UnknownCurve(t.to_string()))
        }
    }

    fn div(&self, e: &SExpr) -> Result<DivExpr, ParseError> {
        match e {
            SExpr::Atom(t, pos) => {
                if *t == self.target {
                    Ok(DivExpr::atom(DAtom::Target))
                } else if *t == self.residual {
                    Ok(DivExpr::atom(DAtom::Residual))
                } else if t == "K" {
                    Ok(DivExpr::atom(DAtom::K))
                } else if self.side == Side::Down && CURVE_NAMES.contains(&t.as_str()) && !RIGID_NAMES.contains(&t.as_str()) {
                    Ok(DivExpr::atom(DAtom::Pull(t.clone())))
                } else {
                    Ok(DivExpr::atom(DAtom::Curve(self.resolve_curve(t, *pos)?)))
                }
            }
            SExpr::Str(_, pos) => malformed(*pos, "string in divisor"),
            SExpr::List(items, pos) => {
                let op = e.head().ok_or(()).or_else(|_| malformed(*pos, "missing operator"))?;
                match op {
                    "pull" => {
                        if self.side == Side::Down {
                            return malformed(*pos, "pull is only meaningful on X");
                        }
                        let [_, x] = items.as_slice() else { return malformed(*pos, "pull takes one name") };
                        let name = x.atom().ok_or(()).or_else(|_| malformed(x.pos(), "expected a curve name"))?;
                        if !CURVE_NAMES.contains(&name) {
                            return err(x.pos(), ErrorKind::UnknownCurve(name.into()));
                        }
                        Ok(DivExpr::atom(DAtom::Pull(name.into())))
                    }
                    "*" => {
                        let [_, k, x] = items.as_slice() else { return malformed(*pos, "(* k X)") };
                        let kq = k.atom().filter(|t| is_number(t)).and_then(parse_q);
                        let Some(kq) = kq else { return malformed(k.pos(), "divisor coefficients are rational constants") };
                        let mut out = DivExpr::default();
                        out.add(&self.div(x)?, &kq);
                        Ok(out)
                    }
                    "+" | "-" => {
                        let mut out = DivExpr::default();
                        if items.len() < 2 {
                            return malformed(*pos, "empty sum");
                        }
                        for (i, x) in items[1..].iter().enumerate() {
                            let sign = if op == "-" && (i > 0 || items.len() == 2) { -Q::one() } else { Q::one() };
                            out.add(&self.div(x)?, &sign);
                        }
                        Ok(out)
                    }
                    _ => malformed(*pos, format!("bad divisor form `{op}`")),
                }
            }
        }
    }

    fn const_q(&self, e: &SExpr) -> Result<Q, ParseError> {
        let p = self.expr(e)?;
        p.as_constant().ok_or(()).or_else(|_| malformed(e.pos(), "expected a constant"))
    }

    /// `(decompose NAME (class ...) (term v C (>= v k))... (residual R (exclude ...) [(atleast ...)]))`
    fn decomposition(&mut self, e: &SExpr) -> Result<Decomposition, ParseError> {
        let pos = e.pos();
        let items = e.list().unwrap_or(&[]);
        if e.head() != Some("decompose") || items.len() < 4 {
            return malformed(pos, "expected (decompose NAME (class ...) ... (residual ...))");
        }
        let target = items[1].atom().ok_or(()).or_else(|_| malformed(items[1].pos(), "expected a divisor name"))?.to_string();
        let class_form = &items[2];
        let lambda = self.class_clause(class_form)?;
        let mut terms = Vec::new();
        let mut residual = None;
        let mut exclude = Vec::new();
        let mut atleast = Vec::new();
        let saved_target = std::mem::replace(&mut self.target, target.clone());
        for it in &items[3..] {
            match it.head() {
                Some("term") => {
                    let v = it.list().unwrap();
                    let [_, var, curve, bound] = v else { return malformed(it.pos(), "(term v C (>= v k))") };
                    let var = var.atom().ok_or(()).or_else(|_| malformed(var.pos(), "expected a variable"))?.to_string();
                    let curve = self.curve_name(curve)?;
                    if terms.iter().any(|t: &Term| t.curve == curve) {
                        return invalid(it.pos(), format!("curve `{curve}` appears in two terms"));
                    }
                    self.declare(&var, v[1].pos())?;
                    let b = bound.list().unwrap_or(&[]);
                    if bound.head() != Some(">=") || b.len() != 3 || b[1].atom() != Some(var.as_str()) {
                        return malformed(bound.pos(), format!("expected (>= {var} k)"));
                    }
                    let lower = self.const_q(&b[2])?;
                    terms.push(Term { var, curve, lower });
                }
                Some("residual") => {
                    let v = it.list().unwrap();
                    if v.len() < 3 {
                        return malformed(it.pos(), "(residual R (exclude ...) [(atleast ...)])");
                    }
                    let name = v[1].atom().ok_or(()).or_else(|_| malformed(v[1].pos(), "expected a name"))?;
                    residual = Some(name.to_string());
                    for part in &v[2..] {
                        match part.head() {
                            Some("exclude") => {
                                for c in &part.list().unwrap()[1..] {
                                    exclude.push(self.curve_name(c)?);
                                }
                            }
                            Some("atleast") => {
                                for c in &part.list().unwrap()[1..] {
                                    let (k, name) = match c {
                                        SExpr::List(xs, p) if c.head() == Some("*") && xs.len() == 3 => {
                                            (self.const_q(&xs[1])?, self.curve_name(&xs[2]).map_err(|e| ParseError::new(e.pos, e.kind)).or_else(|_| malformed(*p, "(* k C)"))?)
                                        }
                                        _ => (Q::one(), self.curve_name(c)?),
                                    };
                                    if !k.is_positive() {
                                        return invalid(c.pos(), "atleast coefficients are positive");
                                    }
                                    atleast.push((name, k));
                                }
                            }
                            _ => return malformed(part.pos(), "expected (exclude ...) or (atleast ...)"),
                        }
                    }
                }
                _ => return malformed(it.pos(), "expected (term ...) or (residual ...)"),
            }
        }
        self.target = saved_target;
        let Some(residual) = residual else { return malformed(pos, "missing (residual ...)") };
        Ok(Decomposition { target, lambda, terms, residual, exclude, atleast, pos })
    }

    /// `(class 2K)`, `(class 2nK)`, `(class 2n+1 K)` upstairs; `(class n -K)` downstairs.
    /// Returns λ.
    fn class_clause(&self, e: &SExpr) -> Result<Poly, ParseError> {
        let pos = e.pos();
        let items = e.list().unwrap_or(&[]);
        if e.head() != Some("class") {
            return malformed(pos, "expected (class ...)");
        }
        let toks: Vec<&str> = items[1..].iter().filter_map(SExpr::atom).collect();
        if toks.len() != items.len() - 1 || toks.is_empty() {
            return malformed(pos, "bad class");
        }
        let (coef, unit) = match toks.as_slice() {
            [one] => {
                let Some(stripped) = one.strip_suffix('K') else { return malformed(pos, "class is a multiple of K") };
                (if stripped.is_empty() { "1" } else { stripped }, "K")
            }
            [c, u] => (*c, *u),
            _ => return malformed(pos, "bad class"),
        };
        let c = self.expr(&SExpr::Atom(coef.to_string(), pos))?;
        match (self.side, unit) {
            (Side::Up, "K") => Ok(c.scale(&qr(1, 2))),
            (Side::Down, "-K") => Ok(c),
            _ => malformed(pos, "class is m·K on X and λ·(-K) on Y"),
        }
    }

    fn names(&self, items: &[SExpr]) -> Result<Vec<String>, ParseError> {
        items.iter().map(|c| self.curve_name(c)).collect()
    }

    fn steps(&mut self, forms: &[SExpr], prefix: &str) -> Result<Vec<Step>, ParseError> {
        let mut out = Vec::new();
        for (i, f) in forms.iter().enumerate() {
            let id = if prefix.is_empty() { format!("{}", i + 1) } else { format!("{prefix}.{}", i + 1) };
            out.push(self.step(f, id)?);
        }
        Ok(out)
    }

    fn step(&mut self, f: &SExpr, id: String) -> Result<Step, ParseError> {
        let pos = f.pos();
        if f.head() != Some("step") {
            return malformed(pos, "expected (step ...)");
        }
        let items = f.list().unwrap();
        let Some(kind) = items.get(1).and_then(SExpr::atom) else { return malformed(pos, "missing step kind") };
        let args = &items[2..];
        let kind = match kind {
            "ixn" => {
                let [x, y, v] = args else { return malformed(pos, "(step ixn X Y value)") };
                StepKind::Ixn { x: self.div(x)?, y: self.div(y)?, value: self.expr(v)? }
            }
            "mult" => {
                let [v] = args else { return malformed(pos, "(step mult VAR)") };
                let name = v.atom().unwrap_or("").to_string();
                if self.side == Side::Down {
                    return invalid(pos, "mult is an upstairs step");
                }
                if self.mult_var.is_some() {
                    return invalid(pos, "mult is licensed once per certificate");
                }
                self.declare(&name, v.pos())?;
                self.mult_var = Some(name.clone());
                StepKind::Mult { var: name }
            }
            "mult-bound" => {
                let [v, c] = args else { return malformed(pos, "(step mult-bound VAR C)") };
                let name = v.atom().unwrap_or("").to_string();
                if self.mult_var.as_deref() != Some(name.as_str()) {
                    return err(v.pos(), ErrorKind::UndeclaredVariable(name));
                }
                StepKind::MultBound { var: name, curve: self.curve_name(c)? }
            }
            "adjunction" => {
                let Some(c) = args.first() else { return malformed(pos, "(step adjunction C ...)") };
                let curve = self.curve_name(c)?;
                let mut drop = Vec::new();
                let mut local = false;
                let mut gives = None;
                for a in &args[1..] {
                    match (a.head(), a.atom()) {
                        (Some("drop"), _) => drop = self.names(&a.list().unwrap()[1..])?,
                        (Some("gives"), _) => {
                            let [_, r] = a.list().unwrap() else { return malformed(a.pos(), "(gives REL)") };
                            gives = Some(self.relation(r)?);
                        }
                        (_, Some("local")) => local = true,
                        _ => return malformed(a.pos(), "expected (drop ...), local or (gives ...)"),
                    }
                }
                StepKind::Adjunction { curve, drop, local, gives }
            }
            "pushforward" => {
                if self.side == Side::Down {
                    return invalid(pos, "already downstairs");
                }
                self.side = Side::Down;
                let decomposition = match args {
                    [] => None,
                    [d] => Some(self.decomposition(d)?),
                    _ => return malformed(pos, "(step pushforward [(decompose ...)])"),
                };
                match &decomposition {
                    Some(d) => {
                        self.target = d.target.clone();
                        self.residual = d.residual.clone();
                    }
                    None => {
                        self.target = "d".into();
                        self.residual = String::new();
                    }
                }
                StepKind::Pushforward { decomposition }
            }
            "glct" => {
                let [m] = args else { return malformed(pos, "(step glct MU)") };
                StepKind::Glct { mu: self.expr(m)? }
            }
            "product" => {
                let [x, y] = args else { return malformed(pos, "(step product X Y)") };
                StepKind::Product { x: self.expr(x)?, y: self.expr(y)? }
            }
            "round" => {
                let [r] = args else { return malformed(pos, "(step round REL)") };
                StepKind::Round { claim: self.relation(r)? }
            }
            "infer" => {
                let [r] = args else { return malformed(pos, "(step infer REL)") };
                StepKind::Infer { claim: self.relation(r)? }
            }
            "jiang-zou" => {
                let Some(b) = args.first() else { return malformed(pos, "(step jiang-zou (bprime ...) [(drop ...)])") };
                if b.head() != Some("bprime") {
                    return malformed(b.pos(), "expected (bprime ...)");
                }
                let bl = &b.list().unwrap()[1..];
                let bprime = match bl {
                    [r] if r.atom() == Some(self.residual.as_str()) => {
                        let Some(mv) = self.mult_var.clone() else {
                            return invalid(b.pos(), "a residual B' needs its multiplicity from a mult step");
                        };
                        BPrime::Residual(mv)
                    }
                    _ => BPrime::Curves(self.names(bl)?),
                };
                let mut drop = Vec::new();
                for a in &args[1..] {
                    if a.head() != Some("drop") {
                        return malformed(a.pos(), "expected (drop ...)");
                    }
                    drop = self.names(&a.list().unwrap()[1..])?;
                }
                StepKind::JiangZou { bprime, drop }
            }
            "split" => {
                let Some(v) = args.first().and_then(SExpr::atom) else { return malformed(pos, "(step split VAR (case ...)...)") };
                if v == "n" {
                    if !self.has_n {
                        return err(args[0].pos(), ErrorKind::UndeclaredVariable("n".into()));
                    }
                } else if !self.vars.contains(v) {
                    return err(args[0].pos(), ErrorKind::UndeclaredVariable(v.into()));
                }
                let mut cases = Vec::new();
                for (ci, c) in args[1..].iter().enumerate() {
                    if c.head() != Some("case") {
                        return malformed(c.pos(), "expected (case ...)");
                    }
                    let body = &c.list().unwrap()[1..];
                    let k = body.iter().take_while(|x| x.head() != Some("step")).count();
                    let conditions = body[..k].iter().map(|r| self.relation(r)).collect::<Result<Vec<_>, _>>()?;
                    if conditions.is_empty() {
                        return malformed(c.pos(), "a case needs a condition");
                    }
                    let saved = (self.side, self.target.clone(), self.residual.clone(), self.vars.clone(), self.mult_var.clone());
                    let steps = self.steps(&body[k..], &format!("{id}.{}", ci + 1))?;
                    (self.side, self.target, self.residual, self.vars, self.mult_var) = saved;
                    cases.push(Case { conditions, steps, pos: c.pos() });
                }
                if cases.len() < 2 {
                    return malformed(pos, "a split needs at least two cases");
                }
                StepKind::Split { var: v.to_string(), cases }
            }
            "contradiction" => {
                if !args.is_empty() {
                    return malformed(pos, "(step contradiction)");
                }
                StepKind::Contradiction
            }
            other => return malformed(pos, format!("unknown step kind `{other}`")),
        };
        Ok(Step { id, pos, kind })
    }
}

/// Parses one certificate and resolves every name against `cat`.
pub fn parse(text: &str, cat: &Catalog) -> Result<Certificate, ParseError> {
    let forms = read_all(text)?;
    let top = match forms.as_slice() {
        [one] => one,
        [] => return err(Pos { line: 1, col: 1 }, ErrorKind::Syntax("empty input".into())),
        [_, second, ..] => return err(second.pos(), ErrorKind::Syntax("one certificate per file".into())),
    };
    let pos = top.pos();
    if top.head() != Some("certificate") {
        return malformed(pos, "expected (certificate \"id\" ...)");
    }
    let items = top.list().unwrap();
    let id = match items.get(1) {
        Some(SExpr::Str(s, _)) => s.clone(),
        _ => return malformed(pos, "certificate id must be a string"),
    };
    let mut rest = &items[2..];
    let mut tag = Tag::from_id(&id);
    if let Some(t) = rest.first().filter(|x| x.head() == Some("theorem")) {
        let name = t.list().unwrap().get(1).and_then(SExpr::atom).unwrap_or("");
        tag = Some(Tag::parse(name).ok_or(()).or_else(|_| malformed(t.pos(), format!("unknown theorem `{name}`")))?);
        rest = &rest[1..];
    }
    let Some(tag) = tag else { return malformed(pos, "cannot tell which theorem this certificate belongs to") };

    let mut ctx = Ctx {
        cat,
        vars: BTreeSet::new(),
        has_n: tag.min_n().is_some(),
        side: Side::Up,
        target: "D".into(),
        residual: "Omega".into(),
        mult_var: None,
    };

    let want = |k: usize, name: &str| -> Result<&SExpr, ParseError> {
        match rest.get(k) {
            Some(x) if x.head() == Some(name) => Ok(x),
            Some(x) => malformed(x.pos(), format!("expected ({name} ...)")),
            None => malformed(pos, format!("missing ({name} ...)")),
        }
    };

    let dom = want(0, "domain")?;
    let n_min = match &dom.list().unwrap()[1..] {
        [] => None,
        [r] => {
            let c = ctx.relation(r)?;
            // n - k >= 0
            let k = -c.expr.const_term();
            if c.rel != crate::linarith::Rel::Ge || c.expr != &Poly::var("n") + &Poly::constant(-k.clone()) || !k.is_integer() {
                return malformed(r.pos(), "domain is (>= n k)");
            }
            Some(k.to_integer().try_into().unwrap_or(i64::MAX))
        }
        _ => return malformed(dom.pos(), "domain is () or ((>= n k))"),
    };
    if n_min != tag.min_n() {
        return invalid(dom.pos(), format!("{} requires domain {}", tag.name(), tag.min_n().map_or("()".into(), |k| format!("n >= {k}"))));
    }

    let th = want(1, "threshold")?;
    let [_, tv] = th.list().unwrap() else { return malformed(th.pos(), "(threshold EXPR)") };
    let threshold = ctx.expr(tv)?;
    if threshold != tag.threshold() {
        return invalid(th.pos(), format!("{} has threshold {}", tag.name(), tag.threshold()));
    }

    let lo = want(2, "locus")?;
    let mut locus = Locus::default();
    for part in &lo.list().unwrap()[1..] {
        match part.head() {
            Some("in") => locus.inside.extend(ctx.names(&part.list().unwrap()[1..])?),
            Some("out") => locus.outside.extend(ctx.names(&part.list().unwrap()[1..])?),
            Some("off-branch") => locus.off_branch = true,
            _ => return malformed(part.pos(), "expected (in ...), (out ...) or (off-branch)"),
        }
    }
    validate_locus(cat, &locus, lo.pos())?;

    let decomposition = ctx.decomposition(want(3, "decompose")?)?;
    if decomposition.lambda != tag.lambda() {
        return invalid(decomposition.pos, format!("{} decomposes a member of |{} K|", tag.name(), tag.k_multiple()));
    }
    ctx.target = decomposition.target.clone();
    ctx.residual = decomposition.residual.clone();

    let step_forms = &rest[4..];
    if step_forms.is_empty() {
        return err(pos, ErrorKind::ProvesNothing);
    }
    let steps = ctx.steps(step_forms, "")?;
    Ok(Certificate { id, tag, n_min, threshold, locus, decomposition, steps })
}

fn validate_locus(cat: &Catalog, l: &Locus, pos: Pos) -> Result<(), ParseError> {
    if l.off_branch && !l.inside.is_empty() {
        return invalid(pos, "an off-branch point lies on no branch curve");
    }
    if !l.off_branch && l.inside.is_empty() {
        return invalid(pos, "the locus names a curve through the point or says off-branch");
    }
    match l.inside.as_slice() {
        [] | [_] => {}
        [a, b] => {
            if !cat.meets(&a.to_ascii_lowercase(), &b.to_ascii_lowercase()).unwrap_or(false) {
                return invalid(pos, format!("{a} and {b} do not meet"));
            }
        }
        _ => return invalid(pos, "at most two curves pass through the point"),
    }
    if let Some(c) = l.inside.iter().find(|c| l.outside.contains(c)) {
        return invalid(pos, format!("{c} is both in and out"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn affine_tokens() {
        assert_eq!(parse_affine_token("4n-3"), Some((q(4), q(-3))));
        assert_eq!(parse_affine_token("n"), Some((q(1), q(0))));
        assert_eq!(parse_affine_token("-n"), Some((q(-1), q(0))));
        assert_eq!(parse_affine_token("2n+1/2"), Some((q(2), qr(1, 2))));
        assert_eq!(parse_affine_token("a13"), None);
        assert_eq!(parse_affine_token("n2"), None);
    }

    #[test]
    fn tags_from_ids() {
        assert_eq!(Tag::from_id("thm1-case2.4"), Some(Tag::Thm1));
        assert_eq!(Tag::from_id("thm3-anti-case11"), Some(Tag::Thm3Anti));
        assert_eq!(Tag::from_id("thm4-x"), None);
        assert_eq!(Tag::Thm2Anti.threshold(), affine(4, -3));
        assert_eq!(Tag::Thm3Inv.lambda(), &Poly::var("n") + &Poly::constant(qr(1, 2)));
    }

    #[test]
    fn fixed_parts_follow_the_branch_data() {
        let cat = Catalog::standard();
        let r1 = fixed_part(cat, Tag::Thm3Anti);
        let names: Vec<&str> = r1.keys().map(String::as_str).collect();
        assert_eq!(names, ["E1", "H23", "H24", "T22"]);
        assert_eq!(fixed_part(cat, Tag::Thm2Anti).len(), 8);
        assert_eq!(fixed_part(cat, Tag::Thm3Inv).len(), 12);
    }
}
