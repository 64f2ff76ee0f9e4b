//! ±1 perturbations of the numeric constants a certificate relies on.

use num_traits::One;

use super::ast::{parse, parse_affine_token};
use super::check::{check_certificate, Verdict};
use super::sexpr::{read_all, SExpr};
use crate::rational::{fmt_q, parse_q, Q};
use crate::surface::Catalog;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mutant {
    /// Where the constant sits, e.g. `step 3: 8 -> 9`.
    pub label: String,
    pub text: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MutantOutcome {
    pub label: String,
    /// Whether the checker accepted the mutant.
    pub accepted: bool,
    pub detail: String,
}

fn affine_text(a: &Q, a_explicit: bool, b: &Q) -> String {
    let head = if a_explicit { fmt_q(a) } else { String::new() };
    let tail = if *b == Q::from_integer(0.into()) {
        String::new()
    } else if *b > Q::from_integer(0.into()) {
        format!("+{}", fmt_q(b))
    } else {
        format!("-{}", fmt_q(&-b.clone()))
    };
    format!("{head}n{tail}")
}

/// Every ±1 variant of one token.
fn token_variants(t: &str) -> Vec<String> {
    let one = Q::one();
    if let Some(x) = parse_q(t).filter(|_| t.chars().all(|c| c.is_ascii_digit() || c == '/' || c == '-')) {
        return vec![fmt_q(&(&x + &one)), fmt_q(&(&x - &one))];
    }
    let Some((a, b)) = parse_affine_token(t) else { return Vec::new() };
    let i = t.find('n').unwrap();
    let a_explicit = !matches!(&t[..i], "" | "-");
    let b_explicit = i + 1 < t.len();
    let mut out = Vec::new();
    if a_explicit {
        out.push(affine_text(&(&a + &one), true, &b));
        out.push(affine_text(&(&a - &one), true, &b));
    }
    if b_explicit {
        let keep_a = |x: &Q| if a_explicit { affine_text(&a, true, x) } else { format!("{}{}", &t[..i], &affine_text(&a, false, x)) };
        out.push(keep_a(&(&b + &one)));
        out.push(keep_a(&(&b - &one)));
    }
    out
}

fn visit(e: &SExpr, path: &mut Vec<usize>, hot: bool, found: &mut Vec<(Vec<usize>, String)>) {
    match e {
        SExpr::Atom(t, _) if hot => {
            for v in token_variants(t) {
                found.push((path.clone(), v));
            }
        }
        SExpr::List(items, _) => {
            let head = e.head();
            let is_ixn = head == Some("step") && items.get(1).and_then(SExpr::atom) == Some("ixn");
            let is_threshold = head == Some("threshold");
            for (i, x) in items.iter().enumerate() {
                let h = hot || (is_ixn && i >= 2) || (is_threshold && i >= 1);
                path.push(i);
                visit(x, path, h, found);
                path.pop();
            }
        }
        _ => {}
    }
}

fn replace(e: &SExpr, path: &[usize], new: &str) -> SExpr {
    match (e, path) {
        (SExpr::Atom(_, p), []) => SExpr::Atom(new.to_string(), *p),
        (SExpr::List(items, p), [i, rest @ ..]) => {
            let mut v = items.clone();
            v[*i] = replace(&items[*i], rest, new);
            SExpr::List(v, *p)
        }
        _ => e.clone(),
    }
}

fn step_label(root: &SExpr, path: &[usize]) -> String {
    let mut cur = root;
    for &i in path {
        match cur {
            SExpr::List(items, _) => {
                if matches!(cur.head(), Some("step") | Some("threshold")) {
                    return format!("{} at {}", cur.head().unwrap(), cur.pos());
                }
                cur = &items[i];
            }
            _ => break,
        }
    }
    format!("{}", cur.pos())
}

/// All ±1 mutants of the constants in intersection identities and the threshold.
pub fn mutants(text: &str) -> Vec<Mutant> {
    let Ok(forms) = read_all(text) else { return Vec::new() };
    let mut out = Vec::new();
    for (k, root) in forms.iter().enumerate() {
        let mut found = Vec::new();
        visit(root, &mut vec![], false, &mut found);
        for (path, new) in found {
            let old = {
                let mut cur = root;
                for &i in &path {
                    cur = &cur.list().unwrap()[i];
                }
                cur.atom().unwrap_or_default().to_string()
            };
            let mut forms2 = forms.clone();
            forms2[k] = replace(root, &path, &new);
            let text = forms2.iter().map(|f| f.to_string()).collect::<Vec<_>>().join("\n");
            out.push(Mutant { label: format!("{}: {old} -> {new}", step_label(root, &path)), text });
        }
    }
    out
}

/// Checks every mutant; a mutant that fails to parse counts as rejected.
pub fn run_mutants(cat: &Catalog, text: &str) -> Vec<MutantOutcome> {
    mutants(text)
        .into_iter()
        .map(|m| {
            let (accepted, detail) = match parse(&m.text, cat) {
                Err(e) => (false, format!("parse error: {e}")),
                Ok(c) => match check_certificate(cat, &c) {
                    Verdict::Valid => (true, "VALID".into()),
                    v => (false, v.to_string()),
                },
            };
            MutantOutcome { label: m.label, accepted, detail }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn token_mutations() {
        assert_eq!(token_variants("8"), ["9", "7"]);
        assert_eq!(token_variants("5/2"), ["7/2", "3/2"]);
        assert_eq!(token_variants("4n-3"), ["5n-3", "3n-3", "4n-2", "4n-4"]);
        assert_eq!(token_variants("n+1/2"), ["n+3/2", "n-1/2"]);
        assert_eq!(token_variants("-n"), Vec::<String>::new());
        assert!(token_variants("a13").is_empty());
    }

    #[test]
    fn only_identities_and_threshold_are_mutated() {
        let text = "(certificate \"x\" (domain) (threshold 4) (locus (in E3)) (decompose D (class 2K) (term a E3 (>= a 0)) (residual Omega (exclude E3))) (step ixn D (pull t3) 8) (step infer (>= a 0)) (step contradiction))";
        let labels: Vec<String> = mutants(text).into_iter().map(|m| m.label).collect();
        assert_eq!(labels.len(), 4, "{labels:?}");
        assert!(labels.iter().any(|l| l.ends_with("8 -> 9")));
        assert!(labels.iter().any(|l| l.ends_with("4 -> 3")));
    }
}
