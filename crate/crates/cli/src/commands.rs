use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use thiserror::Error;

use burniat_core::bicover::{eigen_system, invariants, lemma1_table, plurigenus_formula, BicoverError};
use burniat_core::certs::{check_at, check_certificate, parse, run_mutants, Verdict};
use burniat_core::lct::{configuration_symmetries, glct_upper_search, lct_at, lct_divisor, permute_coeffs, pull_back, LctError, Witness};
use burniat_core::picard::canonical_class;
use burniat_core::rational::{fmt_q, q, Q};
use burniat_core::surface::Catalog;

use crate::corpus::{load_corpus, load_index, read_cert, CertFile, IndexEntry};
use crate::divexpr::{parse_divexpr, DivExprError};
use crate::report::{Item, Report};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CliError {
    #[error("{0}: {1}")]
    Io(String, String),
    #[error("corpus index: {0}")]
    Index(String),
    #[error("divisor expression: {0}")]
    DivExpr(#[from] DivExprError),
    #[error(transparent)]
    Lct(#[from] LctError),
    #[error(transparent)]
    Bicover(#[from] BicoverError),
    #[error("witness @{0} needs --n")]
    MissingN(String),
    #[error("unknown witness @{0}")]
    UnknownWitness(String),
}

fn qs(x: &Q) -> String {
    fmt_q(x)
}

fn lct_text(v: &Option<Q>) -> String {
    v.as_ref().map_or("infinite".to_string(), qs)
}

/// K², p_g, χ, q, the K_X·C table and the building-data checks.
pub fn cmd_invariants(cat: &Catalog) -> Report {
    let t0 = Instant::now();
    let mut r = Report::new("invariants");
    let inv = invariants(cat);
    r.push(Item::new("K^2", "5", qs(&inv.k2), "Burniat K^2 = 5"));
    r.push(Item::new("p_g", "0", inv.pg.to_string(), "Burniat p_g = 0"));
    r.push(Item::new("chi", "1", qs(&inv.chi), "Burniat chi = 1"));
    r.push(Item::new("q", "0", qs(&inv.q), "Burniat q = 0"));
    for (label, v) in lemma1_table(cat) {
        let want = expected_k_dot(&label);
        r.push(Item::new(label, qs(&want), qs(&v), "Lemma 1"));
    }
    for c in cat.validate_building_data().checks {
        r.push(Item::new(c.name, c.expected, c.computed, "building data").with_pass(c.pass));
    }
    r.wall_ms = t0.elapsed().as_millis();
    r
}

/// K_X·C by hand: ramified (-1)-curves give 1, the T_ii and E4 give 2,
/// φ*(l) gives 6 and φ*(t_i) gives 4.
fn expected_k_dot(label: &str) -> Q {
    let name = label.trim_start_matches("K.");
    match name {
        "E4" | "T11" | "T22" | "T33" => q(2),
        "pull(l)" => q(6),
        _ if name.starts_with("pull(t") => q(4),
        _ => q(1),
    }
}

/// lct of a divisor expression or of a named witness (`@D1-even`, ...).
pub fn cmd_lct(cat: &Catalog, expr: &str, n: Option<i64>) -> Result<Report, CliError> {
    let t0 = Instant::now();
    let mut r = Report::new(match n {
        Some(k) => format!("lct {expr} --n {k}"),
        None => format!("lct {expr}"),
    });
    if let Some(name) = expr.strip_prefix('@') {
        let w = Witness::parse(name).ok_or_else(|| CliError::UnknownWitness(name.to_string()))?;
        let n = n.ok_or_else(|| CliError::MissingN(name.to_string()))?;
        let d = w.build(cat, n)?;
        let (m, i) = w.system(n);
        let res = lct_divisor(cat, &d)?;
        let want = w.expected(n);
        let cite = match w {
            Witness::D1Even => "Theorem 2 witness",
            Witness::D0Odd => "Theorem 3 witness, invariant part",
            Witness::D1Odd => "Theorem 3 witness, anti-invariant part",
        };
        r.note(format!("divisor {d} in |{m}K_X|_{i}"));
        r.push(Item::new("lct", qs(&want), lct_text(&res.value), cite));
        let p = w.designated_point();
        r.push(Item::new(format!("lct at {}", p.join("∩")), qs(&want), lct_text(&lct_at(cat, &d, &p)?), cite));
        r.note(format!("minimizing point {}", res.point.join("∩")));
    } else {
        let d = parse_divexpr(cat, expr)?;
        let res = lct_divisor(cat, &d)?;
        let v = lct_text(&res.value);
        r.push(Item::new("lct", v.clone(), v, "computed"));
        r.note(format!("minimizing point {}", res.point.join("∩")));
    }
    r.wall_ms = t0.elapsed().as_millis();
    Ok(r)
}

/// Search over integral decompositions of -K_Y with bounded coefficients.
pub fn cmd_glct_upper(cat: &Catalog, max_coeff: u32) -> Result<Report, CliError> {
    let t0 = Instant::now();
    let mut r = Report::new(format!("glct-upper --max-coeff {max_coeff}"));
    let s = glct_upper_search(cat, &-canonical_class(), max_coeff)?;
    let k_bound = &s.bound * q(2);
    let (want2, want1) = if max_coeff >= 2 { ("1/4", "1/2") } else { ("1/2", "1") };
    r.push(Item::new("bound for 2K_X", want2, qs(&s.bound), "Theorem 1, Proposition 4"));
    r.push(Item::new("bound for K_X", want1, qs(&k_bound), "Theorem 1"));
    r.note(format!("witness pullback {} with lct attained at {}", s.pullback, s.point.join("∩")));
    if max_coeff >= 2 {
        let want = format!("{} up to symmetry", pull_back(cat, &PROP4_PATTERN));
        let computed = match prop4_minimizer(cat, &s.minimizers) {
            Some(m) => {
                r.note(format!("minimizer {} is symmetric to the pattern", pull_back(cat, &m)));
                want.clone()
            }
            None => "no minimizer matches".to_string(),
        };
        r.push(Item::new("Proposition 4 pattern", want, computed, "Proposition 4"));
    }
    r.note(format!("{} decompositions explored, {} attain the bound", s.explored, s.minimizers.len()));
    r.note(format!("bound is relative to coefficients <= {max_coeff}"));
    r.wall_ms = t0.elapsed().as_millis();
    Ok(r)
}

/// Downstairs coefficients of e1 + e3 + 2h13 + h24, whose pullback is
/// 2E1 + 2E3 + 4H13 + 2H24.
pub const PROP4_PATTERN: [u32; 13] = [1, 0, 1, 0, 0, 2, 0, 0, 1, 0, 0, 0, 0];

/// A minimizer carried to the pattern by a symmetry of the branch configuration.
pub fn prop4_minimizer(cat: &Catalog, minimizers: &[Vec<u32>]) -> Option<Vec<u32>> {
    let syms = configuration_symmetries(cat);
    minimizers
        .iter()
        .find(|m| syms.iter().any(|s| permute_coeffs(s, m).as_deref() == Some(&PROP4_PATTERN[..])))
        .cloned()
}

/// Dimensions of the four eigenspaces of H^0(mK_X) against P_m.
pub fn cmd_eigensystem(cat: &Catalog, m: u64) -> Result<Report, CliError> {
    let t0 = Instant::now();
    let mut r = Report::new(format!("eigensystem {m}"));
    let mut total = 0;
    for i in 0..=3 {
        let e = eigen_system(cat, m, i)?;
        total += e.dim;
        r.note(format!("|{m}K_X|_{i}: dim {}, fixed part {}, mobile class {}", e.dim, e.fixed, e.mobile_class));
        if m == 2 && i > 0 {
            r.push(Item::new(format!("dim |2K_X|_{i}"), "0", e.dim.to_string(), "Lemma 2"));
        }
    }
    if m >= 2 {
        r.push(Item::new("P_m", plurigenus_formula(m).to_string(), total.to_string(), "Riemann-Roch, P_m = 1 + 5m(m-1)/2"));
    } else {
        r.push(Item::new("P_1", "0", total.to_string(), "p_g = 0"));
    }
    r.wall_ms = t0.elapsed().as_millis();
    Ok(r)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CheckMode {
    /// Check over the declared domain, then at every integer n up to `max_n`.
    Verify { max_n: i64 },
    /// Run the ±1 mutation harness.
    Mutate,
}

struct Outcome {
    id: String,
    items: Vec<Item>,
    notes: Vec<String>,
    mutants: usize,
    rejected: usize,
}

/// Checks the given certificate files, or the whole corpus of `dir` when
/// `paths` is empty. Items are ordered by certificate id.
pub fn cmd_check(cat: &Catalog, dir: &Path, paths: &[PathBuf], mode: &CheckMode) -> Result<Report, CliError> {
    let t0 = Instant::now();
    let mut r = Report::new(match (paths.is_empty(), mode) {
        (true, CheckMode::Mutate) => "check --all --mutate".to_string(),
        (true, _) => "check --all".to_string(),
        (false, m) => {
            let names: Vec<String> = paths.iter().map(|p| p.display().to_string()).collect();
            format!("check {}{}", names.join(" "), if *m == CheckMode::Mutate { " --mutate" } else { "" })
        }
    });
    let files: Vec<CertFile> = if paths.is_empty() {
        load_corpus(dir)?
    } else {
        paths.iter().map(|p| read_cert(p)).collect::<Result<_, _>>()?
    };
    let index = load_index(dir).unwrap_or_default();
    let mut outcomes: Vec<Outcome> = files.par_iter().map(|f| check_one(cat, f, &index, mode)).collect();
    outcomes.sort_by(|a, b| a.id.cmp(&b.id));
    if paths.is_empty() {
        let listed: Vec<&String> = index.keys().filter(|id| !outcomes.iter().any(|o| &o.id == *id)).collect();
        for id in listed {
            r.push(Item::new(id.clone(), "present", "missing", "corpus index"));
        }
    }
    let (mut total, mut rejected) = (0, 0);
    for o in outcomes {
        total += o.mutants;
        rejected += o.rejected;
        r.items.extend(o.items);
        r.notes.extend(o.notes);
    }
    if *mode == CheckMode::Mutate {
        r.note(format!("mutants: {total}, rejected: {rejected}, accepted: {}", total - rejected));
    }
    r.wall_ms = t0.elapsed().as_millis();
    Ok(r)
}

fn check_one(cat: &Catalog, f: &CertFile, index: &BTreeMap<String, IndexEntry>, mode: &CheckMode) -> Outcome {
    let fallback = f.path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let cert = match parse(&f.text, cat) {
        Ok(c) => c,
        Err(e) => {
            return Outcome {
                id: fallback.clone(),
                items: vec![Item::new(fallback, "VALID", format!("parse error at {e}"), "")],
                notes: Vec::new(),
                mutants: 0,
                rejected: 0,
            }
        }
    };
    let id = cert.id.clone();
    let cite = index.get(&id).map_or_else(|| "not indexed".to_string(), |e| e.case.clone());
    let mut items = Vec::new();
    let mut notes = Vec::new();
    let (mut mutants, mut rejected) = (0, 0);
    match mode {
        CheckMode::Verify { max_n } => {
            items.push(Item::new(id.clone(), "VALID", check_certificate(cat, &cert).to_string(), cite.clone()));
            if let Some(lo) = cert.n_min {
                let bad: Vec<String> = (lo..=*max_n)
                    .filter_map(|n| match check_at(cat, &cert, n) {
                        Verdict::Valid => None,
                        v => Some(format!("n={n}: {v}")),
                    })
                    .collect();
                let computed = match bad.first() {
                    None => "VALID".to_string(),
                    Some(first) => format!("{first} ({} of {} values fail)", bad.len(), max_n - lo + 1),
                };
                items.push(Item::new(format!("{id} @ n={lo}..{max_n}"), "VALID", computed, cite));
            }
        }
        CheckMode::Mutate => {
            let outs = run_mutants(cat, &f.text);
            let accepted: Vec<&str> = outs.iter().filter(|o| o.accepted).map(|o| o.label.as_str()).collect();
            let computed = if outs.is_empty() {
                "no mutants".to_string()
            } else if accepted.is_empty() {
                format!("{}/{} rejected", outs.len(), outs.len())
            } else {
                format!("accepted: {}", accepted.join(", "))
            };
            items.push(Item::new(id.clone(), format!("{}/{} rejected", outs.len(), outs.len()), computed, cite));
            mutants = outs.len();
            rejected = outs.len() - accepted.len();
            notes.extend(outs.iter().map(|o| format!("{id} {}: {}", o.label, o.detail)));
        }
    }
    Outcome { id, items, notes, mutants, rejected }
}
