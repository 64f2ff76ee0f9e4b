use std::collections::BTreeSet;

use burniat_cli::{default_cert_dir, load_corpus, load_index};
use burniat_core::certs::{check_at, check_certificate, parse, run_mutants, Verdict};
use burniat_core::surface::Catalog;

fn corpus() -> Vec<(String, String)> {
    load_corpus(&default_cert_dir())
        .unwrap()
        .into_iter()
        .map(|c| (c.path.file_stem().unwrap().to_string_lossy().into_owned(), c.text))
        .collect()
}

fn read(id: &str) -> String {
    std::fs::read_to_string(default_cert_dir().join(format!("{id}.cert"))).unwrap()
}

#[test]
fn every_certificate_is_valid_for_each_n() {
    let cat = Catalog::standard();
    for (id, text) in corpus() {
        let cert = parse(&text, cat).unwrap_or_else(|e| panic!("{id}: {e}"));
        assert_eq!(check_certificate(cat, &cert), Verdict::Valid, "{id}");
        let lo = cert.n_min.unwrap_or(1);
        for n in lo..=25 {
            assert_eq!(check_at(cat, &cert, n), Verdict::Valid, "{id} at n={n}");
        }
    }
}

#[test]
fn every_mutant_is_rejected() {
    let cat = Catalog::standard();
    let mut total = 0;
    for (id, text) in corpus() {
        let outcomes = run_mutants(cat, &text);
        assert!(!outcomes.is_empty(), "{id} has no constants to mutate");
        for o in &outcomes {
            assert!(!o.accepted, "{id}: mutant {} accepted", o.label);
        }
        total += outcomes.len();
    }
    assert!(total >= 300, "{total}");
}

#[test]
fn index_covers_the_corpus() {
    let index = load_index(&default_cert_dir()).unwrap();
    let ids: BTreeSet<String> = corpus().into_iter().map(|(id, _)| id).collect();
    let listed: BTreeSet<String> = index.keys().cloned().collect();
    assert_eq!(ids, listed);
    assert!(ids.len() >= 37);
    for e in index.values() {
        assert!(!e.case.is_empty() && !e.contradiction.is_empty(), "{}", e.id);
    }
}

#[test]
fn guards_are_enforced() {
    let cat = Catalog::standard();
    let text = read("thm2-anti-case1").replace("(step ixn D T33 4n)\n", "");
    let cert = parse(&text, cat).unwrap();
    match check_certificate(cat, &cert) {
        Verdict::Invalid { step, reason } => {
            assert_eq!(step, "1");
            assert!(reason.contains("adjunction guard"), "{reason}");
        }
        Verdict::Valid => panic!("accepted without the guard"),
    }
}

#[test]
fn dropping_the_last_fact_breaks_the_contradiction() {
    let cat = Catalog::standard();
    let text = read("thm2-anti-case1").replace("(step ixn D H34 2n)\n", "");
    let cert = parse(&text, cat).unwrap();
    assert!(!check_certificate(cat, &cert).is_valid());
}

#[test]
fn unknown_curves_are_parse_errors() {
    let cat = Catalog::standard();
    let text = read("thm2-anti-case1").replace("(step ixn D T33 4n)", "(step ixn D E5 4n)");
    let e = parse(&text, cat).unwrap_err().to_string();
    assert!(e.contains("E5"), "{e}");
}

#[test]
fn a_certificate_without_steps_proves_nothing() {
    let cat = Catalog::standard();
    let text = read("thm1-case1");
    let cut = text.find("(step").unwrap();
    let e = parse(&format!("{})", &text[..cut]), cat).unwrap_err().to_string();
    assert!(e.contains("certificate proves nothing"), "{e}");
}

#[test]
fn case_two_four_shape() {
    let cat = Catalog::standard();
    let cert = parse(&read("thm1-case2.4"), cat).unwrap();
    assert_eq!(cert.variables().len(), 1, "{:?}", cert.variables());
    assert_eq!(cert.step_count(), 6);
}
