//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on failure.

use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use burniat_cli::{cmd_check, cmd_glct_upper, cmd_invariants, default_cert_dir, load_index, CheckMode};
use burniat_core::bicover::{eigen_system, ixn, ixn_curves, is_member, lemma1_table, plurigenus_formula, CurveX, QDivisorX};
use burniat_core::lct::{lct_divisor, Witness};
use burniat_core::linarith::{fm_infeasible, lp_feasible, Constraint, FmOutcome, Rel};
use burniat_core::picard::{h0, is_effective_cone, is_effective_reduction, pair, DivClass};
use burniat_core::poly::Poly;
use burniat_core::rational::q;
use burniat_core::surface::Catalog;

const SAMPLES: usize = 1000;

type Outcome = Result<String, String>;

fn invariants(cat: &Catalog) -> Outcome {
    let r = cmd_invariants(cat);
    let rows = lemma1_table(cat).len();
    if r.all_pass() {
        Ok(format!("{} items, {rows} intersection rows", r.items.len()))
    } else {
        Err(format!("{} of {} items fail", r.failures(), r.items.len()))
    }
}

fn building(cat: &Catalog) -> Outcome {
    let rep = cat.validate_building_data();
    match rep.checks.iter().find(|c| !c.pass) {
        None => Ok(format!("{} checks", rep.checks.len())),
        Some(c) => Err(format!("{c:?}")),
    }
}

fn glct(cat: &Catalog) -> Outcome {
    let t0 = Instant::now();
    let r = cmd_glct_upper(cat, 4).map_err(|e| e.to_string())?;
    let secs = t0.elapsed().as_secs_f64();
    if !r.all_pass() {
        return Err(format!("{} of {} items fail", r.failures(), r.items.len()));
    }
    if secs >= 30.0 {
        return Err(format!("took {secs:.1} s"));
    }
    Ok(format!("1/4 and 1/2 with the pattern, {secs:.1} s"))
}

fn witnesses(cat: &Catalog) -> Outcome {
    let mut count = 0;
    for (w, lo) in [(Witness::D1Even, 2), (Witness::D0Odd, 1), (Witness::D1Odd, 1)] {
        for n in lo..=10 {
            let d = w.build(cat, n).map_err(|e| e.to_string())?;
            let (m, i) = w.system(n);
            if !is_member(cat, &d, m, i).map_err(|e| e.to_string())? {
                return Err(format!("{w:?} at n={n} is not in |{m}K_X|_{i}"));
            }
            let got = lct_divisor(cat, &d).map_err(|e| e.to_string())?.value;
            if got.as_ref() != Some(&w.expected(n)) {
                return Err(format!("{w:?} at n={n}: {got:?}"));
            }
            count += 1;
        }
    }
    Ok(format!("{count} closed forms"))
}

fn corpus(cat: &Catalog, mode: CheckMode) -> Result<burniat_cli::Report, String> {
    cmd_check(cat, &default_cert_dir(), &[], &mode).map_err(|e| e.to_string())
}

fn certificates(cat: &Catalog) -> Outcome {
    let t0 = Instant::now();
    let r = corpus(cat, CheckMode::Verify { max_n: 25 })?;
    let secs = t0.elapsed().as_secs_f64();
    let indexed = load_index(&default_cert_dir()).map_err(|e| e.to_string())?.len();
    if !r.all_pass() {
        return Err(format!("{} of {} items fail", r.failures(), r.items.len()));
    }
    if indexed < 37 || secs >= 60.0 {
        return Err(format!("{indexed} certificates, {secs:.1} s"));
    }
    Ok(format!("{indexed} VALID through n=25, {secs:.1} s"))
}

fn mutations(cat: &Catalog) -> Outcome {
    let r = corpus(cat, CheckMode::Mutate)?;
    let summary = r.notes.last().cloned().unwrap_or_default();
    if r.all_pass() {
        Ok(summary)
    } else {
        Err(summary)
    }
}

fn eigen(cat: &Catalog) -> Outcome {
    for m in 2..=12u64 {
        let mut total = 0;
        for i in 0..4 {
            total += eigen_system(cat, m, i).map_err(|e| e.to_string())?.dim;
        }
        if total != 1 + 5 * m * (m - 1) / 2 || total != plurigenus_formula(m) {
            return Err(format!("m={m}: {total}"));
        }
    }
    for i in 1..4 {
        let d = eigen_system(cat, 2, i).map_err(|e| e.to_string())?.dim;
        if d != 0 {
            return Err(format!("|2K_X|_{i} has dim {d}"));
        }
    }
    Ok("m=2..12 and |2K_X|_i for i=1..3".into())
}

fn random_class(rng: &mut ChaCha8Rng, r: i64) -> DivClass {
    DivClass::from_ints(std::array::from_fn(|_| rng.gen_range(-r..=r)))
}

fn random_system(rng: &mut ChaCha8Rng) -> Vec<Constraint> {
    let nvars = rng.gen_range(1..=6);
    (0..rng.gen_range(1..=8))
        .map(|_| {
            let mut e = Poly::int(rng.gen_range(-6..=6));
            for v in 0..nvars {
                if rng.gen_bool(0.6) {
                    e = &e + &Poly::var(&format!("x{v}")).scale(&q(rng.gen_range(-6..=6)));
                }
            }
            let rel = [Rel::Eq, Rel::Gt, Rel::Ge][rng.gen_range(0..3)];
            Constraint::new(e, rel)
        })
        .collect()
}

fn random_samples(cat: &Catalog) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(20260101);
    let mut effective = 0;
    for _ in 0..SAMPLES {
        let c = random_class(&mut rng, 4);
        let cone = is_effective_cone(&c);
        let red = is_effective_reduction(&c);
        let sections = h0(&c).map_err(|e| e.to_string())?;
        // a nonzero class with a section is effective; one without need not be
        if cone != red || (sections > 0 && !cone) {
            return Err(format!("effectivity disagrees on {c}"));
        }
        effective += cone as usize;
    }
    let pulls: Vec<CurveX> = cat.rigid().map(|c| CurveX::over(cat, &c.name).unwrap()).collect();
    for _ in 0..SAMPLES {
        let (a, b) = (random_class(&mut rng, 5), random_class(&mut rng, 5));
        let pa = QDivisorX::single(CurveX::pull(a.clone(), "a"), q(1));
        let pb = QDivisorX::single(CurveX::pull(b.clone(), "b"), q(1));
        if ixn(&pa, &pb).unwrap() != q(4) * pair(&a, &b) {
            return Err(format!("projection formula fails on {a}, {b}"));
        }
        // bilinearity over sums of pulled back curves
        let mut d1 = QDivisorX::new();
        let mut d2 = QDivisorX::new();
        let mut expect = q(0);
        let picks: Vec<(usize, i64, usize, i64)> = (0..3)
            .map(|_| (rng.gen_range(0..pulls.len()), rng.gen_range(1..5), rng.gen_range(0..pulls.len()), rng.gen_range(1..5)))
            .collect();
        for &(i, x, _, _) in &picks {
            d1.add(pulls[i].clone(), q(x));
        }
        for &(_, _, j, y) in &picks {
            d2.add(pulls[j].clone(), q(y));
        }
        for &(i, x, _, _) in &picks {
            for &(_, _, j, y) in &picks {
                expect += q(x * y) * ixn_curves(&pulls[i], &pulls[j]);
            }
        }
        if ixn(&d1, &d2).unwrap() != expect {
            return Err("intersection is not bilinear".into());
        }
    }
    let (mut feasible, mut infeasible) = (0, 0);
    for _ in 0..SAMPLES {
        let sys = random_system(&mut rng);
        let lp = lp_feasible(&sys);
        match fm_infeasible(&sys) {
            FmOutcome::Infeasible(f) if f.verify(&sys) && lp.is_none() => infeasible += 1,
            FmOutcome::Feasible(env) if sys.iter().all(|c| c.holds_at(&env)) && lp.is_some() => feasible += 1,
            _ => return Err(format!("FM and LP disagree on {sys:?}")),
        }
    }
    Ok(format!("{SAMPLES} samples each; {effective} effective classes, FM {feasible} feasible and {infeasible} infeasible"))
}

fn main() -> ExitCode {
    let cat = Catalog::standard();
    let criteria: [(&str, fn(&Catalog) -> Outcome); 8] = [
        ("invariants and intersection table", invariants),
        ("building data", building),
        ("glct upper bound search", glct),
        ("witness closed forms", witnesses),
        ("certificate corpus", certificates),
        ("mutation rejection", mutations),
        ("eigen decomposition of plurigenera", eigen),
        ("randomized oracles", random_samples),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        match run(cat) {
            Ok(msg) => println!("criterion {}: PASS {name} ({msg})", k + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {}: FAIL {name} ({msg})", k + 1);
            }
        }
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
