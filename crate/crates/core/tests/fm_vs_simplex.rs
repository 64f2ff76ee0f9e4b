use burniat_core::linarith::{fm_infeasible, lp_feasible, Constraint, FmOutcome, Rel};
use burniat_core::poly::Poly;
use burniat_core::rational::q;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_system(rng: &mut ChaCha8Rng) -> Vec<Constraint> {
    let nvars = rng.gen_range(1..=8);
    let rows = rng.gen_range(1..=9);
    (0..rows)
        .map(|_| {
            let mut e = Poly::int(rng.gen_range(-9..=9));
            for v in 0..nvars {
                if rng.gen_bool(0.5) {
                    e = &e + &Poly::var(&format!("x{v}")).scale(&q(rng.gen_range(-9..=9)));
                }
            }
            let rel = match rng.gen_range(0..5) {
                0 => Rel::Eq,
                1 | 2 => Rel::Gt,
                _ => Rel::Ge,
            };
            Constraint::new(e, rel)
        })
        .collect()
}

#[test]
fn fm_agrees_with_exact_lp_on_random_systems() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let (mut feasible, mut infeasible) = (0, 0);
    for _ in 0..1000 {
        let sys = random_system(&mut rng);
        let lp = lp_feasible(&sys);
        match fm_infeasible(&sys) {
            FmOutcome::Infeasible(f) => {
                assert!(f.verify(&sys));
                assert!(lp.is_none(), "oracle found a point for {sys:?}");
                infeasible += 1;
            }
            FmOutcome::Feasible(env) => {
                assert!(sys.iter().all(|c| c.holds_at(&env)));
                let p = lp.expect("oracle says infeasible");
                assert!(sys.iter().all(|c| c.holds_at(&p)));
                feasible += 1;
            }
        }
    }
    // both outcomes must actually be exercised
    assert!(feasible > 100 && infeasible > 100, "{feasible} / {infeasible}");
}
