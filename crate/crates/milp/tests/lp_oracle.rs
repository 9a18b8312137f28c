mod support;

use mgrestore_milp::random::random_lp;
use mgrestore_milp::{solve_lp, solve_lp_with_duals, SolveStatus};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use support::vertex::vertex_optimum;

#[test]
fn twenty_seeded_lps_match_vertex_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for k in 0..20 {
        let n = rng.gen_range(2..=8);
        let m = rng.gen_range(2..=8);
        let p = random_lp(&mut rng, n, m);
        let s = solve_lp(&p);
        let oracle = vertex_optimum(&p).expect("generated LPs are feasible");
        assert_eq!(s.status, SolveStatus::Optimal, "instance {k}");
        assert!(
            (s.objective - oracle).abs() <= 1e-6,
            "instance {k}: simplex {} vs vertices {}",
            s.objective,
            oracle
        );
        assert!(p.max_violation(&s.values) <= 1e-7);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn weak_duality_holds(seed in any::<u64>(), n in 1usize..8, m in 1usize..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_lp(&mut rng, n, m);
        let (s, d) = solve_lp_with_duals(&p);
        prop_assert_eq!(s.status, SolveStatus::Optimal);
        let d = d.unwrap();
        prop_assert!(s.objective <= d.dual_bound + 1e-6 * (1.0 + s.objective.abs()));
    }

    #[test]
    fn lp_is_deterministic(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_lp(&mut rng, 6, 6);
        let a = solve_lp(&p);
        let b = solve_lp(&p.clone());
        prop_assert_eq!(a.values, b.values);
    }
}
