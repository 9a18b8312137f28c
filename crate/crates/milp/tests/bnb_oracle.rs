use mgrestore_milp::random::{random_milp, InstanceLimits};
use mgrestore_milp::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn agree(a: &MilpSolution, b: &MilpSolution) -> bool {
    match (a.has_point(), b.has_point()) {
        (true, true) => (a.objective - b.objective).abs() <= 1e-6,
        (false, false) => a.status == b.status,
        _ => false,
    }
}

#[test]
fn hundred_seeded_instances_match_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut infeasible = 0;
    for k in 0..100 {
        let p = random_milp(&mut rng, InstanceLimits::default());
        let bb = solve_milp(&p, &MilpOptions::default());
        let bf = brute_force_milp(&p).unwrap();
        assert!(agree(&bb, &bf), "instance {k}: {:?} vs {:?}", bb, bf);
        if bb.has_point() {
            assert_eq!(bb.status, SolveStatus::Optimal);
            assert!(p.max_violation(&bb.values) <= 1e-6);
            assert!(p.max_integrality_violation(&bb.values) <= 1e-6);
        } else {
            infeasible += 1;
        }
    }
    assert!(infeasible < 100);
}

#[test]
fn two_binaries_sum_to_one() {
    let mut b = ProblemBuilder::new();
    let x1 = b.add_binary("x1");
    let x2 = b.add_binary("x2");
    b.add_constraint(vec![(x1, 1.0), (x2, 1.0)], ConstraintSense::Le, 1.0, "c");
    b.add_objective(x1, 1.0);
    b.add_objective(x2, 1.0);
    let s = solve_milp(&b.build(ObjectiveSense::Maximize).unwrap(), &MilpOptions::default());
    assert_eq!(s.status, SolveStatus::Optimal);
    assert!((s.objective - 1.0).abs() < 1e-9);
}

#[test]
fn binary_expansion_of_integer() {
    // x = b0 + 2 b1 + 4 b2 in [0, 5] with 2x <= 3.
    let mut b = ProblemBuilder::new();
    let x = b.add_continuous(0.0, 5.0, "x");
    let bits: Vec<_> = (0..3).map(|i| b.add_binary(format!("b{i}"))).collect();
    b.add_constraint(
        vec![(x, 1.0), (bits[0], -1.0), (bits[1], -2.0), (bits[2], -4.0)],
        ConstraintSense::Eq,
        0.0,
        "expand",
    );
    b.add_constraint(vec![(x, 2.0)], ConstraintSense::Le, 3.0, "cap");
    b.add_objective(x, 1.0);
    let p = b.build(ObjectiveSense::Maximize).unwrap();
    let s = solve_milp(&p, &MilpOptions::default());
    assert!((s.objective - 1.0).abs() < 1e-9);
    assert!((brute_force_milp(&p).unwrap().objective - 1.0).abs() < 1e-9);
}

#[test]
fn binary_lower_bound_infeasible() {
    let mut b = ProblemBuilder::new();
    let x = b.add_binary("x");
    b.add_constraint(vec![(x, 1.0)], ConstraintSense::Ge, 2.0, "c");
    b.add_objective(x, 1.0);
    let p = b.build(ObjectiveSense::Maximize).unwrap();
    assert_eq!(solve_milp(&p, &MilpOptions::default()).status, SolveStatus::Infeasible);
    assert_eq!(brute_force_milp(&p).unwrap().status, SolveStatus::Infeasible);
}

#[test]
fn no_binaries_matches_lp() {
    let mut b = ProblemBuilder::new();
    let x = b.add_continuous(0.0, 4.0, "x");
    let y = b.add_continuous(0.0, 4.0, "y");
    b.add_constraint(vec![(x, 1.0), (y, 2.0)], ConstraintSense::Le, 5.0, "c");
    b.add_objective(x, 1.0);
    b.add_objective(y, 1.5);
    let p = b.build(ObjectiveSense::Maximize).unwrap();
    let bf = brute_force_milp(&p).unwrap();
    let lp = solve_lp(&p);
    assert!((bf.objective - lp.objective).abs() < 1e-9);
}

#[test]
fn node_limit_keeps_incumbent() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let p = random_milp(&mut rng, InstanceLimits::default());
        let opts = MilpOptions {
            node_limit: Some(1),
            ..MilpOptions::default()
        };
        let s = solve_milp(&p, &opts);
        if s.has_point() {
            assert!(p.max_violation(&s.values) <= 1e-6);
        }
        assert!(s.nodes_explored <= 2);
    }
}

fn scaled(p: &MilpProblem, lambda: f64) -> MilpProblem {
    let mut q = p.clone();
    for (_, c) in &mut q.objective {
        *c *= lambda;
    }
    q
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn milp_bounded_by_relaxation(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_milp(&mut rng, InstanceLimits { max_binaries: 8, ..Default::default() });
        let s = solve_milp(&p, &MilpOptions::default());
        let lp = solve_lp(&p.relaxed());
        if s.has_point() {
            prop_assert!(s.objective <= lp.objective + 1e-6);
        }
    }

    #[test]
    fn matches_brute_force(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_milp(&mut rng, InstanceLimits { max_binaries: 8, ..Default::default() });
        let bb = solve_milp(&p, &MilpOptions::default());
        let bf = brute_force_milp(&p).unwrap();
        prop_assert!(agree(&bb, &bf));
    }

    #[test]
    fn incumbents_never_worsen(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_milp(&mut rng, InstanceLimits::default());
        let s = solve_milp(&p, &MilpOptions::default());
        for w in s.incumbent_history.windows(2) {
            prop_assert!(w[1] >= w[0] - 1e-9);
        }
    }

    #[test]
    fn deterministic_values(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_milp(&mut rng, InstanceLimits::default());
        let bytes = serde_json::to_vec(&p).unwrap();
        let q: MilpProblem = serde_json::from_slice(&bytes).unwrap();
        let a = solve_milp(&p, &MilpOptions::default());
        let b = solve_milp(&q, &MilpOptions::default());
        prop_assert_eq!(a.values, b.values);
        prop_assert_eq!(a.nodes_explored, b.nodes_explored);
    }

    #[test]
    fn objective_scaling_keeps_binaries(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_milp(&mut rng, InstanceLimits { max_binaries: 8, ..Default::default() });
        let base = solve_milp(&p, &MilpOptions::default());
        prop_assume!(base.has_point());
        let bins = p.binary_ids();
        let pick = |s: &MilpSolution| bins.iter().map(|&j| s.values[j]).collect::<Vec<_>>();
        for lambda in [0.5, 2.0] {
            let s = solve_milp(&scaled(&p, lambda), &MilpOptions::default());
            prop_assert_eq!(pick(&s), pick(&base));
        }
    }
}
