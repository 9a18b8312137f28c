use mgrestore::network::*;
use mgrestore::restoration::*;
use mgrestore_milp::{solve_milp, MilpOptions, MilpProblem, MilpSolution, SolveStatus};
use proptest::prelude::*;
use serde_json::{json, Value};

fn data(name: &str) -> String {
    std::fs::read_to_string(format!("{}/../../data/{name}", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

fn toy_doc() -> Value {
    serde_json::from_str(&data("toy3.json")).unwrap()
}

fn load(doc: Value) -> (NetworkModel, MicrogridPartition) {
    let net = parse_feeder(&doc.to_string()).unwrap();
    let part = partition_microgrids(&net);
    (net, part)
}

/// The toy chain closed into a ring by a third switchable line K3 (1-3).
fn ring_doc(faults: &[&str]) -> Value {
    let mut doc = toy_doc();
    let mut k3 = doc["lines"][1].clone();
    k3["id"] = json!("K3");
    k3["from"] = json!(1);
    k3["to"] = json!(3);
    doc["lines"].as_array_mut().unwrap().push(k3);
    doc["faults"] = json!(faults);
    doc
}

struct Solved {
    net: NetworkModel,
    part: MicrogridPartition,
    inputs: StageInputs,
    problem: MilpProblem,
    index: ModelIndex,
    solution: MilpSolution,
    stage: RestorationStage,
}

fn solve_with(
    net: NetworkModel,
    part: MicrogridPartition,
    inputs: StageInputs,
    settings: &RestorationSettings,
) -> Solved {
    let (mut problem, index) = build_stage_problem(&net, &part, 0, &inputs, settings).unwrap();
    add_frequency_constraints(&mut problem, &index, &inputs, settings.frequency_mode).unwrap();
    let solution = solve_milp(&problem, &MilpOptions::default());
    assert_eq!(solution.status, SolveStatus::Optimal);
    let stage = extract_stage(&net, &problem, &solution, &index, &inputs).unwrap();
    Solved {
        net,
        part,
        inputs,
        problem,
        index,
        solution,
        stage,
    }
}

fn solve(doc: Value, horizon: usize) -> Solved {
    let (net, part) = load(doc);
    let inputs = StageInputs::initial(&net, &part, horizon, 0.1, 0.5);
    solve_with(net, part, inputs, &RestorationSettings::default())
}

fn value(s: &Solved, class: VarClass, el: Element, t: usize) -> f64 {
    s.solution.values[s.index.get(class, el, None, t).unwrap()]
}

#[test]
fn toy_variable_and_row_counts() {
    let (net, part) = load(toy_doc());
    let inputs = StageInputs::initial(&net, &part, 2, 0.1, 0.5);
    let (mut p, idx) = build_stage_problem(&net, &part, 0, &inputs, &RestorationSettings::default()).unwrap();

    // Per step: 3 xB + 2 xK + 0 xG + 2 xL + 3 xBK, then 1 DG x 3 phases x
    // (P, Q), 2 lines x 3 phases x (P, Q), 3 buses x 3 phases of U, 1 MLS.
    let per_step = 3 + 2 + 2 + 3 + (3 * 2 + 2 * 3 * 2 + 3 * 3 + 1);
    assert_eq!(p.num_vars(), 2 * per_step);
    assert_eq!(idx.len(), p.num_vars());

    // Per step: P and Q balance at 9 bus-phases, four flow limits and two
    // voltage-drop rows per line-phase, two voltage limits per bus-phase,
    // one end-bus row per switch end, one load-bus row per load, one no-trip
    // row per switch and load, one block row per block, loop and sequence
    // rows per switch, one feed row per block and one source row per
    // unsourced block.
    let rows = 2 * 9 + 4 * 6 + 2 * 6 + 2 * 9 + 4 + 2 + (2 + 2) + 3 + (2 + 2) + 3 + 2;
    assert_eq!(rows, 94);
    assert_eq!(p.num_constraints(), 2 * rows);

    // Stage 1 adds only the ramp rows: 2 directions x 3 phases x 2 steps.
    add_frequency_constraints(&mut p, &idx, &inputs, FrequencyMode::Adaptive).unwrap();
    assert_eq!(p.num_constraints(), 2 * rows + 12);
}

#[test]
fn stage_passes_all_checks() {
    for horizon in [1, 2, 4] {
        let s = solve(toy_doc(), horizon);
        assert!(check_radiality(&s.stage, &s.net).ok);
        let (ok, res) = check_power_balance(&s.stage, &s.net, 1e-6);
        assert!(ok, "residual {res}");
        assert!(check_voltage_box(&s.stage, &s.net, 1e-6).ok);
        assert!(check_monotone(&s.inputs.status, &s.stage.status).ok);
        assert!(check_sequencing(&s.inputs.status, &s.stage, &s.net, &s.part).ok);
        assert!(s.stage.status.line("K1"));
        assert!(!s.stage.status.line("K2"));
    }
}

#[test]
fn faulted_line_stays_open_and_carries_nothing() {
    let s = solve(ring_doc(&["K3"]), 3);
    for t in 1..=3 {
        let id = s.index.get(VarClass::LineOn, Element::Line("K3".into()), None, t).unwrap();
        assert_eq!(s.problem.variables[id].upper, 0.0);
        assert_eq!(s.solution.values[id], 0.0);
        for ph in Phase::ALL {
            for class in [VarClass::LineP, VarClass::LineQ] {
                let f = s.index.get(class, Element::Line("K3".into()), Some(ph), t).unwrap();
                assert!(s.solution.values[f].abs() < 1e-9);
            }
        }
    }
    assert_eq!(s.stage.line_p["K3"], [0.0; 3]);
}

#[test]
fn energized_faulted_line_rejected() {
    let (net, part) = load(ring_doc(&["K3"]));
    let mut inputs = StageInputs::initial(&net, &part, 2, 0.1, 0.5);
    inputs.status.lines.insert("K3".into(), true);
    inputs.status.buses.insert(3, true);
    let err = build_stage_problem(&net, &part, 0, &inputs, &RestorationSettings::default()).unwrap_err();
    assert!(matches!(err, BuildError::Input(InputError::Inconsistent(_))), "{err}");
}

#[test]
fn fixed_load_follows_its_bus() {
    let mut doc = toy_doc();
    doc["loads"][0]["switchable"] = json!(false);
    let s = solve(doc, 3);
    for t in 1..=3 {
        let xb = value(&s, VarClass::BusOn, Element::Bus(2), t);
        let xl = value(&s, VarClass::LoadOn, Element::Load("L2".into()), t);
        assert_eq!(xb.round(), xl.round(), "step {t}");
    }
    assert!(s.stage.status.load("L2"));
}

#[test]
fn long_horizon_keeps_first_step_only() {
    let s = solve(toy_doc(), 4);
    assert_eq!(s.stage.horizon_restored_kw.len(), 4);
    for b in [1, 2, 3] {
        let x = value(&s, VarClass::BusOn, Element::Bus(b), 1);
        assert_eq!(s.stage.status.bus(b), x > 0.5);
    }
    for l in ["K1", "K2"] {
        let x = value(&s, VarClass::LineOn, Element::Line(l.into()), 1);
        assert_eq!(s.stage.status.line(l), x > 0.5);
    }
    // Later steps pick up more than the first, which the stage must ignore.
    assert!(s.stage.horizon_restored_kw[3] > s.stage.horizon_restored_kw[0]);
    assert!((s.stage.restored_kw - s.stage.horizon_restored_kw[0]).abs() < 1e-9);
    assert!((s.stage.restored_kw - 90.0).abs() < 1e-6);
}

#[test]
fn resolve_is_deterministic() {
    let a = solve(toy_doc(), 3);
    let b = solve(toy_doc(), 3);
    assert_eq!(a.stage, b.stage);
    assert_eq!(a.solution.values, b.solution.values);
}

#[test]
fn near_integral_binary_decodes() {
    let s = solve(toy_doc(), 2);
    let id = s.index.get(VarClass::BusOn, Element::Bus(2), None, 1).unwrap();
    assert_eq!(s.solution.values[id], 1.0);
    let mut sol = s.solution.clone();
    sol.values[id] = 0.9999999;
    let st = extract_stage(&s.net, &s.problem, &sol, &s.index, &s.inputs).unwrap();
    assert!(st.status.bus(2));
    sol.values[id] = 0.6;
    assert!(matches!(
        extract_stage(&s.net, &s.problem, &sol, &s.index, &s.inputs),
        Err(ExtractError::Fractional { .. })
    ));
}

#[test]
fn missing_solution_reported() {
    let s = solve(toy_doc(), 2);
    let mut sol = s.solution.clone();
    sol.status = SolveStatus::Infeasible;
    sol.values.clear();
    assert_eq!(
        extract_stage(&s.net, &s.problem, &sol, &s.index, &s.inputs),
        Err(ExtractError::NoSolution(SolveStatus::Infeasible))
    );
}

#[test]
fn ring_solution_is_radial_until_forced_closed() {
    let s = solve(ring_doc(&[]), 3);
    assert!(check_radiality(&s.stage, &s.net).ok);
    let mut st = s.stage.clone();
    for b in [1, 2, 3] {
        st.status.buses.insert(b, true);
    }
    for l in ["K1", "K2", "K3"] {
        st.status.lines.insert(l.into(), true);
    }
    let report = check_radiality(&st, &s.net);
    assert!(!report.ok);
    assert!(report.violations.iter().any(|v| v.contains("cycle")), "{:?}", report.violations);
}

#[test]
fn flow_perturbation_breaks_balance() {
    let s = solve(toy_doc(), 2);
    let mut st = s.stage.clone();
    st.line_p.get_mut("K1").unwrap()[0] += 1e-3;
    let (ok, res) = check_power_balance(&st, &s.net, 1e-6);
    assert!(!ok);
    assert!((res - 1e-3).abs() < 1e-9, "{res}");
}

#[test]
fn dead_island_balances_trivially() {
    let s = solve(toy_doc(), 1);
    assert!(!s.stage.status.bus(3));
    assert_eq!(s.stage.line_p["K2"], [0.0; 3]);
    assert!(power_balance_residual(&s.stage, &s.net) < 1e-9);
}

#[test]
fn load_step_update_examples() {
    // 100 kW on a 1 MVA base, 0.2 Hz of headroom at 0.1 pu/Hz.
    assert!((update_max_load_step(0.1, 0.1, 0.5, 0.3) - 0.12).abs() < 1e-15);
    assert_eq!(update_max_load_step(0.07, 0.1, 0.5, 0.5), 0.07);
    assert_eq!(update_max_load_step(0.01, 0.1, 0.5, 2.0), 0.0);
}

#[test]
fn invalid_gain_or_limit_rejected() {
    let (net, part) = load(toy_doc());
    let inputs = StageInputs::initial(&net, &part, 2, 0.1, 0.5);
    let (mut p, idx) = build_stage_problem(&net, &part, 0, &inputs, &RestorationSettings::default()).unwrap();
    let bad_alpha = StageInputs { alpha: -0.1, ..inputs.clone() };
    assert_eq!(
        add_frequency_constraints(&mut p, &idx, &bad_alpha, FrequencyMode::Adaptive),
        Err(FrequencyError::Alpha(-0.1))
    );
    let bad_max = StageInputs { delta_f_max: 0.0, ..inputs };
    assert_eq!(
        add_frequency_constraints(&mut p, &idx, &bad_max, FrequencyMode::Adaptive),
        Err(FrequencyError::DeltaFMax(0.0))
    );
}

fn mls_upper(problem: &MilpProblem, index: &ModelIndex, t: usize) -> f64 {
    let id = index
        .get(VarClass::MaxLoadStep, Element::Generator("GF1".into()), None, t)
        .unwrap();
    problem.variables[id].upper
}

#[test]
fn first_stage_load_step_bounded_by_capacity_only() {
    let s = solve(toy_doc(), 2);
    assert!((mls_upper(&s.problem, &s.index, 1) - 0.1).abs() < 1e-12);
    assert!(!s.problem.constraints.iter().any(|c| c.name.starts_with("mls[")));
}

/// Inputs of the toy's second stage after a first stage that picked up L2,
/// with a carried load-step bound of 0.03 pu.
fn second_stage(meas: f64) -> (NetworkModel, MicrogridPartition, StageInputs) {
    let first = solve(toy_doc(), 2);
    let mut inputs = first.inputs.clone();
    inputs.absorb(&first.stage);
    inputs.stage = 2;
    inputs.max_load_step.insert("GF1".into(), 0.03);
    inputs.delta_f_meas.insert(0, meas);
    (first.net, first.part, inputs)
}

#[test]
fn carried_bound_caps_first_step() {
    let (net, part, inputs) = second_stage(0.5);
    let (mut p, idx) = build_stage_problem(&net, &part, 0, &inputs, &RestorationSettings::default()).unwrap();
    add_frequency_constraints(&mut p, &idx, &inputs, FrequencyMode::Adaptive).unwrap();
    assert!((mls_upper(&p, &idx, 1) - 0.03).abs() < 1e-15);
    let row = p.constraints.iter().find(|c| c.name == "mls[GF1,2]").unwrap();
    assert_eq!(row.rhs, 0.0);
}

fn next_stage_restored(meas: f64) -> f64 {
    let (net, part, inputs) = second_stage(meas);
    solve_with(net, part, inputs, &RestorationSettings::default()).stage.restored_kw
}

#[test]
fn large_measured_drop_blocks_pickup() {
    assert!((next_stage_restored(0.0) - 210.0).abs() < 1e-6);
    assert!((next_stage_restored(0.5) - 90.0).abs() < 1e-6);
}

fn recomputed_objective(s: &Solved, settings: &RestorationSettings) -> f64 {
    let mut obj = 0.0;
    for (id, key) in s.index.keys() {
        let x = s.solution.values[id];
        match (&key.class, &key.element) {
            (VarClass::LoadOn, Element::Load(l)) => {
                let ld = s.net.loads.iter().find(|d| &d.id == l).unwrap();
                obj += ld.priority * ld.total_p() * x;
            }
            (VarClass::MaxLoadStep, _) => obj -= settings.mls_penalty * x,
            (VarClass::GenP, Element::Generator(g)) if !g.starts_with("GF") => {
                obj -= settings.following_penalty * x;
            }
            (VarClass::LineOn, Element::Line(l)) if key.step == s.index.horizon => {
                if !s.inputs.status.line(l) && s.net.lines.iter().any(|k| &k.id == l && k.switchable) {
                    obj -= settings.switch_penalty * x;
                }
            }
            _ => {}
        }
    }
    obj
}

fn toy_with_follower() -> Value {
    let mut doc = toy_doc();
    doc["generators"].as_array_mut().unwrap().push(json!({
        "id": "G3", "bus": 3, "kind": "grid-following",
        "kw": { "a": 20.0, "b": 20.0, "c": 20.0 }
    }));
    doc
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn measured_drop_never_raises_pickup(a in 0.0f64..0.8, b in 0.0f64..0.8) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(next_stage_restored(hi) <= next_stage_restored(lo) + 1e-6);
    }

    #[test]
    fn objective_matches_decoded_values(
        w2 in 0.0f64..3.0,
        w3 in 0.0f64..3.0,
        horizon in 1usize..4,
    ) {
        let mut doc = toy_with_follower();
        doc["loads"][0]["priority"] = json!(w2);
        doc["loads"][1]["priority"] = json!(w3);
        let settings = RestorationSettings::default();
        let (net, part) = load(doc);
        let inputs = StageInputs::initial(&net, &part, horizon, 0.1, 0.5);
        let s = solve_with(net, part, inputs, &settings);
        let obj = recomputed_objective(&s, &settings);
        prop_assert!((obj - s.solution.objective).abs() < 1e-6, "{} vs {}", obj, s.solution.objective);
    }

    #[test]
    fn voltage_rows_slack_when_line_open(
        corner in proptest::collection::vec(0usize..3, 9),
        horizon in 1usize..3,
    ) {
        let (net, part) = load(ring_doc(&[]));
        let inputs = StageInputs::initial(&net, &part, horizon, 0.1, 0.5);
        let (p, idx) = build_stage_problem(&net, &part, 0, &inputs, &RestorationSettings::default()).unwrap();
        let mut x = vec![0.0; p.num_vars()];
        for (id, key) in idx.keys() {
            if let (VarClass::Voltage, Element::Bus(b)) = (&key.class, &key.element) {
                let bus = net.buses.iter().find(|d| d.id == *b).unwrap();
                let k = (*b as usize - 1) * 3 + key.phase.unwrap().index();
                x[id] = [0.0, bus.v_min_sq, bus.v_max_sq][corner[k]];
            }
        }
        for c in p.constraints.iter().filter(|c| c.name.starts_with("vdrop")) {
            prop_assert!(c.violation(&x) <= 1e-12, "{} violated", c.name);
        }
    }
}
