mod common;

use policy_lab::dsl::{compile, parse_expr, CheckedProgram};
use policy_lab::runtime::{
    evaluate, phase_in_delta, proportional_deltas, run_program, weighted_lifetime, RuntimeErrorKind, RuntimeState,
    YearFrame,
};
use proptest::prelude::*;

fn toy_frame(cells: &[(&str, &str, f64)]) -> YearFrame {
    let mut frame = YearFrame::zeroed(common::vocabulary("toy"));
    for &(region, attr, v) in cells {
        assert!(frame.set(region, attr, v), "{region}.{attr}");
    }
    frame
}

fn program(src: &str) -> CheckedProgram {
    compile(src, "t.pol", &common::vocabulary("toy"), None).unwrap_or_else(|d| panic!("{d:?}"))
}

fn eval_src(src: &str, state: &RuntimeState) -> Result<f64, RuntimeErrorKind> {
    evaluate(&parse_expr(src).unwrap(), state).map_err(|e| e.kind)
}

#[test]
fn evaluate_examples() {
    let state = RuntimeState::new(toy_frame(&[("china", "eolRecyclingMT", 12.0)]), 2030);
    assert_eq!(eval_src("1 + 2 * 3", &state), Ok(7.0));
    assert_eq!(eval_src("min(out.china.eolRecyclingMT, 5)", &state), Ok(5.0));
    assert_eq!(eval_src("(3 > 2) ? 10 : 20", &state), Ok(10.0));
    assert_eq!(eval_src("out.global.eolRecyclingMT", &state), Ok(12.0));
}

#[test]
fn evaluate_errors() {
    let state = RuntimeState::new(toy_frame(&[]), 2030);
    assert_eq!(eval_src("1 / out.china.eolRecyclingMT", &state), Err(RuntimeErrorKind::DivisionByZero));
    assert!(matches!(eval_src("0 ^ -1", &state), Err(RuntimeErrorKind::DomainError(_))));
    assert!(matches!(eval_src("(0 - 8) ^ 0.5", &state), Err(RuntimeErrorKind::DomainError(_))));
    assert_eq!(eval_src("10 ^ 400", &state), Err(RuntimeErrorKind::NonFiniteResult));
    assert_eq!(eval_src("in.share", &state), Err(RuntimeErrorKind::UnboundInput("share".into())));
    // Short-circuiting skips the failing operand.
    assert_eq!(eval_src("0 and 1 / 0", &state), Ok(0.0));
    assert_eq!(eval_src("1 or 1 / 0", &state), Ok(1.0));
    assert_eq!(eval_src("1 ? 2 : 1 / 0", &state), Ok(2.0));
}

#[test]
fn lifecycle_examples() {
    assert_eq!(weighted_lifetime(&[(10.0, 1.0), (30.0, 3.0)]), (2.5, false));
    assert_eq!(weighted_lifetime(&[(7.0, 4.5)]), (4.5, false));
    assert_eq!(weighted_lifetime(&[(0.0, 4.5)]), (4.5, true));
    assert_eq!(weighted_lifetime(&[(0.0, 2.0), (0.0, 4.0)]), (3.0, true));

    // Through the language: packaging (0.5 y) and textile (2 y).
    let frame = toy_frame(&[("china", "consumptionPackagingMT", 30.0), ("china", "consumptionTextileMT", 10.0)]);
    let state = RuntimeState::new(frame, 2030);
    let life = eval_src("lifecycle([out.china.consumptionPackagingMT, out.china.consumptionTextileMT])", &state);
    assert_eq!(life, Ok((30.0 * 0.5 + 10.0 * 2.0) / 40.0));
    let empty = eval_src("lifecycle([out.row.consumptionPackagingMT, out.row.consumptionTextileMT])", &state);
    assert_eq!(empty, Ok(1.25));
}

#[test]
fn distribute_examples() {
    assert_eq!(proportional_deltas(10.0, &[6.0, 2.0]), (vec![7.5, 2.5], false));
    assert_eq!(proportional_deltas(-4.0, &[6.0, 2.0]), (vec![-3.0, -1.0], false));
    assert_eq!(proportional_deltas(9.0, &[0.0, 0.0, 0.0]), (vec![3.0, 3.0, 3.0], true));
}

#[test]
fn phase_in_examples() {
    assert_eq!(phase_in_delta(100.0, 2025.0, 2035.0, 2030), Ok(50.0));
    assert_eq!(phase_in_delta(100.0, 2025.0, 2035.0, 2024), Ok(0.0));
    assert_eq!(phase_in_delta(100.0, 2025.0, 2035.0, 2040), Ok(100.0));
    assert_eq!(phase_in_delta(100.0, 2030.0, 2030.0, 2030), Ok(100.0));
    assert!(matches!(phase_in_delta(1.0, 2031.0, 2030.0, 2030), Err(RuntimeErrorKind::InvalidInterval { .. })));
}

#[test]
fn execute_examples() {
    let mut state = RuntimeState::new(toy_frame(&[("china", "eolMismanagedMT", 15.0)]), 2030);
    let d = run_program(&program("limit out.china.eolMismanagedMT to [0, 10];"), &mut state).unwrap();
    assert_eq!(state.frame.get("china", "eolMismanagedMT"), Some(10.0));
    assert_eq!(d.clamps_applied.len(), 1);
    assert_eq!((d.clamps_applied[0].before, d.clamps_applied[0].after), (15.0, 10.0));

    let mut state = RuntimeState::new(toy_frame(&[]), 2030);
    run_program(&program("var a = 2; out.china.eolRecyclingMT = a * 3;"), &mut state).unwrap();
    assert_eq!(state.frame.get("china", "eolRecyclingMT"), Some(6.0));

    let mut state = RuntimeState::new(toy_frame(&[]), 2030);
    run_program(
        &program("if 0 { out.china.eolLandfillMT = 5; } else { out.china.eolLandfillMT = 1; }"),
        &mut state,
    )
    .unwrap();
    assert_eq!(state.frame.get("china", "eolLandfillMT"), Some(1.0));

    let mut state = RuntimeState::new(toy_frame(&[("china", "eolLandfillMT", 2.0)]), 2030);
    let d = run_program(&program("out.china.eolLandfillMT = out.china.eolLandfillMT - 5;"), &mut state).unwrap();
    assert_eq!(state.frame.get("china", "eolLandfillMT"), Some(0.0));
    assert_eq!((d.clamps_applied[0].before, d.clamps_applied[0].after), (-3.0, 0.0));

    let mut state = RuntimeState::new(toy_frame(&[]), 2030);
    let err = run_program(&program("var x = 1;\nlimit out.china.eolLandfillMT to [5, 1];"), &mut state).unwrap_err();
    assert!(matches!(err.error.kind, RuntimeErrorKind::LimitBoundsInverted { .. }));
    assert_eq!((err.statement_index, err.error.span.line), (1, 2));
}

#[test]
fn empty_program_is_identity() {
    let frame = toy_frame(&[("row", "eolRecyclingMT", 3.0)]);
    let mut state = RuntimeState::new(frame.clone(), 2030);
    let d = run_program(&program(""), &mut state).unwrap();
    assert!(d.is_empty());
    assert_eq!(state.frame, frame);
}

/// Hand-evaluated transcript of a composite script on a two-region frame.
/// Every intermediate value below was worked out by hand, statement by
/// statement, before running anything.
#[test]
fn composite_script_matches_hand_transcript() {
    let frame = toy_frame(&[
        ("china", "consumptionPackagingMT", 20.0),
        ("china", "consumptionTextileMT", 10.0),
        ("china", "consumptionConstructionMT", 10.0),
        ("china", "eolRecyclingMT", 6.0),
        ("china", "eolIncinerationMT", 2.0),
        ("china", "eolLandfillMT", 2.0),
        ("china", "eolMismanagedMT", 8.0),
        ("row", "consumptionPackagingMT", 40.0),
        ("row", "eolRecyclingMT", 1.0),
        ("row", "eolIncinerationMT", 1.0),
        ("row", "eolLandfillMT", 1.0),
        ("row", "eolMismanagedMT", 12.0),
    ]);
    let src = "\
var cut = in.cut;
change out.china.consumptionPackagingMT by -cut * out.china.consumptionPackagingMT over 2026 to 2034;
distribute out.china.eolMismanagedMT * 50% across [out.china.eolRecyclingMT, out.china.eolIncinerationMT] proportionally;
out.china.eolMismanagedMT = out.china.eolMismanagedMT - 4;
limit out.row.eolMismanagedMT to [0, out.global.eolMismanagedMT / 4];
distribute -3 across [out.row.eolRecyclingMT, out.row.eolLandfillMT];
if lifecycle([out.china.consumptionPackagingMT, out.china.consumptionTextileMT]) < 1 {
  out.row.eolIncinerationMT = 100;
} else {
  out.row.eolIncinerationMT = out.row.eolIncinerationMT + 2;
}
";
    let mut state = RuntimeState::new(frame, 2030).with_input("cut", 0.25);
    let d = run_program(&program(src), &mut state).unwrap();

    // change: amount -0.25 * 20 = -5, share (2030 - 2026) / 8 = 1/2, so 20 - 2.5.
    // distribute 8 * 0.5 = 4 over (6, 2): +3 and +1.
    // mismanaged 8 - 4 = 4.
    // global mismanaged 4 + 12 = 16, upper bound 4: row 12 -> 4.
    // -3 over (1, 1): -1.5 each, both clamp from -0.5 to 0.
    // lifecycle (17.5 * 0.5 + 10 * 2) / 27.5 = 28.75 / 27.5 > 1, so else: 1 + 2.
    let expected = [
        ("china", [17.5, 10.0, 10.0, 9.0, 3.0, 2.0, 4.0]),
        ("row", [40.0, 0.0, 0.0, 0.0, 3.0, 0.0, 4.0]),
    ];
    let attrs = [
        "consumptionPackagingMT",
        "consumptionTextileMT",
        "consumptionConstructionMT",
        "eolRecyclingMT",
        "eolIncinerationMT",
        "eolLandfillMT",
        "eolMismanagedMT",
    ];
    for (region, values) in expected {
        for (attr, want) in attrs.iter().zip(values) {
            assert_eq!(state.frame.get(region, attr), Some(want), "{region}.{attr}");
        }
    }
    let clamps: Vec<(String, f64, f64)> =
        d.clamps_applied.iter().map(|c| (c.address.clone(), c.before, c.after)).collect();
    assert_eq!(
        clamps,
        vec![
            ("out.row.eolMismanagedMT".to_string(), 12.0, 4.0),
            ("out.row.eolRecyclingMT".to_string(), -0.5, 0.0),
            ("out.row.eolLandfillMT".to_string(), -0.5, 0.0),
        ]
    );
    assert_eq!(d.divisions_guarded, 0);
    assert_eq!(state.local("cut"), Some(0.25));
}

fn corpus_inputs(state: RuntimeState) -> RuntimeState {
    [("share", 0.3), ("cut", 0.2), ("minimum", 1.0), ("enabled", 1.0), ("level", 2.0), ("force", 0.0)]
        .into_iter()
        .chain([("strict", 1.0), ("x", 1.5), ("rate", 0.1)])
        .fold(state, |s, (k, v)| s.with_input(k, v))
}

#[test]
fn corpus_runs_are_deterministic() {
    let desk = common::desk();
    let vocab = desk.vocabulary().clone();
    for (name, src) in common::corpus() {
        let program = compile(&src, &name, &vocab, None).unwrap();
        let start = corpus_inputs(RuntimeState::new(YearFrame::from_series(&desk, 2030), 2030));
        let mut a = start.clone();
        let mut b = start.clone();
        let da = run_program(&program, &mut a).unwrap_or_else(|e| panic!("{name}: {e}"));
        let db = run_program(&program, &mut b).unwrap();
        assert_eq!(da, db, "{name}");
        for r in 0..vocab.regions().len() {
            let bits = |s: &RuntimeState| s.frame.region_row(r).iter().map(|v| v.to_bits()).collect::<Vec<_>>();
            assert_eq!(bits(&a), bits(&b), "{name}");
        }
    }
}

#[test]
fn failed_run_leaves_state_untouched() {
    let frame = toy_frame(&[("china", "eolRecyclingMT", 5.0)]);
    let start = RuntimeState::new(frame, 2030);
    let mut state = start.clone();
    let src = "out.china.eolRecyclingMT = 99;\nvar z = out.china.eolLandfillMT;\nout.row.eolRecyclingMT = 1 / z;";
    let err = run_program(&program(src), &mut state).unwrap_err();
    assert_eq!(err.error.kind, RuntimeErrorKind::DivisionByZero);
    assert_eq!(err.statement_index, 2);
    assert_eq!((err.error.span.line, err.error.span.column), (3, 26));
    assert_eq!(state, start);
}

proptest! {
    #[test]
    fn distribution_conserves_amount(
        amount in -1e6..1e6f64,
        values in prop::collection::vec(prop_oneof![Just(0.0), 0.0..1e4f64], 1..12),
    ) {
        let (deltas, _) = proportional_deltas(amount, &values);
        let total: f64 = deltas.iter().sum();
        prop_assert!((total - amount).abs() <= 1e-9 * amount.abs().max(1.0), "{total} vs {amount}");
    }

    #[test]
    fn distribution_permutes_with_targets(
        amount in -100.0..100.0f64,
        values in prop::collection::vec(0.0..50.0f64, 2..6),
        rotate in 0usize..6,
    ) {
        let (deltas, _) = proportional_deltas(amount, &values);
        let k = rotate % values.len();
        let mut rotated = values.clone();
        rotated.rotate_left(k);
        let (rdeltas, _) = proportional_deltas(amount, &rotated);
        let mut expect = deltas.clone();
        expect.rotate_left(k);
        for (a, b) in rdeltas.iter().zip(&expect) {
            prop_assert!((a - b).abs() <= 1e-12 * amount.abs().max(1.0));
        }
    }

    #[test]
    fn distribute_statement_reads_before_writing(a in 0.0..100.0f64, b in 0.0..100.0f64, amount in 0.0..50.0f64) {
        let frame = toy_frame(&[("china", "eolRecyclingMT", a), ("china", "eolLandfillMT", b)]);
        let mut fwd = RuntimeState::new(frame.clone(), 2030).with_input("m", amount);
        let mut rev = RuntimeState::new(frame, 2030).with_input("m", amount);
        run_program(&program("distribute in.m across [out.china.eolRecyclingMT, out.china.eolLandfillMT];"), &mut fwd).unwrap();
        run_program(&program("distribute in.m across [out.china.eolLandfillMT, out.china.eolRecyclingMT];"), &mut rev).unwrap();
        for attr in ["eolRecyclingMT", "eolLandfillMT"] {
            let (x, y) = (fwd.frame.get("china", attr).unwrap(), rev.frame.get("china", attr).unwrap());
            prop_assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0));
        }
    }

    #[test]
    fn phase_in_is_monotone_and_bounded(amount in 0.0..1e4f64, start in 2000i32..2060, len in 0i32..30, year in 1990i32..2100) {
        let (s, e) = (start as f64, (start + len) as f64);
        let here = phase_in_delta(amount, s, e, year).unwrap();
        let next = phase_in_delta(amount, s, e, year + 1).unwrap();
        prop_assert!(here <= next);
        prop_assert!((0.0..=amount).contains(&here));
    }
}
