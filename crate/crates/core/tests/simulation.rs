use weibull_ratio::chart::RunLength;
use weibull_ratio::simulator::{
    estimate_arl, prior_sensitivity_grid, run_lengths, scenario_table, simulate_run, simulate_run_swapped_streams,
    ArlEstimate, ArlScenario, GridBase,
};

#[test]
fn run_lengths_do_not_depend_on_thread_count() {
    let s = ArlScenario::standard(0.5, 1.0, 48, 11);
    let serial = run_lengths(&s, 1).unwrap();
    let parallel = run_lengths(&s, 8).unwrap();
    assert_eq!(serial, parallel);
    let again: Vec<RunLength> = (0..48).map(|i| simulate_run(&s, i).unwrap()).collect();
    assert_eq!(serial, again);
}

#[test]
fn different_master_seeds_give_different_runs() {
    let a = run_lengths(&ArlScenario::standard(0.8, 1.0, 32, 1), 4).unwrap();
    let b = run_lengths(&ArlScenario::standard(0.8, 1.0, 32, 2), 4).unwrap();
    assert_ne!(a, b);
}

/// Exchanging the processes and their random streams mirrors every
/// replication, so the two ARLs agree well inside sampling error.
#[test]
fn swapped_study_matches_within_three_standard_errors() {
    let s = ArlScenario::standard(0.5, 1.0, 200, 5);
    let direct = run_lengths(&s, 4).unwrap();
    let mirrored: Vec<RunLength> = (0..200).map(|i| simulate_run_swapped_streams(&s.swapped(), i).unwrap()).collect();
    let (a, b) = (ArlEstimate::from_run_lengths(&direct), ArlEstimate::from_run_lengths(&mirrored));
    let se = a.standard_error.hypot(b.standard_error);
    assert!((a.arl - b.arl).abs() <= 3.0 * se, "{} vs {} (se {se})", a.arl, b.arl);
    let identical = direct.iter().zip(&mirrored).filter(|(x, y)| x == y).count();
    assert!(identical >= 195, "only {identical} of 200 replications mirrored exactly");
}

#[test]
fn scenario_table_keeps_input_order() {
    let base = ArlScenario::standard(1.0, 1.0, 16, 3);
    let pairs = [(1.5, 1.0), (0.5, 1.0), (1.0, 0.5)];
    let rows = scenario_table(&base, &pairs, 4).unwrap();
    assert_eq!(rows.len(), 3);
    for (row, &(x, y)) in rows.iter().zip(&pairs) {
        assert_eq!((row.x_r_out, row.y_r_out, row.ratio), (x, y, x / y));
        assert_eq!(row.estimate, estimate_arl(&base.with_shift(x, y), 1).unwrap());
    }
    assert!(scenario_table(&base, &[], 1).is_err());
}

#[test]
fn censoring_is_counted_and_bounded() {
    let mut s = ArlScenario::in_control(12, 9);
    s.rl_cap = 5;
    let est = estimate_arl(&s, 2).unwrap();
    assert_eq!(est.runs_used, 12);
    assert!(est.censored > 0);
    assert!(est.arl_lower_bound <= 5.0);
}

#[test]
fn estimate_statistics_are_exact_on_known_input() {
    let rls = [RunLength::Signal(2), RunLength::Signal(4), RunLength::Signal(6)];
    let e = ArlEstimate::from_run_lengths(&rls);
    assert_eq!((e.arl, e.sdrl, e.censored), (4.0, 2.0, 0));
    assert!((e.standard_error - 2.0 / 3f64.sqrt()).abs() < 1e-15);
}

#[test]
fn prior_grid_is_reproducible_and_row_major() {
    let base = GridBase::bundled();
    let a = prior_sensitivity_grid(&base, &[0.5, 1.0], &[1.0, 1.5], 4).unwrap();
    let b = prior_sensitivity_grid(&base, &[0.5, 1.0], &[1.0, 1.5], 4).unwrap();
    assert_eq!(a, b);
    let order: Vec<(f64, f64)> = a.iter().map(|c| (c.percentile_factor, c.beta_factor)).collect();
    assert_eq!(order, [(0.5, 1.0), (0.5, 1.5), (1.0, 1.0), (1.0, 1.5)]);
    assert!(prior_sensitivity_grid(&base, &[], &[1.0], 4).is_err());
}
