use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use weibull_ratio::chart::{phase1_train, phase2_step, run_length, CensorReason, ChartConfig, ChartState, Phase, RunLength, Window};
use weibull_ratio::distributions::{weibull_sample, ReliabilityLevel, WeibullParams};
use weibull_ratio::posterior::PriorSpec;
use weibull_ratio::{state, Error};

fn r95() -> ReliabilityLevel {
    ReliabilityLevel::new(0.95).unwrap()
}

fn draws(seed: u64, count: usize, n: usize, percentile: f64, shape: f64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = WeibullParams::from_percentile(percentile, shape, r95()).unwrap();
    (0..count).map(|_| weibull_sample(&mut rng, &p, n)).collect()
}

fn prior() -> PriorSpec {
    PriorSpec::new(1.0, 1.0, 3.0, r95()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn limits_are_ordered_and_positive(
        seed in any::<u64>(), m in 1usize..12, n in 1usize..7, shape in 1.0f64..6.0, xr in 0.3f64..3.0,
    ) {
        let x = draws(seed, m, n, xr, shape);
        let y = draws(seed ^ 1, m, n, 1.0, shape);
        let prior = PriorSpec::new(xr, 1.0, shape, r95()).unwrap();
        let (st, trace) = phase1_train(&x, &y, ChartConfig::new(n, m), prior).unwrap();
        prop_assert_eq!(trace.len(), m);
        for p in &trace {
            prop_assert!(p.lcl > 0.0 && p.lcl < p.ucl, "{:?}", p);
            prop_assert!(p.u_hat > 0.0 && p.beta_bar > 0.0);
        }
        let lim = st.frozen_limits().unwrap();
        prop_assert_eq!((lim.lcl, lim.ucl), (trace[m - 1].lcl, trace[m - 1].ucl));
    }

    #[test]
    fn prior_window_keeps_frozen_limits(seed in any::<u64>(), m in 2usize..12, w in 1usize..12) {
        prop_assume!(w <= m);
        let x = draws(seed, m, 4, 1.0, 3.0);
        let y = draws(seed ^ 1, m, 4, 1.0, 3.0);
        let all = phase1_train(&x, &y, ChartConfig::new(4, m), prior()).unwrap();
        let last = phase1_train(&x, &y, ChartConfig::new(4, m).with_window(Window::Last(w)), prior()).unwrap();
        prop_assert_eq!(all.0.frozen_limits(), last.0.frozen_limits());
        prop_assert_eq!(&all.1, &last.1);
        prop_assert_eq!(last.0.histories().0.len(), w);
        prop_assert_eq!(last.0.window_applied(), Some(w));
    }

    #[test]
    fn state_round_trip_continues_identically(seed in any::<u64>(), m in 1usize..8, extra in 1usize..6, w in 0usize..8) {
        let x = draws(seed, m + extra, 3, 1.0, 3.0);
        let y = draws(seed ^ 1, m + extra, 3, 1.2, 3.0);
        let window = if w == 0 || w > m { Window::All } else { Window::Last(w) };
        let config = ChartConfig::new(3, m).with_window(window);
        let (mut live, _) = phase1_train(&x[..m], &y[..m], config, prior()).unwrap();
        let text = state::serialize(&live);
        let mut restored = state::deserialize(&text).unwrap();
        prop_assert_eq!(state::serialize(&restored), text);
        for (xs, ys) in x[m..].iter().zip(&y[m..]) {
            let a = phase2_step(&mut live, xs, ys).unwrap();
            let b = phase2_step(&mut restored, xs, ys).unwrap();
            prop_assert_eq!(a, b);
        }
        prop_assert_eq!(state::serialize(&live), state::serialize(&restored));
    }
}

#[test]
fn phase2_before_training_is_rejected() {
    let mut st = ChartState::new(ChartConfig::new(4, 5), prior()).unwrap();
    assert_eq!(st.phase(), Phase::Training);
    let err = phase2_step(&mut st, &[1.0; 4], &[1.0; 4]).unwrap_err();
    assert!(matches!(err, Error::Phase(_)), "{err:?}");
}

#[test]
fn empty_stream_is_censored_as_exhausted() {
    let x = draws(3, 5, 4, 1.0, 3.0);
    let y = draws(4, 5, 4, 1.0, 3.0);
    let (mut st, _) = phase1_train(&x, &y, ChartConfig::new(4, 5), prior()).unwrap();
    let none: Vec<Vec<f64>> = Vec::new();
    let (rl, trace) = run_length(&mut st, &none, &none).unwrap();
    assert_eq!(rl, RunLength::Censored { steps: 0, reason: CensorReason::Exhausted });
    assert!(trace.is_empty());
}

#[test]
fn run_length_counts_to_first_signal_and_respects_cap() {
    let x = draws(5, 10, 5, 1.0, 3.0);
    let y = draws(6, 10, 5, 1.0, 3.0);
    let (st, _) = phase1_train(&x, &y, ChartConfig::new(5, 10), prior()).unwrap();
    // A large shift of the second process signals quickly.
    let x2 = draws(7, 60, 5, 1.0, 3.0);
    let y2 = draws(8, 60, 5, 0.4, 3.0);
    let (rl, trace) = run_length(&mut st.clone(), &x2, &y2).unwrap();
    let k = rl.signal().expect("shifted process signals");
    assert_eq!(trace.len(), k);
    assert!(trace[k - 1].signal && trace[..k - 1].iter().all(|p| !p.signal));

    let mut capped = st.clone();
    capped_config(&mut capped);
    let same_x = draws(9, 60, 5, 1.0, 3.0);
    let same_y = draws(10, 60, 5, 1.0, 3.0);
    let (rl, trace) = run_length(&mut capped, &same_x, &same_y).unwrap();
    match rl {
        RunLength::Censored { steps, reason } => assert_eq!((steps, reason, trace.len()), (3, CensorReason::Cap, 3)),
        RunLength::Signal(k) => assert!(k <= 3 && trace.len() == k),
    }
}

/// Rebuilds the state through its document with `rl_cap = 3`.
fn capped_config(st: &mut ChartState) {
    let mut doc: serde_json::Value = serde_json::from_str(&state::serialize(st)).unwrap();
    doc["config"]["rl_cap"] = serde_json::json!(3);
    *st = state::deserialize(&doc.to_string()).unwrap();
}

#[test]
fn mismatched_sample_sizes_are_rejected() {
    let x = draws(1, 3, 4, 1.0, 3.0);
    let y = draws(2, 3, 4, 1.0, 3.0);
    let (mut st, _) = phase1_train(&x, &y, ChartConfig::new(4, 3), prior()).unwrap();
    assert!(matches!(phase2_step(&mut st, &[1.0; 3], &[1.0; 4]), Err(Error::Shape(_))));
    assert!(phase1_train(&x[..2], &y, ChartConfig::new(4, 3), prior()).is_err());
}
