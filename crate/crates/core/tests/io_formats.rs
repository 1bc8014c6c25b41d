use proptest::prelude::*;
use weibull_ratio::chart::{ChartPoint, PointPhase};
use weibull_ratio::experiments::fig1a;
use weibull_ratio::io::config::{seed_from_env, RunConfig, DEFAULT_SEED, KEYS};
use weibull_ratio::io::trace::{format_trace, parse_trace, TRACE_HEADER};
use weibull_ratio::io::{fixtures, parse_samples};
use weibull_ratio::Error;

#[test]
fn bundled_fixtures_match_their_pins() {
    fixtures::verify().unwrap();
    assert_eq!(fixtures::sha256_hex(fixtures::TABLE1_CSV), fixtures::TABLE1_SHA256);
    assert_eq!(fixtures::sha256_hex(fixtures::TABLE2_CSV), fixtures::TABLE2_SHA256);
    for t in [fixtures::table1(), fixtures::table2()] {
        assert_eq!(t.len(), fixtures::SAMPLES);
        assert!(t.iter().all(|s| s.len() == fixtures::SAMPLE_SIZE));
    }
}

#[test]
fn sample_errors_name_the_line() {
    let cases = [
        ("1,2\n3,x\n", 2),
        ("# header\n1,2,3\n\n4,5\n", 4),
        ("1,-2\n", 1),
        ("1,2\n3,0\n", 2),
    ];
    for (text, line) in cases {
        match parse_samples(text) {
            Err(Error::Parse { line: Some(l), .. }) => assert_eq!(l, line, "{text:?}"),
            other => panic!("{text:?}: {other:?}"),
        }
    }
    assert_eq!(parse_samples("# only a comment\n\n").unwrap(), Vec::<Vec<f64>>::new());
    assert_eq!(parse_samples(" 1.5 , 2\n3,4\n").unwrap(), vec![vec![1.5, 2.0], vec![3.0, 4.0]]);
}

#[test]
fn replay_trace_round_trips() {
    let trace = fig1a().unwrap().trace();
    let text = format_trace(&trace);
    assert!(text.starts_with(TRACE_HEADER));
    let parsed = parse_trace(&text).unwrap();
    assert_eq!(parsed.len(), trace.len());
    for (a, b) in trace.iter().zip(&parsed) {
        assert_eq!((a.index, a.phase, a.signal), (b.index, b.phase, b.signal));
        for (x, y) in [(a.u_hat, b.u_hat), (a.lcl, b.lcl), (a.ucl, b.ucl), (a.beta_bar, b.beta_bar)] {
            assert!((x - y).abs() <= 5e-10 * x.abs());
        }
    }
    assert_eq!(format_trace(&parsed), text);
}

#[test]
fn malformed_traces_are_rejected() {
    assert!(parse_trace("index,u\n").is_err());
    let good = format!("{TRACE_HEADER}\n1,phase1,0.8,0.7,0.9,false,5\n");
    assert!(parse_trace(&good).is_ok());
    for bad in ["1,phase3,0.8,0.7,0.9,false,5", "1,phase1,0.8,0.7,0.9,maybe,5", "1,phase1,0.8,0.7"] {
        match parse_trace(&format!("{TRACE_HEADER}\n{bad}\n")) {
            Err(Error::Parse { line: Some(2), .. }) => {}
            other => panic!("{bad}: {other:?}"),
        }
    }
}

fn arb_point() -> impl Strategy<Value = ChartPoint> {
    (1usize..10_000, any::<bool>(), 1e-6f64..1e6, 1e-6f64..1e6, 1e-6f64..1e6, any::<bool>(), 0.01f64..100.0).prop_map(
        |(index, p2, u_hat, lcl, ucl, signal, beta_bar)| ChartPoint {
            index,
            phase: if p2 { PointPhase::Phase2 } else { PointPhase::Phase1 },
            u_hat,
            lcl,
            ucl,
            signal,
            beta_bar,
        },
    )
}

proptest! {
    #[test]
    fn trace_emit_parse_emit_is_stable(points in prop::collection::vec(arb_point(), 0..30)) {
        let text = format_trace(&points);
        let parsed = parse_trace(&text).unwrap();
        prop_assert_eq!(format_trace(&parsed), text);
        for (a, b) in points.iter().zip(&parsed) {
            prop_assert!((a.u_hat - b.u_hat).abs() <= 5e-10 * a.u_hat);
            prop_assert!((a.beta_bar - b.beta_bar).abs() <= 5e-10 * a.beta_bar);
        }
    }
}

#[test]
fn config_keys_are_all_accepted() {
    let text: String = KEYS
        .iter()
        .map(|k| {
            let v = match *k {
                "window" => "last(3)",
                "out" | "x" | "y" => "path.csv",
                "alpha" | "r_level" => "0.5",
                _ => "3",
            };
            format!("{k} = {v}\n")
        })
        .collect();
    let cfg = RunConfig::parse(&text).unwrap();
    assert_eq!(cfg.m, Some(3));
    assert_eq!(cfg.master_seed().unwrap(), 3);
    assert!(matches!(RunConfig::parse("# c\nwidth = 3\n"), Err(Error::Parse { line: Some(2), .. })));
}

#[test]
fn seed_default_and_override() {
    assert_eq!(seed_from_env(None).unwrap(), DEFAULT_SEED);
    assert_eq!(seed_from_env(Some("")).unwrap(), DEFAULT_SEED);
    assert_eq!(seed_from_env(Some("99")).unwrap(), 99);
    assert!(matches!(seed_from_env(Some("-1")), Err(Error::Usage(_))));
}
