use probe_regret::base::Moments;
use probe_regret::harness::verify::{lemmas_suite, regressions_suite, LemmaOptions};
use probe_regret::harness::{replicate, run_experiment, ExperimentConfig};

fn config(text: &str) -> ExperimentConfig {
    ExperimentConfig::from_toml_str(text).unwrap()
}

#[test]
fn doubling_replications_shrinks_stderr_by_root_two() {
    let cfg = config(
        r#"
policy = "lwc"
horizon = 200
replications = 3200
[params]
eta = 0.4
[env]
kind = "adversarial"
dim = 6
generator = { name = "random", lo = 0.0, hi = 1.0 }
"#,
    );
    let pool = replicate(&cfg).unwrap().final_regrets;
    let mean_se = |r: usize| {
        let ses: Vec<f64> = pool.chunks_exact(r).map(|c| Moments::from_slice(c).std_err()).collect();
        ses.iter().sum::<f64>() / ses.len() as f64
    };
    let ratio = mean_se(50) / mean_se(25);
    assert!((ratio - 0.5f64.sqrt()).abs() < 0.05, "stderr ratio {ratio}");
}

#[test]
fn halved_noise_fails_the_lemma_suite() {
    let opts = LemmaOptions {
        instances: 50,
        dp_draws: 200_000,
        scale_multiplier: 0.5,
    };
    let report = lemmas_suite(3, opts).unwrap();
    let fail = report.first_failure().expect("mutation is caught");
    assert!(fail.name.starts_with("action privacy"), "{}", fail.name);
    assert!(fail.first_failure.is_some());
}

#[test]
fn regression_suite_passes() {
    let report = regressions_suite(0).unwrap();
    assert!(report.passed(), "{:?}", report.first_failure());
}

#[test]
fn lwc_constant_stream_stays_under_its_bound() {
    let cfg = config(
        r#"
policy = "lwc"
horizon = 1000
replications = 10
[params]
eta = 0.4
[env]
kind = "adversarial"
dim = 5
generator = { name = "constant", loss = [1.0, 0.8, 0.6, 0.4, 0.2] }
"#,
    );
    let report = replicate(&cfg).unwrap();
    let leader = report.bounds.iter().find(|b| b.name == "leader").unwrap();
    assert!(leader.holds && report.mean_regret <= leader.value);
    assert!(report.mean_regret >= 0.0);
}

#[test]
fn zero_horizon_is_rejected() {
    let err = ExperimentConfig::from_toml_str(
        r#"
policy = "hwc"
horizon = 0
[env]
kind = "adversarial"
dim = 3
generator = { name = "alternating" }
"#,
    );
    assert!(err.is_err());
}

#[test]
fn trace_regret_matches_report_for_one_replication() {
    let cfg = config(
        r#"
policy = "corr-exploit"
horizon = 500
[env]
kind = "stochastic"
arms = { law = "tight", n = 5, delta = 0.04 }
"#,
    );
    let trace = run_experiment(&cfg).unwrap();
    let report = replicate(&cfg).unwrap();
    assert_eq!(report.final_regrets, vec![trace.final_regret()]);
    assert_eq!(report.stderr, 0.0);
}
