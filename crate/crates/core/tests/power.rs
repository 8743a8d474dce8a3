use copula_gof::copula::{tau_to_param, Family};
use copula_gof::experiments::{power_study, PowerRow};
use copula_gof::gof::TestConfig;
use copula_gof::parallel::with_threads;
use copula_gof::report::to_json;

#[test]
fn thread_count_does_not_change_results() {
    let spec = tau_to_param(Family::Clayton, 0.5).unwrap();
    let config = TestConfig {
        seed: 17,
        ..TestConfig::default()
    };
    let run = |threads| {
        with_threads(threads, || {
            power_study(Family::Gumbel, &spec, 256, 12, &config)
        })
        .unwrap()
        .unwrap()
    };
    let one = run(1);
    let four = run(4);
    assert_eq!(to_json(&one).unwrap(), to_json(&four).unwrap());
    assert_eq!(
        one.standard_error,
        PowerRow::standard_error_of(one.rejection_rate, one.n_mc)
    );
}

#[test]
fn seeds_change_the_hash() {
    let spec = tau_to_param(Family::Frank, 0.25).unwrap();
    let a = power_study(Family::Frank, &spec, 128, 10, &TestConfig::default()).unwrap();
    let b = power_study(
        Family::Frank,
        &spec,
        128,
        10,
        &TestConfig {
            seed: 1,
            ..TestConfig::default()
        },
    )
    .unwrap();
    assert_ne!(a.config_hash, b.config_hash);
}
