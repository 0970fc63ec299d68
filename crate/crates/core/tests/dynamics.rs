use sisfront_core::dynamics::{
    estimate_speeds, find_mu_star, simulate_and_classify, verify_attractor, ProbeSettings, SequentialExecutor,
    ThresholdSettings, Verdict, X_FAR,
};
use sisfront_core::frontfix::Numerics;
use sisfront_core::semiwave::{speed, Direction, SemiWaveConfig};
use sisfront_core::steady::solve_equilibrium;
use sisfront_core::{AnalysisError, ModelSpec};

fn speed_errors(spec: &ModelSpec, runs: &[(f64, usize)], x_far: f64) -> Vec<(f64, f64)> {
    let cfg = SemiWaveConfig::default();
    let k_r = speed(Direction::Rightward, spec, &cfg).unwrap().k_star;
    let k_l = speed(Direction::Leftward, spec, &cfg).unwrap().k_star;
    runs.iter()
        .map(|&(t_end, n)| {
            let settings = ProbeSettings {
                numerics: Numerics {
                    dt: 1e-3,
                    n,
                    output_stride: 1000,
                    ..Numerics::default()
                },
                r0_stride: 1000,
                ..ProbeSettings::default()
            };
            let (traj, outcome) = simulate_and_classify(spec, &settings, t_end, false).unwrap();
            assert_eq!(outcome.verdict, Verdict::Spreading);
            let fit = estimate_speeds(&traj, x_far).unwrap();
            ((fit.right.slope - k_r).abs() / k_r, (fit.left.slope - k_l).abs() / k_l)
        })
        .collect()
}

/// By `t = 10` the finite-time bias has decayed below the `O(dt)` and grid
/// error (about 3e-5 relative), so longer horizons no longer reduce the error.
#[test]
fn speed_error_is_at_the_discretisation_floor_from_t10() {
    let spec = ModelSpec::constant(4.0, 1.5, 6.0, 2.0, 1.0, 4.0, 1.0);
    let errors = speed_errors(&spec, &[(10.0, 2000), (20.0, 2000), (40.0, 2000)], X_FAR);
    assert!(errors.iter().all(|e| e.0 < 1e-3 && e.1 < 1e-3), "{errors:?}");
}

/// Constant coefficients have no transition region, so the fit can start
/// near the initial interval.
#[test]
fn speed_error_shrinks_with_short_horizons() {
    let spec = ModelSpec::constant(4.0, 1.5, 6.0, 2.0, 1.0, 4.0, 1.0);
    let errors = speed_errors(&spec, &[(1.0, 1000), (2.0, 1000), (4.0, 1000)], 1.0);
    for w in errors.windows(2) {
        assert!(w[1].0 < w[0].0 && w[1].1 < w[0].1, "{errors:?}");
    }
}

#[test]
fn supercritical_start_gives_zero_threshold() {
    let spec = ModelSpec::constant(1.0, 0.0, 1.0, 2.0, 5.0, 4.0, 1.0);
    let res = find_mu_star(&spec, (1.0, 6.0), &ThresholdSettings::default(), &SequentialExecutor).unwrap();
    assert!(res.spreads_for_all_mu);
    assert_eq!(res.mu_star, 0.0);
    assert!(res.probes.is_empty());
}

#[test]
fn bracket_must_straddle_the_threshold() {
    let spec = ModelSpec::reference(1.0, 1.5);
    let settings = ThresholdSettings {
        probe: ProbeSettings {
            numerics: Numerics {
                n: 100,
                dt: 2e-2,
                ..Numerics::default()
            },
            ..ProbeSettings::default()
        },
        ..ThresholdSettings::default()
    };
    // both ends spread
    let err = find_mu_star(&spec, (5.0, 6.0), &settings, &SequentialExecutor).unwrap_err();
    assert!(matches!(err, AnalysisError::Bracket(_)), "{err}");
    let err = find_mu_star(&spec, (2.0, 1.0), &settings, &SequentialExecutor).unwrap_err();
    assert!(matches!(err, AnalysisError::Bracket(_)), "{err}");
}

/// Stops at `t = 15`: with `n = 800` the error flattens near 1e-4 around
/// `t = 19` and then wobbles at that floor.
#[test]
fn reference_run_approaches_the_equilibrium() {
    let spec = ModelSpec::reference(6.0, 1.5);
    let settings = ProbeSettings {
        numerics: Numerics {
            dt: 5e-3,
            n: 800,
            output_stride: 40,
            ..Numerics::default()
        },
        r0_stride: 40,
        ..ProbeSettings::default()
    };
    let (traj, outcome) = simulate_and_classify(&spec, &settings, 15.0, false).unwrap();
    let eq = solve_equilibrium(&spec, 50.0, 2000).unwrap();
    let report = verify_attractor(&traj, &outcome, &eq, 5.0).unwrap();
    assert!(report.errors.len() >= 4, "{report:?}");
    for w in report.errors.windows(2) {
        assert!(w[1].1 <= w[0].1, "{:?}", report.errors);
    }
    assert!(report.final_error < 1e-2, "{report:?}");
}
