use bandedge::dynamics::{
    a1_inverse_laplace, cross_validate, refinement_errors, solve_volterra, Mode, ProductOrder, SolverConfig,
};
use bandedge::model::{ReservoirModel, SystemParams};
use bandedge::spectra::a1_steady;

fn iso(delta_g: f64, delta: f64, gamma: f64) -> (ReservoirModel, SystemParams) {
    let params = SystemParams {
        delta_g,
        delta,
        gamma,
        ..SystemParams::default()
    };
    (ReservoirModel::isotropic(1.0, delta_g).unwrap(), params)
}

#[test]
fn volterra_matches_inversion_on_the_reference_case() {
    let (m, p) = iso(0.0, 1.0, 1.0);
    let cv = cross_validate(&m, &p, &SolverConfig::default()).unwrap();
    assert!(cv.max_pointwise_error < 1e-4, "{cv:?}");
}

#[test]
fn both_routes_reach_the_steady_state() {
    let (m, p) = iso(0.0, 1.0, 1.0);
    let config = SolverConfig {
        horizon: 100.0,
        ..SolverConfig::default()
    };
    let cv = cross_validate(&m, &p, &config).unwrap();
    assert!(cv.steady_state_error.unwrap() < 1e-3);
    assert!(cv.steady_state_error_laplace.unwrap() < 1e-3);
}

#[test]
fn refinement_reduces_error_at_nominal_rate() {
    let (m, p) = iso(1.0, -2.0, 0.2);
    for order in [ProductOrder::First, ProductOrder::Second] {
        let errors = refinement_errors(&m, &p, order, 0.05, 10.0, 4).unwrap();
        for w in errors.windows(2) {
            assert!(w[0] / w[1] >= order.nominal_factor(), "{order:?}: {errors:?}");
        }
    }
}

#[test]
fn refinement_approaches_nominal_rate_on_the_reference_case() {
    // Here the factors approach the nominal value from below.
    let (m, p) = iso(0.0, 1.0, 1.0);
    for order in [ProductOrder::First, ProductOrder::Second] {
        let errors = refinement_errors(&m, &p, order, 0.1, 10.0, 4).unwrap();
        let last = errors[2] / errors[3];
        assert!((last / order.nominal_factor() - 1.0).abs() < 0.06, "{order:?}: {errors:?}");
    }
}

#[test]
fn inversion_and_volterra_agree_across_regimes() {
    for &(delta_g, delta, gamma) in &[(0.0, -1.0, 1.0), (1.0, 1.0, 0.5), (3.0, 0.0, 1.0), (0.0, 1.0, 0.0), (0.0, 0.0, 1.0)] {
        let (m, p) = iso(delta_g, delta, gamma);
        let config = SolverConfig {
            step: 0.01,
            horizon: 20.0,
            ..SolverConfig::default()
        };
        let traj = solve_volterra(&m, &p, &config, Mode::Perturbative).unwrap();
        let inv = a1_inverse_laplace(&m, &p, &config, &traj.times[1..]).unwrap();
        let worst = traj.a1[1..].iter().zip(&inv).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(worst < 1e-5, "{delta_g} {delta} {gamma}: {worst}");
    }
}

#[test]
fn final_value_grid() {
    for &gamma in &[0.5, 1.0, 2.0] {
        for &offset in &[-2.0, -0.5, 0.5, 2.0] {
            let (m, p) = iso(1.0, 1.0 + offset, gamma);
            let config = SolverConfig {
                horizon: 100.0,
                ..SolverConfig::default()
            };
            let t = solve_volterra(&m, &p, &config, Mode::Perturbative).unwrap();
            let err = (t.final_a1() - a1_steady(&m, &p).unwrap()).norm();
            assert!(err < 1e-3, "gamma {gamma} offset {offset}: {err}");
        }
    }
}
