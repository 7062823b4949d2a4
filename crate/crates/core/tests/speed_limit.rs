mod common;

use common::adaptive_simpson;
use srlab::meanfield::{self, ModelParams};
use srlab::qsl::{self, QslInputs};

const N: u64 = 1_000_000;

fn quadrature_average(inputs: &QslInputs) -> f64 {
    let p = inputs.params;
    let f = |t: f64| qsl::instantaneous_variance(t, &p);
    let scale = f(p.t_delay()) * inputs.tau;
    adaptive_simpson(&f, 0.0, inputs.tau, 1e-12 * scale, 40) / inputs.tau
}

#[test]
fn averaged_spread_matches_quadrature() {
    for alpha in [0.01, 0.1, 1.0, 10.0] {
        let p = ModelParams::from_alpha(N, alpha, 1.0).unwrap();
        for factor in [0.5, 1.0, 2.0] {
            let inputs = QslInputs::new(p, factor * p.t_delay()).unwrap();
            let closed = qsl::avg_energy_variance(&inputs);
            let numeric = quadrature_average(&inputs);
            assert!(
                ((closed - numeric) / numeric).abs() < 1e-8,
                "alpha={alpha} factor={factor}: {closed} vs {numeric}"
            );
        }
    }
}

#[test]
fn instantaneous_spread_matches_hamiltonian() {
    let p = ModelParams::from_alpha(1000, 0.7, 2.0).unwrap();
    for i in 0..50 {
        let t = i as f64 * 0.05 * p.t_delay();
        let h = meanfield::nonlinear_hamiltonian(t, &p);
        let s = meanfield::single_atom_state(t, &p);
        let var = (h.expectation_sqr(&s) - h.expectation(&s).powi(2))
            .max(0.0)
            .sqrt();
        assert!((var - qsl::instantaneous_variance(t, &p)).abs() < 1e-12);
    }
}

#[test]
fn bures_angle_matches_state_overlap() {
    for alpha in [0.05, 1.0, 20.0] {
        let p = ModelParams::from_alpha(N, alpha, 1.0).unwrap();
        for factor in [0.1, 0.9, 1.0, 1.3, 3.0] {
            let tau = factor * p.t_delay();
            let overlap = meanfield::single_atom_state(0.0, &p)
                .inner(&meanfield::single_atom_state(tau, &p))
                .norm()
                .min(1.0);
            let l = qsl::bures_angle(&QslInputs::new(p, tau).unwrap()).unwrap();
            assert!(
                (l - overlap.acos()).abs() < 1e-7,
                "alpha={alpha} factor={factor}"
            );
        }
    }
}

#[test]
fn ratio_rises_with_alpha_past_delay() {
    let alphas = [0.1, 1.0, 10.0, 100.0];
    for x in [0.5, 1.0, 3.0] {
        let ratios: Vec<f64> = alphas
            .iter()
            .map(|&a| {
                let p = ModelParams::from_alpha(N, a, 1.0).unwrap();
                let tau = p.time_from_scaled(x);
                assert!(tau > p.t_delay());
                qsl::qsl_time(&QslInputs::new(p, tau).unwrap())
                    .unwrap()
                    .ratio
            })
            .collect();
        assert!(ratios.windows(2).all(|w| w[1] > w[0]), "x={x}: {ratios:?}");
        assert!(ratios[3] > 0.99);
    }
}

#[test]
fn ratio_decreases_with_final_coherence() {
    for x in [-0.5, 0.5, 1.0, 2.0] {
        let mut points: Vec<(f64, f64)> = (0..200)
            .map(|i| 10f64.powf(-2.0 + 4.0 * i as f64 / 199.0))
            .filter_map(|alpha| {
                let p = ModelParams::from_alpha(N, alpha, 1.0).unwrap();
                let tau = p.time_from_scaled(x);
                (tau > 0.0).then(|| {
                    let inputs = QslInputs::new(p, tau).unwrap();
                    let (_, c_tau, _) = inputs.coherence_endpoints();
                    (c_tau, qsl::qsl_time(&inputs).unwrap().ratio)
                })
            })
            .collect();
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        points.dedup_by(|a, b| a.0 == b.0);
        assert!(points.len() > 50);
        for w in points.windows(2) {
            assert!(w[1].1 < w[0].1, "x={x}: {:?} then {:?}", w[0], w[1]);
        }
    }
}

#[test]
fn underdamped_ratio_is_small() {
    let p = ModelParams::from_alpha(N, 0.01, 1.0).unwrap();
    let r = qsl::qsl_time(&QslInputs::new(p, p.time_from_scaled(3.0)).unwrap()).unwrap();
    assert!(r.ratio < 0.05);
}

#[test]
fn ratio_continuous_through_delay() {
    let p = ModelParams::from_alpha(N, 2.0, 1.0).unwrap();
    let at = qsl::qsl_time(&QslInputs::new(p, p.t_delay()).unwrap())
        .unwrap()
        .ratio;
    for k in 1..8 {
        let eps = 10f64.powi(-k) / p.collective_rate();
        for tau in [p.t_delay() - eps, p.t_delay() + eps] {
            let inputs = QslInputs::new(p, tau).unwrap();
            let r = qsl::ratio_via_coherence(&inputs).unwrap();
            assert!((r - at).abs() < 2.0 * eps * p.collective_rate());
        }
    }
}
