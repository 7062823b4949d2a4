use proptest::prelude::*;
use srlab::dicke_oracle::{liouvillian_apply, spin_coherent_state, OracleConfig};
use srlab::meanfield::{self, ModelParams};
use srlab::qsl::{self, QslInputs, Sign};

fn params() -> impl Strategy<Value = ModelParams> {
    (1u64..2_000_000, -2.0f64..2.0, -1.0f64..1.0).prop_map(|(n, log_alpha, log_omega)| {
        ModelParams::from_alpha(n, 10f64.powf(log_alpha), 10f64.powf(log_omega)).unwrap()
    })
}

proptest! {
    #[test]
    fn coherence_and_intensity_agree(p in params(), x in -8.0f64..8.0) {
        let t = p.time_from_scaled(x);
        let c = meanfield::l1_coherence(t, &p);
        prop_assert!((0.0..=1.0).contains(&c));
        let ratio = meanfield::intensity(t, &p) / p.max_intensity();
        prop_assert!((c * c - ratio).abs() < 1e-12);
        let back = meanfield::coherence_from_intensity(meanfield::intensity(t, &p), p.max_intensity()).unwrap();
        prop_assert!((back - c).abs() < 1e-12);
    }

    #[test]
    fn single_atom_state_is_normalised(p in params(), x in -8.0f64..8.0) {
        let t = p.time_from_scaled(x);
        let (pe, pg) = meanfield::populations(t, &p);
        prop_assert!((pe + pg - 1.0).abs() < 1e-15);
        let s = meanfield::single_atom_state(t, &p);
        prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-14);
        let h = meanfield::nonlinear_hamiltonian(t, &p);
        prop_assert!(h.hermiticity_error() == 0.0);
    }

    #[test]
    fn coherence_symmetric_about_delay(p in params(), dx in 0.0f64..6.0) {
        let up = meanfield::l1_coherence(p.time_from_scaled(dx), &p);
        let down = meanfield::l1_coherence(p.time_from_scaled(-dx), &p);
        prop_assert!((up - down).abs() < 1e-12);
    }

    #[test]
    fn speed_limit_bounds_hold(p in params(), x in -5.0f64..5.0) {
        let tau = p.time_from_scaled(x);
        prop_assume!(tau > 0.0);
        let inputs = QslInputs::new(p, tau).unwrap();
        let r = qsl::qsl_time(&inputs).unwrap();
        prop_assert!(r.ratio <= 1.0 + 1e-10);
        prop_assert!(r.ratio >= 0.0);
        prop_assert!(r.bures_angle <= tau * r.avg_variance * (1.0 + 1e-10));
        let alt = qsl::ratio_via_coherence(&inputs).unwrap();
        prop_assert!((alt - r.ratio).abs() < 1e-10);
    }

    #[test]
    fn ratio_from_coherence_stays_bounded(
        p in params(),
        c0 in 0.0f64..=1.0,
        ct in 0.0f64..=1.0,
        minus in any::<bool>(),
        tau in 1e-3f64..10.0,
    ) {
        let sign = if minus { Sign::Minus } else { Sign::Plus };
        if let Ok(r) = qsl::qsl_ratio_from_coherence(c0, ct, sign, &p, tau) {
            prop_assert!(r.is_finite());
            prop_assert!(r >= -1e-12);
        }
    }

    #[test]
    fn n_particle_coherence_grows_with_n(c in 0.0f64..1.0, n in 1u64..200) {
        let a = meanfield::n_particle_coherence(c, n);
        let b = meanfield::n_particle_coherence(c, n + 1);
        prop_assert!(b >= a);
        prop_assert!(a >= 0.0);
        prop_assert!((meanfield::n_particle_coherence(c, 1) - c).abs() < 1e-15);
    }

    #[test]
    fn ladder_derivative_is_traceless_and_hermitian(
        n in 1u64..40,
        p0 in 0.0f64..=1.0,
        phase in -3.2f64..3.2,
        decay in 0.0f64..0.5,
        dephase in 0.0f64..0.5,
    ) {
        let params = ModelParams::new(n, 1.0, 1.3).unwrap();
        let config = OracleConfig::new(params, 1.0)
            .with_local_decay(decay)
            .with_local_dephasing(dephase);
        let rho = spin_coherent_state(n, p0, phase).unwrap();
        prop_assert!((rho.trace().re - 1.0).abs() < 1e-12);
        let d = liouvillian_apply(&rho, &config);
        prop_assert!(d.trace().norm() < 1e-11 * n as f64);
        let skew = (&d - d.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        prop_assert!(skew < 1e-11 * n as f64);
    }
}
