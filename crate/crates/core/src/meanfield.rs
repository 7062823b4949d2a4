//! Closed-form mean-field dynamics of a superradiant ensemble.
//!
//! Every atom of the ensemble is described by the same pure qubit state
//! `|ψ_t⟩ = sqrt(1 − p_t) e^{iωt/2} |g⟩ + sqrt(p_t) e^{−iωt/2} |e⟩`, where the
//! excitation probability `p_t` is a logistic function centred on the
//! superradiant delay `t_D = ln(N) / (γ0 N)`.
//!
//! Matrices use the reference basis `(|e⟩, |g⟩)`: index 0 is the excited
//! level, index 1 the ground level. Units have `ħ = 1`; `ω` and `γ0` are free
//! rates and intensities are energy rates, `I = −N ω dp/dt`.
//!
//! The mean-field picture is only accurate for `N ≫ 1`. The formulas are
//! nevertheless evaluated for any `N ≥ 1` (for `N = 1` the delay is zero).

use nalgebra::Matrix2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{logistic_pair, sech};

/// Relative slack allowed when a measured intensity exceeds its maximum.
pub const INTENSITY_TOLERANCE: f64 = 1e-12;

/// Number of atoms, single-atom decay rate and transition frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    n_atoms: u64,
    gamma0: f64,
    omega: f64,
}

impl ModelParams {
    pub fn new(n_atoms: u64, gamma0: f64, omega: f64) -> Result<Self> {
        if n_atoms == 0 {
            return Err(Error::InvalidParameter("n_atoms must be at least 1".into()));
        }
        if !(gamma0.is_finite() && gamma0 > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "gamma0 must be finite and positive, got {gamma0}"
            )));
        }
        if !(omega.is_finite() && omega > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "omega must be finite and positive, got {omega}"
            )));
        }
        Ok(Self {
            n_atoms,
            gamma0,
            omega,
        })
    }

    /// Builds parameters from the damping ratio `α = N γ0 / (2ω)`.
    pub fn from_alpha(n_atoms: u64, alpha: f64, omega: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "alpha must be finite and positive, got {alpha}"
            )));
        }
        let gamma0 = 2.0 * alpha * omega / n_atoms.max(1) as f64;
        Self::new(n_atoms, gamma0, omega)
    }

    pub fn n_atoms(&self) -> u64 {
        self.n_atoms
    }

    pub fn gamma0(&self) -> f64 {
        self.gamma0
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// `N γ0`, the rate of the collective burst.
    pub fn collective_rate(&self) -> f64 {
        self.n_atoms as f64 * self.gamma0
    }

    /// Damping ratio `α = N γ0 / (2ω)`. Values `≳ 1` are overdamped.
    pub fn alpha(&self) -> f64 {
        self.collective_rate() / (2.0 * self.omega)
    }

    /// Superradiant delay `ln(N) / (γ0 N)`; exactly zero for a single atom.
    pub fn t_delay(&self) -> f64 {
        (self.n_atoms as f64).ln() / self.collective_rate()
    }

    /// Peak intensity `N² ω γ0 / 4`, reached at `t = t_D`.
    pub fn max_intensity(&self) -> f64 {
        let n = self.n_atoms as f64;
        n * n * self.omega * self.gamma0 / 4.0
    }

    /// Dimensionless time `ω (t − t_D)` used on plot axes.
    pub fn scaled_time(&self, t: f64) -> f64 {
        self.omega * (t - self.t_delay())
    }

    /// Inverse of [`ModelParams::scaled_time`].
    pub fn time_from_scaled(&self, x: f64) -> f64 {
        self.t_delay() + x / self.omega
    }

    /// `N γ0 (t − t_D)`, the argument of the logistic population.
    pub(crate) fn burst_phase(&self, t: f64) -> f64 {
        self.collective_rate() * (t - self.t_delay())
    }
}

/// Pure single-atom state as (ground, excited) amplitudes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitPureState {
    pub amp_ground: Complex64,
    pub amp_excited: Complex64,
}

impl QubitPureState {
    pub fn norm_sqr(&self) -> f64 {
        self.amp_ground.norm_sqr() + self.amp_excited.norm_sqr()
    }

    /// Column vector in the `(|e⟩, |g⟩)` basis.
    pub fn to_vector(&self) -> nalgebra::Vector2<Complex64> {
        nalgebra::Vector2::new(self.amp_excited, self.amp_ground)
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &QubitPureState) -> Complex64 {
        self.amp_excited.conj() * other.amp_excited + self.amp_ground.conj() * other.amp_ground
    }

    pub fn density(&self) -> QubitDensityMatrix {
        let v = self.to_vector();
        QubitDensityMatrix {
            entries: v * v.adjoint(),
        }
    }
}

/// 2×2 density matrix in the `(|e⟩, |g⟩)` basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitDensityMatrix {
    pub entries: Matrix2<Complex64>,
}

impl QubitDensityMatrix {
    pub fn trace(&self) -> Complex64 {
        self.entries.trace()
    }

    pub fn purity(&self) -> f64 {
        (self.entries * self.entries).trace().re
    }

    /// Sum of the magnitudes of the off-diagonal entries.
    pub fn l1_coherence(&self) -> f64 {
        self.entries[(0, 1)].norm() + self.entries[(1, 0)].norm()
    }

    pub fn excited_population(&self) -> f64 {
        self.entries[(0, 0)].re
    }
}

/// Single-atom Hamiltonian in the `(|e⟩, |g⟩)` basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HamiltonianMatrix {
    pub entries: Matrix2<Complex64>,
}

impl HamiltonianMatrix {
    pub fn apply(&self, state: &QubitPureState) -> nalgebra::Vector2<Complex64> {
        self.entries * state.to_vector()
    }

    /// `⟨ψ|H|ψ⟩`.
    pub fn expectation(&self, state: &QubitPureState) -> f64 {
        let v = state.to_vector();
        (v.adjoint() * self.entries * v)[(0, 0)].re
    }

    /// `⟨ψ|H²|ψ⟩`.
    pub fn expectation_sqr(&self, state: &QubitPureState) -> f64 {
        let hv = self.apply(state);
        hv.norm_squared()
    }

    pub fn hermiticity_error(&self) -> f64 {
        (self.entries - self.entries.adjoint()).camax()
    }
}

pub fn time_delay(params: &ModelParams) -> f64 {
    params.t_delay()
}

/// Excited-state probability `p_t = 1 / (exp(N γ0 (t − t_D)) + 1)`.
pub fn excitation_probability(t: f64, params: &ModelParams) -> f64 {
    logistic_pair(params.burst_phase(t)).0
}

/// `(p_t, 1 − p_t)`, each evaluated without cancellation.
pub fn populations(t: f64, params: &ModelParams) -> (f64, f64) {
    logistic_pair(params.burst_phase(t))
}

pub fn single_atom_state(t: f64, params: &ModelParams) -> QubitPureState {
    let (p, q) = populations(t, params);
    let half_phase = 0.5 * params.omega() * t;
    QubitPureState {
        amp_ground: Complex64::from_polar(q.sqrt(), half_phase),
        amp_excited: Complex64::from_polar(p.sqrt(), -half_phase),
    }
}

pub fn single_atom_density(t: f64, params: &ModelParams) -> QubitDensityMatrix {
    let (p, q) = populations(t, params);
    let off = Complex64::from_polar(0.5 * half_sech(t, params), -params.omega() * t);
    QubitDensityMatrix {
        entries: Matrix2::new(
            Complex64::new(p, 0.0),
            off,
            off.conj(),
            Complex64::new(q, 0.0),
        ),
    }
}

/// `H_t = (ω/2) σz − i (N γ0 / 2) sqrt(p_t (1 − p_t)) (σ₊ e^{−iωt} − σ₋ e^{iωt})`.
pub fn nonlinear_hamiltonian(t: f64, params: &ModelParams) -> HamiltonianMatrix {
    let half_omega = 0.5 * params.omega();
    // (Nγ0/2)·sqrt(p(1−p)), with sqrt(p(1−p)) = sech/2
    let drive = 0.25 * params.collective_rate() * half_sech(t, params);
    let upper = Complex64::new(0.0, -drive) * Complex64::from_polar(1.0, -params.omega() * t);
    HamiltonianMatrix {
        entries: Matrix2::new(
            Complex64::new(half_omega, 0.0),
            upper,
            upper.conj(),
            Complex64::new(-half_omega, 0.0),
        ),
    }
}

/// Radiated power `(N² ω γ0 / 4) sech²((N γ0 / 2)(t − t_D))`.
pub fn intensity(t: f64, params: &ModelParams) -> f64 {
    let s = half_sech(t, params);
    params.max_intensity() * s * s
}

/// l1-norm of coherence of the single-atom state, `sech((N γ0 / 2)(t − t_D))`.
pub fn l1_coherence(t: f64, params: &ModelParams) -> f64 {
    half_sech(t, params)
}

/// Single-atom coherence inferred from a measured intensity, `sqrt(I / I_max)`.
pub fn coherence_from_intensity(i_now: f64, i_max: f64) -> Result<f64> {
    if !(i_max.is_finite() && i_max > 0.0) {
        return Err(Error::InvalidMeasurement(format!(
            "maximum intensity must be positive, got {i_max}"
        )));
    }
    if !i_now.is_finite() {
        return Err(Error::InvalidMeasurement(format!(
            "intensity must be finite, got {i_now}"
        )));
    }
    let ratio = i_now / i_max;
    if !(-INTENSITY_TOLERANCE..=1.0 + INTENSITY_TOLERANCE).contains(&ratio) {
        return Err(Error::InvalidMeasurement(format!(
            "intensity {i_now} outside [0, {i_max}]"
        )));
    }
    Ok(ratio.clamp(0.0, 1.0).sqrt())
}

/// Coherence of the product state `ρ^{⊗N}` given the single-atom value,
/// `(1 + c)^N − 1`. Evaluated as `expm1(N ln1p(c))` so small `c` keeps its
/// precision.
pub fn n_particle_coherence(c_single: f64, n_atoms: u64) -> f64 {
    (n_atoms as f64 * c_single.ln_1p()).exp_m1()
}

fn half_sech(t: f64, params: &ModelParams) -> f64 {
    sech(0.5 * params.burst_phase(t))
}
