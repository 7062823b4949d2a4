//! Quantum speed limit of the effective single-atom evolution.
//!
//! The mean-field qubit evolves unitarily under the time-dependent
//! Hamiltonian `H_t`, so the bound `τ ≥ τ_QSL = L(ψ_0, ψ_τ) / ΔĒ_τ` applies,
//! with `L` the Bures angle between the endpoint states and `ΔĒ_τ` the time
//! average of the energy spread.
//!
//! Both closed forms are arccosines of expressions that approach ±1 for
//! short evolutions. They are evaluated through the Bloch polar angle
//! `θ_t = 2 atan(sqrt(p_t / (1 − p_t)))`, for which
//! `(1 − 2p_τ)(1 − 2p_0) + 4 sqrt(p_0 p_τ (1 − p_0)(1 − p_τ)) = cos(θ_0 − θ_τ)`,
//! so the gap `θ_0 − θ_τ` can be formed without cancellation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::meanfield::{l1_coherence, populations, ModelParams};
use crate::numeric::{half_arccos, sech};

/// Largest excursion of an arccos argument outside `[−1, 1]` that is clipped
/// instead of reported.
pub const ARCCOS_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QslInputs {
    pub params: ModelParams,
    pub tau: f64,
}

impl QslInputs {
    pub fn new(params: ModelParams, tau: f64) -> Result<Self> {
        if !(tau.is_finite() && tau > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "evolution time tau must be finite and positive, got {tau}"
            )));
        }
        Ok(Self { params, tau })
    }

    /// Single-atom coherences at both endpoints and `sgn(τ − t_D)`.
    pub fn coherence_endpoints(&self) -> (f64, f64, Sign) {
        (
            l1_coherence(0.0, &self.params),
            l1_coherence(self.tau, &self.params),
            Sign::of(self.tau - self.params.t_delay()),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QslReport {
    pub bures_angle: f64,
    pub avg_variance: f64,
    pub qsl_time: f64,
    pub ratio: f64,
}

/// `sgn(τ − t_D)`, with zero mapped to `Plus`. The sign multiplies
/// `sqrt(1 − C(ρ_τ)²)`, which vanishes at `τ = t_D`, so the choice there is
/// immaterial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn of(value: f64) -> Self {
        if value < 0.0 {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// `θ_0 − θ_τ ≥ 0`, the Bloch polar-angle swept between the endpoints.
fn polar_gap(inputs: &QslInputs) -> f64 {
    let params = &inputs.params;
    let rate = params.collective_rate();
    // tan(θ/2) = exp(−x/2) with x = Nγ0 (t − t_D)
    let a = (-0.5 * params.burst_phase(0.0)).exp();
    let b = (-0.5 * params.burst_phase(inputs.tau)).exp();
    let diff = -a * (-0.5 * rate * inputs.tau).exp_m1();
    2.0 * diff.atan2(1.0 + a * b)
}

/// `sqrt(1 + α^{-2})`.
fn variance_prefactor(params: &ModelParams) -> f64 {
    1f64.hypot(1.0 / params.alpha())
}

/// Bures angle `arccos|⟨ψ_0|ψ_τ⟩|`, equal to
/// `½ arccos[(1 − 2p_τ)(1 − 2p_0) + 4 sqrt(p_0 p_τ (1 − p_0)(1 − p_τ)) cos(ωτ)]`.
pub fn bures_angle(inputs: &QslInputs) -> Result<f64> {
    let params = &inputs.params;
    let gap = polar_gap(inputs);
    // sin θ_0 sin θ_τ = C(ρ_0) C(ρ_τ)
    let sines = sech(0.5 * params.burst_phase(0.0)) * sech(0.5 * params.burst_phase(inputs.tau));
    bures_from_gap(gap, sines, params.omega() * inputs.tau)
}

fn bures_from_gap(gap: f64, sines: f64, phase: f64) -> Result<f64> {
    let half_gap = 0.5 * gap;
    let twist = sines * (0.5 * phase).sin().powi(2);
    let sin_sq = half_gap.sin().powi(2) + twist;
    let cos_sq = half_gap.cos().powi(2) - twist;
    half_arccos(sin_sq, cos_sq, 0.5 * ARCCOS_TOLERANCE).map_err(|arg| {
        Error::NumericalConsistency(format!("Bures-angle arccos argument {arg} outside [-1, 1]"))
    })
}

/// Energy spread `ΔE_t = sqrt(⟨H_t²⟩ − ⟨H_t⟩²)` along the mean-field path.
///
/// Simplifies to `ω sqrt(1 + α²) sqrt(p_t (1 − p_t))`.
pub fn instantaneous_variance(t: f64, params: &ModelParams) -> f64 {
    0.5 * params.omega() * 1f64.hypot(params.alpha()) * sech(0.5 * params.burst_phase(t))
}

/// Time average of [`instantaneous_variance`] over `[0, τ]`,
/// `(1/2τ) sqrt(1 + α^{-2}) arccos[(1 − 2p_τ)(1 − 2p_0) + 4 sqrt(p_0 p_τ (1 − p_0)(1 − p_τ))]`.
pub fn avg_energy_variance(inputs: &QslInputs) -> f64 {
    0.5 * variance_prefactor(&inputs.params) * polar_gap(inputs) / inputs.tau
}

pub fn qsl_time(inputs: &QslInputs) -> Result<QslReport> {
    let bures = bures_angle(inputs)?;
    let avg = avg_energy_variance(inputs);
    if !(avg.is_finite() && avg > 0.0) {
        return Err(Error::UndefinedBound(format!(
            "time-averaged energy spread is {avg} for tau = {}",
            inputs.tau
        )));
    }
    let qsl = bures / avg;
    Ok(QslReport {
        bures_angle: bures,
        avg_variance: avg,
        qsl_time: qsl,
        ratio: qsl / inputs.tau,
    })
}

/// `τ_QSL / τ` written in terms of the endpoint coherences:
///
/// ```text
///           ½ arccos(C_0 C_τ cos(ωτ) − s sqrt((1 − C_0²)(1 − C_τ²)))
/// ratio = ----------------------------------------------------------
///         ½ sqrt(1 + α^{-2}) arccos(C_0 C_τ − s sqrt((1 − C_0²)(1 − C_τ²)))
/// ```
///
/// with `s = sgn(τ − t_D)`. The denominator argument is `cos(acos C_0 + s acos C_τ)`,
/// which is how both arccosines are evaluated here.
pub fn qsl_ratio_from_coherence(
    c0: f64,
    c_tau: f64,
    sign: Sign,
    params: &ModelParams,
    tau: f64,
) -> Result<f64> {
    for (name, c) in [("c0", c0), ("c_tau", c_tau)] {
        if !(0.0..=1.0).contains(&c) {
            return Err(Error::InvalidParameter(format!(
                "{name} must lie in [0, 1], got {c}"
            )));
        }
    }
    if !(tau.is_finite() && tau > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "evolution time tau must be finite and positive, got {tau}"
        )));
    }
    let gap = match sign {
        Sign::Plus => c0.acos() + c_tau.acos(),
        Sign::Minus => asin_difference(c_tau, c0).abs(),
    };
    let numerator = bures_from_gap(gap, c0 * c_tau, params.omega() * tau)?;
    let denominator = 0.5 * variance_prefactor(params) * gap;
    if denominator.is_nan() || denominator <= 0.0 {
        return Err(Error::UndefinedBound(format!(
            "coherences c0 = {c0}, c_tau = {c_tau} give a zero path length"
        )));
    }
    Ok(numerator / denominator)
}

/// `asin(b) − asin(a)` for `a, b ∈ [0, 1]`, accurate when `a ≈ b`.
fn asin_difference(b: f64, a: f64) -> f64 {
    let cos_a = ((1.0 - a) * (1.0 + a)).sqrt();
    let cos_b = ((1.0 - b) * (1.0 + b)).sqrt();
    let den = b * cos_a + a * cos_b;
    if den == 0.0 {
        // a = b = 0
        return 0.0;
    }
    ((b - a) * (b + a) / den).atan2(cos_a * cos_b + a * b)
}

/// Runs [`qsl_ratio_from_coherence`] on the coherences implied by `inputs`.
pub fn ratio_via_coherence(inputs: &QslInputs) -> Result<f64> {
    let (c0, c_tau, sign) = inputs.coherence_endpoints();
    qsl_ratio_from_coherence(c0, c_tau, sign, &inputs.params, inputs.tau)
}

/// Excitation probabilities at both endpoints.
pub fn endpoint_populations(inputs: &QslInputs) -> (f64, f64) {
    (
        populations(0.0, &inputs.params).0,
        populations(inputs.tau, &inputs.params).0,
    )
}
