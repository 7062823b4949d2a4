//! Exact collective dynamics on the Dicke ladder.
//!
//! Integrates `dρ/dt = −iω[Jz, ρ] − (γ0/2)({J⁺J⁻, ρ} − 2 J⁻ρJ⁺)` on the
//! `N + 1` symmetric states `|J = N/2, m⟩`, indexed so that index 0 is
//! `m = +J` (all atoms excited) and index `N` is `m = −J`.
//!
//! `J⁻` couples index `i` to `i + 1` with coefficient `sqrt((N − i)(i + 1))`,
//! and `Jz`, `J⁺J⁻` are diagonal, so the Liouvillian acts entrywise:
//! `L(ρ)_ab = K_ab ρ_ab + S_ab ρ_(a−1)(b−1)`.
//!
//! Optional local noise is represented by a permutation-symmetric effective
//! model that stays on the ladder (exact local noise leaks into lower-`J`
//! blocks, which are not represented):
//!
//! * local decay: jump operator `Σ_k sqrt(k) |k−1⟩⟨k|` with `k` the number of
//!   excitations. Its `L†L` equals `Σ_j σ⁺_j σ⁻_j = N/2 + Jz`, so the
//!   population loss rate matches independent atoms exactly.
//! * local dephasing: jump operator `sqrt(2γφ) Jz`, damping `ρ_ab` at
//!   `γφ (m_a − m_b)²`, so the dipole elements (`|Δm| = 1`) decay at the
//!   single-atom coherence rate `γφ`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::meanfield::ModelParams;

/// Largest ensemble handled by the dense oracle.
pub const MAX_ATOMS: u64 = 512;
/// Upper bound on `N γ0 · step`.
pub const STABILITY_LIMIT: f64 = 0.1;
pub const TRACE_TOLERANCE: f64 = 1e-8;
pub const POSITIVITY_TOLERANCE: f64 = 1e-8;
/// Largest relative change of any recorded observable under step halving.
pub const CONVERGENCE_TOLERANCE: f64 = 1e-6;
pub const DEFAULT_RECORD_EVERY: usize = 10;
/// Default step is this fraction of `1 / (γ0 max⟨J⁺J⁻⟩)`, the fastest
/// population decay on the ladder.
const DEFAULT_STEP_FRACTION: f64 = 0.02;
/// ... and at most this fraction of `1 / (ω N)`, the fastest coherence rotation.
const DEFAULT_PHASE_FRACTION: f64 = 0.005;
const POSITIVITY_CHECKPOINTS: usize = 8;

/// `⟨j, m−1|J⁻|j, m⟩ = sqrt(j(j+1) − m(m−1))`.
pub fn lowering_coefficient(j: f64, m: f64) -> Result<f64> {
    if !(j.is_finite() && m.is_finite()) || j < 0.0 || m.abs() > j + 1e-12 {
        return Err(Error::InvalidParameter(format!(
            "need |m| <= j, got j = {j}, m = {m}"
        )));
    }
    // (j + m)(j − m + 1) is the same product without cancellation
    Ok(((j + m) * (j - m + 1.0)).max(0.0).sqrt())
}

/// Per-index ladder data for `N` atoms.
#[derive(Debug, Clone)]
struct Ladder {
    /// `m` at each index.
    m: Vec<f64>,
    /// `J⁻` coefficient from index `i` to `i + 1` (zero at the bottom).
    lowering: Vec<f64>,
    /// `J⁺J⁻` eigenvalue at each index.
    jpjm: Vec<f64>,
    /// Excitation number `k = N − i`.
    excitations: Vec<f64>,
}

impl Ladder {
    fn new(n_atoms: u64) -> Self {
        let n = n_atoms as usize;
        let half = 0.5 * n_atoms as f64;
        let m = (0..=n).map(|i| half - i as f64).collect();
        let jpjm: Vec<f64> = (0..=n).map(|i| ((n - i) * (i + 1)) as f64).collect();
        let lowering = jpjm.iter().map(|d| d.sqrt()).collect();
        let excitations = (0..=n).map(|i| (n - i) as f64).collect();
        Self {
            m,
            lowering,
            jpjm,
            excitations,
        }
    }

    fn max_jpjm(&self) -> f64 {
        self.jpjm.iter().copied().fold(0.0, f64::max)
    }
}

/// Density matrix on the Dicke ladder, index 0 = fully excited.
#[derive(Debug, Clone, PartialEq)]
pub struct DickeDensityMatrix {
    n_atoms: u64,
    entries: DMatrix<Complex64>,
}

impl DickeDensityMatrix {
    pub fn from_entries(n_atoms: u64, entries: DMatrix<Complex64>) -> Result<Self> {
        let dim = n_atoms as usize + 1;
        if n_atoms == 0 || entries.nrows() != dim || entries.ncols() != dim {
            return Err(Error::InvalidParameter(format!(
                "expected a {dim}x{dim} matrix for {n_atoms} atoms, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        Ok(Self { n_atoms, entries })
    }

    /// All atoms in `|g⟩`: the bottom rung `m = −J`.
    pub fn ground(n_atoms: u64) -> Self {
        let dim = n_atoms as usize + 1;
        let mut entries = DMatrix::zeros(dim, dim);
        entries[(dim - 1, dim - 1)] = Complex64::new(1.0, 0.0);
        Self { n_atoms, entries }
    }

    pub fn n_atoms(&self) -> u64 {
        self.n_atoms
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn trace(&self) -> Complex64 {
        self.entries.trace()
    }

    pub fn hermiticity_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        let n = self.dim();
        for b in 0..n {
            for a in b..n {
                worst = worst.max((self.entries[(a, b)] - self.entries[(b, a)].conj()).norm());
            }
        }
        worst
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        let herm = (&self.entries + self.entries.adjoint()) * Complex64::new(0.5, 0.0);
        herm.symmetric_eigenvalues().min()
    }

    pub fn observables(&self, time: f64) -> CollectiveObservables {
        observables_from_slice(&Ladder::new(self.n_atoms), self.entries.as_slice(), time)
    }
}

/// Expectation values of the collective spin at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollectiveObservables {
    pub time: f64,
    pub jz_mean: f64,
    pub jplus_mean: Complex64,
    /// `⟨J⁺J⁻⟩`.
    pub jpjm_mean: f64,
}

fn observables_from_slice(ladder: &Ladder, rho: &[Complex64], time: f64) -> CollectiveObservables {
    let n = ladder.m.len();
    let mut jz = 0.0;
    let mut jpjm = 0.0;
    let mut jplus = Complex64::new(0.0, 0.0);
    for i in 0..n {
        let pop = rho[i * n + i].re;
        jz += ladder.m[i] * pop;
        jpjm += ladder.jpjm[i] * pop;
        if i + 1 < n {
            // ⟨J⁺⟩ = Σ_i c_i ρ_(i+1, i)
            jplus += rho[i * n + i + 1] * ladder.lowering[i];
        }
    }
    CollectiveObservables {
        time,
        jz_mean: jz,
        jplus_mean: jplus,
        jpjm_mean: jpjm,
    }
}

/// Emitted power `ω γ0 ⟨J⁺J⁻⟩`, i.e. `−ω d⟨Jz⟩/dt` under collective decay.
pub fn intensity_exact(obs: &CollectiveObservables, params: &ModelParams) -> f64 {
    params.omega() * params.gamma0() * obs.jpjm_mean
}

/// Product state `(sqrt(1 − p0)|g⟩ + sqrt(p0) e^{iφ}|e⟩)^{⊗N}` on the ladder.
///
/// The amplitude of the rung with `k` excitations is
/// `sqrt(C(N, k)) (sqrt(p0) e^{iφ})^k sqrt(1 − p0)^{N−k}`.
pub fn spin_coherent_state(n_atoms: u64, p0: f64, phase: f64) -> Result<DickeDensityMatrix> {
    if n_atoms == 0 {
        return Err(Error::InvalidParameter("n_atoms must be at least 1".into()));
    }
    if !(0.0..=1.0).contains(&p0) {
        return Err(Error::InvalidParameter(format!(
            "excitation probability must lie in [0, 1], got {p0}"
        )));
    }
    let n = n_atoms as usize;
    let ln_p = p0.ln();
    let ln_q = (1.0 - p0).ln();
    let mut ln_binom = 0.0;
    let mut by_k = Vec::with_capacity(n + 1);
    for k in 0..=n {
        if k > 0 {
            ln_binom += ((n - k + 1) as f64 / k as f64).ln();
        }
        let mut ln_mag = 0.5 * ln_binom;
        if k > 0 {
            ln_mag += 0.5 * k as f64 * ln_p;
        }
        if k < n {
            ln_mag += 0.5 * (n - k) as f64 * ln_q;
        }
        by_k.push(Complex64::from_polar(ln_mag.exp(), k as f64 * phase));
    }
    // index i holds k = N − i excitations
    let amps = nalgebra::DVector::from_iterator(n + 1, by_k.into_iter().rev());
    Ok(DickeDensityMatrix {
        n_atoms,
        entries: &amps * amps.adjoint(),
    })
}

/// Starting point of an oracle run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialState {
    /// The mean-field product state at `t = 0`, `p0 = N / (N + 1)`.
    MeanField,
    Coherent {
        p0: f64,
        phase: f64,
    },
}

impl InitialState {
    pub fn excitation(&self, params: &ModelParams) -> f64 {
        match *self {
            InitialState::MeanField => {
                let n = params.n_atoms() as f64;
                n / (n + 1.0)
            }
            InitialState::Coherent { p0, .. } => p0,
        }
    }

    pub fn phase(&self) -> f64 {
        match *self {
            InitialState::MeanField => 0.0,
            InitialState::Coherent { phase, .. } => phase,
        }
    }

    pub fn build(&self, params: &ModelParams) -> Result<DickeDensityMatrix> {
        spin_coherent_state(params.n_atoms(), self.excitation(params), self.phase())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    pub params: ModelParams,
    pub t_end: f64,
    pub step: f64,
    pub local_decay_rate: f64,
    pub local_dephasing_rate: f64,
    /// Observables are recorded every this many steps (and at the end).
    pub record_every: usize,
    pub initial: InitialState,
}

impl OracleConfig {
    /// Collective decay only, default step and decimation, mean-field start.
    pub fn new(params: ModelParams, t_end: f64) -> Self {
        Self {
            params,
            t_end,
            step: default_step(&params),
            local_decay_rate: 0.0,
            local_dephasing_rate: 0.0,
            record_every: DEFAULT_RECORD_EVERY,
            initial: InitialState::MeanField,
        }
    }

    /// Run window `[0, 2 t_D + 10 / (N γ0)]`, covering the whole burst.
    pub fn with_default_window(params: ModelParams) -> Self {
        Self::new(params, default_window(&params))
    }

    pub fn with_step(mut self, step: f64) -> Self {
        self.step = step;
        self
    }

    pub fn with_local_decay(mut self, rate: f64) -> Self {
        self.local_decay_rate = rate;
        self
    }

    pub fn with_local_dephasing(mut self, rate: f64) -> Self {
        self.local_dephasing_rate = rate;
        self
    }

    pub fn with_record_every(mut self, every: usize) -> Self {
        self.record_every = every;
        self
    }

    pub fn with_initial(mut self, initial: InitialState) -> Self {
        self.initial = initial;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.params.n_atoms();
        if n > MAX_ATOMS {
            return Err(Error::InvalidParameter(format!(
                "the dense oracle supports at most {MAX_ATOMS} atoms, got {n}"
            )));
        }
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "t_end must be finite and positive, got {}",
                self.t_end
            )));
        }
        if !(self.step.is_finite() && self.step > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "step must be finite and positive, got {}",
                self.step
            )));
        }
        for (name, rate) in [
            ("local decay rate", self.local_decay_rate),
            ("local dephasing rate", self.local_dephasing_rate),
        ] {
            if !(rate.is_finite() && rate >= 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be finite and non-negative, got {rate}"
                )));
            }
        }
        if self.record_every == 0 {
            return Err(Error::InvalidParameter(
                "record_every must be at least 1".into(),
            ));
        }
        let stiffness = self.params.collective_rate() * self.step;
        if stiffness > STABILITY_LIMIT {
            return Err(Error::StepRejected(format!(
                "N*gamma0*step = {stiffness} exceeds {STABILITY_LIMIT}"
            )));
        }
        Ok(())
    }

    /// Number of steps the run takes; the step is shrunk to land on `t_end`.
    pub fn step_count(&self) -> usize {
        // guard against t_end / step landing a rounding error above an integer
        ((self.t_end / self.step) * (1.0 - 1e-12)).ceil().max(1.0) as usize
    }

    /// Same run with exactly twice the steps and twice the decimation, so
    /// samples land on the same times.
    pub fn halved(&self) -> Self {
        Self {
            step: self.t_end / (2 * self.step_count()) as f64,
            record_every: 2 * self.record_every,
            ..*self
        }
    }
}

pub fn default_step(params: &ModelParams) -> f64 {
    let n = params.n_atoms().min(MAX_ATOMS);
    let decay = params.gamma0() * Ladder::new(n).max_jpjm();
    let rotation = params.omega() * n as f64;
    (DEFAULT_STEP_FRACTION / decay).min(DEFAULT_PHASE_FRACTION / rotation)
}

pub fn default_window(params: &ModelParams) -> f64 {
    2.0 * params.t_delay() + 10.0 / params.collective_rate()
}

/// Entrywise Liouvillian `L(ρ)_ab = K_ab ρ_ab + S_ab ρ_(a−1)(b−1)`, column-major.
#[derive(Debug, Clone)]
pub struct Liouvillian {
    dim: usize,
    diagonal: Vec<Complex64>,
    shift: Vec<f64>,
}

impl Liouvillian {
    pub fn new(config: &OracleConfig) -> Self {
        let params = &config.params;
        let ladder = Ladder::new(params.n_atoms());
        let dim = ladder.m.len();
        let (omega, gamma) = (params.omega(), params.gamma0());
        let (decay, dephase) = (config.local_decay_rate, config.local_dephasing_rate);

        let mut diagonal = vec![Complex64::new(0.0, 0.0); dim * dim];
        let mut shift = vec![0.0; dim * dim];
        for b in 0..dim {
            for a in 0..dim {
                let dm = ladder.m[a] - ladder.m[b];
                let re = -0.5 * gamma * (ladder.jpjm[a] + ladder.jpjm[b])
                    - 0.5 * decay * (ladder.excitations[a] + ladder.excitations[b])
                    - dephase * dm * dm;
                diagonal[b * dim + a] = Complex64::new(re, -omega * dm);
                if a > 0 && b > 0 {
                    let collective = ladder.lowering[a - 1] * ladder.lowering[b - 1];
                    let local = (ladder.excitations[a - 1] * ladder.excitations[b - 1]).sqrt();
                    shift[b * dim + a] = gamma * collective + decay * local;
                }
            }
        }
        Self {
            dim,
            diagonal,
            shift,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Writes `L(rho)` into `out`; both are column-major `dim × dim`.
    pub fn apply(&self, rho: &[Complex64], out: &mut [Complex64]) {
        let n = self.dim;
        // first column has no (a−1, b−1) source
        for a in 0..n {
            out[a] = self.diagonal[a] * rho[a];
        }
        for b in 1..n {
            let col = b * n;
            out[col] = self.diagonal[col] * rho[col];
            for idx in col + 1..col + n {
                out[idx] = self.diagonal[idx] * rho[idx] + rho[idx - n - 1] * self.shift[idx];
            }
        }
    }
}

/// Time derivative of `rho` under the configured Liouvillian.
pub fn liouvillian_apply(rho: &DickeDensityMatrix, config: &OracleConfig) -> DMatrix<Complex64> {
    let l = Liouvillian::new(config);
    let mut out = DMatrix::zeros(rho.dim(), rho.dim());
    l.apply(rho.entries.as_slice(), out.as_mut_slice());
    out
}

/// Recorded observables of one run plus the state it ended in.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub samples: Vec<CollectiveObservables>,
    pub final_state: DickeDensityMatrix,
    /// Step actually used (the configured step shrunk to land on `t_end`).
    pub step: f64,
    pub steps: usize,
    pub max_trace_error: f64,
    pub min_eigenvalue: f64,
}

impl Trajectory {
    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.time)
    }
}

pub fn evolve(config: &OracleConfig) -> Result<Trajectory> {
    config.validate()?;
    let initial = config.initial.build(&config.params)?;
    evolve_from(config, initial)
}

/// Classical fixed-step RK4 from an explicit initial state.
pub fn evolve_from(config: &OracleConfig, initial: DickeDensityMatrix) -> Result<Trajectory> {
    config.validate()?;
    if initial.n_atoms() != config.params.n_atoms() {
        return Err(Error::InvalidParameter(format!(
            "initial state has {} atoms, configuration has {}",
            initial.n_atoms(),
            config.params.n_atoms()
        )));
    }
    let ladder = Ladder::new(config.params.n_atoms());
    let liouvillian = Liouvillian::new(config);
    let dim = liouvillian.dim();
    let len = dim * dim;

    let steps = config.step_count();
    let h = config.t_end / steps as f64;
    let checkpoint_every = steps.div_ceil(POSITIVITY_CHECKPOINTS).max(1);

    let mut rho: Vec<Complex64> = initial.entries.as_slice().to_vec();
    let zero = Complex64::new(0.0, 0.0);
    let mut k1 = vec![zero; len];
    let mut k2 = vec![zero; len];
    let mut k3 = vec![zero; len];
    let mut k4 = vec![zero; len];
    let mut stage = vec![zero; len];

    let mut samples = Vec::with_capacity(steps / config.record_every + 2);
    let mut max_trace_error: f64 = 0.0;
    let mut min_eigenvalue = f64::INFINITY;

    let record = |rho: &[Complex64], step: usize, samples: &mut Vec<_>| -> Result<f64> {
        let time = step as f64 * h;
        let trace: f64 = (0..dim).map(|i| rho[i * dim + i].re).sum();
        let err = (trace - 1.0).abs();
        if err > TRACE_TOLERANCE {
            return Err(Error::InvariantViolation(format!(
                "trace drifted to {trace} at t = {time}"
            )));
        }
        samples.push(observables_from_slice(&ladder, rho, time));
        Ok(err)
    };

    max_trace_error = max_trace_error.max(record(&rho, 0, &mut samples)?);
    let half = 0.5 * h;
    let sixth = h / 6.0;
    for step in 1..=steps {
        liouvillian.apply(&rho, &mut k1);
        for i in 0..len {
            stage[i] = rho[i] + k1[i] * half;
        }
        liouvillian.apply(&stage, &mut k2);
        for i in 0..len {
            stage[i] = rho[i] + k2[i] * half;
        }
        liouvillian.apply(&stage, &mut k3);
        for i in 0..len {
            stage[i] = rho[i] + k3[i] * h;
        }
        liouvillian.apply(&stage, &mut k4);
        for i in 0..len {
            rho[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * sixth;
        }

        if step % config.record_every == 0 || step == steps {
            max_trace_error = max_trace_error.max(record(&rho, step, &mut samples)?);
        }
        if step % checkpoint_every == 0 || step == steps {
            let state = DMatrix::from_column_slice(dim, dim, &rho);
            let herm = (&state + state.adjoint()) * Complex64::new(0.5, 0.0);
            min_eigenvalue = min_eigenvalue.min(herm.symmetric_eigenvalues().min());
        }
    }

    let final_state = DickeDensityMatrix {
        n_atoms: config.params.n_atoms(),
        entries: DMatrix::from_column_slice(dim, dim, &rho),
    };
    if min_eigenvalue < -POSITIVITY_TOLERANCE {
        return Err(Error::InvariantViolation(format!(
            "density matrix lost positivity, smallest eigenvalue {min_eigenvalue}"
        )));
    }
    Ok(Trajectory {
        samples,
        final_state,
        step: h,
        steps,
        max_trace_error,
        min_eigenvalue,
    })
}

/// Largest change between two runs sampled at the same times, per observable
/// relative to that observable's largest magnitude over the coarse run.
///
/// Magnitudes are floored at `1e-12 N` so identically vanishing observables
/// (such as `⟨J⁺⟩` from a Dicke state) do not divide by zero.
pub fn relative_change(coarse: &Trajectory, fine: &Trajectory) -> Result<f64> {
    if coarse.samples.len() != fine.samples.len() {
        return Err(Error::ConvergenceFailure(format!(
            "sample counts differ: {} vs {}",
            coarse.samples.len(),
            fine.samples.len()
        )));
    }
    let floor = 1e-12 * coarse.final_state.n_atoms() as f64;
    let scale = |f: &dyn Fn(&CollectiveObservables) -> f64| {
        coarse.samples.iter().map(f).fold(floor, f64::max)
    };
    let jz_scale = scale(&|s| s.jz_mean.abs());
    let jp_scale = scale(&|s| s.jplus_mean.norm());
    let jj_scale = scale(&|s| s.jpjm_mean.abs());
    let mut worst: f64 = 0.0;
    for (a, b) in coarse.samples.iter().zip(&fine.samples) {
        if (a.time - b.time).abs() > 1e-9 * a.time.abs().max(1.0) {
            return Err(Error::ConvergenceFailure(format!(
                "sample times differ: {} vs {}",
                a.time, b.time
            )));
        }
        worst = worst
            .max((a.jz_mean - b.jz_mean).abs() / jz_scale)
            .max((a.jplus_mean - b.jplus_mean).norm() / jp_scale)
            .max((a.jpjm_mean - b.jpjm_mean).abs() / jj_scale);
    }
    Ok(worst)
}

/// Outcome of running a configuration at its step and at half the step.
#[derive(Debug, Clone)]
pub struct GatedRun {
    pub trajectory: Trajectory,
    pub relative_change: f64,
}

/// Runs `config` and its step-halved copy; fails unless every recorded
/// observable changes by less than [`CONVERGENCE_TOLERANCE`].
pub fn evolve_gated(config: &OracleConfig) -> Result<GatedRun> {
    let coarse = evolve(config)?;
    let fine = evolve(&config.halved())?;
    let change = relative_change(&coarse, &fine)?;
    if change.is_nan() || change >= CONVERGENCE_TOLERANCE {
        return Err(Error::ConvergenceFailure(format!(
            "halving the step changed observables by {change:.3e} (limit {CONVERGENCE_TOLERANCE:.0e})"
        )));
    }
    Ok(GatedRun {
        trajectory: coarse,
        relative_change: change,
    })
}
