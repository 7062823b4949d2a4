use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::output::Table;
use crate::error::{Error, Result};
use crate::meanfield::{self, ModelParams};
use crate::qsl::{self, QslInputs};

/// Largest tolerated gap between the two QSL ratio evaluations.
pub const RATIO_AGREEMENT: f64 = 1e-10;

/// Evenly spaced (or log-spaced) sample points with exact endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisRange {
    pub start: f64,
    pub end: f64,
    pub count: usize,
    pub log: bool,
}

impl AxisRange {
    pub fn linear(start: f64, end: f64, count: usize) -> Result<Self> {
        Self {
            start,
            end,
            count,
            log: false,
        }
        .validated()
    }

    pub fn log(start: f64, end: f64, count: usize) -> Result<Self> {
        Self {
            start,
            end,
            count,
            log: true,
        }
        .validated()
    }

    fn validated(self) -> Result<Self> {
        if self.count < 2 {
            return Err(Error::InvalidParameter(format!(
                "an axis needs at least 2 points, got {}",
                self.count
            )));
        }
        if !(self.start.is_finite() && self.end.is_finite()) || self.start >= self.end {
            return Err(Error::InvalidParameter(format!(
                "axis range must be finite with start < end, got [{}, {}]",
                self.start, self.end
            )));
        }
        if self.log && self.start <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "log-spaced axis needs positive endpoints, got [{}, {}]",
                self.start, self.end
            )));
        }
        Ok(self)
    }

    pub fn value(&self, i: usize) -> f64 {
        let last = self.count - 1;
        if i == 0 {
            return self.start;
        }
        if i == last {
            return self.end;
        }
        let f = i as f64 / last as f64;
        if self.log {
            let (a, b) = (self.start.ln(), self.end.ln());
            (a + (b - a) * f).exp()
        } else {
            self.start + (self.end - self.start) * f
        }
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.count).map(|i| self.value(i)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeseriesRow {
    pub t: f64,
    pub omega_t_minus_td: f64,
    pub p: f64,
    pub coherence: f64,
    pub intensity: f64,
    pub intensity_over_max: f64,
}

pub fn timeseries(params: &ModelParams, grid: &AxisRange) -> Vec<TimeseriesRow> {
    let i_max = params.max_intensity();
    grid.values()
        .into_iter()
        .map(|t| {
            let c = meanfield::l1_coherence(t, params);
            let i = meanfield::intensity(t, params);
            TimeseriesRow {
                t,
                omega_t_minus_td: params.scaled_time(t),
                p: meanfield::excitation_probability(t, params),
                coherence: c,
                intensity: i,
                intensity_over_max: i / i_max,
            }
        })
        .collect()
}

pub fn timeseries_table(rows: &[TimeseriesRow]) -> Table {
    Table {
        header: vec![
            "t",
            "omega_t_minus_tD",
            "p",
            "coherence",
            "intensity",
            "intensity_over_max",
        ],
        rows: rows
            .iter()
            .map(|r| {
                vec![
                    r.t,
                    r.omega_t_minus_td,
                    r.p,
                    r.coherence,
                    r.intensity,
                    r.intensity_over_max,
                ]
            })
            .collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    Coherence,
    /// `I / I_max`.
    Intensity,
    #[value(name = "qsl_ratio")]
    QslRatio,
}

impl Quantity {
    pub fn name(&self) -> &'static str {
        match self {
            Quantity::Coherence => "coherence",
            Quantity::Intensity => "intensity",
            Quantity::QslRatio => "qsl_ratio",
        }
    }
}

/// Grid over `x = ω(t − t_D)` and `y = α = Nγ0/(2ω)`; `γ0` follows from `y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub x_axis: AxisRange,
    pub y_axis: AxisRange,
    pub n_atoms: u64,
    pub omega: f64,
    pub quantity: Quantity,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub x: f64,
    pub y: f64,
    pub value: f64,
}

fn sweep_cell(spec: &SweepSpec, x: f64, y: f64) -> Result<Option<f64>> {
    let params = ModelParams::from_alpha(spec.n_atoms, y, spec.omega)?;
    let t = params.time_from_scaled(x);
    Ok(match spec.quantity {
        Quantity::Coherence => Some(meanfield::l1_coherence(t, &params)),
        Quantity::Intensity => Some(meanfield::intensity(t, &params) / params.max_intensity()),
        Quantity::QslRatio => {
            // τ ≤ 0 has no evolution to bound
            if t <= 0.0 {
                None
            } else {
                Some(qsl::qsl_time(&QslInputs::new(params, t)?)?.ratio)
            }
        }
    })
}

/// Evaluates the grid in parallel and returns rows in x-major order.
///
/// `threads = 0` uses rayon's default pool size.
pub fn sweep(spec: &SweepSpec, threads: usize) -> Result<Vec<SweepRow>> {
    ModelParams::new(spec.n_atoms, 1.0, spec.omega)?;
    let xs = spec.x_axis.values();
    let ys = spec.y_axis.values();
    let cells: Vec<(f64, f64)> = xs
        .iter()
        .flat_map(|&x| ys.iter().map(move |&y| (x, y)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("cannot start worker pool: {e}")))?;
    let values: Vec<Result<Option<f64>>> = pool.install(|| {
        cells
            .par_iter()
            .map(|&(x, y)| sweep_cell(spec, x, y))
            .collect()
    });
    let mut rows = Vec::with_capacity(cells.len());
    for ((x, y), value) in cells.into_iter().zip(values) {
        if let Some(value) = value? {
            rows.push(SweepRow { x, y, value });
        }
    }
    Ok(rows)
}

pub fn sweep_table(rows: &[SweepRow]) -> Table {
    Table {
        header: vec!["x", "y", "value"],
        rows: rows.iter().map(|r| vec![r.x, r.y, r.value]).collect(),
    }
}

/// QSL quantities plus the ratio recomputed from the endpoint coherences.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QslSummary {
    pub n_atoms: u64,
    pub gamma0: f64,
    pub omega: f64,
    pub alpha: f64,
    pub t_delay: f64,
    pub tau: f64,
    pub bures_angle: f64,
    pub avg_variance: f64,
    pub qsl_time: f64,
    pub ratio: f64,
    pub ratio_eq12: f64,
    pub coherence_0: f64,
    pub coherence_tau: f64,
}

pub fn qsl_summary(params: &ModelParams, tau: f64) -> Result<QslSummary> {
    let inputs = QslInputs::new(*params, tau)?;
    let report = qsl::qsl_time(&inputs)?;
    let via_coherence = qsl::ratio_via_coherence(&inputs)?;
    if (report.ratio - via_coherence).abs() > RATIO_AGREEMENT {
        return Err(Error::NumericalConsistency(format!(
            "ratio paths disagree: {} vs {}",
            report.ratio, via_coherence
        )));
    }
    let (c0, c_tau, _) = inputs.coherence_endpoints();
    Ok(QslSummary {
        n_atoms: params.n_atoms(),
        gamma0: params.gamma0(),
        omega: params.omega(),
        alpha: params.alpha(),
        t_delay: params.t_delay(),
        tau,
        bures_angle: report.bures_angle,
        avg_variance: report.avg_variance,
        qsl_time: report.qsl_time,
        ratio: report.ratio,
        ratio_eq12: via_coherence,
        coherence_0: c0,
        coherence_tau: c_tau,
    })
}

pub fn qsl_table(s: &QslSummary) -> Table {
    Table {
        header: vec![
            "tau",
            "bures_angle",
            "avg_variance",
            "qsl_time",
            "ratio",
            "ratio_eq12",
        ],
        rows: vec![vec![
            s.tau,
            s.bures_angle,
            s.avg_variance,
            s.qsl_time,
            s.ratio,
            s.ratio_eq12,
        ]],
    }
}
