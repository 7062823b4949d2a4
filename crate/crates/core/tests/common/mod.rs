#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;

/// Adaptive Simpson quadrature with absolute tolerance `tol`, bisection
/// depth capped at `max_depth`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, max_depth: u32) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = simpson(fa, flm, fm, a, m);
        let right = simpson(fm, frm, fb, m, b);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    let (fa, fb) = (f(a), f(b));
    let m = 0.5 * (a + b);
    let fm = f(m);
    recurse(
        f,
        a,
        b,
        fa,
        fm,
        fb,
        simpson(fa, fm, fb, a, b),
        tol,
        max_depth,
    )
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn kron(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    a.kronecker(b)
}

/// Sum of off-diagonal magnitudes.
pub fn l1_norm_of_coherence(rho: &DMatrix<Complex64>) -> f64 {
    let mut sum = 0.0;
    for j in 0..rho.ncols() {
        for i in 0..rho.nrows() {
            if i != j {
                sum += rho[(i, j)].norm();
            }
        }
    }
    sum
}

pub fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Explicit `2^N`-dimensional model of `N` qubits, single-qubit basis
/// `(|e⟩, |g⟩)` so bit value 0 means excited.
pub struct FullSpace {
    pub n: usize,
    pub dim: usize,
}

impl FullSpace {
    pub fn new(n: usize) -> Self {
        Self { n, dim: 1 << n }
    }

    fn embed(&self, site: usize, op: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        let id = DMatrix::<Complex64>::identity(2, 2);
        let mut out = DMatrix::<Complex64>::identity(1, 1);
        for j in 0..self.n {
            out = kron(&out, if j == site { op } else { &id });
        }
        out
    }

    /// `σ⁻ = |g⟩⟨e|` on one site.
    pub fn lowering(&self, site: usize) -> DMatrix<Complex64> {
        let mut s = DMatrix::zeros(2, 2);
        s[(1, 0)] = c(1.0, 0.0);
        self.embed(site, &s)
    }

    /// `σz / 2` on one site.
    pub fn half_z(&self, site: usize) -> DMatrix<Complex64> {
        let mut s = DMatrix::zeros(2, 2);
        s[(0, 0)] = c(0.5, 0.0);
        s[(1, 1)] = c(-0.5, 0.0);
        self.embed(site, &s)
    }

    pub fn collective_lowering(&self) -> DMatrix<Complex64> {
        (0..self.n).fold(DMatrix::zeros(self.dim, self.dim), |acc, j| {
            acc + self.lowering(j)
        })
    }

    pub fn collective_z(&self) -> DMatrix<Complex64> {
        (0..self.n).fold(DMatrix::zeros(self.dim, self.dim), |acc, j| {
            acc + self.half_z(j)
        })
    }

    /// `(sqrt(p0) e^{iφ}|e⟩ + sqrt(1 − p0)|g⟩)^{⊗N}` as a density matrix.
    pub fn product_state(&self, p0: f64, phase: f64) -> DMatrix<Complex64> {
        let v = DMatrix::from_column_slice(
            2,
            1,
            &[
                Complex64::from_polar(p0.sqrt(), phase),
                c((1.0 - p0).sqrt(), 0.0),
            ],
        );
        let single = &v * v.adjoint();
        (1..self.n).fold(single.clone(), |acc, _| kron(&acc, &single))
    }

    /// Normalised symmetric Dicke states, ordered from all-excited down.
    pub fn dicke_basis(&self) -> DMatrix<Complex64> {
        let mut basis = DMatrix::zeros(self.dim, self.n + 1);
        for i in 0..=self.n {
            // i ground-state atoms = i set bits
            let members: Vec<usize> = (0..self.dim)
                .filter(|s| s.count_ones() as usize == i)
                .collect();
            let amp = 1.0 / (members.len() as f64).sqrt();
            for s in members {
                basis[(s, i)] = c(amp, 0.0);
            }
        }
        basis
    }

    /// `D[L]ρ = LρL† − ½{L†L, ρ}`.
    pub fn dissipator(l: &DMatrix<Complex64>, rho: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        let ld = l.adjoint();
        let ldl = &ld * l;
        l * rho * &ld - (&ldl * rho + rho * &ldl) * c(0.5, 0.0)
    }

    /// Collective decay at `gamma`, local decay at `decay` and local
    /// dephasing (single-atom coherence rate `dephase`).
    pub fn derivative(
        &self,
        rho: &DMatrix<Complex64>,
        omega: f64,
        gamma: f64,
        decay: f64,
        dephase: f64,
    ) -> DMatrix<Complex64> {
        let jz = self.collective_z();
        let jm = self.collective_lowering();
        let mut out =
            (&jz * rho - rho * &jz) * c(0.0, -omega) + Self::dissipator(&jm, rho) * c(gamma, 0.0);
        for j in 0..self.n {
            out += Self::dissipator(&self.lowering(j), rho) * c(decay, 0.0);
            // D[sqrt(γφ/2) σz] = D[sqrt(2γφ) σz/2]
            out += Self::dissipator(&self.half_z(j), rho) * c(2.0 * dephase, 0.0);
        }
        out
    }
}
