//! Discretized trajectories and coupled-pair containers.

/// A discretized trajectory: `n_steps + 1` states of dimension `dim`,
/// stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    pub dim: usize,
    pub dt: f64,
    states: Vec<f64>,
}

impl Path {
    pub fn with_capacity(dim: usize, dt: f64, n_steps: usize) -> Self {
        Path { dim, dt, states: Vec::with_capacity((n_steps + 1) * dim) }
    }

    pub fn push_state(&mut self, state: &[f64]) {
        debug_assert_eq!(state.len(), self.dim);
        self.states.extend_from_slice(state);
    }

    pub fn n_steps(&self) -> usize {
        self.states.len() / self.dim - 1
    }

    #[inline]
    pub fn state(&self, k: usize) -> &[f64] {
        &self.states[k * self.dim..(k + 1) * self.dim]
    }

    pub fn last(&self) -> &[f64] {
        self.state(self.n_steps())
    }

    pub fn states(&self) -> &[f64] {
        &self.states
    }

    /// Applies a scalar map pointwise (dimension one only).
    pub fn map_scalar(&self, f: impl Fn(f64) -> f64) -> Path {
        debug_assert_eq!(self.dim, 1);
        Path { dim: 1, dt: self.dt, states: self.states.iter().map(|&x| f(x)).collect() }
    }
}

/// A trajectory of a reflected scheme together with its reflection-term
/// increments (`n_steps` rows of dimension `dim`).
#[derive(Debug, Clone, PartialEq)]
pub struct ReflectedPath {
    pub path: Path,
    eta: Vec<f64>,
    pub eta_total_variation: f64,
}

impl ReflectedPath {
    pub fn new(path: Path, eta: Vec<f64>) -> Self {
        let dim = path.dim;
        let eta_total_variation = eta
            .chunks_exact(dim)
            .map(|row| row.iter().map(|v| v * v).sum::<f64>().sqrt())
            .sum();
        ReflectedPath { path, eta, eta_total_variation }
    }

    /// Reflection increment applied between `t_k` and `t_{k+1}`.
    #[inline]
    pub fn eta_increment(&self, k: usize) -> &[f64] {
        let d = self.path.dim;
        &self.eta[k * d..(k + 1) * d]
    }

    pub fn eta_increments(&self) -> &[f64] {
        &self.eta
    }

    /// Cumulative reflection term at every grid point (`n_steps + 1` rows,
    /// starting at zero).
    pub fn eta_cumulative(&self) -> Vec<f64> {
        let d = self.path.dim;
        let n = self.path.n_steps();
        let mut out = vec![0.0; (n + 1) * d];
        for k in 0..n {
            for i in 0..d {
                out[(k + 1) * d + i] = out[k * d + i] + self.eta[k * d + i];
            }
        }
        out
    }
}

/// Drift-perturbed and plain reflected paths on shared noise, with the
/// accumulated perturbation energy `sum |rho(t_k, X_k)|^2 dt`.
#[derive(Debug, Clone)]
pub struct GirsanovCoupledPaths {
    pub x: ReflectedPath,
    pub y: ReflectedPath,
    pub rho_energy: f64,
}

/// Coupled pair driven toward a meeting before the horizon, with the
/// log-likelihood weight of the drift change frozen at the meeting step.
#[derive(Debug, Clone)]
pub struct HarnackCoupledPaths {
    pub x: ReflectedPath,
    pub y: ReflectedPath,
    pub log_weight: f64,
    pub met: bool,
    pub meeting_step: Option<usize>,
}
