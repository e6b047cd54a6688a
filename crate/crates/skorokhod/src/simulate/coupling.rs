//! Measure-change couplings on shared noise.
//!
//! `girsanov_coupled` runs a drift-perturbed and an unperturbed reflected
//! path on the same increments and accumulates the perturbation energy whose
//! half-mean estimates the relative entropy between the two path laws.
//!
//! `harnack_coupled` runs the pair whose second component is steered onto the
//! first by a time-inhomogeneous drift that blows up at the horizon, forcing
//! a meeting; the likelihood weight of that steering is accumulated in log
//! form and frozen once the paths are glued.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::model::{CoefficientSpec, ConvexDomain};

use super::grid::TimeGrid;
use super::noise::NoisePanel;
use super::paths::{GirsanovCoupledPaths, HarnackCoupledPaths};
use super::schemes::projected_path_with_extra_drift;

/// Meeting tolerance for the coupling, as a fraction of the domain scale.
pub const MEETING_TOL_SCALE: f64 = 1e-6;

pub type RhoFn = dyn Fn(f64, &[f64], &mut [f64]) + Send + Sync;

/// A bounded deterministic or state-feedback drift perturbation `rho(t, x)`.
#[derive(Clone)]
pub enum RhoSpec {
    Constant { value: Vec<f64> },
    Custom { id: String, sup_norm: f64, func: Arc<RhoFn> },
}

impl std::fmt::Debug for RhoSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RhoSpec::Constant { value } => f.debug_struct("Constant").field("value", value).finish(),
            RhoSpec::Custom { id, sup_norm, .. } => f
                .debug_struct("Custom")
                .field("id", id)
                .field("sup_norm", sup_norm)
                .finish(),
        }
    }
}

impl RhoSpec {
    pub fn constant_scalar(r: f64) -> Self {
        RhoSpec::Constant { value: vec![r] }
    }

    pub fn eval_into(&self, t: f64, x: &[f64], out: &mut [f64]) {
        match self {
            RhoSpec::Constant { value } => out.copy_from_slice(value),
            RhoSpec::Custom { func, .. } => func(t, x, out),
        }
    }

    pub fn sup_norm(&self) -> f64 {
        match self {
            RhoSpec::Constant { value } => value.iter().map(|v| v * v).sum::<f64>().sqrt(),
            RhoSpec::Custom { sup_norm, .. } => *sup_norm,
        }
    }

    pub fn dim(&self) -> Option<usize> {
        match self {
            RhoSpec::Constant { value } => Some(value.len()),
            RhoSpec::Custom { .. } => None,
        }
    }
}

/// Runs the perturbed path (extra drift `sigma(X) rho(t, X)`) and the plain
/// path on the same noise panel, both via the projected scheme, and records
/// `rho_energy = sum_k |rho(t_k, X_k)|^2 dt`.
pub fn girsanov_coupled(
    sde: &CoefficientSpec,
    domain: &ConvexDomain,
    x0: &[f64],
    rho: &RhoSpec,
    grid: &TimeGrid,
    noise: &NoisePanel,
) -> Result<GirsanovCoupledPaths> {
    let d = sde.dim;
    if let Some(rd) = rho.dim() {
        if rd != d {
            return Err(Error::config("perturbation dimension does not match the model"));
        }
    }
    let dt = grid.dt();
    let mut rho_energy = 0.0;
    let mut rho_buf = vec![0.0; d];
    let x = projected_path_with_extra_drift(sde, domain, x0, grid, noise, |k, state, out| {
        let t = k as f64 * dt;
        rho_buf.fill(0.0);
        rho.eval_into(t, state, &mut rho_buf);
        rho_energy += rho_buf.iter().map(|v| v * v).sum::<f64>() * dt;
        sde.diffusion.apply_into(state, &rho_buf, out);
        for v in out.iter_mut() {
            *v *= dt;
        }
    })?;
    let y = projected_path_with_extra_drift(sde, domain, x0, grid, noise, |_, _, _| {})?;
    Ok(GirsanovCoupledPaths { x, y, rho_energy })
}

/// Steering clock `xi(t) = ((2 - theta) / (2 delta)) (exp(2 delta (T - t)) - 1)`:
/// strictly positive on `[0, T)`, vanishing at the horizon, and satisfying
/// `2 + 2 delta xi + xi' = theta`.
pub fn xi_value(delta: f64, theta: f64, horizon: f64, t: f64) -> f64 {
    (2.0 - theta) / (-2.0 * delta) * (1.0 - (-2.0 * delta * (t - horizon)).exp())
}

/// Analytic derivative of the steering clock, used by the identity test.
pub fn xi_derivative(delta: f64, theta: f64, horizon: f64, t: f64) -> f64 {
    -(2.0 - theta) * (-2.0 * delta * (t - horizon)).exp()
}

/// Values of the steering clock at the left grid points `t_0 .. t_{n-1}`.
pub fn xi_schedule(delta: f64, theta: f64, grid: &TimeGrid) -> Result<Vec<f64>> {
    if !(theta > 0.0 && theta < 2.0) {
        return Err(Error::config(format!(
            "coupling parameter theta must lie in (0, 2), got {theta}"
        )));
    }
    if !(delta > 0.0) {
        return Err(Error::config(format!(
            "coupling requires a positive dissipativity rate, got {delta}"
        )));
    }
    grid.validate()?;
    let dt = grid.dt();
    Ok((0..grid.n_steps)
        .map(|k| xi_value(delta, theta, grid.horizon, k as f64 * dt))
        .collect())
}

/// Runs the meeting coupling from `x` and `y` under the original measure.
///
/// The second path carries the extra drift
/// `(1/xi_t) sigma(Y) sigma(X)^{-1} (X - Y)`, and the log weight accumulates
/// `-(1/xi_k) <sigma(X_k)^{-1}(X_k - Y_k), dB_k>
///  - (1/(2 xi_k^2)) |sigma(X_k)^{-1}(X_k - Y_k)|^2 dt`.
/// Paths are glued (and the weight frozen) at the first step where
/// `|X - Y|` drops below the meeting tolerance, and at the final step
/// unconditionally.
pub fn harnack_coupled(
    sde: &CoefficientSpec,
    domain: &ConvexDomain,
    x: &[f64],
    y: &[f64],
    theta: f64,
    grid: &TimeGrid,
    noise: &NoisePanel,
) -> Result<HarnackCoupledPaths> {
    let d = sde.dim;
    let delta = sde.constants.dissipativity;
    let xi = xi_schedule(delta, theta, grid)?;
    if !domain.contains(x) || !domain.contains(y) {
        return Err(Error::config("both starting points must lie in the domain closure"));
    }
    let start_gap: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    let scale = domain.diameter().unwrap_or_else(|| start_gap.max(1.0));
    let meet_tol = MEETING_TOL_SCALE * scale;
    let dt = grid.dt();

    // X is the plain reflected path; it does not depend on Y.
    let x_path = projected_path_with_extra_drift(sde, domain, x, grid, noise, |_, _, _| {})?;

    let mut log_weight = 0.0;
    let mut met = x
        .iter()
        .zip(y)
        .all(|(a, b)| (a - b).abs() <= 0.0);
    let mut meeting_step = if met { Some(0) } else { None };
    let mut solve_err: Option<Error> = None;
    let mut diff = vec![0.0; d];
    let mut steer = vec![0.0; d];
    let mut sigma_inv_diff = vec![0.0; d];

    let y_path = projected_path_with_extra_drift(sde, domain, y, grid, noise, |k, state, out| {
        if met || solve_err.is_some() {
            return;
        }
        let x_k = x_path.path.state(k);
        for i in 0..d {
            diff[i] = x_k[i] - state[i];
        }
        if let Err(e) = sde.diffusion.solve_into(x_k, &diff, &mut sigma_inv_diff) {
            solve_err = Some(e);
            return;
        }
        // weight increment with the raw Brownian increments
        let db = noise.step(k);
        let inv_xi = 1.0 / xi[k];
        let mut inner = 0.0;
        let mut norm2 = 0.0;
        for i in 0..d {
            inner += sigma_inv_diff[i] * db[i];
            norm2 += sigma_inv_diff[i] * sigma_inv_diff[i];
        }
        log_weight -= inv_xi * inner + 0.5 * inv_xi * inv_xi * norm2 * dt;

        sde.diffusion.apply_into(state, &sigma_inv_diff, &mut steer);
        for i in 0..d {
            out[i] = dt * inv_xi * steer[i];
        }
    })?;
    if let Some(e) = solve_err {
        return Err(e);
    }

    // glue pass: replace Y by X from the meeting step on
    let n = grid.n_steps;
    let mut glued_states: Vec<f64> = y_path.path.states().to_vec();
    let mut glued_eta: Vec<f64> = y_path.eta_increments().to_vec();
    if !met {
        for k in 1..=n {
            let gap: f64 = x_path
                .path
                .state(k)
                .iter()
                .zip(y_path.path.state(k))
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            if gap <= meet_tol || k == n {
                meeting_step = Some(k);
                break;
            }
        }
    }
    let meet_at = meeting_step.unwrap_or(n);
    if meet_at < n || !met {
        met = true;
        for k in meet_at..=n {
            let src = x_path.path.state(k);
            glued_states[k * d..(k + 1) * d].copy_from_slice(src);
            if k < n {
                let src_eta = x_path.eta_increment(k);
                glued_eta[k * d..(k + 1) * d].copy_from_slice(src_eta);
            }
        }
        // recompute the frozen weight: stop accumulation at the meeting step
        if meet_at < n {
            log_weight = recompute_log_weight(sde, &x_path, &y_path, &xi, noise, dt, meet_at)?;
        }
    }

    let mut glued = super::paths::Path::with_capacity(d, dt, n);
    for k in 0..=n {
        glued.push_state(&glued_states[k * d..(k + 1) * d]);
    }
    Ok(HarnackCoupledPaths {
        x: x_path,
        y: super::paths::ReflectedPath::new(glued, glued_eta),
        log_weight,
        met,
        meeting_step,
    })
}

fn recompute_log_weight(
    sde: &CoefficientSpec,
    x_path: &super::paths::ReflectedPath,
    y_path: &super::paths::ReflectedPath,
    xi: &[f64],
    noise: &NoisePanel,
    dt: f64,
    meet_at: usize,
) -> Result<f64> {
    let d = sde.dim;
    let mut diff = vec![0.0; d];
    let mut sigma_inv_diff = vec![0.0; d];
    let mut log_weight = 0.0;
    for k in 0..meet_at {
        let x_k = x_path.path.state(k);
        let y_k = y_path.path.state(k);
        for i in 0..d {
            diff[i] = x_k[i] - y_k[i];
        }
        sde.diffusion.solve_into(x_k, &diff, &mut sigma_inv_diff)?;
        let db = noise.step(k);
        let inv_xi = 1.0 / xi[k];
        let mut inner = 0.0;
        let mut norm2 = 0.0;
        for i in 0..d {
            inner += sigma_inv_diff[i] * db[i];
            norm2 += sigma_inv_diff[i] * sigma_inv_diff[i];
        }
        log_weight -= inv_xi * inner + 0.5 * inv_xi * inv_xi * norm2 * dt;
    }
    Ok(log_weight)
}
