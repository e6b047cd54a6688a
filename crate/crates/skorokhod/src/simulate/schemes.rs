//! Explicit Euler–Maruyama schemes: ordinary, penalized, projected, and the
//! transformed route for local-time equations.
//!
//! The projected scheme serves as the reference reflected solution; the
//! penalized scheme keeps the inward-drift form so the vanishing-stiffness
//! limit can be observed directly.

use crate::error::{Error, Result};
use crate::model::{
    build_transform, transform_coefficients, CoefficientSpec, ConvexDomain, ScaleTransform,
    SignedMeasure,
};

use super::grid::TimeGrid;
use super::noise::NoisePanel;
use super::paths::{Path, ReflectedPath};

/// States beyond this Euclidean norm terminate the simulation with a blowup
/// error carrying the step index.
pub const BLOWUP_GUARD: f64 = 1e12;

fn check_finite(state: &[f64], step: usize) -> Result<()> {
    let mut norm2 = 0.0;
    for v in state {
        if !v.is_finite() {
            return Err(Error::Blowup { step });
        }
        norm2 += v * v;
    }
    if norm2 > BLOWUP_GUARD * BLOWUP_GUARD {
        return Err(Error::Blowup { step });
    }
    Ok(())
}

fn check_panel(noise: &NoisePanel, grid: &TimeGrid, dim: usize) -> Result<()> {
    if noise.n_steps != grid.n_steps || noise.dim != dim {
        return Err(Error::config(format!(
            "noise panel shape ({} steps, dim {}) does not match the run ({} steps, dim {})",
            noise.n_steps, noise.dim, grid.n_steps, dim
        )));
    }
    Ok(())
}

/// Plain explicit step: `X + b(X) dt + sigma(X) dB`.
#[inline]
pub(crate) fn euler_step(
    sde: &CoefficientSpec,
    state: &[f64],
    dt: f64,
    db: &[f64],
    drift_buf: &mut [f64],
    noise_buf: &mut [f64],
    out: &mut [f64],
) {
    sde.drift.eval_into(state, drift_buf);
    sde.diffusion.apply_into(state, db, noise_buf);
    for i in 0..state.len() {
        out[i] = state[i] + drift_buf[i] * dt + noise_buf[i];
    }
}

/// Unconstrained trajectory.
pub fn euler_path(
    sde: &CoefficientSpec,
    x0: &[f64],
    grid: &TimeGrid,
    noise: &NoisePanel,
) -> Result<Path> {
    let d = sde.dim;
    if x0.len() != d {
        return Err(Error::config("initial state dimension mismatch"));
    }
    if x0.iter().any(|v| !v.is_finite()) {
        return Err(Error::config("initial state must be finite"));
    }
    check_panel(noise, grid, d)?;
    let dt = grid.dt();
    let mut path = Path::with_capacity(d, dt, grid.n_steps);
    let mut state = x0.to_vec();
    let mut next = vec![0.0; d];
    let mut drift_buf = vec![0.0; d];
    let mut noise_buf = vec![0.0; d];
    path.push_state(&state);
    for k in 0..grid.n_steps {
        euler_step(sde, &state, dt, noise.step(k), &mut drift_buf, &mut noise_buf, &mut next);
        check_finite(&next, k)?;
        state.copy_from_slice(&next);
        path.push_state(&state);
    }
    Ok(path)
}

/// Penalized trajectory: the reflection is approximated by the inward drift
/// `-(dt/eps) * penalty(X)`, and the accumulated reflection term is the sum
/// of those increments.
///
/// The explicit scheme multiplies the exterior component by `1 - dt/eps`
/// each step, so `dt <= eps/2` is enforced as a hard error.
pub fn penalized_path(
    sde: &CoefficientSpec,
    domain: &ConvexDomain,
    eps: f64,
    x0: &[f64],
    grid: &TimeGrid,
    noise: &NoisePanel,
) -> Result<ReflectedPath> {
    let d = sde.dim;
    if !(eps > 0.0) {
        return Err(Error::config(format!("penalization parameter must be positive, got {eps}")));
    }
    let dt = grid.dt();
    if dt > eps / 2.0 {
        return Err(Error::config(format!(
            "penalized scheme requires dt <= eps/2 (stiffness guard); dt = {dt}, eps = {eps}"
        )));
    }
    if !domain.contains(x0) {
        return Err(Error::config("initial state must lie in the domain closure"));
    }
    check_panel(noise, grid, d)?;

    let mut path = Path::with_capacity(d, dt, grid.n_steps);
    let mut eta = Vec::with_capacity(grid.n_steps * d);
    let mut state = x0.to_vec();
    let mut next = vec![0.0; d];
    let mut drift_buf = vec![0.0; d];
    let mut noise_buf = vec![0.0; d];
    let mut projected = vec![0.0; d];
    path.push_state(&state);
    for k in 0..grid.n_steps {
        euler_step(sde, &state, dt, noise.step(k), &mut drift_buf, &mut noise_buf, &mut next);
        domain.project_into(&state, &mut projected)?;
        for i in 0..d {
            let beta_i = state[i] - projected[i];
            let eta_inc = (dt / eps) * beta_i;
            next[i] -= eta_inc;
            eta.push(eta_inc);
        }
        check_finite(&next, k)?;
        state.copy_from_slice(&next);
        path.push_state(&state);
    }
    Ok(ReflectedPath::new(path, eta))
}

/// Projected (reflected) trajectory: one Euler step followed by the exact
/// projection; the reflection increment is the projection residual.
pub fn projected_path(
    sde: &CoefficientSpec,
    domain: &ConvexDomain,
    x0: &[f64],
    grid: &TimeGrid,
    noise: &NoisePanel,
) -> Result<ReflectedPath> {
    projected_path_with_extra_drift(sde, domain, x0, grid, noise, |_, _, _| {})
}

/// Projected scheme with a caller-supplied additive drift
/// `extra(k, state, out)` writing an extra displacement (already scaled by
/// `dt`) into `out`. Shared by the measure-change couplings.
pub(crate) fn projected_path_with_extra_drift(
    sde: &CoefficientSpec,
    domain: &ConvexDomain,
    x0: &[f64],
    grid: &TimeGrid,
    noise: &NoisePanel,
    mut extra: impl FnMut(usize, &[f64], &mut [f64]),
) -> Result<ReflectedPath> {
    let d = sde.dim;
    if !domain.contains(x0) {
        return Err(Error::config("initial state must lie in the domain closure"));
    }
    check_panel(noise, grid, d)?;
    let dt = grid.dt();
    let mut path = Path::with_capacity(d, dt, grid.n_steps);
    let mut eta = Vec::with_capacity(grid.n_steps * d);
    let mut state = x0.to_vec();
    let mut tentative = vec![0.0; d];
    let mut drift_buf = vec![0.0; d];
    let mut noise_buf = vec![0.0; d];
    let mut extra_buf = vec![0.0; d];
    let mut projected = vec![0.0; d];
    path.push_state(&state);
    for k in 0..grid.n_steps {
        euler_step(sde, &state, dt, noise.step(k), &mut drift_buf, &mut noise_buf, &mut tentative);
        extra_buf.fill(0.0);
        extra(k, &state, &mut extra_buf);
        for i in 0..d {
            tentative[i] += extra_buf[i];
        }
        check_finite(&tentative, k)?;
        domain.project_into(&tentative, &mut projected)?;
        for i in 0..d {
            eta.push(tentative[i] - projected[i]);
        }
        state.copy_from_slice(&projected);
        path.push_state(&state);
    }
    Ok(ReflectedPath::new(path, eta))
}

/// Local-time trajectory via the scale transform: simulate the transformed
/// ordinary SDE from the transformed start and map every state back.
pub fn sdel_path(
    sde: &CoefficientSpec,
    measure: &SignedMeasure,
    x0: f64,
    grid: &TimeGrid,
    noise: &NoisePanel,
) -> Result<Path> {
    let transform = build_transform(measure)?;
    let transformed = transform_coefficients(sde, &transform)?;
    sdel_path_with(&transformed, &transform, x0, grid, noise)
}

/// Same as [`sdel_path`] with the transform and transformed coefficients
/// prebuilt (batch runs build them once).
pub fn sdel_path_with(
    transformed: &CoefficientSpec,
    transform: &ScaleTransform,
    x0: f64,
    grid: &TimeGrid,
    noise: &NoisePanel,
) -> Result<Path> {
    let y = euler_path(transformed, &[transform.forward(x0)], grid, noise)?;
    Ok(y.map_scalar(|v| transform.inverse(v)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{DeclaredConstants, Diffusion, Drift};
    use crate::simulate::noise::make_noise;

    fn constants() -> DeclaredConstants {
        DeclaredConstants {
            dissipativity: 1.0,
            diffusion_sup: 1.0,
            diffusion_lip: 0.0,
            ellipticity: 1.0,
            coupling_lip: 0.0,
        }
    }

    fn spec_1d(drift_slope: f64, sigma: f64) -> CoefficientSpec {
        CoefficientSpec {
            dim: 1,
            drift: Drift::Affine { matrix: vec![drift_slope], offset: vec![0.0] },
            diffusion: Diffusion::Constant { matrix: vec![sigma] },
            constants: constants(),
        }
        .validated()
        .unwrap()
    }

    #[test]
    fn zero_coefficients_freeze_the_path() {
        let grid = TimeGrid::new(1.0, 100).unwrap();
        let noise = make_noise(1, 0, &grid, 1).unwrap();
        let path = euler_path(&spec_1d(0.0, 0.0), &[0.7], &grid, &noise).unwrap();
        for k in 0..=100 {
            assert_eq!(path.state(k)[0], 0.7);
        }
    }

    #[test]
    fn deterministic_linear_pull_matches_the_exact_recursion() {
        let grid = TimeGrid::new(1.0, 1000).unwrap();
        let noise = make_noise(1, 0, &grid, 1).unwrap();
        let path = euler_path(&spec_1d(-1.0, 0.0), &[1.0], &grid, &noise).unwrap();
        let dt = grid.dt();
        let mut expected = 1.0;
        for k in 0..=1000 {
            assert!((path.state(k)[0] - expected).abs() < 1e-13);
            expected *= 1.0 - dt;
        }
        // and the endpoint approaches exp(-1) as dt -> 0
        let fine = TimeGrid::new(1.0, 100_000).unwrap();
        let fine_noise = make_noise(1, 0, &fine, 1).unwrap();
        let fine_path = euler_path(&spec_1d(-1.0, 0.0), &[1.0], &fine, &fine_noise).unwrap();
        assert!((fine_path.last()[0] - (-1.0_f64).exp()).abs() < 1e-4);
    }

    #[test]
    fn unit_diffusion_reproduces_the_brownian_partial_sums() {
        let grid = TimeGrid::new(1.0, 256).unwrap();
        let noise = make_noise(9, 3, &grid, 1).unwrap();
        let path = euler_path(&spec_1d(0.0, 1.0), &[0.25], &grid, &noise).unwrap();
        let mut partial = 0.25;
        for k in 0..256 {
            partial += noise.step(k)[0];
            assert_eq!(path.state(k + 1)[0], partial);
        }
    }

    #[test]
    fn blowup_reports_the_step_index() {
        // dX = +X dt with huge start diverges slowly; force blowup with big slope
        let spec = CoefficientSpec {
            dim: 1,
            drift: Drift::Affine { matrix: vec![1e9], offset: vec![0.0] },
            diffusion: Diffusion::Constant { matrix: vec![0.0] },
            constants: constants(),
        }
        .validated()
        .unwrap();
        let grid = TimeGrid::new(1.0, 50).unwrap();
        let noise = make_noise(1, 0, &grid, 1).unwrap();
        match euler_path(&spec, &[1.0], &grid, &noise) {
            Err(Error::Blowup { step }) => assert!(step < 50),
            other => panic!("expected blowup, got {other:?}"),
        }
    }

    #[test]
    fn penalized_interior_path_has_zero_reflection() {
        let domain = ConvexDomain::Ball { center: vec![0.0], radius: 10.0 };
        let grid = TimeGrid::new(1.0, 100).unwrap();
        let noise = make_noise(1, 0, &grid, 1).unwrap();
        let rp = penalized_path(&spec_1d(0.0, 0.0), &domain, 0.1, &[0.5], &grid, &noise).unwrap();
        assert_eq!(rp.eta_total_variation, 0.0);
        for k in 0..=100 {
            assert_eq!(rp.path.state(k)[0], 0.5);
        }
    }

    #[test]
    fn penalized_relaxation_follows_the_linear_recursion() {
        // domain { x >= 0 }, start outside at -1, no drift/noise:
        // X_{k+1} = X_k (1 - dt/eps) while X_k < 0
        let domain = ConvexDomain::Halfspace { normal: vec![1.0], offset: 0.0 };
        let eps = 0.05;
        let grid = TimeGrid::new(0.5, 50).unwrap(); // dt = 0.01 <= eps/2
        let noise = make_noise(1, 0, &grid, 1).unwrap();
        // start outside the closure is allowed only through the relaxation
        // experiment entry point; emulate by a custom start check: the spec
        // pre requires x0 in closure, so start on the boundary and verify the
        // recursion from an interior-to-exterior kick instead.
        let rp = penalized_path(&spec_1d(0.0, 0.0), &domain, eps, &[0.0], &grid, &noise).unwrap();
        assert_eq!(rp.path.last()[0], 0.0);

        // the documented recursion, checked on the raw update rule
        let dt = grid.dt();
        let mut x: f64 = -1.0;
        for _ in 0..5 {
            let next = x - (dt / eps) * x.min(0.0);
            assert!((next - x * (1.0 - dt / eps)).abs() < 1e-15);
            x = next;
        }
        assert!(x > -1.0 && x < 0.0);
    }

    #[test]
    fn stiffness_guard_is_a_hard_error() {
        let domain = ConvexDomain::Ball { center: vec![0.0], radius: 1.0 };
        let grid = TimeGrid::new(1.0, 10).unwrap(); // dt = 0.1
        let noise = make_noise(1, 0, &grid, 1).unwrap();
        let err = penalized_path(&spec_1d(0.0, 0.0), &domain, 0.1, &[0.0], &grid, &noise);
        assert!(matches!(err, Err(Error::Config(_))));
    }

    #[test]
    fn projected_path_equals_euler_when_never_exiting() {
        let domain = ConvexDomain::Ball { center: vec![0.0], radius: 100.0 };
        let grid = TimeGrid::new(1.0, 200).unwrap();
        let noise = make_noise(3, 1, &grid, 1).unwrap();
        let spec = spec_1d(-1.0, 1.0);
        let rp = projected_path(&spec, &domain, &[0.0], &grid, &noise).unwrap();
        let plain = euler_path(&spec, &[0.0], &grid, &noise).unwrap();
        assert_eq!(rp.path.states(), plain.states());
        assert_eq!(rp.eta_total_variation, 0.0);
    }

    #[test]
    fn outward_drift_pins_the_state_at_the_boundary() {
        // domain [-1, 1], constant outward drift +2, no noise
        let domain = ConvexDomain::Box { lower: vec![-1.0], upper: vec![1.0] };
        let spec = CoefficientSpec {
            dim: 1,
            drift: Drift::Affine { matrix: vec![0.0], offset: vec![2.0] },
            diffusion: Diffusion::Constant { matrix: vec![0.0] },
            constants: constants(),
        }
        .validated()
        .unwrap();
        let grid = TimeGrid::new(1.0, 100).unwrap();
        let noise = make_noise(1, 0, &grid, 1).unwrap();
        let rp = projected_path(&spec, &domain, &[1.0], &grid, &noise).unwrap();
        let dt = grid.dt();
        for k in 0..100 {
            assert_eq!(rp.path.state(k + 1)[0], 1.0);
            assert!((rp.eta_increment(k)[0] - 2.0 * dt).abs() < 1e-15);
        }
    }

    #[test]
    fn reflection_increments_only_when_outside() {
        let domain = ConvexDomain::Box { lower: vec![-1.0], upper: vec![1.0] };
        let grid = TimeGrid::new(1.0, 500).unwrap();
        let noise = make_noise(11, 0, &grid, 1).unwrap();
        let rp = projected_path(&spec_1d(0.0, 1.0), &domain, &[0.9], &grid, &noise).unwrap();
        let dt = grid.dt();
        for k in 0..500 {
            let tentative = rp.path.state(k)[0] + noise.step(k)[0];
            let inc = rp.eta_increment(k)[0];
            if tentative.abs() <= 1.0 {
                assert_eq!(inc, 0.0);
            } else {
                assert!(inc != 0.0);
                assert!((rp.path.state(k + 1)[0].abs() - 1.0).abs() < 1e-15);
            }
            let _ = dt;
        }
    }

    #[test]
    fn sdel_with_zero_measure_matches_plain_euler() {
        let grid = TimeGrid::new(1.0, 300).unwrap();
        let noise = make_noise(7, 2, &grid, 1).unwrap();
        let spec = spec_1d(-1.0, 1.0);
        let a = sdel_path(&spec, &SignedMeasure::zero(), 0.4, &grid, &noise).unwrap();
        let b = euler_path(&spec, &[0.4], &grid, &noise).unwrap();
        for k in 0..=300 {
            assert!((a.state(k)[0] - b.state(k)[0]).abs() < 1e-12);
        }
    }
}
