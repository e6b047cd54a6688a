//! Uniform time grids.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform grid on `[0, horizon]` with `n_steps` steps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGrid {
    pub horizon: f64,
    pub n_steps: usize,
}

impl TimeGrid {
    pub fn new(horizon: f64, n_steps: usize) -> Result<Self> {
        let grid = TimeGrid { horizon, n_steps };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.horizon > 0.0) || !self.horizon.is_finite() {
            return Err(Error::config(format!(
                "grid horizon must be a positive finite real, got {}",
                self.horizon
            )));
        }
        if self.n_steps == 0 {
            return Err(Error::config("grid needs at least one step"));
        }
        Ok(())
    }

    pub fn dt(&self) -> f64 {
        self.horizon / self.n_steps as f64
    }

    pub fn time(&self, k: usize) -> f64 {
        k as f64 * self.dt()
    }

    /// Grid index closest to `t` (clamped to the grid).
    pub fn nearest_index(&self, t: f64) -> usize {
        let k = (t / self.dt()).round();
        (k.max(0.0) as usize).min(self.n_steps)
    }

    /// Same horizon, twice the steps. Used for discretization-stability
    /// reruns.
    pub fn refined(&self) -> TimeGrid {
        TimeGrid { horizon: self.horizon, n_steps: self.n_steps * 2 }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dt_and_times() {
        let g = TimeGrid::new(2.0, 4).unwrap();
        assert_eq!(g.dt(), 0.5);
        assert_eq!(g.time(3), 1.5);
        assert_eq!(g.nearest_index(1.49), 3);
        assert_eq!(g.nearest_index(100.0), 4);
    }

    #[test]
    fn invalid_grids_rejected() {
        assert!(TimeGrid::new(0.0, 10).is_err());
        assert!(TimeGrid::new(1.0, 0).is_err());
        assert!(TimeGrid::new(f64::INFINITY, 1).is_err());
    }
}
