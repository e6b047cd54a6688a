//! Piecewise-affine scalar functions with right-continuous piece selection.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One affine piece, active on `[start, next_start)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffinePiece {
    /// Left edge of the piece; `-inf` for the first piece.
    pub start: f64,
    pub slope: f64,
    pub intercept: f64,
}

impl AffinePiece {
    pub fn eval(&self, x: f64) -> f64 {
        self.slope * x + self.intercept
    }
}

/// A scalar function that is affine on finitely many half-open intervals
/// `[t_i, t_{i+1})`. Evaluation picks the piece with the largest start
/// `<= x`, which makes the function right-continuous at the thresholds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(f64, f64, f64)>", into = "Vec<(f64, f64, f64)>")]
pub struct PiecewiseAffine {
    pieces: Vec<AffinePiece>,
}

impl PiecewiseAffine {
    /// Builds the function from `(start, slope, intercept)` triples. The first
    /// start must be `-inf` so the whole line is covered, and starts must be
    /// strictly increasing.
    pub fn new(pieces: Vec<(f64, f64, f64)>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::config("piecewise function needs at least one piece"));
        }
        if pieces[0].0 != f64::NEG_INFINITY {
            return Err(Error::config(
                "first piece must start at -inf so the function covers the whole line",
            ));
        }
        for w in pieces.windows(2) {
            if !(w[0].0 < w[1].0) {
                return Err(Error::config(format!(
                    "piece starts must be strictly increasing, got {} then {}",
                    w[0].0, w[1].0
                )));
            }
        }
        for &(_, slope, intercept) in &pieces {
            if !slope.is_finite() || !intercept.is_finite() {
                return Err(Error::config("piece slopes and intercepts must be finite"));
            }
        }
        Ok(PiecewiseAffine {
            pieces: pieces
                .into_iter()
                .map(|(start, slope, intercept)| AffinePiece { start, slope, intercept })
                .collect(),
        })
    }

    /// A single affine piece over the whole line.
    pub fn affine(slope: f64, intercept: f64) -> Self {
        PiecewiseAffine {
            pieces: vec![AffinePiece { start: f64::NEG_INFINITY, slope, intercept }],
        }
    }

    pub fn constant(value: f64) -> Self {
        Self::affine(0.0, value)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.piece_at(x).eval(x)
    }

    pub(crate) fn piece_at(&self, x: f64) -> &AffinePiece {
        // last piece with start <= x
        let idx = self.pieces.partition_point(|p| p.start <= x);
        &self.pieces[idx.saturating_sub(1).min(self.pieces.len() - 1)]
    }

    pub fn pieces(&self) -> &[AffinePiece] {
        &self.pieces
    }

    /// Thresholds where the active piece changes (finite starts only).
    pub fn thresholds(&self) -> impl Iterator<Item = f64> + '_ {
        self.pieces.iter().map(|p| p.start).filter(|s| s.is_finite())
    }

    /// Largest |slope| over all pieces, i.e. the global Lipschitz constant.
    pub fn max_abs_slope(&self) -> f64 {
        self.pieces.iter().map(|p| p.slope.abs()).fold(0.0, f64::max)
    }
}

impl TryFrom<Vec<(f64, f64, f64)>> for PiecewiseAffine {
    type Error = Error;

    fn try_from(pieces: Vec<(f64, f64, f64)>) -> Result<Self> {
        PiecewiseAffine::new(pieces)
    }
}

impl From<PiecewiseAffine> for Vec<(f64, f64, f64)> {
    fn from(p: PiecewiseAffine) -> Self {
        p.pieces.iter().map(|q| (q.start, q.slope, q.intercept)).collect()
    }
}
