use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Uniform angle grid in degrees, endpoints included when they land on a step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngleGrid<T: Real> {
    pub start: T,
    pub stop: T,
    pub step: T,
}

impl<T: Real> AngleGrid<T> {
    pub fn new(start: T, stop: T, step: T) -> Result<Self> {
        let g = Self { start, stop, step };
        g.validate()?;
        Ok(g)
    }

    /// `[-90°, 90°]` at 0.05°.
    pub fn music_default() -> Self {
        Self { start: T::lit(-90.0), stop: T::lit(90.0), step: T::lit(0.05) }
    }

    /// `[-90°, 90°]` at 1°, the coarse dictionary grid.
    pub fn baseline_default() -> Self {
        Self { start: T::lit(-90.0), stop: T::lit(90.0), step: T::one() }
    }

    pub fn validate(&self) -> Result<()> {
        let limit = T::lit(90.0);
        if !(self.start.is_finite() && self.stop.is_finite() && self.step.is_finite()) {
            return Err(Error::Parameter("grid bounds must be finite".into()));
        }
        if !(self.start < self.stop) {
            return Err(Error::Parameter(format!("grid start {} must be below stop {}", self.start, self.stop)));
        }
        if !(self.step > T::zero()) {
            return Err(Error::Parameter(format!("grid step must be positive, got {}", self.step)));
        }
        if self.start < -limit || self.stop > limit {
            return Err(Error::Domain(format!("grid [{}, {}] leaves [-90°, 90°]", self.start, self.stop)));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        let span = (self.stop - self.start) / self.step;
        // Tolerate round-off so that e.g. 180/0.05 keeps its last point.
        (span + T::lit(1e-9)).floor().to_usize().unwrap_or(0) + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn angle(&self, i: usize) -> T {
        self.start + self.step * T::from_count(i)
    }

    pub fn angles(&self) -> Vec<T> {
        (0..self.len()).map(|i| self.angle(i)).collect()
    }

    /// Index of the grid point nearest `theta`, clamped to the grid.
    pub fn nearest_index(&self, theta: T) -> usize {
        let pos = ((theta - self.start) / self.step).round();
        if pos <= T::zero() {
            return 0;
        }
        pos.to_usize().unwrap_or(usize::MAX).min(self.len() - 1)
    }
}
