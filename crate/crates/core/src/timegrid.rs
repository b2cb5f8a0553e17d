use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sample times, either uniform `t_i = t0 + i·dt` or an explicit list.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum TimeGrid {
    Uniform { t0: f64, dt: f64, len: usize },
    Explicit(Vec<f64>),
}

impl TimeGrid {
    /// `steps + 1` points covering `[0, t_max]`. `t_max = 0` gives the single
    /// point `t = 0`.
    pub fn uniform(t_max: f64, steps: usize) -> Result<Self> {
        if !t_max.is_finite() || t_max < 0.0 {
            return Err(Error::NonMonotonicTimes);
        }
        if t_max == 0.0 {
            return Ok(Self::Uniform { t0: 0.0, dt: 0.0, len: 1 });
        }
        if steps == 0 {
            return Err(Error::EmptyTimeGrid);
        }
        Ok(Self::Uniform { t0: 0.0, dt: t_max / steps as f64, len: steps + 1 })
    }

    pub fn from_times(times: Vec<f64>) -> Result<Self> {
        if times.is_empty() {
            return Err(Error::EmptyTimeGrid);
        }
        if times.iter().any(|t| !t.is_finite()) || times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::NonMonotonicTimes);
        }
        Ok(Self::Explicit(times))
    }

    pub fn len(&self) -> usize {
        match self {
            Self::Uniform { len, .. } => *len,
            Self::Explicit(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn at(&self, i: usize) -> f64 {
        match self {
            Self::Uniform { t0, dt, .. } => t0 + i as f64 * dt,
            Self::Explicit(v) => v[i],
        }
    }

    pub fn to_vec(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.at(i)).collect()
    }

    pub fn t_max(&self) -> f64 {
        self.at(self.len() - 1)
    }
}
