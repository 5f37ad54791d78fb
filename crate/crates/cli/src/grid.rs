//! Parameter grids: either an explicit list or an evenly spaced range.

use serde::{Deserialize, Serialize};

use crate::UsageError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stop: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
}

impl Grid {
    pub fn linspace(start: f64, stop: f64, points: usize) -> Self {
        Self {
            start: Some(start),
            stop: Some(stop),
            points: Some(points),
            values: None,
        }
    }

    pub fn values(values: Vec<f64>) -> Self {
        Self {
            values: Some(values),
            ..Self::default()
        }
    }

    /// Expands the grid, rejecting empty, reversed or non-finite specs.
    pub fn resolve(&self, name: &str) -> Result<Vec<f64>, UsageError> {
        let out = match (&self.values, self.start, self.stop, self.points) {
            (Some(v), None, None, None) => v.clone(),
            (None, Some(start), Some(stop), Some(points)) => {
                if points == 0 {
                    return Err(UsageError::new(format!("grid {name}: points must be >= 1")));
                }
                if start > stop {
                    return Err(UsageError::new(format!(
                        "grid {name}: start {start} must not exceed stop {stop}"
                    )));
                }
                linspace(start, stop, points)
            }
            _ => {
                return Err(UsageError::new(format!(
                    "grid {name}: give either `values` or all of `start`, `stop`, `points`"
                )))
            }
        };
        if out.is_empty() {
            return Err(UsageError::new(format!("grid {name} is empty")));
        }
        if out.iter().any(|x| !x.is_finite()) {
            return Err(UsageError::new(format!(
                "grid {name} has non-finite values"
            )));
        }
        Ok(out)
    }

    /// Like [`Grid::resolve`] but additionally restricted to `[lo, hi]`.
    pub fn resolve_within(&self, name: &str, lo: f64, hi: f64) -> Result<Vec<f64>, UsageError> {
        let v = self.resolve(name)?;
        if let Some(x) = v.iter().find(|x| **x < lo || **x > hi) {
            return Err(UsageError::new(format!(
                "grid {name}: value {x} outside [{lo}, {hi}]"
            )));
        }
        Ok(v)
    }
}

pub fn linspace(start: f64, stop: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![start];
    }
    let span = stop - start;
    (0..points)
        .map(|i| {
            if i == points - 1 {
                stop
            } else {
                start + span * (i as f64 / (points - 1) as f64)
            }
        })
        .collect()
}
