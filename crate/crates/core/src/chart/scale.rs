//! Position/domain mappings.

use serde::{Deserialize, Serialize};

use super::ChartError;

/// Affine map from a data domain onto a screen range. The range may be
/// reversed (vertical axes grow upward).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearScale {
    pub domain: [f64; 2],
    pub range: [f64; 2],
}

impl LinearScale {
    pub fn new(domain: [f64; 2], range: [f64; 2]) -> Self {
        Self { domain, range }
    }

    pub fn span(&self) -> f64 {
        self.domain[1] - self.domain[0]
    }

    pub fn apply(&self, v: f64) -> f64 {
        let [d0, d1] = self.domain;
        let [r0, r1] = self.range;
        r0 + (v - d0) / (d1 - d0) * (r1 - r0)
    }

    pub fn invert(&self, p: f64) -> f64 {
        let [d0, d1] = self.domain;
        let [r0, r1] = self.range;
        d0 + (p - r0) / (r1 - r0) * (d1 - d0)
    }
}

/// Evenly spaced bands over a screen range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandScale {
    pub bands: usize,
    pub range: [f64; 2],
}

impl BandScale {
    pub fn step(&self) -> f64 {
        (self.range[1] - self.range[0]) / self.bands.max(1) as f64
    }

    pub fn center(&self, i: usize) -> f64 {
        self.range[0] + (i as f64 + 0.5) * self.step()
    }

    /// Band whose center is nearest to `p`.
    pub fn nearest(&self, p: f64) -> usize {
        if self.bands == 0 {
            return 0;
        }
        let raw = ((p - self.range[0]) / self.step()).floor();
        raw.clamp(0.0, (self.bands - 1) as f64) as usize
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Scale {
    Continuous(LinearScale),
    Band(BandScale),
}

impl Scale {
    /// Screen position of a data value (band index for band scales).
    pub fn apply(&self, v: f64) -> f64 {
        match self {
            Scale::Continuous(s) => s.apply(v),
            Scale::Band(b) => b.center(v.max(0.0) as usize),
        }
    }

    pub fn invert(&self, p: f64) -> Result<f64, ChartError> {
        match self {
            Scale::Continuous(s) => Ok(s.invert(p)),
            Scale::Band(_) => Err(ChartError::NonInvertibleScale),
        }
    }

    pub fn as_linear(&self) -> Option<&LinearScale> {
        match self {
            Scale::Continuous(s) => Some(s),
            Scale::Band(_) => None,
        }
    }
}

/// Index of the value in sorted `xs` nearest to `v`; equidistant
/// neighbours resolve to the larger value. `None` for empty input.
pub fn nearest_index(xs: &[f64], v: f64) -> Option<usize> {
    if xs.is_empty() {
        return None;
    }
    let hi = xs.partition_point(|&x| x < v);
    if hi == 0 {
        return Some(0);
    }
    if hi == xs.len() {
        return Some(xs.len() - 1);
    }
    let lo = hi - 1;
    if (xs[hi] - v).abs() <= (v - xs[lo]).abs() {
        Some(hi)
    } else {
        Some(lo)
    }
}
