//! Axis-by-axis reductions of nonnegative arrays.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{Axis, Exponent};

/// Below this many output entries the reduction runs serially.
const PAR_THRESHOLD: usize = 1 << 12;

/// A row-major array of magnitudes.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Mags {
    pub values: Vec<f64>,
    pub shape: Vec<usize>,
}

/// Contiguous index ranges of the half-open cells `[j, j+1)` met by a
/// coordinate axis, with their cell labels `j`.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct CellSplit {
    pub labels: Vec<i64>,
    pub ranges: Vec<(usize, usize)>,
}

/// Minimum samples per cell along each axis of a Wiener reduction.
pub const MIN_CELL_SAMPLES: usize = 4;

pub(crate) fn cell_split(axis: &Axis) -> Result<CellSplit> {
    let per = 1.0 / axis.step;
    if per + 1e-9 < MIN_CELL_SAMPLES as f64 {
        return Err(Error::GridMismatch(format!(
            "cells hold {per:.3} samples per axis, at least {MIN_CELL_SAMPLES} are needed"
        )));
    }
    let tol = 1e-9 * axis.step;
    let mut labels = Vec::new();
    let mut ranges: Vec<(usize, usize)> = Vec::new();
    for i in 0..axis.count {
        let j = (axis.coord(i) + tol).floor() as i64;
        match labels.last() {
            Some(&last) if last == j => ranges.last_mut().expect("paired").1 = i + 1,
            _ => {
                labels.push(j);
                ranges.push((i, i + 1));
            }
        }
    }
    Ok(CellSplit { labels, ranges })
}

/// `(Σ v^q · step)^{1/q}` or `max v`, accumulated in the power domain.
fn fold<I: Iterator<Item = f64>>(it: I, q: Exponent, step: f64) -> f64 {
    match q {
        Exponent::Infinite => it.fold(0.0, f64::max),
        Exponent::Finite(p) => {
            let s: f64 = it.map(|v| if v == 0.0 { 0.0 } else { v.powf(p) }).sum();
            (s * step).powf(1.0 / p)
        }
    }
}

impl Mags {
    pub fn new(values: Vec<f64>, shape: Vec<usize>) -> Self {
        debug_assert_eq!(values.len(), shape.iter().product::<usize>());
        Self { values, shape }
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    fn split(&self, axis: usize) -> (usize, usize, usize) {
        let outer = self.shape[..axis].iter().product();
        let inner = self.shape[axis + 1..].iter().product();
        (outer, self.shape[axis], inner)
    }

    /// Replaces `axis` by `ranges.len()` entries, each the `L^q` norm of the
    /// corresponding index range with quadrature step `step`.
    pub fn reduce_ranges(&self, axis: usize, ranges: &[(usize, usize)], q: Exponent, step: f64) -> Self {
        let (outer, n, inner) = self.split(axis);
        let m = ranges.len();
        let one = |o: usize, c: usize, i: usize| {
            let (a, b) = ranges[c];
            fold((a..b).map(|j| self.values[(o * n + j) * inner + i]), q, step)
        };
        let total = outer * m * inner;
        let values: Vec<f64> = if total >= PAR_THRESHOLD {
            (0..total).into_par_iter().map(|t| one(t / (m * inner), (t / inner) % m, t % inner)).collect()
        } else {
            (0..total).map(|t| one(t / (m * inner), (t / inner) % m, t % inner)).collect()
        };
        let mut shape = self.shape.clone();
        shape[axis] = m;
        Self { values, shape }
    }

    /// Removes `axis` by an `L^q` reduction.
    pub fn reduce_axis(&self, axis: usize, q: Exponent, step: f64) -> Self {
        let mut out = self.reduce_ranges(axis, &[(0, self.shape[axis])], q, step);
        out.shape.remove(axis);
        out
    }

    /// Keeps indices `lo..hi` of `axis`.
    pub fn crop(&self, axis: usize, lo: usize, hi: usize) -> Self {
        let (outer, n, inner) = self.split(axis);
        let mut values = Vec::with_capacity(outer * (hi - lo) * inner);
        for o in 0..outer {
            values.extend_from_slice(&self.values[(o * n + lo) * inner..(o * n + hi) * inner]);
        }
        let mut shape = self.shape.clone();
        shape[axis] = hi - lo;
        Self { values, shape }
    }

    /// Reduces axes `first..first+q.len()` in order, innermost (`first`) first.
    pub fn reduce_block(mut self, first: usize, q: &[Exponent], steps: &[f64]) -> Self {
        for (k, p) in q.iter().enumerate() {
            self = self.reduce_axis(first, *p, steps[k]);
        }
        self
    }

    /// Full reduction to a scalar. The array is rescaled by its maximum first
    /// so that small exponents neither overflow nor underflow.
    pub fn norm(self, q: &[Exponent], steps: &[f64]) -> f64 {
        assert_eq!(q.len(), self.shape.len());
        let m = self.max();
        if m == 0.0 || !m.is_finite() {
            return m;
        }
        let scaled = Self { values: self.values.iter().map(|v| v / m).collect(), shape: self.shape };
        let out = scaled.reduce_block(0, q, steps);
        out.values[0] * m
    }
}
