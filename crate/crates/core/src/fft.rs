//! FFT plumbing shared by the transforms: plans, quadrature-normalised
//! spectral axes, and line-wise application along one axis of a tensor.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::field::Axis;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

pub(crate) fn forward(n: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(n))
}

pub(crate) fn inverse(n: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(n))
}

/// Maps samples `g_j` at `x_j = a + j h` to
/// `h (2π)^{-1/2} Σ_j g_j e^{−i x_j ξ_k}` on `ξ_k = 2πk/(M h)`, `k = −M/2, …`,
/// where `M = pad · N`; only output indices in `keep` are produced.
#[derive(Clone)]
pub(crate) struct SpectralAxis {
    n: usize,
    m: usize,
    keep: (usize, usize),
    fft: Arc<dyn Fft<f64>>,
    factors: Vec<Complex64>,
    pub out_axis: Axis,
}

impl SpectralAxis {
    pub fn new(axis: &Axis, pad: usize, limit: Option<f64>) -> Self {
        let m = axis.count * pad.max(1);
        let dxi = 2.0 * PI / (m as f64 * axis.step);
        let half = (m / 2) as i64;
        let xi = |idx: usize| (idx as i64 - half) as f64 * dxi;
        let keep = match limit {
            Some(l) => {
                let lo = (0..m).find(|&i| xi(i) >= -l - 1e-9 * dxi).unwrap_or(0);
                let hi = (0..m).rev().find(|&i| xi(i) <= l + 1e-9 * dxi).map_or(m, |i| i + 1);
                (lo, hi.max(lo + 1))
            }
            None => (0, m),
        };
        Self::with_keep(axis, pad, keep)
    }

    /// Keeps exactly `count` central frequencies, `k = −count/2, …, count/2 − 1`.
    pub fn centered(axis: &Axis, pad: usize, count: Option<usize>) -> Self {
        let m = axis.count * pad.max(1);
        let keep = match count {
            Some(c) => {
                let lo = (m / 2).saturating_sub(c / 2);
                (lo, (lo + c.max(1)).min(m))
            }
            None => (0, m),
        };
        Self::with_keep(axis, pad, keep)
    }

    fn with_keep(axis: &Axis, pad: usize, keep: (usize, usize)) -> Self {
        let n = axis.count;
        let m = n * pad.max(1);
        let dxi = 2.0 * PI / (m as f64 * axis.step);
        let half = (m / 2) as i64;
        let xi = |idx: usize| (idx as i64 - half) as f64 * dxi;
        let scale = axis.step / (2.0 * PI).sqrt();
        let factors = (keep.0..keep.1)
            .map(|i| Complex64::from_polar(scale, -axis.origin * xi(i)))
            .collect();
        Self {
            n,
            m,
            keep,
            fft: forward(m),
            factors,
            out_axis: Axis::line(xi(keep.0), dxi, keep.1 - keep.0),
        }
    }

    pub fn out_len(&self) -> usize {
        self.keep.1 - self.keep.0
    }

    /// `input` has `N` entries, `out` has `out_len()`; `buf` is scratch.
    pub fn apply(&self, input: &[Complex64], out: &mut [Complex64], buf: &mut Vec<Complex64>) {
        buf.clear();
        buf.extend_from_slice(&input[..self.n]);
        buf.resize(self.m, Complex64::new(0.0, 0.0));
        self.fft.process(buf);
        let half = self.m / 2;
        for (o, (i, f)) in out.iter_mut().zip((self.keep.0..self.keep.1).zip(&self.factors)) {
            // Output position i carries frequency index k = i − M/2, i.e. DFT bin k mod M.
            let bin = (i + self.m - half) % self.m;
            *o = buf[bin] * f;
        }
    }
}

/// Applies `line` to every 1-D line along `axis` of a row-major tensor,
/// replacing that axis length by `out_len`.
pub(crate) fn map_axis<F>(values: &[Complex64], shape: &[usize], axis: usize, out_len: usize, mut line: F) -> Vec<Complex64>
where
    F: FnMut(&[Complex64], &mut [Complex64]),
{
    let n = shape[axis];
    let inner: usize = shape[axis + 1..].iter().product();
    let outer: usize = shape[..axis].iter().product();
    let mut out = vec![Complex64::new(0.0, 0.0); outer * out_len * inner];
    let mut src = vec![Complex64::new(0.0, 0.0); n];
    let mut dst = vec![Complex64::new(0.0, 0.0); out_len];
    for o in 0..outer {
        for i in 0..inner {
            for (j, s) in src.iter_mut().enumerate() {
                *s = values[(o * n + j) * inner + i];
            }
            line(&src, &mut dst);
            for (j, d) in dst.iter().enumerate() {
                out[(o * out_len + j) * inner + i] = *d;
            }
        }
    }
    out
}

/// Multi-axis spectral transform; `specs[k]` acts on axis `k`.
pub(crate) fn spectral_nd(values: &[Complex64], shape: &[usize], specs: &[SpectralAxis]) -> Vec<Complex64> {
    let mut cur = values.to_vec();
    let mut shape = shape.to_vec();
    let mut buf = Vec::new();
    for (k, spec) in specs.iter().enumerate() {
        let out_len = spec.out_len();
        cur = map_axis(&cur, &shape, k, out_len, |src, dst| spec.apply(src, dst, &mut buf));
        shape[k] = out_len;
    }
    cur
}
