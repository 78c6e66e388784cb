//! Short-time Fourier transform
//! `V_φf(x,ξ) = (2π)^{-d/2} ∫ f(y) conj(φ(y−x)) e^{−i⟨y,ξ⟩} dy`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft::{spectral_nd, SpectralAxis};
use crate::field::{Axis, AxisKind, SampledField, Window};

/// Largest admissible fraction of `‖φ‖₂` outside the sampling box.
pub const WINDOW_MASS_LIMIT: f64 = 1e-10;

/// Grid controls for [`stft_with`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StftOptions {
    /// Keep every `x_stride`-th sample of the input grid as an `x` point.
    pub x_stride: usize,
    /// Restrict `x` to the half-open box `[lo, hi)`.
    pub x_range: Option<(Vec<f64>, Vec<f64>)>,
    /// Keep only `|ξ_k| ≤ xi_limit` on every frequency axis.
    pub xi_limit: Option<f64>,
    /// Zero-padding factor; the frequency step is `2π/(pad·N·h)`.
    pub pad: usize,
}

impl Default for StftOptions {
    fn default() -> Self {
        Self { x_stride: 1, x_range: None, xi_limit: None, pad: 1 }
    }
}

pub fn stft(f: &SampledField, phi: &Window) -> Result<SampledField> {
    stft_with(f, phi, &StftOptions::default())
}

/// Checks that `φ` fits the box of `f`'s grid.
pub(crate) fn check_window_fits(axes: &[Axis], phi: &Window) -> Result<()> {
    let half: Vec<f64> = axes.iter().map(|a| 0.5 * a.length()).collect();
    let mass = phi.outside_mass(&half);
    if mass > WINDOW_MASS_LIMIT {
        return Err(Error::WindowTooWide { mass });
    }
    Ok(())
}

fn selected_indices(axis: &Axis, range: Option<(f64, f64)>, stride: usize) -> Vec<usize> {
    (0..axis.count)
        .filter(|&i| match range {
            Some((lo, hi)) => {
                let x = axis.coord(i);
                let tol = 1e-9 * axis.step;
                x >= lo - tol && x < hi - tol
            }
            None => true,
        })
        .step_by(stride.max(1))
        .collect()
}

/// STFT with explicit grid controls. Output axes are the selected `x` axes
/// followed by the frequency axes.
pub fn stft_with(f: &SampledField, phi: &Window, opts: &StftOptions) -> Result<SampledField> {
    let d = f.dim();
    if phi.dim() != d {
        return Err(Error::DimensionMismatch(format!("window of dimension {} for a {d}-d signal", phi.dim())));
    }
    if f.basis().is_some_and(|b| !b.is_standard()) {
        return Err(Error::GridMismatch("stft expects standard coordinates".into()));
    }
    if f.axes().iter().any(|a| a.kind != AxisKind::Line) {
        return Err(Error::InvalidParameter("stft expects line-segment axes".into()));
    }
    check_window_fits(f.axes(), phi)?;
    if let Some((lo, hi)) = &opts.x_range {
        if lo.len() != d || hi.len() != d {
            return Err(Error::DimensionMismatch("x_range bounds".into()));
        }
    }
    let picks: Vec<Vec<usize>> = (0..d)
        .map(|k| {
            let range = opts.x_range.as_ref().map(|(lo, hi)| (lo[k], hi[k]));
            selected_indices(f.axis(k), range, opts.x_stride)
        })
        .collect();
    if picks.iter().any(Vec::is_empty) {
        return Err(Error::InvalidParameter("x_range selects no grid points".into()));
    }
    let x_axes: Vec<Axis> = picks
        .iter()
        .enumerate()
        .map(|(k, p)| {
            let a = f.axis(k);
            let step = if p.len() > 1 { (p[1] - p[0]) as f64 * a.step } else { a.step };
            Axis::line(a.coord(p[0]), step, p.len())
        })
        .collect();
    let specs: Vec<SpectralAxis> = f.axes().iter().map(|a| SpectralAxis::new(a, opts.pad, opts.xi_limit)).collect();
    let xi_axes: Vec<Axis> = specs.iter().map(|s| s.out_axis).collect();
    let block: usize = xi_axes.iter().map(|a| a.count).product();
    let n_x: usize = picks.iter().map(Vec::len).product();
    let shape = f.shape();

    let rows: Vec<Vec<Complex64>> = (0..n_x)
        .into_par_iter()
        .map(|ix| {
            // Multi-index of this x point among the picks.
            let mut rem = ix;
            let mut xpt = vec![0.0; d];
            for k in (0..d).rev() {
                let n = picks[k].len();
                xpt[k] = f.axis(k).coord(picks[k][rem % n]);
                rem /= n;
            }
            // conj(φ(y − x)) factorises over axes.
            let factors: Vec<Vec<Complex64>> = (0..d)
                .map(|k| {
                    let a = f.axis(k);
                    (0..a.count).map(|j| phi.eval_axis(k, a.coord(j) - xpt[k]).conj()).collect()
                })
                .collect();
            let g: Vec<Complex64> = f
                .values()
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    let mut w = *v;
                    let mut rem = i;
                    for k in (0..d).rev() {
                        w *= factors[k][rem % shape[k]];
                        rem /= shape[k];
                    }
                    w
                })
                .collect();
            spectral_nd(&g, &shape, &specs)
        })
        .collect();
    let mut values = Vec::with_capacity(n_x * block);
    for r in rows {
        values.extend(r);
    }
    SampledField::new(x_axes.into_iter().chain(xi_axes).collect(), values)
}
