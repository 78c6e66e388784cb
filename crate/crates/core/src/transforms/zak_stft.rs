//! Short-time Fourier transforms of Zak transforms on ℝ (d = 1).
//!
//! The Zak transform is computed once on the first cell and extended through
//! its quasi-periodicity, so every STFT integral can run over as many cells as
//! the window needs. Grids are aligned so that the lattice shifts `k ∈ Λ_E`,
//! `κ ∈ Λ'_E` move every sample onto another sample.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft::{spectral_nd, SpectralAxis};
use crate::field::{Axis, Exponent, SampledField, Weight, Window};
use crate::geometry::OrderedBasis;

use super::stft::check_window_fits;
use super::zak::{zak_with, ZakField, ZakOptions};

/// Grid controls shared by the partial and full transforms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ZakStftOptions {
    /// Samples per cell in `x`; must divide the input's samples per cell.
    pub x_per_cell: Option<usize>,
    /// Samples per cell in `ξ`.
    pub xi_per_cell: usize,
    /// Output cells in `x` and `ξ`.
    pub x_cells: usize,
    pub xi_cells: usize,
    /// Keep every `stride`-th output sample in `x` and `ξ`.
    pub x_stride: usize,
    pub xi_stride: usize,
    /// Cells spanned by the integration patch in the `x` and `ξ` directions.
    pub x_window_cells: usize,
    pub xi_window_cells: usize,
    /// Number of central frequency samples kept along `η` and `y`.
    pub eta_crop: Option<usize>,
    pub y_crop: Option<usize>,
}

impl Default for ZakStftOptions {
    fn default() -> Self {
        Self {
            x_per_cell: Some(16),
            xi_per_cell: 32,
            x_cells: 1,
            xi_cells: 1,
            x_stride: 1,
            xi_stride: 1,
            x_window_cells: 16,
            xi_window_cells: 8,
            eta_crop: None,
            y_crop: None,
        }
    }
}

/// Output of [`stft_of_zak`] with the grid facts the echo identities need.
#[derive(Clone, Debug, PartialEq)]
pub struct ZakStftField {
    /// Axes `x, ξ, η, y` in standard coordinates.
    pub field: SampledField,
    pub basis: OrderedBasis,
    /// Output samples per lattice period along `x`, `ξ` and `y`.
    pub x_per_cell: usize,
    pub xi_per_cell: usize,
    pub y_per_cell: usize,
}

impl ZakStftField {
    pub fn with_values(&self, values: Vec<Complex64>) -> Result<Self> {
        Ok(Self { field: self.field.with_values(values)?, ..self.clone() })
    }
}

struct Setup {
    zak: ZakField,
    e: f64,
    s: usize,
    p: usize,
}

fn setup(f: &SampledField, basis: &OrderedBasis, opts: &ZakStftOptions) -> Result<Setup> {
    if basis.dim() != 1 || f.dim() != 1 {
        return Err(Error::UnsupportedDimension(format!(
            "Zak-STFT compositions are implemented for d = 1, got d = {}",
            basis.dim()
        )));
    }
    let e = basis.column(0)[0];
    if e <= 0.0 {
        return Err(Error::UnsupportedDimension("the basis vector must be positive".into()));
    }
    for (name, v) in [
        ("xi_per_cell", opts.xi_per_cell),
        ("x_cells", opts.x_cells),
        ("xi_cells", opts.xi_cells),
        ("x_stride", opts.x_stride),
        ("xi_stride", opts.xi_stride),
        ("x_window_cells", opts.x_window_cells),
        ("xi_window_cells", opts.xi_window_cells),
    ] {
        if v == 0 {
            return Err(Error::InvalidParameter(format!("{name} must be positive")));
        }
    }
    let zak = zak_with(
        f,
        basis,
        &ZakOptions {
            x_cells: 1,
            xi_cells: 1,
            x_per_cell: opts.x_per_cell,
            xi_per_cell: Some(opts.xi_per_cell),
        },
    )?;
    let s = zak.x_per_cell;
    let p = zak.xi_per_cell;
    if s % opts.x_stride != 0 || p % opts.xi_stride != 0 {
        return Err(Error::GridMismatch("strides must divide the samples per cell".into()));
    }
    Ok(Setup { zak, e, s, p })
}

impl Setup {
    fn e_dual(&self) -> f64 {
        2.0 * PI / self.e
    }

    fn x_axis(&self, opts: &ZakStftOptions) -> Axis {
        Axis::line(0.0, self.e * opts.x_stride as f64 / self.s as f64, opts.x_cells * self.s / opts.x_stride)
    }

    fn xi_axis(&self, opts: &ZakStftOptions) -> Axis {
        Axis::line(0.0, self.e_dual() * opts.xi_stride as f64 / self.p as f64, opts.xi_cells * self.p / opts.xi_stride)
    }

    /// Patch along `x`: sample indices and the standard-coordinate axis.
    fn x_patch(&self, ix: i64, cells: usize) -> (i64, Axis) {
        let n = cells * self.s;
        let start = ix - (n / 2) as i64;
        (start, Axis::line(start as f64 * self.e / self.s as f64, self.e / self.s as f64, n))
    }

    fn xi_patch(&self, iw: i64, cells: usize) -> (i64, Axis) {
        let n = cells * self.p;
        let start = iw - (n / 2) as i64;
        let step = self.e_dual() / self.p as f64;
        (start, Axis::line(start as f64 * step, step, n))
    }
}

/// `which = 1`: `V_φ(Z_Ef(·,ξ))(x,η)`; `which = 2`: `V_φ(Z_Ef(x,·))(ξ,y)`.
/// Output axes are `x, ξ, η` respectively `x, ξ, y`.
pub fn partial_stft_zak(
    f: &SampledField,
    basis: &OrderedBasis,
    phi: &Window,
    which: u8,
    opts: &ZakStftOptions,
) -> Result<SampledField> {
    if phi.dim() != 1 {
        return Err(Error::DimensionMismatch("partial transforms need a 1-d window".into()));
    }
    let st = setup(f, basis, opts)?;
    let x_axis = st.x_axis(opts);
    let xi_axis = st.xi_axis(opts);
    let n_x = x_axis.count;
    let n_xi = xi_axis.count;
    let (freq_axis, rows): (Axis, Vec<Vec<Complex64>>) = match which {
        1 => {
            let (_, probe) = st.x_patch(0, opts.x_window_cells);
            check_window_fits(&[probe], phi)?;
            let crop = opts.eta_crop;
            let out_axis = SpectralAxis::centered(&probe, 1, crop).out_axis;
            let rows = (0..n_x * n_xi)
                .into_par_iter()
                .map(|i| {
                    let ix = (i / n_xi * opts.x_stride) as i64;
                    let iw = (i % n_xi * opts.xi_stride) as i64;
                    let (start, patch) = st.x_patch(ix, opts.x_window_cells);
                    let x = ix as f64 * st.e / st.s as f64;
                    let g: Vec<Complex64> = (0..patch.count)
                        .map(|j| st.zak.extended(start + j as i64, iw) * phi.eval_axis(0, patch.coord(j) - x).conj())
                        .collect();
                    let spec = SpectralAxis::centered(&patch, 1, crop);
                    spectral_nd(&g, &[patch.count], &[spec])
                })
                .collect();
            (out_axis, rows)
        }
        2 => {
            let (_, probe) = st.xi_patch(0, opts.xi_window_cells);
            check_window_fits(&[probe], phi)?;
            let crop = opts.y_crop;
            let out_axis = SpectralAxis::centered(&probe, 1, crop).out_axis;
            let rows = (0..n_x * n_xi)
                .into_par_iter()
                .map(|i| {
                    let ix = (i / n_xi * opts.x_stride) as i64;
                    let iw = (i % n_xi * opts.xi_stride) as i64;
                    let (start, patch) = st.xi_patch(iw, opts.xi_window_cells);
                    let xi = iw as f64 * st.e_dual() / st.p as f64;
                    let g: Vec<Complex64> = (0..patch.count)
                        .map(|j| st.zak.extended(ix, start + j as i64) * phi.eval_axis(0, patch.coord(j) - xi).conj())
                        .collect();
                    let spec = SpectralAxis::centered(&patch, 1, crop);
                    spectral_nd(&g, &[patch.count], &[spec])
                })
                .collect();
            (out_axis, rows)
        }
        other => return Err(Error::InvalidParameter(format!("which must be 1 or 2, got {other}"))),
    };
    let mut values = Vec::with_capacity(n_x * n_xi * freq_axis.count);
    for r in rows {
        values.extend(r);
    }
    SampledField::new(vec![x_axis, xi_axis, freq_axis], values)
}

/// Per-point 2-D transform of the extended Zak transform; returns the
/// frequency axes and a closure producing the values for `(ix, iw)`.
fn full_patch_transform<'a>(
    st: &'a Setup,
    phi: &'a Window,
    opts: &'a ZakStftOptions,
    crops: (Option<usize>, Option<usize>),
) -> Result<((Axis, Axis), impl Fn(i64, i64) -> Vec<Complex64> + Sync + 'a)> {
    if phi.dim() != 2 {
        return Err(Error::DimensionMismatch("the phase-space window must be 2-d".into()));
    }
    let (_, px) = st.x_patch(0, opts.x_window_cells);
    let (_, pw) = st.xi_patch(0, opts.xi_window_cells);
    check_window_fits(&[px, pw], phi)?;
    let eta_axis = SpectralAxis::centered(&px, 1, crops.0).out_axis;
    let y_axis = SpectralAxis::centered(&pw, 1, crops.1).out_axis;
    let run = move |ix: i64, iw: i64| {
        let (sx, patch_x) = st.x_patch(ix, opts.x_window_cells);
        let (sw, patch_w) = st.xi_patch(iw, opts.xi_window_cells);
        let x = ix as f64 * st.e / st.s as f64;
        let xi = iw as f64 * st.e_dual() / st.p as f64;
        let wx: Vec<Complex64> = (0..patch_x.count).map(|j| phi.eval_axis(0, patch_x.coord(j) - x).conj()).collect();
        let ww: Vec<Complex64> = (0..patch_w.count).map(|j| phi.eval_axis(1, patch_w.coord(j) - xi).conj()).collect();
        let mut g = Vec::with_capacity(patch_x.count * patch_w.count);
        for (a, fa) in wx.iter().enumerate() {
            for (b, fb) in ww.iter().enumerate() {
                g.push(st.zak.extended(sx + a as i64, sw + b as i64) * fa * fb);
            }
        }
        let specs = [SpectralAxis::centered(&patch_x, 1, crops.0), SpectralAxis::centered(&patch_w, 1, crops.1)];
        spectral_nd(&g, &[patch_x.count, patch_w.count], &specs)
    };
    Ok(((eta_axis, y_axis), run))
}

/// `V_Φ(Z_Ef)(x,ξ,η,y)` on `x_cells × xi_cells` cells of `κ(E) × κ(E')`.
pub fn stft_of_zak(f: &SampledField, basis: &OrderedBasis, phi: &Window, opts: &ZakStftOptions) -> Result<ZakStftField> {
    let st = setup(f, basis, opts)?;
    let ((eta_axis, y_axis), run) = full_patch_transform(&st, phi, opts, (opts.eta_crop, opts.y_crop))?;
    let x_axis = st.x_axis(opts);
    let xi_axis = st.xi_axis(opts);
    let (n_x, n_xi) = (x_axis.count, xi_axis.count);
    let rows: Vec<Vec<Complex64>> = (0..n_x * n_xi)
        .into_par_iter()
        .map(|i| run((i / n_xi * opts.x_stride) as i64, (i % n_xi * opts.xi_stride) as i64))
        .collect();
    let mut values = Vec::with_capacity(rows.len() * eta_axis.count * y_axis.count);
    for r in rows {
        values.extend(r);
    }
    let field = SampledField::new(vec![x_axis, xi_axis, eta_axis, y_axis], values)?;
    Ok(ZakStftField {
        field,
        basis: basis.clone(),
        x_per_cell: st.s / opts.x_stride,
        xi_per_cell: st.p / opts.xi_stride,
        y_per_cell: opts.xi_window_cells,
    })
}

/// `H(x,ξ) = ‖V_Φ(Z_Ef)(x,ξ,·,·) ω(x,ξ,·,·)‖_{L^p(ℝ²)}` for each requested
/// exponent, with `ω(x,ξ,η,y) = ω₀(x − y, η)`. The `(η, y)` transform is reduced
/// immediately, so no 4-axis array is stored.
pub fn zak_stft_norms(
    f: &SampledField,
    basis: &OrderedBasis,
    phi: &Window,
    opts: &ZakStftOptions,
    exponents: &[Exponent],
    omega0: Option<&Weight>,
) -> Result<Vec<SampledField>> {
    let st = setup(f, basis, opts)?;
    let ((eta_axis, y_axis), run) = full_patch_transform(&st, phi, opts, (None, None))?;
    let x_axis = st.x_axis(opts);
    let xi_axis = st.xi_axis(opts);
    let (n_x, n_xi) = (x_axis.count, xi_axis.count);
    let cell = eta_axis.step * y_axis.step;
    let rows: Vec<Vec<f64>> = (0..n_x * n_xi)
        .into_par_iter()
        .map(|i| {
            let ix = (i / n_xi * opts.x_stride) as i64;
            let iw = (i % n_xi * opts.xi_stride) as i64;
            let x = ix as f64 * st.e / st.s as f64;
            let vals = run(ix, iw);
            let mags: Vec<f64> = match omega0 {
                None => vals.iter().map(|v| v.norm()).collect(),
                Some(w) => vals
                    .iter()
                    .enumerate()
                    .map(|(j, v)| {
                        let eta = eta_axis.coord(j / y_axis.count);
                        let y = y_axis.coord(j % y_axis.count);
                        v.norm() * w.eval(&[x - y, eta])
                    })
                    .collect(),
            };
            exponents
                .iter()
                .map(|p| match p {
                    Exponent::Infinite => mags.iter().copied().fold(0.0, f64::max),
                    Exponent::Finite(q) => (mags.iter().map(|m| m.powf(*q)).sum::<f64>() * cell).powf(1.0 / q),
                })
                .collect()
        })
        .collect();
    exponents
        .iter()
        .enumerate()
        .map(|(k, _)| {
            let values = rows.iter().map(|r| Complex64::new(r[k], 0.0)).collect();
            SampledField::new(vec![x_axis, xi_axis], values)
        })
        .collect()
}
