//! Characterisations of `L^p` and `M^p` through STFTs of Zak transforms (d = 1).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Exponent, MixedExponent, SampledField, Weight, Window};
use crate::geometry::OrderedBasis;
use crate::norms::{mixed_lebesgue_norm, modulation_norm, Domain, ModKind};
use crate::transforms::{partial_stft_zak, zak_stft_norms, StftOptions, ZakStftOptions};

use super::equivalence::{family_rows, Level, Sampling};
use super::family::SignalFamily;
use super::report::{EquivalenceReport, RatioRow};

/// Sampling plus the Zak-STFT grid at each resolution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZakGrid {
    pub sampling: Sampling,
    pub coarse: ZakStftOptions,
    pub fine: ZakStftOptions,
    /// STFT options for the direct `M^p` side.
    #[serde(default)]
    pub stft: StftOptions,
}

impl ZakGrid {
    fn opts(&self, level: Level) -> &ZakStftOptions {
        match level {
            Level::Coarse => &self.coarse,
            Level::Fine => &self.fine,
        }
    }

    /// Grid for the `L^p` characterisation: inputs at steps `2⁻⁵`, `2⁻⁶`.
    pub fn lebesgue_default() -> Self {
        let base = ZakStftOptions::default();
        Self {
            sampling: Sampling { lo: -16.0, hi: 16.0, coarse: 1.0 / 32.0, fine: 1.0 / 64.0 },
            coarse: ZakStftOptions { x_per_cell: Some(16), xi_per_cell: 32, ..base.clone() },
            fine: ZakStftOptions { x_per_cell: Some(32), xi_per_cell: 64, ..base },
            stft: StftOptions::default(),
        }
    }

    /// Grid for the `M^p` characterisation.
    pub fn modulation_default() -> Self {
        let base = ZakStftOptions::default();
        Self {
            sampling: Sampling { lo: -16.0, hi: 16.0, coarse: 1.0 / 16.0, fine: 1.0 / 32.0 },
            coarse: ZakStftOptions { x_per_cell: Some(8), xi_per_cell: 16, ..base.clone() },
            fine: ZakStftOptions { x_per_cell: Some(16), xi_per_cell: 32, ..base },
            stft: StftOptions { x_stride: 2, ..Default::default() },
        }
    }
}

fn scalar_basis(basis: &OrderedBasis) -> Result<f64> {
    if basis.dim() != 1 {
        return Err(Error::UnsupportedDimension(format!("Zak characterisations are implemented for d = 1, got d = {}", basis.dim())));
    }
    let e = basis.column(0)[0];
    if e <= 0.0 {
        return Err(Error::UnsupportedDimension("the basis vector must be positive".into()));
    }
    Ok(e)
}

fn lp(values: impl Iterator<Item = f64>, p: Exponent, step: f64) -> f64 {
    match p {
        Exponent::Infinite => values.fold(0.0, f64::max),
        Exponent::Finite(q) => {
            let v: Vec<f64> = values.collect();
            let m = v.iter().copied().fold(0.0, f64::max);
            if m == 0.0 {
                return 0.0;
            }
            m * (v.iter().map(|x| (x / m).powf(q)).sum::<f64>() * step).powf(1.0 / q)
        }
    }
}

/// `‖G‖_{L^p(κ(E)×ℝ)}` with `G(x,y) = ‖V_φ(Z_Ef(x,·))(·,y) ω(−y)‖_{L^r(κ(E'))}`.
pub fn zak_lebesgue_side(
    f: &SampledField,
    basis: &OrderedBasis,
    p: Exponent,
    r: Exponent,
    omega: &Weight,
    opts: &ZakStftOptions,
) -> Result<f64> {
    scalar_basis(basis)?;
    let opts = ZakStftOptions { x_cells: 1, xi_cells: 1, ..opts.clone() };
    let v = partial_stft_zak(f, basis, &Window::standard(1), 2, &opts)?;
    let (nx, nw, ny) = (v.axis(0).count, v.axis(1).count, v.axis(2).count);
    let (dx, dw, dy) = (v.axis(0).step, v.axis(1).step, v.axis(2).step);
    let wy: Vec<f64> = (0..ny).map(|k| omega.eval(&[-v.axis(2).coord(k)])).collect();
    let vals = v.values();
    let mut g = Vec::with_capacity(nx * ny);
    for a in 0..nx {
        for c in 0..ny {
            g.push(lp((0..nw).map(|b| vals[(a * nw + b) * ny + c].norm() * wy[c]), r, dw));
        }
    }
    Ok(lp(g.into_iter(), p, dx * dy))
}

/// Compares `‖f‖_{L^p_ω}` with the Zak-side norm over the family.
#[allow(clippy::too_many_arguments)]
pub fn check_zak_lebesgue(
    family: &SignalFamily,
    basis: &OrderedBasis,
    p: f64,
    r: f64,
    omega: &Weight,
    grid: &ZakGrid,
    spread_bound: f64,
) -> Result<EquivalenceReport> {
    scalar_basis(basis)?;
    let (pe, re) = (Exponent::new(p)?, Exponent::new(r)?);
    let signals = family.signals()?;
    let rows = family_rows(&signals, |s, level| {
        let f = grid.sampling.sample(s, level)?;
        let a = mixed_lebesgue_norm(&f, &OrderedBasis::standard(1), &MixedExponent::from(pe), omega, &Domain::Full)?.value;
        let b = zak_lebesgue_side(&f, basis, pe, re, omega, grid.opts(level))?;
        Ok((a, b))
    })?;
    Ok(EquivalenceReport::from_rows(
        format!("zak-lebesgue-p{p}-r{r}"),
        format!("‖f‖_L^{p}"),
        format!("‖G_(E,{r})‖_L^{p}(κ(E)×ℝ)"),
        rows,
        spread_bound,
    ))
}

/// Outcome of [`check_zak_modulation`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZakModulationReport {
    pub p: f64,
    /// `‖f‖_{M^p}` against `‖V_Φ(Z_Ef)‖_{L^p(κ(E×E')×ℝ²)}`.
    pub corollary: EquivalenceReport,
    /// Largest relative defect of `H(x+e, ξ) = H(x, ξ) = H(x, ξ+e')`.
    pub periodicity_defect: f64,
    /// `|κ|^{−1/r}‖H‖_{L^r(κ)} / ‖f‖_{M^p}` for each `r`.
    pub restricted: Vec<EquivalenceReport>,
    /// Spread of the restricted ratios over all signals and all `r`.
    pub joint_spread: f64,
    pub passed: bool,
}

pub const PERIODICITY_TOLERANCE: f64 = 1e-8;

/// `H` on the cells `[0, x_cells·e) × [0, xi_cells·e')` as a row-major
/// `(values, n_x, n_ξ, step_x, step_ξ)`.
fn h_field(
    f: &SampledField,
    basis: &OrderedBasis,
    phi: &Window,
    opts: &ZakStftOptions,
    p: Exponent,
) -> Result<(Vec<f64>, usize, usize, f64, f64)> {
    let h = zak_stft_norms(f, basis, phi, opts, &[p], None)?.remove(0);
    let vals = h.values().iter().map(|v| v.re).collect();
    Ok((vals, h.axis(0).count, h.axis(1).count, h.axis(0).step, h.axis(1).step))
}

/// Corollary path, periodicity of `H` and its normalised `L^r(κ)` norms.
#[allow(clippy::too_many_arguments)]
pub fn check_zak_modulation(
    family: &SignalFamily,
    basis: &OrderedBasis,
    p: f64,
    r_values: &[f64],
    phi: &Window,
    grid: &ZakGrid,
    spread_bound: f64,
) -> Result<ZakModulationReport> {
    scalar_basis(basis)?;
    // |κ(E×E')| = e · 2π/e.
    let kappa = 2.0 * PI;
    let pe = Exponent::new(p)?;
    let pm = MixedExponent::from(pe);
    let signals = family.signals()?;
    let std1 = OrderedBasis::standard(1);
    let r_exps: Vec<Exponent> = r_values.iter().map(|&r| Exponent::new(r)).collect::<Result<_>>()?;

    // Per signal and level: ‖f‖_{M^p}, the corollary side, and the r-norms of H.
    let per = |s: &super::family::Signal, level: Level| -> Result<(f64, f64, Vec<f64>)> {
        let f = grid.sampling.sample(s, level)?;
        let m = modulation_norm(&f, &Window::standard(1), ModKind::M, &std1, &std1, &pm, &pm, &Weight::one(), &grid.stft)?.value;
        let opts = ZakStftOptions { x_cells: 1, xi_cells: 1, ..grid.opts(level).clone() };
        let (h, _, _, dx, dw) = h_field(&f, basis, phi, &opts, pe)?;
        let cor = lp(h.iter().copied(), pe, dx * dw);
        let rs = r_exps.iter().map(|&r| lp(h.iter().copied(), r, dx * dw) * kappa.powf(-r.reciprocal())).collect();
        Ok((m, cor, rs))
    };
    let results: Vec<(String, (f64, f64, Vec<f64>), (f64, f64, Vec<f64>))> = {
        use rayon::prelude::*;
        signals
            .par_iter()
            .map(|s| Ok((s.id.clone(), per(s, Level::Coarse)?, per(s, Level::Fine)?)))
            .collect::<Result<_>>()?
    };
    let corollary_rows = results
        .iter()
        .map(|(id, c, f)| RatioRow { signal: id.clone(), a: c.0, b: c.1, a_fine: f.0, b_fine: f.1 })
        .collect();
    let corollary = EquivalenceReport::from_rows(
        format!("zak-modulation-p{p}"),
        format!("‖f‖_M^{p}"),
        format!("‖V_Φ(Z_E f)‖_L^{p}(κ×ℝ²)"),
        corollary_rows,
        spread_bound,
    );
    let restricted: Vec<EquivalenceReport> = r_values
        .iter()
        .enumerate()
        .map(|(k, r)| {
            let rows = results
                .iter()
                .map(|(id, c, f)| RatioRow { signal: id.clone(), a: c.2[k], b: c.0, a_fine: f.2[k], b_fine: f.0 })
                .collect();
            EquivalenceReport::from_rows(
                format!("zak-modulation-p{p}-h-r{r}"),
                format!("|κ|^(-1/{r})‖H_{p}‖_L^{r}(κ)"),
                format!("‖f‖_M^{p}"),
                rows,
                spread_bound,
            )
        })
        .collect();
    let all: Vec<f64> = restricted.iter().flat_map(|rep| rep.rows.iter().map(|row| row.ratio_fine())).collect();
    let joint_spread = all.iter().copied().fold(0.0, f64::max) / all.iter().copied().fold(f64::INFINITY, f64::min);

    // Periodicity of H over two cells in each direction, at the coarse level.
    let mut periodicity_defect = 0.0f64;
    for s in &signals {
        let f = grid.sampling.sample(s, Level::Coarse)?;
        let opts = ZakStftOptions { x_cells: 2, xi_cells: 2, ..grid.coarse.clone() };
        let (h, nx, nw, _, _) = h_field(&f, basis, phi, &opts, pe)?;
        let (sx, sw) = (nx / 2, nw / 2);
        let max = h.iter().copied().fold(0.0, f64::max);
        if max == 0.0 {
            continue;
        }
        for a in 0..nx {
            for b in 0..nw {
                let v = h[a * nw + b];
                if a + sx < nx {
                    periodicity_defect = periodicity_defect.max((h[(a + sx) * nw + b] - v).abs() / max);
                }
                if b + sw < nw {
                    periodicity_defect = periodicity_defect.max((h[a * nw + b + sw] - v).abs() / max);
                }
            }
        }
    }
    let passed = corollary.passed
        && restricted.iter().all(|r| r.passed)
        && joint_spread <= spread_bound
        && periodicity_defect <= PERIODICITY_TOLERANCE;
    Ok(ZakModulationReport { p, corollary, periodicity_defect, restricted, joint_spread, passed })
}
