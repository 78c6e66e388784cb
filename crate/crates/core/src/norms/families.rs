//! The norm families. Every integral is a Riemann sum in the coordinates of the
//! basis it is taken with respect to, without a Jacobian factor.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Axis, Exponent, MixedExponent, SampledField, Weight, Window};
use crate::geometry::{dual_basis, OrderedBasis};
use crate::transforms::{fourier_coefficients, stft_with, FourierCoefficients, LatticeSequence, StftOptions};

use super::reduce::{cell_split, Mags};
use super::NormValue;

/// Integration region for [`mixed_lebesgue_norm`], in basis coordinates.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Domain {
    #[default]
    Full,
    /// Half-open box `lo ≤ u < hi`; the function is treated as zero outside.
    Box { lo: Vec<f64>, hi: Vec<f64> },
}

impl Domain {
    /// The cell `j + κ(E)`.
    pub fn cell(j: &[i64]) -> Self {
        Domain::Box { lo: j.iter().map(|&v| v as f64).collect(), hi: j.iter().map(|&v| v as f64 + 1.0).collect() }
    }

    /// The translated cell `u₀ + κ(E)` with `u₀` in basis coordinates.
    pub fn shifted_cell(u0: &[f64]) -> Self {
        Domain::Box { lo: u0.to_vec(), hi: u0.iter().map(|v| v + 1.0).collect() }
    }
}

/// Order of the two reductions in a modulation-type norm.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModKind {
    /// `x` first, then `ξ`.
    M,
    /// `ξ` first, then `x`.
    W,
}

/// A mixed Lebesgue norm on the frequency variable, the `𝓑₀` of the Wiener
/// phase-space norms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LebesgueSpec {
    #[serde(default)]
    pub basis: Option<OrderedBasis>,
    pub exponents: MixedExponent,
}

impl LebesgueSpec {
    pub fn new(basis: OrderedBasis, exponents: MixedExponent) -> Self {
        Self { basis: Some(basis), exponents }
    }

    fn resolve(&self, d: usize) -> Result<(OrderedBasis, MixedExponent)> {
        let b = self.basis.clone().unwrap_or_else(|| OrderedBasis::standard(d));
        if b.dim() != d {
            return Err(Error::DimensionMismatch(format!("inner norm basis has dimension {}, expected {d}", b.dim())));
        }
        Ok((b, self.exponents.broadcast(d)?))
    }
}

fn magnitudes(f: &SampledField, omega: &Weight) -> Result<Vec<f64>> {
    omega.validate(f.dim())?;
    if omega.is_constant() {
        let c = omega.eval(&vec![0.0; f.dim()]);
        return Ok(f.values().iter().map(|v| v.norm() * c).collect());
    }
    use rayon::prelude::*;
    Ok(f.values()
        .par_iter()
        .enumerate()
        .map(|(i, v)| {
            let n = v.norm();
            if n == 0.0 {
                0.0
            } else {
                n * omega.eval(&f.standard_point(i))
            }
        })
        .collect())
}

fn steps(axes: &[Axis]) -> Vec<f64> {
    axes.iter().map(|a| a.step).collect()
}

/// Axes rescaled to the coordinates of a diagonal basis.
fn coord_axes(axes: &[Axis], basis: &OrderedBasis) -> Result<Vec<Axis>> {
    if basis.is_standard() {
        return Ok(axes.to_vec());
    }
    if !basis.is_diagonal() || basis.diagonal_entries().iter().any(|&e| e <= 0.0) {
        return Err(Error::GridMismatch(
            "phase-space norms need diagonal bases with positive entries".into(),
        ));
    }
    Ok(axes
        .iter()
        .zip(basis.diagonal_entries())
        .map(|(a, e)| Axis { origin: a.origin / e, step: a.step / e, ..*a })
        .collect())
}

fn value(v: f64, steps: Vec<f64>, samples: usize) -> NormValue {
    NormValue { value: v, steps, samples, spec: None }
}

/// `‖F ω‖_{L^q_E(Ω)}`: iterated one-axis reductions in `E`-coordinates with the
/// first axis reduced first.
pub fn mixed_lebesgue_norm(
    f: &SampledField,
    basis: &OrderedBasis,
    q: &MixedExponent,
    omega: &Weight,
    domain: &Domain,
) -> Result<NormValue> {
    let fe = f.in_basis_coords(basis)?;
    let d = fe.dim();
    let q = q.broadcast(d)?;
    let mut mags = Mags::new(magnitudes(&fe, omega)?, fe.shape());
    let st = steps(fe.axes());
    if let Domain::Box { lo, hi } = domain {
        if lo.len() != d || hi.len() != d {
            return Err(Error::DimensionMismatch("domain box dimension".into()));
        }
        for k in 0..d {
            let a = fe.axis(k);
            let tol = 1e-9 * a.step;
            let inside: Vec<usize> = (0..a.count)
                .filter(|&i| {
                    let u = a.coord(i);
                    u >= lo[k] - tol && u < hi[k] - tol
                })
                .collect();
            match (inside.first(), inside.last()) {
                (Some(&a0), Some(&a1)) => mags = mags.crop(k, a0, a1 + 1),
                _ => return Ok(value(0.0, st, 0)),
            }
        }
    }
    let n = mags.values.len();
    Ok(value(mags.norm(q.entries(), &st), st, n))
}

/// `‖a ω‖_{ℓ^p_E}` with the weight evaluated at the lattice points `T_E j`.
pub fn sequence_norm(a: &LatticeSequence, basis: &OrderedBasis, p: &MixedExponent, omega: &Weight) -> Result<NormValue> {
    let d = basis.dim();
    if a.dim() != d {
        return Err(Error::DimensionMismatch("sequence and basis dimensions differ".into()));
    }
    let p = p.broadcast(d)?;
    omega.validate(d)?;
    let vals = a
        .values
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let n = v.norm();
            if n == 0.0 {
                0.0
            } else {
                n * omega.eval(&basis.lattice_point(&a.index(i)))
            }
        })
        .collect();
    let mags = Mags::new(vals, a.shape.clone());
    let n = mags.values.len();
    Ok(value(mags.norm(p.entries(), &vec![1.0; d]), vec![1.0; d], n))
}

/// Replaces each axis in `first..first+d` by cell-wise `L^{r_k}` norms.
fn cellwise(mut mags: Mags, axes: &[Axis], first: usize, r: &MixedExponent) -> Result<(Mags, Vec<Vec<i64>>)> {
    let mut labels = Vec::with_capacity(axes.len());
    for (k, a) in axes.iter().enumerate() {
        let split = cell_split(a)?;
        mags = mags.reduce_ranges(first + k, &split.ranges, r.get(k), a.step);
        labels.push(split.labels);
    }
    Ok((mags, labels))
}

/// Local norms `‖f‖_{L^r_E(j+κ(E))}` on every cell met by the grid.
pub fn cell_norms(f: &SampledField, basis: &OrderedBasis, r: &MixedExponent) -> Result<LatticeSequence> {
    let fe = f.in_basis_coords(basis)?;
    let d = fe.dim();
    let r = r.broadcast(d)?;
    let mags = Mags::new(fe.values().iter().map(|v| v.norm()).collect(), fe.shape());
    let (mags, labels) = cellwise(mags, fe.axes(), 0, &r)?;
    LatticeSequence::new(
        labels.iter().map(|l| l[0]).collect(),
        mags.shape.clone(),
        mags.values.into_iter().map(|v| crate::Complex64::new(v, 0.0)).collect(),
    )
}

/// `‖f‖_{𝖶^r_E(ω₀, ℓ^p)}`: local `L^r_E` norms on the half-open cells, weighted
/// by `ω₀(j)`, then a mixed `ℓ^p` norm over the cells.
pub fn wiener_norm(
    f: &SampledField,
    basis: &OrderedBasis,
    r: &MixedExponent,
    p: &MixedExponent,
    omega0: &Weight,
) -> Result<NormValue> {
    let h = cell_norms(f, basis, r)?;
    let mut out = sequence_norm(&h, basis, p, omega0)?;
    out.steps = steps(f.in_basis_coords(basis)?.axes());
    out.samples = f.len();
    Ok(out)
}

struct PhaseGrid {
    d: usize,
    x_axes: Vec<Axis>,
    xi_axes: Vec<Axis>,
}

fn phase_grid(f: &SampledField, ex: &OrderedBasis, exi: &OrderedBasis) -> Result<PhaseGrid> {
    if f.dim() % 2 != 0 || f.dim() == 0 {
        return Err(Error::DimensionMismatch(format!("a phase-space field needs 2d axes, got {}", f.dim())));
    }
    if f.basis().is_some_and(|b| !b.is_standard()) {
        return Err(Error::GridMismatch("phase-space fields are expected in standard coordinates".into()));
    }
    let d = f.dim() / 2;
    if ex.dim() != d || exi.dim() != d {
        return Err(Error::DimensionMismatch(format!("bases must have dimension {d}")));
    }
    Ok(PhaseGrid { d, x_axes: coord_axes(&f.axes()[..d], ex)?, xi_axes: coord_axes(&f.axes()[d..], exi)? })
}

/// `𝖶^r_{k,E}(ω, ℓ^p, 𝓑₀)` of a phase-space field with axes `x…, ξ…`.
/// `which = 1` takes the Wiener norm in `x` for each `ξ` and then `𝓑₀` in `ξ`;
/// `which = 2` takes `𝓑₀` in `ξ` first.
pub fn wiener_phase_norm(
    big_f: &SampledField,
    which: u8,
    basis: &OrderedBasis,
    r: &MixedExponent,
    p: &MixedExponent,
    omega: &Weight,
    b0: &LebesgueSpec,
) -> Result<NormValue> {
    let d = big_f.dim() / 2;
    let (b0_basis, q) = b0.resolve(d)?;
    let g = phase_grid(big_f, basis, &b0_basis)?;
    let r = r.broadcast(d)?;
    let p = p.broadcast(d)?;
    let mags = Mags::new(magnitudes(big_f, omega)?, big_f.shape());
    let m = mags.max();
    let all_steps: Vec<f64> = steps(&g.x_axes).into_iter().chain(steps(&g.xi_axes)).collect();
    if m == 0.0 || !m.is_finite() {
        return Ok(value(m, all_steps, big_f.len()));
    }
    let mags = Mags::new(mags.values.iter().map(|v| v / m).collect(), mags.shape);
    let ones = vec![1.0; g.d];
    let out = match which {
        1 => {
            let (cells, _) = cellwise(mags, &g.x_axes, 0, &r)?;
            cells.reduce_block(0, p.entries(), &ones).reduce_block(0, q.entries(), &steps(&g.xi_axes))
        }
        2 => {
            let inner = mags.reduce_block(g.d, q.entries(), &steps(&g.xi_axes));
            let (cells, _) = cellwise(inner, &g.x_axes, 0, &r)?;
            cells.reduce_block(0, p.entries(), &ones)
        }
        other => return Err(Error::InvalidParameter(format!("which must be 1 or 2, got {other}"))),
    };
    Ok(value(out.values[0] * m, all_steps, big_f.len()))
}

/// `M^{p,q}_{E,(ω)}` or `W^{p,q}_{E,(ω)}` evaluated on a precomputed STFT.
pub fn modulation_norm_of_stft(
    v: &SampledField,
    kind: ModKind,
    e1: &OrderedBasis,
    e2: &OrderedBasis,
    p: &MixedExponent,
    q: &MixedExponent,
    omega: &Weight,
) -> Result<NormValue> {
    let g = phase_grid(v, e1, e2)?;
    let p = p.broadcast(g.d)?;
    let q = q.broadcast(g.d)?;
    let mags = Mags::new(magnitudes(v, omega)?, v.shape());
    let (xs, ws) = (steps(&g.x_axes), steps(&g.xi_axes));
    let all: Vec<f64> = xs.iter().chain(&ws).copied().collect();
    let exps: Vec<Exponent> = p.entries().iter().chain(q.entries()).copied().collect();
    let val = match kind {
        ModKind::M => mags.norm(&exps, &all),
        ModKind::W => {
            // Move the frequency block in front so it is reduced first.
            let m = mags.max();
            if m == 0.0 || !m.is_finite() {
                m
            } else {
                let scaled = Mags::new(mags.values.iter().map(|x| x / m).collect(), mags.shape);
                scaled.reduce_block(g.d, q.entries(), &ws).reduce_block(0, p.entries(), &xs).values[0] * m
            }
        }
    };
    Ok(value(val, all, v.len()))
}

/// Modulation-type norm of a signal; computes `V_φ f` with the given options.
#[allow(clippy::too_many_arguments)]
pub fn modulation_norm(
    f: &SampledField,
    phi: &Window,
    kind: ModKind,
    e1: &OrderedBasis,
    e2: &OrderedBasis,
    p: &MixedExponent,
    q: &MixedExponent,
    omega: &Weight,
    opts: &StftOptions,
) -> Result<NormValue> {
    let v = stft_with(f, phi, opts)?;
    modulation_norm_of_stft(&v, kind, e1, e2, p, q, omega)
}

/// `𝓜^r_E(ω, 𝓑₀)` (`kind = M`) or `𝓦^r_E(ω, 𝓑₀)` (`kind = W`) of a precomputed
/// STFT: the Wiener phase-space norm with outer `ℓ^∞`.
pub fn script_norm_of_stft(
    v: &SampledField,
    kind: ModKind,
    basis: &OrderedBasis,
    r: &MixedExponent,
    omega: &Weight,
    b0: &LebesgueSpec,
) -> Result<NormValue> {
    let which = match kind {
        ModKind::M => 1,
        ModKind::W => 2,
    };
    wiener_phase_norm(v, which, basis, r, &MixedExponent::from(Exponent::Infinite), omega, b0)
}

pub fn script_norm(
    f: &SampledField,
    phi: &Window,
    kind: ModKind,
    basis: &OrderedBasis,
    r: &MixedExponent,
    omega: &Weight,
    b0: &LebesgueSpec,
    opts: &StftOptions,
) -> Result<NormValue> {
    let v = stft_with(f, phi, opts)?;
    script_norm_of_stft(&v, kind, basis, r, omega, b0)
}

/// `‖{c(f,α) ω₀(α)}_{α∈Λ'_E}‖_{ℓ^q}` over the index box of the table.
pub fn periodic_coefficient_norm(c: &FourierCoefficients, q: &MixedExponent, omega0: &Weight) -> Result<NormValue> {
    let seq = LatticeSequence::new(c.cutoff.iter().map(|&k| -k).collect(), c.shape(), c.values.clone())?;
    sequence_norm(&seq, &dual_basis(&c.basis), q, omega0)
}

/// Computes the coefficients of `f` up to `cutoff` and their weighted norm.
pub fn periodic_norm(
    f: &SampledField,
    basis: &OrderedBasis,
    cutoff: &[i64],
    q: &MixedExponent,
    omega0: &Weight,
) -> Result<NormValue> {
    let c = fourier_coefficients(f, basis, cutoff)?;
    let mut out = periodic_coefficient_norm(&c, q, omega0)?;
    out.steps = steps(f.axes());
    out.samples = f.len();
    Ok(out)
}
