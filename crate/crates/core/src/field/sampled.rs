//! Complex samples on uniform tensor grids.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::OrderedBasis;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AxisKind {
    /// A segment `[origin, origin + count·step)` of the real line.
    Line,
    /// One period `count·step` of a periodic variable.
    Torus,
}

/// One grid axis: samples at `origin + i·step` for `i < count`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub origin: f64,
    pub step: f64,
    pub count: usize,
    pub kind: AxisKind,
}

impl Axis {
    pub fn line(origin: f64, step: f64, count: usize) -> Self {
        Self { origin, step, count, kind: AxisKind::Line }
    }

    pub fn torus(origin: f64, period: f64, count: usize) -> Self {
        Self {
            origin,
            step: period / count as f64,
            count,
            kind: AxisKind::Torus,
        }
    }

    /// Axis covering `[lo, hi)` with the given step; the count is rounded.
    pub fn covering(lo: f64, hi: f64, step: f64) -> Result<Self> {
        if !(step > 0.0) || !step.is_finite() {
            return Err(Error::InvalidParameter(format!("step must be positive, got {step}")));
        }
        if !lo.is_finite() || !hi.is_finite() {
            return Err(Error::UnboundedRegion(format!("[{lo}, {hi})")));
        }
        let count = ((hi - lo) / step).round();
        if count < 1.0 {
            return Err(Error::InvalidParameter(format!("empty axis [{lo}, {hi}) at step {step}")));
        }
        Ok(Self::line(lo, step, count as usize))
    }

    pub fn coord(&self, i: usize) -> f64 {
        self.origin + i as f64 * self.step
    }

    pub fn length(&self) -> f64 {
        self.count as f64 * self.step
    }

    pub fn end(&self) -> f64 {
        self.origin + self.length()
    }

    /// Index of the sample nearest to `x`, if it lies on the grid.
    pub fn index_of(&self, x: f64) -> Option<usize> {
        let t = (x - self.origin) / self.step;
        let i = t.round();
        if (t - i).abs() > 1e-6 || i < 0.0 || i >= self.count as f64 {
            None
        } else {
            Some(i as usize)
        }
    }
}

/// Row-major complex samples over a tensor grid (axis 0 varies slowest).
///
/// When `basis` is set, the axes are coordinates in that basis and a grid
/// point `u` stands for the point `T_E u`.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledField {
    axes: Vec<Axis>,
    values: Vec<Complex64>,
    basis: Option<OrderedBasis>,
}

pub(crate) fn row_major_strides(shape: &[usize]) -> Vec<usize> {
    let mut strides = vec![1; shape.len()];
    for k in (0..shape.len().saturating_sub(1)).rev() {
        strides[k] = strides[k + 1] * shape[k + 1];
    }
    strides
}

impl SampledField {
    pub fn new(axes: Vec<Axis>, values: Vec<Complex64>) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::InvalidParameter("a field needs at least one axis".into()));
        }
        for a in &axes {
            if !(a.step > 0.0) || a.count == 0 {
                return Err(Error::InvalidParameter(format!("invalid axis {a:?}")));
            }
        }
        let n: usize = axes.iter().map(|a| a.count).product();
        if values.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "{} values for a grid of {n} points",
                values.len()
            )));
        }
        Ok(Self { axes, values, basis: None })
    }

    pub fn zeros(axes: Vec<Axis>) -> Result<Self> {
        let n = axes.iter().map(|a| a.count).product();
        Self::new(axes, vec![Complex64::new(0.0, 0.0); n])
    }

    /// Evaluates `expr` at every grid point (in parallel, order preserving).
    pub fn from_fn<F>(axes: Vec<Axis>, expr: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> Complex64 + Sync,
    {
        let field = Self::zeros(axes)?;
        let values: Vec<Complex64> = (0..field.len())
            .into_par_iter()
            .map_init(
                || vec![0.0; field.axes.len()],
                |buf, i| {
                    field.point_into(i, buf);
                    expr(buf)
                },
            )
            .collect();
        if let Some(i) = values.iter().position(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::NonFinite { point: field.point(i) });
        }
        Ok(Self { values, ..field })
    }

    pub fn with_basis(mut self, basis: OrderedBasis) -> Result<Self> {
        if basis.dim() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "basis of dimension {} for a field with {} axes",
                basis.dim(),
                self.dim()
            )));
        }
        self.basis = Some(basis);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn axis(&self, k: usize) -> &Axis {
        &self.axes[k]
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.count).collect()
    }

    pub fn strides(&self) -> Vec<usize> {
        row_major_strides(&self.shape())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn basis(&self) -> Option<&OrderedBasis> {
        self.basis.as_ref()
    }

    /// Multi-index of the flat position `i`.
    pub fn multi_index(&self, mut i: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim()];
        for k in (0..self.dim()).rev() {
            let n = self.axes[k].count;
            idx[k] = i % n;
            i /= n;
        }
        idx
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.axes).fold(0, |acc, (&i, a)| acc * a.count + i)
    }

    fn point_into(&self, mut i: usize, out: &mut [f64]) {
        for k in (0..self.dim()).rev() {
            let a = &self.axes[k];
            out[k] = a.coord(i % a.count);
            i /= a.count;
        }
    }

    /// Grid coordinates of the flat position `i`.
    pub fn point(&self, i: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        self.point_into(i, &mut out);
        out
    }

    /// Standard coordinates of the flat position `i` (maps through the basis
    /// when the axes are basis coordinates).
    pub fn standard_point(&self, i: usize) -> Vec<f64> {
        let u = self.point(i);
        match &self.basis {
            Some(b) => b.to_point(&u),
            None => u,
        }
    }

    pub fn get(&self, idx: &[usize]) -> Complex64 {
        self.values[self.flat_index(idx)]
    }

    /// Product of the steps, times `|det T_E|` when sampled in basis coordinates.
    pub fn quadrature_weight(&self) -> f64 {
        let cell: f64 = self.axes.iter().map(|a| a.step).product();
        match &self.basis {
            Some(b) => cell * b.cell_volume(),
            None => cell,
        }
    }

    /// Riemann-sum approximation of `∫ f` in standard measure.
    pub fn integral(&self) -> Complex64 {
        self.values.iter().sum::<Complex64>() * self.quadrature_weight()
    }

    /// Standard-measure `L²` norm.
    pub fn l2_norm(&self) -> f64 {
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.quadrature_weight()).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Same grid, new values.
    pub fn with_values(&self, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != self.values.len() {
            return Err(Error::DimensionMismatch("value count changed".into()));
        }
        Ok(Self {
            axes: self.axes.clone(),
            values,
            basis: self.basis.clone(),
        })
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self {
            axes: self.axes.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
            basis: self.basis.clone(),
        }
    }

    pub fn scale(&self, lambda: Complex64) -> Self {
        self.map(|v| v * lambda)
    }

    /// Pointwise `self + other` on an identical grid.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_grid(other)?;
        Ok(Self {
            axes: self.axes.clone(),
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
            basis: self.basis.clone(),
        })
    }

    pub fn same_grid(&self, other: &Self) -> Result<()> {
        let same = self.axes.len() == other.axes.len()
            && self.axes.iter().zip(&other.axes).all(|(a, b)| {
                a.count == b.count
                    && (a.step - b.step).abs() <= 1e-12 * a.step
                    && (a.origin - b.origin).abs() <= 1e-9 * a.step
            });
        if same {
            Ok(())
        } else {
            Err(Error::GridMismatch("fields live on different grids".into()))
        }
    }

    /// Re-expresses the grid in coordinates of `basis`.
    ///
    /// Works when the field is already sampled in that basis, or when the field
    /// is in standard coordinates and the basis is diagonal with positive
    /// entries (each axis is then rescaled).
    pub fn in_basis_coords(&self, basis: &OrderedBasis) -> Result<Self> {
        if basis.dim() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "basis of dimension {} for a field with {} axes",
                basis.dim(),
                self.dim()
            )));
        }
        match &self.basis {
            Some(b) if b.approx_eq(basis, 1e-14) => Ok(self.clone()),
            Some(b) if b.is_standard() => Self {
                basis: None,
                ..self.clone()
            }
            .in_basis_coords(basis),
            Some(_) => Err(Error::GridMismatch("field is sampled in a different basis".into())),
            None => {
                if !basis.is_diagonal() || basis.diagonal_entries().iter().any(|&e| e <= 0.0) {
                    return Err(Error::GridMismatch(
                        "a standard grid can only be re-expressed in a diagonal basis with positive entries; \
                         sample the input in basis coordinates instead"
                            .into(),
                    ));
                }
                let diag = basis.diagonal_entries();
                let axes = self
                    .axes
                    .iter()
                    .zip(&diag)
                    .map(|(a, &e)| Axis {
                        origin: a.origin / e,
                        step: a.step / e,
                        ..*a
                    })
                    .collect();
                Ok(Self {
                    axes,
                    values: self.values.clone(),
                    basis: Some(basis.clone()),
                })
            }
        }
    }

    /// Inverse of [`in_basis_coords`](Self::in_basis_coords) for diagonal bases;
    /// other bases are kept as they are.
    pub fn into_standard_coords(self) -> Self {
        match &self.basis {
            Some(b) if b.is_diagonal() && b.diagonal_entries().iter().all(|&e| e > 0.0) => {
                let diag = b.diagonal_entries();
                let axes = self
                    .axes
                    .iter()
                    .zip(&diag)
                    .map(|(a, &e)| Axis {
                        origin: a.origin * e,
                        step: a.step * e,
                        ..*a
                    })
                    .collect();
                Self {
                    axes,
                    values: self.values,
                    basis: None,
                }
            }
            _ => self,
        }
    }

    /// Sub-grid keeping indices `lo[k]..hi[k]` every `stride[k]` samples.
    pub fn subgrid(&self, lo: &[usize], hi: &[usize], stride: &[usize]) -> Result<Self> {
        let d = self.dim();
        if lo.len() != d || hi.len() != d || stride.len() != d {
            return Err(Error::DimensionMismatch("subgrid bounds".into()));
        }
        let mut axes = Vec::with_capacity(d);
        for k in 0..d {
            if hi[k] > self.axes[k].count || lo[k] >= hi[k] || stride[k] == 0 {
                return Err(Error::InvalidParameter(format!("subgrid range on axis {k}")));
            }
            let count = (hi[k] - lo[k]).div_ceil(stride[k]);
            axes.push(Axis {
                origin: self.axes[k].coord(lo[k]),
                step: self.axes[k].step * stride[k] as f64,
                count,
                kind: AxisKind::Line,
            });
        }
        let shape: Vec<usize> = axes.iter().map(|a| a.count).collect();
        let n: usize = shape.iter().product();
        let strides = row_major_strides(&shape);
        let src_strides = self.strides();
        let values = (0..n)
            .map(|i| {
                let mut off = 0;
                for k in 0..d {
                    let ik = (i / strides[k]) % shape[k];
                    off += (lo[k] + ik * stride[k]) * src_strides[k];
                }
                self.values[off]
            })
            .collect();
        Ok(Self {
            axes,
            values,
            basis: self.basis.clone(),
        })
    }
}

/// Samples `expr` on `[lo, hi)` with uniform `step` along every axis.
pub fn sample<F>(expr: F, lo: &[f64], hi: &[f64], step: f64) -> Result<SampledField>
where
    F: Fn(&[f64]) -> Complex64 + Sync,
{
    if lo.len() != hi.len() {
        return Err(Error::DimensionMismatch("box bounds".into()));
    }
    let axes = lo
        .iter()
        .zip(hi)
        .map(|(&a, &b)| Axis::covering(a, b, step))
        .collect::<Result<Vec<_>>>()?;
    SampledField::from_fn(axes, expr)
}

/// Samples `u ↦ expr(T_E u)` on the coordinate box `[lo, hi)`.
pub fn sample_in_basis<F>(expr: F, basis: &OrderedBasis, lo: &[f64], hi: &[f64], step: f64) -> Result<SampledField>
where
    F: Fn(&[f64]) -> Complex64 + Sync,
{
    let b = basis.clone();
    let field = sample(move |u| expr(&b.to_point(u)), lo, hi, step)?;
    field.with_basis(basis.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn gauss(x: &[f64]) -> Complex64 {
        Complex64::new((-x.iter().map(|v| v * v).sum::<f64>() / 2.0).exp(), 0.0)
    }

    #[test]
    fn zero_expression_gives_zero_field() {
        let f = sample(|_| Complex64::new(0.0, 0.0), &[-1.0], &[1.0], 0.25).unwrap();
        assert_eq!(f.len(), 8);
        assert!(f.values().iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn gaussian_peak_and_integral() {
        let f = sample(gauss, &[-16.0], &[16.0], 1.0 / 64.0).unwrap();
        assert_eq!(f.len(), 2048);
        assert_eq!(f.max_abs(), 1.0);
        assert_eq!(f.get(&[1024]).re, 1.0);
        let integral = f.integral().re;
        assert!((integral - (2.0 * PI).sqrt()).abs() < 1e-10);
    }

    #[test]
    fn non_finite_reports_point() {
        let err = sample(|x| Complex64::new(1.0 / x[0], 0.0), &[-1.0], &[1.0], 0.5).unwrap_err();
        match err {
            Error::NonFinite { point } => assert_eq!(point, vec![0.0]),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn scaling_commutes_with_sampling() {
        let lambda = Complex64::new(0.3, -2.0);
        let a = sample(gauss, &[-2.0, -1.0], &[2.0, 1.0], 0.125).unwrap();
        let b = sample(|x| lambda * gauss(x), &[-2.0, -1.0], &[2.0, 1.0], 0.125).unwrap();
        assert_eq!(a.scale(lambda).values(), b.values());
    }

    #[test]
    fn row_major_layout() {
        let f = sample(|x| Complex64::new(x[0], x[1]), &[0.0, 0.0], &[2.0, 3.0], 1.0).unwrap();
        assert_eq!(f.shape(), vec![2, 3]);
        assert_eq!(f.values()[4], Complex64::new(1.0, 1.0));
        assert_eq!(f.multi_index(5), vec![1, 2]);
        assert_eq!(f.flat_index(&[1, 2]), 5);
    }

    #[test]
    fn basis_coordinates_round_trip() {
        let e = OrderedBasis::diagonal(&[2.0]).unwrap();
        let f = sample(gauss, &[-4.0], &[4.0], 0.5).unwrap();
        let g = f.in_basis_coords(&e).unwrap();
        assert_eq!(g.axis(0).origin, -2.0);
        assert_eq!(g.axis(0).step, 0.25);
        assert!((g.quadrature_weight() - 0.5).abs() < 1e-15);
        assert_eq!(g.clone().into_standard_coords(), f);
        let skew = OrderedBasis::from_columns(vec![vec![1.0, 0.5], vec![0.0, 1.0]]).unwrap();
        let f2 = sample(gauss, &[-1.0, -1.0], &[1.0, 1.0], 0.5).unwrap();
        assert!(f2.in_basis_coords(&skew).is_err());
        let s = sample_in_basis(gauss, &skew, &[0.0, 0.0], &[1.0, 1.0], 0.5).unwrap();
        let want = gauss(&skew.to_point(&[0.5, 0.5]));
        assert_eq!(s.get(&[1, 1]), want);
    }

    #[test]
    fn subgrid_strides() {
        let f = sample(|x| Complex64::new(x[0], 0.0), &[0.0], &[8.0], 1.0).unwrap();
        let g = f.subgrid(&[1], &[8], &[3]).unwrap();
        assert_eq!(g.values().iter().map(|v| v.re).collect::<Vec<_>>(), vec![1.0, 4.0, 7.0]);
        assert_eq!(g.axis(0).step, 3.0);
    }
}
