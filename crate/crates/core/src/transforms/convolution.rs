//! Finitely supported sequences on `Λ_E` and the semi-discrete convolution
//! `(a ∗_{[E]} f)(x) = Σ_{j∈Λ_E} a(j) f(x − j)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Axis, SampledField};
use crate::geometry::OrderedBasis;

use super::zak::cell_layout;

/// Dense values of `a(n)` on the integer box `lo ≤ n < lo + shape`, row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeSequence {
    pub lo: Vec<i64>,
    pub shape: Vec<usize>,
    pub values: Vec<Complex64>,
}

impl LatticeSequence {
    pub fn new(lo: Vec<i64>, shape: Vec<usize>, values: Vec<Complex64>) -> Result<Self> {
        if lo.len() != shape.len() || lo.is_empty() {
            return Err(Error::DimensionMismatch("sequence box".into()));
        }
        if values.len() != shape.iter().product::<usize>() {
            return Err(Error::DimensionMismatch("sequence value count".into()));
        }
        Ok(Self { lo, shape, values })
    }

    /// `δ_{n0}`.
    pub fn delta(n0: &[i64]) -> Self {
        Self {
            lo: n0.to_vec(),
            shape: vec![1; n0.len()],
            values: vec![Complex64::new(1.0, 0.0)],
        }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn index(&self, mut flat: usize) -> Vec<i64> {
        let mut n = vec![0; self.dim()];
        for k in (0..self.dim()).rev() {
            n[k] = self.lo[k] + (flat % self.shape[k]) as i64;
            flat /= self.shape[k];
        }
        n
    }

    pub fn hi(&self) -> Vec<i64> {
        self.lo.iter().zip(&self.shape).map(|(l, s)| l + *s as i64 - 1).collect()
    }

    pub fn scale(&self, lambda: Complex64) -> Self {
        Self { values: self.values.iter().map(|v| v * lambda).collect(), ..self.clone() }
    }
}

/// Exact finite sum at every grid point whose shifts all stay on the grid;
/// the output box shrinks by the support of `a`.
pub fn semidiscrete_convolve(a: &LatticeSequence, f: &SampledField, basis: &OrderedBasis) -> Result<SampledField> {
    let d = basis.dim();
    if a.dim() != d || f.dim() != d {
        return Err(Error::DimensionMismatch("sequence, field and basis dimensions differ".into()));
    }
    let fe = f.in_basis_coords(basis)?;
    let mut s = Vec::with_capacity(d);
    for ax in fe.axes() {
        let (sk, _) = cell_layout(&Axis { origin: 0.0, ..*ax })?;
        s.push(sk as i64);
    }
    let hi = a.hi();
    let mut out_axes = Vec::with_capacity(d);
    let mut start = Vec::with_capacity(d);
    for k in 0..d {
        let ax = fe.axis(k);
        // Output index i needs 0 ≤ i − n s < count for every n in [lo, hi].
        let first = hi[k] * s[k];
        let last = ax.count as i64 - 1 + a.lo[k] * s[k];
        let first = first.max(0);
        let last = last.min(ax.count as i64 - 1);
        if last < first {
            return Err(Error::InvalidParameter("the sequence support leaves an empty output box".into()));
        }
        start.push(first);
        out_axes.push(Axis::line(ax.coord(first as usize), ax.step, (last - first + 1) as usize));
    }
    let strides = fe.strides();
    let terms: Vec<(Vec<i64>, Complex64)> = a
        .values
        .iter()
        .enumerate()
        .filter(|(_, v)| v.norm() > 0.0)
        .map(|(i, v)| (a.index(i), *v))
        .collect();
    let out_shape: Vec<usize> = out_axes.iter().map(|x| x.count).collect();
    let n_out: usize = out_shape.iter().product();
    let out_strides = crate::field::row_major_strides(&out_shape);
    let values = (0..n_out)
        .map(|io| {
            let mut base = vec![0i64; d];
            for k in 0..d {
                base[k] = start[k] + ((io / out_strides[k]) % out_shape[k]) as i64;
            }
            terms
                .iter()
                .map(|(n, v)| {
                    let flat: i64 = (0..d).map(|k| (base[k] - n[k] * s[k]) * strides[k] as i64).sum();
                    v * fe.values()[flat as usize]
                })
                .sum()
        })
        .collect();
    let mut out = SampledField::new(out_axes, values)?;
    if let Some(b) = fe.basis() {
        out = out.with_basis(b.clone())?;
    }
    Ok(if f.basis().is_none() { out.into_standard_coords() } else { out })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::sample;

    fn bump(x: &[f64]) -> Complex64 {
        Complex64::new((-x[0] * x[0]).exp(), x[0].sin())
    }

    #[test]
    fn delta_at_origin_is_identity_on_the_box() {
        let f = sample(bump, &[-4.0], &[4.0], 0.125).unwrap();
        let g = semidiscrete_convolve(&LatticeSequence::delta(&[0]), &f, &OrderedBasis::standard(1)).unwrap();
        assert_eq!(g, f);
    }

    #[test]
    fn delta_elsewhere_translates() {
        let e = OrderedBasis::diagonal(&[0.5]).unwrap();
        let f = sample(bump, &[-4.0], &[4.0], 0.125).unwrap();
        let g = semidiscrete_convolve(&LatticeSequence::delta(&[3]), &f, &e).unwrap();
        // (δ_3 ∗ f)(x) = f(x − 1.5).
        for i in 0..g.len() {
            let x = g.point(i)[0];
            let j = f.axis(0).index_of(x - 1.5).unwrap();
            assert_eq!(g.values()[i], f.values()[j]);
        }
    }

    #[test]
    fn linear_in_both_arguments() {
        let e = OrderedBasis::standard(1);
        let f = sample(bump, &[-6.0], &[6.0], 0.25).unwrap();
        let g = sample(|x| Complex64::new(x[0].cos(), 0.0), &[-6.0], &[6.0], 0.25).unwrap();
        let a = LatticeSequence::new(vec![-1], vec![3], vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 2.0), Complex64::new(-0.5, 0.0)]).unwrap();
        let b = LatticeSequence::new(vec![-1], vec![3], vec![Complex64::new(0.3, 0.0), Complex64::new(1.0, 1.0), Complex64::new(0.0, 0.0)]).unwrap();
        let lam = Complex64::new(1.5, -0.5);
        let lhs = semidiscrete_convolve(&a, &f.scale(lam).add(&g).unwrap(), &e).unwrap();
        let rhs = semidiscrete_convolve(&a, &f, &e).unwrap().scale(lam).add(&semidiscrete_convolve(&a, &g, &e).unwrap()).unwrap();
        assert!(lhs.values().iter().zip(rhs.values()).all(|(p, q)| (p - q).norm() < 1e-13));
        let sum = LatticeSequence { values: a.values.iter().zip(&b.values).map(|(x, y)| x + y).collect(), ..a.clone() };
        let lhs = semidiscrete_convolve(&sum, &f, &e).unwrap();
        let rhs = semidiscrete_convolve(&a, &f, &e).unwrap().add(&semidiscrete_convolve(&b, &f, &e).unwrap()).unwrap();
        assert!(lhs.values().iter().zip(rhs.values()).all(|(p, q)| (p - q).norm() < 1e-13));
    }

    #[test]
    fn oversized_support_is_rejected() {
        let f = sample(bump, &[-1.0], &[1.0], 0.25).unwrap();
        let a = LatticeSequence::new(vec![-3], vec![7], vec![Complex64::new(1.0, 0.0); 7]).unwrap();
        assert!(semidiscrete_convolve(&a, &f, &OrderedBasis::standard(1)).is_err());
    }
}
