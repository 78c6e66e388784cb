//! Fourier coefficients of `Λ_E`-periodic functions,
//! `c(f,α) = |κ(E)|^{-1} ∫_{κ(E)} f(x) e^{−i⟨x,α⟩} dx`, `α ∈ Λ'_E`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Axis, SampledField};
use crate::geometry::{dual_basis, OrderedBasis};

use super::zak::cell_layout;

/// Coefficient table indexed by `m ∈ ℤ^d` (standing for `α = T_{E'} m`) on the
/// box `|m_k| ≤ cutoff_k`, row-major with the last index fastest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourierCoefficients {
    pub basis: OrderedBasis,
    pub cutoff: Vec<i64>,
    pub values: Vec<Complex64>,
}

impl FourierCoefficients {
    pub fn zeros(basis: OrderedBasis, cutoff: Vec<i64>) -> Result<Self> {
        if cutoff.len() != basis.dim() || cutoff.iter().any(|&c| c < 0) {
            return Err(Error::DimensionMismatch("cutoff must have one non-negative entry per axis".into()));
        }
        let n: usize = cutoff.iter().map(|&c| (2 * c + 1) as usize).product();
        Ok(Self { basis, cutoff, values: vec![Complex64::new(0.0, 0.0); n] })
    }

    /// Table from `(m, c)` pairs; every index must lie within the cutoff.
    pub fn from_terms(basis: OrderedBasis, cutoff: Vec<i64>, terms: &[(Vec<i64>, Complex64)]) -> Result<Self> {
        let mut out = Self::zeros(basis, cutoff)?;
        for (m, c) in terms {
            let i = out
                .position(m)
                .ok_or_else(|| Error::InvalidParameter(format!("index {m:?} outside the cutoff")))?;
            out.values[i] += c;
        }
        Ok(out)
    }

    pub fn dim(&self) -> usize {
        self.cutoff.len()
    }

    pub fn shape(&self) -> Vec<usize> {
        self.cutoff.iter().map(|&c| (2 * c + 1) as usize).collect()
    }

    pub fn position(&self, m: &[i64]) -> Option<usize> {
        let mut flat = 0usize;
        for (k, &mk) in m.iter().enumerate() {
            let c = self.cutoff[k];
            if mk.abs() > c {
                return None;
            }
            flat = flat * (2 * c + 1) as usize + (mk + c) as usize;
        }
        Some(flat)
    }

    pub fn index(&self, mut flat: usize) -> Vec<i64> {
        let shape = self.shape();
        let mut m = vec![0; self.dim()];
        for k in (0..self.dim()).rev() {
            m[k] = (flat % shape[k]) as i64 - self.cutoff[k];
            flat /= shape[k];
        }
        m
    }

    pub fn get(&self, m: &[i64]) -> Complex64 {
        self.position(m).map_or(Complex64::new(0.0, 0.0), |i| self.values[i])
    }

    /// Frequency `α = T_{E'} m` in standard coordinates.
    pub fn frequency(&self, m: &[i64]) -> Vec<f64> {
        dual_basis(&self.basis).lattice_point(m)
    }

    pub fn scale(&self, lambda: Complex64) -> Self {
        Self { values: self.values.iter().map(|v| v * lambda).collect(), ..self.clone() }
    }

    /// Entries `(m, c)` with `c ≠ 0`.
    pub fn terms(&self) -> Vec<(Vec<i64>, Complex64)> {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, c)| c.norm() > 0.0)
            .map(|(i, c)| (self.index(i), *c))
            .collect()
    }
}

/// Quadrature of the coefficient integral over the first period cell of the
/// grid, one DFT per axis.
pub fn fourier_coefficients(f: &SampledField, basis: &OrderedBasis, cutoff: &[i64]) -> Result<FourierCoefficients> {
    let d = basis.dim();
    if cutoff.len() != d {
        return Err(Error::DimensionMismatch("cutoff length".into()));
    }
    let fe = f.in_basis_coords(basis)?;
    let mut s = Vec::with_capacity(d);
    for (k, a) in fe.axes().iter().enumerate() {
        let (sk, _) = cell_layout(&Axis { origin: 0.0, ..*a })?;
        if a.count < sk {
            return Err(Error::GridMismatch(format!("axis {k} covers less than one period")));
        }
        if (2 * cutoff[k] + 1) as usize > sk {
            return Err(Error::GridMismatch(format!(
                "cutoff {} needs more than the {sk} samples per period",
                cutoff[k]
            )));
        }
        s.push(sk);
    }
    let mut out = FourierCoefficients::zeros(basis.clone(), cutoff.to_vec())?;
    let strides = fe.strides();
    // Separable sum: c(m) = ∏_k (1/s_k) Σ_{i_k} e^{−2πi m_k u_k} applied to f.
    let mut cur: Vec<Complex64> = {
        let n: usize = s.iter().product();
        let sub = crate::field::row_major_strides(&s);
        (0..n)
            .map(|i| {
                let mut flat = 0;
                for k in 0..d {
                    flat += ((i / sub[k]) % s[k]) * strides[k];
                }
                fe.values()[flat]
            })
            .collect()
    };
    let mut shape = s.clone();
    for k in 0..d {
        let a = fe.axis(k);
        let c = cutoff[k];
        let sk = s[k] as f64;
        let table: Vec<Vec<Complex64>> = (-c..=c)
            .map(|m| {
                (0..s[k])
                    .map(|i| {
                        let u = a.origin + i as f64 / sk;
                        // Reduce m·u modulo 1 before forming the angle.
                        let t = (m as f64 * u).rem_euclid(1.0);
                        Complex64::from_polar(1.0 / sk, -2.0 * PI * t)
                    })
                    .collect()
            })
            .collect();
        let out_len = table.len();
        cur = crate::fft::map_axis(&cur, &shape, k, out_len, |src, dst| {
            for (o, row) in dst.iter_mut().zip(&table) {
                *o = src.iter().zip(row).map(|(a, b)| a * b).sum();
            }
        });
        shape[k] = out_len;
    }
    out.values = cur;
    Ok(out)
}

/// `Σ_m c(m) e^{i⟨x, T_{E'} m⟩}` on the given standard-coordinate grid.
pub fn synthesize_periodic(c: &FourierCoefficients, axes: Vec<Axis>) -> Result<SampledField> {
    if axes.len() != c.dim() {
        return Err(Error::DimensionMismatch("grid dimension differs from the coefficient table".into()));
    }
    let terms: Vec<(Vec<f64>, Complex64)> = c.terms().into_iter().map(|(m, v)| (c.frequency(&m), v)).collect();
    SampledField::from_fn(axes, |x| {
        terms
            .iter()
            .map(|(alpha, v)| {
                let phase: f64 = alpha.iter().zip(x).map(|(a, b)| a * b).sum();
                v * Complex64::from_polar(1.0, phase)
            })
            .sum()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::sample;
    use rand::{Rng, SeedableRng};

    fn period_grid(n: usize) -> Vec<Axis> {
        vec![Axis::line(0.0, 2.0 * PI / n as f64, n)]
    }

    #[test]
    fn single_exponential() {
        let e = OrderedBasis::diagonal(&[2.0 * PI]).unwrap();
        let f = sample(|x| Complex64::from_polar(2.0, 3.0 * x[0]), &[0.0], &[2.0 * PI], 2.0 * PI / 64.0).unwrap();
        let c = fourier_coefficients(&f, &e, &[8]).unwrap();
        for m in -8..=8 {
            let want = if m == 3 { 2.0 } else { 0.0 };
            assert!((c.get(&[m]) - Complex64::new(want, 0.0)).norm() < 1e-12, "m={m}");
        }
    }

    #[test]
    fn constant_function() {
        let e = OrderedBasis::diagonal(&[2.0 * PI]).unwrap();
        let f = SampledField::from_fn(period_grid(32), |_| Complex64::new(1.0, 0.0)).unwrap();
        let c = fourier_coefficients(&f, &e, &[4]).unwrap();
        assert!((c.get(&[0]) - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        assert!(c.terms().iter().all(|(m, v)| m[0] == 0 || v.norm() < 1e-14));
    }

    #[test]
    fn planted_coefficients_round_trip() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let e = OrderedBasis::diagonal(&[2.0 * PI]).unwrap();
        let terms: Vec<(Vec<i64>, Complex64)> = (0..9)
            .map(|i| (vec![i as i64 * 2 - 8], Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))))
            .collect();
        let planted = FourierCoefficients::from_terms(e.clone(), vec![8], &terms).unwrap();
        // Off-centre grid covering more than one period.
        let axes = vec![Axis::line(-3.0 * PI, 2.0 * PI / 128.0, 300)];
        let f = synthesize_periodic(&planted, axes).unwrap();
        let back = fourier_coefficients(&f, &e, &[8]).unwrap();
        let err = back.values.iter().zip(&planted.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-10, "{err}");
    }

    #[test]
    fn two_dimensional_skew_lattice() {
        let e = OrderedBasis::from_columns(vec![vec![1.0, 0.0], vec![0.3, 1.2]]).unwrap();
        let planted =
            FourierCoefficients::from_terms(e.clone(), vec![2, 2], &[(vec![1, -1], Complex64::new(0.5, 1.0)), (vec![0, 2], Complex64::new(-2.0, 0.0))])
                .unwrap();
        let f = crate::field::sample_in_basis(
            |x| {
                planted
                    .terms()
                    .iter()
                    .map(|(m, v)| {
                        let a = planted.frequency(m);
                        v * Complex64::from_polar(1.0, a[0] * x[0] + a[1] * x[1])
                    })
                    .sum()
            },
            &e,
            &[0.0, 0.0],
            &[1.0, 1.0],
            1.0 / 16.0,
        )
        .unwrap();
        let back = fourier_coefficients(&f, &e, &[2, 2]).unwrap();
        let err = back.values.iter().zip(&planted.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-12, "{err}");
    }

    #[test]
    fn uneven_grid_rejected() {
        let e = OrderedBasis::diagonal(&[2.0 * PI]).unwrap();
        let f = sample(|_| Complex64::new(1.0, 0.0), &[0.0], &[7.0], 0.1).unwrap();
        assert!(matches!(fourier_coefficients(&f, &e, &[2]), Err(Error::GridMismatch(_))));
    }
}
