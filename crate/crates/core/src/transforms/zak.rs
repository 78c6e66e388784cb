//! Zak transforms: the finite model on `ℂ^L` and the lattice model
//! `Z_Ef(x,ξ) = Σ_{j∈Λ_E} f(x−j) e^{i⟨j,ξ⟩}`.
//!
//! In basis coordinates `x = T_E u`, `ξ = T_{E'} w` the phase is
//! `⟨j,ξ⟩ = 2π n·w`, so everything below works on the unit torus in `w`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Axis, SampledField};
use crate::geometry::{dual_basis, product_basis, OrderedBasis};

/// Largest relative boundary magnitude accepted by [`zak`].
pub const DECAY_LIMIT: f64 = 1e-12;
/// Minimum number of lattice cells the input box must cover per axis.
pub const MIN_CELLS: usize = 8;
/// Quasi-periodicity tolerance demanded by [`inverse_zak`].
pub const INVERSE_TOLERANCE: f64 = 1e-6;

/// `Zf(n,k) = Σ_{m<N} f((n − mM) mod L) e^{2πimk/N}` as an `M × N` row-major array.
pub fn finite_zak(f: &[Complex64], m: usize, n: usize) -> Result<Vec<Complex64>> {
    let l = f.len();
    if m == 0 || n == 0 || m * n != l {
        return Err(Error::InvalidParameter(format!("M·N = {m}·{n} does not equal L = {l}")));
    }
    let ifft = crate::fft::inverse(n);
    let mut out = vec![Complex64::new(0.0, 0.0); l];
    for (row, chunk) in out.chunks_mut(n).enumerate() {
        for (mi, c) in chunk.iter_mut().enumerate() {
            *c = f[(row + l - (mi * m) % l) % l];
        }
        // The inverse FFT carries the e^{+2πimk/N} sign without normalisation.
        ifft.process(chunk);
    }
    Ok(out)
}

/// Grid controls for [`zak_with`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZakOptions {
    /// Number of unit cells stored along each `u` axis.
    pub x_cells: usize,
    /// Number of unit cells stored along each `w` axis.
    pub xi_cells: usize,
    /// Samples per unit cell in `u`; must divide the input's samples per cell.
    pub x_per_cell: Option<usize>,
    /// Samples per unit cell in `w`; defaults to the number of lattice
    /// translates inside the input box, which makes [`inverse_zak`] exact.
    pub xi_per_cell: Option<usize>,
}

impl Default for ZakOptions {
    fn default() -> Self {
        Self { x_cells: 2, xi_cells: 2, x_per_cell: None, xi_per_cell: None }
    }
}

/// The Zak transform sampled on `x_cells` × `xi_cells` unit cells in basis
/// coordinates `(u, w)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ZakField {
    /// Axes `u_1..u_d, w_1..w_d`; the attached basis is `E × E'`.
    pub field: SampledField,
    pub basis: OrderedBasis,
    pub x_cells: usize,
    pub xi_cells: usize,
    pub x_per_cell: usize,
    pub xi_per_cell: usize,
    /// Integer range `lo..=hi` (per axis) of the lattice translates summed.
    pub lattice_lo: Vec<i64>,
    pub lattice_hi: Vec<i64>,
    /// Largest boundary magnitude of the input relative to its maximum.
    pub boundary_mass: f64,
}

/// Samples per unit cell and the integer offset of the first sample.
pub(crate) fn cell_layout(axis: &Axis) -> Result<(usize, i64)> {
    let s = (1.0 / axis.step).round();
    if s < 1.0 || ((s * axis.step) - 1.0).abs() > 1e-9 {
        return Err(Error::GridMismatch(format!(
            "step {} does not divide the unit cell evenly",
            axis.step
        )));
    }
    let o = axis.origin * s;
    if (o - o.round()).abs() > 1e-6 {
        return Err(Error::GridMismatch(format!("grid origin {} is not aligned to the cells", axis.origin)));
    }
    Ok((s as usize, o.round() as i64))
}

fn boundary_ratio(f: &SampledField) -> f64 {
    let max = f.max_abs();
    if max == 0.0 {
        return 0.0;
    }
    let shape = f.shape();
    let mut edge = 0.0f64;
    for (i, v) in f.values().iter().enumerate() {
        let idx = f.multi_index(i);
        if idx.iter().zip(&shape).any(|(&j, &n)| j == 0 || j + 1 == n) {
            edge = edge.max(v.norm());
        }
    }
    edge / max
}

pub fn zak(f: &SampledField, basis: &OrderedBasis) -> Result<ZakField> {
    zak_with(f, basis, &ZakOptions::default())
}

/// Evaluates the defining lattice sum at every stored `(u, w)`.
pub fn zak_with(f: &SampledField, basis: &OrderedBasis, opts: &ZakOptions) -> Result<ZakField> {
    let d = basis.dim();
    let fe = f.in_basis_coords(basis)?;
    if opts.x_cells == 0 || opts.xi_cells == 0 {
        return Err(Error::InvalidParameter("cell counts must be positive".into()));
    }
    let mut s_in = Vec::with_capacity(d);
    let mut off = Vec::with_capacity(d);
    for a in fe.axes() {
        let (s, o) = cell_layout(a)?;
        if a.count / s < MIN_CELLS {
            return Err(Error::GridMismatch(format!(
                "the box covers {} lattice cells along an axis, at least {MIN_CELLS} are needed",
                a.count / s
            )));
        }
        s_in.push(s);
        off.push(o);
    }
    let mass = boundary_ratio(&fe);
    if mass > DECAY_LIMIT {
        return Err(Error::InsufficientDecay { mass, limit: DECAY_LIMIT });
    }
    let s_out: Vec<usize> = match opts.x_per_cell {
        Some(s) => vec![s; d],
        None => s_in.clone(),
    };
    for k in 0..d {
        if s_out[k] == 0 || s_in[k] % s_out[k] != 0 {
            return Err(Error::GridMismatch(format!(
                "{} samples per cell do not subsample the input's {}",
                s_out[k], s_in[k]
            )));
        }
    }
    // Translates n with u − n inside the box: `lat_*` for the first cell,
    // `sum_hi` for all stored cells.
    let mut lat_lo = Vec::with_capacity(d);
    let mut lat_hi = Vec::with_capacity(d);
    let mut sum_hi = Vec::with_capacity(d);
    for k in 0..d {
        let count = fe.axis(k).count as i64;
        let s = s_in[k] as i64;
        let u_max = opts.x_cells as i64 * s - 1;
        lat_lo.push(-(off[k] + count - 1).div_euclid(s));
        lat_hi.push((s - 1 - off[k]).div_euclid(s));
        sum_hi.push((u_max - off[k]).div_euclid(s));
    }
    let p = opts.xi_per_cell.unwrap_or_else(|| {
        (0..d)
            .map(|k| (lat_hi[k] - lat_lo[k] + 1) as usize)
            .max()
            .unwrap_or(1)
    });
    if p == 0 {
        return Err(Error::InvalidParameter("xi_per_cell must be positive".into()));
    }

    let nu: Vec<usize> = (0..d).map(|k| opts.x_cells * s_out[k]).collect();
    let nw = opts.xi_cells * p;
    let n_u: usize = nu.iter().product();
    let n_w = nw.pow(d as u32);
    let twiddle: Vec<Complex64> = (0..p).map(|m| Complex64::from_polar(1.0, 2.0 * PI * m as f64 / p as f64)).collect();
    let in_shape = fe.shape();
    let in_strides = fe.strides();

    let blocks: Vec<Vec<Complex64>> = (0..n_u)
        .into_par_iter()
        .map(|iu| {
            let mut rem = iu;
            let mut ui = vec![0i64; d]; // position in input-sample units
            for k in (0..d).rev() {
                ui[k] = (rem % nu[k]) as i64 * (s_in[k] / s_out[k]) as i64;
                rem /= nu[k];
            }
            // Collect (n, f_E(u − n)) for every translate landing in the box.
            let mut terms: Vec<(Vec<i64>, Complex64)> = Vec::new();
            let mut n = lat_lo.clone();
            'outer: loop {
                let mut flat = 0usize;
                let mut inside = true;
                for k in 0..d {
                    let j = ui[k] - n[k] * s_in[k] as i64 - off[k];
                    if j < 0 || j >= in_shape[k] as i64 {
                        inside = false;
                        break;
                    }
                    flat += j as usize * in_strides[k];
                }
                if inside {
                    let v = fe.values()[flat];
                    if v.norm_sqr() > 0.0 {
                        terms.push((n.clone(), v));
                    }
                }
                for k in (0..d).rev() {
                    if n[k] < sum_hi[k] {
                        n[k] += 1;
                        continue 'outer;
                    }
                    n[k] = lat_lo[k];
                }
                break;
            }
            let mut out = vec![Complex64::new(0.0, 0.0); n_w];
            for (iw, o) in out.iter_mut().enumerate() {
                let mut rem = iw;
                let mut l = vec![0i64; d];
                for k in (0..d).rev() {
                    l[k] = (rem % nw) as i64;
                    rem /= nw;
                }
                let mut acc = Complex64::new(0.0, 0.0);
                for (n, v) in &terms {
                    // e^{2πi n·w} with w = l/P, reduced exactly modulo P.
                    let m: i64 = n.iter().zip(&l).map(|(a, b)| a * b).sum();
                    acc += v * twiddle[m.rem_euclid(p as i64) as usize];
                }
                *o = acc;
            }
            out
        })
        .collect();

    let mut values = Vec::with_capacity(n_u * n_w);
    for b in blocks {
        values.extend(b);
    }
    let mut axes: Vec<Axis> = nu.iter().zip(&s_out).map(|(&n, &s)| Axis::line(0.0, 1.0 / s as f64, n)).collect();
    axes.extend((0..d).map(|_| Axis::line(0.0, 1.0 / p as f64, nw)));
    let field = SampledField::new(axes, values)?.with_basis(product_basis(basis, &dual_basis(basis))?)?;
    Ok(ZakField {
        field,
        basis: basis.clone(),
        x_cells: opts.x_cells,
        xi_cells: opts.xi_cells,
        x_per_cell: s_out[0],
        xi_per_cell: p,
        lattice_lo: lat_lo,
        lattice_hi: lat_hi,
        boundary_mass: mass,
    })
}

impl ZakField {
    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    fn nu(&self) -> usize {
        self.x_cells * self.x_per_cell
    }

    fn nw(&self) -> usize {
        self.xi_cells * self.xi_per_cell
    }

    /// Same metadata, new values (used to plant defects in tests).
    pub fn with_values(&self, values: Vec<Complex64>) -> Result<Self> {
        Ok(Self { field: self.field.with_values(values)?, ..self.clone() })
    }

    /// Value at arbitrary integer sample positions `(iu, iw)` through the
    /// quasi-periodic extension of the first cell (`d = 1`).
    pub fn extended(&self, iu: i64, iw: i64) -> Complex64 {
        let s = self.x_per_cell as i64;
        let p = self.xi_per_cell as i64;
        let c = iu.div_euclid(s);
        let i = iu.rem_euclid(s) as usize;
        let l = iw.rem_euclid(p);
        let base = self.field.values()[i * self.nw() + l as usize];
        let m = (c * l).rem_euclid(p);
        base * Complex64::from_polar(1.0, 2.0 * PI * m as f64 / p as f64)
    }

    /// Largest defect of `F(u+e_k, w) = e^{2πi w_k} F(u,w)` and
    /// `F(u, w+e_k) = F(u,w)` over the stored cells, relative to `max |F|`.
    pub fn quasi_periodicity_defect(&self) -> f64 {
        let max = self.field.max_abs();
        if max == 0.0 {
            return 0.0;
        }
        let d = self.dim();
        let shape = self.field.shape();
        let strides = self.field.strides();
        let s = self.x_per_cell;
        let p = self.xi_per_cell;
        let vals = self.field.values();
        let mut worst = 0.0f64;
        for (i, v) in vals.iter().enumerate() {
            let idx = self.field.multi_index(i);
            for k in 0..d {
                if idx[k] + s < shape[k] {
                    let l = idx[d + k] % p;
                    let phase = Complex64::from_polar(1.0, 2.0 * PI * l as f64 / p as f64);
                    worst = worst.max((vals[i + s * strides[k]] - phase * v).norm());
                }
                if idx[d + k] + p < shape[d + k] {
                    worst = worst.max((vals[i + p * strides[d + k]] - v).norm());
                }
            }
        }
        worst / max
    }

    /// `(2π)^{-d/2}`-free `L²` norm over one cell `κ(E) × κ(E')` in standard measure.
    pub fn cell_l2_norm(&self) -> f64 {
        let d = self.dim();
        let s = self.x_per_cell;
        let p = self.xi_per_cell;
        let mut acc = 0.0;
        for (i, v) in self.field.values().iter().enumerate() {
            let idx = self.field.multi_index(i);
            if (0..d).all(|k| idx[k] < s && idx[d + k] < p) {
                acc += v.norm_sqr();
            }
        }
        (acc * self.field.quadrature_weight()).sqrt()
    }
}

/// Recovers `f` from the first cell of `F` through the Fourier coefficients
/// of `w ↦ F(u, w)`: `f_E(u − n) = ∫_{[0,1)^d} F(u,w) e^{−2πi n·w} dw`.
pub fn inverse_zak(z: &ZakField) -> Result<SampledField> {
    let defect = z.quasi_periodicity_defect();
    if defect > INVERSE_TOLERANCE {
        return Err(Error::NotQuasiPeriodic(defect));
    }
    let d = z.dim();
    let s = z.x_per_cell;
    let p = z.xi_per_cell;
    let nw = z.nw();
    let nu = z.nu();
    let lo = &z.lattice_lo;
    let hi = &z.lattice_hi;
    let counts: Vec<usize> = (0..d).map(|k| (hi[k] - lo[k] + 1) as usize * s).collect();
    let n_out: usize = counts.iter().product();
    let twiddle: Vec<Complex64> = (0..p).map(|m| Complex64::from_polar(1.0, -2.0 * PI * m as f64 / p as f64)).collect();
    let norm = (p as f64).powi(d as i32);
    let vals = z.field.values();
    let u_strides = crate::field::row_major_strides(&vec![nu; d]);
    let w_strides = crate::field::row_major_strides(&vec![nw; d]);
    let n_wcell = p.pow(d as u32);
    let out: Vec<Complex64> = (0..n_out)
        .into_par_iter()
        .map(|io| {
            // Output coordinate u' = u − n with u' = −hi + io/s per axis.
            let mut rem = io;
            let mut flat_u = 0usize;
            let mut n = vec![0i64; d];
            for k in (0..d).rev() {
                let j = rem % counts[k];
                rem /= counts[k];
                let cell = j / s;
                let within = j % s;
                n[k] = hi[k] - cell as i64;
                flat_u += within * u_strides[k];
            }
            let mut acc = Complex64::new(0.0, 0.0);
            for iw in 0..n_wcell {
                let mut r = iw;
                let mut flat_w = 0usize;
                let mut m = 0i64;
                for k in (0..d).rev() {
                    let l = r % p;
                    r /= p;
                    flat_w += l * w_strides[k];
                    m += n[k] * l as i64;
                }
                acc += vals[flat_u * nw.pow(d as u32) + flat_w] * twiddle[m.rem_euclid(p as i64) as usize];
            }
            acc / norm
        })
        .collect();
    let axes = (0..d)
        .map(|k| Axis::line(-(hi[k] as f64), 1.0 / s as f64, counts[k]))
        .collect();
    Ok(SampledField::new(axes, out)?.with_basis(z.basis.clone())?.into_standard_coords())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::sample;
    use rand::{Rng, SeedableRng};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn direct_finite_zak(f: &[Complex64], m: usize, n: usize) -> Vec<Complex64> {
        let l = f.len();
        let mut out = vec![Complex64::new(0.0, 0.0); l];
        for row in 0..m {
            for k in 0..n {
                for mi in 0..n {
                    let idx = (row as i64 - (mi * m) as i64).rem_euclid(l as i64) as usize;
                    out[row * n + k] += f[idx] * Complex64::from_polar(1.0, 2.0 * PI * (mi * k) as f64 / n as f64);
                }
            }
        }
        out
    }

    #[test]
    fn finite_zak_examples() {
        let z = finite_zak(&[c(1.0), c(0.0), c(0.0), c(0.0)], 2, 2).unwrap();
        assert_eq!(z, vec![c(1.0), c(1.0), c(0.0), c(0.0)]);
        let z = finite_zak(&[c(1.0); 4], 2, 2).unwrap();
        for row in 0..2 {
            assert!((z[row * 2] - c(2.0)).norm() < 1e-15);
            assert!(z[row * 2 + 1].norm() < 1e-15);
        }
        assert!(finite_zak(&[c(1.0); 5], 2, 2).is_err());
    }

    #[test]
    fn finite_zak_matches_direct_sum() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let f: Vec<Complex64> = (0..24).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        for (m, n) in [(4, 6), (6, 4), (3, 8), (2, 12)] {
            let a = finite_zak(&f, m, n).unwrap();
            let b = direct_finite_zak(&f, m, n);
            let err = a.iter().zip(&b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
            assert!(err < 1e-12, "{m}x{n}: {err}");
        }
    }

    fn gaussian(step: f64) -> SampledField {
        sample(|x| c((-x[0] * x[0] / 2.0).exp()), &[-16.0], &[16.0], step).unwrap()
    }

    #[test]
    fn zak_is_quasi_periodic_and_matches_direct_sum() {
        let f = gaussian(1.0 / 64.0);
        let z = zak(&f, &OrderedBasis::standard(1)).unwrap();
        assert!(z.quasi_periodicity_defect() < 1e-9);
        // Direct evaluation at one point with the closed-form Gaussian.
        let (iu, iw) = (37usize, 11usize);
        let x = iu as f64 / z.x_per_cell as f64;
        let xi = 2.0 * PI * iw as f64 / z.xi_per_cell as f64;
        let direct: Complex64 = (-40..=40)
            .map(|j: i64| c((-(x - j as f64).powi(2) / 2.0).exp()) * Complex64::from_polar(1.0, j as f64 * xi))
            .sum();
        let got = z.field.get(&[iu, iw]);
        assert!((got - direct).norm() < 1e-12 * direct.norm().max(1.0));
    }

    #[test]
    fn zak_rejects_poor_decay_and_small_boxes() {
        let slow = sample(|x| c((-x[0].abs() / 2.0).exp()), &[-16.0], &[16.0], 1.0 / 16.0).unwrap();
        assert!(matches!(zak(&slow, &OrderedBasis::standard(1)), Err(Error::InsufficientDecay { .. })));
        let small = sample(|x| c((-x[0] * x[0] * 8.0).exp()), &[-2.0], &[2.0], 1.0 / 16.0).unwrap();
        assert!(matches!(zak(&small, &OrderedBasis::standard(1)), Err(Error::GridMismatch(_))));
    }

    #[test]
    fn zero_field_has_zero_zak() {
        let f = sample(|_| c(0.0), &[-8.0], &[8.0], 1.0 / 8.0).unwrap();
        let z = zak(&f, &OrderedBasis::standard(1)).unwrap();
        assert!(z.field.values().iter().all(|v| v.norm() == 0.0));
        assert_eq!(z.quasi_periodicity_defect(), 0.0);
        assert!(inverse_zak(&z).unwrap().values().iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn parseval_constant_standard_basis() {
        let f = gaussian(1.0 / 64.0);
        let z = zak(&f, &OrderedBasis::standard(1)).unwrap();
        let ratio = z.cell_l2_norm() / f.l2_norm();
        assert!((ratio / (2.0 * PI).sqrt() - 1.0).abs() < 1e-10, "{ratio}");
    }

    #[test]
    fn round_trip_gaussian_and_hermite() {
        for (expr, tol) in [
            (Box::new(|x: &[f64]| c((-x[0] * x[0] / 2.0).exp())) as Box<dyn Fn(&[f64]) -> Complex64 + Sync>, 1e-9),
            (Box::new(|x: &[f64]| c(x[0] * (-x[0] * x[0] / 2.0).exp())), 1e-8),
        ] {
            let f = sample(&expr, &[-16.0], &[16.0], 1.0 / 32.0).unwrap();
            let z = zak(&f, &OrderedBasis::standard(1)).unwrap();
            let g = inverse_zak(&z).unwrap();
            let max = f.max_abs();
            let mut err = 0.0f64;
            for i in 0..g.len() {
                let x = g.point(i)[0];
                if x.abs() <= 0.8 * 16.0 {
                    let j = f.axis(0).index_of(x).unwrap();
                    err = err.max((g.values()[i] - f.values()[j]).norm());
                }
            }
            assert!(err <= tol * max, "{err}");
        }
    }

    #[test]
    fn scaled_basis_parseval_constant() {
        let e = OrderedBasis::diagonal(&[2.0]).unwrap();
        let f = gaussian(1.0 / 64.0);
        let z = zak(&f, &e).unwrap();
        assert!(z.quasi_periodicity_defect() < 1e-9);
        // Measured constant: |κ(E')|^{1/2} = (2π/2)^{1/2}.
        let ratio = z.cell_l2_norm() / f.l2_norm();
        assert!((ratio - PI.sqrt()).abs() < 1e-9, "{ratio}");
    }

    #[test]
    fn planted_defect_is_detected() {
        let f = gaussian(1.0 / 32.0);
        let z = zak(&f, &OrderedBasis::standard(1)).unwrap();
        let s = z.x_per_cell;
        let nw = z.xi_cells * z.xi_per_cell;
        let mut vals = z.field.values().to_vec();
        for v in vals[s * nw..2 * s * nw].iter_mut() {
            *v *= 1.01;
        }
        let bad = z.with_values(vals).unwrap();
        let defect = bad.quasi_periodicity_defect();
        assert!(defect > 5e-3, "{defect}");
        assert!(matches!(inverse_zak(&bad), Err(Error::NotQuasiPeriodic(_))));
    }

    #[test]
    fn two_dimensional_skew_basis() {
        let e = OrderedBasis::from_columns(vec![vec![1.0, 0.0], vec![0.5, 1.0]]).unwrap();
        let f = crate::field::sample_in_basis(
            |x| c((-(x[0] * x[0] + x[1] * x[1]) / 2.0).exp()),
            &e,
            &[-10.0, -10.0],
            &[10.0, 10.0],
            0.25,
        )
        .unwrap();
        let z = zak_with(&f, &e, &ZakOptions { x_per_cell: Some(2), ..Default::default() }).unwrap();
        assert!(z.quasi_periodicity_defect() < 1e-9);
        let g = inverse_zak(&z).unwrap();
        // Compare at the centre sample u = (0, 0).
        let i0 = g.axis(0).index_of(0.0).unwrap();
        let i1 = g.axis(1).index_of(0.0).unwrap();
        assert!((g.get(&[i0, i1]) - c(1.0)).norm() < 1e-9);
    }
}
