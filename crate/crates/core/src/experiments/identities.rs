//! Checks of exact identities: Parseval relations and (echo-)quasi-periodicity.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::SampledField;
use crate::geometry::OrderedBasis;
use crate::transforms::{finite_zak, zak, ZakField, ZakStftField};

/// Largest relative defect of both quasi-periodicity identities.
pub fn check_quasiperiodicity(big_f: &ZakField) -> f64 {
    big_f.quasi_periodicity_defect()
}

/// Largest defect of `V(x+k,ξ,η,y) = e^{−ikη} V(x,ξ,η,y−k)` and
/// `V(x,ξ+κ,η,y) = e^{−iκy} V(x,ξ,η,y)` over all grid-aligned shifts that stay
/// inside the array, relative to `max |V|`.
pub fn check_echo_periodicity(g: &ZakStftField) -> f64 {
    let v = &g.field;
    let max = v.max_abs();
    if max == 0.0 {
        return 0.0;
    }
    let shape = v.shape();
    let (nx, nw, ne, ny) = (shape[0], shape[1], shape[2], shape[3]);
    let e = g.basis.column(0)[0];
    let kappa = 2.0 * std::f64::consts::PI / e;
    let (sx, sw, sy) = (g.x_per_cell, g.xi_per_cell, g.y_per_cell);
    let vals = v.values();
    let at = |a: usize, b: usize, c: usize, d: usize| vals[((a * nw + b) * ne + c) * ny + d];
    let eta = v.axis(2);
    let y = v.axis(3);
    let mut worst = 0.0f64;
    for a in 0..nx {
        for b in 0..nw {
            for c in 0..ne {
                let ph_x = Complex64::from_polar(1.0, -e * eta.coord(c));
                for d in 0..ny {
                    if a + sx < nx && d >= sy {
                        let diff = at(a + sx, b, c, d) - ph_x * at(a, b, c, d - sy);
                        worst = worst.max(diff.norm());
                    }
                    if b + sw < nw {
                        let ph = Complex64::from_polar(1.0, -kappa * y.coord(d));
                        worst = worst.max((at(a, b + sw, c, d) - ph * at(a, b, c, d)).norm());
                    }
                }
            }
        }
    }
    worst / max
}

/// `‖Z_Ef‖_{L²(κ(E×E'))} / ‖f‖_{L²}` in standard measure.
pub fn check_zak_parseval(f: &SampledField, basis: &OrderedBasis) -> Result<f64> {
    let n = f.l2_norm();
    if n == 0.0 {
        return Err(Error::Degenerate("‖f‖₂ = 0".into()));
    }
    Ok(zak(f, basis)?.cell_l2_norm() / n)
}

/// Worst `|Σ|Zf|² − N Σ|f|²| / (N Σ|f|²)` over `trials` random complex
/// signals of length `l` and every factorisation `l = M·N` with `M, N ≥ 2`.
pub fn check_finite_parseval(l: usize, trials: usize, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let factorizations: Vec<(usize, usize)> = (2..=l / 2).filter(|m| l % m == 0).map(|m| (m, l / m)).collect();
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let f: Vec<Complex64> = (0..l).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let energy: f64 = f.iter().map(|z| z.norm_sqr()).sum();
        for &(m, n) in &factorizations {
            let z = finite_zak(&f, m, n)?;
            let lhs: f64 = z.iter().map(|v| v.norm_sqr()).sum();
            let rhs = n as f64 * energy;
            worst = worst.max((lhs - rhs).abs() / rhs);
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{sample, Window};
    use crate::transforms::{stft_of_zak, ZakStftOptions};
    use std::f64::consts::PI;

    fn gaussian(step: f64) -> SampledField {
        sample(|x| Complex64::new((-0.5 * x[0] * x[0]).exp(), 0.0), &[-16.0], &[16.0], step).unwrap()
    }

    #[test]
    fn finite_parseval_holds() {
        assert!(check_finite_parseval(64, 5, 1).unwrap() < 1e-12);
    }

    #[test]
    fn parseval_constant_is_sqrt_two_pi() {
        let c = check_zak_parseval(&gaussian(1.0 / 64.0), &OrderedBasis::standard(1)).unwrap();
        assert!((c / (2.0 * PI).sqrt() - 1.0).abs() < 1e-6, "{c}");
        let zero = gaussian(1.0 / 64.0).scale(Complex64::new(0.0, 0.0));
        assert!(check_zak_parseval(&zero, &OrderedBasis::standard(1)).is_err());
    }

    #[test]
    fn quasi_periodicity_detects_planted_defect() {
        let z = zak(&gaussian(1.0 / 32.0), &OrderedBasis::standard(1)).unwrap();
        assert!(check_quasiperiodicity(&z) < 1e-9);
        let n = z.x_per_cell * z.xi_cells * z.xi_per_cell;
        let vals: Vec<Complex64> =
            z.field.values().iter().enumerate().map(|(i, v)| if i < n { v * 1.01 } else { *v }).collect();
        let bad = z.with_values(vals).unwrap();
        assert!(check_quasiperiodicity(&bad) > 5e-3);
    }

    #[test]
    fn echo_identities_hold_and_catch_phase_errors() {
        let opts = ZakStftOptions {
            x_per_cell: Some(8),
            xi_per_cell: 8,
            x_cells: 2,
            xi_cells: 2,
            eta_crop: Some(32),
            y_crop: Some(32),
            ..Default::default()
        };
        let g = stft_of_zak(&gaussian(1.0 / 32.0), &OrderedBasis::standard(1), &Window::standard(2), &opts).unwrap();
        let defect = check_echo_periodicity(&g);
        assert!(defect < 1e-8, "{defect}");
        let half = g.field.len() / 2;
        let ph = Complex64::from_polar(1.0, 0.01);
        let vals: Vec<Complex64> = g.field.values().iter().enumerate().map(|(i, v)| if i < half { v * ph } else { *v }).collect();
        assert!(check_echo_periodicity(&g.with_values(vals).unwrap()) >= 5e-3);
        let zero = g.with_values(vec![Complex64::new(0.0, 0.0); g.field.len()]).unwrap();
        assert_eq!(check_echo_periodicity(&zero), 0.0);
    }
}
