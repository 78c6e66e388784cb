//! Gaussian analysis windows.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};

/// `φ(x) = e^{i⟨x,μ⟩} ∏_k e^{−(x_k−c_k)²/(2 w_k²)}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Window {
    pub widths: Vec<f64>,
    pub center: Vec<f64>,
    pub modulation: Vec<f64>,
}

/// Isotropic Gaussian window with dimension taken from `center`.
pub fn gaussian_window(width: f64, center: &[f64], modulation: &[f64]) -> Result<Window> {
    Window::tensor(vec![width; center.len()], center.to_vec(), modulation.to_vec())
}

impl Window {
    pub fn tensor(widths: Vec<f64>, center: Vec<f64>, modulation: Vec<f64>) -> Result<Self> {
        let d = widths.len();
        if d == 0 {
            return Err(Error::InvalidParameter("window needs at least one axis".into()));
        }
        if center.len() != d || modulation.len() != d {
            return Err(Error::DimensionMismatch("window width/center/modulation lengths".into()));
        }
        if let Some(w) = widths.iter().find(|w| !(**w > 0.0) || !w.is_finite()) {
            return Err(Error::InvalidParameter(format!("window width must be positive, got {w}")));
        }
        Ok(Self { widths, center, modulation })
    }

    /// Unit Gaussian `e^{−|x|²/2}` on ℝ^d.
    pub fn standard(d: usize) -> Self {
        Self::tensor(vec![1.0; d], vec![0.0; d], vec![0.0; d]).expect("valid")
    }

    pub fn dim(&self) -> usize {
        self.widths.len()
    }

    pub fn eval(&self, x: &[f64]) -> Complex64 {
        let mut quad = 0.0;
        let mut phase = 0.0;
        for k in 0..self.dim() {
            let t = (x[k] - self.center[k]) / self.widths[k];
            quad += t * t;
            phase += x[k] * self.modulation[k];
        }
        Complex64::from_polar((-0.5 * quad).exp(), phase)
    }

    /// Factor of the tensor product along axis `k` at coordinate `t`.
    pub fn eval_axis(&self, k: usize, t: f64) -> Complex64 {
        let u = (t - self.center[k]) / self.widths[k];
        Complex64::from_polar((-0.5 * u * u).exp(), t * self.modulation[k])
    }

    /// Closed-form `‖φ‖₂ = π^{d/4} ∏ w_k^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        self.widths
            .iter()
            .map(|w| (std::f64::consts::PI.sqrt() * w).sqrt())
            .product()
    }

    /// Fraction of `‖φ‖₂` lying outside a box of the given half-widths centred
    /// on the window.
    pub fn outside_mass(&self, half_widths: &[f64]) -> f64 {
        // |φ|² along axis k is e^{−t²/w²}; the mass beyond ±h is erfc(h/w).
        let log_inside: f64 = self
            .widths
            .iter()
            .zip(half_widths)
            .map(|(w, h)| (-erfc(h / w)).ln_1p())
            .sum();
        (-log_inside.exp_m1()).max(0.0).sqrt()
    }

    /// Splits a tensor window on ℝ^{d1+d2} into its factors.
    pub fn split(&self, d1: usize) -> Result<(Window, Window)> {
        if d1 == 0 || d1 >= self.dim() {
            return Err(Error::DimensionMismatch(format!("cannot split a {}-d window at {d1}", self.dim())));
        }
        let a = Window::tensor(
            self.widths[..d1].to_vec(),
            self.center[..d1].to_vec(),
            self.modulation[..d1].to_vec(),
        )?;
        let b = Window::tensor(
            self.widths[d1..].to_vec(),
            self.center[d1..].to_vec(),
            self.modulation[d1..].to_vec(),
        )?;
        Ok((a, b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::sample;
    use std::f64::consts::PI;

    #[test]
    fn unit_window_at_origin() {
        let w = gaussian_window(1.0, &[0.0], &[0.0]).unwrap();
        assert_eq!(w.eval(&[0.0]), Complex64::new(1.0, 0.0));
        assert!(gaussian_window(0.0, &[0.0], &[0.0]).is_err());
        assert!(gaussian_window(-1.0, &[0.0], &[0.0]).is_err());
    }

    #[test]
    fn squared_norm_is_sqrt_pi() {
        let w = gaussian_window(1.0, &[0.0], &[0.0]).unwrap();
        let f = sample(|x| w.eval(x), &[-16.0], &[16.0], 1.0 / 64.0).unwrap();
        assert!((f.l2_norm().powi(2) - PI.sqrt()).abs() < 1e-10);
        assert!((w.l2_norm().powi(2) - PI.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn sampled_norm_matches_closed_form_in_two_dims() {
        let w = Window::tensor(vec![0.7, 1.6], vec![0.3, -0.2], vec![1.0, 2.0]).unwrap();
        let f = sample(|x| w.eval(x), &[-12.0, -12.0], &[12.0, 12.0], 1.0 / 16.0).unwrap();
        assert!((f.l2_norm() - w.l2_norm()).abs() < 1e-6);
    }

    #[test]
    fn modulation_keeps_modulus() {
        let plain = gaussian_window(1.3, &[0.5], &[0.0]).unwrap();
        let modded = gaussian_window(1.3, &[0.5], &[3.0]).unwrap();
        for x in [-2.0, -0.1, 0.0, 0.7, 4.0] {
            assert!((plain.eval(&[x]).norm() - modded.eval(&[x]).norm()).abs() < 1e-15);
        }
    }

    #[test]
    fn outside_mass_tracks_width() {
        let narrow = Window::standard(1);
        assert!(narrow.outside_mass(&[16.0]) < 1e-50);
        let wide = gaussian_window(4.0, &[0.0], &[0.0]).unwrap();
        assert!(wide.outside_mass(&[16.0]) > 1e-5);
    }
}
