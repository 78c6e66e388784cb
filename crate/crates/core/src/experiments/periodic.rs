//! Coefficient and STFT characterisations of `2π`-periodic functions.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Exponent, MixedExponent, SampledField, Weight, Window};
use crate::geometry::OrderedBasis;
use crate::norms::{modulation_norm_of_stft, periodic_coefficient_norm, script_norm_of_stft, LebesgueSpec, ModKind};
use crate::transforms::{stft_with, StftOptions};

use super::equivalence::{family_rows, Level};
use super::family::{Signal, SignalFamily, SignalShape};
use super::report::EquivalenceReport;

/// Grid controls for [`check_periodic_modulation`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PeriodicOptions {
    /// The signal is sampled on `[−periods·2π, periods·2π)`.
    pub periods: usize,
    pub coarse_per_period: usize,
    pub fine_per_period: usize,
    pub x_stride: usize,
    /// Frequencies are kept up to `max |m| + margin`.
    pub xi_margin: f64,
}

impl Default for PeriodicOptions {
    fn default() -> Self {
        Self { periods: 3, coarse_per_period: 256, fine_per_period: 512, x_stride: 8, xi_margin: 8.0 }
    }
}

/// Scalars applied to every member for the homogeneity check. Multiplying by
/// `2i` or `1/4` commutes exactly with every rounding step.
pub const EXACT_SCALARS: [Complex64; 2] = [Complex64::new(0.0, 2.0), Complex64::new(0.25, 0.0)];
/// A generic scalar, reported but not part of the verdict.
pub const GENERIC_SCALAR: Complex64 = Complex64::new(0.3, 1.1);
pub const HOMOGENEITY_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeriodicReport {
    pub q: f64,
    pub r: f64,
    /// Coefficient norm against `‖ξ ↦ ‖V_φf(·,ξ)‖_{L^r([0,2π])}‖_{L^q}`.
    pub script: EquivalenceReport,
    /// Coefficient norm against `M^{∞,q}`.
    pub modulation: EquivalenceReport,
    /// Worst relative homogeneity defect over both sides for [`EXACT_SCALARS`].
    pub homogeneity: f64,
    pub homogeneity_generic: f64,
    pub passed: bool,
}

struct Sides {
    coefficient: f64,
    script: f64,
    modulation: f64,
}

fn max_frequency(signals: &[Signal]) -> f64 {
    signals.iter().map(Signal::max_frequency).fold(0.0, f64::max)
}

#[allow(clippy::too_many_arguments)]
fn sides(
    s: &Signal,
    level: Level,
    q: f64,
    r: f64,
    omega0: &Weight,
    phi: &Window,
    xi_limit: f64,
    opts: &PeriodicOptions,
) -> Result<Sides> {
    let per = match level {
        Level::Coarse => opts.coarse_per_period,
        Level::Fine => opts.fine_per_period,
    };
    let half = opts.periods as f64 * 2.0 * PI;
    let f: SampledField = s.sample(-half, half, 2.0 * PI / per as f64)?;
    let v = stft_with(
        &f,
        phi,
        &StftOptions {
            x_stride: opts.x_stride,
            x_range: Some((vec![0.0], vec![2.0 * PI])),
            xi_limit: Some(xi_limit),
            pad: 1,
        },
    )?;
    let qe = MixedExponent::from(Exponent::of(q));
    let omega = Weight::phase_separable(omega0.clone(), 1);
    let e0 = OrderedBasis::diagonal(&[2.0 * PI])?;
    let script = script_norm_of_stft(
        &v,
        ModKind::M,
        &e0,
        &MixedExponent::from(Exponent::of(r)),
        &omega,
        &LebesgueSpec::new(OrderedBasis::standard(1), qe.clone()),
    )?
    .value;
    let std = OrderedBasis::standard(1);
    let modulation =
        modulation_norm_of_stft(&v, ModKind::M, &std, &std, &MixedExponent::from(Exponent::Infinite), &qe, &omega)?.value;
    let coefficient = periodic_coefficient_norm(&s.coefficients()?, &qe, omega0)?.value;
    Ok(Sides { coefficient, script, modulation })
}

/// Compares the coefficient norm `‖c ω₀‖_{ℓ^q}` of trigonometric polynomials
/// with two STFT-side members, for one `(q, r)`.
pub fn check_periodic_modulation(
    family: &SignalFamily,
    q: f64,
    r: f64,
    omega0: &Weight,
    phi: &Window,
    opts: &PeriodicOptions,
    spread_bound: f64,
) -> Result<PeriodicReport> {
    if phi.dim() != 1 {
        return Err(Error::DimensionMismatch("periodic checks are one-dimensional".into()));
    }
    let signals = family.signals()?;
    if signals.iter().any(|s| !matches!(s.shape, SignalShape::Trig { .. })) {
        return Err(Error::InvalidParameter("the family must consist of trigonometric polynomials".into()));
    }
    let xi_limit = max_frequency(&signals) + opts.xi_margin;
    let eval = |s: &Signal, l: Level| sides(s, l, q, r, omega0, phi, xi_limit, opts);
    let script_rows = family_rows(&signals, |s, l| {
        let v = eval(s, l)?;
        Ok((v.coefficient, v.script))
    })?;
    let mod_rows = family_rows(&signals, |s, l| {
        let v = eval(s, l)?;
        Ok((v.coefficient, v.modulation))
    })?;
    let label_b = format!("‖ξ ↦ ‖V_φf(·,ξ)‖_L^{r}([0,2π))‖_L^{q}");
    let script = EquivalenceReport::from_rows(format!("periodic-q{q}-r{r}"), format!("‖c‖_ℓ^{q}"), label_b, script_rows, spread_bound);
    let modulation =
        EquivalenceReport::from_rows(format!("periodic-q{q}-minf"), format!("‖c‖_ℓ^{q}"), format!("M^(∞,{q})"), mod_rows, spread_bound);

    let defect = |lambda: Complex64| -> Result<f64> {
        let mut worst = 0.0f64;
        for s in &signals {
            let a = eval(s, Level::Coarse)?;
            let b = eval(&s.scaled(lambda), Level::Coarse)?;
            let n = lambda.norm();
            for (x, y) in [(a.coefficient, b.coefficient), (a.script, b.script), (a.modulation, b.modulation)] {
                worst = worst.max((y - n * x).abs() / (n * x));
            }
        }
        Ok(worst)
    };
    let mut homogeneity = 0.0f64;
    for l in EXACT_SCALARS {
        homogeneity = homogeneity.max(defect(l)?);
    }
    let homogeneity_generic = defect(GENERIC_SCALAR)?;
    let passed = script.passed && modulation.passed && homogeneity <= HOMOGENEITY_TOLERANCE;
    Ok(PeriodicReport { q, r, script, modulation, homogeneity, homogeneity_generic, passed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::FamilyKind;

    #[test]
    fn single_frequency_coefficient_side_is_exact() {
        let s = Signal { id: "e3".into(), shape: SignalShape::Trig { terms: vec![(3, Complex64::new(1.0, 0.0))] } };
        let w = Weight::polynomial(1.0);
        let out = sides(&s, Level::Coarse, 2.0, 2.0, &w, &Window::standard(1), 11.0, &PeriodicOptions::default()).unwrap();
        assert_eq!(out.coefficient, w.eval(&[3.0]));
        assert!(out.script > 0.0 && out.modulation > 0.0);
    }

    #[test]
    fn small_family_passes_for_q2() {
        let fam = SignalFamily::new(FamilyKind::TrigPolynomials, vec![9.0, 8.0], 3, 4);
        let opts = PeriodicOptions { coarse_per_period: 128, fine_per_period: 256, ..Default::default() };
        let rep = check_periodic_modulation(&fam, 2.0, 2.0, &Weight::one(), &Window::standard(1), &opts, 3.0).unwrap();
        assert!(rep.homogeneity <= HOMOGENEITY_TOLERANCE, "{}", rep.homogeneity);
        assert!(rep.script.spread <= 3.0 && rep.script.drift <= 0.05, "{:?}", rep.script);
    }
}
