//! Gelfand-Shilov type decay fits and the factorial bound used for test
//! functions.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::field::SampledField;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecayMode {
    /// `log F ≤ C − r ρ` on the upper envelope.
    Decay,
    /// `log F ≥ C + r ρ` on the lower envelope.
    Growth,
}

/// Fit of `log F` against `ρ = |x|^{1/s} + |ξ|^{1/σ}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayModel {
    pub s: f64,
    pub sigma: f64,
    pub mode: DecayMode,
    /// Fitted rate; positive means decay (or growth) at that rate.
    pub r: f64,
    pub intercept: f64,
    /// Root mean square of the envelope residuals.
    pub residual: f64,
    /// Rates fitted on the inner and outer halves of the shells.
    pub r_inner: f64,
    pub r_outer: f64,
    /// Outer rate exceeds the inner one by more than [`SUPER_RATIO`].
    pub super_exponential: bool,
    pub shells: usize,
    /// The envelope points `(ρ, log F)` entering the fit.
    pub envelope: Vec<(f64, f64)>,
}

/// Ratio of outer to inner envelope slope that flags faster-than-fitted decay.
pub const SUPER_RATIO: f64 = 1.2;
/// Values below this fraction of the maximum are treated as round-off.
pub const FLOOR: f64 = 1e-12;

impl DecayModel {
    /// Membership needs a positive rate.
    pub fn is_member(&self) -> bool {
        self.r > 0.0
    }
}

fn line_fit(pts: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let icpt = my - slope * mx;
    let rms = (pts.iter().map(|p| (p.1 - icpt - slope * p.0).powi(2)).sum::<f64>() / n).sqrt();
    (slope, icpt, rms)
}

/// Fits the envelope of `log |F|` over `shells` equal-width shells in `ρ` on a
/// 2-axis field `(x, ξ)`. Values under `FLOOR · max` are ignored.
pub fn fit_gs_decay(big_f: &SampledField, s: f64, sigma: f64, mode: DecayMode, shells: usize) -> Result<DecayModel> {
    if !(s > 0.0 && sigma > 0.0) {
        return Err(Error::InvalidParameter("s and σ must be positive".into()));
    }
    if big_f.dim() != 2 {
        return Err(Error::DimensionMismatch("decay fits take a field on ℝ²".into()));
    }
    if shells < 4 {
        return Err(Error::InvalidParameter("at least four shells are needed".into()));
    }
    let max = big_f.max_abs();
    if max == 0.0 {
        return Err(Error::Degenerate("F vanishes identically".into()));
    }
    let pts: Vec<(f64, f64)> = (0..big_f.len())
        .filter_map(|i| {
            let v = big_f.values()[i].norm();
            if v <= FLOOR * max {
                return None;
            }
            let p = big_f.standard_point(i);
            Some((p[0].abs().powf(1.0 / s) + p[1].abs().powf(1.0 / sigma), v.ln()))
        })
        .collect();
    let rho_max = pts.iter().map(|p| p.0).fold(0.0, f64::max);
    let width = rho_max / shells as f64;
    let mut env: Vec<Option<(f64, f64)>> = vec![None; shells];
    for &(rho, lv) in &pts {
        let k = if width > 0.0 { ((rho / width) as usize).min(shells - 1) } else { 0 };
        let better = match (env[k], mode) {
            (None, _) => true,
            (Some((_, best)), DecayMode::Decay) => lv > best,
            (Some((_, best)), DecayMode::Growth) => lv < best,
        };
        if better {
            env[k] = Some((rho, lv));
        }
    }
    let env: Vec<(f64, f64)> = env.into_iter().flatten().collect();
    if env.len() < 4 {
        return Err(Error::Degenerate("too few populated shells".into()));
    }
    let sign = match mode {
        DecayMode::Decay => -1.0,
        DecayMode::Growth => 1.0,
    };
    let (slope, intercept, residual) = line_fit(&env);
    let half = env.len() / 2;
    let r_inner = sign * line_fit(&env[..half]).0;
    let r_outer = sign * line_fit(&env[half..]).0;
    let r = sign * slope;
    Ok(DecayModel {
        s,
        sigma,
        mode,
        r: if r.abs() < 1e-12 { 0.0 } else { r },
        intercept,
        residual,
        r_inner,
        r_outer,
        super_exponential: r_inner > 0.0 && r_outer > SUPER_RATIO * r_inner,
        shells: env.len(),
        envelope: env,
    })
}

/// Measured constant of `|t|^β e^{−r|t|^{1/s}} ≤ C h^β β!^s`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactorialBound {
    pub r: f64,
    pub s: f64,
    /// `(β, (sup_t t^β e^{−r t^{1/s}} / β!^s)^{1/β})`, `β ≥ 1`.
    pub per_beta: Vec<(u32, f64)>,
    pub h: f64,
    /// `(r/(se))^{−s}`.
    pub threshold: f64,
    /// Large-`β` limit `(s/r)^s` of the per-`β` ratio, from Stirling's formula.
    pub limit: f64,
    /// `h` bounded and at most `threshold · 1.1`.
    pub passed: bool,
}

/// `max_t (β ln t − r t^{1/s})` by golden-section search in `ln t`; the
/// objective is concave there.
fn log_sup(beta: f64, r: f64, s: f64) -> f64 {
    let g = |u: f64| beta * u - r * (u / s).exp();
    if beta == 0.0 {
        return 0.0;
    }
    // The maximiser ln t* = s ln(βs/r) lies well inside this bracket.
    let (mut a, mut b) = (-60.0f64, 60.0f64 * s.max(1.0) + beta.ln().max(0.0) * s + 10.0);
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    for _ in 0..200 {
        if g(c) > g(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - phi * (b - a);
        d = a + phi * (b - a);
    }
    g(0.5 * (a + b))
}

pub fn check_factorial_bound(r: f64, s: f64, beta_max: u32) -> Result<FactorialBound> {
    if !(r > 0.0 && s > 0.0) {
        return Err(Error::InvalidParameter("r and s must be positive".into()));
    }
    if beta_max == 0 {
        return Err(Error::InvalidParameter("beta_max must be at least 1".into()));
    }
    let per_beta: Vec<(u32, f64)> = (1..=beta_max)
        .map(|b| {
            let bf = b as f64;
            (b, ((log_sup(bf, r, s) - s * ln_gamma(bf + 1.0)) / bf).exp())
        })
        .collect();
    let h = per_beta.iter().map(|p| p.1).fold(0.0, f64::max);
    let threshold = (r / (s * std::f64::consts::E)).powf(-s);
    Ok(FactorialBound {
        r,
        s,
        per_beta,
        h,
        threshold,
        limit: (s / r).powf(s),
        passed: h.is_finite() && h <= threshold * 1.1,
    })
}

/// The `β = 0` ratio `sup_t e^{−r|t|^{1/s}} / 0!^s`.
pub fn factorial_ratio_at_zero(r: f64, s: f64) -> f64 {
    log_sup(0.0, r, s).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::sample;
    use num_complex::Complex64;

    fn envelope(s: f64) -> SampledField {
        sample(|x| Complex64::new(0.5f64.sqrt() * (-(x[0] * x[0] + x[1] * x[1]) / 4.0).exp(), 0.0), &[-12.0, -12.0], &[12.0, 12.0], s)
            .unwrap()
    }

    #[test]
    fn gaussian_envelope_rate() {
        let m = fit_gs_decay(&envelope(0.125), 0.5, 0.5, DecayMode::Decay, 40).unwrap();
        assert!((m.r - 0.25).abs() < 1e-6, "{m:?}");
        assert!(!m.super_exponential && m.is_member());
        let m1 = fit_gs_decay(&envelope(0.125), 1.0, 1.0, DecayMode::Decay, 40).unwrap();
        assert!(m1.super_exponential, "{m1:?}");
    }

    #[test]
    fn constant_field_is_not_a_member() {
        let f = sample(|_| Complex64::new(2.0, 0.0), &[-4.0, -4.0], &[4.0, 4.0], 0.25).unwrap();
        let m = fit_gs_decay(&f, 0.5, 0.5, DecayMode::Decay, 10).unwrap();
        assert_eq!(m.r, 0.0);
        assert!(!m.is_member());
        let z = f.scale(Complex64::new(0.0, 0.0));
        assert!(fit_gs_decay(&z, 0.5, 0.5, DecayMode::Decay, 10).is_err());
    }

    #[test]
    fn growth_mode_recovers_rate() {
        let f = sample(|x| Complex64::new((0.3 * (x[0].abs() + x[1].abs())).exp(), 0.0), &[-6.0, -6.0], &[6.0, 6.0], 0.25).unwrap();
        let m = fit_gs_decay(&f, 1.0, 1.0, DecayMode::Growth, 12).unwrap();
        assert!((m.r - 0.3).abs() < 1e-9, "{m:?}");
    }

    #[test]
    fn sup_matches_critical_point() {
        // t* = (βs/r)^s gives β s ln(βs/r) − βs.
        for (b, r, s) in [(1.0, 1.0, 1.0), (7.0, 2.0, 1.0), (12.0, 1.0, 0.5), (30.0, 0.7, 1.5)] {
            let closed: f64 = b * s * (b * s / r as f64).ln() - b * s;
            assert!((log_sup(b, r, s) - closed).abs() < 1e-9 * closed.abs().max(1.0));
        }
        assert_eq!(factorial_ratio_at_zero(1.0, 1.0), 1.0);
    }

    #[test]
    fn factorial_bound_scaling() {
        let a = check_factorial_bound(1.0, 1.0, 60).unwrap();
        let b = check_factorial_bound(2.0, 1.0, 60).unwrap();
        assert!((b.h / a.h - 0.5).abs() < 1e-9);
        let c = check_factorial_bound(1.0, 0.5, 60).unwrap();
        let d = check_factorial_bound(2.0, 0.5, 60).unwrap();
        assert!((d.h / c.h - 0.5f64.sqrt()).abs() < 1e-9);
        // The ratio increases in β towards (s/r)^s from below.
        assert!(a.per_beta.windows(2).all(|w| w[1].1 > w[0].1));
        assert!(a.h < a.limit && a.h > 0.9 * a.limit);
        assert!(a.passed);
    }
}
