//! Weight functions, evaluated in log space.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A positive weight on ℝ^n.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Weight {
    Constant { value: f64 },
    /// `⟨x⟩^t = (1+|x|²)^{t/2}`.
    Polynomial { t: f64 },
    /// `e^{r|x|^{1/s}}`.
    Exponential { r: f64, s: f64 },
    /// Product of weights on consecutive coordinate blocks of the given sizes.
    Tensor { factors: Vec<Weight>, dims: Vec<usize> },
    /// `x ↦ inner(x[start..start+len])`; with `start = d, len = d` on ℝ^{2d}
    /// this is a phase-separable weight `ω(x,ξ) = ω₀(ξ)`.
    Slice { start: usize, len: usize, inner: Box<Weight> },
    /// `Θ_ρ v = v·⟨·⟩^ρ`.
    Theta { base: Box<Weight>, rho: f64 },
    /// A weight carrying its submultiplicative majorant `v`.
    Moderate { weight: Box<Weight>, majorant: Box<Weight> },
}

impl Default for Weight {
    fn default() -> Self {
        Weight::one()
    }
}

fn norm2(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

impl Weight {
    pub fn one() -> Self {
        Weight::Constant { value: 1.0 }
    }

    pub fn polynomial(t: f64) -> Self {
        Weight::Polynomial { t }
    }

    pub fn exponential(r: f64, s: f64) -> Result<Self> {
        if !(s > 0.0) {
            return Err(Error::InvalidParameter(format!("exponential weight needs s > 0, got {s}")));
        }
        Ok(Weight::Exponential { r, s })
    }

    /// `ω(x,ξ) = ω₀(ξ)` on ℝ^{2d}.
    pub fn phase_separable(omega0: Weight, d: usize) -> Self {
        Weight::Slice { start: d, len: d, inner: Box::new(omega0) }
    }

    pub fn with_majorant(self, v: Weight) -> Self {
        Weight::Moderate { weight: Box::new(self), majorant: Box::new(v) }
    }

    pub fn majorant(&self) -> Option<&Weight> {
        match self {
            Weight::Moderate { majorant, .. } => Some(majorant),
            _ => None,
        }
    }

    /// `log ω(x)`.
    pub fn log_eval(&self, x: &[f64]) -> f64 {
        match self {
            Weight::Constant { value } => value.ln(),
            Weight::Polynomial { t } => 0.5 * t * norm2(x).ln_1p(),
            Weight::Exponential { r, s } => r * norm2(x).sqrt().powf(1.0 / s),
            Weight::Tensor { factors, dims } => {
                let mut off = 0;
                let mut acc = 0.0;
                for (w, &n) in factors.iter().zip(dims) {
                    acc += w.log_eval(&x[off..off + n]);
                    off += n;
                }
                acc
            }
            Weight::Slice { start, len, inner } => inner.log_eval(&x[*start..start + len]),
            Weight::Theta { base, rho } => base.log_eval(x) + 0.5 * rho * norm2(x).ln_1p(),
            Weight::Moderate { weight, .. } => weight.log_eval(x),
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.log_eval(x).exp()
    }

    /// True when the weight does not depend on its argument.
    pub fn is_constant(&self) -> bool {
        match self {
            Weight::Constant { .. } => true,
            Weight::Polynomial { t } => *t == 0.0,
            Weight::Exponential { r, .. } => *r == 0.0,
            Weight::Tensor { factors, .. } => factors.iter().all(Weight::is_constant),
            Weight::Slice { inner, .. } => inner.is_constant(),
            Weight::Theta { base, rho } => *rho == 0.0 && base.is_constant(),
            Weight::Moderate { weight, .. } => weight.is_constant(),
        }
    }

    /// Checks structural consistency against the dimension `n` of the domain.
    pub fn validate(&self, n: usize) -> Result<()> {
        match self {
            Weight::Constant { value } if !(*value > 0.0) || !value.is_finite() => {
                Err(Error::InvalidParameter(format!("constant weight must be positive, got {value}")))
            }
            Weight::Exponential { s, .. } if !(*s > 0.0) => {
                Err(Error::InvalidParameter(format!("exponential weight needs s > 0, got {s}")))
            }
            Weight::Tensor { factors, dims } => {
                if factors.len() != dims.len() || dims.iter().sum::<usize>() != n {
                    return Err(Error::DimensionMismatch(format!(
                        "tensor weight blocks {dims:?} do not cover {n} coordinates"
                    )));
                }
                factors.iter().zip(dims).try_for_each(|(w, &k)| w.validate(k))
            }
            Weight::Slice { start, len, inner } => {
                if start + len > n {
                    return Err(Error::DimensionMismatch(format!(
                        "weight slice {start}..{} exceeds {n} coordinates",
                        start + len
                    )));
                }
                inner.validate(*len)
            }
            Weight::Theta { base, .. } => base.validate(n),
            Weight::Moderate { weight, majorant } => {
                weight.validate(n)?;
                majorant.validate(n)
            }
            _ => Ok(()),
        }
    }
}

/// `Θ_ρ v = v⟨·⟩^ρ` for `v` on ℝ^{2d}, admissible when `ρ ≥ 2d(1/r − 1)`
/// (strictly when `strict` is set and `r < 1`).
pub fn theta_weight(v: Weight, rho: f64, r: f64, d: usize, strict: bool) -> Result<Weight> {
    if !(r > 0.0 && r <= 1.0) {
        return Err(Error::InvalidParameter(format!("r must lie in (0, 1], got {r}")));
    }
    let bound = 2.0 * d as f64 * (1.0 / r - 1.0);
    let ok = if strict && r < 1.0 { rho > bound } else { rho >= bound };
    if !ok {
        return Err(Error::WeightBound(format!(
            "rho = {rho} is below the admissible bound 2d(1/r - 1) = {bound}{}",
            if strict && r < 1.0 { " (strict)" } else { "" }
        )));
    }
    Ok(Weight::Theta { base: Box::new(v), rho })
}

/// Outcome of [`check_moderate`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModerateReport {
    /// `max ω(x+y)/(ω(x)v(y))` over the sample.
    pub constant: f64,
    pub worst_pair: (Vec<f64>, Vec<f64>),
    /// `max 1/(v(−x)ω(x))`, the constant in `v(−x)^{-1} ≲ ω(x)`.
    pub lower_constant: f64,
    /// `max ω(x)/v(x)`, the constant in `ω(x) ≲ v(x)`.
    pub upper_constant: f64,
    /// Constant restricted to pairs within half the sampled radius.
    pub half_radius_constant: f64,
    /// Set when the constant keeps growing with the sampled radius.
    pub non_moderate: bool,
}

/// Empirical moderation constant of `omega` with respect to `v`.
pub fn check_moderate(omega: &Weight, v: &Weight, samples: &[(Vec<f64>, Vec<f64>)]) -> Result<ModerateReport> {
    if samples.is_empty() {
        return Err(Error::InvalidParameter("check_moderate needs at least one pair".into()));
    }
    let radius = |(x, y): &(Vec<f64>, Vec<f64>)| norm2(x).sqrt().max(norm2(y).sqrt());
    let r_max = samples.iter().map(radius).fold(0.0, f64::max);
    let mut log_c = f64::NEG_INFINITY;
    let mut log_c_half = f64::NEG_INFINITY;
    let mut worst = 0;
    let mut log_lower = f64::NEG_INFINITY;
    let mut log_upper = f64::NEG_INFINITY;
    for (i, pair) in samples.iter().enumerate() {
        let (x, y) = pair;
        let sum: Vec<f64> = x.iter().zip(y).map(|(a, b)| a + b).collect();
        let lc = omega.log_eval(&sum) - omega.log_eval(x) - v.log_eval(y);
        if lc > log_c {
            log_c = lc;
            worst = i;
        }
        if radius(pair) <= 0.5 * r_max {
            log_c_half = log_c_half.max(lc);
        }
        let neg: Vec<f64> = x.iter().map(|a| -a).collect();
        log_lower = log_lower.max(-v.log_eval(&neg) - omega.log_eval(x));
        log_upper = log_upper.max(omega.log_eval(x) - v.log_eval(x));
    }
    let non_moderate = log_c_half.is_finite() && log_c - log_c_half > 1.5f64.ln();
    Ok(ModerateReport {
        constant: log_c.exp(),
        worst_pair: samples[worst].clone(),
        lower_constant: log_lower.exp(),
        upper_constant: log_upper.exp(),
        half_radius_constant: log_c_half.exp(),
        non_moderate,
    })
}
