//! Ratio reports between two norms over a signal family.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Exponent, MixedExponent, SampledField, Weight, Window};
use crate::geometry::OrderedBasis;
use crate::norms::{NormInput, NormSpec, NormValue};
use crate::transforms::{stft_with, StftOptions};

use super::family::{Signal, SignalFamily};
use super::report::{EquivalenceReport, RatioRow};

/// Default spread bound for transform-side equivalences.
pub const TRANSFORM_SPREAD_BOUND: f64 = 4.0;
/// Default spread bound for coefficient-side equivalences.
pub const COEFFICIENT_SPREAD_BOUND: f64 = 3.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Level {
    Coarse,
    Fine,
}

/// Box and the two sampling steps used for every member of a family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sampling {
    pub lo: f64,
    pub hi: f64,
    pub coarse: f64,
    pub fine: f64,
}

impl Default for Sampling {
    fn default() -> Self {
        Self { lo: -16.0, hi: 16.0, coarse: 1.0 / 16.0, fine: 1.0 / 32.0 }
    }
}

impl Sampling {
    pub fn step(&self, level: Level) -> f64 {
        match level {
            Level::Coarse => self.coarse,
            Level::Fine => self.fine,
        }
    }

    pub fn sample(&self, s: &Signal, level: Level) -> Result<SampledField> {
        s.sample(self.lo, self.hi, self.step(level))
    }
}

/// What a norm is applied to.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Representation {
    /// The sampled signal itself.
    #[default]
    Signal,
    /// `V_φ f`, handed to the norm as a function on phase space.
    Stft {
        #[serde(default)]
        window: Option<Window>,
        #[serde(default)]
        stft: StftOptions,
    },
    /// The closed-form Fourier coefficients of a periodic member.
    Coefficients,
}

/// A norm together with the representation it is evaluated on.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Measured {
    pub spec: NormSpec,
    #[serde(default)]
    pub on: Representation,
}

impl Measured {
    pub fn new(spec: NormSpec, on: Representation) -> Self {
        Self { spec, on }
    }

    pub fn label(&self) -> String {
        serde_json::to_string(self).unwrap_or_else(|_| self.spec.family().to_string())
    }

    pub fn evaluate(&self, s: &Signal, f: &SampledField) -> Result<f64> {
        match &self.on {
            Representation::Coefficients => {
                let c = s.coefficients()?;
                Ok(self.spec.evaluate(NormInput::Coefficients(&c))?.value)
            }
            _ => Ok(self.evaluate_field(f)?.value),
        }
    }

    /// Evaluates on a sampled field alone; coefficient representations need
    /// the closed form and are rejected.
    pub fn evaluate_field(&self, f: &SampledField) -> Result<NormValue> {
        match &self.on {
            Representation::Signal => self.spec.evaluate(NormInput::Signal(f)),
            Representation::Stft { window, stft } => {
                let phi = window.clone().unwrap_or_else(|| Window::standard(f.dim()));
                let v = stft_with(f, &phi, stft)?;
                let input = match self.spec {
                    NormSpec::Wiener { .. } => NormInput::Signal(&v),
                    _ => NormInput::PhaseSpace(&v),
                };
                self.spec.evaluate(input)
            }
            Representation::Coefficients => {
                Err(Error::InvalidParameter("coefficient norms need a trigonometric signal".into()))
            }
        }
    }
}

/// Evaluates `eval` on every signal at both levels, in parallel over signals.
pub fn family_rows<F>(signals: &[Signal], eval: F) -> Result<Vec<RatioRow>>
where
    F: Fn(&Signal, Level) -> Result<(f64, f64)> + Sync,
{
    signals
        .par_iter()
        .map(|s| {
            let (a, b) = eval(s, Level::Coarse)?;
            let (a_fine, b_fine) = eval(s, Level::Fine)?;
            Ok(RatioRow { signal: s.id.clone(), a, b, a_fine, b_fine })
        })
        .collect()
}

/// Ratios `A/B` over the family.
pub fn run_equivalence(
    family: &SignalFamily,
    a: &Measured,
    b: &Measured,
    sampling: &Sampling,
    spread_bound: f64,
) -> Result<EquivalenceReport> {
    let signals = family.signals()?;
    let rows = family_rows(&signals, |s, level| {
        let f = sampling.sample(s, level)?;
        Ok((a.evaluate(s, &f)?, b.evaluate(s, &f)?))
    })?;
    Ok(EquivalenceReport::from_rows("equivalence", a.label(), b.label(), rows, spread_bound))
}

/// Empirical embedding constant `max ‖f‖_target / ‖f‖_source`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingReport {
    pub report: EquivalenceReport,
    pub constant: f64,
    /// Constant forced by Hölder's inequality, when the link has one.
    pub explicit: Option<f64>,
    pub passed: bool,
}

pub fn check_embedding(
    family: &SignalFamily,
    source: &Measured,
    target: &Measured,
    sampling: &Sampling,
    explicit: Option<f64>,
) -> Result<EmbeddingReport> {
    let mut report = run_equivalence(family, target, source, sampling, f64::INFINITY)?;
    report.name = "embedding".into();
    let constant = report.rows.iter().map(|r| r.ratio().max(r.ratio_fine())).fold(0.0, f64::max);
    let within = explicit.is_none_or(|c| constant <= c * (1.0 + 1e-12));
    let passed = report.passed && constant.is_finite() && within;
    Ok(EmbeddingReport { report, constant, explicit, passed })
}

/// The same norm with two windows.
pub fn check_window_independence(
    family: &SignalFamily,
    phi1: &Window,
    phi2: &Window,
    spec: &Measured,
    sampling: &Sampling,
    spread_bound: f64,
) -> Result<EquivalenceReport> {
    let with = |phi: &Window| match &spec.on {
        Representation::Stft { stft, .. } => {
            Measured::new(spec.spec.clone(), Representation::Stft { window: Some(phi.clone()), stft: stft.clone() })
        }
        _ => Measured::new(spec.spec.with_window(phi.clone()), spec.on.clone()),
    };
    let mut r = run_equivalence(family, &with(phi1), &with(phi2), sampling, spread_bound)?;
    r.name = "window-independence".into();
    Ok(r)
}

/// `‖V_φf‖_{𝖶^r(1,ℓ^p)} / ‖V_φf‖_{𝖶^∞(1,ℓ^p)}` for each `(p, r)`, with the
/// phase-split basis `diag(1, 2π)` of ℝ².
pub fn wiener_r_independence(
    family: &SignalFamily,
    p_values: &[f64],
    r_values: &[f64],
    sampling: &Sampling,
    stft: &StftOptions,
    spread_bound: f64,
) -> Result<Vec<EquivalenceReport>> {
    let basis = OrderedBasis::diagonal(&[1.0, 2.0 * PI])?;
    let on = Representation::Stft { window: None, stft: stft.clone() };
    let wiener = |r: Exponent, p: f64| {
        Measured::new(
            NormSpec::Wiener {
                basis: Some(basis.clone()),
                local: MixedExponent::from(r),
                exponents: MixedExponent::from(Exponent::of(p)),
                weight: Weight::one(),
            },
            on.clone(),
        )
    };
    let mut out = Vec::new();
    for &p in p_values {
        for &r in r_values {
            if !(r > 0.0) || !(p > 0.0) {
                return Err(Error::InvalidParameter("exponents must be positive".into()));
            }
            let mut rep = run_equivalence(family, &wiener(Exponent::of(r), p), &wiener(Exponent::Infinite, p), sampling, spread_bound)?;
            rep.name = format!("wiener-r{r}-p{p}");
            out.push(rep);
        }
    }
    Ok(out)
}
