//! Mixed quasi-norms: E-split Lebesgue, lattice sequences, Wiener amalgams,
//! modulation spaces and Fourier coefficients of periodic functions.

mod families;
mod reduce;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::field::{MixedExponent, SampledField, Weight, Window};
use crate::geometry::OrderedBasis;
use crate::transforms::{fourier_coefficients, stft_with, FourierCoefficients, LatticeSequence, StftOptions};

pub use families::{
    cell_norms, mixed_lebesgue_norm, modulation_norm, modulation_norm_of_stft, periodic_coefficient_norm,
    periodic_norm, script_norm, script_norm_of_stft, sequence_norm, wiener_norm, wiener_phase_norm, Domain,
    LebesgueSpec, ModKind,
};
pub use reduce::MIN_CELL_SAMPLES;

/// A computed norm with the resolution it was computed at.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormValue {
    #[serde(serialize_with = "ser_extended", deserialize_with = "de_extended")]
    pub value: f64,
    /// Quadrature steps of the reduced grid, in the coordinates used.
    pub steps: Vec<f64>,
    /// Number of samples entering the reduction.
    pub samples: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spec: Option<NormSpec>,
}

impl NormValue {
    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
    }
}

fn ser_extended<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if *v == f64::INFINITY {
        s.serialize_str("inf")
    } else {
        s.serialize_f64(*v)
    }
}

fn de_extended<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Num(f64),
        Text(String),
    }
    match Raw::deserialize(d)? {
        Raw::Num(v) => Ok(v),
        Raw::Text(t) if t == "inf" => Ok(f64::INFINITY),
        Raw::Text(t) => Err(serde::de::Error::custom(format!("expected a number or \"inf\", got {t:?}"))),
    }
}

/// Serializable description of a norm, one variant per family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", deny_unknown_fields)]
pub enum NormSpec {
    #[serde(rename = "mixed-lebesgue")]
    MixedLebesgue {
        #[serde(default)]
        basis: Option<OrderedBasis>,
        exponents: MixedExponent,
        #[serde(default)]
        weight: Weight,
        #[serde(default)]
        domain: Domain,
    },
    #[serde(rename = "sequence")]
    Sequence {
        #[serde(default)]
        basis: Option<OrderedBasis>,
        exponents: MixedExponent,
        #[serde(default)]
        weight: Weight,
    },
    #[serde(rename = "wiener")]
    Wiener {
        #[serde(default)]
        basis: Option<OrderedBasis>,
        local: MixedExponent,
        exponents: MixedExponent,
        #[serde(default)]
        weight: Weight,
    },
    #[serde(rename = "wiener-phase-1")]
    WienerPhase1 {
        #[serde(default)]
        basis: Option<OrderedBasis>,
        local: MixedExponent,
        exponents: MixedExponent,
        #[serde(default)]
        weight: Weight,
        inner: LebesgueSpec,
        #[serde(default)]
        window: Option<Window>,
        #[serde(default)]
        stft: StftOptions,
    },
    #[serde(rename = "wiener-phase-2")]
    WienerPhase2 {
        #[serde(default)]
        basis: Option<OrderedBasis>,
        local: MixedExponent,
        exponents: MixedExponent,
        #[serde(default)]
        weight: Weight,
        inner: LebesgueSpec,
        #[serde(default)]
        window: Option<Window>,
        #[serde(default)]
        stft: StftOptions,
    },
    #[serde(rename = "modulation-M")]
    ModulationM {
        #[serde(default)]
        basis_x: Option<OrderedBasis>,
        #[serde(default)]
        basis_xi: Option<OrderedBasis>,
        p: MixedExponent,
        q: MixedExponent,
        #[serde(default)]
        weight: Weight,
        #[serde(default)]
        window: Option<Window>,
        #[serde(default)]
        stft: StftOptions,
    },
    #[serde(rename = "modulation-W")]
    ModulationW {
        #[serde(default)]
        basis_x: Option<OrderedBasis>,
        #[serde(default)]
        basis_xi: Option<OrderedBasis>,
        p: MixedExponent,
        q: MixedExponent,
        #[serde(default)]
        weight: Weight,
        #[serde(default)]
        window: Option<Window>,
        #[serde(default)]
        stft: StftOptions,
    },
    #[serde(rename = "script-M")]
    ScriptM {
        #[serde(default)]
        basis: Option<OrderedBasis>,
        local: MixedExponent,
        #[serde(default)]
        weight: Weight,
        inner: LebesgueSpec,
        #[serde(default)]
        window: Option<Window>,
        #[serde(default)]
        stft: StftOptions,
    },
    #[serde(rename = "script-W")]
    ScriptW {
        #[serde(default)]
        basis: Option<OrderedBasis>,
        local: MixedExponent,
        #[serde(default)]
        weight: Weight,
        inner: LebesgueSpec,
        #[serde(default)]
        window: Option<Window>,
        #[serde(default)]
        stft: StftOptions,
    },
    #[serde(rename = "periodic-coefficient")]
    PeriodicCoefficient {
        #[serde(default)]
        basis: Option<OrderedBasis>,
        exponents: MixedExponent,
        #[serde(default)]
        weight: Weight,
        cutoff: Vec<i64>,
    },
}

/// What a norm is evaluated on.
#[derive(Clone, Copy, Debug)]
pub enum NormInput<'a> {
    /// A function on ℝ^d.
    Signal(&'a SampledField),
    /// A function on ℝ^{2d} with axes `x…, ξ…` (typically an STFT).
    PhaseSpace(&'a SampledField),
    Sequence(&'a LatticeSequence),
    Coefficients(&'a FourierCoefficients),
}

fn basis_or_standard(b: &Option<OrderedBasis>, d: usize) -> Result<OrderedBasis> {
    let b = b.clone().unwrap_or_else(|| OrderedBasis::standard(d));
    if b.dim() != d {
        return Err(Error::DimensionMismatch(format!("basis of dimension {} for {d}-d data", b.dim())));
    }
    Ok(b)
}

fn phase_field(input: NormInput<'_>, window: &Option<Window>, opts: &StftOptions) -> Result<SampledField> {
    match input {
        NormInput::PhaseSpace(v) => Ok(v.clone()),
        NormInput::Signal(f) => {
            let phi = window.clone().unwrap_or_else(|| Window::standard(f.dim()));
            stft_with(f, &phi, opts)
        }
        _ => Err(Error::InvalidParameter("this family needs a signal or a phase-space field".into())),
    }
}

impl NormSpec {
    /// The family name used in configs and CSV rows.
    pub fn family(&self) -> &'static str {
        match self {
            NormSpec::MixedLebesgue { .. } => "mixed-lebesgue",
            NormSpec::Sequence { .. } => "sequence",
            NormSpec::Wiener { .. } => "wiener",
            NormSpec::WienerPhase1 { .. } => "wiener-phase-1",
            NormSpec::WienerPhase2 { .. } => "wiener-phase-2",
            NormSpec::ModulationM { .. } => "modulation-M",
            NormSpec::ModulationW { .. } => "modulation-W",
            NormSpec::ScriptM { .. } => "script-M",
            NormSpec::ScriptW { .. } => "script-W",
            NormSpec::PeriodicCoefficient { .. } => "periodic-coefficient",
        }
    }

    /// The `M^{2,2}` norm with the default window, which equals `‖V_φ f‖_{L²}`.
    pub fn modulation_l2() -> Self {
        let two = MixedExponent::from(crate::field::Exponent::of(2.0));
        NormSpec::ModulationM {
            basis_x: None,
            basis_xi: None,
            p: two.clone(),
            q: two,
            weight: Weight::one(),
            window: None,
            stft: StftOptions::default(),
        }
    }

    /// The same spec with another analysis window; families that take no
    /// window are returned unchanged.
    pub fn with_window(&self, w: Window) -> Self {
        let mut out = self.clone();
        match &mut out {
            NormSpec::WienerPhase1 { window, .. }
            | NormSpec::WienerPhase2 { window, .. }
            | NormSpec::ModulationM { window, .. }
            | NormSpec::ModulationW { window, .. }
            | NormSpec::ScriptM { window, .. }
            | NormSpec::ScriptW { window, .. } => *window = Some(w),
            _ => {}
        }
        out
    }

    /// STFT grid options of the families that compute one.
    pub fn stft_options_mut(&mut self) -> Option<&mut StftOptions> {
        match self {
            NormSpec::WienerPhase1 { stft, .. }
            | NormSpec::WienerPhase2 { stft, .. }
            | NormSpec::ModulationM { stft, .. }
            | NormSpec::ModulationW { stft, .. }
            | NormSpec::ScriptM { stft, .. }
            | NormSpec::ScriptW { stft, .. } => Some(stft),
            _ => None,
        }
    }

    pub fn evaluate(&self, input: NormInput<'_>) -> Result<NormValue> {
        let mut out = self.evaluate_inner(input)?;
        out.spec = Some(self.clone());
        Ok(out)
    }

    fn evaluate_inner(&self, input: NormInput<'_>) -> Result<NormValue> {
        match (self, input) {
            (
                NormSpec::MixedLebesgue { basis, exponents, weight, domain },
                NormInput::Signal(f) | NormInput::PhaseSpace(f),
            ) => mixed_lebesgue_norm(f, &basis_or_standard(basis, f.dim())?, exponents, weight, domain),
            (NormSpec::Sequence { basis, exponents, weight }, NormInput::Sequence(a)) => {
                sequence_norm(a, &basis_or_standard(basis, a.dim())?, exponents, weight)
            }
            (NormSpec::Wiener { basis, local, exponents, weight }, NormInput::Signal(f)) => {
                wiener_norm(f, &basis_or_standard(basis, f.dim())?, local, exponents, weight)
            }
            (NormSpec::WienerPhase1 { basis, local, exponents, weight, inner, window, stft }, input)
            | (NormSpec::WienerPhase2 { basis, local, exponents, weight, inner, window, stft }, input) => {
                let v = phase_field(input, window, stft)?;
                let which = if matches!(self, NormSpec::WienerPhase1 { .. }) { 1 } else { 2 };
                let v_abs = v.map(|z| crate::Complex64::new(z.norm(), 0.0));
                wiener_phase_norm(&v_abs, which, &basis_or_standard(basis, v.dim() / 2)?, local, exponents, weight, inner)
            }
            (NormSpec::ModulationM { basis_x, basis_xi, p, q, weight, window, stft }, input)
            | (NormSpec::ModulationW { basis_x, basis_xi, p, q, weight, window, stft }, input) => {
                let v = phase_field(input, window, stft)?;
                let d = v.dim() / 2;
                let kind = if matches!(self, NormSpec::ModulationM { .. }) { ModKind::M } else { ModKind::W };
                modulation_norm_of_stft(
                    &v,
                    kind,
                    &basis_or_standard(basis_x, d)?,
                    &basis_or_standard(basis_xi, d)?,
                    p,
                    q,
                    weight,
                )
            }
            (NormSpec::ScriptM { basis, local, weight, inner, window, stft }, input)
            | (NormSpec::ScriptW { basis, local, weight, inner, window, stft }, input) => {
                let v = phase_field(input, window, stft)?;
                let kind = if matches!(self, NormSpec::ScriptM { .. }) { ModKind::M } else { ModKind::W };
                script_norm_of_stft(&v, kind, &basis_or_standard(basis, v.dim() / 2)?, local, weight, inner)
            }
            (NormSpec::PeriodicCoefficient { basis, exponents, weight, cutoff }, NormInput::Coefficients(c)) => {
                if basis.as_ref().is_some_and(|b| !b.approx_eq(&c.basis, 1e-12)) {
                    return Err(Error::InvalidParameter("coefficient table was computed for another basis".into()));
                }
                if cutoff.len() != c.dim() {
                    return Err(Error::DimensionMismatch("cutoff length".into()));
                }
                periodic_coefficient_norm(c, exponents, weight)
            }
            (NormSpec::PeriodicCoefficient { basis, exponents, weight, cutoff }, NormInput::Signal(f)) => {
                let b = basis_or_standard(basis, f.dim())?;
                let c = fourier_coefficients(f, &b, cutoff)?;
                periodic_coefficient_norm(&c, exponents, weight)
            }
            (spec, input) => Err(Error::InvalidParameter(format!(
                "family {} cannot be evaluated on {}",
                spec.family(),
                match input {
                    NormInput::Signal(_) => "a signal",
                    NormInput::PhaseSpace(_) => "a phase-space field",
                    NormInput::Sequence(_) => "a lattice sequence",
                    NormInput::Coefficients(_) => "a coefficient table",
                }
            ))),
        }
    }
}
