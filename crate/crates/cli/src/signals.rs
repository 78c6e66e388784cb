//! Built-in input signals for the `transform` and `norm` commands.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use tfzak_core::experiments::{Packet, Signal, SignalShape};
use tfzak_core::{sample, Complex64, Result, SampledField};

fn one() -> f64 {
    1.0
}

fn one_dim() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SignalSpec {
    /// `e^{iμx} e^{−(x−c)²/(2w²)}`.
    Gaussian {
        #[serde(default = "one")]
        width: f64,
        #[serde(default)]
        center: f64,
        #[serde(default)]
        modulation: f64,
    },
    Hermite { order: usize },
    Trig { terms: Vec<(i64, Complex64)> },
    /// Indicator of the unit cube `[0, 1)^dim`.
    Indicator {
        #[serde(default = "one_dim")]
        dim: usize,
    },
    /// Discrete inputs for the finite Zak transform.
    Delta,
    Ones,
    Random { seed: u64 },
}

impl SignalSpec {
    /// Default parameters for a `--signal` name.
    pub fn by_name(name: &str) -> Option<Self> {
        Some(match name {
            "gaussian" => SignalSpec::Gaussian { width: 1.0, center: 0.0, modulation: 0.0 },
            "hermite" => SignalSpec::Hermite { order: 1 },
            "trig" => SignalSpec::Trig { terms: vec![(3, Complex64::new(1.0, 0.0))] },
            "indicator" => SignalSpec::Indicator { dim: 1 },
            "delta" => SignalSpec::Delta,
            "ones" => SignalSpec::Ones,
            "random" => SignalSpec::Random { seed: 0 },
            _ => return None,
        })
    }

    pub fn id(&self) -> String {
        match self {
            SignalSpec::Gaussian { width, center, modulation } => format!("gaussian-w{width}-c{center}-m{modulation}"),
            SignalSpec::Hermite { order } => format!("hermite-{order}"),
            SignalSpec::Trig { terms } => format!("trig-{}", terms.len()),
            SignalSpec::Indicator { dim } => format!("indicator-{dim}d"),
            SignalSpec::Delta => "delta".into(),
            SignalSpec::Ones => "ones".into(),
            SignalSpec::Random { seed } => format!("random-{seed}"),
        }
    }

    /// The closed-form member, for the one-dimensional continuous signals.
    pub fn to_signal(&self) -> Option<Signal> {
        let shape = match self {
            SignalSpec::Gaussian { width, center, modulation } => SignalShape::Packets {
                packets: vec![Packet {
                    amplitude: Complex64::new(1.0, 0.0),
                    center: *center,
                    width: *width,
                    frequency: *modulation,
                }],
            },
            SignalSpec::Hermite { order } => SignalShape::Hermite { order: *order },
            SignalSpec::Trig { terms } => SignalShape::Trig { terms: terms.clone() },
            _ => return None,
        };
        Some(Signal { id: self.id(), shape })
    }

    /// Samples a continuous signal on `[lo, hi)^d`.
    pub fn sample(&self, lo: f64, hi: f64, step: f64) -> Result<Option<SampledField>> {
        if let SignalSpec::Indicator { dim } = self {
            let d = *dim;
            let f = sample(
                |x| {
                    let inside = x.iter().all(|&t| t >= -1e-12 && t < 1.0 - 1e-12);
                    Complex64::new(if inside { 1.0 } else { 0.0 }, 0.0)
                },
                &vec![lo; d],
                &vec![hi; d],
                step,
            )?;
            return Ok(Some(f));
        }
        match self.to_signal() {
            Some(s) => s.sample(lo, hi, step).map(Some),
            None => Ok(None),
        }
    }

    /// A length-`l` sequence for the finite Zak transform.
    pub fn discrete(&self, l: usize) -> Option<Vec<Complex64>> {
        let zero = Complex64::new(0.0, 0.0);
        Some(match self {
            SignalSpec::Delta => (0..l).map(|k| if k == 0 { Complex64::new(1.0, 0.0) } else { zero }).collect(),
            SignalSpec::Ones => vec![Complex64::new(1.0, 0.0); l],
            SignalSpec::Random { seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                (0..l).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
            }
            SignalSpec::Gaussian { width, center, modulation } => {
                let mid = l as f64 / 2.0 + center;
                (0..l)
                    .map(|k| {
                        let t = (k as f64 - mid) / width;
                        Complex64::from_polar((-0.5 * t * t).exp(), modulation * k as f64)
                    })
                    .collect()
            }
            _ => return None,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_resolve() {
        for n in ["gaussian", "hermite", "trig", "indicator", "delta", "ones", "random"] {
            assert!(SignalSpec::by_name(n).is_some(), "{n}");
        }
        assert!(SignalSpec::by_name("chirp").is_none());
    }

    #[test]
    fn indicator_has_unit_mass() {
        let f = SignalSpec::Indicator { dim: 2 }.sample(-2.0, 2.0, 0.125).unwrap().unwrap();
        let mass: f64 = f.values().iter().map(|v| v.re).sum::<f64>() * f.quadrature_weight();
        assert_eq!(mass, 1.0);
    }

    #[test]
    fn discrete_inputs() {
        assert_eq!(SignalSpec::Delta.discrete(4).unwrap()[0], Complex64::new(1.0, 0.0));
        assert_eq!(SignalSpec::Random { seed: 1 }.discrete(8), SignalSpec::Random { seed: 1 }.discrete(8));
        assert!(SignalSpec::Indicator { dim: 1 }.discrete(4).is_none());
    }
}
