//! Deterministic families of test signals on ℝ, defined in closed form so the
//! same signal can be sampled at several resolutions.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{sample, SampledField};
use crate::geometry::OrderedBasis;
use crate::transforms::FourierCoefficients;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyKind {
    /// `e^{−x²/(2w²)}` for each width `w` in the parameter grid.
    GaussianDilates,
    /// `e^{iμx} e^{−x²/2}` for each `μ` in the parameter grid.
    ModulatedGaussians,
    /// Random `2π`-periodic trigonometric polynomials; the grid is
    /// `[max terms, max |frequency|]`.
    TrigPolynomials,
    /// `H_k(x) e^{−x²/2}` for each order `k` in the grid.
    HermiteLike,
    /// Random sums of modulated, shifted Gaussian packets; the grid is
    /// `[packets, band]`.
    RandomBandlimited,
}

/// A family is regenerated exactly from `(kind, params, seed, count)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignalFamily {
    pub kind: FamilyKind,
    #[serde(default)]
    pub params: Vec<f64>,
    #[serde(default)]
    pub seed: u64,
    /// Number of draws for the random kinds.
    #[serde(default = "default_count")]
    pub count: usize,
    /// Further families whose members are appended.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub with: Vec<SignalFamily>,
}

fn default_count() -> usize {
    20
}

/// Closed-form description of one member.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "kebab-case")]
pub enum SignalShape {
    /// `Σ c_j e^{iμ_j x} e^{−(x−x_j)²/(2w_j²)}`.
    Packets { packets: Vec<Packet> },
    /// `H_k(x) e^{−x²/2}`.
    Hermite { order: usize },
    /// `Σ_m c_m e^{imx}`.
    Trig { terms: Vec<(i64, Complex64)> },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Packet {
    pub amplitude: Complex64,
    pub center: f64,
    pub width: f64,
    pub frequency: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Signal {
    pub id: String,
    pub shape: SignalShape,
}

fn hermite(k: usize, x: f64) -> f64 {
    // Physicists' recurrence H_{n+1} = 2x H_n − 2n H_{n−1}.
    let (mut a, mut b) = (1.0, 2.0 * x);
    if k == 0 {
        return a;
    }
    for n in 1..k {
        let c = 2.0 * x * b - 2.0 * n as f64 * a;
        a = b;
        b = c;
    }
    b
}

impl Signal {
    pub fn gaussian(width: f64) -> Self {
        Self {
            id: format!("gaussian-w{width}"),
            shape: SignalShape::Packets {
                packets: vec![Packet { amplitude: Complex64::new(1.0, 0.0), center: 0.0, width, frequency: 0.0 }],
            },
        }
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        match &self.shape {
            SignalShape::Packets { packets } => packets
                .iter()
                .map(|p| {
                    let t = (x - p.center) / p.width;
                    p.amplitude * Complex64::from_polar((-0.5 * t * t).exp(), p.frequency * x)
                })
                .sum(),
            SignalShape::Hermite { order } => Complex64::new(hermite(*order, x) * (-0.5 * x * x).exp(), 0.0),
            SignalShape::Trig { terms } => terms.iter().map(|(m, c)| c * Complex64::from_polar(1.0, *m as f64 * x)).sum(),
        }
    }

    /// Samples on `[lo, hi)` with the given step.
    pub fn sample(&self, lo: f64, hi: f64, step: f64) -> Result<SampledField> {
        sample(|x| self.eval(x[0]), &[lo], &[hi], step)
    }

    /// Fourier coefficients over `Λ'` of the `2π`-periodic lattice, for
    /// trigonometric members.
    pub fn coefficients(&self) -> Result<FourierCoefficients> {
        match &self.shape {
            SignalShape::Trig { terms } => {
                let cutoff = terms.iter().map(|(m, _)| m.abs()).max().unwrap_or(0);
                let terms: Vec<(Vec<i64>, Complex64)> = terms.iter().map(|(m, c)| (vec![*m], *c)).collect();
                FourierCoefficients::from_terms(OrderedBasis::diagonal(&[2.0 * PI])?, vec![cutoff], &terms)
            }
            _ => Err(Error::InvalidParameter(format!("signal {} is not periodic", self.id))),
        }
    }

    /// Scales every amplitude by `λ`.
    pub fn scaled(&self, lambda: Complex64) -> Self {
        let shape = match &self.shape {
            SignalShape::Packets { packets } => SignalShape::Packets {
                packets: packets.iter().map(|p| Packet { amplitude: p.amplitude * lambda, ..*p }).collect(),
            },
            SignalShape::Trig { terms } => SignalShape::Trig { terms: terms.iter().map(|(m, c)| (*m, c * lambda)).collect() },
            SignalShape::Hermite { .. } => return self.clone(),
        };
        Self { id: format!("{}*{lambda}", self.id), shape }
    }

    /// Largest `|frequency|` present, for sizing frequency crops.
    pub fn max_frequency(&self) -> f64 {
        match &self.shape {
            SignalShape::Packets { packets } => packets.iter().map(|p| p.frequency.abs() + 1.0 / p.width).fold(0.0, f64::max),
            SignalShape::Hermite { order } => (2.0 * *order as f64 + 1.0).sqrt(),
            SignalShape::Trig { terms } => terms.iter().map(|(m, _)| m.abs() as f64).fold(0.0, f64::max),
        }
    }
}

impl SignalFamily {
    pub fn new(kind: FamilyKind, params: Vec<f64>, seed: u64, count: usize) -> Self {
        Self { kind, params, seed, count, with: Vec::new() }
    }

    pub fn and(mut self, other: SignalFamily) -> Self {
        self.with.push(other);
        self
    }

    /// Five Gaussian dilates with widths `2^{k/2}`, `k = −2..2`.
    pub fn gaussian_dilates() -> Self {
        Self::new(FamilyKind::GaussianDilates, vec![0.5, 0.5f64.sqrt(), 1.0, 2.0f64.sqrt(), 2.0], 0, 0)
    }

    pub fn modulated_gaussians() -> Self {
        Self::new(FamilyKind::ModulatedGaussians, vec![0.0, 1.0, 2.0, 3.0], 0, 0)
    }

    pub fn trig_polynomials(seed: u64, count: usize) -> Self {
        Self::new(FamilyKind::TrigPolynomials, vec![9.0, 8.0], seed, count)
    }

    fn param(&self, i: usize, default: f64) -> f64 {
        self.params.get(i).copied().unwrap_or(default)
    }

    pub fn signals(&self) -> Result<Vec<Signal>> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut out: Vec<Signal> = match self.kind {
            FamilyKind::GaussianDilates => {
                if self.params.iter().any(|w| !(*w > 0.0)) {
                    return Err(Error::InvalidParameter("Gaussian widths must be positive".into()));
                }
                self.params.iter().map(|&w| Signal::gaussian(w)).collect()
            }
            FamilyKind::ModulatedGaussians => self
                .params
                .iter()
                .map(|&mu| Signal {
                    id: format!("modulated-mu{mu}"),
                    shape: SignalShape::Packets {
                        packets: vec![Packet { amplitude: Complex64::new(1.0, 0.0), center: 0.0, width: 1.0, frequency: mu }],
                    },
                })
                .collect(),
            FamilyKind::HermiteLike => self
                .params
                .iter()
                .map(|&k| Signal { id: format!("hermite-{k}"), shape: SignalShape::Hermite { order: k as usize } })
                .collect(),
            FamilyKind::TrigPolynomials => {
                let max_terms = self.param(0, 9.0).max(1.0) as usize;
                let max_freq = self.param(1, 8.0).max(0.0) as i64;
                if (max_terms as i64) > 2 * max_freq + 1 {
                    return Err(Error::InvalidParameter("more terms than available frequencies".into()));
                }
                (0..self.count)
                    .map(|i| {
                        let n = rng.gen_range(1..=max_terms);
                        let mut freqs: Vec<i64> = (-max_freq..=max_freq).collect();
                        // Partial Fisher-Yates for n distinct frequencies.
                        for k in 0..n {
                            let j = rng.gen_range(k..freqs.len());
                            freqs.swap(k, j);
                        }
                        let mut terms: Vec<(i64, Complex64)> = freqs[..n]
                            .iter()
                            .map(|&m| (m, Complex64::from_polar(rng.gen_range(0.2..1.0), rng.gen_range(0.0..2.0 * PI))))
                            .collect();
                        terms.sort_by_key(|t| t.0);
                        Signal { id: format!("trig-{i}"), shape: SignalShape::Trig { terms } }
                    })
                    .collect()
            }
            FamilyKind::RandomBandlimited => {
                let packets = self.param(0, 3.0).max(1.0) as usize;
                let band = self.param(1, 4.0);
                (0..self.count)
                    .map(|i| {
                        let ps = (0..packets)
                            .map(|_| Packet {
                                amplitude: Complex64::from_polar(rng.gen_range(0.3..1.0), rng.gen_range(0.0..2.0 * PI)),
                                center: rng.gen_range(-2.0..2.0),
                                width: rng.gen_range(0.7..1.5),
                                frequency: rng.gen_range(-band..band),
                            })
                            .collect();
                        Signal { id: format!("packets-{i}"), shape: SignalShape::Packets { packets: ps } }
                    })
                    .collect()
            }
        };
        for f in &self.with {
            out.extend(f.signals()?);
        }
        Ok(out)
    }
}
