//! The verification suite: one entry per check, each returning a summary,
//! CSV tables and a JSON detail record.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use tfzak_core::experiments::{
    check_echo_periodicity, check_embedding, check_factorial_bound, check_finite_parseval, check_periodic_modulation,
    check_quasiperiodicity, check_wiener_holder, check_wiener_jensen, check_window_independence,
    check_young_semidiscrete, check_zak_lebesgue, check_zak_modulation, check_zak_parseval, fit_gs_decay, fmt_f64,
    wiener_r_independence, CheckSummary, DecayMode, EquivalenceReport, FamilyKind, Measured, PeriodicOptions,
    Representation, Sampling, SignalFamily, Table, YoungOptions, ZakGrid, COEFFICIENT_SPREAD_BOUND, DRIFT_BOUND,
    HOMOGENEITY_TOLERANCE, TRANSFORM_SPREAD_BOUND,
};
use tfzak_core::norms::{Domain, NormSpec};
use tfzak_core::transforms::{stft, stft_of_zak, stft_with, zak, StftOptions, ZakStftOptions};
use tfzak_core::{
    dual_basis, sample, Complex64, Error, Exponent, MixedExponent, OrderedBasis, Result, SampledField, Weight, Window,
};

use crate::config::{ExperimentConfig, Resolution};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum CheckKind {
    All,
    FiniteParseval,
    ZakParseval,
    QuasiPeriodicity,
    EchoPeriodicity,
    StftClosedForm,
    WienerJensen,
    WienerHolder,
    Young,
    WienerRIndependence,
    WindowIndependence,
    Embedding,
    PeriodicModulation,
    ZakModulation,
    ZakLebesgue,
    DecayFit,
    FactorialBound,
}

impl CheckKind {
    /// Every check run by `all`, in run order.
    pub const SUITE: [CheckKind; 16] = [
        CheckKind::FiniteParseval,
        CheckKind::ZakParseval,
        CheckKind::QuasiPeriodicity,
        CheckKind::EchoPeriodicity,
        CheckKind::StftClosedForm,
        CheckKind::WienerJensen,
        CheckKind::WienerHolder,
        CheckKind::Young,
        CheckKind::WienerRIndependence,
        CheckKind::WindowIndependence,
        CheckKind::Embedding,
        CheckKind::PeriodicModulation,
        CheckKind::ZakModulation,
        CheckKind::ZakLebesgue,
        CheckKind::DecayFit,
        CheckKind::FactorialBound,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckKind::All => "all",
            CheckKind::FiniteParseval => "finite-parseval",
            CheckKind::ZakParseval => "zak-parseval",
            CheckKind::QuasiPeriodicity => "quasi-periodicity",
            CheckKind::EchoPeriodicity => "echo-periodicity",
            CheckKind::StftClosedForm => "stft-closed-form",
            CheckKind::WienerJensen => "wiener-jensen",
            CheckKind::WienerHolder => "wiener-holder",
            CheckKind::Young => "young",
            CheckKind::WienerRIndependence => "wiener-r-independence",
            CheckKind::WindowIndependence => "window-independence",
            CheckKind::Embedding => "embedding",
            CheckKind::PeriodicModulation => "periodic-modulation",
            CheckKind::ZakModulation => "zak-modulation",
            CheckKind::ZakLebesgue => "zak-lebesgue",
            CheckKind::DecayFit => "decay-fit",
            CheckKind::FactorialBound => "factorial-bound",
        }
    }

    /// Checks that accept a planted defect.
    pub fn accepts_defect(self) -> bool {
        matches!(self, CheckKind::QuasiPeriodicity | CheckKind::EchoPeriodicity | CheckKind::All)
    }
}

/// Everything a check may read from the configuration.
#[derive(Clone, Debug, Default)]
pub struct CheckContext {
    pub seed: u64,
    pub quick: bool,
    pub plant_defect: Option<f64>,
    pub basis: Option<OrderedBasis>,
    pub p: Option<Vec<f64>>,
    pub q: Option<Vec<f64>>,
    pub r: Option<Vec<f64>>,
    pub weight: Option<Weight>,
    pub family: Option<SignalFamily>,
    pub resolution: Option<Resolution>,
}

impl From<&ExperimentConfig> for CheckContext {
    fn from(c: &ExperimentConfig) -> Self {
        Self {
            seed: c.seed,
            quick: c.quick,
            plant_defect: c.plant_defect,
            basis: c.basis.clone(),
            p: c.p.clone(),
            q: c.q.clone(),
            r: c.r.clone(),
            weight: c.weight.clone(),
            family: c.family.clone(),
            resolution: c.resolution,
        }
    }
}

impl CheckContext {
    fn or<'a>(&self, v: &'a Option<Vec<f64>>, full: &'a [f64], quick: &'a [f64]) -> &'a [f64] {
        match v {
            Some(v) => v,
            None if self.quick => quick,
            None => full,
        }
    }

    fn family_or(&self, full: SignalFamily, quick: SignalFamily) -> SignalFamily {
        match &self.family {
            Some(f) => f.clone(),
            None if self.quick => quick,
            None => full,
        }
    }

    fn sampling(&self, default: Sampling) -> Sampling {
        match self.resolution {
            Some(r) => Sampling { coarse: r.coarse, fine: r.fine, ..default },
            None => default,
        }
    }

    fn steps(&self, coarse: f64, fine: f64) -> (f64, f64) {
        self.resolution.map(|r| (r.coarse, r.fine)).unwrap_or((coarse, fine))
    }

    fn basis_1d(&self) -> Result<OrderedBasis> {
        let b = self.basis.clone().unwrap_or_else(|| OrderedBasis::standard(1));
        if b.dim() != 1 {
            return Err(Error::UnsupportedDimension("this check runs in one dimension".into()));
        }
        Ok(b)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub summary: CheckSummary,
    #[serde(skip)]
    pub tables: Vec<Table>,
    pub details: serde_json::Value,
}

impl CheckOutcome {
    fn new(summary: CheckSummary, tables: Vec<Table>, details: impl Serialize) -> Self {
        Self { summary, tables, details: serde_json::to_value(details).expect("details serialize") }
    }
}

pub fn run_check(kind: CheckKind, ctx: &CheckContext) -> Result<CheckOutcome> {
    if ctx.plant_defect.is_some() && !kind.accepts_defect() {
        return Err(Error::InvalidParameter(format!("{} does not accept a planted defect", kind.name())));
    }
    match kind {
        CheckKind::All => Err(Error::InvalidParameter("`all` is a suite, not a single check".into())),
        CheckKind::FiniteParseval => finite_parseval(ctx),
        CheckKind::ZakParseval => zak_parseval(ctx),
        CheckKind::QuasiPeriodicity => quasi_periodicity(ctx),
        CheckKind::EchoPeriodicity => echo_periodicity(ctx),
        CheckKind::StftClosedForm => stft_closed_form(ctx),
        CheckKind::WienerJensen => wiener_jensen(ctx),
        CheckKind::WienerHolder => wiener_holder(ctx),
        CheckKind::Young => young(ctx),
        CheckKind::WienerRIndependence => wiener_r(ctx),
        CheckKind::WindowIndependence => window_independence(ctx),
        CheckKind::Embedding => embedding(ctx),
        CheckKind::PeriodicModulation => periodic_modulation(ctx),
        CheckKind::ZakModulation => zak_modulation(ctx),
        CheckKind::ZakLebesgue => zak_lebesgue(ctx),
        CheckKind::DecayFit => decay_fit(ctx),
        CheckKind::FactorialBound => factorial_bound(ctx),
    }
}

fn gaussian(step: f64) -> Result<SampledField> {
    sample(|x| Complex64::new((-0.5 * x[0] * x[0]).exp(), 0.0), &[-16.0], &[16.0], step)
}

fn exps(v: &[f64]) -> Vec<f64> {
    v.to_vec()
}

// Identity checks.

pub const FINITE_PARSEVAL_TOLERANCE: f64 = 1e-10;
pub const QUASI_PERIODICITY_TOLERANCE: f64 = 1e-9;
pub const ECHO_TOLERANCE: f64 = 1e-8;
/// Smallest defect that counts as detecting a planted 1% corruption.
pub const DETECTION_THRESHOLD: f64 = 5e-3;
pub const PLANTED: f64 = 0.01;

fn finite_parseval(ctx: &CheckContext) -> Result<CheckOutcome> {
    let lengths: &[usize] = if ctx.quick { &[64, 1024] } else { &[64, 1024, 4096] };
    let trials = if ctx.quick { 10 } else { 100 };
    let mut t = Table::new("finite-parseval", &["length", "factorizations", "trials", "worst_relative_defect"]);
    let mut worst = 0.0f64;
    for &l in lengths {
        let w = check_finite_parseval(l, trials, ctx.seed)?;
        let n = (2..=l / 2).filter(|m| l % m == 0).count();
        t.push(vec![l.to_string(), n.to_string(), trials.to_string(), fmt_f64(w)]);
        worst = worst.max(w);
    }
    let s = CheckSummary::new("finite-parseval")
        .metric("worst_relative_defect", worst)
        .metric("tolerance", FINITE_PARSEVAL_TOLERANCE)
        .verdict(worst <= FINITE_PARSEVAL_TOLERANCE);
    Ok(CheckOutcome::new(s, vec![t], serde_json::json!({ "lengths": lengths, "trials": trials })))
}

/// `|κ(E')|^{1/2}`, the constant of `‖Z_Ef‖_{L²(κ(E×E'))} = C‖f‖₂`.
pub fn zak_parseval_expected(basis: &OrderedBasis) -> f64 {
    dual_basis(basis).cell_volume().sqrt()
}

pub const ZAK_PARSEVAL_TOLERANCE: f64 = 0.01;
pub const ZAK_PARSEVAL_DRIFT: f64 = 0.005;

fn zak_parseval(ctx: &CheckContext) -> Result<CheckOutcome> {
    let basis = ctx.basis_1d()?;
    let (hc, hf) = ctx.steps(1.0 / 64.0, 1.0 / 128.0);
    let c = check_zak_parseval(&gaussian(hc)?, &basis)?;
    let cf = check_zak_parseval(&gaussian(hf)?, &basis)?;
    let expected = zak_parseval_expected(&basis);
    let err = (c / expected - 1.0).abs();
    let drift = (cf / c - 1.0).abs();
    let mut t = Table::new("zak-parseval", &["step", "constant", "expected"]);
    t.push(vec![fmt_f64(hc), fmt_f64(c), fmt_f64(expected)]);
    t.push(vec![fmt_f64(hf), fmt_f64(cf), fmt_f64(expected)]);
    let s = CheckSummary::new("zak-parseval")
        .metric("constant", c)
        .metric("constant_fine", cf)
        .metric("expected", expected)
        .metric("relative_error", err)
        .metric("drift", drift)
        .note("expected constant is the square root of the dual cell volume")
        .verdict(err <= ZAK_PARSEVAL_TOLERANCE && drift <= ZAK_PARSEVAL_DRIFT);
    Ok(CheckOutcome::new(s, vec![t], serde_json::json!({ "basis": basis })))
}

fn quasi_periodicity(ctx: &CheckContext) -> Result<CheckOutcome> {
    let basis = ctx.basis_1d()?;
    let z = zak(&gaussian(1.0 / 32.0)?, &basis)?;
    // One x-cell of the array scaled by 1 + δ.
    let plant = |delta: f64| {
        let n = z.x_per_cell * z.xi_cells * z.xi_per_cell;
        let vals = z.field.values().iter().enumerate().map(|(i, v)| if i < n { v * (1.0 + delta) } else { *v }).collect();
        z.with_values(vals)
    };
    let measured = match ctx.plant_defect {
        Some(d) => plant(d)?,
        None => z.clone(),
    };
    let defect = check_quasiperiodicity(&measured);
    let planted = check_quasiperiodicity(&plant(PLANTED)?);
    let mut t = Table::new("quasi-periodicity", &["field", "relative_defect"]);
    t.push(vec!["measured".into(), fmt_f64(defect)]);
    t.push(vec!["planted-1pct".into(), fmt_f64(planted)]);
    let mut s = CheckSummary::new("quasi-periodicity")
        .metric("defect", defect)
        .metric("planted_defect", planted)
        .metric("tolerance", QUASI_PERIODICITY_TOLERANCE)
        .verdict(defect <= QUASI_PERIODICITY_TOLERANCE && planted >= DETECTION_THRESHOLD);
    if let Some(d) = ctx.plant_defect {
        s = s.note(format!("measured field carries a planted defect {d}"));
    }
    Ok(CheckOutcome::new(s, vec![t], serde_json::json!({ "boundary_mass": z.boundary_mass })))
}

/// The 32 × 32 × 64 × 64 grid (16 × 16 × 32 × 32 in quick mode).
pub fn echo_options(quick: bool) -> ZakStftOptions {
    let (per, crop) = if quick { (8, 32) } else { (16, 64) };
    ZakStftOptions {
        x_per_cell: Some(per),
        xi_per_cell: per,
        x_cells: 2,
        xi_cells: 2,
        eta_crop: Some(crop),
        y_crop: Some(crop),
        ..Default::default()
    }
}

fn echo_periodicity(ctx: &CheckContext) -> Result<CheckOutcome> {
    let basis = ctx.basis_1d()?;
    let g = stft_of_zak(&gaussian(1.0 / 32.0)?, &basis, &Window::standard(2), &echo_options(ctx.quick))?;
    let half = g.field.len() / 2;
    let plant = |delta: f64| {
        let ph = Complex64::from_polar(1.0, delta);
        let vals = g.field.values().iter().enumerate().map(|(i, v)| if i < half { v * ph } else { *v }).collect();
        g.with_values(vals)
    };
    let measured = match ctx.plant_defect {
        Some(d) => plant(d)?,
        None => g.clone(),
    };
    let defect = check_echo_periodicity(&measured);
    let planted = check_echo_periodicity(&plant(PLANTED)?);
    let mut t = Table::new("echo-periodicity", &["field", "relative_defect"]);
    t.push(vec!["measured".into(), fmt_f64(defect)]);
    t.push(vec!["planted-phase-0.01".into(), fmt_f64(planted)]);
    let shape = g.field.shape();
    let mut s = CheckSummary::new("echo-periodicity")
        .metric("defect", defect)
        .metric("planted_defect", planted)
        .metric("tolerance", ECHO_TOLERANCE)
        .verdict(defect <= ECHO_TOLERANCE && planted >= DETECTION_THRESHOLD);
    if let Some(d) = ctx.plant_defect {
        s = s.note(format!("measured field carries a planted phase error {d}"));
    }
    Ok(CheckOutcome::new(s, vec![t], serde_json::json!({ "shape": shape })))
}

pub const STFT_TOLERANCE: f64 = 1e-6;

fn stft_closed_form(ctx: &CheckContext) -> Result<CheckOutcome> {
    let (h, _) = ctx.steps(1.0 / 64.0, 1.0 / 128.0);
    let v = stft(&gaussian(h)?, &Window::standard(1))?;
    let mut err = 0.0f64;
    let mut origin = f64::NAN;
    for (i, z) in v.values().iter().enumerate() {
        let p = v.point(i);
        let want = 0.5f64.sqrt() * (-(p[0] * p[0] + p[1] * p[1]) / 4.0).exp();
        err = err.max((z.norm() - want).abs());
        if p[0] == 0.0 && p[1] == 0.0 {
            origin = z.norm();
        }
    }
    let mut t = Table::new("stft-closed-form", &["step", "max_error", "value_at_origin"]);
    t.push(vec![fmt_f64(h), fmt_f64(err), fmt_f64(origin)]);
    let s = CheckSummary::new("stft-closed-form")
        .metric("max_error", err)
        .metric("value_at_origin", origin)
        .metric("tolerance", STFT_TOLERANCE)
        .verdict(err <= STFT_TOLERANCE);
    Ok(CheckOutcome::new(s, vec![t], serde_json::json!({ "shape": v.shape() })))
}

// Hard inequalities.

fn summary_table(name: &str, s: &CheckSummary) -> Table {
    let mut t = Table::new(name, &["metric", "value"]);
    for (k, v) in &s.metrics {
        t.push(vec![k.clone(), fmt_f64(*v)]);
    }
    t
}

fn wiener_jensen(ctx: &CheckContext) -> Result<CheckOutcome> {
    let p = exps(ctx.or(&ctx.p, &[1.0, 1.5, 2.0, f64::INFINITY], &[1.0, 2.0]));
    let trials = if ctx.quick { 5 } else { 50 };
    let s = check_wiener_jensen(2, &p, trials, ctx.seed)?;
    let t = summary_table("wiener-jensen", &s);
    Ok(CheckOutcome::new(s, vec![t], serde_json::json!({ "p": p, "trials": trials, "dimension": 2 })))
}

fn wiener_holder(ctx: &CheckContext) -> Result<CheckOutcome> {
    let basis = ctx.basis.clone().unwrap_or_else(|| OrderedBasis::diagonal(&[0.5, 2.0]).expect("valid basis"));
    let r = exps(ctx.or(&ctx.r, &[0.5, 1.0, 2.0], &[0.5, 2.0]));
    let p = exps(ctx.or(&ctx.p, &[1.0, 2.0], &[1.0]));
    let trials = if ctx.quick { 5 } else { 50 };
    let s = check_wiener_holder(&basis, &r, &p, trials, ctx.seed)?;
    let t = summary_table("wiener-holder", &s);
    Ok(CheckOutcome::new(s, vec![t], serde_json::json!({ "basis": basis, "p": p, "r": r, "trials": trials })))
}

fn young(ctx: &CheckContext) -> Result<CheckOutcome> {
    let one = MixedExponent::from(Exponent::of(1.0));
    let l1 = check_young_semidiscrete(
        &OrderedBasis::standard(1),
        &[false],
        &one,
        &one,
        &Weight::one(),
        &Weight::one(),
        &YoungOptions { pairs: if ctx.quick { 10 } else { 50 }, seed: ctx.seed, nonnegative: true, ..Default::default() },
    )?;
    let mixed = check_young_semidiscrete(
        &OrderedBasis::standard(2),
        &[false, true],
        &MixedExponent::from(Exponent::of(2.0)),
        &one,
        &Weight::one(),
        &Weight::one(),
        &YoungOptions { pairs: if ctx.quick { 3 } else { 10 }, seed: ctx.seed, ..Default::default() },
    )?;
    let mut t1 = l1.report.table();
    t1.name = "young-l1".into();
    let mut t2 = mixed.report.table();
    t2.name = "young-p2-r1".into();
    let s = CheckSummary::new("young")
        .metric("l1_constant", l1.constant)
        .metric("l1_forced_bound", l1.forced_bound.unwrap_or(f64::INFINITY))
        .metric("mixed_constant", mixed.constant)
        .metric("mixed_drift", mixed.report.drift)
        .verdict(l1.passed && mixed.passed);
    Ok(CheckOutcome::new(s, vec![t1, t2], serde_json::json!({ "l1": l1, "mixed": mixed })))
}

// Equivalences.

fn merge_summaries(name: &str, reports: &[&EquivalenceReport]) -> CheckSummary {
    let worst_spread = reports.iter().map(|r| r.spread).fold(1.0, f64::max);
    let worst_drift = reports.iter().map(|r| r.drift).fold(0.0, f64::max);
    let mut s = CheckSummary::new(name)
        .metric("worst_spread", worst_spread)
        .metric("worst_drift", worst_drift)
        .metric("drift_bound", DRIFT_BOUND)
        .verdict(reports.iter().all(|r| r.passed));
    for r in reports {
        s = s.metric(&format!("{}.spread", r.name), r.spread).metric(&format!("{}.drift", r.name), r.drift);
    }
    s
}

/// STFT grid for the amalgam checks: every other sample in `x`, `|ξ| ≤ 12π`.
pub fn wiener_stft() -> StftOptions {
    StftOptions { x_stride: 2, xi_limit: Some(12.0 * PI), ..Default::default() }
}

fn wiener_r(ctx: &CheckContext) -> Result<CheckOutcome> {
    let fam = ctx.family_or(
        SignalFamily::gaussian_dilates(),
        SignalFamily::new(FamilyKind::GaussianDilates, vec![0.5, 2.0], 0, 0),
    );
    let p = exps(ctx.or(&ctx.p, &[0.5, 1.0, 2.0], &[1.0]));
    let r = exps(ctx.or(&ctx.r, &[0.5, 1.0, 2.0], &[0.5, 2.0]));
    let reps = wiener_r_independence(&fam, &p, &r, &ctx.sampling(Sampling::default()), &wiener_stft(), TRANSFORM_SPREAD_BOUND)?;
    let s = merge_summaries("wiener-r-independence", &reps.iter().collect::<Vec<_>>());
    let tables = reps.iter().map(EquivalenceReport::table).collect();
    Ok(CheckOutcome::new(s, tables, &reps))
}

/// `M²` with the STFT grid of the amalgam checks.
fn m2_measured() -> Measured {
    let mut spec = NormSpec::modulation_l2();
    *spec.stft_options_mut().expect("modulation norms take STFT options") = wiener_stft();
    Measured::new(spec, Representation::Signal)
}

fn gaussian_family(ctx: &CheckContext) -> SignalFamily {
    ctx.family_or(
        SignalFamily::gaussian_dilates().and(SignalFamily::modulated_gaussians()),
        SignalFamily::new(FamilyKind::GaussianDilates, vec![1.0, 2.0], 0, 0),
    )
}

fn window_independence(ctx: &CheckContext) -> Result<CheckOutcome> {
    let fam = gaussian_family(ctx);
    let phi2 = Window::tensor(vec![2.0], vec![0.0], vec![0.0])?;
    let rep = check_window_independence(
        &fam,
        &Window::standard(1),
        &phi2,
        &m2_measured(),
        &ctx.sampling(Sampling::default()),
        TRANSFORM_SPREAD_BOUND,
    )?;
    Ok(CheckOutcome::new(rep.summary(), vec![rep.table()], &rep))
}

fn embedding(ctx: &CheckContext) -> Result<CheckOutcome> {
    let fam = gaussian_family(ctx);
    let two = MixedExponent::from(Exponent::of(2.0));
    let source = Measured::new(
        NormSpec::Wiener {
            basis: None,
            local: MixedExponent::from(Exponent::Infinite),
            exponents: two.clone(),
            weight: Weight::one(),
        },
        Representation::Signal,
    );
    let target = Measured::new(
        NormSpec::MixedLebesgue { basis: None, exponents: two, weight: Weight::one(), domain: Domain::Full },
        Representation::Signal,
    );
    // Unit cells: ‖f‖_{L²(cell)} ≤ sup_cell |f|.
    let e = check_embedding(&fam, &source, &target, &ctx.sampling(Sampling::default()), Some(1.0))?;
    let s = CheckSummary::new("embedding")
        .metric("constant", e.constant)
        .metric("explicit_constant", 1.0)
        .metric("drift", e.report.drift)
        .note("L² against the amalgam with local sup and global ℓ² on unit cells")
        .verdict(e.passed);
    Ok(CheckOutcome::new(s, vec![e.report.table()], &e))
}

/// Width of the analysis window in the periodic check; its Fourier transform
/// then has standard deviation ½, half the spacing of the frequency lattice.
pub const PERIODIC_WINDOW_WIDTH: f64 = 2.0;
pub const PERIODIC_PAIRS: [(f64, f64); 4] = [(0.5, 0.5), (1.0, 1.0), (2.0, 0.5), (2.0, 2.0)];

pub fn periodic_window() -> Window {
    Window::tensor(vec![PERIODIC_WINDOW_WIDTH], vec![0.0], vec![0.0]).expect("valid window")
}

fn periodic_modulation(ctx: &CheckContext) -> Result<CheckOutcome> {
    let fam = ctx.family_or(SignalFamily::trig_polynomials(ctx.seed, 20), SignalFamily::trig_polynomials(ctx.seed, 5));
    let pairs: Vec<(f64, f64)> = match (&ctx.q, &ctx.r) {
        (Some(q), Some(r)) => q.iter().flat_map(|&a| r.iter().map(move |&b| (a, b))).collect(),
        _ if ctx.quick => vec![(1.0, 1.0), (2.0, 2.0)],
        _ => PERIODIC_PAIRS.to_vec(),
    };
    let omega0 = ctx.weight.clone().unwrap_or_else(Weight::one);
    let mut reps = Vec::new();
    for (q, r) in pairs {
        reps.push(check_periodic_modulation(
            &fam,
            q,
            r,
            &omega0,
            &periodic_window(),
            &PeriodicOptions::default(),
            COEFFICIENT_SPREAD_BOUND,
        )?);
    }
    let all: Vec<&EquivalenceReport> = reps.iter().flat_map(|r| [&r.script, &r.modulation]).collect();
    let homogeneity = reps.iter().map(|r| r.homogeneity).fold(0.0, f64::max);
    let generic = reps.iter().map(|r| r.homogeneity_generic).fold(0.0, f64::max);
    let s = merge_summaries("periodic-modulation", &all)
        .metric("homogeneity_defect", homogeneity)
        .metric("homogeneity_generic_scalar", generic)
        .metric("homogeneity_tolerance", HOMOGENEITY_TOLERANCE)
        .note("homogeneity is asserted for the scalars 2i and 1/4; the generic scalar is reported only")
        .verdict(reps.iter().all(|r| r.passed));
    let tables = all.iter().map(|r| r.table()).collect();
    Ok(CheckOutcome::new(s, tables, &reps))
}

pub const ZAK_R_VALUES: [f64; 4] = [0.5, 1.0, 2.0, f64::INFINITY];

fn zak_modulation(ctx: &CheckContext) -> Result<CheckOutcome> {
    let fam = gaussian_family(ctx);
    let basis = ctx.basis_1d()?;
    let p = exps(ctx.or(&ctx.p, &[1.0, 2.0], &[2.0]));
    let r = exps(ctx.or(&ctx.r, &ZAK_R_VALUES, &[1.0, f64::INFINITY]));
    let mut grid = ZakGrid::modulation_default();
    if let Some(res) = ctx.resolution {
        grid.sampling = Sampling { coarse: res.coarse, fine: res.fine, ..grid.sampling };
    }
    let mut reps = Vec::new();
    for &pv in &p {
        reps.push(check_zak_modulation(&fam, &basis, pv, &r, &Window::standard(2), &grid, TRANSFORM_SPREAD_BOUND)?);
    }
    let mut s = CheckSummary::new("zak-modulation");
    let mut tables = Vec::new();
    for rep in &reps {
        let k = format!("p{}", rep.p);
        s = s
            .metric(&format!("{k}.corollary_spread"), rep.corollary.spread)
            .metric(&format!("{k}.corollary_drift"), rep.corollary.drift)
            .metric(&format!("{k}.periodicity_defect"), rep.periodicity_defect)
            .metric(&format!("{k}.joint_spread"), rep.joint_spread)
            .metric(&format!("{k}.restricted_drift"), rep.restricted.iter().map(|r| r.drift).fold(0.0, f64::max));
        tables.push(rep.corollary.table());
        tables.extend(rep.restricted.iter().map(EquivalenceReport::table));
    }
    s = s.verdict(reps.iter().all(|r| r.passed));
    Ok(CheckOutcome::new(s, tables, &reps))
}

fn zak_lebesgue(ctx: &CheckContext) -> Result<CheckOutcome> {
    let fam = gaussian_family(ctx);
    let basis = ctx.basis_1d()?;
    let p = exps(ctx.or(&ctx.p, &[1.0, 2.0], &[2.0]));
    let r = exps(ctx.or(&ctx.r, &[1.0, 2.0], &[2.0]));
    let omega = ctx.weight.clone().unwrap_or_else(Weight::one);
    let mut grid = ZakGrid::lebesgue_default();
    if let Some(res) = ctx.resolution {
        grid.sampling = Sampling { coarse: res.coarse, fine: res.fine, ..grid.sampling };
    }
    let mut reps = Vec::new();
    for &pv in &p {
        for &rv in &r {
            reps.push(check_zak_lebesgue(&fam, &basis, pv, rv, &omega, &grid, TRANSFORM_SPREAD_BOUND)?);
        }
    }
    let s = merge_summaries("zak-lebesgue", &reps.iter().collect::<Vec<_>>());
    let tables = reps.iter().map(EquivalenceReport::table).collect();
    Ok(CheckOutcome::new(s, tables, &reps))
}

// Decay.

pub const DECAY_RATE: f64 = 0.25;
pub const DECAY_TOLERANCE: f64 = 0.05;

fn decay_fit(ctx: &CheckContext) -> Result<CheckOutcome> {
    let (h, _) = ctx.steps(1.0 / 64.0, 1.0 / 128.0);
    let v = stft_with(&gaussian(h)?, &Window::standard(1), &StftOptions { x_stride: 8, ..Default::default() })?;
    let mag = v.map(|z| Complex64::new(z.norm(), 0.0));
    let half = fit_gs_decay(&mag, 0.5, 0.5, DecayMode::Decay, 40)?;
    let one = fit_gs_decay(&mag, 1.0, 1.0, DecayMode::Decay, 40)?;
    let err = (half.r / DECAY_RATE - 1.0).abs();
    let mut t = Table::new("decay-envelope", &["s", "sigma", "rho", "log_value"]);
    for m in [&half, &one] {
        for &(rho, lv) in &m.envelope {
            t.push(vec![fmt_f64(m.s), fmt_f64(m.sigma), fmt_f64(rho), fmt_f64(lv)]);
        }
    }
    let s = CheckSummary::new("decay-fit")
        .metric("rate", half.r)
        .metric("expected_rate", DECAY_RATE)
        .metric("relative_error", err)
        .metric("residual", half.residual)
        .metric("s1_inner_rate", one.r_inner)
        .metric("s1_outer_rate", one.r_outer)
        .verdict(err <= DECAY_TOLERANCE && half.is_member() && one.super_exponential);
    Ok(CheckOutcome::new(s, vec![t], serde_json::json!({ "half": half, "one": one })))
}

pub const FACTORIAL_CASES: [(f64, f64); 3] = [(1.0, 1.0), (2.0, 1.0), (1.0, 0.5)];
pub const FACTORIAL_BETA_MAX: u32 = 60;

fn factorial_bound(_ctx: &CheckContext) -> Result<CheckOutcome> {
    let mut t = Table::new("factorial-bound", &["r", "s", "beta", "ratio"]);
    let mut s = CheckSummary::new("factorial-bound");
    let mut passed = true;
    let mut out = Vec::new();
    for (r, sv) in FACTORIAL_CASES {
        let b = check_factorial_bound(r, sv, FACTORIAL_BETA_MAX)?;
        let doubled = check_factorial_bound(2.0 * r, sv, FACTORIAL_BETA_MAX)?;
        let scaling = doubled.h / b.h;
        let scaling_ok = (scaling / 2f64.powf(-sv) - 1.0).abs() <= 0.05;
        let k = format!("r{r}-s{sv}");
        s = s
            .metric(&format!("{k}.h"), b.h)
            .metric(&format!("{k}.threshold"), b.threshold)
            .metric(&format!("{k}.h_over_threshold"), b.h / b.threshold)
            .metric(&format!("{k}.limit"), b.limit)
            .metric(&format!("{k}.doubling_ratio"), scaling);
        passed &= b.passed && scaling_ok;
        for &(beta, ratio) in &b.per_beta {
            t.push(vec![fmt_f64(r), fmt_f64(sv), beta.to_string(), fmt_f64(ratio)]);
        }
        out.push(b);
    }
    s = s.note("verdict: h bounded, h ≤ 1.1·(r/(se))^(−s), and h(2r)/h(r) = 2^(−s) within 5%").verdict(passed);
    Ok(CheckOutcome::new(s, vec![t], &out))
}
