use tfzak_core::experiments::{fmt_f64, Measured, Representation, SignalFamily, Table};
use tfzak_core::norms::{NormInput, NormSpec, NormValue};
use tfzak_core::{Error, SampledField};

use super::core_exit;
use crate::config::NormConfig;
use crate::manifest::{now, RunManifest, MANIFEST_FILE};
use crate::signals::SignalSpec;
use crate::output::RunDir;
use crate::{Exit, NormArgs, Session};

/// Default sampling box `[lo, hi)` per axis.
pub const BOX: (f64, f64) = (-8.0, 8.0);

pub const HEADER: [&str; 9] = ["signal", "family", "level", "step", "value", "samples", "steps", "inf_handled", "spec"];

fn merged(session: &Session, args: &NormArgs) -> Result<NormConfig, Exit> {
    let mut n = session.config.norm.clone();
    if let Some(text) = &args.spec {
        let spec: NormSpec = serde_json::from_str(text).map_err(|e| Exit::usage(format!("--spec: {e}")))?;
        match &mut n {
            Some(c) => c.spec = spec,
            None => n = Some(NormConfig { spec, on: Representation::Signal, signal: None, lo: None, hi: None }),
        }
    }
    let mut n = n.ok_or_else(|| Exit::usage("norm needs --spec or a `norm.spec` config key"))?;
    if let Some(name) = &args.signal {
        n.signal = Some(SignalSpec::by_name(name).ok_or_else(|| Exit::usage(format!("unknown signal `{name}`")))?);
    }
    Ok(n)
}

/// Whether any exponent of the spec is infinite, i.e. reduced by a maximum.
pub fn has_infinite_exponent(spec: &NormSpec) -> bool {
    fn walk(v: &serde_json::Value) -> bool {
        match v {
            serde_json::Value::String(s) => s == "inf",
            serde_json::Value::Array(a) => a.iter().any(walk),
            serde_json::Value::Object(o) => o.values().any(walk),
            _ => false,
        }
    }
    walk(&serde_json::to_value(spec).expect("spec serializes"))
}

fn explain(e: Error) -> Exit {
    match e {
        Error::DimensionMismatch(m) if m.contains("exponent") => Exit::usage(format!(
            "exponent arity: a mixed exponent needs one entry per reduced axis, or a single entry to broadcast ({m})"
        )),
        e => core_exit("norm", e),
    }
}

struct Input {
    id: String,
    closed: Option<tfzak_core::experiments::Signal>,
    spec: Option<SignalSpec>,
}

fn evaluate(n: &NormConfig, input: &Input, lo: f64, hi: f64, step: f64) -> Result<NormValue, Exit> {
    let measured = Measured::new(n.spec.clone(), n.on.clone());
    if let Representation::Coefficients = n.on {
        let s = input.closed.as_ref().ok_or_else(|| Exit::usage(format!("{} has no closed form", input.id)))?;
        let c = s.coefficients().map_err(explain)?;
        return n.spec.evaluate(NormInput::Coefficients(&c)).map_err(explain);
    }
    let f: SampledField = match (&input.spec, &input.closed) {
        (Some(spec), _) => spec
            .sample(lo, hi, step)
            .map_err(explain)?
            .ok_or_else(|| Exit::usage(format!("{} is a discrete signal", input.id)))?,
        (None, Some(s)) => s.sample(lo, hi, step).map_err(explain)?,
        (None, None) => unreachable!("inputs carry a spec or a closed form"),
    };
    measured.evaluate_field(&f).map_err(explain)
}

pub fn run(session: Session, args: &NormArgs) -> Result<Exit, Exit> {
    let started = now();
    let n = merged(&session, args)?;
    let res = session.config.resolution();
    let (lo, hi) = (n.lo.unwrap_or(BOX.0), n.hi.unwrap_or(BOX.1));
    if !(lo < hi) {
        return Err(Exit::usage(format!("empty sampling box [{lo}, {hi})")));
    }
    let inputs: Vec<Input> = match &n.signal {
        Some(s) => vec![Input { id: s.id(), closed: s.to_signal(), spec: Some(s.clone()) }],
        None => session
            .config
            .family
            .clone()
            .unwrap_or_else(SignalFamily::gaussian_dilates)
            .signals()
            .map_err(explain)?
            .into_iter()
            .map(|s| Input { id: s.id.clone(), closed: Some(s), spec: None })
            .collect(),
    };
    let inf = if has_infinite_exponent(&n.spec) { "max" } else { "none" };
    let spec_json = serde_json::to_string(&n.spec).expect("spec serializes");
    let mut t = Table::new("norm", &HEADER);
    for input in &inputs {
        for (level, step) in [("coarse", res.coarse), ("fine", res.fine)] {
            let v = evaluate(&n, input, lo, hi, step)?;
            let steps: Vec<String> = v.steps.iter().map(|s| fmt_f64(*s)).collect();
            t.push(vec![
                input.id.clone(),
                n.spec.family().to_string(),
                level.to_string(),
                fmt_f64(step),
                fmt_f64(v.value),
                v.samples.to_string(),
                steps.join(" "),
                inf.to_string(),
                spec_json.clone(),
            ]);
        }
    }
    let mut dir = RunDir::create(session.out.join("norm"))?;
    let csv = dir.table("norms.csv", &t)?;
    let mut cfg = session.config.clone();
    cfg.norm = Some(n);
    let mut m = RunManifest::new("norm", &cfg, started);
    m.artifacts = dir.artifacts.clone();
    m.finished = now();
    dir.json(MANIFEST_FILE, &m)?;
    for row in &t.rows {
        println!("{} {} {}", row[0], row[2], row[4]);
    }
    println!("{}", csv.display());
    Ok(Exit::ok())
}
