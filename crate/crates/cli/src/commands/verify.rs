use std::time::Instant;

use serde::Serialize;
use tfzak_core::experiments::{fmt_f64, CheckSummary};

use super::is_usage_error;
use crate::checks::{run_check, CheckContext, CheckKind, CheckOutcome};
use crate::manifest::{now, RunManifest, MANIFEST_FILE};
use crate::output::{slug, RunDir};
use crate::{Exit, Session, VerifyArgs};

#[derive(Serialize)]
struct SummaryFile<'a> {
    summary: &'a CheckSummary,
    details: &'a serde_json::Value,
}

fn headline(s: &CheckSummary) -> String {
    // Top-level metrics before per-case ones.
    let mut keys: Vec<(&String, &f64)> = s.metrics.iter().collect();
    keys.sort_by_key(|(k, _)| k.contains('.'));
    keys.iter().take(4).map(|(k, v)| format!("{k}={}", fmt_f64(**v))).collect::<Vec<_>>().join(" ")
}

pub fn run(session: Session, args: &VerifyArgs) -> Result<Exit, Exit> {
    let started = now();
    let mut cfg = session.config.clone();
    let kind = args
        .kind
        .or(cfg.experiment)
        .ok_or_else(|| Exit::usage("verify needs a check name or an `experiment` config key"))?;
    cfg.experiment = Some(kind);
    cfg.quick |= args.quick;
    if args.plant_defect.is_some() {
        cfg.plant_defect = args.plant_defect;
    }
    if let Some(d) = cfg.plant_defect {
        if !kind.accepts_defect() {
            return Err(Exit::usage(format!(
                "{} does not accept --plant-defect; use quasi-periodicity or echo-periodicity",
                kind.name()
            )));
        }
        if !d.is_finite() {
            return Err(Exit::usage("--plant-defect must be finite"));
        }
    }
    let ctx = CheckContext::from(&cfg);
    let kinds: Vec<CheckKind> = if kind == CheckKind::All { CheckKind::SUITE.to_vec() } else { vec![kind] };

    let mut dir = RunDir::create(session.out.join(format!("verify-{}", kind.name())))?;
    let mut manifest = RunManifest::new(&format!("verify {}", kind.name()), &cfg, started);
    let mut failing = Vec::new();
    for k in kinds {
        let mut c = ctx.clone();
        if !k.accepts_defect() {
            c.plant_defect = None;
        }
        let t0 = Instant::now();
        let outcome = match run_check(k, &c) {
            Ok(o) => o,
            Err(e) if is_usage_error(&e) && kind != CheckKind::All => {
                return Err(Exit::usage(format!("{}: {e}", k.name())));
            }
            Err(e) => CheckOutcome {
                summary: CheckSummary::new(k.name()).note(format!("error: {e}")).verdict(false),
                tables: Vec::new(),
                details: serde_json::Value::Null,
            },
        };
        let secs = t0.elapsed().as_secs_f64();
        write_outcome(&mut dir, k, &outcome)?;
        let verdict = if outcome.summary.passed { "PASS" } else { "FAIL" };
        println!("{verdict} {:<22} {:>7.1}s  {}", k.name(), secs, headline(&outcome.summary));
        for n in &outcome.summary.notes {
            if n.starts_with("error") {
                println!("     {n}");
            }
        }
        if !outcome.summary.passed {
            failing.push(k.name());
        }
        manifest.verdicts.insert(k.name().to_string(), outcome.summary.passed);
    }
    manifest.finished = now();
    manifest.artifacts = dir.artifacts.clone();
    manifest.artifacts.push(MANIFEST_FILE.to_string());
    dir.json(MANIFEST_FILE, &manifest)?;
    if failing.is_empty() {
        Ok(Exit::ok())
    } else {
        Ok(Exit::failed(format!("failing checks: {}", failing.join(", "))))
    }
}

fn write_outcome(dir: &mut RunDir, k: CheckKind, o: &CheckOutcome) -> anyhow::Result<()> {
    let base = k.name();
    dir.json(&format!("{base}/summary.json"), &SummaryFile { summary: &o.summary, details: &o.details })?;
    let mut used = std::collections::BTreeSet::new();
    for t in &o.tables {
        let stem = slug(&t.name);
        let mut name = stem.clone();
        let mut n = 1;
        while !used.insert(name.clone()) {
            n += 1;
            name = format!("{stem}-{n}");
        }
        dir.table(&format!("{base}/{name}.csv"), t)?;
    }
    Ok(())
}
