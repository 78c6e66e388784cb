//! Long-format plot data gathered from earlier runs.

use std::path::{Path, PathBuf};

use anyhow::Context;
use tfzak_core::experiments::Table;

use crate::manifest::{now, RunManifest, MANIFEST_FILE};
use crate::output::{slug, RunDir};
use crate::{Exit, ReportArgs, Session};

pub const REPORT_DIR: &str = "report";

const RATIO_HEADER: [&str; 7] = ["signal", "norm_a", "norm_b", "ratio", "norm_a_fine", "norm_b_fine", "ratio_fine"];

/// The numeric tail of a signal id, used as the curve abscissa:
/// `gaussian-w0.5` gives 0.5, `modulated-mu-2` gives -2 and `trig-3` gives 3.
pub fn parameter(id: &str) -> Option<f64> {
    let segs: Vec<&str> = id.split('-').collect();
    let last = *segs.last()?;
    let digits = last.trim_start_matches(|c: char| c.is_ascii_alphabetic());
    if digits.len() < last.len() {
        return digits.parse().ok();
    }
    let v: f64 = last.parse().ok()?;
    // A short parameter name followed by a separator marks a negative value.
    match segs.len().checked_sub(2).map(|i| segs[i]) {
        Some(name) if (1..=2).contains(&name.len()) && name.chars().all(|c| c.is_ascii_alphabetic()) => Some(-v),
        _ => Some(v),
    }
}

fn discover(out: &Path) -> anyhow::Result<Vec<PathBuf>> {
    let mut found = Vec::new();
    let Ok(entries) = std::fs::read_dir(out) else {
        return Ok(found);
    };
    for e in entries {
        let p = e?.path().join(MANIFEST_FILE);
        if p.is_file() {
            found.push(p);
        }
    }
    found.sort();
    Ok(found)
}

fn read_table(path: &Path) -> anyhow::Result<(Vec<String>, Vec<Vec<String>>)> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("cannot read {}", path.display()))?;
    let header = r.headers()?.iter().map(str::to_string).collect();
    let rows = r.records().map(|rec| rec.map(|r| r.iter().map(str::to_string).collect())).collect::<Result<_, _>>()?;
    Ok((header, rows))
}

pub fn run(session: Session, args: &ReportArgs) -> Result<Exit, Exit> {
    let started = now();
    let paths = if args.manifest.is_empty() {
        discover(&session.out)?
    } else {
        for p in &args.manifest {
            if !p.is_file() {
                return Err(Exit::usage(format!("manifest {} does not exist", p.display())));
            }
        }
        args.manifest.clone()
    };
    let mut manifests = Vec::new();
    for p in &paths {
        let m = RunManifest::load(p)?;
        if m.command != "report" {
            manifests.push((p.clone(), m));
        }
    }
    if manifests.is_empty() {
        return Err(Exit::usage(format!("no run manifests found under {}", session.out.display())));
    }

    let mut ratios = Table::new("ratios", &["run", "check", "table", "signal", "parameter", "level", "norm_a", "norm_b", "ratio"]);
    let mut decay = Table::new("decay-envelope", &["run", "s", "sigma", "rho", "log_value"]);
    let mut curves: Vec<(String, Table)> = Vec::new();
    for (path, m) in &manifests {
        let root = path.parent().unwrap_or(Path::new("."));
        let run = root.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        for a in m.artifacts.iter().filter(|a| a.ends_with(".csv")) {
            let file = root.join(a);
            if !file.is_file() {
                return Err(Exit::usage(format!("artifact {} listed in {} is missing", file.display(), path.display())));
            }
            let (header, rows) = read_table(&file)?;
            let check = a.split('/').next().unwrap_or("").to_string();
            let table = Path::new(a).file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            if header == RATIO_HEADER {
                let mut curve =
                    Table::new(table.clone(), &["index", "signal", "parameter", "ratio", "ratio_fine"]);
                for (i, r) in rows.iter().enumerate() {
                    let par = parameter(&r[0]).map(|v| format!("{v:?}")).unwrap_or_default();
                    for (level, a_, b_, q) in [("coarse", 1, 2, 3), ("fine", 4, 5, 6)] {
                        ratios.push(vec![
                            run.clone(),
                            check.clone(),
                            table.clone(),
                            r[0].clone(),
                            par.clone(),
                            level.into(),
                            r[a_].clone(),
                            r[b_].clone(),
                            r[q].clone(),
                        ]);
                    }
                    curve.push(vec![i.to_string(), r[0].clone(), par, r[3].clone(), r[6].clone()]);
                }
                curves.push((format!("curves/{}--{}--{}.csv", slug(&run), slug(&check), slug(&table)), curve));
            } else if table == "decay-envelope" {
                for r in rows {
                    let mut row = vec![run.clone()];
                    row.extend(r);
                    decay.push(row);
                }
            }
        }
    }

    let mut dir = RunDir::create(session.out.join(REPORT_DIR))?;
    dir.table("ratios.csv", &ratios)?;
    dir.table("decay-envelope.csv", &decay)?;
    for (rel, t) in &curves {
        dir.table(rel, t)?;
    }
    let mut rm = RunManifest::new("report", &session.config, started);
    rm.artifacts = dir.artifacts.clone();
    rm.finished = now();
    dir.json(MANIFEST_FILE, &rm)?;
    println!(
        "{} runs, {} ratio rows, {} curves, {} envelope points -> {}",
        manifests.len(),
        ratios.rows.len(),
        curves.len(),
        decay.rows.len(),
        dir.root.display()
    );
    Ok(Exit::ok())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parameters_from_ids() {
        assert_eq!(parameter("gaussian-w0.5"), Some(0.5));
        assert_eq!(parameter("modulated-mu-2"), Some(-2.0));
        assert_eq!(parameter("trig-3"), Some(3.0));
        assert_eq!(parameter("delta"), None);
    }
}
