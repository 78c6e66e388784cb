use std::collections::BTreeMap;
use std::fs::File;

use anyhow::Context;
use tfzak_core::io::{write_csv, write_field, write_zak, FieldHeader, FieldKind, Precision, Provenance};
use tfzak_core::transforms::{finite_zak, stft_with, zak, StftOptions};
use tfzak_core::{Axis, OrderedBasis, SampledField, Window};

use super::core_exit;
use crate::config::{TransformConfig, TransformKind};
use crate::manifest::{now, RunManifest, MANIFEST_FILE};
use crate::output::{slug, RunDir};
use crate::signals::SignalSpec;
use crate::{Exit, Session, TransformArgs};

/// Sampling box for continuous signals.
pub const BOX: (f64, f64) = (-16.0, 16.0);

/// STFT grid used when the config gives none; keeps the CSV export small.
pub fn default_stft() -> StftOptions {
    StftOptions { x_stride: 8, xi_limit: Some(16.0), ..Default::default() }
}

enum Output {
    Zak(tfzak_core::transforms::ZakField),
    Field(SampledField, FieldHeader),
}

fn merged(session: &Session, args: &TransformArgs) -> Result<TransformConfig, Exit> {
    let base = session.config.transform.clone();
    let kind = args
        .kind
        .or(base.as_ref().map(|t| t.kind))
        .ok_or_else(|| Exit::usage("transform needs --kind or a `transform.kind` config key"))?;
    let mut t = base.unwrap_or(TransformConfig {
        kind,
        signal: None,
        window: None,
        stft: None,
        length: None,
        rows: None,
        cutoff: None,
        precision: Precision::default(),
    });
    t.kind = kind;
    if let Some(name) = &args.signal {
        t.signal = Some(SignalSpec::by_name(name).ok_or_else(|| Exit::usage(format!("unknown signal `{name}`")))?);
    }
    t.length = args.length.or(t.length);
    t.rows = args.rows.or(t.rows);
    t.cutoff = args.cutoff.or(t.cutoff);
    Ok(t)
}

fn compute(session: &Session, t: &TransformConfig) -> Result<(String, Output), Exit> {
    let step = session.config.resolution().coarse;
    let basis = session.config.basis.clone().unwrap_or_else(|| OrderedBasis::standard(1));
    let default_signal = match t.kind {
        TransformKind::FiniteZak => SignalSpec::Delta,
        TransformKind::Coefficients => SignalSpec::by_name("trig").expect("built in"),
        _ => SignalSpec::by_name("gaussian").expect("built in"),
    };
    let signal = t.signal.clone().unwrap_or(default_signal);
    let sampled = || -> Result<SampledField, Exit> {
        signal
            .sample(BOX.0, BOX.1, step)
            .map_err(|e| core_exit("sampling", e))?
            .ok_or_else(|| Exit::usage(format!("{} is a discrete signal; use --kind finite-zak", signal.id())))
    };
    let name = format!("{}-{}", kind_name(t.kind), slug(&signal.id()));
    let out = match t.kind {
        TransformKind::Zak => Output::Zak(zak(&sampled()?, &basis).map_err(|e| core_exit("zak", e))?),
        TransformKind::Stft => {
            let f = sampled()?;
            let phi = t.window.clone().unwrap_or_else(|| Window::standard(f.dim()));
            let opts = t.stft.clone().unwrap_or_else(default_stft);
            let v = stft_with(&f, &phi, &opts).map_err(|e| core_exit("stft", e))?;
            let h = FieldHeader::for_field(&v, FieldKind::Stft).with_provenance(Provenance::stft(&phi, &opts));
            Output::Field(v, h)
        }
        TransformKind::FiniteZak => {
            let l = t.length.ok_or_else(|| Exit::usage("finite-zak needs --L"))?;
            let m = t.rows.ok_or_else(|| Exit::usage("finite-zak needs --M"))?;
            if m == 0 || l % m != 0 {
                return Err(Exit::usage(format!("--M {m} does not divide --L {l}")));
            }
            let n = l / m;
            let f = signal
                .discrete(l)
                .ok_or_else(|| Exit::usage(format!("{} has no discrete form", signal.id())))?;
            let z = finite_zak(&f, m, n).map_err(|e| core_exit("finite-zak", e))?;
            let field = SampledField::new(vec![Axis::line(0.0, 1.0, m), Axis::line(0.0, 1.0, n)], z)
                .map_err(|e| core_exit("finite-zak", e))?;
            let mut extra = BTreeMap::new();
            extra.insert("L".into(), l.into());
            extra.insert("M".into(), m.into());
            extra.insert("N".into(), n.into());
            let prov = Provenance { transform: "finite-zak".into(), extra, ..Default::default() };
            let h = FieldHeader::for_field(&field, FieldKind::Other).with_provenance(prov);
            Output::Field(field, h)
        }
        TransformKind::Coefficients => {
            let s = signal
                .to_signal()
                .ok_or_else(|| Exit::usage(format!("{} has no closed form", signal.id())))?;
            let c = s.coefficients().map_err(|e| core_exit("coefficients", e))?;
            let cut = t.cutoff.unwrap_or(c.cutoff[0]);
            if cut < 0 {
                return Err(Exit::usage("--cutoff must be non-negative"));
            }
            let vals = (-cut..=cut).map(|m| c.get(&[m])).collect();
            let field = SampledField::new(vec![Axis::line(-cut as f64, 1.0, (2 * cut + 1) as usize)], vals)
                .map_err(|e| core_exit("coefficients", e))?;
            let prov = Provenance {
                transform: "coefficients".into(),
                basis: Some(c.basis.clone()),
                truncation_radius: Some(cut as f64),
                ..Default::default()
            };
            let h = FieldHeader::for_field(&field, FieldKind::Other).with_provenance(prov);
            Output::Field(field, h)
        }
    };
    Ok((name, out))
}

fn kind_name(k: TransformKind) -> &'static str {
    match k {
        TransformKind::Zak => "zak",
        TransformKind::Stft => "stft",
        TransformKind::FiniteZak => "finite-zak",
        TransformKind::Coefficients => "coefficients",
    }
}

pub fn run(session: Session, args: &TransformArgs) -> Result<Exit, Exit> {
    let started = now();
    let t = merged(&session, args)?;
    // Everything is computed before the first file is created.
    let (name, out) = compute(&session, &t)?;
    let mut dir = RunDir::create(session.out.join(format!("transform-{}", kind_name(t.kind))))?;
    let tfz = dir.file(&format!("{name}.tfz"))?;
    let csv = dir.file(&format!("{name}.csv"))?;
    let field = match &out {
        Output::Zak(z) => {
            let f = File::create(&tfz).with_context(|| format!("cannot write {}", tfz.display()))?;
            write_zak(f, z, t.precision).map_err(|e| core_exit("writing container", e))?;
            &z.field
        }
        Output::Field(f, h) => {
            let file = File::create(&tfz).with_context(|| format!("cannot write {}", tfz.display()))?;
            write_field(file, f, &h.clone().with_precision(t.precision)).map_err(|e| core_exit("writing container", e))?;
            f
        }
    };
    let file = File::create(&csv).with_context(|| format!("cannot write {}", csv.display()))?;
    write_csv(file, field).map_err(|e| core_exit("writing csv", e))?;

    let mut cfg = session.config.clone();
    cfg.transform = Some(t);
    let mut m = RunManifest::new("transform", &cfg, started);
    m.artifacts = dir.artifacts.clone();
    m.finished = now();
    dir.json(MANIFEST_FILE, &m)?;
    println!("{}", tfz.display());
    println!("{}", csv.display());
    Ok(Exit::ok())
}
