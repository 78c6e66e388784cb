//! Writers for the run directory: CSV tables and JSON summaries.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use tfzak_core::experiments::Table;

/// Collects the files written during one run, relative to its directory.
#[derive(Debug)]
pub struct RunDir {
    pub root: PathBuf,
    pub artifacts: Vec<String>,
}

impl RunDir {
    pub fn create(root: PathBuf) -> Result<Self> {
        fs::create_dir_all(&root).with_context(|| format!("cannot create {}", root.display()))?;
        Ok(Self { root, artifacts: Vec::new() })
    }

    fn target(&mut self, rel: &str) -> Result<PathBuf> {
        let path = self.root.join(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).with_context(|| format!("cannot create {}", parent.display()))?;
        }
        self.artifacts.push(rel.replace('\\', "/"));
        Ok(path)
    }

    pub fn table(&mut self, rel: &str, t: &Table) -> Result<PathBuf> {
        let path = self.target(rel)?;
        write_table(&path, t)?;
        Ok(path)
    }

    pub fn json<T: Serialize>(&mut self, rel: &str, v: &T) -> Result<PathBuf> {
        let path = self.target(rel)?;
        write_json(&path, v)?;
        Ok(path)
    }

    /// Registers a file written by someone else.
    pub fn file(&mut self, rel: &str) -> Result<PathBuf> {
        self.target(rel)
    }
}

pub fn write_table(path: &Path, t: &Table) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("cannot write {}", path.display()))?;
    w.write_record(&t.header)?;
    for row in &t.rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Pretty JSON with a trailing newline. Maps are `BTreeMap`s and structs
/// serialize in declaration order, so key order is stable.
pub fn write_json<T: Serialize>(path: &Path, v: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(v)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

/// File-name friendly form of a label.
pub fn slug(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        if c.is_ascii_alphanumeric() || c == '.' || c == '-' || c == '_' {
            out.push(c);
        } else if !out.ends_with('-') {
            out.push('-');
        }
    }
    out.trim_matches('-').to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slugs() {
        assert_eq!(slug("r=0.5, p=inf"), "r-0.5-p-inf");
        assert_eq!(slug("wiener/p1"), "wiener-p1");
    }

    #[test]
    fn table_csv() {
        let dir = tempfile::tempdir().unwrap();
        let mut t = Table::new("t", &["a", "b"]);
        t.push(vec!["1".into(), "x,y".into()]);
        let mut run = RunDir::create(dir.path().join("run")).unwrap();
        let p = run.table("sub/t.csv", &t).unwrap();
        assert_eq!(fs::read_to_string(p).unwrap(), "a,b\n1,\"x,y\"\n");
        assert_eq!(run.artifacts, vec!["sub/t.csv"]);
    }
}
