//! Ratio reports, check summaries and the tables they export.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Largest accepted relative change of a ratio between the two resolutions.
pub const DRIFT_BOUND: f64 = 0.05;

/// A CSV-shaped table. Floats are stored already formatted.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: impl Into<String>, header: &[&str]) -> Self {
        Self { name: name.into(), header: header.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

/// Shortest decimal form that parses back to the same `f64`.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:?}")
    }
}

/// Verdict and headline numbers of one check, as written to JSON summaries.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CheckSummary {
    pub name: String,
    pub passed: bool,
    pub metrics: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl CheckSummary {
    pub fn new(name: impl Into<String>) -> Self {
        Self { name: name.into(), ..Default::default() }
    }

    pub fn metric(mut self, key: &str, v: f64) -> Self {
        self.metrics.insert(key.to_string(), v);
        self
    }

    pub fn note(mut self, n: impl Into<String>) -> Self {
        self.notes.push(n.into());
        self
    }

    pub fn verdict(mut self, passed: bool) -> Self {
        self.passed = passed;
        self
    }
}

/// Norm values of one signal at both resolutions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioRow {
    pub signal: String,
    pub a: f64,
    pub b: f64,
    pub a_fine: f64,
    pub b_fine: f64,
}

impl RatioRow {
    pub fn ratio(&self) -> f64 {
        self.a / self.b
    }

    pub fn ratio_fine(&self) -> f64 {
        self.a_fine / self.b_fine
    }

    fn both_zero(&self) -> bool {
        self.a == 0.0 && self.b == 0.0 && self.a_fine == 0.0 && self.b_fine == 0.0
    }

    fn usable(&self) -> bool {
        [self.a, self.b, self.a_fine, self.b_fine].iter().all(|v| v.is_finite() && *v > 0.0)
    }
}

/// Ratios `A/B` over a family. Spread and extremes use the fine resolution;
/// drift is the largest relative change of a ratio between resolutions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub name: String,
    pub norm_a: String,
    pub norm_b: String,
    pub rows: Vec<RatioRow>,
    pub min: f64,
    pub max: f64,
    pub spread: f64,
    pub drift: f64,
    pub spread_bound: f64,
    pub drift_bound: f64,
    /// Signals where one side vanished or diverged and the other did not.
    pub degenerate: Vec<String>,
    pub passed: bool,
}

impl EquivalenceReport {
    pub fn from_rows(
        name: impl Into<String>,
        norm_a: impl Into<String>,
        norm_b: impl Into<String>,
        rows: Vec<RatioRow>,
        spread_bound: f64,
    ) -> Self {
        let mut min = f64::INFINITY;
        let mut max = 0.0f64;
        let mut drift = 0.0f64;
        let mut degenerate = Vec::new();
        let mut used = 0;
        for r in &rows {
            if r.both_zero() {
                continue;
            }
            if !r.usable() {
                degenerate.push(r.signal.clone());
                continue;
            }
            used += 1;
            let (c, f) = (r.ratio(), r.ratio_fine());
            min = min.min(f);
            max = max.max(f);
            drift = drift.max((f / c - 1.0).abs());
        }
        let spread = if used == 0 { f64::NAN } else { max / min };
        let passed = used > 0 && degenerate.is_empty() && spread <= spread_bound && drift <= DRIFT_BOUND;
        Self {
            name: name.into(),
            norm_a: norm_a.into(),
            norm_b: norm_b.into(),
            rows,
            min: if used == 0 { f64::NAN } else { min },
            max: if used == 0 { f64::NAN } else { max },
            spread,
            drift,
            spread_bound,
            drift_bound: DRIFT_BOUND,
            degenerate,
            passed,
        }
    }

    /// Merges reports sharing a name and bound, keeping all rows.
    pub fn merge(name: impl Into<String>, parts: &[EquivalenceReport], spread_bound: f64) -> Self {
        let rows: Vec<RatioRow> = parts.iter().flat_map(|p| p.rows.iter().cloned()).collect();
        let a = parts.first().map(|p| p.norm_a.clone()).unwrap_or_default();
        let b = parts.first().map(|p| p.norm_b.clone()).unwrap_or_default();
        Self::from_rows(name, a, b, rows, spread_bound)
    }

    pub fn table(&self) -> Table {
        let mut t = Table::new(
            self.name.clone(),
            &["signal", "norm_a", "norm_b", "ratio", "norm_a_fine", "norm_b_fine", "ratio_fine"],
        );
        for r in &self.rows {
            t.push(vec![
                r.signal.clone(),
                fmt_f64(r.a),
                fmt_f64(r.b),
                fmt_f64(r.ratio()),
                fmt_f64(r.a_fine),
                fmt_f64(r.b_fine),
                fmt_f64(r.ratio_fine()),
            ]);
        }
        t
    }

    pub fn summary(&self) -> CheckSummary {
        let mut s = CheckSummary::new(self.name.clone())
            .metric("min", self.min)
            .metric("max", self.max)
            .metric("spread", self.spread)
            .metric("spread_bound", self.spread_bound)
            .metric("drift", self.drift)
            .metric("drift_bound", self.drift_bound)
            .verdict(self.passed)
            .note(format!("A = {}", self.norm_a))
            .note(format!("B = {}", self.norm_b));
        if !self.degenerate.is_empty() {
            s = s.note(format!("degenerate ratios: {}", self.degenerate.join(", ")));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(id: &str, a: f64, b: f64, af: f64, bf: f64) -> RatioRow {
        RatioRow { signal: id.into(), a, b, a_fine: af, b_fine: bf }
    }

    #[test]
    fn spread_and_drift() {
        let r = EquivalenceReport::from_rows(
            "t",
            "A",
            "B",
            vec![row("s1", 2.0, 1.0, 2.0, 1.0), row("s2", 3.0, 1.0, 3.09, 1.0)],
            4.0,
        );
        assert!((r.spread - 3.09 / 2.0).abs() < 1e-12);
        assert!((r.drift - 0.03).abs() < 1e-12);
        assert!(r.spread >= 1.0 && r.passed);
    }

    #[test]
    fn zero_on_one_side_is_degenerate() {
        let r = EquivalenceReport::from_rows("t", "A", "B", vec![row("s", 1.0, 0.0, 1.0, 0.0)], 4.0);
        assert_eq!(r.degenerate, vec!["s".to_string()]);
        assert!(!r.passed);
        // Both sides zero is skipped rather than flagged.
        let z = EquivalenceReport::from_rows(
            "t",
            "A",
            "B",
            vec![row("z", 0.0, 0.0, 0.0, 0.0), row("s", 1.0, 1.0, 1.0, 1.0)],
            4.0,
        );
        assert!(z.degenerate.is_empty() && z.passed);
    }

    #[test]
    fn floats_round_trip() {
        for v in [0.1, 1.0 / 3.0, 2.5066282746310002, 1e-300, -7.0] {
            assert_eq!(fmt_f64(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(fmt_f64(f64::INFINITY), "inf");
    }
}
