//! Report records and their renderings.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Display;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::Format;
use crate::tolerances::Tolerances;
use crate::CliError;

/// One checked quantity of one trial.
///
/// `pass` is `residual ≤ tol·scale` for checked records, possibly tightened
/// by side conditions (certificates, integer equalities) that live in
/// `extra`. Records without a tolerance are measurements.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub kind: String,
    pub name: String,
    pub check: String,
    pub factor: String,
    pub seed: u64,
    pub trial: u64,
    pub residual: f64,
    pub scale: f64,
    pub tol_name: Option<String>,
    pub tol: Option<f64>,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(flatten)]
    pub extra: BTreeMap<String, Value>,
}

impl Record {
    /// Attaches a measured value under `key`.
    pub fn with(mut self, key: &str, value: impl Serialize) -> Self {
        let v = serde_json::to_value(value).unwrap_or(Value::Null);
        self.extra.insert(key.to_string(), v);
        self
    }

    /// ANDs a side condition into `pass`, naming it when it fails.
    pub fn require(mut self, what: &str, ok: bool) -> Self {
        if !ok {
            self.pass = false;
            let msg = match self.error.take() {
                Some(prev) => format!("{prev}; {what}"),
                None => what.to_string(),
            };
            self.error = Some(msg);
        }
        self
    }

    /// `(suite, seed, residual)` plus the rest of the address of the record.
    pub fn failure_line(&self) -> String {
        let mut s = format!(
            "{} {} factor={} seed={} trial={} check={} residual={:e}",
            self.kind, self.name, self.factor, self.seed, self.trial, self.check, self.residual
        );
        if let Some(t) = self.tol {
            s += &format!(" tol={t:e} scale={:e}", self.scale);
        }
        if let Some(e) = &self.error {
            s += &format!(" ({e})");
        }
        s
    }
}

/// Address shared by the records of one trial.
#[derive(Clone, Debug)]
pub struct Meta<'a> {
    pub kind: &'static str,
    pub name: &'static str,
    pub factor: String,
    pub seed: u64,
    pub trial: u64,
    pub tols: &'a Tolerances,
}

impl Meta<'_> {
    fn base(&self, check: impl Into<String>, residual: f64, scale: f64) -> Record {
        Record {
            kind: self.kind.to_string(),
            name: self.name.to_string(),
            check: check.into(),
            factor: self.factor.clone(),
            seed: self.seed,
            trial: self.trial,
            residual,
            scale,
            tol_name: None,
            tol: None,
            pass: residual.is_finite(),
            error: None,
            extra: BTreeMap::new(),
        }
    }

    /// Checked against the named entry of the tolerance table.
    pub fn check(&self, check: impl Into<String>, residual: f64, scale: f64, tol: &str) -> Record {
        self.check_value(check, residual, scale, tol, self.tols.get(tol))
    }

    /// Checked against a tolerance computed by the caller.
    pub fn check_value(
        &self,
        check: impl Into<String>,
        residual: f64,
        scale: f64,
        tol_name: &str,
        tol: f64,
    ) -> Record {
        let mut r = self.base(check, residual, scale);
        r.tol_name = Some(tol_name.to_string());
        r.tol = Some(tol);
        r.pass = residual <= tol * scale;
        r
    }

    /// A measurement without a tolerance.
    pub fn measure(&self, check: impl Into<String>, value: f64) -> Record {
        self.base(check, value, 1.0)
    }

    pub fn error(&self, check: impl Into<String>, err: impl Display) -> Record {
        let mut r = self.base(check, f64::NAN, 1.0);
        r.pass = false;
        r.error = Some(err.to_string());
        r
    }
}

/// One line of the summary: all records sharing (name, check, factor).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SummaryRow {
    pub name: String,
    pub check: String,
    pub factor: String,
    pub records: usize,
    pub failed: usize,
    pub max_residual: f64,
    pub mean_residual: f64,
    pub tol: Option<f64>,
}

/// Groups in order of first appearance, so the table is as deterministic
/// as the records.
pub fn summarize(records: &[Record]) -> Vec<SummaryRow> {
    let mut rows: Vec<SummaryRow> = Vec::new();
    let mut sums: Vec<(f64, usize)> = Vec::new();
    let mut index: HashMap<(&str, &str, &str), usize> = HashMap::new();
    for r in records {
        let key = (r.name.as_str(), r.check.as_str(), r.factor.as_str());
        let i = *index.entry(key).or_insert_with(|| {
            rows.push(SummaryRow {
                name: r.name.clone(),
                check: r.check.clone(),
                factor: r.factor.clone(),
                records: 0,
                failed: 0,
                max_residual: 0.0,
                mean_residual: 0.0,
                tol: None,
            });
            sums.push((0.0, 0));
            rows.len() - 1
        });
        let row = &mut rows[i];
        row.records += 1;
        row.failed += usize::from(!r.pass);
        if r.residual.is_finite() {
            row.max_residual = row.max_residual.max(r.residual);
            sums[i].0 += r.residual;
            sums[i].1 += 1;
        }
        // tolerances that vary per record are shown at their tightest
        row.tol = match (row.tol, r.tol) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
    }
    for (row, (sum, n)) in rows.iter_mut().zip(sums) {
        row.mean_residual = if n > 0 { sum / n as f64 } else { f64::NAN };
    }
    rows
}

pub fn render(records: &[Record], format: Format) -> Result<String, CliError> {
    Ok(match format {
        Format::Jsonl => {
            let mut s = String::new();
            for r in records {
                s += &serde_json::to_string(r).expect("records serialise");
                s.push('\n');
            }
            s
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for row in summarize(records) {
                w.serialize(row).map_err(|e| CliError::Io(e.into()))?;
            }
            let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
            String::from_utf8(bytes).expect("csv output is utf-8")
        }
        Format::Text => text_table(&summarize(records)),
    })
}

fn text_table(rows: &[SummaryRow]) -> String {
    let header = [
        "name", "check", "factor", "records", "failed", "max", "mean", "tol",
    ];
    let mut cells: Vec<Vec<String>> = vec![header.iter().map(|h| h.to_string()).collect()];
    for r in rows {
        cells.push(vec![
            r.name.clone(),
            r.check.clone(),
            r.factor.clone(),
            r.records.to_string(),
            r.failed.to_string(),
            format!("{:.3e}", r.max_residual),
            format!("{:.3e}", r.mean_residual),
            r.tol.map_or("-".to_string(), |t| format!("{t:e}")),
        ]);
    }
    let widths: Vec<usize> = (0..header.len())
        .map(|j| {
            cells
                .iter()
                .map(|row| row[j].chars().count())
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = String::new();
    for row in cells {
        let line: Vec<String> = row
            .iter()
            .zip(&widths)
            .enumerate()
            .map(|(j, (c, w))| {
                // text columns left-aligned, numbers right-aligned
                if j < 3 {
                    format!("{c:<w$}")
                } else {
                    format!("{c:>w$}")
                }
            })
            .collect();
        out += line.join("  ").trim_end();
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn meta(tols: &Tolerances) -> Meta<'_> {
        Meta {
            kind: "verify",
            name: "jordan-identity",
            factor: "matrix:2x2".into(),
            seed: 7,
            trial: 0,
            tols,
        }
    }

    #[test]
    fn pass_uses_scaled_tolerance() {
        let tols = Tolerances::default();
        let m = meta(&tols);
        assert!(m.check("x", 2e-10, 3.0, "jordan").pass);
        assert!(!m.check("x", 4e-10, 3.0, "jordan").pass);
        assert!(!m.check("x", f64::NAN, 1.0, "jordan").pass);
        let r = m
            .check("x", 0.0, 1.0, "jordan")
            .require("certificate", false);
        assert!(!r.pass && r.error.as_deref() == Some("certificate"));
    }

    #[test]
    fn jsonl_round_trips_and_summary_groups() {
        let tols = Tolerances::default();
        let m = meta(&tols);
        let recs = vec![
            m.check("a", 1e-12, 1.0, "jordan").with("n", 16),
            m.check("a", 3e-12, 1.0, "jordan"),
            m.measure("b", 0.5),
        ];
        let text = render(&recs, Format::Jsonl).unwrap();
        let back: Vec<Record> = text
            .lines()
            .map(|l| serde_json::from_str(l).unwrap())
            .collect();
        assert_eq!(back, recs);
        let rows = summarize(&recs);
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].records, 2);
        assert_eq!(rows[0].max_residual, 3e-12);
        assert!(render(&recs, Format::Csv)
            .unwrap()
            .starts_with("name,check,factor"));
        assert!(render(&recs, Format::Text).unwrap().lines().count() == 3);
    }
}
