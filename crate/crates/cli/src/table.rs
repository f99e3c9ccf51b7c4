//! Result tables, their CSV/JSON forms and cell-wise comparison.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const REASON_COLUMN: &str = "reason";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub units: String,
    pub tool_version: String,
    pub scenario_digest: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub values: Vec<Option<f64>>,
    pub reason: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<serde_json::Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultTable {
    pub columns: Vec<String>,
    pub rows: Vec<Row>,
    pub metadata: Metadata,
}

/// 17 significant digits.
pub fn format_value(v: f64) -> String {
    format!("{v:.16e}")
}

impl ResultTable {
    pub fn new(columns: Vec<String>, metadata: Metadata) -> Self {
        Self {
            columns,
            rows: Vec::new(),
            metadata,
        }
    }

    /// Appends a row; missing values need a reason.
    pub fn push(&mut self, row: Row) -> Result<(), CliError> {
        if row.values.len() != self.columns.len() {
            return Err(CliError::Table(format!(
                "row has {} values for {} columns",
                row.values.len(),
                self.columns.len()
            )));
        }
        let missing = row.values.iter().any(|v| v.is_none_or(|x| x.is_nan()));
        if missing && row.reason.as_deref().is_none_or(str::is_empty) {
            return Err(CliError::Table("row with missing values carries no reason".into()));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn values(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let i = self.column(name)?;
        Some(self.rows.iter().map(|r| r.values[i]).collect())
    }

    pub fn to_csv(&self) -> Result<Vec<u8>, CliError> {
        let mut out = Vec::new();
        writeln!(out, "# units: {}", self.metadata.units).unwrap();
        writeln!(out, "# tool_version: {}", self.metadata.tool_version).unwrap();
        writeln!(out, "# scenario_digest: {}", self.metadata.scenario_digest).unwrap();
        let mut w = csv::Writer::from_writer(out);
        let mut header = self.columns.clone();
        header.push(REASON_COLUMN.into());
        w.write_record(&header).map_err(|e| CliError::Table(e.to_string()))?;
        for row in &self.rows {
            let mut rec: Vec<String> = row
                .values
                .iter()
                .map(|v| v.map(format_value).unwrap_or_default())
                .collect();
            rec.push(row.reason.clone().unwrap_or_default());
            w.write_record(&rec).map_err(|e| CliError::Table(e.to_string()))?;
        }
        w.into_inner().map_err(|e| CliError::Table(e.to_string()))
    }

    pub fn to_json(&self) -> Vec<u8> {
        let mut v = serde_json::to_vec_pretty(self).expect("table serialises");
        v.push(b'\n');
        v
    }

    pub fn from_csv(bytes: &[u8]) -> Result<Self, CliError> {
        let text = std::str::from_utf8(bytes).map_err(|e| CliError::Table(e.to_string()))?;
        let mut meta = BTreeMap::new();
        for line in text.lines().take_while(|l| l.starts_with('#')) {
            if let Some((k, v)) = line.trim_start_matches('#').split_once(':') {
                meta.insert(k.trim().to_string(), v.trim().to_string());
            }
        }
        let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(bytes);
        let header: Vec<String> = r
            .headers()
            .map_err(|e| CliError::Table(e.to_string()))?
            .iter()
            .map(str::to_string)
            .collect();
        let has_reason = header.last().is_some_and(|h| h == REASON_COLUMN);
        let columns: Vec<String> = if has_reason {
            header[..header.len() - 1].to_vec()
        } else {
            header.clone()
        };
        let get = |k: &str| meta.get(k).cloned().unwrap_or_default();
        let mut table = ResultTable::new(
            columns.clone(),
            Metadata {
                units: get("units"),
                tool_version: get("tool_version"),
                scenario_digest: get("scenario_digest"),
            },
        );
        for (line, rec) in r.records().enumerate() {
            let rec = rec.map_err(|e| CliError::Table(e.to_string()))?;
            let mut values = Vec::with_capacity(columns.len());
            for (c, cell) in rec.iter().take(columns.len()).enumerate() {
                values.push(if cell.is_empty() {
                    None
                } else {
                    Some(
                        cell.parse::<f64>()
                            .map_err(|e| CliError::Table(format!("row {line}, column `{}`: {e}", columns[c])))?,
                    )
                });
            }
            let reason = if has_reason {
                rec.get(columns.len()).filter(|s| !s.is_empty()).map(str::to_string)
            } else {
                None
            };
            table.rows.push(Row {
                values,
                reason,
                diagnostics: None,
            });
        }
        Ok(table)
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
        if path.extension().is_some_and(|e| e == "json") {
            serde_json::from_slice(&bytes).map_err(|e| CliError::Table(format!("{}: {e}", path.display())))
        } else {
            Self::from_csv(&bytes)
        }
    }
}

/// Relative tolerances: one default and optional per-column overrides.
#[derive(Debug, Clone, PartialEq)]
pub struct Tolerances {
    pub default: f64,
    pub per_column: BTreeMap<String, f64>,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            default: 1e-12,
            per_column: BTreeMap::new(),
        }
    }
}

impl Tolerances {
    /// `"1e-6"` or `"default=1e-8,sojourn=1e-4"`.
    pub fn parse(spec: &str) -> Result<Self, CliError> {
        let mut t = Tolerances::default();
        for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let parse = |v: &str| {
                v.trim()
                    .parse::<f64>()
                    .ok()
                    .filter(|x| *x >= 0.0)
                    .ok_or_else(|| CliError::invalid("--tol", format!("`{v}` is not a non-negative number")))
            };
            match part.split_once('=') {
                Some(("default", v)) => t.default = parse(v)?,
                Some((col, v)) => {
                    t.per_column.insert(col.trim().to_string(), parse(v)?);
                }
                None => t.default = parse(part)?,
            }
        }
        Ok(t)
    }

    pub fn for_column(&self, name: &str) -> f64 {
        self.per_column.get(name).copied().unwrap_or(self.default)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellFailure {
    pub row: usize,
    pub column: String,
    pub reference_column: String,
    pub value: Option<f64>,
    pub reference: Option<f64>,
    pub relative_difference: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareReport {
    pub cells: usize,
    pub max_relative_difference: f64,
    pub failures: Vec<CellFailure>,
}

impl CompareReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// `|a - b| / max(|a|, |b|)`, zero when both vanish.
pub fn relative_difference(a: f64, b: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    (a - b).abs() / a.abs().max(b.abs())
}

/// Compares `table` against `reference` cell by cell. `pairs` maps a column
/// of `table` to a column of `reference`; when empty the two tables must have
/// identical columns.
pub fn compare(
    table: &ResultTable,
    reference: &ResultTable,
    tolerances: &Tolerances,
    pairs: &[(String, String)],
) -> Result<CompareReport, CliError> {
    let pairs: Vec<(String, String)> = if pairs.is_empty() {
        if table.columns != reference.columns {
            return Err(CliError::Table(format!(
                "column mismatch: [{}] vs [{}]",
                table.columns.join(", "),
                reference.columns.join(", ")
            )));
        }
        table.columns.iter().map(|c| (c.clone(), c.clone())).collect()
    } else {
        pairs.to_vec()
    };
    if table.rows.len() != reference.rows.len() {
        return Err(CliError::Table(format!(
            "row count mismatch: {} vs {}",
            table.rows.len(),
            reference.rows.len()
        )));
    }
    let mut report = CompareReport {
        cells: 0,
        max_relative_difference: 0.0,
        failures: Vec::new(),
    };
    for (a, b) in &pairs {
        let ia = table
            .column(a)
            .ok_or_else(|| CliError::Table(format!("no column `{a}` in table")))?;
        let ib = reference
            .column(b)
            .ok_or_else(|| CliError::Table(format!("no column `{b}` in reference")))?;
        let tol = tolerances.for_column(a);
        for (r, (ra, rb)) in table.rows.iter().zip(&reference.rows).enumerate() {
            let (va, vb) = (ra.values[ia], rb.values[ib]);
            report.cells += 1;
            let rel = match (va, vb) {
                (None, None) => 0.0,
                (Some(x), Some(y)) if x.is_nan() && y.is_nan() => 0.0,
                (Some(x), Some(y)) => relative_difference(x, y),
                _ => f64::INFINITY,
            };
            if rel.is_finite() {
                report.max_relative_difference = report.max_relative_difference.max(rel);
            }
            if rel.is_nan() || rel > tol {
                report.failures.push(CellFailure {
                    row: r,
                    column: a.clone(),
                    reference_column: b.clone(),
                    value: va,
                    reference: vb,
                    relative_difference: rel,
                    tolerance: tol,
                });
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> ResultTable {
        let mut t = ResultTable::new(
            vec!["x".into(), "y".into()],
            Metadata {
                units: "natural".into(),
                tool_version: "test".into(),
                scenario_digest: "abc".into(),
            },
        );
        t.push(Row {
            values: vec![Some(1.0), Some(0.1)],
            reason: None,
            diagnostics: None,
        })
        .unwrap();
        t.push(Row {
            values: vec![Some(2.0), None],
            reason: Some("y: failed".into()),
            diagnostics: None,
        })
        .unwrap();
        t
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let t = table();
        let back = ResultTable::from_csv(&t.to_csv().unwrap()).unwrap();
        assert_eq!(back.columns, t.columns);
        assert_eq!(back.metadata, t.metadata);
        for (a, b) in back.rows.iter().zip(&t.rows) {
            assert_eq!(a.values, b.values);
            assert_eq!(a.reason, b.reason);
        }
        assert_eq!(format_value(0.1).parse::<f64>().unwrap(), 0.1);
    }

    #[test]
    fn missing_value_needs_reason() {
        let mut t = table();
        let r = t.push(Row {
            values: vec![Some(1.0), None],
            reason: None,
            diagnostics: None,
        });
        assert!(r.is_err());
        assert!(t
            .push(Row {
                values: vec![Some(1.0)],
                reason: None,
                diagnostics: None
            })
            .is_err());
    }

    #[test]
    fn compare_self_and_perturbed() {
        let t = table();
        assert!(compare(&t, &t, &Tolerances::default(), &[]).unwrap().passed());
        let mut p = t.clone();
        p.rows[0].values[1] = Some(0.1 * (1.0 + 1e-3));
        let rep = compare(&p, &t, &Tolerances::parse("1e-6").unwrap(), &[]).unwrap();
        assert_eq!(rep.failures.len(), 1);
        assert_eq!(rep.failures[0].row, 0);
        assert!(compare(&p, &t, &Tolerances::parse("y=1e-2").unwrap(), &[])
            .unwrap()
            .passed());
    }

    #[test]
    fn column_mismatch_is_error() {
        let t = table();
        let mut u = t.clone();
        u.columns[1] = "z".into();
        assert!(compare(&t, &u, &Tolerances::default(), &[]).is_err());
        let pairs = [("y".to_string(), "z".to_string())];
        assert!(compare(&t, &u, &Tolerances::default(), &pairs).unwrap().passed());
    }

    #[test]
    fn tolerance_parsing() {
        let t = Tolerances::parse("default=1e-8, sojourn=1e-4").unwrap();
        assert_eq!(t.for_column("sojourn"), 1e-4);
        assert_eq!(t.for_column("bl"), 1e-8);
        assert!(Tolerances::parse("x=-1").is_err());
    }
}
