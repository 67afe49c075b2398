//! Sampled path traces as CSV or JSON.
//!
//! CSV has a single header line `t,x1,…,xk[,f1,…,fp]`, `\n` line endings
//! and every value written with 17 significant digits, so a trace
//! re-parses to the exact sampled doubles.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::path::Path;
use crate::polymap::PolyMap;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceFile {
    pub meta: BTreeMap<String, String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

/// Samples `path` at `samples ≥ 2` uniform parameters, appending `f(x)`
/// columns when a map is given.
pub fn export_trace(path: &Path, samples: usize, map: Option<&PolyMap>) -> Result<TraceFile> {
    if samples < 2 {
        return Err(Error::Unsupported("at least 2 samples".into()));
    }
    let k = path.dim();
    let mut columns = vec!["t".to_string()];
    columns.extend((1..=k).map(|i| format!("x{i}")));
    if let Some(f) = map {
        if f.n() != k {
            return Err(Error::DimensionMismatch {
                expected: f.n(),
                got: k,
            });
        }
        columns.extend((1..=f.p()).map(|i| format!("f{i}")));
    }
    let rows = path
        .sample(samples)
        .into_iter()
        .map(|(t, x)| {
            let mut row = Vec::with_capacity(columns.len());
            row.push(t);
            row.extend_from_slice(&x);
            if let Some(f) = map {
                row.extend(f.eval_raw(&x));
            }
            row
        })
        .collect();
    Ok(TraceFile {
        meta: BTreeMap::new(),
        columns,
        rows,
    })
}

impl TraceFile {
    pub fn with_meta(mut self, key: &str, value: impl ToString) -> Self {
        self.meta.insert(key.to_string(), value.to_string());
        self
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{}", self.columns.join(","))?;
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
            writeln!(w, "{}", cells.join(","))?;
        }
        Ok(())
    }

    pub fn write_json<W: Write>(&self, w: W) -> Result<()> {
        serde_json::to_writer_pretty(w, self)?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii output")
    }

    /// Parses the CSV form back; metadata is not part of CSV.
    pub fn read_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Unsupported("a header line".into()))?;
        let columns: Vec<String> = header.split(',').map(str::to_string).collect();
        let mut rows = Vec::new();
        for line in lines.filter(|l| !l.is_empty()) {
            let row = line
                .split(',')
                .map(|c| {
                    c.parse::<f64>()
                        .map_err(|e| Error::Unsupported(format!("numeric cell `{c}`: {e}")))
                })
                .collect::<Result<Vec<f64>>>()?;
            if row.len() != columns.len() {
                return Err(Error::DimensionMismatch {
                    expected: columns.len(),
                    got: row.len(),
                });
            }
            rows.push(row);
        }
        Ok(Self {
            meta: BTreeMap::new(),
            columns,
            rows,
        })
    }
}
