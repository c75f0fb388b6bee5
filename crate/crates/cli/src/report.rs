//! CSV and JSON report emission.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde_json::{json, Value};

pub const SCHEMA_VERSION: u32 = 1;

/// Fixed 17-significant-digit formatting, independent of locale.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Rows of one CSV file.
#[derive(Debug, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<Vec<u8>, String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).map_err(|e| e.to_string())?;
        for r in &self.rows {
            w.write_record(r).map_err(|e| e.to_string())?;
        }
        w.into_inner().map_err(|e| e.to_string())
    }

    /// `header=value` pairs of one row, for error messages.
    pub fn describe(&self, i: usize) -> String {
        self.header.iter().zip(&self.rows[i]).map(|(h, v)| format!("{h}={v}")).collect::<Vec<_>>().join(" ")
    }
}

/// Everything a subcommand hands back for output.
pub struct Outcome {
    pub table: Table,
    pub params: Value,
    pub results: Value,
    pub tolerances: Value,
    /// indices of rows that missed their tolerance
    pub failures: Vec<usize>,
}

impl Outcome {
    pub fn new(table: Table, params: Value, results: Value) -> Self {
        Self { table, params, results, tolerances: json!({}), failures: Vec::new() }
    }
}

/// Writes `apvar-<command>.csv` and `.json` into `dir` and optionally echoes the CSV.
pub fn emit(dir: &Path, command: &str, o: &Outcome, wall_time: f64, echo: bool) -> Result<(), String> {
    fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
    let csv = o.table.to_csv()?;
    let csv_path = dir.join(format!("apvar-{command}.csv"));
    fs::write(&csv_path, &csv).map_err(|e| format!("{}: {e}", csv_path.display()))?;
    let summary = json!({
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "params": o.params,
        "results": o.results,
        "tolerances": o.tolerances,
        "failures": o.failures.iter().map(|&i| o.table.describe(i)).collect::<Vec<_>>(),
        "wall_time": wall_time,
    });
    let json_path = dir.join(format!("apvar-{command}.json"));
    let text = serde_json::to_string_pretty(&summary).map_err(|e| e.to_string())?;
    fs::write(&json_path, text + "\n").map_err(|e| format!("{}: {e}", json_path.display()))?;
    if echo {
        std::io::stdout().write_all(&csv).map_err(|e| e.to_string())?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        assert_eq!(num(0.1), "1.0000000000000001e-1");
        assert_eq!(num(-2.0), "-2.0000000000000000e0");
        assert_eq!(num(0.1).parse::<f64>().unwrap(), 0.1);
    }
}
