//! Small numeric CSV tables with a header row.

use std::path::Path;

use binsc_core::{Error, Result};

pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

pub fn write_table(header: &[&str], rows: &[Vec<f64>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out += &row.iter().map(|v| format!("{v:?}")).collect::<Vec<_>>().join(",");
        out.push('\n');
    }
    out
}

pub fn read_table(path: &Path) -> Result<Table> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let header: Vec<String> = match lines.next() {
        Some((_, l)) => l.split(',').map(|s| s.trim().to_string()).collect(),
        None => Vec::new(),
    };
    let rows = lines
        .map(|(i, line)| {
            let row = line
                .split(',')
                .map(|t| {
                    t.trim().parse::<f64>().map_err(|e| Error::Parse {
                        path: path.to_path_buf(),
                        line: i as u64 + 1,
                        message: format!("{t:?}: {e}"),
                    })
                })
                .collect::<Result<Vec<f64>>>()?;
            if row.len() != header.len() {
                return Err(Error::DimensionMismatch {
                    expected: header.len(),
                    found: row.len(),
                });
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;
    Ok(Table { header, rows })
}

pub fn read_column(table: &Table, name: &str, path: &Path) -> Result<Vec<f64>> {
    let idx = table.header.iter().position(|h| h == name).ok_or_else(|| Error::Parse {
        path: path.to_path_buf(),
        line: 1,
        message: format!("missing column {name:?}"),
    })?;
    Ok(table.rows.iter().map(|r| r[idx]).collect())
}
