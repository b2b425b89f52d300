//! Comma-separated tables with a mandatory header row. Floats carry 17
//! significant digits; undefined values are empty fields.

use std::path::Path;

use crate::documents::write_text;
use crate::error::{CliError, Result};

pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn opt_float(x: Option<f64>) -> String {
    x.map(float).unwrap_or_default()
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv_string(&self) -> String {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("fields are UTF-8")
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_text(path, &self.to_csv_string())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let format = |message: String| CliError::Format {
            path: path.to_path_buf(),
            message,
        };
        let mut r = csv::Reader::from_path(path).map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(io) => CliError::io(path, io),
            other => format(format!("{other:?}")),
        })?;
        let header: Vec<String> = r
            .headers()
            .map_err(|e| format(e.to_string()))?
            .iter()
            .map(String::from)
            .collect();
        if header.is_empty() || header.iter().all(String::is_empty) {
            return Err(format("missing header row".into()));
        }
        let rows = r
            .records()
            .map(|rec| rec.map(|rec| rec.iter().map(String::from).collect()))
            .collect::<std::result::Result<Vec<Vec<String>>, _>>()
            .map_err(|e| format(e.to_string()))?;
        Ok(Table { header, rows })
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    /// Parses a numeric column; empty fields become `None`.
    pub fn float_column(&self, name: &str) -> Result<Vec<Option<f64>>> {
        let k = self
            .column_index(name)
            .ok_or_else(|| CliError::Config(format!("no column `{name}`")))?;
        self.rows
            .iter()
            .map(|row| {
                let field = row[k].trim();
                if field.is_empty() {
                    Ok(None)
                } else {
                    field.parse::<f64>().map(Some).map_err(|_| {
                        CliError::Config(format!("column `{name}`: `{field}` is not a number"))
                    })
                }
            })
            .collect()
    }
}
