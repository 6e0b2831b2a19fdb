use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use clap::ValueEnum;
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// A command result in both output shapes.
#[derive(Debug)]
pub struct Report {
    pub json: Value,
    pub header: Option<Vec<String>>,
    pub rows: Vec<Vec<String>>,
}

impl Report {
    pub fn new(json: Value) -> Self {
        Report {
            json,
            header: None,
            rows: Vec::new(),
        }
    }

    pub fn header(mut self, cols: &[&str]) -> Self {
        self.header = Some(cols.iter().map(|s| s.to_string()).collect());
        self
    }

    pub fn rows(mut self, rows: Vec<Vec<String>>) -> Self {
        self.rows = rows;
        self
    }

    pub fn render(&self, format: Format) -> io::Result<Vec<u8>> {
        match format {
            Format::Json => {
                let mut out = serde_json::to_vec_pretty(&self.json)?;
                out.push(b'\n');
                Ok(out)
            }
            Format::Csv => {
                let mut w = csv::WriterBuilder::new().flexible(true).from_writer(Vec::new());
                if let Some(h) = &self.header {
                    w.write_record(h)?;
                }
                for r in &self.rows {
                    w.write_record(r)?;
                }
                w.into_inner().map_err(|e| e.into_error())
            }
        }
    }

    pub fn emit(&self, format: Format, out: Option<&Path>) -> io::Result<()> {
        let bytes = self.render(format)?;
        match out {
            Some(path) => File::create(path)?.write_all(&bytes),
            None => {
                let mut stdout = io::stdout().lock();
                stdout.write_all(&bytes)?;
                stdout.flush()
            }
        }
    }
}

/// Fixed-point decimal with `digits` places.
pub fn fixed(x: f64, digits: usize) -> String {
    format!("{x:.digits$}")
}
