use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use crate::args::Format;

pub const HEADER: [&str; 10] = [
    "problem",
    "param_json",
    "level",
    "E_aim",
    "E_oracle",
    "E_exact",
    "delta_residual",
    "n_iter",
    "x0",
    "stabilized",
];

/// One result line; `None` fields are left empty.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Row {
    pub problem: String,
    pub param_json: String,
    pub level: Option<usize>,
    pub e_aim: Option<f64>,
    pub e_oracle: Option<f64>,
    pub e_exact: Option<f64>,
    pub delta_residual: Option<f64>,
    pub n_iter: Option<usize>,
    pub x0: Option<f64>,
    pub stabilized: Option<bool>,
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn fixed(v: Option<f64>, digits: usize) -> String {
    v.map(|x| format!("{x:.digits$}")).unwrap_or_else(|| "-".into())
}

fn sci(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.2e}")).unwrap_or_else(|| "-".into())
}

impl Row {
    fn csv_fields(&self) -> [String; 10] {
        [
            self.problem.clone(),
            self.param_json.clone(),
            opt(self.level),
            opt(self.e_aim),
            opt(self.e_oracle),
            opt(self.e_exact),
            opt(self.delta_residual),
            opt(self.n_iter),
            opt(self.x0),
            opt(self.stabilized),
        ]
    }

    fn table_fields(&self) -> [String; 10] {
        [
            self.problem.clone(),
            self.param_json.clone(),
            opt(self.level),
            fixed(self.e_aim, 11),
            fixed(self.e_oracle, 11),
            fixed(self.e_exact, 11),
            sci(self.delta_residual),
            opt(self.n_iter),
            fixed(self.x0, 6),
            self.stabilized
                .map(|s| if s { "yes" } else { "no" }.to_string())
                .unwrap_or_else(|| "-".into()),
        ]
    }
}

/// Left-aligned columns separated by two spaces.
pub fn render_table<S: AsRef<str>>(header: &[S], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.as_ref().chars().count()).collect();
    for r in rows {
        for (w, cell) in widths.iter_mut().zip(r) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        let mut s = String::new();
        for (i, (cell, w)) in cells.iter().zip(&widths).enumerate() {
            if i > 0 {
                s.push_str("  ");
            }
            s.push_str(cell);
            if i + 1 < cells.len() {
                s.extend(std::iter::repeat_n(' ', w - cell.chars().count()));
            }
        }
        s.push('\n');
        s
    };
    let mut out = line(header.iter().map(|h| h.as_ref()).collect());
    for r in rows {
        out.push_str(&line(r.iter().map(String::as_str).collect()));
    }
    out
}

pub fn csv_bytes<S: AsRef<str>>(header: &[S], rows: &[Vec<String>]) -> io::Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header.iter().map(|h| h.as_ref()))?;
    for r in rows {
        w.write_record(r)?;
    }
    w.into_inner().map_err(|e| e.into_error())
}

pub fn render_rows(rows: &[Row], format: Format) -> io::Result<Vec<u8>> {
    match format {
        Format::Csv => {
            let cells: Vec<Vec<String>> = rows.iter().map(|r| r.csv_fields().to_vec()).collect();
            csv_bytes(&HEADER, &cells)
        }
        Format::Table => {
            let cells: Vec<Vec<String>> = rows.iter().map(|r| r.table_fields().to_vec()).collect();
            Ok(render_table(&HEADER, &cells).into_bytes())
        }
    }
}

/// Writes to `path`, or to stdout when `None`.
pub fn emit(bytes: &[u8], path: Option<&Path>) -> io::Result<()> {
    match path {
        Some(p) => File::create(p)?.write_all(bytes),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()
        }
    }
}
