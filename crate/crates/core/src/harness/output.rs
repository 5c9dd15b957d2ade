//! CSV tables of experiment rows.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

use super::study::ExperimentRow;

pub const CSV_HEADER: [&str; 8] = ["model", "n", "entropy", "l1", "linf", "iterations", "time_ns", "order"];

fn csv_error(path: &Path, source: csv::Error) -> Error {
    Error::Csv {
        path: path.to_path_buf(),
        source,
    }
}

fn float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:e}")
    } else {
        String::new()
    }
}

/// Writes the header and one record per row. Failed rows leave the error,
/// iteration and time fields empty.
pub fn write_csv<W: Write>(rows: &[ExperimentRow], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        let ok = r.succeeded();
        w.write_record([
            r.model.clone(),
            r.n.to_string(),
            r.entropy.to_string(),
            float(r.l1),
            float(r.linf),
            if ok { r.iterations.to_string() } else { String::new() },
            if ok { r.time_ns.to_string() } else { String::new() },
            r.order.map(float).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `rows` to `path`, creating parent directories.
pub fn emit_csv(rows: &[ExperimentRow], path: &Path) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|source| Error::Io {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    let file = std::fs::File::create(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    write_csv(rows, std::io::BufWriter::new(file)).map_err(|e| csv_error(path, e))
}

/// Parses a table written by [`write_csv`]. Rows with empty error fields
/// come back as failures.
pub fn read_csv<R: Read>(input: R) -> Result<Vec<ExperimentRow>> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers().map_err(|e| Error::Parse(e.to_string()))?.clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::Parse(format!("unexpected header {header:?}")));
    }
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
        let field = |i: usize| rec.get(i).unwrap_or("");
        let num = |i: usize| -> Result<Option<f64>> {
            let s = field(i);
            if s.is_empty() {
                Ok(None)
            } else {
                s.parse().map(Some).map_err(|_| Error::Parse(format!("bad number `{s}`")))
            }
        };
        let int = |i: usize| -> Result<Option<u64>> {
            let s = field(i);
            if s.is_empty() {
                Ok(None)
            } else {
                s.parse().map(Some).map_err(|_| Error::Parse(format!("bad integer `{s}`")))
            }
        };
        let l1 = num(3)?;
        rows.push(ExperimentRow {
            model: field(0).to_string(),
            n: int(1)?.ok_or_else(|| Error::Parse("missing n".into()))? as usize,
            entropy: field(2).parse()?,
            l1: l1.unwrap_or(f64::NAN),
            linf: num(4)?.unwrap_or(f64::NAN),
            iterations: int(5)?.unwrap_or(0) as usize,
            time_ns: int(6)?.unwrap_or(0),
            order: num(7)?,
            failure: l1.is_none().then(|| "failed".to_string()),
        });
    }
    Ok(rows)
}
