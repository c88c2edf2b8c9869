//! CSV ingestion of user panels and emission of matrices and paths.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use lrcov::{CovMatrix, LrcError, Matrix, Result, TimeSeriesPanel};

/// Significant digits kept in emitted numbers.
pub const SIG_DIGITS: usize = 12;

fn parse_error(row: usize, col: usize, message: impl Into<String>) -> LrcError {
    LrcError::Parse {
        row,
        col,
        message: message.into(),
    }
}

/// Reads a rectangular numeric CSV; rows are time points. A first row that
/// does not parse as numbers is treated as a header. Rows and columns in
/// errors are 1-based file positions.
pub fn load_panel(path: &Path) -> Result<TimeSeriesPanel<f64>> {
    let file = File::open(path)
        .map_err(|e| LrcError::Config(format!("cannot open input {}: {e}", path.display())))?;
    read_panel(file)
}

pub fn read_panel<R: std::io::Read>(source: R) -> Result<TimeSeriesPanel<f64>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(source);

    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width = None;
    let mut header_seen = false;
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            parse_error(line, 0, e.to_string())
        })?;
        let line = record
            .position()
            .map_or(rows.len() + 1, |p| p.line() as usize);
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        let parsed: Vec<std::result::Result<f64, usize>> = record
            .iter()
            .enumerate()
            .map(|(j, cell)| cell.parse::<f64>().map_err(|_| j))
            .collect();
        if rows.is_empty() && !header_seen && parsed.iter().any(|c| c.is_err()) {
            header_seen = true;
            width = Some(record.len());
            continue;
        }
        let expected = *width.get_or_insert(record.len());
        if record.len() != expected {
            return Err(parse_error(
                line,
                record.len().min(expected) + 1,
                format!("expected {expected} fields, found {}", record.len()),
            ));
        }
        let mut values = Vec::with_capacity(expected);
        for (j, cell) in parsed.into_iter().enumerate() {
            match cell {
                Ok(v) if v.is_finite() => values.push(v),
                Ok(v) => return Err(parse_error(line, j + 1, format!("non-finite value {v}"))),
                Err(_) => {
                    return Err(parse_error(
                        line,
                        j + 1,
                        format!("not a number: '{}'", &record[j]),
                    ))
                }
            }
        }
        rows.push(values);
    }
    if rows.is_empty() {
        return Err(parse_error(1, 1, "no numeric rows"));
    }
    TimeSeriesPanel::from_rows(&rows).map_err(|e| parse_error(rows.len(), 1, e.to_string()))
}

/// Shortest decimal that round-trips the value rounded to [`SIG_DIGITS`].
pub fn format_number(x: f64) -> String {
    let rounded: f64 = format!("{:.*e}", SIG_DIGITS - 1, x)
        .parse()
        .expect("formatted float parses");
    format!("{rounded:?}")
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| LrcError::Config(format!("cannot create {}: {e}", path.display())))
}

fn io_error(path: &Path, e: std::io::Error) -> LrcError {
    LrcError::Config(format!("cannot write {}: {e}", path.display()))
}

pub fn write_matrix(path: &Path, m: &Matrix<f64>) -> Result<()> {
    let mut out = create(path)?;
    write_rows(&mut out, m.iter_rows()).map_err(|e| io_error(path, e))
}

pub fn write_cov(path: &Path, v: &CovMatrix<f64>) -> Result<()> {
    write_matrix(path, v.values())
}

fn write_rows<'a, W: Write>(
    out: &mut W,
    rows: impl Iterator<Item = &'a [f64]>,
) -> std::io::Result<()> {
    for row in rows {
        let line: Vec<String> = row.iter().map(|&x| format_number(x)).collect();
        writeln!(out, "{}", line.join(","))?;
    }
    out.flush()
}

/// Writes `header` followed by pre-formatted lines.
pub fn write_lines(
    path: &Path,
    header: &str,
    lines: impl IntoIterator<Item = String>,
) -> Result<()> {
    let mut out = create(path)?;
    let result = (|| {
        writeln!(out, "{header}")?;
        for line in lines {
            writeln!(out, "{line}")?;
        }
        out.flush()
    })();
    result.map_err(|e| io_error(path, e))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| io_error(path, e))
}
