//! File formats shared by the CLI and its consumers.
//!
//! Matrices travel as JSON objects `{"rows", "cols", "data"}` with
//! row-major data; the writer prints every number as a fixed-width
//! 17-significant-digit float so files are byte-deterministic and
//! round-trip exactly. Vectors are accepted in several convenient shapes
//! (JSON array, single-row/column matrix object, or plain text, one number
//! per line). Sweep results go out as CSV with a fixed header.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::Deserialize;

use crate::error::Error;
use crate::mid::MidProfile;
use crate::sensing::SensingSystem;
use crate::sweep::ResultRow;
use crate::transform::PolarTransform;
use crate::Result;

/// Render a float with 17 significant digits — enough to reproduce any
/// `f64` bit-exactly on read-back.
fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Serialize a matrix as `{"rows": r, "cols": c, "data": [...]}` with
/// row-major, full-precision data and a trailing newline.
pub fn matrix_to_json(m: &DMatrix<f64>) -> String {
    let mut out = String::new();
    write_matrix_json(&mut out, m);
    out.push('\n');
    out
}

fn write_matrix_json(out: &mut String, m: &DMatrix<f64>) {
    let _ = write!(out, "{{\"rows\": {}, \"cols\": {}, \"data\": [", m.nrows(), m.ncols());
    let mut first = true;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if !first {
                out.push_str(", ");
            }
            out.push_str(&fmt_f64(m[(i, j)]));
            first = false;
        }
    }
    out.push_str("]}");
}

#[derive(Deserialize)]
struct MatrixDoc {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl MatrixDoc {
    fn into_matrix(self) -> Result<DMatrix<f64>> {
        if self.data.len() != self.rows * self.cols {
            return Err(Error::Io(format!(
                "matrix data length {} does not match {}x{}",
                self.data.len(),
                self.rows,
                self.cols
            )));
        }
        Ok(DMatrix::from_row_slice(self.rows, self.cols, &self.data))
    }
}

/// Parse a matrix from the JSON object form.
pub fn matrix_from_json(text: &str) -> Result<DMatrix<f64>> {
    let doc: MatrixDoc = serde_json::from_str(text)?;
    doc.into_matrix()
}

/// Serialize a vector as a JSON array with full-precision entries.
pub fn vector_to_json(v: &DVector<f64>) -> String {
    let body: Vec<String> = v.iter().map(|&x| fmt_f64(x)).collect();
    format!("[{}]\n", body.join(", "))
}

/// Parse a vector from whichever supported shape the file holds: a JSON
/// array, a single-row or single-column JSON matrix object, or plain text
/// with one number per line (blank lines and `#` comments ignored; an
/// optional `index,value` CSV layout is also understood).
pub fn vector_from_text(text: &str) -> Result<DVector<f64>> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('[') {
        let data: Vec<f64> = serde_json::from_str(text)?;
        return Ok(DVector::from_vec(data));
    }
    if trimmed.starts_with('{') {
        let m = matrix_from_json(text)?;
        if m.nrows() != 1 && m.ncols() != 1 {
            return Err(Error::Io(format!(
                "expected a vector, got a {}x{} matrix",
                m.nrows(),
                m.ncols()
            )));
        }
        return Ok(DVector::from_iterator(m.len(), m.iter().copied()));
    }
    let mut data = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        // CSV layout: take the last field so `index,value` rows work; a
        // non-numeric line is tolerated only as a leading header.
        let field = line.rsplit(',').next().unwrap_or(line).trim();
        match field.parse::<f64>() {
            Ok(x) => data.push(x),
            Err(_) if data.is_empty() && lineno == 0 => continue,
            Err(_) => {
                return Err(Error::Io(format!(
                    "line {}: cannot parse '{field}' as a number",
                    lineno + 1
                )))
            }
        }
    }
    if data.is_empty() {
        return Err(Error::Io("no numeric data found".into()));
    }
    Ok(DVector::from_vec(data))
}

fn write_index_list(out: &mut String, indices: &[usize]) {
    out.push('[');
    for (k, i) in indices.iter().enumerate() {
        if k > 0 {
            out.push_str(", ");
        }
        let _ = write!(out, "{i}");
    }
    out.push(']');
}

/// Serialize a full construction — transform, coding/frozen split,
/// measurement matrix, and the design parameters behind them — as one JSON
/// document. Indices are 0-based.
pub fn construction_to_json(t: &PolarTransform, sys: &SensingSystem, p: f64) -> String {
    let mut out = String::new();
    out.push_str("{\n");
    let _ = writeln!(out, "  \"m\": {},", sys.block_size());
    let _ = writeln!(out, "  \"n\": {},", t.depth());
    let _ = writeln!(out, "  \"beta\": {},", fmt_f64(t.beta()));
    let _ = writeln!(out, "  \"p\": {},", fmt_f64(p));
    out.push_str("  \"good\": ");
    write_index_list(&mut out, sys.good());
    out.push_str(",\n  \"bad\": ");
    write_index_list(&mut out, sys.bad());
    out.push_str(",\n  \"h\": ");
    write_matrix_json(&mut out, &t.dense().expect("construct sizes are dense-capable").clone());
    out.push_str(",\n  \"a\": ");
    write_matrix_json(&mut out, sys.coding_matrix());
    out.push_str(",\n  \"a_b\": ");
    write_matrix_json(&mut out, sys.frozen_matrix());
    out.push_str(",\n  \"f\": ");
    write_matrix_json(&mut out, sys.measurement_matrix());
    out.push_str("\n}\n");
    out
}

/// Parsed construction document.
#[derive(Deserialize)]
pub struct ConstructionDoc {
    pub m: usize,
    pub n: u32,
    pub beta: f64,
    pub p: f64,
    pub good: Vec<usize>,
    pub bad: Vec<usize>,
    h: MatrixDoc,
    a: MatrixDoc,
    a_b: MatrixDoc,
    f: MatrixDoc,
}

impl ConstructionDoc {
    /// Rebuild the live sensing system this document describes, checking
    /// that the stored matrices match the reconstruction (guarding against
    /// hand-edited files whose parameters and matrices disagree).
    pub fn into_system(self) -> Result<SensingSystem> {
        let t = PolarTransform::new(self.n, self.beta)?;
        let sys = SensingSystem::from_transform(&t, &self.good)?;
        let h = self.h.into_matrix()?;
        let a = self.a.into_matrix()?;
        let a_b = self.a_b.into_matrix()?;
        let f = self.f.into_matrix()?;
        let consistent = |name: &str, stored: &DMatrix<f64>, live: &DMatrix<f64>| {
            if stored.shape() != live.shape() || (stored - live).abs().max() > 1e-12 {
                return Err(Error::Io(format!(
                    "stored matrix '{name}' disagrees with the parameters in the same file"
                )));
            }
            Ok(())
        };
        consistent("h", &h, &t.dense()?.clone())?;
        consistent("a", &a, sys.coding_matrix())?;
        consistent("a_b", &a_b, sys.frozen_matrix())?;
        consistent("f", &f, sys.measurement_matrix())?;
        if self.bad != sys.bad() {
            return Err(Error::Io(
                "stored bad-index list disagrees with the good-index list".into(),
            ));
        }
        Ok(sys)
    }
}

/// Parse a construction document.
pub fn construction_from_json(text: &str) -> Result<ConstructionDoc> {
    Ok(serde_json::from_str(text)?)
}

/// Header of the sweep-result CSV.
pub const RESULT_CSV_HEADER: &str =
    "sweep_value,trials,errors,error_rate,solver_failures,wall_time_s";

/// Render sweep results as CSV (LF line endings, full-precision values;
/// wall time is rounded to microseconds — it is not reproducible anyway).
pub fn results_to_csv(rows: &[ResultRow]) -> String {
    let mut out = String::from(RESULT_CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{:.6}",
            r.sweep_value, r.trials, r.errors, r.error_rate, r.solver_failures, r.wall_time_s
        );
    }
    out
}

/// Render one result row (same field layout as [`results_to_csv`]).
pub fn result_row_to_csv_line(r: &ResultRow) -> String {
    format!(
        "{},{},{},{},{},{:.6}",
        r.sweep_value, r.trials, r.errors, r.error_rate, r.solver_failures, r.wall_time_s
    )
}

/// Render a dimension profile as CSV: `index,mid` in natural order, or
/// `rank,mid` sorted from best to worst.
pub fn mids_to_csv(profile: &MidProfile, sorted: bool) -> String {
    let mut out = String::new();
    if sorted {
        out.push_str("rank,mid\n");
        let mut values: Vec<f64> = profile.values().to_vec();
        values.sort_by(|a, b| b.total_cmp(a));
        for (rank, v) in values.iter().enumerate() {
            let _ = writeln!(out, "{rank},{v}");
        }
    } else {
        out.push_str("index,mid\n");
        for (i, v) in profile.values().iter().enumerate() {
            let _ = writeln!(out, "{i},{v}");
        }
    }
    out
}

/// Render an estimate vector as `index,value` CSV with full precision.
pub fn estimate_to_csv(e: &DVector<f64>) -> String {
    let mut out = String::from("index,value\n");
    for (i, &x) in e.iter().enumerate() {
        let _ = writeln!(out, "{i},{}", fmt_f64(x));
    }
    out
}

/// Read a whole file as UTF-8.
pub fn read_text(path: &Path) -> Result<String> {
    Ok(std::fs::read_to_string(path)?)
}

/// Write a file atomically enough for CLI use.
pub fn write_text(path: &Path, content: &str) -> Result<()> {
    Ok(std::fs::write(path, content)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;
    use crate::sensing::gaussian_matrix;

    #[test]
    fn matrix_json_round_trips_bit_exactly() {
        let mut rng = substream(200, 0);
        let m = gaussian_matrix(5, 7, &mut rng);
        let text = matrix_to_json(&m);
        let back = matrix_from_json(&text).unwrap();
        assert_eq!(m, back);
    }

    #[test]
    fn matrix_writer_is_deterministic() {
        let m = DMatrix::from_row_slice(2, 2, &[0.1, -3.5e-17, 1.0, 2.0f64.sqrt()]);
        assert_eq!(matrix_to_json(&m), matrix_to_json(&m));
        assert!(matrix_to_json(&m).contains("\"rows\": 2"));
    }

    #[test]
    fn matrix_reader_rejects_bad_lengths() {
        assert!(matrix_from_json("{\"rows\": 2, \"cols\": 2, \"data\": [1.0]}").is_err());
        assert!(matrix_from_json("not json").is_err());
    }

    #[test]
    fn vector_shapes_all_parse() {
        let v = DVector::from_vec(vec![1.5, -2.0, 0.25]);
        let from_json = vector_from_text(&vector_to_json(&v)).unwrap();
        assert_eq!(v, from_json);

        let col = DMatrix::from_row_slice(3, 1, &[1.5, -2.0, 0.25]);
        let from_matrix = vector_from_text(&matrix_to_json(&col)).unwrap();
        assert_eq!(v, from_matrix);

        let plain = "# comment\n1.5\n\n-2.0\n0.25\n";
        assert_eq!(v, vector_from_text(plain).unwrap());

        let csv = "index,value\n0,1.5\n1,-2.0\n2,0.25\n";
        assert_eq!(v, vector_from_text(csv).unwrap());

        assert!(vector_from_text("").is_err());
        assert!(vector_from_text("1.0\nx\n").is_err());
        assert!(vector_from_text("{\"rows\": 2, \"cols\": 2, \"data\": [1,2,3,4]}").is_err());
    }

    #[test]
    fn estimate_csv_round_trips() {
        let e = DVector::from_vec(vec![0.0, -1.0 / 3.0, 7.25]);
        let text = estimate_to_csv(&e);
        let back = vector_from_text(&text).unwrap();
        assert_eq!(e, back);
    }

    #[test]
    fn construction_document_round_trips() {
        let t = PolarTransform::new(3, crate::DEFAULT_BETA).unwrap();
        let sys = SensingSystem::from_design(3, crate::DEFAULT_BETA, 0.1, 6).unwrap();
        let text = construction_to_json(&t, &sys, 0.1);
        let doc = construction_from_json(&text).unwrap();
        assert_eq!(doc.m, 8);
        assert_eq!(doc.n, 3);
        assert_eq!(doc.p, 0.1);
        assert_eq!(doc.good, sys.good());
        let rebuilt = doc.into_system().unwrap();
        assert_eq!(rebuilt.coding_matrix(), sys.coding_matrix());
        assert_eq!(rebuilt.measurement_matrix(), sys.measurement_matrix());
    }

    #[test]
    fn construction_document_rejects_tampering() {
        let t = PolarTransform::new(2, crate::DEFAULT_BETA).unwrap();
        let sys = SensingSystem::from_design(2, crate::DEFAULT_BETA, 0.1, 2).unwrap();
        let text = construction_to_json(&t, &sys, 0.1);
        let tampered = text.replace("\"beta\": 7.0710678118654757e-1", "\"beta\": 6.0e-1");
        assert_ne!(text, tampered, "the replace must hit");
        assert!(construction_from_json(&tampered).unwrap().into_system().is_err());
    }

    #[test]
    fn results_csv_layout() {
        let rows = vec![ResultRow {
            sweep_value: 0.05,
            trials: 500,
            errors: 3,
            error_rate: 3.0 / 500.0,
            solver_failures: 1,
            wall_time_s: 1.25,
        }];
        let text = results_to_csv(&rows);
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(RESULT_CSV_HEADER));
        assert_eq!(lines.next(), Some("0.05,500,3,0.006,1,1.250000"));
        assert_eq!(lines.next(), None);
    }

    #[test]
    fn mids_csv_orders() {
        let profile = MidProfile::compute(1, 0.3).unwrap();
        let natural = mids_to_csv(&profile, false);
        assert!(natural.starts_with("index,mid\n0,"));
        let sorted = mids_to_csv(&profile, true);
        let mut lines = sorted.lines();
        assert_eq!(lines.next(), Some("rank,mid"));
        let first: f64 = lines.next().unwrap().split(',').nth(1).unwrap().parse().unwrap();
        let second: f64 = lines.next().unwrap().split(',').nth(1).unwrap().parse().unwrap();
        assert!(first >= second);
    }
}
