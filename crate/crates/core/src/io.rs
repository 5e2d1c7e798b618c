//! File formats.
//!
//! * Grid functions: CSV with header `a1,..,an,b1,..,bn,re,im`, one grid point
//!   per row in grid order, plus a sidecar JSON manifest
//!   `{config, grid: {L, G, h, density}, quantity, chart}` next to it
//!   (same stem, `.json` extension).
//! * Operators: `M^n × M^n` complex entries as `re,im` pairs in row-major
//!   order, either one matrix row per line (`2·M^n` fields) or one entry per
//!   line (2 fields).
//! * States: `M^n` complex coefficients, one `re,im` pair per line or all on
//!   a single line.
//!
//! Floats are written in Rust's shortest round-trip form, so every file reads
//! back to bit-identical values.

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::berezin::GridSummary;
use crate::error::{Error, Result};
use crate::model::{Chart, HermiteState, ModelConfig, OperatorMatrix, PhaseGrid};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridManifest {
    pub config: ModelConfig,
    pub grid: GridSummary,
    pub quantity: String,
    pub chart: String,
}

pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

fn header(n: usize) -> Vec<String> {
    (1..=n)
        .map(|k| format!("a{k}"))
        .chain((1..=n).map(|k| format!("b{k}")))
        .chain(["re".to_string(), "im".to_string()])
        .collect()
}

/// Writes `values` sampled on `grid` as CSV plus its sidecar manifest.
pub fn write_grid_csv(
    path: &Path,
    grid: &PhaseGrid,
    values: &[Complex64],
    cfg: &ModelConfig,
    quantity: &str,
) -> Result<PathBuf> {
    if values.len() != grid.len() {
        return Err(Error::DimensionMismatch {
            expected: grid.len(),
            found: values.len(),
        });
    }
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header(grid.n()))?;
    for (coords, v) in grid.points().zip(values) {
        let mut rec: Vec<String> = coords.iter().map(|c| c.to_string()).collect();
        rec.push(v.re.to_string());
        rec.push(v.im.to_string());
        w.write_record(&rec)?;
    }
    w.flush()?;
    let manifest = GridManifest {
        config: cfg.clone(),
        grid: GridSummary {
            l: grid.half_width(),
            g: grid.points_per_axis(),
            h: grid.step(),
            density: grid.density(),
        },
        quantity: quantity.to_string(),
        chart: match grid.chart() {
            Chart::Phase => "phase".into(),
            Chart::Orbit => "orbit".into(),
        },
    };
    let side = sidecar_path(path);
    std::fs::write(&side, serde_json::to_string_pretty(&manifest)?)?;
    Ok(side)
}

/// Rows of a grid CSV: `(coordinates, value)`.
pub fn read_grid_csv(path: &Path) -> Result<Vec<(Vec<f64>, Complex64)>> {
    let mut r = csv::Reader::from_path(path)?;
    let width = r.headers()?.len();
    if width < 4 || width % 2 != 0 {
        return Err(Error::Parse {
            line: 1,
            message: format!("header has {width} columns, expected 2n + 2"),
        });
    }
    let mut out = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let nums = rec
            .iter()
            .map(|f| parse_float(f, i + 2))
            .collect::<Result<Vec<f64>>>()?;
        if nums.len() != width {
            return Err(Error::Parse {
                line: i + 2,
                message: format!("expected {width} fields, found {}", nums.len()),
            });
        }
        out.push((
            nums[..width - 2].to_vec(),
            Complex64::new(nums[width - 2], nums[width - 1]),
        ));
    }
    Ok(out)
}

pub fn read_manifest(path: &Path) -> Result<GridManifest> {
    Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
}

fn parse_float(field: &str, line: usize) -> Result<f64> {
    let v: f64 = field.trim().parse().map_err(|_| Error::Parse {
        line,
        message: format!("not a number: {field:?}"),
    })?;
    if !v.is_finite() {
        return Err(Error::Parse {
            line,
            message: format!("non-finite value {field:?}"),
        });
    }
    Ok(v)
}

/// Reads complex numbers from `re,im` pair lines; returns `(line, values)`
/// for every non-blank line.
fn read_pairs(path: &Path) -> Result<Vec<(usize, Vec<Complex64>)>> {
    let reader = BufReader::new(File::open(path)?);
    let mut lines = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if !fields.len().is_multiple_of(2) {
            return Err(Error::Parse {
                line: lineno,
                message: format!("odd number of fields ({}); expected re,im pairs", fields.len()),
            });
        }
        let nums = fields
            .iter()
            .map(|f| parse_float(f, lineno))
            .collect::<Result<Vec<f64>>>()?;
        lines.push((lineno, nums.chunks(2).map(|p| Complex64::new(p[0], p[1])).collect()));
    }
    Ok(lines)
}

pub fn read_operator_csv(path: &Path, dim: usize) -> Result<OperatorMatrix> {
    let lines = read_pairs(path)?;
    let mut data = Vec::with_capacity(dim * dim);
    let per_line = lines.first().map_or(0, |l| l.1.len());
    if per_line != 1 && per_line != dim {
        return Err(Error::Parse {
            line: lines.first().map_or(1, |l| l.0),
            message: format!("expected 1 or {dim} complex entries per line, found {per_line}"),
        });
    }
    for (lineno, vals) in lines {
        if vals.len() != per_line {
            return Err(Error::Parse {
                line: lineno,
                message: format!("expected {per_line} complex entries, found {}", vals.len()),
            });
        }
        data.extend(vals);
    }
    if data.len() != dim * dim {
        return Err(Error::DimensionMismatch {
            expected: dim * dim,
            found: data.len(),
        });
    }
    OperatorMatrix::from_row_slice(dim, &data)
}

pub fn write_operator_csv(path: &Path, a: &OperatorMatrix) -> Result<()> {
    let mut f = File::create(path)?;
    let e = a.entries();
    for i in 0..a.dim() {
        let row: Vec<String> = (0..a.dim())
            .map(|j| format!("{},{}", e[(i, j)].re, e[(i, j)].im))
            .collect();
        writeln!(f, "{}", row.join(","))?;
    }
    Ok(())
}

pub fn read_state_csv(path: &Path, n: usize, m: usize) -> Result<HermiteState> {
    let data: Vec<Complex64> = read_pairs(path)?.into_iter().flat_map(|(_, v)| v).collect();
    HermiteState::new(n, m, data)
}

pub fn write_state_csv(path: &Path, f: &HermiteState) -> Result<()> {
    let mut file = File::create(path)?;
    for c in f.coeffs() {
        writeln!(file, "{},{}", c.re, c.im)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    #[test]
    fn grid_csv_round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = ModelConfig::new(1, 1.0, 1).unwrap().with_grid(7.0, 16);
        let grid = Arc::new(crate::model::build_grid(&cfg).unwrap());
        let values: Vec<Complex64> = (0..grid.len())
            .map(|k| Complex64::new((k as f64 * 0.37).sin() / 3.0, 1.0 / (k as f64 + 7.0)))
            .collect();
        let path = dir.path().join("f.csv");
        let side = write_grid_csv(&path, &grid, &values, &cfg, "berezin_symbol").unwrap();
        let rows = read_grid_csv(&path).unwrap();
        assert_eq!(rows.len(), grid.len());
        for ((coords, v), (p, want)) in rows.iter().zip(grid.points().zip(&values)) {
            assert_eq!(coords, &p);
            assert_eq!(v, want);
        }
        let head = std::fs::read_to_string(&path).unwrap();
        assert!(head.starts_with("a1,b1,re,im\n"));
        let manifest = read_manifest(&side).unwrap();
        assert_eq!(manifest.quantity, "berezin_symbol");
        assert_eq!(manifest.grid.g, 16);
        assert_eq!(manifest.config, cfg);
    }

    #[test]
    fn operator_formats() {
        let dir = tempfile::tempdir().unwrap();
        let a = OperatorMatrix::from_row_slice(
            2,
            &[
                Complex64::new(1.5, -0.25),
                Complex64::new(0.0, 1e-17),
                Complex64::new(-3.0, 2.0),
                Complex64::new(0.1, 0.2),
            ],
        )
        .unwrap();
        let rows = dir.path().join("rows.csv");
        write_operator_csv(&rows, &a).unwrap();
        assert_eq!(read_operator_csv(&rows, 2).unwrap(), a);

        let entries = dir.path().join("entries.csv");
        std::fs::write(&entries, "1.5,-0.25\n0,1e-17\n\n-3,2\n0.1,0.2\n").unwrap();
        assert_eq!(read_operator_csv(&entries, 2).unwrap(), a);
    }

    #[test]
    fn malformed_operator_reports_line() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bad.csv");
        std::fs::write(&p, "1,0,0,0\n0,0,abc,0\n").unwrap();
        match read_operator_csv(&p, 2) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        std::fs::write(&p, "1,0,0,0\nnan,0,1,0\n").unwrap();
        assert!(matches!(read_operator_csv(&p, 2), Err(Error::Parse { line: 2, .. })));
        std::fs::write(&p, "1,0,0,0\n0,0,1,0\n0,0,0,0\n").unwrap();
        assert!(matches!(read_operator_csv(&p, 2), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn state_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s.csv");
        let s = HermiteState::new(
            1,
            3,
            vec![
                Complex64::new(0.1, 0.2),
                Complex64::new(-1.0, 0.0),
                Complex64::new(1e300, -1e-300),
            ],
        )
        .unwrap();
        write_state_csv(&p, &s).unwrap();
        assert_eq!(read_state_csv(&p, 1, 3).unwrap(), s);
    }
}
