//! CSV emission and ingestion. Floats are written with 17 significant digits.

use std::fs;
use std::path::Path;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use num_complex::Complex64;
use weinstein_core::grid::{BaseGrid, Field, ScaleField, ScaleGrid};
use weinstein_core::linalg::CMatrix;

pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    csv::Writer::from_path(path).with_context(|| format!("opening {}", path.display()))
}

fn coordinate_header(d: usize) -> Vec<String> {
    (1..=d + 1).map(|i| format!("x_{i}")).collect()
}

/// Columns `x_1..x_{d+1}, re, im`.
pub fn write_field(path: &Path, f: &Field) -> Result<()> {
    let g = f.grid();
    let mut w = writer(path)?;
    let mut header = coordinate_header(g.d());
    header.extend(["re".into(), "im".into()]);
    w.write_record(&header)?;
    for (k, v) in f.values().iter().enumerate() {
        let mut row: Vec<String> = g.node(k).into_iter().map(fmt_f64).collect();
        row.extend([fmt_f64(v.re), fmt_f64(v.im)]);
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Columns `a, x_1..x_{d+1}, re, im`, scale-major.
pub fn write_scale_field(path: &Path, f: &ScaleField) -> Result<()> {
    let sg = f.grid();
    let g = sg.base();
    let mut w = writer(path)?;
    let mut header = vec!["a".to_string()];
    header.extend(coordinate_header(g.d()));
    header.extend(["re".into(), "im".into()]);
    w.write_record(&header)?;
    for (s, &a) in sg.scales().iter().enumerate() {
        for (k, v) in f.at_scale(s).iter().enumerate() {
            let mut row = vec![fmt_f64(a)];
            row.extend(g.node(k).into_iter().map(fmt_f64));
            row.extend([fmt_f64(v.re), fmt_f64(v.im)]);
            w.write_record(&row)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Columns `row, col, re, im`.
pub fn write_operator(path: &Path, m: &CMatrix) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["row", "col", "re", "im"])?;
    for r in 0..m.rows() {
        for (c, v) in m.row(r).iter().enumerate() {
            w.write_record([r.to_string(), c.to_string(), fmt_f64(v.re), fmt_f64(v.im)])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// One row of a bound report.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundRow {
    pub theorem_id: String,
    pub p: f64,
    pub measured: f64,
    pub bound: f64,
}

/// Columns `theorem_id, p, measured, bound, ratio`.
pub fn write_bounds(path: &Path, rows: &[BoundRow]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["theorem_id", "p", "measured", "bound", "ratio"])?;
    for r in rows {
        w.write_record([
            r.theorem_id.clone(),
            fmt_f64(r.p),
            fmt_f64(r.measured),
            fmt_f64(r.bound),
            fmt_f64(r.measured / r.bound),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Columns `k, sigma`.
pub fn write_spectrum(path: &Path, sv: &[f64]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["k", "sigma"])?;
    for (k, s) in sv.iter().enumerate() {
        w.write_record([k.to_string(), fmt_f64(*s)])?;
    }
    w.flush()?;
    Ok(())
}

fn read_rows(path: &Path, width: usize) -> Result<Vec<Vec<f64>>> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec.with_context(|| format!("{}: row {}", path.display(), i + 2))?;
        if rec.len() != width {
            bail!("{}: row {} has {} columns, expected {width}", path.display(), i + 2, rec.len());
        }
        let vals = rec
            .iter()
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .with_context(|| format!("{}: row {}", path.display(), i + 2))?;
        rows.push(vals);
    }
    Ok(rows)
}

fn coords_match(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(u, v)| (u - v).abs() <= 1e-9 * (1.0 + v.abs()))
}

/// Reads a field written by [`write_field`]; the nodes must be those of `grid`, in order.
pub fn read_field(path: &Path, grid: &Arc<BaseGrid>) -> Result<Field> {
    let d = grid.d();
    let rows = read_rows(path, d + 3)?;
    if rows.len() != grid.n_nodes() {
        bail!("{}: {} rows, the grid has {} nodes", path.display(), rows.len(), grid.n_nodes());
    }
    let mut values = Vec::with_capacity(rows.len());
    for (k, row) in rows.iter().enumerate() {
        if !coords_match(&row[..=d], &grid.node(k)) {
            bail!("{}: row {} is not at grid node {k}", path.display(), k + 2);
        }
        values.push(Complex64::new(row[d + 1], row[d + 2]));
    }
    Ok(Field::from_values(grid, values)?)
}

/// Reads a scale field written by [`write_scale_field`] on `grid`.
pub fn read_scale_field(path: &Path, grid: &Arc<ScaleGrid>) -> Result<ScaleField> {
    let base = grid.base();
    let d = base.d();
    let n = base.n_nodes();
    let rows = read_rows(path, d + 4)?;
    if rows.len() != grid.n_cells() {
        bail!("{}: {} rows, the scale grid has {} cells", path.display(), rows.len(), grid.n_cells());
    }
    let mut values = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        let (s, k) = (i / n, i % n);
        if !coords_match(&row[..1], &[grid.scales()[s]]) || !coords_match(&row[1..=d + 1], &base.node(k)) {
            bail!("{}: row {} is not at cell ({s}, {k})", path.display(), i + 2);
        }
        values.push(Complex64::new(row[d + 2], row[d + 3]));
    }
    Ok(ScaleField::from_values(grid, values)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fields_round_trip_through_csv() {
        let dir = tempfile::tempdir().unwrap();
        let g = BaseGrid::new(0.5, 1, 3.0, 5, 3.0, 4).unwrap();
        let f = Field::from_fn(&g, |x| Complex64::new(x[0].sin() / 3.0, x[1].exp()));
        let p = dir.path().join("fields/f.csv");
        write_field(&p, &f).unwrap();
        assert_eq!(read_field(&p, &g).unwrap().values(), f.values());
        let text = fs::read_to_string(&p).unwrap();
        assert!(text.starts_with("x_1,x_2,re,im\n"));

        let sg = ScaleGrid::new(&g, 0.5, 2.0, 3).unwrap();
        let sf = ScaleField::from_fn(&sg, |a, x| Complex64::new(a * x[0], -x[1]));
        let q = dir.path().join("s.csv");
        write_scale_field(&q, &sf).unwrap();
        assert_eq!(read_scale_field(&q, &sg).unwrap().values(), sf.values());

        let other = BaseGrid::new(0.5, 1, 3.0, 7, 3.0, 4).unwrap();
        assert!(read_field(&p, &other).is_err());
    }

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(fmt_f64(1.0 / 3.0), "3.3333333333333331e-1");
        assert_eq!(fmt_f64(1.0 / 3.0).parse::<f64>().unwrap(), 1.0 / 3.0);
    }
}
