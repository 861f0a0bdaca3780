use std::path::Path;

use crate::error::{Error, Result};

/// Float cell with 17 significant digits.
pub fn cell(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

/// Writes a numeric table with a header row.
pub fn write_table(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for r in rows {
        if r.len() != header.len() {
            return Err(Error::InvalidParameter(format!(
                "row of {} values for {} columns",
                r.len(),
                header.len()
            )));
        }
        w.write_record(r.iter().map(|v| cell(*v)))?;
    }
    w.flush()?;
    Ok(())
}

/// Reads two named columns of a headered numeric CSV.
pub fn read_columns(path: &Path, x: &str, y: &str) -> Result<Vec<(f64, f64)>> {
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path)?;
    let headers = r.headers()?.clone();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Config(format!("{}: no column `{name}`", path.display())))
    };
    let (ix, iy) = (find(x)?, find(y)?);
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let num = |k: usize| {
            rec.get(k)
                .and_then(|s| s.parse::<f64>().ok())
                .ok_or_else(|| Error::Config(format!("{}: bad value in row {}", path.display(), out.len() + 1)))
        };
        out.push((num(ix)?, num(iy)?));
    }
    Ok(out)
}
