use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::{AnnulusGrid, FieldError, GridSpec, VelocityField};
use crate::scalar::{lit, Real};

pub const FIELD_CSV_HEADER: &str = "r,theta,ur,utheta";

/// JSON sidecar for a field CSV: grid metadata plus the data file name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Deserialize<'de> + Default"))]
pub struct FieldDescriptor<T> {
    pub grid: GridSpec<T>,
    pub data: String,
    #[serde(default)]
    pub time: Option<T>,
}

/// Writes `r,theta,ur,utheta` rows (θ fastest) with 17 significant digits,
/// after `# `-prefixed comment lines.
pub fn write_field_csv<T: Real, W: Write>(
    out: &mut W,
    f: &VelocityField<T>,
    g: &AnnulusGrid<T>,
    comments: &[String],
) -> Result<(), FieldError> {
    f.check_shape(g)?;
    for c in comments {
        writeln!(out, "# {c}")?;
    }
    writeln!(out, "{FIELD_CSV_HEADER}")?;
    for i in 0..g.nr {
        for j in 0..g.ntheta {
            let k = g.idx(i, j);
            writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e}",
                g.r[i].to_f64_lossy(),
                g.theta[j].to_f64_lossy(),
                f.ur[k].to_f64_lossy(),
                f.utheta[k].to_f64_lossy()
            )?;
        }
    }
    Ok(())
}

/// Reads a field written by [`write_field_csv`] onto `g`; node coordinates
/// must match the grid to within `1e-12` relative.
pub fn read_field_csv<T: Real, R: Read>(input: R, g: &AnnulusGrid<T>) -> Result<VelocityField<T>, FieldError> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(input);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
    if header.join(",") != FIELD_CSV_HEADER {
        return Err(FieldError::Format(format!(
            "expected header `{FIELD_CSV_HEADER}`, found `{}`",
            header.join(",")
        )));
    }
    let mut ur = Vec::with_capacity(g.len());
    let mut ut = Vec::with_capacity(g.len());
    let tol = lit::<T>(1e-12);
    for (n, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if n >= g.len() {
            return Err(FieldError::Format(format!("more than {} data rows", g.len())));
        }
        let num = |col: usize| -> Result<T, FieldError> {
            let txt = rec.get(col).unwrap_or("");
            let v: f64 = txt
                .parse()
                .map_err(|_| FieldError::Format(format!("row {}: bad number `{txt}`", n + 1)))?;
            Ok(lit(v))
        };
        let (i, j) = (n / g.ntheta, n % g.ntheta);
        let (r, th) = (num(0)?, num(1)?);
        let close = |a: T, b: T| (a - b).abs() <= tol * b.abs().max(T::one());
        if !close(r, g.r[i]) || !close(th, g.theta[j]) {
            return Err(FieldError::Format(format!("row {}: node ({i}, {j}) coordinates disagree with grid", n + 1)));
        }
        ur.push(num(2)?);
        ut.push(num(3)?);
    }
    if ur.len() != g.len() {
        return Err(FieldError::Format(format!("expected {} data rows, found {}", g.len(), ur.len())));
    }
    VelocityField::from_parts(g, ur, ut)
}
