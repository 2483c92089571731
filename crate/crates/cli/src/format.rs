//! Numeric formatting and atomic CSV output.

use std::io::Write;
use std::path::Path;

/// Render with 12 significant digits, locale-independent.
///
/// Values with moderate exponents print positionally; the rest fall back
/// to exponential notation. Both forms re-parse as `f64`.
pub fn sig12(x: f64) -> String {
    if x == 0.0 {
        return String::from("0");
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    if (-4..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.11e}")
    }
}

/// One CSV row: `t`, the value (empty for pole-adjacent rows) and the flag.
pub fn csv_row(t: f64, y: Option<f64>) -> String {
    match y {
        Some(y) => format!("{},{},0", sig12(t), sig12(y)),
        None => format!("{},,1", sig12(t)),
    }
}

/// Write the CSV through a temporary sibling and rename it into place, so
/// no partial file survives a failure.
pub fn write_csv_atomically(path: &Path, rows: &[String]) -> std::io::Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = std::path::PathBuf::from(tmp);
    let result = (|| {
        let mut file = std::fs::File::create(&tmp)?;
        write_csv(&mut file, rows)?;
        file.sync_all()?;
        std::fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = std::fs::remove_file(&tmp);
    }
    result
}

pub fn write_csv(out: &mut impl Write, rows: &[String]) -> std::io::Result<()> {
    out.write_all(b"t,y,pole_flag\n")?;
    for row in rows {
        out.write_all(row.as_bytes())?;
        out.write_all(b"\n")?;
    }
    Ok(())
}
