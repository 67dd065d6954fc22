//! Deterministic text emitters. Every float goes through [`num`], which
//! prints 17 significant digits.

use std::fmt::Write as _;
use std::path::Path;

use npannulus::Complex64;

use crate::CliError;

pub fn num(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else {
        format!("{x:.16e}")
    }
}

/// `re+imj` / `re-imj`.
pub fn complex_cell(z: Complex64) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{}{sign}{}j", num(z.re), num(z.im.abs()))
}

/// Header plus rows, comma separated, trailing newline.
pub fn csv<S: AsRef<str>>(header: &[&str], rows: impl IntoIterator<Item = Vec<S>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let cells: Vec<&str> = row.iter().map(|c| c.as_ref()).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// `rows cols` on the first line, then one `re im` pair per entry in
/// row-major order.
pub fn matrix_text(rows: usize, cols: usize, entry: impl Fn(usize, usize) -> Complex64) -> String {
    let mut out = String::with_capacity(rows * cols * 48);
    writeln!(out, "{rows} {cols}").unwrap();
    for i in 0..rows {
        for j in 0..cols {
            let z = entry(i, j);
            writeln!(out, "{} {}", num(z.re), num(z.im)).unwrap();
        }
    }
    out
}

/// Writes to `path`, or to stdout when `path` is `None`.
pub fn emit(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            std::fs::write(p, text)?;
        }
        None => print!("{text}"),
    }
    Ok(())
}
