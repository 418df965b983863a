//! Locale-independent CSV/JSON emission.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use crate::CliError;

/// 12 significant digits in scientific notation, `.` separator.
pub fn num(x: f64) -> String {
    format!("{x:.11e}")
}

pub fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

pub fn csv_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn json<T: serde::Serialize>(value: &T) -> Result<String, CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::numerical(format!("json: {e}")))?;
    text.push('\n');
    Ok(text)
}

pub fn emit(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    let write = |w: &mut dyn Write| -> io::Result<()> {
        w.write_all(text.as_bytes())?;
        w.flush()
    };
    match out {
        Some(path) => {
            let file = File::create(path)
                .map_err(|e| CliError::input(format!("out: cannot create {}: {e}", path.display())))?;
            write(&mut BufWriter::new(file))
                .map_err(|e| CliError::input(format!("out: write to {} failed: {e}", path.display())))
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            // a closed pipe is not an error worth reporting
            let _ = write(&mut lock);
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(num(0.15000000000000002), "1.50000000000e-1");
        assert_eq!(num(-0.0083477821660306), "-8.34778216603e-3");
        assert_eq!(num(0.0), "0.00000000000e0");
        assert_eq!(num(1234.5), "1.23450000000e3");
    }

    #[test]
    fn table_layout() {
        let t = csv_table(&["a", "b"], &[vec!["1".into(), "".into()]]);
        assert_eq!(t, "a,b\n1,\n");
    }
}
