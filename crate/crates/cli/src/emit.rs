//! Output helpers: full-precision decimal rendering and CSV/JSON sinks.

use std::io::Write;
use std::path::Path;

use crate::AppError;

/// 17 significant digits: enough to round-trip any f64 exactly.
pub fn full(x: f64) -> String {
    format!("{x:.16e}")
}

/// A CSV document accumulated in memory, written only on success so that a
/// failing run never leaves a partial file behind.
#[derive(Debug, Default)]
pub struct CsvDoc {
    lines: Vec<String>,
}

impl CsvDoc {
    pub fn new() -> Self {
        CsvDoc::default()
    }

    pub fn comment(&mut self, text: &str) {
        self.lines.push(format!("# {text}"));
    }

    pub fn row(&mut self, fields: &[String]) {
        self.lines.push(fields.join(","));
    }

    pub fn header(&mut self, names: &[&str]) {
        self.lines.push(names.join(","));
    }

    pub fn render(&self) -> String {
        let mut out = self.lines.join("\n");
        out.push('\n');
        out
    }

    pub fn write(&self, target: Option<&Path>) -> Result<(), AppError> {
        let text = self.render();
        match target {
            Some(path) => std::fs::write(path, text)
                .map_err(|e| AppError::solver(format!("cannot write {path:?}: {e}"))),
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout
                    .write_all(text.as_bytes())
                    .map_err(|e| AppError::solver(format!("cannot write stdout: {e}")))
            }
        }
    }
}

pub fn write_json(value: &serde_json::Value, target: Option<&Path>) -> Result<(), AppError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| AppError::solver(format!("cannot render JSON: {e}")))?;
    text.push('\n');
    match target {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| AppError::solver(format!("cannot write {path:?}: {e}"))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| AppError::solver(format!("cannot write stdout: {e}")))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_precision_round_trips() {
        for x in [std::f64::consts::PI, 1.0 / 3.0, 1e-300, -7.25] {
            let s = full(x);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back, x, "{s}");
        }
    }
}
