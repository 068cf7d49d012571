//! Line-oriented key/value reports with a stable key order. Reports contain
//! no timestamps or environment-dependent data, so identical inputs always
//! render byte-identical output (the golden-file property the test suite
//! leans on).

use std::fmt::Display;

#[derive(Debug, Clone, Default)]
pub struct Report {
    lines: Vec<(String, String)>,
}

impl Report {
    pub fn new(command: &str) -> Report {
        let mut report = Report::default();
        report.push("tool", format!("garlands {}", env!("CARGO_PKG_VERSION")));
        report.push("command", command);
        report
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl Display) {
        self.lines.push((key.into(), value.to_string()));
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.lines {
            out.push_str(k);
            out.push_str(": ");
            out.push_str(v);
            out.push('\n');
        }
        out
    }
}
