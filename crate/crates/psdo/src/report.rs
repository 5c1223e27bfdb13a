//! Run reports: a human summary and a JSON record.

use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

/// One checked assertion.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub seed: u64,
    pub config: Value,
    pub checks: Vec<Check>,
    pub data: Value,
}

impl Report {
    pub fn new(command: impl Into<String>, seed: u64, config: Value) -> Self {
        Report { command: command.into(), seed, config, checks: Vec::new(), data: Value::Null }
    }

    pub fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) -> &mut Self {
        self.checks.push(Check { name: name.into(), passed, detail: detail.into() });
        self
    }

    pub fn with_data(mut self, data: Value) -> Self {
        self.data = data;
        self
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn human(&self) -> String {
        let mut s = format!("{} (seed {})\n", self.command, self.seed);
        for c in &self.checks {
            let tag = if c.passed { "PASS" } else { "FAIL" };
            if c.detail.is_empty() {
                s.push_str(&format!("  {tag}  {}\n", c.name));
            } else {
                s.push_str(&format!("  {tag}  {}: {}\n", c.name, c.detail));
            }
        }
        s
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    /// Writes the human summary to `out` and, if given, the JSON record to
    /// `path`.
    pub fn emit(&self, out: &mut dyn Write, path: Option<&Path>) -> std::io::Result<()> {
        out.write_all(self.human().as_bytes())?;
        if let Some(p) = path {
            std::fs::write(p, self.to_json() + "\n")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summary_lines() {
        let mut r = Report::new("calc identities", 7, Value::Null);
        r.check("vandermonde", true, "").check("bbr", false, "1 violation");
        assert!(!r.passed());
        let h = r.human();
        assert!(h.contains("PASS  vandermonde") && h.contains("FAIL  bbr: 1 violation"));
        let v: Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["seed"], 7);
    }
}
