//! Machine- and human-readable run reports.

use serde::{Deserialize, Serialize};

/// One comparison row.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CheckRow {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub abs_diff: f64,
    /// `None` marks a purely informational row.
    pub tol: Option<f64>,
    pub pass: bool,
}

impl CheckRow {
    pub fn new(name: impl Into<String>, lhs: f64, rhs: f64, tol: f64) -> Self {
        let abs_diff = (lhs - rhs).abs();
        CheckRow {
            name: name.into(),
            lhs,
            rhs,
            abs_diff,
            tol: Some(tol),
            pass: abs_diff <= tol,
        }
    }

    /// Informational row: reported but never failing.
    pub fn info(name: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        let abs_diff = (lhs - rhs).abs();
        CheckRow {
            name: name.into(),
            lhs,
            rhs,
            abs_diff,
            tol: None,
            pass: true,
        }
    }
}

/// Full report of one CLI invocation.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RunReport {
    pub command: String,
    pub inputs: Vec<(String, String)>,
    pub results: Vec<CheckRow>,
    pub timing_seconds: f64,
}

impl RunReport {
    pub fn new(command: &str) -> Self {
        RunReport {
            command: command.to_string(),
            inputs: Vec::new(),
            results: Vec::new(),
            timing_seconds: 0.0,
        }
    }

    pub fn input(mut self, key: &str, value: impl ToString) -> Self {
        self.inputs.push((key.to_string(), value.to_string()));
        self
    }

    pub fn all_pass(&self) -> bool {
        self.results.iter().all(|r| r.pass)
    }

    pub fn print_human(&self) {
        println!("# {}", self.command);
        for (k, v) in &self.inputs {
            println!("#   {k} = {v}");
        }
        let width = self
            .results
            .iter()
            .map(|r| r.name.len())
            .max()
            .unwrap_or(4)
            .max(4);
        println!(
            "{:width$}  {:>22} {:>22} {:>11} {:>8}  status",
            "name", "lhs", "rhs", "abs_diff", "tol"
        );
        for r in &self.results {
            let status = match (r.tol, r.pass) {
                (None, _) => "info",
                (Some(_), true) => "PASS",
                (Some(_), false) => "FAIL",
            };
            let tol = r.tol.map(|t| format!("{t:.1e}")).unwrap_or_default();
            println!(
                "{:width$}  {:>22.15} {:>22.15} {:>11.3e} {:>8}  {status}",
                r.name, r.lhs, r.rhs, r.abs_diff, tol
            );
        }
        println!(
            "# {} of {} checks passed in {:.2}s",
            self.results.iter().filter(|r| r.pass).count(),
            self.results.len(),
            self.timing_seconds
        );
    }
}
