//! Runs a configured method and writes its history as a table.

use std::io::Write;
use std::path::Path;

use crate::approx::{run_approximation, truncated_family_bounds};
use crate::chain::{EigenResult, Problem};
use crate::config::{Method, OutputFormat, RunConfig};
use crate::error::{Error, Result};
use crate::inverse::run_inverse_iteration;
use crate::oracle::{linear_principal_eigenvalue, principal_eigenvalue_bruteforce};

/// Relative width of the shooting oracle bracket.
pub const ORACLE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    Converged,
    BudgetExhausted,
}

impl RunStatus {
    pub fn exit_code(self) -> i32 {
        match self {
            RunStatus::Converged => 0,
            RunStatus::BudgetExhausted => 2,
        }
    }
}

/// A rendered table plus `#` summary lines.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    pub notes: Vec<String>,
}

impl Table {
    pub fn write_to(&self, out: &mut dyn Write, format: OutputFormat) -> std::io::Result<()> {
        match format {
            OutputFormat::Csv | OutputFormat::Tsv => {
                let sep = if format == OutputFormat::Csv { "," } else { "\t" };
                writeln!(out, "{}", self.header.join(sep))?;
                for row in &self.rows {
                    writeln!(out, "{}", row.join(sep))?;
                }
            }
            OutputFormat::Pretty => {
                let widths: Vec<usize> = (0..self.header.len())
                    .map(|c| {
                        self.rows
                            .iter()
                            .map(|r| r[c].len())
                            .chain([self.header[c].len()])
                            .max()
                            .unwrap_or(0)
                    })
                    .collect();
                let line = |cells: &[&str]| {
                    cells
                        .iter()
                        .zip(&widths)
                        .map(|(s, w)| format!("{s:>w$}"))
                        .collect::<Vec<_>>()
                        .join("  ")
                };
                writeln!(out, "{}", line(&self.header))?;
                for row in &self.rows {
                    let cells: Vec<&str> = row.iter().map(String::as_str).collect();
                    writeln!(out, "{}", line(&cells))?;
                }
            }
        }
        for note in &self.notes {
            writeln!(out, "# {note}")?;
        }
        Ok(())
    }
}

/// Formats like C's `%.6g`, or as the shortest round-trip decimal.
pub fn format_value(x: f64, full_precision: bool) -> String {
    if full_precision {
        format!("{x:e}")
    } else {
        format_g(x, 6)
    }
}

/// `%.{digits}g`.
pub fn format_g(x: f64, digits: usize) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".into();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        format!("{}e{}{:02}", trim_zeros(mantissa), if exp < 0 { '-' } else { '+' }, exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_owned()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn cell(v: Option<&f64>, full: bool) -> String {
    v.map_or_else(String::new, |x| format_value(*x, full))
}

fn summary(label: &str, r: &EigenResult, full: bool) -> String {
    format!(
        "{label}: lambda = {}, iterations = {}, residual = {}, converged = {}",
        format_value(r.lambda, full),
        r.iterations,
        format_value(r.residual, full),
        r.converged
    )
}

fn oracle_value(problem: &Problem) -> Result<f64> {
    if problem.p() == 2.0 {
        linear_principal_eigenvalue(problem)
    } else {
        principal_eigenvalue_bruteforce(problem, ORACLE_TOL)
    }
}

/// Runs `config.method` and builds the output table.
pub fn run_table(config: &RunConfig, base_dir: &Path, full: bool) -> Result<(Table, RunStatus)> {
    let problem = config.problem()?;
    let initial = config.initial_fn(&problem, base_dir)?;
    let mut table = Table::default();
    let mut status = RunStatus::Converged;
    let mut track = |r: &EigenResult| {
        if !r.converged {
            status = RunStatus::BudgetExhausted;
        }
    };
    match config.method {
        Method::Inverse => {
            let r = run_inverse_iteration(&problem, &initial, &config.stop)?;
            track(&r);
            table.header = vec!["k", "z_k"];
            table.rows = r
                .estimate_history
                .iter()
                .enumerate()
                .map(|(k, z)| vec![k.to_string(), format_value(*z, full)])
                .collect();
            table.notes.push(summary("inverse", &r, full));
        }
        Method::Approx => {
            let r = run_approximation(&problem, &initial, &config.stop)?;
            track(&r);
            table.header = vec!["n", "inv_delta", "inv_delta_prime", "inv_delta_bar"];
            table.rows = (0..r.estimate_history.len())
                .map(|i| {
                    vec![
                        i.to_string(),
                        format_value(r.lower_history[i], full),
                        format_value(r.upper_history[i], full),
                        format_value(r.estimate_history[i], full),
                    ]
                })
                .collect();
            table.notes.push(summary("approx", &r, full));
        }
        Method::Truncated => {
            let bounds = truncated_family_bounds(&problem, config.truncated_steps)?;
            table.header = vec!["n", "inv_delta_prime", "inv_delta_bar"];
            table.rows = bounds
                .iter()
                .map(|b| {
                    vec![
                        b.n.to_string(),
                        format_value(1.0 / b.delta_prime, full),
                        format_value(1.0 / b.delta_bar, full),
                    ]
                })
                .collect();
        }
        Method::Oracle => {
            let lambda = oracle_value(&problem)?;
            table.header = vec!["lambda"];
            table.rows = vec![vec![format_value(lambda, full)]];
        }
        Method::All => {
            let inv = run_inverse_iteration(&problem, &initial, &config.stop)?;
            let apx = run_approximation(&problem, &initial, &config.stop)?;
            track(&inv);
            track(&apx);
            table.header = vec!["n", "z_n", "inv_delta", "inv_delta_prime", "inv_delta_bar"];
            // row n pairs z_n with the bounds of f^(n+1)
            let rows = inv.estimate_history.len().max(apx.estimate_history.len());
            table.rows = (0..rows)
                .map(|n| {
                    vec![
                        n.to_string(),
                        cell(inv.estimate_history.get(n), full),
                        cell(apx.lower_history.get(n), full),
                        cell(apx.upper_history.get(n), full),
                        cell(apx.estimate_history.get(n), full),
                    ]
                })
                .collect();
            table.notes.push(summary("inverse", &inv, full));
            table.notes.push(summary("approx", &apx, full));
            match oracle_value(&problem) {
                Ok(l) => table.notes.push(format!("oracle: lambda = {}", format_value(l, full))),
                Err(Error::OracleSize { .. }) => {}
                Err(e) => return Err(e),
            }
        }
    }
    table
        .notes
        .push(format!("sigma_p = {}", format_value(problem.sigma_p(), full)));
    Ok((table, status))
}

/// Runs `config` and writes the table to `out` in `config.output_format`.
pub fn run_and_emit(config: &RunConfig, base_dir: &Path, out: &mut dyn Write, full: bool) -> Result<RunStatus> {
    let (table, status) = run_table(config, base_dir, full)?;
    table
        .write_to(out, config.output_format)
        .map_err(|e| Error::Io(e.to_string()))?;
    Ok(status)
}
