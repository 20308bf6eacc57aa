//! Command-line front end: `run`, `golden` and `legendre`.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::config::{ExperimentConfig, OutputFormat};
use crate::error::Result;
use crate::golden;
use crate::scalarfun::{legendre_numeric, tilde, ClosedForm, ScalarFunction, LEGENDRE_TOL};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_INVALID: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "opineq",
    version,
    about = "Trace-functional convexity laboratory"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the suites of an experiment config.
    Run {
        config: PathBuf,
        /// Report directory (overrides the config's `output`).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<FormatArg>,
    },
    /// Check closed-form conjugates and the functional identity.
    Golden,
    /// Tabulate a conjugate of a catalog function.
    Legendre {
        tag: String,
        /// Comma-separated evaluation points.
        #[arg(long = "t", value_delimiter = ',', required = true)]
        t: Vec<f64>,
        #[arg(long, value_enum, default_value_t = Transform::Check)]
        transform: Transform,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum FormatArg {
    Json,
    Csv,
    Both,
}

impl From<FormatArg> for OutputFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Json => OutputFormat::Json,
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Both => OutputFormat::Both,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Transform {
    /// `inf_x t x - h(x)`
    Check,
    /// the same conjugate applied to `-h(1/x)`
    Breve,
}

/// Runs a parsed command, writing human-readable output to `out` and
/// diagnostics to `err`. Returns the process exit code.
pub fn execute(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = match cli.command {
        Command::Run {
            config,
            out: dir,
            format,
        } => run(&config, dir, format.map(Into::into), out, err),
        Command::Golden => golden_cmd(out, err),
        Command::Legendre { tag, t, transform } => legendre_cmd(&tag, &t, transform, out, err),
    };
    result.unwrap_or_else(|e| {
        let _ = writeln!(err, "error: {e}");
        EXIT_INVALID
    })
}

pub fn run(
    path: &Path,
    dir: Option<PathBuf>,
    format: Option<OutputFormat>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32> {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            writeln!(err, "error: {}: {e}", path.display())?;
            return Ok(EXIT_INVALID);
        }
    };
    let cfg = match ExperimentConfig::from_json(&text) {
        Ok(c) => c,
        Err(e) => {
            writeln!(err, "error: {}: {e}", path.display())?;
            return Ok(EXIT_INVALID);
        }
    };
    let dir = dir
        .or_else(|| cfg.output.clone())
        .unwrap_or_else(|| PathBuf::from("reports"));
    let format = format.unwrap_or(cfg.format);
    fs::create_dir_all(&dir)?;

    let mut all_passed = true;
    for (i, suite) in cfg.suites.iter().enumerate() {
        let report = match suite.run() {
            Ok(r) => r,
            Err(e) => {
                writeln!(
                    err,
                    "error: {}: suites[{i}] ({}): {e}",
                    path.display(),
                    suite.kind()
                )?;
                return Ok(EXIT_INVALID);
            }
        };
        let stem = dir.join(format!("{i:02}-{}", suite.kind()));
        if format.json() {
            fs::write(stem.with_extension("json"), report.to_json()?)?;
        }
        if format.csv() {
            report.write_csv(fs::File::create(stem.with_extension("csv"))?)?;
        }
        writeln!(
            out,
            "{} {} trials={} violations={} min_gap={:.3e} runtime_ms={}",
            if report.passed { "PASS" } else { "FAIL" },
            report.suite,
            report.trials,
            report.violations,
            report.min_gap,
            report.runtime_ms
        )?;
        all_passed &= report.passed;
    }
    Ok(if all_passed { EXIT_OK } else { EXIT_FAILED })
}

fn golden_cmd(out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let rows = golden::all_rows()?;
    writeln!(
        out,
        "{:<24} {:>12} {:>8}  status",
        "check", "max_error", "at"
    )?;
    let mut failed = Vec::new();
    for row in &rows {
        writeln!(
            out,
            "{:<24} {:>12.3e} {:>8.4}  {}",
            row.name,
            row.max_error,
            row.worst_t,
            if row.passed() { "ok" } else { "FAIL" }
        )?;
        if !row.passed() {
            failed.push(row);
        }
    }
    for row in &failed {
        writeln!(
            err,
            "golden check {} exceeds {:e}: error {:e} at t = {}",
            row.name,
            golden::GOLDEN_TOL,
            row.max_error,
            row.worst_t
        )?;
    }
    Ok(if failed.is_empty() {
        EXIT_OK
    } else {
        EXIT_FAILED
    })
}

fn legendre_cmd(
    tag: &str,
    ts: &[f64],
    transform: Transform,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32> {
    let base: ScalarFunction = match tag.parse() {
        Ok(f) => f,
        Err(e) => {
            writeln!(err, "error: {e}")?;
            return Ok(EXIT_INVALID);
        }
    };
    if let Some(bad) = ts.iter().find(|t| !(**t > 0.0 && t.is_finite())) {
        writeln!(err, "error: evaluation points must be positive, got {bad}")?;
        return Ok(EXIT_INVALID);
    }
    let conjugand = match transform {
        Transform::Check => base.clone(),
        Transform::Breve => tilde(&base),
    };
    let closed = ClosedForm::conjugate_of(&conjugand);
    let name = match transform {
        Transform::Check => "check",
        Transform::Breve => "breve",
    };
    writeln!(out, "# {name}({base})")?;
    writeln!(out, "{:>12} {:>22} {:>22}  flag", "t", "numeric", "closed")?;
    for &t in ts {
        let c = legendre_numeric(&conjugand, t, LEGENDRE_TOL)?;
        let closed = match closed {
            Some(cf) => format!("{:>22.15e}", cf.eval(t)?),
            None => format!("{:>22}", "-"),
        };
        writeln!(
            out,
            "{t:>12} {:>22.15e} {closed}  {}",
            c.value,
            if c.at_boundary { "boundary" } else { "" }
        )?;
    }
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let cli =
            Cli::try_parse_from(std::iter::once("opineq").chain(args.iter().copied())).unwrap();
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = execute(cli, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    fn value_at(table: &str, column: usize) -> f64 {
        let line = table.lines().nth(2).unwrap();
        line.split_whitespace()
            .nth(column)
            .unwrap()
            .parse()
            .unwrap()
    }

    #[test]
    fn legendre_examples() {
        let (code, out, _) = call(&["legendre", "log", "--t", "1"]);
        assert_eq!(code, 0);
        assert!((value_at(&out, 1) - 1.0).abs() < 1e-8);
        assert_eq!(value_at(&out, 2), 1.0);

        let (_, out, _) = call(&["legendre", "power:1", "--t", "4", "--transform", "breve"]);
        assert!((value_at(&out, 1) - 4.0).abs() < 1e-8);

        let (_, out, _) = call(&["legendre", "affine:0,1", "--t", "0.5"]);
        assert!(out.lines().nth(2).unwrap().ends_with("boundary"));

        let (code, _, err) = call(&["legendre", "power:-1", "--t", "1"]);
        assert_eq!(code, 2);
        assert!(err.contains("exponent must be > 0"));
    }

    #[test]
    fn golden_passes() {
        let (code, out, _) = call(&["golden"]);
        assert_eq!(code, 0, "{out}");
        assert!(out.contains("breve(log)"));
    }
}
