//! Command-line front end.
//!
//! Exit statuses: 0 success or a true verdict, 1 a false verdict, 2 usage,
//! parse or precondition errors, 3 property failures, 4 resource or I/O errors.

mod parse;
mod svg;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;

pub use parse::{format_bundle, parse_bundle, ParseError};
pub use svg::{polygon_vertices, render_svg, Alignment, SCALE};

use crate::bundle::{Bundle, SliceMode};
use crate::classify::{
    is_globally_generated, is_quotient, subbundle_necessary, subbundle_sufficient,
    ClassificationVerdict,
};
use crate::reduction::{c_value, slope_reduction_sequence};
use crate::slope::Slope;
use crate::verify::{run_property_suite_with, EnumBounds, SuiteOptions, VerifyError};

pub const EXIT_TRUE: i32 = 0;
pub const EXIT_FALSE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_PROPERTY: i32 = 3;
pub const EXIT_RESOURCE: i32 = 4;

/// Key-sorted, pretty-printed JSON with a trailing newline. Going through
/// `serde_json::Value` sorts object keys, so output is byte-stable.
pub fn canonical_json<T: Serialize>(value: &T) -> serde_json::Result<String> {
    let v = serde_json::to_value(value)?;
    let mut s = serde_json::to_string_pretty(&v)?;
    s.push('\n');
    Ok(s)
}

#[derive(Parser, Debug)]
#[command(name = "hnpoly", version, about = "Harder-Narasimhan polygon calculus for bundles on the Fargues-Fontaine curve")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Rank, degree, slopes and semistability of a bundle.
    Info { bundle: String },
    /// Tensor product of two bundles.
    Tensor { a: String, b: String },
    /// Dual bundle.
    Dual { bundle: String },
    /// HN slice B^{mode mu}, with mode one of le, lt, ge, gt (or <=, <, >=, >).
    Slice {
        bundle: String,
        #[arg(allow_hyphen_values = true)]
        mu: String,
        mode: String,
    },
    /// Whether F is a quotient bundle of E.
    Quotient {
        e: String,
        f: String,
        /// Print the failed condition and witness slope.
        #[arg(long)]
        explain: bool,
    },
    /// Whether D is a subbundle of E (sufficient criterion).
    Sub {
        e: String,
        d: String,
        /// Also report the necessary, conjecturally sufficient, criterion.
        #[arg(long)]
        conjecture: bool,
    },
    /// Whether F is generated by n global sections.
    Globgen { f: String, n: u64 },
    /// The integer c_{E,F}(Q).
    C { e: String, f: String, q: String },
    /// Slope-reduction sequence from F towards Q.
    Reduce {
        e: String,
        f: String,
        q: String,
        /// Write the trace as JSON to this file.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Exhaustive property suite over a bounded enumeration.
    Verify {
        #[arg(long, default_value_t = EnumBounds::DEFAULT.max_rank)]
        max_rank: u64,
        #[arg(long, default_value_t = EnumBounds::DEFAULT.max_abs_degree)]
        max_deg: u64,
        #[arg(long, default_value_t = EnumBounds::DEFAULT.max_denominator)]
        max_den: u64,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Write the report as JSON to this file.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Draw HN polygons as SVG.
    Svg {
        #[arg(required = true)]
        bundles: Vec<String>,
        #[arg(long, default_value = "left")]
        align: Alignment,
        #[arg(short = 'o', long = "output")]
        output: PathBuf,
    },
}

/// A failure carrying its exit status.
struct Exit(i32, String);

type Outcome = Result<i32, Exit>;

fn usage(msg: impl std::fmt::Display) -> Exit {
    Exit(EXIT_USAGE, msg.to_string())
}

fn bundle_arg(name: &str, text: &str) -> Result<Bundle, Exit> {
    parse_bundle(text).map_err(|e| usage(format!("{name}: {e}")))
}

fn write_file(path: &Path, contents: &str) -> Result<(), Exit> {
    std::fs::write(path, contents)
        .map_err(|e| Exit(EXIT_RESOURCE, format!("cannot write {}: {e}", path.display())))
}

fn verdict(answer: bool) -> i32 {
    if answer {
        EXIT_TRUE
    } else {
        EXIT_FALSE
    }
}

fn explain(out: &mut dyn Write, v: &ClassificationVerdict) -> std::io::Result<()> {
    if let (Some(cond), Some(mu)) = (v.failed_condition, v.witness_mu) {
        writeln!(out, "failed condition: {cond}")?;
        writeln!(out, "witness mu: {mu}")?;
    }
    Ok(())
}

/// Entry point used by the binary; prints to the process streams.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_TRUE };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(Exit(code, msg)) => {
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> Outcome {
    let io = |e: std::io::Error| Exit(EXIT_RESOURCE, format!("output: {e}"));
    match cmd {
        Command::Info { bundle } => {
            let b = bundle_arg("bundle", &bundle)?;
            let slopes: Vec<String> = b.slopes().map(|s| s.to_string()).collect();
            writeln!(out, "bundle: {b}").map_err(io)?;
            writeln!(out, "rank: {}", b.rank()).map_err(io)?;
            writeln!(out, "degree: {}", b.degree()).map_err(io)?;
            writeln!(out, "slopes: {}", slopes.join(" ")).map_err(io)?;
            writeln!(out, "semistable: {}", b.is_semistable()).map_err(io)?;
            Ok(EXIT_TRUE)
        }
        Command::Tensor { a, b } => {
            let (a, b) = (bundle_arg("A", &a)?, bundle_arg("B", &b)?);
            let t = a.tensor(&b).map_err(usage)?;
            writeln!(out, "{t}").map_err(io)?;
            Ok(EXIT_TRUE)
        }
        Command::Dual { bundle } => {
            let b = bundle_arg("bundle", &bundle)?;
            writeln!(out, "{}", b.dual()).map_err(io)?;
            Ok(EXIT_TRUE)
        }
        Command::Slice { bundle, mu, mode } => {
            let b = bundle_arg("bundle", &bundle)?;
            let mu: Slope = mu.parse().map_err(|e| usage(format!("mu: {e}")))?;
            let mode: SliceMode = mode.parse().map_err(|e| usage(format!("mode: {e}")))?;
            writeln!(out, "{}", b.slice(mu, mode)).map_err(io)?;
            Ok(EXIT_TRUE)
        }
        Command::Quotient { e, f, explain: show } => {
            let (e, f) = (bundle_arg("E", &e)?, bundle_arg("F", &f)?);
            let v = is_quotient(&e, &f);
            writeln!(out, "{}", v.answer).map_err(io)?;
            if show {
                explain(out, &v).map_err(io)?;
            }
            Ok(verdict(v.answer))
        }
        Command::Sub { e, d, conjecture } => {
            let (e, d) = (bundle_arg("E", &e)?, bundle_arg("D", &d)?);
            let v = subbundle_sufficient(&e, &d);
            if v.answer {
                writeln!(out, "true").map_err(io)?;
            } else if conjecture && !subbundle_necessary(&e, &d) {
                // The necessary condition fails, so D is certainly not a subbundle.
                writeln!(out, "false").map_err(io)?;
            } else {
                writeln!(out, "inconclusive").map_err(io)?;
            }
            if conjecture {
                let nec = subbundle_necessary(&e, &d);
                writeln!(out, "necessary condition (conjecturally sufficient): {nec}").map_err(io)?;
            }
            Ok(verdict(v.answer))
        }
        Command::Globgen { f, n } => {
            let f = bundle_arg("F", &f)?;
            let g = is_globally_generated(&f, n).map_err(usage)?;
            writeln!(out, "{g}").map_err(io)?;
            Ok(verdict(g))
        }
        Command::C { e, f, q } => {
            let (e, f, q) = (bundle_arg("E", &e)?, bundle_arg("F", &f)?, bundle_arg("Q", &q)?);
            let c = c_value(&e, &f, &q).map_err(usage)?;
            writeln!(out, "{c}").map_err(io)?;
            Ok(EXIT_TRUE)
        }
        Command::Reduce { e, f, q, trace } => {
            let (e, f, q) = (bundle_arg("E", &e)?, bundle_arg("F", &f)?, bundle_arg("Q", &q)?);
            let t = slope_reduction_sequence(&e, &f, &q).map_err(usage)?;
            for (n, step) in t.steps.iter().enumerate() {
                writeln!(out, "F_{n} = {}  U_{n} = {}  c_{n} = {}", step.f, step.u, step.c)
                    .map_err(io)?;
            }
            writeln!(out, "terminated: {}", t.terminated).map_err(io)?;
            if let Some(path) = trace {
                let json = canonical_json(&t).map_err(|e| Exit(EXIT_RESOURCE, e.to_string()))?;
                write_file(&path, &json)?;
            }
            Ok(EXIT_TRUE)
        }
        Command::Verify { max_rank, max_deg, max_den, jobs, report } => {
            let bounds = EnumBounds {
                max_rank,
                max_abs_degree: max_deg,
                max_denominator: max_den,
                include_zero: true,
            };
            let opts = SuiteOptions { jobs: jobs.max(1), ..SuiteOptions::default() };
            let r = run_property_suite_with(&bounds, &opts).map_err(|e| match e {
                VerifyError::InvalidBounds(_) => usage(&e),
                VerifyError::ResourceExhausted(_) => Exit(EXIT_RESOURCE, e.to_string()),
            })?;
            for (name, p) in &r.properties {
                writeln!(out, "{name}: {} checked, {} failures", p.checked, p.failed)
                    .map_err(io)?;
            }
            let failing = r.failing_properties();
            if failing.is_empty() {
                writeln!(
                    out,
                    "all {} properties passed ({} instances)",
                    r.properties.len(),
                    r.total_checked()
                )
                .map_err(io)?;
            } else {
                writeln!(out, "FAILED: {}", failing.join(", ")).map_err(io)?;
            }
            if let Some(path) = report {
                let json = canonical_json(&r).map_err(|e| Exit(EXIT_RESOURCE, e.to_string()))?;
                write_file(&path, &json)?;
            }
            Ok(if failing.is_empty() { EXIT_TRUE } else { EXIT_PROPERTY })
        }
        Command::Svg { bundles, align, output } => {
            let bs = bundles
                .iter()
                .enumerate()
                .map(|(k, s)| bundle_arg(&format!("bundle {}", k + 1), s))
                .collect::<Result<Vec<_>, _>>()?;
            write_file(&output, &render_svg(&bs, align))?;
            Ok(EXIT_TRUE)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("hnpoly").chain(args.iter().copied());
        let code = run_with(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn spec_examples() {
        assert_eq!(run_capture(&["quotient", "O(0)^2", "O(1)"]), (0, "true\n".into(), String::new()));
        assert_eq!(run_capture(&["c", "O(0)^3", "O(0)^2", "O(0)"]).1, "0\n");
    }

    #[test]
    fn explain_and_sub() {
        let (code, out, _) = run_capture(&["quotient", "O(1) + O(-1)", "O(0)", "--explain"]);
        assert_eq!(code, 1);
        assert_eq!(out, "false\nfailed condition: equality-case\nwitness mu: 0\n");
        let (code, out, _) = run_capture(&["sub", "O(0)^2", "O(1)"]);
        assert_eq!((code, out.as_str()), (1, "inconclusive\n"));
        let (_, out, _) = run_capture(&["sub", "O(0)", "O(1)", "--conjecture"]);
        assert!(out.starts_with("false\n"));
    }

    #[test]
    fn slice_accepts_negative_mu() {
        let (code, out, _) = run_capture(&["slice", "O(1) + O(-1)", "-1", "le"]);
        assert_eq!((code, out.as_str()), (0, "O(-1)\n"));
    }

    #[test]
    fn errors_are_usage() {
        let (code, _, err) = run_capture(&["dual", "O(1"]);
        assert_eq!(code, 2);
        assert!(err.contains("byte 3"));
        assert_eq!(run_capture(&["frobnicate"]).0, 2);
        assert_eq!(run_capture(&["globgen", "O(0)", "0"]).0, 2);
        assert_eq!(run_capture(&["reduce", "O(0)", "O(1/2)", "O(0)"]).0, 2);
    }
}
