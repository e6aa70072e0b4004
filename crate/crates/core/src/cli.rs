//! Command-line front end.
//!
//! Every subcommand renders its payload into an [`Outcome`] instead of
//! printing, so the binary stays a thin wrapper and tests can drive the
//! commands in-process.
//!
//! Exit codes: 0 success, 1 mathematical mismatch (theorem violation,
//! residual or tolerance failure), 2 usage or precondition error.
//!
//! JSON documents have the shape `{"manifest", "entries", "summary"}`.
//! Big integers are always decimal strings. The manifest digest is the
//! SHA-256 of the compact serialization of `{"entries", "summary"}`.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::numeric::{self, NumericConfig, NumericError, DEFAULT_PRECISION_BITS, DEFAULT_ROOT_TOLERANCE};
use crate::qsequences::{h_series, r_sequence};
use crate::series::Coef;
use crate::stabilization::build_report;
use crate::zero_series::{solve_zero_series, theta_residual, SolveError};

pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "theta-lab", version, about = "Zeros of the partial theta function as exact Laurent series")]
#[command(allow_negative_numbers = true)]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Plain, global = true)]
    pub format: Format,
    /// Write the payload to PATH (a directory for `verify`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads for parallel sweeps.
    #[arg(long, env = "THETA_LAB_THREADS", global = true)]
    pub threads: Option<usize>,
    /// Working precision of the numerical check, in bits.
    #[arg(long, default_value_t = DEFAULT_PRECISION_BITS, global = true)]
    pub precision_bits: u32,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Plain,
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// r_0..r_K, partitions into parts of three kinds.
    Rseq {
        #[arg(long = "k")]
        k: i64,
    },
    /// Exact zero coefficients g_{j,0}..g_{j,N}.
    Gcoeffs {
        #[arg(long)]
        j: i64,
        #[arg(long)]
        n: i64,
    },
    /// Coefficients r~_{0;m,j}..r~_{K;m,j} of (H_{m,j}).
    Hseries {
        #[arg(long)]
        m: i64,
        #[arg(long)]
        j: i64,
        #[arg(long = "k")]
        k: i64,
    },
    /// Checks g_{j,k} = r~_{k;m,j} over the certified ranges.
    Verify {
        #[arg(long)]
        m_max: i64,
        #[arg(long)]
        j_max: i64,
    },
    /// Compares the expansions with numerically located zeros.
    Numcheck {
        /// `a`, `bi` or `a+bi`; |q| must not exceed 0.108.
        #[arg(long)]
        q: String,
        #[arg(long)]
        j_max: i64,
        #[arg(long)]
        n: i64,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub exit_code: i32,
}

impl Outcome {
    fn usage(message: impl Into<String>) -> Self {
        Outcome { stdout: String::new(), stderr: message.into() + "\n", exit_code: EXIT_USAGE }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: BTreeMap<String, String>,
    pub artifact_version: String,
    pub output_digest: String,
}

fn digest(entries: &Value, summary: &Value) -> String {
    let canonical = json!({ "entries": entries, "summary": summary }).to_string();
    hex::encode(Sha256::digest(canonical.as_bytes()))
}

/// Builds the `{manifest, entries, summary}` document.
pub fn json_document(command: &str, parameters: &[(&str, String)], entries: Value, summary: Value) -> Value {
    let manifest = RunManifest {
        command: command.to_string(),
        parameters: parameters.iter().map(|(k, v)| (k.to_string(), v.clone())).collect(),
        artifact_version: ARTIFACT_VERSION.to_string(),
        output_digest: digest(&entries, &summary),
    };
    json!({ "manifest": manifest, "entries": entries, "summary": summary })
}

/// Parses arguments (including the program name) and runs the command.
pub fn run_from_args<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli),
        Err(e) => {
            let text = e.render().to_string();
            let code = e.exit_code();
            if code == 0 {
                Outcome { stdout: text, stderr: String::new(), exit_code: EXIT_OK }
            } else {
                Outcome { stdout: String::new(), stderr: text, exit_code: EXIT_USAGE }
            }
        }
    }
}

pub fn run(cli: &Cli) -> Outcome {
    match cli.threads {
        Some(0) => Outcome::usage("error: --threads must be at least 1"),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| dispatch(cli)),
            Err(e) => Outcome::usage(format!("error: cannot start thread pool: {e}")),
        },
        None => dispatch(cli),
    }
}

fn dispatch(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Rseq { k } => cmd_rseq(*k, cli.format, cli.out.as_deref()),
        Command::Gcoeffs { j, n } => cmd_gcoeffs(*j, *n, cli.format, cli.out.as_deref()),
        Command::Hseries { m, j, k } => cmd_hseries(*m, *j, *k, cli.format, cli.out.as_deref()),
        Command::Verify { m_max, j_max } => cmd_verify(*m_max, *j_max, cli.format, cli.out.as_deref()),
        Command::Numcheck { q, j_max, n } => {
            cmd_numcheck(q, *j_max, *n, cli.precision_bits, cli.format, cli.out.as_deref())
        }
    }
}

/// Sends `payload` to `out` if given, otherwise to stdout.
fn emit(payload: String, out: Option<&Path>, stderr: String, exit_code: i32) -> Outcome {
    match out {
        None => Outcome { stdout: payload, stderr, exit_code },
        Some(path) => match fs::write(path, payload) {
            Ok(()) => Outcome { stdout: String::new(), stderr, exit_code },
            Err(e) => Outcome::usage(format!("error: cannot write {}: {e}", path.display())),
        },
    }
}

fn plain_line(values: &[Coef]) -> String {
    let mut line = values.iter().map(Coef::to_string).collect::<Vec<_>>().join(" ");
    line.push('\n');
    line
}

fn indexed_csv(header: &str, values: &[Coef]) -> String {
    let mut out = format!("k,{header}\n");
    for (k, v) in values.iter().enumerate() {
        out.push_str(&format!("{k},{v}\n"));
    }
    out
}

fn indexed_json(key: &str, values: &[Coef]) -> Value {
    Value::Array(values.iter().enumerate().map(|(k, v)| json!({ "k": k, key: v.to_string() })).collect())
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

pub fn cmd_rseq(k: i64, format: Format, out: Option<&Path>) -> Outcome {
    if k < 0 {
        return Outcome::usage(format!("error: --k must be non-negative, got {k}"));
    }
    let r = r_sequence(k as usize);
    let payload = match format {
        Format::Plain => plain_line(r.values()),
        Format::Csv => indexed_csv("r", r.values()),
        Format::Json => pretty(&json_document(
            "rseq",
            &[("k", k.to_string())],
            indexed_json("r", r.values()),
            json!({ "count": r.len() }),
        )),
    };
    emit(payload, out, String::new(), EXIT_OK)
}

pub fn cmd_gcoeffs(j: i64, n: i64, format: Format, out: Option<&Path>) -> Outcome {
    if j < 2 {
        return Outcome::usage(format!(
            "error: unsupported zero index j = {j}; the Laurent expansion is only computed for j >= 2"
        ));
    }
    if n < 0 {
        return Outcome::usage(format!("error: --n must be non-negative, got {n}"));
    }
    let zs = match solve_zero_series(j, n as usize) {
        Ok(zs) => zs,
        Err(SolveError::UnsupportedIndex(j)) => return Outcome::usage(format!("error: unsupported j = {j}")),
        Err(e) => return Outcome { stdout: String::new(), stderr: format!("error: {e}\n"), exit_code: EXIT_MISMATCH },
    };
    let residual = theta_residual(j, &zs, n as usize);
    let vanishes = residual.vanishes_in_window() && residual.max_exponent() == Some(j + n);
    let verdict = if vanishes {
        format!("residual: theta(q, x_{j}) vanishes through q^{}\n", j + n)
    } else {
        format!("residual: FAILED, theta(q, x_{j}) = {residual:?}\n")
    };
    let payload = match format {
        Format::Plain => plain_line(zs.coeffs()),
        Format::Csv => indexed_csv("g", zs.coeffs()),
        Format::Json => pretty(&json_document(
            "gcoeffs",
            &[("j", j.to_string()), ("n", n.to_string())],
            indexed_json("g", zs.coeffs()),
            json!({ "j": j, "n": n, "residual_vanishes": vanishes, "residual_checked_through": j + n }),
        )),
    };
    emit(payload, out, verdict, if vanishes { EXIT_OK } else { EXIT_MISMATCH })
}

pub fn cmd_hseries(m: i64, j: i64, k: i64, format: Format, out: Option<&Path>) -> Outcome {
    if m < 1 || j < 1 || k < 0 {
        return Outcome::usage(format!("error: need m >= 1, j >= 1 and k >= 0 (got m = {m}, j = {j}, k = {k})"));
    }
    let h = h_series(m as u64, j as u64, k as usize);
    let values = h.coeffs.coeffs();
    let payload = match format {
        Format::Plain => plain_line(values),
        Format::Csv => indexed_csv("r_tilde", values),
        Format::Json => pretty(&json_document(
            "hseries",
            &[("m", m.to_string()), ("j", j.to_string()), ("k", k.to_string())],
            indexed_json("r_tilde", values),
            json!({ "m": m, "j": j, "k_max": k }),
        )),
    };
    emit(payload, out, String::new(), EXIT_OK)
}

pub fn cmd_verify(m_max: i64, j_max: i64, format: Format, out: Option<&Path>) -> Outcome {
    if m_max < 1 || j_max < 2 {
        return Outcome::usage(format!("error: need --m-max >= 1 and --j-max >= 2 (got {m_max}, {j_max})"));
    }
    let report = match build_report(m_max as u64, j_max as u64) {
        Ok(r) => r,
        Err(e) => return Outcome { stdout: String::new(), stderr: format!("error: {e}\n"), exit_code: EXIT_MISMATCH },
    };
    let entries = serde_json::to_value(&report.entries).expect("serializable");
    let summary = serde_json::to_value(&report.summary).expect("serializable");
    let doc = json_document("verify", &[("m_max", m_max.to_string()), ("j_max", j_max.to_string())], entries, summary);
    let s = &report.summary;
    let admissible = s.pairs.iter().filter(|p| p.admissible).count();
    let mut text = format!(
        "{} certified comparisons over {admissible} admissible (m, j) pairs: {} equal, {} different\n",
        s.in_range_matches + s.in_range_mismatches,
        s.in_range_matches,
        s.in_range_mismatches
    );
    let (exit_code, stderr) = match report.first_violation() {
        None => (EXIT_OK, String::new()),
        Some(w) => (
            EXIT_MISMATCH,
            format!(
                "theorem violation: m = {}, j = {}, k = {}: g = {}, r~ = {}\n",
                w.m, w.j, w.k, w.g_value, w.r_tilde_value
            ),
        ),
    };
    if let Some(dir) = out {
        let written = fs::create_dir_all(dir)
            .and_then(|_| fs::write(dir.join("stabilization.json"), pretty(&doc)))
            .and_then(|_| fs::write(dir.join("stabilization.csv"), report.to_csv()));
        if let Err(e) = written {
            return Outcome::usage(format!("error: cannot write reports to {}: {e}", dir.display()));
        }
        text.push_str(&format!("reports written to {}\n", dir.display()));
        return Outcome { stdout: text, stderr, exit_code };
    }
    let payload = match format {
        Format::Plain => text,
        Format::Csv => report.to_csv(),
        Format::Json => pretty(&doc),
    };
    Outcome { stdout: payload, stderr, exit_code }
}

#[derive(Debug, Clone, Serialize)]
struct NumRow {
    j: u32,
    zero_re: String,
    zero_im: String,
    series_re: Option<String>,
    series_im: Option<String>,
    relative_error: Option<String>,
    ceiling: Option<String>,
    residual: String,
    ok: bool,
}

fn float_text(f: &rug::Float) -> String {
    f.to_string_radix(10, Some(30))
}

pub fn cmd_numcheck(q: &str, j_max: i64, n: i64, precision_bits: u32, format: Format, out: Option<&Path>) -> Outcome {
    if j_max < 1 || n < 0 {
        return Outcome::usage(format!("error: need --j-max >= 1 and --n >= 0 (got {j_max}, {n})"));
    }
    let cfg = match numeric::parse_complex(q, precision_bits)
        .and_then(|q| NumericConfig::new(q, j_max as u32, precision_bits, DEFAULT_ROOT_TOLERANCE))
    {
        Ok(cfg) => cfg,
        Err(e) => return Outcome::usage(format!("error: {e}")),
    };
    let zeros = match numeric::find_zeros(&cfg, j_max as u32) {
        Ok(z) => z,
        Err(e @ NumericError::Config(_)) => return Outcome::usage(format!("error: {e}")),
        Err(e) => return Outcome { stdout: String::new(), stderr: format!("error: {e}\n"), exit_code: EXIT_MISMATCH },
    };
    let mut rows = Vec::new();
    for j in 1..=j_max as u32 {
        let z = zeros.zero_for(j).expect("matched by find_zeros");
        let residual = zeros.residual_for(j).expect("matched by find_zeros");
        let mut row = NumRow {
            j,
            zero_re: float_text(z.real()),
            zero_im: float_text(z.imag()),
            series_re: None,
            series_im: None,
            relative_error: None,
            ceiling: None,
            residual: format!("{residual:.6e}"),
            ok: residual < cfg.root_tolerance,
        };
        // the expansion is only defined for j >= 2; the j = 1 row is numeric only
        if j >= 2 {
            let zs = match solve_zero_series(j as i64, n as usize) {
                Ok(zs) => zs,
                Err(e) => return Outcome { stdout: String::new(), stderr: format!("error: {e}\n"), exit_code: EXIT_MISMATCH },
            };
            let predicted = numeric::evaluate_zero_series(&cfg.q, &zs);
            let err = numeric::relative_error(&zeros, &cfg.q, &zs).expect("matched above");
            let ceiling = numeric::series_error_ceiling(&cfg, j as i64, n as usize);
            row.series_re = Some(float_text(predicted.real()));
            row.series_im = Some(float_text(predicted.imag()));
            row.relative_error = Some(format!("{err:.6e}"));
            row.ceiling = Some(format!("{ceiling:.6e}"));
            row.ok &= err < ceiling;
        }
        rows.push(row);
    }
    let all_ok = rows.iter().all(|r| r.ok);
    let dash = |s: &Option<String>| s.clone().unwrap_or_else(|| "-".into());
    let payload = match format {
        Format::Plain => {
            let mut s = format!("# q = {q}, N = {n}, truncation degree {}, {precision_bits} bits\n", cfg.truncation_degree);
            s.push_str("j zero_re zero_im series_re series_im relative_error ceiling residual ok\n");
            for r in &rows {
                s.push_str(&format!(
                    "{} {} {} {} {} {} {} {} {}\n",
                    r.j,
                    r.zero_re,
                    r.zero_im,
                    dash(&r.series_re),
                    dash(&r.series_im),
                    dash(&r.relative_error),
                    dash(&r.ceiling),
                    r.residual,
                    r.ok
                ));
            }
            s
        }
        Format::Csv => {
            let mut s = String::from("j,zero_re,zero_im,series_re,series_im,relative_error,ceiling,residual,ok\n");
            let blank = |s: &Option<String>| s.clone().unwrap_or_default();
            for r in &rows {
                s.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{}\n",
                    r.j,
                    r.zero_re,
                    r.zero_im,
                    blank(&r.series_re),
                    blank(&r.series_im),
                    blank(&r.relative_error),
                    blank(&r.ceiling),
                    r.residual,
                    r.ok
                ));
            }
            s
        }
        Format::Json => pretty(&json_document(
            "numcheck",
            &[
                ("q", q.to_string()),
                ("j_max", j_max.to_string()),
                ("n", n.to_string()),
                ("precision_bits", precision_bits.to_string()),
            ],
            serde_json::to_value(&rows).expect("serializable"),
            json!({
                "truncation_degree": cfg.truncation_degree,
                "root_tolerance": format!("{:e}", cfg.root_tolerance),
                "all_within_tolerance": all_ok,
            }),
        )),
    };
    let stderr = if all_ok { String::new() } else { "numeric check failed: see rows with ok = false\n".to_string() };
    emit(payload, out, stderr, if all_ok { EXIT_OK } else { EXIT_MISMATCH })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> Outcome {
        run_from_args(std::iter::once("theta-lab").chain(args.iter().copied()))
    }

    #[test]
    fn rseq_formats() {
        assert_eq!(run_args(&["rseq", "--k", "6", "--format", "plain"]).stdout, "1 3 9 22 51 108 221\n");
        assert_eq!(run_args(&["rseq", "--k", "0"]).stdout, "1\n");
        let csv = run_args(&["rseq", "--k", "38", "--format", "csv"]).stdout;
        assert_eq!(csv.lines().next(), Some("k,r"));
        assert_eq!(csv.lines().last(), Some("38,254170332"));
        assert_eq!(run_args(&["rseq", "--k", "-1"]).exit_code, EXIT_USAGE);
    }

    #[test]
    fn rseq_json_uses_strings() {
        let out = run_args(&["rseq", "--k", "3", "--format", "json"]);
        let v: Value = serde_json::from_str(&out.stdout).unwrap();
        assert_eq!(v["entries"][3], json!({ "k": 3, "r": "22" }));
        assert_eq!(v["manifest"]["command"], "rseq");
        assert_eq!(v["manifest"]["parameters"]["k"], "3");
        assert_eq!(v["manifest"]["artifact_version"], ARTIFACT_VERSION);
        assert_eq!(v["manifest"]["output_digest"], digest(&v["entries"], &v["summary"]));
    }

    #[test]
    fn gcoeffs_gate_and_values() {
        let out = run_args(&["gcoeffs", "--j", "5", "--n", "5"]);
        assert_eq!(out.exit_code, EXIT_OK);
        assert_eq!(out.stdout, "1 3 9 22 51 108\n");
        assert!(out.stderr.contains("vanishes through q^10"));
        let bad = run_args(&["gcoeffs", "--j", "1", "--n", "3"]);
        assert_eq!(bad.exit_code, EXIT_USAGE);
        assert!(bad.stderr.contains("j = 1"));
    }

    #[test]
    fn hseries_identity_and_gates() {
        assert_eq!(run_args(&["hseries", "--m", "1", "--j", "9", "--k", "6"]).stdout, run_args(&["rseq", "--k", "6"]).stdout);
        assert!(run_args(&["hseries", "--m", "2", "--j", "5", "--k", "7"]).stdout.ends_with(" 220 426\n"));
        assert_eq!(run_args(&["hseries", "--m", "0", "--j", "5", "--k", "7"]).exit_code, EXIT_USAGE);
    }

    #[test]
    fn verify_gates() {
        assert_eq!(run_args(&["verify", "--m-max", "0", "--j-max", "5"]).exit_code, EXIT_USAGE);
        assert_eq!(run_args(&["verify", "--m-max", "1", "--j-max", "1"]).exit_code, EXIT_USAGE);
        let ok = run_args(&["verify", "--m-max", "1", "--j-max", "8"]);
        assert_eq!(ok.exit_code, EXIT_OK);
        assert!(ok.stdout.contains("0 different"));
    }

    #[test]
    fn numcheck_gate() {
        let out = run_args(&["numcheck", "--q", "0.2", "--j-max", "2", "--n", "5"]);
        assert_eq!(out.exit_code, EXIT_USAGE);
        assert!(out.stderr.contains("0.108"));
        assert_eq!(run_args(&["numcheck", "--q", "zz", "--j-max", "2", "--n", "5"]).exit_code, EXIT_USAGE);
    }

    #[test]
    fn missing_arguments_are_usage_errors() {
        assert_eq!(run_args(&["gcoeffs", "--j", "5"]).exit_code, EXIT_USAGE);
        assert_eq!(run_args(&["bogus"]).exit_code, EXIT_USAGE);
        assert_eq!(run_args(&["rseq", "--k", "3", "--threads", "0"]).exit_code, EXIT_USAGE);
    }
}
