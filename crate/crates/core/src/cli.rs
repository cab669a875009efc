//! Command-line front end.
//!
//! Exit codes: 0 success, 1 verification failure, 2 hypothesis violation,
//! 64 usage error, 65 malformed input.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::Error;
use crate::extremal::{build_with_weights, count_classes, verify, InstanceReport, DEFAULT_TARGET_TOL};
use crate::numeric::{format_rational, TARGET_MAX_N};
use crate::search::{accumulate, SearchConfig, SearchOutcome};
use crate::sp::{enumerate_rooted, parse_tree, SpTree};
use crate::weights::{induced_weights, EdgeWeights};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_VIOLATION: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_PARSE: i32 = 65;

/// Largest n for `enumerate`.
const ENUMERATE_MAX_N: usize = 12;
/// Largest n for `table`, and the largest without `--long`.
const TABLE_MAX_N: usize = 9;
const TABLE_SHORT_N: usize = 7;

#[derive(Parser, Debug)]
#[command(name = "extremal", version, about = "Extremal subspaces from series-parallel graphs")]
struct Cli {
    /// Write the output to a file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List canonical rooted 2-sp trees with n edges and rank k.
    Enumerate {
        n: usize,
        k: usize,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Print the induced weights of a tree.
    Weights {
        tree: String,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Run every check on a tree, or on all trees with n in a range.
    Verify {
        /// A tree such as "P(e,S(e,e))", or a range of n such as 2..7.
        target: String,
        /// Range of ranks (default: all).
        #[arg(long)]
        k: Option<String>,
        #[arg(long, default_value_t = DEFAULT_TARGET_TOL)]
        tol: f64,
        /// Scale this edge's weight by 11/10 before checking.
        #[arg(long)]
        corrupt_edge: Option<usize>,
    },
    /// Class counts for all 1 <= k < n <= nmax as CSV.
    Table {
        nmax: usize,
        /// Allow rows above n = 7.
        #[arg(long)]
        long: bool,
    },
    /// Accumulate extremal subspaces by randomized hill climbing.
    Search {
        n: usize,
        k: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long = "attempts", visible_alias = "N")]
        attempts: Option<usize>,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        m_init: Option<f64>,
        #[arg(long)]
        decay: Option<f64>,
        #[arg(long)]
        max_steps: Option<usize>,
        #[arg(long)]
        min_magnitude: Option<f64>,
        #[arg(long)]
        equiv_tol: Option<f64>,
    },
}

/// Everything needed to rerun a command.
#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config: Value,
    pub version: String,
    pub seed: Option<u64>,
    pub timestamp: u64,
    pub input_trees: Vec<String>,
}

impl RunManifest {
    fn new(command: &str, config: Value, seed: Option<u64>, input_trees: Vec<String>) -> Self {
        RunManifest {
            command: command.into(),
            config,
            version: env!("CARGO_PKG_VERSION").into(),
            seed,
            timestamp: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            input_trees,
        }
    }

    fn comment_line(&self) -> String {
        format!("# manifest {}", serde_json::to_string(self).unwrap())
    }
}

/// Command failure carrying its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse { .. }
            | Error::InvalidTree(_)
            | Error::NotTwoConnected
            | Error::NotSeriesParallel { .. } => EXIT_PARSE,
            Error::CapExceeded { .. } | Error::InvalidArgument(_) => EXIT_USAGE,
            _ => EXIT_VERIFY_FAILED,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

/// Output of a command: the text to emit and the exit code.
struct Output {
    text: String,
    code: i32,
}

impl Output {
    fn ok(text: String) -> Self {
        Output { text, code: EXIT_OK }
    }
}

/// Runs the CLI on `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let result = match &cli.command {
        Command::Enumerate { n, k, format } => cmd_enumerate(*n, *k, *format),
        Command::Weights { tree, format } => cmd_weights(tree, *format),
        Command::Verify {
            target,
            k,
            tol,
            corrupt_edge,
        } => cmd_verify(target, k.as_deref(), *tol, *corrupt_edge),
        Command::Table { nmax, long } => cmd_table(*nmax, *long),
        Command::Search {
            n,
            k,
            seed,
            attempts,
            eps,
            m_init,
            decay,
            max_steps,
            min_magnitude,
            equiv_tol,
        } => {
            let d = SearchConfig::default();
            let cfg = SearchConfig {
                attempts: attempts.unwrap_or(d.attempts),
                eps: eps.unwrap_or(d.eps),
                m_init: m_init.unwrap_or(d.m_init),
                decay: decay.unwrap_or(d.decay),
                max_steps: max_steps.unwrap_or(d.max_steps),
                min_magnitude: min_magnitude.unwrap_or(d.min_magnitude),
                seed: *seed,
                equiv_tol: equiv_tol.unwrap_or(d.equiv_tol),
                batch: d.batch,
            };
            cmd_search(*n, *k, cfg)
        }
    };
    match result {
        Ok(out) => match emit(cli.out.as_ref(), &out.text) {
            Ok(()) => out.code,
            Err(e) => {
                eprintln!("error: {e}");
                EXIT_USAGE
            }
        },
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn emit(path: Option<&PathBuf>, text: &str) -> std::io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()
        }
    }
}

fn to_json_line(v: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).unwrap();
    s.push('\n');
    s
}

fn cmd_enumerate(n: usize, k: usize, format: Format) -> Result<Output, Failure> {
    if !(2..=ENUMERATE_MAX_N).contains(&n) || k == 0 {
        return Err(Failure::usage(format!(
            "need 2 <= n <= {ENUMERATE_MAX_N} and k >= 1, got n={n} k={k}"
        )));
    }
    let trees = enumerate_rooted(n, k);
    let classes = if k < n { count_classes(n, k)? } else { 0 };
    let strings: Vec<String> = trees.iter().map(SpTree::to_string).collect();
    let manifest = RunManifest::new(
        "enumerate",
        json!({ "n": n, "k": k, "format": format }),
        None,
        Vec::new(),
    );
    let text = match format {
        Format::Text => {
            let mut s = manifest.comment_line() + "\n";
            for t in &strings {
                s.push_str(t);
                s.push('\n');
            }
            s.push_str(&format!("classes: {classes}\n"));
            s
        }
        Format::Json => to_json_line(&json!({
            "manifest": manifest,
            "n": n,
            "k": k,
            "trees": strings,
            "classes": classes,
        })),
    };
    Ok(Output::ok(text))
}

fn cmd_weights(tree: &str, format: Format) -> Result<Output, Failure> {
    let t = parse_tree(tree)?;
    let w = induced_weights(&t)?;
    let manifest = RunManifest::new(
        "weights",
        json!({ "format": format }),
        None,
        vec![tree.to_string()],
    );
    let text = match format {
        Format::Text => {
            let mut s = manifest.comment_line() + "\n";
            for e in t.leaves() {
                s.push_str(&format!("e{e} {}\n", format_rational(w.get(e))));
            }
            s
        }
        Format::Json => to_json_line(&json!({
            "manifest": manifest,
            "tree": t.to_string(),
            "weights": w,
        })),
    };
    Ok(Output::ok(text))
}

/// `a..b`, `a..=b` (both inclusive) or a single value.
fn parse_range(s: &str) -> Result<(usize, usize), Failure> {
    let bad = || Failure::usage(format!("invalid range '{s}'"));
    let num = |x: &str| x.trim().parse::<usize>().map_err(|_| bad());
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (num(a)?, num(b.strip_prefix('=').unwrap_or(b))?),
        None => {
            let v = num(s)?;
            (v, v)
        }
    };
    if lo > hi {
        return Err(bad());
    }
    Ok((lo, hi))
}

fn looks_like_tree(s: &str) -> bool {
    s.trim_start()
        .chars()
        .next()
        .is_some_and(|c| matches!(c, 'e' | 'P' | 'S'))
}

fn cmd_verify(
    target: &str,
    k_range: Option<&str>,
    tol: f64,
    corrupt_edge: Option<usize>,
) -> Result<Output, Failure> {
    if !(tol >= 0.0) {
        return Err(Failure::usage("tolerance must be non-negative"));
    }
    let trees: Vec<SpTree> = if looks_like_tree(target) {
        vec![parse_tree(target)?]
    } else {
        let (lo, hi) = parse_range(target)?;
        if lo < 2 || hi > TARGET_MAX_N {
            return Err(Failure::usage(format!("n must lie in 2..={TARGET_MAX_N}")));
        }
        let (klo, khi) = match k_range {
            Some(r) => parse_range(r)?,
            None => (1, usize::MAX),
        };
        (lo..=hi)
            .flat_map(|n| (klo.max(1)..n.min(khi.saturating_add(1))).map(move |k| (n, k)))
            .flat_map(|(n, k)| enumerate_rooted(n, k))
            .collect()
    };
    let mut reports: Vec<InstanceReport> = Vec::with_capacity(trees.len());
    for t in &trees {
        let mut w = induced_weights(t)?.as_slice().to_vec();
        if let Some(e) = corrupt_edge {
            if e < w.len() {
                w[e] *= BigRational::new(11.into(), 10.into());
            }
        }
        let inst = build_with_weights(t, &vec![false; t.edge_count()], EdgeWeights::new(w)?)?;
        reports.push(verify(&inst, tol)?);
    }
    let failures: Vec<&InstanceReport> = reports.iter().filter(|r| !r.passed()).collect();
    let manifest = RunManifest::new(
        "verify",
        json!({ "target": target, "k": k_range, "tol": tol, "corrupt_edge": corrupt_edge }),
        None,
        trees.iter().map(SpTree::to_string).collect(),
    );
    for f in &failures {
        eprintln!("failed: {}", serde_json::to_string(f).unwrap());
    }
    let text = to_json_line(&json!({
        "manifest": manifest,
        "instances": reports,
        "passed": failures.is_empty(),
        "failures": failures.len(),
    }));
    Ok(Output {
        text,
        code: if failures.is_empty() { EXIT_OK } else { EXIT_VERIFY_FAILED },
    })
}

/// CSV triangle: header `n,1,..,nmax-1`, one row per n with empty cells
/// past `k = n - 1`.
fn cmd_table(nmax: usize, long: bool) -> Result<Output, Failure> {
    if !(2..=TABLE_MAX_N).contains(&nmax) {
        return Err(Failure::usage(format!("nmax must lie in 2..={TABLE_MAX_N}")));
    }
    if nmax > TABLE_SHORT_N && !long {
        return Err(Failure::usage(format!("rows above n = {TABLE_SHORT_N} need --long")));
    }
    let manifest = RunManifest::new("table", json!({ "nmax": nmax, "long": long }), None, Vec::new());
    let mut s = manifest.comment_line() + "\n";
    let header: Vec<String> = std::iter::once("n".to_string())
        .chain((1..nmax).map(|k| k.to_string()))
        .collect();
    s.push_str(&header.join(","));
    s.push('\n');
    for n in 2..=nmax {
        let mut row = vec![n.to_string()];
        for k in 1..nmax {
            row.push(if k < n { count_classes(n, k)?.to_string() } else { String::new() });
        }
        s.push_str(&row.join(","));
        s.push('\n');
    }
    Ok(Output::ok(s))
}

fn cmd_search(n: usize, k: usize, cfg: SearchConfig) -> Result<Output, Failure> {
    if k == 0 || k >= n || n > TARGET_MAX_N {
        return Err(Failure::usage(format!(
            "need 0 < k < n <= {TARGET_MAX_N}, got n={n} k={k}"
        )));
    }
    cfg.validate()?;
    let outcome = accumulate(n, k, &cfg)?;
    let manifest = RunManifest::new(
        "search",
        json!({ "n": n, "k": k, "search": cfg }),
        Some(cfg.seed),
        Vec::new(),
    );
    let (violation, class_count, code) = match &outcome {
        SearchOutcome::Extremal(set) => (false, set.len(), EXIT_OK),
        SearchOutcome::Violation(_) => (true, 0, EXIT_VIOLATION),
    };
    let text = to_json_line(&json!({
        "manifest": manifest,
        "n": n,
        "k": k,
        "bound_cos": 1.0 / (n as f64).sqrt(),
        "violation": violation,
        "class_count": class_count,
        "result": outcome,
    }));
    Ok(Output { text, code })
}
