//! Batch command-line driver: `construct`, `audit`, `oracle`, `sweep`, `diffstats`.
//!
//! Exit codes: 0 success, 1 usage, 2 infeasible parameters or exceeded
//! budget, 3 internal verification fault.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::construction::{build_basis, Basis};
use crate::model::{make_params, parse_rational, Feasibility, Params, ParamsError};
use crate::oracle::{lcs_dp, sumset};
use crate::splice::{assemble, AssembleError, Chain, SpliceRecord};
use crate::verify::{
    audit_bounds, check_witnesses, diff_popularity, is_convex, measure, AuditReport, Measurement,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_FAULT: i32 = 3;

/// Sumset pair budget for the oracle (about 5000 basis elements).
pub const DEFAULT_SUMSET_BUDGET: u128 = 12_502_500;
/// Largest sumset the quadratic-memory DP accepts.
pub const DEFAULT_DP_BUDGET: usize = 6_000;
pub const DEFAULT_DIFF_BUDGET: u128 = 250_000_000;

#[derive(Parser, Debug)]
#[command(
    name = "convex-sumset",
    version,
    about = "Thin additive bases for convex sequences, verified exactly"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Shape {
    /// Lower end of the block range as a fraction of n (`p/q` or a decimal).
    #[arg(long, default_value = "999/1000")]
    theta: String,
    /// Spacing between block indices.
    #[arg(long, default_value_t = 4, allow_negative_numbers = true)]
    stride: i64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build the basis and the convex chain, verify both, write A.csv, B.csv and manifest.json.
    Construct {
        #[arg(long, allow_negative_numbers = true)]
        n: i64,
        #[command(flatten)]
        shape: Shape,
        #[arg(long, default_value = "run")]
        out: PathBuf,
    },
    /// Evaluate the splice inequalities for every consecutive block pair.
    Audit {
        #[arg(long, allow_negative_numbers = true)]
        n: i64,
        #[command(flatten)]
        shape: Shape,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Materialize B+B and compare its longest convex subsequence with |A|.
    Oracle {
        #[arg(long, allow_negative_numbers = true)]
        n: i64,
        #[command(flatten)]
        shape: Shape,
        /// Maximum number of basis pairs to sum.
        #[arg(long, default_value_t = DEFAULT_SUMSET_BUDGET)]
        budget: u128,
        /// Maximum sumset size handed to the DP.
        #[arg(long, default_value_t = DEFAULT_DP_BUDGET)]
        dp_budget: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Construct and measure for several n; writes sweep.csv.
    Sweep {
        /// Comma-separated list of n.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        n: Vec<i64>,
        #[command(flatten)]
        shape: Shape,
        #[arg(long, default_value = "sweep")]
        out: PathBuf,
    },
    /// Histogram of positive differences within the chain.
    Diffstats {
        #[arg(long, allow_negative_numbers = true)]
        n: i64,
        #[command(flatten)]
        shape: Shape,
        /// Popularity threshold; defaults to ceil(sqrt(|A|)).
        #[arg(long)]
        threshold: Option<u64>,
        /// Maximum number of pairs to enumerate.
        #[arg(long, default_value_t = DEFAULT_DIFF_BUDGET)]
        budget: u128,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Serialize)]
pub struct ManifestParams {
    pub n: i64,
    pub theta: String,
    pub stride: i64,
    #[serde(rename = "D")]
    pub d: String,
}

#[derive(Debug, Serialize)]
pub struct OracleComparison {
    pub basis_size: usize,
    pub sumset_size: usize,
    pub lcs_length: usize,
    pub witness_length: usize,
    pub chain_length: Option<usize>,
    pub consistent: Option<bool>,
}

#[derive(Debug, Serialize)]
pub struct DiffSummary {
    pub size_a: usize,
    pub total_pairs: u64,
    pub distinct_differences: usize,
    pub threshold: u64,
    pub popular_count: usize,
    pub max_multiplicity: u64,
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub params: ManifestParams,
    pub warnings: Vec<Feasibility>,
    pub block_indices: Vec<i64>,
    pub splice_log: Vec<SpliceRecord>,
    pub measurement: Option<Measurement>,
    pub audit_reports: Vec<AuditReport>,
    pub oracle_comparison: Option<OracleComparison>,
    pub diff_stats: Option<DiffSummary>,
    pub exit_status: i32,
    pub error: Option<String>,
    pub timings_ms: BTreeMap<String, f64>,
}

impl RunManifest {
    fn new(command: &str, params: &Params) -> Self {
        RunManifest {
            command: command.to_string(),
            params: ManifestParams {
                n: params.n,
                theta: params.theta.to_string(),
                stride: params.stride,
                d: params.d.to_string(),
            },
            warnings: params.warnings.clone(),
            block_indices: params.block_indices(),
            splice_log: Vec::new(),
            measurement: None,
            audit_reports: Vec::new(),
            oracle_comparison: None,
            diff_stats: None,
            exit_status: EXIT_OK,
            error: None,
            timings_ms: BTreeMap::new(),
        }
    }

    fn time<T>(&mut self, stage: &str, f: impl FnOnce() -> T) -> T {
        let t = Instant::now();
        let out = f();
        self.timings_ms
            .insert(stage.to_string(), t.elapsed().as_secs_f64() * 1e3);
        out
    }

    fn fail(&mut self, code: i32, msg: String) -> i32 {
        eprintln!("error: {msg}");
        self.exit_status = code;
        self.error = Some(msg);
        code
    }
}

/// Parses `args` (including the program name) and runs one command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match cli.command {
        Command::Construct { n, shape, out } => cmd_construct(n, &shape.theta, shape.stride, &out),
        Command::Audit { n, shape, out } => {
            cmd_audit(n, &shape.theta, shape.stride, out.as_deref())
        }
        Command::Oracle {
            n,
            shape,
            budget,
            dp_budget,
            out,
        } => cmd_oracle(
            n,
            &shape.theta,
            shape.stride,
            budget,
            dp_budget,
            out.as_deref(),
        ),
        Command::Sweep { n, shape, out } => cmd_sweep(&n, &shape.theta, shape.stride, &out),
        Command::Diffstats {
            n,
            shape,
            threshold,
            budget,
            out,
        } => cmd_diffstats(
            n,
            &shape.theta,
            shape.stride,
            threshold,
            budget,
            out.as_deref(),
        ),
    }
}

fn parse_params(n: i64, theta: &str, stride: i64) -> Result<Params, ParamsError> {
    make_params(n, parse_rational(theta)?, stride)
}

fn usage(e: ParamsError) -> i32 {
    eprintln!("error: {e}");
    EXIT_USAGE
}

fn infeasible_message(params: &Params, e: &AssembleError) -> String {
    let mut msg = e.to_string();
    if params.warnings.contains(&Feasibility::OverlapPrecheck) {
        let _ = write!(
            msg,
            " (overlap precheck: theta = {} <= stride/6, consecutive block ranges need not overlap)",
            params.theta
        );
    }
    msg
}

/// Outcome of one construct-and-verify pass.
struct Built {
    basis: Basis,
    chain: Chain,
    measurement: Measurement,
}

fn build_verified(params: &Params, manifest: &mut RunManifest) -> Result<Built, i32> {
    let basis = manifest.time("basis", || build_basis(params));
    let chain = match manifest.time("assemble", || assemble(params)) {
        Ok(c) => c,
        Err(e) => {
            let code = match e {
                AssembleError::Internal(_) => EXIT_FAULT,
                _ => EXIT_INFEASIBLE,
            };
            let msg = infeasible_message(params, &e);
            return Err(manifest.fail(code, msg));
        }
    };
    manifest.splice_log = chain.splice_log.clone();
    match manifest.time("convexity", || is_convex(chain.values.values())) {
        Ok(true) => {}
        _ => return Err(manifest.fail(EXIT_FAULT, "assembled chain is not convex".into())),
    }
    if let Err(e) = manifest.time("witnesses", || check_witnesses(&chain, &basis)) {
        return Err(manifest.fail(EXIT_FAULT, e.to_string()));
    }
    let measurement = manifest.time("measure", || measure(&chain, &basis, params));
    manifest.measurement = Some(measurement.clone());
    Ok(Built {
        basis,
        chain,
        measurement,
    })
}

fn audit_pairs(params: &Params) -> Vec<AuditReport> {
    params
        .block_indices()
        .windows(2)
        .filter_map(|w| audit_bounds(params, w[0]).ok())
        .collect()
}

fn write_manifest(dir: &Path, manifest: &RunManifest) -> io::Result<()> {
    fs::create_dir_all(dir)?;
    let json = serde_json::to_string_pretty(manifest).map_err(io::Error::other)?;
    fs::write(dir.join("manifest.json"), json + "\n")
}

/// `# D=<D>` header line, then `index,numerator[,i,j]` rows.
pub fn chain_csv(params: &Params, chain: &Chain) -> String {
    let mut s = format!("# D={}\nindex,numerator,i,j\n", params.d);
    for (idx, (v, w)) in chain
        .values
        .values()
        .iter()
        .zip(&chain.witnesses)
        .enumerate()
    {
        let _ = writeln!(s, "{idx},{v},{},{}", w.i, w.j);
    }
    s
}

pub fn basis_csv(params: &Params, basis: &Basis) -> String {
    let mut s = format!("# D={}\nindex,numerator\n", params.d);
    for (idx, v) in basis.elements.iter().enumerate() {
        let _ = writeln!(s, "{idx},{v}");
    }
    s
}

fn report_io(e: io::Error) -> i32 {
    eprintln!("error: writing output: {e}");
    EXIT_USAGE
}

pub fn cmd_construct(n: i64, theta: &str, stride: i64, out: &Path) -> i32 {
    let params = match parse_params(n, theta, stride) {
        Ok(p) => p,
        Err(e) => return usage(e),
    };
    let mut manifest = RunManifest::new("construct", &params);
    let code = match build_verified(&params, &mut manifest) {
        Ok(built) => {
            manifest.audit_reports = manifest.time("audit", || audit_pairs(&params));
            let files = fs::create_dir_all(out)
                .and_then(|_| fs::write(out.join("A.csv"), chain_csv(&params, &built.chain)))
                .and_then(|_| fs::write(out.join("B.csv"), basis_csv(&params, &built.basis)));
            if let Err(e) = files {
                return report_io(e);
            }
            let m = &built.measurement;
            println!(
                "n={} blocks={:?} splices={} |A|={} |B|={} c={} (~{:.4})",
                params.n,
                built.chain.block_indices,
                built.chain.splice_log.len(),
                m.size_a,
                m.size_b,
                m.density,
                m.density_approx
            );
            EXIT_OK
        }
        Err(code) => code,
    };
    match write_manifest(out, &manifest) {
        Ok(()) => code,
        Err(e) => report_io(e),
    }
}

pub fn cmd_audit(n: i64, theta: &str, stride: i64, out: Option<&Path>) -> i32 {
    let params = match parse_params(n, theta, stride) {
        Ok(p) => p,
        Err(e) => return usage(e),
    };
    let mut manifest = RunManifest::new("audit", &params);
    let reports = manifest.time("audit", || audit_pairs(&params));
    let code = if reports.is_empty() {
        manifest.fail(
            EXIT_INFEASIBLE,
            format!(
                "no pair of block indices (multiples of {}) in [{}, {}]",
                params.stride,
                params.k_min(),
                params.n
            ),
        )
    } else {
        for rep in &reports {
            println!(
                "pair k={} -> {} (v={}, m={})",
                rep.k, rep.k_next, rep.v, rep.m
            );
            for c in &rep.checks {
                println!(
                    "  {:<20} {:<4} slack={:+.6e}  exact={}",
                    c.name,
                    if c.pass { "PASS" } else { "FAIL" },
                    c.slack_f64(),
                    c.slack
                );
            }
            for c in &rep.info {
                println!(
                    "  {:<20} {:<4} slack={:+.6e}  (informational)",
                    c.name,
                    if c.pass { "ok" } else { "no" },
                    c.slack_f64()
                );
            }
        }
        let all = reports.iter().all(AuditReport::all_pass);
        println!(
            "audit: {}",
            if all {
                "all checks pass"
            } else {
                "some checks fail"
            }
        );
        if all {
            EXIT_OK
        } else {
            manifest.exit_status = EXIT_INFEASIBLE;
            EXIT_INFEASIBLE
        }
    };
    manifest.audit_reports = reports;
    if let Some(dir) = out {
        if let Err(e) = write_manifest(dir, &manifest) {
            return report_io(e);
        }
    }
    code
}

pub fn cmd_oracle(
    n: i64,
    theta: &str,
    stride: i64,
    budget: u128,
    dp_budget: usize,
    out: Option<&Path>,
) -> i32 {
    let params = match parse_params(n, theta, stride) {
        Ok(p) => p,
        Err(e) => return usage(e),
    };
    let mut manifest = RunManifest::new("oracle", &params);
    let code = oracle_inner(&params, budget, dp_budget, &mut manifest);
    if let Some(dir) = out {
        if let Err(e) = write_manifest(dir, &manifest) {
            return report_io(e);
        }
    }
    code
}

fn oracle_inner(
    params: &Params,
    budget: u128,
    dp_budget: usize,
    manifest: &mut RunManifest,
) -> i32 {
    let basis = manifest.time("basis", || build_basis(params));
    let sums = match manifest.time("sumset", || sumset(&basis.elements, budget)) {
        Ok(s) => s,
        Err(e) => return manifest.fail(EXIT_INFEASIBLE, format!("sumset: {e}")),
    };
    let lcs = match manifest.time("lcs_dp", || lcs_dp(&sums, dp_budget)) {
        Ok(r) => r,
        Err(e) => {
            return manifest.fail(EXIT_INFEASIBLE, format!("longest convex subsequence: {e}"))
        }
    };
    let chain_length = match assemble(params) {
        Ok(chain) => Some(chain.len()),
        Err(e) => {
            eprintln!(
                "note: no chain to compare against: {}",
                infeasible_message(params, &e)
            );
            None
        }
    };
    let consistent = chain_length.map(|a| lcs.length >= a);
    println!(
        "n={} |B|={} |B+B|={} longest convex subsequence={} |A|={}",
        params.n,
        basis.len(),
        sums.len(),
        lcs.length,
        chain_length.map_or("-".to_string(), |a| a.to_string())
    );
    manifest.oracle_comparison = Some(OracleComparison {
        basis_size: basis.len(),
        sumset_size: sums.len(),
        lcs_length: lcs.length,
        witness_length: lcs.witness.len(),
        chain_length,
        consistent,
    });
    if consistent == Some(false) || lcs.witness.len() != lcs.length {
        return manifest.fail(EXIT_FAULT, "oracle disagrees with the construction".into());
    }
    EXIT_OK
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub n: i64,
    pub status: String,
    pub size_a: Option<usize>,
    pub size_b: Option<usize>,
    pub density: Option<String>,
    pub density_approx: Option<f64>,
    pub blocks: usize,
    pub splices: Option<usize>,
    /// `|A|(n) / |A|(previous n)` when both runs succeeded.
    pub growth: Option<f64>,
}

/// Runs construct-and-measure per `n`; failures become rows, not errors.
pub fn sweep_rows(params: &[Params]) -> Vec<SweepRow> {
    let mut rows: Vec<SweepRow> = Vec::with_capacity(params.len());
    for p in params {
        let mut manifest = RunManifest::new("sweep", p);
        let row = match build_verified(p, &mut manifest) {
            Ok(b) => {
                let growth = rows
                    .last()
                    .and_then(|r| r.size_a)
                    .map(|prev| b.measurement.size_a as f64 / prev as f64);
                SweepRow {
                    n: p.n,
                    status: "ok".into(),
                    size_a: Some(b.measurement.size_a),
                    size_b: Some(b.measurement.size_b),
                    density: Some(b.measurement.density.clone()),
                    density_approx: Some(b.measurement.density_approx),
                    blocks: b.chain.block_indices.len(),
                    splices: Some(b.chain.splice_log.len()),
                    growth,
                }
            }
            Err(_) => SweepRow {
                n: p.n,
                status: manifest.error.unwrap_or_else(|| "failed".into()),
                size_a: None,
                size_b: None,
                density: None,
                density_approx: None,
                blocks: p.block_indices().len(),
                splices: None,
                growth: None,
            },
        };
        rows.push(row);
    }
    rows
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    fn opt<T: ToString>(v: &Option<T>) -> String {
        v.as_ref().map_or(String::new(), T::to_string)
    }
    let mut s = String::from("n,|A|,|B|,c,c_approx,blocks,splices,growth,status\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},\"{}\"",
            r.n,
            opt(&r.size_a),
            opt(&r.size_b),
            opt(&r.density),
            r.density_approx
                .map_or(String::new(), |c| format!("{c:.6}")),
            r.blocks,
            opt(&r.splices),
            r.growth.map_or(String::new(), |g| format!("{g:.6}")),
            r.status.replace('"', "'")
        );
    }
    s
}

pub fn cmd_sweep(ns: &[i64], theta: &str, stride: i64, out: &Path) -> i32 {
    if ns.is_empty() {
        eprintln!("error: --n needs at least one value");
        return EXIT_USAGE;
    }
    let params: Result<Vec<Params>, _> =
        ns.iter().map(|&n| parse_params(n, theta, stride)).collect();
    let params = match params {
        Ok(p) => p,
        Err(e) => return usage(e),
    };
    let rows = sweep_rows(&params);
    let csv = sweep_csv(&rows);
    print!("{csv}");
    let written = fs::create_dir_all(out)
        .and_then(|_| fs::write(out.join("sweep.csv"), &csv))
        .and_then(|_| {
            let json = serde_json::to_string_pretty(&rows).map_err(io::Error::other)?;
            fs::write(out.join("sweep.json"), json + "\n")
        });
    if let Err(e) = written {
        return report_io(e);
    }
    EXIT_OK
}

pub fn cmd_diffstats(
    n: i64,
    theta: &str,
    stride: i64,
    threshold: Option<u64>,
    budget: u128,
    out: Option<&Path>,
) -> i32 {
    let params = match parse_params(n, theta, stride) {
        Ok(p) => p,
        Err(e) => return usage(e),
    };
    let mut manifest = RunManifest::new("diffstats", &params);
    let code = match build_verified(&params, &mut manifest) {
        Err(code) => code,
        Ok(built) => {
            let a = built.chain.values.values();
            let t = threshold
                .unwrap_or_else(|| (a.len() as f64).sqrt().ceil() as u64)
                .max(1);
            match manifest.time("diff_popularity", || diff_popularity(a, t, budget)) {
                Err(e) => manifest.fail(EXIT_INFEASIBLE, e.to_string()),
                Ok(stats) => {
                    println!(
                        "|A|={} pairs={} distinct differences={} popular(r >= {})={} max r={}",
                        a.len(),
                        stats.total_pairs,
                        stats.histogram.len(),
                        t,
                        stats.popular_count,
                        stats.max_multiplicity()
                    );
                    manifest.diff_stats = Some(DiffSummary {
                        size_a: a.len(),
                        total_pairs: stats.total_pairs,
                        distinct_differences: stats.histogram.len(),
                        threshold: t,
                        popular_count: stats.popular_count,
                        max_multiplicity: stats.max_multiplicity(),
                    });
                    if let Some(dir) = out {
                        let mut csv = String::from("difference_numerator,multiplicity\n");
                        for (x, r) in &stats.histogram {
                            let _ = writeln!(csv, "{x},{r}");
                        }
                        let res = fs::create_dir_all(dir)
                            .and_then(|_| fs::write(dir.join("diffstats.csv"), csv));
                        if let Err(e) = res {
                            return report_io(e);
                        }
                    }
                    EXIT_OK
                }
            }
        }
    };
    if let Some(dir) = out {
        if let Err(e) = write_manifest(dir, &manifest) {
            return report_io(e);
        }
    }
    code
}
