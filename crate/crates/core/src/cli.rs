//! Command-line front end.
//!
//! Exit codes: 0 satisfied or success, 1 violated, 2 unknown, 3 input
//! error, 4 no diagnosis.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::checker::{self, EvalError, Verdict};
use crate::diagnose::agreement::{self, DEFAULT_GRID_LIMIT, DEFAULT_GRID_POINTS};
use crate::diagnose::{export, filter, learn, LearnParams, Schema};
use crate::hls::{ast, Formula};
use crate::search::delta::DeltaWriter;
use crate::search::{self, Config, Selection, Termination};
use crate::trace::{self, Trace};

pub const EXIT_SATISFIED: i32 = 0;
pub const EXIT_VIOLATED: i32 = 1;
pub const EXIT_UNKNOWN: i32 = 2;
pub const EXIT_INPUT: i32 = 3;
pub const EXIT_NOT_FOUND: i32 = 4;

pub const JOBS_ENV: &str = "TRACE_DIAG_JOBS";

#[derive(Debug, Parser)]
#[command(name = "tracediag", version, about = "Search-based diagnostics for signal-based requirements")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a requirement against a trace.
    Check(CheckArgs),
    /// Search for requirement mutations and learn a diagnosis.
    Diagnose(Box<DiagnoseArgs>),
    /// Generate a synthetic trace.
    Synth(SynthArgs),
    /// Compare two diagnosis trees over a grid of slot values.
    Agreement(AgreementArgs),
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// Trace CSV.
    #[arg(value_name = "TRACE")]
    trace_pos: Option<PathBuf>,
    /// Requirement file.
    #[arg(value_name = "REQ")]
    req_pos: Option<PathBuf>,
    #[arg(long = "trace", conflicts_with = "trace_pos")]
    trace: Option<PathBuf>,
    #[arg(long = "req", conflicts_with = "req_pos")]
    req: Option<PathBuf>,
    /// Time budget in seconds.
    #[arg(long)]
    tcto: Option<f64>,
}

#[derive(Debug, Args)]
pub struct DiagnoseArgs {
    /// Trace CSV.
    #[arg(value_name = "TRACE")]
    trace_pos: Option<PathBuf>,
    /// Requirement file.
    #[arg(value_name = "REQ")]
    req_pos: Option<PathBuf>,
    #[arg(long = "trace", conflicts_with = "trace_pos")]
    trace: Option<PathBuf>,
    #[arg(long = "req", conflicts_with = "req_pos")]
    req: Option<PathBuf>,
    /// Configuration file of `key = value` lines.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Start from the desk-scale profile (MG 100, PS 20) instead of the defaults.
    #[arg(long)]
    desk: bool,
    /// Re-run from a previous run's manifest.
    #[arg(long, conflicts_with_all = ["trace_pos", "req_pos", "trace", "req", "config", "desk"])]
    manifest: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "tracediag-run")]
    out: PathBuf,
    /// Worker threads for trace checking (falls back to TRACE_DIAG_JOBS).
    #[arg(long)]
    jobs: Option<usize>,
    /// RNG seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Crossover rate.
    #[arg(long)]
    cr: Option<f64>,
    /// Per-slot mutation rate.
    #[arg(long)]
    mr: Option<f64>,
    /// Population size.
    #[arg(long)]
    ps: Option<usize>,
    /// Selection: roulette or elitism.
    #[arg(long)]
    sa: Option<Selection>,
    /// Elitism pool size.
    #[arg(long)]
    ptbc: Option<usize>,
    /// Satisfied mutants to collect before stopping.
    #[arg(long)]
    mg: Option<usize>,
    /// Tournament size (accepted, unused).
    #[arg(long)]
    ts: Option<usize>,
    /// Per-check timeout in seconds.
    #[arg(long)]
    tcto: Option<f64>,
    /// Whole-search timeout in seconds.
    #[arg(long)]
    pgto: Option<f64>,
    /// Stop after this many generations.
    #[arg(long)]
    max_generations: Option<u64>,
    /// Keep unknown verdicts as a third class.
    #[arg(long)]
    include_unknown: bool,
    /// Keep only the n fittest mutants of each class.
    #[arg(long)]
    cap: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Generator spec, e.g. `ramp peak=120.0226 duration=20 dt=0.01`.
    spec: String,
    #[arg(value_name = "OUT")]
    out_pos: Option<PathBuf>,
    #[arg(long = "out", conflicts_with = "out_pos")]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
pub struct AgreementArgs {
    /// Tree JSON of the tool.
    tree_a: PathBuf,
    /// Tree JSON of the reference.
    tree_b: PathBuf,
    /// Requirement whose slots define the schema (defaults to the first tree's).
    #[arg(long)]
    req: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_GRID_POINTS)]
    grid_points: usize,
    #[arg(long, default_value_t = DEFAULT_GRID_LIMIT)]
    limit: u64,
    #[arg(long)]
    jobs: Option<usize>,
}

/// An input problem, reported with exit code 3.
#[derive(Debug)]
pub struct InputError(pub String);

impl<E: std::fmt::Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

fn read(path: &Path) -> Result<Vec<u8>, InputError> {
    fs::read(path).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn unix_now() -> f64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0.0, |d| d.as_secs_f64())
}

fn either(pos: Option<PathBuf>, flag: Option<PathBuf>, what: &str) -> Result<PathBuf, InputError> {
    pos.or(flag).ok_or_else(|| InputError(format!("missing {what} path")))
}

fn load_formula(bytes: &[u8], path: &Path) -> Result<Formula, InputError> {
    let text = std::str::from_utf8(bytes).map_err(|_| InputError(format!("{}: not UTF-8", path.display())))?;
    Formula::parse(text).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn load_trace(bytes: &[u8], path: &Path) -> Result<Trace, InputError> {
    Trace::from_reader(bytes).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn require_signals(f: &Formula, tr: &Trace) -> Result<(), InputError> {
    for s in ast::signals(f.root()) {
        if !tr.has_signal(&s) {
            return Err(InputError(EvalError::UnknownSignal(s).to_string()));
        }
    }
    Ok(())
}

fn seconds(x: f64) -> Result<Option<Duration>, InputError> {
    if x.is_nan() || x < 0.0 {
        return Err(InputError(format!("bad time budget {x}")));
    }
    Ok(Duration::try_from_secs_f64(x).ok())
}

fn jobs(flag: Option<usize>) -> Result<Option<usize>, InputError> {
    if let Some(n) = flag {
        return if n == 0 { Err(InputError("--jobs must be positive".into())) } else { Ok(Some(n)) };
    }
    match std::env::var(JOBS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(InputError(format!("{JOBS_ENV} must be a positive integer, found `{v}`"))),
        },
        Err(_) => Ok(None),
    }
}

fn in_pool<T: Send>(n: Option<usize>, work: impl FnOnce() -> T + Send) -> Result<T, InputError> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = n {
        b = b.num_threads(n);
    }
    Ok(b.build()?.install(work))
}

/// Parse arguments and run; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { 0 };
        }
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match run(cli.command, &mut out) {
        Ok(code) => code,
        Err(InputError(msg)) => {
            eprintln!("error: {msg}");
            EXIT_INPUT
        }
    }
}

pub fn run(cmd: Command, out: &mut impl Write) -> Result<i32, InputError> {
    match cmd {
        Command::Check(a) => cmd_check(a, out),
        Command::Diagnose(a) => cmd_diagnose(*a, out),
        Command::Synth(a) => cmd_synth(a, out),
        Command::Agreement(a) => cmd_agreement(a, out),
    }
}

fn cmd_check(a: CheckArgs, out: &mut impl Write) -> Result<i32, InputError> {
    let trace_path = either(a.trace_pos, a.trace, "trace")?;
    let req_path = either(a.req_pos, a.req, "requirement")?;
    let tr = load_trace(&read(&trace_path)?, &trace_path)?;
    let f = load_formula(&read(&req_path)?, &req_path)?;
    require_signals(&f, &tr)?;
    let budget = match a.tcto {
        Some(x) => seconds(x)?,
        None => Config::default().tcto_budget(),
    };
    let (verdict, note) = match checker::check(f.root(), &tr, budget) {
        Ok(v) => (v, None),
        Err(EvalError::UnknownSignal(s)) => return Err(InputError(EvalError::UnknownSignal(s).to_string())),
        Err(e) => (Verdict::Unknown(checker::UnknownReason::Unsupported), Some(e)),
    };
    match note {
        Some(e) => writeln!(out, "{verdict}: {e}")?,
        None => writeln!(out, "{verdict}")?,
    }
    Ok(match verdict {
        Verdict::Satisfied => EXIT_SATISFIED,
        Verdict::Violated => EXIT_VIOLATED,
        Verdict::Unknown(_) => EXIT_UNKNOWN,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputRecord {
    pub path: PathBuf,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassCounts {
    pub satisfied: usize,
    pub violated: usize,
    pub unknown: usize,
}

/// Everything needed to reproduce a `diagnose` run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub version: String,
    pub config: Config,
    pub seed: u64,
    pub cap: Option<usize>,
    pub trace: InputRecord,
    pub requirement: InputRecord,
    pub started_unix: f64,
    pub finished_unix: f64,
    pub termination: Termination,
    pub generations: u64,
    pub original_verdict: String,
    pub checked: ClassCounts,
    /// Why no diagnosis was produced, if none was.
    pub not_found: Option<String>,
    /// Output file names, relative to the run directory.
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn load(path: &Path) -> Result<Self, InputError> {
        let bytes = read(path)?;
        serde_json::from_slice(&bytes).map_err(|e| InputError(format!("{}: {e}", path.display())))
    }
}

/// Write `bytes` to `path` via a temporary file and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let tmp = path.with_extension("tmp");
    {
        let mut f = File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(tmp, path)
}

fn resolve_config(a: &DiagnoseArgs, base: Config) -> Result<Config, InputError> {
    let mut c = base;
    if let Some(p) = &a.config {
        let text = String::from_utf8(read(p)?).map_err(|_| InputError(format!("{}: not UTF-8", p.display())))?;
        c.apply_text(&text).map_err(|e| InputError(format!("{}: {e}", p.display())))?;
    }
    macro_rules! over {
        ($($field:ident),*) => { $( if let Some(v) = a.$field { c.$field = v; } )* };
    }
    over!(seed, cr, mr, ps, sa, ptbc, mg, ts, tcto, pgto);
    if a.max_generations.is_some() {
        c.max_generations = a.max_generations;
    }
    if a.include_unknown {
        c.include_unknown = true;
    }
    c.validate()?;
    Ok(c)
}

fn cmd_diagnose(a: DiagnoseArgs, out: &mut impl Write) -> Result<i32, InputError> {
    let (trace_path, req_path, cfg, cap, expect) = match &a.manifest {
        Some(m) => {
            let man = RunManifest::load(m)?;
            let cfg = resolve_config(&a, man.config.clone())?;
            let cap = a.cap.or(man.cap);
            (man.trace.path.clone(), man.requirement.path.clone(), cfg, cap, Some(man))
        }
        None => {
            let base = if a.desk { Config::desk() } else { Config::default() };
            let cfg = resolve_config(&a, base)?;
            let t = either(a.trace_pos.clone(), a.trace.clone(), "trace")?;
            let r = either(a.req_pos.clone(), a.req.clone(), "requirement")?;
            (t, r, cfg, a.cap, None)
        }
    };
    let trace_bytes = read(&trace_path)?;
    let req_bytes = read(&req_path)?;
    let trace_hash = sha256_hex(&trace_bytes);
    let req_hash = sha256_hex(&req_bytes);
    if let Some(man) = &expect {
        if man.trace.sha256 != trace_hash || man.requirement.sha256 != req_hash {
            return Err(InputError("inputs changed since the manifest was written".into()));
        }
    }
    let tr = load_trace(&trace_bytes, &trace_path)?;
    let f = load_formula(&req_bytes, &req_path)?;
    require_signals(&f, &tr)?;
    let n_jobs = jobs(a.jobs)?;

    fs::create_dir_all(&a.out).map_err(|e| InputError(format!("{}: {e}", a.out.display())))?;
    let dir = a.out.as_path();
    let started = unix_now();
    let mut writer = DeltaWriter::new(File::create(dir.join("delta.csv"))?, f.slots())?;
    let outcome = in_pool(n_jobs, || search::run_with(&f, &tr, &cfg, |recs| writer.append(recs)))??;
    drop(writer);

    let d = &outcome.delta;
    let checked = ClassCounts {
        satisfied: d.count(Verdict::Satisfied),
        violated: d.count(Verdict::Violated),
        unknown: d.len() - d.count(Verdict::Satisfied) - d.count(Verdict::Violated),
    };
    let mut outputs = vec!["delta.csv".to_string()];
    let schema = Schema::from_formula(&f);
    let not_found = match filter(d, schema, cap, cfg.include_unknown) {
        Err(e) => Some(format!("{e} (search ended: {})", outcome.termination)),
        Ok(ds) => {
            let tree = learn(&ds, &LearnParams::default());
            let mut csv = Vec::new();
            ds.write_csv(&mut csv)?;
            fs::write(dir.join("dataset.csv"), csv)?;
            fs::write(dir.join("tree.txt"), export::to_text(&tree))?;
            fs::write(dir.join("tree.dot"), export::to_dot(&tree))?;
            fs::write(dir.join("tree.json"), export::to_json(&tree))?;
            outputs.extend(["dataset.csv", "tree.txt", "tree.dot", "tree.json"].map(String::from));
            out.write_all(export::to_text(&tree).as_bytes())?;
            None
        }
    };
    outputs.push("manifest.json".into());
    let manifest = RunManifest {
        version: env!("CARGO_PKG_VERSION").to_string(),
        seed: cfg.seed,
        config: cfg,
        cap,
        trace: InputRecord { path: absolute(&trace_path), sha256: trace_hash },
        requirement: InputRecord { path: absolute(&req_path), sha256: req_hash },
        started_unix: started,
        finished_unix: unix_now(),
        termination: outcome.termination,
        generations: outcome.generations,
        original_verdict: outcome.original.as_str().to_string(),
        checked,
        not_found: not_found.clone(),
        outputs,
    };
    let mut json = serde_json::to_vec_pretty(&manifest)?;
    json.push(b'\n');
    write_atomic(&dir.join("manifest.json"), &json)?;
    match not_found {
        Some(reason) => {
            writeln!(out, "Not found: {reason}")?;
            Ok(EXIT_NOT_FOUND)
        }
        None => Ok(EXIT_SATISFIED),
    }
}

fn absolute(p: &Path) -> PathBuf {
    fs::canonicalize(p).unwrap_or_else(|_| p.to_path_buf())
}

fn cmd_synth(a: SynthArgs, out: &mut impl Write) -> Result<i32, InputError> {
    let tr = trace::synth(&a.spec, a.seed)?;
    match a.out_pos.or(a.out) {
        Some(path) => tr.save(&path).map_err(|e| InputError(format!("{}: {e}", path.display())))?,
        None => tr.write_to(&mut *out)?,
    }
    Ok(EXIT_SATISFIED)
}

fn cmd_agreement(a: AgreementArgs, out: &mut impl Write) -> Result<i32, InputError> {
    let load = |p: &Path| -> Result<_, InputError> {
        let text = String::from_utf8(read(p)?).map_err(|_| InputError(format!("{}: not UTF-8", p.display())))?;
        export::from_json(&text).map_err(|e| InputError(format!("{}: {e}", p.display())))
    };
    let ta = load(&a.tree_a)?;
    let tb = load(&a.tree_b)?;
    let schema = match &a.req {
        Some(p) => Schema::from_formula(&load_formula(&read(p)?, p)?),
        None => ta.schema.clone(),
    };
    let n_jobs = jobs(a.jobs)?;
    let c = in_pool(n_jobs, || agreement::agreement(&ta, &tb, &schema, a.grid_points, a.limit))??;
    let ratio = |x: Option<f64>| x.map_or_else(|| "undefined".to_string(), |v| v.to_string());
    writeln!(out, "points {}", c.total())?;
    writeln!(out, "TP {}", c.tp)?;
    writeln!(out, "TN {}", c.tn)?;
    writeln!(out, "FP {}", c.fp)?;
    writeln!(out, "FN {}", c.fn_)?;
    writeln!(out, "precision {}", ratio(c.precision()))?;
    writeln!(out, "recall {}", ratio(c.recall()))?;
    Ok(EXIT_SATISFIED)
}
