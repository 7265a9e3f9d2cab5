//! Command-line front end.
//!
//! Exit codes: 0 success, 1 parse or validation error, 2 round-trip or
//! decode inconsistency, 3 I/O error.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::codec::{decode, ArchiveFile, CodeSetFile, CoverOptions, CoverPolicy, PartialCost};
use crate::compress::{run, CompressConfig, CompressionRun, Mode};
use crate::error::Error;
use crate::oracle::brute_force_rules;
use crate::rulemine::{mine_rules, SizeCaps, Thresholds};
use crate::seqdb::SequenceDatabase;

#[derive(Debug, Parser)]
#[command(name = "comsr", version, about = "Compress sequence databases with sequential rules")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one compression and write its report, code set and archive.
    Compress(CompressArgs),
    /// Run a threshold sweep and write one CSV row per point.
    Grid(GridArgs),
    /// Rebuild an SPMF database from an archive and its code set.
    Decode(DecodeArgs),
    /// Print database statistics.
    Stats(InputArgs),
    /// Print the mined rules.
    Mine(MineArgs),
    /// Compare the miner against exhaustive enumeration.
    #[command(hide = true)]
    Oracle(MineArgs),
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// SPMF sequence database.
    #[arg(long)]
    pub input: PathBuf,
    /// Keep only the first N sequences.
    #[arg(long)]
    pub limit: Option<usize>,
}

#[derive(Debug, Args)]
pub struct RuleArgs {
    #[arg(long, default_value_t = 0.5)]
    pub minsup: f64,
    #[arg(long, default_value_t = 0.5)]
    pub minconf: f64,
    /// Largest antecedent size.
    #[arg(long, default_value_t = 4)]
    pub max_ante: usize,
    /// Largest consequent size.
    #[arg(long, default_value_t = 1)]
    pub max_cons: usize,
}

impl RuleArgs {
    fn thresholds(&self) -> Result<Thresholds, Error> {
        Thresholds::new(self.minsup, self.minconf)
    }

    fn caps(&self) -> Result<SizeCaps, Error> {
        SizeCaps::new(self.max_ante, self.max_cons)
    }
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_enum, default_value_t = Mode::Non)]
    pub mode: Mode,
    #[command(flatten)]
    pub rules: RuleArgs,
    #[arg(long, value_enum, default_value_t = CoverPolicy::Repeat)]
    pub cover: CoverPolicy,
    #[arg(long, value_enum, default_value_t = PartialCost::Two)]
    pub partial_cost: PartialCost,
}

impl RunArgs {
    fn config(&self, thresholds: Thresholds) -> Result<CompressConfig, Error> {
        Ok(CompressConfig {
            mode: self.mode,
            thresholds,
            caps: self.rules.caps()?,
            cover: CoverOptions {
                policy: self.cover,
                partial_cost: self.partial_cost,
            },
        })
    }
}

#[derive(Debug, Args)]
pub struct CompressArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Run report (JSON).
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Final code set (JSON).
    #[arg(long)]
    pub codeset: Option<PathBuf>,
    /// Encoded database (JSON).
    #[arg(long)]
    pub archive: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Axis {
    Minsup,
    Minconf,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Threshold to sweep; the other stays at its flag value.
    #[arg(long, value_enum)]
    pub vary: Axis,
    #[arg(long)]
    pub from: f64,
    #[arg(long)]
    pub to: f64,
    #[arg(long)]
    pub step: f64,
    /// Output CSV; stdout if omitted.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DecodeArgs {
    #[arg(long)]
    pub archive: PathBuf,
    #[arg(long)]
    pub codeset: PathBuf,
    /// Output SPMF file; stdout if omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MineArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub rules: RuleArgs,
}

/// A failed command with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Io(_) => 3,
            Error::Decode(_) | Error::UsageMismatch(_) | Error::Internal(_) => 2,
            _ => 1,
        };
        Failure::new(code, e.to_string())
    }
}

fn io_failure(path: &Path, e: io::Error) -> Failure {
    Failure::new(3, format!("{}: {e}", path.display()))
}

fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| io_failure(path, e))
}

fn write_text(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| io_failure(path, e))
}

fn load(args: &InputArgs) -> Result<SequenceDatabase, Failure> {
    let text = read_text(&args.input)?;
    let mut db = crate::seqdb::parse_spmf(&text).map_err(|e| Failure::new(1, format!("{}: {e}", args.input.display())))?;
    if let Some(limit) = args.limit {
        db.truncate(limit);
    }
    if db.is_empty() {
        return Err(Error::EmptyDatabase.into());
    }
    Ok(db)
}

fn load_single_item(args: &InputArgs) -> Result<SequenceDatabase, Failure> {
    let db = load(args)?;
    if let Err(step) = db.validate_single_item() {
        return Err(Error::NotSingleItem {
            sid: step.sid,
            position: step.position,
        }
        .into());
    }
    Ok(db)
}

/// Runs, then checks that the archive decodes back to the input.
fn verified_run(db: &SequenceDatabase, config: &CompressConfig) -> Result<CompressionRun, Failure> {
    let result = run(db, config)?;
    match decode(&result.encoded, &result.code_set) {
        Ok(back) if &back == db => Ok(result),
        Ok(_) => Err(Failure::new(2, "round trip produced a different database")),
        Err(e) => Err(Failure::new(2, format!("round trip failed: {e}"))),
    }
}

fn summary(run: &CompressionRun) -> String {
    let mut s = String::new();
    let c = &run.config;
    let _ = writeln!(
        s,
        "mode={} minsup={} minconf={} caps={}x{}",
        c.mode, c.thresholds.minsup, c.thresholds.minconf, c.caps.max_antecedent, c.caps.max_consequent
    );
    let _ = writeln!(
        s,
        "mined={} candidates={} accepted={} rejected={}",
        run.mined_rule_count,
        run.candidate_count,
        run.accepted.len(),
        run.rejected
    );
    let _ = writeln!(
        s,
        "initial: rules={} used={} total={}",
        run.initial_code_size, run.initial_rules_used, run.initial.total
    );
    let _ = writeln!(
        s,
        "final: rules={} model={} data={} total={} ratio={:.4}",
        run.code_set.len(),
        run.final_length.model_length,
        run.final_length.data_length,
        run.final_length.total,
        run.compression_ratio
    );
    let _ = writeln!(s, "mining={:.3}s loop={:.3}s", run.mining_seconds, run.loop_seconds);
    s
}

fn cmd_compress(args: &CompressArgs) -> Result<(), Failure> {
    let db = load_single_item(&args.run.input)?;
    let config = args.run.config(args.run.rules.thresholds()?)?;
    let result = verified_run(&db, &config)?;
    if let Some(path) = &args.report {
        let json = serde_json::to_string_pretty(&result.report()).map_err(Error::from)?;
        write_text(path, &json)?;
    }
    if let Some(path) = &args.codeset {
        write_text(path, &CodeSetFile::to_json(&result.code_set)?)?;
    }
    if let Some(path) = &args.archive {
        write_text(path, &ArchiveFile::to_json(&result.encoded)?)?;
    }
    print!("{}", summary(&result));
    Ok(())
}

/// Grid values from `from` to `to` inclusive, rounded to 10 decimals so
/// that repeated addition does not drift.
pub fn grid_points(from: f64, to: f64, step: f64) -> Result<Vec<f64>, Error> {
    let bad = |reason: &str| Error::InvalidRange(reason.to_string());
    if !(from.is_finite() && to.is_finite() && step.is_finite()) {
        return Err(bad("range bounds must be finite"));
    }
    if to < from {
        return Err(bad("--to must not be below --from"));
    }
    if step <= 0.0 {
        return Err(bad("--step must be positive"));
    }
    let n = ((to - from) / step + 1e-9).floor() as usize;
    Ok((0..=n)
        .map(|i| ((from + i as f64 * step) * 1e10).round() / 1e10)
        .collect())
}

pub const CSV_HEADER: &str = "minsup,minconf,mode,final_rule_count,compression_ratio,total_length,loop_seconds";

fn csv_row(config: &CompressConfig, outcome: &Result<CompressionRun, Failure>) -> String {
    let t = config.thresholds;
    match outcome {
        Ok(run) => format!(
            "{:.4},{:.4},{},{},{:.4},{},{:.4}",
            t.minsup,
            t.minconf,
            config.mode,
            run.code_set.len(),
            run.compression_ratio,
            run.final_length.total,
            run.loop_seconds
        ),
        Err(_) => format!("{:.4},{:.4},{},NA,NA,NA,NA", t.minsup, t.minconf, config.mode),
    }
}

fn cmd_grid(args: &GridArgs) -> Result<(), Failure> {
    let db = load_single_item(&args.run.input)?;
    let points = grid_points(args.from, args.to, args.step)?;
    let mut csv = String::from(CSV_HEADER);
    csv.push('\n');
    let mut worst: Option<Failure> = None;
    for value in points {
        let (minsup, minconf) = match args.vary {
            Axis::Minsup => (value, args.run.rules.minconf),
            Axis::Minconf => (args.run.rules.minsup, value),
        };
        let config = args.run.config(Thresholds {
            minsup,
            minconf,
        })?;
        let outcome = config
            .thresholds
            .validate()
            .map_err(Failure::from)
            .and_then(|_| verified_run(&db, &config));
        csv.push_str(&csv_row(&config, &outcome));
        csv.push('\n');
        if let Err(f) = outcome {
            eprintln!("comsr: minsup={minsup} minconf={minconf}: {}", f.message);
            if worst.as_ref().is_none_or(|w| f.code > w.code) {
                worst = Some(f);
            }
        }
    }
    match &args.csv {
        Some(path) => write_text(path, &csv)?,
        None => print!("{csv}"),
    }
    match worst {
        Some(f) => Err(Failure::new(f.code, "one or more grid points failed")),
        None => Ok(()),
    }
}

fn cmd_decode(args: &DecodeArgs) -> Result<(), Failure> {
    let enc = ArchiveFile::from_json(&read_text(&args.archive)?)?;
    let code = CodeSetFile::from_json(&read_text(&args.codeset)?)?;
    let db = decode(&enc, &code).map_err(|e| Failure::new(2, e.to_string()))?;
    let text = db.to_spmf();
    match &args.output {
        Some(path) => write_text(path, &text),
        None => io::stdout().write_all(text.as_bytes()).map_err(|e| Failure::new(3, e.to_string())),
    }
}

fn cmd_stats(args: &InputArgs) -> Result<(), Failure> {
    let db = load(args)?;
    println!("{}", db.stats());
    if let Err(step) = db.validate_single_item() {
        println!("multi-item step at sid {} position {}", step.sid, step.position);
    }
    Ok(())
}

fn cmd_mine(args: &MineArgs) -> Result<(), Failure> {
    let db = load(&args.input)?;
    let rules = mine_rules(&db, args.rules.thresholds()?, args.rules.caps()?)?;
    let mut out = String::new();
    for m in &rules {
        out.push_str(&m.to_line());
        out.push('\n');
    }
    print!("{out}");
    Ok(())
}

fn cmd_oracle(args: &MineArgs) -> Result<(), Failure> {
    let db = load(&args.input)?;
    let (t, caps) = (args.rules.thresholds()?, args.rules.caps()?);
    let mut mined = mine_rules(&db, t, caps)?;
    mined.sort_by(|a, b| a.rule.cmp(&b.rule));
    let expected = brute_force_rules(&db, t, caps)?;
    if mined == expected {
        println!("agree: {} rules", mined.len());
        return Ok(());
    }
    for m in expected.iter().filter(|m| !mined.contains(m)) {
        println!("missing {}", m.to_line());
    }
    for m in mined.iter().filter(|m| !expected.contains(m)) {
        println!("extra {}", m.to_line());
    }
    Err(Failure::new(2, "miner and oracle disagree"))
}

/// Sizes the global thread pool from `COMSR_THREADS`, if set.
fn configure_threads() -> Result<(), Failure> {
    let Ok(value) = std::env::var("COMSR_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::new(1, format!("COMSR_THREADS must be a positive integer, got {value:?}")))?;
    // Fails only if a pool already exists, which is harmless.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

pub fn execute(cli: &Cli) -> Result<(), Failure> {
    configure_threads()?;
    match &cli.command {
        Command::Compress(a) => cmd_compress(a),
        Command::Grid(a) => cmd_grid(a),
        Command::Decode(a) => cmd_decode(a),
        Command::Stats(a) => cmd_stats(a),
        Command::Mine(a) => cmd_mine(a),
        Command::Oracle(a) => cmd_oracle(a),
    }
}

pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("comsr: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
