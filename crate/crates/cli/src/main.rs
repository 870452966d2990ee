use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use probe_regret::harness::emit::{self, Format, CURVE_FILE, SUMMARY_FILE, TRACE_FILE};
use probe_regret::harness::verify::{verify_suite, Suite};
use probe_regret::harness::{replicate, run_experiment, ExperimentConfig, Report};
use probe_regret::Error;

const EXIT_USAGE: u8 = 1;
const EXIT_VERIFY: u8 = 2;
const EXIT_IO: u8 = 3;

/// Runs probe-regret experiments and verification suites.
#[derive(Debug, Parser)]
#[command(name = "probe-sim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// One run of replication 0; writes the full trace.
    Run(RunArgs),
    /// All replications; writes the regret curve and summary.
    Replicate(ReplicateArgs),
    /// Runs a verification suite: lemmas, tails or regressions.
    Verify(VerifyArgs),
    /// Prints the summary stored in an output directory.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
struct Common {
    /// Experiment config (TOML, or JSON by extension).
    #[arg(long)]
    config: PathBuf,
    /// Overrides the config's base seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the config's output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct ReplicateArgs {
    #[command(flatten)]
    common: Common,
    /// Overrides the replication count.
    #[arg(long)]
    reps: Option<usize>,
    /// Write only this artifact; both by default.
    #[arg(long, value_parser = parse_format)]
    format: Option<Format>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long, value_parser = parse_suite)]
    suite: Suite,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Directory for the suite's JSON report.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ReportArgs {
    /// Directory holding a summary written by `replicate`.
    #[arg(long)]
    out: PathBuf,
    /// Print the stored artifact verbatim instead of a table.
    #[arg(long, value_parser = parse_format)]
    format: Option<Format>,
}

fn parse_format(s: &str) -> Result<Format, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn exit_for(err: &Error) -> u8 {
    match err {
        Error::Io(_) => EXIT_IO,
        _ => EXIT_USAGE,
    }
}

fn load(common: &Common) -> Result<(ExperimentConfig, PathBuf), Error> {
    let mut cfg = ExperimentConfig::load(&common.config)?;
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &common.out {
        cfg.out = Some(out.clone());
    }
    let dir = cfg.out.clone().unwrap_or_else(|| PathBuf::from("out"));
    Ok((cfg, dir))
}

fn run(args: &RunArgs) -> Result<u8, Error> {
    let (cfg, dir) = load(&args.common)?;
    let trace = run_experiment(&cfg)?;
    let path = dir.join(TRACE_FILE);
    emit::write_trace(&trace, &path)?;
    println!("final regret {} over {} steps", trace.final_regret(), trace.len());
    println!("wrote {}", path.display());
    Ok(0)
}

fn replicate_cmd(args: &ReplicateArgs) -> Result<u8, Error> {
    let (mut cfg, dir) = load(&args.common)?;
    if let Some(r) = args.reps {
        cfg.replications = r;
    }
    cfg.emit_curve = true;
    cfg.validate()?;
    let report = replicate(&cfg)?;
    let written = match args.format {
        Some(f) => vec![emit::emit_report(&report, f, &dir)?],
        None => emit::emit_all(&report, &dir)?,
    };
    print_table(&report);
    for p in written {
        println!("wrote {}", p.display());
    }
    Ok(0)
}

fn verify(args: &VerifyArgs) -> Result<u8, Error> {
    let report = verify_suite(args.suite, args.seed)?;
    for c in &report.checks {
        let tag = match (c.passed, c.informational) {
            (true, _) => "PASS",
            (false, true) => "INFO",
            (false, false) => "FAIL",
        };
        println!("{tag} {}", c.name);
    }
    if let Some(dir) = &args.out {
        std::fs::create_dir_all(dir)?;
        let body = serde_json::to_string_pretty(&report).map_err(std::io::Error::from)?;
        std::fs::write(dir.join("verify.json"), body + "\n")?;
    }
    if let Some(fail) = report.first_failure() {
        let replay = serde_json::json!({ "check": fail.name, "instance": fail.first_failure });
        eprintln!("first failure: {replay}");
        return Ok(EXIT_VERIFY);
    }
    Ok(0)
}

fn report_cmd(args: &ReportArgs) -> Result<u8, Error> {
    let summary = args.out.join(SUMMARY_FILE);
    match args.format {
        Some(Format::Csv) => print!("{}", read(&args.out.join(CURVE_FILE))?),
        Some(Format::Json) => print!("{}", read(&summary)?),
        None => {
            let report: Report = serde_json::from_str(&read(&summary)?).map_err(|e| Error::Parse {
                path: summary.clone(),
                reason: e.to_string(),
            })?;
            print_table(&report);
        }
    }
    Ok(0)
}

fn read(path: &Path) -> Result<String, Error> {
    Ok(std::fs::read_to_string(path)?)
}

fn print_table(report: &Report) {
    println!(
        "R = {}, mean final regret {:.6} (s.e. {:.6})",
        report.replications, report.mean_regret, report.stderr
    );
    for p in &report.checkpoints {
        println!("  t = {:>8}  {:>14.6}  +/- {:.6}", p.t, p.mean_regret, p.stderr);
    }
    for b in &report.bounds {
        let verdict = if b.holds { "within" } else { "above" };
        println!("  bound {} = {}: {:.4} ({verdict})", b.name, b.formula, b.value);
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Run(a) => run(a),
        Command::Replicate(a) => replicate_cmd(a),
        Command::Verify(a) => verify(a),
        Command::Report(a) => report_cmd(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_for(&e))
        }
    }
}
