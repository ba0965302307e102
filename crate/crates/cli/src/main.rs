use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qnoise_cli::{run, sidecar, CliError, CommandKind, RunConfig, RunOptions};

#[derive(Parser)]
#[command(name = "qnoise", version, about = "Quantum-noise budgets for interferometric position sensing")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Shot noise, back action, total quantum noise, SQL and classical noise per bin.
    Budget(CommonArgs),
    /// SQL curve, Kimble factor and f_SQL.
    Sql(CommonArgs),
    /// Fixed injection angle minimising in-band quantum noise.
    OptimizeAngle(CommonArgs),
    /// Detected squeezing after each stage of the efficiency chain.
    LossChain(CommonArgs),
    /// Homodyne tomography of the injected (optionally ponderomotively coupled) state.
    State(CommonArgs),
    /// Upper bound on extra band-constant displacement noise.
    DecoherenceBound(CommonArgs),
    /// Ground-state half-width of a mechanical oscillator.
    Marshall(CommonArgs),
}

#[derive(clap::Args)]
struct CommonArgs {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// CSV destination (stdout when omitted); a `<out>.meta.json` sidecar is written next to it.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Analysis band in Hz, overrides the config's `band`.
    #[arg(long, value_name = "LO:HI", value_parser = parse_band)]
    band: Option<(f64, f64)>,
    /// Relative tolerance for the decoherence bound.
    #[arg(long, value_name = "X")]
    tol: Option<f64>,
}

fn parse_band(s: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = s.split_once(':').ok_or("expected LO:HI")?;
    let num = |v: &str| v.trim().parse::<f64>().map_err(|_| format!("`{v}` is not a number"));
    Ok((num(lo)?, num(hi)?))
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| CliError::Io(format!("writing {}: {e}", path.display())))
}

fn execute(kind: CommandKind, args: CommonArgs) -> Result<(), CliError> {
    let cfg = RunConfig::load(&args.config)?;
    let opts = RunOptions {
        band: args.band,
        tol: args.tol,
    };
    let out = run(kind, &cfg, &opts)?;
    match &args.out {
        Some(path) => {
            write_file(path, &out.csv)?;
            let mut meta_path = path.clone().into_os_string();
            meta_path.push(".meta.json");
            let meta = serde_json::to_string_pretty(&sidecar(kind, &cfg, &out))
                .map_err(|e| CliError::Io(e.to_string()))?;
            write_file(Path::new(&meta_path), &(meta + "\n"))?;
        }
        None => std::io::stdout()
            .write_all(out.csv.as_bytes())
            .map_err(|e| CliError::Io(format!("writing stdout: {e}")))?,
    }
    for line in &out.notes {
        eprintln!("{line}");
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, args) = match cli.command {
        Command::Budget(a) => (CommandKind::Budget, a),
        Command::Sql(a) => (CommandKind::Sql, a),
        Command::OptimizeAngle(a) => (CommandKind::OptimizeAngle, a),
        Command::LossChain(a) => (CommandKind::LossChain, a),
        Command::State(a) => (CommandKind::State, a),
        Command::DecoherenceBound(a) => (CommandKind::DecoherenceBound, a),
        Command::Marshall(a) => (CommandKind::Marshall, a),
    };
    match execute(kind, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qnoise {}: {e}", kind.name());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
