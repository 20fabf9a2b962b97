use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use conley_box::report::{self, Mode, RunReport};
use conley_box::Error;

/// Box-grid chain recurrence and Conley decompositions for random maps.
#[derive(Parser)]
#[command(name = "conley-box", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a configuration file.
    Run { config: PathBuf },
    /// Run only the invariant checks; every check counts as a failure.
    Verify { config: PathBuf },
    /// Render one path of a saved report as a PGM raster.
    Render {
        report: PathBuf,
        /// Digest of the noise path to draw.
        #[arg(long)]
        omega: String,
        /// Output file; defaults to `classes_<digest>.pgm` next to the report.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

const EXIT_INVARIANT: u8 = 1;
const EXIT_CONFIG: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_CONFIG)
        }
    }
}

fn dispatch(cmd: Command) -> Result<u8, Error> {
    match cmd {
        Command::Run { config } => execute(config, false),
        Command::Verify { config } => execute(config, true),
        Command::Render { report, omega, out } => {
            let text = std::fs::read_to_string(&report).map_err(|e| io_err(&report, e))?;
            let parsed = RunReport::from_json(&text)?;
            let img = report::render_from_report(&parsed, &omega)?;
            let out = out.unwrap_or_else(|| report.with_file_name(format!("classes_{omega}.pgm")));
            std::fs::write(&out, img).map_err(|e| io_err(&out, e))?;
            println!("{}", out.display());
            Ok(0)
        }
    }
}

fn execute(config: PathBuf, verify: bool) -> Result<u8, Error> {
    let mut prepared = report::load_config(&config)?;
    if verify {
        prepared.config.mode = Mode::Verify;
    }
    let strict = prepared.config.mode == Mode::Verify;
    let rep = report::run(&prepared)?;
    if prepared.config.outputs.is_none() {
        println!("{}", rep.to_json());
    } else {
        let a = &rep.aggregate;
        println!(
            "{} path(s): mean CR fraction {:.4}, mean residual fraction {:.4}",
            a.omega_count, a.mean_cr_fraction, a.mean_residual_fraction
        );
        if let Some(ix) = &a.index {
            println!(
                "index: {}/{} hits, delta_hat {:.4}, 95% interval [{:.4}, {:.4}]",
                ix.hits, ix.samples, ix.delta_hat, ix.interval.0, ix.interval.1
            );
        }
    }
    match rep.failure_record(strict) {
        Some(failure) => {
            eprintln!("{failure}");
            Ok(EXIT_INVARIANT)
        }
        None => Ok(0),
    }
}

fn io_err(path: &std::path::Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        source,
    }
}
