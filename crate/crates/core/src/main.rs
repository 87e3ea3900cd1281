use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use basketmm::report::{
    greeks_table, render_csv, render_greeks_csv, render_greeks_markdown, render_markdown,
    run_scenarios, tolerance_report, Method, RunOptions,
};
use basketmm::scenario::ScenarioFile;

#[derive(Parser)]
#[command(name = "basketmm", version, about = "Basket and spread call prices by moment matching")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Price every scenario, law and strike in a scenario file.
    Run {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = MethodArg::Closed)]
        method: MethodArg,
        /// Monte-Carlo paths per (scenario, law); overrides the file.
        #[arg(long)]
        paths: Option<u64>,
        /// Monte-Carlo seed; overrides the file.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Output file; defaults to standard output, or to
        /// `$BASKETMM_OUT_DIR/<file stem>.<ext>` when that variable is set.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print closed-form vs Monte-Carlo distances and C1/C2 to standard error.
        #[arg(long)]
        tolerance_report: bool,
    },
    /// Analytic Greeks in (mean, stdev, skewness) for log-normal scenarios.
    Greeks {
        file: PathBuf,
        /// Add central finite differences and their largest relative gap.
        #[arg(long)]
        fd_check: bool,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Closed,
    Mc,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Markdown,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Markdown => "md",
        }
    }
}

fn destination(out: Option<PathBuf>, input: &Path, format: Format, suffix: &str) -> Option<PathBuf> {
    out.or_else(|| {
        let dir = std::env::var_os("BASKETMM_OUT_DIR")?;
        let stem = input.file_stem()?.to_string_lossy().into_owned();
        Some(Path::new(&dir).join(format!("{stem}{suffix}.{}", format.extension())))
    })
}

fn emit(text: &str, dest: Option<PathBuf>) -> Result<(), String> {
    match dest {
        Some(path) => {
            std::fs::write(&path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn execute(cli: Cli) -> Result<(), String> {
    match cli.command {
        Command::Run {
            file,
            method,
            paths,
            seed,
            format,
            out,
            tolerance_report: tolerance,
        } => {
            let scenarios = ScenarioFile::load(&file).map_err(|e| e.to_string())?;
            let method = match method {
                MethodArg::Closed => Method::Closed,
                MethodArg::Mc => Method::Mc,
                MethodArg::Both => Method::Both,
            };
            let report = run_scenarios(&scenarios, &RunOptions { method, paths, seed })
                .map_err(|e| e.to_string())?;
            let text = match format {
                Format::Csv => render_csv(&report),
                Format::Markdown => render_markdown(&report),
            };
            emit(&text, destination(out, &file, format, ""))?;
            if tolerance {
                eprint!("{}", tolerance_report(&report));
            }
            Ok(())
        }
        Command::Greeks {
            file,
            fd_check,
            format,
            out,
        } => {
            let scenarios = ScenarioFile::load(&file).map_err(|e| e.to_string())?;
            let rows = greeks_table(&scenarios, fd_check).map_err(|e| e.to_string())?;
            let text = match format {
                Format::Csv => render_greeks_csv(&rows),
                Format::Markdown => render_greeks_markdown(&rows),
            };
            emit(&text, destination(out, &file, format, "_greeks"))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
