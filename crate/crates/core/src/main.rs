use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use plap_eig::config::{parse_config, Method, OutputFormat};
use plap_eig::report::run_and_emit;
use plap_eig::Error;

#[derive(Parser)]
#[command(name = "plap-eig", version, about = "Principal eigenvalue of the weighted p-Laplacian on a path")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the methods described by a TOML config file.
    Run {
        config: PathBuf,
        /// Overrides `method` in the config (approx, inverse, truncated, oracle, all).
        #[arg(long)]
        method: Option<Method>,
        /// Overrides `output_format` in the config (csv, tsv, pretty).
        #[arg(long)]
        output: Option<OutputFormat>,
        /// Print values in full precision instead of 6 significant digits.
        #[arg(long)]
        full_precision: bool,
        /// Write the table here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run(
    path: &Path,
    method: Option<Method>,
    output: Option<OutputFormat>,
    full: bool,
    out: Option<&Path>,
) -> Result<i32, Error> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let mut config = parse_config(&text)?;
    if let Some(m) = method {
        config.method = m;
    }
    if let Some(f) = output {
        config.output_format = f;
    }
    let base = path.parent().unwrap_or(Path::new("."));
    let io = |e: std::io::Error| Error::Io(e.to_string());
    let status = match out {
        Some(file) => {
            let mut w = BufWriter::new(
                File::create(file).map_err(|e| Error::Io(format!("{}: {e}", file.display())))?,
            );
            let s = run_and_emit(&config, base, &mut w, full)?;
            w.flush().map_err(io)?;
            s
        }
        None => {
            let stdout = std::io::stdout();
            let mut w = BufWriter::new(stdout.lock());
            let s = run_and_emit(&config, base, &mut w, full)?;
            w.flush().map_err(io)?;
            s
        }
    };
    Ok(status.exit_code())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let Command::Run {
        config,
        method,
        output,
        full_precision,
        out,
    } = cli.command;
    match run(&config, method, output, full_precision, out.as_deref()) {
        Ok(code) => {
            if code == 2 {
                eprintln!("plap-eig: iteration budget exhausted before convergence");
            }
            ExitCode::from(code as u8)
        }
        Err(e) => {
            eprintln!("plap-eig: {e}");
            ExitCode::from(1)
        }
    }
}
