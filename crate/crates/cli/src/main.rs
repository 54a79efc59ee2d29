use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use flatsol::commands::{self, Outcome};
use flatsol::config::Tolerances;
use flatsol::error::CliError;
use flatsol::report::Status;
use flatsol::{apply_tols, load, Source};

/// Positivity, flatness and dead cores for -Δu = f with sign-changing f.
///
/// Exit status: 0 success, 1 usage or config error, 2 when a condition or
/// hypothesis fails.
#[derive(Parser)]
#[command(name = "flatsol", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Run configuration file.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Built-in configuration instead of a file.
    #[arg(long, global = true, value_name = "NAME")]
    preset: Option<String>,
    /// Output directory, created if missing.
    #[arg(long, global = true, value_name = "DIR", default_value = "out")]
    out: PathBuf,
    /// Cells per axis, overriding the config.
    #[arg(long, global = true, value_name = "N")]
    mesh: Option<usize>,
    /// Tolerance override; repeatable.
    #[arg(long = "tol", global = true, value_name = "NAME=VAL")]
    tol: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Exact 1D solve: u.csv, figure.svg and the condition report.
    Solve1d,
    /// Condition report (1D) or N-d hypothesis report when a compact set is given.
    Check,
    /// Discrete Dirichlet solve on the configured mesh.
    SolveNd,
    /// Positivity certificate on the configured mesh.
    Certify,
    /// Bracketed solve of the semilinear problem.
    Semilinear,
    /// Heat flow: positivity time and decay rate.
    Parabolic,
    /// Regenerate a figure or table.
    Reproduce {
        #[arg(value_enum)]
        target: Target,
    },
    /// List the built-in presets.
    Presets,
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    Figure1,
    Figure2,
    TableConditions,
}

fn run(cli: &Cli) -> Result<Option<Outcome>, CliError> {
    if let Command::Presets = cli.command {
        for name in flatsol::presets::names() {
            println!("{name}");
        }
        return Ok(None);
    }
    fs::create_dir_all(&cli.out).map_err(|e| CliError::Io(cli.out.clone(), e))?;
    if let Command::Reproduce { target } = cli.command {
        if cli.config.is_some() || cli.preset.is_some() {
            return Err(CliError::Usage("reproduce takes no --config or --preset".into()));
        }
        let mut tol = Tolerances::default();
        apply_tols(&mut tol, &cli.tol)?;
        let out = match target {
            Target::Figure1 => commands::figure1(&tol, &cli.out)?,
            Target::Figure2 => commands::figure2(&tol, &cli.out)?,
            Target::TableConditions => commands::table_conditions(&tol, &cli.out)?,
        };
        return Ok(Some(out));
    }
    let source = match (&cli.config, &cli.preset) {
        (Some(p), None) => Source::File(p),
        (None, Some(n)) => Source::Preset(n),
        (Some(_), Some(_)) => return Err(CliError::Usage("give either --config or --preset, not both".into())),
        (None, None) => return Err(CliError::Usage("need --config PATH or --preset NAME".into())),
    };
    let cfg = load(source, cli.mesh, &cli.tol)?;
    let out = match cli.command {
        Command::Solve1d => commands::solve1d(&cfg, &cli.out)?,
        Command::Check => commands::check(&cfg, &cli.out)?,
        Command::SolveNd => commands::solve_nd(&cfg, &cli.out)?,
        Command::Certify => commands::certify(&cfg, &cli.out)?,
        Command::Semilinear => commands::semilinear(&cfg, &cli.out)?,
        Command::Parabolic => commands::parabolic(&cfg, &cli.out)?,
        Command::Reproduce { .. } | Command::Presets => unreachable!(),
    };
    Ok(Some(out))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(out)) => {
            for f in &out.files {
                println!("{}", f.display());
            }
            match out.status {
                Status::Ok => ExitCode::SUCCESS,
                Status::Fails => {
                    eprintln!("flatsol: a condition fails; see the report");
                    ExitCode::from(2)
                }
            }
        }
        Err(e) => {
            eprintln!("flatsol: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
