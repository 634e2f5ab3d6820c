use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use paraxial_cli::runner::{base_dir, read_source, Source};
use paraxial_cli::{run_path, run_preset, CliError, Figure, Plan, PresetScale, RunReport};

#[derive(Parser)]
#[command(name = "paraxial", version, about = "Inverse boundary problems for the parabolic wave equation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a config file (or replay a manifest).
    Run { config: PathBuf },
    /// Reproduce a figure: fig1 to fig10.
    Preset {
        #[arg(value_parser = |s: &str| s.parse::<Figure>())]
        figure: Figure,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Check a config without computing anything.
    Validate { config: PathBuf },
}

fn report(r: &RunReport) -> i32 {
    let m = &r.manifest;
    for run in &m.runs {
        let d = |v: Option<f64>| v.map_or("-".to_string(), |d| format!("{d:.4e}"));
        println!(
            "{}: tau {:.6e}, h {:.6e}, D_thin {}, D_thick {}, cond {}{}",
            run.label,
            run.realized.tau,
            run.realized.h,
            d(run.metrics.d_thin),
            d(run.metrics.d_thick),
            d(run.metrics.condition_estimate),
            run.error.as_ref().map(|e| format!(" [error: {e}]")).unwrap_or_default(),
        );
        for p in &run.metrics.failed_points {
            println!("  failed point {p}");
        }
    }
    println!("manifest: {} ({})", r.manifest_path.display(), m.status);
    r.exit_code()
}

fn validate(path: &PathBuf) -> Result<(), CliError> {
    match read_source(path)? {
        Source::Config(c) => {
            let plan = Plan::new(c, &base_dir(path))?;
            let r = plan.realized();
            println!(
                "ok: {} on N = {} (tau {:e}), N_x = {} (h {:e})",
                plan.setup.model.name(),
                r.n,
                r.tau,
                r.image_n,
                r.h
            );
            for a in &plan.assumptions {
                println!("assumption: {a}");
            }
        }
        Source::Preset { figure, .. } => println!("ok: manifest of preset {}", figure.as_str()),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run { config } => run_path(config).map(|r| report(&r)),
        Command::Preset { figure, out } => run_preset(*figure, out, PresetScale::REFERENCE).map(|r| report(&r)),
        Command::Validate { config } => validate(config).map(|_| 0),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
