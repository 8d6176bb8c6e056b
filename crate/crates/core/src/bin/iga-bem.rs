use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use iga_bem::bench::{checks, emit_outputs, observed_order, Experiment, ExperimentConfig};
use iga_bem::geometry::Builtin;
use iga_bem::space::{dim_splinespace, dim_superspace};

#[derive(Parser)]
#[command(
    name = "iga-bem",
    version,
    about = "Isogeometric single-layer BEM convergence harness"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a convergence sweep described by a configuration file.
    Run {
        #[arg(long)]
        config: Option<PathBuf>,
        /// `key=value` settings overriding the file.
        overrides: Vec<String>,
    },
    /// Print the superspace and spline space dimensions.
    Dims {
        #[arg(long)]
        geometry: Builtin,
        #[arg(long)]
        p: usize,
        #[arg(long)]
        m: u32,
    },
    /// Run the fast self-checks.
    Verify,
}

const CONFIG_ERROR: u8 = 2;

fn run(config: Option<PathBuf>, overrides: &[String]) -> ExitCode {
    let cfg = config.map_or_else(
        || Ok(ExperimentConfig::default()),
        ExperimentConfig::from_file,
    );
    let cfg = cfg.and_then(|mut c| {
        for o in overrides {
            c.apply_override(o)?;
        }
        Ok(c)
    });
    let mut exp = match cfg.and_then(Experiment::new) {
        Ok(e) => e,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(CONFIG_ERROR);
        }
    };
    println!("{}", iga_bem::bench::CSV_HEADER.replace(',', "\t"));
    let summary = exp.run(|p, m, res| match res {
        Ok(r) => println!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{:.3e}\t{}\t{:.2}",
            r.p,
            r.m,
            r.h,
            r.dof,
            r.dof_star,
            r.density_l2_err.map_or("-".into(), |e| format!("{e:.3e}")),
            r.potential_max_err,
            r.iterations,
            r.seconds
        ),
        Err(e) => eprintln!("cell p = {p}, m = {m} failed: {e}"),
    });
    for &p in &exp.config.degrees {
        let fmt = |o: Option<f64>| o.map_or("n/a".to_string(), |o| format!("{o:.2}"));
        println!(
            "p = {p}: potential order {}, density order {}",
            fmt(observed_order(&summary.potential_errors(p))),
            fmt(observed_order(&summary.density_errors(p)))
        );
    }
    if !summary.records.is_empty() {
        match emit_outputs(
            &summary.records,
            &exp.config.out_dir,
            &exp.config.stem(),
            &exp.title(),
        ) {
            Ok((csv, script)) => println!("wrote {} and {}", csv.display(), script.display()),
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::FAILURE;
            }
        }
    }
    if summary.failures.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config, overrides } => run(config, &overrides),
        Command::Dims { geometry, p, m } => {
            let n = geometry.num_patches();
            println!("dof_star {}", dim_superspace(n, p, m));
            println!("dof {}", dim_splinespace(n, p, m));
            ExitCode::SUCCESS
        }
        Command::Verify => {
            let results = checks::quick_checks();
            for c in &results {
                println!(
                    "{} {}: {}",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.detail
                );
            }
            if results.iter().all(|c| c.passed) {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
