use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use hochfed::endo::build_gamma_e;
use hochfed::fedosov::FedosovOperator;
use hochfed::form::format_term;
use hochfed::graded::todd_coefficients;
use hochfed::harness::{run_suites, Format, InstanceConfig};
use hochfed::rational;

#[derive(Parser)]
#[command(name = "hochfed", version, about = "Exact verifier for Fedosov-twisted Hochschild trace maps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Run verification suites on an instance.
    Verify {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum, default_value = "json")]
        format: OutFormat,
        /// Restrict to these suites (repeatable); defaults to the config's list.
        #[arg(long = "suite")]
        suites: Vec<String>,
        /// Include per-check wall-clock times in JSON output.
        #[arg(long)]
        timings: bool,
    },
    /// Print the Taylor coefficients α_1..α_K of x/(e^x - 1).
    Todd {
        #[arg(long)]
        order: usize,
    },
    /// Print the Fedosov correction A and the twisting form γ.
    Fedosov {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        dump: bool,
    },
}

fn config_error(e: impl std::fmt::Display) -> ExitCode {
    eprintln!("{e}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Verify { config, format, suites, timings } => {
            let mut cfg = match InstanceConfig::load(&config) {
                Ok(c) => c,
                Err(e) => return config_error(e),
            };
            if !suites.is_empty() {
                cfg.suites = suites;
                if let Err(e) = cfg.validate() {
                    return config_error(e);
                }
            }
            let report = run_suites(&cfg);
            let format = match format {
                OutFormat::Json => Format::Json,
                OutFormat::Text => Format::Text,
            };
            print!("{}", report.render(format, timings));
            ExitCode::from(report.exit_code() as u8)
        }
        Command::Todd { order } => {
            for (k, a) in todd_coefficients(order).coeffs.iter().enumerate() {
                println!("alpha_{} = {}", k + 1, rational::format(a));
            }
            ExitCode::SUCCESS
        }
        Command::Fedosov { config, dump } => {
            let cfg = match InstanceConfig::load(&config) {
                Ok(c) => c,
                Err(e) => return config_error(e),
            };
            let built =
                cfg.christoffel().and_then(|g| FedosovOperator::build(g, cfg.n, Some(cfg.n_rep()))).and_then(|op| {
                    let gamma = build_gamma_e(&op, &cfg.connection()?)?;
                    Ok((op, gamma))
                });
            let (op, gamma) = match built {
                Ok(x) => x,
                Err(e) => {
                    eprintln!("{e}");
                    return ExitCode::from(1);
                }
            };
            let a = op.correction();
            println!("A: {} terms", a.term_count());
            println!("gamma: {} terms", gamma.value().term_count());
            if dump {
                for (l, c) in a.components().iter().enumerate() {
                    for (k, v) in c.terms() {
                        println!("A^{}\t{}", l + 1, format_term(k, v));
                    }
                }
                let r = cfg.r;
                for i in 0..r {
                    for j in 0..r {
                        for (k, v) in gamma.value().get(i, j).terms() {
                            println!("gamma[{},{}]\t{}", i + 1, j + 1, format_term(k, v));
                        }
                    }
                }
            }
            ExitCode::SUCCESS
        }
    }
}
