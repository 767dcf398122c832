//! `jetlct`: jet equations, exact monomial-ideal thresholds, jet dimensions,
//! finite-field estimates, and the randomized property harness.
//!
//! Exit codes: 0 success, 1 usage or internal cross-check failure, 2 parse
//! error, 3 non-monomial input on an exact path, 4 oracle budget exhausted,
//! 5 property violations found.

mod render;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use jetlct_core::fp::{self, OracleError, DEFAULT_BUDGET};
use jetlct_core::jet::{self, JetConvention};
use jetlct_core::jet_dim;
use jetlct_core::newton;
use jetlct_core::parse_ideal;
use jetlct_core::poly::{Ideal, PolyError};
use jetlct_core::theorems::{self, PropertyKind, TrialConfig};
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "jetlct",
    version,
    about = "Jet schemes and log canonical thresholds of affine subschemes"
)]
struct Cli {
    /// Worker threads for parallel-capable operations (default: available
    /// parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args)]
struct InputArgs {
    /// Inline ideal text (generators separated by `;` or newlines).
    #[arg(long, conflicts_with = "file")]
    ideal: Option<String>,

    /// Path of a file holding the ideal text.
    #[arg(long)]
    file: Option<PathBuf>,

    /// Comma-separated variable names fixing the variable order; default is
    /// first-appearance order.
    #[arg(long, value_delimiter = ',')]
    vars: Option<Vec<String>>,
}

impl InputArgs {
    fn read(&self) -> Result<Ideal, Failure> {
        let text = match (&self.ideal, &self.file) {
            (Some(inline), None) => inline.clone(),
            (None, Some(path)) => std::fs::read_to_string(path).map_err(|e| Failure {
                code: 1,
                message: format!("cannot read {}: {e}", path.display()),
            })?,
            _ => {
                return Err(Failure {
                    code: 1,
                    message: "exactly one of --ideal or --file is required".into(),
                })
            }
        };
        parse_ideal(&text, self.vars.as_deref()).map_err(|e| Failure {
            code: 2,
            message: format!("parse error: {e}"),
        })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print the level-m jet system of an ideal.
    JetIdeal {
        #[command(flatten)]
        input: InputArgs,
        /// Jet level m.
        #[arg(long)]
        level: u32,
        /// Which presentation of the jet equations to build.
        #[arg(long, value_enum, default_value = "derivation")]
        convention: ConventionArg,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Exact log canonical threshold of a monomial ideal.
    Lct {
        #[command(flatten)]
        input: InputArgs,
        /// Cross-check the threshold through the jet-dimension formula and
        /// fail loudly on any mismatch.
        #[arg(long)]
        via_jets: bool,
        /// Level cap for the jet cross-check.
        #[arg(long, default_value_t = 60)]
        jet_cap: u64,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Exact jet-scheme dimensions of a monomial ideal.
    JetDim {
        #[command(flatten)]
        input: InputArgs,
        /// Single level to solve.
        #[arg(long, conflicts_with = "sweep")]
        level: Option<u64>,
        /// Solve every level up to this cap.
        #[arg(long)]
        sweep: Option<u64>,
        /// Restrict to the fiber over the origin.
        #[arg(long)]
        fiber_origin: bool,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Finite-field arc counts and threshold estimate for any ideal.
    Estimate {
        #[command(flatten)]
        input: InputArgs,
        /// Primes to count over (repeatable).
        #[arg(long = "prime", default_values_t = vec![5u64, 7u64])]
        primes: Vec<u64>,
        /// Count levels 0..=m.
        #[arg(long, default_value_t = 8)]
        levels: u32,
        /// Restrict to arcs through the origin.
        #[arg(long)]
        fiber_origin: bool,
        /// Cap on materialized candidates per prime (default 10^8; the
        /// JETLCT_BUDGET environment variable overrides the default).
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Randomized property checks of the threshold identities.
    Check {
        /// product | intersection | bounds | monotonic | restriction | all
        #[arg(long)]
        property: String,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        trials: u64,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ConventionArg {
    Derivation,
    Coefficient,
}

impl From<ConventionArg> for JetConvention {
    fn from(value: ConventionArg) -> JetConvention {
        match value {
            ConventionArg::Derivation => JetConvention::Derivation,
            ConventionArg::Coefficient => JetConvention::Coefficient,
        }
    }
}

struct Failure {
    code: i32,
    message: String,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            std::process::exit(code);
        }
    };
    let threads = cli
        .threads
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
        .max(1);
    match run(cli.command, threads) {
        Ok(()) => {}
        Err(failure) => {
            if !failure.message.is_empty() {
                eprintln!("jetlct: {}", failure.message);
            }
            std::process::exit(failure.code);
        }
    }
}

fn monomial_input(ideal: &Ideal) -> Result<jetlct_core::MonomialIdeal, Failure> {
    ideal.as_monomial_ideal().map_err(|e| match e {
        PolyError::NotMonomial { .. } => Failure {
            code: 3,
            message: format!("{e}; use `jetlct estimate` for non-monomial ideals"),
        },
        other => Failure {
            code: 1,
            message: other.to_string(),
        },
    })
}

fn unit_ideal_failure() -> Failure {
    Failure {
        code: 1,
        message: "the unit ideal cuts out the empty subscheme; its threshold is infinite".into(),
    }
}

fn run(command: Command, threads: usize) -> Result<(), Failure> {
    match command {
        Command::JetIdeal {
            input,
            level,
            convention,
            format,
        } => {
            let ideal = input.read()?;
            let system = jet::build_jet_system(&ideal, level, convention.into());
            match format {
                Format::Text => print!("{}", render::jet_system_text(&system)),
                Format::Json => println!("{}", render::jet_system_json(&system)),
            }
            Ok(())
        }
        Command::Lct {
            input,
            via_jets,
            jet_cap,
            format,
        } => {
            let ideal = input.read()?;
            let mi = monomial_input(&ideal)?;
            let cert = newton::lct_monomial(&mi).map_err(|_| unit_ideal_failure())?;
            let jet_cert = if via_jets {
                let required = jet_dim::certificate_level(&cert);
                if required > jet_cap {
                    eprintln!(
                        "jetlct: certificate level {required} exceeds --jet-cap {jet_cap}; \
                         skipping the jet cross-check"
                    );
                    None
                } else {
                    match jet_dim::lct_via_jets(&mi, jet_cap) {
                        Ok(jet_cert) => {
                            if jet_cert.lct != cert.lct {
                                return Err(Failure {
                                    code: 1,
                                    message: format!(
                                        "jet cross-check mismatch: {} vs {}",
                                        jet_cert.lct, cert.lct
                                    ),
                                });
                            }
                            Some(jet_cert)
                        }
                        Err(err) => {
                            return Err(Failure {
                                code: 1,
                                message: format!("jet cross-check failed: {err}"),
                            })
                        }
                    }
                }
            } else {
                None
            };
            match format {
                Format::Text => print!("{}", render::lct_text(&cert, jet_cert.as_ref())),
                Format::Json => println!("{}", render::lct_json(&cert, jet_cert.as_ref())),
            }
            Ok(())
        }
        Command::JetDim {
            input,
            level,
            sweep,
            fiber_origin,
            format,
        } => {
            let ideal = input.read()?;
            let mi = monomial_input(&ideal)?;
            let reports = match (level, sweep) {
                (Some(m), None) => vec![jet_dim::jet_dim_monomial(&mi, m, fiber_origin)],
                (None, Some(cap)) => (0..=cap)
                    .map(|m| jet_dim::jet_dim_monomial(&mi, m, fiber_origin))
                    .collect(),
                _ => {
                    return Err(Failure {
                        code: 1,
                        message: "exactly one of --level or --sweep is required".into(),
                    })
                }
            };
            match format {
                Format::Text => print!("{}", render::jet_dim_text(&reports)),
                Format::Json => println!("{}", render::jet_dim_json(&reports, sweep.is_some())),
            }
            Ok(())
        }
        Command::Estimate {
            input,
            primes,
            levels,
            fiber_origin,
            budget,
            format,
        } => {
            let ideal = input.read()?;
            let budget = budget.unwrap_or_else(budget_from_env);
            match fp::estimate_lct(&ideal, &primes, levels, fiber_origin, budget, threads) {
                Ok(report) => {
                    match format {
                        Format::Text => print!("{}", render::estimate_text(&report)),
                        Format::Json => println!("{}", render::estimate_json(&report)),
                    }
                    Ok(())
                }
                Err(OracleError::BudgetExceeded { partial }) => {
                    match format {
                        Format::Text => print!("{}", render::partial_count_text(&partial)),
                        Format::Json => println!("{}", render::partial_count_json(&partial)),
                    }
                    Err(Failure {
                        code: 4,
                        message: format!(
                            "budget of {budget} candidates exhausted after {} levels at prime {}",
                            partial.levels.len(),
                            partial.prime
                        ),
                    })
                }
                Err(err) => Err(Failure {
                    code: 1,
                    message: err.to_string(),
                }),
            }
        }
        Command::Check {
            property,
            seed,
            trials,
            format,
        } => {
            let Some(kind) = PropertyKind::parse(&property) else {
                return Err(Failure {
                    code: 1,
                    message: format!(
                        "unknown property `{property}` (expected product, intersection, \
                         bounds, monotonic, restriction, or all)"
                    ),
                });
            };
            let cfg = TrialConfig::new(seed, trials);
            let violations = theorems::run(kind, &cfg);
            match format {
                Format::Text => print!("{}", render::check_text(&property, &cfg, &violations)),
                Format::Json => println!("{}", render::check_json(&property, &cfg, &violations)),
            }
            if violations.is_empty() {
                Ok(())
            } else {
                Err(Failure {
                    code: 5,
                    message: format!("{} property violations", violations.len()),
                })
            }
        }
    }
}

fn budget_from_env() -> u64 {
    std::env::var("JETLCT_BUDGET")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_BUDGET)
}
