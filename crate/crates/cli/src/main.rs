mod render;

use chorreal_core::checkers::{check_realisable, check_realisable_synch, check_subtype, Bounds, DEFAULT_BOUND};
use chorreal_core::complement::{verify_complement, ComplementMethod};
use chorreal_core::global::{is_commutation_closed, product, project, CfsmSystem, GlobalType};
use chorreal_core::models::CommModel;
use chorreal_core::oracle::explore;
use chorreal_core::Error;
use clap::{Args, Parser, Subcommand};
use render::Format;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const EXIT_HOLDS: u8 = 0;
const EXIT_FAILS: u8 = 1;
const EXIT_INCONCLUSIVE: u8 = 2;
const EXIT_USAGE: u8 = 64;
const EXIT_DATA: u8 = 65;

/// Realisability, subtyping and complementation of global types.
#[derive(Parser)]
#[command(name = "chorreal", version)]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Args, Clone, Copy)]
struct Output {
    /// Machine-readable JSON output.
    #[arg(long, conflicts_with = "dot")]
    json: bool,
    /// Graphviz output.
    #[arg(long)]
    dot: bool,
}

impl Output {
    fn format(self) -> Format {
        match (self.json, self.dot) {
            (true, _) => Format::Json,
            (_, true) => Format::Dot,
            _ => Format::Text,
        }
    }
}

#[derive(Subcommand)]
enum Verb {
    /// Parse a global type and print its minimal automaton.
    Parse {
        file: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// Project a global type onto one machine per process.
    Project {
        file: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// Synchronous product of a system, or of the projections of a type.
    Product {
        file: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// Build a complement of a global type.
    Complement {
        file: PathBuf,
        /// dual, product-dual or renunciation.
        #[arg(long, default_value = "dual")]
        method: ComplementMethod,
        /// Write the complement (JSON automaton) to this file.
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        out: Output,
    },
    /// Check a claimed complement against every small synchronous MSC.
    VerifyComplement {
        file: PathBuf,
        complement: PathBuf,
        #[arg(long, default_value_t = 4)]
        max_arrows: usize,
        #[arg(long)]
        json: bool,
    },
    /// Decide subtyping or realisability.
    Check {
        #[command(subcommand)]
        property: Property,
    },
    /// Enumerate the bounded executions of a system.
    Explore {
        /// A system (JSON with `machines`) or a global type, which is projected.
        file: PathBuf,
        #[arg(long, default_value = "p2p")]
        model: CommModel,
        #[arg(long, default_value_t = 12)]
        steps: usize,
        #[arg(long)]
        channel_bound: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Re-export a global type or system as JSON or DOT.
    Export {
        file: PathBuf,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Subcommand)]
enum Property {
    /// Whether the left type is a subtype of the right one.
    Subtype {
        lhs: PathBuf,
        rhs: PathBuf,
        /// A method name or a file holding a complement of the right type.
        #[arg(long, default_value = "dual")]
        complement_of_rhs: String,
        #[arg(long)]
        json: bool,
    },
    /// Whether the projections of a type implement it without deadlock.
    Realisable {
        file: PathBuf,
        #[arg(long, default_value = "p2p")]
        model: CommModel,
        /// A method name or a file holding a complement of the type.
        #[arg(long, default_value = "dual")]
        complement: String,
        /// Messages per channel in the bounded checks.
        #[arg(long)]
        bound: Option<usize>,
        #[arg(long)]
        json: bool,
    },
}

enum Failure {
    Usage(String),
    Data(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_parse_error() {
            Failure::Data(e.to_string())
        } else {
            Failure::Usage(e.to_string())
        }
    }
}

type Outcome = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_HOLDS };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.verb) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Data(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_DATA)
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

fn load_type(path: &Path) -> Result<GlobalType, Failure> {
    let src = read(path)?;
    GlobalType::load(&src).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

enum Input {
    Type(GlobalType),
    System(CfsmSystem),
}

fn load_any(path: &Path) -> Result<Input, Failure> {
    let src = read(path)?;
    let is_system = serde_json::from_str::<serde_json::Value>(&src)
        .map(|v| v.get("machines").is_some())
        .unwrap_or(false);
    let parsed = if is_system {
        CfsmSystem::from_json_str(&src).map(Input::System)
    } else {
        GlobalType::load(&src).map(Input::Type)
    };
    parsed.map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

/// The complement named by `choice`, and whether it is commutation-closed.
fn complement_of(g: &GlobalType, choice: &str) -> Result<(GlobalType, bool), Failure> {
    match choice.parse::<ComplementMethod>() {
        Ok(method) => Ok((method.apply(g)?, method == ComplementMethod::Dual)),
        Err(_) => {
            let c = load_type(Path::new(choice))?;
            let closed = is_commutation_closed(&c);
            Ok((c, closed))
        }
    }
}

fn default_bound() -> Result<usize, Failure> {
    match std::env::var("CHORREAL_DEFAULT_BOUND") {
        Ok(v) => v
            .parse()
            .map_err(|_| Failure::Usage(format!("CHORREAL_DEFAULT_BOUND must be a number, got `{v}`"))),
        Err(_) => Ok(DEFAULT_BOUND),
    }
}

fn run(verb: Verb) -> Outcome {
    match verb {
        Verb::Parse { file, out } => {
            print!("{}", render::global_type(&load_type(&file)?.normalized(), out.format()));
            Ok(EXIT_HOLDS)
        }
        Verb::Project { file, out } => {
            print!("{}", render::system(&project(&load_type(&file)?), out.format()));
            Ok(EXIT_HOLDS)
        }
        Verb::Product { file, out } => {
            let sys = match load_any(&file)? {
                Input::Type(g) => project(&g),
                Input::System(s) => s,
            };
            print!(
                "{}",
                render::global_type(&product(&sys, None)?.normalized(), out.format())
            );
            Ok(EXIT_HOLDS)
        }
        Verb::Complement {
            file,
            method,
            output,
            out,
        } => {
            let c = method.apply(&load_type(&file)?)?;
            match output {
                Some(path) => std::fs::write(&path, render::global_type(&c, Format::Json))
                    .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?,
                None => print!("{}", render::global_type(&c, out.format())),
            }
            Ok(EXIT_HOLDS)
        }
        Verb::VerifyComplement {
            file,
            complement,
            max_arrows,
            json,
        } => {
            let report = verify_complement(&load_type(&file)?, &load_type(&complement)?, max_arrows)?;
            print!("{}", render::complement_report(&report, json));
            Ok(if report.holds() { EXIT_HOLDS } else { EXIT_FAILS })
        }
        Verb::Check {
            property:
                Property::Subtype {
                    lhs,
                    rhs,
                    complement_of_rhs,
                    json,
                },
        } => {
            let (g1, g2) = (load_type(&lhs)?, load_type(&rhs)?);
            let (comp, closed) = complement_of(&g2, &complement_of_rhs)?;
            let v = check_subtype(&g1, &g2, &comp, closed)?;
            print!("{}", render::subtype(&v, json));
            Ok(if v.subtype { EXIT_HOLDS } else { EXIT_FAILS })
        }
        Verb::Check {
            property:
                Property::Realisable {
                    file,
                    model,
                    complement,
                    bound,
                    json,
                },
        } => {
            let g = load_type(&file)?;
            let (comp, _) = complement_of(&g, &complement)?;
            let v = match model {
                CommModel::Synch => check_realisable_synch(&g, &comp)?,
                _ => {
                    let channel = bound.map_or_else(default_bound, Ok)?;
                    check_realisable(
                        &g,
                        model,
                        &comp,
                        Bounds {
                            channel,
                            ..Bounds::default()
                        },
                    )?
                }
            };
            print!("{}", render::realisability(&v, model, json));
            Ok(match (v.realisable, v.truncated) {
                (true, false) => EXIT_HOLDS,
                (true, true) => EXIT_INCONCLUSIVE,
                (false, _) => EXIT_FAILS,
            })
        }
        Verb::Explore {
            file,
            model,
            steps,
            channel_bound,
            json,
        } => {
            let sys = match load_any(&file)? {
                Input::Type(g) => project(&g),
                Input::System(s) => s,
            };
            let bound = channel_bound.map_or_else(default_bound, Ok)?;
            let report = explore(&sys, model, steps, bound);
            print!("{}", render::exploration(&report, json));
            Ok(EXIT_HOLDS)
        }
        Verb::Export { file, out } => {
            let format = if out.dot { Format::Dot } else { Format::Json };
            match load_any(&file)? {
                Input::Type(g) => print!("{}", render::global_type(&g, format)),
                Input::System(s) => print!("{}", render::system(&s, format)),
            }
            Ok(EXIT_HOLDS)
        }
    }
}
