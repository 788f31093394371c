//! `germtools`: command-line front end for the germ toolkit.

mod commands;
mod input;
mod record;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use input::Document;

#[derive(Parser, Debug)]
#[command(name = "germtools", version, about = "Germs of finite maps, hypersurfaces and foliations")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Number of source (and target) variables.
    #[arg(long, global = true)]
    dim: Option<String>,
    /// File of `key = value` lines; flags given on the command line win.
    #[arg(long, global = true, value_name = "PATH")]
    input: Option<PathBuf>,
    /// Emit line-delimited JSON records instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Record wall-clock timings (makes output nondeterministic).
    #[arg(long, global = true)]
    timing: bool,
    /// Override the global total-degree cap.
    #[arg(long = "max-degree", global = true, value_name = "D")]
    max_degree: Option<u32>,
}

#[derive(Args, Debug, Default)]
struct Objects {
    /// Map components in x1..xn, comma separated.
    #[arg(long)]
    map: Option<String>,
    /// Defining polynomial in y1..yn.
    #[arg(long)]
    hypersurface: Option<String>,
    /// A 1-form in y1..yn, e.g. "y2 dy1 + y1 dy2".
    #[arg(long)]
    form: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Reduced preimage of a hypersurface and its singularity verdict.
    Preimage {
        #[command(flatten)]
        objects: Objects,
    },
    /// Pullback of a foliation, made primitive, and its verdict.
    PullbackFoliation {
        #[command(flatten)]
        objects: Objects,
    },
    /// Ideal of the singular locus of a hypersurface.
    SingularLocus {
        #[command(flatten)]
        objects: Objects,
    },
    /// Whether the origin is an isolated zero of the map.
    FiniteCheck {
        #[command(flatten)]
        objects: Objects,
    },
    /// Pushforward of a polynomial in x1..xn along the map.
    Trace {
        #[command(flatten)]
        objects: Objects,
        /// Polynomial in x1..xn to push forward.
        #[arg(long)]
        poly: Option<String>,
    },
    /// Whether a hypersurface is invariant for a form: dψ ∧ ω = 0.
    Tangency {
        #[command(flatten)]
        objects: Objects,
    },
    /// Solve α ∧ η = τ for the 1-form η = Σ a_i(g) dx_i.
    KoszulLift {
        #[command(flatten)]
        objects: Objects,
        /// Coefficients a_1..a_n in y1..yn, comma separated.
        #[arg(long)]
        coeffs: Option<String>,
        /// An (n-1)-form in x1..xn, or an index l in 2..n selecting τ_l.
        /// Without it every τ_l is lifted.
        #[arg(long)]
        tau: Option<String>,
        /// Degree bound for the coefficients of α; escalates when absent.
        #[arg(long)]
        bound: Option<u32>,
        /// Report vanishing orders for component I and derivative L (1-based)
        /// instead of lifting.
        #[arg(long, value_name = "I,L")]
        order: Option<String>,
    },
    /// Cut a hypersurface and its preimage by a hyperplane Σ c_i y_i = t.
    Slice {
        #[command(flatten)]
        objects: Objects,
        /// Normal vector c, comma separated rationals.
        #[arg(long)]
        normal: Option<String>,
        /// Offset t; when absent the offsets 1, 2, -1 are sampled.
        #[arg(long, allow_hyphen_values = true)]
        offset: Option<String>,
    },
    /// Check both preservation theorems on seeded random instances.
    Fuzz {
        #[arg(long, default_value_t = 50)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Maximum degree of generated polynomials.
        #[arg(long, default_value_t = 3)]
        degree: u32,
        /// Expected number of random terms per polynomial.
        #[arg(long, default_value_t = 2)]
        density: u32,
        /// Run instances one after another instead of on the thread pool.
        #[arg(long)]
        sequential: bool,
    },
}

/// Failure classes, mapped onto exit statuses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Validation,
    Internal,
}

#[derive(Debug, Clone)]
pub struct CliError {
    pub class: ErrorClass,
    pub message: String,
}

impl CliError {
    pub fn validation(message: impl Into<String>) -> Self {
        CliError { class: ErrorClass::Validation, message: message.into() }
    }

    pub fn internal(message: impl Into<String>) -> Self {
        CliError { class: ErrorClass::Internal, message: message.into() }
    }

    fn exit_code(&self) -> ExitCode {
        match self.class {
            ErrorClass::Validation => ExitCode::from(1),
            ErrorClass::Internal => ExitCode::from(2),
        }
    }

    /// `error: <class>: <message>` on one line.
    fn line(&self) -> String {
        let class = match self.class {
            ErrorClass::Validation => "validation",
            ErrorClass::Internal => "internal",
        };
        let message = self.message.split_whitespace().collect::<Vec<_>>().join(" ");
        format!("error: {class}: {message}")
    }
}

fn document(common: &Common, objects: Option<&Objects>) -> Result<Document, CliError> {
    let mut doc = match &common.input {
        Some(path) => Document::load(path)?,
        None => Document::default(),
    };
    doc.set("dim", common.dim.as_ref());
    if let Some(o) = objects {
        doc.set("map", o.map.as_ref());
        doc.set("hypersurface", o.hypersurface.as_ref());
        doc.set("form", o.form.as_ref());
    }
    Ok(doc)
}

fn run(cli: Cli) -> Result<Vec<record::Record>, CliError> {
    let common = &cli.common;
    if let Some(cap) = common.max_degree {
        if cap == 0 {
            return Err(CliError::validation("--max-degree must be positive"));
        }
        germtools::poly::set_degree_cap(cap);
    }
    let timing = common.timing;
    match &cli.command {
        Command::Preimage { objects } => commands::preimage(&document(common, Some(objects))?, timing),
        Command::PullbackFoliation { objects } => {
            commands::pullback(&document(common, Some(objects))?, timing)
        }
        Command::SingularLocus { objects } => commands::singular_locus(&document(common, Some(objects))?, timing),
        Command::FiniteCheck { objects } => commands::finite_check(&document(common, Some(objects))?, timing),
        Command::Trace { objects, poly } => {
            let mut doc = document(common, Some(objects))?;
            doc.set("poly", poly.as_ref());
            commands::trace(&doc, timing)
        }
        Command::Tangency { objects } => commands::tangency(&document(common, Some(objects))?, timing),
        Command::KoszulLift { objects, coeffs, tau, bound, order } => {
            let mut doc = document(common, Some(objects))?;
            doc.set("coeffs", coeffs.as_ref());
            doc.set("tau", tau.as_ref());
            commands::koszul_lift(&doc, *bound, order.as_deref(), timing)
        }
        Command::Slice { objects, normal, offset } => {
            let mut doc = document(common, Some(objects))?;
            doc.set("normal", normal.as_ref());
            doc.set("offset", offset.as_ref());
            commands::slice(&doc, timing)
        }
        Command::Fuzz { count, seed, degree, density, sequential } => {
            let doc = document(common, None)?;
            let options = commands::FuzzArgs {
                count: *count,
                seed: *seed,
                degree: *degree,
                density: *density,
                sequential: *sequential,
            };
            commands::fuzz(&doc, &options, timing, common.json)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand {
                eprint!("{e}");
                return ExitCode::from(1);
            }
            let first = e.to_string().lines().next().unwrap_or("invalid arguments").trim_start_matches("error: ").to_string();
            eprintln!("{}", CliError::validation(format!("arguments: {first}")).line());
            return ExitCode::from(1);
        }
    };
    let json = cli.common.json;
    match run(cli) {
        Ok(records) => {
            let mut violation = None;
            for r in &records {
                if json {
                    println!("{}", r.json());
                } else {
                    print!("{}", r.text());
                }
                if violation.is_none() {
                    violation = r.violation();
                }
            }
            match violation {
                Some(e) => {
                    eprintln!("{}", e.line());
                    e.exit_code()
                }
                None => ExitCode::SUCCESS,
            }
        }
        Err(e) => {
            eprintln!("{}", e.line());
            e.exit_code()
        }
    }
}
