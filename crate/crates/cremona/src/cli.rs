//! Argument parsing and dispatch.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::Value;

use crate::commands::{self, OrbitWord, VerifyFlags, VerifyMode};
use crate::error::CliError;
use crate::schema::{ParamsFile, VerifyConfig};

#[derive(Debug, Parser)]
#[command(name = "cremona", version, about = "Weyl group actions on point configurations and their elliptic parametrization")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Queries on the Picard lattice.
    Lattice {
        #[command(subcommand)]
        command: LatticeCommand,
    },
    /// Iterate a word on torus parameters, one JSON line per step.
    Orbit {
        /// Parameter file (JSON).
        #[arg(long)]
        params: PathBuf,
        /// Comma-separated generator indices.
        #[arg(long, allow_hyphen_values = true, conflicts_with = "translation")]
        word: Option<String>,
        /// Use the translation word attached to this simple root.
        #[arg(long)]
        translation: Option<usize>,
        /// Search depth for the translation word.
        #[arg(long, default_value_t = 32)]
        depth: usize,
        /// Number of times the word is applied.
        #[arg(long, default_value_t = 1)]
        steps: usize,
        /// Reject Im tau at or below this value.
        #[arg(long)]
        tau_floor: Option<f64>,
    },
    /// Compare the geometric action with the torus action.
    Verify {
        /// Verification config (JSON).
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config's word.
        #[arg(long, allow_hyphen_values = true)]
        word: Option<String>,
        /// Second word; reports whether both words give the same end state.
        #[arg(long, allow_hyphen_values = true)]
        compare: Option<String>,
        /// Sample the torus parameters instead of reading them.
        #[arg(long)]
        random: bool,
        /// RNG seed for sampled parameters and probes (default: config, then 0).
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum, default_value_t = Mode::Word)]
        mode: Mode,
        /// Number of held-out probe points.
        #[arg(long)]
        probes: Option<usize>,
        /// Pass threshold for the word residual.
        #[arg(long)]
        residual_tol: Option<f64>,
        /// Reject Im tau at or below this value.
        #[arg(long)]
        tau_floor: Option<f64>,
        /// Include wall-clock time in the report (breaks byte-identical output).
        #[arg(long)]
        timing: bool,
    },
}

#[derive(Debug, Subcommand)]
pub enum LatticeCommand {
    /// Apply a word to a divisor class.
    Act {
        #[command(flatten)]
        sig: SigArgs,
        #[arg(long, default_value = "", allow_hyphen_values = true)]
        word: String,
        /// Symbolic class such as "2E - E_1 - E_2".
        #[arg(long, allow_hyphen_values = true)]
        class: String,
    },
    /// Action matrix of a word.
    Matrix {
        #[command(flatten)]
        sig: SigArgs,
        #[arg(long, default_value = "", allow_hyphen_values = true)]
        word: String,
        /// Print the pull-back matrix instead of the push-forward.
        #[arg(long)]
        pullback: bool,
    },
    /// Dynkin diagram of the simple roots.
    Dynkin {
        #[command(flatten)]
        sig: SigArgs,
    },
    /// Orbit of alpha_0 up to a word length.
    Orbit {
        #[command(flatten)]
        sig: SigArgs,
        #[arg(long, default_value_t = 4)]
        depth: usize,
    },
}

#[derive(Debug, clap::Args)]
pub struct SigArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub m: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Word,
    GDecomposition,
    Translation,
}

/// Output of one invocation: text for stdout and the exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub code: i32,
}

fn document(v: &Value) -> String {
    let mut s = serde_json::to_string(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

fn failure(e: &CliError) -> Outcome {
    Outcome { stdout: document(&e.to_json()), code: e.exit_code() }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            return Outcome { stdout: e.to_string(), code: 0 };
        }
        Err(e) => {
            let err = CliError::Parse(e.to_string().trim_end().to_string());
            return failure(&err);
        }
    };
    match cli.command {
        Command::Lattice { command } => {
            let result = match command {
                LatticeCommand::Act { sig, word, class } => commands::lattice_act(sig.n, sig.m, &word, &class),
                LatticeCommand::Matrix { sig, word, pullback } => commands::lattice_matrix(sig.n, sig.m, &word, pullback),
                LatticeCommand::Dynkin { sig } => commands::lattice_dynkin(sig.n, sig.m),
                LatticeCommand::Orbit { sig, depth } => commands::lattice_orbit(sig.n, sig.m, depth),
            };
            match result {
                Ok(v) => Outcome { stdout: document(&v), code: 0 },
                Err(e) => failure(&e),
            }
        }
        Command::Orbit { params, word, translation, depth, steps, tau_floor } => {
            let file: ParamsFile = match read_json(&params) {
                Ok(f) => f,
                Err(e) => return failure(&e),
            };
            let word = match translation {
                Some(root) => OrbitWord::Translation { root, depth },
                None => OrbitWord::Explicit(word.unwrap_or_default()),
            };
            let (lines, err) = commands::orbit_stream(&file, &word, steps, tau_floor.unwrap_or(0.0));
            let mut stdout = String::new();
            for l in &lines {
                stdout.push_str(&serde_json::to_string(l).expect("JSON values always serialize"));
                stdout.push('\n');
            }
            match err {
                None => Outcome { stdout, code: 0 },
                Some(e) => {
                    stdout.push_str(&serde_json::to_string(&e.to_json()).expect("JSON values always serialize"));
                    stdout.push('\n');
                    Outcome { stdout, code: e.exit_code() }
                }
            }
        }
        Command::Verify { config, word, compare, random, seed, mode, probes, residual_tol, tau_floor, timing } => {
            let cfg: VerifyConfig = match read_json(&config) {
                Ok(c) => c,
                Err(e) => return failure(&e),
            };
            let mode = match mode {
                Mode::Word => VerifyMode::Word,
                Mode::GDecomposition => VerifyMode::GDecomposition,
                Mode::Translation => VerifyMode::Translation,
            };
            let flags = VerifyFlags { word, compare, random, seed, probes, residual: residual_tol, tau_floor, timing };
            match commands::verify(&cfg, mode, &flags) {
                Ok((v, pass)) => Outcome { stdout: document(&v), code: if pass { 0 } else { 1 } },
                Err(e) => failure(&e),
            }
        }
    }
}
