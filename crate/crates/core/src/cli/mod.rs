//! Command-line front end of the `ou-x` binary.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical failure.

pub mod commands;
pub mod config;
pub mod expr;
pub mod output;
pub mod presets;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::Error;
use config::Settings;

#[derive(Debug, Parser)]
#[command(
    name = "ou-x",
    version,
    about = "Barrier crossing probabilities of Ornstein-Uhlenbeck processes"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Survival, density or hazard of a single first passage.
    Fpt(Flags),
    /// Joint crossing probability over consecutive intervals.
    Joint(Flags),
    /// Time change of an inhomogeneous OU process and the method verdict.
    Transform(Flags),
    /// Built-in experiments: table1, table2, fig1, fig2, fig4, fig5, fig6, fig7, fig8, fig10.
    Presets {
        name: String,
        #[command(flatten)]
        flags: Flags,
    },
}

macro_rules! flags {
    ($($field:ident),* $(,)?) => {
        /// Every configuration key as a flag; values override the config file.
        #[derive(Debug, Args)]
        struct Flags {
            /// INI file with the same keys.
            #[arg(long)]
            config: Option<PathBuf>,
            /// Worker threads (falls back to OUX_THREADS).
            #[arg(long, env = "OUX_THREADS")]
            threads: Option<usize>,
            $(
                #[arg(long, allow_hyphen_values = true)]
                $field: Option<String>,
            )*
        }

        impl Flags {
            fn overrides(&self) -> Vec<(String, String)> {
                let mut v = Vec::new();
                $(
                    if let Some(x) = &self.$field {
                        v.push((stringify!($field).to_string(), x.clone()));
                    }
                )*
                v
            }
        }
    };
}

flags!(
    a, alpha0, b, barrier, barriers, beta0, direction, grid_l, grid_max, grid_min, horizon,
    inner_j, k_terms, lambda, method, mu, out, paths, points, quantity, replicates, samples, seed,
    segments, sets, sigma, steps, t_max, t_points, times, timing, window, x, y0, z0,
);

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::Domain(_) | Error::GridTooNarrow { .. } => 2,
        _ => 3,
    }
}

fn execute(command: &str, preset: Option<&str>, flags: &Flags) -> Result<(), Error> {
    let mut overrides = flags.overrides();
    if let Some(n) = flags.threads {
        overrides.push(("threads".into(), n.to_string()));
    }
    let mut s = Settings::load(flags.config.as_deref(), overrides)?;
    if let Some(n) = s.usize_opt("threads")? {
        // the pool can only be set once per process; a second call is harmless
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .ok();
    }
    let table = match (command, preset) {
        ("fpt", _) => commands::cmd_fpt(&mut s)?,
        ("joint", _) => commands::cmd_joint(&mut s)?,
        ("transform", _) => commands::cmd_transform(&mut s)?,
        (_, Some(name)) => presets::run_preset(name, &mut s)?,
        _ => unreachable!(),
    };
    let out = s.str("out").map(str::to_string);
    let label = match preset {
        Some(p) => format!("presets {p}"),
        None => command.to_string(),
    };
    table.emit(&label, &s, out.as_deref())
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            e.print().ok();
            return code;
        }
    };
    let result = match &cli.cmd {
        Cmd::Fpt(f) => execute("fpt", None, f),
        Cmd::Joint(f) => execute("joint", None, f),
        Cmd::Transform(f) => execute("transform", None, f),
        Cmd::Presets { name, flags } => execute("presets", Some(name), flags),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("ou-x: {e}");
            exit_code(&e)
        }
    }
}
