use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::output::Format;

#[derive(Debug, Parser)]
#[command(
    name = "planar-squeeze",
    version,
    about = "Planar spin squeezing bounds, states and witnesses"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Output file (stdout when omitted)
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    pub format: Format,

    /// Seed for randomized solver paths
    #[arg(long, default_value_t = 0, global = true)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// C_J by exact minimization, direct minimization and the large-J fit
    Bounds {
        /// Spin values: `50`, `0.5,1,2` or a range `0.5..7`
        #[arg(long, allow_hyphen_values = true)]
        j: String,
        /// Step for `a..b` ranges
        #[arg(long, default_value_t = 0.5)]
        step: f64,
        /// Random restarts of the direct minimization
        #[arg(long, default_value_t = 8)]
        restarts: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Moments of the state that reaches C_J
    State {
        #[arg(long, allow_hyphen_values = true)]
        j: String,
        #[command(flatten)]
        common: Common,
    },
    /// Ground-state variances of the double-well condensate over Ng/kappa
    Bec {
        /// Number of atoms
        #[arg(long)]
        n: u32,
        /// Ratio range `a:b` or `a:b:steps`
        #[arg(long, allow_hyphen_values = true, default_value = "-3:-1:201")]
        range: String,
        #[command(flatten)]
        common: Common,
    },
    /// Phase uncertainty against the phase offset, or its minimum against J
    Phase {
        #[arg(long, allow_hyphen_values = true)]
        j: String,
        #[arg(long, default_value_t = 0.5)]
        step: f64,
        /// Number of intervals on [0, pi]
        #[arg(long, default_value_t = 64)]
        grid: usize,
        /// Input state family
        #[arg(long, value_enum, default_value_t = StateKind::Optimal)]
        input: StateKind,
        /// Emit `j,delta_phi_min` even for a single J
        #[arg(long)]
        scaling: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Planar-variance witness of Werner-mixed singlets against noise
    Witness {
        #[arg(long, allow_hyphen_values = true)]
        j: String,
        #[arg(long, default_value_t = 0.5)]
        step: f64,
        /// Number of sites
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Noise grid `a:b:step`
        #[arg(long, default_value = "0:1:0.01")]
        pn: String,
        #[command(flatten)]
        common: Common,
    },
}

impl Command {
    pub fn common(&self) -> &Common {
        match self {
            Command::Bounds { common, .. }
            | Command::State { common, .. }
            | Command::Bec { common, .. }
            | Command::Phase { common, .. }
            | Command::Witness { common, .. } => common,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum StateKind {
    Optimal,
    Coherent,
}

/// Parses `50`, `0.5,1,2` or `a..b` (stepped by `step`) into J values.
pub fn parse_j_list(s: &str, step: f64) -> Result<Vec<f64>, String> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once("..") {
        let a = parse_f64(a)?;
        let b = parse_f64(b)?;
        if !(step > 0.0) {
            return Err(format!("step must be positive, got {step}"));
        }
        if b < a {
            return Err(format!("empty range {s}"));
        }
        let n = ((b - a) / step + 1e-9).floor() as usize;
        return Ok((0..=n).map(|k| a + k as f64 * step).collect());
    }
    s.split(',').map(parse_f64).collect()
}

/// Parses `a:b` or `a:b:steps` into an inclusive range and a point count.
pub fn parse_ratio_range(s: &str) -> Result<(f64, f64, usize), String> {
    let parts: Vec<&str> = s.split(':').collect();
    let steps = match parts.len() {
        2 => 201,
        3 => parts[2]
            .trim()
            .parse::<usize>()
            .map_err(|e| format!("bad step count {:?}: {e}", parts[2]))?,
        _ => return Err(format!("expected a:b or a:b:steps, got {s:?}")),
    };
    let (a, b) = (parse_f64(parts[0])?, parse_f64(parts[1])?);
    if !(a < b) {
        return Err(format!("range start must be below its end, got {s:?}"));
    }
    if steps < 2 {
        return Err(format!("need at least 2 points, got {steps}"));
    }
    Ok((a, b, steps))
}

/// Parses `a:b:step` into the grid a, a+step, ... up to b inclusive.
pub fn parse_stepped_grid(s: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("expected a:b:step, got {s:?}"));
    }
    let (a, b, h) = (parse_f64(parts[0])?, parse_f64(parts[1])?, parse_f64(parts[2])?);
    if !(h > 0.0) || b < a {
        return Err(format!("bad grid {s:?}"));
    }
    let n = ((b - a) / h + 1e-9).floor() as usize;
    Ok((0..=n).map(|k| (a + k as f64 * h).min(b)).collect())
}

fn parse_f64(s: &str) -> Result<f64, String> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|e| format!("bad number {:?}: {e}", s.trim()))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("non-finite number {s:?}"))
    }
}
