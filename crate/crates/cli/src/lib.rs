//! Command-line front end: argument parsing, the per-command row types and
//! CSV/JSON emission.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod args;
pub mod commands;
pub mod output;

use args::{parse_j_list, parse_ratio_range, parse_stepped_grid, Command};
use commands::{CmdResult, CommandError};
use output::{render, write_output};

/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "PLANAR_SQUEEZE_THREADS";

pub fn configure_threads() -> CmdResult<()> {
    let Ok(v) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize =
        v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
            CommandError::Usage(format!("{THREADS_ENV} must be a positive integer, got {v:?}"))
        })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CommandError::Numerical(format!("thread pool: {e}")))
}

pub fn run(command: &Command) -> CmdResult<()> {
    let common = command.common();
    let usage = CommandError::Usage;
    let text = match command {
        Command::Bounds {
            j, step, restarts, ..
        } => {
            let js = commands::spins(&parse_j_list(j, *step).map_err(usage)?, false)?;
            if *restarts == 0 {
                return Err(CommandError::Usage("restarts must be positive".into()));
            }
            render(&commands::bounds(&js, *restarts, common.seed)?, common.format)?
        }
        Command::State { j, .. } => {
            let js = commands::spins(&parse_j_list(j, 0.5).map_err(usage)?, true)?;
            let [j] = js[..] else {
                return Err(CommandError::Usage("state takes a single J".into()));
            };
            render(&[commands::state(j)?], common.format)?
        }
        Command::Bec { n, range, .. } => {
            let (lo, hi, steps) = parse_ratio_range(range).map_err(usage)?;
            render(&commands::bec(*n, lo, hi, steps)?, common.format)?
        }
        Command::Phase {
            j,
            step,
            grid,
            input,
            scaling,
            ..
        } => {
            let js = commands::spins(&parse_j_list(j, *step).map_err(usage)?, false)?;
            if js.len() == 1 && !scaling {
                render(&commands::phase_grid(js[0], *grid, *input)?, common.format)?
            } else {
                render(&commands::phase_scaling(&js, *grid, *input)?, common.format)?
            }
        }
        Command::Witness { j, step, n, pn, .. } => {
            let js = commands::spins(&parse_j_list(j, *step).map_err(usage)?, false)?;
            let ps = parse_stepped_grid(pn).map_err(usage)?;
            if ps.iter().any(|p| !(0.0..=1.0).contains(p)) {
                return Err(CommandError::Usage(format!("noise grid {pn:?} leaves [0, 1]")));
            }
            render(&commands::witness(&js, *n, &ps)?, common.format)?
        }
    };
    write_output(&text, common.out.as_deref())?;
    Ok(())
}
