use std::f64::consts::PI;

use planar_squeeze::bec::{variance_scan, BecScanPoint};
use planar_squeeze::bound::{cj_exact, solve_bound, DEFAULT_TOL};
use planar_squeeze::entanglement::{werner_curve, Verdict};
use planar_squeeze::interferometer::phase_uncertainty;
use planar_squeeze::{Error, SpinMoments, SpinQuantumNumber, SpinState};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::args::StateKind;
use crate::output::{fmt_g, fmt_opt, CsvRow};

/// Failure of a command, carrying its process exit code.
#[derive(Debug)]
pub enum CommandError {
    Usage(String),
    Numerical(String),
    Io(std::io::Error),
}

impl CommandError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CommandError::Usage(_) => 2,
            CommandError::Numerical(_) | CommandError::Io(_) => 3,
        }
    }
}

impl std::fmt::Display for CommandError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CommandError::Usage(m) => write!(f, "{m}"),
            CommandError::Numerical(m) => write!(f, "{m}"),
            CommandError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl From<Error> for CommandError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidArgument(_) | Error::DimensionTooLarge { .. } => CommandError::Usage(e.to_string()),
            _ => CommandError::Numerical(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CommandError {
    fn from(e: std::io::Error) -> Self {
        CommandError::Io(e)
    }
}

pub type CmdResult<T> = Result<T, CommandError>;

pub fn spins(values: &[f64], allow_zero: bool) -> CmdResult<Vec<SpinQuantumNumber>> {
    values
        .iter()
        .map(|&j| {
            let s = SpinQuantumNumber::from_f64(j)?;
            if s.two_j() == 0 && !allow_zero {
                return Err(CommandError::Usage("J must be at least 1/2".into()));
            }
            Ok(s)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundsRow {
    pub j: f64,
    pub c_exact: f64,
    pub c_direct: f64,
    pub c_asymptotic: f64,
    pub rel_err_asymptotic: f64,
}

impl CsvRow for BoundsRow {
    const HEADER: &'static str = "j,c_exact,c_direct,c_asymptotic,rel_err_asymptotic";
    fn fields(&self) -> Vec<String> {
        [
            self.j,
            self.c_exact,
            self.c_direct,
            self.c_asymptotic,
            self.rel_err_asymptotic,
        ]
        .map(fmt_g)
        .to_vec()
    }
}

pub fn bounds(js: &[SpinQuantumNumber], restarts: usize, seed: u64) -> CmdResult<Vec<BoundsRow>> {
    js.par_iter()
        .map(|&j| {
            let b = solve_bound(j, DEFAULT_TOL, restarts, seed)?;
            Ok(BoundsRow {
                j: j.value(),
                c_exact: b.c_exact,
                c_direct: b.c_direct,
                c_asymptotic: b.c_asymptotic,
                rel_err_asymptotic: b.rel_err_asymptotic(),
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateReport {
    pub j: f64,
    pub c_exact: f64,
    pub lambda_star: f64,
    pub moments: SpinMoments,
    pub state: SpinState,
}

impl CsvRow for StateReport {
    const HEADER: &'static str = "j,mean_x,mean_y,mean_z,var_x,var_y,var_z,planar_sum,lambda_star";
    fn fields(&self) -> Vec<String> {
        let m = &self.moments;
        [
            self.j,
            m.mean_x(),
            m.mean_y(),
            m.mean_z(),
            m.var_x(),
            m.var_y(),
            m.var_z(),
            m.planar_sum,
            self.lambda_star,
        ]
        .map(fmt_g)
        .to_vec()
    }
}

pub fn state(j: SpinQuantumNumber) -> CmdResult<StateReport> {
    let b = cj_exact(j, DEFAULT_TOL)?;
    Ok(StateReport {
        j: j.value(),
        c_exact: b.c_exact,
        lambda_star: b.lambda_star,
        moments: b.optimal_moments,
        state: b.optimal_state,
    })
}

/// One scan ratio; `point` is absent where the ground state is degenerate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BecRow {
    pub ratio: f64,
    pub point: Option<BecScanPoint>,
    pub flag: Option<String>,
}

impl CsvRow for BecRow {
    const HEADER: &'static str = "ratio,var_x,var_y,var_z,planar_sum,mean_x";
    fn fields(&self) -> Vec<String> {
        let p = self.point.as_ref();
        let mut f = vec![fmt_g(self.ratio)];
        f.extend(
            [
                p.map(|p| p.var_x),
                p.map(|p| p.var_y),
                p.map(|p| p.var_z),
                p.map(|p| p.planar_sum),
                p.map(|p| p.mean_x),
            ]
            .map(fmt_opt),
        );
        f
    }
}

pub fn bec(n_atoms: u32, lo: f64, hi: f64, steps: usize) -> CmdResult<Vec<BecRow>> {
    variance_scan(n_atoms, lo, hi, steps)?
        .into_iter()
        .map(|e| match e.point {
            Ok(p) => Ok(BecRow {
                ratio: e.ratio,
                point: Some(p),
                flag: None,
            }),
            Err(err @ Error::DegenerateGround { .. }) => {
                eprintln!("warning: ratio {}: {err}", fmt_g(e.ratio));
                Ok(BecRow {
                    ratio: e.ratio,
                    point: None,
                    flag: Some(err.to_string()),
                })
            }
            Err(err) => Err(err.into()),
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseRow {
    pub alpha: f64,
    pub delta_phi: Option<f64>,
    pub flag: Option<String>,
}

impl CsvRow for PhaseRow {
    const HEADER: &'static str = "alpha,delta_phi";
    fn fields(&self) -> Vec<String> {
        vec![fmt_g(self.alpha), fmt_opt(self.delta_phi)]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub j: f64,
    pub delta_phi_min: Option<f64>,
}

impl CsvRow for ScalingRow {
    const HEADER: &'static str = "j,delta_phi_min";
    fn fields(&self) -> Vec<String> {
        vec![fmt_g(self.j), fmt_opt(self.delta_phi_min)]
    }
}

fn input_moments(j: SpinQuantumNumber, kind: StateKind) -> CmdResult<SpinMoments> {
    Ok(match kind {
        StateKind::Optimal => cj_exact(j, DEFAULT_TOL)?.optimal_moments,
        StateKind::Coherent => SpinState::coherent_x(j).moments(),
    })
}

/// Δφ on α_k = kπ/grid, k = 0..=grid. Insensitive points are flagged.
pub fn phase_grid(j: SpinQuantumNumber, grid: usize, kind: StateKind) -> CmdResult<Vec<PhaseRow>> {
    if grid == 0 {
        return Err(CommandError::Usage("grid must be positive".into()));
    }
    let m = input_moments(j, kind)?;
    Ok((0..=grid)
        .map(|k| {
            let alpha = PI * k as f64 / grid as f64;
            match phase_uncertainty(&m, alpha) {
                Ok(d) => PhaseRow {
                    alpha,
                    delta_phi: Some(d),
                    flag: None,
                },
                Err(e) => PhaseRow {
                    alpha,
                    delta_phi: None,
                    flag: Some(e.to_string()),
                },
            }
        })
        .collect())
}

pub fn phase_scaling(js: &[SpinQuantumNumber], grid: usize, kind: StateKind) -> CmdResult<Vec<ScalingRow>> {
    js.par_iter()
        .map(|&j| {
            let rows = phase_grid(j, grid, kind)?;
            let best = rows
                .iter()
                .filter_map(|r| r.delta_phi)
                .fold(None, |acc: Option<f64>, d| Some(acc.map_or(d, |a| a.min(d))));
            Ok(ScalingRow {
                j: j.value(),
                delta_phi_min: best,
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessCsvRow {
    pub j: f64,
    pub p_n: f64,
    pub s2_over_nj: f64,
    pub cj_over_j: f64,
    pub verdict: Verdict,
}

impl CsvRow for WitnessCsvRow {
    const HEADER: &'static str = "j,p_n,s2_over_nj,cj_over_j,verdict";
    fn fields(&self) -> Vec<String> {
        vec![
            fmt_g(self.j),
            fmt_g(self.p_n),
            fmt_g(self.s2_over_nj),
            fmt_g(self.cj_over_j),
            self.verdict.to_string(),
        ]
    }
}

pub fn witness(js: &[SpinQuantumNumber], n_sites: usize, p_values: &[f64]) -> CmdResult<Vec<WitnessCsvRow>> {
    if n_sites == 0 {
        return Err(CommandError::Usage("need at least one site".into()));
    }
    let per_j: Vec<Vec<WitnessCsvRow>> = js
        .par_iter()
        .map(|&j| {
            Ok(werner_curve(j, n_sites, p_values)?
                .into_iter()
                .map(|r| WitnessCsvRow {
                    j: j.value(),
                    p_n: r.p_n,
                    s2_over_nj: r.s2_over_nj,
                    cj_over_j: r.cj_over_j,
                    verdict: r.verdict,
                })
                .collect())
        })
        .collect::<CmdResult<_>>()?;
    Ok(per_j.into_iter().flatten().collect())
}
