//! Two-mode (double-well) condensate in the spin picture.
//!
//! With N = 2J atoms and conserved terms dropped, the two-mode Hamiltonian is
//! H = 2κ J_X + g J_Z², a real symmetric tridiagonal matrix with diagonal
//! g·m² and off-diagonal κ·sqrt(J(J+1) - m(m+1)). For attractive g < 0 it
//! equals -g |J_∥ - J₀|² + const with J₀ = (κ/g, 0), so its ground state
//! minimizes the planar variance when κ/|g| matches the optimal mean spin.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optimize::{brent_minimize, brent_root};
use crate::spin::{SpinMoments, SpinOperatorSet, SpinQuantumNumber, SpinState};
use crate::tridiag::SymTridiagonal;

/// Relative gap below which the two lowest levels count as degenerate.
pub const DEGENERACY_THRESHOLD: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BecParams {
    n_atoms: u32,
    g: f64,
    kappa: f64,
}

impl BecParams {
    pub fn new(n_atoms: u32, g: f64, kappa: f64) -> Result<Self> {
        if n_atoms == 0 {
            return Err(Error::InvalidArgument("need at least one atom".into()));
        }
        if !(kappa > 0.0) || !kappa.is_finite() || !g.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "need finite g and kappa > 0, got g = {g}, kappa = {kappa}"
            )));
        }
        Ok(Self { n_atoms, g, kappa })
    }

    /// Parameters for a coupling ratio Ng/κ: |g| = 1 with the sign of the
    /// ratio and κ = N/|ratio|. A zero ratio means g = 0, κ = 1.
    pub fn from_ratio(n_atoms: u32, ratio: f64) -> Result<Self> {
        if !ratio.is_finite() {
            return Err(Error::InvalidArgument(format!("non-finite ratio {ratio}")));
        }
        if ratio == 0.0 {
            return Self::new(n_atoms, 0.0, 1.0);
        }
        Self::new(n_atoms, ratio.signum(), n_atoms as f64 / ratio.abs())
    }

    pub fn n_atoms(&self) -> u32 {
        self.n_atoms
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn ratio(&self) -> f64 {
        self.n_atoms as f64 * self.g / self.kappa
    }

    pub fn spin(&self) -> SpinQuantumNumber {
        SpinQuantumNumber::from_two_j(self.n_atoms)
    }
}

/// H = 2κ J_X + g J_Z² in the J_Z basis.
pub fn build_hamiltonian(params: &BecParams) -> SymTridiagonal {
    let ops = SpinOperatorSet::new(params.spin());
    SymTridiagonal::new(
        ops.jz_diagonal().iter().map(|m| params.g * m * m).collect(),
        ops.ladder_superdiagonal()
            .iter()
            .map(|l| params.kappa * l)
            .collect(),
    )
    .expect("consistent lengths")
}

#[derive(Clone, Debug, PartialEq)]
pub struct BecGround {
    pub energy: f64,
    /// Reported representative, phased so that ⟨J_X⟩ ≥ 0.
    pub state: SpinState,
    /// True when `state` is the (-1)^k image of the eigenvector of H.
    pub parity_flipped: bool,
    pub moments: SpinMoments,
}

impl BecGround {
    /// The eigenvector of H itself (undoing the reporting phase).
    pub fn eigenvector(&self) -> SpinState {
        if self.parity_flipped {
            self.state.parity_flipped()
        } else {
            self.state.clone()
        }
    }
}

pub fn ground_state(params: &BecParams) -> Result<BecGround> {
    let h = build_hamiltonian(params);
    if h.dim() > 1 {
        let e0 = h.eigenvalue_by_bisection(0);
        let e1 = h.eigenvalue_by_bisection(1);
        let scale = e0.abs().max(e1.abs());
        let scale = if scale > 0.0 { scale } else { 1.0 };
        if (e1 - e0).abs() < DEGENERACY_THRESHOLD * scale {
            return Err(Error::DegenerateGround { e0, e1 });
        }
    }
    let (energy, mut v) = h.lowest_eigenpair();
    if v.iter().sum::<f64>() < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
    let mut state = SpinState::from_real(params.spin(), &v)?;
    let mut moments = state.moments();
    let mut parity_flipped = false;
    if moments.mean_x() < 0.0 {
        state = state.parity_flipped();
        parity_flipped = true;
        if state.amplitudes().iter().map(|z| z.re).sum::<f64>() < 0.0 {
            state = SpinState::new(state.j(), state.amplitudes().iter().map(|z| -z).collect())?;
        }
        moments = state.moments();
    }
    Ok(BecGround {
        energy,
        state,
        parity_flipped,
        moments,
    })
}

/// Ground-state variances at one coupling ratio.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BecScanPoint {
    pub ratio: f64,
    pub var_x: f64,
    pub var_y: f64,
    pub var_z: f64,
    pub planar_sum: f64,
    pub mean_x: f64,
}

impl BecScanPoint {
    fn from_moments(ratio: f64, m: &SpinMoments) -> Self {
        Self {
            ratio,
            var_x: m.var_x(),
            var_y: m.var_y(),
            var_z: m.var_z(),
            planar_sum: m.planar_sum,
            mean_x: m.mean_x(),
        }
    }
}

/// One scan row: a point, or the reason the point could not be computed.
#[derive(Clone, Debug, PartialEq)]
pub struct ScanEntry {
    pub ratio: f64,
    pub point: Result<BecScanPoint>,
}

pub fn scan_point(n_atoms: u32, ratio: f64) -> Result<BecScanPoint> {
    let params = BecParams::from_ratio(n_atoms, ratio)?;
    let ground = ground_state(&params)?;
    Ok(BecScanPoint::from_moments(ratio, &ground.moments))
}

/// Ground-state variances on `steps` evenly spaced ratios in
/// `[ratio_min, ratio_max]`. Degenerate points are returned as flagged
/// entries rather than failing the scan.
pub fn variance_scan(n_atoms: u32, ratio_min: f64, ratio_max: f64, steps: usize) -> Result<Vec<ScanEntry>> {
    if steps < 2 {
        return Err(Error::InvalidArgument(format!("need steps >= 2, got {steps}")));
    }
    if !(ratio_min < ratio_max) || !ratio_min.is_finite() || !ratio_max.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "bad ratio range [{ratio_min}, {ratio_max}]"
        )));
    }
    if n_atoms == 0 {
        return Err(Error::InvalidArgument("need at least one atom".into()));
    }
    let h = (ratio_max - ratio_min) / (steps - 1) as f64;
    Ok((0..steps)
        .into_par_iter()
        .map(|k| {
            let ratio = if k + 1 == steps {
                ratio_max
            } else {
                ratio_min + k as f64 * h
            };
            ScanEntry {
                ratio,
                point: scan_point(n_atoms, ratio),
            }
        })
        .collect())
}

/// Predicted critical ratio -N / (J - (J/4)^(1/3) / 2) from the large-J
/// optimal mean spin.
pub fn asymptotic_critical_ratio(n_atoms: u32) -> f64 {
    let j = n_atoms as f64 / 2.0;
    -(n_atoms as f64) / (j - 0.5 * (j / 4.0).cbrt())
}

#[derive(Clone, Debug, PartialEq)]
pub struct CriticalCoupling {
    pub ratio: f64,
    pub planar_sum: f64,
    pub ground: BecGround,
}

/// Attractive coupling ratio whose ground state has the smallest planar
/// variance sum.
///
/// The minimization is bracketed on [1.5, 0.5] times the large-J seed and
/// then refined with the stationarity condition κ/|g| = ⟨J_X⟩.
pub fn critical_coupling(n_atoms: u32, tol: f64) -> Result<CriticalCoupling> {
    if n_atoms < 2 {
        return Err(Error::InvalidArgument(format!(
            "critical coupling needs n_atoms >= 2, got {n_atoms}"
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tol must be positive, got {tol}")));
    }
    let n = n_atoms as f64;
    let seed = asymptotic_critical_ratio(n_atoms);
    let (lo, hi) = (1.5 * seed, 0.5 * seed);
    let planar = |ratio: f64| scan_point(n_atoms, ratio).map(|p| p.planar_sum);
    let coarse = brent_minimize(planar, lo, hi, tol, 500)?;
    let width = hi - lo;
    if coarse.x - lo < 1e-6 * width || hi - coarse.x < 1e-6 * width {
        return Err(Error::NonConvergence {
            what: "critical coupling",
            detail: format!("minimum at bracket edge: ratio = {}", coarse.x),
        });
    }

    // κ/|g| - ⟨J_X⟩ vanishes at the minimum and increases with the ratio
    let residual = |ratio: f64| -> Result<f64> {
        let params = BecParams::from_ratio(n_atoms, ratio)?;
        Ok(params.kappa() - ground_state(&params)?.moments.mean_x())
    };
    let mut ratio = coarse.x;
    let mut delta = 1e-6 * n.max(1.0) * tol.sqrt().max(1e-8);
    for _ in 0..40 {
        let (a, b) = ((ratio - delta).max(lo), (ratio + delta).min(hi));
        let (ra, rb) = (residual(a)?, residual(b)?);
        if ra.signum() != rb.signum() || ra == 0.0 || rb == 0.0 {
            ratio = brent_root(residual, a, b, 1e-15 * n, 200)?;
            break;
        }
        delta *= 4.0;
        if delta > width {
            break;
        }
    }

    let ground = ground_state(&BecParams::from_ratio(n_atoms, ratio)?)?;
    Ok(CriticalCoupling {
        ratio,
        planar_sum: ground.moments.planar_sum,
        ground,
    })
}
