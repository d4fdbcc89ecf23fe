//! Single-shot phase estimation with a two-mode interferometer.
//!
//! The output-port number difference is N̂⁺ - N̂⁻ = 2 J_X(α) with
//! J_X(α) = cos α J_X + sin α J_Y and α = φ - θ, so everything reduces to
//! Z-rotations of the input spin state and measurement of J_X.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::bound::{cj_asymptotic, cj_exact, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::spin::{SpinMoments, SpinOperatorSet, SpinQuantumNumber, SpinState};
use crate::tridiag::SymEigen;

/// Slope |∂N̄/∂φ| / 2 below which the operating point is rejected.
pub const INSENSITIVE_THRESHOLD: f64 = 1e-9;
/// Largest |cov(J_X, J_Y)| accepted by [`phase_uncertainty`].
pub const COVARIANCE_TOLERANCE: f64 = 1e-8;

/// Reduces an angle to (-π, π].
pub fn reduce_angle(a: f64) -> f64 {
    let r = a.rem_euclid(2.0 * PI);
    if r > PI {
        r - 2.0 * PI
    } else {
        r
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseSetting {
    pub phi: f64,
    pub theta: f64,
    pub alpha: f64,
}

impl PhaseSetting {
    pub fn new(phi: f64, theta: f64) -> Self {
        Self {
            phi,
            theta,
            alpha: reduce_angle(phi - theta),
        }
    }

    pub fn from_alpha(alpha: f64) -> Self {
        Self::new(alpha, 0.0)
    }
}

/// Variance of J_X(α) for a state with zero X-Y covariance.
pub fn signal_variance(m: &SpinMoments, alpha: f64) -> f64 {
    let (s, c) = alpha.sin_cos();
    m.var_x() * c * c + m.var_y() * s * s
}

/// Phase error from error propagation on the output number difference.
pub fn phase_uncertainty(m: &SpinMoments, alpha: f64) -> Result<f64> {
    let covariance = m.covariance(0, 1);
    if covariance.abs() > COVARIANCE_TOLERANCE {
        return Err(Error::CovarianceAssumptionViolated { covariance });
    }
    let (s, c) = alpha.sin_cos();
    let slope = m.mean_y() * c - m.mean_x() * s;
    if slope.abs() < INSENSITIVE_THRESHOLD {
        return Err(Error::InsensitivePoint { slope });
    }
    Ok(signal_variance(m, alpha).sqrt() / slope.abs())
}

/// Upper bound on the signal variance valid at every α.
pub fn noise_bound(m: &SpinMoments) -> f64 {
    m.planar_sum
}

/// Eigen-decomposition of J_X for one spin, reused across settings.
#[derive(Clone, Debug)]
pub struct JxEigenbasis {
    j: SpinQuantumNumber,
    eigen: SymEigen,
}

impl JxEigenbasis {
    pub fn new(j: SpinQuantumNumber) -> Result<Self> {
        let eigen = SpinOperatorSet::new(j).jx_tridiagonal().eigh()?;
        Ok(Self { j, eigen })
    }

    pub fn j(&self) -> SpinQuantumNumber {
        self.j
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigen.values
    }

    pub fn eigenvector(&self, i: usize) -> &[f64] {
        self.eigen.vector(i)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutputDistribution {
    /// Number differences 2m, ascending.
    pub outcomes: Vec<f64>,
    pub probabilities: Vec<f64>,
}

impl OutputDistribution {
    pub fn mean(&self) -> f64 {
        self.outcomes
            .iter()
            .zip(&self.probabilities)
            .map(|(x, p)| x * p)
            .sum()
    }

    pub fn variance(&self) -> f64 {
        let mu = self.mean();
        self.outcomes
            .iter()
            .zip(&self.probabilities)
            .map(|(x, p)| p * (x - mu) * (x - mu))
            .sum()
    }

    pub fn total_probability(&self) -> f64 {
        self.probabilities.iter().sum()
    }
}

pub fn output_distribution(state: &SpinState, setting: PhaseSetting) -> Result<OutputDistribution> {
    let basis = JxEigenbasis::new(state.j())?;
    output_distribution_in(&basis, state, setting)
}

/// Distribution of N̂⁺ - N̂⁻ using a precomputed J_X eigenbasis.
pub fn output_distribution_in(
    basis: &JxEigenbasis,
    state: &SpinState,
    setting: PhaseSetting,
) -> Result<OutputDistribution> {
    if basis.j() != state.j() {
        return Err(Error::InvalidArgument(format!(
            "eigenbasis for J = {} used with a J = {} state",
            basis.j(),
            state.j()
        )));
    }
    // ⟨J_X⟩ of the rotated state is ⟨cos α J_X + sin α J_Y⟩ of the input
    let rotated = state.rotate_about_z(-setting.alpha);
    let amps = rotated.amplitudes();
    let probabilities = (0..basis.j().dim())
        .map(|i| {
            basis
                .eigenvector(i)
                .iter()
                .zip(amps)
                .map(|(v, a)| a * *v)
                .sum::<num_complex::Complex64>()
                .norm_sqr()
        })
        .collect();
    let outcomes = basis.j().m_values().map(|m| 2.0 * m).collect();
    Ok(OutputDistribution {
        outcomes,
        probabilities,
    })
}

/// Which family of states a scaling study uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Reference {
    /// States reaching the planar bound C_J.
    Optimal,
    /// Spin coherent states along +X.
    Coherent,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalingFit {
    pub slope: f64,
    pub intercept: f64,
    /// (J, Δφ at α = π/2) pairs in input order.
    pub points: Vec<(f64, f64)>,
}

/// Δφ at α = π/2 for the given reference state of spin `j`.
pub fn delta_phi_at_quadrature(j: SpinQuantumNumber, reference: Reference) -> Result<f64> {
    let m = match reference {
        Reference::Optimal => cj_exact(j, DEFAULT_TOL)?.optimal_moments,
        Reference::Coherent => SpinState::coherent_x(j).moments(),
    };
    phase_uncertainty(&m, PI / 2.0)
}

/// Least-squares slope of log Δφ(π/2) against log J.
pub fn scaling_study(j_values: &[SpinQuantumNumber], reference: Reference) -> Result<ScalingFit> {
    if j_values.len() < 4 {
        return Err(Error::InvalidArgument(format!(
            "need at least 4 spins, got {}",
            j_values.len()
        )));
    }
    let js: Vec<f64> = j_values.iter().map(|j| j.value()).collect();
    let lo = js.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = js.iter().cloned().fold(0.0, f64::max);
    if !(lo > 0.0) || hi < 10.0 * lo {
        return Err(Error::InvalidArgument(format!(
            "spins must be positive and span a decade, got [{lo}, {hi}]"
        )));
    }
    let dphi: Vec<f64> = {
        use rayon::prelude::*;
        j_values
            .par_iter()
            .map(|&j| delta_phi_at_quadrature(j, reference))
            .collect::<Result<_>>()?
    };
    let xs: Vec<f64> = js.iter().map(|j| j.ln()).collect();
    let ys: Vec<f64> = dphi.iter().map(|d| d.ln()).collect();
    let (slope, intercept) = linear_fit(&xs, &ys);
    Ok(ScalingFit {
        slope,
        intercept,
        points: js.into_iter().zip(dphi).collect(),
    })
}

fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// √C_J / J with the large-J fit for C_J; usable far beyond exact reach.
pub fn asymptotic_phase_uncertainty(j: SpinQuantumNumber) -> f64 {
    cj_asymptotic(j).sqrt() / j.value()
}
