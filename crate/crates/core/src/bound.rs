//! The planar uncertainty bound C_J = min over states of ΔJ_X² + ΔJ_Y².
//!
//! The exact route writes the variance sum as a minimum over an auxiliary
//! mean λ,
//!
//! ```text
//! C_J = min_λ min_ψ ⟨(J_X - λ)² + J_Y²⟩ = min_λ [E₀(λ) + λ²],
//! H(λ) = J(J+1) - J_Z² - 2λ J_X,
//! ```
//!
//! where E₀(λ) is the ground energy of the real symmetric tridiagonal H(λ).
//! The inner problem is an eigenproblem (no local minima); the outer problem
//! is a smooth 1-D minimization on [0, J]. At the optimum λ equals the
//! ground-state ⟨J_X⟩.
//!
//! The direct route minimizes the variance sum over real, m-symmetric
//! amplitudes with BFGS and serves as an independent cross-check.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optimize::{bfgs, brent_minimize, brent_root, BfgsOptions};
use crate::spin::{SpinMoments, SpinOperatorSet, SpinQuantumNumber, SpinState};
use crate::tridiag::SymTridiagonal;

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_RESTARTS: usize = 8;

/// Exact optimum of the planar variance sum at fixed J.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExactBound {
    pub j: SpinQuantumNumber,
    pub c_exact: f64,
    /// Fixed point λ* = ⟨J_X⟩ of the optimal state, always ≥ 0.
    pub lambda_star: f64,
    /// |λ* - ⟨J_X⟩| at the returned λ*.
    pub fixed_point_residual: f64,
    pub optimal_state: SpinState,
    pub optimal_moments: SpinMoments,
}

/// C_J by every available method together with the optimal state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundResult {
    pub j: SpinQuantumNumber,
    pub c_exact: f64,
    pub c_direct: f64,
    pub c_asymptotic: f64,
    pub lambda_star: f64,
    pub optimal_state: SpinState,
    pub optimal_moments: SpinMoments,
}

impl BoundResult {
    pub fn rel_err_asymptotic(&self) -> f64 {
        (self.c_asymptotic - self.c_exact).abs() / self.c_exact
    }
}

/// The family H(λ) = J(J+1) - J_Z² - 2λ J_X for one J.
#[derive(Clone, Debug)]
pub struct PlanarHamiltonian {
    j: SpinQuantumNumber,
    diag: Vec<f64>,
    ladder: Vec<f64>,
}

/// Ground state of H(λ) and the quantities derived from it.
#[derive(Clone, Debug)]
pub struct PlanarGround {
    pub energy: f64,
    pub vector: Vec<f64>,
    pub mean_x: f64,
}

impl PlanarHamiltonian {
    pub fn new(j: SpinQuantumNumber) -> Self {
        let ops = SpinOperatorSet::new(j);
        let cas = j.casimir();
        Self {
            j,
            diag: ops.jz_diagonal().iter().map(|m| cas - m * m).collect(),
            ladder: ops.ladder_superdiagonal().to_vec(),
        }
    }

    pub fn matrix(&self, lambda: f64) -> SymTridiagonal {
        // -2λ J_X has off-diagonal -λ·ladder
        SymTridiagonal::new(
            self.diag.clone(),
            self.ladder.iter().map(|l| -lambda * l).collect(),
        )
        .expect("consistent lengths")
    }

    pub fn ground(&self, lambda: f64) -> PlanarGround {
        let (energy, mut vector) = self.matrix(lambda).lowest_eigenpair();
        // for λ > 0 this is a Perron vector: one sign throughout, ⟨J_X⟩ > 0
        if vector.iter().sum::<f64>() < 0.0 {
            vector.iter_mut().for_each(|v| *v = -*v);
        }
        let mean_x = self.mean_x(&vector);
        PlanarGround {
            energy,
            vector,
            mean_x,
        }
    }

    fn mean_x(&self, v: &[f64]) -> f64 {
        v.windows(2).zip(&self.ladder).map(|(w, l)| w[0] * w[1] * l).sum()
    }

    /// E₀(λ) + λ², whose minimum over λ is C_J.
    pub fn outer_objective(&self, lambda: f64) -> f64 {
        self.ground(lambda).energy + lambda * lambda
    }

    pub fn j(&self) -> SpinQuantumNumber {
        self.j
    }
}

/// Exact C_J by the λ-parameterized ground-state construction.
pub fn cj_exact(j: SpinQuantumNumber, tol: f64) -> Result<ExactBound> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tol must be positive, got {tol}")));
    }
    let jj = j.value();
    let ham = PlanarHamiltonian::new(j);
    if j.two_j() == 0 {
        let state = SpinState::from_real(j, &[1.0])?;
        let optimal_moments = state.moments();
        return Ok(ExactBound {
            j,
            c_exact: 0.0,
            lambda_star: 0.0,
            fixed_point_residual: 0.0,
            optimal_state: state,
            optimal_moments,
        });
    }

    let coarse = brent_minimize(|l| Ok(ham.outer_objective(l)), 0.0, jj, 1e-9 * jj, 500)?;
    if coarse.x <= 1e-6 * jj || coarse.x >= jj * (1.0 - 1e-12) {
        return Err(Error::NonConvergence {
            what: "C_J outer minimization",
            detail: format!("minimum not bracketed inside (0, {jj}): λ = {}", coarse.x),
        });
    }

    // polish the stationarity condition λ = ⟨J_X⟩(λ)
    let residual = |l: f64| l - ham.ground(l).mean_x;
    let mut lambda = coarse.x;
    let r0 = residual(lambda);
    if r0.abs() > 0.1 * tol {
        let mut delta = 1e-7 * jj;
        let bracket = loop {
            let lo = (lambda - delta).max(0.5 * lambda);
            let hi = (lambda + delta).min(jj);
            if residual(lo) <= 0.0 && residual(hi) >= 0.0 {
                break Some((lo, hi));
            }
            if delta > 0.25 * jj {
                break None;
            }
            delta *= 4.0;
        };
        if let Some((lo, hi)) = bracket {
            lambda = brent_root(|l| Ok(residual(l)), lo, hi, 1e-15 * jj, 200)?;
        }
    }

    let ground = ham.ground(lambda);
    let c_exact = ground.energy + lambda * lambda;
    let optimal_state = SpinState::from_real(j, &ground.vector)?;
    let optimal_moments = optimal_state.moments();
    Ok(ExactBound {
        j,
        c_exact,
        lambda_star: lambda,
        fixed_point_residual: (lambda - ground.mean_x).abs(),
        optimal_state,
        optimal_moments,
    })
}

/// Width σ = (2J)^(-2/3) of the Gaussian trial amplitudes in x = m / (J + 1/2).
pub fn gaussian_width(j: SpinQuantumNumber) -> f64 {
    (2.0 * j.value()).powf(-2.0 / 3.0)
}

fn gaussian_amplitudes(j: SpinQuantumNumber) -> Vec<f64> {
    let sigma = gaussian_width(j);
    let jt = j.j_tilde();
    j.m_values()
        .map(|m| {
            let x = m / jt;
            (-x * x / (4.0 * sigma)).exp()
        })
        .collect()
}

/// Gaussian trial state R_m ∝ exp(-x²/4σ), x = m/(J + 1/2), σ = (2J)^(-2/3).
pub fn variational_gaussian_state(j: SpinQuantumNumber) -> Result<SpinState> {
    if j.two_j() < 2 {
        return Err(Error::InvalidArgument(format!(
            "Gaussian ansatz needs J >= 1, got J = {j}"
        )));
    }
    SpinState::from_real(j, &gaussian_amplitudes(j))
}

/// Fitted large-J approximation 0.595275 J^(2/3) - 0.1663 J^(1/3) + 0.0267.
pub fn cj_asymptotic(j: SpinQuantumNumber) -> f64 {
    let c = j.value().cbrt();
    0.595275 * c * c - 0.1663 * c + 0.0267
}

/// Leading term 3(2J)^(2/3)/8 of the large-J bound.
pub fn cj_leading_order(j: SpinQuantumNumber) -> f64 {
    3.0 * (2.0 * j.value()).powf(2.0 / 3.0) / 8.0
}

/// Large-J predictions for the optimal state's mean spin and variances.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticMoments {
    pub mean_x: f64,
    pub var_x: f64,
    pub var_y: f64,
    pub var_z: f64,
}

impl AsymptoticMoments {
    pub fn as_array(&self) -> [f64; 4] {
        [self.mean_x, self.var_x, self.var_y, self.var_z]
    }
}

pub fn asymptotic_moments(j: SpinQuantumNumber) -> Result<AsymptoticMoments> {
    if j.two_j() < 2 {
        return Err(Error::InvalidArgument(format!(
            "asymptotic moments need J >= 1, got J = {j}"
        )));
    }
    let jj = j.value();
    let s = (2.0 * jj).powf(2.0 / 3.0);
    Ok(AsymptoticMoments {
        mean_x: jj - 0.5 * (jj / 4.0).cbrt(),
        var_x: s / 8.0,
        var_y: s / 4.0,
        var_z: (jj * jj / 2.0).powf(2.0 / 3.0),
    })
}

/// Planar variance sum of real amplitudes together with its gradient.
struct RealObjective {
    diag: Vec<f64>,
    ladder: Vec<f64>,
}

impl RealObjective {
    fn new(j: SpinQuantumNumber) -> Self {
        let ham = PlanarHamiltonian::new(j);
        Self {
            diag: ham.diag,
            ladder: ham.ladder,
        }
    }

    /// (ΔJ_X² + ΔJ_Y², ∂/∂R) for real R (so ⟨J_Y⟩ = 0).
    fn value_grad(&self, r: &[f64]) -> (f64, Vec<f64>) {
        let d = r.len();
        let n: f64 = r.iter().map(|x| x * x).sum();
        let a: f64 = r.iter().zip(&self.diag).map(|(x, q)| q * x * x).sum();
        let b: f64 = r.windows(2).zip(&self.ladder).map(|(w, l)| l * w[0] * w[1]).sum();
        let mean = b / n;
        let f = a / n - mean * mean;
        let mut g = vec![0.0; d];
        for k in 0..d {
            let da = 2.0 * self.diag[k] * r[k];
            let mut db = 0.0;
            if k + 1 < d {
                db += self.ladder[k] * r[k + 1];
            }
            if k > 0 {
                db += self.ladder[k - 1] * r[k - 1];
            }
            let dn = 2.0 * r[k];
            g[k] = (da * n - a * dn) / (n * n) - 2.0 * mean * (db * n - b * dn) / (n * n);
        }
        (f, g)
    }
}

/// Best planar variance sum found by BFGS over real amplitudes with
/// R_m = R_{-m}, from `restarts` starts around the Gaussian ansatz.
pub fn cj_direct(j: SpinQuantumNumber, restarts: usize, seed: u64) -> Result<f64> {
    if restarts == 0 {
        return Err(Error::InvalidArgument("restarts must be >= 1".into()));
    }
    let d = j.dim();
    if d == 1 {
        return Ok(0.0);
    }
    let free = d.div_ceil(2);
    // amplitude index k is driven by parameter min(k, d - 1 - k)
    let param_of = |k: usize| k.min(d - 1 - k);
    let objective = RealObjective::new(j);
    let base: Vec<f64> = gaussian_amplitudes(j)[..free].to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut best = f64::INFINITY;
    for attempt in 0..restarts {
        let mut u: Vec<f64> = if attempt == 0 {
            base.clone()
        } else {
            base.iter()
                .map(|b| (b * (1.0 + 0.5 * rng.random_range(-1.0..1.0))).abs() + 1e-3 * rng.random::<f64>())
                .collect()
        };
        let norm = u.iter().map(|x| x * x).sum::<f64>().sqrt();
        u.iter_mut().for_each(|x| *x /= norm);

        let outcome = bfgs(
            |u| {
                let r: Vec<f64> = (0..d).map(|k| u[param_of(k)]).collect();
                let (f, g_full) = objective.value_grad(&r);
                let mut g = vec![0.0; u.len()];
                for (k, gk) in g_full.iter().enumerate() {
                    g[param_of(k)] += gk;
                }
                (f, g)
            },
            u,
            BfgsOptions {
                gtol: 1e-11,
                max_iter: 5000,
            },
        );
        if outcome.f.is_finite() {
            best = best.min(outcome.f);
        }
    }
    if best.is_finite() {
        Ok(best)
    } else {
        Err(Error::NonConvergence {
            what: "direct minimization",
            detail: "every restart produced a non-finite value".into(),
        })
    }
}

/// Full [`BoundResult`] for one J.
pub fn solve_bound(j: SpinQuantumNumber, tol: f64, restarts: usize, seed: u64) -> Result<BoundResult> {
    let exact = cj_exact(j, tol)?;
    let c_direct = cj_direct(j, restarts, seed)?;
    Ok(BoundResult {
        j,
        c_exact: exact.c_exact,
        c_direct,
        c_asymptotic: cj_asymptotic(j),
        lambda_star: exact.lambda_star,
        optimal_state: exact.optimal_state,
        optimal_moments: exact.optimal_moments,
    })
}

/// [`solve_bound`] over several J in parallel; output order follows `js`.
pub fn bound_table(
    js: &[SpinQuantumNumber],
    tol: f64,
    restarts: usize,
    seed: u64,
) -> Result<Vec<BoundResult>> {
    js.par_iter()
        .map(|&j| solve_bound(j, tol, restarts, seed))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn spin(j: f64) -> SpinQuantumNumber {
        SpinQuantumNumber::from_f64(j).unwrap()
    }

    #[test]
    fn exact_small_fractions() {
        assert_abs_diff_eq!(
            cj_exact(spin(0.5), DEFAULT_TOL).unwrap().c_exact,
            0.25,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            cj_exact(spin(1.0), DEFAULT_TOL).unwrap().c_exact,
            0.4375,
            epsilon = 1e-12
        );
    }

    #[test]
    fn exact_spin_fifty() {
        let r = cj_exact(spin(50.0), DEFAULT_TOL).unwrap();
        assert!((r.c_exact - 7.503).abs() <= 0.0005);
        // reference value from an independent dense diagonalization
        assert_abs_diff_eq!(r.c_exact, 7.503297215567727, epsilon = 1e-9);
    }

    #[test]
    fn spin_zero_is_trivial() {
        let r = cj_exact(spin(0.0), DEFAULT_TOL).unwrap();
        assert_eq!(r.c_exact, 0.0);
        assert_eq!(cj_direct(spin(0.0), 1, 0).unwrap(), 0.0);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(cj_exact(spin(1.0), 0.0).is_err());
        assert!(cj_direct(spin(1.0), 0, 0).is_err());
        assert!(variational_gaussian_state(spin(0.5)).is_err());
        assert!(asymptotic_moments(spin(0.5)).is_err());
    }

    #[test]
    fn result_invariants() {
        for two_j in 1..=20 {
            let j = SpinQuantumNumber::from_two_j(two_j);
            let r = cj_exact(j, DEFAULT_TOL).unwrap();
            assert!(
                r.fixed_point_residual <= DEFAULT_TOL,
                "J={j}: {}",
                r.fixed_point_residual
            );
            assert!(r.lambda_star > 0.0);
            assert_abs_diff_eq!(r.optimal_moments.planar_sum, r.c_exact, epsilon = 1e-9);
            assert_abs_diff_eq!(r.optimal_moments.mean_x(), r.lambda_star, epsilon = 1e-9);
            assert_abs_diff_eq!(r.optimal_moments.mean_y(), 0.0, epsilon = 1e-12);
            assert_abs_diff_eq!(r.optimal_moments.mean_z(), 0.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn fixed_point_is_ground_state_mean() {
        let j = spin(7.0);
        let r = cj_exact(j, DEFAULT_TOL).unwrap();
        let g = PlanarHamiltonian::new(j).ground(r.lambda_star);
        assert!((g.mean_x - r.lambda_star).abs() <= DEFAULT_TOL);
    }

    #[test]
    fn direct_matches_tabulated_values() {
        assert!((cj_direct(spin(1.5), DEFAULT_RESTARTS, 1).unwrap() - 0.6009).abs() < 5e-5);
        assert!((cj_direct(spin(2.0), DEFAULT_RESTARTS, 1).unwrap() - 0.7496).abs() < 5e-5);
    }

    #[test]
    fn direct_agrees_with_exact_at_ten() {
        let j = spin(10.0);
        let exact = cj_exact(j, DEFAULT_TOL).unwrap().c_exact;
        let direct = cj_direct(j, 5, 42).unwrap();
        assert!(direct >= exact - 1e-9);
        assert!((direct - exact).abs() / exact < 1e-6);
        assert!((exact - 2.445).abs() < 5e-4);
    }

    #[test]
    fn asymptotic_closed_form_values() {
        // 0.595275·5^(2/3) - 0.1663·5^(1/3) + 0.0267
        assert_abs_diff_eq!(cj_asymptotic(spin(5.0)), 1.48291, epsilon = 5e-5);
        assert_abs_diff_eq!(cj_asymptotic(spin(10.0)), 2.4315, epsilon = 1e-4);
        assert_abs_diff_eq!(cj_asymptotic(spin(50.0)), 7.4931, epsilon = 1e-4);
        assert_abs_diff_eq!(cj_asymptotic(spin(50.0)) / 50.0, 0.1499, epsilon = 5e-5);
        assert!((cj_asymptotic(spin(10.0)) - 2.445).abs() / 2.445 < 0.01);
        assert_abs_diff_eq!(
            cj_leading_order(spin(50.0)),
            0.595275 * 50f64.powf(2.0 / 3.0),
            epsilon = 1e-5
        );
    }

    #[test]
    fn gaussian_trial_state() {
        let j = spin(50.0);
        assert_abs_diff_eq!(gaussian_width(j), 0.046416, epsilon = 1e-6);
        let s = variational_gaussian_state(j).unwrap();
        assert_abs_diff_eq!(s.norm_sqr(), 1.0, epsilon = 1e-12);
        assert!(s.is_real(0.0));
        let amps = s.amplitudes();
        for k in 0..j.dim() {
            assert_abs_diff_eq!(amps[k].re, amps[j.dim() - 1 - k].re, epsilon = 1e-15);
        }
        let exact = cj_exact(j, DEFAULT_TOL).unwrap().c_exact;
        let trial = s.moments().planar_sum;
        assert!(trial >= exact);
        assert!((trial - exact) / exact < 0.10, "{trial} vs {exact}");
    }

    #[test]
    fn asymptotic_moment_values() {
        let a = asymptotic_moments(spin(50.0)).unwrap();
        assert_abs_diff_eq!(a.mean_x, 48.84, epsilon = 5e-3);
        assert_abs_diff_eq!(a.var_x, 2.693, epsilon = 5e-4);
        assert_abs_diff_eq!(a.var_y, 5.386, epsilon = 5e-4);
        assert_abs_diff_eq!(a.var_z, 116.04, epsilon = 5e-3);
        assert_abs_diff_eq!((a.var_y * a.var_z).sqrt(), 25.0, epsilon = 1e-9);
        assert_abs_diff_eq!(a.var_x / a.var_y, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn optimal_variance_ordering() {
        for two_j in 4..=40 {
            let m = cj_exact(SpinQuantumNumber::from_two_j(two_j), DEFAULT_TOL)
                .unwrap()
                .optimal_moments;
            assert!(m.var_x() < m.var_y() && m.var_y() < m.var_z(), "2J = {two_j}");
        }
        let m = cj_exact(spin(200.0), DEFAULT_TOL).unwrap().optimal_moments;
        assert!((m.var_x() / m.var_y() - 0.5).abs() < 0.1);
    }

    #[test]
    fn heisenberg_ratio_in_range_at_fifty() {
        let r = cj_exact(spin(50.0), DEFAULT_TOL).unwrap();
        let m = &r.optimal_moments;
        let ratio = (m.var_y() * m.var_z()).sqrt() / (m.mean_x().abs() / 2.0);
        assert!((1.0..=1.1).contains(&ratio), "{ratio}");
    }

    #[test]
    fn table_preserves_order() {
        let js = [spin(2.0), spin(0.5), spin(1.0)];
        let t = bound_table(&js, DEFAULT_TOL, 2, 0).unwrap();
        assert_eq!(t.iter().map(|r| r.j).collect::<Vec<_>>(), js);
        assert_abs_diff_eq!(t[1].c_exact, 0.25, epsilon = 1e-12);
    }
}
