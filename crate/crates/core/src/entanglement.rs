//! Planar-variance entanglement witness for N spin-J sites.
//!
//! For any separable state Δ²J_X^tot + Δ²J_Y^tot ≥ N·C_J, where
//! J_i^tot = Σ_k c_{k,i} J_i^(k) with arbitrary signs c_{k,i} = ±1. States
//! are held explicitly, either as pure amplitude tensors or as density
//! operators, with site 0 as the most significant index.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bound::{cj_exact, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::spin::{SpinOperatorSet, SpinQuantumNumber, SpinState};

/// Largest pure-state tensor dimension built explicitly.
pub const MAX_PURE_DIMENSION: usize = 1_000_000;
/// Largest density-operator dimension built explicitly.
pub const MAX_DENSITY_DIMENSION: usize = 2048;
/// Absolute guard band of the witness inequality.
pub const WITNESS_MARGIN: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// Per-site signs of the collective X and Y components.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignConfig {
    x: Vec<i8>,
    y: Vec<i8>,
}

impl SignConfig {
    pub fn new(x: Vec<i8>, y: Vec<i8>) -> Result<Self> {
        if x.len() != y.len() || x.is_empty() {
            return Err(Error::InvalidArgument(format!(
                "sign vectors must be non-empty and equal length, got {} and {}",
                x.len(),
                y.len()
            )));
        }
        if x.iter().chain(&y).any(|&c| c != 1 && c != -1) {
            return Err(Error::InvalidArgument("signs must be +1 or -1".into()));
        }
        Ok(Self { x, y })
    }

    pub fn all_plus(n_sites: usize) -> Self {
        Self {
            x: vec![1; n_sites],
            y: vec![1; n_sites],
        }
    }

    pub fn n_sites(&self) -> usize {
        self.x.len()
    }

    pub fn x(&self) -> &[i8] {
        &self.x
    }

    pub fn y(&self) -> &[i8] {
        &self.y
    }

    /// Signs for `axis`; Z uses all +1.
    pub fn for_axis(&self, axis: Axis) -> Vec<i8> {
        match axis {
            Axis::X => self.x.clone(),
            Axis::Y => self.y.clone(),
            Axis::Z => vec![1; self.n_sites()],
        }
    }

    /// Every sign negated.
    pub fn flipped(&self) -> Self {
        Self {
            x: self.x.iter().map(|c| -c).collect(),
            y: self.y.iter().map(|c| -c).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Representation {
    Pure(Vec<Complex64>),
    Density(DMatrix<Complex64>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct MultiSiteState {
    n_sites: usize,
    j: SpinQuantumNumber,
    repr: Representation,
}

fn tensor_dimension(j: SpinQuantumNumber, n_sites: usize, limit: usize) -> Result<usize> {
    if n_sites == 0 {
        return Err(Error::InvalidArgument("need at least one site".into()));
    }
    let d = j.dim();
    let mut dim = 1usize;
    for _ in 0..n_sites {
        dim = dim.saturating_mul(d);
        if dim > limit {
            return Err(Error::DimensionTooLarge {
                dimension: dim,
                limit,
            });
        }
    }
    Ok(dim)
}

impl MultiSiteState {
    /// Pure state from a (2J+1)^N amplitude tensor; normalizes the input.
    pub fn pure(j: SpinQuantumNumber, n_sites: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        let dim = tensor_dimension(j, n_sites, MAX_PURE_DIMENSION)?;
        if amplitudes.len() != dim {
            return Err(Error::InvalidArgument(format!(
                "expected {dim} amplitudes, got {}",
                amplitudes.len()
            )));
        }
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::InvalidArgument("state has zero or non-finite norm".into()));
        }
        let amplitudes = amplitudes.into_iter().map(|a| a / norm).collect();
        Ok(Self {
            n_sites,
            j,
            repr: Representation::Pure(amplitudes),
        })
    }

    /// Density operator; checks trace, Hermiticity and positivity.
    pub fn density(j: SpinQuantumNumber, n_sites: usize, rho: DMatrix<Complex64>) -> Result<Self> {
        let dim = tensor_dimension(j, n_sites, MAX_DENSITY_DIMENSION)?;
        if rho.nrows() != dim || rho.ncols() != dim {
            return Err(Error::InvalidArgument(format!(
                "expected a {dim}x{dim} density operator, got {}x{}",
                rho.nrows(),
                rho.ncols()
            )));
        }
        let trace = rho.trace();
        if (trace.re - 1.0).abs() > 1e-12 || trace.im.abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!("trace {trace} is not 1")));
        }
        let asym = (&rho - rho.adjoint()).iter().fold(0.0f64, |m, z| m.max(z.norm()));
        if asym > 1e-10 {
            return Err(Error::InvalidArgument(format!(
                "not Hermitian (deviation {asym:e})"
            )));
        }
        let min_eig = rho.clone().symmetric_eigenvalues().min();
        if min_eig < -1e-10 {
            return Err(Error::InvalidArgument(format!(
                "not positive semidefinite (eigenvalue {min_eig:e})"
            )));
        }
        Ok(Self {
            n_sites,
            j,
            repr: Representation::Density(rho),
        })
    }

    /// Tensor product of single-site states, all with the same J.
    pub fn product(sites: &[SpinState]) -> Result<Self> {
        let j = sites
            .first()
            .ok_or_else(|| Error::InvalidArgument("need at least one site".into()))?
            .j();
        if sites.iter().any(|s| s.j() != j) {
            return Err(Error::InvalidArgument("all sites must share the same J".into()));
        }
        tensor_dimension(j, sites.len(), MAX_PURE_DIMENSION)?;
        let mut amps = vec![Complex64::new(1.0, 0.0)];
        for s in sites {
            amps = amps
                .iter()
                .flat_map(|a| s.amplitudes().iter().map(move |b| a * b))
                .collect();
        }
        Self::pure(j, sites.len(), amps)
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn j(&self) -> SpinQuantumNumber {
        self.j
    }

    pub fn dim(&self) -> usize {
        match &self.repr {
            Representation::Pure(a) => a.len(),
            Representation::Density(r) => r.nrows(),
        }
    }

    pub fn representation(&self) -> &Representation {
        &self.repr
    }

    /// Mean and variance of Σ_k c_k J_axis^(k).
    pub fn collective_moments(&self, axis: Axis, signs: &[i8]) -> Result<(f64, f64)> {
        if signs.len() != self.n_sites {
            return Err(Error::InvalidArgument(format!(
                "{} signs for {} sites",
                signs.len(),
                self.n_sites
            )));
        }
        let op = CollectiveOperator::new(self.j, self.n_sites, axis, signs);
        Ok(match &self.repr {
            Representation::Pure(psi) => {
                let a_psi = op.apply(psi);
                let mean = dot(psi, &a_psi).re;
                let second = a_psi.iter().map(|z| z.norm_sqr()).sum::<f64>();
                (mean, (second - mean * mean).max(0.0))
            }
            Representation::Density(rho) => {
                // Tr(ρA) and Tr(ρA²) = Tr(A(Aρ))
                let d = rho.nrows();
                let mut first = Complex64::new(0.0, 0.0);
                let mut second = Complex64::new(0.0, 0.0);
                for col in 0..d {
                    let column: Vec<Complex64> = rho.column(col).iter().copied().collect();
                    let a_col = op.apply(&column);
                    let aa_col = op.apply(&a_col);
                    first += a_col[col];
                    second += aa_col[col];
                }
                (first.re, (second.re - first.re * first.re).max(0.0))
            }
        })
    }
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Sparse action of a signed sum of single-site spin components.
struct CollectiveOperator {
    d: usize,
    n_sites: usize,
    axis: Axis,
    signs: Vec<f64>,
    m: Vec<f64>,
    ladder: Vec<f64>,
}

impl CollectiveOperator {
    fn new(j: SpinQuantumNumber, n_sites: usize, axis: Axis, signs: &[i8]) -> Self {
        let ops = SpinOperatorSet::new(j);
        Self {
            d: j.dim(),
            n_sites,
            axis,
            signs: signs.iter().map(|&c| c as f64).collect(),
            m: ops.jz_diagonal().to_vec(),
            ladder: ops.ladder_superdiagonal().to_vec(),
        }
    }

    fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); v.len()];
        // coefficients of J+ and J- in the chosen component
        let (up, down) = match self.axis {
            Axis::X => (Complex64::new(0.5, 0.0), Complex64::new(0.5, 0.0)),
            Axis::Y => (Complex64::new(0.0, -0.5), Complex64::new(0.0, 0.5)),
            Axis::Z => (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)),
        };
        let mut stride = v.len();
        for site in 0..self.n_sites {
            stride /= self.d;
            let c = self.signs[site];
            for (idx, &amp) in v.iter().enumerate() {
                if amp == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let local = (idx / stride) % self.d;
                match self.axis {
                    Axis::Z => out[idx] += amp * (c * self.m[local]),
                    _ => {
                        if local + 1 < self.d {
                            out[idx + stride] += amp * up * (c * self.ladder[local]);
                        }
                        if local > 0 {
                            out[idx - stride] += amp * down * (c * self.ladder[local - 1]);
                        }
                    }
                }
            }
        }
        out
    }
}

/// S₂ = Δ²J_X^tot + Δ²J_Y^tot for the given signs.
pub fn s2(state: &MultiSiteState, signs: &SignConfig) -> Result<f64> {
    let (_, vx) = state.collective_moments(Axis::X, signs.x())?;
    let (_, vy) = state.collective_moments(Axis::Y, signs.y())?;
    Ok(vx + vy)
}

/// (2J+1)^{-1/2} Σ_m |m⟩^{⊗N}.
pub fn maximally_entangled_state(j: SpinQuantumNumber, n_sites: usize) -> Result<MultiSiteState> {
    let dim = tensor_dimension(j, n_sites, MAX_PURE_DIMENSION)?;
    let d = j.dim();
    // index of |k⟩^{⊗N} is k(1 + d + ... + d^{N-1})
    let step: usize = (0..n_sites).map(|i| d.pow(i as u32)).sum();
    let mut amps = vec![Complex64::new(0.0, 0.0); dim];
    for k in 0..d {
        amps[k * step] = Complex64::new(1.0, 0.0);
    }
    MultiSiteState::pure(j, n_sites, amps)
}

/// Two-site singlet ∝ Σ_m (-1)^{J-m} |m⟩|-m⟩.
pub fn singlet_state(j: SpinQuantumNumber) -> Result<MultiSiteState> {
    let d = j.dim();
    tensor_dimension(j, 2, MAX_PURE_DIMENSION)?;
    let mut amps = vec![Complex64::new(0.0, 0.0); d * d];
    for k in 0..d {
        let sign = if (d - 1 - k).is_multiple_of(2) { 1.0 } else { -1.0 };
        amps[k * d + (d - 1 - k)] = Complex64::new(sign, 0.0);
    }
    MultiSiteState::pure(j, 2, amps)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WernerParams {
    j: SpinQuantumNumber,
    n_sites: usize,
    p_n: f64,
}

impl WernerParams {
    pub fn new(j: SpinQuantumNumber, n_sites: usize, p_n: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p_n) {
            return Err(Error::InvalidArgument(format!("p_n = {p_n} outside [0, 1]")));
        }
        if n_sites == 0 {
            return Err(Error::InvalidArgument("need at least one site".into()));
        }
        Ok(Self { j, n_sites, p_n })
    }

    pub fn j(&self) -> SpinQuantumNumber {
        self.j
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn p_n(&self) -> f64 {
        self.p_n
    }
}

/// p·[I/(2J+1)]^{⊗2} + (1-p)|S⟩⟨S| for two sites.
pub fn werner_state(params: &WernerParams) -> Result<MultiSiteState> {
    if params.n_sites != 2 {
        return Err(Error::InvalidArgument(format!(
            "explicit Werner states are two-site only, got {}",
            params.n_sites
        )));
    }
    let j = params.j;
    let dim = tensor_dimension(j, 2, MAX_DENSITY_DIMENSION)?;
    let Representation::Pure(s) = singlet_state(j)?.repr else {
        unreachable!("singlet is pure")
    };
    let p = params.p_n;
    let mut rho = DMatrix::from_fn(dim, dim, |a, b| s[a] * s[b].conj() * (1.0 - p));
    for i in 0..dim {
        rho[(i, i)] += Complex64::new(p / dim as f64, 0.0);
    }
    // positive by construction; skip the eigenvalue check
    Ok(MultiSiteState {
        n_sites: 2,
        j,
        repr: Representation::Density(rho),
    })
}

/// S₂ = (2N/3) J(J+1) p_n.
pub fn werner_s2_closed(params: &WernerParams) -> f64 {
    2.0 * params.n_sites as f64 / 3.0 * params.j.casimir() * params.p_n
}

/// Largest white-noise weight at which the Werner state is still detected.
pub fn noise_threshold(j: SpinQuantumNumber) -> Result<f64> {
    if j.two_j() == 0 {
        return Err(Error::InvalidArgument("noise threshold needs J > 0".into()));
    }
    let c = cj_exact(j, DEFAULT_TOL)?.c_exact;
    Ok(noise_threshold_from_bound(j, c))
}

pub fn noise_threshold_from_bound(j: SpinQuantumNumber, c_j: f64) -> f64 {
    3.0 * c_j / (2.0 * j.casimir())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Entangled,
    NotDetected,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Entangled => "entangled",
            Verdict::NotDetected => "not_detected",
        })
    }
}

pub fn witness(s2_value: f64, n_sites: usize, j: SpinQuantumNumber) -> Result<Verdict> {
    let c = cj_exact(j, DEFAULT_TOL)?.c_exact;
    Ok(witness_with_bound(s2_value, n_sites, c))
}

/// Entangled iff S₂ < N·C_J - margin.
pub fn witness_with_bound(s2_value: f64, n_sites: usize, c_j: f64) -> Verdict {
    if s2_value < n_sites as f64 * c_j - WITNESS_MARGIN {
        Verdict::Entangled
    } else {
        Verdict::NotDetected
    }
}

/// One point of the normalized Werner witness curve.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessRow {
    pub p_n: f64,
    pub s2_over_nj: f64,
    pub cj_over_j: f64,
    pub verdict: Verdict,
}

/// S₂/(NJ) of the N-site Werner state against C_J/J over a noise grid.
pub fn werner_curve(j: SpinQuantumNumber, n_sites: usize, p_values: &[f64]) -> Result<Vec<WitnessRow>> {
    if j.two_j() == 0 {
        return Err(Error::InvalidArgument("witness curve needs J > 0".into()));
    }
    let c = cj_exact(j, DEFAULT_TOL)?.c_exact;
    let nj = n_sites as f64 * j.value();
    p_values
        .iter()
        .map(|&p| {
            let s = werner_s2_closed(&WernerParams::new(j, n_sites, p)?);
            Ok(WitnessRow {
                p_n: p,
                s2_over_nj: s / nj,
                cj_over_j: c / j.value(),
                verdict: witness_with_bound(s, n_sites, c),
            })
        })
        .collect()
}
