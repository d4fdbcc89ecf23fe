//! Finite-dimensional spin-J algebra in the J_Z eigenbasis.
//!
//! Index convention used everywhere in this crate: array index `k` holds the
//! amplitude of |J, m⟩ with `m = k - J`, so `k = 0` is m = -J and `k = 2J` is
//! m = +J.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tridiag::SymTridiagonal;

/// Spin quantum number stored as `2J` so half-integers are exact.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SpinQuantumNumber {
    two_j: u32,
}

impl SpinQuantumNumber {
    pub const fn from_two_j(two_j: u32) -> Self {
        Self { two_j }
    }

    /// Parses a non-negative integer or half-integer value of J.
    pub fn from_f64(j: f64) -> Result<Self> {
        let two_j = 2.0 * j;
        if !j.is_finite() || j < 0.0 || (two_j - two_j.round()).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!(
                "J = {j} is not a non-negative half-integer"
            )));
        }
        if two_j.round() > u32::MAX as f64 {
            return Err(Error::InvalidArgument(format!("J = {j} is too large")));
        }
        Ok(Self {
            two_j: two_j.round() as u32,
        })
    }

    pub const fn two_j(self) -> u32 {
        self.two_j
    }

    pub fn value(self) -> f64 {
        self.two_j as f64 / 2.0
    }

    /// Hilbert-space dimension 2J + 1.
    pub const fn dim(self) -> usize {
        self.two_j as usize + 1
    }

    /// J(J + 1).
    pub fn casimir(self) -> f64 {
        let j = self.value();
        j * (j + 1.0)
    }

    /// J + 1/2.
    pub fn j_tilde(self) -> f64 {
        self.value() + 0.5
    }

    /// Magnetic quantum number stored at array index `k`.
    pub fn m(self, k: usize) -> f64 {
        k as f64 - self.value()
    }

    pub fn m_values(self) -> impl Iterator<Item = f64> {
        (0..self.dim()).map(move |k| self.m(k))
    }

    pub const fn is_half_integer(self) -> bool {
        self.two_j % 2 == 1
    }
}

impl fmt::Display for SpinQuantumNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_half_integer() {
            write!(f, "{}/2", self.two_j)
        } else {
            write!(f, "{}", self.two_j / 2)
        }
    }
}

/// Sparse representation of J_X, J_Y, J_Z for a fixed J.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinOperatorSet {
    j: SpinQuantumNumber,
    jz_diagonal: Vec<f64>,
    /// `ladder[k] = ⟨m+1|J+|m⟩ = sqrt(J(J+1) - m(m+1))` with `m = k - J`.
    ladder: Vec<f64>,
}

pub fn build_operator_set(j: SpinQuantumNumber) -> SpinOperatorSet {
    SpinOperatorSet::new(j)
}

impl SpinOperatorSet {
    pub fn new(j: SpinQuantumNumber) -> Self {
        let jj = j.value();
        let jz_diagonal: Vec<f64> = j.m_values().collect();
        // (J - m)(J + m + 1) is exact in f64 for half-integer m
        let ladder = (0..j.dim().saturating_sub(1))
            .map(|k| {
                let m = j.m(k);
                ((jj - m) * (jj + m + 1.0)).sqrt()
            })
            .collect();
        Self {
            j,
            jz_diagonal,
            ladder,
        }
    }

    pub fn j(&self) -> SpinQuantumNumber {
        self.j
    }

    pub fn jz_diagonal(&self) -> &[f64] {
        &self.jz_diagonal
    }

    pub fn ladder_superdiagonal(&self) -> &[f64] {
        &self.ladder
    }

    /// J_X as a real symmetric tridiagonal matrix (zero diagonal).
    pub fn jx_tridiagonal(&self) -> SymTridiagonal {
        SymTridiagonal::new(
            vec![0.0; self.j.dim()],
            self.ladder.iter().map(|l| 0.5 * l).collect(),
        )
        .expect("consistent lengths")
    }

    pub fn apply_jz(&self, psi: &[Complex64]) -> Vec<Complex64> {
        psi.iter().zip(&self.jz_diagonal).map(|(a, m)| a * m).collect()
    }

    pub fn apply_jplus(&self, psi: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); psi.len()];
        for (k, l) in self.ladder.iter().enumerate() {
            out[k + 1] = psi[k] * l;
        }
        out
    }

    pub fn apply_jminus(&self, psi: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); psi.len()];
        for (k, l) in self.ladder.iter().enumerate() {
            out[k] = psi[k + 1] * l;
        }
        out
    }

    pub fn apply_jx(&self, psi: &[Complex64]) -> Vec<Complex64> {
        let up = self.apply_jplus(psi);
        let down = self.apply_jminus(psi);
        up.iter().zip(&down).map(|(u, d)| 0.5 * (u + d)).collect()
    }

    pub fn apply_jy(&self, psi: &[Complex64]) -> Vec<Complex64> {
        let up = self.apply_jplus(psi);
        let down = self.apply_jminus(psi);
        // (J+ - J-) / 2i
        up.iter()
            .zip(&down)
            .map(|(u, d)| (u - d) * Complex64::new(0.0, -0.5))
            .collect()
    }

    fn dense_jplus(&self) -> DMatrix<Complex64> {
        let d = self.j.dim();
        let mut m = DMatrix::zeros(d, d);
        for (k, l) in self.ladder.iter().enumerate() {
            m[(k + 1, k)] = Complex64::new(*l, 0.0);
        }
        m
    }

    pub fn dense_jx(&self) -> DMatrix<Complex64> {
        let p = self.dense_jplus();
        (&p + p.adjoint()).map(|z| z * 0.5)
    }

    pub fn dense_jy(&self) -> DMatrix<Complex64> {
        let p = self.dense_jplus();
        (&p - p.adjoint()).map(|z| z * Complex64::new(0.0, -0.5))
    }

    pub fn dense_jz(&self) -> DMatrix<Complex64> {
        DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            self.j.dim(),
            self.jz_diagonal.iter().map(|&m| Complex64::new(m, 0.0)),
        ))
    }
}

/// Normalized pure state of a single spin J.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StateRecord", into = "StateRecord")]
pub struct SpinState {
    j: SpinQuantumNumber,
    amplitudes: Vec<Complex64>,
}

/// Wire form: `{"two_j": n, "amplitudes": [[re, im], ...]}`.
#[derive(Serialize, Deserialize)]
struct StateRecord {
    two_j: u32,
    amplitudes: Vec<[f64; 2]>,
}

impl TryFrom<StateRecord> for SpinState {
    type Error = Error;

    fn try_from(rec: StateRecord) -> Result<Self> {
        let amps = rec
            .amplitudes
            .iter()
            .map(|[re, im]| Complex64::new(*re, *im))
            .collect();
        SpinState::new(SpinQuantumNumber::from_two_j(rec.two_j), amps)
    }
}

impl From<SpinState> for StateRecord {
    fn from(s: SpinState) -> Self {
        Self {
            two_j: s.j.two_j(),
            amplitudes: s.amplitudes.iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

impl SpinState {
    /// Builds a state from raw amplitudes, normalizing them.
    pub fn new(j: SpinQuantumNumber, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != j.dim() {
            return Err(Error::InvalidArgument(format!(
                "expected {} amplitudes for J = {j}, got {}",
                j.dim(),
                amplitudes.len()
            )));
        }
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidArgument("non-finite amplitude".into()));
        }
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidArgument("zero state vector".into()));
        }
        // already-normalized input is kept bit-for-bit (lossless round trips)
        let amplitudes = if (norm - 1.0).abs() > 1e-14 {
            amplitudes.into_iter().map(|z| z / norm).collect()
        } else {
            amplitudes
        };
        Ok(Self { j, amplitudes })
    }

    pub fn from_real(j: SpinQuantumNumber, amplitudes: &[f64]) -> Result<Self> {
        Self::new(j, amplitudes.iter().map(|&r| Complex64::new(r, 0.0)).collect())
    }

    /// |J, m⟩ with `m = k - J`.
    pub fn basis(j: SpinQuantumNumber, k: usize) -> Result<Self> {
        if k >= j.dim() {
            return Err(Error::InvalidArgument(format!(
                "basis index {k} out of range for J = {j}"
            )));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); j.dim()];
        amps[k] = Complex64::new(1.0, 0.0);
        Ok(Self { j, amplitudes: amps })
    }

    /// |J, m = J⟩, the top of the J_Z ladder.
    pub fn highest_weight(j: SpinQuantumNumber) -> Self {
        Self::basis(j, j.dim() - 1).expect("index in range")
    }

    /// Coherent spin state pointing along +X: amplitudes sqrt(C(2J, J+m)) / 2^J.
    pub fn coherent_x(j: SpinQuantumNumber) -> Self {
        let n = j.two_j() as usize;
        // log of the binomial weights, accumulated by ratio to avoid overflow
        let mut log_w = Vec::with_capacity(n + 1);
        let mut acc = 0.0;
        log_w.push(acc);
        for k in 0..n {
            acc += ((n - k) as f64 / (k + 1) as f64).ln();
            log_w.push(acc);
        }
        let max = log_w.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let amps: Vec<f64> = log_w.iter().map(|l| (0.5 * (l - max)).exp()).collect();
        Self::from_real(j, &amps).expect("positive weights")
    }

    /// Random state with independent complex Gaussian amplitudes (unitarily invariant).
    pub fn random<R: Rng + ?Sized>(j: SpinQuantumNumber, rng: &mut R) -> Self {
        loop {
            let amps = (0..j.dim())
                .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
                .collect();
            if let Ok(s) = Self::new(j, amps) {
                return s;
            }
        }
    }

    /// Random state with real Gaussian amplitudes.
    pub fn random_real<R: Rng + ?Sized>(j: SpinQuantumNumber, rng: &mut R) -> Self {
        loop {
            let amps: Vec<f64> = (0..j.dim()).map(|_| rng.sample(StandardNormal)).collect();
            if let Ok(s) = Self::from_real(j, &amps) {
                return s;
            }
        }
    }

    pub fn j(&self) -> SpinQuantumNumber {
        self.j
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }

    /// ⟨self|other⟩
    pub fn inner(&self, other: &SpinState) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.amplitudes.iter().all(|z| z.im.abs() <= tol)
    }

    /// Multiplies amplitude `k` by (-1)^k, mapping J_X → -J_X and J_Y → -J_Y.
    pub fn parity_flipped(&self) -> SpinState {
        let amplitudes = self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(k, z)| if k % 2 == 1 { -z } else { *z })
            .collect();
        SpinState {
            j: self.j,
            amplitudes,
        }
    }

    pub fn moments(&self) -> SpinMoments {
        moments(self)
    }

    pub fn rotate_about_z(&self, angle: f64) -> SpinState {
        rotate_about_z(self, angle)
    }
}

/// First and symmetrized second moments of J_X, J_Y, J_Z.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpinMoments {
    pub mean: [f64; 3],
    /// `second[i][j] = ⟨{J_i, J_j}⟩ / 2`
    pub second: [[f64; 3]; 3],
    pub variances: [f64; 3],
    pub planar_sum: f64,
}

impl SpinMoments {
    pub fn mean_x(&self) -> f64 {
        self.mean[0]
    }
    pub fn mean_y(&self) -> f64 {
        self.mean[1]
    }
    pub fn mean_z(&self) -> f64 {
        self.mean[2]
    }
    pub fn var_x(&self) -> f64 {
        self.variances[0]
    }
    pub fn var_y(&self) -> f64 {
        self.variances[1]
    }
    pub fn var_z(&self) -> f64 {
        self.variances[2]
    }

    /// Symmetrized covariance ⟨{J_a, J_b}⟩/2 - ⟨J_a⟩⟨J_b⟩.
    pub fn covariance(&self, a: usize, b: usize) -> f64 {
        self.second[a][b] - self.mean[a] * self.mean[b]
    }

    pub fn total_spin(&self) -> f64 {
        self.second[0][0] + self.second[1][1] + self.second[2][2]
    }
}

pub fn moments(state: &SpinState) -> SpinMoments {
    let ops = SpinOperatorSet::new(state.j);
    let psi = state.amplitudes();
    let images = [ops.apply_jx(psi), ops.apply_jy(psi), ops.apply_jz(psi)];

    let dot =
        |a: &[Complex64], b: &[Complex64]| -> f64 { a.iter().zip(b).map(|(x, y)| (x.conj() * y).re).sum() };

    let mut mean = [0.0; 3];
    let mut second = [[0.0; 3]; 3];
    for a in 0..3 {
        mean[a] = dot(psi, &images[a]);
        for b in a..3 {
            // Re⟨J_a ψ|J_b ψ⟩ = ⟨{J_a, J_b}⟩/2 for Hermitian J_a, J_b
            let v = dot(&images[a], &images[b]);
            second[a][b] = v;
            second[b][a] = v;
        }
    }
    let variances = [0, 1, 2].map(|a| (second[a][a] - mean[a] * mean[a]).max(0.0));
    SpinMoments {
        mean,
        second,
        variances,
        planar_sum: variances[0] + variances[1],
    }
}

/// Applies exp(-i·angle·J_Z): amplitude of |m⟩ picks up e^{-i·angle·m}.
///
/// Means transform as ⟨J_X⟩ → ⟨J_X⟩cos(angle) - ⟨J_Y⟩sin(angle).
pub fn rotate_about_z(state: &SpinState, angle: f64) -> SpinState {
    let j = state.j;
    let amplitudes = state
        .amplitudes
        .iter()
        .enumerate()
        .map(|(k, z)| z * Complex64::from_polar(1.0, -angle * j.m(k)))
        .collect();
    SpinState { j, amplitudes }
}

/// Moment formulas written as index-shifted sums over real amplitudes.
///
/// These are evaluated independently of the operator matrices and exist to
/// cross-check [`moments`].
pub mod shifted_sums {
    use super::SpinQuantumNumber;

    /// ⟨J_X² + J_Y²⟩ = -1/4 + Σ_m R_m² (J̃² - m²) / n
    pub fn squared_planar_projection(j: SpinQuantumNumber, r: &[f64]) -> f64 {
        let jt = j.j_tilde();
        let n: f64 = r.iter().map(|x| x * x).sum();
        let s: f64 = r
            .iter()
            .enumerate()
            .map(|(k, x)| {
                let m = j.m(k);
                x * x * (jt * jt - m * m)
            })
            .sum();
        -0.25 + s / n
    }

    /// ⟨J_X⟩ = Σ_M R_{M+1/2} R_{M-1/2} sqrt(J̃² - M²) / n, M over the half-shifted grid.
    pub fn mean_x(j: SpinQuantumNumber, r: &[f64]) -> f64 {
        let jt = j.j_tilde();
        let n: f64 = r.iter().map(|x| x * x).sum();
        let s: f64 = r
            .windows(2)
            .enumerate()
            .map(|(k, w)| {
                let big_m = j.m(k) + 0.5;
                w[0] * w[1] * (jt * jt - big_m * big_m).sqrt()
            })
            .sum();
        s / n
    }

    /// ⟨J_X²⟩ and ⟨J_Y²⟩ for real amplitudes via the m → m+2 coupling sum.
    pub fn squared_components(j: SpinQuantumNumber, r: &[f64]) -> (f64, f64) {
        let jj = j.value();
        let n: f64 = r.iter().map(|x| x * x).sum();
        let diag: f64 = r
            .iter()
            .enumerate()
            .map(|(k, x)| {
                let m = j.m(k);
                (jj * jj - m * m + jj) * x * x
            })
            .sum();
        let jp = jj + 1.0;
        let off: f64 = r
            .windows(3)
            .enumerate()
            .map(|(k, w)| {
                let mp = j.m(k) + 1.0;
                ((jp * jp - mp * mp) * (jj * jj - mp * mp)).max(0.0).sqrt() * w[0] * w[2]
            })
            .sum();
        ((diag + off) / (2.0 * n), (diag - off) / (2.0 * n))
    }
}
