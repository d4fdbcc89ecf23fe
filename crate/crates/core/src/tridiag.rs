//! Real symmetric tridiagonal eigenproblems.
//!
//! Two routes are provided: a full decomposition by implicit QL iteration
//! (all eigenvalues and eigenvectors), and a cheap path for the lowest
//! eigenpair that locates the eigenvalue by Sturm-sequence bisection and the
//! vector by inverse iteration. The cheap path is O(d) per call and is what
//! the ground-state solvers use.

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct SymTridiagonal {
    diag: Vec<f64>,
    off: Vec<f64>,
}

/// Eigenvalues in ascending order with matching unit eigenvectors.
#[derive(Clone, Debug)]
pub struct SymEigen {
    pub values: Vec<f64>,
    /// column-major, `vectors[i * n .. (i + 1) * n]` belongs to `values[i]`
    vectors: Vec<f64>,
    n: usize,
}

impl SymEigen {
    pub fn vector(&self, i: usize) -> &[f64] {
        &self.vectors[i * self.n..(i + 1) * self.n]
    }

    pub fn dim(&self) -> usize {
        self.n
    }
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Result<Self> {
        if diag.is_empty() || off.len() + 1 != diag.len() {
            return Err(Error::InvalidArgument(format!(
                "tridiagonal needs d >= 1 diagonal and d - 1 off-diagonal entries, got {} and {}",
                diag.len(),
                off.len()
            )));
        }
        Ok(Self { diag, off })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn off(&self) -> &[f64] {
        &self.off
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let mut y: Vec<f64> = self.diag.iter().zip(x).map(|(d, v)| d * v).collect();
        for i in 0..n - 1 {
            y[i] += self.off[i] * x[i + 1];
            y[i + 1] += self.off[i] * x[i];
        }
        y
    }

    pub fn rayleigh_quotient(&self, x: &[f64]) -> f64 {
        let y = self.matvec(x);
        let num: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
        let den: f64 = x.iter().map(|a| a * a).sum();
        num / den
    }

    /// Gershgorin interval containing every eigenvalue.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.dim();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let left = if i > 0 { self.off[i - 1].abs() } else { 0.0 };
            let right = if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - left - right);
            hi = hi.max(self.diag[i] + left + right);
        }
        (lo, hi)
    }

    /// Number of eigenvalues strictly below `x` (Sturm sequence count).
    pub fn count_below(&self, x: f64) -> usize {
        let scale = self.gershgorin_scale();
        let tiny = f64::EPSILON * scale.max(f64::MIN_POSITIVE);
        let mut count = 0;
        let mut q = self.diag[0] - x;
        for i in 0..self.dim() {
            if i > 0 {
                q = self.diag[i] - x - self.off[i - 1] * self.off[i - 1] / q;
            }
            if q == 0.0 {
                q = -tiny;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn gershgorin_scale(&self) -> f64 {
        let (lo, hi) = self.gershgorin();
        lo.abs().max(hi.abs())
    }

    /// The k-th smallest eigenvalue (k = 0 is the minimum) by bisection.
    pub fn eigenvalue_by_bisection(&self, k: usize) -> f64 {
        assert!(k < self.dim());
        let (mut lo, mut hi) = self.gershgorin();
        let pad = 1e-12 * (hi - lo).abs().max(1.0);
        lo -= pad;
        hi += pad;
        for _ in 0..256 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Solves (T - shift·I) x = b by Gaussian elimination with partial
    /// pivoting. Exactly singular pivots are replaced by a tiny value, which
    /// is the usual treatment inside inverse iteration.
    fn shifted_solve(&self, shift: f64, b: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let tiny = f64::EPSILON * self.gershgorin_scale().max(1.0);
        // row i of U holds (u0, u1, u2) at columns (i, i+1, i+2)
        let mut u0 = vec![0.0; n];
        let mut u1 = vec![0.0; n];
        let mut u2 = vec![0.0; n];
        let mut rhs = b.to_vec();

        // current row being eliminated: (a, c, 0) with a at column i
        let mut a = self.diag[0] - shift;
        let mut c = if n > 1 { self.off[0] } else { 0.0 };
        let mut c2 = 0.0;
        for i in 0..n {
            if i + 1 == n {
                u0[i] = if a == 0.0 { tiny } else { a };
                u1[i] = 0.0;
                u2[i] = 0.0;
                break;
            }
            // next row: (sub, diag, sup) at columns (i, i+1, i+2)
            let sub = self.off[i];
            let nd = self.diag[i + 1] - shift;
            let nsup = if i + 2 < n { self.off[i + 1] } else { 0.0 };
            if a.abs() >= sub.abs() {
                let piv = if a == 0.0 { tiny } else { a };
                let l = sub / piv;
                u0[i] = piv;
                u1[i] = c;
                u2[i] = c2;
                rhs[i + 1] -= l * rhs[i];
                a = nd - l * c;
                c = nsup - l * c2;
            } else {
                // swap current row with next row
                let l = a / sub;
                u0[i] = sub;
                u1[i] = nd;
                u2[i] = nsup;
                rhs.swap(i, i + 1);
                rhs[i + 1] -= l * rhs[i];
                let new_a = c - l * nd;
                let new_c = c2 - l * nsup;
                a = new_a;
                c = new_c;
            }
            c2 = 0.0;
        }

        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut s = rhs[i];
            if i + 1 < n {
                s -= u1[i] * x[i + 1];
            }
            if i + 2 < n {
                s -= u2[i] * x[i + 2];
            }
            x[i] = s / u0[i];
        }
        x
    }

    /// Eigenvector for an (accurately known) eigenvalue by inverse iteration.
    pub fn inverse_iteration(&self, eigenvalue: f64) -> Vec<f64> {
        let n = self.dim();
        // deterministic start vector with no special symmetry
        let mut x: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * ((i as f64) * 0.7).sin()).collect();
        normalize(&mut x);
        for _ in 0..4 {
            let mut y = self.shifted_solve(eigenvalue, &x);
            if y.iter().any(|v| !v.is_finite()) {
                // overflow from an exact pivot hit; nudge the shift
                let nudge = 1e3 * f64::EPSILON * self.gershgorin_scale().max(1.0);
                y = self.shifted_solve(eigenvalue - nudge, &x);
            }
            normalize(&mut y);
            let overlap: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
            x = y;
            if (1.0 - overlap.abs()) < 1e-15 {
                break;
            }
        }
        x
    }

    /// Lowest eigenvalue and its unit eigenvector.
    ///
    /// The returned eigenvalue is the Rayleigh quotient of the returned
    /// vector, which is accurate to O(eps · ‖T‖).
    pub fn lowest_eigenpair(&self) -> (f64, Vec<f64>) {
        let e0 = self.eigenvalue_by_bisection(0);
        let v = self.inverse_iteration(e0);
        (self.rayleigh_quotient(&v), v)
    }

    /// Full decomposition by implicit QL with Wilkinson-style shifts.
    ///
    /// Each eigenvector's first component of magnitude above 1e-12 is made
    /// positive.
    pub fn eigh(&self) -> Result<SymEigen> {
        let n = self.dim();
        let mut d = self.diag.clone();
        let mut e = self.off.clone();
        e.push(0.0);
        let mut z = vec![0.0; n * n];
        for i in 0..n {
            z[i * n + i] = 1.0;
        }

        for l in 0..n {
            let mut iter = 0;
            loop {
                let mut m = l;
                while m + 1 < n {
                    let dd = d[m].abs() + d[m + 1].abs();
                    if e[m].abs() <= f64::EPSILON * dd {
                        break;
                    }
                    m += 1;
                }
                if m == l {
                    break;
                }
                iter += 1;
                if iter > 60 {
                    return Err(Error::NonConvergence {
                        what: "implicit QL",
                        detail: format!("eigenvalue {l} after 60 sweeps"),
                    });
                }
                let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                let mut r = g.hypot(1.0);
                g = d[m] - d[l] + e[l] / (g + r.copysign(g));
                let mut s = 1.0;
                let mut c = 1.0;
                let mut p = 0.0;
                let mut deflated = false;
                let mut i = m;
                while i > l {
                    i -= 1;
                    let f = s * e[i];
                    let b = c * e[i];
                    r = f.hypot(g);
                    e[i + 1] = r;
                    if r == 0.0 {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        deflated = true;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                    let (left, right) = z.split_at_mut((i + 1) * n);
                    let zi = &mut left[i * n..(i + 1) * n];
                    let zi1 = &mut right[..n];
                    for k in 0..n {
                        let f = zi1[k];
                        zi1[k] = s * zi[k] + c * f;
                        zi[k] = c * zi[k] - s * f;
                    }
                }
                if deflated {
                    continue;
                }
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        }

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
        let values = order.iter().map(|&i| d[i]).collect();
        let mut vectors = Vec::with_capacity(n * n);
        for &i in &order {
            let col = &z[i * n..(i + 1) * n];
            let sign = col.iter().find(|v| v.abs() > 1e-12).map_or(1.0, |v| v.signum());
            vectors.extend(col.iter().map(|v| v * sign));
        }
        Ok(SymEigen { values, vectors, n })
    }
}

fn normalize(x: &mut [f64]) {
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        x.iter_mut().for_each(|v| *v /= norm);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn laplacian(n: usize) -> SymTridiagonal {
        SymTridiagonal::new(vec![2.0; n], vec![-1.0; n - 1]).unwrap()
    }

    // eigenvalues of the 1-D Dirichlet Laplacian: 2 - 2 cos(kπ/(n+1))
    fn laplacian_eigenvalue(n: usize, k: usize) -> f64 {
        2.0 - 2.0 * ((k + 1) as f64 * std::f64::consts::PI / (n + 1) as f64).cos()
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(SymTridiagonal::new(vec![], vec![]).is_err());
        assert!(SymTridiagonal::new(vec![1.0, 2.0], vec![]).is_err());
    }

    #[test]
    fn full_decomposition_matches_closed_form() {
        let n = 40;
        let eig = laplacian(n).eigh().unwrap();
        for k in 0..n {
            assert_abs_diff_eq!(eig.values[k], laplacian_eigenvalue(n, k), epsilon = 1e-12);
        }
    }

    #[test]
    fn eigenvectors_are_orthonormal_and_satisfy_equation() {
        let t = SymTridiagonal::new(
            vec![0.3, -1.2, 4.0, 0.0, 2.5, 1.0],
            vec![0.7, 0.0, -2.0, 1.1, 0.4],
        )
        .unwrap();
        let eig = t.eigh().unwrap();
        for i in 0..t.dim() {
            let v = eig.vector(i);
            let tv = t.matvec(v);
            for (a, b) in tv.iter().zip(v) {
                assert_abs_diff_eq!(*a, eig.values[i] * b, epsilon = 1e-12);
            }
            for j in 0..t.dim() {
                let dot: f64 = v.iter().zip(eig.vector(j)).map(|(a, b)| a * b).sum();
                assert_abs_diff_eq!(dot, if i == j { 1.0 } else { 0.0 }, epsilon = 1e-12);
            }
            let first = v.iter().find(|x| x.abs() > 1e-12).unwrap();
            assert!(*first > 0.0);
        }
    }

    #[test]
    fn bisection_matches_full_decomposition() {
        let t = SymTridiagonal::new(
            (0..30).map(|i| ((i * 7) % 11) as f64 - 5.0).collect(),
            (0..29).map(|i| 0.5 + ((i * 3) % 5) as f64).collect(),
        )
        .unwrap();
        let eig = t.eigh().unwrap();
        for k in [0, 1, 5, 29] {
            assert_abs_diff_eq!(t.eigenvalue_by_bisection(k), eig.values[k], epsilon = 1e-11);
        }
        assert_eq!(t.count_below(eig.values[3] + 1e-9), 4);
    }

    #[test]
    fn lowest_eigenpair_of_large_matrix() {
        let n = 5000;
        let t = laplacian(n);
        let (e0, v) = t.lowest_eigenpair();
        assert_abs_diff_eq!(e0, laplacian_eigenvalue(n, 0), epsilon = 1e-13);
        let r = t.matvec(&v);
        let resid = r
            .iter()
            .zip(&v)
            .map(|(a, b)| (a - e0 * b).powi(2))
            .sum::<f64>()
            .sqrt();
        assert!(resid < 1e-10, "residual {resid}");
    }

    #[test]
    fn lowest_eigenpair_with_decoupled_blocks() {
        // zero off-diagonal splits the matrix; lowest eigenvalue sits in the middle block
        let t = SymTridiagonal::new(vec![3.0, 1.0, -2.0, 5.0], vec![0.0, 0.0, 0.0]).unwrap();
        let (e0, v) = t.lowest_eigenpair();
        assert_abs_diff_eq!(e0, -2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(v[2].abs(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn one_by_one() {
        let t = SymTridiagonal::new(vec![4.5], vec![]).unwrap();
        assert_eq!(t.eigh().unwrap().values, vec![4.5]);
        let (e0, v) = t.lowest_eigenpair();
        assert_abs_diff_eq!(e0, 4.5);
        assert_abs_diff_eq!(v[0].abs(), 1.0);
    }
}
