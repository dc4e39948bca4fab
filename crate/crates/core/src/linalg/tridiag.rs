use alloc::vec;
use alloc::vec::Vec;

use crate::float::abs;

/// Eigenvalue sign counts of a symmetric matrix, with |λ| < zero_tol
/// attributed to the zero bucket.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Inertia {
    pub neg: usize,
    pub zero: usize,
    pub pos: usize,
}

/// Symmetric tridiagonal matrix: main diagonal plus one symmetric
/// off-diagonal band.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiag {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl SymTridiag {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Self {
        assert!(!diag.is_empty());
        assert_eq!(off.len() + 1, diag.len(), "off-diagonal length must be n-1");
        Self { diag, off }
    }

    /// Constant off-diagonal value, the usual lattice case.
    pub fn with_constant_off(diag: Vec<f64>, off_value: f64) -> Self {
        let n = diag.len();
        Self::new(diag, vec![off_value; n.saturating_sub(1)])
    }

    pub fn n(&self) -> usize {
        self.diag.len()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n();
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut s = self.diag[i] * x[i];
            if i > 0 {
                s += self.off[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                s += self.off[i] * x[i + 1];
            }
            y[i] = s;
        }
        y
    }

    /// Gershgorin bound on the spectral radius.
    pub fn bound(&self) -> f64 {
        let n = self.n();
        let mut b = 0.0f64;
        for i in 0..n {
            let e_l = if i > 0 { abs(self.off[i - 1]) } else { 0.0 };
            let e_r = if i + 1 < n { abs(self.off[i]) } else { 0.0 };
            b = b.max(abs(self.diag[i]) + e_l + e_r);
        }
        b
    }

    /// Number of eigenvalues strictly below `lambda`, by the Sturm sequence
    /// (count of negative pivots in the LDLᵀ factorization of A − λI).
    pub fn count_below(&self, lambda: f64) -> usize {
        let n = self.n();
        let mut count = 0;
        let mut d = self.diag[0] - lambda;
        if d < 0.0 {
            count += 1;
        }
        for i in 1..n {
            let safe = if abs(d) < 1e-300 {
                if d >= 0.0 {
                    1e-300
                } else {
                    -1e-300
                }
            } else {
                d
            };
            d = (self.diag[i] - lambda) - self.off[i - 1] * self.off[i - 1] / safe;
            if d < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// All eigenvalues in ascending order via Sturm bisection.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let n = self.n();
        if n == 1 {
            return vec![self.diag[0]];
        }
        let hi = self.bound() + 1.0;
        let lo = -hi;
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            let mut a = lo;
            let mut b = hi;
            for _ in 0..200 {
                let mid = 0.5 * (a + b);
                if (b - a) < 2.0 * f64::EPSILON * abs(mid).max(1.0) {
                    break;
                }
                if self.count_below(mid) <= k {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            out.push(0.5 * (a + b));
        }
        out
    }

    /// Signed eigenvalue counts below −zero_tol / inside / above +zero_tol.
    pub fn inertia(&self, zero_tol: f64) -> Inertia {
        let below = self.count_below(-zero_tol);
        let upto = self.count_below(zero_tol);
        Inertia {
            neg: below,
            zero: upto - below,
            pos: self.n() - upto,
        }
    }

    /// Solve A x = rhs with partial pivoting; `None` when singular.
    pub fn solve(&self, rhs: &[f64]) -> Option<Vec<f64>> {
        solve_tridiag(&self.off, &self.diag, &self.off, rhs)
    }

    /// Eigenvector for an isolated eigenvalue, by shifted inverse iteration.
    pub fn eigenvector(&self, lambda: f64) -> Option<Vec<f64>> {
        let n = self.n();
        // Tiny shift keeps the shifted matrix factorizable when lambda is
        // numerically exact.
        let shift = lambda + 1e-12 * self.bound().max(1.0);
        let shifted = SymTridiag::new(
            self.diag.iter().map(|d| d - shift).collect(),
            self.off.clone(),
        );
        let mut v = vec![0.0; n];
        for (i, vi) in v.iter_mut().enumerate() {
            // Fixed pseudo-random start, deterministic across runs.
            *vi = 0.5 + 0.37 * ((i * 2654435761) % 1000) as f64 / 1000.0;
        }
        normalize(&mut v)?;
        for _ in 0..4 {
            let w = shifted.solve(&v)?;
            v = w;
            normalize(&mut v)?;
        }
        Some(v)
    }
}

fn normalize(v: &mut [f64]) -> Option<()> {
    let norm = crate::float::sqrt(v.iter().map(|x| x * x).sum::<f64>());
    if norm == 0.0 || !norm.is_finite() {
        return None;
    }
    for x in v.iter_mut() {
        *x /= norm;
    }
    Some(())
}

/// Solve a general tridiagonal system by Gaussian elimination with partial
/// pivoting (row swaps between adjacent rows, one extra super-diagonal of
/// fill-in). Returns `None` on a zero pivot.
///
/// `sub` and `sup` have length n−1.
pub fn solve_tridiag(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Option<Vec<f64>> {
    let n = diag.len();
    assert_eq!(rhs.len(), n);
    if n == 0 {
        return Some(Vec::new());
    }
    if n == 1 {
        if diag[0] == 0.0 {
            return None;
        }
        return Some(vec![rhs[0] / diag[0]]);
    }
    assert_eq!(sub.len(), n - 1);
    assert_eq!(sup.len(), n - 1);

    let mut d = diag.to_vec();
    let mut du = sup.to_vec();
    let mut du2 = vec![0.0; n - 2];
    let mut x = rhs.to_vec();

    for i in 0..n - 1 {
        let l = sub[i];
        if abs(d[i]) >= abs(l) {
            if d[i] == 0.0 {
                return None;
            }
            let m = l / d[i];
            d[i + 1] -= m * du[i];
            x[i + 1] -= m * x[i];
        } else {
            // Swap rows i and i+1.
            let m = d[i] / l;
            d[i] = l;
            let tmp = d[i + 1];
            d[i + 1] = du[i] - m * tmp;
            du[i] = tmp;
            if i + 2 < n {
                du2[i] = du[i + 1];
                du[i + 1] = -m * du2[i];
            }
            x.swap(i, i + 1);
            x[i + 1] -= m * x[i];
        }
    }
    if d[n - 1] == 0.0 {
        return None;
    }

    // Back substitution over the (at most) two stored super-diagonals.
    x[n - 1] /= d[n - 1];
    if n >= 2 {
        x[n - 2] = (x[n - 2] - du[n - 2] * x[n - 1]) / d[n - 2];
    }
    for i in (0..n.saturating_sub(2)).rev() {
        x[i] = (x[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / d[i];
    }
    Some(x)
}
