//! Dense linear algebra kernels used by the regression fits.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{GofError, Result};

/// Relative tolerance on `|R_kk| / |R_00|` below which a pivot counts as zero.
pub const RANK_TOLERANCE: f64 = 1e-10;

/// Largest condition number accepted by [`symmetric_inverse`].
pub const MAX_CONDITION: f64 = 1e12;

/// Householder QR with column pivoting, `X P = Q R`.
///
/// Pivots are chosen by largest remaining column norm so the diagonal of
/// `R` is non-increasing in magnitude and reveals the numerical rank.
#[derive(Debug, Clone)]
pub struct PivotedQr {
    /// `R` in the upper triangle, Householder vectors (unit leading entry
    /// implied) below it.
    packed: DMatrix<f64>,
    tau: Vec<f64>,
    perm: Vec<usize>,
    rank: usize,
}

impl PivotedQr {
    pub fn new(mut a: DMatrix<f64>) -> Self {
        let (rows, cols) = a.shape();
        let steps = rows.min(cols);
        let mut perm: Vec<usize> = (0..cols).collect();
        let mut tau = vec![0.0; steps];

        for k in 0..steps {
            // Remaining column norms are recomputed rather than downdated;
            // the column counts here are small.
            let mut best = k;
            let mut best_norm = -1.0;
            for j in k..cols {
                let norm: f64 = a.view((k, j), (rows - k, 1)).norm_squared();
                if norm > best_norm {
                    best_norm = norm;
                    best = j;
                }
            }
            if best != k {
                a.swap_columns(k, best);
                perm.swap(k, best);
            }

            let alpha = a.view((k, k), (rows - k, 1)).norm();
            if alpha == 0.0 {
                continue;
            }
            let x0 = a[(k, k)];
            let beta = if x0 >= 0.0 { -alpha } else { alpha };
            let v0 = x0 - beta;
            for i in k + 1..rows {
                a[(i, k)] /= v0;
            }
            a[(k, k)] = beta;
            tau[k] = (beta - x0) / beta;

            for j in k + 1..cols {
                let mut w = a[(k, j)];
                for i in k + 1..rows {
                    w += a[(i, k)] * a[(i, j)];
                }
                w *= tau[k];
                a[(k, j)] -= w;
                for i in k + 1..rows {
                    let vik = a[(i, k)];
                    a[(i, j)] -= w * vik;
                }
            }
        }

        let lead = if steps > 0 { a[(0, 0)].abs() } else { 0.0 };
        let rank = (0..steps)
            .take_while(|&k| lead > 0.0 && a[(k, k)].abs() > RANK_TOLERANCE * lead)
            .count();

        Self { packed: a, tau, perm, rank }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn ncols(&self) -> usize {
        self.packed.ncols()
    }

    pub fn is_full_rank(&self) -> bool {
        self.rank == self.packed.ncols()
    }

    /// Computes `Qᵀ b` in place.
    fn apply_qt(&self, b: &mut DVector<f64>) {
        let rows = self.packed.nrows();
        for (k, &tau) in self.tau.iter().enumerate() {
            if tau == 0.0 {
                continue;
            }
            let mut w = b[k];
            for i in k + 1..rows {
                w += self.packed[(i, k)] * b[i];
            }
            w *= tau;
            b[k] -= w;
            for i in k + 1..rows {
                b[i] -= w * self.packed[(i, k)];
            }
        }
    }

    /// Least-squares solution of `X β ≈ b`. Requires full column rank.
    pub fn solve(&self, b: &DVector<f64>) -> Result<DVector<f64>> {
        self.require_full_rank()?;
        let cols = self.ncols();
        let mut qtb = b.clone();
        self.apply_qt(&mut qtb);
        let mut z = vec![0.0; cols];
        for k in (0..cols).rev() {
            let mut s = qtb[k];
            for (j, zj) in z.iter().enumerate().skip(k + 1) {
                s -= self.packed[(k, j)] * zj;
            }
            z[k] = s / self.packed[(k, k)];
        }
        let mut beta = DVector::zeros(cols);
        for (k, &p) in self.perm.iter().enumerate() {
            beta[p] = z[k];
        }
        Ok(beta)
    }

    /// `(XᵀX)⁻¹ = P R⁻¹ R⁻ᵀ Pᵀ`. Requires full column rank.
    pub fn xtx_inverse(&self) -> Result<DMatrix<f64>> {
        self.require_full_rank()?;
        let cols = self.ncols();
        let mut rinv = DMatrix::<f64>::zeros(cols, cols);
        for j in 0..cols {
            rinv[(j, j)] = 1.0 / self.packed[(j, j)];
            for i in (0..j).rev() {
                let mut s = 0.0;
                for k in i + 1..=j {
                    s += self.packed[(i, k)] * rinv[(k, j)];
                }
                rinv[(i, j)] = -s / self.packed[(i, i)];
            }
        }
        let m = &rinv * rinv.transpose();
        let mut out = DMatrix::zeros(cols, cols);
        for i in 0..cols {
            for j in 0..cols {
                out[(self.perm[i], self.perm[j])] = m[(i, j)];
            }
        }
        Ok(out)
    }

    fn require_full_rank(&self) -> Result<()> {
        if self.is_full_rank() {
            Ok(())
        } else {
            Err(GofError::RankDeficient { rank: self.rank, columns: self.ncols() })
        }
    }
}

/// Inverse of a symmetric positive definite matrix.
///
/// The matrix is equilibrated by its diagonal before the eigen
/// decomposition so the condition check does not depend on the units of
/// the parameters. Matrices that are indefinite or have a condition number
/// above [`MAX_CONDITION`] after equilibration are rejected.
pub fn symmetric_inverse(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let dim = a.nrows();
    debug_assert_eq!(dim, a.ncols());
    let mut scale = DVector::zeros(dim);
    for i in 0..dim {
        let d = a[(i, i)];
        if !(d.is_finite() && d > 0.0) {
            return Err(GofError::SingularInformation { condition: f64::INFINITY });
        }
        scale[i] = 1.0 / d.sqrt();
    }
    let mut s = a.clone();
    for i in 0..dim {
        for j in 0..dim {
            s[(i, j)] *= scale[i] * scale[j];
        }
    }
    // Enforce exact symmetry before the symmetric solver reads one triangle.
    let s = (&s + s.transpose()) * 0.5;
    let eig = SymmetricEigen::new(s);
    let max = eig.eigenvalues.max();
    let min = eig.eigenvalues.min();
    let condition = if min > 0.0 { max / min } else { f64::INFINITY };
    if !(condition.is_finite() && condition <= MAX_CONDITION) {
        return Err(GofError::SingularInformation { condition });
    }
    let inv_vals = eig.eigenvalues.map(|l| 1.0 / l);
    let vecs = &eig.eigenvectors;
    let sinv = vecs * DMatrix::from_diagonal(&inv_vals) * vecs.transpose();
    let mut out = sinv;
    for i in 0..dim {
        for j in 0..dim {
            out[(i, j)] *= scale[i] * scale[j];
        }
    }
    Ok((&out + out.transpose()) * 0.5)
}
