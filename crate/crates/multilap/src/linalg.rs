//! Dense symmetric linear algebra for small matrices.
//!
//! Everything here targets the supra matrices this crate produces: dense,
//! symmetric, and small (tens of rows). A classical Jacobi rotation scheme is
//! plenty at that size, has no external dependencies, and converges
//! quadratically once the off-diagonal mass is small.

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};

/// Eigendecomposition A = Q diag(λ) Qᵀ of a symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    /// Eigenvalues in ascending order.
    pub values: Array1<f64>,
    /// Orthonormal eigenvectors, column k pairing with `values[k]`.
    pub vectors: Array2<f64>,
}

/// Largest absolute off-diagonal entry and its position (i < j).
fn max_off_diagonal(a: &Array2<f64>) -> (usize, usize, f64) {
    let n = a.nrows();
    let (mut p, mut q, mut best) = (0, 1, 0.0f64);
    for i in 0..n {
        for j in (i + 1)..n {
            let v = a[[i, j]].abs();
            if v > best {
                best = v;
                p = i;
                q = j;
            }
        }
    }
    (p, q, best)
}

/// Eigendecomposition of a symmetric matrix by classical Jacobi rotations
/// (largest off-diagonal pivot). The input is only read; symmetry is assumed,
/// with the upper triangle taken as authoritative.
///
/// Converges to machine precision for any symmetric input; the rotation
/// budget is generous (30 full sweeps' worth) and hitting it returns
/// [`Error::EigensolverFailure`] rather than a silently inaccurate result.
pub fn jacobi_eigh(a: &Array2<f64>) -> Result<SymmetricEigen> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: a.ncols(),
            context: "jacobi_eigh requires a square matrix".to_string(),
        });
    }
    if n == 0 {
        return Ok(SymmetricEigen {
            values: Array1::zeros(0),
            vectors: Array2::zeros((0, 0)),
        });
    }

    let mut m = a.clone();
    // Symmetrize from the upper triangle so tiny asymmetries in the input
    // cannot make the sweep cycle.
    for i in 0..n {
        for j in (i + 1)..n {
            m[[j, i]] = m[[i, j]];
        }
    }
    let mut vectors = Array2::eye(n);

    // Convergence threshold scaled to the matrix magnitude.
    let scale: f64 = m.iter().fold(0.0f64, |acc, &v| acc.max(v.abs())).max(1.0);
    let tol = f64::EPSILON * scale;
    let max_rotations = 30 * n * n;

    let mut rotations = 0usize;
    loop {
        let (p, q, off) = max_off_diagonal(&m);
        if off <= tol {
            break;
        }
        if rotations >= max_rotations {
            return Err(Error::EigensolverFailure {
                off_diagonal: off,
                rotations,
            });
        }
        rotations += 1;

        // Rotation angle zeroing m[p][q]: tan(2θ) = 2 a_pq / (a_qq − a_pp),
        // taking the smaller-angle root for stability.
        let apq = m[[p, q]];
        let theta = (m[[q, q]] - m[[p, p]]) / (2.0 * apq);
        let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
        let c = 1.0 / (t * t + 1.0).sqrt();
        let s = t * c;
        let tau = s / (1.0 + c);

        // Rank-two update in the rotated-difference form: the new diagonal
        // entries come from a_pp − t·a_pq directly, which loses less to
        // rounding than composing two explicit rotations.
        m[[p, p]] -= t * apq;
        m[[q, q]] += t * apq;
        m[[p, q]] = 0.0;
        m[[q, p]] = 0.0;
        for k in 0..n {
            if k == p || k == q {
                continue;
            }
            let akp = m[[k, p]];
            let akq = m[[k, q]];
            let new_kp = akp - s * (akq + tau * akp);
            let new_kq = akq + s * (akp - tau * akq);
            m[[k, p]] = new_kp;
            m[[p, k]] = new_kp;
            m[[k, q]] = new_kq;
            m[[q, k]] = new_kq;
        }

        for k in 0..n {
            let vkp = vectors[[k, p]];
            let vkq = vectors[[k, q]];
            vectors[[k, p]] = vkp - s * (vkq + tau * vkp);
            vectors[[k, q]] = vkq + s * (vkp - tau * vkq);
        }
    }

    // Sort ascending by eigenvalue, reordering columns to match.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[[i, i]].total_cmp(&m[[j, j]]));

    let values = Array1::from_iter(order.iter().map(|&i| m[[i, i]]));
    let mut sorted_vectors = Array2::zeros((n, n));
    for (new_col, &old_col) in order.iter().enumerate() {
        for row in 0..n {
            sorted_vectors[[row, new_col]] = vectors[[row, old_col]];
        }
    }

    Ok(SymmetricEigen {
        values,
        vectors: sorted_vectors,
    })
}

impl SymmetricEigen {
    /// Reassemble Q f(diag) Qᵀ for a scalar function applied to the spectrum.
    fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> Array2<f64> {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for (k, col) in scaled.columns_mut().into_iter().enumerate() {
            let fv = f(self.values[k]);
            for v in col {
                *v *= fv;
            }
        }
        let mut out = scaled.dot(&self.vectors.t());
        // Symmetrize: the two triangles differ only by roundoff.
        for i in 0..n {
            for j in (i + 1)..n {
                let avg = 0.5 * (out[[i, j]] + out[[j, i]]);
                out[[i, j]] = avg;
                out[[j, i]] = avg;
            }
        }
        out
    }
}

/// Matrix exponential e^{tA} of a symmetric matrix via its spectral
/// decomposition: Q e^{t·diag} Qᵀ.
pub fn expm_symmetric(a: &Array2<f64>, t: f64) -> Result<Array2<f64>> {
    Ok(jacobi_eigh(a)?.map_spectrum(|v| (t * v).exp()))
}

/// Minimum-norm solution of A x = b for symmetric (possibly singular) A,
/// via the eigen pseudo-inverse: components of b along near-null directions
/// (|λ| below a scale-relative cutoff) are required to vanish.
///
/// Returns [`Error::Numerical`] if b has a component in the null space beyond
/// the consistency tolerance — the system is then unsolvable.
pub fn min_norm_solve(a: &Array2<f64>, b: &Array1<f64>) -> Result<Array1<f64>> {
    let n = a.nrows();
    if b.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: b.len(),
            context: "min_norm_solve right-hand side".to_string(),
        });
    }
    let eig = jacobi_eigh(a)?;
    let lambda_max = eig
        .values
        .iter()
        .fold(0.0f64, |acc, &v| acc.max(v.abs()))
        .max(1.0);
    let cutoff = lambda_max * 1e-12 * n as f64;

    // Coefficients of b in the eigenbasis.
    let coeffs = eig.vectors.t().dot(b);
    let b_scale = coeffs
        .iter()
        .fold(0.0f64, |acc, &v| acc.max(v.abs()))
        .max(1.0);

    let mut solution_coeffs = Array1::zeros(n);
    for k in 0..n {
        if eig.values[k].abs() <= cutoff {
            if coeffs[k].abs() > 1e-9 * b_scale {
                return Err(Error::Numerical {
                    t: 0.0,
                    message: format!(
                        "right-hand side has component {:.3e} along a null direction; system inconsistent",
                        coeffs[k]
                    ),
                });
            }
            // Minimum norm: drop the null component.
        } else {
            solution_coeffs[k] = coeffs[k] / eig.values[k];
        }
    }
    Ok(eig.vectors.dot(&solution_coeffs))
}
