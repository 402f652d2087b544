//! Cyclic Jacobi eigensolvers for real symmetric and complex Hermitian
//! matrices, plus the eigendecomposition of unitary matrices built on top of
//! them.
//!
//! A sweep visits every off-diagonal pivot once; iteration stops when the
//! off-diagonal Frobenius norm drops below `JACOBI_REL_TOL` times the norm of
//! the input.

use num_complex::Complex64;

use super::cmat::CMat;
use super::mat::Mat;
use crate::error::{Error, Result};

/// Relative off-diagonal norm at which a matrix counts as diagonalized.
pub const JACOBI_REL_TOL: f64 = 1e-12;

/// Eigenvalues within this distance are treated as one cluster when
/// decomposing unitary matrices; see [`unitary_eig`].
const CLUSTER_TOL: f64 = 1e-8;

const MAX_SWEEPS: usize = 100;

/// Eigendecomposition of a real symmetric matrix: `m = V diag(values) V^T`.
///
/// Eigenvalues are sorted ascending; column `j` of `vectors` is the
/// eigenvector for `values[j]`.
#[derive(Clone, Debug)]
pub struct SymEig {
    pub values: Vec<f64>,
    pub vectors: Mat,
}

/// Eigendecomposition of a complex Hermitian matrix: `m = V diag(values) V^H`.
#[derive(Clone, Debug)]
pub struct HermEig {
    pub values: Vec<f64>,
    pub vectors: CMat,
}

/// Classic symmetric Schur rotation: returns (c, s, t) annihilating the pivot
/// of the 2x2 symmetric matrix [[a, h], [h, b]] under J^T M J with
/// J = [[c, s], [-s, c]].
fn sym_rotation(a: f64, b: f64, h: f64) -> (f64, f64, f64) {
    let tau = (b - a) / (2.0 * h);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    (c, t * c, t)
}

fn off_diagonal_norm(m: &Mat) -> f64 {
    let n = m.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += m[(i, j)] * m[(i, j)];
            }
        }
    }
    s.sqrt()
}

/// Cyclic Jacobi for a real symmetric matrix. Uses the full matrix; the input
/// must be symmetric (callers construct it so).
pub fn sym_eig(m: &Mat) -> Result<SymEig> {
    if !m.is_square() {
        return Err(Error::ShapeMismatch(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let n = m.rows();
    if n == 0 {
        return Ok(SymEig {
            values: vec![],
            vectors: Mat::zeros(0, 0),
        });
    }
    let norm = m.frobenius();
    let mut a = m.symmetrize();
    let mut v = Mat::identity(n);
    if norm == 0.0 || n == 1 {
        return Ok(finish_sym(a, v));
    }
    for _sweep in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) <= JACOBI_REL_TOL * norm {
            return Ok(finish_sym(a, v));
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let h = a[(p, q)];
                if h.abs() <= f64::MIN_POSITIVE {
                    continue;
                }
                let (c, s, t) = sym_rotation(a[(p, p)], a[(q, q)], h);
                let (app, aqq) = (a[(p, p)] - t * h, a[(q, q)] + t * h);
                // columns p, q of a
                for r in 0..n {
                    let (arp, arq) = (a[(r, p)], a[(r, q)]);
                    a[(r, p)] = c * arp - s * arq;
                    a[(r, q)] = s * arp + c * arq;
                }
                // rows p, q of a
                for r in 0..n {
                    let (apr, aqr) = (a[(p, r)], a[(q, r)]);
                    a[(p, r)] = c * apr - s * aqr;
                    a[(q, r)] = s * apr + c * aqr;
                }
                a[(p, p)] = app;
                a[(q, q)] = aqq;
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                // accumulate eigenvectors (columns p, q of v)
                for r in 0..n {
                    let (vrp, vrq) = (v[(r, p)], v[(r, q)]);
                    v[(r, p)] = c * vrp - s * vrq;
                    v[(r, q)] = s * vrp + c * vrq;
                }
            }
        }
    }
    Err(Error::NoConvergence)
}

fn finish_sym(a: Mat, v: Mat) -> SymEig {
    let n = a.rows();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| a[(i, i)].partial_cmp(&a[(j, j)]).unwrap());
    let values: Vec<f64> = idx.iter().map(|&i| a[(i, i)]).collect();
    let vectors = Mat::from_fn(n, n, |r, c| v[(r, idx[c])]);
    SymEig { values, vectors }
}

fn off_diagonal_norm_c(m: &CMat) -> f64 {
    let n = m.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += m[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Cyclic Jacobi for a complex Hermitian matrix.
///
/// Each pivot (p, q) is annihilated by the unitary
/// `U = diag(1, e^{-i phi}) J` where `phi = arg(h_pq)` turns the pivot real
/// and `J` is the symmetric Schur rotation for the resulting real 2x2 block.
pub fn herm_eig(m: &CMat) -> Result<HermEig> {
    if !m.is_square() {
        return Err(Error::ShapeMismatch(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let n = m.rows();
    if n == 0 {
        return Ok(HermEig {
            values: vec![],
            vectors: CMat::zeros(0, 0),
        });
    }
    let norm = m.frobenius();
    // enforce Hermitian structure exactly
    let mut a = CMat::from_fn(n, n, |i, j| {
        if i == j {
            Complex64::new(m[(i, i)].re, 0.0)
        } else {
            0.5 * (m[(i, j)] + m[(j, i)].conj())
        }
    });
    let mut v = CMat::identity(n);
    if norm == 0.0 || n == 1 {
        return Ok(finish_herm(a, v));
    }
    for _sweep in 0..MAX_SWEEPS {
        if off_diagonal_norm_c(&a) <= JACOBI_REL_TOL * norm {
            return Ok(finish_herm(a, v));
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let h = a[(p, q)];
                let habs = h.norm();
                if habs <= f64::MIN_POSITIVE {
                    continue;
                }
                let phase = h / habs; // e^{i phi}
                let (c, s, t) = sym_rotation(a[(p, p)].re, a[(q, q)].re, habs);
                let (app, aqq) = (a[(p, p)].re - t * habs, a[(q, q)].re + t * habs);
                // U = [[c, s], [-s e^{-i phi}, c e^{-i phi}]] acting on columns p, q
                let u21 = -s * phase.conj();
                let u22 = c * phase.conj();
                for r in 0..n {
                    let (arp, arq) = (a[(r, p)], a[(r, q)]);
                    a[(r, p)] = c * arp + u21 * arq;
                    a[(r, q)] = s * arp + u22 * arq;
                }
                // U^H acting on rows p, q
                let w12 = -s * phase;
                let w22 = c * phase;
                for r in 0..n {
                    let (apr, aqr) = (a[(p, r)], a[(q, r)]);
                    a[(p, r)] = c * apr + w12 * aqr;
                    a[(q, r)] = s * apr + w22 * aqr;
                }
                a[(p, p)] = Complex64::new(app, 0.0);
                a[(q, q)] = Complex64::new(aqq, 0.0);
                a[(p, q)] = Complex64::new(0.0, 0.0);
                a[(q, p)] = Complex64::new(0.0, 0.0);
                for r in 0..n {
                    let (vrp, vrq) = (v[(r, p)], v[(r, q)]);
                    v[(r, p)] = c * vrp + u21 * vrq;
                    v[(r, q)] = s * vrp + u22 * vrq;
                }
            }
        }
    }
    Err(Error::NoConvergence)
}

fn finish_herm(a: CMat, v: CMat) -> HermEig {
    let n = a.rows();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| a[(i, i)].re.partial_cmp(&a[(j, j)].re).unwrap());
    let values: Vec<f64> = idx.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = CMat::from_fn(n, n, |r, c| v[(r, idx[c])]);
    HermEig { values, vectors }
}

/// Eigendecomposition of a unitary matrix `u = V diag(e^{i theta_j}) V^H`.
///
/// Returns the phases `theta_j` in (-pi, pi] and the unitary `V` (phases and
/// columns in matching order). A unitary matrix is normal, so its Hermitian
/// and skew-Hermitian parts commute and can be diagonalized simultaneously:
/// the Hermitian part fixes cos(theta) and the eigenspaces, the projected
/// skew part separates +theta from -theta inside each eigenspace.
pub fn unitary_eig(u: &CMat) -> Result<(Vec<f64>, CMat)> {
    if !u.is_square() {
        return Err(Error::ShapeMismatch(format!(
            "unitary eigendecomposition needs a square matrix, got {}x{}",
            u.rows(),
            u.cols()
        )));
    }
    let n = u.rows();
    let ua = u.adjoint();
    let h1 = CMat::from_fn(n, n, |i, j| 0.5 * (u[(i, j)] + ua[(i, j)]));
    let h2 = CMat::from_fn(n, n, |i, j| {
        Complex64::new(0.0, -0.5) * (u[(i, j)] - ua[(i, j)])
    });
    let HermEig {
        values: cos_vals,
        vectors: mut v,
    } = herm_eig(&h1)?;

    let mut phases = vec![0.0f64; n];
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && cos_vals[end] - cos_vals[end - 1] <= CLUSTER_TOL {
            end += 1;
        }
        let m = end - start;
        let cbar = cos_vals[start..end].iter().sum::<f64>() / m as f64;
        if m == 1 {
            let col: Vec<Complex64> = (0..n).map(|r| v[(r, start)]).collect();
            let s = rayleigh(&h2, &col);
            phases[start] = s.atan2(cbar);
        } else {
            // project the skew part onto the cluster subspace and rediagonalize
            let vc = CMat::from_fn(n, m, |r, c| v[(r, start + c)]);
            let b = vc.adjoint().matmul(&h2).matmul(&vc);
            let HermEig {
                values: sin_vals,
                vectors: w,
            } = herm_eig(&b)?;
            let refined = vc.matmul(&w);
            for c in 0..m {
                for r in 0..n {
                    v[(r, start + c)] = refined[(r, c)];
                }
                phases[start + c] = sin_vals[c].atan2(cbar);
            }
        }
        start = end;
    }
    Ok((phases, v))
}

fn rayleigh(h: &CMat, x: &[Complex64]) -> f64 {
    let n = h.rows();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        let mut hx = Complex64::new(0.0, 0.0);
        for j in 0..n {
            hx += h[(i, j)] * x[j];
        }
        acc += x[i].conj() * hx;
    }
    acc.re
}
