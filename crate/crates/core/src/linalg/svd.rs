//! One-sided Jacobi SVD for small square matrices.

use super::mat::{dot, norm2, Mat};
use crate::error::{Error, Result};

/// Thin SVD `a = U diag(sigma) V^T` of a square matrix with singular values
/// sorted descending. Rank-deficient inputs get their null columns of `U`
/// completed to an orthonormal basis.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: Mat,
    pub sigma: Vec<f64>,
    pub v: Mat,
}

const MAX_SWEEPS: usize = 60;
const ORTHO_TOL: f64 = 1e-14;

pub fn svd_square(a: &Mat) -> Result<Svd> {
    if !a.is_square() {
        return Err(Error::ShapeMismatch(format!(
            "svd_square needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let n = a.rows();
    // work on columns: rows of the transpose
    let mut w = a.transpose();
    let mut v = Mat::identity(n);
    for _sweep in 0..MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..n.saturating_sub(1) {
            for j in i + 1..n {
                let alpha = dot(w.row(i), w.row(i));
                let beta = dot(w.row(j), w.row(j));
                let gamma = dot(w.row(i), w.row(j));
                if gamma.abs() <= ORTHO_TOL * (alpha * beta).sqrt() || gamma == 0.0 {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = if zeta >= 0.0 {
                    1.0 / (zeta + (1.0 + zeta * zeta).sqrt())
                } else {
                    -1.0 / (-zeta + (1.0 + zeta * zeta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for k in 0..n {
                    let (wi, wj) = (w[(i, k)], w[(j, k)]);
                    w[(i, k)] = c * wi - s * wj;
                    w[(j, k)] = s * wi + c * wj;
                    let (vi, vj) = (v[(k, i)], v[(k, j)]);
                    v[(k, i)] = c * vi - s * vj;
                    v[(k, j)] = s * vi + c * vj;
                }
            }
        }
        if !rotated {
            let mut sigma: Vec<f64> = (0..n).map(|i| norm2(w.row(i))).collect();
            let mut idx: Vec<usize> = (0..n).collect();
            idx.sort_by(|&x, &y| sigma[y].partial_cmp(&sigma[x]).unwrap());
            let w_sorted = Mat::from_fn(n, n, |r, cc| w[(idx[r], cc)]);
            let v_sorted = Mat::from_fn(n, n, |r, cc| v[(r, idx[cc])]);
            sigma = idx.iter().map(|&i| norm2(w.row(i))).collect();

            let cutoff = sigma.first().copied().unwrap_or(0.0) * 1e-13;
            let mut u = Mat::zeros(n, n);
            for cidx in 0..n {
                if sigma[cidx] > cutoff && sigma[cidx] > 0.0 {
                    for r in 0..n {
                        u[(r, cidx)] = w_sorted[(cidx, r)] / sigma[cidx];
                    }
                } else {
                    sigma[cidx] = 0.0;
                }
            }
            complete_orthonormal(&mut u, &sigma, cutoff);
            return Ok(Svd {
                u,
                sigma,
                v: v_sorted,
            });
        }
    }
    Err(Error::NoConvergence)
}

/// Fills the columns belonging to zero singular values with an orthonormal
/// completion built from standard basis vectors.
fn complete_orthonormal(u: &mut Mat, sigma: &[f64], cutoff: f64) {
    let n = u.rows();
    for cidx in 0..n {
        if sigma[cidx] > cutoff && sigma[cidx] > 0.0 {
            continue;
        }
        let mut filled = false;
        for cand in 0..n {
            let mut col: Vec<f64> = (0..n).map(|r| if r == cand { 1.0 } else { 0.0 }).collect();
            for _pass in 0..2 {
                for other in 0..n {
                    if other == cidx {
                        continue;
                    }
                    let ocol = u.col(other);
                    if norm2(&ocol) < 0.5 {
                        continue;
                    }
                    let proj = dot(&col, &ocol);
                    for (x, o) in col.iter_mut().zip(&ocol) {
                        *x -= proj * o;
                    }
                }
            }
            let nn = norm2(&col);
            if nn > 1e-6 {
                for r in 0..n {
                    u[(r, cidx)] = col[r] / nn;
                }
                filled = true;
                break;
            }
        }
        debug_assert!(filled, "failed to complete orthonormal basis");
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(a: &Mat) {
        let n = a.rows();
        let s = svd_square(a).unwrap();
        let sig = Mat::from_fn(n, n, |i, j| if i == j { s.sigma[i] } else { 0.0 });
        let rec = s.u.matmul(&sig).matmul(&s.v.transpose());
        assert!(
            rec.sub(a).max_abs() < 1e-12 * (1.0 + a.max_abs()),
            "reconstruction error {}",
            rec.sub(a).max_abs()
        );
        let gu = s.u.transpose().matmul(&s.u);
        let gv = s.v.transpose().matmul(&s.v);
        assert!(gu.sub(&Mat::identity(n)).max_abs() < 1e-12);
        assert!(gv.sub(&Mat::identity(n)).max_abs() < 1e-12);
        for w in s.sigma.windows(2) {
            assert!(w[0] >= w[1]);
        }
    }

    #[test]
    fn svd_known_diag() {
        let a = Mat::from_rows(&[vec![3.0, 0.0], vec![0.0, -2.0]]);
        let s = svd_square(&a).unwrap();
        assert!((s.sigma[0] - 3.0).abs() < 1e-14);
        assert!((s.sigma[1] - 2.0).abs() < 1e-14);
        check(&a);
    }

    #[test]
    fn svd_random_and_rank_deficient() {
        let a = Mat::from_fn(3, 3, |i, j| ((i * 5 + j * 11) % 7) as f64 - 2.0);
        check(&a);
        // rank-1 matrix
        let r1 = Mat::from_fn(3, 3, |i, j| (i as f64 + 1.0) * (j as f64 - 1.0));
        check(&r1);
        assert_eq!(svd_square(&r1).unwrap().sigma[2], 0.0);
        // zero matrix
        check(&Mat::zeros(2, 2));
    }
}
