//! Majorize-minimize embedding solver.
//!
//! The outer loop repeatedly minimizes the quadratic surrogate
//! `Psi(Z; U)` anchored at the current iterate; because the surrogate is an
//! upper bound that is tight at the anchor, every outer step decreases the
//! stress. Minimizing `Psi` splits into `p` independent quadratic problems
//! `min_x x^T A x + x^T b` (one per axis, `b = -2 C(U) U_a`), each solved by
//! steepest descent with the exact line search `s = (g^T g) / (2 g^T A g)`.
//!
//! `A` is a graph Laplacian, hence rank deficient: the translation gauge is
//! left free during optimization and fixed only at reporting time by
//! centering the embedding.

use crate::error::{Error, Result};
use crate::linalg::{dot, norm2, svd_square, Mat};
use crate::stress::{
    build_a, build_c, stress_unnormalized, Configuration, DistanceMatrix, StressTrace,
    WeightScheme,
};

pub const DEFAULT_OUTER_MAX: usize = 500;
pub const DEFAULT_OUTER_TOL: f64 = 1e-9;
pub const DEFAULT_INNER_MAX: usize = 200;
pub const DEFAULT_INNER_TOL: f64 = 1e-10;

/// Directions with `g^T A g <= TAU_NULL * g^T g` count as flat (gradient in
/// the null space of `A`); the inner iteration stops there.
const TAU_NULL: f64 = 1e-14;
/// Denominator floor for the relative stress decrease test.
const STRESS_FLOOR: f64 = 1e-30;

/// Initial guess for the embedding.
#[derive(Clone, Debug)]
pub enum Init {
    /// Seeded Gaussian coordinates. When `scale` is `None` the scale defaults
    /// to the mean off-diagonal target distance divided by sqrt(p).
    Random { seed: u64, scale: Option<f64> },
    /// Start from the given coordinates (must be n x p).
    Given(Configuration),
}

#[derive(Clone, Debug)]
pub struct SolverConfig {
    /// Target dimension (2 or 3 for visualization; any >= 1 accepted).
    pub p: usize,
    pub outer_max: usize,
    /// Relative stress-decrease threshold for outer termination.
    pub outer_tol: f64,
    pub inner_max: usize,
    /// Gradient-norm threshold for the inner solver, relative to 1 + ||b||.
    pub inner_tol: f64,
    pub init: Init,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            p: 2,
            outer_max: DEFAULT_OUTER_MAX,
            outer_tol: DEFAULT_OUTER_TOL,
            inner_max: DEFAULT_INNER_MAX,
            inner_tol: DEFAULT_INNER_TOL,
            init: Init::Random {
                seed: 0,
                scale: None,
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Termination {
    ToleranceReached,
    IterationCap,
}

#[derive(Clone, Debug)]
pub struct EmbeddingResult {
    /// Final coordinates, centered to zero mean.
    pub coords: Configuration,
    /// Stress after the initial guess and after every outer step
    /// (`outer_iterations + 1` entries), with the scheme normalization
    /// applied.
    pub trace: StressTrace,
    pub outer_iterations: usize,
    pub converged: bool,
    pub termination: Termination,
}

/// Steepest descent with exact line search on
/// `phi(x) = x^T a x + x^T b`, `a` symmetric positive semi-definite.
///
/// The gradient is `g = 2 a x + b` and the optimal step along `-g` is
/// `s = (g^T g) / (2 g^T a g)`. Stops when `||g|| <= tol * (1 + ||b||)`,
/// when the gradient falls in the null space of `a`, or after `max_iter`
/// steps.
pub fn quadratic_descent(
    a: &Mat,
    b: &[f64],
    x0: &[f64],
    max_iter: usize,
    tol: f64,
) -> Result<Vec<f64>> {
    if !a.is_square() || a.rows() != b.len() || b.len() != x0.len() {
        return Err(Error::ShapeMismatch(format!(
            "quadratic of size {}x{} with |b| = {}, |x0| = {}",
            a.rows(),
            a.cols(),
            b.len(),
            x0.len()
        )));
    }
    if !a.is_symmetric_exact() {
        return Err(Error::NotSymmetric);
    }
    let gate = tol * (1.0 + norm2(b));
    let mut x = x0.to_vec();
    for _ in 0..max_iter {
        let ax = a.matvec(&x);
        let g: Vec<f64> = ax.iter().zip(b).map(|(axi, bi)| 2.0 * axi + bi).collect();
        let gg = dot(&g, &g);
        if gg.sqrt() <= gate {
            break;
        }
        let ag = a.matvec(&g);
        let gag = dot(&g, &ag);
        if gag <= TAU_NULL * gg {
            // flat (or numerically null) direction: the objective cannot be
            // reduced along the gradient
            break;
        }
        let step = 0.5 * gg / gag;
        for (xi, gi) in x.iter_mut().zip(&g) {
            *xi -= step * gi;
        }
    }
    Ok(x)
}

/// One outer majorization step: minimizes `Psi(.; U)` axis by axis, warm
/// starting each inner solve at the corresponding column of `U`. The result
/// never has larger stress than `U`.
pub fn majorization_step(
    u: &Configuration,
    d: &DistanceMatrix,
    s: &WeightScheme,
    inner_max: usize,
    inner_tol: f64,
) -> Result<Configuration> {
    let a = build_a(s);
    majorization_step_with(&a, u, d, s, inner_max, inner_tol)
}

fn majorization_step_with(
    a: &Mat,
    u: &Configuration,
    d: &DistanceMatrix,
    s: &WeightScheme,
    inner_max: usize,
    inner_tol: f64,
) -> Result<Configuration> {
    let c = build_c(u, d, s);
    let (n, p) = (u.n(), u.p());
    let mut out = Mat::zeros(n, p);
    for axis in 0..p {
        let ua = u.column(axis);
        let cua = c.matvec(&ua);
        let b: Vec<f64> = cua.iter().map(|v| -2.0 * v).collect();
        let x = quadratic_descent(a, &b, &ua, inner_max, inner_tol)?;
        for i in 0..n {
            out[(i, axis)] = x[i];
        }
    }
    Ok(Configuration::new(out))
}

/// Embeds a distance matrix into R^p by iterating [`majorization_step`] from
/// the initial guess. Records the (normalized) stress after every outer step
/// and stops when the relative decrease falls below `outer_tol` or the
/// iteration cap is reached.
pub fn embed(d: &DistanceMatrix, s: &WeightScheme, cfg: &SolverConfig) -> Result<EmbeddingResult> {
    let n = d.n();
    if n < 2 {
        return Err(Error::ShapeMismatch(format!(
            "embedding needs at least 2 objects, got {n}"
        )));
    }
    if s.n() != n {
        return Err(Error::ShapeMismatch(format!(
            "weights are for {} objects, distances for {n}",
            s.n()
        )));
    }
    if cfg.p < 1 || cfg.outer_max < 1 || cfg.inner_max < 1 {
        return Err(Error::ValidationFailed(
            "target dimension and iteration caps must be at least 1".to_string(),
        ));
    }
    if !cfg.outer_tol.is_finite()
        || cfg.outer_tol <= 0.0
        || !cfg.inner_tol.is_finite()
        || cfg.inner_tol <= 0.0
    {
        return Err(Error::ValidationFailed(
            "tolerances must be positive".to_string(),
        ));
    }

    let mut z = match &cfg.init {
        Init::Given(init) => {
            if init.n() != n || init.p() != cfg.p {
                return Err(Error::ShapeMismatch(format!(
                    "initial guess is {}x{}, expected {}x{}",
                    init.n(),
                    init.p(),
                    n,
                    cfg.p
                )));
            }
            init.clone()
        }
        Init::Random { seed, scale } => {
            let sc = scale.unwrap_or_else(|| {
                let mean = d.mean_off_diagonal() / (cfg.p as f64).sqrt();
                if mean > 0.0 {
                    mean
                } else {
                    1.0
                }
            });
            Configuration::random(n, cfg.p, sc, *seed)
        }
    };

    let a = build_a(s);
    let m = s.normalization();
    let phi0 = m * stress_unnormalized(&z, d, s);
    let mut values = vec![phi0];
    let mut termination = Termination::IterationCap;
    for _ in 0..cfg.outer_max {
        let next = majorization_step_with(&a, &z, d, s, cfg.inner_max, cfg.inner_tol)?;
        let phi_next = m * stress_unnormalized(&next, d, s);
        let phi_prev = *values.last().expect("trace is non-empty");
        values.push(phi_next);
        z = next;
        if (phi_prev - phi_next) / phi0.max(STRESS_FLOOR) < cfg.outer_tol {
            termination = Termination::ToleranceReached;
            break;
        }
    }
    let outer_iterations = values.len() - 1;
    Ok(EmbeddingResult {
        coords: z.centered(),
        trace: StressTrace::from_values(values),
        outer_iterations,
        converged: termination == Termination::ToleranceReached,
        termination,
    })
}

/// Rigid alignment of one configuration onto another.
#[derive(Clone, Debug)]
pub struct Alignment {
    /// Orthogonal p x p matrix; reflections (determinant -1) are allowed,
    /// since a distance pattern cannot fix chirality.
    pub rotation: Mat,
    pub translation: Vec<f64>,
    /// Root-mean-square residual of `R z_k + c` against the targets.
    pub rms: f64,
}

impl Alignment {
    /// Applies `z_k -> R z_k + c` to every row.
    pub fn apply(&self, z: &Configuration) -> Configuration {
        let (n, p) = (z.n(), z.p());
        Configuration::new(Mat::from_fn(n, p, |i, j| {
            let mut v = self.translation[j];
            for (k, zk) in z.row(i).iter().enumerate() {
                v += self.rotation[(j, k)] * zk;
            }
            v
        }))
    }
}

/// Finds the orthogonal `R` and translation `c` minimizing
/// `sum_k ||R z_k + c - y_k||^2` and reports the residual RMS.
///
/// The optimum is `R = V U^T` from the SVD of the centered cross-covariance
/// `sum_k (z_k - mean z)(y_k - mean y)^T = U S V^T`; no determinant
/// correction is applied because reflections are acceptable minimizers here.
pub fn procrustes_align(z: &Configuration, y: &Configuration) -> Result<Alignment> {
    if z.n() != y.n() || z.p() != y.p() {
        return Err(Error::ShapeMismatch(format!(
            "configurations are {}x{} and {}x{}",
            z.n(),
            z.p(),
            y.n(),
            y.p()
        )));
    }
    let (n, p) = (z.n(), z.p());
    let zc = z.centered();
    let yc = y.centered();
    let spread: f64 = (0..n).map(|i| dot(zc.row(i), zc.row(i))).sum();
    if spread.sqrt() <= 1e-12 * (1.0 + z.mat().max_abs()) {
        return Err(Error::AlignmentUndefined);
    }
    // cross-covariance M = Zc^T Yc (p x p)
    let m = zc.mat().transpose().matmul(yc.mat());
    let svd = svd_square(&m)?;
    let r = svd.v.matmul(&svd.u.transpose());

    let zbar: Vec<f64> = (0..p)
        .map(|j| (0..n).map(|i| z.row(i)[j]).sum::<f64>() / n as f64)
        .collect();
    let ybar: Vec<f64> = (0..p)
        .map(|j| (0..n).map(|i| y.row(i)[j]).sum::<f64>() / n as f64)
        .collect();
    let rz = r.matvec(&zbar);
    let translation: Vec<f64> = ybar.iter().zip(&rz).map(|(yb, rzb)| yb - rzb).collect();

    let mut sq = 0.0;
    for i in 0..n {
        let row = z.row(i);
        for j in 0..p {
            let mut v = translation[j];
            for k in 0..p {
                v += r[(j, k)] * row[k];
            }
            let diff = v - y.row(i)[j];
            sq += diff * diff;
        }
    }
    Ok(Alignment {
        rotation: r,
        translation,
        rms: (sq / n as f64).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stress::{make_weights, stress, majorization_value, WeightVariant};

    /// Test-only oracle: direct Gaussian-elimination solve of `2 a x = -b`.
    fn solve_linear(a: &Mat, rhs: &[f64]) -> Vec<f64> {
        let n = a.rows();
        let mut m = a.clone();
        let mut b = rhs.to_vec();
        for k in 0..n {
            let mut piv = k;
            for i in k + 1..n {
                if m[(i, k)].abs() > m[(piv, k)].abs() {
                    piv = i;
                }
            }
            assert!(m[(piv, k)].abs() > 1e-300, "singular oracle system");
            if piv != k {
                for j in 0..n {
                    let t = m[(k, j)];
                    m[(k, j)] = m[(piv, j)];
                    m[(piv, j)] = t;
                }
                b.swap(k, piv);
            }
            for i in k + 1..n {
                let f = m[(i, k)] / m[(k, k)];
                for j in k..n {
                    let v = m[(k, j)];
                    m[(i, j)] -= f * v;
                }
                b[i] -= f * b[k];
            }
        }
        let mut x = vec![0.0; n];
        for k in (0..n).rev() {
            let mut acc = b[k];
            for j in k + 1..n {
                acc -= m[(k, j)] * x[j];
            }
            x[k] = acc / m[(k, k)];
        }
        x
    }

    fn random_instance(n: usize, seed: u64) -> (DistanceMatrix, WeightScheme) {
        let pts = Configuration::random(n, 3, 1.0, seed);
        let d = DistanceMatrix::from_configuration(&pts);
        let s = make_weights(WeightVariant::Dkm, &d).unwrap();
        (d, s)
    }

    #[test]
    fn descent_isotropic_one_step() {
        let a = Mat::identity(3);
        let b = vec![2.0, -4.0, 6.0];
        let x = quadratic_descent(&a, &b, &[0.0; 3], 50, 1e-12).unwrap();
        for (xi, bi) in x.iter().zip(&b) {
            assert!((xi + bi / 2.0).abs() < 1e-14);
        }
    }

    #[test]
    fn descent_zero_rhs_stays_put() {
        let a = Mat::identity(2);
        let x = quadratic_descent(&a, &[0.0, 0.0], &[0.0, 0.0], 10, 1e-12).unwrap();
        assert_eq!(x, vec![0.0, 0.0]);
    }

    #[test]
    fn descent_matches_direct_solve() {
        for seed in 0..10u64 {
            let n = 4 + (seed as usize % 5);
            let g = Mat::from_fn(n, n, |i, j| {
                (((i * 31 + j * 17 + seed as usize * 13) % 23) as f64) / 7.0 - 1.5
            });
            let a = g.transpose().matmul(&g).add(&Mat::identity(n));
            let b: Vec<f64> = (0..n).map(|i| ((i * 7 + 3) % 11) as f64 - 5.0).collect();
            let x = quadratic_descent(&a, &b, &vec![0.0; n], 5000, 1e-13).unwrap();
            let neg_b: Vec<f64> = b.iter().map(|v| -v).collect();
            let oracle = solve_linear(&a.scale(2.0), &neg_b);
            let diff: f64 = x
                .iter()
                .zip(&oracle)
                .map(|(p, q)| (p - q) * (p - q))
                .sum::<f64>()
                .sqrt();
            assert!(
                diff <= 1e-6 * (1.0 + norm2(&oracle)),
                "seed {seed}: |x - oracle| = {diff}"
            );
        }
    }

    #[test]
    fn descent_rejects_asymmetric() {
        let a = Mat::from_rows(&[vec![1.0, 2.0], vec![0.0, 1.0]]);
        assert!(matches!(
            quadratic_descent(&a, &[1.0, 1.0], &[0.0, 0.0], 5, 1e-9),
            Err(Error::NotSymmetric)
        ));
    }

    #[test]
    fn step_is_fixed_point_at_perfect_embedding() {
        let u = Configuration::random(6, 2, 1.0, 40);
        let d = DistanceMatrix::from_configuration(&u);
        let s = make_weights(WeightVariant::Kruskal, &d).unwrap();
        let v = majorization_step(&u, &d, &s, 200, 1e-10).unwrap();
        let phi = stress_unnormalized(&v, &d, &s);
        assert!(phi <= 1e-9, "stress after step {phi}");
        assert_eq!(v, u, "a perfect embedding is a fixed point, bit for bit");
    }

    #[test]
    fn step_sandwich_inequality() {
        for seed in 0..10u64 {
            let (d, s) = random_instance(7, seed + 200);
            let u = Configuration::random(7, 2, 1.0, seed + 300);
            let v = majorization_step(&u, &d, &s, 200, 1e-10).unwrap();
            let phi_u = stress_unnormalized(&u, &d, &s);
            let phi_v = stress_unnormalized(&v, &d, &s);
            let psi_vu = majorization_value(&v, &u, &d, &s);
            let psi_uu = majorization_value(&u, &u, &d, &s);
            assert!(phi_v <= psi_vu + 1e-9, "phi(V) {phi_v} > psi(V;U) {psi_vu}");
            assert!(psi_vu <= psi_uu + 1e-9, "psi(V;U) {psi_vu} > psi(U;U) {psi_uu}");
            assert!((psi_uu - phi_u).abs() <= 1e-9 * (1.0 + phi_u));
        }
    }

    #[test]
    fn step_coincident_points_stay_fixed() {
        // the coincident-pair guard zeroes C, the inner solver sees b = 0 and
        // keeps the warm start: a documented degenerate fixed point
        let d = DistanceMatrix::new(Mat::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]])).unwrap();
        let s = make_weights(WeightVariant::Kruskal, &d).unwrap();
        let u = Configuration::from_rows(&[vec![0.0], vec![0.0]]);
        let v = majorization_step(&u, &d, &s, 100, 1e-10).unwrap();
        assert_eq!(v, u);
    }

    #[test]
    fn embed_two_points_reaches_target_gap() {
        let d = DistanceMatrix::new(Mat::from_rows(&[vec![0.0, 5.0], vec![5.0, 0.0]])).unwrap();
        let s = make_weights(WeightVariant::Kruskal, &d).unwrap();
        let cfg = SolverConfig {
            p: 2,
            init: Init::Random {
                seed: 1,
                scale: None,
            },
            ..SolverConfig::default()
        };
        let r = embed(&d, &s, &cfg).unwrap();
        let gap = norm2(
            &r.coords
                .row(0)
                .iter()
                .zip(r.coords.row(1))
                .map(|(a, b)| a - b)
                .collect::<Vec<f64>>(),
        );
        assert!((gap - 5.0).abs() <= 1e-6, "gap {gap}");
        assert!(r.trace.values.last().unwrap() <= &1e-10);
        assert_eq!(r.trace.values.len(), r.outer_iterations + 1);
    }

    #[test]
    fn embed_perfect_init_stays_perfect() {
        let z = Configuration::random(8, 2, 1.0, 77);
        let d = DistanceMatrix::from_configuration(&z);
        let s = make_weights(WeightVariant::Dkm, &d).unwrap();
        let cfg = SolverConfig {
            p: 2,
            init: Init::Given(z.clone()),
            ..SolverConfig::default()
        };
        let r = embed(&d, &s, &cfg).unwrap();
        assert_eq!(r.trace.values[0], 0.0);
        assert_eq!(*r.trace.values.last().unwrap(), 0.0);
        assert!(r.converged);
        // gauge fix aside, the coordinates did not move
        assert_eq!(r.coords, z.centered());
    }

    #[test]
    fn embed_recovers_perturbed_planar_points() {
        let truth = Configuration::random(10, 2, 1.0, 501);
        let d = DistanceMatrix::from_configuration(&truth);
        let s = make_weights(WeightVariant::Kruskal, &d).unwrap();
        let cfg = SolverConfig {
            p: 2,
            outer_max: 500,
            outer_tol: 1e-15,
            inner_max: 200,
            inner_tol: 1e-12,
            init: Init::Given(truth.perturbed(1e-2, 777)),
        };
        let r = embed(&d, &s, &cfg).unwrap();
        let align = procrustes_align(&r.coords, &truth).unwrap();
        assert!(align.rms <= 1e-4, "rms {}", align.rms);
        assert!(stress(&r.coords, &d, &s) < 1e-10);
    }

    #[test]
    fn procrustes_identity() {
        let z = Configuration::random(6, 2, 1.0, 3);
        let a = procrustes_align(&z, &z).unwrap();
        assert!(a.rms < 1e-12);
        assert!(a.rotation.sub(&Mat::identity(2)).max_abs() < 1e-10);
        assert!(norm2(&a.translation) < 1e-10);
    }

    #[test]
    fn procrustes_recovers_rigid_motion() {
        let z = Configuration::random(7, 3, 1.0, 4);
        let theta = 0.8f64;
        let r0 = Mat::from_rows(&[
            vec![theta.cos(), -theta.sin(), 0.0],
            vec![theta.sin(), theta.cos(), 0.0],
            vec![0.0, 0.0, 1.0],
        ]);
        let c0 = [0.3, -1.2, 2.5];
        let y = Configuration::new(Mat::from_fn(7, 3, |i, j| {
            let row = z.row(i);
            c0[j] + (0..3).map(|k| r0[(j, k)] * row[k]).sum::<f64>()
        }));
        let a = procrustes_align(&z, &y).unwrap();
        assert!(a.rms <= 1e-9, "rms {}", a.rms);
        let mapped = a.apply(&z);
        assert!(mapped.mat().sub(y.mat()).max_abs() < 1e-9);
    }

    #[test]
    fn procrustes_accepts_reflection() {
        let z = Configuration::random(6, 2, 1.0, 9);
        // mirror the first axis
        let y = Configuration::new(Mat::from_fn(6, 2, |i, j| {
            if j == 0 {
                -z.row(i)[0]
            } else {
                z.row(i)[1]
            }
        }));
        let a = procrustes_align(&z, &y).unwrap();
        assert!(a.rms <= 1e-9, "rms {}", a.rms);
        assert!((crate::linalg::det(&a.rotation) + 1.0).abs() < 1e-9);
    }

    #[test]
    fn procrustes_rejects_coincident_source() {
        let z = Configuration::new(Mat::zeros(4, 2));
        let y = Configuration::random(4, 2, 1.0, 10);
        assert!(matches!(
            procrustes_align(&z, &y),
            Err(Error::AlignmentUndefined)
        ));
    }
}
