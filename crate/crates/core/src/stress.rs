//! Weight schemes and the weighted-stress algebra.
//!
//! The weighted stress of an embedding `Z` against a target distance matrix
//! `D` is
//!
//! ```text
//! Phi(Z) = M * sum_i sum_{j<i} w_ij (||z_i - z_j|| - d_ij)^2
//! ```
//!
//! with `M = 1, w = 1` (Kruskal), `M = 1/sum d, w = 1/d` (Sammon) and
//! `M = 1, w = 1/d^2` (Dwyer-Koren-Marriott). Instead of minimizing `Phi`
//! directly, the solver minimizes the quadratic surrogate
//!
//! ```text
//! Psi(Z; U) = sum_{j<i} w_ij d_ij^2 + sum_a (Z_a^T A Z_a - 2 Z_a^T C(U) U_a)
//! ```
//!
//! which satisfies `Phi(Z) <= Psi(Z; U)` with equality at `Z = U` (both sides
//! unnormalized, i.e. without `M`; a positive constant factor does not move
//! minimizers, so `M` is applied only when stress values are reported).
//! `A` is the weighted graph Laplacian of the weights and `C(U)` the
//! Laplacian of `w_ij d_ij / ||u_i - u_j||`.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::Mat;

/// Embedded points whose pairwise gap falls below this threshold get a zero
/// coefficient in `C(U)`; the majorization bound survives the convention.
pub const TAU_COINC: f64 = 1e-12;
/// Distances below this threshold make inverse-distance weights degenerate.
pub const TAU_DIST: f64 = 1e-12;

/// Symmetric nonnegative matrix with zero diagonal: the proximity pattern
/// fed to the embedding solver.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceMatrix {
    values: Mat,
}

impl DistanceMatrix {
    /// Validates symmetry (bitwise), a zero diagonal and nonnegative finite
    /// entries.
    pub fn new(values: Mat) -> Result<Self> {
        if !values.is_square() {
            return Err(Error::ShapeMismatch(format!(
                "distance matrix must be square, got {}x{}",
                values.rows(),
                values.cols()
            )));
        }
        let n = values.rows();
        for i in 0..n {
            if values[(i, i)] != 0.0 {
                return Err(Error::ValidationFailed(format!(
                    "diagonal entry ({i}, {i}) is {}, expected 0",
                    values[(i, i)]
                )));
            }
            for j in 0..i {
                let d = values[(i, j)];
                if !d.is_finite() || d < 0.0 {
                    return Err(Error::ValidationFailed(format!(
                        "entry ({i}, {j}) is {d}, expected a nonnegative finite number"
                    )));
                }
                if d != values[(j, i)] {
                    return Err(Error::ValidationFailed(format!(
                        "matrix is not symmetric at ({i}, {j}): {d} vs {}",
                        values[(j, i)]
                    )));
                }
            }
        }
        Ok(Self { values })
    }

    /// Euclidean pairwise distances of the rows of a configuration.
    pub fn from_configuration(z: &Configuration) -> Self {
        let n = z.n();
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            for j in 0..i {
                let d = row_distance(z, i, j);
                m[(i, j)] = d;
                m[(j, i)] = d;
            }
        }
        Self { values: m }
    }

    pub fn n(&self) -> usize {
        self.values.rows()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[(i, j)]
    }

    pub fn values(&self) -> &Mat {
        &self.values
    }

    pub fn max_off_diagonal(&self) -> f64 {
        let n = self.n();
        let mut m = 0.0f64;
        for i in 0..n {
            for j in 0..i {
                m = m.max(self.values[(i, j)]);
            }
        }
        m
    }

    pub fn mean_off_diagonal(&self) -> f64 {
        let n = self.n();
        if n < 2 {
            return 0.0;
        }
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..i {
                s += self.values[(i, j)];
            }
        }
        s / (n * (n - 1) / 2) as f64
    }
}

/// The weighting family: the three named schemes plus custom weights.
#[derive(Clone, Debug, PartialEq)]
pub enum WeightVariant {
    Kruskal,
    Sammon,
    Dkm,
    /// Symmetric matrix with positive off-diagonal entries (diagonal unused).
    Custom(Mat),
}

/// Weights together with the normalization constant `M`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightScheme {
    variant_name: &'static str,
    m: f64,
    weights: Mat,
}

impl WeightScheme {
    pub fn normalization(&self) -> f64 {
        self.m
    }

    #[inline]
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.weights[(i, j)]
    }

    pub fn weights(&self) -> &Mat {
        &self.weights
    }

    pub fn n(&self) -> usize {
        self.weights.rows()
    }

    pub fn variant_name(&self) -> &'static str {
        self.variant_name
    }
}

/// Builds the weight scheme for a distance matrix.
///
/// Sammon and Dwyer-Koren-Marriott weights are inverse powers of the
/// distances, so any (off-diagonal) zero distance is an error naming the
/// offending pair.
pub fn make_weights(variant: WeightVariant, d: &DistanceMatrix) -> Result<WeightScheme> {
    let n = d.n();
    match variant {
        WeightVariant::Kruskal => Ok(WeightScheme {
            variant_name: "kruskal",
            m: 1.0,
            weights: Mat::from_fn(n, n, |i, j| if i == j { 0.0 } else { 1.0 }),
        }),
        WeightVariant::Sammon => {
            check_positive_distances(d, "sammon")?;
            let mut total = 0.0;
            for i in 0..n {
                for j in 0..i {
                    total += d.get(i, j);
                }
            }
            Ok(WeightScheme {
                variant_name: "sammon",
                m: 1.0 / total,
                weights: Mat::from_fn(n, n, |i, j| if i == j { 0.0 } else { 1.0 / d.get(i, j) }),
            })
        }
        WeightVariant::Dkm => {
            check_positive_distances(d, "dkm")?;
            Ok(WeightScheme {
                variant_name: "dkm",
                m: 1.0,
                weights: Mat::from_fn(n, n, |i, j| {
                    if i == j {
                        0.0
                    } else {
                        1.0 / (d.get(i, j) * d.get(i, j))
                    }
                }),
            })
        }
        WeightVariant::Custom(w) => {
            if w.rows() != n || w.cols() != n {
                return Err(Error::ShapeMismatch(format!(
                    "custom weights are {}x{}, distances are {n}x{n}",
                    w.rows(),
                    w.cols()
                )));
            }
            for i in 0..n {
                for j in 0..i {
                    if w[(i, j)] != w[(j, i)] {
                        return Err(Error::ValidationFailed(format!(
                            "custom weights not symmetric at ({i}, {j})"
                        )));
                    }
                    if !w[(i, j)].is_finite() || w[(i, j)] <= 0.0 {
                        return Err(Error::ValidationFailed(format!(
                            "custom weight ({i}, {j}) = {} must be positive and finite",
                            w[(i, j)]
                        )));
                    }
                }
            }
            Ok(WeightScheme {
                variant_name: "custom",
                m: 1.0,
                weights: w,
            })
        }
    }
}

fn check_positive_distances(d: &DistanceMatrix, scheme: &'static str) -> Result<()> {
    let n = d.n();
    for i in 0..n {
        for j in 0..i {
            if d.get(i, j) <= TAU_DIST {
                return Err(Error::DegenerateDistance { i, j, scheme });
            }
        }
    }
    Ok(())
}

/// An `n x p` coordinate matrix; row `k` is the embedded point `z_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct Configuration {
    mat: Mat,
}

impl Configuration {
    pub fn new(mat: Mat) -> Self {
        Self { mat }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        Self {
            mat: Mat::from_rows(rows),
        }
    }

    /// Gaussian coordinates with the given scale; deterministic per seed.
    pub fn random(n: usize, p: usize, scale: f64, seed: u64) -> Self {
        let mut rng: ChaCha8Rng = rand::SeedableRng::seed_from_u64(seed);
        let mat = Mat::from_fn(n, p, |_, _| {
            let g: f64 = rng.sample(StandardNormal);
            scale * g
        });
        Self { mat }
    }

    pub fn n(&self) -> usize {
        self.mat.rows()
    }

    pub fn p(&self) -> usize {
        self.mat.cols()
    }

    #[inline]
    pub fn row(&self, k: usize) -> &[f64] {
        self.mat.row(k)
    }

    pub fn mat(&self) -> &Mat {
        &self.mat
    }

    pub fn column(&self, a: usize) -> Vec<f64> {
        self.mat.col(a)
    }

    /// Adds seeded Gaussian noise of the given scale to every coordinate.
    pub fn perturbed(&self, scale: f64, seed: u64) -> Self {
        let mut rng: ChaCha8Rng = rand::SeedableRng::seed_from_u64(seed);
        let mat = Mat::from_fn(self.n(), self.p(), |i, j| {
            let g: f64 = rng.sample(StandardNormal);
            self.mat[(i, j)] + scale * g
        });
        Self { mat }
    }

    /// Translates the centroid to the origin.
    pub fn centered(&self) -> Self {
        let (n, p) = (self.n(), self.p());
        let mut mean = vec![0.0; p];
        for i in 0..n {
            for (m, v) in mean.iter_mut().zip(self.mat.row(i)) {
                *m += v;
            }
        }
        for m in &mut mean {
            *m /= n as f64;
        }
        Self {
            mat: Mat::from_fn(n, p, |i, j| self.mat[(i, j)] - mean[j]),
        }
    }
}

#[inline]
fn row_distance(z: &Configuration, i: usize, j: usize) -> f64 {
    z.row(i)
        .iter()
        .zip(z.row(j))
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}

/// Weighted stress `M * sum_{j<i} w_ij (||z_i - z_j|| - d_ij)^2`.
pub fn stress(z: &Configuration, d: &DistanceMatrix, s: &WeightScheme) -> f64 {
    s.normalization() * stress_unnormalized(z, d, s)
}

/// The stress double sum without the normalization constant `M`; this is the
/// quantity the majorization bound controls.
pub fn stress_unnormalized(z: &Configuration, d: &DistanceMatrix, s: &WeightScheme) -> f64 {
    assert_eq!(z.n(), d.n(), "configuration and distances disagree on n");
    assert_eq!(s.n(), d.n(), "weights and distances disagree on n");
    let n = d.n();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..i {
            let gap = row_distance(z, i, j) - d.get(i, j);
            acc += s.weight(i, j) * gap * gap;
        }
    }
    acc
}

/// Weighted graph Laplacian of the weight scheme: `A_ij = -w_ij` off the
/// diagonal, row sums zero. Symmetric positive semi-definite with the
/// constant vector in its null space.
pub fn build_a(s: &WeightScheme) -> Mat {
    let n = s.n();
    let mut a = Mat::zeros(n, n);
    for i in 0..n {
        let mut diag = 0.0;
        for j in 0..n {
            if i != j {
                a[(i, j)] = -s.weight(i, j);
                diag += s.weight(i, j);
            }
        }
        a[(i, i)] = diag;
    }
    a
}

/// Majorization coefficient matrix `C(U)`: the Laplacian of
/// `w_ij d_ij / ||u_i - u_j||`, with coefficients for (near-)coincident
/// embedded pairs set to zero. That convention keeps the surrogate an upper
/// bound: dropping a pair replaces `-2 w d ||z_i-z_j||` by 0 from above.
pub fn build_c(u: &Configuration, d: &DistanceMatrix, s: &WeightScheme) -> Mat {
    assert_eq!(u.n(), d.n(), "configuration and distances disagree on n");
    let n = d.n();
    let mut c = Mat::zeros(n, n);
    for i in 0..n {
        for j in 0..i {
            let gap = row_distance(u, i, j);
            let coeff = if gap < TAU_COINC {
                0.0
            } else {
                s.weight(i, j) * d.get(i, j) / gap
            };
            c[(i, j)] = -coeff;
            c[(j, i)] = -coeff;
        }
    }
    for i in 0..n {
        let mut diag = 0.0;
        for j in 0..n {
            if i != j {
                diag -= c[(i, j)];
            }
        }
        c[(i, i)] = diag;
    }
    c
}

/// The quadratic surrogate `Psi(Z; U)` (unnormalized, like
/// [`stress_unnormalized`]).
pub fn majorization_value(
    z: &Configuration,
    u: &Configuration,
    d: &DistanceMatrix,
    s: &WeightScheme,
) -> f64 {
    assert_eq!(z.n(), u.n(), "configurations disagree on n");
    assert_eq!(z.p(), u.p(), "configurations disagree on p");
    let n = d.n();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..i {
            let dij = d.get(i, j);
            acc += s.weight(i, j) * dij * dij;
        }
    }
    let a = build_a(s);
    let c = build_c(u, d, s);
    for axis in 0..z.p() {
        let za = z.column(axis);
        let ua = u.column(axis);
        let aza = a.matvec(&za);
        let cua = c.matvec(&ua);
        acc += crate::linalg::dot(&za, &aza) - 2.0 * crate::linalg::dot(&za, &cua);
    }
    acc
}

/// Per-iteration stress trace plus its decibel form.
#[derive(Clone, Debug, PartialEq)]
pub struct StressTrace {
    /// Stress after each outer iteration, starting with the initial stress.
    pub values: Vec<f64>,
    /// `10 log10(values[k] / values[0])`; empty when the initial stress is
    /// zero (the ratio is undefined for an already perfect embedding).
    pub db: Vec<f64>,
}

impl StressTrace {
    pub fn from_values(values: Vec<f64>) -> Self {
        let db = stress_trace_db(&values).unwrap_or_default();
        Self { values, db }
    }

    pub fn final_db(&self) -> Option<f64> {
        self.db.last().copied()
    }
}

/// Normalizes a stress sequence to its initial value, in decibels:
/// element `k` is `10 log10(values[k] / values[0])`.
pub fn stress_trace_db(values: &[f64]) -> Result<Vec<f64>> {
    let first = *values.first().ok_or(Error::UndefinedTrace)?;
    if first <= 0.0 {
        return Err(Error::UndefinedTrace);
    }
    Ok(values.iter().map(|v| 10.0 * (v / first).log10()).collect())
}
