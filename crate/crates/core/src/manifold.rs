//! Validated points on four Riemannian matrix manifolds and their geodesic
//! distances.
//!
//! | manifold            | elements                  | distance                          |
//! |---------------------|---------------------------|-----------------------------------|
//! | SO(q)               | rotation matrices         | sqrt(-tr(log^2(x^T y)))           |
//! | S^q                 | unit vectors in R^q       | arccos(x^T y)                     |
//! | S+(q)               | symmetric positive def.   | sqrt(tr(log^2(x^{-1} y)))         |
//! | SU(q)               | special unitary matrices  | sqrt(-tr(log^2(x^H y)))           |
//!
//! Rotation and unitary logarithms go through the eigendecomposition of the
//! relative rotation `x^T y` (a normal matrix), which exposes the principal
//! rotation angles directly; the positive-definite distance uses the
//! symmetrized form `x^{-1/2} y x^{-1/2}`, similar to `x^{-1} y` and hence
//! with the same spectrum.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{
    cdet, det, orthonormalize_rows, orthonormalize_rows_complex, spectral_map, sym_eig, sym_exp,
    unitary_eig, CMat, Mat,
};
use crate::stress::DistanceMatrix;

/// Relative tolerance for orthogonality / unit-norm / symmetry validation.
pub const TAU_ORTH: f64 = 1e-8;
/// Absolute eigenvalue floor below which a matrix is not accepted as
/// positive definite.
pub const TAU_PD: f64 = 1e-12;
/// Rotation angles within this distance of pi raise a cut-locus error; the
/// principal logarithm is not unique there.
pub const TAU_CUT: f64 = 1e-6;
/// Residual imaginary part accepted when a Hermitian inner product is
/// reported as a real number.
pub const TAU_IMAG: f64 = 1e-9;

/// One of the four supported manifolds together with its size parameter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ManifoldKind {
    /// Rotation matrices: q x q orthogonal with determinant +1.
    SpecialOrthogonal(usize),
    /// Unit vectors in R^q.
    UnitSphere(usize),
    /// Symmetric positive-definite q x q matrices.
    SymmetricPositiveDefinite(usize),
    /// Special unitary q x q matrices (unitary, determinant 1).
    SpecialUnitary(usize),
}

impl ManifoldKind {
    pub fn q(&self) -> usize {
        match *self {
            ManifoldKind::SpecialOrthogonal(q)
            | ManifoldKind::UnitSphere(q)
            | ManifoldKind::SymmetricPositiveDefinite(q)
            | ManifoldKind::SpecialUnitary(q) => q,
        }
    }

    /// Dimension of the manifold itself (not of the ambient space).
    pub fn intrinsic_dim(&self) -> usize {
        match *self {
            ManifoldKind::SpecialOrthogonal(q) => q * (q - 1) / 2,
            ManifoldKind::UnitSphere(q) => q - 1,
            ManifoldKind::SymmetricPositiveDefinite(q) => q * (q + 1) / 2,
            ManifoldKind::SpecialUnitary(q) => q * q - 1,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ManifoldKind::SpecialOrthogonal(_) => "special orthogonal",
            ManifoldKind::UnitSphere(_) => "unit sphere",
            ManifoldKind::SymmetricPositiveDefinite(_) => "symmetric positive definite",
            ManifoldKind::SpecialUnitary(_) => "special unitary",
        }
    }

    /// Checks the size parameter: spheres need q >= 1, matrix manifolds q >= 2.
    pub fn check(&self) -> Result<()> {
        let min = match self {
            ManifoldKind::UnitSphere(_) => 1,
            _ => 2,
        };
        if self.q() < min {
            return Err(Error::ValidationFailed(format!(
                "{} requires q >= {}, got {}",
                self.name(),
                min,
                self.q()
            )));
        }
        Ok(())
    }
}

/// Raw storage of a manifold element: a real vector, a real matrix or a
/// complex matrix depending on the manifold.
#[derive(Clone, Debug, PartialEq)]
pub enum PointData {
    Vector(Vec<f64>),
    Real(Mat),
    Complex(CMat),
}

/// A validated element of one of the supported manifolds.
#[derive(Clone, Debug, PartialEq)]
pub struct ManifoldPoint {
    kind: ManifoldKind,
    data: PointData,
}

impl ManifoldPoint {
    /// Validates `data` against the manifold invariants at the default
    /// tolerance [`TAU_ORTH`] (eigenvalue floor [`TAU_PD`] for the
    /// positive-definite cone).
    pub fn new(kind: ManifoldKind, data: PointData) -> Result<Self> {
        Self::new_with_tolerance(kind, data, TAU_ORTH)
    }

    pub fn new_with_tolerance(kind: ManifoldKind, data: PointData, tol: f64) -> Result<Self> {
        kind.check()?;
        check_shape(kind, &data)?;
        if let Some(why) = invariant_failure(kind, &data, tol) {
            return Err(Error::ValidationFailed(why));
        }
        Ok(Self { kind, data })
    }

    /// Skips validation. Meant for values that are valid by construction.
    pub fn new_unchecked(kind: ManifoldKind, data: PointData) -> Self {
        Self { kind, data }
    }

    pub fn kind(&self) -> ManifoldKind {
        self.kind
    }

    pub fn data(&self) -> &PointData {
        &self.data
    }

    pub fn as_vector(&self) -> Option<&[f64]> {
        match &self.data {
            PointData::Vector(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_real(&self) -> Option<&Mat> {
        match &self.data {
            PointData::Real(m) => Some(m),
            _ => None,
        }
    }

    pub fn as_complex(&self) -> Option<&CMat> {
        match &self.data {
            PointData::Complex(m) => Some(m),
            _ => None,
        }
    }
}

/// Checks that the storage variant and dimensions match the manifold kind.
/// Violations are structural errors, distinct from validation failures.
fn check_shape(kind: ManifoldKind, data: &PointData) -> Result<()> {
    let q = kind.q();
    let ok = match (kind, data) {
        (ManifoldKind::UnitSphere(_), PointData::Vector(v)) => v.len() == q,
        (
            ManifoldKind::SpecialOrthogonal(_) | ManifoldKind::SymmetricPositiveDefinite(_),
            PointData::Real(m),
        ) => m.rows() == q && m.cols() == q,
        (ManifoldKind::SpecialUnitary(_), PointData::Complex(m)) => {
            m.rows() == q && m.cols() == q
        }
        _ => false,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::ShapeMismatch(format!(
            "data does not have the shape of a {} element with q = {}",
            kind.name(),
            q
        )))
    }
}

/// Returns a description of the violated invariant, or None if the point is
/// valid to within `tol`.
fn invariant_failure(kind: ManifoldKind, data: &PointData, tol: f64) -> Option<String> {
    match (kind, data) {
        (ManifoldKind::UnitSphere(_), PointData::Vector(v)) => {
            let n = crate::linalg::norm2(v);
            if (n - 1.0).abs() > tol {
                return Some(format!("vector norm {n} is not 1"));
            }
            None
        }
        (ManifoldKind::SpecialOrthogonal(q), PointData::Real(m)) => {
            let g = m.transpose().matmul(m);
            let r = g.sub(&Mat::identity(q)).frobenius();
            if r > tol * (q as f64).sqrt() {
                return Some(format!("x^T x deviates from identity by {r}"));
            }
            let d = det(m);
            if (d - 1.0).abs() > tol * q as f64 {
                return Some(format!("determinant {d} is not +1"));
            }
            None
        }
        (ManifoldKind::SymmetricPositiveDefinite(_), PointData::Real(m)) => {
            let asym = m.sub(&m.transpose()).frobenius();
            if asym > tol * (1.0 + m.frobenius()) {
                return Some(format!("matrix is not symmetric (residual {asym})"));
            }
            match sym_eig(&m.symmetrize()) {
                Ok(eig) => {
                    let min = eig.values[0];
                    if min <= TAU_PD {
                        return Some(format!("smallest eigenvalue {min} is not positive"));
                    }
                    None
                }
                Err(e) => Some(format!("eigendecomposition failed: {e}")),
            }
        }
        (ManifoldKind::SpecialUnitary(q), PointData::Complex(m)) => {
            let g = m.adjoint().matmul(m);
            let r = g.sub(&CMat::identity(q)).frobenius();
            if r > tol * (q as f64).sqrt() {
                return Some(format!("x^H x deviates from identity by {r}"));
            }
            let d = cdet(m);
            if (d - Complex64::new(1.0, 0.0)).norm() > tol * q as f64 {
                return Some(format!("determinant {d} is not 1"));
            }
            None
        }
        _ => Some("shape does not match kind".to_string()),
    }
}

/// True iff the point satisfies all invariants of its manifold within
/// `tolerance`. Shape mismatches are structural errors, not `false`.
pub fn validate(point: &ManifoldPoint, tolerance: f64) -> Result<bool> {
    point.kind.check()?;
    check_shape(point.kind, &point.data)?;
    Ok(invariant_failure(point.kind, &point.data, tolerance).is_none())
}

/// A tangent vector attached to a base point; the stored data satisfies the
/// linearized manifold constraint at that point.
#[derive(Clone, Debug, PartialEq)]
pub struct TangentVector {
    base: ManifoldPoint,
    data: PointData,
}

impl TangentVector {
    pub fn new(base: ManifoldPoint, data: PointData) -> Result<Self> {
        check_shape(base.kind, &data)?;
        let tol = TAU_ORTH;
        let bad = match (&base.data, &data) {
            (PointData::Vector(x), PointData::Vector(v)) => {
                let ip = crate::linalg::dot(x, v).abs();
                (ip > tol * (1.0 + crate::linalg::norm2(v)))
                    .then(|| format!("not orthogonal to the base point (x.v = {ip})"))
            }
            (PointData::Real(x), PointData::Real(v)) => match base.kind {
                ManifoldKind::SpecialOrthogonal(_) => {
                    let s = x.transpose().matmul(v);
                    let r = s.add(&s.transpose()).frobenius();
                    (r > tol * (1.0 + v.frobenius()))
                        .then(|| format!("x^T v is not skew-symmetric (residual {r})"))
                }
                _ => {
                    let r = v.sub(&v.transpose()).frobenius();
                    (r > tol * (1.0 + v.frobenius()))
                        .then(|| format!("not symmetric (residual {r})"))
                }
            },
            (PointData::Complex(x), PointData::Complex(v)) => {
                let s = x.adjoint().matmul(v);
                let r = s.add(&s.adjoint()).frobenius();
                (r > tol * (1.0 + v.frobenius()))
                    .then(|| format!("x^H v is not skew-Hermitian (residual {r})"))
            }
            _ => Some("storage variant does not match the base point".to_string()),
        };
        match bad {
            Some(why) => Err(Error::ValidationFailed(why)),
            None => Ok(Self { base, data }),
        }
    }

    pub fn kind(&self) -> ManifoldKind {
        self.base.kind
    }

    pub fn base(&self) -> &ManifoldPoint {
        &self.base
    }

    pub fn data(&self) -> &PointData {
        &self.data
    }
}

/// Sum over entries of `a_ij * b_ji`, i.e. `tr(a b)`.
fn trace_product(a: &Mat, b: &Mat) -> f64 {
    let mut s = 0.0;
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            s += a[(i, j)] * b[(j, i)];
        }
    }
    s
}

/// Riemannian inner product of two tangent vectors at the same base point.
///
/// SO(q) and the sphere use tr(v^T w), the positive-definite cone
/// tr(x^{-1} v x^{-1} w), SU(q) the real part of tr(v^H w) (the imaginary
/// part must vanish within [`TAU_IMAG`]).
pub fn inner_product(v: &TangentVector, w: &TangentVector) -> Result<f64> {
    if v.base != w.base {
        return Err(Error::BasePointMismatch);
    }
    match (&v.data, &w.data) {
        (PointData::Vector(a), PointData::Vector(b)) => Ok(crate::linalg::dot(a, b)),
        (PointData::Real(a), PointData::Real(b)) => match v.base.kind {
            ManifoldKind::SymmetricPositiveDefinite(_) => {
                let x = v.base.as_real().expect("SPD base is real");
                let eig = sym_eig(&x.symmetrize())?;
                if eig.values[0] <= TAU_PD {
                    return Err(Error::NotPositiveDefinite {
                        eigenvalue: eig.values[0],
                        floor: TAU_PD,
                    });
                }
                let inv = spectral_map(&eig, |l| 1.0 / l);
                let m1 = inv.matmul(a);
                let m2 = inv.matmul(b);
                Ok(trace_product(&m1, &m2))
            }
            _ => {
                // tr(a^T b) is the entrywise product sum
                let mut s = 0.0;
                for i in 0..a.rows() {
                    for j in 0..a.cols() {
                        s += a[(i, j)] * b[(i, j)];
                    }
                }
                Ok(s)
            }
        },
        (PointData::Complex(a), PointData::Complex(b)) => {
            let mut s = Complex64::new(0.0, 0.0);
            for i in 0..a.rows() {
                for j in 0..a.cols() {
                    s += a[(i, j)].conj() * b[(i, j)];
                }
            }
            if s.im.abs() > TAU_IMAG * (1.0 + s.re.abs()) {
                return Err(Error::NonRealInnerProduct { imag: s.im });
            }
            Ok(s.re)
        }
        _ => Err(Error::ShapeMismatch(
            "tangent vectors have different storage variants".to_string(),
        )),
    }
}

/// Great-circle distance arccos(x . y) between unit vectors, in [0, pi].
pub fn sphere_distance(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::ShapeMismatch(format!(
            "vectors of length {} and {}",
            x.len(),
            y.len()
        )));
    }
    for (label, v) in [("first", x), ("second", y)] {
        let n = crate::linalg::norm2(v);
        if (n - 1.0).abs() > TAU_ORTH {
            return Err(Error::ValidationFailed(format!(
                "{label} argument has norm {n}, not a unit vector"
            )));
        }
    }
    let ip = crate::linalg::dot(x, y).clamp(-1.0, 1.0);
    Ok(ip.acos())
}

/// Principal rotation angles of an orthogonal (or unitary) matrix, through
/// the eigendecomposition of its Hermitian/skew-Hermitian parts. Errors if
/// any angle is within [`TAU_CUT`] of pi.
fn principal_angles(u: &CMat) -> Result<Vec<f64>> {
    let (phases, _) = unitary_eig(u)?;
    for &p in &phases {
        if p.abs() >= std::f64::consts::PI - TAU_CUT {
            return Err(Error::CutLocus {
                angle: p.abs(),
                tol: TAU_CUT,
            });
        }
    }
    Ok(phases)
}

fn angles_to_distance(phases: &[f64]) -> f64 {
    phases.iter().map(|p| p * p).sum::<f64>().sqrt()
}

fn expect_kind(p: &ManifoldPoint, want: &str, ok: bool) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::KindMismatch(format!(
            "expected a {} point, got {}",
            want,
            p.kind().name()
        )))
    }
}

/// Geodesic distance sqrt(-tr(log^2(x^T y))) on SO(q).
pub fn so_distance(x: &ManifoldPoint, y: &ManifoldPoint) -> Result<f64> {
    expect_kind(x, "special orthogonal", matches!(x.kind, ManifoldKind::SpecialOrthogonal(_)))?;
    if x.kind != y.kind {
        return Err(Error::KindMismatch(format!(
            "{:?} vs {:?}",
            x.kind, y.kind
        )));
    }
    let r = x
        .as_real()
        .expect("SO point is real")
        .transpose()
        .matmul(y.as_real().expect("SO point is real"));
    let phases = principal_angles(&CMat::from_real(&r))?;
    Ok(angles_to_distance(&phases))
}

/// Affine-invariant distance sqrt(tr(log^2(x^{-1} y))) on the
/// positive-definite cone, computed through x^{-1/2} y x^{-1/2}.
pub fn spd_distance(x: &ManifoldPoint, y: &ManifoldPoint) -> Result<f64> {
    expect_kind(
        x,
        "symmetric positive definite",
        matches!(x.kind, ManifoldKind::SymmetricPositiveDefinite(_)),
    )?;
    if x.kind != y.kind {
        return Err(Error::KindMismatch(format!(
            "{:?} vs {:?}",
            x.kind, y.kind
        )));
    }
    let xm = x.as_real().expect("SPD point is real").symmetrize();
    let ym = y.as_real().expect("SPD point is real").symmetrize();
    let eig_x = sym_eig(&xm)?;
    if eig_x.values[0] <= TAU_PD {
        return Err(Error::NotPositiveDefinite {
            eigenvalue: eig_x.values[0],
            floor: TAU_PD,
        });
    }
    let inv_sqrt = spectral_map(&eig_x, |l| 1.0 / l.sqrt());
    let m = inv_sqrt.matmul(&ym).matmul(&inv_sqrt).symmetrize();
    let eig_m = sym_eig(&m)?;
    if eig_m.values[0] <= 0.0 {
        return Err(Error::NotPositiveDefinite {
            eigenvalue: eig_m.values[0],
            floor: 0.0,
        });
    }
    Ok(eig_m.values.iter().map(|l| l.ln().powi(2)).sum::<f64>().sqrt())
}

/// Geodesic distance sqrt(-tr(log^2(x^H y))) on SU(q).
pub fn su_distance(x: &ManifoldPoint, y: &ManifoldPoint) -> Result<f64> {
    expect_kind(x, "special unitary", matches!(x.kind, ManifoldKind::SpecialUnitary(_)))?;
    if x.kind != y.kind {
        return Err(Error::KindMismatch(format!(
            "{:?} vs {:?}",
            x.kind, y.kind
        )));
    }
    let u = x
        .as_complex()
        .expect("SU point is complex")
        .adjoint()
        .matmul(y.as_complex().expect("SU point is complex"));
    let phases = principal_angles(&u)?;
    Ok(angles_to_distance(&phases))
}

/// Geodesic distance between two points of the same manifold.
pub fn distance(x: &ManifoldPoint, y: &ManifoldPoint) -> Result<f64> {
    if x.kind != y.kind {
        return Err(Error::KindMismatch(format!(
            "{:?} vs {:?}",
            x.kind, y.kind
        )));
    }
    match x.kind {
        ManifoldKind::UnitSphere(_) => sphere_distance(
            x.as_vector().expect("sphere point is a vector"),
            y.as_vector().expect("sphere point is a vector"),
        ),
        ManifoldKind::SpecialOrthogonal(_) => so_distance(x, y),
        ManifoldKind::SymmetricPositiveDefinite(_) => spd_distance(x, y),
        ManifoldKind::SpecialUnitary(_) => su_distance(x, y),
    }
}

/// Full pairwise geodesic distance matrix. Pairs are independent and are
/// evaluated in parallel; the result does not depend on scheduling. Errors
/// carry the offending index pair.
pub fn pairwise_distances(points: &[ManifoldPoint]) -> Result<DistanceMatrix> {
    let n = points.len();
    if n < 2 {
        return Err(Error::ShapeMismatch(format!(
            "need at least 2 points, got {n}"
        )));
    }
    let kind = points[0].kind;
    for (i, p) in points.iter().enumerate() {
        if p.kind != kind {
            return Err(Error::KindMismatch(format!(
                "point 0 is {:?} but point {} is {:?}",
                kind, i, p.kind
            )));
        }
    }
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..i).map(move |j| (i, j))).collect();
    let values: Vec<f64> = pairs
        .par_iter()
        .map(|&(i, j)| {
            distance(&points[i], &points[j]).map_err(|e| Error::AtPair {
                i,
                j,
                source: Box::new(e),
            })
        })
        .collect::<Result<Vec<f64>>>()?;
    let mut m = Mat::zeros(n, n);
    for (&(i, j), &d) in pairs.iter().zip(&values) {
        m[(i, j)] = d;
        m[(j, i)] = d;
    }
    DistanceMatrix::new(m)
}

/// Complex Hermitian eigendecomposition route for exp of a real skew matrix:
/// -i*omega is Hermitian with real eigenvalues theta_j, and
/// exp(omega) = V diag(e^{i theta_j}) V^H is real orthogonal.
fn skew_exp(omega: &Mat) -> Result<Mat> {
    let q = omega.rows();
    let h = CMat::from_fn(q, q, |i, j| Complex64::new(0.0, -omega[(i, j)]));
    let eig = crate::linalg::herm_eig(&h)?;
    let lam = CMat::from_fn(q, q, |i, j| {
        if i == j {
            Complex64::from_polar(1.0, eig.values[i])
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let e = eig.vectors.matmul(&lam).matmul(&eig.vectors.adjoint());
    Ok(e.real_part())
}

/// Exponential map on SO(q): `base * exp(omega)` for skew-symmetric `omega`.
pub fn so_exp(base: &ManifoldPoint, omega: &Mat) -> Result<ManifoldPoint> {
    expect_kind(base, "special orthogonal", matches!(base.kind, ManifoldKind::SpecialOrthogonal(_)))?;
    let q = base.kind.q();
    if omega.rows() != q || omega.cols() != q {
        return Err(Error::ShapeMismatch(format!(
            "omega is {}x{}, expected {q}x{q}",
            omega.rows(),
            omega.cols()
        )));
    }
    let asym = omega.add(&omega.transpose()).frobenius();
    if asym > TAU_ORTH * (1.0 + omega.frobenius()) {
        return Err(Error::ValidationFailed(format!(
            "omega is not skew-symmetric (residual {asym})"
        )));
    }
    let e = skew_exp(&omega.skew_part())?;
    let m = base.as_real().expect("SO point is real").matmul(&e);
    ManifoldPoint::new(base.kind, PointData::Real(m))
}

/// Principal logarithm on SO(q): the skew-symmetric `omega` with
/// `y = base * exp(omega)`. Errors at the cut locus (rotation angle near pi).
pub fn so_log(base: &ManifoldPoint, y: &ManifoldPoint) -> Result<Mat> {
    expect_kind(base, "special orthogonal", matches!(base.kind, ManifoldKind::SpecialOrthogonal(_)))?;
    if base.kind != y.kind {
        return Err(Error::KindMismatch(format!(
            "{:?} vs {:?}",
            base.kind, y.kind
        )));
    }
    let r = base
        .as_real()
        .expect("SO point is real")
        .transpose()
        .matmul(y.as_real().expect("SO point is real"));
    let (phases, v) = unitary_eig(&CMat::from_real(&r))?;
    for &p in &phases {
        if p.abs() >= std::f64::consts::PI - TAU_CUT {
            return Err(Error::CutLocus {
                angle: p.abs(),
                tol: TAU_CUT,
            });
        }
    }
    let q = r.rows();
    let lam = CMat::from_fn(q, q, |i, j| {
        if i == j {
            Complex64::new(0.0, phases[i])
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let l = v.matmul(&lam).matmul(&v.adjoint());
    Ok(l.real_part().skew_part())
}

fn gaussian_vec(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| rng.sample(StandardNormal)).collect()
}

fn gaussian_mat(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Mat {
    let mut m = Mat::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m[(i, j)] = rng.sample(StandardNormal);
        }
    }
    m
}

fn sample_sphere(rng: &mut ChaCha8Rng, q: usize) -> PointData {
    loop {
        let v = gaussian_vec(rng, q);
        let n = crate::linalg::norm2(&v);
        if n > 1e-6 {
            return PointData::Vector(v.into_iter().map(|x| x / n).collect());
        }
    }
}

fn sample_so(rng: &mut ChaCha8Rng, q: usize) -> PointData {
    loop {
        let mut g = gaussian_mat(rng, q, q);
        if !orthonormalize_rows(&mut g) {
            continue;
        }
        if det(&g) < 0.0 {
            for x in g.row_mut(0) {
                *x = -*x;
            }
        }
        return PointData::Real(g);
    }
}

fn sample_spd(rng: &mut ChaCha8Rng, q: usize) -> Result<PointData> {
    loop {
        let g = gaussian_mat(rng, q, q).symmetrize();
        let n = g.frobenius();
        if n < 1e-6 {
            continue;
        }
        // Frobenius norm bounds the spectrum, so eigenvalues of the exponent
        // stay in [-1.5, 1.5] and the sample is well conditioned.
        let s = g.scale(1.5 / n);
        return Ok(PointData::Real(sym_exp(&s)?));
    }
}

fn sample_su(rng: &mut ChaCha8Rng, q: usize) -> PointData {
    loop {
        let mut g = CMat::from_fn(q, q, |_, _| {
            Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        if !orthonormalize_rows_complex(&mut g) {
            continue;
        }
        let d = cdet(&g);
        let phase = d / d.norm();
        for x in g.row_mut(0) {
            *x /= phase;
        }
        return PointData::Complex(g);
    }
}

/// Draws a pseudo-random point on the manifold. Deterministic given the seed.
pub fn random_point(kind: ManifoldKind, seed: u64) -> Result<ManifoldPoint> {
    kind.check()?;
    let mut rng = rand::SeedableRng::seed_from_u64(seed);
    sample_point(kind, &mut rng)
}

fn sample_point(kind: ManifoldKind, rng: &mut ChaCha8Rng) -> Result<ManifoldPoint> {
    let q = kind.q();
    let data = match kind {
        ManifoldKind::UnitSphere(_) => sample_sphere(rng, q),
        ManifoldKind::SpecialOrthogonal(_) => sample_so(rng, q),
        ManifoldKind::SymmetricPositiveDefinite(_) => sample_spd(rng, q)?,
        ManifoldKind::SpecialUnitary(_) => sample_su(rng, q),
    };
    ManifoldPoint::new(kind, data)
}

fn sample_unit_skew(rng: &mut ChaCha8Rng, q: usize) -> Mat {
    loop {
        let mut m = Mat::zeros(q, q);
        for i in 0..q {
            for j in 0..i {
                let x: f64 = rng.sample(StandardNormal);
                m[(i, j)] = x;
                m[(j, i)] = -x;
            }
        }
        let n = m.frobenius();
        if n > 1e-6 {
            return m.scale(1.0 / n);
        }
    }
}

/// Synthesizes a convergent adaptation trajectory on SO(q): a geodesic random
/// walk whose step lengths shrink geometrically,
/// `x_{k+1} = x_k * exp(step_scale * decay^k * Omega_k)` with unit-norm
/// random skew directions `Omega_k`. Returns `n_steps` points starting from a
/// random seed point.
pub fn geodesic_walk(
    kind: ManifoldKind,
    n_steps: usize,
    step_scale: f64,
    decay: f64,
    seed: u64,
) -> Result<Vec<ManifoldPoint>> {
    if !matches!(kind, ManifoldKind::SpecialOrthogonal(_)) {
        return Err(Error::KindMismatch(format!(
            "geodesic walks are generated on the special orthogonal group, got {}",
            kind.name()
        )));
    }
    kind.check()?;
    if n_steps < 2 {
        return Err(Error::ValidationFailed(format!(
            "a walk needs at least 2 steps, got {n_steps}"
        )));
    }
    if !(decay > 0.0 && decay <= 1.0) {
        return Err(Error::ValidationFailed(format!(
            "decay must lie in (0, 1], got {decay}"
        )));
    }
    if !(step_scale >= 0.0 && step_scale.is_finite()) {
        return Err(Error::ValidationFailed(format!(
            "step_scale must be a nonnegative finite number, got {step_scale}"
        )));
    }
    let q = kind.q();
    let mut rng: ChaCha8Rng = rand::SeedableRng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(n_steps);
    points.push(sample_point(kind, &mut rng)?);
    let mut scale = step_scale;
    for _ in 1..n_steps {
        let omega = sample_unit_skew(&mut rng, q).scale(scale);
        let next = so_exp(points.last().expect("walk is non-empty"), &omega)?;
        points.push(next);
        scale *= decay;
    }
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn rot2(theta: f64) -> Mat {
        Mat::from_rows(&[
            vec![theta.cos(), -theta.sin()],
            vec![theta.sin(), theta.cos()],
        ])
    }

    fn so_point(m: Mat) -> ManifoldPoint {
        ManifoldPoint::new(ManifoldKind::SpecialOrthogonal(m.rows()), PointData::Real(m)).unwrap()
    }

    #[test]
    fn intrinsic_dimensions() {
        assert_eq!(ManifoldKind::SpecialOrthogonal(9).intrinsic_dim(), 36);
        assert_eq!(ManifoldKind::UnitSphere(3).intrinsic_dim(), 2);
        assert_eq!(ManifoldKind::SymmetricPositiveDefinite(3).intrinsic_dim(), 6);
        assert_eq!(ManifoldKind::SpecialUnitary(2).intrinsic_dim(), 3);
    }

    #[test]
    fn validate_identity_so3() {
        let p = ManifoldPoint::new(
            ManifoldKind::SpecialOrthogonal(3),
            PointData::Real(Mat::identity(3)),
        );
        assert!(p.is_ok());
        assert!(validate(&p.unwrap(), TAU_ORTH).unwrap());
    }

    #[test]
    fn validate_rejects_reflection() {
        // diag(1, -1) is orthogonal but has determinant -1
        let m = Mat::from_rows(&[vec![1.0, 0.0], vec![0.0, -1.0]]);
        let p = ManifoldPoint::new_unchecked(ManifoldKind::SpecialOrthogonal(2), PointData::Real(m));
        assert!(!validate(&p, TAU_ORTH).unwrap());
    }

    #[test]
    fn validate_unit_vector() {
        let p = ManifoldPoint::new(
            ManifoldKind::UnitSphere(2),
            PointData::Vector(vec![0.6, 0.8]),
        );
        assert!(p.is_ok());
    }

    #[test]
    fn validate_shape_mismatch_is_structural() {
        let r = ManifoldPoint::new(
            ManifoldKind::UnitSphere(3),
            PointData::Vector(vec![1.0, 0.0]),
        );
        assert!(matches!(r, Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn inner_product_so2_rotation_generator() {
        let x = so_point(rot2(0.3));
        let j = Mat::from_rows(&[vec![0.0, -1.0], vec![1.0, 0.0]]);
        let v = x.as_real().unwrap().matmul(&j);
        let tv = TangentVector::new(x.clone(), PointData::Real(v)).unwrap();
        let ip = inner_product(&tv, &tv).unwrap();
        assert!((ip - 2.0).abs() < 1e-12);
    }

    #[test]
    fn inner_product_zero_vector() {
        let x = so_point(Mat::identity(2));
        let z = TangentVector::new(x.clone(), PointData::Real(Mat::zeros(2, 2))).unwrap();
        let j = Mat::from_rows(&[vec![0.0, -1.0], vec![1.0, 0.0]]);
        let v = TangentVector::new(x, PointData::Real(j)).unwrap();
        assert_eq!(inner_product(&z, &v).unwrap(), 0.0);
    }

    #[test]
    fn inner_product_spd_scaled_identity() {
        // x = 2I, v = w = I: tr(x^{-1} v x^{-1} w) = tr(I/4) = 0.5
        let x = ManifoldPoint::new(
            ManifoldKind::SymmetricPositiveDefinite(2),
            PointData::Real(Mat::identity(2).scale(2.0)),
        )
        .unwrap();
        let v = TangentVector::new(x.clone(), PointData::Real(Mat::identity(2))).unwrap();
        assert!((inner_product(&v, &v).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn inner_product_base_mismatch() {
        let x = so_point(Mat::identity(2));
        let y = so_point(rot2(0.5));
        let j = Mat::from_rows(&[vec![0.0, -1.0], vec![1.0, 0.0]]);
        let v = TangentVector::new(x, PointData::Real(j.clone())).unwrap();
        let w = TangentVector::new(y.clone(), PointData::Real(y.as_real().unwrap().matmul(&j))).unwrap();
        assert!(matches!(
            inner_product(&v, &w),
            Err(Error::BasePointMismatch)
        ));
    }

    #[test]
    fn sphere_distance_examples() {
        let e1 = [1.0, 0.0, 0.0];
        let e2 = [0.0, 1.0, 0.0];
        assert_eq!(sphere_distance(&e1, &e1).unwrap(), 0.0);
        assert!((sphere_distance(&e1, &e2).unwrap() - PI / 2.0).abs() < 1e-15);
        let neg = [-1.0, 0.0, 0.0];
        assert!((sphere_distance(&e1, &neg).unwrap() - PI).abs() < 1e-15);
        assert!(matches!(
            sphere_distance(&[0.5, 0.0, 0.0], &e1),
            Err(Error::ValidationFailed(_))
        ));
    }

    #[test]
    fn so_distance_planar_quarter_turn() {
        // log of a planar rotation by theta has tr(log^2) = -2 theta^2,
        // so the distance is sqrt(2) * theta
        let x = so_point(Mat::identity(2));
        let y = so_point(rot2(PI / 2.0));
        let d = so_distance(&x, &y).unwrap();
        assert!((d - 2.221441469079183).abs() < 1e-12, "d = {d}");
    }

    #[test]
    fn so_distance_block_additivity() {
        let (t1, t2) = (0.4f64, 1.2f64);
        let mut m = Mat::zeros(4, 4);
        for (b, t) in [(0usize, t1), (1usize, t2)] {
            m[(2 * b, 2 * b)] = t.cos();
            m[(2 * b, 2 * b + 1)] = -t.sin();
            m[(2 * b + 1, 2 * b)] = t.sin();
            m[(2 * b + 1, 2 * b + 1)] = t.cos();
        }
        let x = so_point(Mat::identity(4));
        let y = so_point(m);
        let expect = (2.0 * (t1 * t1 + t2 * t2)).sqrt();
        assert!((so_distance(&x, &y).unwrap() - expect).abs() < 1e-12);
    }

    #[test]
    fn so_distance_cut_locus() {
        let x = so_point(Mat::identity(2));
        let y = so_point(rot2(PI - 1e-9));
        assert!(matches!(so_distance(&x, &y), Err(Error::CutLocus { .. })));
        // just outside the guard band it still works
        let y2 = so_point(rot2(PI - 1e-3));
        let d = so_distance(&x, &y2).unwrap();
        assert!((d - 2f64.sqrt() * (PI - 1e-3)).abs() < 1e-9);
    }

    #[test]
    fn spd_distance_examples() {
        let kind = ManifoldKind::SymmetricPositiveDefinite(2);
        let x = ManifoldPoint::new(kind, PointData::Real(Mat::identity(2))).unwrap();
        assert_eq!(spd_distance(&x, &x).unwrap(), 0.0);
        let y = ManifoldPoint::new(
            kind,
            PointData::Real(Mat::from_rows(&[vec![2f64.exp(), 0.0], vec![0.0, 1.0]])),
        )
        .unwrap();
        assert!((spd_distance(&x, &y).unwrap() - 2.0).abs() < 1e-10);
        // scalar case: d(I, aI) = sqrt(q) |log a|
        let a = 3.7;
        let z = ManifoldPoint::new(kind, PointData::Real(Mat::identity(2).scale(a))).unwrap();
        assert!((spd_distance(&x, &z).unwrap() - 2f64.sqrt() * a.ln()).abs() < 1e-10);
    }

    #[test]
    fn su_distance_diagonal_phases() {
        let kind = ManifoldKind::SpecialUnitary(2);
        let x = ManifoldPoint::new(kind, PointData::Complex(CMat::identity(2))).unwrap();
        let diag = |t: f64| {
            CMat::from_fn(2, 2, |i, j| {
                if i == j {
                    Complex64::from_polar(1.0, if i == 0 { t } else { -t })
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
        };
        let t = 0.9;
        let y = ManifoldPoint::new(kind, PointData::Complex(diag(t))).unwrap();
        assert!((su_distance(&x, &y).unwrap() - 2f64.sqrt() * t).abs() < 1e-12);
        assert_eq!(su_distance(&x, &x).unwrap(), 0.0);
        // near the boundary but outside the guard band: finite, close to pi*sqrt(2)
        let tb = PI - 1e-3;
        let yb = ManifoldPoint::new(kind, PointData::Complex(diag(tb))).unwrap();
        let d = su_distance(&x, &yb).unwrap();
        assert!((d - 2f64.sqrt() * tb).abs() < 1e-9);
        // inside the guard band: cut locus
        let yc = ManifoldPoint::new(kind, PointData::Complex(diag(PI - 1e-9))).unwrap();
        assert!(matches!(su_distance(&x, &yc), Err(Error::CutLocus { .. })));
    }

    #[test]
    fn distance_dispatch_and_kind_mismatch() {
        let s = ManifoldPoint::new(
            ManifoldKind::UnitSphere(3),
            PointData::Vector(vec![1.0, 0.0, 0.0]),
        )
        .unwrap();
        let r = so_point(Mat::identity(3));
        assert!(matches!(distance(&s, &r), Err(Error::KindMismatch(_))));
        let s2 = ManifoldPoint::new(
            ManifoldKind::UnitSphere(3),
            PointData::Vector(vec![0.0, 1.0, 0.0]),
        )
        .unwrap();
        assert_eq!(
            distance(&s, &s2).unwrap(),
            sphere_distance(&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]).unwrap()
        );
        let r2 = so_point(rot2(0.8).matmul(&Mat::identity(2))); // 2x2, different q
        assert!(matches!(distance(&r, &r2), Err(Error::KindMismatch(_))));
    }

    #[test]
    fn pairwise_identical_points_zero_matrix() {
        let p = so_point(Mat::identity(3));
        let d = pairwise_distances(&[p.clone(), p.clone(), p]).unwrap();
        assert_eq!(d.max_off_diagonal(), 0.0);
    }

    #[test]
    fn pairwise_orthonormal_sphere_points() {
        let kind = ManifoldKind::UnitSphere(3);
        let pts: Vec<ManifoldPoint> = (0..3)
            .map(|k| {
                let mut v = vec![0.0; 3];
                v[k] = 1.0;
                ManifoldPoint::new(kind, PointData::Vector(v)).unwrap()
            })
            .collect();
        let d = pairwise_distances(&pts).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    assert!((d.get(i, j) - PI / 2.0).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn pairwise_matches_scalar_calls() {
        let pts: Vec<ManifoldPoint> = (0..5)
            .map(|s| random_point(ManifoldKind::SpecialOrthogonal(3), s).unwrap())
            .collect();
        let d = pairwise_distances(&pts).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                if i == j {
                    assert_eq!(d.get(i, j), 0.0);
                } else {
                    let expect = distance(&pts[i], &pts[j]).unwrap();
                    assert_eq!(d.get(i, j), expect, "pair ({i}, {j})");
                }
            }
        }
    }

    #[test]
    fn so_exp_zero_is_base() {
        let base = so_point(rot2(0.4));
        let out = so_exp(&base, &Mat::zeros(2, 2)).unwrap();
        assert!(out.as_real().unwrap().sub(base.as_real().unwrap()).max_abs() < 1e-15);
    }

    #[test]
    fn so_exp_planar_rotation() {
        let theta = 0.73;
        let omega = Mat::from_rows(&[vec![0.0, -theta], vec![theta, 0.0]]);
        let base = so_point(Mat::identity(2));
        let out = so_exp(&base, &omega).unwrap();
        assert!(out.as_real().unwrap().sub(&rot2(theta)).max_abs() < 1e-13);
    }

    #[test]
    fn so_exp_matches_series_oracle() {
        // independent oracle: scaled-and-squared truncated exponential series
        fn exp_series(m: &Mat) -> Mat {
            let mut k = 0u32;
            let mut norm = m.frobenius();
            while norm > 0.25 {
                norm *= 0.5;
                k += 1;
            }
            let scaled = m.scale(0.5f64.powi(k as i32));
            let n = m.rows();
            let mut sum = Mat::identity(n);
            let mut term = Mat::identity(n);
            for j in 1..30 {
                term = term.matmul(&scaled).scale(1.0 / j as f64);
                sum = sum.add(&term);
            }
            let mut out = sum;
            for _ in 0..k {
                out = out.matmul(&out);
            }
            out
        }
        let base = so_point(Mat::identity(4));
        let mut rng: ChaCha8Rng = rand::SeedableRng::seed_from_u64(7);
        let omega = sample_unit_skew(&mut rng, 4).scale(1.3);
        let out = so_exp(&base, &omega).unwrap();
        let oracle = exp_series(&omega);
        assert!(
            out.as_real().unwrap().sub(&oracle).max_abs() < 1e-12,
            "exp mismatch {}",
            out.as_real().unwrap().sub(&oracle).max_abs()
        );
    }

    #[test]
    fn so_exp_rejects_non_skew() {
        let base = so_point(Mat::identity(2));
        let bad = Mat::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        assert!(matches!(
            so_exp(&base, &bad),
            Err(Error::ValidationFailed(_))
        ));
    }

    #[test]
    fn so_log_exp_round_trip() {
        for seed in 0..5 {
            let x = random_point(ManifoldKind::SpecialOrthogonal(4), seed).unwrap();
            let y = random_point(ManifoldKind::SpecialOrthogonal(4), seed + 100).unwrap();
            let omega = so_log(&x, &y).unwrap();
            let back = so_exp(&x, &omega).unwrap();
            let err = back.as_real().unwrap().sub(y.as_real().unwrap()).max_abs();
            assert!(err < 1e-11, "round trip error {err} at seed {seed}");
        }
    }

    #[test]
    fn random_points_validate_and_are_deterministic() {
        let kinds = [
            ManifoldKind::SpecialOrthogonal(3),
            ManifoldKind::UnitSphere(4),
            ManifoldKind::SymmetricPositiveDefinite(3),
            ManifoldKind::SpecialUnitary(3),
        ];
        for kind in kinds {
            let a = random_point(kind, 11).unwrap();
            let b = random_point(kind, 11).unwrap();
            assert_eq!(a, b, "same seed must reproduce the point on {kind:?}");
            assert!(validate(&a, TAU_ORTH).unwrap());
            let c = random_point(kind, 12).unwrap();
            assert!(distance(&a, &c).unwrap() > 1e-3);
        }
    }

    #[test]
    fn geodesic_walk_zero_step_is_constant() {
        let pts = geodesic_walk(ManifoldKind::SpecialOrthogonal(3), 4, 0.0, 0.9, 3).unwrap();
        for p in &pts[1..] {
            assert_eq!(p, &pts[0]);
        }
    }

    #[test]
    fn geodesic_walk_unit_decay_equal_steps() {
        let pts = geodesic_walk(ManifoldKind::SpecialOrthogonal(4), 3, 0.3, 1.0, 5).unwrap();
        let d01 = distance(&pts[0], &pts[1]).unwrap();
        let d12 = distance(&pts[1], &pts[2]).unwrap();
        assert!((d01 - d12).abs() < 0.1 * d01.max(d12));
        // with unit-norm skew steps, each geodesic step has length step_scale
        assert!((d01 - 0.3).abs() < 1e-10);
    }

    #[test]
    fn geodesic_walk_outputs_validate() {
        let pts = geodesic_walk(ManifoldKind::SpecialOrthogonal(3), 6, 0.5, 0.8, 9).unwrap();
        assert_eq!(pts.len(), 6);
        for p in &pts {
            assert!(validate(p, TAU_ORTH).unwrap());
        }
    }
}
