//! Spectral data of the open-loop matrix: spectral radius, the dominant
//! eigendirections, and the smallest ratio of state-set support to
//! input-image support along those directions.

use nalgebra::{Complex, DMatrix, Schur};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{Polytope, Vector};
use crate::setops::Matrix;
use crate::tolerance::Tolerances;

pub type Complex64 = Complex<f64>;

/// Largest matrix handled by [`eigen`].
pub const MAX_EIGEN_DIM: usize = 10;

/// Eigenvalues closer than this (relative) are reported as one eigenvalue
/// with multiplicity; a defective double root splits by about `sqrt(eps)`.
const CLUSTER: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Eigenvalue {
    pub value: Complex64,
    pub multiplicity: usize,
}

/// Eigenvalues sorted by decreasing modulus (then real part, then imaginary
/// part). Up to 2×2 they come from the characteristic polynomial; larger
/// matrices go through a real Schur decomposition and every eigenvalue is
/// checked for a small residual `σ_min(A - λI)`.
pub fn eigen(a: &Matrix, tol: &Tolerances) -> Result<Vec<Eigenvalue>> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::DimensionMismatch {
            context: "eigen (square matrix)",
            expected: n,
            found: a.ncols(),
        });
    }
    if n == 0 || n > MAX_EIGEN_DIM {
        return Err(Error::Unsupported(format!(
            "eigenvalues of a {n}x{n} matrix (supported: 1..={MAX_EIGEN_DIM})"
        )));
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("non-finite matrix entry".into()));
    }
    let raw: Vec<Complex64> = match n {
        1 => vec![Complex64::new(a[(0, 0)], 0.0)],
        2 => quadratic_roots(a[(0, 0)] + a[(1, 1)], a.determinant()),
        _ => {
            let schur = Schur::try_new(a.clone(), 1e-14, 10_000).ok_or_else(|| {
                Error::Numerical("shifted QR iteration did not converge".into())
            })?;
            let vals: Vec<Complex64> = schur.complex_eigenvalues().iter().copied().collect();
            let scale = 1.0 + a.norm();
            let bound = tol.eig.sqrt() * scale;
            for &lam in &vals {
                let shifted: DMatrix<Complex64> = DMatrix::from_fn(n, n, |r, c| {
                    Complex64::new(a[(r, c)], 0.0) - if r == c { lam } else { Complex64::new(0.0, 0.0) }
                });
                let smin = shifted
                    .singular_values()
                    .iter()
                    .copied()
                    .fold(f64::INFINITY, f64::min);
                if smin > bound {
                    return Err(Error::Numerical(format!(
                        "eigenvalue {lam} has residual {smin:e} (bound {bound:e})"
                    )));
                }
            }
            vals
        }
    };
    Ok(cluster(raw))
}

/// Roots of `λ² - trace·λ + det`.
fn quadratic_roots(trace: f64, det: f64) -> Vec<Complex64> {
    let half = trace / 2.0;
    let disc = half * half - det;
    if disc > 0.0 {
        let s = disc.sqrt();
        let big = if half >= 0.0 { half + s } else { half - s };
        let small = if big != 0.0 { det / big } else { half - s };
        vec![Complex64::new(big, 0.0), Complex64::new(small, 0.0)]
    } else if disc == 0.0 {
        vec![Complex64::new(half, 0.0); 2]
    } else {
        let s = (-disc).sqrt();
        vec![Complex64::new(half, s), Complex64::new(half, -s)]
    }
}

fn cluster(raw: Vec<Complex64>) -> Vec<Eigenvalue> {
    let mut groups: Vec<(Complex64, usize)> = Vec::new();
    for z in raw {
        match groups
            .iter_mut()
            .find(|(c, _)| (*c - z).norm() <= CLUSTER * (1.0 + z.norm()))
        {
            Some((c, k)) => {
                *c = (*c * *k as f64 + z) / (*k as f64 + 1.0);
                *k += 1;
            }
            None => groups.push((z, 1)),
        }
    }
    let mut out: Vec<Eigenvalue> = groups
        .into_iter()
        .map(|(mut value, multiplicity)| {
            if value.im.abs() <= CLUSTER * (1.0 + value.norm()) {
                value.im = 0.0;
            }
            Eigenvalue { value, multiplicity }
        })
        .collect();
    out.sort_by(|x, y| {
        y.value
            .norm()
            .total_cmp(&x.value.norm())
            .then(y.value.re.total_cmp(&x.value.re))
            .then(y.value.im.total_cmp(&x.value.im))
    });
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectralInfo {
    pub rho: f64,
    #[serde(serialize_with = "ser_complex")]
    pub dominant_eigenvalue: Complex64,
    /// The modulus-maximal eigenvalue is unique, real and positive.
    pub dominant_real_positive: bool,
    /// Orthonormal basis of the dominant eigenspace and the negations,
    /// `[v1, .., vr, -v1, .., -vr]`; empty when the dominant eigenvalue is
    /// not real.
    #[serde(serialize_with = "ser_vectors")]
    pub directions: Vec<Vector>,
    /// `min h_X(v) / h_BU(v)` over the directions where `h_BU(v) > tol.sup`.
    pub h_ratio: Option<f64>,
    #[serde(serialize_with = "ser_opt_vector")]
    pub vbar: Option<Vector>,
    /// Some direction has non-zero input-image support.
    pub support_ok: bool,
    /// Dominant eigenvector of `Aᵀ` (left eigenvector of `A`), for which
    /// `(Aᵀ)^k w = ρ^k w`.
    #[serde(serialize_with = "ser_opt_vector")]
    pub left_direction: Option<Vector>,
}

impl SpectralInfo {
    /// Both verdicts needed by the closed-form bounds hold.
    pub fn assumptions_hold(&self) -> bool {
        self.dominant_real_positive && self.support_ok && self.h_ratio.is_some()
    }
}

/// Spectral summary of `A` against the state set `X` and the input image `BU`.
pub fn analyze(a: &Matrix, x: &Polytope, bu: &Polytope, tol: &Tolerances) -> Result<SpectralInfo> {
    let eigs = eigen(a, tol)?;
    let n = a.nrows();
    crate::error::check_dim("analyze state set", n, x.dim())?;
    crate::error::check_dim("analyze input image", n, bu.dim())?;
    let top = eigs[0];
    let rho = top.value.norm();
    let tied = eigs
        .iter()
        .filter(|e| e.value.norm() >= rho - tol.tie)
        .count();
    let is_real = top.value.im == 0.0;
    let dominant_real_positive = tied == 1 && is_real && top.value.re > tol.tie;

    let mut directions = Vec::new();
    let mut left_direction = None;
    if is_real {
        let lam = top.value.re;
        let basis = eigenspace(a, lam, tol);
        directions.extend(basis.iter().cloned());
        directions.extend(basis.iter().map(|v| -v));
        left_direction = eigenspace(&a.transpose(), lam, tol).into_iter().next();
    }

    let mut h_ratio: Option<f64> = None;
    let mut vbar = None;
    let mut support_ok = false;
    for d in &directions {
        let hb = bu.support(d, tol)?;
        if hb > tol.sup {
            support_ok = true;
            let r = x.support(d, tol)? / hb;
            if h_ratio.map_or(true, |best| r < best) {
                h_ratio = Some(r);
                vbar = Some(d.clone());
            }
        }
    }

    Ok(SpectralInfo {
        rho,
        dominant_eigenvalue: top.value,
        dominant_real_positive,
        directions,
        h_ratio,
        vbar,
        support_ok,
        left_direction,
    })
}

/// Orthonormal basis of `ker(A - λI)`, each vector signed so its largest
/// entry is positive.
fn eigenspace(a: &Matrix, lam: f64, tol: &Tolerances) -> Vec<Vector> {
    let n = a.nrows();
    let shifted = a - Matrix::identity(n, n) * lam;
    let svd = shifted.svd(false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let bound = tol.eig.sqrt() * (1.0 + a.norm());
    let mut idx: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] <= bound)
        .collect();
    if idx.is_empty() {
        let imin = (0..svd.singular_values.len())
            .min_by(|&i, &j| svd.singular_values[i].total_cmp(&svd.singular_values[j]))
            .unwrap_or(0);
        idx.push(imin);
    }
    idx.sort_by(|&i, &j| svd.singular_values[i].total_cmp(&svd.singular_values[j]));
    idx.into_iter()
        .map(|i| {
            let mut v: Vector = v_t.row(i).transpose().into_owned();
            v /= v.norm();
            let k = v.iamax();
            if v[k] < 0.0 {
                v = -v;
            }
            v
        })
        .collect()
}

fn ser_complex<S: serde::Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeStruct;
    let mut st = s.serialize_struct("Complex", 2)?;
    st.serialize_field("re", &z.re)?;
    st.serialize_field("im", &z.im)?;
    st.end()
}

fn ser_vectors<S: serde::Serializer>(vs: &[Vector], s: S) -> std::result::Result<S::Ok, S::Error> {
    let rows: Vec<&[f64]> = vs.iter().map(|v| v.as_slice()).collect();
    rows.serialize(s)
}

fn ser_opt_vector<S: serde::Serializer>(
    v: &Option<Vector>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    v.as_ref().map(|v| v.as_slice()).serialize(s)
}
