//! Minkowski algebra on polytopes.
//!
//! Any operation with an empty operand returns the empty set, except that
//! eroding by the empty set is rejected. Sums and images work on vertex
//! lists; erosion, preimage and intersection work on half-spaces.

use nalgebra::DMatrix;

use crate::error::{check_dim, Error, Result};
use crate::geometry::{Halfspace, Polytope, Vector};
use crate::tolerance::Tolerances;

pub type Matrix = DMatrix<f64>;

/// `P ⊕ Q`, the hull of all pairwise vertex sums.
pub fn minkowski_sum(p: &Polytope, q: &Polytope, tol: &Tolerances) -> Result<Polytope> {
    check_dim("minkowski_sum", p.dim(), q.dim())?;
    let pv = p.vertices(tol)?;
    let qv = q.vertices(tol)?;
    if pv.is_empty() || qv.is_empty() {
        return Ok(Polytope::empty(p.dim()));
    }
    let sums: Vec<Vector> = pv
        .iter()
        .flat_map(|a| qv.iter().map(move |b| a + b))
        .collect();
    Polytope::from_vertices(p.dim(), &sums, tol)
}

/// Minkowski sum of a list of sets of the same dimension; `{0}` for an empty list.
pub fn minkowski_sum_all<'a>(
    dim: usize,
    sets: impl IntoIterator<Item = &'a Polytope>,
    tol: &Tolerances,
) -> Result<Polytope> {
    let mut acc = Polytope::origin(dim);
    for s in sets {
        acc = minkowski_sum(&acc, s, tol)?;
    }
    Ok(acc)
}

/// `P ⊖ Q = {x : x + Q ⊆ P}`: each offset shrinks by the support of `Q`
/// along its normal.
pub fn pontryagin_diff(p: &Polytope, q: &Polytope, tol: &Tolerances) -> Result<Polytope> {
    check_dim("pontryagin_diff", p.dim(), q.dim())?;
    if q.is_empty(tol)? {
        return Err(Error::Domain("Pontryagin difference by the empty set".into()));
    }
    if p.known_empty() {
        return Ok(Polytope::empty(p.dim()));
    }
    let mut rows = Vec::with_capacity(p.halfspaces().len());
    for h in p.halfspaces() {
        let s = q.support(&h.normal, tol)?;
        if !s.is_finite() {
            return Ok(Polytope::empty(p.dim()));
        }
        rows.push((h.normal.clone(), h.offset - s));
    }
    Polytope::from_halfspaces(p.dim(), rows)?.remove_redundancy(tol)
}

/// `M P = {M x : x ∈ P}` for an `m × n` matrix; rank-deficient maps give
/// lower-dimensional results.
pub fn linear_image(m: &Matrix, p: &Polytope, tol: &Tolerances) -> Result<Polytope> {
    check_dim("linear_image", m.ncols(), p.dim())?;
    let vs = p.vertices(tol)?;
    let mapped: Vec<Vector> = vs.iter().map(|v| m * v).collect();
    Polytope::from_vertices(m.nrows(), &mapped, tol)
}

/// `{x : M x ∈ P}`. The result can be unbounded (check
/// [`Polytope::is_bounded`]); it is returned without redundancy removal.
pub fn preimage(m: &Matrix, p: &Polytope) -> Result<Polytope> {
    check_dim("preimage", m.nrows(), p.dim())?;
    if p.known_empty() {
        return Ok(Polytope::empty(m.ncols()));
    }
    let mt = m.transpose();
    Polytope::from_halfspaces(
        m.ncols(),
        p.halfspaces().iter().map(|h| (&mt * &h.normal, h.offset)),
    )
}

pub fn intersect(p: &Polytope, q: &Polytope, tol: &Tolerances) -> Result<Polytope> {
    check_dim("intersect", p.dim(), q.dim())?;
    if p.known_empty() || q.known_empty() {
        return Ok(Polytope::empty(p.dim()));
    }
    let rows = p
        .halfspaces()
        .iter()
        .chain(q.halfspaces())
        .map(|h| (h.normal.clone(), h.offset));
    Polytope::from_halfspaces(p.dim(), rows)?.remove_redundancy(tol)
}

/// Intersection of many sets without intermediate redundancy removal.
pub fn intersect_all<'a>(
    dim: usize,
    sets: impl IntoIterator<Item = &'a Polytope>,
    tol: &Tolerances,
) -> Result<Polytope> {
    let mut rows = Vec::new();
    for s in sets {
        check_dim("intersect", dim, s.dim())?;
        if s.known_empty() {
            return Ok(Polytope::empty(dim));
        }
        rows.extend(s.halfspaces().iter().map(|h| (h.normal.clone(), h.offset)));
    }
    Polytope::from_halfspaces(dim, rows)?.remove_redundancy(tol)
}

/// `λ P` for `λ >= 0`; `0 · P = {0}` when `P` is non-empty.
pub fn scale(lambda: f64, p: &Polytope) -> Result<Polytope> {
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::Domain(format!("scale factor {lambda} must be >= 0")));
    }
    if p.known_empty() {
        return Ok(Polytope::empty(p.dim()));
    }
    if lambda == 0.0 {
        return Ok(Polytope::origin(p.dim()));
    }
    Ok(p.map_parts(
        |v| v * lambda,
        |h| Halfspace {
            normal: h.normal.clone(),
            offset: h.offset * lambda,
        },
    ))
}

/// `-P`.
pub fn negate(p: &Polytope) -> Polytope {
    p.map_parts(
        |v| -v,
        |h| Halfspace {
            normal: -&h.normal,
            offset: h.offset,
        },
    )
}
