use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::lp::{solve_dense, LpOutcome};
use crate::error::{check_dim, Error, Result};
use crate::tolerance::Tolerances;

pub type Vector = DVector<f64>;

/// Normals shorter than this are treated as the zero vector.
const ZERO_NORMAL: f64 = 1e-12;

/// Closed half-space `normal · x <= offset`, stored with a unit normal.
#[derive(Clone, Debug, PartialEq)]
pub struct Halfspace {
    pub normal: Vector,
    pub offset: f64,
}

impl Halfspace {
    /// Returns `None` when `normal` is (numerically) zero.
    pub fn normalized(normal: Vector, offset: f64) -> Option<Self> {
        let len = normal.norm();
        (len > ZERO_NORMAL).then(|| Self {
            normal: normal / len,
            offset: offset / len,
        })
    }

    pub fn slack(&self, x: &Vector) -> f64 {
        self.offset - self.normal.dot(x)
    }
}

/// Convex polyhedron `{x : n_i · x <= b_i}`, optionally carrying its vertex
/// list. Bounded sets built from vertices always carry the cache, and their
/// half-space list is irredundant.
///
/// A set with no half-spaces is the whole space. Emptiness is tracked by an
/// explicit flag once detected; a raw half-space list may still be infeasible
/// until [`Polytope::is_empty`] or a set operation has looked at it.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(into = "PolytopeJson", try_from = "PolytopeJson")]
pub struct Polytope {
    dim: usize,
    halfspaces: Vec<Halfspace>,
    vertices: Option<Vec<Vector>>,
    empty: bool,
}

impl Polytope {
    pub fn empty(dim: usize) -> Self {
        Self {
            dim,
            halfspaces: Vec::new(),
            vertices: Some(Vec::new()),
            empty: true,
        }
    }

    /// All of `R^dim`.
    pub fn whole(dim: usize) -> Self {
        Self {
            dim,
            halfspaces: Vec::new(),
            vertices: None,
            empty: false,
        }
    }

    /// Builds `{x : normal_i · x <= offset_i}`. Rows are normalized; zero
    /// rows are dropped when satisfied by every point and make the set empty
    /// otherwise.
    pub fn from_halfspaces(
        dim: usize,
        rows: impl IntoIterator<Item = (Vector, f64)>,
    ) -> Result<Self> {
        let mut halfspaces = Vec::new();
        let mut empty = false;
        for (normal, offset) in rows {
            check_dim("half-space normal", dim, normal.len())?;
            if !offset.is_finite() || normal.iter().any(|v| !v.is_finite()) {
                return Err(Error::Numerical("non-finite half-space".into()));
            }
            match Halfspace::normalized(normal, offset) {
                Some(h) => halfspaces.push(h),
                None if offset < -ZERO_NORMAL => empty = true,
                None => {}
            }
        }
        if empty {
            return Ok(Self::empty(dim));
        }
        Ok(Self {
            dim,
            halfspaces,
            vertices: None,
            empty: false,
        })
    }

    /// Convenience constructor from plain rows.
    pub fn from_hrep(normals: &[Vec<f64>], offsets: &[f64]) -> Result<Self> {
        check_dim("offsets", normals.len(), offsets.len())?;
        let dim = normals.first().map_or(0, Vec::len);
        if dim == 0 {
            return Err(Error::Domain(
                "cannot infer dimension from an empty half-space list".into(),
            ));
        }
        Self::from_halfspaces(
            dim,
            normals
                .iter()
                .zip(offsets)
                .map(|(n, &b)| (Vector::from_column_slice(n), b)),
        )
    }

    /// The box `[-r, r]^dim`.
    pub fn unit_box(dim: usize, r: f64) -> Self {
        let mut halfspaces = Vec::with_capacity(2 * dim);
        for j in 0..dim {
            for s in [1.0, -1.0] {
                let mut n = Vector::zeros(dim);
                n[j] = s;
                halfspaces.push(Halfspace { normal: n, offset: r });
            }
        }
        let vertices = (dim <= super::MAX_VERTEX_DIM).then(|| {
            let mut vs: Vec<Vector> = (0..1usize << dim)
                .map(|mask| {
                    Vector::from_iterator(
                        dim,
                        (0..dim).map(|j| if mask >> j & 1 == 1 { r } else { -r }),
                    )
                })
                .collect();
            if r == 0.0 {
                vs.truncate(1);
            }
            super::order_vertices(&mut vs);
            vs
        });
        Self {
            dim,
            halfspaces,
            vertices,
            empty: false,
        }
    }

    /// The singleton `{p}`.
    pub fn point(p: &Vector) -> Self {
        let dim = p.len();
        let mut halfspaces = Vec::with_capacity(2 * dim);
        for j in 0..dim {
            let mut n = Vector::zeros(dim);
            n[j] = 1.0;
            halfspaces.push(Halfspace {
                normal: n.clone(),
                offset: p[j],
            });
            halfspaces.push(Halfspace {
                normal: -n,
                offset: -p[j],
            });
        }
        Self {
            dim,
            halfspaces,
            vertices: Some(vec![p.clone()]),
            empty: false,
        }
    }

    pub fn origin(dim: usize) -> Self {
        Self::point(&Vector::zeros(dim))
    }

    pub(crate) fn with_cache(dim: usize, halfspaces: Vec<Halfspace>, vertices: Vec<Vector>) -> Self {
        if vertices.is_empty() {
            return Self::empty(dim);
        }
        Self {
            dim,
            halfspaces,
            vertices: Some(vertices),
            empty: false,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn halfspaces(&self) -> &[Halfspace] {
        &self.halfspaces
    }

    pub fn cached_vertices(&self) -> Option<&[Vector]> {
        self.vertices.as_deref()
    }

    /// True when emptiness has already been established; cheap.
    pub fn known_empty(&self) -> bool {
        self.empty
    }

    pub fn contains_point(&self, x: &Vector, eps: f64) -> bool {
        !self.empty && self.halfspaces.iter().all(|h| h.slack(x) >= -eps)
    }

    /// Deepest point: maximizes `t` subject to `n_i·x + t <= b_i`, `t <= 1`.
    /// Negative depth means the constraints cannot be met simultaneously.
    pub(crate) fn depth(&self, tol: &Tolerances) -> Result<(f64, Vector)> {
        let n = self.dim;
        if self.halfspaces.is_empty() {
            return Ok((1.0, Vector::zeros(n)));
        }
        let rows = self.halfspaces.len() + 1;
        let mut a = Vec::with_capacity(rows * (n + 1));
        let mut b = Vec::with_capacity(rows);
        for h in &self.halfspaces {
            a.extend(h.normal.iter());
            a.push(1.0);
            b.push(h.offset);
        }
        a.extend(std::iter::repeat(0.0).take(n));
        a.push(1.0);
        b.push(1.0);
        let mut c = vec![0.0; n + 1];
        c[n] = 1.0;
        match solve_dense(&c, &a, &b, tol)? {
            LpOutcome::Optimal { value, point } => {
                Ok((value, Vector::from_column_slice(&point[..n])))
            }
            other => Err(Error::Numerical(format!(
                "depth LP is always feasible and bounded, got {other:?}"
            ))),
        }
    }

    /// True iff the half-space system is infeasible beyond `tol.feas`.
    pub fn is_empty(&self, tol: &Tolerances) -> Result<bool> {
        if self.empty {
            return Ok(true);
        }
        if self.vertices.as_ref().is_some_and(|v| !v.is_empty()) {
            return Ok(false);
        }
        Ok(self.depth(tol)?.0 < -tol.feas)
    }

    /// Non-empty with an interior point of depth above `tol.feas`.
    pub fn is_full_dimensional(&self, tol: &Tolerances) -> Result<bool> {
        if self.empty {
            return Ok(false);
        }
        Ok(self.depth(tol)?.0 > tol.feas)
    }

    /// Support function `max{v·z : z ∈ P}`; `f64::INFINITY` when unbounded in
    /// direction `v`.
    pub fn support(&self, v: &Vector, tol: &Tolerances) -> Result<f64> {
        check_dim("support direction", self.dim, v.len())?;
        if self.empty {
            return Err(Error::Domain("support of the empty set".into()));
        }
        if let Some(vs) = &self.vertices {
            return Ok(vs.iter().map(|p| p.dot(v)).fold(f64::NEG_INFINITY, f64::max));
        }
        self.support_lp(v, tol)
    }

    pub(crate) fn support_lp(&self, v: &Vector, tol: &Tolerances) -> Result<f64> {
        let (a, b) = self.dense_rows();
        match solve_dense(v.as_slice(), &a, &b, tol)? {
            LpOutcome::Optimal { value, .. } => Ok(value),
            LpOutcome::Unbounded => Ok(f64::INFINITY),
            LpOutcome::Infeasible => Err(Error::Domain("support of the empty set".into())),
        }
    }

    pub(crate) fn dense_rows(&self) -> (Vec<f64>, Vec<f64>) {
        let mut a = Vec::with_capacity(self.halfspaces.len() * self.dim);
        let mut b = Vec::with_capacity(self.halfspaces.len());
        for h in &self.halfspaces {
            a.extend(h.normal.iter());
            b.push(h.offset);
        }
        (a, b)
    }

    /// Axis-aligned bounds from `2·dim` support evaluations, or `None` when
    /// the set is unbounded. Caller guarantees non-emptiness.
    pub(crate) fn bounding_box(&self, tol: &Tolerances) -> Result<Option<(Vector, Vector)>> {
        let n = self.dim;
        let mut lo = Vector::zeros(n);
        let mut hi = Vector::zeros(n);
        for j in 0..n {
            let mut e = Vector::zeros(n);
            e[j] = 1.0;
            let up = self.support(&e, tol)?;
            let down = self.support(&-e, tol)?;
            if !up.is_finite() || !down.is_finite() {
                return Ok(None);
            }
            hi[j] = up;
            lo[j] = -down;
        }
        Ok(Some((lo, hi)))
    }

    pub fn is_bounded(&self, tol: &Tolerances) -> Result<bool> {
        if self.empty || self.vertices.is_some() || self.is_empty(tol)? {
            return Ok(true);
        }
        Ok(self.bounding_box(tol)?.is_some())
    }

    /// Bounded, non-empty and containing the origin.
    pub fn is_c_set(&self, tol: &Tolerances) -> Result<bool> {
        Ok(!self.is_empty(tol)?
            && self.contains_point(&Vector::zeros(self.dim), tol.feas)
            && self.is_bounded(tol)?)
    }

    /// A C-set with the origin in its interior.
    pub fn is_pc_set(&self, tol: &Tolerances) -> Result<bool> {
        Ok(self.is_c_set(tol)? && self.halfspaces.iter().all(|h| h.offset > tol.feas))
    }

    /// `other ⊆ self`: every half-space of `self` bounds `other` within
    /// `tol.incl`. The empty set is contained in everything.
    pub fn contains_set(&self, other: &Polytope, tol: &Tolerances) -> Result<bool> {
        check_dim("contains_set", self.dim, other.dim)?;
        if other.is_empty(tol)? {
            return Ok(true);
        }
        if self.is_empty(tol)? {
            return Ok(false);
        }
        for h in &self.halfspaces {
            if other.support(&h.normal, tol)? > h.offset + tol.incl {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn set_equal(&self, other: &Polytope, tol: &Tolerances) -> Result<bool> {
        Ok(self.contains_set(other, tol)? && other.contains_set(self, tol)?)
    }

    /// Irredundant description of the same set. Bounded sets are rebuilt from
    /// their vertices (and gain a vertex cache); unbounded ones drop each
    /// half-space that the others already imply.
    pub fn remove_redundancy(&self, tol: &Tolerances) -> Result<Polytope> {
        if self.empty {
            return Ok(Self::empty(self.dim));
        }
        if self.vertices.is_some() {
            return Ok(self.clone());
        }
        let (depth, _) = self.depth(tol)?;
        if depth < -tol.feas {
            return Ok(Self::empty(self.dim));
        }
        if self.dim <= super::MAX_VERTEX_DIM {
            if let Some(bbox) = self.bounding_box(tol)? {
                let vs = self.enumerate_vertices(bbox, tol)?;
                return Polytope::from_vertices(self.dim, &vs, tol);
            }
        }
        self.remove_redundancy_lp(tol)
    }

    fn remove_redundancy_lp(&self, tol: &Tolerances) -> Result<Polytope> {
        let mut kept: Vec<Halfspace> = Vec::new();
        for h in &self.halfspaces {
            let dup = kept.iter().any(|k| {
                (&k.normal - &h.normal).norm() <= tol.vert && k.offset <= h.offset + tol.vert
            });
            if !dup {
                kept.retain(|k| {
                    !((&k.normal - &h.normal).norm() <= tol.vert && h.offset <= k.offset)
                });
                kept.push(h.clone());
            }
        }
        let mut i = 0;
        while i < kept.len() {
            let probe = kept[i].clone();
            let mut rows: Vec<Halfspace> = kept
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, h)| h.clone())
                .collect();
            rows.push(Halfspace {
                normal: probe.normal.clone(),
                offset: probe.offset + 1.0,
            });
            let relaxed = Polytope {
                dim: self.dim,
                halfspaces: rows,
                vertices: None,
                empty: false,
            };
            if relaxed.support_lp(&probe.normal, tol)? <= probe.offset + tol.feas {
                kept.remove(i);
            } else {
                i += 1;
            }
        }
        Ok(Polytope {
            dim: self.dim,
            halfspaces: kept,
            vertices: None,
            empty: false,
        })
    }

    /// Applies `f` to every vertex and half-space; only valid for maps that
    /// preserve the H/V correspondence (positive scaling, reflection).
    pub(crate) fn map_parts(
        &self,
        vertex: impl Fn(&Vector) -> Vector,
        half: impl Fn(&Halfspace) -> Halfspace,
    ) -> Polytope {
        Polytope {
            dim: self.dim,
            halfspaces: self.halfspaces.iter().map(half).collect(),
            vertices: self
                .vertices
                .as_ref()
                .map(|vs| {
                    let mut out: Vec<Vector> = vs.iter().map(&vertex).collect();
                    super::order_vertices(&mut out);
                    out
                }),
            empty: self.empty,
        }
    }
}

/// Wire format: `{"dim", "normals", "offsets", "vertices"?, "empty"?}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolytopeJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    pub normals: Vec<Vec<f64>>,
    pub offsets: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub empty: bool,
}

impl From<Polytope> for PolytopeJson {
    fn from(p: Polytope) -> Self {
        PolytopeJson {
            dim: Some(p.dim),
            normals: p
                .halfspaces
                .iter()
                .map(|h| h.normal.iter().copied().collect())
                .collect(),
            offsets: p.halfspaces.iter().map(|h| h.offset).collect(),
            vertices: if p.empty {
                None
            } else {
                p.vertices
                    .map(|vs| vs.iter().map(|v| v.iter().copied().collect()).collect())
            },
            empty: p.empty,
        }
    }
}

impl TryFrom<PolytopeJson> for Polytope {
    type Error = Error;

    fn try_from(j: PolytopeJson) -> Result<Self> {
        let dim = j
            .dim
            .or_else(|| j.normals.first().map(Vec::len))
            .or_else(|| j.vertices.as_ref().and_then(|v| v.first()).map(Vec::len))
            .ok_or_else(|| Error::Parse("polytope needs \"dim\" when it has no rows".into()))?;
        if j.empty {
            return Ok(Polytope::empty(dim));
        }
        check_dim("polytope offsets", j.normals.len(), j.offsets.len())?;
        let mut p = Polytope::from_halfspaces(
            dim,
            j.normals
                .iter()
                .zip(&j.offsets)
                .map(|(n, &b)| (Vector::from_column_slice(n), b)),
        )?;
        if let Some(vs) = j.vertices {
            let tol = Tolerances::default();
            let mut cache = Vec::with_capacity(vs.len());
            for v in vs {
                check_dim("polytope vertex", dim, v.len())?;
                let v = Vector::from_vec(v);
                if !p.contains_point(&v, tol.incl) {
                    return Err(Error::Parse(format!(
                        "cached vertex {:?} violates the half-space description",
                        v.as_slice()
                    )));
                }
                cache.push(v);
            }
            if !cache.is_empty() && !p.empty {
                p.vertices = Some(cache);
            }
        }
        Ok(p)
    }
}
