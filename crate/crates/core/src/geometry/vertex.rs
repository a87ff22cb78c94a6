//! H-representation to vertex list.
//!
//! Planar sets intersect every pair of boundary lines and keep the feasible
//! points. Higher dimensions start from a bounding box derived from support
//! values and cut it by one half-space at a time (double description): the
//! new vertices lie on edges joining a removed vertex to a kept one, and two
//! vertices span an edge iff no third vertex is tight on every constraint
//! tight at both.

use super::polytope::{Halfspace, Polytope, Vector};
use super::{dedup_points, order_vertices, MAX_VERTEX_DIM};
use crate::error::{Error, Result};
use crate::tolerance::Tolerances;

impl Polytope {
    /// Vertex list. Planar results are counter-clockwise from the
    /// lexicographically smallest vertex; an empty set yields no vertices.
    pub fn vertices(&self, tol: &Tolerances) -> Result<Vec<Vector>> {
        if let Some(vs) = self.cached_vertices() {
            return Ok(vs.to_vec());
        }
        if self.known_empty() || self.is_empty(tol)? {
            return Ok(Vec::new());
        }
        if self.dim() > MAX_VERTEX_DIM {
            return Err(Error::Unsupported(format!(
                "vertex enumeration in dimension {} (limit {MAX_VERTEX_DIM})",
                self.dim()
            )));
        }
        let bbox = self
            .bounding_box(tol)?
            .ok_or_else(|| Error::Domain("vertices of an unbounded polyhedron".into()))?;
        self.enumerate_vertices(bbox, tol)
    }

    /// Enumeration proper; the caller has checked non-emptiness and
    /// boundedness.
    pub(crate) fn enumerate_vertices(
        &self,
        (lo, hi): (Vector, Vector),
        tol: &Tolerances,
    ) -> Result<Vec<Vector>> {
        let mut vs = match self.dim() {
            1 => vec![lo.clone(), hi.clone()],
            2 => planar(self.halfspaces(), tol),
            _ => double_description(self.halfspaces(), &lo, &hi, tol),
        };
        vs = dedup_points(vs, tol.vert);
        if vs.is_empty() {
            // Within tolerance of empty: represent by the deepest point.
            let (_, x) = self.depth(tol)?;
            vs.push(x);
        }
        if self.dim() == 2 {
            vs = super::hull::extreme_points_2d(&vs, tol.vert);
        }
        order_vertices(&mut vs);
        Ok(vs)
    }
}

fn planar(hs: &[Halfspace], tol: &Tolerances) -> Vec<Vector> {
    let mut out = Vec::new();
    for i in 0..hs.len() {
        for j in i + 1..hs.len() {
            let (a, b) = (&hs[i], &hs[j]);
            let det = a.normal[0] * b.normal[1] - a.normal[1] * b.normal[0];
            if det.abs() < 1e-12 {
                continue;
            }
            let x = (a.offset * b.normal[1] - a.normal[1] * b.offset) / det;
            let y = (a.normal[0] * b.offset - a.offset * b.normal[0]) / det;
            let p = Vector::from_column_slice(&[x, y]);
            if hs.iter().all(|h| h.slack(&p) >= -tol.feas) {
                out.push(p);
            }
        }
    }
    out
}

struct Vertex {
    point: Vector,
    // sorted indices of tight constraints (box facets numbered after `hs`)
    active: Vec<usize>,
}

fn double_description(hs: &[Halfspace], lo: &Vector, hi: &Vector, tol: &Tolerances) -> Vec<Vector> {
    let d = lo.len();
    let m = hs.len();
    let margin = 0.1 * (1.0 + (hi - lo).amax());
    let mut verts: Vec<Vertex> = (0..1usize << d)
        .map(|mask| {
            let mut point = Vector::zeros(d);
            let mut active = Vec::with_capacity(d);
            for j in 0..d {
                if mask >> j & 1 == 1 {
                    point[j] = hi[j] + margin;
                    active.push(m + 2 * j);
                } else {
                    point[j] = lo[j] - margin;
                    active.push(m + 2 * j + 1);
                }
            }
            Vertex { point, active }
        })
        .collect();

    for (k, h) in hs.iter().enumerate() {
        let violation: Vec<f64> = verts.iter().map(|v| -h.slack(&v.point)).collect();
        let outside: Vec<usize> = (0..verts.len()).filter(|&i| violation[i] > tol.feas).collect();
        if outside.is_empty() {
            for (v, s) in verts.iter_mut().zip(&violation) {
                if s.abs() <= tol.feas {
                    v.active.push(k);
                }
            }
            continue;
        }
        let inside: Vec<usize> = (0..verts.len()).filter(|&i| violation[i] < -tol.feas).collect();

        let mut created = Vec::new();
        for &p in &outside {
            for &q in &inside {
                let common = intersect_sorted(&verts[p].active, &verts[q].active);
                if common.len() + 1 < d {
                    continue;
                }
                let blocked = verts.iter().enumerate().any(|(r, v)| {
                    r != p && r != q && is_subset_sorted(&common, &v.active)
                });
                if blocked {
                    continue;
                }
                let (sp, sq) = (violation[p], violation[q]);
                let t = sp / (sp - sq);
                let point = &verts[p].point + (&verts[q].point - &verts[p].point) * t;
                let mut active = common;
                active.push(k);
                created.push(Vertex { point, active });
            }
        }

        let mut next: Vec<Vertex> = Vec::with_capacity(verts.len() + created.len());
        for (i, mut v) in verts.into_iter().enumerate() {
            if violation[i] > tol.feas {
                continue;
            }
            if violation[i] >= -tol.feas {
                v.active.push(k);
            }
            next.push(v);
        }
        next.extend(created);
        verts = merge_close(next, tol.vert);
        if verts.is_empty() {
            return Vec::new();
        }
    }

    // Box facets are supporting hyperplanes only after the margin; every
    // surviving vertex is a vertex of the input set.
    verts.into_iter().map(|v| v.point).collect()
}

fn merge_close(vs: Vec<Vertex>, eps: f64) -> Vec<Vertex> {
    let mut out: Vec<Vertex> = Vec::with_capacity(vs.len());
    for mut v in vs {
        v.active.sort_unstable();
        v.active.dedup();
        if let Some(w) = out.iter_mut().find(|w| (&w.point - &v.point).amax() <= eps) {
            w.active.extend(v.active);
            w.active.sort_unstable();
            w.active.dedup();
        } else {
            out.push(v);
        }
    }
    out
}

fn intersect_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

fn is_subset_sorted(small: &[usize], big: &[usize]) -> bool {
    let mut j = 0;
    for &x in small {
        while j < big.len() && big[j] < x {
            j += 1;
        }
        if j == big.len() || big[j] != x {
            return false;
        }
        j += 1;
    }
    true
}
