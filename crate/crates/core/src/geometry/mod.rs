//! Polytopes in H-representation with cached vertices, and the linear
//! programs that answer support, emptiness and containment queries.

mod hull;
pub mod lp;
mod polytope;
mod vertex;

pub use lp::{lp_solve, LpOutcome, LpProblem};
pub use polytope::{Halfspace, Polytope, PolytopeJson, Vector};

/// Largest dimension for vertex enumeration and convex hulls.
pub const MAX_VERTEX_DIM: usize = 8;

/// Merges points closer than `eps` in the max norm, keeping the first.
pub(crate) fn dedup_points(pts: Vec<Vector>, eps: f64) -> Vec<Vector> {
    let mut out: Vec<Vector> = Vec::with_capacity(pts.len());
    for p in pts {
        if !out.iter().any(|q| (q - &p).amax() <= eps) {
            out.push(p);
        }
    }
    out
}

/// Canonical vertex order: planar convex polygons run counter-clockwise from
/// the lexicographically smallest vertex; everything else is lexicographic.
pub(crate) fn order_vertices(vs: &mut [Vector]) {
    let lex = |a: &Vector, b: &Vector| {
        a.iter()
            .zip(b.iter())
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    };
    if vs.len() < 3 || vs[0].len() != 2 {
        vs.sort_by(lex);
        return;
    }
    let n = vs.len() as f64;
    let cx = vs.iter().map(|v| v[0]).sum::<f64>() / n;
    let cy = vs.iter().map(|v| v[1]).sum::<f64>() / n;
    vs.sort_by(|a, b| {
        let ta = (a[1] - cy).atan2(a[0] - cx);
        let tb = (b[1] - cy).atan2(b[0] - cx);
        ta.total_cmp(&tb)
    });
    let start = (0..vs.len())
        .min_by(|&i, &j| lex(&vs[i], &vs[j]))
        .unwrap_or(0);
    vs.rotate_left(start);
}
