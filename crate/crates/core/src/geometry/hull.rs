//! Vertex list to H-representation.
//!
//! Points are first reduced to their affine hull. Flat directions become
//! pairs of opposite half-spaces; within the hull the facets come from an
//! interval (1-D), Andrew's monotone chain (2-D), or the vertices of the polar
//! set `{z : y_i · z <= 1}` about the centroid (3-D and up).

use nalgebra::{DMatrix, SymmetricEigen};

use super::polytope::{Halfspace, Polytope, Vector};
use super::{dedup_points, order_vertices, MAX_VERTEX_DIM};
use crate::error::{check_dim, Error, Result};
use crate::tolerance::Tolerances;

impl Polytope {
    /// Convex hull of `points`. Lower-dimensional hulls are legal: they get
    /// equality pairs for their flat directions.
    pub fn from_vertices(dim: usize, points: &[Vector], tol: &Tolerances) -> Result<Polytope> {
        for p in points {
            check_dim("from_vertices point", dim, p.len())?;
            if p.iter().any(|v| !v.is_finite()) {
                return Err(Error::Numerical("non-finite vertex".into()));
            }
        }
        if dim > MAX_VERTEX_DIM {
            return Err(Error::Unsupported(format!(
                "convex hull in dimension {dim} (limit {MAX_VERTEX_DIM})"
            )));
        }
        let pts = dedup_points(points.to_vec(), tol.vert);
        if pts.is_empty() {
            return Ok(Polytope::empty(dim));
        }
        if pts.len() == 1 {
            return Ok(Polytope::point(&pts[0]));
        }

        let flat = AffineHull::of(&pts, tol.vert);
        let local: Vec<Vector> = pts.iter().map(|p| flat.to_local(p)).collect();
        let (facets, extreme) = match flat.rank() {
            0 => (Vec::new(), vec![0]),
            1 => interval_facets(&local),
            2 => polygon_facets(&local, tol.vert),
            _ => polar_facets(&local, tol)?,
        };

        let mut halfspaces = Vec::with_capacity(facets.len() + 2 * (dim - flat.rank()));
        for (g, h) in facets {
            let normal = &flat.basis * &g;
            let offset = h + normal.dot(&flat.origin);
            if let Some(hs) = Halfspace::normalized(normal, offset) {
                halfspaces.push(hs);
            }
        }
        for u in &flat.complement {
            let c = u.dot(&flat.origin);
            halfspaces.push(Halfspace {
                normal: u.clone(),
                offset: c,
            });
            halfspaces.push(Halfspace {
                normal: -u,
                offset: -c,
            });
        }
        let mut vertices: Vec<Vector> = extreme.into_iter().map(|i| pts[i].clone()).collect();
        order_vertices(&mut vertices);
        Ok(Polytope::with_cache(dim, halfspaces, vertices))
    }
}

struct AffineHull {
    origin: Vector,
    // dim x rank, orthonormal columns
    basis: DMatrix<f64>,
    complement: Vec<Vector>,
}

impl AffineHull {
    fn of(pts: &[Vector], eps: f64) -> Self {
        let d = pts[0].len();
        let centroid = pts.iter().fold(Vector::zeros(d), |acc, p| acc + p) / pts.len() as f64;
        let mut scatter = DMatrix::zeros(d, d);
        for p in pts {
            let c = p - &centroid;
            scatter += &c * c.transpose();
        }
        let eig = SymmetricEigen::new(scatter);
        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let mut keep = Vec::new();
        let mut complement = Vec::new();
        for i in order {
            let u = eig.eigenvectors.column(i).into_owned();
            let (lo, hi) = pts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
                let s = u.dot(&(p - &centroid));
                (lo.min(s), hi.max(s))
            });
            if hi - lo > eps {
                keep.push(u);
            } else {
                complement.push(u);
            }
        }
        if keep.len() == d {
            // Full-dimensional: stay in the original coordinates.
            return Self {
                origin: Vector::zeros(d),
                basis: DMatrix::identity(d, d),
                complement: Vec::new(),
            };
        }
        let basis = if keep.is_empty() {
            DMatrix::zeros(d, 0)
        } else {
            DMatrix::from_columns(&keep)
        };
        Self {
            origin: centroid,
            basis,
            complement,
        }
    }

    fn rank(&self) -> usize {
        self.basis.ncols()
    }

    fn to_local(&self, p: &Vector) -> Vector {
        self.basis.transpose() * (p - &self.origin)
    }
}

type Facets = (Vec<(Vector, f64)>, Vec<usize>);

fn interval_facets(ys: &[Vector]) -> Facets {
    let (mut imin, mut imax) = (0, 0);
    for (i, y) in ys.iter().enumerate() {
        if y[0] < ys[imin][0] {
            imin = i;
        }
        if y[0] > ys[imax][0] {
            imax = i;
        }
    }
    let one = Vector::from_element(1, 1.0);
    (
        vec![(one.clone(), ys[imax][0]), (-one, -ys[imin][0])],
        vec![imin, imax],
    )
}

fn polygon_facets(ys: &[Vector], eps: f64) -> Facets {
    let hull = monotone_chain(ys, eps);
    let mut facets = Vec::with_capacity(hull.len());
    for k in 0..hull.len() {
        let p = &ys[hull[k]];
        let q = &ys[hull[(k + 1) % hull.len()]];
        let n = Vector::from_column_slice(&[q[1] - p[1], p[0] - q[0]]);
        let off = n.dot(p);
        facets.push((n, off));
    }
    (facets, hull)
}

fn polar_facets(ys: &[Vector], tol: &Tolerances) -> Result<Facets> {
    let k = ys[0].len();
    let centroid = ys.iter().fold(Vector::zeros(k), |acc, y| acc + y) / ys.len() as f64;
    let shifted: Vec<Vector> = ys.iter().map(|y| y - &centroid).collect();
    let polar = Polytope::from_halfspaces(k, shifted.iter().map(|y| (y.clone(), 1.0)))?;
    let duals = polar.vertices(tol)?;
    let mut facets: Vec<(Vector, f64)> = Vec::with_capacity(duals.len());
    for z in duals {
        let len = z.norm();
        if len <= 1e-12 {
            continue;
        }
        let g = &z / len;
        facets.push((g.clone(), 1.0 / len + g.dot(&centroid)));
    }
    let mut extreme = Vec::new();
    for (i, y) in ys.iter().enumerate() {
        let tight: Vec<&Vector> = facets
            .iter()
            .filter(|(g, h)| (g.dot(y) - h).abs() <= tol.vert)
            .map(|(g, _)| g)
            .collect();
        if tight.len() >= k {
            let m = DMatrix::from_fn(tight.len(), k, |r, c| tight[r][c]);
            if m.rank(1e-9) == k {
                extreme.push(i);
            }
        }
    }
    Ok((facets, extreme))
}

/// Indices of the strictly convex hull in counter-clockwise order, starting
/// at the lexicographically smallest point.
fn monotone_chain(ys: &[Vector], eps: f64) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..ys.len()).collect();
    idx.sort_by(|&a, &b| {
        ys[a][0]
            .total_cmp(&ys[b][0])
            .then(ys[a][1].total_cmp(&ys[b][1]))
    });
    if idx.len() < 3 {
        return idx;
    }
    // Drop `a` when it lies within `eps` of the segment from `o` to `b`.
    let turn = |o: usize, a: usize, b: usize| {
        let (o, a, b) = (&ys[o], &ys[a], &ys[b]);
        let cross = (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
        let base = ((b[0] - o[0]).powi(2) + (b[1] - o[1]).powi(2)).sqrt();
        cross > eps * base
    };
    let mut lower: Vec<usize> = Vec::new();
    for &i in &idx {
        while lower.len() >= 2 && !turn(lower[lower.len() - 2], lower[lower.len() - 1], i) {
            lower.pop();
        }
        lower.push(i);
    }
    let mut upper: Vec<usize> = Vec::new();
    for &i in idx.iter().rev() {
        while upper.len() >= 2 && !turn(upper[upper.len() - 2], upper[upper.len() - 1], i) {
            upper.pop();
        }
        upper.push(i);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Extreme points of a planar point set (all points if collinear-degenerate
/// handling reduces to endpoints).
pub(crate) fn extreme_points_2d(pts: &[Vector], eps: f64) -> Vec<Vector> {
    if pts.len() < 3 {
        return pts.to_vec();
    }
    let flat = AffineHull::of(pts, eps);
    let keep: Vec<usize> = match flat.rank() {
        0 => vec![0],
        1 => {
            let local: Vec<Vector> = pts.iter().map(|p| flat.to_local(p)).collect();
            interval_facets(&local).1
        }
        _ => monotone_chain(pts, eps),
    };
    keep.into_iter().map(|i| pts[i].clone()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn v(xs: &[f64]) -> Vector {
        Vector::from_column_slice(xs)
    }

    #[test]
    fn square_from_corners_and_interior_points() {
        let pts = vec![
            v(&[1.0, 1.0]),
            v(&[-1.0, 1.0]),
            v(&[0.0, 0.0]),
            v(&[1.0, -1.0]),
            v(&[-1.0, -1.0]),
            v(&[1.0, 0.0]),
        ];
        let p = Polytope::from_vertices(2, &pts, &tol()).unwrap();
        assert_eq!(p.halfspaces().len(), 4);
        assert_eq!(p.cached_vertices().unwrap().len(), 4);
        assert!(p.set_equal(&Polytope::unit_box(2, 1.0), &tol()).unwrap());
    }

    #[test]
    fn collinear_points_give_a_flagged_segment() {
        let pts = vec![v(&[0.5, 1.0]), v(&[0.0, 0.0]), v(&[-0.5, -1.0]), v(&[0.25, 0.5])];
        let seg = Polytope::from_vertices(2, &pts, &tol()).unwrap();
        assert_eq!(seg.cached_vertices().unwrap().len(), 2);
        assert!(!seg.is_full_dimensional(&tol()).unwrap());
        assert!(seg.contains_point(&v(&[0.1, 0.2]), 1e-9));
        assert!(!seg.contains_point(&v(&[0.1, 0.25]), 1e-9));
        assert!(!seg.contains_point(&v(&[0.6, 1.2]), 1e-9));
    }

    #[test]
    fn cube_hull_via_polar() {
        let mut pts = Polytope::unit_box(3, 1.0).cached_vertices().unwrap().to_vec();
        pts.push(v(&[0.2, -0.3, 0.1]));
        let p = Polytope::from_vertices(3, &pts, &tol()).unwrap();
        assert_eq!(p.halfspaces().len(), 6);
        assert_eq!(p.cached_vertices().unwrap().len(), 8);
        assert!(p.set_equal(&Polytope::unit_box(3, 1.0), &tol()).unwrap());
    }

    #[test]
    fn triangle_embedded_in_3d() {
        let pts = vec![v(&[1.0, 0.0, 0.0]), v(&[0.0, 1.0, 0.0]), v(&[0.0, 0.0, 1.0])];
        let p = Polytope::from_vertices(3, &pts, &tol()).unwrap();
        assert!(p.contains_point(&v(&[1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0]), 1e-9));
        assert!(!p.contains_point(&v(&[0.0, 0.0, 0.0]), 1e-9));
        let vs = p.clone().vertices(&tol()).unwrap();
        assert_eq!(vs.len(), 3);
    }

    #[test]
    fn empty_input_is_empty_set() {
        assert!(Polytope::from_vertices(2, &[], &tol()).unwrap().known_empty());
    }

    #[test]
    fn hull_then_vertex_enumeration_is_idempotent() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for dim in 1..=3 {
            for _ in 0..30 {
                let n = rng.gen_range(1..15);
                let pts: Vec<Vector> = (0..n)
                    .map(|_| Vector::from_iterator(dim, (0..dim).map(|_| rng.gen_range(-1.0..1.0))))
                    .collect();
                let p = Polytope::from_vertices(dim, &pts, &tol()).unwrap();
                for q in &pts {
                    assert!(p.contains_point(q, 1e-7));
                }
                let cached = p.cached_vertices().unwrap().to_vec();
                let raw = Polytope::from_halfspaces(
                    dim,
                    p.halfspaces().iter().map(|h| (h.normal.clone(), h.offset)),
                )
                .unwrap();
                let again = raw.vertices(&tol()).unwrap();
                assert_eq!(again.len(), cached.len(), "dim {dim}");
                for a in &again {
                    assert!(cached.iter().any(|c| (a - c).amax() < 1e-7));
                }
            }
        }
    }
}
