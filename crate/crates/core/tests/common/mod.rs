#![allow(dead_code)]

use attackset::attack::AttackScenario;
use attackset::cli::scenario;
use attackset::setops::Matrix;
use attackset::{Polytope, Tolerances, Vector};

pub const SYSTEMS: [&str; 3] = ["s1", "s2", "s3"];

pub fn system(name: &str) -> AttackScenario {
    scenario::load(&format!("builtin:{name}")).unwrap().attack(None).unwrap()
}

pub fn tol() -> Tolerances {
    Tolerances::default()
}

pub fn mat(r: usize, c: usize, d: &[f64]) -> Matrix {
    Matrix::from_row_slice(r, c, d)
}

pub fn v(xs: &[f64]) -> Vector {
    Vector::from_column_slice(xs)
}

/// Convex hull of the origin-centred polygon through `points`.
pub fn hull(points: &[[f64; 2]]) -> Polytope {
    let pts: Vec<Vector> = points.iter().map(|p| v(p)).collect();
    Polytope::from_vertices(2, &pts, &tol()).unwrap()
}
