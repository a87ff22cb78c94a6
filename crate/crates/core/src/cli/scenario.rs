//! Scenario files: system matrices, constraint sets and analysis defaults.
//!
//! ```json
//! {
//!   "name": "S3",
//!   "A": [[1.9, 1.1], [0.5, 1.5]],
//!   "B": [[0.5], [1.0]],
//!   "X": { "unit_box": 2 },
//!   "U": { "unit_box": 1 },
//!   "alpha": 0.1,
//!   "istar_list": [2, 3, 4]
//! }
//! ```
//!
//! `X` and `U` default to `[-1, 1]ⁿ` boxes. A set is either
//! `{"unit_box": n, "radius": r}`, `{"normals": [...], "offsets": [...]}` or
//! `{"vertices": [...]}`. Giving both `E` and `W` selects a general system
//! with an explicit disturbance input instead of the attack split of `U`.

use serde::Deserialize;

use crate::attack::AttackScenario;
use crate::error::{Error, Result};
use crate::geometry::{Polytope, Vector};
use crate::reachability::GeneralSystem;
use crate::setops::Matrix;
use crate::tolerance::Tolerances;

pub const BUILTIN_PREFIX: &str = "builtin:";

const BUILTINS: [(&str, &str); 3] = [
    ("s1", include_str!("../../scenarios/s1.json")),
    ("s2", include_str!("../../scenarios/s2.json")),
    ("s3", include_str!("../../scenarios/s3.json")),
];

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub name: String,
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    #[serde(rename = "B")]
    pub b: Vec<Vec<f64>>,
    #[serde(rename = "X", default)]
    pub x: Option<SetSpec>,
    #[serde(rename = "U", default)]
    pub u: Option<SetSpec>,
    #[serde(rename = "E", default)]
    pub e: Option<Vec<Vec<f64>>>,
    #[serde(rename = "W", default)]
    pub w: Option<SetSpec>,
    #[serde(default)]
    pub alpha: Option<f64>,
    #[serde(default)]
    pub istar_list: Option<Vec<usize>>,
    #[serde(default)]
    pub tolerances: Option<Tolerances>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum SetSpec {
    UnitBox(UnitBoxSpec),
    HRep(HRepSpec),
    VRep(VRepSpec),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnitBoxSpec {
    pub unit_box: usize,
    #[serde(default)]
    pub radius: Option<f64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HRepSpec {
    pub normals: Vec<Vec<f64>>,
    pub offsets: Vec<f64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VRepSpec {
    pub vertices: Vec<Vec<f64>>,
}

impl SetSpec {
    pub fn build(&self, name: &str, dim: usize, tol: &Tolerances) -> Result<Polytope> {
        let p = match self {
            SetSpec::UnitBox(b) => {
                let r = b.radius.unwrap_or(1.0);
                if !(r > 0.0 && r.is_finite()) {
                    return Err(Error::Validation(vec![format!("{name}: radius {r} must be positive")]));
                }
                Polytope::unit_box(b.unit_box, r)
            }
            SetSpec::HRep(h) => Polytope::from_hrep(&h.normals, &h.offsets)?,
            SetSpec::VRep(v) => {
                if v.vertices.iter().any(|p| p.len() != dim) {
                    return Err(Error::Validation(vec![format!(
                        "{name}: every vertex needs {dim} coordinates"
                    )]));
                }
                let pts: Vec<Vector> = v.vertices.iter().map(|p| Vector::from_column_slice(p)).collect();
                Polytope::from_vertices(dim, &pts, tol)?
            }
        };
        if p.dim() != dim {
            return Err(Error::Validation(vec![format!(
                "{name} has dimension {}, expected {dim}",
                p.dim()
            )]));
        }
        Ok(p)
    }
}

/// Name of a bundled scenario (`builtin:s1` etc.) or a file path.
pub fn load(source: &str) -> Result<ScenarioFile> {
    if let Some(key) = source.strip_prefix(BUILTIN_PREFIX) {
        let text = BUILTINS
            .iter()
            .find(|(k, _)| k.eq_ignore_ascii_case(key))
            .map(|(_, t)| *t)
            .ok_or_else(|| Error::Parse(format!("unknown bundled scenario '{key}' (s1, s2, s3)")))?;
        return parse_scenario(text);
    }
    let text = std::fs::read_to_string(source)
        .map_err(|e| Error::Parse(format!("cannot read {source}: {e}")))?;
    parse_scenario(&text).map_err(|e| match e {
        Error::Parse(m) => Error::Parse(format!("{source}: {m}")),
        other => other,
    })
}

/// Parses and dimension-checks a scenario document.
pub fn parse_scenario(text: &str) -> Result<ScenarioFile> {
    let sc: ScenarioFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    sc.check_shapes()?;
    Ok(sc)
}

fn matrix(name: &str, rows: &[Vec<f64>]) -> Result<Matrix> {
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    if r == 0 || c == 0 || rows.iter().any(|row| row.len() != c) {
        return Err(Error::Validation(vec![format!("{name} must be a non-empty rectangular matrix")]));
    }
    if rows.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::Validation(vec![format!("{name} has non-finite entries")]));
    }
    Ok(Matrix::from_row_iterator(r, c, rows.iter().flatten().copied()))
}

impl ScenarioFile {
    fn check_shapes(&self) -> Result<()> {
        let mut failures = Vec::new();
        let a = matrix("A", &self.a);
        let b = matrix("B", &self.b);
        for m in [&a, &b] {
            if let Err(Error::Validation(v)) = m {
                failures.extend(v.iter().cloned());
            }
        }
        if let (Ok(a), Ok(b)) = (&a, &b) {
            if a.nrows() != a.ncols() {
                failures.push(format!("A must be square, got {}x{}", a.nrows(), a.ncols()));
            }
            if b.nrows() != a.nrows() {
                failures.push(format!("B has {} rows, A has {}", b.nrows(), a.nrows()));
            }
        }
        if let Some(e) = &self.e {
            match (matrix("E", e), &a) {
                (Ok(e), Ok(a)) if e.nrows() != a.nrows() => {
                    failures.push(format!("E has {} rows, A has {}", e.nrows(), a.nrows()))
                }
                (Err(Error::Validation(v)), _) => failures.extend(v),
                _ => {}
            }
        }
        if self.e.is_some() != self.w.is_some() {
            failures.push("E and W must be given together".into());
        }
        if let Some(alpha) = self.alpha {
            if !(0.0..1.0).contains(&alpha) {
                failures.push(format!("alpha = {alpha} must lie in [0, 1)"));
            }
        }
        if self.istar_list.as_ref().is_some_and(|l| l.contains(&0)) {
            failures.push("istar_list entries must be at least 1".into());
        }
        if failures.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(failures))
        }
    }

    /// File tolerances (or defaults), then `ATTACKSET_*` environment overrides.
    pub fn tolerances(&self) -> Result<Tolerances> {
        self.tolerances.clone().unwrap_or_default().with_env_overrides()
    }

    pub fn a_matrix(&self) -> Result<Matrix> {
        matrix("A", &self.a)
    }

    pub fn b_matrix(&self) -> Result<Matrix> {
        matrix("B", &self.b)
    }

    pub fn is_general(&self) -> bool {
        self.e.is_some()
    }

    fn sets(&self, tol: &Tolerances) -> Result<(Polytope, Polytope)> {
        let n = self.a.len();
        let m = self.b.first().map_or(0, Vec::len);
        let default_x = SetSpec::UnitBox(UnitBoxSpec { unit_box: n, radius: None });
        let default_u = SetSpec::UnitBox(UnitBoxSpec { unit_box: m, radius: None });
        let x = self.x.as_ref().unwrap_or(&default_x).build("X", n, tol)?;
        let u = self.u.as_ref().unwrap_or(&default_u).build("U", m, tol)?;
        Ok((x, u))
    }

    /// Attack scenario at `alpha` (falling back to the file's value, then 0).
    pub fn attack(&self, alpha: Option<f64>) -> Result<AttackScenario> {
        if self.is_general() {
            return Err(Error::Validation(vec![
                "attack analysis needs a scenario without E and W".into(),
            ]));
        }
        let tol = self.tolerances()?;
        let (x, u) = self.sets(&tol)?;
        let alpha = alpha.or(self.alpha).unwrap_or(0.0);
        AttackScenario::new(self.a_matrix()?, self.b_matrix()?, x, u, alpha, tol)
    }

    /// The system used by the recursions: the explicit `E`, `W` system when
    /// given, otherwise the attack split at `alpha`.
    pub fn system(&self, alpha: Option<f64>) -> Result<GeneralSystem> {
        let (Some(e), Some(w)) = (&self.e, &self.w) else {
            return self.attack(alpha)?.specialize();
        };
        if alpha.is_some() {
            return Err(Error::Validation(vec![
                "--alpha does not apply to a scenario with explicit E and W".into(),
            ]));
        }
        let tol = self.tolerances()?;
        let (x, u) = self.sets(&tol)?;
        let e = matrix("E", e)?;
        let w = w.build("W", e.ncols(), &tol)?;
        GeneralSystem::new(self.a_matrix()?, self.b_matrix()?, e, x, u, w, tol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_fixtures() {
        let s3 = load("builtin:s3").unwrap();
        assert_eq!(s3.a, vec![vec![1.9, 1.1], vec![0.5, 1.5]]);
        assert_eq!(s3.b, vec![vec![0.5], vec![1.0]]);
        let sc = s3.attack(None).unwrap();
        assert!(sc.x().set_equal(&Polytope::unit_box(2, 1.0), sc.tolerances()).unwrap());
        for k in ["s1", "s2"] {
            load(&format!("builtin:{k}")).unwrap().attack(Some(0.3)).unwrap();
        }
        assert!(load("builtin:s9").is_err());
    }

    #[test]
    fn rejects_unknown_keys_and_bad_shapes() {
        let err = parse_scenario(r#"{"name":"x","A":[[1]],"B":[[1]],"extra":1}"#).unwrap_err();
        assert!(matches!(&err, Error::Parse(m) if m.contains("extra") && m.contains("line")));
        let err = parse_scenario(r#"{"name":"x","A":[[1,0]],"B":[[1],[1]]}"#).unwrap_err();
        let Error::Validation(v) = err else { panic!() };
        assert_eq!(v.len(), 2);
    }

    #[test]
    fn assumption_failures_are_reported() {
        let asym = r#"{"name":"x","A":[[1,1],[0,1]],"B":[[0],[0]],
                       "U":{"normals":[[1],[-1]],"offsets":[1,0.5]}}"#;
        let Error::Validation(v) = parse_scenario(asym).unwrap().attack(None).unwrap_err() else {
            panic!()
        };
        assert!(v.iter().any(|m| m.contains("reachable")));
        assert!(v.iter().any(|m| m.contains("symmetric")));
    }

    #[test]
    fn general_system_mode() {
        let text = r#"{"name":"auto","A":[[0.5,1],[0,0.7]],"B":[[0.5],[1]],
                       "U":{"vertices":[[0]]},"E":[[0.5],[1]],"W":{"unit_box":1,"radius":0.1}}"#;
        let sc = parse_scenario(text).unwrap();
        let sys = sc.system(None).unwrap();
        assert!(sys.u().set_equal(&Polytope::origin(1), sys.tolerances()).unwrap());
        assert!(sc.system(Some(0.1)).is_err());
        assert!(sc.attack(None).is_err());
    }
}
