use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Numerical tolerances shared by every geometric predicate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Optimality/pivoting tolerance of the simplex solver.
    pub lp: f64,
    /// Emptiness: a set is empty when its deepest point violates some
    /// constraint by more than this.
    pub feas: f64,
    /// Slack allowed when testing set inclusion.
    pub incl: f64,
    /// Vertices closer than this are merged; also the flatness threshold of
    /// the affine hull.
    pub vert: f64,
    /// Eigenvector residual bound.
    pub eig: f64,
    /// Directions where the input image has support below this are ignored.
    pub sup: f64,
    /// Ties between eigenvalue moduli, and the `rho == 1` branch selection.
    pub tie: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            lp: 1e-9,
            feas: 1e-8,
            incl: 1e-7,
            vert: 1e-7,
            eig: 1e-9,
            sup: 1e-10,
            tie: 1e-9,
        }
    }
}

pub const ENV_PREFIX: &str = "ATTACKSET_";

impl Tolerances {
    /// Applies `ATTACKSET_<FIELD>` overrides (e.g. `ATTACKSET_INCL=1e-6`).
    pub fn with_env_overrides(mut self) -> Result<Self> {
        self.apply_overrides(|key| std::env::var(format!("{ENV_PREFIX}{key}")).ok())?;
        Ok(self)
    }

    pub(crate) fn apply_overrides(
        &mut self,
        lookup: impl Fn(&str) -> Option<String>,
    ) -> Result<()> {
        let fields: [(&str, &mut f64); 7] = [
            ("LP", &mut self.lp),
            ("FEAS", &mut self.feas),
            ("INCL", &mut self.incl),
            ("VERT", &mut self.vert),
            ("EIG", &mut self.eig),
            ("SUP", &mut self.sup),
            ("TIE", &mut self.tie),
        ];
        let mut bad = Vec::new();
        for (key, slot) in fields {
            if let Some(raw) = lookup(key) {
                match raw.trim().parse::<f64>() {
                    Ok(v) if v > 0.0 && v.is_finite() => *slot = v,
                    _ => bad.push(format!("{ENV_PREFIX}{key}={raw:?} is not a positive number")),
                }
            }
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(bad))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides_replace_only_named_fields() {
        let mut t = Tolerances::default();
        t.apply_overrides(|k| (k == "INCL").then(|| "1e-6".to_string()))
            .unwrap();
        assert_eq!(t.incl, 1e-6);
        assert_eq!(t.lp, 1e-9);
    }

    #[test]
    fn malformed_override_is_rejected() {
        let mut t = Tolerances::default();
        let err = t
            .apply_overrides(|k| (k == "FEAS").then(|| "-3".to_string()))
            .unwrap_err();
        assert!(matches!(err, Error::Validation(v) if v.len() == 1));
    }
}
