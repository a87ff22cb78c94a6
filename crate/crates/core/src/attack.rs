//! Actuation attacks: a fraction `α` of the input set is held by the attacker
//! (`a ∈ αU`) and the defender keeps `v ∈ (1-α)U`. Closed-form upper bounds
//! on the critical fraction and a bisection for its exact value.

use serde::Serialize;

use crate::error::{check_dim, Error, Result};
use crate::geometry::Polytope;
use crate::reachability::GeneralSystem;
use crate::setops::{linear_image, negate, scale, Matrix};
use crate::spectral::{analyze, SpectralInfo};
use crate::tolerance::Tolerances;

/// Denominators of the finite-horizon bound smaller than this are treated
/// as cancellation.
pub const DENOMINATOR_GUARD: f64 = 1e-12;

pub const DEFAULT_BISECTION_TOL: f64 = 1e-3;

#[derive(Clone, Debug)]
pub struct AttackScenario {
    a: Matrix,
    b: Matrix,
    x: Polytope,
    u: Polytope,
    alpha: f64,
    tol: Tolerances,
}

impl AttackScenario {
    /// Validates that `(A, B)` is reachable, `X` and `U` are PC-sets, `U = -U`
    /// and `0 <= α < 1`. Every failed check is listed in the error.
    pub fn new(
        a: Matrix,
        b: Matrix,
        x: Polytope,
        u: Polytope,
        alpha: f64,
        tol: Tolerances,
    ) -> Result<Self> {
        let n = a.nrows();
        check_dim("A (square)", n, a.ncols())?;
        check_dim("B rows", n, b.nrows())?;
        check_dim("X dimension", n, x.dim())?;
        check_dim("U dimension", b.ncols(), u.dim())?;
        let mut failures = Vec::new();
        let rank = controllability_rank(&a, &b);
        if rank < n {
            failures.push(format!(
                "(A, B) is not reachable: controllability matrix has rank {rank} < {n}"
            ));
        }
        if !x.is_pc_set(&tol)? {
            failures.push("X must be bounded with the origin in its interior".into());
        }
        let u_pc = u.is_pc_set(&tol)?;
        if !u_pc {
            failures.push("U must be bounded with the origin in its interior".into());
        }
        if u_pc && !u.set_equal(&negate(&u), &tol)? {
            failures.push("U must be symmetric about the origin (U = -U)".into());
        }
        if !(0.0..1.0).contains(&alpha) {
            failures.push(format!("alpha = {alpha} must lie in [0, 1)"));
        }
        if !failures.is_empty() {
            return Err(Error::Validation(failures));
        }
        let x = x.remove_redundancy(&tol)?;
        let u = u.remove_redundancy(&tol)?;
        Ok(Self { a, b, x, u, alpha, tol })
    }

    /// Same system with another attack fraction.
    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&alpha) {
            return Err(Error::Validation(vec![format!("alpha = {alpha} must lie in [0, 1)")]));
        }
        Ok(Self { alpha, ..self.clone() })
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }
    pub fn b(&self) -> &Matrix {
        &self.b
    }
    pub fn x(&self) -> &Polytope {
        &self.x
    }
    pub fn u(&self) -> &Polytope {
        &self.u
    }
    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    /// `E = B`, `W = αU`, defence inputs `(1-α)U`.
    pub fn specialize(&self) -> Result<GeneralSystem> {
        GeneralSystem::new(
            self.a.clone(),
            self.b.clone(),
            self.b.clone(),
            self.x.clone(),
            scale(1.0 - self.alpha, &self.u)?,
            scale(self.alpha, &self.u)?,
            self.tol.clone(),
        )
    }

    /// Spectral data of `A` against `X` and `BU`.
    pub fn spectral(&self) -> Result<SpectralInfo> {
        let bu = linear_image(&self.b, &self.u, &self.tol)?;
        analyze(&self.a, &self.x, &bu, &self.tol)
    }
}

/// Rank of `[B, AB, .., Aⁿ⁻¹B]`.
pub fn controllability_rank(a: &Matrix, b: &Matrix) -> usize {
    let n = a.nrows();
    let m = b.ncols();
    let mut ctrb = Matrix::zeros(n, n * m);
    let mut block = b.clone();
    for k in 0..n {
        ctrb.columns_mut(k * m, m).copy_from(&block);
        block = a * block;
    }
    let sv = ctrb.singular_values();
    let top = sv.iter().copied().fold(0.0, f64::max);
    let cut = 1e-9 * top.max(1.0);
    sv.iter().filter(|&&s| s > cut).count()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExactAlpha {
    /// Midpoint of the final bracket around the critical fraction.
    Critical(f64),
    /// `C_{i*}` stays non-empty up to `α = 1 - tol`.
    Defendable,
}

impl ExactAlpha {
    pub fn value(self) -> Option<f64> {
        match self {
            ExactAlpha::Critical(v) => Some(v),
            ExactAlpha::Defendable => None,
        }
    }
}

impl Serialize for ExactAlpha {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.value().serialize(s)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    /// `None` for the infinite-horizon bound.
    pub istar: Option<usize>,
    pub alpha_bar: Option<f64>,
    /// `alpha_bar < 1`.
    pub conclusive: bool,
    pub exact_alpha: Option<ExactAlpha>,
    pub rho: f64,
    pub h_ratio: Option<f64>,
    pub dominant_real_positive: bool,
    pub support_ok: bool,
    /// Maximum number of steps the state can be kept in `X` when `α`
    /// exceeds the bound.
    pub horizon: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl BoundReport {
    fn from_info(istar: Option<usize>, info: &SpectralInfo) -> Self {
        Self {
            istar,
            alpha_bar: None,
            conclusive: false,
            exact_alpha: None,
            rho: info.rho,
            h_ratio: info.h_ratio,
            dominant_real_positive: info.dominant_real_positive,
            support_ok: info.support_ok,
            horizon: None,
            note: None,
        }
    }
}

/// Upper bound `ᾱ_{i*}` on the smallest `α` for which `C_{i*}` is empty.
pub fn alpha_bound(istar: usize, info: &SpectralInfo, tol: &Tolerances) -> Result<BoundReport> {
    if istar == 0 {
        return Err(Error::Domain("istar must be at least 1".into()));
    }
    let mut report = BoundReport::from_info(Some(istar), info);
    let Some(h) = assumption_ratio(info, &mut report) else {
        return Ok(report);
    };
    let rho = info.rho;
    let i = istar as f64;
    let value = if (rho - 1.0).abs() <= tol.tie {
        (h + i - 1.0) / (2.0 * i - 1.0)
    } else {
        let c = 1.0 + h * (1.0 - rho);
        // for ρ > 1 numerator and denominator are divided by ρ^{i*}
        let (num, den) = if rho < 1.0 {
            let p = rho.powi(istar as i32 - 1);
            (c - p, 2.0 - p - p * rho)
        } else {
            let q = rho.powi(-(istar as i32));
            (c * q - 1.0 / rho, 2.0 * q - 1.0 / rho - 1.0)
        };
        if den.abs() < DENOMINATOR_GUARD {
            report.note = Some(format!("denominator {den:e} too close to zero"));
            return Ok(report);
        }
        num / den
    };
    report.alpha_bar = Some(value);
    report.conclusive = value < 1.0;
    report.horizon = report.conclusive.then(|| istar - 1);
    Ok(report)
}

/// Limit of [`alpha_bound`] as the horizon grows.
pub fn alpha_bound_inf(info: &SpectralInfo, tol: &Tolerances) -> BoundReport {
    let mut report = BoundReport::from_info(None, info);
    let Some(h) = assumption_ratio(info, &mut report) else {
        return report;
    };
    let rho = info.rho;
    let value = if rho < 1.0 - tol.tie {
        (1.0 + h * (1.0 - rho)) / 2.0
    } else {
        1.0 / (1.0 + rho)
    };
    report.alpha_bar = Some(value);
    report.conclusive = value < 1.0;
    report
}

fn assumption_ratio(info: &SpectralInfo, report: &mut BoundReport) -> Option<f64> {
    if !info.dominant_real_positive {
        report.note = Some("dominant eigenvalue is not unique, real and positive".into());
        return None;
    }
    if !info.support_ok {
        report.note = Some("BU has zero support along every dominant eigendirection".into());
        return None;
    }
    info.h_ratio
}

/// `C_{istar}` of the scenario at attack fraction `alpha`.
pub fn admissible_set(sc: &AttackScenario, istar: usize, alpha: f64) -> Result<Polytope> {
    let seq = sc.with_alpha(alpha)?.specialize()?.c_sequence(istar)?;
    Ok(seq.set(istar).expect("c_sequence reaches istar or stops early"))
}

/// Bisection over `α ∈ [0, 1)` for the smallest fraction that empties
/// `C_{istar}`, to bracket width `tol`. Each accepted lower end is checked
/// to contain the sets at larger fractions; a violation is a numerical
/// failure naming both fractions.
pub fn exact_alpha(sc: &AttackScenario, istar: usize, tol: f64) -> Result<ExactAlpha> {
    if istar == 0 {
        return Err(Error::Domain("istar must be at least 1".into()));
    }
    if !(tol > 0.0 && tol < 0.5) {
        return Err(Error::Domain(format!("bisection tolerance {tol} must lie in (0, 0.5)")));
    }
    let t = sc.tolerances();
    let lo_set = admissible_set(sc, istar, 0.0)?;
    if lo_set.is_empty(t)? {
        return Ok(ExactAlpha::Critical(0.0));
    }
    let mut hi = 1.0 - tol;
    let hi_set = admissible_set(sc, istar, hi)?;
    if !hi_set.is_empty(t)? {
        check_nested(&lo_set, &hi_set, 0.0, hi, t)?;
        return Ok(ExactAlpha::Defendable);
    }
    let (mut lo, mut lo_set) = (0.0, lo_set);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let set = admissible_set(sc, istar, mid)?;
        if set.is_empty(t)? {
            hi = mid;
        } else {
            check_nested(&lo_set, &set, lo, mid, t)?;
            lo = mid;
            lo_set = set;
        }
    }
    Ok(ExactAlpha::Critical(0.5 * (lo + hi)))
}

fn check_nested(outer: &Polytope, inner: &Polytope, a_lo: f64, a_hi: f64, t: &Tolerances) -> Result<()> {
    if outer.contains_set(inner, t)? {
        Ok(())
    } else {
        Err(Error::Numerical(format!(
            "admissible set at alpha = {a_hi} is not contained in the set at alpha = {a_lo}"
        )))
    }
}

/// One report per horizon with the closed-form bound and the bisected value.
/// Rows are computed on up to `jobs` threads and returned in input order.
pub fn sweep(
    sc: &AttackScenario,
    istars: &[usize],
    tol: f64,
    jobs: usize,
) -> Result<Vec<BoundReport>> {
    let info = sc.spectral()?;
    let row = |istar: usize| -> Result<BoundReport> {
        let mut r = alpha_bound(istar, &info, sc.tolerances())?;
        r.exact_alpha = Some(exact_alpha(sc, istar, tol)?);
        Ok(r)
    };
    let jobs = jobs.max(1).min(istars.len().max(1));
    if jobs == 1 {
        return istars.iter().map(|&i| row(i)).collect();
    }
    let mut slots: Vec<Option<Result<BoundReport>>> = vec![None; istars.len()];
    let chunk = istars.len().div_ceil(jobs);
    std::thread::scope(|s| {
        for (ids, out) in istars.chunks(chunk).zip(slots.chunks_mut(chunk)) {
            let row = &row;
            s.spawn(move || {
                for (&i, slot) in ids.iter().zip(out.iter_mut()) {
                    *slot = Some(row(i));
                }
            });
        }
    });
    slots.into_iter().map(|s| s.expect("every row filled")).collect()
}
