//! Backward-reachability recursions for `x⁺ = A x + B u + E w` with
//! `(x, u, w) ∈ X × U × W`.

use crate::error::{check_dim, Error, Result};
use crate::geometry::Polytope;
use crate::setops::{
    intersect, intersect_all, linear_image, minkowski_sum, negate, pontryagin_diff, preimage,
    Matrix,
};
use crate::tolerance::Tolerances;

/// Largest step index for which matrix powers `Aⁱ` are formed.
pub const MAX_POWER: usize = 60;

#[derive(Clone, Debug)]
pub struct GeneralSystem {
    a: Matrix,
    b: Matrix,
    e: Matrix,
    x: Polytope,
    u: Polytope,
    w: Polytope,
    ew: Polytope,
    neg_bu: Polytope,
    tol: Tolerances,
}

impl GeneralSystem {
    /// Checks dimensions, that `X` is a PC-set and that `U`, `W` are C-sets.
    pub fn new(
        a: Matrix,
        b: Matrix,
        e: Matrix,
        x: Polytope,
        u: Polytope,
        w: Polytope,
        tol: Tolerances,
    ) -> Result<Self> {
        let n = a.nrows();
        check_dim("A (square)", n, a.ncols())?;
        check_dim("B rows", n, b.nrows())?;
        check_dim("E rows", n, e.nrows())?;
        check_dim("X dimension", n, x.dim())?;
        check_dim("U dimension", b.ncols(), u.dim())?;
        check_dim("W dimension", e.ncols(), w.dim())?;
        let mut failures = Vec::new();
        if !x.is_pc_set(&tol)? {
            failures.push("X must be bounded with the origin in its interior".to_string());
        }
        if !u.is_c_set(&tol)? {
            failures.push("U must be bounded and contain the origin".to_string());
        }
        if !w.is_c_set(&tol)? {
            failures.push("W must be bounded and contain the origin".to_string());
        }
        if !failures.is_empty() {
            return Err(Error::Validation(failures));
        }
        let x = x.remove_redundancy(&tol)?;
        let ew = linear_image(&e, &w, &tol)?;
        let neg_bu = negate(&linear_image(&b, &u, &tol)?);
        Ok(Self { a, b, e, x, u, w, ew, neg_bu, tol })
    }

    pub fn dim(&self) -> usize {
        self.a.nrows()
    }
    pub fn a(&self) -> &Matrix {
        &self.a
    }
    pub fn b(&self) -> &Matrix {
        &self.b
    }
    pub fn e(&self) -> &Matrix {
        &self.e
    }
    pub fn x(&self) -> &Polytope {
        &self.x
    }
    pub fn u(&self) -> &Polytope {
        &self.u
    }
    pub fn w(&self) -> &Polytope {
        &self.w
    }
    /// `E W`.
    pub fn ew(&self) -> &Polytope {
        &self.ew
    }
    /// `-B U`.
    pub fn neg_bu(&self) -> &Polytope {
        &self.neg_bu
    }
    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    /// `Q(Y) = A⁻¹((Y ⊖ EW) ⊕ (-BU))`, not intersected with `X`; usually unbounded.
    pub fn q_operator(&self, y: &Polytope) -> Result<Polytope> {
        check_dim("q_operator", self.dim(), y.dim())?;
        if y.is_empty(&self.tol)? {
            return Ok(Polytope::empty(self.dim()));
        }
        let eroded = pontryagin_diff(y, &self.ew, &self.tol)?;
        if eroded.is_empty(&self.tol)? {
            return Ok(Polytope::empty(self.dim()));
        }
        let grown = minkowski_sum(&eroded, &self.neg_bu, &self.tol)?;
        preimage(&self.a, &grown)
    }

    /// `Q(Y) ∩ X`.
    pub fn step(&self, y: &Polytope) -> Result<Polytope> {
        intersect(&self.q_operator(y)?, &self.x, &self.tol)
    }

    /// `C_0 = X`, `C_{i+1} = Q(C_i) ∩ X`, up to `imax` steps or the first
    /// empty set or fixpoint. A non-nested step is reported as a numerical
    /// failure.
    pub fn c_sequence(&self, imax: usize) -> Result<ReachSequence> {
        let mut seq = ReachSequence::start(SequenceKind::C, self.x.clone());
        for i in 0..imax {
            let cur = &seq.sets[i];
            let next = self.step(cur)?;
            if next.is_empty(&self.tol)? {
                seq.push_empty(self.dim());
                break;
            }
            if !cur.contains_set(&next, &self.tol)? {
                return Err(Error::Numerical(format!("C_{} is not contained in C_{i}", i + 1)));
            }
            let fixed = next.contains_set(cur, &self.tol)?;
            seq.sets.push(next);
            if fixed {
                seq.fixpoint_at = Some(i);
                break;
            }
        }
        Ok(seq)
    }

    /// `T_0 = X`, `T_{i+1} = (T_i ⊖ AⁱEW) ⊕ Aⁱ(-BU)`.
    pub fn t_sequence(&self, imax: usize) -> Result<ReachSequence> {
        let powers = self.powers(imax)?;
        let mut seq = ReachSequence::start(SequenceKind::T, self.x.clone());
        for (i, ai) in powers.iter().enumerate().take(imax) {
            let eroded = pontryagin_diff(&seq.sets[i], &linear_image(ai, &self.ew, &self.tol)?, &self.tol)?;
            if eroded.is_empty(&self.tol)? {
                seq.push_empty(self.dim());
                break;
            }
            let next = minkowski_sum(&eroded, &linear_image(ai, &self.neg_bu, &self.tol)?, &self.tol)?;
            seq.sets.push(next);
        }
        Ok(seq)
    }

    /// `⋂_{j=0}^{i} (Aʲ)⁻¹ T_j`, an outer approximation of `C_i`.
    pub fn outer_bound(&self, i: usize) -> Result<Polytope> {
        let t = self.t_sequence(i)?;
        let powers = self.powers(i)?;
        let mut parts = Vec::with_capacity(i + 1);
        for (j, aj) in powers.iter().enumerate() {
            let tj = t.set(j).expect("t_sequence covers every index up to i");
            if tj.is_empty(&self.tol)? {
                return Ok(Polytope::empty(self.dim()));
            }
            parts.push(preimage(aj, &tj)?);
        }
        intersect_all(self.dim(), parts.iter(), &self.tol)
    }

    /// `S_i = X ⊕ [⊕_{j=0}^{i-2} AʲB(-U)] ⊖ [⊕_{j=0}^{i-1} AʲEW]`; `S_0 = X`.
    pub fn s_set(&self, i: usize) -> Result<Polytope> {
        let seq = self.s_sequence(i)?;
        Ok(seq.set(i).expect("s_sequence covers index i"))
    }

    /// `S_0, .., S_imax`. Both brackets are accumulated incrementally and each
    /// `S_i` takes one Pontryagin difference. Emptiness does not propagate
    /// between terms, so `empty_at` records the first empty `S_i` but the
    /// remaining sets are still computed.
    pub fn s_sequence(&self, imax: usize) -> Result<ReachSequence> {
        let powers = self.powers(imax)?;
        let mut grown = self.x.clone();
        let mut dist = Polytope::origin(self.dim());
        let mut seq = ReachSequence::start(SequenceKind::S, self.x.clone());
        for i in 1..=imax {
            if i >= 2 {
                let term = linear_image(&powers[i - 2], &self.neg_bu, &self.tol)?;
                grown = minkowski_sum(&grown, &term, &self.tol)?;
            }
            let term = linear_image(&powers[i - 1], &self.ew, &self.tol)?;
            dist = minkowski_sum(&dist, &term, &self.tol)?;
            let s = pontryagin_diff(&grown, &dist, &self.tol)?;
            if s.is_empty(&self.tol)? && seq.empty_at.is_none() {
                seq.empty_at = Some(i);
            }
            seq.sets.push(s);
        }
        seq.complete = true;
        Ok(seq)
    }

    /// `R_i = ⊕_{j=0}^{i-1} AʲEW`; `R_0 = {0}`.
    pub fn r_set(&self, i: usize) -> Result<Polytope> {
        Ok(self.r_sequence(i)?.sets.pop().expect("non-empty sequence"))
    }

    pub fn r_sequence(&self, imax: usize) -> Result<ReachSequence> {
        let powers = self.powers(imax)?;
        let mut seq = ReachSequence::start(SequenceKind::R, Polytope::origin(self.dim()));
        for (j, aj) in powers.iter().enumerate().take(imax) {
            let term = linear_image(aj, &self.ew, &self.tol)?;
            let next = minkowski_sum(&seq.sets[j], &term, &self.tol)?;
            seq.sets.push(next);
        }
        seq.complete = true;
        Ok(seq)
    }

    /// Closed form of `C_i` without inputs: `⋂_{j=0}^{i} (Aʲ)⁻¹(X ⊖ R_j)`
    /// with [`ErosionIndex::PerTerm`], or with `R_i` in every term for
    /// [`ErosionIndex::Fixed`].
    pub fn autonomous_admissible_set(&self, i: usize, index: ErosionIndex) -> Result<Polytope> {
        let r = self.r_sequence(i)?;
        let powers = self.powers(i)?;
        let mut parts = Vec::with_capacity(i + 1);
        for (j, aj) in powers.iter().enumerate() {
            let rj = match index {
                ErosionIndex::PerTerm => &r.sets[j],
                ErosionIndex::Fixed => &r.sets[i],
            };
            let eroded = pontryagin_diff(&self.x, rj, &self.tol)?;
            if eroded.is_empty(&self.tol)? {
                return Ok(Polytope::empty(self.dim()));
            }
            parts.push(preimage(aj, &eroded)?);
        }
        intersect_all(self.dim(), parts.iter(), &self.tol)
    }

    /// `C ⊆ Q(C) ∩ X`.
    pub fn is_rci(&self, c: &Polytope) -> Result<bool> {
        check_dim("is_rci", self.dim(), c.dim())?;
        self.step(c)?.contains_set(c, &self.tol)
    }

    /// `[I, A, .., Aᵏ]`.
    fn powers(&self, k: usize) -> Result<Vec<Matrix>> {
        matrix_powers(&self.a, k)
    }
}

pub(crate) fn matrix_powers(a: &Matrix, k: usize) -> Result<Vec<Matrix>> {
    if k > MAX_POWER {
        return Err(Error::Unsupported(format!(
            "step index {k} exceeds the matrix-power limit {MAX_POWER}"
        )));
    }
    let n = a.nrows();
    let mut out = Vec::with_capacity(k + 1);
    out.push(Matrix::identity(n, n));
    for j in 0..k {
        let next = a * &out[j];
        if next.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numerical(format!("A^{} overflowed", j + 1)));
        }
        out.push(next);
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErosionIndex {
    PerTerm,
    Fixed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SequenceKind {
    C,
    T,
    S,
    R,
}

impl SequenceKind {
    pub fn label(self) -> &'static str {
        match self {
            SequenceKind::C => "C",
            SequenceKind::T => "T",
            SequenceKind::S => "S",
            SequenceKind::R => "R",
        }
    }
}

#[derive(Clone, Debug)]
pub struct ReachSequence {
    pub kind: SequenceKind,
    pub sets: Vec<Polytope>,
    /// First index whose set is empty.
    pub empty_at: Option<usize>,
    /// Index `i` with `sets[i + 1] == sets[i]`.
    pub fixpoint_at: Option<usize>,
    /// Every requested index was computed (no early stop).
    complete: bool,
}

impl ReachSequence {
    fn start(kind: SequenceKind, first: Polytope) -> Self {
        Self { kind, sets: vec![first], empty_at: None, fixpoint_at: None, complete: false }
    }

    fn push_empty(&mut self, dim: usize) {
        self.empty_at = Some(self.sets.len());
        self.sets.push(Polytope::empty(dim));
    }

    /// Set `i`, extended past an early stop: empty after emptiness (for the
    /// C and T chains), constant after a fixpoint.
    pub fn set(&self, i: usize) -> Option<Polytope> {
        if let Some(s) = self.sets.get(i) {
            return Some(s.clone());
        }
        if self.complete {
            return None;
        }
        if self.empty_at.is_some() {
            return self.sets.last().map(|s| Polytope::empty(s.dim()));
        }
        if self.fixpoint_at.is_some() {
            return self.sets.last().cloned();
        }
        None
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }
}
