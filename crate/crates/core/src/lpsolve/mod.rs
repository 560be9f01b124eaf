//! Exact rational primal simplex (two phases, Bland's rule, bounded variables).

mod simplex;

use crate::exactla::{dot, Rat, RatMatrix};

pub use simplex::BoundedLp;

/// `min cᵀx` subject to `eq·x = eq_rhs`, `ineq·x <= ineq_rhs`; variables are free.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearProgram {
    pub eq: RatMatrix,
    pub eq_rhs: Vec<Rat>,
    pub ineq: RatMatrix,
    pub ineq_rhs: Vec<Rat>,
    pub c: Vec<Rat>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed linear program: {0}")]
pub struct ShapeError(pub String);

impl LinearProgram {
    pub fn new(
        eq: RatMatrix,
        eq_rhs: Vec<Rat>,
        ineq: RatMatrix,
        ineq_rhs: Vec<Rat>,
        c: Vec<Rat>,
    ) -> Result<LinearProgram, ShapeError> {
        let n = c.len();
        if eq.cols() != n || ineq.cols() != n {
            return Err(ShapeError(format!(
                "column counts {}/{} differ from objective length {n}",
                eq.cols(),
                ineq.cols()
            )));
        }
        if eq.rows() != eq_rhs.len() || ineq.rows() != ineq_rhs.len() {
            return Err(ShapeError("right-hand side length mismatch".into()));
        }
        Ok(LinearProgram { eq, eq_rhs, ineq, ineq_rhs, c })
    }

    pub fn n(&self) -> usize {
        self.c.len()
    }

    pub fn with_objective(&self, c: Vec<Rat>) -> LinearProgram {
        assert_eq!(c.len(), self.n());
        LinearProgram { c, ..self.clone() }
    }

    /// Exact membership test for the feasible region.
    pub fn contains(&self, x: &[Rat]) -> bool {
        (0..self.eq.rows()).all(|i| dot(self.eq.row(i), x) == self.eq_rhs[i])
            && (0..self.ineq.rows()).all(|i| dot(self.ineq.row(i), x) <= self.ineq_rhs[i])
    }

    pub fn objective(&self, x: &[Rat]) -> Rat {
        dot(&self.c, x)
    }
}

/// A linear program whose variables are all required to be integers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegerProgram {
    pub lp: LinearProgram,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpOutcome {
    pub status: LpStatus,
    pub value: Option<Rat>,
    pub point: Option<Vec<Rat>>,
}

pub fn solve(lp: &LinearProgram) -> LpOutcome {
    BoundedLp::from_lp(lp).solve(&lp.c)
}

/// Phase 1 only.
pub fn is_feasible(lp: &LinearProgram) -> bool {
    BoundedLp::from_lp(lp).is_feasible()
}

/// Some feasible point (a vertex found by phase 1), if any.
pub fn feasible_point(lp: &LinearProgram) -> Option<Vec<Rat>> {
    BoundedLp::from_lp(lp).feasible_point()
}
