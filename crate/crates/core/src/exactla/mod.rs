//! Exact rational scalars and dense matrices.

mod matrix;
mod rat;

pub use matrix::{
    dot, independent_rows, particular_solution, row_space_projector, rref, solve_square, LinAlgError, RatMatrix,
};
pub use rat::{denominator_lcm, ParseRatError, Rat};
