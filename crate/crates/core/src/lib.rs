//! Exact symmetry groups of linear programs and their use in classifying
//! orthogonal arrays by branch-and-bound with isomorphism pruning.

pub mod cgraph;
pub mod classify;
pub mod exactla;
pub mod lpsolve;
pub mod oa;
pub mod permgrp;
pub mod stdform;
pub mod symmetry;
