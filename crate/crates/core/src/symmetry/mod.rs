//! Symmetry groups of a standard-form LP `min cᵀx, Ax = b, Bx <= d`.
//!
//! Four nested groups are available:
//! the formulation group `G(A,b,B,d,c)`, the c-preserving symmetry group
//! `G^LP_c`, the full symmetry group `G^LP`, and the outer bound `G^Null`
//! (permutations preserving `Row(A)`, the facet inequalities and `c`).
//! `G(A,b,B,d,c) <= G^LP_c <= G^Null` and `G^LP_c <= G^LP`.

use std::fmt;

use crate::cgraph::{automorphisms, cost_colors, formulation_group, graph_from_matrix};
use crate::exactla::{particular_solution, row_space_projector, rref, Rat, RatMatrix};
use crate::lpsolve::{feasible_point, LinearProgram};
use crate::permgrp::{double_cosets, intersect, Perm, PermGroup, PermGroupError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SymmetryError {
    #[error("LP is not in standard form: {0}")]
    NotStandardForm(String),
    #[error("double coset enumeration exceeded the cap of {cap} group elements")]
    CosetCap { cap: usize },
    #[error(transparent)]
    Group(#[from] PermGroupError),
}

/// Which group a [`SymmetryResult`] certifies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Tier {
    Formulation,
    Null,
    LpC,
    Lp,
}

impl fmt::Display for Tier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Tier::Formulation => "formulation",
            Tier::Null => "null",
            Tier::LpC => "lp_c",
            Tier::Lp => "lp",
        })
    }
}

/// A group plus the Fix-space feasible points that justified accepting it
/// (one per accepted Fix-space LP).
#[derive(Debug, Clone)]
pub struct SymmetryResult {
    pub group: PermGroup,
    pub tier: Tier,
    pub certificates: Vec<Vec<Rat>>,
}

/// `cᵀx = c_hatᵀ x̂ + a` on `Ax = b`, where `x̂` are the non-basic
/// variables `free_vars` of the RREF of `[A | b]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedObjective {
    pub c_hat: Vec<Rat>,
    pub a: Rat,
    pub free_vars: Vec<usize>,
}

#[derive(Debug, Clone, Copy)]
pub struct SymmetryOptions {
    /// Maximum number of group elements enumerated for a double coset
    /// decomposition.
    pub coset_cap: usize,
}

impl Default for SymmetryOptions {
    fn default() -> Self {
        SymmetryOptions { coset_cap: 500_000 }
    }
}

fn check_standard(l: &LinearProgram) -> Result<(), SymmetryError> {
    let rank = l.eq.rank();
    if rank != l.eq.rows() {
        return Err(SymmetryError::NotStandardForm(format!(
            "equality matrix has rank {rank} but {} rows",
            l.eq.rows()
        )));
    }
    Ok(())
}

/// Inequalities rewritten so that equivalent facets on the affine hull
/// `Ax = b` get identical rows: `β ↦ (I - P)β`, the right-hand side shifted
/// by the constant `(Pβ)ᵀx` and the row scaled to max-norm 1.
pub fn canonical_inequalities(l: &LinearProgram) -> Result<LinearProgram, SymmetryError> {
    check_standard(l)?;
    let n = l.n();
    let p = row_space_projector(&l.eq).map_err(|e| SymmetryError::NotStandardForm(e.to_string()))?;
    let x0 = particular_solution(&l.eq, &l.eq_rhs)
        .ok_or_else(|| SymmetryError::NotStandardForm("equalities are inconsistent".into()))?;
    let mut rows = RatMatrix::zeros(0, n);
    let mut rhs = Vec::with_capacity(l.ineq.rows());
    for i in 0..l.ineq.rows() {
        let beta = l.ineq.row(i);
        let along = p.mul_vec(beta);
        let perp: Vec<Rat> = beta.iter().zip(&along).map(|(b, q)| b - q).collect();
        let scale = perp.iter().map(Rat::abs).max().unwrap_or_else(Rat::zero);
        if scale.is_zero() {
            return Err(SymmetryError::NotStandardForm(format!("inequality {i} is constant on the affine hull")));
        }
        let shift = crate::exactla::dot(&along, &x0);
        let inv = scale.recip();
        rows.push_row(perp.iter().map(|v| v * &inv).collect());
        rhs.push(&(&l.ineq_rhs[i] - &shift) * &inv);
    }
    Ok(LinearProgram::new(RatMatrix::zeros(0, n), vec![], rows, rhs, l.c.clone()).expect("shapes"))
}

/// `G^Null`: automorphisms of the row-space projector (vertices colored by
/// `c`) intersected with the formulation group of the canonical facet rows.
pub fn g_null(l: &LinearProgram) -> Result<PermGroup, SymmetryError> {
    let canon = canonical_inequalities(l)?;
    let p = row_space_projector(&l.eq).map_err(|e| SymmetryError::NotStandardForm(e.to_string()))?;
    let graph = graph_from_matrix(&p, &cost_colors(&l.c)).expect("projector is square and symmetric");
    let h = automorphisms(&graph).group(l.n());
    let f = formulation_group(&canon);
    Ok(intersect(&h, &f)?)
}

/// The Fix-space LP of `h`: `l` with `(I - E)x = 0` appended, `E` the orbit
/// projector of `h`.
pub fn fix_lp(l: &LinearProgram, h: &PermGroup) -> LinearProgram {
    let n = l.n();
    let e = crate::permgrp::orbit_projector(h);
    let ie = RatMatrix::identity(n).sub(&e);
    let mut out = l.clone();
    for i in 0..n {
        if ie.row(i).iter().any(|v| !v.is_zero()) {
            out.eq.push_row(ie.row(i).to_vec());
            out.eq_rhs.push(Rat::zero());
        }
    }
    out
}

/// A feasible point of `l` constant on the orbits of `h`, if any. Solves the
/// orbit-aggregated LP, which has the same solutions as [`fix_lp`] mapped
/// through `y ↦ (y_{orbit(i)})_i`.
pub fn fix_point(l: &LinearProgram, h: &PermGroup) -> Option<Vec<Rat>> {
    let n = l.n();
    let orbits = h.orbits();
    let mut which = vec![0usize; n];
    for (o, orb) in orbits.iter().enumerate() {
        for &i in orb {
            which[i] = o;
        }
    }
    let collapse = |m: &RatMatrix| {
        let mut out = RatMatrix::zeros(m.rows(), orbits.len());
        for i in 0..m.rows() {
            for j in 0..n {
                if !m[(i, j)].is_zero() {
                    let cur = out[(i, which[j])].clone();
                    out[(i, which[j])] = &cur + &m[(i, j)];
                }
            }
        }
        out
    };
    let small = LinearProgram::new(
        collapse(&l.eq),
        l.eq_rhs.clone(),
        collapse(&l.ineq),
        l.ineq_rhs.clone(),
        vec![Rat::zero(); orbits.len()],
    )
    .expect("shapes");
    let y = feasible_point(&small)?;
    Some((0..n).map(|i| y[which[i]].clone()).collect())
}

/// `G^LP_c`, the largest c-preserving subgroup of `G^LP`.
///
/// Accepts `G^Null` outright when its Fix space meets the feasible set.
/// Otherwise starts from the formulation group and walks the double cosets of
/// `G^Null` over it, keeping each extension whose Fix space is feasible.
pub fn g_lp_c(l: &LinearProgram, opts: &SymmetryOptions) -> Result<SymmetryResult, SymmetryError> {
    let null = g_null(l)?;
    if let Some(x) = fix_point(l, &null) {
        return Ok(SymmetryResult { group: null, tier: Tier::LpC, certificates: vec![x] });
    }
    let mut h = formulation_group(l);
    debug_assert!(h.is_subgroup_of(&null));
    let mut certificates = Vec::new();
    let reps = double_cosets(&null, &h, opts.coset_cap).map_err(|e| match e {
        PermGroupError::TooLarge { .. } => SymmetryError::CosetCap { cap: opts.coset_cap },
        e => SymmetryError::Group(e),
    })?;
    for dc in reps {
        let g = dc.representative;
        if h.contains(&g) {
            continue;
        }
        let ext = h.extended(std::slice::from_ref(&g))?;
        if let Some(x) = fix_point(l, &ext) {
            h = ext;
            certificates.push(x);
        }
    }
    Ok(SymmetryResult { group: h, tier: Tier::LpC, certificates })
}

/// Substitutes the RREF basic-variable expressions into `cᵀx`, or into
/// `cᵀg(x) = (g⁻¹c)ᵀx` when `perm` is given.
pub fn reduce_objective(l: &LinearProgram, perm: Option<&Perm>) -> ReducedObjective {
    let n = l.n();
    let c: Vec<Rat> = match perm {
        Some(g) => (0..n).map(|i| l.c[g.apply(i)].clone()).collect(),
        None => l.c.clone(),
    };
    let rhs = RatMatrix::from_rows(l.eq_rhs.iter().map(|v| vec![v.clone()]).collect(), 1);
    let (r, pivots) = rref(&l.eq, Some(&rhs));
    let pivots: Vec<usize> = pivots.into_iter().filter(|&p| p < n).collect();
    let free_vars: Vec<usize> = (0..n).filter(|j| !pivots.contains(j)).collect();
    let mut a = Rat::zero();
    let mut c_hat: Vec<Rat> = free_vars.iter().map(|&j| c[j].clone()).collect();
    for (i, &p) in pivots.iter().enumerate() {
        let cp = &c[p];
        if cp.is_zero() {
            continue;
        }
        a += &(cp * &r[(i, n)]);
        for (k, &j) in free_vars.iter().enumerate() {
            c_hat[k] -= &(cp * &r[(i, j)]);
        }
    }
    ReducedObjective { c_hat, a, free_vars }
}

/// `G^LP`: `G^LP_c` extended by every double coset representative of the
/// feasible-set group whose reduced objective matches the original one.
pub fn g_lp(l: &LinearProgram, opts: &SymmetryOptions) -> Result<SymmetryResult, SymmetryError> {
    let zero = l.with_objective(vec![Rat::zero(); l.n()]);
    let (with_c, feas) = rayon::join(|| g_lp_c(l, opts), || g_lp_c(&zero, opts));
    let (with_c, feas) = (with_c?, feas?);
    let mut certificates = with_c.certificates;
    certificates.extend(feas.certificates);
    let mut g = with_c.group;
    if g.order() != feas.group.order() {
        let base = reduce_objective(l, None);
        let reps = double_cosets(&feas.group, &g, opts.coset_cap).map_err(|e| match e {
            PermGroupError::TooLarge { .. } => SymmetryError::CosetCap { cap: opts.coset_cap },
            e => SymmetryError::Group(e),
        })?;
        for dc in reps {
            let gi = dc.representative;
            if !g.contains(&gi) && reduce_objective(l, Some(&gi)) == base {
                g = g.extended(std::slice::from_ref(&gi))?;
            }
        }
    }
    Ok(SymmetryResult { group: g, tier: Tier::Lp, certificates })
}
