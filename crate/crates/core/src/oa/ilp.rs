use super::{index_levels, subsets, OASpec, OaError};
use crate::exactla::{dot, rref, Rat, RatMatrix};
use crate::lpsolve::{IntegerProgram, LinearProgram};

/// All tuples over `0..base` of length `len`, lexicographic.
fn tuples(base: usize, len: usize) -> Vec<Vec<usize>> {
    (0..base.pow(len as u32)).map(|i| index_levels(i, base, len)).collect()
}

/// Rows `-x_i <= 0` for all `i`, then `x_i <= p_max` for all `i`.
fn box_rows(n: usize, p_max: u64) -> (RatMatrix, Vec<Rat>) {
    let mut m = RatMatrix::zeros(2 * n, n);
    let mut d = Vec::with_capacity(2 * n);
    for i in 0..n {
        m[(i, i)] = Rat::from_int(-1);
        d.push(Rat::zero());
    }
    for i in 0..n {
        m[(n + i, i)] = Rat::one();
        d.push(Rat::from(p_max as usize));
    }
    (m, d)
}

/// Rows summing the frequencies whose levels at `cols` equal `tuple`.
fn marginal_row(spec: &OASpec, cols: &[usize], tuple: &[usize]) -> Vec<Rat> {
    (0..spec.n_vars())
        .map(|i| {
            let l = index_levels(i, spec.s, spec.k);
            if cols.iter().zip(tuple).all(|(&c, &a)| l[c] == a) {
                Rat::one()
            } else {
                Rat::zero()
            }
        })
        .collect()
}

fn q(v: u64) -> Rat {
    Rat::from(v as usize)
}

/// One equality per `t`-subset of columns and `t`-tuple of levels, each
/// requiring `λ` matching runs; `0 <= x <= p_max`; objective `1ᵀx`.
pub fn build_ilp_bf(spec: &OASpec) -> Result<IntegerProgram, OaError> {
    spec.check_buildable()?;
    let n = spec.n_vars();
    let mut eq = RatMatrix::zeros(0, n);
    let mut b = Vec::new();
    for cols in subsets(spec.k, spec.t) {
        for tup in tuples(spec.s, spec.t) {
            eq.push_row(marginal_row(spec, &cols, &tup));
            b.push(q(spec.lambda));
        }
    }
    let (ineq, d) = box_rows(n, spec.p_max);
    let lp = LinearProgram::new(eq, b, ineq, d, vec![Rat::one(); n]).expect("consistent shapes");
    Ok(IntegerProgram { lp })
}

/// Linearly independent marginal equalities: for each `q <= t`, each
/// `q`-subset and each tuple over `0..s-1` (symbol `s-1` omitted), with
/// right-hand side `N / s^q`. Adds `x_0 >= 1` after the box rows; objective 0.
pub fn build_ilp_improved(spec: &OASpec) -> Result<IntegerProgram, OaError> {
    spec.check_buildable()?;
    let n = spec.n_vars();
    let mut eq = RatMatrix::zeros(0, n);
    let mut b = Vec::new();
    for qq in 0..=spec.t {
        let rhs = spec.n_runs / (spec.s as u64).pow(qq as u32);
        for cols in subsets(spec.k, qq) {
            for tup in tuples(spec.s - 1, qq) {
                eq.push_row(marginal_row(spec, &cols, &tup));
                b.push(q(rhs));
            }
        }
    }
    let rank = rref(&eq, None).1.len();
    if rank != eq.rows() {
        return Err(OaError::InvalidSpec(format!("improved equality system has rank {rank} < {} rows", eq.rows())));
    }
    let (mut ineq, mut d) = box_rows(n, spec.p_max);
    let mut cut = vec![Rat::zero(); n];
    cut[0] = Rat::from_int(-1);
    ineq.push_row(cut);
    d.push(Rat::from_int(-1));
    let lp = LinearProgram::new(eq, b, ineq, d, vec![Rat::zero(); n]).expect("consistent shapes");
    Ok(IntegerProgram { lp })
}

/// Sign vector `z_ℓ` over all runs: product of the ±1 codes of the columns in ℓ.
pub(crate) fn hadamard_row(k: usize, cols: &[usize]) -> Vec<Rat> {
    (0..1usize << k)
        .map(|i| {
            let l = index_levels(i, 2, k);
            let ones = cols.iter().filter(|&&c| l[c] == 1).count();
            Rat::from_int(if ones % 2 == 0 { 1 } else { -1 })
        })
        .collect()
}

/// `1ᵀx = N`, `Mx = 0`, `-Mx = 0` where the rows of `M` are `z_ℓ` for
/// `1 <= |ℓ| <= t`; `0 <= x <= p_max`; objective `1ᵀx`.
pub fn build_ilp_jform(spec: &OASpec) -> Result<IntegerProgram, OaError> {
    if spec.s != 2 {
        return Err(OaError::NotBinary);
    }
    spec.check_buildable()?;
    let n = spec.n_vars();
    let mut m_rows = Vec::new();
    for r in 1..=spec.t {
        for cols in subsets(spec.k, r) {
            m_rows.push(hadamard_row(spec.k, &cols));
        }
    }
    let mut eq = RatMatrix::zeros(0, n);
    let mut b = Vec::new();
    eq.push_row(vec![Rat::one(); n]);
    b.push(q(spec.n_runs));
    for sign in [1, -1] {
        for row in &m_rows {
            eq.push_row(row.iter().map(|v| v * &Rat::from_int(sign)).collect());
            b.push(Rat::zero());
        }
    }
    let (ineq, d) = box_rows(n, spec.p_max);
    let lp = LinearProgram::new(eq, b, ineq, d, vec![Rat::one(); n]).expect("consistent shapes");
    Ok(IntegerProgram { lp })
}

/// Inequality-only form obtained by solving the equalities for their RREF
/// basic variables and substituting them into every inequality.
#[derive(Debug, Clone)]
pub struct Elimination {
    pub ilp: IntegerProgram,
    pub free_vars: Vec<usize>,
    pub basic_vars: Vec<usize>,
    /// Row `i`: `x_{basic_vars[i]} = basic_rhs[i] - Σ_j basic_coef[i][j] x̂_j`.
    pub basic_coef: Vec<Vec<Rat>>,
    pub basic_rhs: Vec<Rat>,
}

impl Elimination {
    /// Full variable vector from values of the free variables.
    pub fn reconstruct(&self, xhat: &[Rat]) -> Vec<Rat> {
        let n = self.free_vars.len() + self.basic_vars.len();
        let mut x = vec![Rat::zero(); n];
        for (j, &v) in self.free_vars.iter().enumerate() {
            x[v] = xhat[j].clone();
        }
        for (i, &v) in self.basic_vars.iter().enumerate() {
            x[v] = &self.basic_rhs[i] - &dot(&self.basic_coef[i], xhat);
        }
        x
    }
}

/// Fails unless every substituted coefficient and right-hand side is an
/// integer, so that integral free variables give integral basic ones.
pub fn eliminate_basic_variables(ilp: &IntegerProgram) -> Result<Elimination, OaError> {
    let lp = &ilp.lp;
    let n = lp.n();
    let rhs = RatMatrix::from_rows(lp.eq_rhs.iter().map(|v| vec![v.clone()]).collect(), 1);
    let (r, pivots) = rref(&lp.eq, Some(&rhs));
    if pivots.contains(&n) {
        return Err(OaError::InvalidSpec("equality system is inconsistent".into()));
    }
    let basic_vars = pivots.clone();
    let free_vars: Vec<usize> = (0..n).filter(|j| !pivots.contains(j)).collect();
    let basic_coef: Vec<Vec<Rat>> =
        (0..pivots.len()).map(|i| free_vars.iter().map(|&j| r[(i, j)].clone()).collect()).collect();
    let basic_rhs: Vec<Rat> = (0..pivots.len()).map(|i| r[(i, n)].clone()).collect();
    if basic_coef.iter().flatten().chain(&basic_rhs).any(|v| !v.is_integer()) {
        return Err(OaError::InvalidSpec("elimination has non-integral coefficients".into()));
    }
    let nf = free_vars.len();
    let mut ineq = RatMatrix::zeros(0, nf);
    let mut d = Vec::new();
    for i in 0..lp.ineq.rows() {
        let row = lp.ineq.row(i);
        let mut coef: Vec<Rat> = free_vars.iter().map(|&j| row[j].clone()).collect();
        let mut rhs_i = lp.ineq_rhs[i].clone();
        for (bi, &bv) in basic_vars.iter().enumerate() {
            let a = &row[bv];
            if a.is_zero() {
                continue;
            }
            for (j, c) in coef.iter_mut().enumerate() {
                *c -= &(a * &basic_coef[bi][j]);
            }
            rhs_i -= &(a * &basic_rhs[bi]);
        }
        if coef.iter().all(|c| c.is_zero()) {
            if rhs_i.is_negative() {
                return Err(OaError::InvalidSpec("eliminated system is infeasible".into()));
            }
            continue;
        }
        ineq.push_row(coef);
        d.push(rhs_i);
    }
    let mut c: Vec<Rat> = free_vars.iter().map(|&j| lp.c[j].clone()).collect();
    for (bi, &bv) in basic_vars.iter().enumerate() {
        for (j, cj) in c.iter_mut().enumerate() {
            *cj -= &(&lp.c[bv] * &basic_coef[bi][j]);
        }
    }
    let reduced = LinearProgram::new(RatMatrix::zeros(0, nf), vec![], ineq, d, c).expect("consistent shapes");
    Ok(Elimination { ilp: IntegerProgram { lp: reduced }, free_vars, basic_vars, basic_coef, basic_rhs })
}
