//! Standard form: implicit equalities promoted, redundant inequalities and
//! dependent equalities removed.

use crate::exactla::{independent_rows, Rat, RatMatrix};
use crate::lpsolve::{BoundedLp, LinearProgram, LpStatus};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StdFormError {
    #[error("input LP is infeasible")]
    InfeasibleInput,
}

/// Result of a standardization pass.
///
/// `promoted_rows` and `dropped_inequalities` are indices into the input's
/// inequality rows. `dropped_equalities` indexes the equality list after
/// promotion: the input's equality rows followed by the promoted rows in
/// `promoted_rows` order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StandardFormReport {
    pub lp: LinearProgram,
    pub promoted_rows: Vec<usize>,
    pub dropped_inequalities: Vec<usize>,
    pub dropped_equalities: Vec<usize>,
}

impl StandardFormReport {
    fn unchanged(lp: LinearProgram) -> StandardFormReport {
        StandardFormReport { lp, promoted_rows: vec![], dropped_inequalities: vec![], dropped_equalities: vec![] }
    }

    pub fn is_identity(&self) -> bool {
        self.promoted_rows.is_empty() && self.dropped_inequalities.is_empty() && self.dropped_equalities.is_empty()
    }
}

fn neg(v: &[Rat]) -> Vec<Rat> {
    v.iter().map(|x| -x).collect()
}

/// Promotes every inequality that all feasible points satisfy with equality.
/// Promoted rows are appended to the equalities from the highest row index
/// down.
pub fn find_implicit_equalities(l: &LinearProgram) -> Result<StandardFormReport, StdFormError> {
    let base = BoundedLp::from_lp(l);
    if !base.is_feasible() {
        return Err(StdFormError::InfeasibleInput);
    }
    let mut tight = vec![false; l.ineq.rows()];
    for (i, t) in tight.iter_mut().enumerate() {
        let out = base.solve(l.ineq.row(i));
        *t = out.status == LpStatus::Optimal && out.value.as_ref() == Some(&l.ineq_rhs[i]);
    }
    let promoted: Vec<usize> = (0..tight.len()).rev().filter(|&i| tight[i]).collect();
    if promoted.is_empty() {
        return Ok(StandardFormReport::unchanged(l.clone()));
    }
    let mut eq = l.eq.clone();
    let mut eq_rhs = l.eq_rhs.clone();
    for &i in &promoted {
        eq.push_row(l.ineq.row(i).to_vec());
        eq_rhs.push(l.ineq_rhs[i].clone());
    }
    let kept: Vec<usize> = (0..tight.len()).filter(|&i| !tight[i]).collect();
    let lp = LinearProgram {
        eq,
        eq_rhs,
        ineq: l.ineq.select_rows(&kept),
        ineq_rhs: kept.iter().map(|&i| l.ineq_rhs[i].clone()).collect(),
        c: l.c.clone(),
    };
    Ok(StandardFormReport { lp, promoted_rows: promoted, ..StandardFormReport::unchanged(l.clone()) })
}

/// Drops each inequality implied by the equalities and the inequalities still
/// present. Rows are visited from the highest index down, so of two rows
/// describing the same facet the lower-indexed one survives.
pub fn remove_redundant_inequalities(l: &LinearProgram) -> Result<StandardFormReport, StdFormError> {
    if !BoundedLp::from_lp(l).is_feasible() {
        return Err(StdFormError::InfeasibleInput);
    }
    let m = l.ineq.rows();
    let mut alive = vec![true; m];
    for i in (0..m).rev() {
        let others: Vec<usize> = (0..m).filter(|&j| j != i && alive[j]).collect();
        let sub = LinearProgram {
            eq: l.eq.clone(),
            eq_rhs: l.eq_rhs.clone(),
            ineq: l.ineq.select_rows(&others),
            ineq_rhs: others.iter().map(|&j| l.ineq_rhs[j].clone()).collect(),
            c: l.c.clone(),
        };
        let out = BoundedLp::from_lp(&sub).solve(&neg(l.ineq.row(i)));
        if out.status == LpStatus::Optimal {
            let max = -out.value.expect("optimal value");
            if max <= l.ineq_rhs[i] {
                alive[i] = false;
            }
        }
    }
    let kept: Vec<usize> = (0..m).filter(|&i| alive[i]).collect();
    let dropped: Vec<usize> = (0..m).filter(|&i| !alive[i]).collect();
    let lp = LinearProgram {
        ineq: l.ineq.select_rows(&kept),
        ineq_rhs: kept.iter().map(|&i| l.ineq_rhs[i].clone()).collect(),
        ..l.clone()
    };
    Ok(StandardFormReport { lp, dropped_inequalities: dropped, ..StandardFormReport::unchanged(l.clone()) })
}

/// Keeps a maximal independent set of equality rows (lowest indices win).
/// Assumes the equality system is consistent.
fn drop_dependent_equalities(l: &LinearProgram) -> (LinearProgram, Vec<usize>) {
    let keep = independent_rows(&l.eq);
    let dropped: Vec<usize> = (0..l.eq.rows()).filter(|i| !keep.contains(i)).collect();
    let lp = LinearProgram {
        eq: if keep.is_empty() { RatMatrix::zeros(0, l.n()) } else { l.eq.select_rows(&keep) },
        eq_rhs: keep.iter().map(|&i| l.eq_rhs[i].clone()).collect(),
        ..l.clone()
    };
    (lp, dropped)
}

pub fn standardize(l: &LinearProgram) -> Result<StandardFormReport, StdFormError> {
    let promo = find_implicit_equalities(l)?;
    let pruned = remove_redundant_inequalities(&promo.lp)?;
    // Map pruned indices (into the post-promotion inequality list) back.
    let remaining: Vec<usize> = (0..l.ineq.rows()).filter(|i| !promo.promoted_rows.contains(i)).collect();
    let dropped_inequalities: Vec<usize> = pruned.dropped_inequalities.iter().map(|&i| remaining[i]).collect();
    let (lp, dropped_equalities) = drop_dependent_equalities(&pruned.lp);
    Ok(StandardFormReport { lp, promoted_rows: promo.promoted_rows, dropped_inequalities, dropped_equalities })
}
