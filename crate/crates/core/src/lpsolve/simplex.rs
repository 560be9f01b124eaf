use crate::exactla::{dot, Rat};

use super::{LinearProgram, LpOutcome, LpStatus};

/// An LP in bounded form: `rows·x = rhs`, `lower <= x <= upper`.
///
/// Built from a [`LinearProgram`] by turning single-variable inequality rows
/// into bounds and giving every other inequality row its own slack column.
/// Callers (branch-and-bound) tighten bounds on the structural columns and
/// re-solve from scratch.
#[derive(Debug, Clone)]
pub struct BoundedLp {
    n_struct: usize,
    ncols: usize,
    rows: Vec<Vec<Rat>>,
    rhs: Vec<Rat>,
    lower: Vec<Option<Rat>>,
    upper: Vec<Option<Rat>>,
    row_slack: Vec<Option<usize>>,
    trivially_infeasible: bool,
}

enum Phase {
    Finished,
    Unbounded,
}

struct Tableau {
    m: usize,
    w: usize,
    t: Vec<Rat>,
    basis: Vec<usize>,
    is_basic: Vec<bool>,
    x: Vec<Rat>,
    lower: Vec<Option<Rat>>,
    upper: Vec<Option<Rat>>,
}

impl BoundedLp {
    pub fn from_lp(lp: &LinearProgram) -> BoundedLp {
        let n = lp.n();
        let mut lower: Vec<Option<Rat>> = vec![None; n];
        let mut upper: Vec<Option<Rat>> = vec![None; n];
        let mut trivially_infeasible = false;
        let mut general = Vec::new();
        for i in 0..lp.ineq.rows() {
            let row = lp.ineq.row(i);
            let d = &lp.ineq_rhs[i];
            let nz: Vec<usize> = (0..n).filter(|&j| !row[j].is_zero()).collect();
            match nz.as_slice() {
                [] => trivially_infeasible |= d.is_negative(),
                [j] => {
                    let v = d / &row[*j];
                    if row[*j].is_positive() {
                        tighten_upper(&mut upper[*j], v);
                    } else {
                        tighten_lower(&mut lower[*j], v);
                    }
                }
                _ => general.push(i),
            }
        }
        let ncols = n + general.len();
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        let mut row_slack = Vec::new();
        for i in 0..lp.eq.rows() {
            let mut r = lp.eq.row(i).to_vec();
            r.resize(ncols, Rat::zero());
            rows.push(r);
            rhs.push(lp.eq_rhs[i].clone());
            row_slack.push(None);
        }
        for (s, &i) in general.iter().enumerate() {
            let mut r = lp.ineq.row(i).to_vec();
            r.resize(ncols, Rat::zero());
            r[n + s] = Rat::one();
            rows.push(r);
            rhs.push(lp.ineq_rhs[i].clone());
            row_slack.push(Some(n + s));
        }
        lower.resize(ncols, Some(Rat::zero()));
        upper.resize(ncols, None);
        BoundedLp { n_struct: n, ncols, rows, rhs, lower, upper, row_slack, trivially_infeasible }
    }

    pub fn n(&self) -> usize {
        self.n_struct
    }

    pub fn lower(&self, j: usize) -> Option<&Rat> {
        self.lower[j].as_ref()
    }

    pub fn upper(&self, j: usize) -> Option<&Rat> {
        self.upper[j].as_ref()
    }

    /// Intersects the bounds of structural column `j` with `[lo, hi]`.
    pub fn tighten(&mut self, j: usize, lo: Option<Rat>, hi: Option<Rat>) {
        assert!(j < self.n_struct);
        if let Some(lo) = lo {
            tighten_lower(&mut self.lower[j], lo);
        }
        if let Some(hi) = hi {
            tighten_upper(&mut self.upper[j], hi);
        }
    }

    pub fn fix(&mut self, j: usize, v: Rat) {
        self.tighten(j, Some(v.clone()), Some(v));
    }

    pub fn is_feasible(&self) -> bool {
        self.feasible_point().is_some()
    }

    pub fn feasible_point(&self) -> Option<Vec<Rat>> {
        let out = self.run(None);
        out.point
    }

    /// Minimizes `cost` (over the structural columns).
    pub fn solve(&self, cost: &[Rat]) -> LpOutcome {
        assert_eq!(cost.len(), self.n_struct);
        self.run(Some(cost))
    }

    fn run(&self, cost: Option<&[Rat]>) -> LpOutcome {
        let infeasible = LpOutcome { status: LpStatus::Infeasible, value: None, point: None };
        if self.trivially_infeasible {
            return infeasible;
        }
        for j in 0..self.ncols {
            if let (Some(l), Some(u)) = (&self.lower[j], &self.upper[j]) {
                if l > u {
                    return infeasible;
                }
            }
        }
        // Fixed columns are substituted out; the rest get a starting value at
        // a bound (or zero when free).
        let mut start: Vec<Rat> = Vec::with_capacity(self.ncols);
        let mut active = Vec::new();
        for j in 0..self.ncols {
            let v = match (&self.lower[j], &self.upper[j]) {
                (Some(l), Some(u)) if l == u => l.clone(),
                (Some(l), _) => {
                    active.push(j);
                    l.clone()
                }
                (None, Some(u)) => {
                    active.push(j);
                    u.clone()
                }
                (None, None) => {
                    active.push(j);
                    Rat::zero()
                }
            };
            start.push(v);
        }
        let mut col_pos = vec![usize::MAX; self.ncols];
        for (p, &j) in active.iter().enumerate() {
            col_pos[j] = p;
        }

        let mut kept_rows = Vec::new();
        let mut residual = Vec::new();
        for (i, row) in self.rows.iter().enumerate() {
            let r = &self.rhs[i] - &dot(row, &start);
            if active.iter().all(|&j| row[j].is_zero()) {
                if !r.is_zero() {
                    return infeasible;
                }
                continue;
            }
            kept_rows.push(i);
            residual.push(r);
        }

        let m = kept_rows.len();
        let k = active.len();
        let mut n_art = 0;
        let mut crash: Vec<Option<usize>> = Vec::with_capacity(m);
        for (ri, &i) in kept_rows.iter().enumerate() {
            let slack = self.row_slack[i].filter(|&s| col_pos[s] != usize::MAX);
            match slack {
                Some(s) if !residual[ri].is_negative() => crash.push(Some(col_pos[s])),
                _ => {
                    crash.push(None);
                    n_art += 1;
                }
            }
        }
        let w = k + n_art;
        let mut t = vec![Rat::zero(); m * w];
        let mut basis = Vec::with_capacity(m);
        let mut x: Vec<Rat> = active.iter().map(|&j| start[j].clone()).collect();
        x.resize(w, Rat::zero());
        let mut lower: Vec<Option<Rat>> = active.iter().map(|&j| self.lower[j].clone()).collect();
        let mut upper: Vec<Option<Rat>> = active.iter().map(|&j| self.upper[j].clone()).collect();
        lower.resize(w, Some(Rat::zero()));
        upper.resize(w, None);
        let mut next_art = k;
        for (ri, &i) in kept_rows.iter().enumerate() {
            let row = &self.rows[i];
            let neg = crash[ri].is_none() && residual[ri].is_negative();
            for (p, &j) in active.iter().enumerate() {
                let v = &row[j];
                if !v.is_zero() {
                    t[ri * w + p] = if neg { -v } else { v.clone() };
                }
            }
            match crash[ri] {
                Some(p) => {
                    basis.push(p);
                    x[p] = &x[p] + &residual[ri];
                }
                None => {
                    t[ri * w + next_art] = Rat::one();
                    basis.push(next_art);
                    x[next_art] = residual[ri].abs();
                    next_art += 1;
                }
            }
        }
        let mut is_basic = vec![false; w];
        for &b in &basis {
            is_basic[b] = true;
        }
        let mut tab = Tableau { m, w, t, basis, is_basic, x, lower, upper };

        if n_art > 0 {
            let mut c1 = vec![Rat::zero(); w];
            for c in c1.iter_mut().skip(k) {
                *c = Rat::one();
            }
            match tab.optimize(&c1) {
                Phase::Finished => {}
                Phase::Unbounded => unreachable!("phase 1 objective is bounded below"),
            }
            if tab.x[k..].iter().any(|v| !v.is_zero()) {
                return infeasible;
            }
            for j in k..w {
                tab.upper[j] = Some(Rat::zero());
            }
        }

        let mut value = None;
        if let Some(cost) = cost {
            let mut c2 = vec![Rat::zero(); w];
            for (p, &j) in active.iter().enumerate() {
                if j < self.n_struct {
                    c2[p] = cost[j].clone();
                }
            }
            if let Phase::Unbounded = tab.optimize(&c2) {
                return LpOutcome { status: LpStatus::Unbounded, value: None, point: None };
            }
        }
        let mut point: Vec<Rat> = start[..self.n_struct].to_vec();
        for (p, &j) in active.iter().enumerate() {
            if j < self.n_struct {
                point[j] = tab.x[p].clone();
            }
        }
        if let Some(cost) = cost {
            value = Some(dot(cost, &point));
        }
        LpOutcome { status: LpStatus::Optimal, value, point: Some(point) }
    }
}

fn tighten_lower(slot: &mut Option<Rat>, v: Rat) {
    match slot {
        Some(cur) if *cur >= v => {}
        _ => *slot = Some(v),
    }
}

fn tighten_upper(slot: &mut Option<Rat>, v: Rat) {
    match slot {
        Some(cur) if *cur <= v => {}
        _ => *slot = Some(v),
    }
}

impl Tableau {
    fn can_increase(&self, j: usize) -> bool {
        self.upper[j].as_ref().is_none_or(|u| self.x[j] < *u)
    }

    fn can_decrease(&self, j: usize) -> bool {
        self.lower[j].as_ref().is_none_or(|l| self.x[j] > *l)
    }

    /// Primal simplex from the current basic feasible solution. Entering and
    /// leaving variables are chosen by smallest index (Bland).
    fn optimize(&mut self, cost: &[Rat]) -> Phase {
        let (m, w) = (self.m, self.w);
        let mut dj = cost.to_vec();
        for i in 0..m {
            let cb = &cost[self.basis[i]];
            if cb.is_zero() {
                continue;
            }
            for j in 0..w {
                let a = &self.t[i * w + j];
                if !a.is_zero() {
                    dj[j] -= &(cb * a);
                }
            }
        }
        loop {
            let entering = (0..w).find(|&j| {
                !self.is_basic[j]
                    && ((dj[j].is_negative() && self.can_increase(j)) || (dj[j].is_positive() && self.can_decrease(j)))
            });
            let Some(q) = entering else {
                return Phase::Finished;
            };
            let up = dj[q].is_negative();

            // Ratio test; `None` leaving row means a bound flip of q itself.
            let mut best: Option<(Rat, usize, Option<usize>)> = None;
            let own = if up {
                self.upper[q].as_ref().map(|u| u - &self.x[q])
            } else {
                self.lower[q].as_ref().map(|l| &self.x[q] - l)
            };
            if let Some(lim) = own {
                best = Some((lim, q, None));
            }
            for i in 0..m {
                let a = &self.t[i * w + q];
                if a.is_zero() {
                    continue;
                }
                let b = self.basis[i];
                // x_b changes by -rate per unit step.
                let decreasing = a.is_positive() == up;
                let lim = if decreasing {
                    self.lower[b].as_ref().map(|l| &(&self.x[b] - l) / &a.abs())
                } else {
                    self.upper[b].as_ref().map(|u| &(u - &self.x[b]) / &a.abs())
                };
                if let Some(lim) = lim {
                    let better = match &best {
                        None => true,
                        Some((bl, bv, _)) => lim < *bl || (lim == *bl && b < *bv),
                    };
                    if better {
                        best = Some((lim, b, Some(i)));
                    }
                }
            }
            let Some((theta, _, leave)) = best else {
                return Phase::Unbounded;
            };

            if !theta.is_zero() {
                let step = if up { theta.clone() } else { -&theta };
                self.x[q] = &self.x[q] + &step;
                for i in 0..m {
                    let a = &self.t[i * w + q];
                    if !a.is_zero() {
                        let b = self.basis[i];
                        self.x[b] = &self.x[b] - &(a * &step);
                    }
                }
            }
            let Some(r) = leave else {
                continue;
            };
            self.pivot(r, q, &mut dj);
        }
    }

    fn pivot(&mut self, r: usize, q: usize, dj: &mut [Rat]) {
        let w = self.w;
        let inv = self.t[r * w + q].recip();
        if !inv.is_one() {
            for j in 0..w {
                let cell = &mut self.t[r * w + j];
                if !cell.is_zero() {
                    *cell = &*cell * &inv;
                }
            }
        }
        let nz: Vec<(usize, Rat)> =
            (0..w).filter(|&j| !self.t[r * w + j].is_zero()).map(|j| (j, self.t[r * w + j].clone())).collect();
        for i in 0..self.m {
            if i == r {
                continue;
            }
            let f = self.t[i * w + q].clone();
            if f.is_zero() {
                continue;
            }
            for (j, v) in &nz {
                let cell = &mut self.t[i * w + j];
                *cell = &*cell - &(&f * v);
            }
        }
        let f = dj[q].clone();
        if !f.is_zero() {
            for (j, v) in &nz {
                dj[*j] = &dj[*j] - &(&f * v);
            }
        }
        let old = self.basis[r];
        self.is_basic[old] = false;
        self.is_basic[q] = true;
        self.basis[r] = q;
    }
}
