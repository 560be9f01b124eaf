//! Depth-first branch and bound with minimum-index branching and isomorphism
//! pruning. Enumerates one representative of every orbit of integral feasible
//! points of an ILP under a group of its symmetries.
//!
//! The kept representative of an orbit is the point whose value vector is
//! lexicographically largest, i.e. the lex-min point under the partial-solution
//! order in which larger early values count as smaller. Children are explored
//! in descending value order.

use std::collections::{HashMap, HashSet, VecDeque};
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};

use rayon::prelude::*;

use crate::exactla::Rat;
use crate::lpsolve::{BoundedLp, IntegerProgram, LpStatus};
use crate::permgrp::PermGroup;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ClassifyError {
    #[error("group has degree {found}, ILP has {expected} variables")]
    GroupDegreeMismatch { expected: usize, found: usize },
    #[error("variable {0} has no finite integer bounds")]
    UnboundedVariable(usize),
    #[error("node cap of {0} reached")]
    NodeCap(u64),
}

/// Values of the variables `0..depth`, fixed by branching.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PartialSolution {
    values: Vec<i64>,
}

impl PartialSolution {
    pub fn new(values: Vec<i64>) -> PartialSolution {
        PartialSolution { values }
    }

    pub fn depth(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    /// `(index, value)` pairs in index order.
    pub fn fixed(&self) -> impl Iterator<Item = (usize, i64)> + '_ {
        self.values.iter().copied().enumerate()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Stats {
    pub nodes: u64,
    pub lp_solves: u64,
    pub infeasible_prunes: u64,
    pub isomorphism_prunes: u64,
    pub bound_prunes: u64,
}

impl Stats {
    fn add(&mut self, o: &Stats) {
        self.nodes += o.nodes;
        self.lp_solves += o.lp_solves;
        self.infeasible_prunes += o.infeasible_prunes;
        self.isomorphism_prunes += o.isomorphism_prunes;
        self.bound_prunes += o.bound_prunes;
    }
}

#[derive(Debug, Clone)]
pub struct ClassificationRun {
    pub ilp: IntegerProgram,
    pub group: PermGroup,
    /// Sorted by value vector.
    pub solutions: Vec<Vec<i64>>,
    pub stats: Stats,
}

#[derive(Debug, Clone, Default)]
pub struct ClassifyOptions {
    /// Prune nodes whose LP relaxation optimum exceeds this value.
    pub z_star: Option<Rat>,
    pub node_cap: Option<u64>,
    /// Worker threads; 0 or 1 runs serially.
    pub jobs: usize,
}

/// No element of `g` maps the prefix to a lexicographically smaller partial
/// solution.
///
/// Only elements mapping `{0..d}` onto itself can compete (any other image
/// index set compares larger), so the test searches the chain over base
/// `0..n` for `h` with `h({0..d}) = {0..d}` and `(x[h(0)], …, x[h(d-1)])`
/// lexicographically larger than `x`.
pub fn is_lex_min(p: &PartialSolution, g: &PermGroup) -> bool {
    assert!(p.depth() <= g.degree());
    !exists_larger_image(g, &p.values)
}

/// Plain backtrack node budget before switching on memoization.
const PLAIN_BUDGET: usize = 65536;

fn exists_larger_image(g: &PermGroup, x: &[i64]) -> bool {
    exists_larger_image_with(g, x, PLAIN_BUDGET)
}

fn exists_larger_image_with(g: &PermGroup, x: &[i64], plain_budget: usize) -> bool {
    if x.is_empty() {
        return false;
    }
    let z: Vec<i64> = (0..g.degree()).map(|i| if i < x.len() { x[i] } else { OUT }).collect();
    let mut plain = Search { chain: g.chain(), x, memo: None, budget: plain_budget };
    if let Some(found) = plain.rec(0, z.clone(), false) {
        return found;
    }
    let mut memo = Search { chain: g.chain(), x, memo: Some(HashSet::new()), budget: usize::MAX };
    memo.rec(0, z, false).expect("unbounded search")
}

const OUT: i64 = i64::MIN;

/// The element under construction is `w = u_0 ∘ … ∘ u_{j-1}`. Only the
/// relabelled vector `v = z ∘ w` matters for the rest of the search, where
/// `z` is `x` padded with `OUT` beyond the prefix, so failed
/// `(j, greater, v)` states can be memoized. That collapses branches
/// differing by a symmetry of `x`, which the plain search enumerates one by
/// one.
struct Search<'a> {
    chain: &'a crate::permgrp::chain::StabChain,
    x: &'a [i64],
    memo: Option<HashSet<(usize, bool, Vec<i64>)>>,
    budget: usize,
}

impl Search<'_> {
    /// `None` when the node budget runs out.
    fn rec(&mut self, j: usize, v: Vec<i64>, greater: bool) -> Option<bool> {
        if j == self.x.len() {
            return Some(greater);
        }
        self.budget = self.budget.checked_sub(1)?;
        let key = (j, greater, v);
        if self.memo.as_ref().is_some_and(|m| m.contains(&key)) {
            return Some(false);
        }
        let (_, _, v) = key;
        let level = &self.chain.levels[j];
        if level.orbit.len() == 1 {
            let val = v[j];
            if val == OUT || (!greater && val < self.x[j]) {
                return Some(false);
            }
            return self.rec(j + 1, v, greater || val > self.x[j]);
        }
        for (s, &y) in level.orbit.iter().enumerate() {
            let val = v[y as usize];
            if val == OUT || (!greater && val < self.x[j]) {
                continue;
            }
            let u = &level.trans[s];
            let next: Vec<i64> = (0..v.len()).map(|i| v[u.apply(i)]).collect();
            if self.rec(j + 1, next, greater || val > self.x[j])? {
                return Some(true);
            }
        }
        if let Some(m) = self.memo.as_mut() {
            m.insert((j, greater, v));
        }
        Some(false)
    }
}

/// Row data for cheap bound propagation: `a·x (= | <=) rhs` with, per depth,
/// the least and greatest contribution of the still-free variables.
struct Rows {
    coef: Vec<Vec<Rat>>,
    rhs: Vec<Rat>,
    is_eq: Vec<bool>,
    /// `min_rest[r][d]` / `max_rest[r][d]`: extremes of `Σ_{j>=d} a_j x_j`.
    min_rest: Vec<Vec<Rat>>,
    max_rest: Vec<Vec<Rat>>,
}

impl Rows {
    fn new(ilp: &IntegerProgram, lo: &[i64], hi: &[i64]) -> Rows {
        let lp = &ilp.lp;
        let n = lp.n();
        let mut coef = Vec::new();
        let mut rhs = Vec::new();
        let mut is_eq = Vec::new();
        for i in 0..lp.eq.rows() {
            coef.push(lp.eq.row(i).to_vec());
            rhs.push(lp.eq_rhs[i].clone());
            is_eq.push(true);
        }
        for i in 0..lp.ineq.rows() {
            let row = lp.ineq.row(i);
            if row.iter().filter(|v| !v.is_zero()).count() > 1 {
                coef.push(row.to_vec());
                rhs.push(lp.ineq_rhs[i].clone());
                is_eq.push(false);
            }
        }
        let mut min_rest = Vec::with_capacity(coef.len());
        let mut max_rest = Vec::with_capacity(coef.len());
        for row in &coef {
            let mut mn = vec![Rat::zero(); n + 1];
            let mut mx = vec![Rat::zero(); n + 1];
            for j in (0..n).rev() {
                let a = &row[j];
                let (p, q) = (a * &Rat::from_int(lo[j]), a * &Rat::from_int(hi[j]));
                let (small, big) = if p <= q { (p, q) } else { (q, p) };
                mn[j] = &mn[j + 1] + &small;
                mx[j] = &mx[j + 1] + &big;
            }
            min_rest.push(mn);
            max_rest.push(mx);
        }
        Rows { coef, rhs, is_eq, min_rest, max_rest }
    }

    /// Partial sums after fixing variable `j` to `v`, or `None` when some row
    /// can no longer be satisfied by the free variables `j+1..`.
    fn extend(&self, sums: &[Rat], j: usize, v: i64) -> Option<Vec<Rat>> {
        let rv = Rat::from_int(v);
        let mut out = Vec::with_capacity(sums.len());
        for (r, s) in sums.iter().enumerate() {
            let a = &self.coef[r][j];
            let s = if a.is_zero() { s.clone() } else { s + &(a * &rv) };
            let low = &s + &self.min_rest[r][j + 1];
            if low > self.rhs[r] {
                return None;
            }
            if self.is_eq[r] && &s + &self.max_rest[r][j + 1] < self.rhs[r] {
                return None;
            }
            out.push(s);
        }
        Some(out)
    }
}

struct Ctx<'a> {
    ilp: &'a IntegerProgram,
    group: &'a PermGroup,
    base: BoundedLp,
    rows: Rows,
    lo: Vec<i64>,
    hi: Vec<i64>,
    z_star: Option<Rat>,
    node_cap: Option<u64>,
    nodes: AtomicU64,
    capped: AtomicBool,
}

struct Node {
    values: Vec<i64>,
    sums: Vec<Rat>,
    lp: BoundedLp,
}

impl Ctx<'_> {
    fn n(&self) -> usize {
        self.lo.len()
    }

    fn root(&self) -> Node {
        Node { values: vec![], sums: vec![Rat::zero(); self.rows.coef.len()], lp: self.base.clone() }
    }

    /// Children of `node` that survive all pruning tests, in descending value
    /// order.
    fn children(&self, node: &Node, stats: &mut Stats) -> Vec<Node> {
        let j = node.values.len();
        let mut out = Vec::new();
        for v in (self.lo[j]..=self.hi[j]).rev() {
            if self.capped.load(Ordering::Relaxed) {
                break;
            }
            let count = self.nodes.fetch_add(1, Ordering::Relaxed) + 1;
            if self.node_cap.is_some_and(|c| count > c) {
                self.capped.store(true, Ordering::Relaxed);
                break;
            }
            stats.nodes += 1;
            let mut values = node.values.clone();
            values.push(v);
            if exists_larger_image(self.group, &values) {
                stats.isomorphism_prunes += 1;
                continue;
            }
            let Some(sums) = self.rows.extend(&node.sums, j, v) else {
                stats.infeasible_prunes += 1;
                continue;
            };
            let mut lp = node.lp.clone();
            lp.fix(j, Rat::from_int(v));
            if j + 1 < self.n() {
                stats.lp_solves += 1;
                let ok = match &self.z_star {
                    None => lp.is_feasible(),
                    Some(z) => {
                        let res = lp.solve(&self.ilp.lp.c);
                        match res.status {
                            LpStatus::Infeasible => false,
                            LpStatus::Unbounded => true,
                            LpStatus::Optimal => {
                                if res.value.as_ref().is_some_and(|val| val > z) {
                                    stats.bound_prunes += 1;
                                    continue;
                                }
                                true
                            }
                        }
                    }
                };
                if !ok {
                    stats.infeasible_prunes += 1;
                    continue;
                }
            }
            out.push(Node { values, sums, lp });
        }
        out
    }

    fn is_solution(&self, values: &[i64]) -> bool {
        let x: Vec<Rat> = values.iter().map(|&v| Rat::from_int(v)).collect();
        self.ilp.lp.contains(&x) && self.z_star.as_ref().is_none_or(|z| &self.ilp.lp.objective(&x) <= z)
    }

    fn explore(&self, node: Node, out: &mut Vec<Vec<i64>>, stats: &mut Stats) {
        if node.values.len() == self.n() {
            if self.is_solution(&node.values) {
                out.push(node.values);
            } else {
                stats.infeasible_prunes += 1;
            }
            return;
        }
        for child in self.children(&node, stats) {
            self.explore(child, out, stats);
        }
    }
}

fn integer_bounds(ilp: &IntegerProgram, base: &BoundedLp) -> Result<(Vec<i64>, Vec<i64>), ClassifyError> {
    let n = ilp.lp.n();
    let mut lo = Vec::with_capacity(n);
    let mut hi = Vec::with_capacity(n);
    for j in 0..n {
        let bound = |b: Option<&Rat>, up: bool| {
            b.and_then(|v| {
                let r = if up { v.floor() } else { v.ceil() };
                i64::try_from(r).ok()
            })
        };
        match (bound(base.lower(j), false), bound(base.upper(j), true)) {
            (Some(l), Some(h)) => {
                lo.push(l);
                hi.push(h);
            }
            _ => return Err(ClassifyError::UnboundedVariable(j)),
        }
    }
    Ok((lo, hi))
}

pub fn classify(ilp: &IntegerProgram, g: &PermGroup, z_star: Option<Rat>) -> Result<ClassificationRun, ClassifyError> {
    classify_with(ilp, g, &ClassifyOptions { z_star, ..Default::default() })
}

pub fn classify_with(
    ilp: &IntegerProgram,
    g: &PermGroup,
    opts: &ClassifyOptions,
) -> Result<ClassificationRun, ClassifyError> {
    let n = ilp.lp.n();
    if g.degree() != n {
        return Err(ClassifyError::GroupDegreeMismatch { expected: n, found: g.degree() });
    }
    let base = BoundedLp::from_lp(&ilp.lp);
    let (lo, hi) = integer_bounds(ilp, &base)?;
    let rows = Rows::new(ilp, &lo, &hi);
    let ctx = Ctx {
        ilp,
        group: g,
        base,
        rows,
        lo,
        hi,
        z_star: opts.z_star.clone(),
        node_cap: opts.node_cap,
        nodes: AtomicU64::new(0),
        capped: AtomicBool::new(false),
    };
    let mut stats = Stats::default();
    let mut solutions = Vec::new();
    if n == 0 {
        if ctx.is_solution(&[]) {
            solutions.push(vec![]);
        }
    } else if ctx.base.is_feasible() {
        stats.lp_solves += 1;
        if opts.jobs <= 1 {
            ctx.explore(ctx.root(), &mut solutions, &mut stats);
        } else {
            // Expand breadth-first until there is enough independent work.
            let mut frontier = vec![ctx.root()];
            let mut depth = 0;
            while depth < n - 1 && !frontier.is_empty() && frontier.len() < 8 * opts.jobs {
                let mut next = Vec::new();
                for node in &frontier {
                    next.extend(ctx.children(node, &mut stats));
                }
                frontier = next;
                depth += 1;
            }
            let pool = rayon::ThreadPoolBuilder::new().num_threads(opts.jobs).build().expect("thread pool");
            let parts: Vec<(Vec<Vec<i64>>, Stats)> = pool.install(|| {
                frontier
                    .into_par_iter()
                    .map(|node| {
                        let mut out = Vec::new();
                        let mut st = Stats::default();
                        ctx.explore(node, &mut out, &mut st);
                        (out, st)
                    })
                    .collect()
            });
            for (out, st) in parts {
                solutions.extend(out);
                stats.add(&st);
            }
        }
    } else {
        stats.lp_solves += 1;
        stats.infeasible_prunes += 1;
    }
    if ctx.capped.load(Ordering::Relaxed) {
        return Err(ClassifyError::NodeCap(opts.node_cap.unwrap_or(0)));
    }
    solutions.sort();
    Ok(ClassificationRun { ilp: ilp.clone(), group: g.clone(), solutions, stats })
}

/// All images of `x` under `g`, by breadth-first search over generators.
pub fn orbit_of(x: &[i64], g: &PermGroup) -> HashSet<Vec<i64>> {
    let mut seen = HashSet::from([x.to_vec()]);
    let mut queue = VecDeque::from([x.to_vec()]);
    while let Some(y) = queue.pop_front() {
        for p in g.generators() {
            let z = p.act_on(&y);
            if seen.insert(z.clone()) {
                queue.push_back(z);
            }
        }
    }
    seen
}

/// Groups `solutions` into orbits of `g_big`. Returns classes of indices into
/// `solutions`, each sorted, ordered by smallest member.
pub fn verify_partition(solutions: &[Vec<i64>], g_big: &PermGroup) -> Vec<Vec<usize>> {
    let index: HashMap<&[i64], Vec<usize>> = solutions.iter().enumerate().fold(HashMap::new(), |mut m, (i, s)| {
        m.entry(s.as_slice()).or_default().push(i);
        m
    });
    let mut assigned = vec![false; solutions.len()];
    let mut classes = Vec::new();
    for i in 0..solutions.len() {
        if assigned[i] {
            continue;
        }
        let mut class = Vec::new();
        for y in orbit_of(&solutions[i], g_big) {
            if let Some(ids) = index.get(y.as_slice()) {
                for &k in ids {
                    if !assigned[k] {
                        assigned[k] = true;
                        class.push(k);
                    }
                }
            }
        }
        class.sort_unstable();
        classes.push(class);
    }
    classes
}

/// Re-checks a finished run: every solution integral-feasible and lex-min in
/// its orbit, and no two solutions in the same orbit.
pub fn check_run(run: &ClassificationRun) -> Result<(), String> {
    for (i, s) in run.solutions.iter().enumerate() {
        let x: Vec<Rat> = s.iter().map(|&v| Rat::from_int(v)).collect();
        if !run.ilp.lp.contains(&x) {
            return Err(format!("solution {i} is infeasible"));
        }
        if !is_lex_min(&PartialSolution::new(s.clone()), &run.group) {
            return Err(format!("solution {i} is not lex-min in its orbit"));
        }
    }
    // Lex-min representatives of distinct orbits are distinct vectors.
    let distinct: HashSet<&Vec<i64>> = run.solutions.iter().collect();
    if distinct.len() != run.solutions.len() {
        return Err("duplicate solutions".into());
    }
    Ok(())
}
