//! Shared generators and checks for the property, oracle and acceptance
//! targets. Each check returns `Err` with a description on failure.
#![allow(dead_code)]

use std::collections::{HashMap, HashSet};

use lpsym::cgraph::formulation_group;
use lpsym::classify::classify;
use lpsym::exactla::{row_space_projector, Rat, RatMatrix};
use lpsym::lpsolve::{BoundedLp, IntegerProgram, LinearProgram, LpStatus};
use lpsym::oa::{
    array_from_frequencies, build_ilp_bf, build_ilp_improved, is_oa, is_oa_frequencies, iso_group, j_characteristics,
    od_group, OASpec, SignedArray,
};
use lpsym::permgrp::{Perm, PermGroup};
use lpsym::stdform::standardize;
use lpsym::symmetry::{g_lp, g_lp_c, g_null, SymmetryOptions};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn q(v: i64) -> Rat {
    Rat::from_int(v)
}

pub fn qv(v: &[i64]) -> Vec<Rat> {
    v.iter().map(|&x| q(x)).collect()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

fn primitive(mut row: Vec<i64>) -> Vec<i64> {
    let g = row.iter().fold(0, |g, &v| gcd(g, v));
    if g > 1 {
        row.iter_mut().for_each(|v| *v /= g);
    }
    row
}

fn random_row(r: &mut ChaCha8Rng, n: usize, amp: i64) -> Vec<i64> {
    loop {
        let row: Vec<i64> = (0..n).map(|_| r.gen_range(-amp..=amp)).collect();
        if row.iter().any(|&v| v != 0) {
            return primitive(row);
        }
    }
}

/// Inequality system under construction, integer rows `row·x <= rhs`.
#[derive(Default)]
struct Rows {
    eq: Vec<(Vec<i64>, i64)>,
    ineq: Vec<(Vec<i64>, i64)>,
}

impl Rows {
    fn into_lp(self, n: usize, c: Vec<i64>) -> LinearProgram {
        let m = |rows: &[(Vec<i64>, i64)]| {
            let mut a = RatMatrix::zeros(0, n);
            for (r, _) in rows {
                a.push_row(qv(r));
            }
            a
        };
        LinearProgram::new(
            m(&self.eq),
            self.eq.iter().map(|(_, b)| q(*b)).collect(),
            m(&self.ineq),
            self.ineq.iter().map(|(_, d)| q(*d)).collect(),
            qv(&c),
        )
        .unwrap()
    }
}

fn idot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Elements of a random subgroup of `S_n` of order at most `max_order`
/// (generators are redrawn until it fits).
fn random_group(r: &mut ChaCha8Rng, n: usize, max_order: usize) -> Vec<Perm> {
    loop {
        if let Ok(elems) = try_group(r, n).elements(max_order) {
            return elems;
        }
    }
}

fn try_group(r: &mut ChaCha8Rng, n: usize) -> PermGroup {
    let mut gens = Vec::new();
    for _ in 0..r.gen_range(0..=2) {
        let mut v: Vec<usize> = (0..n).collect();
        if r.gen_bool(0.5) {
            v.shuffle(r);
        } else {
            let (a, b) = (r.gen_range(0..n), r.gen_range(0..n));
            v.swap(a, b);
        }
        gens.push(Perm::from_images(v).unwrap());
    }
    PermGroup::new(n, gens).unwrap()
}

fn orbit_rows(row: &[i64], elems: &[Perm]) -> Vec<Vec<i64>> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for g in elems {
        let img = g.act_on(row);
        if seen.insert(img.clone()) {
            out.push(img);
        }
    }
    out
}

/// Bounded feasible LP on `n` variables built from row orbits of a random
/// group, with a box `0 <= x <= 3`. Optional extras: unsymmetric rows,
/// rows tight at the witness point (possible implicit equalities) and
/// equality orbits.
pub fn random_symmetric_lp(seed: u64, n_max: usize) -> LinearProgram {
    let mut r = rng(seed);
    let n = r.gen_range(2..=n_max);
    let elems = random_group(&mut r, n, 120);
    let x: Vec<i64> = (0..n).map(|_| r.gen_range(0..=3)).collect();
    let mut rows = Rows::default();
    for i in 0..n {
        let mut e = vec![0; n];
        e[i] = -1;
        rows.ineq.push((e.clone(), 0));
        e[i] = 1;
        rows.ineq.push((e, 3));
    }
    for _ in 0..r.gen_range(1..=3) {
        let orbit = orbit_rows(&random_row(&mut r, n, 2), &elems);
        let slack = r.gen_range(0..=2);
        let rhs = orbit.iter().map(|o| idot(o, &x)).max().unwrap() + slack;
        rows.ineq.extend(orbit.into_iter().map(|o| (o, rhs)));
    }
    if r.gen_bool(0.3) {
        let row = random_row(&mut r, n, 2);
        let rhs = idot(&row, &x) + r.gen_range(0..=1);
        rows.ineq.push((row, rhs));
    }
    if r.gen_bool(0.3) {
        // Symmetric equalities through the all-ones point, which is then
        // made feasible for the inequalities too.
        let orbit = orbit_rows(&random_row(&mut r, n, 1), &elems);
        let ones = vec![1; n];
        if orbit.iter().all(|o| idot(o, &ones) == idot(&orbit[0], &ones)) {
            let rhs = idot(&orbit[0], &ones);
            for (row, d) in rows.ineq.iter_mut() {
                *d = (*d).max(idot(row, &ones));
            }
            rows.eq.extend(orbit.into_iter().map(|o| (o, rhs)));
        }
    }
    let c = random_objective(&mut r, &elems, 0.5);
    rows.into_lp(n, c)
}

/// Constant on the orbits of `elems` with probability `p_sym`.
fn random_objective(r: &mut ChaCha8Rng, elems: &[Perm], p_sym: f64) -> Vec<i64> {
    let n = elems[0].degree();
    if r.gen_bool(p_sym) {
        let mut c = vec![0; n];
        for o in lpsym::permgrp::orbits_of(n, elems) {
            let v = r.gen_range(-2..=2);
            o.iter().for_each(|&i| c[i] = v);
        }
        c
    } else {
        (0..n).map(|_| r.gen_range(-2..=2)).collect()
    }
}

/// Random vertices (optimal for random objectives) and convex combinations
/// of them. Requires a bounded nonempty region.
pub fn sample_feasible(lp: &LinearProgram, r: &mut ChaCha8Rng, count: usize) -> Vec<Vec<Rat>> {
    let n = lp.n();
    let base = BoundedLp::from_lp(lp);
    let mut verts: Vec<Vec<Rat>> = Vec::new();
    for _ in 0..count.div_ceil(2).max(2) {
        let cost: Vec<Rat> = (0..n).map(|_| q(r.gen_range(-5..=5))).collect();
        let out = base.solve(&cost);
        assert_eq!(out.status, LpStatus::Optimal, "sampling needs a bounded feasible region");
        verts.push(out.point.unwrap());
    }
    let mut pts = verts.clone();
    while pts.len() < count {
        let w: Vec<i64> = verts.iter().map(|_| r.gen_range(0..=4)).collect();
        let total: i64 = w.iter().sum();
        if total == 0 {
            continue;
        }
        let mut p = vec![Rat::zero(); n];
        for (v, &wi) in verts.iter().zip(&w) {
            for (pj, vj) in p.iter_mut().zip(v) {
                *pj += &(vj * &Rat::new(wi, total));
            }
        }
        pts.push(p);
    }
    pts.truncate(count);
    pts
}

/// Standard form of `random_symmetric_lp(seed, 5)`.
pub fn standardize_symmetric(seed: u64) -> LinearProgram {
    standardize(&random_symmetric_lp(seed, 5)).expect("generator builds feasible LPs").lp
}

// ---- projector, rank identity, pointwise, tower ----

pub fn check_projector(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let n = r.gen_range(1..=6);
    let m = r.gen_range(1..=n);
    let mut a = RatMatrix::zeros(0, n);
    for _ in 0..m {
        a.push_row(qv(&(0..n).map(|_| r.gen_range(-3..=3)).collect::<Vec<_>>()));
    }
    let keep = lpsym::exactla::independent_rows(&a);
    if keep.is_empty() {
        return Ok(());
    }
    let a = a.select_rows(&keep);
    let p = row_space_projector(&a).map_err(|e| e.to_string())?;
    if p.mul(&p) != p {
        return Err(format!("P^2 != P for A = {a:?}"));
    }
    if p.transpose() != p {
        return Err(format!("P^T != P for A = {a:?}"));
    }
    if p.mul(&a.transpose()) != a.transpose() {
        return Err(format!("P A^T != A^T for A = {a:?}"));
    }
    Ok(())
}

pub fn check_rank_identity(seed: u64) -> Result<(), String> {
    let l = standardize_symmetric(seed);
    let g = g_null(&l).map_err(|e| e.to_string())?;
    let rank = l.eq.rank();
    for p in g.generators() {
        let mut stacked = l.eq.clone();
        for i in 0..l.eq.rows() {
            stacked.push_row(p.act_on(l.eq.row(i)));
        }
        if stacked.rank() != rank {
            return Err(format!("generator {p} changes the row space of A"));
        }
    }
    Ok(())
}

pub fn check_pointwise(seed: u64) -> Result<(), String> {
    let l = standardize_symmetric(seed);
    let res = g_lp(&l, &SymmetryOptions::default()).map_err(|e| e.to_string())?;
    let mut r = rng(seed ^ 0x5eed);
    let pts = sample_feasible(&l, &mut r, 20);
    for g in res.group.generators() {
        for x in &pts {
            let y = g.act_on(x);
            if !l.contains(&y) {
                return Err(format!("{g} maps feasible {x:?} outside the region"));
            }
            if l.objective(&y) != l.objective(x) {
                return Err(format!("{g} changes the objective at {x:?}"));
            }
        }
    }
    Ok(())
}

pub fn check_tower(seed: u64) -> Result<(), String> {
    let l = standardize_symmetric(seed);
    let opts = SymmetryOptions::default();
    let form = formulation_group(&l);
    let lpc = g_lp_c(&l, &opts).map_err(|e| e.to_string())?.group;
    let null = g_null(&l).map_err(|e| e.to_string())?;
    let lp = g_lp(&l, &opts).map_err(|e| e.to_string())?.group;
    let ok = form.is_subgroup_of(&lpc) && lpc.is_subgroup_of(&null) && lpc.is_subgroup_of(&lp);
    if !ok {
        return Err(format!(
            "orders formulation {} / lp_c {} / null {} / lp {}",
            form.order(),
            lpc.order(),
            null.order(),
            lp.order()
        ));
    }
    Ok(())
}

// ---- J-characteristics ----

fn to_signed(rows: &[Vec<bool>]) -> SignedArray {
    SignedArray::new(rows.iter().map(|r| r.iter().map(|&b| if b { 1 } else { -1 }).collect()).collect()).unwrap()
}

fn to_levels(rows: &[Vec<bool>]) -> Vec<Vec<usize>> {
    rows.iter().map(|r| r.iter().map(|&b| usize::from(!b)).collect()).collect()
}

/// Strength at least `t` by direct counting, independent of `OASpec`.
fn has_strength(rows: &[Vec<usize>], k: usize, t: usize) -> bool {
    let n = rows.len() as u64;
    if n % (1 << t) != 0 {
        return false;
    }
    match OASpec::new(n, k, 2, t, None) {
        Ok(spec) => is_oa(rows, &spec),
        Err(_) => false,
    }
}

pub fn check_jchar(rows: &[Vec<bool>]) -> Result<(), String> {
    let k = rows[0].len();
    let y = to_signed(rows);
    let levels = to_levels(rows);
    let js = j_characteristics(&y, k);
    for t in 1..=k {
        let zero = js.iter().filter(|j| (1..=t).contains(&j.subset.len())).all(|j| j.value == 0);
        if zero != has_strength(&levels, k, t) {
            return Err(format!("t = {t}: J-characteristics say {zero}, counting disagrees"));
        }
    }
    Ok(())
}

pub fn check_parity(rows: &[Vec<bool>], word: &[usize]) -> Result<(), String> {
    let k = rows[0].len();
    let g = od_group(k);
    let gens = g.generators();
    let mut p = Perm::identity(1 << k);
    for &w in word {
        p = gens[w % gens.len()].compose(&p);
    }
    let levels = to_levels(rows);
    let x = lpsym::oa::frequency_vector(&levels, k, 2).unwrap();
    let moved = array_from_frequencies(&p.act_on(&x), k, 2);
    let y = SignedArray::from_levels(&levels).unwrap();
    let gy = SignedArray::from_levels(&moved).unwrap();
    let before: HashMap<Vec<usize>, i64> = j_characteristics(&y, k).into_iter().map(|j| (j.subset, j.value)).collect();
    for j in j_characteristics(&gy, k) {
        let r = j.subset.len();
        if r == 0 {
            continue;
        }
        let allowed = if r % 2 == 1 { [r, r + 1] } else { [r, r - 1] };
        let found = before.iter().any(|(l, v)| allowed.contains(&l.len()) && (*v == j.value || *v == -j.value));
        if !found {
            return Err(format!("J({:?}) = {} after {p} has no match", j.subset, j.value));
        }
    }
    Ok(())
}

// ---- standard form ----

/// Outcome of one standard-form case: whether the LP was full-dimensional,
/// in which case `G^LP` was checked against the formulation group.
pub struct StdCase {
    pub full_dim: bool,
}

fn without_row(l: &LinearProgram, i: usize) -> LinearProgram {
    let keep: Vec<usize> = (0..l.ineq.rows()).filter(|&j| j != i).collect();
    LinearProgram {
        ineq: l.ineq.select_rows(&keep),
        ineq_rhs: keep.iter().map(|&j| l.ineq_rhs[j].clone()).collect(),
        ..l.clone()
    }
}

fn neg(v: &[Rat]) -> Vec<Rat> {
    v.iter().map(|x| -x).collect()
}

/// Checks the standard-form definition directly with fresh LP solves.
pub fn check_standard_form(l: &LinearProgram) -> Result<(), String> {
    let base = BoundedLp::from_lp(l);
    if !base.is_feasible() {
        return Err("output is infeasible".into());
    }
    if l.eq.rank() != l.eq.rows() {
        return Err("equality rows are dependent".into());
    }
    for i in 0..l.ineq.rows() {
        let lo = base.solve(l.ineq.row(i));
        if lo.status == LpStatus::Optimal && lo.value.as_ref() == Some(&l.ineq_rhs[i]) {
            return Err(format!("inequality {i} holds with equality everywhere"));
        }
        let hi = BoundedLp::from_lp(&without_row(l, i)).solve(&neg(l.ineq.row(i)));
        if hi.status == LpStatus::Optimal && -hi.value.unwrap() <= l.ineq_rhs[i] {
            return Err(format!("inequality {i} is redundant"));
        }
    }
    Ok(())
}

/// Random feasible LP on at most 8 variables with injected redundant rows
/// and, unless `full_dim`, implicit and dependent equalities.
pub fn random_dirty_lp(seed: u64, full_dim: bool) -> LinearProgram {
    let mut r = rng(seed);
    let n = r.gen_range(2..=8);
    let x: Vec<i64> = (0..n).map(|_| r.gen_range(1..=3)).collect();
    let elems = random_group(&mut r, n, 48);
    let mut rows = Rows::default();
    for i in 0..n {
        let mut e = vec![0; n];
        e[i] = -1;
        rows.ineq.push((e.clone(), 0));
        e[i] = 1;
        rows.ineq.push((e, 4));
    }
    for _ in 0..r.gen_range(1..=n) {
        let orbit = orbit_rows(&random_row(&mut r, n, 3), &elems);
        let rhs = orbit.iter().map(|o| idot(o, &x)).max().unwrap() + r.gen_range(1..=3);
        rows.ineq.extend(orbit.into_iter().map(|o| (o, rhs)));
    }
    if !full_dim {
        let beta = random_row(&mut r, n, 2);
        let d = idot(&beta, &x);
        let at = r.gen_range(0..=rows.ineq.len());
        rows.ineq.insert(at, (beta.clone(), d));
        rows.ineq.push((beta.iter().map(|v| -v).collect(), -d));
        let g1 = random_row(&mut r, n, 2);
        let g2 = random_row(&mut r, n, 2);
        let sum: Vec<i64> = g1.iter().zip(&g2).map(|(a, b)| a + b).collect();
        for g in [g1, g2, sum] {
            let b = idot(&g, &x);
            rows.eq.push((g, b));
        }
    }
    // Redundant rows: nonnegative combinations and scaled copies.
    let m = rows.ineq.len();
    for _ in 0..r.gen_range(1..=3) {
        let (i, j) = (r.gen_range(0..m), r.gen_range(0..m));
        let (a, b) = (r.gen_range(1..=2), r.gen_range(1..=2));
        let row: Vec<i64> = rows.ineq[i].0.iter().zip(&rows.ineq[j].0).map(|(u, v)| a * u + b * v).collect();
        if row.iter().all(|&v| v == 0) {
            continue;
        }
        let rhs = a * rows.ineq[i].1 + b * rows.ineq[j].1 + r.gen_range(0..=2);
        rows.ineq.push((row, rhs));
    }
    let i = r.gen_range(0..m);
    let (row, d) = rows.ineq[i].clone();
    rows.ineq.push((row.iter().map(|v| 2 * v).collect(), 2 * d));
    let c = random_objective(&mut r, &elems, 0.8);
    rows.into_lp(n, c)
}

pub fn check_stdform_case(seed: u64, full_dim: bool) -> Result<StdCase, String> {
    let l = random_dirty_lp(seed, full_dim);
    let std = standardize(&l).map_err(|e| e.to_string())?.lp;
    check_standard_form(&std)?;
    let mut r = rng(seed ^ 0xfeed);
    let mut probes = sample_feasible(&l, &mut r, 40);
    for i in 0..40 {
        let mut p = probes[i].clone();
        let j = r.gen_range(0..l.n());
        p[j] += &Rat::new(r.gen_range(-3..=3), r.gen_range(1..=4));
        probes.push(p);
    }
    while probes.len() < 100 {
        probes.push((0..l.n()).map(|_| Rat::new(r.gen_range(-2..=10), 2)).collect());
    }
    for p in &probes {
        if l.contains(p) != std.contains(p) {
            return Err(format!("membership differs at {p:?}"));
        }
    }
    let full = std.eq.rows() == 0;
    if full {
        let lp = g_lp(&std, &SymmetryOptions::default()).map_err(|e| e.to_string())?.group;
        let form = formulation_group(&std);
        if !lp.same_group(&form) {
            return Err(format!("full-dimensional: G^LP order {} but formulation order {}", lp.order(), form.order()));
        }
    }
    Ok(StdCase { full_dim: full })
}

// ---- classification oracle ----

/// Every frequency vector in `{0..p_max}^{s^k}` summing to `N` that is an OA.
pub fn brute_force_oas(spec: &OASpec) -> Vec<Vec<i64>> {
    fn rec(spec: &OASpec, cur: &mut Vec<u64>, left: u64, out: &mut Vec<Vec<i64>>) {
        let n = spec.n_vars();
        if cur.len() == n {
            if left == 0 && is_oa_frequencies(cur, spec) {
                out.push(cur.iter().map(|&v| v as i64).collect());
            }
            return;
        }
        let room = (n - cur.len()) as u64 * spec.p_max;
        if room < left {
            return;
        }
        for v in 0..=spec.p_max.min(left) {
            cur.push(v);
            rec(spec, cur, left - v, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(spec, &mut Vec::new(), spec.n_runs, &mut out);
    out
}

/// Number of orbits of `g` on `set` by union-find over generator images.
pub fn count_orbits(set: &[Vec<i64>], gens: &[Perm]) -> Result<usize, String> {
    let index: HashMap<&[i64], usize> = set.iter().enumerate().map(|(i, x)| (x.as_slice(), i)).collect();
    let mut parent: Vec<usize> = (0..set.len()).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for (i, x) in set.iter().enumerate() {
        for g in gens {
            let y = g.act_on(x);
            let j = *index.get(y.as_slice()).ok_or_else(|| format!("{g} maps a solution outside the set"))?;
            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
            parent[a] = b;
        }
    }
    Ok((0..set.len()).filter(|&i| find(&mut parent, i) == i).count())
}

/// Specs with `s^k <= 16` and small `N`.
pub fn oracle_specs() -> Vec<OASpec> {
    let mut out = Vec::new();
    for (s, k_max) in [(2usize, 4usize), (3, 2), (4, 2)] {
        for k in 1..=k_max {
            let vars = s.pow(k as u32) as u64;
            for t in 1..=k {
                let st = s.pow(t as u32) as u64;
                for m in 1..=3 {
                    let n = m * st;
                    if n > if vars >= 16 { 8 } else { 9 } {
                        continue;
                    }
                    for p in 1..=m {
                        if let Ok(spec) = OASpec::new(n, k, s, t, Some(p)) {
                            if build_ilp_bf(&spec).is_ok() {
                                out.push(spec);
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

fn count(ilp: &IntegerProgram, g: &PermGroup) -> Result<usize, String> {
    Ok(classify(ilp, g, None).map_err(|e| e.to_string())?.solutions.len())
}

/// Compares classify counts with brute-force orbit counts under the trivial
/// group (one-equality-per-tuple model), the isomorphism group and `G^LP`
/// (improved model). Returns a short summary of the counts.
pub fn oracle_case(spec: &OASpec) -> Result<String, String> {
    let all = brute_force_oas(spec);
    let bf = build_ilp_bf(spec).map_err(|e| e.to_string())?;
    let improved = build_ilp_improved(spec).map_err(|e| e.to_string())?;
    let n = spec.n_vars();
    let trivial = PermGroup::trivial(n);
    let got = count(&bf, &trivial)?;
    if got != all.len() {
        return Err(format!("trivial group: classify {got}, brute force {}", all.len()));
    }
    let iso = iso_group(spec.k, spec.s);
    let want = count_orbits(&all, iso.generators())?;
    let got = count(&improved, &iso)?;
    if got != want {
        return Err(format!("iso: classify {got}, brute force {want}"));
    }
    let mut summary = format!("{} arrays, {want} iso", all.len());
    if let Ok(std) = standardize(&bf.lp) {
        let glp = g_lp(&std.lp, &SymmetryOptions::default()).map_err(|e| e.to_string())?.group;
        let want = count_orbits(&all, glp.generators())?;
        let got = count(&improved, &glp)?;
        if got != want {
            return Err(format!("G^LP (order {}): classify {got}, brute force {want}", glp.order()));
        }
        summary += &format!(", {want} under G^LP");
    }
    Ok(summary)
}
