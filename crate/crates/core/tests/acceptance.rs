//! Acceptance suite: one PASS/FAIL line per criterion, with the individual
//! checks listed underneath. Exits nonzero if any criterion fails.

mod common;

use std::collections::HashMap;
use std::time::{Duration, Instant};

use lpsym::cgraph::formulation_group;
use lpsym::classify::{check_run, classify, verify_partition};
use lpsym::oa::{build_ilp_bf, build_ilp_improved, iso_group, od_group, r_operation, OASpec};
use lpsym::permgrp::PermGroup;
use lpsym::stdform::standardize;
use lpsym::symmetry::{g_lp, SymmetryOptions};
use num_bigint::BigUint;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

const CASES: u32 = 128;

struct Check {
    ok: bool,
    what: String,
    took: Duration,
}

#[derive(Default)]
struct Criterion {
    checks: Vec<Check>,
}

impl Criterion {
    fn check(&mut self, what: impl Into<String>, budget: Option<Duration>, f: impl FnOnce() -> Result<String, String>) {
        let t = Instant::now();
        let res = f();
        let took = t.elapsed();
        let (mut ok, mut what) = match res {
            Ok(detail) if detail.is_empty() => (true, what.into()),
            Ok(detail) => (true, format!("{}: {detail}", what.into())),
            Err(e) => (false, format!("{}: {e}", what.into())),
        };
        if let Some(b) = budget {
            if took > b {
                ok = false;
                what += &format!(" (over budget {:.0} s)", b.as_secs_f64());
            }
        }
        self.checks.push(Check { ok, what, took });
    }

    fn finish(self, id: usize, title: &str) -> bool {
        let ok = self.checks.iter().all(|c| c.ok);
        let total: Duration = self.checks.iter().map(|c| c.took).sum();
        println!("{} criterion {id}: {title} ({:.1} s)", if ok { "PASS" } else { "FAIL" }, total.as_secs_f64());
        for c in &self.checks {
            println!("    {} {} [{:.2} s]", if c.ok { "ok  " } else { "FAIL" }, c.what, c.took.as_secs_f64());
        }
        ok
    }
}

fn spec(n: u64, k: usize, t: usize, p: u64) -> OASpec {
    OASpec::new(n, k, 2, t, Some(p)).unwrap()
}

fn expect_order(g: &PermGroup, want: u64) -> Result<String, String> {
    let got = g.order();
    if got == BigUint::from(want) {
        Ok(format!("{got}"))
    } else {
        Err(format!("got {got}, expected {want}"))
    }
}

/// `G^LP` of the standardized relaxation of the one-equality-per-tuple model, memoized by spec.
#[derive(Default)]
struct Groups(HashMap<(u64, usize, usize, u64), PermGroup>);

impl Groups {
    fn lp(&mut self, s: &OASpec) -> Result<PermGroup, String> {
        let key = (s.n_runs, s.k, s.t, s.p_max);
        if let Some(g) = self.0.get(&key) {
            return Ok(g.clone());
        }
        let bf = build_ilp_bf(s).map_err(|e| e.to_string())?;
        let std = standardize(&bf.lp).map_err(|e| e.to_string())?;
        let g = g_lp(&std.lp, &SymmetryOptions::default()).map_err(|e| e.to_string())?.group;
        self.0.insert(key, g.clone());
        Ok(g)
    }
}

fn criterion_1(groups: &mut Groups) -> bool {
    let mut c = Criterion::default();
    let five = Some(Duration::from_secs(300));
    for (s, want) in [(spec(2, 3, 1, 1), 48), (spec(4, 3, 2, 1), 48), (spec(8, 4, 2, 2), 384)] {
        c.check(format!("formulation group (k,t) = ({},{})", s.k, s.t), five, || {
            expect_order(&formulation_group(&build_ilp_bf(&s).map_err(|e| e.to_string())?.lp), want)
        });
    }
    c.check("|G(3,2,2)^LP| = 1152", five, || expect_order(&groups.lp(&spec(4, 3, 2, 1))?, 1152));
    c.check("|G(4,2,2)^LP| = 2^4 5!", five, || expect_order(&groups.lp(&spec(8, 4, 2, 2))?, 1920));
    for k in 2..=4usize {
        let want = (1u64 << k) * (1..=k as u64).product::<u64>();
        c.check(format!("|G({k},2,1)^LP| = 2^{k} {k}!"), five, || expect_order(&groups.lp(&spec(2, k, 1, 1))?, want));
    }
    c.check("|G(4,2,3)^LP| > 2^4 5!", five, || {
        let g = groups.lp(&spec(8, 4, 3, 1))?;
        if g.order() > BigUint::from(1920u32) {
            Ok(format!("{}", g.order()))
        } else {
            Err(format!("order {} is not above 1920", g.order()))
        }
    });
    c.finish(1, "group-order goldens")
}

fn criterion_2(groups: &mut Groups) -> bool {
    let mut c = Criterion::default();
    let r1 = r_operation(4, 0);
    c.check("R_1 in G(4,2,2)^LP", None, || {
        groups.lp(&spec(8, 4, 2, 2))?.contains(&r1).then(String::new).ok_or("R_1 missing".into())
    });
    c.check("R_1 not in G(4,2,3)^LP", None, || {
        (!groups.lp(&spec(8, 4, 3, 1))?.contains(&r1)).then(String::new).ok_or("R_1 present".into())
    });
    c.finish(2, "R_i membership for even and odd strength")
}

fn class_count(s: &OASpec, g: &PermGroup, want: usize) -> Result<(String, Vec<Vec<i64>>), String> {
    let ilp = build_ilp_improved(s).map_err(|e| e.to_string())?;
    let run = classify(&ilp, g, None).map_err(|e| e.to_string())?;
    check_run(&run)?;
    let got = run.solutions.len();
    if got != want {
        return Err(format!("got {got} classes, expected {want}"));
    }
    Ok((format!("{got} classes, {} nodes", run.stats.nodes), run.solutions))
}

fn criterion_3(groups: &mut Groups) -> bool {
    let mut c = Criterion::default();
    c.check("OA(4,3,2,2) iso classes = 1 (brute-force oracle)", Some(Duration::from_secs(60)), || {
        let s = spec(4, 3, 2, 1);
        let iso = iso_group(3, 2);
        let oracle = common::count_orbits(&common::brute_force_oas(&s), iso.generators())?;
        if oracle != 1 {
            return Err(format!("oracle counts {oracle}"));
        }
        class_count(&s, &iso, 1).map(|r| r.0)
    });
    let s = spec(24, 5, 3, 3);
    c.check("OA(24,5,2,3) iso classes = 1", None, || class_count(&s, &iso_group(5, 2), 1).map(|r| r.0));
    c.check("OA(24,5,2,3) G^LP classes = 1", None, || class_count(&s, &groups.lp(&s)?, 1).map(|r| r.0));

    let s = spec(24, 5, 2, 6);
    let t = Instant::now();
    c.check("OA(24,5,2,2) iso classes = 63", None, || class_count(&s, &iso_group(5, 2), 63).map(|r| r.0));
    c.check("OA(24,5,2,2) OD classes = 31 via G^LP", None, || class_count(&s, &groups.lp(&s)?, 31).map(|r| r.0));
    let spent = t.elapsed();
    c.check("OA(24,5,2,2) within 30 min", None, || {
        (spent <= Duration::from_secs(1800)).then(|| format!("{:.1} s", spent.as_secs_f64())).ok_or("too slow".into())
    });

    let s = spec(20, 6, 2, 5);
    let t = Instant::now();
    let mut iso_solutions = Vec::new();
    c.check("OA(20,6,2,2) iso classes = 75", None, || {
        class_count(&s, &iso_group(6, 2), 75).map(|(d, sol)| {
            iso_solutions = sol;
            d
        })
    });
    c.check("OA(20,6,2,2) OD classes = 23 via G^LP", None, || class_count(&s, &groups.lp(&s)?, 23).map(|r| r.0));
    let spent = t.elapsed();
    c.check("OA(20,6,2,2) within 60 min", None, || {
        (spent <= Duration::from_secs(3600)).then(|| format!("{:.1} s", spent.as_secs_f64())).ok_or("too slow".into())
    });
    c.check("verify_partition merges the 75 iso classes into 23 OD orbits", None, || {
        if iso_solutions.len() != 75 {
            return Err("iso run did not produce 75 classes".into());
        }
        let classes = verify_partition(&iso_solutions, &od_group(6));
        (classes.len() == 23).then(String::new).ok_or(format!("{} orbits", classes.len()))
    });
    c.finish(3, "classification goldens")
}

fn run_property<S: Strategy>(strategy: S, f: impl Fn(S::Value) -> Result<(), String>) -> Result<String, String>
where
    S::Value: std::fmt::Debug,
{
    let config = Config { cases: CASES, failure_persistence: None, ..Config::default() };
    let mut runner = TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha));
    runner
        .run(&strategy, |v| f(v).map_err(TestCaseError::fail))
        .map(|_| format!("{CASES} cases"))
        .map_err(|e| e.to_string())
}

fn criterion_4() -> bool {
    let mut c = Criterion::default();
    let arrays = || {
        (1usize..=5, 1usize..=12)
            .prop_flat_map(|(k, n)| prop::collection::vec(prop::collection::vec(any::<bool>(), k), n))
    };
    c.check("projector laws", None, || run_property(any::<u64>(), common::check_projector));
    c.check("row-space rank identity for G^Null generators", None, || {
        run_property(any::<u64>(), common::check_rank_identity)
    });
    c.check("G^LP generators preserve sampled feasible points and objective", None, || {
        run_property(any::<u64>(), common::check_pointwise)
    });
    c.check("J-characteristics vanish iff strength holds", None, || {
        run_property(arrays(), |rows| common::check_jchar(&rows))
    });
    c.check("J-characteristic parity under OD operations", None, || {
        run_property((arrays(), prop::collection::vec(0usize..64, 0..24)), |(rows, w)| common::check_parity(&rows, &w))
    });
    c.check("formulation <= G^LP_c <= G^Null and G^LP_c <= G^LP", None, || {
        run_property(any::<u64>(), common::check_tower)
    });
    c.finish(4, "randomized property suites")
}

fn criterion_5() -> bool {
    let mut c = Criterion::default();
    let t = Instant::now();
    for s in common::oracle_specs() {
        c.check(format!("OA({},{},{},{}) p_max={}", s.n_runs, s.k, s.s, s.t, s.p_max), None, || {
            common::oracle_case(&s)
        });
    }
    let spent = t.elapsed();
    c.check("oracle sweep within 10 min", None, || {
        (spent <= Duration::from_secs(600)).then(|| format!("{:.1} s", spent.as_secs_f64())).ok_or("too slow".into())
    });
    c.finish(5, "classify agrees with brute-force orbit counts for s^k <= 16")
}

fn criterion_6() -> bool {
    let mut c = Criterion::default();
    let mut full = 0;
    for seed in 0..50u64 {
        c.check(format!("random LP seed {seed}"), None, || {
            let case = common::check_stdform_case(seed, seed % 2 == 0)?;
            full += usize::from(case.full_dim);
            Ok(if case.full_dim { "full-dimensional, G^LP = formulation group".into() } else { String::new() })
        });
    }
    c.check("full-dimensional cases exercised", None, || {
        (full > 0).then(|| format!("{full} of 50")).ok_or("none".into())
    });
    c.finish(6, "standard-form soundness")
}

fn main() {
    let mut groups = Groups::default();
    let results = [
        criterion_1(&mut groups),
        criterion_2(&mut groups),
        criterion_3(&mut groups),
        criterion_4(),
        criterion_5(),
        criterion_6(),
    ];
    let failed = results.iter().filter(|&&ok| !ok).count();
    println!("acceptance: {} of {} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
