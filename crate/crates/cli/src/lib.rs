//! Command-line orchestration: standardize → symmetry groups → classify.

pub mod lpfile;

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use lpsym::cgraph::{cost_colors, formulation_graph, formulation_group, graph_from_matrix};
use lpsym::classify::{classify_with, ClassifyError, ClassifyOptions};
use lpsym::exactla::{row_space_projector, Rat};
use lpsym::lpsolve::{IntegerProgram, LinearProgram};
use lpsym::oa::{
    build_ilp_bf, build_ilp_improved, eliminate_basic_variables, iso_group, j_characteristics, od_group, r_operation,
    OASpec, SignedArray,
};
use lpsym::permgrp::PermGroup;
use lpsym::stdform::{standardize, StdFormError};
use lpsym::symmetry::{g_lp, g_lp_c, g_null, SymmetryError, SymmetryOptions, SymmetryResult};

pub const JOBS_ENV: &str = "LPSYM_JOBS";

#[derive(Parser, Debug)]
#[command(name = "lpsym", version, about = "Exact LP symmetry groups and OA classification")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Write the JSON report here instead of stdout.
    #[arg(short, long, global = true)]
    pub output: Option<PathBuf>,
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Tier {
    /// Formulation symmetry group of the model as written.
    Formulation,
    /// Symmetry group of the LP relaxation.
    Lp,
    /// Symmetry group of the inequality-only model obtained by eliminating
    /// basic variables (OA specs only).
    Lpleq,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Model {
    /// One equality per t-subset and level tuple.
    Bf,
    /// Linearly independent equalities plus `x_0 >= 1`.
    Improved,
}

#[derive(Args, Debug, Clone)]
pub struct SpecArgs {
    /// Run count; defaults to the smallest valid one.
    #[arg(long = "N", alias = "runs")]
    pub n_runs: Option<u64>,
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = 2)]
    pub s: usize,
    #[arg(long)]
    pub t: usize,
    /// Upper bound on every frequency; defaults to N / s^t.
    #[arg(long = "p-max")]
    pub p_max: Option<u64>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Put an LP file in standard form.
    Standardize {
        input: PathBuf,
        /// Also write the standardized LP in LP-file format.
        #[arg(long)]
        write_lp: Option<PathBuf>,
    },
    /// Symmetry group of an LP file.
    Symgroup {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Tier::Lp)]
        tier: Tier,
        /// Write the colored graph used for the group in DIMACS-like form.
        #[arg(long)]
        dump_graph: Option<PathBuf>,
        #[arg(long, default_value_t = SymmetryOptions::default().coset_cap)]
        coset_cap: usize,
    },
    /// Symmetry group of the OA(N,k,s,t) LP relaxation.
    OaGroup {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, value_enum, default_value_t = Tier::Lp)]
        tier: Tier,
        #[arg(long)]
        dump_graph: Option<PathBuf>,
        #[arg(long, default_value_t = SymmetryOptions::default().coset_cap)]
        coset_cap: usize,
    },
    /// Enumerate OA(N,k,s,t) up to the chosen symmetry group.
    Classify {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, value_enum, default_value_t = Tier::Lp)]
        tier: Tier,
        #[arg(long, value_enum, default_value_t = Model::Improved)]
        model: Model,
        /// Worker threads (default from LPSYM_JOBS, else 1).
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long)]
        node_cap: Option<u64>,
        #[arg(long, default_value_t = SymmetryOptions::default().coset_cap)]
        coset_cap: usize,
    },
    /// J-characteristics of a two-level array (symbols 0/1, one run per line).
    Jchar {
        input: PathBuf,
        /// Largest subset size; defaults to the number of columns.
        #[arg(long)]
        r_max: Option<usize>,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("input LP is infeasible")]
    Infeasible,
    #[error("resource cap hit: {0}")]
    Cap(String),
    #[error("{0}")]
    Other(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Infeasible => 3,
            CliError::Cap(_) => 4,
            CliError::Other(_) => 1,
        }
    }
}

impl From<SymmetryError> for CliError {
    fn from(e: SymmetryError) -> Self {
        match e {
            SymmetryError::CosetCap { .. } => CliError::Cap(e.to_string()),
            e => CliError::Other(e.to_string()),
        }
    }
}

impl From<StdFormError> for CliError {
    fn from(_: StdFormError) -> Self {
        CliError::Infeasible
    }
}

impl From<ClassifyError> for CliError {
    fn from(e: ClassifyError) -> Self {
        match e {
            ClassifyError::NodeCap(_) => CliError::Cap(e.to_string()),
            e => CliError::Other(e.to_string()),
        }
    }
}

/// A finished command: JSON report plus the lines of a plain-text summary.
pub struct Report {
    pub json: Value,
    pub summary: Vec<String>,
    /// Only for `--format text`: body printed before the summary.
    pub text_body: Option<String>,
}

fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    std::fs::read(path).map_err(|e| CliError::Other(format!("{}: {e}", path.display())))
}

fn write(path: &Path, data: &str) -> Result<(), CliError> {
    std::fs::write(path, data).map_err(|e| CliError::Other(format!("{}: {e}", path.display())))
}

fn sha256(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

fn header(command: &str, input_hash: &str) -> serde_json::Map<String, Value> {
    let mut m = serde_json::Map::new();
    m.insert("format".into(), json!(1));
    m.insert("tool".into(), json!("lpsym"));
    m.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    m.insert("command".into(), json!(command));
    m.insert("input_sha256".into(), json!(input_hash));
    m
}

fn group_json(name: &str, g: &PermGroup) -> Value {
    json!({
        "name": name,
        "degree": g.degree(),
        "order": g.order().to_string(),
        "generators": g.generators().iter().map(|p| p.to_string()).collect::<Vec<_>>(),
    })
}

fn points_json(pts: &[Vec<Rat>]) -> Value {
    json!(pts.iter().map(|p| p.iter().map(|v| v.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>())
}

fn parse_lp_file(path: &Path) -> Result<(LinearProgram, String), CliError> {
    let bytes = read(path)?;
    let text = String::from_utf8(bytes.clone()).map_err(|e| CliError::Parse(e.to_string()))?;
    let lp = lpfile::parse_lp(&text).map_err(|e| CliError::Parse(e.to_string()))?;
    Ok((lp, sha256(&bytes)))
}

fn spec_of(a: &SpecArgs) -> Result<OASpec, CliError> {
    let n_runs = match a.n_runs {
        Some(n) => n,
        None => {
            let st = (a.s as u64).checked_pow(a.t as u32).ok_or_else(|| CliError::Parse("s^t overflows".into()))?;
            // With k = t and lambda = 1 the only box is degenerate.
            if a.k > a.t {
                st
            } else {
                2 * st
            }
        }
    };
    let p_max = match (a.p_max, a.n_runs) {
        (None, None) if a.k <= a.t => Some(1),
        (p, _) => p,
    };
    OASpec::new(n_runs, a.k, a.s, a.t, p_max).map_err(|e| CliError::Parse(e.to_string()))
}

fn spec_hash(spec: &OASpec) -> String {
    sha256(format!("N={} k={} s={} t={} p_max={}", spec.n_runs, spec.k, spec.s, spec.t, spec.p_max).as_bytes())
}

fn spec_json(spec: &OASpec) -> Value {
    json!({"N": spec.n_runs, "k": spec.k, "s": spec.s, "t": spec.t, "lambda": spec.lambda, "p_max": spec.p_max})
}

/// All groups computed for an LP under a tier, plus certificates.
struct GroupRun {
    main: PermGroup,
    main_name: &'static str,
    extra: Vec<(&'static str, PermGroup)>,
    certificates: Vec<Vec<Rat>>,
    std_lp: Option<LinearProgram>,
}

fn lp_groups(lp: &LinearProgram, tier: Tier, opts: &SymmetryOptions) -> Result<GroupRun, CliError> {
    let formulation = formulation_group(lp);
    if tier == Tier::Formulation {
        return Ok(GroupRun {
            main: formulation,
            main_name: "formulation",
            extra: vec![],
            certificates: vec![],
            std_lp: None,
        });
    }
    let std = standardize(lp)?.lp;
    let null = g_null(&std)?;
    let lpc: SymmetryResult = g_lp_c(&std, opts)?;
    let full = g_lp(&std, opts)?;
    Ok(GroupRun {
        main: full.group,
        main_name: "lp",
        extra: vec![("formulation", formulation), ("null", null), ("lp_c", lpc.group)],
        certificates: full.certificates,
        std_lp: Some(std),
    })
}

fn dump_graph(path: &Path, lp: &LinearProgram, run: &GroupRun) -> Result<(), CliError> {
    let text = match &run.std_lp {
        None => formulation_graph(lp).to_dimacs(),
        Some(std) => {
            let p = row_space_projector(&std.eq).map_err(|e| CliError::Other(e.to_string()))?;
            graph_from_matrix(&p, &cost_colors(&std.c)).map_err(|e| CliError::Other(e.to_string()))?.to_dimacs()
        }
    };
    write(path, &text)
}

fn groups_report(m: &mut serde_json::Map<String, Value>, run: &GroupRun, summary: &mut Vec<String>) {
    let mut groups = vec![group_json(run.main_name, &run.main)];
    groups.extend(run.extra.iter().map(|(n, g)| group_json(n, g)));
    m.insert("groups".into(), json!(groups));
    m.insert("certificates".into(), points_json(&run.certificates));
    summary.push(format!("{} group order {}", run.main_name, run.main.order()));
    for (n, g) in &run.extra {
        summary.push(format!("{n} group order {}", g.order()));
    }
}

/// The OA model and the group used for branching, per tier. The `lpleq`
/// tier returns the eliminated model over the free variables together with
/// the elimination itself for reconstruction.
struct OaPipeline {
    groups: GroupRun,
    elimination: Option<lpsym::oa::Elimination>,
}

fn oa_pipeline(spec: &OASpec, tier: Tier, opts: &SymmetryOptions) -> Result<OaPipeline, CliError> {
    let bf = build_ilp_bf(spec).map_err(|e| CliError::Parse(e.to_string()))?;
    match tier {
        Tier::Formulation | Tier::Lp => Ok(OaPipeline { groups: lp_groups(&bf.lp, tier, opts)?, elimination: None }),
        Tier::Lpleq => {
            let el = eliminate_basic_variables(&bf).map_err(|e| CliError::Other(e.to_string()))?;
            let mut groups = lp_groups(&el.ilp.lp, Tier::Lp, opts)?;
            groups.main_name = "lpleq";
            Ok(OaPipeline { groups, elimination: Some(el) })
        }
    }
}

fn containments(spec: &OASpec, run: &GroupRun, tier: Tier) -> Value {
    if tier == Tier::Lpleq {
        return Value::Null;
    }
    let g = &run.main;
    let iso = iso_group(spec.k, spec.s);
    let mut v = json!({"contains_iso": iso.is_subgroup_of(g)});
    if spec.s == 2 {
        v["contains_od"] = json!(od_group(spec.k).is_subgroup_of(g));
        v["r_members"] = json!((0..spec.k).map(|i| g.contains(&r_operation(spec.k, i))).collect::<Vec<_>>());
    }
    v
}

fn run_standardize(input: &Path, write_lp: Option<&Path>) -> Result<Report, CliError> {
    let (lp, hash) = parse_lp_file(input)?;
    let t0 = Instant::now();
    let rep = standardize(&lp)?;
    let secs = t0.elapsed().as_secs_f64();
    let text = lpfile::serialize_lp(&rep.lp);
    if let Some(p) = write_lp {
        write(p, &text)?;
    }
    let mut m = header("standardize", &hash);
    m.insert("promoted_rows".into(), json!(rep.promoted_rows));
    m.insert("dropped_inequalities".into(), json!(rep.dropped_inequalities));
    m.insert("dropped_equalities".into(), json!(rep.dropped_equalities));
    m.insert("lp".into(), json!(text));
    m.insert("timings".into(), json!({"standardize_seconds": secs}));
    let summary = vec![
        format!("{} equalities, {} inequalities after standardization", rep.lp.eq.rows(), rep.lp.ineq.rows()),
        format!(
            "promoted {}, dropped {} inequalities and {} equalities",
            rep.promoted_rows.len(),
            rep.dropped_inequalities.len(),
            rep.dropped_equalities.len()
        ),
    ];
    Ok(Report { json: Value::Object(m), summary, text_body: Some(text) })
}

fn run_symgroup(input: &Path, tier: Tier, dump: Option<&Path>, opts: &SymmetryOptions) -> Result<Report, CliError> {
    if tier == Tier::Lpleq {
        return Err(CliError::Parse("tier lpleq needs an OA spec".into()));
    }
    let (lp, hash) = parse_lp_file(input)?;
    let t0 = Instant::now();
    let run = lp_groups(&lp, tier, opts)?;
    let secs = t0.elapsed().as_secs_f64();
    if let Some(p) = dump {
        dump_graph(p, &lp, &run)?;
    }
    let mut m = header("symgroup", &hash);
    m.insert("tier".into(), json!(format!("{tier:?}").to_lowercase()));
    let mut summary = Vec::new();
    groups_report(&mut m, &run, &mut summary);
    m.insert("timings".into(), json!({"group_seconds": secs}));
    Ok(Report { json: Value::Object(m), summary, text_body: None })
}

fn run_oa_group(a: &SpecArgs, tier: Tier, dump: Option<&Path>, opts: &SymmetryOptions) -> Result<Report, CliError> {
    let spec = spec_of(a)?;
    let t0 = Instant::now();
    let pipe = oa_pipeline(&spec, tier, opts)?;
    let secs = t0.elapsed().as_secs_f64();
    if let Some(p) = dump {
        let lp = match &pipe.elimination {
            Some(el) => el.ilp.lp.clone(),
            None => build_ilp_bf(&spec).map_err(|e| CliError::Other(e.to_string()))?.lp,
        };
        dump_graph(p, &lp, &pipe.groups)?;
    }
    let mut m = header("oa-group", &spec_hash(&spec));
    m.insert("spec".into(), spec_json(&spec));
    m.insert("tier".into(), json!(format!("{tier:?}").to_lowercase()));
    let mut summary = Vec::new();
    groups_report(&mut m, &pipe.groups, &mut summary);
    m.insert("containments".into(), containments(&spec, &pipe.groups, tier));
    m.insert("timings".into(), json!({"group_seconds": secs}));
    Ok(Report { json: Value::Object(m), summary, text_body: None })
}

pub fn default_jobs() -> usize {
    std::env::var(JOBS_ENV).ok().and_then(|v| v.parse().ok()).unwrap_or(1)
}

#[allow(clippy::too_many_arguments)]
fn run_classify(
    a: &SpecArgs,
    tier: Tier,
    model: Model,
    jobs: Option<usize>,
    node_cap: Option<u64>,
    opts: &SymmetryOptions,
) -> Result<Report, CliError> {
    let spec = spec_of(a)?;
    let t0 = Instant::now();
    let pipe = oa_pipeline(&spec, tier, opts)?;
    let group_secs = t0.elapsed().as_secs_f64();
    let ilp: IntegerProgram = match (&pipe.elimination, model) {
        (Some(el), _) => el.ilp.clone(),
        (None, Model::Bf) => build_ilp_bf(&spec).map_err(|e| CliError::Other(e.to_string()))?,
        (None, Model::Improved) => build_ilp_improved(&spec).map_err(|e| CliError::Other(e.to_string()))?,
    };
    let copts = ClassifyOptions { z_star: None, node_cap, jobs: jobs.unwrap_or_else(default_jobs) };
    let t1 = Instant::now();
    let run = classify_with(&ilp, &pipe.groups.main, &copts)?;
    let search_secs = t1.elapsed().as_secs_f64();
    let mut solutions: Vec<Vec<i64>> = match &pipe.elimination {
        Some(el) => run
            .solutions
            .iter()
            .map(|s| {
                let xhat: Vec<Rat> = s.iter().map(|&v| Rat::from_int(v)).collect();
                el.reconstruct(&xhat).iter().map(|v| v.to_i64().expect("integral elimination")).collect()
            })
            .collect(),
        None => run.solutions.clone(),
    };
    solutions.sort();
    let mut m = header("classify", &spec_hash(&spec));
    m.insert("spec".into(), spec_json(&spec));
    m.insert("tier".into(), json!(format!("{tier:?}").to_lowercase()));
    m.insert("model".into(), json!(format!("{model:?}").to_lowercase()));
    let mut summary = Vec::new();
    groups_report(&mut m, &pipe.groups, &mut summary);
    m.insert("solution_count".into(), json!(solutions.len()));
    m.insert("solutions".into(), json!(solutions));
    let st = run.stats;
    let stats = json!({
        "nodes": st.nodes,
        "lp_solves": st.lp_solves,
        "infeasible_prunes": st.infeasible_prunes,
        "isomorphism_prunes": st.isomorphism_prunes,
        "bound_prunes": st.bound_prunes,
    });
    m.insert("stats".into(), stats.clone());
    m.insert("timings".into(), json!({"group_seconds": group_secs, "search_seconds": search_secs}));
    summary.push(format!("{} solutions ({} nodes, {} LP solves)", solutions.len(), st.nodes, st.lp_solves));
    summary.push(format!("time: {search_secs:.3}s search ({group_secs:.3}s groups)"));
    let mut body = String::new();
    for s in &solutions {
        body += &s.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ");
        body.push('\n');
    }
    body += &format!("# stats {stats}\n");
    Ok(Report { json: Value::Object(m), summary, text_body: Some(body) })
}

fn run_jchar(input: &Path, r_max: Option<usize>) -> Result<Report, CliError> {
    let bytes = read(input)?;
    let text = String::from_utf8(bytes.clone()).map_err(|e| CliError::Parse(e.to_string()))?;
    let rows = lpfile::parse_array(&text).map_err(|e| CliError::Parse(e.to_string()))?;
    let levels: Vec<Vec<usize>> =
        rows.iter().map(|r| r.iter().map(|&v| usize::try_from(v).unwrap_or(usize::MAX)).collect()).collect();
    let y = SignedArray::from_levels(&levels).map_err(|e| CliError::Parse(e.to_string()))?;
    let k = y.n_cols();
    let js = j_characteristics(&y, r_max.unwrap_or(k));
    let strength =
        (1..=k).take_while(|&r| js.iter().filter(|j| j.subset.len() == r).all(|j| j.value == 0)).last().unwrap_or(0);
    let strength = if r_max.is_some_and(|r| r < k) && strength == r_max.unwrap() { None } else { Some(strength) };
    let mut m = header("jchar", &sha256(&bytes));
    m.insert("runs".into(), json!(y.n_rows()));
    m.insert("factors".into(), json!(k));
    m.insert(
        "j_characteristics".into(),
        json!(js.iter().map(|j| json!({"subset": j.subset, "value": j.value})).collect::<Vec<_>>()),
    );
    m.insert("strength".into(), json!(strength));
    let summary = vec![match strength {
        Some(t) => format!("{} x {k} array of strength {t}", y.n_rows()),
        None => format!("{} x {k} array of strength at least {}", y.n_rows(), r_max.unwrap_or(0)),
    }];
    Ok(Report { json: Value::Object(m), summary, text_body: None })
}

pub fn execute(cli: &Cli) -> Result<Report, CliError> {
    let sym = |cap: usize| SymmetryOptions { coset_cap: cap };
    match &cli.command {
        Command::Standardize { input, write_lp } => run_standardize(input, write_lp.as_deref()),
        Command::Symgroup { input, tier, dump_graph, coset_cap } => {
            run_symgroup(input, *tier, dump_graph.as_deref(), &sym(*coset_cap))
        }
        Command::OaGroup { spec, tier, dump_graph, coset_cap } => {
            run_oa_group(spec, *tier, dump_graph.as_deref(), &sym(*coset_cap))
        }
        Command::Classify { spec, tier, model, jobs, node_cap, coset_cap } => {
            run_classify(spec, *tier, *model, *jobs, *node_cap, &sym(*coset_cap))
        }
        Command::Jchar { input, r_max } => run_jchar(input, *r_max),
    }
}

/// Runs the command, writes the report, and returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    let report = match execute(cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("lpsym: {e}");
            return e.exit_code();
        }
    };
    let out = match cli.format {
        Format::Json => serde_json::to_string_pretty(&report.json).expect("report serializes") + "\n",
        Format::Text => {
            let mut s = report.text_body.clone().unwrap_or_default();
            for l in &report.summary {
                s += &format!("{l}\n");
            }
            s
        }
    };
    match &cli.output {
        Some(p) => {
            if let Err(e) = write(p, &out) {
                eprintln!("lpsym: {e}");
                return e.exit_code();
            }
        }
        None => print!("{out}"),
    }
    if cli.format == Format::Json {
        for l in &report.summary {
            eprintln!("{l}");
        }
    }
    0
}
