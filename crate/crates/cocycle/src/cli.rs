//! Batch front end: one command per invocation, a JSON instance on stdin
//! or file, one JSON report line on stdout. Exit 0 when the computation
//! succeeds or the property holds, 2 when well-formed input fails the
//! check (the report then carries a concrete witness), 1 on input or
//! internal errors.

use crate::abgroup::{
    localization_kernel, p_primary, product_localization_check, FPGroup, GroupInvariants,
};
use crate::cochain::{
    refinement_homotopy_check, tautological_refinement, FamilyCochain, FamilyComplex,
    RefinementMap, SubgroupFamily, TupleMode,
};
use crate::intlin::IntMatrix;
use crate::lattice::{
    close_partial, counterexample_h1, generic_lines, is_distributive, theorem4_harness,
    ClosureCaps,
};
use crate::simplicial::{
    alternating_project, build_h, carrier_contraction, cohomology_full, phi, quasi_iso_check,
    sys_cochains_equal, ConstantSystem, SimplicialComplex, SingularChain, SingularSimplex,
    SysCochain,
};
use crate::solver::{
    brute_force_solve_with_budget, check_cocycle, plant, solve, verify, CongruenceInstance,
    LocalInstance, SolverError, TupleViolation,
};
use clap::{Parser, Subcommand, ValueEnum};
use itertools::Itertools;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use serde_json::{json, Map, Value};
use std::collections::{BTreeMap, BTreeSet};
use std::io::Read;
use std::time::Instant;

const DEFAULT_MAX_DEGREE: usize = 8;
const DEFAULT_MAX_CLOSURE: usize = 10_000;
const DEFAULT_BRUTE_BUDGET: f64 = 1e6;

#[derive(Parser)]
#[command(name = "cocycle", version, about = "Integral congruence systems and their cohomology")]
struct Cli {
    /// Append wall-clock timing to the report (the report is otherwise
    /// byte-stable for fixed input, flags, and seed).
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check the cocycle condition of a congruence instance.
    Check {
        /// Instance file; `-` reads stdin.
        input: String,
    },
    /// Decide a congruence instance and produce a solution.
    Solve {
        input: String,
    },
    /// Cohomology of a subgroup-family complex at one degree.
    Cohomology {
        input: String,
        #[arg(long)]
        degree: usize,
        #[arg(long, value_enum, default_value_t = ModeArg::Increasing)]
        mode: ModeArg,
        /// Degree cap; mirrors COCYCLE_MAX_DEGREE.
        #[arg(long)]
        max_degree: Option<usize>,
    },
    /// Close a family under + and ∩ and test distributivity.
    Lattice {
        input: String,
        /// Closure element cap; mirrors COCYCLE_MAX_CLOSURE.
        #[arg(long)]
        max_closure: Option<usize>,
    },
    /// Generic lines whose degree-1 cohomology carries an unsolvable cocycle.
    Counterexample {
        #[arg(long)]
        rank: usize,
        #[arg(long)]
        lines: usize,
        /// Random lines instead of the standard instance.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Verify the singular-chain identities on a finite complex.
    SimplicialVerify {
        input: String,
        /// Top degree to verify (default 3).
        #[arg(long)]
        degree: Option<usize>,
        #[arg(long)]
        max_degree: Option<usize>,
    },
    /// Verify the homotopy between two refinement maps on random cochains.
    Refine {
        input: String,
        /// Top cochain degree to test (default 2).
        #[arg(long)]
        degree: Option<usize>,
        #[arg(long)]
        max_degree: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run the randomized property harness end to end.
    Selftest {
        #[arg(long)]
        seed: Option<u64>,
        /// 0 = smoke test; larger values multiply the trial counts.
        #[arg(long)]
        scale: Option<u32>,
        #[arg(long)]
        max_closure: Option<usize>,
        /// Candidate cap for the exhaustive solver; mirrors COCYCLE_BRUTE_BUDGET.
        #[arg(long)]
        brute_budget: Option<f64>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Full,
    Increasing,
}

impl ModeArg {
    fn tuple_mode(self) -> TupleMode {
        match self {
            ModeArg::Full => TupleMode::Full,
            ModeArg::Increasing => TupleMode::Increasing,
        }
    }

    fn name(self) -> &'static str {
        match self {
            ModeArg::Full => "full",
            ModeArg::Increasing => "increasing",
        }
    }
}

enum Outcome {
    Holds(Map<String, Value>),
    Fails(Map<String, Value>),
}

type CmdResult = Result<Outcome, String>;

/// Parses arguments, runs one command, prints the report, and returns the
/// process exit code.
pub fn run<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e)
            if matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            ) =>
        {
            print!("{e}");
            return 0;
        }
        Err(e) => {
            emit("error", object(&[("message", json!(e.to_string()))]), None);
            return 1;
        }
    };
    let start = Instant::now();
    let timing = cli.timing.then(|| start);
    match dispatch(cli.command) {
        Ok(Outcome::Holds(payload)) => {
            emit("ok", payload, timing);
            0
        }
        Ok(Outcome::Fails(payload)) => {
            emit("fail", payload, timing);
            2
        }
        Err(message) => {
            emit("error", object(&[("message", json!(message))]), timing);
            1
        }
    }
}

fn emit(status: &str, mut payload: Map<String, Value>, timing: Option<Instant>) {
    payload.insert("status".into(), json!(status));
    if let Some(start) = timing {
        payload.insert("timing_ms".into(), json!(start.elapsed().as_millis() as u64));
    }
    println!("{}", Value::Object(payload));
}

fn object(entries: &[(&str, Value)]) -> Map<String, Value> {
    entries
        .iter()
        .map(|(k, v)| (k.to_string(), v.clone()))
        .collect()
}

fn dispatch(cmd: Cmd) -> CmdResult {
    match cmd {
        Cmd::Check { input } => cmd_check(read_instance(&input)?),
        Cmd::Solve { input } => cmd_solve(read_instance(&input)?),
        Cmd::Cohomology { input, degree, mode, max_degree } => {
            cmd_cohomology(read_instance(&input)?, degree, mode, max_degree)
        }
        Cmd::Lattice { input, max_closure } => cmd_lattice(read_instance(&input)?, max_closure),
        Cmd::Counterexample { rank, lines, seed } => cmd_counterexample(rank, lines, seed),
        Cmd::SimplicialVerify { input, degree, max_degree } => {
            cmd_simplicial(read_instance(&input)?, degree, max_degree)
        }
        Cmd::Refine { input, degree, max_degree, seed } => {
            cmd_refine(read_instance(&input)?, degree, max_degree, seed)
        }
        Cmd::Selftest { seed, scale, max_closure, brute_budget } => {
            cmd_selftest(seed, scale, max_closure, brute_budget)
        }
    }
}

// ---- instance files ----------------------------------------------------

enum InstanceFile {
    Gcd(GcdCongruenceFile),
    Family(FamilyFile),
    Refinement(RefinementFile),
    Simplicial(SimplicialFile),
}

impl InstanceFile {
    fn kind(&self) -> &'static str {
        match self {
            InstanceFile::Gcd(_) => "gcd_congruence",
            InstanceFile::Family(_) => "subgroup_family",
            InstanceFile::Refinement(_) => "refinement",
            InstanceFile::Simplicial(_) => "simplicial",
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GcdCongruenceFile {
    indices: Vec<i64>,
    n: usize,
    #[serde(default)]
    a: BTreeMap<String, JsonInt>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FamilyFile {
    ambient_rank: usize,
    /// Relation columns of the ambient group; empty means free.
    #[serde(default)]
    relations: Vec<Vec<JsonInt>>,
    /// One generator-column list per member.
    members: Vec<Vec<Vec<JsonInt>>>,
    #[serde(default)]
    labels: Option<Vec<i64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RefinementFile {
    source: FamilyFile,
    target: FamilyFile,
    /// Source position per target position.
    tau: Vec<usize>,
    sigma: Vec<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SimplicialFile {
    vertices: usize,
    simplices: Vec<Vec<usize>>,
    /// Constant coefficients, given by invariants.
    coefficients: CoefficientsFile,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CoefficientsFile {
    #[serde(default)]
    free_rank: usize,
    #[serde(default)]
    torsion: Vec<JsonInt>,
}

/// An integer that may exceed 64 bits, written as a decimal string.
#[derive(Deserialize)]
#[serde(untagged)]
enum JsonInt {
    Small(i64),
    Big(String),
}

impl JsonInt {
    fn to_bigint(&self) -> Result<BigInt, String> {
        match self {
            JsonInt::Small(v) => Ok(BigInt::from(*v)),
            JsonInt::Big(s) => s
                .trim()
                .parse::<BigInt>()
                .map_err(|_| format!("not an integer: {s:?}")),
        }
    }
}

fn read_instance(path: &str) -> Result<InstanceFile, String> {
    let text = if path == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| format!("reading stdin: {e}"))?;
        buf
    } else {
        std::fs::read_to_string(path).map_err(|e| format!("reading {path}: {e}"))?
    };
    let mut value: Value =
        serde_json::from_str(&text).map_err(|e| format!("invalid JSON: {e}"))?;
    let obj = value
        .as_object_mut()
        .ok_or("the instance must be a JSON object")?;
    let ty = obj
        .remove("type")
        .ok_or(r#"missing "type" field"#)?
        .as_str()
        .ok_or(r#""type" must be a string"#)?
        .to_string();
    let body = Value::Object(std::mem::take(obj));
    let ctx = |e: serde_json::Error| format!("{ty}: {e}");
    match ty.as_str() {
        "gcd_congruence" => serde_json::from_value(body).map(InstanceFile::Gcd).map_err(ctx),
        "subgroup_family" => serde_json::from_value(body).map(InstanceFile::Family).map_err(ctx),
        "refinement" => serde_json::from_value(body).map(InstanceFile::Refinement).map_err(ctx),
        "simplicial" => serde_json::from_value(body).map(InstanceFile::Simplicial).map_err(ctx),
        other => Err(format!("unknown instance type {other:?}")),
    }
}

fn parse_tuple_key(key: &str) -> Result<Vec<i64>, String> {
    key.split(',')
        .map(|part| {
            part.trim()
                .parse::<i64>()
                .map_err(|_| format!("bad tuple key {key:?}"))
        })
        .collect()
}

fn build_congruence(f: &GcdCongruenceFile) -> Result<CongruenceInstance, String> {
    let mut data = BTreeMap::new();
    for (key, value) in &f.a {
        data.insert(parse_tuple_key(key)?, value.to_bigint()?);
    }
    CongruenceInstance::new(f.indices.iter().copied(), f.n, data).map_err(|e| e.to_string())
}

fn build_family(f: &FamilyFile) -> Result<SubgroupFamily, String> {
    if f.ambient_rank == 0 {
        return Err("ambient_rank must be at least 1".into());
    }
    if f.members.is_empty() {
        return Err("a family needs at least one member".into());
    }
    let column = |c: &Vec<JsonInt>, what: &str| -> Result<Vec<BigInt>, String> {
        if c.len() != f.ambient_rank {
            return Err(format!(
                "{what} has {} entries, expected ambient_rank = {}",
                c.len(),
                f.ambient_rank
            ));
        }
        c.iter().map(JsonInt::to_bigint).collect()
    };
    let relations: Vec<Vec<BigInt>> = f
        .relations
        .iter()
        .map(|c| column(c, "a relation column"))
        .collect::<Result<_, _>>()?;
    let ambient = FPGroup::new(f.ambient_rank, IntMatrix::from_cols(f.ambient_rank, &relations));
    let mut members = Vec::with_capacity(f.members.len());
    for generators in &f.members {
        let cols: Vec<Vec<BigInt>> = generators
            .iter()
            .map(|c| column(c, "a generator column"))
            .collect::<Result<_, _>>()?;
        members.push(ambient.subgroup(IntMatrix::from_cols(f.ambient_rank, &cols)));
    }
    let labels: Vec<i64> = match &f.labels {
        Some(ls) => {
            if ls.len() != members.len() {
                return Err("labels and members differ in length".into());
            }
            if ls.iter().duplicates().next().is_some() {
                return Err("labels must be distinct".into());
            }
            ls.clone()
        }
        None => (1..=members.len() as i64).collect(),
    };
    Ok(SubgroupFamily::new(ambient, labels, members))
}

fn family_of(inst: InstanceFile, cmd: &str) -> Result<SubgroupFamily, String> {
    match inst {
        InstanceFile::Family(f) => build_family(&f),
        InstanceFile::Gcd(f) => {
            if f.indices.is_empty() || f.indices.iter().any(|&i| i < 1) {
                return Err("indices must be positive".into());
            }
            let distinct: BTreeSet<i64> = f.indices.iter().copied().collect();
            Ok(SubgroupFamily::gcd_family(
                &distinct.into_iter().collect::<Vec<_>>(),
            ))
        }
        other => Err(format!(
            "{cmd} expects a subgroup_family or gcd_congruence instance, found {}",
            other.kind()
        )),
    }
}

fn gcd_of(inst: InstanceFile, cmd: &str) -> Result<GcdCongruenceFile, String> {
    match inst {
        InstanceFile::Gcd(f) => Ok(f),
        other => Err(format!(
            "{cmd} expects a gcd_congruence instance, found {}",
            other.kind()
        )),
    }
}

// ---- report helpers ----------------------------------------------------

fn int_json(v: &BigInt) -> Value {
    match v.to_i64() {
        Some(small) => json!(small),
        None => json!(v.to_string()),
    }
}

fn key_i64(t: &[i64]) -> String {
    t.iter().join(",")
}

fn invariants_json(inv: &GroupInvariants) -> Value {
    json!({
        "free_rank": inv.free_rank,
        "torsion": inv.torsion.iter().map(int_json).collect::<Vec<_>>(),
        "group": inv.to_string(),
    })
}

fn violations_json(violations: &[TupleViolation]) -> Value {
    violations
        .iter()
        .map(|v| {
            json!({
                "tuple": key_i64(&v.tuple),
                "modulus": int_json(&v.modulus),
                "residue": int_json(&v.residue),
            })
        })
        .collect()
}

fn matrix_cols_json(m: &IntMatrix) -> Value {
    (0..m.cols())
        .map(|j| m.col(j).iter().map(int_json).collect::<Vec<_>>())
        .collect()
}

fn resolve_usize(flag: Option<usize>, env: &str, default: usize) -> Result<usize, String> {
    if let Some(v) = flag {
        return Ok(v);
    }
    match std::env::var(env) {
        Ok(raw) => raw
            .trim()
            .parse()
            .map_err(|_| format!("{env} must be an unsigned integer, got {raw:?}")),
        Err(_) => Ok(default),
    }
}

fn resolve_budget(flag: Option<f64>) -> Result<f64, String> {
    let v = match flag {
        Some(v) => v,
        None => match std::env::var("COCYCLE_BRUTE_BUDGET") {
            Ok(raw) => raw
                .trim()
                .parse()
                .map_err(|_| format!("COCYCLE_BRUTE_BUDGET must be a number, got {raw:?}"))?,
            Err(_) => DEFAULT_BRUTE_BUDGET,
        },
    };
    if v < 1.0 {
        return Err("the brute-force budget must be at least 1".into());
    }
    Ok(v)
}

// ---- commands ----------------------------------------------------------

fn cmd_check(inst: InstanceFile) -> CmdResult {
    let instance = build_congruence(&gcd_of(inst, "check")?)?;
    let report = check_cocycle(&instance);
    let mut payload = object(&[("command", json!("check")), ("cocycle", json!(report.ok))]);
    if report.ok {
        Ok(Outcome::Holds(payload))
    } else {
        payload.insert("witnesses".into(), violations_json(&report.violations));
        Ok(Outcome::Fails(payload))
    }
}

fn cmd_solve(inst: InstanceFile) -> CmdResult {
    let instance = build_congruence(&gcd_of(inst, "solve")?)?;
    match solve(&instance) {
        Ok(sol) => {
            let x: Map<String, Value> = sol
                .x
                .iter()
                .map(|(t, v)| (key_i64(t), int_json(v)))
                .collect();
            Ok(Outcome::Holds(object(&[
                ("command", json!("solve")),
                ("modulus", int_json(&sol.modulus)),
                ("x", Value::Object(x)),
            ])))
        }
        Err(SolverError::CocycleViolation(violations)) => Ok(Outcome::Fails(object(&[
            ("command", json!("solve")),
            ("solvable", json!(false)),
            ("witnesses", violations_json(&violations)),
        ]))),
        Err(e) => Err(e.to_string()),
    }
}

fn cmd_cohomology(
    inst: InstanceFile,
    degree: usize,
    mode: ModeArg,
    max_degree: Option<usize>,
) -> CmdResult {
    let cap = resolve_usize(max_degree, "COCYCLE_MAX_DEGREE", DEFAULT_MAX_DEGREE)?;
    if degree > cap {
        return Err(format!(
            "degree {degree} exceeds the cap {cap}; raise --max-degree or COCYCLE_MAX_DEGREE"
        ));
    }
    let family = family_of(inst, "cohomology")?;
    let complex = FamilyComplex::with_max_degree(family, mode.tuple_mode(), degree + 1);
    let inv = complex.cohomology(degree).map_err(|e| e.to_string())?;
    Ok(Outcome::Holds(object(&[
        ("command", json!("cohomology")),
        ("degree", json!(degree)),
        ("mode", json!(mode.name())),
        ("h", invariants_json(&inv)),
    ])))
}

fn cmd_lattice(inst: InstanceFile, max_closure: Option<usize>) -> CmdResult {
    let cap = resolve_usize(max_closure, "COCYCLE_MAX_CLOSURE", DEFAULT_MAX_CLOSURE)?;
    let family = family_of(inst, "lattice")?;
    let caps = ClosureCaps { max_elements: cap, max_rounds: 200 };
    let (lattice, closed) = close_partial(&family, caps);
    let report = is_distributive(&lattice);
    let mut payload = object(&[
        ("command", json!("lattice")),
        ("closed", json!(closed)),
        ("elements", json!(lattice.len())),
        ("distributive", json!(report.distributive)),
    ]);
    match (closed, report.witness) {
        (_, Some((b, c, d))) => {
            let part = |i: usize| matrix_cols_json(&lattice.elements()[i].key());
            payload.insert(
                "witness".into(),
                json!({
                    "triple": [b, c, d],
                    "b": part(b),
                    "c": part(c),
                    "d": part(d),
                }),
            );
            Ok(Outcome::Fails(payload))
        }
        (true, None) => Ok(Outcome::Holds(payload)),
        (false, None) => Err(format!(
            "closure cap ({cap} elements) exceeded before a verdict; raise --max-closure or COCYCLE_MAX_CLOSURE"
        )),
    }
}

fn cmd_counterexample(rank: usize, lines: usize, seed: Option<u64>) -> CmdResult {
    let instance = generic_lines(rank, lines, seed).map_err(|e| e.to_string())?;
    if rank == 3 && lines == 4 {
        let report = counterexample_h1(&instance).map_err(|e| e.to_string())?;
        let complex = FamilyComplex::with_max_degree(report.family.clone(), TupleMode::Increasing, 2);
        let g = report.family.ambient().ambient_rank();
        let cocycle: Map<String, Value> = complex
            .tuples(1)
            .into_iter()
            .filter_map(|t| {
                let v = report.cocycle.value(&t, g);
                if v.iter().all(Zero::is_zero) {
                    return None;
                }
                let labels: Vec<i64> = t.iter().map(|&p| report.family.labels()[p]).collect();
                Some((key_i64(&labels), v.iter().map(int_json).collect()))
            })
            .collect();
        Ok(Outcome::Holds(object(&[
            ("command", json!("counterexample")),
            ("rank", json!(rank)),
            ("lines", json!(lines)),
            ("h1", invariants_json(&report.h1)),
            ("h1_free_rank", json!(report.h1.free_rank)),
            ("cocycle", Value::Object(cocycle)),
            ("solvable", json!(false)),
        ])))
    } else {
        let family = instance.family();
        let complex = FamilyComplex::with_max_degree(family, TupleMode::Increasing, 2);
        let inv = complex.cohomology(1).map_err(|e| e.to_string())?;
        let mut payload = object(&[
            ("command", json!("counterexample")),
            ("rank", json!(rank)),
            ("lines", json!(lines)),
            ("h1", invariants_json(&inv)),
            ("h1_free_rank", json!(inv.free_rank)),
        ]);
        if inv.is_trivial() {
            payload.insert(
                "witness".into(),
                json!("H^1 vanishes at this rank and line count"),
            );
            Ok(Outcome::Fails(payload))
        } else {
            Ok(Outcome::Holds(payload))
        }
    }
}

fn cmd_simplicial(
    inst: InstanceFile,
    degree: Option<usize>,
    max_degree: Option<usize>,
) -> CmdResult {
    let cap = resolve_usize(max_degree, "COCYCLE_MAX_DEGREE", DEFAULT_MAX_DEGREE)?;
    let top = match degree {
        Some(d) if d > cap => {
            return Err(format!(
                "degree {d} exceeds the cap {cap}; raise --max-degree or COCYCLE_MAX_DEGREE"
            ))
        }
        Some(0) | None if cap == 0 => return Err("the identity battery needs degree >= 1".into()),
        Some(0) => return Err("the identity battery needs degree >= 1".into()),
        Some(d) => d,
        None => 3.min(cap),
    };
    let file = match inst {
        InstanceFile::Simplicial(f) => f,
        other => {
            return Err(format!(
                "simplicial-verify expects a simplicial instance, found {}",
                other.kind()
            ))
        }
    };
    if file.vertices == 0 {
        return Err("the complex needs at least one vertex".into());
    }
    for face in &file.simplices {
        if face.is_empty() {
            return Err("simplices must be nonempty".into());
        }
        if let Some(&v) = face.iter().find(|&&v| v >= file.vertices) {
            return Err(format!("vertex {v} is out of range (vertices = {})", file.vertices));
        }
    }
    let torsion: Vec<BigInt> = file
        .coefficients
        .torsion
        .iter()
        .map(JsonInt::to_bigint)
        .collect::<Result<_, _>>()?;
    if file.coefficients.free_rank + torsion.len() == 0 {
        return Err("the coefficient group must have positive rank or torsion".into());
    }
    let complex = SimplicialComplex::new(file.vertices, &file.simplices);
    let system = ConstantSystem {
        group: FPGroup::from_invariants(file.coefficients.free_rank, &torsion),
    };
    let results = simplicial_battery(&complex, &system, top, 0);
    let identities: Vec<Value> = results
        .iter()
        .map(|(name, ok, _)| json!({"name": name, "ok": ok}))
        .collect();
    let mut payload = object(&[
        ("command", json!("simplicial-verify")),
        ("degree", json!(top)),
        ("identities", json!(identities)),
    ]);
    match results.iter().find(|(_, ok, _)| !ok) {
        None => Ok(Outcome::Holds(payload)),
        Some((name, _, at)) => {
            payload.insert(
                "witness".into(),
                json!({"identity": name, "at": at.clone().unwrap_or_default()}),
            );
            Ok(Outcome::Fails(payload))
        }
    }
}

fn cmd_refine(
    inst: InstanceFile,
    degree: Option<usize>,
    max_degree: Option<usize>,
    seed: Option<u64>,
) -> CmdResult {
    let cap = resolve_usize(max_degree, "COCYCLE_MAX_DEGREE", DEFAULT_MAX_DEGREE)?;
    if cap == 0 {
        return Err("the homotopy needs degree >= 1".into());
    }
    let top = match degree {
        Some(0) => return Err("the homotopy needs degree >= 1".into()),
        Some(d) if d > cap => {
            return Err(format!(
                "degree {d} exceeds the cap {cap}; raise --max-degree or COCYCLE_MAX_DEGREE"
            ))
        }
        Some(d) => d,
        None => 2.min(cap),
    };
    let file = match inst {
        InstanceFile::Refinement(f) => f,
        other => {
            return Err(format!(
                "refine expects a refinement instance, found {}",
                other.kind()
            ))
        }
    };
    let source = build_family(&file.source)?;
    let target = build_family(&file.target)?;
    for (name, map) in [("tau", &file.tau), ("sigma", &file.sigma)] {
        if map.len() != target.len() {
            return Err(format!(
                "{name} must assign one source position per target member ({} expected, {} given)",
                target.len(),
                map.len()
            ));
        }
        if let Some(&bad) = map.iter().find(|&&i| i >= source.len()) {
            return Err(format!("{name} references source position {bad}, out of range"));
        }
    }
    let tau = RefinementMap::new(source.clone(), target.clone(), file.tau.clone())
        .map_err(|e| format!("tau: {e}"))?;
    let sigma = RefinementMap::new(source.clone(), target.clone(), file.sigma.clone())
        .map_err(|e| format!("sigma: {e}"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed.unwrap_or(0));
    let g = source.ambient().ambient_rank();
    let trials = 3usize;
    let mut failure: Option<(usize, usize)> = None;
    'outer: for d in 1..=top {
        let complex = FamilyComplex::with_max_degree(source.clone(), TupleMode::Full, d + 1);
        for trial in 0..trials {
            let mut f = FamilyCochain::zero(d);
            for t in complex.tuples(d) {
                let coords: Vec<BigInt> =
                    (0..g).map(|_| BigInt::from(rng.gen_range(-9..=9i64))).collect();
                if !coords.iter().all(Zero::is_zero) {
                    f.set(t, coords);
                }
            }
            if !refinement_homotopy_check(&tau, &sigma, &f) {
                failure = Some((d, trial));
                break 'outer;
            }
        }
    }
    let mut payload = object(&[
        ("command", json!("refine")),
        ("degrees", json!((1..=top).collect::<Vec<_>>())),
        ("cochains_per_degree", json!(trials)),
        ("homotopy_identity", json!(failure.is_none())),
    ]);
    match failure {
        None => Ok(Outcome::Holds(payload)),
        Some((d, trial)) => {
            payload.insert("witness".into(), json!({"degree": d, "trial": trial}));
            Ok(Outcome::Fails(payload))
        }
    }
}

// ---- the singular-chain identity battery --------------------------------

fn simplicial_battery(
    k: &SimplicialComplex,
    v: &ConstantSystem,
    top: usize,
    seed: u64,
) -> Vec<(&'static str, bool, Option<String>)> {
    let mut results = Vec::new();
    let mut push = |name: &'static str, witness: Option<String>| {
        results.push((name, witness.is_none(), witness));
    };

    let mut witness = None;
    for n in 2..=top {
        for s in k.singular_simplices(n) {
            if !SingularChain::generator(s.clone()).boundary().boundary().is_zero() {
                witness = Some(format!("{:?}", s.verts));
            }
        }
    }
    push("boundary-squares-to-zero", witness);

    let mut witness = None;
    for s in k.singular_simplices(1) {
        if !SingularChain::generator(s.clone()).boundary().augmentation().is_zero() {
            witness = Some(format!("{:?}", s.verts));
        }
    }
    push("augmentation-kills-boundaries", witness);

    // d kappa + kappa d = id on chains carried by s (augmented in degree 0).
    let mut witness = None;
    for n in 0..top {
        for s in k.singular_simplices(n.max(1)) {
            for verts in (0..=n).map(|_| s.verts.clone()).multi_cartesian_product() {
                let t = SingularSimplex { verts };
                let c = SingularChain::generator(t);
                let kc = carrier_contraction(&s, &c);
                let ok = if n == 0 {
                    let mut expect = c.clone();
                    expect.add_term(
                        SingularSimplex { verts: vec![s.verts[0]] },
                        -c.augmentation(),
                    );
                    kc.boundary() == expect
                } else {
                    kc.boundary().add(&carrier_contraction(&s, &c.boundary())) == c
                };
                if !ok {
                    witness = Some(format!("carrier {:?}", s.verts));
                }
            }
        }
    }
    push("cone-contraction", witness);

    let h = build_h(k, top);
    let mut witness = None;
    for n in 1..=top {
        for s in k.singular_simplices(n) {
            let lhs = h.tables[n].apply(&s).boundary();
            let mut rhs = phi(&s);
            for (face, c) in SingularChain::generator(s.clone()).boundary().terms {
                for (u, d) in h.tables[n - 1].apply(&face).terms {
                    rhs.add_term(u, -(d * &c));
                }
            }
            if lhs != rhs {
                witness = Some(format!("{:?}", s.verts));
            }
        }
    }
    push("homotopy-recurrence", witness);

    let rank = v.group.ambient_rank();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x51AB);
    let mut witness = None;
    for d in 1..=top.min(2) {
        for _ in 0..3 {
            let mut c = SysCochain::zero(d);
            for s in k.singular_simplices(d) {
                let coords: Vec<BigInt> =
                    (0..rank).map(|_| BigInt::from(rng.gen_range(-9..=9i64))).collect();
                if !coords.iter().all(Zero::is_zero) {
                    c.set(s, coords);
                }
            }
            let once = alternating_project(k, v, &c);
            let twice = alternating_project(k, v, &once);
            if !sys_cochains_equal(k, v, &once, &twice) {
                witness = Some(format!("degree {d}"));
            }
        }
    }
    push("alternating-projector-idempotent", witness);

    let mut witness = None;
    for n in 0..=top.min(2) {
        if !quasi_iso_check(k, v, n) {
            witness = Some(format!("degree {n}"));
        }
    }
    push("full-vs-alternating-cohomology", witness);

    results
}

// ---- selftest ------------------------------------------------------------

fn cmd_selftest(
    seed: Option<u64>,
    scale: Option<u32>,
    max_closure: Option<usize>,
    brute_budget: Option<f64>,
) -> CmdResult {
    let seed = seed.unwrap_or(2026);
    let scale = scale.unwrap_or(1);
    let closure_cap = resolve_usize(max_closure, "COCYCLE_MAX_CLOSURE", DEFAULT_MAX_CLOSURE)?;
    let budget = resolve_budget(brute_budget)?;
    let checks = run_selftest(seed, scale, closure_cap, budget);
    let list: Vec<Value> = checks
        .iter()
        .map(|(name, ok)| json!({"name": name, "ok": ok}))
        .collect();
    let failed: Vec<&str> = checks.iter().filter(|(_, ok)| !ok).map(|(n, _)| *n).collect();
    let mut payload = object(&[
        ("command", json!("selftest")),
        ("seed", json!(seed)),
        ("scale", json!(scale)),
        ("checks", json!(list)),
    ]);
    if failed.is_empty() {
        Ok(Outcome::Holds(payload))
    } else {
        payload.insert("witness".into(), json!({"failed": failed}));
        Ok(Outcome::Fails(payload))
    }
}

/// Runs every property harness at the given scale; each check is isolated,
/// so an internal panic counts as a failure rather than aborting the run.
fn run_selftest(seed: u64, scale: u32, closure_cap: usize, budget: f64) -> Vec<(&'static str, bool)> {
    let n_of = |base: usize, smoke: usize| {
        if scale == 0 {
            smoke
        } else {
            base * scale as usize
        }
    };
    let shield = |f: &mut dyn FnMut() -> bool| -> bool {
        let prev = std::panic::take_hook();
        std::panic::set_hook(Box::new(|_| {}));
        let out = std::panic::catch_unwind(std::panic::AssertUnwindSafe(f)).unwrap_or(false);
        std::panic::set_hook(prev);
        out
    };
    let mut checks: Vec<(&'static str, bool)> = Vec::new();

    checks.push((
        "planted-systems-solve",
        shield(&mut || {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xA1);
            let (hi, max_size, max_n, trials) = if scale == 0 {
                (12, 3, 2, 3)
            } else {
                (40, 5, 3, n_of(25, 3))
            };
            (0..trials).all(|_| {
                let size = rng.gen_range(2..=max_size);
                let mut indices = BTreeSet::new();
                while indices.len() < size {
                    indices.insert(rng.gen_range(1..=hi as i64));
                }
                let n = rng.gen_range(1..=max_n);
                let (inst, _) = plant(indices.iter().copied(), n, &mut rng);
                match solve(&inst) {
                    Ok(sol) => verify(&inst, &sol).ok,
                    Err(_) => false,
                }
            })
        }),
    ));

    checks.push((
        "gcd-cohomology-vanishes",
        shield(&mut || {
            let (hi, max_size, degrees): (i64, usize, &[usize]) = if scale == 0 {
                (4, 2, &[1])
            } else {
                (9, 3, &[1, 2])
            };
            (2..=hi)
                .powerset()
                .filter(|s| !s.is_empty() && s.len() <= max_size)
                .all(|indices| {
                    let fam = SubgroupFamily::gcd_family(&indices);
                    let complex = FamilyComplex::with_max_degree(fam, TupleMode::Increasing, 3);
                    degrees.iter().all(|&n| {
                        complex.cohomology(n).map(|h| h.is_trivial()).unwrap_or(false)
                    })
                })
        }),
    ));

    checks.push((
        "cocycle-check-necessity",
        shield(&mut || {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xA3);
            (0..n_of(10, 2)).all(|_| {
                let n = rng.gen_range(1..=2usize);
                let size = rng.gen_range(n + 1..=4);
                let mut indices = BTreeSet::new();
                while indices.len() < size {
                    indices.insert(2 * rng.gen_range(1..=12i64));
                }
                let (inst, _) = plant(indices.iter().copied(), n, &mut rng);
                if !check_cocycle(&inst).ok {
                    return false;
                }
                // Bump one non-sorted tuple: every index is even, so the
                // tuple's gcd exceeds 1 and the bump must be caught. A
                // non-sorted key keeps the data out of the alternating
                // reading, where a bump would propagate to permuted tuples.
                let mut data: BTreeMap<Vec<i64>, BigInt> = inst
                    .tuples(n + 1)
                    .into_iter()
                    .filter_map(|t| {
                        let v = inst.value(&t);
                        (!v.is_zero()).then_some((t, v))
                    })
                    .collect();
                let mut target: Vec<i64> = indices.iter().copied().take(n + 1).collect();
                target.swap(0, 1);
                *data.entry(target).or_default() += 1;
                let bad = CongruenceInstance::new(indices.iter().copied(), n, data)
                    .expect("perturbed instance stays well-formed");
                let report = check_cocycle(&bad);
                !report.ok
                    && !report.violations.is_empty()
                    && report.violations.iter().all(|v| violation_is_genuine(&bad, v))
            })
        }),
    ));

    checks.push((
        "solver-matches-brute-force",
        shield(&mut || {
            let pools: [&[i64]; 6] =
                [&[2, 4], &[2, 4, 6], &[2, 3, 4], &[3, 6, 12], &[2, 6], &[4, 6, 12]];
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xA4);
            (0..n_of(20, 5)).all(|i| {
                let pool = pools[i % pools.len()];
                let mut data = BTreeMap::new();
                for pair in pool.iter().copied().combinations(2) {
                    if rng.gen_bool(0.7) {
                        let g = pair[0].gcd(&pair[1]);
                        let v = BigInt::from(rng.gen_range(0..g));
                        if !v.is_zero() {
                            data.insert(pair, v);
                        }
                    }
                }
                let inst = CongruenceInstance::new(pool.iter().copied(), 1, data)
                    .expect("valid instance");
                let solved = solve(&inst).is_ok();
                let brute = brute_force_solve_with_budget(&inst, budget);
                matches!(brute, Ok(ref b) if b.is_some() == solved)
                    && check_cocycle(&inst).ok == solved
            })
        }),
    ));

    checks.push((
        "four-lines-counterexample",
        shield(&mut || {
            let inst = match generic_lines(3, 4, None) {
                Ok(i) => i,
                Err(_) => return false,
            };
            counterexample_h1(&inst).map(|r| r.h1.free_rank == 1).unwrap_or(false)
        }),
    ));

    checks.push((
        "distributive-families-vanish",
        shield(&mut || {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xA6);
            let caps = ClosureCaps { max_elements: closure_cap, max_rounds: 200 };
            let families_ok = (0..n_of(10, 2)).all(|i| {
                let fam = if i % 2 == 0 {
                    let mut ms = BTreeSet::new();
                    while ms.len() < rng.gen_range(2..=4usize) {
                        ms.insert(rng.gen_range(2..=30i64));
                    }
                    SubgroupFamily::gcd_family(&ms.into_iter().collect::<Vec<_>>())
                } else {
                    random_chain_family(&mut rng)
                };
                theorem4_harness(&fam, 2, caps).map(|r| r.all_trivial).unwrap_or(false)
            });
            let lines = match generic_lines(3, 4, None) {
                Ok(i) => i.family(),
                Err(_) => return false,
            };
            let (partial, _) =
                close_partial(&lines, ClosureCaps { max_elements: 40, max_rounds: 1 });
            families_ok && !is_distributive(&partial).distributive
        }),
    ));

    checks.push((
        "refinement-homotopy",
        shield(&mut || {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xA7);
            (0..n_of(8, 2)).all(|_| {
                let a = rng.gen_range(2..=10i64);
                let b = rng.gen_range(2..=10i64);
                let z = FPGroup::free(1);
                let fam = SubgroupFamily::new(
                    z.clone(),
                    vec![1, 2, 3],
                    vec![
                        z.subgroup_from_i64(&[&[a]]),
                        z.subgroup_from_i64(&[&[a]]),
                        z.subgroup_from_i64(&[&[b]]),
                    ],
                );
                let id = RefinementMap::new(fam.clone(), fam.clone(), vec![0, 1, 2])
                    .expect("identity refines");
                let swap = RefinementMap::new(fam.clone(), fam.clone(), vec![1, 0, 2])
                    .expect("swapping equal members refines");
                let homotopies = (1..=2usize).all(|d| {
                    let complex =
                        FamilyComplex::with_max_degree(fam.clone(), TupleMode::Full, d + 1);
                    let mut f = FamilyCochain::zero(d);
                    for t in complex.tuples(d) {
                        let v = BigInt::from(rng.gen_range(-9..=9i64));
                        if !v.is_zero() {
                            f.set(t, vec![v]);
                        }
                    }
                    refinement_homotopy_check(&id, &swap, &f)
                });
                let (pi, _iota) = tautological_refinement(&fam);
                let jfam = if pi.source().len() < fam.len() {
                    pi.source().clone()
                } else {
                    pi.target().clone()
                };
                let hi = FamilyComplex::with_max_degree(fam.clone(), TupleMode::Full, 2)
                    .cohomology(1);
                let hj = FamilyComplex::with_max_degree(jfam, TupleMode::Full, 2).cohomology(1);
                homotopies && matches!((hi, hj), (Ok(x), Ok(y)) if x == y)
            })
        }),
    ));

    checks.push((
        "simplicial-identities",
        shield(&mut || {
            let top = if scale == 0 { 2 } else { 3 };
            let triangle = SimplicialComplex::full(3);
            let sys = ConstantSystem { group: FPGroup::cyclic(6) };
            let battery_ok = simplicial_battery(&triangle, &sys, top, seed)
                .iter()
                .all(|(_, ok, _)| *ok);
            let circle = SimplicialComplex::new(3, &[vec![0, 1], vec![0, 2], vec![1, 2]]);
            let zsys = ConstantSystem { group: FPGroup::free(1) };
            battery_ok
                && quasi_iso_check(&circle, &zsys, 1)
                && cohomology_full(&circle, &zsys, 1)
                    == GroupInvariants { free_rank: 1, torsion: vec![] }
        }),
    ));

    checks.push((
        "localization-lemmas",
        shield(&mut || {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xA9);
            let products = (0..n_of(10, 3)).all(|_| {
                let p = BigInt::from([2i64, 3, 5][rng.gen_range(0..3usize)]);
                let groups: Vec<FPGroup> = (0..rng.gen_range(1..=5usize))
                    .map(|_| FPGroup::cyclic(rng.gen_range(2..=40i64)))
                    .collect();
                product_localization_check(&groups, &p)
            });
            let galois = (0..n_of(30, 10)).all(|_| {
                let m = rng.gen_range(1..=1_000_000i64);
                let p = [2i64, 3, 5][rng.gen_range(0..3usize)];
                let s = crate::solver::saturate(m, p);
                crate::solver::saturate(s, p) == s
                    && crate::solver::vp(s, p) == crate::solver::vp(m, p)
                    && m % s == 0
            });
            let kernels = [
                FPGroup::cyclic(12),
                FPGroup::cyclic(9),
                FPGroup::from_invariants(0, &[BigInt::from(2), BigInt::from(4)]),
                FPGroup::cyclic(30),
            ]
            .iter()
            .all(|g| {
                let elements = match g.enumerate_elements() {
                    Some(es) => es,
                    None => return false,
                };
                [2i64, 3, 5].iter().all(|&p| {
                    let p = BigInt::from(p);
                    elements.iter().all(|coords| {
                        let e = g.element(coords.clone());
                        let order = g.element_order(&e).expect("finite group");
                        localization_kernel(g, &e, &p) == order.gcd(&p).is_one()
                    })
                })
            });
            let primaries = (0..n_of(10, 3)).all(|_| {
                let m = rng.gen_range(2..=60i64);
                let p = [2i64, 3, 5][rng.gen_range(0..3usize)];
                let expected = crate::solver::saturate(m, p);
                let part = p_primary(&FPGroup::cyclic(m), &BigInt::from(p));
                part.order() == Some(BigInt::from(expected))
            });
            products && galois && kernels && primaries
        }),
    ));

    checks.push((
        "local-induction",
        shield(&mut || {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xAA);
            (0..n_of(25, 5)).all(|_| {
                let li = plant_local(&mut rng);
                let x = match crate::solver::local_solve(&li) {
                    Ok(x) => x,
                    Err(_) => return false,
                };
                local_congruences_hold(&li, &x) && prefix_sums_match(&li, &x)
            })
        }),
    ));

    checks
}

fn violation_is_genuine(inst: &CongruenceInstance, v: &TupleViolation) -> bool {
    let mut g = BigInt::zero();
    for &i in &v.tuple {
        g = g.gcd(&BigInt::from(i));
    }
    if g != v.modulus || v.residue.is_zero() {
        return false;
    }
    let mut sum = BigInt::zero();
    for j in 0..v.tuple.len() {
        let mut face = v.tuple.clone();
        face.remove(j);
        let value = inst.value(&face);
        if j % 2 == 0 {
            sum += value;
        } else {
            sum -= value;
        }
    }
    sum.mod_floor(&g) == v.residue
}

fn random_chain_family(rng: &mut ChaCha8Rng) -> SubgroupFamily {
    let m = rng.gen_range(2..=12i64);
    let k = rng.gen_range(2..=12i64);
    let ambient = FPGroup::new(
        2,
        IntMatrix::from_cols(
            2,
            &[
                vec![BigInt::from(m), BigInt::zero()],
                vec![BigInt::zero(), BigInt::from(k)],
            ],
        ),
    );
    let mut gens: Vec<Vec<BigInt>> = Vec::new();
    let mut members = Vec::new();
    for _ in 0..3 {
        gens.push(vec![
            BigInt::from(rng.gen_range(0..m)),
            BigInt::from(rng.gen_range(0..k)),
        ]);
        members.push(ambient.subgroup(IntMatrix::from_cols(2, &gens)));
    }
    SubgroupFamily::new(ambient, vec![1, 2, 3], members)
}

fn plant_local(rng: &mut ChaCha8Rng) -> LocalInstance {
    let p = [2i64, 3][rng.gen_range(0..2usize)];
    let count = rng.gen_range(2..=5usize);
    let degree = rng.gen_range(1..=3usize.min(count - 1));
    let mut valuations: Vec<u32> = (0..count).map(|_| rng.gen_range(0..=3u32)).collect();
    valuations.sort_unstable();
    let vmax = *valuations.last().expect("nonempty");
    let big = BigInt::from(p).pow(vmax);
    let mut xstar: BTreeMap<Vec<usize>, BigInt> = BTreeMap::new();
    for t in (1..=count).combinations(degree) {
        xstar.insert(t, BigInt::from(rng.gen_range(0..1_000_000i64)).mod_floor(&big));
    }
    let mut data = BTreeMap::new();
    for t in (1..=count).combinations(degree + 1) {
        let modulus = BigInt::from(p).pow(valuations[t[0] - 1]);
        let mut sum = BigInt::zero();
        for j in 0..t.len() {
            let mut face = t.clone();
            face.remove(j);
            let v = &xstar[&face];
            if j % 2 == 0 {
                sum += v;
            } else {
                sum -= v;
            }
        }
        let residue = sum.mod_floor(&modulus);
        if !residue.is_zero() {
            data.insert(t, residue);
        }
    }
    LocalInstance { p, degree, valuations, data }
}

fn local_congruences_hold(li: &LocalInstance, x: &BTreeMap<Vec<usize>, BigInt>) -> bool {
    let count = li.valuations.len();
    let xv = |t: &[usize]| x.get(t).cloned().unwrap_or_else(BigInt::zero);
    let av = |t: &[usize]| li.data.get(t).cloned().unwrap_or_else(BigInt::zero);
    (1..=count).combinations(li.degree + 1).all(|t| {
        let modulus = BigInt::from(li.p).pow(li.valuations[t[0] - 1]);
        let mut sum = BigInt::zero();
        for j in 0..t.len() {
            let mut face = t.clone();
            face.remove(j);
            let v = xv(&face);
            if j % 2 == 0 {
                sum += v;
            } else {
                sum -= v;
            }
        }
        (sum - av(&t)).mod_floor(&modulus).is_zero()
    })
}

/// For degree 1 the induction is literally `x(k) = x(k-1) + a(k-1, k)`, so
/// the output must equal prefix sums reduced mod `p^max`.
fn prefix_sums_match(li: &LocalInstance, x: &BTreeMap<Vec<usize>, BigInt>) -> bool {
    if li.degree != 1 {
        return true;
    }
    let count = li.valuations.len();
    let vmax = *li.valuations.iter().max().expect("nonempty");
    let big = BigInt::from(li.p).pow(vmax);
    let mut acc = BigInt::zero();
    for k in 1..=count {
        if k > 1 {
            acc += li.data.get(&vec![k - 1, k]).cloned().unwrap_or_else(BigInt::zero);
        }
        let got = x.get(&vec![k]).cloned().unwrap_or_else(BigInt::zero);
        if got != acc.mod_floor(&big) {
            return false;
        }
    }
    true
}
