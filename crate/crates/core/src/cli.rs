//! File-driven front end: reads a JSON job, runs one command, writes a JSON
//! report (or a tab-separated bound curve).
//!
//! Exit codes: `0` success, `2` domain failure (the report carries the error
//! code in `status`), `1` I/O, usage or schema problems (message on stderr,
//! no report).
//!
//! Reports are canonical: keys sorted, floats printed with 17 significant
//! digits, `-0` printed as `0`. Wall-clock timing is included only with
//! `--timing`, so that reports are reproducible byte for byte.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use clap::Parser;
use serde::Deserialize;
use serde_json::{json, Map, Value};

use crate::error::Error;
use crate::fiberization::{
    fiber_ranks, frame_bounds, gram_fibers, is_biorthogonal, is_contained, max_span_angle, riesz_bounds, Bounds,
    Family, FiberFamily, Tolerances,
};
use crate::group_model::{GroupSpec, GroupVector, SystemSpace};
use crate::linalg::{c, hermitian_eigenvalues, max_abs, CMat, C64};
use crate::nonabelian::{
    cancel, character, irreducible_representations, regular_representation, FiniteGroup, Representation,
};
use crate::oblique::{
    biorthogonal_wavelets, dual_family, oblique_frame_wavelets, oblique_projector, oblique_riesz_wavelets,
    subspace_generators, ObliqueSplit, Subspace,
};
use crate::oracle::{dense_frame_bounds, dense_riesz_bounds};
use crate::robertson::{bessel_dimension_audit, complement_wandering, verify_wandering};

pub const VERSION: &str = "wandergen/1";
/// Agreement required between fiber and dense bounds in `oracle-check`.
pub const ORACLE_AGREEMENT: f64 = 1e-8;

#[derive(Debug, Clone, Parser)]
#[command(
    name = "wandergen",
    version,
    about = "Wandering subspaces and multiwavelet constructions"
)]
pub struct Args {
    /// analyze | complement | oblique | frame-oblique | dual | biortho | cancel | oracle-check | curve
    /// (overrides the job's `command` field)
    pub command: Option<String>,
    /// Job file (JSON)
    #[arg(long)]
    pub job: PathBuf,
    /// Seed for randomized choices
    #[arg(long)]
    pub seed: Option<u64>,
    /// Dual grid size for integer shift systems (ignored for finite groups)
    #[arg(long)]
    pub grid: Option<usize>,
    /// Relative rank cutoff on squared singular values
    #[arg(long = "tol-rank")]
    pub tol_rank: Option<f64>,
    /// Absolute tolerance on Gram and biorthogonality residuals
    #[arg(long = "tol-bio")]
    pub tol_bio: Option<f64>,
    /// Output path (default: stdout); written atomically
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Include wall-clock timing in the report
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Analyze,
    Complement,
    Oblique,
    FrameOblique,
    Dual,
    Biortho,
    Cancel,
    OracleCheck,
    Curve,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Analyze => "analyze",
            Command::Complement => "complement",
            Command::Oblique => "oblique",
            Command::FrameOblique => "frame-oblique",
            Command::Dual => "dual",
            Command::Biortho => "biortho",
            Command::Cancel => "cancel",
            Command::OracleCheck => "oracle-check",
            Command::Curve => "curve",
        }
    }
}

impl FromStr for Command {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "analyze" => Command::Analyze,
            "complement" => Command::Complement,
            "oblique" => Command::Oblique,
            "frame-oblique" => Command::FrameOblique,
            "dual" => Command::Dual,
            "biortho" => Command::Biortho,
            "cancel" => Command::Cancel,
            "oracle-check" => Command::OracleCheck,
            "curve" => Command::Curve,
            other => return Err(format!("unknown command {other:?}")),
        })
    }
}

// ---------------------------------------------------------------------------
// job file

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobFile {
    pub version: String,
    #[serde(default)]
    pub command: Option<String>,
    #[serde(default)]
    pub system: Option<SystemFile>,
    #[serde(default)]
    pub families: BTreeMap<String, FamilyFile>,
    #[serde(default)]
    pub group: Option<GroupFile>,
    #[serde(default)]
    pub representations: BTreeMap<String, RepFile>,
    #[serde(default)]
    pub options: OptionsFile,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemFile {
    pub group: GroupSpecFile,
    pub channels: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum GroupSpecFile {
    FiniteAbelian(Vec<usize>),
    IntegerShift(usize),
}

/// Coefficient entries per member, or sampled fibers `fibers[point][row][col]`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum FamilyFile {
    Coefficients(Vec<Vec<EntryFile>>),
    Sampled { fibers: Vec<Vec<Vec<ComplexFile>>> },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntryFile {
    pub element: ElementFile,
    /// 1-based channel index.
    pub channel: usize,
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum ElementFile {
    Code(i64),
    Tuple(Vec<i64>),
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexFile {
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum GroupFile {
    Builtin(String),
    Cayley(Vec<Vec<usize>>),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum RepFile {
    Regular(usize),
    Irrep(String),
    /// One matrix per group element, as rows of complex entries.
    Matrices(Vec<Vec<Vec<ComplexFile>>>),
    DirectSum(Vec<RepFile>),
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptionsFile {
    pub seed: Option<u64>,
    pub grid: Option<usize>,
    pub tol_rank: Option<f64>,
    pub tol_bio: Option<f64>,
    /// Family plotted by `curve` (default `X`, or the only family).
    pub family: Option<String>,
}

// ---------------------------------------------------------------------------
// failures

#[derive(Debug, Clone, PartialEq)]
pub enum Failure {
    /// I/O, usage or schema problem: exit 1.
    Input(String),
    /// Domain failure from the analysis routines: exit 2.
    Domain(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidInput(msg) => Failure::Input(msg),
            Error::SizeMismatch(msg) => Failure::Input(format!("size mismatch: {msg}")),
            other => Failure::Domain(other),
        }
    }
}

fn input<T>(msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure::Input(msg.into()))
}

/// Result of a run: exit code, text destined for the output, and a message
/// for stderr.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub output: Option<String>,
    pub message: Option<String>,
}

// ---------------------------------------------------------------------------
// canonical JSON

fn format_float(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.16e}")
}

fn write_value(v: &Value, indent: usize, out: &mut String) {
    let pad = |n: usize| "  ".repeat(n);
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                out.push_str(&i.to_string());
            } else if let Some(u) = n.as_u64() {
                out.push_str(&u.to_string());
            } else {
                out.push_str(&format_float(n.as_f64().unwrap_or(f64::NAN)));
            }
        }
        Value::String(s) => out.push_str(&serde_json::to_string(s).expect("string")),
        Value::Array(items) if items.is_empty() => out.push_str("[]"),
        Value::Array(items) => {
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                write_value(item, indent + 1, out);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push(']');
        }
        Value::Object(map) if map.is_empty() => out.push_str("{}"),
        Value::Object(map) => {
            out.push_str("{\n");
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            for (i, k) in keys.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                out.push_str(&serde_json::to_string(k).expect("key"));
                out.push_str(": ");
                write_value(&map[k.as_str()], indent + 1, out);
                out.push_str(if i + 1 < keys.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push('}');
        }
    }
}

/// Deterministic pretty-printed JSON with a trailing newline.
pub fn canonical_json(v: &Value) -> String {
    let mut out = String::new();
    write_value(v, 0, &mut out);
    out.push('\n');
    out
}

/// Float written as a JSON float even when integral; non-finite becomes null.
fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

/// Entries below this magnitude are printed as exact zeros.
const PRINT_FLOOR: f64 = 1e-15;

fn clean(x: f64) -> f64 {
    if x.abs() < PRINT_FLOOR {
        0.0
    } else {
        x
    }
}

fn complex_json(z: C64) -> Value {
    json!({"re": num(clean(z.re)), "im": num(clean(z.im))})
}

fn matrix_json(m: &CMat) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|r| Value::Array((0..m.ncols()).map(|col| complex_json(m[(r, col)])).collect()))
            .collect(),
    )
}

fn bounds_json(b: &Bounds) -> Value {
    json!({"lower": num(b.lower), "upper": num(b.upper), "exact": b.exact})
}

fn error_json(e: &Error) -> Value {
    json!({"error": e.code(), "message": e.to_string()})
}

fn bounds_result_json(r: &crate::Result<Bounds>) -> Value {
    match r {
        Ok(b) => bounds_json(b),
        Err(e) => error_json(e),
    }
}

fn vector_json(v: &GroupVector) -> Value {
    Value::Array(
        v.entries()
            .filter(|(_, _, z)| z.re.abs() >= PRINT_FLOOR || z.im.abs() >= PRINT_FLOOR)
            .map(|(g, ch, z)| json!({"element": g, "channel": ch + 1, "re": num(clean(z.re)), "im": num(clean(z.im))}))
            .collect(),
    )
}

/// Coefficients in exact mode, sampled fibers otherwise.
fn family_json(f: &FiberFamily) -> Result<Value, Failure> {
    if f.is_exact() {
        let fam = f.to_family()?;
        Ok(Value::Array(fam.members().iter().map(vector_json).collect()))
    } else {
        Ok(json!({"fibers": f.fibers().iter().map(matrix_json).collect::<Vec<_>>()}))
    }
}

// ---------------------------------------------------------------------------
// loading

struct Context {
    command: Command,
    job: JobFile,
    seed: u64,
    tol_override: (Option<f64>, Option<f64>),
    grid: Option<usize>,
}

struct System {
    space: SystemSpace,
    tol: Tolerances,
}

fn positive(name: &str, v: Option<f64>) -> Result<Option<f64>, Failure> {
    match v {
        Some(x) if !(x.is_finite() && x > 0.0) => input(format!("{name} must be a positive finite number")),
        other => Ok(other),
    }
}

impl Context {
    fn system(&self) -> Result<System, Failure> {
        let sys = match &self.job.system {
            Some(s) => s,
            None => return input("job has no `system`"),
        };
        let group = match &sys.group {
            GroupSpecFile::FiniteAbelian(orders) => GroupSpec::finite_abelian(orders)?,
            GroupSpecFile::IntegerShift(grid) => GroupSpec::integer_shift(self.grid.unwrap_or(*grid))?,
        };
        let space = SystemSpace::new(group, sys.channels)?;
        let mut tol = Tolerances::for_space(&space);
        if let Some(r) = self.tol_override.0 {
            tol.rank = r;
        }
        if let Some(b) = self.tol_override.1 {
            tol.bio = b;
        }
        Ok(System { space, tol })
    }

    fn has(&self, name: &str) -> bool {
        self.job.families.contains_key(name)
    }

    fn coefficients(&self, sys: &System, name: &str) -> Result<Option<Family>, Failure> {
        let file = self
            .job
            .families
            .get(name)
            .ok_or_else(|| Failure::Input(format!("job has no family {name:?}")))?;
        let members = match file {
            FamilyFile::Sampled { .. } => return Ok(None),
            FamilyFile::Coefficients(members) => members,
        };
        let space = &sys.space;
        let mut vectors = Vec::with_capacity(members.len());
        for (j, entries) in members.iter().enumerate() {
            let mut v = GroupVector::zero(space);
            for e in entries {
                if !(e.re.is_finite() && e.im.is_finite()) {
                    return input(format!("non-finite coefficient in {name}[{j}]"));
                }
                if e.channel == 0 || e.channel > space.channels {
                    return input(format!(
                        "{name}[{j}]: channel {} outside 1..={}",
                        e.channel, space.channels
                    ));
                }
                let g = match &e.element {
                    ElementFile::Code(g) => *g,
                    ElementFile::Tuple(t) => space.group.encode(t)?,
                };
                if !space.group.contains(g) {
                    return input(format!("{name}[{j}]: element {g} is not in the group"));
                }
                v.add(g, e.channel - 1, c(e.re, e.im))?;
            }
            vectors.push(v);
        }
        Ok(Some(Family::new(space, vectors)?))
    }

    fn fibers(&self, sys: &System, name: &str) -> Result<FiberFamily, Failure> {
        if let Some(fam) = self.coefficients(sys, name)? {
            return Ok(fam.fibers()?);
        }
        let Some(FamilyFile::Sampled { fibers }) = self.job.families.get(name) else {
            unreachable!("coefficients() handled the other cases")
        };
        let m = sys.space.channels;
        let size = fibers.first().and_then(|f| f.first()).map_or(0, |row| row.len());
        let mut mats = Vec::with_capacity(fibers.len());
        for (p, rows) in fibers.iter().enumerate() {
            if rows.len() != m || rows.iter().any(|r| r.len() != size) {
                return input(format!("{name}: fiber {p} is not {m} x {size}"));
            }
            if rows.iter().flatten().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
                return input(format!("{name}: non-finite fiber entry at point {p}"));
            }
            mats.push(CMat::from_fn(m, size, |r, col| c(rows[r][col].re, rows[r][col].im)));
        }
        Ok(FiberFamily::new(&sys.space, size, mats)?)
    }
}

fn parse_job(text: &str) -> Result<JobFile, Failure> {
    let job: JobFile = serde_json::from_str(text).map_err(|e| Failure::Input(format!("invalid job file: {e}")))?;
    if job.version != VERSION {
        return input(format!(
            "unsupported job version {:?} (expected {VERSION:?})",
            job.version
        ));
    }
    Ok(job)
}

// ---------------------------------------------------------------------------
// commands

type Fields = Map<String, Value>;

fn header(ctx: &Context, sys: Option<&System>) -> Fields {
    let mut f = Fields::new();
    f.insert("version".into(), json!(VERSION));
    f.insert("command".into(), json!(ctx.command.name()));
    f.insert("seed".into(), json!(ctx.seed));
    if let Some(sys) = sys {
        f.insert("exact".into(), json!(sys.space.is_exact()));
        f.insert(
            "tolerances".into(),
            json!({"rank": num(sys.tol.rank), "bio": num(sys.tol.bio)}),
        );
        f.insert("channels".into(), json!(sys.space.channels));
        if !sys.space.is_exact() {
            f.insert("grid".into(), json!(sys.space.group.dual_size()));
        }
    }
    f
}

fn run_analyze(ctx: &Context, sys: &System, out: &mut Fields) -> Result<(), Failure> {
    let mut fams = Fields::new();
    for name in ctx.job.families.keys() {
        let f = ctx.fibers(sys, name)?;
        let cert = verify_wandering(&f, &sys.tol);
        let ranks = fiber_ranks(&f, &sys.tol);
        fams.insert(
            name.clone(),
            json!({
                "size": f.len(),
                "riesz": bounds_result_json(&riesz_bounds(&f, &sys.tol)),
                "frame": bounds_result_json(&frame_bounds(&f, &sys.tol)),
                "wandering": {
                    "valid": cert.valid && !f.is_empty(),
                    "complete": cert.complete,
                    "gram_residual": num(cert.max_gram_residual),
                },
                "fiber_rank": {
                    "min": ranks.iter().min().copied().unwrap_or(0),
                    "max": ranks.iter().max().copied().unwrap_or(0),
                },
            }),
        );
    }
    out.insert("families".into(), Value::Object(fams));
    Ok(())
}

fn run_complement(ctx: &Context, sys: &System, out: &mut Fields) -> Result<(), Failure> {
    let x = ctx.fibers(sys, "X")?;
    let y = ctx.fibers(sys, "Y")?;
    let xp = complement_wandering(&x, &y, &sys.tol)?;
    let union = x.concat(&xp)?;
    let union_gram = gram_fibers(&union).map(|g| g.identity_residual()).unwrap_or(0.0);
    let span_angle = max_span_angle(&union, &y, &sys.tol)?;
    out.insert("families".into(), json!({"X_prime": family_json(&xp)?}));
    out.insert(
        "residuals".into(),
        json!({"union_gram": num(union_gram), "span_angle": num(span_angle)}),
    );
    out.insert("sizes".into(), json!({"X": x.len(), "Y": y.len(), "X_prime": xp.len()}));
    let audit = match (ctx.coefficients(sys, "X")?, ctx.coefficients(sys, "Y")?) {
        (Some(xc), Some(yc)) => {
            let a = bessel_dimension_audit(&xc, &yc, &sys.tol)?;
            json!({"dim_m": a.dim_m, "dim_k": a.dim_k, "double_sum": num(a.double_sum), "holds": a.holds})
        }
        _ => Value::Null,
    };
    out.insert("bessel".into(), audit);
    Ok(())
}

fn w0_subspace(ctx: &Context, sys: &System) -> Result<Subspace, Failure> {
    if ctx.has("W0") {
        Ok(Subspace::Orbit(ctx.fibers(sys, "W0")?))
    } else if ctx.has("W0dense") {
        match ctx.coefficients(sys, "W0dense")? {
            Some(f) => Ok(Subspace::Dense(f.members().to_vec())),
            None => input("W0dense must be given by coefficients"),
        }
    } else {
        input("job has neither W0 nor W0dense")
    }
}

fn run_oblique(ctx: &Context, sys: &System, frame: bool, out: &mut Fields) -> Result<(), Failure> {
    let x = ctx.fibers(sys, "X")?;
    let y = ctx.fibers(sys, "Y")?;
    let w0 = w0_subspace(ctx, sys)?;
    let gamma = if frame {
        oblique_frame_wavelets(&x, &y, &w0, &sys.tol)?
    } else {
        oblique_riesz_wavelets(&x, &y, &w0, &sys.tol)?
    };
    let w0f = subspace_generators(&w0, &sys.space, &sys.tol)?;
    let split = ObliqueSplit::new(x.clone(), w0f.clone(), y.clone(), &sys.tol)?;
    let p = oblique_projector(&split, &sys.tol)?;
    let bounds = if frame {
        frame_bounds(&gamma, &sys.tol)?
    } else {
        riesz_bounds(&gamma, &sys.tol)?
    };
    out.insert("families".into(), json!({"Gamma": family_json(&gamma)?}));
    out.insert("bounds".into(), json!({"Gamma": bounds_json(&bounds)}));
    out.insert(
        "residuals".into(),
        json!({
            "projector_idempotence": num(p.idempotence_residual()),
            "gamma_in_w0": is_contained(&gamma, &w0f, &sys.tol)?,
        }),
    );
    out.insert(
        "sizes".into(),
        json!({"X": x.len(), "Y": y.len(), "Gamma": gamma.len()}),
    );
    Ok(())
}

fn run_dual(ctx: &Context, sys: &System, out: &mut Fields) -> Result<(), Failure> {
    let gamma = ctx.fibers(sys, "Gamma")?;
    let w0_dual = ctx.fibers(sys, "W0_tilde")?;
    let dual = dual_family(&gamma, &w0_dual, &sys.tol)?;
    let bio = is_biorthogonal(&gamma, &dual, &sys.tol)?;
    out.insert("families".into(), json!({"Gamma_tilde": family_json(&dual)?}));
    out.insert(
        "residuals".into(),
        json!({"biorthogonality": num(bio.residual), "biorthogonal": bio.holds}),
    );
    out.insert(
        "bounds".into(),
        json!({"Gamma_tilde": bounds_result_json(&riesz_bounds(&dual, &sys.tol))}),
    );
    Ok(())
}

fn run_biortho(ctx: &Context, sys: &System, out: &mut Fields) -> Result<(), Failure> {
    let x = ctx.fibers(sys, "X")?;
    let xd = ctx.fibers(sys, "X_tilde")?;
    let y = ctx.fibers(sys, "Y")?;
    let yd = ctx.fibers(sys, "Y_tilde")?;
    let b = biorthogonal_wavelets(&x, &xd, &y, &yd, &sys.tol)?;
    out.insert(
        "families".into(),
        json!({
            "Gamma": family_json(&b.gamma)?,
            "Gamma_tilde": family_json(&b.gamma_dual)?,
            "W0": family_json(&b.w0)?,
            "W0_tilde": family_json(&b.w0_dual)?,
        }),
    );
    out.insert(
        "bounds".into(),
        json!({
            "primal_union": bounds_json(&b.primal_union_bounds),
            "dual_union": bounds_json(&b.dual_union_bounds),
        }),
    );
    out.insert(
        "residuals".into(),
        json!({"pair": num(b.pair.residual), "union_pair": num(b.union_pair.residual)}),
    );
    Ok(())
}

fn bounds_pair(fiber: &crate::Result<Bounds>, dense: &crate::Result<Bounds>) -> (f64, bool) {
    match (fiber, dense) {
        (Ok(a), Ok(b)) => {
            let d = (a.lower - b.lower).abs().max((a.upper - b.upper).abs());
            (d, d <= ORACLE_AGREEMENT)
        }
        (Err(a), Err(b)) => (0.0, a.code() == b.code()),
        _ => (f64::INFINITY, false),
    }
}

fn run_oracle_check(ctx: &Context, sys: &System, out: &mut Fields) -> Result<(), Failure> {
    if !sys.space.is_exact() {
        return Err(Failure::Domain(Error::NotExact));
    }
    let mut fams = Fields::new();
    let mut all = true;
    for name in ctx.job.families.keys() {
        let coeffs = match ctx.coefficients(sys, name)? {
            Some(f) => f,
            None => ctx.fibers(sys, name)?.to_family()?,
        };
        let f = coeffs.fibers()?;
        let fr = riesz_bounds(&f, &sys.tol);
        let ff = frame_bounds(&f, &sys.tol);
        let dr = dense_riesz_bounds(&coeffs, &sys.tol);
        let df = dense_frame_bounds(&coeffs, &sys.tol);
        if let Err(e @ Error::SizeLimit { .. }) = &dr {
            return Err(Failure::Domain(e.clone()));
        }
        let (d1, ok1) = bounds_pair(&fr, &dr);
        let (d2, ok2) = bounds_pair(&ff, &df);
        all &= ok1 && ok2;
        fams.insert(
            name.clone(),
            json!({
                "fiber": {"riesz": bounds_result_json(&fr), "frame": bounds_result_json(&ff)},
                "dense": {"riesz": bounds_result_json(&dr), "frame": bounds_result_json(&df)},
                "difference": num(d1.max(d2)),
                "agree": ok1 && ok2,
            }),
        );
    }
    out.insert("families".into(), Value::Object(fams));
    out.insert("agree".into(), json!(all));
    Ok(())
}

fn build_group(file: &GroupFile) -> Result<Arc<FiniteGroup>, Failure> {
    Ok(Arc::new(match file {
        GroupFile::Builtin(name) => FiniteGroup::builtin(name)?,
        GroupFile::Cayley(table) => FiniteGroup::from_cayley("cayley", table.clone())?,
    }))
}

fn build_rep(
    group: &Arc<FiniteGroup>,
    irreps: &[(String, Representation)],
    file: &RepFile,
) -> Result<Representation, Failure> {
    match file {
        RepFile::Regular(copies) => Ok(regular_representation(group.clone(), *copies)),
        RepFile::Irrep(name) => irreps
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, r)| r.clone())
            .ok_or_else(|| {
                let names: Vec<&str> = irreps.iter().map(|(n, _)| n.as_str()).collect();
                Failure::Input(format!("unknown irrep {name:?}; available: {}", names.join(", ")))
            }),
        RepFile::Matrices(ms) => {
            let mut mats = Vec::with_capacity(ms.len());
            for rows in ms {
                let d = rows.len();
                if rows.iter().any(|r| r.len() != d) {
                    return input("representation matrices must be square");
                }
                if rows.iter().flatten().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
                    return input("non-finite representation entry");
                }
                mats.push(CMat::from_fn(d, d, |r, col| c(rows[r][col].re, rows[r][col].im)));
            }
            Ok(Representation::new(group.clone(), mats)?)
        }
        RepFile::DirectSum(parts) => {
            let mut acc = Representation::zero_dim(group.clone());
            for p in parts {
                acc = acc.direct_sum(&build_rep(group, irreps, p)?)?;
            }
            Ok(acc)
        }
    }
}

fn run_cancel(ctx: &Context, out: &mut Fields) -> Result<(), Failure> {
    let group = match &ctx.job.group {
        Some(g) => build_group(g)?,
        None => return input("cancel needs a `group`"),
    };
    let irreps = irreducible_representations(&group).unwrap_or_default();
    let mut reps = BTreeMap::new();
    for name in ["rho", "sigma1", "sigma2", "sigma3"] {
        let file = ctx
            .job
            .representations
            .get(name)
            .ok_or_else(|| Failure::Input(format!("cancel needs representation {name:?}")))?;
        reps.insert(name, build_rep(&group, &irreps, file)?);
    }
    let w = cancel(
        &reps["rho"],
        &reps["sigma1"],
        &reps["sigma2"],
        &reps["sigma3"],
        ctx.seed,
    )?;
    let d = w.matrix.nrows();
    let unitarity = max_abs(&(w.matrix.adjoint() * &w.matrix - CMat::identity(d, d)));
    let chars = |r: &Representation| Value::Array(character(r).values.into_iter().map(complex_json).collect());
    out.insert("exact".into(), json!(true));
    out.insert(
        "group".into(),
        json!({"name": group.name(), "order": group.order(), "classes": group.classes()}),
    );
    out.insert(
        "dimensions".into(),
        Value::Object(reps.iter().map(|(k, r)| (k.to_string(), json!(r.dim()))).collect()),
    );
    out.insert(
        "characters".into(),
        json!({"sigma2": chars(&reps["sigma2"]), "sigma3": chars(&reps["sigma3"])}),
    );
    out.insert("intertwiner".into(), matrix_json(&w.matrix));
    out.insert("intertwiner_seed".into(), w.seed.map_or(Value::Null, |s| json!(s)));
    out.insert(
        "residuals".into(),
        json!({"intertwining": num(w.residual), "unitarity": num(unitarity)}),
    );
    Ok(())
}

fn curve_text(ctx: &Context, sys: &System) -> Result<String, Failure> {
    if sys.space.is_exact() {
        return input("curve needs an integer_shift system; use `analyze` for finite groups");
    }
    let name = match &ctx.job.options.family {
        Some(n) => n.clone(),
        None if ctx.has("X") => "X".to_string(),
        None if ctx.job.families.len() == 1 => ctx.job.families.keys().next().expect("one").clone(),
        None => return input("curve needs options.family when the job has several families"),
    };
    let f = ctx.fibers(sys, &name)?;
    let gram = gram_fibers(&f)?;
    let sampling = sys.space.dual_sampling();
    let mut text = String::from("# angle\tmin_eigenvalue\tmax_eigenvalue\n");
    for (pt, g) in sampling.points.iter().zip(&gram.matrices) {
        let eig = hermitian_eigenvalues(g);
        let lo = eig.first().copied().unwrap_or(0.0);
        let hi = eig.last().copied().unwrap_or(0.0);
        text.push_str(&format!(
            "{}\t{}\t{}\n",
            format_float(pt.angle()),
            format_float(clean(lo)),
            format_float(clean(hi))
        ));
    }
    Ok(text)
}

fn dispatch(ctx: &Context, out: &mut Fields) -> Result<(), Failure> {
    if ctx.command == Command::Cancel {
        return run_cancel(ctx, out);
    }
    let sys = ctx.system()?;
    out.extend(header(ctx, Some(&sys)));
    match ctx.command {
        Command::Analyze => run_analyze(ctx, &sys, out),
        Command::Complement => run_complement(ctx, &sys, out),
        Command::Oblique => run_oblique(ctx, &sys, false, out),
        Command::FrameOblique => run_oblique(ctx, &sys, true, out),
        Command::Dual => run_dual(ctx, &sys, out),
        Command::Biortho => run_biortho(ctx, &sys, out),
        Command::OracleCheck => run_oracle_check(ctx, &sys, out),
        Command::Cancel | Command::Curve => unreachable!("handled elsewhere"),
    }
}

fn context(args: &Args, text: &str) -> Result<Context, Failure> {
    let job = parse_job(text)?;
    let name = match (&args.command, &job.command) {
        (Some(c), _) | (None, Some(c)) => c.clone(),
        (None, None) => return input("no command given on the command line or in the job"),
    };
    let command = Command::from_str(&name).map_err(Failure::Input)?;
    let tol_rank = positive("tol-rank", args.tol_rank.or(job.options.tol_rank))?;
    let tol_bio = positive("tol-bio", args.tol_bio.or(job.options.tol_bio))?;
    let grid = args.grid.or(job.options.grid);
    let seed = args.seed.or(job.options.seed).unwrap_or(0);
    Ok(Context {
        command,
        job,
        seed,
        tol_override: (tol_rank, tol_bio),
        grid,
    })
}

/// Run a job given as text. Does not touch the filesystem.
pub fn run_text(args: &Args, text: &str) -> Outcome {
    let started = Instant::now();
    let ctx = match context(args, text) {
        Ok(c) => c,
        Err(Failure::Input(msg)) | Err(Failure::Domain(Error::InvalidInput(msg))) => {
            return Outcome {
                code: 1,
                output: None,
                message: Some(msg),
            }
        }
        Err(Failure::Domain(e)) => {
            return Outcome {
                code: 1,
                output: None,
                message: Some(e.to_string()),
            }
        }
    };
    if ctx.command == Command::Curve {
        let result = ctx.system().and_then(|sys| curve_text(&ctx, &sys));
        return match result {
            Ok(text) => Outcome {
                code: 0,
                output: Some(text),
                message: None,
            },
            Err(Failure::Input(msg)) => Outcome {
                code: 1,
                output: None,
                message: Some(msg),
            },
            Err(Failure::Domain(e)) => Outcome {
                code: 2,
                output: None,
                message: Some(format!("{}: {e}", e.code())),
            },
        };
    }
    let mut fields = header(&ctx, None);
    let result = dispatch(&ctx, &mut fields);
    let code = match result {
        Ok(()) => {
            fields.insert("status".into(), json!("ok"));
            0
        }
        Err(Failure::Input(msg)) => {
            return Outcome {
                code: 1,
                output: None,
                message: Some(msg),
            }
        }
        Err(Failure::Domain(e)) => {
            fields.insert("status".into(), json!(e.code()));
            fields.insert("error".into(), json!(e.to_string()));
            2
        }
    };
    if args.timing {
        fields.insert(
            "timing".into(),
            json!({"seconds": num(started.elapsed().as_secs_f64())}),
        );
    }
    Outcome {
        code,
        output: Some(canonical_json(&Value::Object(fields))),
        message: None,
    }
}

fn write_atomic(path: &Path, text: &str) -> std::io::Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(format!(".tmp{}", std::process::id()));
    let tmp = PathBuf::from(tmp);
    std::fs::write(&tmp, text)?;
    std::fs::rename(&tmp, path).inspect_err(|_| {
        let _ = std::fs::remove_file(&tmp);
    })
}

/// Read the job, run it and deliver the output; returns the exit code.
pub fn run(args: &Args) -> i32 {
    let text = match std::fs::read_to_string(&args.job) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", args.job.display());
            return 1;
        }
    };
    let outcome = run_text(args, &text);
    if let Some(msg) = &outcome.message {
        eprintln!("error: {msg}");
    }
    if let Some(text) = &outcome.output {
        match &args.out {
            Some(path) => {
                if let Err(e) = write_atomic(path, text) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return 1;
                }
            }
            None => print!("{text}"),
        }
    }
    outcome.code
}

/// Entry point for the binary: parses arguments, mapping usage errors to exit 1.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Args::try_parse_from(argv) {
        Ok(args) => run(&args),
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(command: &str) -> Args {
        Args {
            command: Some(command.into()),
            job: PathBuf::from("-"),
            seed: None,
            grid: None,
            tol_rank: None,
            tol_bio: None,
            out: None,
            timing: false,
        }
    }

    const DELTAS: &str = r#"{
        "version": "wandergen/1",
        "system": {"group": {"finite_abelian": [3]}, "channels": 2},
        "families": {"Y": [[{"element": 0, "channel": 1, "re": 1.0, "im": 0.0}],
                           [{"element": 0, "channel": 2, "re": 1.0, "im": 0.0}]]}
    }"#;

    #[test]
    fn float_format_has_17_digits() {
        assert_eq!(format_float(1.0), "1.0000000000000000e0");
        assert_eq!(format_float(-0.0), "0.0000000000000000e0");
        assert_eq!(format_float(0.1).parse::<f64>().unwrap(), 0.1);
    }

    #[test]
    fn canonical_json_sorts_keys() {
        let v = json!({"b": 1, "a": [num(0.5)], "c": {}});
        assert_eq!(
            canonical_json(&v),
            "{\n  \"a\": [\n    5.0000000000000000e-1\n  ],\n  \"b\": 1,\n  \"c\": {}\n}\n"
        );
    }

    #[test]
    fn analyze_orthonormal_deltas() {
        let out = run_text(&args("analyze"), DELTAS);
        assert_eq!(out.code, 0);
        let v: Value = serde_json::from_str(out.output.as_ref().unwrap()).unwrap();
        assert_eq!(v["status"], "ok");
        assert_eq!(v["families"]["Y"]["riesz"]["lower"].as_f64(), Some(1.0));
        assert_eq!(v["families"]["Y"]["riesz"]["upper"].as_f64(), Some(1.0));
        assert_eq!(v["families"]["Y"]["wandering"]["complete"], true);
    }

    #[test]
    fn schema_problems_exit_one() {
        for bad in [
            "not json",
            r#"{"version": "other/9", "command": "analyze"}"#,
            r#"{"version": "wandergen/1", "command": "analyze"}"#,
            r#"{"version": "wandergen/1", "system": {"group": {"finite_abelian": [2]}, "channels": 1},
                "families": {"X": [[{"element": 5, "channel": 1, "re": 1.0, "im": 0.0}]]}}"#,
            r#"{"version": "wandergen/1", "system": {"group": {"finite_abelian": [2]}, "channels": 1},
                "families": {"X": [[{"element": 0, "channel": 0, "re": 1.0, "im": 0.0}]]}}"#,
        ] {
            let out = run_text(&args("analyze"), bad);
            assert_eq!(out.code, 1, "{bad}");
            assert!(out.output.is_none());
        }
    }

    #[test]
    fn unknown_command_in_job() {
        let mut a = args("analyze");
        a.command = None;
        let job = r#"{"version": "wandergen/1", "command": "fly",
            "system": {"group": {"finite_abelian": [2]}, "channels": 1}}"#;
        assert_eq!(run_text(&a, job).code, 1);
    }

    #[test]
    fn missing_family_is_schema_error() {
        assert_eq!(run_text(&args("complement"), DELTAS).code, 1);
    }

    #[test]
    fn curve_rejects_exact_systems() {
        let out = run_text(&args("curve"), DELTAS);
        assert_eq!(out.code, 1);
        assert!(out.message.unwrap().contains("analyze"));
    }

    #[test]
    fn two_tap_curve() {
        let job = r#"{"version": "wandergen/1",
            "system": {"group": {"integer_shift": 8}, "channels": 1},
            "families": {"X": [[{"element": 0, "channel": 1, "re": 0.7071067811865476, "im": 0.0},
                                {"element": 1, "channel": 1, "re": 0.7071067811865476, "im": 0.0}]]}}"#;
        let out = run_text(&args("curve"), job);
        assert_eq!(out.code, 0);
        let text = out.output.unwrap();
        let rows: Vec<Vec<f64>> = text
            .lines()
            .skip(1)
            .map(|l| l.split('\t').map(|x| x.parse().unwrap()).collect())
            .collect();
        assert_eq!(rows.len(), 8);
        for r in &rows {
            let want = 2.0 * (r[0] / 2.0).cos().powi(2);
            assert!((r[2] - want).abs() < 1e-12);
        }
        assert!(rows[4][1].abs() < 1e-12);
        let riesz = run_text(&args("analyze"), job);
        let v: Value = serde_json::from_str(&riesz.output.unwrap()).unwrap();
        assert_eq!(v["families"]["X"]["riesz"]["error"], "NotRiesz");
    }
}
