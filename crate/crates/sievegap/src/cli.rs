//! The `sievegap` command line: argument parsing, configuration merging and
//! dispatch to the library.
//!
//! Every report is a JSON object `{command, config, result}` where `config`
//! holds the fully resolved arguments. Exit codes: 0 on success, 1 on domain
//! errors, 2 on usage errors.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::applications::{
    composite_run_bruteforce, composite_run_constructed, constants, coprimality_witness,
    gap_coprimality_witness, rho_derangement, verify_coprimality_witness,
};
use crate::construction::{construct, derive_params, trivial_baseline, ParamRequest, Stage2Mode};
use crate::cover::{ap_family, assign_indices, check_hypotheses, run_cover, RoundPlan};
use crate::error::{Error, Result};
use crate::moments::{
    first_moment_exact, mc_first_moment, mc_lambda_moments, mc_second_moment, LambdaIdentity,
    MomentReport,
};
use crate::poly::Poly;
use crate::report;
use crate::rng::DEFAULT_SEED;
use crate::system::{SievingSystem, SystemKind};
use crate::window::{gap_scan, ShiftVector};

/// Output format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Stage-2 selection mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    Sample,
    Cover,
}

/// Parameter preset for `construct`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    /// The defining formulas for `y`, `z` and the scales.
    Formula,
    /// `z = x/4`, `y = 4x/5`, `M = 1.5`, `K = 2`.
    Desk,
}

/// Sieving systems, long gaps in sifted sets, and composite runs.
#[derive(Debug, Parser)]
#[command(name = "sievegap", version, args_override_self = true)]
pub struct Cli {
    /// Master seed.
    #[arg(long, global = true, env = "SIEVEGAP_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// JSON file of flag values; flags given on the command line win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Worker threads (default: all cores). Output does not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Density statistics of a sieving system.
    SystemInfo(SystemInfoArgs),
    /// Largest gap of a shifted sifted set in a window.
    Gaps(GapsArgs),
    /// Three-stage construction of a long empty interval.
    Construct(ConstructArgs),
    /// Covering rounds on a synthetic progression hypergraph.
    CoverDemo(CoverArgs),
    /// Monte Carlo and exact checks of the moment identities.
    Moments(MomentsArgs),
    /// The constant C(rho) and derangement densities.
    Constants(ConstantsArgs),
    /// Longest runs of composite polynomial values.
    CompositeRuns(CompositeArgs),
    /// Coprimality witnesses for consecutive polynomial values.
    Coprime(CoprimeArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::SystemInfo(_) => "system-info",
            Command::Gaps(_) => "gaps",
            Command::Construct(_) => "construct",
            Command::CoverDemo(_) => "cover-demo",
            Command::Moments(_) => "moments",
            Command::Constants(_) => "constants",
            Command::CompositeRuns(_) => "composite-runs",
            Command::Coprime(_) => "coprime",
        }
    }
}

const SUBCOMMANDS: [&str; 8] = [
    "system-info",
    "gaps",
    "construct",
    "cover-demo",
    "moments",
    "constants",
    "composite-runs",
    "coprime",
];

#[derive(Debug, Args, Serialize)]
pub struct SystemInfoArgs {
    /// `eratosthenes`, `twin`, `poly:<expr>`, or a system file.
    #[arg(long, visible_alias = "file")]
    pub system: String,
    #[arg(long, default_value_t = 10_000)]
    pub x: u64,
    /// Checkpoints for the Mertens track (default `x/100, x/10, x`).
    #[arg(long, value_delimiter = ',')]
    pub checkpoints: Option<Vec<u64>>,
    /// Relative drift between the last two checkpoints that flags a system
    /// as not one-dimensional.
    #[arg(long, default_value_t = 0.1)]
    pub drift_ratio: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct GapsArgs {
    #[arg(long, visible_alias = "file")]
    pub system: String,
    #[arg(long)]
    pub x: u64,
    /// Window `LO..HI`, inclusive.
    #[arg(long, allow_hyphen_values = true)]
    pub window: String,
    /// Shift file of `p residue` lines (default: the zero shift).
    #[arg(long)]
    pub shift_file: Option<PathBuf>,
    /// Sift only by primes above `z`.
    #[arg(long, default_value_t = 0)]
    pub z: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct ConstructArgs {
    #[arg(long, visible_alias = "file")]
    pub system: String,
    #[arg(long)]
    pub x: u64,
    /// Gap exponent (default `min(0.9 C(rho_hat), 0.45)`).
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long, value_enum, default_value_t = ModeArg::Sample)]
    pub mode: ModeArg,
    /// Uncovered fraction targeted by cover mode.
    #[arg(long, default_value_t = 0.05)]
    pub eta: f64,
    /// Independent attempts; attempt `t` uses seed `seed + t`.
    #[arg(long, default_value_t = 1)]
    pub trials: u64,
    #[arg(long, value_enum, default_value_t = Preset::Formula)]
    pub preset: Preset,
    #[arg(long)]
    pub force_z: Option<u64>,
    #[arg(long)]
    pub force_y: Option<u64>,
    #[arg(long, value_delimiter = ',')]
    pub force_scales: Option<Vec<f64>>,
    /// Split exponent `M`.
    #[arg(long)]
    pub m_exp: Option<f64>,
    #[arg(long)]
    pub k: Option<u32>,
    #[arg(long)]
    pub xi: Option<f64>,
    /// Use every admissible prime of each scale.
    #[arg(long)]
    pub all_q: bool,
    /// Write the best shift to this file.
    #[arg(long)]
    pub shift_out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct CoverArgs {
    #[arg(long, default_value_t = 10_000)]
    pub vertices: usize,
    /// Number of edges (default `c2 * vertices`, singleton edges).
    #[arg(long)]
    pub edges: Option<usize>,
    /// Block size of the progression family; must divide `vertices`.
    #[arg(long, default_value_t = 250)]
    pub block: usize,
    #[arg(long, default_value_t = 4.0)]
    pub c2: f64,
    #[arg(long, default_value_t = 0.05)]
    pub eta: f64,
    #[arg(long, default_value_t = 0.25)]
    pub delta: f64,
    #[arg(long, default_value_t = 10)]
    pub trials: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct MomentsArgs {
    #[arg(long, visible_alias = "file", default_value = "eratosthenes")]
    pub system: String,
    /// One of `i`, `i-exact`, `i-second`, `ii-j0`, `ii-j1`, `ii-j2`,
    /// `iii-j0`, `iii-j1`, `iii-j2`.
    #[arg(long)]
    pub identity: String,
    #[arg(long, default_value_t = 1000)]
    pub trials: u64,
    #[arg(long, default_value_t = 10_000)]
    pub x: u64,
    /// Interval length (default `x`).
    #[arg(long)]
    pub y: Option<u64>,
    #[arg(long, default_value_t = 200)]
    pub z: u64,
    /// Scale `H` for the weight identities.
    #[arg(long, default_value_t = 3.0)]
    pub h: f64,
    #[arg(long, default_value_t = 4.6)]
    pub m_exp: f64,
    #[arg(long, default_value_t = 3)]
    pub k: u32,
}

#[derive(Debug, Args, Serialize)]
pub struct ConstantsArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub rho: f64,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Also report the derangement density for this degree.
    #[arg(long)]
    pub degree: Option<u32>,
}

#[derive(Debug, Args, Serialize)]
pub struct CompositeArgs {
    #[arg(long)]
    pub poly: String,
    #[arg(long = "X", visible_alias = "x-max")]
    #[serde(rename = "X")]
    pub x_max: u64,
    /// Also build runs from the gap construction.
    #[arg(long)]
    pub constructed: bool,
    /// Seeds for the constructed runs; attempt `t` uses seed `seed + t`.
    #[arg(long, default_value_t = 1)]
    pub trials: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct CoprimeArgs {
    #[arg(long)]
    pub poly: String,
    #[arg(long)]
    pub k: Option<u64>,
    #[arg(long, default_value_t = 10_000)]
    pub bound: u64,
    /// Build the witness from a gap construction at this cutoff, with
    /// `k = 2x`, instead of searching.
    #[arg(long)]
    pub gap_x: Option<u64>,
}

/// Captured result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Insert the flags of a JSON config file after the subcommand name,
/// skipping any flag already given on the command line.
fn merge_config(args: Vec<OsString>) -> Result<Vec<OsString>> {
    let strs: Vec<String> = args.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    let path = strs.iter().enumerate().find_map(|(i, a)| {
        a.strip_prefix("--config=")
            .map(str::to_string)
            .or_else(|| (a == "--config").then(|| strs.get(i + 1).cloned()).flatten())
    });
    let Some(path) = path else {
        return Ok(args);
    };
    let text = std::fs::read_to_string(&path).map_err(|e| Error::Usage(format!("{path}: {e}")))?;
    let cfg: Value =
        serde_json::from_str(&text).map_err(|e| Error::Usage(format!("{path}: {e}")))?;
    let obj = cfg
        .as_object()
        .ok_or_else(|| Error::Usage(format!("{path}: expected a JSON object")))?;
    let given = |flag: &str| {
        strs.iter()
            .any(|a| a == flag || a.starts_with(&format!("{flag}=")))
    };
    let mut extra = Vec::new();
    for (k, v) in obj {
        let flag = format!("--{k}");
        if k == "config" || given(&flag) {
            continue;
        }
        match v {
            Value::Bool(true) => extra.push(flag),
            Value::Bool(false) | Value::Null => {}
            Value::Array(a) => {
                let items: Vec<String> = a.iter().map(scalar_text).collect();
                extra.push(format!("{flag}={}", items.join(",")));
            }
            other => extra.push(format!("{flag}={}", scalar_text(other))),
        }
    }
    let pos = strs
        .iter()
        .position(|a| SUBCOMMANDS.contains(&a.as_str()))
        .map_or(strs.len(), |p| p + 1);
    let mut out = args;
    for (i, e) in extra.into_iter().enumerate() {
        out.insert(pos + i, e.into());
    }
    Ok(out)
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Parse `argv` (including the program name), run, and capture the output.
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let args: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let fail = |code, msg: String| Outcome {
        code,
        stdout: String::new(),
        stderr: msg,
    };
    let args = match merge_config(args) {
        Ok(a) => a,
        Err(e) => return fail(2, format!("{e}\n")),
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            return if code == 0 {
                Outcome {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                fail(2, text)
            };
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            return fail(2, "usage error: --threads must be positive\n".into());
        }
        // The global pool can only be set once per process.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match execute(&cli) {
        Ok(v) => {
            let rendered = match cli.format {
                Format::Json => report::to_json(&v),
                Format::Csv => report::to_csv(&v),
            };
            match rendered {
                Ok(s) => Outcome {
                    code: 0,
                    stdout: s,
                    stderr: String::new(),
                },
                Err(e) => fail(1, format!("{e}\n")),
            }
        }
        Err(e @ Error::Usage(_)) => fail(2, format!("{e}\n")),
        Err(e) => fail(1, format!("{e}\n")),
    }
}

/// Entry point for the binary: run and print, returning the exit code.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    use std::io::Write;
    let out = run(argv);
    // A closed pipe on the reading side is not an error of the tool.
    let _ = std::io::stdout().write_all(out.stdout.as_bytes());
    let _ = std::io::stderr().write_all(out.stderr.as_bytes());
    out.code
}

fn execute(cli: &Cli) -> Result<Value> {
    let result = match &cli.command {
        Command::SystemInfo(a) => system_info(a)?,
        Command::Gaps(a) => gaps(a)?,
        Command::Construct(a) => construct_cmd(a, cli.seed)?,
        Command::CoverDemo(a) => cover_demo(a, cli.seed)?,
        Command::Moments(a) => moments(a, cli.seed)?,
        Command::Constants(a) => constants_cmd(a)?,
        Command::CompositeRuns(a) => composite(a, cli.seed)?,
        Command::Coprime(a) => coprime(a, cli.seed)?,
    };
    let mut args = report::to_value(&cli.command)?;
    // Unwrap the externally tagged enum to the argument object.
    if let Value::Object(o) = &mut args {
        if let Some(inner) = o.remove(cli.command.name()) {
            args = inner;
        }
    }
    Ok(report::object(vec![
        ("command", json!(cli.command.name())),
        (
            "config",
            report::object(vec![
                ("seed", json!(cli.seed)),
                ("format", report::to_value(&cli.format)?),
                ("args", args),
            ]),
        ),
        ("result", result),
    ]))
}

fn system(spec: &str) -> Result<SievingSystem> {
    SievingSystem::resolve(spec)
}

fn system_info(a: &SystemInfoArgs) -> Result<Value> {
    let s = system(&a.system)?;
    let checkpoints = match &a.checkpoints {
        Some(c) => c.clone(),
        None => {
            let mut c: Vec<u64> = [a.x / 100, a.x / 10, a.x]
                .into_iter()
                .filter(|&c| c >= 100)
                .collect();
            c.dedup();
            if c.is_empty() {
                return Err(Error::Usage("--x must be at least 100".into()));
            }
            c
        }
    };
    let density = s.mertens_fit(&checkpoints, a.drift_ratio)?;
    let mut warnings = Vec::new();
    if matches!(s.kind(), SystemKind::Twin) || !density.one_dimensional {
        warnings.push("system is not one-dimensional: sigma(x) log x drifts".to_string());
    }
    if !density.non_degenerate {
        warnings.push("system is degenerate below x".to_string());
    }
    Ok(report::object(vec![
        ("info", report::to_value(&s.info())?),
        ("density", report::to_value(&density)?),
        ("warnings", json!(warnings)),
    ]))
}

fn parse_window(w: &str) -> Result<(i64, i64)> {
    let (lo, hi) = w
        .split_once("..")
        .ok_or_else(|| Error::Usage(format!("window must be LO..HI, got {w:?}")))?;
    let p = |t: &str| {
        t.trim()
            .parse::<i64>()
            .map_err(|_| Error::Usage(format!("bad window bound {t:?}")))
    };
    Ok((p(lo)?, p(hi)?))
}

fn gaps(a: &GapsArgs) -> Result<Value> {
    let s = system(&a.system)?;
    let (lo, hi) = parse_window(&a.window)?;
    let shift = match &a.shift_file {
        Some(path) => ShiftVector::from_text(&std::fs::read_to_string(path)?)?,
        None => ShiftVector::zero(&s, a.x),
    };
    let scan = gap_scan(&s, a.x, &shift, lo, hi, a.z)?;
    Ok(json!({
        "gap": scan.gap.length,
        "left": scan.gap.left,
        "members_count": scan.members_count,
        "sentinel": scan.gap.sentinel,
    }))
}

fn construct_cmd(a: &ConstructArgs, seed: u64) -> Result<Value> {
    if a.trials == 0 {
        return Err(Error::Usage("--trials must be positive".into()));
    }
    let s = system(&a.system)?;
    let mut req = match a.preset {
        Preset::Formula => ParamRequest::defaults(&s, a.x),
        Preset::Desk => ParamRequest::desk(&s, a.x),
    };
    if let Some(d) = a.delta {
        req.delta = d;
    }
    if let Some(m) = a.m_exp {
        req.m_exp = m;
    }
    if let Some(k) = a.k {
        req.k = k;
    }
    if let Some(xi) = a.xi {
        req.xi = xi;
    }
    req.force_z = a.force_z.or(req.force_z);
    req.force_y = a.force_y.or(req.force_y);
    if a.force_scales.is_some() {
        req.force_scales = a.force_scales.clone();
    }
    req.all_q |= a.all_q;
    let params = derive_params(&s, &req)?;
    let mode = match a.mode {
        ModeArg::Sample => Stage2Mode::Sample,
        ModeArg::Cover => Stage2Mode::Cover { eta: a.eta },
    };
    let mut lengths = Vec::new();
    let mut baselines = Vec::new();
    let mut best: Option<(crate::construction::Construction, u64)> = None;
    for t in 0..a.trials {
        let sd = seed.wrapping_add(t);
        let c = construct(&s, &params, mode, sd)?;
        let b = trivial_baseline(&s, a.x, sd)?;
        lengths.push(c.length);
        baselines.push(b.length);
        if best.as_ref().is_none_or(|(bc, _)| c.length > bc.length) {
            best = Some((c, b.length));
        }
    }
    let (c, baseline_l) = best.expect("at least one trial");
    if let Some(path) = &a.shift_out {
        std::fs::write(path, c.shift.to_text())?;
    }
    let wins = lengths.iter().zip(&baselines).filter(|(c, b)| c >= b).count();
    let reached = lengths.len();
    Ok(report::object(vec![
        ("L", json!(c.length)),
        ("baseline_L", json!(baseline_l)),
        ("target", json!(c.target)),
        ("target_reached", json!(c.target_reached)),
        ("rejected_q_count", json!(c.rejected_q.len())),
        ("survivors_by_stage", report::to_value(&c.survivors_by_stage)?),
        ("cover", report::to_value(&c.cover)?),
        ("params", report::to_value(&params)?),
        (
            "trials",
            json!({
                "count": reached,
                "lengths": lengths,
                "baseline_lengths": baselines,
                "wins": wins,
                "win_rate": wins as f64 / reached as f64,
            }),
        ),
    ]))
}

fn cover_demo(a: &CoverArgs, seed: u64) -> Result<Value> {
    if a.trials == 0 {
        return Err(Error::Usage("--trials must be positive".into()));
    }
    let edges = a.edges.unwrap_or((a.c2 * a.vertices as f64).round() as usize);
    if edges == 0 {
        return Err(Error::Usage("--edges must be positive".into()));
    }
    let ap_len = ((a.c2 * a.vertices as f64) / edges as f64).round().max(1.0) as usize;
    let inst = ap_family(a.vertices, a.c2, a.block, ap_len, seed)?;
    let hyp = check_hypotheses(&inst, a.delta, a.c2, a.eta);
    let plan = RoundPlan::fitted(a.eta, a.delta, a.c2)?;
    let mut fracs = Vec::new();
    for t in 0..a.trials {
        let sd = seed.wrapping_add(t);
        let part = assign_indices(inst.n_edges(), &plan, sd, 100)?;
        fracs.push(run_cover(&inst, &part, sd).uncovered_fraction);
    }
    let mut sorted = fracs.clone();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    };
    let threshold = 10.0 * a.eta;
    let success = fracs.iter().filter(|&&f| f <= threshold).count();
    Ok(report::object(vec![
        ("vertices", json!(inst.n_vertices())),
        ("edges", json!(inst.n_edges())),
        ("ap_len", json!(ap_len)),
        (
            "uncovered_fraction",
            json!({
                "mean": fracs.iter().sum::<f64>() / n as f64,
                "median": median,
                "min": sorted[0],
                "max": sorted[n - 1],
                "threshold": threshold,
                "success_rate": success as f64 / n as f64,
                "values": fracs,
            }),
        ),
        ("hypotheses", report::to_value(&hyp)?),
        ("plan", report::to_value(&plan)?),
    ]))
}

fn moments(a: &MomentsArgs, seed: u64) -> Result<Value> {
    let s = system(&a.system)?;
    let y = a.y.unwrap_or(a.x);
    let lambda = |identity, j: u32| -> Result<MomentReport> {
        let req = ParamRequest {
            m_exp: a.m_exp,
            k: a.k,
            force_z: Some(a.z),
            force_y: Some(y),
            force_scales: Some(vec![a.h]),
            ..ParamRequest::defaults(&s, a.x)
        };
        let params = derive_params(&s, &req)?;
        Ok(mc_lambda_moments(&s, &params, a.h, identity, &[j], a.trials, seed)?.remove(0))
    };
    let (rep, extra) = match a.identity.as_str() {
        "i" => (mc_first_moment(&s, a.z, y, a.trials, seed)?, None),
        "i-second" => (mc_second_moment(&s, a.z, y, a.trials, seed)?, None),
        "i-exact" => {
            let exact = first_moment_exact(&s, a.z, y)?;
            let period = s.period_u64(a.z).unwrap_or(0);
            let est = crate::moments::rational_to_f64(&exact);
            let predicted = s.sigma(1, a.z)? * y as f64;
            let rep = MomentReport {
                identity: "i-exact".into(),
                predicted,
                estimated: est,
                std_error: 0.0,
                trials: period,
                z_score: 0.0,
                relative_deviation: if predicted != 0.0 { est / predicted - 1.0 } else { 0.0 },
            };
            let sigma_y = s.sigma_exact(1, a.z)? * num_rational::BigRational::from_integer(y.into());
            (
                rep,
                Some(json!({"exact_mean": exact.to_string(), "sigma_y": sigma_y.to_string(), "equal": exact == sigma_y})),
            )
        }
        id => {
            let (identity, j) = match id {
                "ii-j0" => (LambdaIdentity::Ii, 0),
                "ii-j1" => (LambdaIdentity::Ii, 1),
                "ii-j2" => (LambdaIdentity::Ii, 2),
                "iii-j0" => (LambdaIdentity::Iii, 0),
                "iii-j1" => (LambdaIdentity::Iii, 1),
                "iii-j2" => (LambdaIdentity::Iii, 2),
                other => return Err(Error::Usage(format!("unknown identity {other:?}"))),
            };
            (lambda(identity, j)?, None)
        }
    };
    let mut v = report::to_value(&rep)?;
    if let (Value::Object(o), Some(Value::Object(e))) = (&mut v, extra) {
        o.extend(e);
    }
    Ok(v)
}

fn constants_cmd(a: &ConstantsArgs) -> Result<Value> {
    let r = constants(a.rho, a.tol)?;
    let mut v = report::to_value(&r)?;
    if let Some(d) = a.degree {
        let rd = rho_derangement(d)?;
        if let Value::Object(o) = &mut v {
            o.insert("degree".into(), json!(d));
            o.insert("rho_derangement".into(), json!(rd.to_string()));
            o.insert(
                "rho_derangement_value".into(),
                json!(crate::moments::rational_to_f64(&rd)),
            );
        }
    }
    Ok(v)
}

fn parse_poly(s: &str) -> Result<Poly> {
    s.parse()
}

fn composite(a: &CompositeArgs, seed: u64) -> Result<Value> {
    let f = parse_poly(&a.poly)?;
    let brute = composite_run_bruteforce(&f, a.x_max)?;
    let constructed = if a.constructed {
        let runs = (0..a.trials)
            .map(|t| composite_run_constructed(&f, a.x_max, seed.wrapping_add(t)))
            .collect::<Result<Vec<_>>>()?;
        Some(runs)
    } else {
        None
    };
    Ok(report::object(vec![
        ("poly", json!(f.to_string())),
        ("bruteforce", report::to_value(&brute)?),
        ("constructed", report::to_value(&constructed)?),
    ]))
}

fn coprime(a: &CoprimeArgs, seed: u64) -> Result<Value> {
    let f = parse_poly(&a.poly)?;
    if let Some(x) = a.gap_x {
        let w = gap_coprimality_witness(&f, x, seed)?;
        return Ok(report::object(vec![
            ("poly", json!(f.to_string())),
            ("mode", json!("gap")),
            ("witness", report::to_value(&w)?),
        ]));
    }
    let k = a
        .k
        .ok_or_else(|| Error::Usage("--k is required unless --gap-x is given".into()))?;
    let r = coprimality_witness(&f, k, a.bound)?;
    let verified = r
        .witness
        .map(|n| verify_coprimality_witness(&f, &n.into(), k).is_ok());
    Ok(report::object(vec![
        ("poly", json!(f.to_string())),
        ("mode", json!("search")),
        ("k", json!(r.k)),
        ("bound", json!(r.bound)),
        ("witness", json!(r.witness)),
        ("verified", json!(verified)),
    ]))
}
