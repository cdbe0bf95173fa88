//! `specdim`: spectral dimensions, orders, eccentricity and heat-trace
//! decay from the command line.
//!
//! Every subcommand writes one document (JSON by default, plot-ready CSV
//! with `--format csv`). JSON output embeds the effective configuration,
//! defaults included, and is byte-identical across runs.
//!
//! Exit codes: 0 success, 1 malformed input (CSV errors carry the line
//! number), 2 indeterminate classification, 3 oracle disagreement, 4 a
//! failed numerical check (invariant violation, contradiction, resource
//! limit).

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use specdim_core::eccentricity::{
    classify_integrability, default_grid, doubling_profile, sample_geometric, write_profile_csv, Integrability,
    DEFAULT_TOL,
};
use specdim_core::heat::{
    asdim, asdim_sup_form, lattice_return_probability, ns_numbers_counting, ns_numbers_trace, one_inf_norm,
    HeatTrace, SpectralCounting, ASDIM_ANCHOR,
};
use specdim_core::io::{open, read_matrix, read_step_csv};
use specdim_core::orders::{order_at_infinity, order_at_zero, order_via_distribution, End, GridSpec, LogProfile};
use specdim_core::specdim::{box_grid, dimension_report, DimensionReport, EigenvalueModel, HausdorffConfig, ModelKind};
use specdim_core::{oracle, Error, Kernel, StepFn};

#[derive(Parser, Debug)]
#[command(name = "specdim", version, about = "Spectral dimensions and asymptotic orders of eigenvalue data")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write to this file instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Box and Hausdorff dimensions, regularity and Dixmier trajectory.
    Dims(DimsArgs),
    /// Doubling ratios S(2t)/S(t) and the cluster-at-one verdict.
    Ecc(EccArgs),
    /// Polynomial order at 0 or at infinity.
    Orders(OrdersArgs),
    /// Heat-trace decay: lattice walks, counting functions, kernel norms.
    Heat(HeatArgs),
    /// Brute-force reference comparisons.
    Oracle(OracleArgs),
}

#[derive(Args, Debug, Clone, Serialize)]
struct Source {
    /// Model: powerlaw:A | powerlog:A,B | besicovitch:L | torus:D,CUTOFF.
    /// Repeat for a sweep (dims only).
    #[arg(long, conflicts_with = "input")]
    model: Vec<String>,
    /// Data file (dims: `n,mu` or `value,count`; ecc/orders: `t,value`).
    #[arg(long)]
    input: Option<PathBuf>,
    /// Raise the eigenvalues to this power.
    #[arg(long, default_value_t = 1.0, value_parser = positive_f64)]
    power: f64,
}

#[derive(Args, Debug, Clone, Serialize)]
struct DimsArgs {
    #[command(flatten)]
    source: Source,
    /// Number of indices (closed-form laws) or runs (run-length models).
    #[arg(long, default_value_t = 1e6, value_parser = at_least_one)]
    nmax: f64,
    /// Lower end of the Hausdorff search interval.
    #[arg(long, default_value_t = 0.05, value_parser = positive_f64)]
    d_lo: f64,
    /// Upper end of the Hausdorff search interval.
    #[arg(long, default_value_t = 20.0, value_parser = positive_f64)]
    d_hi: f64,
    /// Bisection steps.
    #[arg(long, default_value_t = 24, value_parser = clap::value_parser!(u32).range(1..))]
    iterations: u32,
}

#[derive(Args, Debug, Clone, Serialize)]
struct GridArgs {
    /// First grid point.
    #[arg(long, value_parser = positive_f64)]
    t0: Option<f64>,
    /// Number of grid points.
    #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
    count: Option<u64>,
    /// Fraction of the grid forming the tail window.
    #[arg(long, value_parser = unit_fraction)]
    tail_fraction: Option<f64>,
}

#[derive(Args, Debug, Clone, Serialize)]
struct EccArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long, default_value = "infinity", value_parser = parse_end)]
    #[serde(serialize_with = "ser_display")]
    end: End,
    /// Witness tolerance |ratio − 1| ≤ tol.
    #[arg(long, default_value_t = DEFAULT_TOL, value_parser = positive_f64)]
    tol: f64,
    /// Reference point c splitting (0, c) from (c, ∞).
    #[arg(long, default_value_t = 1.0, value_parser = positive_f64)]
    reference: f64,
    /// Skip the integrability heuristic: summable | non-summable.
    #[arg(long)]
    integrable: Option<String>,
    /// Doublings sampled for closed-form laws.
    #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u32).range(9..))]
    doublings: u32,
    /// Indices (or runs) taken from sequence models.
    #[arg(long, default_value_t = 1e6, value_parser = at_least_one)]
    nmax: f64,
    #[command(flatten)]
    grid: GridArgs,
}

#[derive(Args, Debug, Clone, Serialize)]
struct OrdersArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long, default_value = "infinity", value_parser = parse_end)]
    #[serde(serialize_with = "ser_display")]
    end: End,
    /// Estimate through the distribution function.
    #[arg(long)]
    via_distribution: bool,
    /// Indices (or runs) taken from sequence models.
    #[arg(long, default_value_t = 1e6, value_parser = at_least_one)]
    nmax: f64,
    /// Convergence tolerance on the tail spread.
    #[arg(long, value_parser = positive_f64)]
    tol: Option<f64>,
    #[command(flatten)]
    grid: GridArgs,
}

#[derive(Args, Debug, Clone, Serialize)]
#[command(group(clap::ArgGroup::new("heat_source").required(true).args(["lattice", "counting", "kernel", "trace"])))]
struct HeatArgs {
    /// Lazy simple random walk on Z^D.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=4))]
    lattice: Option<u32>,
    /// Spectral counting function samples `t,N`.
    #[arg(long)]
    counting: Option<PathBuf>,
    /// Dense kernel matrix (no header).
    #[arg(long)]
    kernel: Option<PathBuf>,
    /// Heat trace samples `t,theta_minus_b`.
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(long, default_value_t = 16384, value_parser = clap::value_parser!(u64).range(1..))]
    tmax: u64,
    /// Holding probability of the walk.
    #[arg(long, default_value_t = 0.5, value_parser = unit_open)]
    laziness: f64,
    /// Kernel dimension b subtracted from N and θ.
    #[arg(long, default_value_t = 0.0, value_parser = non_negative_f64)]
    betti: f64,
    /// Treat the kernel as positive: verify it and that its norm sits on the diagonal.
    #[arg(long)]
    check_norm: bool,
    /// Block size of matrix-valued kernel entries.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    block: u64,
}

#[derive(Args, Debug, Clone, Serialize)]
struct OracleArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn positive_f64(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        Ok(v) => Err(format!("must be positive and finite, got {v}")),
        Err(e) => Err(e.to_string()),
    }
}

fn non_negative_f64(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v >= 0.0 && v.is_finite() => Ok(v),
        Ok(v) => Err(format!("must be non-negative and finite, got {v}")),
        Err(e) => Err(e.to_string()),
    }
}

fn at_least_one(s: &str) -> Result<f64, String> {
    let v = positive_f64(s)?;
    if v < 1.0 {
        return Err(format!("must be at least 1, got {v}"));
    }
    Ok(v)
}

fn unit_fraction(s: &str) -> Result<f64, String> {
    let v = positive_f64(s)?;
    if v > 1.0 {
        return Err(format!("must lie in (0, 1], got {v}"));
    }
    Ok(v)
}

fn unit_open(s: &str) -> Result<f64, String> {
    let v = positive_f64(s)?;
    if v >= 1.0 {
        return Err(format!("must lie in (0, 1), got {v}"));
    }
    Ok(v)
}

fn parse_end(s: &str) -> Result<End, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn ser_display<S: serde::Serializer, T: std::fmt::Display>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

/// What `run` hands back: the document and any non-zero verdict code.
struct Outcome {
    body: String,
    code: u8,
    notes: Vec<String>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    if let Err(e) = init_threads() {
        eprintln!("error: {e:#}");
        return ExitCode::from(1);
    }
    match run(&cli) {
        Ok(out) => {
            if let Err(e) = emit(&out.body, cli.output.as_deref()) {
                eprintln!("error: {e:#}");
                return ExitCode::from(1);
            }
            for n in &out.notes {
                eprintln!("{n}");
            }
            ExitCode::from(out.code)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(Error::Parse { .. } | Error::InvalidInput(_) | Error::Io(_)) | None => 1,
        Some(Error::Indeterminate(_)) => 2,
        Some(Error::InvariantViolation(_) | Error::Contradiction(_) | Error::Resource(_) | Error::Overflow(_)) => 4,
    }
}

/// `SPECDIM_THREADS` caps the worker pool.
fn init_threads() -> anyhow::Result<()> {
    if let Ok(v) = std::env::var("SPECDIM_THREADS") {
        let n: usize = v.trim().parse().ok().filter(|&n| n > 0).with_context(|| format!("SPECDIM_THREADS must be a positive integer, got `{v}`"))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn emit(body: &str, path: Option<&Path>) -> anyhow::Result<()> {
    match path {
        Some(p) => std::fs::write(p, body).with_context(|| format!("writing {}", p.display()))?,
        None => std::io::stdout().lock().write_all(body.as_bytes())?,
    }
    Ok(())
}

fn run(cli: &Cli) -> anyhow::Result<Outcome> {
    match &cli.command {
        Command::Dims(a) => dims(a, cli.format),
        Command::Ecc(a) => ecc(a, cli.format),
        Command::Orders(a) => orders(a, cli.format),
        Command::Heat(a) => heat(a, cli.format),
        Command::Oracle(a) => oracle_cmd(a, cli.format),
    }
}

fn document(subcommand: &str, format: Format, args: &impl Serialize, effective: Value, result: Value) -> anyhow::Result<String> {
    let doc = json!({
        "meta": { "tool": "specdim", "version": env!("CARGO_PKG_VERSION") },
        "config": {
            "subcommand": subcommand,
            "format": format,
            "args": args,
            "effective": effective,
        },
        "result": result,
    });
    let mut s = serde_json::to_string_pretty(&doc)?;
    s.push('\n');
    Ok(s)
}

fn csv_string(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> anyhow::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn num(v: f64) -> String {
    if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:?}")
    }
}

fn models(src: &Source) -> anyhow::Result<Vec<EigenvalueModel>> {
    let mut out = Vec::new();
    for m in &src.model {
        out.push(m.parse::<EigenvalueModel>()?.powered(src.power)?);
    }
    if let Some(p) = &src.input {
        let f = open(p)?;
        out.push(EigenvalueModel::from_csv(f, &p.display().to_string())?.powered(src.power)?);
    }
    if out.is_empty() {
        bail!(Error::InvalidInput("one of --model or --input is required".into()));
    }
    Ok(out)
}

fn single_model(src: &Source) -> anyhow::Result<Option<EigenvalueModel>> {
    if src.model.len() > 1 {
        bail!(Error::InvalidInput("this subcommand takes a single --model".into()));
    }
    match src.model.first() {
        Some(m) => Ok(Some(m.parse::<EigenvalueModel>()?.powered(src.power)?)),
        None if src.input.is_some() => Ok(None),
        None => bail!(Error::InvalidInput("one of --model or --input is required".into())),
    }
}

fn read_step(src: &Source) -> anyhow::Result<StepFn> {
    let p = src.input.as_ref().expect("checked by single_model");
    let f = read_step_csv(open(p)?)?;
    Ok(if src.power == 1.0 { f } else { f.power_scale(src.power)? })
}

// ---------------------------------------------------------------------------
// dims

fn dims(a: &DimsArgs, format: Format) -> anyhow::Result<Outcome> {
    if a.d_lo >= a.d_hi {
        bail!(Error::InvalidInput(format!("--d-lo {} must be below --d-hi {}", a.d_lo, a.d_hi)));
    }
    let ms = models(&a.source)?;
    let cfg = HausdorffConfig { d_lo: a.d_lo, d_hi: a.d_hi, iterations: a.iterations, ..HausdorffConfig::default() };
    let reports: Vec<DimensionReport> =
        ms.par_iter().map(|m| dimension_report(m, a.nmax, &cfg)).collect::<Result<_, _>>()?;
    let indeterminate: Vec<String> = reports.iter().filter(|r| r.indeterminate).map(|r| r.model.clone()).collect();
    let body = match format {
        Format::Json => document(
            "dims",
            format,
            a,
            json!({ "hausdorff": cfg, "box_grid": box_grid() }),
            json!({ "reports": reports }),
        )?,
        Format::Csv => csv_string(
            &["model", "n_max", "d_b", "d_h_lo", "d_h_hi", "dixmier_d", "dixmier_last", "regularity_a", "regularity_b", "ratio_2n", "indeterminate"],
            reports.iter().map(|r| {
                vec![
                    r.model.clone(),
                    num(r.n_max),
                    num(r.d_b),
                    num(r.d_h.d_lo),
                    num(r.d_h.d_hi),
                    num(r.dixmier.d),
                    r.dixmier.points.last().map_or(String::new(), |p| num(p.value)),
                    r.regularity.regularity_a.to_string(),
                    r.regularity.regularity_b.to_string(),
                    num(r.regularity.ratio_2n),
                    r.indeterminate.to_string(),
                ]
            }),
        )?,
    };
    let notes = indeterminate.iter().map(|m| format!("indeterminate: d_H not pinned inside the search interval for {m}")).collect();
    Ok(Outcome { body, code: if indeterminate.is_empty() { 0 } else { 2 }, notes })
}

// ---------------------------------------------------------------------------
// ecc

/// Breakpoints per doubling when sampling closed-form laws.
const PER_DOUBLING: u32 = 16;
/// Largest sequence index kept when a model is laid out as a step function.
const STEP_INDEX_LIMIT: f64 = 1e300;
/// Doublings past the last plateau start covered by the plateau-sequence grid.
const PAST_PLATEAU: i32 = 11;

/// A model as a step function in `t`, and for the plateau sequence the
/// grid end (the data continues past the last breakpoint).
fn model_step(m: &EigenvalueModel, end: End, doublings: u32, n_max: f64) -> anyhow::Result<(StepFn, Option<f64>, u32)> {
    let p = m.power;
    match m.kind {
        ModelKind::PowerLaw { alpha } | ModelKind::PowerLog { alpha, .. } => {
            let beta = if let ModelKind::PowerLog { beta, .. } = m.kind { beta } else { 0.0 };
            // Keep every sampled value inside the f64 range.
            let k = doublings.min((900.0 / (alpha * p)).floor().max(9.0) as u32);
            let f = move |t: f64| t.powf(-alpha * p) * (1.0 + t.ln().abs()).powf(-beta * p);
            let s = match end {
                End::Infinity => sample_geometric(0, k as i32, PER_DOUBLING, 1.0, f)?,
                End::Zero => sample_geometric(-(k as i32), 0, PER_DOUBLING, f64::INFINITY, f)?,
            };
            Ok((s, None, k))
        }
        _ => {
            let runs = m.runs(n_max)?;
            let mut bp = Vec::new();
            let mut vals = Vec::new();
            for r in &runs.runs {
                let v = r.ln_mu.exp();
                if !(r.start.is_finite() && r.start <= STEP_INDEX_LIMIT) || v == 0.0 {
                    break;
                }
                if vals.is_empty() {
                    vals.push(v);
                } else {
                    bp.push(r.start);
                    vals.push(v);
                }
            }
            let last = bp.last().copied();
            let s = StepFn::new(bp, vals, None)?;
            let grid_end = match (m.kind.clone(), last) {
                (ModelKind::Besicovitch { .. }, Some(h)) if end == End::Infinity => Some(h * 2f64.powi(PAST_PLATEAU)),
                _ => None,
            };
            Ok((s, grid_end, 0))
        }
    }
}

fn ecc(a: &EccArgs, format: Format) -> anyhow::Result<Outcome> {
    let force = a.integrable.as_deref().map(str::parse::<Integrability>).transpose()?;
    let (mu, grid_end, sampled) = match single_model(&a.source)? {
        Some(m) => model_step(&m, a.end, a.doublings, a.nmax)?,
        None => (read_step(&a.source)?, None, 0),
    };
    let branch = classify_integrability(&mu, a.end, a.reference, force)?;
    let mut grid = match grid_end {
        Some(e) => {
            let n = specdim_core::eccentricity::DEFAULT_POINTS;
            GridSpec { t0: e / 2f64.powi(n as i32 - 1), count: n, ..GridSpec::default() }
        }
        None => default_grid(&mu, a.end, branch, a.reference)?,
    };
    if let Some(t0) = a.grid.t0 {
        grid.t0 = t0;
    }
    if let Some(c) = a.grid.count {
        grid.count = c;
    }
    if let Some(f) = a.grid.tail_fraction {
        grid.tail_fraction = f;
    }
    let profile = doubling_profile(&mu, a.end, branch, &grid, a.tol, a.reference)?;
    let body = match format {
        Format::Json => document(
            "ecc",
            format,
            a,
            json!({ "branch": branch, "grid": grid, "sampled_doublings": sampled, "per_doubling": PER_DOUBLING }),
            json!({ "eccentric": profile.cluster_at_one, "profile": profile }),
        )?,
        Format::Csv => {
            let mut buf = Vec::new();
            write_profile_csv(&profile, &mut buf)?;
            String::from_utf8(buf)?
        }
    };
    Ok(Outcome { body, code: 0, notes: vec![] })
}

// ---------------------------------------------------------------------------
// orders

fn orders(a: &OrdersArgs, format: Format) -> anyhow::Result<Outcome> {
    let model = single_model(&a.source)?;
    let mut grid = match (&model, a.end, a.via_distribution) {
        (Some(_), End::Infinity, false) => box_grid(),
        _ => GridSpec::default(),
    };
    if let Some(t0) = a.grid.t0 {
        grid.t0 = t0;
    }
    if let Some(c) = a.grid.count {
        grid.count = c;
    }
    if let Some(f) = a.grid.tail_fraction {
        grid.tail_fraction = f;
    }
    if let Some(t) = a.tol {
        grid.tol = t;
    }
    let est = match (&model, a.via_distribution) {
        (Some(m), false) => estimate(m.profile(a.nmax)?.as_ref(), a.end, &grid)?,
        (Some(m), true) => order_via_distribution(&m.runs(a.nmax)?.log_step()?.distribution(), a.end, &grid)?,
        (None, false) => estimate(&read_step(&a.source)?, a.end, &grid)?,
        (None, true) => order_via_distribution(&read_step(&a.source)?.distribution()?, a.end, &grid)?,
    };
    let body = match format {
        Format::Json => document("orders", format, a, json!({ "grid": grid }), serde_json::to_value(&est)?)?,
        Format::Csv => csv_string(
            &["j", "t", "ln_t", "ratio"],
            est.window_ratios.iter().map(|w| vec![w.j.to_string(), num(w.t), num(w.ln_t), num(w.ratio)]),
        )?,
    };
    Ok(Outcome { body, code: 0, notes: vec![] })
}

fn estimate<P: LogProfile + ?Sized>(p: &P, end: End, grid: &GridSpec) -> specdim_core::Result<specdim_core::orders::OrderEstimate> {
    match end {
        End::Infinity => order_at_infinity(p, grid),
        End::Zero => order_at_zero(p, grid),
    }
}

// ---------------------------------------------------------------------------
// heat

fn heat(a: &HeatArgs, format: Format) -> anyhow::Result<Outcome> {
    if let Some(path) = &a.kernel {
        let rows = read_matrix(open(path)?)?;
        let k = Kernel::new(rows, a.block as usize)?.flagged_positive(a.check_norm);
        let norm = one_inf_norm(&k)?;
        let body = match format {
            Format::Json => document(
                "heat",
                format,
                a,
                json!({ "sites": k.sites(), "block": a.block }),
                json!({ "norm": norm }),
            )?,
            Format::Csv => csv_string(
                &["sup_entry", "sup_diagonal", "positive_checked"],
                [vec![num(norm.sup_entry), num(norm.sup_diagonal), norm.positive_checked.to_string()]],
            )?,
        };
        return Ok(Outcome { body, code: 0, notes: vec![] });
    }

    let (trace, ns, source) = if let Some(d) = a.lattice {
        let w = lattice_return_probability(d, a.tmax, a.laziness)?;
        let tr = w.heat_trace()?;
        let ns = ns_numbers_trace(&tr)?;
        (tr, ns, json!({ "lattice": d, "tmax": a.tmax, "laziness": a.laziness }))
    } else if let Some(path) = &a.counting {
        let n = SpectralCounting::read_csv(open(path)?, a.betti)?;
        let ns = ns_numbers_counting(&n)?;
        let tr = n.heat_trace()?;
        (tr, ns, json!({ "jumps": n.jumps.len(), "betti": n.betti }))
    } else {
        let path = a.trace.as_ref().expect("one heat source is required");
        let tr = HeatTrace::read_csv(open(path)?, a.betti)?;
        let ns = ns_numbers_trace(&tr)?;
        let src = json!({ "samples": tr.times.len(), "betti": a.betti });
        (tr, ns, src)
    };
    let body = match format {
        Format::Json => {
            // Short traces still get their NS numbers; the dimension fits need
            // enough doublings.
            let dim = asdim(&trace).map(serde_json::to_value).map_err(|e| e.to_string());
            let sup = asdim_sup_form(&trace).map(serde_json::to_value).map_err(|e| e.to_string());
            let field = |r: Result<Result<Value, serde_json::Error>, String>| -> anyhow::Result<Value> {
                match r {
                    Ok(v) => Ok(v?),
                    Err(e) => Ok(json!({ "error": e })),
                }
            };
            document(
                "heat",
                format,
                a,
                json!({ "source": source, "asdim_anchor": ASDIM_ANCHOR }),
                json!({
                    "asdim": field(dim)?,
                    "asdim_sup_form": field(sup)?,
                    "ns_numbers": ns,
                    "non_increasing": trace.is_non_increasing(),
                    "trace": trace,
                }),
            )?
        }
        Format::Csv => {
            let mut buf = Vec::new();
            trace.write_csv(&mut buf)?;
            String::from_utf8(buf)?
        }
    };
    Ok(Outcome { body, code: 0, notes: vec![] })
}

// ---------------------------------------------------------------------------
// oracle

fn oracle_cmd(a: &OracleArgs, format: Format) -> anyhow::Result<Outcome> {
    let checks = oracle::run_all(a.seed)?;
    let failed: Vec<String> = checks
        .iter()
        .filter(|c| !c.pass)
        .map(|c| format!("oracle failed: {} (computed {}, oracle {}, rel err {:e} > {:e})", c.name, c.computed, c.oracle, c.rel_err, c.tol))
        .collect();
    let body = match format {
        Format::Json => document(
            "oracle",
            format,
            a,
            json!({ "checks": checks.len() }),
            json!({ "checks": checks, "all_pass": failed.is_empty() }),
        )?,
        Format::Csv => csv_string(
            &["name", "computed", "oracle", "rel_err", "tol", "pass"],
            checks.iter().map(|c| vec![c.name.clone(), num(c.computed), num(c.oracle), num(c.rel_err), num(c.tol), c.pass.to_string()]),
        )?,
    };
    Ok(Outcome { body, code: if failed.is_empty() { 0 } else { 3 }, notes: failed })
}
