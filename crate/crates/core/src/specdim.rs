//! Eigenvalue sequences and the dimensions they define.
//!
//! A sequence `μ₁ ≥ μ₂ ≥ … > 0` (the singular values of `|D|^{-1}`) is
//! handled as runs `(value, length)`: single indices for the closed-form
//! laws, multiplicities for torus spectra, and plateaus of astronomically
//! growing length for the two-scale plateau sequence
//!
//! ```text
//! μ_n = e^{−a_k}  for  e^{a_k} ≤ n < e^{a_{k+1}},   a_k = λ^k − k·ln λ/(λ−1),  a₁ = 0.
//! ```
//!
//! Everything downstream works in logarithms (`ln μ`, `ln n`, `ln σ`), so a
//! run of `e^{10¹²}` equal values costs the same as a single term.
//!
//! - Box dimension: `d_B = 1/ord∞(μ)` with `μ(t) = μ_{⌊t⌋}`.
//! - Hausdorff dimension: the threshold `d` where `σ_n(d) = Σ_{k≤n} μ_k^d`
//!   stops being `o(ln n)` / `O(ln n)`, bracketed by bisection on a
//!   three-way classifier of `σ_n(d)/ln n`.
//! - Dixmier trajectory: `σ_n(d)/ln n` along a subsequence.
//! - Regularity: whether `ln μ_n/ln(1/n)` and `μ_{2n}/μ_n` converge.

use std::f64::consts::{LN_2, PI};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::eccentricity::Integrability;
use crate::error::{invalid, Error, Result};
use crate::io::{ext, read_pairs};
use crate::logsum::{ln_sub, LogSum};
use crate::orders::{order_at_infinity, GridSpec, LogProfile, OrderEstimate};
use crate::stepfn::LogStep;

/// Largest index below which `f64` represents every integer.
const EXACT: f64 = 9.007_199_254_740_992e15;
/// Run-length entries a sequence may materialise.
pub const MAX_RUNS: usize = 1 << 24;
/// Plateau sequences stop before `a_{K+1}` exceeds this: beyond it the run
/// boundaries `e^{a_k}` lose all relative precision in `f64` logs.
pub const PLATEAU_LN_LIMIT: f64 = 1_099_511_627_776.0; // 2^40

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ModelKind {
    PowerLaw { alpha: f64 },
    PowerLog { alpha: f64, beta: f64 },
    Besicovitch { lambda: f64 },
    Torus { d: u32, cutoff: u64 },
    /// Runs `(value, count)` read from data.
    External {
        source: String,
        #[serde(skip)]
        runs: Vec<(f64, f64)>,
    },
}

/// A sequence model, optionally raised to a power (`μ_n ↦ μ_n^power`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenvalueModel {
    #[serde(flatten)]
    pub kind: ModelKind,
    pub power: f64,
}

/// Values the closed forms predict, where known.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ClosedForms {
    #[serde(with = "ext::opt")]
    pub d_b: Option<f64>,
    #[serde(with = "ext::opt")]
    pub d_h: Option<f64>,
    /// Limit of `σ_n(d_H)/ln n` (along the plateau starts for the plateau
    /// sequence).
    #[serde(with = "ext::opt")]
    pub dixmier: Option<f64>,
}

impl FromStr for EigenvalueModel {
    type Err = Error;

    /// `powerlaw:A`, `powerlog:A,B`, `besicovitch:L`, `torus:D,CUTOFF`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, args) = s.split_once(':').unwrap_or((s, ""));
        let nums: Vec<f64> = if args.is_empty() {
            Vec::new()
        } else {
            args.split(',')
                .map(|a| a.trim().parse::<f64>().map_err(|_| Error::InvalidInput(format!("bad model parameter `{a}`"))))
                .collect::<Result<_>>()?
        };
        let need = |k: usize| -> Result<()> {
            if nums.len() == k {
                Ok(())
            } else {
                invalid(format!("model `{name}` takes {k} parameter(s), got {}", nums.len()))
            }
        };
        let kind = match name.to_ascii_lowercase().as_str() {
            "powerlaw" => {
                need(1)?;
                ModelKind::PowerLaw { alpha: nums[0] }
            }
            "powerlog" => {
                need(2)?;
                ModelKind::PowerLog { alpha: nums[0], beta: nums[1] }
            }
            "besicovitch" => {
                need(1)?;
                ModelKind::Besicovitch { lambda: nums[0] }
            }
            "torus" => {
                need(2)?;
                if nums[0].fract() != 0.0 || nums[1].fract() != 0.0 || nums[0] < 1.0 || nums[1] < 1.0 {
                    return invalid("torus parameters must be positive integers");
                }
                ModelKind::Torus { d: nums[0] as u32, cutoff: nums[1] as u64 }
            }
            _ => return invalid(format!("unknown model `{name}`")),
        };
        EigenvalueModel::new(kind)
    }
}

/// One run of equal values. `len` may be `+∞` when only `ln_len` fits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Run {
    pub ln_mu: f64,
    pub len: f64,
    pub ln_len: f64,
    /// First index of the run (1-based; `+∞` when out of range).
    pub start: f64,
    pub ln_start: f64,
}

/// Materialised run-length form of a model up to a horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSequence {
    pub runs: Vec<Run>,
    /// `ln` of the first index past the data.
    pub ln_end: f64,
}

/// Exponents `a_1..=a_K` of the plateau sequence, raw.
pub fn besicovitch_exponents(lambda: f64, k_max: usize) -> Vec<f64> {
    let c = lambda.ln() / (lambda - 1.0);
    (1..=k_max)
        .map(|k| if k == 1 { 0.0 } else { lambda.powi(k as i32) - c * k as f64 })
        .collect()
}

/// First integer `≥ e^a` in log form, exact while it fits.
fn ceil_exp(a: f64) -> (f64, f64) {
    if a < 36.0 {
        let n = a.exp().ceil().max(1.0);
        (n, n.ln())
    } else {
        (f64::INFINITY, a)
    }
}

impl EigenvalueModel {
    pub fn new(kind: ModelKind) -> Result<Self> {
        match &kind {
            ModelKind::PowerLaw { alpha } if !(*alpha > 0.0 && alpha.is_finite()) => {
                return invalid(format!("power law exponent must be positive, got {alpha}"))
            }
            ModelKind::PowerLog { alpha, beta } => {
                if !(*alpha > 0.0 && alpha.is_finite()) {
                    return invalid(format!("power-log exponent must be positive, got {alpha}"));
                }
                if !(*beta >= 0.0 && beta.is_finite()) {
                    return invalid(format!("log exponent must be nonnegative (non-increasing sequence), got {beta}"));
                }
            }
            ModelKind::Besicovitch { lambda } if !(*lambda > 1.0 && lambda.is_finite()) => {
                return invalid(format!("plateau sequence needs lambda > 1, got {lambda}"))
            }
            ModelKind::Torus { d, cutoff } if *d == 0 || *cutoff == 0 => {
                return invalid("torus needs d >= 1 and cutoff >= 1")
            }
            ModelKind::External { runs, .. } => validate_runs(runs)?,
            _ => {}
        }
        Ok(Self { kind, power: 1.0 })
    }

    pub fn powered(mut self, power: f64) -> Result<Self> {
        if !(power > 0.0 && power.is_finite()) {
            return invalid(format!("power must be positive, got {power}"));
        }
        self.power *= power;
        Ok(self)
    }

    pub fn name(&self) -> String {
        let base = match &self.kind {
            ModelKind::PowerLaw { alpha } => format!("powerlaw:{alpha}"),
            ModelKind::PowerLog { alpha, beta } => format!("powerlog:{alpha},{beta}"),
            ModelKind::Besicovitch { lambda } => format!("besicovitch:{lambda}"),
            ModelKind::Torus { d, cutoff } => format!("torus:{d},{cutoff}"),
            ModelKind::External { source, .. } => format!("external:{source}"),
        };
        if self.power == 1.0 {
            base
        } else {
            format!("{base}^{}", self.power)
        }
    }

    /// Reads `n,mu` (μ_n = mu on `[n_i, n_{i+1})`, first `n = 1`) or
    /// `value,count` CSV, detected by header.
    pub fn from_csv<R: std::io::Read>(r: R, source: &str) -> Result<Self> {
        let mut text = String::new();
        let mut r = r;
        r.read_to_string(&mut text)?;
        let header = text.lines().next().unwrap_or("").replace(' ', "");
        let runs = if header == "value,count" {
            read_pairs(text.as_bytes(), ["value", "count"])?
        } else {
            let rows = read_pairs(text.as_bytes(), ["n", "mu"])?;
            indexed_to_runs(&rows)?
        };
        Self::new(ModelKind::External { source: source.to_string(), runs })
    }

    pub fn closed_forms(&self) -> ClosedForms {
        let p = self.power;
        match self.kind {
            ModelKind::PowerLaw { alpha } => {
                let d = 1.0 / (alpha * p);
                ClosedForms { d_b: Some(d), d_h: Some(d), dixmier: Some(1.0 / (alpha * p * d)) }
            }
            ModelKind::PowerLog { alpha, beta } => {
                let d = 1.0 / (alpha * p);
                // σ_n(d) ~ Σ 1/(k (ln k)^{βd}); the ratio to ln n tends to 1
                // only for β = 0.
                let dix = if beta == 0.0 { Some(1.0) } else { Some(0.0) };
                ClosedForms { d_b: Some(d), d_h: Some(d), dixmier: dix }
            }
            ModelKind::Besicovitch { lambda } => {
                let d_h = lambda / p;
                ClosedForms {
                    d_b: Some(lambda / p),
                    d_h: Some(d_h),
                    dixmier: Some(lambda.powf(1.0 / (1.0 - lambda)) / (lambda - 1.0)),
                }
            }
            ModelKind::Torus { d, .. } => {
                ClosedForms { d_b: Some(d as f64 / (2.0 * p)), d_h: Some(d as f64 / (2.0 * p)), dixmier: None }
            }
            ModelKind::External { .. } => ClosedForms::default(),
        }
    }

    /// Run-length form, at most `n_max` runs (= indices for the closed-form
    /// laws). For the plateau sequence the count is further capped so that
    /// `a_{K+1} ≤ 2^40`.
    pub fn runs(&self, n_max: f64) -> Result<RunSequence> {
        if !(n_max >= 1.0) {
            return invalid(format!("n_max must be at least 1, got {n_max}"));
        }
        let cap = n_max.floor();
        if cap > MAX_RUNS as f64 && !matches!(self.kind, ModelKind::Besicovitch { .. }) {
            return Err(Error::Resource(format!(
                "{cap} run-length entries requested; at most {MAX_RUNS} can be materialised"
            )));
        }
        let cap = cap.min(MAX_RUNS as f64) as usize;
        let p = self.power;
        let mut b = RunBuilder::new();
        match &self.kind {
            ModelKind::PowerLaw { alpha } => {
                for n in 1..=cap {
                    b.push_exact(-alpha * p * (n as f64).ln(), 1.0);
                }
            }
            ModelKind::PowerLog { alpha, beta } => {
                for n in 1..=cap {
                    let x = n as f64;
                    b.push_exact(p * (-alpha * x.ln() - beta * (x + 1.0).ln().ln()), 1.0);
                }
            }
            ModelKind::Besicovitch { lambda } => {
                let starts = besicovitch_starts(*lambda, cap)?;
                for w in starts.windows(2) {
                    let (a, s0, ls0) = w[0];
                    let (_, s1, ls1) = w[1];
                    let (len, ln_len) = if s1.is_finite() { (s1 - s0, (s1 - s0).ln()) } else { (f64::INFINITY, ln_sub(ls1, ls0)) };
                    b.push_raw(Run { ln_mu: -a * p, len, ln_len, start: s0, ln_start: ls0 });
                }
                let (_, s, ls) = *starts.last().unwrap();
                b.end = (s, ls);
            }
            ModelKind::Torus { d: 1, cutoff } => {
                for x in 1..=(*cutoff).min(cap as u64) {
                    let m = (x * x) as f64;
                    b.push_exact(-p * (4.0 * PI * PI * m).ln(), 2.0);
                }
            }
            ModelKind::Torus { d, cutoff } => {
                let counts = torus_shell_counts(*d, *cutoff)?;
                for (m, c) in counts.into_iter().enumerate().skip(1) {
                    if c > 0 {
                        if b.runs.len() >= cap {
                            break;
                        }
                        b.push_exact(-p * (4.0 * PI * PI * m as f64).ln(), c as f64);
                    }
                }
            }
            ModelKind::External { runs, .. } => {
                for &(v, c) in runs.iter().take(cap) {
                    b.push_exact(p * v.ln(), c);
                }
            }
        }
        if b.runs.is_empty() {
            return invalid("model produced no terms");
        }
        Ok(b.finish())
    }

    /// The first `n_max` terms `μ_n` (expanded; for inspection and oracles).
    pub fn generate(&self, n_max: usize) -> Result<Vec<f64>> {
        if n_max > MAX_RUNS {
            return Err(Error::Resource(format!("{n_max} terms requested; at most {MAX_RUNS}")));
        }
        let runs = self.runs(n_max as f64)?;
        let mut out = Vec::with_capacity(n_max);
        'outer: for r in &runs.runs {
            let v = r.ln_mu.exp();
            let mut k = 0.0;
            while k < r.len {
                if out.len() == n_max {
                    break 'outer;
                }
                out.push(v);
                k += 1.0;
            }
        }
        Ok(out)
    }

    /// Partial-sum source: exact run-length sums, or quadrature for the
    /// closed-form laws past `2^22` indices.
    pub fn series(&self, n_max: f64) -> Result<Box<dyn SeriesSums>> {
        match self.kind {
            ModelKind::PowerLaw { alpha } | ModelKind::PowerLog { alpha, .. } if n_max > SMOOTH_ABOVE => {
                let beta = if let ModelKind::PowerLog { beta, .. } = self.kind { beta } else { 0.0 };
                if !n_max.is_finite() {
                    return invalid("n_max must be finite");
                }
                Ok(Box::new(SmoothLaw {
                    alpha,
                    beta,
                    power: self.power,
                    ln_n_max: n_max.floor().ln(),
                    head: self.runs(SMOOTH_HEAD as f64)?,
                }))
            }
            _ => Ok(Box::new(self.runs(n_max)?)),
        }
    }

    /// `μ(t) = μ_{⌊t⌋}` in log coordinates, informative on `t < n_max`.
    pub fn profile(&self, n_max: f64) -> Result<Box<dyn LogProfile>> {
        match self.kind {
            ModelKind::PowerLaw { alpha } => Ok(Box::new(ClosedProfile { alpha, beta: 0.0, power: self.power, n_max })),
            ModelKind::PowerLog { alpha, beta } => Ok(Box::new(ClosedProfile { alpha, beta, power: self.power, n_max })),
            _ => Ok(Box::new(self.runs(n_max)?.log_step()?)),
        }
    }
}

fn validate_runs(runs: &[(f64, f64)]) -> Result<()> {
    if runs.is_empty() {
        return invalid("empty sequence");
    }
    for (i, &(v, c)) in runs.iter().enumerate() {
        if !(v > 0.0 && v.is_finite()) {
            return invalid(format!("entry {}: values must be positive and finite, got {v}", i + 1));
        }
        if !(c >= 1.0 && c.is_finite() && c.fract() == 0.0) {
            return invalid(format!("entry {}: counts must be positive integers, got {c}", i + 1));
        }
        if i > 0 && v > runs[i - 1].0 {
            return invalid(format!("entry {}: values must be non-increasing", i + 1));
        }
    }
    Ok(())
}

fn indexed_to_runs(rows: &[(f64, f64)]) -> Result<Vec<(f64, f64)>> {
    if rows.is_empty() {
        return Err(Error::Parse { line: 1, msg: "no data rows".into() });
    }
    if rows[0].0 != 1.0 {
        return Err(Error::Parse { line: 2, msg: "the first index must be 1".into() });
    }
    let mut out = Vec::with_capacity(rows.len());
    for (i, &(n, mu)) in rows.iter().enumerate() {
        let line = i as u64 + 2;
        if n.fract() != 0.0 || n < 1.0 {
            return Err(Error::Parse { line, msg: format!("index must be a positive integer, got {n}") });
        }
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(Error::Parse { line, msg: format!("mu must be positive and finite, got {mu}") });
        }
        if i > 0 {
            if n <= rows[i - 1].0 {
                return Err(Error::Parse { line, msg: "indices must be strictly increasing".into() });
            }
            if mu > rows[i - 1].1 {
                return Err(Error::Parse { line, msg: "mu must be non-increasing".into() });
            }
        }
        let next = rows.get(i + 1).map_or(n + 1.0, |r| r.0);
        out.push((mu, (next - n).max(1.0)));
    }
    Ok(out)
}

/// `(a_k, ⌈e^{a_k}⌉, ln ⌈e^{a_k}⌉)` for the non-empty plateaus `k = 1..=K`
/// plus the end of the last one. Exponents are made non-decreasing and
/// plateaus with no integer inside are dropped.
fn besicovitch_starts(lambda: f64, max_runs: usize) -> Result<Vec<(f64, f64, f64)>> {
    let c = lambda.ln() / (lambda - 1.0);
    let mut out: Vec<(f64, f64, f64)> = Vec::new();
    let mut a_max = f64::NEG_INFINITY;
    let mut k = 1u32;
    loop {
        let a = if k == 1 { 0.0 } else { lambda.powi(k as i32) - c * k as f64 };
        if a > PLATEAU_LN_LIMIT || !a.is_finite() {
            break;
        }
        a_max = a_max.max(a);
        let (s, ls) = ceil_exp(a_max);
        match out.last_mut() {
            Some(last) if last.2 >= ls => {
                // Empty plateau: the new exponent takes over the same start.
                last.0 = a_max;
            }
            _ => {
                if out.len() > max_runs {
                    break;
                }
                out.push((a_max, s, ls));
            }
        }
        k += 1;
        if k > 10_000 {
            break;
        }
    }
    if out.len() < 2 {
        return invalid("plateau sequence too short for the requested horizon");
    }
    Ok(out)
}

/// `r_d(m)` = number of `k ∈ ℤ^d` with `|k|² = m`, for `m ≤ cutoff²`.
pub fn torus_shell_counts(d: u32, cutoff: u64) -> Result<Vec<u64>> {
    let m_max = cutoff.checked_mul(cutoff).ok_or_else(|| Error::Overflow("cutoff squared overflows".into()))?;
    if m_max > 50_000_000 {
        return Err(Error::Resource(format!("torus shell table of {m_max} entries")));
    }
    let m_max = m_max as usize;
    let mut r = vec![0u64; m_max + 1];
    r[0] = 1;
    for _ in 0..d {
        let mut next = vec![0u64; m_max + 1];
        for (m, &c) in r.iter().enumerate() {
            if c == 0 {
                continue;
            }
            next[m] += c;
            let mut x = 1usize;
            while m + x * x <= m_max {
                next[m + x * x] += 2 * c;
                x += 1;
            }
        }
        r = next;
    }
    Ok(r)
}

struct RunBuilder {
    runs: Vec<Run>,
    /// Next start `(n, ln n)`.
    end: (f64, f64),
}

impl RunBuilder {
    fn new() -> Self {
        Self { runs: Vec::new(), end: (1.0, 0.0) }
    }

    /// Appends a run of integer length, merging equal values.
    fn push_exact(&mut self, ln_mu: f64, len: f64) {
        let (s, ls) = self.end;
        let next = s + len;
        self.end = if next.is_finite() && next <= EXACT { (next, next.ln()) } else { (f64::INFINITY, ln_add(ls, len.ln())) };
        if let Some(last) = self.runs.last_mut() {
            if last.ln_mu == ln_mu {
                last.len += len;
                last.ln_len = last.len.ln();
                return;
            }
        }
        self.runs.push(Run { ln_mu, len, ln_len: len.ln(), start: s, ln_start: ls });
    }

    fn push_raw(&mut self, r: Run) {
        self.runs.push(r);
    }

    fn finish(mut self) -> RunSequence {
        if self.runs.len() > 1 && self.end.1 == 0.0 {
            self.end = (1.0, 0.0);
        }
        RunSequence { runs: self.runs, ln_end: self.end.1 }
    }
}

fn ln_add(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

impl RunSequence {
    /// `μ(t) = μ_{⌊t⌋}` as a log-domain step function (the first value also
    /// covers `t < 1`), informative up to the end of the last run.
    pub fn log_step(&self) -> Result<LogStep> {
        let x: Vec<f64> = self.runs.iter().skip(1).map(|r| r.ln_start).collect();
        let y: Vec<f64> = self.runs.iter().map(|r| r.ln_mu).collect();
        LogStep::new(x, y, None, (f64::NEG_INFINITY, self.ln_end))
    }

    /// `ln N` for the number `N` of indices covered.
    pub fn ln_len(&self) -> f64 {
        let last = self.runs.last().unwrap();
        if last.start.is_finite() && (last.start + last.len).is_finite() {
            (last.start + last.len - 1.0).ln()
        } else {
            ln_add(last.ln_start, last.ln_len).max(last.ln_start)
        }
    }

    /// `ln σ_n(d)` at each checkpoint `ln n` (ascending; `n` rounded down
    /// while it is exact). Checkpoints past the data give `NaN`.
    pub fn ln_partial_sums(&self, d: f64, ln_n: &[f64]) -> Vec<f64> {
        let mut out = vec![f64::NAN; ln_n.len()];
        let mut acc = LogSum::new();
        let mut c = 0;
        for r in &self.runs {
            let term = d * r.ln_mu;
            // Log of the last index in the run.
            let ln_last = if r.start.is_finite() && (r.start + r.len).is_finite() {
                (r.start + r.len - 1.0).ln() + 1e-12
            } else {
                ln_add(r.ln_start, r.ln_len)
            };
            while c < ln_n.len() && ln_n[c] <= ln_last {
                let x = ln_n[c];
                let n = if x < 36.0 { (x.exp() + 1e-9).floor() } else { f64::INFINITY };
                let ln_k = if n.is_finite() && r.start.is_finite() {
                    let k = n - r.start + 1.0;
                    if k < 1.0 {
                        // Rounded onto the previous run's last index.
                        out[c] = acc.ln();
                        c += 1;
                        continue;
                    }
                    k.min(r.len).ln()
                } else {
                    ln_sub(x, r.ln_start).max(0.0).min(r.ln_len)
                };
                let mut s = acc;
                s.push(term + ln_k);
                out[c] = s.ln();
                c += 1;
            }
            acc.push(term + r.ln_len);
        }
        out
    }

    /// `ln σ_N(d)` over all runs.
    pub fn ln_total(&self, d: f64) -> f64 {
        let mut acc = LogSum::new();
        for r in &self.runs {
            acc.push(d * r.ln_mu + r.ln_len);
        }
        acc.ln()
    }
}

/// Partial sums `σ_n(d) = Σ_{k≤n} μ_k^d`, in logs.
pub trait SeriesSums {
    /// `ln N` for the last index covered.
    fn ln_len(&self) -> f64;
    /// `ln σ_n(d)` at ascending checkpoints `ln n`; `NaN` past the data.
    fn ln_partial_sums(&self, d: f64, ln_n: &[f64]) -> Vec<f64>;
    fn ln_total(&self, d: f64) -> f64 {
        self.ln_partial_sums(d, &[self.ln_len()])[0]
    }
    /// Number of runs, for run-length data.
    fn run_count(&self) -> Option<usize> {
        None
    }
    /// `(ln first index, ln last index)` of every run.
    fn run_bounds(&self) -> Option<Vec<(f64, f64)>> {
        None
    }
}

impl SeriesSums for RunSequence {
    fn ln_len(&self) -> f64 {
        RunSequence::ln_len(self)
    }

    fn ln_partial_sums(&self, d: f64, ln_n: &[f64]) -> Vec<f64> {
        RunSequence::ln_partial_sums(self, d, ln_n)
    }

    fn ln_total(&self, d: f64) -> f64 {
        RunSequence::ln_total(self, d)
    }

    fn run_count(&self) -> Option<usize> {
        Some(self.runs.len())
    }

    fn run_bounds(&self) -> Option<Vec<(f64, f64)>> {
        Some(
            self.runs
                .iter()
                .map(|r| {
                    let last = if r.start.is_finite() && (r.start + r.len).is_finite() {
                        (r.start + r.len - 1.0).ln()
                    } else {
                        ln_add(r.ln_start, r.ln_len)
                    };
                    (r.ln_start, last)
                })
                .collect(),
        )
    }
}

/// Index count above which the closed-form laws are summed by quadrature.
pub const SMOOTH_ABOVE: f64 = 4_194_304.0; // 2^22
const SMOOTH_HEAD: usize = 1 << 16;
const GL8: [(f64, f64); 4] = [
    (0.183_434_642_495_65, 0.362_683_783_378_362_0),
    (0.525_532_409_916_329, 0.313_706_645_877_887_3),
    (0.796_666_477_413_626_7, 0.222_381_034_453_374_5),
    (0.960_289_856_497_536_3, 0.101_228_536_290_376_3),
];

/// Closed-form law summed exactly up to `2^16` and by Euler–Maclaurin
/// (`Σ_{n₀<k≤n} f(k) ≈ ∫_{n₀}^n f + (f(n) − f(n₀))/2`) beyond, with the
/// integral done by Gauss–Legendre in `u = ln t`.
pub struct SmoothLaw {
    alpha: f64,
    beta: f64,
    power: f64,
    ln_n_max: f64,
    head: RunSequence,
}

impl SmoothLaw {
    fn ln_f(&self, u: f64) -> f64 {
        let ll = if self.beta == 0.0 { 0.0 } else { self.beta * (u + (-u).exp().ln_1p()).ln() };
        self.power * (-self.alpha * u - ll)
    }
}

impl SeriesSums for SmoothLaw {
    fn ln_len(&self) -> f64 {
        self.ln_n_max
    }

    fn ln_partial_sums(&self, d: f64, ln_n: &[f64]) -> Vec<f64> {
        let u0 = (SMOOTH_HEAD as f64).ln();
        let split = ln_n.partition_point(|&x| x <= u0 + 1e-12);
        let mut out = self.head.ln_partial_sums(d, &ln_n[..split]);
        let s0 = self.head.ln_total(d);
        // σ(n₀) − f(n₀)^d/2 ≥ f(n₀)^d/2 > 0.
        let base = ln_sub(s0, d * self.ln_f(u0) - LN_2);
        let mut integral = LogSum::new();
        let mut u = u0;
        for &x in &ln_n[split..] {
            if x > self.ln_n_max + 1e-9 {
                out.push(f64::NAN);
                continue;
            }
            let pieces = ((x - u) / 0.1).ceil().max(1.0) as usize;
            let h = (x - u) / pieces as f64;
            for i in 0..pieces {
                let mid = u + (i as f64 + 0.5) * h;
                for &(node, w) in &GL8 {
                    for v in [mid - node * h / 2.0, mid + node * h / 2.0] {
                        integral.push((w * h / 2.0).ln() + v + d * self.ln_f(v));
                    }
                }
            }
            u = x;
            let mut s = integral;
            s.push(base);
            s.push(d * self.ln_f(x) - LN_2);
            out.push(s.ln());
        }
        out
    }
}

/// `μ(t) = t^{-α}(ln(t+1))^{-β}` at integer `t`, raised to `power`.
struct ClosedProfile {
    alpha: f64,
    beta: f64,
    power: f64,
    n_max: f64,
}

impl LogProfile for ClosedProfile {
    fn ln_at(&self, x: f64, t: f64) -> f64 {
        let (ln_n, ln_n1) = if t.is_finite() && t < EXACT {
            let n = t.floor().max(1.0);
            (n.ln(), (n + 1.0).ln())
        } else {
            let x = x.max(0.0);
            (x, x + (-x).exp().ln_1p())
        };
        let ll = if self.beta == 0.0 { 0.0 } else { self.beta * ln_n1.ln() };
        self.power * (-self.alpha * ln_n - ll)
    }

    fn domain(&self) -> (f64, f64) {
        (f64::NEG_INFINITY, self.n_max.ln())
    }
}

// ---------------------------------------------------------------------------
// Box dimension

/// Grid for box dimensions: dyadic from `t0 = 16`, covering the data.
pub fn box_grid() -> GridSpec {
    GridSpec { t0: 16.0, count: u64::MAX, ..GridSpec::default() }
}

/// `d_B = 1/ord∞(μ)`; `+∞` when the order estimate is 0.
pub fn box_dimension(model: &EigenvalueModel, n_max: f64, grid: Option<GridSpec>) -> Result<(f64, OrderEstimate)> {
    let profile = model.profile(n_max)?;
    let est = order_at_infinity(profile.as_ref(), &grid.unwrap_or_else(box_grid))?;
    let d = if est.value == 0.0 { f64::INFINITY } else { 1.0 / est.value };
    Ok((d, est))
}

// ---------------------------------------------------------------------------
// Hausdorff dimension

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Growth {
    /// `σ_n(d) = o(ln n)`.
    Zero,
    PositiveFinite,
    Infinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HausdorffConfig {
    pub d_lo: f64,
    pub d_hi: f64,
    pub iterations: u32,
    /// `|log₂(P₂/P₁)|` above which growth/decay of `σ_n/ln n` is decided.
    pub gap: f64,
    pub checkpoints: usize,
}

impl Default for HausdorffConfig {
    fn default() -> Self {
        Self { d_lo: 0.05, d_hi: 20.0, iterations: 24, gap: 0.2, checkpoints: 257 }
    }
}

/// Classifies `limsup σ_n(d)/ln n` from its peaks on the two halves of the
/// log-index range `[L/4, L/2]`, `[L/2, L]`.
pub struct Classifier<'a> {
    seq: &'a dyn SeriesSums,
    ln_n: Vec<f64>,
    half: f64,
    cfg: HausdorffConfig,
}

impl<'a> Classifier<'a> {
    pub fn new(seq: &'a dyn SeriesSums, cfg: HausdorffConfig) -> Result<Self> {
        let l = seq.ln_len();
        if !(l > 4.0 * LN_2) {
            return invalid("sequence too short to classify partial sums");
        }
        let k = cfg.checkpoints.max(9);
        let mut ln_n: Vec<f64> = (0..k).map(|i| l * (0.25 + 0.75 * i as f64 / (k - 1) as f64)).collect();
        if seq.run_count().is_some_and(|c| c <= 4096) {
            // Plateau ends carry the extreme values of σ_n / ln n.
            for (_, e) in seq.run_bounds().unwrap_or_default() {
                if e >= l / 4.0 && e <= l {
                    ln_n.push(e);
                }
            }
        }
        ln_n.sort_by(|a, b| a.partial_cmp(b).unwrap());
        ln_n.dedup();
        Ok(Self { seq, ln_n, half: l / 2.0, cfg })
    }

    /// `log₂(P₂/P₁)` at `d`.
    pub fn log_gap(&self, d: f64) -> f64 {
        let sums = self.seq.ln_partial_sums(d, &self.ln_n);
        let (mut p1, mut p2) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
        for (&x, &s) in self.ln_n.iter().zip(&sums) {
            if s.is_nan() || x <= 0.0 {
                continue;
            }
            let rho = s - x.ln();
            if x <= self.half {
                p1 = p1.max(rho);
            } else {
                p2 = p2.max(rho);
            }
        }
        (p2 - p1) / LN_2
    }

    pub fn classify(&self, d: f64) -> Growth {
        let g = self.log_gap(d);
        if g < -self.cfg.gap {
            Growth::Zero
        } else if g > self.cfg.gap {
            Growth::Infinite
        } else {
            Growth::PositiveFinite
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bracket {
    pub lo: f64,
    #[serde(with = "ext")]
    pub hi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HausdorffBracket {
    pub d_lo: f64,
    #[serde(with = "ext")]
    pub d_hi: f64,
    /// `inf{d : σ_n(d) = o(ln n)}` bisection bracket.
    pub inf_char: Bracket,
    /// `sup{d : σ_n(d) ≠ O(ln n)}` bisection bracket.
    pub sup_char: Bracket,
    /// Verdicts at the probed `d`, for the monotonicity check.
    pub probes: Vec<(f64, Growth)>,
    pub monotone: bool,
    pub warnings: Vec<String>,
}

impl HausdorffBracket {
    pub fn contains(&self, d: f64) -> bool {
        self.d_lo <= d && d <= self.d_hi
    }

    pub fn width(&self) -> f64 {
        self.d_hi - self.d_lo
    }
}

/// Brackets `d_H` by two bisections: the last `d` classified infinite and
/// the first classified zero.
pub fn hausdorff_dimension(seq: &dyn SeriesSums, cfg: &HausdorffConfig) -> Result<HausdorffBracket> {
    if !(cfg.d_lo > 0.0 && cfg.d_hi > cfg.d_lo) {
        return invalid("Hausdorff search interval must satisfy 0 < lo < hi");
    }
    let c = Classifier::new(seq, *cfg)?;
    let mut probes = Vec::new();
    let mut probe = |d: f64| {
        let g = c.classify(d);
        probes.push((d, g));
        g
    };
    let mut warnings = Vec::new();

    // pred true at lo, false at hi. When it holds (fails) on the whole
    // interval the bracket is one-sided: [hi, ∞] ([0, lo]).
    let bisect = |pred: &mut dyn FnMut(f64) -> bool| -> std::result::Result<Bracket, Bracket> {
        let (mut a, mut b) = (cfg.d_lo, cfg.d_hi);
        if !pred(a) {
            return Err(Bracket { lo: 0.0, hi: a });
        }
        if pred(b) {
            return Err(Bracket { lo: b, hi: f64::INFINITY });
        }
        for _ in 0..cfg.iterations {
            let m = 0.5 * (a + b);
            if pred(m) {
                a = m;
            } else {
                b = m;
            }
        }
        Ok(Bracket { lo: a, hi: b })
    };
    let sup_char = bisect(&mut |d| probe(d) == Growth::Infinite).unwrap_or_else(|b| {
        warnings.push(format!("partial sums classified infinite nowhere or everywhere on [{}, {}]", cfg.d_lo, cfg.d_hi));
        b
    });
    let inf_char = bisect(&mut |d| probe(d) != Growth::Zero).unwrap_or_else(|b| {
        warnings.push(format!("partial sums classified zero nowhere or everywhere on [{}, {}]", cfg.d_lo, cfg.d_hi));
        b
    });
    let (d_lo, d_hi) = (sup_char.lo, inf_char.hi);

    probes.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let rank = |g: Growth| match g {
        Growth::Infinite => 0,
        Growth::PositiveFinite => 1,
        Growth::Zero => 2,
    };
    let monotone = probes.windows(2).all(|w| rank(w[0].1) <= rank(w[1].1));
    if !monotone {
        warnings.push("classifier verdict not monotone in d".into());
    }
    if d_lo > d_hi {
        return Err(Error::InvariantViolation(format!("Hausdorff bracket inverted: [{d_lo}, {d_hi}]")));
    }
    Ok(HausdorffBracket { d_lo, d_hi, inf_char, sup_char, probes, monotone, warnings })
}

// ---------------------------------------------------------------------------
// Dixmier trajectory

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Subsequence {
    /// Plateau starts for the plateau sequence, powers of two otherwise.
    Auto,
    /// Explicit indices `n`.
    Explicit(Vec<f64>),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DixmierPoint {
    /// Plateau number for plateau starts, else the position in the list.
    pub k: usize,
    #[serde(with = "ext")]
    pub n: f64,
    pub ln_n: f64,
    #[serde(with = "ext")]
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DixmierTrajectory {
    pub d: f64,
    pub points: Vec<DixmierPoint>,
    /// A ratio left the `f64` range; later points were dropped.
    pub truncated: bool,
}

/// `σ_n(d)/ln n` along the subsequence.
pub fn dixmier_trajectory(model: &EigenvalueModel, seq: &dyn SeriesSums, d: f64, sub: &Subsequence) -> Result<DixmierTrajectory> {
    if !(d > 0.0 && d.is_finite()) {
        return invalid(format!("d must be positive, got {d}"));
    }
    let mut ks: Vec<(usize, f64)> = match sub {
        Subsequence::Explicit(ns) => {
            let mut v = Vec::new();
            for (i, &n) in ns.iter().enumerate() {
                if !(n >= 2.0) {
                    return invalid(format!("subsequence index {n} must be at least 2"));
                }
                v.push((i, n.ln()));
            }
            v
        }
        Subsequence::Auto => match (&model.kind, seq.run_bounds()) {
            (ModelKind::Besicovitch { .. }, Some(bounds)) => {
                bounds.iter().enumerate().skip(1).map(|(i, &(s, _))| (i + 1, s)).collect()
            }
            _ => {
                let l = seq.ln_len();
                (1..).map(|j| (j, j as f64 * LN_2)).take_while(|&(_, x)| x <= l + 1e-12).collect()
            }
        },
    };
    ks.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
    let xs: Vec<f64> = ks.iter().map(|k| k.1).collect();
    let sums = seq.ln_partial_sums(d, &xs);
    let mut points = Vec::with_capacity(ks.len());
    let mut truncated = false;
    for (&(k, x), &s) in ks.iter().zip(&sums) {
        if s.is_nan() {
            break;
        }
        let v = (s - x.ln()).exp();
        if !v.is_finite() {
            truncated = true;
            break;
        }
        let n = if x < 36.0 { (x.exp() + 1e-9).floor() } else { x.exp() };
        points.push(DixmierPoint { k, n, ln_n: x, value: v });
    }
    Ok(DixmierTrajectory { d, points, truncated })
}

// ---------------------------------------------------------------------------
// Regularity

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Regularity {
    /// `ln μ_n / ln(1/n)` converges (last-quarter spread < tol).
    pub regularity_a: bool,
    #[serde(with = "ext")]
    pub spread_a: f64,
    /// `μ_{2n}/μ_n` converges.
    pub regularity_b: bool,
    #[serde(with = "ext")]
    pub spread_b: f64,
    /// Last computed `μ_{2n}/μ_n`.
    pub ratio_2n: f64,
}

pub const REGULARITY_TOL: f64 = 0.02;

/// Existence tests for the two limits over the last quarter of the dyadic
/// indices below `N`.
pub fn regularity_tests(model: &EigenvalueModel, n_max: f64) -> Result<Regularity> {
    let (_, est) = box_dimension(model, n_max, None)?;
    let profile = model.profile(n_max)?;
    let hi = match model.kind {
        ModelKind::PowerLaw { .. } | ModelKind::PowerLog { .. } => n_max.ln(),
        _ => profile.domain().1,
    };
    // Pairs (n, 2n) with n up to the start of the last run: the final run of
    // a plateau sequence fills the whole last quarter, the break before it
    // must be seen.
    let top = match model.kind {
        ModelKind::PowerLaw { .. } | ModelKind::PowerLog { .. } => hi,
        _ => {
            let seq = model.runs(n_max)?;
            let last = seq.runs.last().unwrap().ln_start;
            if seq.runs.len() > 1 { last } else { hi }
        }
    };
    let jmax = (((top.min(hi - LN_2)) / LN_2).floor() as i64).max(1) as u64;
    let j0 = (jmax - jmax / 4).max(1);
    let mut js: Vec<u64> = if jmax - j0 <= 1 << 20 {
        (j0..=jmax).collect()
    } else {
        let lo = j0 as f64 * LN_2;
        let hi = (jmax + 1) as f64 * LN_2;
        let breaks = profile
            .ln_breaks(lo, hi)
            .ok_or_else(|| Error::Resource("dyadic range too long for a closed-form profile".into()))?;
        let mut v = vec![j0, jmax];
        for b in breaks {
            let j = (b / LN_2).floor() as u64;
            for c in [j.saturating_sub(1), j, j + 1] {
                if c >= j0 && c <= jmax {
                    v.push(c);
                }
            }
        }
        v
    };
    js.sort_unstable();
    js.dedup();
    let point = |j: u64| {
        let t = if j < 1000 { 2f64.powi(j as i32) } else { f64::INFINITY };
        (j as f64 * LN_2, t)
    };
    let (mut qmin, mut qmax, mut last) = (f64::INFINITY, f64::NEG_INFINITY, f64::NAN);
    for j in js {
        let (x1, t1) = point(j);
        let (x2, t2) = point(j + 1);
        let q = (profile.ln_at(x2, t2) - profile.ln_at(x1, t1)).exp();
        qmin = qmin.min(q);
        qmax = qmax.max(q);
        last = q;
    }
    let spread_b = qmax - qmin;
    Ok(Regularity {
        regularity_a: est.ratio_spread < REGULARITY_TOL,
        spread_a: est.ratio_spread,
        regularity_b: spread_b < REGULARITY_TOL,
        spread_b,
        ratio_2n: last,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartialSumDoubling {
    pub d: f64,
    pub branch: Integrability,
    /// Tail value of the block ratio `(s_{4n} − s_{2n})/(s_{2n} − s_n)`; by
    /// Stolz–Cesàro it has the same limit as `s_{2n}/s_n`.
    pub limit: f64,
    /// Last-quarter range of the block ratio.
    pub spread: f64,
    /// `s_{2n}/s_n` itself at the largest usable `n` (prefix sums), or at
    /// `n ≈ √N` (tail sums truncated at `N`). Converges much more slowly.
    pub direct: f64,
    pub n: f64,
    pub warnings: Vec<String>,
}

/// Limit of `s_{2n}(d)/s_n(d)`; prefix sums when `Σ μ_k^d` diverges, tail
/// sums when it converges (decided by the block ratio being below 1).
pub fn partial_sum_doubling(model: &EigenvalueModel, seq: &dyn SeriesSums, n_max: f64, d: f64) -> Result<PartialSumDoubling> {
    if !(d > 0.0 && d.is_finite()) {
        return invalid(format!("d must be positive, got {d}"));
    }
    let l = seq.ln_len();
    let jmax = (l / LN_2 + 1e-9).floor() as usize;
    if jmax < 6 {
        return invalid("sequence too short for doubling ratios");
    }
    let xs: Vec<f64> = (0..=jmax).map(|j| j as f64 * LN_2).collect();
    let s = seq.ln_partial_sums(d, &xs);
    // Blocks b_j = s(2^{j+1}) − s(2^j).
    let b: Vec<f64> = (0..jmax).map(|j| ln_sub(s[j + 1], s[j])).collect();
    let r: Vec<f64> = (0..jmax - 1).map(|j| (b[j + 1] - b[j]).exp()).collect();
    let q0 = r.len() - r.len() / 4;
    let tail = &r[q0.min(r.len() - 1)..];
    let spread = tail.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - tail.iter().cloned().fold(f64::INFINITY, f64::min);
    let limit = *r.last().unwrap();
    let mut warnings = Vec::new();
    let reg = regularity_tests(model, n_max)?;
    if !reg.regularity_b {
        warnings.push(format!("mu_2n/mu_n has no clear limit (spread {:.3}); estimate reported anyway", reg.spread_b));
    }
    let branch = if limit < 1.0 { Integrability::Summable } else { Integrability::NonSummable };
    let (direct, n) = match branch {
        Integrability::NonSummable => ((s[jmax] - s[jmax - 1]).exp(), 2f64.powi(jmax as i32 - 1)),
        Integrability::Summable => {
            let total = seq.ln_total(d);
            let j = jmax / 2;
            let t = |k: usize| ln_sub(total, s[k]);
            ((t(j + 1) - t(j)).exp(), 2f64.powi(j as i32))
        }
    };
    Ok(PartialSumDoubling { d, branch, limit, spread, direct, n, warnings })
}

// ---------------------------------------------------------------------------
// Report

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimensionReport {
    pub model: String,
    pub n_max: f64,
    /// `ln N` of the data actually used.
    pub ln_horizon: f64,
    pub runs: Option<usize>,
    #[serde(with = "ext")]
    pub d_b: f64,
    pub d_b_estimate: OrderEstimate,
    pub d_h: HausdorffBracket,
    pub regularity: Regularity,
    /// At the closed-form `d_H` when known, else the bracket midpoint.
    pub dixmier: DixmierTrajectory,
    pub closed_forms: ClosedForms,
    /// `d_H` is not pinned inside the search interval.
    pub indeterminate: bool,
    pub warnings: Vec<String>,
}

pub fn dimension_report(model: &EigenvalueModel, n_max: f64, cfg: &HausdorffConfig) -> Result<DimensionReport> {
    let seq = model.series(n_max)?;
    let (d_b, est) = box_dimension(model, n_max, None)?;
    let d_h = hausdorff_dimension(seq.as_ref(), cfg)?;
    let regularity = regularity_tests(model, n_max)?;
    let closed = model.closed_forms();
    let d_dix = closed.d_h.unwrap_or(if d_h.d_hi.is_finite() { 0.5 * (d_h.d_lo + d_h.d_hi) } else { d_h.d_lo });
    let dixmier = dixmier_trajectory(model, seq.as_ref(), d_dix, &Subsequence::Auto)?;
    let indeterminate = d_h.d_lo < cfg.d_lo || d_h.d_hi > cfg.d_hi;
    let mut warnings = d_h.warnings.clone();
    if regularity.regularity_a {
        let tol = REGULARITY_TOL * d_b * d_b + d_h.width();
        let mid = 0.5 * (d_h.d_lo + d_h.d_hi);
        if (d_b - mid).abs() > tol {
            warnings.push(format!("regular sequence but d_B = {d_b:.4} differs from the d_H midpoint {mid:.4}"));
        }
    }
    if regularity.regularity_b && d_b.is_finite() {
        let expect = 2f64.powf(-1.0 / d_b);
        if (regularity.ratio_2n - expect).abs() > REGULARITY_TOL {
            warnings.push(format!("mu_2n/mu_n = {:.4} but 2^(-1/d_B) = {expect:.4}", regularity.ratio_2n));
        }
    }
    Ok(DimensionReport {
        model: model.name(),
        n_max,
        ln_horizon: seq.ln_len(),
        runs: seq.run_count(),
        d_b,
        d_b_estimate: est,
        d_h,
        regularity,
        dixmier,
        closed_forms: closed,
        indeterminate,
        warnings,
    })
}
