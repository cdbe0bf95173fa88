//! Polynomial orders of monotone functions at 0 and at ∞.
//!
//! The order at ∞ is `liminf_{t→∞} ln μ(t) / ln(1/t)` and the order at 0 the
//! same liminf as `t → 0`. Both are estimated on a dyadic grid
//! `t_j = t₀·2^{±j}`: the estimate is the running extremum of the grid ratios
//! over a tail window, with the spread of that extremum over the last quarter
//! of the grid as the convergence diagnostic. Nothing is extrapolated.
//!
//! By default the ratios are anchored at the grid origin,
//!
//! ```text
//! r_j = (ln μ(t_j) − ln μ(t₀)) / (ln t₀ − ln t_j),
//! ```
//!
//! which has the same limit as the raw ratio `ln μ(t_j)/(−ln t_j)` but drops
//! the `O(1/ln t)` bias a multiplicative constant in `μ` would otherwise
//! contribute. Both forms scale exactly under `μ ↦ μ^α`.

use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::io::ext;
use crate::scalar::Scalar;
use crate::stepfn::{LogStep, StepFunction};

/// Grids with more points than this are evaluated only next to plateau
/// edges, where the ratio of a step function attains its extrema.
const DENSE_LIMIT: u64 = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum End {
    Zero,
    Infinity,
}

impl std::str::FromStr for End {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "0" | "zero" => Ok(End::Zero),
            "inf" | "infinity" => Ok(End::Infinity),
            _ => invalid(format!("unknown end `{s}` (expected zero|infinity)")),
        }
    }
}

impl std::fmt::Display for End {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            End::Zero => "zero",
            End::Infinity => "infinity",
        })
    }
}

/// Which running extremum the estimate reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Extremum {
    Liminf,
    Limsup,
}

/// Dyadic grid `t_j = t0 · 2^{±j}`, `j = 1..=count` (`+` toward ∞).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub t0: f64,
    pub count: u64,
    /// Fraction of the grid (by index, from the far end) forming the window
    /// the extremum is taken over.
    pub tail_fraction: f64,
    /// Anchor ratios at `t0` instead of at `t = 1`.
    pub anchored: bool,
    /// Convergence tolerance on the last-quarter spread.
    pub tol: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { t0: 1.0, count: 48, tail_fraction: 0.5, anchored: true, tol: 0.02 }
    }
}

impl GridSpec {
    pub fn with_t0(self, t0: f64) -> Self {
        Self { t0, ..self }
    }

    pub fn with_count(self, count: u64) -> Self {
        Self { count, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t0 > 0.0) || !self.t0.is_finite() {
            return invalid(format!("grid origin must be positive, got {}", self.t0));
        }
        if self.count < 2 {
            return invalid("grid needs at least 2 points");
        }
        if !(self.tail_fraction > 0.0 && self.tail_fraction <= 1.0) {
            return invalid(format!("tail fraction must lie in (0, 1], got {}", self.tail_fraction));
        }
        if !(self.tol > 0.0) {
            return invalid("tolerance must be positive");
        }
        Ok(())
    }
}

/// A function seen through `x = ln t ↦ ln f(t)`.
pub trait LogProfile {
    /// `ln f` at the grid point with log-abscissa `x`. `t` is the same point
    /// computed as `t0·2^{±j}` (possibly `0` or `∞` after under/overflow);
    /// implementations holding breakpoints in linear scale should prefer it.
    fn ln_at(&self, x: f64, t: f64) -> f64;

    /// Range of `x` where the profile reflects actual data.
    fn domain(&self) -> (f64, f64) {
        (f64::NEG_INFINITY, f64::INFINITY)
    }

    /// Log-abscissae of the jumps inside `[lo, hi]`, when known. Required
    /// for grids too long to evaluate point by point.
    fn ln_breaks(&self, _lo: f64, _hi: f64) -> Option<Vec<f64>> {
        None
    }

    /// The profile is exactly bounded near `t = 0` (not merely sampled so).
    fn bounded_near_zero(&self) -> bool {
        false
    }
}

impl LogProfile for LogStep {
    fn ln_at(&self, x: f64, _t: f64) -> f64 {
        self.ln_eval(x)
    }

    fn bounded_near_zero(&self) -> bool {
        self.ys()[0].is_finite() && LogStep::domain(self).0 == f64::NEG_INFINITY
    }

    fn domain(&self) -> (f64, f64) {
        LogStep::domain(self)
    }

    fn ln_breaks(&self, lo: f64, hi: f64) -> Option<Vec<f64>> {
        let xs = self.xs();
        let a = xs.partition_point(|&b| b < lo);
        let b = xs.partition_point(|&b| b <= hi);
        let mut v = xs[a..b].to_vec();
        if let Some(e) = self.x_end() {
            if e >= lo && e <= hi {
                v.push(e);
            }
        }
        Some(v)
    }
}

impl<T: Scalar> LogProfile for StepFunction<T> {
    fn ln_at(&self, x: f64, t: f64) -> f64 {
        let t = if t > 0.0 && t.is_finite() { t } else { x.exp() };
        self.eval(T::of(t)).as_f64().ln()
    }

    fn bounded_near_zero(&self) -> bool {
        self.values()[0].is_finite()
    }

    fn domain(&self) -> (f64, f64) {
        let hi = match (self.support_end(), self.breakpoints().last()) {
            (None, Some(b)) => b.as_f64().ln(),
            _ => f64::INFINITY,
        };
        let lo = if self.values()[0].is_infinite() {
            self.breakpoints().first().map_or(f64::NEG_INFINITY, |b| b.as_f64().ln())
        } else {
            f64::NEG_INFINITY
        };
        (lo, hi)
    }

    fn ln_breaks(&self, lo: f64, hi: f64) -> Option<Vec<f64>> {
        let mut v: Vec<f64> = self
            .breakpoints()
            .iter()
            .map(|b| b.as_f64().ln())
            .filter(|&x| x >= lo && x <= hi)
            .collect();
        if let Some(e) = self.support_end() {
            let e = e.as_f64().ln();
            if e >= lo && e <= hi {
                v.push(e);
            }
        }
        Some(v)
    }
}

/// One grid sample. `t` is `e^{ln_t}` and may be `0`/`∞` when out of range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowRatio {
    pub j: u64,
    #[serde(with = "ext")]
    pub t: f64,
    pub ln_t: f64,
    #[serde(with = "ext")]
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderEstimate {
    pub end: End,
    pub extremum: Extremum,
    #[serde(with = "ext")]
    pub value: f64,
    pub window_ratios: Vec<WindowRatio>,
    pub tail_fraction: f64,
    /// Last-quarter spread of the running extremum.
    #[serde(with = "ext")]
    pub spread: f64,
    /// Last-quarter range `max r − min r` of the ratios themselves; small
    /// only when the ratios have a limit.
    #[serde(with = "ext")]
    pub ratio_spread: f64,
    pub converged: bool,
    /// Number of grid points inside the data domain.
    pub grid_points: u64,
    pub anchored: bool,
    /// Ratios were inverted (distribution-side estimate).
    pub reciprocal: bool,
}

impl OrderEstimate {
    /// Ratios with index in the tail window.
    pub fn tail(&self) -> impl Iterator<Item = &WindowRatio> {
        let start = tail_start(self.grid_points, self.tail_fraction);
        self.window_ratios.iter().filter(move |w| w.j >= start)
    }
}

pub(crate) fn tail_start(n: u64, frac: f64) -> u64 {
    let k = ((n as f64) * frac).floor() as u64;
    (n + 1).saturating_sub(k.max(1)).max(1)
}

struct Grid {
    x0: f64,
    step: f64,
    t0: f64,
    n: u64,
}

impl Grid {
    fn point(&self, j: u64) -> (f64, f64) {
        let t = if j <= 4096 { self.t0 * 2f64.powi(if self.step > 0.0 { j as i32 } else { -(j as i32) }) } else if self.step > 0.0 { f64::INFINITY } else { 0.0 };
        let x = if t > 0.0 && t.is_finite() { t.ln() } else { self.x0 + j as f64 * self.step };
        (x, t)
    }
}

fn layout<P: LogProfile + ?Sized>(p: &P, end: End, spec: &GridSpec) -> Result<Grid> {
    spec.validate()?;
    let x0 = spec.t0.ln();
    let step = match end {
        End::Infinity => LN_2,
        End::Zero => -LN_2,
    };
    let (lo, hi) = p.domain();
    let room = match end {
        End::Infinity => hi - x0,
        End::Zero => x0 - lo,
    };
    let mut n = spec.count;
    if room.is_finite() {
        let fit = (room / LN_2 + 1e-9).floor();
        let fit = if fit < 0.0 { 0 } else { fit.min(u64::MAX as f64 / 2.0) as u64 };
        n = n.min(fit);
    }
    // Too little data inside the domain: fall back to the stored function as
    // an exact object on the full grid.
    if n < 2 {
        n = spec.count;
    }
    Ok(Grid { x0, step, t0: spec.t0, n })
}

fn indices<P: LogProfile + ?Sized>(p: &P, g: &Grid, spec: &GridSpec, limit: u64) -> Result<Vec<u64>> {
    if g.n <= limit {
        return Ok((1..=g.n).collect());
    }
    let (a, b) = (g.x0, g.x0 + g.n as f64 * g.step);
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    let breaks = p.ln_breaks(lo, hi).ok_or_else(|| {
        Error::Resource(format!("grid of {} points needs plateau information to be evaluated", g.n))
    })?;
    if breaks.len() as u64 > DENSE_LIMIT {
        return Err(Error::Resource(format!("{} plateaus inside the grid", breaks.len())));
    }
    let mut js = vec![1, g.n, tail_start(g.n, spec.tail_fraction), tail_start(g.n, 0.25)];
    for bx in breaks {
        let u = (bx - g.x0) / g.step;
        let f = u.floor();
        for d in [-1.0, 0.0, 1.0, 2.0] {
            let j = f + d;
            if j >= 1.0 && j <= g.n as f64 {
                js.push(j as u64);
            }
        }
    }
    js.sort_unstable();
    js.dedup();
    Ok(js)
}

fn ratios<P: LogProfile + ?Sized>(p: &P, end: End, spec: &GridSpec) -> Result<(Vec<WindowRatio>, u64)> {
    ratios_limited(p, end, spec, DENSE_LIMIT)
}

fn ratios_limited<P: LogProfile + ?Sized>(
    p: &P,
    end: End,
    spec: &GridSpec,
    limit: u64,
) -> Result<(Vec<WindowRatio>, u64)> {
    let g = layout(p, end, spec)?;
    let ya = p.ln_at(g.x0, spec.t0);
    if ya == f64::INFINITY {
        return invalid(format!("function is +inf at the grid origin t0 = {}", spec.t0));
    }
    let (xa, ya) = if spec.anchored && ya.is_finite() { (g.x0, ya) } else { (0.0, 0.0) };
    let js = indices(p, &g, spec, limit)?;
    let mut out = Vec::with_capacity(js.len());
    for j in js {
        let (x, t) = g.point(j);
        let y = p.ln_at(x, t);
        let den = xa - x;
        let r = if y == f64::NEG_INFINITY {
            // Exact zero: faster than any power toward ∞.
            f64::INFINITY
        } else if y == f64::INFINITY {
            f64::INFINITY
        } else if den == 0.0 {
            continue;
        } else {
            let r = (y - ya) / den;
            if r == 0.0 { 0.0 } else { r }
        };
        out.push(WindowRatio { j, t, ln_t: x, ratio: r });
    }
    Ok((out, g.n))
}

fn summarize(
    end: End,
    extremum: Extremum,
    window_ratios: Vec<WindowRatio>,
    n: u64,
    spec: &GridSpec,
    reciprocal: bool,
) -> Result<OrderEstimate> {
    let ts = tail_start(n, spec.tail_fraction);
    let qs = tail_start(n, 0.25).max(ts);
    let better = |a: f64, b: f64| match extremum {
        Extremum::Liminf => a < b,
        Extremum::Limsup => a > b,
    };
    let mut run: Option<f64> = None;
    let mut before_q: Option<f64> = None;
    let mut q_first: Option<f64> = None;
    let (mut rmin, mut rmax) = (f64::INFINITY, f64::NEG_INFINITY);
    for w in window_ratios.iter().filter(|w| w.j >= ts && !w.ratio.is_nan()) {
        run = Some(match run {
            Some(r) if !better(w.ratio, r) => r,
            _ => w.ratio,
        });
        if w.j < qs {
            before_q = run;
        } else {
            if q_first.is_none() {
                q_first = run;
            }
            rmin = rmin.min(w.ratio);
            rmax = rmax.max(w.ratio);
        }
    }
    let value = run.ok_or_else(|| Error::Indeterminate("no grid ratio inside the tail window".into()))?;
    let reference = before_q.or(q_first).unwrap_or(value);
    let spread = if reference == value { 0.0 } else { (reference - value).abs() };
    let ratio_spread = if rmax >= rmin {
        if rmax == rmin { 0.0 } else { rmax - rmin }
    } else {
        0.0
    };
    let converged = spread < spec.tol;
    Ok(OrderEstimate {
        end,
        extremum,
        value,
        window_ratios,
        tail_fraction: spec.tail_fraction,
        spread,
        ratio_spread,
        converged,
        grid_points: n,
        anchored: spec.anchored,
        reciprocal,
    })
}

/// Running liminf/limsup of the grid ratios of `p` toward `end`.
pub fn ratio_extremum<P: LogProfile + ?Sized>(
    p: &P,
    end: End,
    extremum: Extremum,
    grid: &GridSpec,
) -> Result<OrderEstimate> {
    let (w, n) = ratios(p, end, grid)?;
    summarize(end, extremum, w, n, grid, false)
}

/// `liminf_{t→∞} ln μ(t)/ln(1/t)`; `+∞` for eventually vanishing `μ`, `0`
/// for `μ` bounded below.
pub fn order_at_infinity<P: LogProfile + ?Sized>(mu: &P, grid: &GridSpec) -> Result<OrderEstimate> {
    ratio_extremum(mu, End::Infinity, Extremum::Liminf, grid)
}

/// `liminf_{t→0} ln μ(t)/ln(1/t)`; `0` for `μ` bounded near 0.
pub fn order_at_zero<P: LogProfile + ?Sized>(mu: &P, grid: &GridSpec) -> Result<OrderEstimate> {
    let mut e = ratio_extremum(mu, End::Zero, Extremum::Liminf, grid)?;
    if mu.bounded_near_zero() {
        // The finite-grid ratio of a bounded function is O(1/J), not 0.
        e.value = 0.0;
        e.spread = 0.0;
        e.converged = true;
    }
    Ok(e)
}

/// Order of `μ` at `end` read off its distribution function `λ`: the
/// reciprocal of `limsup ln λ(s)/ln(1/s)` as `s → 0` (order at ∞) or
/// `s → ∞` (order at 0). The grid applies to `s`.
///
/// Window ratios are stored inverted, so the value is still their running
/// minimum. A `λ` vanishing near the relevant level end yields `+∞` at ∞ and
/// `0` at 0.
pub fn order_via_distribution<P: LogProfile + ?Sized>(
    lambda: &P,
    end: End,
    grid: &GridSpec,
) -> Result<OrderEstimate> {
    let side = match end {
        End::Infinity => End::Zero,
        End::Zero => End::Infinity,
    };
    let (mut w, n) = ratios(lambda, side, grid)?;
    for r in &mut w {
        r.ratio = recip(r.ratio);
    }
    summarize(end, Extremum::Liminf, w, n, grid, true)
}

fn recip(r: f64) -> f64 {
    if r == 0.0 {
        f64::INFINITY
    } else if r.is_infinite() {
        0.0
    } else {
        1.0 / r
    }
}

/// `μ^α`, same breakpoints.
pub fn power_scale<T: Scalar>(mu: &StepFunction<T>, alpha: T) -> Result<StepFunction<T>> {
    mu.power_scale(alpha)
}
