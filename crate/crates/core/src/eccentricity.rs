//! Doubling ratios `S(2t)/S(t)` of integrated step functions.
//!
//! Near each end the integral `S` is taken over the part of the reference
//! interval `(0, c)` (default `c = 1`) that keeps it finite:
//!
//! | end | integrable | `S(t)`            |
//! |-----|------------|-------------------|
//! | 0   | no         | `∫_t^c μ`         |
//! | 0   | yes        | `∫_0^t μ`         |
//! | ∞   | no         | `∫_c^t μ`         |
//! | ∞   | yes        | `∫_t^∞ μ`         |
//!
//! `μ` is eccentric at that end when 1 is a cluster point of the ratios. On
//! finite data "cluster point" means: some ratio within `tol` of 1 in the
//! final quarter of the grid.
//!
//! Sampled data stops somewhere. Toward ∞ the positive last plateau of a
//! step function is read as the data horizon, not as a constant tail, and
//! tail integrals run up to it; toward 0 an infinite head value marks the
//! first breakpoint as the horizon.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::io::ext;
use crate::orders::{End, GridSpec};
use crate::scalar::Scalar;
use crate::stepfn::StepFunction;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Integrability {
    Summable,
    NonSummable,
}

impl std::str::FromStr for Integrability {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "summable" | "yes" | "true" => Ok(Self::Summable),
            "nonsummable" | "non-summable" | "no" | "false" => Ok(Self::NonSummable),
            _ => invalid(format!("unknown integrability `{s}`")),
        }
    }
}

/// Relative growth of the partial integrals over the last two doublings
/// below which they count as convergent.
pub const CAUCHY_TOL: f64 = 1e-3;
/// Doublings of data the integrability heuristic needs.
pub const MIN_DOUBLINGS: u32 = 8;
/// Summable-branch abort threshold on `S` relative to its first grid value.
pub const GROWTH_GUARD: f64 = 1e6;
pub const DEFAULT_TOL: f64 = 0.05;
pub const DEFAULT_POINTS: u64 = 40;

fn lower_horizon<T: Scalar>(mu: &StepFunction<T>) -> f64 {
    if mu.values()[0].is_infinite() {
        mu.breakpoints()[0].as_f64()
    } else {
        0.0
    }
}

fn upper_horizon<T: Scalar>(mu: &StepFunction<T>) -> f64 {
    match (mu.support_end(), mu.breakpoints().last()) {
        (Some(e), _) => e.as_f64(),
        (None, Some(b)) if mu.tail_value() > T::zero() => b.as_f64(),
        _ => f64::INFINITY,
    }
}

fn integral<T: Scalar>(mu: &StepFunction<T>, a: f64, b: f64) -> Result<f64> {
    if b <= a {
        return Ok(0.0);
    }
    let b = if b.is_infinite() { T::infinity() } else { T::of(b) };
    Ok(mu.integrate(T::of(a), b)?.as_f64())
}

/// Decides the branch at `end`, or takes `force` as given.
///
/// Functions that are exactly bounded near 0, or exactly zero past a support
/// end, are summable there without any heuristic; a constant is not summable
/// at ∞. Otherwise the partial integrals toward the end must grow by less
/// than [`CAUCHY_TOL`] (relative) over the last two doublings of data.
pub fn classify_integrability<T: Scalar>(
    mu: &StepFunction<T>,
    end: End,
    reference: f64,
    force: Option<Integrability>,
) -> Result<Integrability> {
    if let Some(f) = force {
        return Ok(f);
    }
    if !(reference > 0.0) || !reference.is_finite() {
        return invalid("reference point must be positive");
    }
    match end {
        End::Infinity => {
            if mu.is_zero() || mu.support_end().is_some() {
                return Ok(Integrability::Summable);
            }
            if mu.breakpoints().is_empty() {
                return Ok(Integrability::NonSummable);
            }
            let h = upper_horizon(mu);
            let k = (h / reference).log2().floor();
            if !(k >= MIN_DOUBLINGS as f64) {
                return Err(Error::Indeterminate(format!(
                    "only {:.1} doublings of data toward infinity; pass an explicit integrability",
                    (h / reference).log2()
                )));
            }
            let top = reference * k.exp2();
            let i_top = integral(mu, reference, top)?;
            let i_prev = integral(mu, reference, top / 4.0)?;
            verdict(i_top, i_prev)
        }
        End::Zero => {
            if mu.values()[0].is_finite() {
                return Ok(Integrability::Summable);
            }
            let l = lower_horizon(mu);
            let k = (reference / l).log2().floor();
            if !(k >= MIN_DOUBLINGS as f64) {
                return Err(Error::Indeterminate(format!(
                    "only {:.1} doublings of data toward zero; pass an explicit integrability",
                    (reference / l).log2()
                )));
            }
            let bottom = reference * (-k).exp2();
            let i_bot = integral(mu, bottom, reference)?;
            let i_prev = integral(mu, bottom * 4.0, reference)?;
            verdict(i_bot, i_prev)
        }
    }
}

fn verdict(full: f64, partial: f64) -> Result<Integrability> {
    if full.is_infinite() {
        return Ok(Integrability::NonSummable);
    }
    if full == 0.0 {
        return Ok(Integrability::Summable);
    }
    if (full - partial) / full < CAUCHY_TOL {
        Ok(Integrability::Summable)
    } else {
        Ok(Integrability::NonSummable)
    }
}

/// `S⁰(t)` for `0 < t < reference`.
pub fn s_zero<T: Scalar>(mu: &StepFunction<T>, t: f64, branch: Integrability, reference: f64) -> Result<f64> {
    if !(t > 0.0 && t < reference) {
        return invalid(format!("S at 0 needs 0 < t < {reference}, got {t}"));
    }
    match branch {
        Integrability::NonSummable => integral(mu, t, reference),
        Integrability::Summable => {
            let v = integral(mu, lower_horizon(mu), t)?;
            if v.is_infinite() {
                return Err(Error::Contradiction(format!("integral over (0, {t}) diverges in the summable branch")));
            }
            Ok(v)
        }
    }
}

/// `S∞(t)` for `t ≥ reference`.
pub fn s_infinity<T: Scalar>(mu: &StepFunction<T>, t: f64, branch: Integrability, reference: f64) -> Result<f64> {
    if !(t >= reference) || !t.is_finite() {
        return invalid(format!("S at infinity needs {reference} <= t < inf, got {t}"));
    }
    match branch {
        Integrability::NonSummable => integral(mu, reference, t),
        Integrability::Summable => {
            let v = integral(mu, t, upper_horizon(mu))?;
            if v.is_infinite() {
                return Err(Error::Contradiction(format!("integral over ({t}, inf) diverges in the summable branch")));
            }
            Ok(v)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DoublingPoint {
    pub t: f64,
    #[serde(rename = "S", with = "ext")]
    pub s: f64,
    #[serde(with = "ext")]
    pub ratio: f64,
    pub witness: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DoublingProfile {
    pub end: End,
    pub integrable: bool,
    pub reference: f64,
    pub tol: f64,
    pub grid: Vec<DoublingPoint>,
    pub witnesses: Vec<DoublingPoint>,
    /// Grid points dropped because `S(t)` was 0 or infinite.
    pub skipped: Vec<f64>,
    pub cluster_at_one: bool,
}

impl DoublingProfile {
    /// Witnesses among the last `k` grid points.
    pub fn witnesses_in_last(&self, k: usize) -> usize {
        let n = self.grid.len();
        self.grid[n.saturating_sub(k)..].iter().filter(|p| p.witness).count()
    }
}

/// 40 dyadic points toward `end`, ending where the data still determines
/// `S`: at the horizon for the non-summable branches, and at the geometric
/// middle between the reference point and the horizon for truncated tail
/// integrals (near a truncation point every tail looks logarithmic).
pub fn default_grid<T: Scalar>(
    mu: &StepFunction<T>,
    end: End,
    branch: Integrability,
    reference: f64,
) -> Result<GridSpec> {
    let n = DEFAULT_POINTS;
    let spec = |first: f64, count: u64| GridSpec { t0: first, count: count.max(2), ..GridSpec::default() };
    match end {
        End::Infinity => {
            let h = upper_horizon(mu);
            let last = if h.is_infinite() {
                reference * 2f64.powi(n as i32)
            } else if branch == Integrability::Summable && mu.support_end().is_none() {
                (reference * h).sqrt()
            } else {
                h / 2.0
            };
            let room = (last / (2.0 * reference)).log2().floor().max(1.0) as u64;
            let count = room.min(n - 1) + 1;
            Ok(spec(last / 2f64.powi(count as i32 - 1), count))
        }
        End::Zero => {
            let l = lower_horizon(mu);
            let last = if l == 0.0 {
                mu.breakpoints().first().map_or(reference, |b| b.as_f64()).min(reference) / 2f64.powi(n as i32)
            } else if branch == Integrability::Summable {
                (reference * l).sqrt()
            } else {
                l
            };
            let room = (reference / 4.0 / last).log2().floor().max(1.0) as u64;
            let count = room.min(n - 1) + 1;
            Ok(spec(last * 2f64.powi(count as i32 - 1), count))
        }
    }
}

/// Ratios `S(2t_j)/S(t_j)` on `t_j = t0·2^{±j}`, `j = 0..count` (toward
/// `end`), with witnesses `|ratio − 1| ≤ tol`.
pub fn doubling_profile<T: Scalar>(
    mu: &StepFunction<T>,
    end: End,
    branch: Integrability,
    grid: &GridSpec,
    tol: f64,
    reference: f64,
) -> Result<DoublingProfile> {
    grid.validate()?;
    if !(tol > 0.0) {
        return invalid("tolerance must be positive");
    }
    let s = |t: f64| match end {
        End::Zero => s_zero(mu, t, branch, reference),
        End::Infinity => s_infinity(mu, t, branch, reference),
    };
    let n = grid.count;
    let mut pts = Vec::with_capacity(n as usize);
    let mut skipped = Vec::new();
    let mut first_s: Option<f64> = None;
    for j in 0..n {
        let t = match end {
            End::Infinity => grid.t0 * 2f64.powi(j as i32),
            End::Zero => grid.t0 * 2f64.powi(-(j as i32)),
        };
        let (st, s2) = (s(t)?, s(2.0 * t)?);
        if st == 0.0 || st.is_infinite() || s2.is_infinite() {
            skipped.push(t);
            continue;
        }
        if branch == Integrability::Summable {
            let f = *first_s.get_or_insert(st);
            if st > GROWTH_GUARD * f {
                return Err(Error::Contradiction(format!(
                    "S grew from {f:e} to {st:e} in the summable branch; integrability misclassified"
                )));
            }
        }
        let ratio = s2 / st;
        pts.push(DoublingPoint { t, s: st, ratio, witness: (ratio - 1.0).abs() <= tol });
    }
    check_coherence(&pts, end, branch)?;
    let q = (n - n / 4) as usize;
    let cluster = pts.iter().any(|p| p.witness && grid_index(p.t, grid, end) >= q);
    let witnesses = pts.iter().copied().filter(|p| p.witness).collect();
    Ok(DoublingProfile {
        end,
        integrable: branch == Integrability::Summable,
        reference,
        tol,
        grid: pts,
        witnesses,
        skipped,
        cluster_at_one: cluster,
    })
}

fn grid_index(t: f64, grid: &GridSpec, end: End) -> usize {
    let k = (t / grid.t0).log2().round();
    match end {
        End::Infinity => k as usize,
        End::Zero => (-k) as usize,
    }
}

/// S moves monotonically along the grid, in the direction fixed by the
/// branch; ratios sit on the matching side of 1.
fn check_coherence(pts: &[DoublingPoint], end: End, branch: Integrability) -> Result<()> {
    // Toward the end, S grows for (∞, non-summable) and (0, non-summable).
    let grows = branch == Integrability::NonSummable;
    // The ratio compares S at 2t, which is one step back toward 0 / forward toward ∞.
    let ratio_ge_one = matches!((end, branch), (End::Infinity, Integrability::NonSummable) | (End::Zero, Integrability::Summable));
    let slack = 1e-12;
    for w in pts.windows(2) {
        let (a, b) = (w[0].s, w[1].s);
        let bad = if grows { b < a * (1.0 - slack) } else { b > a * (1.0 + slack) };
        if bad {
            return Err(Error::InvariantViolation(format!(
                "S not monotone along the grid between t = {} and t = {}",
                w[0].t, w[1].t
            )));
        }
    }
    for p in pts {
        let bad = if ratio_ge_one { p.ratio < 1.0 - slack } else { p.ratio > 1.0 + slack };
        if bad {
            return Err(Error::InvariantViolation(format!("ratio {} at t = {} on the wrong side of 1", p.ratio, p.t)));
        }
    }
    Ok(())
}

/// Classifies, lays out the default grid, and reports whether 1 is a
/// cluster point of the doubling ratios at `end`.
pub fn eccentric_verdict<T: Scalar>(
    mu: &StepFunction<T>,
    end: End,
    force: Option<Integrability>,
) -> Result<(bool, DoublingProfile)> {
    let branch = classify_integrability(mu, end, 1.0, force)?;
    let grid = default_grid(mu, end, branch, 1.0)?;
    let p = doubling_profile(mu, end, branch, &grid, DEFAULT_TOL, 1.0)?;
    Ok((p.cluster_at_one, p))
}

/// CSV `t,S,ratio,witness`.
pub fn write_profile_csv<W: std::io::Write>(p: &DoublingProfile, w: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    let err = |e: csv::Error| Error::InvalidInput(e.to_string());
    wtr.write_record(["t", "S", "ratio", "witness"]).map_err(err)?;
    for q in &p.grid {
        wtr.write_record([q.t.to_string(), q.s.to_string(), q.ratio.to_string(), q.witness.to_string()])
            .map_err(err)?;
    }
    wtr.flush()?;
    Ok(())
}

/// `μ` sampled with `per_doubling` breakpoints per doubling on
/// `[2^lo, 2^hi]`, each plateau carrying `f` at its geometric midpoint.
/// Below `2^lo` the value is `head`.
pub fn sample_geometric(lo: i32, hi: i32, per_doubling: u32, head: f64, f: impl Fn(f64) -> f64) -> Result<StepFunction<f64>> {
    if hi <= lo || per_doubling == 0 {
        return invalid("empty sampling range");
    }
    let m = ((hi - lo) as u32 * per_doubling) as usize;
    let step = 1.0 / per_doubling as f64;
    let bp: Vec<f64> = (0..=m).map(|i| (lo as f64 + i as f64 * step).exp2()).collect();
    let mut values = Vec::with_capacity(m + 2);
    values.push(head);
    for i in 0..=m {
        let mid = (lo as f64 + (i as f64 + 0.5) * step).exp2();
        values.push(f(mid));
    }
    StepFunction::new(bp, values, None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inv_at_inf() -> StepFunction<f64> {
        sample_geometric(0, 900, 16, 1.0, |t| 1.0 / t).unwrap()
    }

    #[test]
    fn integrability_at_infinity() {
        let inv2 = sample_geometric(0, 60, 16, 1.0, |t| t.powi(-2)).unwrap();
        assert_eq!(classify_integrability(&inv2, End::Infinity, 1.0, None).unwrap(), Integrability::Summable);
        let inv = sample_geometric(0, 60, 16, 1.0, |t| 1.0 / t).unwrap();
        assert_eq!(classify_integrability(&inv, End::Infinity, 1.0, None).unwrap(), Integrability::NonSummable);
        let short = sample_geometric(0, 5, 16, 1.0, |t| 1.0 / t).unwrap();
        assert!(matches!(classify_integrability(&short, End::Infinity, 1.0, None), Err(Error::Indeterminate(_))));
        assert_eq!(
            classify_integrability(&short, End::Infinity, 1.0, Some(Integrability::Summable)).unwrap(),
            Integrability::Summable
        );
    }

    #[test]
    fn s_values() {
        let one = StepFunction::constant(1.0, None).unwrap();
        assert_eq!(s_zero(&one, 0.25, Integrability::Summable, 1.0).unwrap(), 0.25);

        let inv0 = sample_geometric(-60, 0, 64, f64::INFINITY, |t| 1.0 / t).unwrap();
        let v = s_zero(&inv0, 0.25, Integrability::NonSummable, 1.0).unwrap();
        assert!((v - 4f64.ln()).abs() < 1e-3, "{v}");

        let sq = sample_geometric(-60, 0, 64, f64::INFINITY, |t| t.powf(-0.5)).unwrap();
        let v = s_zero(&sq, 0.25, Integrability::Summable, 1.0).unwrap();
        assert!((v - 1.0).abs() < 1e-3, "{v}");

        let inv = sample_geometric(0, 60, 64, 1.0, |t| 1.0 / t).unwrap();
        let v = s_infinity(&inv, 4.0, Integrability::NonSummable, 1.0).unwrap();
        assert!((v - 4f64.ln()).abs() < 1e-3, "{v}");
        let inv2 = sample_geometric(0, 60, 64, 1.0, |t| t.powi(-2)).unwrap();
        let v = s_infinity(&inv2, 2.0, Integrability::Summable, 1.0).unwrap();
        assert!((v - 0.5).abs() < 1e-3, "{v}");

        let cut = StepFunction::constant(3.0, Some(5.0)).unwrap();
        assert_eq!(s_infinity(&cut, 6.0, Integrability::Summable, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn harmonic_tail_clusters() {
        let (ecc, p) = eccentric_verdict(&inv_at_inf(), End::Infinity, None).unwrap();
        assert!(ecc);
        assert!(!p.integrable);
        assert_eq!(p.witnesses_in_last(10), 10);
        for q in &p.grid {
            let exact = (2.0 * q.t).ln() / q.t.ln();
            assert!((q.ratio - exact).abs() < 1e-2, "{} vs {exact}", q.ratio);
        }
    }

    #[test]
    fn inverse_square_halves() {
        let mu = sample_geometric(0, 80, 16, 1.0, |t| t.powi(-2)).unwrap();
        let (ecc, p) = eccentric_verdict(&mu, End::Infinity, None).unwrap();
        assert!(!ecc);
        for q in &p.grid {
            assert!((q.ratio - 0.5).abs() < 0.01, "{}", q.ratio);
        }
    }

    #[test]
    fn scale_covariance() {
        let mu = inv_at_inf();
        let (_, a) = eccentric_verdict(&mu, End::Infinity, None).unwrap();
        let (_, b) = eccentric_verdict(&mu.scale(8.0).unwrap(), End::Infinity, None).unwrap();
        for (x, y) in a.grid.iter().zip(&b.grid) {
            assert_eq!(x.ratio, y.ratio);
        }
    }

    #[test]
    fn inverse_square_at_zero_is_not_claimed() {
        let mu = sample_geometric(-200, 0, 16, f64::INFINITY, |t| t.powi(-2)).unwrap();
        let (ecc, p) = eccentric_verdict(&mu, End::Zero, None).unwrap();
        assert!(!ecc);
        assert!(!p.integrable);
    }
}
