//! Heat traces, lattice walks, finite kernels and spectral counting.
//!
//! The semigroup side is discrete: the lazy simple random walk on `ℤᵈ`
//! (hold with probability `l`, else step `±1` along one axis per coordinate
//! walk) plays the heat semigroup, the step count plays time, and
//! `p_t(0,0) = p_t^{(1)}(0,0)^d` is the per-site trace. Its decay exponent is
//! the asymptotic dimension
//!
//! ```text
//! d∞ = liminf_{t→∞} 2·ln ‖T_t‖_{1→∞} / ln(1/t).
//! ```

use std::io::{Read, Write};

use nalgebra::{DMatrix, RealField};
use num_traits::{Num, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::io::{ext, read_pairs};
use crate::orders::{order_at_infinity, order_via_distribution, ratio_extremum, End, Extremum, GridSpec, LogProfile, OrderEstimate};
use crate::scalar::Scalar;

/// Largest walk length the 1-D convolution buffer accepts.
pub const MAX_WALK: u64 = 1 << 15;
/// Time from which heat-trace ratios are anchored.
pub const ASDIM_ANCHOR: f64 = 16.0;
/// Dyadic doublings a trace must span for `asdim`.
pub const MIN_DOUBLINGS: f64 = 8.0;

/// Samples of `θ(t) − b`, `t ≥ 1` increasing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeatTrace {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub betti: f64,
}

impl HeatTrace {
    pub fn new(times: Vec<f64>, values: Vec<f64>, betti: f64) -> Result<Self> {
        if times.len() != values.len() {
            return invalid("times and values differ in length");
        }
        if times.len() < 2 {
            return invalid("a heat trace needs at least two samples");
        }
        if !(betti >= 0.0) {
            return invalid("the subtracted constant must be nonnegative");
        }
        for (i, (&t, &v)) in times.iter().zip(&values).enumerate() {
            if !(t > 0.0 && t.is_finite()) || (i > 0 && t <= times[i - 1]) {
                return invalid(format!("sample {}: times must be positive and increasing", i + 1));
            }
            if !(v > 0.0 && v.is_finite()) {
                return invalid(format!("sample {}: trace values must be positive, got {v}", i + 1));
            }
        }
        Ok(Self { times, values, betti })
    }

    /// Samples `f` at `t0·2^j`, `j = 0..=doublings`.
    pub fn dyadic(t0: f64, doublings: u32, betti: f64, f: impl Fn(f64) -> f64) -> Result<Self> {
        let times: Vec<f64> = (0..=doublings).map(|j| t0 * 2f64.powi(j as i32)).collect();
        let values = times.iter().map(|&t| f(t)).collect();
        Self::new(times, values, betti)
    }

    /// Non-increasing up to relative rounding.
    pub fn is_non_increasing(&self) -> bool {
        self.values.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12))
    }

    /// The samples with `t ≥ t0`.
    pub fn restrict(&self, t0: f64) -> Result<Self> {
        let i = self.times.partition_point(|&t| t < t0);
        Self::new(self.times[i..].to_vec(), self.values[i..].to_vec(), self.betti)
    }

    pub fn doublings(&self) -> f64 {
        (self.times[self.times.len() - 1] / self.times[0]).log2()
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["t", "theta_minus_b"]).map_err(csv_err)?;
        for (t, v) in self.times.iter().zip(&self.values) {
            wr.write_record([format!("{t}"), format!("{v:e}")]).map_err(csv_err)?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R, betti: f64) -> Result<Self> {
        let rows = read_pairs(r, ["t", "theta_minus_b"])?;
        let (t, v) = rows.into_iter().unzip();
        Self::new(t, v, betti)
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

/// Log-log linear interpolation between samples.
impl LogProfile for HeatTrace {
    fn ln_at(&self, x: f64, _t: f64) -> f64 {
        let xs = &self.times;
        let t = x.exp();
        let i = xs.partition_point(|&s| s <= t);
        if i == 0 {
            return self.values[0].ln();
        }
        if i == xs.len() {
            return self.values[i - 1].ln();
        }
        let (x0, x1) = (xs[i - 1].ln(), xs[i].ln());
        let (y0, y1) = (self.values[i - 1].ln(), self.values[i].ln());
        if x == x0 {
            return y0;
        }
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }

    fn domain(&self) -> (f64, f64) {
        (self.times[0].ln() - 1e-12, self.times[self.times.len() - 1].ln() + 1e-12)
    }
}

// ---------------------------------------------------------------------------
// Lattice walks

/// Return probabilities of the lazy walk on `ℤᵈ` at `t = 2^j ≤ t_max`
/// (plus `t = 0`), exact in `T`.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkTrace<T> {
    pub d: u32,
    pub times: Vec<u64>,
    /// `p_t^{(1)}(0,0)`.
    pub one_dim: Vec<T>,
    /// `p_t^{(d)}(0,0)`.
    pub values: Vec<T>,
}

/// Lazy walk return probabilities by iterated convolution on `[−t, t]`.
///
/// `check` receives every 1-D state (for conservation checks on floats).
pub fn lattice_walk<T: Num + Clone>(
    d: u32,
    t_max: u64,
    laziness: T,
    mut check: impl FnMut(u64, &[T]) -> Result<()>,
) -> Result<WalkTrace<T>> {
    if !(1..=4).contains(&d) {
        return invalid(format!("lattice dimension must be 1..=4, got {d}"));
    }
    if t_max == 0 {
        return invalid("t_max must be at least 1");
    }
    if t_max > MAX_WALK {
        return Err(Error::Resource(format!("t_max = {t_max} exceeds the convolution buffer ({MAX_WALK})")));
    }
    let two = T::one() + T::one();
    let hold = laziness.clone();
    let step = (T::one() - laziness) / two;
    let size = 2 * t_max as usize + 3;
    let c = t_max as usize + 1;
    let mut p = vec![T::zero(); size];
    let mut q = vec![T::zero(); size];
    p[c] = T::one();
    let (mut times, mut one_dim) = (vec![0], vec![T::one()]);
    let mut next = 1u64;
    for t in 1..=t_max {
        let r = t as usize;
        for x in c - r..=c + r {
            q[x] = hold.clone() * p[x].clone() + step.clone() * (p[x - 1].clone() + p[x + 1].clone());
        }
        std::mem::swap(&mut p, &mut q);
        check(t, &p[c - r..=c + r])?;
        if t == next {
            times.push(t);
            one_dim.push(p[c].clone());
            next *= 2;
        }
    }
    let values = one_dim
        .iter()
        .map(|v| (1..d).fold(v.clone(), |acc, _| acc * v.clone()))
        .collect();
    Ok(WalkTrace { d, times, one_dim, values })
}

/// `p_t(0,0)` on `ℤᵈ` in `f64`, checking that every 1-D state sums to 1.
pub fn lattice_return_probability(d: u32, t_max: u64, laziness: f64) -> Result<WalkTrace<f64>> {
    if !(laziness > 0.0 && laziness < 1.0) {
        return invalid(format!("laziness must lie in (0, 1), got {laziness}"));
    }
    lattice_walk(d, t_max, laziness, |t, state| {
        let s: f64 = state.iter().sum();
        if (s - 1.0).abs() > 1e-10 {
            return Err(Error::InvariantViolation(format!("walk mass {s} at step {t}")));
        }
        Ok(())
    })
}

impl<T: ToPrimitive + Clone> WalkTrace<T> {
    /// The trace from `t = 1` on, as floats; `b = 0` on `ℤᵈ`.
    pub fn heat_trace(&self) -> Result<HeatTrace> {
        let times = self.times[1..].iter().map(|&t| t as f64).collect();
        let values = self.values[1..].iter().map(|v| v.to_f64().unwrap_or(f64::NAN)).collect();
        HeatTrace::new(times, values, 0.0)
    }
}

// ---------------------------------------------------------------------------
// Asymptotic dimension

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Asdim {
    #[serde(with = "ext")]
    pub value: f64,
    pub estimate: OrderEstimate,
}

fn trace_grid(trace: &HeatTrace, anchor: f64) -> GridSpec {
    let count = ((trace.times[trace.times.len() - 1] / anchor).log2() + 1e-9).floor().max(0.0) as u64;
    GridSpec { t0: anchor, count, ..GridSpec::default() }
}

/// `2·liminf −ln θ(t)/ln t` over the last half of the dyadic grid anchored at
/// `t = 16`.
pub fn asdim(trace: &HeatTrace) -> Result<Asdim> {
    if trace.doublings() < MIN_DOUBLINGS - 1e-9 {
        return invalid(format!("trace spans {:.1} doublings; at least {MIN_DOUBLINGS} needed", trace.doublings()));
    }
    let anchor = ASDIM_ANCHOR.max(trace.times[0]);
    asdim_from(trace, anchor)
}

/// `asdim` using only `t ≥ t0`, anchored at `t0` (threshold invariance).
pub fn asdim_from(trace: &HeatTrace, t0: f64) -> Result<Asdim> {
    let r = trace.restrict(t0)?;
    let g = trace_grid(&r, t0);
    if g.count < 2 {
        return invalid("fewer than two doublings past the anchor");
    }
    let estimate = order_at_infinity(&r, &g)?;
    Ok(Asdim { value: 2.0 * estimate.value, estimate })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupForm {
    pub value: f64,
    /// Threshold the constant is fixed at.
    pub t0: f64,
    /// Range of the local slopes `−2·Δln θ/Δln t` between consecutive
    /// samples past `t₀`.
    pub spread: f64,
}

/// Largest `n` with `θ(t) ≤ C·t^{−n/2}` for sampled `t ≥ t₀`, `C` fixed by
/// `θ(t₀)`; `t₀` is the start of the `asdim` tail window.
pub fn asdim_sup_form(trace: &HeatTrace) -> Result<SupForm> {
    if trace.doublings() < MIN_DOUBLINGS - 1e-9 {
        return invalid(format!("trace spans {:.1} doublings; at least {MIN_DOUBLINGS} needed", trace.doublings()));
    }
    let anchor = ASDIM_ANCHOR.max(trace.times[0]);
    let g = trace_grid(trace, anchor);
    let t0 = anchor * 2f64.powi(crate::orders::tail_start(g.count, g.tail_fraction) as i32 - 1);
    asdim_sup_form_from(trace, t0)
}

/// The sup form with the constant fixed at the first sample `≥ t0`;
/// bisection over `n ∈ [0, 64]`.
pub fn asdim_sup_form_from(trace: &HeatTrace, t0: f64) -> Result<SupForm> {
    let samples: Vec<(f64, f64)> = trace
        .times
        .iter()
        .zip(&trace.values)
        .filter(|(&t, _)| t >= t0)
        .map(|(&t, &v)| (t.ln(), v.ln()))
        .collect();
    if samples.len() < 2 {
        return invalid("too few samples past the threshold");
    }
    let (x0, y0) = samples[0];
    let feasible = |n: f64| samples[1..].iter().all(|&(x, y)| y <= y0 - n / 2.0 * (x - x0) + 1e-12);
    let ratios = samples.windows(2).map(|w| 2.0 * (w[0].1 - w[1].1) / (w[1].0 - w[0].0));
    let (lo_r, hi_r) = ratios.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), r| (a.min(r), b.max(r)));
    let (mut lo, mut hi) = (0.0, 64.0);
    if feasible(lo) {
        for _ in 0..80 {
            let m = 0.5 * (lo + hi);
            if feasible(m) {
                lo = m;
            } else {
                hi = m;
            }
        }
    }
    Ok(SupForm { value: lo, t0: x0.exp(), spread: hi_r - lo_r })
}

// ---------------------------------------------------------------------------
// Finite kernels

/// Block kernel `k(x, y) ∈ End(V)`, `dim V = block`, over `n` sites.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteKernel<T: Scalar + RealField> {
    matrix: DMatrix<T>,
    block: usize,
    weights: Vec<T>,
    positive: bool,
}

impl<T: Scalar + RealField> FiniteKernel<T> {
    /// `rows` is the full `(n·block)²` array; counting measure.
    pub fn new(rows: Vec<Vec<T>>, block: usize) -> Result<Self> {
        let m = rows.len();
        if m == 0 || block == 0 || !m.is_multiple_of(block) {
            return invalid(format!("kernel of size {m} does not split into blocks of {block}"));
        }
        if rows.iter().any(|r| r.len() != m) {
            return invalid("kernel matrix must be square");
        }
        if rows.iter().flatten().any(|v| !Float::is_finite(*v)) {
            return invalid("kernel entries must be finite");
        }
        let matrix = DMatrix::from_fn(m, m, |i, j| rows[i][j]);
        Ok(Self { matrix, block, weights: vec![T::one(); m / block], positive: false })
    }

    pub fn from_matrix(matrix: DMatrix<T>, block: usize) -> Result<Self> {
        let rows = (0..matrix.nrows()).map(|i| matrix.row(i).iter().copied().collect()).collect();
        Self::new(rows, block)
    }

    /// Site weights of the measure. The `L¹ → L∞` norm does not depend on
    /// them (atoms are positive), they are validated and kept for output.
    pub fn with_weights(mut self, weights: Vec<T>) -> Result<Self> {
        if weights.len() != self.sites() || weights.iter().any(|&w| !(w > T::zero())) {
            return invalid("weights must be positive, one per site");
        }
        self.weights = weights;
        Ok(self)
    }

    /// Declares the kernel positive; checked by `one_inf_norm`.
    pub fn flagged_positive(mut self, on: bool) -> Self {
        self.positive = on;
        self
    }

    pub fn sites(&self) -> usize {
        self.matrix.nrows() / self.block
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    fn block_at(&self, i: usize, j: usize) -> DMatrix<T> {
        let b = self.block;
        self.matrix.view((i * b, j * b), (b, b)).into_owned()
    }

    fn block_norm(&self, i: usize, j: usize) -> T {
        if self.block == 1 {
            return Float::abs(self.matrix[(i, j)]);
        }
        self.block_at(i, j).singular_values().max()
    }

    /// `⟨f, Kf⟩ ≥ 0` on `e_i` and `e_i ± e_j` (relative slack).
    pub fn check_positive(&self) -> Result<()> {
        let a = &self.matrix;
        let m = a.nrows();
        let scale = a.iter().fold(T::zero(), |s, &v| Float::max(s, Float::abs(v)));
        let slack = scale * T::of(1e-12) * T::of(m as f64);
        let sym = (a - a.transpose()).abs().max();
        if sym > slack {
            return Err(Error::InvariantViolation(format!("kernel flagged positive is not symmetric (defect {sym})")));
        }
        for s in 0..self.sites() {
            let d = self.block_at(s, s);
            let e = d.symmetric_eigenvalues().min();
            if e < -slack {
                return Err(Error::InvariantViolation(format!(
                    "diagonal block {s} has a negative quadratic form (eigenvalue {e})"
                )));
            }
        }
        for i in 0..m {
            for j in i + 1..m {
                let two = a[(i, j)] + a[(j, i)];
                for q in [a[(i, i)] + a[(j, j)] + two, a[(i, i)] + a[(j, j)] - two] {
                    if q < -slack {
                        return Err(Error::InvariantViolation(format!(
                            "negative quadratic form on e_{i} ± e_{j} ({q})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    /// `sup_{x,y} ‖k(x,y)‖`.
    pub sup_entry: f64,
    /// `sup_x ‖k(x,x)‖`.
    pub sup_diagonal: f64,
    pub positive_checked: bool,
}

/// `‖K‖_{1→∞} = sup_{x,y} ‖k(x,y)‖`; for a kernel flagged positive, also
/// checks positivity and that the supremum sits on the diagonal.
pub fn one_inf_norm<T: Scalar + RealField>(k: &FiniteKernel<T>) -> Result<NormReport> {
    let n = k.sites();
    let (mut entry, mut diag) = (T::zero(), T::zero());
    for i in 0..n {
        for j in 0..n {
            let v = k.block_norm(i, j);
            entry = Float::max(entry, v);
            if i == j {
                diag = Float::max(diag, v);
            }
        }
    }
    if k.positive {
        k.check_positive()?;
        let tol = Float::max(T::of(1e-12), T::epsilon() * T::of(64.0));
        if entry - diag > tol * diag {
            return Err(Error::InvariantViolation(format!(
                "positive kernel with off-diagonal norm {entry} above the diagonal {diag}"
            )));
        }
    }
    Ok(NormReport { sup_entry: entry.as_f64(), sup_diagonal: diag.as_f64(), positive_checked: k.positive })
}

use num_traits::Float;

// ---------------------------------------------------------------------------
// Spectral counting

/// Relative size below which an eigenvalue counts as zero.
pub const ZERO_TOL: f64 = 1e-10;

fn zero_threshold(eigs: &[f64]) -> f64 {
    ZERO_TOL * eigs.iter().fold(0.0f64, |m, &e| m.max(e.abs()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CountPair {
    pub t: f64,
    /// `#{μ > 0 : 1/μ > t}`.
    pub lhs: u64,
    /// `N(1/t) − b`.
    pub rhs: u64,
    /// `1/t` coincides with an eigenvalue; equality is not asserted.
    pub boundary: bool,
}

/// Both sides of `λ_{D^{-1}}(t) = N(1/t) − b` for a finite spectrum.
pub fn counting_duality(eigs: &[f64], t: f64) -> Result<CountPair> {
    if !(t > 0.0 && t.is_finite()) {
        return invalid(format!("t must be positive, got {t}"));
    }
    if eigs.iter().any(|&e| !(e >= 0.0 && e.is_finite())) {
        return invalid("eigenvalues must be nonnegative and finite");
    }
    let z = zero_threshold(eigs);
    let s = 1.0 / t;
    let positive = || eigs.iter().filter(|&&e| e > z);
    let lhs = positive().filter(|&&e| 1.0 / e > t).count() as u64;
    let b = eigs.iter().filter(|&&e| e <= z).count() as u64;
    let n = eigs.iter().filter(|&&e| e <= z || e <= s).count() as u64;
    let rhs = n - b;
    let boundary = positive().any(|&e| e == s || 1.0 / e == t);
    if !boundary && lhs != rhs {
        return Err(Error::InvariantViolation(format!("counts differ at t = {t}: {lhs} vs {rhs}")));
    }
    Ok(CountPair { t, lhs, rhs, boundary })
}

/// Generic `t`: midpoints between sorted distinct reciprocals of the
/// positive eigenvalues, plus one point beyond each end.
pub fn generic_times(eigs: &[f64]) -> Vec<f64> {
    let z = zero_threshold(eigs);
    let mut r: Vec<f64> = eigs.iter().filter(|&&e| e > z).map(|&e| 1.0 / e).collect();
    r.sort_by(|a, b| a.partial_cmp(b).unwrap());
    r.dedup();
    if r.is_empty() {
        return vec![1.0];
    }
    let mut out = vec![r[0] / 2.0];
    out.extend(r.windows(2).map(|w| 0.5 * (w[0] + w[1])));
    out.push(r[r.len() - 1] * 2.0);
    out
}

/// Right-continuous non-decreasing `N(t)`, `N(0⁻) = 0`, stored by its
/// jumps; `betti = N(0)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralCounting {
    /// `(s, jump)` with `s > 0` increasing.
    pub jumps: Vec<(f64, f64)>,
    pub betti: f64,
}

impl SpectralCounting {
    /// From a finite spectrum; eigenvalues below `10⁻¹⁰·max|μ|` are zero.
    pub fn from_eigenvalues(eigs: &[f64]) -> Result<Self> {
        if eigs.iter().any(|&e| !e.is_finite()) {
            return invalid("eigenvalues must be finite");
        }
        let z = zero_threshold(eigs);
        if eigs.iter().any(|&e| e < -z) {
            return invalid("eigenvalues of a positive operator must be nonnegative");
        }
        let betti = eigs.iter().filter(|&&e| e.abs() <= z).count() as f64;
        let mut pos: Vec<f64> = eigs.iter().copied().filter(|&e| e > z).collect();
        pos.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut jumps: Vec<(f64, f64)> = Vec::new();
        for e in pos {
            match jumps.last_mut() {
                Some(l) if l.0 == e => l.1 += 1.0,
                _ => jumps.push((e, 1.0)),
            }
        }
        Ok(Self { jumps, betti })
    }

    /// From samples `(t, N(t))`, `t ≥ 0` increasing, `N` non-decreasing. A row
    /// at `t = 0` sets `b`; otherwise `betti` is used.
    pub fn from_samples(samples: &[(f64, f64)], betti: f64) -> Result<Self> {
        if samples.is_empty() {
            return invalid("no samples");
        }
        let mut b = betti;
        let mut prev = None::<(f64, f64)>;
        let mut jumps = Vec::new();
        for (i, &(t, n)) in samples.iter().enumerate() {
            if !(t >= 0.0 && t.is_finite() && n.is_finite()) {
                return invalid(format!("sample {}: bad values", i + 1));
            }
            if let Some((pt, pn)) = prev {
                if t <= pt {
                    return invalid(format!("sample {}: times must increase", i + 1));
                }
                if n < pn {
                    return invalid(format!("sample {}: N must be non-decreasing", i + 1));
                }
            }
            if t == 0.0 {
                b = n;
            } else {
                let base = prev.map_or(b, |p| p.1);
                if n < base {
                    return invalid(format!("sample {}: N below b", i + 1));
                }
                if n > base {
                    jumps.push((t, n - base));
                }
            }
            prev = Some((t, n));
        }
        if !(b >= 0.0) {
            return invalid("b must be nonnegative");
        }
        Ok(Self { jumps, betti: b })
    }

    pub fn read_csv<R: Read>(r: R, betti: f64) -> Result<Self> {
        let rows = read_pairs(r, ["t", "N"])?;
        Self::from_samples(&rows, betti)
    }

    /// `N(t)`.
    pub fn eval(&self, t: f64) -> f64 {
        if t < 0.0 {
            return 0.0;
        }
        let k = self.jumps.partition_point(|j| j.0 <= t);
        self.betti + self.jumps[..k].iter().map(|j| j.1).sum::<f64>()
    }

    /// `N(t) − b` in log coordinates.
    fn excess(&self) -> Excess<'_> {
        let mut cum = Vec::with_capacity(self.jumps.len());
        let mut s = 0.0;
        for j in &self.jumps {
            s += j.1;
            cum.push(s);
        }
        Excess { n: self, cum }
    }
}

struct Excess<'a> {
    n: &'a SpectralCounting,
    cum: Vec<f64>,
}

impl LogProfile for Excess<'_> {
    fn ln_at(&self, x: f64, t: f64) -> f64 {
        let t = if t > 0.0 && t.is_finite() { t } else { x.exp() };
        let k = self.n.jumps.partition_point(|j| j.0 <= t);
        if k == 0 {
            f64::NEG_INFINITY
        } else {
            self.cum[k - 1].ln()
        }
    }

    fn domain(&self) -> (f64, f64) {
        match (self.n.jumps.first(), self.n.jumps.last()) {
            (Some(a), Some(b)) => (a.0.ln() - 1e-12, b.0.ln() + 1e-12),
            _ => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    fn ln_breaks(&self, lo: f64, hi: f64) -> Option<Vec<f64>> {
        Some(self.n.jumps.iter().map(|j| j.0.ln()).filter(|&x| x >= lo && x <= hi).collect())
    }
}

/// `λ(s) = N(1/s) − b`, the distribution function of `D^{-1}`.
struct Reciprocal<'a>(&'a Excess<'a>);

impl LogProfile for Reciprocal<'_> {
    fn ln_at(&self, x: f64, t: f64) -> f64 {
        // Strict inequality 1/μ > s: a jump exactly at 1/s is excluded.
        let s = if t > 0.0 && t.is_finite() { 1.0 / t } else { (-x).exp() };
        let k = self.0.n.jumps.partition_point(|j| j.0 < s);
        if k == 0 {
            f64::NEG_INFINITY
        } else {
            self.0.cum[k - 1].ln()
        }
    }

    fn domain(&self) -> (f64, f64) {
        // λ(s) counts jumps strictly below 1/s: data ends just before
        // s = 1/s_min.
        let (a, b) = self.0.domain();
        (-b, -a - 1e-9)
    }

    fn ln_breaks(&self, lo: f64, hi: f64) -> Option<Vec<f64>> {
        self.0.ln_breaks(-hi, -lo).map(|v| v.into_iter().map(|x| -x).rev().collect())
    }
}

/// `θ(t) = ∫ e^{−st} dN(s) = b + Σ jumps·e^{−s t}`.
pub fn laplace_stieltjes(n: &SpectralCounting, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return invalid(format!("t must be positive, got {t}"));
    }
    Ok(n.betti + n.jumps.iter().map(|&(s, j)| j * (-s * t).exp()).sum::<f64>())
}

impl SpectralCounting {
    /// `θ(t) − b` at `t = 2^j` for `2^j ≤ 2^{−8}/s_min`; the smallest jump
    /// sets the range where the finite data still resolves the decay.
    pub fn heat_trace(&self) -> Result<HeatTrace> {
        let s_min = self.jumps.first().map(|j| j.0).ok_or_else(|| Error::InvalidInput("no positive spectrum".into()))?;
        let top = (1.0 / (s_min * 256.0)).log2().floor();
        if top < 3.0 {
            return invalid("counting data does not reach small enough t for a heat trace");
        }
        let times: Vec<f64> = (0..=top as i32).map(|j| 2f64.powi(j)).collect();
        let values = times
            .iter()
            .map(|&t| self.jumps.iter().map(|&(s, j)| j * (-s * t).exp()).sum())
            .collect();
        HeatTrace::new(times, values, self.betti)
    }
}

// ---------------------------------------------------------------------------
// Novikov–Shubin numbers

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NsNumbers {
    /// `2·liminf_{t→∞} −ln(θ(t) − b)/ln t`.
    #[serde(with = "ext::opt")]
    pub alpha_lower: Option<f64>,
    /// `2·limsup_{t→0} ln(N(t) − b)/ln t`.
    #[serde(with = "ext::opt")]
    pub alpha: Option<f64>,
    /// `2·limsup_{t→∞} −ln(θ(t) − b)/ln t`.
    #[serde(with = "ext::opt")]
    pub alpha_prime: Option<f64>,
    /// `2/ord₀(D^{-1})` from `λ(s) = N(1/s) − b`.
    #[serde(with = "ext::opt")]
    pub alpha_via_distribution: Option<f64>,
}

fn from_trace(trace: &HeatTrace) -> Result<(f64, f64)> {
    let g = trace_grid(trace, ASDIM_ANCHOR.max(trace.times[0]));
    let lo = ratio_extremum(trace, End::Infinity, Extremum::Liminf, &g)?;
    let hi = ratio_extremum(trace, End::Infinity, Extremum::Limsup, &g)?;
    Ok((2.0 * lo.value, 2.0 * hi.value))
}

/// The numbers computable from a heat trace (large `t` only).
pub fn ns_numbers_trace(trace: &HeatTrace) -> Result<NsNumbers> {
    let (lo, hi) = from_trace(trace)?;
    Ok(NsNumbers { alpha_lower: Some(lo), alpha: None, alpha_prime: Some(hi), alpha_via_distribution: None })
}

/// All numbers from a counting function: `α` from `N` near 0, the others
/// from its Laplace–Stieltjes transform. A spectral gap gives `α = +∞`.
pub fn ns_numbers_counting(n: &SpectralCounting) -> Result<NsNumbers> {
    let ex = n.excess();
    let Some(&(s_min, _)) = n.jumps.first() else {
        return Ok(NsNumbers {
            alpha_lower: Some(f64::INFINITY),
            alpha: Some(f64::INFINITY),
            alpha_prime: Some(f64::INFINITY),
            alpha_via_distribution: Some(f64::INFINITY),
        });
    };
    let s_max = n.jumps[n.jumps.len() - 1].0;
    // Sampled data reaching down to s_min: grid from the top sample ≤ 1.
    let t0 = n.jumps.iter().map(|j| j.0).rfind(|&s| s <= 1.0).unwrap_or(s_max);
    let count = (t0 / s_min).log2().floor() as u64;
    let (alpha, via) = if count < 2 || n.jumps.len() < 3 {
        // Isolated lowest jump: spectral gap at 0.
        (f64::INFINITY, f64::INFINITY)
    } else {
        let g = GridSpec { t0, count, ..GridSpec::default() };
        // limsup ln f/ln t = −liminf ln f/ln(1/t).
        let e = ratio_extremum(&ex, End::Zero, Extremum::Liminf, &g)?;
        let lambda = Reciprocal(&ex);
        let gd = GridSpec { t0: 1.0 / t0, count, ..GridSpec::default() };
        let d = order_via_distribution(&lambda, End::Zero, &gd)?;
        (-2.0 * e.value, if d.value == 0.0 { f64::INFINITY } else { 2.0 / d.value })
    };
    let (lo, hi) = match n.heat_trace() {
        Ok(tr) if tr.times.len() >= 3 => {
            let (a, b) = from_trace(&tr)?;
            (Some(a), Some(b))
        }
        _ => (None, None),
    };
    Ok(NsNumbers { alpha_lower: lo, alpha: Some(alpha), alpha_prime: hi, alpha_via_distribution: Some(via) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;

    #[test]
    fn two_step_return_is_three_eighths() {
        let w = lattice_walk(1, 2, Ratio::new(1i64, 2), |_, _| Ok(())).unwrap();
        assert_eq!(w.times, vec![0, 1, 2]);
        assert_eq!(w.one_dim[2], Ratio::new(3, 8));
        let w3 = lattice_walk(3, 2, Ratio::new(1i64, 2), |_, _| Ok(())).unwrap();
        assert_eq!(w3.values[2], Ratio::new(27, 512));
    }

    #[test]
    fn walk_limits() {
        assert!(matches!(lattice_return_probability(1, MAX_WALK + 1, 0.5), Err(Error::Resource(_))));
        assert!(lattice_return_probability(5, 4, 0.5).is_err());
        assert!(lattice_return_probability(1, 4, 1.0).is_err());
    }

    #[test]
    fn power_trace() {
        let tr = HeatTrace::dyadic(1.0, 20, 0.0, |t| 1.0 / t).unwrap();
        let a = asdim(&tr).unwrap().value;
        assert!((a - 2.0).abs() < 1e-9);
        assert!((asdim_sup_form(&tr).unwrap().value - a).abs() < 1e-6);
        let c = HeatTrace::dyadic(1.0, 20, 0.0, |_| 3.0).unwrap();
        assert!(asdim_sup_form(&c).unwrap().value < 1e-9);
        assert!(asdim(&HeatTrace::dyadic(1.0, 5, 0.0, |t| 1.0 / t).unwrap()).is_err());
    }

    #[test]
    fn norm_examples() {
        let k = FiniteKernel::new(vec![vec![2.0, 1.0], vec![1.0, 1.0]], 1).unwrap().flagged_positive(true);
        let r = one_inf_norm(&k).unwrap();
        assert_eq!((r.sup_entry, r.sup_diagonal), (2.0, 2.0));
        let k = FiniteKernel::new(vec![vec![0.0, 5.0], vec![5.0, 0.0]], 1).unwrap();
        assert_eq!(one_inf_norm(&k).unwrap().sup_entry, 5.0);
        let bad = FiniteKernel::new(vec![vec![1.0, 2.0], vec![2.0, 1.0]], 1).unwrap().flagged_positive(true);
        assert!(matches!(one_inf_norm(&bad), Err(Error::InvariantViolation(_))));
    }

    #[test]
    fn duality_examples() {
        let p = counting_duality(&[0.0, 0.5, 2.0], 1.0).unwrap();
        assert_eq!((p.lhs, p.rhs), (1, 1));
        let z = counting_duality(&[0.0, 0.0], 3.0).unwrap();
        assert_eq!((z.lhs, z.rhs), (0, 0));
        let b = counting_duality(&[0.5, 2.0], 2.0).unwrap();
        assert!(b.boundary);
    }

    #[test]
    fn laplace_of_two_levels() {
        let n = SpectralCounting::from_eigenvalues(&[0.0, 1.0]).unwrap();
        assert_eq!(n.betti, 1.0);
        let th = laplace_stieltjes(&n, 2.0).unwrap();
        assert!((th - 1.0 - (-2f64).exp()).abs() < 1e-15);
        assert!((laplace_stieltjes(&n, 1e-12).unwrap() - 2.0).abs() < 1e-9);
    }
}
