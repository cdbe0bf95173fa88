//! Non-increasing, right-continuous step functions on `(0, ∞)`.
//!
//! A [`StepFunction`] is stored in canonical form: values strictly decreasing,
//! only the first one may be `+∞`, and a function that drops to zero does so
//! through `support_end` rather than a trailing zero value. The zero function
//! is `values = [0]`.
//!
//! The distribution function and the non-increasing rearrangement are the
//! same generalized inverse, so on this representation both are an exact
//! swap of breakpoints and values: no arithmetic, no rounding.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct StepFunction<T> {
    breakpoints: Vec<T>,
    values: Vec<T>,
    support_end: Option<T>,
}

/// Finite measure given as unordered `(value, mass)` atoms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MassSample<T> {
    pub atoms: Vec<(T, T)>,
}

impl<T: Scalar> MassSample<T> {
    pub fn new(atoms: Vec<(T, T)>) -> Self {
        Self { atoms }
    }

    /// `Σ value · mass`, accumulated in input order.
    pub fn total(&self) -> T {
        self.atoms.iter().fold(T::zero(), |acc, &(v, m)| acc + v * m)
    }
}

impl<T: Scalar> StepFunction<T> {
    /// Validates and canonicalises.
    ///
    /// `values[0]` holds on `(0, t₁)`, `values[i]` on `[tᵢ, tᵢ₊₁)`; the last
    /// value extends to `support_end` (or forever).
    pub fn new(breakpoints: Vec<T>, values: Vec<T>, support_end: Option<T>) -> Result<Self> {
        if values.len() != breakpoints.len() + 1 {
            return invalid(format!(
                "{} breakpoints need {} values, got {}",
                breakpoints.len(),
                breakpoints.len() + 1,
                values.len()
            ));
        }
        for (i, b) in breakpoints.iter().enumerate() {
            if !b.is_finite() || *b <= T::zero() {
                return invalid(format!("breakpoint {i} is not a positive finite number: {b}"));
            }
            if i > 0 && *b <= breakpoints[i - 1] {
                return invalid(format!("breakpoints not strictly increasing at index {i}"));
            }
        }
        for (i, v) in values.iter().enumerate() {
            if v.is_nan() || *v < T::zero() {
                return invalid(format!("value {i} is negative or NaN: {v}"));
            }
            if i > 0 && v.is_infinite() {
                return invalid(format!("only the first value may be infinite (index {i})"));
            }
            if i > 0 && *v > values[i - 1] {
                return invalid(format!("values increase at index {i}"));
            }
        }
        if let Some(end) = support_end {
            if !end.is_finite() || end <= T::zero() {
                return invalid("support_end must be positive and finite");
            }
            if breakpoints.last().is_some_and(|b| end <= *b) {
                return invalid("support_end must lie beyond the last breakpoint");
            }
        }
        if values.len() == 1 && values[0].is_infinite() && support_end.is_none() {
            return invalid("function is +inf everywhere");
        }
        Ok(Self::canonical(breakpoints, values, support_end))
    }

    fn canonical(breakpoints: Vec<T>, values: Vec<T>, support_end: Option<T>) -> Self {
        let mut bp = Vec::with_capacity(breakpoints.len());
        let mut vs = Vec::with_capacity(values.len());
        vs.push(values[0]);
        for (b, v) in breakpoints.into_iter().zip(values.into_iter().skip(1)) {
            if v < *vs.last().unwrap() {
                bp.push(b);
                vs.push(v);
            }
        }
        let mut end = support_end;
        // A trailing zero plateau becomes the support end.
        if *vs.last().unwrap() == T::zero() && vs.len() > 1 {
            vs.pop();
            end = bp.pop();
        }
        if vs[0] == T::zero() {
            return Self::zero();
        }
        Self { breakpoints: bp, values: vs, support_end: end }
    }

    pub fn zero() -> Self {
        Self { breakpoints: Vec::new(), values: vec![T::zero()], support_end: None }
    }

    /// `c` on `(0, end)` and zero afterwards (`end = None`: everywhere).
    pub fn constant(c: T, end: Option<T>) -> Result<Self> {
        Self::new(Vec::new(), vec![c], end)
    }

    /// Samples `f` on the given breakpoints: `f(tᵢ₊₁)` on `[tᵢ, tᵢ₊₁)`, so the
    /// step lies below a non-increasing `f` on every plateau. The last plateau
    /// takes `tail` (or `f(t_m)` when `None`), the first takes `head`.
    pub fn sample_below(
        breakpoints: Vec<T>,
        head: T,
        tail: Option<T>,
        f: impl Fn(T) -> T,
    ) -> Result<Self> {
        let m = breakpoints.len();
        let mut values = Vec::with_capacity(m + 1);
        values.push(head);
        for i in 0..m {
            let v = if i + 1 < m {
                f(breakpoints[i + 1])
            } else {
                tail.unwrap_or_else(|| f(breakpoints[i]))
            };
            values.push(v);
        }
        Self::new(breakpoints, values, None)
    }

    /// Samples `f` at the left end of each plateau: `f(tᵢ)` on `[tᵢ, tᵢ₊₁)`.
    pub fn sample_left(breakpoints: Vec<T>, head: T, f: impl Fn(T) -> T) -> Result<Self> {
        let mut values = Vec::with_capacity(breakpoints.len() + 1);
        values.push(head);
        values.extend(breakpoints.iter().map(|&t| f(t)));
        Self::new(breakpoints, values, None)
    }

    pub fn breakpoints(&self) -> &[T] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn support_end(&self) -> Option<T> {
        self.support_end
    }

    pub fn is_zero(&self) -> bool {
        self.values.len() == 1 && self.values[0] == T::zero()
    }

    /// Right-continuous evaluation; `t ≤ 0` returns the head value.
    pub fn eval(&self, t: T) -> T {
        if let Some(end) = self.support_end {
            if t >= end {
                return T::zero();
            }
        }
        let idx = self.breakpoints.partition_point(|&b| b <= t);
        self.values[idx]
    }

    /// Value on the last plateau before the support end.
    pub fn tail_value(&self) -> T {
        *self.values.last().unwrap()
    }

    /// Largest abscissa carrying information: the support end, else the last
    /// breakpoint, else `None` for constants.
    pub fn horizon(&self) -> Option<T> {
        self.support_end.or_else(|| self.breakpoints.last().copied())
    }

    /// Plateaus as `(start, end, value)`; the last end may be `+∞`.
    pub fn pieces(&self) -> impl Iterator<Item = (T, T, T)> + '_ {
        let n = self.values.len();
        (0..n).map(move |i| {
            let start = if i == 0 { T::zero() } else { self.breakpoints[i - 1] };
            let end = if i + 1 < n {
                self.breakpoints[i]
            } else {
                self.support_end.unwrap_or_else(T::infinity)
            };
            (start, end, self.values[i])
        })
    }

    /// `∫_a^b f`, exact up to the rounding of each `value · overlap`.
    pub fn integrate(&self, a: T, b: T) -> Result<T> {
        if a.is_nan() || b.is_nan() || a < T::zero() || a >= b || a.is_infinite() {
            return invalid(format!("integration bounds must satisfy 0 <= a < b, got [{a}, {b}]"));
        }
        let mut acc = T::zero();
        for (s, e, v) in self.pieces() {
            if e <= a {
                continue;
            }
            if s >= b {
                break;
            }
            let lo = if s > a { s } else { a };
            let hi = if e < b { e } else { b };
            if hi <= lo || v == T::zero() {
                continue;
            }
            if v.is_infinite() || hi.is_infinite() {
                return Ok(T::infinity());
            }
            acc = acc + v * (hi - lo);
        }
        Ok(acc)
    }

    /// Distribution function `λ(s) = |{t : f(t) > s}|`.
    ///
    /// The only infinite level measure is the head value of the result (all
    /// levels below a positive tail of unbounded support).
    pub fn distribution(&self) -> Result<Self> {
        if self.is_zero() {
            return Ok(Self::zero());
        }
        let m = self.breakpoints.len();
        let head = self.support_end.unwrap_or_else(T::infinity);
        // Levels v_m < … < v_1 become breakpoints, the abscissae t_m > … > t_1
        // become values; v_0 becomes the support end (if finite).
        let mut bp = Vec::with_capacity(m);
        let mut vs = Vec::with_capacity(m + 1);
        vs.push(head);
        for i in (1..=m).rev() {
            bp.push(self.values[i]);
            vs.push(self.breakpoints[i - 1]);
        }
        let v0 = self.values[0];
        let end = if v0.is_infinite() { None } else { Some(v0) };
        if vs.len() == 1 && head.is_infinite() && end.is_none() {
            return Err(Error::Overflow("every level set has infinite measure".into()));
        }
        Ok(Self { breakpoints: bp, values: vs, support_end: end })
    }

    /// Non-increasing rearrangement `μ(t) = inf{v ≥ 0 : λ(v) ≤ t}` of a
    /// non-increasing function; the same swap as [`Self::distribution`].
    pub fn rearrange_fn(&self) -> Result<Self> {
        self.distribution()
    }

    /// `rearrange(distribution(f))`; equals `f` exactly.
    pub fn round_trip(&self) -> Result<Self> {
        self.distribution()?.rearrange_fn()
    }

    /// Pointwise `f^α`, same breakpoints.
    pub fn power_scale(&self, alpha: T) -> Result<Self> {
        if !(alpha > T::zero()) || !alpha.is_finite() {
            return invalid(format!("power must be positive and finite, got {alpha}"));
        }
        let values = self.values.iter().map(|v| v.powf(alpha)).collect();
        Ok(Self::canonical(self.breakpoints.clone(), values, self.support_end))
    }

    /// Pointwise `c·f` for `c > 0`.
    pub fn scale(&self, c: T) -> Result<Self> {
        if !(c > T::zero()) || !c.is_finite() {
            return invalid(format!("scale must be positive and finite, got {c}"));
        }
        let values = self.values.iter().map(|&v| v * c).collect();
        Ok(Self::canonical(self.breakpoints.clone(), values, self.support_end))
    }

    /// `f(c·t)` for `c > 0`.
    pub fn dilate(&self, c: T) -> Result<Self> {
        if !(c > T::zero()) || !c.is_finite() {
            return invalid(format!("dilation must be positive and finite, got {c}"));
        }
        let bp = self.breakpoints.iter().map(|&b| b / c).collect();
        Ok(Self::canonical(bp, self.values.clone(), self.support_end.map(|e| e / c)))
    }

    /// Converts to another precision; plateaus whose breakpoints collide
    /// after rounding are merged (the later value wins).
    pub fn cast<U: Scalar>(&self) -> Result<StepFunction<U>> {
        let c = |x: T| U::of(x.as_f64());
        let mut bp: Vec<U> = Vec::with_capacity(self.breakpoints.len());
        let mut vs = vec![c(self.values[0])];
        for (&b, &v) in self.breakpoints.iter().zip(&self.values[1..]) {
            let (b, v) = (c(b), c(v));
            if bp.last().is_some_and(|&l| b <= l) {
                *vs.last_mut().unwrap() = v;
            } else {
                bp.push(b);
                vs.push(v);
            }
        }
        StepFunction::new(bp, vs, self.support_end.map(c))
    }
}

/// Non-increasing rearrangement of a finite measure: values sorted
/// descending, each plateau as long as its mass. Ties merge.
pub fn rearrange<T: Scalar>(s: &MassSample<T>) -> Result<StepFunction<T>> {
    if s.atoms.is_empty() {
        return invalid("empty sample");
    }
    for (i, &(v, m)) in s.atoms.iter().enumerate() {
        if v.is_nan() || v < T::zero() || !v.is_finite() {
            return invalid(format!("atom {i}: value must be finite and nonnegative, got {v}"));
        }
        if m.is_nan() || m < T::zero() || !m.is_finite() {
            return invalid(format!("atom {i}: mass must be finite and nonnegative, got {m}"));
        }
    }
    let mut atoms: Vec<(T, T)> = s
        .atoms
        .iter()
        .copied()
        .filter(|&(v, m)| v > T::zero() && m > T::zero())
        .collect();
    if atoms.is_empty() {
        return Ok(StepFunction::zero());
    }
    atoms.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());

    let mut values = Vec::new();
    let mut masses: Vec<T> = Vec::new();
    for (v, m) in atoms {
        if values.last() == Some(&v) {
            let last = masses.last_mut().unwrap();
            *last = *last + m;
        } else {
            values.push(v);
            masses.push(m);
        }
    }
    let mut bp = Vec::with_capacity(values.len());
    let mut acc = T::zero();
    for m in &masses {
        acc = acc + *m;
        bp.push(acc);
    }
    let end = bp.pop();
    // Cumulative sums are strictly increasing because every mass is positive,
    // unless a mass underflows relative to the running total.
    StepFunction::new(bp, values, end)
}

/// Step function stored in log-log coordinates: `x = ln t`, `y = ln f`.
///
/// Same canonical layout as [`StepFunction`] (`y` strictly decreasing, only
/// `y[0]` may be `+∞`, `x_end` is the log of the support end). It exists for
/// sequences whose abscissae or values leave the `f64` range, such as runs
/// starting at `e^{2^40}`.
///
/// `domain` is the range of `x` where the stored function reflects the
/// underlying data; outside it the plateaus are artefacts of truncation.
#[derive(Debug, Clone, PartialEq)]
pub struct LogStep {
    x: Vec<f64>,
    y: Vec<f64>,
    x_end: Option<f64>,
    domain: (f64, f64),
}

impl LogStep {
    pub fn new(x: Vec<f64>, y: Vec<f64>, x_end: Option<f64>, domain: (f64, f64)) -> Result<Self> {
        if y.len() != x.len() + 1 {
            return invalid("log step: y must have one more entry than x");
        }
        if x.iter().any(|v| !v.is_finite()) || x.windows(2).any(|w| w[1] <= w[0]) {
            return invalid("log step: abscissae must be finite and strictly increasing");
        }
        if y.iter().any(|v| v.is_nan()) || y.windows(2).any(|w| w[1] > w[0]) {
            return invalid("log step: values must be non-increasing");
        }
        if y[1..].iter().any(|v| v.is_infinite()) {
            return invalid("log step: only the first value may be infinite");
        }
        if let Some(e) = x_end {
            if !e.is_finite() || x.last().is_some_and(|&b| e <= b) {
                return invalid("log step: support end must follow the last abscissa");
            }
        }
        if !(domain.0 <= domain.1) {
            return invalid("log step: empty domain");
        }
        // Merge equal plateaus.
        let mut xs = Vec::with_capacity(x.len());
        let mut ys = vec![y[0]];
        for (b, v) in x.into_iter().zip(y.into_iter().skip(1)) {
            if v < *ys.last().unwrap() {
                xs.push(b);
                ys.push(v);
            }
        }
        Ok(Self { x: xs, y: ys, x_end, domain })
    }

    /// Log image of `f`. The domain ends at the last breakpoint when `f` has
    /// a positive tail, and starts at the first one when `f` is unbounded.
    pub fn from_step<T: Scalar>(f: &StepFunction<T>) -> Self {
        let x: Vec<f64> = f.breakpoints().iter().map(|b| b.as_f64().ln()).collect();
        let y: Vec<f64> = f.values().iter().map(|v| v.as_f64().ln()).collect();
        let x_end = f.support_end().map(|e| e.as_f64().ln());
        let hi = match (x_end, x.last()) {
            (None, Some(&b)) => b,
            _ => f64::INFINITY,
        };
        let lo = if y[0].is_infinite() { x.first().copied().unwrap_or(f64::NEG_INFINITY) } else { f64::NEG_INFINITY };
        Self { x, y, x_end, domain: (lo, hi) }
    }

    pub fn xs(&self) -> &[f64] {
        &self.x
    }

    pub fn ys(&self) -> &[f64] {
        &self.y
    }

    pub fn x_end(&self) -> Option<f64> {
        self.x_end
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    pub fn with_domain(mut self, domain: (f64, f64)) -> Self {
        self.domain = domain;
        self
    }

    /// `ln f(e^x)`; `-∞` past the support end.
    pub fn ln_eval(&self, x: f64) -> f64 {
        if self.x_end.is_some_and(|e| x >= e) {
            return f64::NEG_INFINITY;
        }
        self.y[self.x.partition_point(|&b| b <= x)]
    }

    /// Value just left of `x`.
    fn ln_eval_left(&self, x: f64) -> f64 {
        if self.x_end.is_some_and(|e| x > e) {
            return f64::NEG_INFINITY;
        }
        self.y[self.x.partition_point(|&b| b < x)]
    }

    /// Distribution function in log coordinates; an exact swap, like
    /// [`StepFunction::distribution`]. The domain maps to the levels whose
    /// level sets end inside the original domain.
    pub fn distribution(&self) -> Self {
        let head = self.x_end.unwrap_or(f64::INFINITY);
        let m = self.x.len();
        let mut x = Vec::with_capacity(m);
        let mut y = Vec::with_capacity(m + 1);
        y.push(head);
        for i in (1..=m).rev() {
            x.push(self.y[i]);
            y.push(self.x[i - 1]);
        }
        let x_end = if self.y[0].is_infinite() { None } else { Some(self.y[0]) };
        let (lo, hi) = self.domain;
        let new_lo = if hi == f64::INFINITY { f64::NEG_INFINITY } else { self.ln_eval_left(hi) };
        let new_hi = if lo == f64::NEG_INFINITY { f64::INFINITY } else { self.ln_eval(lo) };
        Self { x, y, x_end, domain: (new_lo.min(new_hi), new_hi) }
    }

    /// `f^α`: every log value scales by `α`.
    pub fn power_scale(&self, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return invalid(format!("power must be positive and finite, got {alpha}"));
        }
        Ok(Self { y: self.y.iter().map(|v| v * alpha).collect(), ..self.clone() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn three_step() -> StepFunction<f64> {
        rearrange(&MassSample::new(vec![(3.0, 1.0), (1.0, 2.0), (5.0, 1.0)])).unwrap()
    }

    #[test]
    fn rearrange_sorts_by_value() {
        let f = three_step();
        assert_eq!(f.breakpoints(), &[1.0, 2.0]);
        assert_eq!(f.values(), &[5.0, 3.0, 1.0]);
        assert_eq!(f.support_end(), Some(4.0));
        assert_eq!(f.eval(0.5), 5.0);
        assert_eq!(f.eval(1.0), 3.0);
        assert_eq!(f.eval(3.99), 1.0);
        assert_eq!(f.eval(4.0), 0.0);
    }

    #[test]
    fn rearrange_sorted_input_is_identity() {
        let f = rearrange(&MassSample::new(vec![(2.0, 1.0), (1.0, 1.0)])).unwrap();
        let g = StepFunction::new(vec![1.0], vec![2.0, 1.0], Some(2.0)).unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn rearrange_rejects_negative() {
        assert!(rearrange(&MassSample::new(vec![(1.0, -1.0)])).is_err());
        assert!(rearrange(&MassSample::new(vec![(-1.0, 1.0)])).is_err());
        assert!(rearrange::<f64>(&MassSample::new(vec![])).is_err());
    }

    #[test]
    fn ties_merge() {
        let f = rearrange(&MassSample::new(vec![(2.0, 1.0), (2.0, 0.5), (1.0, 1.0)])).unwrap();
        assert_eq!(f.breakpoints(), &[1.5]);
        assert_eq!(f.support_end(), Some(2.5));
    }

    #[test]
    fn distribution_of_three_step() {
        let lam = three_step().distribution().unwrap();
        assert_eq!(lam.values(), &[4.0, 2.0, 1.0]);
        assert_eq!(lam.breakpoints(), &[1.0, 3.0]);
        assert_eq!(lam.support_end(), Some(5.0));
        assert_eq!(lam.eval(0.0), 4.0);
        assert_eq!(lam.eval(1.0), 2.0);
        assert_eq!(lam.eval(3.0), 1.0);
        assert_eq!(lam.eval(5.0), 0.0);
    }

    #[test]
    fn distribution_of_constant() {
        let f = StepFunction::constant(2.5, Some(7.0)).unwrap();
        let lam = f.distribution().unwrap();
        assert_eq!(lam.eval(1.0), 7.0);
        assert_eq!(lam.eval(2.5), 0.0);
        // Unbounded support: infinite measure below the level.
        let g = StepFunction::constant(2.5f64, None).unwrap();
        let lam = g.distribution().unwrap();
        assert!(lam.eval(1.0).is_infinite());
        assert_eq!(lam.eval(3.0), 0.0);
    }

    #[test]
    fn round_trip_examples() {
        let f = three_step();
        assert_eq!(f.round_trip().unwrap(), f);
        let z = StepFunction::<f64>::zero();
        assert_eq!(z.round_trip().unwrap(), z);
        let u = StepFunction::new(vec![1.0, 2.0], vec![f64::INFINITY, 3.0, 1.0], None).unwrap();
        assert_eq!(u.round_trip().unwrap(), u);
    }

    #[test]
    fn sqrt_singularity_level_sets() {
        // t^{-1/2} on (0, 1], sampled below on a uniform grid of pitch 1e-4.
        let n = 10_000;
        let h = 1.0 / n as f64;
        let bp: Vec<f64> = (1..n).map(|i| i as f64 * h).collect();
        let mut f = StepFunction::sample_below(bp, f64::INFINITY, Some(1.0), |t| t.powf(-0.5))
            .unwrap();
        f = StepFunction::new(f.breakpoints().to_vec(), f.values().to_vec(), Some(1.0)).unwrap();
        let lam = f.distribution().unwrap();
        let mut worst: f64 = 0.0;
        for i in 0..2000 {
            let s = 1.0 + i as f64 * 0.05;
            worst = worst.max((lam.eval(s) - s.powi(-2)).abs());
        }
        assert!(worst <= h + 1e-12, "sup error {worst}");
    }

    #[test]
    fn integrate_examples() {
        let f = three_step();
        assert_eq!(f.integrate(0.0, 4.0).unwrap(), 10.0);
        assert_eq!(f.integrate(0.0, f64::INFINITY).unwrap(), 10.0);
        assert_eq!(f.integrate(2.25, 2.5).unwrap(), 0.25);
        assert!(f.integrate(1.0, 1.0).is_err());
        let k = 30;
        let bp: Vec<f64> = (0..=k).map(|j| 2f64.powi(j)).collect();
        let g = StepFunction::sample_left(bp, 1.0, |t| 1.0 / t).unwrap();
        let s = g.integrate(1.0, 2f64.powi(k)).unwrap();
        let exact = k as f64 * std::f64::consts::LN_2;
        assert!(s >= exact / 2.0 && s <= 2.0 * exact);
        let u = StepFunction::new(vec![1.0], vec![f64::INFINITY, 1.0], None).unwrap();
        assert!(u.integrate(0.0, 0.5).unwrap().is_infinite());
        assert!(u.integrate(1.0, f64::INFINITY).unwrap().is_infinite());
    }

    #[test]
    fn canonical_form() {
        let f = StepFunction::new(vec![1.0, 2.0, 3.0], vec![3.0, 3.0, 1.0, 0.0], None).unwrap();
        assert_eq!(f.breakpoints(), &[2.0]);
        assert_eq!(f.values(), &[3.0, 1.0]);
        assert_eq!(f.support_end(), Some(3.0));
        assert!(StepFunction::new(vec![1.0], vec![1.0, 2.0], None).is_err());
        assert!(StepFunction::new(vec![2.0, 1.0], vec![3.0, 2.0, 1.0], None).is_err());
        assert!(StepFunction::new(vec![], vec![f64::INFINITY], None).is_err());
        assert!(StepFunction::new(vec![1.0], vec![2.0, 1.0], Some(0.5)).is_err());
    }

    #[test]
    fn power_scale_keeps_breakpoints() {
        let f = three_step();
        let g = f.power_scale(2.0).unwrap();
        assert_eq!(g.breakpoints(), f.breakpoints());
        assert_eq!(g.values(), &[25.0, 9.0, 1.0]);
        assert_eq!(f.power_scale(1.0).unwrap(), f);
        assert!(f.power_scale(0.0).is_err());
    }

    #[test]
    fn f32_works() {
        let f = rearrange(&MassSample::new(vec![(3.0f32, 1.0), (5.0, 1.0)])).unwrap();
        assert_eq!(f.round_trip().unwrap(), f);
        let g: StepFunction<f64> = f.cast().unwrap();
        assert_eq!(g.values(), &[5.0, 3.0]);
    }
}
