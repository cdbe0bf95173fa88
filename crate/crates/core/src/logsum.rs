//! Streaming sums of positive terms given by their logarithms.

/// `ln Σ xᵢ` accumulated as `m + ln s` with `m` the running maximum exponent.
///
/// Terms can be pushed with a multiplicity (`ln count`), which is how
/// run-length encoded sequences are summed without expanding them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogSum {
    m: f64,
    s: f64,
}

impl Default for LogSum {
    fn default() -> Self {
        Self::new()
    }
}

impl LogSum {
    pub fn new() -> Self {
        Self { m: f64::NEG_INFINITY, s: 0.0 }
    }

    /// Adds `e^{ln_x}`.
    pub fn push(&mut self, ln_x: f64) {
        if ln_x == f64::NEG_INFINITY {
            return;
        }
        if ln_x == f64::INFINITY {
            self.m = f64::INFINITY;
            self.s = 1.0;
            return;
        }
        if self.m == f64::INFINITY {
            return;
        }
        if ln_x > self.m {
            self.s = self.s * (self.m - ln_x).exp() + 1.0;
            self.m = ln_x;
        } else {
            self.s += (ln_x - self.m).exp();
        }
    }

    /// Adds `count · e^{ln_x}` where `ln_count = ln count`.
    pub fn push_many(&mut self, ln_x: f64, ln_count: f64) {
        self.push(ln_x + ln_count);
    }

    pub fn merge(&mut self, other: &LogSum) {
        if other.s > 0.0 {
            self.push(other.m + other.s.ln());
        }
    }

    /// `ln` of the sum; `-inf` when empty.
    pub fn ln(&self) -> f64 {
        if self.s == 0.0 {
            f64::NEG_INFINITY
        } else {
            self.m + self.s.ln()
        }
    }

    pub fn value(&self) -> f64 {
        self.ln().exp()
    }
}

/// `ln(e^a − e^b)` for `a ≥ b`.
pub fn ln_sub(a: f64, b: f64) -> f64 {
    if b == f64::NEG_INFINITY {
        return a;
    }
    if b >= a {
        return f64::NEG_INFINITY;
    }
    a + (-(b - a).exp()).ln_1p()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_direct_sum() {
        let xs = [1e-300, 3.5, 1e10, 0.25, 7.0];
        let mut s = LogSum::new();
        for x in xs {
            s.push(f64::ln(x));
        }
        let direct: f64 = xs.iter().sum();
        assert!((s.value() - direct).abs() / direct < 1e-14);
    }

    #[test]
    fn survives_huge_exponents() {
        let mut s = LogSum::new();
        s.push_many(-1e6, (1e300f64).ln());
        s.push(-1e6);
        assert!((s.ln() - (-1e6 + (1e300f64).ln())).abs() < 1e-9);
        assert_eq!(LogSum::new().ln(), f64::NEG_INFINITY);
    }

    #[test]
    fn subtraction() {
        assert!((ln_sub(3f64.ln(), 1f64.ln()) - 2f64.ln()).abs() < 1e-15);
        assert_eq!(ln_sub(1.0, 1.0), f64::NEG_INFINITY);
    }
}
