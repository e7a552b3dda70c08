//! Small numerical helpers shared by the Monte Carlo routines.

/// z-value of a two-sided 95% normal interval.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

pub fn compensated_sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<CompensatedSum>().value()
}

/// Streaming accumulator for `ln Σ exp(x_i)` and `ln Σ exp(2 x_i)`.
///
/// Keeps a running maximum and rescales, so sample values far beyond the
/// `f64` range of `exp` are handled.
#[derive(Debug, Clone, Copy)]
pub struct LogSumExp {
    max: f64,
    scaled: f64,
    scaled_sq: f64,
    count: u64,
}

impl Default for LogSumExp {
    fn default() -> Self {
        Self {
            max: f64::NEG_INFINITY,
            scaled: 0.0,
            scaled_sq: 0.0,
            count: 0,
        }
    }
}

impl LogSumExp {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a sample given by its logarithm.
    pub fn push(&mut self, log_x: f64) {
        self.count += 1;
        if log_x == f64::NEG_INFINITY {
            return;
        }
        if log_x > self.max {
            let r = (self.max - log_x).exp();
            self.scaled = self.scaled * r + 1.0;
            self.scaled_sq = self.scaled_sq * r * r + 1.0;
            self.max = log_x;
        } else {
            let r = (log_x - self.max).exp();
            self.scaled += r;
            self.scaled_sq += r * r;
        }
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    /// `ln Σ exp(x_i)`.
    pub fn log_sum(&self) -> f64 {
        if self.scaled == 0.0 {
            f64::NEG_INFINITY
        } else {
            self.max + self.scaled.ln()
        }
    }

    /// `ln` of the sample mean of `exp(x_i)`.
    pub fn log_mean(&self) -> f64 {
        self.log_sum() - (self.count as f64).ln()
    }

    /// Sample mean of `exp(x_i)` (may overflow to infinity).
    pub fn mean(&self) -> f64 {
        self.log_mean().exp()
    }

    /// Standard error of the sample mean of `exp(x_i)`.
    pub fn std_error(&self) -> f64 {
        if self.count < 2 || self.scaled == 0.0 {
            return 0.0;
        }
        let n = self.count as f64;
        let m1 = self.scaled / n;
        let m2 = self.scaled_sq / n;
        let var_scaled = ((m2 - m1 * m1).max(0.0)) * n / (n - 1.0);
        (var_scaled / n).sqrt() * self.max.exp()
    }
}

/// Log-sum-exp of a finite slice.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let mut acc = LogSumExp::new();
    for &x in xs {
        acc.push(x);
    }
    acc.log_sum()
}

/// Binomial proportion with its standard error and 95% half-width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Proportion {
    pub successes: u64,
    pub trials: u64,
}

impl Proportion {
    pub fn new(successes: u64, trials: u64) -> Self {
        Self { successes, trials }
    }

    pub fn estimate(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.successes as f64 / self.trials as f64
        }
    }

    pub fn std_error(&self) -> f64 {
        if self.trials == 0 {
            return 0.0;
        }
        let f = self.estimate();
        (f * (1.0 - f) / self.trials as f64).sqrt()
    }

    pub fn half_width(&self) -> f64 {
        Z95 * self.std_error()
    }
}

/// Pearson χ² statistic and its upper-tail p-value.
pub fn chi_square_test(observed: &[u64], probabilities: &[f64]) -> (f64, f64) {
    use statrs::distribution::{ChiSquared, ContinuousCDF};
    assert_eq!(observed.len(), probabilities.len());
    let total: u64 = observed.iter().sum();
    let mut stat = 0.0;
    let mut cells = 0usize;
    for (&o, &q) in observed.iter().zip(probabilities) {
        let e = q * total as f64;
        if e > 0.0 {
            stat += (o as f64 - e).powi(2) / e;
            cells += 1;
        }
    }
    let dof = cells.saturating_sub(1).max(1) as f64;
    let dist = ChiSquared::new(dof).expect("positive degrees of freedom");
    (stat, 1.0 - dist.cdf(stat))
}

/// `ln C(n, k)`; `-inf` when `k > n`.
pub fn ln_binomial(n: u64, k: u64) -> f64 {
    use statrs::function::gamma::ln_gamma;
    if k > n {
        return f64::NEG_INFINITY;
    }
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}
