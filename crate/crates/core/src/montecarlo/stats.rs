//! Confidence intervals and the one-sample Kolmogorov-Smirnov test.

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959963984540054;

/// Wilson score interval for `k` successes in `n` trials, as (center, half-width).
pub fn wilson(k: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (f64::NAN, f64::INFINITY);
    }
    let n = n as f64;
    let p = k as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    (center, half)
}

/// Running mean and variance (Welford), mergeable in a fixed order.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Moments {
    pub n: u64,
    pub mean: f64,
    m2: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn merge(&mut self, o: &Moments) {
        if o.n == 0 {
            return;
        }
        let n = self.n + o.n;
        let d = o.mean - self.mean;
        self.mean += d * o.n as f64 / n as f64;
        self.m2 += o.m2 + d * d * self.n as f64 * o.n as f64 / n as f64;
        self.n = n;
    }

    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        self.m2 / (self.n - 1) as f64
    }

    /// Half-width of the normal 95% interval for the mean.
    pub fn ci95(&self) -> f64 {
        if self.n == 0 {
            return f64::INFINITY;
        }
        Z95 * (self.variance() / self.n as f64).sqrt()
    }
}

/// Kolmogorov distribution tail `Q(λ) = 2 Σ (−1)^{k−1} e^{−2k²λ²}`.
pub fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        sum += sign * term;
        if term < 1e-16 * sum.abs() {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsResult {
    pub n: usize,
    pub statistic: f64,
    pub p_value: f64,
}

/// One-sample KS test of `samples` against `cdf`. The p-value uses the
/// asymptotic law with Stephens' finite-sample correction.
pub fn ks_test<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> KsResult {
    let u: Vec<f64> = samples.iter().map(|&x| cdf(x)).collect();
    ks_uniform(&u)
}

/// KS test of values that should be Uniform(0, 1), e.g. probability
/// integral transforms under per-sample distributions.
pub fn ks_uniform(u: &[f64]) -> KsResult {
    let mut u = u.to_vec();
    u.sort_unstable_by(f64::total_cmp);
    let n = u.len();
    let nf = n as f64;
    let mut d: f64 = 0.0;
    for (i, &f) in u.iter().enumerate() {
        let lo = i as f64 / nf;
        let hi = (i + 1) as f64 / nf;
        d = d.max(hi - f).max(f - lo);
    }
    let sn = nf.sqrt();
    KsResult {
        n,
        statistic: d,
        p_value: if n == 0 { f64::NAN } else { kolmogorov_q((sn + 0.12 + 0.11 / sn) * d) },
    }
}
