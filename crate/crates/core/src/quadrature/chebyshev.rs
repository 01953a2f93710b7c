use crate::error::{Error, Result};

/// Chebyshev expansion `f(x) ≈ Σ c_k T_k(t)` with `t` the affine image of `x`
/// in `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Chebyshev {
    a: f64,
    b: f64,
    coeffs: Vec<f64>,
}

const MIN_DEGREE: usize = 16;

impl Chebyshev {
    /// Samples `f` on Chebyshev extreme points, doubling the degree (reusing
    /// earlier samples) until the trailing coefficients fall below `tol`
    /// times the largest one. Returns the expansion and whether it converged
    /// within `max_degree`.
    pub fn fit<F>(mut f: F, a: f64, b: f64, tol: f64, max_degree: usize) -> Result<(Self, bool)>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut sample = |t: f64| -> Result<f64> {
            let x = mid + half * t;
            let v = f(x)?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(Error::NonFinite { x })
            }
        };
        let mut n = MIN_DEGREE.min(max_degree.max(2));
        let mut values: Vec<f64> = (0..=n)
            .map(|j| sample((std::f64::consts::PI * j as f64 / n as f64).cos()))
            .collect::<Result<_>>()?;
        loop {
            let coeffs = coefficients(&values);
            let scale = coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
            let tail = coeffs[n - 2..].iter().fold(0.0f64, |m, c| m.max(c.abs()));
            let converged = tail <= tol * scale || scale == 0.0;
            if converged || 2 * n > max_degree {
                let cutoff = 1e-3 * tol * scale;
                let keep = coeffs.iter().rposition(|c| c.abs() > cutoff).map_or(1, |k| k + 1);
                let mut coeffs = coeffs;
                coeffs.truncate(keep);
                return Ok((Self { a, b, coeffs }, converged));
            }
            let m = 2 * n;
            let mut next = Vec::with_capacity(m + 1);
            for j in 0..=m {
                if j % 2 == 0 {
                    next.push(values[j / 2]);
                } else {
                    next.push(sample((std::f64::consts::PI * j as f64 / m as f64).cos())?);
                }
            }
            values = next;
            n = m;
        }
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Clenshaw evaluation; `x` is clamped to the domain.
    pub fn eval(&self, x: f64) -> f64 {
        let t = ((2.0 * x - self.a - self.b) / (self.b - self.a)).clamp(-1.0, 1.0);
        let (mut b1, mut b2) = (0.0, 0.0);
        for &c in self.coeffs.iter().skip(1).rev() {
            let b0 = 2.0 * t * b1 - b2 + c;
            b2 = b1;
            b1 = b0;
        }
        t * b1 - b2 + self.coeffs[0]
    }

    /// Antiderivative vanishing at the left end of the domain.
    pub fn antiderivative(&self) -> Self {
        let c = &self.coeffs;
        let n = c.len();
        let at = |k: usize| c.get(k).copied().unwrap_or(0.0);
        let scale = 0.5 * (self.b - self.a);
        let mut out = vec![0.0; n + 1];
        if n > 0 {
            out[1] = scale * (at(0) - 0.5 * at(2));
        }
        for k in 2..=n {
            out[k] = scale * (at(k - 1) - at(k + 1)) / (2.0 * k as f64);
        }
        // F(a) = Σ C_k (-1)^k = 0
        let alt: f64 = out
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, v)| if k % 2 == 0 { *v } else { -*v })
            .sum();
        out[0] = -alt;
        Self {
            a: self.a,
            b: self.b,
            coeffs: out,
        }
    }

    /// Definite integral over the whole domain.
    pub fn integral(&self) -> f64 {
        let c = &self.coeffs;
        let scale = 0.5 * (self.b - self.a);
        c.iter()
            .enumerate()
            .step_by(2)
            .map(|(k, v)| v * 2.0 / (1.0 - (k * k) as f64))
            .sum::<f64>()
            * scale
    }
}

/// Chebyshev coefficients from samples at `cos(jπ/n)`, `j = 0..=n`.
fn coefficients(values: &[f64]) -> Vec<f64> {
    let n = values.len() - 1;
    let nf = n as f64;
    let table: Vec<f64> = (0..2 * n)
        .map(|m| (std::f64::consts::PI * m as f64 / nf).cos())
        .collect();
    (0..=n)
        .map(|k| {
            let mut s = 0.5 * (values[0] + if k % 2 == 0 { values[n] } else { -values[n] });
            for (j, v) in values.iter().enumerate().take(n).skip(1) {
                s += v * table[(j * k) % (2 * n)];
            }
            let c = 2.0 * s / nf;
            if k == 0 || k == n {
                0.5 * c
            } else {
                c
            }
        })
        .collect()
}

/// Piecewise Chebyshev representation of a function together with its
/// running integral from the left end of the first piece.
#[derive(Debug, Clone)]
pub struct PiecewiseChebyshev {
    breaks: Vec<f64>,
    pieces: Vec<Chebyshev>,
    primitives: Vec<Chebyshev>,
    offsets: Vec<f64>,
}

impl PiecewiseChebyshev {
    /// Fits `f` on each interval delimited by `breaks`, bisecting any piece
    /// that fails to converge at `max_degree`.
    pub fn fit<F>(mut f: F, breaks: &[f64], tol: f64, max_degree: usize) -> Result<Self>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        let mut stack: Vec<(f64, f64, u32)> = breaks
            .windows(2)
            .rev()
            .map(|w| (w[0], w[1], 0))
            .collect();
        let mut pieces = Vec::new();
        while let Some((a, b, depth)) = stack.pop() {
            let (cheb, ok) = Chebyshev::fit(&mut f, a, b, tol, max_degree)?;
            if ok || depth >= 12 {
                pieces.push(cheb);
            } else {
                let m = 0.5 * (a + b);
                stack.push((m, b, depth + 1));
                stack.push((a, m, depth + 1));
            }
        }
        let primitives: Vec<Chebyshev> = pieces.iter().map(Chebyshev::antiderivative).collect();
        let mut offsets = Vec::with_capacity(pieces.len());
        let mut acc = 0.0;
        for p in &primitives {
            offsets.push(acc);
            acc += p.eval(p.b);
        }
        let mut bs: Vec<f64> = pieces.iter().map(|p| p.a).collect();
        bs.push(pieces.last().map_or(0.0, |p| p.b));
        Ok(Self {
            breaks: bs,
            pieces,
            primitives,
            offsets,
        })
    }

    fn locate(&self, x: f64) -> usize {
        let k = self.breaks.partition_point(|&b| b <= x);
        k.saturating_sub(1).min(self.pieces.len() - 1)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.pieces[self.locate(x)].eval(x)
    }

    /// `∫_{start}^{x} f`, clamped to the fitted range.
    pub fn cumulative(&self, x: f64) -> f64 {
        let k = self.locate(x);
        self.offsets[k] + self.primitives[k].eval(x)
    }

    pub fn total(&self) -> f64 {
        self.cumulative(*self.breaks.last().unwrap())
    }

    pub fn pieces(&self) -> usize {
        self.pieces.len()
    }
}
