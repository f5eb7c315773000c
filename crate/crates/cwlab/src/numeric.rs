//! Scalar numerics shared across the crate: log-gamma, log-binomial,
//! overflow-safe ln cosh, compensated summation and deterministic
//! log-sum-exp reductions.
//!
//! All grid reductions here are bitwise independent of the worker thread
//! count: work is split into fixed-size chunks, each chunk is summed
//! sequentially, and chunk results are merged in chunk order.

use rayon::prelude::*;

/// Fixed chunk length for parallel reductions. Changing this constant changes
/// rounding at the 1e-16 level; it must never depend on the thread count.
pub const REDUCE_CHUNK: usize = 4096;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_7;

/// Stirling-series log-gamma for x > 0. Arguments below the series cutoff are
/// lifted with the recurrence ln G(x) = ln G(x+1) - ln x. Absolute accuracy is
/// a few ulps of the result, which keeps binomial log-weights stable enough
/// for the 1e-12 covariance checks at group sizes in the hundreds.
pub fn ln_gamma(x: f64) -> f64 {
    assert!(x > 0.0 && x.is_finite(), "ln_gamma needs x > 0, got {x}");
    const CUT: f64 = 12.0;
    let mut lift = 0.0;
    let mut z = x;
    while z < CUT {
        lift += z.ln();
        z += 1.0;
    }
    let inv = 1.0 / z;
    let inv2 = inv * inv;
    // Bernoulli tail 1/(12z) - 1/(360z^3) + 1/(1260z^5) - 1/(1680z^7) + 1/(1188z^9)
    let series = inv
        * (1.0 / 12.0
            + inv2
                * (-1.0 / 360.0
                    + inv2 * (1.0 / 1260.0 + inv2 * (-1.0 / 1680.0 + inv2 * (1.0 / 1188.0)))));
    (z - 0.5) * z.ln() - z + LN_SQRT_2PI + series - lift
}

/// ln C(n, k) via log-gamma. The symmetric grouping and the reduction to
/// min(k, n-k) make ln_choose(n, k) == ln_choose(n, n-k) bitwise, which in
/// turn makes enumerated log-weights exactly even under spin flip.
pub fn ln_choose(n: u64, k: u64) -> f64 {
    assert!(k <= n, "ln_choose needs k <= n, got k={k}, n={n}");
    let k = k.min(n - k);
    if k == 0 {
        return 0.0;
    }
    ln_gamma(n as f64 + 1.0) - (ln_gamma(k as f64 + 1.0) + ln_gamma((n - k) as f64 + 1.0))
}

/// Overflow-safe ln cosh m = |m| + ln(1 + exp(-2|m|)) - ln 2.
pub fn ln_cosh(m: f64) -> f64 {
    let a = m.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

/// ln(1 / (1 + exp(-x))), stable for large |x|. Note (1 + tanh m)/2 is the
/// logistic function evaluated at 2m, so this gives log success
/// probabilities without the 1 - tanh cancellation.
pub fn ln_sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        -(-x).exp().ln_1p()
    } else {
        x - x.exp().ln_1p()
    }
}

/// Kahan compensated accumulator.
#[derive(Clone, Copy, Debug, Default)]
pub struct KahanSum {
    sum: f64,
    c: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let y = x - self.c;
        let t = self.sum + y;
        self.c = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}

/// Streaming log-sum-exp: single pass, rescales when a new maximum appears.
/// Used where materializing all terms would be wasteful.
#[derive(Clone, Copy, Debug)]
pub struct StreamingLse {
    max: f64,
    sum: f64,
}

impl Default for StreamingLse {
    fn default() -> Self {
        Self { max: f64::NEG_INFINITY, sum: 0.0 }
    }
}

impl StreamingLse {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: f64) {
        if x == f64::NEG_INFINITY {
            return;
        }
        if x > self.max {
            self.sum = self.sum * (self.max - x).exp() + 1.0;
            self.max = x;
        } else {
            self.sum += (x - self.max).exp();
        }
    }

    pub fn value(&self) -> f64 {
        if self.max == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            self.max + self.sum.ln()
        }
    }
}

/// Max-shifted log-sum-exp over a slice. Parallel over fixed chunks with a
/// sequential in-order merge, so the result does not depend on thread count.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NEG_INFINITY;
    }
    let max = xs
        .par_chunks(REDUCE_CHUNK)
        .map(|c| c.iter().cloned().fold(f64::NEG_INFINITY, f64::max))
        .collect::<Vec<_>>()
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let partials: Vec<f64> = xs
        .par_chunks(REDUCE_CHUNK)
        .map(|chunk| {
            let mut acc = KahanSum::new();
            for &x in chunk {
                acc.add((x - max).exp());
            }
            acc.value()
        })
        .collect();
    let mut total = KahanSum::new();
    for p in partials {
        total.add(p);
    }
    max + total.value().ln()
}

/// Compensated sum of a slice, chunked the same way as `log_sum_exp`.
pub fn stable_sum(xs: &[f64]) -> f64 {
    let partials: Vec<f64> = xs
        .par_chunks(REDUCE_CHUNK)
        .map(|chunk| {
            let mut acc = KahanSum::new();
            for &x in chunk {
                acc.add(x);
            }
            acc.value()
        })
        .collect();
    let mut total = KahanSum::new();
    for p in partials {
        total.add(p);
    }
    total.value()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_gamma_matches_exact_factorials() {
        let mut fact = 1.0f64;
        for n in 1u32..=20 {
            fact *= n as f64;
            let err = (ln_gamma(n as f64 + 1.0) - fact.ln()).abs();
            assert!(err <= 1e-13 * fact.ln().abs().max(1.0), "n={n} err={err}");
        }
    }

    #[test]
    fn ln_gamma_half_integer() {
        // G(1/2) = sqrt(pi)
        let err = (ln_gamma(0.5) - 0.5 * std::f64::consts::PI.ln()).abs();
        assert!(err < 1e-14, "err={err}");
    }

    #[test]
    fn ln_choose_exact_small() {
        for n in 0u64..=30 {
            let mut c = 1.0f64;
            for k in 0..=n {
                let err = (ln_choose(n, k) - c.ln()).abs();
                assert!(err <= 2e-13, "n={n} k={k} err={err}");
                if k < n {
                    c = c * (n - k) as f64 / (k + 1) as f64;
                }
            }
        }
    }

    #[test]
    fn ln_choose_symmetry_is_bitwise() {
        for n in [7u64, 16, 101, 512, 1024] {
            for k in 0..=n {
                assert_eq!(ln_choose(n, k).to_bits(), ln_choose(n, n - k).to_bits());
            }
        }
    }

    #[test]
    fn ln_cosh_matches_naive_in_safe_range() {
        for i in 0..200 {
            let m = -5.0 + 0.05 * i as f64;
            let err = (ln_cosh(m) - m.cosh().ln()).abs();
            assert!(err < 1e-14, "m={m} err={err}");
        }
        // large argument where cosh overflows
        assert!((ln_cosh(800.0) - (800.0 - std::f64::consts::LN_2)).abs() < 1e-12);
    }

    #[test]
    fn ln_sigmoid_matches_tanh_form() {
        // (1 + tanh m)/2 = sigmoid(2m)
        for i in 0..100 {
            let m = -4.0 + 0.08 * i as f64;
            let p = 0.5 * (1.0 + m.tanh());
            assert!((ln_sigmoid(2.0 * m) - p.ln()).abs() < 1e-13, "m={m}");
        }
        assert_eq!(ln_sigmoid(0.0), -std::f64::consts::LN_2);
        // far tails stay finite and linear
        assert!((ln_sigmoid(-900.0) + 900.0).abs() < 1e-12);
        assert!(ln_sigmoid(900.0).abs() < 1e-300);
    }

    #[test]
    fn log_sum_exp_handles_shift_and_neg_inf() {
        let xs = [1000.0, 1000.0 + (2.0f64).ln(), f64::NEG_INFINITY];
        let got = log_sum_exp(&xs);
        let want = 1000.0 + (3.0f64).ln();
        assert!((got - want).abs() < 1e-12);
        assert_eq!(log_sum_exp(&[f64::NEG_INFINITY; 4]), f64::NEG_INFINITY);
    }

    #[test]
    fn streaming_lse_agrees_with_batch() {
        let xs: Vec<f64> = (0..10_000).map(|i| -((i as f64) * 0.01 - 30.0).powi(2)).collect();
        let mut s = StreamingLse::new();
        for &x in &xs {
            s.push(x);
        }
        assert!((s.value() - log_sum_exp(&xs)).abs() < 1e-11);
    }

    #[test]
    fn kahan_sum_is_compensated() {
        let mut acc = KahanSum::new();
        for _ in 0..1_000_000 {
            acc.add(0.1);
        }
        assert!((acc.value() - 100_000.0).abs() < 1e-9);
    }
}
