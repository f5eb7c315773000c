//! Exact finite-size distribution of the group magnetization vector, its
//! moments and characteristic function, local limit comparison against the
//! asymptotic Gaussian, and Fourier inversion.
//!
//! The distribution lives on the grid of magnetization states (see
//! [`crate::model`]); probabilities are kept in log space and normalized
//! with a deterministic chunked log-sum-exp, so results do not depend on the
//! rayon thread count.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{CwError, Result};
use crate::linalg::SquareMatrix;
use crate::model::{
    log_weight, scaled_point, state_at, state_index, GroupSizes, MagnetizationState, ModelSpec,
};
use crate::numeric::{log_sum_exp, KahanSum, REDUCE_CHUNK};
use crate::regime::GaussianEvaluator;

/// Refuse to enumerate more states than this without an explicit cap.
pub const DEFAULT_STATE_CAP: usize = 100_000_000;

/// Configuration-level (2^n) enumeration is limited to this many spins.
pub const BRUTE_FORCE_MAX_SPINS: u64 = 24;

/// Gaussian density below this is treated as zero when choosing the lattice
/// window for the local limit comparison.
pub const TRUNC_DENSITY: f64 = 1e-16;

/// Normalized probability table over the magnetization grid, indexed in
/// enumeration order (see [`crate::model::state_at`]).
#[derive(Clone, Debug)]
pub struct PmfTable {
    groups: GroupSizes,
    log_probs: Vec<f64>,
    log_z: f64,
}

impl PmfTable {
    /// Normalize a vector of log weights (enumeration order).
    pub fn from_log_weights(groups: GroupSizes, log_weights: Vec<f64>) -> Result<Self> {
        let expected = groups
            .state_count()
            .ok_or_else(|| CwError::ResourceLimit("state count overflows usize".into()))?;
        if log_weights.len() != expected {
            return Err(CwError::InvalidInput(format!(
                "{} log weights for {} states",
                log_weights.len(),
                expected
            )));
        }
        let log_z = log_sum_exp(&log_weights);
        if !log_z.is_finite() {
            return Err(CwError::Divergence(format!("normalizer log_z = {log_z}")));
        }
        let log_probs = log_weights.into_iter().map(|lw| lw - log_z).collect();
        Ok(Self { groups, log_probs, log_z })
    }

    /// Empirical table from per-state sample counts; states never visited get
    /// probability zero (log probability -inf).
    pub fn from_counts(groups: GroupSizes, counts: &[u64]) -> Result<Self> {
        let log_weights: Vec<f64> = counts
            .iter()
            .map(|&c| if c == 0 { f64::NEG_INFINITY } else { (c as f64).ln() })
            .collect();
        Self::from_log_weights(groups, log_weights)
    }

    pub fn groups(&self) -> &GroupSizes {
        &self.groups
    }

    pub fn len(&self) -> usize {
        self.log_probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_probs.is_empty()
    }

    pub fn log_probs(&self) -> &[f64] {
        &self.log_probs
    }

    pub fn log_prob(&self, index: usize) -> f64 {
        self.log_probs[index]
    }

    pub fn prob(&self, index: usize) -> f64 {
        self.log_probs[index].exp()
    }

    /// Log of the normalizer of the weights this table was built from.
    pub fn log_z(&self) -> f64 {
        self.log_z
    }

    pub fn state(&self, index: usize) -> MagnetizationState {
        state_at(&self.groups, index)
    }

    /// Probability of a specific magnetization state.
    pub fn prob_of(&self, state: &MagnetizationState) -> f64 {
        self.prob(state_index(&self.groups, state))
    }

    /// Largest absolute probability difference against another table on the
    /// same grid.
    pub fn max_abs_prob_diff(&self, other: &PmfTable) -> Result<f64> {
        if self.groups != other.groups {
            return Err(CwError::InvalidInput("tables live on different grids".into()));
        }
        Ok(self
            .log_probs
            .iter()
            .zip(&other.log_probs)
            .map(|(&a, &b)| (a.exp() - b.exp()).abs())
            .fold(0.0, f64::max))
    }
}

/// Exact pmf by enumerating the magnetization grid.
pub fn exact_pmf(spec: &ModelSpec) -> Result<PmfTable> {
    exact_pmf_with_cap(spec, DEFAULT_STATE_CAP)
}

pub fn exact_pmf_with_cap(spec: &ModelSpec, state_cap: usize) -> Result<PmfTable> {
    let count = spec
        .groups
        .state_count()
        .filter(|&c| c <= state_cap)
        .ok_or_else(|| {
            CwError::ResourceLimit(format!(
                "state grid for sizes {:?} exceeds cap {state_cap}",
                spec.groups.sizes()
            ))
        })?;
    let log_weights: Vec<f64> = (0..count)
        .into_par_iter()
        .map(|i| log_weight(spec, &state_at(&spec.groups, i)))
        .collect();
    PmfTable::from_log_weights(spec.groups.clone(), log_weights)
}

/// Independent oracle: enumerate all 2^n spin configurations and bucket the
/// Boltzmann weights by magnetization state. Exponential cost, so only for
/// small n; used to validate `exact_pmf`, which goes through binomial
/// multiplicities instead.
pub fn brute_force_pmf(spec: &ModelSpec) -> Result<PmfTable> {
    let n = spec.groups.total();
    if n > BRUTE_FORCE_MAX_SPINS {
        return Err(CwError::ResourceLimit(format!(
            "{n} spins exceed the 2^n enumeration limit of {BRUTE_FORCE_MAX_SPINS}"
        )));
    }
    let count = spec.groups.state_count().expect("small n");
    let dense = spec.coupling.dense();
    let total = n as f64;
    let mut buckets = vec![KahanSum::new(); count];
    for mask in 0u64..(1u64 << n) {
        // group sums straight from the bits of the configuration index
        let mut sums = Vec::with_capacity(spec.dim());
        let mut offset = 0u32;
        for &size in spec.groups.sizes() {
            let chunk = (mask >> offset) & ((1u64 << size) - 1);
            let ups = chunk.count_ones() as i64;
            sums.push(2 * ups - size as i64);
            offset += size;
        }
        let s: Vec<f64> = sums.iter().map(|&v| v as f64).collect();
        let energy = -dense.quadratic_form(&s) / (2.0 * total);
        let state = MagnetizationState::new(&spec.groups, sums).expect("sums in range");
        buckets[state_index(&spec.groups, &state)].add((-energy).exp());
    }
    let log_weights = buckets.into_iter().map(|b| b.value().ln()).collect();
    PmfTable::from_log_weights(spec.groups.clone(), log_weights)
}

/// Mean and covariance of the scaled magnetization (S_a / sqrt(n_a)).
#[derive(Clone, Debug)]
pub struct Moments {
    pub mean: Vec<f64>,
    pub covariance: SquareMatrix,
}

/// Two-pass moments of the scaled magnetization under a pmf table.
pub fn moments(table: &PmfTable) -> Moments {
    let groups = table.groups();
    let d = groups.dim();
    let mut mean_acc = vec![KahanSum::new(); d];
    for (i, &lp) in table.log_probs().iter().enumerate() {
        if lp == f64::NEG_INFINITY {
            continue;
        }
        let p = lp.exp();
        let x = scaled_point(groups, &state_at(groups, i));
        for a in 0..d {
            mean_acc[a].add(p * x[a]);
        }
    }
    let mean: Vec<f64> = mean_acc.into_iter().map(|k| k.value()).collect();

    let mut cov_acc = vec![KahanSum::new(); d * d];
    for (i, &lp) in table.log_probs().iter().enumerate() {
        if lp == f64::NEG_INFINITY {
            continue;
        }
        let p = lp.exp();
        let x = scaled_point(groups, &state_at(groups, i));
        for a in 0..d {
            for b in 0..d {
                cov_acc[a * d + b].add(p * (x[a] - mean[a]) * (x[b] - mean[b]));
            }
        }
    }
    let mut covariance = SquareMatrix::zero(d);
    for a in 0..d {
        for b in 0..d {
            covariance.set(a, b, cov_acc[a * d + b].value());
        }
    }
    Moments { mean, covariance }
}

/// Characteristic function of the scaled magnetization,
/// E exp(i t . S_scaled), evaluated exactly from the table.
pub fn charfn(table: &PmfTable, t: &[f64]) -> Complex64 {
    let groups = table.groups();
    assert_eq!(t.len(), groups.dim());
    let mut re = KahanSum::new();
    let mut im = KahanSum::new();
    for (i, &lp) in table.log_probs().iter().enumerate() {
        if lp == f64::NEG_INFINITY {
            continue;
        }
        let p = lp.exp();
        let x = scaled_point(groups, &state_at(groups, i));
        let phase: f64 = t.iter().zip(&x).map(|(a, b)| a * b).sum();
        re.add(p * phase.cos());
        im.add(p * phase.sin());
    }
    Complex64::new(re.value(), im.value())
}

/// Outcome of the local limit comparison for one model size.
#[derive(Clone, Debug)]
pub struct LcltReport {
    /// Total number of spins.
    pub n: u64,
    pub dim: usize,
    /// sup over the scaled lattice of |scaled pmf - gaussian density|.
    pub sup_error: f64,
    /// Scaled lattice point where the sup is attained.
    pub argmax: Vec<f64>,
    /// Max abs entry difference between the exact covariance of the scaled
    /// magnetization and the limiting covariance.
    pub cov_error: f64,
}

/// Compare the exact pmf against the limiting Gaussian in the local sense:
/// the pmf value at state s, scaled by prod_a sqrt(n_a) / 2^d (the inverse
/// lattice cell volume), against the Gaussian density at s_a / sqrt(n_a).
///
/// The sup runs over the whole shifted lattice prod_a (n_a + 2Z)/sqrt(n_a),
/// not just the support: outside the support the pmf is zero and the error
/// is the Gaussian density itself. Each axis is truncated where the Gaussian
/// falls below [`TRUNC_DENSITY`] (using a row-sum bound on the largest
/// covariance eigenvalue), never inside the support itself.
pub fn local_clt_error(table: &PmfTable, cov: &SquareMatrix) -> Result<LcltReport> {
    let groups = table.groups();
    let d = groups.dim();
    if cov.dim() != d {
        return Err(CwError::InvalidInput(format!(
            "covariance dimension {} does not match {d} groups",
            cov.dim()
        )));
    }
    let ev = GaussianEvaluator::new(cov)?;

    // truncation radius: density below TRUNC_DENSITY whenever |x|^2/2 >
    // lambda_max * (log peak - log trunc); Gershgorin row sums bound lambda_max
    let lambda_max = (0..d)
        .map(|a| (0..d).map(|b| cov.get(a, b).abs()).sum::<f64>())
        .fold(0.0f64, f64::max);
    let log_peak = ev.log_density(&vec![0.0; d]);
    let radius2 = 2.0 * lambda_max * (log_peak - TRUNC_DENSITY.ln()).max(0.0);
    let radius = radius2.sqrt();

    // per-axis window in spin units: all of the support, extended to the
    // truncation radius in scaled units, keeping the lattice parity
    let mut half_widths = Vec::with_capacity(d);
    for &n in groups.sizes() {
        let reach = (radius * (n as f64).sqrt()).ceil() as i64;
        let mut m = (n as i64).max(reach);
        if (m - n as i64) % 2 != 0 {
            m += 1;
        }
        half_widths.push(m);
    }
    let axis_points: Vec<i64> = half_widths.iter().map(|&m| m + 1).collect();
    let grid_len: i64 = axis_points.iter().product();
    let grid_len = grid_len as usize;

    let scale: f64 =
        groups.sizes().iter().map(|&n| (n as f64).sqrt()).product::<f64>() / (1u64 << d) as f64;

    // decode flat grid index -> lattice sums (row-major, last axis fastest)
    let decode = |flat: usize| -> Vec<i64> {
        let mut rem = flat as i64;
        let mut sums = vec![0i64; d];
        for a in (0..d).rev() {
            let q = axis_points[a];
            sums[a] = -half_widths[a] + 2 * (rem % q);
            rem /= q;
        }
        sums
    };

    let eval = |flat: usize| -> f64 {
        let sums = decode(flat);
        let x: Vec<f64> =
            sums.iter().zip(groups.sizes()).map(|(&s, &n)| s as f64 / (n as f64).sqrt()).collect();
        let gauss = ev.density(&x);
        let inside = sums.iter().zip(groups.sizes()).all(|(&s, &n)| s.abs() <= n as i64);
        let scaled_pmf = if inside {
            let k: Vec<u32> = sums
                .iter()
                .zip(groups.sizes())
                .map(|(&s, &n)| ((n as i64 + s) / 2) as u32)
                .collect();
            let mut idx = 0usize;
            for (a, &ka) in k.iter().enumerate() {
                idx = idx * (groups.size(a) as usize + 1) + ka as usize;
            }
            scale * table.prob(idx)
        } else {
            0.0
        };
        (scaled_pmf - gauss).abs()
    };

    // chunked parallel max with in-order merge; ties keep the earliest index
    let n_chunks = grid_len.div_ceil(REDUCE_CHUNK);
    let chunk_best: Vec<(f64, usize)> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * REDUCE_CHUNK;
            let hi = (lo + REDUCE_CHUNK).min(grid_len);
            let mut best = (f64::NEG_INFINITY, lo);
            for flat in lo..hi {
                let v = eval(flat);
                if v > best.0 {
                    best = (v, flat);
                }
            }
            best
        })
        .collect();
    let mut best = (f64::NEG_INFINITY, 0usize);
    for &(v, i) in &chunk_best {
        if v > best.0 {
            best = (v, i);
        }
    }

    let sums = decode(best.1);
    let argmax: Vec<f64> =
        sums.iter().zip(groups.sizes()).map(|(&s, &n)| s as f64 / (n as f64).sqrt()).collect();

    let mom = moments(table);
    let cov_error = mom.covariance.max_abs_diff(cov);

    Ok(LcltReport { n: groups.total(), dim: d, sup_error: best.0, argmax, cov_error })
}

/// Result of reconstructing one pmf value from the characteristic function.
#[derive(Clone, Debug)]
pub struct InversionReport {
    pub reconstructed: f64,
    pub exact: f64,
    pub abs_error: f64,
}

/// Fourier inversion of the characteristic function at a magnetization
/// state. Integrates phi(t) exp(-i t . x) over one period box
/// t_a in [-pi sqrt(n_a)/2, pi sqrt(n_a)/2] * 2 with a midpoint rule.
///
/// The integrand is a trigonometric polynomial whose highest per-axis
/// frequency index is n_a, so the rule is exact once the per-axis point
/// count exceeds n_a; counts below n_a + 1 are raised to n_a + 1.
pub fn inversion_check(
    table: &PmfTable,
    sums: &[i64],
    points_per_axis: usize,
) -> Result<InversionReport> {
    let groups = table.groups();
    let d = groups.dim();
    let state = MagnetizationState::new(groups, sums.to_vec())?;
    let x = scaled_point(groups, &state);

    // per-axis period of the integrand: 2 pi / spacing, spacing = 2/sqrt(n_a)
    let periods: Vec<f64> =
        groups.sizes().iter().map(|&n| std::f64::consts::PI * (n as f64).sqrt()).collect();
    let m: Vec<usize> =
        groups.sizes().iter().map(|&n| points_per_axis.max(n as usize + 1)).collect();
    let cell: f64 = periods.iter().zip(&m).map(|(p, &k)| p / k as f64).product();
    let grid_len: usize = m.iter().product();

    let eval = |flat: usize| -> Complex64 {
        let mut rem = flat;
        let mut t = vec![0.0f64; d];
        for a in (0..d).rev() {
            let idx = rem % m[a];
            rem /= m[a];
            t[a] = -0.5 * periods[a] + (idx as f64 + 0.5) * periods[a] / m[a] as f64;
        }
        let phase: f64 = t.iter().zip(&x).map(|(a, b)| a * b).sum();
        charfn(table, &t) * Complex64::new(0.0, -phase).exp()
    };

    let n_chunks = grid_len.div_ceil(REDUCE_CHUNK);
    let partials: Vec<(f64, f64)> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * REDUCE_CHUNK;
            let hi = (lo + REDUCE_CHUNK).min(grid_len);
            let mut re = KahanSum::new();
            let mut im = KahanSum::new();
            for flat in lo..hi {
                let v = eval(flat);
                re.add(v.re);
                im.add(v.im);
            }
            (re.value(), im.value())
        })
        .collect();
    let mut re = KahanSum::new();
    let mut im = KahanSum::new();
    for &(r, i) in &partials {
        re.add(r);
        im.add(i);
    }

    // prefactor: prod_a spacing_a / (2 pi) with spacing 2/sqrt(n_a)
    let prefactor: f64 = groups
        .sizes()
        .iter()
        .map(|&n| 1.0 / (std::f64::consts::PI * (n as f64).sqrt()))
        .product();
    let reconstructed = re.value() * cell * prefactor;
    let _imag_residual = im.value() * cell * prefactor;

    let exact = table.prob_of(&state);
    Ok(InversionReport { reconstructed, exact, abs_error: (reconstructed - exact).abs() })
}
