//! Mixture (de Finetti) representation of the model: the law of the spins is
//! an average of product Rademacher measures over a random mean parameter m.
//!
//! For a heterogeneous coupling J (invertible) the mixing density on R^d is
//! proportional to exp(-n (m' J^{-1} m / 2 - sum_a (n_a/n) ln cosh m_a)).
//! A homogeneous coupling makes every spin exchangeable with every other, so
//! the mixture runs over a single scalar m with density proportional to
//! exp(-n (m^2/(2 beta) - ln cosh m)), n the total spin count; beta = 0
//! degenerates to a point mass at m = 0 (independent fair spins).
//!
//! Given m, spins are independent with P(+1) = (1 + tanh m_a)/2, so group
//! counts are binomial. Everything downstream (normalization, tail mass,
//! pmf reconstruction, sampling) runs on a midpoint quadrature grid over a
//! box that is auto-expanded until the boundary is negligible.

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;

use crate::error::{CwError, Result};
use crate::exactdist::PmfTable;
use crate::linalg::{self, SquareMatrix};
use crate::model::{state_index, CouplingMatrix, GroupSizes, MagnetizationState, ModelSpec};
use crate::numeric::{ln_choose, ln_cosh, ln_sigmoid, log_sum_exp, KahanSum, StreamingLse};
use crate::rng::seeded;

/// Initial quadrature box half-width.
pub const BOX_START_HALF_WIDTH: f64 = 1.0;
/// Geometric growth factor of the box when the boundary is not negligible.
pub const BOX_EXPAND_FACTOR: f64 = 1.6;
/// Hard cap on the box half-width; reaching it means the density does not
/// decay (low-temperature or indefinite input) and normalization fails.
pub const BOX_MAX_HALF_WIDTH: f64 = 50.0;
/// Boundary cells must be below this fraction of the peak before the box is
/// accepted.
pub const BOX_BOUNDARY_RATIO: f64 = 1e-18;
/// Cap on the total number of quadrature cells.
pub const GRID_CELL_CAP: usize = 100_000_000;

/// Mixing distribution over the mean parameter.
#[derive(Clone, Debug)]
pub enum MixingLaw {
    /// beta = 0: point mass at m = 0, independent fair spins.
    PointMass { groups: GroupSizes },
    /// Homogeneous beta > 0: one scalar m shared by all groups.
    Scalar { beta: f64, groups: GroupSizes },
    /// Heterogeneous coupling: d-dimensional m, one component per group.
    Vector { j_inv: SquareMatrix, groups: GroupSizes },
}

/// Mixing law of a model. Heterogeneous couplings must be invertible.
pub fn mixing_law(spec: &ModelSpec) -> Result<MixingLaw> {
    let groups = spec.groups.clone();
    match &spec.coupling {
        CouplingMatrix::Homogeneous { beta, .. } => {
            if *beta == 0.0 {
                Ok(MixingLaw::PointMass { groups })
            } else {
                Ok(MixingLaw::Scalar { beta: *beta, groups })
            }
        }
        CouplingMatrix::Heterogeneous { entries, .. } => {
            let j_inv = linalg::inverse(entries)?;
            Ok(MixingLaw::Vector { j_inv, groups })
        }
    }
}

impl MixingLaw {
    pub fn groups(&self) -> &GroupSizes {
        match self {
            Self::PointMass { groups } | Self::Scalar { groups, .. } | Self::Vector { groups, .. } => {
                groups
            }
        }
    }

    /// Dimension of the mixing variable (1 for the shared scalar).
    pub fn dim(&self) -> usize {
        match self {
            Self::PointMass { .. } | Self::Scalar { .. } => 1,
            Self::Vector { j_inv, .. } => j_inv.dim(),
        }
    }

    pub fn is_point_mass(&self) -> bool {
        matches!(self, Self::PointMass { .. })
    }

    /// Unnormalized log density at m. The point mass has no density; callers
    /// branch on `is_point_mass` first.
    fn log_density_unnorm_at(&self, m: &[f64]) -> f64 {
        match self {
            Self::PointMass { .. } => f64::NEG_INFINITY,
            Self::Scalar { beta, groups } => {
                log_density_unnorm_1d(*beta, groups.total(), m[0]).expect("beta > 0 by construction")
            }
            Self::Vector { j_inv, groups } => {
                let n = groups.total() as f64;
                let quad = j_inv.quadratic_form(m);
                let mut lc = 0.0;
                for (&size, &ma) in groups.sizes().iter().zip(m) {
                    lc += size as f64 * ln_cosh(ma);
                }
                -0.5 * n * quad + lc
            }
        }
    }
}

/// Unnormalized log mixing density for the shared scalar of a homogeneous
/// model: -n (m^2 / (2 beta) - ln cosh m), n the total spin count.
pub fn log_density_unnorm_1d(beta: f64, total_spins: u64, m: f64) -> Result<f64> {
    if !(beta > 0.0) {
        return Err(CwError::InvalidInput(format!(
            "scalar mixing density needs beta > 0, got {beta} (beta = 0 is a point mass)"
        )));
    }
    let n = total_spins as f64;
    Ok(-n * (m * m / (2.0 * beta) - ln_cosh(m)))
}

/// Unnormalized log mixing density of a heterogeneous model at m.
pub fn log_density_unnorm(spec: &ModelSpec, m: &[f64]) -> Result<f64> {
    match mixing_law(spec)? {
        law @ MixingLaw::Vector { .. } => {
            if m.len() != law.dim() {
                return Err(CwError::InvalidInput(format!(
                    "m has {} components, expected {}",
                    m.len(),
                    law.dim()
                )));
            }
            Ok(law.log_density_unnorm_at(m))
        }
        _ => Err(CwError::InvalidInput(
            "homogeneous coupling mixes over one scalar; use log_density_unnorm_1d".into(),
        )),
    }
}

/// Log of the scalar mixing density transformed by t = tanh m (unnormalized):
/// -n ((artanh t)^2 / (2 beta) + ln(1 - t^2)/2) - ln(1 - t^2), the last term
/// being the Jacobian dm/dt = 1/(1 - t^2).
pub fn substitution_log_density_1d(beta: f64, total_spins: u64, t: f64) -> Result<f64> {
    if !(t.abs() < 1.0) {
        return Err(CwError::InvalidInput(format!("need |t| < 1, got {t}")));
    }
    if !(beta > 0.0) {
        return Err(CwError::InvalidInput(format!("need beta > 0, got {beta}")));
    }
    let n = total_spins as f64;
    let a = t.atanh();
    let ln1mt2 = (1.0 - t * t).ln();
    Ok(-n * (a * a / (2.0 * beta) + 0.5 * ln1mt2) - ln1mt2)
}

/// Tail mass of the mixing law outside the centered box of half-width delta.
#[derive(Clone, Debug)]
pub struct ConcentrationReport {
    /// Total spin count of the underlying model.
    pub n: u64,
    pub delta: f64,
    pub tail_mass: f64,
}

/// Mixing density normalized by midpoint quadrature on an auto-expanded box.
#[derive(Clone, Debug)]
pub struct DeFinettiDensity {
    law: MixingLaw,
    half_width: f64,
    points_per_axis: usize,
    /// Log of the box integral of the unnormalized density.
    log_norm: f64,
    /// Unnormalized log density at cell centers, row-major, last axis
    /// fastest. Empty for the point mass.
    grid_log_f: Vec<f64>,
}

/// Per-axis resolution defaults balancing accuracy against the q^dim cost.
pub fn default_points_per_axis(dim: usize) -> usize {
    match dim {
        1 => 2048,
        2 => 256,
        3 => 64,
        _ => 24,
    }
}

impl DeFinettiDensity {
    /// Normalize the mixing law of a model at the default resolution.
    pub fn for_model(spec: &ModelSpec) -> Result<Self> {
        let law = mixing_law(spec)?;
        let q = default_points_per_axis(law.dim());
        Self::new(law, q)
    }

    /// Normalize a mixing law on points_per_axis^dim midpoint cells. The box
    /// starts at half-width 1 and grows by [`BOX_EXPAND_FACTOR`] until every
    /// boundary cell is below [`BOX_BOUNDARY_RATIO`] of the peak; reaching
    /// [`BOX_MAX_HALF_WIDTH`] is a divergence error.
    pub fn new(law: MixingLaw, points_per_axis: usize) -> Result<Self> {
        if law.is_point_mass() {
            return Ok(Self {
                law,
                half_width: 0.0,
                points_per_axis: 0,
                log_norm: 0.0,
                grid_log_f: Vec::new(),
            });
        }
        if points_per_axis < 8 {
            return Err(CwError::InvalidInput(format!(
                "need at least 8 points per axis, got {points_per_axis}"
            )));
        }
        let dim = law.dim();
        let cells = points_per_axis
            .checked_pow(dim as u32)
            .filter(|&c| c <= GRID_CELL_CAP)
            .ok_or_else(|| {
                CwError::ResourceLimit(format!(
                    "{points_per_axis}^{dim} quadrature cells exceed {GRID_CELL_CAP}"
                ))
            })?;

        let mut half_width = BOX_START_HALF_WIDTH;
        loop {
            let grid_log_f = eval_grid(&law, half_width, points_per_axis, cells);
            let peak = grid_log_f.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if !peak.is_finite() {
                return Err(CwError::Divergence(format!(
                    "mixing density peak is {peak} on the quadrature box"
                )));
            }
            let boundary = max_boundary(&grid_log_f, dim, points_per_axis);
            if boundary <= peak + BOX_BOUNDARY_RATIO.ln() {
                let cell_width = 2.0 * half_width / points_per_axis as f64;
                let log_norm = log_sum_exp(&grid_log_f) + dim as f64 * cell_width.ln();
                return Ok(Self { law, half_width, points_per_axis, log_norm, grid_log_f });
            }
            half_width *= BOX_EXPAND_FACTOR;
            if half_width > BOX_MAX_HALF_WIDTH {
                return Err(CwError::Divergence(format!(
                    "mixing density does not decay within half-width {BOX_MAX_HALF_WIDTH}; \
                     the model is outside the concentration regime"
                )));
            }
        }
    }

    pub fn law(&self) -> &MixingLaw {
        &self.law
    }

    pub fn groups(&self) -> &GroupSizes {
        self.law.groups()
    }

    pub fn dim(&self) -> usize {
        self.law.dim()
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn points_per_axis(&self) -> usize {
        self.points_per_axis
    }

    pub fn log_norm(&self) -> f64 {
        self.log_norm
    }

    /// Normalized log density at m (evaluated exactly, not interpolated).
    /// For the point mass this is -inf away from 0 and +inf at 0.
    pub fn log_density(&self, m: &[f64]) -> f64 {
        assert_eq!(m.len(), self.dim());
        if self.law.is_point_mass() {
            return if m.iter().all(|&x| x == 0.0) { f64::INFINITY } else { f64::NEG_INFINITY };
        }
        self.law.log_density_unnorm_at(m) - self.log_norm
    }

    /// Center coordinates of a flat cell index.
    fn cell_center(&self, flat: usize) -> Vec<f64> {
        let q = self.points_per_axis;
        let w = 2.0 * self.half_width / q as f64;
        let d = self.dim();
        let mut rem = flat;
        let mut m = vec![0.0; d];
        for a in (0..d).rev() {
            m[a] = -self.half_width + (rem % q) as f64 * w + 0.5 * w;
            rem /= q;
        }
        m
    }

    /// Quadrature mass outside [-delta, delta]^dim (cell-center rule).
    pub fn tail_mass(&self, delta: f64) -> Result<ConcentrationReport> {
        let n = self.groups().total();
        if self.law.is_point_mass() {
            if !(delta > 0.0) {
                return Err(CwError::InvalidInput(format!("need delta > 0, got {delta}")));
            }
            return Ok(ConcentrationReport { n, delta, tail_mass: 0.0 });
        }
        if !(delta > 0.0 && delta < self.half_width) {
            return Err(CwError::InvalidInput(format!(
                "delta must lie in (0, {}), got {delta}",
                self.half_width
            )));
        }
        let cell_vol = (2.0 * self.half_width / self.points_per_axis as f64).powi(self.dim() as i32);
        let mut acc = KahanSum::new();
        for (flat, &lf) in self.grid_log_f.iter().enumerate() {
            let m = self.cell_center(flat);
            if m.iter().any(|&x| x.abs() > delta) {
                acc.add((lf - self.log_norm).exp() * cell_vol);
            }
        }
        Ok(ConcentrationReport { n, delta, tail_mass: acc.value().clamp(0.0, 1.0) })
    }

    /// Reconstruct the exact pmf as the quadrature mixture of binomial
    /// product measures: P(s) = integral of prod_a C(n_a,k_a) p_a^{k_a}
    /// (1-p_a)^{n_a-k_a} d mu(m) with p_a = (1 + tanh m_a)/2 (the scalar law
    /// broadcasts one m to every group). The result is renormalized, which
    /// absorbs the quadrature error in the normalizer itself.
    pub fn mixture_pmf(&self) -> Result<PmfTable> {
        let groups = self.groups().clone();
        let state_count = groups
            .state_count()
            .filter(|&c| c <= GRID_CELL_CAP)
            .ok_or_else(|| CwError::ResourceLimit("state grid too large".into()))?;

        match &self.law {
            MixingLaw::PointMass { .. } => {
                let n = groups.total() as f64;
                let log_weights: Vec<f64> = (0..state_count)
                    .map(|i| {
                        let st = crate::model::state_at(&groups, i);
                        let mut lw = -n * std::f64::consts::LN_2;
                        for (&s, &size) in st.sums().iter().zip(groups.sizes()) {
                            lw += ln_choose(size as u64, ((size as i64 + s) / 2) as u64);
                        }
                        lw
                    })
                    .collect();
                PmfTable::from_log_weights(groups, log_weights)
            }
            MixingLaw::Scalar { .. } => {
                // one shared m: the binomial factor depends on the total
                // up-count only, so precompute per-cell log p / log(1-p)
                let q = self.points_per_axis;
                let cell_w = 2.0 * self.half_width / q as f64;
                let n_total = groups.total() as f64;
                let mut base = Vec::with_capacity(q);
                for (i, &lf) in self.grid_log_f.iter().enumerate() {
                    let m = -self.half_width + (i as f64 + 0.5) * cell_w;
                    base.push((lf - self.log_norm + cell_w.ln(), ln_sigmoid(2.0 * m), ln_sigmoid(-2.0 * m)));
                }
                let log_weights: Vec<f64> = (0..state_count)
                    .into_par_iter()
                    .map(|idx| {
                        let st = crate::model::state_at(&groups, idx);
                        let mut ln_c = 0.0;
                        let mut k_total = 0.0;
                        for (&s, &size) in st.sums().iter().zip(groups.sizes()) {
                            let k = ((size as i64 + s) / 2) as u64;
                            ln_c += ln_choose(size as u64, k);
                            k_total += k as f64;
                        }
                        let mut lse = StreamingLse::new();
                        for &(b, lp, lq) in &base {
                            lse.push(b + k_total * lp + (n_total - k_total) * lq);
                        }
                        ln_c + lse.value()
                    })
                    .collect();
                PmfTable::from_log_weights(groups, log_weights)
            }
            MixingLaw::Vector { .. } => {
                let q = self.points_per_axis;
                let d = self.dim();
                let cell_w = 2.0 * self.half_width / q as f64;
                let peak = self.grid_log_f.iter().copied().fold(f64::NEG_INFINITY, f64::max);

                // per-axis binomial tables in linear space; the grid weights
                // exp(log f - peak) span at most the boundary ratio, so the
                // contraction below never loses mass to underflow at the
                // absolute accuracy the reconstruction is used at
                let mut btabs: Vec<Vec<f64>> = Vec::with_capacity(d);
                for (a, &size) in groups.sizes().iter().enumerate() {
                    let _ = a;
                    let nk = size as usize + 1;
                    let mut tab = vec![0.0f64; q * nk];
                    for i in 0..q {
                        let m = -self.half_width + (i as f64 + 0.5) * cell_w;
                        let lp = ln_sigmoid(2.0 * m);
                        let lq = ln_sigmoid(-2.0 * m);
                        for k in 0..nk {
                            let lw = ln_choose(size as u64, k as u64)
                                + k as f64 * lp
                                + (size as usize - k) as f64 * lq;
                            tab[i * nk + k] = lw.exp();
                        }
                    }
                    btabs.push(tab);
                }
                let f_lin: Vec<f64> = self.grid_log_f.iter().map(|&lf| (lf - peak).exp()).collect();
                let sizes: Vec<usize> = groups.sizes().iter().map(|&s| s as usize + 1).collect();
                let contracted = contract_axes(&f_lin, q, &btabs, &sizes);
                debug_assert_eq!(contracted.len(), state_count);

                let shift = peak - self.log_norm + d as f64 * cell_w.ln();
                let log_weights: Vec<f64> =
                    contracted.into_iter().map(|v| v.ln() + shift).collect();
                PmfTable::from_log_weights(groups, log_weights)
            }
        }
    }

    /// Draw magnetization states: m from the cell-discretized mixing law
    /// (inverse CDF over cells, uniform within the chosen cell), then one
    /// binomial count per group. Per sample the draw order is fixed: cell,
    /// per-axis jitter, then per-group binomial.
    pub fn sample_states(&self, count: usize, seed: u64) -> Vec<MagnetizationState> {
        let groups = self.groups().clone();
        let mut rng = seeded(seed);
        let mut out = Vec::with_capacity(count);

        // cell CDF in linear space relative to the peak
        let (cdf, total) = if self.law.is_point_mass() {
            (Vec::new(), 0.0)
        } else {
            let peak = self.grid_log_f.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let mut acc = 0.0;
            let cdf: Vec<f64> = self
                .grid_log_f
                .iter()
                .map(|&lf| {
                    acc += (lf - peak).exp();
                    acc
                })
                .collect();
            (cdf, acc)
        };

        let q = self.points_per_axis;
        let cell_w = if q > 0 { 2.0 * self.half_width / q as f64 } else { 0.0 };
        for _ in 0..count {
            let m: Vec<f64> = if self.law.is_point_mass() {
                vec![0.0]
            } else {
                let u = rng.random::<f64>() * total;
                let cell = cdf.partition_point(|&c| c < u).min(cdf.len() - 1);
                let center = self.cell_center(cell);
                center
                    .into_iter()
                    .map(|c| c + (rng.random::<f64>() - 0.5) * cell_w)
                    .collect()
            };
            let mut counts = Vec::with_capacity(groups.dim());
            for (a, &size) in groups.sizes().iter().enumerate() {
                let ma = if m.len() == 1 { m[0] } else { m[a] };
                let p = 1.0 / (1.0 + (-2.0 * ma).exp());
                let k = Binomial::new(size as u64, p)
                    .expect("p in (0,1)")
                    .sample(&mut rng);
                counts.push(k as u32);
            }
            out.push(MagnetizationState::from_counts(&groups, &counts));
        }
        out
    }

    /// Empirical pmf of `sample_states` draws.
    pub fn sample_pmf(&self, count: usize, seed: u64) -> Result<PmfTable> {
        if count == 0 {
            return Err(CwError::InvalidInput("need at least one sample".into()));
        }
        let groups = self.groups().clone();
        let state_count = groups
            .state_count()
            .ok_or_else(|| CwError::ResourceLimit("state grid too large".into()))?;
        let mut counts = vec![0u64; state_count];
        for st in self.sample_states(count, seed) {
            counts[state_index(&groups, &st)] += 1;
        }
        PmfTable::from_counts(groups, &counts)
    }
}

/// Evaluate the unnormalized log density at all cell centers.
fn eval_grid(law: &MixingLaw, half_width: f64, q: usize, cells: usize) -> Vec<f64> {
    let d = law.dim();
    let w = 2.0 * half_width / q as f64;
    (0..cells)
        .into_par_iter()
        .map(|flat| {
            let mut rem = flat;
            let mut m = vec![0.0; d];
            for a in (0..d).rev() {
                m[a] = -half_width + (rem % q) as f64 * w + 0.5 * w;
                rem /= q;
            }
            law.log_density_unnorm_at(&m)
        })
        .collect()
}

/// Max log density over cells touching the box boundary (any axis index 0 or
/// q-1).
fn max_boundary(grid: &[f64], dim: usize, q: usize) -> f64 {
    let mut best = f64::NEG_INFINITY;
    for (flat, &v) in grid.iter().enumerate() {
        let mut rem = flat;
        let mut on_boundary = false;
        for _ in 0..dim {
            let idx = rem % q;
            rem /= q;
            if idx == 0 || idx == q - 1 {
                on_boundary = true;
                break;
            }
        }
        if on_boundary && v > best {
            best = v;
        }
    }
    best
}

/// Contract F[i_0, ..., i_{r-1}] (flat, row-major, each axis q cells) against
/// per-axis tables B_a[i][k] to produce R[k_0, ..., k_{r-1}] =
/// sum over cells of F * prod_a B_a[i_a][k_a], row-major in the k indices.
/// Axis 0 slabs of F are contiguous, so the recursion walks slabs in order
/// and stays deterministic.
fn contract_axes(f: &[f64], q: usize, btabs: &[Vec<f64>], sizes: &[usize]) -> Vec<f64> {
    if btabs.is_empty() {
        debug_assert_eq!(f.len(), 1);
        return vec![f[0]];
    }
    let nk = sizes[0];
    let slab = f.len() / q;
    let inner_len: usize = sizes[1..].iter().product();
    let mut out = vec![0.0f64; nk * inner_len];
    for i in 0..q {
        let inner = contract_axes(&f[i * slab..(i + 1) * slab], q, &btabs[1..], &sizes[1..]);
        for k in 0..nk {
            let b = btabs[0][i * nk + k];
            if b == 0.0 {
                continue;
            }
            let dst = &mut out[k * inner_len..(k + 1) * inner_len];
            for (o, &v) in dst.iter_mut().zip(&inner) {
                *o += b * v;
            }
        }
    }
    out
}
