//! Analytic ingredients behind the local limit theorem, made numerical:
//! characteristic functions of centred Rademacher variables, the
//! Gaussian-type modulus bound with its verified validity window, the decay
//! envelopes theta and s away from lattice periods, lattice periodicity of
//! the model characteristic function, and the peripheral-region integral
//! diagnostic.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{CwError, Result};
use crate::exactdist::{charfn, PmfTable};
use crate::numeric::{KahanSum, REDUCE_CHUNK};

/// Half-width of the m range on which the Gaussian-type bound is asserted.
pub const BOUND_WINDOW_M: f64 = 3.0;

/// Half-width of the u range on which the Gaussian-type bound is asserted.
/// The bound exp(-(1-m_bar^2) u^2 / 4) >= |phi(u)| needs sin^2 u >= u^2 / 2
/// as |m_bar| -> 1, which fails past u ~ 1.3916; 1.39 keeps a positive
/// margin for every m (minimum ~ 5e-7 on the scan grid), so this window is
/// deliberately narrower than a quarter period.
pub const BOUND_WINDOW_U: f64 = 1.39;

/// Mean parameter of a (centred) Rademacher variable: P(+1) = (1 + tanh m)/2
/// and the variable is shifted by its mean m_bar = tanh m.
#[derive(Clone, Copy, Debug)]
pub struct RademacherParam {
    pub m: f64,
    pub m_bar: f64,
}

impl RademacherParam {
    pub fn new(m: f64) -> Self {
        Self { m, m_bar: m.tanh() }
    }
}

/// Angular split parameters: the inversion box is cut into a central region
/// (|u| < delta per axis, Gaussian bound applies) and the periphery (theta
/// bound applies). tau bounds the |m| box on which s takes the sup.
#[derive(Clone, Copy, Debug)]
pub struct SplitParams {
    delta: f64,
    tau: f64,
}

impl SplitParams {
    pub fn new(delta: f64, tau: f64) -> Result<Self> {
        if !(delta > 0.0 && delta < std::f64::consts::FRAC_PI_2) {
            return Err(CwError::InvalidInput(format!(
                "delta must lie in (0, pi/2), got {delta}"
            )));
        }
        if !(tau > 0.0 && tau < 1.0) {
            return Err(CwError::InvalidInput(format!("tau must lie in (0, 1), got {tau}")));
        }
        Ok(Self { delta, tau })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }
}

/// E exp(iu (X - m_bar)) = e^{-iu m_bar} (cos u + i m_bar sin u).
pub fn rademacher_charfn(p: RademacherParam, u: f64) -> Complex64 {
    let rot = Complex64::new(0.0, -u * p.m_bar).exp();
    rot * Complex64::new(u.cos(), p.m_bar * u.sin())
}

/// |rademacher_charfn| = sqrt(cos^2 u + m_bar^2 sin^2 u), computed without
/// going through the complex value.
pub fn charfn_modulus(p: RademacherParam, u: f64) -> f64 {
    let (s, c) = u.sin_cos();
    (c * c + p.m_bar * p.m_bar * s * s).sqrt()
}

/// Margin of the Gaussian-type bound: exp(-(1-m_bar^2) u^2 / 4) minus the
/// modulus. Nonnegative on the documented window |m| <= BOUND_WINDOW_M,
/// |u| <= BOUND_WINDOW_U; genuinely negative near (3, pi/2).
pub fn gaussian_bound_margin(p: RademacherParam, u: f64) -> f64 {
    let bound = (-(1.0 - p.m_bar * p.m_bar) * u * u / 4.0).exp();
    bound - charfn_modulus(p, u)
}

/// sup over |u| in [delta, pi/2] of the Rademacher modulus. The modulus is
/// decreasing in sin^2 u, so the sup sits at |u| = delta and has the closed
/// form sqrt(1 - (1 - m_bar^2) sin^2 delta); strictly below 1 for finite m.
/// delta = pi/2 (a single-point sup) is allowed.
pub fn theta(p: RademacherParam, delta: f64) -> Result<f64> {
    if !(delta > 0.0 && delta <= std::f64::consts::FRAC_PI_2) {
        return Err(CwError::InvalidInput(format!(
            "delta must lie in (0, pi/2], got {delta}"
        )));
    }
    let s = delta.sin();
    Ok((1.0 - (1.0 - p.m_bar * p.m_bar) * s * s).sqrt())
}

/// Brute-force counterpart of [`theta`]: maximize the modulus on a uniform
/// u grid over [delta, pi/2] (endpoints included). Test oracle.
pub fn theta_grid_search(p: RademacherParam, delta: f64, points: usize) -> Result<f64> {
    if !(delta > 0.0 && delta <= std::f64::consts::FRAC_PI_2) {
        return Err(CwError::InvalidInput(format!(
            "delta must lie in (0, pi/2], got {delta}"
        )));
    }
    if points < 2 {
        return Err(CwError::InvalidInput("need at least 2 grid points".into()));
    }
    let hi = std::f64::consts::FRAC_PI_2;
    let mut best = f64::NEG_INFINITY;
    for i in 0..points {
        let u = delta + (hi - delta) * i as f64 / (points - 1) as f64;
        best = best.max(charfn_modulus(p, u));
    }
    Ok(best)
}

/// sup over |m| <= tau of theta(m, delta); theta increases in |m_bar| and
/// hence in |m|, so this is theta at m = tau. Strictly below 1 for
/// tau in (0,1). The closed endpoint delta = pi/2 gives exactly tanh tau.
pub fn s_bound(tau: f64, delta: f64) -> Result<f64> {
    if !(tau > 0.0 && tau < 1.0) {
        return Err(CwError::InvalidInput(format!("tau must lie in (0, 1), got {tau}")));
    }
    theta(RademacherParam::new(tau), delta)
}

/// |phi(t + period * k) - phi(t)| where the per-axis period of the scaled
/// magnetization lattice (spacing 2 / sqrt(n_a)) is pi * sqrt(n_a).
///
/// The shift multiplies each pmf term by (-1)^{sum_a k_a s_a}; since s_a has
/// the parity of n_a this is the constant (-1)^{sum_a k_a n_a}, so the
/// residual vanishes exactly when sum_a k_a n_a is even (always, for even
/// group sizes) and the modulus is shift-invariant for every parity.
pub fn periodicity_residual(table: &PmfTable, t: &[f64], k: &[i64]) -> f64 {
    let groups = table.groups();
    assert_eq!(t.len(), groups.dim());
    assert_eq!(k.len(), groups.dim());
    let shifted: Vec<f64> = t
        .iter()
        .zip(k)
        .zip(groups.sizes())
        .map(|((&ta, &ka), &n)| ta + std::f64::consts::PI * ka as f64 * (n as f64).sqrt())
        .collect();
    (charfn(table, &shifted) - charfn(table, t)).norm()
}

/// Quadrature mass of |phi| over the peripheral region: the inversion box
/// prod_a [-pi sqrt(n_a)/2, pi sqrt(n_a)/2] minus the central box
/// prod_a [-delta sqrt(n_a), delta sqrt(n_a)].
///
/// One midpoint grid covers the full box and only cells whose center lies
/// outside the central box contribute, so the result is a direct sum of
/// nonnegative terms (no cancellation between two quadratures). Per-axis
/// resolution grows like sqrt(n_a). Shrinks fast along doubling-n sweeps in
/// the high-temperature regime; that decay is the quantity of interest.
pub fn bn_integral_diagnostic(table: &PmfTable, split: &SplitParams) -> f64 {
    let groups = table.groups();
    let d = groups.dim();
    let delta = split.delta();

    let mut half_box = Vec::with_capacity(d);
    let mut inner = Vec::with_capacity(d);
    let mut points = Vec::with_capacity(d);
    for &n in groups.sizes() {
        let root = (n as f64).sqrt();
        half_box.push(std::f64::consts::FRAC_PI_2 * root);
        inner.push(delta * root);
        points.push(((16.0 * root).ceil() as usize).max(256));
    }
    let cell_vol: f64 =
        half_box.iter().zip(&points).map(|(&h, &q)| 2.0 * h / q as f64).product();
    let grid_len: usize = points.iter().product();

    let eval = |flat: usize| -> f64 {
        let mut rem = flat;
        let mut t = vec![0.0f64; d];
        let mut outside = false;
        for a in (0..d).rev() {
            let idx = rem % points[a];
            rem /= points[a];
            let w = 2.0 * half_box[a] / points[a] as f64;
            t[a] = -half_box[a] + (idx as f64 + 0.5) * w;
            if t[a].abs() > inner[a] {
                outside = true;
            }
        }
        if outside {
            charfn(table, &t).norm()
        } else {
            0.0
        }
    };

    let n_chunks = grid_len.div_ceil(REDUCE_CHUNK);
    let partials: Vec<f64> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * REDUCE_CHUNK;
            let hi = (lo + REDUCE_CHUNK).min(grid_len);
            let mut acc = KahanSum::new();
            for flat in lo..hi {
                acc.add(eval(flat));
            }
            acc.value()
        })
        .collect();
    let mut acc = KahanSum::new();
    for &p in &partials {
        acc.add(p);
    }
    acc.value() * cell_vol
}

/// One grid point of the bound scan export.
#[derive(Clone, Debug)]
pub struct MarginRow {
    pub m: f64,
    pub u: f64,
    pub charfn_modulus: f64,
    pub bound: f64,
    pub margin: f64,
}

/// Evaluate bound and modulus on the inclusive grid
/// [-m_half, m_half] x [-u_half, u_half], m outer and u inner, row-major.
pub fn margin_scan(
    m_half: f64,
    u_half: f64,
    points_m: usize,
    points_u: usize,
) -> Result<Vec<MarginRow>> {
    if points_m < 2 || points_u < 2 {
        return Err(CwError::InvalidInput("need at least a 2x2 scan grid".into()));
    }
    if !(m_half > 0.0 && u_half > 0.0) {
        return Err(CwError::InvalidInput("scan window half-widths must be positive".into()));
    }
    let mut rows = Vec::with_capacity(points_m * points_u);
    for i in 0..points_m {
        let m = -m_half + 2.0 * m_half * i as f64 / (points_m - 1) as f64;
        let p = RademacherParam::new(m);
        for j in 0..points_u {
            let u = -u_half + 2.0 * u_half * j as f64 / (points_u - 1) as f64;
            let modulus = charfn_modulus(p, u);
            let bound = (-(1.0 - p.m_bar * p.m_bar) * u * u / 4.0).exp();
            rows.push(MarginRow { m, u, charfn_modulus: modulus, bound, margin: bound - modulus });
        }
    }
    Ok(rows)
}
