//! Temperature-regime classification and the limiting Gaussian.
//!
//! For a homogeneous coupling beta the model has a central limit regime
//! exactly when beta < 1. For a heterogeneous coupling J (positive definite)
//! with group weights alpha_a = n_a / n, the criterion is positive
//! definiteness of H = J^{-1} - diag(alpha).
//!
//! Inside the regime the scaled group sums S_a / sqrt(n_a) converge to a
//! centered Gaussian with covariance
//! C = I + D H^{-1} D, where D = diag(sqrt(alpha_a)); for the homogeneous
//! case H^{-1} collapses to (beta / (1 - beta)) * ones.

use crate::error::{CwError, Result};
use crate::linalg::{self, Cholesky, SquareMatrix};
use crate::model::{CouplingMatrix, GroupSizes};

/// Group weights must sum to one within this tolerance.
pub const ALPHA_SUM_TOL: f64 = 1e-12;

/// Relative group weights alpha_a > 0 with sum 1.
#[derive(Clone, Debug, PartialEq)]
pub struct ParameterPoint {
    alpha: Vec<f64>,
}

impl ParameterPoint {
    pub fn new(alpha: Vec<f64>) -> Result<Self> {
        if alpha.is_empty() {
            return Err(CwError::InvalidInput("need at least one weight".into()));
        }
        if alpha.iter().any(|&a| !(a > 0.0) || !a.is_finite()) {
            return Err(CwError::InvalidInput("weights must be positive and finite".into()));
        }
        let sum: f64 = alpha.iter().sum();
        if (sum - 1.0).abs() > ALPHA_SUM_TOL {
            return Err(CwError::InvalidInput(format!(
                "weights sum to {sum}, expected 1 within {ALPHA_SUM_TOL:e}"
            )));
        }
        Ok(Self { alpha })
    }

    pub fn uniform(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(CwError::InvalidInput("need at least one weight".into()));
        }
        Ok(Self { alpha: vec![1.0 / dim as f64; dim] })
    }

    pub fn dim(&self) -> usize {
        self.alpha.len()
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }
}

/// Weights realized by a concrete size vector, alpha_a = n_a / n.
pub fn empirical_alpha(groups: &GroupSizes) -> ParameterPoint {
    let n = groups.total() as f64;
    ParameterPoint { alpha: groups.sizes().iter().map(|&s| s as f64 / n).collect() }
}

/// Sizes n_a ~ alpha_a * n by largest remainder, each group at least one
/// spin. Deterministic: remainder ties go to the lower group index.
pub fn group_sizes_for(point: &ParameterPoint, total: u64) -> Result<GroupSizes> {
    let d = point.dim();
    if total < d as u64 {
        return Err(CwError::InvalidInput(format!(
            "cannot split {total} spins into {d} nonempty groups"
        )));
    }
    let mut sizes: Vec<u64> = Vec::with_capacity(d);
    let mut fracs: Vec<(usize, f64)> = Vec::with_capacity(d);
    for (i, &a) in point.alpha().iter().enumerate() {
        let exact = a * total as f64;
        let fl = exact.floor();
        sizes.push(fl as u64);
        fracs.push((i, exact - fl));
    }
    let assigned: u64 = sizes.iter().sum();
    let mut leftover = total - assigned.min(total);
    fracs.sort_by(|x, y| y.1.partial_cmp(&x.1).unwrap().then(x.0.cmp(&y.0)));
    for &(i, _) in fracs.iter().cycle() {
        if leftover == 0 {
            break;
        }
        sizes[i] += 1;
        leftover -= 1;
    }
    // largest remainder can starve a group entirely; take from the largest
    while sizes.contains(&0) {
        let empty = sizes.iter().position(|&s| s == 0).unwrap();
        let donor = (0..d).max_by_key(|&i| sizes[i]).unwrap();
        sizes[donor] -= 1;
        sizes[empty] += 1;
    }
    debug_assert_eq!(sizes.iter().sum::<u64>(), total);
    GroupSizes::new(sizes.into_iter().map(|s| s as u32).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    HighTemperature,
    Other,
}

#[derive(Clone, Debug)]
pub struct RegimeDecision {
    pub regime: Regime,
    /// Human-readable criterion that decided the verdict.
    pub reason: String,
    /// H = J^{-1} - diag(alpha), present for heterogeneous couplings with
    /// invertible J.
    pub hessian: Option<SquareMatrix>,
}

impl RegimeDecision {
    pub fn is_high_temperature(&self) -> bool {
        self.regime == Regime::HighTemperature
    }
}

/// Decide the temperature regime of a coupling at given group weights.
pub fn classify(coupling: &CouplingMatrix, point: &ParameterPoint) -> Result<RegimeDecision> {
    if coupling.dim() != point.dim() {
        return Err(CwError::InvalidInput(format!(
            "coupling dimension {} does not match {} weights",
            coupling.dim(),
            point.dim()
        )));
    }
    match coupling {
        CouplingMatrix::Homogeneous { beta, .. } => {
            let (regime, reason) = if *beta < 1.0 {
                (Regime::HighTemperature, format!("beta = {beta} < 1"))
            } else {
                (Regime::Other, format!("beta = {beta} >= 1"))
            };
            Ok(RegimeDecision { regime, reason, hessian: None })
        }
        CouplingMatrix::Heterogeneous { entries, .. } => {
            if linalg::cholesky(entries).is_err() {
                return Ok(RegimeDecision {
                    regime: Regime::Other,
                    reason: "coupling matrix is not positive definite".into(),
                    hessian: None,
                });
            }
            let h = hessian(entries, point)?;
            match linalg::cholesky(&h) {
                Ok(_) => Ok(RegimeDecision {
                    regime: Regime::HighTemperature,
                    reason: "H = J^-1 - diag(alpha) is positive definite".into(),
                    hessian: Some(h),
                }),
                Err(minor) => Ok(RegimeDecision {
                    regime: Regime::Other,
                    reason: format!(
                        "H = J^-1 - diag(alpha) is not positive definite (leading minor {minor})"
                    ),
                    hessian: Some(h),
                }),
            }
        }
    }
}

/// H = J^{-1} - diag(alpha). Requires invertible J.
pub fn hessian(coupling: &SquareMatrix, point: &ParameterPoint) -> Result<SquareMatrix> {
    let mut h = linalg::inverse(coupling)?;
    for (a, &alpha) in point.alpha().iter().enumerate() {
        h.set(a, a, h.get(a, a) - alpha);
    }
    Ok(h)
}

/// Covariance of the limiting Gaussian for the scaled sums S_a / sqrt(n_a):
/// C = I + D H^{-1} D with D = diag(sqrt(alpha_a)). Errors with
/// `OutsideRegime` when the coupling is not in the high-temperature regime
/// at this parameter point.
pub fn limit_covariance(
    coupling: &CouplingMatrix,
    point: &ParameterPoint,
) -> Result<SquareMatrix> {
    let decision = classify(coupling, point)?;
    if !decision.is_high_temperature() {
        return Err(CwError::OutsideRegime(decision.reason));
    }
    let d = point.dim();
    let alpha = point.alpha();
    match coupling {
        CouplingMatrix::Homogeneous { beta, .. } => {
            // H^{-1} has the constant entry beta / (1 - beta)
            let factor = beta / (1.0 - beta);
            let mut c = SquareMatrix::identity(d);
            for a in 0..d {
                for b in 0..d {
                    let v = c.get(a, b) + factor * (alpha[a] * alpha[b]).sqrt();
                    c.set(a, b, v);
                }
            }
            Ok(c)
        }
        CouplingMatrix::Heterogeneous { .. } => {
            let h = decision.hessian.expect("heterogeneous decision carries H");
            let h_inv = linalg::inverse(&h)?;
            let mut c = SquareMatrix::identity(d);
            for a in 0..d {
                for b in 0..d {
                    let v = c.get(a, b) + (alpha[a] * alpha[b]).sqrt() * h_inv.get(a, b);
                    c.set(a, b, v);
                }
            }
            Ok(c)
        }
    }
}

/// Centered Gaussian density with a fixed covariance, factored once for
/// repeated evaluation.
pub struct GaussianEvaluator {
    chol: Cholesky,
    log_norm: f64,
    dim: usize,
}

impl GaussianEvaluator {
    pub fn new(cov: &SquareMatrix) -> Result<Self> {
        let chol = linalg::cholesky(cov)
            .map_err(|minor| CwError::NotPositiveDefinite { leading_minor: minor })?;
        let d = cov.dim() as f64;
        let log_norm = -0.5 * (d * (2.0 * std::f64::consts::PI).ln() + chol.log_det());
        Ok(Self { chol, log_norm, dim: cov.dim() })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn log_density(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.dim);
        // x^T C^{-1} x via the triangular solve
        let y = self.chol.solve(x);
        let quad: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
        self.log_norm - 0.5 * quad
    }

    pub fn density(&self, x: &[f64]) -> f64 {
        self.log_density(x).exp()
    }
}

/// One-off density evaluation; prefer `GaussianEvaluator` in loops.
pub fn gaussian_density(cov: &SquareMatrix, x: &[f64]) -> Result<f64> {
    Ok(GaussianEvaluator::new(cov)?.density(x))
}
