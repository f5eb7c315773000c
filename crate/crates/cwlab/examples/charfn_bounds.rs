//! Ingredients of the local limit proof: characteristic-function bounds.
//!
//! A Rademacher variable with mean m_bar = tanh(m) has |phi(u)| =
//! sqrt(cos^2 u + m_bar^2 sin^2 u). Three facts make the Fourier argument
//! work, and all three are checkable numerically:
//!
//!   1. a Gaussian domination |phi(u)| <= exp(-(1 - m_bar^2) u^2 / 4),
//!      valid on a finite frequency window uniformly in m;
//!   2. away from u = 0 the modulus stays below theta(m, delta) < 1, with
//!      a closed form for the sup over delta <= |u| <= pi/2;
//!   3. the peripheral integral of |phi| over one period box outside a
//!      central window (the B_n diagnostic) vanishes as n grows, which is
//!      what kills the non-Gaussian part of the inversion integral.
//!
//! Run with: cargo run --example charfn_bounds

use cwlab::bounds::{
    bn_integral_diagnostic, charfn_modulus, gaussian_bound_margin, margin_scan, s_bound, theta,
    theta_grid_search, RademacherParam, SplitParams, BOUND_WINDOW_M, BOUND_WINDOW_U,
};
use cwlab::exactdist::exact_pmf;
use cwlab::model::{CouplingMatrix, GroupSizes, ModelSpec};

fn main() -> cwlab::Result<()> {
    println!(
        "Gaussian bound margin on the documented window |m| <= {BOUND_WINDOW_M}, |u| <= {BOUND_WINDOW_U}:"
    );
    let rows = margin_scan(BOUND_WINDOW_M, BOUND_WINDOW_U, 100, 100)?;
    let min = rows.iter().map(|r| r.margin).fold(f64::INFINITY, f64::min);
    let max = rows.iter().map(|r| r.margin).fold(f64::NEG_INFINITY, f64::max);
    println!("  scan of {} grid points: margin in [{min:.3e}, {max:.3e}] - never negative", rows.len());
    let outside = gaussian_bound_margin(RademacherParam::new(3.0), std::f64::consts::FRAC_PI_2);
    println!("  outside the window (m = 3, u = pi/2) the bound fails: margin = {outside:.3e}");

    println!("\nmodulus versus bound along m = 0.8:");
    let p = RademacherParam::new(0.8);
    for u in [0.0, 0.35, 0.7, 1.05, 1.39] {
        println!(
            "  u = {u:4}: |phi| = {:.6}, bound = {:.6}, margin = {:+.3e}",
            charfn_modulus(p, u),
            charfn_modulus(p, u) + gaussian_bound_margin(p, u),
            gaussian_bound_margin(p, u)
        );
    }

    println!("\ntheta(m, delta) = sup of |phi| over delta <= |u| <= pi/2:");
    for (m, delta) in [(0.0, 0.5), (0.8, 0.5), (0.8, 1.2), (2.0, 0.5)] {
        let p = RademacherParam::new(m);
        let closed = theta(p, delta)?;
        let grid = theta_grid_search(p, delta, 20_001)?;
        println!(
            "  m = {m:3}, delta = {delta:3}: closed form = {closed:.12}, grid search = {grid:.12}, gap = {:.1e}",
            (closed - grid).abs()
        );
    }
    println!(
        "  uniform version for |m| <= tau: s_bound(tau = 0.9, delta = 0.5) = {:.12} < 1",
        s_bound(0.9, 0.5)?
    );

    println!("\nperipheral integral diagnostic (delta = 0.5, tau = 0.5), homogeneous beta = 0.5:");
    let split = SplitParams::new(0.5, 0.5)?;
    for n in [8u32, 16, 32, 64, 128] {
        let spec =
            ModelSpec::new(GroupSizes::new(vec![n])?, CouplingMatrix::homogeneous(1, 0.5)?)?;
        let table = exact_pmf(&spec)?;
        println!("  n = {n:>3}: B_n = {:.6e}", bn_integral_diagnostic(&table, &split));
    }
    println!("  (decays with n: only the central window survives in the inversion integral)");
    Ok(())
}
