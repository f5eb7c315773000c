//! Concentration of the mixing density as n grows.
//!
//! In the high-temperature regime the mixing density concentrates around
//! m = 0: the mass outside a fixed ball of radius delta decays
//! exponentially in n. This example sweeps n for a fixed delta, prints the
//! tail mass, and estimates its exponential rate; it also shows the radial
//! profile at a fixed n through the tail as a function of delta.
//!
//! Run with: cargo run --example concentration_sweep

use cwlab::cli::concentration_sweep;
use cwlab::definetti::DeFinettiDensity;
use cwlab::model::{CouplingMatrix, GroupSizes, ModelSpec};

fn main() -> cwlab::Result<()> {
    let delta = 0.5;
    let sweep = [20, 40, 80, 160, 320];
    let model =
        ModelSpec::new(GroupSizes::new(vec![20])?, CouplingMatrix::homogeneous(1, 0.5)?)?;

    println!("single group, beta = 0.5, tail mass outside |m| <= {delta}:");
    let reports = concentration_sweep(&model, delta, &sweep, None)?;
    println!("  {:>5} {:>14} {:>16}", "n", "tail_mass", "ln(tail)/n");
    for r in &reports {
        println!("  {:>5} {:>14.6e} {:>16.6}", r.n, r.tail_mass, r.tail_mass.ln() / r.n as f64);
    }
    let rate = (reports[reports.len() - 1].tail_mass.ln() - reports[0].tail_mass.ln())
        / (sweep[sweep.len() - 1] - sweep[0]) as f64;
    println!("  fitted exponential rate d ln(tail) / dn = {rate:.4} (negative: exponential decay)");

    println!("\ntail profile at n = 80 as delta varies:");
    let spec80 =
        ModelSpec::new(GroupSizes::new(vec![80])?, CouplingMatrix::homogeneous(1, 0.5)?)?;
    let density = DeFinettiDensity::for_model(&spec80)?;
    for delta in [0.1, 0.25, 0.5, 0.75, 1.0] {
        let r = density.tail_mass(delta)?;
        println!("  delta = {delta:4}: tail mass = {:.6e}", r.tail_mass);
    }

    println!("\ntwo-group heterogeneous coupling, same effect in 2 dimensions:");
    let model2 = ModelSpec::new(
        GroupSizes::new(vec![10, 10])?,
        CouplingMatrix::heterogeneous(&[vec![0.5, 0.25], vec![0.25, 0.5]])?,
    )?;
    let reports = concentration_sweep(&model2, delta, &[20, 40, 80], None)?;
    for r in &reports {
        println!("  n = {:>3}: tail mass = {:.6e}", r.n, r.tail_mass);
    }
    Ok(())
}
