//! Regime classification: where the high-temperature theory applies.
//!
//! Homogeneous couplings are high-temperature exactly when beta < 1. A
//! heterogeneous coupling J qualifies when J is positive definite and
//! H = J^{-1} - diag(alpha) is positive definite at the group weights
//! alpha. Inside the regime the scaled group sums have a limiting Gaussian
//! with covariance C = I + D H^{-1} D, D = diag(sqrt(alpha)).
//!
//! Run with: cargo run --example classify_regimes

use cwlab::model::CouplingMatrix;
use cwlab::regime::{classify, limit_covariance, ParameterPoint};

fn main() -> cwlab::Result<()> {
    println!("homogeneous couplings at uniform weights, d = 2");
    let alpha = ParameterPoint::uniform(2)?;
    for beta in [0.0, 0.5, 0.9, 1.0, 1.5] {
        let coupling = CouplingMatrix::homogeneous(2, beta)?;
        let decision = classify(&coupling, &alpha)?;
        print!("  beta = {beta:4}: {:?} ({})", decision.regime, decision.reason);
        match limit_covariance(&coupling, &alpha) {
            Ok(c) => println!("; C_11 = {:.6}, C_12 = {:.6}", c.get(0, 0), c.get(0, 1)),
            Err(e) => println!("; no limit covariance ({e})"),
        }
    }

    println!("\nheterogeneous couplings at uniform weights");
    let cases: Vec<(&str, CouplingMatrix)> = vec![
        (
            "J = [[1/2, 1/4], [1/4, 1/2]] (inside the regime)",
            CouplingMatrix::heterogeneous(&[vec![0.5, 0.25], vec![0.25, 0.5]])?,
        ),
        (
            "J = [[2, 1], [1, 2]] (J positive definite, H is not)",
            CouplingMatrix::heterogeneous(&[vec![2.0, 1.0], vec![1.0, 2.0]])?,
        ),
        (
            "J = [[0, 1], [1, 0]] (indefinite J)",
            CouplingMatrix::heterogeneous_indefinite(&[vec![0.0, 1.0], vec![1.0, 0.0]])?,
        ),
    ];
    for (label, coupling) in cases {
        let decision = classify(&coupling, &alpha)?;
        println!("  {label}");
        println!("    verdict: {:?} ({})", decision.regime, decision.reason);
        if decision.is_high_temperature() {
            let c = limit_covariance(&coupling, &alpha)?;
            println!(
                "    C = [[{:.6}, {:.6}], [{:.6}, {:.6}]]",
                c.get(0, 0),
                c.get(0, 1),
                c.get(1, 0),
                c.get(1, 1)
            );
        }
    }

    println!("\nunbalanced weights move the boundary");
    let coupling = CouplingMatrix::heterogeneous(&[vec![1.2, 0.1], vec![0.1, 1.2]])?;
    for weights in [vec![0.5, 0.5], vec![0.9, 0.1]] {
        let point = ParameterPoint::new(weights.clone())?;
        let decision = classify(&coupling, &point)?;
        println!("  alpha = {weights:?}: {:?} ({})", decision.regime, decision.reason);
    }
    Ok(())
}
