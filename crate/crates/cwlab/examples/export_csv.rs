//! CSV emission: the same artifacts the command-line tool writes.
//!
//! Every report type has one writer with a fixed header and 17-significant-
//! digit floats, so reruns are byte-identical and downstream plotting
//! scripts can rely on the schema. This example produces each artifact into
//! a temporary directory and prints the first lines.
//!
//! Run with: cargo run --example export_csv

use cwlab::cli::lclt_sweep;
use cwlab::definetti::DeFinettiDensity;
use cwlab::exactdist::exact_pmf;
use cwlab::export::{
    write_density_csv, write_lclt_csv, write_pmf_csv, write_pmf_csv_with_meta,
};
use cwlab::mcmc::{run, ChainConfig};
use cwlab::model::{CouplingMatrix, GroupSizes, ModelSpec};
use cwlab::regime::ParameterPoint;

fn preview(path: &std::path::Path, lines: usize) {
    println!("--- {} ---", path.file_name().unwrap().to_string_lossy());
    let text = std::fs::read_to_string(path).unwrap();
    for line in text.lines().take(lines) {
        println!("{line}");
    }
    println!("({} rows)\n", text.lines().count() - 1);
}

fn main() -> cwlab::Result<()> {
    let dir = std::env::temp_dir().join("cwlab_export_example");
    std::fs::create_dir_all(&dir)?;

    let spec = ModelSpec::new(
        GroupSizes::new(vec![4, 3])?,
        CouplingMatrix::homogeneous(2, 0.5)?,
    )?;

    let pmf_path = dir.join("pmf.csv");
    write_pmf_csv(&pmf_path, &exact_pmf(&spec)?)?;
    preview(&pmf_path, 4);

    let lclt_path = dir.join("lclt.csv");
    let reports = lclt_sweep(
        &spec.coupling,
        &ParameterPoint::uniform(2)?,
        &[8, 16, 32],
    )?;
    write_lclt_csv(&lclt_path, &reports)?;
    preview(&lclt_path, 4);

    let density_path = dir.join("definetti_density.csv");
    let density = DeFinettiDensity::new(cwlab::definetti::mixing_law(&spec)?, 64)?;
    write_density_csv(&density_path, &density)?;
    preview(&density_path, 4);

    let mcmc_path = dir.join("mcmc_empirical.csv");
    let chain = ChainConfig::with_defaults(&spec.groups, 11, 500);
    let table = run(&spec, &chain)?;
    let meta = format!(
        "seed={},burn_in={},thin={},samples={}",
        chain.seed, chain.burn_in, chain.thin, chain.samples
    );
    write_pmf_csv_with_meta(&mcmc_path, &table, &meta)?;
    preview(&mcmc_path, 4);

    println!("artifacts written under {}", dir.display());
    Ok(())
}
