use surface_threshold::eem::{EdgeFamily, EdgeSet, EffectiveParams};
use surface_threshold::rbim::Adjacency;
use surface_threshold::validation::run_oracle_suite;
use surface_threshold::CodeLayout;

use crate::CliError;

/// Prints one line per check; fails naming every failing check.
pub fn validate(adjacency: Adjacency) -> Result<(), CliError> {
    let report = run_oracle_suite(adjacency)?;
    for c in &report {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    let failed: Vec<&str> = report.iter().filter(|c| !c.passed).map(|c| c.name).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Check(format!("failing checks: {}", failed.join(", "))))
    }
}

pub fn layout(d: usize, p1: f64, p2: f64) -> Result<(), CliError> {
    let layout = CodeLayout::new(d)?;
    print!("{}", layout.describe());
    let edges = EdgeSet::build(&layout);
    let params = EffectiveParams::new(p1, p2)?;
    println!("# error-edge map at p1 = {p1}, p2 = {p2}");
    println!("boundary_node {}", edges.boundary_node());
    for family in [EdgeFamily::L1, EdgeFamily::L2, EdgeFamily::L3] {
        println!("{} edges {}", family.label(), edges.count(family));
    }
    println!(
        "pbar {} {} {}\ncouplings J1 {} J2' {} J3' {}\nbeta_N {} T_N {}",
        params.pbar1,
        params.pbar2,
        params.pbar3,
        params.j1,
        params.j2p,
        params.j3p,
        params.beta_n,
        params.nishimori_temperature()
    );
    for (e, edge) in edges.edges().iter().enumerate() {
        println!(
            "edge {e} {} ends {} {} support {:?} pbar {}",
            edge.family.label(),
            edge.ends[0],
            edge.ends[1],
            edge.support,
            edges.edge_probability(e, &params)
        );
    }
    Ok(())
}
