//! Energy-increment regularization of the bundled 16-vertex graph and a
//! single exact regularity check.
//!
//!     cargo run --example regularity_partition

use aml::budget::Budget;
use aml::rational::Rational;
use aml::regularity::{is_epsilon_regular, parse_graph, regularity_partition, RegularityMode, DEFAULT_EXACT_CAP};

const G16: &str = include_str!("../data/g16.graph");

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = parse_graph(G16)?;
    let eps = Rational::new(1, 3);
    let budget = Budget::default();
    let report = regularity_partition(&g, &eps, 2, 64, DEFAULT_EXACT_CAP, &budget)?;
    for (i, part) in report.partition.parts.iter().enumerate() {
        println!("U{i} = {part:?}");
    }
    for step in &report.partition.log {
        println!(
            "step {} -> {} parts, energy {} -> {}",
            step.parts_before, step.parts_after, step.energy_before, step.energy_after
        );
    }
    println!(
        "irregular mass {}/{} ({:?})",
        report.irregular_mass,
        report.total_mass(),
        report.outcome
    );

    let left: Vec<usize> = (0..8).collect();
    let right: Vec<usize> = (8..16).collect();
    let v = is_epsilon_regular(&g, &left, &right, &eps, RegularityMode::Exact, &budget)?;
    println!("halves: {v}");
    Ok(())
}
