//! Triangle counting and minimum removal on small hosts.
//!
//!     cargo run --example hypergraph_removal

use aml::budget::Budget;
use aml::rational::Rational;
use aml::regularity::{count_copies, parse_hypergraph, remove_copies, Hypergraph};

const TWO: &str = include_str!("../data/two-triangles.hg");

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let budget = Budget::default();
    let tri = Hypergraph::triangle();
    let hosts = [
        ("K3", Hypergraph::complete(3, 2)?),
        ("two triangles", parse_hypergraph(TWO)?),
        ("K5", Hypergraph::complete(5, 2)?),
        ("K4^(3)", Hypergraph::complete(4, 3)?),
    ];
    for (name, host) in &hosts {
        let pattern = if host.uniformity() == 2 { tri.clone() } else { Hypergraph::complete(4, 3)? };
        let before = count_copies(&pattern, host, &budget)?;
        let (after, r) = remove_copies(&pattern, host, &Rational::new(1, 10), &budget)?;
        println!(
            "{name}: {before} labeled copies, removed {:?} (optimal {}), {} left",
            r.removed,
            r.optimal,
            count_copies(&pattern, &after, &budget)?
        );
    }
    Ok(())
}
