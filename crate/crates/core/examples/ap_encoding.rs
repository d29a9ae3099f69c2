//! Three-term progressions in a set, counted directly and as copies of a
//! simplex pattern in the encoding hypergraph.
//!
//!     cargo run --example ap_encoding

use std::collections::BTreeSet;

use aml::budget::Budget;
use aml::regularity::{ap_encode, direct_ap_count, progressions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let budget = Budget::default();
    for (a, n) in [(vec![1, 2, 3], 3), (vec![1, 3, 5, 6], 6), (vec![1, 2, 4, 5], 5)] {
        let set: BTreeSet<usize> = a.iter().copied().collect();
        let enc = ap_encode(&a, n, 2, &budget)?;
        let (copies, degenerate) = enc.count_pattern_copies(&budget)?;
        println!(
            "A = {a:?}: progressions {:?}; {} edges; copies {copies} (+{degenerate} with d = 0); direct {}",
            progressions(&set, 2),
            enc.hypergraph.edge_count(),
            direct_ap_count(&a, n, 2)?
        );
    }
    Ok(())
}
