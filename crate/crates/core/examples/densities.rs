//! Finite upper Banach density and the Furstenberg correspondence bound.
//!
//!     cargo run --example densities

use std::collections::BTreeSet;

use aml::budget::Budget;
use aml::limits::{banach_density, furstenberg_check};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let evens: BTreeSet<usize> = (1..=10).filter(|x| x % 2 == 0).collect();
    for l in [1, 2, 3, 5] {
        println!("evens in [1,10], L_min = {l}: {}", banach_density(&evens, 10, l)?);
    }

    let squares: BTreeSet<usize> = (1..=14).map(|x| x * x).filter(|&x| x <= 200).collect();
    let budget = Budget::default();
    for shifts in [vec![0], vec![0, 3], vec![0, 2, 4]] {
        let u: BTreeSet<usize> = shifts.iter().copied().collect();
        let r = furstenberg_check(&evens, 10, &u, &budget)?;
        println!(
            "evens, U = {shifts:?}: cyclic {} window {} bound {} holds {}",
            r.cyclic, r.window, r.bound, r.holds()
        );
        let r = furstenberg_check(&squares, 200, &u, &budget)?;
        println!("squares, U = {shifts:?}: cyclic {} window {} holds {}", r.cyclic, r.window, r.holds());
    }
    Ok(())
}
