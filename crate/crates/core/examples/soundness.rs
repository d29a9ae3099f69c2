//! Seeded soundness check of the axiom schemes on a few random structures.
//!
//!     cargo run --example soundness

use aml::axioms::{check_soundness, InstanceGenerator, SchemeGroup};
use aml::budget::Budget;
use aml::random::random_structure;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let budget = Budget::default();
    let groups = [SchemeGroup::Aml, SchemeGroup::I, SchemeGroup::F, SchemeGroup::FPlus];
    for size in 2..=5 {
        let m = random_structure(&mut rng, size)?;
        let mut gen = InstanceGenerator::new(size as u64);
        let instances = gen.generate_many(&m, &groups, 40, &budget)?;
        let report = check_soundness(&m, &instances, &budget)?;
        println!("|M| = {size}: {}/{} hold", report.held(), report.total());
        if let Some(inst) = instances.first() {
            println!("    e.g. {}", inst.summary());
        }
    }
    Ok(())
}
