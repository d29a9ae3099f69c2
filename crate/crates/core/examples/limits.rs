//! Truth profiles and limiting measures along structure families.
//!
//!     cargo run --example limits

use aml::budget::Budget;
use aml::limits::{limit_measure, truth_profile, LimitOptions, Rule, StructureFamily, DEFAULT_SLACK};
use aml::parser::parse_formula;
use aml::rational::Rational;
use aml::syntax::Cmp;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let budget = Budget::default();
    let zn = StructureFamily::cyclic(1, 30, 1, vec![("P".into(), Rule::Involution)])?;
    let probe = zn.structure(1)?;
    let sig = probe.signature();

    let s = parse_formula("m[x] <= 1/3 . (x = e)", sig)?;
    println!("{}: {}", zn.description(), truth_profile(&zn, &s, DEFAULT_SLACK, &budget)?.verdict);
    let s = parse_formula("exists x . P(x)", sig)?;
    println!("exists involution: {}", truth_profile(&zn, &s, DEFAULT_SLACK, &budget)?.verdict);

    let phi = parse_formula("x = e", sig)?;
    let lm = limit_measure(&zn, &phi, &["x".into()], &Rational::zero(), &LimitOptions::default(), &budget)?;
    println!(
        "mu(x = e) -> {:?} with flag {:?}; m[x] <= 0 in the limit: {:?}",
        lm.limit.as_ref().map(|r| r.to_string()),
        lm.flag.as_ref().map(|f| f.to_string()),
        lm.induced(Cmp::Le)
    );

    let z2n = StructureFamily::cyclic(1, 15, 2, vec![("Ev".into(), Rule::Even)])?;
    let ev = parse_formula("Ev(x)", z2n.structure(1)?.signature())?;
    let lm = limit_measure(&z2n, &ev, &["x".into()], &Rational::new(1, 2), &LimitOptions::default(), &budget)?;
    println!("even elements of Z_2n: {:?} ({:?})", lm.limit.as_ref().map(|r| r.to_string()), lm.behaviour);
    Ok(())
}
