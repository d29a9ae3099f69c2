//! Gowers norms on a cyclic group, the box norm of the summed function, its
//! dual, and the positivity criterion on Z_2 × Z_2.
//!
//!     cargo run --example gowers_norms

use aml::budget::Budget;
use aml::gowers::{
    dual_function, gowers_box_pow, gowers_norm_pow, gowers_norm_pow_subst, positivity_criterion, root_display,
    AbelianGroup, GridFunction,
};
use aml::rational::Rational;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let budget = Budget::default();
    let z5 = AbelianGroup::cyclic(5);
    let g = GridFunction::new(5, 1, ["1", "1/2", "0", "-1/2", "-1"].iter().map(|s| s.parse()).collect::<Result<_, _>>()?)?;
    for k in 1..=3 {
        let p = gowers_norm_pow(&z5, &g, k, &budget)?;
        assert_eq!(p, gowers_norm_pow_subst(&z5, &g, k, &budget)?);
        println!("U^{k} power = {p}  (norm ~ {})", root_display(&p, k));
    }

    let f = GridFunction::sum_composition(&z5, &g, 2)?;
    let d = dual_function(&f, &budget)?;
    println!("box power = {}, <f, D f> = {}", gowers_box_pow(&f, &budget)?, f.inner(&d)?);

    let one = Rational::one();
    let diag = GridFunction::new(2, 2, vec![one.clone(), -one.clone(), -one.clone(), one])?;
    let p = positivity_criterion(&diag, &budget)?;
    println!("diagonal sign pattern: norm positive {}, correlation found {:?}", p.norm_positive, p.correlation_found);
    if let Some(w) = p.witness {
        println!("    cylinder witness {w:?}");
    }
    Ok(())
}
