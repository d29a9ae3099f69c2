//! Parse a structure file, evaluate measure formulae, and print the trace of
//! every measure subevaluation.
//!
//!     cargo run --example eval_measure

use aml::parser::{parse_formula, parse_structure, print_structure};
use aml::semantics::{eval_with, extension, EvalOptions, Valuation};

const Z4: &str = include_str!("../data/z4.struct");
const WEIGHTED: &str = include_str!("../data/weighted.struct");

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let z4 = parse_structure(Z4)?;
    let opts = EvalOptions { trace: true, ..EvalOptions::default() };
    for text in [
        "m[x] <= 1/4 . (x = e)",
        "m[x] < 1/4 . (x = e)",
        "forall y . m[x] < 1/2 . (mul(x,x) = y)",
        "m[x,y] >= 1/4 . (mul(x,y) = e)",
    ] {
        let f = parse_formula(text, z4.signature())?;
        let r = eval_with(&z4, &f, &Valuation::new(), &opts)?;
        println!("Z4 |= {text}: {}", r.value);
        for ev in &r.trace {
            println!("    {ev}");
        }
    }

    let w = parse_structure(WEIGHTED)?;
    print!("{}", print_structure(&w));
    let f = parse_formula("exists y . E(x, y)", w.signature())?;
    let set = extension(&w, &f, &["x".to_string()], &Valuation::new())?;
    println!("E-sources: {:?}, measure {}", set.tuples().collect::<Vec<_>>(), set.measure());
    let s = Valuation::new().with("z", 2);
    let f = parse_formula("m[x] > 1/3 . E(x, z)", w.signature())?;
    println!("m[x] > 1/3 . E(x, z) at z = 2: {}", eval_with(&w, &f, &s, &EvalOptions::default())?.value);
    Ok(())
}
