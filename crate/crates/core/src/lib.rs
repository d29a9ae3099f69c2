//! Approximate measure logic over finite measured structures.

pub mod parser;
pub mod rational;
pub mod structures;
pub mod syntax;
pub mod budget;
pub mod semantics;
pub mod random;
pub mod axioms;
pub mod gowers;
pub mod regularity;
pub mod limits;
pub mod cli;
