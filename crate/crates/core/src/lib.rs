//! Constructive nowhere-zero 3-flows on Cayley graphs of supersolvable groups.

pub mod cayley;
pub mod cli;
pub mod flow;
pub mod group;
pub mod ladders;
pub mod synth;
