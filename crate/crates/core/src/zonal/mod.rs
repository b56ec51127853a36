//! Zonal functions and measures on `S^(n-1)`: representations, the operators `A1`, `A2`,
//! `box_n`, Funk–Hecke analysis and synthesis, and cap masses.

mod analysis;
mod ops;
mod profile;

pub use analysis::*;
pub use ops::*;
pub use profile::*;
