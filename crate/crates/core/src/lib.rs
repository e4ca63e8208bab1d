//! Shifts of finite type on `Z^d`: syntaxes and local admissibility,
//! exact pattern counts with certified entropy bounds, substitutions,
//! board geometry, pruning machines and entropy realization brackets.

pub mod alphabet;
pub mod basex;
pub mod builtin;
mod csp;
pub mod error;
pub mod counting;
pub mod exact;
pub mod geometry;
pub mod io;
pub mod irreducible;
pub mod lattice;
pub mod machine;
pub mod recode;
pub mod realization;
pub mod region;
pub mod substitution;
pub mod syntax;

pub use alphabet::{Alphabet, Symbol};
pub use error::{Error, Result};
pub use exact::Enclosure;
pub use lattice::{Pattern, Point, Shape};
pub use recode::recode_one_step;
pub use region::enumerate_locally_admissible;
pub use syntax::{apply_block_map, BlockMap, Mode, Syntax};
pub use basex::LevelColoring;
pub use counting::Limits;
pub use geometry::BoardSpec;
pub use machine::{RSeq, TuringMachine};
pub use realization::TargetSpec;
pub use substitution::SubstitutionRule;
