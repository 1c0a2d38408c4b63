//! Decorated bounded quantification: syntax, rule systems, derivation
//! checking, algorithmic subtyping, minimal typing, proof search, fragment
//! elaboration and the encoding into meet types.

pub mod algo;
pub mod check;
pub mod deriv;
pub mod encode;
pub mod fragments;
pub mod gen;
pub mod json;
pub mod oracle;
pub mod surface;
pub mod syntax;
pub mod system;
pub mod wf;

pub use deriv::{Derivation, Judgment, RuleId};
pub use syntax::{alpha_eq, Context, Entry, Flavor, Name, Term, Type};
pub use system::{RuleSystem, SubRule, SystemId};
