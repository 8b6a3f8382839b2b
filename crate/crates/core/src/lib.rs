//! Finite Kripke models, NNIL formulas and the tools around them: subframe
//! formulas of finite models, refutation by monotonic maps, the universal
//! model for NNIL, color-preserving reductions and an IPC prover.

pub mod acceptance;
pub mod beta;
pub mod corpus;
pub mod error;
pub mod fmp;
pub mod formula;
pub mod kripke;
pub mod morphisms;
pub mod prover;
pub mod random;
pub mod universal;

pub use error::{Error, Result};
pub use formula::{parse, parse_extending, to_nnil_normal_form, Formula, VarContext};
pub use kripke::{CanonicalCode, Color, KripkeFrame, KripkeModel, Tree};
pub use morphisms::NodeMap;
pub use universal::UniversalModel;
