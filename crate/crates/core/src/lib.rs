//! Finite universal algebra workbench: operation-table algebras, subpower
//! generation, edge and Mal'cev term detection, bounded variety membership
//! and subcover search, a well-partial-order on words, and clonoid
//! comparison machinery.

pub mod algebra;
pub mod clonoid;
pub mod closure;
pub mod error;
pub mod maltsev;
pub mod samples;
pub mod subpower;
pub mod variety;
pub mod wpo;

pub use algebra::{FiniteAlgebra, OpSymbol, Signature, Term, TupleRank};
pub use closure::Budget;
pub use error::{Error, Result};
