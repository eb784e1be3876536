//! Monad algebra over complex values and the Core XQuery fragment:
//! interpreters for both, the deterministic-tree semantics and its
//! compilation to nonrecursive logic programs, translations between the
//! two languages, and generators for the classic hardness constructions.

pub mod bridge;
pub mod detree;
pub mod error;
pub mod gen;
pub mod lp;
pub mod ma;
pub mod reductions;
pub mod value;
pub mod xml;
pub mod xq;

pub use error::{Error, Result};
pub use value::{check_type, parse_type, parse_value, print_value, type_of, value_equal, EqMode, Kind, Label, Type, Value};
