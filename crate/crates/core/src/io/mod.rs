//! Polynomial parsing and the canonical JSON documents.

mod doc;
mod parse;

pub use doc::*;
pub use parse::{parse_poly, ParseError};
