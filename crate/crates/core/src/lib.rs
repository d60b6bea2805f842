//! Useful String Indexing: top-K frequent substrings of a weighted text, indexed together with
//! their global utility.

pub mod competitors;
pub mod error;
pub mod eval;
pub mod fingerprint;
pub mod par;
pub mod suffix;
pub mod text;
pub mod topk;
pub mod usi;
pub mod utility;

pub use error::{Result, UsiError};
