//! Lumen: a polynomial commitment scheme over hidden-order groups, a
//! recursive aggregation layer, and a preprocessing zkSNARK built on top.

pub mod audit;
pub mod bench;
pub mod error;
pub mod field_poly;
pub mod hidden_group;
pub mod pcs;
pub mod piop;
pub mod recursion;
pub mod snark;
pub mod transcript_hash;

pub use error::{LumenError, Result};
