//! Polynomial IOP: relation encoding (offline phase), three online rounds
//! and the decision phase, run over the polynomial commitment scheme.

pub mod encoder;
pub mod protocol;
pub mod relation;
pub mod simulate;

pub use encoder::{index, Bivariate, EncodedIndex};
pub use relation::{generate_satisfiable, RelationIndex, SparseMatrix, Witness};
pub use protocol::{decide, prove, sparse_numerator, DecisionReport, PiopProof, ProverOutput, Slot, NUM_COMMITMENTS, REPORT_ITEMS};
