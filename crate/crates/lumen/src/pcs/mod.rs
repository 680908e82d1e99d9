//! Polynomial commitments over a hidden-order group: setup, commit, open,
//! the VerifyPoly trace check and the evaluation argument.

pub mod commit;
pub mod eval;
pub mod params;
pub mod verify_poly;

pub use commit::{commit, commit_folded, open, ring_inverse, ring_mul, Commitment, CommitmentRef, OpeningHint};
pub use eval::{eval_prove, eval_verify, simulate_eval_proof, EvalClaims, EvalProof};
pub use params::{setup, BackendName, PublicParams, SetupConfig};
pub use verify_poly::{build_verify_poly_trace, trace_from_values, verify_poly, TraceVectors, VerifyPolyChallenges, VerifyPolyTrace};
