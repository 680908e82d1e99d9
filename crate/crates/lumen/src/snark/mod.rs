//! Non-interactive proofs: the PIOP driven by a Keccak transcript, a fixed
//! wire format, and a witness-free simulator with matching output shape.

pub mod wire;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::error::{LumenError, Result};
use crate::field_poly::Poly;
use crate::pcs::verify_poly::encoding_w;
use crate::pcs::PublicParams;
use crate::piop::protocol::{decide, prove as piop_prove, Challenges, DecisionReport};
use crate::piop::relation::Witness;
use crate::piop::simulate::{real_epsilon_evals, simulate as piop_simulate, summaries, Summaries};
use crate::piop::EncodedIndex;
use crate::transcript_hash::{keccak256, Transcript};

pub use wire::{Proof, PROOF_MAGIC, PROOF_VERSION};

pub const SNARK_PROTOCOL: &[u8] = b"lumen/snark";

/// Resolved readings of the decision identities, one per line; produced by
/// the audit and pinned here so prover and verifier agree on them.
pub const CALIBRATION_DESCRIPTOR: &str = include_str!("calibration.txt");

/// First two bytes of the descriptor's Keccak digest, little-endian.
pub fn calibration_id_of(descriptor: &str) -> u16 {
    let d = keccak256(descriptor.as_bytes());
    u16::from_le_bytes([d[0], d[1]])
}

pub fn calibration_id() -> u16 {
    calibration_id_of(CALIBRATION_DESCRIPTOR)
}

fn transcript(calibration_id: u16) -> Transcript {
    let mut t = Transcript::new(SNARK_PROTOCOL);
    t.absorb(b"snark/calibration", &calibration_id.to_le_bytes());
    t
}

fn seeded(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

pub fn prove(pp: &PublicParams, idx: &EncodedIndex, witness: &Witness, seed: u64) -> Result<Proof> {
    prove_with_calibration(pp, idx, witness, seed, calibration_id())
}

pub fn prove_with_calibration(
    pp: &PublicParams,
    idx: &EncodedIndex,
    witness: &Witness,
    seed: u64,
    calibration_id: u16,
) -> Result<Proof> {
    let out = piop_prove(pp, idx, witness, &mut transcript(calibration_id), &mut seeded(seed))?;
    Ok(Proof { calibration_id, relation_digest: idx.digest(), piop: out.proof })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Accept,
    /// Header names another calibration or relation.
    HeaderMismatch,
    Reject(DecisionReport),
}

impl Verdict {
    pub fn accepted(&self) -> bool {
        matches!(self, Verdict::Accept)
    }
}

/// Parse errors surface as `Malformed`; everything else is a verdict.
pub fn verify(pp: &PublicParams, idx: &EncodedIndex, bytes: &[u8]) -> Result<bool> {
    Ok(verify_detailed(pp, idx, bytes, calibration_id())?.accepted())
}

pub fn verify_detailed(pp: &PublicParams, idx: &EncodedIndex, bytes: &[u8], calibration_id: u16) -> Result<Verdict> {
    let proof = Proof::from_bytes(bytes)?;
    verify_proof(pp, idx, &proof, calibration_id)
}

pub fn verify_proof(pp: &PublicParams, idx: &EncodedIndex, proof: &Proof, calibration_id: u16) -> Result<Verdict> {
    if proof.calibration_id != calibration_id || proof.relation_digest != idx.digest() {
        return Ok(Verdict::HeaderMismatch);
    }
    let mut piop = proof.piop.clone();
    if piop.openings.iter().any(|o| o.trace.rho.len() != pp.alpha()) {
        return Err(LumenError::Malformed("opening width differs from the parameters".into()));
    }
    let w = encoding_w(pp);
    for op in piop.openings.iter_mut() {
        op.trace.w = w.clone();
    }
    let (report, _) = decide(pp, idx, &piop, None, &mut transcript(calibration_id))?;
    Ok(if report.accepted() { Verdict::Accept } else { Verdict::Reject(report) })
}

/// A proof together with the values the zero-knowledge comparison looks at.
#[derive(Clone, Debug)]
pub struct SimulatorTranscript {
    pub proof: Proof,
    pub t_hat: Poly,
    pub summaries: Summaries,
    pub challenges: Challenges,
}

impl SimulatorTranscript {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = self.proof.to_bytes();
        for x in [self.summaries.t_alpha, self.summaries.t_d, self.summaries.t_m, self.summaries.t_n] {
            out.extend_from_slice(&x.to_bytes());
        }
        out
    }
}

/// The simulator: never sees a witness.
pub fn simulate(pp: &PublicParams, idx: &EncodedIndex, seed: u64) -> Result<SimulatorTranscript> {
    let id = calibration_id();
    let sim = piop_simulate(pp, idx, &mut transcript(id), &mut seeded(seed))?;
    Ok(SimulatorTranscript {
        summaries: summaries(idx, &sim.challenges, &sim.eps_evals)?,
        proof: Proof { calibration_id: id, relation_digest: idx.digest(), piop: sim.proof },
        t_hat: sim.t_hat,
        challenges: sim.challenges,
    })
}

/// The honest prover's counterpart of [`simulate`].
pub fn real_transcript(pp: &PublicParams, idx: &EncodedIndex, witness: &Witness, seed: u64) -> Result<SimulatorTranscript> {
    let id = calibration_id();
    let out = piop_prove(pp, idx, witness, &mut transcript(id), &mut seeded(seed))?;
    Ok(SimulatorTranscript {
        summaries: summaries(idx, &out.challenges, &real_epsilon_evals(&out))?,
        t_hat: out.polys[crate::piop::Slot::THat.index()].clone(),
        challenges: out.challenges,
        proof: Proof { calibration_id: id, relation_digest: idx.digest(), piop: out.proof },
    })
}
