use lumen::error::LumenError;
use lumen::pcs::{setup, PublicParams, SetupConfig};
use lumen::piop::relation::{generate_satisfiable, Witness};
use lumen::piop::{index, EncodedIndex};
use lumen::snark::{self, Proof, Verdict};
use lumen::transcript_hash::keccak256;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

fn fixture(n: usize, d: usize, seed: u64) -> (PublicParams, EncodedIndex, Witness) {
    let pp = setup(&SetupConfig::new(d, 2, b"snark-tests")).unwrap();
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let (rel, w) = generate_satisfiable(n, &mut rng).unwrap();
    (pp, index(&rel).unwrap(), w)
}

#[test]
fn prove_verify_roundtrip() {
    let (pp, idx, w) = fixture(8, 64, 1);
    let proof = snark::prove(&pp, &idx, &w, 7).unwrap();
    let bytes = proof.to_bytes();
    assert!(snark::verify(&pp, &idx, &bytes).unwrap());
    let parsed = Proof::from_bytes(&bytes).unwrap();
    assert_eq!(parsed.to_bytes(), bytes);
}

#[test]
fn proofs_are_deterministic_in_the_seed() {
    let (pp, idx, w) = fixture(4, 64, 2);
    let a = snark::prove(&pp, &idx, &w, 11).unwrap().to_bytes();
    let b = snark::prove(&pp, &idx, &w, 11).unwrap().to_bytes();
    let c = snark::prove(&pp, &idx, &w, 12).unwrap().to_bytes();
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn truncation_is_malformed_not_reject() {
    let (pp, idx, w) = fixture(4, 64, 3);
    let bytes = snark::prove(&pp, &idx, &w, 1).unwrap().to_bytes();
    for cut in [0, 3, 10, bytes.len() / 2, bytes.len() - 1] {
        let err = snark::verify(&pp, &idx, &bytes[..cut]).unwrap_err();
        assert!(matches!(err, LumenError::Malformed(_)), "cut {cut}: {err:?}");
    }
    let mut long = bytes.clone();
    long.push(0);
    assert!(matches!(snark::verify(&pp, &idx, &long), Err(LumenError::Malformed(_))));
}

#[test]
fn wrong_calibration_or_relation_rejects() {
    let (pp, idx, w) = fixture(4, 64, 4);
    let proof = snark::prove_with_calibration(&pp, &idx, &w, 1, snark::calibration_id() ^ 1).unwrap();
    assert!(!snark::verify(&pp, &idx, &proof.to_bytes()).unwrap());
    let (_, other, _) = fixture(4, 64, 5);
    let proof = snark::prove(&pp, &idx, &w, 1).unwrap();
    let v = snark::verify_detailed(&pp, &other, &proof.to_bytes(), snark::calibration_id()).unwrap();
    assert_eq!(v, Verdict::HeaderMismatch);
}

#[test]
fn body_bit_flips_reject() {
    let (pp, idx, w) = fixture(4, 64, 6);
    let bytes = snark::prove(&pp, &idx, &w, 2).unwrap().to_bytes();
    let mut rng = ChaCha20Rng::seed_from_u64(99);
    let mut rejected = 0;
    for _ in 0..100 {
        let mut b = bytes.clone();
        let pos = rng.gen_range(0..b.len());
        b[pos] ^= 1 << rng.gen_range(0..8);
        match snark::verify(&pp, &idx, &b) {
            Ok(true) => {}
            Ok(false) | Err(_) => rejected += 1,
        }
    }
    assert!(rejected >= 99, "only {rejected}/100 flips rejected");
}

#[test]
fn verify_does_not_mutate_inputs() {
    let (pp, idx, w) = fixture(4, 64, 7);
    let bytes = snark::prove(&pp, &idx, &w, 3).unwrap().to_bytes();
    let before = (keccak256(&bytes), idx.digest(), pp.digest());
    assert!(snark::verify(&pp, &idx, &bytes).unwrap());
    assert_eq!(before, (keccak256(&bytes), idx.digest(), pp.digest()));
}

#[test]
fn commitment_byte_changes_every_later_challenge() {
    let (pp, idx, w) = fixture(4, 64, 8);
    let proof = snark::prove(&pp, &idx, &w, 4).unwrap();
    let mut rng = ChaCha20Rng::seed_from_u64(5);
    for _ in 0..100 {
        let mut p = proof.clone();
        let slot = rng.gen_range(0..7);
        let byte = rng.gen_range(0..32);
        p.piop.digests[slot][byte] ^= 1 << rng.gen_range(0..8);
        let v = snark::verify_proof(&pp, &idx, &p, snark::calibration_id()).unwrap();
        let Verdict::Reject(report) = v else { panic!("accepted a tampered digest") };
        assert!(!report.accepted());
    }
}

#[test]
fn simulated_and_real_shapes_match() {
    let (pp, idx, w) = fixture(8, 64, 9);
    let real = snark::real_transcript(&pp, &idx, &w, 1).unwrap();
    let sim = snark::simulate(&pp, &idx, 1).unwrap();
    assert_eq!(real.to_bytes().len(), sim.to_bytes().len());
    assert_eq!(real.proof.to_bytes().len(), sim.proof.to_bytes().len());
    assert_eq!(real.proof.piop.openings.len(), sim.proof.piop.openings.len());
}

#[test]
fn proof_size_at_alpha_two() {
    let (pp, idx, w) = fixture(16, 256, 10);
    let len = snark::prove(&pp, &idx, &w, 1).unwrap().to_bytes().len();
    assert!(len <= 4096, "proof is {len} bytes");
}
