//! Keccak-256 (Ethereum padding), hash-to-field / hash-to-exponent maps and
//! the labeled Fiat-Shamir transcript that produces every verifier challenge.
//!
//! Absorption wire format: `label || 0x00 || len as u64 LE || payload`.
//! A challenge absorbs `(label, counter)`, finalizes a fork of the sponge,
//! then feeds the digest back under [`FEEDBACK_LABEL`].

use num_bigint::BigUint;
use num_traits::{One, Zero};
use sha3::{Digest, Keccak256};

use crate::error::{LumenError, Result};
use crate::field_poly::FieldElement;

pub const DIGEST_BYTES: usize = 32;
pub const FEEDBACK_LABEL: &[u8] = b"lumen/challenge-feedback";

pub type Digest32 = [u8; DIGEST_BYTES];

pub fn keccak256(bytes: &[u8]) -> Digest32 {
    Keccak256::digest(bytes).into()
}

/// Keccak-256 over the concatenation of `parts` without materializing it.
pub fn keccak256_parts(parts: &[&[u8]]) -> Digest32 {
    let mut h = Keccak256::new();
    for p in parts {
        h.update(p);
    }
    h.finalize().into()
}

/// Full 256-bit digest reduced mod p.
pub fn hash_to_field(bytes: &[u8]) -> FieldElement {
    FieldElement::from_le_bytes_mod_order(&keccak256(bytes))
}

pub fn digest_to_field(digest: &Digest32) -> FieldElement {
    FieldElement::from_le_bytes_mod_order(digest)
}

/// One recorded transcript operation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TranscriptOp {
    Absorb { label: Vec<u8>, data: Vec<u8> },
    Challenge { label: Vec<u8> },
}

#[derive(Clone)]
pub struct Transcript {
    sponge: Keccak256,
    counter: u64,
    log: Option<Vec<TranscriptOp>>,
}

impl std::fmt::Debug for Transcript {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Transcript")
            .field("counter", &self.counter)
            .field("state", &hex(&self.sponge.clone().finalize()))
            .finish()
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

impl Transcript {
    pub fn new(protocol: &[u8]) -> Self {
        let mut t = Self { sponge: Keccak256::new(), counter: 0, log: None };
        t.absorb(b"lumen/protocol", protocol);
        t
    }

    /// Like [`Transcript::new`] but keeps a log of every operation for replay.
    pub fn recording(protocol: &[u8]) -> Self {
        let mut t = Self { sponge: Keccak256::new(), counter: 0, log: Some(Vec::new()) };
        t.absorb(b"lumen/protocol", protocol);
        t
    }

    pub fn log(&self) -> Option<&[TranscriptOp]> {
        self.log.as_deref()
    }

    pub fn challenge_count(&self) -> u64 {
        self.counter
    }

    fn absorb_raw(&mut self, label: &[u8], data: &[u8]) {
        self.sponge.update(label);
        self.sponge.update([0u8]);
        self.sponge.update((data.len() as u64).to_le_bytes());
        self.sponge.update(data);
    }

    pub fn absorb(&mut self, label: &[u8], data: &[u8]) {
        debug_assert!(!label.is_empty());
        if let Some(log) = self.log.as_mut() {
            log.push(TranscriptOp::Absorb { label: label.to_vec(), data: data.to_vec() });
        }
        self.absorb_raw(label, data);
    }

    pub fn absorb_u64(&mut self, label: &[u8], v: u64) {
        self.absorb(label, &v.to_le_bytes());
    }

    pub fn absorb_field(&mut self, label: &[u8], x: FieldElement) {
        self.absorb(label, &x.to_bytes());
    }

    pub fn absorb_fields(&mut self, label: &[u8], xs: &[FieldElement]) {
        let mut buf = Vec::with_capacity(xs.len() * 8);
        for x in xs {
            buf.extend_from_slice(&x.to_bytes());
        }
        self.absorb(label, &buf);
    }

    /// Raw 32-byte challenge.
    pub fn challenge_bytes(&mut self, label: &[u8]) -> Digest32 {
        debug_assert!(!label.is_empty());
        if let Some(log) = self.log.as_mut() {
            log.push(TranscriptOp::Challenge { label: label.to_vec() });
        }
        self.absorb_raw(label, &self.counter.to_le_bytes());
        let out: Digest32 = self.sponge.clone().finalize().into();
        self.counter += 1;
        self.absorb_raw(FEEDBACK_LABEL, &out);
        out
    }

    pub fn challenge_field(&mut self, label: &[u8]) -> FieldElement {
        digest_to_field(&self.challenge_bytes(label))
    }

    /// Field challenge outside the given set (re-drawn under the same label).
    pub fn challenge_field_avoiding(&mut self, label: &[u8], reject: impl Fn(FieldElement) -> bool) -> FieldElement {
        loop {
            let x = self.challenge_field(label);
            if !reject(x) {
                return x;
            }
        }
    }

    /// Uniform integer in `[0, bound)` by rejection sampling on 256-bit draws.
    pub fn challenge_exponent(&mut self, label: &[u8], bound: u64) -> Result<u64> {
        let b = self.challenge_exponent_big(label, &BigUint::from(bound))?;
        Ok(b.iter_u64_digits().next().unwrap_or(0))
    }

    pub fn challenge_exponent_big(&mut self, label: &[u8], bound: &BigUint) -> Result<BigUint> {
        if bound.is_zero() {
            return Err(LumenError::ChallengeDomainError);
        }
        if bound.is_one() {
            return Ok(BigUint::zero());
        }
        let bits = bound.bits().max(256);
        let words = bits.div_ceil(256) as usize;
        let space = BigUint::one() << (256 * words);
        let limit = &space - (&space % bound);
        loop {
            let mut bytes = Vec::with_capacity(32 * words);
            for _ in 0..words {
                bytes.extend_from_slice(&self.challenge_bytes(label));
            }
            let draw = BigUint::from_bytes_le(&bytes);
            if draw < limit {
                return Ok(draw % bound);
            }
        }
    }

    /// Re-run a recorded log on a fresh transcript, returning every challenge.
    pub fn replay(protocol: &[u8], log: &[TranscriptOp]) -> Vec<Digest32> {
        let mut t = Transcript::new(protocol);
        let mut out = Vec::new();
        // the constructor's own absorption is the first log entry
        for op in log.iter().skip(1) {
            match op {
                TranscriptOp::Absorb { label, data } => t.absorb(label, data),
                TranscriptOp::Challenge { label } => out.push(t.challenge_bytes(label)),
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use statrs::distribution::{ChiSquared, ContinuousCDF};

    fn unhex(s: &str) -> Vec<u8> {
        (0..s.len()).step_by(2).map(|i| u8::from_str_radix(&s[i..i + 2], 16).unwrap()).collect()
    }

    #[test]
    fn keccak_empty_and_abc() {
        assert_eq!(
            keccak256(b"").to_vec(),
            unhex("c5d2460186f7233c927e7db2dcc703c0e500b653ca82273b7bfad8045d85a470")
        );
        assert_eq!(
            keccak256(b"abc").to_vec(),
            unhex("4e03657aea45a94fc7d47ba826c8d667c0d1e6e33a64a036ec44f58fa12d6c45")
        );
    }

    #[test]
    fn streaming_matches_one_shot() {
        let z = [0u8; 100];
        assert_eq!(keccak256(&[0u8; 200]), keccak256_parts(&[&z, &z]));
    }

    #[test]
    fn absorption_layout() {
        let mut t = Transcript::new(b"p");
        t.absorb(b"lbl", b"xyz");
        let mut manual = Keccak256::new();
        manual.update(b"lumen/protocol\x00");
        manual.update(1u64.to_le_bytes());
        manual.update(b"p");
        manual.update(b"lbl\x00");
        manual.update(3u64.to_le_bytes());
        manual.update(b"xyz");
        manual.update(b"c\x00");
        manual.update(8u64.to_le_bytes());
        manual.update(0u64.to_le_bytes());
        let expect: Digest32 = manual.finalize().into();
        assert_eq!(t.challenge_bytes(b"c"), expect);
    }

    #[test]
    fn determinism_and_label_separation() {
        let mut a = Transcript::new(b"test");
        let mut b = Transcript::new(b"test");
        a.absorb(b"m", b"hello");
        b.absorb(b"m", b"hello");
        assert_eq!(a.challenge_field(b"x"), b.challenge_field(b"x"));
        let mut seen = std::collections::HashSet::new();
        for i in 0..1000u32 {
            let mut t = a.clone();
            let label = format!("label-{i}");
            assert!(seen.insert(t.challenge_bytes(label.as_bytes())));
        }
    }

    #[test]
    fn degenerate_bounds() {
        let mut t = Transcript::new(b"test");
        assert_eq!(t.challenge_exponent(b"e", 1).unwrap(), 0);
        assert_eq!(t.challenge_exponent(b"e", 0), Err(LumenError::ChallengeDomainError));
        for _ in 0..100 {
            assert!(t.challenge_exponent(b"e", 7).unwrap() < 7);
        }
        let big = BigUint::one() << 600u32;
        assert!(t.challenge_exponent_big(b"e", &big).unwrap() < big);
    }

    #[test]
    fn replay_regenerates_challenges() {
        let mut t = Transcript::recording(b"replay");
        let mut expect = Vec::new();
        t.absorb(b"a", &[1, 2, 3]);
        expect.push(t.challenge_bytes(b"c1"));
        t.absorb_field(b"f", FieldElement::new(99));
        expect.push(t.challenge_bytes(b"c2"));
        expect.push(t.challenge_bytes(b"c3"));
        let log = t.log().unwrap().to_vec();
        assert_eq!(Transcript::replay(b"replay", &log), expect);
    }

    #[test]
    fn field_challenges_pass_chi_square() {
        let mut t = Transcript::new(b"chi");
        let buckets = 64usize;
        let draws = 100_000usize;
        let mut counts = vec![0f64; buckets];
        let p = FieldElement::MODULUS as u128;
        for _ in 0..draws {
            let v = t.challenge_field(b"u").value() as u128;
            counts[(v * buckets as u128 / p) as usize] += 1.0;
        }
        let expected = draws as f64 / buckets as f64;
        let stat: f64 = counts.iter().map(|c| (c - expected).powi(2) / expected).sum();
        let pval = 1.0 - ChiSquared::new((buckets - 1) as f64).unwrap().cdf(stat);
        assert!(pval > 0.01, "p-value {pval}");
    }

    #[test]
    fn exponent_challenges_pass_chi_square() {
        let mut t = Transcript::new(b"chi-exp");
        let bound = 10u64;
        let draws = 20_000usize;
        let mut counts = vec![0f64; bound as usize];
        for _ in 0..draws {
            counts[t.challenge_exponent(b"e", bound).unwrap() as usize] += 1.0;
        }
        let expected = draws as f64 / bound as f64;
        let stat: f64 = counts.iter().map(|c| (c - expected).powi(2) / expected).sum();
        let pval = 1.0 - ChiSquared::new((bound - 1) as f64).unwrap().cdf(stat);
        assert!(pval > 0.01, "p-value {pval}");
    }
}
