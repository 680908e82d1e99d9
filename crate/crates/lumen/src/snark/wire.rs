//! Byte layout: magic, version, calibration id, relation digest, a table of
//! section offsets, then the round-one, round-two, round-three, evaluation
//! and opening sections in that order. Integers are little-endian.

use crate::error::{LumenError, Result};
use crate::field_poly::{FieldElement, FIELD_BYTES};
use crate::pcs::{EvalClaims, EvalProof, VerifyPolyTrace};
use crate::piop::protocol::{Opening, PiopProof, NUM_COMMITMENTS, NUM_MASKS};
use crate::transcript_hash::{Digest32, DIGEST_BYTES};

type F = FieldElement;

pub const PROOF_MAGIC: &[u8; 4] = b"LUMN";
pub const PROOF_VERSION: u8 = 1;
pub const NUM_SECTIONS: usize = 5;
pub const HEADER_BYTES: usize = 4 + 1 + 2 + DIGEST_BYTES + 4 * NUM_SECTIONS;
/// Guards allocation when parsing untrusted input.
pub const MAX_ALPHA: usize = 1 << 12;

const ROUND_SPLITS: [std::ops::Range<usize>; 3] = [0..7, 7..14, 14..18];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Proof {
    pub calibration_id: u16,
    pub relation_digest: Digest32,
    pub piop: PiopProof,
}

impl Proof {
    pub fn to_bytes(&self) -> Vec<u8> {
        let p = &self.piop;
        let mut sections: [Vec<u8>; NUM_SECTIONS] = Default::default();
        sections[0].extend(p.a.iter().map(|x| *x as u8));
        sections[1].extend_from_slice(&p.sigma1.to_bytes());
        sections[2].extend_from_slice(&p.s_val.to_bytes());
        for (i, range) in ROUND_SPLITS.iter().enumerate() {
            for d in &p.digests[range.clone()] {
                sections[i].extend_from_slice(d);
            }
        }
        for op in &p.openings {
            sections[3].extend_from_slice(&op.claims.y1.to_bytes());
            sections[3].extend_from_slice(&op.claims.y2.to_bytes());
        }
        let alpha = p.openings.first().map_or(0, |o| o.trace.rho.len());
        sections[4].extend_from_slice(&(alpha as u32).to_le_bytes());
        for op in &p.openings {
            let tr = &op.trace;
            let fields = tr.rho.iter().chain(&tr.sigma).chain([&tr.phi, &tr.m, &tr.n, &tr.r_scalar]);
            for f in fields.copied().chain(op.proof.to_fields()) {
                sections[4].extend_from_slice(&f.to_bytes());
            }
        }

        let mut out = Vec::with_capacity(HEADER_BYTES + sections.iter().map(Vec::len).sum::<usize>());
        out.extend_from_slice(PROOF_MAGIC);
        out.push(PROOF_VERSION);
        out.extend_from_slice(&self.calibration_id.to_le_bytes());
        out.extend_from_slice(&self.relation_digest);
        let mut offset = HEADER_BYTES;
        for s in &sections {
            out.extend_from_slice(&(offset as u32).to_le_bytes());
            offset += s.len();
        }
        for s in sections {
            out.extend(s);
        }
        out
    }

    /// Strict parse: offsets must match the layout and no bytes may trail.
    /// Traces come back with an empty `w`, which the verifier refills from the
    /// parameters.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader { bytes, pos: 0 };
        if r.take(4)? != PROOF_MAGIC {
            return Err(malformed("bad magic"));
        }
        let version = r.take(1)?[0];
        if version != PROOF_VERSION {
            return Err(malformed(&format!("unsupported version {version}")));
        }
        let calibration_id = u16::from_le_bytes(r.array()?);
        let relation_digest: Digest32 = r.array()?;
        let mut offsets = [0usize; NUM_SECTIONS];
        for o in offsets.iter_mut() {
            *o = u32::from_le_bytes(r.array()?) as usize;
        }

        r.expect_offset(offsets[0])?;
        let mut a = [0u64; NUM_MASKS];
        for (x, b) in a.iter_mut().zip(r.take(NUM_MASKS)?) {
            *x = *b as u64;
        }
        let mut digests = Vec::with_capacity(NUM_COMMITMENTS);
        let read_digests = |r: &mut Reader, k: usize, out: &mut Vec<Digest32>| -> Result<()> {
            for _ in 0..k {
                out.push(r.array()?);
            }
            Ok(())
        };
        read_digests(&mut r, ROUND_SPLITS[0].len(), &mut digests)?;
        r.expect_offset(offsets[1])?;
        let sigma1 = r.field()?;
        read_digests(&mut r, ROUND_SPLITS[1].len(), &mut digests)?;
        r.expect_offset(offsets[2])?;
        let s_val = r.field()?;
        read_digests(&mut r, ROUND_SPLITS[2].len(), &mut digests)?;

        r.expect_offset(offsets[3])?;
        let mut claims = Vec::with_capacity(NUM_COMMITMENTS);
        for _ in 0..NUM_COMMITMENTS {
            claims.push(EvalClaims { y1: r.field()?, y2: r.field()? });
        }

        r.expect_offset(offsets[4])?;
        let alpha = u32::from_le_bytes(r.array()?) as usize;
        if alpha == 0 || alpha > MAX_ALPHA {
            return Err(malformed(&format!("alpha {alpha} out of range")));
        }
        let mut openings = Vec::with_capacity(NUM_COMMITMENTS);
        for c in claims {
            let rho = r.fields(alpha)?;
            let sigma = r.fields(alpha)?;
            let [phi, m, n, r_scalar] = r.fields(4)?.try_into().expect("four");
            let ev: [F; EvalProof::FIELDS] = r.fields(EvalProof::FIELDS)?.try_into().expect("six");
            openings.push(Opening {
                trace: VerifyPolyTrace { rho, sigma, w: Vec::new(), phi, m, n, r_scalar },
                claims: c,
                proof: EvalProof::from_fields(ev),
            });
        }
        if r.pos != bytes.len() {
            return Err(malformed("trailing bytes"));
        }
        Ok(Self { calibration_id, relation_digest, piop: PiopProof { a, sigma1, s_val, digests, openings } })
    }
}

fn malformed(msg: &str) -> LumenError {
    LumenError::Malformed(msg.into())
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|e| *e <= self.bytes.len()).ok_or_else(|| malformed("truncated"))?;
        let out = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn array<const N: usize>(&mut self) -> Result<[u8; N]> {
        Ok(self.take(N)?.try_into().expect("length checked"))
    }

    fn field(&mut self) -> Result<F> {
        F::from_bytes(self.take(FIELD_BYTES)?)
    }

    fn fields(&mut self, k: usize) -> Result<Vec<F>> {
        (0..k).map(|_| self.field()).collect()
    }

    fn expect_offset(&self, offset: usize) -> Result<()> {
        if offset != self.pos {
            return Err(malformed("section offset mismatch"));
        }
        Ok(())
    }
}
