use rand::Rng;

use super::params::PublicParams;
use crate::error::{LumenError, Result};
use crate::field_poly::{Domain, FieldElement, Poly};
use crate::transcript_hash::{keccak256, Digest32};

pub const COMMITMENT_MAGIC: &[u8; 4] = b"LUMN";
pub const COMMITMENT_VERSION: u8 = 0x01;
pub const MAX_MASKING_ATTEMPTS: usize = 64;

/// `a·b mod x^d − 1`
pub fn ring_mul(domain: &Domain, a: &Poly, b: &Poly) -> Poly {
    let ea = domain.evaluate(a);
    let eb = domain.evaluate(b);
    domain.interpolate(&ea.iter().zip(&eb).map(|(x, y)| *x * *y).collect::<Vec<_>>())
}

/// Inverse in `F[x]/(x^d − 1)`, which exists iff `a` has no root among the
/// `d`-th roots of unity.
pub fn ring_inverse(domain: &Domain, a: &Poly) -> Option<Poly> {
    let evals = domain.evaluate(a);
    if evals.iter().any(|x| x.is_zero()) {
        return None;
    }
    let inv = crate::field_poly::batch_inverse(&evals);
    Some(domain.interpolate(&inv))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Commitment {
    d: usize,
    alpha: usize,
    c: Poly,
    q: Poly,
    digest: Digest32,
}

impl Commitment {
    pub fn new(d: usize, alpha: usize, c: Poly, q: Poly) -> Self {
        let c = c.mod_cyclotomic(d);
        let q = q.mod_cyclotomic(d);
        let mut out = Self { d, alpha, c, q, digest: [0; 32] };
        out.digest = keccak256(&out.to_bytes());
        out
    }

    pub fn c(&self) -> &Poly {
        &self.c
    }

    pub fn q(&self) -> &Poly {
        &self.q
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn digest(&self) -> Digest32 {
        self.digest
    }

    /// Copy with `c` replaced; the digest is recomputed.
    pub fn with_c(&self, c: Poly) -> Self {
        Self::new(self.d, self.alpha, c, self.q.clone())
    }

    pub fn with_q(&self, q: Poly) -> Self {
        Self::new(self.d, self.alpha, self.c.clone(), q)
    }

    pub fn write_bytes(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(COMMITMENT_MAGIC);
        out.push(COMMITMENT_VERSION);
        out.extend_from_slice(&(self.d as u64).to_le_bytes());
        out.extend_from_slice(&(self.alpha as u32).to_le_bytes());
        self.c.write_bytes(out);
        self.q.write_bytes(out);
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        self.write_bytes(&mut out);
        out
    }

    pub fn read_bytes(bytes: &[u8]) -> Result<(Self, &[u8])> {
        let malformed = |m: &str| LumenError::Malformed(format!("commitment: {m}"));
        if bytes.len() < 17 || &bytes[..4] != COMMITMENT_MAGIC {
            return Err(malformed("bad magic"));
        }
        if bytes[4] != COMMITMENT_VERSION {
            return Err(malformed("unsupported version"));
        }
        let d = u64::from_le_bytes(bytes[5..13].try_into().expect("8 bytes")) as usize;
        let alpha = u32::from_le_bytes(bytes[13..17].try_into().expect("4 bytes")) as usize;
        let (c, rest) = Poly::read_bytes(&bytes[17..])?;
        let (q, rest) = Poly::read_bytes(rest)?;
        if c.len() > d || q.len() > d {
            return Err(malformed("component not reduced mod x^d - 1"));
        }
        Ok((Self::new(d, alpha, c, q), rest))
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let (c, rest) = Self::read_bytes(bytes)?;
        if !rest.is_empty() {
            return Err(LumenError::Malformed("commitment: trailing bytes".into()));
        }
        Ok(c)
    }
}

/// What a verifier holds: the full commitment or only its digest.
#[derive(Clone, Copy, Debug)]
pub enum CommitmentRef<'a> {
    Full(&'a Commitment),
    Digest(&'a Digest32),
}

impl CommitmentRef<'_> {
    pub fn digest(&self) -> Digest32 {
        match self {
            CommitmentRef::Full(c) => c.digest(),
            CommitmentRef::Digest(d) => **d,
        }
    }

    pub fn full(&self) -> Option<&Commitment> {
        match self {
            CommitmentRef::Full(c) => Some(c),
            CommitmentRef::Digest(_) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpeningHint {
    /// Monic masking polynomial of degree `d − 1`.
    pub p1: Poly,
    /// The message polynomial as supplied; the commitment binds it mod `x^d − 1`.
    pub f: Poly,
}

fn sample_monic(d: usize, rng: &mut impl Rng) -> Poly {
    let mut coeffs: Vec<FieldElement> = (0..d.saturating_sub(1)).map(|_| FieldElement::new(rng.gen())).collect();
    coeffs.push(FieldElement::ONE);
    Poly::from_coeffs(coeffs)
}

/// `q = (Σ v_i)·p1 + p2^e mod x^d − 1`
pub fn masking_q(pp: &PublicParams, p1: &Poly) -> Poly {
    (&p1.scale(pp.v_sum()) + pp.p2e()).mod_cyclotomic(pp.d())
}

/// `Σ_{g∈u} ĝ·f + p1 mod x^d − 1`
pub fn numerator(pp: &PublicParams, f: &Poly, p1: &Poly) -> Poly {
    (&f.mod_cyclotomic(pp.d()).scale(pp.u_sum()) + p1).mod_cyclotomic(pp.d())
}

/// Commit to `f` with `deg f < d`.
pub fn commit(pp: &PublicParams, f: &Poly, rng: &mut impl Rng) -> Result<(Commitment, OpeningHint)> {
    if let Some(deg) = f.degree() {
        if deg >= pp.d() {
            return Err(LumenError::DegreeTooLarge { degree: deg, bound: pp.d() });
        }
    }
    commit_folded(pp, f, rng)
}

/// Commit to `f mod x^d − 1` for `f` of any degree; the hint keeps `f` itself.
pub fn commit_folded(pp: &PublicParams, f: &Poly, rng: &mut impl Rng) -> Result<(Commitment, OpeningHint)> {
    let domain = pp.domain();
    for _ in 0..MAX_MASKING_ATTEMPTS {
        let p1 = sample_monic(pp.d(), rng);
        let q = masking_q(pp, &p1);
        let Some(inv) = ring_inverse(domain, &q.scale(pp.alpha_scalar)) else {
            continue;
        };
        let c = ring_mul(domain, &numerator(pp, f, &p1), &inv);
        let com = Commitment::new(pp.d(), pp.alpha(), c, q);
        return Ok((com, OpeningHint { p1, f: f.clone() }));
    }
    Err(LumenError::MaskingExhausted(MAX_MASKING_ATTEMPTS))
}

/// `α·q·c ≡ Σĝ·f + p1` and `q = (Σv)·p1 + p2^e`, both mod `x^d − 1`.
pub fn open(pp: &PublicParams, com: &Commitment, hint: &OpeningHint) -> bool {
    if com.d() != pp.d() || hint.p1.len() != pp.d() || hint.p1.leading_coeff() != FieldElement::ONE {
        return false;
    }
    if masking_q(pp, &hint.p1) != *com.q() {
        return false;
    }
    let lhs = ring_mul(pp.domain(), &com.q().scale(pp.alpha_scalar), com.c());
    lhs == numerator(pp, &hint.f, &hint.p1)
}
