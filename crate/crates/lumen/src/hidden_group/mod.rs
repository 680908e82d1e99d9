//! Groups of unknown order: the RSA-2048 challenge modulus taken modulo ±1,
//! plus a small known-order backend used to check exponent arithmetic.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{LumenError, Result};
use crate::transcript_hash::{keccak256_parts, Digest32};

/// Decimal digits of the RSA-2048 factoring challenge.
pub const RSA2048_DECIMAL: &str = include_str!("rsa2048.txt");
pub const RSA_ELEMENT_BYTES: usize = 256;
pub const TEST_ELEMENT_BYTES: usize = 8;
pub const MAX_SEED_ATTEMPTS: u32 = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Backend {
    RsaChallenge,
    TestKnownOrder,
}

impl Backend {
    pub fn tag(self) -> u8 {
        match self {
            Backend::RsaChallenge => 0,
            Backend::TestKnownOrder => 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement {
    residue: BigUint,
}

impl GroupElement {
    pub fn residue(&self) -> &BigUint {
        &self.residue
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupSpec {
    backend: Backend,
    modulus: BigUint,
    half: BigUint,
    element_bytes: usize,
    cofactor: BigUint,
    order: Option<u64>,
}

impl GroupSpec {
    pub fn rsa_challenge() -> Self {
        let modulus: BigUint = RSA2048_DECIMAL.trim().parse().expect("hard-coded modulus parses");
        Self {
            backend: Backend::RsaChallenge,
            half: &modulus >> 1u32,
            modulus,
            element_bytes: RSA_ELEMENT_BYTES,
            cofactor: BigUint::from(2u32),
            order: None,
        }
    }

    /// `(Z/q)* / ±1` restricted to the subgroup of odd prime order `order`.
    pub fn test_known_order(q: u64, order: u64) -> Result<Self> {
        if q < 5 || order < 3 || order.is_multiple_of(2) || !(q - 1).is_multiple_of(order) {
            return Err(LumenError::InvalidParams(format!("order {order} must be odd and divide {q} - 1")));
        }
        let modulus = BigUint::from(q);
        Ok(Self {
            backend: Backend::TestKnownOrder,
            half: &modulus >> 1u32,
            modulus,
            element_bytes: TEST_ELEMENT_BYTES,
            cofactor: BigUint::from((q - 1) / order),
            order: Some(order),
        })
    }

    /// The default test group: q = 607, subgroup of order 101.
    pub fn test_default() -> Self {
        Self::test_known_order(607, 101).expect("valid test parameters")
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    pub fn modulus(&self) -> &BigUint {
        &self.modulus
    }

    pub fn element_bytes(&self) -> usize {
        self.element_bytes
    }

    /// Group order of the test backend. Protocol code never calls this.
    #[doc(hidden)]
    pub fn known_order_for_tests(&self) -> Option<u64> {
        self.order
    }

    fn canonical(&self, x: BigUint) -> GroupElement {
        let x = x % &self.modulus;
        let residue = if x > self.half { &self.modulus - x } else { x };
        GroupElement { residue }
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement { residue: BigUint::one() }
    }

    pub fn gmul(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        self.canonical(&a.residue * &b.residue)
    }

    pub fn inverse(&self, a: &GroupElement) -> GroupElement {
        let inv = a.residue.modinv(&self.modulus).expect("group elements are units");
        self.canonical(inv)
    }

    pub fn gpow(&self, a: &GroupElement, e: &BigInt) -> GroupElement {
        let base = match e.sign() {
            Sign::Minus => self.inverse(a),
            _ => a.clone(),
        };
        self.canonical(base.residue.modpow(e.magnitude(), &self.modulus))
    }

    pub fn gpow_u64(&self, a: &GroupElement, e: u64) -> GroupElement {
        self.canonical(a.residue.modpow(&BigUint::from(e), &self.modulus))
    }

    pub fn encode(&self, a: &GroupElement) -> Vec<u8> {
        let raw = a.residue.to_bytes_be();
        let mut out = vec![0u8; self.element_bytes - raw.len()];
        out.extend_from_slice(&raw);
        out
    }

    /// Inverse of [`GroupSpec::encode`]; rejects wrong widths, non-units and
    /// non-canonical representatives.
    pub fn decode(&self, bytes: &[u8]) -> Result<GroupElement> {
        if bytes.len() != self.element_bytes {
            return Err(LumenError::Malformed(format!(
                "group element must be {} bytes, got {}",
                self.element_bytes,
                bytes.len()
            )));
        }
        let x = BigUint::from_bytes_be(bytes);
        if x.is_zero() || x > self.half || !x.gcd(&self.modulus).is_one() {
            return Err(LumenError::Malformed("group element is not a canonical unit".into()));
        }
        Ok(GroupElement { residue: x })
    }

    /// Hash `seed` to a generator: expand to a residue, reject 0/±1 and
    /// non-units, then push into the working subgroup.
    pub fn hash_to_generator(&self, seed: &[u8]) -> Result<GroupElement> {
        let blocks = (self.element_bytes + 16).div_ceil(32);
        for attempt in 0..MAX_SEED_ATTEMPTS {
            let mut wide = Vec::with_capacity(blocks * 32);
            for block in 0..blocks as u32 {
                let d: Digest32 = keccak256_parts(&[
                    b"lumen/hash-to-residue",
                    seed,
                    &attempt.to_le_bytes(),
                    &block.to_le_bytes(),
                ]);
                wide.extend_from_slice(&d);
            }
            let r = BigUint::from_bytes_be(&wide) % &self.modulus;
            let minus_one = &self.modulus - 1u32;
            if r.is_zero() || r.is_one() || r == minus_one || !r.gcd(&self.modulus).is_one() {
                continue;
            }
            let g = self.canonical(r.modpow(&self.cofactor, &self.modulus));
            if g.residue.is_one() {
                continue;
            }
            return Ok(g);
        }
        Err(LumenError::InvalidSeed)
    }
}

/// Transparent setup: hash the seed to `g` and return `u = [g^1 .. g^α]`.
pub fn transparent_setup(spec: GroupSpec, seed: &[u8], alpha: usize) -> Result<(GroupSpec, GroupElement, Vec<GroupElement>)> {
    if alpha == 0 {
        return Err(LumenError::InvalidParams("alpha must be at least 1".into()));
    }
    let g = spec.hash_to_generator(seed)?;
    let mut u = Vec::with_capacity(alpha);
    let mut acc = g.clone();
    for _ in 0..alpha {
        u.push(acc.clone());
        acc = spec.gmul(&acc, &g);
    }
    Ok((spec, g, u))
}
