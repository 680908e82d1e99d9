use serde::{Deserialize, Serialize};

use crate::error::{LumenError, Result};
use crate::field_poly::{Domain, FieldElement, Poly};
use crate::hidden_group::{transparent_setup, Backend, GroupElement, GroupSpec};
use crate::transcript_hash::{digest_to_field, hash_to_field, keccak256, Digest32, Transcript};

pub const PP_MAGIC: &[u8; 4] = b"LUMP";
pub const PP_VERSION: u8 = 1;
pub const DEFAULT_LAMBDA: u32 = 128;
/// Bounds on stored parameters, so untrusted files cannot request huge setups.
pub const MAX_STORED_D: u64 = 1 << 22;
pub const MAX_STORED_ALPHA: u64 = 1 << 12;

/// Everything needed to regenerate [`PublicParams`]; this is what gets stored.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetupConfig {
    pub lambda: u32,
    pub d: usize,
    pub alpha: usize,
    pub seed: Vec<u8>,
    pub backend: BackendName,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BackendName {
    RsaChallenge,
    TestKnownOrder,
}

impl SetupConfig {
    pub fn new(d: usize, alpha: usize, seed: &[u8]) -> Self {
        Self { lambda: DEFAULT_LAMBDA, d, alpha, seed: seed.to_vec(), backend: BackendName::RsaChallenge }
    }

    pub fn with_backend(mut self, backend: BackendName) -> Self {
        self.backend = backend;
        self
    }
}

#[derive(Clone, Debug)]
pub struct PublicParams {
    pub config: SetupConfig,
    pub group: GroupSpec,
    pub g: GroupElement,
    pub u: Vec<GroupElement>,
    pub v: Vec<u64>,
    pub p2: Poly,
    pub alpha_scalar: FieldElement,
    /// Exponent index of the generator in the `p2^e` term of `q`.
    pub e: u32,
    cache: Cache,
}

#[derive(Clone, Debug)]
struct Cache {
    domain: Domain,
    u_bar: Vec<FieldElement>,
    u_sum: FieldElement,
    x_u: FieldElement,
    x_v: FieldElement,
    v_field: Vec<FieldElement>,
    v_sum: FieldElement,
    p2e: Poly,
    p2e_at_v: Vec<FieldElement>,
    p2_at_v: Vec<FieldElement>,
    p2_at_u1: FieldElement,
    p2_at_index: Vec<FieldElement>,
    u_powers_h2f: Vec<FieldElement>,
    encoding: Vec<u8>,
    digest: Digest32,
}

pub fn setup(config: &SetupConfig) -> Result<PublicParams> {
    let d = config.d;
    let alpha = config.alpha;
    if d == 0 || !d.is_power_of_two() {
        return Err(LumenError::InvalidParams(format!("d = {d} must be a positive power of two")));
    }
    if alpha == 0 {
        return Err(LumenError::InvalidParams("alpha must be at least 1".into()));
    }
    let domain = Domain::new(d)?;
    let spec = match config.backend {
        BackendName::RsaChallenge => GroupSpec::rsa_challenge(),
        BackendName::TestKnownOrder => GroupSpec::test_default(),
    };
    let (group, g, u) = transparent_setup(spec, &config.seed, alpha)?;

    let mut t = Transcript::new(b"lumen/pcs-setup");
    t.absorb(b"seed", &config.seed);
    t.absorb_u64(b"lambda", config.lambda as u64);
    t.absorb_u64(b"d", d as u64);
    t.absorb_u64(b"alpha", alpha as u64);
    t.absorb(b"g", &group.encode(&g));

    let mut v = Vec::with_capacity(alpha);
    while v.len() < alpha {
        let bytes = t.challenge_bytes(b"v");
        let x = u64::from_le_bytes(bytes[..8].try_into().expect("8 bytes"));
        // v_alpha divides in the sum constraint, so it must be a unit
        if v.len() + 1 == alpha && FieldElement::from_u128(x as u128).is_zero() {
            continue;
        }
        v.push(x);
    }
    let p2 = Poly::from_coeffs((0..d).map(|_| t.challenge_field(b"p2")).collect());
    let alpha_scalar = t.challenge_field_avoiding(b"alpha-scalar", |x| x.is_zero());
    PublicParams::assemble(config.clone(), group, g, u, v, p2, alpha_scalar, 1, domain)
}

impl PublicParams {
    #[allow(clippy::too_many_arguments)]
    fn assemble(
        config: SetupConfig,
        group: GroupSpec,
        g: GroupElement,
        u: Vec<GroupElement>,
        v: Vec<u64>,
        p2: Poly,
        alpha_scalar: FieldElement,
        e: u32,
        domain: Domain,
    ) -> Result<Self> {
        let u_enc: Vec<Vec<u8>> = u.iter().map(|x| group.encode(x)).collect();
        let u_bar: Vec<FieldElement> = u_enc.iter().map(|b| hash_to_field(b)).collect();
        let u_sum = u_bar.iter().copied().sum();
        let x_u = hash_to_field(&u_enc.concat());
        let v_bytes: Vec<u8> = v.iter().flat_map(|x| x.to_le_bytes()).collect();
        let x_v = hash_to_field(&v_bytes);
        let v_field: Vec<FieldElement> = v.iter().map(|x| FieldElement::from_u128(*x as u128)).collect();
        let v_sum = v_field.iter().copied().sum();
        let p2e = {
            let mut evals = domain.evaluate(&p2);
            for x in evals.iter_mut() {
                *x = x.pow(e as u64);
            }
            domain.interpolate(&evals)
        };
        let p2e_at_v = v_field.iter().map(|x| p2e.eval(*x)).collect();
        let p2_at_v = v_field.iter().map(|x| p2.eval(*x)).collect();
        let u_powers_h2f = u_bar.clone();

        let mut encoding = Vec::new();
        encoding.extend_from_slice(PP_MAGIC);
        encoding.push(PP_VERSION);
        encoding.extend_from_slice(&config.lambda.to_le_bytes());
        encoding.extend_from_slice(&(config.d as u64).to_le_bytes());
        encoding.extend_from_slice(&(config.alpha as u32).to_le_bytes());
        encoding.push(group.backend().tag());
        encoding.extend_from_slice(&(config.seed.len() as u32).to_le_bytes());
        encoding.extend_from_slice(&config.seed);
        encoding.extend_from_slice(&group.encode(&g));
        for b in &u_enc {
            encoding.extend_from_slice(b);
        }
        encoding.extend_from_slice(&v_bytes);
        p2.write_bytes(&mut encoding);
        encoding.extend_from_slice(&alpha_scalar.to_bytes());
        encoding.extend_from_slice(&e.to_le_bytes());
        let digest = keccak256(&encoding);
        let p2_at_u1 = p2.eval(u_bar[0]);
        let p2_at_index = (1..=config.alpha as u64).map(|i| p2.eval(FieldElement::new(i))).collect();

        Ok(Self {
            config,
            group,
            g,
            u,
            v,
            p2,
            alpha_scalar,
            e,
            cache: Cache {
                domain,
                u_bar,
                u_sum,
                x_u,
                x_v,
                v_field,
                v_sum,
                p2e,
                p2e_at_v,
                p2_at_v,
                p2_at_u1,
                p2_at_index,
                u_powers_h2f,
                encoding,
                digest,
            },
        })
    }

    /// Parameters are stored by their encoding; loading re-runs setup from the
    /// embedded configuration and requires a byte-identical result.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let bad = |m: &str| LumenError::Malformed(format!("public parameters: {m}"));
        let mut pos = 0usize;
        let mut take = |n: usize| -> Result<&[u8]> {
            let out = bytes.get(pos..pos + n).ok_or_else(|| bad("truncated"))?;
            pos += n;
            Ok(out)
        };
        if take(4)? != PP_MAGIC {
            return Err(bad("bad magic"));
        }
        if take(1)?[0] != PP_VERSION {
            return Err(bad("unsupported version"));
        }
        let lambda = u32::from_le_bytes(take(4)?.try_into().expect("4 bytes"));
        let d = u64::from_le_bytes(take(8)?.try_into().expect("8 bytes"));
        let alpha = u32::from_le_bytes(take(4)?.try_into().expect("4 bytes"));
        let backend = match take(1)?[0] {
            0 => BackendName::RsaChallenge,
            1 => BackendName::TestKnownOrder,
            _ => return Err(bad("unknown backend")),
        };
        let seed_len = u32::from_le_bytes(take(4)?.try_into().expect("4 bytes")) as usize;
        let seed = take(seed_len)?.to_vec();
        if d > MAX_STORED_D || alpha as u64 > MAX_STORED_ALPHA {
            return Err(bad("d or alpha beyond the loadable range"));
        }
        let config = SetupConfig { lambda, d: d as usize, alpha: alpha as usize, seed, backend };
        let pp = setup(&config).map_err(|e| bad(&e.to_string()))?;
        if pp.encoding() != bytes {
            return Err(bad("encoding does not regenerate"));
        }
        Ok(pp)
    }

    pub fn d(&self) -> usize {
        self.config.d
    }

    pub fn alpha(&self) -> usize {
        self.config.alpha
    }

    pub fn backend(&self) -> Backend {
        self.group.backend()
    }

    pub fn domain(&self) -> &Domain {
        &self.cache.domain
    }

    /// `ū_i`: hash-to-field of the encoding of `u_i`.
    pub fn u_bar(&self) -> &[FieldElement] {
        &self.cache.u_bar
    }

    /// `Σ_{g∈u} ĝ`
    pub fn u_sum(&self) -> FieldElement {
        self.cache.u_sum
    }

    /// Canonical evaluation point attached to `u`.
    pub fn x_u(&self) -> FieldElement {
        self.cache.x_u
    }

    /// Canonical evaluation point attached to `v`.
    pub fn x_v(&self) -> FieldElement {
        self.cache.x_v
    }

    pub fn v_field(&self) -> &[FieldElement] {
        &self.cache.v_field
    }

    pub fn v_sum(&self) -> FieldElement {
        self.cache.v_sum
    }

    /// `p2^e mod x^d - 1`
    pub fn p2e(&self) -> &Poly {
        &self.cache.p2e
    }

    pub fn p2e_at_v(&self) -> &[FieldElement] {
        &self.cache.p2e_at_v
    }

    pub fn p2_at_v(&self) -> &[FieldElement] {
        &self.cache.p2_at_v
    }

    /// `p2(ū_1)`, kept so verification never touches a degree-`d` polynomial.
    pub fn p2_at_u1(&self) -> FieldElement {
        self.cache.p2_at_u1
    }

    /// `[p2(1), .., p2(α)]`
    pub fn p2_at_index(&self) -> &[FieldElement] {
        &self.cache.p2_at_index
    }

    /// Hash-to-field of `g^k` for `1 <= k <= alpha`.
    pub fn h2f_g_pow(&self, k: usize) -> FieldElement {
        self.cache.u_powers_h2f[k - 1]
    }

    pub fn encoding(&self) -> &[u8] {
        &self.cache.encoding
    }

    pub fn digest(&self) -> Digest32 {
        self.cache.digest
    }

    /// Hash-to-field of the parameter digest.
    pub fn digest_field(&self) -> FieldElement {
        digest_to_field(&self.cache.digest)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    #[test]
    fn deterministic_regeneration() {
        let cfg = SetupConfig::new(16, 3, b"det");
        let a = setup(&cfg).unwrap();
        let b = setup(&cfg).unwrap();
        assert_eq!(a.encoding(), b.encoding());
        assert_eq!(a.digest(), b.digest());
        let c = setup(&SetupConfig::new(16, 3, b"other")).unwrap();
        assert_ne!(a.digest(), c.digest());
    }

    #[test]
    fn rejects_bad_params() {
        assert!(matches!(setup(&SetupConfig::new(0, 2, b"x")), Err(LumenError::InvalidParams(_))));
        assert!(matches!(setup(&SetupConfig::new(8, 0, b"x")), Err(LumenError::InvalidParams(_))));
        assert!(matches!(setup(&SetupConfig::new(12, 2, b"x")), Err(LumenError::InvalidParams(_))));
    }

    #[test]
    fn power_chain_alpha_three() {
        let pp = setup(&SetupConfig::new(8, 3, b"chain")).unwrap();
        assert_eq!(pp.u.len(), 3);
        for (i, ui) in pp.u.iter().enumerate() {
            assert_eq!(*ui, pp.group.gpow(&pp.g, &BigInt::from(i + 1)));
        }
        assert!(pp.p2.degree().unwrap_or(0) < 8);
        assert!(!pp.alpha_scalar.is_zero());
    }

    #[test]
    fn test_backend_setup() {
        let cfg = SetupConfig::new(8, 2, b"t").with_backend(BackendName::TestKnownOrder);
        let pp = setup(&cfg).unwrap();
        assert_eq!(pp.backend(), Backend::TestKnownOrder);
        assert_eq!(pp.group.gpow_u64(&pp.g, 101), pp.group.identity());
    }

    #[test]
    fn bytes_roundtrip_and_tamper() {
        let pp = setup(&SetupConfig::new(16, 2, b"load")).unwrap();
        let back = PublicParams::from_bytes(pp.encoding()).unwrap();
        assert_eq!(back.digest(), pp.digest());
        let mut bad = pp.encoding().to_vec();
        let last = bad.len() - 1;
        bad[last] ^= 1;
        assert!(matches!(PublicParams::from_bytes(&bad), Err(LumenError::Malformed(_))));
        assert!(PublicParams::from_bytes(&pp.encoding()[..10]).is_err());
    }
}
