//! Recursive aggregation. Steps are folded into `(G_t, C_t)` without being
//! verified; a single [`finalize_verify`] checks the whole chain.
//!
//! * `G_t = G_{t−1} + H(G_{t−1} ‖ digest(c_t) ‖ k_t ‖ r, s, t)`, `G_0 = H(pp)`
//! * `C_t = C_{t−1} + c_t(ρ_t)·c_t` with `ρ_t = H(c_{t−1})`, `c_{−1}` standing for `pp`
//! * per step, `Σ u_i r_i + Σ v_i s_i + Σ w_i t_i = H(g^k)` as polynomials

use crate::error::{LumenError, Result};
use crate::field_poly::{FieldElement, Poly};
use crate::pcs::{Commitment, OpeningHint, PublicParams};
use crate::transcript_hash::{digest_to_field, keccak256_parts, Digest32, Transcript};

type F = FieldElement;

pub const AGGREGATE_MAGIC: &[u8; 4] = b"LUMA";
pub const AGGREGATE_VERSION: u8 = 1;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AggregateState {
    pub g_acc: F,
    pub c_acc: Poly,
    pub k: usize,
    pub step_count: usize,
    pub last_digest: Digest32,
}

#[derive(Clone, Debug)]
pub struct AggregationStep {
    pub commitment: Commitment,
    pub p1: Poly,
    pub p2: Poly,
    pub u: Vec<u64>,
    pub v: Vec<u64>,
    pub w: Vec<u128>,
    pub r: Vec<Poly>,
    pub s: Vec<Poly>,
    pub t: Vec<Poly>,
    pub k: usize,
}

/// Public part of a step, as carried by the aggregate digest.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepRecord {
    pub commitment: Commitment,
    pub k: usize,
    pub r: Vec<Poly>,
    pub s: Vec<Poly>,
    pub t: Vec<Poly>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AggregateDigest {
    pub steps: Vec<StepRecord>,
}

/// `k = 1 + (H(digest) mod α)`
pub fn step_exponent(pp: &PublicParams, digest: &Digest32) -> usize {
    1 + (digest_to_field(digest).value() % pp.alpha() as u64) as usize
}

fn sigma_poly(pp: &PublicParams, r: &[Poly], s: &[Poly], t: &[Poly]) -> Poly {
    let mut acc = Poly::zero();
    for i in 0..pp.alpha() {
        let w = F::from_u128((i as u128 + 1) * pp.v[i] as u128);
        acc = &acc + &r[i].scale(F::new(i as u64 + 1));
        acc = &acc + &s[i].scale(pp.v_field()[i]);
        acc = &acc + &t[i].scale(w);
    }
    acc
}

impl AggregationStep {
    pub fn new(pp: &PublicParams, commitment: Commitment, hint: &OpeningHint) -> Self {
        let alpha = pp.alpha();
        let u: Vec<u64> = (1..=alpha as u64).collect();
        let v = pp.v.clone();
        let w: Vec<u128> = u.iter().zip(&v).map(|(a, b)| *a as u128 * *b as u128).collect();
        let mono = |c: F, i: usize| Poly::monomial(c, i);
        let r: Vec<Poly> = (0..alpha).map(|i| mono(hint.f.eval(pp.u_bar()[i]), i + 1)).collect();
        let s: Vec<Poly> = (0..alpha).map(|i| mono(hint.p1.eval(pp.v_field()[i]), i + 1)).collect();
        let mut t: Vec<Poly> = (0..alpha).map(|i| mono(pp.p2_at_v()[i], i + 1)).collect();
        let k = step_exponent(pp, &commitment.digest());
        // replace t_α so the weighted sum collapses to the constant H(g^k)
        t[alpha - 1] = Poly::zero();
        let partial = sigma_poly(pp, &r, &s, &t);
        let w_alpha = F::from_u128(w[alpha - 1]);
        let target = Poly::constant(pp.h2f_g_pow(k));
        t[alpha - 1] = (&target - &partial).scale(w_alpha.inverse().expect("w_alpha is a unit"));
        Self { commitment, p1: hint.p1.clone(), p2: pp.p2.clone(), u, v, w, r, s, t, k }
    }

    pub fn record(&self) -> StepRecord {
        StepRecord {
            commitment: self.commitment.clone(),
            k: self.k,
            r: self.r.clone(),
            s: self.s.clone(),
            t: self.t.clone(),
        }
    }
}

pub fn agg_init(pp: &PublicParams) -> AggregateState {
    AggregateState {
        g_acc: pp.digest_field(),
        c_acc: Poly::zero(),
        k: 1,
        step_count: 0,
        last_digest: pp.digest(),
    }
}

fn polys_bytes(polys: &[Poly]) -> Vec<u8> {
    let mut out = Vec::new();
    for p in polys {
        p.write_bytes(&mut out);
    }
    out
}

fn g_increment(g_prev: F, record: &StepRecord) -> F {
    let d = keccak256_parts(&[
        b"lumen/agg/g",
        &g_prev.to_bytes(),
        &record.commitment.digest(),
        &(record.k as u64).to_le_bytes(),
        &polys_bytes(&record.r),
        &polys_bytes(&record.s),
        &polys_bytes(&record.t),
    ]);
    digest_to_field(&d)
}

pub fn agg_step(pp: &PublicParams, state: &AggregateState, step: &AggregationStep) -> Result<AggregateState> {
    let alpha = pp.alpha();
    if step.u.len() != alpha || step.v.len() != alpha || step.w.len() != alpha {
        return Err(LumenError::MalformedStep(format!("vectors must have length {alpha}")));
    }
    if step.u.iter().zip(&step.v).zip(&step.w).any(|((a, b), w)| *a as u128 * *b as u128 != *w) {
        return Err(LumenError::MalformedStep("w is not the componentwise product of u and v".into()));
    }
    if step.r.len() != alpha || step.s.len() != alpha || step.t.len() != alpha {
        return Err(LumenError::MalformedStep(format!("polynomial vectors must have length {alpha}")));
    }
    if step.commitment.d() != pp.d() {
        return Err(LumenError::MalformedStep("commitment degree bound differs from the parameters".into()));
    }
    let record = step.record();
    let rho = digest_to_field(&state.last_digest);
    let c = step.commitment.c();
    Ok(AggregateState {
        g_acc: state.g_acc + g_increment(state.g_acc, &record),
        c_acc: (&state.c_acc + &c.scale(c.eval(rho))).mod_cyclotomic(pp.d()),
        k: step.k,
        step_count: state.step_count + 1,
        last_digest: step.commitment.digest(),
    })
}

/// Folds steps while collecting the digest the final verifier consumes.
#[derive(Clone, Debug)]
pub struct Aggregator {
    pub state: AggregateState,
    pub digest: AggregateDigest,
}

impl Aggregator {
    pub fn new(pp: &PublicParams) -> Self {
        Self { state: agg_init(pp), digest: AggregateDigest::default() }
    }

    pub fn push(&mut self, pp: &PublicParams, step: &AggregationStep) -> Result<()> {
        self.state = agg_step(pp, &self.state, step)?;
        self.digest.steps.push(step.record());
        Ok(())
    }
}

pub fn finalize_verify(pp: &PublicParams, state: &AggregateState, digest: &AggregateDigest) -> bool {
    let alpha = pp.alpha();
    if state.step_count != digest.steps.len() {
        return false;
    }
    if state.c_acc.len() > pp.d() {
        return false;
    }
    let mut g = pp.digest_field();
    let mut prev = pp.digest();
    let mut t = Transcript::new(b"lumen/aggregate");
    t.absorb(b"agg/pp", &pp.digest());
    t.absorb_field(b"agg/g", state.g_acc);
    t.absorb(b"agg/c", &state.c_acc.to_bytes());
    for rec in &digest.steps {
        if rec.r.len() != alpha || rec.s.len() != alpha || rec.t.len() != alpha {
            return false;
        }
        if rec.commitment.d() != pp.d() || rec.k != step_exponent(pp, &rec.commitment.digest()) {
            return false;
        }
        g += g_increment(g, rec);
        t.absorb(b"agg/step", &rec.commitment.digest());
        prev = rec.commitment.digest();
    }
    if g != state.g_acc || (!digest.steps.is_empty() && prev != state.last_digest) {
        return false;
    }
    let z = t.challenge_field(b"agg/z");
    let lambda = t.challenge_field(b"agg/lambda");

    // C_t(z) against Σ c_i(ρ_i)·c_i(z), and the batched Σ = H(g^k) conjunct
    let mut c_expect = F::ZERO;
    let mut sigma_batch = F::ZERO;
    let mut lam = F::ONE;
    let mut rho_digest = pp.digest();
    for rec in &digest.steps {
        let c = rec.commitment.c();
        c_expect += c.eval(digest_to_field(&rho_digest)) * c.eval(z);
        rho_digest = rec.commitment.digest();
        let s = sigma_poly(pp, &rec.r, &rec.s, &rec.t).eval(z);
        sigma_batch += lam * (s - pp.h2f_g_pow(rec.k));
        lam *= lambda;
    }
    state.c_acc.eval(z) == c_expect && sigma_batch.is_zero()
}

impl AggregateDigest {
    /// Step count (4-byte LE), then per step: commitment encoding, `k`, and
    /// the `r`, `s`, `t` polynomials.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(AGGREGATE_MAGIC);
        out.push(AGGREGATE_VERSION);
        out.extend_from_slice(&(self.steps.len() as u32).to_le_bytes());
        for rec in &self.steps {
            rec.commitment.write_bytes(&mut out);
            out.extend_from_slice(&(rec.k as u32).to_le_bytes());
            out.extend_from_slice(&(rec.r.len() as u32).to_le_bytes());
            for p in rec.r.iter().chain(&rec.s).chain(&rec.t) {
                p.write_bytes(&mut out);
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let malformed = |m: &str| LumenError::Malformed(format!("aggregate digest: {m}"));
        if bytes.len() < 9 || &bytes[..4] != AGGREGATE_MAGIC || bytes[4] != AGGREGATE_VERSION {
            return Err(malformed("bad header"));
        }
        let count = u32::from_le_bytes(bytes[5..9].try_into().expect("4 bytes")) as usize;
        let mut rest = &bytes[9..];
        let mut steps = Vec::new();
        for _ in 0..count {
            let (commitment, r) = Commitment::read_bytes(rest)?;
            if r.len() < 8 {
                return Err(malformed("truncated step"));
            }
            let k = u32::from_le_bytes(r[..4].try_into().expect("4 bytes")) as usize;
            let alpha = u32::from_le_bytes(r[4..8].try_into().expect("4 bytes")) as usize;
            rest = &r[8..];
            let mut polys = Vec::with_capacity(3 * alpha.min(1 << 16));
            for _ in 0..3 * alpha {
                let (p, r) = Poly::read_bytes(rest)?;
                polys.push(p);
                rest = r;
            }
            let t = polys.split_off(2 * alpha);
            let s = polys.split_off(alpha);
            steps.push(StepRecord { commitment, k, r: polys, s, t });
        }
        if !rest.is_empty() {
            return Err(malformed("trailing bytes"));
        }
        Ok(Self { steps })
    }
}

impl AggregateState {
    /// `G_t` then `C_t` in their standard encodings, then `k` and the step count.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = self.g_acc.to_bytes().to_vec();
        self.c_acc.write_bytes(&mut out);
        out.extend_from_slice(&(self.k as u32).to_le_bytes());
        out.extend_from_slice(&(self.step_count as u32).to_le_bytes());
        out.extend_from_slice(&self.last_digest);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let malformed = || LumenError::Malformed("aggregate state".into());
        if bytes.len() < 8 {
            return Err(malformed());
        }
        let g_acc = F::from_bytes(&bytes[..8])?;
        let (c_acc, rest) = Poly::read_bytes(&bytes[8..])?;
        if rest.len() != 40 {
            return Err(malformed());
        }
        Ok(Self {
            g_acc,
            c_acc,
            k: u32::from_le_bytes(rest[..4].try_into().expect("4 bytes")) as usize,
            step_count: u32::from_le_bytes(rest[4..8].try_into().expect("4 bytes")) as usize,
            last_digest: rest[8..40].try_into().expect("32 bytes"),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pcs::{commit, setup, SetupConfig};
    use crate::transcript_hash::{hash_to_field, keccak256};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    fn steps(pp: &PublicParams, n: usize, seed: u64) -> Vec<AggregationStep> {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| {
                let f = Poly::from_coeffs((0..pp.d()).map(|_| F::new(rng.gen())).collect());
                let (com, hint) = commit(pp, &f, &mut rng).unwrap();
                AggregationStep::new(pp, com, &hint)
            })
            .collect()
    }

    fn aggregate(pp: &PublicParams, steps: &[AggregationStep]) -> Aggregator {
        let mut agg = Aggregator::new(pp);
        for s in steps {
            agg.push(pp, s).unwrap();
        }
        agg
    }

    #[test]
    fn init_matches_oracle() {
        let pp = setup(&SetupConfig::new(8, 2, b"agg")).unwrap();
        let a = agg_init(&pp);
        assert_eq!(a, agg_init(&pp));
        assert_eq!(a.g_acc, hash_to_field(pp.encoding()));
        assert_eq!(pp.digest(), keccak256(pp.encoding()));
        assert!(finalize_verify(&pp, &a, &AggregateDigest::default()));
    }

    #[test]
    fn honest_aggregates_accept() {
        let pp = setup(&SetupConfig::new(16, 3, b"agg")).unwrap();
        for n in [1, 2, 8] {
            let agg = aggregate(&pp, &steps(&pp, n, n as u64));
            assert!(finalize_verify(&pp, &agg.state, &agg.digest));
            let bytes = agg.digest.to_bytes();
            assert_eq!(AggregateDigest::from_bytes(&bytes).unwrap(), agg.digest);
            assert_eq!(AggregateState::from_bytes(&agg.state.to_bytes()).unwrap(), agg.state);
        }
    }

    #[test]
    fn sum_conjunct_is_exact() {
        let pp = setup(&SetupConfig::new(8, 4, b"agg")).unwrap();
        for s in steps(&pp, 3, 9) {
            let sum = sigma_poly(&pp, &s.r, &s.s, &s.t);
            assert_eq!(sum, Poly::constant(pp.h2f_g_pow(s.k)));
            assert!((1..=4).contains(&s.k));
        }
    }

    #[test]
    fn order_matters() {
        let pp = setup(&SetupConfig::new(8, 2, b"agg")).unwrap();
        let mut st = steps(&pp, 2, 3);
        let a = aggregate(&pp, &st);
        st.swap(0, 1);
        let b = aggregate(&pp, &st);
        assert_ne!(a.state.c_acc, b.state.c_acc);
        // oracle: C_2 = c_1(H(pp))·c_1 + c_2(H(c_1))·c_2 in the swapped order
        let c1 = st[0].commitment.c();
        let c2 = st[1].commitment.c();
        let expect = &c1.scale(c1.eval(pp.digest_field())) + &c2.scale(c2.eval(digest_to_field(&st[0].commitment.digest())));
        assert_eq!(b.state.c_acc, expect.mod_cyclotomic(8));
    }

    #[test]
    fn malformed_step_rejected() {
        let pp = setup(&SetupConfig::new(8, 2, b"agg")).unwrap();
        let mut s = steps(&pp, 1, 4).pop().unwrap();
        s.w[0] += 1;
        assert!(matches!(agg_step(&pp, &agg_init(&pp), &s), Err(LumenError::MalformedStep(_))));
    }

    #[test]
    fn mutated_step_rejected() {
        let pp = setup(&SetupConfig::new(8, 2, b"agg")).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(77);
        let agg = aggregate(&pp, &steps(&pp, 8, 5));
        for _ in 0..50 {
            let mut digest = agg.digest.clone();
            let j = rng.gen_range(0..8);
            let old = digest.steps[j].commitment.clone();
            let mut c = old.c().coeffs().to_vec();
            c.resize(8, F::ZERO);
            c[rng.gen_range(0..8)] += F::new(rng.gen_range(1..1000));
            digest.steps[j].commitment = old.with_c(Poly::from_coeffs(c));
            assert!(!finalize_verify(&pp, &agg.state, &digest));
        }
    }

    #[test]
    fn single_step_matches_direct_check() {
        let pp = setup(&SetupConfig::new(8, 2, b"agg")).unwrap();
        let st = steps(&pp, 1, 6);
        let agg = aggregate(&pp, &st);
        let c = st[0].commitment.c();
        assert_eq!(agg.state.c_acc, c.scale(c.eval(pp.digest_field())));
        assert!(finalize_verify(&pp, &agg.state, &agg.digest));
    }
}
