//! Evaluation argument: claims `y1 = f(x̄_u)`, `y2 = f(x_v)` backed by the
//! split `f = b̂·h1 − h2` with `b̂ = b mod d`.

use num_bigint::BigUint;
use rand::Rng;

use super::commit::{Commitment, CommitmentRef, OpeningHint};
use super::params::PublicParams;
use super::verify_poly::VerifyPolyTrace;
use crate::error::{LumenError, Result};
use crate::field_poly::{FieldElement, Poly};
use crate::transcript_hash::Transcript;

type F = FieldElement;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EvalClaims {
    pub y1: F,
    pub y2: F,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EvalProof {
    pub b_hat: F,
    pub h1_u: F,
    pub h2_u: F,
    pub v_prime: F,
    pub u_prime: F,
    /// `c(ζ)` at the closing challenge.
    pub c_prime: F,
}

impl EvalProof {
    pub const FIELDS: usize = 6;

    pub fn to_fields(&self) -> [F; Self::FIELDS] {
        [self.b_hat, self.h1_u, self.h2_u, self.v_prime, self.u_prime, self.c_prime]
    }

    pub fn from_fields(f: [F; Self::FIELDS]) -> Self {
        Self { b_hat: f[0], h1_u: f[1], h2_u: f[2], v_prime: f[3], u_prime: f[4], c_prime: f[5] }
    }
}

/// `b` drawn from the nonzero residues mod `d` (only `0` exists when `d = 1`),
/// so the `h1` values always enter the checks.
fn derive_b(pp: &PublicParams, t: &mut Transcript) -> Result<BigUint> {
    let d = pp.d() as u64;
    if d == 0 {
        return Err(LumenError::ChallengeDomainError);
    }
    if d == 1 {
        return Ok(BigUint::from(t.challenge_exponent(b"pcs/eval/b", 1)?));
    }
    Ok(BigUint::from(1 + t.challenge_exponent(b"pcs/eval/b", d - 1)?))
}

fn b_hat(pp: &PublicParams, b: &BigUint) -> F {
    let r = b % BigUint::from(pp.d() as u64);
    F::new(r.iter_u64_digits().next().unwrap_or(0))
}

fn absorb_claims(t: &mut Transcript, digest: &[u8], x_v: F, claims: &EvalClaims) {
    t.absorb(b"pcs/eval/commitment", digest);
    t.absorb_field(b"pcs/eval/x_v", x_v);
    t.absorb_fields(b"pcs/eval/claims", &[claims.y1, claims.y2]);
}

/// Step-3/4 values `p1(v_1) + α·v_1` and `p2(ū_1) + α·ū_1`; both sides
/// recompute them (from the trace and the parameters) and bind them.
fn absorb_display(pp: &PublicParams, t: &mut Transcript, sigma1: F) {
    let v1 = pp.v_field()[0];
    let u1 = pp.u_bar()[0];
    let disp_v = sigma1 + pp.alpha_scalar * v1;
    let disp_u = pp.p2_at_u1() + pp.alpha_scalar * u1;
    t.absorb_fields(b"pcs/eval/display", &[disp_v, disp_u]);
}

fn alpha_field(pp: &PublicParams) -> F {
    F::new(pp.alpha() as u64)
}

pub fn eval_prove(
    pp: &PublicParams,
    com: &Commitment,
    hint: &OpeningHint,
    x_v: F,
    t: &mut Transcript,
    rng: &mut impl Rng,
) -> Result<(EvalClaims, EvalProof)> {
    eval_prove_inner(pp, com, hint, x_v, t, rng, None)
}

/// As [`eval_prove`] with `b` fixed instead of drawn; the verifier must be
/// given the same value through [`eval_verify_with_b`].
#[doc(hidden)]
pub fn eval_prove_with_b(
    pp: &PublicParams,
    com: &Commitment,
    hint: &OpeningHint,
    x_v: F,
    t: &mut Transcript,
    rng: &mut impl Rng,
    b: &BigUint,
) -> Result<(EvalClaims, EvalProof)> {
    eval_prove_inner(pp, com, hint, x_v, t, rng, Some(b))
}

fn eval_prove_inner(
    pp: &PublicParams,
    com: &Commitment,
    hint: &OpeningHint,
    x_v: F,
    t: &mut Transcript,
    rng: &mut impl Rng,
    forced_b: Option<&BigUint>,
) -> Result<(EvalClaims, EvalProof)> {
    let claims = EvalClaims { y1: hint.f.eval(pp.x_u()), y2: hint.f.eval(x_v) };
    absorb_claims(t, &com.digest(), x_v, &claims);
    let drawn = derive_b(pp, t)?;
    let bh = b_hat(pp, forced_b.unwrap_or(&drawn));
    let h1 = Poly::from_coeffs((0..pp.d()).map(|_| F::new(rng.gen())).collect());
    let h2 = &h1.scale(bh) - &hint.f;
    let h1_u = h1.eval(pp.x_u());
    let h2_u = h2.eval(pp.x_u());
    let v_prime = h1.eval(x_v);
    let u_prime = h2.eval(x_v) / alpha_field(pp);
    t.absorb_fields(b"pcs/eval/split", &[bh, h1_u, h2_u, v_prime, u_prime]);
    absorb_display(pp, t, hint.p1.eval(pp.v_field()[0]));
    let zeta = t.challenge_field(b"pcs/eval/zeta");
    let c_prime = com.c().eval(zeta);
    t.absorb_field(b"pcs/eval/c-prime", c_prime);
    Ok((claims, EvalProof { b_hat: bh, h1_u, h2_u, v_prime, u_prime, c_prime }))
}

/// An evaluation proof for given claims without the polynomial: `h1(x̄_u)`,
/// `h1(x_v)` and `c(ζ)` are sampled and `h2` values solved from the claims.
pub fn simulate_eval_proof(
    pp: &PublicParams,
    digest: &[u8],
    x_v: F,
    claims: &EvalClaims,
    sigma1: F,
    t: &mut Transcript,
    rng: &mut impl Rng,
) -> Result<EvalProof> {
    absorb_claims(t, digest, x_v, claims);
    let bh = b_hat(pp, &derive_b(pp, t)?);
    let h1_u = F::new(rng.gen());
    let v_prime = F::new(rng.gen());
    let h2_u = bh * h1_u - claims.y1;
    let u_prime = (bh * v_prime - claims.y2) / alpha_field(pp);
    t.absorb_fields(b"pcs/eval/split", &[bh, h1_u, h2_u, v_prime, u_prime]);
    absorb_display(pp, t, sigma1);
    let _zeta = t.challenge_field(b"pcs/eval/zeta");
    let c_prime = F::new(rng.gen());
    t.absorb_field(b"pcs/eval/c-prime", c_prime);
    Ok(EvalProof { b_hat: bh, h1_u, h2_u, v_prime, u_prime, c_prime })
}

pub fn eval_verify(
    pp: &PublicParams,
    com: CommitmentRef<'_>,
    x_v: F,
    claims: &EvalClaims,
    proof: &EvalProof,
    trace: &VerifyPolyTrace,
    t: &mut Transcript,
) -> Result<bool> {
    eval_verify_inner(pp, com, x_v, claims, proof, trace, t, None)
}

#[doc(hidden)]
#[allow(clippy::too_many_arguments)]
pub fn eval_verify_with_b(
    pp: &PublicParams,
    com: CommitmentRef<'_>,
    x_v: F,
    claims: &EvalClaims,
    proof: &EvalProof,
    trace: &VerifyPolyTrace,
    t: &mut Transcript,
    b: &BigUint,
) -> Result<bool> {
    eval_verify_inner(pp, com, x_v, claims, proof, trace, t, Some(b))
}

#[allow(clippy::too_many_arguments)]
fn eval_verify_inner(
    pp: &PublicParams,
    com: CommitmentRef<'_>,
    x_v: F,
    claims: &EvalClaims,
    proof: &EvalProof,
    trace: &VerifyPolyTrace,
    t: &mut Transcript,
    forced_b: Option<&BigUint>,
) -> Result<bool> {
    absorb_claims(t, &com.digest(), x_v, claims);
    let drawn = derive_b(pp, t)?;
    let bh = b_hat(pp, forced_b.unwrap_or(&drawn));
    t.absorb_fields(b"pcs/eval/split", &[proof.b_hat, proof.h1_u, proof.h2_u, proof.v_prime, proof.u_prime]);
    let Some(sigma1) = trace.sigma.first() else {
        return Ok(false);
    };
    absorb_display(pp, t, *sigma1);
    let zeta = t.challenge_field(b"pcs/eval/zeta");
    t.absorb_field(b"pcs/eval/c-prime", proof.c_prime);

    let mut ok = proof.b_hat == bh;
    ok &= claims.y1 == bh * proof.h1_u - proof.h2_u;
    ok &= claims.y2 == bh * proof.v_prime - proof.u_prime * alpha_field(pp);
    if let Some(full) = com.full() {
        ok &= proof.c_prime == full.c().eval(zeta);
    }
    Ok(ok)
}
