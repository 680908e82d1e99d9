//! The sum constraint over `(u, v, w, r, s, t)` and the bivariate readings
//! `a, b, d, e` with the disclosures `m = a(1, q)`, `n = b(p, 1)`, `r = e(p, q)`.
//!
//! Vectors are 1-indexed in the formulas: `u_i = i` (exponent index of
//! `g^i`), `w_i = u_i·v_i`, `r_i = ρ_i x^i`, `s_i = σ_i x^i`, `t_i = θ_i x^i`
//! with `ρ_i = f(ū_i)`, `σ_i = p1(v_i)`, `θ_i = p2(v_i)`.

use super::commit::{Commitment, CommitmentRef, OpeningHint};
use super::params::PublicParams;
use crate::field_poly::FieldElement;
use crate::transcript_hash::Transcript;

type F = FieldElement;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyPolyTrace {
    pub rho: Vec<F>,
    pub sigma: Vec<F>,
    pub w: Vec<u128>,
    pub phi: F,
    pub m: F,
    pub n: F,
    pub r_scalar: F,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VerifyPolyChallenges {
    pub z: F,
    pub p: F,
    pub q: F,
}

/// Per-index scalar data feeding every formula.
#[derive(Clone, Debug)]
pub struct TraceVectors {
    pub u: Vec<F>,
    pub v: Vec<F>,
    pub w: Vec<F>,
    pub rho: Vec<F>,
    pub sigma: Vec<F>,
    pub theta: Vec<F>,
}

impl TraceVectors {
    pub fn new(pp: &PublicParams, rho: &[F], sigma: &[F], w: &[u128]) -> Self {
        let alpha = pp.alpha();
        Self {
            u: (1..=alpha as u64).map(F::new).collect(),
            v: pp.v_field().to_vec(),
            w: w.iter().map(|x| F::from_u128(*x)).collect(),
            rho: rho.to_vec(),
            sigma: sigma.to_vec(),
            theta: pp.p2_at_v().to_vec(),
        }
    }

    fn alpha(&self) -> u64 {
        self.u.len() as u64
    }

    /// `Σ u_i r_i + Σ v_i s_i + Σ w_i (x^α t_i − (x^i + x^{−i})) + Σ u_i t_i / (v_α x^α)` at `x`.
    pub fn sigma_constraint(&self, x: F) -> F {
        let alpha = self.alpha();
        let xa = x.pow(alpha);
        let x_inv = x.inverse().expect("nonzero point");
        let denom = (self.v[self.v.len() - 1] * xa).inverse().expect("v_alpha is a unit");
        let mut acc = F::ZERO;
        let (mut xi, mut xi_inv) = (F::ONE, F::ONE);
        for i in 0..self.u.len() {
            xi *= x;
            xi_inv *= x_inv;
            let (r, s, t) = (self.rho[i] * xi, self.sigma[i] * xi, self.theta[i] * xi);
            acc += self.u[i] * r + self.v[i] * s;
            acc += self.w[i] * (xa * t - (xi + xi_inv));
            acc += self.u[i] * t * denom;
        }
        acc
    }

    /// `a(x, y) = Σ u_i x^i y^{−i} + y^α Σ v_i x^{−i} − x^α y Σ w_i`
    pub fn a(&self, x: F, y: F) -> F {
        let alpha = self.alpha();
        let (x_inv, y_inv) = (x.inverse().expect("nonzero"), y.inverse().expect("nonzero"));
        let mut s1 = F::ZERO;
        let mut s2 = F::ZERO;
        let (mut xy, mut xi_inv) = (F::ONE, F::ONE);
        for i in 0..self.u.len() {
            xy *= x * y_inv;
            xi_inv *= x_inv;
            s1 += self.u[i] * xy;
            s2 += self.v[i] * xi_inv;
        }
        let sw: F = self.w.iter().copied().sum();
        s1 + y.pow(alpha) * s2 - x.pow(alpha) * y * sw
    }

    /// `b(x, y) = x^α Σ u_i y^i − Σ v_i (y^{−α} − x^i) − Σ w_i y^i (x^{−i} − x^i)`
    pub fn b(&self, x: F, y: F) -> F {
        let alpha = self.alpha();
        let x_inv = x.inverse().expect("nonzero");
        let y_neg_alpha = y.inverse().expect("nonzero").pow(alpha);
        let (mut s_u, mut s_v, mut s_w) = (F::ZERO, F::ZERO, F::ZERO);
        let (mut xi, mut xi_inv, mut yi) = (F::ONE, F::ONE, F::ONE);
        for i in 0..self.u.len() {
            xi *= x;
            xi_inv *= x_inv;
            yi *= y;
            s_u += self.u[i] * yi;
            s_v += self.v[i] * (y_neg_alpha - xi);
            s_w += self.w[i] * yi * (xi_inv - xi);
        }
        x.pow(alpha) * s_u - s_v - s_w
    }

    /// `d(x, y) = Σ (x^{−i} − y^i) u_i ρ_i − x^{−α} Σ v_i w_i + Π_i w_i x^{−i−α}`
    pub fn d(&self, x: F, y: F) -> F {
        let alpha = self.alpha();
        let x_inv = x.inverse().expect("nonzero");
        let mut s = F::ZERO;
        let mut svw = F::ZERO;
        let mut prod = F::ONE;
        let (mut xi_inv, mut yi) = (F::ONE, F::ONE);
        let x_neg_alpha = x_inv.pow(alpha);
        for i in 0..self.u.len() {
            xi_inv *= x_inv;
            yi *= y;
            s += (xi_inv - yi) * self.u[i] * self.rho[i];
            svw += self.v[i] * self.w[i];
            prod *= self.w[i] * xi_inv * x_neg_alpha;
        }
        s - x_neg_alpha * svw + prod
    }

    /// `e(x, y) = a(x, 1) + b(1, y) − d(x, y)`
    pub fn e(&self, x: F, y: F) -> F {
        self.a(x, F::ONE) + self.b(F::ONE, y) - self.d(x, y)
    }
}

fn nonzero(t: &mut Transcript, label: &[u8]) -> F {
    t.challenge_field_avoiding(label, |x| x.is_zero())
}

fn derive_challenges(t: &mut Transcript, digest: &[u8], rho: &[F], sigma: &[F]) -> VerifyPolyChallenges {
    t.absorb(b"pcs/vp/commitment", digest);
    t.absorb_fields(b"pcs/vp/rho", rho);
    t.absorb_fields(b"pcs/vp/sigma", sigma);
    VerifyPolyChallenges {
        z: nonzero(t, b"pcs/vp/z"),
        p: nonzero(t, b"pcs/vp/p"),
        q: nonzero(t, b"pcs/vp/q"),
    }
}

fn absorb_disclosures(t: &mut Transcript, trace: &VerifyPolyTrace) {
    t.absorb_fields(b"pcs/vp/disclosures", &[trace.phi, trace.m, trace.n, trace.r_scalar]);
}

pub fn encoding_w(pp: &PublicParams) -> Vec<u128> {
    pp.v.iter().enumerate().map(|(i, v)| (i as u128 + 1) * *v as u128).collect()
}

pub fn build_verify_poly_trace(
    pp: &PublicParams,
    com: &Commitment,
    hint: &OpeningHint,
    t: &mut Transcript,
) -> (VerifyPolyTrace, VerifyPolyChallenges) {
    let rho: Vec<F> = pp.u_bar().iter().map(|x| hint.f.eval(*x)).collect();
    let sigma: Vec<F> = pp.v_field().iter().map(|x| hint.p1.eval(*x)).collect();
    trace_from_values(pp, &com.digest(), rho, sigma, t)
}

/// Completes a trace from `ρ, σ` alone, with the same transcript steps as
/// [`build_verify_poly_trace`]; the simulator's entry point.
pub fn trace_from_values(
    pp: &PublicParams,
    digest: &[u8],
    rho: Vec<F>,
    sigma: Vec<F>,
    t: &mut Transcript,
) -> (VerifyPolyTrace, VerifyPolyChallenges) {
    let w = encoding_w(pp);
    let ch = derive_challenges(t, digest, &rho, &sigma);
    let vecs = TraceVectors::new(pp, &rho, &sigma, &w);
    let trace = VerifyPolyTrace {
        phi: vecs.sigma_constraint(ch.z),
        m: vecs.a(F::ONE, ch.q),
        n: vecs.b(ch.p, F::ONE),
        r_scalar: vecs.e(ch.p, ch.q),
        rho,
        sigma,
        w,
    };
    absorb_disclosures(t, &trace);
    (trace, ch)
}

pub fn verify_poly(pp: &PublicParams, com: CommitmentRef<'_>, trace: &VerifyPolyTrace, t: &mut Transcript) -> bool {
    let alpha = pp.alpha();
    if trace.rho.len() != alpha || trace.sigma.len() != alpha || trace.w != encoding_w(pp) {
        return false;
    }
    let ch = derive_challenges(t, &com.digest(), &trace.rho, &trace.sigma);
    let vecs = TraceVectors::new(pp, &trace.rho, &trace.sigma, &trace.w);
    let mut ok = trace.phi == vecs.sigma_constraint(ch.z)
        && trace.m == vecs.a(F::ONE, ch.q)
        && trace.n == vecs.b(ch.p, F::ONE)
        && trace.r_scalar == vecs.e(ch.p, ch.q);
    if let Some(full) = com.full() {
        // q = (Σv)·p1 + p2^e evaluated at each v_i ties σ to the commitment
        for i in 0..alpha {
            let lhs = full.q().eval(pp.v_field()[i]);
            let rhs = pp.v_sum() * trace.sigma[i] + pp.p2e_at_v()[i];
            ok &= lhs == rhs;
        }
    }
    absorb_disclosures(t, trace);
    ok
}
