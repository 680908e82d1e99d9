//! Witness-free transcripts with the same shape as real proofs, plus the
//! scalar summaries `t_α, t_d, t_m, t_n` computed identically on both sides.

use rand::Rng;

use super::encoder::EncodedIndex;
use super::protocol::{
    absorb_digests, absorb_masks, bind_statement, mask_bound, not_in, r1_poly, sparse_polys, Challenges, Opening,
    PiopProof, ProverOutput, PublicPolys, Slot, NUM_COMMITMENTS, NUM_MASKS, SLOTS,
};
use crate::error::{LumenError, Result};
use crate::field_poly::{FieldElement, Poly};
use crate::pcs::{simulate_eval_proof, trace_from_values, EvalClaims, PublicParams};
use crate::transcript_hash::{Digest32, Transcript};

type F = FieldElement;

/// Round-polynomial evaluations at `ε` feeding the summaries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EpsilonEvals {
    pub t_hat: F,
    pub r_hat: F,
    pub y1: F,
    pub y2: F,
    pub s_hat: F,
    pub z: F,
    pub p_hat: F,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Summaries {
    pub t_alpha: F,
    pub t_d: F,
    pub t_m: F,
    pub t_n: F,
}

/// The four summaries over the auxiliary domain `𝕃 = H`, with `x = τ`,
/// `w = φ` and the Lagrange basis anchored at `1`.
pub fn summaries(idx: &EncodedIndex, ch: &Challenges, e: &EpsilonEvals) -> Result<Summaries> {
    let hd = &idx.h_domain;
    let eps = ch.eps;
    let delta = hd.lagrange_eval(F::ONE, eps)?;
    if delta.is_zero() {
        return Err(LumenError::ChallengeDomainError);
    }
    let alpha = idx.alpha;
    let x_alpha = ch.tau.pow(idx.relation.h_bound as u64);
    let sum_l: F = hd.lagrange_coefficients(eps).into_iter().map(|l| x_alpha * l).sum();
    Ok(Summaries {
        t_alpha: e.t_hat * delta + sum_l,
        t_d: e.r_hat * hd.eval_vanishing(eps) + F::ONE,
        t_m: (e.y1 + eps * e.y2) * hd.bivariate_lambda(ch.tau, eps) + e.s_hat * e.z * ch.phi * idx.p4.eval(eps, alpha),
        t_n: (e.p_hat + e.y1 - alpha * e.y2) / delta,
    })
}

pub fn real_epsilon_evals(out: &ProverOutput) -> EpsilonEvals {
    let e = out.challenges.eps;
    let at = |s: Slot| out.polys[s.index()].eval(e);
    EpsilonEvals {
        t_hat: at(Slot::THat),
        r_hat: at(Slot::RHat),
        y1: at(Slot::Y1),
        y2: at(Slot::Y2),
        s_hat: at(Slot::SHat),
        z: at(Slot::Z),
        p_hat: at(Slot::PHat),
    }
}

#[derive(Clone, Debug)]
pub struct SimulatedPiop {
    pub proof: PiopProof,
    pub challenges: Challenges,
    pub t_hat: Poly,
    pub eps_evals: EpsilonEvals,
}

fn nonzero(x: F) -> Result<F> {
    if x.is_zero() {
        Err(LumenError::ChallengeDomainError)
    } else {
        Ok(x)
    }
}

/// Values of every slot at one point: public polynomials evaluated, witness
/// polynomials sampled, `h0`, `h1`, `f̂` solved so the identities hold.
struct PointSolver<'a> {
    pp: &'a PublicParams,
    idx: &'a EncodedIndex,
    public: [Option<&'a Poly>; NUM_COMMITMENTS],
    sigma1: F,
    tau: F,
    eps: F,
}

impl PointSolver<'_> {
    fn solve(&self, x: F, rng: &mut impl Rng) -> Result<[F; NUM_COMMITMENTS]> {
        let mut v = [F::ZERO; NUM_COMMITMENTS];
        for (i, p) in self.public.iter().enumerate() {
            v[i] = match p {
                Some(p) => p.eval(x),
                None => F::new(rng.gen()),
            };
        }
        let hd = &self.idx.h_domain;
        let zh = nonzero(hd.eval_vanishing(x))?;
        let n = F::new(self.idx.n() as u64);
        let get = |v: &[F; NUM_COMMITMENTS], s: Slot| v[s.index()];
        v[Slot::H0.index()] = (get(&v, Slot::Y1) * get(&v, Slot::Y2) - get(&v, Slot::Z)) / zh;
        let outer = get(&v, Slot::SHat)
            + hd.bivariate_lambda(self.tau, x) * (get(&v, Slot::Y1) + self.eps * get(&v, Slot::Y2))
            - self.idx.matrix_eval(self.tau, self.eps, x) * get(&v, Slot::Z)
            - x * get(&v, Slot::G1)
            - self.sigma1 / n;
        v[Slot::H1.index()] = outer / zh;
        v[Slot::FHat.index()] = get(&v, Slot::GHat) + self.pp.alpha_scalar * get(&v, Slot::HHat);
        Ok(v)
    }
}

fn random_digests(k: usize, rng: &mut impl Rng) -> Vec<Digest32> {
    (0..k).map(|_| rng.gen()).collect()
}

/// A witness-free run of the prover's transcript schedule.
pub fn simulate(pp: &PublicParams, idx: &EncodedIndex, t: &mut Transcript, rng: &mut impl Rng) -> Result<SimulatedPiop> {
    bind_statement(pp, idx, t);
    let bound = mask_bound(idx);
    let a: [u64; NUM_MASKS] = std::array::from_fn(|_| rng.gen_range(0..bound));
    let pubs = PublicPolys::new(pp, idx, &a);
    let r_hat = pubs.r_hat();
    let s_hat = pubs.s_hat();
    let t_hat = pubs.t_hat(&r_hat, &s_hat);
    let sigma1 = pubs.sigma1();

    let mut digests = random_digests(7, rng);
    absorb_masks(t, &a);
    absorb_digests(t, b"piop/round1", &digests);
    let tau = t.challenge_field_avoiding(b"piop/tau", not_in(idx));
    let eps = t.challenge_field(b"piop/eps");
    let phi = t.challenge_field(b"piop/phi");
    let d2 = random_digests(7, rng);
    t.absorb_field(b"piop/sigma1", sigma1);
    absorb_digests(t, b"piop/round2", &d2);
    let beta = t.challenge_field_avoiding(b"piop/beta", not_in(idx));
    let s_val = idx.matrix_eval(tau, eps, beta);
    let mut ch = Challenges { tau, eps, phi, beta, sigma: 0, gamma: F::ZERO, eta: F::ZERO };
    let (p_hat, r3, r2) = sparse_polys(idx, &ch, s_val)?;
    let d3 = random_digests(3, rng);
    t.absorb_field(b"piop/S", s_val);
    absorb_digests(t, b"piop/round3", &d3);
    ch.sigma = t.challenge_exponent(b"piop/sigma", pp.d() as u64)?;
    let r1 = r1_poly(pp, idx, &ch, &r3);
    let d4 = random_digests(1, rng);
    absorb_digests(t, b"piop/r1", &d4);
    ch.gamma = t.challenge_field(b"piop/gamma");
    digests.extend(d2);
    digests.extend(d3);
    digests.extend(d4);

    let mut public: [Option<&Poly>; NUM_COMMITMENTS] = [None; NUM_COMMITMENTS];
    for (slot, p) in [
        (Slot::RHat, &r_hat),
        (Slot::SHat, &s_hat),
        (Slot::THat, &t_hat),
        (Slot::PHat, &p_hat),
        (Slot::R3, &r3),
        (Slot::R2, &r2),
        (Slot::R1, &r1),
    ] {
        public[slot.index()] = Some(p);
    }
    let solver = PointSolver { pp, idx, public, sigma1, tau, eps };
    let at_u = solver.solve(pp.x_u(), rng)?;
    let at_beta = solver.solve(beta, rng)?;
    let at_gamma = [p_hat.eval(ch.gamma), r3.eval(ch.gamma), r2.eval(ch.gamma)];

    let mut openings = Vec::with_capacity(NUM_COMMITMENTS);
    for (i, slot) in SLOTS.iter().enumerate() {
        let rho: Vec<F> = match public[i] {
            Some(p) => pp.u_bar().iter().map(|u| p.eval(*u)).collect(),
            None => (0..pp.alpha()).map(|_| F::new(rng.gen())).collect(),
        };
        let sigma: Vec<F> = (0..pp.alpha()).map(|_| F::new(rng.gen())).collect();
        let (trace, _) = trace_from_values(pp, &digests[i], rho, sigma, t);
        let (point, y2) = if slot.at_gamma() {
            (ch.gamma, at_gamma[i - Slot::PHat.index()])
        } else {
            (beta, at_beta[i])
        };
        let claims = EvalClaims { y1: at_u[i], y2 };
        let proof = simulate_eval_proof(pp, &digests[i], point, &claims, trace.sigma[0], t, rng)?;
        openings.push(Opening { trace, claims, proof });
    }
    ch.eta = t.challenge_field(b"piop/eta");

    let eps_evals = EpsilonEvals {
        t_hat: t_hat.eval(eps),
        r_hat: r_hat.eval(eps),
        y1: F::new(rng.gen()),
        y2: F::new(rng.gen()),
        s_hat: s_hat.eval(eps),
        z: F::new(rng.gen()),
        p_hat: p_hat.eval(eps),
    };
    Ok(SimulatedPiop {
        proof: PiopProof { a, sigma1, s_val, digests, openings },
        challenges: ch,
        t_hat,
        eps_evals,
    })
}
