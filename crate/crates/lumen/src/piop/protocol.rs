//! Online rounds and the decision phase, compiled against the commitment
//! scheme: every oracle is a commitment opened with a `verify_poly` trace and
//! an evaluation proof.

use rand::Rng;

use super::encoder::EncodedIndex;
use super::relation::Witness;
use crate::error::{LumenError, Result};
use crate::field_poly::{FieldElement, Poly};
use crate::pcs::{
    build_verify_poly_trace, commit_folded, eval_prove, eval_verify, verify_poly, Commitment, CommitmentRef,
    EvalClaims, EvalProof, OpeningHint, PublicParams, VerifyPolyTrace,
};
use crate::transcript_hash::{Digest32, Transcript};

type F = FieldElement;

pub const NUM_COMMITMENTS: usize = 18;
pub const NUM_MASKS: usize = 6;
/// One `verify_poly` and one evaluation item per commitment, plus the two identities.
pub const REPORT_ITEMS: usize = 2 * NUM_COMMITMENTS + 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Slot {
    Z,
    Y1,
    Y2,
    H0,
    RHat,
    SHat,
    THat,
    G1,
    H1,
    GHat,
    HHat,
    FHat,
    B1Prime,
    B2Prime,
    PHat,
    R3,
    R2,
    R1,
}

pub const SLOTS: [Slot; NUM_COMMITMENTS] = [
    Slot::Z,
    Slot::Y1,
    Slot::Y2,
    Slot::H0,
    Slot::RHat,
    Slot::SHat,
    Slot::THat,
    Slot::G1,
    Slot::H1,
    Slot::GHat,
    Slot::HHat,
    Slot::FHat,
    Slot::B1Prime,
    Slot::B2Prime,
    Slot::PHat,
    Slot::R3,
    Slot::R2,
    Slot::R1,
];

const ROUND1: std::ops::Range<usize> = 0..7;
const ROUND2: std::ops::Range<usize> = 7..14;
const ROUND3: std::ops::Range<usize> = 14..17;

impl Slot {
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Slot::Z => "z",
            Slot::Y1 => "y1",
            Slot::Y2 => "y2",
            Slot::H0 => "h0",
            Slot::RHat => "r_hat",
            Slot::SHat => "s_hat",
            Slot::THat => "t_hat",
            Slot::G1 => "g1",
            Slot::H1 => "h1",
            Slot::GHat => "g_hat",
            Slot::HHat => "h_hat",
            Slot::FHat => "f_hat",
            Slot::B1Prime => "b1_prime",
            Slot::B2Prime => "b2_prime",
            Slot::PHat => "p_hat",
            Slot::R3 => "r3",
            Slot::R2 => "r2",
            Slot::R1 => "r1",
        }
    }

    /// Opened at `γ` rather than `β`.
    pub fn at_gamma(self) -> bool {
        matches!(self, Slot::PHat | Slot::R3 | Slot::R2)
    }
}

/// Exclusive upper bound on the round-one scalars `a1..a6`.
pub fn mask_bound(idx: &EncodedIndex) -> u64 {
    (idx.relation.h_bound as u64 / 4).max(1)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Opening {
    pub trace: VerifyPolyTrace,
    pub claims: EvalClaims,
    pub proof: EvalProof,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PiopProof {
    pub a: [u64; NUM_MASKS],
    pub sigma1: F,
    pub s_val: F,
    pub digests: Vec<Digest32>,
    pub openings: Vec<Opening>,
}

impl PiopProof {
    pub fn eval(&self, slot: Slot) -> F {
        self.openings[slot.index()].claims.y2
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Challenges {
    pub tau: F,
    pub eps: F,
    pub phi: F,
    pub beta: F,
    pub sigma: u64,
    pub gamma: F,
    pub eta: F,
}

/// Test hooks for the prover.
#[doc(hidden)]
#[derive(Clone, Copy, Debug, Default)]
pub struct ProverOptions {
    pub forced_a: Option<[u64; NUM_MASKS]>,
    pub zero_masks: bool,
}

#[derive(Clone, Debug)]
pub struct ProverOutput {
    pub proof: PiopProof,
    pub commitments: Vec<Commitment>,
    pub polys: Vec<Poly>,
    pub challenges: Challenges,
}

/// Index-derived polynomials both sides can rebuild from `a`.
pub struct PublicPolys<'a> {
    pp: &'a PublicParams,
    idx: &'a EncodedIndex,
    a: [F; NUM_MASKS],
}

impl<'a> PublicPolys<'a> {
    pub fn new(pp: &'a PublicParams, idx: &'a EncodedIndex, a: &[u64; NUM_MASKS]) -> Self {
        Self { pp, idx, a: a.map(F::new) }
    }

    fn sum_h_over_k(&self) -> F {
        self.idx.k_set.iter().map(|k| self.idx.relation.h.eval(*k)).sum()
    }

    /// `f_rel(x) = (Σ_K h(k))·Q(x) + n·h′(x)`
    pub fn f_rel(&self, x: F) -> F {
        let rel = &self.idx.relation;
        self.sum_h_over_k() * self.idx.q.eval(x) + F::new(rel.n as u64) * rel.h_prime.eval(x)
    }

    fn r_constant(&self) -> F {
        let p2i = self.pp.p2_at_index();
        (1..=p2i.len()).map(|i| p2i[i - 1] * self.f_rel(F::new(i as u64))).sum()
    }

    pub fn r_hat(&self) -> Poly {
        let d = self.pp.d();
        let mut coeffs = vec![F::ZERO; d];
        for (i, c) in self.pp.p2_at_index().iter().enumerate() {
            coeffs[d - (i + 1)] += *c;
        }
        coeffs[0] -= self.r_constant();
        &self.idx.q.scale(self.a[0]) + &Poly::from_coeffs(coeffs).scale(self.a[1])
    }

    pub fn r_hat_eval(&self, x: F) -> F {
        let d = self.pp.d() as u64;
        let p2i = self.pp.p2_at_index();
        let powers: F = (1..=p2i.len()).map(|i| p2i[i - 1] * x.pow(d - i as u64)).sum();
        self.a[0] * self.idx.q.eval(x) + self.a[1] * (powers - self.r_constant())
    }

    fn s_constant(&self) -> F {
        let rel = &self.idx.relation;
        let point = F::new(rel.m as u64) + F::new(rel.n as u64).pow(rel.k as u64);
        self.a[3] * self.idx.q.eval(point)
    }

    fn p1_k_sum(&self) -> F {
        self.idx.k_set.iter().map(|k| self.idx.p1.eval(*k, F::ONE)).sum()
    }

    pub fn s_hat(&self) -> Poly {
        let rel = &self.idx.relation;
        let lead = Poly::monomial(self.p1_k_sum(), rel.h_bound);
        &(&rel.h_prime - &lead).scale(self.a[2]) + &Poly::constant(self.s_constant())
    }

    pub fn s_hat_eval(&self, x: F) -> F {
        let rel = &self.idx.relation;
        self.a[2] * (rel.h_prime.eval(x) - self.p1_k_sum() * x.pow(rel.h_bound as u64)) + self.s_constant()
    }

    pub fn t_hat(&self, r_hat: &Poly, s_hat: &Poly) -> Poly {
        &self.idx.relation.h_dblprime.shift(-self.a[3]) + &(r_hat * s_hat).scale(self.a[5])
    }

    pub fn t_hat_eval(&self, x: F, r: F, s: F) -> F {
        self.idx.relation.h_dblprime.eval(x - self.a[3]) + self.a[5] * r * s
    }

    /// `σ1 = Σ_H ŝ`
    pub fn sigma1(&self) -> F {
        self.idx.h_domain.sum_over(&self.s_hat())
    }
}

fn random_poly(len: usize, rng: &mut impl Rng) -> Poly {
    Poly::from_coeffs((0..len).map(|_| F::new(rng.gen())).collect())
}

pub(crate) fn absorb_digests(t: &mut Transcript, label: &[u8], digests: &[Digest32]) {
    t.absorb(label, &digests.concat());
}

pub(crate) fn bind_statement(pp: &PublicParams, idx: &EncodedIndex, t: &mut Transcript) {
    t.absorb(b"piop/pp", &pp.digest());
    t.absorb(b"piop/index", &idx.digest());
}

pub(crate) fn absorb_masks(t: &mut Transcript, a: &[u64; NUM_MASKS]) {
    let bytes: Vec<u8> = a.iter().map(|x| *x as u8).collect();
    t.absorb(b"piop/a", &bytes);
}

pub(crate) fn not_in(idx: &EncodedIndex) -> impl Fn(F) -> bool + '_ {
    |x| idx.h_domain.contains(x)
}

/// `T(X) = val_ε·rowcol·Z_H(τ)Z_H(β) − n²(τ − row)(β − col)·p̂`
pub fn sparse_numerator(idx: &EncodedIndex, ch: &Challenges, p_hat: &Poly) -> Poly {
    let hd = &idx.h_domain;
    let val = &idx.val1 + &idx.val2.scale(ch.eps);
    let left = (&val * &idx.rowcol).scale(hd.eval_vanishing(ch.tau) * hd.eval_vanishing(ch.beta));
    let tau_row = &Poly::constant(ch.tau) - &idx.row;
    let beta_col = &Poly::constant(ch.beta) - &idx.col;
    let n = F::new(idx.n() as u64);
    let right = (&(&tau_row * &beta_col) * p_hat).scale(n * n);
    &left - &right
}

pub(crate) fn commit_all(
    pp: &PublicParams,
    polys: &[Poly],
    rng: &mut impl Rng,
) -> Result<(Vec<Commitment>, Vec<OpeningHint>, Vec<Digest32>)> {
    let mut coms = Vec::with_capacity(polys.len());
    let mut hints = Vec::with_capacity(polys.len());
    for p in polys {
        let (c, h) = commit_folded(pp, p, rng)?;
        coms.push(c);
        hints.push(h);
    }
    let digests = coms.iter().map(|c| c.digest()).collect();
    Ok((coms, hints, digests))
}

pub fn prove(
    pp: &PublicParams,
    idx: &EncodedIndex,
    witness: &Witness,
    t: &mut Transcript,
    rng: &mut impl Rng,
) -> Result<ProverOutput> {
    prove_with(pp, idx, witness, t, rng, ProverOptions::default())
}

#[doc(hidden)]
pub fn prove_with(
    pp: &PublicParams,
    idx: &EncodedIndex,
    witness: &Witness,
    t: &mut Transcript,
    rng: &mut impl Rng,
    opts: ProverOptions,
) -> Result<ProverOutput> {
    let rel = &idx.relation;
    rel.check_witness(witness)?;
    if pp.alpha() > pp.d() {
        return Err(LumenError::InvalidParams("PCS alpha exceeds d".into()));
    }
    let n = rel.n;
    let hd = &idx.h_domain;
    let n_f = F::new(n as u64);
    let zh = hd.vanishing_poly();
    bind_statement(pp, idx, t);

    // round 1
    let bound = mask_bound(idx);
    let a = opts.forced_a.unwrap_or_else(|| std::array::from_fn(|_| rng.gen_range(0..bound)));
    let af = a.map(F::new);
    let mask_len = if opts.zero_masks { 0 } else { pp.alpha() + 1 };
    let b1 = random_poly(mask_len, rng);
    let b2 = random_poly(mask_len, rng);
    let pubs = PublicPolys::new(pp, idx, &a);
    let r_hat = pubs.r_hat();
    let s_hat = pubs.s_hat();
    let t_hat = pubs.t_hat(&r_hat, &s_hat);

    let y1 = rel.m1.mul_vec(&witness.z);
    let y2 = rel.m2.mul_vec(&witness.z);
    let mut masked = |vals: &[F]| &hd.interpolate(vals) + &(&zh * &random_poly(pp.alpha() + 4, rng));
    let z_hat = masked(&witness.z);
    let y1_hat = masked(&y1);
    let y2_hat = masked(&y2);
    let (h0, rem) = (&(&y1_hat * &y2_hat) - &z_hat).div_rem_binomial(n, F::ONE);
    if !rem.is_zero() {
        return Err(LumenError::NonDivisible("row check".into()));
    }
    let round1 = vec![z_hat, y1_hat, y2_hat, h0, r_hat, s_hat, t_hat];
    let (mut coms, mut hints, mut digests) = commit_all(pp, &round1, rng)?;
    absorb_masks(t, &a);
    absorb_digests(t, b"piop/round1", &digests);

    // round 2
    let tau = t.challenge_field_avoiding(b"piop/tau", not_in(idx));
    let eps = t.challenge_field(b"piop/eps");
    let phi = t.challenge_field(b"piop/phi");
    let [z_hat, y1_hat, y2_hat, _, r_hat, s_hat, t_hat] = <[Poly; 7]>::try_from(round1.clone()).expect("seven");
    let sigma1 = hd.sum_over(&s_hat);
    let u_prime = &(&s_hat + &(&idx.lambda_slice(tau) * &(&y1_hat + &y2_hat.scale(eps))))
        - &(&idx.matrix_slice(tau, eps) * &z_hat);
    let (h1, rem) = u_prime.div_rem_binomial(n, F::ONE);
    if rem.coeff(0) != sigma1 / n_f {
        return Err(LumenError::WitnessMismatch("outer sum does not match".into()));
    }
    let g1 = Poly::from_coeffs(rem.coeffs().iter().skip(1).copied().collect());
    let quad = Poly::from_coeffs(vec![af[4], -af[2], af[0]]);
    let cubic = Poly::from_coeffs(vec![af[5], F::ZERO, -af[3], af[1]]);
    let g_hat = &(&(&b1 * &quad) * &r_hat.shift(eps)) + &idx.p1.at_y(tau);
    let h_hat = &(&(&b2 * &cubic) * &idx.p2.at_x(eps)) - &g_hat.scale(pp.alpha_scalar);
    let f_hat = &g_hat + &h_hat.scale(pp.alpha_scalar);
    let t_k: F = idx.k_set.iter().map(|k| t_hat.eval(*k)).sum();
    let b1_prime = &(&b1 * &idx.a_poly) + &idx.p1.at_y(F::ONE).shift(tau).scale(t_k);
    let b2_prime = reduce_coeffs(&(&b2 * &(&idx.b_poly - &idx.q.shift(-phi))), n as u64);
    let round2 = vec![g1, h1, g_hat, h_hat, f_hat, b1_prime, b2_prime];
    let (c2, h2, d2) = commit_all(pp, &round2, rng)?;
    t.absorb_field(b"piop/sigma1", sigma1);
    absorb_digests(t, b"piop/round2", &d2);

    // round 3
    let beta = t.challenge_field_avoiding(b"piop/beta", not_in(idx));
    let s_val = idx.matrix_eval(tau, eps, beta);
    let mut ch = Challenges { tau, eps, phi, beta, sigma: 0, gamma: F::ZERO, eta: F::ZERO };
    let (p_hat, r3, r2) = sparse_polys(idx, &ch, s_val)?;
    let round3 = vec![p_hat, r3.clone(), r2];
    let (c3, h3, d3) = commit_all(pp, &round3, rng)?;
    t.absorb_field(b"piop/S", s_val);
    absorb_digests(t, b"piop/round3", &d3);

    ch.sigma = t.challenge_exponent(b"piop/sigma", pp.d() as u64)?;
    let r1 = r1_poly(pp, idx, &ch, &r3);
    let (c4, h4, d4) = commit_all(pp, std::slice::from_ref(&r1), rng)?;
    absorb_digests(t, b"piop/r1", &d4);
    ch.gamma = t.challenge_field(b"piop/gamma");

    for (c, h, dg) in [(c2, h2, d2), (c3, h3, d3), (c4, h4, d4)] {
        coms.extend(c);
        hints.extend(h);
        digests.extend(dg);
    }
    let mut openings = Vec::with_capacity(NUM_COMMITMENTS);
    for (i, slot) in SLOTS.iter().enumerate() {
        let point = if slot.at_gamma() { ch.gamma } else { ch.beta };
        let (trace, _) = build_verify_poly_trace(pp, &coms[i], &hints[i], t);
        let (claims, proof) = eval_prove(pp, &coms[i], &hints[i], point, t, rng)?;
        openings.push(Opening { trace, claims, proof });
    }
    ch.eta = t.challenge_field(b"piop/eta");

    let mut polys = round1;
    polys.extend(round2);
    polys.extend(round3);
    polys.push(r1);
    Ok(ProverOutput {
        proof: PiopProof { a, sigma1, s_val, digests, openings },
        commitments: coms,
        polys,
        challenges: ch,
    })
}

/// `p̂` over the position domain, then `r3 = (p̂ − S/s)/X` and `r2 = T/Z_M`.
pub(crate) fn sparse_polys(idx: &EncodedIndex, ch: &Challenges, s_val: F) -> Result<(Poly, Poly, Poly)> {
    let rel = &idx.relation;
    let md = &idx.m_domain;
    let s_size = F::new(md.size() as u64);
    let lt = idx.h_domain.lagrange_coefficients(ch.tau);
    let lb = idx.h_domain.lagrange_coefficients(ch.beta);
    let p_vals: Vec<F> = idx
        .positions
        .positions
        .iter()
        .enumerate()
        .map(|(j, &(r, c))| {
            if j >= idx.positions.real_len {
                return F::ZERO;
            }
            (rel.m1.get(r, c) + ch.eps * rel.m2.get(r, c)) * lt[r] * lb[c]
        })
        .collect();
    let p_hat = md.interpolate(&p_vals);
    if p_hat.coeff(0) != s_val / s_size {
        return Err(LumenError::NonDivisible("sparse sum".into()));
    }
    let r3 = Poly::from_coeffs(p_hat.coeffs().iter().skip(1).copied().collect());
    let (r2, rem) = sparse_numerator(idx, ch, &p_hat).div_rem_binomial(md.size(), F::ONE);
    if !rem.is_zero() {
        return Err(LumenError::NonDivisible("sparse check".into()));
    }
    Ok((p_hat, r3, r2))
}

/// `r1 = fold_d(τ·s·r3)·x^(d−σ)`
pub(crate) fn r1_poly(pp: &PublicParams, idx: &EncodedIndex, ch: &Challenges, r3: &Poly) -> Poly {
    let d = pp.d();
    let s_size = F::new(idx.m_domain.size() as u64);
    r3.scale(ch.tau * s_size).mod_cyclotomic(d).shift_up(d - ch.sigma as usize)
}

/// Canonical integer coefficients reduced mod `n`.
pub fn reduce_coeffs(p: &Poly, n: u64) -> Poly {
    Poly::from_coeffs(p.coeffs().iter().map(|c| F::new(c.value() % n)).collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReportItem {
    pub label: String,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecisionReport {
    pub items: Vec<ReportItem>,
}

impl DecisionReport {
    pub fn accepted(&self) -> bool {
        self.items.iter().all(|i| i.ok)
    }

    pub fn failures(&self) -> Vec<&str> {
        self.items.iter().filter(|i| !i.ok).map(|i| i.label.as_str()).collect()
    }
}

/// Terms of the batched identity at `β`; all vanish for an honest proof.
pub fn beta_terms(pp: &PublicParams, idx: &EncodedIndex, proof: &PiopProof, ch: &Challenges) -> Vec<F> {
    let hd = &idx.h_domain;
    let v = |s: Slot| proof.eval(s);
    let pubs = PublicPolys::new(pp, idx, &proof.a);
    let zh = hd.eval_vanishing(ch.beta);
    let n_f = F::new(idx.n() as u64);
    let lam = hd.bivariate_lambda(ch.tau, ch.beta);
    let outer = v(Slot::SHat) + lam * (v(Slot::Y1) + ch.eps * v(Slot::Y2))
        - proof.s_val * v(Slot::Z)
        - (ch.beta * v(Slot::G1) + proof.sigma1 / n_f + v(Slot::H1) * zh);
    let row = v(Slot::Y1) * v(Slot::Y2) - v(Slot::Z) - v(Slot::H0) * zh;
    let fcomb = v(Slot::FHat) - v(Slot::GHat) - pp.alpha_scalar * v(Slot::HHat);
    let tcheck = v(Slot::THat) - pubs.t_hat_eval(ch.beta, v(Slot::RHat), v(Slot::SHat));
    vec![
        outer,
        row,
        fcomb,
        tcheck,
        v(Slot::RHat) - pubs.r_hat_eval(ch.beta),
        v(Slot::SHat) - pubs.s_hat_eval(ch.beta),
        proof.sigma1 - pubs.sigma1(),
        proof.s_val - idx.matrix_eval(ch.tau, ch.eps, ch.beta),
    ]
}

/// `[T(γ) − r2(γ)·Z_M(γ), p̂(γ) − γ·r3(γ) − S/s]`, index polynomials evaluated directly.
pub fn gamma_terms(idx: &EncodedIndex, proof: &PiopProof, ch: &Challenges) -> [F; 2] {
    let hd = &idx.h_domain;
    let md = &idx.m_domain;
    let g = ch.gamma;
    let n = F::new(idx.n() as u64);
    let s_size = F::new(md.size() as u64);
    let p_hat = g * proof.eval(Slot::R3) + proof.s_val / s_size;
    let val = idx.val1.eval(g) + ch.eps * idx.val2.eval(g);
    let t = val * idx.rowcol.eval(g) * hd.eval_vanishing(ch.tau) * hd.eval_vanishing(ch.beta)
        - n * n * (ch.tau - idx.row.eval(g)) * (ch.beta - idx.col.eval(g)) * p_hat;
    [t - proof.eval(Slot::R2) * md.eval_vanishing(g), proof.eval(Slot::PHat) - p_hat]
}

pub(crate) fn batch(terms: &[F], eta: F) -> F {
    terms.iter().rev().fold(F::ZERO, |acc, x| acc * eta + *x)
}

/// Replays the transcript and checks every opening and both identities.
/// `commitments`, when given, switches the openings to full mode.
pub fn decide(
    pp: &PublicParams,
    idx: &EncodedIndex,
    proof: &PiopProof,
    commitments: Option<&[Commitment]>,
    t: &mut Transcript,
) -> Result<(DecisionReport, Challenges)> {
    if proof.digests.len() != NUM_COMMITMENTS || proof.openings.len() != NUM_COMMITMENTS {
        return Err(LumenError::Malformed("expected 18 commitments".into()));
    }
    if let Some(c) = commitments {
        if c.len() != NUM_COMMITMENTS {
            return Err(LumenError::Malformed("expected 18 commitments".into()));
        }
    }
    let cref = |i: usize| match commitments {
        Some(c) => CommitmentRef::Full(&c[i]),
        None => CommitmentRef::Digest(&proof.digests[i]),
    };
    bind_statement(pp, idx, t);
    let masks_ok = proof.a.iter().all(|x| *x < mask_bound(idx));
    absorb_masks(t, &proof.a);
    absorb_digests(t, b"piop/round1", &proof.digests[ROUND1]);
    let tau = t.challenge_field_avoiding(b"piop/tau", not_in(idx));
    let eps = t.challenge_field(b"piop/eps");
    let phi = t.challenge_field(b"piop/phi");
    t.absorb_field(b"piop/sigma1", proof.sigma1);
    absorb_digests(t, b"piop/round2", &proof.digests[ROUND2]);
    let beta = t.challenge_field_avoiding(b"piop/beta", not_in(idx));
    t.absorb_field(b"piop/S", proof.s_val);
    absorb_digests(t, b"piop/round3", &proof.digests[ROUND3]);
    let sigma = t.challenge_exponent(b"piop/sigma", pp.d() as u64)?;
    absorb_digests(t, b"piop/r1", &proof.digests[Slot::R1.index()..]);
    let gamma = t.challenge_field(b"piop/gamma");

    let mut items = Vec::with_capacity(REPORT_ITEMS);
    let mut evals = Vec::with_capacity(NUM_COMMITMENTS);
    for (i, slot) in SLOTS.iter().enumerate() {
        let point = if slot.at_gamma() { gamma } else { beta };
        let op = &proof.openings[i];
        let c = cref(i);
        if commitments.is_some() && c.digest() != proof.digests[i] {
            return Err(LumenError::Malformed("commitment does not match its digest".into()));
        }
        let vp = verify_poly(pp, c, &op.trace, t);
        let ev = eval_verify(pp, c, point, &op.claims, &op.proof, &op.trace, t)?;
        items.push(ReportItem { label: format!("verify_poly[{}]", slot.name()), ok: vp });
        evals.push(ReportItem { label: format!("eval[{}]", slot.name()), ok: ev });
    }
    items.extend(evals);
    let eta = t.challenge_field(b"piop/eta");
    let ch = Challenges { tau, eps, phi, beta, sigma, gamma, eta };

    let beta_ok = masks_ok && batch(&beta_terms(pp, idx, proof, &ch), eta).is_zero();
    let gamma_ok = batch(&gamma_terms(idx, proof, &ch), eta).is_zero();
    items.push(ReportItem { label: "identity[beta]".into(), ok: beta_ok });
    items.push(ReportItem { label: "identity[gamma]".into(), ok: gamma_ok });
    Ok((DecisionReport { items }, ch))
}
