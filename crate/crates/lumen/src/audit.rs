//! Numerical reconciliation of the displayed identities against honest runs.
//!
//! Each identity has a literal reading (`lhs = rhs`, evaluated as displayed
//! with the documented symbol readings) and, unless it was dropped, the
//! reading the implementation enforces. The audit classifies every literal
//! reading as holding, holding up to one constant factor, or failing, checks
//! that each implemented reading holds on every trace, and derives the
//! calibration descriptor from the outcome.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::error::{LumenError, Result};
use crate::field_poly::{FieldElement, Poly};
use crate::pcs::{
    build_verify_poly_trace, commit, eval_prove, Commitment, EvalClaims, EvalProof, OpeningHint,
    PublicParams, TraceVectors, VerifyPolyChallenges, VerifyPolyTrace,
};
use crate::piop::encoder::PointwiseFormulas;
use crate::piop::protocol::{batch, beta_terms, gamma_terms, prove, sparse_numerator, ProverOutput, Slot};
use crate::piop::relation::generate_satisfiable;
use crate::piop::{index, EncodedIndex};
use crate::snark::calibration_id_of;
use crate::transcript_hash::Transcript;

type F = FieldElement;

pub const DESCRIPTOR_HEADER: &str = "lumen-calibration/v1";
pub const DEFAULT_AUDIT_SIZES: [usize; 3] = [2, 4, 8];
pub const TRACES_PER_SIZE: usize = 3;

/// One honest run of both layers plus fresh evaluation points.
pub struct HonestTrace {
    pub pp: PublicParams,
    pub idx: EncodedIndex,
    pub out: ProverOutput,
    pub com: Commitment,
    pub hint: OpeningHint,
    pub vp: VerifyPolyTrace,
    pub vp_ch: VerifyPolyChallenges,
    pub claims: EvalClaims,
    pub eval: EvalProof,
    pub x_v: F,
    /// Random field point.
    pub x: F,
    /// Random point of the ring domain (`x^d = 1`).
    pub w: F,
}

impl HonestTrace {
    pub fn generate(pp: &PublicParams, n: usize, rng: &mut impl Rng) -> Result<Self> {
        let (rel, wit) = generate_satisfiable(n, rng)?;
        let idx = index(&rel)?;
        let out = prove(pp, &idx, &wit, &mut Transcript::new(b"lumen/audit"), rng)?;
        let f = Poly::from_coeffs((0..pp.d()).map(|_| F::new(rng.gen())).collect());
        let (com, hint) = commit(pp, &f, rng)?;
        let mut t = Transcript::new(b"lumen/audit-pcs");
        let (vp, vp_ch) = build_verify_poly_trace(pp, &com, &hint, &mut t);
        let x_v = F::new(rng.gen());
        let (claims, eval) = eval_prove(pp, &com, &hint, x_v, &mut t, rng)?;
        let w = pp.domain().element(rng.gen_range(0..pp.d()));
        Ok(Self { pp: pp.clone(), idx, out, com, hint, vp, vp_ch, claims, eval, x_v, x: F::new(rng.gen()), w })
    }

    fn poly(&self, s: Slot) -> &Poly {
        &self.out.polys[s.index()]
    }
}

type Literal = fn(&HonestTrace) -> (F, F);
type Implemented = fn(&HonestTrace) -> F;

pub struct Identity {
    pub name: &'static str,
    pub literal: Literal,
    /// Residual of the enforced reading; `None` when the identity is not imposed.
    pub implemented: Option<Implemented>,
    pub note: &'static str,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Resolution {
    Literal,
    Scale(F),
    Replaced,
    Dropped,
}

impl Resolution {
    pub fn token(&self) -> String {
        match self {
            Resolution::Literal => "literal".into(),
            Resolution::Scale(c) => format!("scale:{}", c.value()),
            Resolution::Replaced => "replaced".into(),
            Resolution::Dropped => "dropped".into(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct AuditEntry {
    pub name: &'static str,
    pub note: &'static str,
    pub resolution: Resolution,
    pub literal_holds: usize,
    /// `None` for dropped identities.
    pub implemented_holds: Option<usize>,
    pub traces: usize,
}

impl AuditEntry {
    pub fn consistent(&self) -> bool {
        self.implemented_holds.is_none_or(|k| k == self.traces)
    }
}

#[derive(Clone, Debug)]
pub struct AuditReport {
    pub sizes: Vec<usize>,
    pub entries: Vec<AuditEntry>,
    pub descriptor: String,
    pub calibration_id: u16,
}

impl AuditReport {
    /// Every enforced reading held on every honest trace.
    pub fn consistent(&self) -> bool {
        self.entries.iter().all(AuditEntry::consistent)
    }
}

fn classify(pairs: &[(F, F)]) -> Resolution {
    if pairs.iter().all(|(l, r)| l == r) {
        return Resolution::Literal;
    }
    if pairs.iter().any(|(_, r)| r.is_zero()) {
        return Resolution::Replaced;
    }
    let c = pairs[0].0 / pairs[0].1;
    if pairs.iter().all(|(l, r)| *l == c * *r) {
        Resolution::Scale(c)
    } else {
        Resolution::Replaced
    }
}

pub fn run_audit(pp: &PublicParams, sizes: &[usize], seed: u64) -> Result<AuditReport> {
    if sizes.is_empty() {
        return Err(LumenError::InvalidParams("audit needs at least one size".into()));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut traces = Vec::new();
    for &n in sizes {
        for _ in 0..TRACES_PER_SIZE {
            traces.push(HonestTrace::generate(pp, n, &mut rng)?);
        }
    }
    let mut entries = Vec::new();
    for id in identities() {
        let pairs: Vec<(F, F)> = traces.iter().map(id.literal).collect();
        let literal_holds = pairs.iter().filter(|(l, r)| l == r).count();
        let implemented_holds = id.implemented.map(|f| traces.iter().filter(|t| f(t).is_zero()).count());
        let resolution = match (classify(&pairs), implemented_holds) {
            (r @ (Resolution::Literal | Resolution::Scale(_)), _) => r,
            (_, None) => Resolution::Dropped,
            (_, Some(_)) => Resolution::Replaced,
        };
        entries.push(AuditEntry {
            name: id.name,
            note: id.note,
            resolution,
            literal_holds,
            implemented_holds,
            traces: traces.len(),
        });
    }
    let mut descriptor = format!("{DESCRIPTOR_HEADER}\n");
    for e in &entries {
        writeln!(descriptor, "{}={}", e.name, e.resolution.token()).expect("string write");
    }
    Ok(AuditReport { sizes: sizes.to_vec(), calibration_id: calibration_id_of(&descriptor), entries, descriptor })
}

/// Markdown summary of an audit run.
pub fn conformance_markdown(report: &AuditReport) -> String {
    let mut s = String::new();
    let sizes: Vec<String> = report.sizes.iter().map(|n| n.to_string()).collect();
    writeln!(s, "# Conformance notes\n").unwrap();
    writeln!(
        s,
        "Generated by `lumen audit` over relation sizes {{{}}} with {} honest traces per size.\n",
        sizes.join(", "),
        TRACES_PER_SIZE
    )
    .unwrap();
    writeln!(s, "Calibration id: `0x{:04x}`\n", report.calibration_id).unwrap();
    writeln!(s, "| identity | resolution | literal holds | enforced reading holds | reading |").unwrap();
    writeln!(s, "|---|---|---|---|---|").unwrap();
    for e in &report.entries {
        let enforced = e.implemented_holds.map_or("not imposed".into(), |k| format!("{k}/{}", e.traces));
        writeln!(
            s,
            "| `{}` | {} | {}/{} | {} | {} |",
            e.name,
            e.resolution.token(),
            e.literal_holds,
            e.traces,
            enforced,
            e.note
        )
        .unwrap();
    }
    writeln!(s, "\n## Descriptor\n\n```\n{}```", report.descriptor).unwrap();
    s
}

fn lagrange_at(idx: &EncodedIndex, node: F, x: F) -> F {
    let hd = &idx.h_domain;
    node * hd.eval_vanishing(x) / (F::new(idx.n() as u64) * (x - node))
}

/// `Σĝ·f + p1` at a point with `w^d = 1`, where reduction mod `x^d − 1` is invisible.
fn ring_numerator(t: &HonestTrace) -> F {
    t.pp.u_sum() * t.hint.f.eval(t.w) + t.hint.p1.eval(t.w)
}

fn vectors(t: &HonestTrace) -> TraceVectors {
    TraceVectors::new(&t.pp, &t.vp.rho, &t.vp.sigma, &t.vp.w)
}

pub fn identities() -> Vec<Identity> {
    vec![
        Identity {
            name: "pcs.open",
            literal: |t| {
                let lhs = t.com.q().eval(t.w) * t.com.c().eval(t.w) * t.pp.alpha_scalar;
                (lhs, t.pp.p2.eval(t.w))
            },
            implemented: Some(|t| {
                t.com.q().eval(t.w) * t.com.c().eval(t.w) * t.pp.alpha_scalar
                    - ring_numerator(t)
            }),
            note: "α·q·c ≡ Σĝ·f + p1 on x^d = 1",
        },
        Identity {
            name: "pcs.verify_poly.sum",
            literal: |t| (vectors(t).sigma_constraint(t.vp_ch.z), F::ZERO),
            implemented: Some(|t| t.vp.phi - vectors(t).sigma_constraint(t.vp_ch.z)),
            note: "sum disclosed as φ at a challenge and bound",
        },
        Identity {
            name: "pcs.verify_poly.final",
            literal: |t| {
                let v = vectors(t);
                let (p, q) = (t.vp_ch.p, t.vp_ch.q);
                (t.vp.r_scalar, p * (v.d(t.vp.m, t.vp.n) + t.vp.n) - q)
            },
            implemented: Some(|t| t.vp.r_scalar - vectors(t).e(t.vp_ch.p, t.vp_ch.q)),
            note: "r = e(p, q) recomputed from ρ, σ",
        },
        Identity {
            name: "pcs.verify_eval.check",
            literal: |t| {
                let pp = &t.pp;
                let v1 = pp.v_field()[0];
                let u1 = pp.u_bar()[0];
                let v_disp = t.hint.p1.eval(v1) + pp.alpha_scalar * v1;
                let u_disp = pp.p2_at_u1() + pp.alpha_scalar * u1;
                (t.claims.y2, t.eval.b_hat * v_disp - u_disp * F::new(pp.alpha() as u64))
            },
            implemented: Some(|t| {
                t.claims.y2 - (t.eval.b_hat * t.eval.v_prime - t.eval.u_prime * F::new(t.pp.alpha() as u64))
            }),
            note: "v′, u′ from the h1/h2 split",
        },
        Identity {
            name: "pcs.verify_eval.c_prime",
            literal: |t| {
                let pp = &t.pp;
                let v1 = pp.v_field()[0];
                let num = pp.u_sum() * t.hint.f.eval(t.w) + t.hint.p1.eval(v1);
                (t.com.c().eval(t.w), num / (pp.alpha_scalar * t.com.q().eval(v1)))
            },
            implemented: Some(|t| {
                t.com.c().eval(t.w) * t.pp.alpha_scalar * t.com.q().eval(t.w) - ring_numerator(t)
            }),
            note: "c′ = c(ζ), the ring quotient evaluated",
        },
        Identity {
            name: "piop.relation.h_dblprime",
            literal: |t| {
                let r = &t.idx.relation;
                let rhs = F::ONE - t.idx.q.eval(t.x) * r.h.eval(t.x) + F::new(r.k as u64) * r.h_prime.eval(t.x);
                (r.h_dblprime.eval(t.x), rhs)
            },
            implemented: None,
            note: "auxiliary polynomials are free",
        },
        Identity {
            name: "piop.encoder.q1",
            literal: |t| (t.idx.q1.eval(t.x), PointwiseFormulas::new(&t.idx).q1(t.x)),
            implemented: Some(|t| t.idx.q1.eval(t.x) - PointwiseFormulas::new(&t.idx).q1(t.x)),
            note: "ΣM^{row,col} as the value sum",
        },
        Identity {
            name: "piop.encoder.q2",
            literal: |t| (t.idx.q2.eval(t.x), PointwiseFormulas::new(&t.idx).q2(t.x)),
            implemented: Some(|t| t.idx.q2.eval(t.x) - PointwiseFormulas::new(&t.idx).q2(t.x)),
            note: "ΣM^{row,col} as the value sum",
        },
        Identity {
            name: "piop.encoder.q3",
            literal: |t| (t.idx.q3.eval(t.x), PointwiseFormulas::new(&t.idx).q3(t.x)),
            implemented: Some(|t| t.idx.q3.eval(t.x) - PointwiseFormulas::new(&t.idx).q3(t.x)),
            note: "P1(v) as P1(α, 1)",
        },
        Identity {
            name: "piop.encoder.q4",
            literal: |t| (t.idx.q4.eval(t.x), PointwiseFormulas::new(&t.idx).q4(t.x)),
            implemented: Some(|t| t.idx.q4.eval(t.x) - PointwiseFormulas::new(&t.idx).q4(t.x)),
            note: "p2(k) as P2(k0, 1)",
        },
        Identity {
            name: "piop.encoder.p_relation",
            literal: |t| {
                let (i, x, a) = (&t.idx, t.x, t.idx.alpha);
                let s2 = i.relation.m2.value_sum();
                (i.relation.h_prime.eval(x) * i.p1.eval(x, a), i.p2.eval(x, a) * s2 + i.p3.eval(x, F::ONE))
            },
            implemented: None,
            note: "not imposed on the encoder output",
        },
        Identity {
            name: "piop.encoder.p3_chain",
            literal: |t| {
                let (i, x, a) = (&t.idx, t.x, t.idx.alpha);
                let s2 = i.relation.m2.value_sum();
                (i.p3.eval(x, F::ONE), s2 * i.p2.eval(x, a) + i.p1.eval(a, x + F::ONE))
            },
            implemented: None,
            note: "not imposed on the encoder output",
        },
        Identity {
            name: "piop.round3.sum",
            literal: |t| {
                let md = &t.idx.m_domain;
                let sum: F = md.elements().iter().map(|k| t.poly(Slot::FHat).eval(*k)).sum();
                (sum, t.idx.p1.eval(t.out.challenges.beta, t.out.challenges.tau))
            },
            implemented: Some(|t| t.idx.m_domain.sum_over(t.poly(Slot::PHat)) - t.out.proof.s_val),
            note: "Σ_M p̂ = S",
        },
        Identity {
            name: "piop.round3.p_hat",
            literal: |t| {
                let (i, ch) = (&t.idx, &t.out.challenges);
                let kappa = i.m_domain.element(0);
                let (r, c) = i.positions.positions[0];
                let om = i.h_domain.generator();
                let lhs = t.poly(Slot::PHat).eval(kappa);
                let val = i.relation.h_prime.eval(kappa) + ch.eps * i.relation.h_dblprime.eval(kappa);
                let rhs = val * lagrange_at(i, om.pow(r as u64), ch.tau) * lagrange_at(i, om.pow(c as u64), ch.tau);
                (lhs, rhs)
            },
            implemented: Some(|t| {
                let (i, ch) = (&t.idx, &t.out.challenges);
                let kappa = i.m_domain.element(0);
                let (r, c) = i.positions.positions[0];
                let om = i.h_domain.generator();
                let val = i.relation.m1.get(r, c) + ch.eps * i.relation.m2.get(r, c);
                t.poly(Slot::PHat).eval(kappa)
                    - val * lagrange_at(i, om.pow(r as u64), ch.tau) * lagrange_at(i, om.pow(c as u64), ch.beta)
            }),
            note: "val_ε·Δ_row(τ)·Δ_col(β)",
        },
        Identity {
            name: "piop.round3.r1",
            literal: |t| {
                let (ch, x) = (&t.out.challenges, t.x);
                let s = F::new(t.idx.m_domain.size() as u64);
                (t.poly(Slot::R1).eval(x), ch.tau * s * t.poly(Slot::R3).eval(x) / x.pow(ch.sigma))
            },
            implemented: Some(|t| {
                let (ch, w) = (&t.out.challenges, t.w);
                let s = F::new(t.idx.m_domain.size() as u64);
                t.poly(Slot::R1).eval(w) - ch.tau * s * t.poly(Slot::R3).eval(w) / w.pow(ch.sigma)
            }),
            note: "x^{−σ} in F[x]/(x^d − 1)",
        },
        Identity {
            name: "piop.round3.sparse",
            literal: |t| {
                let (i, ch) = (&t.idx, &t.out.challenges);
                let n = F::new(i.n() as u64);
                let k = i.m_domain.element(0);
                let (row, col) = (i.row.eval(k), i.col.eval(k));
                let lhs = n * n * t.poly(Slot::R1).eval(k) * (ch.tau - i.q4.eval(row)) * (ch.beta - i.q3.eval(k));
                let val = i.relation.h_prime.eval(k) + i.alpha * i.relation.h_dblprime.eval(k);
                let rhs = val * i.q4.eval(col) * i.q3.eval(k) * lagrange_at(i, row, ch.tau) * lagrange_at(i, col, ch.tau);
                (lhs, rhs)
            },
            implemented: Some(|t| {
                let k = t.idx.m_domain.element(0);
                sparse_numerator(&t.idx, &t.out.challenges, t.poly(Slot::PHat)).eval(k)
            }),
            note: "T vanishes on M",
        },
        Identity {
            name: "piop.round3.quotient",
            literal: |t| {
                let (i, ch, x) = (&t.idx, &t.out.challenges, t.x);
                let n = F::new(i.n() as u64);
                let s = F::new(i.m_domain.size() as u64);
                let (tau, beta) = (ch.tau, ch.beta);
                let q = |p: &Poly| p.eval(x);
                let hd = &i.h_domain;
                let lhs = s * n.pow(4) * (tau.pow(4) + q(&i.q2) - tau.pow(3) * q(&i.q3) - tau * tau * q(&i.q4))
                    - (q(&i.q1) + i.alpha * t.out.proof.s_val) * hd.eval_vanishing(tau) * hd.eval_vanishing(beta)
                    + t.poly(Slot::R3).eval(x)
                        * n
                        * n
                        * (tau * beta * x + q(&i.q2) - tau.pow(3) * q(&i.q3) - tau * tau * q(&i.q4));
                (lhs, t.poly(Slot::R2).eval(x) * i.m_domain.eval_vanishing(x))
            },
            implemented: Some(|t| {
                let x = t.x;
                sparse_numerator(&t.idx, &t.out.challenges, t.poly(Slot::PHat)).eval(x)
                    - t.poly(Slot::R2).eval(x) * t.idx.m_domain.eval_vanishing(x)
            }),
            note: "T = val_ε·rowcol·Z_H(τ)Z_H(β) − n²(τ − row)(β − col)·p̂",
        },
        Identity {
            name: "piop.decision.first",
            literal: |t| {
                let (i, ch) = (&t.idx, &t.out.challenges);
                let hd = &i.h_domain;
                let x = ch.beta;
                let e = |s: Slot| t.poly(s).eval(x);
                let a = i.alpha;
                let x_alpha = x.pow(i.relation.h_bound as u64);
                let sum_h: F = hd.lagrange_coefficients(x).into_iter().map(|l| x_alpha * l).sum();
                let q_sigma = i.q.eval(F::new(ch.sigma));
                let delta = lagrange_at(i, F::ONE, x);
                let lhs = x * e(Slot::SHat)
                    + (e(Slot::Y1) * e(Slot::RHat) + sum_h)
                        * (hd.bivariate_lambda(x, F::ONE)
                            + (e(Slot::Y2) * hd.eval_vanishing(x) + F::new(2) * e(Slot::THat)) * q_sigma)
                    + (e(Slot::Y2) * delta + F::ONE) * a * hd.bivariate_lambda(ch.tau, ch.eps)
                    - i.q3.eval(x) * e(Slot::PHat);
                (lhs, F::ZERO)
            },
            implemented: Some(|t| {
                let terms = beta_terms(&t.pp, &t.idx, &t.out.proof, &t.out.challenges);
                batch(&terms, t.out.challenges.eta)
            }),
            note: "η-batched outer sumcheck, rowcheck, f̂ and t̂ definitions",
        },
        Identity {
            name: "piop.decision.second",
            literal: |t| {
                let (i, ch) = (&t.idx, &t.out.challenges);
                let hd = &i.h_domain;
                let g = ch.gamma;
                let (x, y) = (ch.tau, ch.beta);
                let n = F::new(i.n() as u64);
                let q = |p: &Poly| p.eval(g);
                let lhs = F::new(ch.sigma)
                    * (x * x + F::new(3) * ch.eps + F::new(2))
                    * (x.pow(3) * y + q(&i.q2) + x.pow(3) * q(&i.q3) + x * q(&i.q4))
                    - t.poly(Slot::R3).eval(g) * n * n * (x * x * q(&i.q2) + x * q(&i.q3) + y * q(&i.q4))
                    - (q(&i.q1) - ch.eps * q(&i.q1)) * hd.eval_vanishing(x) * lagrange_at(i, i.row.eval(g), x)
                    + t.poly(Slot::R2).eval(x) * lagrange_at(i, i.col.eval(g), x);
                (lhs, F::ZERO)
            },
            implemented: Some(|t| batch(&gamma_terms(&t.idx, &t.out.proof, &t.out.challenges), t.out.challenges.eta)),
            note: "T(γ) = r2(γ)·Z_M(γ) and p̂(γ) = γ·r3(γ) + S/s",
        },
    ]
}
