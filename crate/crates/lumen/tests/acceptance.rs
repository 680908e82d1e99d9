//! Acceptance suite: one line per criterion, non-zero exit if any fails.
//! Run with `cargo test -p lumen --test acceptance`.

use std::time::{Duration, Instant};

use lumen::audit::run_audit;
use lumen::bench::{bench_report, run_bench, BenchConfig, PROOF_BUDGET_BYTES};
use lumen::field_poly::{Domain, FieldElement, Poly};
use lumen::pcs::{
    build_verify_poly_trace, commit, eval_prove, eval_verify, open, setup, verify_poly, Commitment, CommitmentRef,
    EvalClaims, EvalProof, PublicParams, SetupConfig, VerifyPolyTrace,
};
use lumen::piop::{decide, generate_satisfiable, index, prove as piop_prove, sparse_numerator, EncodedIndex, PiopProof, Slot, Witness};
use lumen::recursion::{finalize_verify, AggregateDigest, AggregationStep, Aggregator};
use lumen::snark::{self, Verdict};
use lumen::transcript_hash::{keccak256, Transcript};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

type F = FieldElement;
type Outcome = Result<String, String>;
type Check = (&'static str, fn() -> Outcome, Option<Duration>);

fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

fn random_poly(rng: &mut impl Rng, len: usize) -> Poly {
    Poly::from_coeffs((0..len).map(|_| F::new(rng.gen())).collect())
}

fn nonzero(rng: &mut impl Rng) -> F {
    F::new(rng.gen_range(1..u64::MAX >> 1))
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn fixture(n: usize, d: usize, seed: u64) -> (PublicParams, EncodedIndex, Witness) {
    let pp = setup(&SetupConfig::new(d, 2, b"acceptance")).expect("setup");
    let (rel, w) = generate_satisfiable(n, &mut rng(seed)).expect("relation");
    (pp, index(&rel).expect("index"), w)
}

fn lambda_identity() -> Outcome {
    let mut r = rng(1);
    let mut checked = 0;
    for log in 1..=6 {
        let h = Domain::new(1 << log).map_err(|e| e.to_string())?;
        for _ in 0..1000 {
            let (x, y) = (F::new(r.gen()), F::new(r.gen()));
            ensure(h.bivariate_lambda(x, y) == h.bivariate_lambda_sum(x, y), format!("mismatch at |H| = {}", 1 << log))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} pairs over |H| = 2..64"))
}

struct PcsRun {
    pp: PublicParams,
    com: Commitment,
    trace: VerifyPolyTrace,
    claims: EvalClaims,
    proof: EvalProof,
    opened: bool,
}

fn pcs_run(pp: &PublicParams, r: &mut ChaCha20Rng) -> PcsRun {
    let f = random_poly(r, pp.d());
    let (com, hint) = commit(pp, &f, r).expect("commit");
    let opened = open(pp, &com, &hint);
    let mut t = Transcript::new(b"acceptance/pcs");
    let (trace, _) = build_verify_poly_trace(pp, &com, &hint, &mut t);
    let (claims, proof) = eval_prove(pp, &com, &hint, pp.x_v(), &mut t, r).expect("eval");
    PcsRun { pp: pp.clone(), com, trace, claims, proof, opened }
}

fn pcs_verify(run: &PcsRun, com: &Commitment, trace: &VerifyPolyTrace, claims: &EvalClaims, proof: &EvalProof) -> bool {
    let mut t = Transcript::new(b"acceptance/pcs");
    verify_poly(&run.pp, CommitmentRef::Full(com), trace, &mut t)
        && eval_verify(&run.pp, CommitmentRef::Full(com), run.pp.x_v(), claims, proof, trace, &mut t).unwrap_or(false)
}

fn pcs_completeness() -> Outcome {
    let mut r = rng(2);
    for (d, alpha) in [(8, 2), (64, 4), (1024, 8)] {
        let pp = setup(&SetupConfig::new(d, alpha, b"acceptance/pcs")).map_err(|e| e.to_string())?;
        for i in 0..100 {
            let run = pcs_run(&pp, &mut r);
            ensure(run.opened, format!("honest run {i} failed to open at (d, α) = ({d}, {alpha})"))?;
            ensure(
                pcs_verify(&run, &run.com, &run.trace, &run.claims, &run.proof),
                format!("honest run {i} rejected at (d, α) = ({d}, {alpha})"),
            )?;
        }
    }
    Ok("300/300 accepted".into())
}

fn mutate_vec(v: &mut [F], r: &mut impl Rng) {
    let i = r.gen_range(0..v.len());
    v[i] += nonzero(r);
}

fn mutate_poly(p: &Poly, len: usize, r: &mut impl Rng) -> Poly {
    let mut c = p.coeffs().to_vec();
    c.resize(len, F::ZERO);
    mutate_vec(&mut c, r);
    Poly::from_coeffs(c)
}

fn pcs_mutations(r: &mut ChaCha20Rng) -> usize {
    let pp = setup(&SetupConfig::new(64, 4, b"acceptance/mut")).expect("setup");
    let mut rejected = 0;
    for _ in 0..100 {
        let run = pcs_run(&pp, r);
        let (mut com, mut trace, mut claims, mut proof) = (run.com.clone(), run.trace.clone(), run.claims, run.proof);
        match r.gen_range(0..10) {
            0 => com = com.with_c(mutate_poly(com.c(), 64, r)),
            1 => com = com.with_q(mutate_poly(com.q(), 64, r)),
            2 => mutate_vec(&mut trace.rho, r),
            3 => mutate_vec(&mut trace.sigma, r),
            4 => trace.phi += nonzero(r),
            5 => trace.m += nonzero(r),
            6 => trace.n += nonzero(r),
            7 => trace.r_scalar += nonzero(r),
            8 => {
                if r.gen() {
                    claims.y1 += nonzero(r)
                } else {
                    claims.y2 += nonzero(r)
                }
            }
            _ => {
                let mut f = proof.to_fields();
                mutate_vec(&mut f, r);
                proof = EvalProof::from_fields(f);
            }
        }
        rejected += usize::from(!pcs_verify(&run, &com, &trace, &claims, &proof));
    }
    rejected
}

fn mutate_opening_field(proof: &mut PiopProof, r: &mut impl Rng) {
    let slot = r.gen_range(0..proof.openings.len());
    let o = &mut proof.openings[slot];
    match r.gen_range(0..8) {
        0 => mutate_vec(&mut o.trace.rho, r),
        1 => mutate_vec(&mut o.trace.sigma, r),
        2 => o.trace.phi += nonzero(r),
        3 => o.trace.m += nonzero(r),
        4 => o.trace.r_scalar += nonzero(r),
        5 => o.claims.y1 += nonzero(r),
        6 => o.claims.y2 += nonzero(r),
        _ => {
            let mut f = o.proof.to_fields();
            mutate_vec(&mut f, r);
            o.proof = EvalProof::from_fields(f);
        }
    }
}

fn piop_mutations(r: &mut ChaCha20Rng) -> usize {
    let (pp, idx, w) = fixture(4, 64, 3);
    let mut rejected = 0;
    for _ in 0..100 {
        let out = piop_prove(&pp, &idx, &w, &mut Transcript::new(b"acceptance/piop"), r).expect("prove");
        let mut proof = out.proof.clone();
        match r.gen_range(0..5) {
            0 => {
                let i = r.gen_range(0..proof.a.len());
                proof.a[i] += 1;
            }
            1 => proof.sigma1 += nonzero(r),
            2 => proof.s_val += nonzero(r),
            3 => {
                let i = r.gen_range(0..proof.digests.len());
                proof.digests[i][r.gen_range(0..32)] ^= 1 << r.gen_range(0..8);
            }
            _ => mutate_opening_field(&mut proof, r),
        }
        let accepted = decide(&pp, &idx, &proof, None, &mut Transcript::new(b"acceptance/piop"))
            .map(|(report, _)| report.accepted())
            .unwrap_or(false);
        rejected += usize::from(!accepted);
    }
    rejected
}

fn aggregate(pp: &PublicParams, steps: usize, r: &mut impl Rng) -> (Aggregator, Vec<AggregationStep>) {
    let mut agg = Aggregator::new(pp);
    let mut all = Vec::with_capacity(steps);
    for _ in 0..steps {
        let f = random_poly(r, pp.d());
        let (com, hint) = commit(pp, &f, r).expect("commit");
        let step = AggregationStep::new(pp, com, &hint);
        agg.push(pp, &step).expect("push");
        all.push(step);
    }
    (agg, all)
}

fn recursion_mutations(r: &mut ChaCha20Rng) -> usize {
    let pp = setup(&SetupConfig::new(16, 2, b"acceptance/agg")).expect("setup");
    let (agg, _) = aggregate(&pp, 8, r);
    let mut rejected = 0;
    for _ in 0..100 {
        let mut digest: AggregateDigest = agg.digest.clone();
        let step = &mut digest.steps[r.gen_range(0..8)];
        match r.gen_range(0..6) {
            0 => step.commitment = step.commitment.with_c(mutate_poly(step.commitment.c(), 16, r)),
            1 => step.commitment = step.commitment.with_q(mutate_poly(step.commitment.q(), 16, r)),
            2 => step.k += 1,
            3 => {
                let i = r.gen_range(0..step.r.len());
                step.r[i] = mutate_poly(&step.r[i], 16, r);
            }
            4 => {
                let i = r.gen_range(0..step.s.len());
                step.s[i] = mutate_poly(&step.s[i], 16, r);
            }
            _ => {
                let i = r.gen_range(0..step.t.len());
                step.t[i] = mutate_poly(&step.t[i], 16, r);
            }
        }
        rejected += usize::from(!finalize_verify(&pp, &agg.state, &digest));
    }
    rejected
}

fn bitflip_mutations(r: &mut ChaCha20Rng) -> usize {
    let (pp, idx, w) = fixture(8, 64, 4);
    let bytes = snark::prove(&pp, &idx, &w, 1).expect("prove").to_bytes();
    let mut rejected = 0;
    for _ in 0..100 {
        let mut b = bytes.clone();
        let i = r.gen_range(0..b.len());
        b[i] ^= 1 << r.gen_range(0..8);
        rejected += usize::from(!matches!(snark::verify(&pp, &idx, &b), Ok(true)));
    }
    rejected
}

fn mutation_soundness() -> Outcome {
    let mut r = rng(5);
    let suites = [
        ("pcs", pcs_mutations(&mut r)),
        ("piop", piop_mutations(&mut r)),
        ("recursion", recursion_mutations(&mut r)),
        ("bit flips", bitflip_mutations(&mut r)),
    ];
    let summary = suites.iter().map(|(n, k)| format!("{n} {k}/100")).collect::<Vec<_>>().join(", ");
    ensure(suites.iter().all(|(_, k)| *k >= 99), summary.clone())?;
    Ok(summary)
}

fn piop_end_to_end() -> Outcome {
    let pp = setup(&SetupConfig::new(64, 2, b"acceptance/piop")).map_err(|e| e.to_string())?;
    let mut r = rng(6);
    for n in [2, 4, 8, 16] {
        for i in 0..100 {
            let (rel, w) = generate_satisfiable(n, &mut r).map_err(|e| e.to_string())?;
            let idx = index(&rel).map_err(|e| e.to_string())?;
            let out = piop_prove(&pp, &idx, &w, &mut Transcript::new(b"acceptance/e2e"), &mut r)
                .map_err(|e| format!("n = {n}, instance {i}: {e}"))?;
            let t_poly = sparse_numerator(&idx, &out.challenges, &out.polys[Slot::PHat.index()]);
            let r2 = &out.polys[Slot::R2.index()];
            let z_m = idx.m_domain.vanishing_poly();
            ensure(&(r2 * &z_m) - &t_poly == Poly::zero(), format!("Z_M does not divide T at n = {n}"))?;
            let (report, _) = decide(&pp, &idx, &out.proof, None, &mut Transcript::new(b"acceptance/e2e"))
                .map_err(|e| e.to_string())?;
            ensure(report.accepted(), format!("n = {n}, instance {i} rejected: {:?}", report.failures()))?;
        }
    }
    Ok("400/400 accepted, T = r2·Z_M exactly on every trace".into())
}

/// keccak256 of the proof for (size 8, d 64, relation seed 4, prover seed 1),
/// recorded on x86_64 Linux; the check fails on any platform that disagrees.
const PINNED_PROOF_DIGEST: &str = "8c56707d603dbc09d3bb214b5615a5a606368bee0879867a36b73f4dc7ceaf0a";

fn hex(b: &[u8]) -> String {
    b.iter().map(|x| format!("{x:02x}")).collect()
}

fn fiat_shamir_determinism() -> Outcome {
    let (pp, idx, w) = fixture(8, 64, 4);
    let a = snark::prove(&pp, &idx, &w, 1).map_err(|e| e.to_string())?.to_bytes();
    let (pp2, idx2, w2) = fixture(8, 64, 4);
    let b = snark::prove(&pp2, &idx2, &w2, 1).map_err(|e| e.to_string())?.to_bytes();
    ensure(a == b, "two runs differ")?;
    let digest = hex(&keccak256(&a));
    ensure(digest == PINNED_PROOF_DIGEST, format!("proof digest {digest} differs from the pinned value"))?;
    Ok(format!("byte-identical, digest {}…", &digest[..16]))
}

/// Per-position 2×k chi-square homogeneity test between two byte samples.
fn chi_square_p(a: &[u8], b: &[u8]) -> Option<f64> {
    let mut counts = [[0f64; 256]; 2];
    for &x in a {
        counts[0][x as usize] += 1.0;
    }
    for &x in b {
        counts[1][x as usize] += 1.0;
    }
    let cats: Vec<usize> = (0..256).filter(|&c| counts[0][c] + counts[1][c] > 0.0).collect();
    if cats.len() < 2 {
        return None;
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let total = na + nb;
    let stat: f64 = cats
        .iter()
        .map(|&c| {
            let col = counts[0][c] + counts[1][c];
            [(counts[0][c], na), (counts[1][c], nb)]
                .iter()
                .map(|(obs, row)| {
                    let exp = row * col / total;
                    (obs - exp).powi(2) / exp
                })
                .sum::<f64>()
        })
        .sum();
    let dist = ChiSquared::new((cats.len() - 1) as f64).ok()?;
    Some(1.0 - dist.cdf(stat))
}

fn zero_knowledge_smoke() -> Outcome {
    const SAMPLES: u64 = 1000;
    let (pp, idx, w) = fixture(4, 64, 7);
    let real: Vec<Vec<u8>> = (0..SAMPLES)
        .map(|s| snark::real_transcript(&pp, &idx, &w, s).map(|t| t.to_bytes()))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let sim: Vec<Vec<u8>> = (0..SAMPLES)
        .map(|s| snark::simulate(&pp, &idx, 1_000_000 + s).map(|t| t.to_bytes()))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let len = real[0].len();
    ensure(real.iter().chain(&sim).all(|t| t.len() == len), "transcript lengths differ")?;
    let sim_proof = snark::simulate(&pp, &idx, 0).map_err(|e| e.to_string())?.proof;
    ensure(snark::Proof::from_bytes(&sim_proof.to_bytes()).is_ok(), "simulated proof does not parse")?;

    let p_values: Vec<(usize, f64)> = (0..len)
        .filter_map(|i| {
            let a: Vec<u8> = real.iter().map(|t| t[i]).collect();
            let b: Vec<u8> = sim.iter().map(|t| t[i]).collect();
            chi_square_p(&a, &b).map(|p| (i, p))
        })
        .collect();
    let threshold = 0.01 / p_values.len() as f64;
    let (worst_pos, worst) = p_values.iter().copied().fold((0, 1.0), |acc, x| if x.1 < acc.1 { x } else { acc });
    ensure(worst >= threshold, format!("position {worst_pos} distinguishes with p = {worst:.2e}"))?;
    Ok(format!("{len}-byte transcripts, {} positions tested, min p = {worst:.2e} (threshold {threshold:.1e})", p_values.len()))
}

fn median(mut xs: Vec<Duration>) -> Duration {
    xs.sort();
    xs[xs.len() / 2]
}

fn amortization() -> Outcome {
    const STEPS: usize = 32;
    let pp = setup(&SetupConfig::new(1024, 8, b"acceptance/amortize")).map_err(|e| e.to_string())?;
    let mut r = rng(8);
    let runs: Vec<PcsRun> = (0..STEPS).map(|_| pcs_run(&pp, &mut r)).collect();
    let mut agg = Aggregator::new(&pp);
    for _ in 0..STEPS {
        let f = random_poly(&mut r, pp.d());
        let (com, hint) = commit(&pp, &f, &mut r).map_err(|e| e.to_string())?;
        agg.push(&pp, &AggregationStep::new(&pp, com, &hint)).map_err(|e| e.to_string())?;
    }
    let mut t_agg = Vec::new();
    let mut t_each = Vec::new();
    for _ in 0..5 {
        let start = Instant::now();
        ensure(finalize_verify(&pp, &agg.state, &agg.digest), "aggregate rejected")?;
        t_agg.push(start.elapsed());
        let start = Instant::now();
        for run in &runs {
            ensure(pcs_verify(run, &run.com, &run.trace, &run.claims, &run.proof), "step rejected")?;
        }
        t_each.push(start.elapsed());
    }
    let (a, e) = (median(t_agg), median(t_each));
    let ratio = a.as_secs_f64() / e.as_secs_f64();
    ensure(ratio < 0.5, format!("ratio {ratio:.3} ({a:?} vs {e:?})"))?;
    Ok(format!("ratio {ratio:.3} ({a:?} vs {e:?})"))
}

fn succinctness() -> Outcome {
    let sizes: Vec<usize> = (8..=14).map(|k| 1 << k).collect();
    let by_size = bench_report(&run_bench(&BenchConfig::new(sizes, 4096)).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    let max_bytes = by_size.records.iter().map(|r| r.proof_bytes).max().unwrap_or(0);
    ensure(max_bytes <= PROOF_BUDGET_BYTES, format!("proof {max_bytes} B exceeds the budget"))?;
    ensure(by_size.proof_size_spread <= 0.10, format!("size spread {:.3}", by_size.proof_size_spread))?;

    let mut cfg = BenchConfig::new(vec![16], 256);
    cfg.ds = (8..=14).map(|k| 1 << k).collect();
    let by_d = bench_report(&run_bench(&cfg).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let slope = by_d.verify_slope_vs_d.ok_or("no slope vs d")?;
    ensure(slope < 0.5, format!("verifier slope vs d {slope:.3}"))?;
    Ok(format!(
        "{max_bytes} B at d = 4096, spread {:.1}%, verifier slope vs d {slope:.3}",
        by_size.proof_size_spread * 100.0
    ))
}

/// Digests from an independent Keccak-256 implementation (pycryptodome).
const KECCAK_VECTORS: &[(&[u8], &str)] = &[
    (b"", "c5d2460186f7233c927e7db2dcc703c0e500b653ca82273b7bfad8045d85a470"),
    (b"abc", "4e03657aea45a94fc7d47ba826c8d667c0d1e6e33a64a036ec44f58fa12d6c45"),
    (b"The quick brown fox jumps over the lazy dog", "4d741b6f1eb29cb2a9b9911c82f56fa8d73b04959d3d9d222895df6c0b28aa15"),
];

fn keccak_conformance() -> Outcome {
    for (msg, want) in KECCAK_VECTORS {
        ensure(hex(&keccak256(msg)) == *want, format!("mismatch on {:?}", String::from_utf8_lossy(msg)))?;
    }
    let million = vec![b'a'; 1_000_000];
    ensure(
        hex(&keccak256(&million)) == "fadae6b49f129bbb812be8407b7b2894f34aecf6dbd1f9b0f0c7e9853098fc96",
        "mismatch on 10^6 × 'a'",
    )?;
    let cycled: Vec<u8> = (0..768).map(|i| i as u8).collect();
    ensure(
        hex(&keccak256(&cycled)) == "00e77ce2c4f77212a0d5df106b08157b77058479357a98a6039b457c469723e4",
        "mismatch on multi-block input",
    )?;
    Ok(format!("{} vectors", KECCAK_VECTORS.len() + 2))
}

fn identity_audit() -> Outcome {
    let pp = setup(&SetupConfig::new(64, 2, b"acceptance/audit")).map_err(|e| e.to_string())?;
    let report = run_audit(&pp, &[2, 4, 8], 9).map_err(|e| e.to_string())?;
    ensure(report.consistent(), "an enforced reading failed on an honest trace")?;
    let id = report.calibration_id;
    ensure(id == snark::calibration_id(), format!("audit id {id:#06x} differs from the pinned one"))?;
    let mut r = rng(10);
    for i in 0..100 {
        let (rel, w) = generate_satisfiable([2, 4, 8][i % 3], &mut r).map_err(|e| e.to_string())?;
        let idx = index(&rel).map_err(|e| e.to_string())?;
        let proof = snark::prove_with_calibration(&pp, &idx, &w, i as u64, id).map_err(|e| e.to_string())?;
        let verdict = snark::verify_detailed(&pp, &idx, &proof.to_bytes(), id).map_err(|e| e.to_string())?;
        ensure(verdict == Verdict::Accept, format!("honest trace {i} rejected"))?;
    }
    Ok(format!("calibration id {id:#06x}, 100/100 accepted"))
}

fn main() {
    let checks: [Check; 10] = [
        ("lambda kernel identity", lambda_identity, Some(Duration::from_secs(10))),
        ("pcs completeness", pcs_completeness, Some(Duration::from_secs(60))),
        ("mutation soundness", mutation_soundness, Some(Duration::from_secs(300))),
        ("piop end-to-end", piop_end_to_end, None),
        ("fiat-shamir determinism", fiat_shamir_determinism, None),
        ("zero-knowledge smoke", zero_knowledge_smoke, None),
        ("amortization", amortization, None),
        ("succinctness", succinctness, None),
        ("keccak-256 conformance", keccak_conformance, None),
        ("identity audit", identity_audit, None),
    ];
    let mut failed = 0;
    for (name, check, budget) in checks {
        let start = Instant::now();
        let mut outcome = check();
        let elapsed = start.elapsed();
        if let (Ok(msg), Some(limit)) = (&outcome, budget) {
            if elapsed > limit {
                outcome = Err(format!("{msg}; took {elapsed:.1?}, budget {limit:?}"));
            }
        }
        match outcome {
            Ok(msg) => println!("PASS {name}: {msg} [{elapsed:.2?}]"),
            Err(msg) => {
                failed += 1;
                println!("FAIL {name}: {msg} [{elapsed:.2?}]");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance check(s) failed");
        std::process::exit(1);
    }
}
