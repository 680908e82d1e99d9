use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use lumen::audit::{conformance_markdown, run_audit, DEFAULT_AUDIT_SIZES};
use lumen::bench::{bench_report, run_bench, BenchConfig, MIN_RUNS};
use lumen::field_poly::{FieldElement, Poly};
use lumen::pcs::{commit, setup, BackendName, PublicParams, SetupConfig};
use lumen::piop::{generate_satisfiable, index, RelationIndex, Witness};
use lumen::recursion::{finalize_verify, AggregateDigest, AggregateState, AggregationStep, Aggregator};
use lumen::snark::{self, Verdict};
use lumen::LumenError;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

const EXIT_REJECT: u8 = 1;
const EXIT_ERROR: u8 = 2;

#[derive(Parser)]
#[command(name = "lumen", version, about = "Hidden-order-group polynomial commitments and a SNARK built on them")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Rsa,
    Test,
}

#[derive(Subcommand)]
enum Command {
    /// Generate public parameters.
    Setup {
        #[arg(long)]
        seed: String,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 2)]
        alpha: usize,
        #[arg(long, value_enum, default_value = "rsa")]
        backend: BackendArg,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sample a satisfiable relation and its witness.
    GenRelation {
        #[arg(long)]
        size: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out_index: PathBuf,
        #[arg(long)]
        out_witness: PathBuf,
    },
    Prove {
        #[arg(long)]
        pp: PathBuf,
        #[arg(long)]
        index: PathBuf,
        #[arg(long)]
        witness: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Exit status 0 on accept, 1 on reject, 2 on malformed input.
    Verify {
        #[arg(long)]
        pp: PathBuf,
        #[arg(long)]
        index: PathBuf,
        #[arg(long)]
        proof: PathBuf,
    },
    /// Fold `steps` random commitments, or check an existing aggregate with `--check`.
    Aggregate {
        #[arg(long)]
        pp: PathBuf,
        #[arg(long, default_value_t = 8)]
        steps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, conflicts_with = "check")]
        out: Option<PathBuf>,
        #[arg(long)]
        check: Option<PathBuf>,
    },
    /// Evaluate every literal identity on honest traces and print the calibration id.
    Audit {
        #[arg(long)]
        pp: PathBuf,
        #[arg(long, value_delimiter = ',')]
        sizes: Option<Vec<usize>>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Markdown report destination.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    Bench {
        /// `a..b` for the powers of two from a to b, or a comma list.
        #[arg(long, default_value = "256..16384")]
        sizes: String,
        #[arg(long, value_delimiter = ',', default_value = "4096")]
        d: Vec<usize>,
        #[arg(long, default_value_t = 2)]
        alpha: usize,
        #[arg(long, default_value_t = MIN_RUNS)]
        runs: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        json: PathBuf,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(Debug)]
enum CliError {
    Io(PathBuf, std::io::Error),
    Lumen(LumenError),
    Usage(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Io(p, e) => write!(f, "{}: {e}", p.display()),
            CliError::Lumen(e) => write!(f, "{e}"),
            CliError::Usage(m) => f.write_str(m),
        }
    }
}

impl From<LumenError> for CliError {
    fn from(e: LumenError) -> Self {
        CliError::Lumen(e)
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn read(path: &Path) -> CliResult<Vec<u8>> {
    fs::read(path).map_err(|e| CliError::Io(path.to_owned(), e))
}

fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Io(path.to_owned(), e))
}

fn write(path: &Path, bytes: impl AsRef<[u8]>) -> CliResult<()> {
    fs::write(path, bytes).map_err(|e| CliError::Io(path.to_owned(), e))
}

fn load_pp(path: &Path) -> CliResult<PublicParams> {
    Ok(PublicParams::from_bytes(&read(path)?)?)
}

fn parse_sizes(spec: &str) -> CliResult<Vec<usize>> {
    let bad = || CliError::Usage(format!("cannot parse sizes {spec:?}"));
    if let Some((lo, hi)) = spec.split_once("..") {
        let lo: usize = lo.trim().parse().map_err(|_| bad())?;
        let hi: usize = hi.trim().parse().map_err(|_| bad())?;
        if lo == 0 || !lo.is_power_of_two() || hi < lo {
            return Err(bad());
        }
        return Ok(std::iter::successors(Some(lo), |s| s.checked_mul(2)).take_while(|s| *s <= hi).collect());
    }
    spec.split(',').map(|s| s.trim().parse().map_err(|_| bad())).collect()
}

/// Length-prefixed state followed by the digest.
fn aggregate_bytes(state: &AggregateState, digest: &AggregateDigest) -> Vec<u8> {
    let s = state.to_bytes();
    let mut out = (s.len() as u32).to_le_bytes().to_vec();
    out.extend_from_slice(&s);
    out.extend_from_slice(&digest.to_bytes());
    out
}

fn parse_aggregate(bytes: &[u8]) -> CliResult<(AggregateState, AggregateDigest)> {
    let truncated = || CliError::Lumen(LumenError::Malformed("aggregate file truncated".into()));
    let len = bytes.get(..4).ok_or_else(truncated)?;
    let len = u32::from_le_bytes(len.try_into().expect("4 bytes")) as usize;
    let state = bytes.get(4..4 + len).ok_or_else(truncated)?;
    Ok((AggregateState::from_bytes(state)?, AggregateDigest::from_bytes(&bytes[4 + len..])?))
}

fn run(cli: Cli) -> CliResult<ExitCode> {
    match cli.command {
        Command::Setup { seed, d, alpha, backend, out } => {
            let backend = match backend {
                BackendArg::Rsa => BackendName::RsaChallenge,
                BackendArg::Test => BackendName::TestKnownOrder,
            };
            let pp = setup(&SetupConfig::new(d, alpha, seed.as_bytes()).with_backend(backend))?;
            write(&out, pp.encoding())?;
            println!("wrote {} (d={d}, alpha={alpha})", out.display());
        }
        Command::GenRelation { size, seed, out_index, out_witness } => {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            let (rel, wit) = generate_satisfiable(size, &mut rng)?;
            write(&out_index, rel.to_json())?;
            write(&out_witness, wit.to_json())?;
            println!("relation n={} nnz={}+{}", rel.n, rel.m1.nnz(), rel.m2.nnz());
        }
        Command::Prove { pp, index: index_path, witness, seed, out } => {
            let pp = load_pp(&pp)?;
            let rel = RelationIndex::from_json(&read_text(&index_path)?)?;
            let wit = Witness::from_json(&read_text(&witness)?)?;
            rel.check_witness(&wit)?;
            let idx = index(&rel)?;
            let bytes = snark::prove(&pp, &idx, &wit, seed)?.to_bytes();
            write(&out, &bytes)?;
            println!("proof: {} bytes", bytes.len());
        }
        Command::Verify { pp, index: index_path, proof } => {
            let pp = load_pp(&pp)?;
            let rel = RelationIndex::from_json(&read_text(&index_path)?)?;
            let idx = index(&rel)?;
            let bytes = read(&proof)?;
            match snark::verify_detailed(&pp, &idx, &bytes, snark::calibration_id())? {
                Verdict::Accept => println!("accept"),
                Verdict::HeaderMismatch => {
                    eprintln!("reject: calibration id or relation digest does not match");
                    return Ok(ExitCode::from(EXIT_REJECT));
                }
                Verdict::Reject(report) => {
                    let failures = report.failures();
                    eprintln!("reject: {} of {} checks failed", failures.len(), report.items.len());
                    for item in failures.iter().take(5) {
                        eprintln!("  {item}");
                    }
                    return Ok(ExitCode::from(EXIT_REJECT));
                }
            }
        }
        Command::Aggregate { pp, steps, seed, out, check } => {
            let pp = load_pp(&pp)?;
            if let Some(path) = check {
                let (state, digest) = parse_aggregate(&read(&path)?)?;
                if !finalize_verify(&pp, &state, &digest) {
                    eprintln!("reject");
                    return Ok(ExitCode::from(EXIT_REJECT));
                }
                println!("accept ({} steps)", state.step_count);
                return Ok(ExitCode::SUCCESS);
            }
            let out = out.ok_or_else(|| CliError::Usage("aggregate needs --out or --check".into()))?;
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            let mut agg = Aggregator::new(&pp);
            for _ in 0..steps {
                let f = Poly::from_coeffs((0..pp.d()).map(|_| FieldElement::new(rng.gen())).collect());
                let (com, hint) = commit(&pp, &f, &mut rng)?;
                agg.push(&pp, &AggregationStep::new(&pp, com, &hint))?;
            }
            let bytes = aggregate_bytes(&agg.state, &agg.digest);
            write(&out, &bytes)?;
            println!("aggregated {steps} steps: {} bytes", bytes.len());
        }
        Command::Audit { pp, sizes, seed, out } => {
            let pp = load_pp(&pp)?;
            let sizes = sizes.unwrap_or_else(|| DEFAULT_AUDIT_SIZES.to_vec());
            let report = run_audit(&pp, &sizes, seed)?;
            if let Some(path) = out {
                write(&path, conformance_markdown(&report))?;
            }
            println!("calibration id: {:#06x}", report.calibration_id);
            if !report.consistent() {
                eprintln!("audit: an enforced reading failed on an honest trace");
                return Ok(ExitCode::from(EXIT_REJECT));
            }
            if report.calibration_id != snark::calibration_id() {
                eprintln!("audit: calibration id differs from the pinned {:#06x}", snark::calibration_id());
                return Ok(ExitCode::from(EXIT_REJECT));
            }
        }
        Command::Bench { sizes, d, alpha, runs, seed, json, csv } => {
            let cfg = BenchConfig { sizes: parse_sizes(&sizes)?, ds: d, alpha, runs, seed };
            let report = bench_report(&run_bench(&cfg)?)?;
            write(&json, report.to_json())?;
            if let Some(path) = csv {
                write(&path, report.to_csv())?;
            }
            for r in &report.records {
                println!("size={:<6} d={:<6} proof={}B prove={:.1}ms verify={:.2}ms", r.size, r.d, r.proof_bytes, r.prove_ms, r.verify_ms);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
