use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use qembed::experiments::{
    embed_experiment, family_pair, fingerprint_demo, jl_baseline, lower_bound_table,
    parse_explicit_states, standard_pairs, two_norm_experiment, EmbedParams, ExperimentReport,
    FingerprintParams, JlParams, StateFamily, TwoNormParams,
};
use qembed::games::{
    equality_game_simulate, helstrom_bias, optimal_m_average_bias, Adversary, GameSpec, Strategy,
};
use qembed::linalg::{dump, DensityMatrix};
use qembed::sampling::{parse_seed, RngStream};
use qembed::verifiers::{run_lemma, LemmaId, SuiteOptions, Verdict, SIGMA_MARGIN};
use qembed::Error;

const EXIT_FAIL: u8 = 2;
const EXIT_USAGE: u8 = 3;
const EXIT_NUMERICAL: u8 = 4;

#[derive(Parser, Debug)]
#[command(
    name = "qembed",
    version,
    about = "Numerics for quantum dimensionality reduction"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Root seed, decimal or 0x-prefixed hex.
    #[arg(long, global = true, default_value = "0", value_parser = seed_arg)]
    seed: u64,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Worker threads (results do not depend on this).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Print the input matrices to stderr.
    #[arg(long, global = true)]
    dump: bool,
    /// Include per-trial records in JSON output.
    #[arg(long, global = true)]
    full: bool,
    /// Record wall-clock runtime (makes the report non-reproducible).
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the Haar-integral lemmas.
    Verify {
        /// Lemma id or "all".
        #[arg(long, default_value = "all")]
        lemma: String,
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long)]
        target_dim: Option<usize>,
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Simulate the equality-testing game.
    Game {
        #[arg(long, default_value = "orthogonal-pure")]
        family: String,
        #[arg(long, default_value_t = 100_000)]
        rounds: usize,
        /// swap-test or optimal-m.
        #[arg(long, default_value = "swap-test")]
        strategy: String,
        /// fixed-u or haar-u.
        #[arg(long, default_value = "haar-u")]
        adversary: String,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 1)]
        rank: usize,
    },
    /// Trace-norm embedding by a random isometry followed by a partial trace.
    Embed {
        #[arg(long, default_value_t = 64)]
        dim: usize,
        #[arg(long, default_value_t = 1)]
        rank: usize,
        #[arg(long, default_value_t = 0.5)]
        epsilon: f64,
        #[arg(long, default_value_t = 0.0)]
        delta: f64,
        /// Defaults to ⌈2√(rd/ε)⌉.
        #[arg(long)]
        target_dim: Option<usize>,
        #[arg(long, default_value_t = 500)]
        trials: usize,
        #[arg(long, default_value = "orthogonal-pure")]
        family: String,
        /// JSON file with {"rho": [[..]], "sigma": [[..]]}.
        #[arg(long)]
        states: Option<PathBuf>,
    },
    /// Average 2-norm contraction and the ruled-out parameter region.
    TwoNorm {
        #[arg(long, default_value_t = 16)]
        dim: usize,
        #[arg(long, default_value_t = 4)]
        target_dim: usize,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(long, default_value = "orthogonal-pure")]
        family: String,
        #[arg(long, default_value_t = 1)]
        rank: usize,
        #[arg(long)]
        states: Option<PathBuf>,
    },
    /// Target-dimension lower bounds for concrete state pairs.
    Bounds {
        #[arg(long, default_value_t = 8)]
        dim: usize,
        #[arg(long, default_value_t = 0.0)]
        epsilon: f64,
        #[arg(long, default_value_t = 0.0)]
        delta: f64,
        /// A state family or "all".
        #[arg(long, default_value = "all")]
        family: String,
        #[arg(long, default_value_t = 1)]
        rank: usize,
        #[arg(long)]
        states: Option<PathBuf>,
    },
    /// Classical Gaussian random projection baseline.
    Jl {
        #[arg(long, default_value_t = 32)]
        points: usize,
        #[arg(long, default_value_t = 1024)]
        dim: usize,
        #[arg(long, value_delimiter = ',', default_value = "8,16,32,64")]
        target_dims: Vec<usize>,
        #[arg(long, default_value_t = 0.5)]
        epsilon: f64,
        #[arg(long, default_value_t = 20)]
        trials: usize,
    },
    /// Swap-test fingerprinting of compressed basis vectors.
    Fingerprint {
        #[arg(long, default_value_t = 64)]
        strings: usize,
        #[arg(long, default_value_t = 32)]
        compressed_dim: usize,
        #[arg(long, default_value_t = 10_000)]
        rounds: usize,
        /// Swap tests per round.
        #[arg(long, default_value_t = 1)]
        repetitions: usize,
    },
}

fn seed_arg(s: &str) -> Result<u64, String> {
    parse_seed(s).map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(report) => {
            if report.any_failed() {
                ExitCode::from(EXIT_FAIL)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("qembed: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(Error::NumericalFailure { .. }) => EXIT_NUMERICAL,
        Some(_) => EXIT_USAGE,
        None => 1,
    }
}

fn run(cli: Cli) -> anyhow::Result<ExperimentReport> {
    let g = &cli.global;
    let start = Instant::now();
    let mut report = match g.workers {
        Some(0) => return Err(Error::InvalidParameter("--workers must be >= 1".into()).into()),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()?
            .install(|| dispatch(&cli.command, g))?,
        None => dispatch(&cli.command, g)?,
    };
    if g.timing {
        report.runtime_seconds = Some(start.elapsed().as_secs_f64());
    }
    emit(&report, g)?;
    Ok(report)
}

fn emit(report: &ExperimentReport, g: &Global) -> anyhow::Result<()> {
    let mut buf = Vec::new();
    match g.format {
        Format::Json => buf.extend_from_slice(report.to_json(g.full).as_bytes()),
        Format::Csv => report.write_csv(&mut buf)?,
    }
    match &g.out {
        Some(path) => fs::write(path, buf)?,
        None => io::stdout().lock().write_all(&buf)?,
    }
    Ok(())
}

fn dispatch(cmd: &Command, g: &Global) -> anyhow::Result<ExperimentReport> {
    let seed = g.seed;
    let report = match cmd {
        Command::Verify {
            lemma,
            dim,
            target_dim,
            samples,
        } => {
            let ids: Vec<LemmaId> = if lemma == "all" {
                LemmaId::ALL.to_vec()
            } else {
                vec![lemma.parse()?]
            };
            let opts = SuiteOptions {
                dim: *dim,
                target_dim: *target_dim,
                samples: *samples,
            };
            verify(&ids, &opts, seed)?
        }
        Command::Game {
            family,
            rounds,
            strategy,
            adversary,
            dim,
            rank,
        } => {
            let strategy = match strategy.as_str() {
                "swap-test" => Strategy::SwapTest,
                "optimal-m" => Strategy::OptimalM,
                other => {
                    return Err(
                        Error::InvalidParameter(format!("unknown strategy '{other}'")).into(),
                    )
                }
            };
            let adversary: Adversary = adversary.parse()?;
            let family: StateFamily = family.parse()?;
            let (rho, sigma) = family_pair(
                family,
                *dim,
                *rank,
                &mut RngStream::from_seed(seed).substream(0),
            )
            .map(|p| (p.rho, p.sigma))?;
            if g.dump {
                dump_states(&rho, &sigma);
                eprintln!("# measurement\n{}", dump(&strategy.measurement(*dim)?));
            }
            game(
                family, &rho, &sigma, *rounds, adversary, strategy, *rank, seed,
            )?
        }
        Command::Embed {
            dim,
            rank,
            epsilon,
            delta,
            target_dim,
            trials,
            family,
            states,
        } => {
            let explicit = load_states(states.as_ref())?;
            let params = EmbedParams {
                d: explicit.as_ref().map_or(*dim, |p| p.0.dim()),
                r: *rank,
                epsilon: *epsilon,
                delta: *delta,
                e: *target_dim,
                trials: *trials,
                family: family.parse()?,
            };
            if g.dump {
                if let Some((rho, sigma)) = &explicit {
                    dump_states(rho, sigma);
                }
            }
            embed_experiment(&params, explicit, seed)?
        }
        Command::TwoNorm {
            dim,
            target_dim,
            trials,
            family,
            rank,
            states,
        } => {
            let explicit = load_states(states.as_ref())?;
            let params = TwoNormParams {
                d: explicit.as_ref().map_or(*dim, |p| p.0.dim()),
                e: *target_dim,
                trials: *trials,
                family: family.parse()?,
                r: *rank,
            };
            if g.dump {
                if let Some((rho, sigma)) = &explicit {
                    dump_states(rho, sigma);
                }
            }
            two_norm_experiment(&params, explicit, seed)?
        }
        Command::Bounds {
            dim,
            epsilon,
            delta,
            family,
            rank,
            states,
        } => {
            let mut rng = RngStream::from_seed(seed);
            let (d, pairs) = match load_states(states.as_ref())? {
                Some((rho, sigma)) => {
                    let d = rho.dim();
                    (
                        d,
                        vec![qembed::experiments::BoundPair {
                            family: StateFamily::Explicit,
                            r: *rank,
                            rho,
                            sigma,
                        }],
                    )
                }
                None if family == "all" => (*dim, standard_pairs(*dim, &mut rng)?),
                None => (
                    *dim,
                    vec![family_pair(family.parse()?, *dim, *rank, &mut rng)?],
                ),
            };
            if g.dump {
                for p in &pairs {
                    dump_states(&p.rho, &p.sigma);
                }
            }
            lower_bound_table(d, *epsilon, *delta, &pairs, seed)?
        }
        Command::Jl {
            points,
            dim,
            target_dims,
            epsilon,
            trials,
        } => jl_baseline(
            &JlParams {
                n_points: *points,
                d: *dim,
                target_dims: target_dims.clone(),
                epsilon: *epsilon,
                trials: *trials,
            },
            seed,
        )?,
        Command::Fingerprint {
            strings,
            compressed_dim,
            rounds,
            repetitions,
        } => fingerprint_demo(
            &FingerprintParams {
                k_strings: *strings,
                dim_compressed: *compressed_dim,
                rounds: *rounds,
                repetitions: *repetitions,
            },
            seed,
        )?,
    };
    Ok(report)
}

fn load_states(path: Option<&PathBuf>) -> anyhow::Result<Option<(DensityMatrix, DensityMatrix)>> {
    let Some(path) = path else { return Ok(None) };
    let text = fs::read_to_string(path)?;
    Ok(Some(parse_explicit_states(&text)?))
}

fn dump_states(rho: &DensityMatrix, sigma: &DensityMatrix) {
    eprintln!("# rho\n{}", dump(rho.matrix()));
    eprintln!("# sigma\n{}", dump(sigma.matrix()));
}

fn verify(ids: &[LemmaId], opts: &SuiteOptions, seed: u64) -> anyhow::Result<ExperimentReport> {
    let mut report = ExperimentReport::new("verify", seed);
    report.params = json!({
        "lemmas": ids.iter().map(|id| id.as_str()).collect::<Vec<_>>(),
        "dim": opts.dim,
        "target_dim": opts.target_dim,
        "samples": opts.samples,
    });
    let mut records = Vec::new();
    for &id in ids {
        let rec = run_lemma(id, opts, seed)?;
        report.push_verdict(id.as_str(), rec.verdict);
        records.push(serde_json::to_value(&rec)?);
    }
    report.bounds = Value::Object(
        records
            .iter()
            .map(|r| {
                (
                    r["lemma_id"].as_str().unwrap_or_default().to_string(),
                    r["bound"].clone(),
                )
            })
            .collect(),
    );
    report.aggregates = json!({"records": records});
    report.trials = records;
    Ok(report)
}

#[allow(clippy::too_many_arguments)]
fn game(
    family: StateFamily,
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    rounds: usize,
    adversary: Adversary,
    strategy: Strategy,
    rank: usize,
    seed: u64,
) -> anyhow::Result<ExperimentReport> {
    let delta = rho.difference(sigma)?;
    let norm2sq = delta.trace_sq();
    let strategy_name = strategy.name();
    let spec = GameSpec::new(rho.clone(), sigma.clone(), rounds, adversary, strategy)?;
    let mut rng = RngStream::from_seed(seed).substream(1);
    let result = equality_game_simulate(&spec, true, &mut rng)?;
    let optimal_bias = optimal_m_average_bias(rho, sigma)?;
    let helstrom = helstrom_bias(rho, sigma)?;

    let mut report = ExperimentReport::new("game", seed);
    report.params = json!({
        "state_family": family.as_str(),
        "d": rho.dim(),
        "r": rank,
        "rounds": rounds,
        "strategy": strategy_name,
        "adversary": adversary.to_string(),
    });
    report.bounds = json!({
        "haar_average_success": 0.5 + norm2sq / 8.0,
        "analytic_success": result.analytic_success,
        "optimal_average_bias": norm2sq / 4.0,
        "helstrom_bias": helstrom.bias,
        "sigma_margin": SIGMA_MARGIN,
    });
    report.aggregates = json!({
        "success_rate": result.success_rate,
        "std_error": result.std_error,
        "bias": result.bias,
        "optimal_m_bias": optimal_bias,
    });
    report.trials = result
        .trace
        .as_deref()
        .unwrap_or_default()
        .iter()
        .map(serde_json::to_value)
        .collect::<Result<_, _>>()?;
    report.push_verdict(
        "success-rate",
        Verdict::from_bool(result.within_sigmas(SIGMA_MARGIN)),
    );
    report.push_verdict(
        "optimal-bias",
        Verdict::from_bool((optimal_bias - norm2sq / 4.0).abs() <= 1e-10),
    );
    Ok(report)
}
