//! Command-line surface: argument types, dispatch, and the JSON/CSV
//! payloads.
//!
//! Exit codes: 0 for a successful query (including negative answers
//! like an unsatisfiable search), 1 when a checked claim fails (an
//! invalid scheme, a bound exceeded in simulation, a mismatch in the
//! headline check), 2 for usage and I/O errors. Every JSON payload
//! carries `schema_version`, and identical inputs produce byte-stable
//! output.

use std::io::Read;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::bounds::{self, BoundKind, BoundQuery};
use crate::compress::{self, SchemeKind, SolveStatus};
use crate::corespace::{self, ConceptSpace};
use crate::pacsim::{self, Distribution};
use crate::vcdim::{self, MaximumMode};
use crate::{Error, Result, SCHEMA_VERSION};

#[derive(Parser)]
#[command(
    name = "vclab",
    version,
    about = "Finite concept spaces: VC dimension, sample compression schemes, and PAC bounds",
    after_help = "Hard caps: vc enumeration 24 points; maximum/maximal and scheme \
verification 16 points; scheme search 12 points by default (--cap); embedding \
search 16 source and 36 target cells. File arguments accept '-' for stdin."
)]
pub struct Cli {
    /// Write the payload to a file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Cap the worker thread pool.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Definition,
    Cardinality,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WhichBound {
    #[value(alias = "floyd-warmuth")]
    Fw,
    #[value(alias = "shawe-taylor")]
    St,
    Blumer,
    Copy,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SimMode {
    Pac,
    Event321,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ChainVariant {
    /// Singleton keys hold the segment they top; empty key empty.
    Initial,
    /// Singleton keys hold the open segment below; empty key full.
    Prime,
}

#[derive(Subcommand)]
pub enum Command {
    /// VC dimension, witness, and shatter coefficients.
    Vc {
        #[arg(long, default_value = "-")]
        space: String,
    },
    /// Is the named point set shattered?
    Shatter {
        #[arg(long, default_value = "-")]
        space: String,
        #[arg(long, value_delimiter = ',', required = true)]
        points: Vec<String>,
    },
    /// d-maximum test, by definition or by cardinality.
    CheckMaximum {
        #[arg(long, default_value = "-")]
        space: String,
        #[arg(long)]
        d: usize,
        #[arg(long, value_enum, default_value = "definition")]
        mode: ModeArg,
    },
    /// d-maximal test.
    CheckMaximal {
        #[arg(long, default_value = "-")]
        space: String,
        #[arg(long)]
        d: usize,
    },
    /// Dual space (concepts become points), emitted as a space file.
    Dual {
        #[arg(long, default_value = "-")]
        space: String,
        /// Collapse duplicate rows/columns first.
        #[arg(long)]
        reduce: bool,
    },
    /// Search for an embedding between two spaces' relation forms.
    FindEmbedding {
        #[arg(long)]
        src: String,
        #[arg(long)]
        dst: String,
        #[arg(long)]
        generalized: bool,
    },
    /// Check a scheme against a space; exits 1 with the first
    /// counterexample if coverage fails.
    VerifyScheme {
        #[arg(long, default_value = "-")]
        space: String,
        #[arg(long)]
        scheme: String,
    },
    /// Exhaustive search for a scheme of the given size.
    FindScheme {
        #[arg(long, default_value = "-")]
        space: String,
        #[arg(long)]
        size: usize,
        /// Copy counts per key size (size+1 values); all ones if omitted.
        #[arg(long, value_delimiter = ',')]
        copies: Option<Vec<u64>>,
        #[arg(long)]
        labelled: bool,
        /// Domain cap for the search.
        #[arg(long, default_value_t = compress::SOLVE_DOMAIN_CAP)]
        cap: usize,
    },
    /// Convert a verified unlabelled scheme to a labelled one.
    ToLabelled {
        #[arg(long, default_value = "-")]
        space: String,
        #[arg(long)]
        scheme: String,
    },
    /// Restrict a verified scheme to a subspace.
    RestrictScheme {
        #[arg(long, default_value = "-")]
        space: String,
        #[arg(long)]
        scheme: String,
        #[arg(long, value_delimiter = ',', required = true)]
        subset: Vec<String>,
    },
    /// Trade scheme size against copies, or just test the counting
    /// condition with --feasibility-only.
    Widen {
        #[arg(long)]
        space: Option<String>,
        #[arg(long)]
        scheme: Option<String>,
        #[arg(long)]
        k: u64,
        #[arg(long)]
        n: u64,
        /// Domain size (feasibility-only mode).
        #[arg(long)]
        m: Option<u64>,
        /// Source scheme size (feasibility-only mode).
        #[arg(long)]
        d: Option<u64>,
        #[arg(long)]
        feasibility_only: bool,
    },
    /// Combine per-part schemes covering the class into a copy scheme.
    /// Each part file holds {"space": ..., "scheme": ...}.
    CoverScheme {
        #[arg(long, default_value = "-")]
        space: String,
        #[arg(required = true)]
        parts: Vec<PathBuf>,
    },
    /// Evaluate a sample-complexity bound.
    Bounds {
        #[arg(long, value_enum)]
        which: WhichBound,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        d: u64,
        #[arg(long)]
        n: Option<u64>,
        #[arg(long, conflicts_with = "optimize")]
        beta: Option<f64>,
        /// Minimize over beta instead of fixing it.
        #[arg(long)]
        optimize: bool,
    },
    /// Emit the bound-comparison table as CSV (d,beta_fw,f,beta_st,g).
    Fig31 {
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        dmax: u64,
    },
    /// The 884-point worked example: exact counting inequality, the
    /// optimized copy bound (879), and the plain bound exceeding 884.
    Check884,
    /// Monte-Carlo experiments against the tail bounds.
    Simulate {
        #[arg(value_enum)]
        mode: SimMode,
        #[arg(long)]
        space: String,
        #[arg(long)]
        scheme: String,
        /// Index of the target concept in the space file.
        #[arg(long)]
        target: usize,
        /// "uniform" or a JSON file with {"weights": [...]}.
        #[arg(long, default_value = "uniform")]
        dist: String,
        #[arg(long)]
        m: u64,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        trials: u64,
        /// Defaults to VCLAB_SEED or 0.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Emit fixture spaces and schemes.
    #[command(subcommand)]
    Gen(GenCommand),
}

#[derive(Subcommand)]
pub enum GenCommand {
    /// Power set on n points.
    PowerSet {
        #[arg(long)]
        n: usize,
    },
    /// Initial segments plus the empty set on a chain of n points.
    InitialSegments {
        #[arg(long)]
        n: usize,
        /// Emit the size-1 scheme instead of the space.
        #[arg(long)]
        scheme: bool,
        #[arg(long, value_enum, default_value = "initial")]
        variant: ChainVariant,
    },
    /// All subsets of size at most d on n points.
    SizeAtMostD {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
    },
    /// Embedded worked examples: 1.2.4, 1.2.5, 2.1.4, 2.4.5, 2.4.6.
    PaperExample {
        id: String,
        /// Emit the example's scheme instead of its space.
        #[arg(long)]
        scheme: bool,
        /// Chain length for 2.1.4.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, value_enum, default_value = "initial")]
        variant: ChainVariant,
    },
}

/// Rendered payload plus the process exit code.
pub struct CommandOutcome {
    pub exit: i32,
    pub body: String,
}

fn ok(body: String) -> CommandOutcome {
    CommandOutcome { exit: 0, body }
}

fn violation(body: String) -> CommandOutcome {
    CommandOutcome { exit: 1, body }
}

fn read_input(path: &str) -> Result<Vec<u8>> {
    if path == "-" {
        let mut buf = Vec::new();
        std::io::stdin().read_to_end(&mut buf)?;
        Ok(buf)
    } else {
        Ok(std::fs::read(path)?)
    }
}

fn load_space_arg(path: &str) -> Result<ConceptSpace> {
    corespace::load_space(&read_input(path)?)
}

fn load_scheme_arg(path: &str, space: &ConceptSpace) -> Result<compress::CompressionScheme> {
    compress::load_scheme(&read_input(path)?, space)
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("payload serialization cannot fail")
}

fn load_distribution(arg: &str, n: usize) -> Result<Distribution> {
    if arg == "uniform" {
        return Ok(Distribution::uniform(n));
    }
    #[derive(serde::Deserialize)]
    struct DistFile {
        weights: Vec<f64>,
    }
    let f: DistFile = serde_json::from_slice(&read_input(arg)?)?;
    Distribution::new(f.weights)
}

fn scheme_json(scheme: &compress::CompressionScheme, space: &ConceptSpace) -> serde_json::Value {
    serde_json::from_str(&compress::save_scheme(scheme, space)).expect("scheme json")
}

fn space_json(space: &ConceptSpace) -> serde_json::Value {
    serde_json::from_str(&corespace::save_space(space)).expect("space json")
}

fn default_seed() -> u64 {
    std::env::var("VCLAB_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(0)
}

pub fn dispatch(cli: &Cli) -> Result<CommandOutcome> {
    match &cli.command {
        Command::Vc { space } => {
            let space = load_space_arg(space)?;
            let report = vcdim::vc_dimension(&space)?;
            Ok(ok(to_json(&json!({
                "schema_version": SCHEMA_VERSION,
                "command": "vc",
                "vc": report.vc,
                "witness": report.witness,
                "shatter_coeffs": report.shatter_coeffs,
            }))))
        }
        Command::Shatter { space, points } => {
            let space = load_space_arg(space)?;
            let shattered = vcdim::is_shattered(&space, points)?;
            Ok(ok(to_json(&json!({
                "schema_version": SCHEMA_VERSION,
                "command": "shatter",
                "points": points,
                "shattered": shattered,
            }))))
        }
        Command::CheckMaximum { space, d, mode } => {
            let space = load_space_arg(space)?;
            let mode_val = match mode {
                ModeArg::Definition => MaximumMode::Definition,
                ModeArg::Cardinality => MaximumMode::Cardinality,
            };
            let maximum = vcdim::is_maximum(&space, *d, mode_val)?;
            let distinct = space.distinct_concept_masks()?.len() as u64;
            let bound = bounds::binom_leq(space.point_count() as u64, *d as u64);
            Ok(ok(to_json(&json!({
                "schema_version": SCHEMA_VERSION,
                "command": "check-maximum",
                "d": d,
                "mode": match mode { ModeArg::Definition => "definition", ModeArg::Cardinality => "cardinality" },
                "maximum": maximum,
                "concepts": distinct,
                "bound": bound.to_string(),
            }))))
        }
        Command::CheckMaximal { space, d } => {
            let space = load_space_arg(space)?;
            let maximal = vcdim::is_maximal(&space, *d)?;
            Ok(ok(to_json(&json!({
                "schema_version": SCHEMA_VERSION,
                "command": "check-maximal",
                "d": d,
                "maximal": maximal,
            }))))
        }
        Command::Dual { space, reduce } => {
            let space = load_space_arg(space)?;
            let dual = space.to_relation(*reduce).dual().to_concept_space(false)?;
            Ok(ok(corespace::save_space(&dual)))
        }
        Command::FindEmbedding {
            src,
            dst,
            generalized,
        } => {
            let src_rel = load_space_arg(src)?.to_relation(false);
            let dst_rel = load_space_arg(dst)?.to_relation(false);
            let found = corespace::find_embedding(&src_rel, &dst_rel, *generalized)?;
            let payload = match &found {
                None => json!({
                    "schema_version": SCHEMA_VERSION,
                    "command": "find-embedding",
                    "found": false,
                }),
                Some(m) => json!({
                    "schema_version": SCHEMA_VERSION,
                    "command": "find-embedding",
                    "found": true,
                    "images": m.images(),
                    "flip": m.flips(),
                }),
            };
            Ok(ok(to_json(&payload)))
        }
        Command::VerifyScheme { space, scheme } => {
            let space = load_space_arg(space)?;
            let scheme = load_scheme_arg(scheme, &space)?;
            match compress::verify_scheme(&space, &scheme)? {
                compress::VerifyOutcome::Valid => Ok(ok(to_json(&json!({
                    "schema_version": SCHEMA_VERSION,
                    "command": "verify-scheme",
                    "valid": true,
                })))),
                compress::VerifyOutcome::Invalid(ce) => Ok(violation(to_json(&json!({
                    "schema_version": SCHEMA_VERSION,
                    "command": "verify-scheme",
                    "valid": false,
                    "counterexample": ce,
                })))),
            }
        }
        Command::FindScheme {
            space,
            size,
            copies,
            labelled,
            cap,
        } => {
            let space = load_space_arg(space)?;
            let copies = copies.clone().unwrap_or_else(|| vec![1; size + 1]);
            let kind = if *labelled {
                SchemeKind::Labelled
            } else {
                SchemeKind::Unlabelled
            };
            let result = compress::solve_scheme(&space, *size, &copies, kind, *cap)?;
            let payload = json!({
                "schema_version": SCHEMA_VERSION,
                "command": "find-scheme",
                "status": result.status,
                "stats": result.stats,
                "scheme": result.scheme.as_ref().map(|s| scheme_json(s, &space)),
            });
            let exit = if result.status == SolveStatus::CapExceeded {
                2
            } else {
                0
            };
            Ok(CommandOutcome {
                exit,
                body: to_json(&payload),
            })
        }
        Command::ToLabelled { space, scheme } => {
            let space = load_space_arg(space)?;
            let scheme = load_scheme_arg(scheme, &space)?;
            let labelled = compress::to_labelled(&space, &scheme)?;
            Ok(ok(compress::save_scheme(&labelled, &space)))
        }
        Command::RestrictScheme {
            space,
            scheme,
            subset,
        } => {
            let space = load_space_arg(space)?;
            let scheme = load_scheme_arg(scheme, &space)?;
            let restricted = compress::restrict_scheme(&space, &scheme, subset)?;
            let subspace = space.restrict(subset)?;
            Ok(ok(to_json(&json!({
                "schema_version": SCHEMA_VERSION,
                "command": "restrict-scheme",
                "space": space_json(&subspace),
                "scheme": scheme_json(&restricted, &subspace),
            }))))
        }
        Command::Widen {
            space,
            scheme,
            k,
            n,
            m,
            d,
            feasibility_only,
        } => {
            if *feasibility_only {
                let m = m.ok_or(Error::MissingParam("m"))?;
                let d = d.ok_or(Error::MissingParam("d"))?;
                let feasible = compress::widen_feasible(m, d, *k, *n);
                let lhs = num_bigint::BigUint::from(*n) * bounds::binom_leq(m, *k);
                let rhs = bounds::binom_leq(m, d);
                return Ok(ok(to_json(&json!({
                    "schema_version": SCHEMA_VERSION,
                    "command": "widen",
                    "feasibility_only": true,
                    "m": m, "d": d, "k": k, "n": n,
                    "feasible": feasible,
                    "copies_times_keys": lhs.to_string(),
                    "required_keys": rhs.to_string(),
                }))));
            }
            let space = load_space_arg(space.as_deref().ok_or(Error::MissingParam("space"))?)?;
            let scheme =
                load_scheme_arg(scheme.as_deref().ok_or(Error::MissingParam("scheme"))?, &space)?;
            let widened = compress::widen_to_copies(&space, &scheme, *k as usize, *n)?;
            Ok(ok(compress::save_scheme(&widened, &space)))
        }
        Command::CoverScheme { space, parts } => {
            let space = load_space_arg(space)?;
            #[derive(serde::Deserialize)]
            struct PartFile {
                space: serde_json::Value,
                scheme: serde_json::Value,
            }
            let mut loaded = Vec::new();
            for path in parts {
                let raw = std::fs::read(path)?;
                let part: PartFile = serde_json::from_slice(&raw)?;
                let part_space = corespace::load_space(part.space.to_string().as_bytes())?;
                let part_scheme =
                    compress::load_scheme(part.scheme.to_string().as_bytes(), &part_space)?;
                loaded.push((part_space, part_scheme));
            }
            let combined = compress::cover_to_copy_scheme(&space, &loaded)?;
            Ok(ok(compress::save_scheme(&combined, &space)))
        }
        Command::Bounds {
            which,
            eps,
            delta,
            d,
            n,
            beta,
            optimize,
        } => {
            let kind = match which {
                WhichBound::Fw => BoundKind::FloydWarmuth,
                WhichBound::St => BoundKind::ShaweTaylor,
                WhichBound::Blumer => BoundKind::Blumer,
                WhichBound::Copy => BoundKind::Copy,
            };
            let name = match which {
                WhichBound::Fw => "fw",
                WhichBound::St => "st",
                WhichBound::Blumer => "blumer",
                WhichBound::Copy => "copy",
            };
            let mut query = BoundQuery {
                eps: *eps,
                delta: *delta,
                d: *d,
                n: *n,
                beta: *beta,
            };
            let (beta_out, value) = if *optimize {
                let (b, v) = bounds::optimize_beta(kind, &query)?;
                (Some(b), v)
            } else {
                if kind != BoundKind::Blumer && query.beta.is_none() {
                    return Err(Error::MissingParam("beta"));
                }
                let v = bounds::bound_value(kind, &query)?;
                (query.beta.take(), v)
            };
            Ok(ok(to_json(&json!({
                "schema_version": SCHEMA_VERSION,
                "command": "bounds",
                "which": name,
                "eps": eps, "delta": delta, "d": d, "n": n,
                "beta": beta_out,
                "value": value,
                "ceil": value.ceil() as u64,
            }))))
        }
        Command::Fig31 { eps, delta, dmax } => {
            let rows = bounds::figure31_data(*eps, *delta, *dmax)?;
            Ok(ok(bounds::fig31_csv(&rows)))
        }
        Command::Check884 => {
            let lhs = bounds::binom_leq(884, 7);
            let rhs = num_bigint::BigUint::from(18418u64) * bounds::binom_leq(884, 5);
            let inequality = lhs <= rhs;
            let copy_query = BoundQuery {
                eps: 0.05,
                delta: 0.05,
                d: 5,
                n: Some(18418),
                beta: None,
            };
            let (copy_beta, copy_value) = bounds::optimize_beta(BoundKind::Copy, &copy_query)?;
            let copy_bound = copy_value.ceil() as u64;
            let fw_query = BoundQuery {
                eps: 0.05,
                delta: 0.05,
                d: 7,
                n: None,
                beta: None,
            };
            let (fw_beta, fw_min) = bounds::optimize_beta(BoundKind::FloydWarmuth, &fw_query)?;
            let copy_ok = (878..=880).contains(&copy_bound);
            let fw_ok = fw_min > 884.0;
            let all_ok = inequality && copy_ok && fw_ok;
            let payload = json!({
                "schema_version": SCHEMA_VERSION,
                "command": "check-884",
                "inequality": inequality,
                "required_keys": lhs.to_string(),
                "copies_times_keys": rhs.to_string(),
                "copy_bound": copy_bound,
                "copy_beta": copy_beta,
                "copy_value": copy_value,
                "fw_min": fw_min,
                "fw_beta": fw_beta,
                "fw_min_exceeds_884": fw_ok,
            });
            if all_ok {
                Ok(ok(to_json(&payload)))
            } else {
                Ok(violation(to_json(&payload)))
            }
        }
        Command::Simulate {
            mode,
            space,
            scheme,
            target,
            dist,
            m,
            eps,
            trials,
            seed,
        } => {
            let space = load_space_arg(space)?;
            let scheme = load_scheme_arg(scheme, &space)?;
            let dist = load_distribution(dist, space.point_count())?;
            let seed = seed.unwrap_or_else(default_seed);
            let report = match mode {
                SimMode::Pac => pacsim::pac_experiment(
                    &space, &scheme, *target, &dist, *m, *eps, *trials, seed,
                )?,
                SimMode::Event321 => pacsim::event321_experiment(
                    &space, &scheme, *target, &dist, *m, *eps, *trials, seed,
                )?,
            };
            let bound = report.theoretical_bound.min(1.0);
            let slack = 3.0 * (bound * (1.0 - bound) / report.trials as f64).sqrt() + 1e-6;
            let within = report.empirical_rate <= report.theoretical_bound + slack;
            let payload = json!({
                "schema_version": SCHEMA_VERSION,
                "command": "simulate",
                "mode": match mode { SimMode::Pac => "pac", SimMode::Event321 => "event321" },
                "report": report,
                "slack": slack,
                "status": if within { "ok" } else { "violation" },
            });
            if within {
                Ok(ok(to_json(&payload)))
            } else {
                Ok(violation(to_json(&payload)))
            }
        }
        Command::Gen(gen) => dispatch_gen(gen),
    }
}

fn dispatch_gen(gen: &GenCommand) -> Result<CommandOutcome> {
    use crate::fixtures;
    match gen {
        GenCommand::PowerSet { n } => {
            if *n == 0 || *n > 16 {
                return Err(Error::InvalidParam("power set needs 1..=16 points".into()));
            }
            Ok(ok(corespace::save_space(&fixtures::power_set_space(*n))))
        }
        GenCommand::InitialSegments { n, scheme, variant } => {
            if *n == 0 || *n > 64 {
                return Err(Error::InvalidParam("chain needs 1..=64 points".into()));
            }
            if *scheme {
                let s = match variant {
                    ChainVariant::Initial => fixtures::chain_scheme(*n),
                    ChainVariant::Prime => fixtures::chain_scheme_prime(*n),
                };
                Ok(ok(compress::save_scheme(&s, &fixtures::chain_space(*n))))
            } else {
                Ok(ok(corespace::save_space(&fixtures::chain_space(*n))))
            }
        }
        GenCommand::SizeAtMostD { n, d } => {
            if *n == 0 || *n > 24 {
                return Err(Error::InvalidParam("family needs 1..=24 points".into()));
            }
            Ok(ok(corespace::save_space(&fixtures::size_at_most_d_space(
                *n, *d,
            ))))
        }
        GenCommand::PaperExample {
            id,
            scheme,
            n,
            variant,
        } => {
            let outcome = match (id.as_str(), *scheme) {
                ("1.2.4", false) => corespace::save_space(&fixtures::example_124_space()),
                ("1.2.5", false) => corespace::save_space(&fixtures::example_125_space()),
                ("2.1.4", false) => corespace::save_space(&fixtures::chain_space(n.unwrap_or(6))),
                ("2.1.4", true) => {
                    let len = n.unwrap_or(6);
                    let s = match variant {
                        ChainVariant::Initial => fixtures::chain_scheme(len),
                        ChainVariant::Prime => fixtures::chain_scheme_prime(len),
                    };
                    compress::save_scheme(&s, &fixtures::chain_space(len))
                }
                ("2.4.5", false) => corespace::save_space(&fixtures::example_245_space()),
                ("2.4.5", true) => compress::save_scheme(
                    &fixtures::example_245_scheme(),
                    &fixtures::example_245_space(),
                ),
                ("2.4.6", false) => corespace::save_space(&fixtures::example_246_space()),
                ("2.4.6", true) => compress::save_scheme(
                    &fixtures::example_246_scheme(),
                    &fixtures::example_246_space(),
                ),
                (other, true) => {
                    return Err(Error::InvalidParam(format!(
                        "no scheme is attached to example {other}"
                    )))
                }
                (other, false) => {
                    return Err(Error::InvalidParam(format!("unknown example {other}")))
                }
            };
            Ok(ok(outcome))
        }
    }
}
