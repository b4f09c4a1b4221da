//! Operator command line: ingestion, serving, one-shot recommendations,
//! profile management, offline evaluation and synthetic dataset generation.
//!
//! Exit codes: 0 success, 1 validation/usage error, 2 I/O error.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use learnrec_core::engine::{Engine, GoalSpec, Recommendation};
use learnrec_core::evaluator::{self, EvalConfig, MetricKs, SynthConfig};
use learnrec_core::profiles::{AlgorithmId, ProfileRegistry, RecommendationProfile, Signal};
use learnrec_core::store::{Store, StoreConfig};
use learnrec_core::Error as CoreError;

#[derive(Parser)]
#[command(name = "learnrec", version, about = "Learning-resource recommender toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct DataFiles {
    /// Interactions CSV (user_id,resource_id,timestamp_ms,kind).
    #[arg(long)]
    interactions: Option<PathBuf>,
    /// Resources JSON-lines file.
    #[arg(long)]
    resources: Option<PathBuf>,
    /// Tags CSV (user_id,resource_id,tag,timestamp_ms).
    #[arg(long)]
    tags: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Load dataset files, report per-record validation, optionally write a
    /// snapshot directory.
    Ingest {
        #[command(flatten)]
        data: DataFiles,
        /// Snapshot directory to write after ingestion.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print dataset statistics for the given files.
    Stats {
        #[command(flatten)]
        data: DataFiles,
    },
    /// One-shot recommendation over the given files, printed as TSV.
    Recommend {
        #[command(flatten)]
        data: DataFiles,
        /// Use case: uc1..uc7.
        #[arg(long = "use-case")]
        use_case: String,
        #[arg(long)]
        user: Option<String>,
        #[arg(long)]
        resource: Option<String>,
        /// Learning goal for uc7: harder, easier or topic:<term>.
        #[arg(long)]
        goal: Option<String>,
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long)]
        k: Option<u32>,
        /// Profiles JSON applied over the built-in defaults.
        #[arg(long)]
        profiles: Option<PathBuf>,
    },
    /// Manage profiles JSON files.
    Profile {
        #[command(subcommand)]
        action: ProfileAction,
    },
    /// Offline evaluation with a chronological split; prints the report table.
    Eval {
        #[command(flatten)]
        data: DataFiles,
        /// Comma-separated algorithm ids, e.g. uc1,uc2,uc3.
        #[arg(long, default_value = "uc1,uc2,uc3")]
        algorithms: String,
        #[arg(long = "test-fraction", default_value_t = 0.2)]
        test_fraction: f64,
        /// Cutoff applied to recall, mrr, map and ndcg.
        #[arg(long)]
        k: Option<u32>,
        /// Write the report as CSV to this path.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        profiles: Option<PathBuf>,
    },
    /// Generate a synthetic dataset snapshot directory.
    Synth {
        #[arg(long, default_value_t = 2000)]
        users: u32,
        #[arg(long, default_value_t = 300)]
        resources: u32,
        #[arg(long, default_value_t = 10)]
        topics: u32,
        /// Probability that a click stays on the user's topic.
        #[arg(long = "p-click", default_value_t = 0.6)]
        p_click: f64,
        /// Probability that a tag comes from the user's topic vocabulary.
        #[arg(long = "q-tag", default_value_t = 0.95)]
        q_tag: f64,
        /// Pareto shape of per-user activity; smaller is heavier.
        #[arg(long, default_value_t = 1.1)]
        tail: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the REST service.
    Serve {
        /// Bind address, e.g. 127.0.0.1:8080 (env LEARNREC_BIND).
        #[arg(long)]
        bind: Option<String>,
        /// Refresh bound in ms, at most 1000 (env LEARNREC_REFRESH_MS).
        #[arg(long = "refresh-ms")]
        refresh_ms: Option<u64>,
        /// Profiles JSON applied at startup (env LEARNREC_PROFILES).
        #[arg(long)]
        profiles: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum ProfileAction {
    /// Write the built-in default profiles to a JSON file.
    Init {
        #[arg(long)]
        out: PathBuf,
    },
    /// Print one profile or the whole file.
    Show {
        #[arg(long)]
        profiles: PathBuf,
        #[arg(long)]
        id: Option<String>,
    },
    /// Update fields of one profile in the file.
    Set {
        #[arg(long)]
        profiles: PathBuf,
        #[arg(long)]
        id: String,
        #[arg(long)]
        algorithm: Option<String>,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long = "k-default")]
        k_default: Option<u32>,
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long)]
        signal: Option<String>,
        #[arg(long)]
        headroom: Option<u32>,
    },
    /// Validate every profile in the file.
    Validate {
        #[arg(long)]
        profiles: PathBuf,
    },
}

/// Failure carrying the process exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<CoreError> for Failure {
    fn from(err: CoreError) -> Self {
        let code = match err {
            CoreError::Io(_) => 2,
            _ => 1,
        };
        Failure {
            code,
            message: err.to_string(),
        }
    }
}

fn io_failure(path: &Path, err: std::io::Error) -> Failure {
    Failure {
        code: 2,
        message: format!("{}: {err}", path.display()),
    }
}

fn validation(message: impl Into<String>) -> Failure {
    Failure {
        code: 1,
        message: message.into(),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            // clap renders usage text itself.
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

fn read_file(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| io_failure(path, e))
}

/// Loads the given files into a fresh store, printing one ingest line per file.
fn load_store(data: &DataFiles, quiet: bool) -> Result<Store, Failure> {
    if data.interactions.is_none() && data.resources.is_none() && data.tags.is_none() {
        return Err(validation(
            "no input files; pass --interactions, --resources and/or --tags",
        ));
    }
    let store = Store::default();
    let summarize = |name: &str, report: learnrec_core::IngestReport| {
        if !quiet {
            println!(
                "{name}: accepted={} rejected={}",
                report.accepted, report.rejected
            );
        }
        for err in &report.errors {
            eprintln!("{name} line {}: {}", err.line, err.message);
        }
    };
    if let Some(path) = &data.resources {
        summarize("resources", store.ingest_resources_jsonl(&read_file(path)?)?);
    }
    if let Some(path) = &data.interactions {
        summarize(
            "interactions",
            store.ingest_interactions_csv(&read_file(path)?)?,
        );
    }
    if let Some(path) = &data.tags {
        summarize("tags", store.ingest_tags_csv(&read_file(path)?)?);
    }
    Ok(store)
}

fn load_profiles(path: Option<&PathBuf>) -> Result<Arc<ProfileRegistry>, Failure> {
    let registry = ProfileRegistry::with_builtins();
    if let Some(path) = path {
        registry.apply_json(&read_file(path)?)?;
    }
    Ok(Arc::new(registry))
}

fn print_tsv(rec: &Recommendation) {
    println!("rank\tresource_id\tscore");
    for entry in &rec.list.entries {
        println!("{}\t{}\t{:.4}", entry.rank, entry.resource_id, entry.score);
    }
    if rec.cold_start {
        eprintln!("cold_start: no signal for this request; fall back to uc1");
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Ingest { data, out } => {
            let store = load_store(&data, false)?;
            let stats = store.compute_stats();
            println!(
                "store: {} interactions, {} users, {} resources, {} tag assignments",
                stats.n_interactions, stats.n_users, stats.n_resources, stats.n_tag_assignments
            );
            if let Some(dir) = out {
                store.write_snapshot(&dir)?;
                println!("snapshot written to {}", dir.display());
            }
            Ok(())
        }

        Command::Stats { data } => {
            let store = load_store(&data, true)?;
            let stats = store.compute_stats();
            println!("interactions                  {}", stats.n_interactions);
            println!("users                         {}", stats.n_users);
            println!("resources                     {}", stats.n_resources);
            println!("tag_assignments               {}", stats.n_tag_assignments);
            println!(
                "avg_interactions_per_user     {:.2}",
                stats.avg_interactions_per_user
            );
            println!(
                "avg_interactions_per_resource {:.2}",
                stats.avg_interactions_per_resource
            );
            println!(
                "avg_tags_per_resource         {:.2}",
                stats.avg_tags_per_resource
            );
            Ok(())
        }

        Command::Recommend {
            data,
            use_case,
            user,
            resource,
            goal,
            lambda,
            k,
            profiles,
        } => {
            let algorithm: AlgorithmId = use_case.parse().map_err(Failure::from)?;
            let store = Arc::new(load_store(&data, true)?);
            let engine = Engine::new(store, load_profiles(profiles.as_ref())?);

            let need_user = || {
                user.clone()
                    .ok_or_else(|| validation(format!("--user is required for {algorithm}")))
            };
            let need_resource = || {
                resource
                    .clone()
                    .ok_or_else(|| validation(format!("--resource is required for {algorithm}")))
            };
            let rec = match algorithm {
                AlgorithmId::Popular => engine.recommend_popular(k)?,
                AlgorithmId::CfInteractions => {
                    engine.recommend_cf(&need_user()?, k, Some(Signal::Interactions))?
                }
                AlgorithmId::CfTags => engine.recommend_cf(&need_user()?, k, Some(Signal::Tags))?,
                AlgorithmId::Cbf => engine.recommend_cbf(&need_user()?, k)?,
                AlgorithmId::SimilarResources => engine.similar_resources(&need_resource()?, k)?,
                AlgorithmId::Contextual => {
                    engine.recommend_contextual(&need_user()?, &need_resource()?, k)?
                }
                AlgorithmId::Goal => {
                    let goal: GoalSpec = goal
                        .as_deref()
                        .ok_or_else(|| validation("--goal is required for uc7"))?
                        .parse()?;
                    engine.recommend_goal(&need_user()?, &goal, k, lambda)?
                }
            };
            print_tsv(&rec);
            Ok(())
        }

        Command::Profile { action } => run_profile(action),

        Command::Eval {
            data,
            algorithms,
            test_fraction,
            k,
            out,
            profiles,
        } => {
            let algorithms = algorithms
                .split(',')
                .filter(|s| !s.trim().is_empty())
                .map(|s| s.parse::<AlgorithmId>())
                .collect::<Result<Vec<_>, _>>()?;
            let interactions = match &data.interactions {
                Some(path) => {
                    let (rows, report) =
                        learnrec_core::store::ingest::parse_interactions_csv(&read_file(path)?)?;
                    for err in &report.errors {
                        eprintln!("interactions line {}: {}", err.line, err.message);
                    }
                    rows
                }
                None => return Err(validation("--interactions is required for eval")),
            };
            let resources = match &data.resources {
                Some(path) => {
                    learnrec_core::store::ingest::parse_resources_jsonl(&read_file(path)?)?.0
                }
                None => Vec::new(),
            };
            let tags = match &data.tags {
                Some(path) => learnrec_core::store::ingest::parse_tags_csv(&read_file(path)?)?.0,
                None => Vec::new(),
            };

            let mut ks = MetricKs::default();
            if let Some(k) = k {
                ks.recall = k;
                ks.mrr = k;
                ks.map = k;
                ks.ndcg = k;
            }
            let report = evaluator::evaluate(
                &evaluator::dataset_from_parts(interactions, resources, tags),
                &EvalConfig {
                    algorithms,
                    test_fraction,
                    ks,
                },
                &load_profiles(profiles.as_ref())?,
            )?;
            print!("{}", report.to_table());
            if let Some(path) = out {
                std::fs::write(&path, report.to_csv()).map_err(|e| io_failure(&path, e))?;
                println!("report written to {}", path.display());
            }
            Ok(())
        }

        Command::Synth {
            users,
            resources,
            topics,
            p_click,
            q_tag,
            tail,
            seed,
            out,
        } => {
            let config = SynthConfig {
                n_users: users,
                n_resources: resources,
                n_topics: topics,
                p_topic_click: p_click,
                q_topic_tag: q_tag,
                activity_tail: tail,
                seed,
            };
            let manifest = evaluator::generate_to_dir(&config, &out)?;
            println!(
                "wrote {}: {} interactions, {} users, {} resources, {} tag assignments",
                out.display(),
                manifest.n_interactions,
                manifest.n_users,
                manifest.n_resources,
                manifest.n_tag_assignments
            );
            Ok(())
        }

        Command::Serve {
            bind,
            refresh_ms,
            profiles,
        } => {
            let mut config = learnrec_service::ServiceConfig::from_env()?;
            if let Some(bind) = bind {
                config.bind = bind
                    .parse()
                    .map_err(|_| validation(format!("invalid bind address `{bind}`")))?;
            }
            if let Some(ms) = refresh_ms {
                config.refresh_bound_ms = ms;
            }
            if let Some(path) = profiles {
                config.profiles_path = Some(path);
            }
            // Surface config errors before entering the runtime.
            StoreConfig::new(config.refresh_bound_ms)?;
            let runtime = tokio::runtime::Runtime::new().map_err(CoreError::Io)?;
            runtime.block_on(learnrec_service::serve(config))?;
            Ok(())
        }
    }
}

fn read_profile_file(path: &Path) -> Result<Vec<RecommendationProfile>, Failure> {
    let json = read_file(path)?;
    serde_json::from_str(&json)
        .map_err(|e| validation(format!("{}: invalid profiles JSON: {e}", path.display())))
}

fn run_profile(action: ProfileAction) -> Result<(), Failure> {
    match action {
        ProfileAction::Init { out } => {
            let registry = ProfileRegistry::with_builtins();
            std::fs::write(&out, registry.to_json()).map_err(|e| io_failure(&out, e))?;
            println!(
                "wrote {} profiles to {}",
                registry.list().len(),
                out.display()
            );
            Ok(())
        }
        ProfileAction::Show { profiles, id } => {
            let entries = read_profile_file(&profiles)?;
            match id {
                None => println!("{}", serde_json::to_string_pretty(&entries).unwrap()),
                Some(id) => {
                    let profile = entries
                        .iter()
                        .find(|p| p.profile_id == id)
                        .ok_or_else(|| validation(format!("profile `{id}` not in file")))?;
                    println!("{}", serde_json::to_string_pretty(profile).unwrap());
                }
            }
            Ok(())
        }
        ProfileAction::Set {
            profiles,
            id,
            algorithm,
            n,
            k_default,
            lambda,
            signal,
            headroom,
        } => {
            let mut entries: BTreeMap<String, RecommendationProfile> =
                read_profile_file(&profiles)?
                    .into_iter()
                    .map(|p| (p.profile_id.clone(), p))
                    .collect();
            let entry = entries
                .get_mut(&id)
                .ok_or_else(|| validation(format!("profile `{id}` not in file")))?;
            if let Some(a) = algorithm {
                entry.algorithm_id = a.parse()?;
            }
            if let Some(n) = n {
                entry.n = n;
            }
            if let Some(k) = k_default {
                entry.k_default = k;
            }
            if let Some(l) = lambda {
                entry.lambda = l;
            }
            if let Some(s) = signal {
                entry.signal = s.parse()?;
            }
            if let Some(h) = headroom {
                entry.headroom = h;
            }
            entry.validate()?;
            let updated: Vec<&RecommendationProfile> = entries.values().collect();
            let json = serde_json::to_string_pretty(&updated).unwrap();
            std::fs::write(&profiles, json).map_err(|e| io_failure(&profiles, e))?;
            println!("updated `{id}` in {}", profiles.display());
            Ok(())
        }
        ProfileAction::Validate { profiles } => {
            let entries = read_profile_file(&profiles)?;
            for profile in &entries {
                profile.validate()?;
            }
            println!("{} profiles ok", entries.len());
            Ok(())
        }
    }
}
