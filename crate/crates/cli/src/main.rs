use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Value};
use shelfplan_core::scene::SceneDocument;
use shelfplan_core::{
    build_dependency_dictionary, build_graph, default_palette, divide_tasks, export_dot,
    export_scene, full_clear_sequence, generate_scene, parse_scene, safe_sequence,
    support_candidates, validate_scene, DepthOrder, Error, ExtractionPlan, PlanTarget, PointCloud,
    PointingConfig, Ranking, Scene, TaskPolicy,
};
use shelfplan_service::{read_events, replay, serve, ServiceError, SessionStore};

mod ops;

#[derive(Parser)]
#[command(
    name = "shelfplan",
    version,
    about = "Collapse-safe box extraction planning"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a scene document and report every violation.
    Validate(SceneArg),
    /// Generate a random stable scene.
    Generate {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        boxes: usize,
        /// Also write the scene document here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Dependency dictionary and relations graph.
    Brg {
        #[command(flatten)]
        scene: SceneArg,
        /// Print Graphviz DOT instead of JSON.
        #[arg(long)]
        dot: bool,
    },
    /// Collapse-safe extraction sequence for a box, or ALL.
    Plan(PlanArgs),
    /// Robot/human split of a plan.
    Divide {
        #[command(flatten)]
        plan: PlanArgs,
        /// Split a previously saved plan instead of planning afresh.
        #[arg(long, conflicts_with = "target")]
        plan_file: Option<PathBuf>,
    },
    /// Boxes worth holding in place while the target is extracted.
    Support {
        #[command(flatten)]
        scene: SceneArg,
        #[arg(long)]
        target: String,
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum, default_value_t = RankingArg::Literal)]
        ranking: RankingArg,
    },
    /// Resolve a pointing gesture to a box.
    Point {
        #[command(flatten)]
        scene: SceneArg,
        #[arg(long)]
        cloud: PathBuf,
        #[command(flatten)]
        pointing: PointingArgs,
    },
    /// Run a scripted session (plan, step, remove, support, point) locally.
    Session {
        #[command(flatten)]
        scene: SceneArg,
        /// JSON array of operations.
        #[arg(long)]
        ops: PathBuf,
        /// Write the session's event log here.
        #[arg(long)]
        events_out: Option<PathBuf>,
    },
    /// Re-run a session event log and check every recorded outcome.
    Replay {
        #[arg(long)]
        events: PathBuf,
    },
    /// Serve the HTTP API.
    Serve {
        #[arg(long, default_value_t = 7711)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        /// Persist session event logs in this directory.
        #[arg(long)]
        events_dir: Option<PathBuf>,
    },
}

#[derive(Args)]
struct SceneArg {
    #[arg(long)]
    scene: PathBuf,
}

#[derive(Args)]
struct PlanArgs {
    #[command(flatten)]
    scene: SceneArg,
    /// Box id, or ALL for a full clear.
    #[arg(long, default_value = "ALL")]
    target: String,
    #[arg(long, value_enum, default_value_t = PolicyArg::Literal)]
    policy: PolicyArg,
}

#[derive(Args)]
struct PointingArgs {
    #[arg(long, default_value_t = 0.03)]
    eps: f64,
    #[arg(long, default_value_t = 8)]
    min_pts: usize,
    #[arg(long, default_value_t = 30)]
    min_cluster_size: usize,
    #[arg(long, default_value_t = 0.02)]
    fraction: f64,
    #[arg(long, value_enum, default_value_t = DepthArg::Farthest)]
    depth_order: DepthArg,
}

impl PointingArgs {
    fn config(&self) -> PointingConfig {
        let mut c = PointingConfig::default();
        c.cluster.eps = self.eps;
        c.cluster.min_pts = self.min_pts;
        c.cluster.min_cluster_size = self.min_cluster_size;
        c.fraction = self.fraction;
        c.depth_order = match self.depth_order {
            DepthArg::Farthest => DepthOrder::Farthest,
            DepthArg::Nearest => DepthOrder::Nearest,
        };
        c
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum PolicyArg {
    Literal,
    Independence,
}

impl From<PolicyArg> for TaskPolicy {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::Literal => TaskPolicy::Literal,
            PolicyArg::Independence => TaskPolicy::Independence,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum RankingArg {
    Literal,
    #[value(name = "at_risk", alias = "at-risk")]
    AtRisk,
}

impl From<RankingArg> for Ranking {
    fn from(r: RankingArg) -> Self {
        match r {
            RankingArg::Literal => Ranking::Literal,
            RankingArg::AtRisk => Ranking::AtRisk,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum DepthArg {
    Farthest,
    Nearest,
}

/// What a subcommand prints on success.
enum Output {
    Json(Value),
    Text(String),
}

/// A failed command: either an engine error, carried in the usual JSON
/// envelope, or a local problem such as an unreadable file.
#[derive(Debug)]
enum Failure {
    Service(ServiceError),
    Io(String),
    Inconsistent(Value),
}

impl From<ServiceError> for Failure {
    fn from(e: ServiceError) -> Self {
        Failure::Service(e)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Service(e.into())
    }
}

type CmdResult = Result<Output, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Serve {
            port,
            host,
            events_dir,
        } => return run_server(&host, port, events_dir),
        cmd => run(cmd),
    };
    let mut stdout = std::io::stdout().lock();
    match result {
        Ok(Output::Json(v)) => {
            let _ = writeln!(
                stdout,
                "{}",
                serde_json::to_string_pretty(&v).expect("json output")
            );
            ExitCode::SUCCESS
        }
        Ok(Output::Text(t)) => {
            let _ = write!(stdout, "{t}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            let (body, code) = match &f {
                Failure::Service(e) => {
                    let mut body = json!({ "error": e.code(), "detail": e.to_string() });
                    if let ServiceError::Core(Error::Validation(v)) = e {
                        body["violations"] = json!(v);
                    }
                    (body, if e.is_input_error() { 2 } else { 1 })
                }
                Failure::Io(detail) => (json!({ "error": "IoError", "detail": detail }), 1),
                Failure::Inconsistent(report) => (report.clone(), 1),
            };
            let _ = writeln!(
                stdout,
                "{}",
                serde_json::to_string_pretty(&body).expect("json output")
            );
            if let Some(detail) = body.get("detail").and_then(Value::as_str) {
                eprintln!("shelfplan: {detail}");
            }
            ExitCode::from(code)
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn load_scene(arg: &SceneArg) -> Result<Scene, Failure> {
    Ok(parse_scene(&read(&arg.scene)?)?)
}

fn plan_for(scene: &Scene, target: &str) -> Result<ExtractionPlan, Failure> {
    let g = build_graph(&build_dependency_dictionary(scene))?;
    Ok(match PlanTarget::parse(target) {
        PlanTarget::All => full_clear_sequence(scene, &g)?,
        PlanTarget::Box(id) => safe_sequence(scene, &g, id.as_str())?,
    })
}

fn run(cmd: Command) -> CmdResult {
    match cmd {
        Command::Validate(arg) => {
            let text = read(&arg.scene)?;
            let doc: SceneDocument = serde_json::from_str(&text)
                .map_err(|e| Failure::from(Error::Schema(e.to_string())))?;
            let report = validate_scene(&doc.into_scene());
            if report.is_valid() {
                Ok(Output::Json(json!({ "valid": true, "violations": [] })))
            } else {
                Err(Error::Validation(report.violations).into())
            }
        }
        Command::Generate { seed, boxes, out } => {
            let scene = generate_scene(seed, boxes, &default_palette())?;
            let text = export_scene(&scene);
            if let Some(path) = out {
                fs::write(&path, &text)
                    .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
            }
            Ok(Output::Text(text))
        }
        Command::Brg { scene, dot } => {
            let scene = load_scene(&scene)?;
            let d = build_dependency_dictionary(&scene);
            let g = build_graph(&d)?;
            if dot {
                Ok(Output::Text(export_dot(&g)))
            } else {
                Ok(Output::Json(json!({ "dictionary": d, "brg": g })))
            }
        }
        Command::Plan(args) => {
            let scene = load_scene(&args.scene)?;
            let policy = TaskPolicy::from(args.policy);
            let plan = plan_for(&scene, &args.target)?;
            let split = divide_tasks(&plan, &build_dependency_dictionary(&scene), policy)?;
            Ok(Output::Json(
                json!({ "plan": plan, "policy": policy, "split": split }),
            ))
        }
        Command::Divide { plan, plan_file } => {
            let scene = load_scene(&plan.scene)?;
            let policy = TaskPolicy::from(plan.policy);
            let extraction = match plan_file {
                Some(path) => read_plan(&read(&path)?)?,
                None => plan_for(&scene, &plan.target)?,
            };
            let split = divide_tasks(&extraction, &build_dependency_dictionary(&scene), policy)?;
            Ok(Output::Json(json!(split)))
        }
        Command::Support {
            scene,
            target,
            k,
            ranking,
        } => {
            let scene = load_scene(&scene)?;
            let g = build_graph(&build_dependency_dictionary(&scene))?;
            Ok(Output::Json(json!(support_candidates(
                &g,
                &target,
                k,
                ranking.into()
            )?)))
        }
        Command::Point {
            scene,
            cloud,
            pointing,
        } => {
            let scene = load_scene(&scene)?;
            let cloud = PointCloud::parse(&read(&cloud)?)?;
            let result = shelfplan_core::resolve_pointing(&cloud, &scene, &pointing.config())?;
            Ok(Output::Json(json!(result)))
        }
        Command::Session {
            scene,
            ops,
            events_out,
        } => {
            let scene = load_scene(&scene)?;
            let ops = ops::parse(&read(&ops)?)?;
            let (session, report) = ops::run(scene, &ops)?;
            if let Some(path) = events_out {
                let text: String = session
                    .events()
                    .iter()
                    .map(|e| serde_json::to_string(e).expect("events serialize") + "\n")
                    .collect();
                fs::write(&path, text)
                    .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
            }
            Ok(Output::Json(report))
        }
        Command::Replay { events } => {
            let report = replay(&read_events(&events)?)?;
            if report.consistent {
                Ok(Output::Json(json!(report)))
            } else {
                Err(Failure::Inconsistent(json!(report)))
            }
        }
        Command::Serve { .. } => unreachable!("handled in main"),
    }
}

/// Accepts either a bare plan or the full output of `plan`.
fn read_plan(text: &str) -> Result<ExtractionPlan, Failure> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum PlanDoc {
        Wrapped { plan: ExtractionPlan },
        Bare(ExtractionPlan),
    }
    let doc: PlanDoc =
        serde_json::from_str(text).map_err(|e| Failure::from(Error::Schema(e.to_string())))?;
    Ok(match doc {
        PlanDoc::Wrapped { plan } | PlanDoc::Bare(plan) => plan,
    })
}

fn run_server(host: &str, port: u16, events_dir: Option<PathBuf>) -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()),
        )
        .with_writer(std::io::stderr)
        .init();

    let store = match events_dir {
        Some(dir) => match SessionStore::new().with_events_dir(dir) {
            Ok(s) => s,
            Err(e) => {
                println!("{}", json!({ "error": e.code(), "detail": e.to_string() }));
                return ExitCode::from(1);
            }
        },
        None => SessionStore::new(),
    };
    let runtime = tokio::runtime::Runtime::new().expect("tokio runtime");
    let outcome = runtime.block_on(async move {
        let listener = tokio::net::TcpListener::bind((host, port)).await?;
        let addr = listener.local_addr()?;
        println!("{}", json!({ "listening": addr.to_string() }));
        let _ = std::io::stdout().flush();
        serve(listener, Arc::new(store)).await
    });
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            println!("{}", json!({ "error": "IoError", "detail": e.to_string() }));
            ExitCode::from(1)
        }
    }
}
