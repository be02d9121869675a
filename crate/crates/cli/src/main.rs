use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use log::info;

use chirono_core::chart::Deck;
use chirono_core::session::SessionConfig;
use chirono_core::trace::golden::{self, EVENTS_FILE, RENDER_FILE};
use chirono_core::trace::{replay, snapshot, GoldenOutcome, ReplayMode, ReplayOptions, Trace};
use chirono_server::Session;

const EXIT_DIVERGED: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "chirono", version, about = "Gesture-driven chart presentations: serve, record and replay sessions")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Replay a trace and write the event log and render stream.
    Replay {
        trace: PathBuf,
        #[command(flatten)]
        session: SessionArgs,
        /// Pace records by their timestamps instead of running flat out.
        #[arg(long)]
        realtime: bool,
        /// Playback speed factor for --realtime.
        #[arg(long, default_value_t = 1.0, requires = "realtime")]
        speed: f64,
        /// Directory for events.jsonl and render.jsonl; the render stream
        /// goes to stdout when omitted.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Render the state at given trace times as SVG documents.
    Snapshot {
        trace: PathBuf,
        #[command(flatten)]
        session: SessionArgs,
        /// Comma-separated trace times in milliseconds.
        #[arg(long, value_delimiter = ',', required = true)]
        at: Vec<u64>,
        /// Output directory, one `snapshot-<t_ms>.svg` per time.
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Compare a replay against committed goldens.
    DiffGolden {
        trace: PathBuf,
        #[command(flatten)]
        session: SessionArgs,
        /// Directory holding events.jsonl and render.jsonl.
        #[arg(long)]
        golden: PathBuf,
        /// Overwrite the goldens with the current output.
        #[arg(long)]
        bless: bool,
    },
    /// Run the live session server.
    Serve {
        #[command(flatten)]
        server: ServerArgs,
        /// Write every consumed command to this trace file.
        #[arg(long)]
        record: Option<PathBuf>,
    },
    /// Run the server headless, recording the session to a trace.
    RecordProxy {
        #[command(flatten)]
        server: ServerArgs,
        #[arg(long)]
        record: PathBuf,
    },
}

#[derive(Debug, Args)]
struct SessionArgs {
    /// Scene file (JSON).
    #[arg(long)]
    scenes: PathBuf,
    /// Session config (JSON); overrides the trace header.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ServerArgs {
    #[arg(long, env = "CHIRONO_LISTEN", default_value = "127.0.0.1:8765")]
    listen: SocketAddr,
    #[arg(long)]
    scenes: PathBuf,
    #[arg(long)]
    config: Option<PathBuf>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn load_deck(path: &Path) -> Result<Arc<Deck>> {
    Ok(Arc::new(Deck::load(path).with_context(|| format!("loading scenes {}", path.display()))?))
}

fn load_config(path: Option<&Path>) -> Result<Option<SessionConfig>> {
    let Some(path) = path else {
        return Ok(None);
    };
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let cfg: SessionConfig = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    cfg.gesture.validate().with_context(|| format!("invalid config {}", path.display()))?;
    Ok(Some(cfg))
}

fn load_trace(path: &Path) -> Result<Trace> {
    Trace::load(path).with_context(|| format!("reading trace {}", path.display()))
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn run(cmd: Cmd) -> Result<ExitCode> {
    match cmd {
        Cmd::Replay {
            trace,
            session,
            realtime,
            speed,
            out_dir,
        } => {
            if !(speed.is_finite() && speed > 0.0) {
                bail!("--speed must be positive");
            }
            let deck = load_deck(&session.scenes)?;
            let opts = ReplayOptions {
                mode: if realtime {
                    ReplayMode::Realtime { speed }
                } else {
                    ReplayMode::Fast
                },
                config: load_config(session.config.as_deref())?,
            };
            let out = replay(&load_trace(&trace)?, deck, &opts)?;
            match out_dir {
                Some(dir) => {
                    std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
                    write_file(&dir.join(EVENTS_FILE), &out.events_jsonl())?;
                    write_file(&dir.join(RENDER_FILE), &out.render_jsonl())?;
                    info!(
                        "{} events, {} render messages written to {}",
                        out.events.len(),
                        out.stream.len(),
                        dir.display()
                    );
                }
                None => print!("{}", out.render_jsonl()),
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Snapshot {
            trace,
            session,
            at,
            out_dir,
        } => {
            let deck = load_deck(&session.scenes)?;
            let opts = ReplayOptions {
                config: load_config(session.config.as_deref())?,
                ..ReplayOptions::default()
            };
            let svgs = snapshot(&load_trace(&trace)?, deck, &opts, &at)?;
            std::fs::create_dir_all(&out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
            for (t, svg) in at.iter().zip(&svgs) {
                let path = out_dir.join(format!("snapshot-{t}.svg"));
                write_file(&path, svg)?;
                println!("{}", path.display());
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::DiffGolden {
            trace,
            session,
            golden: dir,
            bless,
        } => {
            let deck = load_deck(&session.scenes)?;
            let opts = ReplayOptions {
                config: load_config(session.config.as_deref())?,
                ..ReplayOptions::default()
            };
            let out = replay(&load_trace(&trace)?, deck, &opts)?;
            if bless {
                golden::bless(&out, &dir)?;
                println!("blessed {}", dir.display());
                return Ok(ExitCode::SUCCESS);
            }
            match golden::compare(&out, &dir)? {
                GoldenOutcome::Match => {
                    println!("PASS {}", trace.display());
                    Ok(ExitCode::SUCCESS)
                }
                GoldenOutcome::Diverged(d) => {
                    println!("FAIL {}: {d}", trace.display());
                    Ok(ExitCode::from(EXIT_DIVERGED))
                }
            }
        }
        Cmd::Serve { server, record } => serve(server, record.as_deref()),
        Cmd::RecordProxy { server, record } => serve(server, Some(&record)),
    }
}

fn serve(args: ServerArgs, record: Option<&Path>) -> Result<ExitCode> {
    let deck = load_deck(&args.scenes)?;
    let cfg = load_config(args.config.as_deref())?.unwrap_or_default();
    let session = Arc::new(Session::start(deck, cfg, record)?);
    if let Some(path) = record {
        info!("recording to {}", path.display());
    }
    let rt = tokio::runtime::Runtime::new().context("starting the async runtime")?;
    rt.block_on(async {
        let listener = tokio::net::TcpListener::bind(args.listen)
            .await
            .with_context(|| format!("binding {}", args.listen))?;
        let shutdown = async {
            let _ = tokio::signal::ctrl_c().await;
            info!("shutting down");
        };
        chirono_server::serve(listener, Arc::clone(&session), shutdown).await?;
        anyhow::Ok(())
    })?;
    session.shutdown();
    Ok(ExitCode::SUCCESS)
}
