//! WebSocket session server.
//!
//! One presenter streams landmark frames, navigation keys and gesture
//! config patches to `/ws?role=presenter`; any number of audience clients
//! connect to `/ws?role=audience`. Every client gets a `render_full`
//! snapshot on connect, followed by the shared `render_diff` stream.
//! Adding `events=1` to the query also subscribes to recognized gestures.
//!
//! All engine work happens on one dedicated thread fed by an ordered
//! [`Inbox`]; connection tasks only parse, enqueue and forward.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, MutexGuard};
use std::thread::JoinHandle;

use axum::extract::ws::{Message, WebSocket, WebSocketUpgrade};
use axum::extract::{Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use log::{debug, info, warn};
use tokio::net::TcpListener;
use tokio::sync::Notify;

use chirono_core::chart::Deck;
use chirono_core::gesture::GestureError;
use chirono_core::session::hub::{Hub, HubError, Inbox, Role, Waker, DEFAULT_OUTBOX_CAPACITY};
use chirono_core::session::wire::{Body, Envelope, ErrorCode, ErrorPayload};
use chirono_core::session::{Command, Pipeline, SessionConfig, SessionError};
use chirono_core::trace::{Record, TraceHeader};

#[derive(Debug, thiserror::Error)]
pub enum ServerError {
    #[error("invalid session config: {0}")]
    Config(#[from] GestureError),
    #[error("cannot write recording {path}: {source}")]
    Record {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Appends every command the engine consumed to a trace file.
struct Recorder {
    path: PathBuf,
    out: BufWriter<File>,
}

impl Recorder {
    fn create(path: &Path, header: &TraceHeader) -> Result<Self, ServerError> {
        let err = |source| ServerError::Record {
            path: path.to_owned(),
            source,
        };
        let mut out = BufWriter::new(File::create(path).map_err(err)?);
        let line = serde_json::to_string(header).expect("header serializes");
        writeln!(out, "{line}").and_then(|()| out.flush()).map_err(err)?;
        Ok(Self {
            path: path.to_owned(),
            out,
        })
    }

    fn append(&mut self, cmd: &Command) {
        let line = Record::from_command(cmd).to_line();
        if let Err(e) = writeln!(self.out, "{line}").and_then(|()| self.out.flush()) {
            warn!("recording to {} failed: {e}", self.path.display());
        }
    }
}

/// A running session: the engine thread plus the shared client hub.
pub struct Session {
    deck: Arc<Deck>,
    inbox: Arc<Inbox>,
    hub: Arc<Mutex<Hub>>,
    engine: Mutex<Option<JoinHandle<()>>>,
}

impl Session {
    /// Starts the engine thread. With `record`, the trace header is
    /// written before this returns.
    pub fn start(deck: Arc<Deck>, cfg: SessionConfig, record: Option<&Path>) -> Result<Self, ServerError> {
        let pipeline = Pipeline::new(Arc::clone(&deck), cfg)?;
        let recorder = record
            .map(|p| Recorder::create(p, &TraceHeader::new(cfg.gesture, cfg.ingest, deck.hash.clone())))
            .transpose()?;
        let hub = Arc::new(Mutex::new(Hub::new(
            Arc::clone(pipeline.published()),
            DEFAULT_OUTBOX_CAPACITY,
        )));
        let inbox = Arc::new(Inbox::new());
        let engine = {
            let (inbox, hub) = (Arc::clone(&inbox), Arc::clone(&hub));
            std::thread::Builder::new()
                .name("chirono-engine".into())
                .spawn(move || run_engine(pipeline, &inbox, &hub, recorder))?
        };
        Ok(Self {
            deck,
            inbox,
            hub,
            engine: Mutex::new(Some(engine)),
        })
    }

    pub fn deck(&self) -> &Arc<Deck> {
        &self.deck
    }

    pub fn inbox(&self) -> &Arc<Inbox> {
        &self.inbox
    }

    pub fn hub(&self) -> MutexGuard<'_, Hub> {
        lock(&self.hub)
    }

    /// Stops accepting commands, lets the engine drain the queue and waits
    /// for it. The recording is complete once this returns.
    pub fn shutdown(&self) {
        self.inbox.close();
        let handle = self.engine.lock().unwrap_or_else(|p| p.into_inner()).take();
        if let Some(handle) = handle {
            if handle.join().is_err() {
                warn!("engine thread panicked");
            }
        }
    }
}

impl Drop for Session {
    fn drop(&mut self) {
        self.shutdown();
    }
}

fn lock(hub: &Mutex<Hub>) -> MutexGuard<'_, Hub> {
    hub.lock().unwrap_or_else(|poisoned| poisoned.into_inner())
}

fn run_engine(mut pipeline: Pipeline, inbox: &Inbox, hub: &Mutex<Hub>, mut recorder: Option<Recorder>) {
    let mut last_ms: Option<u64> = None;
    while let Some(cmd) = inbox.pop() {
        let t_ms = cmd.t_ms();
        let result = match last_ms {
            Some(last) if t_ms < last => Err((
                ErrorCode::OutOfOrder,
                format!("timestamp {t_ms} ms is earlier than {last} ms"),
            )),
            _ => pipeline.apply(&cmd).map_err(|e| match e {
                SessionError::Ingest(e) => (ErrorCode::OutOfOrder, e.to_string()),
                SessionError::Config(e) => (ErrorCode::Rejected, e.to_string()),
            }),
        };
        match result {
            Ok(step) => {
                last_ms = Some(t_ms);
                if let Some(r) = &mut recorder {
                    r.append(&cmd);
                }
                let mut hub = lock(hub);
                hub.publish(step.t_ms, step.diff, Arc::clone(pipeline.published()));
                hub.publish_events(&step.events);
            }
            Err((code, message)) => {
                debug!("rejected command at {t_ms} ms: {message}");
                let mut hub = lock(hub);
                if let Some(id) = hub.presenter() {
                    hub.send_error(id, t_ms, ErrorPayload { code, message });
                }
            }
        }
    }
    info!("engine stopped");
}

/// HTTP routes: `/ws` for the session and `/state` for the current
/// render state as JSON.
pub fn router(session: Arc<Session>) -> Router {
    Router::new()
        .route("/ws", get(ws_handler))
        .route("/state", get(state_handler))
        .with_state(session)
}

/// Serves `session` on `listener` until `shutdown` resolves.
pub async fn serve(
    listener: TcpListener,
    session: Arc<Session>,
    shutdown: impl std::future::Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(session))
        .with_graceful_shutdown(shutdown)
        .await
}

async fn state_handler(State(session): State<Arc<Session>>) -> Json<serde_json::Value> {
    let state = Arc::clone(session.hub().state());
    Json((*state).clone())
}

async fn ws_handler(
    ws: WebSocketUpgrade,
    Query(params): Query<HashMap<String, String>>,
    State(session): State<Arc<Session>>,
) -> Response {
    let role = match params.get("role").map_or(Ok(Role::Audience), |r| r.parse::<Role>()) {
        Ok(role) => role,
        Err(e) => return (StatusCode::BAD_REQUEST, e).into_response(),
    };
    let events = params.get("events").is_some_and(|v| v == "1" || v == "true");
    ws.on_upgrade(move |socket| connection(socket, session, role, events))
}

async fn connection(mut socket: WebSocket, session: Arc<Session>, role: Role, events: bool) {
    let notify = Arc::new(Notify::new());
    let waker: Waker = {
        let notify = Arc::clone(&notify);
        Arc::new(move || notify.notify_one())
    };
    let connected = session.hub().connect(role, events, Some(waker));
    let id = match connected {
        Ok(id) => id,
        Err(HubError::SecondPresenter) => {
            let reply = Envelope {
                seq: 1,
                t_ms: session.hub().t_ms(),
                body: Body::Error(ErrorPayload {
                    code: ErrorCode::SecondPresenter,
                    message: HubError::SecondPresenter.to_string(),
                }),
            };
            let _ = socket.send(Message::Text(reply.to_json().into())).await;
            let _ = socket.send(Message::Close(None)).await;
            return;
        }
    };
    info!("client {id} connected as {role}");
    let mut inbound = InboundCheck::new(role);
    loop {
        tokio::select! {
            () = notify.notified() => {
                let pending = session.hub().drain(id);
                if !send_all(&mut socket, pending).await {
                    break;
                }
            }
            msg = socket.recv() => match msg {
                Some(Ok(Message::Text(text))) => match inbound.accept(text.as_str()) {
                    Ok(cmd) => {
                        session.inbox().push(cmd);
                    }
                    Err(payload) => {
                        let mut hub = session.hub();
                        let t_ms = hub.t_ms();
                        hub.send_error(id, t_ms, payload);
                    }
                },
                Some(Ok(Message::Binary(_))) => {
                    let mut hub = session.hub();
                    let t_ms = hub.t_ms();
                    hub.send_error(id, t_ms, error(ErrorCode::MalformedMessage, "binary messages are not supported"));
                }
                Some(Ok(Message::Close(_))) | None => break,
                Some(Ok(_)) => {}
                Some(Err(e)) => {
                    debug!("client {id}: {e}");
                    break;
                }
            },
        }
    }
    session.hub().disconnect(id);
    info!("client {id} disconnected");
}

async fn send_all(socket: &mut WebSocket, messages: Vec<Envelope>) -> bool {
    for m in messages {
        if socket.send(Message::Text(m.to_json().into())).await.is_err() {
            return false;
        }
    }
    true
}

fn error(code: ErrorCode, message: impl Into<String>) -> ErrorPayload {
    ErrorPayload {
        code,
        message: message.into(),
    }
}

/// Per-connection validation of inbound messages.
#[derive(Debug)]
struct InboundCheck {
    role: Role,
    last_seq: u64,
}

impl InboundCheck {
    fn new(role: Role) -> Self {
        Self { role, last_seq: 0 }
    }

    fn accept(&mut self, text: &str) -> Result<Command, ErrorPayload> {
        let env = Envelope::parse(text).map_err(|e| error(ErrorCode::MalformedMessage, e.to_string()))?;
        if !env.body.is_inbound() {
            return Err(error(
                ErrorCode::MalformedMessage,
                format!("clients cannot send {}", env.body.type_name()),
            ));
        }
        if self.role != Role::Presenter {
            return Err(error(ErrorCode::NotPresenter, "only the presenter sends input"));
        }
        if env.seq <= self.last_seq {
            return Err(error(
                ErrorCode::OutOfOrder,
                format!("seq {} after {}", env.seq, self.last_seq),
            ));
        }
        self.last_seq = env.seq;
        Ok(match env.body {
            Body::Frame(frame) => Command::Frame(frame),
            Body::Key(key) => Command::Key { t_ms: env.t_ms, key },
            Body::Config(patch) => Command::Config { t_ms: env.t_ms, patch },
            _ => unreachable!("checked inbound above"),
        })
    }
}
