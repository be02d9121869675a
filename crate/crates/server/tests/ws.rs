use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Duration;

use futures_util::{SinkExt, StreamExt};
use serde_json::Value;
use tokio::net::{TcpListener, TcpStream};
use tokio::sync::oneshot;
use tokio::time::timeout;
use tokio_tungstenite::tungstenite::Message;
use tokio_tungstenite::{connect_async, MaybeTlsStream, WebSocketStream};

use chirono_core::chart::Deck;
use chirono_core::scene::NavCommand;
use chirono_core::session::diff::fold;
use chirono_core::session::wire::{Body, Envelope, ErrorCode};
use chirono_core::session::{Command, SessionConfig};
use chirono_core::trace::{replay, ReplayOptions, Trace};
use chirono_server::{serve, Session};

type Ws = WebSocketStream<MaybeTlsStream<TcpStream>>;

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn deck() -> Arc<Deck> {
    Arc::new(Deck::load(&fixtures().join("deck/scenes.json")).unwrap())
}

struct Running {
    addr: SocketAddr,
    session: Arc<Session>,
    stop: Option<oneshot::Sender<()>>,
    server: tokio::task::JoinHandle<()>,
}

impl Running {
    async fn start(record: Option<PathBuf>) -> Self {
        let session = Arc::new(Session::start(deck(), SessionConfig::default(), record.as_deref()).unwrap());
        let listener = TcpListener::bind("127.0.0.1:0").await.unwrap();
        let addr = listener.local_addr().unwrap();
        let (tx, rx) = oneshot::channel::<()>();
        let server = tokio::spawn(serve(listener, Arc::clone(&session), async {
            let _ = rx.await;
        }));
        let server = tokio::spawn(async move {
            server.await.unwrap().unwrap();
        });
        Self {
            addr,
            session,
            stop: Some(tx),
            server,
        }
    }

    async fn connect(&self, query: &str) -> Ws {
        let (ws, _) = connect_async(format!("ws://{}/ws?{query}", self.addr)).await.unwrap();
        ws
    }

    async fn stop(mut self) {
        self.session.shutdown();
        if let Some(tx) = self.stop.take() {
            let _ = tx.send(());
        }
        let _ = timeout(Duration::from_secs(5), self.server).await;
    }
}

async fn next_text(ws: &mut Ws) -> Option<String> {
    loop {
        match timeout(Duration::from_secs(5), ws.next()).await.ok()?? {
            Ok(Message::Text(t)) => return Some(t.to_string()),
            Ok(Message::Close(_)) | Err(_) => return None,
            Ok(_) => {}
        }
    }
}

async fn next_envelope(ws: &mut Ws) -> Envelope {
    Envelope::parse(&next_text(ws).await.expect("message")).unwrap()
}

async fn send(ws: &mut Ws, env: &Envelope) {
    ws.send(Message::Text(env.to_json().into())).await.unwrap();
}

fn command_envelope(seq: u64, cmd: Command) -> Envelope {
    let t_ms = cmd.t_ms();
    let body = match cmd {
        Command::Frame(f) => Body::Frame(f),
        Command::Key { key, .. } => Body::Key(key),
        Command::Config { patch, .. } => Body::Config(patch),
    };
    Envelope { seq, t_ms, body }
}

#[tokio::test(flavor = "multi_thread", worker_threads = 2)]
async fn roles_and_errors() {
    let server = Running::start(None).await;
    let mut presenter = server.connect("role=presenter").await;
    let first = next_envelope(&mut presenter).await;
    assert_eq!(first.seq, 1);
    assert!(matches!(first.body, Body::RenderFull(_)));

    let mut second = server.connect("role=presenter").await;
    let reply = next_envelope(&mut second).await;
    let Body::Error(e) = reply.body else {
        panic!("second presenter must be rejected, got {reply:?}");
    };
    assert_eq!(e.code, ErrorCode::SecondPresenter);
    assert!(next_text(&mut second).await.is_none(), "rejected socket closes");

    let mut audience = server.connect("role=audience").await;
    assert!(matches!(next_envelope(&mut audience).await.body, Body::RenderFull(_)));
    audience
        .send(Message::Text(r#"{"seq":1,"t_ms":0,"type":"key","payload":"next"}"#.into()))
        .await
        .unwrap();
    let reply = next_envelope(&mut audience).await;
    assert_eq!(reply.seq, 2);
    assert!(matches!(reply.body, Body::Error(ref e) if e.code == ErrorCode::NotPresenter));

    presenter.send(Message::Text("not json".into())).await.unwrap();
    let reply = next_envelope(&mut presenter).await;
    assert!(matches!(reply.body, Body::Error(ref e) if e.code == ErrorCode::MalformedMessage));

    // the session keeps working after the errors
    send(
        &mut presenter,
        &Envelope::parse(r#"{"seq":1,"t_ms":100,"type":"key","payload":"next"}"#).unwrap(),
    )
    .await;
    for ws in [&mut presenter, &mut audience] {
        let env = next_envelope(ws).await;
        let Body::RenderDiff(ops) = env.body else {
            panic!("expected a diff, got {env:?}");
        };
        assert!(ops.iter().any(|op| op.path() == "/scene_index"));
    }

    server.stop().await;
}

#[tokio::test(flavor = "multi_thread", worker_threads = 2)]
async fn recording_replays_to_the_broadcast_stream() {
    let dir = tempfile::tempdir().unwrap();
    let record = dir.path().join("live.jsonl");
    let server = Running::start(Some(record.clone())).await;

    let mut audience = server.connect("role=audience").await;
    let mut received = vec![next_text(&mut audience).await.unwrap()];
    let mut presenter = server.connect("role=presenter").await;
    next_envelope(&mut presenter).await;

    let source = Trace::load(&fixtures().join("corpus/pointing_line.jsonl")).unwrap();
    let mut seq = 0;
    for cmd in source.commands() {
        seq += 1;
        send(&mut presenter, &command_envelope(seq, cmd)).await;
    }
    // commands are applied in order, so once this key shows up in the
    // presenter's stream every earlier command has been consumed
    let end = source.end_ms().unwrap() + 1;
    send(
        &mut presenter,
        &command_envelope(seq + 1, Command::Key { t_ms: end, key: NavCommand::Next }),
    )
    .await;
    loop {
        let env = next_envelope(&mut presenter).await;
        if matches!(&env.body, Body::RenderDiff(ops) if ops.iter().any(|o| o.path() == "/scene_index")) {
            break;
        }
    }
    server.session.shutdown();
    let final_state = Arc::clone(server.session.hub().state());

    // read until the audience has caught up with the engine
    loop {
        let msgs: Vec<Envelope> = received.iter().map(|t| Envelope::parse(t).unwrap()).collect();
        let Body::RenderFull(snapshot) = &msgs[0].body else {
            panic!("stream must open with a snapshot");
        };
        let diffs = msgs[1..].iter().map(|m| match &m.body {
            Body::RenderDiff(ops) => ops.as_slice(),
            other => panic!("unexpected {}", other.type_name()),
        });
        if fold(snapshot, diffs).unwrap() == *final_state {
            break;
        }
        received.push(next_text(&mut audience).await.expect("audience stream ended early"));
    }
    assert!(received.len() > 1, "the trace must change the state");

    let recorded = Trace::load(&record).unwrap();
    assert!(recorded.header.is_some());
    assert!(recorded.frame_count() > 0 && recorded.frame_count() <= source.frame_count());
    let out = replay(&recorded, deck(), &ReplayOptions::default()).unwrap();
    let replayed: Vec<String> = out.stream.iter().map(Envelope::to_json).collect();
    assert_eq!(replayed, received);
    assert_eq!(serde_json::to_string(&*out.final_state).unwrap(), serde_json::to_string(&*final_state).unwrap());

    let state: Value = serde_json::from_str(&http_get(server.addr, "/state").await).unwrap();
    assert_eq!(state, *final_state);
    server.stop().await;
}

/// Minimal HTTP/1.1 GET, enough for the JSON state endpoint.
async fn http_get(addr: SocketAddr, path: &str) -> String {
    use tokio::io::{AsyncReadExt, AsyncWriteExt};
    let mut stream = TcpStream::connect(addr).await.unwrap();
    let req = format!("GET {path} HTTP/1.1\r\nHost: {addr}\r\nConnection: close\r\n\r\n");
    stream.write_all(req.as_bytes()).await.unwrap();
    let mut buf = String::new();
    stream.read_to_string(&mut buf).await.unwrap();
    let (head, body) = buf.split_once("\r\n\r\n").unwrap();
    assert!(head.starts_with("HTTP/1.1 200"), "{head}");
    body.to_owned()
}
