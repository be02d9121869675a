//! Client fan-out and the inbound command queue.
//!
//! The engine thread publishes each diff once; every connected client gets
//! its own bounded [`Outbox`]. Sequence numbers are assigned when a
//! message leaves an outbox, so a connection always sees `1, 2, 3, ...`
//! even after backlog coalescing. A client that falls behind never slows
//! the engine: once its outbox is full, its pending render messages are
//! folded into one fresh `render_full`.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Condvar, Mutex};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::gesture::GestureEvent;

use super::diff::DiffOp;
use super::wire::{Body, Envelope, ErrorPayload};
use super::Command;

pub type ClientId = u64;

/// Callback run whenever a client's outbox gains a message.
pub type Waker = Arc<dyn Fn() + Send + Sync>;

pub const DEFAULT_OUTBOX_CAPACITY: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Presenter,
    Audience,
}

impl FromStr for Role {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "presenter" => Ok(Role::Presenter),
            "audience" => Ok(Role::Audience),
            other => Err(format!("unknown role {other:?}")),
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Role::Presenter => "presenter",
            Role::Audience => "audience",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HubError {
    #[error("a presenter is already connected")]
    SecondPresenter,
}

#[derive(Debug, Clone)]
enum Outgoing {
    Full { t_ms: u64, state: Arc<Value> },
    Diff { t_ms: u64, ops: Arc<Vec<DiffOp>> },
    Event(GestureEvent),
    Error { t_ms: u64, payload: ErrorPayload },
}

impl Outgoing {
    fn is_render(&self) -> bool {
        matches!(self, Outgoing::Full { .. } | Outgoing::Diff { .. })
    }
}

pub struct Outbox {
    queue: VecDeque<Outgoing>,
    capacity: usize,
    next_seq: u64,
    coalesced: u64,
    waker: Option<Waker>,
}

impl fmt::Debug for Outbox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Outbox")
            .field("queued", &self.queue.len())
            .field("capacity", &self.capacity)
            .field("next_seq", &self.next_seq)
            .field("coalesced", &self.coalesced)
            .finish()
    }
}

impl Outbox {
    fn new(capacity: usize, waker: Option<Waker>) -> Self {
        Self {
            queue: VecDeque::new(),
            capacity: capacity.max(1),
            next_seq: 1,
            coalesced: 0,
            waker,
        }
    }

    /// Queues `msg`; `latest` is the state after `msg` takes effect and
    /// replaces the render backlog when the outbox is full.
    fn push(&mut self, msg: Outgoing, latest: (u64, &Arc<Value>)) {
        if self.queue.len() >= self.capacity {
            let before = self.queue.len();
            self.queue.retain(|m| !m.is_render() && !matches!(m, Outgoing::Event(_)));
            self.coalesced += (before - self.queue.len()) as u64;
            let render = msg.is_render();
            if !render {
                self.queue.push_back(msg);
            }
            self.queue.push_back(Outgoing::Full {
                t_ms: latest.0,
                state: Arc::clone(latest.1),
            });
        } else {
            self.queue.push_back(msg);
        }
        if let Some(w) = &self.waker {
            w();
        }
    }

    fn pop(&mut self) -> Option<Envelope> {
        let msg = self.queue.pop_front()?;
        let seq = self.next_seq;
        self.next_seq += 1;
        let (t_ms, body) = match msg {
            Outgoing::Full { t_ms, state } => (t_ms, Body::RenderFull((*state).clone())),
            Outgoing::Diff { t_ms, ops } => (t_ms, Body::RenderDiff((*ops).clone())),
            Outgoing::Event(ev) => (ev.t_ms, Body::Event(ev)),
            Outgoing::Error { t_ms, payload } => (t_ms, Body::Error(payload)),
        };
        Some(Envelope { seq, t_ms, body })
    }
}

#[derive(Debug)]
struct Client {
    role: Role,
    events: bool,
    outbox: Outbox,
}

#[derive(Debug)]
pub struct Hub {
    clients: BTreeMap<ClientId, Client>,
    presenter: Option<ClientId>,
    next_id: ClientId,
    state: Arc<Value>,
    t_ms: u64,
    capacity: usize,
}

impl Hub {
    pub fn new(initial: Arc<Value>, capacity: usize) -> Self {
        Self {
            clients: BTreeMap::new(),
            presenter: None,
            next_id: 1,
            state: initial,
            t_ms: 0,
            capacity,
        }
    }

    /// The state every client converges to.
    pub fn state(&self) -> &Arc<Value> {
        &self.state
    }

    /// Timestamp of the last publish.
    pub fn t_ms(&self) -> u64 {
        self.t_ms
    }

    pub fn presenter(&self) -> Option<ClientId> {
        self.presenter
    }

    pub fn client_count(&self) -> usize {
        self.clients.len()
    }

    pub fn role(&self, id: ClientId) -> Option<Role> {
        self.clients.get(&id).map(|c| c.role)
    }

    /// Registers a client and queues its initial `render_full`. `events`
    /// subscribes it to the gesture debug stream.
    pub fn connect(&mut self, role: Role, events: bool, waker: Option<Waker>) -> Result<ClientId, HubError> {
        if role == Role::Presenter && self.presenter.is_some() {
            return Err(HubError::SecondPresenter);
        }
        let id = self.next_id;
        self.next_id += 1;
        let mut outbox = Outbox::new(self.capacity, waker);
        outbox.push(
            Outgoing::Full {
                t_ms: self.t_ms,
                state: Arc::clone(&self.state),
            },
            (self.t_ms, &self.state),
        );
        self.clients.insert(id, Client { role, events, outbox });
        if role == Role::Presenter {
            self.presenter = Some(id);
        }
        Ok(id)
    }

    pub fn disconnect(&mut self, id: ClientId) {
        self.clients.remove(&id);
        if self.presenter == Some(id) {
            self.presenter = None;
        }
    }

    /// Broadcasts a diff and records the resulting state.
    pub fn publish(&mut self, t_ms: u64, ops: Vec<DiffOp>, state: Arc<Value>) {
        self.t_ms = t_ms;
        self.state = state;
        if ops.is_empty() {
            return;
        }
        let ops = Arc::new(ops);
        for c in self.clients.values_mut() {
            c.outbox.push(
                Outgoing::Diff {
                    t_ms,
                    ops: Arc::clone(&ops),
                },
                (t_ms, &self.state),
            );
        }
    }

    pub fn publish_events(&mut self, events: &[GestureEvent]) {
        for c in self.clients.values_mut().filter(|c| c.events) {
            for ev in events {
                c.outbox.push(Outgoing::Event(*ev), (self.t_ms, &self.state));
            }
        }
    }

    pub fn send_error(&mut self, id: ClientId, t_ms: u64, payload: ErrorPayload) {
        if let Some(c) = self.clients.get_mut(&id) {
            c.outbox.push(Outgoing::Error { t_ms, payload }, (self.t_ms, &self.state));
        }
    }

    /// Next message for `id`, with its connection sequence number.
    pub fn pop(&mut self, id: ClientId) -> Option<Envelope> {
        self.clients.get_mut(&id)?.outbox.pop()
    }

    pub fn drain(&mut self, id: ClientId) -> Vec<Envelope> {
        std::iter::from_fn(|| self.pop(id)).collect()
    }

    /// Render messages folded away for `id` because it fell behind.
    pub fn coalesced(&self, id: ClientId) -> u64 {
        self.clients.get(&id).map_or(0, |c| c.outbox.coalesced)
    }

    pub fn queued(&self, id: ClientId) -> usize {
        self.clients.get(&id).map_or(0, |c| c.outbox.queue.len())
    }
}

#[derive(Debug, Default)]
struct InboxState {
    queue: VecDeque<Command>,
    closed: bool,
    coalesced: u64,
}

/// Ordered command queue feeding the engine thread. A frame arriving
/// while another frame waits at the tail replaces it (latest wins);
/// keys and config changes are never dropped or reordered.
#[derive(Debug, Default)]
pub struct Inbox {
    inner: Mutex<InboxState>,
    ready: Condvar,
}

impl Inbox {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns false once the inbox is closed.
    pub fn push(&self, cmd: Command) -> bool {
        let mut st = self.inner.lock().expect("inbox lock");
        if st.closed {
            return false;
        }
        let replace = matches!(
            (&cmd, st.queue.back()),
            (Command::Frame(_), Some(Command::Frame(_)))
        );
        if replace {
            *st.queue.back_mut().expect("tail exists") = cmd;
            st.coalesced += 1;
        } else {
            st.queue.push_back(cmd);
        }
        drop(st);
        self.ready.notify_one();
        true
    }

    /// Blocks until a command is available; `None` after close once empty.
    pub fn pop(&self) -> Option<Command> {
        let mut st = self.inner.lock().expect("inbox lock");
        loop {
            if let Some(cmd) = st.queue.pop_front() {
                return Some(cmd);
            }
            if st.closed {
                return None;
            }
            st = self.ready.wait(st).expect("inbox lock");
        }
    }

    pub fn pop_timeout(&self, timeout: Duration) -> Option<Command> {
        let st = self.inner.lock().expect("inbox lock");
        let (mut st, _) = self
            .ready
            .wait_timeout_while(st, timeout, |s| s.queue.is_empty() && !s.closed)
            .expect("inbox lock");
        st.queue.pop_front()
    }

    pub fn close(&self) {
        self.inner.lock().expect("inbox lock").closed = true;
        self.ready.notify_all();
    }

    /// Frames replaced before the engine reached them.
    pub fn coalesced(&self) -> u64 {
        self.inner.lock().expect("inbox lock").coalesced
    }

    pub fn len(&self) -> usize {
        self.inner.lock().expect("inbox lock").queue.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
