//! Session plumbing shared by the live server and offline replay: the
//! engine pipeline, the wire protocol, diffs, and client fan-out.

pub mod diff;
pub mod hub;
pub mod wire;

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::chart::Deck;
use crate::gesture::{GestureConfig, GestureConfigPatch, GestureError, GestureEvent, GestureRuntime};
use crate::interaction::{Engine, EngineConfig, RenderState};
use crate::landmark::{Ingest, IngestConfig, IngestError, Ingestor, RawFrame};
use crate::scene::{NavCommand, DEFAULT_TRANSITION_MS};

use diff::DiffOp;

/// One unit of engine input, in arrival order.
#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    Frame(RawFrame),
    Key { t_ms: u64, key: NavCommand },
    Config { t_ms: u64, patch: GestureConfigPatch },
}

impl Command {
    pub fn t_ms(&self) -> u64 {
        match self {
            Command::Frame(f) => f.t_ms,
            Command::Key { t_ms, .. } | Command::Config { t_ms, .. } => *t_ms,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SessionConfig {
    #[serde(default)]
    pub gesture: GestureConfig,
    #[serde(default)]
    pub ingest: IngestConfig,
    #[serde(default = "default_transition_ms")]
    pub transition_ms: u64,
}

fn default_transition_ms() -> u64 {
    DEFAULT_TRANSITION_MS
}

impl Default for SessionConfig {
    fn default() -> Self {
        Self {
            gesture: GestureConfig::default(),
            ingest: IngestConfig::default(),
            transition_ms: DEFAULT_TRANSITION_MS,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SessionError {
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Config(#[from] GestureError),
}

/// Output of one command.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Step {
    pub t_ms: u64,
    pub events: Vec<GestureEvent>,
    /// Changes since the previously published state; empty when nothing
    /// visible changed.
    pub diff: Vec<DiffOp>,
}

/// ingest → gesture runtime → interaction engine → diff.
#[derive(Debug, Clone)]
pub struct Pipeline {
    ingestor: Ingestor,
    runtime: GestureRuntime,
    engine: Engine,
    published: Arc<Value>,
}

impl Pipeline {
    pub fn new(deck: Arc<Deck>, cfg: SessionConfig) -> Result<Self, GestureError> {
        let runtime = GestureRuntime::new(cfg.gesture)?;
        let engine = Engine::new(
            deck,
            EngineConfig {
                dominant_hand: cfg.gesture.dominant_hand,
                transition_ms: cfg.transition_ms,
                ..EngineConfig::default()
            },
        );
        let published = Arc::new(engine.render().to_value());
        Ok(Self {
            ingestor: Ingestor::new(cfg.ingest),
            runtime,
            engine,
            published,
        })
    }

    pub fn engine(&self) -> &Engine {
        &self.engine
    }

    pub fn gesture_config(&self) -> &GestureConfig {
        self.runtime.config()
    }

    pub fn render(&self) -> RenderState {
        self.engine.render()
    }

    /// The state as of the last published diff.
    pub fn published(&self) -> &Arc<Value> {
        &self.published
    }

    pub fn apply(&mut self, cmd: &Command) -> Result<Step, SessionError> {
        let mut events = Vec::new();
        match cmd {
            Command::Frame(raw) => {
                let mut next = match self.ingestor.ingest(raw)? {
                    Ingest::Accepted(frame) => Some(frame),
                    Ingest::Parked { .. } => None,
                };
                while let Some(frame) = next {
                    let evs = self.runtime.step(&frame);
                    self.engine.tick(frame.t_ms);
                    for ev in &evs {
                        self.engine.handle(ev);
                    }
                    events.extend(evs);
                    next = self.ingestor.finish();
                }
            }
            Command::Key { t_ms, key } => {
                self.engine.navigate(*key, *t_ms);
            }
            Command::Config { patch, .. } => {
                let cfg = patch.apply(self.runtime.config())?;
                self.runtime.set_config(cfg)?;
                self.engine.set_dominant_hand(cfg.dominant_hand);
            }
        }
        let state = self.engine.render().to_value();
        let diff = diff::diff(&self.published, &state);
        if !diff.is_empty() {
            self.published = Arc::new(state);
        }
        Ok(Step {
            t_ms: cmd.t_ms(),
            events,
            diff,
        })
    }
}
