//! Offline replay on the virtual clock.

use std::sync::Arc;
use std::time::{Duration, Instant};

use serde_json::Value;

use crate::chart::Deck;
use crate::gesture::{GestureError, GestureEvent};
use crate::interaction::RenderState;
use crate::session::wire::{Body, Envelope};
use crate::session::{Pipeline, SessionConfig, SessionError};

use super::format::Trace;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ReplayMode {
    /// Drive the clock straight from record timestamps.
    Fast,
    /// Sleep between records so that wall time tracks trace time divided
    /// by `speed`.
    Realtime { speed: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReplayOptions {
    pub mode: ReplayMode,
    /// Overrides the header configuration (or the default when the trace
    /// has no header).
    pub config: Option<SessionConfig>,
}

impl Default for ReplayOptions {
    fn default() -> Self {
        Self {
            mode: ReplayMode::Fast,
            config: None,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ReplayError {
    #[error("scene file hash {actual} does not match the trace header ({expected})")]
    SceneHashMismatch { expected: String, actual: String },
    #[error("record {record}: {source}")]
    Session {
        record: usize,
        #[source]
        source: SessionError,
    },
    #[error(transparent)]
    Config(#[from] GestureError),
}

/// Everything a replay produces: the gesture log and the render stream a
/// freshly connected client would receive.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplayOutput {
    pub events: Vec<GestureEvent>,
    pub stream: Vec<Envelope>,
    pub final_state: Arc<Value>,
}

impl ReplayOutput {
    pub fn events_jsonl(&self) -> String {
        self.events
            .iter()
            .map(|e| serde_json::to_string(e).expect("event serializes") + "\n")
            .collect()
    }

    pub fn render_jsonl(&self) -> String {
        self.stream.iter().map(|e| e.to_json() + "\n").collect()
    }
}

fn session_config(trace: &Trace, deck: &Deck, opts: &ReplayOptions) -> Result<SessionConfig, ReplayError> {
    if let Some(h) = &trace.header {
        if h.scene_hash != deck.hash {
            return Err(ReplayError::SceneHashMismatch {
                expected: h.scene_hash.clone(),
                actual: deck.hash.clone(),
            });
        }
    }
    Ok(opts
        .config
        .or_else(|| trace.header.as_ref().map(|h| h.session_config()))
        .unwrap_or_default())
}

pub fn replay(trace: &Trace, deck: Arc<Deck>, opts: &ReplayOptions) -> Result<ReplayOutput, ReplayError> {
    let cfg = session_config(trace, &deck, opts)?;
    let mut pipeline = Pipeline::new(deck, cfg)?;
    let mut stream = vec![Envelope {
        seq: 1,
        t_ms: 0,
        body: Body::RenderFull((**pipeline.published()).clone()),
    }];
    let mut events = Vec::new();
    let started = Instant::now();
    let origin = trace.records.first().map_or(0, |r| r.t_ms());
    for (i, cmd) in trace.commands().enumerate() {
        if let ReplayMode::Realtime { speed } = opts.mode {
            let due = Duration::from_secs_f64((cmd.t_ms() - origin) as f64 / 1000.0 / speed.max(1e-6));
            if let Some(wait) = due.checked_sub(started.elapsed()) {
                std::thread::sleep(wait);
            }
        }
        let step = pipeline
            .apply(&cmd)
            .map_err(|source| ReplayError::Session { record: i + 1, source })?;
        events.extend(step.events);
        if !step.diff.is_empty() {
            stream.push(Envelope {
                seq: stream.len() as u64 + 1,
                t_ms: step.t_ms,
                body: Body::RenderDiff(step.diff),
            });
        }
    }
    Ok(ReplayOutput {
        events,
        stream,
        final_state: Arc::clone(pipeline.published()),
    })
}

/// Render states after all records up to each requested time. `times`
/// need not be sorted; results follow its order.
pub fn states_at(
    trace: &Trace,
    deck: Arc<Deck>,
    opts: &ReplayOptions,
    times: &[u64],
) -> Result<Vec<RenderState>, ReplayError> {
    let cfg = session_config(trace, &deck, opts)?;
    let mut pipeline = Pipeline::new(deck, cfg)?;
    let mut order: Vec<usize> = (0..times.len()).collect();
    order.sort_by_key(|&i| times[i]);
    let mut out: Vec<Option<RenderState>> = vec![None; times.len()];
    let mut cmds = trace.commands().enumerate().peekable();
    for i in order {
        while let Some((n, cmd)) = cmds.next_if(|(_, c)| c.t_ms() <= times[i]) {
            pipeline
                .apply(&cmd)
                .map_err(|source| ReplayError::Session { record: n + 1, source })?;
        }
        out[i] = Some(pipeline.render());
    }
    Ok(out.into_iter().map(|s| s.expect("every time visited")).collect())
}
