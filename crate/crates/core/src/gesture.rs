//! Debounced gesture events from landmark frames.
//!
//! Each hand runs three small state machines: index-finger presence
//! (`Point*` events), palm presence (`Palm*` events) and pinch (`Pinch*`
//! events). A pose must hold for the dwell time before its start event
//! fires, and a lost signal is bridged for up to the timeout before the
//! end event fires. Pinch uses separate on/off distance thresholds.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::landmark::{HandObservation, Handedness, LandmarkFrame, Point2};

pub const MIN_DURATION_MS: u64 = 100;
pub const MAX_DURATION_MS: u64 = 1000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GestureError {
    #[error("{family:?} {what} of {value} ms is outside [{MIN_DURATION_MS}, {MAX_DURATION_MS}]")]
    DurationOutOfRange {
        family: Family,
        what: &'static str,
        value: u64,
    },
    #[error("pinch off distance {off} must exceed on distance {on}")]
    PinchHysteresis { on: f64, off: f64 },
    #[error("no hands to choose from")]
    EmptyHandSet,
}

/// Gesture families; each has its own dwell/timeout pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Family {
    Point,
    Palm,
    Pinch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Timing {
    pub dwell_ms: u64,
    pub timeout_ms: u64,
}

impl Default for Timing {
    fn default() -> Self {
        Self {
            dwell_ms: 200,
            timeout_ms: 400,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GestureConfig {
    pub point: Timing,
    pub palm: Timing,
    pub pinch: Timing,
    pub pinch_on_dist: f64,
    pub pinch_off_dist: f64,
    pub dominant_hand: Handedness,
}

impl Default for GestureConfig {
    fn default() -> Self {
        Self {
            point: Timing::default(),
            palm: Timing::default(),
            pinch: Timing::default(),
            pinch_on_dist: 0.05,
            pinch_off_dist: 0.08,
            dominant_hand: Handedness::Right,
        }
    }
}

impl GestureConfig {
    /// Same dwell and timeout for every family.
    pub fn uniform(dwell_ms: u64, timeout_ms: u64) -> Self {
        let t = Timing {
            dwell_ms,
            timeout_ms,
        };
        Self {
            point: t,
            palm: t,
            pinch: t,
            ..Self::default()
        }
    }

    pub fn timing(&self, family: Family) -> Timing {
        match family {
            Family::Point => self.point,
            Family::Palm => self.palm,
            Family::Pinch => self.pinch,
        }
    }

    pub fn validate(&self) -> Result<(), GestureError> {
        let range = MIN_DURATION_MS..=MAX_DURATION_MS;
        for family in [Family::Point, Family::Palm, Family::Pinch] {
            let t = self.timing(family);
            for (what, value) in [("dwell", t.dwell_ms), ("timeout", t.timeout_ms)] {
                if !range.contains(&value) {
                    return Err(GestureError::DurationOutOfRange {
                        family,
                        what,
                        value,
                    });
                }
            }
        }
        let (on, off) = (self.pinch_on_dist, self.pinch_off_dist);
        if !(on.is_finite() && off.is_finite() && on > 0.0 && off > on) {
            return Err(GestureError::PinchHysteresis { on, off });
        }
        Ok(())
    }

    pub fn validated(self) -> Result<Self, GestureError> {
        self.validate().map(|()| self)
    }
}

/// Partial update carried by `config` wire messages. `dwell_ms` and
/// `timeout_ms` apply to every family before per-family overrides.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GestureConfigPatch {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dwell_ms: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timeout_ms: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<Timing>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub palm: Option<Timing>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pinch: Option<Timing>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pinch_on_dist: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pinch_off_dist: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dominant_hand: Option<Handedness>,
}

impl GestureConfigPatch {
    pub fn apply(&self, base: &GestureConfig) -> Result<GestureConfig, GestureError> {
        let mut cfg = *base;
        for timing in [&mut cfg.point, &mut cfg.palm, &mut cfg.pinch] {
            if let Some(d) = self.dwell_ms {
                timing.dwell_ms = d;
            }
            if let Some(t) = self.timeout_ms {
                timing.timeout_ms = t;
            }
        }
        if let Some(t) = self.point {
            cfg.point = t;
        }
        if let Some(t) = self.palm {
            cfg.palm = t;
        }
        if let Some(t) = self.pinch {
            cfg.pinch = t;
        }
        if let Some(v) = self.pinch_on_dist {
            cfg.pinch_on_dist = v;
        }
        if let Some(v) = self.pinch_off_dist {
            cfg.pinch_off_dist = v;
        }
        if let Some(h) = self.dominant_hand {
            cfg.dominant_hand = h;
        }
        cfg.validated()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GestureKind {
    PointEnter,
    PointMove,
    PointLeave,
    PalmEnter,
    PalmMove,
    PalmLeave,
    PinchStart,
    PinchMove,
    PinchEnd,
}

impl GestureKind {
    pub fn family(self) -> Family {
        use GestureKind::*;
        match self {
            PointEnter | PointMove | PointLeave => Family::Point,
            PalmEnter | PalmMove | PalmLeave => Family::Palm,
            PinchStart | PinchMove | PinchEnd => Family::Pinch,
        }
    }

    pub fn lifecycle(self) -> Lifecycle {
        use GestureKind::*;
        match self {
            PointEnter | PalmEnter | PinchStart => Lifecycle::Start,
            PointMove | PalmMove | PinchMove => Lifecycle::Continue,
            PointLeave | PalmLeave | PinchEnd => Lifecycle::End,
        }
    }

    pub fn of(family: Family, lifecycle: Lifecycle) -> Self {
        use GestureKind::*;
        match (family, lifecycle) {
            (Family::Point, Lifecycle::Start) => PointEnter,
            (Family::Point, Lifecycle::Continue) => PointMove,
            (Family::Point, Lifecycle::End) => PointLeave,
            (Family::Palm, Lifecycle::Start) => PalmEnter,
            (Family::Palm, Lifecycle::Continue) => PalmMove,
            (Family::Palm, Lifecycle::End) => PalmLeave,
            (Family::Pinch, Lifecycle::Start) => PinchStart,
            (Family::Pinch, Lifecycle::Continue) => PinchMove,
            (Family::Pinch, Lifecycle::End) => PinchEnd,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Lifecycle {
    Start,
    Continue,
    End,
}

/// One debounced event. Field order matches the golden event-log format.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GestureEvent {
    pub t_ms: u64,
    pub hand: Handedness,
    pub kind: GestureKind,
    pub pos: Point2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(tag = "phase")]
pub enum Presence {
    #[default]
    Absent,
    Candidate {
        since_ms: u64,
    },
    Present,
    Lapsed {
        since_ms: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(tag = "phase")]
pub enum PinchPhase {
    #[default]
    Idle,
    Candidate {
        since_ms: u64,
    },
    Active,
    /// Open beyond the off threshold, not yet for a full dwell.
    Releasing {
        since_ms: u64,
    },
    Lapsed {
        since_ms: u64,
    },
}

impl PinchPhase {
    /// True between `PinchStart` and `PinchEnd`.
    pub fn is_engaged(self) -> bool {
        matches!(
            self,
            PinchPhase::Active | PinchPhase::Releasing { .. } | PinchPhase::Lapsed { .. }
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LastPositions {
    pub index: Point2,
    pub thumb: Point2,
    pub palm: Point2,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct HandState {
    pub point: Presence,
    pub palm: Presence,
    pub pinch: PinchPhase,
    pub last: LastPositions,
}

/// Advances a presence machine by one frame.
pub fn step_presence(
    phase: Presence,
    detected: bool,
    timing: Timing,
    t_ms: u64,
) -> (Presence, Option<Lifecycle>) {
    let elapsed = |since: u64| t_ms.saturating_sub(since);
    match (phase, detected) {
        (Presence::Absent, false) => (Presence::Absent, None),
        (Presence::Absent, true) => (Presence::Candidate { since_ms: t_ms }, None),
        (Presence::Candidate { since_ms }, true) => {
            if elapsed(since_ms) >= timing.dwell_ms {
                (Presence::Present, Some(Lifecycle::Start))
            } else {
                (phase, None)
            }
        }
        (Presence::Candidate { .. }, false) => (Presence::Absent, None),
        (Presence::Present, true) => (Presence::Present, Some(Lifecycle::Continue)),
        (Presence::Present, false) => (Presence::Lapsed { since_ms: t_ms }, None),
        (Presence::Lapsed { since_ms }, true) => {
            if elapsed(since_ms) < timing.timeout_ms {
                (Presence::Present, Some(Lifecycle::Continue))
            } else {
                (Presence::Candidate { since_ms: t_ms }, Some(Lifecycle::End))
            }
        }
        (Presence::Lapsed { since_ms }, false) => {
            if elapsed(since_ms) >= timing.timeout_ms {
                (Presence::Absent, Some(Lifecycle::End))
            } else {
                (phase, None)
            }
        }
    }
}

/// Advances the pinch machine by one frame. `hand` is `None` when the hand
/// is not detected in this frame.
pub fn detect_pinch(
    hand: Option<&HandObservation>,
    prior: PinchPhase,
    cfg: &GestureConfig,
    t_ms: u64,
) -> (PinchPhase, Option<Lifecycle>) {
    let timing = cfg.pinch;
    let elapsed = |since: u64| t_ms.saturating_sub(since);
    let dist = hand.map(HandObservation::pinch_distance);
    let closed = |d: f64| d < cfg.pinch_on_dist;
    let open = |d: f64| d > cfg.pinch_off_dist;

    match (prior, dist) {
        (PinchPhase::Idle, Some(d)) if closed(d) => {
            (PinchPhase::Candidate { since_ms: t_ms }, None)
        }
        (PinchPhase::Idle, _) => (PinchPhase::Idle, None),
        (PinchPhase::Candidate { since_ms }, Some(d)) if closed(d) => {
            if elapsed(since_ms) >= timing.dwell_ms {
                (PinchPhase::Active, Some(Lifecycle::Start))
            } else {
                (prior, None)
            }
        }
        (PinchPhase::Candidate { .. }, _) => (PinchPhase::Idle, None),
        (PinchPhase::Active | PinchPhase::Releasing { .. }, None) => {
            (PinchPhase::Lapsed { since_ms: t_ms }, None)
        }
        (PinchPhase::Active, Some(d)) if open(d) => (
            PinchPhase::Releasing { since_ms: t_ms },
            Some(Lifecycle::Continue),
        ),
        (PinchPhase::Active, Some(_)) => (PinchPhase::Active, Some(Lifecycle::Continue)),
        (PinchPhase::Releasing { since_ms }, Some(d)) if open(d) => {
            if elapsed(since_ms) >= timing.dwell_ms {
                (PinchPhase::Idle, Some(Lifecycle::End))
            } else {
                (prior, Some(Lifecycle::Continue))
            }
        }
        (PinchPhase::Releasing { .. }, Some(_)) => (PinchPhase::Active, Some(Lifecycle::Continue)),
        (PinchPhase::Lapsed { since_ms }, None) => {
            if elapsed(since_ms) >= timing.timeout_ms {
                (PinchPhase::Idle, Some(Lifecycle::End))
            } else {
                (prior, None)
            }
        }
        (PinchPhase::Lapsed { since_ms }, Some(d)) => {
            if elapsed(since_ms) >= timing.timeout_ms {
                let next = if closed(d) {
                    PinchPhase::Candidate { since_ms: t_ms }
                } else {
                    PinchPhase::Idle
                };
                (next, Some(Lifecycle::End))
            } else if open(d) {
                (
                    PinchPhase::Releasing { since_ms: t_ms },
                    Some(Lifecycle::Continue),
                )
            } else {
                (PinchPhase::Active, Some(Lifecycle::Continue))
            }
        }
    }
}

/// Picks the hand that takes precedence for single-handed interactions.
pub fn dominant<I>(hands: I, cfg: &GestureConfig) -> Result<Handedness, GestureError>
where
    I: IntoIterator<Item = Handedness>,
{
    let mut seen = [false; 2];
    for h in hands {
        seen[h.slot()] = true;
    }
    let preferred = cfg.dominant_hand;
    if seen[preferred.slot()] {
        Ok(preferred)
    } else if seen[preferred.other().slot()] {
        Ok(preferred.other())
    } else {
        Err(GestureError::EmptyHandSet)
    }
}

/// Per-session gesture state for both hands.
#[derive(Debug, Clone)]
pub struct GestureRuntime {
    config: GestureConfig,
    hands: [HandState; 2],
}

impl GestureRuntime {
    pub fn new(config: GestureConfig) -> Result<Self, GestureError> {
        config.validate()?;
        Ok(Self {
            config,
            hands: [HandState::default(); 2],
        })
    }

    pub fn config(&self) -> &GestureConfig {
        &self.config
    }

    pub fn set_config(&mut self, config: GestureConfig) -> Result<(), GestureError> {
        config.validate()?;
        self.config = config;
        Ok(())
    }

    pub fn hand(&self, hand: Handedness) -> &HandState {
        &self.hands[hand.slot()]
    }

    /// Processes one accepted frame. Events come out in canonical order:
    /// terminations first, then right hand before left, then
    /// point/palm/pinch.
    pub fn step(&mut self, frame: &LandmarkFrame) -> Vec<GestureEvent> {
        let t = frame.t_ms;
        let mut events = Vec::new();
        for handedness in Handedness::ALL {
            let obs = frame.hand(handedness);
            let cfg = self.config;
            let state = &mut self.hands[handedness.slot()];
            if let Some(o) = obs {
                state.last = LastPositions {
                    index: o.index_tip,
                    thumb: o.thumb_tip,
                    palm: o.palm_centroid,
                };
            }

            let (point, ev) = step_presence(state.point, obs.is_some(), cfg.point, t);
            state.point = point;
            if let Some(lc) = ev {
                events.push(event(t, handedness, Family::Point, lc, state.last.index));
            }

            let (palm, ev) = step_presence(state.palm, obs.is_some(), cfg.palm, t);
            state.palm = palm;
            if let Some(lc) = ev {
                events.push(event(t, handedness, Family::Palm, lc, state.last.palm));
            }

            let (pinch, ev) = detect_pinch(obs, state.pinch, &cfg, t);
            state.pinch = pinch;
            if let Some(lc) = ev {
                events.push(event(t, handedness, Family::Pinch, lc, state.last.index));
            }
        }
        events.sort_by_key(|e| {
            let not_end = e.kind.lifecycle() != Lifecycle::End;
            (not_end, e.hand, e.kind.family())
        });
        events
    }
}

fn event(t_ms: u64, hand: Handedness, family: Family, lc: Lifecycle, pos: Point2) -> GestureEvent {
    GestureEvent {
        t_ms,
        hand,
        kind: GestureKind::of(family, lc),
        pos,
    }
}
