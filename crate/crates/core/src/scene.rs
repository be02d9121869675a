//! Keyboard-driven scene navigation and transition planning.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::chart::geometry::Rect;
use crate::chart::spec::{Direction, TransitionStyle};
use crate::chart::ResolvedScene;

pub const DEFAULT_TRANSITION_MS: u64 = 500;

/// Navigation command. Wire form: `"next"`, `"prev"`, `"goto:<n>"` with a
/// zero-based scene index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NavCommand {
    Next,
    Prev,
    Goto(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown navigation command {0:?}")]
pub struct ParseNavError(pub String);

impl FromStr for NavCommand {
    type Err = ParseNavError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "next" => Ok(NavCommand::Next),
            "prev" => Ok(NavCommand::Prev),
            _ => s
                .strip_prefix("goto:")
                .and_then(|n| n.parse().ok())
                .map(NavCommand::Goto)
                .ok_or_else(|| ParseNavError(s.to_owned())),
        }
    }
}

impl fmt::Display for NavCommand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NavCommand::Next => f.write_str("next"),
            NavCommand::Prev => f.write_str("prev"),
            NavCommand::Goto(n) => write!(f, "goto:{n}"),
        }
    }
}

impl Serialize for NavCommand {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for NavCommand {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Resolves a command against the current index of an `len`-scene deck.
/// Out-of-range targets are clamped; the flag reports whether clamping
/// happened.
pub fn target_index(cmd: NavCommand, current: usize, len: usize) -> (usize, bool) {
    let last = len.saturating_sub(1);
    match cmd {
        NavCommand::Next => {
            let want = current + 1;
            (want.min(last), want > last)
        }
        NavCommand::Prev => (current.saturating_sub(1), current == 0),
        NavCommand::Goto(n) => (n.min(last), n > last),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StyledOverlay {
    pub overlay_id: String,
    pub style: TransitionStyle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Morph {
    pub overlay_id: String,
    pub from: Rect,
    pub to: Rect,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionPlan {
    pub exits: Vec<StyledOverlay>,
    pub enters: Vec<StyledOverlay>,
    pub morphs: Vec<Morph>,
    pub duration_ms: u64,
}

impl TransitionPlan {
    pub fn is_empty(&self) -> bool {
        self.exits.is_empty() && self.enters.is_empty() && self.morphs.is_empty()
    }
}

/// Plans the animation from `from` to `to`. Overlays are matched by id;
/// shared overlays whose frames are unchanged need no morph, so a scene
/// planned against itself yields an empty plan.
pub fn plan_transition(from: &ResolvedScene, to: &ResolvedScene, duration_ms: u64) -> TransitionPlan {
    let exits = from
        .overlays
        .iter()
        .filter(|o| to.overlay(&o.id).is_none())
        .map(|o| StyledOverlay {
            overlay_id: o.id.clone(),
            style: o.exit.unwrap_or(TransitionStyle::Translate(Direction::Left)),
        })
        .collect();
    let enters = to
        .overlays
        .iter()
        .filter(|o| from.overlay(&o.id).is_none())
        .map(|o| StyledOverlay {
            overlay_id: o.id.clone(),
            style: o.enter.unwrap_or(TransitionStyle::Translate(Direction::Right)),
        })
        .collect();
    let morphs = to
        .overlays
        .iter()
        .filter_map(|o| {
            let prev = from.overlay(&o.id)?;
            (prev.frame != o.frame).then(|| Morph {
                overlay_id: o.id.clone(),
                from: prev.frame,
                to: o.frame,
            })
        })
        .collect();
    TransitionPlan {
        exits,
        enters,
        morphs,
        duration_ms,
    }
}

/// A scene change in flight on the virtual clock.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneTransition {
    pub from_scene: String,
    pub to_scene: String,
    pub start_ms: u64,
    pub plan: TransitionPlan,
}

impl SceneTransition {
    pub fn end_ms(&self) -> u64 {
        self.start_ms + self.plan.duration_ms
    }

    /// Linear progress in `[0, 1]` at virtual time `t_ms`.
    pub fn progress(&self, t_ms: u64) -> f64 {
        if self.plan.duration_ms == 0 {
            return 1.0;
        }
        let elapsed = t_ms.saturating_sub(self.start_ms) as f64;
        (elapsed / self.plan.duration_ms as f64).min(1.0)
    }

    pub fn is_running(&self, t_ms: u64) -> bool {
        t_ms < self.end_ms()
    }
}
