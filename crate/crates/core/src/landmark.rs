//! Landmark ingestion.
//!
//! Raw hand-landmark payloads arrive from the client-side landmark provider.
//! This module validates them into [`LandmarkFrame`]s on the virtual clock:
//! coordinates are clamped into the unit square, low-confidence hands are
//! filtered, and out-of-order timestamps are rejected. The engine never
//! holds more than one pending frame; newer arrivals displace older ones.

use std::sync::{Condvar, Mutex};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default confidence below which a hand observation is discarded.
pub const DEFAULT_MIN_CONFIDENCE: f64 = 0.5;

/// A position in normalized screen space: `[0,1]²`, origin top-left.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn clamped(self) -> Self {
        Self {
            x: self.x.clamp(0.0, 1.0),
            y: self.y.clamp(0.0, 1.0),
        }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn distance(self, other: Point2) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn mirrored(self) -> Self {
        Self {
            x: 1.0 - self.x,
            y: self.y,
        }
    }
}

impl From<[f64; 2]> for Point2 {
    fn from([x, y]: [f64; 2]) -> Self {
        Self { x, y }
    }
}

impl From<Point2> for [f64; 2] {
    fn from(p: Point2) -> Self {
        [p.x, p.y]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Handedness {
    Right,
    Left,
}

impl Handedness {
    /// Canonical iteration order: right hand first.
    pub const ALL: [Handedness; 2] = [Handedness::Right, Handedness::Left];

    pub fn other(self) -> Self {
        match self {
            Handedness::Right => Handedness::Left,
            Handedness::Left => Handedness::Right,
        }
    }

    pub(crate) fn slot(self) -> usize {
        match self {
            Handedness::Right => 0,
            Handedness::Left => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HandObservation {
    pub handedness: Handedness,
    pub index_tip: Point2,
    pub thumb_tip: Point2,
    pub palm_centroid: Point2,
    pub confidence: f64,
}

impl HandObservation {
    pub fn pinch_distance(&self) -> f64 {
        self.index_tip.distance(self.thumb_tip)
    }

    fn mirrored(mut self) -> Self {
        self.index_tip = self.index_tip.mirrored();
        self.thumb_tip = self.thumb_tip.mirrored();
        self.palm_centroid = self.palm_centroid.mirrored();
        self
    }
}

/// One validated observation of zero, one or two hands.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct LandmarkFrame {
    pub t_ms: u64,
    pub hands: Vec<HandObservation>,
}

impl LandmarkFrame {
    pub fn hand(&self, handedness: Handedness) -> Option<&HandObservation> {
        self.hands.iter().find(|h| h.handedness == handedness)
    }
}

/// Provider payload for one hand, as found in traces and `frame` messages.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawHand {
    pub handedness: Handedness,
    pub index: [f64; 2],
    pub thumb: [f64; 2],
    pub palm: [f64; 2],
    pub conf: f64,
}

/// Provider payload for one frame.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RawFrame {
    pub t_ms: u64,
    #[serde(default)]
    pub hands: Vec<RawHand>,
}

impl From<&LandmarkFrame> for RawFrame {
    fn from(frame: &LandmarkFrame) -> Self {
        RawFrame {
            t_ms: frame.t_ms,
            hands: frame
                .hands
                .iter()
                .map(|h| RawHand {
                    handedness: h.handedness,
                    index: h.index_tip.into(),
                    thumb: h.thumb_tip.into(),
                    palm: h.palm_centroid.into(),
                    conf: h.confidence,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IngestError {
    #[error("timestamp {t_ms} ms is earlier than last accepted {last_ms} ms")]
    NonMonotonicTimestamp { t_ms: u64, last_ms: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IngestConfig {
    #[serde(default = "default_min_confidence")]
    pub min_confidence: f64,
    #[serde(default)]
    pub mirror: bool,
}

fn default_min_confidence() -> f64 {
    DEFAULT_MIN_CONFIDENCE
}

impl Default for IngestConfig {
    fn default() -> Self {
        Self {
            min_confidence: DEFAULT_MIN_CONFIDENCE,
            mirror: false,
        }
    }
}

/// Result of offering a raw frame to the [`Ingestor`].
#[derive(Debug, Clone, PartialEq)]
pub enum Ingest {
    /// The engine was idle: the frame goes straight to processing.
    Accepted(LandmarkFrame),
    /// The engine is busy: the frame waits in the single slot. `displaced`
    /// is the timestamp of the earlier parked frame it replaced, if any.
    Parked { displaced: Option<u64> },
}

/// Single-writer ingestion state: validation plus the one-frame-in-flight
/// contract. Call [`Ingestor::finish`] once the accepted frame has been
/// fully processed.
#[derive(Debug, Clone, Default)]
pub struct Ingestor {
    config: IngestConfig,
    last_t: Option<u64>,
    busy: bool,
    parked: Option<LandmarkFrame>,
    dropped: u64,
}

impl Ingestor {
    pub fn new(config: IngestConfig) -> Self {
        Self {
            config,
            ..Self::default()
        }
    }

    pub fn config(&self) -> &IngestConfig {
        &self.config
    }

    /// Number of frames displaced from the slot so far.
    pub fn dropped(&self) -> u64 {
        self.dropped
    }

    pub fn is_busy(&self) -> bool {
        self.busy
    }

    pub fn ingest(&mut self, raw: &RawFrame) -> Result<Ingest, IngestError> {
        let frame = self.validate(raw)?;
        if !self.busy {
            self.busy = true;
            return Ok(Ingest::Accepted(frame));
        }
        let displaced = self.parked.replace(frame).map(|f| f.t_ms);
        if displaced.is_some() {
            self.dropped += 1;
        }
        Ok(Ingest::Parked { displaced })
    }

    /// Marks the in-flight frame as done and hands back the parked frame,
    /// which then becomes the new in-flight frame.
    pub fn finish(&mut self) -> Option<LandmarkFrame> {
        let next = self.parked.take();
        self.busy = next.is_some();
        next
    }

    /// Checks ordering and normalizes a raw payload without touching the
    /// in-flight slot.
    pub fn validate(&mut self, raw: &RawFrame) -> Result<LandmarkFrame, IngestError> {
        if let Some(last_ms) = self.last_t {
            if raw.t_ms < last_ms {
                return Err(IngestError::NonMonotonicTimestamp {
                    t_ms: raw.t_ms,
                    last_ms,
                });
            }
        }
        self.last_t = Some(raw.t_ms);
        let frame = normalize(raw, self.config.min_confidence);
        Ok(mirror(frame, self.config.mirror))
    }
}

/// Clamps coordinates, drops low-confidence or non-finite hands, and keeps
/// at most one observation per handedness (the most confident one, first
/// wins on ties).
pub fn normalize(raw: &RawFrame, min_confidence: f64) -> LandmarkFrame {
    let mut best: [Option<HandObservation>; 2] = [None, None];
    for hand in &raw.hands {
        let index_tip = Point2::from(hand.index);
        let thumb_tip = Point2::from(hand.thumb);
        let palm_centroid = Point2::from(hand.palm);
        if !(index_tip.is_finite() && thumb_tip.is_finite() && palm_centroid.is_finite()) {
            continue;
        }
        if !hand.conf.is_finite() || hand.conf < min_confidence {
            continue;
        }
        let obs = HandObservation {
            handedness: hand.handedness,
            index_tip: index_tip.clamped(),
            thumb_tip: thumb_tip.clamped(),
            palm_centroid: palm_centroid.clamped(),
            confidence: hand.conf.clamp(0.0, 1.0),
        };
        let slot = &mut best[hand.handedness.slot()];
        match slot {
            Some(existing) if existing.confidence >= obs.confidence => {}
            _ => *slot = Some(obs),
        }
    }
    LandmarkFrame {
        t_ms: raw.t_ms,
        hands: best.into_iter().flatten().collect(),
    }
}

/// Reflects every point horizontally when `enabled`.
pub fn mirror(frame: LandmarkFrame, enabled: bool) -> LandmarkFrame {
    if !enabled {
        return frame;
    }
    LandmarkFrame {
        t_ms: frame.t_ms,
        hands: frame.hands.into_iter().map(HandObservation::mirrored).collect(),
    }
}

/// Thread-safe single-slot handoff: producers never block, and a new value
/// replaces whatever the consumer has not yet taken.
#[derive(Debug, Default)]
pub struct FrameSlot<T> {
    slot: Mutex<Option<T>>,
    ready: Condvar,
}

impl<T> FrameSlot<T> {
    pub fn new() -> Self {
        Self {
            slot: Mutex::new(None),
            ready: Condvar::new(),
        }
    }

    /// Stores `value`, returning the displaced one if the consumer was slow.
    pub fn put(&self, value: T) -> Option<T> {
        let displaced = self.slot.lock().unwrap().replace(value);
        self.ready.notify_one();
        displaced
    }

    pub fn take(&self) -> Option<T> {
        self.slot.lock().unwrap().take()
    }

    pub fn take_timeout(&self, timeout: Duration) -> Option<T> {
        let guard = self.slot.lock().unwrap();
        let (mut guard, _) = self
            .ready
            .wait_timeout_while(guard, timeout, |v| v.is_none())
            .unwrap();
        guard.take()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn raw(t_ms: u64, hands: Vec<RawHand>) -> RawFrame {
        RawFrame { t_ms, hands }
    }

    fn right(x: f64, y: f64, conf: f64) -> RawHand {
        RawHand {
            handedness: Handedness::Right,
            index: [x, y],
            thumb: [x + 0.1, y],
            palm: [x, y + 0.1],
            conf,
        }
    }

    #[test]
    fn passes_through_valid_hand() {
        let mut ing = Ingestor::default();
        let out = ing.ingest(&raw(100, vec![right(0.5, 0.5, 0.9)])).unwrap();
        let Ingest::Accepted(frame) = out else {
            panic!("expected accepted frame");
        };
        assert_eq!(frame.t_ms, 100);
        assert_eq!(frame.hands.len(), 1);
        assert_eq!(frame.hands[0].handedness, Handedness::Right);
        assert_eq!(frame.hands[0].index_tip, Point2::new(0.5, 0.5));
    }

    #[test]
    fn clamps_out_of_range_coordinates() {
        let frame = normalize(&raw(0, vec![right(1.3, -0.2, 0.9)]), 0.5);
        assert_eq!(frame.hands[0].index_tip, Point2::new(1.0, 0.0));
    }

    #[test]
    fn filters_low_confidence() {
        let frame = normalize(&raw(0, vec![right(0.5, 0.5, 0.49)]), 0.5);
        assert!(frame.hands.is_empty());
        let frame = normalize(&raw(0, vec![right(0.5, 0.5, 0.5)]), 0.5);
        assert_eq!(frame.hands.len(), 1);
    }

    #[test]
    fn keeps_one_hand_per_handedness() {
        let frame = normalize(&raw(0, vec![right(0.1, 0.1, 0.6), right(0.2, 0.2, 0.8)]), 0.5);
        assert_eq!(frame.hands.len(), 1);
        assert_eq!(frame.hands[0].index_tip.x, 0.2);
    }

    #[test]
    fn rejects_time_travel() {
        let mut ing = Ingestor::default();
        ing.validate(&raw(100, vec![])).unwrap();
        ing.validate(&raw(100, vec![])).unwrap();
        let err = ing.validate(&raw(99, vec![])).unwrap_err();
        assert_eq!(
            err,
            IngestError::NonMonotonicTimestamp {
                t_ms: 99,
                last_ms: 100
            }
        );
        // the session continues
        assert!(ing.validate(&raw(101, vec![])).is_ok());
    }

    /// Reference single-slot mailbox, scripted independently of `Ingestor`.
    fn mailbox_oracle(schedule: &[(u64, bool)]) -> Vec<u64> {
        // (t, completes_before) - if completes_before, the in-flight frame
        // finishes just before this arrival.
        let mut processed = Vec::new();
        let mut in_flight: Option<u64> = None;
        let mut slot: Option<u64> = None;
        for &(t, completes) in schedule {
            if completes && in_flight.is_some() {
                in_flight = slot.take();
                if let Some(next) = in_flight {
                    processed.push(next);
                }
            }
            if in_flight.is_none() {
                in_flight = Some(t);
                processed.push(t);
            } else {
                slot = Some(t);
            }
        }
        if in_flight.is_some() {
            if let Some(next) = slot.take() {
                processed.push(next);
            }
        }
        processed
    }

    #[test]
    fn burst_during_processing_keeps_newest() {
        let mut ing = Ingestor::default();
        let a = ing.ingest(&raw(0, vec![])).unwrap();
        assert!(matches!(a, Ingest::Accepted(_)));
        let b = ing.ingest(&raw(10, vec![])).unwrap();
        assert_eq!(b, Ingest::Parked { displaced: None });
        let c = ing.ingest(&raw(20, vec![])).unwrap();
        assert_eq!(c, Ingest::Parked { displaced: Some(10) });
        assert_eq!(ing.dropped(), 1);
        let next = ing.finish().unwrap();
        assert_eq!(next.t_ms, 20);
        assert!(ing.finish().is_none());
        assert!(!ing.is_busy());

        let expected = mailbox_oracle(&[(0, false), (10, false), (20, false)]);
        assert_eq!(expected, vec![0, 20]);
    }

    #[test]
    fn scripted_schedule_matches_mailbox_oracle() {
        let schedule = [
            (0, false),
            (5, false),
            (9, false),
            (12, true),
            (14, false),
            (30, true),
            (31, true),
            (40, false),
            (41, false),
            (42, false),
        ];
        let mut ing = Ingestor::default();
        let mut processed = Vec::new();
        for &(t, completes) in &schedule {
            if completes && ing.is_busy() {
                if let Some(f) = ing.finish() {
                    processed.push(f.t_ms);
                }
            }
            if let Ingest::Accepted(f) = ing.ingest(&raw(t, vec![])).unwrap() {
                processed.push(f.t_ms);
            }
        }
        if let Some(f) = ing.finish() {
            processed.push(f.t_ms);
        }
        assert_eq!(processed, mailbox_oracle(&schedule));
    }

    #[test]
    fn mirror_reflects_and_is_involution() {
        let frame = normalize(&raw(0, vec![right(0.2, 0.7, 0.9)]), 0.5);
        let m = mirror(frame.clone(), true);
        assert!((m.hands[0].index_tip.x - 0.8).abs() < 1e-12);
        assert_eq!(m.hands[0].index_tip.y, 0.7);
        let back = mirror(m, true);
        for (a, b) in back.hands.iter().zip(&frame.hands) {
            assert!(a.index_tip.distance(b.index_tip) < 1e-12);
            assert!(a.palm_centroid.distance(b.palm_centroid) < 1e-12);
        }
        let centered = normalize(&raw(0, vec![right(0.5, 0.3, 0.9)]), 0.5);
        assert_eq!(mirror(centered.clone(), true).hands[0].index_tip, centered.hands[0].index_tip);
        assert_eq!(mirror(frame.clone(), false), frame);
    }

    #[test]
    fn frame_slot_latest_wins() {
        let slot = FrameSlot::new();
        assert_eq!(slot.put(1), None);
        assert_eq!(slot.put(2), Some(1));
        assert_eq!(slot.take(), Some(2));
        assert_eq!(slot.take(), None);
        assert_eq!(slot.take_timeout(Duration::from_millis(1)), None);
    }
}
