//! Synthesis of landmark traces from scripted hand motion.
//!
//! Used to build the regression corpus and by property tests. A scripted
//! hand is an index-tip position plus an open/closed pinch flag; thumb and
//! palm are derived from it so that the pinch distance sits well clear of
//! the default hysteresis band.

use crate::chart::ResolvedOverlay;
use crate::gesture::GestureConfigPatch;
use crate::landmark::{Handedness, RawFrame, RawHand};
use crate::scene::NavCommand;
use crate::trace::{Record, Trace, TraceHeader};

/// Default frame period (about 30 fps).
pub const FRAME_MS: u64 = 33;
/// Index-to-thumb distance of an open hand.
pub const OPEN_GAP: f64 = 0.12;
/// Index-to-thumb distance of a pinching hand.
pub const CLOSED_GAP: f64 = 0.02;
/// Palm centroid offset below the index tip.
pub const PALM_DROP: f64 = 0.08;
pub const CONFIDENCE: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq)]
struct Pose {
    x: f64,
    y: f64,
    pinched: bool,
}

impl Pose {
    fn raw(&self, handedness: Handedness) -> RawHand {
        let gap = if self.pinched { CLOSED_GAP } else { OPEN_GAP };
        // the thumb sits on the side facing the screen center
        let dir = if self.x <= 0.5 { 1.0 } else { -1.0 };
        RawHand {
            handedness,
            index: [self.x, self.y],
            thumb: [self.x + dir * gap, self.y],
            palm: [self.x, self.y + PALM_DROP],
            conf: CONFIDENCE,
        }
    }
}

/// Builds a trace frame by frame on a virtual clock.
#[derive(Debug, Clone)]
pub struct TraceBuilder {
    t_ms: u64,
    frame_ms: u64,
    hands: [Option<Pose>; 2],
    header: Option<TraceHeader>,
    records: Vec<Record>,
}

impl Default for TraceBuilder {
    fn default() -> Self {
        Self::new()
    }
}

impl TraceBuilder {
    pub fn new() -> Self {
        Self::with_frame_ms(FRAME_MS)
    }

    pub fn with_frame_ms(frame_ms: u64) -> Self {
        assert!(frame_ms > 0, "frame period must be positive");
        Self {
            t_ms: 0,
            frame_ms,
            hands: [None, None],
            header: None,
            records: Vec::new(),
        }
    }

    pub fn header(mut self, header: TraceHeader) -> Self {
        self.header = Some(header);
        self
    }

    /// Timestamp the next frame will carry.
    pub fn now(&self) -> u64 {
        self.t_ms
    }

    pub fn frame_ms(&self) -> u64 {
        self.frame_ms
    }

    /// Places (or moves) a hand without emitting a frame. The pinch flag
    /// is kept when the hand is already present.
    pub fn place(&mut self, hand: Handedness, x: f64, y: f64) -> &mut Self {
        let pinched = self.hands[hand.slot()].is_some_and(|p| p.pinched);
        self.hands[hand.slot()] = Some(Pose { x, y, pinched });
        self
    }

    pub fn set_pinch(&mut self, hand: Handedness, pinched: bool) -> &mut Self {
        if let Some(p) = &mut self.hands[hand.slot()] {
            p.pinched = pinched;
        }
        self
    }

    pub fn remove(&mut self, hand: Handedness) -> &mut Self {
        self.hands[hand.slot()] = None;
        self
    }

    pub fn position(&self, hand: Handedness) -> Option<(f64, f64)> {
        self.hands[hand.slot()].map(|p| (p.x, p.y))
    }

    /// Emits one frame with the current poses and advances the clock.
    pub fn frame(&mut self) -> &mut Self {
        let hands = Handedness::ALL
            .iter()
            .filter_map(|&h| self.hands[h.slot()].map(|p| p.raw(h)))
            .collect();
        self.records.push(Record::Frame(RawFrame {
            t_ms: self.t_ms,
            hands,
        }));
        self.t_ms += self.frame_ms;
        self
    }

    /// Emits frames covering `ms` milliseconds with poses unchanged.
    pub fn hold(&mut self, ms: u64) -> &mut Self {
        let end = self.t_ms + ms;
        while self.t_ms < end {
            self.frame();
        }
        self
    }

    /// Moves `hand` linearly to `(x, y)` over `ms`, one frame per period;
    /// the last frame lands exactly on the target.
    pub fn move_to(&mut self, hand: Handedness, x: f64, y: f64, ms: u64) -> &mut Self {
        let Some(start) = self.hands[hand.slot()] else {
            return self.place(hand, x, y).hold(ms);
        };
        let n = (ms / self.frame_ms).max(1);
        for i in 1..=n {
            let f = i as f64 / n as f64;
            self.place(hand, start.x + (x - start.x) * f, start.y + (y - start.y) * f);
            self.frame();
        }
        self
    }

    /// Moves both hands at once, each to its own target.
    pub fn move_both(&mut self, right: (f64, f64), left: (f64, f64), ms: u64) -> &mut Self {
        let from = |h: Handedness, to: (f64, f64)| self.position(h).unwrap_or(to);
        let (r0, l0) = (from(Handedness::Right, right), from(Handedness::Left, left));
        let n = (ms / self.frame_ms).max(1);
        for i in 1..=n {
            let f = i as f64 / n as f64;
            let lerp = |a: (f64, f64), b: (f64, f64)| (a.0 + (b.0 - a.0) * f, a.1 + (b.1 - a.1) * f);
            let (r, l) = (lerp(r0, right), lerp(l0, left));
            self.place(Handedness::Right, r.0, r.1);
            self.place(Handedness::Left, l.0, l.1);
            self.frame();
        }
        self
    }

    /// Advances the clock by `ms` without emitting anything, as if the
    /// provider lost track of every hand.
    pub fn gap(&mut self, ms: u64) -> &mut Self {
        self.t_ms += ms;
        self
    }

    /// Emits an empty frame followed by `ms` of silence.
    pub fn dropout(&mut self, ms: u64) -> &mut Self {
        let saved = self.hands;
        self.hands = [None, None];
        self.frame();
        self.hands = saved;
        self.gap(ms.saturating_sub(self.frame_ms));
        self
    }

    pub fn key(&mut self, key: NavCommand) -> &mut Self {
        self.records.push(Record::Key { t_ms: self.t_ms, key });
        self
    }

    pub fn config(&mut self, patch: GestureConfigPatch) -> &mut Self {
        self.records.push(Record::Config {
            t_ms: self.t_ms,
            config: patch,
        });
        self
    }

    /// Appends an arbitrary record; its timestamp must not precede the
    /// last one.
    pub fn push(&mut self, record: Record) -> &mut Self {
        self.t_ms = self.t_ms.max(record.t_ms());
        self.records.push(record);
        self
    }

    pub fn build(&self) -> Trace {
        Trace {
            header: self.header.clone(),
            records: self.records.clone(),
        }
    }
}

/// Screen point at fractions of an overlay's frame.
pub fn in_frame(o: &ResolvedOverlay, fx: f64, fy: f64) -> (f64, f64) {
    (o.frame.x + fx * o.frame.width, o.frame.y + fy * o.frame.height)
}

/// Screen point at fractions of an overlay's plot area.
pub fn in_plot(o: &ResolvedOverlay, fx: f64, fy: f64) -> (f64, f64) {
    (o.plot.x + fx * o.plot.width, o.plot.y + fy * o.plot.height)
}

/// Screen point above data value `x` on the full x-domain, `fy` of the
/// frame height down from the frame top (so margins are reachable).
pub fn at_data_x(o: &ResolvedOverlay, x: f64, fy: f64) -> (f64, f64) {
    let [d0, d1] = o.chart.x_full;
    (
        o.plot.x + (x - d0) / (d1 - d0) * o.plot.width,
        o.frame.y + fy * o.frame.height,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::landmark::{normalize, Point2};

    #[test]
    fn poses_map_to_pinch_distances() {
        let open = Pose { x: 0.9, y: 0.5, pinched: false }.raw(Handedness::Right);
        let closed = Pose { x: 0.1, y: 0.5, pinched: true }.raw(Handedness::Left);
        let frame = normalize(
            &RawFrame {
                t_ms: 0,
                hands: vec![open, closed],
            },
            0.5,
        );
        let d = |h| frame.hand(h).unwrap().pinch_distance();
        assert!((d(Handedness::Right) - OPEN_GAP).abs() < 1e-12);
        assert!((d(Handedness::Left) - CLOSED_GAP).abs() < 1e-12);
        assert_eq!(frame.hand(Handedness::Right).unwrap().index_tip, Point2::new(0.9, 0.5));
    }

    #[test]
    fn clock_advances_per_frame() {
        let mut b = TraceBuilder::new();
        b.place(Handedness::Right, 0.5, 0.5).hold(100);
        assert_eq!(b.build().frame_count(), 4);
        assert_eq!(b.now(), 132);
        b.move_to(Handedness::Right, 0.6, 0.5, 66);
        let t = b.build();
        match t.records.last().unwrap() {
            Record::Frame(f) => assert_eq!(f.hands[0].index, [0.6, 0.5]),
            r => panic!("unexpected {r:?}"),
        }
        b.key(NavCommand::Next);
        assert_eq!(b.build().end_ms(), Some(198));
    }
}
