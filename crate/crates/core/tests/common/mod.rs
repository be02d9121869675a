#![allow(dead_code)]

use std::path::PathBuf;
use std::sync::Arc;

use chirono_core::chart::Deck;
use chirono_core::gesture::{GestureEvent, GestureKind};
use chirono_core::interaction::{Engine, EngineConfig, RenderState};
use chirono_core::landmark::{Handedness, Point2};

pub fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn deck() -> Arc<Deck> {
    Arc::new(Deck::load(&fixtures().join("deck/scenes.json")).expect("demo deck loads"))
}

/// Engine parked on `scene` at virtual time 0, reached without animation.
pub fn engine_at(scene: &str) -> Engine {
    let cfg = EngineConfig {
        transition_ms: 0,
        ..EngineConfig::default()
    };
    let mut e = engine_with(scene, cfg);
    e.set_transition_ms(EngineConfig::default().transition_ms);
    e
}

pub fn engine_with(scene: &str, cfg: EngineConfig) -> Engine {
    let deck = deck();
    let index = deck.scenes.iter().position(|s| s.id == scene).expect("scene exists");
    let mut e = Engine::new(deck, cfg);
    if index > 0 {
        e.navigate(chirono_core::scene::NavCommand::Goto(index), 0);
    }
    e
}

pub fn ev(t_ms: u64, hand: Handedness, kind: GestureKind, pos: Point2) -> GestureEvent {
    GestureEvent { t_ms, hand, kind, pos }
}

pub const R: Handedness = Handedness::Right;
pub const L: Handedness = Handedness::Left;

/// Screen point at data x `x` and a fraction `fy` down the plot height.
pub fn at_x(state: &RenderState, overlay: &str, x: f64, fy: f64) -> Point2 {
    let o = &state.overlays[overlay];
    let [d0, d1] = o.effective_x_domain();
    Point2::new(
        o.plot.x + (x - d0) / (d1 - d0) * o.plot.width,
        o.plot.y + fy * o.plot.height,
    )
}

/// Screen point at data coordinates `(x, y)`.
pub fn at_xy(state: &RenderState, overlay: &str, x: f64, y: f64) -> Point2 {
    let o = &state.overlays[overlay];
    let [y0, y1] = o.y_domain;
    let p = at_x(state, overlay, x, 0.0);
    Point2::new(p.x, o.plot.y + o.plot.height - (y - y0) / (y1 - y0) * o.plot.height)
}

/// Screen point at fractions of an overlay frame.
pub fn in_frame(state: &RenderState, overlay: &str, fx: f64, fy: f64) -> Point2 {
    let f = &state.overlays[overlay].frame;
    Point2::new(f.x + fx * f.width, f.y + fy * f.height)
}
