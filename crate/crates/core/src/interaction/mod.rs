//! Interaction engine.
//!
//! The engine keeps two kinds of state. Scene state (data after
//! transforms, revealed bands, the visible x-domain, live clones) changes
//! only in response to pinches and navigation and persists until the
//! scene is left. Hand context (where each hand is pointing, where its
//! palm is, what its current pinch is doing) mirrors the gesture stream.
//! [`Engine::render`] derives the full [`RenderState`] from both, so
//! pointing and palm effects vanish as soon as their Leave event clears
//! the hand context.

pub mod ops;
mod render;
pub mod state;

use std::collections::BTreeSet;
use std::sync::Arc;

use log::{debug, warn};
use serde::{Deserialize, Serialize};

use crate::chart::geometry::RegionTag;
use crate::chart::resolve::{y_extent, ChartView, ElementRef, ResolvedOverlay, ResolvedScene, Series};
use crate::chart::spec::ChartKind;
use crate::chart::Deck;
use crate::gesture::{GestureEvent, GestureKind};
use crate::landmark::{Handedness, Point2};
use crate::scene::{self, NavCommand, SceneTransition, TransitionPlan};

use ops::{DomainError, PanDirection};
pub use state::*;

/// Two pinch starts at most this far apart may form a bimanual gesture.
pub const PAIRING_WINDOW_MS: u64 = 500;
/// Palm gradient radius as a fraction of the overlay frame diagonal.
pub const GRADIENT_RADIUS_FRACTION: f64 = 0.25;
pub const MAX_CLONES: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EngineConfig {
    pub dominant_hand: Handedness,
    pub transition_ms: u64,
    pub pairing_window_ms: u64,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            dominant_hand: Handedness::Right,
            transition_ms: scene::DEFAULT_TRANSITION_MS,
            pairing_window_ms: PAIRING_WINDOW_MS,
        }
    }
}

/// Per-overlay scene state.
#[derive(Debug, Clone)]
struct OverlayRuntime {
    series: Vec<Series>,
    y_domain: [f64; 2],
    hidden: BTreeSet<String>,
    revealed: BTreeSet<String>,
    x_visible: Option<[f64; 2]>,
    domain_transition: Option<DomainTransition>,
    transformed: bool,
    version: u32,
}

impl OverlayRuntime {
    fn fresh(o: &ResolvedOverlay) -> Self {
        Self {
            series: o.chart.series.clone(),
            y_domain: o.chart.y_domain,
            hidden: o.chart.hidden.clone(),
            revealed: BTreeSet::new(),
            x_visible: None,
            domain_transition: None,
            transformed: false,
            version: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum PinchRole {
    /// Not yet bound to anything; may still pair with the other hand.
    Pending,
    Clone(String),
    /// Recognized (or cancelled); later motion is ignored.
    Consumed,
    Aggregate(usize),
}

#[derive(Debug, Clone)]
struct PinchCtx {
    start_ms: u64,
    start_pos: Point2,
    role: PinchRole,
}

#[derive(Debug, Clone, Default)]
struct HandCtx {
    point: Option<Point2>,
    palm: Option<Point2>,
    pinch: Option<PinchCtx>,
    cursor: Point2,
}

#[derive(Debug, Clone)]
pub struct Engine {
    deck: Arc<Deck>,
    config: EngineConfig,
    index: usize,
    overlays: Vec<OverlayRuntime>,
    clones: Vec<CloneState>,
    next_clone: u64,
    hands: [HandCtx; 2],
    transition: Option<SceneTransition>,
    clock: u64,
}

impl Engine {
    pub fn new(deck: Arc<Deck>, config: EngineConfig) -> Self {
        let overlays = deck.scenes[0].overlays.iter().map(OverlayRuntime::fresh).collect();
        Self {
            deck,
            config,
            index: 0,
            overlays,
            clones: Vec::new(),
            next_clone: 0,
            hands: Default::default(),
            transition: None,
            clock: 0,
        }
    }

    pub fn deck(&self) -> &Arc<Deck> {
        &self.deck
    }

    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    pub fn set_dominant_hand(&mut self, hand: Handedness) {
        self.config.dominant_hand = hand;
    }

    pub fn set_transition_ms(&mut self, ms: u64) {
        self.config.transition_ms = ms;
    }

    pub fn scene_index(&self) -> usize {
        self.index
    }

    pub fn scene(&self) -> &ResolvedScene {
        &self.deck.scenes[self.index]
    }

    pub fn clock(&self) -> u64 {
        self.clock
    }

    /// True while a scene transition runs; gestures are ignored meanwhile.
    pub fn locked(&self) -> bool {
        self.transition.is_some()
    }

    /// Advances the virtual clock, retiring finished animations.
    pub fn tick(&mut self, t_ms: u64) {
        self.clock = self.clock.max(t_ms);
        let now = self.clock;
        if self.transition.as_ref().is_some_and(|t| !t.is_running(now)) {
            self.transition = None;
        }
        for rt in &mut self.overlays {
            if rt
                .domain_transition
                .is_some_and(|d| now >= d.start_ms + d.duration_ms)
            {
                rt.domain_transition = None;
            }
        }
    }

    pub fn handle(&mut self, ev: &GestureEvent) {
        self.tick(ev.t_ms);
        let slot = ev.hand.slot();
        match ev.kind {
            GestureKind::PointEnter | GestureKind::PointMove => {
                self.hands[slot].point = Some(ev.pos);
                self.hands[slot].cursor = ev.pos;
            }
            GestureKind::PointLeave => self.hands[slot].point = None,
            GestureKind::PalmEnter | GestureKind::PalmMove => self.hands[slot].palm = Some(ev.pos),
            GestureKind::PalmLeave => self.hands[slot].palm = None,
            GestureKind::PinchStart => {
                self.hands[slot].cursor = ev.pos;
                self.pinch_start(ev.hand, ev.pos);
            }
            GestureKind::PinchMove => {
                self.hands[slot].cursor = ev.pos;
                self.pinch_move(ev.hand, ev.pos);
            }
            GestureKind::PinchEnd => {
                self.hands[slot].cursor = ev.pos;
                if let Some(ctx) = self.hands[slot].pinch.take() {
                    if let PinchRole::Clone(id) = ctx.role {
                        self.release_clone(&id, ev.pos);
                    }
                }
            }
        }
    }

    /// Switches scenes. Returns the plan when the scene actually changes.
    pub fn navigate(&mut self, cmd: NavCommand, t_ms: u64) -> Option<TransitionPlan> {
        self.tick(t_ms);
        let (target, clamped) = scene::target_index(cmd, self.index, self.deck.len());
        if clamped {
            warn!("navigation {cmd} clamped to scene {target}");
        }
        if target == self.index {
            return None;
        }
        self.clones.clear();
        for h in &mut self.hands {
            if let Some(p) = &mut h.pinch {
                p.role = PinchRole::Consumed;
            }
        }
        let from = &self.deck.scenes[self.index];
        let to = &self.deck.scenes[target];
        let plan = scene::plan_transition(from, to, self.config.transition_ms);
        self.transition = (plan.duration_ms > 0).then(|| SceneTransition {
            from_scene: from.id.clone(),
            to_scene: to.id.clone(),
            start_ms: self.clock,
            plan: plan.clone(),
        });
        self.overlays = to.overlays.iter().map(OverlayRuntime::fresh).collect();
        self.index = target;
        Some(plan)
    }

    /// Hands ordered by precedence: dominant first.
    fn precedence(&self) -> [Handedness; 2] {
        let d = self.config.dominant_hand;
        [d, d.other()]
    }

    fn view(&self, oi: usize) -> ChartView<'_> {
        let o = &self.scene().overlays[oi];
        let rt = &self.overlays[oi];
        o.view(
            self.scene().aspect,
            &rt.series,
            &rt.hidden,
            rt.x_visible.unwrap_or(o.chart.x_full),
            rt.y_domain,
        )
    }

    fn pinch_start(&mut self, hand: Handedness, pos: Point2) {
        let role = if self.locked() {
            PinchRole::Consumed
        } else {
            self.single_hand_pinch(hand, pos).unwrap_or(PinchRole::Pending)
        };
        self.hands[hand.slot()].pinch = Some(PinchCtx {
            start_ms: self.clock,
            start_pos: pos,
            role,
        });
        if self.hands[hand.slot()].pinch.as_ref().map(|p| &p.role) == Some(&PinchRole::Pending) {
            self.try_pair(hand);
        }
    }

    /// One-handed pinch recognitions: corner pan, band reveal, clone grab.
    fn single_hand_pinch(&mut self, hand: Handedness, pos: Point2) -> Option<PinchRole> {
        let deck = Arc::clone(&self.deck);
        let (oi, tag) = deck.scenes[self.index].classify_indexed(pos)?;
        let o = &deck.scenes[self.index].overlays[oi];
        match tag {
            RegionTag::BottomLeftCorner | RegionTag::BottomRightCorner if o.chart.has_continuous_x() => {
                let dir = if tag == RegionTag::BottomLeftCorner {
                    PanDirection::Earlier
                } else {
                    PanDirection::Later
                };
                if let Err(e) = self.pan(oi, dir) {
                    debug!("pan on {}: {e}", o.id);
                }
                Some(PinchRole::Consumed)
            }
            t if t.is_plot() => {
                if o.chart.kind.is_area() && o.chart.has_continuous_x() {
                    let view = self.view(oi);
                    let hit = self.overlays[oi]
                        .series
                        .iter()
                        .filter(|s| self.overlays[oi].hidden.contains(&s.id))
                        .find(|s| view.band_contains(&s.id, pos))
                        .map(|s| s.id.clone());
                    if let Some(id) = hit {
                        let rt = &mut self.overlays[oi];
                        rt.hidden.remove(&id);
                        rt.revealed.insert(id);
                        rt.version += 1;
                        return Some(PinchRole::Consumed);
                    }
                }
                self.grab_clone(hand, oi, pos).map(PinchRole::Clone)
            }
            _ => None,
        }
    }

    fn grab_clone(&mut self, hand: Handedness, oi: usize, pos: Point2) -> Option<String> {
        let deck = Arc::clone(&self.deck);
        let scene = &deck.scenes[self.index];
        let o = &scene.overlays[oi];
        let cloneable = matches!(
            o.chart.kind,
            ChartKind::Bar | ChartKind::StackedBar | ChartKind::Line | ChartKind::Area | ChartKind::Pie
        );
        if !cloneable || self.clones.len() >= MAX_CLONES || self.clones.iter().any(|c| c.tether == hand) {
            return None;
        }
        let Some(element) = self.view(oi).element_at(pos) else {
            debug!("no element at pinch in {}", o.id);
            return None;
        };
        let transform = matches!(element, ElementRef::Series { .. })
            && scene.multiply_bindings.iter().any(|b| b.source == o.id);
        let clone_id = format!("clone-{}", self.next_clone);
        self.next_clone += 1;
        self.clones.push(CloneState {
            clone_id: clone_id.clone(),
            source_overlay: o.id.clone(),
            element,
            tether: hand,
            pos,
            kind: if transform {
                CloneKind::TransformPayload
            } else {
                CloneKind::ComparePayload
            },
        });
        Some(clone_id)
    }

    /// Bimanual recognitions between this hand's new pinch and a pending
    /// pinch of the other hand that began within the pairing window.
    fn try_pair(&mut self, hand: Handedness) {
        let (Some(a), Some(b)) = (
            self.hands[hand.slot()].pinch.clone(),
            self.hands[hand.other().slot()].pinch.clone(),
        ) else {
            return;
        };
        if b.role != PinchRole::Pending || a.start_ms.saturating_sub(b.start_ms) > self.config.pairing_window_ms {
            return;
        }
        let deck = Arc::clone(&self.deck);
        let scene = &deck.scenes[self.index];
        let (Some((ia, ta)), Some((ib, tb))) = (
            scene.classify_indexed(a.start_pos),
            scene.classify_indexed(b.start_pos),
        ) else {
            return;
        };
        if ia != ib {
            return;
        }
        let o = &scene.overlays[ia];
        let continuous = o.chart.has_continuous_x();
        let role = if continuous && ta == RegionTag::BottomMargin && tb == RegionTag::BottomMargin {
            if let Err(e) = self.zoom_in(ia, a.start_pos, b.start_pos) {
                debug!("zoom in on {}: {e}", o.id);
            }
            PinchRole::Consumed
        } else if continuous
            && ((ta == RegionTag::TopMargin && tb == RegionTag::TopMargin)
                || (ta.is_side_margin() && tb.is_side_margin() && ta != tb))
        {
            if let Err(e) = self.zoom_out(ia) {
                debug!("zoom out on {}: {e}", o.id);
            }
            PinchRole::Consumed
        } else if o.chart.kind == ChartKind::StackedArea && ta.is_plot() && tb.is_plot() {
            PinchRole::Aggregate(ia)
        } else {
            return;
        };
        for h in [hand, hand.other()] {
            if let Some(p) = &mut self.hands[h.slot()].pinch {
                p.role = role.clone();
            }
        }
    }

    fn pinch_move(&mut self, hand: Handedness, pos: Point2) {
        let Some(ctx) = &mut self.hands[hand.slot()].pinch else {
            return;
        };
        match &ctx.role {
            PinchRole::Clone(id) => {
                if let Some(c) = self.clones.iter_mut().find(|c| &c.clone_id == id) {
                    c.pos = pos;
                }
            }
            PinchRole::Aggregate(oi) => {
                if !self.deck.scenes[self.index].overlays[*oi].frame.contains(pos) {
                    ctx.role = PinchRole::Consumed;
                }
            }
            PinchRole::Pending | PinchRole::Consumed => {}
        }
    }

    fn release_clone(&mut self, id: &str, pos: Point2) {
        let Some(i) = self.clones.iter().position(|c| c.clone_id == id) else {
            return;
        };
        let clone = self.clones.remove(i);
        if clone.kind != CloneKind::TransformPayload {
            return;
        }
        let ElementRef::Series { series } = &clone.element else {
            return;
        };
        let scene = self.scene();
        let Some((ti, _)) = scene.classify_indexed(pos) else {
            return;
        };
        let Some(si) = scene.overlay_index(&clone.source_overlay) else {
            return;
        };
        let (src, tgt) = (&scene.overlays[si], &scene.overlays[ti]);
        let bound = scene
            .multiply_bindings
            .iter()
            .any(|b| b.source == src.id && b.target == tgt.id);
        if !bound {
            return;
        }
        if src.chart.shared_domain_id.is_none() || src.chart.shared_domain_id != tgt.chart.shared_domain_id {
            debug!("domain mismatch dropping {} on {}", src.id, tgt.id);
            return;
        }
        let Some(source) = self.overlays[si].series.iter().find(|s| &s.id == series).cloned() else {
            return;
        };
        let product = ops::multiply(&source, &src.chart, &self.overlays[ti].series, &tgt.chart);
        let kind = tgt.chart.kind;
        let rt = &mut self.overlays[ti];
        if let Some(d) = y_extent(kind, &product) {
            rt.y_domain = d;
        }
        rt.series = product;
        rt.transformed = true;
        rt.version += 1;
    }

    fn set_visible(&mut self, oi: usize, next: Option<[f64; 2]>) {
        let full = self.scene().overlays[oi].chart.x_full;
        let duration_ms = self.config.transition_ms;
        let start_ms = self.clock;
        let rt = &mut self.overlays[oi];
        let from = rt.x_visible.unwrap_or(full);
        rt.x_visible = next;
        rt.domain_transition = (duration_ms > 0).then(|| DomainTransition {
            from,
            to: next.unwrap_or(full),
            start_ms,
            duration_ms,
        });
        rt.version += 1;
    }

    fn zoom_in(&mut self, oi: usize, a: Point2, b: Point2) -> Result<(), DomainError> {
        let target = {
            let view = self.view(oi);
            let lin = view.x.as_linear().expect("continuous x");
            let chart = &self.scene().overlays[oi].chart;
            ops::zoom_in_target(lin.invert(a.x), lin.invert(b.x), &chart.interval_regions, chart.x_full)?
        };
        self.set_visible(oi, Some(target));
        Ok(())
    }

    fn zoom_out(&mut self, oi: usize) -> Result<(), DomainError> {
        if self.overlays[oi].x_visible.is_none() {
            return Err(DomainError::AlreadyFullExtent);
        }
        self.set_visible(oi, None);
        Ok(())
    }

    fn pan(&mut self, oi: usize, dir: PanDirection) -> Result<(), DomainError> {
        let full = self.scene().overlays[oi].chart.x_full;
        let visible = self.overlays[oi].x_visible.ok_or(DomainError::AlreadyAtExtent)?;
        let next = ops::pan(visible, full, dir)?;
        self.set_visible(oi, Some(next));
        Ok(())
    }
}
