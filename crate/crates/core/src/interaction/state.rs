//! The serializable picture shared by presenter and audience.
//!
//! All maps are `BTreeMap`/`BTreeSet` and all lists are built in a fixed
//! order, so `serde_json` output is canonical.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::chart::geometry::Rect;
use crate::chart::resolve::{ElementRef, Series, Wedge};
use crate::chart::spec::{Background, ChartKind, ScaleKind};
use crate::landmark::{Handedness, Point2};
use crate::scene::SceneTransition;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RenderState {
    pub scene_id: String,
    pub scene_index: usize,
    pub scene_count: usize,
    pub aspect: f64,
    pub background: Background,
    pub overlays: BTreeMap<String, OverlayState>,
    pub clones: Vec<CloneState>,
    pub markers: BTreeMap<Handedness, Marker>,
    pub transition: Option<SceneTransition>,
}

impl RenderState {
    pub fn to_value(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("render state serializes")
    }

    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("render state serializes")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverlayState {
    pub kind: ChartKind,
    pub frame: Rect,
    pub plot: Rect,
    pub visible: bool,
    pub interactive: bool,
    pub z_order: i32,
    /// Bumped whenever data or domains change.
    pub version: u32,
    pub x_scale: ScaleKind,
    pub x_full: [f64; 2],
    /// Visible x-domain; `None` shows the full extent.
    pub x_visible: Option<[f64; 2]>,
    pub domain_transition: Option<DomainTransition>,
    pub y_domain: [f64; 2],
    pub series: Vec<Series>,
    pub bands: Vec<String>,
    pub wedges: Vec<Wedge>,
    pub categories: Vec<String>,
    pub colors: BTreeMap<String, String>,
    pub hidden: BTreeSet<String>,
    pub revealed: BTreeSet<String>,
    pub transformed: bool,
    pub emphasized: BTreeSet<String>,
    pub deemphasized: BTreeSet<String>,
    /// Source elements of live clones, drawn faded with an outline.
    pub cloned: Vec<ElementRef>,
    pub focus: Option<Focus>,
    pub wedge: Option<String>,
    pub swatch: Option<String>,
    pub reference_lines: Vec<ReferenceLine>,
    pub value_labels: Vec<ValueLabel>,
    pub bold: BTreeSet<String>,
    pub gradient: Option<Gradient>,
    pub aggregate_band: bool,
    /// Per-x sum of visible series while the aggregate band is shown.
    pub total: Vec<[f64; 2]>,
}

impl OverlayState {
    pub fn effective_x_domain(&self) -> [f64; 2] {
        self.x_visible.unwrap_or(self.x_full)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DomainTransition {
    pub from: [f64; 2],
    pub to: [f64; 2],
    pub start_ms: u64,
    pub duration_ms: u64,
}

/// The data index snapped to by pointing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Focus {
    pub index: usize,
    pub x: f64,
    pub hand: Handedness,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Orientation {
    Vertical,
    Horizontal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReferenceLine {
    pub orientation: Orientation,
    /// Screen coordinate (x for vertical lines, y for horizontal ones).
    pub at: f64,
    /// Data value at the line.
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValueLabel {
    pub series: String,
    pub x: f64,
    pub value: f64,
    pub pos: Point2,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gradient {
    pub center: Point2,
    pub radius: f64,
    pub hand: Handedness,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CloneKind {
    TransformPayload,
    ComparePayload,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CloneState {
    pub clone_id: String,
    pub source_overlay: String,
    pub element: ElementRef,
    pub tether: Handedness,
    pub pos: Point2,
    pub kind: CloneKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Marker {
    pub pos: Point2,
    pub pinching: bool,
}
