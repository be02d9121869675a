//! Declarative scene file schema.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::geometry::Rect;
use super::table::TableSource;

/// Top-level scene file: `{ "scenes": [...], "tables": { id: table } }`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneFile {
    /// Screen width over height, used for circular geometry.
    #[serde(default = "default_aspect")]
    pub aspect: f64,
    pub scenes: Vec<SceneSpec>,
    #[serde(default)]
    pub tables: BTreeMap<String, TableSource>,
}

fn default_aspect() -> f64 {
    16.0 / 9.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneSpec {
    pub scene_id: String,
    pub overlays: Vec<OverlaySpec>,
    #[serde(default)]
    pub background: Background,
    /// Declared value transformations: dropping a clone of `source` onto
    /// `target` multiplies target values by the source series.
    #[serde(default)]
    pub multiply_bindings: Vec<MultiplyBinding>,
}

impl SceneSpec {
    pub fn overlay(&self, id: &str) -> Option<&OverlaySpec> {
        self.overlays.iter().find(|o| o.overlay_id == id)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Background {
    #[serde(default)]
    pub darken: bool,
    #[serde(default)]
    pub grayscale: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiplyBinding {
    pub source: String,
    pub target: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverlaySpec {
    pub overlay_id: String,
    pub chart: ChartSpec,
    pub frame: Rect,
    #[serde(default = "yes")]
    pub visible: bool,
    #[serde(default = "yes")]
    pub interactive: bool,
    #[serde(default)]
    pub z_order: i32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub enter: Option<TransitionStyle>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exit: Option<TransitionStyle>,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    Left,
    Right,
    Up,
    Down,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TransitionStyle {
    Fade,
    Translate(Direction),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[non_exhaustive]
pub enum ChartKind {
    Bar,
    StackedBar,
    Line,
    Area,
    StackedArea,
    Pie,
    Legend,
}

impl ChartKind {
    pub fn is_rectilinear(self) -> bool {
        matches!(
            self,
            ChartKind::Bar
                | ChartKind::StackedBar
                | ChartKind::Line
                | ChartKind::Area
                | ChartKind::StackedArea
        )
    }

    pub fn is_stacked(self) -> bool {
        matches!(self, ChartKind::StackedBar | ChartKind::StackedArea)
    }

    pub fn is_area(self) -> bool {
        matches!(self, ChartKind::Area | ChartKind::StackedArea)
    }

    pub fn is_bar(self) -> bool {
        matches!(self, ChartKind::Bar | ChartKind::StackedBar)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ScaleKind {
    #[default]
    Linear,
    Temporal,
    Band,
}

impl ScaleKind {
    pub fn is_continuous(self) -> bool {
        !matches!(self, ScaleKind::Band)
    }
}

/// Fractions of the overlay frame reserved on each side of the plot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Margins {
    pub left: f64,
    pub right: f64,
    pub top: f64,
    pub bottom: f64,
}

impl Default for Margins {
    fn default() -> Self {
        Self {
            left: 0.1,
            right: 0.1,
            top: 0.1,
            bottom: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalRegion {
    pub label: String,
    pub start: f64,
    pub end: f64,
}

impl IntervalRegion {
    pub fn contains(&self, v: f64) -> bool {
        self.start <= v && v <= self.end
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChartSpec {
    pub kind: ChartKind,
    /// Table id; optional only for legends with explicit `categories`.
    #[serde(default)]
    pub data: Option<String>,
    #[serde(default)]
    pub x_field: Option<String>,
    #[serde(default)]
    pub x_scale: ScaleKind,
    /// Wide format: one series per field. Long format (with
    /// `category_field`): the single value field.
    #[serde(default)]
    pub y_fields: Vec<String>,
    #[serde(default)]
    pub category_field: Option<String>,
    /// Explicit category list, mainly for legends.
    #[serde(default)]
    pub categories: Vec<String>,
    #[serde(default)]
    pub colors: BTreeMap<String, String>,
    #[serde(default)]
    pub margins: Margins,
    #[serde(default)]
    pub shared_domain_id: Option<String>,
    #[serde(default)]
    pub category_domain_id: Option<String>,
    #[serde(default)]
    pub interval_regions: Vec<IntervalRegion>,
    #[serde(default)]
    pub hidden_series: BTreeSet<String>,
    #[serde(default)]
    pub x_domain: Option<[f64; 2]>,
    #[serde(default)]
    pub y_domain: Option<[f64; 2]>,
}
