//! Resolution of overlay specs into plot rectangles, scales and marks.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::landmark::Point2;

use super::geometry::{frame_region, Rect, Region, RegionTag};
use super::scale::{BandScale, LinearScale, Scale};
use super::spec::{
    Background, ChartKind, ChartSpec, IntervalRegion, MultiplyBinding, OverlaySpec, ScaleKind,
    SceneSpec, TransitionStyle,
};
use super::table::{Cell, ColumnType, DataTable};
use super::ChartError;

/// Vertical tolerance (normalized units) for grabbing a line series.
const LINE_GRAB_TOLERANCE: f64 = 0.02;
/// Fraction of each x slot occupied by bars.
const BAR_FILL: f64 = 0.8;

/// One series: `[x, y]` pairs sorted by strictly increasing x. For band
/// scales x is the band index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub id: String,
    pub points: Vec<[f64; 2]>,
}

impl Series {
    pub fn xs(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p[0])
    }

    pub fn value_at(&self, x: f64) -> Option<f64> {
        self.points.iter().find(|p| p[0] == x).map(|p| p[1])
    }

    /// Linear interpolation inside the series' x extent.
    pub fn interpolate(&self, x: f64) -> Option<f64> {
        let pts = &self.points;
        let hi = pts.partition_point(|p| p[0] < x);
        if hi < pts.len() && pts[hi][0] == x {
            return Some(pts[hi][1]);
        }
        if hi == 0 || hi == pts.len() {
            return None;
        }
        let [x0, y0] = pts[hi - 1];
        let [x1, y1] = pts[hi];
        Some(y0 + (x - x0) / (x1 - x0) * (y1 - y0))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Wedge {
    pub category: String,
    pub value: f64,
    pub start_deg: f64,
    pub end_deg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolvedChart {
    pub kind: ChartKind,
    pub x_scale: ScaleKind,
    pub series: Vec<Series>,
    pub bands: Vec<String>,
    pub x_full: [f64; 2],
    pub y_domain: [f64; 2],
    pub wedges: Vec<Wedge>,
    pub categories: Vec<String>,
    pub colors: BTreeMap<String, String>,
    pub shared_domain_id: Option<String>,
    pub category_domain_id: Option<String>,
    pub interval_regions: Vec<IntervalRegion>,
    pub hidden: BTreeSet<String>,
}

impl ResolvedChart {
    pub fn series(&self, id: &str) -> Option<&Series> {
        self.series.iter().find(|s| s.id == id)
    }

    pub fn has_continuous_x(&self) -> bool {
        self.kind.is_rectilinear() && self.x_scale.is_continuous()
    }

    /// Every label this chart can emphasize: series, bands, wedges, swatches.
    pub fn category_keys(&self) -> BTreeSet<String> {
        let mut keys: BTreeSet<String> = self.categories.iter().cloned().collect();
        keys.extend(self.series.iter().map(|s| s.id.clone()));
        keys.extend(self.bands.iter().cloned());
        keys.extend(self.wedges.iter().map(|w| w.category.clone()));
        keys
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolvedOverlay {
    pub id: String,
    pub frame: Rect,
    pub plot: Rect,
    pub visible: bool,
    pub interactive: bool,
    pub z_order: i32,
    pub enter: Option<TransitionStyle>,
    pub exit: Option<TransitionStyle>,
    pub chart: ResolvedChart,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolvedScene {
    pub id: String,
    pub aspect: f64,
    pub background: Background,
    pub overlays: Vec<ResolvedOverlay>,
    pub multiply_bindings: Vec<MultiplyBinding>,
}

impl ResolvedScene {
    pub fn resolve(
        spec: &SceneSpec,
        tables: &BTreeMap<String, DataTable>,
        aspect: f64,
    ) -> Result<Self, ChartError> {
        let mut seen = BTreeSet::new();
        let mut overlays = Vec::with_capacity(spec.overlays.len());
        for o in &spec.overlays {
            if !seen.insert(o.overlay_id.as_str()) {
                return Err(ChartError::DuplicateOverlay {
                    scene: spec.scene_id.clone(),
                    overlay: o.overlay_id.clone(),
                });
            }
            overlays.push(resolve_geometry(o, tables)?);
        }
        for b in &spec.multiply_bindings {
            for id in [&b.source, &b.target] {
                if !seen.contains(id.as_str()) {
                    return Err(ChartError::UnknownOverlay {
                        scene: spec.scene_id.clone(),
                        overlay: id.clone(),
                    });
                }
            }
        }
        Ok(Self {
            id: spec.scene_id.clone(),
            aspect,
            background: spec.background,
            overlays,
            multiply_bindings: spec.multiply_bindings.clone(),
        })
    }

    pub fn overlay(&self, id: &str) -> Option<&ResolvedOverlay> {
        self.overlays.iter().find(|o| o.id == id)
    }

    pub fn overlay_index(&self, id: &str) -> Option<usize> {
        self.overlays.iter().position(|o| o.id == id)
    }

    /// Interactive, visible overlays from topmost to bottommost.
    pub fn hit_order(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.overlays.len())
            .filter(|&i| self.overlays[i].visible && self.overlays[i].interactive)
            .collect();
        idx.sort_by(|&a, &b| {
            self.overlays[b]
                .z_order
                .cmp(&self.overlays[a].z_order)
                .then(b.cmp(&a))
        });
        idx
    }

    /// Region under `p` in the topmost interactive overlay containing it.
    pub fn classify(&self, p: Point2) -> Region {
        self.classify_indexed(p)
            .map(|(i, tag)| Region {
                tag,
                overlay_id: Some(self.overlays[i].id.clone()),
            })
            .unwrap_or_else(Region::outside)
    }

    pub fn classify_indexed(&self, p: Point2) -> Option<(usize, RegionTag)> {
        self.hit_order()
            .into_iter()
            .find_map(|i| self.overlays[i].region_of(self.aspect, p).map(|t| (i, t)))
    }
}

/// Validates an overlay against its data and resolves its static geometry.
pub fn resolve_geometry(
    spec: &OverlaySpec,
    tables: &BTreeMap<String, DataTable>,
) -> Result<ResolvedOverlay, ChartError> {
    let id = &spec.overlay_id;
    if !spec.frame.is_normalized() {
        return Err(ChartError::InvalidFrame { overlay: id.clone() });
    }
    let m = &spec.chart.margins;
    let margins_ok = [m.left, m.right, m.top, m.bottom]
        .iter()
        .all(|v| v.is_finite() && *v >= 0.0)
        && m.left + m.right < 1.0
        && m.top + m.bottom < 1.0;
    if !margins_ok {
        return Err(ChartError::InvalidMargins { overlay: id.clone() });
    }
    let chart = resolve_chart(id, &spec.chart, tables)?;
    Ok(ResolvedOverlay {
        id: id.clone(),
        frame: spec.frame,
        plot: spec.frame.inset(m),
        visible: spec.visible,
        interactive: spec.interactive,
        z_order: spec.z_order,
        enter: spec.enter,
        exit: spec.exit,
        chart,
    })
}

fn resolve_chart(
    overlay: &str,
    spec: &ChartSpec,
    tables: &BTreeMap<String, DataTable>,
) -> Result<ResolvedChart, ChartError> {
    let missing = |what: &str| ChartError::MissingField {
        overlay: overlay.to_owned(),
        what: what.to_owned(),
    };
    let table = match &spec.data {
        Some(t) => Some(tables.get(t).ok_or_else(|| ChartError::UnknownTable {
            overlay: overlay.to_owned(),
            table: t.clone(),
        })?),
        None => None,
    };
    let column = |name: &str| -> Result<(usize, ColumnType), ChartError> {
        table
            .and_then(|t| t.column(name))
            .ok_or_else(|| ChartError::UnknownField {
                overlay: overlay.to_owned(),
                field: name.to_owned(),
            })
    };

    let mut out = ResolvedChart {
        kind: spec.kind,
        x_scale: spec.x_scale,
        series: Vec::new(),
        bands: Vec::new(),
        x_full: [0.0, 1.0],
        y_domain: [0.0, 1.0],
        wedges: Vec::new(),
        categories: spec.categories.clone(),
        colors: spec.colors.clone(),
        shared_domain_id: spec.shared_domain_id.clone(),
        category_domain_id: spec.category_domain_id.clone(),
        interval_regions: spec.interval_regions.clone(),
        hidden: spec.hidden_series.clone(),
    };

    match spec.kind {
        ChartKind::Legend => {
            if out.categories.is_empty() {
                if let Some(cf) = &spec.category_field {
                    let (ci, _) = column(cf)?;
                    let table = table.ok_or_else(|| missing("data"))?;
                    for row in &table.rows {
                        let label = row[ci].label();
                        if !out.categories.contains(&label) {
                            out.categories.push(label);
                        }
                    }
                } else {
                    out.categories = spec.y_fields.clone();
                }
            }
            if out.categories.is_empty() {
                return Err(missing("categories"));
            }
        }
        ChartKind::Pie => {
            let table = table.ok_or_else(|| missing("data"))?;
            let cf = spec.category_field.as_deref().ok_or_else(|| missing("category_field"))?;
            let vf = spec.y_fields.first().ok_or_else(|| missing("y_fields"))?;
            let (ci, _) = column(cf)?;
            let (vi, _) = column(vf)?;
            let mut values = Vec::new();
            for (r, row) in table.rows.iter().enumerate() {
                let v = row[vi].as_f64().ok_or_else(|| ChartError::MissingValue {
                    overlay: overlay.to_owned(),
                    series: vf.clone(),
                    row: r,
                })?;
                if v < 0.0 {
                    return Err(ChartError::DegenerateDomain {
                        overlay: overlay.to_owned(),
                        axis: "pie value",
                    });
                }
                values.push((row[ci].label(), v));
            }
            let total: f64 = values.iter().map(|(_, v)| v).sum();
            if !(total > 0.0 && total.is_finite()) {
                return Err(ChartError::DegenerateDomain {
                    overlay: overlay.to_owned(),
                    axis: "pie total",
                });
            }
            let mut acc = 0.0;
            let n = values.len();
            for (i, (category, value)) in values.into_iter().enumerate() {
                let start_deg = acc / total * 360.0;
                acc += value;
                let end_deg = if i + 1 == n { 360.0 } else { acc / total * 360.0 };
                out.categories.push(category.clone());
                out.wedges.push(Wedge {
                    category,
                    value,
                    start_deg,
                    end_deg,
                });
            }
        }
        kind => {
            debug_assert!(kind.is_rectilinear());
            let table = table.ok_or_else(|| missing("data"))?;
            let xf = spec.x_field.as_deref().ok_or_else(|| missing("x_field"))?;
            if spec.y_fields.is_empty() {
                return Err(missing("y_fields"));
            }
            let (xi, xtype) = column(xf)?;
            let band = spec.x_scale == ScaleKind::Band;
            if !band && xtype == ColumnType::Category {
                return Err(ChartError::UnknownField {
                    overlay: overlay.to_owned(),
                    field: format!("{xf} (categorical x needs a band scale)"),
                });
            }
            // band labels in order of first appearance
            if band {
                for row in &table.rows {
                    let label = row[xi].label();
                    if !out.bands.contains(&label) {
                        out.bands.push(label);
                    }
                }
            }
            let x_of = |row: &[Cell], r: usize| -> Result<f64, ChartError> {
                if band {
                    let label = row[xi].label();
                    Ok(out.bands.iter().position(|b| *b == label).unwrap_or(0) as f64)
                } else {
                    row[xi].as_f64().ok_or_else(|| ChartError::MissingValue {
                        overlay: overlay.to_owned(),
                        series: xf.to_owned(),
                        row: r,
                    })
                }
            };

            let mut series: Vec<Series> = Vec::new();
            if let Some(cf) = &spec.category_field {
                let (ci, _) = column(cf)?;
                let (vi, _) = column(&spec.y_fields[0])?;
                for (r, row) in table.rows.iter().enumerate() {
                    let key = row[ci].label();
                    let y = row[vi].as_f64().ok_or_else(|| ChartError::MissingValue {
                        overlay: overlay.to_owned(),
                        series: key.clone(),
                        row: r,
                    })?;
                    let x = x_of(row, r)?;
                    match series.iter_mut().find(|s| s.id == key) {
                        Some(s) => s.points.push([x, y]),
                        None => series.push(Series {
                            id: key,
                            points: vec![[x, y]],
                        }),
                    }
                }
            } else {
                for yf in &spec.y_fields {
                    let (yi, _) = column(yf)?;
                    let mut s = Series {
                        id: yf.clone(),
                        points: Vec::with_capacity(table.rows.len()),
                    };
                    for (r, row) in table.rows.iter().enumerate() {
                        let y = row[yi].as_f64().ok_or_else(|| ChartError::MissingValue {
                            overlay: overlay.to_owned(),
                            series: yf.clone(),
                            row: r,
                        })?;
                        s.points.push([x_of(row, r)?, y]);
                    }
                    series.push(s);
                }
            }
            for s in &series {
                if s.points.windows(2).any(|w| w[1][0] <= w[0][0]) {
                    return Err(ChartError::UnsortedX {
                        overlay: overlay.to_owned(),
                        series: s.id.clone(),
                    });
                }
            }
            if kind.is_stacked() {
                let first: Vec<f64> = series[0].xs().collect();
                if series.iter().any(|s| !s.xs().eq(first.iter().copied())) {
                    return Err(ChartError::MisalignedSeries {
                        overlay: overlay.to_owned(),
                    });
                }
            }
            for h in &spec.hidden_series {
                if !series.iter().any(|s| &s.id == h) {
                    return Err(ChartError::UnknownSeries {
                        overlay: overlay.to_owned(),
                        series: h.clone(),
                    });
                }
            }
            if out.categories.is_empty() {
                out.categories = series.iter().map(|s| s.id.clone()).collect();
            }

            let degenerate = |axis| ChartError::DegenerateDomain {
                overlay: overlay.to_owned(),
                axis,
            };
            out.x_full = if band {
                [0.0, out.bands.len().saturating_sub(1) as f64]
            } else {
                let xd = match spec.x_domain {
                    Some(d) => d,
                    None => x_extent(&series).ok_or_else(|| degenerate("x"))?,
                };
                if !is_proper(xd) {
                    return Err(degenerate("x"));
                }
                xd
            };
            let yd = match spec.y_domain {
                Some(d) => d,
                None => y_extent(kind, &series).ok_or_else(|| degenerate("y"))?,
            };
            if !is_proper(yd) {
                return Err(degenerate("y"));
            }
            out.y_domain = yd;
            out.series = series;
        }
    }
    Ok(out)
}

fn is_proper(d: [f64; 2]) -> bool {
    d[0].is_finite() && d[1].is_finite() && d[1] > d[0]
}

fn x_extent(series: &[Series]) -> Option<[f64; 2]> {
    let lo = series.iter().filter_map(|s| s.points.first()).map(|p| p[0]).reduce(f64::min)?;
    let hi = series.iter().filter_map(|s| s.points.last()).map(|p| p[0]).reduce(f64::max)?;
    Some([lo, hi])
}

/// Value extent for a chart kind: lines hug the data, bars and areas
/// include zero, stacks cover the full stack of every series.
pub fn y_extent(kind: ChartKind, series: &[Series]) -> Option<[f64; 2]> {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    if kind.is_stacked() {
        let n = series.first().map_or(0, |s| s.points.len());
        for i in 0..n {
            let sum: f64 = series.iter().map(|s| s.points[i][1]).sum();
            lo = lo.min(sum);
            hi = hi.max(sum);
        }
    } else {
        for p in series.iter().flat_map(|s| &s.points) {
            lo = lo.min(p[1]);
            hi = hi.max(p[1]);
        }
    }
    if kind != ChartKind::Line {
        lo = lo.min(0.0);
        hi = hi.max(0.0);
    }
    let d = [lo, hi];
    is_proper(d).then_some(d)
}

/// A cloneable chart element.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ElementRef {
    Series { series: String },
    Mark { series: String, index: usize },
    Wedge { category: String },
}

impl ElementRef {
    pub fn label(&self) -> &str {
        match self {
            ElementRef::Series { series } | ElementRef::Mark { series, .. } => series,
            ElementRef::Wedge { category } => category,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BarRect {
    pub series: String,
    pub index: usize,
    pub x: f64,
    pub rect: Rect,
}

/// Vertical extent of one band at one x, in data units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandSlice {
    pub x: f64,
    pub lower: f64,
    pub upper: f64,
}

impl ResolvedOverlay {
    /// Region tag for `p`, or `None` when `p` is outside this overlay.
    pub fn region_of(&self, aspect: f64, p: Point2) -> Option<RegionTag> {
        let tag = frame_region(&self.frame, &self.plot, p)?;
        if tag != RegionTag::Interior {
            return Some(tag);
        }
        Some(match self.chart.kind {
            ChartKind::Pie => match self.static_view(aspect).wedge_at(p) {
                Some(w) => RegionTag::PieWedge(self.chart.wedges[w].category.clone()),
                None => RegionTag::Interior,
            },
            ChartKind::Legend => {
                let i = self.swatch_index(p);
                RegionTag::LegendSwatch(self.chart.categories[i].clone())
            }
            _ => RegionTag::Interior,
        })
    }

    /// Legend row under `p` (rows stacked top to bottom).
    pub fn swatch_index(&self, p: Point2) -> usize {
        let n = self.chart.categories.len().max(1);
        let row = ((p.y - self.plot.top()) / (self.plot.height / n as f64)).floor();
        row.clamp(0.0, (n - 1) as f64) as usize
    }

    pub fn swatch_rect(&self, i: usize) -> Rect {
        let n = self.chart.categories.len().max(1) as f64;
        let h = self.plot.height / n;
        Rect::new(self.plot.x, self.plot.y + i as f64 * h, self.plot.width, h)
    }

    /// View over the data and domains the spec starts with.
    pub fn static_view(&self, aspect: f64) -> ChartView<'_> {
        self.view(
            aspect,
            &self.chart.series,
            &self.chart.hidden,
            self.chart.x_full,
            self.chart.y_domain,
        )
    }

    pub fn view<'a>(
        &'a self,
        aspect: f64,
        series: &'a [Series],
        hidden: &'a BTreeSet<String>,
        x_domain: [f64; 2],
        y_domain: [f64; 2],
    ) -> ChartView<'a> {
        let plot = self.plot;
        let x = if self.chart.x_scale == ScaleKind::Band {
            Scale::Band(BandScale {
                bands: self.chart.bands.len(),
                range: [plot.left(), plot.right()],
            })
        } else {
            Scale::Continuous(LinearScale::new(x_domain, [plot.left(), plot.right()]))
        };
        let y = LinearScale::new(y_domain, [plot.bottom(), plot.top()]);
        ChartView {
            overlay: self,
            aspect,
            series,
            hidden,
            x,
            y,
        }
    }
}

/// An overlay together with the data and domains currently in effect.
#[derive(Debug, Clone)]
pub struct ChartView<'a> {
    pub overlay: &'a ResolvedOverlay,
    pub aspect: f64,
    pub series: &'a [Series],
    pub hidden: &'a BTreeSet<String>,
    pub x: Scale,
    pub y: LinearScale,
}

impl<'a> ChartView<'a> {
    pub fn kind(&self) -> ChartKind {
        self.overlay.chart.kind
    }

    pub fn plot(&self) -> Rect {
        self.overlay.plot
    }

    pub fn visible_series(&self) -> impl Iterator<Item = &'a Series> + '_ {
        self.series.iter().filter(|s| !self.hidden.contains(&s.id))
    }

    /// Sorted union of x values over the visible series.
    pub fn xs(&self) -> Vec<f64> {
        let mut xs: Vec<f64> = self.visible_series().flat_map(|s| s.xs()).collect();
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        xs
    }

    /// Band extents of `series_id` as it appears (or would appear once
    /// revealed) with the currently visible series stacked beneath it.
    pub fn band_slices(&self, series_id: &str) -> Vec<BandSlice> {
        let Some(pos) = self.series.iter().position(|s| s.id == series_id) else {
            return Vec::new();
        };
        let target = &self.series[pos];
        if !self.kind().is_stacked() {
            return target
                .points
                .iter()
                .map(|&[x, y]| BandSlice {
                    x,
                    lower: y.min(0.0),
                    upper: y.max(0.0),
                })
                .collect();
        }
        let below: Vec<&Series> = self.series[..pos]
            .iter()
            .filter(|s| !self.hidden.contains(&s.id))
            .collect();
        target
            .points
            .iter()
            .enumerate()
            .map(|(i, &[x, y])| {
                let lower: f64 = below.iter().map(|s| s.points[i][1]).sum();
                BandSlice {
                    x,
                    lower,
                    upper: lower + y,
                }
            })
            .collect()
    }

    /// Screen y of the top of `series_id` at `x`, accounting for stacking.
    pub fn top_y(&self, series_id: &str, x: f64) -> Option<f64> {
        let slices = self.band_slices(series_id);
        let s = slices.iter().find(|s| s.x == x)?;
        let v = if self.kind().is_stacked() || self.kind() == ChartKind::Line {
            s.upper
        } else {
            self.series.iter().find(|s| s.id == series_id)?.value_at(x)?
        };
        Some(self.y.apply(v))
    }

    /// Whether `p` falls inside the contour of a band, interpolating
    /// linearly between data points.
    pub fn band_contains(&self, series_id: &str, p: Point2) -> bool {
        let Some(lin) = self.x.as_linear() else {
            return false;
        };
        let slices = self.band_slices(series_id);
        let x = lin.invert(p.x);
        let hi = slices.partition_point(|s| s.x < x);
        let (lower, upper) = if hi < slices.len() && slices[hi].x == x {
            (slices[hi].lower, slices[hi].upper)
        } else if hi == 0 || hi == slices.len() {
            return false;
        } else {
            let (a, b) = (slices[hi - 1], slices[hi]);
            let f = (x - a.x) / (b.x - a.x);
            (
                a.lower + f * (b.lower - a.lower),
                a.upper + f * (b.upper - a.upper),
            )
        };
        let (top, bottom) = (self.y.apply(upper), self.y.apply(lower));
        p.y >= top.min(bottom) && p.y <= top.max(bottom)
    }

    fn slot_width(&self) -> f64 {
        match &self.x {
            Scale::Band(b) => b.step(),
            Scale::Continuous(_) => self.plot().width / self.xs().len().max(1) as f64,
        }
    }

    pub fn bar_rects(&self) -> Vec<BarRect> {
        if !self.kind().is_bar() {
            return Vec::new();
        }
        let width = self.slot_width() * BAR_FILL;
        let visible: Vec<&Series> = self.visible_series().collect();
        let mut out = Vec::new();
        if self.kind().is_stacked() {
            for s in &visible {
                for (i, slice) in self.band_slices(&s.id).iter().enumerate() {
                    let cx = self.x.apply(slice.x);
                    let (a, b) = (self.y.apply(slice.upper), self.y.apply(slice.lower));
                    out.push(BarRect {
                        series: s.id.clone(),
                        index: i,
                        x: slice.x,
                        rect: Rect::new(cx - width / 2.0, a.min(b), width, (a - b).abs()),
                    });
                }
            }
        } else {
            let k = visible.len().max(1) as f64;
            let sub = width / k;
            for (j, s) in visible.iter().enumerate() {
                for (i, &[x, y]) in s.points.iter().enumerate() {
                    let left = self.x.apply(x) - width / 2.0 + j as f64 * sub;
                    let (a, b) = (self.y.apply(y), self.y.apply(0.0));
                    out.push(BarRect {
                        series: s.id.clone(),
                        index: i,
                        x,
                        rect: Rect::new(left, a.min(b), sub, (a - b).abs()),
                    });
                }
            }
        }
        out
    }

    pub fn pie_center(&self) -> Point2 {
        self.plot().center()
    }

    /// Pie radius in height units.
    pub fn pie_radius(&self) -> f64 {
        let plot = self.plot();
        (plot.width * self.aspect).min(plot.height) / 2.0
    }

    /// Clockwise angle from 12 o'clock in degrees, `[0, 360)`.
    pub fn angle_of(&self, p: Point2) -> f64 {
        let c = self.pie_center();
        let dx = (p.x - c.x) * self.aspect;
        let dy = p.y - c.y;
        let mut a = dx.atan2(-dy).to_degrees();
        if a < 0.0 {
            a += 360.0;
        }
        if a >= 360.0 {
            a -= 360.0;
        }
        a
    }

    /// Wedge containing the direction of `p` from the pie center. Wedges
    /// own their end angle, so a boundary resolves to the lower index.
    pub fn wedge_at(&self, p: Point2) -> Option<usize> {
        let a = self.angle_of(p);
        self.overlay
            .chart
            .wedges
            .iter()
            .position(|w| w.end_deg > w.start_deg && a <= w.end_deg)
    }

    fn within_pie(&self, p: Point2) -> bool {
        let c = self.pie_center();
        ((p.x - c.x) * self.aspect).hypot(p.y - c.y) <= self.pie_radius()
    }

    /// Cloneable element under `p`, if any.
    pub fn element_at(&self, p: Point2) -> Option<ElementRef> {
        if !self.plot().contains(p) {
            return None;
        }
        match self.kind() {
            ChartKind::Bar | ChartKind::StackedBar => self
                .bar_rects()
                .into_iter()
                .rev()
                .find(|b| {
                    let r = b.rect;
                    p.x >= r.left() && p.x <= r.right() && p.y >= r.top() && p.y <= r.bottom()
                })
                .map(|b| ElementRef::Mark {
                    series: b.series,
                    index: b.index,
                }),
            ChartKind::Area => self
                .visible_series()
                .collect::<Vec<_>>()
                .into_iter()
                .rev()
                .find(|s| self.band_contains(&s.id, p))
                .map(|s| ElementRef::Series {
                    series: s.id.clone(),
                }),
            ChartKind::Line => {
                let lin = self.x.as_linear()?;
                let x = lin.invert(p.x);
                self.visible_series()
                    .filter_map(|s| {
                        let d = (self.y.apply(s.interpolate(x)?) - p.y).abs();
                        (d <= LINE_GRAB_TOLERANCE).then_some((d, s))
                    })
                    .min_by(|a, b| a.0.total_cmp(&b.0))
                    .map(|(_, s)| ElementRef::Series {
                        series: s.id.clone(),
                    })
            }
            ChartKind::Pie => {
                if !self.within_pie(p) {
                    return None;
                }
                self.wedge_at(p).map(|w| ElementRef::Wedge {
                    category: self.overlay.chart.wedges[w].category.clone(),
                })
            }
            _ => None,
        }
    }
}
