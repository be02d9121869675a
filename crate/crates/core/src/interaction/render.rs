//! Projection of engine state into a [`RenderState`].

use std::collections::{BTreeMap, BTreeSet};

use crate::chart::geometry::RegionTag;
use crate::chart::resolve::ResolvedOverlay;
use crate::chart::scale::{nearest_index, Scale};
use crate::landmark::{Handedness, Point2};

use super::state::*;
use super::{Engine, OverlayRuntime, PinchRole, GRADIENT_RADIUS_FRACTION};

/// Series id used for the aggregate total in value labels.
pub const TOTAL_SERIES: &str = "total";

struct Pointer {
    hand: Handedness,
    pos: Point2,
    overlay: usize,
    tag: RegionTag,
}

fn base_state(o: &ResolvedOverlay, rt: &OverlayRuntime) -> OverlayState {
    OverlayState {
        kind: o.chart.kind,
        frame: o.frame,
        plot: o.plot,
        visible: o.visible,
        interactive: o.interactive,
        z_order: o.z_order,
        version: rt.version,
        x_scale: o.chart.x_scale,
        x_full: o.chart.x_full,
        x_visible: rt.x_visible,
        domain_transition: rt.domain_transition,
        y_domain: rt.y_domain,
        series: rt.series.clone(),
        bands: o.chart.bands.clone(),
        wedges: o.chart.wedges.clone(),
        categories: o.chart.categories.clone(),
        colors: o.chart.colors.clone(),
        hidden: rt.hidden.clone(),
        revealed: rt.revealed.clone(),
        transformed: rt.transformed,
        emphasized: BTreeSet::new(),
        deemphasized: BTreeSet::new(),
        cloned: Vec::new(),
        focus: None,
        wedge: None,
        swatch: None,
        reference_lines: Vec::new(),
        value_labels: Vec::new(),
        bold: BTreeSet::new(),
        gradient: None,
        aggregate_band: false,
        total: Vec::new(),
    }
}

impl Engine {
    pub fn render(&self) -> RenderState {
        let scene = self.scene();
        let mut overlays: Vec<OverlayState> = scene
            .overlays
            .iter()
            .zip(&self.overlays)
            .map(|(o, rt)| base_state(o, rt))
            .collect();

        let mut markers = BTreeMap::new();
        for h in Handedness::ALL {
            let ctx = &self.hands[h.slot()];
            if ctx.point.is_some() || ctx.pinch.is_some() {
                markers.insert(
                    h,
                    Marker {
                        pos: ctx.cursor,
                        pinching: ctx.pinch.is_some(),
                    },
                );
            }
        }

        if !self.locked() {
            self.render_aggregates(&mut overlays);
            self.render_pointing(&mut overlays);
            self.render_palms(&mut overlays);
            for c in &self.clones {
                if let Some(i) = scene.overlay_index(&c.source_overlay) {
                    overlays[i].cloned.push(c.element.clone());
                }
            }
        }

        RenderState {
            scene_id: scene.id.clone(),
            scene_index: self.index,
            scene_count: self.deck.len(),
            aspect: scene.aspect,
            background: scene.background,
            overlays: scene
                .overlays
                .iter()
                .map(|o| o.id.clone())
                .zip(overlays)
                .collect(),
            clones: self.clones.clone(),
            markers,
            transition: self.transition.clone(),
        }
    }

    fn render_aggregates(&self, overlays: &mut [OverlayState]) {
        for h in Handedness::ALL {
            let Some(p) = &self.hands[h.slot()].pinch else {
                continue;
            };
            let PinchRole::Aggregate(oi) = p.role else {
                continue;
            };
            if overlays[oi].aggregate_band {
                continue;
            }
            let view = self.view(oi);
            let total = view
                .xs()
                .into_iter()
                .map(|x| [x, view.visible_series().filter_map(|s| s.value_at(x)).sum()])
                .collect();
            overlays[oi].aggregate_band = true;
            overlays[oi].total = total;
        }
    }

    fn pointers(&self) -> Vec<Pointer> {
        self.precedence()
            .into_iter()
            .filter_map(|hand| {
                let pos = self.hands[hand.slot()].point?;
                let (overlay, tag) = self.scene().classify_indexed(pos)?;
                Some(Pointer {
                    hand,
                    pos,
                    overlay,
                    tag,
                })
            })
            .collect()
    }

    fn render_pointing(&self, overlays: &mut [OverlayState]) {
        let scene = self.scene();
        let pointers = self.pointers();

        // Category linkage from legend swatches and pie wedges.
        let mut links: Vec<(Option<&str>, usize, String)> = Vec::new();
        for p in &pointers {
            let o = &scene.overlays[p.overlay];
            match &p.tag {
                RegionTag::LegendSwatch(c) => {
                    overlays[p.overlay].swatch.get_or_insert_with(|| c.clone());
                    links.push((o.chart.category_domain_id.as_deref(), p.overlay, c.clone()));
                }
                RegionTag::PieWedge(c) => {
                    overlays[p.overlay].wedge.get_or_insert_with(|| c.clone());
                    links.push((o.chart.category_domain_id.as_deref(), p.overlay, c.clone()));
                }
                _ => {}
            }
        }
        for (j, o) in scene.overlays.iter().enumerate() {
            if !o.visible {
                continue;
            }
            let cats: BTreeSet<&str> = links
                .iter()
                .filter(|(d, src, _)| match d {
                    Some(d) => o.chart.category_domain_id.as_deref() == Some(*d),
                    None => *src == j,
                })
                .map(|(_, _, c)| c.as_str())
                .collect();
            if cats.is_empty() {
                continue;
            }
            let mut keys: BTreeSet<String> = o.chart.category_keys();
            keys.extend(self.overlays[j].series.iter().map(|s| s.id.clone()));
            let emphasized: BTreeSet<String> =
                keys.iter().filter(|k| cats.contains(k.as_str())).cloned().collect();
            if emphasized.is_empty() {
                continue;
            }
            overlays[j].deemphasized = keys.difference(&emphasized).cloned().collect();
            overlays[j].emphasized = emphasized;
        }

        // Domain values pointed at inside rectilinear plots.
        let mut targets: Vec<(Handedness, usize, f64)> = Vec::new();
        for p in &pointers {
            let o = &scene.overlays[p.overlay];
            if p.tag != RegionTag::Interior || !o.chart.kind.is_rectilinear() {
                continue;
            }
            match &self.view(p.overlay).x {
                Scale::Continuous(lin) => targets.push((p.hand, p.overlay, lin.invert(p.pos.x))),
                Scale::Band(b) => {
                    if overlays[p.overlay].focus.is_none() {
                        let i = b.nearest(p.pos.x);
                        self.apply_focus(overlays, p.overlay, p.hand, i as f64);
                    }
                }
            }
        }
        for (j, o) in scene.overlays.iter().enumerate() {
            if !o.visible || !o.chart.has_continuous_x() {
                continue;
            }
            let own = targets.iter().find(|t| t.1 == j);
            let linked = || {
                let d = o.chart.shared_domain_id.as_deref()?;
                targets
                    .iter()
                    .find(|t| scene.overlays[t.1].chart.shared_domain_id.as_deref() == Some(d))
            };
            let Some(&(hand, _, v)) = own.or_else(linked) else {
                continue;
            };
            let xs = self.view(j).xs();
            if let Some(i) = nearest_index(&xs, v) {
                self.apply_focus(overlays, j, hand, xs[i]);
            }
        }

        // Horizontal reference lines from the side margins.
        for p in &pointers {
            let o = &scene.overlays[p.overlay];
            if !p.tag.is_side_margin() || !o.chart.kind.is_rectilinear() {
                continue;
            }
            let st = &mut overlays[p.overlay];
            if st
                .reference_lines
                .iter()
                .any(|l| l.orientation == Orientation::Horizontal)
            {
                continue;
            }
            let value = self.view(p.overlay).y.invert(p.pos.y);
            st.reference_lines.push(ReferenceLine {
                orientation: Orientation::Horizontal,
                at: p.pos.y,
                value,
            });
        }
    }

    /// Vertical line, labels and bold strokes at data x `x` (band index for
    /// band scales).
    fn apply_focus(&self, overlays: &mut [OverlayState], j: usize, hand: Handedness, x: f64) {
        let view = self.view(j);
        let xs = view.xs();
        let index = xs.iter().position(|&v| v == x).unwrap_or(0);
        let sx = view.x.apply(x);
        let st = &mut overlays[j];
        st.focus = Some(Focus { index, x, hand });
        st.reference_lines.push(ReferenceLine {
            orientation: Orientation::Vertical,
            at: sx,
            value: x,
        });
        let filter = (!st.emphasized.is_empty()).then(|| st.emphasized.clone());
        for s in view.visible_series() {
            if filter.as_ref().is_some_and(|f| !f.contains(&s.id)) {
                continue;
            }
            let (Some(value), Some(y)) = (s.value_at(x), view.top_y(&s.id, x)) else {
                continue;
            };
            st.value_labels.push(ValueLabel {
                series: s.id.clone(),
                x,
                value,
                pos: Point2::new(sx, y),
            });
            st.bold.insert(s.id.clone());
        }
        if st.aggregate_band {
            if let Some(&[_, total]) = st.total.iter().find(|p| p[0] == x) {
                st.value_labels.push(ValueLabel {
                    series: TOTAL_SERIES.to_owned(),
                    x,
                    value: total,
                    pos: Point2::new(sx, view.y.apply(total)),
                });
            }
        }
    }

    fn render_palms(&self, overlays: &mut [OverlayState]) {
        let scene = self.scene();
        for hand in self.precedence() {
            let Some(c) = self.hands[hand.slot()].palm else {
                continue;
            };
            let Some((oi, _)) = scene.classify_indexed(c) else {
                continue;
            };
            let o = &scene.overlays[oi];
            overlays[oi].gradient.get_or_insert(Gradient {
                center: c,
                radius: GRADIENT_RADIUS_FRACTION * o.frame.diagonal(),
                hand,
            });
        }
    }
}
