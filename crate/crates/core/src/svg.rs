//! Static SVG export of a [`RenderState`] for offline inspection.
//!
//! Element order is fixed (overlays by z-order then id, series in table
//! order, markers right hand first) and numbers are printed with two
//! decimals, so snapshots of equal states are byte-identical and textual
//! diffs stay small.

use std::fmt::Write;

use crate::chart::resolve::{ChartView, ElementRef, ResolvedScene};
use crate::chart::spec::ChartKind;
use crate::chart::Rect;
use crate::interaction::state::{CloneKind, Orientation, OverlayState, RenderState};
use crate::landmark::Point2;

/// Output height in pixels; the width follows the scene aspect.
pub const HEIGHT_PX: f64 = 900.0;

const PALETTE: [&str; 8] = [
    "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948", "#b07aa1", "#ff9da7",
];

struct Canvas {
    w: f64,
    h: f64,
}

impl Canvas {
    fn x(&self, v: f64) -> String {
        num(v * self.w)
    }

    fn y(&self, v: f64) -> String {
        num(v * self.h)
    }

    fn pt(&self, p: Point2) -> String {
        format!("{},{}", self.x(p.x), self.y(p.y))
    }

    fn rect_attrs(&self, r: &Rect) -> String {
        format!(
            "x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\"",
            self.x(r.x),
            self.y(r.y),
            self.x(r.width),
            self.y(r.height)
        )
    }
}

fn num(v: f64) -> String {
    let s = format!("{v:.2}");
    // avoid "-0.00" flicker between equal states
    if s == "-0.00" {
        "0.00".to_owned()
    } else {
        s
    }
}

fn esc(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

fn color<'a>(ov: &'a OverlayState, key: &str, i: usize) -> &'a str {
    ov.colors.get(key).map(String::as_str).unwrap_or(PALETTE[i % PALETTE.len()])
}

fn emphasis(ov: &OverlayState, key: &str) -> &'static str {
    if ov.emphasized.contains(key) {
        " emphasized"
    } else if ov.deemphasized.contains(key) {
        " deemphasized"
    } else {
        ""
    }
}

fn opacity(ov: &OverlayState, key: &str) -> &'static str {
    if ov.deemphasized.contains(key) {
        "0.25"
    } else {
        "1"
    }
}

fn is_cloned(ov: &OverlayState, e: &ElementRef) -> bool {
    ov.cloned.iter().any(|c| c == e)
}

/// Renders `state` using the overlay geometry of `scene`, which must be the
/// scene the state was produced from.
pub fn render(state: &RenderState, scene: &ResolvedScene) -> String {
    let c = Canvas {
        w: (HEIGHT_PX * state.aspect).round(),
        h: HEIGHT_PX,
    };
    let mut ordered: Vec<(&String, &OverlayState)> =
        state.overlays.iter().filter(|(_, o)| o.visible).collect();
    ordered.sort_by(|a, b| a.1.z_order.cmp(&b.1.z_order).then_with(|| a.0.cmp(b.0)));

    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\" data-scene=\"{id}\" data-scene-index=\"{i}\">",
        w = num(c.w),
        h = num(c.h),
        id = esc(&state.scene_id),
        i = state.scene_index,
    );
    s.push_str("<defs>\n");
    for (id, ov) in &ordered {
        let _ = writeln!(
            s,
            "<clipPath id=\"clip-{}\"><rect {}/></clipPath>",
            esc(id),
            c.rect_attrs(&ov.plot)
        );
        if let Some(g) = &ov.gradient {
            let _ = writeln!(
                s,
                "<radialGradient id=\"grad-{}\" gradientUnits=\"userSpaceOnUse\" cx=\"{}\" cy=\"{}\" r=\"{}\"><stop offset=\"0\" stop-color=\"#ffffff\" stop-opacity=\"0.6\"/><stop offset=\"1\" stop-color=\"#ffffff\" stop-opacity=\"0\"/></radialGradient>",
                esc(id),
                c.x(g.center.x),
                c.y(g.center.y),
                c.y(g.radius)
            );
        }
    }
    s.push_str("</defs>\n");

    let mut bg_class = String::from("background");
    if state.background.darken {
        bg_class.push_str(" darken");
    }
    if state.background.grayscale {
        bg_class.push_str(" grayscale");
    }
    let bg_fill = if state.background.darken { "#000000" } else { "#202020" };
    let _ = writeln!(
        s,
        "<rect class=\"{bg_class}\" x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"{bg_fill}\"/>",
        num(c.w),
        num(c.h)
    );

    for (id, ov) in &ordered {
        let Some(resolved) = scene.overlay(id) else {
            continue;
        };
        let view = resolved.view(
            state.aspect,
            &ov.series,
            &ov.hidden,
            ov.effective_x_domain(),
            ov.y_domain,
        );
        overlay(&mut s, &c, id, ov, &view);
    }

    for cl in &state.clones {
        let kind = match cl.kind {
            CloneKind::TransformPayload => "transform",
            CloneKind::ComparePayload => "compare",
        };
        let tint = state
            .overlays
            .get(&cl.source_overlay)
            .map(|o| color(o, cl.element.label(), 0).to_owned())
            .unwrap_or_else(|| PALETTE[0].to_owned());
        let _ = writeln!(
            s,
            "<g class=\"clone {kind}\" id=\"{}\" data-source=\"{}\" data-hand=\"{:?}\"><rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{tint}\" fill-opacity=\"0.7\" stroke=\"#ffffff\"/><text x=\"{}\" y=\"{}\" fill=\"#ffffff\">{}</text></g>",
            esc(&cl.clone_id),
            esc(&cl.source_overlay),
            cl.tether,
            c.x(cl.pos.x - 0.03),
            c.y(cl.pos.y - 0.03),
            c.x(0.06),
            c.y(0.06),
            c.x(cl.pos.x),
            c.y(cl.pos.y - 0.04),
            esc(cl.element.label()),
        );
    }

    for (hand, m) in &state.markers {
        let class = if m.pinching { "marker pinching" } else { "marker" };
        let fill = if m.pinching { "#ff3b30" } else { "#34c759" };
        let _ = writeln!(
            s,
            "<circle class=\"{class}\" data-hand=\"{hand:?}\" cx=\"{}\" cy=\"{}\" r=\"8.00\" fill=\"{fill}\"/>",
            c.x(m.pos.x),
            c.y(m.pos.y)
        );
    }

    if let Some(t) = &state.transition {
        let _ = writeln!(
            s,
            "<desc class=\"transition\" data-from=\"{}\" data-to=\"{}\" data-start=\"{}\" data-end=\"{}\"/>",
            esc(&t.from_scene),
            esc(&t.to_scene),
            t.start_ms,
            t.end_ms()
        );
    }
    s.push_str("</svg>\n");
    s
}

fn overlay(s: &mut String, c: &Canvas, id: &str, ov: &OverlayState, view: &ChartView<'_>) {
    let _ = writeln!(
        s,
        "<g class=\"overlay\" id=\"overlay-{}\" data-kind=\"{:?}\" data-version=\"{}\">",
        esc(id),
        ov.kind,
        ov.version
    );
    let _ = writeln!(
        s,
        "<rect class=\"frame\" {} fill=\"#ffffff\" fill-opacity=\"0.05\"/>",
        c.rect_attrs(&ov.frame)
    );
    let _ = writeln!(s, "<g class=\"marks\" clip-path=\"url(#clip-{})\">", esc(id));
    match ov.kind {
        ChartKind::Bar | ChartKind::StackedBar => {
            let order: Vec<&str> = ov.series.iter().map(|s| s.id.as_str()).collect();
            for b in view.bar_rects() {
                let i = order.iter().position(|&k| k == b.series).unwrap_or(0);
                let el = ElementRef::Mark {
                    series: b.series.clone(),
                    index: b.index,
                };
                let mut class = format!("mark{}", emphasis(ov, &b.series));
                if is_cloned(ov, &el) || is_cloned(ov, &ElementRef::Series { series: b.series.clone() }) {
                    class.push_str(" cloned");
                }
                if ov.focus.is_some_and(|f| f.index == b.index) {
                    class.push_str(" focus");
                }
                let _ = writeln!(
                    s,
                    "<rect class=\"{class}\" data-series=\"{}\" data-index=\"{}\" {} fill=\"{}\" fill-opacity=\"{}\"/>",
                    esc(&b.series),
                    b.index,
                    c.rect_attrs(&b.rect),
                    color(ov, &b.series, i),
                    opacity(ov, &b.series)
                );
            }
        }
        ChartKind::Line => {
            for (i, sr) in ov.series.iter().enumerate() {
                if ov.hidden.contains(&sr.id) {
                    continue;
                }
                let d = polyline(c, sr.points.iter().map(|&[x, y]| (view.x.apply(x), view.y.apply(y))));
                let mut class = format!("line{}", emphasis(ov, &sr.id));
                if is_cloned(ov, &ElementRef::Series { series: sr.id.clone() }) {
                    class.push_str(" cloned");
                }
                let width = if ov.bold.contains(&sr.id) { "5.00" } else { "2.50" };
                let _ = writeln!(
                    s,
                    "<path class=\"{class}\" data-series=\"{}\" d=\"{d}\" fill=\"none\" stroke=\"{}\" stroke-width=\"{width}\" stroke-opacity=\"{}\"/>",
                    esc(&sr.id),
                    color(ov, &sr.id, i),
                    opacity(ov, &sr.id)
                );
            }
        }
        ChartKind::Area | ChartKind::StackedArea => {
            for (i, sr) in ov.series.iter().enumerate() {
                if ov.hidden.contains(&sr.id) {
                    continue;
                }
                let slices = view.band_slices(&sr.id);
                let upper = slices.iter().map(|b| (view.x.apply(b.x), view.y.apply(b.upper)));
                let lower = slices.iter().rev().map(|b| (view.x.apply(b.x), view.y.apply(b.lower)));
                let d = polygon(c, upper.chain(lower));
                let mut class = format!("band{}", emphasis(ov, &sr.id));
                if ov.revealed.contains(&sr.id) {
                    class.push_str(" revealed");
                }
                if is_cloned(ov, &ElementRef::Series { series: sr.id.clone() }) {
                    class.push_str(" cloned");
                }
                let _ = writeln!(
                    s,
                    "<path class=\"{class}\" data-series=\"{}\" d=\"{d}\" fill=\"{}\" fill-opacity=\"{}\"/>",
                    esc(&sr.id),
                    color(ov, &sr.id, i),
                    if ov.deemphasized.contains(&sr.id) { "0.25" } else { "0.8" }
                );
            }
        }
        ChartKind::Pie => {
            let center = view.pie_center();
            let r = view.pie_radius();
            for (i, w) in ov.wedges.iter().enumerate() {
                if w.end_deg <= w.start_deg {
                    continue;
                }
                let mut class = format!("wedge{}", emphasis(ov, &w.category));
                if ov.wedge.as_deref() == Some(w.category.as_str()) {
                    class.push_str(" highlight");
                }
                if is_cloned(ov, &ElementRef::Wedge { category: w.category.clone() }) {
                    class.push_str(" cloned");
                }
                let _ = writeln!(
                    s,
                    "<path class=\"{class}\" data-category=\"{}\" d=\"{}\" fill=\"{}\" fill-opacity=\"{}\"/>",
                    esc(&w.category),
                    wedge_path(c, center, r, w.start_deg, w.end_deg),
                    color(ov, &w.category, i),
                    opacity(ov, &w.category)
                );
            }
        }
        ChartKind::Legend => {
            let n = ov.categories.len().max(1) as f64;
            let h = ov.plot.height / n;
            for (i, cat) in ov.categories.iter().enumerate() {
                let row = Rect::new(ov.plot.x, ov.plot.y + i as f64 * h, ov.plot.width, h);
                let mut class = format!("swatch{}", emphasis(ov, cat));
                if ov.swatch.as_deref() == Some(cat.as_str()) {
                    class.push_str(" highlight");
                }
                let weight = if ov.bold.contains(cat) { "bold" } else { "normal" };
                let _ = writeln!(
                    s,
                    "<g class=\"{class}\" data-category=\"{}\"><rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\"/><text x=\"{}\" y=\"{}\" fill=\"#ffffff\" font-weight=\"{weight}\">{}</text></g>",
                    esc(cat),
                    c.x(row.x),
                    c.y(row.y + row.height * 0.2),
                    c.y(row.height * 0.6),
                    c.y(row.height * 0.6),
                    color(ov, cat, i),
                    c.x(row.x + row.height * 0.8 * c.h / c.w),
                    c.y(row.y + row.height * 0.7),
                    esc(cat)
                );
            }
        }
    }
    if ov.aggregate_band && !ov.total.is_empty() {
        let base = view.y.apply(ov.y_domain[0].max(0.0).min(ov.y_domain[1]));
        let top = ov.total.iter().map(|&[x, v]| (view.x.apply(x), view.y.apply(v)));
        let bottom = ov.total.iter().rev().map(|&[x, _]| (view.x.apply(x), base));
        let _ = writeln!(
            s,
            "<path class=\"total-band\" d=\"{}\" fill=\"none\" stroke=\"#ffffff\" stroke-width=\"3.00\" stroke-dasharray=\"8 4\"/>",
            polygon(c, top.chain(bottom))
        );
    }
    s.push_str("</g>\n");

    for line in &ov.reference_lines {
        let (class, x1, y1, x2, y2) = match line.orientation {
            Orientation::Vertical => ("reference-line vertical", line.at, ov.plot.top(), line.at, ov.plot.bottom()),
            Orientation::Horizontal => ("reference-line horizontal", ov.plot.left(), line.at, ov.plot.right(), line.at),
        };
        let _ = writeln!(
            s,
            "<line class=\"{class}\" data-value=\"{}\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#ffffff\" stroke-width=\"1.50\"/>",
            fmt_value(line.value),
            c.x(x1),
            c.y(y1),
            c.x(x2),
            c.y(y2)
        );
    }
    for label in &ov.value_labels {
        let _ = writeln!(
            s,
            "<text class=\"value-label\" data-series=\"{}\" x=\"{}\" y=\"{}\" fill=\"#ffffff\">{}</text>",
            esc(&label.series),
            c.x(label.pos.x),
            c.y(label.pos.y),
            fmt_value(label.value)
        );
    }
    if let Some(g) = &ov.gradient {
        let _ = writeln!(
            s,
            "<circle class=\"palm-gradient\" data-hand=\"{:?}\" cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"url(#grad-{})\" clip-path=\"url(#clip-{})\"/>",
            g.hand,
            c.x(g.center.x),
            c.y(g.center.y),
            c.y(g.radius),
            esc(id),
            esc(id)
        );
    }
    s.push_str("</g>\n");
}

fn fmt_value(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        num(v)
    }
}

fn polyline(c: &Canvas, pts: impl Iterator<Item = (f64, f64)>) -> String {
    let mut d = String::new();
    for (i, (x, y)) in pts.enumerate() {
        let _ = write!(d, "{}{},{}", if i == 0 { "M" } else { " L" }, c.x(x), c.y(y));
    }
    d
}

fn polygon(c: &Canvas, pts: impl Iterator<Item = (f64, f64)>) -> String {
    let mut d = polyline(c, pts);
    if !d.is_empty() {
        d.push_str(" Z");
    }
    d
}

/// Wedge outline with angles measured clockwise from 12 o'clock. The
/// radius is in height units so the pie stays circular on screen.
fn wedge_path(c: &Canvas, center: Point2, r: f64, start: f64, end: f64) -> String {
    let at = |deg: f64| {
        let a = deg.to_radians();
        Point2::new(center.x + a.sin() * r * c.h / c.w, center.y - a.cos() * r)
    };
    let rp = c.y(r);
    if end - start >= 360.0 - 1e-9 {
        let top = at(0.0);
        let bottom = at(180.0);
        return format!(
            "M{} A{rp},{rp} 0 1 1 {} A{rp},{rp} 0 1 1 {} Z",
            c.pt(top),
            c.pt(bottom),
            c.pt(top)
        );
    }
    let large = if end - start > 180.0 { 1 } else { 0 };
    format!(
        "M{} L{} A{rp},{rp} 0 {large} 1 {} Z",
        c.pt(center),
        c.pt(at(start)),
        c.pt(at(end))
    )
}
