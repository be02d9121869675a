//! Regenerates the regression corpus under `fixtures/corpus` and blesses
//! the matching goldens under `fixtures/golden`.
//!
//! ```text
//! cargo run -p chirono-core --example gen_corpus
//! ```
//!
//! Review the golden diff before committing.

use std::path::PathBuf;
use std::sync::Arc;

use chirono_core::chart::{Deck, ResolvedOverlay};
use chirono_core::gesture::{GestureConfig, GestureConfigPatch};
use chirono_core::landmark::{Handedness, IngestConfig};
use chirono_core::scene::NavCommand;
use chirono_core::trace::{golden, replay, ReplayOptions, Trace, TraceHeader};
use chirono_core::tracegen::{at_data_x, in_frame, in_plot, TraceBuilder};

const R: Handedness = Handedness::Right;
const L: Handedness = Handedness::Left;

/// Time for a pinch to be recognized or released with default dwell.
const DWELL: u64 = 300;
/// Long enough for a scene transition to finish.
const SETTLE: u64 = 600;

struct Ctx {
    deck: Arc<Deck>,
}

impl Ctx {
    fn overlay(&self, scene: &str, id: &str) -> &ResolvedOverlay {
        let s = self.deck.scenes.iter().find(|s| s.id == scene).expect("scene");
        s.overlay(id).expect("overlay")
    }

    fn index(&self, scene: &str) -> usize {
        self.deck.scenes.iter().position(|s| s.id == scene).expect("scene")
    }

    /// Builder with a header, already on `scene` and past its transition.
    fn start(&self, scene: &str) -> TraceBuilder {
        let mut b = TraceBuilder::new().header(TraceHeader::new(
            GestureConfig::default(),
            IngestConfig::default(),
            self.deck.hash.clone(),
        ));
        let i = self.index(scene);
        if i > 0 {
            b.key(NavCommand::Goto(i)).gap(SETTLE);
        }
        b
    }
}

fn put(b: &mut TraceBuilder, h: Handedness, p: (f64, f64)) {
    b.place(h, p.0, p.1);
}

fn go(b: &mut TraceBuilder, h: Handedness, p: (f64, f64), ms: u64) {
    b.move_to(h, p.0, p.1, ms);
}

/// Pinch at the current spot, long enough to be recognized.
fn pinch(b: &mut TraceBuilder, h: Handedness) {
    b.set_pinch(h, true).hold(DWELL);
}

fn release(b: &mut TraceBuilder, h: Handedness) {
    b.set_pinch(h, false).hold(DWELL);
}

fn leave(b: &mut TraceBuilder, hands: &[Handedness]) {
    for &h in hands {
        b.remove(h);
    }
    b.hold(SETTLE);
}

fn pointing(c: &Ctx) -> Trace {
    let trend = c.overlay("pointing", "trend");
    let mut b = c.start("pointing");
    b.hold(100);
    put(&mut b, R, at_data_x(trend, 2003.0, 0.45));
    b.hold(400);
    go(&mut b, R, at_data_x(trend, 2012.0, 0.45), 900);
    b.hold(300);
    // left side margin: horizontal reference line
    go(&mut b, R, in_frame(trend, 0.04, 0.5), 300);
    b.hold(300);
    leave(&mut b, &[R]);
    b.build()
}

fn legend_link(c: &Ctx) -> Trace {
    let legend = c.overlay("legend", "gen-legend");
    let lines = c.overlay("legend", "gen-lines");
    let mut b = c.start("legend");
    put(&mut b, R, in_plot(legend, 0.5, 0.5));
    b.hold(500);
    go(&mut b, R, in_plot(legend, 0.5, 0.85), 200);
    b.hold(300);
    go(&mut b, R, at_data_x(lines, 1995.0, 0.5), 600);
    b.hold(400);
    leave(&mut b, &[R]);
    b.build()
}

fn pie_bars(c: &Ctx) -> Trace {
    let pie = c.overlay("pie-bars", "region-pie");
    let bars = c.overlay("pie-bars", "region-bars");
    let mut b = c.start("pie-bars");
    put(&mut b, R, in_plot(pie, 0.65, 0.3));
    b.hold(500);
    go(&mut b, R, in_plot(pie, 0.3, 0.75), 400);
    b.hold(300);
    put(&mut b, L, in_plot(bars, 0.6, 0.6));
    b.hold(500);
    leave(&mut b, &[R, L]);
    b.build()
}

fn shared_domain(c: &Ctx) -> Trace {
    let energy = c.overlay("shared-domain", "energy-bars");
    let emissions = c.overlay("shared-domain", "emissions-area");
    let mut b = c.start("shared-domain");
    put(&mut b, R, at_data_x(energy, 2005.0, 0.5));
    b.hold(500);
    go(&mut b, R, at_data_x(energy, 2011.0, 0.5), 600);
    b.hold(200);
    put(&mut b, L, at_data_x(emissions, 2002.0, 0.6));
    b.hold(500);
    leave(&mut b, &[L]);
    go(&mut b, R, in_frame(energy, 0.96, 0.4), 300);
    b.hold(300);
    leave(&mut b, &[R]);
    b.build()
}

fn transform(c: &Ctx) -> Trace {
    let enrollment = c.overlay("transform", "enrollment");
    let cost = c.overlay("transform", "cost");
    let mut b = c.start("transform");
    put(&mut b, R, at_data_x(enrollment, 2010.0, 0.85));
    b.hold(300);
    pinch(&mut b, R);
    go(&mut b, R, in_plot(cost, 0.5, 0.5), 800);
    b.hold(200);
    release(&mut b, R);
    b.hold(300);
    // a second drop lands in the background and changes nothing
    put(&mut b, R, at_data_x(enrollment, 2008.0, 0.85));
    b.hold(300);
    pinch(&mut b, R);
    go(&mut b, R, (0.5, 0.85), 500);
    release(&mut b, R);
    leave(&mut b, &[R]);
    b.build()
}

fn compare(c: &Ctx) -> Trace {
    let budget = c.overlay("compare", "budget");
    let step = budget.plot.width / budget.chart.bands.len() as f64;
    let bar = |i: usize, s: f64| {
        (
            budget.plot.x + (i as f64 + 0.5) * step + s * 0.2 * step,
            budget.plot.y + 0.95 * budget.plot.height,
        )
    };
    let mut b = c.start("compare");
    put(&mut b, R, bar(0, -1.0));
    b.hold(300);
    pinch(&mut b, R);
    put(&mut b, L, bar(2, 1.0));
    b.hold(300);
    pinch(&mut b, L);
    b.move_both((0.55, 0.5), (0.62, 0.5), 700);
    b.hold(300);
    release(&mut b, R);
    release(&mut b, L);
    leave(&mut b, &[R, L]);
    b.build()
}

fn zoom_timeline(c: &Ctx) -> Trace {
    let births = c.overlay("timeline", "births");
    let mut b = c.start("timeline");
    put(&mut b, R, at_data_x(births, 1970.0, 0.9));
    put(&mut b, L, at_data_x(births, 1976.0, 0.9));
    b.hold(300);
    b.set_pinch(R, true).set_pinch(L, true).hold(DWELL);
    b.set_pinch(R, false).set_pinch(L, false).hold(DWELL);
    leave(&mut b, &[R, L]);
    // point inside the zoomed view
    put(&mut b, R, in_plot(births, 0.4, 0.5));
    b.hold(500);
    leave(&mut b, &[R]);
    // both hands in the top margin zoom back out
    put(&mut b, R, in_frame(births, 0.3, 0.05));
    put(&mut b, L, in_frame(births, 0.7, 0.05));
    b.hold(300);
    b.set_pinch(R, true).set_pinch(L, true).hold(DWELL);
    b.set_pinch(R, false).set_pinch(L, false).hold(DWELL);
    leave(&mut b, &[R, L]);
    b.build()
}

fn zoom_free_span(c: &Ctx) -> Trace {
    let births = c.overlay("timeline", "births");
    let mut b = c.start("timeline");
    put(&mut b, R, at_data_x(births, 1990.0, 0.9));
    put(&mut b, L, at_data_x(births, 2008.0, 0.9));
    b.hold(200);
    b.set_pinch(R, true).set_pinch(L, true).hold(DWELL);
    b.set_pinch(R, false).set_pinch(L, false).hold(DWELL);
    leave(&mut b, &[R, L]);
    // one hand in each side margin zooms out
    put(&mut b, R, in_frame(births, 0.97, 0.5));
    put(&mut b, L, in_frame(births, 0.03, 0.5));
    b.hold(200);
    b.set_pinch(R, true).set_pinch(L, true).hold(DWELL);
    b.set_pinch(R, false).set_pinch(L, false).hold(DWELL);
    leave(&mut b, &[R, L]);
    b.build()
}

fn pan(c: &Ctx) -> Trace {
    let births = c.overlay("timeline", "births");
    let mut b = c.start("timeline");
    put(&mut b, R, at_data_x(births, 1966.0, 0.9));
    put(&mut b, L, at_data_x(births, 1978.0, 0.9));
    b.hold(200);
    b.set_pinch(R, true).set_pinch(L, true).hold(DWELL);
    b.set_pinch(R, false).set_pinch(L, false).hold(DWELL);
    leave(&mut b, &[R, L]);
    for corner in [0.97, 0.97, 0.03, 0.03, 0.03, 0.03] {
        put(&mut b, R, in_frame(births, corner, 0.95));
        b.hold(200);
        pinch(&mut b, R);
        // a sweeping flourish after recognition does nothing
        go(&mut b, R, in_frame(births, 0.5, 0.95), 300);
        release(&mut b, R);
        leave(&mut b, &[R]);
    }
    b.build()
}

fn reveal_aggregate(c: &Ctx) -> Trace {
    let comp = c.overlay("bands", "compensation");
    let view = comp.static_view(c.deck.scenes[c.index("bands")].aspect);
    let slice = view.band_slices("benefits")[5];
    let inside = (
        view.x.apply(slice.x),
        view.y.apply((slice.lower + slice.upper) / 2.0),
    );
    let mut b = c.start("bands");
    put(&mut b, R, inside);
    b.hold(300);
    pinch(&mut b, R);
    release(&mut b, R);
    leave(&mut b, &[R]);
    put(&mut b, R, in_plot(comp, 0.75, 0.7));
    put(&mut b, L, in_plot(comp, 0.25, 0.7));
    b.hold(300);
    b.set_pinch(R, true).set_pinch(L, true).hold(DWELL);
    b.move_both(in_plot(comp, 0.85, 0.4), in_plot(comp, 0.15, 0.4), 600);
    b.hold(300);
    b.set_pinch(R, false).set_pinch(L, false).hold(DWELL);
    leave(&mut b, &[R, L]);
    b.build()
}

fn deck_tour(c: &Ctx) -> Trace {
    let mut b = c.start("pointing");
    b.hold(100);
    for (i, scene) in c.deck.scenes.iter().enumerate() {
        if i > 0 {
            b.key(NavCommand::Next).hold(SETTLE);
        }
        let o = scene.overlays.iter().find(|o| o.visible).expect("visible overlay");
        put(&mut b, R, in_plot(o, 0.5, 0.5));
        b.hold(400);
        go(&mut b, R, in_plot(o, 0.7, 0.4), 300);
        leave(&mut b, &[R]);
    }
    // past the end clamps; then jump around
    b.key(NavCommand::Next).hold(SETTLE);
    b.key(NavCommand::Goto(2)).hold(200);
    // navigation mid-transition cancels into the new target
    b.key(NavCommand::Prev).hold(SETTLE);
    b.key(NavCommand::Goto(99)).hold(SETTLE);
    b.build()
}

fn dropout(c: &Ctx) -> Trace {
    let trend = c.overlay("pointing", "trend");
    let mut b = c.start("pointing");
    put(&mut b, R, at_data_x(trend, 2005.0, 0.4));
    b.hold(400);
    // bridged by the timeout
    b.dropout(200);
    b.hold(300);
    b.dropout(350);
    b.hold(300);
    // long enough to end the gesture
    b.dropout(700);
    b.hold(400);
    leave(&mut b, &[R]);
    b.build()
}

fn config_change(c: &Ctx) -> Trace {
    let trend = c.overlay("pointing", "trend");
    let mut b = c.start("pointing");
    b.config(GestureConfigPatch {
        dwell_ms: Some(600),
        ..GestureConfigPatch::default()
    });
    put(&mut b, R, at_data_x(trend, 2004.0, 0.4));
    b.hold(800);
    leave(&mut b, &[R]);
    b.config(GestureConfigPatch {
        dominant_hand: Some(L),
        dwell_ms: Some(100),
        ..GestureConfigPatch::default()
    });
    put(&mut b, R, at_data_x(trend, 2004.0, 0.4));
    put(&mut b, L, at_data_x(trend, 2010.0, 0.4));
    b.hold(400);
    leave(&mut b, &[R, L]);
    b.build()
}

type Scenario = (&'static str, fn(&Ctx) -> Trace);

fn main() {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures");
    let deck = Arc::new(Deck::load(&root.join("deck/scenes.json")).expect("deck loads"));
    let c = Ctx { deck };
    let scenarios: [Scenario; 13] = [
        ("compare_clones", compare),
        ("config_change", config_change),
        ("deck_tour", deck_tour),
        ("dropout_debounce", dropout),
        ("legend_link", legend_link),
        ("pan_corners", pan),
        ("pie_bars_link", pie_bars),
        ("pointing_line", pointing),
        ("reveal_aggregate", reveal_aggregate),
        ("shared_domain", shared_domain),
        ("transform_multiply", transform),
        ("zoom_free_span", zoom_free_span),
        ("zoom_timeline", zoom_timeline),
    ];
    std::fs::create_dir_all(root.join("corpus")).expect("corpus dir");
    for (name, build) in scenarios {
        let trace = build(&c);
        std::fs::write(root.join("corpus").join(format!("{name}.jsonl")), trace.to_jsonl()).expect("write trace");
        let out = replay(&trace, Arc::clone(&c.deck), &ReplayOptions::default()).expect("replays");
        golden::bless(&out, &root.join("golden").join(name)).expect("bless");
        println!(
            "{name}: {} records, {} events, {} render messages",
            trace.records.len(),
            out.events.len(),
            out.stream.len()
        );
    }
}
