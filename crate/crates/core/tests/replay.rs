mod common;

use std::sync::Arc;

use chirono_core::chart::Deck;
use chirono_core::gesture::GestureConfig;
use chirono_core::session::diff::fold;
use chirono_core::session::wire::Body;
use chirono_core::session::SessionConfig;
use chirono_core::trace::golden::{self, GoldenError, EVENTS_FILE};
use chirono_core::trace::{
    list_corpus, replay, snapshot, verify_corpus, verify_corpus_sequential, GoldenOutcome, ReplayError,
    ReplayMode, ReplayOptions, SnapshotError, Trace,
};
use chirono_core::tracegen::{at_data_x, TraceBuilder};

use common::{deck, fixtures, R};

fn corpus_trace(name: &str) -> Trace {
    Trace::load(&fixtures().join("corpus").join(format!("{name}.jsonl"))).unwrap()
}

fn fast(trace: &Trace) -> chirono_core::trace::ReplayOutput {
    replay(trace, deck(), &ReplayOptions::default()).unwrap()
}

#[test]
fn corpus_matches_goldens() {
    let entries = list_corpus(&fixtures().join("corpus")).unwrap();
    assert!(entries.len() >= 10, "corpus has {} traces", entries.len());
    let results = verify_corpus(&entries, &deck(), &fixtures().join("golden"));
    for r in &results {
        assert!(r.passed(), "{}: {:?}", r.name, r.outcome);
    }
    let seq = verify_corpus_sequential(&entries, &deck(), &fixtures().join("golden"));
    let names = |v: &[chirono_core::trace::CorpusResult]| v.iter().map(|r| r.name.clone()).collect::<Vec<_>>();
    assert_eq!(names(&results), names(&seq));
}

#[test]
fn empty_trace_gives_single_snapshot() {
    let out = fast(&Trace::default());
    assert!(out.events.is_empty());
    assert_eq!(out.stream.len(), 1);
    assert_eq!(out.stream[0].seq, 1);
    assert!(matches!(out.stream[0].body, Body::RenderFull(_)));
    assert_eq!(out.events_jsonl(), "");
}

#[test]
fn realtime_and_fast_agree() {
    let trace = corpus_trace("pointing_line");
    let a = fast(&trace);
    let opts = ReplayOptions {
        mode: ReplayMode::Realtime { speed: 50.0 },
        config: None,
    };
    let b = replay(&trace, deck(), &opts).unwrap();
    assert_eq!(a.events_jsonl(), b.events_jsonl());
    assert_eq!(a.render_jsonl(), b.render_jsonl());
}

#[test]
fn fold_of_stream_is_final_state() {
    for entry in list_corpus(&fixtures().join("corpus")).unwrap() {
        let out = fast(&Trace::load(&entry.path).unwrap());
        let Body::RenderFull(snapshot) = &out.stream[0].body else {
            panic!("stream must open with a snapshot");
        };
        let diffs = out.stream[1..].iter().map(|e| match &e.body {
            Body::RenderDiff(ops) => ops,
            other => panic!("unexpected {}", other.type_name()),
        });
        let folded = fold(snapshot, diffs.map(Vec::as_slice)).unwrap();
        assert_eq!(
            serde_json::to_string(&folded).unwrap(),
            serde_json::to_string(&*out.final_state).unwrap(),
            "{}",
            entry.name
        );
        let seqs: Vec<u64> = out.stream.iter().map(|e| e.seq).collect();
        assert_eq!(seqs, (1..=out.stream.len() as u64).collect::<Vec<_>>());
    }
}

#[test]
fn scene_file_change_is_caught_by_hash() {
    let path = fixtures().join("deck/scenes.json");
    let mut bytes = std::fs::read(&path).unwrap();
    bytes.extend_from_slice(b"\n");
    let edited = Arc::new(Deck::from_bytes(&bytes, path.parent().unwrap()).unwrap());
    let err = replay(&corpus_trace("pointing_line"), edited, &ReplayOptions::default()).unwrap_err();
    assert!(matches!(err, ReplayError::SceneHashMismatch { .. }), "{err}");
}

#[test]
fn dwell_change_diverges_at_first_dwell_sensitive_event() {
    let trace = corpus_trace("pointing_line");
    let baseline = fast(&trace);
    let opts = ReplayOptions {
        config: Some(SessionConfig {
            gesture: GestureConfig::uniform(300, 400),
            ..SessionConfig::default()
        }),
        ..ReplayOptions::default()
    };
    let perturbed = replay(&trace, deck(), &opts).unwrap();
    let golden_dir = fixtures().join("golden/pointing_line");
    assert_eq!(golden::compare(&baseline, &golden_dir).unwrap(), GoldenOutcome::Match);
    let GoldenOutcome::Diverged(d) = golden::compare(&perturbed, &golden_dir).unwrap() else {
        panic!("dwell change must diverge");
    };
    assert_eq!(d.file, EVENTS_FILE);
    assert_eq!(d.line, 1);
    // the first start event simply comes later
    assert_eq!(d.t_ms, Some(perturbed.events[0].t_ms));
    assert!(perturbed.events[0].t_ms > baseline.events[0].t_ms);
    assert_eq!(d.pointer, "/t_ms");
}

#[test]
fn missing_golden_is_reported() {
    let out = fast(&Trace::default());
    let dir = tempfile::tempdir().unwrap();
    assert!(matches!(
        golden::compare(&out, dir.path()),
        Err(GoldenError::MissingGolden(_))
    ));
    golden::bless(&out, dir.path()).unwrap();
    assert_eq!(golden::compare(&out, dir.path()).unwrap(), GoldenOutcome::Match);
}

#[test]
fn snapshots_show_highlights() {
    let d = deck();
    let trend = d.scenes[0].overlay("trend").unwrap();
    let mut b = TraceBuilder::new();
    b.hold(100);
    b.place(R, at_data_x(trend, 2006.0, 0.5).0, at_data_x(trend, 2006.0, 0.5).1).hold(600);
    let trace = b.build();
    let svgs = snapshot(&trace, Arc::clone(&d), &ReplayOptions::default(), &[0, 500]).unwrap();
    assert_eq!(svgs[0].matches("reference-line").count(), 0);
    assert_eq!(svgs[0].matches("class=\"marker").count(), 0);
    assert_eq!(svgs[1].matches("class=\"reference-line vertical\"").count(), 1);
    assert!(svgs[1].starts_with("<svg xmlns=\"http://www.w3.org/2000/svg\""));
    assert!(svgs[1].contains("class=\"marker\""));

    let err = snapshot(&trace, d, &ReplayOptions::default(), &[10_000]).unwrap_err();
    assert!(matches!(err, SnapshotError::TimestampOutOfRange { t_ms: 10_000, .. }));
}

#[test]
fn snapshot_shows_total_band_while_aggregating() {
    let trace = corpus_trace("reveal_aggregate");
    let out = fast(&trace);
    let on = out
        .stream
        .iter()
        .find(|e| matches!(&e.body, Body::RenderDiff(ops) if ops.iter().any(|o| o.path().ends_with("/aggregate_band"))))
        .unwrap()
        .t_ms;
    let svgs = snapshot(&trace, deck(), &ReplayOptions::default(), &[on, on + 100]).unwrap();
    for svg in &svgs {
        assert_eq!(svg.matches("class=\"total-band\"").count(), 1);
    }
    // identical states produce identical text
    let again = snapshot(&trace, deck(), &ReplayOptions::default(), &[on]).unwrap();
    assert_eq!(again[0], svgs[0]);
}

#[test]
fn snapshot_of_each_scene_renders_its_marks() {
    let d = deck();
    let trace = corpus_trace("deck_tour");
    let out = fast(&trace);
    let scene_changes: Vec<u64> = out
        .stream
        .iter()
        .filter(|e| matches!(&e.body, Body::RenderDiff(ops) if ops.iter().any(|o| o.path() == "/scene_index")))
        .map(|e| e.t_ms)
        .collect();
    let times: Vec<u64> = scene_changes.iter().map(|t| t + 550).collect();
    let svgs = snapshot(&trace, Arc::clone(&d), &ReplayOptions::default(), &times).unwrap();
    let joined = svgs.concat();
    for class in ["class=\"line", "class=\"wedge", "class=\"mark", "class=\"band", "class=\"swatch"] {
        assert!(joined.contains(class), "{class} missing");
    }
}
