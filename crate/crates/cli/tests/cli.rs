use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn scenes() -> PathBuf {
    fixtures().join("deck/scenes.json")
}

fn trace(name: &str) -> PathBuf {
    fixtures().join("corpus").join(format!("{name}.jsonl"))
}

fn chirono(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chirono"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .expect("binary runs")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn diff_golden_passes_on_the_corpus() {
    let golden = fixtures().join("golden/zoom_timeline");
    let out = chirono(&["diff-golden", s(&trace("zoom_timeline")), "--scenes", s(&scenes()), "--golden", s(&golden)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).starts_with("PASS"));
}

#[test]
fn diff_golden_reports_the_first_divergence() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("slow.json");
    std::fs::write(
        &config,
        r#"{"gesture": {"point": {"dwell_ms": 350, "timeout_ms": 400}, "palm": {"dwell_ms": 350, "timeout_ms": 400}}}"#,
    )
    .unwrap();
    let golden = fixtures().join("golden/pointing_line");
    let out = chirono(&[
        "diff-golden",
        s(&trace("pointing_line")),
        "--scenes",
        s(&scenes()),
        "--golden",
        s(&golden),
        "--config",
        s(&config),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let report = stdout(&out);
    assert!(report.starts_with("FAIL"), "{report}");
    assert!(report.contains("events.jsonl:1 at t_ms="), "{report}");
    assert!(report.contains(r#"pointer "/t_ms""#), "{report}");
}

#[test]
fn bless_then_compare() {
    let dir = tempfile::tempdir().unwrap();
    let golden = dir.path().join("g");
    let args = |extra: &[&'static str]| {
        let mut v = vec![
            "diff-golden".to_owned(),
            s(&trace("pan_corners")).to_owned(),
            "--scenes".to_owned(),
            s(&scenes()).to_owned(),
            "--golden".to_owned(),
            s(&golden).to_owned(),
        ];
        v.extend(extra.iter().map(|e| e.to_string()));
        v
    };
    let run = |v: Vec<String>| chirono(&v.iter().map(String::as_str).collect::<Vec<_>>());

    let missing = run(args(&[]));
    assert_eq!(missing.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("golden"));

    assert_eq!(run(args(&["--bless"])).status.code(), Some(0));
    assert_eq!(run(args(&[])).status.code(), Some(0));
    assert_eq!(
        std::fs::read(golden.join("render.jsonl")).unwrap(),
        std::fs::read(fixtures().join("golden/pan_corners/render.jsonl")).unwrap()
    );
}

#[test]
fn replay_writes_event_and_render_logs() {
    let dir = tempfile::tempdir().unwrap();
    let out = chirono(&[
        "replay",
        s(&trace("legend_link")),
        "--scenes",
        s(&scenes()),
        "--out-dir",
        s(dir.path()),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for file in ["events.jsonl", "render.jsonl"] {
        assert_eq!(
            std::fs::read(dir.path().join(file)).unwrap(),
            std::fs::read(fixtures().join("golden/legend_link").join(file)).unwrap(),
            "{file}"
        );
    }

    let piped = chirono(&["replay", s(&trace("legend_link")), "--scenes", s(&scenes())]);
    assert_eq!(
        piped.stdout,
        std::fs::read(fixtures().join("golden/legend_link/render.jsonl")).unwrap()
    );
}

#[test]
fn scene_edits_are_caught() {
    let dir = tempfile::tempdir().unwrap();
    // keep relative CSV paths resolvable by editing a copy in place
    let deck_dir = dir.path().join("deck");
    std::fs::create_dir(&deck_dir).unwrap();
    for entry in std::fs::read_dir(fixtures().join("deck")).unwrap() {
        let p = entry.unwrap().path();
        std::fs::copy(&p, deck_dir.join(p.file_name().unwrap())).unwrap();
    }
    let edited = deck_dir.join("scenes.json");
    let mut bytes = std::fs::read(&edited).unwrap();
    bytes.extend_from_slice(b"\n");
    std::fs::write(&edited, bytes).unwrap();

    let out = chirono(&[
        "diff-golden",
        s(&trace("pointing_line")),
        "--scenes",
        s(&edited),
        "--golden",
        s(&fixtures().join("golden/pointing_line")),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("hash"));
}

#[test]
fn snapshots_are_written_per_time() {
    let dir = tempfile::tempdir().unwrap();
    let out = chirono(&[
        "snapshot",
        s(&trace("pointing_line")),
        "--scenes",
        s(&scenes()),
        "--at",
        "0,1200",
        "--out-dir",
        s(dir.path()),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for t in [0, 1200] {
        let svg = std::fs::read_to_string(dir.path().join(format!("snapshot-{t}.svg"))).unwrap();
        assert!(svg.starts_with("<svg"));
    }

    let late = chirono(&[
        "snapshot",
        s(&trace("pointing_line")),
        "--scenes",
        s(&scenes()),
        "--at",
        "99999999",
        "--out-dir",
        s(dir.path()),
    ]);
    assert_eq!(late.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(chirono(&[]).status.code(), Some(2));
    assert_eq!(chirono(&["replay"]).status.code(), Some(2));
    assert_eq!(chirono(&["frobnicate"]).status.code(), Some(2));
    let bad_scenes = chirono(&["serve", "--scenes", "/nonexistent/scenes.json", "--listen", "127.0.0.1:0"]);
    assert_eq!(bad_scenes.status.code(), Some(2));
    let bad_listen = chirono(&["serve", "--scenes", s(&scenes()), "--listen", "not-an-address"]);
    assert_eq!(bad_listen.status.code(), Some(2));
}
