//! Golden-file comparison for replay outputs.

use std::fmt;
use std::path::{Path, PathBuf};

use serde_json::Value;

use super::replay::ReplayOutput;

pub const EVENTS_FILE: &str = "events.jsonl";
pub const RENDER_FILE: &str = "render.jsonl";

#[derive(Debug, thiserror::Error)]
pub enum GoldenError {
    #[error("golden file {0} is missing")]
    MissingGolden(PathBuf),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// First point where output and golden disagree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Divergence {
    pub file: &'static str,
    /// 1-based line number.
    pub line: usize,
    pub t_ms: Option<u64>,
    /// JSON pointer of the first differing value within the line.
    pub pointer: String,
    pub expected: Option<String>,
    pub actual: Option<String>,
}

impl fmt::Display for Divergence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.file, self.line)?;
        if let Some(t) = self.t_ms {
            write!(f, " at t_ms={t}")?;
        }
        write!(f, " pointer {:?}", self.pointer)?;
        let show = |s: &Option<String>| s.clone().unwrap_or_else(|| "<missing>".into());
        write!(f, ": expected {} got {}", show(&self.expected), show(&self.actual))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GoldenOutcome {
    Match,
    Diverged(Divergence),
}

fn read(path: &Path) -> Result<String, GoldenError> {
    std::fs::read_to_string(path).map_err(|source| {
        if source.kind() == std::io::ErrorKind::NotFound {
            GoldenError::MissingGolden(path.to_owned())
        } else {
            GoldenError::Io {
                path: path.to_owned(),
                source,
            }
        }
    })
}

pub fn compare(out: &ReplayOutput, dir: &Path) -> Result<GoldenOutcome, GoldenError> {
    let events = read(&dir.join(EVENTS_FILE))?;
    let render = read(&dir.join(RENDER_FILE))?;
    if let Some(d) = first_divergence(EVENTS_FILE, &events, &out.events_jsonl()) {
        return Ok(GoldenOutcome::Diverged(d));
    }
    if let Some(d) = first_divergence(RENDER_FILE, &render, &out.render_jsonl()) {
        return Ok(GoldenOutcome::Diverged(d));
    }
    Ok(GoldenOutcome::Match)
}

/// Writes `out` as the new golden files.
pub fn bless(out: &ReplayOutput, dir: &Path) -> Result<(), GoldenError> {
    let io = |path: PathBuf| move |source| GoldenError::Io { path, source };
    std::fs::create_dir_all(dir).map_err(io(dir.to_owned()))?;
    for (name, body) in [(EVENTS_FILE, out.events_jsonl()), (RENDER_FILE, out.render_jsonl())] {
        let path = dir.join(name);
        std::fs::write(&path, body).map_err(io(path.clone()))?;
    }
    Ok(())
}

/// Line-by-line comparison; the first differing line is parsed as JSON to
/// locate the differing value.
pub fn first_divergence(file: &'static str, expected: &str, actual: &str) -> Option<Divergence> {
    let mut exp = expected.lines();
    let mut act = actual.lines();
    let mut line = 0;
    loop {
        line += 1;
        match (exp.next(), act.next()) {
            (None, None) => return None,
            (e, a) if e == a => continue,
            (e, a) => {
                let ev = e.and_then(|s| serde_json::from_str::<Value>(s).ok());
                let av = a.and_then(|s| serde_json::from_str::<Value>(s).ok());
                let t_ms = av
                    .as_ref()
                    .or(ev.as_ref())
                    .and_then(|v| v.get("t_ms"))
                    .and_then(Value::as_u64);
                let (pointer, expected, actual) = match (&ev, &av) {
                    (Some(x), Some(y)) => match pointer_of_difference(x, y, String::new()) {
                        Some((p, x, y)) => (p, x, y),
                        // textually different but equal as JSON
                        None => (String::new(), e.map(str::to_owned), a.map(str::to_owned)),
                    },
                    _ => (String::new(), e.map(str::to_owned), a.map(str::to_owned)),
                };
                return Some(Divergence {
                    file,
                    line,
                    t_ms,
                    pointer,
                    expected,
                    actual,
                });
            }
        }
    }
}

fn render_value(v: &Value) -> String {
    serde_json::to_string(v).expect("value serializes")
}

fn pointer_of_difference(a: &Value, b: &Value, path: String) -> Option<(String, Option<String>, Option<String>)> {
    if a == b {
        return None;
    }
    let esc = |k: &str| k.replace('~', "~0").replace('/', "~1");
    match (a, b) {
        (Value::Object(x), Value::Object(y)) => {
            let mut keys: Vec<&String> = x.keys().chain(y.keys()).collect();
            keys.sort();
            keys.dedup();
            for k in keys {
                let p = format!("{path}/{}", esc(k));
                match (x.get(k), y.get(k)) {
                    (Some(u), Some(v)) => {
                        if let Some(found) = pointer_of_difference(u, v, p) {
                            return Some(found);
                        }
                    }
                    (u, v) => return Some((p, u.map(render_value), v.map(render_value))),
                }
            }
            None
        }
        (Value::Array(x), Value::Array(y)) => {
            for i in 0..x.len().max(y.len()) {
                let p = format!("{path}/{i}");
                match (x.get(i), y.get(i)) {
                    (Some(u), Some(v)) => {
                        if let Some(found) = pointer_of_difference(u, v, p) {
                            return Some(found);
                        }
                    }
                    (u, v) => return Some((p, u.map(render_value), v.map(render_value))),
                }
            }
            None
        }
        _ => Some((path, Some(render_value(a)), Some(render_value(b)))),
    }
}
