//! Trace recording, replay and golden verification.

pub mod format;
pub mod golden;
pub mod replay;

use std::path::{Path, PathBuf};
use std::sync::Arc;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::chart::Deck;

pub use format::{Record, Trace, TraceError, TraceHeader};
pub use golden::{Divergence, GoldenError, GoldenOutcome};
pub use replay::{replay, states_at, ReplayError, ReplayMode, ReplayOptions, ReplayOutput};

/// A named trace in a corpus directory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusEntry {
    pub name: String,
    pub path: PathBuf,
}

/// All `*.jsonl` traces in `dir`, sorted by name.
pub fn list_corpus(dir: &Path) -> std::io::Result<Vec<CorpusEntry>> {
    let mut entries = Vec::new();
    for entry in std::fs::read_dir(dir)? {
        let path = entry?.path();
        if path.extension().is_some_and(|e| e == "jsonl") {
            let name = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            entries.push(CorpusEntry { name, path });
        }
    }
    entries.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(entries)
}

#[derive(Debug)]
pub struct CorpusResult {
    pub name: String,
    pub outcome: Result<GoldenOutcome, String>,
}

impl CorpusResult {
    pub fn passed(&self) -> bool {
        matches!(self.outcome, Ok(GoldenOutcome::Match))
    }
}

fn verify_one(entry: &CorpusEntry, deck: &Arc<Deck>, golden_root: &Path) -> CorpusResult {
    let outcome = (|| {
        let trace = Trace::load(&entry.path).map_err(|e| e.to_string())?;
        let out = replay(&trace, Arc::clone(deck), &ReplayOptions::default()).map_err(|e| e.to_string())?;
        golden::compare(&out, &golden_root.join(&entry.name)).map_err(|e| e.to_string())
    })();
    CorpusResult {
        name: entry.name.clone(),
        outcome,
    }
}

/// Replays every trace against its golden directory `golden_root/<name>`.
/// Traces are independent, so with the `parallel` feature they are
/// verified concurrently; results keep corpus order either way.
pub fn verify_corpus(entries: &[CorpusEntry], deck: &Arc<Deck>, golden_root: &Path) -> Vec<CorpusResult> {
    #[cfg(feature = "parallel")]
    {
        entries.par_iter().map(|e| verify_one(e, deck, golden_root)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        verify_corpus_sequential(entries, deck, golden_root)
    }
}

pub fn verify_corpus_sequential(entries: &[CorpusEntry], deck: &Arc<Deck>, golden_root: &Path) -> Vec<CorpusResult> {
    entries.iter().map(|e| verify_one(e, deck, golden_root)).collect()
}

/// Replays many traces in fast mode.
pub fn replay_all(traces: &[Trace], deck: &Arc<Deck>) -> Vec<Result<ReplayOutput, ReplayError>> {
    #[cfg(feature = "parallel")]
    {
        traces
            .par_iter()
            .map(|t| replay(t, Arc::clone(deck), &ReplayOptions::default()))
            .collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        replay_all_sequential(traces, deck)
    }
}

pub fn replay_all_sequential(traces: &[Trace], deck: &Arc<Deck>) -> Vec<Result<ReplayOutput, ReplayError>> {
    traces
        .iter()
        .map(|t| replay(t, Arc::clone(deck), &ReplayOptions::default()))
        .collect()
}

#[derive(Debug, thiserror::Error)]
pub enum SnapshotError {
    #[error("timestamp {t_ms} is past the end of the trace ({end_ms} ms)")]
    TimestampOutOfRange { t_ms: u64, end_ms: u64 },
    #[error(transparent)]
    Replay(#[from] ReplayError),
}

/// One SVG document per requested time, rendering the state after every
/// record up to and including that time. Times before the first record
/// show the initial scene.
pub fn snapshot(
    trace: &Trace,
    deck: Arc<Deck>,
    opts: &ReplayOptions,
    times: &[u64],
) -> Result<Vec<String>, SnapshotError> {
    let end_ms = trace.end_ms().unwrap_or(0);
    if let Some(&t_ms) = times.iter().find(|&&t| t > end_ms) {
        return Err(SnapshotError::TimestampOutOfRange { t_ms, end_ms });
    }
    let states = states_at(trace, Arc::clone(&deck), opts, times)?;
    Ok(states
        .iter()
        .map(|s| crate::svg::render(s, &deck.scenes[s.scene_index]))
        .collect())
}
