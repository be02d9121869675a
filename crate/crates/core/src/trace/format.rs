//! JSON Lines trace files.
//!
//! An optional first line carries the header:
//!
//! ```json
//! {"format":"chirono-trace","version":1,"config":{...},"scene_hash":"<sha256>"}
//! ```
//!
//! Every further line is a record, sorted by `t_ms`:
//!
//! ```json
//! {"t_ms":0,"hands":[{"handedness":"Right","index":[0.4,0.5],"thumb":[0.5,0.5],"palm":[0.4,0.6],"conf":0.9}]}
//! {"t_ms":2000,"key":"next"}
//! {"t_ms":2500,"config":{"dwell_ms":300}}
//! ```

use std::io::{BufRead, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::gesture::{GestureConfig, GestureConfigPatch};
use crate::landmark::{IngestConfig, RawFrame};
use crate::scene::NavCommand;
use crate::session::{Command, SessionConfig};

pub const TRACE_FORMAT: &str = "chirono-trace";
pub const TRACE_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceHeader {
    pub format: String,
    pub version: u32,
    pub config: GestureConfig,
    #[serde(default)]
    pub ingest: IngestConfig,
    pub scene_hash: String,
}

impl TraceHeader {
    pub fn new(config: GestureConfig, ingest: IngestConfig, scene_hash: impl Into<String>) -> Self {
        Self {
            format: TRACE_FORMAT.to_owned(),
            version: TRACE_VERSION,
            config,
            ingest,
            scene_hash: scene_hash.into(),
        }
    }

    pub fn session_config(&self) -> SessionConfig {
        SessionConfig {
            gesture: self.config,
            ingest: self.ingest,
            ..SessionConfig::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Record {
    Key { t_ms: u64, key: NavCommand },
    Config { t_ms: u64, config: GestureConfigPatch },
    Frame(RawFrame),
}

impl Record {
    pub fn t_ms(&self) -> u64 {
        match self {
            Record::Frame(f) => f.t_ms,
            Record::Key { t_ms, .. } | Record::Config { t_ms, .. } => *t_ms,
        }
    }

    pub fn to_command(&self) -> Command {
        match self {
            Record::Frame(f) => Command::Frame(f.clone()),
            Record::Key { t_ms, key } => Command::Key { t_ms: *t_ms, key: *key },
            Record::Config { t_ms, config } => Command::Config {
                t_ms: *t_ms,
                patch: config.clone(),
            },
        }
    }

    pub fn from_command(cmd: &Command) -> Self {
        match cmd {
            Command::Frame(f) => Record::Frame(f.clone()),
            Command::Key { t_ms, key } => Record::Key { t_ms: *t_ms, key: *key },
            Command::Config { t_ms, patch } => Record::Config {
                t_ms: *t_ms,
                config: patch.clone(),
            },
        }
    }

    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("record serializes")
    }
}

#[derive(Debug, thiserror::Error)]
pub enum TraceError {
    #[error("reading trace: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {source}")]
    Parse {
        line: usize,
        #[source]
        source: serde_json::Error,
    },
    #[error("line {line}: header must be the first line")]
    MisplacedHeader { line: usize },
    #[error("line {line}: unsupported trace format {format:?} version {version}")]
    Unsupported {
        line: usize,
        format: String,
        version: u32,
    },
    #[error("line {line}: t_ms {t_ms} is earlier than the previous record ({prev} ms)")]
    Unsorted { line: usize, t_ms: u64, prev: u64 },
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trace {
    pub header: Option<TraceHeader>,
    pub records: Vec<Record>,
}

impl Trace {
    pub fn load(path: &Path) -> Result<Self, TraceError> {
        let file = std::fs::File::open(path)?;
        Self::read(std::io::BufReader::new(file))
    }

    pub fn parse(text: &str) -> Result<Self, TraceError> {
        Self::read(text.as_bytes())
    }

    pub fn read<R: BufRead>(reader: R) -> Result<Self, TraceError> {
        let mut trace = Trace::default();
        let mut prev: Option<u64> = None;
        for (i, line) in reader.lines().enumerate() {
            let line_no = i + 1;
            let line = line?;
            let text = line.trim();
            if text.is_empty() {
                continue;
            }
            let value: Value = serde_json::from_str(text).map_err(|source| TraceError::Parse {
                line: line_no,
                source,
            })?;
            let parse = |source| TraceError::Parse { line: line_no, source };
            if value.get("format").is_some() {
                if trace.header.is_some() || !trace.records.is_empty() {
                    return Err(TraceError::MisplacedHeader { line: line_no });
                }
                let header: TraceHeader = serde_json::from_value(value).map_err(parse)?;
                if header.format != TRACE_FORMAT || header.version != TRACE_VERSION {
                    return Err(TraceError::Unsupported {
                        line: line_no,
                        format: header.format,
                        version: header.version,
                    });
                }
                trace.header = Some(header);
                continue;
            }
            // Dispatch on the distinguishing key so a bad key or config
            // record is reported rather than read as an empty frame.
            let record = if value.get("key").is_some() {
                #[derive(Deserialize)]
                struct K {
                    t_ms: u64,
                    key: NavCommand,
                }
                let k: K = serde_json::from_value(value).map_err(parse)?;
                Record::Key { t_ms: k.t_ms, key: k.key }
            } else if value.get("config").is_some() {
                #[derive(Deserialize)]
                struct C {
                    t_ms: u64,
                    config: GestureConfigPatch,
                }
                let c: C = serde_json::from_value(value).map_err(parse)?;
                Record::Config {
                    t_ms: c.t_ms,
                    config: c.config,
                }
            } else {
                Record::Frame(serde_json::from_value(value).map_err(parse)?)
            };
            let t = record.t_ms();
            if let Some(p) = prev {
                if t < p {
                    return Err(TraceError::Unsorted {
                        line: line_no,
                        t_ms: t,
                        prev: p,
                    });
                }
            }
            prev = Some(t);
            trace.records.push(record);
        }
        Ok(trace)
    }

    pub fn write<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        if let Some(h) = &self.header {
            writeln!(w, "{}", serde_json::to_string(h).expect("header serializes"))?;
        }
        for r in &self.records {
            writeln!(w, "{}", r.to_line())?;
        }
        Ok(())
    }

    pub fn to_jsonl(&self) -> String {
        let mut buf = Vec::new();
        self.write(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("JSON is UTF-8")
    }

    pub fn commands(&self) -> impl Iterator<Item = Command> + '_ {
        self.records.iter().map(Record::to_command)
    }

    /// Timestamp of the last record.
    pub fn end_ms(&self) -> Option<u64> {
        self.records.last().map(Record::t_ms)
    }

    pub fn frame_count(&self) -> usize {
        self.records.iter().filter(|r| matches!(r, Record::Frame(_))).count()
    }
}
