//! Chart model: scene files, data tables, scales and screen geometry.

pub mod geometry;
pub mod resolve;
pub mod scale;
pub mod spec;
pub mod table;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

pub use geometry::{Rect, Region, RegionTag};
pub use resolve::{ChartView, ElementRef, ResolvedChart, ResolvedOverlay, ResolvedScene, Series, Wedge};
pub use scale::{nearest_index, BandScale, LinearScale, Scale};
pub use spec::{ChartKind, ChartSpec, OverlaySpec, SceneFile, SceneSpec, TransitionStyle};
pub use table::DataTable;

#[derive(Debug, thiserror::Error)]
pub enum ChartError {
    #[error("overlay {overlay}: degenerate {axis} domain")]
    DegenerateDomain { overlay: String, axis: &'static str },
    #[error("overlay {overlay}: x values of series {series} are not strictly increasing")]
    UnsortedX { overlay: String, series: String },
    #[error("overlay {overlay}: series {series} has no value in row {row}")]
    MissingValue {
        overlay: String,
        series: String,
        row: usize,
    },
    #[error("overlay {overlay}: stacked series do not share x values")]
    MisalignedSeries { overlay: String },
    #[error("overlay {overlay}: unknown table {table}")]
    UnknownTable { overlay: String, table: String },
    #[error("overlay {overlay}: unknown field {field}")]
    UnknownField { overlay: String, field: String },
    #[error("overlay {overlay}: unknown series {series}")]
    UnknownSeries { overlay: String, series: String },
    #[error("overlay {overlay}: missing {what}")]
    MissingField { overlay: String, what: String },
    #[error("overlay {overlay}: frame must have positive size inside the unit square")]
    InvalidFrame { overlay: String },
    #[error("overlay {overlay}: margins must be non-negative and leave a plot area")]
    InvalidMargins { overlay: String },
    #[error("scene {scene}: duplicate overlay id {overlay}")]
    DuplicateOverlay { scene: String, overlay: String },
    #[error("scene {scene}: binding refers to unknown overlay {overlay}")]
    UnknownOverlay { scene: String, overlay: String },
    #[error("table {table}: {reason}")]
    InvalidTable { table: String, reason: String },
    #[error("{path}: {reason}")]
    Csv { path: PathBuf, reason: String },
    #[error("scene file has no scenes")]
    EmptyDeck,
    #[error("aspect ratio must be positive, got {0}")]
    InvalidAspect(f64),
    #[error("band scales cannot be inverted")]
    NonInvertibleScale,
    #[error("reading {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("scene file: {0}")]
    Json(#[from] serde_json::Error),
}

/// A loaded, validated scene file.
#[derive(Debug, Clone)]
pub struct Deck {
    pub file: SceneFile,
    pub tables: BTreeMap<String, DataTable>,
    pub scenes: Vec<ResolvedScene>,
    /// Lowercase hex SHA-256 of the scene file bytes.
    pub hash: String,
}

impl Deck {
    pub fn load(path: &Path) -> Result<Self, ChartError> {
        let bytes = std::fs::read(path).map_err(|source| ChartError::Io {
            path: path.to_owned(),
            source,
        })?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        Self::from_bytes(&bytes, base)
    }

    /// Parses scene JSON; CSV tables resolve against `base_dir`.
    pub fn from_bytes(bytes: &[u8], base_dir: &Path) -> Result<Self, ChartError> {
        let file: SceneFile = serde_json::from_slice(bytes)?;
        let hash = hex::encode(Sha256::digest(bytes));
        Self::from_file(file, base_dir, hash)
    }

    pub fn from_file(file: SceneFile, base_dir: &Path, hash: String) -> Result<Self, ChartError> {
        if file.scenes.is_empty() {
            return Err(ChartError::EmptyDeck);
        }
        if !(file.aspect.is_finite() && file.aspect > 0.0) {
            return Err(ChartError::InvalidAspect(file.aspect));
        }
        let mut tables = BTreeMap::new();
        for (id, src) in &file.tables {
            let t = src.load(base_dir)?;
            t.validate(id)?;
            tables.insert(id.clone(), t);
        }
        let scenes = file
            .scenes
            .iter()
            .map(|s| ResolvedScene::resolve(s, &tables, file.aspect))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            file,
            tables,
            scenes,
            hash,
        })
    }

    pub fn len(&self) -> usize {
        self.scenes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scenes.is_empty()
    }
}
