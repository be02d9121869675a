//! Deterministic engine for gesture-driven chart presentations: landmark
//! ingestion, gesture recognition, chart interactions, scene navigation,
//! session fan-out, and trace replay.

pub mod chart;
pub mod gesture;
pub mod interaction;
pub mod landmark;
pub mod scene;
pub mod session;
pub mod trace;
pub mod svg;
pub mod tracegen;
