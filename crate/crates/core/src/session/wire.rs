//! Wire protocol: JSON text messages in a common envelope.
//!
//! ```json
//! {"seq": 4, "t_ms": 1200, "type": "render_diff", "payload": [...]}
//! ```

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::gesture::{GestureConfigPatch, GestureEvent};
use crate::landmark::RawFrame;
use crate::scene::NavCommand;

use super::diff::DiffOp;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub seq: u64,
    pub t_ms: u64,
    #[serde(flatten)]
    pub body: Body,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "payload", rename_all = "snake_case")]
pub enum Body {
    /// Landmarks for one captured frame (presenter to server).
    Frame(RawFrame),
    /// Navigation command (presenter to server).
    Key(NavCommand),
    /// Gesture timing update (presenter to server).
    Config(GestureConfigPatch),
    RenderDiff(Vec<DiffOp>),
    RenderFull(Value),
    /// Debug stream of recognized gestures.
    Event(GestureEvent),
    Error(ErrorPayload),
}

impl Body {
    pub fn type_name(&self) -> &'static str {
        match self {
            Body::Frame(_) => "frame",
            Body::Key(_) => "key",
            Body::Config(_) => "config",
            Body::RenderDiff(_) => "render_diff",
            Body::RenderFull(_) => "render_full",
            Body::Event(_) => "event",
            Body::Error(_) => "error",
        }
    }

    /// Whether clients may send this message type.
    pub fn is_inbound(&self) -> bool {
        matches!(self, Body::Frame(_) | Body::Key(_) | Body::Config(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorCode {
    MalformedMessage,
    SecondPresenter,
    NotPresenter,
    OutOfOrder,
    Rejected,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorPayload {
    pub code: ErrorCode,
    pub message: String,
}

impl Envelope {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("envelope serializes")
    }

    pub fn parse(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::landmark::{Handedness, RawHand};

    #[test]
    fn frame_round_trip() {
        let env = Envelope {
            seq: 3,
            t_ms: 99,
            body: Body::Frame(RawFrame {
                t_ms: 99,
                hands: vec![RawHand {
                    handedness: Handedness::Left,
                    index: [0.25, 0.5],
                    thumb: [0.3, 0.5],
                    palm: [0.25, 0.6],
                    conf: 0.875,
                }],
            }),
        };
        let text = env.to_json();
        assert!(text.starts_with(r#"{"seq":3,"t_ms":99,"type":"frame","payload":{"#));
        assert_eq!(Envelope::parse(&text).unwrap(), env);
    }

    #[test]
    fn key_and_errors_parse() {
        let env = Envelope::parse(r#"{"type":"key","seq":1,"t_ms":5,"payload":"goto:2"}"#).unwrap();
        assert_eq!(env.body, Body::Key(NavCommand::Goto(2)));
        assert!(Envelope::parse(r#"{"type":"key","seq":1,"t_ms":5,"payload":"sideways"}"#).is_err());
        assert!(Envelope::parse(r#"{"type":"bogus","seq":1,"t_ms":5,"payload":null}"#).is_err());
        assert!(Envelope::parse(r#"{"type":"frame","t_ms":5,"payload":{"t_ms":5}}"#).is_err());
    }

    #[test]
    fn config_patch_rejects_unknown_fields() {
        let ok = Envelope::parse(r#"{"type":"config","seq":1,"t_ms":0,"payload":{"dwell_ms":300}}"#);
        assert!(ok.is_ok());
        let bad = Envelope::parse(r#"{"type":"config","seq":1,"t_ms":0,"payload":{"dwel_ms":300}}"#);
        assert!(bad.is_err());
    }
}
