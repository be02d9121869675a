//! Rectangles and region tags in normalized screen space.

use serde::{Deserialize, Serialize};

use crate::landmark::Point2;

use super::spec::Margins;

/// Axis-aligned rectangle; containment is half-open on the right and bottom.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x: f64,
    pub y: f64,
    pub width: f64,
    pub height: f64,
}

impl Rect {
    pub const UNIT: Rect = Rect {
        x: 0.0,
        y: 0.0,
        width: 1.0,
        height: 1.0,
    };

    pub const fn new(x: f64, y: f64, width: f64, height: f64) -> Self {
        Self {
            x,
            y,
            width,
            height,
        }
    }

    pub fn left(&self) -> f64 {
        self.x
    }

    pub fn right(&self) -> f64 {
        self.x + self.width
    }

    pub fn top(&self) -> f64 {
        self.y
    }

    pub fn bottom(&self) -> f64 {
        self.y + self.height
    }

    pub fn center(&self) -> Point2 {
        Point2::new(self.x + self.width / 2.0, self.y + self.height / 2.0)
    }

    pub fn diagonal(&self) -> f64 {
        self.width.hypot(self.height)
    }

    pub fn contains(&self, p: Point2) -> bool {
        p.x >= self.left() && p.x < self.right() && p.y >= self.top() && p.y < self.bottom()
    }

    /// True when the rectangle has positive area and lies inside `[0,1]²`.
    pub fn is_normalized(&self) -> bool {
        let finite = [self.x, self.y, self.width, self.height]
            .iter()
            .all(|v| v.is_finite());
        finite
            && self.width > 0.0
            && self.height > 0.0
            && self.x >= 0.0
            && self.y >= 0.0
            && self.right() <= 1.0 + 1e-12
            && self.bottom() <= 1.0 + 1e-12
    }

    /// The plot interior left after reserving margins (fractions of this
    /// rectangle's size).
    pub fn inset(&self, m: &Margins) -> Rect {
        Rect {
            x: self.x + m.left * self.width,
            y: self.y + m.top * self.height,
            width: self.width * (1.0 - m.left - m.right),
            height: self.height * (1.0 - m.top - m.bottom),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RegionTag {
    Interior,
    LeftMargin,
    RightMargin,
    TopMargin,
    BottomMargin,
    BottomLeftCorner,
    BottomRightCorner,
    LegendSwatch(String),
    PieWedge(String),
    Outside,
}

impl RegionTag {
    pub fn is_side_margin(&self) -> bool {
        matches!(self, RegionTag::LeftMargin | RegionTag::RightMargin)
    }

    pub fn is_margin(&self) -> bool {
        matches!(
            self,
            RegionTag::LeftMargin
                | RegionTag::RightMargin
                | RegionTag::TopMargin
                | RegionTag::BottomMargin
                | RegionTag::BottomLeftCorner
                | RegionTag::BottomRightCorner
        )
    }

    /// Anywhere inside an overlay's plot rectangle.
    pub fn is_plot(&self) -> bool {
        matches!(
            self,
            RegionTag::Interior | RegionTag::LegendSwatch(_) | RegionTag::PieWedge(_)
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Region {
    pub tag: RegionTag,
    pub overlay_id: Option<String>,
}

impl Region {
    pub fn outside() -> Self {
        Self {
            tag: RegionTag::Outside,
            overlay_id: None,
        }
    }
}

/// Frame-level partition shared by every chart kind: the plot interior,
/// four margins, and the two bottom corners. Top corners belong to the top
/// margin. Returns `None` outside the frame.
pub fn frame_region(frame: &Rect, plot: &Rect, p: Point2) -> Option<RegionTag> {
    if !frame.contains(p) {
        return None;
    }
    let left = p.x < plot.left();
    let right = p.x >= plot.right();
    let above = p.y < plot.top();
    let below = p.y >= plot.bottom();
    Some(match (left, right, above, below) {
        (_, _, true, _) => RegionTag::TopMargin,
        (true, _, _, true) => RegionTag::BottomLeftCorner,
        (_, true, _, true) => RegionTag::BottomRightCorner,
        (_, _, _, true) => RegionTag::BottomMargin,
        (true, _, _, _) => RegionTag::LeftMargin,
        (_, true, _, _) => RegionTag::RightMargin,
        _ => RegionTag::Interior,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup() -> (Rect, Rect) {
        let frame = Rect::new(0.0, 0.0, 1.0, 1.0);
        (frame, frame.inset(&Margins::default()))
    }

    #[test]
    fn classifies_interior_and_margins() {
        let (frame, plot) = setup();
        let r = |x, y| frame_region(&frame, &plot, Point2::new(x, y));
        assert_eq!(r(0.5, 0.5), Some(RegionTag::Interior));
        assert_eq!(r(0.05, 0.5), Some(RegionTag::LeftMargin));
        assert_eq!(r(0.95, 0.5), Some(RegionTag::RightMargin));
        assert_eq!(r(0.5, 0.05), Some(RegionTag::TopMargin));
        assert_eq!(r(0.05, 0.05), Some(RegionTag::TopMargin));
        assert_eq!(r(0.5, 0.95), Some(RegionTag::BottomMargin));
        assert_eq!(r(0.05, 0.95), Some(RegionTag::BottomLeftCorner));
        assert_eq!(r(0.95, 0.95), Some(RegionTag::BottomRightCorner));
    }

    #[test]
    fn outside_frame_is_none() {
        let frame = Rect::new(0.2, 0.2, 0.3, 0.3);
        let plot = frame.inset(&Margins::default());
        assert_eq!(frame_region(&frame, &plot, Point2::new(0.1, 0.3)), None);
        assert_eq!(frame_region(&frame, &plot, Point2::new(0.5, 0.3)), None);
    }

    /// Grid oracle: corners are exactly the intersections of the bottom
    /// margin band with the side margin bands.
    #[test]
    fn corners_match_rectangle_intersection_oracle() {
        let frame = Rect::new(0.1, 0.2, 0.6, 0.5);
        let m = Margins {
            left: 0.15,
            right: 0.05,
            top: 0.1,
            bottom: 0.2,
        };
        let plot = frame.inset(&m);
        let bottom_band = Rect::new(frame.x, plot.bottom(), frame.width, frame.bottom() - plot.bottom());
        let left_band = Rect::new(frame.x, plot.top(), plot.left() - frame.x, frame.bottom() - plot.top());
        let right_band = Rect::new(plot.right(), plot.top(), frame.right() - plot.right(), frame.bottom() - plot.top());
        for i in 0..200 {
            for j in 0..200 {
                let p = Point2::new(i as f64 / 199.0, j as f64 / 199.0);
                let tag = frame_region(&frame, &plot, p);
                let expect_bl = bottom_band.contains(p) && left_band.contains(p);
                let expect_br = bottom_band.contains(p) && right_band.contains(p);
                assert_eq!(tag == Some(RegionTag::BottomLeftCorner), expect_bl, "{p:?}");
                assert_eq!(tag == Some(RegionTag::BottomRightCorner), expect_br, "{p:?}");
            }
        }
    }
}
