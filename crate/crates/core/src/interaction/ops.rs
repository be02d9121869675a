//! Pure domain and data operations behind the pinch interactions.

use crate::chart::resolve::{ResolvedChart, Series};
use crate::chart::spec::{IntervalRegion, ScaleKind};

/// Smallest zoom span, as a fraction of the full x extent.
pub const MIN_ZOOM_FRACTION: f64 = 0.02;
/// Pan step, as a fraction of the visible span.
pub const PAN_FRACTION: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum DomainError {
    #[error("requested span is below the minimum zoom span")]
    SpanTooSmall,
    #[error("visible domain already touches the data extent")]
    AlreadyAtExtent,
    #[error("the full extent is already visible")]
    AlreadyFullExtent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PanDirection {
    Earlier,
    Later,
}

/// Target domain for a two-handed zoom between domain values `a` and `b`.
/// When both fall inside one labelled interval the interval wins.
pub fn zoom_in_target(
    a: f64,
    b: f64,
    regions: &[IntervalRegion],
    full: [f64; 2],
) -> Result<[f64; 2], DomainError> {
    let target = regions
        .iter()
        .find(|r| r.contains(a) && r.contains(b))
        .map(|r| [r.start.max(full[0]), r.end.min(full[1])])
        .unwrap_or([a.min(b), a.max(b)]);
    if target[1] - target[0] < MIN_ZOOM_FRACTION * (full[1] - full[0]) {
        return Err(DomainError::SpanTooSmall);
    }
    Ok(target)
}

/// Shifts the visible domain by half its span, clamped to `full`.
pub fn pan(
    visible: [f64; 2],
    full: [f64; 2],
    dir: PanDirection,
) -> Result<[f64; 2], DomainError> {
    let span = visible[1] - visible[0];
    let shift = match dir {
        PanDirection::Earlier => -PAN_FRACTION * span,
        PanDirection::Later => PAN_FRACTION * span,
    };
    let mut next = [visible[0] + shift, visible[1] + shift];
    if next[1] > full[1] {
        next = [full[1] - span, full[1]];
    }
    if next[0] < full[0] {
        next = [full[0], full[0] + span];
    }
    if next == visible {
        Err(DomainError::AlreadyAtExtent)
    } else {
        Ok(next)
    }
}

/// Key identifying an x position across charts: the band label for band
/// scales, the exact numeric value otherwise.
pub fn x_key(chart: &ResolvedChart, x: f64) -> String {
    if chart.x_scale == ScaleKind::Band {
        chart.bands.get(x as usize).cloned().unwrap_or_default()
    } else {
        format!("{x}")
    }
}

/// Multiplies every target series by the source series at matching x keys.
/// Target points without a matching source key keep their value.
pub fn multiply(
    source: &Series,
    source_chart: &ResolvedChart,
    targets: &[Series],
    target_chart: &ResolvedChart,
) -> Vec<Series> {
    let factors: std::collections::BTreeMap<String, f64> = source
        .points
        .iter()
        .map(|p| (x_key(source_chart, p[0]), p[1]))
        .collect();
    targets
        .iter()
        .map(|s| Series {
            id: s.id.clone(),
            points: s
                .points
                .iter()
                .map(|&[x, y]| match factors.get(&x_key(target_chart, x)) {
                    Some(f) => [x, f * y],
                    None => [x, y],
                })
                .collect(),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn region(label: &str, start: f64, end: f64) -> IntervalRegion {
        IntervalRegion {
            label: label.into(),
            start,
            end,
        }
    }

    #[test]
    fn zoom_snaps_to_shared_region() {
        let regions = [region("Boomers", 1946.0, 1964.0), region("GenX", 1965.0, 1980.0)];
        let full = [1950.0, 2015.0];
        assert_eq!(zoom_in_target(1950.0, 1960.0, &regions, full), Ok([1950.0, 1964.0]));
        assert_eq!(zoom_in_target(1990.0, 1970.0, &regions, full), Ok([1970.0, 1990.0]));
        assert_eq!(
            zoom_in_target(1970.0, 1970.5, &[], full),
            Err(DomainError::SpanTooSmall)
        );
    }

    #[test]
    fn pan_shifts_and_clamps() {
        let full = [1950.0, 2015.0];
        assert_eq!(pan([1960.0, 1980.0], full, PanDirection::Later), Ok([1970.0, 1990.0]));
        assert_eq!(pan([1990.0, 2010.0], full, PanDirection::Later), Ok([1995.0, 2015.0]));
        assert_eq!(
            pan([1950.0, 1970.0], full, PanDirection::Earlier),
            Err(DomainError::AlreadyAtExtent)
        );
    }
}
