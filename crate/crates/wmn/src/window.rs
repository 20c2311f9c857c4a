//! Rolling training windows: D1 input days ending at the anchor, D2 target
//! days immediately after it.

use crate::error::{Result, WmnError};
use crate::snapshot::SnapshotSeries;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TrainingWindow {
    pub anchor: usize,
    pub d1: usize,
    pub d2: usize,
}

impl TrainingWindow {
    pub fn new(anchor: usize, d1: usize, d2: usize, series_len: usize) -> Result<Self> {
        let w = Self { anchor, d1, d2 };
        if d1 == 0 || d2 == 0 || anchor + 1 < d1 || anchor + d2 >= series_len {
            return Err(WmnError::WindowOutOfRange { anchor, len: series_len, d1, d2 });
        }
        Ok(w)
    }

    /// Input days, oldest first: [anchor - d1 + 1, anchor].
    pub fn input_days(&self) -> impl Iterator<Item = usize> {
        (self.anchor + 1 - self.d1)..=self.anchor
    }

    /// Target days: [anchor + 1, anchor + d2].
    pub fn target_days(&self) -> impl Iterator<Item = usize> {
        (self.anchor + 1)..=(self.anchor + self.d2)
    }

    pub fn first_day(&self) -> usize {
        self.anchor + 1 - self.d1
    }

    pub fn last_day(&self) -> usize {
        self.anchor + self.d2
    }
}

/// Every valid window with stride 1, optionally restricted to anchors inside
/// `anchor_range` (inclusive). Errors instead of returning an empty list.
pub fn build_windows(
    series: &SnapshotSeries,
    d1: usize,
    d2: usize,
    anchor_range: Option<(usize, usize)>,
) -> Result<Vec<TrainingWindow>> {
    let len = series.len();
    if d1 == 0 || d2 == 0 || d1 + d2 > len {
        return Err(WmnError::WindowRangeEmpty { len, d1, d2, required: d1 + d2 });
    }
    let lo = d1 - 1;
    let hi = len - d2 - 1;
    let (lo, hi) = match anchor_range {
        Some((a, b)) => (lo.max(a), hi.min(b)),
        None => (lo, hi),
    };
    if lo > hi {
        return Err(WmnError::WindowRangeEmpty { len, d1, d2, required: d1 + d2 });
    }
    (lo..=hi).map(|anchor| TrainingWindow::new(anchor, d1, d2, len)).collect()
}
