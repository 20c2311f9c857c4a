//! One day's graph snapshot and contiguous daily sequences of them.

use chrono::NaiveDate;
use epiwave_core::Matrix64;

use crate::error::{Result, WmnError};

/// G_t for one day: trip matrix (entry (i,j) counts trips from district i to
/// district j), per-district symptom search counts, and the day's new cases.
#[derive(Clone, Debug, PartialEq)]
pub struct WmnSnapshot {
    /// Day offset from the series origin.
    pub day: usize,
    /// n x n, nonnegative.
    pub trips: Matrix64,
    /// n x n_w, nonnegative.
    pub search: Matrix64,
    /// Daily new infection cases per district.
    pub cases: Vec<u32>,
}

impl WmnSnapshot {
    pub fn new(day: usize, trips: Matrix64, search: Matrix64, cases: Vec<u32>) -> Result<Self> {
        let snap = Self { day, trips, search, cases };
        snap.validate(snap.trips.rows(), snap.search.cols())?;
        Ok(snap)
    }

    fn validate(&self, n: usize, n_words: usize) -> Result<()> {
        let check_nonneg = |what: &'static str, m: &Matrix64, day: usize| -> Result<()> {
            for i in 0..m.rows() {
                for j in 0..m.cols() {
                    let v = m.get(i, j);
                    if v < 0.0 {
                        return Err(WmnError::NegativeEntry { what, day, row: i, col: j, value: v });
                    }
                }
            }
            Ok(())
        };
        if self.trips.shape() != (n, n) {
            return Err(WmnError::Dimension {
                what: "trips",
                day: self.day,
                rows: n,
                cols: n,
                got_rows: self.trips.rows(),
                got_cols: self.trips.cols(),
            });
        }
        if self.search.shape() != (n, n_words) {
            return Err(WmnError::Dimension {
                what: "search",
                day: self.day,
                rows: n,
                cols: n_words,
                got_rows: self.search.rows(),
                got_cols: self.search.cols(),
            });
        }
        if self.cases.len() != n {
            return Err(WmnError::Dimension {
                what: "cases",
                day: self.day,
                rows: n,
                cols: 1,
                got_rows: self.cases.len(),
                got_cols: 1,
            });
        }
        check_nonneg("trips", &self.trips, self.day)?;
        check_nonneg("search", &self.search, self.day)?;
        Ok(())
    }
}

/// A gap-free daily sequence of snapshots sharing one district and symptom
/// schema. Immutable after construction.
#[derive(Clone, Debug)]
pub struct SnapshotSeries {
    origin: NaiveDate,
    districts: Vec<String>,
    symptoms: Vec<String>,
    snapshots: Vec<WmnSnapshot>,
}

impl SnapshotSeries {
    pub fn new(
        origin: NaiveDate,
        districts: Vec<String>,
        symptoms: Vec<String>,
        snapshots: Vec<WmnSnapshot>,
    ) -> Result<Self> {
        if snapshots.is_empty() {
            return Err(WmnError::EmptySeries);
        }
        let (n, n_words) = (districts.len(), symptoms.len());
        let mut prev: Option<usize> = None;
        for snap in &snapshots {
            snap.validate(n, n_words)?;
            if let Some(p) = prev {
                if snap.day != p + 1 {
                    return Err(WmnError::NonContiguous { prev: p, next: snap.day });
                }
            } else if snap.day != 0 {
                return Err(WmnError::NonContiguous { prev: 0, next: snap.day });
            }
            prev = Some(snap.day);
        }
        Ok(Self { origin, districts, symptoms, snapshots })
    }

    pub fn origin(&self) -> NaiveDate {
        self.origin
    }

    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }

    pub fn n_districts(&self) -> usize {
        self.districts.len()
    }

    pub fn n_symptoms(&self) -> usize {
        self.symptoms.len()
    }

    pub fn districts(&self) -> &[String] {
        &self.districts
    }

    pub fn symptoms(&self) -> &[String] {
        &self.symptoms
    }

    pub fn day(&self, day: usize) -> &WmnSnapshot {
        &self.snapshots[day]
    }

    pub fn days(&self) -> impl Iterator<Item = &WmnSnapshot> {
        self.snapshots.iter()
    }

    pub fn date_of(&self, day: usize) -> NaiveDate {
        self.origin + chrono::Duration::days(day as i64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn snap(day: usize, n: usize, w: usize) -> WmnSnapshot {
        WmnSnapshot::new(day, Matrix64::zeros(n, n), Matrix64::zeros(n, w), vec![0; n]).unwrap()
    }

    #[test]
    fn rejects_gap_in_days() {
        let origin = NaiveDate::from_ymd_opt(2020, 4, 1).unwrap();
        let err = SnapshotSeries::new(
            origin,
            vec!["a".into(), "b".into()],
            vec!["cough".into()],
            vec![snap(0, 2, 1), snap(2, 2, 1)],
        );
        assert!(matches!(err, Err(WmnError::NonContiguous { prev: 0, next: 2 })));
    }

    #[test]
    fn rejects_negative_trips() {
        let trips = Matrix64::from_rows(&[vec![0.0, -1.0], vec![0.0, 0.0]]).unwrap();
        let err = WmnSnapshot::new(0, trips, Matrix64::zeros(2, 1), vec![0, 0]);
        assert!(matches!(err, Err(WmnError::NegativeEntry { what: "trips", .. })));
    }

    #[test]
    fn date_mapping_offsets_from_origin() {
        let origin = NaiveDate::from_ymd_opt(2020, 4, 1).unwrap();
        let series = SnapshotSeries::new(
            origin,
            vec!["a".into()],
            vec!["cough".into()],
            vec![snap(0, 1, 1), snap(1, 1, 1)],
        )
        .unwrap();
        assert_eq!(series.date_of(1), NaiveDate::from_ymd_opt(2020, 4, 2).unwrap());
    }
}
