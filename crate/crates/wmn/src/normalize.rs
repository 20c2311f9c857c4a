//! Adjacency normalization and the 0-1 feature normalizations.
//!
//! Adjacency: self-loops are added first, then the matrix is scaled so each
//! column sums to 1 (incoming weights normalized). The symmetric
//! D^{-1/2} (E+I) D^{-1/2} form is available behind `AdjacencyNorm::Symmetric`.
//!
//! Feature scaling: per-district (and per-word, for searches) min-max fitted
//! on the training period only. Values outside the fitted range at inference
//! are clipped to [0, 1]; a degenerate min == max range maps to 0.

use epiwave_core::Matrix64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, WmnError};
use crate::snapshot::SnapshotSeries;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum AdjacencyNorm {
    #[default]
    Column,
    Symmetric,
}

impl std::str::FromStr for AdjacencyNorm {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "column" => Ok(Self::Column),
            "symmetric" => Ok(Self::Symmetric),
            other => Err(format!("unknown adjacency normalization '{other}'")),
        }
    }
}

/// Propagation matrix from a day's trip matrix.
pub fn normalize_adjacency(trips: &Matrix64, mode: AdjacencyNorm) -> Result<Matrix64> {
    let n = trips.rows();
    if trips.cols() != n {
        return Err(WmnError::AdjacencyShape { rows: trips.rows(), cols: trips.cols() });
    }
    for i in 0..n {
        for j in 0..n {
            let v = trips.get(i, j);
            if v < 0.0 {
                return Err(WmnError::AdjacencyNegative { row: i, col: j, value: v });
            }
        }
    }
    let with_loops = trips.add(&Matrix64::identity(n))?;
    let out = match mode {
        AdjacencyNorm::Column => {
            // Self-loops guarantee every column sum >= 1.
            let sums = with_loops.col_sums();
            let mut out = with_loops;
            for i in 0..n {
                for j in 0..n {
                    out.set(i, j, out.get(i, j) / sums[j]);
                }
            }
            out
        }
        AdjacencyNorm::Symmetric => {
            let degrees = with_loops.row_sums();
            let inv_sqrt: Vec<f64> = degrees.iter().map(|d| 1.0 / d.sqrt()).collect();
            let mut out = with_loops;
            for i in 0..n {
                for j in 0..n {
                    out.set(i, j, out.get(i, j) * inv_sqrt[i] * inv_sqrt[j]);
                }
            }
            out
        }
    };
    Ok(out)
}

/// Min-max statistics fitted on the training period. Search stats are per
/// (district, word); case stats per district.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalizationStats {
    pub fit_start: usize,
    pub fit_end: usize,
    search_min: Vec<f64>,
    search_max: Vec<f64>,
    cases_min: Vec<f64>,
    cases_max: Vec<f64>,
    n_districts: usize,
    n_symptoms: usize,
}

impl NormalizationStats {
    /// Fit over days `fit_start..=fit_end` of the series.
    pub fn fit(series: &SnapshotSeries, fit_start: usize, fit_end: usize) -> Self {
        let n = series.n_districts();
        let w = series.n_symptoms();
        let mut search_min = vec![f64::INFINITY; n * w];
        let mut search_max = vec![f64::NEG_INFINITY; n * w];
        let mut cases_min = vec![f64::INFINITY; n];
        let mut cases_max = vec![f64::NEG_INFINITY; n];
        for day in fit_start..=fit_end.min(series.len() - 1) {
            let snap = series.day(day);
            for i in 0..n {
                for j in 0..w {
                    let v = snap.search.get(i, j);
                    let idx = i * w + j;
                    search_min[idx] = search_min[idx].min(v);
                    search_max[idx] = search_max[idx].max(v);
                }
                let c = f64::from(snap.cases[i]);
                cases_min[i] = cases_min[i].min(c);
                cases_max[i] = cases_max[i].max(c);
            }
        }
        Self {
            fit_start,
            fit_end,
            search_min,
            search_max,
            cases_min,
            cases_max,
            n_districts: n,
            n_symptoms: w,
        }
    }

    pub fn n_districts(&self) -> usize {
        self.n_districts
    }

    pub fn n_symptoms(&self) -> usize {
        self.n_symptoms
    }

    fn scale01(x: f64, min: f64, max: f64) -> f64 {
        if max <= min {
            return 0.0;
        }
        ((x - min) / (max - min)).clamp(0.0, 1.0)
    }

    pub fn normalize_search_entry(&self, district: usize, word: usize, x: f64) -> f64 {
        let idx = district * self.n_symptoms + word;
        Self::scale01(x, self.search_min[idx], self.search_max[idx])
    }

    pub fn normalize_case(&self, district: usize, x: f64) -> f64 {
        Self::scale01(x, self.cases_min[district], self.cases_max[district])
    }

    /// Exact inverse of `normalize_case` on the fitted range; a degenerate
    /// district maps any input back to its constant value.
    pub fn denormalize_case(&self, district: usize, y: f64) -> f64 {
        let (min, max) = (self.cases_min[district], self.cases_max[district]);
        if max <= min {
            return min;
        }
        y * (max - min) + min
    }

    pub fn normalize_cases(&self, cases: &[u32]) -> Vec<f64> {
        cases
            .iter()
            .enumerate()
            .map(|(i, &c)| self.normalize_case(i, f64::from(c)))
            .collect()
    }
}

/// Map every search entry of the series through the fitted stats.
pub fn normalize_search(series: &SnapshotSeries, stats: &NormalizationStats) -> Vec<Matrix64> {
    series
        .days()
        .map(|snap| {
            let mut out = Matrix64::zeros(snap.search.rows(), snap.search.cols());
            for i in 0..out.rows() {
                for j in 0..out.cols() {
                    out.set(i, j, stats.normalize_search_entry(i, j, snap.search.get(i, j)));
                }
            }
            out
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::snapshot::WmnSnapshot;
    use chrono::NaiveDate;

    #[test]
    fn zero_trips_normalize_to_identity() {
        let adj = normalize_adjacency(&Matrix64::zeros(3, 3), AdjacencyNorm::Column).unwrap();
        assert_eq!(adj, Matrix64::identity(3));
    }

    #[test]
    fn column_normalization_hand_case() {
        let trips = Matrix64::from_rows(&[vec![0.0, 2.0], vec![1.0, 0.0]]).unwrap();
        let adj = normalize_adjacency(&trips, AdjacencyNorm::Column).unwrap();
        // E + I = [[1,2],[1,1]]; column sums 2 and 3.
        let expected =
            Matrix64::from_rows(&[vec![0.5, 2.0 / 3.0], vec![0.5, 1.0 / 3.0]]).unwrap();
        assert!(adj.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn negative_entry_rejected() {
        let trips = Matrix64::from_rows(&[vec![0.0, -2.0], vec![1.0, 0.0]]).unwrap();
        assert!(matches!(
            normalize_adjacency(&trips, AdjacencyNorm::Column),
            Err(WmnError::AdjacencyNegative { row: 0, col: 1, .. })
        ));
    }

    #[test]
    fn symmetric_normalization_uses_degrees() {
        let trips = Matrix64::from_rows(&[vec![0.0, 2.0], vec![1.0, 0.0]]).unwrap();
        let adj = normalize_adjacency(&trips, AdjacencyNorm::Symmetric).unwrap();
        // E + I = [[1,2],[1,1]], row degrees 3 and 2.
        let d = [3.0f64, 2.0];
        for i in 0..2 {
            for j in 0..2 {
                let expected = [[1.0, 2.0], [1.0, 1.0]][i][j] / (d[i].sqrt() * d[j].sqrt());
                assert!((adj.get(i, j) - expected).abs() < 1e-15);
            }
        }
    }

    fn tiny_series(search_values: &[f64], cases: &[Vec<u32>]) -> SnapshotSeries {
        let snaps: Vec<WmnSnapshot> = search_values
            .iter()
            .zip(cases)
            .enumerate()
            .map(|(day, (&s, c))| {
                WmnSnapshot::new(
                    day,
                    Matrix64::zeros(2, 2),
                    Matrix64::from_rows(&[vec![s], vec![2.0 * s]]).unwrap(),
                    c.clone(),
                )
                .unwrap()
            })
            .collect();
        SnapshotSeries::new(
            NaiveDate::from_ymd_opt(2020, 4, 1).unwrap(),
            vec!["a".into(), "b".into()],
            vec!["cough".into()],
            snaps,
        )
        .unwrap()
    }

    #[test]
    fn search_endpoints_and_degenerate_rule() {
        let series = tiny_series(&[0.0, 5.0, 10.0], &[vec![0, 7], vec![25, 7], vec![50, 7]]);
        let stats = NormalizationStats::fit(&series, 0, 2);
        assert_eq!(stats.normalize_search_entry(0, 0, 10.0), 1.0);
        assert_eq!(stats.normalize_search_entry(0, 0, 0.0), 0.0);
        // Cases in district b are constant: degenerate range maps to 0.
        assert_eq!(stats.normalize_case(1, 7.0), 0.0);
        assert_eq!(stats.denormalize_case(1, 0.0), 7.0);
        assert_eq!(stats.denormalize_case(1, 0.73), 7.0);
    }

    #[test]
    fn out_of_range_values_clip() {
        let series = tiny_series(&[0.0, 10.0], &[vec![0, 0], vec![50, 0]]);
        let stats = NormalizationStats::fit(&series, 0, 1);
        assert_eq!(stats.normalize_search_entry(0, 0, 99.0), 1.0);
        assert_eq!(stats.normalize_search_entry(0, 0, -5.0), 0.0);
        assert_eq!(stats.normalize_case(0, 120.0), 1.0);
    }

    #[test]
    fn case_round_trip_is_exact_in_range() {
        let series = tiny_series(&[0.0, 10.0], &[vec![0, 3], vec![50, 9]]);
        let stats = NormalizationStats::fit(&series, 0, 1);
        assert_eq!(stats.normalize_case(0, 25.0), 0.5);
        for x in [0.0, 1.0, 12.5, 49.0, 50.0] {
            let rt = stats.denormalize_case(0, stats.normalize_case(0, x));
            assert!((rt - x).abs() < 1e-12, "{x} -> {rt}");
        }
    }

    #[test]
    fn stats_ignore_days_outside_fit_window() {
        let series = tiny_series(&[0.0, 10.0, 999.0], &[vec![0, 0], vec![50, 0], vec![1000, 0]]);
        let trained = NormalizationStats::fit(&series, 0, 1);
        let leaky = NormalizationStats::fit(&series, 0, 2);
        assert_ne!(trained, leaky);
        // The day-2 spike is invisible to the fitted stats.
        assert_eq!(trained.normalize_search_entry(0, 0, 10.0), 1.0);
    }
}
