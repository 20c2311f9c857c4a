//! Per-day model inputs derived once per (series, stats, config): the
//! normalized propagation matrix, the k-column normalized search features,
//! normalized case vectors, and raw cases for metrics.

use epiwave_core::Matrix64;
use epiwave_wmn::{normalize_adjacency, AdjacencyNorm, NormalizationStats, SnapshotSeries};

use crate::error::{ModelError, Result};

#[derive(Clone, Debug)]
pub struct PreparedDay {
    pub adjacency: Matrix64,
    /// n x k, selected symptom columns normalized to [0, 1].
    pub search_norm: Matrix64,
    /// n x 1, per-district normalized cases.
    pub cases_norm: Matrix64,
    pub cases_raw: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct PreparedSeries {
    pub days: Vec<PreparedDay>,
    pub n: usize,
    pub k: usize,
    /// Indices into the series' symptom schema, rank order.
    pub selected: Vec<usize>,
    pub selected_names: Vec<String>,
    pub districts: Vec<String>,
    pub stats: NormalizationStats,
}

impl PreparedSeries {
    pub fn len(&self) -> usize {
        self.days.len()
    }

    pub fn is_empty(&self) -> bool {
        self.days.is_empty()
    }

    /// Normalized target matrix for a window: n x d2, one column per horizon day.
    pub fn targets_normalized(&self, anchor: usize, d2: usize) -> Result<Matrix64> {
        if anchor + d2 > self.len() - 1 {
            return Err(ModelError::BadAnchor { anchor, len: self.len() });
        }
        let mut out = Matrix64::zeros(self.n, d2);
        for (col, day) in ((anchor + 1)..=(anchor + d2)).enumerate() {
            for i in 0..self.n {
                out.set(i, col, self.days[day].cases_norm.get(i, 0));
            }
        }
        Ok(out)
    }

    /// Raw target matrix for a window, same layout.
    pub fn targets_raw(&self, anchor: usize, d2: usize) -> Result<Matrix64> {
        if anchor + d2 > self.len() - 1 {
            return Err(ModelError::BadAnchor { anchor, len: self.len() });
        }
        let mut out = Matrix64::zeros(self.n, d2);
        for (col, day) in ((anchor + 1)..=(anchor + d2)).enumerate() {
            for i in 0..self.n {
                out.set(i, col, self.days[day].cases_raw[i]);
            }
        }
        Ok(out)
    }
}

/// Rank symptoms by total raw count over the stats' fit window; ties break
/// alphabetically. Returns the top-k indices in rank order.
pub fn select_symptoms(
    series: &SnapshotSeries,
    stats: &NormalizationStats,
    k: usize,
) -> Result<Vec<usize>> {
    let n_words = series.n_symptoms();
    if k > n_words {
        return Err(ModelError::TooFewSymptoms { k, available: n_words });
    }
    let mut totals = vec![0.0f64; n_words];
    let fit_end = stats.fit_end.min(series.len() - 1);
    for day in stats.fit_start..=fit_end {
        let snap = series.day(day);
        for w in 0..n_words {
            for i in 0..series.n_districts() {
                totals[w] += snap.search.get(i, w);
            }
        }
    }
    let mut order: Vec<usize> = (0..n_words).collect();
    order.sort_by(|&a, &b| {
        totals[b]
            .partial_cmp(&totals[a])
            .unwrap()
            .then_with(|| series.symptoms()[a].cmp(&series.symptoms()[b]))
    });
    Ok(order.into_iter().take(k).collect())
}

pub fn prepare(
    series: &SnapshotSeries,
    stats: &NormalizationStats,
    k: usize,
    adjacency_norm: AdjacencyNorm,
) -> Result<PreparedSeries> {
    let n = series.n_districts();
    let selected = select_symptoms(series, stats, k)?;
    let selected_names: Vec<String> =
        selected.iter().map(|&w| series.symptoms()[w].clone()).collect();

    let mut days = Vec::with_capacity(series.len());
    for snap in series.days() {
        let adjacency = normalize_adjacency(&snap.trips, adjacency_norm)?;
        let mut search_norm = Matrix64::zeros(n, k);
        for i in 0..n {
            for (col, &w) in selected.iter().enumerate() {
                search_norm.set(i, col, stats.normalize_search_entry(i, w, snap.search.get(i, w)));
            }
        }
        let cases_norm = Matrix64::new(
            n,
            1,
            snap.cases
                .iter()
                .enumerate()
                .map(|(i, &c)| stats.normalize_case(i, f64::from(c)))
                .collect(),
        )?;
        let cases_raw = snap.cases.iter().map(|&c| f64::from(c)).collect();
        days.push(PreparedDay { adjacency, search_norm, cases_norm, cases_raw });
    }

    Ok(PreparedSeries {
        days,
        n,
        k,
        selected,
        selected_names,
        districts: series.districts().to_vec(),
        stats: stats.clone(),
    })
}
