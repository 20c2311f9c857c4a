//! City configuration. A flat TOML file maps onto `CityConfig`; omitted
//! keys fall back to the default desk-scale city (23 districts, 2000 users,
//! 300 days, four transmission humps).

use chrono::NaiveDate;
use epiwave_preprocess::DistrictMap;
use serde::{Deserialize, Serialize};

use crate::error::{CitySimError, Result};

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct BetaHump {
    pub center: f64,
    pub width: f64,
    pub height: f64,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct GridSpec {
    pub rows: usize,
    pub cols: usize,
    pub lat0: f64,
    pub lon0: f64,
    pub cell_lat: f64,
    pub cell_lon: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct CityConfig {
    pub name: String,
    pub seed: u64,
    pub days: usize,
    pub start_date: NaiveDate,
    pub n_districts: usize,
    pub users: usize,
    /// Fraction of users that are short-lived visitors, excluded from the
    /// planted trip truth and expected to be filtered out downstream.
    pub transient_fraction: f64,
    pub population_per_district: u32,
    /// Seeded exposures, split over the first three districts on day 0.
    pub initial_exposed: u32,
    /// E -> I rate per day (inverse incubation).
    pub sigma: f64,
    /// I -> R rate per day (inverse infectious period).
    pub gamma: f64,
    /// R -> S rate per day; keeps later waves possible.
    pub waning: f64,
    /// Importation pressure, scaled by beta(t) so beta = 0 silences it.
    pub import_scale: f64,
    pub beta_base: f64,
    pub beta_humps: Vec<BetaHump>,
    /// Explicit per-day schedule; overrides base + humps when present and
    /// must then have exactly `days` entries.
    pub beta_schedule: Option<Vec<f64>>,
    /// Mean excursions per permanent user per day (capped at 2).
    pub trip_rate: f64,
    /// Relative weight of staying put in the epidemic mixing matrix.
    pub self_mix_weight: f64,
    /// Search count per (exposed + infectious) person per top-weight word.
    pub search_propensity: f64,
    /// Baseline search noise per (district, word) per day.
    pub search_baseline: f64,
    /// delta_i = base * (0.5 + 1.5 * i / (n - 1)); overridden by
    /// `awareness_decay` when given.
    pub awareness_decay_base: f64,
    pub awareness_decay: Option<Vec<f64>>,
    pub ping_jitter_deg: f64,
    /// Non-symptom filler queries per day.
    pub noise_queries_per_day: u32,
    pub grid: GridSpec,
    /// Symptom vocabulary; defaults to the built-in 44-term list.
    pub symptoms: Option<Vec<String>>,
}

impl Default for CityConfig {
    fn default() -> Self {
        Self {
            name: "default-city".into(),
            seed: 0,
            days: 300,
            start_date: NaiveDate::from_ymd_opt(2020, 4, 1).unwrap(),
            n_districts: 23,
            users: 2000,
            transient_fraction: 0.1,
            population_per_district: 50_000,
            initial_exposed: 60,
            sigma: 0.25,
            gamma: 0.15,
            waning: 0.012,
            import_scale: 3.0,
            beta_base: 0.03,
            beta_humps: vec![
                BetaHump { center: 45.0, width: 12.0, height: 0.36 },
                BetaHump { center: 115.0, width: 12.0, height: 0.38 },
                BetaHump { center: 185.0, width: 14.0, height: 0.42 },
                BetaHump { center: 258.0, width: 14.0, height: 0.30 },
            ],
            beta_schedule: None,
            trip_rate: 0.8,
            self_mix_weight: 8.0,
            search_propensity: 0.003,
            search_baseline: 0.08,
            awareness_decay_base: 0.004,
            awareness_decay: None,
            ping_jitter_deg: 1e-4,
            noise_queries_per_day: 300,
            grid: GridSpec {
                rows: 5,
                cols: 5,
                lat0: 35.5,
                lon0: 139.3,
                cell_lat: 0.08,
                cell_lon: 0.10,
            },
            symptoms: None,
        }
    }
}

impl CityConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(CitySimError::BadConfig(msg));
        if self.days == 0 {
            return bad("days must be positive".into());
        }
        if self.n_districts == 0 || self.n_districts > self.grid.rows * self.grid.cols {
            return bad(format!(
                "n_districts {} does not fit a {}x{} grid",
                self.n_districts, self.grid.rows, self.grid.cols
            ));
        }
        if self.permanent_users() < self.n_districts {
            return bad(format!(
                "need at least one permanent user per district ({} permanent, {} districts)",
                self.permanent_users(),
                self.n_districts
            ));
        }
        if !(0.0..1.0).contains(&self.transient_fraction) {
            return bad("transient_fraction must be in [0, 1)".into());
        }
        for (name, v) in [
            ("sigma", self.sigma),
            ("gamma", self.gamma),
            ("waning", self.waning),
            ("import_scale", self.import_scale),
            ("beta_base", self.beta_base),
            ("trip_rate", self.trip_rate),
            ("self_mix_weight", self.self_mix_weight),
            ("search_propensity", self.search_propensity),
            ("search_baseline", self.search_baseline),
            ("awareness_decay_base", self.awareness_decay_base),
        ] {
            if v < 0.0 || !v.is_finite() {
                return bad(format!("{name} must be a nonnegative number, got {v}"));
            }
        }
        if let Some(schedule) = &self.beta_schedule {
            if schedule.len() != self.days {
                return bad(format!(
                    "beta_schedule has {} entries for {} days",
                    schedule.len(),
                    self.days
                ));
            }
            if schedule.iter().any(|b| *b < 0.0 || !b.is_finite()) {
                return bad("beta_schedule entries must be nonnegative".into());
            }
        }
        if let Some(decay) = &self.awareness_decay {
            if decay.len() != self.n_districts {
                return bad(format!(
                    "awareness_decay has {} entries for {} districts",
                    decay.len(),
                    self.n_districts
                ));
            }
        }
        if u64::from(self.initial_exposed) > u64::from(self.population_per_district) {
            return bad("initial_exposed exceeds the district population".into());
        }
        Ok(())
    }

    pub fn permanent_users(&self) -> usize {
        self.users - (self.users as f64 * self.transient_fraction).round() as usize
    }

    pub fn transient_users(&self) -> usize {
        self.users - self.permanent_users()
    }

    /// Per-day transmission rate.
    pub fn beta_at(&self, day: usize) -> f64 {
        if let Some(schedule) = &self.beta_schedule {
            return schedule[day];
        }
        let t = day as f64;
        let humps: f64 = self
            .beta_humps
            .iter()
            .map(|h| h.height * (-(t - h.center).powi(2) / (2.0 * h.width * h.width)).exp())
            .sum();
        self.beta_base + humps
    }

    /// Per-district awareness decay rates.
    pub fn decay_rates(&self) -> Vec<f64> {
        if let Some(decay) = &self.awareness_decay {
            return decay.clone();
        }
        let n = self.n_districts;
        (0..n)
            .map(|i| {
                let spread =
                    if n > 1 { 0.5 + 1.5 * i as f64 / (n - 1) as f64 } else { 1.0 };
                self.awareness_decay_base * spread
            })
            .collect()
    }

    pub fn district_map(&self) -> Result<DistrictMap> {
        Ok(DistrictMap::grid(
            self.grid.rows,
            self.grid.cols,
            self.n_districts,
            self.grid.lat0,
            self.grid.lon0,
            self.grid.cell_lat,
            self.grid.cell_lon,
        )?)
    }

    /// Word weights spanning a wide frequency range so that top-k symptom
    /// selection has a meaningful order.
    pub fn word_weights(&self, n_words: usize) -> Vec<f64> {
        (0..n_words).map(|w| (-(w as f64) / 6.0).exp()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        CityConfig::default().validate().unwrap();
    }

    #[test]
    fn toml_overrides_merge_into_defaults() {
        let cfg = CityConfig::from_toml_str("days = 60\nn_districts = 4\nusers = 100\nseed = 9")
            .unwrap();
        assert_eq!(cfg.days, 60);
        assert_eq!(cfg.n_districts, 4);
        assert_eq!(cfg.seed, 9);
        // Untouched keys keep the default city values.
        assert_eq!(cfg.population_per_district, 50_000);
    }

    #[test]
    fn explicit_schedule_must_cover_every_day() {
        let err = CityConfig {
            days: 5,
            beta_schedule: Some(vec![0.1; 4]),
            ..CityConfig::default()
        }
        .validate();
        assert!(err.is_err());
    }

    #[test]
    fn beta_is_base_plus_humps() {
        let cfg = CityConfig {
            beta_base: 0.02,
            beta_humps: vec![BetaHump { center: 10.0, width: 3.0, height: 0.5 }],
            ..CityConfig::default()
        };
        assert!((cfg.beta_at(10) - 0.52).abs() < 1e-12);
        assert!(cfg.beta_at(290) < 0.021);
    }

    #[test]
    fn decay_rates_vary_by_district() {
        let cfg = CityConfig::default();
        let rates = cfg.decay_rates();
        assert_eq!(rates.len(), 23);
        assert!(rates[0] < rates[22]);
        assert!((rates[0] - 0.002).abs() < 1e-12);
        assert!((rates[22] - 0.008).abs() < 1e-12);
    }
}
