//! End-to-end preprocessing: raw per-day mobility and search files plus a
//! cases file, out comes a snapshot series.
//!
//! Passes:
//!   1. night pings over the home-estimation window -> permanent users,
//!      mean-shift homes, home districts
//!   2. per day: stays and trips for permanent users -> trip matrices
//!   3. per day: symptom-query counts by home district -> search matrices
//!   4. cases file -> case vectors; assemble and validate

use std::collections::{BTreeSet, HashMap};
use std::path::Path;

use chrono::{Duration, NaiveDate};
use epiwave_core::Matrix64;
use epiwave_wmn::{SnapshotSeries, WmnSnapshot};

use crate::districts::DistrictAssigner;
use crate::error::{PreprocessError, Result};
use crate::home::{is_night_hour, mean_shift_mode};
use crate::records::{read_cases_file, read_mobility_file, read_search_file, scan_day_files};
use crate::stays::extract_stays;
use crate::symptoms::SymptomLexicon;
use crate::trips::count_trips;

#[derive(Clone, Copy, Debug)]
pub struct PreprocessConfig {
    pub min_stay_minutes: i64,
    pub bandwidth_deg: f64,
    pub min_night_records: usize,
    pub home_window_days: usize,
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        Self { min_stay_minutes: 10, bandwidth_deg: 0.005, min_night_records: 20, home_window_days: 26 }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PreprocessSummary {
    pub users_seen: usize,
    pub permanent_users: usize,
    pub users_dropped_few_night_pings: usize,
    pub users_dropped_outside_map: usize,
    pub pings_outside_map: u64,
    pub search_records: u64,
    pub search_skipped_no_home: u64,
    pub search_unmatched: u64,
    pub trips_total: u64,
}

struct UserTable {
    ids: HashMap<String, u32>,
}

impl UserTable {
    fn new() -> Self {
        Self { ids: HashMap::new() }
    }

    fn intern(&mut self, name: &str) -> u32 {
        if let Some(&id) = self.ids.get(name) {
            return id;
        }
        let id = self.ids.len() as u32;
        self.ids.insert(name.to_string(), id);
        id
    }

    fn lookup(&self, name: &str) -> Option<u32> {
        self.ids.get(name).copied()
    }
}

pub fn run_preprocess(
    mobility_dir: &Path,
    search_dir: &Path,
    cases_file: &Path,
    map: &dyn DistrictAssigner,
    lexicon: &SymptomLexicon,
    cfg: &PreprocessConfig,
) -> Result<(SnapshotSeries, PreprocessSummary)> {
    let mobility_files = scan_day_files(mobility_dir, "mobility")?;
    let search_files = scan_day_files(search_dir, "search")?;
    if mobility_files.is_empty() {
        return Err(PreprocessError::NoInput {
            family: "mobility",
            dir: mobility_dir.display().to_string(),
        });
    }
    if search_files.is_empty() {
        return Err(PreprocessError::NoInput {
            family: "search",
            dir: search_dir.display().to_string(),
        });
    }
    let cases_by_date = read_cases_file(cases_file)?;
    if cases_by_date.is_empty() {
        return Err(PreprocessError::NoInput {
            family: "cases",
            dir: cases_file.display().to_string(),
        });
    }

    // All three sources must cover exactly the same contiguous day range.
    let mut all_dates: BTreeSet<NaiveDate> = BTreeSet::new();
    all_dates.extend(mobility_files.keys());
    all_dates.extend(search_files.keys());
    all_dates.extend(cases_by_date.keys());
    for pair in all_dates.iter().collect::<Vec<_>>().windows(2) {
        if *pair[1] != *pair[0] + Duration::days(1) {
            return Err(PreprocessError::CalendarGap { prev: *pair[0], next: *pair[1] });
        }
    }
    for &date in &all_dates {
        if !mobility_files.contains_key(&date) {
            return Err(PreprocessError::MisalignedCalendar { family: "mobility", date });
        }
        if !search_files.contains_key(&date) {
            return Err(PreprocessError::MisalignedCalendar { family: "search", date });
        }
        if !cases_by_date.contains_key(&date) {
            return Err(PreprocessError::MisalignedCalendar { family: "cases", date });
        }
    }
    let dates: Vec<NaiveDate> = all_dates.into_iter().collect();
    let origin = dates[0];
    let n = map.district_count();
    let mut summary = PreprocessSummary::default();

    // Pass 1: home estimation over the first `home_window_days` days.
    let mut users = UserTable::new();
    let mut night_points: Vec<Vec<(f64, f64, i64)>> = Vec::new();
    for date in dates.iter().take(cfg.home_window_days) {
        read_mobility_file(&mobility_files[date], *date, |ping| {
            let uid = users.intern(&ping.user) as usize;
            if night_points.len() <= uid {
                night_points.resize_with(uid + 1, Vec::new);
            }
            if is_night_hour(ping.time) {
                night_points[uid].push((ping.lat, ping.lon, ping.time));
            }
        })?;
    }
    summary.users_seen = night_points.len();

    // uid -> home district for permanent users only.
    let mut homes: HashMap<u32, usize> = HashMap::new();
    for (uid, points) in night_points.iter().enumerate() {
        if points.len() < cfg.min_night_records.max(1) {
            summary.users_dropped_few_night_pings += 1;
            continue;
        }
        // At least one night point exists here, so a mode always comes back.
        let (lat, lon) = mean_shift_mode(points, cfg.bandwidth_deg).expect("non-empty points");
        match map.assign(lat, lon) {
            Some(district) => {
                homes.insert(uid as u32, district);
            }
            None => summary.users_dropped_outside_map += 1,
        }
    }
    summary.permanent_users = homes.len();
    drop(night_points);

    // Pass 2: stays and trips per day, permanent users only.
    let min_stay_secs = cfg.min_stay_minutes * 60;
    let mut trips_by_day: Vec<Matrix64> = Vec::with_capacity(dates.len());
    for date in &dates {
        let mut per_user: HashMap<u32, Vec<(i64, usize)>> = HashMap::new();
        let mut outside = 0u64;
        read_mobility_file(&mobility_files[date], *date, |ping| {
            let Some(uid) = users.lookup(&ping.user) else { return };
            if !homes.contains_key(&uid) {
                return;
            }
            match map.assign(ping.lat, ping.lon) {
                Some(district) => per_user.entry(uid).or_default().push((ping.time, district)),
                None => outside += 1,
            }
        })?;
        summary.pings_outside_map += outside;

        let mut stay_lists = Vec::with_capacity(per_user.len());
        for (_, mut pings) in per_user {
            pings.sort_unstable_by_key(|&(t, _)| t);
            stay_lists.push(extract_stays(&pings, min_stay_secs));
        }
        let trips = count_trips(stay_lists.iter().map(Vec::as_slice), n);
        summary.trips_total += trips.sum() as u64;
        trips_by_day.push(trips);
    }

    // Pass 3: symptom-query counting by home district.
    let n_words = lexicon.len();
    let mut search_by_day: Vec<Matrix64> = Vec::with_capacity(dates.len());
    for date in &dates {
        let mut counts = Matrix64::zeros(n, n_words);
        let mut skipped = 0u64;
        let mut unmatched = 0u64;
        let mut total = 0u64;
        read_search_file(&search_files[date], |record| {
            total += 1;
            let home = users.lookup(&record.user).and_then(|uid| homes.get(&uid));
            let Some(&district) = home else {
                skipped += 1;
                return;
            };
            let hits = lexicon.matches(&record.query);
            if hits.is_empty() {
                unmatched += 1;
            }
            for w in hits {
                counts.set(district, w, counts.get(district, w) + 1.0);
            }
        })?;
        summary.search_records += total;
        summary.search_skipped_no_home += skipped;
        summary.search_unmatched += unmatched;
        search_by_day.push(counts);
    }

    // Pass 4: cases, then assembly.
    let district_names = map.district_names();
    let mut snapshots = Vec::with_capacity(dates.len());
    for (day, date) in dates.iter().enumerate() {
        let rows = &cases_by_date[date];
        let mut cases: Vec<Option<u32>> = vec![None; n];
        for (name, count) in rows {
            let idx = district_names
                .iter()
                .position(|d| d == name)
                .ok_or_else(|| PreprocessError::UnknownDistrict(name.clone()))?;
            cases[idx] = Some(*count);
        }
        let cases: Vec<u32> = cases
            .into_iter()
            .enumerate()
            .map(|(idx, c)| {
                c.ok_or_else(|| PreprocessError::MissingCases {
                    date: *date,
                    district: district_names[idx].clone(),
                })
            })
            .collect::<Result<_>>()?;
        snapshots.push(WmnSnapshot::new(
            day,
            trips_by_day[day].clone(),
            search_by_day[day].clone(),
            cases,
        )?);
    }

    let series =
        SnapshotSeries::new(origin, district_names.to_vec(), lexicon.names(), snapshots)?;
    Ok((series, summary))
}
