//! On-disk form of a snapshot series: three CSV families in one directory,
//! one file per day, ISO-8601 dates in the file names.
//!
//! `trips_<date>.csv`   from,to,count        (sparse; zero entries omitted)
//! `search_<date>.csv`  district,symptom,count (dense; schema-defining)
//! `cases_<date>.csv`   district,count       (dense)
//!
//! Counts are integers. The first day's cases file fixes the district order
//! and the first day's search file fixes the symptom order; every other file
//! must agree.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use epiwave_core::Matrix64;

use crate::error::{Result, WmnError};
use crate::snapshot::{SnapshotSeries, WmnSnapshot};

const DATE_FMT: &str = "%Y-%m-%d";

fn count_to_u64(v: f64) -> u64 {
    let r = v.round();
    debug_assert!((v - r).abs() < 1e-6, "count {v} is not integral");
    r as u64
}

pub fn write_series(series: &SnapshotSeries, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    for snap in series.days() {
        let date = series.date_of(snap.day).format(DATE_FMT).to_string();

        let mut trips = csv::Writer::from_path(dir.join(format!("trips_{date}.csv")))?;
        trips.write_record(["from", "to", "count"])?;
        for i in 0..series.n_districts() {
            for j in 0..series.n_districts() {
                let v = snap.trips.get(i, j);
                if v != 0.0 {
                    trips.write_record([
                        series.districts()[i].as_str(),
                        series.districts()[j].as_str(),
                        &count_to_u64(v).to_string(),
                    ])?;
                }
            }
        }
        trips.flush()?;

        let mut search = csv::Writer::from_path(dir.join(format!("search_{date}.csv")))?;
        search.write_record(["district", "symptom", "count"])?;
        for i in 0..series.n_districts() {
            for w in 0..series.n_symptoms() {
                search.write_record([
                    series.districts()[i].as_str(),
                    series.symptoms()[w].as_str(),
                    &count_to_u64(snap.search.get(i, w)).to_string(),
                ])?;
            }
        }
        search.flush()?;

        let mut cases = csv::Writer::from_path(dir.join(format!("cases_{date}.csv")))?;
        cases.write_record(["district", "count"])?;
        for i in 0..series.n_districts() {
            cases.write_record([series.districts()[i].as_str(), &snap.cases[i].to_string()])?;
        }
        cases.flush()?;
    }
    Ok(())
}

fn scan_family(dir: &Path, prefix: &str) -> Result<BTreeMap<NaiveDate, PathBuf>> {
    let mut files = BTreeMap::new();
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        let Some(name) = path.file_name().and_then(|n| n.to_str()) else { continue };
        let Some(stem) = name.strip_prefix(prefix).and_then(|s| s.strip_suffix(".csv")) else {
            continue;
        };
        if let Ok(date) = NaiveDate::parse_from_str(stem, DATE_FMT) {
            files.insert(date, path);
        }
    }
    Ok(files)
}

fn bad_row(path: &Path, msg: impl Into<String>) -> WmnError {
    WmnError::BadRow { path: path.display().to_string(), msg: msg.into() }
}

fn read_rows(path: &Path, width: usize) -> Result<Vec<Vec<String>>> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_path(path)?;
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record?;
        if record.len() != width {
            return Err(bad_row(path, format!("expected {width} fields, got {}", record.len())));
        }
        rows.push(record.iter().map(str::to_string).collect());
    }
    Ok(rows)
}

fn parse_count(path: &Path, s: &str) -> Result<f64> {
    let v: f64 = s.parse().map_err(|_| bad_row(path, format!("bad count '{s}'")))?;
    if v < 0.0 || !v.is_finite() {
        return Err(bad_row(path, format!("count '{s}' must be a nonnegative number")));
    }
    Ok(v)
}

pub fn load_series(dir: &Path) -> Result<SnapshotSeries> {
    let cases_files = scan_family(dir, "cases_")?;
    let trips_files = scan_family(dir, "trips_")?;
    let search_files = scan_family(dir, "search_")?;
    if cases_files.is_empty() {
        return Err(WmnError::NoData(dir.display().to_string()));
    }

    let dates: Vec<NaiveDate> = cases_files.keys().copied().collect();
    let origin = dates[0];
    for pair in dates.windows(2) {
        if pair[1] != pair[0] + chrono::Duration::days(1) {
            return Err(WmnError::NonContiguous {
                prev: (pair[0] - origin).num_days() as usize,
                next: (pair[1] - origin).num_days() as usize,
            });
        }
    }
    for date in &dates {
        if !trips_files.contains_key(date) {
            return Err(WmnError::MissingDay { family: "trips", date: *date });
        }
        if !search_files.contains_key(date) {
            return Err(WmnError::MissingDay { family: "search", date: *date });
        }
    }

    // The first day fixes the schemas.
    let first_cases = read_rows(&cases_files[&origin], 2)?;
    let districts: Vec<String> = first_cases.iter().map(|r| r[0].clone()).collect();
    let district_idx: BTreeMap<&str, usize> =
        districts.iter().enumerate().map(|(i, d)| (d.as_str(), i)).collect();
    let first_search = read_rows(&search_files[&origin], 3)?;
    let mut symptoms: Vec<String> = Vec::new();
    for row in &first_search {
        if !symptoms.contains(&row[1]) {
            symptoms.push(row[1].clone());
        }
    }
    let symptom_idx: BTreeMap<&str, usize> =
        symptoms.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
    let n = districts.len();
    let n_words = symptoms.len();

    let mut snapshots = Vec::with_capacity(dates.len());
    for (day, date) in dates.iter().enumerate() {
        let cases_path = &cases_files[date];
        let rows = read_rows(cases_path, 2)?;
        if rows.len() != n {
            return Err(WmnError::InconsistentDistricts { date: *date });
        }
        let mut cases = vec![0u32; n];
        for row in &rows {
            let &i = district_idx
                .get(row[0].as_str())
                .ok_or_else(|| WmnError::UnknownDistrict { date: *date, name: row[0].clone() })?;
            let v = parse_count(cases_path, &row[1])?;
            cases[i] = v as u32;
        }

        let trips_path = &trips_files[date];
        let mut trips = Matrix64::zeros(n, n);
        for row in read_rows(trips_path, 3)? {
            let &i = district_idx
                .get(row[0].as_str())
                .ok_or_else(|| WmnError::UnknownDistrict { date: *date, name: row[0].clone() })?;
            let &j = district_idx
                .get(row[1].as_str())
                .ok_or_else(|| WmnError::UnknownDistrict { date: *date, name: row[1].clone() })?;
            trips.set(i, j, parse_count(trips_path, &row[2])?);
        }

        let search_path = &search_files[date];
        let mut search = Matrix64::zeros(n, n_words);
        for row in read_rows(search_path, 3)? {
            let &i = district_idx
                .get(row[0].as_str())
                .ok_or_else(|| WmnError::UnknownDistrict { date: *date, name: row[0].clone() })?;
            let &w = symptom_idx
                .get(row[1].as_str())
                .ok_or_else(|| WmnError::UnknownSymptom { date: *date, name: row[1].clone() })?;
            search.set(i, w, parse_count(search_path, &row[2])?);
        }

        snapshots.push(WmnSnapshot::new(day, trips, search, cases)?);
    }

    SnapshotSeries::new(origin, districts, symptoms, snapshots)
}
