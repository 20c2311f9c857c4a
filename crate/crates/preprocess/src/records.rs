//! Raw record schemas and their per-day CSV files.
//!
//! Mobility rows: `id,lat,lon,unixtime,date` with compact `YYYYMMDD` dates.
//! Search rows:   `id,time,query` with `YYYY-MM-DD HH:MM:SS` timestamps.
//! Files are partitioned by day: `mobility_<ISO-date>.csv`,
//! `search_<ISO-date>.csv`.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use chrono::{NaiveDate, NaiveDateTime};

use crate::error::{PreprocessError, Result};

pub const MOBILITY_HEADER: &str = "id,lat,lon,unixtime,date";
pub const SEARCH_HEADER: &str = "id,time,query";
pub const COMPACT_DATE_FMT: &str = "%Y%m%d";
pub const SEARCH_TIME_FMT: &str = "%Y-%m-%d %H:%M:%S";

#[derive(Clone, Debug, PartialEq)]
pub struct MobilityPing {
    pub user: String,
    pub lat: f64,
    pub lon: f64,
    /// Unix seconds.
    pub time: i64,
    pub date: NaiveDate,
}

impl MobilityPing {
    pub fn new(user: String, lat: f64, lon: f64, time: i64, date: NaiveDate) -> Result<Self> {
        if !(-90.0..=90.0).contains(&lat) {
            return Err(PreprocessError::BadLatitude(lat));
        }
        if !(-180.0..=180.0).contains(&lon) {
            return Err(PreprocessError::BadLongitude(lon));
        }
        Ok(Self { user, lat, lon, time, date })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchRecord {
    pub user: String,
    pub time: NaiveDateTime,
    pub query: String,
}

pub fn mobility_file_name(date: NaiveDate) -> String {
    format!("mobility_{}.csv", date.format("%Y-%m-%d"))
}

pub fn search_file_name(date: NaiveDate) -> String {
    format!("search_{}.csv", date.format("%Y-%m-%d"))
}

/// Map day files `<prefix>_<ISO-date>.csv` in `dir` to their dates.
pub fn scan_day_files(dir: &Path, prefix: &str) -> Result<BTreeMap<NaiveDate, PathBuf>> {
    let mut files = BTreeMap::new();
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        let Some(name) = path.file_name().and_then(|n| n.to_str()) else { continue };
        let Some(stem) =
            name.strip_prefix(prefix).and_then(|s| s.strip_prefix('_')).and_then(|s| s.strip_suffix(".csv"))
        else {
            continue;
        };
        if let Ok(date) = NaiveDate::parse_from_str(stem, "%Y-%m-%d") {
            files.insert(date, path);
        }
    }
    Ok(files)
}

fn bad_row(path: &Path, line: u64, msg: impl Into<String>) -> PreprocessError {
    PreprocessError::BadRow { path: path.display().to_string(), line, msg: msg.into() }
}

/// Parse one day's mobility file, calling `sink` per ping. Row dates must
/// match the file's date.
pub fn read_mobility_file(
    path: &Path,
    file_date: NaiveDate,
    mut sink: impl FnMut(MobilityPing),
) -> Result<()> {
    let compact = file_date.format(COMPACT_DATE_FMT).to_string();
    let iso = file_date.format("%Y-%m-%d").to_string();
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_path(path)?;
    for (idx, record) in reader.records().enumerate() {
        let line = idx as u64 + 2;
        let record = record?;
        if record.len() != 5 {
            return Err(bad_row(path, line, format!("expected 5 fields, got {}", record.len())));
        }
        let lat: f64 = record[1].parse().map_err(|_| bad_row(path, line, "bad lat"))?;
        let lon: f64 = record[2].parse().map_err(|_| bad_row(path, line, "bad lon"))?;
        let time: i64 = record[3].parse().map_err(|_| bad_row(path, line, "bad unixtime"))?;
        let date_field = &record[4];
        if date_field != compact && date_field != iso {
            return Err(bad_row(
                path,
                line,
                format!("date '{date_field}' does not match file date {iso}"),
            ));
        }
        let ping = MobilityPing::new(record[0].to_string(), lat, lon, time, file_date)
            .map_err(|e| bad_row(path, line, e.to_string()))?;
        sink(ping);
    }
    Ok(())
}

/// Parse one day's search file.
pub fn read_search_file(
    path: &Path,
    mut sink: impl FnMut(SearchRecord),
) -> Result<()> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_path(path)?;
    for (idx, record) in reader.records().enumerate() {
        let line = idx as u64 + 2;
        let record = record?;
        if record.len() != 3 {
            return Err(bad_row(path, line, format!("expected 3 fields, got {}", record.len())));
        }
        let time = NaiveDateTime::parse_from_str(&record[1], SEARCH_TIME_FMT)
            .map_err(|_| bad_row(path, line, format!("bad time '{}'", &record[1])))?;
        sink(SearchRecord { user: record[0].to_string(), time, query: record[2].to_string() });
    }
    Ok(())
}

/// Streaming writer for one day's mobility file.
pub struct MobilityWriter {
    inner: csv::Writer<fs::File>,
}

impl MobilityWriter {
    pub fn create(dir: &Path, date: NaiveDate) -> Result<Self> {
        let mut inner = csv::Writer::from_path(dir.join(mobility_file_name(date)))?;
        inner.write_record(MOBILITY_HEADER.split(','))?;
        Ok(Self { inner })
    }

    pub fn write(&mut self, ping: &MobilityPing) -> Result<()> {
        self.inner.write_record([
            ping.user.as_str(),
            &format!("{:.6}", ping.lat),
            &format!("{:.6}", ping.lon),
            &ping.time.to_string(),
            &ping.date.format(COMPACT_DATE_FMT).to_string(),
        ])?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<()> {
        self.inner.flush()?;
        Ok(())
    }
}

/// Streaming writer for one day's search file.
pub struct SearchWriter {
    inner: csv::Writer<fs::File>,
}

impl SearchWriter {
    pub fn create(dir: &Path, date: NaiveDate) -> Result<Self> {
        let mut inner = csv::Writer::from_path(dir.join(search_file_name(date)))?;
        inner.write_record(SEARCH_HEADER.split(','))?;
        Ok(Self { inner })
    }

    pub fn write(&mut self, record: &SearchRecord) -> Result<()> {
        self.inner.write_record([
            record.user.as_str(),
            &record.time.format(SEARCH_TIME_FMT).to_string(),
            record.query.as_str(),
        ])?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<()> {
        self.inner.flush()?;
        Ok(())
    }
}

/// Cases file: `date,district,count` rows, ISO dates, any row order.
pub fn read_cases_file(
    path: &Path,
) -> Result<BTreeMap<NaiveDate, Vec<(String, u32)>>> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_path(path)?;
    let mut by_date: BTreeMap<NaiveDate, Vec<(String, u32)>> = BTreeMap::new();
    for (idx, record) in reader.records().enumerate() {
        let line = idx as u64 + 2;
        let record = record?;
        if record.len() != 3 {
            return Err(bad_row(path, line, format!("expected 3 fields, got {}", record.len())));
        }
        let date = NaiveDate::parse_from_str(&record[0], "%Y-%m-%d")
            .map_err(|_| bad_row(path, line, format!("bad date '{}'", &record[0])))?;
        let count: u32 = record[2].parse().map_err(|_| bad_row(path, line, "bad count"))?;
        by_date.entry(date).or_default().push((record[1].to_string(), count));
    }
    Ok(by_date)
}

pub fn write_cases_file(
    path: &Path,
    rows: impl Iterator<Item = (NaiveDate, String, u32)>,
) -> Result<()> {
    let file = fs::File::create(path)?;
    let mut out = std::io::BufWriter::new(file);
    writeln!(out, "date,district,count")?;
    for (date, district, count) in rows {
        writeln!(out, "{},{district},{count}", date.format("%Y-%m-%d"))?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mobility_round_trip_with_compact_dates() {
        let dir = tempfile::tempdir().unwrap();
        let date = NaiveDate::from_ymd_opt(2020, 3, 17).unwrap();
        let ping = MobilityPing::new("thisisfakeid".into(), 35.683, 139.763, 1584390800, date)
            .unwrap();
        let mut w = MobilityWriter::create(dir.path(), date).unwrap();
        w.write(&ping).unwrap();
        w.finish().unwrap();

        let text = fs::read_to_string(dir.path().join("mobility_2020-03-17.csv")).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), MOBILITY_HEADER);
        assert_eq!(lines.next().unwrap(), "thisisfakeid,35.683000,139.763000,1584390800,20200317");

        let mut got = Vec::new();
        read_mobility_file(&dir.path().join("mobility_2020-03-17.csv"), date, |p| got.push(p))
            .unwrap();
        assert_eq!(got.len(), 1);
        assert_eq!(got[0].user, "thisisfakeid");
        assert_eq!(got[0].time, 1584390800);
    }

    #[test]
    fn mobility_rejects_mismatched_row_date() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("mobility_2020-03-17.csv");
        fs::write(&path, format!("{MOBILITY_HEADER}\nu1,35.0,139.0,1584390800,20200318\n"))
            .unwrap();
        let date = NaiveDate::from_ymd_opt(2020, 3, 17).unwrap();
        let err = read_mobility_file(&path, date, |_| {}).unwrap_err().to_string();
        assert!(err.contains("does not match file date"), "{err}");
    }

    #[test]
    fn search_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let date = NaiveDate::from_ymd_opt(2020, 3, 17).unwrap();
        let rec = SearchRecord {
            user: "thisisfakeid".into(),
            time: date.and_hms_opt(8, 32, 14).unwrap(),
            query: "fever and cough".into(),
        };
        let mut w = SearchWriter::create(dir.path(), date).unwrap();
        w.write(&rec).unwrap();
        w.finish().unwrap();

        let text = fs::read_to_string(dir.path().join("search_2020-03-17.csv")).unwrap();
        assert!(text.starts_with(SEARCH_HEADER));
        let mut got = Vec::new();
        read_search_file(&dir.path().join("search_2020-03-17.csv"), |r| got.push(r)).unwrap();
        assert_eq!(got, vec![rec]);
    }

    #[test]
    fn latitude_bounds_enforced() {
        let date = NaiveDate::from_ymd_opt(2020, 3, 17).unwrap();
        assert!(MobilityPing::new("u".into(), 91.0, 0.0, 0, date).is_err());
        assert!(MobilityPing::new("u".into(), 0.0, -181.0, 0, date).is_err());
    }
}
