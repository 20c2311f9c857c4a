//! Point-to-district assignment. At desk scale districts are axis-aligned
//! rectangles (half-open on their max edges); `DistrictAssigner` is the
//! adapter slot for real polygon geometries.

use std::fs;
use std::path::Path;

use crate::error::{PreprocessError, Result};

pub trait DistrictAssigner {
    fn district_count(&self) -> usize;
    fn district_names(&self) -> &[String];
    fn assign(&self, lat: f64, lon: f64) -> Option<usize>;
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rect {
    pub lat_min: f64,
    pub lat_max: f64,
    pub lon_min: f64,
    pub lon_max: f64,
}

impl Rect {
    pub fn contains(&self, lat: f64, lon: f64) -> bool {
        lat >= self.lat_min && lat < self.lat_max && lon >= self.lon_min && lon < self.lon_max
    }

    fn overlaps(&self, other: &Rect) -> bool {
        self.lat_min < other.lat_max
            && other.lat_min < self.lat_max
            && self.lon_min < other.lon_max
            && other.lon_min < self.lon_max
    }
}

#[derive(Clone, Debug)]
pub struct DistrictMap {
    names: Vec<String>,
    rects: Vec<Rect>,
}

impl DistrictMap {
    pub fn new(names: Vec<String>, rects: Vec<Rect>) -> Result<Self> {
        if names.len() != rects.len() {
            return Err(PreprocessError::BadDistrictMap(format!(
                "{} names but {} rectangles",
                names.len(),
                rects.len()
            )));
        }
        if names.is_empty() {
            return Err(PreprocessError::BadDistrictMap("empty map".into()));
        }
        for (i, a) in rects.iter().enumerate() {
            if a.lat_min >= a.lat_max || a.lon_min >= a.lon_max {
                return Err(PreprocessError::BadDistrictMap(format!(
                    "district '{}' has an empty rectangle",
                    names[i]
                )));
            }
            for (j, b) in rects.iter().enumerate().skip(i + 1) {
                if a.overlaps(b) {
                    return Err(PreprocessError::BadDistrictMap(format!(
                        "districts '{}' and '{}' overlap",
                        names[i], names[j]
                    )));
                }
            }
        }
        Ok(Self { names, rects })
    }

    /// Row-major grid of `rows x cols` cells starting at (lat0, lon0),
    /// truncated to the first `take` districts.
    pub fn grid(
        rows: usize,
        cols: usize,
        take: usize,
        lat0: f64,
        lon0: f64,
        cell_lat: f64,
        cell_lon: f64,
    ) -> Result<Self> {
        let mut names = Vec::new();
        let mut rects = Vec::new();
        'outer: for r in 0..rows {
            for c in 0..cols {
                if names.len() == take {
                    break 'outer;
                }
                names.push(format!("D{:02}", names.len() + 1));
                rects.push(Rect {
                    lat_min: lat0 + r as f64 * cell_lat,
                    lat_max: lat0 + (r + 1) as f64 * cell_lat,
                    lon_min: lon0 + c as f64 * cell_lon,
                    lon_max: lon0 + (c + 1) as f64 * cell_lon,
                });
            }
        }
        Self::new(names, rects)
    }

    pub fn center(&self, district: usize) -> (f64, f64) {
        let r = &self.rects[district];
        ((r.lat_min + r.lat_max) / 2.0, (r.lon_min + r.lon_max) / 2.0)
    }

    pub fn rect(&self, district: usize) -> &Rect {
        &self.rects[district]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// `district,lat_min,lat_max,lon_min,lon_max` rows.
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["district", "lat_min", "lat_max", "lon_min", "lon_max"])?;
        for (name, r) in self.names.iter().zip(&self.rects) {
            w.write_record([
                name.as_str(),
                &format!("{:.6}", r.lat_min),
                &format!("{:.6}", r.lat_max),
                &format!("{:.6}", r.lon_min),
                &format!("{:.6}", r.lon_max),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
        let mut names = Vec::new();
        let mut rects = Vec::new();
        for record in reader.records() {
            let record = record?;
            if record.len() != 5 {
                return Err(PreprocessError::BadDistrictMap(format!(
                    "{}: expected 5 fields per row",
                    path.display()
                )));
            }
            let field = |i: usize| -> Result<f64> {
                record[i].parse().map_err(|_| {
                    PreprocessError::BadDistrictMap(format!("bad number '{}'", &record[i]))
                })
            };
            names.push(record[0].to_string());
            rects.push(Rect {
                lat_min: field(1)?,
                lat_max: field(2)?,
                lon_min: field(3)?,
                lon_max: field(4)?,
            });
        }
        Self::new(names, rects)
    }
}

impl DistrictAssigner for DistrictMap {
    fn district_count(&self) -> usize {
        self.names.len()
    }

    fn district_names(&self) -> &[String] {
        &self.names
    }

    fn assign(&self, lat: f64, lon: f64) -> Option<usize> {
        self.rects.iter().position(|r| r.contains(lat, lon))
    }
}
