//! Handcrafted three-day, three-district scenario with hand-counted trip
//! matrices: a sub-threshold visit that must vanish, a stay spanning
//! midnight that must split cleanly across days, and symptom queries routed
//! by home district.

use chrono::{NaiveDate, NaiveDateTime};
use epiwave_preprocess::records::{write_cases_file, MobilityWriter, SearchWriter};
use epiwave_preprocess::{
    run_preprocess, DistrictAssigner, DistrictMap, MobilityPing, PreprocessConfig, SearchRecord,
    SymptomLexicon,
};

const DAY0: &str = "2020-04-01";

fn date(day: usize) -> NaiveDate {
    NaiveDate::parse_from_str(DAY0, "%Y-%m-%d").unwrap() + chrono::Duration::days(day as i64)
}

fn at(day: usize, hour: u32, minute: u32) -> i64 {
    date(day).and_hms_opt(hour, minute, 0).unwrap().and_utc().timestamp()
}

fn search_time(day: usize, hour: u32) -> NaiveDateTime {
    date(day).and_hms_opt(hour, 30, 0).unwrap()
}

struct Scenario {
    map: DistrictMap,
    pings: Vec<Vec<MobilityPing>>,    // per day
    queries: Vec<Vec<SearchRecord>>,  // per day
}

impl Scenario {
    fn new(days: usize) -> Self {
        let map = DistrictMap::grid(1, 3, 3, 35.0, 139.0, 0.1, 0.1).unwrap();
        Self { map, pings: vec![Vec::new(); days], queries: vec![Vec::new(); days] }
    }

    fn ping(&mut self, day: usize, user: &str, district: usize, hour: u32, minute: u32) {
        let (lat, lon) = self.map.center(district);
        self.pings[day].push(
            MobilityPing::new(user.into(), lat, lon, at(day, hour, minute), date(day)).unwrap(),
        );
    }

    fn query(&mut self, day: usize, user: &str, text: &str) {
        self.queries[day].push(SearchRecord {
            user: user.into(),
            time: search_time(day, 11),
            query: text.into(),
        });
    }

    fn write(&self, dir: &std::path::Path) {
        let mobility = dir.join("mobility");
        let search = dir.join("search");
        std::fs::create_dir_all(&mobility).unwrap();
        std::fs::create_dir_all(&search).unwrap();
        for day in 0..self.pings.len() {
            let mut sorted = self.pings[day].clone();
            sorted.sort_by_key(|p| (p.time, p.user.clone()));
            let mut w = MobilityWriter::create(&mobility, date(day)).unwrap();
            for p in &sorted {
                w.write(p).unwrap();
            }
            w.finish().unwrap();

            let mut w = SearchWriter::create(&search, date(day)).unwrap();
            for q in &self.queries[day] {
                w.write(q).unwrap();
            }
            w.finish().unwrap();
        }
        let mut case_rows = Vec::new();
        for day in 0..self.pings.len() {
            for (i, name) in self.map.district_names().iter().enumerate() {
                case_rows.push((date(day), name.clone(), (day * 10 + i) as u32));
            }
        }
        write_cases_file(&dir.join("cases.csv"), case_rows.into_iter()).unwrap();
    }
}

/// A = district 0, B = 1, C = 2.
fn build_scenario() -> Scenario {
    let mut s = Scenario::new(3);

    // stay_home: lives in A, never leaves. Night pings anchor the home.
    for day in 0..3 {
        for (h, m) in [(10, 0), (16, 0), (22, 0), (23, 0)] {
            s.ping(day, "stay_home", 0, h, m);
        }
    }

    // commuter: lives in A. Day 1 holds a 5-minute hop into B (dropped) and
    // a one-hour errand in C (kept): stays A, A, C, A -> trips A->C, C->A.
    for day in [0, 2] {
        for (h, m) in [(9, 30), (13, 0), (22, 30), (23, 30)] {
            s.ping(day, "commuter", 0, h, m);
        }
    }
    for (district, h, m) in [
        (0, 8, 0),
        (0, 10, 0),
        (1, 10, 6),
        (1, 10, 11),
        (0, 10, 20),
        (0, 12, 20),
        (2, 13, 0),
        (2, 14, 0),
        (0, 14, 30),
        (0, 22, 30),
        (0, 23, 30),
    ] {
        s.ping(1, "commuter", district, h, m);
    }

    // nightowl: lives in B. The evening-to-morning presence in B spans
    // midnight between days 1 and 2; day 2 adds a B->A->B excursion.
    for (h, m) in [(12, 0), (21, 50), (22, 0), (23, 50)] {
        s.ping(0, "nightowl", 1, h, m);
    }
    for (h, m) in [(12, 0), (21, 50), (23, 50)] {
        s.ping(1, "nightowl", 1, h, m);
    }
    for (district, h, m) in [
        (1, 0, 10),
        (1, 1, 30),
        (0, 10, 0),
        (0, 12, 0),
        (1, 21, 0),
        (1, 23, 0),
    ] {
        s.ping(2, "nightowl", district, h, m);
    }

    // Queries: one plain match, one alias + multi-symptom, one no-match, and
    // one from a user with no home assignment.
    s.query(1, "commuter", "bad cough tonight");
    s.query(1, "nightowl", "fever and cough");
    s.query(1, "stay_home", "weather tomorrow");
    s.query(1, "ghost", "fever");

    s
}

#[test]
fn hand_counted_trips_and_search_counts() {
    let scenario = build_scenario();
    let dir = tempfile::tempdir().unwrap();
    scenario.write(dir.path());

    let lexicon = SymptomLexicon::default_44();
    let cfg = PreprocessConfig {
        min_stay_minutes: 10,
        bandwidth_deg: 0.005,
        min_night_records: 1,
        home_window_days: 2,
    };
    let (series, summary) = run_preprocess(
        &dir.path().join("mobility"),
        &dir.path().join("search"),
        &dir.path().join("cases.csv"),
        &scenario.map,
        &lexicon,
        &cfg,
    )
    .unwrap();

    assert_eq!(summary.permanent_users, 3);
    assert_eq!(summary.search_skipped_no_home, 1);
    assert_eq!(summary.search_unmatched, 1);

    // Day 0: nobody crosses districts.
    assert_eq!(series.day(0).trips.sum(), 0.0);

    // Day 1: commuter's A->C->A only; the 5-minute B hop leaves no trace and
    // nightowl stays inside B all day.
    let t1 = &series.day(1).trips;
    assert_eq!(t1.get(0, 2), 1.0, "A->C");
    assert_eq!(t1.get(2, 0), 1.0, "C->A");
    assert_eq!(t1.get(0, 1), 0.0, "the 5-minute B visit must not produce a trip");
    assert_eq!(t1.get(1, 0), 0.0);
    assert_eq!(t1.sum(), 2.0);

    // Day 2: the stay that straddled midnight split at the day boundary, so
    // the only day-2 trips are nightowl's B->A and A->B.
    let t2 = &series.day(2).trips;
    assert_eq!(t2.get(1, 0), 1.0, "B->A");
    assert_eq!(t2.get(0, 1), 1.0, "A->B");
    assert_eq!(t2.sum(), 2.0);

    // Search counts follow home districts.
    let names = lexicon.names();
    let cough = names.iter().position(|n| n == "Cough").unwrap();
    let pyrexia = names.iter().position(|n| n == "Pyrexia").unwrap();
    let h1 = &series.day(1).search;
    assert_eq!(h1.get(0, cough), 1.0, "commuter lives in A");
    assert_eq!(h1.get(1, cough), 1.0, "nightowl lives in B");
    assert_eq!(h1.get(1, pyrexia), 1.0, "alias 'fever' counts toward Pyrexia");
    assert_eq!(h1.sum(), 3.0);

    // Cases pass through by district name.
    assert_eq!(series.day(2).cases, vec![20, 21, 22]);
}

#[test]
fn stays_are_long_enough_and_ordered() {
    use epiwave_preprocess::extract_stays;
    // Conservation-style property on a random-ish trajectory.
    let pings: Vec<(i64, usize)> = vec![
        (0, 0),
        (700, 0),
        (900, 1),
        (1000, 1),
        (2000, 1),
        (2100, 0),
        (2150, 2),
        (3000, 2),
    ];
    let stays = extract_stays(&pings, 600);
    assert!(stays.iter().all(|s| s.duration_secs() >= 600));
    assert!(stays.windows(2).all(|w| w[0].leave <= w[1].enter));
}

#[test]
fn missing_calendar_day_in_one_source_is_an_error() {
    let scenario = build_scenario();
    let dir = tempfile::tempdir().unwrap();
    scenario.write(dir.path());
    std::fs::remove_file(dir.path().join("search").join("search_2020-04-02.csv")).unwrap();

    let err = run_preprocess(
        &dir.path().join("mobility"),
        &dir.path().join("search"),
        &dir.path().join("cases.csv"),
        &scenario.map,
        &SymptomLexicon::default_44(),
        &PreprocessConfig { min_night_records: 1, home_window_days: 2, ..Default::default() },
    )
    .unwrap_err()
    .to_string();
    assert!(err.contains("search"), "{err}");
    assert!(err.contains("2020-04-02"), "{err}");
}
