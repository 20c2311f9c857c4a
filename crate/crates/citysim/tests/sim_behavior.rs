//! Behavioral checks on the generator: wave structure, awareness decay,
//! transmission-off limits, determinism of emitted files.

use epiwave_citysim::{emit_raw, simulate, BetaHump, CityConfig, GridSpec};

fn small_city(days: usize, seed: u64) -> CityConfig {
    CityConfig {
        name: "test-city".into(),
        seed,
        days,
        n_districts: 6,
        users: 150,
        population_per_district: 20_000,
        initial_exposed: 30,
        grid: GridSpec { rows: 2, cols: 3, lat0: 35.0, lon0: 139.0, cell_lat: 0.1, cell_lon: 0.1 },
        noise_queries_per_day: 40,
        ..CityConfig::default()
    }
}

/// 7-day moving average.
fn smooth(series: &[f64]) -> Vec<f64> {
    series
        .iter()
        .enumerate()
        .map(|(i, _)| {
            let lo = i.saturating_sub(3);
            let hi = (i + 3).min(series.len() - 1);
            series[lo..=hi].iter().sum::<f64>() / (hi - lo + 1) as f64
        })
        .collect()
}

/// Local maxima of the smoothed series, merged within `min_gap` days and
/// filtered to at least a quarter of the global peak.
fn find_peaks(series: &[f64], min_gap: usize) -> Vec<usize> {
    let s = smooth(series);
    let global = s.iter().copied().fold(0.0, f64::max);
    let mut peaks: Vec<usize> = Vec::new();
    for i in 1..s.len() - 1 {
        let lo = i.saturating_sub(7);
        let hi = (i + 7).min(s.len() - 1);
        let is_max = s[lo..=hi].iter().all(|&v| v <= s[i]);
        if !is_max || s[i] < 0.05 * global || s[i] < 20.0 {
            continue;
        }
        match peaks.last() {
            Some(&p) if i - p < min_gap => {
                if s[i] > s[p] {
                    *peaks.last_mut().unwrap() = i;
                }
            }
            _ => peaks.push(i),
        }
    }
    peaks
}

fn daily_total_cases(truth: &epiwave_citysim::GroundTruth) -> Vec<f64> {
    truth
        .series
        .days()
        .map(|snap| snap.cases.iter().map(|&c| f64::from(c)).sum())
        .collect()
}

#[test]
fn two_hump_schedule_produces_two_separated_waves() {
    let cfg = CityConfig {
        beta_humps: vec![
            BetaHump { center: 80.0, width: 12.0, height: 0.38 },
            BetaHump { center: 210.0, width: 14.0, height: 0.46 },
        ],
        ..small_city(300, 5)
    };
    let (_, truth) = simulate(&cfg).unwrap();
    let totals = daily_total_cases(&truth);
    let peaks = find_peaks(&totals, 40);
    assert!(peaks.len() >= 2, "expected two waves, found peaks at {peaks:?}");
    assert!(peaks[1] - peaks[0] >= 60, "peaks too close: {peaks:?}");
}

#[test]
fn zero_transmission_stays_at_the_seeding_floor() {
    let cfg = CityConfig {
        beta_base: 0.0,
        beta_humps: vec![],
        ..small_city(150, 6)
    };
    let (_, truth) = simulate(&cfg).unwrap();
    let total: f64 = daily_total_cases(&truth).iter().sum();
    assert!(total <= f64::from(cfg.initial_exposed), "cases {total} exceed the seed");

    // Late search volume settles at the baseline noise level.
    let weights = cfg.word_weights(truth.series.n_symptoms());
    let baseline_mean: f64 =
        cfg.search_baseline * weights.iter().sum::<f64>() * cfg.n_districts as f64;
    let late: Vec<f64> = truth
        .series
        .days()
        .skip(100)
        .map(|snap| {
            // Count raw emissions, not matcher echoes: cap at planted truth sum.
            snap.search.sum()
        })
        .collect();
    let late_mean = late.iter().sum::<f64>() / late.len() as f64;
    // Matcher echoes (substring terms) at most double the raw volume.
    assert!(
        late_mean < 3.0 * baseline_mean + 5.0,
        "late search {late_mean} far above baseline {baseline_mean}"
    );
}

/// Ratio of total search volume to total (E + I) around a day.
fn awareness_ratio(truth: &epiwave_citysim::GroundTruth, day: usize) -> f64 {
    let lo = day.saturating_sub(3);
    let hi = (day + 3).min(truth.series.len() - 1);
    let mut search = 0.0;
    let mut active = 0.0;
    for d in lo..=hi {
        search += truth.series.day(d).search.sum();
        let c = &truth.compartments[d];
        for i in 0..truth.series.n_districts() {
            active += f64::from(c.e[i]) + f64::from(c.i[i]);
        }
    }
    search / active
}

#[test]
fn search_per_active_person_decays_across_wave_peaks() {
    let cfg = small_city(300, 7);
    let (_, truth) = simulate(&cfg).unwrap();
    let totals = daily_total_cases(&truth);
    let peaks = find_peaks(&totals, 40);
    assert!(peaks.len() >= 3, "default humps should give several waves, got {peaks:?}");
    let ratios: Vec<f64> = peaks.iter().map(|&p| awareness_ratio(&truth, p)).collect();
    for pair in ratios.windows(2) {
        assert!(
            pair[1] < pair[0],
            "awareness ratio should strictly decrease across peaks: {ratios:?}"
        );
    }
}

#[test]
fn disabling_decay_keeps_the_ratio_flat() {
    let cfg = CityConfig { awareness_decay_base: 0.0, ..small_city(300, 8) };
    let (_, truth) = simulate(&cfg).unwrap();
    let totals = daily_total_cases(&truth);
    let peaks = find_peaks(&totals, 40);
    assert!(peaks.len() >= 2);
    let first = awareness_ratio(&truth, peaks[0]);
    let last = awareness_ratio(&truth, *peaks.last().unwrap());
    let drift = (first - last).abs() / first;
    assert!(drift < 0.15, "ratio must stay flat without decay: {first} vs {last}");
}

#[test]
fn emission_is_byte_stable_and_counts_match() {
    let cfg = small_city(12, 9);
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    let truth_a = emit_raw(&cfg, dir_a.path()).unwrap();
    let truth_b = emit_raw(&cfg, dir_b.path()).unwrap();
    assert_eq!(truth_a.ping_records, truth_b.ping_records);

    let mut files = 0;
    for sub in ["raw/mobility", "raw/search", "truth"] {
        let mut names: Vec<String> = std::fs::read_dir(dir_a.path().join(sub))
            .unwrap()
            .map(|e| e.unwrap().file_name().into_string().unwrap())
            .collect();
        names.sort();
        for name in names {
            let a = std::fs::read(dir_a.path().join(sub).join(&name)).unwrap();
            let b = std::fs::read(dir_b.path().join(sub).join(&name)).unwrap();
            assert_eq!(a, b, "{sub}/{name} differs between identical runs");
            files += 1;
        }
    }
    assert_eq!(files, 12 * 2 + 12 * 3);

    // Header rows are exactly the documented schemas.
    let mobility = std::fs::read_to_string(
        dir_a.path().join("raw/mobility").join("mobility_2020-04-01.csv"),
    )
    .unwrap();
    assert!(mobility.starts_with("id,lat,lon,unixtime,date"));
    let search =
        std::fs::read_to_string(dir_a.path().join("raw/search").join("search_2020-04-01.csv"))
            .unwrap();
    assert!(search.starts_with("id,time,query"));

    // Record counts in the files match the simulator's own bookkeeping.
    let mut ping_lines = 0u64;
    for entry in std::fs::read_dir(dir_a.path().join("raw/mobility")).unwrap() {
        let text = std::fs::read_to_string(entry.unwrap().path()).unwrap();
        ping_lines += text.lines().count() as u64 - 1;
    }
    assert_eq!(ping_lines, truth_a.ping_records);
    let mut query_lines = 0u64;
    for entry in std::fs::read_dir(dir_a.path().join("raw/search")).unwrap() {
        let text = std::fs::read_to_string(entry.unwrap().path()).unwrap();
        query_lines += text.lines().count() as u64 - 1;
    }
    assert_eq!(query_lines, truth_a.query_records);
}
