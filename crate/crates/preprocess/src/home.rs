//! Permanent-user filtering and mean-shift home estimation over night-hour
//! location points.

use std::collections::BTreeMap;

use crate::records::MobilityPing;

/// Night window for home estimation: 18:00 through 08:59.
pub fn is_night_hour(unix_seconds: i64) -> bool {
    let hour = (unix_seconds.rem_euclid(86_400)) / 3_600;
    !(9..18).contains(&hour)
}

/// Users with at least `min_night_records` night pings among `pings`
/// (callers restrict the slice to the home-estimation period). The
/// threshold is inclusive.
pub fn filter_permanent_users(
    pings: &[MobilityPing],
    min_night_records: usize,
) -> Vec<String> {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for p in pings {
        if is_night_hour(p.time) {
            *counts.entry(p.user.as_str()).or_default() += 1;
        }
    }
    counts
        .into_iter()
        .filter(|&(_, c)| c >= min_night_records)
        .map(|(u, _)| u.to_string())
        .collect()
}

const SHIFT_TOLERANCE_DEG: f64 = 1e-6;
const MAX_ITERATIONS: usize = 500;

/// Flat-kernel mean shift over (lat, lon, time) points. Iterates from every
/// point until the shift drops below 1e-6 degrees, then returns the mode
/// attracting the most points; ties go to the mode holding the earliest
/// point. `None` when `points` is empty.
pub fn mean_shift_mode(points: &[(f64, f64, i64)], bandwidth: f64) -> Option<(f64, f64)> {
    if points.is_empty() {
        return None;
    }
    let bw2 = bandwidth * bandwidth;
    let converged: Vec<(f64, f64)> = points
        .iter()
        .map(|&(lat0, lon0, _)| {
            let (mut lat, mut lon) = (lat0, lon0);
            for _ in 0..MAX_ITERATIONS {
                let (mut s_lat, mut s_lon, mut count) = (0.0, 0.0, 0usize);
                for &(plat, plon, _) in points {
                    let (dlat, dlon) = (plat - lat, plon - lon);
                    if dlat * dlat + dlon * dlon <= bw2 {
                        s_lat += plat;
                        s_lon += plon;
                        count += 1;
                    }
                }
                // The start point itself is always in range.
                let (next_lat, next_lon) = (s_lat / count as f64, s_lon / count as f64);
                let shift = ((next_lat - lat).powi(2) + (next_lon - lon).powi(2)).sqrt();
                lat = next_lat;
                lon = next_lon;
                if shift < SHIFT_TOLERANCE_DEG {
                    break;
                }
            }
            (lat, lon)
        })
        .collect();

    // Group converged positions into modes within half a bandwidth.
    let merge2 = (bandwidth / 2.0) * (bandwidth / 2.0);
    let mut modes: Vec<(f64, f64, usize, i64)> = Vec::new(); // (sum_lat, sum_lon, members, earliest time)
    for (&(lat, lon), &(_, _, time)) in converged.iter().zip(points) {
        let found = modes.iter_mut().find(|(s_lat, s_lon, n, _)| {
            let (c_lat, c_lon) = (*s_lat / *n as f64, *s_lon / *n as f64);
            (c_lat - lat).powi(2) + (c_lon - lon).powi(2) <= merge2
        });
        match found {
            Some((s_lat, s_lon, n, earliest)) => {
                *s_lat += lat;
                *s_lon += lon;
                *n += 1;
                *earliest = (*earliest).min(time);
            }
            None => modes.push((lat, lon, 1, time)),
        }
    }

    modes
        .iter()
        .max_by(|a, b| a.2.cmp(&b.2).then(b.3.cmp(&a.3)))
        .map(|&(s_lat, s_lon, n, _)| (s_lat / n as f64, s_lon / n as f64))
}

/// Home estimate for one user's night pings.
pub fn estimate_home(night_pings: &[MobilityPing], bandwidth: f64) -> Option<(f64, f64)> {
    let points: Vec<(f64, f64, i64)> =
        night_pings.iter().map(|p| (p.lat, p.lon, p.time)).collect();
    mean_shift_mode(&points, bandwidth)
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::NaiveDate;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ping(user: &str, time: i64) -> MobilityPing {
        MobilityPing::new(
            user.into(),
            35.0,
            139.0,
            time,
            NaiveDate::from_ymd_opt(2020, 1, 6).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn night_window_is_6pm_to_9am() {
        let base = 0; // midnight
        assert!(is_night_hour(base));
        assert!(is_night_hour(base + 8 * 3600 + 3599));
        assert!(!is_night_hour(base + 9 * 3600));
        assert!(!is_night_hour(base + 17 * 3600 + 3599));
        assert!(is_night_hour(base + 18 * 3600));
        assert!(is_night_hour(base + 23 * 3600));
    }

    #[test]
    fn permanent_filter_threshold_is_inclusive() {
        let mut pings = Vec::new();
        // "exact" gets exactly 3 night pings, "sparse" 2, "absent" none.
        for k in 0..3 {
            pings.push(ping("exact", 19 * 3600 + k));
        }
        for k in 0..2 {
            pings.push(ping("sparse", 20 * 3600 + k));
        }
        pings.push(ping("dayonly", 12 * 3600));
        let kept = filter_permanent_users(&pings, 3);
        assert_eq!(kept, vec!["exact".to_string()]);
    }

    #[test]
    fn planted_split_is_recovered() {
        // 100 users, 10 transient with a single night ping.
        let mut pings = Vec::new();
        for u in 0..100 {
            let name = format!("u{u:03}");
            let nights = if u < 10 { 1 } else { 25 };
            for k in 0..nights {
                pings.push(ping(&name, k as i64 * 86_400 + 22 * 3600));
            }
        }
        let kept = filter_permanent_users(&pings, 20);
        assert_eq!(kept.len(), 90);
        assert!(!kept.contains(&"u005".to_string()));
    }

    #[test]
    fn single_point_is_its_own_mode() {
        let mode = mean_shift_mode(&[(35.5, 139.5, 0)], 0.005).unwrap();
        assert_eq!(mode, (35.5, 139.5));
    }

    #[test]
    fn coincident_points_are_a_fixed_point() {
        let pts = vec![(35.5, 139.5, 0), (35.5, 139.5, 10), (35.5, 139.5, 20)];
        let mode = mean_shift_mode(&pts, 0.005).unwrap();
        assert_eq!(mode, (35.5, 139.5));
    }

    #[test]
    fn dominant_blob_wins() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut pts = Vec::new();
        let (major, minor) = ((35.70, 139.50), (35.75, 139.60));
        for k in 0..80 {
            pts.push((
                major.0 + rng.random_range(-0.003..0.003) * (1.0 / 3.0),
                major.1 + rng.random_range(-0.003..0.003) * (1.0 / 3.0),
                k,
            ));
        }
        for k in 0..20 {
            pts.push((
                minor.0 + rng.random_range(-0.003..0.003) * (1.0 / 3.0),
                minor.1 + rng.random_range(-0.003..0.003) * (1.0 / 3.0),
                100 + k,
            ));
        }
        let (lat, lon) = mean_shift_mode(&pts, 0.005).unwrap();
        let dist = ((lat - major.0).powi(2) + (lon - major.1).powi(2)).sqrt();
        assert!(dist < 1e-3, "mode {lat},{lon} is {dist} degrees from the planted center");
    }
}
