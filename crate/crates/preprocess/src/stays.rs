//! Stay extraction from one user's single-day trajectory.

/// A contiguous presence in one district, bounded by ping times.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Stay {
    pub district: usize,
    pub enter: i64,
    pub leave: i64,
}

impl Stay {
    pub fn duration_secs(&self) -> i64 {
        self.leave - self.enter
    }
}

/// Merge consecutive same-district pings into stays, then drop stays shorter
/// than `min_stay_secs`. Input must be time-sorted; stays shorter than the
/// threshold vanish without merging their neighbors, so a trajectory
/// A, B(brief), A yields two separate A stays.
pub fn extract_stays(day_pings: &[(i64, usize)], min_stay_secs: i64) -> Vec<Stay> {
    debug_assert!(day_pings.windows(2).all(|w| w[0].0 <= w[1].0), "pings must be time-sorted");
    let mut runs: Vec<Stay> = Vec::new();
    for &(time, district) in day_pings {
        match runs.last_mut() {
            Some(run) if run.district == district => run.leave = time,
            _ => runs.push(Stay { district, enter: time, leave: time }),
        }
    }
    runs.retain(|s| s.duration_secs() >= min_stay_secs);
    runs
}

#[cfg(test)]
mod tests {
    use super::*;

    const MIN: i64 = 600; // 10 minutes

    fn hours(h: f64) -> i64 {
        (h * 3600.0) as i64
    }

    #[test]
    fn whole_day_in_one_district_is_one_stay() {
        let pings: Vec<(i64, usize)> = (0..10).map(|k| (hours(k as f64), 0)).collect();
        let stays = extract_stays(&pings, MIN);
        assert_eq!(stays, vec![Stay { district: 0, enter: 0, leave: hours(9.0) }]);
    }

    #[test]
    fn subthreshold_visit_is_dropped_without_merging() {
        // A for 2h, B for 5 minutes, A for 2h.
        let pings = vec![
            (hours(8.0), 0),
            (hours(10.0), 0),
            (hours(10.1), 1),
            (hours(10.1) + 300, 1),
            (hours(10.2) + 300, 0),
            (hours(12.2) + 300, 0),
        ];
        let stays = extract_stays(&pings, MIN);
        assert_eq!(stays.len(), 2);
        assert!(stays.iter().all(|s| s.district == 0));
        assert!(stays[0].leave < stays[1].enter);
    }

    #[test]
    fn three_long_visits_are_three_stays() {
        // A 1h, B 30min, C 1h.
        let pings = vec![
            (hours(9.0), 0),
            (hours(10.0), 0),
            (hours(10.5), 1),
            (hours(11.0), 1),
            (hours(11.5), 2),
            (hours(12.5), 2),
        ];
        let stays = extract_stays(&pings, MIN);
        let districts: Vec<usize> = stays.iter().map(|s| s.district).collect();
        assert_eq!(districts, vec![0, 1, 2]);
    }

    #[test]
    fn exact_threshold_duration_is_kept() {
        let pings = vec![(0, 0), (MIN, 0)];
        assert_eq!(extract_stays(&pings, MIN).len(), 1);
        let pings = vec![(0, 0), (MIN - 1, 0)];
        assert!(extract_stays(&pings, MIN).is_empty());
    }
}
