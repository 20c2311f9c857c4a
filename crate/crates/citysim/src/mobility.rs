//! Simulated users and their daily movement. Every stay emits anchor pings
//! at its first and last minute, so stay detection downstream recovers the
//! planted stays exactly; trips are consecutive distinct-district stays.

use chrono::NaiveDate;
use epiwave_core::Matrix64;
use epiwave_preprocess::{DistrictAssigner, DistrictMap, MobilityPing};
use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::config::CityConfig;

#[derive(Clone, Debug)]
pub enum UserKind {
    Permanent,
    /// Visitor active for a short consecutive day range.
    Transient { first_day: usize, last_day: usize },
}

#[derive(Clone, Debug)]
pub struct SimUser {
    pub name: String,
    pub home: usize,
    pub home_lat: f64,
    pub home_lon: f64,
    pub kind: UserKind,
}

pub struct Population {
    pub users: Vec<SimUser>,
    pub permanent_by_district: Vec<Vec<usize>>,
}

impl Population {
    pub fn generate(cfg: &CityConfig, map: &DistrictMap, rng: &mut impl Rng) -> Self {
        let n = cfg.n_districts;
        let permanent = cfg.permanent_users();
        let mut users = Vec::with_capacity(cfg.users);
        let mut permanent_by_district = vec![Vec::new(); n];
        for idx in 0..cfg.users {
            let name = format!("u{idx:05}");
            if idx < permanent {
                let home = idx % n;
                let (clat, clon) = map.center(home);
                let rect = map.rect(home);
                let max_lat = (rect.lat_max - rect.lat_min) / 8.0;
                let max_lon = (rect.lon_max - rect.lon_min) / 8.0;
                let home_lat = clat + rng.random_range(-max_lat..max_lat);
                let home_lon = clon + rng.random_range(-max_lon..max_lon);
                permanent_by_district[home].push(idx);
                users.push(SimUser { name, home, home_lat, home_lon, kind: UserKind::Permanent });
            } else {
                let first_day = rng.random_range(0..cfg.days);
                let last_day = (first_day + 2).min(cfg.days - 1);
                let home = rng.random_range(0..n);
                let (clat, clon) = map.center(home);
                users.push(SimUser {
                    name,
                    home,
                    home_lat: clat,
                    home_lon: clon,
                    kind: UserKind::Transient { first_day, last_day },
                });
            }
        }
        Self { users, permanent_by_district }
    }
}

/// Minute-of-day anchors for the fixed daily schedule.
const MORNING: (u32, u32) = (400, 530); // 06:40 .. 08:50, night hours
const EXCURSION_1: (u32, u32) = (580, 740); // 09:40 .. 12:20
const INTERLUDE: (u32, u32) = (770, 790); // 12:50 .. 13:10
const EXCURSION_2: (u32, u32) = (820, 980); // 13:40 .. 16:20
const EVENING: (u32, u32) = (1090, 1420); // 18:10 .. 23:40, night hours

pub struct DayMobility {
    pub pings: Vec<MobilityPing>,
    /// Planted trip matrix over permanent users.
    pub trips: Matrix64,
}

fn minute_ts(date: NaiveDate, minute: u32) -> i64 {
    date.and_hms_opt(minute / 60, minute % 60, 0).unwrap().and_utc().timestamp()
}

pub fn synthesize_day(
    cfg: &CityConfig,
    map: &DistrictMap,
    population: &Population,
    day: usize,
    date: NaiveDate,
    rng: &mut impl Rng,
) -> DayMobility {
    let n = cfg.n_districts;
    let jitter = cfg.ping_jitter_deg;
    let mut pings = Vec::new();
    let mut trips = Matrix64::zeros(n, n);
    let excursions = Poisson::new(cfg.trip_rate.max(1e-12)).expect("positive rate");

    for user in &population.users {
        match user.kind {
            UserKind::Permanent => {
                let k = (excursions.sample(rng) as usize).min(2);
                // Stay plan: (district, enter minute, leave minute).
                let mut plan: Vec<(usize, u32, u32)> =
                    vec![(user.home, MORNING.0, MORNING.1)];
                if k >= 1 {
                    let dest = pick_other(rng, n, user.home);
                    plan.push((dest, EXCURSION_1.0, EXCURSION_1.1));
                }
                if k == 2 {
                    plan.push((user.home, INTERLUDE.0, INTERLUDE.1));
                    let dest = pick_other(rng, n, user.home);
                    plan.push((dest, EXCURSION_2.0, EXCURSION_2.1));
                }
                plan.push((user.home, EVENING.0, EVENING.1));

                for pair in plan.windows(2) {
                    let (from, to) = (pair[0].0, pair[1].0);
                    if from != to {
                        trips.set(from, to, trips.get(from, to) + 1.0);
                    }
                }
                for &(district, enter, leave) in &plan {
                    for minute in [enter, leave] {
                        let (lat, lon) = if district == user.home {
                            (user.home_lat, user.home_lon)
                        } else {
                            map.center(district)
                        };
                        pings.push(jittered_ping(
                            user, lat, lon, date, minute, jitter, map, district, rng,
                        ));
                    }
                }
            }
            UserKind::Transient { first_day, last_day } => {
                if day < first_day || day > last_day {
                    continue;
                }
                let district = rng.random_range(0..n);
                let (lat, lon) = map.center(district);
                for minute in [660, 700] {
                    pings.push(jittered_ping(user, lat, lon, date, minute, jitter, map, district, rng));
                }
                if day == first_day {
                    // One lone night ping, far below any permanence threshold.
                    pings.push(jittered_ping(user, lat, lon, date, 1320, jitter, map, district, rng));
                }
            }
        }
    }

    DayMobility { pings, trips }
}

fn pick_other(rng: &mut impl Rng, n: usize, home: usize) -> usize {
    let raw = rng.random_range(0..n - 1);
    if raw >= home {
        raw + 1
    } else {
        raw
    }
}

#[allow(clippy::too_many_arguments)]
fn jittered_ping(
    user: &SimUser,
    lat: f64,
    lon: f64,
    date: NaiveDate,
    minute: u32,
    jitter: f64,
    map: &DistrictMap,
    district: usize,
    rng: &mut impl Rng,
) -> MobilityPing {
    let mut plat = lat + rng.random_range(-jitter..jitter);
    let mut plon = lon + rng.random_range(-jitter..jitter);
    // Jitter must never push a ping across a district border.
    if map.assign(plat, plon) != Some(district) {
        plat = lat;
        plon = lon;
    }
    MobilityPing::new(user.name.clone(), plat, plon, minute_ts(date, minute), date)
        .expect("generated coordinates are in range")
}
