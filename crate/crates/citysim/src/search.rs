//! Search log synthesis. Per (district, word) counts are Poisson draws with
//! mean a_w * (E_i + I_i) * exp(-delta_i * t) + baseline_w; each count emits
//! that many query records (the word verbatim) from users living in the
//! district, plus non-matching filler noise.
//!
//! The planted truth is matcher-aware: emitting "Chest pain" also counts
//! toward "Pain", exactly as the downstream substring matcher will see it.

use chrono::NaiveDate;
use epiwave_core::Matrix64;
use epiwave_preprocess::{SearchRecord, SymptomLexicon};
use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::config::CityConfig;
use crate::epidemic::DayCompartments;
use crate::mobility::Population;

const NOISE_QUERIES: [&str; 6] = [
    "weather tomorrow",
    "train schedule",
    "lunch menu ideas",
    "football results",
    "movie showtimes",
    "currency exchange",
];

pub struct DaySearch {
    pub records: Vec<SearchRecord>,
    /// Matcher-aware planted counts, n x n_words.
    pub truth: Matrix64,
}

pub fn synthesize_day(
    cfg: &CityConfig,
    lexicon: &SymptomLexicon,
    cross: &[Vec<usize>],
    population: &Population,
    compartments: &DayCompartments,
    decay: &[f64],
    day: usize,
    date: NaiveDate,
    rng: &mut impl Rng,
) -> DaySearch {
    let n = cfg.n_districts;
    let n_words = lexicon.len();
    let weights = cfg.word_weights(n_words);
    let names = lexicon.names();
    let mut records = Vec::new();
    let mut truth = Matrix64::zeros(n, n_words);

    for district in 0..n {
        let active = f64::from(compartments.e[district]) + f64::from(compartments.i[district]);
        let awareness = (-decay[district] * day as f64).exp();
        let residents = &population.permanent_by_district[district];
        for (word, weight) in weights.iter().enumerate() {
            let mean = cfg.search_propensity * weight * active * awareness
                + cfg.search_baseline * weight;
            let count = if mean > 0.0 {
                Poisson::new(mean).expect("positive finite mean").sample(rng) as u64
            } else {
                0
            };
            if count == 0 {
                continue;
            }
            for hit in &cross[word] {
                truth.set(district, *hit, truth.get(district, *hit) + count as f64);
            }
            for _ in 0..count {
                let user = &population.users[residents[rng.random_range(0..residents.len())]];
                records.push(SearchRecord {
                    user: user.name.clone(),
                    time: random_time(date, rng),
                    query: names[word].clone(),
                });
            }
        }
    }

    for _ in 0..cfg.noise_queries_per_day {
        let user = &population.users[rng.random_range(0..population.users.len())];
        let text = NOISE_QUERIES[rng.random_range(0..NOISE_QUERIES.len())];
        records.push(SearchRecord {
            user: user.name.clone(),
            time: random_time(date, rng),
            query: text.to_string(),
        });
    }

    DaySearch { records, truth }
}

fn random_time(date: NaiveDate, rng: &mut impl Rng) -> chrono::NaiveDateTime {
    let hour = rng.random_range(7..23);
    let minute = rng.random_range(0..60);
    let second = rng.random_range(0..60);
    date.and_hms_opt(hour, minute, second).unwrap()
}
