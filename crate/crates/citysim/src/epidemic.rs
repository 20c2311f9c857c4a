//! Discrete-time stochastic metapopulation SEIR. Transitions are Poisson
//! draws around deterministic means, capped so compartments stay
//! nonnegative; S+E+I+R is conserved per district.

use epiwave_core::Matrix64;
use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::config::CityConfig;

#[derive(Clone, Debug)]
pub struct DayCompartments {
    pub s: Vec<u32>,
    pub e: Vec<u32>,
    pub i: Vec<u32>,
    pub r: Vec<u32>,
}

impl DayCompartments {
    pub fn total(&self, district: usize) -> u64 {
        u64::from(self.s[district])
            + u64::from(self.e[district])
            + u64::from(self.i[district])
            + u64::from(self.r[district])
    }
}

pub struct Epidemic {
    state: DayCompartments,
    population: Vec<u32>,
}

fn poisson_capped(rng: &mut impl Rng, mean: f64, cap: u32) -> u32 {
    if mean <= 0.0 || cap == 0 {
        return 0;
    }
    let draw = Poisson::new(mean).expect("positive finite mean").sample(rng);
    (draw as u64).min(u64::from(cap)) as u32
}

impl Epidemic {
    pub fn new(cfg: &CityConfig) -> Self {
        let n = cfg.n_districts;
        let mut s = vec![cfg.population_per_district; n];
        let mut e = vec![0u32; n];
        // Seed the first three districts.
        let seeded = n.min(3);
        let share = cfg.initial_exposed / seeded as u32;
        let mut remainder = cfg.initial_exposed - share * seeded as u32;
        for d in 0..seeded {
            let extra = if remainder > 0 {
                remainder -= 1;
                1
            } else {
                0
            };
            let amount = share + extra;
            e[d] = amount;
            s[d] -= amount;
        }
        Self {
            state: DayCompartments { s, e, i: vec![0; n], r: vec![0; n] },
            population: vec![cfg.population_per_district; n],
        }
    }

    pub fn state(&self) -> &DayCompartments {
        &self.state
    }

    /// Row-stochastic mixing matrix from a day's trip counts plus a
    /// self-loop weight.
    pub fn mixing(trips: &Matrix64, self_mix_weight: f64) -> Matrix64 {
        let n = trips.rows();
        let self_weight = self_mix_weight * (trips.sum() / (n * n) as f64 + 1.0);
        let mut mix = trips.add(&Matrix64::identity(n).scaled(self_weight)).expect("square");
        let sums = mix.row_sums();
        for i in 0..n {
            for j in 0..n {
                mix.set(i, j, mix.get(i, j) / sums[i]);
            }
        }
        mix
    }

    /// Advance one day; returns the reported new cases (E -> I transitions).
    pub fn step(
        &mut self,
        beta: f64,
        mix: &Matrix64,
        cfg: &CityConfig,
        rng: &mut impl Rng,
    ) -> Vec<u32> {
        let n = self.population.len();
        let mut new_cases = vec![0u32; n];
        let st = &mut self.state;

        let pressure: Vec<f64> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| mix.get(i, j) * f64::from(st.i[j]) / f64::from(self.population[j]))
                    .sum()
            })
            .collect();

        // All draws use start-of-day compartments, then apply together.
        let mut new_e = vec![0u32; n];
        let mut new_i = vec![0u32; n];
        let mut new_r = vec![0u32; n];
        let mut back_s = vec![0u32; n];
        for d in 0..n {
            let mean_e = beta * (f64::from(st.s[d]) * pressure[d] + cfg.import_scale);
            new_e[d] = poisson_capped(rng, mean_e, st.s[d]);
            new_i[d] = poisson_capped(rng, cfg.sigma * f64::from(st.e[d]), st.e[d]);
            new_r[d] = poisson_capped(rng, cfg.gamma * f64::from(st.i[d]), st.i[d]);
            back_s[d] = poisson_capped(rng, cfg.waning * f64::from(st.r[d]), st.r[d]);
        }
        for d in 0..n {
            st.s[d] = st.s[d] - new_e[d] + back_s[d];
            st.e[d] = st.e[d] + new_e[d] - new_i[d];
            st.i[d] = st.i[d] + new_i[d] - new_r[d];
            st.r[d] = st.r[d] + new_r[d] - back_s[d];
            new_cases[d] = new_i[d];
            debug_assert_eq!(st.total(d), u64::from(self.population[d]));
        }
        new_cases
    }
}
