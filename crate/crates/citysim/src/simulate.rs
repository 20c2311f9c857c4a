//! Day-loop orchestration and raw-file emission.

use std::fs;
use std::path::Path;

use chrono::{Duration, NaiveDate};
use epiwave_preprocess::records::{write_cases_file, MobilityWriter, SearchWriter};
use epiwave_preprocess::{DistrictAssigner, MobilityPing, SearchRecord, SymptomLexicon};
use epiwave_wmn::{io as wmn_io, SnapshotSeries, WmnSnapshot};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::CityConfig;
use crate::epidemic::{DayCompartments, Epidemic};
use crate::error::Result;
use crate::mobility::{self, Population};
use crate::search;

/// One day's raw output.
pub struct RawDay {
    pub day: usize,
    pub date: NaiveDate,
    pub pings: Vec<MobilityPing>,
    pub queries: Vec<SearchRecord>,
}

/// Everything the simulator knows that ingestion must recover or respect.
pub struct GroundTruth {
    /// Planted trip, search, and case data as a proper snapshot series.
    pub series: SnapshotSeries,
    /// End-of-day compartment states per day.
    pub compartments: Vec<DayCompartments>,
    pub ping_records: u64,
    pub query_records: u64,
}

fn lexicon_of(cfg: &CityConfig) -> SymptomLexicon {
    match &cfg.symptoms {
        Some(names) => SymptomLexicon::from_names(names),
        None => SymptomLexicon::default_44(),
    }
}

fn run_simulation(
    cfg: &CityConfig,
    mut sink: impl FnMut(RawDay) -> Result<()>,
) -> Result<GroundTruth> {
    cfg.validate()?;
    let map = cfg.district_map()?;
    let lexicon = lexicon_of(cfg);
    let cross = lexicon.cross_matches();
    let decay = cfg.decay_rates();

    let mut rng_pop = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x504f_5055);
    let mut rng_mob = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x4d4f_4249);
    let mut rng_epi = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5345_4952);
    let mut rng_sea = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5345_4143);

    let population = Population::generate(cfg, &map, &mut rng_pop);
    let mut epidemic = Epidemic::new(cfg);

    let mut snapshots = Vec::with_capacity(cfg.days);
    let mut compartments = Vec::with_capacity(cfg.days);
    let mut ping_records = 0u64;
    let mut query_records = 0u64;

    for day in 0..cfg.days {
        let date = cfg.start_date + Duration::days(day as i64);
        let mob = mobility::synthesize_day(cfg, &map, &population, day, date, &mut rng_mob);
        let mix = Epidemic::mixing(&mob.trips, cfg.self_mix_weight);
        let cases = epidemic.step(cfg.beta_at(day), &mix, cfg, &mut rng_epi);
        compartments.push(epidemic.state().clone());
        let sea = search::synthesize_day(
            cfg,
            &lexicon,
            &cross,
            &population,
            epidemic.state(),
            &decay,
            day,
            date,
            &mut rng_sea,
        );

        ping_records += mob.pings.len() as u64;
        query_records += sea.records.len() as u64;
        snapshots.push(WmnSnapshot::new(day, mob.trips, sea.truth, cases)?);
        sink(RawDay { day, date, pings: mob.pings, queries: sea.records })?;
    }

    let series = SnapshotSeries::new(
        cfg.start_date,
        map.district_names().to_vec(),
        lexicon.names(),
        snapshots,
    )?;
    Ok(GroundTruth { series, compartments, ping_records, query_records })
}

/// Run the simulation collecting every day's raw records in memory. Suited
/// to small configurations; large cities should stream via `emit_raw`.
pub fn simulate(cfg: &CityConfig) -> Result<(Vec<RawDay>, GroundTruth)> {
    let mut days = Vec::with_capacity(cfg.days);
    let truth = run_simulation(cfg, |day| {
        days.push(day);
        Ok(())
    })?;
    Ok((days, truth))
}

/// Stream the simulation into `out_dir`:
///
///   out_dir/districts.csv
///   out_dir/raw/mobility/mobility_<date>.csv
///   out_dir/raw/search/search_<date>.csv
///   out_dir/raw/cases.csv
///   out_dir/truth/{trips,search,cases}_<date>.csv
///
/// Output is byte-stable for a fixed config.
pub fn emit_raw(cfg: &CityConfig, out_dir: &Path) -> Result<GroundTruth> {
    let mobility_dir = out_dir.join("raw").join("mobility");
    let search_dir = out_dir.join("raw").join("search");
    fs::create_dir_all(&mobility_dir)?;
    fs::create_dir_all(&search_dir)?;

    let mut cases_rows: Vec<(NaiveDate, String, u32)> = Vec::new();
    let district_names = cfg.district_map()?.district_names().to_vec();
    let truth = run_simulation(cfg, |day| {
        let mut mw = MobilityWriter::create(&mobility_dir, day.date)?;
        for ping in &day.pings {
            mw.write(ping)?;
        }
        mw.finish()?;
        let mut sw = SearchWriter::create(&search_dir, day.date)?;
        for record in &day.queries {
            sw.write(record)?;
        }
        sw.finish()?;
        Ok(())
    })?;

    for snap in truth.series.days() {
        let date = truth.series.date_of(snap.day);
        for (i, name) in district_names.iter().enumerate() {
            cases_rows.push((date, name.clone(), snap.cases[i]));
        }
    }
    write_cases_file(&out_dir.join("raw").join("cases.csv"), cases_rows.into_iter())?;
    cfg.district_map()?.save(&out_dir.join("districts.csv"))?;
    wmn_io::write_series(&truth.series, &out_dir.join("truth"))?;
    Ok(truth)
}
