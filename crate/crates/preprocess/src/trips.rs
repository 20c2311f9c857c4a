//! Trip counting: each consecutive pair of distinct-district valid stays is
//! one directed trip.

use epiwave_core::Matrix64;

use crate::stays::Stay;

/// Accumulate one day's trip matrix from per-user stay sequences.
pub fn count_trips<'a>(
    stays_per_user: impl Iterator<Item = &'a [Stay]>,
    n_districts: usize,
) -> Matrix64 {
    let mut trips = Matrix64::zeros(n_districts, n_districts);
    for stays in stays_per_user {
        for pair in stays.windows(2) {
            let (from, to) = (pair[0].district, pair[1].district);
            if from != to {
                trips.set(from, to, trips.get(from, to) + 1.0);
            }
        }
    }
    trips
}
