//! Assembling training sets with controlled day/night composition.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::CoreError;
use crate::rng::{sample_indices, CounterRng, RngSeed};
use crate::types::{DatasetManifest, Provenance, TimeOfDay};
use crate::Result;

/// Requested composition for [`build_ratio_set`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatioSpec {
    /// Name given to the resulting manifest.
    pub label: String,
    pub n_day: usize,
    pub n_night: usize,
}

/// Draws exactly `n_day` day items and `n_night` night items from `pool`
/// without replacement, deterministically under `seed`.
///
/// Day and night draws come from independent substreams of `seed`. Items
/// tagged dawn/dusk or unknown are never drawn. The result keeps pool order.
pub fn build_ratio_set(
    pool: &DatasetManifest,
    spec: &RatioSpec,
    seed: RngSeed,
) -> Result<DatasetManifest> {
    if spec.n_day + spec.n_night == 0 {
        return Err(CoreError::InvalidParam {
            name: "ratio",
            reason: String::from("n_day + n_night must be positive"),
        });
    }
    let day_pool: Vec<usize> = pool
        .items()
        .iter()
        .enumerate()
        .filter(|(_, it)| it.timeofday == TimeOfDay::Day)
        .map(|(i, _)| i)
        .collect();
    let night_pool: Vec<usize> = pool
        .items()
        .iter()
        .enumerate()
        .filter(|(_, it)| it.timeofday == TimeOfDay::Night)
        .map(|(i, _)| i)
        .collect();
    if day_pool.len() < spec.n_day {
        return Err(CoreError::Insufficient {
            what: String::from("day items"),
            needed: spec.n_day,
            available: day_pool.len(),
        });
    }
    if night_pool.len() < spec.n_night {
        return Err(CoreError::Insufficient {
            what: String::from("night items"),
            needed: spec.n_night,
            available: night_pool.len(),
        });
    }

    let mut rng_day = CounterRng::new(seed.derive(0));
    let mut rng_night = CounterRng::new(seed.derive(1));
    let mut picked: Vec<usize> = Vec::with_capacity(spec.n_day + spec.n_night);
    for i in sample_indices(day_pool.len(), spec.n_day, &mut rng_day) {
        picked.push(day_pool[i]);
    }
    for i in sample_indices(night_pool.len(), spec.n_night, &mut rng_night) {
        picked.push(night_pool[i]);
    }
    picked.sort_unstable();

    let items = picked.iter().map(|&i| pool.items()[i].clone()).collect();
    DatasetManifest::new(spec.label.clone(), items)
}

/// Keeps only the night items, preserving order and the manifest name, so
/// filtering twice equals filtering once.
pub fn filter_night(pool: &DatasetManifest) -> DatasetManifest {
    let items: Vec<_> = pool
        .items()
        .iter()
        .filter(|it| it.timeofday == TimeOfDay::Night)
        .cloned()
        .collect();
    // a subset of unique ids stays unique
    DatasetManifest::new(pool.name.clone(), items).expect("subset keeps ids unique")
}

/// Merges real data with synthesized data into one training manifest.
///
/// Generated item ids get a `gen/` prefix unless they already carry one;
/// all ids in the union must end up unique, and any collision is an error.
/// Every item on the generated side must be tagged `provenance=generated`.
/// Provenance tags survive into the union.
pub fn augment_union(
    real: &DatasetManifest,
    generated: &DatasetManifest,
) -> Result<DatasetManifest> {
    for item in generated.items() {
        if item.provenance != Provenance::Generated {
            return Err(CoreError::InvalidParam {
                name: "generated",
                reason: format!("item {:?} is not tagged provenance=generated", item.id),
            });
        }
    }
    let mut items = Vec::with_capacity(real.len() + generated.len());
    items.extend(real.items().iter().cloned());
    for item in generated.items() {
        let mut item = item.clone();
        if !item.id.starts_with("gen/") {
            item.id = format!("gen/{}", item.id);
        }
        items.push(item);
    }
    DatasetManifest::new(format!("{}+{}", real.name, generated.name), items)
}
