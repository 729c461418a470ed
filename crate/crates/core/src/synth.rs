//! Synthetic data generators used as statistical oracles: Gaussian feature
//! clouds with a controllable mean shift, and manifests with controllable
//! day/night mix and label distribution.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::CoreError;
use crate::matrix::FeatureMatrix;
use crate::rng::{CounterRng, RngSeed};
use crate::types::{Box2D, DatasetManifest, ManifestItem, ObjectLabel, TimeOfDay};
use crate::Result;

/// Frame bounds for generated boxes.
pub const FRAME_WIDTH: f64 = 1280.0;
pub const FRAME_HEIGHT: f64 = 720.0;

// substreams of the spec seed; features and manifest draws never overlap
const STREAM_SOURCE: u64 = 0;
const STREAM_TARGET: u64 = 1;
const STREAM_MANIFEST: u64 = 2;

/// Recipe for synthetic features and manifests.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    pub n: usize,
    pub d: usize,
    /// Per-coordinate mean offset of the target cloud, `>= 0`.
    pub shift_delta: f64,
    /// Per-class probabilities, each in `[0, 1]`, summing to 1 within 1e-9.
    /// When absent, generated items carry no labels.
    pub label_probs: Option<BTreeMap<String, f64>>,
    /// Fraction of items tagged day, in `[0, 1]`.
    pub day_fraction: f64,
    pub seed: RngSeed,
}

impl Default for SynthSpec {
    fn default() -> Self {
        SynthSpec {
            n: 100,
            d: 2,
            shift_delta: 0.0,
            label_probs: None,
            day_fraction: 0.5,
            seed: RngSeed(0),
        }
    }
}

fn validate(spec: &SynthSpec) -> Result<()> {
    if !spec.shift_delta.is_finite() || spec.shift_delta < 0.0 {
        return Err(CoreError::InvalidParam {
            name: "shift_delta",
            reason: format!("must be finite and >= 0, got {}", spec.shift_delta),
        });
    }
    if !spec.day_fraction.is_finite() || !(0.0..=1.0).contains(&spec.day_fraction) {
        return Err(CoreError::InvalidParam {
            name: "day_fraction",
            reason: format!("must lie in [0, 1], got {}", spec.day_fraction),
        });
    }
    if let Some(probs) = &spec.label_probs {
        let mut sum = 0.0;
        for (class, p) in probs {
            if !p.is_finite() || !(0.0..=1.0).contains(p) {
                return Err(CoreError::InvalidParam {
                    name: "label_probs",
                    reason: format!("probability for {class:?} must lie in [0, 1], got {p}"),
                });
            }
            sum += p;
        }
        if libm::fabs(sum - 1.0) > 1e-9 {
            return Err(CoreError::InvalidParam {
                name: "label_probs",
                reason: format!("probabilities must sum to 1, got {sum}"),
            });
        }
    }
    Ok(())
}

/// Draws a source cloud of standard normal rows and a target cloud whose
/// every coordinate mean is offset by `shift_delta`, both `n` by `d`.
///
/// The two clouds come from independent substreams of the seed, so the source
/// is bit-identical across different `shift_delta` values.
pub fn gen_features(spec: &SynthSpec) -> Result<(FeatureMatrix, FeatureMatrix)> {
    validate(spec)?;
    if spec.n == 0 {
        return Err(CoreError::Empty { what: "n" });
    }
    if spec.d == 0 {
        return Err(CoreError::InvalidParam {
            name: "d",
            reason: String::from("feature width must be >= 1"),
        });
    }
    let source = gaussian_cloud(spec.n, spec.d, 0.0, spec.seed.derive(STREAM_SOURCE), "src");
    let target = gaussian_cloud(
        spec.n,
        spec.d,
        spec.shift_delta,
        spec.seed.derive(STREAM_TARGET),
        "tgt",
    );
    Ok((source, target))
}

fn gaussian_cloud(n: usize, d: usize, mean: f64, seed: RngSeed, prefix: &str) -> FeatureMatrix {
    let mut rng = CounterRng::new(seed);
    let mut data = Vec::with_capacity(n * d);
    for _ in 0..n * d {
        data.push(rng.standard_normal() + mean);
    }
    let ids = (0..n).map(|i| format!("{prefix}-{i:06}")).collect();
    FeatureMatrix::from_flat(ids, data, d).expect("generated values are finite")
}

/// Builds a manifest of `n` items: `floor(n * day_fraction)` day items first,
/// night items after. When `label_probs` is present each item carries one
/// label with a pseudo-random box inside the frame; degenerate zero-area
/// boxes are redrawn.
pub fn gen_manifest(spec: &SynthSpec) -> Result<DatasetManifest> {
    validate(spec)?;
    let n_day = libm::floor(spec.n as f64 * spec.day_fraction) as usize;
    let n_day = n_day.min(spec.n);
    let mut rng = CounterRng::new(spec.seed.derive(STREAM_MANIFEST));
    let mut items = Vec::with_capacity(spec.n);
    for i in 0..spec.n {
        let tod = if i < n_day {
            TimeOfDay::Day
        } else {
            TimeOfDay::Night
        };
        let mut item = ManifestItem::new(format!("synth-{i:06}"), tod);
        if let Some(probs) = &spec.label_probs {
            let class = pick_class(probs, rng.next_f64());
            let b = draw_box(&mut rng);
            item = item.with_labels(alloc::vec![ObjectLabel::new(class, b)?]);
        }
        items.push(item);
    }
    DatasetManifest::new("synthetic", items)
}

/// First class whose cumulative probability exceeds `u`, falling back to the
/// last class when rounding leaves the total just under 1.
fn pick_class(probs: &BTreeMap<String, f64>, u: f64) -> String {
    let mut cum = 0.0;
    let mut last = None;
    for (class, p) in probs {
        cum += p;
        last = Some(class);
        if u < cum {
            return class.clone();
        }
    }
    last.cloned().unwrap_or_default()
}

fn draw_box(rng: &mut CounterRng) -> Box2D {
    loop {
        let mut x = [rng.next_f64() * FRAME_WIDTH, rng.next_f64() * FRAME_WIDTH];
        let mut y = [rng.next_f64() * FRAME_HEIGHT, rng.next_f64() * FRAME_HEIGHT];
        if x[0] > x[1] {
            x.swap(0, 1);
        }
        if y[0] > y[1] {
            y.swap(0, 1);
        }
        let b = Box2D::new(x[0], y[0], x[1], y[1]).expect("draws are finite and ordered");
        if b.area() > 0.0 {
            return b;
        }
    }
}
