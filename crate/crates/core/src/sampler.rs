//! Synthetic text-stream sampling.
//!
//! Streams are built from a binary-labeled corpus in bursts: each burst
//! draws a random slope and length, maps the slope to a positive-post
//! proportion, and samples posts with replacement so the gold arc rises and
//! falls accordingly. Bursts repeat until the stream reaches its target
//! length, the final burst truncated to fit exactly.

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arcs::{Post, TextStream};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::seed::unit_rng;

/// A binary-labeled post corpus split into its two pools.
#[derive(Debug, Clone)]
pub struct LabeledCorpus<S: Scalar> {
    positive: Vec<Post<S>>,
    negative: Vec<Post<S>>,
}

impl<S: Scalar> LabeledCorpus<S> {
    /// Splits posts by label; labels must be exactly 0 or 1 and both pools
    /// must end up non-empty.
    pub fn from_posts(posts: &[Post<S>]) -> Result<Self> {
        let mut positive = Vec::new();
        let mut negative = Vec::new();
        for (index, post) in posts.iter().enumerate() {
            let label = post.gold_label().ok_or(Error::UnlabeledPost { index })?;
            if label == S::one() {
                positive.push(post.clone());
            } else if label == S::zero() {
                negative.push(post.clone());
            } else {
                return Err(Error::NonBinaryLabel {
                    index,
                    value: label.to_f64().unwrap_or(f64::NAN),
                });
            }
        }
        if positive.is_empty() {
            return Err(Error::EmptyPool {
                which: "anxiety (label 1)".into(),
            });
        }
        if negative.is_empty() {
            return Err(Error::EmptyPool {
                which: "no-anxiety (label 0)".into(),
            });
        }
        Ok(Self { positive, negative })
    }

    pub fn n_positive(&self) -> usize {
        self.positive.len()
    }

    pub fn n_negative(&self) -> usize {
        self.negative.len()
    }
}

/// One burst: a slope in degrees and a length in posts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BurstSpec {
    pub slope_degrees: f64,
    pub length: usize,
}

impl BurstSpec {
    pub fn new(slope_degrees: f64, length: usize) -> Result<Self> {
        check_slope(slope_degrees)?;
        if length == 0 {
            return Err(Error::InvalidSamplerConfig {
                msg: "burst length must be at least 1".into(),
            });
        }
        Ok(Self {
            slope_degrees,
            length,
        })
    }
}

fn check_slope(slope: f64) -> Result<()> {
    if !slope.is_finite() || !(-90.0..=90.0).contains(&slope) {
        return Err(Error::SlopeOutOfRange { slope });
    }
    Ok(())
}

/// Linear map from slope to positive-post proportion: -90 degrees samples
/// only no-anxiety posts (p = 0), +90 only anxiety posts (p = 1).
pub fn slope_to_proportion(slope_degrees: f64) -> Result<f64> {
    check_slope(slope_degrees)?;
    Ok((slope_degrees + 90.0) / 180.0)
}

/// How the positive proportion is realized within a burst.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum MixingMode {
    /// The positive count is fixed at round(p * length) and positions are
    /// shuffled. Keeps every burst's empirical fraction within half a post
    /// of its target, which per-post coin flips cannot guarantee.
    #[default]
    Exact,
    /// Independent per-post Bernoulli(p) pool choice.
    Bernoulli,
}

/// Sampler configuration. Defaults follow the evaluation setup: streams of
/// 10,000 posts, 1000 streams, bursts of 50-500 posts, slopes uniform on
/// [-90, 90].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub total_length: usize,
    pub n_streams: usize,
    pub burst_len_min: usize,
    pub burst_len_max: usize,
    pub mixing: MixingMode,
    pub master_seed: u64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self {
            total_length: 10_000,
            n_streams: 1000,
            burst_len_min: 50,
            burst_len_max: 500,
            mixing: MixingMode::Exact,
            master_seed: 42,
        }
    }
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.total_length == 0 {
            return Err(Error::InvalidSamplerConfig {
                msg: "total_length must be at least 1".into(),
            });
        }
        if self.burst_len_min == 0 || self.burst_len_min > self.burst_len_max {
            return Err(Error::InvalidSamplerConfig {
                msg: format!(
                    "burst length range [{}, {}] is invalid",
                    self.burst_len_min, self.burst_len_max
                ),
            });
        }
        if self.total_length < self.burst_len_min {
            return Err(Error::InvalidSamplerConfig {
                msg: format!(
                    "total_length {} is below the minimum burst length {}",
                    self.total_length, self.burst_len_min
                ),
            });
        }
        Ok(())
    }
}

/// What one burst actually contributed to a stream.
#[derive(Debug, Clone, Serialize)]
pub struct BurstRecord {
    pub slope_degrees: f64,
    pub requested_length: usize,
    /// Equal to the requested length except for a truncated final burst.
    pub emitted_length: usize,
    pub n_positive: usize,
}

/// A generated stream plus the burst log needed to reproduce its gold arc.
#[derive(Debug, Clone)]
pub struct SampledStream<S: Scalar> {
    pub stream: TextStream<S>,
    pub bursts: Vec<BurstRecord>,
}

/// Samples one burst: `spec.length` posts drawn with replacement, the
/// positive share governed by the slope.
pub fn sample_burst<S: Scalar>(
    corpus: &LabeledCorpus<S>,
    spec: &BurstSpec,
    mixing: MixingMode,
    rng: &mut impl Rng,
) -> Result<Vec<Post<S>>> {
    let p = slope_to_proportion(spec.slope_degrees)?;
    let n_positive = match mixing {
        MixingMode::Exact => ((p * spec.length as f64).round() as usize).min(spec.length),
        MixingMode::Bernoulli => (0..spec.length).filter(|_| rng.random_bool(p)).count(),
    };
    let mut flags = vec![true; n_positive];
    flags.resize(spec.length, false);
    flags.shuffle(rng);
    Ok(flags
        .iter()
        .map(|&positive| {
            let pool = if positive {
                &corpus.positive
            } else {
                &corpus.negative
            };
            pool.choose(rng).expect("pools are non-empty").clone()
        })
        .collect())
}

fn generate_with_rng<S: Scalar>(
    corpus: &LabeledCorpus<S>,
    cfg: &SamplerConfig,
    id: &str,
    rng: &mut impl Rng,
) -> Result<SampledStream<S>> {
    cfg.validate()?;
    let mut posts: Vec<Post<S>> = Vec::with_capacity(cfg.total_length);
    let mut bursts = Vec::new();
    while posts.len() < cfg.total_length {
        let slope = rng.random_range(-90.0..=90.0);
        let requested = rng.random_range(cfg.burst_len_min..=cfg.burst_len_max);
        let emit = requested.min(cfg.total_length - posts.len());
        let burst = sample_burst(
            corpus,
            &BurstSpec::new(slope, emit)?,
            cfg.mixing,
            rng,
        )?;
        bursts.push(BurstRecord {
            slope_degrees: slope,
            requested_length: requested,
            emitted_length: emit,
            n_positive: burst
                .iter()
                .filter(|p| p.gold_label() == Some(S::one()))
                .count(),
        });
        posts.extend(burst);
    }
    Ok(SampledStream {
        stream: TextStream::new(id, posts),
        bursts,
    })
}

/// Generates stream `index` of the suite. The stream is fully determined by
/// `(cfg.master_seed, index)`.
pub fn generate_stream<S: Scalar>(
    corpus: &LabeledCorpus<S>,
    cfg: &SamplerConfig,
    index: usize,
) -> Result<SampledStream<S>> {
    let mut rng = unit_rng(cfg.master_seed, index as u64);
    generate_with_rng(corpus, cfg, &stream_id(index), &mut rng)
}

/// The suite id for stream `index`.
pub fn stream_id(index: usize) -> String {
    format!("stream-{index:05}")
}

/// Generates the whole suite in parallel. Holds every stream in memory;
/// callers that only need one stream at a time should loop over
/// [`generate_stream`] instead.
pub fn generate_suite<S: Scalar>(
    corpus: &LabeledCorpus<S>,
    cfg: &SamplerConfig,
) -> Result<Vec<SampledStream<S>>> {
    cfg.validate()?;
    (0..cfg.n_streams)
        .into_par_iter()
        .map(|i| generate_stream(corpus, cfg, i))
        .collect()
}
