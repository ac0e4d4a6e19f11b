//! Anxiety-lexicon engine.
//!
//! Turns raw word-level anxiety annotations into a scored lexicon with
//! quality control, quantifies lexicon reliability with split-half measures,
//! scores anxiety arcs over text streams with nothing but the lexicon, and
//! runs cross-lexicon and age-of-acquisition analyses.
//!
//! Every module is generic over the floating-point scalar via [`Scalar`]
//! (`f32` or `f64`); the aliases at the crate root pin the default `f64`
//! instantiation that the command-line tool uses.

pub mod analysis;
pub mod annotation;
pub mod arcs;
pub mod error;
pub mod lexicon;
pub mod reliability;
pub mod sampler;
pub mod scalar;
pub mod seed;
pub mod stats;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Score scale, double precision.
pub type AnxietyScore = lexicon::AnxietyScore<f64>;
/// Equal-width class scheme, double precision.
pub type ClassScheme = lexicon::ClassScheme<f64>;
/// Lexicon row, double precision.
pub type LexiconEntry = lexicon::LexiconEntry<f64>;
/// Scored lexicon, double precision.
pub type Lexicon = lexicon::Lexicon<f64>;
/// Class histogram, double precision.
pub type ClassDistribution = lexicon::ClassDistribution<f64>;
/// Paired statistic input, double precision.
pub type PairedSeries = stats::PairedSeries<f64>;
/// Split-half report, double precision.
pub type ReliabilityReport = reliability::ReliabilityReport<f64>;
/// Stream post, double precision labels.
pub type Post = arcs::Post<f64>;
/// Ordered post sequence, double precision labels.
pub type TextStream = arcs::TextStream<f64>;
/// Per-bin mean series, double precision.
pub type EmotionArc = arcs::EmotionArc<f64>;
/// Arc-vs-arc closeness report, double precision.
pub type EvaluationReport = arcs::EvaluationReport<f64>;
/// Binary-labeled sampling corpus, double precision labels.
pub type LabeledCorpus = sampler::LabeledCorpus<f64>;
/// Generated stream plus its burst log, double precision labels.
pub type SampledStream = sampler::SampledStream<f64>;
/// Term-score view for joins, double precision.
pub type ScoreTable = analysis::ScoreTable<f64>;
/// Inner join of resources, double precision.
pub type LexiconJoin = analysis::LexiconJoin<f64>;
/// Cross-resource correlations, double precision.
pub type CorrelationMatrix = analysis::CorrelationMatrix<f64>;
