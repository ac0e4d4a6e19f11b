//! Annotation pipeline: raw per-annotator responses in, scored lexicon out.
//!
//! The stages are questionnaire-option mapping, gold-question accuracy
//! bookkeeping, discarding of low-accuracy annotators, mean aggregation per
//! term, and summary statistics.

use std::collections::BTreeMap;
use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lexicon::{normalize_term, AnxietyScore, Lexicon, LexiconEntry};
use crate::scalar::Scalar;

/// Integer rating range (very calm .. very anxious).
pub const RATING_MIN: i8 = -3;
pub const RATING_MAX: i8 = 3;

/// One annotator's integer rating of one term.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResponseRecord {
    pub term: String,
    pub annotator: String,
    pub rating: i8,
}

impl ResponseRecord {
    /// Normalizes the term and validates the rating range.
    pub fn new(term: &str, annotator: &str, rating: i64) -> Result<Self> {
        if rating < RATING_MIN as i64 || rating > RATING_MAX as i64 {
            return Err(Error::RatingOutOfRange { value: rating });
        }
        let term = normalize_term(term);
        if term.is_empty() {
            return Err(Error::EmptyTerm);
        }
        Ok(Self {
            term,
            annotator: annotator.to_string(),
            rating: rating as i8,
        })
    }
}

/// A pre-annotated control question. Popup golds trigger immediate feedback
/// during annotation; no-popup golds are tracked silently. Both count toward
/// accuracy.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldItem {
    pub term: String,
    pub expected: i8,
    pub popup: bool,
}

impl GoldItem {
    pub fn new(term: &str, expected: i64, popup: bool) -> Result<Self> {
        if expected < RATING_MIN as i64 || expected > RATING_MAX as i64 {
            return Err(Error::RatingOutOfRange { value: expected });
        }
        let term = normalize_term(term);
        if term.is_empty() {
            return Err(Error::EmptyTerm);
        }
        Ok(Self {
            term,
            expected: expected as i8,
            popup,
        })
    }
}

/// Gold questions keyed by term. A term can be gold in only one of the two
/// pools, so the popup and no-popup sets stay disjoint by construction.
#[derive(Debug, Clone, Default)]
pub struct GoldSet {
    items: BTreeMap<String, GoldItem>,
}

impl GoldSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, item: GoldItem) -> Result<()> {
        if self.items.contains_key(&item.term) {
            return Err(Error::DuplicateGoldTerm { term: item.term });
        }
        self.items.insert(item.term.clone(), item);
        Ok(())
    }

    pub fn get(&self, term: &str) -> Option<&GoldItem> {
        self.items.get(term)
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &GoldItem> {
        self.items.values()
    }
}

/// Quality-control knobs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PipelineConfig {
    /// Annotators below this gold accuracy are discarded entirely.
    pub gold_accuracy_threshold: f64,
    /// A gold answer within this distance of the expected rating counts as
    /// correct. Zero means exact match.
    pub gold_tolerance: u8,
    /// Whether responses to gold terms also feed aggregation. Off by
    /// default: golds were authored, not crowd judgments.
    pub include_golds_in_aggregation: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            gold_accuracy_threshold: 0.80,
            gold_tolerance: 1,
            include_golds_in_aggregation: false,
        }
    }
}

/// Per-annotator quality bookkeeping.
#[derive(Debug, Clone, Serialize)]
pub struct AnnotatorStats {
    pub annotator: String,
    pub n_responses: usize,
    pub n_gold_seen: usize,
    pub n_gold_correct: usize,
    /// `None` when the annotator saw no gold questions; such annotators are
    /// kept but remain flagged by the missing accuracy.
    pub accuracy: Option<f64>,
    pub discarded: bool,
}

/// Result of quality-control filtering.
#[derive(Debug, Clone)]
pub struct QcOutcome {
    /// Responses that survive: all responses of kept annotators, minus gold
    /// questions unless configured otherwise. Input order is preserved.
    pub kept: Vec<ResponseRecord>,
    /// One row per annotator, sorted by annotator id.
    pub stats: Vec<AnnotatorStats>,
}

/// Maps a questionnaire option to its integer rating.
///
/// The seven options map bijectively onto -3..=3; matching is
/// case-insensitive after trimming.
pub fn map_option(option: &str) -> Result<i8> {
    match option.trim().to_lowercase().as_str() {
        "very anxious" => Ok(3),
        "moderately anxious" => Ok(2),
        "slightly anxious" => Ok(1),
        "not associated with feeling anxious or calm" => Ok(0),
        "slightly calm" => Ok(-1),
        "moderately calm" => Ok(-2),
        "very calm" => Ok(-3),
        _ => Err(Error::UnknownOption {
            option: option.to_string(),
        }),
    }
}

/// Scores every annotator against the gold questions and drops all responses
/// of those whose accuracy falls below the threshold. Annotators who saw no
/// golds are kept. Empty input yields empty output.
pub fn qc_filter(
    responses: &[ResponseRecord],
    golds: &GoldSet,
    cfg: &PipelineConfig,
) -> QcOutcome {
    let mut per_annotator: BTreeMap<&str, AnnotatorStats> = BTreeMap::new();
    for r in responses {
        let stats = per_annotator
            .entry(&r.annotator)
            .or_insert_with(|| AnnotatorStats {
                annotator: r.annotator.clone(),
                n_responses: 0,
                n_gold_seen: 0,
                n_gold_correct: 0,
                accuracy: None,
                discarded: false,
            });
        stats.n_responses += 1;
        if let Some(gold) = golds.get(&r.term) {
            stats.n_gold_seen += 1;
            if (r.rating as i16 - gold.expected as i16).unsigned_abs() <= cfg.gold_tolerance as u16
            {
                stats.n_gold_correct += 1;
            }
        }
    }
    for stats in per_annotator.values_mut() {
        if stats.n_gold_seen > 0 {
            let acc = stats.n_gold_correct as f64 / stats.n_gold_seen as f64;
            stats.accuracy = Some(acc);
            stats.discarded = acc < cfg.gold_accuracy_threshold;
        }
    }
    let kept = responses
        .iter()
        .filter(|r| {
            let discarded = per_annotator
                .get(r.annotator.as_str())
                .map(|s| s.discarded)
                .unwrap_or(false);
            let is_gold = golds.get(&r.term).is_some();
            !discarded && (cfg.include_golds_in_aggregation || !is_gold)
        })
        .cloned()
        .collect();
    QcOutcome {
        kept,
        stats: per_annotator.into_values().collect(),
    }
}

/// Corpus-level numbers reported alongside an aggregated lexicon.
#[derive(Debug, Clone, Serialize)]
pub struct AggregationSummary {
    pub n_terms: usize,
    pub n_annotators_kept: usize,
    pub n_annotators_discarded: usize,
    pub n_annotations_kept: usize,
    /// Mean annotations per term over the kept responses (MAI).
    pub mean_annotations_per_term: f64,
    /// The same ratio over all responses before any filtering; present only
    /// when the full pipeline ran.
    pub mean_annotations_per_term_prefilter: Option<f64>,
}

/// Averages ratings per term into a scored lexicon. Terms absent from the
/// input are absent from the output; response order never matters.
pub fn aggregate<S: Scalar>(
    kept: &[ResponseRecord],
    name: &str,
) -> Result<(Lexicon<S>, AggregationSummary)> {
    let mut sums: BTreeMap<&str, (i64, usize)> = BTreeMap::new();
    let mut annotators: Vec<&str> = Vec::new();
    for r in kept {
        let slot = sums.entry(&r.term).or_insert((0, 0));
        slot.0 += r.rating as i64;
        slot.1 += 1;
        annotators.push(&r.annotator);
    }
    annotators.sort_unstable();
    annotators.dedup();

    let mut lexicon = Lexicon::new(name);
    for (term, (sum, count)) in &sums {
        let mean = S::from_f64_lossy(*sum as f64 / *count as f64);
        lexicon.insert(LexiconEntry::new(term, AnxietyScore::new(mean)?)?)?;
    }
    let n_terms = lexicon.len();
    let summary = AggregationSummary {
        n_terms,
        n_annotators_kept: annotators.len(),
        n_annotators_discarded: 0,
        n_annotations_kept: kept.len(),
        mean_annotations_per_term: if n_terms == 0 {
            0.0
        } else {
            kept.len() as f64 / n_terms as f64
        },
        mean_annotations_per_term_prefilter: None,
    };
    Ok((lexicon, summary))
}

/// The full pipeline: QC filter, then aggregation, with the summary filled
/// in from both stages.
pub fn run_pipeline<S: Scalar>(
    responses: &[ResponseRecord],
    golds: &GoldSet,
    cfg: &PipelineConfig,
    name: &str,
) -> Result<(Lexicon<S>, AggregationSummary, Vec<AnnotatorStats>)> {
    let outcome = qc_filter(responses, golds, cfg);
    let (lexicon, mut summary) = aggregate(&outcome.kept, name)?;
    summary.n_annotators_discarded = outcome.stats.iter().filter(|s| s.discarded).count();
    summary.mean_annotations_per_term_prefilter = {
        let mut raw_terms: Vec<&str> = responses.iter().map(|r| r.term.as_str()).collect();
        raw_terms.sort_unstable();
        raw_terms.dedup();
        if raw_terms.is_empty() {
            None
        } else {
            Some(responses.len() as f64 / raw_terms.len() as f64)
        }
    };
    Ok((lexicon, summary, outcome.stats))
}

/// Reads `term,annotator_id,rating` rows (header required).
pub fn read_responses_csv(reader: impl Read) -> Result<Vec<ResponseRecord>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let mut out = Vec::new();
    for (idx, row) in rdr.records().enumerate() {
        let line = idx + 2; // 1-based, after the header
        let row = row?;
        if row.len() != 3 {
            return Err(Error::Parse {
                line,
                msg: format!("expected 3 fields, got {}", row.len()),
            });
        }
        let rating: i64 = row[2].trim().parse().map_err(|_| Error::Parse {
            line,
            msg: format!("rating '{}' is not an integer", &row[2]),
        })?;
        out.push(ResponseRecord::new(&row[0], &row[1], rating)?);
    }
    Ok(out)
}

/// Reads `term,expected,popup` rows (header required).
pub fn read_golds_csv(reader: impl Read) -> Result<GoldSet> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let mut set = GoldSet::new();
    for (idx, row) in rdr.records().enumerate() {
        let line = idx + 2;
        let row = row?;
        if row.len() != 3 {
            return Err(Error::Parse {
                line,
                msg: format!("expected 3 fields, got {}", row.len()),
            });
        }
        let expected: i64 = row[1].trim().parse().map_err(|_| Error::Parse {
            line,
            msg: format!("expected rating '{}' is not an integer", &row[1]),
        })?;
        let popup = match row[2].trim().to_lowercase().as_str() {
            "true" | "1" | "yes" => true,
            "false" | "0" | "no" => false,
            other => {
                return Err(Error::Parse {
                    line,
                    msg: format!("popup flag '{other}' is not a boolean"),
                })
            }
        };
        set.insert(GoldItem::new(&row[0], expected, popup)?)?;
    }
    Ok(set)
}
