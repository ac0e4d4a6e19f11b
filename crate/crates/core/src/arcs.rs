//! Emotion arcs over text streams.
//!
//! A stream of posts is cut into bins (k posts advancing by a step s, or
//! fixed time periods). The predicted arc averages the lexicon scores of all
//! tokens pooled across a bin, disregarding tokens the lexicon does not
//! cover; the gold arc averages the posts' own labels. An evaluation report
//! compares the two with Spearman, Pearson, and RMSE.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lexicon::{normalize_term, Lexicon};
use crate::scalar::Scalar;
use crate::stats::{pearson, rmse, spearman, PairedSeries};

/// Lowercased Unicode word segmentation. Tokens are maximal alphanumeric
/// runs; a `#` immediately before a run stays attached to it, since hashtag
/// terms exist in the lexicons. Deterministic by construction.
pub fn tokenize(text: &str) -> Vec<String> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        if chars[i].is_alphanumeric() {
            let start = i;
            while i < chars.len() && chars[i].is_alphanumeric() {
                i += 1;
            }
            let mut raw = String::new();
            if start > 0 && chars[start - 1] == '#' {
                raw.push('#');
            }
            raw.extend(&chars[start..i]);
            tokens.push(normalize_term(&raw));
        } else {
            i += 1;
        }
    }
    tokens
}

/// One instance of a text stream: a post, sentence, or utterance.
#[derive(Debug, Clone, PartialEq)]
pub struct Post<S: Scalar> {
    raw_text: String,
    tokens: Vec<String>,
    gold_label: Option<S>,
    timestamp: Option<DateTime<Utc>>,
}

impl<S: Scalar> Post<S> {
    /// Tokens are derived here, once, so they can never drift from the text.
    pub fn new(text: &str, gold_label: Option<S>, timestamp: Option<DateTime<Utc>>) -> Self {
        Self {
            raw_text: text.to_string(),
            tokens: tokenize(text),
            gold_label,
            timestamp,
        }
    }

    pub fn text(&self) -> &str {
        &self.raw_text
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn gold_label(&self) -> Option<S> {
        self.gold_label
    }

    pub fn timestamp(&self) -> Option<DateTime<Utc>> {
        self.timestamp
    }
}

/// An ordered sequence of posts. Order is the axis of the arc.
#[derive(Debug, Clone, PartialEq)]
pub struct TextStream<S: Scalar> {
    id: String,
    posts: Vec<Post<S>>,
}

#[derive(Serialize, Deserialize)]
struct RawPost {
    text: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    label: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ts: Option<DateTime<Utc>>,
}

impl<S: Scalar> TextStream<S> {
    pub fn new(id: &str, posts: Vec<Post<S>>) -> Self {
        Self {
            id: id.to_string(),
            posts,
        }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn posts(&self) -> &[Post<S>] {
        &self.posts
    }

    pub fn len(&self) -> usize {
        self.posts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.posts.is_empty()
    }

    /// Reads one post per line: `{"text": ..., "label": ..., "ts": ...}`
    /// with `label` and `ts` optional.
    pub fn read_jsonl(reader: impl BufRead, id: &str) -> Result<Self> {
        let mut posts = Vec::new();
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let raw: RawPost = serde_json::from_str(&line).map_err(|e| Error::Parse {
                line: idx + 1,
                msg: e.to_string(),
            })?;
            posts.push(Post::new(
                &raw.text,
                raw.label.map(S::from_f64_lossy),
                raw.ts,
            ));
        }
        Ok(Self::new(id, posts))
    }

    pub fn write_jsonl(&self, mut writer: impl Write) -> Result<()> {
        for post in &self.posts {
            let raw = RawPost {
                text: post.raw_text.clone(),
                label: post.gold_label.map(|l| l.to_f64().expect("label fits f64")),
                ts: post.timestamp,
            };
            serde_json::to_writer(&mut writer, &raw)?;
            writer.write_all(b"\n")?;
        }
        Ok(())
    }
}

/// How a stream is cut into bins.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum BinSpec {
    /// Windows of `size` posts advancing by `step`. A step of 1 gives
    /// rolling windows; a step equal to the size gives non-overlapping bins.
    Count { size: usize, step: usize },
    /// Fixed wall-clock periods; a post belongs to the period containing its
    /// timestamp.
    Time { period_secs: i64 },
}

impl BinSpec {
    pub fn count(size: usize, step: usize) -> Result<Self> {
        if size == 0 || step == 0 {
            return Err(Error::InvalidBinSpec {
                msg: "bin size and step must be at least 1".into(),
            });
        }
        Ok(BinSpec::Count { size, step })
    }

    pub fn rolling(size: usize) -> Result<Self> {
        Self::count(size, 1)
    }

    pub fn non_overlapping(size: usize) -> Result<Self> {
        Self::count(size, size)
    }

    pub fn time(period_secs: i64) -> Result<Self> {
        if period_secs <= 0 {
            return Err(Error::InvalidBinSpec {
                msg: "time period must be positive".into(),
            });
        }
        Ok(BinSpec::Time { period_secs })
    }
}

/// Identifies a bin: the index of its first post (count mode) or the start
/// of its period (time mode, epoch seconds).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(untagged)]
pub enum BinKey {
    Index(usize),
    TimeSecs(i64),
}

impl std::fmt::Display for BinKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BinKey::Index(i) => write!(f, "{i}"),
            BinKey::TimeSecs(s) => {
                let ts = DateTime::<Utc>::from_timestamp(*s, 0).expect("in-range timestamp");
                write!(f, "{}", ts.to_rfc3339())
            }
        }
    }
}

/// One arc point: a bin, its mean score, and how much evidence it rests on
/// (scored tokens for predicted arcs, labeled posts for gold arcs).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ArcPoint<S: Scalar> {
    pub bin_start: BinKey,
    pub mean: S,
    pub coverage: usize,
}

/// An ordered series of per-bin mean scores.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmotionArc<S: Scalar> {
    pub points: Vec<ArcPoint<S>>,
}

impl<S: Scalar> EmotionArc<S> {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn means(&self) -> Vec<S> {
        self.points.iter().map(|p| p.mean).collect()
    }
}

/// Count-mode window start indices: 0, s, 2s, ... for every full window.
fn count_windows(n_posts: usize, size: usize, step: usize) -> impl Iterator<Item = usize> {
    (0..)
        .map(move |i| i * step)
        .take_while(move |start| start + size <= n_posts)
}

fn check_stream_and_spec<S: Scalar>(stream: &TextStream<S>, spec: &BinSpec) -> Result<()> {
    if stream.is_empty() {
        return Err(Error::EmptyInput {
            what: format!("stream '{}'", stream.id()),
        });
    }
    if let BinSpec::Count { size, .. } = spec {
        if stream.len() < *size {
            return Err(Error::StreamShorterThanBin {
                len: stream.len(),
                bin: *size,
            });
        }
    }
    Ok(())
}

/// Groups post indices by time period. Fails on the first post without a
/// timestamp.
fn time_groups<S: Scalar>(
    stream: &TextStream<S>,
    period_secs: i64,
) -> Result<BTreeMap<i64, Vec<usize>>> {
    let mut groups: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    for (idx, post) in stream.posts().iter().enumerate() {
        let ts = post
            .timestamp()
            .ok_or(Error::MissingTimestamp { index: idx })?;
        let start = ts.timestamp().div_euclid(period_secs) * period_secs;
        groups.entry(start).or_default().push(idx);
    }
    Ok(groups)
}

/// The lexicon-predicted arc: per bin, the mean score of every in-lexicon
/// token pooled across the bin's posts. Tokens absent from the lexicon are
/// disregarded; bins with no scored token emit no point.
pub fn predicted_arc<S: Scalar>(
    stream: &TextStream<S>,
    lexicon: &Lexicon<S>,
    spec: &BinSpec,
) -> Result<EmotionArc<S>> {
    if lexicon.is_empty() {
        return Err(Error::EmptyLexicon {
            name: lexicon.name().to_string(),
        });
    }
    check_stream_and_spec(stream, spec)?;

    // Per-post token-score sums; accumulation in f64 keeps window sums
    // reproducible for both scalar instantiations.
    let per_post: Vec<(f64, usize)> = stream
        .posts()
        .iter()
        .map(|post| {
            let mut sum = 0.0;
            let mut count = 0;
            for token in post.tokens() {
                if let Some(entry) = lexicon.get_normalized(token) {
                    sum += entry.score().value().to_f64().expect("score fits f64");
                    count += 1;
                }
            }
            (sum, count)
        })
        .collect();

    let mut points = Vec::new();
    match spec {
        BinSpec::Count { size, step } => {
            let mut prefix_sum = vec![0.0f64; per_post.len() + 1];
            let mut prefix_count = vec![0usize; per_post.len() + 1];
            for (i, (s, c)) in per_post.iter().enumerate() {
                prefix_sum[i + 1] = prefix_sum[i] + s;
                prefix_count[i + 1] = prefix_count[i] + c;
            }
            for start in count_windows(stream.len(), *size, *step) {
                let count = prefix_count[start + size] - prefix_count[start];
                if count > 0 {
                    let sum = prefix_sum[start + size] - prefix_sum[start];
                    points.push(ArcPoint {
                        bin_start: BinKey::Index(start),
                        mean: S::from_f64_lossy(sum / count as f64),
                        coverage: count,
                    });
                }
            }
        }
        BinSpec::Time { period_secs } => {
            for (start, indices) in time_groups(stream, *period_secs)? {
                let (sum, count) = indices
                    .iter()
                    .fold((0.0, 0usize), |(s, c), &i| (s + per_post[i].0, c + per_post[i].1));
                if count > 0 {
                    points.push(ArcPoint {
                        bin_start: BinKey::TimeSecs(start),
                        mean: S::from_f64_lossy(sum / count as f64),
                        coverage: count,
                    });
                }
            }
        }
    }
    Ok(EmotionArc { points })
}

/// The gold arc: per bin, the mean of the posts' own labels. Every post in a
/// bin must be labeled.
pub fn gold_arc<S: Scalar>(stream: &TextStream<S>, spec: &BinSpec) -> Result<EmotionArc<S>> {
    check_stream_and_spec(stream, spec)?;
    let label = |idx: usize| -> Result<f64> {
        stream.posts()[idx]
            .gold_label()
            .map(|l| l.to_f64().expect("label fits f64"))
            .ok_or(Error::UnlabeledPost { index: idx })
    };

    let mut points = Vec::new();
    match spec {
        BinSpec::Count { size, step } => {
            for start in count_windows(stream.len(), *size, *step) {
                let mut sum = 0.0;
                for idx in start..start + size {
                    sum += label(idx)?;
                }
                points.push(ArcPoint {
                    bin_start: BinKey::Index(start),
                    mean: S::from_f64_lossy(sum / *size as f64),
                    coverage: *size,
                });
            }
        }
        BinSpec::Time { period_secs } => {
            for (start, indices) in time_groups(stream, *period_secs)? {
                let mut sum = 0.0;
                for &idx in &indices {
                    sum += label(idx)?;
                }
                points.push(ArcPoint {
                    bin_start: BinKey::TimeSecs(start),
                    mean: S::from_f64_lossy(sum / indices.len() as f64),
                    coverage: indices.len(),
                });
            }
        }
    }
    Ok(EmotionArc { points })
}

/// Closeness of a predicted arc to a gold arc over their common bins.
///
/// `rmse` is computed after min-max normalizing each arc to [0, 1], so arcs
/// on different native scales compare fairly; `rmse_raw` is the unnormalized
/// value for transparency.
#[derive(Debug, Clone, Serialize)]
pub struct EvaluationReport<S: Scalar> {
    pub spearman: S,
    pub pearson: S,
    pub rmse: S,
    pub rmse_raw: S,
    pub n_bins_compared: usize,
    pub n_bins_dropped: usize,
    pub binspec: BinSpec,
}

fn min_max_normalize<S: Scalar>(values: &[S]) -> Vec<S> {
    let mut min = values[0];
    let mut max = values[0];
    for &v in values {
        min = min.min(v);
        max = max.max(v);
    }
    let range = max - min;
    values.iter().map(|&v| (v - min) / range).collect()
}

/// Aligns the two arcs on common bin starts (dropping the rest, reported)
/// and computes the three closeness measures.
pub fn evaluate<S: Scalar>(
    predicted: &EmotionArc<S>,
    gold: &EmotionArc<S>,
    spec: &BinSpec,
) -> Result<EvaluationReport<S>> {
    let gold_by_key: BTreeMap<BinKey, S> =
        gold.points.iter().map(|p| (p.bin_start, p.mean)).collect();
    let mut pred_means = Vec::new();
    let mut gold_means = Vec::new();
    for p in &predicted.points {
        if let Some(&g) = gold_by_key.get(&p.bin_start) {
            pred_means.push(p.mean);
            gold_means.push(g);
        }
    }
    let n_common = pred_means.len();
    if n_common < 2 {
        return Err(Error::TooFewCommonBins { n: n_common });
    }
    let series = PairedSeries::new(pred_means.clone(), gold_means.clone())?;
    // Correlations first: they surface degenerate (constant) arcs before
    // normalization would divide by a zero range.
    let rho = spearman(&series)?;
    let r = pearson(&series)?;
    let raw = rmse(&series)?;
    let normalized = rmse(&PairedSeries::new(
        min_max_normalize(&pred_means),
        min_max_normalize(&gold_means),
    )?)?;
    Ok(EvaluationReport {
        spearman: rho,
        pearson: r,
        rmse: normalized,
        rmse_raw: raw,
        n_bins_compared: n_common,
        n_bins_dropped: (predicted.len() - n_common) + (gold.len() - n_common),
        binspec: *spec,
    })
}

/// A predicted arc and its evaluation for one lexicon.
#[derive(Debug, Clone, Serialize)]
pub struct CrossLexiconArc<S: Scalar> {
    pub lexicon: String,
    pub arc: EmotionArc<S>,
    pub report: EvaluationReport<S>,
}

/// Predicted arcs and evaluations against the gold arc, one per lexicon.
pub fn cross_lexicon_arcs<S: Scalar>(
    stream: &TextStream<S>,
    lexicons: &[&Lexicon<S>],
    spec: &BinSpec,
) -> Result<Vec<CrossLexiconArc<S>>> {
    let gold = gold_arc(stream, spec)?;
    lexicons
        .iter()
        .map(|lexicon| {
            let arc = predicted_arc(stream, lexicon, spec)?;
            let report = evaluate(&arc, &gold, spec)?;
            Ok(CrossLexiconArc {
                lexicon: lexicon.name().to_string(),
                arc,
                report,
            })
        })
        .collect()
}
