//! Scored lexicons: the anxiety score scale, the seven ordinal classes,
//! general equal-width class schemes over [-3, 3], and lexicon TSV I/O.

use std::collections::btree_map::{self, BTreeMap};
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};
use unicode_normalization::UnicodeNormalization;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Lower end of the score scale (very calm).
pub const SCORE_MIN: f64 = -3.0;
/// Upper end of the score scale (very anxious).
pub const SCORE_MAX: f64 = 3.0;

/// A real-valued anxiety association score in [-3, +3]. Negative is calm,
/// positive is anxious.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct AnxietyScore<S: Scalar>(S);

impl<S: Scalar> AnxietyScore<S> {
    /// Rejects NaN and anything outside [-3, 3].
    pub fn new(value: S) -> Result<Self> {
        let lo = S::from_f64_lossy(SCORE_MIN);
        let hi = S::from_f64_lossy(SCORE_MAX);
        if !value.is_finite() || value < lo || value > hi {
            return Err(Error::ScoreOutOfRange {
                value: value.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(Self(value))
    }

    pub fn value(self) -> S {
        self.0
    }

    /// The seven-class ordinal label for this score.
    ///
    /// Anxiety-side intervals are lower-inclusive ([2.5, 3] is high anxiety,
    /// [1.5, 2.5) moderate, [0.5, 1.5) slight); the calm side mirrors them
    /// with upper-inclusive intervals, so every score, boundaries included,
    /// belongs to exactly one class.
    pub fn class7(self) -> OrdinalClass {
        let v = self.0;
        let c = |x: f64| S::from_f64_lossy(x);
        if v >= c(2.5) {
            OrdinalClass::HighAnxiety
        } else if v >= c(1.5) {
            OrdinalClass::ModerateAnxiety
        } else if v >= c(0.5) {
            OrdinalClass::SlightAnxiety
        } else if v > c(-0.5) {
            OrdinalClass::Neither
        } else if v > c(-1.5) {
            OrdinalClass::SlightCalmness
        } else if v > c(-2.5) {
            OrdinalClass::ModerateCalmness
        } else {
            OrdinalClass::HighCalmness
        }
    }
}

/// The seven ordinal classes, in calm-to-anxious order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrdinalClass {
    HighCalmness,
    ModerateCalmness,
    SlightCalmness,
    Neither,
    SlightAnxiety,
    ModerateAnxiety,
    HighAnxiety,
}

impl OrdinalClass {
    /// All classes, calm to anxious.
    pub const ALL: [OrdinalClass; 7] = [
        OrdinalClass::HighCalmness,
        OrdinalClass::ModerateCalmness,
        OrdinalClass::SlightCalmness,
        OrdinalClass::Neither,
        OrdinalClass::SlightAnxiety,
        OrdinalClass::ModerateAnxiety,
        OrdinalClass::HighAnxiety,
    ];

    /// Signed index: -3 (high calmness) through +3 (high anxiety).
    pub fn index(self) -> i8 {
        match self {
            OrdinalClass::HighCalmness => -3,
            OrdinalClass::ModerateCalmness => -2,
            OrdinalClass::SlightCalmness => -1,
            OrdinalClass::Neither => 0,
            OrdinalClass::SlightAnxiety => 1,
            OrdinalClass::ModerateAnxiety => 2,
            OrdinalClass::HighAnxiety => 3,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            OrdinalClass::HighCalmness => "high_calmness",
            OrdinalClass::ModerateCalmness => "moderate_calmness",
            OrdinalClass::SlightCalmness => "slight_calmness",
            OrdinalClass::Neither => "neither",
            OrdinalClass::SlightAnxiety => "slight_anxiety",
            OrdinalClass::ModerateAnxiety => "moderate_anxiety",
            OrdinalClass::HighAnxiety => "high_anxiety",
        }
    }

    pub fn is_anxiety(self) -> bool {
        self.index() > 0
    }

    pub fn is_calmness(self) -> bool {
        self.index() < 0
    }
}

impl std::fmt::Display for OrdinalClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// An equal-width partition of [-3, 3] into `n_bins` bins.
///
/// Bins are lower-inclusive and upper-exclusive except the topmost bin,
/// which also contains +3.0.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassScheme<S: Scalar> {
    n_bins: usize,
    bin_width: S,
    boundaries: Vec<S>,
}

impl<S: Scalar> ClassScheme<S> {
    pub fn equal_width(n_bins: usize) -> Result<Self> {
        if n_bins == 0 {
            return Err(Error::InvalidScheme {
                msg: "need at least one bin".into(),
            });
        }
        let span = SCORE_MAX - SCORE_MIN;
        let boundaries: Vec<S> = (1..n_bins)
            .map(|i| S::from_f64_lossy(SCORE_MIN + span * (i as f64) / (n_bins as f64)))
            .collect();
        let scheme = Self {
            n_bins,
            bin_width: S::from_f64_lossy(span / n_bins as f64),
            boundaries,
        };
        debug_assert!(scheme.widths_are_equal(1e-12));
        Ok(scheme)
    }

    fn widths_are_equal(&self, tol: f64) -> bool {
        let lo = S::from_f64_lossy(SCORE_MIN);
        let hi = S::from_f64_lossy(SCORE_MAX);
        let mut prev = lo;
        let width = self.bin_width.to_f64().unwrap();
        for &b in self.boundaries.iter().chain(std::iter::once(&hi)) {
            if ((b - prev).to_f64().unwrap() - width).abs() > tol {
                return false;
            }
            prev = b;
        }
        true
    }

    pub fn n_bins(&self) -> usize {
        self.n_bins
    }

    pub fn bin_width(&self) -> S {
        self.bin_width
    }

    /// Cut points between bins, ascending; `n_bins - 1` of them.
    pub fn boundaries(&self) -> &[S] {
        &self.boundaries
    }

    /// Bin index in [0, n_bins) for a score.
    pub fn bin_for(&self, score: AnxietyScore<S>) -> usize {
        let v = score.value();
        self.boundaries.partition_point(|&b| b <= v)
    }
}

/// One lexicon row: a normalized term, its score, and the class derived from
/// the score. The class is always re-derived at construction so it cannot
/// drift out of sync.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LexiconEntry<S: Scalar> {
    term: String,
    score: AnxietyScore<S>,
    class: OrdinalClass,
}

impl<S: Scalar> LexiconEntry<S> {
    pub fn new(term: &str, score: AnxietyScore<S>) -> Result<Self> {
        let term = normalize_term(term);
        if term.is_empty() {
            return Err(Error::EmptyTerm);
        }
        Ok(Self {
            term,
            score,
            class: score.class7(),
        })
    }

    pub fn term(&self) -> &str {
        &self.term
    }

    pub fn score(&self) -> AnxietyScore<S> {
        self.score
    }

    pub fn class(&self) -> OrdinalClass {
        self.class
    }
}

/// A named map of unique terms to scored entries. Immutable once built;
/// lookups of absent terms are misses, not errors.
#[derive(Debug, Clone, PartialEq)]
pub struct Lexicon<S: Scalar> {
    name: String,
    entries: BTreeMap<String, LexiconEntry<S>>,
}

/// Term normalization used everywhere terms or tokens meet the lexicon:
/// Unicode NFC, trimmed, lowercased. Nothing else -- the data includes
/// creative spellings and hashtag terms that stemming would destroy.
pub fn normalize_term(raw: &str) -> String {
    raw.trim().nfc().collect::<String>().to_lowercase()
}

impl<S: Scalar> Lexicon<S> {
    pub fn new(name: &str) -> Self {
        Self {
            name: name.to_string(),
            entries: BTreeMap::new(),
        }
    }

    /// Builds a lexicon from (term, score) pairs; duplicate terms after
    /// normalization are an error.
    pub fn from_entries(
        name: &str,
        pairs: impl IntoIterator<Item = (String, S)>,
    ) -> Result<Self> {
        let mut lex = Self::new(name);
        for (term, value) in pairs {
            lex.insert(LexiconEntry::new(&term, AnxietyScore::new(value)?)?)?;
        }
        Ok(lex)
    }

    pub fn insert(&mut self, entry: LexiconEntry<S>) -> Result<()> {
        match self.entries.entry(entry.term.clone()) {
            btree_map::Entry::Occupied(_) => Err(Error::DuplicateTerm { term: entry.term }),
            btree_map::Entry::Vacant(slot) => {
                slot.insert(entry);
                Ok(())
            }
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entry for a term that is already normalized (e.g. a tokenizer output).
    pub fn get_normalized(&self, term: &str) -> Option<&LexiconEntry<S>> {
        self.entries.get(term)
    }

    /// Entry lookup with normalization applied to the query.
    pub fn get(&self, term: &str) -> Option<&LexiconEntry<S>> {
        self.entries.get(&normalize_term(term))
    }

    /// Score lookup; `None` is a miss, not an error.
    pub fn score_of(&self, term: &str) -> Option<S> {
        self.get(term).map(|e| e.score.value())
    }

    /// Entries in term order.
    pub fn iter(&self) -> impl Iterator<Item = &LexiconEntry<S>> {
        self.entries.values()
    }

    /// Counts and percentages per ordinal class, calm to anxious.
    /// Errors on an empty lexicon; percentages sum to 100.
    pub fn class_distribution(&self) -> Result<ClassDistribution<S>> {
        if self.is_empty() {
            return Err(Error::EmptyLexicon {
                name: self.name.clone(),
            });
        }
        let mut counts = [0usize; 7];
        for entry in self.iter() {
            counts[(entry.class.index() + 3) as usize] += 1;
        }
        let total = S::from_usize_lossy(self.len());
        let hundred = S::from_f64_lossy(100.0);
        let rows = OrdinalClass::ALL
            .iter()
            .zip(counts)
            .map(|(&class, count)| ClassShare {
                class,
                count,
                percentage: S::from_usize_lossy(count) * hundred / total,
            })
            .collect();
        Ok(ClassDistribution {
            total: self.len(),
            rows,
        })
    }

    /// Reads `term<TAB>score` rows. `#`-prefixed lines are comments; a first
    /// row whose second field is not a number is treated as a header.
    pub fn from_tsv(reader: impl BufRead, name: &str) -> Result<Self> {
        let mut lex = Self::new(name);
        let mut saw_data = false;
        for (idx, line) in reader.lines().enumerate() {
            let line_no = idx + 1;
            let line = line?;
            let trimmed = line.trim_end_matches(['\r', '\n']);
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let mut fields = trimmed.split('\t');
            let term = fields.next().unwrap_or("");
            let score_field = match fields.next() {
                Some(f) => f,
                None => {
                    return Err(Error::Parse {
                        line: line_no,
                        msg: "expected two tab-separated fields".into(),
                    })
                }
            };
            if fields.next().is_some() {
                return Err(Error::Parse {
                    line: line_no,
                    msg: "expected exactly two tab-separated fields".into(),
                });
            }
            let value: f64 = match score_field.trim().parse() {
                Ok(v) => v,
                Err(_) if !saw_data => {
                    // header line
                    continue;
                }
                Err(_) => {
                    return Err(Error::Parse {
                        line: line_no,
                        msg: format!("score '{score_field}' is not a number"),
                    })
                }
            };
            saw_data = true;
            let score = AnxietyScore::new(S::from_f64_lossy(value))?;
            let entry = LexiconEntry::new(term, score).map_err(|e| match e {
                Error::EmptyTerm => Error::Parse {
                    line: line_no,
                    msg: "empty term".into(),
                },
                other => other,
            })?;
            lex.insert(entry)?;
        }
        Ok(lex)
    }

    /// Writes `term<TAB>score` rows in term order, preceded by the given
    /// comment lines (each written with a leading `#`).
    pub fn write_tsv(&self, mut writer: impl Write, comments: &[String]) -> Result<()> {
        for c in comments {
            writeln!(writer, "# {c}")?;
        }
        for entry in self.iter() {
            writeln!(writer, "{}\t{}", entry.term, entry.score.value())?;
        }
        Ok(())
    }
}

/// Count and share of one class within a lexicon.
#[derive(Debug, Clone, Serialize)]
pub struct ClassShare<S: Scalar> {
    pub class: OrdinalClass,
    pub count: usize,
    pub percentage: S,
}

/// Histogram of a lexicon over the seven classes.
#[derive(Debug, Clone, Serialize)]
pub struct ClassDistribution<S: Scalar> {
    pub total: usize,
    pub rows: Vec<ClassShare<S>>,
}

impl<S: Scalar> ClassDistribution<S> {
    pub fn share(&self, class: OrdinalClass) -> &ClassShare<S> {
        &self.rows[(class.index() + 3) as usize]
    }
}
