//! Cross-lexicon and lexical-property analyses: inner joins of term-score
//! resources, correlation matrices between them, affect-space quadrant
//! tagging, and age-of-acquisition breakdowns.

use std::collections::BTreeMap;
use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lexicon::{normalize_term, Lexicon, OrdinalClass};
use crate::scalar::Scalar;
use crate::stats::{pearson, spearman, PairedSeries};

/// A named term-to-score map: the join-friendly view of any lexicon-like
/// resource.
#[derive(Debug, Clone)]
pub struct ScoreTable<S: Scalar> {
    name: String,
    scores: BTreeMap<String, S>,
}

impl<S: Scalar> ScoreTable<S> {
    pub fn from_lexicon(lexicon: &Lexicon<S>) -> Self {
        Self {
            name: lexicon.name().to_string(),
            scores: lexicon
                .iter()
                .map(|e| (e.term().to_string(), e.score().value()))
                .collect(),
        }
    }

    /// Builds a table from raw pairs, normalizing terms; later duplicates
    /// overwrite earlier ones.
    pub fn from_pairs(name: &str, pairs: impl IntoIterator<Item = (String, S)>) -> Self {
        Self {
            name: name.to_string(),
            scores: pairs
                .into_iter()
                .map(|(t, v)| (normalize_term(&t), v))
                .collect(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }
}

/// One joined term with one value per resource, in resource order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TermJoin<S: Scalar> {
    pub term: String,
    pub values: Vec<S>,
}

/// Inner join of several resources over their shared terms.
#[derive(Debug, Clone, Serialize)]
pub struct LexiconJoin<S: Scalar> {
    pub resources: Vec<String>,
    pub rows: Vec<TermJoin<S>>,
}

impl<S: Scalar> LexiconJoin<S> {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    fn resource_index(&self, name: &str) -> Result<usize> {
        self.resources
            .iter()
            .position(|r| r == name)
            .ok_or_else(|| Error::MissingResource {
                name: name.to_string(),
            })
    }

    fn column(&self, index: usize) -> Vec<S> {
        self.rows.iter().map(|r| r.values[index]).collect()
    }
}

/// Inner-joins the resources on their normalized terms. Only terms present
/// in every resource survive; rows come out in term order.
pub fn join_lexicons<S: Scalar>(resources: &[ScoreTable<S>]) -> Result<LexiconJoin<S>> {
    if resources.len() < 2 {
        return Err(Error::TooFewResources {
            n: resources.len(),
        });
    }
    let (first, rest) = resources.split_first().expect("length checked");
    let mut rows = Vec::new();
    'terms: for (term, &value) in &first.scores {
        let mut values = Vec::with_capacity(resources.len());
        values.push(value);
        for table in rest {
            match table.scores.get(term) {
                Some(&v) => values.push(v),
                None => continue 'terms,
            }
        }
        rows.push(TermJoin {
            term: term.clone(),
            values,
        });
    }
    if rows.is_empty() {
        return Err(Error::EmptyJoin);
    }
    Ok(LexiconJoin {
        resources: resources.iter().map(|r| r.name.clone()).collect(),
        rows,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorrelationMethod {
    Spearman,
    Pearson,
}

/// Symmetric correlation matrix over the joined resources, unit diagonal.
#[derive(Debug, Clone, Serialize)]
pub struct CorrelationMatrix<S: Scalar> {
    pub resources: Vec<String>,
    pub method: CorrelationMethod,
    pub values: Vec<Vec<S>>,
    pub n_terms: usize,
}

impl<S: Scalar> CorrelationMatrix<S> {
    pub fn get(&self, i: usize, j: usize) -> S {
        self.values[i][j]
    }
}

/// Pairwise correlations between every pair of joined resources. A constant
/// column is reported as an error naming the offending resource.
pub fn correlation_matrix<S: Scalar>(
    join: &LexiconJoin<S>,
    method: CorrelationMethod,
) -> Result<CorrelationMatrix<S>> {
    if join.len() < 2 {
        return Err(Error::TooFewTerms { n: join.len() });
    }
    let k = join.resources.len();
    let columns: Vec<Vec<S>> = (0..k).map(|i| join.column(i)).collect();
    for (name, col) in join.resources.iter().zip(&columns) {
        if col.iter().all(|&v| v == col[0]) {
            return Err(Error::DegenerateResource { name: name.clone() });
        }
    }
    let mut values = vec![vec![S::one(); k]; k];
    for i in 0..k {
        for j in (i + 1)..k {
            let series = PairedSeries::new(columns[i].clone(), columns[j].clone())?;
            let r = match method {
                CorrelationMethod::Spearman => spearman(&series)?,
                CorrelationMethod::Pearson => pearson(&series)?,
            };
            values[i][j] = r;
            values[j][i] = r;
        }
    }
    Ok(CorrelationMatrix {
        resources: join.resources.clone(),
        method,
        values,
        n_terms: join.len(),
    })
}

/// Anxiety band of a term in the affect-space view.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AnxietyBand {
    Anxiety,
    Calm,
    Neutral,
}

/// Quadrant of a two-dimensional affect plane. "High" includes the midpoint:
/// a value exactly at the midpoint goes to the upper half.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Quadrant {
    LowLow,
    LowHigh,
    HighLow,
    HighHigh,
}

impl Quadrant {
    fn from_values<S: Scalar>(x: S, x_mid: S, y: S, y_mid: S) -> Self {
        match (x >= x_mid, y >= y_mid) {
            (false, false) => Quadrant::LowLow,
            (false, true) => Quadrant::LowHigh,
            (true, false) => Quadrant::HighLow,
            (true, true) => Quadrant::HighHigh,
        }
    }

    /// Label with dimension letters filled in, e.g. `low_v_high_a`.
    pub fn label(self, x_dim: &str, y_dim: &str) -> String {
        let (x, y) = match self {
            Quadrant::LowLow => ("low", "low"),
            Quadrant::LowHigh => ("low", "high"),
            Quadrant::HighLow => ("high", "low"),
            Quadrant::HighHigh => ("high", "high"),
        };
        format!("{x}_{x_dim}_{y}_{y_dim}")
    }
}

/// Which join columns hold the four affect dimensions.
#[derive(Debug, Clone)]
pub struct AffectDims {
    pub anxiety: String,
    pub valence: String,
    pub arousal: String,
    pub dominance: String,
}

/// Cutoffs and midpoints for the affect-space view. Anxiety bands follow the
/// score cutoffs (anxiety above, calm below); midpoints split each V/A/D
/// scale into its low and high halves.
#[derive(Debug, Clone, Serialize)]
pub struct AffectSpaceConfig<S: Scalar> {
    pub anxiety_cutoff_high: S,
    pub anxiety_cutoff_low: S,
    pub valence_midpoint: S,
    pub arousal_midpoint: S,
    pub dominance_midpoint: S,
}

impl<S: Scalar> Default for AffectSpaceConfig<S> {
    fn default() -> Self {
        Self {
            anxiety_cutoff_high: S::from_f64_lossy(0.5),
            anxiety_cutoff_low: S::from_f64_lossy(-0.5),
            valence_midpoint: S::zero(),
            arousal_midpoint: S::zero(),
            dominance_midpoint: S::zero(),
        }
    }
}

/// One term placed in the V-A and V-D planes.
#[derive(Debug, Clone, Serialize)]
pub struct AffectPoint<S: Scalar> {
    pub term: String,
    pub anxiety: S,
    pub valence: S,
    pub arousal: S,
    pub dominance: S,
    pub band: AnxietyBand,
    pub quadrant_va: Quadrant,
    pub quadrant_vd: Quadrant,
}

/// Count of one (quadrant, band) cell.
#[derive(Debug, Clone, Serialize)]
pub struct QuadrantCount {
    pub quadrant: Quadrant,
    pub band: AnxietyBand,
    pub count: usize,
}

/// The affect-space view: the full point list plus per-quadrant band counts
/// for both planes.
#[derive(Debug, Clone, Serialize)]
pub struct AffectSpace<S: Scalar> {
    pub points: Vec<AffectPoint<S>>,
    pub counts_va: Vec<QuadrantCount>,
    pub counts_vd: Vec<QuadrantCount>,
}

impl<S: Scalar> AffectSpace<S> {
    pub fn count_va(&self, quadrant: Quadrant, band: AnxietyBand) -> usize {
        self.counts_va
            .iter()
            .find(|c| c.quadrant == quadrant && c.band == band)
            .map(|c| c.count)
            .unwrap_or(0)
    }
}

/// Tags every joined term with its anxiety band and its quadrant in the V-A
/// and V-D planes.
pub fn affect_space_points<S: Scalar>(
    join: &LexiconJoin<S>,
    dims: &AffectDims,
    cfg: &AffectSpaceConfig<S>,
) -> Result<AffectSpace<S>> {
    let anx = join.resource_index(&dims.anxiety)?;
    let val = join.resource_index(&dims.valence)?;
    let aro = join.resource_index(&dims.arousal)?;
    let dom = join.resource_index(&dims.dominance)?;

    let mut points = Vec::with_capacity(join.len());
    let mut counts_va: BTreeMap<(Quadrant, AnxietyBand), usize> = BTreeMap::new();
    let mut counts_vd: BTreeMap<(Quadrant, AnxietyBand), usize> = BTreeMap::new();
    for row in &join.rows {
        let anxiety = row.values[anx];
        let valence = row.values[val];
        let arousal = row.values[aro];
        let dominance = row.values[dom];
        let band = if anxiety > cfg.anxiety_cutoff_high {
            AnxietyBand::Anxiety
        } else if anxiety < cfg.anxiety_cutoff_low {
            AnxietyBand::Calm
        } else {
            AnxietyBand::Neutral
        };
        let quadrant_va =
            Quadrant::from_values(valence, cfg.valence_midpoint, arousal, cfg.arousal_midpoint);
        let quadrant_vd = Quadrant::from_values(
            valence,
            cfg.valence_midpoint,
            dominance,
            cfg.dominance_midpoint,
        );
        *counts_va.entry((quadrant_va, band)).or_default() += 1;
        *counts_vd.entry((quadrant_vd, band)).or_default() += 1;
        points.push(AffectPoint {
            term: row.term.clone(),
            anxiety,
            valence,
            arousal,
            dominance,
            band,
            quadrant_va,
            quadrant_vd,
        });
    }
    let flatten = |m: BTreeMap<(Quadrant, AnxietyBand), usize>| {
        m.into_iter()
            .map(|((quadrant, band), count)| QuadrantCount {
                quadrant,
                band,
                count,
            })
            .collect()
    };
    Ok(AffectSpace {
        points,
        counts_va: flatten(counts_va),
        counts_vd: flatten(counts_vd),
    })
}

/// A term's age of acquisition in years.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AoaRecord {
    pub term: String,
    pub aoa_years: f64,
}

impl AoaRecord {
    pub fn new(term: &str, aoa_years: f64) -> Result<Self> {
        if !aoa_years.is_finite() || aoa_years <= 0.0 {
            return Err(Error::NonPositiveAoa { value: aoa_years });
        }
        let term = normalize_term(term);
        if term.is_empty() {
            return Err(Error::EmptyTerm);
        }
        Ok(Self { term, aoa_years })
    }

    /// Nearest integer year; half-year ties round up.
    pub fn year(&self) -> u32 {
        (self.aoa_years + 0.5).floor() as u32
    }
}

/// Reads `term,aoa_years` rows (header required).
pub fn read_aoa_csv(reader: impl Read) -> Result<Vec<AoaRecord>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let mut out = Vec::new();
    for (idx, row) in rdr.records().enumerate() {
        let line = idx + 2;
        let row = row?;
        if row.len() != 2 {
            return Err(Error::Parse {
                line,
                msg: format!("expected 2 fields, got {}", row.len()),
            });
        }
        let aoa: f64 = row[1].trim().parse().map_err(|_| Error::Parse {
            line,
            msg: format!("age '{}' is not a number", &row[1]),
        })?;
        out.push(AoaRecord::new(&row[0], aoa)?);
    }
    Ok(out)
}

/// Joined (class, year) counts for one acquisition year.
#[derive(Debug, Clone, Serialize)]
pub struct AoaYearRow<S: Scalar> {
    pub age: u32,
    /// Percentage of all joined terms, per class in calm-to-anxious order.
    pub class_percentages: Vec<S>,
    pub n_terms: usize,
}

/// Percent of joined terms acquired at each age, subdivided by the seven
/// classes. Percentages are of the whole join, so the grand total is 100.
#[derive(Debug, Clone, Serialize)]
pub struct AoaDistribution<S: Scalar> {
    pub n_joined: usize,
    pub rows: Vec<AoaYearRow<S>>,
}

fn join_on_aoa<S: Scalar>(
    lexicon: &Lexicon<S>,
    aoa: &[AoaRecord],
) -> Result<BTreeMap<u32, [usize; 7]>> {
    let mut by_year: BTreeMap<u32, [usize; 7]> = BTreeMap::new();
    let mut joined = 0usize;
    for record in aoa {
        if let Some(entry) = lexicon.get_normalized(&record.term) {
            let counts = by_year.entry(record.year()).or_insert([0; 7]);
            counts[(entry.class().index() + 3) as usize] += 1;
            joined += 1;
        }
    }
    if joined == 0 {
        return Err(Error::EmptyJoin);
    }
    Ok(by_year)
}

/// Percent of all joined terms acquired each year, by class.
pub fn aoa_distribution<S: Scalar>(
    lexicon: &Lexicon<S>,
    aoa: &[AoaRecord],
) -> Result<AoaDistribution<S>> {
    let by_year = join_on_aoa(lexicon, aoa)?;
    let n_joined: usize = by_year.values().map(|c| c.iter().sum::<usize>()).sum();
    let total = S::from_usize_lossy(n_joined);
    let hundred = S::from_f64_lossy(100.0);
    let rows = by_year
        .into_iter()
        .map(|(age, counts)| AoaYearRow {
            age,
            class_percentages: counts
                .iter()
                .map(|&c| S::from_usize_lossy(c) * hundred / total)
                .collect(),
            n_terms: counts.iter().sum(),
        })
        .collect();
    Ok(AoaDistribution { n_joined, rows })
}

/// Shares of one acquisition year over the six non-neutral classes.
#[derive(Debug, Clone, Serialize)]
pub struct AoaShareRow<S: Scalar> {
    pub age: u32,
    /// Percentages in calm-to-anxious order with the neutral class skipped:
    /// high/moderate/slight calmness, then slight/moderate/high anxiety.
    /// Each row sums to 100.
    pub class_shares: Vec<S>,
    pub n_terms: usize,
}

/// Per-year class shares after disregarding neutral terms. Years that have
/// no non-neutral term emit no row.
pub fn aoa_class_shares<S: Scalar>(
    lexicon: &Lexicon<S>,
    aoa: &[AoaRecord],
) -> Result<Vec<AoaShareRow<S>>> {
    let by_year = join_on_aoa(lexicon, aoa)?;
    let hundred = S::from_f64_lossy(100.0);
    Ok(by_year
        .into_iter()
        .filter_map(|(age, counts)| {
            // calm-to-anxious order, skipping the neutral slot (index 3)
            let non_neutral: Vec<usize> = [0usize, 1, 2, 4, 5, 6]
                .iter()
                .map(|&i| counts[i])
                .collect();
            let total: usize = non_neutral.iter().sum();
            if total == 0 {
                return None;
            }
            let denom = S::from_usize_lossy(total);
            Some(AoaShareRow {
                age,
                class_shares: non_neutral
                    .iter()
                    .map(|&c| S::from_usize_lossy(c) * hundred / denom)
                    .collect(),
                n_terms: total,
            })
        })
        .collect())
}

/// The six non-neutral classes in the order used by [`AoaShareRow`].
pub fn non_neutral_classes() -> [OrdinalClass; 6] {
    [
        OrdinalClass::HighCalmness,
        OrdinalClass::ModerateCalmness,
        OrdinalClass::SlightCalmness,
        OrdinalClass::SlightAnxiety,
        OrdinalClass::ModerateAnxiety,
        OrdinalClass::HighAnxiety,
    ]
}
