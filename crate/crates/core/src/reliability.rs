//! Split-half reliability suite.
//!
//! All annotations for a term are randomly split into two halves, each half
//! is aggregated by mean exactly as the annotation pipeline does, and the two
//! per-term score vectors are compared: by correlation (SHR), by class match
//! under a scheme (SHCMP), and by score closeness under a threshold
//! (SHCloseP). Trials are repeated with derived per-trial seeds, so a fixed
//! master seed produces bit-identical reports regardless of parallelism.

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::annotation::ResponseRecord;
use crate::error::{Error, Result};
use crate::lexicon::{AnxietyScore, ClassScheme, SCORE_MAX, SCORE_MIN};
use crate::scalar::{compensated_sum, Scalar};
use crate::seed::unit_rng;
use crate::stats::{pearson, spearman, PairedSeries};

/// All ratings of one term.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TermRatings {
    pub term: String,
    pub ratings: Vec<i8>,
}

/// Responses grouped by term and screened for eligibility: split-half needs
/// at least two ratings per term. Ineligible terms are reported once, not
/// per trial.
#[derive(Debug, Clone)]
pub struct GroupedResponses {
    eligible: Vec<TermRatings>,
    excluded: Vec<String>,
}

impl GroupedResponses {
    pub fn from_records(records: &[ResponseRecord]) -> Self {
        let mut by_term: std::collections::BTreeMap<&str, Vec<i8>> = Default::default();
        for r in records {
            by_term.entry(&r.term).or_default().push(r.rating);
        }
        let mut eligible = Vec::new();
        let mut excluded = Vec::new();
        for (term, ratings) in by_term {
            if ratings.len() >= 2 {
                eligible.push(TermRatings {
                    term: term.to_string(),
                    ratings,
                });
            } else {
                excluded.push(term.to_string());
            }
        }
        Self { eligible, excluded }
    }

    pub fn eligible(&self) -> &[TermRatings] {
        &self.eligible
    }

    /// Terms dropped for having fewer than two responses.
    pub fn excluded_terms(&self) -> &[String] {
        &self.excluded
    }

    fn require_eligible(&self) -> Result<()> {
        if self.eligible.is_empty() {
            return Err(Error::NoEligibleTerms);
        }
        if self.eligible.len() < 2 {
            return Err(Error::TooFewTerms {
                n: self.eligible.len(),
            });
        }
        Ok(())
    }
}

/// One random half-split: per-term rating halves, aligned with
/// `GroupedResponses::eligible` by index. Half A holds ceil(n/2) ratings,
/// half B the rest.
pub fn split_half(
    grouped: &GroupedResponses,
    rng: &mut impl Rng,
) -> Result<(Vec<TermRatings>, Vec<TermRatings>)> {
    if grouped.eligible.is_empty() {
        return Err(Error::NoEligibleTerms);
    }
    let mut half_a = Vec::with_capacity(grouped.eligible.len());
    let mut half_b = Vec::with_capacity(grouped.eligible.len());
    for term in &grouped.eligible {
        let mut shuffled = term.ratings.clone();
        shuffled.shuffle(rng);
        let cut = shuffled.len().div_ceil(2);
        half_b.push(TermRatings {
            term: term.term.clone(),
            ratings: shuffled.split_off(cut),
        });
        half_a.push(TermRatings {
            term: term.term.clone(),
            ratings: shuffled,
        });
    }
    Ok((half_a, half_b))
}

/// One split trial: the two per-term half means plus their correlations.
#[derive(Debug, Clone, Serialize)]
pub struct SplitTrialResult<S: Scalar> {
    pub trial: usize,
    pub correlation_spearman: S,
    pub correlation_pearson: S,
    /// (half A score, half B score) per eligible term, in term order.
    pub pairs: Vec<(S, S)>,
}

fn mean_rating<S: Scalar>(ratings: &[i8]) -> S {
    let sum: i64 = ratings.iter().map(|&r| r as i64).sum();
    S::from_f64_lossy(sum as f64 / ratings.len() as f64)
}

/// Per-term half-mean pairs for one trial. This is the shared primitive
/// beneath SHR, SHCMP, and SHCloseP: all of them consume the RNG identically,
/// so for a fixed (master seed, trial) every measure sees the same split.
pub fn split_pairs<S: Scalar>(
    grouped: &GroupedResponses,
    rng: &mut impl Rng,
) -> Result<Vec<(S, S)>> {
    let (half_a, half_b) = split_half(grouped, rng)?;
    Ok(half_a
        .iter()
        .zip(&half_b)
        .map(|(a, b)| (mean_rating(&a.ratings), mean_rating(&b.ratings)))
        .collect())
}

/// Runs one full split trial with correlations.
pub fn split_trial<S: Scalar>(
    grouped: &GroupedResponses,
    trial: usize,
    master_seed: u64,
) -> Result<SplitTrialResult<S>> {
    let mut rng = unit_rng(master_seed, trial as u64);
    let pairs = split_pairs::<S>(grouped, &mut rng)?;
    let series = PairedSeries::new(
        pairs.iter().map(|p| p.0).collect(),
        pairs.iter().map(|p| p.1).collect(),
    )?;
    Ok(SplitTrialResult {
        trial,
        correlation_spearman: spearman(&series)?,
        correlation_pearson: pearson(&series)?,
        pairs,
    })
}

const PARALLEL_TRIAL_CUTOFF: usize = 32;

fn run_trials<T, F>(n_trials: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync,
{
    if n_trials >= PARALLEL_TRIAL_CUTOFF {
        (0..n_trials).into_par_iter().map(&f).collect()
    } else {
        (0..n_trials).map(f).collect()
    }
}

/// Mean split-half correlations over `n_trials` random splits.
pub fn shr<S: Scalar>(
    grouped: &GroupedResponses,
    n_trials: usize,
    master_seed: u64,
) -> Result<(S, S)> {
    grouped.require_eligible()?;
    let trials: Vec<(S, S)> = run_trials(n_trials, |t| {
        let r = split_trial::<S>(grouped, t, master_seed)?;
        Ok((r.correlation_spearman, r.correlation_pearson))
    })?;
    let n = S::from_usize_lossy(n_trials);
    Ok((
        compensated_sum(trials.iter().map(|t| t.0)) / n,
        compensated_sum(trials.iter().map(|t| t.1)) / n,
    ))
}

/// Percentage of (term, trial) pairs whose two half scores fall in the same
/// bin of the scheme.
pub fn shcmp<S: Scalar>(
    grouped: &GroupedResponses,
    scheme: &ClassScheme<S>,
    n_trials: usize,
    master_seed: u64,
) -> Result<S> {
    grouped.require_eligible()?;
    let matches: Vec<u64> = run_trials(n_trials, |t| {
        let mut rng = unit_rng(master_seed, t as u64);
        let pairs = split_pairs::<S>(grouped, &mut rng)?;
        Ok(count_bin_matches(&pairs, scheme))
    })?;
    let total: u64 = matches.iter().sum();
    Ok(percentage::<S>(
        total,
        grouped.eligible.len() as u64 * n_trials as u64,
    ))
}

/// Percentage of (term, trial) pairs whose two half scores differ by less
/// than the threshold.
pub fn shclosep<S: Scalar>(
    grouped: &GroupedResponses,
    threshold: S,
    n_trials: usize,
    master_seed: u64,
) -> Result<S> {
    grouped.require_eligible()?;
    if threshold <= S::zero() {
        return Err(Error::NonPositiveThreshold {
            value: threshold.to_f64().unwrap_or(f64::NAN),
        });
    }
    let close: Vec<u64> = run_trials(n_trials, |t| {
        let mut rng = unit_rng(master_seed, t as u64);
        let pairs = split_pairs::<S>(grouped, &mut rng)?;
        Ok(count_close(&pairs, threshold))
    })?;
    let total: u64 = close.iter().sum();
    Ok(percentage::<S>(
        total,
        grouped.eligible.len() as u64 * n_trials as u64,
    ))
}

fn count_bin_matches<S: Scalar>(pairs: &[(S, S)], scheme: &ClassScheme<S>) -> u64 {
    pairs
        .iter()
        .filter(|(a, b)| {
            // Half means of integer ratings always stay inside [-3, 3].
            let a = AnxietyScore::new(*a).expect("half mean in range");
            let b = AnxietyScore::new(*b).expect("half mean in range");
            scheme.bin_for(a) == scheme.bin_for(b)
        })
        .count() as u64
}

fn count_close<S: Scalar>(pairs: &[(S, S)], threshold: S) -> u64 {
    pairs
        .iter()
        .filter(|(a, b)| (*a - *b).abs() < threshold)
        .count() as u64
}

fn percentage<S: Scalar>(part: u64, whole: u64) -> S {
    S::from_f64_lossy(part as f64 * 100.0 / whole as f64)
}

/// Expected SHCMP when scores are assigned uniformly at random: 100 / n_bins.
pub fn random_baseline_shcmp<S: Scalar>(scheme: &ClassScheme<S>) -> S {
    S::from_f64_lossy(100.0 / scheme.n_bins() as f64)
}

/// Monte-Carlo estimate of the random SHCMP baseline: per (term, trial)
/// pair, two independent scores drawn uniformly on [-3, 3].
pub fn mc_random_baseline_shcmp<S: Scalar>(
    scheme: &ClassScheme<S>,
    n_trials: usize,
    n_terms: usize,
    master_seed: u64,
) -> S {
    let matches: Vec<u64> = (0..n_trials)
        .map(|t| {
            let mut rng = unit_rng(master_seed, t as u64);
            (0..n_terms)
                .filter(|_| {
                    let a = AnxietyScore::new(S::from_f64_lossy(
                        rng.random_range(SCORE_MIN..=SCORE_MAX),
                    ))
                    .expect("uniform draw in range");
                    let b = AnxietyScore::new(S::from_f64_lossy(
                        rng.random_range(SCORE_MIN..=SCORE_MAX),
                    ))
                    .expect("uniform draw in range");
                    scheme.bin_for(a) == scheme.bin_for(b)
                })
                .count() as u64
        })
        .collect();
    percentage::<S>(
        matches.iter().sum(),
        n_trials as u64 * n_terms as u64,
    )
}

/// One row of the per-scheme reliability table.
#[derive(Debug, Clone, Serialize)]
pub struct SchemeRow<S: Scalar> {
    pub n_bins: usize,
    pub bin_width: S,
    pub random_shcmp: S,
    pub shcmp: S,
    /// SHCloseP with the row's bin width as the threshold.
    pub shclosep: S,
}

/// SHCloseP at a caller-chosen threshold.
#[derive(Debug, Clone, Serialize)]
pub struct ThresholdRow<S: Scalar> {
    pub threshold: S,
    pub shclosep: S,
}

/// The full reliability report: SHR plus one scheme row per requested bin
/// count and optional custom closeness thresholds.
#[derive(Debug, Clone, Serialize)]
pub struct ReliabilityReport<S: Scalar> {
    pub n_trials: usize,
    pub master_seed: u64,
    pub n_terms: usize,
    pub n_terms_excluded: usize,
    pub shr_spearman: S,
    pub shr_pearson: S,
    pub scheme_rows: Vec<SchemeRow<S>>,
    pub custom_thresholds: Vec<ThresholdRow<S>>,
}

/// Computes SHR, SHCMP, and SHCloseP in one pass over the trials. Results
/// are identical to calling the individual measures with the same master
/// seed, because every measure consumes the per-trial RNG the same way.
pub fn reliability_report<S: Scalar>(
    grouped: &GroupedResponses,
    scheme_bins: &[usize],
    custom_thresholds: &[S],
    n_trials: usize,
    master_seed: u64,
) -> Result<ReliabilityReport<S>> {
    grouped.require_eligible()?;
    for &t in custom_thresholds {
        if t <= S::zero() {
            return Err(Error::NonPositiveThreshold {
                value: t.to_f64().unwrap_or(f64::NAN),
            });
        }
    }
    let schemes: Vec<ClassScheme<S>> = scheme_bins
        .iter()
        .map(|&n| ClassScheme::equal_width(n))
        .collect::<Result<_>>()?;

    struct TrialTally<S> {
        spearman: S,
        pearson: S,
        bin_matches: Vec<u64>,
        width_close: Vec<u64>,
        custom_close: Vec<u64>,
    }

    let tallies: Vec<TrialTally<S>> = run_trials(n_trials, |t| {
        let result = split_trial::<S>(grouped, t, master_seed)?;
        Ok(TrialTally {
            spearman: result.correlation_spearman,
            pearson: result.correlation_pearson,
            bin_matches: schemes
                .iter()
                .map(|s| count_bin_matches(&result.pairs, s))
                .collect(),
            width_close: schemes
                .iter()
                .map(|s| count_close(&result.pairs, s.bin_width()))
                .collect(),
            custom_close: custom_thresholds
                .iter()
                .map(|&th| count_close(&result.pairs, th))
                .collect(),
        })
    })?;

    let n = S::from_usize_lossy(n_trials);
    let denom = grouped.eligible.len() as u64 * n_trials as u64;
    let sum_counts =
        |pick: &dyn Fn(&TrialTally<S>) -> u64| tallies.iter().map(pick).sum::<u64>();

    let scheme_rows = schemes
        .iter()
        .enumerate()
        .map(|(i, scheme)| SchemeRow {
            n_bins: scheme.n_bins(),
            bin_width: scheme.bin_width(),
            random_shcmp: random_baseline_shcmp(scheme),
            shcmp: percentage::<S>(sum_counts(&|t| t.bin_matches[i]), denom),
            shclosep: percentage::<S>(sum_counts(&|t| t.width_close[i]), denom),
        })
        .collect();
    let custom = custom_thresholds
        .iter()
        .enumerate()
        .map(|(i, &threshold)| ThresholdRow {
            threshold,
            shclosep: percentage::<S>(sum_counts(&|t| t.custom_close[i]), denom),
        })
        .collect();

    Ok(ReliabilityReport {
        n_trials,
        master_seed,
        n_terms: grouped.eligible.len(),
        n_terms_excluded: grouped.excluded.len(),
        shr_spearman: compensated_sum(tallies.iter().map(|t| t.spearman)) / n,
        shr_pearson: compensated_sum(tallies.iter().map(|t| t.pearson)) / n,
        scheme_rows,
        custom_thresholds: custom,
    })
}
