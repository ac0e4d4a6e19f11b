//! Statistical kernel: fractional ranks with midrank tie handling, Spearman
//! and Pearson correlation, and RMSE.
//!
//! These three measures are the only statistics the rest of the engine
//! reports, so they are kept self-contained and deliberately boring:
//! two-pass moments with compensated summation, no approximations.

use crate::error::{Error, Result};
use crate::scalar::{compensated_sum, Scalar};

/// Two equal-length sequences of finite values, the input to every paired
/// statistic.
#[derive(Debug, Clone)]
pub struct PairedSeries<S: Scalar> {
    xs: Vec<S>,
    ys: Vec<S>,
}

impl<S: Scalar> PairedSeries<S> {
    /// Validates equal, non-empty lengths and finiteness.
    ///
    /// Correlations additionally require length >= 2; RMSE accepts a single
    /// pair.
    pub fn new(xs: Vec<S>, ys: Vec<S>) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::LengthMismatch {
                left: xs.len(),
                right: ys.len(),
            });
        }
        if xs.is_empty() {
            return Err(Error::SeriesTooShort { len: 0, min: 1 });
        }
        for (i, v) in xs.iter().chain(ys.iter()).enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite { index: i % xs.len() });
            }
        }
        Ok(Self { xs, ys })
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn xs(&self) -> &[S] {
        &self.xs
    }

    pub fn ys(&self) -> &[S] {
        &self.ys
    }

    fn require_len(&self, min: usize) -> Result<()> {
        if self.len() < min {
            return Err(Error::SeriesTooShort {
                len: self.len(),
                min,
            });
        }
        Ok(())
    }
}

/// Fractional (average) ranks, 1-based. Tied values share the mean of the
/// positions they occupy, so ranks always sum to n(n+1)/2.
pub fn ranks<S: Scalar>(values: &[S]) -> Result<Vec<S>> {
    if values.is_empty() {
        return Err(Error::EmptyInput {
            what: "rank input".into(),
        });
    }
    for (i, v) in values.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::NonFinite { index: i });
        }
    }
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| {
        values[a]
            .partial_cmp(&values[b])
            .expect("finiteness checked above")
    });

    let mut out = vec![S::zero(); values.len()];
    let two = S::from_f64_lossy(2.0);
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // positions start+1 ..= end (1-based); their mean is the shared rank
        let rank = (S::from_usize_lossy(start + 1) + S::from_usize_lossy(end)) / two;
        for &idx in &order[start..end] {
            out[idx] = rank;
        }
        start = end;
    }
    Ok(out)
}

/// Pearson product-moment correlation, clamped into [-1, 1].
pub fn pearson<S: Scalar>(series: &PairedSeries<S>) -> Result<S> {
    series.require_len(2)?;
    pearson_unchecked(series.xs(), series.ys())
}

/// Spearman rank correlation: Pearson over midranks, so the identity with
/// tie correction holds exactly.
pub fn spearman<S: Scalar>(series: &PairedSeries<S>) -> Result<S> {
    series.require_len(2)?;
    let rx = ranks(series.xs())?;
    let ry = ranks(series.ys())?;
    pearson_unchecked(&rx, &ry)
}

/// Root mean square error over the pairs. Zero iff the series are identical.
pub fn rmse<S: Scalar>(series: &PairedSeries<S>) -> Result<S> {
    series.require_len(1)?;
    let n = S::from_usize_lossy(series.len());
    let sq = compensated_sum(
        series
            .xs()
            .iter()
            .zip(series.ys())
            .map(|(&x, &y)| (x - y) * (x - y)),
    );
    Ok((sq / n).sqrt())
}

fn pearson_unchecked<S: Scalar>(xs: &[S], ys: &[S]) -> Result<S> {
    // Exact all-equal detection: degenerate variance is an error, not a NaN,
    // because correlations get averaged downstream.
    if xs.iter().all(|&v| v == xs[0]) {
        return Err(Error::DegenerateVariance { which: "x".into() });
    }
    if ys.iter().all(|&v| v == ys[0]) {
        return Err(Error::DegenerateVariance { which: "y".into() });
    }
    let n = S::from_usize_lossy(xs.len());
    let mean_x = compensated_sum(xs.iter().copied()) / n;
    let mean_y = compensated_sum(ys.iter().copied()) / n;
    let cov = compensated_sum(
        xs.iter()
            .zip(ys)
            .map(|(&x, &y)| (x - mean_x) * (y - mean_y)),
    );
    let var_x = compensated_sum(xs.iter().map(|&x| (x - mean_x) * (x - mean_x)));
    let var_y = compensated_sum(ys.iter().map(|&y| (y - mean_y) * (y - mean_y)));
    let r = cov / (var_x * var_y).sqrt();
    Ok(r.min(S::one()).max(-S::one()))
}
