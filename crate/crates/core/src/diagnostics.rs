//! Score-vs-size diagnostics: correlation and regression of d' against N
//! (signed and absolute), the critiqued division renormalization (kept only
//! as a demonstration), the largest-subset slope check, IQR outlier labeling,
//! the chi-square sample-size demonstration and the unique-size threshold
//! sweep.

use std::collections::BTreeSet;

use crate::accum::CompensatedSum;
use crate::engine::{fit_model, rank, Dataset, FitMode, ScoreRecord};
use crate::histogram::Histogram;
use crate::special::reg_gamma_upper;
use crate::{Error, Result};

/// Least-squares line with the Pearson correlation of its inputs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegressionLine {
    pub slope: f64,
    pub intercept: f64,
    /// Pearson r of (xs, ys); 0 when ys has no variance.
    pub r: f64,
    pub n: usize,
}

impl RegressionLine {
    pub fn predict(&self, x: f64) -> f64 {
        self.slope * x + self.intercept
    }
}

fn centered_moments(xs: &[f64], ys: &[f64]) -> Result<(f64, f64, f64, f64, f64)> {
    if xs.len() != ys.len() {
        return Err(Error::DegenerateInput("input lengths differ"));
    }
    if xs.len() < 2 {
        return Err(Error::TooFewValues {
            needed: 2,
            got: xs.len(),
        });
    }
    let n = xs.len() as f64;
    let mean_x = crate::accum::compensated_sum(xs.iter().copied()) / n;
    let mean_y = crate::accum::compensated_sum(ys.iter().copied()) / n;
    let (mut sxx, mut syy, mut sxy) = (
        CompensatedSum::default(),
        CompensatedSum::default(),
        CompensatedSum::default(),
    );
    for (&x, &y) in xs.iter().zip(ys) {
        let dx = x - mean_x;
        let dy = y - mean_y;
        sxx.add(dx * dx);
        syy.add(dy * dy);
        sxy.add(dx * dy);
    }
    Ok((mean_x, mean_y, sxx.value(), syy.value(), sxy.value()))
}

/// Product-moment correlation coefficient. Errors on mismatched lengths,
/// fewer than two points, or zero variance in either input.
pub fn pearson_correlation(xs: &[f64], ys: &[f64]) -> Result<f64> {
    let (_, _, sxx, syy, sxy) = centered_moments(xs, ys)?;
    if sxx <= 0.0 || syy <= 0.0 {
        return Err(Error::DegenerateInput(
            "zero variance input to correlation",
        ));
    }
    Ok(sxy / (sxx * syy).sqrt())
}

/// Ordinary least-squares line of ys on xs. Requires at least two distinct
/// x values.
pub fn fit_line(xs: &[f64], ys: &[f64]) -> Result<RegressionLine> {
    let (mean_x, mean_y, sxx, syy, sxy) = centered_moments(xs, ys)?;
    if sxx <= 0.0 {
        return Err(Error::DegenerateInput("all x values equal in line fit"));
    }
    let slope = sxy / sxx;
    let r = if syy > 0.0 { sxy / (sxx * syy).sqrt() } else { 0.0 };
    Ok(RegressionLine {
        slope,
        intercept: mean_y - slope * mean_x,
        r,
        n: xs.len(),
    })
}

/// Which score convention a bias report was computed under.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScoreConvention {
    Signed,
    Absolute,
}

impl ScoreConvention {
    pub fn as_str(&self) -> &'static str {
        match self {
            ScoreConvention::Signed => "signed",
            ScoreConvention::Absolute => "absolute",
        }
    }
}

impl std::fmt::Display for ScoreConvention {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Regression and correlation of scores against sample size.
#[derive(Debug, Clone, PartialEq)]
pub struct BiasReport {
    pub convention: ScoreConvention,
    pub line: RegressionLine,
    pub correlation: f64,
}

/// Regress d' (signed when `use_signed`, |d'| otherwise) on N.
pub fn bias_report(scores: &[ScoreRecord], use_signed: bool) -> Result<BiasReport> {
    let xs: Vec<f64> = scores.iter().map(|s| s.n as f64).collect();
    let ys: Vec<f64> = scores
        .iter()
        .map(|s| if use_signed { s.d_signed } else { s.d_abs })
        .collect();
    let correlation = pearson_correlation(&xs, &ys)?;
    let line = fit_line(&xs, &ys)?;
    Ok(BiasReport {
        convention: if use_signed {
            ScoreConvention::Signed
        } else {
            ScoreConvention::Absolute
        },
        line,
        correlation,
    })
}

/// Scores divided by a fitted line of |d'| on N. This reproduces the
/// critiqued "renormalization" for demonstration; it is not an endorsed
/// transformation and the output carries that note.
#[derive(Debug, Clone)]
pub struct RenormalizedScores {
    pub scores: Vec<ScoreRecord>,
    pub note: &'static str,
}

pub const RENORMALIZE_NOTE: &str =
    "demonstration of the critiqued division renormalization; not an endorsed procedure";

/// Divide each score by `line.predict(N)`, re-rank, and tag the output as
/// demonstrative. Errors (naming the histogram) when the denominator is not
/// strictly positive at some N.
pub fn renormalize_demo(
    scores: &[ScoreRecord],
    line: &RegressionLine,
) -> Result<RenormalizedScores> {
    let mut out = Vec::with_capacity(scores.len());
    for s in scores {
        let denom = line.predict(s.n as f64);
        if !(denom > 0.0) {
            return Err(Error::NonPositiveDenominator {
                label: s.label.clone(),
                n: s.n,
                denominator: denom,
            });
        }
        let d_signed = s.d_signed / denom;
        out.push(ScoreRecord {
            d_signed,
            d_abs: d_signed.abs(),
            rank: 0,
            ..s.clone()
        });
    }
    out.sort_by(|x, y| {
        y.d_abs
            .total_cmp(&x.d_abs)
            .then_with(|| y.n.cmp(&x.n))
            .then_with(|| x.label.cmp(&y.label))
    });
    for (i, r) in out.iter_mut().enumerate() {
        r.rank = i + 1;
    }
    Ok(RenormalizedScores {
        scores: out,
        note: RENORMALIZE_NOTE,
    })
}

/// Line of |d'| on N restricted to the `k` largest-N scores.
pub fn largest_subset_slope(scores: &[ScoreRecord], k: usize) -> Result<RegressionLine> {
    if k < 2 {
        return Err(Error::InvalidParameter("k must be at least 2".into()));
    }
    if k > scores.len() {
        return Err(Error::TooFewValues {
            needed: k,
            got: scores.len(),
        });
    }
    let mut by_size: Vec<&ScoreRecord> = scores.iter().collect();
    by_size.sort_by(|x, y| y.n.cmp(&x.n).then_with(|| x.label.cmp(&y.label)));
    let xs: Vec<f64> = by_size[..k].iter().map(|s| s.n as f64).collect();
    let ys: Vec<f64> = by_size[..k].iter().map(|s| s.d_abs).collect();
    fit_line(&xs, &ys)
}

/// Upper-fence IQR outlier verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct IqrVerdict {
    pub q1: f64,
    pub q3: f64,
    pub iqr: f64,
    pub upper_fence: f64,
    pub outlier_labels: BTreeSet<String>,
}

// Quantile by linear interpolation of order statistics: the p-quantile sits
// at fractional position p*(n-1) in the sorted sample.
fn quantile(sorted: &[f64], p: f64) -> f64 {
    let pos = p * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let frac = pos - lo as f64;
    if frac == 0.0 {
        sorted[lo]
    } else {
        sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
    }
}

/// Label every value strictly above `q3 + k*iqr`. The lower fence is not
/// checked: the method flags high-DTV candidates only.
pub fn iqr_outliers(values: &[(String, f64)], k: f64) -> Result<IqrVerdict> {
    if values.len() < 4 {
        return Err(Error::TooFewValues {
            needed: 4,
            got: values.len(),
        });
    }
    let mut sorted: Vec<f64> = values.iter().map(|(_, v)| *v).collect();
    sorted.sort_by(f64::total_cmp);
    let q1 = quantile(&sorted, 0.25);
    let q3 = quantile(&sorted, 0.75);
    let iqr = q3 - q1;
    let upper_fence = q3 + k * iqr;
    let outlier_labels = values
        .iter()
        .filter(|(_, v)| *v > upper_fence)
        .map(|(l, _)| l.clone())
        .collect();
    Ok(IqrVerdict {
        q1,
        q3,
        iqr,
        upper_fence,
        outlier_labels,
    })
}

/// Pearson chi-square test of a histogram against the uniform distribution
/// over its own bins.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiSquareTest {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// `sum (x_i - N/n)^2 / (N/n)` with `n - 1` degrees of freedom. The statistic
/// scales exactly linearly when all counts are scaled by a constant, which is
/// the formal core of the sample-size demonstration.
pub fn chi_square_uniform(h: &Histogram) -> Result<ChiSquareTest> {
    let n_bins = h.bin_count();
    if n_bins < 2 {
        return Err(Error::DegenerateInput(
            "chi-square needs at least two bins",
        ));
    }
    let total = h.total();
    if total == 0 {
        return Err(Error::EmptyHistogram(h.label().to_owned()));
    }
    let expected = total as f64 / n_bins as f64;
    let mut statistic = 0.0;
    for &c in h.counts() {
        let d = c as f64 - expected;
        statistic += d * d / expected;
    }
    let dof = n_bins - 1;
    let p_value = if statistic == 0.0 {
        1.0
    } else {
        reg_gamma_upper(dof as f64 / 2.0, statistic / 2.0)
    };
    Ok(ChiSquareTest {
        statistic,
        dof,
        p_value,
    })
}

/// One threshold of the unique-size sweep. `top_label` is `None` when the
/// threshold was skipped (fewer than two survivors, or a degenerate fit).
#[derive(Debug, Clone, PartialEq)]
pub struct SweepEntry {
    pub threshold: u64,
    pub included: usize,
    pub top_label: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub entries: Vec<SweepEntry>,
}

impl SweepReport {
    /// Number of thresholds whose top label equals `label`.
    pub fn top_count(&self, label: &str) -> usize {
        self.entries
            .iter()
            .filter(|e| e.top_label.as_deref() == Some(label))
            .count()
    }
}

/// Re-run the full fit-and-rank once per unique size present in the dataset,
/// keeping only histograms at least that large, and record each run's top
/// label. Histograms equal to the threshold are retained.
pub fn threshold_sweep(ds: &Dataset, mode: FitMode) -> Result<SweepReport> {
    if ds.is_empty() {
        return Err(Error::EmptyInput("threshold sweep over an empty dataset"));
    }
    let mut sizes: Vec<u64> = ds.histograms().iter().map(|h| h.total()).collect();
    sizes.sort_unstable();
    sizes.dedup();
    let mut entries = Vec::with_capacity(sizes.len());
    for threshold in sizes {
        let survivors: Vec<Histogram> = ds
            .histograms()
            .iter()
            .filter(|h| h.total() >= threshold)
            .cloned()
            .collect();
        let included = survivors.len();
        if included < 2 {
            entries.push(SweepEntry {
                threshold,
                included,
                top_label: None,
            });
            continue;
        }
        let subset = Dataset::new(survivors, ds.min_size_filter())?;
        let top_label = match fit_model(&subset, mode) {
            Ok(model) => rank(&subset, &model)?.first().map(|r| r.label.clone()),
            Err(Error::SingularFit(_)) => None,
            Err(e) => return Err(e),
        };
        entries.push(SweepEntry {
            threshold,
            included,
            top_label,
        });
    }
    Ok(SweepReport { entries })
}
