//! Expected-DTV model fitting, d' scoring, ranking and the additive debias.
//!
//! The expected DTV of a histogram with `N` elements is modelled as
//! `m = a*N + b*sqrt(N)`. Two fit modes are provided:
//!
//! * [`FitMode::RawOls`] minimizes `sum (V_i - a*N_i - b*sqrt(N_i))^2`;
//! * [`FitMode::NormalizedOls`] minimizes the same residuals divided by
//!   `sqrt(N_i)`, i.e. ordinary least squares of `V/sqrt(N)` on
//!   `(sqrt(N), 1)`. Under this mode the signed scores satisfy
//!   `sum d' = sum d'*sqrt(N) = 0`, which makes the iterative additive
//!   debias a first-pass no-op.
//!
//! Both are solved in closed form through 2x2 normal equations with scaled
//! features and compensated left-to-right accumulation, so refitting the same
//! dataset is bit-reproducible.

use std::collections::BTreeSet;

use crate::accum::CompensatedSum;
use crate::histogram::Histogram;
use crate::{Error, Result};

/// Estimator used for the expected-DTV model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FitMode {
    /// Unweighted least squares of V on (N, sqrt(N)).
    #[default]
    RawOls,
    /// Least squares of V/sqrt(N) on (sqrt(N), 1).
    NormalizedOls,
}

impl FitMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            FitMode::RawOls => "raw_ols",
            FitMode::NormalizedOls => "normalized_ols",
        }
    }
}

impl std::fmt::Display for FitMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for FitMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "raw_ols" | "raw" => Ok(FitMode::RawOls),
            "normalized_ols" | "normalized" => Ok(FitMode::NormalizedOls),
            other => Err(Error::InvalidParameter(format!(
                "unknown fit mode `{other}` (expected raw_ols or normalized_ols)"
            ))),
        }
    }
}

/// An ordered collection of uniquely labelled histograms, filtered at load
/// to a minimum size.
#[derive(Debug, Clone)]
pub struct Dataset {
    histograms: Vec<Histogram>,
    min_size_filter: u64,
    dropped_by_filter: usize,
}

impl Dataset {
    /// Validate label uniqueness and drop histograms with `N` below
    /// `min_size_filter` (which must be at least 1).
    pub fn new(histograms: Vec<Histogram>, min_size_filter: u64) -> Result<Self> {
        if min_size_filter == 0 {
            return Err(Error::InvalidParameter(
                "min_size_filter must be at least 1".into(),
            ));
        }
        let mut seen = BTreeSet::new();
        for h in &histograms {
            if !seen.insert(h.label().to_owned()) {
                return Err(Error::DuplicateLabel(h.label().to_owned()));
            }
        }
        let before = histograms.len();
        let histograms: Vec<Histogram> = histograms
            .into_iter()
            .filter(|h| h.total() >= min_size_filter)
            .collect();
        let dropped = before - histograms.len();
        Ok(Dataset {
            histograms,
            min_size_filter,
            dropped_by_filter: dropped,
        })
    }

    pub fn histograms(&self) -> &[Histogram] {
        &self.histograms
    }

    pub fn len(&self) -> usize {
        self.histograms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.histograms.is_empty()
    }

    pub fn min_size_filter(&self) -> u64 {
        self.min_size_filter
    }

    /// Histograms removed at load time by the size filter.
    pub fn dropped_by_filter(&self) -> usize {
        self.dropped_by_filter
    }

    pub fn get(&self, label: &str) -> Option<&Histogram> {
        self.histograms.iter().find(|h| h.label() == label)
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.histograms.iter().map(|h| h.label())
    }

    /// Union with `extra`; colliding labels are an error. The extra
    /// histograms pass through the same size filter.
    pub fn with_extra(&self, extra: Vec<Histogram>) -> Result<Dataset> {
        for h in &extra {
            if self.get(h.label()).is_some() {
                return Err(Error::LabelCollision(h.label().to_owned()));
            }
        }
        let mut histograms = self.histograms.clone();
        histograms.extend(extra);
        Dataset::new(histograms, self.min_size_filter)
    }

    /// Dataset minus the named histograms; every label must exist.
    pub fn without(&self, labels: &BTreeSet<String>) -> Result<Dataset> {
        let unknown: Vec<String> = labels
            .iter()
            .filter(|l| self.get(l).is_none())
            .cloned()
            .collect();
        if !unknown.is_empty() {
            return Err(Error::UnknownLabels(unknown));
        }
        let histograms = self
            .histograms
            .iter()
            .filter(|h| !labels.contains(h.label()))
            .cloned()
            .collect();
        Ok(Dataset {
            histograms,
            min_size_filter: self.min_size_filter,
            dropped_by_filter: self.dropped_by_filter,
        })
    }
}

/// Fitted coefficients of the expected-DTV model `m = a*N + b*sqrt(N)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TvorModel {
    pub a: f64,
    pub b: f64,
    pub fit_mode: FitMode,
    pub n_fitted: usize,
}

impl TvorModel {
    /// Expected DTV at sample size `n`.
    pub fn expected(&self, n: u64) -> f64 {
        let nf = n as f64;
        self.a * nf + self.b * nf.sqrt()
    }
}

/// Per-histogram score row.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreRecord {
    pub label: String,
    /// Sample size N.
    pub n: u64,
    pub dtv: u64,
    /// Model expectation a*N + b*sqrt(N).
    pub expected: f64,
    /// (dtv - expected) / sqrt(N).
    pub d_signed: f64,
    /// |d_signed|.
    pub d_abs: f64,
    /// 1-based position by descending d_abs; 0 until assigned by [`rank`]
    /// (or by the debias, which re-ranks its adjusted scores).
    pub rank: usize,
}

/// Ordinary least squares of `ys` on two feature columns, solved through the
/// scaled 2x2 normal equations. Returns the coefficients in original units.
fn ols_two_features(x1: &[f64], x2: &[f64], ys: &[f64]) -> Result<(f64, f64)> {
    debug_assert_eq!(x1.len(), x2.len());
    debug_assert_eq!(x1.len(), ys.len());
    if x1.len() < 2 {
        return Err(Error::SingularFit("need at least two points"));
    }
    // Scale each feature by its max abs value to tame the conditioning of
    // N vs sqrt(N) columns over several size decades.
    let s1 = x1.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let s2 = x2.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if s1 == 0.0 || s2 == 0.0 {
        return Err(Error::SingularFit("a feature column is identically zero"));
    }
    let (mut g11, mut g12, mut g22) = (
        CompensatedSum::default(),
        CompensatedSum::default(),
        CompensatedSum::default(),
    );
    let (mut r1, mut r2) = (CompensatedSum::default(), CompensatedSum::default());
    for i in 0..x1.len() {
        let u = x1[i] / s1;
        let v = x2[i] / s2;
        g11.add(u * u);
        g12.add(u * v);
        g22.add(v * v);
        r1.add(u * ys[i]);
        r2.add(v * ys[i]);
    }
    let (g11, g12, g22) = (g11.value(), g12.value(), g22.value());
    let (r1, r2) = (r1.value(), r2.value());
    let det = g11 * g22 - g12 * g12;
    if !det.is_finite() || det.abs() <= 1e-14 * g11 * g22 {
        return Err(Error::SingularFit(
            "degenerate design matrix (features collinear, e.g. all N equal)",
        ));
    }
    let alpha = (r1 * g22 - r2 * g12) / det;
    let beta = (g11 * r2 - g12 * r1) / det;
    Ok((alpha / s1, beta / s2))
}

/// Fit the expected-DTV model on raw `(N, V)` pairs.
pub fn fit_pairs(pairs: &[(f64, f64)], mode: FitMode) -> Result<TvorModel> {
    if pairs.len() < 2 {
        return Err(Error::SingularFit("need at least two histograms"));
    }
    let (a, b) = match mode {
        FitMode::RawOls => {
            let x1: Vec<f64> = pairs.iter().map(|p| p.0).collect();
            let x2: Vec<f64> = pairs.iter().map(|p| p.0.sqrt()).collect();
            let ys: Vec<f64> = pairs.iter().map(|p| p.1).collect();
            ols_two_features(&x1, &x2, &ys)?
        }
        FitMode::NormalizedOls => {
            // OLS of V/sqrt(N) on (sqrt(N), 1): slope is a, intercept is b.
            let x1: Vec<f64> = pairs.iter().map(|p| p.0.sqrt()).collect();
            let x2: Vec<f64> = vec![1.0; pairs.len()];
            let ys: Vec<f64> = pairs.iter().map(|p| p.1 / p.0.sqrt()).collect();
            ols_two_features(&x1, &x2, &ys)?
        }
    };
    Ok(TvorModel {
        a,
        b,
        fit_mode: mode,
        n_fitted: pairs.len(),
    })
}

/// Fit the expected-DTV model over a dataset (pairs taken in dataset order).
pub fn fit_model(ds: &Dataset, mode: FitMode) -> Result<TvorModel> {
    let pairs: Vec<(f64, f64)> = ds
        .histograms()
        .iter()
        .map(|h| (h.total() as f64, h.dtv() as f64))
        .collect();
    fit_pairs(&pairs, mode)
}

/// Score one histogram against a fitted model.
pub fn score(model: &TvorModel, h: &Histogram) -> Result<ScoreRecord> {
    let n = h.total();
    if n == 0 {
        return Err(Error::EmptyHistogram(h.label().to_owned()));
    }
    let dtv = h.dtv();
    let expected = model.expected(n);
    let d_signed = (dtv as f64 - expected) / (n as f64).sqrt();
    Ok(ScoreRecord {
        label: h.label().to_owned(),
        n,
        dtv,
        expected,
        d_signed,
        d_abs: d_signed.abs(),
        rank: 0,
    })
}

/// Sort by descending d_abs, ties broken by descending N then ascending
/// label, and assign 1-based ranks in place.
fn assign_ranks(records: &mut Vec<ScoreRecord>) {
    records.sort_by(|x, y| {
        y.d_abs
            .total_cmp(&x.d_abs)
            .then_with(|| y.n.cmp(&x.n))
            .then_with(|| x.label.cmp(&y.label))
    });
    for (i, r) in records.iter_mut().enumerate() {
        r.rank = i + 1;
    }
}

/// Score every histogram in the dataset and rank by descending |d'|.
pub fn rank(ds: &Dataset, model: &TvorModel) -> Result<Vec<ScoreRecord>> {
    let mut records = ds
        .histograms()
        .iter()
        .map(|h| score(model, h))
        .collect::<Result<Vec<_>>>()?;
    assign_ranks(&mut records);
    Ok(records)
}

/// Outcome of the iterative additive debias.
#[derive(Debug, Clone)]
pub struct DebiasResult {
    /// Cumulative sqrt(N) coefficient subtracted from the signed scores.
    pub a1: f64,
    /// Cumulative constant subtracted from the signed scores.
    pub b1: f64,
    pub iterations: usize,
    /// Scores with `d_signed - (a1*sqrt(N) + b1)`, re-ranked by |d'|.
    pub adjusted_scores: Vec<ScoreRecord>,
}

/// Repeatedly regress the signed scores on `(sqrt(N), 1)` and subtract the
/// fitted line until both coefficients fall below `tol` (or `max_iter`).
///
/// Under [`FitMode::NormalizedOls`] the first-pass coefficients are already
/// zero up to rounding (residual orthogonality); under [`FitMode::RawOls`]
/// one subtraction reaches the fixed point, so the second pass is the no-op.
pub fn debias_iterative(
    scores: &[ScoreRecord],
    max_iter: usize,
    tol: f64,
) -> Result<DebiasResult> {
    if scores.len() < 2 {
        return Err(Error::TooFewValues {
            needed: 2,
            got: scores.len(),
        });
    }
    if max_iter == 0 {
        return Err(Error::InvalidParameter("max_iter must be at least 1".into()));
    }
    let sqrt_n: Vec<f64> = scores.iter().map(|s| (s.n as f64).sqrt()).collect();
    let ones = vec![1.0; scores.len()];
    let mut d: Vec<f64> = scores.iter().map(|s| s.d_signed).collect();
    let (mut cum_a1, mut cum_b1) = (0.0f64, 0.0f64);
    let mut iterations = 0;
    for _ in 0..max_iter {
        let (a1, b1) = ols_two_features(&sqrt_n, &ones, &d)?;
        iterations += 1;
        cum_a1 += a1;
        cum_b1 += b1;
        for (di, sn) in d.iter_mut().zip(&sqrt_n) {
            *di -= a1 * sn + b1;
        }
        if a1.abs() < tol && b1.abs() < tol {
            break;
        }
    }
    let mut adjusted: Vec<ScoreRecord> = scores
        .iter()
        .zip(&d)
        .map(|(s, &di)| ScoreRecord {
            d_signed: di,
            d_abs: di.abs(),
            rank: 0,
            ..s.clone()
        })
        .collect();
    assign_ranks(&mut adjusted);
    Ok(DebiasResult {
        a1: cum_a1,
        b1: cum_b1,
        iterations,
        adjusted_scores: adjusted,
    })
}
