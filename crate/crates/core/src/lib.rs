//! Smoothness-outlier detection among histograms via discrete total variation.
//!
//! A histogram's discrete total variation (DTV) is the sum of absolute
//! differences between adjacent bin counts. Across a collection of histograms
//! of similar smoothness, the expected DTV follows `m = a*N + b*sqrt(N)` in
//! the sample size `N`; the coefficients are fitted on the collection and each
//! histogram is scored by its normalized deviation `d' = (DTV - m) / sqrt(N)`.
//! Ranking by `|d'|` surfaces smoothness outliers such as heavily age-heaped
//! birth-year lists.
//!
//! The crate is organized around that pipeline:
//!
//! * [`histogram`] — integer-keyed histograms, DTV, Whipple's index and
//!   last-digit (age-heaping) profiles;
//! * [`engine`] — model fitting, scoring, ranking and the iterative additive
//!   debias;
//! * [`diagnostics`] — score-vs-size regressions and correlations, IQR outlier
//!   labeling, the chi-square sample-size demonstration and the
//!   threshold-sweep robustness check;
//! * [`simulation`] — seedable Monte Carlo sampling from discrete
//!   distributions, beta discretization, expected-DTV estimation and synthetic
//!   dataset generation;
//! * [`records`] — person-record experiments: closest-alternative birth-year
//!   substitution, attribute splits and list exclusion.
//!
//! All randomness flows through the crate's own counter-seeded
//! xoshiro256++ generator ([`rng`]), so every simulation is a pure function of
//! its seed on every platform.

pub mod diagnostics;
pub mod engine;
mod error;
pub mod histogram;
pub mod records;
pub mod rng;
pub mod simulation;
pub mod special;

pub(crate) mod accum;

pub use error::{Error, Result};
pub use histogram::{
    ages_from_birth_years, last_digit_profile, whipple_index, DigitProfile, Histogram,
    WhippleClass, WhippleResult, WhippleWindow,
};

pub use engine::{
    debias_iterative, fit_model, fit_pairs, rank, score, Dataset, DebiasResult, FitMode,
    ScoreRecord, TvorModel,
};

pub use diagnostics::{
    bias_report, chi_square_uniform, fit_line, iqr_outliers, largest_subset_slope,
    pearson_correlation, renormalize_demo, threshold_sweep, BiasReport, ChiSquareTest,
    IqrVerdict, RegressionLine, RenormalizedScores, ScoreConvention, SweepEntry, SweepReport,
};

pub use records::{
    augment_and_rank, exclude_lists, split_by_attribute, substitute_closest, PersonRecord,
    RecordSet, SplitOutcome, SubstitutionReport,
};

pub use simulation::{
    discretize_beta, estimate_expected_dtv, glivenko_cantelli_curve, make_synthetic_dataset,
    near_uniform_fixture, DiscreteDistribution, DtvEstimate, GcCurve, GcPoint, GeneratorSpec,
    SyntheticHistogramSpec,
};
