//! Integer-keyed histograms and per-histogram data-quality metrics.
//!
//! A [`Histogram`] stores non-negative counts over a contiguous range of
//! integer bin keys (empty interior bins are stored explicitly as zeros, so
//! the discrete total variation is always taken over consecutive bins). The
//! module also provides the two classic age-heaping diagnostics: Whipple's
//! index over a configurable age window and last-digit profiles of year
//! multisets.

use crate::{Error, Result};

/// A histogram over consecutive integer bin keys `origin..origin + n - 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Histogram {
    label: String,
    origin: i64,
    counts: Vec<u64>,
}

impl Histogram {
    /// Build a histogram from an explicit count vector. At least one bin is
    /// required; zero counts are legal everywhere.
    pub fn new(label: impl Into<String>, origin: i64, counts: Vec<u64>) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::EmptyInput("histogram needs at least one bin"));
        }
        Ok(Histogram {
            label: label.into(),
            origin,
            counts,
        })
    }

    /// Tally a non-empty year multiset into a histogram spanning
    /// `min(years)..=max(years)`.
    pub fn from_years(years: &[i64], label: impl Into<String>) -> Result<Self> {
        let (&min, &max) = match (years.iter().min(), years.iter().max()) {
            (Some(min), Some(max)) => (min, max),
            _ => return Err(Error::EmptyInput("no years to tally")),
        };
        let n = (max - min) as usize + 1;
        let mut counts = vec![0u64; n];
        for &y in years {
            counts[(y - min) as usize] += 1;
        }
        Histogram::new(label, min, counts)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn origin(&self) -> i64 {
        self.origin
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Number of bins (`n`).
    pub fn bin_count(&self) -> usize {
        self.counts.len()
    }

    /// Total element count (`N`).
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Discrete total variation: sum of |x_i - x_{i-1}| over adjacent bins.
    /// Zero for single-bin histograms.
    pub fn dtv(&self) -> u64 {
        self.counts
            .windows(2)
            .map(|w| w[0].abs_diff(w[1]))
            .sum()
    }

    /// Bin keys, ascending.
    pub fn keys(&self) -> impl Iterator<Item = i64> + '_ {
        (0..self.counts.len()).map(move |i| self.origin + i as i64)
    }

    /// Expand back to the year multiset (each key repeated by its count,
    /// ascending). Inverse of [`Histogram::from_years`] up to ordering.
    pub fn to_years(&self) -> Vec<i64> {
        let mut years = Vec::with_capacity(self.total() as usize);
        for (key, &count) in self.keys().zip(&self.counts) {
            for _ in 0..count {
                years.push(key);
            }
        }
        years
    }

    /// Same counts under a new label.
    pub fn relabeled(&self, label: impl Into<String>) -> Histogram {
        Histogram {
            label: label.into(),
            origin: self.origin,
            counts: self.counts.clone(),
        }
    }

    /// Same counts with the origin key moved; DTV is unaffected.
    pub fn with_origin(&self, origin: i64) -> Histogram {
        Histogram {
            label: self.label.clone(),
            origin,
            counts: self.counts.clone(),
        }
    }

    /// Every count multiplied by `k`.
    pub fn scaled(&self, k: u64) -> Histogram {
        Histogram {
            label: self.label.clone(),
            origin: self.origin,
            counts: self.counts.iter().map(|&c| c * k).collect(),
        }
    }
}

/// Counts of years (or ages) by terminal digit 0-9.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DigitProfile {
    counts: [u64; 10],
}

impl DigitProfile {
    pub fn counts(&self) -> &[u64; 10] {
        &self.counts
    }

    pub fn count(&self, digit: usize) -> u64 {
        self.counts[digit]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

/// Tally terminal digits with a mathematical (non-negative) modulus.
pub fn last_digit_profile(years: &[i64]) -> DigitProfile {
    let mut counts = [0u64; 10];
    for &y in years {
        counts[y.rem_euclid(10) as usize] += 1;
    }
    DigitProfile { counts }
}

/// Inclusive age window for Whipple's index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WhippleWindow {
    pub lo: i64,
    pub hi: i64,
}

impl WhippleWindow {
    /// The conventional window, ages 23-62.
    pub const DEFAULT: WhippleWindow = WhippleWindow { lo: 23, hi: 62 };

    fn validate(&self) -> Result<()> {
        if self.lo > self.hi {
            return Err(Error::InvalidWindow {
                lo: self.lo,
                hi: self.hi,
                reason: "empty window",
            });
        }
        if (self.hi - self.lo + 1) % 5 != 0 {
            return Err(Error::InvalidWindow {
                lo: self.lo,
                hi: self.hi,
                reason: "window length must be a multiple of 5",
            });
        }
        Ok(())
    }

    fn contains(&self, age: i64) -> bool {
        (self.lo..=self.hi).contains(&age)
    }
}

/// Data-quality bands for Whipple's index (conventional UN thresholds).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WhippleClass {
    HighlyAccurate,
    FairlyAccurate,
    Approximate,
    Rough,
    VeryRoughBad,
}

impl WhippleClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            WhippleClass::HighlyAccurate => "highly_accurate",
            WhippleClass::FairlyAccurate => "fairly_accurate",
            WhippleClass::Approximate => "approximate",
            WhippleClass::Rough => "rough",
            WhippleClass::VeryRoughBad => "very_rough_bad",
        }
    }

    /// Band for an index value: <105, [105,110), [110,125), [125,175), >=175.
    pub fn from_index(index: f64) -> WhippleClass {
        if index < 105.0 {
            WhippleClass::HighlyAccurate
        } else if index < 110.0 {
            WhippleClass::FairlyAccurate
        } else if index < 125.0 {
            WhippleClass::Approximate
        } else if index < 175.0 {
            WhippleClass::Rough
        } else {
            WhippleClass::VeryRoughBad
        }
    }
}

impl std::fmt::Display for WhippleClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WhippleResult {
    /// 100 = no digit preference, 500 = every in-window age ends in 0 or 5.
    pub index: f64,
    pub classification: WhippleClass,
    pub ages_in_window: u64,
}

/// Whipple's index: `500 * (in-window ages ending in 0 or 5) / (in-window ages)`.
///
/// The window length must be a multiple of 5 so that a digit-uniform
/// population calibrates to exactly 100.
pub fn whipple_index(ages: &[i64], window: WhippleWindow) -> Result<WhippleResult> {
    window.validate()?;
    let mut in_window = 0u64;
    let mut heaped = 0u64;
    for &age in ages {
        if window.contains(age) {
            in_window += 1;
            let d = age.rem_euclid(10);
            if d == 0 || d == 5 {
                heaped += 1;
            }
        }
    }
    if in_window == 0 {
        return Err(Error::NoDataInWindow {
            lo: window.lo,
            hi: window.hi,
        });
    }
    let index = 500.0 * heaped as f64 / in_window as f64;
    Ok(WhippleResult {
        index,
        classification: WhippleClass::from_index(index),
        ages_in_window: in_window,
    })
}

/// Convert birth years to ages at `reference_year`.
pub fn ages_from_birth_years(years: &[i64], reference_year: i64) -> Vec<i64> {
    years.iter().map(|&y| reference_year - y).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dtv_constant_histogram_is_zero() {
        let h = Histogram::new("h", 0, vec![5, 5, 5, 5]).unwrap();
        assert_eq!(h.dtv(), 0);
    }

    #[test]
    fn dtv_monotone_steps() {
        let h = Histogram::new("h", 0, vec![1, 2, 3]).unwrap();
        assert_eq!(h.dtv(), 2);
    }

    #[test]
    fn dtv_alternating_spikes() {
        // |7-0| + |0-7| + |7-0| + |0-7| = 28, hand-checked
        let h = Histogram::new("h", 0, vec![0, 7, 0, 7, 0]).unwrap();
        assert_eq!(h.dtv(), 28);
    }

    #[test]
    fn dtv_single_bin_is_zero() {
        let h = Histogram::new("h", 1940, vec![9]).unwrap();
        assert_eq!(h.dtv(), 0);
    }

    #[test]
    fn from_years_fills_gaps() {
        let h = Histogram::from_years(&[1940, 1940, 1942], "l").unwrap();
        assert_eq!(h.origin(), 1940);
        assert_eq!(h.counts(), &[2, 0, 1]);
        assert_eq!(h.total(), 3);
    }

    #[test]
    fn from_years_rejects_empty() {
        assert!(matches!(
            Histogram::from_years(&[], "l"),
            Err(Error::EmptyInput(_))
        ));
    }

    #[test]
    fn years_round_trip() {
        let years = vec![1905, 1900, 1900, 1903, 1905, 1905];
        let h = Histogram::from_years(&years, "l").unwrap();
        let mut sorted = years.clone();
        sorted.sort_unstable();
        assert_eq!(h.to_years(), sorted);
        let again = Histogram::from_years(&h.to_years(), "l").unwrap();
        assert_eq!(again, h);
    }

    #[test]
    fn origin_shift_keeps_dtv() {
        let h = Histogram::new("h", 1900, vec![3, 0, 9, 1]).unwrap();
        assert_eq!(h.with_origin(2500).dtv(), h.dtv());
    }

    #[test]
    fn scaling_scales_dtv() {
        let h = Histogram::new("h", 0, vec![2, 5, 1, 1, 8]).unwrap();
        assert_eq!(h.scaled(3).dtv(), 3 * h.dtv());
        assert_eq!(h.scaled(0).dtv(), 0);
    }

    #[test]
    fn digit_profile_counts() {
        let p = last_digit_profile(&[1900, 1902, 1905, 1912]);
        assert_eq!(p.count(0), 1);
        assert_eq!(p.count(2), 2);
        assert_eq!(p.count(5), 1);
        assert_eq!(p.total(), 4);
        assert_eq!(last_digit_profile(&[]).total(), 0);
    }

    #[test]
    fn digit_profile_negative_years_use_mathematical_mod() {
        let p = last_digit_profile(&[-1, -11, -20]);
        assert_eq!(p.count(9), 2);
        assert_eq!(p.count(0), 1);
    }

    #[test]
    fn whipple_maximal_heaping() {
        let ages = vec![25, 30, 35, 40, 45, 50];
        let r = whipple_index(&ages, WhippleWindow::DEFAULT).unwrap();
        assert_eq!(r.index, 500.0);
        assert_eq!(r.classification, WhippleClass::VeryRoughBad);
    }

    #[test]
    fn whipple_digit_uniform_is_100() {
        // every age in the window exactly once
        let ages: Vec<i64> = (23..=62).collect();
        let r = whipple_index(&ages, WhippleWindow::DEFAULT).unwrap();
        assert_eq!(r.index, 100.0);
        assert_eq!(r.classification, WhippleClass::HighlyAccurate);
        assert_eq!(r.ages_in_window, 40);
    }

    #[test]
    fn whipple_hand_counted_example() {
        // window [23, 62]; 25, 25, 30 end in 0/5; 31, 47 do not
        let ages = vec![25, 25, 30, 31, 47];
        let r = whipple_index(&ages, WhippleWindow { lo: 23, hi: 62 }).unwrap();
        assert!((r.index - 300.0).abs() < 1e-12);
        assert_eq!(r.ages_in_window, 5);
    }

    #[test]
    fn whipple_ignores_out_of_window() {
        let ages = vec![25, 30, 5, 80, 100];
        let r = whipple_index(&ages, WhippleWindow::DEFAULT).unwrap();
        assert_eq!(r.ages_in_window, 2);
        assert_eq!(r.index, 500.0);
    }

    #[test]
    fn whipple_empty_window_population_errors() {
        let err = whipple_index(&[5, 80], WhippleWindow::DEFAULT).unwrap_err();
        assert!(matches!(err, Error::NoDataInWindow { .. }));
    }

    #[test]
    fn whipple_rejects_bad_windows() {
        assert!(whipple_index(&[30], WhippleWindow { lo: 40, hi: 30 }).is_err());
        assert!(whipple_index(&[30], WhippleWindow { lo: 23, hi: 61 }).is_err());
    }

    #[test]
    fn whipple_zero_index_needs_no_heapable_age() {
        let ages = vec![23, 24, 26, 31];
        let r = whipple_index(&ages, WhippleWindow::DEFAULT).unwrap();
        assert_eq!(r.index, 0.0);
    }

    #[test]
    fn ages_conversion() {
        assert_eq!(ages_from_birth_years(&[1900, 1920], 1945), vec![45, 25]);
    }
}
