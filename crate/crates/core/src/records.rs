//! Record-level experiments: closest-alternative birth-year substitution with
//! before/after digit profiles, attribute-based dataset splits, dataset
//! augmentation and list exclusion.

use std::collections::{BTreeMap, BTreeSet};

use crate::engine::{fit_model, rank, Dataset, FitMode, ScoreRecord, TvorModel};
use crate::histogram::{last_digit_profile, DigitProfile, Histogram};
use crate::{Error, Result};

/// One person entry: a stated birth year, possible alternative years from
/// conflicting sources, and free-form attributes (e.g. `death_year`, a
/// `disputed` flag).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PersonRecord {
    pub id: String,
    pub birth_year: Option<i64>,
    pub alternative_years: BTreeSet<i64>,
    pub attributes: BTreeMap<String, String>,
}

impl PersonRecord {
    pub fn new(id: impl Into<String>, birth_year: Option<i64>) -> Self {
        PersonRecord {
            id: id.into(),
            birth_year,
            alternative_years: BTreeSet::new(),
            attributes: BTreeMap::new(),
        }
    }

    pub fn with_alternatives(mut self, alternatives: impl IntoIterator<Item = i64>) -> Self {
        self.alternative_years = alternatives.into_iter().collect();
        self
    }

    pub fn with_attribute(mut self, key: impl Into<String>, value: impl Into<String>) -> Self {
        self.attributes.insert(key.into(), value.into());
        self
    }
}

/// A collection of person records with unique ids. The stated birth year is
/// removed from each record's alternative set at construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecordSet {
    records: Vec<PersonRecord>,
}

impl RecordSet {
    pub fn new(mut records: Vec<PersonRecord>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for r in &mut records {
            if !seen.insert(r.id.clone()) {
                return Err(Error::DuplicateLabel(r.id.clone()));
            }
            if let Some(y) = r.birth_year {
                r.alternative_years.remove(&y);
            }
        }
        Ok(RecordSet { records })
    }

    pub fn records(&self) -> &[PersonRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Stated birth years of all records that have one.
    pub fn birth_years(&self) -> Vec<i64> {
        self.records.iter().filter_map(|r| r.birth_year).collect()
    }
}

/// Outcome of the closest-alternative substitution experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct SubstitutionReport {
    pub substituted_count: u64,
    /// Records carrying alternatives but no stated birth year (skipped).
    pub skipped_no_birth_year: u64,
    /// Records where two alternatives tied in distance (smaller year chosen).
    pub tie_broken: u64,
    pub digit_profile_before: DigitProfile,
    pub digit_profile_after: DigitProfile,
    /// |chosen - stated| tallied over bins 0..max difference.
    pub abs_diff_histogram: Histogram,
}

/// Replace each stated birth year by its closest alternative (ties go to the
/// smaller year). Records without alternatives pass through unchanged;
/// records with alternatives but no stated year are counted and skipped.
pub fn substitute_closest(rs: &RecordSet) -> (RecordSet, SubstitutionReport) {
    let mut out = Vec::with_capacity(rs.len());
    let mut substituted = 0u64;
    let mut skipped = 0u64;
    let mut ties = 0u64;
    let mut diffs = Vec::new();
    for record in rs.records() {
        let mut new_record = record.clone();
        match record.birth_year {
            Some(stated) if !record.alternative_years.is_empty() => {
                let mut best = None::<i64>;
                let mut tied = false;
                for &alt in &record.alternative_years {
                    let dist = (alt - stated).abs();
                    match best {
                        None => best = Some(alt),
                        Some(current) => {
                            let current_dist = (current - stated).abs();
                            if dist < current_dist {
                                best = Some(alt);
                                tied = false;
                            } else if dist == current_dist && alt != current {
                                // keep the smaller year (set iteration is
                                // ascending, so `current` already is)
                                tied = true;
                            }
                        }
                    }
                }
                let chosen = best.expect("non-empty alternatives");
                if tied {
                    ties += 1;
                }
                diffs.push((chosen - stated).abs());
                new_record.birth_year = Some(chosen);
                substituted += 1;
            }
            None if !record.alternative_years.is_empty() => skipped += 1,
            _ => {}
        }
        out.push(new_record);
    }
    let before = last_digit_profile(&rs.birth_years());
    let new_set = RecordSet { records: out };
    let after = last_digit_profile(&new_set.birth_years());
    let abs_diff_histogram = if diffs.is_empty() {
        Histogram::new("abs_diff", 0, vec![0]).expect("one bin")
    } else {
        let max = *diffs.iter().max().expect("non-empty") as usize;
        let mut counts = vec![0u64; max + 1];
        for d in diffs {
            counts[d as usize] += 1;
        }
        Histogram::new("abs_diff", 0, counts).expect("non-empty counts")
    };
    let report = SubstitutionReport {
        substituted_count: substituted,
        skipped_no_birth_year: skipped,
        tie_broken: ties,
        digit_profile_before: before,
        digit_profile_after: after,
        abs_diff_histogram,
    };
    (new_set, report)
}

/// Result of partitioning a record set by exact attribute equality.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitOutcome {
    pub matched: Histogram,
    pub rest: Histogram,
    pub matched_records: usize,
    pub rest_records: usize,
    /// Records lacking the attribute entirely (they land on the rest side).
    pub missing_attribute: usize,
}

/// Partition records by `attributes[key] == value` and render each side's
/// birth years as a histogram. Records lacking the attribute go to the rest
/// side; a side without any birth years is an error naming it.
pub fn split_by_attribute(rs: &RecordSet, key: &str, value: &str) -> Result<SplitOutcome> {
    let mut matched_years = Vec::new();
    let mut rest_years = Vec::new();
    let mut matched_records = 0usize;
    let mut rest_records = 0usize;
    let mut missing = 0usize;
    for r in rs.records() {
        let is_match = match r.attributes.get(key) {
            Some(v) => v == value,
            None => {
                missing += 1;
                false
            }
        };
        if is_match {
            matched_records += 1;
            if let Some(y) = r.birth_year {
                matched_years.push(y);
            }
        } else {
            rest_records += 1;
            if let Some(y) = r.birth_year {
                rest_years.push(y);
            }
        }
    }
    if matched_years.is_empty() {
        return Err(Error::EmptyInput("no birth years on the matching side"));
    }
    if rest_years.is_empty() {
        return Err(Error::EmptyInput("no birth years on the rest side"));
    }
    let matched = Histogram::from_years(&matched_years, format!("{key}={value}"))?;
    let rest = Histogram::from_years(&rest_years, format!("{key}!={value}"))?;
    Ok(SplitOutcome {
        matched,
        rest,
        matched_records,
        rest_records,
        missing_attribute: missing,
    })
}

/// Add `extra` histograms to the dataset, refit and rerank the union.
pub fn augment_and_rank(
    ds: &Dataset,
    extra: Vec<Histogram>,
    mode: FitMode,
) -> Result<(TvorModel, Vec<ScoreRecord>)> {
    let union = ds.with_extra(extra)?;
    let model = fit_model(&union, mode)?;
    let scores = rank(&union, &model)?;
    Ok((model, scores))
}

/// Dataset minus the named lists. Unknown labels are an error listing them.
pub fn exclude_lists(ds: &Dataset, labels: &BTreeSet<String>) -> Result<Dataset> {
    ds.without(labels)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(id: &str, year: Option<i64>, alts: &[i64]) -> PersonRecord {
        PersonRecord::new(id, year).with_alternatives(alts.iter().copied())
    }

    #[test]
    fn record_set_normalizes_and_rejects_duplicates() {
        let rs = RecordSet::new(vec![record("a", Some(1910), &[1910, 1912])]).unwrap();
        assert_eq!(
            rs.records()[0].alternative_years,
            BTreeSet::from([1912])
        );
        assert!(matches!(
            RecordSet::new(vec![record("a", None, &[]), record("a", None, &[])]),
            Err(Error::DuplicateLabel(_))
        ));
    }

    #[test]
    fn substitution_picks_nearest_alternative() {
        let rs = RecordSet::new(vec![record("a", Some(1910), &[1912, 1900])]).unwrap();
        let (out, report) = substitute_closest(&rs);
        assert_eq!(out.records()[0].birth_year, Some(1912));
        assert_eq!(report.substituted_count, 1);
        assert_eq!(report.tie_broken, 0);
        assert_eq!(report.abs_diff_histogram.counts()[2], 1);
        assert_eq!(report.abs_diff_histogram.total(), 1);
    }

    #[test]
    fn substitution_without_alternatives_is_identity() {
        let rs = RecordSet::new(vec![
            record("a", Some(1900), &[]),
            record("b", Some(1932), &[]),
        ])
        .unwrap();
        let (out, report) = substitute_closest(&rs);
        assert_eq!(out, rs);
        assert_eq!(report.substituted_count, 0);
        assert_eq!(report.digit_profile_before, report.digit_profile_after);
        assert_eq!(report.abs_diff_histogram.total(), 0);
    }

    #[test]
    fn substitution_tie_prefers_smaller_year() {
        // brute-force cross-check of the tie rule over all alternatives
        let alts = [1900i64, 1910];
        let stated = 1905i64;
        let best_brute = alts
            .iter()
            .copied()
            .min_by_key(|&a| ((a - stated).abs(), a))
            .unwrap();
        let rs = RecordSet::new(vec![record("a", Some(stated), &alts)]).unwrap();
        let (out, report) = substitute_closest(&rs);
        assert_eq!(out.records()[0].birth_year, Some(best_brute));
        assert_eq!(out.records()[0].birth_year, Some(1900));
        assert_eq!(report.tie_broken, 1);
    }

    #[test]
    fn substitution_skips_yearless_records_with_alternatives() {
        let rs = RecordSet::new(vec![
            record("a", None, &[1920]),
            record("b", Some(1900), &[1901]),
        ])
        .unwrap();
        let (out, report) = substitute_closest(&rs);
        assert_eq!(report.skipped_no_birth_year, 1);
        assert_eq!(report.substituted_count, 1);
        assert_eq!(out.records()[0].birth_year, None);
        // profile totals track records that carry a year
        assert_eq!(report.digit_profile_before.total(), 1);
        assert_eq!(report.digit_profile_after.total(), 1);
    }

    #[test]
    fn substitution_is_stable_on_cleared_alternatives() {
        let rs = RecordSet::new(vec![
            record("a", Some(1910), &[1912, 1900]),
            record("b", Some(1905), &[1900, 1910]),
        ])
        .unwrap();
        let (once, _) = substitute_closest(&rs);
        // clearing the alternative sets makes a second pass the identity
        let cleared = RecordSet::new(
            once.records()
                .iter()
                .map(|r| PersonRecord {
                    alternative_years: BTreeSet::new(),
                    ..r.clone()
                })
                .collect(),
        )
        .unwrap();
        let (twice, report) = substitute_closest(&cleared);
        assert_eq!(twice, cleared);
        assert_eq!(report.substituted_count, 0);
    }

    #[test]
    fn split_partitions_by_attribute() {
        let mut records = Vec::new();
        for i in 0..10 {
            let death = if i % 2 == 0 { "1942" } else { "1943" };
            records.push(
                record(&format!("r{i}"), Some(1900 + i), &[])
                    .with_attribute("death_year", death),
            );
        }
        // one record without the attribute: goes to the rest side
        records.push(record("extra", Some(1920), &[]));
        let rs = RecordSet::new(records).unwrap();
        let split = split_by_attribute(&rs, "death_year", "1942").unwrap();
        assert_eq!(split.matched_records, 5);
        assert_eq!(split.rest_records, 6);
        assert_eq!(split.missing_attribute, 1);
        assert_eq!(
            split.matched.total() + split.rest.total(),
            rs.birth_years().len() as u64
        );
        assert_eq!(split.matched.label(), "death_year=1942");
        assert_eq!(split.rest.label(), "death_year!=1942");
    }

    #[test]
    fn split_errors_when_a_side_has_no_years() {
        let rs = RecordSet::new(vec![
            record("a", Some(1900), &[]).with_attribute("k", "v"),
            record("b", Some(1901), &[]).with_attribute("k", "v"),
        ])
        .unwrap();
        assert!(matches!(
            split_by_attribute(&rs, "k", "v"),
            Err(Error::EmptyInput(_))
        ));
        assert!(matches!(
            split_by_attribute(&rs, "k", "other"),
            Err(Error::EmptyInput(_))
        ));
    }

    fn sample_dataset() -> Dataset {
        let hs = vec![
            Histogram::new("a", 1900, vec![10, 12, 9, 11]).unwrap(),
            Histogram::new("b", 1900, vec![20, 22, 18, 21]).unwrap(),
            Histogram::new("c", 1900, vec![31, 30, 29, 30]).unwrap(),
        ];
        Dataset::new(hs, 1).unwrap()
    }

    #[test]
    fn augment_with_nothing_matches_plain_ranking() {
        let ds = sample_dataset();
        let (_, augmented) = augment_and_rank(&ds, vec![], FitMode::RawOls).unwrap();
        let model = fit_model(&ds, FitMode::RawOls).unwrap();
        assert_eq!(augmented, rank(&ds, &model).unwrap());
    }

    #[test]
    fn augment_with_copy_scores_identically() {
        let ds = sample_dataset();
        let copy = ds.get("b").unwrap().relabeled("b_copy");
        let (_, scores) = augment_and_rank(&ds, vec![copy], FitMode::RawOls).unwrap();
        let b = scores.iter().find(|s| s.label == "b").unwrap();
        let b_copy = scores.iter().find(|s| s.label == "b_copy").unwrap();
        assert_eq!(b.d_abs.to_bits(), b_copy.d_abs.to_bits());
        // adjacent ranks under the deterministic tie-break
        assert_eq!(b.rank.abs_diff(b_copy.rank), 1);
    }

    #[test]
    fn augment_rejects_collisions() {
        let ds = sample_dataset();
        let clash = ds.get("b").unwrap().clone();
        assert!(matches!(
            augment_and_rank(&ds, vec![clash], FitMode::RawOls),
            Err(Error::LabelCollision(_))
        ));
    }

    #[test]
    fn exclude_round_trip_restores_top_label() {
        let ds = sample_dataset();
        let model = fit_model(&ds, FitMode::RawOls).unwrap();
        let top = rank(&ds, &model).unwrap()[0].label.clone();
        let removed: BTreeSet<String> = ["a".to_owned()].into();
        let without = exclude_lists(&ds, &removed).unwrap();
        assert_eq!(without.len(), 2);
        let back = ds.get("a").unwrap().clone();
        let (_, scores) = augment_and_rank(&without, vec![back], FitMode::RawOls).unwrap();
        assert_eq!(scores[0].label, top);
    }

    #[test]
    fn exclude_empty_set_is_identity() {
        let ds = sample_dataset();
        let out = exclude_lists(&ds, &BTreeSet::new()).unwrap();
        assert_eq!(out.histograms(), ds.histograms());
    }

    #[test]
    fn exclude_unknown_label_reports_it() {
        let ds = sample_dataset();
        let missing: BTreeSet<String> = ["zz".to_owned()].into();
        match exclude_lists(&ds, &missing) {
            Err(Error::UnknownLabels(l)) => assert_eq!(l, vec!["zz".to_owned()]),
            other => panic!("expected UnknownLabels, got {other:?}"),
        }
    }
}
