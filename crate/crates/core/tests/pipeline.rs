//! Cross-module scenarios: planted-outlier detection, debias stability,
//! fit recovery against an independent solver, the signed-vs-absolute
//! correlation mechanism and the attribute-split experiment.

use std::collections::BTreeSet;

use tvor_core::rng::{derive_seed, Rng};
use tvor_core::{
    augment_and_rank, bias_report, debias_iterative, discretize_beta, fit_model, fit_pairs, rank,
    split_by_attribute, threshold_sweep, Dataset, FitMode, GeneratorSpec, PersonRecord,
    RecordSet, SyntheticHistogramSpec,
};

/// Independent textbook least-squares oracle: unscaled normal equations of V
/// on (N, sqrt(N)) solved by the explicit 2x2 inverse, plus coefficient
/// standard errors from sigma^2 (X^T X)^-1.
fn oracle_fit(pairs: &[(f64, f64)]) -> (f64, f64, f64, f64) {
    let (mut s11, mut s12, mut s22, mut r1, mut r2) = (0.0f64, 0.0, 0.0, 0.0, 0.0);
    for &(n, v) in pairs {
        let x1 = n;
        let x2 = n.sqrt();
        s11 += x1 * x1;
        s12 += x1 * x2;
        s22 += x2 * x2;
        r1 += x1 * v;
        r2 += x2 * v;
    }
    let det = s11 * s22 - s12 * s12;
    let a = (r1 * s22 - r2 * s12) / det;
    let b = (s11 * r2 - s12 * r1) / det;
    let rss: f64 = pairs
        .iter()
        .map(|&(n, v)| {
            let e = v - a * n - b * n.sqrt();
            e * e
        })
        .sum();
    let sigma2 = rss / (pairs.len() - 2) as f64;
    let se_a = (sigma2 * s22 / det).sqrt();
    let se_b = (sigma2 * s11 / det).sqrt();
    (a, b, se_a, se_b)
}

#[test]
fn noisy_fit_recovery_within_oracle_confidence_bounds() {
    // V = 0.3 N + 1.7 sqrt(N) + eps, eps ~ U(-5, 5), 500 histograms
    let mut rng = Rng::new(0x5eed);
    let pairs: Vec<(f64, f64)> = (0..500)
        .map(|i| {
            let n = (100.0 + 60.0 * i as f64).floor();
            let eps = rng.uniform(-5.0, 5.0);
            (n, 0.3 * n + 1.7 * n.sqrt() + eps)
        })
        .collect();
    let (oa, ob, se_a, se_b) = oracle_fit(&pairs);
    let model = fit_pairs(&pairs, FitMode::RawOls).unwrap();
    // same minimizer as the oracle's route
    assert!((model.a - oa).abs() < 1e-9 * oa.abs().max(1.0), "{} vs {}", model.a, oa);
    assert!((model.b - ob).abs() < 1e-9 * ob.abs().max(1.0), "{} vs {}", model.b, ob);
    // and the truth lies within the oracle's 4-sigma confidence bounds
    assert!((model.a - 0.3).abs() < 4.0 * se_a, "a = {}, se = {se_a}", model.a);
    assert!((model.b - 1.7).abs() < 4.0 * se_b, "b = {}, se = {se_b}", model.b);
}

fn planted_outlier_spec(n_smooth: usize, planted_size: u64, heap: f64) -> GeneratorSpec {
    let mut entries = Vec::new();
    let mut rng = Rng::new(0xd5);
    for i in 0..n_smooth {
        // sizes spread over two decades, at least ten above the planted size
        let size = if i < 10 {
            planted_size + 1000 + 900 * i as u64
        } else {
            (10f64.powf(rng.uniform(2.3, 4.0))) as u64
        };
        entries.push(
            SyntheticHistogramSpec::new(format!("smooth{i:03}"), size, 2.0, 3.0, 50)
                .with_origin(1880),
        );
    }
    entries.push(
        SyntheticHistogramSpec::new("planted", planted_size, 2.0, 3.0, 50)
            .with_origin(1880)
            .with_heaping(heap),
    );
    GeneratorSpec::new(entries)
}

#[test]
fn planted_spiky_histogram_ranks_first() {
    let ds = make(planted_outlier_spec(50, 5000, 0.3), 1);
    let model = fit_model(&ds, FitMode::RawOls).unwrap();
    let scores = rank(&ds, &model).unwrap();
    assert_eq!(scores[0].label, "planted");
    // direct computation: its |d'| strictly exceeds every other
    let planted = &scores[0];
    let runner_up = &scores[1];
    assert!(
        planted.d_abs > 2.0 * runner_up.d_abs,
        "margin too thin: {} vs {}",
        planted.d_abs,
        runner_up.d_abs
    );
}

fn make(spec: GeneratorSpec, seed: u64) -> Dataset {
    tvor_core::make_synthetic_dataset(&spec, seed).unwrap()
}

#[test]
fn sweep_tracks_planted_outlier_until_its_size() {
    let planted_size = 5000;
    let ds = make(planted_outlier_spec(50, planted_size, 0.3), 2);
    let report = threshold_sweep(&ds, FitMode::RawOls).unwrap();
    for entry in &report.entries {
        if entry.threshold <= planted_size {
            assert_eq!(
                entry.top_label.as_deref(),
                Some("planted"),
                "threshold {}",
                entry.threshold
            );
        } else if let Some(top) = &entry.top_label {
            assert_ne!(top, "planted", "threshold {}", entry.threshold);
        }
    }
}

#[test]
fn debias_keeps_top_outlier_when_margin_dominates() {
    let ds = make(planted_outlier_spec(50, 5000, 0.3), 3);
    let model = fit_model(&ds, FitMode::RawOls).unwrap();
    let scores = rank(&ds, &model).unwrap();
    let top_before = scores[0].label.clone();
    let db = debias_iterative(&scores, 10, 1e-9).unwrap();
    // the shift magnitude is far below the top-1 margin by construction
    let shift_bound: f64 = scores
        .iter()
        .map(|s| (db.a1 * (s.n as f64).sqrt() + db.b1).abs())
        .fold(0.0, f64::max);
    let margin = scores[0].d_abs - scores[1].d_abs;
    assert!(2.0 * shift_bound < margin, "shift {shift_bound} vs margin {margin}");
    assert_eq!(db.adjusted_scores[0].label, top_before);
}

#[test]
fn fitted_slope_approaches_theoretical_dtv_rate() {
    // large same-shape histograms: the N coefficient approaches ||D||_V
    let d = discretize_beta(2.0, 3.0, 50).unwrap();
    let alpha = d.theoretical_dtv();
    let mut pairs = Vec::new();
    for (i, &n) in [10_000u64, 20_000, 50_000, 100_000, 200_000, 400_000]
        .iter()
        .enumerate()
    {
        for t in 0..4u64 {
            let h = d.sample(n, derive_seed(40 + i as u64, t));
            pairs.push((n as f64, h.dtv() as f64));
        }
    }
    let model = fit_pairs(&pairs, FitMode::RawOls).unwrap();
    assert!(
        (model.a - alpha).abs() / alpha < 0.25,
        "fitted a = {}, theoretical rate = {alpha}",
        model.a
    );
}

/// Same-smoothness bias mechanism: per-histogram smoothness jitter that is
/// independent of size keeps corr(N, d') at noise level while folding to
/// |d'| produces a clearly positive association.
#[test]
fn signed_correlation_is_noise_while_absolute_folds_positive() {
    let mut signed_mean_abs = 0.0;
    let mut abs_above_signed = 0;
    let seeds = 3; // the 20-seed version runs in the acceptance suite
    for seed in 0..seeds {
        let mut rng = Rng::new(9000 + seed);
        let entries: Vec<SyntheticHistogramSpec> = (0..200)
            .map(|i| {
                let size = 10f64.powf(rng.uniform(2.0, 5.0)) as u64;
                let heap = rng.uniform(0.2, 0.4);
                SyntheticHistogramSpec::new(format!("h{i:03}"), size, 1.0, 1.0, 50)
                    .with_heaping(heap)
            })
            .collect();
        let ds = make(GeneratorSpec::new(entries), 7000 + seed);
        let model = fit_model(&ds, FitMode::NormalizedOls).unwrap();
        let scores = rank(&ds, &model).unwrap();
        let signed = bias_report(&scores, true).unwrap();
        let absolute = bias_report(&scores, false).unwrap();
        signed_mean_abs += signed.correlation.abs();
        if absolute.correlation > signed.correlation {
            abs_above_signed += 1;
        }
        assert!(
            absolute.correlation > 0.3,
            "seed {seed}: fold correlation {} unexpectedly weak",
            absolute.correlation
        );
    }
    assert!(signed_mean_abs / (seeds as f64) < 0.05);
    assert_eq!(abs_above_signed, seeds);
}

#[test]
fn heaped_attribute_side_outscores_the_rest() {
    // heaping injected only into death_year=1942 records
    let base = discretize_beta(2.0, 3.0, 50).unwrap().with_origin(1880);
    let heaped = base.with_heaping(0.3).unwrap();
    let years_1942 = heaped.sample(4000, 71).to_years();
    let years_other = base.sample(4000, 72).to_years();
    let mut records = Vec::new();
    for (i, y) in years_1942.iter().enumerate() {
        records.push(
            PersonRecord::new(format!("a{i:05}"), Some(*y)).with_attribute("death_year", "1942"),
        );
    }
    for (i, y) in years_other.iter().enumerate() {
        records.push(
            PersonRecord::new(format!("b{i:05}"), Some(*y)).with_attribute("death_year", "1943"),
        );
    }
    let rs = RecordSet::new(records).unwrap();
    let split = split_by_attribute(&rs, "death_year", "1942").unwrap();
    assert_eq!(split.matched.total() + split.rest.total(), 8000);

    // each side added separately to a smooth background dataset
    let background: Vec<SyntheticHistogramSpec> = (0..20)
        .map(|i| {
            SyntheticHistogramSpec::new(
                format!("bg{i:02}"),
                1000 + 450 * i as u64,
                2.0,
                3.0,
                50,
            )
            .with_origin(1880)
        })
        .collect();
    let ds = make(GeneratorSpec::new(background), 4);
    let (_, with_match) =
        augment_and_rank(&ds, vec![split.matched.clone()], FitMode::RawOls).unwrap();
    let (_, with_rest) = augment_and_rank(&ds, vec![split.rest.clone()], FitMode::RawOls).unwrap();
    let matched_score = with_match
        .iter()
        .find(|s| s.label == split.matched.label())
        .unwrap();
    let rest_score = with_rest
        .iter()
        .find(|s| s.label == split.rest.label())
        .unwrap();
    assert!(
        matched_score.d_abs > rest_score.d_abs,
        "heaped side {} should outscore smooth side {}",
        matched_score.d_abs,
        rest_score.d_abs
    );
    assert_eq!(matched_score.rank, 1);
}

#[test]
fn exclusion_then_augmentation_restores_the_ranking() {
    let ds = make(planted_outlier_spec(30, 5000, 0.3), 5);
    let model = fit_model(&ds, FitMode::RawOls).unwrap();
    let top = rank(&ds, &model).unwrap()[0].label.clone();
    let removed: BTreeSet<String> = ["planted".to_owned()].into();
    let reduced = tvor_core::exclude_lists(&ds, &removed).unwrap();
    assert_eq!(reduced.len(), ds.len() - 1);
    let planted = ds.get("planted").unwrap().clone();
    let (_, scores) = augment_and_rank(&reduced, vec![planted], FitMode::RawOls).unwrap();
    assert_eq!(scores[0].label, top);
}
