//! One function per subcommand: thin orchestration from ingested inputs to
//! report blocks. Every block is emitted in a fixed field order.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use serde_json::Value;
use tvor_core::{
    ages_from_birth_years, augment_and_rank, bias_report, chi_square_uniform, debias_iterative,
    discretize_beta, estimate_expected_dtv, exclude_lists, fit_model, glivenko_cantelli_curve,
    iqr_outliers, largest_subset_slope, last_digit_profile, near_uniform_fixture, rank,
    renormalize_demo, split_by_attribute, substitute_closest, threshold_sweep, whipple_index,
    Dataset, DigitProfile, FitMode, GeneratorSpec, Histogram, RecordSet, RegressionLine,
    ScoreRecord, SyntheticHistogramSpec, TvorModel, WhippleWindow,
};

use crate::cli::{
    BiasArgs, ChisqArgs, DigitsArgs, ExcludeArgs, FitArgs, IqrArgs, PlotArgs, RankArgs,
    ScoreArgs, SimulateCmd, SplitArgs, SubstituteArgs, SweepArgs, WhippleArgs,
};
use crate::config::RunConfig;
use crate::io;
use crate::report::{jnum, jobj, Report};
use crate::svg;

fn jstr(s: &str) -> Value {
    Value::String(s.to_owned())
}

fn model_block(m: &TvorModel) -> Value {
    jobj(vec![
        ("a", jnum(m.a)),
        ("b", jnum(m.b)),
        ("fit_mode", jstr(m.fit_mode.as_str())),
        ("n_fitted", Value::from(m.n_fitted as u64)),
    ])
}

fn score_row(s: &ScoreRecord) -> Value {
    jobj(vec![
        ("label", jstr(&s.label)),
        ("n", Value::from(s.n)),
        ("dtv", Value::from(s.dtv)),
        ("expected", jnum(s.expected)),
        ("d_signed", jnum(s.d_signed)),
        ("d_abs", jnum(s.d_abs)),
        ("rank", Value::from(s.rank as u64)),
    ])
}

fn line_block(l: &RegressionLine) -> Vec<(&'static str, Value)> {
    vec![
        ("slope", jnum(l.slope)),
        ("intercept", jnum(l.intercept)),
        ("r", jnum(l.r)),
        ("n", Value::from(l.n as u64)),
    ]
}

fn ingest_block_a(note: &io::HistogramIngest) -> Value {
    jobj(vec![
        ("lists", Value::from(note.lists as u64)),
        ("rows", Value::from(note.rows as u64)),
        ("dropped_by_filter", Value::from(note.dropped_by_filter as u64)),
    ])
}

fn ingest_block_b(note: &io::RecordIngest) -> Value {
    jobj(vec![
        ("records", Value::from(note.records as u64)),
        ("with_birth_year", Value::from(note.with_birth_year as u64)),
        ("without_birth_year", Value::from(note.without_birth_year as u64)),
        ("with_alternatives", Value::from(note.with_alternatives as u64)),
    ])
}

fn digit_profile_block(p: &DigitProfile) -> Value {
    jobj(vec![
        (
            "counts",
            Value::Array(p.counts().iter().map(|&c| Value::from(c)).collect()),
        ),
        ("total", Value::from(p.total())),
    ])
}

fn apply_mode(cfg: &mut RunConfig, mode: &Option<String>) -> Result<()> {
    if let Some(m) = mode {
        cfg.fit_mode = m.parse::<FitMode>().map_err(|e| anyhow!("{e}"))?;
    }
    Ok(())
}

fn apply_min_size(cfg: &mut RunConfig, min_size: &Option<u64>) {
    if let Some(v) = min_size {
        cfg.min_size_filter = *v;
    }
}

pub fn fit(cfg: &mut RunConfig, args: &FitArgs) -> Result<Report> {
    apply_mode(cfg, &args.mode)?;
    apply_min_size(cfg, &args.min_size);
    let (ds, note) = io::ingest_histograms(&args.input, cfg.min_size_filter)?;
    let model = fit_model(&ds, cfg.fit_mode)?;
    let mut report = Report::new("fit", cfg.echo());
    report.insert("ingest", ingest_block_a(&note));
    report.insert("model", model_block(&model));
    Ok(report)
}

pub fn score(cfg: &mut RunConfig, args: &ScoreArgs) -> Result<Report> {
    apply_mode(cfg, &args.mode)?;
    apply_min_size(cfg, &args.min_size);
    let (ds, note) = io::ingest_histograms(&args.input, cfg.min_size_filter)?;
    let model = fit_model(&ds, cfg.fit_mode)?;
    let h = ds
        .get(&args.list)
        .ok_or_else(|| anyhow!("list `{}` not in the dataset (after size filtering)", args.list))?;
    let s = tvor_core::score(&model, h)?;
    let mut report = Report::new("score", cfg.echo());
    report.insert("ingest", ingest_block_a(&note));
    report.insert("model", model_block(&model));
    report.insert("score", score_row(&s));
    Ok(report)
}

pub fn rank_cmd(cfg: &mut RunConfig, args: &RankArgs) -> Result<Report> {
    apply_mode(cfg, &args.mode)?;
    apply_min_size(cfg, &args.min_size);
    let (ds, note) = io::ingest_histograms(&args.input, cfg.min_size_filter)?;
    let model = fit_model(&ds, cfg.fit_mode)?;
    let scores = rank(&ds, &model)?;
    let mut report = Report::new("rank", cfg.echo());
    report.insert("ingest", ingest_block_a(&note));
    report.insert("model", model_block(&model));
    report.insert(
        "scores",
        Value::Array(scores.iter().map(score_row).collect()),
    );
    Ok(report)
}

pub fn bias(cfg: &mut RunConfig, args: &BiasArgs) -> Result<Report> {
    apply_mode(cfg, &args.mode)?;
    apply_min_size(cfg, &args.min_size);
    let (ds, note) = io::ingest_histograms(&args.input, cfg.min_size_filter)?;
    let model = fit_model(&ds, cfg.fit_mode)?;
    let scores = rank(&ds, &model)?;
    let mut report = Report::new("bias", cfg.echo());
    report.insert("ingest", ingest_block_a(&note));
    report.insert("model", model_block(&model));
    for (key, use_signed) in [("signed", true), ("absolute", false)] {
        let b = bias_report(&scores, use_signed)?;
        let mut fields = vec![("convention", jstr(b.convention.as_str()))];
        fields.extend(line_block(&b.line));
        fields.push(("correlation", jnum(b.correlation)));
        report.insert(key, jobj(fields));
    }
    if args.debias {
        let db = debias_iterative(&scores, cfg.debias_max_iter, cfg.debias_tol)?;
        report.insert(
            "debias",
            jobj(vec![
                ("a1", jnum(db.a1)),
                ("b1", jnum(db.b1)),
                ("iterations", Value::from(db.iterations as u64)),
                ("top_label_before", jstr(&scores[0].label)),
                ("top_label_after", jstr(&db.adjusted_scores[0].label)),
            ]),
        );
    }
    if let Some(k) = args.largest {
        let line = largest_subset_slope(&scores, k)?;
        let mut fields = vec![("k", Value::from(k as u64))];
        fields.extend(line_block(&line));
        report.insert("largest_subset", jobj(fields));
    }
    if args.renormalize_demo {
        let absolute = bias_report(&scores, false)?;
        let demo = renormalize_demo(&scores, &absolute.line)?;
        report.insert(
            "renormalize_demo",
            jobj(vec![
                ("note", jstr(demo.note)),
                (
                    "scores",
                    Value::Array(demo.scores.iter().map(score_row).collect()),
                ),
            ]),
        );
    }
    Ok(report)
}

pub fn sweep(cfg: &mut RunConfig, args: &SweepArgs) -> Result<Report> {
    apply_mode(cfg, &args.mode)?;
    apply_min_size(cfg, &args.min_size);
    let (ds, note) = io::ingest_histograms(&args.input, cfg.min_size_filter)?;
    let sweep = threshold_sweep(&ds, cfg.fit_mode)?;
    let mut report = Report::new("sweep", cfg.echo());
    report.insert("ingest", ingest_block_a(&note));
    let entries: Vec<Value> = sweep
        .entries
        .iter()
        .map(|e| {
            jobj(vec![
                ("threshold", Value::from(e.threshold)),
                ("included", Value::from(e.included as u64)),
                (
                    "top_label",
                    e.top_label.as_deref().map(jstr).unwrap_or(Value::Null),
                ),
            ])
        })
        .collect();
    report.insert("sweep", jobj(vec![("entries", Value::Array(entries))]));
    Ok(report)
}

pub fn iqr(cfg: &mut RunConfig, args: &IqrArgs) -> Result<Report> {
    apply_mode(cfg, &args.mode)?;
    apply_min_size(cfg, &args.min_size);
    if let Some(k) = args.multiplier {
        cfg.iqr_multiplier = k;
    }
    let (ds, note) = io::ingest_histograms(&args.input, cfg.min_size_filter)?;
    let model = fit_model(&ds, cfg.fit_mode)?;
    let scores = rank(&ds, &model)?;
    let selected: Vec<&ScoreRecord> = match args.top {
        Some(k) => {
            let mut by_size: Vec<&ScoreRecord> = scores.iter().collect();
            by_size.sort_by(|x, y| y.n.cmp(&x.n).then_with(|| x.label.cmp(&y.label)));
            by_size.truncate(k);
            by_size
        }
        None => scores.iter().collect(),
    };
    let values: Vec<(String, f64)> = selected
        .iter()
        .map(|s| (s.label.clone(), s.d_abs))
        .collect();
    let verdict = iqr_outliers(&values, cfg.iqr_multiplier)?;
    let mut report = Report::new("iqr", cfg.echo());
    report.insert("ingest", ingest_block_a(&note));
    report.insert("model", model_block(&model));
    report.insert(
        "iqr",
        jobj(vec![
            ("source", jstr("d_abs")),
            (
                "top",
                args.top.map(|k| Value::from(k as u64)).unwrap_or(Value::Null),
            ),
            ("count", Value::from(values.len() as u64)),
            ("multiplier", jnum(cfg.iqr_multiplier)),
            ("q1", jnum(verdict.q1)),
            ("q3", jnum(verdict.q3)),
            ("iqr", jnum(verdict.iqr)),
            ("upper_fence", jnum(verdict.upper_fence)),
            (
                "outliers",
                Value::Array(verdict.outlier_labels.iter().map(|l| jstr(l)).collect()),
            ),
        ]),
    );
    Ok(report)
}

fn parse_scales(arg: &str) -> Result<Vec<u64>> {
    let mut scales = Vec::new();
    for part in arg.split(',') {
        let c: u64 = part
            .trim()
            .parse()
            .with_context(|| format!("bad scale `{part}`"))?;
        if c == 0 {
            bail!("scale 0 is not usable");
        }
        scales.push(c);
    }
    if scales.is_empty() {
        bail!("no scales given");
    }
    Ok(scales)
}

pub fn chisq(cfg: &mut RunConfig, args: &ChisqArgs) -> Result<Report> {
    let scales = parse_scales(&args.scale)?;
    let (ds, note) = io::ingest_histograms(&args.input, 1)?;
    let targets: Vec<&Histogram> = match &args.list {
        Some(label) => vec![ds
            .get(label)
            .ok_or_else(|| anyhow!("list `{label}` not in the dataset"))?],
        None => ds.histograms().iter().collect(),
    };
    let mut rows = Vec::new();
    for h in targets {
        for &c in &scales {
            let scaled = h.scaled(c);
            let test = chi_square_uniform(&scaled)?;
            rows.push(jobj(vec![
                ("label", jstr(h.label())),
                ("scale", Value::from(c)),
                ("total", Value::from(scaled.total())),
                ("statistic", jnum(test.statistic)),
                ("dof", Value::from(test.dof as u64)),
                ("p_value", jnum(test.p_value)),
            ]));
        }
    }
    let mut report = Report::new("chisq", cfg.echo());
    report.insert("ingest", ingest_block_a(&note));
    report.insert("chisq", Value::Array(rows));
    Ok(report)
}

fn parse_window(arg: &str) -> Result<WhippleWindow> {
    let (lo, hi) = arg
        .split_once(':')
        .ok_or_else(|| anyhow!("window must be LO:HI, got `{arg}`"))?;
    Ok(WhippleWindow {
        lo: lo.trim().parse().context("bad window low bound")?,
        hi: hi.trim().parse().context("bad window high bound")?,
    })
}

/// Years per list from either input format, in input order.
fn years_per_list(
    input: &Option<PathBuf>,
    records: &Option<PathBuf>,
    list: &Option<String>,
) -> Result<(Vec<(String, Vec<i64>)>, Value)> {
    let (mut groups, ingest): (Vec<(String, Vec<i64>)>, Value) = match (input, records) {
        (Some(path), None) => {
            let (ds, note) = io::ingest_histograms(path, 1)?;
            (
                ds.histograms()
                    .iter()
                    .map(|h| (h.label().to_owned(), h.to_years()))
                    .collect(),
                ingest_block_a(&note),
            )
        }
        (None, Some(path)) => {
            let (rs, note) = io::ingest_records(path)?;
            let (ds, _) = io::dataset_from_records(&rs, 1)?;
            (
                ds.histograms()
                    .iter()
                    .map(|h| (h.label().to_owned(), h.to_years()))
                    .collect(),
                ingest_block_b(&note),
            )
        }
        _ => bail!("exactly one of --input (histograms) or --records must be given"),
    };
    if let Some(label) = list {
        groups.retain(|(l, _)| l == label);
        if groups.is_empty() {
            bail!("list `{label}` not present in the input");
        }
    }
    Ok((groups, ingest))
}

pub fn whipple(cfg: &mut RunConfig, args: &WhippleArgs) -> Result<Report> {
    if let Some(y) = args.reference_year {
        cfg.reference_year = y;
    }
    if let Some(w) = &args.window {
        cfg.whipple_window = parse_window(w)?;
    }
    let (groups, ingest) = years_per_list(&args.input, &args.records, &args.list)?;
    let mut rows = Vec::new();
    for (label, years) in &groups {
        let ages = ages_from_birth_years(years, cfg.reference_year);
        match whipple_index(&ages, cfg.whipple_window) {
            Ok(r) => rows.push(jobj(vec![
                ("label", jstr(label)),
                ("ages_in_window", Value::from(r.ages_in_window)),
                ("index", jnum(r.index)),
                ("classification", jstr(r.classification.as_str())),
            ])),
            Err(e) if args.list.is_none() => rows.push(jobj(vec![
                ("label", jstr(label)),
                ("ages_in_window", Value::from(0u64)),
                ("index", Value::Null),
                ("classification", Value::Null),
                ("error", jstr(&e.to_string())),
            ])),
            Err(e) => return Err(e.into()),
        }
    }
    let mut report = Report::new("whipple", cfg.echo());
    report.insert("ingest", ingest);
    report.insert("whipple", Value::Array(rows));
    Ok(report)
}

pub fn digits(cfg: &mut RunConfig, args: &DigitsArgs) -> Result<Report> {
    let (groups, ingest) = years_per_list(&args.input, &args.records, &args.list)?;
    let rows: Vec<Value> = groups
        .iter()
        .map(|(label, years)| {
            let p = last_digit_profile(years);
            jobj(vec![
                ("label", jstr(label)),
                (
                    "counts",
                    Value::Array(p.counts().iter().map(|&c| Value::from(c)).collect()),
                ),
                ("total", Value::from(p.total())),
            ])
        })
        .collect();
    let mut report = Report::new("digits", cfg.echo());
    report.insert("ingest", ingest);
    report.insert("digits", Value::Array(rows));
    Ok(report)
}

pub fn substitute(cfg: &mut RunConfig, args: &SubstituteArgs) -> Result<Report> {
    let (rs, note) = io::ingest_records(&args.records)?;
    let (subset, rest): (Vec<_>, Vec<_>) = match &args.list {
        Some(label) => rs.records().iter().cloned().partition(|r| {
            r.attributes.get(io::LIST_ATTRIBUTE).map(String::as_str) == Some(label.as_str())
        }),
        None => (rs.records().to_vec(), Vec::new()),
    };
    if subset.is_empty() {
        bail!("no records selected for substitution");
    }
    let (substituted, sub_report) = substitute_closest(&RecordSet::new(subset)?);
    if let Some(path) = &args.write_records {
        // untouched records keep their position after the substituted block
        let mut all = substituted.records().to_vec();
        all.extend(rest);
        let merged = RecordSet::new(all)?;
        std::fs::write(path, io::export_records(&merged)?)
            .with_context(|| format!("writing {}", path.display()))?;
    }
    let before = sub_report.digit_profile_before.counts();
    let after = sub_report.digit_profile_after.counts();
    let delta: Vec<Value> = (0..10)
        .map(|d| Value::from(after[d] as i64 - before[d] as i64))
        .collect();
    let h = &sub_report.abs_diff_histogram;
    let mut report = Report::new("substitute", cfg.echo());
    report.insert("ingest", ingest_block_b(&note));
    report.insert(
        "substitution",
        jobj(vec![
            ("substituted_count", Value::from(sub_report.substituted_count)),
            (
                "skipped_no_birth_year",
                Value::from(sub_report.skipped_no_birth_year),
            ),
            ("tie_broken", Value::from(sub_report.tie_broken)),
            (
                "digit_profile_before",
                digit_profile_block(&sub_report.digit_profile_before),
            ),
            (
                "digit_profile_after",
                digit_profile_block(&sub_report.digit_profile_after),
            ),
            ("digit_delta", Value::Array(delta)),
            (
                "abs_diff_histogram",
                jobj(vec![
                    ("origin", Value::from(h.origin())),
                    (
                        "counts",
                        Value::Array(h.counts().iter().map(|&c| Value::from(c)).collect()),
                    ),
                    ("total", Value::from(h.total())),
                ]),
            ),
        ]),
    );
    Ok(report)
}

fn histogram_summary(h: &Histogram) -> Value {
    jobj(vec![
        ("label", jstr(h.label())),
        ("n", Value::from(h.total())),
        ("dtv", Value::from(h.dtv())),
    ])
}

pub fn split(cfg: &mut RunConfig, args: &SplitArgs) -> Result<Report> {
    apply_mode(cfg, &args.mode)?;
    apply_min_size(cfg, &args.min_size);
    let (rs, note) = io::ingest_records(&args.records)?;
    let outcome = split_by_attribute(&rs, &args.key, &args.value)?;
    let mut report = Report::new("split", cfg.echo());
    report.insert("ingest", ingest_block_b(&note));
    report.insert(
        "split",
        jobj(vec![
            ("key", jstr(&args.key)),
            ("value", jstr(&args.value)),
            ("matched", histogram_summary(&outcome.matched)),
            ("rest", histogram_summary(&outcome.rest)),
            ("matched_records", Value::from(outcome.matched_records as u64)),
            ("rest_records", Value::from(outcome.rest_records as u64)),
            (
                "missing_attribute",
                Value::from(outcome.missing_attribute as u64),
            ),
        ]),
    );
    if let Some(path) = &args.augment {
        let (ds, _) = io::ingest_histograms(path, cfg.min_size_filter)?;
        let mut blocks = Vec::new();
        for (key, h) in [("matched", &outcome.matched), ("rest", &outcome.rest)] {
            let (_, scores) = augment_and_rank(&ds, vec![h.clone()], cfg.fit_mode)?;
            let row = scores
                .iter()
                .find(|s| s.label == h.label())
                .ok_or_else(|| {
                    anyhow!(
                        "histogram `{}` fell below the size filter of the augmented dataset",
                        h.label()
                    )
                })?;
            blocks.push((key, score_row(row)));
        }
        report.insert(
            "augmented",
            jobj(vec![
                ("dataset_size", Value::from(ds.len() as u64)),
                (blocks[0].0, blocks[0].1.clone()),
                (blocks[1].0, blocks[1].1.clone()),
            ]),
        );
    }
    Ok(report)
}

fn parse_u64_list(arg: &str) -> Result<Vec<u64>> {
    arg.split(',')
        .map(|p| {
            p.trim()
                .parse::<u64>()
                .with_context(|| format!("bad size `{p}`"))
        })
        .collect()
}

#[derive(serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecFileEntry {
    label: String,
    size: u64,
    #[serde(default = "one")]
    alpha: f64,
    #[serde(default = "one")]
    beta: f64,
    #[serde(default = "fifty")]
    bins: usize,
    #[serde(default)]
    origin: i64,
    #[serde(default)]
    heap_fraction: f64,
}

fn one() -> f64 {
    1.0
}

fn fifty() -> usize {
    50
}

#[derive(serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecFile {
    #[serde(default = "one_u64")]
    min_size_filter: u64,
    histograms: Vec<SpecFileEntry>,
}

fn one_u64() -> u64 {
    1
}

fn write_dataset(ds: &Dataset, path: &Path) -> Result<()> {
    std::fs::write(path, io::export_histograms(ds)?)
        .with_context(|| format!("writing {}", path.display()))
}

pub fn simulate(cfg: &mut RunConfig, cmd: &SimulateCmd) -> Result<Report> {
    match cmd {
        SimulateCmd::Dataset { spec, out_data, .. } => {
            let text = std::fs::read_to_string(spec)
                .with_context(|| format!("reading {}", spec.display()))?;
            let file: SpecFile = serde_json::from_str(&text)
                .with_context(|| format!("parsing {}", spec.display()))?;
            let mut generator = GeneratorSpec::new(
                file.histograms
                    .into_iter()
                    .map(|e| SyntheticHistogramSpec {
                        label: e.label,
                        size: e.size,
                        alpha: e.alpha,
                        beta: e.beta,
                        bins: e.bins,
                        origin: e.origin,
                        heap_fraction: e.heap_fraction,
                    })
                    .collect(),
            );
            generator.min_size_filter = file.min_size_filter;
            let ds = tvor_core::make_synthetic_dataset(&generator, cfg.rng_seed)?;
            if let Some(path) = out_data {
                write_dataset(&ds, path)?;
            }
            let rows: Vec<Value> = ds.histograms().iter().map(histogram_summary).collect();
            let mut report = Report::new("simulate", cfg.echo());
            report.insert("dataset", Value::Array(rows));
            Ok(report)
        }
        SimulateCmd::Gc {
            alpha,
            beta,
            bins,
            sizes,
            trials,
            ..
        } => {
            let d = discretize_beta(*alpha, *beta, *bins)?;
            let sizes = parse_u64_list(sizes)?;
            let curve = glivenko_cantelli_curve(&d, &sizes, *trials, cfg.rng_seed)?;
            let points: Vec<Value> = curve
                .points
                .iter()
                .map(|p| {
                    jobj(vec![
                        ("n", Value::from(p.n)),
                        ("mean_abs_deviation", jnum(p.mean_abs_deviation)),
                    ])
                })
                .collect();
            let mut report = Report::new("simulate", cfg.echo());
            report.insert(
                "gc_curve",
                jobj(vec![
                    ("alpha", jnum(*alpha)),
                    ("beta", jnum(*beta)),
                    ("bins", Value::from(*bins as u64)),
                    ("trials", Value::from(*trials as u64)),
                    ("theoretical_dtv", jnum(d.theoretical_dtv())),
                    ("points", Value::Array(points)),
                ]),
            );
            Ok(report)
        }
        SimulateCmd::ExpectedDtv {
            alpha,
            beta,
            bins,
            size,
            trials,
            ..
        } => {
            let d = discretize_beta(*alpha, *beta, *bins)?;
            let estimate = estimate_expected_dtv(&d, *size, *trials, cfg.rng_seed)?;
            let mut report = Report::new("simulate", cfg.echo());
            report.insert(
                "dtv_estimate",
                jobj(vec![
                    ("alpha", jnum(*alpha)),
                    ("beta", jnum(*beta)),
                    ("bins", Value::from(*bins as u64)),
                    ("n", Value::from(estimate.n)),
                    ("trials", Value::from(estimate.trials as u64)),
                    ("mean", jnum(estimate.mean)),
                    ("std_error", jnum(estimate.std_error)),
                    ("theoretical_dtv", jnum(d.theoretical_dtv())),
                ]),
            );
            Ok(report)
        }
        SimulateCmd::NearUniform {
            total,
            bins,
            ripple,
            out_data,
            ..
        } => {
            let h = near_uniform_fixture(*total, *bins, *ripple, cfg.rng_seed)?;
            if let Some(path) = out_data {
                let ds = Dataset::new(vec![h.clone()], 1)?;
                write_dataset(&ds, path)?;
            }
            let mut report = Report::new("simulate", cfg.echo());
            report.insert(
                "fixture",
                jobj(vec![
                    ("label", jstr(h.label())),
                    ("total", Value::from(h.total())),
                    ("bins", Value::from(h.bin_count() as u64)),
                    ("ripple", jnum(*ripple)),
                    (
                        "counts",
                        Value::Array(h.counts().iter().map(|&c| Value::from(c)).collect()),
                    ),
                ]),
            );
            Ok(report)
        }
    }
}

pub fn exclude(cfg: &mut RunConfig, args: &ExcludeArgs) -> Result<Report> {
    apply_mode(cfg, &args.mode)?;
    apply_min_size(cfg, &args.min_size);
    let labels: BTreeSet<String> = match (&args.labels, &args.labels_file) {
        (Some(list), None) => list
            .split(',')
            .map(|s| s.trim().to_owned())
            .filter(|s| !s.is_empty())
            .collect(),
        (None, Some(path)) => std::fs::read_to_string(path)
            .with_context(|| format!("reading {}", path.display()))?
            .lines()
            .map(|l| l.trim().to_owned())
            .filter(|l| !l.is_empty())
            .collect(),
        _ => bail!("exactly one of --labels or --labels-file must be given"),
    };
    let (ds, note) = io::ingest_histograms(&args.input, cfg.min_size_filter)?;
    let reduced = exclude_lists(&ds, &labels)?;
    if let Some(path) = &args.out_data {
        write_dataset(&reduced, path)?;
    }
    let mut report = Report::new("exclude", cfg.echo());
    report.insert("ingest", ingest_block_a(&note));
    report.insert(
        "exclude",
        jobj(vec![
            (
                "removed",
                Value::Array(labels.iter().map(|l| jstr(l)).collect()),
            ),
            ("remaining", Value::from(reduced.len() as u64)),
        ]),
    );
    if args.rank {
        let model = fit_model(&reduced, cfg.fit_mode)?;
        let scores = rank(&reduced, &model)?;
        report.insert("model", model_block(&model));
        report.insert(
            "scores",
            Value::Array(scores.iter().map(score_row).collect()),
        );
    }
    Ok(report)
}

// --- plot ---------------------------------------------------------------

fn require_block<'v>(report: &'v Value, name: &str) -> Result<&'v Value> {
    report
        .get(name)
        .ok_or_else(|| anyhow!("report has no `{name}` block"))
}

fn as_f64(v: &Value) -> Result<f64> {
    v.as_f64().ok_or_else(|| anyhow!("expected a number, got {v}"))
}

enum ArtifactFormat {
    Svg,
    Csv,
}

fn artifact_format(path: &Path) -> Result<ArtifactFormat> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("svg") => Ok(ArtifactFormat::Svg),
        Some("csv") => Ok(ArtifactFormat::Csv),
        _ => bail!(
            "cannot infer artifact format from `{}` (use a .svg or .csv extension)",
            path.display()
        ),
    }
}

pub fn plot(args: &PlotArgs) -> Result<()> {
    let text = std::fs::read_to_string(&args.report)
        .with_context(|| format!("reading {}", args.report.display()))?;
    let report: Value = serde_json::from_str(&text)
        .with_context(|| format!("parsing {}", args.report.display()))?;
    let out = &args.out;
    let format = artifact_format(out)?;
    let artifact = match args.kind.as_str() {
        "dtv-vs-n" => {
            let scores = require_block(&report, "scores")?
                .as_array()
                .ok_or_else(|| anyhow!("`scores` is not an array"))?;
            let model = require_block(&report, "model")?;
            let a = as_f64(model.get("a").ok_or_else(|| anyhow!("model lacks `a`"))?)?;
            let b = as_f64(model.get("b").ok_or_else(|| anyhow!("model lacks `b`"))?)?;
            let mut points = Vec::new();
            for s in scores {
                let n = as_f64(s.get("n").ok_or_else(|| anyhow!("score row lacks `n`"))?)?;
                let dtv = as_f64(s.get("dtv").ok_or_else(|| anyhow!("score row lacks `dtv`"))?)?;
                points.push((n, dtv));
            }
            let mut ns: Vec<f64> = points.iter().map(|p| p.0).collect();
            ns.sort_by(f64::total_cmp);
            ns.dedup();
            let curve: Vec<(f64, f64)> =
                ns.iter().map(|&n| (n, a * n + b * n.sqrt())).collect();
            match format {
                ArtifactFormat::Svg => svg::dtv_vs_n(&points, &curve, "DTV vs N"),
                ArtifactFormat::Csv => {
                    let mut s = String::from("n,dtv,expected\n");
                    for &(n, dtv) in &points {
                        s.push_str(&format!(
                            "{},{},{}\n",
                            n as u64,
                            dtv as u64,
                            crate::report::fmt_f64(a * n + b * n.sqrt())
                        ));
                    }
                    s
                }
            }
        }
        "digit-profile" => {
            let series: Vec<(String, [u64; 10])> = if let Some(block) = report.get("substitution")
            {
                let take = |key: &str| -> Result<[u64; 10]> {
                    let counts = block
                        .get(key)
                        .and_then(|b| b.get("counts"))
                        .and_then(|c| c.as_array())
                        .ok_or_else(|| anyhow!("substitution block lacks `{key}`"))?;
                    let mut out = [0u64; 10];
                    for (i, v) in counts.iter().enumerate().take(10) {
                        out[i] = v.as_u64().ok_or_else(|| anyhow!("bad count"))?;
                    }
                    Ok(out)
                };
                vec![
                    ("before".to_owned(), take("digit_profile_before")?),
                    ("after".to_owned(), take("digit_profile_after")?),
                ]
            } else {
                let digits = require_block(&report, "digits")?
                    .as_array()
                    .ok_or_else(|| anyhow!("`digits` is not an array"))?;
                let chosen: Vec<&Value> = match &args.label {
                    Some(label) => digits
                        .iter()
                        .filter(|d| d.get("label").and_then(|l| l.as_str()) == Some(label))
                        .collect(),
                    None => digits.iter().take(1).collect(),
                };
                if chosen.is_empty() {
                    bail!("no matching digit profile in the report");
                }
                let mut out = Vec::new();
                for d in chosen {
                    let label = d
                        .get("label")
                        .and_then(|l| l.as_str())
                        .unwrap_or("digits")
                        .to_owned();
                    let counts = d
                        .get("counts")
                        .and_then(|c| c.as_array())
                        .ok_or_else(|| anyhow!("digit row lacks `counts`"))?;
                    let mut arr = [0u64; 10];
                    for (i, v) in counts.iter().enumerate().take(10) {
                        arr[i] = v.as_u64().ok_or_else(|| anyhow!("bad count"))?;
                    }
                    out.push((label, arr));
                }
                out
            };
            match format {
                ArtifactFormat::Svg => svg::digit_profile(&series, "last-digit profile"),
                ArtifactFormat::Csv => {
                    let mut s = String::from("digit");
                    for (name, _) in &series {
                        s.push(',');
                        s.push_str(name);
                    }
                    s.push('\n');
                    for digit in 0..10 {
                        s.push_str(&digit.to_string());
                        for (_, counts) in &series {
                            s.push_str(&format!(",{}", counts[digit]));
                        }
                        s.push('\n');
                    }
                    s
                }
            }
        }
        "sweep-table" => {
            let entries = require_block(&report, "sweep")?
                .get("entries")
                .and_then(|e| e.as_array())
                .ok_or_else(|| anyhow!("`sweep` block lacks `entries`"))?;
            if matches!(format, ArtifactFormat::Svg) {
                bail!("sweep-table supports only csv output");
            }
            let mut writer = csv::WriterBuilder::new().from_writer(Vec::new());
            writer.write_record(["threshold", "included", "top_label"])?;
            for e in entries {
                writer.write_record([
                    e.get("threshold")
                        .and_then(|v| v.as_u64())
                        .map(|v| v.to_string())
                        .unwrap_or_default(),
                    e.get("included")
                        .and_then(|v| v.as_u64())
                        .map(|v| v.to_string())
                        .unwrap_or_default(),
                    e.get("top_label")
                        .and_then(|v| v.as_str())
                        .unwrap_or("")
                        .to_owned(),
                ])?;
            }
            String::from_utf8(writer.into_inner()?)?
        }
        "gc-curve" => {
            let points = require_block(&report, "gc_curve")?
                .get("points")
                .and_then(|p| p.as_array())
                .ok_or_else(|| anyhow!("`gc_curve` block lacks `points`"))?;
            let mut pts = Vec::new();
            for p in points {
                let n = as_f64(p.get("n").ok_or_else(|| anyhow!("point lacks `n`"))?)?;
                let dev = as_f64(
                    p.get("mean_abs_deviation")
                        .ok_or_else(|| anyhow!("point lacks `mean_abs_deviation`"))?,
                )?;
                pts.push((n, dev));
            }
            match format {
                ArtifactFormat::Svg => svg::gc_curve(&pts, "Glivenko-Cantelli convergence"),
                ArtifactFormat::Csv => {
                    let mut s = String::from("n,mean_abs_deviation\n");
                    for &(n, dev) in &pts {
                        s.push_str(&format!("{},{}\n", n as u64, crate::report::fmt_f64(dev)));
                    }
                    s
                }
            }
        }
        other => bail!("unknown plot kind `{other}` (dtv-vs-n, digit-profile, sweep-table, gc-curve)"),
    };
    std::fs::write(out, artifact).with_context(|| format!("writing {}", out.display()))?;
    Ok(())
}
