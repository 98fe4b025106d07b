//! CSV ingestion and export.
//!
//! Format A (histograms): header `list_id,year,count`, one bin per row.
//! Interior years absent from the file are stored as explicit zero bins.
//! Export is canonical: lists in dataset order, every bin of the contiguous
//! range written, so export -> ingest -> export is byte-stable.
//!
//! Format B (records): header `id,list_id,birth_year,alt_years` plus any
//! number of `attr:*` columns. `birth_year` may be empty (unknown);
//! `alt_years` is a semicolon-joined integer list; `attr:`-prefixed columns
//! populate the attribute map and `list_id` is kept as the `list_id`
//! attribute.

use std::collections::BTreeSet;
use std::path::Path;

use anyhow::{bail, Context, Result};
use tvor_core::{Dataset, Histogram, PersonRecord, RecordSet};

pub const LIST_ATTRIBUTE: &str = "list_id";

/// Ingestion notes echoed into reports.
#[derive(Debug, Clone, Default)]
pub struct HistogramIngest {
    pub lists: usize,
    pub rows: usize,
    pub dropped_by_filter: usize,
}

#[derive(Debug, Clone, Default)]
pub struct RecordIngest {
    pub records: usize,
    pub with_birth_year: usize,
    pub without_birth_year: usize,
    pub with_alternatives: usize,
}

fn header_index(headers: &csv::StringRecord, name: &str, path: &Path) -> Result<usize> {
    headers
        .iter()
        .position(|h| h == name)
        .with_context(|| format!("{}: header row lacks column `{name}`", path.display()))
}

/// Read a format-A histogram CSV into a size-filtered dataset.
pub fn ingest_histograms(path: &Path, min_size: u64) -> Result<(Dataset, HistogramIngest)> {
    let mut reader = csv::ReaderBuilder::new()
        .from_path(path)
        .with_context(|| format!("opening {}", path.display()))?;
    let headers = reader.headers()?.clone();
    let col_list = header_index(&headers, "list_id", path)?;
    let col_year = header_index(&headers, "year", path)?;
    let col_count = header_index(&headers, "count", path)?;

    // first-appearance list order, contiguous bins filled later
    let mut order: Vec<String> = Vec::new();
    let mut bins: Vec<std::collections::BTreeMap<i64, u64>> = Vec::new();
    let mut index: std::collections::HashMap<String, usize> = std::collections::HashMap::new();
    let mut rows = 0usize;
    for (i, row) in reader.records().enumerate() {
        let line = i + 2; // header is line 1
        let row = row.with_context(|| format!("{} line {line}", path.display()))?;
        let list = row
            .get(col_list)
            .with_context(|| format!("{} line {line}: missing list_id", path.display()))?
            .to_owned();
        let year: i64 = row
            .get(col_year)
            .unwrap_or("")
            .trim()
            .parse()
            .with_context(|| format!("{} line {line}: bad year", path.display()))?;
        let count: i64 = row
            .get(col_count)
            .unwrap_or("")
            .trim()
            .parse()
            .with_context(|| format!("{} line {line}: bad count", path.display()))?;
        if count < 0 {
            bail!("{} line {line}: negative count {count}", path.display());
        }
        let slot = *index.entry(list.clone()).or_insert_with(|| {
            order.push(list);
            bins.push(std::collections::BTreeMap::new());
            bins.len() - 1
        });
        if bins[slot].insert(year, count as u64).is_some() {
            bail!(
                "{} line {line}: duplicate (list_id, year) = ({}, {year})",
                path.display(),
                order[slot]
            );
        }
        rows += 1;
    }
    if order.is_empty() {
        bail!("{}: no histogram rows", path.display());
    }
    let mut histograms = Vec::with_capacity(order.len());
    for (label, map) in order.iter().zip(&bins) {
        let (&lo, _) = map.first_key_value().expect("non-empty list");
        let (&hi, _) = map.last_key_value().expect("non-empty list");
        let mut counts = vec![0u64; (hi - lo) as usize + 1];
        for (&year, &count) in map {
            counts[(year - lo) as usize] = count;
        }
        histograms.push(Histogram::new(label.clone(), lo, counts)?);
    }
    let lists = histograms.len();
    let dataset = Dataset::new(histograms, min_size)?;
    let note = HistogramIngest {
        lists,
        rows,
        dropped_by_filter: dataset.dropped_by_filter(),
    };
    Ok((dataset, note))
}

/// Canonical format-A export (all bins, dataset order).
pub fn export_histograms(ds: &Dataset) -> Result<String> {
    let mut writer = csv::WriterBuilder::new().from_writer(Vec::new());
    writer.write_record(["list_id", "year", "count"])?;
    for h in ds.histograms() {
        for (key, &count) in h.keys().zip(h.counts()) {
            writer.write_record([h.label(), &key.to_string(), &count.to_string()])?;
        }
    }
    Ok(String::from_utf8(writer.into_inner()?)?)
}

/// Read a format-B record CSV.
pub fn ingest_records(path: &Path) -> Result<(RecordSet, RecordIngest)> {
    let mut reader = csv::ReaderBuilder::new()
        .from_path(path)
        .with_context(|| format!("opening {}", path.display()))?;
    let headers = reader.headers()?.clone();
    let col_id = header_index(&headers, "id", path)?;
    let col_list = header_index(&headers, "list_id", path)?;
    let col_birth = header_index(&headers, "birth_year", path)?;
    let col_alts = header_index(&headers, "alt_years", path)?;
    let attr_cols: Vec<(usize, String)> = headers
        .iter()
        .enumerate()
        .filter_map(|(i, h)| {
            h.strip_prefix("attr:")
                .map(|name| (i, name.to_owned()))
        })
        .collect();

    let mut records = Vec::new();
    let mut note = RecordIngest::default();
    for (i, row) in reader.records().enumerate() {
        let line = i + 2;
        let row = row.with_context(|| format!("{} line {line}", path.display()))?;
        let id = row
            .get(col_id)
            .with_context(|| format!("{} line {line}: missing id", path.display()))?
            .to_owned();
        if id.is_empty() {
            bail!("{} line {line}: empty id", path.display());
        }
        let birth = row.get(col_birth).unwrap_or("").trim();
        let birth_year = if birth.is_empty() {
            None
        } else {
            Some(birth.parse::<i64>().with_context(|| {
                format!("{} line {line}: bad birth_year `{birth}`", path.display())
            })?)
        };
        let mut record = PersonRecord::new(id, birth_year);
        let alts = row.get(col_alts).unwrap_or("").trim();
        if !alts.is_empty() {
            let mut set = BTreeSet::new();
            for part in alts.split(';') {
                let part = part.trim();
                if part.is_empty() {
                    continue;
                }
                set.insert(part.parse::<i64>().with_context(|| {
                    format!("{} line {line}: bad alt_years entry `{part}`", path.display())
                })?);
            }
            record.alternative_years = set;
        }
        record
            .attributes
            .insert(LIST_ATTRIBUTE.to_owned(), row.get(col_list).unwrap_or("").to_owned());
        for (col, name) in &attr_cols {
            let value = row.get(*col).unwrap_or("");
            if !value.is_empty() {
                record.attributes.insert(name.clone(), value.to_owned());
            }
        }
        match record.birth_year {
            Some(_) => note.with_birth_year += 1,
            None => note.without_birth_year += 1,
        }
        if !record.alternative_years.is_empty() {
            note.with_alternatives += 1;
        }
        records.push(record);
    }
    note.records = records.len();
    let rs = RecordSet::new(records).context("building record set")?;
    Ok((rs, note))
}

/// Canonical format-B export: record order preserved, attribute columns
/// (minus list_id) sorted by name, alternatives ascending.
pub fn export_records(rs: &RecordSet) -> Result<String> {
    let mut attr_names: BTreeSet<String> = BTreeSet::new();
    for r in rs.records() {
        for key in r.attributes.keys() {
            if key != LIST_ATTRIBUTE {
                attr_names.insert(key.clone());
            }
        }
    }
    let mut writer = csv::WriterBuilder::new().from_writer(Vec::new());
    let mut header = vec![
        "id".to_owned(),
        "list_id".to_owned(),
        "birth_year".to_owned(),
        "alt_years".to_owned(),
    ];
    header.extend(attr_names.iter().map(|n| format!("attr:{n}")));
    writer.write_record(&header)?;
    for r in rs.records() {
        let mut row = vec![
            r.id.clone(),
            r.attributes.get(LIST_ATTRIBUTE).cloned().unwrap_or_default(),
            r.birth_year.map(|y| y.to_string()).unwrap_or_default(),
            r.alternative_years
                .iter()
                .map(|y| y.to_string())
                .collect::<Vec<_>>()
                .join(";"),
        ];
        for name in &attr_names {
            row.push(r.attributes.get(name).cloned().unwrap_or_default());
        }
        writer.write_record(&row)?;
    }
    Ok(String::from_utf8(writer.into_inner()?)?)
}

/// Group records by their list attribute and render each group's birth years
/// as a histogram. Records without a birth year are excluded and counted.
pub fn dataset_from_records(rs: &RecordSet, min_size: u64) -> Result<(Dataset, usize)> {
    let mut order: Vec<String> = Vec::new();
    let mut years: Vec<Vec<i64>> = Vec::new();
    let mut index: std::collections::HashMap<String, usize> = std::collections::HashMap::new();
    let mut missing_years = 0usize;
    for r in rs.records() {
        let list = r
            .attributes
            .get(LIST_ATTRIBUTE)
            .cloned()
            .unwrap_or_default();
        let slot = *index.entry(list.clone()).or_insert_with(|| {
            order.push(list);
            years.push(Vec::new());
            years.len() - 1
        });
        match r.birth_year {
            Some(y) => years[slot].push(y),
            None => missing_years += 1,
        }
    }
    let mut histograms = Vec::new();
    for (label, ys) in order.iter().zip(&years) {
        if ys.is_empty() {
            continue; // a list with no usable years cannot form a histogram
        }
        histograms.push(Histogram::from_years(ys, label.clone())?);
    }
    if histograms.is_empty() {
        bail!("no list in the record set carries any birth year");
    }
    Ok((Dataset::new(histograms, min_size)?, missing_years))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_temp(name: &str, contents: &str) -> std::path::PathBuf {
        let dir = std::env::temp_dir().join("tvor_io_tests");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join(name);
        let mut f = std::fs::File::create(&path).unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        path
    }

    #[test]
    fn format_a_round_trips_with_gap_filling() {
        let path = write_temp(
            "a1.csv",
            "list_id,year,count\nl1,1940,2\nl1,1942,1\nl2,1900,5\n",
        );
        let (ds, note) = ingest_histograms(&path, 1).unwrap();
        assert_eq!(note.lists, 2);
        assert_eq!(note.rows, 3);
        let h = ds.get("l1").unwrap();
        assert_eq!(h.counts(), &[2, 0, 1]);
        assert_eq!(h.total(), 3);
        // canonical export is a fixed point of ingest -> export
        let exported = export_histograms(&ds).unwrap();
        let path2 = write_temp("a2.csv", &exported);
        let (ds2, _) = ingest_histograms(&path2, 1).unwrap();
        assert_eq!(export_histograms(&ds2).unwrap(), exported);
        assert_eq!(ds2.histograms(), ds.histograms());
    }

    #[test]
    fn format_a_rejects_bad_rows() {
        let dup = write_temp("dup.csv", "list_id,year,count\nl,1900,1\nl,1900,2\n");
        let err = ingest_histograms(&dup, 1).unwrap_err().to_string();
        assert!(err.contains("line 3"), "{err}");
        assert!(err.contains("duplicate"), "{err}");

        let neg = write_temp("neg.csv", "list_id,year,count\nl,1900,-3\n");
        let err = ingest_histograms(&neg, 1).unwrap_err().to_string();
        assert!(err.contains("negative count"), "{err}");

        let bad = write_temp("bad.csv", "list_id,year,count\nl,abc,3\n");
        let err = ingest_histograms(&bad, 1).unwrap_err().to_string();
        assert!(err.contains("line 2"), "{err}");

        let no_header = write_temp("nh.csv", "a,b,c\nl,1900,1\n");
        assert!(ingest_histograms(&no_header, 1).is_err());
    }

    #[test]
    fn format_b_parses_alternatives_and_attributes() {
        let path = write_temp(
            "b1.csv",
            "id,list_id,birth_year,alt_years,attr:death_year,attr:disputed\n\
             p1,jl,1910,1900;1912,1942,true\n\
             p2,jl,,1920,,\n\
             p3,other,1930,,1943,\n",
        );
        let (rs, note) = ingest_records(&path).unwrap();
        assert_eq!(note.records, 3);
        assert_eq!(note.with_birth_year, 2);
        assert_eq!(note.without_birth_year, 1);
        assert_eq!(note.with_alternatives, 2);
        let p1 = &rs.records()[0];
        assert_eq!(p1.birth_year, Some(1910));
        assert_eq!(p1.alternative_years, BTreeSet::from([1900, 1912]));
        assert_eq!(p1.attributes.get("death_year").map(String::as_str), Some("1942"));
        assert_eq!(p1.attributes.get("disputed").map(String::as_str), Some("true"));
        assert_eq!(p1.attributes.get(LIST_ATTRIBUTE).map(String::as_str), Some("jl"));
        // p2 has no death_year attribute at all
        assert!(!rs.records()[1].attributes.contains_key("death_year"));

        let exported = export_records(&rs).unwrap();
        let path2 = write_temp("b2.csv", &exported);
        let (rs2, _) = ingest_records(&path2).unwrap();
        assert_eq!(rs2, rs);
        assert_eq!(export_records(&rs2).unwrap(), exported);
    }

    #[test]
    fn format_b_rejects_duplicate_ids_and_bad_years() {
        let dup = write_temp(
            "bdup.csv",
            "id,list_id,birth_year,alt_years\np,l,1900,\np,l,1901,\n",
        );
        assert!(ingest_records(&dup).is_err());
        let bad = write_temp(
            "bbad.csv",
            "id,list_id,birth_year,alt_years\np,l,19x0,\n",
        );
        let err = ingest_records(&bad).unwrap_err().to_string();
        assert!(err.contains("line 2"), "{err}");
    }

    #[test]
    fn records_group_into_dataset_by_list() {
        let path = write_temp(
            "b3.csv",
            "id,list_id,birth_year,alt_years\n\
             p1,l1,1900,\np2,l1,1902,\np3,l2,1910,\np4,l2,,\n",
        );
        let (rs, _) = ingest_records(&path).unwrap();
        let (ds, missing) = dataset_from_records(&rs, 1).unwrap();
        assert_eq!(missing, 1);
        assert_eq!(ds.len(), 2);
        assert_eq!(ds.get("l1").unwrap().total(), 2);
        assert_eq!(ds.get("l2").unwrap().total(), 1);
    }
}
