use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

use super::{min_max_normalize, GroupedDataset, Record, TrueScoreRow};

/// Column names to read from an input CSV. With `id: None` rows are
/// identified by their 1-based data row number.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsvSchema {
    pub id: Option<String>,
    pub group: String,
    pub score: String,
    pub label: String,
}

impl Default for CsvSchema {
    fn default() -> Self {
        Self {
            id: Some("id".into()),
            group: "group".into(),
            score: "raw_score".into(),
            label: "ground_truth".into(),
        }
    }
}

/// A record plus the fair score written by `faim run`, when present.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredRecord {
    pub record: Record,
    pub fair_score: Option<f64>,
}

impl ScoredRecord {
    /// The score a classifier should threshold: the fair score when the file
    /// carries one, else the raw score.
    pub fn prediction_score(&self) -> f64 {
        self.fair_score.unwrap_or(self.record.raw_score)
    }
}

struct Columns {
    id: Option<usize>,
    group: usize,
    score: usize,
    label: usize,
    fair: Option<usize>,
}

fn locate(headers: &csv::StringRecord, schema: &CsvSchema) -> Result<Columns> {
    let find = |name: &str| {
        headers.iter().position(|h| h.trim() == name).ok_or_else(|| Error::MissingColumn(name.to_string()))
    };
    Ok(Columns {
        id: schema.id.as_deref().map(find).transpose()?,
        group: find(&schema.group)?,
        score: find(&schema.score)?,
        label: find(&schema.label)?,
        fair: headers.iter().position(|h| h.trim() == "fair_score"),
    })
}

fn field<'a>(row: &'a csv::StringRecord, idx: usize, line: u64, name: &str) -> Result<&'a str> {
    row.get(idx)
        .map(str::trim)
        .ok_or_else(|| Error::Parse { line, message: format!("missing field {name:?}") })
}

fn parse_label(raw: &str, line: u64) -> Result<bool> {
    match raw {
        "1" => Ok(true),
        "0" => Ok(false),
        other => Err(Error::Parse { line, message: format!("ground truth must be 0 or 1, got {other:?}") }),
    }
}

fn parse_score(raw: &str, line: u64, what: &str) -> Result<f64> {
    raw.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::Parse { line, message: format!("unparsable {what} {raw:?}") })
}

fn read_rows<R: Read>(reader: R, schema: &CsvSchema) -> Result<Vec<ScoredRecord>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let cols = locate(rdr.headers()?, schema)?;
    let mut out = Vec::new();
    for (n, row) in rdr.records().enumerate() {
        let row = row?;
        let line = row.position().map_or(n as u64 + 2, |p| p.line());
        let id = match cols.id {
            Some(i) => field(&row, i, line, "id")?.to_string(),
            None => (n + 1).to_string(),
        };
        let group = field(&row, cols.group, line, &schema.group)?.to_string();
        let raw_score = parse_score(field(&row, cols.score, line, &schema.score)?, line, "score")?;
        let positive = parse_label(field(&row, cols.label, line, &schema.label)?, line)?;
        let fair_score = match cols.fair {
            Some(i) => match field(&row, i, line, "fair_score")? {
                "" => None,
                raw => Some(parse_score(raw, line, "fair score")?),
            },
            None => None,
        };
        out.push(ScoredRecord { record: Record { id, group, raw_score, positive }, fair_score });
    }
    Ok(out)
}

/// Parse a grouped dataset from CSV. With `normalize`, scores are min-max
/// rescaled onto `[0, 1]` over the whole file; otherwise they must already
/// lie there.
pub fn load_csv_reader<R: Read>(reader: R, schema: &CsvSchema, normalize: bool) -> Result<GroupedDataset> {
    let mut records: Vec<Record> = read_rows(reader, schema)?.into_iter().map(|r| r.record).collect();
    if normalize && !records.is_empty() {
        let scores: Vec<f64> = records.iter().map(|r| r.raw_score).collect();
        for (r, s) in records.iter_mut().zip(min_max_normalize(&scores)) {
            r.raw_score = s;
        }
    }
    GroupedDataset::new(records)
}

pub fn load_csv(path: &Path, schema: &CsvSchema, normalize: bool) -> Result<GroupedDataset> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    load_csv_reader(file, schema, normalize)
}

/// Rows of a dataset CSV together with any `fair_score` column.
pub fn load_scored_csv(path: &Path, schema: &CsvSchema) -> Result<Vec<ScoredRecord>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let rows = read_rows(file, schema)?;
    // validates ids and score range
    GroupedDataset::new(rows.iter().map(|r| r.record.clone()).collect())?;
    if let Some(bad) = rows.iter().filter_map(|r| r.fair_score).find(|s| !(0.0..=1.0).contains(s)) {
        return Err(Error::UnnormalizedInput(bad));
    }
    Ok(rows)
}

fn create(path: &Path) -> Result<csv::Writer<File>> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::Writer::from_writer(file))
}

fn finish<W: Write>(mut w: csv::Writer<W>, path: &Path) -> Result<()> {
    w.flush().map_err(|e| Error::io(path, e))
}

/// Columns `id,group,raw_score[,fair_score],ground_truth`.
pub fn write_dataset_csv(path: &Path, dataset: &GroupedDataset, fair: Option<&[f64]>) -> Result<()> {
    let mut w = create(path)?;
    if fair.is_some() {
        w.write_record(["id", "group", "raw_score", "fair_score", "ground_truth"])?;
    } else {
        w.write_record(["id", "group", "raw_score", "ground_truth"])?;
    }
    for (i, r) in dataset.records().iter().enumerate() {
        let label = if r.positive { "1" } else { "0" };
        let raw = r.raw_score.to_string();
        match fair {
            Some(f) => w.write_record([r.id.as_str(), &r.group, &raw, &f[i].to_string(), label])?,
            None => w.write_record([r.id.as_str(), &r.group, &raw, label])?,
        }
    }
    finish(w, path)
}

/// Columns `id,group,true_score,predicted_score`.
pub fn write_true_scores_csv(path: &Path, rows: &[TrueScoreRow]) -> Result<()> {
    let mut w = create(path)?;
    w.write_record(["id", "group", "true_score", "predicted_score"])?;
    for r in rows {
        w.write_record([r.id.as_str(), &r.group, &r.true_score.to_string(), &r.predicted_score.to_string()])?;
    }
    finish(w, path)
}
