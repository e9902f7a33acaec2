use std::fs::File;
use std::io::Read;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

use super::{GroupedDataset, Record};

/// Grid step for COMPAS runs: ten bins, one per decile under
/// [`decile_to_score`].
pub const COMPAS_STEPSIZE: f64 = 0.1;

/// Normalized image of decile 5, the lowest "high risk" score.
pub const COMPAS_HIGH_RISK_THRESHOLD: f64 = 4.0 / 9.0;

/// Demographic attribute used to group COMPAS defendants.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompasDimension {
    Sex,
    Race,
    AgeCat,
}

impl CompasDimension {
    pub fn column(&self) -> &'static str {
        match self {
            CompasDimension::Sex => "sex",
            CompasDimension::Race => "race",
            CompasDimension::AgeCat => "age_cat",
        }
    }
}

impl FromStr for CompasDimension {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sex" => Ok(CompasDimension::Sex),
            "race" => Ok(CompasDimension::Race),
            "age_cat" | "age" => Ok(CompasDimension::AgeCat),
            other => Err(Error::Config(format!("unknown group dimension {other:?} (expected sex, race or age_cat)"))),
        }
    }
}

/// Deciles 1..=10 onto `[0, 1]` as `(d - 1) / 9`.
pub fn decile_to_score(decile: u8) -> Result<f64> {
    if !(1..=10).contains(&decile) {
        return Err(Error::Config(format!("decile {decile} outside 1..=10")));
    }
    Ok(f64::from(decile - 1) / 9.0)
}

/// Inverse of [`decile_to_score`] for scores on the decile lattice.
pub fn score_to_decile(score: f64) -> u8 {
    ((score * 9.0).round() as u8 + 1).min(10)
}

const REQUIRED: [&str; 5] = ["decile_score", "two_year_recid", "sex", "race", "age_cat"];

pub fn prepare_compas_reader<R: Read>(reader: R, dimension: CompasDimension) -> Result<GroupedDataset> {
    let mut rdr = csv::Reader::from_reader(reader);
    let headers = rdr.headers()?.clone();
    let col = |name: &str| {
        headers.iter().position(|h| h == name).ok_or_else(|| Error::MissingColumn(name.to_string()))
    };
    for name in REQUIRED {
        col(name)?;
    }
    let decile_col = col("decile_score")?;
    let recid_col = col("two_year_recid")?;
    let group_col = col(dimension.column())?;
    let id_col = headers.iter().position(|h| h == "id");

    let mut records = Vec::new();
    for (n, row) in rdr.records().enumerate() {
        let row = row?;
        let line = row.position().map_or(n as u64 + 2, |p| p.line());
        let get = |i: usize| row.get(i).map(str::trim).unwrap_or("");
        let decile: u8 = get(decile_col)
            .parse()
            .map_err(|_| Error::Parse { line, message: format!("unparsable decile_score {:?}", get(decile_col)) })?;
        let raw_score = decile_to_score(decile).map_err(|e| Error::Parse { line, message: e.to_string() })?;
        let positive = match get(recid_col) {
            "1" => true,
            "0" => false,
            other => {
                return Err(Error::Parse { line, message: format!("two_year_recid must be 0 or 1, got {other:?}") })
            }
        };
        let mut group = get(group_col).to_string();
        if dimension == CompasDimension::Race && (group == "Native American" || group == "Asian") {
            group = "Other".to_string();
        }
        let id = id_col.map_or_else(|| (n + 1).to_string(), |i| get(i).to_string());
        records.push(Record { id, group, raw_score, positive });
    }
    GroupedDataset::new(records)
}

/// Prepare the published ProPublica two-year export for grouping by `dimension`.
pub fn prepare_compas(path: &Path, dimension: CompasDimension) -> Result<GroupedDataset> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    prepare_compas_reader(file, dimension)
}
