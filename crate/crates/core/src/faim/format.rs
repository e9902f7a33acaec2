//! Plain-text model file.
//!
//! ```text
//! faim-model 1
//! stepsize 0.01
//! bins 100
//! groups 2
//! group "blue"
//! theta 1.0 0.0 0.0
//! n_total 50021
//! n_positive 42070
//! lambda_pos <bins floats>
//! nu <bins floats>
//! mu_a <bins floats>
//! mu_b <bins floats> | mu_b absent
//! mu_c <bins floats> | mu_c absent
//! mu_bar <bins floats>
//! map_target <bins floats>
//! map_defined <bins 0/1 flags>
//! end
//! ```
//!
//! Floats use Rust's shortest round-trip formatting, so a save/load cycle
//! reproduces every value bit for bit. Group labels are JSON strings.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::ot::{ScoreGrid, ScoreHistogram, TransportMap};

use super::model::{FaimModel, GroupModel};
use super::ThetaWeights;

const MAGIC: &str = "faim-model";
const VERSION: u32 = 1;

fn floats(values: &[f64]) -> String {
    values.iter().map(|v| format!("{v:?}")).collect::<Vec<_>>().join(" ")
}

impl FaimModel {
    pub fn write_to<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{MAGIC} {VERSION}")?;
        writeln!(w, "stepsize {:?}", self.grid().stepsize())?;
        writeln!(w, "bins {}", self.grid().bins())?;
        writeln!(w, "groups {}", self.groups().count())?;
        for m in self.groups() {
            let theta = self.thetas()[&m.group];
            writeln!(w, "group {}", serde_json::to_string(&m.group).expect("string serializes"))?;
            writeln!(w, "theta {}", floats(&theta.as_array()))?;
            writeln!(w, "n_total {}", m.n_total)?;
            writeln!(w, "n_positive {}", m.n_positive)?;
            writeln!(w, "lambda_pos {}", floats(&m.lambda_pos))?;
            writeln!(w, "nu {}", floats(m.nu.mass()))?;
            writeln!(w, "mu_a {}", floats(m.mu_a.mass()))?;
            for (key, h) in [("mu_b", &m.mu_b), ("mu_c", &m.mu_c)] {
                match h {
                    Some(h) => writeln!(w, "{key} {}", floats(h.mass()))?,
                    None => writeln!(w, "{key} absent")?,
                }
            }
            writeln!(w, "mu_bar {}", floats(m.mu_bar.mass()))?;
            writeln!(w, "map_target {}", floats(m.final_map.target()))?;
            let flags: Vec<&str> = m.final_map.defined().iter().map(|d| if *d { "1" } else { "0" }).collect();
            writeln!(w, "map_defined {}", flags.join(" "))?;
        }
        writeln!(w, "end")
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        self.write_to(&mut w).and_then(|_| w.flush()).map_err(|e| Error::io(path, e))
    }

    pub fn read_from<R: BufRead>(reader: R) -> Result<Self> {
        let mut lines = Lines { inner: reader.lines(), line: 0 };
        let header = lines.next_line()?;
        if header != format!("{MAGIC} {VERSION}") {
            return Err(lines.error(format!("expected {MAGIC:?} version {VERSION}, found {header:?}")));
        }
        let stepsize: f64 = lines.scalar("stepsize")?;
        let bins: usize = lines.scalar("bins")?;
        let grid = ScoreGrid::new(stepsize).map_err(|e| lines.error(e.to_string()))?;
        if grid.bins() != bins {
            return Err(lines.error(format!("stepsize {stepsize} implies {} bins, file says {bins}", grid.bins())));
        }
        let count: usize = lines.scalar("groups")?;

        let mut groups = BTreeMap::new();
        let mut thetas = BTreeMap::new();
        for _ in 0..count {
            let raw_label = lines.value("group")?;
            let label: String =
                serde_json::from_str(&raw_label).map_err(|e| lines.error(format!("bad group label: {e}")))?;
            let t = lines.vector("theta", 3)?;
            let theta = ThetaWeights::new(t[0], t[1], t[2]).map_err(|e| lines.error(e.to_string()))?;
            let n_total: u64 = lines.scalar("n_total")?;
            let n_positive: u64 = lines.scalar("n_positive")?;
            let lambda_pos = lines.vector("lambda_pos", bins)?;
            let nu = lines.histogram("nu", grid)?;
            let mu_a = lines.histogram("mu_a", grid)?;
            let mu_b = lines.optional_histogram("mu_b", grid)?;
            let mu_c = lines.optional_histogram("mu_c", grid)?;
            let mu_bar = lines.histogram("mu_bar", grid)?;
            let target = lines.vector("map_target", bins)?;
            let defined = lines
                .value("map_defined")?
                .split_whitespace()
                .map(|f| match f {
                    "1" => Ok(true),
                    "0" => Ok(false),
                    other => Err(lines.error(format!("bad flag {other:?}"))),
                })
                .collect::<Result<Vec<bool>>>()?;
            let final_map = TransportMap::from_parts(grid, target, defined).map_err(|e| lines.error(e.to_string()))?;
            thetas.insert(label.clone(), theta);
            groups.insert(
                label.clone(),
                GroupModel { group: label, nu, lambda_pos, mu_a, mu_b, mu_c, mu_bar, final_map, n_total, n_positive },
            );
        }
        if lines.next_line()? != "end" {
            return Err(lines.error("expected \"end\"".into()));
        }
        if groups.len() != count {
            return Err(lines.error("duplicate group label".into()));
        }
        FaimModel::new(grid, groups, thetas)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_from(BufReader::new(file))
    }
}

struct Lines<I> {
    inner: I,
    line: usize,
}

impl<I: Iterator<Item = std::io::Result<String>>> Lines<I> {
    fn error(&self, message: String) -> Error {
        Error::ModelFormat { line: self.line, message }
    }

    fn next_line(&mut self) -> Result<String> {
        self.line += 1;
        match self.inner.next() {
            Some(Ok(l)) => Ok(l.trim_end().to_string()),
            Some(Err(e)) => Err(self.error(e.to_string())),
            None => Err(self.error("unexpected end of file".into())),
        }
    }

    fn value(&mut self, key: &str) -> Result<String> {
        let line = self.next_line()?;
        match line.split_once(' ') {
            Some((k, rest)) if k == key => Ok(rest.to_string()),
            _ if line == key => Ok(String::new()),
            _ => Err(self.error(format!("expected key {key:?}, found {line:?}"))),
        }
    }

    fn scalar<T: std::str::FromStr>(&mut self, key: &str) -> Result<T> {
        let v = self.value(key)?;
        v.trim().parse().map_err(|_| self.error(format!("bad value for {key}: {v:?}")))
    }

    fn vector(&mut self, key: &str, len: usize) -> Result<Vec<f64>> {
        let v = self.value(key)?;
        let values = v
            .split_whitespace()
            .map(|f| f.parse::<f64>().map_err(|_| self.error(format!("bad float {f:?} in {key}"))))
            .collect::<Result<Vec<f64>>>()?;
        if values.len() != len {
            return Err(self.error(format!("{key} has {} values, expected {len}", values.len())));
        }
        Ok(values)
    }

    fn histogram(&mut self, key: &str, grid: ScoreGrid) -> Result<ScoreHistogram> {
        let mass = self.vector(key, grid.bins())?;
        ScoreHistogram::from_mass(grid, mass).map_err(|e| self.error(format!("{key}: {e}")))
    }

    fn optional_histogram(&mut self, key: &str, grid: ScoreGrid) -> Result<Option<ScoreHistogram>> {
        let v = self.value(key)?;
        if v == "absent" {
            return Ok(None);
        }
        let mass = v
            .split_whitespace()
            .map(|f| f.parse::<f64>().map_err(|_| self.error(format!("bad float {f:?} in {key}"))))
            .collect::<Result<Vec<f64>>>()?;
        ScoreHistogram::from_mass(grid, mass).map(Some).map_err(|e| self.error(format!("{key}: {e}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datasets::{GroupedDataset, Record};
    use crate::faim::fit;

    fn model() -> FaimModel {
        let records: Vec<Record> = (0..300)
            .map(|i| Record {
                id: i.to_string(),
                group: if i % 2 == 0 { "x \"quoted\"".into() } else { "y".into() },
                raw_score: ((i * 37) % 101) as f64 / 100.0,
                positive: (i * 13) % 7 < 3,
            })
            .collect();
        let ds = GroupedDataset::new(records).unwrap();
        let grid = ScoreGrid::new(0.05).unwrap();
        let mut thetas = BTreeMap::new();
        thetas.insert("x \"quoted\"".to_string(), ThetaWeights::new(0.2, 0.5, 0.3).unwrap());
        thetas.insert("y".to_string(), ThetaWeights::equal());
        fit(&ds, &grid, &thetas).unwrap()
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let m = model();
        let mut buf = Vec::new();
        m.write_to(&mut buf).unwrap();
        let back = FaimModel::read_from(buf.as_slice()).unwrap();
        assert_eq!(back, m);
        let mut again = Vec::new();
        back.write_to(&mut again).unwrap();
        assert_eq!(buf, again);
    }

    #[test]
    fn rejects_corrupt_files() {
        let mut buf = Vec::new();
        model().write_to(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();

        let wrong_version = text.replacen("faim-model 1", "faim-model 2", 1);
        assert!(matches!(FaimModel::read_from(wrong_version.as_bytes()), Err(Error::ModelFormat { line: 1, .. })));

        let truncated: String = text.lines().take(12).map(|l| format!("{l}\n")).collect();
        assert!(FaimModel::read_from(truncated.as_bytes()).is_err());

        let bad_bins = text.replacen("bins 20", "bins 21", 1);
        assert!(matches!(FaimModel::read_from(bad_bins.as_bytes()), Err(Error::ModelFormat { line: 3, .. })));
    }
}
