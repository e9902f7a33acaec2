use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::datasets::{
    generate_synthetic, load_csv, load_scored_csv, prepare_compas as load_compas, write_dataset_csv,
    write_true_scores_csv, CompasDimension, GroupedDataset, SyntheticConfig,
};
use crate::error::{Error, Result};
use crate::faim::{fit, incompatibility_determinant, FaimModel, ThetaWeights};
use crate::metrics::{
    confusion_metrics, delta_report, format_table, per_score_report, write_per_score_csv, write_report_csv,
    EvaluationReport, Outcome,
};
use crate::ot::{histogram_from_scores, ScoreGrid};

use super::config::{load_theta_file, parse_theta_triple, resolve_schema, RunConfig};
use super::{SchemaArgs, SynthArgs, DEFAULT_SEED, DEFAULT_STEPSIZE};
use super::{EvaluateArgs, ExportPlotsArgs, PrepareCompasArgs, RunArgs};

fn console(e: std::io::Error) -> Error {
    Error::io("<stdout>", e)
}

fn load_config(path: &Option<PathBuf>) -> Result<RunConfig> {
    path.as_deref().map_or_else(|| Ok(RunConfig::default()), RunConfig::load)
}

fn output_dir(flag: &Option<PathBuf>, config: &RunConfig) -> Result<PathBuf> {
    let dir = flag.clone().or_else(|| config.output_dir.clone()).unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    Ok(dir)
}

/// Group label made safe for use inside a file name.
pub(crate) fn file_label(group: &str) -> String {
    group.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' }).collect()
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

fn write_file(path: &Path, body: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> Result<()> {
    let mut w = create(path)?;
    body(&mut w).and_then(|_| w.flush()).map_err(|e| Error::io(path, e))
}

pub fn synth(args: &SynthArgs, out: &mut dyn Write) -> Result<()> {
    let cfg = load_config(&args.config)?;
    let synth_cfg = SyntheticConfig {
        n: args.n.or(cfg.n).unwrap_or(SyntheticConfig::default().n),
        seed: args.seed.or(cfg.seed).unwrap_or(DEFAULT_SEED),
        ..Default::default()
    };
    let data = generate_synthetic(&synth_cfg)?;
    let dir = output_dir(&args.output_dir, &cfg)?;
    let dataset_path = dir.join("synthetic.csv");
    let side_path = dir.join("synthetic_true_scores.csv");
    write_dataset_csv(&dataset_path, &data.dataset, None)?;
    write_true_scores_csv(&side_path, &data.true_scores)?;

    let ds = &data.dataset;
    let groups = ds.groups();
    let mut show = || -> std::io::Result<()> {
        writeln!(out, "individuals: {}", ds.len())?;
        for g in &groups {
            let (total, pos) = ds.group_counts(g);
            writeln!(out, "group {g}: {total} individuals, base rate {:.4}", pos as f64 / total as f64)?;
        }
        writeln!(out, "normalized threshold: {}", data.normalized_threshold)?;
        Ok(())
    };
    show().map_err(console)?;

    if let [g1, g2] = groups.as_slice() {
        let (n1, p1) = ds.group_counts(g1);
        let (n2, p2) = ds.group_counts(g2);
        let inc = incompatibility_determinant(n1, p1, n2, p2)?;
        let [r1, r2] = inc.base_rates;
        let report = confusion_metrics(&crate::metrics::outcomes(ds, None)?, data.normalized_threshold.clamp(0.0, 1.0))?;
        let mut show = || -> std::io::Result<()> {
            writeln!(out, "determinant: {}", inc.determinant)?;
            match r2 > 0.0 {
                true => writeln!(out, "base-rate ratio {g1}/{g2}: {:.2}", r1 / r2)?,
                false => writeln!(out, "base-rate ratio {g1}/{g2}: undefined")?,
            }
            match report.ratio(g1, g2) {
                Some(r) => writeln!(out, "predicted positive-rate ratio {g1}/{g2}: {r:.1}")?,
                None => writeln!(out, "predicted positive-rate ratio {g1}/{g2}: undefined")?,
            }
            Ok(())
        };
        show().map_err(console)?;
    }
    writeln!(out, "wrote {} and {}", dataset_path.display(), side_path.display()).map_err(console)
}

pub fn prepare_compas(args: &PrepareCompasArgs, out: &mut dyn Write) -> Result<()> {
    let dimension: CompasDimension = args.dimension.parse()?;
    let ds = load_compas(&args.input, dimension)?;
    let dir = output_dir(&args.output_dir, &RunConfig::default())?;
    let path = dir.join(format!("compas_{}.csv", dimension.column()));
    write_dataset_csv(&path, &ds, None)?;
    let mut show = || -> std::io::Result<()> {
        for (g, n) in ds.group_sizes() {
            writeln!(out, "group {g}: {n} individuals")?;
        }
        writeln!(out, "wrote {} ({} rows)", path.display(), ds.len())
    };
    show().map_err(console)
}

fn load_dataset(
    input: &Option<PathBuf>,
    schema: &SchemaArgs,
    normalize: bool,
    cfg: &RunConfig,
) -> Result<GroupedDataset> {
    let input = input
        .clone()
        .or_else(|| cfg.input.clone())
        .ok_or_else(|| Error::Config("no input file given (--input or `input` in the config)".into()))?;
    let schema = resolve_schema(&cfg.schema, &schema.as_config(), schema.no_id);
    load_csv(&input, &schema, normalize || cfg.normalize.unwrap_or(false))
}

fn grid_for(flag: Option<f64>, cfg: &RunConfig) -> Result<ScoreGrid> {
    ScoreGrid::new(flag.or(cfg.stepsize).unwrap_or(DEFAULT_STEPSIZE))
}

fn resolve_thetas(args: &RunArgs, cfg: &RunConfig, ds: &GroupedDataset) -> Result<BTreeMap<String, ThetaWeights>> {
    if let Some(t) = &args.theta {
        let w = parse_theta_triple(t)?;
        return Ok(ds.groups().into_iter().map(|g| (g, w)).collect());
    }
    if let Some(path) = &args.thetas {
        return load_theta_file(path);
    }
    cfg.thetas()
}

pub fn run(args: &RunArgs, out: &mut dyn Write) -> Result<()> {
    let cfg = load_config(&args.config)?;
    let grid = grid_for(args.stepsize, &cfg)?;
    let ds = load_dataset(&args.input, &args.schema, args.normalize, &cfg)?;
    let thetas = resolve_thetas(args, &cfg, &ds)?;
    let dir = output_dir(&args.output_dir, &cfg)?;

    let model = fit(&ds, &grid, &thetas)?;
    let fair = model.apply_dataset(&ds)?;

    let scores_path = dir.join("fair_scores.csv");
    write_dataset_csv(&scores_path, &ds, Some(&fair))?;
    let model_path = dir.join("model.faim");
    model.save(&model_path)?;
    for m in model.groups() {
        let path = dir.join(format!("transport_map_{}.csv", file_label(&m.group)));
        let mut w = csv::Writer::from_writer(create(&path)?);
        w.write_record(["source_bin_center", "fair_score", "defined"])?;
        for (b, center) in grid.centers().iter().enumerate() {
            let defined = m.final_map.is_defined(b);
            let target = if defined { m.final_map.target()[b] } else { *center };
            w.write_record([center.to_string(), target.to_string(), u8::from(defined).to_string()])?;
        }
        w.flush().map_err(|e| Error::io(&path, e))?;
    }

    let mut show = || -> std::io::Result<()> {
        for (g, t) in model.thetas() {
            writeln!(out, "group {g}: theta ({}, {}, {})", t.a(), t.b(), t.c())?;
        }
        writeln!(out, "wrote {} and {}", scores_path.display(), model_path.display())
    };
    show().map_err(console)
}

fn outcomes_of(path: &Path, schema: &SchemaArgs, cfg: &RunConfig) -> Result<Vec<Outcome>> {
    let schema = resolve_schema(&cfg.schema, &schema.as_config(), schema.no_id);
    Ok(load_scored_csv(path, &schema)?.iter().map(Outcome::from).collect())
}

pub fn evaluate(args: &EvaluateArgs, out: &mut dyn Write) -> Result<()> {
    let cfg = load_config(&args.config)?;
    let threshold = args
        .threshold
        .or(cfg.threshold)
        .ok_or_else(|| Error::Config("no threshold given (--threshold or `threshold` in the config)".into()))?;
    let before = outcomes_of(&args.before, &args.schema, &cfg)?;
    let after = outcomes_of(&args.after, &args.schema, &cfg)?;
    let report = delta_report(&confusion_metrics(&after, threshold)?, &confusion_metrics(&before, threshold)?)?;
    write!(out, "{}", format_table(&report)).map_err(console)?;

    let per_score = if args.per_score {
        let grid = grid_for(args.stepsize, &cfg)?;
        let b = per_score_report(&before, &grid, threshold)?;
        let a = per_score_report(&after, &grid, threshold)?;
        if b.iter().map(|s| s.0).ne(a.iter().map(|s| s.0)) {
            return Err(Error::ScopeMismatch("the two files occupy different score bins".into()));
        }
        let slices: Vec<(usize, EvaluationReport)> =
            a.iter().zip(&b).map(|((bin, ra), (_, rb))| Ok((*bin, delta_report(ra, rb)?))).collect::<Result<_>>()?;
        for (bin, r) in &slices {
            writeln!(out, "\nbin {bin} (center {})", grid.center(*bin)).map_err(console)?;
            write!(out, "{}", format_table(r)).map_err(console)?;
        }
        Some((grid, slices))
    } else {
        None
    };

    if args.output_dir.is_some() || cfg.output_dir.is_some() {
        let dir = output_dir(&args.output_dir, &cfg)?;
        let path = dir.join("report.csv");
        write_report_csv(create(&path)?, &report)?;
        let text = dir.join("report.txt");
        write_file(&text, |w| w.write_all(format_table(&report).as_bytes()))?;
        if let Some((grid, slices)) = &per_score {
            write_per_score_csv(create(&dir.join("report_per_score.csv"))?, slices, grid)?;
        }
    }
    Ok(())
}

fn class_histogram(scores: &[f64], grid: &ScoreGrid) -> Result<Vec<f64>> {
    if scores.is_empty() {
        return Ok(vec![0.0; grid.bins()]);
    }
    Ok(histogram_from_scores(scores, grid)?.mass().to_vec())
}

pub fn export_plots(args: &ExportPlotsArgs, out: &mut dyn Write) -> Result<()> {
    let model = FaimModel::load(&args.model)?;
    let cfg = RunConfig::default();
    let ds = load_dataset(&Some(args.input.clone()), &args.schema, args.normalize, &cfg)?;
    let dir = output_dir(&args.output_dir, &cfg)?;
    let grid = *model.grid();
    let fair = model.apply_dataset(&ds)?;

    for m in model.groups() {
        let label = file_label(&m.group);
        let mut columns: Vec<Vec<f64>> = Vec::new();
        for class in [None, Some(false), Some(true)] {
            let pick = |use_fair: bool| -> Vec<f64> {
                ds.records()
                    .iter()
                    .zip(&fair)
                    .filter(|(r, _)| r.group == m.group && class.map_or(true, |c| r.positive == c))
                    .map(|(r, f)| if use_fair { *f } else { r.raw_score })
                    .collect()
            };
            columns.push(class_histogram(&pick(false), &grid)?);
            columns.push(class_histogram(&pick(true), &grid)?);
        }
        write_file(&dir.join(format!("hist_{label}.tsv")), |w| {
            writeln!(w, "bin_center\traw\tfair\traw_negative\tfair_negative\traw_positive\tfair_positive")?;
            for (b, center) in grid.centers().iter().enumerate() {
                write!(w, "{center}")?;
                for col in &columns {
                    write!(w, "\t{}", col[b])?;
                }
                writeln!(w)?;
            }
            Ok(())
        })?;
        let zeros = vec![0.0; grid.bins()];
        let targets = [
            m.mu_a.mass(),
            m.mu_b.as_ref().map_or(&zeros[..], |h| h.mass()),
            m.mu_c.as_ref().map_or(&zeros[..], |h| h.mass()),
            m.mu_bar.mass(),
        ];
        write_file(&dir.join(format!("targets_{label}.tsv")), |w| {
            writeln!(w, "bin_center\tmu_a\tmu_b\tmu_c\tmu_bar")?;
            for (b, center) in grid.centers().iter().enumerate() {
                write!(w, "{center}")?;
                for t in &targets {
                    write!(w, "\t{}", t[b])?;
                }
                writeln!(w)?;
            }
            Ok(())
        })?;
        write_file(&dir.join(format!("map_{label}.tsv")), |w| {
            writeln!(w, "bin_center\tfair_score\tdefined")?;
            for (b, center) in grid.centers().iter().enumerate() {
                let defined = m.final_map.is_defined(b);
                let target = if defined { m.final_map.target()[b] } else { *center };
                writeln!(w, "{center}\t{target}\t{}", u8::from(defined))?;
            }
            Ok(())
        })?;
    }
    writeln!(out, "wrote plot tables for {} group(s) to {}", model.groups().count(), dir.display()).map_err(console)
}
