//! CSV and plot-data writers. Rows are written in `(n, replicate)` order and
//! floats use the shortest round-trip representation, so reruns are
//! byte-identical.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use csv::Writer;

use crate::cv::CvComparison;
use crate::error::{io_err, SimResult};
use crate::study::StudyResult;
use crate::surface::SurfaceReport;
use crate::tail::TailStudy;

fn writer(dir: &Path, name: &str) -> SimResult<(Writer<fs::File>, PathBuf)> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let path = dir.join(name);
    let file = fs::File::create(&path).map_err(io_err(&path))?;
    Ok((Writer::from_writer(file), path))
}

fn finish(mut w: Writer<fs::File>, path: PathBuf) -> SimResult<PathBuf> {
    w.flush().map_err(io_err(&path))?;
    Ok(path)
}

/// Writes `<pair>_replicates.csv`, `<pair>_summary.csv`, `<pair>_slopes.csv`
/// and `<pair>_plot.dat`; returns the paths in that order.
pub fn write_study(res: &StudyResult, dir: &Path) -> SimResult<Vec<PathBuf>> {
    let pair = &res.pair;
    let mut out = Vec::new();

    let (mut w, path) = writer(dir, &format!("{pair}_replicates.csv"))?;
    w.write_record(["pair", "n", "rep", "h1", "h2", "err_boot_min", "seed"])?;
    for r in &res.rows {
        w.write_record([
            pair.clone(),
            r.n.to_string(),
            r.rep.to_string(),
            r.h1.to_string(),
            r.h2.to_string(),
            r.err_boot_min.to_string(),
            r.seed.to_string(),
        ])?;
    }
    out.push(finish(w, path)?);

    let (mut w, path) = writer(dir, &format!("{pair}_summary.csv"))?;
    w.write_record(["pair", "n", "mean_neglog_h1", "mean_neglog_h2", "sd_neglog_h1", "sd_neglog_h2"])?;
    for s in &res.summary {
        w.write_record([
            pair.clone(),
            s.n.to_string(),
            s.mean_neglog_h1.to_string(),
            s.mean_neglog_h2.to_string(),
            s.sd_neglog_h1.to_string(),
            s.sd_neglog_h2.to_string(),
        ])?;
    }
    out.push(finish(w, path)?);

    let (mut w, path) = writer(dir, &format!("{pair}_slopes.csv"))?;
    w.write_record(["pair", "which", "slope", "intercept"])?;
    for fit in [&res.fit_h1, &res.fit_h2] {
        w.write_record([pair.clone(), fit.which.to_string(), fit.slope.to_string(), fit.intercept.to_string()])?;
    }
    out.push(finish(w, path)?);

    let path = dir.join(format!("{pair}_plot.dat"));
    let mut text = String::from(
        "# log_n mean_neglog_h1 mean_neglog_h2 fit_h1 fit_h2 ref_slope_1/5_h1 ref_slope_1/9_h1 ref_slope_1/5_h2 ref_slope_1/9_h2\n",
    );
    let refs = [
        res.fit_h1.reference_line(0.2),
        res.fit_h1.reference_line(1.0 / 9.0),
        res.fit_h2.reference_line(0.2),
        res.fit_h2.reference_line(1.0 / 9.0),
    ];
    for s in &res.summary {
        let x = (s.n as f64).ln();
        let mut cols = vec![x, s.mean_neglog_h1, s.mean_neglog_h2, res.fit_h1.predict(x), res.fit_h2.predict(x)];
        cols.extend(refs.iter().map(|(slope, icpt)| icpt + slope * x));
        let line: Vec<String> = cols.iter().map(f64::to_string).collect();
        text.push_str(&line.join(" "));
        text.push('\n');
    }
    fs::File::create(&path).and_then(|mut f| f.write_all(text.as_bytes())).map_err(io_err(&path))?;
    out.push(path);
    Ok(out)
}

pub fn write_tail(res: &TailStudy, dir: &Path) -> SimResult<PathBuf> {
    let (mut w, path) = writer(dir, &format!("tail_{}_{}.csv", res.alpha, res.beta))?;
    w.write_record(["alpha", "beta", "x0", "n", "h", "tail_mass", "se", "scaled"])?;
    for r in &res.rows {
        w.write_record([
            res.alpha.to_string(),
            res.beta.to_string(),
            res.x0.to_string(),
            r.n.to_string(),
            r.h.to_string(),
            r.tail_mass.to_string(),
            r.se.to_string(),
            r.scaled.to_string(),
        ])?;
    }
    finish(w, path)
}

pub fn write_cv(res: &CvComparison, dir: &Path) -> SimResult<PathBuf> {
    let (mut w, path) = writer(dir, &format!("{}_cvcheck.csv", res.pair))?;
    w.write_record(["pair", "n", "rep", "boot_h1", "boot_h2", "cv_h1", "cv_h2", "seed"])?;
    for r in &res.rows {
        w.write_record([
            res.pair.clone(),
            res.n.to_string(),
            r.rep.to_string(),
            r.boot_h1.to_string(),
            r.boot_h2.to_string(),
            r.cv_h1.to_string(),
            r.cv_h2.to_string(),
            r.seed.to_string(),
        ])?;
    }
    finish(w, path)
}

pub fn write_surface(res: &SurfaceReport, dir: &Path) -> SimResult<PathBuf> {
    let (mut w, path) = writer(dir, &format!("{}_surface_n{}.csv", res.pair, res.n))?;
    w.write_record(["pair", "n", "h1", "h2", "err_boot", "err_cv"])?;
    let s = &res.selection.surface;
    for (i, h1) in s.h1_grid.iter().enumerate() {
        for (j, h2) in s.h2_grid.iter().enumerate() {
            w.write_record([
                res.pair.clone(),
                res.n.to_string(),
                h1.to_string(),
                h2.to_string(),
                s.at(i, j).to_string(),
                res.cv.at(i, j).to_string(),
            ])?;
        }
    }
    finish(w, path)
}
