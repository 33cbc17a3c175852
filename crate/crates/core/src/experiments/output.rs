//! Result files: `losses.csv`, `weights.csv`, `regret.csv`, `meta.txt` and
//! a few optional extras.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use super::scenario::ResultBundle;
use crate::error::{Error, Result};
use crate::point::ParameterPoint;
use crate::regret::{best_segmentation_from_costs, cumulative_difference, tracking_decomposition};

/// Trailing mean over the last `min(t, window)` values.
pub fn moving_average(series: &[f64], window: usize) -> Vec<f64> {
    let window = window.max(1);
    let mut out = Vec::with_capacity(series.len());
    let mut acc = 0.0;
    for (t, v) in series.iter().enumerate() {
        acc += v;
        if t >= window {
            acc -= series[t - window];
        }
        out.push(acc / (t + 1).min(window) as f64);
    }
    out
}

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    Ok(csv::Writer::from_path(path)?)
}

fn fmt(v: f64) -> String {
    format!("{v:e}")
}

/// Writes every result file into `dir` (created if needed) and returns the
/// paths written.
pub fn write_bundle(
    dir: &Path,
    bundle: &ResultBundle,
    extra_meta: &[(String, String)],
    ma_window: usize,
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let t_labels = &bundle.time_labels;

    let path = dir.join("losses.csv");
    let mut w = csv_writer(&path)?;
    let mut header = vec!["t".to_string()];
    header.extend(bundle.labels.iter().cloned());
    header.push("dfs".into());
    if bundle.truth_losses.is_some() {
        header.push("truth".into());
    }
    w.write_record(&header)?;
    for (k, row) in bundle.expert_losses.iter().enumerate() {
        let mut rec = vec![t_labels[k].clone()];
        rec.extend(row.iter().map(|v| fmt(*v)));
        rec.push(fmt(bundle.dfs_losses[k]));
        if let Some(tl) = &bundle.truth_losses {
            rec.push(fmt(tl[k]));
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    written.push(path);

    let path = dir.join("losses_ma.csv");
    let mut w = csv_writer(&path)?;
    w.write_record(&header[..bundle.labels.len() + 2])?;
    let smoothed: Vec<Vec<f64>> = (0..bundle.labels.len())
        .map(|i| moving_average(&bundle.expert_trace(i), ma_window))
        .chain(std::iter::once(moving_average(&bundle.dfs_losses, ma_window)))
        .collect();
    for k in 0..bundle.horizon() {
        let mut rec = vec![t_labels[k].clone()];
        rec.extend(smoothed.iter().map(|s| fmt(s[k])));
        w.write_record(&rec)?;
    }
    w.flush()?;
    written.push(path);

    let path = dir.join("weights.csv");
    let mut w = csv_writer(&path)?;
    w.write_record(&header[..bundle.labels.len() + 1])?;
    for (k, row) in bundle.weights.iter().enumerate() {
        let mut rec = vec![t_labels[k].clone()];
        rec.extend(row.iter().map(|v| fmt(*v)));
        w.write_record(&rec)?;
    }
    w.flush()?;
    written.push(path);

    let path = dir.join("regret.csv");
    let mut w = csv_writer(&path)?;
    match &bundle.truth_regret {
        Some(r) => {
            let mut h = vec!["t".to_string(), "dfs".into()];
            for l in &bundle.labels {
                h.push(l.clone());
                h.push(format!("bound[{l}]"));
            }
            w.write_record(&h)?;
            for (k, label) in t_labels.iter().enumerate().take(bundle.horizon()) {
                let mut rec = vec![label.clone(), fmt(r.dfs[k])];
                for i in 0..bundle.labels.len() {
                    rec.push(fmt(r.experts[i][k]));
                    rec.push(fmt(r.bounds[i][k]));
                }
                w.write_record(&rec)?;
            }
        }
        None => {
            // No ground truth: DFS against each expert.
            let mut h = vec!["t".to_string()];
            h.extend(bundle.labels.iter().map(|l| format!("dfs_vs[{l}]")));
            w.write_record(&h)?;
            let diffs = (0..bundle.labels.len())
                .map(|i| cumulative_difference(&bundle.dfs_losses, &bundle.expert_trace(i)))
                .collect::<Result<Vec<_>>>()?;
            for k in 0..bundle.horizon() {
                let mut rec = vec![t_labels[k].clone()];
                rec.extend(diffs.iter().map(|d| fmt(d[k])));
                w.write_record(&rec)?;
            }
        }
    }
    w.flush()?;
    written.push(path);

    if let (Some(parts), Some(labels)) = (&bundle.components, &bundle.component_labels) {
        let path = dir.join("components.csv");
        let mut w = csv_writer(&path)?;
        let mut h = vec!["t".to_string()];
        h.extend(labels.iter().cloned());
        w.write_record(&h)?;
        for (k, row) in parts.iter().enumerate() {
            let mut rec = vec![t_labels[k].clone()];
            rec.extend(row.iter().map(|v| fmt(*v)));
            w.write_record(&rec)?;
        }
        w.flush()?;
        written.push(path);
    }

    for s in &bundle.snapshots {
        let path = dir.join(format!("snapshot_{}.csv", s.t));
        write_matrix(&path, &s.dfs)?;
        written.push(path);
    }
    let path = dir.join("final_prediction.csv");
    write_matrix(&path, &bundle.final_prediction)?;
    written.push(path);

    let path = dir.join("meta.txt");
    let mut f = fs::File::create(&path)?;
    for (k, v) in extra_meta.iter().chain(&bundle.meta) {
        writeln!(f, "{k} = {v}")?;
    }
    written.push(path);
    Ok(written)
}

/// Matrix-shaped points as rows of comma-separated values; vectors as one
/// row.
pub fn write_matrix(path: &Path, point: &ParameterPoint) -> Result<()> {
    let cols = match point.shape() {
        crate::point::Shape::Matrix { cols, .. } => cols,
        crate::point::Shape::Vector(n) => n.max(1),
    };
    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(path)?;
    for row in point.as_slice().chunks(cols) {
        w.write_record(row.iter().map(|v| fmt(*v)))?;
    }
    w.flush()?;
    Ok(())
}

/// A `losses.csv` read back from disk.
#[derive(Clone, Debug, PartialEq)]
pub struct LossTrace {
    pub time_labels: Vec<String>,
    pub expert_labels: Vec<String>,
    /// `[t][i]`.
    pub experts: Vec<Vec<f64>>,
    pub dfs: Vec<f64>,
    pub truth: Option<Vec<f64>>,
}

impl LossTrace {
    pub fn expert_trace(&self, i: usize) -> Vec<f64> {
        self.experts.iter().map(|r| r[i]).collect()
    }
}

pub fn read_loss_trace(path: &Path) -> Result<LossTrace> {
    let parse_err = |message: String| Error::Parse {
        path: path.to_path_buf(),
        message,
    };
    let mut rdr = csv::Reader::from_path(path)?;
    let header = rdr.headers()?.clone();
    let cols: Vec<&str> = header.iter().collect();
    if cols.first() != Some(&"t") {
        return Err(parse_err("header must start with `t`".into()));
    }
    let dfs_col = cols
        .iter()
        .position(|c| *c == "dfs")
        .ok_or_else(|| parse_err("missing `dfs` column".into()))?;
    let truth_col = cols.iter().position(|c| *c == "truth");
    let expert_labels: Vec<String> = cols[1..dfs_col].iter().map(|s| s.to_string()).collect();
    if expert_labels.is_empty() {
        return Err(parse_err("no expert columns before `dfs`".into()));
    }
    let mut trace = LossTrace {
        time_labels: Vec::new(),
        expert_labels,
        experts: Vec::new(),
        dfs: Vec::new(),
        truth: truth_col.map(|_| Vec::new()),
    };
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        let num = |j: usize| -> Result<f64> {
            rec.get(j)
                .and_then(|v| v.parse::<f64>().ok())
                .ok_or_else(|| parse_err(format!("line {line}: bad number in column {}", j + 1)))
        };
        trace.time_labels.push(rec[0].to_string());
        trace.experts.push((1..dfs_col).map(num).collect::<Result<_>>()?);
        trace.dfs.push(num(dfs_col)?);
        if let (Some(j), Some(tr)) = (truth_col, trace.truth.as_mut()) {
            tr.push(num(j)?);
        }
    }
    if trace.dfs.is_empty() {
        return Err(parse_err("no rounds".into()));
    }
    Ok(trace)
}

/// Regret summary recomputed from a saved trace. The comparator is the
/// `truth` column when present, otherwise the best `m`-switch expert
/// sequence.
pub fn evaluate_trace(trace: &LossTrace, m: usize) -> Result<Vec<(String, String)>> {
    let n = trace.expert_labels.len();
    let horizon = trace.dfs.len();
    let m = m.min(horizon - 1);
    let by_expert: Vec<Vec<f64>> = (0..n).map(|i| trace.expert_trace(i)).collect();
    let mut out = vec![
        ("rounds".to_string(), horizon.to_string()),
        ("switch_budget".into(), m.to_string()),
        ("dfs_total_loss".into(), trace.dfs.iter().sum::<f64>().to_string()),
    ];
    for (label, tr) in trace.expert_labels.iter().zip(&by_expert) {
        let total: f64 = tr.iter().sum();
        out.push((format!("expert_total_loss[{label}]"), total.to_string()));
        out.push((
            format!("dfs_regret_vs[{label}]"),
            (trace.dfs.iter().sum::<f64>() - total).to_string(),
        ));
    }
    let best = best_segmentation_from_costs(&by_expert, m)?;
    let path: Vec<String> = best
        .models
        .iter()
        .enumerate()
        .map(|(k, &i)| {
            let start = if k == 0 { 1 } else { best.switch_times[k - 1] };
            format!("{}:{}", trace.time_labels[start - 1], trace.expert_labels[i])
        })
        .collect();
    out.push(("best_switching_experts".into(), path.join(",")));
    out.push(("best_switching_total_loss".into(), best.total.to_string()));
    let comparator = trace.truth.clone().unwrap_or_else(|| best.path().iter().enumerate().map(|(t, &i)| by_expert[i][t]).collect());
    let dec = tracking_decomposition(&trace.dfs, &by_expert, &comparator, m)?;
    out.push((
        "comparator".into(),
        if trace.truth.is_some() { "truth" } else { "best switching experts" }.to_string(),
    ));
    out.push(("decomposition_t1".into(), dec.t1.to_string()));
    out.push(("decomposition_t2".into(), dec.t2.to_string()));
    out.push(("decomposition_total".into(), dec.total.to_string()));
    Ok(out)
}
