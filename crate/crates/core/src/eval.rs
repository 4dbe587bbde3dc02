//! Precision/recall/F-measure of a ranking against ground-truth labels.
//!
//! Outliers are retrieved one at a time: the t-th true outlier met while
//! scanning the ranking fixes recall `t / T` and precision `t / cutoff`.

use std::collections::{HashMap, HashSet};
use std::io::{Read, Write};

use crate::dataset::{Label, PointId};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrLevel {
    pub recall: f64,
    /// 1-based rank position of the outlier that reaches this recall.
    pub cutoff: usize,
    pub precision: f64,
    pub f_measure: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrCurve {
    pub levels: Vec<PrLevel>,
    pub max_f: f64,
}

impl PrCurve {
    pub fn precision_at_full_recall(&self) -> f64 {
        self.levels.last().map_or(0.0, |l| l.precision)
    }
}

pub fn f_measure(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

/// Ground-truth labels keyed by point id.
pub type LabelMap = HashMap<PointId, Label>;

pub fn label_map(ids: &[PointId], labels: &[Label]) -> LabelMap {
    ids.iter().copied().zip(labels.iter().copied()).collect()
}

fn check_coverage(ranking: &[PointId], labels: &LabelMap) -> Result<()> {
    let unique: HashSet<_> = ranking.iter().collect();
    if unique.len() != ranking.len() {
        return Err(Error::Eval("ranking repeats a point id".into()));
    }
    if ranking.len() != labels.len() || ranking.iter().any(|id| !labels.contains_key(id)) {
        return Err(Error::Eval(
            "ranking and labels cover different point ids".into(),
        ));
    }
    Ok(())
}

/// Noise points count as non-outliers.
pub fn pr_curve(ranking: &[PointId], labels: &LabelMap) -> Result<PrCurve> {
    check_coverage(ranking, labels)?;
    let total = labels.values().filter(|l| l.is_outlier()).count();
    if total == 0 {
        return Err(Error::Eval("labels contain no outliers".into()));
    }
    let mut levels = Vec::with_capacity(total);
    let mut found = 0;
    for (pos, id) in ranking.iter().enumerate() {
        if labels[id].is_outlier() {
            found += 1;
            let recall = found as f64 / total as f64;
            let precision = found as f64 / (pos + 1) as f64;
            levels.push(PrLevel {
                recall,
                cutoff: pos + 1,
                precision,
                f_measure: f_measure(precision, recall),
            });
        }
    }
    let max_f = levels.iter().map(|l| l.f_measure).fold(0.0, f64::max);
    Ok(PrCurve { levels, max_f })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub method: String,
    pub max_f: f64,
    pub precision_at_full_recall: f64,
    pub seconds: Option<f64>,
    pub curve: PrCurve,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonSummary {
    /// Sorted by `max_f` descending; ties keep input order.
    pub rows: Vec<SummaryRow>,
}

/// A named ranking to compare, with the detector's scoring time if known.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodRanking {
    pub name: String,
    pub ranking: Vec<PointId>,
    pub seconds: Option<f64>,
}

pub fn compare(reports: &[MethodRanking], labels: &LabelMap) -> Result<ComparisonSummary> {
    if reports.is_empty() {
        return Err(Error::Eval("nothing to compare".into()));
    }
    let first: HashSet<_> = reports[0].ranking.iter().collect();
    let mut rows = Vec::with_capacity(reports.len());
    for report in reports {
        let ids: HashSet<_> = report.ranking.iter().collect();
        if ids != first {
            return Err(Error::Eval(format!(
                "method {:?} ranks a different set of points",
                report.name
            )));
        }
        let curve = pr_curve(&report.ranking, labels)?;
        rows.push(SummaryRow {
            method: report.name.clone(),
            max_f: curve.max_f,
            precision_at_full_recall: curve.precision_at_full_recall(),
            seconds: report.seconds,
            curve,
        });
    }
    rows.sort_by(|a, b| b.max_f.total_cmp(&a.max_f));
    Ok(ComparisonSummary { rows })
}

impl ComparisonSummary {
    /// `method,recall_level,cutoff,precision,f_measure`
    pub fn write_curves<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["method", "recall_level", "cutoff", "precision", "f_measure"])?;
        for row in &self.rows {
            for l in &row.curve.levels {
                w.write_record([
                    row.method.clone(),
                    l.recall.to_string(),
                    l.cutoff.to_string(),
                    l.precision.to_string(),
                    l.f_measure.to_string(),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// `method,max_f,precision_at_full_recall,seconds`
    pub fn write_summary<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["method", "max_f", "precision_at_full_recall", "seconds"])?;
        for row in &self.rows {
            w.write_record([
                row.method.clone(),
                row.max_f.to_string(),
                row.precision_at_full_recall.to_string(),
                row.seconds.map(|s| s.to_string()).unwrap_or_default(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// A ranking read back from a score file.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreFile {
    /// Point ids ordered by the file's `rank` column.
    pub ranking: Vec<PointId>,
    /// `# key=value` lines from the file header.
    pub echo: Vec<(String, String)>,
}

impl ScoreFile {
    pub fn echo_value(&self, key: &str) -> Option<&str> {
        self.echo
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }
}

/// Reads any score CSV with `point_id` and `rank` columns.
pub fn read_score_file<R: Read>(mut source: R) -> Result<ScoreFile> {
    let mut text = String::new();
    source.read_to_string(&mut text)?;
    let echo = parse_echo(&text);
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader.headers()?.clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Eval(format!("score file lacks a {name} column")))
    };
    let (id_col, rank_col) = (column("point_id")?, column("rank")?);
    let mut rows = Vec::new();
    for (r, record) in reader.records().enumerate() {
        let record = record?;
        let parse = |c: usize, name: &str| {
            record
                .get(c)
                .and_then(|f| f.parse::<u64>().ok())
                .ok_or_else(|| Error::Cell {
                    row: r + 1,
                    column: name.into(),
                    message: "expected a non-negative integer".into(),
                })
        };
        rows.push((
            parse(rank_col, "rank")?,
            PointId(parse(id_col, "point_id")?),
        ));
    }
    if rows.is_empty() {
        return Err(Error::Empty);
    }
    rows.sort();
    Ok(ScoreFile {
        ranking: rows.into_iter().map(|(_, id)| id).collect(),
        echo,
    })
}

/// Collects `# key=value` lines.
pub fn parse_echo(text: &str) -> Vec<(String, String)> {
    text.lines()
        .filter_map(|line| line.strip_prefix('#'))
        .filter_map(|rest| rest.trim().split_once('='))
        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        .collect()
}

/// Average ranks (1-based), ties sharing the mean of their positions.
fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        let avg = (start + end + 1) as f64 / 2.0;
        for &idx in &order[start..end] {
            ranks[idx] = avg;
        }
        start = end;
    }
    ranks
}

/// Spearman rank correlation with tie-averaged ranks.
pub fn spearman(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() || a.len() < 2 {
        return Err(Error::Eval(
            "spearman needs two equal-length samples of size >= 2".into(),
        ));
    }
    let (ra, rb) = (average_ranks(a), average_ranks(b));
    let n = ra.len() as f64;
    let (ma, mb) = (ra.iter().sum::<f64>() / n, rb.iter().sum::<f64>() / n);
    let (mut cov, mut va, mut vb) = (0.0, 0.0, 0.0);
    for (x, y) in ra.iter().zip(&rb) {
        cov += (x - ma) * (y - mb);
        va += (x - ma) * (x - ma);
        vb += (y - mb) * (y - mb);
    }
    if va == 0.0 || vb == 0.0 {
        return Ok(if va == vb { 1.0 } else { 0.0 });
    }
    Ok(cov / (va * vb).sqrt())
}
