//! Point matrices, ground-truth labels, and CSV persistence.

mod synthetic;

use std::collections::HashSet;
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub use synthetic::{
    generate_synthetic, inject_noise_points, ClusterModel, GeneratorSpec, NoiseRecord, Synthetic,
};

/// Stable, 1-based identifier of a point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PointId(pub u64);

impl fmt::Display for PointId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    Normal,
    Outlier,
    Noise,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::Normal => "normal",
            Label::Outlier => "outlier",
            Label::Noise => "noise",
        }
    }

    pub fn is_outlier(self) -> bool {
        self == Label::Outlier
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "normal" | "0" => Ok(Label::Normal),
            "outlier" | "1" => Ok(Label::Outlier),
            "noise" => Ok(Label::Noise),
            other => Err(format!("unknown label {other:?}")),
        }
    }
}

/// An `n x m` matrix of finite reals, one row per point.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset<T> {
    n: usize,
    m: usize,
    values: Vec<T>,
    point_ids: Vec<PointId>,
    labels: Option<Vec<Label>>,
}

impl<T: Scalar> Dataset<T> {
    /// Builds a dataset from row-major values with point ids `1..=n`.
    pub fn new(m: usize, values: Vec<T>, labels: Option<Vec<Label>>) -> Result<Self> {
        if m == 0 {
            return Err(Error::param("dataset needs at least one dimension"));
        }
        if !values.len().is_multiple_of(m) {
            return Err(Error::param(format!(
                "{} values do not form rows of {m}",
                values.len()
            )));
        }
        let n = values.len() / m;
        let point_ids = (1..=n as u64).map(PointId).collect();
        Self::with_ids(m, values, point_ids, labels)
    }

    pub fn with_ids(
        m: usize,
        values: Vec<T>,
        point_ids: Vec<PointId>,
        labels: Option<Vec<Label>>,
    ) -> Result<Self> {
        if m == 0 || !values.len().is_multiple_of(m) {
            return Err(Error::param("values are not rectangular"));
        }
        let n = values.len() / m;
        if n == 0 {
            return Err(Error::Empty);
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Cell {
                row: pos / m + 1,
                column: format!("p{}", pos % m + 1),
                message: "value is not finite".into(),
            });
        }
        if point_ids.len() != n {
            return Err(Error::param("one point id per row required"));
        }
        let mut seen = HashSet::with_capacity(n);
        if let Some(dup) = point_ids.iter().find(|id| !seen.insert(**id)) {
            return Err(Error::param(format!("duplicate point id {dup}")));
        }
        if let Some(labels) = &labels {
            if labels.len() != n {
                return Err(Error::param(format!(
                    "{} labels for {n} points",
                    labels.len()
                )));
            }
        }
        Ok(Self {
            n,
            m,
            values,
            point_ids,
            labels,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn row(&self, j: usize) -> &[T] {
        &self.values[j * self.m..(j + 1) * self.m]
    }

    pub fn value(&self, j: usize, i: usize) -> T {
        self.values[j * self.m + i]
    }

    pub fn column(&self, i: usize) -> impl Iterator<Item = T> + '_ {
        self.values.iter().skip(i).step_by(self.m).copied()
    }

    pub fn point_ids(&self) -> &[PointId] {
        &self.point_ids
    }

    pub fn labels(&self) -> Option<&[Label]> {
        self.labels.as_deref()
    }

    pub fn outlier_count(&self) -> usize {
        self.labels
            .as_ref()
            .map_or(0, |l| l.iter().filter(|l| l.is_outlier()).count())
    }

    /// Returns a copy with column `i` mapped through `f`.
    pub fn map_column(&self, i: usize, f: impl Fn(T) -> T) -> Result<Self> {
        let mut values = self.values.clone();
        for row in values.chunks_mut(self.m) {
            row[i] = f(row[i]);
        }
        Self::with_ids(self.m, values, self.point_ids.clone(), self.labels.clone())
    }

    /// Returns a copy whose rows are `order[0], order[1], ...` of this one.
    /// Point ids and labels travel with their rows.
    pub fn permute_rows(&self, order: &[usize]) -> Result<Self> {
        let mut values = Vec::with_capacity(self.values.len());
        for &j in order {
            values.extend_from_slice(self.row(j));
        }
        let ids = order.iter().map(|&j| self.point_ids[j]).collect();
        let labels = self
            .labels
            .as_ref()
            .map(|l| order.iter().map(|&j| l[j]).collect());
        Self::with_ids(self.m, values, ids, labels)
    }

    /// Returns a copy whose column `c` is column `order[c]` of this one.
    pub fn permute_columns(&self, order: &[usize]) -> Result<Self> {
        if order.len() != self.m {
            return Err(Error::param("column permutation has wrong length"));
        }
        let values = (0..self.n)
            .flat_map(|j| order.iter().map(move |&i| self.value(j, i)))
            .collect();
        Self::with_ids(self.m, values, self.point_ids.clone(), self.labels.clone())
    }

    pub fn convert<U: Scalar>(&self) -> Dataset<U> {
        Dataset {
            n: self.n,
            m: self.m,
            values: self.values.iter().map(|v| U::lit(v.as_f64())).collect(),
            point_ids: self.point_ids.clone(),
            labels: self.labels.clone(),
        }
    }
}

/// Reads a dataset from CSV text.
///
/// Lines starting with `#` are skipped. Every field except `label_column`
/// must parse as a finite real; point ids are assigned `1..=n` in row order.
pub fn load_matrix<T: Scalar, R: Read>(
    source: R,
    has_header: bool,
    label_column: Option<&str>,
) -> Result<Dataset<T>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(has_header)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(source);

    let mut names: Vec<String> = Vec::new();
    let mut label_idx = None;
    if has_header {
        names = reader.headers()?.iter().map(str::to_owned).collect();
        if let Some(name) = label_column {
            label_idx = Some(names.iter().position(|h| h == name).ok_or_else(|| {
                Error::param(format!("label column {name:?} not found in header"))
            })?);
        }
    } else if label_column.is_some() {
        return Err(Error::param("a label column requires a header row"));
    }

    let mut width = has_header.then_some(names.len());
    let mut values = Vec::new();
    let mut labels = label_idx.map(|_| Vec::new());
    let mut rows = 0;
    for (r, record) in reader.records().enumerate() {
        let record = record?;
        let row = r + 1;
        let expected = *width.get_or_insert(record.len());
        if record.len() != expected {
            return Err(Error::Ragged {
                row,
                expected,
                found: record.len(),
            });
        }
        for (c, field) in record.iter().enumerate() {
            let column = || names.get(c).cloned().unwrap_or_else(|| (c + 1).to_string());
            if Some(c) == label_idx {
                let label = field.parse::<Label>().map_err(|message| Error::Cell {
                    row,
                    column: column(),
                    message,
                })?;
                labels.as_mut().expect("labels allocated").push(label);
                continue;
            }
            let v: T = field.parse().map_err(|_| Error::Cell {
                row,
                column: column(),
                message: format!("cannot parse {field:?} as a number"),
            })?;
            if !v.is_finite() {
                return Err(Error::Cell {
                    row,
                    column: column(),
                    message: format!("non-finite value {field:?}"),
                });
            }
            values.push(v);
        }
        rows += 1;
    }
    if rows == 0 {
        return Err(Error::Empty);
    }
    let m = values.len() / rows;
    if m == 0 {
        return Err(Error::param("no numeric columns"));
    }
    Dataset::new(m, values, labels)
}

/// Writes `# key=value` comment lines, then a `p1..pm[,label]` header and rows.
pub fn write_csv<T: Scalar, W: Write>(
    dataset: &Dataset<T>,
    echo: &[(String, String)],
    out: W,
) -> Result<()> {
    let mut out = std::io::BufWriter::new(out);
    write_echo(&mut out, echo)?;
    let mut writer = csv::Writer::from_writer(out);
    let mut header: Vec<String> = (1..=dataset.m()).map(|i| format!("p{i}")).collect();
    if dataset.labels().is_some() {
        header.push("label".into());
    }
    writer.write_record(&header)?;
    let mut record = Vec::with_capacity(header.len());
    for j in 0..dataset.n() {
        record.clear();
        record.extend(dataset.row(j).iter().map(|v| v.to_string()));
        if let Some(labels) = dataset.labels() {
            record.push(labels[j].to_string());
        }
        writer.write_record(&record)?;
    }
    writer.flush()?;
    Ok(())
}

pub(crate) fn write_echo<W: Write>(out: &mut W, echo: &[(String, String)]) -> Result<()> {
    for (k, v) in echo {
        writeln!(out, "# {k}={v}")?;
    }
    Ok(())
}
