//! k-nearest-sections (k-NS) outlier scoring.
//!
//! Every point collects one first-stage ratio per dimension (how crowded its
//! section is relative to the dimension's average) and one second-stage ratio
//! per projection `i -> j` (how far its section co-members from dimension `i`
//! scatter once looked at in dimension `j`). Both are folded into the SI
//! value, which sits near 1 for points that behave like the bulk.

mod params;
mod projection;

use std::io::Write;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::dataset::{write_echo, Dataset, PointId};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::section_space::SectionSpace;

pub use params::{
    Execution, KnsParams, ScoreMode, Strategy, DEFAULT_MAX_WORK, FULL_STRATEGY_MAX_DIMS,
};
pub use projection::{
    first_projection_sdr, nearest_sections, second_projection_sdr, FirstProjection,
};

use projection::Projector;

/// Upper bound on per-chunk partial sums kept alive in parallel mode.
const MAX_CHUNKS: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointScore<T> {
    pub point_id: PointId,
    pub sum_first: T,
    pub sum_second: T,
    pub count_second: u64,
    pub si: T,
    pub anomaly: T,
}

#[derive(Debug, Clone)]
pub struct ScoreReport<T> {
    /// One row per point, in dataset order.
    pub rows: Vec<PointScore<T>>,
    pub params: KnsParams,
    pub strategy: Strategy,
    pub n: usize,
    pub m: usize,
    pub scn: usize,
    pub seconds: f64,
    pub diagnostics: Vec<String>,
}

impl<T: Scalar> ScoreReport<T> {
    /// Row indices ordered by anomaly descending, ties by point id ascending.
    pub fn ranking(&self) -> Vec<usize> {
        rank_indices(&self.rows, |r| r.anomaly, |r| r.point_id)
    }

    /// Writes the score table sorted by rank, preceded by `# key=value`
    /// comment lines.
    pub fn write_csv<W: Write>(&self, echo: &[(String, String)], out: W) -> Result<()> {
        let mut out = std::io::BufWriter::new(out);
        write_echo(&mut out, echo)?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "point_id",
            "sum_first",
            "sum_second",
            "count_second",
            "si",
            "anomaly",
            "rank",
        ])?;
        for (rank, idx) in self.ranking().into_iter().enumerate() {
            let r = &self.rows[idx];
            w.write_record([
                r.point_id.to_string(),
                r.sum_first.to_string(),
                r.sum_second.to_string(),
                r.count_second.to_string(),
                r.si.to_string(),
                r.anomaly.to_string(),
                (rank + 1).to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

pub(crate) fn rank_indices<R, T: Scalar>(
    rows: &[R],
    key: impl Fn(&R) -> T,
    id: impl Fn(&R) -> PointId,
) -> Vec<usize> {
    let mut order: Vec<usize> = (0..rows.len()).collect();
    order.sort_by(|&a, &b| {
        key(&rows[b])
            .partial_cmp(&key(&rows[a]))
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| id(&rows[a]).cmp(&id(&rows[b])))
    });
    order
}

/// The ordered dimension pairs of the second stage.
enum Projections {
    Full { m: usize },
    Listed(Vec<(usize, usize)>),
}

impl Projections {
    fn new(strategy: Strategy, m: usize, rounds: usize, seed: u64) -> Self {
        match strategy {
            Strategy::Full => Projections::Full { m },
            Strategy::Sampled if m < 2 => Projections::Listed(Vec::new()),
            Strategy::Sampled => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut order: Vec<usize> = (0..m).collect();
                let mut pairs = Vec::with_capacity(m * rounds);
                for _ in 0..rounds {
                    order.shuffle(&mut rng);
                    pairs.extend((0..m).map(|pos| (order[pos], order[(pos + 1) % m])));
                }
                Projections::Listed(pairs)
            }
        }
    }

    fn len(&self) -> usize {
        match self {
            Projections::Full { m } => m * m.saturating_sub(1),
            Projections::Listed(p) => p.len(),
        }
    }

    fn get(&self, t: usize) -> (usize, usize) {
        match self {
            Projections::Full { m } => {
                let i = t / (m - 1);
                let jj = t % (m - 1);
                (i, if jj >= i { jj + 1 } else { jj })
            }
            Projections::Listed(p) => p[t],
        }
    }
}

fn work_units(strategy: Strategy, n: usize, m: usize, rounds: usize) -> Option<u64> {
    let (n, m, r) = (n as u64, m as u64, rounds as u64);
    let projections = match strategy {
        Strategy::Full => m.checked_mul(m.saturating_sub(1))?,
        Strategy::Sampled => m.checked_mul(r)?,
    };
    projections.checked_mul(n)
}

struct Partial<T> {
    sum: Vec<T>,
    count: Vec<u64>,
}

fn accumulate<T: Scalar>(
    space: &SectionSpace<T>,
    projections: &Projections,
    range: std::ops::Range<usize>,
    k: usize,
    threshold: usize,
) -> Partial<T> {
    let n = space.n();
    let mut sum = vec![T::zero(); n];
    let mut count = vec![0u64; n];
    let mut projector = Projector::new(space.scn(), k, threshold);
    for t in range {
        let (i, j) = projections.get(t);
        for g in 1..=space.scn() as u32 {
            projector.project_section(space, i, g, j, |p, v| {
                sum[p] = sum[p] + v;
                count[p] += 1;
            });
        }
    }
    Partial { sum, count }
}

/// Scores every point of a built section space.
pub fn score<T: Scalar>(space: &SectionSpace<T>, params: &KnsParams) -> Result<ScoreReport<T>> {
    params.validate()?;
    let (n, m, scn) = (space.n(), space.m(), space.scn());
    if let Some(s) = params.scn {
        if s != scn {
            return Err(Error::param(format!(
                "params ask for scn = {s} but the section space has {scn}"
            )));
        }
    }
    if scn < 2 {
        return Err(Error::param("scn must be at least 2"));
    }
    let strategy = params.resolve_strategy(m);
    let work = work_units(strategy, n, m, params.rounds).unwrap_or(u64::MAX);
    if work > params.max_work {
        return Err(Error::Capacity(format!(
            "{strategy} strategy needs {work} work units (n = {n}, m = {m}), cap is {}",
            params.max_work
        )));
    }

    let mut diagnostics = space.diagnostics().to_vec();
    let threshold = params.small_section_threshold();
    if n / scn < threshold {
        diagnostics.push(format!(
            "n / scn = {} is below the small-section threshold {threshold}; \
             most second-stage ratios will be neutral",
            n / scn
        ));
    }

    let start = Instant::now();

    let first = first_projection_sdr(space);
    let mut sum_first = vec![T::zero(); n];
    for i in 0..m {
        for (j, acc) in sum_first.iter_mut().enumerate() {
            *acc = *acc + first.point_sdr(space, i, j);
        }
    }

    let projections = Projections::new(strategy, m, params.rounds, params.seed);
    let total = projections.len();
    let Partial {
        sum: sum_second,
        count: count_second,
    } = match params.execution {
        Execution::Sequential => accumulate(space, &projections, 0..total, params.k, threshold),
        Execution::Parallel => {
            let chunk = total.div_ceil(MAX_CHUNKS).max(1);
            let partials: Vec<Partial<T>> = (0..total.div_ceil(chunk))
                .into_par_iter()
                .map(|c| {
                    let range = c * chunk..((c + 1) * chunk).min(total);
                    accumulate(space, &projections, range, params.k, threshold)
                })
                .collect();
            partials.into_iter().fold(
                Partial {
                    sum: vec![T::zero(); n],
                    count: vec![0; n],
                },
                |mut acc, part| {
                    for (a, b) in acc.sum.iter_mut().zip(part.sum) {
                        *a = *a + b;
                    }
                    for (a, b) in acc.count.iter_mut().zip(part.count) {
                        *a += b;
                    }
                    acc
                },
            )
        }
    };

    let m_t = T::from_count(m);
    let rows = (0..n)
        .map(|j| {
            let si = if count_second[j] == 0 {
                m_t / sum_first[j]
            } else {
                let second = m_t * sum_second[j] / T::lit(count_second[j] as f64);
                (m_t + m_t) / (sum_first[j] + second)
            };
            let anomaly = match params.score_mode {
                ScoreMode::SiDesc => si,
                ScoreMode::SiAsc => -si,
                ScoreMode::AbsLog => si.ln().abs(),
            };
            PointScore {
                point_id: space.point_ids()[j],
                sum_first: sum_first[j],
                sum_second: sum_second[j],
                count_second: count_second[j],
                si,
                anomaly,
            }
        })
        .collect();

    Ok(ScoreReport {
        rows,
        params: params.clone(),
        strategy,
        n,
        m,
        scn,
        seconds: start.elapsed().as_secs_f64(),
        diagnostics,
    })
}

/// Builds the section space with the resolved `scn` and scores it.
pub fn detect<T: Scalar>(dataset: &Dataset<T>, params: &KnsParams) -> Result<ScoreReport<T>> {
    params.validate()?;
    let scn = params.resolve_scn(dataset.n());
    let space = SectionSpace::build(dataset, scn)?;
    let params = KnsParams {
        scn: Some(scn),
        ..params.clone()
    };
    score(&space, &params)
}

/// The `t` most anomalous point ids.
pub fn rank_outliers<T: Scalar>(report: &ScoreReport<T>, t: usize) -> Result<Vec<PointId>> {
    if t == 0 || t > report.rows.len() {
        return Err(Error::param(format!(
            "t = {t} must lie in 1..={}",
            report.rows.len()
        )));
    }
    Ok(report
        .ranking()
        .into_iter()
        .take(t)
        .map(|idx| report.rows[idx].point_id)
        .collect())
}
