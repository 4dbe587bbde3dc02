//! Local Outlier Factor over Euclidean distance, brute force.

use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;

use crate::dataset::{write_echo, Dataset, PointId};
use crate::error::{Error, Result};
use crate::kns::rank_indices;
use crate::scalar::Scalar;

/// Floor applied to a reachability-distance sum so coincident duplicates
/// keep a finite local reachability density.
pub const REACH_SUM_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LofParams {
    pub k_nn: usize,
}

impl Default for LofParams {
    fn default() -> Self {
        Self { k_nn: 10 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LofScore<T> {
    pub point_id: PointId,
    pub lrd: T,
    pub lof: T,
}

#[derive(Debug, Clone)]
pub struct LofReport<T> {
    /// One row per point, in dataset order.
    pub rows: Vec<LofScore<T>>,
    pub params: LofParams,
    pub seconds: f64,
}

impl<T: Scalar> LofReport<T> {
    /// Row indices ordered by LOF descending, ties by point id ascending.
    pub fn ranking(&self) -> Vec<usize> {
        rank_indices(&self.rows, |r| r.lof, |r| r.point_id)
    }

    pub fn write_csv<W: Write>(&self, echo: &[(String, String)], out: W) -> Result<()> {
        let mut out = std::io::BufWriter::new(out);
        write_echo(&mut out, echo)?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["point_id", "lrd", "lof", "rank"])?;
        for (rank, idx) in self.ranking().into_iter().enumerate() {
            let r = &self.rows[idx];
            w.write_record([
                r.point_id.to_string(),
                r.lrd.to_string(),
                r.lof.to_string(),
                (rank + 1).to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Pairwise Euclidean distances, computed once and reusable across `k_nn` values.
#[derive(Debug, Clone)]
pub struct DistanceMatrix<T> {
    n: usize,
    dist: Vec<T>,
    point_ids: Vec<PointId>,
    seconds: f64,
}

impl<T: Scalar> DistanceMatrix<T> {
    pub fn euclidean(dataset: &Dataset<T>) -> Self {
        let start = Instant::now();
        let n = dataset.n();
        let upper: Vec<Vec<T>> = (0..n)
            .into_par_iter()
            .map(|p| {
                let a = dataset.row(p);
                (p + 1..n)
                    .map(|q| {
                        a.iter()
                            .zip(dataset.row(q))
                            .fold(T::zero(), |acc, (&x, &y)| acc + (x - y) * (x - y))
                            .sqrt()
                    })
                    .collect()
            })
            .collect();
        let mut dist = vec![T::zero(); n * n];
        for (p, row) in upper.into_iter().enumerate() {
            for (off, d) in row.into_iter().enumerate() {
                let q = p + 1 + off;
                dist[p * n + q] = d;
                dist[q * n + p] = d;
            }
        }
        Self {
            n,
            dist,
            point_ids: dataset.point_ids().to_vec(),
            seconds: start.elapsed().as_secs_f64(),
        }
    }

    #[inline]
    pub fn get(&self, p: usize, q: usize) -> T {
        self.dist[p * self.n + q]
    }

    /// LOF scores; the reported time includes building the matrix.
    pub fn lof(&self, params: &LofParams) -> Result<LofReport<T>> {
        let n = self.n;
        let k = params.k_nn;
        if k == 0 {
            return Err(Error::param("k_nn must be at least 1"));
        }
        if n <= k + 1 {
            return Err(Error::param(format!(
                "LOF needs n > k_nn + 1 (n = {n}, k_nn = {k})"
            )));
        }
        let start = Instant::now();
        let row = |p: usize| &self.dist[p * n..(p + 1) * n];

        // k-distance and tie-inclusive neighbourhood of every point.
        let neighbourhoods: Vec<(T, Vec<usize>)> = (0..n)
            .into_par_iter()
            .map(|p| {
                let d = row(p);
                let mut others: Vec<T> = (0..n).filter(|&q| q != p).map(|q| d[q]).collect();
                others.select_nth_unstable_by(k - 1, |a, b| {
                    a.partial_cmp(b).expect("finite distance")
                });
                let k_dist = others[k - 1];
                let hood = (0..n).filter(|&q| q != p && d[q] <= k_dist).collect();
                (k_dist, hood)
            })
            .collect();

        let floor = T::lit(REACH_SUM_FLOOR);
        let lrd: Vec<T> = (0..n)
            .map(|p| {
                let (_, hood) = &neighbourhoods[p];
                let reach = hood.iter().fold(T::zero(), |acc, &o| {
                    acc + neighbourhoods[o].0.max(self.get(p, o))
                });
                T::from_count(hood.len()) / reach.max(floor)
            })
            .collect();

        let rows = (0..n)
            .map(|p| {
                let hood = &neighbourhoods[p].1;
                let ratio_sum = hood.iter().fold(T::zero(), |acc, &o| acc + lrd[o] / lrd[p]);
                LofScore {
                    point_id: self.point_ids[p],
                    lrd: lrd[p],
                    lof: ratio_sum / T::from_count(hood.len()),
                }
            })
            .collect();

        Ok(LofReport {
            rows,
            params: *params,
            seconds: self.seconds + start.elapsed().as_secs_f64(),
        })
    }
}

pub fn lof_score<T: Scalar>(dataset: &Dataset<T>, params: &LofParams) -> Result<LofReport<T>> {
    if params.k_nn == 0 || dataset.n() <= params.k_nn + 1 {
        return Err(Error::param(format!(
            "LOF needs 1 <= k_nn and n > k_nn + 1 (n = {}, k_nn = {})",
            dataset.n(),
            params.k_nn
        )));
    }
    DistanceMatrix::euclidean(dataset).lof(params)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regular_simplex_is_uniform() {
        // Standard basis vectors: every pair at distance sqrt(2).
        let n = 7;
        let mut values = vec![0.0; n * n];
        for j in 0..n {
            values[j * n + j] = 1.0;
        }
        let d: Dataset<f64> = Dataset::new(n, values, None).unwrap();
        let r = lof_score(&d, &LofParams { k_nn: 3 }).unwrap();
        for row in &r.rows {
            assert!((row.lof - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn isolated_point_ranks_first() {
        let mut values: Vec<f64> = (0..20)
            .flat_map(|j| [f64::from(j % 5), f64::from(j / 5)])
            .collect();
        values.extend([30.0, 30.0]);
        let d = Dataset::new(2, values, None).unwrap();
        let r = lof_score(&d, &LofParams { k_nn: 4 }).unwrap();
        assert_eq!(r.ranking()[0], 20);
        assert!(r.rows[20].lof > 3.0);
    }

    #[test]
    fn duplicates_stay_finite() {
        let mut values = vec![1.0; 8];
        values.extend([5.0, 9.0]);
        let d: Dataset<f64> = Dataset::new(1, values, None).unwrap();
        let r = lof_score(&d, &LofParams { k_nn: 3 }).unwrap();
        assert!(r
            .rows
            .iter()
            .all(|s| s.lof.is_finite() && s.lof > 0.0 && s.lrd > 0.0));
    }

    #[test]
    fn parameter_errors() {
        let d = Dataset::new(1, vec![0.0, 1.0, 2.0], None).unwrap();
        assert!(lof_score(&d, &LofParams { k_nn: 2 }).is_err());
        assert!(lof_score(&d, &LofParams { k_nn: 0 }).is_err());
        assert!(lof_score(&d, &LofParams { k_nn: 1 }).is_ok());
    }
}
