//! Independent reference implementations used as test oracles.
//!
//! Nothing here calls into the detector engine: section ids are recomputed
//! from raw values, second-stage ratios come from explicit pairwise distance
//! lists, and LOF follows its textbook definition over a full distance matrix.

#![allow(dead_code)]

/// Section ids (1-based) per dimension from raw row-major values, using the
/// widened range `[lo - 0.0005 len, hi + 0.0005 len]` split into `scn` parts.
pub fn section_ids(values: &[f64], m: usize, scn: usize) -> Vec<Vec<u32>> {
    let n = values.len() / m;
    (0..m)
        .map(|i| {
            let col: Vec<f64> = (0..n).map(|j| values[j * m + i]).collect();
            let lo = col.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = col.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            if hi == lo {
                return vec![1; n];
            }
            let lo_ext = lo - 0.0005 * (hi - lo);
            let width = 1.001 * (hi - lo) / scn as f64;
            col.iter()
                .map(|&v| (((v - lo_ext) / width).floor() as i64 + 1).clamp(1, scn as i64) as u32)
                .collect()
        })
        .collect()
}

/// Tie-inclusive neighbour set of member `p` (index into `targets`), by
/// sorting every co-member's section distance and cutting at the k-th value.
pub fn neighbours(targets: &[u32], p: usize, k: usize) -> Vec<usize> {
    let dist = |q: usize| targets[p].abs_diff(targets[q]) + 1;
    let mut all: Vec<(u32, usize)> = (0..targets.len())
        .filter(|&q| q != p)
        .map(|q| (dist(q), q))
        .collect();
    all.sort();
    let cut = all[k - 1].0;
    let mut hood: Vec<usize> = all
        .into_iter()
        .filter(|&(d, _)| d <= cut)
        .map(|(_, q)| q)
        .collect();
    hood.sort();
    hood
}

/// Second-projection ratio of every member of a section. `targets[f]` is the
/// target-dimension section of the f-th member.
pub fn second_stage_ratios(targets: &[u32], k: usize) -> Vec<f64> {
    let s = targets.len();
    if s < (3 * k + 1) / 2 {
        return vec![1.0; s];
    }
    let mean_sq: Vec<f64> = (0..s)
        .map(|p| {
            let hood = neighbours(targets, p, k);
            let total: f64 = hood
                .iter()
                .map(|&q| {
                    let d = f64::from(targets[p].abs_diff(targets[q]) + 1);
                    d * d
                })
                .sum();
            total / hood.len() as f64
        })
        .collect();
    let denom = mean_sq.iter().sum::<f64>() / s as f64;
    mean_sq.iter().map(|v| v / denom).collect()
}

pub struct OracleScore {
    pub sum_first: f64,
    pub sum_second: f64,
    pub count_second: u64,
    pub si: f64,
}

/// Full-sweep SI of every point from a section-id table `ids[dim][point]`.
pub fn full_scores(ids: &[Vec<u32>], scn: usize, k: usize) -> Vec<OracleScore> {
    let m = ids.len();
    let n = ids[0].len();
    let mut sum_first = vec![0.0; n];
    let mut sum_second = vec![0.0; n];
    let mut count = vec![0u64; n];
    for i in 0..m {
        let counts: Vec<usize> = (1..=scn as u32)
            .map(|g| ids[i].iter().filter(|&&x| x == g).count())
            .collect();
        let occupied = counts.iter().filter(|&&c| c > 0).count();
        let mean = n as f64 / occupied as f64;
        for p in 0..n {
            let ratio = counts[ids[i][p] as usize - 1] as f64 / mean;
            sum_first[p] += ratio * ratio;
        }
        for j in (0..m).filter(|&j| j != i) {
            for g in 1..=scn as u32 {
                let members: Vec<usize> = (0..n).filter(|&p| ids[i][p] == g).collect();
                let targets: Vec<u32> = members.iter().map(|&p| ids[j][p]).collect();
                for (&p, v) in members.iter().zip(second_stage_ratios(&targets, k)) {
                    sum_second[p] += v;
                    count[p] += 1;
                }
            }
        }
    }
    (0..n)
        .map(|p| {
            let mf = m as f64;
            let si = if count[p] == 0 {
                mf / sum_first[p]
            } else {
                2.0 * mf / (sum_first[p] + mf * sum_second[p] / count[p] as f64)
            };
            OracleScore {
                sum_first: sum_first[p],
                sum_second: sum_second[p],
                count_second: count[p],
                si,
            }
        })
        .collect()
}

/// Textbook LOF: `(lrd, lof)` per point.
pub fn lof_reference(values: &[f64], m: usize, k: usize) -> Vec<(f64, f64)> {
    let n = values.len() / m;
    let d = |a: usize, b: usize| -> f64 {
        (0..m)
            .map(|i| (values[a * m + i] - values[b * m + i]).powi(2))
            .sum::<f64>()
            .sqrt()
    };
    let dist: Vec<Vec<f64>> = (0..n).map(|a| (0..n).map(|b| d(a, b)).collect()).collect();
    let k_distance: Vec<f64> = (0..n)
        .map(|p| {
            let mut row: Vec<f64> = (0..n).filter(|&q| q != p).map(|q| dist[p][q]).collect();
            row.sort_by(f64::total_cmp);
            row[k - 1]
        })
        .collect();
    let hood: Vec<Vec<usize>> = (0..n)
        .map(|p| {
            (0..n)
                .filter(|&q| q != p && dist[p][q] <= k_distance[p])
                .collect()
        })
        .collect();
    let lrd: Vec<f64> = (0..n)
        .map(|p| {
            let reach: f64 = hood[p].iter().map(|&o| k_distance[o].max(dist[p][o])).sum();
            hood[p].len() as f64 / reach.max(1e-12)
        })
        .collect();
    (0..n)
        .map(|p| {
            let lof = hood[p].iter().map(|&o| lrd[o] / lrd[p]).sum::<f64>() / hood[p].len() as f64;
            (lrd[p], lof)
        })
        .collect()
}

/// Best F-measure over every cutoff `1..=n` from raw confusion counts.
pub fn max_f_exhaustive(is_outlier_in_rank_order: &[bool]) -> f64 {
    let total = is_outlier_in_rank_order.iter().filter(|&&o| o).count() as f64;
    let mut tp = 0.0;
    let mut best: f64 = 0.0;
    for (c, &o) in is_outlier_in_rank_order.iter().enumerate() {
        if o {
            tp += 1.0;
        }
        let precision = tp / (c + 1) as f64;
        let recall = tp / total;
        if precision + recall > 0.0 {
            best = best.max(2.0 * precision * recall / (precision + recall));
        }
    }
    best
}

pub fn relative_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// Small deterministic LCG so oracle instances do not depend on the crate's RNG choice.
pub struct Lcg(pub u64);

impl Lcg {
    pub fn next_u64(&mut self) -> u64 {
        self.0 = self
            .0
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        self.0 >> 11
    }

    pub fn uniform(&mut self) -> f64 {
        self.next_u64() as f64 / (1u64 << 53) as f64
    }

    pub fn below(&mut self, n: u64) -> u64 {
        self.next_u64() % n
    }
}

/// The 23-point, two-dimensional grid example: x spans [5, 23], y spans [6, 25].
pub const GRID_EXAMPLE_POINTS: [(f64, f64); 23] = [
    (5.0, 7.0),
    (6.0, 6.0),
    (6.5, 8.0),
    (7.0, 7.5),
    (7.5, 9.0),
    (8.0, 6.5),
    (9.0, 8.5),
    (10.0, 14.0),
    (11.0, 15.0),
    (11.5, 13.5),
    (12.0, 16.0),
    (13.0, 15.5),
    (14.0, 15.0),
    (15.0, 21.0),
    (16.0, 22.0),
    (17.0, 24.0),
    (17.5, 25.0),
    (18.0, 23.0),
    (19.0, 21.5),
    (20.0, 7.0),
    (21.0, 11.0),
    (22.0, 19.0),
    (23.0, 12.0),
];
