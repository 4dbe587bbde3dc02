//! Gaussian-cluster benchmark generator with planted inner outliers and
//! optional noise points.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::{Dataset, Label};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

// Stream offset so noise draws never overlap the base dataset's stream.
const NOISE_STREAM: u64 = 0x006e_6f69_7365;

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSpec {
    pub m: usize,
    pub n_normal: usize,
    pub n_outliers: usize,
    pub n_clusters: usize,
    pub mu_range: (f64, f64),
    pub sigma_range: (f64, f64),
    pub outlier_region: (f64, f64),
    pub n_noise: usize,
    pub noise_dims: usize,
    pub seed: u64,
}

impl Default for GeneratorSpec {
    fn default() -> Self {
        Self {
            m: 100,
            n_normal: 490,
            n_outliers: 10,
            n_clusters: 5,
            mu_range: (20.0, 80.0),
            sigma_range: (10.0, 20.0),
            outlier_region: (20.0, 100.0),
            n_noise: 0,
            noise_dims: 2,
            seed: 0,
        }
    }
}

impl GeneratorSpec {
    /// A benchmark-row shape: `n` points in `m` dimensions, `n_outliers` of
    /// them planted, remaining generator fields at their defaults.
    pub fn table_row(m: usize, n: usize, n_outliers: usize, seed: u64) -> Self {
        Self {
            m,
            n_normal: n.saturating_sub(n_outliers),
            n_outliers,
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ordered = |(lo, hi): (f64, f64)| lo.is_finite() && hi.is_finite() && lo <= hi;
        if self.m == 0 {
            return Err(Error::param("m must be at least 1"));
        }
        if self.n_clusters == 0 {
            return Err(Error::param("n_clusters must be at least 1"));
        }
        if self.n_normal == 0 {
            return Err(Error::param("n_normal must be at least 1"));
        }
        if !ordered(self.mu_range) || !ordered(self.sigma_range) || !ordered(self.outlier_region) {
            return Err(Error::param("ranges must be finite with lo <= hi"));
        }
        if self.sigma_range.0 <= 0.0 {
            return Err(Error::param("sigma_range must be positive"));
        }
        if self.mu_range.0 < self.outlier_region.0 || self.mu_range.1 > self.outlier_region.1 {
            return Err(Error::param("mu_range must lie inside outlier_region"));
        }
        Ok(())
    }

    /// Number of normal points assigned to each cluster; sizes differ by at most one.
    pub fn cluster_sizes(&self) -> Vec<usize> {
        let base = self.n_normal / self.n_clusters;
        let extra = self.n_normal % self.n_clusters;
        (0..self.n_clusters)
            .map(|c| base + usize::from(c < extra))
            .collect()
    }
}

/// Per-cluster, per-dimension Gaussian parameters drawn by the generator.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterModel {
    pub m: usize,
    /// `means[c][i]`
    pub means: Vec<Vec<f64>>,
    pub sigmas: Vec<Vec<f64>>,
    /// Cluster of each point, `None` for planted outliers.
    pub assignment: Vec<Option<usize>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseRecord {
    /// Row index in the dataset.
    pub row: usize,
    pub cluster: usize,
    /// Corrupted dimensions, ascending.
    pub dims: Vec<usize>,
    /// The coordinates as drawn from the cluster before corruption.
    pub clean: Vec<f64>,
}

/// A generated dataset together with the model that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct Synthetic<T> {
    pub dataset: Dataset<T>,
    pub model: ClusterModel,
    pub noise: Vec<NoiseRecord>,
}

/// Draws `n_normal` points from `n_clusters` axis-aligned Gaussian clusters
/// followed by `n_outliers` points spread uniformly over the span of cluster
/// means in every dimension.
///
/// Outlier coordinates are additionally clipped to `outlier_region` and to the
/// envelope of the normal points, so no single dimension exposes them.
pub fn generate_synthetic<T: Scalar>(spec: &GeneratorSpec) -> Result<Synthetic<T>> {
    spec.validate()?;
    let m = spec.m;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let mut means = Vec::with_capacity(spec.n_clusters);
    let mut sigmas = Vec::with_capacity(spec.n_clusters);
    for _ in 0..spec.n_clusters {
        let mut mu = Vec::with_capacity(m);
        let mut sigma = Vec::with_capacity(m);
        for _ in 0..m {
            mu.push(rng.random_range(spec.mu_range.0..=spec.mu_range.1));
            sigma.push(rng.random_range(spec.sigma_range.0..=spec.sigma_range.1));
        }
        means.push(mu);
        sigmas.push(sigma);
    }

    let n = spec.n_normal + spec.n_outliers;
    let mut values = Vec::with_capacity(n * m);
    let mut assignment = Vec::with_capacity(n);
    for (c, size) in spec.cluster_sizes().into_iter().enumerate() {
        for _ in 0..size {
            for i in 0..m {
                values.push(draw_normal(&mut rng, means[c][i], sigmas[c][i]));
            }
            assignment.push(Some(c));
        }
    }

    let mut envelope = vec![(f64::INFINITY, f64::NEG_INFINITY); m];
    for row in values.chunks(m) {
        for (env, &v) in envelope.iter_mut().zip(row) {
            env.0 = env.0.min(v);
            env.1 = env.1.max(v);
        }
    }
    let hull: Vec<(f64, f64)> = (0..m)
        .map(|i| {
            let (lo, hi) = means
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |acc, mu| {
                    (acc.0.min(mu[i]), acc.1.max(mu[i]))
                });
            let lo = lo.max(spec.outlier_region.0).max(envelope[i].0);
            let hi = hi.min(spec.outlier_region.1).min(envelope[i].1);
            // A degenerate envelope (tiny clusters) collapses onto its midpoint.
            if lo <= hi {
                (lo, hi)
            } else {
                let mid = 0.5 * (envelope[i].0 + envelope[i].1);
                (mid, mid)
            }
        })
        .collect();
    for _ in 0..spec.n_outliers {
        for &(lo, hi) in &hull {
            values.push(rng.random_range(lo..=hi));
        }
        assignment.push(None);
    }

    let labels = assignment
        .iter()
        .map(|a| {
            if a.is_some() {
                Label::Normal
            } else {
                Label::Outlier
            }
        })
        .collect();
    let dataset = Dataset::new(m, values.into_iter().map(T::lit).collect(), Some(labels))?;
    Ok(Synthetic {
        dataset,
        model: ClusterModel {
            m,
            means,
            sigmas,
            assignment,
        },
        noise: Vec::new(),
    })
}

/// Appends `spec.n_noise` points that follow a randomly chosen cluster in
/// every dimension except `spec.noise_dims` random ones, where they sit at
/// `mu +/- 4 sigma` of that cluster.
pub fn inject_noise_points<T: Scalar>(
    base: &Synthetic<T>,
    spec: &GeneratorSpec,
) -> Result<Synthetic<T>> {
    if spec.n_noise == 0 {
        return Ok(base.clone());
    }
    let m = base.dataset.m();
    if spec.noise_dims >= m {
        return Err(Error::param(format!(
            "noise_dims = {} must be below m = {m}",
            spec.noise_dims
        )));
    }
    if spec.noise_dims == 0 {
        return Err(Error::param("noise_dims must be at least 1"));
    }
    let model = &base.model;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed ^ NOISE_STREAM);

    let mut values: Vec<f64> = base.dataset.values().iter().map(|v| v.as_f64()).collect();
    let mut labels = base
        .dataset
        .labels()
        .map(<[Label]>::to_vec)
        .unwrap_or_else(|| vec![Label::Normal; base.dataset.n()]);
    let mut assignment = model.assignment.clone();
    let mut noise = base.noise.clone();
    for row_index in (base.dataset.n()..).take(spec.n_noise) {
        let c = rng.random_range(0..model.means.len());
        let clean: Vec<f64> = (0..m)
            .map(|i| draw_normal(&mut rng, model.means[c][i], model.sigmas[c][i]))
            .collect();
        let mut dims = index::sample(&mut rng, m, spec.noise_dims).into_vec();
        dims.sort_unstable();
        let mut row = clean.clone();
        for &i in &dims {
            let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            row[i] = model.means[c][i] + sign * 4.0 * model.sigmas[c][i];
        }
        values.extend_from_slice(&row);
        labels.push(Label::Noise);
        assignment.push(Some(c));
        noise.push(NoiseRecord {
            row: row_index,
            cluster: c,
            dims,
            clean,
        });
    }

    let dataset = Dataset::new(m, values.into_iter().map(T::lit).collect(), Some(labels))?;
    Ok(Synthetic {
        dataset,
        model: ClusterModel {
            assignment,
            ..model.clone()
        },
        noise,
    })
}

fn draw_normal<R: Rng>(rng: &mut R, mu: f64, sigma: f64) -> f64 {
    Normal::new(mu, sigma)
        .expect("sigma validated positive")
        .sample(rng)
}
