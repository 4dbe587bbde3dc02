//! Subspace outlier detection for high-dimensional data.
//!
//! The crate provides the k-nearest-sections (k-NS) detector built on an
//! equi-width section grid, a brute-force LOF baseline, a Gaussian-cluster
//! benchmark generator with planted inner outliers, and precision/recall
//! evaluation. All numeric code is generic over [`Scalar`] (`f32`/`f64`);
//! the `*64` and `*32` aliases below name the concrete instantiations.

pub mod dataset;
pub mod error;
pub mod eval;
pub mod kns;
pub mod lof;
pub mod scalar;
pub mod section_space;

pub use dataset::{load_matrix, write_csv, Dataset, GeneratorSpec, Label, PointId};
pub use error::{Error, Result};
pub use kns::{detect, rank_outliers, score, KnsParams, ScoreMode, ScoreReport, Strategy};
pub use lof::{lof_score, DistanceMatrix, LofParams, LofReport};
pub use scalar::Scalar;
pub use section_space::{DimensionRange, SectionSpace};

pub type Dataset64 = Dataset<f64>;
pub type Dataset32 = Dataset<f32>;
pub type SectionSpace64 = SectionSpace<f64>;
pub type SectionSpace32 = SectionSpace<f32>;
pub type ScoreReport64 = ScoreReport<f64>;
pub type ScoreReport32 = ScoreReport<f32>;
pub type LofReport64 = LofReport<f64>;
pub type LofReport32 = LofReport<f32>;
