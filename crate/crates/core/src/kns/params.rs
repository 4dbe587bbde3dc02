use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Dimensions above which the full pair sweep is not the default.
pub const FULL_STRATEGY_MAX_DIMS: usize = 200;

/// Default cap on `projections x n` work units.
pub const DEFAULT_MAX_WORK: u64 = 20_000_000_000;

/// How second-stage projections are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// Every ordered dimension pair `(i, j)`, `i != j`.
    Full,
    /// `rounds` random dimension permutations, each dimension projected onto
    /// its successor in the permutation.
    Sampled,
}

/// How SI is turned into an anomaly key (higher is more outlying).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScoreMode {
    SiDesc,
    SiAsc,
    AbsLog,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    /// Single thread, fixed reduction order.
    Sequential,
    /// Work split into input-determined chunks reduced in a fixed order, so
    /// results do not depend on the thread count either.
    Parallel,
}

macro_rules! text_enum {
    ($ty:ident { $($variant:ident => $text:literal),+ $(,)? }) => {
        impl $ty {
            pub fn as_str(self) -> &'static str {
                match self { $($ty::$variant => $text),+ }
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl FromStr for $ty {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self> {
                match s {
                    $($text => Ok($ty::$variant),)+
                    other => Err(Error::param(format!(
                        concat!("unknown ", stringify!($ty), " {:?}"), other
                    ))),
                }
            }
        }
    };
}

text_enum!(Strategy { Full => "full", Sampled => "sampled" });
text_enum!(ScoreMode { SiDesc => "si_desc", SiAsc => "si_asc", AbsLog => "abs_log" });
text_enum!(Execution { Sequential => "sequential", Parallel => "parallel" });

#[derive(Debug, Clone, PartialEq)]
pub struct KnsParams {
    pub k: usize,
    /// Sections per dimension; `None` picks `ceil(1.2 * sqrt(n))`.
    pub scn: Option<usize>,
    /// `None` picks full for `m <= 200`, sampled above.
    pub strategy: Option<Strategy>,
    pub rounds: usize,
    pub score_mode: ScoreMode,
    pub seed: u64,
    pub execution: Execution,
    pub max_work: u64,
}

impl Default for KnsParams {
    fn default() -> Self {
        Self {
            k: 10,
            scn: None,
            strategy: None,
            rounds: 10,
            score_mode: ScoreMode::AbsLog,
            seed: 0,
            execution: Execution::Parallel,
            max_work: DEFAULT_MAX_WORK,
        }
    }
}

impl KnsParams {
    /// Sections with fewer members than this contribute a neutral 1 in the
    /// second stage: `ceil(1.5 k)`.
    pub fn small_section_threshold(&self) -> usize {
        (3 * self.k).div_ceil(2)
    }

    pub fn default_scn(n: usize) -> usize {
        ((1.2 * (n as f64).sqrt()).ceil() as usize).max(2)
    }

    pub fn resolve_scn(&self, n: usize) -> usize {
        self.scn.unwrap_or_else(|| Self::default_scn(n))
    }

    pub fn resolve_strategy(&self, m: usize) -> Strategy {
        self.strategy.unwrap_or(if m <= FULL_STRATEGY_MAX_DIMS {
            Strategy::Full
        } else {
            Strategy::Sampled
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::param("k must be at least 1"));
        }
        if self.rounds == 0 {
            return Err(Error::param("rounds must be at least 1"));
        }
        if matches!(self.scn, Some(s) if s < 2) {
            return Err(Error::param("scn must be at least 2"));
        }
        Ok(())
    }
}
