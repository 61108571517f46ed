//! Pairwise classification and Kendall's tau-b.
//!
//! For observations `(x_i, y_i)` and `(x_j, y_j)` the pair is *concordant*
//! when `sgn(x_j - x_i) = sgn(y_j - y_i) != 0`, *discordant* when the signs
//! are nonzero and opposite, and otherwise one of three tie classes. With
//! `c`, `d`, `t_x`, `t_y` counting concordant, discordant, x-only-tied and
//! y-only-tied pairs,
//!
//! ```text
//! tau_b = (c - d) / sqrt((c + d + t_x) * (c + d + t_y))
//! ```
//!
//! [`tau_b_brute`] evaluates this literally over all `m(m-1)/2` pairs.
//! [`tau_b_fast`] produces the same counts in `O(m log m)` by sorting on
//! `x` and counting inversions in `y` with a merge sort.

mod fast;
mod generate;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::{DatasetError, Observation, RankedDataset};
use crate::geometry::{anchor_pair, dissimilarity_of_pair, TransformConfig};

pub use self::fast::tau_b_fast;
pub use self::generate::{generate_permutation_with_target_tau, inversions_for_target};

#[derive(Debug, Error, PartialEq)]
pub enum KendallError {
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error("tau is undefined: a column is entirely tied")]
    UndefinedTau { counts: PairCounts },
    #[error("target tau must be finite, got {0}")]
    BadTarget(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairClass {
    Concordant,
    Discordant,
    TieX,
    TieY,
    #[serde(rename = "tie_xy")]
    TieXY,
}

impl PairClass {
    pub const ALL: [PairClass; 5] = [
        PairClass::Concordant,
        PairClass::Discordant,
        PairClass::TieX,
        PairClass::TieY,
        PairClass::TieXY,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PairClass::Concordant => "concordant",
            PairClass::Discordant => "discordant",
            PairClass::TieX => "tie_x",
            PairClass::TieY => "tie_y",
            PairClass::TieXY => "tie_xy",
        }
    }

    pub fn is_tie(self) -> bool {
        !matches!(self, PairClass::Concordant | PairClass::Discordant)
    }
}

impl fmt::Display for PairClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PairClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PairClass::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| format!("unknown pair class {s:?}"))
    }
}

fn sign(diff: f64, epsilon: f64) -> i8 {
    if diff.abs() <= epsilon {
        0
    } else if diff > 0.0 {
        1
    } else {
        -1
    }
}

/// Classifies with exact signs.
pub fn classify_pair(a: &Observation, b: &Observation) -> PairClass {
    classify_pair_with_tolerance(a, b, 0.0)
}

/// Classifies treating any difference with `|diff| <= epsilon` as a tie.
pub fn classify_pair_with_tolerance(a: &Observation, b: &Observation, epsilon: f64) -> PairClass {
    let sx = sign(b.x - a.x, epsilon);
    let sy = sign(b.y - a.y, epsilon);
    match (sx, sy) {
        (0, 0) => PairClass::TieXY,
        (0, _) => PairClass::TieX,
        (_, 0) => PairClass::TieY,
        _ if sx == sy => PairClass::Concordant,
        _ => PairClass::Discordant,
    }
}

/// One unordered pair `(i, j)`, `i < j`, with its class and the anchored
/// deltas used by the geometry module.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairComparison {
    pub i: usize,
    pub j: usize,
    pub class: PairClass,
    /// Index of the observation translated to the origin.
    pub anchor: usize,
    pub dx: f64,
    pub dy: f64,
    pub dissimilarity: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairCounts {
    pub concordant: u64,
    pub discordant: u64,
    pub tie_x: u64,
    pub tie_y: u64,
    pub tie_xy: u64,
    pub total: u64,
}

impl PairCounts {
    pub fn add(&mut self, class: PairClass) {
        match class {
            PairClass::Concordant => self.concordant += 1,
            PairClass::Discordant => self.discordant += 1,
            PairClass::TieX => self.tie_x += 1,
            PairClass::TieY => self.tie_y += 1,
            PairClass::TieXY => self.tie_xy += 1,
        }
        self.total += 1;
    }

    pub fn from_classes(classes: impl IntoIterator<Item = PairClass>) -> Self {
        let mut counts = Self::default();
        for c in classes {
            counts.add(c);
        }
        counts
    }

    pub fn get(&self, class: PairClass) -> u64 {
        match class {
            PairClass::Concordant => self.concordant,
            PairClass::Discordant => self.discordant,
            PairClass::TieX => self.tie_x,
            PairClass::TieY => self.tie_y,
            PairClass::TieXY => self.tie_xy,
        }
    }

    /// tau-b from the tallies, or `None` when a denominator factor is zero.
    pub fn tau_b(&self) -> Option<f64> {
        let cd = self.concordant + self.discordant;
        let fx = cd + self.tie_x;
        let fy = cd + self.tie_y;
        if fx == 0 || fy == 0 {
            return None;
        }
        let num = self.concordant as f64 - self.discordant as f64;
        let tau = num / ((fx as f64) * (fy as f64)).sqrt();
        Some(tau.clamp(-1.0, 1.0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TauResult {
    /// `None` when tau is undefined (a column is entirely tied).
    pub tau: Option<f64>,
    pub counts: PairCounts,
}

impl TauResult {
    pub fn from_counts(counts: PairCounts) -> Self {
        Self {
            tau: counts.tau_b(),
            counts,
        }
    }

    pub fn value(&self) -> Result<f64, KendallError> {
        self.tau.ok_or(KendallError::UndefinedTau {
            counts: self.counts,
        })
    }

    /// `tau=-0.2143 c=11 d=17 t_x=0 t_y=0 t_xy=0`
    pub fn summary_line(&self) -> String {
        let tau = match self.tau {
            Some(t) => format!("{t:.4}"),
            None => "undefined".into(),
        };
        let c = &self.counts;
        format!(
            "tau={tau} c={} d={} t_x={} t_y={} t_xy={}",
            c.concordant, c.discordant, c.tie_x, c.tie_y, c.tie_xy
        )
    }
}

const PARALLEL_THRESHOLD: usize = 512;

fn comparison(obs: &[Observation], i: usize, j: usize, config: &TransformConfig) -> PairComparison {
    let (a, b) = (&obs[i], &obs[j]);
    let anchored = anchor_pair(a, b, config.anchor_policy);
    PairComparison {
        i,
        j,
        class: classify_pair_with_tolerance(a, b, config.tie_epsilon),
        anchor: if anchored.anchor_is_first { i } else { j },
        dx: anchored.delta.x,
        dy: anchored.delta.y,
        dissimilarity: dissimilarity_of_pair(anchored.delta),
    }
}

/// The comparison of observations `i < j`, or `None` when the indices are
/// out of range or not increasing.
pub fn compare_pair(
    dataset: &RankedDataset,
    i: usize,
    j: usize,
    config: &TransformConfig,
) -> Option<PairComparison> {
    (i < j && j < dataset.len()).then(|| comparison(&dataset.observations, i, j, config))
}

/// Every unordered pair in lexicographic `(i, j)` order.
pub fn enumerate_comparisons(
    dataset: &RankedDataset,
    config: &TransformConfig,
) -> Result<Vec<PairComparison>, KendallError> {
    dataset.ensure_usable()?;
    let obs = &dataset.observations;
    let m = obs.len();
    let row = |i: usize| (i + 1..m).map(move |j| comparison(obs, i, j, config));
    let out = if m >= PARALLEL_THRESHOLD {
        (0..m).into_par_iter().flat_map_iter(row).collect()
    } else {
        (0..m).flat_map(row).collect()
    };
    Ok(out)
}

/// Exact O(m²) evaluation of the tau-b definition.
pub fn tau_b_brute(dataset: &RankedDataset) -> Result<TauResult, KendallError> {
    tau_b_brute_with_tolerance(dataset, 0.0)
}

pub fn tau_b_brute_with_tolerance(
    dataset: &RankedDataset,
    epsilon: f64,
) -> Result<TauResult, KendallError> {
    dataset.ensure_usable()?;
    let obs = &dataset.observations;
    let mut counts = PairCounts::default();
    for i in 0..obs.len() {
        for j in i + 1..obs.len() {
            counts.add(classify_pair_with_tolerance(&obs[i], &obs[j], epsilon));
        }
    }
    Ok(TauResult::from_counts(counts))
}
