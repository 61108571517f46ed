//! Rigid transforms of pairwise comparisons.
//!
//! Each pair is first translated so that its anchor observation sits at the
//! origin, leaving the delta `(dx, dy)` from anchor to partner. In
//! [`TransformMode::TranslateRotate`] the delta is then rotated about the
//! origin so its polar angle doubles (`θ → 2θ`) while its length is kept.
//! With the default anchor (lowest `x`, then lowest `y`) every delta has
//! `θ ∈ (-90°, 90°]`, so after doubling:
//!
//! | class       | delta              | endpoint                     |
//! |-------------|--------------------|------------------------------|
//! | concordant  | `dx > 0, dy > 0`   | above the x-axis (QI or QII) |
//! | discordant  | `dx > 0, dy < 0`   | below the x-axis (QIII, QIV) |
//! | x tie       | `dx = 0, dy > 0`   | negative x-axis              |
//! | y tie       | `dx > 0, dy = 0`   | positive x-axis              |
//! | both tied   | `(0, 0)`           | origin                       |
//!
//! The side of the y-axis records which variable moved more: `dx > |dy|`
//! lands right of it, `dx < |dy|` left.

mod clock;
mod document;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::{Observation, RankedDataset};
use crate::kendall::{compare_pair, enumerate_comparisons, KendallError, PairComparison};

pub use self::clock::{clock_vectors, ClockMode, ClockVectors};
pub use self::document::{GeometryDocument, SegmentRecord};

#[derive(Debug, Error, PartialEq)]
pub enum GeometryError {
    #[error(transparent)]
    Kendall(#[from] KendallError),
    #[error("operation needs {expected} segments, got {found}")]
    ModeMismatch {
        expected: TransformMode,
        found: TransformMode,
    },
    #[error("calibrated clock summary needs a defined tau")]
    UndefinedTau,
    #[error("tie epsilon must be finite and non-negative, got {0}")]
    BadEpsilon(f64),
}

/// A point or displacement in the plane. Serializes as `[x, y]`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn length(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    pub fn scale(self, k: f64) -> Self {
        Self::new(self.x * k, self.y * k)
    }

    pub fn normalized(self) -> Option<Self> {
        let len = self.length();
        (len > 0.0).then(|| self.scale(1.0 / len))
    }
}

impl From<[f64; 2]> for Vec2 {
    fn from([x, y]: [f64; 2]) -> Self {
        Self { x, y }
    }
}

impl From<Vec2> for [f64; 2] {
    fn from(v: Vec2) -> Self {
        [v.x, v.y]
    }
}

impl std::ops::Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl std::ops::Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

macro_rules! token_enum {
    ($name:ident { $($variant:ident => $token:literal),+ $(,)? }) => {
        impl $name {
            pub fn as_str(self) -> &'static str {
                match self {
                    $($name::$variant => $token),+
                }
            }

            pub fn tokens() -> &'static [&'static str] {
                &[$($token),+]
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl FromStr for $name {
            type Err = String;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                match s {
                    $($token => Ok($name::$variant),)+
                    other => Err(format!(
                        "unknown {} {other:?} (expected one of: {})",
                        stringify!($name),
                        Self::tokens().join(", ")
                    )),
                }
            }
        }
    };
}
pub(crate) use token_enum;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TransformMode {
    TranslateOnly,
    #[default]
    TranslateRotate,
}

token_enum!(TransformMode {
    TranslateOnly => "translate-only",
    TranslateRotate => "translate-rotate",
});

/// Which observation of a pair is moved to the origin.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AnchorPolicy {
    /// Lowest x; lowest y breaks x ties.
    #[default]
    MinXThenMinY,
    /// Highest x; highest y breaks x ties.
    MaxXThenMaxY,
    /// The lower-index observation.
    FirstIndex,
}

token_enum!(AnchorPolicy {
    MinXThenMinY => "min-x",
    MaxXThenMaxY => "max-x",
    FirstIndex => "first-index",
});

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransformConfig {
    pub mode: TransformMode,
    pub anchor_policy: AnchorPolicy,
    /// Differences with magnitude at or below this are ties.
    pub tie_epsilon: f64,
}

impl Default for TransformConfig {
    fn default() -> Self {
        Self {
            mode: TransformMode::TranslateRotate,
            anchor_policy: AnchorPolicy::MinXThenMinY,
            tie_epsilon: 0.0,
        }
    }
}

impl TransformConfig {
    pub fn translate_only() -> Self {
        Self {
            mode: TransformMode::TranslateOnly,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        if self.tie_epsilon.is_finite() && self.tie_epsilon >= 0.0 {
            Ok(())
        } else {
            Err(GeometryError::BadEpsilon(self.tie_epsilon))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Anchored {
    pub anchor: Vec2,
    pub delta: Vec2,
    /// True when the first argument was chosen as the anchor.
    pub anchor_is_first: bool,
}

/// Picks the anchor of `a` (lower index) and `b` and returns the delta from
/// anchor to partner. Exact duplicates anchor on `a`.
pub fn anchor_pair(a: &Observation, b: &Observation, policy: AnchorPolicy) -> Anchored {
    let a_first = match policy {
        AnchorPolicy::MinXThenMinY => !((b.x, b.y) < (a.x, a.y)),
        AnchorPolicy::MaxXThenMaxY => !((a.x, a.y) < (b.x, b.y)),
        AnchorPolicy::FirstIndex => true,
    };
    let (pa, pb) = (Vec2::new(a.x, a.y), Vec2::new(b.x, b.y));
    if a_first {
        Anchored {
            anchor: pa,
            delta: pb - pa,
            anchor_is_first: true,
        }
    } else {
        Anchored {
            anchor: pb,
            delta: pa - pb,
            anchor_is_first: false,
        }
    }
}

/// Maps an anchored delta into the plotted plane.
///
/// Rotation uses the double-angle closed form on the unit direction,
/// `(cos²θ - sin²θ, 2 sinθ cosθ)`, scaled back by the length.
pub fn transform_pair(delta: Vec2, mode: TransformMode) -> Vec2 {
    match mode {
        TransformMode::TranslateOnly => delta,
        TransformMode::TranslateRotate => {
            let r = delta.length();
            if r == 0.0 {
                return Vec2::ZERO;
            }
            let (c, s) = (delta.x / r, delta.y / r);
            Vec2::new(r * (c * c - s * s), 2.0 * r * c * s)
        }
    }
}

/// `|dx - dy|` of an anchored delta.
pub fn dissimilarity_of_pair(delta: Vec2) -> f64 {
    (delta.x - delta.y).abs()
}

/// Dissimilarity of the delta that lands at `point`.
///
/// In rotated mode the preimage under min-x anchoring has angle `φ/2`,
/// giving `r·√2·|cos(φ/2 + π/4)|`.
pub fn dissimilarity_field_at(point: Vec2, mode: TransformMode) -> f64 {
    match mode {
        TransformMode::TranslateOnly => (point.x - point.y).abs(),
        TransformMode::TranslateRotate => {
            let r = point.length();
            if r == 0.0 {
                return 0.0;
            }
            let phi = point.angle();
            r * std::f64::consts::SQRT_2 * (phi / 2.0 + std::f64::consts::FRAC_PI_4).cos().abs()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransformedSegment {
    pub pair: PairComparison,
    pub mode: TransformMode,
    /// Anchor position in the original plane.
    pub anchor: Vec2,
    pub endpoint: Vec2,
    /// Polar angle of the anchored delta before doubling.
    pub angle_theta: f64,
    pub length: f64,
}

impl TransformedSegment {
    pub fn delta(&self) -> Vec2 {
        Vec2::new(self.pair.dx, self.pair.dy)
    }
}

/// One segment per pair, in `(i, j)` order.
pub fn transform_all(
    dataset: &RankedDataset,
    config: &TransformConfig,
) -> Result<Vec<TransformedSegment>, GeometryError> {
    config.validate()?;
    let pairs = enumerate_comparisons(dataset, config)?;
    Ok(pairs
        .into_iter()
        .map(|pair| segment_of(dataset, pair, config.mode))
        .collect())
}

/// The segment of a single pair `i < j`.
pub fn transform_one(
    dataset: &RankedDataset,
    i: usize,
    j: usize,
    config: &TransformConfig,
) -> Result<Option<TransformedSegment>, GeometryError> {
    config.validate()?;
    Ok(compare_pair(dataset, i, j, config).map(|pair| segment_of(dataset, pair, config.mode)))
}

fn segment_of(dataset: &RankedDataset, pair: PairComparison, mode: TransformMode) -> TransformedSegment {
    let delta = Vec2::new(pair.dx, pair.dy);
    let a = &dataset.observations[pair.anchor];
    TransformedSegment {
        mode,
        anchor: Vec2::new(a.x, a.y),
        endpoint: transform_pair(delta, mode),
        angle_theta: delta.angle(),
        length: delta.length(),
        pair,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quadrant {
    Q1,
    Q2,
    Q3,
    Q4,
    PosXAxis,
    NegXAxis,
    PosYAxis,
    NegYAxis,
    Origin,
}

/// Relative band within which a coordinate counts as lying on an axis.
pub const AXIS_TOLERANCE: f64 = 1e-9;

impl Quadrant {
    /// Locates `p`; a coordinate with `|c| <= 1e-9·|p|` is on the axis.
    pub fn of_point(p: Vec2) -> Quadrant {
        let len = p.length();
        if len == 0.0 {
            return Quadrant::Origin;
        }
        let band = AXIS_TOLERANCE * len;
        let on_x = p.y.abs() <= band;
        let on_y = p.x.abs() <= band;
        match (on_x, on_y) {
            (true, _) if p.x > 0.0 => Quadrant::PosXAxis,
            (true, _) => Quadrant::NegXAxis,
            (_, true) if p.y > 0.0 => Quadrant::PosYAxis,
            (_, true) => Quadrant::NegYAxis,
            _ => match (p.x > 0.0, p.y > 0.0) {
                (true, true) => Quadrant::Q1,
                (false, true) => Quadrant::Q2,
                (false, false) => Quadrant::Q3,
                (true, false) => Quadrant::Q4,
            },
        }
    }

    pub fn is_above_x_axis(self) -> bool {
        matches!(self, Quadrant::Q1 | Quadrant::Q2 | Quadrant::PosYAxis)
    }

    pub fn is_below_x_axis(self) -> bool {
        matches!(self, Quadrant::Q3 | Quadrant::Q4 | Quadrant::NegYAxis)
    }
}

/// Quadrant of a rotated segment's endpoint.
pub fn quadrant_of(segment: &TransformedSegment) -> Result<Quadrant, GeometryError> {
    if segment.mode != TransformMode::TranslateRotate {
        return Err(GeometryError::ModeMismatch {
            expected: TransformMode::TranslateRotate,
            found: segment.mode,
        });
    }
    Ok(Quadrant::of_point(segment.endpoint))
}
