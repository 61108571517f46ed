use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{token_enum, GeometryError, TransformMode, TransformedSegment, Vec2};
use crate::kendall::{PairClass, TauResult};

/// How the red summary vector of a clock plot is derived.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClockMode {
    /// Mean of the unit vectors of all concordant and discordant pairs.
    Empirical,
    /// Unit direction at angle `τ·π/2`, scaled by `|τ|`.
    #[default]
    Calibrated,
}

token_enum!(ClockMode {
    Empirical => "empirical",
    Calibrated => "calibrated",
});

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClockVectors {
    pub concordant_mean: Option<Vec2>,
    pub discordant_mean: Option<Vec2>,
    pub summary: Option<Vec2>,
    /// Direction of the summary from the positive x-axis. In calibrated
    /// mode this is exactly `τ·π/2`, including when the summary has zero
    /// length.
    pub summary_angle: Option<f64>,
    pub mode: ClockMode,
}

#[derive(Default)]
struct Mean {
    sum: Vec2,
    n: usize,
}

impl Mean {
    fn push(&mut self, v: Vec2) {
        self.sum = self.sum + v;
        self.n += 1;
    }

    fn get(&self) -> Option<Vec2> {
        (self.n > 0).then(|| self.sum.scale(1.0 / self.n as f64))
    }
}

/// Mean concordant, mean discordant and summary vectors over rotated
/// segments. Each endpoint is normalized to unit length before averaging.
pub fn clock_vectors(
    segments: &[TransformedSegment],
    tau: &TauResult,
    mode: ClockMode,
) -> Result<ClockVectors, GeometryError> {
    if let Some(s) = segments
        .iter()
        .find(|s| s.mode != TransformMode::TranslateRotate)
    {
        return Err(GeometryError::ModeMismatch {
            expected: TransformMode::TranslateRotate,
            found: s.mode,
        });
    }

    let (mut conc, mut disc, mut both) = (Mean::default(), Mean::default(), Mean::default());
    for s in segments {
        let Some(unit) = s.endpoint.normalized() else {
            continue;
        };
        match s.pair.class {
            PairClass::Concordant => conc.push(unit),
            PairClass::Discordant => disc.push(unit),
            _ => continue,
        }
        both.push(unit);
    }

    let (summary, summary_angle) = match mode {
        ClockMode::Empirical => {
            let s = both.get();
            (s, s.map(Vec2::angle))
        }
        ClockMode::Calibrated => {
            let t = tau.tau.ok_or(GeometryError::UndefinedTau)?;
            let angle = t * FRAC_PI_2;
            let v = Vec2::new(angle.cos(), angle.sin()).scale(t.abs());
            (Some(v), Some(angle))
        }
    };

    Ok(ClockVectors {
        concordant_mean: conc.get(),
        discordant_mean: disc.get(),
        summary,
        summary_angle,
        mode,
    })
}
