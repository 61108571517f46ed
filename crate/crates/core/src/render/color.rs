use serde::{Deserialize, Serialize};

use crate::kendall::PairClass;

/// Color ramp for the heatmap and density layers.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Palette {
    /// Perceptually uniform ramp (viridis control points).
    #[default]
    Viridis,
    Grayscale,
}

// viridis sampled at 0, 1/8, ..., 1
const VIRIDIS: [(u8, u8, u8); 9] = [
    (68, 1, 84),
    (71, 44, 122),
    (59, 81, 139),
    (44, 113, 142),
    (33, 144, 141),
    (39, 173, 129),
    (92, 200, 99),
    (170, 220, 50),
    (253, 231, 37),
];

impl Palette {
    /// Color at `t ∈ [0, 1]`, clamped.
    pub fn at(self, t: f64) -> String {
        let t = if t.is_finite() { t.clamp(0.0, 1.0) } else { 0.0 };
        match self {
            Palette::Viridis => {
                let pos = t * (VIRIDIS.len() - 1) as f64;
                let k = (pos.floor() as usize).min(VIRIDIS.len() - 2);
                let f = pos - k as f64;
                let (a, b) = (VIRIDIS[k], VIRIDIS[k + 1]);
                let mix = |x: u8, y: u8| (x as f64 + f * (y as f64 - x as f64)).round() as u8;
                hex(mix(a.0, b.0), mix(a.1, b.1), mix(a.2, b.2))
            }
            Palette::Grayscale => {
                let v = (255.0 * (1.0 - t)).round() as u8;
                hex(v, v, v)
            }
        }
    }
}

fn hex(r: u8, g: u8, b: u8) -> String {
    format!("#{r:02x}{g:02x}{b:02x}")
}

/// Stroke color per pair class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassColors {
    pub concordant: String,
    pub discordant: String,
    pub tie_x: String,
    pub tie_y: String,
    pub tie_xy: String,
}

impl Default for ClassColors {
    fn default() -> Self {
        Self {
            concordant: "#1f77b4".into(),
            discordant: "#ff7f0e".into(),
            tie_x: "#7f7f7f".into(),
            tie_y: "#7f7f7f".into(),
            tie_xy: "#7f7f7f".into(),
        }
    }
}

impl ClassColors {
    pub fn get(&self, class: PairClass) -> &str {
        match class {
            PairClass::Concordant => &self.concordant,
            PairClass::Discordant => &self.discordant,
            PairClass::TieX => &self.tie_x,
            PairClass::TieY => &self.tie_y,
            PairClass::TieXY => &self.tie_xy,
        }
    }
}
