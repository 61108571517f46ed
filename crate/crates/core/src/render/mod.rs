//! Deterministic SVG output for every plot style.
//!
//! Layers, bottom to top: dissimilarity heatmap, density contours,
//! untransformed pair lines and transformed segments, endpoint markers,
//! clock vectors. [`plot`] computes whatever a [`PlotStyle`] needs and hands
//! it to [`render_svg`]; the CLI and the HTTP service both go through it so
//! their output is byte-identical.

mod bars;
mod color;
mod contour;
mod kde;
mod plot;
mod svg;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::RankedDataset;
use crate::geometry::{clock_vectors, transform_all, ClockMode, GeometryError, TransformConfig};
use crate::kendall::{PairCounts, TauResult};

pub use self::bars::render_pair_bars;
pub use self::color::{ClassColors, Palette};
pub use self::contour::{contour_polylines, default_levels, ContourLevel, Polyline};
pub use self::kde::{kde_grid, kde_grid_in, scott_bandwidth, DensityGrid, Extent};
pub use self::plot::render_svg;
pub use self::svg::{num as format_number, Frame};

#[derive(Debug, Error, PartialEq)]
pub enum RenderError {
    #[error("no plot layers selected")]
    EmptyStyle,
    #[error("unknown style token {0:?} (expected lines, segments, points, density, clock, heatmap)")]
    UnknownStyle(String),
    #[error("{0} layer requested but its input was not supplied")]
    MissingLayer(&'static str),
    #[error("invalid render configuration: {0}")]
    InvalidConfig(String),
    #[error("density estimate needs at least one point")]
    EmptyPoints,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Which layers to draw and how pairs are transformed.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PlotStyle {
    /// Pairwise lines between the original coordinates.
    pub untransformed_lines: bool,
    pub segments: bool,
    pub points: bool,
    pub density: bool,
    pub clock: bool,
    pub heatmap_background: bool,
    pub transform: TransformConfig,
    pub clock_mode: ClockMode,
}

impl PlotStyle {
    pub const TOKENS: [&'static str; 6] = ["lines", "segments", "points", "density", "clock", "heatmap"];

    /// Parses comma-separated layer tokens such as `"segments,clock"`.
    pub fn from_tokens(tokens: &str) -> Result<Self, RenderError> {
        let mut style = PlotStyle::default();
        for tok in tokens.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            match tok {
                "lines" => style.untransformed_lines = true,
                "segments" => style.segments = true,
                "points" => style.points = true,
                "density" => style.density = true,
                "clock" => style.clock = true,
                "heatmap" => style.heatmap_background = true,
                other => return Err(RenderError::UnknownStyle(other.to_string())),
            }
        }
        Ok(style)
    }

    pub fn with_transform(mut self, transform: TransformConfig) -> Self {
        self.transform = transform;
        self
    }

    pub fn with_clock_mode(mut self, mode: ClockMode) -> Self {
        self.clock_mode = mode;
        self
    }

    pub fn has_any_layer(&self) -> bool {
        self.untransformed_lines || self.has_transformed_layer()
    }

    /// True when any layer lives in the transformed plane.
    pub fn has_transformed_layer(&self) -> bool {
        self.segments || self.points || self.density || self.clock || self.heatmap_background
    }

    pub fn tokens(&self) -> String {
        let flags = [
            self.untransformed_lines,
            self.segments,
            self.points,
            self.density,
            self.clock,
            self.heatmap_background,
        ];
        Self::TOKENS
            .iter()
            .zip(flags)
            .filter(|(_, on)| *on)
            .map(|(t, _)| *t)
            .collect::<Vec<_>>()
            .join(",")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RenderConfig {
    pub width: u32,
    pub height: u32,
    pub margin: u32,
    pub palette: Palette,
    pub contour_levels: usize,
    pub class_colors: ClassColors,
    /// When false a render timestamp comment is embedded.
    pub deterministic: bool,
    /// Cells per axis of the density grid.
    pub density_resolution: usize,
    /// Cells per axis of the heatmap background.
    pub heatmap_resolution: usize,
}

impl Default for RenderConfig {
    fn default() -> Self {
        Self {
            width: 640,
            height: 640,
            margin: 48,
            palette: Palette::Viridis,
            contour_levels: 6,
            class_colors: ClassColors::default(),
            deterministic: true,
            density_resolution: 80,
            heatmap_resolution: 48,
        }
    }
}

impl RenderConfig {
    pub fn validate(&self) -> Result<(), RenderError> {
        if self.width <= 2 * self.margin || self.height <= 2 * self.margin {
            return Err(RenderError::InvalidConfig(format!(
                "{}x{} canvas leaves no room inside a {} px margin",
                self.width, self.height, self.margin
            )));
        }
        if self.contour_levels == 0 {
            return Err(RenderError::InvalidConfig("contour_levels must be >= 1".into()));
        }
        if self.density_resolution < 2 || self.heatmap_resolution < 1 {
            return Err(RenderError::InvalidConfig("grid resolution too small".into()));
        }
        Ok(())
    }
}

/// Computes every layer `style` asks for and renders the SVG.
pub fn plot(
    dataset: &RankedDataset,
    style: &PlotStyle,
    config: &RenderConfig,
) -> Result<String, RenderError> {
    if !style.has_any_layer() {
        return Err(RenderError::EmptyStyle);
    }
    config.validate()?;
    let needs_segments = style.has_transformed_layer() || style.untransformed_lines;
    let segments = if needs_segments {
        Some(transform_all(dataset, &style.transform)?)
    } else {
        None
    };
    let clock = match (&segments, style.clock) {
        (Some(segs), true) => {
            let tau = TauResult::from_counts(PairCounts::from_classes(
                segs.iter().map(|s| s.pair.class),
            ));
            Some(clock_vectors(segs, &tau, style.clock_mode)?)
        }
        _ => None,
    };
    let grid = match (&segments, style.density) {
        (Some(segs), true) => {
            let pts: Vec<_> = segs.iter().map(|s| s.endpoint).collect();
            Some(kde_grid(
                &pts,
                config.density_resolution,
                config.density_resolution,
                None,
            )?)
        }
        _ => None,
    };
    render_svg(
        dataset,
        segments.as_deref(),
        clock.as_ref(),
        grid.as_ref(),
        style,
        config,
    )
}
