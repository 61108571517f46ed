use serde::{Deserialize, Serialize};

use super::{
    transform_all, AnchorPolicy, GeometryError, Quadrant, TransformConfig, TransformMode, Vec2,
};
use crate::dataset::{Observation, RankedDataset};
use crate::kendall::{PairClass, PairCounts};

/// JSON exchange form of one transformed pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentRecord {
    pub i: usize,
    pub j: usize,
    pub class: PairClass,
    /// Index of the anchored observation.
    pub anchor: usize,
    /// Anchored delta, i.e. the translated (pre-rotation) endpoint.
    pub x: f64,
    pub y: f64,
    pub endpoint: Vec2,
    pub dissimilarity: f64,
    /// Geometric quadrant of `endpoint` in the plotted plane.
    pub quadrant: Quadrant,
}

/// Full geometry of a dataset under one transform configuration. This is
/// what `taugraph plot --json` writes and what the HTTP service returns
/// from `/geometry`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometryDocument {
    pub x_name: String,
    pub y_name: String,
    pub m: usize,
    pub mode: TransformMode,
    pub anchor_policy: AnchorPolicy,
    pub tie_epsilon: f64,
    pub tau: Option<f64>,
    pub counts: PairCounts,
    pub observations: Vec<Observation>,
    pub segments: Vec<SegmentRecord>,
}

impl GeometryDocument {
    pub fn build(
        dataset: &RankedDataset,
        config: &TransformConfig,
    ) -> Result<Self, GeometryError> {
        let segments = transform_all(dataset, config)?;
        let counts = PairCounts::from_classes(segments.iter().map(|s| s.pair.class));
        Ok(Self {
            x_name: dataset.x_name.clone(),
            y_name: dataset.y_name.clone(),
            m: dataset.len(),
            mode: config.mode,
            anchor_policy: config.anchor_policy,
            tie_epsilon: config.tie_epsilon,
            tau: counts.tau_b(),
            counts,
            observations: dataset.observations.clone(),
            segments: segments
                .into_iter()
                .map(|s| SegmentRecord {
                    i: s.pair.i,
                    j: s.pair.j,
                    class: s.pair.class,
                    anchor: s.pair.anchor,
                    x: s.pair.dx,
                    y: s.pair.dy,
                    endpoint: s.endpoint,
                    dissimilarity: s.pair.dissimilarity,
                    quadrant: Quadrant::of_point(s.endpoint),
                })
                .collect(),
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("geometry is always serializable")
    }

    pub fn segment(&self, i: usize, j: usize) -> Option<&SegmentRecord> {
        // lexicographic (i, j) order
        self.segments
            .binary_search_by(|s| (s.i, s.j).cmp(&(i, j)))
            .ok()
            .map(|k| &self.segments[k])
    }
}
