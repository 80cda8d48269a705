use serde::{Deserialize, Serialize};

/// Parameters a run was configured with; absent where they do not apply.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportParams {
    #[serde(rename = "L")]
    pub delay_bound: Option<usize>,
    pub k: Option<usize>,
    pub r: Option<usize>,
    pub seed: Option<u64>,
}

/// Wall-clock milliseconds per construction phase.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PhaseTimings {
    pub graph: f64,
    pub forest: f64,
    pub build: f64,
    pub total: f64,
}

impl PhaseTimings {
    pub fn phase_sum(&self) -> f64 {
        self.graph + self.forest + self.build
    }
}

/// Sizes, delays and timings for one compression run.
///
/// `compression_ratio` counts transitions (`total_after / (n·|Σ|)`); every
/// construction keeps the state set, so a state-count ratio would always be 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompressionReport {
    pub algorithm: String,
    pub params: ReportParams,
    pub n: usize,
    pub alphabet_size: usize,
    pub labeled_before: usize,
    pub labeled_after: usize,
    pub default_count: usize,
    pub total_after: usize,
    pub compression_ratio: f64,
    pub longest_delay: usize,
    pub elapsed_ms: PhaseTimings,
    /// Edges in the similarity graph, for graph-based algorithms.
    pub srg_edge_count: Option<usize>,
}
