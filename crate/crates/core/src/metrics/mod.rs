//! Verification and morphing-attack metrics.
//!
//! All rates use the acceptance convention `score >= threshold` on
//! similarity scores.

mod report;
mod scenario;

pub use report::{emit_report, evaluate, format_cell, format_percent, read_report_csv, EvalReport, ReportEntry, ReportFormat};
pub use scenario::{
    assemble_scenario, plan_comparisons, BonaFideImage, ComparisonPlan, MorphImage,
    PairingRules, ScenarioConfig, ScenarioCounts, ScenarioMode,
};

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Operating point used throughout: FMR = 0.1 %.
pub const DEFAULT_TARGET_FMR: f64 = 0.001;

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("score list is empty")]
    EmptyScores,
    #[error("target FMR must lie strictly between 0 and 1, got {0}")]
    InvalidTarget(f64),
    #[error("inconsistent labels: {0}")]
    InconsistentLabels(String),
    #[error("unknown subject {0:?}")]
    UnknownSubject(String),
    #[error("invalid value {value:?} for {what}")]
    InvalidValue { what: &'static str, value: String },
}

pub type Result<T> = std::result::Result<T, MetricsError>;

/// How a morph with several contributing subjects counts as accepted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MmpmrRule {
    /// Accepted only if every contributing subject is matched.
    #[default]
    Min,
    /// Accepted if at least one contributing subject is matched.
    Any,
}

impl fmt::Display for MmpmrRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MmpmrRule::Min => "min",
            MmpmrRule::Any => "any",
        })
    }
}

impl FromStr for MmpmrRule {
    type Err = MetricsError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "min" => Ok(MmpmrRule::Min),
            "any" => Ok(MmpmrRule::Any),
            _ => Err(MetricsError::InvalidValue {
                what: "mmpmr rule",
                value: s.to_string(),
            }),
        }
    }
}

/// One morph-attack comparison attributed to a contributing subject.
#[derive(Debug, Clone, PartialEq)]
pub struct MorphScore {
    pub morph_id: String,
    pub subject_id: String,
    pub score: f64,
}

impl MorphScore {
    pub fn new(morph_id: impl Into<String>, subject_id: impl Into<String>, score: f64) -> Self {
        MorphScore {
            morph_id: morph_id.into(),
            subject_id: subject_id.into(),
            score,
        }
    }
}

/// Scores partitioned by comparison type.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScoreSet {
    pub genuine: Vec<f64>,
    pub impostor: Vec<f64>,
    pub morph_attacks: Vec<MorphScore>,
}

impl ScoreSet {
    pub fn n_morphs(&self) -> usize {
        let mut ids: Vec<&str> = self.morph_attacks.iter().map(|m| m.morph_id.as_str()).collect();
        ids.sort_unstable();
        ids.dedup();
        ids.len()
    }
}

/// Fraction of impostor scores accepted at `threshold`.
pub fn fmr(impostor: &[f64], threshold: f64) -> Result<f64> {
    if impostor.is_empty() {
        return Err(MetricsError::EmptyScores);
    }
    let accepted = impostor.iter().filter(|&&s| s >= threshold).count();
    Ok(accepted as f64 / impostor.len() as f64)
}

/// Fraction of genuine scores rejected at `threshold`.
pub fn fnmr(genuine: &[f64], threshold: f64) -> Result<f64> {
    if genuine.is_empty() {
        return Err(MetricsError::EmptyScores);
    }
    let rejected = genuine.iter().filter(|&&s| s < threshold).count();
    Ok(rejected as f64 / genuine.len() as f64)
}

/// Smallest threshold, among the observed impostor scores and one value just
/// above the maximum, whose FMR does not exceed `target`.
pub fn threshold_at_fmr(impostor: &[f64], target: f64) -> Result<f64> {
    if !(target > 0.0 && target < 1.0) {
        return Err(MetricsError::InvalidTarget(target));
    }
    if impostor.is_empty() {
        return Err(MetricsError::EmptyScores);
    }
    let mut sorted = impostor.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    // Walk candidates upward; at a candidate t every score from its first
    // occurrence onward is accepted.
    let mut i = 0;
    while i < n {
        let t = sorted[i];
        if (n - i) as f64 / n as f64 <= target {
            return Ok(t);
        }
        while i < n && sorted[i] == t {
            i += 1;
        }
    }
    Ok(sorted[n - 1].next_up())
}

/// Fraction of morphs accepted at `threshold`. Multiple samples of one
/// subject within a morph are reduced by their maximum before `rule` is
/// applied across subjects.
pub fn mmpmr(rows: &[MorphScore], threshold: f64, rule: MmpmrRule) -> Result<f64> {
    if rows.is_empty() {
        return Err(MetricsError::EmptyScores);
    }
    let mut best: BTreeMap<&str, BTreeMap<&str, f64>> = BTreeMap::new();
    for r in rows {
        let s = best
            .entry(&r.morph_id)
            .or_default()
            .entry(&r.subject_id)
            .or_insert(f64::NEG_INFINITY);
        *s = s.max(r.score);
    }
    let accepted = best
        .values()
        .filter(|subjects| {
            let mut it = subjects.values();
            match rule {
                MmpmrRule::Min => it.all(|&s| s >= threshold),
                MmpmrRule::Any => it.any(|&s| s >= threshold),
            }
        })
        .count();
    Ok(accepted as f64 / best.len() as f64)
}
