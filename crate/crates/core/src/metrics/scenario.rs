//! Evaluation scenarios: bona fide comparisons plus morph attacks, with the
//! morph either enrolled as a reference or presented as a probe.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use super::{MetricsError, MmpmrRule, MorphScore, Result, ScoreSet, DEFAULT_TARGET_FMR};
use crate::scoring::{Label, PairingEntry, ScoreRow};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ScenarioMode {
    /// The morph is enrolled; contributing subjects' bona fide images probe it.
    MorphsAsReferences,
    /// The morph is presented against the contributing subjects' references.
    MorphsAsProbes,
}

impl fmt::Display for ScenarioMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            ScenarioMode::MorphsAsReferences => "references",
            ScenarioMode::MorphsAsProbes => "probes",
        })
    }
}

impl FromStr for ScenarioMode {
    type Err = MetricsError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "references" | "refs" | "morphs_as_references" => Ok(ScenarioMode::MorphsAsReferences),
            "probes" | "morphs_as_probes" => Ok(ScenarioMode::MorphsAsProbes),
            _ => Err(MetricsError::InvalidValue {
                what: "scenario mode",
                value: s.to_string(),
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioConfig {
    pub mode: ScenarioMode,
    pub target_fmr: f64,
    pub rule: MmpmrRule,
}

impl ScenarioConfig {
    pub fn new(mode: ScenarioMode) -> Self {
        ScenarioConfig {
            mode,
            target_fmr: DEFAULT_TARGET_FMR,
            rule: MmpmrRule::Min,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.target_fmr > 0.0 && self.target_fmr < 1.0) {
            return Err(MetricsError::InvalidTarget(self.target_fmr));
        }
        Ok(())
    }
}

/// Comparison counts of an assembled scenario.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ScenarioCounts {
    pub n_genuine: usize,
    pub n_impostor: usize,
    pub n_morphs: usize,
    pub n_morph_comparisons: usize,
    /// Distinct references and probes taking part in morph comparisons.
    pub n_morph_references: usize,
    pub n_morph_probes: usize,
}

/// Splits labeled score rows into a [`ScoreSet`], checking that every morph
/// row matches the scenario mode: the morph is the reference when morphs are
/// enrolled and the probe otherwise.
pub fn assemble_scenario(
    rows: &[ScoreRow],
    config: &ScenarioConfig,
) -> Result<(ScoreSet, ScenarioCounts)> {
    config.validate()?;
    let mut set = ScoreSet::default();
    let mut refs = BTreeSet::new();
    let mut probes = BTreeSet::new();
    for (i, r) in rows.iter().enumerate() {
        let row = i + 1;
        if !r.score.is_finite() {
            return Err(MetricsError::InconsistentLabels(format!("row {row}: non-finite score")));
        }
        match r.label {
            Label::Genuine | Label::Impostor => {
                if r.morph_id.is_some() || r.contrib_subject.is_some() {
                    return Err(MetricsError::InconsistentLabels(format!(
                        "row {row}: bona fide comparison carries morph fields"
                    )));
                }
                if r.label == Label::Genuine {
                    set.genuine.push(r.score);
                } else {
                    set.impostor.push(r.score);
                }
            }
            Label::Morph => {
                let (Some(morph_id), Some(subject)) = (&r.morph_id, &r.contrib_subject) else {
                    return Err(MetricsError::InconsistentLabels(format!(
                        "row {row}: morph comparison without morph_id/contrib_subject"
                    )));
                };
                let morph_side = match config.mode {
                    ScenarioMode::MorphsAsReferences => &r.reference_id,
                    ScenarioMode::MorphsAsProbes => &r.probe_id,
                };
                if morph_side != morph_id {
                    return Err(MetricsError::InconsistentLabels(format!(
                        "row {row}: morph {morph_id:?} is not the {} in mode {}",
                        match config.mode {
                            ScenarioMode::MorphsAsReferences => "reference",
                            ScenarioMode::MorphsAsProbes => "probe",
                        },
                        config.mode
                    )));
                }
                refs.insert(r.reference_id.as_str());
                probes.insert(r.probe_id.as_str());
                set.morph_attacks
                    .push(MorphScore::new(morph_id.clone(), subject.clone(), r.score));
            }
        }
    }
    let counts = ScenarioCounts {
        n_genuine: set.genuine.len(),
        n_impostor: set.impostor.len(),
        n_morphs: set.n_morphs(),
        n_morph_comparisons: set.morph_attacks.len(),
        n_morph_references: refs.len(),
        n_morph_probes: probes.len(),
    };
    Ok((set, counts))
}

/// A bona fide image of a known subject.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BonaFideImage {
    pub subject_id: String,
    pub image_id: String,
}

/// A morph image and the subjects blended into it. The image id doubles as
/// the morph id in every comparison.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MorphImage {
    pub image_id: String,
    pub subjects: Vec<String>,
}

/// Which bona fide comparisons are formed. The published protocols do not
/// pin these down, so they are explicit knobs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairingRules {
    /// Images per subject (smallest image ids first) averaged into the
    /// subject's reference; the remaining images are probes.
    pub enroll_per_subject: usize,
}

impl Default for PairingRules {
    fn default() -> Self {
        PairingRules {
            enroll_per_subject: 1,
        }
    }
}

/// Enrollment list plus requested comparisons for one scenario.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ComparisonPlan {
    /// `(reference_id, image_id)` rows.
    pub enrollment: Vec<(String, String)>,
    pub pairing: Vec<PairingEntry>,
}

/// Builds the comparisons of a scenario.
///
/// * genuine: each subject reference against each of its own probe images;
/// * impostor: each subject reference against every probe image of every
///   other subject;
/// * morph, enrolled: the morph reference against every probe image of each
///   contributing subject;
/// * morph, probing: the morph image against each contributing subject's
///   reference.
pub fn plan_comparisons(
    bona_fide: &[BonaFideImage],
    morphs: &[MorphImage],
    mode: ScenarioMode,
    rules: PairingRules,
) -> Result<ComparisonPlan> {
    let mut by_subject: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for b in bona_fide {
        by_subject.entry(&b.subject_id).or_default().push(&b.image_id);
    }
    let mut enrolled: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    let mut probe_images: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for (s, imgs) in by_subject.iter_mut() {
        imgs.sort_unstable();
        let k = rules.enroll_per_subject.min(imgs.len());
        enrolled.insert(s, imgs[..k].to_vec());
        probe_images.insert(s, imgs[k..].to_vec());
    }

    let mut plan = ComparisonPlan::default();
    for (s, imgs) in &enrolled {
        if imgs.is_empty() {
            continue;
        }
        for i in imgs {
            plan.enrollment.push((s.to_string(), i.to_string()));
        }
    }
    let has_reference = |s: &str| enrolled.get(s).is_some_and(|v| !v.is_empty());

    let bf = |label, r: &str, p: &str| PairingEntry {
        label,
        reference_id: r.to_string(),
        probe_id: p.to_string(),
        morph_id: None,
        contrib_subject: None,
    };
    for s in enrolled.keys().filter(|s| has_reference(s)) {
        for (t, probes) in &probe_images {
            let label = if s == t { Label::Genuine } else { Label::Impostor };
            for p in probes {
                plan.pairing.push(bf(label, s, p));
            }
        }
    }

    for m in morphs {
        for s in &m.subjects {
            if !by_subject.contains_key(s.as_str()) {
                return Err(MetricsError::UnknownSubject(s.clone()));
            }
        }
        let entry = |r: &str, p: &str, s: &str| PairingEntry {
            label: Label::Morph,
            reference_id: r.to_string(),
            probe_id: p.to_string(),
            morph_id: Some(m.image_id.clone()),
            contrib_subject: Some(s.to_string()),
        };
        match mode {
            ScenarioMode::MorphsAsReferences => {
                plan.enrollment.push((m.image_id.clone(), m.image_id.clone()));
                for s in &m.subjects {
                    for p in &probe_images[s.as_str()] {
                        plan.pairing.push(entry(&m.image_id, p, s));
                    }
                }
            }
            ScenarioMode::MorphsAsProbes => {
                for s in m.subjects.iter().filter(|s| has_reference(s)) {
                    plan.pairing.push(entry(s, &m.image_id, s));
                }
            }
        }
    }
    Ok(plan)
}
