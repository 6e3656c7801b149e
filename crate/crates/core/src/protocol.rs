//! Subject manifests and morph-pair selection.
//!
//! Pairs are only formed between subjects of the same gender and the same
//! ethnicity, and never between two subjects who both wear glasses.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;

use crate::morph::PairListRow;

#[derive(Debug, Error)]
pub enum ProtocolError {
    #[error("row {row}: {message}")]
    ParseError { row: usize, message: String },
    #[error("row {row}: duplicate image_id {image_id:?}")]
    DuplicateImageId { row: usize, image_id: String },
    #[error("unknown image ids: {}", format_rows(.0))]
    UnknownImageId(Vec<(usize, String)>),
    #[error("rows pair a subject with itself: {0:?}")]
    SameSubject(Vec<usize>),
    #[error("missing file for image {image_id:?}: {path}")]
    MissingFile { image_id: String, path: PathBuf },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

fn format_rows(rows: &[(usize, String)]) -> String {
    rows.iter()
        .map(|(r, id)| format!("row {r}: {id:?}"))
        .collect::<Vec<_>>()
        .join(", ")
}

pub type Result<T> = std::result::Result<T, ProtocolError>;

/// One image of one subject with the attributes that constrain pairing.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SubjectRecord {
    pub subject_id: String,
    pub image_id: String,
    /// Lower-cased, trimmed.
    pub gender: String,
    /// Lower-cased, trimmed.
    pub ethnicity: String,
    pub glasses: bool,
    pub image_path: PathBuf,
    pub landmarks_path: PathBuf,
}

impl SubjectRecord {
    /// Whether the two images may be morphed together.
    pub fn compatible_with(&self, other: &SubjectRecord) -> bool {
        self.subject_id != other.subject_id
            && self.gender == other.gender
            && self.ethnicity == other.ethnicity
            && !(self.glasses && other.glasses)
    }
}

/// Unordered pair of images from two different subjects, stored with
/// `a.subject_id < b.subject_id`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MorphPair {
    pub a: SubjectRecord,
    pub b: SubjectRecord,
}

impl MorphPair {
    /// Canonicalizes the order; `None` if both images share a subject.
    pub fn new(x: SubjectRecord, y: SubjectRecord) -> Option<MorphPair> {
        match x.subject_id.cmp(&y.subject_id) {
            std::cmp::Ordering::Less => Some(MorphPair { a: x, b: y }),
            std::cmp::Ordering::Greater => Some(MorphPair { a: y, b: x }),
            std::cmp::Ordering::Equal => None,
        }
    }

    fn sort_key(&self) -> (&str, &str, &str, &str) {
        (
            &self.a.subject_id,
            &self.b.subject_id,
            &self.a.image_id,
            &self.b.image_id,
        )
    }

    pub fn to_pair_list_row(&self) -> PairListRow {
        PairListRow {
            id_a: self.a.image_id.clone(),
            image_a: self.a.image_path.clone(),
            landmarks_a: self.a.landmarks_path.clone(),
            id_b: self.b.image_id.clone(),
            image_b: self.b.image_path.clone(),
            landmarks_b: self.b.landmarks_path.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PairConstraints {
    /// Pair every eligible image combination instead of one image per
    /// subject (the smallest `image_id`).
    pub all_image_combinations: bool,
}

#[derive(Debug, Deserialize)]
struct RawRecord {
    subject_id: String,
    image_id: String,
    gender: String,
    ethnicity: String,
    glasses: String,
    image_path: PathBuf,
    landmarks_path: PathBuf,
}

fn parse_glasses(s: &str) -> Option<bool> {
    match s.trim().to_ascii_lowercase().as_str() {
        "1" | "true" => Some(true),
        "0" | "false" => Some(false),
        _ => None,
    }
}

/// Loads `subject_id,image_id,gender,ethnicity,glasses,image_path,landmarks_path`.
/// Rows are numbered from 1 after the header. Relative paths are resolved
/// against the manifest's directory.
pub fn load_manifest(path: &Path) -> Result<Vec<SubjectRecord>> {
    let base = path.parent().unwrap_or(Path::new("")).to_path_buf();
    let rdr = csv::Reader::from_path(path)?;
    parse_manifest(rdr, &base)
}

pub fn parse_manifest<R: std::io::Read>(
    mut rdr: csv::Reader<R>,
    base: &Path,
) -> Result<Vec<SubjectRecord>> {
    let mut out = Vec::new();
    let mut seen: HashSet<String> = HashSet::new();
    for (i, rec) in rdr.deserialize::<RawRecord>().enumerate() {
        let row = i + 1;
        let raw = rec.map_err(|e| ProtocolError::ParseError {
            row,
            message: e.to_string(),
        })?;
        let subject_id = raw.subject_id.trim().to_string();
        let image_id = raw.image_id.trim().to_string();
        if subject_id.is_empty() || image_id.is_empty() {
            return Err(ProtocolError::ParseError {
                row,
                message: "subject_id and image_id must be non-empty".into(),
            });
        }
        let glasses = parse_glasses(&raw.glasses).ok_or_else(|| ProtocolError::ParseError {
            row,
            message: format!("glasses must be one of 0, 1, true, false; got {:?}", raw.glasses),
        })?;
        if !seen.insert(image_id.clone()) {
            return Err(ProtocolError::DuplicateImageId { row, image_id });
        }
        let resolve = |p: PathBuf| if p.is_relative() { base.join(p) } else { p };
        out.push(SubjectRecord {
            subject_id,
            image_id,
            gender: raw.gender.trim().to_lowercase(),
            ethnicity: raw.ethnicity.trim().to_lowercase(),
            glasses,
            image_path: resolve(raw.image_path),
            landmarks_path: resolve(raw.landmarks_path),
        });
    }
    Ok(out)
}

/// Checks that every image and landmark file exists.
pub fn validate_paths(records: &[SubjectRecord]) -> Result<()> {
    for r in records {
        for p in [&r.image_path, &r.landmarks_path] {
            if !p.exists() {
                return Err(ProtocolError::MissingFile {
                    image_id: r.image_id.clone(),
                    path: p.clone(),
                });
            }
        }
    }
    Ok(())
}

/// All eligible unordered cross-subject pairs, sorted by
/// `(subject_a, subject_b, image_a, image_b)`.
pub fn generate_pairs(records: &[SubjectRecord], constraints: PairConstraints) -> Vec<MorphPair> {
    let candidates: Vec<&SubjectRecord> = if constraints.all_image_combinations {
        records.iter().collect()
    } else {
        let mut first: BTreeMap<&str, &SubjectRecord> = BTreeMap::new();
        for r in records {
            first
                .entry(&r.subject_id)
                .and_modify(|cur| {
                    if r.image_id < cur.image_id {
                        *cur = r;
                    }
                })
                .or_insert(r);
        }
        first.into_values().collect()
    };

    let mut pairs = Vec::new();
    for (i, x) in candidates.iter().enumerate() {
        for y in &candidates[i + 1..] {
            if x.compatible_with(y) {
                pairs.extend(MorphPair::new((*x).clone(), (*y).clone()));
            }
        }
    }
    pairs.sort_by(|p, q| p.sort_key().cmp(&q.sort_key()));
    pairs.dedup();
    pairs
}

#[derive(Debug, Deserialize)]
struct RawProtocolRow {
    image_id_a: String,
    image_id_b: String,
}

/// Reads an externally supplied `image_id_a,image_id_b` pair list and
/// resolves it against `records`. Pairs come back in file order,
/// canonicalized. Every unknown id is reported with its row number.
pub fn import_external_protocol(path: &Path, records: &[SubjectRecord]) -> Result<Vec<MorphPair>> {
    let rdr = csv::Reader::from_path(path)?;
    parse_external_protocol(rdr, records)
}

pub fn parse_external_protocol<R: std::io::Read>(
    mut rdr: csv::Reader<R>,
    records: &[SubjectRecord],
) -> Result<Vec<MorphPair>> {
    let by_id: HashMap<&str, &SubjectRecord> =
        records.iter().map(|r| (r.image_id.as_str(), r)).collect();
    let mut unknown = Vec::new();
    let mut same = Vec::new();
    let mut pairs = Vec::new();
    for (i, rec) in rdr.deserialize::<RawProtocolRow>().enumerate() {
        let row = i + 1;
        let raw = rec.map_err(|e| ProtocolError::ParseError {
            row,
            message: e.to_string(),
        })?;
        let (ia, ib) = (raw.image_id_a.trim(), raw.image_id_b.trim());
        let a = by_id.get(ia);
        let b = by_id.get(ib);
        if a.is_none() {
            unknown.push((row, ia.to_string()));
        }
        if b.is_none() {
            unknown.push((row, ib.to_string()));
        }
        if let (Some(a), Some(b)) = (a, b) {
            match MorphPair::new((*a).clone(), (*b).clone()) {
                Some(p) => pairs.push(p),
                None => same.push(row),
            }
        }
    }
    if !unknown.is_empty() {
        return Err(ProtocolError::UnknownImageId(unknown));
    }
    if !same.is_empty() {
        return Err(ProtocolError::SameSubject(same));
    }
    Ok(pairs)
}

pub fn to_pair_list(pairs: &[MorphPair]) -> Vec<PairListRow> {
    pairs.iter().map(MorphPair::to_pair_list_row).collect()
}
