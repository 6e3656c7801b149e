//! Embedding ingestion, reference averaging and cosine scoring.
//!
//! Scores are cosine *similarities*: higher means a better match, and a
//! comparison is accepted when `score >= threshold`.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ScoringError {
    #[error("row {row}: model {model_tag:?} expects dimension {expected}, found {found}")]
    DimensionMismatch {
        row: usize,
        model_tag: String,
        expected: usize,
        found: usize,
    },
    #[error("row {row}: {message}")]
    ParseError { row: usize, message: String },
    #[error("zero vector{}", .0.as_ref().map(|id| format!(" for {id:?}")).unwrap_or_default())]
    ZeroVector(Option<String>),
    #[error("vectors differ in dimension ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("cannot build a reference from an empty set")]
    EmptySet,
    #[error("unknown {kind} id {id:?}")]
    UnknownId { kind: &'static str, id: String },
    #[error("duplicate embedding for image {image_id:?} under model {model_tag:?}")]
    DuplicateImageId { image_id: String, model_tag: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, ScoringError>;

/// Feature vector extracted from one image by one recognition model.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    pub image_id: String,
    pub model_tag: String,
    pub vector: Vec<f64>,
}

/// An enrolled identity: the mean of its enrollment embeddings.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceModel {
    pub identity_id: String,
    pub mean_vector: Vec<f64>,
    pub n_images: usize,
}

/// Reads `image_id,model_tag,v0,...,vD-1` rows. A leading header row whose
/// first field is `image_id` is skipped. Rows are numbered from 1.
pub fn load_embeddings(path: &Path) -> Result<Vec<Embedding>> {
    let rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_path(path)?;
    parse_embeddings(rdr)
}

pub fn parse_embeddings<R: std::io::Read>(mut rdr: csv::Reader<R>) -> Result<Vec<Embedding>> {
    let mut dims: HashMap<String, usize> = HashMap::new();
    let mut seen: HashSet<(String, String)> = HashSet::new();
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 1;
        let rec = rec?;
        if row == 1 && rec.get(0).map(str::trim) == Some("image_id") {
            continue;
        }
        if rec.len() < 3 {
            return Err(ScoringError::ParseError {
                row,
                message: "expected image_id, model_tag and at least one value".into(),
            });
        }
        let image_id = rec[0].trim().to_string();
        let model_tag = rec[1].trim().to_string();
        let vector = rec
            .iter()
            .skip(2)
            .map(|f| {
                f.trim()
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| ScoringError::ParseError {
                        row,
                        message: format!("not a finite number: {f:?}"),
                    })
            })
            .collect::<Result<Vec<f64>>>()?;
        let expected = *dims.entry(model_tag.clone()).or_insert(vector.len());
        if expected != vector.len() {
            return Err(ScoringError::DimensionMismatch {
                row,
                model_tag,
                expected,
                found: vector.len(),
            });
        }
        if vector.iter().all(|v| *v == 0.0) {
            return Err(ScoringError::ZeroVector(Some(image_id)));
        }
        if !seen.insert((image_id.clone(), model_tag.clone())) {
            return Err(ScoringError::DuplicateImageId {
                image_id,
                model_tag,
            });
        }
        out.push(Embedding {
            image_id,
            model_tag,
            vector,
        });
    }
    Ok(out)
}

pub fn write_embeddings(path: &Path, embeddings: &[Embedding]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().flexible(true).from_path(path)?;
    for e in embeddings {
        let mut rec = vec![e.image_id.clone(), e.model_tag.clone()];
        rec.extend(e.vector.iter().map(|v| format!("{v:?}")));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Componentwise mean of the given embeddings.
pub fn build_reference(identity_id: &str, embeddings: &[&Embedding]) -> Result<ReferenceModel> {
    let first = embeddings.first().ok_or(ScoringError::EmptySet)?;
    let d = first.vector.len();
    let mut sum = vec![0.0; d];
    for e in embeddings {
        if e.vector.len() != d {
            return Err(ScoringError::LengthMismatch(d, e.vector.len()));
        }
        for (s, v) in sum.iter_mut().zip(&e.vector) {
            *s += v;
        }
    }
    let n = embeddings.len() as f64;
    Ok(ReferenceModel {
        identity_id: identity_id.to_string(),
        mean_vector: sum.into_iter().map(|s| s / n).collect(),
        n_images: embeddings.len(),
    })
}

/// Cosine similarity `u·v / (|u| |v|)`, clamped to `[-1, 1]`.
pub fn cosine_score(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(ScoringError::LengthMismatch(u.len(), v.len()));
    }
    let dot: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
    let nu: f64 = u.iter().map(|a| a * a).sum::<f64>().sqrt();
    let nv: f64 = v.iter().map(|a| a * a).sum::<f64>().sqrt();
    if nu == 0.0 || nv == 0.0 {
        return Err(ScoringError::ZeroVector(None));
    }
    Ok((dot / (nu * nv)).clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Genuine,
    Impostor,
    Morph,
}

/// One requested comparison.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairingEntry {
    pub label: Label,
    pub reference_id: String,
    pub probe_id: String,
    /// Set on morph rows only.
    pub morph_id: Option<String>,
    /// Set on morph rows only: the subject this comparison attributes the
    /// match to.
    pub contrib_subject: Option<String>,
}

/// A scored comparison: `label,reference_id,probe_id,morph_id,contrib_subject,score`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreRow {
    pub label: Label,
    pub reference_id: String,
    pub probe_id: String,
    pub morph_id: Option<String>,
    pub contrib_subject: Option<String>,
    pub score: f64,
}

#[derive(Debug, Deserialize)]
struct EnrollmentRow {
    reference_id: String,
    image_id: String,
}

/// Reads `reference_id,image_id` rows and averages each reference's
/// embeddings. References are returned sorted by id.
pub fn load_references(path: &Path, embeddings: &[Embedding]) -> Result<Vec<ReferenceModel>> {
    let mut rdr = csv::Reader::from_path(path)?;
    let mut enrol: Vec<(String, String)> = Vec::new();
    for rec in rdr.deserialize::<EnrollmentRow>() {
        let r = rec?;
        enrol.push((r.reference_id, r.image_id));
    }
    build_references(&enrol, embeddings)
}

pub fn build_references(
    enrollment: &[(String, String)],
    embeddings: &[Embedding],
) -> Result<Vec<ReferenceModel>> {
    let by_id: HashMap<&str, &Embedding> =
        embeddings.iter().map(|e| (e.image_id.as_str(), e)).collect();
    let mut groups: BTreeMap<&str, Vec<&Embedding>> = BTreeMap::new();
    for (reference, image) in enrollment {
        let e = by_id.get(image.as_str()).ok_or_else(|| ScoringError::UnknownId {
            kind: "image",
            id: image.clone(),
        })?;
        groups.entry(reference).or_default().push(e);
    }
    groups
        .into_iter()
        .map(|(id, es)| build_reference(id, &es))
        .collect()
}

pub fn write_enrollment(path: &Path, enrollment: &[(String, String)]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["reference_id", "image_id"])?;
    for (r, i) in enrollment {
        w.write_record([r, i])?;
    }
    w.flush()?;
    Ok(())
}

pub fn load_pairing(path: &Path) -> Result<Vec<PairingEntry>> {
    let mut rdr = csv::Reader::from_path(path)?;
    let mut out = Vec::new();
    for (i, rec) in rdr.deserialize::<PairingEntry>().enumerate() {
        out.push(rec.map_err(|e| ScoringError::ParseError {
            row: i + 1,
            message: e.to_string(),
        })?);
    }
    Ok(out)
}

pub fn write_pairing(path: &Path, pairing: &[PairingEntry]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["label", "reference_id", "probe_id", "morph_id", "contrib_subject"])?;
    for p in pairing {
        w.write_record([
            label_str(p.label),
            &p.reference_id,
            &p.probe_id,
            p.morph_id.as_deref().unwrap_or(""),
            p.contrib_subject.as_deref().unwrap_or(""),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn label_str(l: Label) -> &'static str {
    match l {
        Label::Genuine => "genuine",
        Label::Impostor => "impostor",
        Label::Morph => "morph",
    }
}

/// Scores every pairing entry; output order follows `pairing`.
pub fn score_comparisons(
    references: &[ReferenceModel],
    probes: &[Embedding],
    pairing: &[PairingEntry],
) -> Result<Vec<ScoreRow>> {
    let refs: HashMap<&str, &ReferenceModel> = references
        .iter()
        .map(|r| (r.identity_id.as_str(), r))
        .collect();
    let probes: HashMap<&str, &Embedding> =
        probes.iter().map(|e| (e.image_id.as_str(), e)).collect();
    pairing
        .iter()
        .map(|p| {
            let r = refs
                .get(p.reference_id.as_str())
                .ok_or_else(|| ScoringError::UnknownId {
                    kind: "reference",
                    id: p.reference_id.clone(),
                })?;
            let e = probes
                .get(p.probe_id.as_str())
                .ok_or_else(|| ScoringError::UnknownId {
                    kind: "probe",
                    id: p.probe_id.clone(),
                })?;
            Ok(ScoreRow {
                label: p.label,
                reference_id: p.reference_id.clone(),
                probe_id: p.probe_id.clone(),
                morph_id: p.morph_id.clone(),
                contrib_subject: p.contrib_subject.clone(),
                score: cosine_score(&r.mean_vector, &e.vector)?,
            })
        })
        .collect()
}

pub fn write_scores(path: &Path, rows: &[ScoreRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record([
        "label",
        "reference_id",
        "probe_id",
        "morph_id",
        "contrib_subject",
        "score",
    ])?;
    for r in rows {
        w.write_record([
            label_str(r.label),
            &r.reference_id,
            &r.probe_id,
            r.morph_id.as_deref().unwrap_or(""),
            r.contrib_subject.as_deref().unwrap_or(""),
            &format!("{:?}", r.score),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn load_scores(path: &Path) -> Result<Vec<ScoreRow>> {
    let mut rdr = csv::Reader::from_path(path)?;
    let mut out = Vec::new();
    for (i, rec) in rdr.deserialize::<ScoreRow>().enumerate() {
        let row: ScoreRow = rec.map_err(|e| ScoringError::ParseError {
            row: i + 1,
            message: e.to_string(),
        })?;
        if !row.score.is_finite() {
            return Err(ScoringError::ParseError {
                row: i + 1,
                message: "score is not finite".into(),
            });
        }
        out.push(row);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn emb(id: &str, v: &[f64]) -> Embedding {
        Embedding {
            image_id: id.into(),
            model_tag: "m".into(),
            vector: v.to_vec(),
        }
    }

    fn parse(text: &str) -> Result<Vec<Embedding>> {
        parse_embeddings(
            csv::ReaderBuilder::new()
                .has_headers(false)
                .flexible(true)
                .from_reader(text.as_bytes()),
        )
    }

    #[test]
    fn embeddings_parse() {
        let e = parse("a,facenet,1,2,3,4\nb,facenet,0,0,0,1\n").unwrap();
        assert_eq!(e.len(), 2);
        assert_eq!(e[0].vector, vec![1.0, 2.0, 3.0, 4.0]);
        let e = parse("image_id,model_tag,v0\na,x,1\n").unwrap();
        assert_eq!(e.len(), 1);
    }

    #[test]
    fn embedding_errors() {
        assert!(matches!(
            parse("a,facenet,1,2,3,4\nb,facenet,1,2,3,4,5\n"),
            Err(ScoringError::DimensionMismatch { row: 2, expected: 4, found: 5, .. })
        ));
        // Different models may differ in dimension.
        assert!(parse("a,facenet,1,2\nb,arcface,1,2,3\n").is_ok());
        assert!(matches!(parse("a,m,0,0,0\n"), Err(ScoringError::ZeroVector(_))));
        assert!(matches!(parse("a,m,1,x\n"), Err(ScoringError::ParseError { row: 1, .. })));
    }

    #[test]
    fn reference_means() {
        let a = emb("a", &[1.0, 0.0]);
        let b = emb("b", &[0.0, 1.0]);
        assert_eq!(build_reference("r", &[&a]).unwrap().mean_vector, vec![1.0, 0.0]);
        let r = build_reference("r", &[&a, &b]).unwrap();
        assert_eq!(r.mean_vector, vec![0.5, 0.5]);
        assert_eq!(r.n_images, 2);
        assert!(matches!(build_reference("r", &[]), Err(ScoringError::EmptySet)));
    }

    #[test]
    fn cosine_examples() {
        assert_eq!(cosine_score(&[1.0, 0.0, 0.0], &[1.0, 0.0, 0.0]).unwrap(), 1.0);
        assert_eq!(cosine_score(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 0.0);
        assert!(matches!(cosine_score(&[0.0, 0.0], &[1.0, 0.0]), Err(ScoringError::ZeroVector(_))));
    }

    #[test]
    fn comparisons_keep_order_and_labels() {
        let e = vec![emb("a1", &[1.0, 0.0]), emb("a2", &[0.8, 0.2]), emb("b1", &[0.0, 1.0])];
        let refs = build_references(
            &[("A".into(), "a1".into()), ("B".into(), "b1".into())],
            &e,
        )
        .unwrap();
        let pairing = vec![
            PairingEntry {
                label: Label::Genuine,
                reference_id: "A".into(),
                probe_id: "a2".into(),
                morph_id: None,
                contrib_subject: None,
            },
            PairingEntry {
                label: Label::Impostor,
                reference_id: "B".into(),
                probe_id: "a2".into(),
                morph_id: None,
                contrib_subject: None,
            },
        ];
        let rows = score_comparisons(&refs, &e, &pairing).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].label, Label::Genuine);
        assert_eq!(rows[1].label, Label::Impostor);
        assert!(rows[0].score > rows[1].score);

        let mut bad = pairing.clone();
        bad[1].probe_id = "zz".into();
        assert!(matches!(
            score_comparisons(&refs, &e, &bad),
            Err(ScoringError::UnknownId { kind: "probe", .. })
        ));
    }

    #[test]
    fn two_image_reference_scored_against_member() {
        let e = vec![emb("a1", &[3.0, 1.0, 0.5]), emb("a2", &[1.0, 2.0, -1.0])];
        let refs = build_references(
            &[("A".into(), "a1".into()), ("A".into(), "a2".into())],
            &e,
        )
        .unwrap();
        let pairing = vec![PairingEntry {
            label: Label::Genuine,
            reference_id: "A".into(),
            probe_id: "a1".into(),
            morph_id: None,
            contrib_subject: None,
        }];
        let got = score_comparisons(&refs, &e, &pairing).unwrap()[0].score;
        // mean = (2, 1.5, -0.25)
        let m = [2.0, 1.5, -0.25];
        let p = [3.0, 1.0, 0.5];
        let dot: f64 = m.iter().zip(&p).map(|(a, b)| a * b).sum();
        let want = dot / (m.iter().map(|a| a * a).sum::<f64>().sqrt() * p.iter().map(|a| a * a).sum::<f64>().sqrt());
        assert!((got - want).abs() < 1e-15);
    }

    #[test]
    fn score_csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.csv");
        let rows = vec![
            ScoreRow {
                label: Label::Genuine,
                reference_id: "A".into(),
                probe_id: "a2".into(),
                morph_id: None,
                contrib_subject: None,
                score: 0.1 + 0.2,
            },
            ScoreRow {
                label: Label::Morph,
                reference_id: "m1".into(),
                probe_id: "a2".into(),
                morph_id: Some("m1".into()),
                contrib_subject: Some("A".into()),
                score: -0.25,
            },
        ];
        write_scores(&path, &rows).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("label,reference_id,probe_id,morph_id,contrib_subject,score\n"));
        assert!(text.contains("genuine,A,a2,,,"));
        assert_eq!(load_scores(&path).unwrap(), rows);
    }
}
