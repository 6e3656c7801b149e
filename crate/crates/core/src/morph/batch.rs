use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{load_landmarks, morph, LandmarkScheme, MorphError, MorphInput, MorphSpec, Result};
use crate::imaging::{read_image, write_image, ImageFormat};

/// File name of the batch manifest inside the output directory.
pub const MANIFEST_FILE: &str = "manifest.csv";

/// One row of a pair list: `id_a,image_a,landmarks_a,id_b,image_b,landmarks_b`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairListRow {
    pub id_a: String,
    pub image_a: PathBuf,
    pub landmarks_a: PathBuf,
    pub id_b: String,
    pub image_b: PathBuf,
    pub landmarks_b: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RowStatus {
    Ok,
    Error,
}

/// One row of the batch manifest: `output,id_a,id_b,alpha,status,message`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestRow {
    pub output: String,
    pub id_a: String,
    pub id_b: String,
    pub alpha: f64,
    pub status: RowStatus,
    pub message: String,
}

#[derive(Debug, Clone)]
pub struct BatchOptions {
    pub alpha: f64,
    /// Worker threads; `0` lets the pool pick.
    pub jobs: usize,
    /// Expected landmark layout; `None` accepts any count as long as both
    /// contributors agree.
    pub scheme: Option<LandmarkScheme>,
}

impl Default for BatchOptions {
    fn default() -> Self {
        BatchOptions {
            alpha: super::DEFAULT_ALPHA,
            jobs: 1,
            scheme: None,
        }
    }
}

/// `<idA>_<idB>_<alpha>.png`
pub fn output_name(id_a: &str, id_b: &str, alpha: f64) -> String {
    format!("{id_a}_{id_b}_{alpha}.png")
}

/// Reads a pair list. Relative paths are resolved against the directory
/// holding the list.
pub fn read_pair_list(path: &Path) -> Result<Vec<PairListRow>> {
    let base = path.parent().unwrap_or(Path::new(""));
    let mut rdr = csv::Reader::from_path(path)?;
    let mut rows = Vec::new();
    for rec in rdr.deserialize() {
        let mut row: PairListRow = rec?;
        for p in [
            &mut row.image_a,
            &mut row.landmarks_a,
            &mut row.image_b,
            &mut row.landmarks_b,
        ] {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        rows.push(row);
    }
    Ok(rows)
}

pub fn write_pair_list(path: &Path, rows: &[PairListRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    if rows.is_empty() {
        w.write_record(["id_a", "image_a", "landmarks_a", "id_b", "image_b", "landmarks_b"])?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_manifest(path: &Path, rows: &[ManifestRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    if rows.is_empty() {
        w.write_record(["output", "id_a", "id_b", "alpha", "status", "message"])?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

fn scheme_for(row: &PairListRow, opts: &BatchOptions) -> Result<LandmarkScheme> {
    if let Some(s) = opts.scheme {
        return Ok(s);
    }
    let text = fs::read_to_string(&row.landmarks_a)?;
    let n = super::parse_landmarks(&text, &row.landmarks_a)?.len();
    Ok(LandmarkScheme::Custom(n))
}

fn morph_one(row: &PairListRow, opts: &BatchOptions, out_path: &Path) -> Result<()> {
    let scheme = scheme_for(row, opts)?;
    let la = load_landmarks(&row.landmarks_a, scheme)?;
    let lb = load_landmarks(&row.landmarks_b, scheme)?;
    la.check_stem(&row.image_a)?;
    lb.check_stem(&row.image_b)?;
    let ia = read_image(&row.image_a)?;
    let ib = read_image(&row.image_b)?;
    la.check_bounds(ia.width(), ia.height())?;
    lb.check_bounds(ib.width(), ib.height())?;
    let out = morph(&MorphSpec::new(
        MorphInput {
            image: &ia,
            landmarks: &la,
        },
        MorphInput {
            image: &ib,
            landmarks: &lb,
        },
        opts.alpha,
    ))?;
    write_image(&out, out_path, ImageFormat::Png)?;
    Ok(())
}

/// Morphs every pair into `out_dir` and writes [`MANIFEST_FILE`] there.
///
/// Per-pair failures become `error` rows; they never abort the batch.
/// Rows keep the input order and outputs do not depend on `jobs`.
pub fn batch_morph(
    pairs: &[PairListRow],
    out_dir: &Path,
    opts: &BatchOptions,
) -> Result<Vec<ManifestRow>> {
    if !crate::blend::alpha_is_valid(opts.alpha) {
        return Err(MorphError::InvalidAlpha(opts.alpha));
    }
    fs::create_dir_all(out_dir)?;

    // Two rows naming the same output would race on one file.
    let mut seen = HashSet::new();
    let names: Vec<(String, bool)> = pairs
        .iter()
        .map(|r| {
            let name = output_name(&r.id_a, &r.id_b, opts.alpha);
            let fresh = seen.insert(name.clone());
            (name, fresh)
        })
        .collect();

    let run = |(row, (name, fresh)): (&PairListRow, &(String, bool))| -> ManifestRow {
        let result = if *fresh {
            morph_one(row, opts, &out_dir.join(name))
        } else {
            Err(MorphError::Io(std::io::Error::other(format!(
                "duplicate output {name}"
            ))))
        };
        let (output, status, message) = match result {
            Ok(()) => (name.clone(), RowStatus::Ok, String::new()),
            Err(e) => (String::new(), RowStatus::Error, e.to_string()),
        };
        ManifestRow {
            output,
            id_a: row.id_a.clone(),
            id_b: row.id_b.clone(),
            alpha: opts.alpha,
            status,
            message,
        }
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs)
        .build()
        .map_err(|e| MorphError::Io(std::io::Error::other(e)))?;
    let rows: Vec<ManifestRow> =
        pool.install(|| pairs.par_iter().zip(names.par_iter()).map(run).collect());

    write_manifest(&out_dir.join(MANIFEST_FILE), &rows)?;
    Ok(rows)
}
