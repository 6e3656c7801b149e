//! Fully synthetic end-to-end run: cartoon faces with exact landmarks,
//! pair selection, morphing, random-projection embeddings, both scenarios
//! and the final report.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{cmd_evaluate, cmd_morph, cmd_pairs, cmd_score, EvalTags, EvaluateArgs, MorphArgs, PairsArgs, Result, ScoreArgs};
use crate::geometry::Point2;
use crate::imaging::{read_image, write_image, ImageFormat, Raster};
use crate::metrics::{plan_comparisons, BonaFideImage, MmpmrRule, MorphImage, PairingRules, ReportEntry, ScenarioMode};
use crate::morph::{LandmarkScheme, RowStatus, MANIFEST_FILE};
use crate::scoring::{write_embeddings, write_enrollment, write_pairing, Embedding};

/// Landmarks per synthetic face.
pub const DEMO_LANDMARKS: usize = 12;

const FACE_SIZE: usize = 64;
const GRID: usize = 8;
const EMBED_DIM: usize = 48;
const MODEL_TAG: &str = "randproj-48";

/// Shape and colors of one cartoon face, in pixel units.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticFace {
    pub cx: f64,
    pub cy: f64,
    pub rx: f64,
    pub ry: f64,
    pub eye_dx: f64,
    pub eye_y: f64,
    pub eye_r: f64,
    pub mouth_y: f64,
    pub mouth_w: f64,
    pub skin: [f64; 3],
    pub iris: [f64; 3],
    pub lips: [f64; 3],
    pub hair: [f64; 3],
    pub background: [f64; 3],
    pub glasses: bool,
}

fn color<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> [f64; 3] {
    [rng.gen_range(lo..hi), rng.gen_range(lo..hi), rng.gen_range(lo..hi)]
}

impl SyntheticFace {
    /// A random identity centred in a `size` x `size` frame.
    pub fn random<R: Rng>(rng: &mut R, size: usize, glasses: bool) -> Self {
        let s = size as f64 / 64.0;
        let cy = 34.0 * s + rng.gen_range(-1.5..1.5) * s;
        SyntheticFace {
            cx: 32.0 * s + rng.gen_range(-1.5..1.5) * s,
            cy,
            rx: rng.gen_range(17.0..21.0) * s,
            ry: rng.gen_range(21.0..25.0) * s,
            eye_dx: rng.gen_range(7.0..11.0) * s,
            eye_y: cy - rng.gen_range(5.0..8.0) * s,
            eye_r: rng.gen_range(2.0..3.5) * s,
            mouth_y: cy + rng.gen_range(9.0..13.0) * s,
            mouth_w: rng.gen_range(4.0..8.0) * s,
            skin: [
                rng.gen_range(150.0..235.0),
                rng.gen_range(110.0..190.0),
                rng.gen_range(80.0..160.0),
            ],
            iris: color(rng, 20.0, 120.0),
            lips: [rng.gen_range(140.0..220.0), rng.gen_range(40.0..90.0), rng.gen_range(50.0..100.0)],
            hair: color(rng, 10.0, 110.0),
            background: color(rng, 60.0, 200.0),
            glasses,
        }
    }

    /// Another capture of the same identity: small pose shift and lighting
    /// change.
    pub fn recapture<R: Rng>(&self, rng: &mut R) -> Self {
        let mut f = self.clone();
        let (dx, dy) = (rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5));
        f.cx += dx;
        f.cy += dy;
        f.eye_y += dy + rng.gen_range(-0.4..0.4);
        f.mouth_y += dy + rng.gen_range(-0.4..0.4);
        f.mouth_w *= rng.gen_range(0.92..1.08);
        let light = rng.gen_range(-12.0..12.0);
        for c in f.skin.iter_mut().chain(f.lips.iter_mut()) {
            *c = (*c + light).clamp(0.0, 255.0);
        }
        f
    }

    /// Landmarks: eyes, brows, nose, mouth corners, mouth centre, chin,
    /// forehead and both cheeks.
    pub fn landmarks(&self) -> Vec<Point2> {
        let brow = self.eye_y - self.eye_r - 3.0;
        vec![
            Point2::new(self.cx - self.eye_dx, self.eye_y),
            Point2::new(self.cx + self.eye_dx, self.eye_y),
            Point2::new(self.cx - self.eye_dx, brow),
            Point2::new(self.cx + self.eye_dx, brow),
            Point2::new(self.cx, 0.5 * (self.eye_y + self.mouth_y)),
            Point2::new(self.cx - self.mouth_w, self.mouth_y),
            Point2::new(self.cx + self.mouth_w, self.mouth_y),
            Point2::new(self.cx, self.mouth_y + 0.5),
            Point2::new(self.cx, self.cy + self.ry),
            Point2::new(self.cx, self.cy - self.ry),
            Point2::new(self.cx - self.rx, self.cy),
            Point2::new(self.cx + self.rx, self.cy),
        ]
    }

    pub fn render(&self, size: usize) -> Raster {
        let q = |c: [f64; 3]| c.map(crate::imaging::quantize);
        Raster::from_fn(size, size, |x, y| {
            let (px, py) = (x as f64 + 0.5, y as f64 + 0.5);
            let ex = |cx: f64| ((px - cx).powi(2) + (py - self.eye_y).powi(2)).sqrt();
            let eye = ex(self.cx - self.eye_dx).min(ex(self.cx + self.eye_dx));
            if eye <= self.eye_r {
                return q(self.iris);
            }
            if self.glasses && eye >= self.eye_r + 1.5 && eye <= self.eye_r + 2.7 {
                return [20, 20, 24];
            }
            let brow = self.eye_y - self.eye_r - 3.0;
            if (py - brow).abs() <= 0.9
                && ((px - self.cx).abs() - self.eye_dx).abs() <= self.eye_r + 1.0
            {
                return q(self.hair);
            }
            let m = ((px - self.cx) / self.mouth_w).powi(2) + ((py - self.mouth_y) / 1.8).powi(2);
            if m <= 1.0 {
                return q(self.lips);
            }
            let r2 = ((px - self.cx) / self.rx).powi(2) + ((py - self.cy) / self.ry).powi(2);
            if r2 <= 1.0 {
                let shade = 1.0 - 0.18 * r2;
                return q(self.skin.map(|c| c * shade));
            }
            let g = 0.85 + 0.3 * py / size as f64;
            q(self.background.map(|c| c * g))
        })
        .expect("size is positive")
    }
}

/// Convenience: render a face and its landmarks.
pub fn synthetic_face(face: &SyntheticFace, size: usize) -> (Raster, Vec<Point2>) {
    (face.render(size), face.landmarks())
}

#[derive(Debug, Clone)]
pub struct DemoOptions {
    pub out: PathBuf,
    pub seed: u64,
    pub subjects: usize,
    pub images_per_subject: usize,
    pub jobs: usize,
    pub target_fmr: f64,
    pub rule: MmpmrRule,
}

impl Default for DemoOptions {
    fn default() -> Self {
        DemoOptions {
            out: PathBuf::from("demo-out"),
            seed: 7,
            subjects: 24,
            images_per_subject: 3,
            jobs: 1,
            target_fmr: crate::metrics::DEFAULT_TARGET_FMR,
            rule: MmpmrRule::Min,
        }
    }
}

#[derive(Debug, Clone)]
pub struct DemoSummary {
    pub n_images: usize,
    pub n_pairs: usize,
    pub n_morphs: usize,
    pub n_failed: usize,
    pub entries: Vec<ReportEntry>,
    pub report_text: String,
}

/// Block-mean colour features with the per-channel mean removed, projected
/// through a fixed random matrix.
fn embed(img: &Raster, projection: &[f64]) -> Vec<f64> {
    let (bw, bh) = (img.width() / GRID, img.height() / GRID);
    let mut feats = vec![0.0; GRID * GRID * 3];
    for gy in 0..GRID {
        for gx in 0..GRID {
            for y in gy * bh..(gy + 1) * bh {
                for x in gx * bw..(gx + 1) * bw {
                    let p = img.get(x, y);
                    for c in 0..3 {
                        feats[(gy * GRID + gx) * 3 + c] += p[c] as f64;
                    }
                }
            }
        }
    }
    for c in 0..3 {
        let mean = (0..GRID * GRID).map(|i| feats[i * 3 + c]).sum::<f64>() / (GRID * GRID) as f64;
        for i in 0..GRID * GRID {
            feats[i * 3 + c] -= mean;
        }
    }
    projection
        .chunks_exact(feats.len())
        .map(|row| row.iter().zip(&feats).map(|(a, b)| a * b).sum())
        .collect()
}

fn subject_of(image_id: &str) -> &str {
    image_id.split('_').next().unwrap_or(image_id)
}

/// Runs the whole pipeline under `opts.out`:
///
/// ```text
/// faces/            synthetic images and landmark files
/// manifest.csv      subject manifest
/// pairs.csv         selected pairs
/// morphs/           morphs and their manifest
/// embeddings.csv    bona fide and morph embeddings
/// refs/, probes/    enrollment, pairing and scores per scenario
/// report.csv, report.txt
/// ```
pub fn run_demo(opts: &DemoOptions) -> Result<DemoSummary> {
    let out = &opts.out;
    let faces = out.join("faces");
    fs::create_dir_all(&faces)?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);

    let mut manifest = String::from("subject_id,image_id,gender,ethnicity,glasses,image_path,landmarks_path\n");
    let mut bona_fide = Vec::new();
    for s in 0..opts.subjects {
        let subject = format!("s{s:03}");
        let gender = ["f", "m"][rng.gen_range(0..2)];
        let ethnicity = ["a", "b"][rng.gen_range(0..2)];
        let glasses = rng.gen_bool(0.3);
        let identity = SyntheticFace::random(&mut rng, FACE_SIZE, glasses);
        for i in 0..opts.images_per_subject {
            let image_id = format!("{subject}_{i}");
            let (img, pts) = synthetic_face(&identity.recapture(&mut rng), FACE_SIZE);
            write_image(&img, &faces.join(format!("{image_id}.png")), ImageFormat::Png)?;
            let mut lm = String::new();
            for p in &pts {
                writeln!(lm, "{:?} {:?}", p.x, p.y).unwrap();
            }
            fs::write(faces.join(format!("{image_id}.txt")), lm)?;
            writeln!(
                manifest,
                "{subject},{image_id},{gender},{ethnicity},{},faces/{image_id}.png,faces/{image_id}.txt",
                u8::from(glasses)
            )
            .unwrap();
            bona_fide.push(BonaFideImage {
                subject_id: subject.clone(),
                image_id,
            });
        }
    }
    let manifest_path = out.join("manifest.csv");
    fs::write(&manifest_path, manifest)?;

    let pairs_path = out.join("pairs.csv");
    let n_pairs = cmd_pairs(&PairsArgs {
        manifest: manifest_path,
        protocol: None,
        all_images: false,
        check_files: true,
        out: pairs_path.clone(),
    })?;

    let morph_dir = out.join("morphs");
    let (n_morphs, n_failed) = cmd_morph(&MorphArgs {
        pairs: pairs_path.clone(),
        alpha: crate::morph::DEFAULT_ALPHA,
        out: morph_dir.clone(),
        jobs: opts.jobs.max(1).min(u16::MAX as usize) as u16,
        scheme: Some(LandmarkScheme::Custom(DEMO_LANDMARKS)),
    })?;

    let mut proj_rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x5eed_e3be);
    let projection: Vec<f64> = (0..EMBED_DIM * GRID * GRID * 3)
        .map(|_| proj_rng.gen_range(-1.0..1.0))
        .collect();
    let mut embeddings = Vec::new();
    for b in &bona_fide {
        let img = read_image(&faces.join(format!("{}.png", b.image_id)))?;
        embeddings.push(Embedding {
            image_id: b.image_id.clone(),
            model_tag: MODEL_TAG.into(),
            vector: embed(&img, &projection),
        });
    }

    // Morph outputs in pair-list order; the file stem is the morph id.
    let rows = read_manifest_rows(&morph_dir.join(MANIFEST_FILE))?;
    let mut morphs = Vec::new();
    for (output, id_a, id_b) in &rows {
        let stem = output.trim_end_matches(".png").to_string();
        let img = read_image(&morph_dir.join(output))?;
        embeddings.push(Embedding {
            image_id: stem.clone(),
            model_tag: MODEL_TAG.into(),
            vector: embed(&img, &projection),
        });
        morphs.push(MorphImage {
            image_id: stem,
            subjects: vec![subject_of(id_a).to_string(), subject_of(id_b).to_string()],
        });
    }
    let embeddings_path = out.join("embeddings.csv");
    write_embeddings(&embeddings_path, &embeddings)?;

    let mut scores = Vec::new();
    for (dir, mode) in [
        ("refs", ScenarioMode::MorphsAsReferences),
        ("probes", ScenarioMode::MorphsAsProbes),
    ] {
        let d = out.join(dir);
        fs::create_dir_all(&d)?;
        let plan = plan_comparisons(&bona_fide, &morphs, mode, PairingRules::default())?;
        write_enrollment(&d.join("enrollment.csv"), &plan.enrollment)?;
        write_pairing(&d.join("pairing.csv"), &plan.pairing)?;
        let scores_path = d.join("scores.csv");
        cmd_score(&ScoreArgs {
            embeddings: embeddings_path.clone(),
            enrollment: d.join("enrollment.csv"),
            pairing: d.join("pairing.csv"),
            out: scores_path.clone(),
        })?;
        scores.push(scores_path);
    }

    let entries = cmd_evaluate(&EvaluateArgs {
        refs_scores: Some(scores[0].clone()),
        probes_scores: Some(scores[1].clone()),
        target_fmr: opts.target_fmr,
        rule: opts.rule,
        tags: EvalTags {
            tool: "landmark".into(),
            model: MODEL_TAG.into(),
            dataset: "synthetic".into(),
        },
        out: out.clone(),
    })?;
    let report_text = fs::read_to_string(out.join(super::REPORT_TXT))?;

    Ok(DemoSummary {
        n_images: bona_fide.len(),
        n_pairs,
        n_morphs,
        n_failed,
        entries,
        report_text,
    })
}

/// `(output, id_a, id_b)` of the successful rows of a batch manifest.
fn read_manifest_rows(path: &Path) -> Result<Vec<(String, String, String)>> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| super::CliError::Data(e.to_string()))?;
    let mut out = Vec::new();
    for rec in rdr.deserialize::<crate::morph::ManifestRow>() {
        let r = rec.map_err(|e| super::CliError::Data(e.to_string()))?;
        if r.status == RowStatus::Ok {
            out.push((r.output, r.id_a, r.id_b));
        }
    }
    Ok(out)
}
