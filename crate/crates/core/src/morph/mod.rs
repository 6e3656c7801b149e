//! Landmark-based morphing: both faces are warped onto their averaged
//! landmark geometry through a shared Delaunay mesh and then alpha blended.

mod batch;
mod landmarks;
mod warp;

pub use batch::{
    batch_morph, output_name, read_pair_list, write_manifest, write_pair_list, BatchOptions,
    ManifestRow, PairListRow, RowStatus, MANIFEST_FILE,
};
pub use landmarks::{
    augment_border, average_points, load_landmarks, parse_landmarks, LandmarkScheme, LandmarkSet,
    BORDER_POINTS,
};
pub use warp::{blend, warp_to, warp_to_real, FloatImage};

use std::path::PathBuf;

use thiserror::Error;

use crate::blend::{alpha_is_valid, BlendWeights};
use crate::geometry::{delaunay, GeometryError, Point2, TriangleMesh, DUPLICATE_TOLERANCE};
use crate::imaging::{ImagingError, Raster};

/// Blend weight used when none is given: both contributors count equally.
pub const DEFAULT_ALPHA: f64 = 0.5;

#[derive(Debug, Error)]
pub enum MorphError {
    #[error("{path}: expected {expected} landmarks, found {found}")]
    CountMismatch {
        path: PathBuf,
        expected: usize,
        found: usize,
    },
    #[error("{path}:{line}: {message}")]
    ParseError {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("landmark {index} at ({x}, {y}) lies outside the {width}x{height} image")]
    OutOfBounds {
        index: usize,
        x: f64,
        y: f64,
        width: usize,
        height: usize,
    },
    #[error("point lists differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("mesh does not match the point lists: {0}")]
    MeshMismatch(String),
    #[error("landmark schemes differ ({0} vs {1})")]
    SchemeMismatch(LandmarkScheme, LandmarkScheme),
    #[error("image dimensions differ ({0}x{1} vs {2}x{3})")]
    DimensionMismatch(usize, usize, usize, usize),
    #[error("alpha must lie in [0, 1], got {0}")]
    InvalidAlpha(f64),
    #[error("landmark file stem {landmarks:?} does not match image stem {image:?}")]
    StemMismatch { image: String, landmarks: String },
    #[error("unknown landmark scheme {0:?}")]
    UnknownScheme(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Imaging(#[from] ImagingError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, MorphError>;

/// One contributor of a morph: an image and its landmarks.
#[derive(Debug, Clone, Copy)]
pub struct MorphInput<'a> {
    pub image: &'a Raster,
    pub landmarks: &'a LandmarkSet,
}

/// A pair of contributors and the weight of the first one.
#[derive(Debug, Clone, Copy)]
pub struct MorphSpec<'a> {
    pub a: MorphInput<'a>,
    pub b: MorphInput<'a>,
    pub alpha: f64,
}

impl<'a> MorphSpec<'a> {
    pub fn new(a: MorphInput<'a>, b: MorphInput<'a>, alpha: f64) -> Self {
        MorphSpec { a, b, alpha }
    }

    pub fn validate(&self) -> Result<()> {
        if !alpha_is_valid(self.alpha) {
            return Err(MorphError::InvalidAlpha(self.alpha));
        }
        let (la, lb) = (self.a.landmarks, self.b.landmarks);
        if la.scheme != lb.scheme {
            return Err(MorphError::SchemeMismatch(la.scheme, lb.scheme));
        }
        if la.points.len() != lb.points.len() {
            return Err(MorphError::LengthMismatch(la.points.len(), lb.points.len()));
        }
        let (ia, ib) = (self.a.image, self.b.image);
        if ia.width() != ib.width() || ia.height() != ib.height() {
            return Err(MorphError::DimensionMismatch(
                ia.width(),
                ia.height(),
                ib.width(),
                ib.height(),
            ));
        }
        Ok(())
    }
}

/// Everything a morph computes before the final quantization.
#[derive(Debug, Clone)]
pub struct MorphPlan {
    pub weights: BlendWeights,
    /// Border-augmented landmarks of each contributor.
    pub points_a: Vec<Point2>,
    pub points_b: Vec<Point2>,
    /// Target geometry, triangulated by `mesh`.
    pub average: Vec<Point2>,
    pub mesh: TriangleMesh,
    pub warped_a: FloatImage,
    pub warped_b: FloatImage,
}

impl MorphPlan {
    pub fn blended(&self) -> FloatImage {
        blend(&self.warped_a, &self.warped_b, self.weights)
    }

    pub fn render(&self) -> Raster {
        self.blended().quantize()
    }
}

/// Runs the morph pipeline up to (not including) quantization.
pub fn plan_morph(spec: &MorphSpec<'_>) -> Result<MorphPlan> {
    spec.validate()?;
    let weights = BlendWeights::new(spec.alpha);
    let (w, h) = (spec.a.image.width(), spec.a.image.height());

    let mut points_a = augment_border(&spec.a.landmarks.points, w, h);
    let mut points_b = augment_border(&spec.b.landmarks.points, w, h);
    let mut average = landmarks::mix_points(&points_a, &points_b, weights);

    // A landmark sitting exactly on a border anchor would duplicate it; the
    // anchor is redundant then and is dropped from all three lists alike.
    let k = spec.a.landmarks.points.len();
    let keep: Vec<bool> = (0..average.len())
        .map(|j| {
            j < k
                || !average[..k]
                    .iter()
                    .any(|p| p.distance(&average[j]) < DUPLICATE_TOLERANCE)
        })
        .collect();
    if keep.iter().any(|k| !k) {
        let filter = |v: &mut Vec<Point2>| {
            let mut it = keep.iter();
            v.retain(|_| *it.next().unwrap());
        };
        filter(&mut points_a);
        filter(&mut points_b);
        filter(&mut average);
    }

    let mesh = delaunay(&average)?;
    let warped_a = warp_to_real(spec.a.image, &points_a, &average, &mesh)?;
    let warped_b = warp_to_real(spec.b.image, &points_b, &average, &mesh)?;
    Ok(MorphPlan {
        weights,
        points_a,
        points_b,
        average,
        mesh,
        warped_a,
        warped_b,
    })
}

/// Morphs two faces: `alpha * warp(A) + (1 - alpha) * warp(B)` on the
/// `alpha`-weighted average geometry, rounded half up per channel.
pub fn morph(spec: &MorphSpec<'_>) -> Result<Raster> {
    Ok(plan_morph(spec)?.render())
}
