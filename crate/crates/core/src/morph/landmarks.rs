use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use super::{MorphError, Result};
use crate::blend::{alpha_is_valid, BlendWeights};
use crate::geometry::Point2;

/// Number of anchor points appended by [`augment_border`].
pub const BORDER_POINTS: usize = 8;

/// Landmark annotation layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LandmarkScheme {
    /// 68-point iBUG / dlib layout.
    Dlib68,
    /// 189-point layout shipped with the London face set.
    Frll189,
    Custom(usize),
}

impl LandmarkScheme {
    pub fn expected_count(&self) -> usize {
        match self {
            LandmarkScheme::Dlib68 => 68,
            LandmarkScheme::Frll189 => 189,
            LandmarkScheme::Custom(k) => *k,
        }
    }
}

impl fmt::Display for LandmarkScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LandmarkScheme::Dlib68 => f.write_str("68"),
            LandmarkScheme::Frll189 => f.write_str("189"),
            LandmarkScheme::Custom(k) => write!(f, "custom-{k}"),
        }
    }
}

impl FromStr for LandmarkScheme {
    type Err = MorphError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "68" => Ok(LandmarkScheme::Dlib68),
            "189" => Ok(LandmarkScheme::Frll189),
            other => other
                .strip_prefix("custom-")
                .and_then(|k| k.parse().ok())
                .map(LandmarkScheme::Custom)
                .ok_or_else(|| MorphError::UnknownScheme(other.to_string())),
        }
    }
}

/// Ordered 2-D landmarks for one face image.
#[derive(Debug, Clone, PartialEq)]
pub struct LandmarkSet {
    /// File the landmarks were read from, if any.
    pub source: Option<PathBuf>,
    pub points: Vec<Point2>,
    pub scheme: LandmarkScheme,
}

impl LandmarkSet {
    pub fn new(points: Vec<Point2>, scheme: LandmarkScheme) -> Self {
        LandmarkSet {
            source: None,
            points,
            scheme,
        }
    }

    /// Checks every point against the image extent `[0, width] x [0, height]`.
    pub fn check_bounds(&self, width: usize, height: usize) -> Result<()> {
        let (w, h) = (width as f64, height as f64);
        for (index, p) in self.points.iter().enumerate() {
            if !(0.0..=w).contains(&p.x) || !(0.0..=h).contains(&p.y) {
                return Err(MorphError::OutOfBounds {
                    index,
                    x: p.x,
                    y: p.y,
                    width,
                    height,
                });
            }
        }
        Ok(())
    }

    /// Landmark files are named after their image: `face_01.txt` annotates
    /// `face_01.png`.
    pub fn check_stem(&self, image_path: &Path) -> Result<()> {
        let Some(src) = &self.source else {
            return Ok(());
        };
        let stem = |p: &Path| {
            p.file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default()
        };
        let (image, landmarks) = (stem(image_path), stem(src));
        if image != landmarks {
            return Err(MorphError::StemMismatch { image, landmarks });
        }
        Ok(())
    }
}

/// Parses landmark text: one `x y` pair per line, blank lines and lines
/// starting with `#` ignored.
pub fn parse_landmarks(text: &str, path: &Path) -> Result<Vec<Point2>> {
    let err = |line: usize, message: String| MorphError::ParseError {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut points = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(err(i + 1, format!("expected \"x y\", got {line:?}")));
        }
        let mut xy = [0.0; 2];
        for (slot, field) in xy.iter_mut().zip(&fields) {
            let v: f64 = field
                .parse()
                .map_err(|_| err(i + 1, format!("not a number: {field:?}")))?;
            if !v.is_finite() {
                return Err(err(i + 1, format!("non-finite coordinate {field:?}")));
            }
            *slot = v;
        }
        points.push(Point2::new(xy[0], xy[1]));
    }
    Ok(points)
}

pub fn load_landmarks(path: &Path, scheme: LandmarkScheme) -> Result<LandmarkSet> {
    let text = fs::read_to_string(path)?;
    let points = parse_landmarks(&text, path)?;
    if points.len() != scheme.expected_count() {
        return Err(MorphError::CountMismatch {
            path: path.to_path_buf(),
            expected: scheme.expected_count(),
            found: points.len(),
        });
    }
    Ok(LandmarkSet {
        source: Some(path.to_path_buf()),
        points,
        scheme,
    })
}

/// Appends eight image anchors so the mesh spans the whole frame, in this
/// order: the four corners (top-left, top-right, bottom-left,
/// bottom-right), then the midpoints of the top, bottom, left and right
/// edges. Coordinates use pixel centers, so the far edge is `width - 1`.
pub fn augment_border(points: &[Point2], width: usize, height: usize) -> Vec<Point2> {
    let (r, b) = ((width - 1) as f64, (height - 1) as f64);
    let (mx, my) = (r / 2.0, b / 2.0);
    let mut out = Vec::with_capacity(points.len() + BORDER_POINTS);
    out.extend_from_slice(points);
    out.extend([
        Point2::new(0.0, 0.0),
        Point2::new(r, 0.0),
        Point2::new(0.0, b),
        Point2::new(r, b),
        Point2::new(mx, 0.0),
        Point2::new(mx, b),
        Point2::new(0.0, my),
        Point2::new(r, my),
    ]);
    out
}

pub(crate) fn mix_points(pa: &[Point2], pb: &[Point2], w: BlendWeights) -> Vec<Point2> {
    pa.iter()
        .zip(pb)
        .map(|(a, b)| Point2::new(w.mix(a.x, b.x), w.mix(a.y, b.y)))
        .collect()
}

/// `alpha * pa + (1 - alpha) * pb`, point by point.
pub fn average_points(pa: &[Point2], pb: &[Point2], alpha: f64) -> Result<Vec<Point2>> {
    if pa.len() != pb.len() {
        return Err(MorphError::LengthMismatch(pa.len(), pb.len()));
    }
    if !alpha_is_valid(alpha) {
        return Err(MorphError::InvalidAlpha(alpha));
    }
    Ok(mix_points(pa, pb, BlendWeights::new(alpha)))
}
