//! Generator-agnostic latent interpolation.
//!
//! A morph in latent space is the image a generator synthesizes from the
//! blend of two latent codes. Real generators (a StyleGAN2 synthesis network
//! plus a projection step that finds each face's code) plug in through
//! [`GeneratorBackend`]; the crate ships only [`LinearTestBackend`], a fixed
//! pseudo-random linear decoder whose behaviour is checkable exactly.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::blend::{alpha_is_valid, BlendWeights};
use crate::imaging::{quantize, Raster};

#[derive(Debug, Error)]
pub enum LatentError {
    #[error("latent spaces differ: {0} vs {1}")]
    SpaceMismatch(String, String),
    #[error("space tag {tag:?} declares dimension {declared}, vector has {actual}")]
    DimensionMismatch {
        tag: String,
        declared: usize,
        actual: usize,
    },
    #[error("invalid space tag {0:?} (expected <name>-<dimension>)")]
    InvalidSpaceTag(String),
    #[error("latent entry {0} is not finite")]
    NonFinite(usize),
    #[error("alpha must lie in [0, 1], got {0}")]
    InvalidAlpha(f64),
    #[error("line {line}: {message}")]
    ParseError { line: usize, message: String },
    #[error("generator backend failed: {0}")]
    BackendFailure(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, LatentError>;

/// Parses the dimension out of a tag such as `W-512`.
pub fn space_dimension(tag: &str) -> Result<usize> {
    tag.rsplit_once('-')
        .filter(|(name, _)| !name.is_empty())
        .and_then(|(_, d)| d.parse().ok())
        .filter(|&d| d > 0)
        .ok_or_else(|| LatentError::InvalidSpaceTag(tag.to_string()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct LatentVector {
    values: Vec<f64>,
    space_tag: String,
}

impl LatentVector {
    pub fn new(space_tag: impl Into<String>, values: Vec<f64>) -> Result<Self> {
        let space_tag = space_tag.into();
        let declared = space_dimension(&space_tag)?;
        if declared != values.len() {
            return Err(LatentError::DimensionMismatch {
                tag: space_tag,
                declared,
                actual: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(LatentError::NonFinite(i));
        }
        Ok(LatentVector { values, space_tag })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn space_tag(&self) -> &str {
        &self.space_tag
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// `space_tag,v0,v1,...`
    pub fn to_csv_row(&self) -> String {
        let mut s = self.space_tag.clone();
        for v in &self.values {
            // `{:?}` prints the shortest representation that round-trips.
            write!(s, ",{v:?}").unwrap();
        }
        s
    }
}

/// Reads latent vectors, one `space_tag,v0,v1,...` row per line.
pub fn read_latents(path: &Path) -> Result<Vec<LatentVector>> {
    let text = fs::read_to_string(path)?;
    parse_latents(&text)
}

pub fn parse_latents(text: &str) -> Result<Vec<LatentVector>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let tag = fields.next().unwrap_or_default().trim();
        let values = fields
            .map(|f| {
                f.trim().parse::<f64>().map_err(|_| LatentError::ParseError {
                    line: i + 1,
                    message: format!("not a number: {f:?}"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        out.push(LatentVector::new(tag, values).map_err(|e| LatentError::ParseError {
            line: i + 1,
            message: e.to_string(),
        })?);
    }
    Ok(out)
}

pub fn write_latents(path: &Path, latents: &[LatentVector]) -> Result<()> {
    let mut s = String::new();
    for l in latents {
        s.push_str(&l.to_csv_row());
        s.push('\n');
    }
    fs::write(path, s)?;
    Ok(())
}

/// `alpha * wa + (1 - alpha) * wb`.
pub fn lerp_latent(wa: &LatentVector, wb: &LatentVector, alpha: f64) -> Result<LatentVector> {
    if wa.space_tag != wb.space_tag || wa.dim() != wb.dim() {
        return Err(LatentError::SpaceMismatch(
            wa.space_tag.clone(),
            wb.space_tag.clone(),
        ));
    }
    if !alpha_is_valid(alpha) {
        return Err(LatentError::InvalidAlpha(alpha));
    }
    let w = BlendWeights::new(alpha);
    Ok(LatentVector {
        values: wa
            .values
            .iter()
            .zip(&wb.values)
            .map(|(a, b)| w.mix(*a, *b))
            .collect(),
        space_tag: wa.space_tag.clone(),
    })
}

/// Image synthesis from a latent code.
///
/// Implementations must be deterministic for a fixed input and safe to call
/// from several threads at once.
pub trait GeneratorBackend: Send + Sync {
    fn space_tag(&self) -> &str;

    fn synthesize(&self, latent: &LatentVector) -> Result<Raster>;
}

/// Synthesizes the interpolated code `alpha * wa + (1 - alpha) * wb`.
pub fn latent_morph(
    backend: &dyn GeneratorBackend,
    wa: &LatentVector,
    wb: &LatentVector,
    alpha: f64,
) -> Result<Raster> {
    for w in [wa, wb] {
        if w.space_tag() != backend.space_tag() {
            return Err(LatentError::SpaceMismatch(
                w.space_tag().to_string(),
                backend.space_tag().to_string(),
            ));
        }
    }
    backend.synthesize(&lerp_latent(wa, wb, alpha)?)
}

/// Linear decoder `pixel = clamp(round(M w + c))` with entries of `M` and
/// `c` drawn from a seeded ChaCha stream.
#[derive(Debug, Clone)]
pub struct LinearTestBackend {
    width: usize,
    height: usize,
    space_tag: String,
    dim: usize,
    /// Row-major, one row of length `dim` per output channel value.
    matrix: Vec<f64>,
    bias: Vec<f64>,
}

impl LinearTestBackend {
    pub fn new(width: usize, height: usize, space_tag: &str, seed: u64) -> Result<Self> {
        let dim = space_dimension(space_tag)?;
        let outputs = width * height * 3;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let scale = 40.0 / (dim as f64).sqrt();
        let matrix = (0..outputs * dim)
            .map(|_| rng.gen_range(-1.0..1.0) * scale)
            .collect();
        let bias = (0..outputs).map(|_| rng.gen_range(64.0..192.0)).collect();
        Ok(LinearTestBackend {
            width,
            height,
            space_tag: space_tag.to_string(),
            dim,
            matrix,
            bias,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// `M w + c` before rounding, flattened row-major RGB.
    pub fn decode_real(&self, latent: &LatentVector) -> Result<Vec<f64>> {
        if latent.space_tag() != self.space_tag {
            return Err(LatentError::SpaceMismatch(
                latent.space_tag().to_string(),
                self.space_tag.clone(),
            ));
        }
        Ok(self
            .matrix
            .chunks_exact(self.dim)
            .zip(&self.bias)
            .map(|(row, c)| row.iter().zip(latent.values()).map(|(m, v)| m * v).sum::<f64>() + c)
            .collect())
    }

    /// Entry `(output, k)` of the decoder matrix.
    pub fn weight(&self, output: usize, k: usize) -> f64 {
        self.matrix[output * self.dim + k]
    }

    pub fn bias(&self, output: usize) -> f64 {
        self.bias[output]
    }
}

impl GeneratorBackend for LinearTestBackend {
    fn space_tag(&self) -> &str {
        &self.space_tag
    }

    fn synthesize(&self, latent: &LatentVector) -> Result<Raster> {
        let real = self.decode_real(latent)?;
        let pixels = real
            .chunks_exact(3)
            .map(|c| [quantize(c[0]), quantize(c[1]), quantize(c[2])])
            .collect();
        Raster::new(self.width, self.height, pixels)
            .map_err(|e| LatentError::BackendFailure(e.to_string()))
    }
}
