//! 8-bit RGB rasters, lossless PNG / binary PPM I/O and bilinear sampling.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use log::warn;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ImagingError {
    #[error("unsupported image format: {0}")]
    UnsupportedFormat(String),
    #[error("corrupt image file: {0}")]
    CorruptFile(String),
    #[error("i/o failure: {0}")]
    IoFailure(#[from] std::io::Error),
    #[error("invalid raster: {0}")]
    InvalidRaster(String),
}

pub type Result<T> = std::result::Result<T, ImagingError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImageFormat {
    Png,
    Ppm,
}

impl ImageFormat {
    pub fn from_path(path: &Path) -> Option<ImageFormat> {
        let ext = path.extension()?.to_str()?.to_ascii_lowercase();
        match ext.as_str() {
            "png" => Some(ImageFormat::Png),
            "ppm" => Some(ImageFormat::Ppm),
            _ => None,
        }
    }
}

/// Row-major RGB image, 8 bits per channel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Raster {
    width: usize,
    height: usize,
    pixels: Vec<[u8; 3]>,
}

impl Raster {
    pub fn new(width: usize, height: usize, pixels: Vec<[u8; 3]>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(ImagingError::InvalidRaster(format!(
                "dimensions must be positive, got {width}x{height}"
            )));
        }
        if pixels.len() != width * height {
            return Err(ImagingError::InvalidRaster(format!(
                "{} pixels for a {width}x{height} raster",
                pixels.len()
            )));
        }
        Ok(Raster {
            width,
            height,
            pixels,
        })
    }

    pub fn filled(width: usize, height: usize, rgb: [u8; 3]) -> Result<Self> {
        Raster::new(width, height, vec![rgb; width * height])
    }

    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> [u8; 3],
    ) -> Result<Self> {
        let mut pixels = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                pixels.push(f(x, y));
            }
        }
        Raster::new(width, height, pixels)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[[u8; 3]] {
        &self.pixels
    }

    pub fn get(&self, x: usize, y: usize) -> [u8; 3] {
        self.pixels[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, rgb: [u8; 3]) {
        self.pixels[y * self.width + x] = rgb;
    }

    pub fn as_bytes(&self) -> Vec<u8> {
        self.pixels.iter().flatten().copied().collect()
    }

    /// Largest per-channel absolute difference between two same-size rasters.
    pub fn max_abs_diff(&self, other: &Raster) -> Option<u8> {
        if self.width != other.width || self.height != other.height {
            return None;
        }
        Some(
            self.pixels
                .iter()
                .zip(&other.pixels)
                .flat_map(|(p, q)| (0..3).map(move |c| p[c].abs_diff(q[c])))
                .max()
                .unwrap_or(0),
        )
    }
}

/// Round half up, then clamp to `[0, 255]`.
pub fn quantize(v: f64) -> u8 {
    let r = (v + 0.5).floor();
    if r.is_nan() || r <= 0.0 {
        0
    } else if r >= 255.0 {
        255
    } else {
        r as u8
    }
}

/// Bilinear sample at `(x, y)` with clamp-to-edge. Integer coordinates
/// return the stored pixel exactly.
pub fn sample_bilinear(raster: &Raster, x: f64, y: f64) -> [f64; 3] {
    let max_x = (raster.width - 1) as f64;
    let max_y = (raster.height - 1) as f64;
    let x = if x.is_nan() { 0.0 } else { x.clamp(0.0, max_x) };
    let y = if y.is_nan() { 0.0 } else { y.clamp(0.0, max_y) };
    let x0 = x.floor();
    let y0 = y.floor();
    let fx = x - x0;
    let fy = y - y0;
    let (x0, y0) = (x0 as usize, y0 as usize);
    let x1 = (x0 + 1).min(raster.width - 1);
    let y1 = (y0 + 1).min(raster.height - 1);

    let p00 = raster.get(x0, y0);
    if fx == 0.0 && fy == 0.0 {
        return p00.map(f64::from);
    }
    let p10 = raster.get(x1, y0);
    let p01 = raster.get(x0, y1);
    let p11 = raster.get(x1, y1);
    let mut out = [0.0; 3];
    for c in 0..3 {
        let top = f64::from(p00[c]) * (1.0 - fx) + f64::from(p10[c]) * fx;
        let bottom = f64::from(p01[c]) * (1.0 - fx) + f64::from(p11[c]) * fx;
        out[c] = top * (1.0 - fy) + bottom * fy;
    }
    out
}

pub fn read_image(path: &Path) -> Result<Raster> {
    let bytes = fs::read(path)?;
    if bytes.starts_with(b"\x89PNG") {
        decode_png(&bytes)
    } else if bytes.starts_with(b"P6") {
        decode_ppm(&bytes)
    } else {
        Err(ImagingError::UnsupportedFormat(format!(
            "{}: not a PNG or binary PPM",
            path.display()
        )))
    }
}

pub fn write_image(raster: &Raster, path: &Path, format: ImageFormat) -> Result<()> {
    match format {
        ImageFormat::Png => {
            let buf = image::RgbImage::from_raw(
                raster.width as u32,
                raster.height as u32,
                raster.as_bytes(),
            )
            .expect("raster invariant guarantees buffer size");
            buf.save_with_format(path, image::ImageFormat::Png)
                .map_err(|e| match e {
                    image::ImageError::IoError(io) => ImagingError::IoFailure(io),
                    other => ImagingError::IoFailure(std::io::Error::other(other)),
                })
        }
        ImageFormat::Ppm => {
            let mut w = BufWriter::new(fs::File::create(path)?);
            write!(w, "P6\n{} {}\n255\n", raster.width, raster.height)?;
            w.write_all(&raster.as_bytes())?;
            w.flush()?;
            Ok(())
        }
    }
}

fn decode_png(bytes: &[u8]) -> Result<Raster> {
    let img = image::load_from_memory_with_format(bytes, image::ImageFormat::Png)
        .map_err(|e| match e {
            image::ImageError::Unsupported(u) => ImagingError::UnsupportedFormat(u.to_string()),
            other => ImagingError::CorruptFile(other.to_string()),
        })?;
    if img.color().has_alpha() {
        warn!("dropping alpha channel from PNG input");
    }
    let rgb = img.to_rgb8();
    let (w, h) = (rgb.width() as usize, rgb.height() as usize);
    let pixels = rgb.pixels().map(|p| p.0).collect();
    Raster::new(w, h, pixels).map_err(|e| ImagingError::CorruptFile(e.to_string()))
}

fn decode_ppm(bytes: &[u8]) -> Result<Raster> {
    let mut pos = 2;
    let mut fields = [0usize; 3];
    for field in fields.iter_mut() {
        // Whitespace and '#' comments separate header fields.
        loop {
            match bytes.get(pos) {
                Some(b'#') => {
                    while !matches!(bytes.get(pos), Some(b'\n') | None) {
                        pos += 1;
                    }
                }
                Some(c) if c.is_ascii_whitespace() => pos += 1,
                _ => break,
            }
        }
        let start = pos;
        while matches!(bytes.get(pos), Some(c) if c.is_ascii_digit()) {
            pos += 1;
        }
        if start == pos {
            return Err(ImagingError::CorruptFile("malformed PPM header".into()));
        }
        *field = std::str::from_utf8(&bytes[start..pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| ImagingError::CorruptFile("malformed PPM header".into()))?;
    }
    let [w, h, maxval] = fields;
    if maxval != 255 {
        return Err(ImagingError::UnsupportedFormat(format!(
            "PPM maxval {maxval} (only 8-bit is supported)"
        )));
    }
    if !matches!(bytes.get(pos), Some(c) if c.is_ascii_whitespace()) {
        return Err(ImagingError::CorruptFile("malformed PPM header".into()));
    }
    pos += 1;
    let need = w
        .checked_mul(h)
        .and_then(|n| n.checked_mul(3))
        .ok_or_else(|| ImagingError::CorruptFile("PPM dimensions overflow".into()))?;
    let data = &bytes[pos..];
    if data.len() < need {
        return Err(ImagingError::CorruptFile(format!(
            "PPM truncated: expected {need} data bytes, found {}",
            data.len()
        )));
    }
    let pixels = data[..need]
        .chunks_exact(3)
        .map(|c| [c[0], c[1], c[2]])
        .collect();
    Raster::new(w, h, pixels).map_err(|e| ImagingError::CorruptFile(e.to_string()))
}
