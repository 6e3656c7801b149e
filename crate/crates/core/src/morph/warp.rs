use super::{MorphError, Result};
use crate::blend::BlendWeights;
use crate::geometry::{affine_from_triangles, barycentric, Point2, TriangleMesh};
use crate::imaging::{quantize, sample_bilinear, Raster};

/// Barycentric slack for the closed point-in-triangle test.
const INSIDE_EPS: f64 = 1e-9;

/// Unquantized RGB image produced by warping and blending.
#[derive(Debug, Clone, PartialEq)]
pub struct FloatImage {
    width: usize,
    height: usize,
    data: Vec<[f64; 3]>,
}

impl FloatImage {
    pub fn from_raster(r: &Raster) -> Self {
        FloatImage {
            width: r.width(),
            height: r.height(),
            data: r.pixels().iter().map(|p| p.map(f64::from)).collect(),
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[[f64; 3]] {
        &self.data
    }

    pub fn quantize(&self) -> Raster {
        let pixels = self.data.iter().map(|p| p.map(quantize)).collect();
        Raster::new(self.width, self.height, pixels).expect("shape carried from a valid raster")
    }
}

/// Per-pixel `w.a * a + w.b * b`.
pub fn blend(a: &FloatImage, b: &FloatImage, w: BlendWeights) -> FloatImage {
    assert_eq!((a.width, a.height), (b.width, b.height));
    let data = a
        .data
        .iter()
        .zip(&b.data)
        .map(|(p, q)| [w.mix(p[0], q[0]), w.mix(p[1], q[1]), w.mix(p[2], q[2])])
        .collect();
    FloatImage {
        width: a.width,
        height: a.height,
        data,
    }
}

fn check_mesh(src_pts: &[Point2], dst_pts: &[Point2], mesh: &TriangleMesh) -> Result<()> {
    if src_pts.len() != dst_pts.len() {
        return Err(MorphError::MeshMismatch(format!(
            "{} source points vs {} destination points",
            src_pts.len(),
            dst_pts.len()
        )));
    }
    if mesh.points().len() != dst_pts.len() {
        return Err(MorphError::MeshMismatch(format!(
            "mesh has {} points, destination has {}",
            mesh.points().len(),
            dst_pts.len()
        )));
    }
    Ok(())
}

/// Piecewise-affine warp of `src` from `src_pts` geometry onto `dst_pts`
/// geometry, without quantization.
///
/// Each destination pixel inside a mesh triangle is pulled back through the
/// triangle-pair affine map and sampled bilinearly. A pixel on a shared edge
/// belongs to the first triangle in mesh order. Pixels outside every triangle
/// keep the source value.
pub fn warp_to_real(
    src: &Raster,
    src_pts: &[Point2],
    dst_pts: &[Point2],
    mesh: &TriangleMesh,
) -> Result<FloatImage> {
    check_mesh(src_pts, dst_pts, mesh)?;
    let (w, h) = (src.width(), src.height());
    let mut out = FloatImage::from_raster(src);
    let mut owned = vec![false; w * h];

    for tri in mesh.triangles() {
        let dst = [dst_pts[tri[0]], dst_pts[tri[1]], dst_pts[tri[2]]];
        let s = [src_pts[tri[0]], src_pts[tri[1]], src_pts[tri[2]]];
        let map = affine_from_triangles(&dst, &s)?;

        let min_x = dst.iter().map(|p| p.x).fold(f64::INFINITY, f64::min);
        let max_x = dst.iter().map(|p| p.x).fold(f64::NEG_INFINITY, f64::max);
        let min_y = dst.iter().map(|p| p.y).fold(f64::INFINITY, f64::min);
        let max_y = dst.iter().map(|p| p.y).fold(f64::NEG_INFINITY, f64::max);
        if max_x < 0.0 || max_y < 0.0 || min_x > (w - 1) as f64 || min_y > (h - 1) as f64 {
            continue;
        }
        let x0 = min_x.ceil().max(0.0) as usize;
        let y0 = min_y.ceil().max(0.0) as usize;
        let x1 = (max_x.floor() as usize).min(w - 1);
        let y1 = (max_y.floor() as usize).min(h - 1);

        for y in y0..=y1 {
            for x in x0..=x1 {
                let idx = y * w + x;
                if owned[idx] {
                    continue;
                }
                let p = Point2::new(x as f64, y as f64);
                let (l0, l1, l2) = barycentric(&dst, p)?;
                if l0 < -INSIDE_EPS || l1 < -INSIDE_EPS || l2 < -INSIDE_EPS {
                    continue;
                }
                owned[idx] = true;
                let q = map.apply(p);
                out.data[idx] = sample_bilinear(src, q.x, q.y);
            }
        }
    }
    Ok(out)
}

/// [`warp_to_real`] followed by round-half-up quantization.
pub fn warp_to(
    src: &Raster,
    src_pts: &[Point2],
    dst_pts: &[Point2],
    mesh: &TriangleMesh,
) -> Result<Raster> {
    Ok(warp_to_real(src, src_pts, dst_pts, mesh)?.quantize())
}
