use super::predicates::orient;
use super::{GeometryError, Point2, Result, Triangle};

/// A 2-D affine map stored as the 2×3 matrix `[a b tx; c d ty]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineMap2 {
    pub m: [[f64; 3]; 2],
}

impl AffineMap2 {
    pub const IDENTITY: AffineMap2 = AffineMap2 {
        m: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]],
    };

    pub fn apply(&self, p: Point2) -> Point2 {
        let m = &self.m;
        Point2::new(
            m[0][0] * p.x + m[0][1] * p.y + m[0][2],
            m[1][0] * p.x + m[1][1] * p.y + m[1][2],
        )
    }

    pub fn determinant(&self) -> f64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    /// `other ∘ self`: apply `self` first, then `other`.
    pub fn then(&self, other: &AffineMap2) -> AffineMap2 {
        let a = &other.m;
        let b = &self.m;
        let mut m = [[0.0; 3]; 2];
        for r in 0..2 {
            m[r][0] = a[r][0] * b[0][0] + a[r][1] * b[1][0];
            m[r][1] = a[r][0] * b[0][1] + a[r][1] * b[1][1];
            m[r][2] = a[r][0] * b[0][2] + a[r][1] * b[1][2] + a[r][2];
        }
        AffineMap2 { m }
    }
}

/// The unique affine map carrying the vertices of `src` onto those of `dst`.
pub fn affine_from_triangles(src: &Triangle, dst: &Triangle) -> Result<AffineMap2> {
    if orient(src[0], src[1], src[2]) == 0.0 {
        return Err(GeometryError::DegenerateSource);
    }
    // Edge vectors relative to vertex 0.
    let (sx1, sy1) = (src[1].x - src[0].x, src[1].y - src[0].y);
    let (sx2, sy2) = (src[2].x - src[0].x, src[2].y - src[0].y);
    let (dx1, dy1) = (dst[1].x - dst[0].x, dst[1].y - dst[0].y);
    let (dx2, dy2) = (dst[2].x - dst[0].x, dst[2].y - dst[0].y);

    let det = sx1 * sy2 - sx2 * sy1;
    if det == 0.0 {
        return Err(GeometryError::DegenerateSource);
    }
    // Inverse of the source edge matrix [[sx1 sx2] [sy1 sy2]].
    let (i00, i01) = (sy2 / det, -sx2 / det);
    let (i10, i11) = (-sy1 / det, sx1 / det);

    let a = dx1 * i00 + dx2 * i10;
    let b = dx1 * i01 + dx2 * i11;
    let c = dy1 * i00 + dy2 * i10;
    let d = dy1 * i01 + dy2 * i11;
    let tx = dst[0].x - (a * src[0].x + b * src[0].y);
    let ty = dst[0].y - (c * src[0].x + d * src[0].y);
    Ok(AffineMap2 {
        m: [[a, b, tx], [c, d, ty]],
    })
}

/// Barycentric coordinates of `p` with respect to `tri`.
///
/// The third coordinate is taken as the complement of the first two so the
/// sum is one up to a single rounding.
pub fn barycentric(tri: &Triangle, p: Point2) -> Result<(f64, f64, f64)> {
    if orient(tri[0], tri[1], tri[2]) == 0.0 {
        return Err(GeometryError::DegenerateTriangle);
    }
    let [v0, v1, v2] = *tri;
    let det = (v1.y - v2.y) * (v0.x - v2.x) + (v2.x - v1.x) * (v0.y - v2.y);
    if det == 0.0 {
        return Err(GeometryError::DegenerateTriangle);
    }
    let l0 = ((v1.y - v2.y) * (p.x - v2.x) + (v2.x - v1.x) * (p.y - v2.y)) / det;
    let l1 = ((v2.y - v0.y) * (p.x - v2.x) + (v0.x - v2.x) * (p.y - v2.y)) / det;
    Ok((l0, l1, 1.0 - l0 - l1))
}
