//! Planar geometry kernel: Delaunay triangulation, barycentric coordinates
//! and affine maps between triangle pairs.
//!
//! All routines are pure functions over immutable inputs. Orientation and
//! in-circle decisions go through adaptive-exact predicates, so the
//! triangulation is stable even for nearly co-circular landmark layouts.

mod affine;
mod delaunay;
mod predicates;

pub use affine::{affine_from_triangles, barycentric, AffineMap2};
pub use delaunay::{delaunay, TriangleMesh};
pub use predicates::{circumcircle_contains, in_circle, orient};

use thiserror::Error;

/// Distance below which two points are considered the same point.
pub const DUPLICATE_TOLERANCE: f64 = 1e-9;

/// A point in image space, in pixels.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn distance(&self, other: &Point2) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    /// Lexicographic (x, then y) order.
    pub fn lex_cmp(&self, other: &Point2) -> std::cmp::Ordering {
        self.x
            .total_cmp(&other.x)
            .then_with(|| self.y.total_cmp(&other.y))
    }
}

impl From<(f64, f64)> for Point2 {
    fn from((x, y): (f64, f64)) -> Self {
        Point2 { x, y }
    }
}

pub type Triangle = [Point2; 3];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("at least 3 points are required, got {0}")]
    TooFewPoints(usize),
    #[error("all input points are collinear")]
    CollinearInput,
    #[error("points {0} and {1} coincide")]
    DuplicatePoints(usize, usize),
    #[error("point {0} has a non-finite coordinate")]
    NonFinite(usize),
    #[error("triangle is degenerate (zero area)")]
    DegenerateTriangle,
    #[error("source triangle is degenerate (zero area)")]
    DegenerateSource,
    #[error("triangle {triangle} references point {index} but only {len} points exist")]
    IndexOutOfRange {
        triangle: usize,
        index: usize,
        len: usize,
    },
}

pub type Result<T> = std::result::Result<T, GeometryError>;
