use super::{GeometryError, Point2, Result, Triangle};
use robust::Coord;

fn coord(p: Point2) -> Coord<f64> {
    Coord { x: p.x, y: p.y }
}

/// Twice the signed area of `(a, b, c)`: positive for a counter-clockwise
/// turn, negative for clockwise, exactly zero for collinear points.
pub fn orient(a: Point2, b: Point2, c: Point2) -> f64 {
    robust::orient2d(coord(a), coord(b), coord(c))
}

/// Positive iff `d` lies strictly inside the circle through the
/// counter-clockwise triangle `(a, b, c)`; zero when co-circular.
pub fn in_circle(a: Point2, b: Point2, c: Point2, d: Point2) -> f64 {
    robust::incircle(coord(a), coord(b), coord(c), coord(d))
}

/// True iff `p` lies strictly inside the circumcircle of `tri`. Points on
/// the circle are outside. The triangle may be given in either winding.
pub fn circumcircle_contains(tri: &Triangle, p: Point2) -> Result<bool> {
    let o = orient(tri[0], tri[1], tri[2]);
    if o == 0.0 {
        return Err(GeometryError::DegenerateTriangle);
    }
    let det = in_circle(tri[0], tri[1], tri[2], p);
    Ok(if o > 0.0 { det > 0.0 } else { det < 0.0 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64, y: f64) -> Point2 {
        Point2::new(x, y)
    }

    #[test]
    fn interior_point_is_inside() {
        let t = [p(0., 0.), p(1., 0.), p(0., 1.)];
        assert!(circumcircle_contains(&t, p(0.25, 0.25)).unwrap());
    }

    #[test]
    fn cocircular_corner_is_not_strictly_inside() {
        let t = [p(0., 0.), p(1., 0.), p(0., 1.)];
        assert!(!circumcircle_contains(&t, p(1., 1.)).unwrap());
    }

    #[test]
    fn far_point_is_outside() {
        let t = [p(0., 0.), p(2., 0.), p(0., 2.)];
        assert!(!circumcircle_contains(&t, p(5., 5.)).unwrap());
    }

    #[test]
    fn winding_does_not_matter() {
        let t = [p(0., 0.), p(0., 1.), p(1., 0.)];
        assert!(circumcircle_contains(&t, p(0.25, 0.25)).unwrap());
        assert!(!circumcircle_contains(&t, p(3., 3.)).unwrap());
    }

    #[test]
    fn degenerate_triangle_is_rejected() {
        let t = [p(0., 0.), p(1., 1.), p(2., 2.)];
        assert_eq!(
            circumcircle_contains(&t, p(0., 1.)),
            Err(GeometryError::DegenerateTriangle)
        );
    }

    #[test]
    fn orient_is_exact_on_near_collinear_input() {
        // Naive evaluation of this determinant rounds to a nonzero value.
        let a = p(0.5, 0.5);
        let b = p(12.0, 12.0);
        let c = p(24.0, 24.0);
        assert_eq!(orient(a, b, c), 0.0);
        let c2 = p(24.0, 24.0 + 1e-12);
        assert!(orient(a, b, c2) > 0.0);
    }
}
