//! Incremental Bowyer-Watson triangulation.
//!
//! Points are inserted in input order into a large enclosing triangle.
//! After the enclosing vertices are stripped, any concave pockets left on
//! the hull are closed by ear clipping, a Lawson flip pass restores the
//! empty-circumcircle property, and finally every co-circular quadrilateral
//! is given the diagonal that touches its lexicographically smallest vertex.
//! That last step makes the result independent of the insertion history.

use std::collections::HashMap;

use super::predicates::{in_circle, orient};
use super::{GeometryError, Point2, Result, DUPLICATE_TOLERANCE};

/// Triangulation over a shared point list. Triangles are index triples in
/// counter-clockwise order.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangleMesh {
    points: Vec<Point2>,
    triangles: Vec<[usize; 3]>,
}

impl TriangleMesh {
    /// Wraps an externally built triangulation, checking index bounds and
    /// normalizing every triangle to counter-clockwise order.
    pub fn new(points: Vec<Point2>, triangles: Vec<[usize; 3]>) -> Result<Self> {
        let mut tris = Vec::with_capacity(triangles.len());
        for (t, tri) in triangles.into_iter().enumerate() {
            for &i in &tri {
                if i >= points.len() {
                    return Err(GeometryError::IndexOutOfRange {
                        triangle: t,
                        index: i,
                        len: points.len(),
                    });
                }
            }
            let o = orient(points[tri[0]], points[tri[1]], points[tri[2]]);
            if o == 0.0 {
                return Err(GeometryError::DegenerateTriangle);
            }
            tris.push(if o > 0.0 { tri } else { [tri[0], tri[2], tri[1]] });
        }
        Ok(TriangleMesh {
            points,
            triangles: tris,
        })
    }

    pub fn points(&self) -> &[Point2] {
        &self.points
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn triangle(&self, t: usize) -> [Point2; 3] {
        let [a, b, c] = self.triangles[t];
        [self.points[a], self.points[b], self.points[c]]
    }

    pub fn len(&self) -> usize {
        self.triangles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }
}

/// Delaunay triangulation of `points`.
///
/// Output triangles are counter-clockwise, rotated so the smallest index
/// comes first, and sorted. Identical input always yields identical output.
pub fn delaunay(points: &[Point2]) -> Result<TriangleMesh> {
    validate(points)?;
    let n = points.len();

    let mut work: Vec<Point2> = points.to_vec();
    work.extend(super_triangle(points));
    let mut tris: Vec<[usize; 3]> = vec![[n, n + 1, n + 2]];

    for i in 0..n {
        insert(&work, &mut tris, i);
    }

    tris.retain(|t| t.iter().all(|&v| v < n));
    work.truncate(n);

    close_hull_pockets(&work, &mut tris);
    lawson_flips(&work, &mut tris);
    normalize_cocircular(&work, &mut tris);

    for t in tris.iter_mut() {
        let k = (0..3).min_by_key(|&k| t[k]).unwrap();
        *t = [t[k], t[(k + 1) % 3], t[(k + 2) % 3]];
    }
    tris.sort_unstable();
    Ok(TriangleMesh {
        points: work,
        triangles: tris,
    })
}

fn validate(points: &[Point2]) -> Result<()> {
    if points.len() < 3 {
        return Err(GeometryError::TooFewPoints(points.len()));
    }
    if let Some(i) = points.iter().position(|p| !p.is_finite()) {
        return Err(GeometryError::NonFinite(i));
    }
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            if points[i].distance(&points[j]) < DUPLICATE_TOLERANCE {
                return Err(GeometryError::DuplicatePoints(i, j));
            }
        }
    }
    let (a, b) = (points[0], points[1]);
    if points[2..].iter().all(|&c| orient(a, b, c) == 0.0) {
        return Err(GeometryError::CollinearInput);
    }
    Ok(())
}

fn super_triangle(points: &[Point2]) -> [Point2; 3] {
    let (mut lo, mut hi) = (points[0], points[0]);
    for p in points {
        lo.x = lo.x.min(p.x);
        lo.y = lo.y.min(p.y);
        hi.x = hi.x.max(p.x);
        hi.y = hi.y.max(p.y);
    }
    let span = (hi.x - lo.x).max(hi.y - lo.y).max(1.0);
    let (cx, cy) = ((lo.x + hi.x) / 2.0, (lo.y + hi.y) / 2.0);
    let s = span * 1.0e4;
    [
        Point2::new(cx - 3.0 * s, cy - s),
        Point2::new(cx + 3.0 * s, cy - s),
        Point2::new(cx, cy + 3.0 * s),
    ]
}

fn insert(pts: &[Point2], tris: &mut Vec<[usize; 3]>, i: usize) {
    let p = pts[i];
    let (bad, good): (Vec<[usize; 3]>, Vec<[usize; 3]>) = tris
        .iter()
        .partition(|t| in_circle(pts[t[0]], pts[t[1]], pts[t[2]], p) > 0.0);

    // Cavity boundary: directed edges of bad triangles without a bad twin.
    let mut edges: HashMap<(usize, usize), bool> = HashMap::new();
    let mut order = Vec::new();
    for t in &bad {
        for k in 0..3 {
            let e = (t[k], t[(k + 1) % 3]);
            edges.insert(e, true);
            order.push(e);
        }
    }
    *tris = good;
    for (a, b) in order {
        if !edges.contains_key(&(b, a)) {
            debug_assert!(orient(pts[a], pts[b], p) > 0.0);
            tris.push([a, b, i]);
        }
    }
}

/// Directed edge -> index of the triangle that owns it.
fn edge_owners(tris: &[[usize; 3]]) -> HashMap<(usize, usize), usize> {
    let mut map = HashMap::with_capacity(tris.len() * 3);
    for (ti, t) in tris.iter().enumerate() {
        for k in 0..3 {
            map.insert((t[k], t[(k + 1) % 3]), ti);
        }
    }
    map
}

fn segments_cross(a: Point2, b: Point2, c: Point2, d: Point2) -> bool {
    let o1 = orient(a, b, c);
    let o2 = orient(a, b, d);
    let o3 = orient(c, d, a);
    let o4 = orient(c, d, b);
    o1 * o2 < 0.0 && o3 * o4 < 0.0
}

/// Fills reflex notches on the mesh boundary until it is convex.
fn close_hull_pockets(pts: &[Point2], tris: &mut Vec<[usize; 3]>) {
    loop {
        let owners = edge_owners(tris);
        let mut boundary: Vec<(usize, usize)> = owners
            .keys()
            .filter(|(a, b)| !owners.contains_key(&(*b, *a)))
            .copied()
            .collect();
        boundary.sort_unstable();

        let mut clipped = false;
        'search: for &(a, b) in &boundary {
            for &(b2, c) in &boundary {
                if b2 != b || c == a || orient(pts[a], pts[b], pts[c]) >= 0.0 {
                    continue;
                }
                if ear_is_empty(pts, tris, a, b, c) {
                    tris.push([a, c, b]);
                    clipped = true;
                    break 'search;
                }
            }
        }
        if !clipped {
            return;
        }
    }
}

fn ear_is_empty(pts: &[Point2], tris: &[[usize; 3]], a: usize, b: usize, c: usize) -> bool {
    let (pa, pb, pc) = (pts[a], pts[b], pts[c]);
    let used = tris.iter().flat_map(|t| t.iter().copied());
    for v in used {
        if v == a || v == b || v == c {
            continue;
        }
        let q = pts[v];
        // Ear (a, c, b) is counter-clockwise; closed containment test.
        if orient(pa, pc, q) >= 0.0 && orient(pc, pb, q) >= 0.0 && orient(pb, pa, q) >= 0.0 {
            return false;
        }
    }
    for t in tris {
        for k in 0..3 {
            let (u, w) = (t[k], t[(k + 1) % 3]);
            if segments_cross(pa, pc, pts[u], pts[w]) {
                return false;
            }
        }
    }
    true
}

/// Looks up the triangle across directed edge `(a, b)` of triangle `ti`.
/// Returns `(tj, c, d)` with `c` opposite the edge in `ti`, `d` in `tj`.
fn across(
    tris: &[[usize; 3]],
    owners: &HashMap<(usize, usize), usize>,
    ti: usize,
    k: usize,
) -> Option<(usize, usize, usize, usize, usize)> {
    let t = tris[ti];
    let (a, b, c) = (t[k], t[(k + 1) % 3], t[(k + 2) % 3]);
    let tj = *owners.get(&(b, a))?;
    let u = tris[tj];
    let d = u.iter().copied().find(|&v| v != a && v != b)?;
    Some((tj, a, b, c, d))
}

fn flip(tris: &mut [[usize; 3]], ti: usize, tj: usize, a: usize, b: usize, c: usize, d: usize) {
    // (a, b, c) and (b, a, d) share a-b; the quad in ccw order is a, d, b, c.
    tris[ti] = [a, d, c];
    tris[tj] = [d, b, c];
}

fn flip_limit(n: usize) -> usize {
    10 * n * n + 100
}

fn lawson_flips(pts: &[Point2], tris: &mut [[usize; 3]]) {
    for _ in 0..flip_limit(pts.len()) {
        let owners = edge_owners(tris);
        let mut flipped = false;
        'scan: for ti in 0..tris.len() {
            for k in 0..3 {
                if let Some((tj, a, b, c, d)) = across(tris, &owners, ti, k) {
                    if in_circle(pts[a], pts[b], pts[c], pts[d]) > 0.0 {
                        flip(tris, ti, tj, a, b, c, d);
                        flipped = true;
                        break 'scan;
                    }
                }
            }
        }
        if !flipped {
            return;
        }
    }
}

fn normalize_cocircular(pts: &[Point2], tris: &mut [[usize; 3]]) {
    let lex_min = |vs: [usize; 4]| -> usize {
        vs.into_iter()
            .min_by(|&i, &j| pts[i].lex_cmp(&pts[j]))
            .unwrap()
    };
    for _ in 0..flip_limit(pts.len()) {
        let owners = edge_owners(tris);
        let mut flipped = false;
        'scan: for ti in 0..tris.len() {
            for k in 0..3 {
                if let Some((tj, a, b, c, d)) = across(tris, &owners, ti, k) {
                    if in_circle(pts[a], pts[b], pts[c], pts[d]) != 0.0 {
                        continue;
                    }
                    let m = lex_min([a, b, c, d]);
                    if m == c || m == d {
                        flip(tris, ti, tj, a, b, c, d);
                        flipped = true;
                        break 'scan;
                    }
                }
            }
        }
        if !flipped {
            return;
        }
    }
}
