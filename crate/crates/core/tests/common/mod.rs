//! Independent oracles shared by the integration tests and the acceptance
//! harness. Nothing here calls into the code under test except to obtain
//! the value being checked.
#![allow(dead_code)]

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};

use morphkit::geometry::{Point2, TriangleMesh};
use morphkit::imaging::Raster;
use morphkit::metrics::{MmpmrRule, MorphScore};
use morphkit::protocol::SubjectRecord;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};

// ---------------------------------------------------------------- exact

pub fn q(v: f64) -> BigRational {
    BigRational::from_float(v).expect("finite")
}

fn qp(p: Point2) -> (BigRational, BigRational) {
    (q(p.x), q(p.y))
}

// Floating-point evaluation with a forward error bound; the exact rational
// determinant is only computed when the bound cannot certify the sign.
const EPS: f64 = f64::EPSILON / 2.0;

/// Sign of twice the signed area of `abc`.
pub fn exact_orient(a: Point2, b: Point2, c: Point2) -> Ordering {
    let l = (b.x - a.x) * (c.y - a.y);
    let r = (b.y - a.y) * (c.x - a.x);
    let det = l - r;
    let bound = (3.0 + 16.0 * EPS) * EPS * (l.abs() + r.abs());
    if det.abs() > bound {
        return det.partial_cmp(&0.0).unwrap();
    }
    let (ax, ay) = qp(a);
    let (bx, by) = qp(b);
    let (cx, cy) = qp(c);
    let det = (&bx - &ax) * (&cy - &ay) - (&by - &ay) * (&cx - &ax);
    det.cmp(&BigRational::zero())
}

/// Positive when `d` lies strictly inside the circumcircle of the
/// counter-clockwise triangle `abc`.
pub fn exact_incircle(a: Point2, b: Point2, c: Point2, d: Point2) -> Ordering {
    let (adx, ady) = (a.x - d.x, a.y - d.y);
    let (bdx, bdy) = (b.x - d.x, b.y - d.y);
    let (cdx, cdy) = (c.x - d.x, c.y - d.y);
    let alift = adx * adx + ady * ady;
    let blift = bdx * bdx + bdy * bdy;
    let clift = cdx * cdx + cdy * cdy;
    let det = alift * (bdx * cdy - cdx * bdy) + blift * (cdx * ady - adx * cdy)
        + clift * (adx * bdy - bdx * ady);
    let permanent = alift * ((bdx * cdy).abs() + (cdx * bdy).abs())
        + blift * ((cdx * ady).abs() + (adx * cdy).abs())
        + clift * ((adx * bdy).abs() + (bdx * ady).abs());
    if det.abs() > (10.0 + 96.0 * EPS) * EPS * permanent {
        return det.partial_cmp(&0.0).unwrap();
    }
    let (dx, dy) = qp(d);
    let row = |p: Point2| {
        let (x, y) = qp(p);
        let (x, y) = (x - &dx, y - &dy);
        let w = &x * &x + &y * &y;
        (x, y, w)
    };
    let (a0, a1, a2) = row(a);
    let (b0, b1, b2) = row(b);
    let (c0, c1, c2) = row(c);
    let det = &a0 * (&b1 * &c2 - &b2 * &c1) - &a1 * (&b0 * &c2 - &b2 * &c0)
        + &a2 * (&b0 * &c1 - &b1 * &c0);
    det.cmp(&BigRational::zero())
}

/// Convex hull corners in order, by gift wrapping on the exact predicate.
/// Collinear boundary points are skipped (the farthest one is taken).
pub fn hull_corners(points: &[Point2]) -> Vec<usize> {
    let start = (0..points.len())
        .min_by(|&i, &j| points[i].lex_cmp(&points[j]))
        .unwrap();
    let mut hull = vec![start];
    let mut cur = start;
    loop {
        let mut next = if cur == 0 { 1 } else { 0 };
        for k in 0..points.len() {
            if k == cur {
                continue;
            }
            match exact_orient(points[cur], points[next], points[k]) {
                Ordering::Less => next = k,
                Ordering::Equal => {
                    if q_dist2(points[cur], points[k]) > q_dist2(points[cur], points[next]) {
                        next = k;
                    }
                }
                Ordering::Greater => {}
            }
        }
        if next == start {
            break;
        }
        hull.push(next);
        cur = next;
    }
    hull
}

fn q_dist2(a: Point2, b: Point2) -> BigRational {
    let (ax, ay) = qp(a);
    let (bx, by) = qp(b);
    let (dx, dy) = (bx - ax, by - ay);
    &dx * &dx + &dy * &dy
}

/// Number of input points on the convex hull boundary, collinear boundary
/// points included.
pub fn hull_boundary_count(points: &[Point2]) -> usize {
    let hull = hull_corners(points);
    let on_edge = |p: Point2, a: Point2, b: Point2| {
        exact_orient(a, b, p) == Ordering::Equal
            && p.x >= a.x.min(b.x)
            && p.x <= a.x.max(b.x)
            && p.y >= a.y.min(b.y)
            && p.y <= a.y.max(b.y)
    };
    points
        .iter()
        .filter(|&&p| {
            (0..hull.len()).any(|k| on_edge(p, points[hull[k]], points[hull[(k + 1) % hull.len()]]))
        })
        .count()
}

fn twice_area(a: Point2, b: Point2, c: Point2) -> BigRational {
    let (ax, ay) = qp(a);
    let (bx, by) = qp(b);
    let (cx, cy) = qp(c);
    (&bx - &ax) * (&cy - &ay) - (&by - &ay) * (&cx - &ax)
}

fn hull_twice_area(points: &[Point2]) -> BigRational {
    let hull = hull_corners(points);
    let mut sum = BigRational::zero();
    for k in 1..hull.len().saturating_sub(1) {
        sum += twice_area(points[hull[0]], points[hull[k]], points[hull[k + 1]]);
    }
    sum.abs()
}

/// Full check of a Delaunay triangulation with exact arithmetic:
/// counter-clockwise non-degenerate triangles, a manifold edge structure,
/// exact coverage of the hull, the `2n - 2 - h` count and the empty
/// circumcircle property against every input point.
pub fn check_delaunay(points: &[Point2], mesh: &TriangleMesh) -> Result<(), String> {
    let n = points.len();
    let tris = mesh.triangles();
    let mut edges: HashMap<(usize, usize), usize> = HashMap::new();
    let mut area = BigRational::zero();
    for (t, tri) in tris.iter().enumerate() {
        let [a, b, c] = tri.map(|i| points[i]);
        if exact_orient(a, b, c) != Ordering::Greater {
            return Err(format!("triangle {t} {tri:?} is not counter-clockwise"));
        }
        area += twice_area(a, b, c);
        for k in 0..3 {
            let (u, v) = (tri[k], tri[(k + 1) % 3]);
            if edges.insert((u, v), t).is_some() {
                return Err(format!("directed edge ({u},{v}) used twice"));
            }
        }
        for (i, &p) in points.iter().enumerate() {
            if !tri.contains(&i) && exact_incircle(a, b, c, p) == Ordering::Greater {
                return Err(format!("point {i} inside circumcircle of triangle {t} {tri:?}"));
            }
        }
    }
    let used: BTreeSet<usize> = tris.iter().flatten().copied().collect();
    if used.len() != n {
        return Err(format!("{} of {n} points are mesh vertices", used.len()));
    }
    if area != hull_twice_area(points) {
        return Err("triangles do not tile the convex hull".into());
    }
    let h = hull_boundary_count(points);
    if tris.len() != 2 * n - 2 - h {
        return Err(format!("{} triangles, expected 2n-2-h = {}", tris.len(), 2 * n - 2 - h));
    }
    Ok(())
}

/// Random point set with no duplicates; `lattice` draws integer
/// coordinates from a small range, which produces many collinear and
/// co-circular configurations.
pub fn random_points<R: Rng>(rng: &mut R, n: usize, lattice: bool) -> Vec<Point2> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(n);
    let side = ((n as f64).sqrt() * 3.0).ceil() as i64 + 3;
    while out.len() < n {
        let p = if lattice {
            Point2::new(rng.gen_range(0..side) as f64, rng.gen_range(0..side) as f64)
        } else {
            Point2::new(rng.gen_range(-500.0..500.0), rng.gen_range(-500.0..500.0))
        };
        if seen.insert((p.x.to_bits(), p.y.to_bits())) {
            out.push(p);
        }
    }
    out
}

// ---------------------------------------------------------------- linear algebra

/// Gaussian elimination with partial pivoting.
pub fn gauss_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col] == 0.0 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            for c in col..n {
                a[r][c] -= f * a[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

/// `[a b tx; c d ty]` mapping `src[i]` to `dst[i]`, as a 6x6 system.
pub fn affine_oracle(src: &[Point2; 3], dst: &[Point2; 3]) -> Option<[[f64; 3]; 2]> {
    let mut a = Vec::new();
    let mut b = Vec::new();
    for i in 0..3 {
        a.push(vec![src[i].x, src[i].y, 1.0, 0.0, 0.0, 0.0]);
        b.push(dst[i].x);
        a.push(vec![0.0, 0.0, 0.0, src[i].x, src[i].y, 1.0]);
        b.push(dst[i].y);
    }
    let x = gauss_solve(a, b)?;
    Some([[x[0], x[1], x[2]], [x[3], x[4], x[5]]])
}

pub fn barycentric_oracle(tri: &[Point2; 3], p: Point2) -> Option<[f64; 3]> {
    let a = vec![
        vec![tri[0].x, tri[1].x, tri[2].x],
        vec![tri[0].y, tri[1].y, tri[2].y],
        vec![1.0, 1.0, 1.0],
    ];
    let x = gauss_solve(a, vec![p.x, p.y, 1.0])?;
    Some([x[0], x[1], x[2]])
}

/// A triangle in `[0, 100]^2` whose area is at least `min_area`.
pub fn random_triangle<R: Rng>(rng: &mut R, min_area: f64) -> [Point2; 3] {
    loop {
        let t = [(); 3].map(|_| Point2::new(rng.gen_range(0.0..100.0), rng.gen_range(0.0..100.0)));
        let area = ((t[1].x - t[0].x) * (t[2].y - t[0].y) - (t[1].y - t[0].y) * (t[2].x - t[0].x)) / 2.0;
        if area.abs() >= min_area {
            return t;
        }
    }
}

// ---------------------------------------------------------------- metrics

pub fn brute_fmr(impostor: &[f64], t: f64) -> f64 {
    let mut accepted = 0usize;
    for s in impostor {
        if *s >= t {
            accepted += 1;
        }
    }
    accepted as f64 / impostor.len() as f64
}

pub fn brute_fnmr(genuine: &[f64], t: f64) -> f64 {
    let mut rejected = 0usize;
    for s in genuine {
        if *s < t || s.is_nan() {
            rejected += 1;
        }
    }
    rejected as f64 / genuine.len() as f64
}

/// Smallest candidate (each observed impostor score, plus the successor of
/// the maximum) meeting the target, found by scanning all of them. Equality
/// with this oracle is the minimality check.
pub fn brute_threshold(impostor: &[f64], target: f64) -> f64 {
    let max = impostor.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut candidates: Vec<f64> = impostor.to_vec();
    candidates.push(max.next_up());
    let mut best = f64::INFINITY;
    for &t in &candidates {
        if brute_fmr(impostor, t) <= target && t < best {
            best = t;
        }
    }
    best
}

pub fn brute_mmpmr(rows: &[MorphScore], t: f64, rule: MmpmrRule) -> f64 {
    let mut morphs: BTreeMap<&str, BTreeMap<&str, bool>> = BTreeMap::new();
    for r in rows {
        let hit = morphs
            .entry(&r.morph_id)
            .or_default()
            .entry(&r.subject_id)
            .or_insert(false);
        *hit |= r.score >= t;
    }
    let accepted = morphs
        .values()
        .filter(|subjects| match rule {
            MmpmrRule::Min => subjects.values().all(|&h| h),
            MmpmrRule::Any => subjects.values().any(|&h| h),
        })
        .count();
    accepted as f64 / morphs.len() as f64
}

/// Score draw; every third set is tie-heavy (a handful of distinct values).
pub fn draw_scores<R: Rng>(rng: &mut R, len: std::ops::Range<usize>, tie_heavy: bool, centre: f64) -> Vec<f64> {
    let n = rng.gen_range(len);
    if tie_heavy {
        let levels: Vec<f64> = (0..rng.gen_range(1..6)).map(|_| rng.gen_range(-1.0..1.0)).collect();
        (0..n).map(|_| levels[rng.gen_range(0..levels.len())]).collect()
    } else {
        (0..n)
            .map(|_| (centre + rng.gen_range(-0.5..0.5)).clamp(-1.0, 1.0))
            .collect()
    }
}

pub fn draw_morph_scores<R: Rng>(rng: &mut R, tie_heavy: bool) -> Vec<MorphScore> {
    let n_morphs = rng.gen_range(1..40);
    let mut rows = Vec::new();
    for m in 0..n_morphs {
        let n_subjects = rng.gen_range(1..4);
        for s in 0..n_subjects {
            for _ in 0..rng.gen_range(1..4) {
                let score = if tie_heavy {
                    [0.1, 0.3, 0.5][rng.gen_range(0..3)]
                } else {
                    rng.gen_range(-0.2..1.0)
                };
                rows.push(MorphScore::new(format!("m{m}"), format!("s{s}"), score));
            }
        }
    }
    rows
}

// ---------------------------------------------------------------- protocol

pub fn random_manifest<R: Rng>(rng: &mut R, max_subjects: usize) -> Vec<SubjectRecord> {
    let n = rng.gen_range(1..=max_subjects);
    let mut out = Vec::new();
    for s in 0..n {
        let gender = ["female", "male"][rng.gen_range(0..2)];
        let eth = ["asian", "black", "white"][rng.gen_range(0..3)];
        let glasses = rng.gen_bool(0.4);
        for i in 0..rng.gen_range(1..4) {
            let image_id = format!("s{s:02}_{i}");
            out.push(SubjectRecord {
                subject_id: format!("s{s:02}"),
                image_id: image_id.clone(),
                gender: gender.into(),
                ethnicity: eth.into(),
                glasses,
                image_path: format!("{image_id}.png").into(),
                landmarks_path: format!("{image_id}.txt").into(),
            });
        }
    }
    out
}

/// Every unordered image pair of distinct subjects passing the three
/// constraints, optionally restricted to each subject's first image.
pub fn brute_pairs(records: &[SubjectRecord], all_images: bool) -> BTreeSet<(String, String)> {
    let mut first: BTreeMap<&str, &str> = BTreeMap::new();
    for r in records {
        let e = first.entry(&r.subject_id).or_insert(&r.image_id);
        if r.image_id.as_str() < *e {
            *e = &r.image_id;
        }
    }
    let mut out = BTreeSet::new();
    for x in records {
        for y in records {
            if x.subject_id >= y.subject_id {
                continue;
            }
            if !all_images && (first[x.subject_id.as_str()] != x.image_id || first[y.subject_id.as_str()] != y.image_id) {
                continue;
            }
            let ok = x.gender == y.gender && x.ethnicity == y.ethnicity && !(x.glasses && y.glasses);
            if ok {
                out.insert((x.image_id.clone(), y.image_id.clone()));
            }
        }
    }
    out
}

// ---------------------------------------------------------------- images

/// Smooth random colour field with a few hard-edged blobs.
pub fn random_raster<R: Rng>(rng: &mut R, w: usize, h: usize) -> Raster {
    let base: [f64; 3] = [(); 3].map(|_| rng.gen_range(0.0..255.0));
    let grad: [(f64, f64); 3] = [(); 3].map(|_| (rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0)));
    let blobs: Vec<(f64, f64, f64, [u8; 3])> = (0..4)
        .map(|_| {
            (
                rng.gen_range(0.0..w as f64),
                rng.gen_range(0.0..h as f64),
                rng.gen_range(2.0..8.0),
                [rng.gen(), rng.gen(), rng.gen()],
            )
        })
        .collect();
    Raster::from_fn(w, h, |x, y| {
        for (bx, by, r, c) in &blobs {
            if (x as f64 - bx).hypot(y as f64 - by) <= *r {
                return *c;
            }
        }
        [0, 1, 2].map(|c| {
            let v = base[c] + grad[c].0 * x as f64 + grad[c].1 * y as f64;
            v.rem_euclid(256.0) as u8
        })
    })
    .unwrap()
}

/// `k` landmarks strictly inside the frame, at least 2 px apart.
pub fn random_landmarks<R: Rng>(rng: &mut R, k: usize, w: usize, h: usize) -> Vec<Point2> {
    let mut out: Vec<Point2> = Vec::new();
    while out.len() < k {
        let p = Point2::new(rng.gen_range(2.0..w as f64 - 2.0), rng.gen_range(2.0..h as f64 - 2.0));
        if out.iter().all(|o| o.distance(&p) >= 2.0) {
            out.push(p);
        }
    }
    out
}

/// Two random images of one size with `k` landmarks each.
pub struct MorphFixture {
    pub a: Raster,
    pub b: Raster,
    pub la: Vec<Point2>,
    pub lb: Vec<Point2>,
}

pub fn morph_fixture<R: Rng>(rng: &mut R) -> MorphFixture {
    let (w, h) = (rng.gen_range(20..48), rng.gen_range(20..48));
    let k = rng.gen_range(3..12);
    MorphFixture {
        a: random_raster(rng, w, h),
        b: random_raster(rng, w, h),
        la: random_landmarks(rng, k, w, h),
        lb: random_landmarks(rng, k, w, h),
    }
}

/// Writes `n` random fixtures as PNG + landmark files and returns pair rows.
pub fn write_pair_fixtures<R: Rng>(
    rng: &mut R,
    dir: &std::path::Path,
    n: usize,
) -> Vec<morphkit::morph::PairListRow> {
    use morphkit::imaging::{write_image, ImageFormat};
    let mut rows = Vec::new();
    for i in 0..n {
        let f = morph_fixture(rng);
        let mut paths = Vec::new();
        for (tag, img, pts) in [("a", &f.a, &f.la), ("b", &f.b, &f.lb)] {
            let stem = format!("p{i}{tag}");
            let ip = dir.join(format!("{stem}.png"));
            let lp = dir.join(format!("{stem}.txt"));
            write_image(img, &ip, ImageFormat::Png).unwrap();
            let text: String = pts.iter().map(|p| format!("{:?} {:?}\n", p.x, p.y)).collect();
            std::fs::write(&lp, text).unwrap();
            paths.push((stem, ip, lp));
        }
        let (b, a) = (paths.pop().unwrap(), paths.pop().unwrap());
        rows.push(morphkit::morph::PairListRow {
            id_a: a.0,
            image_a: a.1,
            landmarks_a: a.2,
            id_b: b.0,
            image_b: b.1,
            landmarks_b: b.2,
        });
    }
    rows
}

/// Files of a directory with their bytes, sorted by name.
pub fn dir_bytes(dir: &std::path::Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect();
    v.sort();
    v
}

// ---------------------------------------------------------------- metric cases

/// Draws one random score set (every third one tie-heavy) and compares all
/// metric functions against the brute-force oracles, plus monotonicity in
/// the threshold and `min <= any`.
pub fn metric_case(seed: u64) -> Result<(), String> {
    use morphkit::metrics::{fmr, fnmr, mmpmr, threshold_at_fmr};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let ties = seed.is_multiple_of(3);
    let impostor = draw_scores(&mut rng, 1..1500, ties, 0.1);
    let genuine = draw_scores(&mut rng, 1..200, ties, 0.7);
    let morphs = draw_morph_scores(&mut rng, ties);
    let target = [0.001, 0.01, 0.05, 0.1, 0.5][rng.gen_range(0..5)];

    let t = threshold_at_fmr(&impostor, target).map_err(|e| e.to_string())?;
    let want = brute_threshold(&impostor, target);
    if t != want {
        return Err(format!("threshold {t} != oracle {want} (target {target})"));
    }

    let mut probes: Vec<f64> = impostor.iter().chain(&genuine).copied().collect();
    probes.extend(morphs.iter().map(|m| m.score));
    probes.extend([t, -2.0, 2.0, t.next_up(), t.next_down()]);
    probes.sort_by(f64::total_cmp);
    probes.dedup();
    if probes.len() > 300 {
        let step = probes.len() / 300 + 1;
        let keep: Vec<f64> = probes.iter().copied().step_by(step).chain([t, t.next_up(), t.next_down()]).collect();
        probes = keep;
        probes.sort_by(f64::total_cmp);
        probes.dedup();
    }
    let mut last: Option<(f64, f64, f64, f64)> = None;
    for &p in &probes {
        let f = fmr(&impostor, p).map_err(|e| e.to_string())?;
        let g = fnmr(&genuine, p).map_err(|e| e.to_string())?;
        let mn = mmpmr(&morphs, p, MmpmrRule::Min).map_err(|e| e.to_string())?;
        let an = mmpmr(&morphs, p, MmpmrRule::Any).map_err(|e| e.to_string())?;
        if f != brute_fmr(&impostor, p) || g != brute_fnmr(&genuine, p) {
            return Err(format!("fmr/fnmr mismatch at {p}"));
        }
        if mn != brute_mmpmr(&morphs, p, MmpmrRule::Min) || an != brute_mmpmr(&morphs, p, MmpmrRule::Any) {
            return Err(format!("mmpmr mismatch at {p}"));
        }
        if mn > an {
            return Err(format!("min rule {mn} above any rule {an} at {p}"));
        }
        if let Some((f0, g0, m0, a0)) = last {
            if f > f0 || g < g0 || mn > m0 || an > a0 {
                return Err(format!("rates not monotone at {p}"));
            }
        }
        last = Some((f, g, mn, an));
    }

    Ok(())
}

/// MMPMR at the FMR target must survive any strictly increasing transform
/// of all scores.
pub fn rank_invariance_case(seed: u64) -> Result<(), String> {
    use morphkit::metrics::{evaluate, ScenarioConfig, ScenarioMode, ScoreSet};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let ties = seed.is_multiple_of(3);
    let set = ScoreSet {
        genuine: draw_scores(&mut rng, 1..100, ties, 0.7),
        impostor: draw_scores(&mut rng, 100..3000, ties, 0.1),
        morph_attacks: draw_morph_scores(&mut rng, ties),
    };
    let (a, b, c) = (rng.gen_range(0.1..5.0), rng.gen_range(0.0..3.0), rng.gen_range(-2.0..2.0));
    let f = |s: f64| a * s + b * s * s * s + c + (s * 0.5).exp();
    let all = |s: &ScoreSet| {
        let mut v: Vec<f64> = s.genuine.iter().chain(&s.impostor).copied().collect();
        v.extend(s.morph_attacks.iter().map(|m| m.score));
        v
    };
    let mut before = all(&set);
    before.sort_by(f64::total_cmp);
    for (x, y) in before.iter().zip(before.iter().skip(1)) {
        if (x < y) != (f(*x) < f(*y)) || (x == y) != (f(*x) == f(*y)) {
            return Err("transform is not strictly increasing on these scores".into());
        }
    }
    let mapped = ScoreSet {
        genuine: set.genuine.iter().map(|&s| f(s)).collect(),
        impostor: set.impostor.iter().map(|&s| f(s)).collect(),
        morph_attacks: set
            .morph_attacks
            .iter()
            .map(|m| MorphScore::new(m.morph_id.clone(), m.subject_id.clone(), f(m.score)))
            .collect(),
    };
    for rule in [MmpmrRule::Min, MmpmrRule::Any] {
        let config = ScenarioConfig { rule, ..ScenarioConfig::new(ScenarioMode::MorphsAsReferences) };
        let r0 = evaluate(&set, &config).map_err(|e| e.to_string())?;
        let r1 = evaluate(&mapped, &config).map_err(|e| e.to_string())?;
        if r0.mmpmr != r1.mmpmr || r0.fmr_at_threshold != r1.fmr_at_threshold || r0.fnmr_at_threshold != r1.fnmr_at_threshold {
            return Err(format!("rule {rule}: {r0:?} vs {r1:?}"));
        }
    }
    Ok(())
}

/// One randomized manifest: generated pairs must equal the exhaustively
/// filtered set, in both selection modes.
pub fn protocol_case(seed: u64) -> Result<(), String> {
    use morphkit::protocol::{generate_pairs, PairConstraints};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let records = random_manifest(&mut rng, 50);
    for all in [false, true] {
        let got: Vec<(String, String)> = generate_pairs(&records, PairConstraints { all_image_combinations: all })
            .into_iter()
            .map(|p| (p.a.image_id, p.b.image_id))
            .collect();
        let set: BTreeSet<(String, String)> = got.iter().cloned().collect();
        if set.len() != got.len() {
            return Err("duplicate pairs".into());
        }
        let want = brute_pairs(&records, all);
        let extra = set.difference(&want).count();
        let missing = want.difference(&set).count();
        if extra + missing > 0 {
            return Err(format!("all_images={all}: {extra} violations, {missing} omissions"));
        }
    }
    Ok(())
}
