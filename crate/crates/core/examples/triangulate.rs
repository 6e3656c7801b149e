//! Delaunay mesh of a random point cloud, with an empty-circumcircle check.
//!
//!     cargo run --example triangulate -- [n] [seed]

use morphkit::geometry::{circumcircle_contains, delaunay, Point2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(30);
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(1);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<Point2> = (0..n)
        .map(|_| Point2::new(rng.gen_range(0.0..100.0), rng.gen_range(0.0..100.0)))
        .collect();

    let mesh = match delaunay(&points) {
        Ok(m) => m,
        Err(e) => {
            eprintln!("triangulation failed: {e}");
            std::process::exit(2);
        }
    };
    println!("{} points -> {} triangles", n, mesh.len());
    for t in mesh.triangles().iter().take(10) {
        println!("  {:?}", t);
    }
    if mesh.len() > 10 {
        println!("  ...");
    }

    let mut violations = 0;
    for t in 0..mesh.len() {
        let tri = mesh.triangle(t);
        let corners = mesh.triangles()[t];
        for (i, p) in points.iter().enumerate() {
            if !corners.contains(&i) && circumcircle_contains(&tri, *p).unwrap() {
                violations += 1;
            }
        }
    }
    println!("points strictly inside a circumcircle: {violations}");
}
