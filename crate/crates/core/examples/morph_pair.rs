//! Morph two synthetic faces at several blend weights and write PNGs.
//!
//!     cargo run --example morph_pair -- [out_dir]

use std::path::PathBuf;

use morphkit::cli::SyntheticFace;
use morphkit::imaging::{write_image, ImageFormat};
use morphkit::morph::{morph, plan_morph, LandmarkScheme, LandmarkSet, MorphInput, MorphSpec};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("morphkit-morph-pair"));
    std::fs::create_dir_all(&out)?;

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let size = 128;
    let fa = SyntheticFace::random(&mut rng, size, false);
    let fb = SyntheticFace::random(&mut rng, size, true);
    let (ia, ib) = (fa.render(size), fb.render(size));
    let scheme = LandmarkScheme::Custom(fa.landmarks().len());
    let la = LandmarkSet::new(fa.landmarks(), scheme);
    let lb = LandmarkSet::new(fb.landmarks(), scheme);
    let a = MorphInput { image: &ia, landmarks: &la };
    let b = MorphInput { image: &ib, landmarks: &lb };

    write_image(&ia, &out.join("a.png"), ImageFormat::Png)?;
    write_image(&ib, &out.join("b.png"), ImageFormat::Png)?;
    for alpha in [0.25, 0.5, 0.75] {
        let img = morph(&MorphSpec::new(a, b, alpha))?;
        let path = out.join(format!("morph_{alpha}.png"));
        write_image(&img, &path, ImageFormat::Png)?;
        println!("wrote {}", path.display());
    }

    let plan = plan_morph(&MorphSpec::new(a, b, 0.5))?;
    println!(
        "mesh: {} points (landmarks + border anchors), {} triangles",
        plan.average.len(),
        plan.mesh.len()
    );
    Ok(())
}
