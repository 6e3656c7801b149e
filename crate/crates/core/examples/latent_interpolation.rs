//! Latent-space morphing with the built-in linear test generator.
//!
//!     cargo run --example latent_interpolation -- [out_dir]

use std::path::PathBuf;

use morphkit::imaging::{write_image, ImageFormat};
use morphkit::latent::{latent_morph, lerp_latent, GeneratorBackend, LatentVector, LinearTestBackend};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("morphkit-latent"));
    std::fs::create_dir_all(&out)?;

    let tag = "linear-16";
    let backend = LinearTestBackend::new(48, 48, tag, 11)?;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut code = || LatentVector::new(tag, (0..16).map(|_| rng.gen_range(-1.0..1.0)).collect());
    let (wa, wb) = (code()?, code()?);

    for (i, alpha) in [1.0, 0.75, 0.5, 0.25, 0.0].into_iter().enumerate() {
        let img = latent_morph(&backend, &wa, &wb, alpha)?;
        write_image(&img, &out.join(format!("step{i}.png")), ImageFormat::Png)?;
    }
    let mid = lerp_latent(&wa, &wb, 0.5)?;
    let direct = backend.synthesize(&mid)?;
    println!("latent midpoint, first values: {:?}", &mid.values()[..4]);
    println!(
        "midpoint image equals latent_morph at 0.5: {}",
        direct == latent_morph(&backend, &wa, &wb, 0.5)?
    );
    println!("frames in {}", out.display());
    Ok(())
}
