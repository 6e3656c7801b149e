//! Landmark-based face morph generation and morphing-attack vulnerability
//! evaluation.
//!
//! The crate is organized bottom-up:
//!
//! * [`geometry`]: Delaunay triangulation, barycentric coordinates, affine maps.
//! * [`imaging`]: RGB rasters, lossless PNG/PPM I/O, bilinear sampling.
//! * [`morph`]: landmark loading, border augmentation, piecewise-affine
//!   warping and alpha blending, batch generation.
//! * [`latent`]: generator-agnostic latent interpolation.
//! * [`protocol`]: subject manifests and morph-pair selection.
//! * [`scoring`]: embedding ingestion, reference averaging, cosine scores.
//! * [`metrics`]: FMR / FNMR / MMPMR, threshold selection, scenarios, reports.
//! * [`cli`]: the batch workflows behind the `morphkit` binary, including a
//!   fully synthetic end-to-end demo.
//!
//! Blend weights follow one convention everywhere (points, latents and
//! pixels): `result = alpha * a + (1 - alpha) * b`. Scores are cosine
//! similarities and a comparison is accepted when `score >= threshold`.

pub mod cli;
pub mod geometry;
pub mod imaging;
pub mod latent;
pub mod metrics;
pub mod morph;
pub mod protocol;
pub mod scoring;

mod blend;

pub use blend::BlendWeights;
