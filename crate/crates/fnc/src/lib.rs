//! Fractal and neural codecs for binary images, plus phase-space
//! reconstruction of scalar time series.
//!
//! Four compression/reconstruction engines share one toolkit:
//!
//! - [`ifs`] — affine iterated function systems: attractor rendering (chaos
//!   game and deterministic set iteration), Hamming/Hausdorff image metrics,
//!   the collage bound, and an annealed inverse search for map coefficients.
//! - [`autoencoder`] — block-wise factor-2 compression through an
//!   M -> M/2 -> M sigmoid network, optionally iterated into deeper stages.
//! - [`vq`] — vector quantization with winner-take-all learning and
//!   Voronoi-cell semantics over image blocks.
//! - [`series`] — variance-minimizing phase-space partitions with Gaussian
//!   block memberships, fitting piecewise-constant or piecewise-linear models
//!   of a series' generating map.
//!
//! The [`container`] module defines the shared `FNC1` binary format all
//! codecs serialize into, and [`cli`] drives the `fnc` binary.
//!
//! Every stochastic routine takes an explicit seed and is bit-reproducible.
//! See the `examples/` directory for one runnable program per capability:
//!
//! ```bash
//! cargo run --release --example render_sierpinski
//! cargo run --release --example logistic_reconstruction
//! ```

pub mod anneal;
pub mod autoencoder;
pub mod cli;
pub mod container;
pub mod error;
pub mod ifs;
pub mod image;
pub mod net;
pub mod pbm;
pub mod report;
pub mod series;
pub mod train;
pub mod vq;

pub use error::{Error, Result};
pub use image::{BinaryImage, Viewport};
