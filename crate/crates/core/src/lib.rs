//! Fractal measures, their Fourier extension operators, and the numerical and
//! combinatorial machinery for testing multilinear extension estimates.

pub mod acceptance;
pub mod combinatorics;
pub mod convolution;
pub mod dimension;
pub mod error;
pub mod extension;
pub mod knapp;
pub mod measure;
pub mod region;

pub use error::{Error, Result};
pub use extension::{extension_transform, FrequencyGrid};
pub use measure::{DiscreteMeasure, Rational, SimilarityIfs, SimilarityMap};
