pub mod error;
pub mod geometry;
pub mod kernels;
pub mod params;
pub mod special;
pub mod spectral;
pub mod ops;
pub mod assembly;
pub mod solve;
pub mod fields;
pub mod experiment;
