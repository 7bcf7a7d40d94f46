//! Algorithmic core: planar geometry, oriented boxes, color spaces, point
//! cloud metrics, surface sampling, and clustering.
//!
//! Everything in this crate is deterministic and allocation-only: no IO, no
//! platform entropy, no platform-dependent math (`libm` throughout). The
//! companion `scenesmith` crate layers file formats, the pipeline, and the
//! CLI on top.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod color;
pub mod kmeans;
pub mod mesh;
pub mod metrics;
pub mod obb;
pub mod polygon;
pub mod rect;
pub mod rng;
pub mod sampling;
pub mod vec;

pub use obb::{Mtv, Rect2};
pub use polygon::Polygon;
pub use rng::Xoshiro256StarStar;
pub use vec::{Vec2, Vec3};

pub(crate) mod math {
    //! Thin wrappers so the crate builds without `std` float intrinsics.
    pub fn sqrt(x: f64) -> f64 {
        libm::sqrt(x)
    }
    pub fn abs(x: f64) -> f64 {
        libm::fabs(x)
    }
    pub fn sin(x: f64) -> f64 {
        libm::sin(x)
    }
    pub fn cos(x: f64) -> f64 {
        libm::cos(x)
    }
    pub fn atan2(y: f64, x: f64) -> f64 {
        libm::atan2(y, x)
    }
    pub fn round(x: f64) -> f64 {
        libm::round(x)
    }
    pub fn powf(x: f64, y: f64) -> f64 {
        libm::pow(x, y)
    }
    pub fn cbrt(x: f64) -> f64 {
        libm::cbrt(x)
    }
}
