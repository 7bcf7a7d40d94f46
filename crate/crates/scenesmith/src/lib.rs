//! Scene reconstruction pipeline: parse detections into a closed room,
//! infer object relations, retrieve assets, paint materials, and export
//! a simulator-ready scene description.

pub mod assemble;
pub mod config;
pub mod error;
pub mod evalbench;
pub mod graph;
pub mod layout;
pub mod material;
pub mod model;
pub mod pipeline;
pub mod retrieval;
pub mod services;
pub mod synth;

pub use error::{Error, Result};

mod cli;
pub use cli::cli_main;
