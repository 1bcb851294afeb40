pub mod cli;
pub mod error;
pub mod exec;
pub mod factor;
pub mod lie;
pub mod network;
pub mod schedule;
pub mod sim;
pub mod synth;
pub mod target;

pub use error::{Error, Result};
