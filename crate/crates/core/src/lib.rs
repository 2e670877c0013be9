pub mod cli;
pub mod clipboard;
pub mod codegen;
pub mod commands;
pub mod error;
pub mod geometry;
pub mod model;
pub mod persistence;
pub mod render;
pub mod session;
mod xml;

pub use error::{Error, Result};
