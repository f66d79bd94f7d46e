//! File formats, configuration, rendering and the command-line front end for
//! [`mechsynth_core`].

pub mod cli;
pub mod config;
pub mod import;
pub mod record;
pub mod report;
pub mod svg;
