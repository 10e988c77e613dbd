//! File formats, configuration, the end-to-end pipeline and report writers
//! around [`webbic_core`].

pub mod config;
pub mod formats;
pub mod pipeline;
pub mod report;
