//! Text formats, evaluation reports, experiment drivers and the command
//! line for `corrclust-core`.

#![forbid(unsafe_code)]

pub mod cli;
pub mod io;
pub mod report;
pub mod reproduce;
