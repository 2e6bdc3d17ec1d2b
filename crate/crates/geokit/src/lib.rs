//! File formats, JSON reports and the `geokit` command line.

pub mod cli;
pub mod io;
pub mod report;
pub mod sweep;
