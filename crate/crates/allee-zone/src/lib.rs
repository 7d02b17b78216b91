//! File formats, parallel sweeps and the command-line front end for
//! [`allee_zone_core`].

pub mod cli;
pub mod io;
pub mod parallel;
