//! File formats, parallel sweeps and helpers behind the `irc` command.

pub mod config;
pub mod pmf;
pub mod random;
pub mod sweep;
pub mod table;
