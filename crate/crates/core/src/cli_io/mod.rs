//! Command-line plumbing: configuration files, CSV output and SVG plots.
//!
//! User-facing frequencies are always `Ω/2π` in MHz; the conversion to
//! angular units happens once, in [`config`].

pub mod config;
pub mod csv_out;
pub mod plot;

pub use config::{emit_config, parse_config, parse_config_str, ConfigFile, Overrides, RunConfig};
pub use csv_out::{emit_csv, read_table, EmittedFiles, Record, Table};
pub use plot::emit_plot;
