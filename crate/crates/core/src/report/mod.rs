//! Configuration, deterministic JSON/CSV/SVG output and the commands behind
//! the `mkdv-sim` binary.

mod cli;
mod commands;
pub mod config;
mod csv_out;
mod json;
mod svg;
mod table;

pub use cli::{run, Cli, Command, MbpCommand, PiiCommand, OUT_ENV};
pub use commands::{
    mbp, negative_controls, pde_verify, pii_hierarchy, reduce_solve, ControlResult, MbpMode, Outcome,
    CONTROL_THRESHOLD,
};
pub use csv_out::{read_columns, write_table};
pub use json::{format_float, to_json};
pub use svg::{LinePlot, Series};
pub use table::{sci, TextTable};
