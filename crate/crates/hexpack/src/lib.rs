//! File formats, SVG rendering, threaded executors and the command line for
//! [`hexpack_core`].

pub mod cli;
pub mod config;
pub mod field_csv;
pub mod formats;
pub mod parallel;
pub mod render;

pub use field_csv::{parse_field_csv, render_field_csv, CsvError};
pub use render::{render_svg, ColorMap, RenderStyle};
