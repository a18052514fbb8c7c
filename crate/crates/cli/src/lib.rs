//! Library half of the `cogcap` batch front-end: experiment specs, result
//! emission (CSV / JSON / SVG) and the command implementations. The binary
//! in `main.rs` is a thin argument-parsing shim over this.

pub mod commands;
pub mod figures;
pub mod output;
pub mod spec;
pub mod svg;
