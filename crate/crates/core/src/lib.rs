//! Exact compass-and-straightedge constructions.

pub mod field;
pub mod geom;
pub mod closure;
pub mod sample;
pub mod algebra;
pub mod dsl;
pub mod stdlib;
pub mod game;
