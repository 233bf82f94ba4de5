//! Chart constructions and inextendibility diagnostics for FLRW spacetimes.
pub mod axi_chart;
pub mod catalog;
pub mod cli;
pub mod criteria;
pub mod expr;
pub mod fd;
pub mod ode;
pub mod probe;
pub mod quad;
pub mod scale_factor;
pub mod sph_chart;
pub mod verify;
