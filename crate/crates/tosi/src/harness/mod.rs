//! Monte Carlo harness: data-generating processes, index-set families,
//! size/power tables, and QQ-plot data.

pub mod dgp;
pub mod gsets;
pub mod qq;
pub mod sim;

pub use gsets::{build_gsets, gset_mode};
pub use qq::qq_data;
pub use sim::{run_size_power, Experiment, SimCell, SimConfig, SimTable};
