//! Bouc-Wen actuator simulation and excitation signals.

mod bouc_wen;
mod excitation;
pub mod filter;
mod sweep;

pub use bouc_wen::{
    simulate_bouc_wen, simulate_bouc_wen_grid, BoucWenParams, InputSpec, PlantRun, SimConfig,
};
pub use excitation::{make_filtered_noise_excitation, make_sinusoid, NOISE_GENERATOR};
pub use filter::{Biquad, Butterworth};
pub use sweep::{beta_grid, beta_sweep, LoopGeometry, SweepRecord};
