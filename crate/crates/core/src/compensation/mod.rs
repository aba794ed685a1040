//! Feedforward compensators built from identified models.

mod chain;
mod law;
mod synth;

pub use chain::{baseline, evaluate_chain, BoucWenPlant, ChainResult, Plant};
pub use law::{
    read_law, run_compensator, write_law, CompensatorLaw, LawFactor, LawKind, LawSignal, LawTerm,
};
pub use synth::{
    decompose_direct, shift_for_inverse, smooth_quadratic, synthesize_direct, synthesize_inverse,
    DirectDecomposition, MIN_DELAY_GAIN,
};
