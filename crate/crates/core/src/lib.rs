//! Gray-box identification of hysteretic systems with polynomial NARX models.
//!
//! The crate covers the whole workflow: candidate pools over lagged outputs,
//! inputs and input increments, structure selection and (constrained) least
//! squares, quasi-static analysis of the identified loops, a Bouc-Wen plant
//! for generating data, and feedforward compensators obtained by inverting
//! the direct model or identifying an inverse model.
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases at
//! the crate root fix it to `f64`.

pub mod analysis;
pub mod compensation;
pub mod error;
pub mod estimation;
pub mod experiment;
pub mod io;
pub mod linalg;
pub mod metrics;
pub mod narx;
pub mod pipeline;
pub mod plant;
pub mod scalar;

pub use error::{Error, ErrorClass, Result};
pub use narx::{
    build_regressor_matrix, compute_phi, free_run, generate_term_pool, one_step_predict,
    read_model, write_model, ExclusionRules, LaggedFactor, ModelMeta, NarxModel, SignalKind, Term,
};
pub use scalar::Scalar;

pub use analysis::{SteadyState, SteadyStateReport};
pub use compensation::{
    evaluate_chain, run_compensator, synthesize_direct, synthesize_inverse, BoucWenPlant,
    CompensatorLaw, LawKind, Plant,
};
pub use metrics::{mape, nsavi, MetricsSummary, NsaviForm};
pub use pipeline::{identify, identify_inverse, IdentifyOptions, SizeRule, StructureChoice};
pub use plant::{BoucWenParams, InputSpec, SimConfig};

pub type Model = NarxModel<f64>;
pub type Signal = narx::Signal<f64>;
pub type Law = CompensatorLaw<f64>;
pub type Identification = pipeline::Identification<f64>;
pub type Dataset = io::Dataset<f64>;
