//! Model structure, regression and simulation.

pub mod format;
pub mod model;
pub mod pool;
pub mod regression;
pub mod signal;
pub mod simulate;
pub mod term;

pub use format::{read_model, write_model, MODEL_FORMAT_VERSION};
pub use model::{infer_meta, warmup_of, ModelMeta, NarxModel};
pub use pool::{generate_term_pool, ExclusionRules};
pub use regression::{build_regressor_matrix, Regression};
pub use signal::{compute_phi, Signal};
pub use simulate::{free_run, one_step_predict, DIVERGENCE_LIMIT};
pub use term::{canonicalize, LaggedFactor, SignalKind, Term};
