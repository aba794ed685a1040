//! Datasets, experiment configuration and metrics summaries on disk.

pub mod config;
pub mod dataset;
pub mod summary;

pub use config::{load_experiment_config, parse_experiment_config, ExperimentConfig, Strategy};
pub use dataset::{
    read_dataset, read_input, sidecar_path, write_dataset, write_input, Dataset, DatasetMeta,
    DATASET_FORMAT_VERSION,
};
pub use summary::{read_metrics, write_metrics};
