//! Configuration, experiment orchestration and reproducible artifacts.

pub mod artifacts;
pub mod config;
pub mod error;
pub mod pipelines;
pub mod replay;
pub mod suites;

pub use artifacts::{sha256, ArtifactWriter, Manifest, CONFIG_FILE, MANIFEST_FILE};
pub use config::{schema, schema_text, ExperimentConfig, KeySpec, Kind, ValueType};
pub use error::{HarnessError, Result};
pub use pipelines::{default_output_root, output_dir, run_experiment, ExperimentRecord, OUTPUT_ROOT_ENV};
pub use replay::replay;
pub use suites::{run_suite, SuiteOutcome};
