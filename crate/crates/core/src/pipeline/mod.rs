//! Dataset ingestion, leave-one-domain-out planning, batch augmentation,
//! metric reports and spectrum visualization.

pub mod dataset;
pub mod imageio;
pub mod lambda;
pub mod report;
pub mod run;
pub mod spectrum;
pub mod splits;

pub use dataset::{ingest, DatasetEntry, DomainDataset};
pub use lambda::LambdaMode;
pub use report::{run_metrics, write_metrics_csv, MetricsTable};
pub use run::{run_augmentation, Manifest, ManifestRow, RunConfig};
pub use spectrum::{inspect_spectrum, spectrum_heatmap};
pub use splits::{leave_one_out, leave_one_out_splits, Split};
