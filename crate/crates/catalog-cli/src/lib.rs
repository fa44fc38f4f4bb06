//! Group catalog, cached computations, report tables and the plumbing behind
//! the `kodaira` command.

pub mod cache;
pub mod catalog;
pub mod report;
pub mod workspace;

pub use cache::{Cache, CacheError, RunRecord, CACHE_ENV};
pub use catalog::{check_annotations, normalize_label, Annotations, Catalog, CatalogEntry, CatalogError, CATALOG_ENV};
pub use report::{run_report, Format, Report, Table};
pub use workspace::{Census, H1Scan, LiftSummary, Workspace};

use kodaira_core::automorphisms::AutError;
use kodaira_core::{StructureError, TopologyError};

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Cache(#[from] CacheError),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error(transparent)]
    Aut(#[from] AutError),
    #[error("{0}")]
    Usage(String),
}
