//! Virasoro modes acting on irregular Verma modules.

pub mod eigen;
pub(crate) mod module;
mod partition;

pub use eigen::Convention;
pub use module::{ModuleContext, ModuleVector};
pub use partition::{partition_count, partitions_between, partitions_of, Partition};
