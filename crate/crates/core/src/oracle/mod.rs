//! Brute-force enumeration of small graphs, used as an independent check on
//! the generating-function machinery.

pub mod cache;
pub mod canon;
pub mod census;
pub mod graph;
pub mod minor;
pub mod network;

pub use cache::{CacheError, CensusCache};
pub use canon::{canonical, canonical_fixing, is_canonical};
pub use census::{enumerate, CensusError, CensusRow, ClassName, Connectivity, Histogram};
pub use graph::{block_decompose, BlockDecomposition, SmallGraph};
pub use minor::{has_minor, Pattern};
pub use network::{network_census, NetworkCounts};
