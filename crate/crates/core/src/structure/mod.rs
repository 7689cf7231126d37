//! Structural analyses: substructure entropy per island, modularity, and
//! walktrap community detection.

pub mod entropy;
pub mod modularity;
pub mod walktrap;

pub use entropy::{node_entropy, segment_entropy, EntropyBand, SegmentReport};
pub use modularity::modularity_q;
pub use walktrap::{walktrap_communities, CommunityPartition, DEFAULT_WALK_LENGTH};
