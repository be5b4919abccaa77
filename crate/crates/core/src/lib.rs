//! Exact combinatorics of 2-Segal sets built from rooted trees and graphs.
//!
//! The tree construction [`tree_segal::build_xt`] layers admissible
//! subforests by successive cuts; the graph construction
//! [`graph_segal::build_xg`] partitions subgraphs. Both produce a
//! [`LevelwiseSimplicialSet`], from which the remaining modules derive the
//! pointed stable double category, the Hall algebra and the coloured
//! operad of operations.

pub mod double_cat;
pub mod error;
pub mod forest;
pub mod graph_segal;
pub mod hall;
pub mod operad;
pub mod simplicial;
pub mod tree_segal;
pub mod umap;

pub use double_cat::DoubleCategoryData;
pub use error::{Error, Result};
pub use forest::{CanonicalCode, Flavour, Layering, RootedForest, VertexSet};
pub use graph_segal::{Graph, GraphSegalSet, PartitionedSubgraph};
pub use hall::HallTable;
pub use operad::{ColouredOperadData, CompositionInstance};
pub use simplicial::{LevelwiseSimplicialSet, SimplicialMap, Triangulation};
pub use tree_segal::TreeSegalSet;
