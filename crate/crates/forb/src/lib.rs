//! Exact tools for (0,1)-matrices avoiding the two-row configuration
//! F(0,p,1,0): containment checking, row-graph structure, extremal bounds,
//! block constructions and branch-and-bound search.

pub mod bounds;
pub mod constructions;
pub mod containment;
pub mod matrix;
pub mod rowgraph;
pub mod search;

pub use bounds::{
    component_cost, conjecture_bound, cp, forb_bound, upper_bound_nonsimple, upper_bound_simple,
    BoundStatus, Rational,
};
pub use constructions::{
    assemble, builtin_block, builtin_extremal, conjecture_block, BlockLibraryEntry,
    ConstructionPlan,
};
pub use containment::{
    avoids_two_row, contains, contains_general, contains_two_row, pair_profile, CheckError,
    ForbiddenPattern, PairProfile, Witness,
};
pub use matrix::{BinaryMatrix, Mask, MatrixError};
pub use rowgraph::{build_graph, is_clique, is_transitive, reassemble, EdgeClass, GraphReport};
pub use search::{
    enumerate_extremal, forb_search, max_bounded_diff, EnumerateResult, SearchError, SearchResult,
};
