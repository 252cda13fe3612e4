//! Rank functions of matrix powers and rank function equations.
//!
//! * [`partition`]: Jordan partitions, rank functions, dominance.
//! * [`equations`]: solving and checking `Σ f(r_{A_i}(m)) = g(r_B(m))`.
//! * [`geometry`]: solution sets, their components, dimensions and linear
//!   capacities, and the dominance Hasse diagram.
//! * [`oracle`]: exact rational matrices used to cross-check all of the above.

pub mod equations;
pub mod error;
pub mod geometry;
pub mod oracle;
pub mod partition;

pub use equations::{
    check_solution, search_general, solve_nilpotent, solve_with_stable_ranks,
    structure_check_identity, validate_convex_table, ConvexTable, EquationSpec, FnSpec, FnTable,
    SolutionTuple, DEFAULT_BUDGET,
};
pub use error::{Error, Result, TableViolation};
pub use geometry::{
    component_dimension, dominating_tuple, enumerate_sol, hasse_dot, in_product_closure,
    irreducible_components, is_irreducible, maximal_elements, orbit_capacity, orbit_dimension,
    rank_matrix, rm_leq, same_orbit_tuple, sol_capacity, Component, DominatingTuple, RankMatrix,
    SolCapacity, SolSet,
};
pub use partition::{
    class_rank, conjugate, dominates, is_valid_rank_function, nontrivial_blocks,
    nontrivial_partitions, partition_to_rank, partitions, rank_to_partition, MatrixClass,
    Partition, RankFunction,
};
