//! Exact and LP-based tools for the `M_nn22` family of bipartite Bell
//! inequalities: Collins-Gisin tables, inequality generators, a dense
//! simplex solver, local / no-signaling / pairwise-local bounds and an
//! explicit quantum model.

pub mod cg;
pub mod error;
pub mod inequality;
pub mod lp;
pub mod polytope;
pub mod quantum;

pub use cg::{evaluate, validate, BellFunctional, CgTable, FullDistribution, Violation};
pub use error::{Error, Result};
pub use inequality::{chsh, i_nn22, m_nn22, reduced_chsh, sub_embedding, PairLabel, SubEmbedding};
pub use lp::{LpProblem, LpSolution, Relation, ToleranceConfig};
pub use polytope::{
    det_vertices, domination_check, gns_max, local_max, local_membership, ns_max,
    pairwise_local_max, GnsMax, LocalMax, LpMax, NsConstraintSystem,
};
pub use quantum::{optimize_q0, Optimum, QuantumConstruction};
