//! Exact GKZ systems for nef-partitions: lattice geometry, non-resonance
//! certificates, holonomic rank and Frobenius period series.

pub mod cohomology;
pub mod constants;
pub mod fan;
pub mod frobenius;
pub mod gkz;
pub mod instances;
pub mod jets;
pub mod linalg;
pub mod nef;
pub mod oracles;
pub mod polytope;
pub mod triangulate;

pub use cohomology::{build_ring, CohomRing};
pub use frobenius::{FrobeniusContext, SolutionBasis};
pub use gkz::{build_cayley_gkz, GkzSystem};
pub use instances::{builtin, nef_partition_from_nablas, NablaParts};
pub use linalg::{Int, Rat};
pub use nef::{validate_nef_partition, NefPartition};

/// Any error raised along the pipeline.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Linalg(#[from] linalg::LinalgError),
    #[error(transparent)]
    Polytope(#[from] polytope::PolytopeError),
    #[error(transparent)]
    Fan(#[from] fan::FanError),
    #[error(transparent)]
    Nef(#[from] nef::NefError),
    #[error(transparent)]
    Gkz(#[from] gkz::GkzError),
    #[error(transparent)]
    Cohomology(#[from] cohomology::CohomologyError),
    #[error(transparent)]
    Instance(#[from] instances::InstanceError),
    #[error(transparent)]
    Frobenius(#[from] frobenius::FrobeniusError),
    #[error(transparent)]
    Oracle(#[from] oracles::OracleError),
}
