//! Shared setup for the pipeline benchmarks.

use gkz_core::cohomology::{build_ring, CohomRing};
use gkz_core::gkz::{build_cayley_gkz, GkzSystem};
use gkz_core::instances::builtin;
use gkz_core::NefPartition;

/// A built-in instance with its GKZ system and cohomology ring already built.
pub struct Prepared {
    pub npd: NefPartition,
    pub gkz: GkzSystem,
    pub ring: CohomRing,
}

pub fn prepare(name: &str) -> Prepared {
    let npd = builtin(name).expect("known built-in");
    let gkz = build_cayley_gkz(&npd).expect("supported fan");
    let ring = build_ring(npd.fan()).expect("smooth fan");
    Prepared { npd, gkz, ring }
}
