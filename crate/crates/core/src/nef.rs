//! Nef-partitions, their duals and the lattice-point structure of `Δ^∨`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::fan::{
    cartier_data, divisor_polytope, mpcp_fan, nef_violation, CartierData, Fan, FanError, FanJson,
    ToricDivisor,
};
use crate::linalg::{generates_full_lattice, IntMatrix};
use crate::polytope::{LatticePolytope, PolytopeError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NefError {
    #[error("part {part} is empty")]
    EmptyPart { part: usize },
    #[error("ray {ray} is out of range")]
    RayOutOfRange { ray: usize },
    #[error("ray {ray} appears in more than one part")]
    Overlap { ray: usize },
    #[error("partition not exhaustive: ray {ray} is in no part")]
    NotExhaustive { ray: usize },
    #[error("fan is not complete")]
    NotComplete,
    #[error("fan is not simplicial")]
    NotSimplicial,
    #[error("E_{part} not Cartier at cone {cone}")]
    NotCartier { part: usize, cone: usize },
    #[error("E_{part} not nef: cone {cone} violates the inequality at ray {ray}")]
    NotNef {
        part: usize,
        cone: usize,
        ray: usize,
    },
    #[error("Minkowski sum of the parts is not reflexive")]
    NotReflexive,
    #[error("rays are not the nonzero lattice points of the dual polytope (witness {0:?})")]
    RaysMismatch(Vec<i64>),
    #[error("dual ray {0:?} does not lie in exactly one summand")]
    DualRayAmbiguous(Vec<i64>),
    #[error("point {0:?} is not a lattice point of the dual polytope")]
    NotInPolytope(Vec<i64>),
    #[error("the origin has no minimal proper face")]
    Origin,
    #[error("no part contains all vertices of the minimal face of {0:?}")]
    NoPartContainsFace(Vec<i64>),
    #[error(transparent)]
    Fan(#[from] FanError),
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
}

/// A validated nef-partition on a complete simplicial fan.
#[derive(Debug, Clone)]
pub struct NefPartition {
    fan: Fan,
    parts: Vec<Vec<usize>>,
    divisors: Vec<ToricDivisor>,
    cartier: Vec<CartierData>,
    delta_parts: Vec<LatticePolytope>,
    nabla_parts: Vec<LatticePolytope>,
    delta: LatticePolytope,
    delta_dual: LatticePolytope,
}

/// JSON form `{"fan": <fan>, "parts": [[ray indices], ...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NefPartitionJson {
    pub fan: FanJson,
    pub parts: Vec<Vec<usize>>,
}

/// Which smoothness hypothesis an input satisfies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// Every maximal cone is unimodular.
    Smooth,
    /// Not smooth, but the rays generate the lattice.
    LatticeGenerating,
    Unsupported,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeCover {
    pub covered: bool,
    pub points: usize,
    pub uncovered: Option<Vec<i64>>,
}

pub fn validate_nef_partition(fan: &Fan, parts: &[Vec<usize>]) -> Result<NefPartition, NefError> {
    let nrays = fan.rays().len();
    let mut seen = vec![false; nrays];
    for (i, part) in parts.iter().enumerate() {
        if part.is_empty() {
            return Err(NefError::EmptyPart { part: i + 1 });
        }
        for &r in part {
            if r >= nrays {
                return Err(NefError::RayOutOfRange { ray: r });
            }
            if seen[r] {
                return Err(NefError::Overlap { ray: r });
            }
            seen[r] = true;
        }
    }
    if let Some(r) = seen.iter().position(|s| !s) {
        return Err(NefError::NotExhaustive { ray: r });
    }
    if !fan.is_simplicial() {
        return Err(NefError::NotSimplicial);
    }
    if !fan.is_complete() {
        return Err(NefError::NotComplete);
    }

    let n = fan.dim();
    let mut divisors = Vec::new();
    let mut cartier = Vec::new();
    let mut delta_parts = Vec::new();
    let mut nabla_parts = Vec::new();
    for (i, part) in parts.iter().enumerate() {
        let e = ToricDivisor::indicator(nrays, part);
        let cd = cartier_data(fan, &e).map_err(|err| match err {
            FanError::NotCartier { cone, .. } => NefError::NotCartier { part: i + 1, cone },
            other => other.into(),
        })?;
        if let Some((cone, ray)) = nef_violation(fan, &e)? {
            return Err(NefError::NotNef {
                part: i + 1,
                cone,
                ray,
            });
        }
        delta_parts.push(divisor_polytope(fan, &e)?);
        let mut pts: Vec<Vec<i64>> = part.iter().map(|&r| fan.rays()[r].clone()).collect();
        pts.push(vec![0; n]);
        nabla_parts.push(LatticePolytope::new(n, &pts)?);
        divisors.push(e);
        cartier.push(cd);
    }

    let mut delta = delta_parts[0].clone();
    for p in &delta_parts[1..] {
        delta = delta.minkowski_sum(p)?;
    }
    if !delta.is_full_dimensional() || !delta.origin_is_interior() || !delta.is_reflexive()? {
        return Err(NefError::NotReflexive);
    }
    let delta_dual = delta.dual()?;
    let ray_set: BTreeSet<&Vec<i64>> = fan.rays().iter().collect();
    for p in delta_dual.lattice_points() {
        if p.iter().any(|&x| x != 0) && !ray_set.contains(&p) {
            return Err(NefError::RaysMismatch(p));
        }
    }
    for r in fan.rays() {
        if !delta_dual.contains(r) {
            return Err(NefError::RaysMismatch(r.clone()));
        }
    }

    Ok(NefPartition {
        fan: fan.clone(),
        parts: parts.to_vec(),
        divisors,
        cartier,
        delta_parts,
        nabla_parts,
        delta,
        delta_dual,
    })
}

impl NefPartition {
    pub fn from_json(j: &NefPartitionJson) -> Result<Self, NefError> {
        validate_nef_partition(&Fan::from_json(&j.fan)?, &j.parts)
    }

    pub fn to_json(&self) -> NefPartitionJson {
        NefPartitionJson {
            fan: self.fan.to_json(),
            parts: self.parts.clone(),
        }
    }

    pub fn fan(&self) -> &Fan {
        &self.fan
    }

    /// Ray indices of each part, in input order.
    pub fn parts(&self) -> &[Vec<usize>] {
        &self.parts
    }

    pub fn r(&self) -> usize {
        self.parts.len()
    }

    pub fn dim(&self) -> usize {
        self.fan.dim()
    }

    pub fn divisors(&self) -> &[ToricDivisor] {
        &self.divisors
    }

    pub fn cartier(&self) -> &[CartierData] {
        &self.cartier
    }

    /// Divisor polytopes `Δ_i` of the `E_i`.
    pub fn delta_parts(&self) -> &[LatticePolytope] {
        &self.delta_parts
    }

    /// `∇_i = Conv(J_i ∪ {0})`.
    pub fn nabla_parts(&self) -> &[LatticePolytope] {
        &self.nabla_parts
    }

    /// `Δ = Δ_1 + ... + Δ_r`.
    pub fn delta(&self) -> &LatticePolytope {
        &self.delta
    }

    pub fn delta_dual(&self) -> &LatticePolytope {
        &self.delta_dual
    }

    /// Part index (0-based) of a ray.
    pub fn part_of(&self, ray: usize) -> usize {
        self.parts
            .iter()
            .position(|p| p.contains(&ray))
            .expect("partition is exhaustive")
    }

    pub fn regime(&self) -> Regime {
        regime(&self.fan)
    }
}

pub fn regime(fan: &Fan) -> Regime {
    if fan.is_smooth() {
        Regime::Smooth
    } else if generates_full_lattice(&IntMatrix::from_i64_rows(fan.rays()).transpose()) {
        Regime::LatticeGenerating
    } else {
        Regime::Unsupported
    }
}

/// The dual nef-partition on the MPCP fan of `∇ = ∇_1 + ... + ∇_r`.
pub fn dual_nef_partition(npd: &NefPartition) -> Result<NefPartition, NefError> {
    let mut nabla = npd.nabla_parts[0].clone();
    for p in &npd.nabla_parts[1..] {
        nabla = nabla.minkowski_sum(p)?;
    }
    if !nabla.origin_is_interior() || !nabla.is_reflexive()? {
        return Err(NefError::NotReflexive);
    }
    let fan = mpcp_fan(&nabla)?;
    let mut parts = vec![Vec::new(); npd.r()];
    for (k, ray) in fan.rays().iter().enumerate() {
        let owners: Vec<usize> = (0..npd.r())
            .filter(|&i| npd.delta_parts[i].contains(ray))
            .collect();
        if owners.len() != 1 {
            return Err(NefError::DualRayAmbiguous(ray.clone()));
        }
        parts[owners[0]].push(k);
    }
    validate_nef_partition(&fan, &parts)
}

/// Every lattice point of `Δ^∨` lies in some `∇_i`.
pub fn check_lattice_cover(npd: &NefPartition) -> LatticeCover {
    let pts = npd.delta_dual.lattice_points();
    let uncovered = pts
        .iter()
        .find(|p| !npd.nabla_parts.iter().any(|q| q.contains(p)))
        .cloned();
    LatticeCover {
        covered: uncovered.is_none(),
        points: pts.len(),
        uncovered,
    }
}

/// Part (0-based) containing every vertex of the minimal face of `Δ^∨` through `ν`.
pub fn minimal_face_part(npd: &NefPartition, nu: &[i64]) -> Result<usize, NefError> {
    let dd = &npd.delta_dual;
    if !dd.contains(nu) {
        return Err(NefError::NotInPolytope(nu.to_vec()));
    }
    let tight: Vec<_> = dd.facets()?.iter().filter(|f| f.value(nu) == 0).collect();
    if tight.is_empty() {
        return Err(NefError::Origin);
    }
    let face_vertices: Vec<&Vec<i64>> = dd
        .vertices()
        .iter()
        .filter(|v| tight.iter().all(|f| f.value(v) == 0))
        .collect();
    let rays: Vec<usize> = face_vertices
        .iter()
        .map(|v| npd.fan.ray_index(v).expect("vertices of the dual are rays"))
        .collect();
    (0..npd.r())
        .find(|&i| rays.iter().all(|r| npd.parts[i].contains(r)))
        .ok_or_else(|| NefError::NoPartContainsFace(nu.to_vec()))
}
