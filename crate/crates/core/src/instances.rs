//! Nef-partitions given by their `∇_i`, and the two built-in examples.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::fan::{mpcp_fan_from_dual, FanError, InsertionOrder};
use crate::nef::{validate_nef_partition, NefError, NefPartition};
use crate::polytope::{LatticePolytope, PolytopeError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InstanceError {
    #[error("no parts given")]
    Empty,
    #[error("part {0} has vertices of the wrong length")]
    Dimension(usize),
    #[error("lattice point {0:?} lies in no part or in several")]
    Cover(Vec<i64>),
    #[error("unknown built-in instance {0:?}")]
    UnknownBuiltin(String),
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
    #[error(transparent)]
    Fan(#[from] FanError),
    #[error(transparent)]
    Nef(#[from] NefError),
}

/// The `∇_i` as vertex lists (each containing the origin).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NablaParts {
    pub dim: usize,
    pub parts: Vec<Vec<Vec<i64>>>,
}

pub const BUILTINS: [&str; 2] = ["p1-elliptic", "p3-8planes"];

pub fn builtin_nablas(name: &str) -> Result<NablaParts, InstanceError> {
    match name {
        "p1-elliptic" => Ok(NablaParts {
            dim: 1,
            parts: vec![vec![vec![0], vec![1], vec![-1]]],
        }),
        "p3-8planes" => Ok(NablaParts {
            dim: 3,
            parts: vec![
                vec![vec![0, 0, 0], vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]],
                vec![
                    vec![0, 0, 0],
                    vec![-1, 0, 0],
                    vec![-1, 1, 0],
                    vec![-1, 0, 1],
                ],
                vec![
                    vec![0, 0, 0],
                    vec![0, -1, 0],
                    vec![1, -1, 0],
                    vec![0, -1, 1],
                ],
                vec![
                    vec![0, 0, 0],
                    vec![0, 0, -1],
                    vec![1, 0, -1],
                    vec![0, 1, -1],
                ],
            ],
        }),
        _ => Err(InstanceError::UnknownBuiltin(name.to_string())),
    }
}

pub fn builtin(name: &str) -> Result<NefPartition, InstanceError> {
    nef_partition_from_nablas(&builtin_nablas(name)?, InsertionOrder::Lex)
}

/// The nef-partition on the MPCP fan of `Conv(∇_1 ∪ ... ∪ ∇_r)`.
///
/// Rays are numbered part by part: nonzero vertices in the order listed,
/// then the remaining lattice points of the part in lexicographic order.
pub fn nef_partition_from_nablas(
    input: &NablaParts,
    order: InsertionOrder,
) -> Result<NefPartition, InstanceError> {
    if input.parts.is_empty() {
        return Err(InstanceError::Empty);
    }
    let n = input.dim;
    let mut polys = Vec::new();
    for (i, verts) in input.parts.iter().enumerate() {
        if verts.iter().any(|v| v.len() != n) {
            return Err(InstanceError::Dimension(i));
        }
        polys.push(LatticePolytope::new(n, verts)?);
    }
    let all: Vec<Vec<i64>> = input.parts.iter().flatten().cloned().collect();
    let dual = LatticePolytope::new(n, &all)?;
    let fan = mpcp_fan_from_dual(&dual, order)?;

    let mut listed: Vec<Vec<i64>> = Vec::new();
    let mut seen = BTreeSet::new();
    for (verts, poly) in input.parts.iter().zip(&polys) {
        let mut pts: Vec<Vec<i64>> = verts
            .iter()
            .filter(|v| v.iter().any(|&x| x != 0))
            .cloned()
            .collect();
        pts.extend(
            poly.lattice_points()
                .into_iter()
                .filter(|p| p.iter().any(|&x| x != 0) && !verts.contains(p)),
        );
        for p in pts {
            if !seen.insert(p.clone()) {
                return Err(InstanceError::Cover(p));
            }
            listed.push(p);
        }
    }
    if listed.len() != fan.rays().len() {
        let missing = fan
            .rays()
            .iter()
            .find(|r| !seen.contains(*r))
            .cloned()
            .unwrap_or_default();
        return Err(InstanceError::Cover(missing));
    }
    let perm: Vec<usize> = listed
        .iter()
        .map(|p| {
            fan.ray_index(p)
                .ok_or_else(|| InstanceError::Cover(p.clone()))
        })
        .collect::<Result<_, _>>()?;
    let fan = fan.permute_rays(&perm);
    let mut parts = Vec::new();
    let mut k = 0;
    for poly in &polys {
        let count = poly
            .lattice_points()
            .iter()
            .filter(|p| p.iter().any(|&x| x != 0))
            .count();
        parts.push((k..k + count).collect());
        k += count;
    }
    Ok(validate_nef_partition(&fan, &parts)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p1_builtin() {
        let npd = builtin("p1-elliptic").unwrap();
        assert_eq!(npd.fan().rays(), &[vec![1], vec![-1]]);
        assert_eq!(npd.parts(), &[vec![0, 1]]);
    }

    #[test]
    fn p3_builtin_shape() {
        let npd = builtin("p3-8planes").unwrap();
        assert_eq!(npd.r(), 4);
        assert_eq!(npd.fan().rays().len(), 12);
        assert_eq!(npd.fan().max_cones().len(), 20);
        assert!(npd.fan().is_smooth());
        assert_eq!(npd.fan().rays()[4], vec![-1, 1, 0]);
    }

    #[test]
    fn unknown_builtin() {
        assert!(matches!(
            builtin("nope"),
            Err(InstanceError::UnknownBuiltin(_))
        ));
    }
}
