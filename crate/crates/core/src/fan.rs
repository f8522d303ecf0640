//! Fans, toric divisors, Cartier data and MPCP triangulations.

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::linalg::{
    self, cone_facets, dot_i64, primitive_i64, rref, to_big, to_rat, ConeV, Int, IntMatrix,
    LinalgError, Rat,
};
use crate::polytope::{LatticePolytope, PolytopeError};
use crate::triangulate::placing_triangulation;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FanError {
    #[error("ray {index} is zero or has the wrong dimension")]
    BadRay { index: usize },
    #[error("ray {index} is not primitive")]
    NonPrimitiveRay { index: usize },
    #[error("cone {cone} references ray {ray} out of range")]
    RayOutOfRange { cone: usize, ray: usize },
    #[error("fan is not simplicial at cone {cone}")]
    NotSimplicial { cone: usize },
    #[error("divisor has {got} coefficients, fan has {expected} rays")]
    DivisorLength { expected: usize, got: usize },
    #[error("divisor is not Cartier at cone {cone} (rays {rays:?})")]
    NotCartier { cone: usize, rays: Vec<usize> },
    #[error("divisor polyhedron is unbounded")]
    Unbounded,
    #[error("divisor polyhedron is empty")]
    EmptyPolyhedron,
    #[error("divisor polyhedron has non-integral vertex {0}")]
    NonIntegralVertex(String),
    #[error("point is not in any maximal cone")]
    NotInSupport,
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Rays and maximal cones (sorted ray-index lists).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fan {
    dim: usize,
    rays: Vec<Vec<i64>>,
    max_cones: Vec<Vec<usize>>,
}

/// JSON form `{"dim": n, "rays": [[...]], "max_cones": [[i, ...]]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FanJson {
    pub dim: usize,
    pub rays: Vec<Vec<i64>>,
    pub max_cones: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FanPredicates {
    pub complete: bool,
    pub simplicial: bool,
    pub smooth: bool,
}

/// Insertion order of lattice points for the MPCP placing triangulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InsertionOrder {
    #[default]
    Lex,
    ReverseLex,
}

/// A wall `tau` shared by two maximal cones, with the off-wall rays.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Wall {
    pub rays: Vec<usize>,
    pub cones: (usize, usize),
    pub off: (usize, usize),
}

impl Fan {
    pub fn new(
        dim: usize,
        rays: Vec<Vec<i64>>,
        max_cones: Vec<Vec<usize>>,
    ) -> Result<Self, FanError> {
        for (i, r) in rays.iter().enumerate() {
            if r.len() != dim || r.iter().all(|&x| x == 0) {
                return Err(FanError::BadRay { index: i });
            }
            if primitive_i64(r) != *r {
                return Err(FanError::NonPrimitiveRay { index: i });
            }
        }
        let mut cones = Vec::with_capacity(max_cones.len());
        for (c, cone) in max_cones.into_iter().enumerate() {
            if let Some(&bad) = cone.iter().find(|&&x| x >= rays.len()) {
                return Err(FanError::RayOutOfRange { cone: c, ray: bad });
            }
            let mut cone = cone;
            cone.sort();
            cone.dedup();
            cones.push(cone);
        }
        Ok(Self {
            dim,
            rays,
            max_cones: cones,
        })
    }

    pub fn from_json(j: &FanJson) -> Result<Self, FanError> {
        Self::new(j.dim, j.rays.clone(), j.max_cones.clone())
    }

    pub fn to_json(&self) -> FanJson {
        FanJson {
            dim: self.dim,
            rays: self.rays.clone(),
            max_cones: self.max_cones.clone(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rays(&self) -> &[Vec<i64>] {
        &self.rays
    }

    pub fn max_cones(&self) -> &[Vec<usize>] {
        &self.max_cones
    }

    pub fn ray_index(&self, v: &[i64]) -> Option<usize> {
        self.rays.iter().position(|r| r == v)
    }

    /// Cones as sets of ray vectors, independent of ray numbering.
    pub fn canonical_cones(&self) -> BTreeSet<BTreeSet<Vec<i64>>> {
        self.max_cones
            .iter()
            .map(|c| c.iter().map(|&i| self.rays[i].clone()).collect())
            .collect()
    }

    /// Same fan with rays renumbered so that new ray `k` is old ray `order[k]`.
    pub fn permute_rays(&self, order: &[usize]) -> Fan {
        let mut inv = vec![usize::MAX; self.rays.len()];
        for (k, &o) in order.iter().enumerate() {
            inv[o] = k;
        }
        let rays = order.iter().map(|&o| self.rays[o].clone()).collect();
        let mut cones: Vec<Vec<usize>> = self
            .max_cones
            .iter()
            .map(|c| {
                let mut v: Vec<usize> = c.iter().map(|&i| inv[i]).collect();
                v.sort();
                v
            })
            .collect();
        cones.sort();
        Fan {
            dim: self.dim,
            rays,
            max_cones: cones,
        }
    }

    fn cone_rows(&self, c: usize) -> Vec<Vec<i64>> {
        self.max_cones[c]
            .iter()
            .map(|&i| self.rays[i].clone())
            .collect()
    }

    pub fn is_simplicial(&self) -> bool {
        (0..self.max_cones.len()).all(|c| {
            let rows = self.cone_rows(c);
            IntMatrix::from_i64_rows(&rows).rank() == rows.len()
        })
    }

    pub fn is_smooth(&self) -> bool {
        self.is_simplicial() && (0..self.max_cones.len()).all(|c| saturated(&self.cone_rows(c)))
    }

    /// Every facet of every maximal cone is shared by exactly two maximal
    /// cones lying on opposite sides of it.
    pub fn is_complete(&self) -> bool {
        if self.max_cones.is_empty() {
            return false;
        }
        let mut faces: BTreeMap<Vec<usize>, Vec<(usize, Vec<i64>)>> = BTreeMap::new();
        for c in 0..self.max_cones.len() {
            let Some(facets) = self.cone_facet_sets(c) else {
                return false;
            };
            for (rays, normal) in facets {
                faces.entry(rays).or_default().push((c, normal));
            }
        }
        faces.values().all(|v| {
            if v.len() != 2 {
                return false;
            }
            let (c1, h1) = &v[0];
            let (c2, _) = &v[1];
            let _ = c1;
            // Rays of the second cone off the shared face lie strictly on the far side.
            self.max_cones[*c2]
                .iter()
                .map(|&i| dot_i64(h1, &self.rays[i]))
                .all(|s| s <= 0)
                && self.max_cones[*c2]
                    .iter()
                    .any(|&i| dot_i64(h1, &self.rays[i]) < 0)
        })
    }

    /// Facets of a full-dimensional maximal cone as (tight ray indices, inner normal).
    fn cone_facet_sets(&self, c: usize) -> Option<Vec<(Vec<usize>, Vec<i64>)>> {
        let gens: Vec<Vec<Int>> = self.cone_rows(c).iter().map(|r| to_big(r)).collect();
        let h = cone_facets(&ConeV::new(self.dim, gens)).ok()?;
        if h.normals.is_empty() {
            return None;
        }
        Some(
            h.normals
                .iter()
                .map(|n| {
                    let n: Vec<i64> = n.iter().map(|x| x.to_i64().unwrap()).collect();
                    let tight = self.max_cones[c]
                        .iter()
                        .copied()
                        .filter(|&i| dot_i64(&n, &self.rays[i]) == 0)
                        .collect();
                    (tight, n)
                })
                .collect(),
        )
    }

    pub fn predicates(&self) -> FanPredicates {
        FanPredicates {
            complete: self.is_complete(),
            simplicial: self.is_simplicial(),
            smooth: self.is_smooth(),
        }
    }

    /// Interior walls of a simplicial fan.
    pub fn walls(&self) -> Result<Vec<Wall>, FanError> {
        let mut by_face: BTreeMap<Vec<usize>, Vec<(usize, usize)>> = BTreeMap::new();
        for (c, cone) in self.max_cones.iter().enumerate() {
            if cone.len() != self.dim {
                return Err(FanError::NotSimplicial { cone: c });
            }
            for (k, &off) in cone.iter().enumerate() {
                let mut face = cone.clone();
                face.remove(k);
                by_face.entry(face).or_default().push((c, off));
            }
        }
        Ok(by_face
            .into_iter()
            .filter(|(_, v)| v.len() == 2)
            .map(|(rays, v)| Wall {
                rays,
                cones: (v[0].0, v[1].0),
                off: (v[0].1, v[1].1),
            })
            .collect())
    }

    /// Index of a maximal cone containing `u`, with the coefficients of `u` in its rays.
    pub fn locate(&self, u: &[Rat]) -> Result<(usize, Vec<Rat>), FanError> {
        for (c, cone) in self.max_cones.iter().enumerate() {
            let rows: Vec<Vec<Rat>> = (0..self.dim)
                .map(|k| {
                    cone.iter()
                        .map(|&i| Rat::from_integer(Int::from(self.rays[i][k])))
                        .collect()
                })
                .collect();
            if let Some(coef) = solve_exact(&rows, u) {
                if coef.iter().all(|x| !x.is_negative()) {
                    return Ok((c, coef));
                }
            }
        }
        Err(FanError::NotInSupport)
    }
}

/// Unique solution of an overdetermined consistent system, if any.
fn solve_exact(rows: &[Vec<Rat>], b: &[Rat]) -> Option<Vec<Rat>> {
    let nvars = rows.first().map_or(0, |r| r.len());
    let mut aug: Vec<Vec<Rat>> = rows
        .iter()
        .zip(b)
        .map(|(r, bi)| {
            let mut r = r.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let piv = rref(&mut aug);
    if piv.contains(&nvars) || piv.len() != nvars {
        return None;
    }
    Some(aug.iter().map(|r| r[nvars].clone()).collect())
}

/// The rows span a saturated sublattice (gcd of maximal minors is 1).
fn saturated(rows: &[Vec<i64>]) -> bool {
    let k = rows.len();
    if k == 0 {
        return true;
    }
    let n = rows[0].len();
    let g = (0..n).combinations(k).fold(Int::zero(), |g, cols| {
        let sub: Vec<Vec<i64>> = rows
            .iter()
            .map(|r| cols.iter().map(|&c| r[c]).collect())
            .collect();
        g.gcd(&IntMatrix::from_i64_rows(&sub).determinant())
    });
    g.is_one()
}

/// Normal fan: rays are inner facet normals, one cone per vertex.
pub fn normal_fan(p: &LatticePolytope) -> Result<Fan, FanError> {
    let facets = p.facets()?;
    let rays: Vec<Vec<i64>> = facets.iter().map(|f| f.normal.clone()).collect();
    let cones = p
        .vertices()
        .iter()
        .map(|v| {
            facets
                .iter()
                .enumerate()
                .filter(|(_, f)| f.value(v) == 0)
                .map(|(i, _)| i)
                .collect()
        })
        .collect();
    Fan::new(p.dim(), rays, cones)
}

/// Face fan: rays through the vertices, one cone per facet.
pub fn face_fan(p: &LatticePolytope) -> Result<Fan, FanError> {
    if !p.origin_is_interior() {
        return Err(PolytopeError::OriginNotInterior.into());
    }
    let rays: Vec<Vec<i64>> = p.vertices().iter().map(|v| primitive_i64(v)).collect();
    let cones = p
        .facet_vertex_sets()?
        .into_iter()
        .map(|s| s.into_iter().collect())
        .collect();
    Fan::new(p.dim(), rays, cones)
}

/// MPCP fan of a reflexive polytope: the fine placing triangulation of the
/// boundary of its dual, coned from the origin.
pub fn mpcp_fan(delta: &LatticePolytope) -> Result<Fan, FanError> {
    mpcp_fan_from_dual(&delta.dual()?, InsertionOrder::Lex)
}

/// MPCP fan built directly from `Δ^∨`. Rays are the nonzero lattice points in
/// lexicographic order.
pub fn mpcp_fan_from_dual(dual: &LatticePolytope, order: InsertionOrder) -> Result<Fan, FanError> {
    if !dual.is_reflexive()? {
        return Err(PolytopeError::NonIntegralDual("polytope is not reflexive".into()).into());
    }
    let n = dual.dim();
    let rays: Vec<Vec<i64>> = dual
        .lattice_points()
        .into_iter()
        .filter(|p| p.iter().any(|&x| x != 0))
        .collect();
    let mut cones: BTreeSet<Vec<usize>> = BTreeSet::new();
    for f in dual.facets()? {
        let mut on: Vec<usize> = (0..rays.len())
            .filter(|&i| f.value(&rays[i]) == 0)
            .collect();
        if order == InsertionOrder::ReverseLex {
            on.reverse();
        }
        let t = placing_triangulation(&rays, &on);
        debug_assert_eq!(t.dim + 1, n);
        cones.extend(t.simplices);
    }
    Fan::new(n, rays, cones.into_iter().collect())
}

/// `D = sum a_ρ D_ρ`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ToricDivisor {
    pub coeffs: Vec<i64>,
}

impl ToricDivisor {
    pub fn new(coeffs: Vec<i64>) -> Self {
        Self { coeffs }
    }

    /// Sum of `D_ρ` over the given rays.
    pub fn indicator(nrays: usize, rays: &[usize]) -> Self {
        let mut c = vec![0; nrays];
        for &r in rays {
            c[r] += 1;
        }
        Self { coeffs: c }
    }
}

/// One `m_σ` per maximal cone, with `<m_σ, ρ> = -a_ρ` on the rays of `σ`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CartierData {
    pub m: Vec<Vec<i64>>,
}

pub fn cartier_data(fan: &Fan, d: &ToricDivisor) -> Result<CartierData, FanError> {
    check_len(fan, d)?;
    let mut out = Vec::with_capacity(fan.max_cones.len());
    for (c, cone) in fan.max_cones.iter().enumerate() {
        let rows: Vec<Vec<Rat>> = cone.iter().map(|&i| to_rat(&fan.rays[i])).collect();
        let b: Vec<Rat> = cone
            .iter()
            .map(|&i| Rat::from_integer(Int::from(-d.coeffs[i])))
            .collect();
        let not_cartier = || FanError::NotCartier {
            cone: c,
            rays: cone.clone(),
        };
        let m = solve_exact(&rows, &b).ok_or_else(not_cartier)?;
        if m.iter().any(|x| !x.is_integer()) {
            return Err(not_cartier());
        }
        out.push(m.iter().map(|x| x.to_integer().to_i64().unwrap()).collect());
    }
    Ok(CartierData { m: out })
}

/// `<m_σ, ρ> >= -a_ρ` for every maximal cone and every ray.
pub fn is_nef(fan: &Fan, d: &ToricDivisor) -> Result<bool, FanError> {
    Ok(nef_violation(fan, d)?.is_none())
}

/// First `(cone, ray)` violating convexity of the support function.
pub fn nef_violation(fan: &Fan, d: &ToricDivisor) -> Result<Option<(usize, usize)>, FanError> {
    let cd = cartier_data(fan, d)?;
    for (c, m) in cd.m.iter().enumerate() {
        for (r, ray) in fan.rays.iter().enumerate() {
            if dot_i64(m, ray) < -d.coeffs[r] {
                return Ok(Some((c, r)));
            }
        }
    }
    Ok(None)
}

fn check_len(fan: &Fan, d: &ToricDivisor) -> Result<(), FanError> {
    if d.coeffs.len() != fan.rays.len() {
        return Err(FanError::DivisorLength {
            expected: fan.rays.len(),
            got: d.coeffs.len(),
        });
    }
    Ok(())
}

/// `{m : <m, ρ> >= -a_ρ for all rays}` as a lattice polytope.
pub fn divisor_polytope(fan: &Fan, d: &ToricDivisor) -> Result<LatticePolytope, FanError> {
    check_len(fan, d)?;
    let n = fan.dim;
    // Homogenize: (t, m) with t a_ρ + <m, ρ> >= 0 and t >= 0.
    let mut constraints: Vec<Vec<Int>> = fan
        .rays
        .iter()
        .zip(&d.coeffs)
        .map(|(r, &a)| {
            let mut v = vec![Int::from(a)];
            v.extend(r.iter().map(|&x| Int::from(x)));
            v
        })
        .collect();
    let mut t = vec![Int::zero(); n + 1];
    t[0] = Int::one();
    constraints.push(t);
    let gens = match linalg::extreme_rays(&constraints, n + 1) {
        Ok(g) => g,
        Err(LinalgError::NotFullDimensional { .. }) => return Err(FanError::Unbounded),
        Err(e) => return Err(e.into()),
    };
    if gens.is_empty() {
        return Err(FanError::EmptyPolyhedron);
    }
    let mut verts = Vec::with_capacity(gens.len());
    for g in &gens {
        if g[0].is_zero() {
            return Err(FanError::Unbounded);
        }
        let v: Vec<Rat> = g[1..]
            .iter()
            .map(|x| Rat::new(x.clone(), g[0].clone()))
            .collect();
        if v.iter().any(|x| !x.is_integer()) {
            let s: Vec<String> = v.iter().map(|x| x.to_string()).collect();
            return Err(FanError::NonIntegralVertex(format!("({})", s.join(", "))));
        }
        verts.push(v.iter().map(|x| x.to_integer().to_i64().unwrap()).collect());
    }
    Ok(LatticePolytope::new(n, &verts)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn p1_fan() -> Fan {
        Fan::new(1, vec![vec![1], vec![-1]], vec![vec![0], vec![1]]).unwrap()
    }

    fn poly(pts: &[Vec<i64>]) -> LatticePolytope {
        LatticePolytope::new(pts[0].len(), pts).unwrap()
    }

    fn square() -> LatticePolytope {
        poly(&[vec![1, 1], vec![1, -1], vec![-1, 1], vec![-1, -1]])
    }

    fn diamond() -> LatticePolytope {
        poly(&[vec![1, 0], vec![-1, 0], vec![0, 1], vec![0, -1]])
    }

    #[test]
    fn p1_predicates() {
        let p = p1_fan().predicates();
        assert_eq!(
            p,
            FanPredicates {
                complete: true,
                simplicial: true,
                smooth: true
            }
        );
    }

    #[test]
    fn normal_fan_of_segment() {
        let f = normal_fan(&poly(&[vec![-1], vec![1]])).unwrap();
        let rays: BTreeSet<Vec<i64>> = f.rays().iter().cloned().collect();
        assert_eq!(rays, [vec![1], vec![-1]].into_iter().collect());
    }

    #[test]
    fn face_fan_of_square() {
        let f = face_fan(&square()).unwrap();
        assert_eq!(f.max_cones().len(), 4);
        assert_eq!(
            f.predicates(),
            FanPredicates {
                complete: true,
                simplicial: true,
                smooth: false
            }
        );
        assert_eq!(
            normal_fan(&diamond()).unwrap().canonical_cones(),
            f.canonical_cones()
        );
    }

    #[test]
    fn incomplete_fan_detected() {
        let f = Fan::new(2, vec![vec![1, 0], vec![0, 1]], vec![vec![0, 1]]).unwrap();
        assert!(!f.is_complete());
    }

    #[test]
    fn mpcp_of_segment_and_square() {
        let f = mpcp_fan(&poly(&[vec![-1], vec![1]])).unwrap();
        assert_eq!(f.canonical_cones(), p1_fan().canonical_cones());
        let g = mpcp_fan_from_dual(&square(), InsertionOrder::Lex).unwrap();
        assert_eq!(g.rays().len(), 8);
        assert_eq!(g.max_cones().len(), 8);
        assert!(g.predicates().smooth && g.is_complete());
    }

    #[test]
    fn divisor_polytopes_on_p1() {
        let f = p1_fan();
        assert_eq!(
            divisor_polytope(&f, &ToricDivisor::new(vec![1, 1])).unwrap(),
            poly(&[vec![-1], vec![1]])
        );
        assert_eq!(
            divisor_polytope(&f, &ToricDivisor::new(vec![0, 0])).unwrap(),
            poly(&[vec![0]])
        );
        assert_eq!(
            divisor_polytope(&f, &ToricDivisor::new(vec![1, 0])).unwrap(),
            poly(&[vec![-1], vec![0]])
        );
    }

    #[test]
    fn unbounded_divisor_polyhedron() {
        let f = Fan::new(2, vec![vec![1, 0], vec![0, 1]], vec![vec![0, 1]]).unwrap();
        assert_eq!(
            divisor_polytope(&f, &ToricDivisor::new(vec![1, 1])),
            Err(FanError::Unbounded)
        );
    }

    #[test]
    fn cartier_and_nef_on_p1() {
        let f = p1_fan();
        let cd = cartier_data(&f, &ToricDivisor::new(vec![1, 0])).unwrap();
        assert_eq!(cd.m, vec![vec![-1], vec![0]]);
        let cd = cartier_data(&f, &ToricDivisor::new(vec![1, 1])).unwrap();
        assert_eq!(cd.m, vec![vec![-1], vec![1]]);
        assert!(is_nef(&f, &ToricDivisor::new(vec![1, 1])).unwrap());
        // Degree zero is still nef on P^1; negative degree is not.
        assert!(is_nef(&f, &ToricDivisor::new(vec![1, -1])).unwrap());
        assert!(!is_nef(&f, &ToricDivisor::new(vec![1, -2])).unwrap());
    }

    #[test]
    fn not_cartier_on_singular_cone() {
        let f = face_fan(&square()).unwrap();
        let i = f.ray_index(&[1, 1]).unwrap();
        let d = ToricDivisor::indicator(4, &[i]);
        assert!(matches!(
            cartier_data(&f, &d),
            Err(FanError::NotCartier { .. })
        ));
    }

    #[test]
    fn locate_points() {
        let f = p1_fan();
        let (c, coef) = f.locate(&to_rat(&[2])).unwrap();
        assert_eq!(f.max_cones()[c], vec![0]);
        assert_eq!(coef, to_rat(&[2]));
    }
}
