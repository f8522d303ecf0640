//! Lattice polytopes: hulls, facets, polar duality, lattice points and volumes.
//!
//! Polytopes of lower dimension are supported through a coordinate chart: a
//! set of coordinates that is injective on the affine hull. Facets, interior
//! tests and volumes that need full dimension report
//! [`PolytopeError::NotFullDimensional`].

use std::collections::BTreeSet;

use itertools::Itertools;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::linalg::{
    self, dot_i64, primitive_from_rat, rational_nullspace, rref, to_big, to_rat, Int, IntMatrix,
    LinalgError, Rat,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolytopeError {
    #[error("polytope has no points")]
    Empty,
    #[error("polytope is not full-dimensional (affine hull has dimension {affine_dim} in ambient dimension {dim})")]
    NotFullDimensional { affine_dim: usize, dim: usize },
    #[error("point {point:?} has dimension {got}, expected {expected}")]
    DimensionMismatch {
        point: Vec<i64>,
        expected: usize,
        got: usize,
    },
    #[error("origin is not in the interior")]
    OriginNotInterior,
    #[error("dual polytope has non-integral vertex {0}")]
    NonIntegralDual(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// A facet `<normal, u> >= -offset` with primitive normal.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Facet {
    pub normal: Vec<i64>,
    pub offset: i64,
}

impl Facet {
    pub fn value(&self, u: &[i64]) -> i64 {
        dot_i64(&self.normal, u) + self.offset
    }
}

/// Convex hull of finitely many lattice points.
#[derive(Debug, Clone)]
pub struct LatticePolytope {
    dim: usize,
    vertices: Vec<Vec<i64>>,
    affine_dim: usize,
    base: Vec<i64>,
    /// Rows `e` with `<e, u - base> = 0` on the affine hull.
    equations: Vec<Vec<Int>>,
    /// Chart coordinates, injective on the affine hull.
    chart: Vec<usize>,
    /// Facets in chart coordinates.
    chart_facets: Vec<Facet>,
}

impl PartialEq for LatticePolytope {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.vertices == other.vertices
    }
}

impl Eq for LatticePolytope {}

/// JSON form `{"dim": n, "vertices": [[...], ...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolytopeJson {
    pub dim: usize,
    pub vertices: Vec<Vec<i64>>,
}

impl LatticePolytope {
    /// Convex hull of `points` in `Z^dim`.
    pub fn new(dim: usize, points: &[Vec<i64>]) -> Result<Self, PolytopeError> {
        let mut pts: Vec<Vec<i64>> = Vec::with_capacity(points.len());
        for p in points {
            if p.len() != dim {
                return Err(PolytopeError::DimensionMismatch {
                    point: p.clone(),
                    expected: dim,
                    got: p.len(),
                });
            }
            pts.push(p.clone());
        }
        pts.sort();
        pts.dedup();
        let base = pts.first().ok_or(PolytopeError::Empty)?.clone();

        let diffs: Vec<Vec<Rat>> = pts
            .iter()
            .map(|p| to_rat(&p.iter().zip(&base).map(|(a, b)| a - b).collect::<Vec<_>>()))
            .collect();
        let mut echelon = diffs.clone();
        let chart = rref(&mut echelon);
        let affine_dim = chart.len();
        let equations: Vec<Vec<Int>> = rational_nullspace(&echelon, dim)
            .iter()
            .map(|v| primitive_from_rat(v))
            .collect();

        let project = |p: &Vec<i64>| -> Vec<i64> { chart.iter().map(|&c| p[c]).collect() };
        let (vertices, chart_facets) = if affine_dim == 0 {
            (vec![base.clone()], Vec::new())
        } else {
            let cone_gens: Vec<Vec<Int>> = pts
                .iter()
                .map(|p| {
                    let mut v = vec![Int::from(1)];
                    v.extend(project(p).into_iter().map(Int::from));
                    v
                })
                .collect();
            let normals = linalg::extreme_rays(&cone_gens, affine_dim + 1)?;
            let facets: Vec<Facet> = normals.iter().map(|h| homogeneous_to_facet(h)).collect();
            let verts: Vec<Vec<i64>> = pts
                .iter()
                .filter(|p| {
                    let q = project(p);
                    let tight: Vec<Vec<Int>> = facets
                        .iter()
                        .filter(|f| f.value(&q) == 0)
                        .map(|f| to_big(&f.normal))
                        .collect();
                    linalg::rank_of_rows(&tight) == affine_dim
                })
                .cloned()
                .collect();
            (verts, facets)
        };
        Ok(Self {
            dim,
            vertices,
            affine_dim,
            base,
            equations,
            chart,
            chart_facets,
        })
    }

    pub fn from_json(j: &PolytopeJson) -> Result<Self, PolytopeError> {
        Self::new(j.dim, &j.vertices)
    }

    pub fn to_json(&self) -> PolytopeJson {
        PolytopeJson {
            dim: self.dim,
            vertices: self.vertices.clone(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Vertices in lexicographic order.
    pub fn vertices(&self) -> &[Vec<i64>] {
        &self.vertices
    }

    pub fn affine_dim(&self) -> usize {
        self.affine_dim
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.affine_dim == self.dim
    }

    /// Irredundant facet description; requires full dimension.
    pub fn facets(&self) -> Result<&[Facet], PolytopeError> {
        if !self.is_full_dimensional() {
            return Err(PolytopeError::NotFullDimensional {
                affine_dim: self.affine_dim,
                dim: self.dim,
            });
        }
        Ok(&self.chart_facets)
    }

    pub fn contains(&self, u: &[i64]) -> bool {
        if u.len() != self.dim {
            return false;
        }
        let d: Vec<Int> = u
            .iter()
            .zip(&self.base)
            .map(|(a, b)| Int::from(a - b))
            .collect();
        if self.equations.iter().any(|e| !linalg::dot(e, &d).is_zero()) {
            return false;
        }
        let q: Vec<i64> = self.chart.iter().map(|&c| u[c]).collect();
        self.chart_facets.iter().all(|f| f.value(&q) >= 0)
    }

    /// Rational containment, used for dual vertices and barycentres.
    pub fn contains_rat(&self, u: &[Rat]) -> bool {
        if u.len() != self.dim {
            return false;
        }
        let d: Vec<Rat> = u
            .iter()
            .zip(&self.base)
            .map(|(a, b)| a - Rat::from_integer(Int::from(*b)))
            .collect();
        let eq_ok = self.equations.iter().all(|e| {
            e.iter()
                .zip(&d)
                .fold(Rat::zero(), |s, (x, y)| {
                    s + Rat::from_integer(x.clone()) * y
                })
                .is_zero()
        });
        eq_ok
            && self.chart_facets.iter().all(|f| {
                let s = self
                    .chart
                    .iter()
                    .zip(&f.normal)
                    .fold(Rat::from_integer(Int::from(f.offset)), |s, (&c, &m)| {
                        s + &u[c] * Rat::from_integer(Int::from(m))
                    });
                !s.is_negative()
            })
    }

    pub fn origin_is_interior(&self) -> bool {
        self.is_full_dimensional() && self.chart_facets.iter().all(|f| f.offset > 0)
    }

    /// All facet offsets equal 1.
    pub fn is_reflexive(&self) -> Result<bool, PolytopeError> {
        let facets = self.facets()?;
        if !self.origin_is_interior() {
            return Err(PolytopeError::OriginNotInterior);
        }
        Ok(facets.iter().all(|f| f.offset == 1))
    }

    /// Vertices `m_F / c_F` of the polar dual `{u : <m, u> >= -1 for m in P}`.
    pub fn dual_vertices(&self) -> Result<Vec<Vec<Rat>>, PolytopeError> {
        let facets = self.facets()?;
        if !self.origin_is_interior() {
            return Err(PolytopeError::OriginNotInterior);
        }
        let mut out: Vec<Vec<Rat>> = facets
            .iter()
            .map(|f| {
                f.normal
                    .iter()
                    .map(|&m| Rat::new(Int::from(m), Int::from(f.offset)))
                    .collect()
            })
            .collect();
        out.sort();
        Ok(out)
    }

    /// Polar dual as a lattice polytope; errors when a dual vertex is not integral.
    pub fn dual(&self) -> Result<LatticePolytope, PolytopeError> {
        let verts = self.dual_vertices()?;
        let mut int_verts = Vec::with_capacity(verts.len());
        for v in verts {
            if v.iter().any(|x| !x.is_integer()) {
                let s: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                return Err(PolytopeError::NonIntegralDual(format!(
                    "({})",
                    s.join(", ")
                )));
            }
            int_verts.push(v.iter().map(|x| x.to_integer().to_i64().unwrap()).collect());
        }
        LatticePolytope::new(self.dim, &int_verts)
    }

    /// `Z^n ∩ P` in lexicographic order.
    pub fn lattice_points(&self) -> Vec<Vec<i64>> {
        let lo: Vec<i64> = (0..self.dim)
            .map(|k| self.vertices.iter().map(|v| v[k]).min().unwrap())
            .collect();
        let hi: Vec<i64> = (0..self.dim)
            .map(|k| self.vertices.iter().map(|v| v[k]).max().unwrap())
            .collect();
        if self.dim == 0 {
            return vec![vec![]];
        }
        (0..self.dim)
            .map(|k| lo[k]..=hi[k])
            .multi_cartesian_product()
            .filter(|p| self.contains(p))
            .collect()
    }

    pub fn interior_lattice_points(&self) -> Result<Vec<Vec<i64>>, PolytopeError> {
        let facets = self.facets()?;
        Ok(self
            .lattice_points()
            .into_iter()
            .filter(|p| facets.iter().all(|f| f.value(p) > 0))
            .collect())
    }

    pub fn minkowski_sum(&self, other: &LatticePolytope) -> Result<LatticePolytope, PolytopeError> {
        if self.dim != other.dim {
            return Err(PolytopeError::DimensionMismatch {
                point: other.vertices[0].clone(),
                expected: self.dim,
                got: other.dim,
            });
        }
        let sums: Vec<Vec<i64>> = self
            .vertices
            .iter()
            .cartesian_product(&other.vertices)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect())
            .collect();
        LatticePolytope::new(self.dim, &sums)
    }

    /// Convex hull of the union, `Conv(P, Q, ...)`.
    pub fn convex_hull_of(dim: usize, polys: &[&LatticePolytope]) -> Result<Self, PolytopeError> {
        let pts: Vec<Vec<i64>> = polys.iter().flat_map(|p| p.vertices.clone()).collect();
        LatticePolytope::new(dim, &pts)
    }

    /// Vertex indices on each facet.
    pub fn facet_vertex_sets(&self) -> Result<Vec<BTreeSet<usize>>, PolytopeError> {
        let facets = self.facets()?;
        Ok(facets
            .iter()
            .map(|f| {
                self.vertices
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| f.value(v) == 0)
                    .map(|(i, _)| i)
                    .collect()
            })
            .collect())
    }

    /// Normalized volume `n! vol(P)` via a pulling triangulation.
    pub fn normalized_volume(&self) -> Result<Int, PolytopeError> {
        let simplices = self.pulling_triangulation()?;
        Ok(simplices
            .iter()
            .map(|s| {
                simplex_volume(
                    &s.iter()
                        .map(|&i| self.vertices[i].clone())
                        .collect::<Vec<_>>(),
                )
            })
            .sum())
    }

    /// Pulling triangulation: each face is coned from its lowest-index vertex.
    ///
    /// Returns simplices as vertex-index lists.
    pub fn pulling_triangulation(&self) -> Result<Vec<Vec<usize>>, PolytopeError> {
        let facet_sets = self.facet_vertex_sets()?;
        let all: BTreeSet<usize> = (0..self.vertices.len()).collect();
        let mut out = Vec::new();
        self.pull_face(&all, self.dim, &facet_sets, &mut Vec::new(), &mut out);
        Ok(out)
    }

    fn pull_face(
        &self,
        face: &BTreeSet<usize>,
        face_dim: usize,
        facet_sets: &[BTreeSet<usize>],
        apexes: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if face_dim == 0 {
            let mut s = apexes.clone();
            s.push(*face.iter().next().unwrap());
            out.push(s);
            return;
        }
        let v0 = *face.iter().next().unwrap();
        let mut subfaces: Vec<BTreeSet<usize>> = facet_sets
            .iter()
            .map(|g| face.intersection(g).copied().collect::<BTreeSet<usize>>())
            .filter(|s: &BTreeSet<usize>| !s.contains(&v0) && !s.is_empty())
            .filter(|s| self.affine_rank(s) == face_dim - 1)
            .collect();
        subfaces.sort();
        subfaces.dedup();
        apexes.push(v0);
        for s in &subfaces {
            self.pull_face(s, face_dim - 1, facet_sets, apexes, out);
        }
        apexes.pop();
    }

    fn affine_rank(&self, idx: &BTreeSet<usize>) -> usize {
        let pts: Vec<&Vec<i64>> = idx.iter().map(|&i| &self.vertices[i]).collect();
        let rows: Vec<Vec<Int>> = pts[1..]
            .iter()
            .map(|p| {
                p.iter()
                    .zip(pts[0])
                    .map(|(a, b)| Int::from(a - b))
                    .collect()
            })
            .collect();
        linalg::rank_of_rows(&rows)
    }

    /// Image under `u -> g u + t` for an integer matrix `g` given by rows.
    pub fn transform(&self, g: &[Vec<i64>], t: &[i64]) -> Result<LatticePolytope, PolytopeError> {
        let pts: Vec<Vec<i64>> = self
            .vertices
            .iter()
            .map(|v| {
                g.iter()
                    .zip(t)
                    .map(|(row, ti)| dot_i64(row, v) + ti)
                    .collect()
            })
            .collect();
        LatticePolytope::new(self.dim, &pts)
    }
}

fn homogeneous_to_facet(h: &[Int]) -> Facet {
    let mut normal: Vec<Int> = h[1..].to_vec();
    let g = normal
        .iter()
        .fold(Int::zero(), |g, x| num_integer::Integer::gcd(&g, x));
    let offset = if g.is_zero() {
        h[0].clone()
    } else {
        for x in normal.iter_mut() {
            *x = &*x / &g;
        }
        &h[0] / &g
    };
    Facet {
        normal: normal.iter().map(|x| x.to_i64().unwrap()).collect(),
        offset: offset.to_i64().unwrap(),
    }
}

/// `|det(v_1 - v_0, ..., v_n - v_0)|` for `n + 1` points in `Z^n`.
pub fn simplex_volume(pts: &[Vec<i64>]) -> Int {
    let rows: Vec<Vec<i64>> = pts[1..]
        .iter()
        .map(|p| p.iter().zip(&pts[0]).map(|(a, b)| a - b).collect())
        .collect();
    IntMatrix::from_i64_rows(&rows).determinant().abs()
}
