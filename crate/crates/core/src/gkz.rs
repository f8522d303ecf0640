//! The GKZ system of a nef-partition: Cayley matrix, operators, facets of the
//! column cone, non-resonance and holonomic rank.

use std::collections::BTreeMap;

use itertools::Itertools;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::linalg::{
    cone_facets, dot_i64, generates_full_lattice, rank_of_rat_rows, solve_square, to_big, to_rat,
    ConeV, Int, IntMatrix, LinalgError, Rat,
};
use crate::nef::{NefPartition, Regime};
use crate::polytope::{simplex_volume, LatticePolytope, PolytopeError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GkzError {
    #[error("fan is neither smooth nor are its rays generating the lattice")]
    UnsupportedFan,
    #[error("columns of A do not generate the lattice")]
    ColumnsNotGenerating,
    #[error("all-ones vector is not in the row span of A")]
    NotHomogeneous,
    #[error("facet classification violated by normal {0:?}")]
    FacetClassification(Vec<i64>),
    #[error("union-cones violated: {0}")]
    UnionCones(String),
    #[error("point is not in the cone")]
    NotInCone,
    #[error("beta has length {got}, expected {expected}")]
    BetaLength { expected: usize, got: usize },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
}

/// Column label `(i, j)`: part `i >= 1`, position `j >= 0` (0 is the zero ray).
pub type Label = (usize, usize);

#[derive(Debug, Clone)]
pub struct GkzSystem {
    r: usize,
    n: usize,
    labels: Vec<Label>,
    /// Fan ray index of each column, `None` for `j = 0`.
    column_rays: Vec<Option<usize>>,
    columns: Vec<Vec<i64>>,
    beta: Vec<Rat>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EulerOperator {
    pub index: usize,
    pub coeffs: Vec<i64>,
    pub beta: Rat,
}

/// `∂^{ν₊} - ∂^{ν₋}`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct BoxOperator {
    pub plus: Vec<u32>,
    pub minus: Vec<u32>,
}

impl BoxOperator {
    pub fn order(&self) -> u32 {
        self.plus.iter().sum()
    }
}

/// A primitive facet normal `(e_j, m)` of the column cone.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CayleyFacet {
    pub normal: Vec<i64>,
    /// `j`, 1-based.
    pub part: usize,
    pub m: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResonanceCertificate {
    pub non_resonant: bool,
    pub pairings: Vec<(Vec<i64>, Rat)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankReport {
    pub volume: u64,
    pub max_cones: usize,
    /// False when the two-way comparison does not apply (non-smooth fan).
    pub cross_checked: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnionConesReport {
    pub total_volume: u64,
    pub piece_volumes: Vec<u64>,
}

pub fn half() -> Rat {
    Rat::new(Int::from(1), Int::from(2))
}

/// Builds `A` with columns `μ_{i,j} = (e_i, ρ_{i,j})` and `β = (-1/2, ..., 0, ...)`.
pub fn build_cayley_gkz(npd: &NefPartition) -> Result<GkzSystem, GkzError> {
    if npd.regime() == Regime::Unsupported {
        return Err(GkzError::UnsupportedFan);
    }
    let r = npd.r();
    let n = npd.dim();
    let mut labels = Vec::new();
    let mut column_rays = Vec::new();
    let mut columns = Vec::new();
    for (i, part) in npd.parts().iter().enumerate() {
        let mut e = vec![0i64; r];
        e[i] = 1;
        labels.push((i + 1, 0));
        column_rays.push(None);
        columns.push([e.clone(), vec![0; n]].concat());
        for (j, &ray) in part.iter().enumerate() {
            labels.push((i + 1, j + 1));
            column_rays.push(Some(ray));
            columns.push([e.clone(), npd.fan().rays()[ray].clone()].concat());
        }
    }
    let mut beta = vec![-half(); r];
    beta.extend(std::iter::repeat_n(Rat::zero(), n));
    let g = GkzSystem {
        r,
        n,
        labels,
        column_rays,
        columns,
        beta,
    };
    if !generates_full_lattice(&g.matrix()) {
        return Err(GkzError::ColumnsNotGenerating);
    }
    if !g.is_homogeneous() {
        return Err(GkzError::NotHomogeneous);
    }
    Ok(g)
}

impl GkzSystem {
    pub fn r(&self) -> usize {
        self.r
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_columns(&self) -> usize {
        self.columns.len()
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn column_rays(&self) -> &[Option<usize>] {
        &self.column_rays
    }

    pub fn columns(&self) -> &[Vec<i64>] {
        &self.columns
    }

    pub fn beta(&self) -> &[Rat] {
        &self.beta
    }

    /// `A` as an `(r + n) x (r + p)` matrix.
    pub fn matrix(&self) -> IntMatrix {
        IntMatrix::from_i64_rows(&self.columns).transpose()
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        (0..self.r + self.n)
            .map(|k| self.columns.iter().map(|c| c[k]).collect())
            .collect()
    }

    /// Column index of label `(i, j)`.
    pub fn column_of(&self, label: Label) -> Option<usize> {
        self.labels.iter().position(|&l| l == label)
    }

    /// Column index of a fan ray.
    pub fn column_of_ray(&self, ray: usize) -> Option<usize> {
        self.column_rays.iter().position(|&c| c == Some(ray))
    }

    /// Same system with another exponent.
    pub fn with_beta(&self, beta: Vec<Rat>) -> Result<GkzSystem, GkzError> {
        if beta.len() != self.r + self.n {
            return Err(GkzError::BetaLength {
                expected: self.r + self.n,
                got: beta.len(),
            });
        }
        Ok(GkzSystem {
            beta,
            ..self.clone()
        })
    }

    /// Moves column `col` into block `block` (0-based) without re-validating.
    /// Intended for adversarial checks.
    pub fn with_column_moved(&self, col: usize, block: usize) -> GkzSystem {
        let mut g = self.clone();
        for k in 0..self.r {
            g.columns[col][k] = i64::from(k == block);
        }
        g
    }

    pub fn is_homogeneous(&self) -> bool {
        let rows: Vec<Vec<Rat>> = self.rows().iter().map(|r| to_rat(r)).collect();
        let mut with_ones = rows.clone();
        with_ones.push(vec![Rat::one(); self.columns.len()]);
        rank_of_rat_rows(&rows) == rank_of_rat_rows(&with_ones)
    }

    pub fn euler_operators(&self) -> Vec<EulerOperator> {
        self.rows()
            .into_iter()
            .enumerate()
            .map(|(index, coeffs)| EulerOperator {
                index,
                coeffs,
                beta: self.beta[index].clone(),
            })
            .collect()
    }

    /// All `∂^{ν₊} - ∂^{ν₋}` with `A ν₊ = A ν₋`, disjoint supports and
    /// `|ν₊| <= degmax`; `ν₊` is the lexicographically larger side.
    pub fn box_operators_up_to(&self, degmax: u32) -> Vec<BoxOperator> {
        let p = self.columns.len();
        let mut groups: BTreeMap<Vec<i64>, Vec<Vec<u32>>> = BTreeMap::new();
        for d in 1..=degmax as usize {
            for multiset in (0..p).combinations_with_replacement(d) {
                let mut v = vec![0u32; p];
                for c in multiset {
                    v[c] += 1;
                }
                let image: Vec<i64> = (0..self.r + self.n)
                    .map(|k| (0..p).map(|c| self.columns[c][k] * i64::from(v[c])).sum())
                    .collect();
                groups.entry(image).or_default().push(v);
            }
        }
        let mut out = Vec::new();
        for vs in groups.values() {
            for (a, b) in vs.iter().tuple_combinations() {
                if a.iter().zip(b).any(|(x, y)| *x > 0 && *y > 0) {
                    continue;
                }
                let (plus, minus) = if a > b { (a, b) } else { (b, a) };
                out.push(BoxOperator {
                    plus: plus.clone(),
                    minus: minus.clone(),
                });
            }
        }
        out.sort();
        out
    }

    /// Primitive inner facet normals of the cone over the columns.
    pub fn cone_normals(&self) -> Result<Vec<Vec<i64>>, GkzError> {
        let gens: Vec<Vec<Int>> = self.columns.iter().map(|c| to_big(c)).collect();
        let h = cone_facets(&ConeV::new(self.r + self.n, gens))?;
        Ok(h.normals
            .iter()
            .map(|v| v.iter().map(|x| x.to_i64().unwrap()).collect())
            .collect())
    }

    /// Facet normals, each checked to have the form `(e_j, m)`.
    pub fn facet_normals_ra(&self) -> Result<Vec<CayleyFacet>, GkzError> {
        self.cone_normals()?
            .into_iter()
            .map(|h| {
                let head = &h[..self.r];
                let nonzero: Vec<usize> = (0..self.r).filter(|&k| head[k] != 0).collect();
                if nonzero.len() != 1 || head[nonzero[0]] != 1 {
                    return Err(GkzError::FacetClassification(h));
                }
                Ok(CayleyFacet {
                    part: nonzero[0] + 1,
                    m: h[self.r..].to_vec(),
                    normal: h,
                })
            })
            .collect()
    }

    /// `β` is non-resonant iff `<h, β>` is not an integer for every primitive
    /// facet normal `h`. Since the columns generate the lattice, `<h, Z^d> = Z`
    /// for primitive `h`, so `β ∈ CF + Z^d` reduces to `<h, β> ∈ Z`.
    pub fn non_resonance_check(&self) -> Result<ResonanceCertificate, GkzError> {
        let pairings: Vec<(Vec<i64>, Rat)> = self
            .cone_normals()?
            .into_iter()
            .map(|h| {
                let s = h.iter().zip(&self.beta).fold(Rat::zero(), |acc, (&a, b)| {
                    acc + Rat::from_integer(Int::from(a)) * b
                });
                (h, s)
            })
            .collect();
        let non_resonant = pairings.iter().all(|(_, s)| !s.is_integer());
        Ok(ResonanceCertificate {
            non_resonant,
            pairings,
        })
    }

    /// `Conv(A ∪ {0})`.
    pub fn column_polytope(&self) -> Result<LatticePolytope, GkzError> {
        let mut pts = self.columns.clone();
        pts.push(vec![0; self.r + self.n]);
        Ok(LatticePolytope::new(self.r + self.n, &pts)?)
    }

    /// Normalized volume of `Conv(A ∪ {0})`, compared with the maximal-cone count.
    pub fn holonomic_rank(&self, npd: &NefPartition) -> Result<RankReport, GkzError> {
        let volume = self.column_polytope()?.normalized_volume()?;
        let volume = volume.to_u64().expect("volume fits in u64");
        let max_cones = npd.fan().max_cones().len();
        let cross_checked = npd.regime() == Regime::Smooth;
        if cross_checked && volume != max_cones as u64 {
            return Err(GkzError::UnionCones(format!(
                "volume {volume} differs from {max_cones} maximal cones"
            )));
        }
        Ok(RankReport {
            volume,
            max_cones,
            cross_checked,
        })
    }

    /// Generators of `σ̂` as column indices: lifted rays of `σ` and the zero-ray columns.
    fn sigma_hat_columns(&self, cone: &[usize]) -> Vec<usize> {
        let mut cols: Vec<usize> = (0..self.r)
            .map(|i| self.column_of((i + 1, 0)).unwrap())
            .collect();
        cols.extend(cone.iter().map(|&ray| self.column_of_ray(ray).unwrap()));
        cols
    }

    /// Checks that the simplices `Poly(σ̂)` (with apex 0) lie in `Conv(A ∪ {0})`,
    /// that their volumes add up to its volume, and that the cones `σ̂` cover
    /// every column while staying inside the column cone.
    pub fn verify_union_cones(&self, npd: &NefPartition) -> Result<UnionConesReport, GkzError> {
        let d = self.r + self.n;
        let total = self.column_polytope()?;
        let normals = self.cone_normals()?;
        let cones = npd.fan().max_cones();
        let pieces: Vec<Result<u64, GkzError>> = cones
            .par_iter()
            .map(|cone| {
                let cols = self.sigma_hat_columns(cone);
                let mut pts = vec![vec![0i64; d]];
                for &c in &cols {
                    let v = &self.columns[c];
                    if !total.contains(v) {
                        return Err(GkzError::UnionCones(format!(
                            "vertex {v:?} outside Conv(A ∪ 0)"
                        )));
                    }
                    if normals.iter().any(|h| dot_i64(h, v) < 0) {
                        return Err(GkzError::UnionCones(format!(
                            "generator {v:?} outside the column cone"
                        )));
                    }
                    pts.push(v.clone());
                }
                Ok(simplex_volume(&pts).to_u64().unwrap())
            })
            .collect();
        let piece_volumes = pieces.into_iter().collect::<Result<Vec<u64>, _>>()?;

        for (c, col) in self.columns.iter().enumerate() {
            let covered = cones.iter().any(|cone| {
                let gens = self.sigma_hat_columns(cone);
                let m: Vec<Vec<Rat>> = (0..d)
                    .map(|k| {
                        gens.iter()
                            .map(|&g| Rat::from_integer(Int::from(self.columns[g][k])))
                            .collect()
                    })
                    .collect();
                solve_square(&m, &to_rat(col))
                    .map(|x| x.iter().all(|v| !v.is_negative()))
                    .unwrap_or(false)
            });
            if !covered {
                return Err(GkzError::UnionCones(format!(
                    "column {:?} = {:?} lies in no σ̂",
                    self.labels[c], col
                )));
            }
        }

        let total_volume = total.normalized_volume()?.to_u64().unwrap();
        let sum: u64 = piece_volumes.iter().sum();
        if sum != total_volume {
            return Err(GkzError::UnionCones(format!(
                "piece volumes sum to {sum}, Conv(A ∪ 0) has volume {total_volume}"
            )));
        }
        Ok(UnionConesReport {
            total_volume,
            piece_volumes,
        })
    }

    /// `(-φ_1(u), ..., -φ_r(u), u)` for `u` in maximal cone `cone`, checked
    /// against `Σ u_k ρ̂_k`.
    pub fn lift_to_cayley(
        &self,
        npd: &NefPartition,
        cone: usize,
        u: &[Rat],
    ) -> Result<Vec<Rat>, GkzError> {
        let rays = &npd.fan().max_cones()[cone];
        let m: Vec<Vec<Rat>> = (0..self.n)
            .map(|k| {
                rays.iter()
                    .map(|&ray| Rat::from_integer(Int::from(npd.fan().rays()[ray][k])))
                    .collect()
            })
            .collect();
        let coef = solve_square(&m, u).map_err(|_| GkzError::NotInCone)?;
        if coef.iter().any(|c| c.is_negative()) {
            return Err(GkzError::NotInCone);
        }
        let mut lifted: Vec<Rat> = npd
            .cartier()
            .iter()
            .map(|cd| {
                let mi = &cd.m[cone];
                -mi.iter().zip(u).fold(Rat::zero(), |s, (&a, b)| {
                    s + Rat::from_integer(Int::from(a)) * b
                })
            })
            .collect();
        lifted.extend(u.iter().cloned());
        let mut sum = vec![Rat::zero(); self.r + self.n];
        for (c, &ray) in coef.iter().zip(rays) {
            let col = &self.columns[self.column_of_ray(ray).unwrap()];
            for (s, &x) in sum.iter_mut().zip(col) {
                *s += c * Rat::from_integer(Int::from(x));
            }
        }
        assert_eq!(sum, lifted, "lifting lemma failed");
        Ok(lifted)
    }
}
