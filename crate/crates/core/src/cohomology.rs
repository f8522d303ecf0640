//! Cohomology of a smooth complete toric variety as the Stanley-Reisner ring
//! modulo linear relations, with divisor classes and wall curve classes.

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::fan::{Fan, FanError};
use crate::gkz::GkzSystem;
use crate::linalg::{
    cone_contains, cone_facets, primitive_from_rat, rational_nullspace, rref, to_i64, ConeH, ConeV,
    Int, LinalgError, Rat,
};
use crate::nef::NefPartition;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CohomologyError {
    #[error("fan must be complete, simplicial and smooth")]
    BadFan,
    #[error("ring has dimension {got}, expected {expected} maximal cones")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("non-square-free monomial survived elimination in degree {0}")]
    NotSquareFree(usize),
    #[error("wall relation has a zero off-wall coefficient")]
    DegenerateWall,
    #[error("curve class {0:?} pairs negatively with a nef divisor")]
    NotEffective(Vec<i64>),
    #[error(transparent)]
    Fan(#[from] FanError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// A monomial as a sorted multiset of ray indices.
type Monomial = Vec<usize>;

#[derive(Debug, Clone)]
struct Graded {
    /// Cone-supported monomials of this degree, in column order.
    columns: Vec<Monomial>,
    index: BTreeMap<Monomial, usize>,
    /// Reduced relation rows and their pivot columns.
    rows: Vec<Vec<Rat>>,
    pivots: Vec<usize>,
    /// Columns forming the basis, with their global basis index.
    free: Vec<(usize, usize)>,
}

#[derive(Debug, Clone)]
pub struct CohomRing {
    nrays: usize,
    dim: usize,
    basis: Vec<Monomial>,
    degrees: Vec<usize>,
    graded: Vec<Graded>,
    /// `table[a][b]` = basis coordinates of `basis[a] * basis[b]`.
    table: Vec<Vec<CohomClass>>,
    top_scale: Rat,
    faces: BTreeSet<Vec<usize>>,
}

/// Coordinates over the monomial basis.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CohomClass(pub Vec<Rat>);

impl CohomClass {
    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn add(&self, other: &CohomClass) -> CohomClass {
        CohomClass(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &CohomClass) -> CohomClass {
        CohomClass(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, c: &Rat) -> CohomClass {
        CohomClass(self.0.iter().map(|a| a * c).collect())
    }

    pub fn neg(&self) -> CohomClass {
        CohomClass(self.0.iter().map(|a| -a).collect())
    }
}

/// `ℓ` indexed by GKZ columns, with `ℓ_{i,0} = -Σ_j ℓ_{i,j}`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CurveClassLift {
    pub l: Vec<i64>,
}

impl CurveClassLift {
    /// Lifts a relation `Σ b_ρ ρ = 0` on the rays.
    pub fn from_ray_relation(g: &GkzSystem, b: &[i64]) -> CurveClassLift {
        let mut l = vec![0i64; g.num_columns()];
        for (c, ray) in g.column_rays().iter().enumerate() {
            if let Some(ray) = ray {
                l[c] = b[*ray];
                let (i, _) = g.labels()[c];
                let zero_col = g.column_of((i, 0)).unwrap();
                l[zero_col] -= b[*ray];
            }
        }
        CurveClassLift { l }
    }

    /// `Σ_i E_i·ℓ = -Σ_i ℓ_{i,0}`.
    pub fn degree(&self, g: &GkzSystem) -> i64 {
        g.labels()
            .iter()
            .zip(&self.l)
            .filter(|((_, j), _)| *j == 0)
            .map(|(_, x)| -x)
            .sum()
    }

    pub fn in_kernel(&self, g: &GkzSystem) -> bool {
        g.rows()
            .iter()
            .all(|row| row.iter().zip(&self.l).map(|(a, b)| a * b).sum::<i64>() == 0)
    }
}

fn monomials_of_degree(nrays: usize, k: usize) -> impl Iterator<Item = Monomial> {
    (0..nrays).combinations_with_replacement(k)
}

fn support(m: &[usize]) -> Vec<usize> {
    m.iter().copied().dedup().collect()
}

fn is_square_free(m: &[usize]) -> bool {
    m.windows(2).all(|w| w[0] != w[1])
}

fn merge(a: &[usize], b: &[usize]) -> Monomial {
    let mut m: Vec<usize> = a.iter().chain(b).copied().collect();
    m.sort();
    m
}

/// Builds `H^•(X)` for a smooth complete fan.
pub fn build_ring(fan: &Fan) -> Result<CohomRing, CohomologyError> {
    let p = fan.predicates();
    if !(p.complete && p.simplicial && p.smooth) {
        return Err(CohomologyError::BadFan);
    }
    let n = fan.dim();
    let nrays = fan.rays().len();
    let mut faces = BTreeSet::new();
    for cone in fan.max_cones() {
        for k in 0..=cone.len() {
            for f in cone.iter().copied().combinations(k) {
                faces.insert(f);
            }
        }
    }

    let mut basis = Vec::new();
    let mut degrees = Vec::new();
    let mut graded: Vec<Graded> = Vec::new();
    for k in 0..=n {
        // Non-square-free first, then square-free in descending lex order, so
        // elimination keeps the lex-smallest square-free monomials.
        let supported: Vec<Monomial> = monomials_of_degree(nrays, k)
            .filter(|m| faces.contains(&support(m)))
            .collect();
        let mut columns: Vec<Monomial> = supported
            .iter()
            .filter(|m| !is_square_free(m))
            .cloned()
            .collect();
        let mut sq: Vec<Monomial> = supported
            .iter()
            .filter(|m| is_square_free(m))
            .cloned()
            .collect();
        sq.reverse();
        columns.extend(sq);
        let index: BTreeMap<Monomial, usize> = columns
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, m)| (m, i))
            .collect();

        let mut rows: Vec<Vec<Rat>> = Vec::new();
        if k > 0 {
            for prev in &graded[k - 1].columns {
                for t in 0..n {
                    let mut row = vec![Rat::zero(); columns.len()];
                    for (rho, ray) in fan.rays().iter().enumerate() {
                        if ray[t] == 0 {
                            continue;
                        }
                        let m = merge(prev, &[rho]);
                        if let Some(&c) = index.get(&m) {
                            row[c] += Rat::from_integer(Int::from(ray[t]));
                        }
                    }
                    if row.iter().any(|x| !x.is_zero()) {
                        rows.push(row);
                    }
                }
            }
        }
        let pivots = rref(&mut rows);
        let pivot_set: BTreeSet<usize> = pivots.iter().copied().collect();
        let mut free = Vec::new();
        for c in (0..columns.len()).rev() {
            if !pivot_set.contains(&c) {
                if !is_square_free(&columns[c]) {
                    return Err(CohomologyError::NotSquareFree(k));
                }
                free.push((c, basis.len()));
                basis.push(columns[c].clone());
                degrees.push(k);
            }
        }
        graded.push(Graded {
            columns,
            index,
            rows,
            pivots,
            free,
        });
    }
    if basis.len() != fan.max_cones().len() {
        return Err(CohomologyError::DimensionMismatch {
            expected: fan.max_cones().len(),
            got: basis.len(),
        });
    }

    let mut ring = CohomRing {
        nrays,
        dim: n,
        basis,
        degrees,
        graded,
        table: Vec::new(),
        top_scale: Rat::one(),
        faces,
    };
    // The class of a point (any maximal cone monomial) has integral 1.
    let point = ring.monomial_class(&fan.max_cones()[0]);
    let top = ring.basis.len() - 1;
    ring.top_scale = Rat::one() / &point.0[top];
    let b = ring.basis.clone();
    ring.table = b
        .iter()
        .map(|x| {
            b.iter()
                .map(|y| ring.monomial_class(&merge(x, y)))
                .collect()
        })
        .collect();
    Ok(ring)
}

impl CohomRing {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn variety_dim(&self) -> usize {
        self.dim
    }

    pub fn nrays(&self) -> usize {
        self.nrays
    }

    /// Basis monomials as sorted ray-index sets.
    pub fn basis(&self) -> &[Vec<usize>] {
        &self.basis
    }

    pub fn degree_of(&self, b: usize) -> usize {
        self.degrees[b]
    }

    pub fn zero(&self) -> CohomClass {
        CohomClass(vec![Rat::zero(); self.basis.len()])
    }

    pub fn one(&self) -> CohomClass {
        self.monomial_class(&[])
    }

    /// Normal form of a monomial in the ray variables.
    pub fn monomial_class(&self, m: &[usize]) -> CohomClass {
        let mut m = m.to_vec();
        m.sort();
        let mut out = self.zero();
        let k = m.len();
        if k > self.dim || !self.faces.contains(&support(&m)) {
            return out;
        }
        let g = &self.graded[k];
        let c = g.index[&m];
        if let Some(r) = g.pivots.iter().position(|&p| p == c) {
            for &(col, b) in &g.free {
                out.0[b] = -&g.rows[r][col];
            }
        } else {
            let &(_, b) = g.free.iter().find(|(col, _)| *col == c).unwrap();
            out.0[b] = Rat::one();
        }
        out
    }

    pub fn divisor_class(&self, ray: usize) -> CohomClass {
        self.monomial_class(&[ray])
    }

    /// `D_{i,0} = -Σ_j D_{i,j}` for part `i` (0-based).
    pub fn part_zero_class(&self, npd: &NefPartition, i: usize) -> CohomClass {
        npd.parts()[i]
            .iter()
            .fold(self.zero(), |acc, &ray| acc.sub(&self.divisor_class(ray)))
    }

    pub fn multiply(&self, a: &CohomClass, b: &CohomClass) -> CohomClass {
        let mut out = self.zero();
        for (i, x) in a.0.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.0.iter().enumerate() {
                if y.is_zero() || self.degrees[i] + self.degrees[j] > self.dim {
                    continue;
                }
                let xy = x * y;
                for (o, t) in out.0.iter_mut().zip(&self.table[i][j].0) {
                    if !t.is_zero() {
                        *o += &xy * t;
                    }
                }
            }
        }
        out
    }

    /// Basis coordinates of `basis[i] * basis[j]`.
    pub fn basis_product(&self, i: usize, j: usize) -> &CohomClass {
        &self.table[i][j]
    }

    pub fn power(&self, a: &CohomClass, k: usize) -> CohomClass {
        (0..k).fold(self.one(), |acc, _| self.multiply(&acc, a))
    }

    /// Least `k` with `a^k = 0`, or `None` when `a` has a unit part.
    pub fn nilpotency_order(&self, a: &CohomClass) -> Option<usize> {
        if !a.0[0].is_zero() {
            return if a.is_zero() { Some(1) } else { None };
        }
        let mut p = self.one();
        for k in 1..=self.dim + 1 {
            p = self.multiply(&p, a);
            if p.is_zero() {
                return Some(k);
            }
        }
        None
    }

    /// Integral of the top-degree component.
    pub fn integral(&self, a: &CohomClass) -> Rat {
        &a.0[self.basis.len() - 1] * &self.top_scale
    }

    /// Human-readable name of a basis element, e.g. `D3*D7`.
    pub fn basis_name(&self, b: usize) -> String {
        if self.basis[b].is_empty() {
            "1".to_string()
        } else {
            self.basis[b].iter().map(|r| format!("D{r}")).join("*")
        }
    }
}

/// Primitive wall relations, lifted to GKZ columns. Walls with the same
/// relation give one generator.
pub fn mori_generators(
    npd: &NefPartition,
    g: &GkzSystem,
) -> Result<Vec<CurveClassLift>, CohomologyError> {
    let fan = npd.fan();
    let nrays = fan.rays().len();
    let mut out = BTreeSet::new();
    for wall in fan.walls()? {
        let mut rays = wall.rays.clone();
        rays.push(wall.off.0);
        rays.push(wall.off.1);
        let rows: Vec<Vec<Rat>> = (0..fan.dim())
            .map(|k| {
                rays.iter()
                    .map(|&r| Rat::from_integer(Int::from(fan.rays()[r][k])))
                    .collect()
            })
            .collect();
        let ns = rational_nullspace(&rows, rays.len());
        if ns.len() != 1 {
            return Err(CohomologyError::DegenerateWall);
        }
        let mut v = primitive_from_rat(&ns[0]);
        let k = rays.len();
        if v[k - 1].is_zero()
            || v[k - 2].is_zero()
            || v[k - 1].is_positive() != v[k - 2].is_positive()
        {
            return Err(CohomologyError::DegenerateWall);
        }
        if v[k - 1].is_negative() {
            v.iter_mut().for_each(|x| *x = -x.clone());
        }
        let mut b = vec![0i64; nrays];
        for (&r, x) in rays.iter().zip(&v) {
            b[r] = to_i64(x)?;
        }
        let lift = CurveClassLift::from_ray_relation(g, &b);
        if g.labels()
            .iter()
            .zip(&lift.l)
            .any(|((_, j), x)| *j == 0 && *x > 0)
        {
            return Err(CohomologyError::NotEffective(lift.l));
        }
        debug_assert!(lift.in_kernel(g));
        out.insert(lift);
    }
    Ok(out.into_iter().collect())
}

/// The cone spanned by the wall classes, in coordinates on a complement of
/// the pivot columns of `A`.
#[derive(Debug, Clone)]
pub struct MoriCone {
    coords: Vec<usize>,
    h: ConeH,
}

impl MoriCone {
    pub fn new(g: &GkzSystem, gens: &[CurveClassLift]) -> Result<Self, CohomologyError> {
        let mut rows: Vec<Vec<Rat>> = g
            .rows()
            .iter()
            .map(|r| r.iter().map(|&x| Rat::from_integer(Int::from(x))).collect())
            .collect();
        let pivots: BTreeSet<usize> = rref(&mut rows).into_iter().collect();
        let coords: Vec<usize> = (0..g.num_columns())
            .filter(|c| !pivots.contains(c))
            .collect();
        let gens: Vec<Vec<Int>> = gens
            .iter()
            .map(|l| coords.iter().map(|&c| Int::from(l.l[c])).collect())
            .collect();
        let h = cone_facets(&ConeV::new(coords.len(), gens))?;
        Ok(MoriCone { coords, h })
    }

    pub fn contains(&self, l: &CurveClassLift) -> bool {
        let v: Vec<Rat> = self
            .coords
            .iter()
            .map(|&c| Rat::from_integer(Int::from(l.l[c])))
            .collect();
        cone_contains(&self.h, &v).unwrap_or(false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gkz::build_cayley_gkz;
    use crate::nef::validate_nef_partition;

    fn p1_fan() -> Fan {
        Fan::new(1, vec![vec![1], vec![-1]], vec![vec![0], vec![1]]).unwrap()
    }

    fn p1xp1_fan() -> Fan {
        Fan::new(
            2,
            vec![vec![1, 0], vec![0, 1], vec![-1, 0], vec![0, -1]],
            vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![0, 3]],
        )
        .unwrap()
    }

    fn r(a: i64) -> Rat {
        Rat::from_integer(Int::from(a))
    }

    #[test]
    fn p1_ring() {
        let ring = build_ring(&p1_fan()).unwrap();
        assert_eq!(ring.dimension(), 2);
        let dp = ring.divisor_class(0);
        let dm = ring.divisor_class(1);
        assert_eq!(dp, dm);
        assert_eq!(ring.integral(&dp), r(1));
        assert!(ring.multiply(&dp, &dp).is_zero());
        assert_eq!(ring.nilpotency_order(&dp), Some(2));
        assert_eq!(ring.multiply(&ring.one(), &dp), dp);
    }

    #[test]
    fn p1_part_zero_class() {
        let fan = p1_fan();
        let npd = validate_nef_partition(&fan, &[vec![0, 1]]).unwrap();
        let ring = build_ring(&fan).unwrap();
        assert_eq!(ring.part_zero_class(&npd, 0).0, vec![r(0), r(-2)]);
    }

    #[test]
    fn p1xp1_ring() {
        let fan = p1xp1_fan();
        let ring = build_ring(&fan).unwrap();
        assert_eq!(ring.dimension(), 4);
        let h1 = ring.divisor_class(0);
        let h2 = ring.divisor_class(1);
        assert_eq!(ring.integral(&ring.multiply(&h1, &h2)), r(1));
        assert!(ring.multiply(&h1, &h1).is_zero());
        let k = h1.add(&h2).scale(&r(2));
        assert_eq!(ring.integral(&ring.multiply(&k, &k)), r(8));
    }

    #[test]
    fn p1_mori() {
        let fan = p1_fan();
        let npd = validate_nef_partition(&fan, &[vec![0, 1]]).unwrap();
        let g = build_cayley_gkz(&npd).unwrap();
        let gens = mori_generators(&npd, &g).unwrap();
        assert_eq!(gens, vec![CurveClassLift { l: vec![-2, 1, 1] }]);
        let cone = MoriCone::new(&g, &gens).unwrap();
        assert!(cone.contains(&CurveClassLift { l: vec![-4, 2, 2] }));
        assert!(!cone.contains(&CurveClassLift { l: vec![2, -1, -1] }));
    }

    #[test]
    fn p1xp1_mori() {
        let fan = p1xp1_fan();
        let npd = validate_nef_partition(&fan, &[vec![0, 1, 2, 3]]).unwrap();
        let g = build_cayley_gkz(&npd).unwrap();
        let gens = mori_generators(&npd, &g).unwrap();
        assert_eq!(gens.len(), 2);
        for l in &gens {
            assert!(l.in_kernel(&g));
            assert_eq!(l.l.iter().filter(|&&x| x == 1).count(), 2);
        }
    }

    #[test]
    fn sum_of_all_column_classes_vanishes() {
        let fan = p1xp1_fan();
        let npd = validate_nef_partition(&fan, &[vec![0, 1], vec![2, 3]]).unwrap();
        let ring = build_ring(&fan).unwrap();
        let mut total = ring.zero();
        for i in 0..npd.r() {
            total = total.add(&ring.part_zero_class(&npd, i));
            for &ray in &npd.parts()[i] {
                total = total.add(&ring.divisor_class(ray));
            }
        }
        assert!(total.is_zero());
    }

    #[test]
    fn non_smooth_rejected() {
        let fan = Fan::new(
            2,
            vec![vec![1, 1], vec![-1, 1], vec![-1, -1], vec![1, -1]],
            vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![0, 3]],
        )
        .unwrap();
        assert!(matches!(build_ring(&fan), Err(CohomologyError::BadFan)));
    }
}
