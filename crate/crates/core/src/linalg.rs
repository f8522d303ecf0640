//! Exact integer/rational linear algebra and cone duality.
//!
//! Everything here is arbitrary precision. Cones are handled in two forms:
//! [`ConeV`] (generators) and [`ConeH`] (inner normals, `<h, v> >= 0`). The
//! conversion in both directions is the double description method, i.e.
//! Fourier–Motzkin elimination run on the dual side with a combinatorial
//! adjacency test in place of LP redundancy checks.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Int = BigInt;
pub type Rat = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LinalgError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("empty cone")]
    EmptyCone,
    #[error("cone is not full-dimensional (rank {rank} in ambient dimension {dim})")]
    NotFullDimensional { rank: usize, dim: usize },
    #[error("singular system")]
    Singular,
    #[error("integer {0} does not fit in 64 bits")]
    Overflow(String),
}

/// Dense integer matrix, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Int>,
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Int::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Int::one();
        }
        m
    }

    /// Builds a matrix from rows. All rows must have the same length.
    pub fn from_rows(rows: Vec<Vec<Int>>) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        let nrows = rows.len();
        Self {
            rows: nrows,
            cols,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| Int::from(x)).collect())
                .collect(),
        )
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<Int>]) -> Self {
        Self::from_rows(cols.to_vec()).transpose()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Int {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Int) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Int] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Int> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Int>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    /// Entries as `i64`, failing on overflow.
    pub fn to_i64_rows(&self) -> Result<Vec<Vec<i64>>, LinalgError> {
        self.to_rows()
            .iter()
            .map(|r| r.iter().map(to_i64).collect())
            .collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "incompatible shapes");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * other.cols + j;
                    out.data[idx] += a * other.get(k, j);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Int]) -> Vec<Int> {
        assert_eq!(self.cols, v.len(), "incompatible shapes");
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> Int {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return Int::one();
        }
        let mut m = self.clone();
        let mut sign = Int::one();
        let mut prev = Int::one();
        for k in 0..n {
            if m.get(k, k).is_zero() {
                let Some(p) = (k + 1..n).find(|&i| !m.get(i, k).is_zero()) else {
                    return Int::zero();
                };
                m.swap_rows(k, p);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (m.get(i, j) * m.get(k, k) - m.get(i, k) * m.get(k, j)) / &prev;
                    m.set(i, j, v);
                }
                m.set(i, k, Int::zero());
            }
            prev = m.get(k, k).clone();
        }
        sign * m.get(n - 1, n - 1)
    }

    /// Rank over the rationals.
    pub fn rank(&self) -> usize {
        rank_of_rows(&self.to_rows())
    }
}

pub fn to_i64(x: &Int) -> Result<i64, LinalgError> {
    x.to_i64()
        .ok_or_else(|| LinalgError::Overflow(x.to_string()))
}

pub fn to_big(v: &[i64]) -> Vec<Int> {
    v.iter().map(|&x| Int::from(x)).collect()
}

pub fn to_rat(v: &[i64]) -> Vec<Rat> {
    v.iter().map(|&x| Rat::from_integer(Int::from(x))).collect()
}

pub fn dot(a: &[Int], b: &[Int]) -> Int {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn dot_i64(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn dot_rat(a: &[Rat], b: &[Rat]) -> Rat {
    a.iter().zip(b).fold(Rat::zero(), |acc, (x, y)| acc + x * y)
}

/// Divides a vector by the gcd of its entries. The zero vector is unchanged.
pub fn make_primitive(v: &mut [Int]) {
    let g = v.iter().fold(Int::zero(), |g, x| g.gcd(x));
    if !g.is_zero() && !g.is_one() {
        for x in v.iter_mut() {
            *x = &*x / &g;
        }
    }
}

pub fn primitive_i64(v: &[i64]) -> Vec<i64> {
    let g = v.iter().fold(0i64, |g, &x| g.gcd(&x));
    if g == 0 {
        v.to_vec()
    } else {
        v.iter().map(|x| x / g).collect()
    }
}

/// Clears denominators of a rational vector and makes it primitive, keeping its direction.
pub fn primitive_from_rat(v: &[Rat]) -> Vec<Int> {
    let l = v.iter().fold(Int::one(), |l, x| l.lcm(x.denom()));
    let mut out: Vec<Int> = v.iter().map(|x| (x * &l).to_integer()).collect();
    make_primitive(&mut out);
    out
}

/// Row Hermite normal form: returns `(H, U)` with `U * M = H`, `U` unimodular.
///
/// `H` is in row echelon form, pivots are positive and entries above a pivot
/// are reduced into `[0, pivot)`.
pub fn hermite_normal_form(m: &IntMatrix) -> (IntMatrix, IntMatrix) {
    let rows = m.rows();
    let cols = m.cols();
    let mut h = m.clone();
    let mut u = IntMatrix::identity(rows);
    let mut p = 0;
    for c in 0..cols {
        if p == rows {
            break;
        }
        for i in p + 1..rows {
            if h.get(i, c).is_zero() {
                continue;
            }
            let a = h.get(p, c).clone();
            let b = h.get(i, c).clone();
            let eg = a.extended_gcd(&b);
            let (g, x, y) = (eg.gcd, eg.x, eg.y);
            let (ag, bg) = (&a / &g, &b / &g);
            // [x y; -b/g a/g] has determinant 1.
            combine_rows(&mut h, p, i, &x, &y, &(-&bg), &ag);
            combine_rows(&mut u, p, i, &x, &y, &(-&bg), &ag);
        }
        if h.get(p, c).is_zero() {
            continue;
        }
        if h.get(p, c).is_negative() {
            negate_row(&mut h, p);
            negate_row(&mut u, p);
        }
        let piv = h.get(p, c).clone();
        for i in 0..p {
            let q = h.get(i, c).div_floor(&piv);
            if !q.is_zero() {
                sub_row_multiple(&mut h, i, p, &q);
                sub_row_multiple(&mut u, i, p, &q);
            }
        }
        p += 1;
    }
    (h, u)
}

fn combine_rows(m: &mut IntMatrix, p: usize, i: usize, a: &Int, b: &Int, c: &Int, d: &Int) {
    for j in 0..m.cols() {
        let rp = m.get(p, j).clone();
        let ri = m.get(i, j).clone();
        m.set(p, j, a * &rp + b * &ri);
        m.set(i, j, c * &rp + d * &ri);
    }
}

fn negate_row(m: &mut IntMatrix, i: usize) {
    for j in 0..m.cols() {
        let v = -m.get(i, j).clone();
        m.set(i, j, v);
    }
}

fn sub_row_multiple(m: &mut IntMatrix, target: usize, src: usize, q: &Int) {
    for j in 0..m.cols() {
        let v = m.get(target, j) - q * m.get(src, j);
        m.set(target, j, v);
    }
}

/// A Z-basis of `{v in Z^cols : M v = 0}`.
pub fn integer_kernel_basis(m: &IntMatrix) -> Vec<Vec<Int>> {
    let (h, u) = hermite_normal_form(&m.transpose());
    (0..h.rows())
        .filter(|&i| h.row(i).iter().all(Zero::is_zero))
        .map(|i| u.row(i).to_vec())
        .collect()
}

/// True iff the columns of `M` generate `Z^rows` as an abelian group.
pub fn generates_full_lattice(m: &IntMatrix) -> bool {
    let (h, _) = hermite_normal_form(&m.transpose());
    let nonzero: Vec<usize> = (0..h.rows())
        .filter(|&i| h.row(i).iter().any(|x| !x.is_zero()))
        .collect();
    if nonzero.len() != m.rows() {
        return false;
    }
    // Square upper-triangular block; index = product of pivots.
    nonzero.iter().all(|&i| {
        h.row(i)
            .iter()
            .find(|x| !x.is_zero())
            .is_some_and(|x| x.is_one())
    })
}

/// Reduced row echelon form over Q, in place. Returns pivot columns.
pub fn rref(rows: &mut Vec<Vec<Rat>>) -> Vec<usize> {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut p = 0;
    for c in 0..ncols {
        if p == rows.len() {
            break;
        }
        let Some(sel) = (p..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(p, sel);
        let inv = rows[p][c].recip();
        for x in rows[p].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = rows[p].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == p || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(c);
        p += 1;
    }
    rows.truncate(p);
    pivots
}

pub fn rank_of_rows(rows: &[Vec<Int>]) -> usize {
    let mut r: Vec<Vec<Rat>> = rows
        .iter()
        .map(|row| row.iter().map(|x| Rat::from_integer(x.clone())).collect())
        .collect();
    rref(&mut r).len()
}

pub fn rank_of_rat_rows(rows: &[Vec<Rat>]) -> usize {
    let mut r = rows.to_vec();
    rref(&mut r).len()
}

/// Basis of `{x in Q^n : rows * x = 0}`.
pub fn rational_nullspace(rows: &[Vec<Rat>], n: usize) -> Vec<Vec<Rat>> {
    let mut r = rows.to_vec();
    let pivots = rref(&mut r);
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rat::zero(); n];
            v[f] = Rat::one();
            for (row, &pc) in r.iter().zip(&pivots) {
                v[pc] = -row[f].clone();
            }
            v
        })
        .collect()
}

/// Solves `M x = b` for square nonsingular `M` given by rows.
pub fn solve_square(m: &[Vec<Rat>], b: &[Rat]) -> Result<Vec<Rat>, LinalgError> {
    let n = m.len();
    if b.len() != n {
        return Err(LinalgError::DimensionMismatch {
            expected: n,
            got: b.len(),
        });
    }
    let mut aug: Vec<Vec<Rat>> = m
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.len() != n || pivots.iter().enumerate().any(|(i, &p)| p != i) {
        return Err(LinalgError::Singular);
    }
    Ok(aug.into_iter().map(|r| r[n].clone()).collect())
}

/// Determinant of a square rational matrix.
pub fn rat_determinant(m: &[Vec<Rat>]) -> Rat {
    let n = m.len();
    let mut a = m.to_vec();
    let mut det = Rat::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else {
            return Rat::zero();
        };
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det *= &a[c][c];
        let inv = a[c][c].recip();
        for i in c + 1..n {
            if a[i][c].is_zero() {
                continue;
            }
            let f = &a[i][c] * &inv;
            for j in c..n {
                let v = &a[c][j] * &f;
                a[i][j] -= v;
            }
        }
    }
    det
}

/// A cone given by generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConeV {
    pub dim: usize,
    pub generators: Vec<Vec<Int>>,
}

/// A cone given by inner normals: `{v : <h, v> >= 0 for all h}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConeH {
    pub dim: usize,
    pub normals: Vec<Vec<Int>>,
}

impl ConeV {
    pub fn new(dim: usize, generators: Vec<Vec<Int>>) -> Self {
        Self { dim, generators }
    }

    pub fn from_i64(dim: usize, generators: &[Vec<i64>]) -> Self {
        Self::new(dim, generators.iter().map(|g| to_big(g)).collect())
    }
}

/// Irredundant primitive inner facet normals of a full-dimensional cone.
///
/// The normals are sorted lexicographically. A cone that is all of `R^d` has
/// no facets.
pub fn cone_facets(c: &ConeV) -> Result<ConeH, LinalgError> {
    let gens: Vec<Vec<Int>> = c
        .generators
        .iter()
        .filter(|g| g.iter().any(|x| !x.is_zero()))
        .cloned()
        .collect();
    if gens.is_empty() {
        return Err(LinalgError::EmptyCone);
    }
    for g in &gens {
        if g.len() != c.dim {
            return Err(LinalgError::DimensionMismatch {
                expected: c.dim,
                got: g.len(),
            });
        }
    }
    let normals = extreme_rays(&gens, c.dim)?;
    Ok(ConeH {
        dim: c.dim,
        normals,
    })
}

/// Extreme generators of a pointed cone given by inner normals.
pub fn cone_generators_from_facets(h: &ConeH) -> Result<ConeV, LinalgError> {
    if h.normals.is_empty() {
        return Err(LinalgError::EmptyCone);
    }
    Ok(ConeV {
        dim: h.dim,
        generators: extreme_rays(&h.normals, h.dim)?,
    })
}

pub fn cone_contains(c: &ConeH, v: &[Rat]) -> Result<bool, LinalgError> {
    if v.len() != c.dim {
        return Err(LinalgError::DimensionMismatch {
            expected: c.dim,
            got: v.len(),
        });
    }
    Ok(c.normals.iter().all(|h| {
        let s = h.iter().zip(v).fold(Rat::zero(), |acc, (a, b)| {
            acc + Rat::from_integer(a.clone()) * b
        });
        !s.is_negative()
    }))
}

struct Ray {
    v: Vec<Int>,
    zeros: BTreeSet<usize>,
}

/// Extreme rays of `{x in R^dim : <a, x> >= 0 for every constraint a}`.
///
/// The constraints must span `R^dim` (the cone is then pointed). Rays are
/// primitive and sorted lexicographically.
pub fn extreme_rays(constraints: &[Vec<Int>], dim: usize) -> Result<Vec<Vec<Int>>, LinalgError> {
    // Greedy choice of `dim` independent constraints for the initial simplicial cone.
    let mut chosen: Vec<usize> = Vec::new();
    let mut basis_rows: Vec<Vec<Rat>> = Vec::new();
    for (i, a) in constraints.iter().enumerate() {
        let mut trial = basis_rows.clone();
        trial.push(a.iter().map(|x| Rat::from_integer(x.clone())).collect());
        if rank_of_rat_rows(&trial) > basis_rows.len() {
            basis_rows = trial;
            chosen.push(i);
            if chosen.len() == dim {
                break;
            }
        }
    }
    if chosen.len() < dim {
        return Err(LinalgError::NotFullDimensional {
            rank: chosen.len(),
            dim,
        });
    }
    let b = IntMatrix::from_rows(chosen.iter().map(|&i| constraints[i].clone()).collect());
    let det = b.determinant();
    let sign = if det.is_negative() {
        -Int::one()
    } else {
        Int::one()
    };
    // Columns of adj(B) scaled by sign(det): B r_k = |det| e_k.
    let mut rays: Vec<Ray> = (0..dim)
        .map(|k| {
            let mut v: Vec<Int> = (0..dim).map(|j| &sign * cofactor(&b, k, j)).collect();
            make_primitive(&mut v);
            let zeros = chosen
                .iter()
                .enumerate()
                .filter(|&(t, _)| t != k)
                .map(|(_, &i)| i)
                .collect();
            Ray { v, zeros }
        })
        .collect();

    let chosen_set: BTreeSet<usize> = chosen.iter().copied().collect();
    for (idx, a) in constraints.iter().enumerate() {
        if chosen_set.contains(&idx) {
            continue;
        }
        let vals: Vec<Int> = rays.iter().map(|r| dot(a, &r.v)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&i| vals[i].is_positive()).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&i| vals[i].is_negative()).collect();
        if neg.is_empty() {
            for (r, v) in rays.iter_mut().zip(&vals) {
                if v.is_zero() {
                    r.zeros.insert(idx);
                }
            }
            continue;
        }
        let mut new_rays: Vec<Ray> = Vec::new();
        for &p in &pos {
            for &q in &neg {
                if !adjacent(&rays, p, q, dim) {
                    continue;
                }
                let mut v: Vec<Int> = rays[q]
                    .v
                    .iter()
                    .zip(&rays[p].v)
                    .map(|(xq, xp)| &vals[p] * xq - &vals[q] * xp)
                    .collect();
                make_primitive(&mut v);
                let mut zeros: BTreeSet<usize> = rays[p]
                    .zeros
                    .intersection(&rays[q].zeros)
                    .copied()
                    .collect();
                zeros.insert(idx);
                new_rays.push(Ray { v, zeros });
            }
        }
        let mut kept: Vec<Ray> = Vec::new();
        for (i, mut r) in rays.into_iter().enumerate() {
            if vals[i].is_negative() {
                continue;
            }
            if vals[i].is_zero() {
                r.zeros.insert(idx);
            }
            kept.push(r);
        }
        kept.extend(new_rays);
        rays = kept;
    }
    let mut out: Vec<Vec<Int>> = rays.into_iter().map(|r| r.v).collect();
    out.sort();
    out.dedup();
    Ok(out)
}

fn adjacent(rays: &[Ray], p: usize, q: usize, dim: usize) -> bool {
    let common: BTreeSet<usize> = rays[p]
        .zeros
        .intersection(&rays[q].zeros)
        .copied()
        .collect();
    if common.len() + 2 < dim {
        return false;
    }
    !rays
        .iter()
        .enumerate()
        .any(|(t, r)| t != p && t != q && common.is_subset(&r.zeros))
}

/// Cofactor `(-1)^(i+j) det(minor(i, j))` of a square matrix, i.e. entry `(j, i)` of the adjugate.
fn cofactor(m: &IntMatrix, i: usize, j: usize) -> Int {
    let n = m.rows();
    let minor = IntMatrix::from_rows(
        (0..n)
            .filter(|&r| r != i)
            .map(|r| {
                (0..n)
                    .filter(|&c| c != j)
                    .map(|c| m.get(r, c).clone())
                    .collect()
            })
            .collect(),
    );
    let d = if n == 1 {
        Int::one()
    } else {
        minor.determinant()
    };
    if (i + j).is_multiple_of(2) {
        d
    } else {
        -d
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(rows: &[Vec<i64>]) -> IntMatrix {
        IntMatrix::from_i64_rows(rows)
    }

    #[test]
    fn hnf_identity() {
        let (h, u) = hermite_normal_form(&IntMatrix::identity(2));
        assert_eq!(h, IntMatrix::identity(2));
        assert_eq!(u, IntMatrix::identity(2));
    }

    #[test]
    fn hnf_upper_triangular_input() {
        let a = m(&[vec![2, 4], vec![0, 3]]);
        let (h, u) = hermite_normal_form(&a);
        assert_eq!(u.mul(&a), h);
        assert_eq!(h.get(0, 0), &Int::from(2));
        assert_eq!(h.get(0, 1), &Int::from(1));
        assert_eq!(h.get(1, 1), &Int::from(3));
        assert!(u.determinant().abs().is_one());
    }

    #[test]
    fn kernel_of_single_row() {
        let k = integer_kernel_basis(&m(&[vec![1, 1]]));
        assert_eq!(k.len(), 1);
        let v: Vec<i64> = k[0].iter().map(|x| x.to_i64().unwrap()).collect();
        assert!(v == vec![1, -1] || v == vec![-1, 1]);
    }

    #[test]
    fn kernel_of_p1_cayley_matrix() {
        let a = m(&[vec![1, 1, 1], vec![0, 1, -1]]);
        let k = integer_kernel_basis(&a);
        assert_eq!(k.len(), 1);
        let v: Vec<i64> = k[0].iter().map(|x| x.to_i64().unwrap()).collect();
        assert!(v == vec![-2, 1, 1] || v == vec![2, -1, -1]);
    }

    #[test]
    fn full_lattice() {
        assert!(generates_full_lattice(&IntMatrix::identity(3)));
        assert!(!generates_full_lattice(&m(&[vec![2]])));
        assert!(generates_full_lattice(&m(&[vec![2, 3]])));
        assert!(!generates_full_lattice(&m(&[vec![1, 1], vec![1, -1]])));
        assert!(!generates_full_lattice(&m(&[vec![1, 0], vec![0, 0]])));
    }

    #[test]
    fn orthant_facets() {
        let c = ConeV::from_i64(2, &[vec![1, 0], vec![0, 1]]);
        let h = cone_facets(&c).unwrap();
        assert_eq!(h.normals, vec![to_big(&[0, 1]), to_big(&[1, 0])]);
        assert!(cone_contains(&h, &to_rat(&[1, 1])).unwrap());
        assert!(!cone_contains(&h, &to_rat(&[-1, 0])).unwrap());
        assert!(cone_contains(&h, &to_rat(&[1])).is_err());
    }

    #[test]
    fn p1_cayley_cone_facets() {
        let c = ConeV::from_i64(2, &[vec![1, 0], vec![1, 1], vec![1, -1]]);
        let h = cone_facets(&c).unwrap();
        assert_eq!(h.normals, vec![to_big(&[1, -1]), to_big(&[1, 1])]);
        for g in &c.generators {
            let r: Vec<Rat> = g.iter().map(|x| Rat::from_integer(x.clone())).collect();
            assert!(cone_contains(&h, &r).unwrap());
        }
    }

    #[test]
    fn empty_and_degenerate_cones() {
        assert_eq!(
            cone_facets(&ConeV::new(2, vec![])),
            Err(LinalgError::EmptyCone)
        );
        assert_eq!(
            cone_facets(&ConeV::from_i64(2, &[vec![0, 0]])),
            Err(LinalgError::EmptyCone)
        );
        assert!(matches!(
            cone_facets(&ConeV::from_i64(3, &[vec![1, 0, 0], vec![0, 1, 0]])),
            Err(LinalgError::NotFullDimensional { rank: 2, dim: 3 })
        ));
    }

    #[test]
    fn whole_space_has_no_facets() {
        let c = ConeV::from_i64(2, &[vec![1, 0], vec![0, 1], vec![-1, -1]]);
        assert!(cone_facets(&c).unwrap().normals.is_empty());
    }

    #[test]
    fn cube_cone_has_six_facets() {
        let mut gens = Vec::new();
        for a in [-1, 1] {
            for b in [-1, 1] {
                for c in [-1, 1] {
                    gens.push(vec![1, a, b, c]);
                }
            }
        }
        let h = cone_facets(&ConeV::from_i64(4, &gens)).unwrap();
        assert_eq!(h.normals.len(), 6);
        let back = cone_generators_from_facets(&h).unwrap();
        assert_eq!(back.generators.len(), 8);
    }

    #[test]
    fn bareiss_determinant() {
        assert_eq!(m(&[vec![0, 1], vec![1, 0]]).determinant(), Int::from(-1));
        assert_eq!(
            m(&[vec![2, 0, 1], vec![1, 3, 2], vec![1, 1, 2]]).determinant(),
            Int::from(6)
        );
        assert_eq!(m(&[vec![1, 2], vec![2, 4]]).determinant(), Int::zero());
    }

    /// Lattice index of the column span via gcd of maximal minors.
    fn index_by_minors(a: &IntMatrix) -> Int {
        use itertools::Itertools;
        let r = a.rows();
        (0..a.cols())
            .combinations(r)
            .map(|cols| {
                IntMatrix::from_rows(
                    (0..r)
                        .map(|i| cols.iter().map(|&j| a.get(i, j).clone()).collect())
                        .collect(),
                )
                .determinant()
            })
            .fold(Int::zero(), |g, d| g.gcd(&d))
    }

    proptest! {
        #[test]
        fn kernel_vectors_are_annihilated(
            entries in proptest::collection::vec(-4i64..=4, 12),
        ) {
            let a = IntMatrix::from_i64_rows(&[entries[0..4].to_vec(), entries[4..8].to_vec(), entries[8..12].to_vec()]);
            let k = integer_kernel_basis(&a);
            prop_assert_eq!(k.len(), 4 - a.rank());
            for v in &k {
                prop_assert!(a.mul_vec(v).iter().all(Zero::is_zero));
            }
        }

        #[test]
        fn hnf_reconstructs(entries in proptest::collection::vec(-6i64..=6, 12)) {
            let a = IntMatrix::from_i64_rows(&[entries[0..3].to_vec(), entries[3..6].to_vec(), entries[6..9].to_vec(), entries[9..12].to_vec()]);
            let (h, u) = hermite_normal_form(&a);
            prop_assert_eq!(u.mul(&a), h);
            prop_assert!(u.determinant().abs().is_one());
        }

        #[test]
        fn full_lattice_agrees_with_minors(entries in proptest::collection::vec(-3i64..=3, 8)) {
            let a = IntMatrix::from_i64_rows(&[entries[0..4].to_vec(), entries[4..8].to_vec()]);
            let idx = index_by_minors(&a);
            prop_assert_eq!(generates_full_lattice(&a), idx.is_one());
        }

        #[test]
        fn facet_duality_round_trips(pts in proptest::collection::vec(proptest::collection::vec(-3i64..=3, 2), 3..8)) {
            // Homogenized polygon cone: pointed and full-dimensional when the points span.
            let gens: Vec<Vec<i64>> = pts.iter().map(|p| vec![1, p[0], p[1]]).collect();
            let c = ConeV::from_i64(3, &gens);
            let Ok(h) = cone_facets(&c) else { return Ok(()); };
            for g in &c.generators {
                let r: Vec<Rat> = g.iter().map(|x| Rat::from_integer(x.clone())).collect();
                prop_assert!(cone_contains(&h, &r).unwrap());
            }
            let v = cone_generators_from_facets(&h).unwrap();
            let h2 = cone_facets(&v).unwrap();
            prop_assert_eq!(h2, h);
        }
    }
}
