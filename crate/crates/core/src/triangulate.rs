//! Placing triangulations of finite point sets.
//!
//! Points are inserted in a caller-chosen order. A point outside the current
//! affine hull becomes an apex over every simplex; a point outside the current
//! convex hull is joined to every boundary facet it sees; a point inside is
//! handled by stellar subdivision of the simplices containing it.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};

use crate::linalg::{self, rref, solve_square, to_rat, Int, IntMatrix, Rat};

/// A triangulation by point indices; each simplex is sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Triangulation {
    pub dim: usize,
    pub simplices: Vec<Vec<usize>>,
}

struct Chart {
    base: Vec<i64>,
    coords: Vec<usize>,
}

impl Chart {
    fn of(points: &[Vec<i64>], used: &[usize]) -> (Chart, usize) {
        let base = points[used[0]].clone();
        let mut rows: Vec<Vec<Rat>> = used
            .iter()
            .map(|&i| to_rat(&diff(&points[i], &base)))
            .collect();
        let coords = rref(&mut rows);
        let k = coords.len();
        (Chart { base, coords }, k)
    }

    fn project(&self, p: &[i64]) -> Vec<i64> {
        self.coords.iter().map(|&c| p[c] - self.base[c]).collect()
    }
}

fn diff(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn affine_rank(points: &[Vec<i64>], idx: &[usize]) -> usize {
    if idx.is_empty() {
        return 0;
    }
    let rows: Vec<Vec<Int>> = idx[1..]
        .iter()
        .map(|&i| linalg::to_big(&diff(&points[i], &points[idx[0]])))
        .collect();
    linalg::rank_of_rows(&rows)
}

/// Orientation of `(q_1 - q_0, ..., q_k - q_0)` in chart coordinates.
fn orientation(chart: &Chart, points: &[Vec<i64>], idx: &[usize], extra: &[i64]) -> i32 {
    let q0 = chart.project(&points[idx[0]]);
    let mut rows: Vec<Vec<i64>> = idx[1..]
        .iter()
        .map(|&i| diff(&chart.project(&points[i]), &q0))
        .collect();
    rows.push(diff(&chart.project(extra), &q0));
    let d = IntMatrix::from_i64_rows(&rows).determinant();
    if d.is_zero() {
        0
    } else if d.is_positive() {
        1
    } else {
        -1
    }
}

/// Placing triangulation of `points`, inserting in `order`.
///
/// Every point in `order` is used unless it coincides with a previous one.
pub fn placing_triangulation(points: &[Vec<i64>], order: &[usize]) -> Triangulation {
    let mut simplices: Vec<Vec<usize>> = Vec::new();
    let mut used: Vec<usize> = Vec::new();
    let mut k = 0usize;
    let mut chart: Option<Chart> = None;

    for &p in order {
        if used.iter().any(|&u| points[u] == points[p]) {
            continue;
        }
        if used.is_empty() {
            used.push(p);
            simplices.push(vec![p]);
            continue;
        }
        let mut trial = used.clone();
        trial.push(p);
        if affine_rank(points, &trial) > k {
            for s in simplices.iter_mut() {
                s.push(p);
                s.sort();
            }
            used.push(p);
            k += 1;
            chart = Some(Chart::of(points, &used).0);
            continue;
        }
        let ch = chart.as_ref().expect("chart exists once k > 0");
        let boundary = boundary_facets(&simplices);
        let visible: Vec<Vec<usize>> = boundary
            .iter()
            .filter(|(facet, opp)| {
                let sp = orientation(ch, points, facet, &points[p]);
                let so = orientation(ch, points, facet, &points[**opp]);
                sp != 0 && sp == -so
            })
            .map(|(f, _)| f.clone())
            .collect();
        if !visible.is_empty() {
            for f in visible {
                let mut s = f;
                s.push(p);
                s.sort();
                simplices.push(s);
            }
        } else {
            simplices = stellar_insert(ch, points, simplices, p, k);
        }
        used.push(p);
    }
    simplices.sort();
    Triangulation { dim: k, simplices }
}

/// Boundary facets with the opposite vertex of their unique simplex.
fn boundary_facets(simplices: &[Vec<usize>]) -> BTreeMap<Vec<usize>, usize> {
    let mut count: BTreeMap<Vec<usize>, (usize, usize)> = BTreeMap::new();
    for s in simplices {
        for (i, &v) in s.iter().enumerate() {
            let mut f = s.clone();
            f.remove(i);
            count.entry(f).and_modify(|c| c.0 += 1).or_insert((1, v));
        }
    }
    count
        .into_iter()
        .filter(|(_, (c, _))| *c == 1)
        .map(|(f, (_, v))| (f, v))
        .collect()
}

fn barycentric(ch: &Chart, points: &[Vec<i64>], s: &[usize], p: &[i64], k: usize) -> Vec<Rat> {
    // Solve sum λ_i q_i = p, sum λ_i = 1 in chart coordinates.
    let qs: Vec<Vec<i64>> = s.iter().map(|&i| ch.project(&points[i])).collect();
    let target = ch.project(p);
    let mut m: Vec<Vec<Rat>> = (0..k)
        .map(|r| {
            qs.iter()
                .map(|q| Rat::from_integer(Int::from(q[r])))
                .collect()
        })
        .collect();
    m.push(vec![Rat::from_integer(Int::from(1)); k + 1]);
    let mut b: Vec<Rat> = target
        .iter()
        .map(|&x| Rat::from_integer(Int::from(x)))
        .collect();
    b.push(Rat::from_integer(Int::from(1)));
    solve_square(&m, &b).expect("simplex is non-degenerate")
}

fn stellar_insert(
    ch: &Chart,
    points: &[Vec<i64>],
    simplices: Vec<Vec<usize>>,
    p: usize,
    k: usize,
) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for s in simplices {
        let lam = barycentric(ch, points, &s, &points[p], k);
        if lam.iter().any(|l| l.is_negative()) {
            out.push(s);
            continue;
        }
        for (i, l) in lam.iter().enumerate() {
            if l.is_positive() {
                let mut t = s.clone();
                t[i] = p;
                t.sort();
                out.push(t);
            }
        }
    }
    out
}

/// Normalized `k`-volume of a simplex measured in the chart lattice.
pub fn chart_simplex_volume(points: &[Vec<i64>], s: &[usize]) -> Int {
    let (ch, _) = Chart::of(points, s);
    let q0 = ch.project(&points[s[0]]);
    let rows: Vec<Vec<i64>> = s[1..]
        .iter()
        .map(|&i| diff(&ch.project(&points[i]), &q0))
        .collect();
    IntMatrix::from_i64_rows(&rows).determinant().abs()
}
