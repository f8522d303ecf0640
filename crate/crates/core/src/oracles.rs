//! Brute-force cross-checks: the torus-cycle period by binomial expansion,
//! normalized volume via a randomly ordered placing triangulation, and
//! high-precision numeric Γ-jets.

use std::collections::BTreeMap;

use num_traits::One;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rug::float::Constant;
use rug::ops::Pow;
use rug::Float;
use serde::{Deserialize, Serialize};

use crate::constants::{ConstElem, Symbol};
use crate::gkz::GkzSystem;
use crate::jets::Jet;
use crate::linalg::{Int, Rat};
use crate::nef::NefPartition;
use crate::polytope::{simplex_volume, LatticePolytope, PolytopeError};
use crate::triangulate::placing_triangulation;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("section {0} has no constant term")]
    MissingConstant(usize),
    #[error("numeric jet did not stabilise at {0} bits")]
    Precision(u32),
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
}

/// `s_k = Σ_j x_{k,j} t^{ρ_{k,j}}`, each term tagged with its GKZ column.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LaurentSection {
    pub part: usize,
    pub terms: Vec<(Vec<i64>, usize)>,
}

/// One section per part, with exponents `∇_k ∩ N` read off the partition.
pub fn sections_from(npd: &NefPartition, g: &GkzSystem) -> Vec<LaurentSection> {
    (0..npd.r())
        .map(|k| LaurentSection {
            part: k,
            terms: g
                .labels()
                .iter()
                .enumerate()
                .filter(|(_, (i, _))| *i == k + 1)
                .map(|(c, _)| {
                    let exp = match g.column_rays()[c] {
                        Some(ray) => npd.fan().rays()[ray].clone(),
                        None => vec![0; npd.dim()],
                    };
                    (exp, c)
                })
                .collect(),
        })
        .collect()
}

fn binom_minus_half(m: u32) -> Rat {
    let mut num = Rat::one();
    for t in 0..m {
        num *= Rat::new(Int::from(-1 - 2 * i64::from(t)), Int::from(2));
    }
    num / Rat::from_integer(factorial(m))
}

fn factorial(m: u32) -> Int {
    (1..=m).fold(Int::one(), |a, i| a * Int::from(i))
}

fn bounded_vectors(k: usize, total: u32) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        let mut next = Vec::new();
        for v in out {
            let used: u32 = v.iter().sum();
            for x in 0..=(total - used) {
                let mut w = v.clone();
                w.push(x);
                next.push(w);
            }
        }
        out = next;
    }
    out
}

/// Constant term in `t` of `Π_k s_k^{-1/2}` expanded around the constant
/// monomials, through total degree `degmax` in the non-constant variables.
/// Keys are exponent vectors `ℓ` over the GKZ columns, so the monomial is
/// `Π_k x_{k,0}^{-1/2} · x^ℓ`.
pub fn binomial_period(
    sections: &[LaurentSection],
    ncols: usize,
    degmax: u32,
) -> Result<BTreeMap<Vec<i64>, Rat>, OracleError> {
    let mut constant_cols = Vec::new();
    let mut vars: Vec<(usize, usize, Vec<i64>)> = Vec::new();
    for (s_idx, s) in sections.iter().enumerate() {
        let c0 = s
            .terms
            .iter()
            .find(|(e, _)| e.iter().all(|&x| x == 0))
            .ok_or(OracleError::MissingConstant(s.part))?;
        constant_cols.push(c0.1);
        for (e, c) in &s.terms {
            if e.iter().any(|&x| x != 0) {
                vars.push((s_idx, *c, e.clone()));
            }
        }
    }
    let dim = vars.first().map_or(0, |v| v.2.len());
    let mut out = BTreeMap::new();
    for a in bounded_vectors(vars.len(), degmax) {
        let mut t_exp = vec![0i64; dim];
        for (x, (_, _, e)) in a.iter().zip(&vars) {
            for (t, ek) in t_exp.iter_mut().zip(e) {
                *t += i64::from(*x) * ek;
            }
        }
        if t_exp.iter().any(|&x| x != 0) {
            continue;
        }
        let mut coeff = Rat::one();
        let mut l = vec![0i64; ncols];
        for (s_idx, &c0) in constant_cols.iter().enumerate() {
            let mut m = 0u32;
            let mut denom = Int::one();
            for (x, (s, c, _)) in a.iter().zip(&vars) {
                if *s == s_idx {
                    m += x;
                    denom *= factorial(*x);
                    l[*c] = i64::from(*x);
                }
            }
            l[c0] = -i64::from(m);
            coeff *= binom_minus_half(m) * Rat::new(factorial(m), denom);
        }
        out.insert(l, coeff);
    }
    Ok(out)
}

/// Normalized volume from a placing triangulation of the vertices in a
/// seeded random order.
pub fn independent_volume(p: &LatticePolytope, seed: u64) -> Result<Int, OracleError> {
    if !p.is_full_dimensional() {
        return Err(PolytopeError::NotFullDimensional {
            affine_dim: p.affine_dim(),
            dim: p.dim(),
        }
        .into());
    }
    let pts = p.vertices().to_vec();
    let mut order: Vec<usize> = (0..pts.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let t = placing_triangulation(&pts, &order);
    Ok(t.simplices
        .iter()
        .map(|s| simplex_volume(&s.iter().map(|&i| pts[i].clone()).collect::<Vec<_>>()))
        .sum())
}

/// Which function the numeric jet expands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JetKind {
    /// `1 / Γ(a + t)`.
    Reciprocal,
    /// `Γ(a + t) / Γ(1/2)`.
    HalfRatio,
}

fn to_float(x: &Rat, prec: u32) -> Float {
    let parse =
        |i: &Int| Float::with_val(prec, Float::parse(i.to_string()).expect("decimal integer"));
    parse(x.numer()) / parse(x.denom())
}

fn eval_fn(kind: JetKind, z: &Float, prec: u32) -> Float {
    if kind == JetKind::Reciprocal && z.is_integer() && *z <= 0 {
        return Float::with_val(prec, 0);
    }
    let g = Float::with_val(prec, z.gamma_ref());
    match kind {
        JetKind::Reciprocal => Float::with_val(prec, 1) / g,
        JetKind::HalfRatio => {
            let half = Float::with_val(prec, 0.5);
            g / Float::with_val(prec, half.gamma_ref())
        }
    }
}

/// Taylor coefficients in `t` of the chosen function at `a`, through `order`,
/// from polynomial interpolation on the nodes `t = ε u`, `u = -M/2..M/2`.
fn jet_at_precision(kind: JetKind, a: &Rat, order: usize, eps: &Rat, prec: u32) -> Vec<Float> {
    let m = 40usize;
    let a_f = to_float(a, prec);
    let eps_f = to_float(eps, prec);
    let nodes: Vec<Float> = (0..=m)
        .map(|j| Float::with_val(prec, j as i64 - (m / 2) as i64))
        .collect();
    let mut rows: Vec<Vec<Float>> = nodes
        .iter()
        .map(|u| {
            let mut row: Vec<Float> = (0..=m)
                .map(|k| Float::with_val(prec, u.pow(k as u32)))
                .collect();
            let z = Float::with_val(prec, &a_f + Float::with_val(prec, &eps_f * u));
            row.push(eval_fn(kind, &z, prec));
            row
        })
        .collect();
    // Gaussian elimination with partial pivoting.
    for col in 0..=m {
        let piv = (col..=m)
            .max_by(|&i, &j| {
                rows[i][col]
                    .clone()
                    .abs()
                    .partial_cmp(&rows[j][col].clone().abs())
                    .unwrap()
            })
            .unwrap();
        rows.swap(col, piv);
        let pivot_row = rows[col].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r == col || row[col].is_zero() {
                continue;
            }
            let f = Float::with_val(prec, &row[col] / &pivot_row[col]);
            for (x, p) in row.iter_mut().zip(&pivot_row).skip(col) {
                *x -= Float::with_val(prec, &f * p);
            }
        }
    }
    (0..=order)
        .map(|k| {
            let ck = Float::with_val(prec, &rows[k][m + 1] / &rows[k][k]);
            ck / Float::with_val(prec, (&eps_f).pow(k as u32))
        })
        .collect()
}

/// Numeric jet, recomputed at doubled precision until two successive
/// results agree to `10^{-60}` (one widening allowed).
pub fn numeric_gamma_jet(
    kind: JetKind,
    a: &Rat,
    order: usize,
    eps: &Rat,
) -> Result<Vec<Float>, OracleError> {
    let mut prec = 1024;
    let mut prev = jet_at_precision(kind, a, order, eps, prec);
    for _ in 0..2 {
        prec *= 2;
        let next = jet_at_precision(kind, a, order, eps, prec);
        let tol = Float::with_val(prec, Float::parse("1e-60").unwrap());
        if prev
            .iter()
            .zip(&next)
            .all(|(x, y)| Float::with_val(prec, x - y).abs() < tol)
        {
            return Ok(next);
        }
        prev = next;
    }
    Err(OracleError::Precision(prec))
}

/// Numeric value of a symbolic constant.
pub fn evaluate_const(c: &ConstElem, prec: u32) -> Float {
    let mut total = Float::with_val(prec, 0);
    for (m, q) in c.terms() {
        let mut term = to_float(q, prec);
        for &(s, e) in m {
            let v = match s {
                Symbol::EulerGamma => Float::with_val(prec, Constant::Euler),
                Symbol::Log2 => Float::with_val(prec, Constant::Log2),
                Symbol::Zeta(k) => Float::with_val(prec, Float::zeta_u(k)),
            };
            term *= Float::with_val(prec, (&v).pow(e));
        }
        total += term;
    }
    total
}

/// Largest absolute difference between a symbolic jet and numeric coefficients.
pub fn jet_discrepancy(jet: &Jet, numeric: &[Float]) -> f64 {
    let prec = numeric.first().map_or(256, Float::prec);
    jet.coeffs
        .iter()
        .zip(numeric)
        .map(|(c, x)| {
            Float::with_val(prec, evaluate_const(c, prec) - x)
                .abs()
                .to_f64()
        })
        .fold(0.0, f64::max)
}

/// `ψ(x)` numerically.
pub fn numeric_digamma(x: &Rat, prec: u32) -> Float {
    to_float(x, prec).digamma()
}
