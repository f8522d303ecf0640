//! The cohomology-valued series
//! `B(x) = Σ_ℓ O_ℓ x^{ℓ+α} exp(Σ λ_{i,j} D_{i,j})`, its coordinate solutions,
//! and exact application of the GKZ operators to them.
//!
//! `O_ℓ` factors as a sign, a rational class (Pochhammer shifts, which carry
//! the nilpotent zeros for negative `ℓ_{i,j}`), and a single ℓ-independent
//! class holding all transcendental constants.

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cohomology::{
    mori_generators, CohomClass, CohomRing, CohomologyError, CurveClassLift, MoriCone,
};
use crate::constants::{rat_string, ConstElem};
use crate::gkz::{half, BoxOperator, GkzSystem};
use crate::jets::{gamma_half_base, half_shift, integer_shift, reciprocal_gamma_base, Jet};
use crate::linalg::{solve_square, Int, Rat};
use crate::nef::NefPartition;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FrobeniusError {
    #[error(transparent)]
    Cohomology(#[from] CohomologyError),
    #[error("support element {0:?} is outside the Mori cone")]
    NotInMoriCone(Vec<i64>),
    #[error("independence certificate failed: {0}")]
    Certificate(String),
}

/// Coordinates over the cohomology basis with symbolic constant entries.
pub type ConstClass = Vec<ConstElem>;

fn rat(c: i64) -> Rat {
    Rat::from_integer(Int::from(c))
}

pub struct FrobeniusContext<'a> {
    ring: &'a CohomRing,
    npd: &'a NefPartition,
    g: &'a GkzSystem,
    classes: Vec<CohomClass>,
    /// Powers of the Γ-argument of each column: `D_c`, or `E_i = -D_{i,0}`.
    arg_powers: Vec<Vec<CohomClass>>,
    order: usize,
    exp_part: ConstClass,
    factor_gamma_degree: u32,
}

impl<'a> FrobeniusContext<'a> {
    pub fn new(ring: &'a CohomRing, npd: &'a NefPartition, g: &'a GkzSystem) -> Self {
        let classes = g
            .labels()
            .iter()
            .zip(g.column_rays())
            .map(|(&(i, _), ray)| match ray {
                Some(r) => ring.divisor_class(*r),
                None => ring.part_zero_class(npd, i - 1),
            })
            .collect();
        Self::new_with_classes(ring, npd, g, classes)
    }

    /// Uses arbitrary column classes, e.g. to break `D_{i,0} = -Σ_j D_{i,j}`.
    pub fn new_with_classes(
        ring: &'a CohomRing,
        npd: &'a NefPartition,
        g: &'a GkzSystem,
        classes: Vec<CohomClass>,
    ) -> Self {
        let order = ring.variety_dim();
        let arg_powers: Vec<Vec<CohomClass>> = g
            .column_rays()
            .iter()
            .zip(&classes)
            .map(|(ray, d)| {
                let arg = if ray.is_some() { d.clone() } else { d.neg() };
                (0..=order).map(|k| ring.power(&arg, k)).collect()
            })
            .collect();
        let rgb = reciprocal_gamma_base(order);
        let ghb = gamma_half_base(order);
        let mut exp_part = const_class(&ring.one());
        let mut factor_gamma_degree = 0;
        for (c, ray) in g.column_rays().iter().enumerate() {
            let jet = if ray.is_some() { &rgb } else { &ghb };
            let f = eval_jet(jet, &arg_powers[c]);
            factor_gamma_degree =
                factor_gamma_degree.max(f.iter().map(ConstElem::gamma_degree).max().unwrap_or(0));
            exp_part = mul_cc(ring, &exp_part, &f);
        }
        FrobeniusContext {
            ring,
            npd,
            g,
            classes,
            arg_powers,
            order,
            exp_part,
            factor_gamma_degree,
        }
    }

    pub fn ring(&self) -> &CohomRing {
        self.ring
    }

    pub fn gkz(&self) -> &GkzSystem {
        self.g
    }

    pub fn classes(&self) -> &[CohomClass] {
        &self.classes
    }

    /// `α`: `-1/2` on zero-ray columns, `0` elsewhere.
    pub fn alpha(&self) -> Vec<Rat> {
        self.g
            .column_rays()
            .iter()
            .map(|r| if r.is_none() { -half() } else { Rat::zero() })
            .collect()
    }

    /// Largest `γ`-degree among the individual Γ-factors before multiplying.
    pub fn factor_gamma_degree(&self) -> u32 {
        self.factor_gamma_degree
    }

    /// The ℓ-independent product of all Γ-factor exponentials.
    pub fn exp_part(&self) -> &ConstClass {
        &self.exp_part
    }

    /// `O_ℓ = Π_i (-1)^{ℓ_{i,0}} Γ(1/2 - ℓ_{i,0} + E_i)/Γ(1/2) · Π_{i,j} 1/Γ(1 + ℓ_{i,j} + D_{i,j})`.
    pub fn coefficient_o(&self, l: &CurveClassLift) -> ConstClass {
        let r = self.rational_part(l);
        mul_cr(self.ring, &self.exp_part, &r)
    }

    /// Sign times the product of the Pochhammer shifts.
    fn rational_part(&self, l: &CurveClassLift) -> CohomClass {
        let mut r = self.ring.one();
        let mut negative = false;
        for (c, ray) in self.g.column_rays().iter().enumerate() {
            let lc = l.l[c];
            if lc == 0 {
                continue;
            }
            let jet = if ray.is_some() {
                integer_shift(lc, self.order)
            } else {
                negative ^= lc % 2 != 0;
                half_shift(-lc, self.order)
            };
            r = self
                .ring
                .multiply(&r, &eval_rational_jet(&jet, &self.arg_powers[c]));
            if r.is_zero() {
                return r;
            }
        }
        if negative {
            r.neg()
        } else {
            r
        }
    }

    /// Whether the rays with `ℓ < 0` span a cone of the fan; otherwise `O_ℓ = 0`.
    pub fn negative_rays_form_cone(&self, l: &[i64]) -> bool {
        let neg: Vec<usize> = self
            .g
            .column_rays()
            .iter()
            .zip(l)
            .filter_map(|(r, &x)| if x < 0 { *r } else { None })
            .collect();
        self.npd
            .fan()
            .max_cones()
            .iter()
            .any(|c| neg.iter().all(|r| c.contains(r)))
    }

    /// All `ℓ ∈ ker A` whose negative rays lie in a cone, with
    /// `Σ_i E_i·ℓ <= order` and `Σ_ρ max(-ℓ_ρ, 0) <= neg_bound`.
    /// Each element is checked against the cone of wall classes.
    pub fn enumerate_support(
        &self,
        order: u32,
        neg_bound: u32,
    ) -> Result<Vec<CurveClassLift>, FrobeniusError> {
        let fan = self.npd.fan();
        let n = fan.dim();
        let nrays = fan.rays().len();
        let mut found = BTreeSet::new();
        for cone in fan.max_cones() {
            let off: Vec<usize> = (0..nrays).filter(|r| !cone.contains(r)).collect();
            let m: Vec<Vec<Rat>> = (0..n)
                .map(|k| cone.iter().map(|&r| rat(fan.rays()[r][k])).collect())
                .collect();
            for c in compositions(off.len(), order + neg_bound) {
                let mut rhs = vec![Rat::zero(); n];
                for (&r, &x) in off.iter().zip(&c) {
                    for k in 0..n {
                        rhs[k] -= rat(fan.rays()[r][k] * i64::from(x));
                    }
                }
                let sol = solve_square(&m, &rhs).expect("maximal cones are full-dimensional");
                if sol.iter().any(|x| !x.is_integer()) {
                    continue;
                }
                let mut b = vec![0i64; nrays];
                for (&r, &x) in off.iter().zip(&c) {
                    b[r] = i64::from(x);
                }
                for (&r, x) in cone.iter().zip(&sol) {
                    b[r] = x.to_integer().try_into().expect("small coefficient");
                }
                let neg: i64 = b.iter().filter(|&&x| x < 0).map(|x| -x).sum();
                let lift = CurveClassLift::from_ray_relation(self.g, &b);
                if neg <= i64::from(neg_bound) && lift.degree(self.g) <= i64::from(order) {
                    found.insert(lift);
                }
            }
        }
        let gens = mori_generators(self.npd, self.g)?;
        if !gens.is_empty() {
            let mori = MoriCone::new(self.g, &gens)?;
            if let Some(bad) = found.iter().find(|l| !mori.contains(l)) {
                return Err(FrobeniusError::NotInMoriCone(bad.l.clone()));
            }
        }
        let mut out: Vec<CurveClassLift> = found.into_iter().collect();
        out.sort_by_key(|l| (l.degree(self.g), l.clone()));
        Ok(out)
    }

    pub fn assemble_b(&self, order: u32, neg_bound: u32) -> Result<CohomSeries, FrobeniusError> {
        let support = self.enumerate_support(order, neg_bound)?;
        let terms: BTreeMap<Vec<i64>, ConstClass> = support
            .par_iter()
            .filter_map(|l| {
                let o = self.coefficient_o(l);
                if o.iter().all(ConstElem::is_zero) {
                    None
                } else {
                    Some((l.l.clone(), o))
                }
            })
            .collect();
        Ok(CohomSeries {
            alpha: self.alpha(),
            order,
            neg_bound,
            support: support.into_iter().map(|l| l.l).collect(),
            terms,
        })
    }

    /// Coordinates of `B` along the basis: solution `b` has coefficient
    /// `[O_ℓ D^e / e!]_b` at `x^{ℓ+α} λ^e`.
    pub fn extract_solutions(&self, b: &CohomSeries) -> SolutionBasis {
        let p = self.g.num_columns();
        let mut log_monomials: Vec<(Vec<u32>, CohomClass)> = Vec::new();
        for k in 0..=self.order {
            for cols in (0..p).combinations_with_replacement(k) {
                let mut e = vec![0u32; p];
                let mut m = self.ring.one();
                for &c in &cols {
                    e[c] += 1;
                    m = self.ring.multiply(&m, &self.classes[c]);
                }
                if m.is_zero() {
                    continue;
                }
                let fact: Int = e
                    .iter()
                    .map(|&x| (1..=x).fold(Int::one(), |a, i| a * Int::from(i)))
                    .product();
                log_monomials.push((e, m.scale(&Rat::new(Int::one(), fact))));
            }
        }
        let dim = self.ring.dimension();
        let per_l: Vec<(Vec<i64>, Vec<BTreeMap<Vec<u32>, ConstElem>>)> = b
            .terms
            .par_iter()
            .map(|(l, o)| {
                let mut by_basis = vec![BTreeMap::new(); dim];
                for (e, m) in &log_monomials {
                    let prod = mul_cr(self.ring, o, m);
                    for (bi, c) in prod.into_iter().enumerate() {
                        if !c.is_zero() {
                            by_basis[bi].insert(e.clone(), c);
                        }
                    }
                }
                (l.clone(), by_basis)
            })
            .collect();
        let mut solutions: Vec<Solution> = (0..dim)
            .map(|bi| Solution {
                basis_index: bi,
                basis_element: self.ring.basis_name(bi),
                terms: BTreeMap::new(),
            })
            .collect();
        for (l, by_basis) in per_l {
            for (bi, m) in by_basis.into_iter().enumerate() {
                if !m.is_empty() {
                    solutions[bi].terms.insert(l.clone(), m);
                }
            }
        }
        SolutionBasis {
            alpha: b.alpha.clone(),
            order: b.order,
            neg_bound: b.neg_bound,
            support: b.support.iter().cloned().collect(),
            solutions,
        }
    }

    /// Euler operators exactly on every term; box operators of order
    /// `<= box_degmax` on every target monomial whose two source exponents
    /// are either enumerated or have `O_ℓ = 0` for cone reasons.
    pub fn verify_annihilation(&self, sols: &SolutionBasis, box_degmax: u32) -> AnnihilationReport {
        let alpha = &sols.alpha;
        let mut failures = Vec::new();
        let euler = self.g.euler_operators();
        let euler_failures: Vec<Residual> = sols
            .solutions
            .par_iter()
            .flat_map_iter(|s| {
                let mut out = Vec::new();
                for op in &euler {
                    for (l, terms) in &s.terms {
                        let res = apply_euler(&op.coeffs, &op.beta, l, terms, alpha);
                        if let Some((e, c)) = res.into_iter().find(|(_, c)| !c.is_zero()) {
                            out.push(Residual {
                                operator: format!("euler[{}]", op.index),
                                solution: s.basis_index,
                                l: l.clone(),
                                log_exponents: e,
                                residual: c.to_string(),
                            });
                        }
                    }
                }
                out
            })
            .collect();
        failures.extend(euler_failures);

        let ops = self.g.box_operators_up_to(box_degmax);
        let known = |l: &Vec<i64>| sols.support.contains(l) || !self.negative_rays_form_cone(l);
        let jobs: Vec<(&BoxOperator, &Solution)> = ops
            .iter()
            .flat_map(|op| sols.solutions.iter().map(move |s| (op, s)))
            .collect();
        let results: Vec<(usize, usize, Vec<Residual>)> = jobs
            .par_iter()
            .map(|(op, s)| {
                let plus: Vec<i64> = op.plus.iter().map(|&x| i64::from(x)).collect();
                let minus: Vec<i64> = op.minus.iter().map(|&x| i64::from(x)).collect();
                let mut targets = BTreeSet::new();
                for l in &sols.support {
                    targets.insert(sub(l, &plus));
                    targets.insert(sub(l, &minus));
                }
                let (mut checked, mut skipped, mut bad) = (0, 0, Vec::new());
                let empty = BTreeMap::new();
                for u in targets {
                    let sp = add(&u, &plus);
                    let sm = add(&u, &minus);
                    if !(known(&sp) && known(&sm)) {
                        skipped += 1;
                        continue;
                    }
                    checked += 1;
                    let mut res =
                        apply_partial(&op.plus, &sp, s.terms.get(&sp).unwrap_or(&empty), alpha);
                    for (e, c) in
                        apply_partial(&op.minus, &sm, s.terms.get(&sm).unwrap_or(&empty), alpha)
                    {
                        res.entry(e)
                            .or_insert_with(ConstElem::zero)
                            .add_assign(&c.neg());
                    }
                    if let Some((e, c)) = res.into_iter().find(|(_, c)| !c.is_zero()) {
                        bad.push(Residual {
                            operator: format!("box{:?}-{:?}", op.plus, op.minus),
                            solution: s.basis_index,
                            l: u,
                            log_exponents: e,
                            residual: c.to_string(),
                        });
                    }
                }
                (checked, skipped, bad)
            })
            .collect();
        let mut windows_checked = 0;
        let mut windows_skipped = 0;
        for (c, sk, bad) in results {
            windows_checked += c;
            windows_skipped += sk;
            failures.extend(bad);
        }
        AnnihilationReport {
            euler_operators: euler.len(),
            box_operators: ops.len(),
            windows_checked,
            windows_skipped,
            failures,
        }
    }

    /// Signature `(α, e_b)` per solution, where `e_b` is the log exponent of the
    /// basis monomial `b`. Checked on the computed series: solution `b` has
    /// coefficient 1 at `x^α λ^{e_b}`, no `ℓ = 0` log terms above degree
    /// `deg b`, and every other solution of degree `<= deg b` has coefficient 0
    /// there. This makes the coefficient matrix block unitriangular.
    pub fn independence_certificate(
        &self,
        sols: &SolutionBasis,
    ) -> Result<IndependenceCertificate, FrobeniusError> {
        let p = self.g.num_columns();
        let zero_l = vec![0i64; p];
        let empty = BTreeMap::new();
        let mut signatures = Vec::new();
        let mut log_degrees = Vec::new();
        for s in &sols.solutions {
            let b = s.basis_index;
            let deg = self.ring.degree_of(b);
            let mut e = vec![0u32; p];
            for &ray in &self.ring.basis()[b] {
                let c = self.g.column_of_ray(ray).expect("every ray has a column");
                e[c] = 1;
            }
            let lead = s.terms.get(&zero_l).unwrap_or(&empty);
            if lead.get(&e) != Some(&ConstElem::one()) {
                return Err(FrobeniusError::Certificate(format!(
                    "solution {b} lacks its leading term"
                )));
            }
            let log_degree = lead
                .keys()
                .map(|k| k.iter().sum::<u32>() as usize)
                .max()
                .unwrap_or(0);
            if log_degree != deg {
                return Err(FrobeniusError::Certificate(format!(
                    "solution {b} has log degree {log_degree}, expected {deg}"
                )));
            }
            for other in &sols.solutions {
                if other.basis_index != b && self.ring.degree_of(other.basis_index) <= deg {
                    let c = other.terms.get(&zero_l).and_then(|t| t.get(&e));
                    if c.is_some_and(|c| !c.is_zero()) {
                        return Err(FrobeniusError::Certificate(format!(
                            "solution {} meets the leading term of solution {b}",
                            other.basis_index
                        )));
                    }
                }
            }
            signatures.push((sols.alpha.clone(), e));
            log_degrees.push(log_degree);
        }
        let distinct: BTreeSet<_> = signatures.iter().collect();
        if distinct.len() != signatures.len() {
            return Err(FrobeniusError::Certificate("repeated signature".into()));
        }
        Ok(IndependenceCertificate {
            signatures,
            log_degrees,
        })
    }
}

#[derive(Debug, Clone)]
pub struct CohomSeries {
    pub alpha: Vec<Rat>,
    pub order: u32,
    pub neg_bound: u32,
    /// Enumerated exponents, including those with `O_ℓ = 0`.
    pub support: Vec<Vec<i64>>,
    /// Nonzero `O_ℓ`.
    pub terms: BTreeMap<Vec<i64>, ConstClass>,
}

impl CohomSeries {
    pub fn max_gamma_degree(&self) -> u32 {
        self.terms
            .values()
            .flatten()
            .map(ConstElem::gamma_degree)
            .max()
            .unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    pub basis_index: usize,
    pub basis_element: String,
    /// `ℓ -> (log exponent e -> coefficient of x^{ℓ+α} λ^e)`.
    pub terms: BTreeMap<Vec<i64>, BTreeMap<Vec<u32>, ConstElem>>,
}

impl Solution {
    pub fn max_gamma_degree(&self) -> u32 {
        self.terms
            .values()
            .flat_map(|m| m.values())
            .map(ConstElem::gamma_degree)
            .max()
            .unwrap_or(0)
    }

    pub fn log_degree(&self) -> u32 {
        self.terms
            .values()
            .flat_map(|m| m.keys())
            .map(|e| e.iter().sum())
            .max()
            .unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolutionBasis {
    pub alpha: Vec<Rat>,
    pub order: u32,
    pub neg_bound: u32,
    pub support: BTreeSet<Vec<i64>>,
    pub solutions: Vec<Solution>,
}

impl SolutionBasis {
    /// Log-free part of the solution along the unit class: `ℓ -> coefficient`.
    pub fn power_series(&self) -> BTreeMap<Vec<i64>, ConstElem> {
        let p = self.alpha.len();
        let zero_e = vec![0u32; p];
        self.solutions[0]
            .terms
            .iter()
            .filter_map(|(l, m)| m.get(&zero_e).map(|c| (l.clone(), c.clone())))
            .collect()
    }

    pub fn to_json(&self) -> SolutionsJson {
        SolutionsJson {
            alpha: self.alpha.iter().map(rat_string).collect(),
            solutions: self
                .solutions
                .iter()
                .map(|s| SolutionJson {
                    basis_element: s.basis_element.clone(),
                    terms: s
                        .terms
                        .iter()
                        .flat_map(|(l, m)| {
                            m.iter().map(move |(e, c)| {
                                let mut constants = c.named_terms();
                                let rational = constants.remove("1").unwrap_or_else(|| "0".into());
                                TermJson {
                                    l: l.clone(),
                                    log_exponents: e.clone(),
                                    coeff_rational: rational,
                                    coeff_constants: constants,
                                }
                            })
                        })
                        .collect(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionsJson {
    pub alpha: Vec<String>,
    pub solutions: Vec<SolutionJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionJson {
    pub basis_element: String,
    pub terms: Vec<TermJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub l: Vec<i64>,
    pub log_exponents: Vec<u32>,
    pub coeff_rational: String,
    pub coeff_constants: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Residual {
    pub operator: String,
    pub solution: usize,
    pub l: Vec<i64>,
    pub log_exponents: Vec<u32>,
    pub residual: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnihilationReport {
    pub euler_operators: usize,
    pub box_operators: usize,
    pub windows_checked: usize,
    pub windows_skipped: usize,
    pub failures: Vec<Residual>,
}

impl AnnihilationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndependenceCertificate {
    pub signatures: Vec<(Vec<Rat>, Vec<u32>)>,
    pub log_degrees: Vec<usize>,
}

fn add(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn sub(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Nonnegative vectors of length `k` with entry sum `<= total`.
fn compositions(k: usize, total: u32) -> Vec<Vec<u32>> {
    fn rec(k: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for x in 0..=left {
            cur.push(x);
            rec(k, left - x, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(k, total, &mut Vec::new(), &mut out);
    out
}

fn const_class(c: &CohomClass) -> ConstClass {
    c.0.iter().map(|x| ConstElem::rational(x.clone())).collect()
}

fn eval_jet(jet: &Jet, powers: &[CohomClass]) -> ConstClass {
    let dim = powers[0].0.len();
    let mut out = vec![ConstElem::zero(); dim];
    for (c, p) in jet.coeffs.iter().zip(powers) {
        for (o, x) in out.iter_mut().zip(&p.0) {
            o.add_scaled(c, x);
        }
    }
    out
}

fn eval_rational_jet(jet: &Jet, powers: &[CohomClass]) -> CohomClass {
    let mut out = CohomClass(vec![Rat::zero(); powers[0].0.len()]);
    for (c, p) in jet.coeffs.iter().zip(powers) {
        debug_assert!(c.is_rational());
        out = out.add(&p.scale(&c.rational_part()));
    }
    out
}

fn mul_cr(ring: &CohomRing, a: &ConstClass, b: &CohomClass) -> ConstClass {
    let dim = ring.dimension();
    let mut out = vec![ConstElem::zero(); dim];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.0.iter().enumerate() {
            if y.is_zero() {
                continue;
            }
            for (o, t) in ring.basis_product(i, j).0.iter().enumerate() {
                if !t.is_zero() {
                    out[o].add_scaled(x, &(y * t));
                }
            }
        }
    }
    out
}

fn mul_cc(ring: &CohomRing, a: &ConstClass, b: &ConstClass) -> ConstClass {
    let dim = ring.dimension();
    let mut out = vec![ConstElem::zero(); dim];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if y.is_zero() {
                continue;
            }
            let xy = x.mul(y);
            for (o, t) in ring.basis_product(i, j).0.iter().enumerate() {
                if !t.is_zero() {
                    out[o].add_scaled(&xy, t);
                }
            }
        }
    }
    out
}

/// `(Σ_c a_c θ_c - β)` applied to `Σ_e coeff_e x^{ℓ+α} λ^e`, with
/// `θ_c(x^w λ^e) = w_c x^w λ^e + e_c x^w λ^{e - 1_c}`.
fn apply_euler(
    a: &[i64],
    beta: &Rat,
    l: &[i64],
    terms: &BTreeMap<Vec<u32>, ConstElem>,
    alpha: &[Rat],
) -> BTreeMap<Vec<u32>, ConstElem> {
    let weight: Rat = a
        .iter()
        .zip(l)
        .zip(alpha)
        .map(|((&ac, &lc), al)| rat(ac) * (rat(lc) + al))
        .sum::<Rat>()
        - beta;
    let mut out: BTreeMap<Vec<u32>, ConstElem> = BTreeMap::new();
    for (e, c) in terms {
        out.entry(e.clone())
            .or_insert_with(ConstElem::zero)
            .add_scaled(c, &weight);
        for (k, &ek) in e.iter().enumerate() {
            if ek > 0 && a[k] != 0 {
                let mut lower = e.clone();
                lower[k] -= 1;
                out.entry(lower)
                    .or_insert_with(ConstElem::zero)
                    .add_scaled(c, &rat(a[k] * i64::from(ek)));
            }
        }
    }
    out
}

/// `∂^ν` applied to `Σ_e coeff_e x^{ℓ+α} λ^e`, returning coefficients of
/// `x^{ℓ+α-ν} λ^{e'}`. Uses `∂_c^k = x_c^{-k} Π_{t<k} (θ_c - t)`.
fn apply_partial(
    nu: &[u32],
    l: &[i64],
    terms: &BTreeMap<Vec<u32>, ConstElem>,
    alpha: &[Rat],
) -> BTreeMap<Vec<u32>, ConstElem> {
    let mut out: BTreeMap<Vec<u32>, ConstElem> = BTreeMap::new();
    for (e, c) in terms {
        let mut poly: BTreeMap<Vec<u32>, Rat> = BTreeMap::new();
        poly.insert(e.clone(), Rat::one());
        for (k, &nk) in nu.iter().enumerate() {
            let w = rat(l[k]) + &alpha[k];
            for t in 0..nk {
                let shift = &w - rat(i64::from(t));
                let mut next: BTreeMap<Vec<u32>, Rat> = BTreeMap::new();
                for (f, q) in &poly {
                    *next.entry(f.clone()).or_insert_with(Rat::zero) += &shift * q;
                    if f[k] > 0 {
                        let mut lower = f.clone();
                        lower[k] -= 1;
                        *next.entry(lower).or_insert_with(Rat::zero) += rat(i64::from(f[k])) * q;
                    }
                }
                poly = next;
            }
        }
        for (f, q) in poly {
            if !q.is_zero() {
                out.entry(f)
                    .or_insert_with(ConstElem::zero)
                    .add_scaled(c, &q);
            }
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}
