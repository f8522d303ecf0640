//! Polynomials over the rationals in the symbols `γ`, `log 2` and `ζ(k)`,
//! and exact polygamma values at `1` and `1/2` plus integer shifts.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::linalg::{Int, Rat};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    EulerGamma,
    Log2,
    /// `ζ(k)`, `k >= 2`.
    Zeta(u32),
}

impl Symbol {
    pub fn name(&self) -> String {
        match self {
            Symbol::EulerGamma => "gamma".into(),
            Symbol::Log2 => "log2".into(),
            Symbol::Zeta(k) => format!("zeta{k}"),
        }
    }
}

/// A monomial: sorted `(symbol, exponent)` pairs with positive exponents.
pub type ConstMonomial = Vec<(Symbol, u32)>;

#[derive(Debug, Clone, PartialEq, Eq, Default, Hash, PartialOrd, Ord)]
pub struct ConstElem {
    terms: BTreeMap<ConstMonomial, Rat>,
}

fn mono_mul(a: &ConstMonomial, b: &ConstMonomial) -> ConstMonomial {
    let mut m: BTreeMap<Symbol, u32> = a.iter().copied().collect();
    for &(s, e) in b {
        *m.entry(s).or_insert(0) += e;
    }
    m.into_iter().collect()
}

impl ConstElem {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::rational(Rat::one())
    }

    pub fn rational(c: Rat) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Vec::new(), c);
        }
        ConstElem { terms }
    }

    pub fn from_int(c: i64) -> Self {
        Self::rational(Rat::from_integer(Int::from(c)))
    }

    pub fn symbol(s: Symbol) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(vec![(s, 1)], Rat::one());
        ConstElem { terms }
    }

    pub fn terms(&self) -> &BTreeMap<ConstMonomial, Rat> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, m: ConstMonomial, c: Rat) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_assign(&mut self, other: &ConstElem) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.clone());
        }
    }

    /// `self += a * b`.
    pub fn add_product(&mut self, a: &ConstElem, b: &ConstElem) {
        for (ma, ca) in &a.terms {
            for (mb, cb) in &b.terms {
                self.add_term(mono_mul(ma, mb), ca * cb);
            }
        }
    }

    /// `self += c * a`.
    pub fn add_scaled(&mut self, a: &ConstElem, c: &Rat) {
        if c.is_zero() {
            return;
        }
        for (m, x) in &a.terms {
            self.add_term(m.clone(), x * c);
        }
    }

    pub fn add(&self, other: &ConstElem) -> ConstElem {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn sub(&self, other: &ConstElem) -> ConstElem {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> ConstElem {
        self.scale(&-Rat::one())
    }

    pub fn scale(&self, c: &Rat) -> ConstElem {
        if c.is_zero() {
            return ConstElem::zero();
        }
        ConstElem {
            terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect(),
        }
    }

    pub fn mul(&self, other: &ConstElem) -> ConstElem {
        let mut out = ConstElem::zero();
        out.add_product(self, other);
        out
    }

    /// Highest power of `γ` occurring.
    pub fn gamma_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|m| {
                m.iter()
                    .find(|(s, _)| *s == Symbol::EulerGamma)
                    .map_or(0, |&(_, e)| e)
            })
            .max()
            .unwrap_or(0)
    }

    /// Rational constant term.
    pub fn rational_part(&self) -> Rat {
        self.terms
            .get(&Vec::new())
            .cloned()
            .unwrap_or_else(Rat::zero)
    }

    pub fn is_rational(&self) -> bool {
        self.terms.keys().all(|m| m.is_empty())
    }

    /// Terms as `("1" | "gamma*log2^2" | ..., "p/q")` pairs.
    pub fn named_terms(&self) -> BTreeMap<String, String> {
        self.terms
            .iter()
            .map(|(m, c)| (monomial_name(m), rat_string(c)))
            .collect()
    }
}

pub fn monomial_name(m: &ConstMonomial) -> String {
    if m.is_empty() {
        return "1".into();
    }
    m.iter()
        .map(|(s, e)| {
            if *e == 1 {
                s.name()
            } else {
                format!("{}^{e}", s.name())
            }
        })
        .collect::<Vec<_>>()
        .join("*")
}

/// `p/q`, or `p` when the denominator is 1.
pub fn rat_string(c: &Rat) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

impl fmt::Display for ConstElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| {
                if m.is_empty() {
                    rat_string(c)
                } else {
                    format!("{}*{}", rat_string(c), monomial_name(m))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PsiBase {
    One,
    Half,
}

impl PsiBase {
    pub fn value(&self) -> Rat {
        match self {
            PsiBase::One => Rat::one(),
            PsiBase::Half => Rat::new(Int::from(1), Int::from(2)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PsiError {
    #[error("ψ has a pole at {0}")]
    Pole(Rat),
}

fn factorial(k: u32) -> Int {
    (1..=k).fold(Int::one(), |acc, i| acc * Int::from(i))
}

/// `ψ^{(k)}(base)` exactly.
fn psi_at_base(base: PsiBase, k: u32) -> ConstElem {
    if k == 0 {
        let mut v = ConstElem::symbol(Symbol::EulerGamma).neg();
        if base == PsiBase::Half {
            v.add_scaled(
                &ConstElem::symbol(Symbol::Log2),
                &Rat::from_integer(Int::from(-2)),
            );
        }
        return v;
    }
    let sign = if k % 2 == 1 { Int::one() } else { -Int::one() };
    let mut c = sign * factorial(k);
    if base == PsiBase::Half {
        c *= (Int::one() << (k + 1)) - Int::one();
    }
    ConstElem::symbol(Symbol::Zeta(k + 1)).scale(&Rat::from_integer(c))
}

/// `ψ^{(k)}(base + q)` via `ψ^{(k)}(x+1) = ψ^{(k)}(x) + (-1)^k k! / x^{k+1}`.
pub fn psi_value(base: PsiBase, q: i64, k: u32) -> Result<ConstElem, PsiError> {
    let b = base.value();
    let x = &b + Rat::from_integer(Int::from(q));
    if base == PsiBase::One && q < 0 {
        return Err(PsiError::Pole(x));
    }
    let mut v = psi_at_base(base, k);
    let sk = Rat::from_integer(if k.is_multiple_of(2) {
        factorial(k)
    } else {
        -factorial(k)
    });
    let pow = |y: &Rat| -> Rat { (0..=k).fold(Rat::one(), |acc, _| acc * y) };
    if q >= 0 {
        for t in 0..q {
            let y = &b + Rat::from_integer(Int::from(t));
            v.add_term(Vec::new(), &sk / pow(&y));
        }
    } else {
        for t in q..0 {
            let y = &b + Rat::from_integer(Int::from(t));
            v.add_term(Vec::new(), -(&sk / pow(&y)));
        }
    }
    Ok(v)
}
