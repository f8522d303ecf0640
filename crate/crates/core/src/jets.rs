//! Truncated power series in one nilpotent variable `t` with symbolic
//! constant coefficients, and the Γ-function jets built from them.

use num_traits::One;

use crate::constants::{psi_value, ConstElem, PsiBase};
use crate::linalg::{Int, Rat};

/// `Σ_{k<=K} c_k t^k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Jet {
    pub coeffs: Vec<ConstElem>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum JetError {
    #[error("argument {0} is neither an integer nor a half-integer")]
    Unsupported(Rat),
    #[error("leading coefficient is not an invertible rational")]
    NotInvertible,
}

fn rat(c: i64) -> Rat {
    Rat::from_integer(Int::from(c))
}

impl Jet {
    pub fn zero(order: usize) -> Jet {
        Jet {
            coeffs: vec![ConstElem::zero(); order + 1],
        }
    }

    pub fn one(order: usize) -> Jet {
        let mut j = Jet::zero(order);
        j.coeffs[0] = ConstElem::one();
        j
    }

    /// `c + t`.
    pub fn linear(c: Rat, order: usize) -> Jet {
        let mut j = Jet::zero(order);
        j.coeffs[0] = ConstElem::rational(c);
        if order >= 1 {
            j.coeffs[1] = ConstElem::one();
        }
        j
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn mul(&self, other: &Jet) -> Jet {
        let k = self.order();
        let mut out = Jet::zero(k);
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(k + 1 - i) {
                out.coeffs[i + j].add_product(a, b);
            }
        }
        out
    }

    /// `1 / self` for a nonzero rational constant term.
    pub fn inverse(&self) -> Result<Jet, JetError> {
        let c0 = &self.coeffs[0];
        if !c0.is_rational() || c0.is_zero() {
            return Err(JetError::NotInvertible);
        }
        let inv0 = Rat::one() / c0.rational_part();
        let k = self.order();
        let mut out = Jet::zero(k);
        out.coeffs[0] = ConstElem::rational(inv0.clone());
        for n in 1..=k {
            let mut s = ConstElem::zero();
            for j in 1..=n {
                s.add_product(&self.coeffs[j], &out.coeffs[n - j]);
            }
            out.coeffs[n] = s.scale(&-&inv0);
        }
        Ok(out)
    }

    /// `exp(self)` for a series without constant term.
    pub fn exp(&self) -> Jet {
        debug_assert!(self.coeffs[0].is_zero());
        let k = self.order();
        let mut out = Jet::one(k);
        // n e_n = Σ_{j=1}^n j f_j e_{n-j}
        for n in 1..=k {
            let mut s = ConstElem::zero();
            for j in 1..=n {
                let mut term = ConstElem::zero();
                term.add_product(&self.coeffs[j], &out.coeffs[n - j]);
                s.add_scaled(&term, &rat(j as i64));
            }
            out.coeffs[n] = s.scale(&Rat::new(Int::one(), Int::from(n)));
        }
        out
    }

    pub fn gamma_degree(&self) -> u32 {
        self.coeffs
            .iter()
            .map(ConstElem::gamma_degree)
            .max()
            .unwrap_or(0)
    }
}

fn factorial(k: usize) -> Int {
    (1..=k).fold(Int::one(), |acc, i| acc * Int::from(i))
}

/// `Σ_{k>=1} sign ψ^{(k-1)}(base) t^k / k!`.
fn log_gamma_part(base: PsiBase, negate: bool, order: usize) -> Jet {
    let mut f = Jet::zero(order);
    for k in 1..=order {
        let psi = psi_value(base, 0, (k - 1) as u32).expect("bases have no poles");
        let c = Rat::new(if negate { -Int::one() } else { Int::one() }, factorial(k));
        f.coeffs[k] = psi.scale(&c);
    }
    f
}

/// `1 / Γ(1 + t)`.
pub fn reciprocal_gamma_base(order: usize) -> Jet {
    log_gamma_part(PsiBase::One, true, order).exp()
}

/// `Γ(1 + t) / Γ(1 + l + t)`, a rational series. For `l < 0` it carries the
/// factor `t` of the pole.
pub fn integer_shift(l: i64, order: usize) -> Jet {
    let mut j = Jet::one(order);
    if l >= 0 {
        for m in 1..=l {
            j = j.mul(&Jet::linear(rat(m), order).inverse().unwrap());
        }
    } else {
        for m in (l + 1)..=0 {
            j = j.mul(&Jet::linear(rat(m), order));
        }
    }
    j
}

/// `1 / Γ(1 + l + t)`.
pub fn reciprocal_gamma_integer(l: i64, order: usize) -> Jet {
    reciprocal_gamma_base(order).mul(&integer_shift(l, order))
}

/// `Γ(1/2 + t) / Γ(1/2)`.
pub fn gamma_half_base(order: usize) -> Jet {
    log_gamma_part(PsiBase::Half, false, order).exp()
}

/// `Γ(1/2 + s + t) / Γ(1/2 + t)`, a rational series.
pub fn half_shift(s: i64, order: usize) -> Jet {
    let half = Rat::new(Int::one(), Int::from(2));
    let mut j = Jet::one(order);
    if s >= 0 {
        for m in 0..s {
            j = j.mul(&Jet::linear(&half + rat(m), order));
        }
    } else {
        for m in s..0 {
            j = j.mul(&Jet::linear(&half + rat(m), order).inverse().unwrap());
        }
    }
    j
}

/// `Γ(1/2 + s + t) / Γ(1/2)`.
pub fn gamma_half_ratio(s: i64, order: usize) -> Jet {
    gamma_half_base(order).mul(&half_shift(s, order))
}

/// `1 / Γ(a + t)` for integer `a`, and `Γ(1/2) / Γ(a + t)` for half-integer `a`.
pub fn reciprocal_gamma_jet(a: &Rat, order: usize) -> Result<Jet, JetError> {
    let two_a = a * rat(2);
    if a.is_integer() {
        let l = a.to_integer() - Int::one();
        let l: i64 = l.try_into().map_err(|_| JetError::Unsupported(a.clone()))?;
        Ok(reciprocal_gamma_integer(l, order))
    } else if two_a.is_integer() {
        let s = (a - Rat::new(Int::one(), Int::from(2))).to_integer();
        let s: i64 = s.try_into().map_err(|_| JetError::Unsupported(a.clone()))?;
        gamma_half_ratio(s, order).inverse()
    } else {
        Err(JetError::Unsupported(a.clone()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::Symbol;

    fn r(p: i64, q: i64) -> Rat {
        Rat::new(Int::from(p), Int::from(q))
    }

    #[test]
    fn reciprocal_gamma_one() {
        let j = reciprocal_gamma_jet(&r(1, 1), 0).unwrap();
        assert_eq!(j.coeffs, vec![ConstElem::one()]);
        let j = reciprocal_gamma_jet(&r(1, 1), 2).unwrap();
        assert_eq!(j.coeffs[1], ConstElem::symbol(Symbol::EulerGamma));
    }

    #[test]
    fn pole_gives_nilpotent_leading_term() {
        // 1/Γ(t) = t + γ t^2 + ...; order-1 truncation leaves t.
        let j = reciprocal_gamma_jet(&r(0, 1), 1).unwrap();
        assert_eq!(j.coeffs, vec![ConstElem::zero(), ConstElem::one()]);
        let j = reciprocal_gamma_jet(&r(0, 1), 2).unwrap();
        assert_eq!(j.coeffs[2], ConstElem::symbol(Symbol::EulerGamma));
    }

    #[test]
    fn half_ratio_linear_term() {
        // Γ(1/2 + t)/Γ(1/2) = 1 - (γ + 2 log 2) t + ...
        let j = gamma_half_ratio(0, 1);
        let expect = ConstElem::symbol(Symbol::EulerGamma)
            .add(&ConstElem::symbol(Symbol::Log2).scale(&r(2, 1)))
            .neg();
        assert_eq!(j.coeffs[1], expect);
        // Γ(1/2)/Γ(1/2 + t) has the opposite sign.
        let inv = reciprocal_gamma_jet(&r(1, 2), 1).unwrap();
        assert_eq!(inv.coeffs[1], expect.neg());
    }

    #[test]
    fn pochhammer_constant_terms() {
        // Γ(5/2)/Γ(1/2) = 3/4, Γ(-1/2)/Γ(1/2) = -2, 1/Γ(4) = 1/6.
        assert_eq!(
            gamma_half_ratio(2, 2).coeffs[0],
            ConstElem::rational(r(3, 4))
        );
        assert_eq!(
            gamma_half_ratio(-1, 2).coeffs[0],
            ConstElem::rational(r(-2, 1))
        );
        assert_eq!(
            reciprocal_gamma_integer(3, 2).coeffs[0],
            ConstElem::rational(r(1, 6))
        );
    }

    #[test]
    fn exp_and_inverse_agree() {
        let f = log_gamma_part(PsiBase::Half, false, 4);
        let e = f.exp();
        let mut g = f.clone();
        for c in g.coeffs.iter_mut() {
            *c = c.neg();
        }
        assert_eq!(e.inverse().unwrap(), g.exp());
        assert_eq!(e.mul(&g.exp()), Jet::one(4));
    }

    #[test]
    fn unsupported_argument() {
        assert!(reciprocal_gamma_jet(&r(1, 3), 2).is_err());
    }
}
