//! Regularized inner product: φ and χ averages give deltas on m and n, the
//! integrand times sin θ is expanded in powers of sin θ, the negative powers
//! are subtracted and the remainder is integrated exactly.
//!
//! The χ average uses lim 1/q over [0, 2πq], so every surviving branch pair
//! carries a factor 4π². Values are in units of |N_j|².

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use crate::error::{Error, Result};
use crate::halfangle::{AngularExpression, SinExpansion};
use crate::numbers::{rat, rat_int, Phase, Scalar};
use crate::wavefunctions::{Branch, DFunction};

/// Angular weight W(cos θ) placed between the two states.
#[derive(Clone, Debug, PartialEq)]
pub enum Weight {
    One,
    CosTheta,
    Legendre(u32),
    /// Σ_r c_r cos^r θ
    CosPolynomial(Vec<BigRational>),
}

/// Coefficients of P_k(x) in powers of x (Bonnet recursion).
pub fn legendre_coefficients(k: u32) -> Vec<BigRational> {
    let mut prev = vec![rat_int(1)];
    if k == 0 {
        return prev;
    }
    let mut cur = vec![rat_int(0), rat_int(1)];
    for l in 1..k as i64 {
        // (l+1) P_{l+1} = (2l+1) x P_l - l P_{l-1}
        let mut next = vec![rat_int(0); cur.len() + 1];
        for (i, c) in cur.iter().enumerate() {
            next[i + 1] += c * rat(2 * l + 1, l + 1);
        }
        for (i, c) in prev.iter().enumerate() {
            next[i] -= c * rat(l, l + 1);
        }
        prev = cur;
        cur = next;
    }
    cur
}

impl Weight {
    pub fn cos_coefficients(&self) -> Vec<BigRational> {
        match self {
            Weight::One => vec![rat_int(1)],
            Weight::CosTheta => vec![rat_int(0), rat_int(1)],
            Weight::Legendre(k) => legendre_coefficients(*k),
            Weight::CosPolynomial(c) => c.clone(),
        }
    }

    pub fn expression<S: Scalar>(&self) -> AngularExpression<S> {
        AngularExpression::cos_polynomial(&self.cos_coefficients())
    }

    pub fn evaluate(&self, cos_theta: f64) -> f64 {
        self.cos_coefficients()
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * cos_theta + c.to_f64().unwrap_or(f64::NAN))
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Weight::One => write!(f, "1"),
            Weight::CosTheta => write!(f, "cos θ"),
            Weight::Legendre(k) => write!(f, "P_{k}(cos θ)"),
            Weight::CosPolynomial(c) => {
                let parts: Vec<String> = c.iter().enumerate().map(|(r, q)| format!("({q})cos^{r}θ")).collect();
                write!(f, "{}", parts.join(" + "))
            }
        }
    }
}

/// rational + pi·π
#[derive(Clone, Debug, PartialEq)]
pub struct PiLinear<S> {
    pub rational: S,
    pub pi: S,
}

impl<S: Scalar> PiLinear<S> {
    pub fn zero() -> Self {
        PiLinear { rational: S::zero(), pi: S::zero() }
    }

    pub fn to_f64(&self) -> Option<f64> {
        Some(self.rational.to_f64()? + self.pi.to_f64()? * std::f64::consts::PI)
    }
}

impl<S: Scalar> fmt::Display for PiLinear<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.rational.is_zero(), self.pi.is_zero()) {
            (true, true) => write!(f, "0"),
            (false, true) => write!(f, "{}", self.rational),
            (true, false) => write!(f, "({})π", self.pi),
            (false, false) => write!(f, "{} + ({})π", self.rational, self.pi),
        }
    }
}

/// pi2·π² + pi3·π³
#[derive(Clone, Debug, PartialEq)]
pub struct PiPowers<S> {
    pub pi2: S,
    pub pi3: S,
}

impl<S: Scalar> PiPowers<S> {
    pub fn to_f64(&self) -> Option<f64> {
        let pi = std::f64::consts::PI;
        Some(self.pi2.to_f64()? * pi * pi + self.pi3.to_f64()? * pi * pi * pi)
    }

    pub fn is_zero(&self) -> bool {
        self.pi2.is_zero() && self.pi3.is_zero()
    }
}

impl<S: Scalar> fmt::Display for PiPowers<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.pi2.is_zero(), self.pi3.is_zero()) {
            (true, true) => write!(f, "0"),
            (true, false) => write!(f, "({})π³", self.pi3),
            (false, true) => write!(f, "({})π²", self.pi2),
            (false, false) => write!(f, "({})π² + ({})π³", self.pi2, self.pi3),
        }
    }
}

/// ∫_0^π sin^k θ dθ as (value, carries a factor π).
fn wallis(k: u32) -> (BigRational, bool) {
    // (k-1)!!/k!!
    let mut r = rat_int(1);
    let mut i = k as i64;
    while i >= 2 {
        r *= rat(i - 1, i);
        i -= 2;
    }
    if k % 2 == 0 {
        (r, true)
    } else {
        (r * rat_int(2), false)
    }
}

/// Exact ∫_0^π of the regular part (non-negative sin powers). cos θ sin^k θ
/// integrates to zero.
pub fn regular_integral<S: Scalar>(e: &SinExpansion<S>) -> PiLinear<S> {
    let mut out = PiLinear::zero();
    for (k, (alpha, _beta)) in e.terms.range(0..) {
        let (w, has_pi) = wallis(*k as u32);
        let term = alpha.clone() * S::from_rational(&w);
        if has_pi {
            out.pi = out.pi + term;
        } else {
            out.rational = out.rational + term;
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct BranchContribution<S> {
    pub left: Branch,
    pub right: Branch,
    pub phase: Phase,
    pub radical: BigInt,
    /// Regularized θ integral before the 4π² phase-average factor.
    pub theta_integral: PiLinear<S>,
    /// Highest sin^{-m} θ order subtracted.
    pub divergence_order: u32,
}

impl<S: Scalar> BranchContribution<S> {
    fn vanishing(left: Branch, right: Branch) -> Self {
        BranchContribution {
            left,
            right,
            phase: Phase::ONE,
            radical: BigInt::one(),
            theta_integral: PiLinear::zero(),
            divergence_order: 0,
        }
    }

    /// 4π²·(rational + π·pi) without phase and radical.
    pub fn real_part(&self) -> PiPowers<S> {
        let four = S::from_i64(4);
        PiPowers {
            pi2: self.theta_integral.rational.clone() * four.clone(),
            pi3: self.theta_integral.pi.clone() * four,
        }
    }

    pub fn value(&self) -> Complex64 {
        let root = self.radical.to_f64().unwrap_or(f64::NAN).sqrt();
        let re = self.real_part().to_f64().unwrap_or(f64::NAN);
        self.phase.to_complex() * root * re
    }
}

#[derive(Clone, Debug)]
pub struct InnerProduct<S> {
    pub contributions: Vec<BranchContribution<S>>,
}

impl<S: Scalar> InnerProduct<S> {
    pub fn contribution(&self, left: Branch, right: Branch) -> &BranchContribution<S> {
        self.contributions
            .iter()
            .find(|c| c.left == left && c.right == right)
            .expect("all four branch pairs are present")
    }

    pub fn value(&self) -> Complex64 {
        self.contributions.iter().map(|c| c.value()).sum()
    }

    /// The total as an exact real multiple of π² and π³, available when every
    /// contribution with a non-trivial phase or radical cancels exactly.
    pub fn exact(&self) -> Option<PiPowers<S>> {
        let mut groups: BTreeMap<(u8, BigInt), PiPowers<S>> = BTreeMap::new();
        for c in &self.contributions {
            let g = groups
                .entry((c.phase.k(), c.radical.clone()))
                .or_insert_with(|| PiPowers { pi2: S::zero(), pi3: S::zero() });
            let r = c.real_part();
            g.pi2 = g.pi2.clone() + r.pi2;
            g.pi3 = g.pi3.clone() + r.pi3;
        }
        let scale = groups
            .values()
            .map(|g| g.pi2.magnitude().max(g.pi3.magnitude()))
            .fold(1.0, f64::max);
        let mut total = PiPowers { pi2: S::zero(), pi3: S::zero() };
        for ((k, radical), g) in groups {
            if k == 0 && radical.is_one() {
                total = g;
            } else if !(g.pi2.negligible(scale, 1e-12) && g.pi3.negligible(scale, 1e-12)) {
                return None;
            }
        }
        Some(total)
    }
}

/// ⟨Ψ|W|Ψ'⟩ = ∫ Ψ* W Ψ' sin θ dθ dφ dχ, regularized.
pub fn inner_product<S: Scalar>(psi: &DFunction<S>, psi2: &DFunction<S>, weight: &Weight) -> Result<InnerProduct<S>> {
    let w = weight.expression::<S>();
    let sin = AngularExpression::<S>::sin_theta();
    let mut contributions = Vec::with_capacity(4);
    for left in [Branch::A, Branch::B] {
        for right in [Branch::A, Branch::B] {
            let x = psi.branch(left);
            let y = psi2.branch(right);
            let tol = x.tolerance().max(y.tolerance());
            let same_n = (x.n().clone() - y.n().clone()).negligible(1.0, tol);
            if x.is_empty() || y.is_empty() || x.m() != y.m() || !same_n {
                contributions.push(BranchContribution::vanishing(left, right));
                continue;
            }
            let integrand = x.conjugate().multiply(&w).multiply(y).multiply(&sin);
            let expansion = integrand.to_sin_expansion()?;
            contributions.push(BranchContribution {
                left,
                right,
                phase: expansion.phase,
                radical: expansion.radical.clone(),
                theta_integral: regular_integral(&expansion),
                divergence_order: expansion.max_divergence_order(),
            });
        }
    }
    Ok(InnerProduct { contributions })
}

pub fn norm<S: Scalar>(psi: &DFunction<S>) -> Result<InnerProduct<S>> {
    inner_product(psi, psi, &Weight::One)
}

#[derive(Clone, Debug)]
pub struct Expectation<S> {
    pub exact: Option<S>,
    pub value: f64,
    pub weighted: InnerProduct<S>,
    pub norm: InnerProduct<S>,
}

/// ⟨Ψ|W|Ψ⟩ / ⟨Ψ|Ψ⟩; |N_j|² and the π powers cancel.
pub fn expectation<S: Scalar>(psi: &DFunction<S>, weight: &Weight) -> Result<Expectation<S>> {
    let weighted = inner_product(psi, psi, weight)?;
    let norm = inner_product(psi, psi, &Weight::One)?;
    let den_value = norm.value();
    if den_value.norm() == 0.0 {
        return Err(Error::Domain(format!("{} has zero regularized norm", psi.label())));
    }
    let exact = match (weighted.exact(), norm.exact()) {
        (Some(num), Some(den)) => exact_ratio(&num, &den),
        _ => None,
    };
    let value = match exact.as_ref().and_then(|e| e.to_f64()) {
        Some(v) => v,
        None => (weighted.value() / den_value).re,
    };
    Ok(Expectation { exact, value, weighted, norm })
}

fn exact_ratio<S: Scalar>(num: &PiPowers<S>, den: &PiPowers<S>) -> Option<S> {
    let lambda = if !den.pi3.is_zero() {
        num.pi3.try_div(&den.pi3)?
    } else {
        num.pi2.try_div(&den.pi2)?
    };
    let check3 = num.pi3.clone() - lambda.clone() * den.pi3.clone();
    let check2 = num.pi2.clone() - lambda.clone() * den.pi2.clone();
    let scale = lambda.magnitude().max(1.0);
    if check3.negligible(scale, 1e-12) && check2.negligible(scale, 1e-12) {
        Some(lambda)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::halfangle::HalfAngleMonomial;
    use crate::numbers::{HalfInt, Surd};
    use num_traits::Zero;

    fn q(p: i64, d: i64) -> Surd {
        Surd::rational(rat(p, d))
    }

    #[test]
    fn legendre_table() {
        assert_eq!(legendre_coefficients(2), vec![rat(-1, 2), rat(0, 1), rat(3, 2)]);
        assert_eq!(legendre_coefficients(3), vec![rat(0, 1), rat(-3, 2), rat(0, 1), rat(5, 2)]);
        assert_eq!(
            legendre_coefficients(4),
            vec![rat(3, 8), rat(0, 1), rat(-30, 8), rat(0, 1), rat(35, 8)]
        );
    }

    #[test]
    fn wallis_values() {
        assert_eq!(wallis(0), (rat(1, 1), true));
        assert_eq!(wallis(1), (rat(2, 1), false));
        assert_eq!(wallis(2), (rat(1, 2), true));
        assert_eq!(wallis(4), (rat(3, 8), true));
        assert_eq!(wallis(3), (rat(4, 3), false));
    }

    #[test]
    fn integral_of_two_cos_fourth() {
        let e = AngularExpression::monomial(q(2, 1), q(4, 1), q(0, 1));
        let r = regular_integral(&e.to_sin_expansion().unwrap());
        assert_eq!(r, PiLinear { rational: q(0, 1), pi: q(3, 4) });
    }

    #[test]
    fn integral_of_zero() {
        let e = AngularExpression::<Surd>::empty(HalfInt::ZERO, Surd::zero());
        let r = regular_integral(&e.to_sin_expansion().unwrap());
        assert_eq!(r, PiLinear::zero());
    }

    #[test]
    fn worked_expansion_spin_half() {
        // ½ C^{-2} S^2 (2 + cos θ)^2
        let two_plus_cos = AngularExpression::cos_polynomial(&[rat(2, 1), rat(1, 1)]);
        let e = AngularExpression::new(vec![HalfAngleMonomial::new(q(1, 2), q(-2, 1), q(2, 1))], HalfInt::ZERO, Surd::zero())
            .multiply(&two_plus_cos)
            .multiply(&two_plus_cos);
        let x = e.to_sin_expansion().unwrap();
        let div = x.divergent();
        assert_eq!(div.len(), 1);
        assert_eq!(div[&2], (q(1, 1), q(-1, 1)));
        assert_eq!(x.terms[&0], (q(1, 2), q(-1, 1)));
        assert_eq!(x.terms[&2], (q(1, 2), q(0, 1)));
        let r = regular_integral(&x);
        assert_eq!(r, PiLinear { rational: q(0, 1), pi: q(3, 4) });
    }

    #[test]
    fn norm_and_cos_spin_half() {
        let d = DFunction::build(HalfInt::HALF, Surd::integer(1), HalfInt::HALF).unwrap();
        let nrm = norm(&d).unwrap();
        assert_eq!(nrm.contribution(Branch::A, Branch::A).real_part().pi3, q(3, 1));
        assert_eq!(nrm.contribution(Branch::B, Branch::B).real_part().pi3, q(3, 1));
        assert_eq!(nrm.exact().unwrap(), PiPowers { pi2: q(0, 1), pi3: q(6, 1) });
        let e = expectation(&d, &Weight::CosTheta).unwrap();
        assert_eq!(e.exact, Some(q(2, 3)));
    }
}
