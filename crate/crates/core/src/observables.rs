//! Expectation values through the analytic path and the g-factor calculus.

use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::coupling::{cg, internal_cg};
use crate::error::{Error, Result};
use crate::numbers::{rat, HalfInt, Surd};
use crate::special::legendre;

fn require_spin(s: HalfInt) -> Result<f64> {
    if s.twice() <= 0 {
        return Err(Error::Domain(format!("spin {s} has no axis; need s > 0")));
    }
    Ok(s.to_f64() * (s.to_f64() + 1.0))
}

/// g in magneton units (μ = eħ/2M = 1).
#[derive(Clone, Debug, PartialEq)]
pub struct GFactorResult {
    pub s: HalfInt,
    pub n: f64,
    pub g: f64,
    /// exact g when n was given exactly
    pub exact: Option<Surd>,
}

/// g = 1 + n²/(s(s+1)).
pub fn g_factor(s: HalfInt, n: f64) -> Result<GFactorResult> {
    let cas = require_spin(s)?;
    Ok(GFactorResult { s, n, g: 1.0 + n * n / cas, exact: None })
}

pub fn g_factor_exact(s: HalfInt, n: &Surd) -> Result<GFactorResult> {
    require_spin(s)?;
    let inv = Surd::rational(BigRational::one() / s.casimir());
    let g = Surd::one() + n.clone() * n.clone() * inv;
    let nf = n.to_f64().ok_or(Error::Symbolic)?;
    let gf = g.to_f64().ok_or(Error::Symbolic)?;
    Ok(GFactorResult { s, n: nf, g: gf, exact: Some(g) })
}

/// Solution of g = 1 + n²/(s(s+1)) for n. Below g = 1 the projection is
/// imaginary; `magnitude` is then |n|.
#[derive(Clone, Debug, PartialEq)]
pub struct GProjection {
    pub imaginary: bool,
    pub magnitude: f64,
    pub exact: Option<Surd>,
}

impl std::fmt::Display for GProjection {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let i = if self.imaginary { "i·" } else { "" };
        match &self.exact {
            Some(e) => write!(f, "{i}{e}"),
            None => write!(f, "{i}{}", self.magnitude),
        }
    }
}

pub fn projection_for_g(s: HalfInt, g: f64) -> Result<GProjection> {
    let cas = require_spin(s)?;
    let sq = cas * (g - 1.0);
    Ok(GProjection { imaginary: sq < 0.0, magnitude: sq.abs().sqrt(), exact: None })
}

pub fn projection_for_g_exact(s: HalfInt, g: &BigRational) -> Result<GProjection> {
    require_spin(s)?;
    let sq = s.casimir() * (g - BigRational::one());
    let root = Surd::sqrt(&sq.abs())?;
    let magnitude = root.to_f64().unwrap_or(f64::NAN);
    Ok(GProjection { imaginary: sq.is_negative(), magnitude, exact: Some(root) })
}

/// ⟨cos θ⟩ = nm/(j(j+1)).
pub fn expect_cos(j: HalfInt, n: f64, m: HalfInt) -> Result<f64> {
    let cas = require_spin(j)?;
    Ok(n * m.to_f64() / cas)
}

/// ⟨P_k(cos θ)⟩ = ⟨j n, k 0|j n⟩ ⟨j m, k 0|j m⟩.
pub fn expect_pk(j: HalfInt, n: f64, m: HalfInt, k: u32) -> Result<f64> {
    let internal = internal_cg(j, n, k)?;
    let external = cg(j, m, HalfInt::from_twice(2 * k as i64), HalfInt::ZERO, j);
    Ok(internal * external)
}

/// Exact ⟨P_k⟩ for k ≤ 4. Both coefficients share the form U_k(j)·F_k(c)
/// with c = n/√(j(j+1)); their product only needs c_n², c_m² and, for odd
/// k, c_n c_m, so it stays in the field of n.
pub fn expect_pk_exact(j: HalfInt, n: &Surd, m: HalfInt, k: u32) -> Result<Surd> {
    if k == 0 {
        return Ok(Surd::one());
    }
    let big = j.casimir();
    if big.is_zero() {
        return Err(Error::SingularCoefficient(format!("⟨{j} n, {k} 0|{j} n⟩ needs j(j+1) > 0")));
    }
    let jq = j.to_rational();
    let half = rat(1, 2);
    let factor = |offsets: &[BigRational]| -> Result<BigRational> {
        let d = offsets.iter().fold(BigRational::one(), |acc, o| acc * (&jq + o));
        if d.is_positive() {
            Ok(d)
        } else {
            Err(Error::SingularCoefficient(format!("⟨{j} n, {k} 0|{j} n⟩ is undefined at j = {j}")))
        }
    };
    let r = |q: BigRational| Surd::rational(q);
    let inv_big = BigRational::one() / &big;
    let tn = n.clone() * n.clone() * r(inv_big.clone());
    let mq = m.to_rational();
    let tm = r(&mq * &mq * &inv_big);
    let cross = n.clone() * r(&mq * &inv_big);
    match k {
        1 => Ok(cross),
        2 => {
            let d = factor(&[-half.clone(), rat(3, 2)])?;
            let g = |t: Surd| (r(rat(3, 1)) * t - Surd::one()) * r(half.clone());
            Ok(r(&big / d) * g(tn) * g(tm))
        }
        3 => {
            let d = factor(&[rat(-1, 1), -half.clone(), rat(3, 2), rat(2, 1)])?;
            let shift = &inv_big * &half;
            let g = |t: Surd| (r(rat(5, 1)) * t - r(rat(3, 1))) * r(half.clone()) + r(shift.clone());
            Ok(cross * r(&big * &big / d) * g(tn) * g(tm))
        }
        4 => {
            let d = factor(&[rat(-3, 2), rat(-1, 1), -half.clone(), rat(3, 2), rat(2, 1), rat(5, 2)])?;
            let eighth = rat(1, 8);
            let g = |t: Surd| {
                let p4 = (r(rat(35, 1)) * t.clone() * t.clone() - r(rat(30, 1)) * t.clone() + r(rat(3, 1))) * r(eighth.clone());
                p4 + (r(rat(25, 1)) * t - r(rat(6, 1))) * r(&eighth * &inv_big)
            };
            Ok(r(&big * &big * &big / d) * g(tn) * g(tm))
        }
        _ => Err(Error::Unsupported(format!("expectation of P_{k}; closed forms exist for k ≤ 4"))),
    }
}

/// ⟨cos θ⟩ = n²/(j(j+1)) for d^j_{nn}, the body-axis rotation amplitude.
pub fn body_rotation_cos(j: HalfInt, n: f64) -> Result<f64> {
    let cas = require_spin(j)?;
    Ok(n * n / cas)
}

/// Σ n² over the three orthogonal internal states n ∈ {0, 0, √(s(s+1))}.
pub fn isotropic_average(s: HalfInt) -> Result<BigRational> {
    if s.twice() < 0 {
        return Err(Error::Domain(format!("negative spin {s}")));
    }
    let states = [Surd::zero(), Surd::zero(), Surd::smax(s)];
    let total = states.iter().fold(Surd::zero(), |acc, n| acc + r3(n));
    total.as_rational().ok_or_else(|| Error::Domain("non-rational isotropic sum".into()))
}

// 3n²/3
fn r3(n: &Surd) -> Surd {
    Surd::rational(rat(3, 1)) * n.clone() * n.clone() * Surd::rational(rat(1, 3))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassicalRow {
    pub j: HalfInt,
    pub m: HalfInt,
    pub cos_theta_m: f64,
    pub expectation: f64,
    pub classical: f64,
    pub deviation: f64,
}

/// |⟨P_k⟩ − P_k(cos θ_m)| for n = √(j(j+1)) along a j sequence, with m
/// chosen so that m/√(j(j+1)) is as close as possible to `m_fraction`.
pub fn classical_limit_report(k: u32, m_fraction: f64, js: &[HalfInt]) -> Result<Vec<ClassicalRow>> {
    js.iter()
        .map(|&j| {
            let cas = require_spin(j)?;
            let target = m_fraction * cas.sqrt();
            // m runs over j, j−1, ..., −j
            let steps = ((j.to_f64() - target).round() as i64).clamp(0, j.twice());
            let m = j - HalfInt::from_twice(2 * steps);
            let cos_theta_m = m.to_f64() / cas.sqrt();
            let expectation = expect_pk(j, cas.sqrt(), m, k)?;
            let classical = legendre(k, cos_theta_m);
            Ok(ClassicalRow { j, m, cos_theta_m, expectation, classical, deviation: (expectation - classical).abs() })
        })
        .collect()
}

/// Surd → f64 helper for callers printing exact results.
pub fn surd_value(s: &Surd) -> Option<f64> {
    s.to_f64().or_else(|| s.as_rational().and_then(|q| q.to_f64()))
}
