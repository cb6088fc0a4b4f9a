//! Sums of half-angle monomials c·(cos θ/2)^a (sin θ/2)^b carrying the phase
//! labels e^{imφ} e^{inχ}.
//!
//! Canonical form: the identity C² + S² = 1 (C = cos θ/2, S = sin θ/2) is
//! reduced by grouping terms whose exponents differ by integers (a) and even
//! integers (b), rewriting each group as C^{a0} S^{b0} P(C) and pulling out
//! every factor (1 - C²) that P contains. Two expressions are equal as
//! functions exactly when their canonical forms coincide.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::numbers::{binomial, rat, split_sqrt, square_part, HalfInt, Phase, Scalar};

pub const DEFAULT_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct HalfAngleMonomial<S> {
    pub coeff: S,
    pub cos_exp: S,
    pub sin_exp: S,
}

impl<S: Scalar> HalfAngleMonomial<S> {
    pub fn new(coeff: S, cos_exp: S, sin_exp: S) -> Self {
        HalfAngleMonomial { coeff, cos_exp, sin_exp }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Ladder {
    Raise,
    Lower,
}

impl Ladder {
    pub fn step(self) -> HalfInt {
        match self {
            Ladder::Raise => HalfInt::ONE,
            Ladder::Lower => -HalfInt::ONE,
        }
    }
}

/// phase · sqrt(radical) · Σ coeff C^a S^b · e^{imφ} e^{inχ}
#[derive(Clone, Debug)]
pub struct AngularExpression<S: Scalar> {
    terms: Vec<HalfAngleMonomial<S>>,
    m: HalfInt,
    n: S,
    phase: Phase,
    radical: BigInt,
    tol: f64,
}

struct Group<S> {
    a0: S,
    b0: S,
    entries: Vec<(i64, i64, S)>,
}

impl<S: Scalar> AngularExpression<S> {
    pub fn new(terms: Vec<HalfAngleMonomial<S>>, m: HalfInt, n: S) -> Self {
        let mut e = AngularExpression {
            terms,
            m,
            n,
            phase: Phase::ONE,
            radical: BigInt::one(),
            tol: DEFAULT_TOLERANCE,
        };
        e.canonicalize();
        e
    }

    pub fn empty(m: HalfInt, n: S) -> Self {
        AngularExpression::new(Vec::new(), m, n)
    }

    pub fn constant(c: S) -> Self {
        AngularExpression::monomial(c, S::zero(), S::zero())
    }

    pub fn monomial(c: S, cos_exp: S, sin_exp: S) -> Self {
        AngularExpression::new(
            vec![HalfAngleMonomial::new(c, cos_exp, sin_exp)],
            HalfInt::ZERO,
            S::zero(),
        )
    }

    /// cos θ = C² - S²
    pub fn cos_theta() -> Self {
        AngularExpression::new(
            vec![
                HalfAngleMonomial::new(S::one(), S::from_i64(2), S::zero()),
                HalfAngleMonomial::new(-S::one(), S::zero(), S::from_i64(2)),
            ],
            HalfInt::ZERO,
            S::zero(),
        )
    }

    /// sin θ = 2CS
    pub fn sin_theta() -> Self {
        AngularExpression::monomial(S::from_i64(2), S::one(), S::one())
    }

    /// Σ_r coeffs[r] cos^r θ
    pub fn cos_polynomial(coeffs: &[BigRational]) -> Self {
        let c = AngularExpression::<S>::cos_theta();
        let mut power = AngularExpression::constant(S::one());
        let mut terms = Vec::new();
        for q in coeffs {
            if !q.is_zero() {
                let mut p = power.clone();
                p.scale(&S::from_rational(q));
                terms.extend(p.terms);
            }
            power = power.multiply(&c);
        }
        AngularExpression::new(terms, HalfInt::ZERO, S::zero())
    }

    pub fn with_labels(mut self, m: HalfInt, n: S) -> Self {
        self.m = m;
        self.n = n;
        self
    }

    pub fn with_phase(mut self, phase: Phase) -> Self {
        self.phase = self.phase * phase;
        self.normalize_phase();
        self
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tol = tol;
        self.canonicalize();
        self
    }

    pub fn terms(&self) -> &[HalfAngleMonomial<S>] {
        &self.terms
    }

    pub fn m(&self) -> HalfInt {
        self.m
    }

    pub fn n(&self) -> &S {
        &self.n
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    /// Squarefree integer k of the overall factor sqrt(k).
    pub fn radical(&self) -> &BigInt {
        &self.radical
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&mut self, c: &S) {
        for t in &mut self.terms {
            t.coeff = t.coeff.clone() * c.clone();
        }
        self.canonicalize();
    }

    /// Multiplies by sqrt(q), q >= 0.
    pub fn mul_sqrt(&mut self, q: &BigRational) {
        let (r, k) = split_sqrt(q);
        let mut factor = S::from_rational(&r);
        match S::sqrt_of_integer(&k) {
            Some(root) => factor = factor * root,
            None => {
                let (s, free) = square_part(&(&self.radical * &k));
                factor = factor * S::from_rational(&BigRational::from_integer(s));
                self.radical = free;
            }
        }
        self.scale(&factor);
    }

    fn normalize_phase(&mut self) {
        if self.phase.k() >= 4 {
            self.phase = Phase::eighth(self.phase.k() as i64 - 4);
            for t in &mut self.terms {
                t.coeff = -t.coeff.clone();
            }
        }
        if self.terms.is_empty() {
            self.phase = Phase::ONE;
            self.radical = BigInt::one();
        }
    }

    fn canonicalize(&mut self) {
        let tol = self.tol;
        let scale = self.terms.iter().map(|t| t.coeff.magnitude()).fold(0.0, f64::max);
        let mut groups: Vec<Group<S>> = Vec::new();
        for t in self.terms.drain(..) {
            if t.coeff.negligible(scale, tol) {
                continue;
            }
            let mut slot = None;
            for (gi, g) in groups.iter().enumerate() {
                let da = t.cos_exp.integer_offset(&g.a0, tol);
                let db = t.sin_exp.integer_offset(&g.b0, tol);
                if let (Some(da), Some(db)) = (da, db) {
                    if db.rem_euclid(2) == 0 {
                        slot = Some((gi, da, db));
                        break;
                    }
                }
            }
            match slot {
                Some((gi, mut da, mut db)) => {
                    let g = &mut groups[gi];
                    if da < 0 {
                        g.entries.iter_mut().for_each(|e| e.0 -= da);
                        g.a0 = t.cos_exp.clone();
                        da = 0;
                    }
                    if db < 0 {
                        g.entries.iter_mut().for_each(|e| e.1 -= db);
                        g.b0 = t.sin_exp.clone();
                        db = 0;
                    }
                    g.entries.push((da, db, t.coeff));
                }
                None => groups.push(Group {
                    a0: t.cos_exp,
                    b0: t.sin_exp,
                    entries: vec![(0, 0, t.coeff)],
                }),
            }
        }

        let mut out: Vec<(S, S, Vec<(i64, S)>)> = Vec::new();
        for g in groups {
            // polynomial in C after S^2 -> 1 - C^2
            let mut poly: BTreeMap<i64, S> = BTreeMap::new();
            for (da, db, c) in g.entries {
                let k = (db / 2) as u64;
                for t in 0..=k {
                    let mut w = S::from_rational(&BigRational::from_integer(binomial(k, t)));
                    if t % 2 == 1 {
                        w = -w;
                    }
                    let slot = poly.entry(da + 2 * t as i64).or_insert_with(S::zero);
                    *slot = slot.clone() + c.clone() * w;
                }
            }
            let pscale = poly.values().map(|c| c.magnitude()).fold(scale, f64::max);
            poly.retain(|_, c| !c.negligible(pscale, tol));
            let Some((&pmin, _)) = poly.iter().next() else { continue };
            let a0 = g.a0 + S::from_i64(pmin);
            let mut dense: Vec<S> = Vec::new();
            for (p, c) in poly {
                let i = (p - pmin) as usize;
                dense.resize(i + 1, S::zero());
                dense[i] = c;
            }
            let mut b0 = g.b0;
            while let Some(q) = divide_one_minus_square(&dense, pscale, tol) {
                dense = q;
                b0 = b0 + S::from_i64(2);
            }
            let entries = dense
                .into_iter()
                .enumerate()
                .filter(|(_, c)| !c.negligible(pscale, tol))
                .map(|(i, c)| (i as i64, c))
                .collect();
            out.push((a0, b0, entries));
        }
        out.sort_by(|x, y| x.0.total_cmp(&y.0).then_with(|| x.1.total_cmp(&y.1)));
        for (a0, b0, entries) in out {
            for (p, c) in entries {
                self.terms.push(HalfAngleMonomial::new(c, a0.clone() + S::from_i64(p), b0.clone()));
            }
        }
        self.normalize_phase();
    }

    pub fn multiply(&self, other: &AngularExpression<S>) -> AngularExpression<S> {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for x in &self.terms {
            for y in &other.terms {
                terms.push(HalfAngleMonomial::new(
                    x.coeff.clone() * y.coeff.clone(),
                    x.cos_exp.clone() + y.cos_exp.clone(),
                    x.sin_exp.clone() + y.sin_exp.clone(),
                ));
            }
        }
        let (s, radical) = square_part(&(&self.radical * &other.radical));
        let mut e = AngularExpression {
            terms,
            m: self.m + other.m,
            n: self.n.clone() + other.n.clone(),
            phase: self.phase * other.phase,
            radical,
            tol: self.tol.max(other.tol),
        };
        if !s.is_one() {
            let f = S::from_rational(&BigRational::from_integer(s));
            e.terms.iter_mut().for_each(|t| t.coeff = t.coeff.clone() * f.clone());
        }
        e.canonicalize();
        e
    }

    /// Complex conjugate. Coefficients are real, so only the phase and the
    /// labels change.
    pub fn conjugate(&self) -> AngularExpression<S> {
        let mut e = self.clone();
        e.phase = e.phase.conj();
        e.m = -e.m;
        e.n = -e.n;
        e.normalize_phase();
        e
    }

    /// Sum of two expressions with identical labels, phase and radical.
    pub fn add(&self, other: &AngularExpression<S>) -> Result<AngularExpression<S>> {
        if other.is_empty() {
            return Ok(self.clone());
        }
        if self.is_empty() {
            return Ok(other.clone());
        }
        let labels_match = self.m == other.m && (self.n.clone() - other.n.clone()).negligible(1.0, self.tol);
        if !labels_match || self.phase != other.phase || self.radical != other.radical {
            return Err(Error::Domain("cannot add expressions with different labels, phases or radicals".into()));
        }
        let mut e = self.clone();
        e.terms.extend(other.terms.iter().cloned());
        e.tol = self.tol.max(other.tol);
        e.canonicalize();
        Ok(e)
    }

    pub fn negated(&self) -> AngularExpression<S> {
        let mut e = self.clone();
        e.terms.iter_mut().for_each(|t| t.coeff = -t.coeff.clone());
        e
    }

    /// Equality as functions of (φ, θ, χ).
    pub fn same_as(&self, other: &AngularExpression<S>) -> bool {
        match self.add(&other.negated()) {
            Ok(d) => d.is_empty(),
            Err(_) => self.is_empty() && other.is_empty(),
        }
    }

    /// Applies J± = e^{±iφ}{ i[cot θ ∂φ - (1/sin θ) ∂χ] ± ∂θ }.
    ///
    /// On f·e^{imφ}e^{inχ} the bracket gives (-m cot θ + n/sin θ ± ∂θ) f, which
    /// in half-angle form is ½ C^{a-1} S^{b-1} [-m(C² - S²) + n ± (b C² - a S²)].
    pub fn apply_ladder(&self, direction: Ladder) -> AngularExpression<S> {
        let sign = match direction {
            Ladder::Raise => S::one(),
            Ladder::Lower => -S::one(),
        };
        let half = S::from_rational(&rat(1, 2));
        let m = S::from_half(self.m);
        let mut terms = Vec::with_capacity(3 * self.terms.len());
        for t in &self.terms {
            let h = t.coeff.clone() * half.clone();
            let (a, b) = (t.cos_exp.clone(), t.sin_exp.clone());
            let one = S::one();
            terms.push(HalfAngleMonomial::new(
                h.clone() * (-m.clone() + sign.clone() * b.clone()),
                a.clone() + one.clone(),
                b.clone() - one.clone(),
            ));
            terms.push(HalfAngleMonomial::new(
                h.clone() * (m.clone() - sign.clone() * a.clone()),
                a.clone() - one.clone(),
                b.clone() + one.clone(),
            ));
            terms.push(HalfAngleMonomial::new(h * self.n.clone(), a - one.clone(), b - one));
        }
        let mut e = AngularExpression {
            terms,
            m: self.m + direction.step(),
            n: self.n.clone(),
            phase: self.phase,
            radical: self.radical.clone(),
            tol: self.tol,
        };
        e.canonicalize();
        e
    }

    /// Numeric value at (φ, θ, χ). A negative base (θ outside [0, π]) takes
    /// the principal branch |x|^a e^{iπa}.
    pub fn evaluate(&self, phi: f64, theta: f64, chi: f64) -> Result<Complex64> {
        let n = self.n.to_f64().ok_or(Error::Symbolic)?;
        let c = snap((theta / 2.0).cos());
        let s = snap((theta / 2.0).sin());
        let mut sum = Complex64::zero();
        for t in &self.terms {
            let coeff = t.coeff.to_f64().ok_or(Error::Symbolic)?;
            let a = t.cos_exp.to_f64().ok_or(Error::Symbolic)?;
            let b = t.sin_exp.to_f64().ok_or(Error::Symbolic)?;
            sum += coeff * real_pow(c, a, theta)? * real_pow(s, b, theta)?;
        }
        let root = num_traits::ToPrimitive::to_f64(&self.radical).unwrap_or(f64::NAN).sqrt();
        let labels = Complex64::from_polar(1.0, self.m.to_f64() * phi + n * chi);
        Ok(sum * self.phase.to_complex() * root * labels)
    }

    /// Rewrites the expression as Σ_k (α_k + β_k cos θ) sin^k θ.
    ///
    /// Requires integer half-angle exponents with even total degree per term.
    pub fn to_sin_expansion(&self) -> Result<SinExpansion<S>> {
        let tol = self.tol;
        let half = S::from_rational(&rat(1, 2));
        let two = S::from_i64(2);
        let mut acc: BTreeMap<i64, (S, S)> = BTreeMap::new();
        for t in &self.terms {
            let mut a = t.cos_exp.integer_offset(&S::zero(), tol).ok_or(Error::AnalyticPathRequired)?;
            let mut b = t.sin_exp.integer_offset(&S::zero(), tol).ok_or(Error::AnalyticPathRequired)?;
            if (a + b).rem_euclid(2) != 0 {
                return Err(Error::Unsupported(
                    "half-angle monomial of odd total degree has no expansion in cos θ and sin θ".into(),
                ));
            }
            let mut spow = 0i64;
            let mut poly: Vec<S> = vec![t.coeff.clone()];
            if a.rem_euclid(2) == 1 {
                // C S = sin θ / 2
                a -= 1;
                b -= 1;
                spow += 1;
                poly[0] = poly[0].clone() * half.clone();
            }
            let (p, q) = (a / 2, b / 2);
            // C^2 = (1+c)/2 ; C^{-2} = 2(1-c)/s^2
            if p >= 0 {
                poly = poly_mul(&poly, &poly_pow(&[half.clone(), half.clone()], p as u32));
            } else {
                poly = poly_mul(&poly, &poly_pow(&[two.clone(), -two.clone()], (-p) as u32));
                spow += 2 * p;
            }
            // S^2 = (1-c)/2 ; S^{-2} = 2(1+c)/s^2
            if q >= 0 {
                poly = poly_mul(&poly, &poly_pow(&[half.clone(), -half.clone()], q as u32));
            } else {
                poly = poly_mul(&poly, &poly_pow(&[two.clone(), two.clone()], (-q) as u32));
                spow += 2 * q;
            }
            // c^{2u+v} = c^v (1 - s^2)^u
            for (i, pi) in poly.into_iter().enumerate() {
                let (u, v) = ((i / 2) as u64, i % 2);
                for r in 0..=u {
                    let mut w = S::from_rational(&BigRational::from_integer(binomial(u, r)));
                    if r % 2 == 1 {
                        w = -w;
                    }
                    let slot = acc.entry(spow + 2 * r as i64).or_insert_with(|| (S::zero(), S::zero()));
                    if v == 0 {
                        slot.0 = slot.0.clone() + pi.clone() * w;
                    } else {
                        slot.1 = slot.1.clone() + pi.clone() * w;
                    }
                }
            }
        }
        let scale = acc
            .values()
            .map(|(x, y)| x.magnitude().max(y.magnitude()))
            .fold(0.0, f64::max);
        for v in acc.values_mut() {
            if v.0.negligible(scale, tol) {
                v.0 = S::zero();
            }
            if v.1.negligible(scale, tol) {
                v.1 = S::zero();
            }
        }
        acc.retain(|_, v| !(v.0.is_zero() && v.1.is_zero()));
        Ok(SinExpansion { terms: acc, phase: self.phase, radical: self.radical.clone() })
    }
}

fn snap(x: f64) -> f64 {
    if x.abs() < 1e-15 {
        0.0
    } else {
        x
    }
}

fn real_pow(x: f64, e: f64, theta: f64) -> Result<Complex64> {
    if e == 0.0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    if x == 0.0 {
        return if e > 0.0 {
            Ok(Complex64::zero())
        } else {
            Err(Error::EndpointDivergence { exponent: e, theta })
        };
    }
    if x > 0.0 {
        Ok(Complex64::new(x.powf(e), 0.0))
    } else {
        Ok(Complex64::from_polar((-x).powf(e), std::f64::consts::PI * e))
    }
}

fn poly_mul<S: Scalar>(x: &[S], y: &[S]) -> Vec<S> {
    let mut out = vec![S::zero(); x.len() + y.len() - 1];
    for (i, a) in x.iter().enumerate() {
        for (k, b) in y.iter().enumerate() {
            out[i + k] = out[i + k].clone() + a.clone() * b.clone();
        }
    }
    out
}

fn poly_pow<S: Scalar>(x: &[S], k: u32) -> Vec<S> {
    let mut out = vec![S::one()];
    for _ in 0..k {
        out = poly_mul(&out, x);
    }
    out
}

/// Quotient P / (1 - C²) when the division is exact.
fn divide_one_minus_square<S: Scalar>(p: &[S], scale: f64, tol: f64) -> Option<Vec<S>> {
    if p.len() < 3 {
        return None;
    }
    // P = Q - C² Q  =>  p_{i+2} = q_{i+2} - q_i
    let deg = p.len() - 1;
    let mut q = vec![S::zero(); deg - 1];
    for i in (0..=deg - 2).rev() {
        let upper = if i + 2 <= deg - 2 { q[i + 2].clone() } else { S::zero() };
        q[i] = upper - p[i + 2].clone();
    }
    let r0 = p[0].clone() - q[0].clone();
    let r1 = p[1].clone() - if deg >= 3 { q[1].clone() } else { S::zero() };
    if r0.negligible(scale, tol) && r1.negligible(scale, tol) {
        Some(q)
    } else {
        None
    }
}

impl<S: Scalar> fmt::Display for AngularExpression<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        if self.phase != Phase::ONE {
            write!(f, "{}·", self.phase)?;
        }
        if !self.radical.is_one() {
            write!(f, "√{}·", self.radical)?;
        }
        write!(f, "[")?;
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({})", t.coeff)?;
            if !t.cos_exp.is_zero() {
                write!(f, "·c^({})", t.cos_exp)?;
            }
            if !t.sin_exp.is_zero() {
                write!(f, "·s^({})", t.sin_exp)?;
            }
        }
        write!(f, "]")?;
        if self.m != HalfInt::ZERO {
            write!(f, "·e^(i·{}·φ)", self.m)?;
        }
        if !self.n.is_zero() {
            write!(f, "·e^(i·({})·χ)", self.n)?;
        }
        Ok(())
    }
}

/// Σ_k (α_k + β_k cos θ) sin^k θ times phase·sqrt(radical). Negative k are
/// the divergent terms a_m sin^{-m} θ + b_m cos θ sin^{-m} θ with m = -k.
#[derive(Clone, Debug, PartialEq)]
pub struct SinExpansion<S> {
    pub terms: BTreeMap<i64, (S, S)>,
    pub phase: Phase,
    pub radical: BigInt,
}

impl<S: Scalar> SinExpansion<S> {
    pub fn regular(&self) -> BTreeMap<i64, (S, S)> {
        self.terms.range(0..).map(|(k, v)| (*k, v.clone())).collect()
    }

    /// Map from divergence order m >= 1 to (a_m, b_m).
    pub fn divergent(&self) -> BTreeMap<u32, (S, S)> {
        self.terms.range(..0).map(|(k, v)| ((-k) as u32, v.clone())).collect()
    }

    pub fn max_divergence_order(&self) -> u32 {
        self.terms.keys().next().map_or(0, |k| if *k < 0 { (-k) as u32 } else { 0 })
    }

    /// Value of the real part Σ (α + β c) s^k, without phase and radical.
    pub fn evaluate_real(&self, theta: f64) -> Result<f64> {
        let (c, s) = (theta.cos(), theta.sin());
        let mut sum = 0.0;
        for (k, (a, b)) in &self.terms {
            let a = a.to_f64().ok_or(Error::Symbolic)?;
            let b = b.to_f64().ok_or(Error::Symbolic)?;
            sum += (a + b * c) * s.powi(*k as i32);
        }
        Ok(sum)
    }

    pub fn prefactor(&self) -> Complex64 {
        let root = num_traits::ToPrimitive::to_f64(&self.radical).unwrap_or(f64::NAN).sqrt();
        self.phase.to_complex() * root
    }
}
