//! Number types: half-integers, quadratic surds with a free-symbol mode,
//! eighth-root-of-unity phases, and the `Scalar` abstraction shared by the
//! exact and floating engines.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub fn rat(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

pub fn rat_int(p: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(p))
}

fn rat_to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

fn fmt_rat(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// A half-integer stored as twice its value.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct HalfInt(i64);

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt(0);
    pub const HALF: HalfInt = HalfInt(1);
    pub const ONE: HalfInt = HalfInt(2);

    pub const fn from_twice(twice: i64) -> Self {
        HalfInt(twice)
    }

    pub const fn int(value: i64) -> Self {
        HalfInt(2 * value)
    }

    pub const fn twice(self) -> i64 {
        self.0
    }

    pub fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    pub fn abs(self) -> Self {
        HalfInt(self.0.abs())
    }

    pub fn to_f64(self) -> f64 {
        self.0 as f64 / 2.0
    }

    pub fn to_rational(self) -> BigRational {
        rat(self.0, 2)
    }

    /// j(j+1)
    pub fn casimir(self) -> BigRational {
        rat(self.0 * (self.0 + 2), 4)
    }

    /// Parses `1/2`, `-3/2`, `2` or a decimal such as `0.5`.
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        let bad = || Error::Parse(format!("not a half-integer: {text:?}"));
        if let Some((p, q)) = t.split_once('/') {
            let p: i64 = p.trim().parse().map_err(|_| bad())?;
            let q: i64 = q.trim().parse().map_err(|_| bad())?;
            return match q {
                1 => Ok(HalfInt(2 * p)),
                2 => Ok(HalfInt(p)),
                _ if q != 0 && (2 * p) % q == 0 => Ok(HalfInt(2 * p / q)),
                _ => Err(bad()),
            };
        }
        if let Ok(i) = t.parse::<i64>() {
            return Ok(HalfInt(2 * i));
        }
        let x: f64 = t.parse().map_err(|_| bad())?;
        let twice = (2.0 * x).round();
        if (2.0 * x - twice).abs() > 1e-12 || !twice.is_finite() {
            return Err(bad());
        }
        Ok(HalfInt(twice as i64))
    }
}

impl FromStr for HalfInt {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        HalfInt::parse(s)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 % 2 == 0 {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

impl Add for HalfInt {
    type Output = HalfInt;
    fn add(self, rhs: HalfInt) -> HalfInt {
        HalfInt(self.0 + rhs.0)
    }
}

impl Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, rhs: HalfInt) -> HalfInt {
        HalfInt(self.0 - rhs.0)
    }
}

impl Neg for HalfInt {
    type Output = HalfInt;
    fn neg(self) -> HalfInt {
        HalfInt(-self.0)
    }
}

/// Writes sqrt(q) as r*sqrt(k) with r rational and k a squarefree positive integer.
pub fn split_sqrt(q: &BigRational) -> (BigRational, BigInt) {
    assert!(!q.is_negative(), "square root of a negative rational");
    if q.is_zero() {
        return (BigRational::zero(), BigInt::one());
    }
    let den = q.denom().clone();
    let prod = q.numer() * &den;
    let (square, free) = square_part(&prod);
    (BigRational::new(square, den), free)
}

/// Splits a positive integer into s^2 * k with k squarefree; returns (s, k).
pub(crate) fn square_part(x: &BigInt) -> (BigInt, BigInt) {
    let mut rem = x.clone();
    let mut s = BigInt::one();
    let mut k = BigInt::one();
    let mut p = BigInt::from(2);
    while &p * &p <= rem {
        let mut count = 0u32;
        while (&rem % &p).is_zero() {
            rem /= &p;
            count += 1;
        }
        for _ in 0..count / 2 {
            s *= &p;
        }
        if count % 2 == 1 {
            k *= &p;
        }
        p += 1;
    }
    k *= rem;
    (s, k)
}

/// Exact scalar of the form c0 + c1*v + c2*v^2 + ... with rational coefficients.
///
/// With a radicand `D`, `v` stands for sqrt(D) (D squarefree) and the value
/// reduces to `a + b*sqrt(D)`. Without one, `v` is a free symbol: the body-fixed
/// projection n kept symbolic.
#[derive(Clone, Debug)]
pub struct Surd {
    coeffs: Vec<BigRational>,
    radicand: Option<BigInt>,
}

impl Surd {
    pub fn rational(q: BigRational) -> Self {
        Surd::normalized(vec![q], None)
    }

    pub fn integer(i: i64) -> Self {
        Surd::rational(rat_int(i))
    }

    /// The free symbol n.
    pub fn symbol() -> Self {
        Surd { coeffs: vec![BigRational::zero(), BigRational::one()], radicand: None }
    }

    /// sqrt(q) for rational q >= 0.
    pub fn sqrt(q: &BigRational) -> Result<Self> {
        if q.is_negative() {
            return Err(Error::Domain(format!("square root of negative {}", fmt_rat(q))));
        }
        let (r, k) = split_sqrt(q);
        if k.is_one() {
            return Ok(Surd::rational(r));
        }
        Ok(Surd::normalized(vec![BigRational::zero(), r], Some(k)))
    }

    /// sqrt(j(j+1)), the stretched body-fixed projection.
    pub fn smax(j: HalfInt) -> Self {
        Surd::sqrt(&j.casimir()).expect("casimir is non-negative")
    }

    fn normalized(mut coeffs: Vec<BigRational>, radicand: Option<BigInt>) -> Self {
        if let Some(d) = &radicand {
            let d = BigRational::from_integer(d.clone());
            let mut k = coeffs.len();
            while k > 2 {
                k -= 1;
                let top = std::mem::take(&mut coeffs[k]);
                coeffs[k - 2] += top * &d;
            }
            coeffs.truncate(2);
        }
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        let radicand = if coeffs.len() >= 2 { radicand } else { None };
        Surd { coeffs, radicand }
    }

    fn has_symbol(&self) -> bool {
        self.coeffs.len() >= 2
    }

    fn joint_radicand(&self, other: &Surd) -> Option<BigInt> {
        match (self.has_symbol(), other.has_symbol()) {
            (true, true) => {
                assert_eq!(
                    self.radicand, other.radicand,
                    "mixing surds over different radicands"
                );
                self.radicand.clone()
            }
            (true, false) => self.radicand.clone(),
            (false, true) => other.radicand.clone(),
            (false, false) => None,
        }
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn radicand(&self) -> Option<&BigInt> {
        self.radicand.as_ref()
    }

    pub fn is_symbolic(&self) -> bool {
        self.has_symbol() && self.radicand.is_none()
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        match self.coeffs.len() {
            0 => Some(BigRational::zero()),
            1 => Some(self.coeffs[0].clone()),
            _ => None,
        }
    }

    pub fn to_f64(&self) -> Option<f64> {
        match (&self.radicand, self.coeffs.len()) {
            (_, 0) => Some(0.0),
            (_, 1) => Some(rat_to_f64(&self.coeffs[0])),
            (Some(d), _) => {
                let root = d.to_f64()?.sqrt();
                Some(rat_to_f64(&self.coeffs[0]) + rat_to_f64(&self.coeffs[1]) * root)
            }
            (None, _) => None,
        }
    }

    /// Exact quotient when it exists in the same ring.
    pub fn checked_div(&self, other: &Surd) -> Option<Surd> {
        if other.is_zero() {
            return None;
        }
        if let Some(q) = other.as_rational() {
            let coeffs = self.coeffs.iter().map(|c| c / &q).collect();
            return Some(Surd::normalized(coeffs, self.radicand.clone()));
        }
        if let Some(d) = other.radicand.clone() {
            let conj = Surd::normalized(
                vec![other.coeffs[0].clone(), -other.coeffs[1].clone()],
                Some(d),
            );
            let norm = (other.clone() * conj.clone()).as_rational()?;
            let num = self.clone() * conj;
            return num.checked_div(&Surd::rational(norm));
        }
        // polynomial long division in the free symbol
        let mut rem = self.coeffs.clone();
        let dv = &other.coeffs;
        if rem.len() < dv.len() {
            return None;
        }
        let lead = dv.last().unwrap().clone();
        let mut quot = vec![BigRational::zero(); rem.len() - dv.len() + 1];
        for i in (0..quot.len()).rev() {
            let c = &rem[i + dv.len() - 1] / &lead;
            for (k, dk) in dv.iter().enumerate() {
                rem[i + k] -= &c * dk;
            }
            quot[i] = c;
        }
        if rem.iter().all(|c| c.is_zero()) {
            Some(Surd::normalized(quot, None))
        } else {
            None
        }
    }

    /// Substitutes a rational value for the free symbol.
    pub fn substitute(&self, value: &Surd) -> Surd {
        if self.radicand.is_some() || !self.has_symbol() {
            return self.clone();
        }
        let mut acc = Surd::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * value.clone() + Surd::rational(c.clone());
        }
        acc
    }
}

impl PartialEq for Surd {
    fn eq(&self, other: &Surd) -> bool {
        if self.has_symbol() && other.has_symbol() && self.radicand != other.radicand {
            return false;
        }
        self.coeffs == other.coeffs
    }
}

impl From<BigRational> for Surd {
    fn from(q: BigRational) -> Self {
        Surd::rational(q)
    }
}

impl From<i64> for Surd {
    fn from(i: i64) -> Self {
        Surd::integer(i)
    }
}

impl From<HalfInt> for Surd {
    fn from(h: HalfInt) -> Self {
        Surd::rational(h.to_rational())
    }
}

impl Add for Surd {
    type Output = Surd;
    fn add(self, rhs: Surd) -> Surd {
        let radicand = self.joint_radicand(&rhs);
        let len = self.coeffs.len().max(rhs.coeffs.len());
        let mut coeffs = vec![BigRational::zero(); len];
        for (i, c) in self.coeffs.into_iter().enumerate() {
            coeffs[i] += c;
        }
        for (i, c) in rhs.coeffs.into_iter().enumerate() {
            coeffs[i] += c;
        }
        Surd::normalized(coeffs, radicand)
    }
}

impl Sub for Surd {
    type Output = Surd;
    fn sub(self, rhs: Surd) -> Surd {
        self + (-rhs)
    }
}

impl Neg for Surd {
    type Output = Surd;
    fn neg(self) -> Surd {
        Surd { coeffs: self.coeffs.into_iter().map(|c| -c).collect(), radicand: self.radicand }
    }
}

impl Mul for Surd {
    type Output = Surd;
    fn mul(self, rhs: Surd) -> Surd {
        if self.coeffs.is_empty() || rhs.coeffs.is_empty() {
            return Surd::zero();
        }
        let radicand = self.joint_radicand(&rhs);
        let mut coeffs = vec![BigRational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (k, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + k] += a * b;
            }
        }
        Surd::normalized(coeffs, radicand)
    }
}

impl Zero for Surd {
    fn zero() -> Self {
        Surd { coeffs: Vec::new(), radicand: None }
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl One for Surd {
    fn one() -> Self {
        Surd::integer(1)
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut parts: Vec<String> = Vec::new();
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let sym = match (k, &self.radicand) {
                (0, _) => String::new(),
                (1, Some(d)) => format!("√{d}"),
                (1, None) => "n".to_string(),
                (_, _) => format!("n^{k}"),
            };
            let text = if sym.is_empty() {
                fmt_rat(c)
            } else {
                let num = c.numer();
                let den = c.denom();
                let lead = if num.is_one() {
                    String::new()
                } else if *num == -BigInt::one() {
                    "-".to_string()
                } else {
                    num.to_string()
                };
                if den.is_one() {
                    format!("{lead}{sym}")
                } else {
                    format!("{lead}{sym}/{den}")
                }
            };
            parts.push(text);
        }
        let mut out = String::new();
        for (i, p) in parts.iter().enumerate() {
            if i == 0 {
                out.push_str(p);
            } else if let Some(rest) = p.strip_prefix('-') {
                out.push_str(" - ");
                out.push_str(rest);
            } else {
                out.push_str(" + ");
                out.push_str(p);
            }
        }
        write!(f, "{out}")
    }
}

/// A phase e^{i k pi/4}.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);

    pub fn eighth(k: i64) -> Self {
        Phase(k.rem_euclid(8) as u8)
    }

    pub fn k(self) -> u8 {
        self.0
    }

    pub fn conj(self) -> Self {
        Phase::eighth(-(self.0 as i64))
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::from_polar(1.0, self.0 as f64 * std::f64::consts::FRAC_PI_4)
    }
}

impl Mul for Phase {
    type Output = Phase;
    fn mul(self, rhs: Phase) -> Phase {
        Phase::eighth(self.0 as i64 + rhs.0 as i64)
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            0 => write!(f, "1"),
            2 => write!(f, "i"),
            4 => write!(f, "-1"),
            6 => write!(f, "-i"),
            k if k < 4 => write!(f, "e^{{i{k}π/4}}"),
            k => write!(f, "e^{{-i{}π/4}}", 8 - k),
        }
    }
}

/// Coefficient ring used by the half-angle algebra.
pub trait Scalar:
    Clone + fmt::Debug + fmt::Display + PartialEq + Send + Sync + Zero + One + Neg<Output = Self> + Sub<Output = Self> + 'static
{
    fn from_rational(q: &BigRational) -> Self;

    fn from_i64(i: i64) -> Self {
        Self::from_rational(&rat_int(i))
    }

    fn from_half(h: HalfInt) -> Self {
        Self::from_rational(&h.to_rational())
    }

    /// True when the value counts as zero relative to `scale`.
    fn negligible(&self, scale: f64, tol: f64) -> bool;

    /// Rough magnitude used to scale tolerances; exact types may return 1.
    fn magnitude(&self) -> f64;

    /// `self - other` when it is an integer.
    fn integer_offset(&self, other: &Self, tol: f64) -> Option<i64>;

    fn to_f64(&self) -> Option<f64>;

    fn to_rational(&self) -> Option<BigRational>;

    fn try_div(&self, other: &Self) -> Option<Self>;

    fn total_cmp(&self, other: &Self) -> Ordering;

    /// sqrt(k) inside the ring, if the ring absorbs square roots of integers.
    fn sqrt_of_integer(k: &BigInt) -> Option<Self>;
}

impl Scalar for Surd {
    fn from_rational(q: &BigRational) -> Self {
        Surd::rational(q.clone())
    }

    fn negligible(&self, _scale: f64, _tol: f64) -> bool {
        self.is_zero()
    }

    fn magnitude(&self) -> f64 {
        1.0
    }

    fn integer_offset(&self, other: &Self, _tol: f64) -> Option<i64> {
        let d = (self.clone() - other.clone()).as_rational()?;
        if d.is_integer() {
            d.numer().to_i64()
        } else {
            None
        }
    }

    fn to_f64(&self) -> Option<f64> {
        Surd::to_f64(self)
    }

    fn to_rational(&self) -> Option<BigRational> {
        self.as_rational()
    }

    fn try_div(&self, other: &Self) -> Option<Self> {
        self.checked_div(other)
    }

    fn total_cmp(&self, other: &Self) -> Ordering {
        if let (Some(a), Some(b)) = (Surd::to_f64(self), Surd::to_f64(other)) {
            if a != b {
                return a.total_cmp(&b);
            }
        }
        let len = self.coeffs.len().max(other.coeffs.len());
        for k in (0..len).rev() {
            let a = self.coeffs.get(k).cloned().unwrap_or_else(BigRational::zero);
            let b = other.coeffs.get(k).cloned().unwrap_or_else(BigRational::zero);
            match a.cmp(&b) {
                Ordering::Equal => continue,
                o => return o,
            }
        }
        Ordering::Equal
    }

    fn sqrt_of_integer(_k: &BigInt) -> Option<Self> {
        None
    }
}

impl Scalar for f64 {
    fn from_rational(q: &BigRational) -> Self {
        rat_to_f64(q)
    }

    fn negligible(&self, scale: f64, tol: f64) -> bool {
        self.abs() <= tol * scale.max(1.0)
    }

    fn magnitude(&self) -> f64 {
        self.abs()
    }

    fn integer_offset(&self, other: &Self, tol: f64) -> Option<i64> {
        let d = self - other;
        let r = d.round();
        let scale = self.abs().max(other.abs()).max(1.0);
        if (d - r).abs() <= tol * scale && r.abs() < 1e15 {
            Some(r as i64)
        } else {
            None
        }
    }

    fn to_f64(&self) -> Option<f64> {
        Some(*self)
    }

    fn to_rational(&self) -> Option<BigRational> {
        None
    }

    fn try_div(&self, other: &Self) -> Option<Self> {
        if *other == 0.0 {
            None
        } else {
            Some(self / other)
        }
    }

    fn total_cmp(&self, other: &Self) -> Ordering {
        f64::total_cmp(self, other)
    }

    fn sqrt_of_integer(k: &BigInt) -> Option<Self> {
        Some(k.to_f64()?.sqrt())
    }
}

/// Binomial coefficient for small arguments.
pub(crate) fn binomial(n: u64, k: u64) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Returns `x` as an exact rational if it is a ratio of small integers.
pub fn rational_from_f64(x: f64, max_den: i64) -> Option<BigRational> {
    if !x.is_finite() {
        return None;
    }
    for q in 1..=max_den {
        let p = (x * q as f64).round();
        if (p / q as f64 - x).abs() <= 1e-12 * x.abs().max(1.0) {
            let g = (p as i64).gcd(&q);
            return Some(rat(p as i64 / g, q / g));
        }
    }
    None
}

/// A body-fixed projection read from text.
#[derive(Clone, Debug, PartialEq)]
pub enum Projection {
    Exact(Surd),
    Real(f64),
}

impl Projection {
    /// Accepts `smax` (√(j(j+1))), `sqrt(q)`, either with a leading minus,
    /// `p/q`, plain decimals, and `n` for the free symbol. Decimals stay
    /// exact; exponent notation falls back to floating point.
    pub fn parse(text: &str, j: HalfInt) -> Result<Self> {
        let t = text.trim();
        let (neg, body) = match t.strip_prefix('-') {
            Some(rest) => (true, rest.trim()),
            None => (false, t),
        };
        let sign = |s: Surd| if neg { -s } else { s };
        if body == "smax" {
            return Ok(Projection::Exact(sign(Surd::smax(j))));
        }
        if body == "n" {
            return Ok(Projection::Exact(sign(Surd::symbol())));
        }
        if let Some(inner) = body.strip_prefix("sqrt(").and_then(|r| r.strip_suffix(')')) {
            let q = parse_rational(inner).ok_or_else(|| Error::Parse(format!("bad radicand in {text:?}")))?;
            return Ok(Projection::Exact(sign(Surd::sqrt(&q)?)));
        }
        if let Some(q) = parse_rational(t) {
            return Ok(Projection::Exact(Surd::rational(q)));
        }
        let x: f64 = t.parse().map_err(|_| Error::Parse(format!("not a projection: {text:?}")))?;
        if !x.is_finite() {
            return Err(Error::Parse(format!("projection must be finite: {text:?}")));
        }
        Ok(Projection::Real(x))
    }

    /// NaN for the free symbol.
    pub fn to_f64(&self) -> f64 {
        match self {
            Projection::Exact(s) => s.to_f64().unwrap_or(f64::NAN),
            Projection::Real(x) => *x,
        }
    }
}

impl fmt::Display for Projection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Projection::Exact(s) => write!(f, "{s}"),
            Projection::Real(x) => write!(f, "{x}"),
        }
    }
}

/// `p`, `p/q` or a plain decimal such as `-1.25`.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let t = text.trim();
    if let Some((p, q)) = t.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        return (!q.is_zero()).then(|| BigRational::new(p, q));
    }
    let (neg, digits) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let (int, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if int.is_empty() && frac.is_empty() || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let numer: BigInt = format!("{int}{frac}").parse().ok()?;
    let q = BigRational::new(numer, BigInt::from(10).pow(frac.len() as u32));
    Some(if neg { -q } else { q })
}
