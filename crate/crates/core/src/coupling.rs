//! Clebsch-Gordan coefficients: standard, continuous-projection squares,
//! internal-frame coefficients, rms internal coefficients and the
//! quasiprobability curves behind them.

use std::f64::consts::SQRT_2;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::numbers::HalfInt;
use crate::quadrature::{integrate_line, integrate_tail, QuadResult};
use crate::special::{gamma_ratio, legendre, ln_factorial};

const EPS: f64 = 1e-9;


/// Racah's sum with real arguments. The summation index runs over the
/// integers allowed by the integer-valued factorials; real-valued
/// arguments enter through ln Γ. Returns 0 for projection violations.
fn racah(j1: f64, m1: f64, j2: f64, m2: f64, j: f64, m: f64) -> f64 {
    if (m - m1 - m2).abs() > EPS {
        return 0.0;
    }
    let tri = [j1 + j2 - j, j1 - j2 + j, -j1 + j2 + j];
    if tri.iter().any(|&t| t < -EPS) {
        return 0.0;
    }
    let proj = [j + m, j - m, j1 + m1, j1 - m1, j2 + m2, j2 - m2];
    if proj.iter().any(|&t| t < -EPS) {
        return 0.0;
    }
    let lnf = |x: f64| ln_factorial(if x.abs() < EPS { 0.0 } else { x });
    let pre = 0.5
        * ((2.0 * j + 1.0).ln() + tri.iter().map(|&t| lnf(t)).sum::<f64>() - lnf(j1 + j2 + j + 1.0)
            + proj.iter().map(|&t| lnf(t)).sum::<f64>());

    let lo = [0.0, j2 - j - m1, j1 - j + m2].into_iter().fold(f64::MIN, f64::max);
    let hi = [j1 + j2 - j, j1 - m1, j2 + m2].into_iter().fold(f64::MAX, f64::min);
    let kmin = (lo - EPS).ceil().max(0.0) as i64;
    let kmax = (hi + EPS).floor() as i64;
    let mut sum = 0.0;
    for k in kmin..=kmax {
        let kf = k as f64;
        let den = [kf, j1 + j2 - j - kf, j1 - m1 - kf, j2 + m2 - kf, j - j2 + m1 + kf, j - j1 - m2 + kf];
        if den.iter().any(|&t| t < -EPS) {
            continue;
        }
        let ln = pre - den.iter().map(|&t| lnf(t)).sum::<f64>();
        let term = ln.exp();
        sum += if k % 2 == 0 { term } else { -term };
    }
    sum
}

/// (−1)^p for an integer p.
fn parity(p: HalfInt) -> f64 {
    if (p.twice() / 2).rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

fn casimir(j: HalfInt) -> f64 {
    j.to_f64() * (j.to_f64() + 1.0)
}

fn projection_ok(j: HalfInt, m: HalfInt) -> bool {
    m.abs() <= j && (j - m).is_integer()
}

/// ⟨j1 m1, j2 m2 | j3 (m1+m2)⟩ with Condon-Shortley phases. Invalid
/// projections or a broken triangle give 0.
pub fn cg(j1: HalfInt, m1: HalfInt, j2: HalfInt, m2: HalfInt, j3: HalfInt) -> f64 {
    let m3 = m1 + m2;
    if j1.twice() < 0 || j2.twice() < 0 || j3.twice() < 0 {
        return 0.0;
    }
    if !projection_ok(j1, m1) || !projection_ok(j2, m2) || !projection_ok(j3, m3) {
        return 0.0;
    }
    if !(j1 + j2 - j3).is_integer() || j3 > j1 + j2 || j3 < (j1 - j2).abs() {
        return 0.0;
    }
    racah(j1.to_f64(), m1.to_f64(), j2.to_f64(), m2.to_f64(), j3.to_f64(), m3.to_f64())
}

/// Wigner 3j symbol (j1 j2 j3; m1 m2 m3).
pub fn wigner_3j(j1: HalfInt, j2: HalfInt, j3: HalfInt, m1: HalfInt, m2: HalfInt, m3: HalfInt) -> f64 {
    if (m1 + m2 + m3).twice() != 0 {
        return 0.0;
    }
    parity(j1 - j2 - m3) / (j3.to_f64() * 2.0 + 1.0).sqrt() * cg(j1, m1, j2, m2, j3)
}

fn falling(y: f64, i: u32) -> f64 {
    (0..i).map(|t| y - t as f64).product()
}

/// ⟨j1 x1, j2 x2 | j3 (x1+x2)⟩² continued to real projections through
/// Γ(x+1). Only the three stretches j3 = j1+j2, j1+j2−1, j1+j2−2 are
/// available.
pub fn cg_sq_continuous(j1: HalfInt, x1: f64, j2: HalfInt, x2: f64, j3: HalfInt) -> Result<f64> {
    let d = j1 + j2 - j3;
    let (a, b) = (j1.to_f64(), j2.to_f64());
    let big = a + b;
    let m = x1 + x2;
    let facs = [a + x1 + 1.0, a - x1 + 1.0, b + x2 + 1.0, b - x2 + 1.0];
    match d.twice() {
        0 => Ok(gamma_ratio(&[2.0 * a + 1.0, 2.0 * b + 1.0, big + m + 1.0, big - m + 1.0], &[&[2.0 * big + 1.0][..], &facs].concat())),
        2 if j1.twice() >= 1 && j2.twice() >= 1 => {
            let w = 2.0 * (b * x1 - a * x2);
            if w == 0.0 {
                // double zero against at most a simple Γ pole at |M| = J + 1
                return Ok(0.0);
            }
            let g = gamma_ratio(&[2.0 * a, 2.0 * b, big + m, big - m], &[&[2.0 * big + 1.0][..], &facs].concat());
            Ok(w * w * (2.0 * big - 1.0) * g)
        }
        4 if j1.twice() >= 2 && j2.twice() >= 2 => {
            let f = |y: f64, z: f64, i: u32| falling(y, i) * falling(z, 2 - i);
            let u = |i| f(a - x1, a + x1, i) * f(b + x2, b - x2, i);
            let norm = 2.0 * a * (2.0 * a - 1.0) * 2.0 * b * (2.0 * b - 1.0);
            let pre = norm / (2.0 * (2.0 * big - 2.0) * (2.0 * big - 1.0));
            let bracket = (u(0) - 2.0 * u(1) + u(2)) / norm;
            if bracket == 0.0 {
                return Ok(0.0);
            }
            let g = gamma_ratio(&[2.0 * a + 1.0, 2.0 * b + 1.0, big - m - 1.0, big + m - 1.0], &[&[2.0 * big - 3.0][..], &facs].concat());
            Ok(pre * bracket * bracket * g)
        }
        _ => Err(Error::Unsupported(format!(
            "continuous-projection square for j3 = {j3} from {j1} ⊗ {j2}; only j3 = j1+j2, j1+j2-1, j1+j2-2 are available"
        ))),
    }
}

/// ⟨j n, k 0 | j n⟩ with cos θ_n = n/√(j(j+1)), for k ≤ 4.
pub fn internal_cg(j: HalfInt, n: f64, k: u32) -> Result<f64> {
    if k == 0 {
        return Ok(1.0);
    }
    let jf = j.to_f64();
    let cas = jf * (jf + 1.0);
    if cas <= 0.0 {
        return Err(Error::SingularCoefficient(format!("⟨{j} n, {k} 0|{j} n⟩ needs j(j+1) > 0")));
    }
    let c = n / cas.sqrt();
    let singular = |d: f64| -> Result<()> {
        if d <= 0.0 {
            Err(Error::SingularCoefficient(format!("⟨{j} n, {k} 0|{j} n⟩ is undefined at j = {j}")))
        } else {
            Ok(())
        }
    };
    match k {
        1 => Ok(c),
        2 => {
            let d = (jf - 0.5) * (jf + 1.5);
            singular(d)?;
            Ok((cas / d).sqrt() * legendre(2, c))
        }
        3 => {
            let d = (jf - 1.0) * (jf - 0.5) * (jf + 1.5) * (jf + 2.0);
            singular(d)?;
            Ok(cas / d.sqrt() * (legendre(3, c) + c / (2.0 * cas)))
        }
        4 => {
            let d = (jf - 1.5) * (jf - 1.0) * (jf - 0.5) * (jf + 1.5) * (jf + 2.0) * (jf + 2.5);
            singular(d)?;
            Ok((cas.powi(3) / d).sqrt() * (legendre(4, c) + (25.0 * c * c - 6.0) / (8.0 * cas)))
        }
        _ => Err(Error::Unsupported(format!("internal coefficient for k = {k}; closed forms exist for k ≤ 4"))),
    }
}

/// One D^j_{nm} label in a triple product.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DLabel {
    pub j: HalfInt,
    pub n: f64,
    pub m: HalfInt,
}

impl DLabel {
    pub fn new(j: HalfInt, n: f64, m: HalfInt) -> Self {
        Self { j, n, m }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TripleProduct {
    /// n-side 3j factor. For real n the (−1)^{j−n} phase has no meaning; in
    /// the shared-axis case it is replaced by the m-side (−1)^{j−m} so the
    /// product is phase-free, and split-axis factors are magnitudes.
    pub n_factor: f64,
    pub m_factor: f64,
    /// n_factor · m_factor, in units of 8π²
    pub value: f64,
}

/// ⟨D1 D2 | D3⟩ / 8π² as a product of an n-side and an m-side 3j factor.
pub fn triple_product(d1: DLabel, d2: DLabel, d3: DLabel) -> Result<TripleProduct> {
    let zero = TripleProduct { n_factor: 0.0, m_factor: 0.0, value: 0.0 };
    if (d1.m + d2.m - d3.m).twice() != 0 || (d1.n + d2.n - d3.n).abs() > EPS {
        return Ok(zero);
    }
    let m_factor = wigner_3j(d1.j, d2.j, d3.j, -d1.m, -d2.m, d3.m);
    let shared = d1.j == d3.j && d2.n.abs() < EPS && d2.j.is_integer() && d2.j.twice() >= 0;
    let n_factor = if shared {
        // (j k j; −n 0 n) = (−1)^{j−n} ⟨j n, k 0|j n⟩ / √(2j+1)
        let k = (d2.j.twice() / 2) as u32;
        parity(d1.j - d1.m) * internal_cg(d1.j, d1.n, k)? / (2.0 * d1.j.to_f64() + 1.0).sqrt()
    } else {
        cg_sq_continuous(d1.j, -d1.n, d2.j, -d2.n, d3.j)?.abs().sqrt() / (2.0 * d3.j.to_f64() + 1.0).sqrt()
    };
    Ok(TripleProduct { n_factor, m_factor, value: n_factor * m_factor })
}

/// ⟨D^j_{nm} D^k_{00}|D^j_{nm}⟩ / ⟨D^j_{nm} D^0_{00}|D^j_{nm}⟩ through two
/// triple products.
pub fn triple_product_ratio(j: HalfInt, n: f64, m: HalfInt, k: u32) -> Result<f64> {
    let d = DLabel::new(j, n, m);
    let w = |k: u32| DLabel::new(HalfInt::from_twice(2 * k as i64), 0.0, HalfInt::ZERO);
    let num = triple_product(d, w(k), d)?;
    let den = triple_product(d, w(0), d)?;
    if den.value == 0.0 {
        return Err(Error::Indeterminate(format!("the k = 0 triple product vanishes for m = {m}")));
    }
    Ok(num.value / den.value)
}

/// Γ-function integral
/// ∫ dx / [Γ(α+x) Γ(β−x) Γ(γ+x) Γ(δ−x)]
///   = Γ(α+β+γ+δ−3) / [Γ(α+β−1) Γ(β+γ−1) Γ(γ+δ−1) Γ(δ+α−1)],
/// valid for α+β+γ+δ > 3.
pub fn barnes_integral(alpha: f64, beta: f64, gamma: f64, delta: f64) -> Result<f64> {
    let s = alpha + beta + gamma + delta;
    if s <= 3.0 {
        return Err(Error::Domain(format!("α+β+γ+δ = {s} must exceed 3")));
    }
    Ok(gamma_ratio(
        &[s - 3.0],
        &[alpha + beta - 1.0, beta + gamma - 1.0, gamma + delta - 1.0, delta + alpha - 1.0],
    ))
}

/// A split-axis vertex j3 n3 → (j1 x, j2 n3−x) integrated over x.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RmsPattern {
    pub j1: HalfInt,
    pub j2: HalfInt,
    pub j3: HalfInt,
    pub n3: f64,
}

impl RmsPattern {
    /// ⟨1 √2 | ½ n′, ½ n″⟩
    pub const TRIPLET_SQRT2: Self = Self { j1: HalfInt::HALF, j2: HalfInt::HALF, j3: HalfInt::ONE, n3: SQRT_2 };
    /// ⟨1 0 | ½ n′, ½ n″⟩
    pub const TRIPLET_ZERO: Self = Self { j1: HalfInt::HALF, j2: HalfInt::HALF, j3: HalfInt::ONE, n3: 0.0 };
    /// ⟨0 0 | ½ n′, ½ n″⟩
    pub const SINGLET_HALF: Self = Self { j1: HalfInt::HALF, j2: HalfInt::HALF, j3: HalfInt::ZERO, n3: 0.0 };
    /// ⟨0 0 | 1 n′, 1 n″⟩
    pub const SINGLET_ONE: Self = Self { j1: HalfInt::ONE, j2: HalfInt::ONE, j3: HalfInt::ZERO, n3: 0.0 };

    pub const NAMED: [(&'static str, Self); 4] = [
        ("triplet-sqrt2", Self::TRIPLET_SQRT2),
        ("triplet-zero", Self::TRIPLET_ZERO),
        ("singlet-half", Self::SINGLET_HALF),
        ("singlet-one", Self::SINGLET_ONE),
    ];

    pub fn new(j1: HalfInt, j2: HalfInt, j3: HalfInt, n3: f64) -> Result<Self> {
        let d = j1 + j2 - j3;
        if !(0..=4).contains(&d.twice()) || d.twice() % 2 != 0 || j3 < (j1 - j2).abs() {
            return Err(Error::Unsupported(format!(
                "split-axis vertex {j3} → {j1} ⊗ {j2}; only j3 = j1+j2, j1+j2-1, j1+j2-2 are available"
            )));
        }
        Ok(Self { j1, j2, j3, n3 })
    }

    pub fn name(&self) -> Option<&'static str> {
        Self::NAMED.iter().find(|(_, p)| p == self).map(|(n, _)| *n)
    }

    pub fn density(&self, x: f64) -> f64 {
        // the constructor restricts the stretch, so this cannot fail
        cg_sq_continuous(self.j1, x, self.j2, self.n3 - x, self.j3).unwrap_or(f64::NAN)
    }

    /// The product projections mirror each other about n3/2 when j1 = j2.
    pub fn symmetry_axis(&self) -> Option<f64> {
        (self.j1 == self.j2).then_some(self.n3 / 2.0)
    }

    /// Range of x where both |x| ≤ |s1| and |n3 − x| ≤ |s2|.
    pub fn allowed_window(&self) -> Option<(f64, f64)> {
        let s1 = self.j1.to_f64() * (self.j1.to_f64() + 1.0);
        let s2 = self.j2.to_f64() * (self.j2.to_f64() + 1.0);
        let lo = (-s1.sqrt()).max(self.n3 - s2.sqrt());
        let hi = s1.sqrt().min(self.n3 + s2.sqrt());
        (lo <= hi).then_some((lo, hi))
    }

    fn center(&self) -> f64 {
        self.symmetry_axis().unwrap_or(self.n3 / 2.0)
    }

    /// The rms squared from the Γ-function integral, when one applies.
    pub fn closed_form(&self) -> Option<Result<f64>> {
        let (a, b, big) = (self.j1.to_f64(), self.j2.to_f64(), self.j1.to_f64() + self.j2.to_f64());
        let m = self.n3;
        match (self.j1 + self.j2 - self.j3).twice() {
            0 => {
                let pre = gamma_ratio(&[2.0 * a + 1.0, 2.0 * b + 1.0, big + m + 1.0, big - m + 1.0], &[2.0 * big + 1.0]);
                Some(barnes_integral(a + 1.0, a + 1.0, b - m + 1.0, b + m + 1.0).map(|v| pre * v))
            }
            2 if self.j1.twice() == 1 && self.j2.twice() == 1 && m == 0.0 => {
                // 2x² = ½ − 2(½+x)(½−x) splits the integrand into two Γ integrals
                let r = (|| {
                    let first = barnes_integral(1.5, 1.5, 1.5, 1.5)?;
                    let second = barnes_integral(0.5, 0.5, 1.5, 1.5)?;
                    Ok(0.5 * first - 2.0 * second)
                })();
                Some(r)
            }
            _ => None,
        }
    }

    /// Magnitude of the shared-axis coefficient reached by exchanging the
    /// decaying spin with a product spin.
    pub fn exchange_partner(&self) -> Result<f64> {
        if self.j3.twice() == 0 {
            // |⟨s n, 0 0|s n⟩|
            return internal_cg(self.j1, casimir(self.j1).sqrt(), 0).map(f64::abs);
        }
        // |⟨s1 n1, j3 0|s1 n1⟩| with the product at n1 = |s1|
        let k = (self.j3.twice() / 2) as u32;
        internal_cg(self.j1, casimir(self.j1).sqrt(), k).map(f64::abs)
    }
}

impl fmt::Display for RmsPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.name() {
            Some(n) => write!(f, "{n}"),
            None => write!(f, "{} {} <- {} {}", self.j3, self.n3, self.j1, self.j2),
        }
    }
}

impl FromStr for RmsPattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase();
        let alias = match key.as_str() {
            "1sqrt2" => "triplet-sqrt2",
            "10" => "triplet-zero",
            "00-half" => "singlet-half",
            "00-one" => "singlet-one",
            other => other,
        };
        Self::NAMED
            .iter()
            .find(|(n, _)| *n == alias)
            .map(|(_, p)| *p)
            .ok_or_else(|| {
                let names: Vec<_> = Self::NAMED.iter().map(|(n, _)| *n).collect();
                Error::Parse(format!("unknown pattern '{s}' (expected one of {})", names.join(", ")))
            })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RmsResult {
    pub pattern: RmsPattern,
    /// ∫ cg_sq_continuous dx by quadrature
    pub squared: f64,
    pub rms: f64,
    pub quadrature: QuadResult,
    pub closed_form: Option<f64>,
}

pub const RMS_TOLERANCE: f64 = 1e-10;

/// √(∫ ⟨j1 x, j2 n3−x | j3 n3⟩² dx), reported as a magnitude.
pub fn rms_internal_cg(pattern: &RmsPattern) -> Result<RmsResult> {
    let f = |x: f64| pattern.density(x);
    let q = integrate_line(&f, pattern.center(), RMS_TOLERANCE)?;
    let closed_form = pattern.closed_form().transpose()?;
    Ok(RmsResult { pattern: *pattern, squared: q.value, rms: q.value.abs().sqrt(), quadrature: q, closed_form })
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuasiprobCurve {
    pub pattern: RmsPattern,
    pub points: Vec<(f64, f64)>,
    pub allowed_window: Option<(f64, f64)>,
    pub symmetry_axis: Option<f64>,
    /// trapezoid rule over the sampled range
    pub sampled_area: f64,
    /// integral of the density beyond the sampled range
    pub tail_mass: f64,
}

impl QuasiprobCurve {
    pub fn area(&self) -> f64 {
        self.sampled_area + self.tail_mass
    }

    pub fn max_density(&self) -> f64 {
        self.points.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Sampled points with negative density outside the allowed window.
    pub fn negative_outside_window(&self) -> usize {
        let Some((lo, hi)) = self.allowed_window else {
            return self.points.iter().filter(|p| p.1 < 0.0).count();
        };
        self.points.iter().filter(|p| p.1 < 0.0 && (p.0 < lo || p.0 > hi)).count()
    }

    /// Largest |ρ(a+t) − ρ(a−t)| over the samples.
    pub fn symmetry_defect(&self) -> Option<f64> {
        let a = self.symmetry_axis?;
        let worst = self
            .points
            .iter()
            .map(|&(x, y)| (y - self.pattern.density(2.0 * a - x)).abs())
            .fold(0.0, f64::max);
        Some(worst)
    }
}

pub const DEFAULT_HALF_RANGE: f64 = 20.0;
pub const DEFAULT_SAMPLES: usize = 40_001;

pub fn default_range(pattern: &RmsPattern) -> (f64, f64) {
    let c = pattern.center();
    (c - DEFAULT_HALF_RANGE, c + DEFAULT_HALF_RANGE)
}

pub fn quasiprob_curve(pattern: &RmsPattern, x_range: (f64, f64), samples: usize) -> Result<QuasiprobCurve> {
    let (lo, hi) = x_range;
    if samples < 2 || !(lo < hi) {
        return Err(Error::Domain(format!("need samples ≥ 2 and lo < hi, got {samples} on [{lo}, {hi}]")));
    }
    let h = (hi - lo) / (samples - 1) as f64;
    let points: Vec<(f64, f64)> = (0..samples)
        .map(|i| {
            let x = if i + 1 == samples { hi } else { lo + i as f64 * h };
            (x, pattern.density(x))
        })
        .collect();
    let sampled_area = points.windows(2).map(|w| 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1)).sum();
    let f = |x: f64| pattern.density(x);
    let c = pattern.center();
    let right = integrate_tail(&f, hi, 1.0, c, 1e-9)?;
    let left = integrate_tail(&f, lo, -1.0, c, 1e-9)?;
    Ok(QuasiprobCurve {
        pattern: *pattern,
        points,
        allowed_window: pattern.allowed_window(),
        symmetry_axis: pattern.symmetry_axis(),
        sampled_area,
        tail_mass: left.value + right.value,
    })
}

/// d^{j1}_{m1′ m1}(θ) as the j2 → ∞ limit of
/// (−1)^{j1−m1} ⟨j1 m1, j2 m2 | j2+m1′, m1+m2⟩ at m2 = j2 cos θ,
/// extrapolated in 1/j2 from j2 and 2·j2. With the phase taken on m1′
/// instead the limit is the transposed matrix d_{m1 m1′}.
pub fn asymptotic_rotation(j1: HalfInt, m1p: HalfInt, m1: HalfInt, theta: f64, j2_cutoff: f64) -> f64 {
    if !projection_ok(j1, m1p) || !projection_ok(j1, m1) {
        return 0.0;
    }
    let sign = parity(j1 - m1);
    let c = theta.cos();
    let at = |big: f64| {
        let m2 = big * c;
        sign * racah(j1.to_f64(), m1.to_f64(), big, m2, big + m1p.to_f64(), m1.to_f64() + m2)
    };
    2.0 * at(2.0 * j2_cutoff) - at(j2_cutoff)
}

pub const DEFAULT_J2_CUTOFF: f64 = 1e6;

#[cfg(test)]
mod tests {
    use super::*;

    fn h(t: i64) -> HalfInt {
        HalfInt::from_twice(t)
    }

    #[test]
    fn textbook_values() {
        assert!((cg(h(1), h(1), h(1), h(-1), h(2)) - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((cg(h(2), h(2), h(2), h(-2), h(0)) - (1.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert!((cg(h(2), h(0), h(2), h(0), h(0)) + (1.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert!((cg(h(3), h(1), h(0), h(0), h(3)) - 1.0).abs() < 1e-15);
        // ⟨1 1, ½ −½ | ½ ½⟩ = √(2/3)
        assert!((cg(h(2), h(2), h(1), h(-1), h(1)) - (2.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert_eq!(cg(h(1), h(1), h(1), h(1), h(0)), 0.0);
        assert_eq!(cg(h(2), h(0), h(2), h(0), h(8)), 0.0);
    }

    #[test]
    fn continuous_square_hits_integer_steps() {
        for (tj1, tj2) in [(1, 1), (2, 1), (2, 2), (3, 2), (4, 2), (3, 3), (4, 4)] {
            for d in 0..=2i64 {
                let tj3 = tj1 + tj2 - 2 * d;
                if tj3 < (tj1 - tj2).abs() {
                    continue;
                }
                for tm1 in (-tj1..=tj1).step_by(2) {
                    for tm2 in (-tj2..=tj2).step_by(2) {
                        if (tm1 + tm2).abs() > tj3 {
                            continue;
                        }
                        let want = cg(h(tj1), h(tm1), h(tj2), h(tm2), h(tj3)).powi(2);
                        let got = cg_sq_continuous(h(tj1), tm1 as f64 / 2.0, h(tj2), tm2 as f64 / 2.0, h(tj3)).unwrap();
                        assert!((want - got).abs() < 1e-12, "{tj1} {tm1} {tj2} {tm2} {tj3}: {want} vs {got}");
                    }
                }
            }
        }
    }

    #[test]
    fn singlet_one_density_matches_sine_form() {
        for x in [0.3f64, 0.77, 1.9, -4.2, 12.5] {
            let pi = std::f64::consts::PI;
            let want = (1.0 - 3.0 * x * x).powi(2) * (pi * x).sin().powi(2) / (3.0 * pi * pi * x * x * (1.0 - x * x).powi(2));
            let got = RmsPattern::SINGLET_ONE.density(x);
            assert!((want - got).abs() < 1e-13 * want.abs().max(1.0), "{x}");
        }
    }

    #[test]
    fn unsupported_stretch() {
        assert!(matches!(cg_sq_continuous(h(4), 0.0, h(4), 0.0, h(0)), Err(Error::Unsupported(_))));
    }

    #[test]
    fn internal_examples() {
        let s2 = SQRT_2;
        assert!((internal_cg(h(2), s2, 1).unwrap() - 1.0).abs() < 1e-15);
        assert!((internal_cg(h(2), s2, 2).unwrap() - 1.6f64.sqrt()).abs() < 1e-15);
        assert!((internal_cg(h(2), 0.0, 2).unwrap() + 0.4f64.sqrt()).abs() < 1e-15);
        assert!(matches!(internal_cg(h(1), 0.5, 2), Err(Error::SingularCoefficient(_))));
        assert!(matches!(internal_cg(h(2), 0.5, 3), Err(Error::SingularCoefficient(_))));
        assert!(matches!(internal_cg(h(0), 0.0, 1), Err(Error::SingularCoefficient(_))));
    }

    #[test]
    fn internal_matches_standard_at_integer_steps() {
        for tj in 1..=8 {
            for k in 0..=4u32 {
                if (k as i64) > tj {
                    continue;
                }
                for tm in (-tj..=tj).step_by(2) {
                    let want = cg(h(tj), h(tm), h(2 * k as i64), h(0), h(tj));
                    match internal_cg(h(tj), tm as f64 / 2.0, k) {
                        Ok(v) => assert!((v - want).abs() < 1e-13, "j={tj}/2 m={tm}/2 k={k}"),
                        Err(_) => assert!(want.abs() < 1e-12),
                    }
                }
            }
        }
    }

    #[test]
    fn ratio_examples() {
        assert!((triple_product_ratio(h(1), 1.0, h(1), 1).unwrap() - 2.0 / 3.0).abs() < 1e-14);
        assert!((triple_product_ratio(h(2), 1.5, h(2), 2).unwrap() - 19.0 / 40.0).abs() < 1e-14);
    }

    #[test]
    fn barnes_domain() {
        assert!(barnes_integral(0.5, 0.5, 0.5, 0.5).is_err());
        assert!((barnes_integral(1.5, 1.5, 1.5, 1.5).unwrap() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn patterns_parse() {
        assert_eq!("00-one".parse::<RmsPattern>().unwrap(), RmsPattern::SINGLET_ONE);
        assert_eq!("triplet-sqrt2".parse::<RmsPattern>().unwrap(), RmsPattern::TRIPLET_SQRT2);
        assert!("bogus".parse::<RmsPattern>().is_err());
    }

    #[test]
    fn rotation_identity() {
        let v = asymptotic_rotation(h(1), h(1), h(1), 0.0, DEFAULT_J2_CUTOFF);
        // ln Γ near 10⁶ carries ~1e-9 absolute rounding
        assert!((v - 1.0).abs() < 1e-7, "{v}");
        let v = asymptotic_rotation(h(1), h(-1), h(1), 0.0, DEFAULT_J2_CUTOFF);
        assert!(v.abs() < 1e-7);
    }
}
