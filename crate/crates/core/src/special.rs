//! Gamma-function helpers on the whole real line.

use std::f64::consts::PI;

use statrs::function::gamma::ln_gamma;

/// sin(πx) with exact zeros at the integers.
pub fn sin_pi(x: f64) -> f64 {
    let r = x.rem_euclid(2.0);
    if r == 0.0 || r == 1.0 {
        return 0.0;
    }
    if r <= 0.5 {
        (PI * r).sin()
    } else if r <= 1.5 {
        (PI * (1.0 - r)).sin()
    } else {
        (PI * (r - 2.0)).sin()
    }
}

pub fn is_pole(x: f64) -> bool {
    x <= 0.0 && x == x.round()
}

/// (ln|Γ(x)|, sign Γ(x)); None at the poles.
pub fn ln_gamma_signed(x: f64) -> Option<(f64, f64)> {
    if is_pole(x) {
        return None;
    }
    if x >= 0.5 {
        return Some((ln_gamma(x), 1.0));
    }
    // Γ(x) Γ(1-x) = π / sin(πx)
    let s = sin_pi(x);
    let ln = PI.ln() - s.abs().ln() - ln_gamma(1.0 - x);
    Some((ln, s.signum()))
}

pub fn gamma(x: f64) -> f64 {
    match ln_gamma_signed(x) {
        Some((ln, sign)) => sign * ln.exp(),
        None => f64::NAN,
    }
}

/// 1/Γ(x), an entire function.
pub fn rgamma(x: f64) -> f64 {
    match ln_gamma_signed(x) {
        Some((ln, sign)) => sign * (-ln).exp(),
        None => 0.0,
    }
}

/// Π Γ(num_i) / Π Γ(den_i) evaluated in log space. A pole in the
/// denominator gives 0; a pole only in the numerator gives infinity.
pub fn gamma_ratio(num: &[f64], den: &[f64]) -> f64 {
    let mut ln = 0.0;
    let mut sign = 1.0;
    for &d in den {
        match ln_gamma_signed(d) {
            Some((l, s)) => {
                ln -= l;
                sign *= s;
            }
            None => return 0.0,
        }
    }
    for &n in num {
        match ln_gamma_signed(n) {
            Some((l, s)) => {
                ln += l;
                sign *= s;
            }
            None => return f64::INFINITY,
        }
    }
    sign * ln.exp()
}

/// ln(x!) = ln Γ(x+1); exact-table values for small integers.
pub fn ln_factorial(x: f64) -> f64 {
    if x >= 0.0 && x == x.round() && x <= 170.0 {
        let mut acc = 1.0f64;
        let mut ln = 0.0;
        for i in 2..=(x as u32) {
            acc *= i as f64;
            if acc > 1e250 {
                ln += acc.ln();
                acc = 1.0;
            }
        }
        return ln + acc.ln();
    }
    ln_gamma(x + 1.0)
}

/// Legendre polynomial P_k(x).
pub fn legendre(k: u32, x: f64) -> f64 {
    let (mut p0, mut p1) = (1.0, x);
    if k == 0 {
        return p0;
    }
    for l in 1..k {
        let l = l as f64;
        let p2 = ((2.0 * l + 1.0) * x * p1 - l * p0) / (l + 1.0);
        p0 = p1;
        p1 = p2;
    }
    p1
}
