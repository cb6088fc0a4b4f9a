//! Generalized D^j_{nm}(φ, θ, χ) built by the ladder procedure.
//!
//! Branch A starts from e^{iπ/4} C^{j+n} S^{j-n} at m = j and is lowered;
//! branch B starts from e^{-iπ/4} C^{j-n} S^{j+n} at m = -j and is raised.
//! Each step inside the multiplet divides by sqrt(j(j+1) - m(m±1)).
//! The normalization N_j is left symbolic.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::halfangle::{AngularExpression, HalfAngleMonomial, Ladder, DEFAULT_TOLERANCE};
use crate::numbers::{HalfInt, Phase, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Branch {
    A,
    B,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpinLabel<S> {
    pub j: HalfInt,
    pub n: S,
    pub m: HalfInt,
}

impl<S: Scalar> fmt::Display for SpinLabel<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "D^{}_{{{}, {}}}", self.j, self.n, self.m)
    }
}

#[derive(Clone, Debug)]
pub struct DFunction<S: Scalar> {
    label: SpinLabel<S>,
    branch_a: AngularExpression<S>,
    branch_b: AngularExpression<S>,
}

fn check_label(j: HalfInt, m: HalfInt) -> Result<()> {
    if j.twice() < 0 {
        return Err(Error::InvalidLabel(format!("j = {j} is negative")));
    }
    if m.abs() > j {
        return Err(Error::InvalidLabel(format!("|m| = {} exceeds j = {j}", m.abs())));
    }
    if (j.twice() - m.twice()) % 2 != 0 {
        return Err(Error::InvalidLabel(format!("m = {m} is not in the j = {j} ladder")));
    }
    Ok(())
}

impl<S: Scalar> DFunction<S> {
    pub fn build(j: HalfInt, n: S, m: HalfInt) -> Result<Self> {
        DFunction::build_with_tolerance(j, n, m, DEFAULT_TOLERANCE)
    }

    /// `tol` is the merge tolerance used for floating exponents.
    pub fn build_with_tolerance(j: HalfInt, n: S, m: HalfInt, tol: f64) -> Result<Self> {
        check_label(j, m)?;
        let jj = S::from_half(j);
        let seed_a = AngularExpression::new(
            vec![HalfAngleMonomial::new(S::one(), jj.clone() + n.clone(), jj.clone() - n.clone())],
            j,
            n.clone(),
        )
        .with_tolerance(tol)
        .with_phase(Phase::eighth(1));
        let seed_b = AngularExpression::new(
            vec![HalfAngleMonomial::new(S::one(), jj.clone() - n.clone(), jj + n.clone())],
            -j,
            n.clone(),
        )
        .with_tolerance(tol)
        .with_phase(Phase::eighth(-1));

        let mut d = DFunction {
            label: SpinLabel { j, n: n.clone(), m: j },
            branch_a: seed_a,
            branch_b: AngularExpression::empty(j, n.clone()),
        };
        let mut a = d.branch_a.clone();
        let mut mm = j;
        while mm > m {
            a = step(&a, j, mm, Ladder::Lower);
            mm = mm - HalfInt::ONE;
        }
        let mut b = seed_b;
        let mut mm = -j;
        while mm < m {
            b = step(&b, j, mm, Ladder::Raise);
            mm = mm + HalfInt::ONE;
        }
        d.label.m = m;
        d.branch_a = a;
        d.branch_b = b;
        Ok(d)
    }

    pub fn label(&self) -> &SpinLabel<S> {
        &self.label
    }

    pub fn branch(&self, which: Branch) -> &AngularExpression<S> {
        match which {
            Branch::A => &self.branch_a,
            Branch::B => &self.branch_b,
        }
    }

    pub fn branch_a(&self) -> &AngularExpression<S> {
        &self.branch_a
    }

    pub fn branch_b(&self) -> &AngularExpression<S> {
        &self.branch_b
    }

    /// True for the states m = ±(j+1) reached by laddering past the multiplet.
    pub fn is_edge(&self) -> bool {
        self.label.m.abs() > self.label.j
    }

    /// True when both branches vanish identically.
    pub fn is_null(&self) -> bool {
        self.branch_a.is_empty() && self.branch_b.is_empty()
    }

    /// Normalized neighbour inside the multiplet; past the edge the raw
    /// operator result is kept.
    pub fn ladder(&self, direction: Ladder) -> DFunction<S> {
        let j = self.label.j;
        let m = self.label.m;
        DFunction {
            label: SpinLabel { j, n: self.label.n.clone(), m: m + direction.step() },
            branch_a: step(&self.branch_a, j, m, direction),
            branch_b: step(&self.branch_b, j, m, direction),
        }
    }

    /// D^j_{-n, m}.
    pub fn spin_inversion(&self) -> DFunction<S> {
        let j = self.label.j;
        let m = self.label.m;
        let tol = self.branch_a.tolerance();
        let n = -self.label.n.clone();
        if !self.is_edge() {
            return DFunction::build_with_tolerance(j, n, m, tol).expect("label already validated");
        }
        let inner = if m > j { j } else { -j };
        let base = DFunction::build_with_tolerance(j, n, inner, tol).expect("label already validated");
        base.ladder(if m > j { Ladder::Raise } else { Ladder::Lower })
    }

    pub fn evaluate(&self, phi: f64, theta: f64, chi: f64) -> Result<Complex64> {
        Ok(self.branch_a.evaluate(phi, theta, chi)? + self.branch_b.evaluate(phi, theta, chi)?)
    }
}

fn step<S: Scalar>(e: &AngularExpression<S>, j: HalfInt, m: HalfInt, direction: Ladder) -> AngularExpression<S> {
    let mut out = e.apply_ladder(direction);
    let target = m + direction.step();
    if m.abs() <= j && target.abs() <= j {
        // j(j+1) - m(m±1) = (j ∓ m)(j ± m + 1)
        let (tj, tm) = (j.twice(), m.twice());
        let twice_product = match direction {
            Ladder::Raise => (tj - tm) * (tj + tm + 2),
            Ladder::Lower => (tj + tm) * (tj - tm + 2),
        };
        let factor = crate::numbers::rat(4, twice_product);
        out.mul_sqrt(&factor);
    }
    out
}

impl<S: Scalar> fmt::Display for DFunction<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} = N_{} · (A + B)", self.label, self.label.j)?;
        writeln!(f, "  A = {}", self.branch_a)?;
        write!(f, "  B = {}", self.branch_b)
    }
}
