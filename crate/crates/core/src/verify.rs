//! The acceptance checklist, shared by the `verify` subcommand and the
//! acceptance test target.

use std::fmt;
use std::time::{Duration, Instant};

use num_traits::Zero;

use crate::coupling::{asymptotic_rotation, default_range, quasiprob_curve, rms_internal_cg, RmsPattern, DEFAULT_J2_CUTOFF, DEFAULT_SAMPLES};
use crate::error::{Error, Result};
use crate::halfangle::Ladder;
use crate::numbers::{rat, HalfInt, Surd};
use crate::observables::{classical_limit_report, expect_pk_exact, g_factor_exact, projection_for_g_exact};
use crate::reactions::{check_reaction, conservation_by_symmetry, conservation_solve, dark_matter_fraction, koide_from_table, ParticleTable, Reaction, Verdict};
use crate::regularization::{expectation, inner_product, norm, InnerProduct, Weight};
use crate::wavefunctions::{Branch, DFunction};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    /// Fails as stated; the failing subset is understood and written up.
    KnownDeviation,
}

#[derive(Clone, Debug)]
pub struct Check {
    pub id: u8,
    pub title: &'static str,
    pub status: Status,
    pub detail: String,
    pub elapsed: Duration,
    pub budget: Option<Duration>,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::KnownDeviation => "FAIL (known deviation)",
        };
        write!(f, "[{tag}] {:>2}. {} ({:.3} s): {}", self.id, self.title, self.elapsed.as_secs_f64(), self.detail)
    }
}

type Outcome = Result<(Status, String)>;

fn status(ok: bool) -> Status {
    if ok {
        Status::Pass
    } else {
        Status::Fail
    }
}

fn q(p: i64, d: i64) -> Surd {
    Surd::rational(rat(p, d))
}

fn branch_pi3(ip: &InnerProduct<Surd>, b: Branch) -> Surd {
    let c = ip.contribution(b, b).real_part();
    if c.pi2.is_zero() {
        c.pi3
    } else {
        // flag a stray π² part as a mismatch
        Surd::symbol()
    }
}

fn spin_half_cos() -> Outcome {
    let d = DFunction::build(HalfInt::HALF, Surd::integer(1), HalfInt::HALF)?;
    let nrm = norm(&d)?;
    let (a, b) = (branch_pi3(&nrm, Branch::A), branch_pi3(&nrm, Branch::B));
    let e = expectation(&d, &Weight::CosTheta)?;
    let exact_ok = e.exact == Some(q(2, 3));
    let float = DFunction::build(HalfInt::HALF, 1.0f64, HalfInt::HALF)?;
    let ef = expectation(&float, &Weight::CosTheta)?.value;
    let ok = a == q(3, 1) && b == q(3, 1) && exact_ok && (ef - 2.0 / 3.0).abs() < 1e-12;
    let shown = e.exact.map(|s| s.to_string()).unwrap_or_else(|| "none".into());
    Ok((status(ok), format!("norm branches ({a})π³ + ({b})π³, ⟨cos θ⟩ = {shown} exact, {ef:.15} float")))
}

fn spin_one_p2() -> Outcome {
    let d = DFunction::build(HalfInt::ONE, q(3, 2), HalfInt::ONE)?;
    let nrm = norm(&d)?;
    let w = inner_product(&d, &d, &Weight::Legendre(2))?;
    let (na, nb) = (branch_pi3(&nrm, Branch::A), branch_pi3(&nrm, Branch::B));
    let (wa, wb) = (branch_pi3(&w, Branch::A), branch_pi3(&w, Branch::B));
    let e = expectation(&d, &Weight::Legendre(2))?;
    let ok = na == q(5, 2) && nb == q(5, 2) && wa == q(19, 16) && wb == q(19, 16) && e.exact == Some(q(19, 40));
    let shown = e.exact.map(|s| s.to_string()).unwrap_or_else(|| "none".into());
    Ok((status(ok), format!("norm branches ({na})π³, ({nb})π³; weighted ({wa})π³, ({wb})π³; ⟨P₂⟩ = {shown}")))
}

fn g_factors() -> Outcome {
    let mut ok = true;
    for twice in 1..=5 {
        let s = HalfInt::from_twice(twice);
        ok &= g_factor_exact(s, &Surd::smax(s))?.exact == Some(Surd::integer(2));
        ok &= g_factor_exact(s, &Surd::zero())?.exact == Some(Surd::integer(1));
    }
    let inv = projection_for_g_exact(HalfInt::from_twice(3), &rat(2, 3))?;
    ok &= inv.imaginary && inv.exact == Some(Surd::sqrt(&rat(5, 4))?);
    Ok((status(ok), format!("g = 2 and g = 1 exact for s = 1/2..5/2; g = 2/3 at s = 3/2 needs n = {inv}")))
}

fn rms_patterns() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, p) in RmsPattern::NAMED {
        let r = rms_internal_cg(&p)?;
        ok &= (r.squared - 1.0).abs() < 1e-8;
        let mut s = format!("{name} rms² = {:.12}", r.squared);
        if p == RmsPattern::TRIPLET_SQRT2 || p == RmsPattern::TRIPLET_ZERO {
            let c = r.closed_form.ok_or_else(|| Error::Unsupported(format!("{name} has no closed form")))?;
            ok &= (c - r.squared).abs() < 1e-10;
            s.push_str(&format!(" (closed form {c:.12})"));
        }
        parts.push(s);
    }
    Ok((status(ok), parts.join("; ")))
}

/// The decay rows; coefficient 1 unless listed as forbidden.
pub const DECAY_ROWS: [(&str, bool); 12] = [
    ("e- -> e- + photon", true),
    ("q -> q + gluon", true),
    ("e- -> e- + Z", true),
    ("W+ -> e+ + nu", true),
    ("Z -> f + fbar", true),
    ("H -> f + fbar", true),
    ("H -> Z + Z", true),
    ("H -> photon + photon", true),
    ("H -> W+ + W-", true),
    ("Z -> photon + photon", false),
    ("Z -> gluon + gluon", false),
    ("j=1 + j=1 -> j=2", true),
];

fn decays() -> Outcome {
    let table = ParticleTable::bundled();
    let mut ok = true;
    let mut bad = Vec::new();
    for (text, allowed) in DECAY_ROWS {
        let r = check_reaction(&Reaction::parse(text, &table)?)?;
        let want = if allowed { 1.0 } else { 0.0 };
        let row_ok = (r.coefficient - want).abs() < 1e-10 && (r.verdict == Verdict::Allowed) == allowed;
        if !row_ok {
            bad.push(format!("{text}: {}", r.coefficient));
        }
        ok &= row_ok;
    }
    let w = Reaction::parse("W+ -> e+ + nu:unknown", &table)?;
    let solved = conservation_solve(&w)?;
    let by_symmetry = conservation_by_symmetry(&w)?;
    let target = 0.75f64.sqrt();
    ok &= (solved.n - target).abs() < 1e-12 && (by_symmetry.n - target).abs() < 1e-12;
    let rows = if bad.is_empty() { format!("{} rows match", DECAY_ROWS.len()) } else { format!("mismatches: {}", bad.join(", ")) };
    Ok((status(ok), format!("{rows}; W⁺ → e⁺ ν gives n_ν = {:.15} (symmetry route {:.15})", solved.n, by_symmetry.n)))
}

/// θ values for the rotation check.
pub fn rotation_angles() -> [f64; 10] {
    std::array::from_fn(|i| 0.1 + 0.3 * i as f64)
}

fn rotation() -> Outcome {
    let mut worst: f64 = 0.0;
    for theta in rotation_angles() {
        let c = asymptotic_rotation(HalfInt::HALF, HalfInt::HALF, HalfInt::HALF, theta, DEFAULT_J2_CUTOFF);
        let s = asymptotic_rotation(HalfInt::HALF, -HalfInt::HALF, HalfInt::HALF, theta, DEFAULT_J2_CUTOFF);
        worst = worst.max((c - (theta / 2.0).cos()).abs()).max((s - (theta / 2.0).sin()).abs());
    }
    Ok((status(worst < 1e-5), format!("max deviation from cos(θ/2), sin(θ/2) over 10 angles: {worst:.2e}")))
}

/// All D^j_{nm} with j ≤ 2 and n, m ∈ {−j, ..., j}.
pub fn integer_step_states(max_twice_j: i64) -> Result<Vec<DFunction<Surd>>> {
    let mut out = Vec::new();
    for tj in 0..=max_twice_j {
        for tn in (-tj..=tj).step_by(2) {
            for tm in (-tj..=tj).step_by(2) {
                let n = Surd::rational(HalfInt::from_twice(tn).to_rational());
                out.push(DFunction::build(HalfInt::from_twice(tj), n, HalfInt::from_twice(tm))?);
            }
        }
    }
    Ok(out)
}

fn orthonormality() -> Outcome {
    let states = integer_step_states(4)?;
    let norms: Vec<f64> = states.iter().map(|d| norm(d).map(|n| n.value().re)).collect::<Result<_>>()?;
    let mut worst: f64 = 0.0;
    for (i, a) in states.iter().enumerate() {
        for (k, b) in states.iter().enumerate() {
            let g = inner_product(a, b, &Weight::One)?.value() / (norms[i] * norms[k]).sqrt();
            let want = if i == k { 1.0 } else { 0.0 };
            worst = worst.max((g - want).norm());
        }
    }
    let mut edges_zero = true;
    for tj in 0..=4 {
        let j = HalfInt::from_twice(tj);
        for tn in (-tj..=tj).step_by(2) {
            let n = Surd::rational(HalfInt::from_twice(tn).to_rational());
            let up = DFunction::build(j, n.clone(), j)?.ladder(Ladder::Raise);
            let down = DFunction::build(j, n, -j)?.ladder(Ladder::Lower);
            for e in [up, down] {
                edges_zero &= norm(&e)?.exact().is_some_and(|p| p.is_zero());
            }
        }
    }
    Ok((
        status(worst < 1e-12 && edges_zero),
        format!("{} states, max |G − 1| = {worst:.1e}; edge norms exactly zero: {edges_zero}", states.len()),
    ))
}

fn top_state_annihilated() -> Outcome {
    let mut ok = true;
    for tj in 1..=3 {
        let j = HalfInt::from_twice(tj);
        let d = DFunction::build(j, Surd::symbol(), j)?;
        ok &= d.ladder(Ladder::Raise).ladder(Ladder::Lower).is_null();
    }
    Ok((status(ok), "J₋J₊ D^j_{n,j} is the empty expression for j = 1/2, 1, 3/2 with n symbolic".into()))
}

/// Outcome of comparing the two expectation-value routes at one state.
#[derive(Clone, Debug)]
pub struct PathComparison {
    pub j: HalfInt,
    pub n: Surd,
    pub m: HalfInt,
    pub k: u32,
    pub regularized: Option<Surd>,
    pub analytic: Surd,
}

impl PathComparison {
    pub fn agrees(&self) -> bool {
        self.regularized.as_ref() == Some(&self.analytic)
    }

    /// n − j is a non-zero integer and |n| > j.
    pub fn integer_offset_outside(&self) -> bool {
        let nq = self.n.as_rational().expect("rational grid");
        let off = &nq - self.j.to_rational();
        let inside = nq.clone() * nq.clone() <= self.j.to_rational() * self.j.to_rational();
        off.is_integer() && !inside
    }
}

/// Both expectation routes for j ∈ {1/2, 1, 3/2}, n ∈ {−4, −7/2, ..., 4},
/// every m and k ∈ {1, 2}. Cases where the analytic coefficient is
/// undefined (k = 2 at j = 1/2) are skipped.
pub fn path_comparisons() -> Result<Vec<PathComparison>> {
    let mut out = Vec::new();
    for tj in 1..=3 {
        let j = HalfInt::from_twice(tj);
        for tn in -8..=8 {
            let n = q(tn, 2);
            for tm in (-tj..=tj).step_by(2) {
                let m = HalfInt::from_twice(tm);
                let d = DFunction::build(j, n.clone(), m)?;
                for k in 1..=2u32 {
                    let analytic = match expect_pk_exact(j, &n, m, k) {
                        Ok(a) => a,
                        Err(Error::SingularCoefficient(_)) => continue,
                        Err(e) => return Err(e),
                    };
                    let regularized = expectation(&d, &Weight::Legendre(k))?.exact;
                    out.push(PathComparison { j, n: n.clone(), m, k, regularized, analytic });
                }
            }
        }
    }
    Ok(out)
}

fn cross_engine() -> Outcome {
    let all = path_comparisons()?;
    let disagree: Vec<_> = all.iter().filter(|c| !c.agrees()).collect();
    let unexplained = disagree.iter().filter(|c| !c.integer_offset_outside()).count();
    let worked = all
        .iter()
        .any(|c| c.j == HalfInt::ONE && c.n == q(3, 2) && c.m == HalfInt::ONE && c.k == 2 && c.agrees());
    let detail = format!(
        "{} of {} cases agree exactly (spin-1, n = 3/2 case included: {worked}); {} disagree, all with n − j a non-zero integer and |n| > j; {unexplained} other",
        all.len() - disagree.len(),
        all.len(),
        disagree.len() - unexplained,
    );
    let st = if disagree.is_empty() && worked {
        Status::Pass
    } else if unexplained == 0 && worked {
        Status::KnownDeviation
    } else {
        Status::Fail
    };
    Ok((st, detail))
}

fn arithmetic() -> Outcome {
    let f1 = dark_matter_fraction(1.0)?;
    let f113 = dark_matter_fraction(1.13)?;
    let k = koide_from_table(&ParticleTable::bundled())?;
    let ok = (f1 - 5.0 / 6.0).abs() < 1e-15 && (f113 - 0.8466).abs() < 5e-4 && (k - 2.0 / 3.0).abs() < 2e-3;
    Ok((status(ok), format!("fraction(1) = {f1:.6}, fraction(1.13) = {f113:.6}, Koide = {k:.6}")))
}

fn quasiprobability() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, p) in RmsPattern::NAMED {
        let c = quasiprob_curve(&p, default_range(&p), DEFAULT_SAMPLES)?;
        ok &= (c.area() - 1.0).abs() < 1e-6;
        parts.push(format!("{name} area {:.9}", c.area()));
        if p == RmsPattern::TRIPLET_SQRT2 {
            let axis_ok = c.symmetry_axis.is_some_and(|a| (a - 0.5f64.sqrt()).abs() < 1e-15);
            let defect = c.symmetry_defect().unwrap_or(f64::INFINITY);
            let neg = c.negative_outside_window();
            ok &= axis_ok && defect < 1e-10 && c.max_density() > 1.0 && neg > 0;
            parts.push(format!(
                "{name}: symmetry defect {defect:.1e}, max density {:.4}, {neg} negative samples outside the window",
                c.max_density()
            ));
        }
    }
    Ok((status(ok), parts.join("; ")))
}

/// j values of the classical-limit trend.
pub const CLASSICAL_JS: [i64; 5] = [1, 2, 5, 10, 50];
pub const CLASSICAL_M_FRACTION: f64 = 0.5;

fn classical_trend() -> Outcome {
    let js: Vec<HalfInt> = CLASSICAL_JS.iter().map(|&j| HalfInt::int(j)).collect();
    let rows = classical_limit_report(2, CLASSICAL_M_FRACTION, &js)?;
    let ok = rows.windows(2).all(|w| w[1].deviation < w[0].deviation);
    let devs: Vec<String> = rows.iter().map(|r| format!("j={} m={}: {:.3e}", r.j, r.m, r.deviation)).collect();
    Ok((status(ok), devs.join(", ")))
}

type Runner = fn() -> Outcome;

const CHECKS: [(u8, &str, Runner, Option<u64>); 12] = [
    (1, "spin-1/2, n = 1: branch norms and ⟨cos θ⟩", spin_half_cos, Some(1000)),
    (2, "spin-1, n = 3/2: branch norms, weighted branches and ⟨P₂⟩", spin_one_p2, Some(1000)),
    (3, "g-factor and its inversion", g_factors, Some(1000)),
    (4, "internal-frame rms coefficients", rms_patterns, Some(5000)),
    (5, "decay-vertex coefficients and neutrino projection", decays, None),
    (6, "spinor rotation from the large-j₂ coupling limit", rotation, None),
    (7, "orthonormality and edge-state norms", orthonormality, None),
    (8, "J₋J₊ on the top state with symbolic n", top_state_annihilated, None),
    (9, "regularized and analytic expectation values agree", cross_engine, None),
    (10, "dark-matter fraction and Koide ratio", arithmetic, None),
    (11, "quasiprobability curves", quasiprobability, None),
    (12, "⟨P₂⟩ approaches the classical value as j grows", classical_trend, None),
];

pub const CRITERIA: usize = CHECKS.len();

pub fn run(id: u8) -> Result<Check> {
    let &(id, title, runner, budget) = CHECKS
        .iter()
        .find(|c| c.0 == id)
        .ok_or_else(|| Error::Domain(format!("no criterion {id}; expected 1..={CRITERIA}")))?;
    let budget = budget.map(Duration::from_millis);
    let t0 = Instant::now();
    let outcome = runner();
    let elapsed = t0.elapsed();
    let (mut status, mut detail) = match outcome {
        Ok(o) => o,
        Err(e) => (Status::Fail, format!("error: {e}")),
    };
    if let Some(b) = budget {
        if elapsed > b {
            status = Status::Fail;
            detail.push_str(&format!("; over the {:.0} s budget", b.as_secs_f64()));
        }
    }
    Ok(Check { id, title, status, detail, elapsed, budget })
}

pub fn run_all() -> Vec<Check> {
    CHECKS.iter().map(|c| run(c.0).expect("listed id")).collect()
}
