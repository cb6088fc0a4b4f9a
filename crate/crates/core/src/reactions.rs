//! Particle table and reaction auditing in the internal frame.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::coupling::{internal_cg, rms_internal_cg, RmsPattern, RmsResult};
use crate::error::{Error, Result};
use crate::numbers::{HalfInt, Surd};
use crate::wavefunctions::DFunction;

/// Coefficients below this magnitude count as forbidden.
pub const FORBIDDEN_BELOW: f64 = 1e-10;

pub const BUNDLED_TABLE: &str = include_str!("../data/particles.txt");

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Category {
    /// n = √(s(s+1))
    SType,
    Zero,
    Value(f64),
    Unknown,
}

impl Category {
    pub fn projection(&self, spin: HalfInt) -> Option<f64> {
        match *self {
            Category::SType => Some((spin.to_f64() * (spin.to_f64() + 1.0)).sqrt()),
            Category::Zero => Some(0.0),
            Category::Value(v) => Some(v),
            Category::Unknown => None,
        }
    }
}

impl FromStr for Category {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "stype" | "s" | "s-type" => Ok(Category::SType),
            "zero" | "0" => Ok(Category::Zero),
            "unknown" | "?" => Ok(Category::Unknown),
            other => {
                let v = other.strip_prefix("value:").unwrap_or(other);
                v.parse::<f64>()
                    .map(Category::Value)
                    .map_err(|_| Error::Parse(format!("unknown category '{s}' (stype, zero, unknown or value:<real>)")))
            }
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Category::SType => write!(f, "stype"),
            Category::Zero => write!(f, "zero"),
            Category::Value(v) => write!(f, "value:{v}"),
            Category::Unknown => write!(f, "unknown"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Particle {
    pub name: String,
    pub spin: HalfInt,
    pub category: Category,
    pub self_conjugate: bool,
    pub hypothetical: bool,
    pub mass_mev: Option<f64>,
}

impl Particle {
    pub fn new(name: &str, spin: HalfInt, category: Category) -> Self {
        Particle { name: name.to_string(), spin, category, self_conjugate: false, hypothetical: false, mass_mev: None }
    }

    pub fn projection(&self) -> Option<f64> {
        self.category.projection(self.spin)
    }

    /// Whether D^s_{n,s} is unchanged by n → −n.
    pub fn inversion_invariant(&self) -> Result<bool> {
        let n = self.projection().ok_or_else(|| Error::Indeterminate(format!("{} has unknown n", self.name)))?;
        let psi = DFunction::<f64>::build(self.spin, n, self.spin)?;
        Ok(psi.spin_inversion().label() == psi.label())
    }
}

#[derive(Clone, Debug, Default)]
pub struct ParticleTable {
    particles: Vec<Particle>,
    index: HashMap<String, usize>,
}

impl ParticleTable {
    pub fn bundled() -> Self {
        Self::parse(BUNDLED_TABLE).expect("bundled particle table is valid")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut table = ParticleTable::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| Error::Parse(format!("line {}: {msg}", lineno + 1));
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() < 3 {
                return Err(err(format!("expected 'name twice_spin category', got '{line}'")));
            }
            let twice: i64 = fields[1].parse().map_err(|_| err(format!("bad twice_spin '{}'", fields[1])))?;
            if twice < 0 {
                return Err(err("negative spin".into()));
            }
            let mut p = Particle::new(fields[0], HalfInt::from_twice(twice), fields[2].parse().map_err(|e: Error| err(e.to_string()))?);
            let mut aliases = Vec::new();
            for flag in &fields[3..] {
                match flag.split_once('=') {
                    Some(("alias", list)) => aliases.extend(list.split(',').map(str::to_string)),
                    Some(("mass", v)) => p.mass_mev = Some(v.parse().map_err(|_| err(format!("bad mass '{v}'")))?),
                    None if *flag == "self_conjugate" => p.self_conjugate = true,
                    None if *flag == "hypothetical" => p.hypothetical = true,
                    _ => return Err(err(format!("unknown flag '{flag}'"))),
                }
            }
            if p.self_conjugate && p.category != Category::Zero {
                return Err(err(format!("{} is its own antiparticle but has n category {}", p.name, p.category)));
            }
            let idx = table.particles.len();
            for key in std::iter::once(p.name.clone()).chain(aliases) {
                if table.index.insert(key.to_lowercase(), idx).is_some() {
                    return Err(err(format!("duplicate name '{key}'")));
                }
            }
            table.particles.push(p);
        }
        Ok(table)
    }

    pub fn particles(&self) -> &[Particle] {
        &self.particles
    }

    pub fn classify(&self, name: &str) -> Result<Particle> {
        self.index
            .get(&name.to_lowercase())
            .map(|&i| self.particles[i].clone())
            .ok_or_else(|| Error::UnknownParticle(name.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Participant {
    pub label: String,
    pub particle: Particle,
    pub m: Option<HalfInt>,
}

impl Participant {
    /// m, defaulting to the stretched value m = s.
    pub fn m_or_stretched(&self) -> HalfInt {
        self.m.unwrap_or(self.particle.spin)
    }

    /// `NAME[:CATEGORY][@M]`, where NAME may be `j=<spin>` for an
    /// anonymous angular momentum.
    pub fn parse(token: &str, table: &ParticleTable) -> Result<Self> {
        let (rest, m) = match token.rsplit_once('@') {
            Some((r, m)) => (r, Some(HalfInt::parse(m)?)),
            None => (token, None),
        };
        let (name, cat) = match rest.split_once(':') {
            Some((n, c)) => (n, Some(c.parse::<Category>()?)),
            None => (rest, None),
        };
        let mut particle = match name.strip_prefix("j=") {
            Some(spin) => Particle::new(name, HalfInt::parse(spin)?, Category::SType),
            None => table.classify(name)?,
        };
        if let Some(c) = cat {
            particle.category = c;
        }
        Ok(Participant { label: token.to_string(), particle, m })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Reaction {
    pub parent: Participant,
    pub products: Vec<Participant>,
    /// written as a fusion a + b → c
    pub fusion: bool,
}

impl Reaction {
    pub fn parse(text: &str, table: &ParticleTable) -> Result<Self> {
        let text = text.replace('→', "->");
        let (lhs, rhs) = text
            .split_once("->")
            .ok_or_else(|| Error::Parse(format!("reaction '{text}' needs '->'")))?;
        let side = |s: &str| -> Result<Vec<Participant>> {
            s.split_whitespace().filter(|t| *t != "+").map(|t| Participant::parse(t, table)).collect()
        };
        let (mut left, right) = (side(lhs)?, side(rhs)?);
        match (left.len(), right.len()) {
            (1, n) if n >= 1 => Ok(Reaction { parent: left.remove(0), products: right, fusion: false }),
            (n, 1) if n >= 2 => Ok(Reaction { parent: right.into_iter().next().unwrap(), products: left, fusion: true }),
            _ => Err(Error::Parse(format!("reaction '{text}' must be 1 → n or n → 1"))),
        }
    }
}

impl fmt::Display for Reaction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let products: Vec<_> = self.products.iter().map(|p| p.label.as_str()).collect();
        if self.fusion {
            write!(f, "{} -> {}", products.join(" + "), self.parent.label)
        } else {
            write!(f, "{} -> {}", self.parent.label, products.join(" + "))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Allowed,
    Forbidden,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Allowed => write!(f, "ALLOWED"),
            Verdict::Forbidden => write!(f, "FORBIDDEN"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Route {
    /// ⟨s n | s n, k 0⟩ for emission of an n = 0 boson
    Emission { j: HalfInt, n: f64, k: u32 },
    /// ⟨s_i 0 | s_f 0, s_f 0⟩ through the exchange ∝ ⟨s_f 0 | s_i 0, s_f 0⟩
    Exchange { s_i: HalfInt, s_f: HalfInt },
    /// product projections integrated along the parent axis
    SplitAxis(Box<RmsResult>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReactionReport {
    pub verdict: Verdict,
    /// magnitude only; phases are not asserted
    pub coefficient: f64,
    pub route: Route,
    pub rationale: String,
}

fn verdict_for(c: f64) -> Verdict {
    if c.abs() < FORBIDDEN_BELOW {
        Verdict::Forbidden
    } else {
        Verdict::Allowed
    }
}

fn check_m_conservation(r: &Reaction) -> Result<()> {
    if r.parent.m.is_none() || r.products.iter().any(|p| p.m.is_none()) {
        return Ok(());
    }
    let total = r.products.iter().fold(HalfInt::ZERO, |acc, p| acc + p.m_or_stretched());
    if total != r.parent.m_or_stretched() {
        return Err(Error::Domain(format!("external projections are not conserved: {} ≠ {total}", r.parent.m_or_stretched())));
    }
    Ok(())
}

/// Internal-frame coefficient of a 1 → 2 vertex.
pub fn check_reaction(r: &Reaction) -> Result<ReactionReport> {
    check_m_conservation(r)?;
    let [a, b] = r.products.as_slice() else {
        return Err(Error::Unsupported(format!("{} products; only two-body vertices are covered", r.products.len())));
    };
    let parent = &r.parent.particle;
    let n_parent = parent
        .projection()
        .ok_or_else(|| Error::Indeterminate(format!("parent {} has unknown n", parent.name)))?;

    let all_zero = [parent, &a.particle, &b.particle].iter().all(|p| p.category == Category::Zero);
    if all_zero && a.particle.spin == b.particle.spin && parent.spin.is_integer() {
        let s_f = a.particle.spin;
        let k = (parent.spin.twice() / 2) as u32;
        let c = internal_cg(s_f, 0.0, k)?;
        return Ok(ReactionReport {
            verdict: verdict_for(c),
            coefficient: c.abs(),
            route: Route::Exchange { s_i: parent.spin, s_f },
            rationale: format!(
                "all n = 0: |⟨{} 0|{s_f} 0, {s_f} 0⟩| = |⟨{s_f} 0|{} 0, {s_f} 0⟩| = {:.12}",
                parent.spin,
                parent.spin,
                c.abs()
            ),
        });
    }

    for (fermion, boson) in [(a, b), (b, a)] {
        let (f, bo) = (&fermion.particle, &boson.particle);
        let same_axis = f.projection().is_some_and(|n| (n - n_parent).abs() < 1e-12);
        if bo.category == Category::Zero && bo.spin.is_integer() && f.spin == parent.spin && same_axis {
            let k = (bo.spin.twice() / 2) as u32;
            let c = internal_cg(parent.spin, n_parent, k)?;
            return Ok(ReactionReport {
                verdict: verdict_for(c),
                coefficient: c.abs(),
                route: Route::Emission { j: parent.spin, n: n_parent, k },
                rationale: format!(
                    "n = 0 boson emission keeps n_i = n_f; |⟨{} {:.6}, {} 0|{} {:.6}⟩| = {:.12}",
                    parent.spin, n_parent, bo.spin, parent.spin, n_parent, c.abs()
                ),
            });
        }
    }

    let pattern = RmsPattern::new(a.particle.spin, b.particle.spin, parent.spin, n_parent)?;
    let rms = rms_internal_cg(&pattern)?;
    Ok(ReactionReport {
        verdict: verdict_for(rms.rms),
        coefficient: rms.rms,
        rationale: format!(
            "product projections integrated on the parent axis: ⟨{} {:.6}|{} x, {} {:.6}−x⟩_rms = {:.12}",
            parent.spin, n_parent, a.particle.spin, b.particle.spin, n_parent, rms.rms
        ),
        route: Route::SplitAxis(Box::new(rms)),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConservationSolution {
    pub particle: String,
    pub n: f64,
    pub exact: Option<Surd>,
}

enum Term {
    Exact(BigRational),
    Float(f64),
}

/// n m / √(s(s+1)) for one participant, exact when n is s-type or zero.
fn projection_term(p: &Participant) -> Result<Term> {
    let m = p.m_or_stretched();
    let s = p.particle.spin;
    match p.particle.category {
        Category::SType => Ok(Term::Exact(if s.twice() == 0 { BigRational::zero() } else { m.to_rational() })),
        Category::Zero => Ok(Term::Exact(BigRational::zero())),
        Category::Value(v) => {
            if s.twice() == 0 {
                return if v == 0.0 { Ok(Term::Float(0.0)) } else { Err(Error::Domain(format!("spin-0 {} with n = {v}", p.label))) };
            }
            Ok(Term::Float(v * m.to_f64() / (s.to_f64() * (s.to_f64() + 1.0)).sqrt()))
        }
        Category::Unknown => unreachable!("unknowns are split out before"),
    }
}

fn single_unknown(r: &Reaction) -> Result<(usize, &Participant)> {
    let unknown: Vec<_> = r.products.iter().enumerate().filter(|(_, p)| p.particle.category == Category::Unknown).collect();
    if unknown.len() != 1 || r.parent.particle.category == Category::Unknown {
        return Err(Error::Domain(format!("need exactly one product with unknown n, found {}", unknown.len())));
    }
    Ok(unknown[0])
}

/// Solves Σ_f n_f m_f/√(s_f(s_f+1)) = n_i m_i/√(s_i(s_i+1)) for the one
/// product whose n is unknown. m labels default to m = s.
pub fn conservation_solve(r: &Reaction) -> Result<ConservationSolution> {
    check_m_conservation(r)?;
    let (iu, unknown) = single_unknown(r)?;
    let mu = unknown.m_or_stretched();
    let su = unknown.particle.spin;
    if mu.twice() == 0 || su.twice() == 0 {
        return Err(Error::Indeterminate(format!("{} enters with zero weight (m = {mu}, s = {su})", unknown.label)));
    }
    let mut exact = Some(BigRational::zero());
    let mut float = 0.0;
    let mut add = |t: Term, sign: f64| match t {
        Term::Exact(q) => {
            float += sign * q.to_f64().unwrap_or(f64::NAN);
            if let Some(e) = exact.as_mut() {
                if sign > 0.0 {
                    *e += q;
                } else {
                    *e -= q;
                }
            }
        }
        Term::Float(v) => {
            float += sign * v;
            exact = None;
        }
    };
    add(projection_term(&r.parent)?, 1.0);
    for (i, p) in r.products.iter().enumerate() {
        if i != iu {
            add(projection_term(p)?, -1.0);
        }
    }
    let cas = su.to_f64() * (su.to_f64() + 1.0);
    let n = float * cas.sqrt() / mu.to_f64();
    let exact = exact.map(|q| Surd::rational(q / mu.to_rational()) * Surd::smax(su));
    Ok(ConservationSolution { particle: unknown.particle.name.clone(), n, exact })
}

/// The symmetric split-axis distribution of two equal-spin products gives
/// the unknown product the n of its partner, provided the vertex is allowed.
pub fn conservation_by_symmetry(r: &Reaction) -> Result<ConservationSolution> {
    let (iu, unknown) = single_unknown(r)?;
    let [a, b] = r.products.as_slice() else {
        return Err(Error::Unsupported("the symmetry route needs a two-body vertex".into()));
    };
    let partner = if iu == 0 { b } else { a };
    if a.particle.spin != b.particle.spin {
        return Err(Error::Unsupported("the symmetry route needs equal product spins".into()));
    }
    let n_parent = r
        .parent
        .particle
        .projection()
        .ok_or_else(|| Error::Indeterminate("parent n unknown".into()))?;
    let pattern = RmsPattern::new(a.particle.spin, b.particle.spin, r.parent.particle.spin, n_parent)?;
    if pattern.symmetry_axis().is_none() {
        return Err(Error::Unsupported("distribution has no symmetry axis".into()));
    }
    let rms = rms_internal_cg(&pattern)?;
    if verdict_for(rms.rms) == Verdict::Forbidden {
        return Err(Error::Domain(format!("{} is forbidden; nothing to solve", r)));
    }
    let n = partner
        .particle
        .projection()
        .ok_or_else(|| Error::Indeterminate(format!("partner {} has unknown n", partner.label)))?;
    let exact = match partner.particle.category {
        Category::SType => Some(Surd::smax(partner.particle.spin)),
        Category::Zero => Some(Surd::zero()),
        _ => None,
    };
    Ok(ConservationSolution { particle: unknown.particle.name.clone(), n, exact })
}

/// ⟨1 0 | s_f 0, s_f 0⟩ for an n = 0 parent of spin s_i into two n = 0
/// products, via the exchange to ⟨s_f 0 | s_i 0, s_f 0⟩.
pub fn landau_yang(s_i: HalfInt, s_f: HalfInt) -> Result<ReactionReport> {
    if !s_i.is_integer() {
        return Err(Error::Domain(format!("parent spin {s_i} must be an integer")));
    }
    let c = internal_cg(s_f, 0.0, (s_i.twice() / 2) as u32)?;
    Ok(ReactionReport {
        verdict: verdict_for(c),
        coefficient: c.abs(),
        route: Route::Exchange { s_i, s_f },
        rationale: format!("|⟨{s_f} 0|{s_i} 0, {s_f} 0⟩| = {:.12}", c.abs()),
    })
}

/// ⟨j n | k 0, j n⟩ for emission of a spin-k boson.
pub fn higher_spin_emission(j: HalfInt, k: u32, n: f64) -> Result<f64> {
    internal_cg(j, n, k)
}

/// (1 + 4r)/(2 + 4r) for neutral-to-charged mass ratio r.
pub fn dark_matter_fraction(r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::Domain(format!("mass ratio {r} must be positive")));
    }
    if r.is_infinite() {
        return Ok(1.0);
    }
    Ok((1.0 + 4.0 * r) / (2.0 + 4.0 * r))
}

/// (m_e + m_μ + m_τ)/(√m_e + √m_μ + √m_τ)².
pub fn koide(m_e: f64, m_mu: f64, m_tau: f64) -> Result<f64> {
    if !(m_e > 0.0 && m_mu > 0.0 && m_tau > 0.0) {
        return Err(Error::Domain("lepton masses must be positive".into()));
    }
    let root = m_e.sqrt() + m_mu.sqrt() + m_tau.sqrt();
    Ok((m_e + m_mu + m_tau) / (root * root))
}

/// Koide ratio from the electron, muon and tau masses in a table.
pub fn koide_from_table(table: &ParticleTable) -> Result<f64> {
    let mass = |name: &str| -> Result<f64> {
        table
            .classify(name)?
            .mass_mev
            .ok_or_else(|| Error::Domain(format!("{name} has no mass in the particle table")))
    };
    koide(mass("electron")?, mass("muon")?, mass("tau")?)
}
