//! `spinfn` command-line front end.

mod record;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use spinfn::coupling::{cg, cg_sq_continuous, default_range, internal_cg, quasiprob_curve, rms_internal_cg, RmsPattern, DEFAULT_SAMPLES};
use spinfn::numbers::{parse_rational, Projection};
use spinfn::observables::{classical_limit_report, expect_pk, expect_pk_exact, g_factor, g_factor_exact, projection_for_g, projection_for_g_exact};
use spinfn::reactions::{
    check_reaction, conservation_by_symmetry, conservation_solve, dark_matter_fraction, higher_spin_emission, koide, koide_from_table, landau_yang,
    ParticleTable, Reaction, ReactionReport, Route,
};
use spinfn::regularization::{expectation, inner_product, InnerProduct, Weight};
use spinfn::verify::{self, Status};
use spinfn::{DFunction, Error, HalfInt, Scalar};

use record::{float, sig17, Record};

const PARTICLES_ENV: &str = "SPINFN_PARTICLES";

#[derive(Parser)]
#[command(name = "spinfn", version, about = "Spin wavefunctions with real body-fixed projection")]
struct Cli {
    /// particle table to use instead of the bundled one
    #[arg(long, global = true, env = PARTICLES_ENV)]
    particles: Option<PathBuf>,

    /// print one JSON record per result
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum WeightArg {
    One,
    Cos,
    P1,
    P2,
    P3,
    P4,
}

impl WeightArg {
    fn weight(self) -> Weight {
        match self {
            WeightArg::One => Weight::One,
            WeightArg::Cos | WeightArg::P1 => Weight::CosTheta,
            WeightArg::P2 => Weight::Legendre(2),
            WeightArg::P3 => Weight::Legendre(3),
            WeightArg::P4 => Weight::Legendre(4),
        }
    }

    fn k(self) -> u32 {
        match self {
            WeightArg::One => 0,
            WeightArg::Cos | WeightArg::P1 => 1,
            WeightArg::P2 => 2,
            WeightArg::P3 => 3,
            WeightArg::P4 => 4,
        }
    }
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum PathArg {
    Auto,
    Regularized,
    Analytic,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum OutFormat {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Build D^j_{n m}; evaluate it when --theta is given
    Dfunc {
        j: String,
        #[arg(allow_hyphen_values = true)]
        n: String,
        #[arg(allow_hyphen_values = true)]
        m: String,
        #[arg(long, allow_hyphen_values = true)]
        theta: Option<f64>,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        phi: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        chi: f64,
    },
    /// Regularized ⟨D^j_{nm}| W |D^j'_{n'm'}⟩ in units of |N|²
    Inner {
        j: String,
        #[arg(allow_hyphen_values = true)]
        n: String,
        #[arg(allow_hyphen_values = true)]
        m: String,
        j2: String,
        #[arg(allow_hyphen_values = true)]
        n2: String,
        #[arg(allow_hyphen_values = true)]
        m2: String,
        #[arg(long, value_enum, default_value = "one")]
        weight: WeightArg,
    },
    /// ⟨W⟩ in D^j_{nm}
    Expect {
        j: String,
        #[arg(allow_hyphen_values = true)]
        n: String,
        #[arg(allow_hyphen_values = true)]
        m: String,
        #[arg(long, value_enum, default_value = "cos")]
        weight: WeightArg,
        #[arg(long, value_enum, default_value = "auto")]
        path: PathArg,
    },
    /// Clebsch-Gordan coefficients
    Cg {
        /// ⟨j n, k 0 | j n⟩ from `J N K`
        #[arg(long, conflicts_with = "continuous")]
        internal: bool,
        /// squared coefficient at real projections from `J1 X1 J2 X2 J3`
        #[arg(long)]
        continuous: bool,
        /// `J1 M1 J2 M2 J3` by default
        #[arg(allow_hyphen_values = true, required = true)]
        args: Vec<String>,
    },
    /// Root-mean-square split-axis coefficient of a named pattern or `j1,j2,j3,n3`
    Rms { pattern: String },
    /// g = 1 + n²/(s(s+1)), or the projection for a given g with --invert
    Gfactor {
        #[arg(long)]
        invert: bool,
        s: String,
        #[arg(allow_hyphen_values = true)]
        value: String,
    },
    /// Audit reactions given inline or one per line in a file
    React {
        input: String,
        /// solve projection conservation for the unknown-n participant
        #[arg(long)]
        solve: bool,
    },
    /// Sample the quasiprobability density of a pattern
    Quasiprob {
        pattern: String,
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
        #[arg(long, value_enum, default_value = "csv")]
        out: OutFormat,
        #[arg(long, num_args = 2, allow_hyphen_values = true, value_names = ["LO", "HI"])]
        range: Option<Vec<f64>>,
    },
    /// Vertex coefficient for emitting an n = 0 boson of spin k
    Emission {
        j: String,
        k: u32,
        #[arg(allow_hyphen_values = true)]
        n: String,
    },
    /// ⟨s_i 0 | s_f 0, s_f 0⟩ selection rule
    LandauYang { s_i: String, s_f: String },
    /// Neutral fraction for a neutral-to-charged mass ratio
    Fraction { ratio: f64 },
    /// Koide ratio from three masses, or from the particle table
    Koide {
        #[arg(num_args = 3, value_names = ["ME", "MMU", "MTAU"])]
        masses: Option<Vec<f64>>,
    },
    /// ⟨P_k⟩ against its classical value along a sequence of j
    Classical {
        #[arg(long, default_value_t = 2)]
        k: u32,
        #[arg(long, default_value_t = 0.5)]
        fraction: f64,
        #[arg(required = true)]
        js: Vec<String>,
    },
    /// List the particle table
    Particles,
    /// Run the acceptance checklist
    Verify {
        #[arg(long)]
        criterion: Option<u8>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Accuracy { .. } => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}

fn half(s: &str) -> spinfn::Result<HalfInt> {
    HalfInt::parse(s)
}

fn emit(cli: &Cli, records: &[Record]) {
    for r in records {
        if cli.json {
            println!("{}", r.to_json());
        } else {
            print!("{}", r.to_text());
        }
    }
}

fn table(cli: &Cli) -> spinfn::Result<ParticleTable> {
    match &cli.particles {
        Some(p) => ParticleTable::load(p),
        None => Ok(ParticleTable::bundled()),
    }
}

fn run(cli: &Cli) -> spinfn::Result<ExitCode> {
    let records = match &cli.command {
        Command::Dfunc { j, n, m, theta, phi, chi } => vec![dfunc(j, n, m, *theta, *phi, *chi)?],
        Command::Inner { j, n, m, j2, n2, m2, weight } => vec![inner([j, n, m, j2, n2, m2], *weight)?],
        Command::Expect { j, n, m, weight, path } => vec![expect(j, n, m, *weight, *path)?],
        Command::Cg { internal, continuous, args } => vec![coupling(*internal, *continuous, args)?],
        Command::Rms { pattern } => vec![rms(pattern)?],
        Command::Gfactor { invert, s, value } => vec![gfactor(*invert, s, value)?],
        Command::React { input, solve } => react(&table(cli)?, input, *solve)?,
        Command::Quasiprob { pattern, samples, out, range } => {
            quasiprob(pattern, *samples, *out, range.as_deref())?;
            return Ok(ExitCode::SUCCESS);
        }
        Command::Emission { j, k, n } => {
            let j = half(j)?;
            let n = Projection::parse(n, j)?.to_f64();
            let c = higher_spin_emission(j, *k, n)?;
            let mut r = Record::new("emission").input("j", j.to_string()).input("k", *k).input("n", float(n));
            r.output("coefficient", float(c));
            vec![r]
        }
        Command::LandauYang { s_i, s_f } => {
            let rep = landau_yang(half(s_i)?, half(s_f)?)?;
            vec![report_record("landau-yang", &format!("{s_i} -> {s_f} {s_f}"), &rep)]
        }
        Command::Fraction { ratio } => {
            let mut r = Record::new("fraction").input("ratio", float(*ratio));
            r.output("fraction", float(dark_matter_fraction(*ratio)?));
            vec![r]
        }
        Command::Koide { masses } => {
            let (k, source) = match masses.as_deref() {
                Some([a, b, c]) => (koide(*a, *b, *c)?, "arguments"),
                _ => (koide_from_table(&table(cli)?)?, "particle table"),
            };
            let mut r = Record::new("koide").input("masses", source);
            r.output("koide", float(k));
            vec![r]
        }
        Command::Classical { k, fraction, js } => {
            let js = js.iter().map(|s| half(s)).collect::<spinfn::Result<Vec<_>>>()?;
            classical_limit_report(*k, *fraction, &js)?
                .into_iter()
                .map(|row| {
                    let mut r = Record::new("classical").input("k", *k).input("fraction", float(*fraction));
                    r.output("j", row.j.to_string());
                    r.output("m", row.m.to_string());
                    r.output("expectation", float(row.expectation));
                    r.output("classical", float(row.classical));
                    r.output("deviation", float(row.deviation));
                    r
                })
                .collect()
        }
        Command::Particles => table(cli)?
            .particles()
            .iter()
            .map(|p| {
                let mut r = Record::new("particles");
                r.output("name", p.name.clone());
                r.output("spin", p.spin.to_string());
                r.output("category", p.category.to_string());
                if p.hypothetical {
                    r.output("hypothetical", true);
                }
                r
            })
            .collect(),
        Command::Verify { criterion } => return Ok(run_verify(cli, *criterion)?),
    };
    emit(cli, &records);
    Ok(ExitCode::SUCCESS)
}

fn dfunc(j: &str, n: &str, m: &str, theta: Option<f64>, phi: f64, chi: f64) -> spinfn::Result<Record> {
    let (j, m) = (half(j)?, half(m)?);
    let n = Projection::parse(n, j)?;
    let mut r = Record::new("dfunc").input("j", j.to_string()).input("n", n.to_string()).input("m", m.to_string());
    let value = match &n {
        Projection::Exact(s) => {
            let d = DFunction::build(j, s.clone(), m)?;
            r.output("expression", d.to_string().trim_end().to_string());
            theta.map(|t| d.evaluate(phi, t, chi)).transpose()?
        }
        Projection::Real(x) => {
            let d = DFunction::build(j, *x, m)?;
            r.output("expression", d.to_string().trim_end().to_string());
            theta.map(|t| d.evaluate(phi, t, chi)).transpose()?
        }
    };
    if let (Some(t), Some(v)) = (theta, value) {
        r.output("theta", float(t));
        r.output("re", float(v.re));
        r.output("im", float(v.im));
        r.output("unit", "N_j");
    }
    Ok(r)
}

fn inner_record<S: Scalar>(r: &mut Record, ip: &InnerProduct<S>) {
    let v = ip.value();
    r.number("value", ip.exact().map(|e| e.to_string()), v.re);
    if v.im != 0.0 {
        r.output("value_im", float(v.im));
    }
    r.output("unit", "|N|²");
}

fn inner(labels: [&String; 6], weight: WeightArg) -> spinfn::Result<Record> {
    let (j1, m1, j2, m2) = (half(labels[0])?, half(labels[2])?, half(labels[3])?, half(labels[5])?);
    let (n1, n2) = (Projection::parse(labels[1], j1)?, Projection::parse(labels[4], j2)?);
    let w = weight.weight();
    let mut r = Record::new("inner")
        .input("left", format!("D^{j1}_{{{n1}, {m1}}}"))
        .input("right", format!("D^{j2}_{{{n2}, {m2}}}"))
        .input("weight", w.to_string());
    match (&n1, &n2) {
        (Projection::Exact(a), Projection::Exact(b)) => {
            let ip = inner_product(&DFunction::build(j1, a.clone(), m1)?, &DFunction::build(j2, b.clone(), m2)?, &w)?;
            inner_record(&mut r, &ip);
        }
        _ => {
            let ip = inner_product(&DFunction::build(j1, n1.to_f64(), m1)?, &DFunction::build(j2, n2.to_f64(), m2)?, &w)?;
            inner_record(&mut r, &ip);
        }
    }
    r.path("regularized");
    Ok(r)
}

fn regularized(j: HalfInt, n: &Projection, m: HalfInt, w: &Weight) -> spinfn::Result<(Option<String>, f64)> {
    match n {
        Projection::Exact(s) => {
            let e = expectation(&DFunction::build(j, s.clone(), m)?, w)?;
            Ok((e.exact.map(|x| x.to_string()), e.value))
        }
        Projection::Real(x) => {
            let e = expectation(&DFunction::build(j, *x, m)?, w)?;
            Ok((None, e.value))
        }
    }
}

fn analytic(j: HalfInt, n: &Projection, m: HalfInt, k: u32) -> spinfn::Result<(Option<String>, f64)> {
    match n {
        Projection::Exact(s) if !s.is_symbolic() => {
            let e = expect_pk_exact(j, s, m, k)?;
            Ok((Some(e.to_string()), e.to_f64().unwrap_or(f64::NAN)))
        }
        _ => Ok((None, expect_pk(j, n.to_f64(), m, k)?)),
    }
}

fn expect(j: &str, n: &str, m: &str, weight: WeightArg, path: PathArg) -> spinfn::Result<Record> {
    let (j, m) = (half(j)?, half(m)?);
    let n = Projection::parse(n, j)?;
    let w = weight.weight();
    let mut r = Record::new("expect").input("j", j.to_string()).input("n", n.to_string()).input("m", m.to_string()).input("weight", w.to_string());
    let (route, (exact, value)) = match path {
        PathArg::Regularized => ("regularized", regularized(j, &n, m, &w)?),
        PathArg::Analytic => ("analytic", analytic(j, &n, m, weight.k())?),
        PathArg::Auto => match regularized(j, &n, m, &w) {
            Ok(v) => ("regularized", v),
            Err(Error::AnalyticPathRequired) => ("analytic", analytic(j, &n, m, weight.k())?),
            Err(e) => return Err(e),
        },
    };
    r.number("value", exact.clone(), value);
    if route == "regularized" && path == PathArg::Auto {
        // both routes apply; say so when they part ways
        if let Ok((aexact, avalue)) = analytic(j, &n, m, weight.k()) {
            let same = match (&exact, &aexact) {
                (Some(a), Some(b)) => a == b,
                _ => (avalue - value).abs() <= 1e-12 * value.abs().max(1.0),
            };
            if !same {
                r.number("analytic", aexact, avalue);
                r.output("note", "the subtraction scheme and the coupling formula differ for this state");
            }
        }
    }
    r.path(route);
    Ok(r)
}

fn coupling(internal: bool, continuous: bool, args: &[String]) -> spinfn::Result<Record> {
    let need = |k: usize| {
        if args.len() == k {
            Ok(())
        } else {
            Err(Error::Parse(format!("expected {k} arguments, got {}", args.len())))
        }
    };
    if internal {
        need(3)?;
        let j = half(&args[0])?;
        let n = Projection::parse(&args[1], j)?.to_f64();
        let k: u32 = args[2].parse().map_err(|_| Error::Parse(format!("k must be a non-negative integer, got {}", args[2])))?;
        let mut r = Record::new("cg").input("j", j.to_string()).input("n", float(n)).input("k", k);
        r.output("coefficient", float(internal_cg(j, n, k)?));
        r.path("internal");
        return Ok(r);
    }
    need(5)?;
    let (j1, j2, j3) = (half(&args[0])?, half(&args[2])?, half(&args[4])?);
    if continuous {
        let x1 = Projection::parse(&args[1], j1)?.to_f64();
        let x2 = Projection::parse(&args[3], j2)?.to_f64();
        let mut r = Record::new("cg").input("j1", j1.to_string()).input("x1", float(x1)).input("j2", j2.to_string()).input("x2", float(x2)).input("j3", j3.to_string());
        r.output("squared", float(cg_sq_continuous(j1, x1, j2, x2, j3)?));
        r.path("continuous");
        return Ok(r);
    }
    let (m1, m2) = (half(&args[1])?, half(&args[3])?);
    let mut r = Record::new("cg").input("j1", j1.to_string()).input("m1", m1.to_string()).input("j2", j2.to_string()).input("m2", m2.to_string()).input("j3", j3.to_string());
    r.output("coefficient", float(cg(j1, m1, j2, m2, j3)));
    r.path("external");
    Ok(r)
}

fn parse_pattern(text: &str) -> spinfn::Result<RmsPattern> {
    if !text.contains(',') {
        return text.parse();
    }
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let [a, b, c, n] = parts.as_slice() else {
        return Err(Error::Parse(format!("custom pattern '{text}' must be j1,j2,j3,n3")));
    };
    let j3 = half(c)?;
    RmsPattern::new(half(a)?, half(b)?, j3, Projection::parse(n, j3)?.to_f64())
}

fn rms(pattern: &str) -> spinfn::Result<Record> {
    let p = parse_pattern(pattern)?;
    let res = rms_internal_cg(&p)?;
    let mut r = Record::new("rms").input("pattern", p.to_string());
    r.output("squared", float(res.squared));
    r.output("rms", float(res.rms));
    r.output("error_estimate", float(res.quadrature.error));
    if let Some(c) = res.closed_form {
        r.output("closed_form", float(c));
    }
    r.path("quadrature");
    Ok(r)
}

fn gfactor(invert: bool, s: &str, value: &str) -> spinfn::Result<Record> {
    let s = half(s)?;
    if invert {
        let mut r = Record::new("gfactor").input("s", s.to_string()).input("g", value);
        let p = match parse_rational(value) {
            Some(g) => projection_for_g_exact(s, &g)?,
            None => projection_for_g(s, value.trim().parse().map_err(|_| Error::Parse(format!("not a number: {value}")))?)?,
        };
        r.number("n", p.exact.as_ref().map(|e| if p.imaginary { format!("i·{e}") } else { e.to_string() }), p.magnitude);
        r.output("imaginary", p.imaginary);
        return Ok(r);
    }
    let n = Projection::parse(value, s)?;
    let mut r = Record::new("gfactor").input("s", s.to_string()).input("n", n.to_string());
    let g = match &n {
        Projection::Exact(x) if !x.is_symbolic() => g_factor_exact(s, x)?,
        _ => g_factor(s, n.to_f64())?,
    };
    r.number("g", g.exact.map(|e| e.to_string()), g.g);
    Ok(r)
}

fn route_text(route: &Route) -> String {
    match route {
        Route::Emission { j, n, k } => format!("emission ⟨{j} {n:.6}, {k} 0 | {j} {n:.6}⟩"),
        Route::Exchange { s_i, s_f } => format!("exchange ⟨{s_f} 0 | {s_i} 0, {s_f} 0⟩"),
        Route::SplitAxis(res) => format!("split axis {}", res.pattern),
    }
}

fn report_record(command: &str, reaction: &str, rep: &ReactionReport) -> Record {
    let mut r = Record::new(command).input("reaction", reaction);
    r.output("verdict", rep.verdict.to_string());
    r.output("coefficient", float(rep.coefficient));
    r.output("route", route_text(&rep.route));
    r.output("rationale", rep.rationale.clone());
    r
}

fn react(table: &ParticleTable, input: &str, solve: bool) -> spinfn::Result<Vec<Record>> {
    let path = std::path::Path::new(input);
    let lines: Vec<String> = if !input.contains("->") && !input.contains('→') && path.is_file() {
        std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("{input}: {e}")))?
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(String::from)
            .collect()
    } else {
        vec![input.to_string()]
    };
    let mut out = Vec::new();
    for line in lines {
        let reaction = Reaction::parse(&line, table)?;
        if solve {
            let a = conservation_solve(&reaction)?;
            let b = conservation_by_symmetry(&reaction)?;
            let mut r = Record::new("react").input("reaction", reaction.to_string());
            r.output("particle", a.particle.clone());
            r.number("n", a.exact.map(|e| e.to_string()), a.n);
            r.output("n_symmetry_route", float(b.n));
            r.path("conservation");
            out.push(r);
        } else {
            out.push(report_record("react", &reaction.to_string(), &check_reaction(&reaction)?));
        }
    }
    Ok(out)
}

fn quasiprob(pattern: &str, samples: usize, out: OutFormat, range: Option<&[f64]>) -> spinfn::Result<()> {
    let p = parse_pattern(pattern)?;
    let range = match range {
        Some([lo, hi]) => (*lo, *hi),
        _ => default_range(&p),
    };
    let curve = quasiprob_curve(&p, range, samples)?;
    match out {
        OutFormat::Csv => {
            let mut s = String::with_capacity(samples * 48);
            s.push_str("x,density\n");
            for (x, y) in &curve.points {
                s.push_str(&format!("{},{}\n", sig17(*x), sig17(*y)));
            }
            print!("{s}");
        }
        OutFormat::Json => {
            let xs: Vec<_> = curve.points.iter().map(|p| float(p.0)).collect();
            let ys: Vec<_> = curve.points.iter().map(|p| float(p.1)).collect();
            let v = json!({
                "command": "quasiprob",
                "inputs": { "pattern": p.to_string(), "samples": samples, "range": [float(range.0), float(range.1)] },
                "outputs": {
                    "area": float(curve.area()),
                    "max_density": float(curve.max_density()),
                    "x": xs,
                    "density": ys,
                },
            });
            println!("{v}");
        }
    }
    Ok(())
}

fn run_verify(cli: &Cli, criterion: Option<u8>) -> spinfn::Result<ExitCode> {
    let checks = match criterion {
        Some(id) => vec![verify::run(id)?],
        None => verify::run_all(),
    };
    for c in &checks {
        if cli.json {
            let status = match c.status {
                Status::Pass => "pass",
                Status::Fail => "fail",
                Status::KnownDeviation => "known-deviation",
            };
            let v = json!({ "id": c.id, "title": c.title, "status": status, "seconds": c.elapsed.as_secs_f64(), "detail": c.detail });
            println!("{v}");
        } else {
            println!("{c}");
        }
    }
    let passed = checks.iter().filter(|c| c.passed()).count();
    if !cli.json {
        println!("{passed}/{} passed", checks.len());
    }
    Ok(if passed == checks.len() { ExitCode::SUCCESS } else { ExitCode::from(2) })
}
