//! `manin-toric` command line: load a problem, run part of the pipeline and
//! write a JSON (or CSV) report.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use manin_toric::counting::{count_points, zeta_partial, CountResult, HeightMode, DEFAULT_BOX_BUDGET};
use manin_toric::euler::EulerConfig;
use manin_toric::generators::DEFAULT_ENUMERATION_BUDGET;
use manin_toric::manin::{analyze, manin_constant, ManinConfig, ManinReport};
use manin_toric::polynomial::GeneralizedPolynomial;
use manin_toric::problem::{ProblemFile, ToricProblem, Variety};
use manin_toric::quadrature::QuadConfig;
use manin_toric::rational::format_vec;
use manin_toric::Error;
use serde_json::{json, Value};

pub const SCHEMA: u32 = 1;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_FLAGS: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "manin-toric", version, about = "Leading constants and point counts for toric varieties with polynomial heights")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Minimal generators of the weight support.
    Generators(Common),
    /// Newton polyhedron, diagonal face and the invariants ι, ρ, c.
    Analyze(Common),
    /// The volume constant, Euler product and assembled constants C, C0.
    Constants(ConstantsArgs),
    /// Brute-force point counts.
    Count(CountArgs),
    /// Partial sums of the height zeta function.
    Zeta(ZetaArgs),
    /// Full pipeline with certified checks; exits nonzero on failure.
    Verify(VerifyArgs),
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Problem description (JSON).
    #[arg(long, conflicts_with_all = ["hypersurface", "projective_torus"])]
    pub problem: Option<PathBuf>,
    /// Hypersurface exponents a, e.g. `1,1` for x1 x2 = x3^2.
    #[arg(long, value_delimiter = ',', conflicts_with = "projective_torus")]
    pub hypersurface: Option<Vec<u64>>,
    /// Dimension n of the projective torus.
    #[arg(long)]
    pub projective_torus: Option<usize>,
    /// Height polynomial, e.g. `X1^2+X2^2+X3^2`.
    #[arg(long)]
    pub polynomial: Option<String>,
    /// Use the sup-norm height max |x_i|.
    #[arg(long)]
    pub sup_norm: bool,
    /// Generator enumeration cap (total degree).
    #[arg(long)]
    pub cap: Option<u32>,
    /// Operation budget for generator enumeration and counting.
    #[arg(long)]
    pub budget: Option<f64>,
    /// Report hypothesis failures but exit 0.
    #[arg(long)]
    pub allow_flags: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Args, Debug, Clone)]
pub struct Tolerances {
    #[arg(long, default_value_t = 1e-9)]
    pub quad_tol: f64,
    #[arg(long, default_value_t = 1e-15)]
    pub euler_tol: f64,
    #[arg(long, default_value_t = 100_000)]
    pub prime_cutoff: u64,
    #[arg(long, default_value_t = 160)]
    pub precision: usize,
    /// Seed for quasi-Monte Carlo scrambling.
    #[arg(long, default_value_t = 0)]
    pub seed: u32,
}

#[derive(Args, Debug)]
pub struct ConstantsArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub tol: Tolerances,
    /// Print only the Euler product.
    #[arg(long)]
    pub euler: bool,
}

#[derive(Args, Debug)]
pub struct CountArgs {
    #[command(flatten)]
    pub common: Common,
    /// Height bounds.
    #[arg(long, value_delimiter = ',', required = true)]
    pub t: Vec<f64>,
    /// Write the t, N, predicted, ratio table as CSV here.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[command(flatten)]
    pub tol: Tolerances,
}

#[derive(Args, Debug)]
pub struct ZetaArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_delimiter = ',', default_value = "1.5,1.3,1.2,1.1")]
    pub s: Vec<f64>,
    /// Height cutoff of the partial sums.
    #[arg(long)]
    pub cutoff: f64,
    #[command(flatten)]
    pub tol: Tolerances,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: Common,
    /// Largest height bound; counts are also taken at t/10 and 3t/10.
    #[arg(long)]
    pub t: f64,
    /// Allowed |N / prediction - 1| at the largest t.
    #[arg(long, default_value_t = 0.05)]
    pub ratio_tol: f64,
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[command(flatten)]
    pub tol: Tolerances,
}

#[derive(Debug)]
pub enum Failure {
    Input(String),
    Flags(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::NonCompactFace => Failure::Flags(msg),
            Error::RaggedMatrix { .. }
            | Error::NonZeroRowSum { .. }
            | Error::DependentRows { .. }
            | Error::TooFewCoordinates(_)
            | Error::TooManyCoordinates { .. }
            | Error::ArityMismatch { .. }
            | Error::BadHypersurface
            | Error::NotElliptic { .. }
            | Error::MissingVariable { .. }
            | Error::NotHomogeneous
            | Error::InvalidPolynomial(_)
            | Error::Parse { .. }
            | Error::InvalidHeightBound(_)
            | Error::Invalid(_)
            | Error::Json(_) => Failure::Input(msg),
            _ => Failure::Runtime(msg),
        }
    }
}

type Outcome = std::result::Result<(Value, Option<String>, i32), Failure>;

struct Loaded {
    variety: Variety,
    polynomial: Option<GeneralizedPolynomial>,
    mode: HeightMode,
}

fn load(c: &Common) -> std::result::Result<Loaded, Failure> {
    let (variety, file_poly) = if let Some(path) = &c.problem {
        let text = fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
        let pf = ProblemFile::from_json(&text)?;
        (pf.variety()?, pf.polynomial()?)
    } else if let Some(a) = &c.hypersurface {
        ToricProblem::hypersurface(a)?;
        (Variety::Hypersurface(a.clone()), None)
    } else if let Some(n) = c.projective_torus {
        (Variety::Toric(ToricProblem::new(n + 1, Vec::new())?), None)
    } else {
        return Err(Failure::Input("one of --problem, --hypersurface, --projective-torus is required".into()));
    };
    let polynomial = match &c.polynomial {
        Some(s) => Some(GeneralizedPolynomial::parse(s, Some(variety.ncoords()))?),
        None => file_poly,
    };
    if let Some(p) = &polynomial {
        if p.nvars != variety.ncoords() {
            return Err(Error::ArityMismatch { expected: variety.ncoords(), got: p.nvars }.into());
        }
        p.check_all_variables()?;
        p.check_elliptic()?;
    }
    let mode = if c.sup_norm { HeightMode::SupNorm } else { HeightMode::Polynomial };
    Ok(Loaded { variety, polynomial, mode })
}

fn need_height(l: &Loaded) -> std::result::Result<(), Failure> {
    if l.mode == HeightMode::Polynomial && l.polynomial.is_none() {
        return Err(Failure::Input("give --polynomial (or a polynomial in the problem file) or --sup-norm".into()));
    }
    Ok(())
}

fn generator_budget(c: &Common) -> u64 {
    c.budget.map(|b| b as u64).unwrap_or(DEFAULT_ENUMERATION_BUDGET)
}

fn count_budget(c: &Common) -> f64 {
    c.budget.unwrap_or(DEFAULT_BOX_BUDGET)
}

fn check_config(c: &Common, tol: Option<&Tolerances>) -> std::result::Result<(), Failure> {
    if let Some(b) = c.budget {
        if !(b >= 1e6) {
            return Err(Failure::Input("--budget must be at least 1e6".into()));
        }
    }
    if let Some(t) = tol {
        if !(t.quad_tol > 0.0 && t.euler_tol > 0.0 && t.prime_cutoff > 0 && t.precision > 0) {
            return Err(Failure::Input("tolerances must be positive".into()));
        }
    }
    Ok(())
}

fn manin_config(c: &Common, t: &Tolerances) -> ManinConfig {
    ManinConfig {
        cap: c.cap,
        budget: generator_budget(c),
        quad: QuadConfig { abs_tol: t.quad_tol, rel_tol: t.quad_tol, seed: t.seed, ..QuadConfig::default() },
        euler: EulerConfig { prime_cutoff: t.prime_cutoff, tol: t.euler_tol, precision_bits: t.precision },
    }
}

fn flag_exit(report: &ManinReport, allow: bool) -> i32 {
    if allow || (report.flags.compact && report.flags.stabilized) {
        EXIT_OK
    } else {
        EXIT_FLAGS
    }
}

fn with_schema(mut v: Value) -> Value {
    if let Value::Object(map) = &mut v {
        map.insert("schema".into(), json!(SCHEMA));
    }
    v
}

fn cmd_generators(c: &Common) -> Outcome {
    check_config(c, None)?;
    let l = load(c)?;
    let g = manin_toric::generators::generators_for(&l.variety, c.cap, generator_budget(c))?;
    let code = if c.allow_flags || g.stabilized { EXIT_OK } else { EXIT_FLAGS };
    Ok((json!({ "arity": g.arity, "cap": g.cap, "stabilized": g.stabilized, "generators": g.points }), None, code))
}

fn cmd_analyze(c: &Common) -> Outcome {
    check_config(c, None)?;
    let l = load(c)?;
    let a = analyze(&l.variety, c.cap, generator_budget(c))?;
    let toric = l.variety.toric()?;
    let df = &a.diagonal;
    let mut v = df.summary(&a.polyhedron);
    let dimension = l.variety.dimension();
    let extra = json!({
        "stabilized": a.generators.stabilized,
        "generators": a.generators.points,
        "vertices": a.polyhedron.vertex_points().iter().map(|p| format_vec(p)).collect::<Vec<_>>(),
        "sign_count": toric.sign_count()?.value,
        "total_weight": toric.total_weight(),
        "dimension": dimension,
        "dimension_hypothesis": df.face.dim == dimension,
    });
    if let (Value::Object(m), Value::Object(e)) = (&mut v, extra) {
        m.extend(e);
    }
    let code = if c.allow_flags || (df.compact && a.generators.stabilized) { EXIT_OK } else { EXIT_FLAGS };
    Ok((v, None, code))
}

fn cmd_constants(a: &ConstantsArgs) -> Outcome {
    check_config(&a.common, Some(&a.tol))?;
    let l = load(&a.common)?;
    let cfg = manin_config(&a.common, &a.tol);
    if a.euler {
        let an = analyze(&l.variety, cfg.cap, cfg.budget)?;
        let df = &an.diagonal;
        let k = df.face.points.len() as u32;
        let e = manin_toric::euler::euler_constant(&l.variety.weight()?, &df.c, k, &an.generators.points, &cfg.euler)?;
        return Ok((json!({ "euler": e }), None, EXIT_OK));
    }
    need_height(&l)?;
    let r = manin_constant(&l.variety, l.polynomial.as_ref(), l.mode, &cfg)?;
    let code = flag_exit(&r, a.common.allow_flags);
    Ok((json!({ "report": r }), None, code))
}

fn counts(l: &Loaded, ts: &[f64], budget: f64) -> std::result::Result<Vec<CountResult>, Failure> {
    ts.iter().map(|&t| count_points(&l.variety, l.polynomial.as_ref(), t, l.mode, budget).map_err(Failure::from)).collect()
}

fn cmd_count(a: &CountArgs) -> Outcome {
    check_config(&a.common, Some(&a.tol))?;
    let l = load(&a.common)?;
    need_height(&l)?;
    let res = counts(&l, &a.t, count_budget(&a.common))?;
    let mut csv = None;
    if a.csv.is_some() {
        let r = manin_constant(&l.variety, l.polynomial.as_ref(), l.mode, &manin_config(&a.common, &a.tol))?;
        csv = Some(r.asymptotics(&res)?.to_csv());
    }
    Ok((json!({ "mode": l.mode, "counts": res }), csv, EXIT_OK))
}

fn cmd_zeta(a: &ZetaArgs) -> Outcome {
    check_config(&a.common, Some(&a.tol))?;
    let l = load(&a.common)?;
    need_height(&l)?;
    let r = manin_constant(&l.variety, l.polynomial.as_ref(), l.mode, &manin_config(&a.common, &a.tol))?;
    let z = zeta_partial(
        &l.variety,
        l.polynomial.as_ref(),
        &a.s,
        a.cutoff,
        l.mode,
        r.iota_f64(),
        r.rho.max(1) as u32,
        count_budget(&a.common),
    )?;
    let ratios: Vec<f64> = z.probes.iter().map(|p| p.scaled / r.c0).collect();
    let code = flag_exit(&r, a.common.allow_flags);
    Ok((json!({ "zeta": z, "c0": r.c0, "scaled_over_c0": ratios }), None, code))
}

fn cmd_verify(a: &VerifyArgs) -> Outcome {
    check_config(&a.common, Some(&a.tol))?;
    let l = load(&a.common)?;
    need_height(&l)?;
    if !(a.t >= 10.0) {
        return Err(Failure::Input("verify needs --t >= 10".into()));
    }
    let r = manin_constant(&l.variety, l.polynomial.as_ref(), l.mode, &manin_config(&a.common, &a.tol))?;
    let ts = [a.t / 10.0, 0.3 * a.t, a.t];
    let res = counts(&l, &ts, count_budget(&a.common))?;
    let asym = r.asymptotics(&res)?;
    let certified = r.constant_error.is_finite() && r.constant_error <= 1e-4 * r.constant;
    let checks = vec![
        json!({ "name": "constant_positive", "pass": r.constant > 0.0 }),
        json!({ "name": "constant_certified", "pass": certified, "error": r.constant_error }),
        json!({ "name": "ratio_within_tolerance", "pass": asym.last_deviation <= a.ratio_tol, "deviation": asym.last_deviation, "tolerance": a.ratio_tol }),
        json!({ "name": "compact_face", "pass": r.flags.compact }),
        json!({ "name": "generators_stabilized", "pass": r.flags.stabilized }),
        json!({ "name": "dimension_hypothesis", "pass": r.flags.dimension_hypothesis }),
    ];
    let numeric_ok = r.constant > 0.0 && certified && asym.last_deviation <= a.ratio_tol && r.flags.dimension_hypothesis;
    let flags_ok = r.flags.compact && r.flags.stabilized;
    let code = if !numeric_ok {
        EXIT_FAILED
    } else if !flags_ok && !a.common.allow_flags {
        EXIT_FLAGS
    } else {
        EXIT_OK
    };
    let csv = a.csv.as_ref().map(|_| asym.to_csv());
    Ok((json!({ "report": r, "counts": res, "asymptotics": asym, "checks": checks, "pass": code == EXIT_OK }), csv, code))
}

fn threads_of(cmd: &Command) -> Option<usize> {
    let c = match cmd {
        Command::Generators(c) | Command::Analyze(c) => c,
        Command::Constants(a) => &a.common,
        Command::Count(a) => &a.common,
        Command::Zeta(a) => &a.common,
        Command::Verify(a) => &a.common,
    };
    c.threads.or_else(|| std::env::var("MANIN_TORIC_THREADS").ok().and_then(|s| s.parse().ok()))
}

fn outputs(cmd: &Command) -> (Option<PathBuf>, Option<PathBuf>) {
    match cmd {
        Command::Generators(c) | Command::Analyze(c) => (c.out.clone(), None),
        Command::Constants(a) => (a.common.out.clone(), None),
        Command::Count(a) => (a.common.out.clone(), a.csv.clone()),
        Command::Zeta(a) => (a.common.out.clone(), None),
        Command::Verify(a) => (a.common.out.clone(), a.csv.clone()),
    }
}

fn dispatch(cmd: &Command) -> Outcome {
    match cmd {
        Command::Generators(c) => cmd_generators(c),
        Command::Analyze(c) => cmd_analyze(c),
        Command::Constants(a) => cmd_constants(a),
        Command::Count(a) => cmd_count(a),
        Command::Zeta(a) => cmd_zeta(a),
        Command::Verify(a) => cmd_verify(a),
    }
}

/// Runs the command line and returns the process exit code. Reports go to
/// `stdout` (or `--out`), diagnostics to `stderr`.
pub fn run<I, S>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = if e.use_stderr() { write!(stderr, "{e}") } else { write!(stdout, "{e}") };
            return code;
        }
    };
    let outcome = match threads_of(&cli.command) {
        Some(n) if n > 0 => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| dispatch(&cli.command)),
            Err(e) => Err(Failure::Runtime(e.to_string())),
        },
        _ => dispatch(&cli.command),
    };
    let (value, csv, code) = match outcome {
        Ok(x) => x,
        Err(f) => {
            let (code, msg) = match f {
                Failure::Input(m) => (EXIT_INPUT, m),
                Failure::Flags(m) => (EXIT_FLAGS, m),
                Failure::Runtime(m) => (EXIT_FAILED, m),
            };
            let _ = writeln!(stderr, "error: {msg}");
            return code;
        }
    };
    let text = serde_json::to_string_pretty(&with_schema(value)).expect("reports serialize") + "\n";
    let (out, csv_path) = outputs(&cli.command);
    let written = match out {
        Some(p) => fs::write(&p, &text).map_err(|e| format!("{}: {e}", p.display())),
        None => stdout.write_all(text.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        let _ = writeln!(stderr, "error: {e}");
        return EXIT_FAILED;
    }
    if let (Some(p), Some(body)) = (csv_path, csv) {
        if let Err(e) = fs::write(&p, body) {
            let _ = writeln!(stderr, "error: {}: {e}", p.display());
            return EXIT_FAILED;
        }
    }
    if code == EXIT_FLAGS {
        let _ = writeln!(stderr, "hypothesis flags raised; rerun with --allow-flags to accept");
    }
    code
}
