//! Command-line front end: JSON instances in, JSON solutions and SVG out.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 schema or input violation,
//! 3 solver did not converge, 4 geometry error.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{de::DeserializeOwned, Deserialize, Serialize};

use crate::error::Error;
use crate::geometry::{hyperboloid_to_ball, polar_point, Direction, HyperboloidPoint};
use crate::horoball::{ball_model_form, Horoball};
use crate::measure::DiscreteMeasure;
use crate::oracle::mc_volume;
use crate::polytope::{
    build_polytope, facet_area, hausdorff_distance, radial, separate, support, volume, volume_exact, HConvexPolytope,
    PolytopeSpec,
};
use crate::quadrature::{build_quadrature, default_node_count, QuadratureKind, SphereQuadrature};
use crate::solver::{even_polytope, residual, solve_even, GradientMode, SolverConfig};

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Parser)]
#[command(name = "horomink", version, about = "Horospherical polytopes and the even discrete p-Minkowski problem")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve an instance and write a solution file.
    Solve(SolveArgs),
    /// Volume of a polytope.
    Volume(QuadArgs),
    /// Per-facet support values and areas.
    Facets(PolytopeArg),
    /// Support function in one direction.
    Support {
        #[command(flatten)]
        polytope: PolytopeArg,
        /// Comma-separated components, normalized on input.
        #[arg(long, allow_hyphen_values = true)]
        direction: String,
    },
    /// Hausdorff distance between two polytopes.
    Hausdorff {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long)]
        quad_nodes: Option<usize>,
    },
    /// Horoball separating a polytope from an exterior point.
    Separate {
        #[command(flatten)]
        polytope: PolytopeArg,
        /// Hyperboloid coordinates `x_1,…,x_{n+2}` of the point.
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
    /// Recompute the optimality residual of a solution.
    Check {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        solution: PathBuf,
    },
    /// Monte-Carlo volume in the Poincaré ball.
    OracleVolume {
        #[command(flatten)]
        polytope: PolytopeArg,
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Draw an `n = 1` solution in the Poincaré disk.
    Render {
        #[arg(long)]
        solution: PathBuf,
        #[arg(long)]
        svg: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    pub p: Option<f64>,
    #[arg(long)]
    pub v0: Option<f64>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    #[arg(long)]
    pub quad_nodes: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct PolytopeArg {
    #[arg(long)]
    pub polytope: PathBuf,
}

#[derive(Debug, Args)]
pub struct QuadArgs {
    #[command(flatten)]
    pub polytope: PolytopeArg,
    /// Use a quadrature of this size instead of the default method.
    #[arg(long)]
    pub quad_nodes: Option<usize>,
    #[arg(long, value_parser = parse_kind)]
    pub quad_kind: Option<QuadratureKind>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

fn parse_kind(s: &str) -> Result<QuadratureKind, String> {
    serde_json::from_value(serde_json::Value::String(s.into())).map_err(|_| format!("unknown quadrature kind {s}"))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomEntry {
    pub direction: Vec<f64>,
    pub weight: f64,
}

/// Per-instance solver settings; anything left out keeps its default.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverOverrides {
    pub tol: Option<f64>,
    pub max_iters: Option<usize>,
    pub quad_nodes: Option<usize>,
    pub quad_kind: Option<QuadratureKind>,
    pub step: Option<f64>,
    pub backtrack: Option<f64>,
    pub gradient: Option<GradientMode>,
    pub fd_step: Option<f64>,
    pub check_every: Option<usize>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub schema_version: String,
    pub n: usize,
    pub p: f64,
    #[serde(default, alias = "V0", skip_serializing_if = "Option::is_none")]
    pub v0: Option<f64>,
    pub atoms: Vec<AtomEntry>,
    pub even: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver: Option<SolverOverrides>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionFile {
    pub schema_version: String,
    pub n: usize,
    /// One direction per antipodal pair; the body also uses their antipodes.
    pub directions: Vec<Vec<f64>>,
    pub z: Vec<f64>,
    #[serde(default)]
    pub lambda: Option<f64>,
    #[serde(default)]
    pub residual_max_rel: Option<f64>,
    #[serde(default)]
    pub volume: Option<f64>,
    /// Areas in the order of the instance atoms.
    #[serde(default)]
    pub facet_areas: Option<Vec<f64>>,
    #[serde(default)]
    pub iterations: Option<usize>,
    #[serde(default)]
    pub converged: Option<bool>,
    #[serde(default)]
    pub config: Option<SolverConfig>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HoroballEntry {
    pub direction: Vec<f64>,
    pub x: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolytopeFile {
    pub schema_version: String,
    pub n: usize,
    pub horoballs: Vec<HoroballEntry>,
    #[serde(default)]
    pub even: bool,
}

/// A failure together with its exit status.
#[derive(Debug)]
pub enum CliError {
    Io(String),
    Schema(String),
    NoConvergence(String),
    Geometry(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Schema(_) => 2,
            CliError::NoConvergence(_) => 3,
            CliError::Geometry(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Io(m) => write!(f, "I/O error: {m}"),
            CliError::Schema(m) => write!(f, "schema error: {m}"),
            CliError::NoConvergence(m) => write!(f, "no convergence: {m}"),
            CliError::Geometry(m) => write!(f, "geometry error: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Spec(_)
            | Error::NotEven(_)
            | Error::DimensionMismatch { .. }
            | Error::InvalidArgument(_)
            | Error::UnsupportedQuadrature(_) => CliError::Schema(e.to_string()),
            Error::DegenerateBody(_)
            | Error::InvalidPoint(_)
            | Error::PointInside
            | Error::Unreachable(_)
            | Error::MismatchedDirections(_) => CliError::Geometry(e.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Tags an error with the field it came from.
fn at<T>(field: &str, r: crate::error::Result<T>) -> CliResult<T> {
    r.map_err(|e| match CliError::from(e) {
        CliError::Schema(m) => CliError::Schema(format!("{field}: {m}")),
        CliError::Geometry(m) => CliError::Geometry(format!("{field}: {m}")),
        other => other,
    })
}

fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Schema(format!("{}: {e}", path.display())))
}

fn write_text(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn check_version(v: &str) -> CliResult<()> {
    if v == SCHEMA_VERSION {
        Ok(())
    } else {
        Err(CliError::Schema(format!("schema_version: expected \"{SCHEMA_VERSION}\", got \"{v}\"")))
    }
}

fn direction(field: &str, n: usize, v: &[f64]) -> CliResult<Direction<f64>> {
    if v.len() != n + 1 {
        return Err(CliError::Schema(format!("{field}: expected {} components, got {}", n + 1, v.len())));
    }
    at(field, Direction::new(v.to_vec()))
}

fn parse_list(field: &str, s: &str) -> CliResult<Vec<f64>> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| CliError::Schema(format!("{field}: cannot parse {t:?}"))))
        .collect()
}

impl InstanceFile {
    pub fn measure(&self) -> CliResult<DiscreteMeasure> {
        check_version(&self.schema_version)?;
        if self.n == 0 {
            return Err(CliError::Schema("n: must be ≥ 1".into()));
        }
        let atoms = self
            .atoms
            .iter()
            .enumerate()
            .map(|(k, a)| {
                if !(a.weight > 0.0 && a.weight.is_finite()) {
                    return Err(CliError::Schema(format!("atoms[{k}].weight: {} must be positive", a.weight)));
                }
                Ok((direction(&format!("atoms[{k}].direction"), self.n, &a.direction)?, a.weight))
            })
            .collect::<CliResult<Vec<_>>>()?;
        at("atoms", DiscreteMeasure::new(self.n, atoms, self.even))
    }

    pub fn config(&self) -> SolverConfig {
        let mut cfg = SolverConfig::with_p(self.p);
        if let Some(v0) = self.v0 {
            cfg.v0 = v0;
        }
        if let Some(o) = &self.solver {
            cfg.tol = o.tol.unwrap_or(cfg.tol);
            cfg.max_iters = o.max_iters.unwrap_or(cfg.max_iters);
            cfg.quad_nodes = o.quad_nodes.or(cfg.quad_nodes);
            cfg.quad_kind = o.quad_kind.or(cfg.quad_kind);
            cfg.step = o.step.unwrap_or(cfg.step);
            cfg.backtrack = o.backtrack.unwrap_or(cfg.backtrack);
            cfg.gradient = o.gradient.unwrap_or(cfg.gradient);
            cfg.fd_step = o.fd_step.unwrap_or(cfg.fd_step);
            cfg.check_every = o.check_every.unwrap_or(cfg.check_every);
            cfg.seed = o.seed.unwrap_or(cfg.seed);
        }
        cfg
    }
}

impl PolytopeFile {
    pub fn build(&self) -> CliResult<HConvexPolytope> {
        check_version(&self.schema_version)?;
        let hs = self
            .horoballs
            .iter()
            .enumerate()
            .map(|(k, h)| Ok((direction(&format!("horoballs[{k}].direction"), self.n, &h.direction)?, h.x)))
            .collect::<CliResult<Vec<_>>>()?;
        let spec = at("horoballs", PolytopeSpec::new(self.n, hs, self.even))?;
        at("horoballs", build_polytope(&spec))
    }
}

impl SolutionFile {
    /// The even body `⋂ B̄_{±d_k}(z_k)`.
    pub fn build(&self) -> CliResult<HConvexPolytope> {
        check_version(&self.schema_version)?;
        if self.z.len() != self.directions.len() {
            return Err(CliError::Schema(format!(
                "z: {} values for {} directions",
                self.z.len(),
                self.directions.len()
            )));
        }
        let half = self
            .directions
            .iter()
            .zip(&self.z)
            .enumerate()
            .map(|(k, (d, z))| Ok((direction(&format!("directions[{k}]"), self.n, d)?, *z)))
            .collect::<CliResult<Vec<_>>>()?;
        let spec = at("directions", PolytopeSpec::from_pairs(self.n, &half))?;
        at("z", build_polytope(&spec))
    }
}

fn quadrature(n: usize, nodes: Option<usize>, kind: Option<QuadratureKind>, seed: u64) -> CliResult<SphereQuadrature> {
    let count = nodes.unwrap_or(default_node_count(n));
    at("quadrature", build_quadrature(n, count, kind.unwrap_or(QuadratureKind::default_for(n)), seed))
}

/// Runs one parsed command, writing results to `out`.
pub fn execute(cli: Cli, out: &mut impl std::io::Write) -> CliResult<()> {
    let mut emit = |value: serde_json::Value| {
        out.write_all(to_json(&value).as_bytes()).map_err(|e| CliError::Io(e.to_string()))
    };
    match cli.command {
        Command::Solve(args) => {
            let (solution, converged) = solve(&args)?;
            write_text(&args.output, &to_json(&solution))?;
            emit(serde_json::json!({
                "converged": converged,
                "iterations": solution.iterations,
                "residual_max_rel": solution.residual_max_rel,
                "output": args.output.display().to_string(),
            }))?;
            if !converged {
                return Err(CliError::NoConvergence(format!(
                    "residual {} above tolerance after {} iterations; best iterate written",
                    solution.residual_max_rel.unwrap_or(f64::NAN),
                    solution.iterations.unwrap_or(0)
                )));
            }
        }
        Command::Volume(args) => {
            let p = read_json::<PolytopeFile>(&args.polytope.polytope)?.build()?;
            let v = match (args.quad_nodes, args.quad_kind) {
                (None, None) => at("polytope", volume_exact(&p))?,
                (nodes, kind) => at("polytope", volume(&p, &quadrature(p.dim(), nodes, kind, args.seed)?))?,
            };
            emit(serde_json::json!({ "volume": v }))?;
        }
        Command::Facets(arg) => {
            let p = read_json::<PolytopeFile>(&arg.polytope)?.build()?;
            let facets = (0..p.len())
                .map(|i| {
                    Ok(serde_json::json!({
                        "index": i,
                        "direction": p.spec().horoballs()[i].0.components(),
                        "x": p.spec().horoballs()[i].1,
                        "support": p.canonical_support()[i],
                        "nonempty": p.facet_nonempty()[i],
                        "area": at("polytope", facet_area(&p, i))?,
                    }))
                })
                .collect::<CliResult<Vec<_>>>()?;
            emit(serde_json::json!({ "facets": facets }))?;
        }
        Command::Support { polytope, direction: d } => {
            let p = read_json::<PolytopeFile>(&polytope.polytope)?.build()?;
            let e = direction("direction", p.dim(), &parse_list("direction", &d)?)?;
            emit(serde_json::json!({ "support": at("direction", support(&p, &e))? }))?;
        }
        Command::Hausdorff { a, b, quad_nodes } => {
            let k = read_json::<PolytopeFile>(&a)?.build()?;
            let l = read_json::<PolytopeFile>(&b)?.build()?;
            let quad = quadrature(k.dim(), quad_nodes, None, 0)?;
            emit(serde_json::json!({ "hausdorff": at("b", hausdorff_distance(&k, &l, &quad))? }))?;
        }
        Command::Separate { polytope, point } => {
            let p = read_json::<PolytopeFile>(&polytope.polytope)?.build()?;
            let q = at("point", HyperboloidPoint::new(parse_list("point", &point)?))?;
            let b = at("point", separate(&p, &q))?;
            emit(serde_json::json!({ "center": b.center.components(), "s": b.s }))?;
        }
        Command::Check { instance, solution } => {
            let inst: InstanceFile = read_json(&instance)?;
            let sol: SolutionFile = read_json(&solution)?;
            let report = check(&inst, &sol)?;
            let ok = report.residual_max_rel <= inst.config().tol;
            emit(serde_json::to_value(&report).expect("serializable"))?;
            if !ok {
                return Err(CliError::NoConvergence(format!(
                    "residual {} exceeds tolerance {}",
                    report.residual_max_rel,
                    inst.config().tol
                )));
            }
        }
        Command::OracleVolume { polytope, samples, seed } => {
            let p = read_json::<PolytopeFile>(&polytope.polytope)?.build()?;
            let est = at("samples", mc_volume(&p, samples, seed))?;
            emit(serde_json::json!({
                "value": est.value,
                "std_error": est.std_error,
                "samples": est.samples,
                "seed": est.seed,
            }))?;
        }
        Command::Render { solution, svg } => {
            let sol: SolutionFile = read_json(&solution)?;
            if sol.n != 1 {
                return Err(CliError::Schema(format!("n: rendering needs n = 1, got {}", sol.n)));
            }
            let p = sol.build()?;
            write_text(&svg, &render_svg(&p)?)?;
            emit(serde_json::json!({ "svg": svg.display().to_string() }))?;
        }
    }
    Ok(())
}

/// Solves the instance named in `args`; the flag is `converged`.
pub fn solve(args: &SolveArgs) -> CliResult<(SolutionFile, bool)> {
    let mut inst: InstanceFile = read_json(&args.input)?;
    if let Some(p) = args.p {
        inst.p = p;
    }
    if args.v0.is_some() {
        inst.v0 = args.v0;
    }
    let mu = inst.measure()?;
    if !mu.is_even() {
        return Err(CliError::Schema("even: the solver only accepts even measures".into()));
    }
    let mut cfg = inst.config();
    cfg.tol = args.tol.unwrap_or(cfg.tol);
    cfg.max_iters = args.max_iters.unwrap_or(cfg.max_iters);
    cfg.quad_nodes = args.quad_nodes.or(cfg.quad_nodes);
    cfg.seed = args.seed.unwrap_or(cfg.seed);
    at("solver", cfg.validate())?;
    let result = at("atoms", solve_even(&mu, &cfg))?;
    let pairs = at("atoms", mu.pairs())?;
    let facet_areas = (0..mu.len())
        .map(|i| at("atoms", facet_area(&result.polytope, i)))
        .collect::<CliResult<Vec<_>>>()?;
    let solution = SolutionFile {
        schema_version: SCHEMA_VERSION.into(),
        n: mu.dim(),
        directions: pairs.iter().map(|&(i, _)| mu.atoms()[i].0.components().to_vec()).collect(),
        z: result.z.clone(),
        lambda: Some(result.lambda),
        residual_max_rel: Some(result.residual_max_rel),
        volume: Some(result.volume),
        facet_areas: Some(facet_areas),
        iterations: Some(result.iterations),
        converged: Some(result.converged),
        config: Some(cfg),
    };
    Ok((solution, result.converged))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckReport {
    pub lambda: f64,
    pub residual_max_rel: f64,
    /// Residual recorded in the solution file, if any.
    pub recorded: Option<f64>,
}

/// Recomputes `(λ, max_rel)` for a solution against its instance.
pub fn check(inst: &InstanceFile, sol: &SolutionFile) -> CliResult<CheckReport> {
    let mu = inst.measure()?;
    if sol.n != inst.n {
        return Err(CliError::Schema(format!("n: solution has {}, instance has {}", sol.n, inst.n)));
    }
    let pairs = at("atoms", mu.pairs())?;
    if pairs.len() != sol.directions.len() {
        return Err(CliError::Geometry(format!(
            "directions: {} pairs in the solution, {} in the instance",
            sol.directions.len(),
            pairs.len()
        )));
    }
    // Align solution pairs with the measure's pair order.
    let mut z = vec![f64::NAN; pairs.len()];
    for (k, (d, zk)) in sol.directions.iter().zip(&sol.z).enumerate() {
        let e = direction(&format!("directions[{k}]"), sol.n, d)?;
        let slot = pairs
            .iter()
            .position(|&(i, j)| mu.atoms()[i].0.chord(&e) < 1e-9 || mu.atoms()[j].0.chord(&e) < 1e-9)
            .ok_or_else(|| CliError::Geometry(format!("directions[{k}]: no matching atom pair")))?;
        z[slot] = *zk;
    }
    if z.iter().any(|v| v.is_nan()) {
        return Err(CliError::Geometry("directions: pairs matched more than once".into()));
    }
    let body = at("z", even_polytope(&mu, &z))?;
    let (lambda, max_rel) = at("directions", residual(&body, &mu, inst.p))?;
    Ok(CheckReport {
        lambda,
        residual_max_rel: max_rel,
        recorded: sol.residual_max_rel,
    })
}

/// SVG 1.1 picture in the Poincaré disk: the unit circle, one horocycle per
/// facet (tangent to the circle at its direction) and the boundary polyline.
pub fn render_svg(p: &HConvexPolytope) -> CliResult<String> {
    const SAMPLES: usize = 1440;
    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="600" height="600" viewBox="-1.05 -1.05 2.1 2.1">"#
    );
    let _ = writeln!(svg, r#"<g transform="scale(1,-1)" fill="none" stroke-width="0.004">"#);
    let _ = writeln!(svg, r#"<circle class="unit-disk" cx="0" cy="0" r="1" stroke="black"/>"#);
    for (i, (e, _)) in p.spec().horoballs().iter().enumerate() {
        let (c, r) = ball_model_form(&Horoball::new(e.clone(), p.canonical_support()[i]));
        let _ = writeln!(
            svg,
            r#"<circle class="horocycle" cx="{:.6}" cy="{:.6}" r="{:.6}" stroke="steelblue"/>"#,
            c[0], c[1], r
        );
    }
    let mut path = String::new();
    for k in 0..SAMPLES {
        let t = Direction::from_angle(std::f64::consts::TAU * k as f64 / SAMPLES as f64);
        let rho = at("polytope", radial(p, &t))?;
        let y = hyperboloid_to_ball(&polar_point(rho, &t));
        let _ = write!(path, "{}{:.6},{:.6} ", if k == 0 { "M" } else { "L" }, y.coords()[0], y.coords()[1]);
    }
    path.push('Z');
    let _ = writeln!(svg, r#"<path class="boundary" d="{path}" stroke="firebrick"/>"#);
    let _ = writeln!(svg, "</g>\n</svg>");
    Ok(svg)
}

/// Applies `HOROMINK_THREADS`, parses `args` and runs; returns the exit code.
pub fn run<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    if let Ok(v) = std::env::var("HOROMINK_THREADS") {
        match v.parse::<usize>() {
            Ok(t) if t > 0 => {
                // a second call in the same process keeps the first pool
                let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
            }
            _ => {
                eprintln!("schema error: HOROMINK_THREADS = {v:?} is not a positive integer");
                return 2;
            }
        }
    }
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli, &mut std::io::stdout().lock()) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}
