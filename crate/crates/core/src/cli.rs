//! The `lfmsg` command line.
//!
//! Exit codes: 0 success, 1 a check failed, 2 bad input, 3 a math error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::Error;
use crate::lfm::{canonical, LinearFractionalMap, MapJson, PointClass};
use crate::matalg::{c64, dist, fmt_complex, norm, re, Mat3, Point};
use crate::model::{
    analytic_phi, analytic_phi_t, classify, closed_form_phi, closed_form_phi_t, heisenberg, heisenberg_flow,
    DwLocation, ModelClass, EXAMPLE_TRANSLATION,
};
use crate::sampling::sample_ball;
use crate::semigroup::{orbit, verify_semigroup, write_orbit_csv, Semigroup};

#[derive(Parser, Debug)]
#[command(name = "lfmsg", version, about = "Linear fractional self-maps of the ball and their semigroups")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Denjoy-Wolff point, multiplicity and model of a map.
    Classify(Options),
    /// The map φ_t as JSON.
    Embed(Options),
    /// φ_t(z0) over a t-grid, as CSV.
    Orbit(Options),
    /// Self-map, fixed-point and semigroup checks.
    Verify(Options),
    /// Golden checks for the two worked examples.
    ReproducePaper(Options),
}

#[derive(Args, Debug, Clone)]
pub struct Options {
    /// Map JSON file.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    pub t: Option<f64>,
    /// `start:stop:step`
    #[arg(long)]
    pub t_grid: Option<String>,
    /// `re1,im1,re2,im2`
    #[arg(long, allow_hyphen_values = true)]
    pub z0: Option<String>,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug)]
pub enum Failure {
    Input(String),
    Math(Error),
    Io(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Input(_) | Failure::Io(_) => 2,
            Failure::Math(_) => 3,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Input(m) => write!(f, "input error: {m}"),
            Failure::Math(e) => write!(f, "math error: {e}"),
            Failure::Io(m) => write!(f, "io error: {m}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidInput(m) | Error::Precondition(m) => Failure::Input(m),
            e => Failure::Math(e),
        }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;
type Handler = fn(&Options) -> CliResult<(String, i32)>;

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub max_residual: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub checks: Vec<Check>,
    pub exit: i32,
}

impl Report {
    fn new(checks: Vec<Check>) -> Self {
        let exit = if checks.iter().all(|c| c.pass) { 0 } else { 1 };
        Report { checks, exit }
    }

    fn text(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            let tag = if c.pass { "PASS" } else { "FAIL" };
            s.push_str(&format!("{tag} {} max_residual={:e}\n", c.name, c.max_residual));
        }
        s
    }
}

fn check(name: &str, max_residual: f64, tol: f64) -> Check {
    Check { name: name.into(), max_residual, pass: max_residual <= tol }
}

/// Parses `start:stop:step` into grid points `start + i·step`.
pub fn parse_grid(spec: &str) -> CliResult<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let [a, b, c] = parts.as_slice() else {
        return Err(Failure::Input(format!("grid `{spec}` is not start:stop:step")));
    };
    let num = |s: &str| {
        s.trim()
            .parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| Failure::Input(format!("bad number `{s}` in grid")))
    };
    let (start, stop, step) = (num(a)?, num(b)?, num(c)?);
    if step <= 0.0 {
        return Err(Failure::Input("grid step must be positive".into()));
    }
    if stop <= start {
        return Err(Failure::Input("grid stop must exceed start".into()));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..n).map(|i| start + i as f64 * step).collect())
}

/// Parses `re1,im1,re2,im2`.
pub fn parse_point(spec: &str) -> CliResult<Point> {
    let xs: Vec<f64> = spec
        .split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| Failure::Input(format!("bad number `{s}` in z0"))))
        .collect::<CliResult<_>>()?;
    let [a, b, c, d] = xs.as_slice() else {
        return Err(Failure::Input("z0 needs four numbers re1,im1,re2,im2".into()));
    };
    Ok([c64(*a, *b), c64(*c, *d)])
}

fn load_map(opts: &Options) -> CliResult<LinearFractionalMap> {
    let path = opts.input.as_ref().ok_or_else(|| Failure::Input("--input is required".into()))?;
    let text = fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    Ok(LinearFractionalMap::from_json(&text)?)
}

fn pair(z: num_complex::Complex64) -> [f64; 2] {
    [z.re, z.im]
}

fn matrix_json(m: &Mat3) -> Vec<Vec<[f64; 2]>> {
    m.0.iter().map(|row| row.iter().map(|z| pair(*z)).collect()).collect()
}

#[derive(Serialize)]
struct ClassifyJson {
    summary: String,
    dw_point: Option<[[f64; 2]; 2]>,
    location: DwLocation,
    multiplicity: usize,
    domain: crate::domains::DomainKind,
    model: &'static str,
    eigenvalues: Vec<([f64; 2], usize)>,
    standardized_lambda: Option<[f64; 2]>,
    automorphism: bool,
    sigma: Vec<Vec<[f64; 2]>>,
    phi_model: Vec<Vec<[f64; 2]>>,
}

fn classify_output(mc: &ModelClass, format: Format) -> String {
    let sigma = *mc.sigma.to_matrix().matrix();
    let model = *mc.phi_model.to_matrix().matrix();
    match format {
        Format::Json => {
            let j = ClassifyJson {
                summary: mc.summary(),
                dw_point: mc.dw_point.location.map(|p| [pair(p[0]), pair(p[1])]),
                location: mc.location,
                multiplicity: mc.multiplicity,
                domain: mc.domain,
                model: mc.kind.label(),
                eigenvalues: mc.decomposition.blocks.iter().map(|b| (pair(b.eigenvalue), b.size)).collect(),
                standardized_lambda: mc.standardized_lambda.map(pair),
                automorphism: mc.is_automorphism,
                sigma: matrix_json(&sigma),
                phi_model: matrix_json(&model),
            };
            serde_json::to_string_pretty(&j).expect("plain data serializes") + "\n"
        }
        _ => {
            let mut s = mc.summary() + "\n";
            s.push_str("eigenvalues:");
            for b in &mc.decomposition.blocks {
                s.push_str(&format!(" {} (block {})", fmt_complex(b.eigenvalue), b.size));
            }
            s.push_str(&format!("\nsigma:\n{sigma}Phi:\n{model}"));
            s
        }
    }
}

fn cmd_classify(opts: &Options) -> CliResult<(String, i32)> {
    let phi = load_map(opts)?;
    let mc = classify(&phi)?;
    Ok((classify_output(&mc, opts.format.unwrap_or(Format::Text)), 0))
}

#[derive(Serialize)]
struct EmbedJson {
    #[serde(flatten)]
    map: MapJson,
    t: f64,
    matrix: Vec<Vec<[f64; 2]>>,
    extrapolated: bool,
    branch_ambiguity: bool,
}

fn cmd_embed(opts: &Options) -> CliResult<(String, i32)> {
    let phi = load_map(opts)?;
    let t = opts.t.ok_or_else(|| Failure::Input("--t is required".into()))?;
    if !t.is_finite() {
        return Err(Failure::Input("--t must be finite".into()));
    }
    let el = Semigroup::new(&phi)?.at(t)?;
    if el.extrapolated {
        eprintln!("warning: t < 0 lies outside the semigroup; the map is extrapolated");
    }
    if el.branch_ambiguity {
        eprintln!("warning: an eigenvalue lies on the negative real axis; principal branch used");
    }
    let j = EmbedJson {
        map: MapJson::from(&el.map),
        t,
        matrix: matrix_json(el.matrix.matrix()),
        extrapolated: el.extrapolated,
        branch_ambiguity: el.branch_ambiguity,
    };
    Ok((serde_json::to_string_pretty(&j).expect("plain data serializes") + "\n", 0))
}

fn cmd_orbit(opts: &Options) -> CliResult<(String, i32)> {
    let phi = load_map(opts)?;
    let z0 = parse_point(opts.z0.as_deref().ok_or_else(|| Failure::Input("--z0 is required".into()))?)?;
    if norm(&z0) >= 1.0 {
        return Err(Failure::Input("z0 must lie in the open unit ball".into()));
    }
    let grid = match (&opts.t_grid, opts.t) {
        (Some(g), _) => parse_grid(g)?,
        (None, Some(t)) => vec![t],
        (None, None) => return Err(Failure::Input("--t-grid or --t is required".into())),
    };
    let group = Semigroup::new(&phi)?;
    let rows = orbit(group.decomposition(), &z0, &grid)?;
    if opts.format == Some(Format::Json) {
        let v: Vec<(f64, [[f64; 2]; 2])> = rows.iter().map(|(t, z)| (*t, [pair(z[0]), pair(z[1])])).collect();
        return Ok((serde_json::to_string_pretty(&v).expect("plain data serializes") + "\n", 0));
    }
    let mut buf = Vec::new();
    write_orbit_csv(&rows, &mut buf).map_err(|e| Failure::Io(e.to_string()))?;
    Ok((String::from_utf8(buf).expect("csv output is utf-8"), 0))
}

const DEFAULT_GRID: [f64; 5] = [0.0, 0.25, 0.5, 1.0, 2.0];

fn verify_checks(phi: &LinearFractionalMap, opts: &Options) -> CliResult<Vec<Check>> {
    let tol = opts.tol;
    let sm = phi.self_map_check(opts.samples, opts.seed);
    let mut checks = vec![Check {
        name: "self_map".into(),
        max_residual: (sm.worst_margin - 1.0).max(0.0),
        pass: sm.violations == 0,
    }];
    if sm.violations > 0 {
        eprintln!("{} of {} samples leave the ball; semigroup checks skipped", sm.violations, sm.samples);
        return Ok(checks);
    }

    let fixed = phi.fixed_points()?;
    let mut fp_res: f64 = 0.0;
    for p in fixed.iter().filter_map(|f| f.location) {
        if let Ok(w) = phi.eval(&p) {
            fp_res = fp_res.max(dist(&w, &p) / (1.0 + norm(&p)));
        }
    }
    checks.push(check("fixed_points", fp_res, tol));

    let grid = match &opts.t_grid {
        Some(g) => parse_grid(g)?,
        None => DEFAULT_GRID.to_vec(),
    };
    let group = Semigroup::new(phi)?;
    let pointwise_samples = opts.samples.min(1000);
    let r = verify_semigroup(group.decomposition(), &grid, &grid, pointwise_samples, opts.seed)?;
    let one = group.at(1.0)?;
    let anchor1 = one.matrix.distance(&phi.to_matrix());
    checks.push(check("identity_at_zero", r.identity_anchor, tol));
    checks.push(check("phi_at_one", anchor1, tol));
    checks.push(check("semigroup_matrix_law", r.matrix_law, tol));
    checks.push(check("semigroup_pointwise_law", r.pointwise_law, tol));
    checks.push(Check {
        name: "ball_preservation".into(),
        max_residual: (r.worst_norm - 1.0).max(0.0),
        pass: r.ball_exits == 0,
    });
    Ok(checks)
}

fn report_output(report: &Report, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(report).expect("plain data serializes") + "\n",
        _ => report.text(),
    }
}

fn cmd_verify(opts: &Options) -> CliResult<(String, i32)> {
    let phi = load_map(opts)?;
    let report = Report::new(verify_checks(&phi, opts)?);
    Ok((report_output(&report, opts.format.unwrap_or(Format::Text)), report.exit))
}

fn example1_closed_form(t: f64) -> Mat3 {
    let t2 = t * t;
    Mat3::from_real([[(2.0 - t2) / 2.0, t, t2 / 2.0], [-t, 1.0, t], [-t2 / 2.0, t, (t2 + 2.0) / 2.0]])
}

/// The golden checks behind `reproduce-paper`.
pub fn paper_checks(samples: usize, seed: u64, tol: f64) -> CliResult<Vec<Check>> {
    let mut checks = Vec::new();

    let phi = crate::lfm::examples::parabolic_example();
    let group = Semigroup::new(&phi)?;
    let mut closed: f64 = 0.0;
    for k in 0..=16 {
        let t = k as f64 / 4.0;
        let want = canonical(&example1_closed_form(t))?;
        closed = closed.max(group.at(t)?.matrix.matrix().max_abs_diff(&want));
    }
    checks.push(check("example1_closed_form_m_phi_t", closed, tol));

    let zero = group.at(0.0)?.matrix.matrix().max_abs_diff(&Mat3::identity());
    let one = group.at(1.0)?.matrix.distance(&phi.to_matrix());
    checks.push(check("example1_phi0_identity_phi1_phi", zero.max(one), tol));

    let mc = classify(&phi)?;
    let dw = mc.dw_point.location.map_or(f64::INFINITY, |p| dist(&p, &[re(1.0), re(0.0)]));
    let lam = mc.standardized_lambda.map_or(f64::INFINITY, |l| (l - 0.5).norm());
    let shape = mc.location == DwLocation::Boundary
        && mc.multiplicity == 3
        && mc.dw_point.classification == PointClass::Boundary;
    let res = if shape { dw.max(lam) } else { f64::INFINITY };
    checks.push(Check {
        name: "example1_classification".into(),
        max_residual: res,
        pass: shape && res <= tol.max(1e-8),
    });

    let s = Mat3::from_real([[1.0, 0.0, 0.0], [0.0, 2.0, -8.0], [0.0, 0.0, 8.0]]);
    let j3 = Mat3::from_real([[1.0, 1.0, 0.0], [0.0, 1.0, 1.0], [0.0, 0.0, 1.0]]);
    let s_inv = Mat3::from_real([[1.0, 0.0, 0.0], [0.0, 0.5, 0.5], [0.0, 0.0, 0.125]]);
    let m_model = heisenberg(EXAMPLE_TRANSLATION).to_matrix();
    checks.push(check("example2_m_Phi_factorization", m_model.matrix().max_abs_diff(&(s * j3 * s_inv)), tol));

    let mut coeff: f64 = 0.0;
    for k in 0..=4 {
        let t = k as f64;
        let f = heisenberg_flow(t);
        let (a, b) = (f.a(), f.b());
        coeff = coeff
            .max((a[0][1] - t / 2.0).norm())
            .max((b[0] - t * (t + 7.0) / 16.0).norm())
            .max((b[1] - t / 4.0).norm());
    }
    let flow1 = heisenberg_flow(1.0).to_matrix().distance(&m_model);
    checks.push(check("example2_Phi_t_coefficients", coeff.max(flow1), tol));

    let pts = sample_ball(samples.min(1000), seed);
    let mut t0: f64 = 0.0;
    let mut t1: f64 = 0.0;
    let mut tt: f64 = 0.0;
    for z in &pts {
        t0 = t0.max(dist(&analytic_phi_t(0.0, z)?, z));
        t1 = t1.max(dist(&closed_form_phi(z)?, &analytic_phi(z)?));
        for t in [0.5, 1.0, 1.5, 2.0, 3.0] {
            tt = tt.max(dist(&closed_form_phi_t(t, z)?, &analytic_phi_t(t, z)?));
        }
    }
    checks.push(check("example2_phi0_identity", t0, tol));
    checks.push(check("example2_closed_form_phi", t1, tol));
    checks.push(check("example2_closed_form_phi_t", tt, tol));
    Ok(checks)
}

fn cmd_reproduce(opts: &Options) -> CliResult<(String, i32)> {
    let report = Report::new(paper_checks(opts.samples, opts.seed, opts.tol)?);
    Ok((report_output(&report, opts.format.unwrap_or(Format::Text)), report.exit))
}

fn validate(opts: &Options) -> CliResult<()> {
    if opts.samples == 0 {
        return Err(Failure::Input("--samples must be positive".into()));
    }
    if opts.tol.is_nan() || opts.tol < 0.0 {
        return Err(Failure::Input("--tol must be nonnegative".into()));
    }
    Ok(())
}

/// Runs a parsed command, returning its output and exit code.
pub fn execute(command: &Command) -> CliResult<(String, i32)> {
    let (opts, f): (&Options, Handler) = match command {
        Command::Classify(o) => (o, cmd_classify),
        Command::Embed(o) => (o, cmd_embed),
        Command::Orbit(o) => (o, cmd_orbit),
        Command::Verify(o) => (o, cmd_verify),
        Command::ReproducePaper(o) => (o, cmd_reproduce),
    };
    validate(opts)?;
    let (text, code) = f(opts)?;
    match &opts.output {
        Some(path) => fs::write(path, &text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(|e| Failure::Io(e.to_string()))?;
        }
    }
    Ok((text, code))
}

/// Entry point; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli.command) {
        Ok((_, code)) => code,
        Err(f) => {
            eprintln!("{f}");
            f.exit_code()
        }
    }
}
