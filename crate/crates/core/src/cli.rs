//! The `kslant` command line: build chains, emit gallery curves, verify,
//! export and report.
//!
//! Every subcommand also reads an optional TOML file (`--config`) whose keys
//! are the long flag names; a flag given on the command line wins.

use crate::curve::{resample, Curve3, CurveMeta, SampledCurve};
use crate::error::{Error, Result};
use crate::frames::{frenet_apparatus, FrenetData};
use crate::gallery::{self, GalleryParams, J3Series};
use crate::io::{self, Format};
use crate::quadrature::{Interval, QuadratureConfig, Rule};
use crate::slant::{chain_i_with, chain_j_with, ChainOptions, Operator, PhaseVector, DEPTH_LIMIT};
use crate::verify::{CheckSpec, SampleOptions, VerificationReport};
use clap::{Args, Parser, Subcommand};
use nalgebra::Vector3;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

const SEED_HELP: &str = "Seed curve: circle:a=A[,r=R] (spherical, for I), circle:r=R or \
plane-circle:r=R (planar, for J), great-circle (speed-2 great circle, for I), helix:a=A,b=B (for J)";

const CHECKS_HELP: &str = "Comma-separated checks: spherical, unit-speed, kslant:K[:axis=X,Y,Z], \
characterization, prime, hyperboloid:a=A,b=B,w=W, magnetic:K:omega=W";

#[derive(Debug, Parser)]
#[command(name = "kslant", version, about = "Construct and verify spherical and Euclidean k-slant curves")]
pub struct Cli {
    /// TOML file with default values for any long flag.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Iterate I or J from a seed and write every level.
    Build(BuildArgs),
    /// Sample a closed-form curve.
    Gallery(GalleryArgs),
    /// Run checks on a curve file; exit status 1 if any fails.
    Verify(VerifyArgs),
    /// Convert a curve file, optionally adding Frenet frame columns.
    Export(ExportArgs),
    /// Run checks and write a JSON report with run metadata.
    Report(VerifyArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct QuadArgs {
    /// Panel rule: simpson or gauss-legendre.
    #[arg(long, value_parser = parse_rule)]
    pub rule: Option<Rule>,
    /// Panels per unit parameter length.
    #[arg(long)]
    pub panels: Option<usize>,
    /// Gauss-Legendre nodes per panel.
    #[arg(long)]
    pub nodes: Option<usize>,
    /// Richardson extrapolation between n and 2n panels.
    #[arg(long)]
    pub refinement: bool,
}

#[derive(Debug, Clone, Default, Args)]
pub struct OutArgs {
    /// Output file (standard output when absent).
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    /// json or csv (default: from the output extension, else json).
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Default, Args)]
#[command(allow_negative_numbers = true)]
pub struct BuildArgs {
    #[arg(long, help = SEED_HELP)]
    pub seed: Option<String>,
    /// Operator, I or J.
    #[arg(long, value_parser = parse_operator)]
    pub op: Option<Operator>,
    /// Number of operator applications.
    #[arg(long)]
    pub depth: Option<usize>,
    /// Phase per level, comma-separated (default all zero).
    #[arg(long, value_delimiter = ',')]
    pub phases: Option<Vec<f64>>,
    /// Samples per level.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Seed domain as MIN,MAX (default: one period).
    #[arg(long, value_delimiter = ',')]
    pub domain: Option<Vec<f64>>,
    /// Allow depths beyond the default limit.
    #[arg(long)]
    pub unsafe_depth: bool,
    #[command(flatten)]
    pub quad: QuadArgs,
    #[command(flatten)]
    pub output: OutArgs,
}

#[derive(Debug, Clone, Default, Args)]
#[command(allow_negative_numbers = true)]
pub struct GalleryArgs {
    /// circle, plane-circle, great-circle, great-circle-image, spherical-helix,
    /// circular-helix, constant-precession or j3-series.
    #[arg(long)]
    pub name: Option<String>,
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long)]
    pub b: Option<f64>,
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long)]
    pub w: Option<f64>,
    /// Sign ε, +1 or -1.
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub theta0: Option<f64>,
    /// Bessel terms for j3-series.
    #[arg(long)]
    pub terms: Option<usize>,
    #[arg(long)]
    pub samples: Option<usize>,
    /// Parameter domain as MIN,MAX.
    #[arg(long, value_delimiter = ',')]
    pub domain: Option<Vec<f64>>,
    #[command(flatten)]
    pub output: OutArgs,
}

#[derive(Debug, Clone, Default, Args)]
pub struct VerifyArgs {
    /// Curve file (.json curve or chain, or .csv).
    #[arg(long = "in", value_name = "FILE")]
    pub input: Option<PathBuf>,
    #[arg(long, help = CHECKS_HELP)]
    pub checks: Option<String>,
    /// Tolerance applied to every check.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Samples per check.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Chain level to check (default: the last).
    #[arg(long)]
    pub level: Option<usize>,
    /// Also write the report as JSON here (verify), or the report file (report).
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub quad: QuadArgs,
}

#[derive(Debug, Clone, Default, Args)]
pub struct ExportArgs {
    #[arg(long = "in", value_name = "FILE")]
    pub input: Option<PathBuf>,
    /// Chain level to export (default: the whole chain for JSON, the last level for CSV).
    #[arg(long)]
    pub level: Option<usize>,
    /// Append T, N, B, kappa and tau columns (CSV only).
    #[arg(long)]
    pub frames: bool,
    #[command(flatten)]
    pub output: OutArgs,
}

/// Values read from `--config`; keys are the long flag names.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct RunConfig {
    pub seed: Option<String>,
    pub op: Option<Operator>,
    pub depth: Option<usize>,
    pub phases: Option<Vec<f64>>,
    pub samples: Option<usize>,
    pub domain: Option<Vec<f64>>,
    pub unsafe_depth: Option<bool>,
    pub rule: Option<Rule>,
    pub panels: Option<usize>,
    pub nodes: Option<usize>,
    pub refinement: Option<bool>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub name: Option<String>,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub r: Option<f64>,
    pub w: Option<f64>,
    pub eps: Option<f64>,
    pub theta0: Option<f64>,
    pub terms: Option<usize>,
    #[serde(rename = "in")]
    pub input: Option<PathBuf>,
    pub checks: Option<String>,
    pub tol: Option<f64>,
    pub level: Option<usize>,
    pub frames: Option<bool>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))
    }
}

fn parse_operator(s: &str) -> std::result::Result<Operator, String> {
    match s {
        "I" | "i" => Ok(Operator::I),
        "J" | "j" => Ok(Operator::J),
        _ => Err(format!("expected I or J, got `{s}`")),
    }
}

fn parse_rule(s: &str) -> std::result::Result<Rule, String> {
    match s {
        "simpson" => Ok(Rule::Simpson),
        "gauss-legendre" | "gauss" => Ok(Rule::GaussLegendre),
        _ => Err(format!("expected simpson or gauss-legendre, got `{s}`")),
    }
}

fn usage(msg: impl Into<String>) -> Error {
    Error::InvalidConfig(msg.into())
}

/// Whether a run succeeded with all checks passing.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Success,
    ChecksFailed,
}

/// Parses `argv`, runs the command and returns the process exit code:
/// 0 on success, 1 when a check fails, 2 on any usage or runtime error.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

/// [`run`] with explicit output streams.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(Outcome::Success) => 0,
        Ok(Outcome::ChecksFailed) => 1,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

/// Runs a parsed command.
pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<Outcome> {
    let cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    match &cli.command {
        Command::Build(a) => build(a, &cfg, out),
        Command::Gallery(a) => gallery_cmd(a, &cfg, out),
        Command::Verify(a) => verify_cmd(a, &cfg, out, false),
        Command::Report(a) => verify_cmd(a, &cfg, out, true),
        Command::Export(a) => export(a, &cfg, out),
    }
}

fn quadrature(q: &QuadArgs, cfg: &RunConfig) -> Result<QuadratureConfig> {
    let d = QuadratureConfig::default();
    let c = QuadratureConfig {
        rule: q.rule.or(cfg.rule).unwrap_or(d.rule),
        panels: q.panels.or(cfg.panels).unwrap_or(d.panels),
        nodes: q.nodes.or(cfg.nodes).unwrap_or(d.nodes),
        refinement: q.refinement || cfg.refinement.unwrap_or(false),
    };
    c.validate()?;
    Ok(c)
}

fn domain_arg(v: Option<&Vec<f64>>) -> Result<Option<Interval>> {
    match v {
        None => Ok(None),
        Some(v) if v.len() == 2 => Interval::new(v[0], v[1]).map(Some),
        Some(v) => Err(usage(format!("--domain needs MIN,MAX, got {} values", v.len()))),
    }
}

fn output_format(o: &OutArgs, cfg: &RunConfig, path: Option<&Path>) -> Format {
    o.format.or(cfg.format).or_else(|| path.map(Format::from_path)).unwrap_or_default()
}

/// Writes atomically to `path`, or to `out` when there is no path.
fn emit(path: Option<&Path>, text: &str, out: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => io::write_atomic(p, text),
        None => match out.write_all(text.as_bytes()) {
            Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
            r => r.map_err(Error::from),
        },
    }
}

/// A `name:key=value,...` spec.
#[derive(Clone, Debug, PartialEq)]
pub struct SeedSpec {
    pub kind: String,
    pub params: BTreeMap<String, f64>,
}

impl SeedSpec {
    pub fn parse(s: &str) -> Result<Self> {
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        let mut params = BTreeMap::new();
        for item in rest.split(',').map(str::trim).filter(|x| !x.is_empty()) {
            let (k, v) = item.split_once('=').ok_or_else(|| usage(format!("seed `{s}`: expected key=value, got `{item}`")))?;
            let v: f64 = v.trim().parse().map_err(|_| usage(format!("seed `{s}`: `{k}` is not a number")))?;
            params.insert(k.trim().to_string(), v);
        }
        if kind.is_empty() {
            return Err(usage("empty seed"));
        }
        Ok(SeedSpec { kind: kind.trim().to_string(), params })
    }

    fn get(&self, key: &str) -> Option<f64> {
        self.params.get(key).copied()
    }

    fn need(&self, key: &str) -> Result<f64> {
        self.get(key).ok_or_else(|| usage(format!("seed `{}` needs `{key}`", self.kind)))
    }

    fn only(&self, keys: &[&str]) -> Result<()> {
        match self.params.keys().find(|k| !keys.contains(&k.as_str())) {
            Some(k) => Err(usage(format!("seed `{}` does not take `{k}`", self.kind))),
            None => Ok(()),
        }
    }

    /// The seed curve for `op`, its parameter name and whether the strict
    /// seed checks apply.
    pub fn curve(&self, op: Operator) -> Result<(Curve3, &'static str, bool)> {
        match (self.kind.as_str(), op) {
            ("circle", Operator::I) => {
                self.only(&["a", "r"])?;
                let (a, r) = spherical_ar(self.get("a"), self.get("r"))?;
                Ok((gallery::circle(Vector3::new(0.0, 0.0, a), r)?, "s", true))
            }
            ("circle", Operator::J) | ("plane-circle", Operator::J) => {
                self.only(&["r"])?;
                Ok((gallery::plane_circle(self.get("r").unwrap_or(1.0))?, "s", true))
            }
            ("great-circle", Operator::I) => {
                self.only(&[])?;
                Ok((gallery::geodesic_circle_example(), "t", true))
            }
            ("helix", Operator::J) => {
                self.only(&["a", "b"])?;
                Ok((gallery::circular_helix(self.need("a")?, self.need("b")?)?, "s", false))
            }
            (k, op) => Err(usage(format!("seed `{k}` is not available for operator {op}"))),
        }
    }
}

/// Completes (a, r) with a² + r² = 1 when one of them is missing.
fn spherical_ar(a: Option<f64>, r: Option<f64>) -> Result<(f64, f64)> {
    match (a, r) {
        (Some(a), Some(r)) => Ok((a, r)),
        (Some(a), None) if a.abs() < 1.0 => Ok((a, (1.0 - a * a).sqrt())),
        (None, Some(r)) if r > 0.0 && r <= 1.0 => Ok(((1.0 - r * r).sqrt(), r)),
        (None, None) => Ok((0.0, 1.0)),
        _ => Err(usage(format!("no spherical circle with a = {a:?}, r = {r:?}"))),
    }
}

fn build(a: &BuildArgs, cfg: &RunConfig, out: &mut dyn Write) -> Result<Outcome> {
    let seed_text = a.seed.clone().or_else(|| cfg.seed.clone()).ok_or_else(|| usage("build needs --seed"))?;
    let op = a.op.or(cfg.op).unwrap_or(Operator::I);
    let phases = a.phases.clone().or_else(|| cfg.phases.clone());
    let depth = a.depth.or(cfg.depth).or(phases.as_ref().map(Vec::len)).unwrap_or(1);
    let phases = PhaseVector::new(phases.unwrap_or_else(|| vec![0.0; depth]));
    if phases.thetas.len() != depth {
        return Err(usage(format!("--phases has {} values but --depth is {depth}", phases.thetas.len())));
    }
    let unsafe_depth = a.unsafe_depth || cfg.unsafe_depth.unwrap_or(false);
    let samples = a.samples.or(cfg.samples).unwrap_or(2048);
    let quad = quadrature(&a.quad, cfg)?;
    let path = a.output.out.clone().or_else(|| cfg.out.clone());
    let format = output_format(&a.output, cfg, path.as_deref());

    let spec = SeedSpec::parse(&seed_text)?;
    let (mut seed, parameter, strict) = spec.curve(op)?;
    if let Some(d) = domain_arg(a.domain.as_ref().or(cfg.domain.as_ref()))? {
        seed = seed.with_domain(d);
    }
    let opts = ChainOptions { depth_limit: if unsafe_depth { usize::MAX } else { DEPTH_LIMIT }, strict_seed: strict };
    let levels = match op {
        Operator::I => chain_i_with(&seed, depth, &phases, &quad, &opts)?,
        Operator::J => chain_j_with(&seed, depth, &phases, &quad, &opts)?,
    };
    let sampled = levels
        .iter()
        .map(|l| {
            let meta = CurveMeta {
                name: Some(format!("{op}^{}", l.level)),
                seed: Some(seed_text.clone()),
                operator: Some(op.to_string()),
                level: Some(l.level),
                theta: phases.thetas[..l.level].to_vec(),
                parameter: parameter.into(),
                spherical: op == Operator::I,
                singular: Vec::new(),
                params: spec.params.clone(),
            };
            resample(&l.curve, samples, meta)
        })
        .collect::<Result<Vec<_>>>()?;
    let text = match format {
        Format::Json => io::chain_to_json(&sampled)?,
        Format::Csv => io::curve_to_csv(sampled.last().expect("chain has a seed level"))?,
    };
    emit(path.as_deref(), &text, out)?;
    Ok(Outcome::Success)
}

/// Resolved gallery request.
fn gallery_curve(args: &GalleryArgs, cfg: &RunConfig) -> Result<(Curve3, CurveMeta)> {
    let name = args.name.clone().or_else(|| cfg.name.clone()).ok_or_else(|| usage("gallery needs --name"))?;
    let av = args.a.or(cfg.a);
    let bv = args.b.or(cfg.b);
    let rv = args.r.or(cfg.r);
    let wv = args.w.or(cfg.w);
    let eps = args.eps.or(cfg.eps).unwrap_or(1.0);
    let theta0 = args.theta0.or(cfg.theta0).unwrap_or(0.0);
    let need = |v: Option<f64>, key: &str| v.ok_or_else(|| usage(format!("gallery `{name}` needs --{key}")));
    let mut params = BTreeMap::new();
    let mut parameter = "s";
    let mut spherical = false;
    let curve = match name.as_str() {
        "circle" => {
            let (a, r) = spherical_ar(av, rv)?;
            params.extend([("a".to_string(), a), ("r".to_string(), r)]);
            spherical = true;
            gallery::circle(Vector3::new(0.0, 0.0, a), r)?
        }
        "plane-circle" => {
            let r = rv.unwrap_or(1.0);
            params.insert("r".into(), r);
            gallery::plane_circle(r)?
        }
        "great-circle" => {
            parameter = "t";
            spherical = true;
            gallery::geodesic_circle_example()
        }
        "great-circle-image" => {
            parameter = "t";
            spherical = true;
            params.insert("epsilon".into(), eps);
            gallery::geodesic_circle_image(eps)
        }
        "spherical-helix" => {
            let (a, r) = spherical_ar(Some(need(av, "a")?), rv)?;
            params.extend([("a".to_string(), a), ("r".to_string(), r), ("theta0".to_string(), theta0)]);
            spherical = true;
            gallery::spherical_helix(a, r, theta0)?
        }
        "circular-helix" => {
            let (a, b) = (need(av, "a")?, need(bv, "b")?);
            params.extend([("a".to_string(), a), ("b".to_string(), b)]);
            gallery::circular_helix(a, b)?
        }
        "constant-precession" => {
            let (a, b) = (need(av, "a")?, need(bv, "b")?);
            let w = wv.unwrap_or(1.0 / (a * a + b * b).sqrt());
            params.extend([("a".to_string(), a), ("b".to_string(), b), ("w".to_string(), w), ("epsilon".to_string(), eps)]);
            gallery::constant_precession(a, b, w, eps)?
        }
        "j3-series" => {
            let (a, b) = (need(av, "a")?, need(bv, "b")?);
            let terms = args.terms.or(cfg.terms).unwrap_or(crate::bessel::DEFAULT_TERMS);
            params.extend([
                ("a".to_string(), a),
                ("b".to_string(), b),
                ("epsilon".to_string(), eps),
                ("theta0".to_string(), theta0),
                ("terms".to_string(), terms as f64),
            ]);
            let p = GalleryParams::euclidean(a, b, eps, theta0)?;
            J3Series::new(&p, terms)?.curve(Interval::new(0.0, 2.0 * std::f64::consts::PI)?)
        }
        other => return Err(usage(format!("unknown gallery curve `{other}`"))),
    };
    let curve = match domain_arg(args.domain.as_ref().or(cfg.domain.as_ref()))? {
        Some(d) => curve.with_domain(d),
        None => curve,
    };
    let meta = CurveMeta {
        name: Some(name),
        parameter: parameter.into(),
        spherical,
        params,
        ..Default::default()
    };
    Ok((curve, meta))
}

fn gallery_cmd(a: &GalleryArgs, cfg: &RunConfig, out: &mut dyn Write) -> Result<Outcome> {
    let (curve, meta) = gallery_curve(a, cfg)?;
    let samples = a.samples.or(cfg.samples).unwrap_or(1024);
    let path = a.output.out.clone().or_else(|| cfg.out.clone());
    let sampled = resample(&curve, samples, meta)?;
    let text = match output_format(&a.output, cfg, path.as_deref()) {
        Format::Json => io::curve_to_json(&sampled)?,
        Format::Csv => io::curve_to_csv(&sampled)?,
    };
    emit(path.as_deref(), &text, out)?;
    Ok(Outcome::Success)
}

/// Picks a chain level: by `meta.level` when recorded, else by index; the
/// last curve when `level` is absent.
pub fn select_level(mut curves: Vec<SampledCurve>, level: Option<usize>) -> Result<SampledCurve> {
    match level {
        None => Ok(curves.pop().expect("readers never return an empty chain")),
        Some(l) => {
            let idx = curves.iter().position(|c| c.meta.level == Some(l)).or((l < curves.len()).then_some(l));
            match idx {
                Some(i) => Ok(curves.swap_remove(i)),
                None => Err(usage(format!("no level {l} among {} curves", curves.len()))),
            }
        }
    }
}

/// Checks suggested by the metadata when `--checks` is absent.
pub fn default_checks(meta: &CurveMeta) -> Vec<CheckSpec> {
    let mut out = Vec::new();
    if meta.spherical {
        out.push(CheckSpec::Spherical);
    }
    if let (Some(op), Some(level)) = (meta.operator.as_deref(), meta.level) {
        if op == "J" {
            out.push(CheckSpec::UnitSpeed);
        }
        if level >= 1 {
            out.push(CheckSpec::KSlant { k: level - 1, axis: [0.0, 0.0, 1.0] });
        }
    } else if meta.spherical && meta.singular.is_empty() {
        out.push(CheckSpec::Characterization);
    }
    if out.is_empty() {
        out.push(CheckSpec::UnitSpeed);
    }
    out
}

/// JSON document written by `report`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReportDocument {
    pub tool: String,
    /// Seconds since the Unix epoch.
    pub generated: u64,
    pub input: PathBuf,
    pub level: Option<usize>,
    pub tol: f64,
    pub samples: usize,
    pub passed: bool,
    pub report: VerificationReport,
}

fn verify_cmd(a: &VerifyArgs, cfg: &RunConfig, out: &mut dyn Write, as_report: bool) -> Result<Outcome> {
    let input = a.input.clone().or_else(|| cfg.input.clone()).ok_or_else(|| usage("needs --in"))?;
    let tol = a.tol.or(cfg.tol).unwrap_or(1e-6);
    if !(tol > 0.0) {
        return Err(usage(format!("--tol must be positive, got {tol}")));
    }
    let samples = a.samples.or(cfg.samples).unwrap_or(SampleOptions::default().samples);
    if samples < 2 {
        return Err(usage("--samples must be at least 2"));
    }
    let level = a.level.or(cfg.level);
    let quad = quadrature(&a.quad, cfg)?;
    let checks = match a.checks.as_ref().or(cfg.checks.as_ref()) {
        Some(text) => Some(CheckSpec::parse_list(text)?),
        None => None,
    };
    let path = a.out.clone().or_else(|| cfg.out.clone());

    let sampled = select_level(io::read_curves(&input)?, level)?;
    let checks = checks.unwrap_or_else(|| default_checks(&sampled.meta));
    let curve = sampled.to_curve()?;
    let opts = SampleOptions { samples, ..Default::default() };
    let report = VerificationReport::run(&curve, sampled.meta.clone(), &checks, tol, &opts, &quad)?;
    let passed = report.passed();
    if as_report {
        let generated = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        let doc = ReportDocument {
            tool: format!("kslant {}", env!("CARGO_PKG_VERSION")),
            generated,
            input,
            level,
            tol,
            samples,
            passed,
            report,
        };
        let text = serde_json::to_string_pretty(&doc)? + "\n";
        if path.is_some() {
            write!(out, "{}", doc.report)?;
        }
        emit(path.as_deref(), &text, out)?;
    } else {
        if let Some(p) = &path {
            io::write_atomic(p, &(serde_json::to_string_pretty(&report)? + "\n"))?;
        }
        write!(out, "{report}")?;
    }
    Ok(if passed { Outcome::Success } else { Outcome::ChecksFailed })
}

fn export(a: &ExportArgs, cfg: &RunConfig, out: &mut dyn Write) -> Result<Outcome> {
    let input = a.input.clone().or_else(|| cfg.input.clone()).ok_or_else(|| usage("export needs --in"))?;
    let path = a.output.out.clone().or_else(|| cfg.out.clone());
    let format = output_format(&a.output, cfg, path.as_deref());
    let frames = a.frames || cfg.frames.unwrap_or(false);
    let level = a.level.or(cfg.level);
    if frames && format != Format::Csv {
        return Err(usage("--frames needs CSV output"));
    }
    let curves = io::read_curves(&input)?;
    let text = match (format, level) {
        (Format::Json, None) if curves.len() > 1 => io::chain_to_json(&curves)?,
        (Format::Json, _) => io::curve_to_json(&select_level(curves, level)?)?,
        (Format::Csv, _) => {
            let c = select_level(curves, level)?;
            if frames {
                let curve = c.to_curve()?;
                let data: Vec<Option<FrenetData>> = c.grid.iter().map(|&t| frenet_apparatus(&curve, t).ok()).collect();
                io::frames_to_csv(&c, &data)?
            } else {
                io::curve_to_csv(&c)?
            }
        }
    };
    emit(path.as_deref(), &text, out)?;
    Ok(Outcome::Success)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_grammar() {
        let s = SeedSpec::parse("circle:a=0.6,r=0.8").unwrap();
        assert_eq!(s.kind, "circle");
        assert_eq!(s.params["a"], 0.6);
        assert!(SeedSpec::parse("circle:a").is_err());
        assert!(SeedSpec::parse("circle:a=x").is_err());
        assert!(SeedSpec::parse("helix:a=1,b=1").unwrap().curve(Operator::I).is_err());
        assert!(SeedSpec::parse("circle:a=0.6,q=1").unwrap().curve(Operator::I).is_err());
    }

    #[test]
    fn spherical_radius_is_completed() {
        let (a, r) = spherical_ar(Some(0.6), None).unwrap();
        assert!((a - 0.6).abs() < 1e-15 && (r - 0.8).abs() < 1e-15);
        assert_eq!(spherical_ar(None, None).unwrap(), (0.0, 1.0));
        assert!(spherical_ar(Some(1.5), None).is_err());
    }

    #[test]
    fn config_rejects_unknown_keys() {
        assert!(toml::from_str::<RunConfig>("depth = 2\nop = \"J\"\nrule = \"simpson\"").is_ok());
        assert!(toml::from_str::<RunConfig>("dpeth = 2").is_err());
    }

    #[test]
    fn bad_flags_exit_with_two() {
        let (mut o, mut e) = (Vec::new(), Vec::new());
        assert_eq!(run_with(["kslant", "build", "--op", "K"], &mut o, &mut e), 2);
        assert_eq!(run_with(["kslant", "build", "--depth", "2", "--phases", "0"], &mut o, &mut e), 2);
        assert_eq!(run_with(["kslant", "--help"], &mut o, &mut e), 0);
    }
}
