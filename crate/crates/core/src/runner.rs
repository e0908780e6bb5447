//! Configuration-driven runs: `sample`, `solve`, `evolve`, `verify` and
//! `charfun`. Every run writes its artifacts and a `manifest.json` with the
//! echoed configuration and SHA-256 hashes of the artifacts.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::antider::{by_parts_residual, covariation, antider_w};
use crate::char_expect::verify_char_expectation;
use crate::charfun::{character, shell_distribution, GaussianSpec};
use crate::error::Error;
use crate::evolution::{
    exp_operator, generating_operator, left_residual, perturbation_check, solve_dual, solve_evolution,
    GeneratorSpec, Matrix,
};
use crate::grid::{chain_indices, GridFunction};
use crate::measure::{derive_seed, ensemble, GaussianSampler, MahlerWiener, TreeWiener, WienerSampler, ZetaLaw};
use crate::padic::{check_params, BallSpec, PAdic};
use crate::sde::{moment_diagnostic, solve_ensemble, stability_diagnostic, Builtin, SdeProblem, SeriesTerm};

/// Subcommands of the runner.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Sample,
    Solve,
    Evolve,
    Verify,
    Charfun,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Sample => "sample",
            Command::Solve => "solve",
            Command::Evolve => "evolve",
            Command::Verify => "verify",
            Command::Charfun => "charfun",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub p: u32,
    pub precision: u32,
    #[serde(default = "default_depth")]
    pub depth: u32,
    #[serde(default)]
    pub radius_exp: i64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub sampler: SamplerConfig,
    #[serde(default)]
    pub sample: Option<SampleConfig>,
    #[serde(default)]
    pub solve: Option<SolveConfig>,
    #[serde(default)]
    pub evolve: Option<EvolveConfig>,
    #[serde(default)]
    pub verify: Option<VerifyConfig>,
    #[serde(default)]
    pub charfun: Option<CharfunConfig>,
    #[serde(default)]
    pub tolerances: Tolerances,
}

fn default_depth() -> u32 {
    3
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Monte Carlo tolerance in units of `1 / sqrt(S)`.
    #[serde(default = "default_mc")]
    pub mc: f64,
    /// Shell histogram tolerance in binomial standard errors.
    #[serde(default = "default_sigmas")]
    pub shell_sigmas: f64,
    #[serde(default = "default_tail")]
    pub tail: f64,
}

fn default_mc() -> f64 {
    4.0
}
fn default_sigmas() -> f64 {
    3.0
}
fn default_tail() -> f64 {
    1e-12
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { mc: default_mc(), shell_sigmas: default_sigmas(), tail: default_tail() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "lowercase")]
pub enum SamplerKind {
    Tree,
    Mahler,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplerConfig {
    pub kind: SamplerKind,
    #[serde(default = "one")]
    pub beta: f64,
    #[serde(default = "one")]
    pub q: f64,
    /// Mahler series length.
    #[serde(default = "default_terms")]
    pub terms: u32,
    /// Mahler geometric decay rate of `|zeta_m|`.
    #[serde(default = "one")]
    pub rate: f64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig { kind: SamplerKind::Tree, beta: 1.0, q: 1.0, terms: default_terms(), rate: 1.0 }
    }
}

fn one() -> f64 {
    1.0
}
fn default_terms() -> u32 {
    8
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleConfig {
    #[serde(default = "one")]
    pub beta: f64,
    #[serde(default = "one")]
    pub q: f64,
    #[serde(default = "zero_str")]
    pub shift: String,
    pub draws: u64,
    /// Digits per draw.
    #[serde(default = "default_digits")]
    pub digits: u32,
    /// Test points `h = p^k`.
    #[serde(default = "default_h")]
    pub h_exponents: Vec<i64>,
    /// Wiener paths exported to `paths.csv`.
    #[serde(default)]
    pub paths: u64,
}

fn zero_str() -> String {
    "0".into()
}
fn default_digits() -> u32 {
    16
}
fn default_h() -> Vec<i64> {
    vec![-2, -1, 0, 1, 2]
}

/// A built-in coefficient program.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CoefConfig {
    Constant { value: String },
    Linear { slope: String, #[serde(default = "zero_str")] offset: String },
    Polynomial { coeffs: Vec<String> },
    ByBall { depth: u32, values: Vec<String> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermConfig {
    pub b: u32,
    pub m: u32,
    pub l: u32,
    pub coef: CoefConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnosticsConfig {
    #[serde(default = "one_u32")]
    pub s: u32,
    pub c1: f64,
    pub c2: f64,
    #[serde(default = "default_sigmas")]
    pub sigmas: f64,
    /// Initial value of the coupled second solution.
    pub xi0_alt: String,
}

fn one_u32() -> u32 {
    1
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveConfig {
    pub xi0: String,
    pub drift: CoefConfig,
    pub diffusion: CoefConfig,
    #[serde(default)]
    pub series: Vec<TermConfig>,
    #[serde(default = "one_u64")]
    pub samples: u64,
    /// Solutions written to `solution.csv`.
    #[serde(default = "one_u64")]
    pub export: u64,
    #[serde(default)]
    pub diagnostics: Option<DiagnosticsConfig>,
}

fn one_u64() -> u64 {
    1
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveConfig {
    pub dim: usize,
    /// Constant generator, row-major.
    pub generator: Vec<String>,
    /// Constant perturbation, row-major.
    #[serde(default)]
    pub perturbation: Option<Vec<String>>,
    #[serde(default = "default_triples")]
    pub triples: u64,
    #[serde(default = "default_points")]
    pub generator_points: Vec<u64>,
}

fn default_triples() -> u64 {
    100
}
fn default_points() -> Vec<u64> {
    vec![0, 1]
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    #[serde(default = "default_trials")]
    pub trials: u64,
    #[serde(default)]
    pub char_points: Vec<u64>,
    #[serde(default = "one_str")]
    pub gamma: String,
    #[serde(default = "one_str")]
    pub g: String,
    #[serde(default = "default_char_samples")]
    pub char_samples: u64,
}

fn default_trials() -> u64 {
    1000
}
fn one_str() -> String {
    "1".into()
}
fn default_char_samples() -> u64 {
    10_000
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CharfunConfig {
    pub beta: f64,
    #[serde(default = "one")]
    pub q: f64,
    pub m_lo: i64,
    pub m_hi: i64,
}

/// Failure modes of a run.
#[derive(Debug)]
pub enum RunError {
    /// Invalid configuration; exit status 2.
    Schema(String),
    /// An asserted check failed; exit status 1.
    Assertion { report: PathBuf },
    /// Computation or I/O failure; exit status 1.
    Runtime(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Schema(_) => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Schema(m) => write!(f, "{m}"),
            RunError::Assertion { report } => write!(f, "assertion failed, see {}", report.display()),
            RunError::Runtime(m) => write!(f, "{m}"),
        }
    }
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        RunError::Runtime(e.to_string())
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Runtime(e.to_string())
    }
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.len() - before.rfind('\n').map(|i| i + 1).unwrap_or(0) + 1;
    (line, col)
}

/// Line of the first occurrence of `needle`, or 1.
fn line_of(text: &str, needle: &str) -> usize {
    text.find(needle).map(|o| line_col(text, o).0).unwrap_or(1)
}

/// A loaded and validated configuration.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub config: RunConfig,
    pub source: String,
    pub path: String,
}

impl Loaded {
    fn schema(&self, needle: &str, msg: impl fmt::Display) -> RunError {
        RunError::Schema(format!("{}:{}: {msg}", self.path, line_of(&self.source, needle)))
    }

    fn scalar(&self, s: &str) -> Result<PAdic, RunError> {
        parse_scalar(self.config.p, self.config.precision, s).map_err(|e| self.schema(s, e))
    }

    fn domain(&self) -> BallSpec {
        let c = &self.config;
        BallSpec { center: PAdic::zero(c.p, c.precision), radius_exp: c.radius_exp, depth: c.depth as i64 }
    }
}

/// Parse `text` and validate it for `cmd` before any computation.
pub fn load_config(text: &str, path: &str, cmd: Command) -> Result<Loaded, RunError> {
    let config: RunConfig = toml::from_str(text).map_err(|e| {
        let (line, col) = e.span().map(|s| line_col(text, s.start)).unwrap_or((1, 1));
        RunError::Schema(format!("{path}:{line}:{col}: {}", e.message()))
    })?;
    let l = Loaded { config, source: text.to_string(), path: path.to_string() };
    validate(&l, cmd)?;
    Ok(l)
}

fn validate(l: &Loaded, cmd: Command) -> Result<(), RunError> {
    let c = &l.config;
    check_params(c.p, c.precision).map_err(|e| l.schema("p", e))?;
    if (c.radius_exp + c.depth as i64) < 1 {
        return Err(l.schema("depth", "grid needs at least one digit level"));
    }
    if (c.p as f64).powi((c.radius_exp + c.depth as i64) as i32) > 2e6 {
        return Err(l.schema("depth", "grid larger than 2e6 points"));
    }
    let need = |present: bool, section: &str| {
        if present {
            Ok(())
        } else {
            Err(l.schema(&format!("[{section}]"), format!("subcommand {} needs a [{section}] section", cmd.name())))
        }
    };
    match cmd {
        Command::Sample => need(c.sample.is_some(), "sample")?,
        Command::Solve => need(c.solve.is_some(), "solve")?,
        Command::Evolve => need(c.evolve.is_some(), "evolve")?,
        Command::Verify => need(c.verify.is_some(), "verify")?,
        Command::Charfun => need(c.charfun.is_some(), "charfun")?,
    }
    if let Some(s) = &c.sample {
        check_params(c.p, s.digits).map_err(|e| l.schema("digits", e))?;
        if s.draws == 0 {
            return Err(l.schema("draws", "draws must be positive"));
        }
        spec_1d(l, s.beta, s.q, &s.shift)?;
    }
    if let Some(s) = &c.solve {
        l.scalar(&s.xi0)?;
        builtin(l, &s.drift)?;
        builtin(l, &s.diffusion)?;
        for t in &s.series {
            builtin(l, &t.coef)?;
            if t.l > t.m {
                return Err(l.schema("series", format!("term with l = {} > m = {}", t.l, t.m)));
            }
        }
        if let Some(d) = &s.diagnostics {
            l.scalar(&d.xi0_alt)?;
        }
        if s.samples == 0 {
            return Err(l.schema("samples", "samples must be positive"));
        }
    }
    if let Some(e) = &c.evolve {
        matrix(l, e.dim, &e.generator)?;
        if let Some(b) = &e.perturbation {
            matrix(l, e.dim, b)?;
        }
        if let Some(&bad) = e.generator_points.iter().find(|&&t| t >= l.domain().len()) {
            return Err(l.schema("generator_points", format!("point {bad} is off the grid")));
        }
    }
    if let Some(v) = &c.verify {
        l.scalar(&v.gamma)?;
        l.scalar(&v.g)?;
        if let Some(&bad) = v.char_points.iter().find(|&&t| t >= l.domain().len()) {
            return Err(l.schema("char_points", format!("point {bad} is off the grid")));
        }
    }
    if let Some(cf) = &c.charfun {
        spec_1d(l, cf.beta, cf.q, "0")?;
        if cf.m_hi < cf.m_lo {
            return Err(l.schema("m_hi", "m_hi < m_lo"));
        }
    }
    wiener(l, &c.sampler).map_err(|e| match e {
        RunError::Runtime(m) => l.schema("[sampler]", m),
        e => e,
    })?;
    Ok(())
}

/// Integer, `a/b` rational, or canonical `QP(...)` text.
pub fn parse_scalar(p: u32, n: u32, s: &str) -> Result<PAdic, Error> {
    let s = s.trim();
    if s.starts_with("QP(") {
        let x: PAdic = s.parse()?;
        if x.prime() != p {
            return Err(Error::PrimeMismatch(x.prime(), p));
        }
        return Ok(x);
    }
    let int = |t: &str| t.trim().parse::<i128>().map_err(|_| Error::Parse(format!("not a number: {s:?}")));
    match s.split_once('/') {
        Some((a, b)) => PAdic::from_rational(p, n, int(a)?, int(b)?),
        None => Ok(PAdic::from_int(p, n, int(s)?)),
    }
}

fn spec_1d(l: &Loaded, beta: f64, q: f64, shift: &str) -> Result<GaussianSpec, RunError> {
    GaussianSpec::one_dim(beta, q, l.scalar(shift)?).map_err(|e| l.schema("beta", e))
}

fn builtin(l: &Loaded, c: &CoefConfig) -> Result<Builtin, RunError> {
    Ok(match c {
        CoefConfig::Constant { value } => Builtin::Constant(l.scalar(value)?),
        CoefConfig::Linear { slope, offset } => Builtin::Linear { slope: l.scalar(slope)?, offset: l.scalar(offset)? },
        CoefConfig::Polynomial { coeffs } => {
            Builtin::Polynomial(coeffs.iter().map(|s| l.scalar(s)).collect::<Result<_, _>>()?)
        }
        CoefConfig::ByBall { depth, values } => {
            let p = l.config.p as usize;
            if values.len() != p.pow(*depth) {
                return Err(l.schema("by_ball", format!("by_ball with depth {depth} needs {} values", p.pow(*depth))));
            }
            let d = l.domain();
            Builtin::ByBall {
                center: d.center,
                radius_exp: d.radius_exp,
                depth: *depth,
                values: values.iter().map(|s| l.scalar(s)).collect::<Result<_, _>>()?,
            }
        }
    })
}

fn matrix(l: &Loaded, dim: usize, entries: &[String]) -> Result<Matrix, RunError> {
    let v = entries.iter().map(|s| l.scalar(s)).collect::<Result<Vec<_>, _>>()?;
    Matrix::new(dim, v).map_err(|e| l.schema("generator", e))
}

fn wiener(l: &Loaded, s: &SamplerConfig) -> Result<WienerSampler, RunError> {
    let d = l.domain();
    Ok(match s.kind {
        SamplerKind::Tree => WienerSampler::Tree(TreeWiener::standard(s.beta, s.q, d)?),
        SamplerKind::Mahler => {
            WienerSampler::Mahler(MahlerWiener::new(&ZetaLaw::Geometric { rate: s.rate }, s.terms, s.q, d)?)
        }
    })
}

/// Result of a successful run.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub out_dir: PathBuf,
    pub content_hash: String,
    pub pass: bool,
}

struct Artifacts {
    dir: PathBuf,
    files: BTreeMap<String, String>,
}

impl Artifacts {
    fn write(&mut self, name: &str, bytes: Vec<u8>) -> Result<(), RunError> {
        fs::write(self.dir.join(name), &bytes)?;
        self.files.insert(name.to_string(), hex::encode(Sha256::digest(&bytes)));
        Ok(())
    }

    fn json(&mut self, name: &str, v: &Value) -> Result<(), RunError> {
        let mut s = serde_json::to_string_pretty(v).map_err(|e| RunError::Runtime(e.to_string()))?;
        s.push('\n');
        self.write(name, s.into_bytes())
    }

    fn csv(&mut self, name: &str, header: &[&str], rows: Vec<Vec<String>>) -> Result<(), RunError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let err = |e: csv::Error| RunError::Runtime(e.to_string());
        w.write_record(header).map_err(err)?;
        for r in rows {
            w.write_record(&r).map_err(err)?;
        }
        let bytes = w.into_inner().map_err(|e| RunError::Runtime(e.to_string()))?;
        self.write(name, bytes)
    }
}

/// Run `cmd` with the configuration at `config_path`. `seed` overrides the
/// configured master seed.
pub fn run(cmd: Command, config_path: &Path, seed: Option<u64>, out: &Path) -> Result<Outcome, RunError> {
    let text = fs::read_to_string(config_path)
        .map_err(|e| RunError::Schema(format!("{}:1: cannot read config: {e}", config_path.display())))?;
    let mut loaded = load_config(&text, &config_path.display().to_string(), cmd)?;
    if let Some(s) = seed {
        loaded.config.seed = s;
    }
    fs::create_dir_all(out)?;
    let mut art = Artifacts { dir: out.to_path_buf(), files: BTreeMap::new() };
    let result = match cmd {
        Command::Sample => run_sample(&loaded, &mut art),
        Command::Solve => run_solve(&loaded, &mut art),
        Command::Evolve => run_evolve(&loaded, &mut art),
        Command::Verify => run_verify(&loaded, &mut art),
        Command::Charfun => run_charfun(&loaded, &mut art),
    };
    let (pass, failing, error) = match result {
        Ok((pass, failing)) => (pass, failing, None),
        Err(e) => (false, None, Some(e)),
    };
    let mut hasher = Sha256::new();
    for (name, h) in &art.files {
        hasher.update(name.as_bytes());
        hasher.update(b"\0");
        hasher.update(h.as_bytes());
        hasher.update(b"\n");
    }
    let content_hash = hex::encode(hasher.finalize());
    let manifest = json!({
        "subcommand": cmd.name(),
        "seed": loaded.config.seed,
        "config": serde_json::to_value(&loaded.config).map_err(|e| RunError::Runtime(e.to_string()))?,
        "tolerances": serde_json::to_value(&loaded.config.tolerances).map_err(|e| RunError::Runtime(e.to_string()))?,
        "outputs": art.files,
        "content_hash": content_hash,
        "status": if error.is_some() { "error" } else if pass { "pass" } else { "fail" },
        "error": error.as_ref().map(|e| e.to_string()),
    });
    let mut s = serde_json::to_string_pretty(&manifest).map_err(|e| RunError::Runtime(e.to_string()))?;
    s.push('\n');
    fs::write(out.join("manifest.json"), s)?;
    if let Some(e) = error {
        return Err(e);
    }
    if !pass {
        return Err(RunError::Assertion { report: out.join(failing.unwrap_or_else(|| "manifest.json".into())) });
    }
    Ok(Outcome { out_dir: out.to_path_buf(), content_hash, pass })
}

type Checked = (bool, Option<String>);

fn cx(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn run_sample(l: &Loaded, art: &mut Artifacts) -> Result<Checked, RunError> {
    let c = &l.config;
    let s = c.sample.as_ref().unwrap();
    let shift = parse_scalar(c.p, s.digits, &s.shift)?;
    let spec = GaussianSpec::one_dim(s.beta, s.q, shift.clone())?;
    let sampler = GaussianSampler::new(&spec, s.digits)?;
    let draws: Vec<PAdic> = ensemble(c.seed, s.draws, |_, r| sampler.sample(r));
    let n = s.draws as f64;
    let tol = c.tolerances.mc / n.sqrt();
    let mut pass = true;
    let mut checks = Vec::new();
    for &k in &s.h_exponents {
        let h = PAdic::p_power(c.p, s.digits, k);
        let emp: Complex64 = draws.iter().map(|x| character(&h, x).to_complex()).sum::<Complex64>() / n;
        let exact = (-s.beta * h.norm().powf(s.q)).exp() * character(&shift, &h).to_complex();
        let ok = (emp.re - exact.re).abs() <= tol && (emp.im - exact.im).abs() <= tol;
        pass &= ok;
        checks.push(json!({"h_exponent": k, "empirical": cx(emp), "exact": cx(exact), "pass": ok}));
    }
    // Shell histogram.
    let ms: Vec<i64> = draws
        .iter()
        .map(|x| {
            let d = x - &shift;
            -d.valuation().unwrap_or(i64::MAX / 2)
        })
        .collect();
    let lo = *ms.iter().min().unwrap();
    let hi = *ms.iter().max().unwrap();
    let table = shell_distribution(&spec, lo, hi, c.tolerances.tail)?;
    let mut shells = Vec::new();
    let mut rows = Vec::new();
    for &(m, w) in &table.entries {
        let count = ms.iter().filter(|&&x| x == m).count() as f64;
        let se = (w * (1.0 - w) / n).sqrt();
        let ok = (count / n - w).abs() <= c.tolerances.shell_sigmas * se || w * n < 5.0;
        pass &= ok;
        shells.push(json!({"m": m, "expected": w, "observed": count / n, "pass": ok}));
        rows.push(vec![m.to_string(), w.to_string(), (count / n).to_string()]);
    }
    art.csv("shell_histogram.csv", &["m", "prob", "observed"], rows)?;
    art.json(
        "sample_report.json",
        &json!({"draws": s.draws, "tolerance": tol, "charfun": checks, "shells": shells, "pass": pass}),
    )?;
    if s.paths > 0 {
        let ws = wiener(l, &c.sampler)?;
        let mut rows = Vec::new();
        for i in 0..s.paths {
            let path = ws.sample(derive_seed(c.seed, i));
            for (t, w) in path.rows() {
                rows.push(vec![i.to_string(), t, w]);
            }
        }
        art.csv("paths.csv", &["sample", "t", "w"], rows)?;
    }
    Ok((pass, Some("sample_report.json".into())))
}

fn problem_of(l: &Loaded, s: &SolveConfig, xi0: &str) -> Result<SdeProblem, RunError> {
    let mut pr = SdeProblem::new(l.domain(), l.scalar(xi0)?, builtin(l, &s.drift)?, builtin(l, &s.diffusion)?);
    if !s.series.is_empty() {
        let terms = s
            .series
            .iter()
            .map(|t| Ok(SeriesTerm { b: t.b, m: t.m, l: t.l, coef: std::sync::Arc::new(builtin(l, &t.coef)?) }))
            .collect::<Result<Vec<_>, RunError>>()?;
        pr = pr.with_series(terms);
    }
    Ok(pr)
}

fn run_solve(l: &Loaded, art: &mut Artifacts) -> Result<Checked, RunError> {
    let c = &l.config;
    let s = c.solve.as_ref().unwrap();
    let ws = wiener(l, &c.sampler)?;
    let pr = problem_of(l, s, &s.xi0)?;
    let sols = solve_ensemble(&pr, &ws, c.seed, s.samples)?;
    let mut rows = Vec::new();
    for (k, sol) in sols.iter().take(s.export as usize).enumerate() {
        for i in 0..pr.domain.len() {
            rows.push(vec![k.to_string(), pr.domain.point(i).to_string(), sol.xi.get(i)?.to_string()]);
        }
    }
    art.csv("solution.csv", &["sample", "t", "xi"], rows)?;
    let residual = sols.iter().map(|s| s.residual).fold(0.0, f64::max);
    let contraction = sols.iter().map(|s| s.contraction()).fold(0.0, f64::max);
    let per: Vec<Value> = sols
        .iter()
        .map(|s| json!({"iters": s.iterations(), "balls": s.balls.len(), "residual": s.residual, "contraction": s.contraction()}))
        .collect();
    let mut pass = residual == 0.0 && contraction < 1.0;
    art.json(
        "convergence.json",
        &json!({
            "iters": sols[0].iterations(),
            "defect_trace": sols[0].defect_trace(),
            "residual": residual,
            "contraction": contraction,
            "samples": per,
            "pass": pass,
        }),
    )?;
    let mut failing = "convergence.json";
    if let Some(d) = &s.diagnostics {
        let alt = solve_ensemble(&problem_of(l, s, &d.xi0_alt)?, &ws, c.seed, s.samples)?;
        let m = moment_diagnostic(&sols, d.s, d.c1, d.c2, d.sigmas);
        let st = stability_diagnostic(&sols, &alt, d.s, d.c1, d.c2, d.sigmas)?;
        let lv = |r: &crate::sde::DiagnosticReport| -> Value {
            r.levels
                .iter()
                .map(|x| json!({"radius": x.radius, "value": x.value, "bound": x.bound, "allowance": x.allowance, "pass": x.pass}))
                .collect()
        };
        let ok = m.pass() && st.pass();
        if pass && !ok {
            failing = "diagnostics.json";
        }
        pass &= ok;
        art.json(
            "diagnostics.json",
            &json!({
                "moment": {"s": d.s, "levels": lv(&m), "pass": m.pass()},
                "stability": {"s": d.s, "levels": lv(&st), "pass": st.pass(), "identically_zero": st.identically_zero},
            }),
        )?;
    }
    Ok((pass, Some(failing.into())))
}

fn random_triples(seed: u64, len: u64, count: u64) -> Vec<(u64, u64, u64)> {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| (r.gen_range(0..len), r.gen_range(0..len), r.gen_range(0..len))).collect()
}

fn run_evolve(l: &Loaded, art: &mut Artifacts) -> Result<Checked, RunError> {
    let c = &l.config;
    let e = c.evolve.as_ref().unwrap();
    let d = l.domain();
    let a = matrix(l, e.dim, &e.generator)?;
    let spec = GeneratorSpec::Constant(a.clone());
    let u = solve_evolution(&spec, &d)?;
    let v = solve_dual(&spec, &d)?;
    let x = exp_operator(&a, &d)?;
    let triples = random_triples(c.seed, d.len(), e.triples);
    let id = Matrix::identity(c.p, c.precision, e.dim);
    let mut identity = true;
    let (mut semigroup, mut dual, mut exp_dev): (f64, f64, f64) = (0.0, 0.0, 0.0);
    let mut exp_ok = true;
    for &(t, s, w) in &triples {
        identity &= u.at(t, t)?.agrees_with(&id);
        semigroup = semigroup.max(u.at(t, s)?.mul(&u.at(s, w)?).sub(&u.at(t, w)?).norm());
        dual = dual.max(u.at(t, s)?.sub(&v.at(t, s)?).norm());
        exp_ok &= u.at(t, s)?.agrees_mod(&x.at(t, s)?, c.precision as i64 - 1);
        exp_dev = exp_dev.max(u.at(t, s)?.sub(&x.at(t, s)?).norm());
    }
    let residual = triples.iter().take(5).map(|&(_, s, _)| left_residual(&u, &spec, s)).collect::<Result<Vec<_>, _>>()?;
    let residual = residual.into_iter().fold(0.0, f64::max);
    let mut gens = Vec::new();
    let mut gen_ok = true;
    for &t in &e.generator_points {
        match generating_operator(&u, t) {
            Ok(g) => {
                let ok = g.matrix.agrees_mod(&a, g.accuracy_exp);
                gen_ok &= ok;
                gens.push(json!({"t": d.point(t).to_string(), "level": g.level, "accuracy_exp": g.accuracy_exp, "pass": ok,
                    "estimate": g.matrix.entries().iter().map(|x| x.to_string()).collect::<Vec<_>>()}));
            }
            Err(e @ Error::NoLimit(_)) => {
                gen_ok = false;
                gens.push(json!({"t": d.point(t).to_string(), "pass": false, "error": e.to_string()}));
            }
            Err(e) => return Err(e.into()),
        }
    }
    let mut pass = identity && semigroup == 0.0 && dual == 0.0 && exp_ok && residual == 0.0 && gen_ok;
    let pert = match &e.perturbation {
        Some(b) => {
            let b = GeneratorSpec::Constant(matrix(l, e.dim, b)?);
            let pairs: Vec<(u64, u64)> = triples.iter().take(20).map(|&(t, s, _)| (t, s)).collect();
            let r = perturbation_check(&spec, &b, &d, &pairs)?;
            pass &= r.identity_residual == 0.0 && r.bound_holds;
            json!({"identity_residual": r.identity_residual, "difference": r.difference, "bound": r.bound,
                "bound_holds": r.bound_holds, "hypothesis_met": r.hypothesis_met,
                "uniform": r.uniform.map(|(a, b)| json!([a, b]))})
        }
        None => Value::Null,
    };
    let mut rows = Vec::new();
    for t in 0..d.len() {
        let m = u.at(t, 0)?;
        let mut row = vec![d.point(t).to_string(), d.point(0).to_string()];
        row.extend(m.entries().iter().map(|x| x.to_string()));
        rows.push(row);
    }
    let names: Vec<String> = (0..e.dim * e.dim).map(|k| format!("u{}{}", k / e.dim, k % e.dim)).collect();
    let mut header = vec!["t", "s"];
    header.extend(names.iter().map(String::as_str));
    art.csv("operator.csv", &header, rows)?;
    art.json(
        "evolve_report.json",
        &json!({
            "iterations": u.iterations,
            "identity": identity,
            "semigroup_residual": semigroup,
            "dual_residual": dual,
            "exp_agrees": exp_ok,
            "exp_deviation": exp_dev,
            "left_residual": residual,
            "generator": gens,
            "perturbation": pert,
            "triples": triples.len(),
            "pass": pass,
        }),
    )?;
    Ok((pass, Some("evolve_report.json".into())))
}

/// Random integer polynomial of degree at most 3 evaluated on the chain.
fn random_poly_chain(d: &BallSpec, t: u64, r: &mut ChaCha8Rng) -> GridFunction<PAdic> {
    let (p, n) = (d.prime(), d.precision());
    let m = (p as i128).pow(n);
    let cs: Vec<PAdic> = (0..4).map(|_| PAdic::from_int(p, n, r.gen_range(0..m))).collect();
    GridFunction::from_fn_on(d.clone(), chain_indices(d, t), |_, x| {
        cs.iter().rev().fold(PAdic::zero(p, n), |acc, c| &(&acc * x) + c)
    })
}

fn run_verify(l: &Loaded, art: &mut Artifacts) -> Result<Checked, RunError> {
    let c = &l.config;
    let v = c.verify.as_ref().unwrap();
    let d = l.domain();
    let ws = wiener(l, &c.sampler)?;
    let norm0 = |x: PAdic| if x.is_zero() { 0.0 } else { x.norm() };

    let results: Vec<(f64, f64)> = (0..v.trials)
        .map(|i| -> Result<(f64, f64), Error> {
            let mut r = ChaCha8Rng::seed_from_u64(derive_seed(c.seed ^ 0x5eed, i));
            let t = r.gen_range(0..d.len());
            let x = random_poly_chain(&d, t, &mut r);
            let wp = ws.sample_on(derive_seed(c.seed, i), &[t]);
            let w = &wp.values;
            let by_parts = norm0(by_parts_residual(&x, w, t)?);
            // sum dw^2 = w_t^2 - 2 sum w dw
            let quad = covariation(w, w, t)?;
            let wdw = antider_w(w, &wp, t)?;
            let wt = w.get(t)?;
            let sq = norm0(quad - (wt * wt - PAdic::from_int(d.prime(), d.precision(), 2) * wdw));
            Ok((by_parts, sq))
        })
        .collect::<Result<_, _>>()?;
    let max_bp = results.iter().map(|r| r.0).fold(0.0, f64::max);
    let max_sq = results.iter().map(|r| r.1).fold(0.0, f64::max);

    // P_(t, w) 1 at t = 1 equals w_1.
    let t1 = d.index_of(&PAdic::one(d.prime(), d.precision()));
    let mut tw_res = 0.0f64;
    let mut tw_trials = 0u64;
    if let Some(t1) = t1 {
        for i in 0..v.trials.min(100) {
            let w = ws.sample_on(derive_seed(c.seed, i), &[t1]).values;
            let tt = GridFunction::from_fn_on(d.clone(), chain_indices(&d, t1), |_, x| x.clone());
            let cv = covariation(&tt, &w, t1)?;
            tw_res = tw_res.max(norm0(cv - w.get(t1)?.clone()));
            tw_trials += 1;
        }
    }
    let identities = json!([
        {"identity": "by_parts", "trials": v.trials, "max_residual": max_bp},
        {"identity": "square_decomposition", "trials": v.trials, "max_residual": max_sq},
        {"identity": "time_path_covariation", "trials": tw_trials, "max_residual": tw_res},
    ]);
    let mut pass = max_bp == 0.0 && max_sq == 0.0 && tw_res == 0.0;
    art.json("by_parts.json", &identities)?;
    let mut failing = if pass { None } else { Some("by_parts.json".to_string()) };

    if !v.char_points.is_empty() {
        let psi = GridFunction::constant(d.clone(), PAdic::one(d.prime(), d.precision()));
        let gamma = l.scalar(&v.gamma)?;
        let g = l.scalar(&v.g)?;
        let mut reports = Vec::new();
        let mut ok = true;
        for &t in &v.char_points {
            let mut r = verify_char_expectation(&psi, &ws, &gamma, &g, t, v.char_samples, c.seed)?;
            r.tolerance = c.tolerances.mc / (v.char_samples as f64).sqrt();
            r.pass = (r.empirical.re - r.analytic.re).abs() <= r.tolerance
                && (r.empirical.im - r.analytic.im).abs() <= r.tolerance;
            if r.asserted {
                ok &= r.pass;
            }
            reports.push(json!({"t": r.t, "gamma": r.gamma, "g": r.g, "samples": r.samples,
                "empirical": cx(r.empirical), "std_err": [r.std_err.0, r.std_err.1],
                "analytic": cx(r.analytic), "tolerance": r.tolerance, "pass": r.pass,
                "diagnostic_only": !r.asserted}));
        }
        art.json("char_expectation.json", &Value::Array(reports))?;
        if !ok && failing.is_none() {
            failing = Some("char_expectation.json".into());
        }
        pass &= ok;
    }
    Ok((pass, failing))
}

fn run_charfun(l: &Loaded, art: &mut Artifacts) -> Result<Checked, RunError> {
    let c = &l.config;
    let cf = c.charfun.as_ref().unwrap();
    let spec = GaussianSpec::one_dim(cf.beta, cf.q, PAdic::zero(c.p, c.precision))?;
    let t = shell_distribution(&spec, cf.m_lo, cf.m_hi, c.tolerances.tail)?;
    let rows = t.entries.iter().map(|(m, w)| vec![m.to_string(), w.to_string()]).collect();
    art.csv("shells.csv", &["m", "prob"], rows)?;
    let min_weight = t.entries.iter().map(|e| e.1).fold(f64::INFINITY, f64::min);
    let total = t.total_mass();
    let pass = min_weight >= 0.0 && (total - 1.0).abs() <= 1e-9;
    art.json(
        "charfun.json",
        &json!({"total_mass": total, "lower_tail": t.lower_tail, "upper_tail": t.upper_tail,
            "min_weight": min_weight, "pass": pass}),
    )?;
    Ok((pass, Some("charfun.json".into())))
}
