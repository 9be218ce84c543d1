//! Command-line front end: `spectrum`, `solve`, `verify` and
//! `scan-constraints`.
//!
//! Every subcommand takes the same flags; a JSON config file (`--config`)
//! uses the same field names and is overridden by explicit flags. Reports
//! are a JSON object `{command, config, results, summary}` or CSV with a
//! fixed header. Complex numbers serialize as `[re, im]`.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error, 3 resource
//! guard.

use std::fmt::Write as _;
use std::io::{IsTerminal, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::ansatz::build_state;
use crate::basis::SectorBasis;
use crate::bethe::{BetheProblem, BetheSolution, Seed, SolveStatus, SolverSettings, SweepReport};
use crate::hamiltonian::{assemble, Boundary, ModelSpec, XxxBoundary};
use crate::oracle::{dense_eigenvalues, eigenpair_residual, match_spectra, relative_residual};
use crate::xxz::{constraint_defects, XxzParams};
use crate::{c64, Error, C64};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

/// Energy tolerance used when matching predictions to the exact spectrum.
const MATCH_TOL: f64 = 1e-8;

#[derive(Parser, Debug)]
#[command(name = "bethe-lab", version, about = "Coordinate Bethe ansatz for open and periodic spin chains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact spectrum of the assembled Hamiltonian (optionally one sector).
    Spectrum(RunArgs),
    /// Solve the Bethe equations from seeds or a quantum-number sweep.
    Solve(RunArgs),
    /// Solve, build every Bethe state and check it against the Hamiltonian.
    Verify(RunArgs),
    /// Evaluate the XXZ boundary constraints for every triplet (n, ε, ε′).
    ScanConstraints(RunArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Spectrum(_) => "spectrum",
            Command::Solve(_) => "solve",
            Command::Verify(_) => "verify",
            Command::ScanConstraints(_) => "scan-constraints",
        }
    }

    fn args(&self) -> &RunArgs {
        match self {
            Command::Spectrum(a) | Command::Solve(a) | Command::Verify(a) | Command::ScanConstraints(a) => a,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyArg {
    XxxPeriodic,
    /// Open XXX chain; triangular when `mu ≠ 0`.
    XxxOpen,
    /// Open XXX chain with `mu = 0` enforced.
    XxxDiagonal,
    /// Open XXX chain with upper-triangular left boundary (`mu` defaults to 1).
    XxxTriangular,
    XxzOpen,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug, Default)]
struct RunArgs {
    #[arg(long)]
    family: Option<FamilyArg>,
    /// Chain length.
    #[arg(long = "L")]
    length: Option<usize>,
    /// Number of magnons (sector `m`, or `n` for the triangular ansatz).
    #[arg(long = "m", visible_alias = "n")]
    m: Option<usize>,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
    alpha: Option<C64>,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
    beta: Option<C64>,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
    gamma: Option<C64>,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
    delta: Option<C64>,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
    mu: Option<C64>,
    /// XXZ deformation parameter.
    #[arg(long = "Q", allow_hyphen_values = true, value_parser = parse_complex)]
    q: Option<C64>,
    /// XXZ boundary parameter `s`.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
    s: Option<C64>,
    /// Newton tolerance on the Bethe residual.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long = "max-iter")]
    max_iter: Option<usize>,
    /// Seeds separated by `;`. Integer tuples (`1,3`) are quantum numbers;
    /// `k=` introduces explicit momenta (`k=0.5,1.2+0.1i`).
    #[arg(long, allow_hyphen_values = true)]
    seeds: Option<String>,
    /// Add the full quantum-number and bound-state sweep to the seeds.
    #[arg(long)]
    sweep: bool,
    #[arg(long)]
    format: Option<Format>,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON file with default values for any of the flags above.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Largest eigenpair residual `verify` accepts.
    #[arg(long)]
    threshold: Option<f64>,
}

/// A complex value in a config file: a number, `[re, im]` or a string such
/// as `"2+1i"`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum ComplexInput {
    Real(f64),
    Pair([f64; 2]),
    Text(String),
}

impl ComplexInput {
    fn value(&self) -> Result<C64, String> {
        match self {
            ComplexInput::Real(x) => Ok(c64(*x, 0.0)),
            ComplexInput::Pair([a, b]) => Ok(c64(*a, *b)),
            ComplexInput::Text(s) => parse_complex(s),
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    family: Option<FamilyArg>,
    #[serde(rename = "L")]
    length: Option<usize>,
    #[serde(alias = "n")]
    m: Option<usize>,
    alpha: Option<ComplexInput>,
    beta: Option<ComplexInput>,
    gamma: Option<ComplexInput>,
    delta: Option<ComplexInput>,
    mu: Option<ComplexInput>,
    #[serde(rename = "Q")]
    q: Option<ComplexInput>,
    s: Option<ComplexInput>,
    tol: Option<f64>,
    max_iter: Option<usize>,
    seeds: Option<Vec<String>>,
    sweep: Option<bool>,
    format: Option<Format>,
    out: Option<String>,
    threshold: Option<f64>,
}

/// Fully resolved run configuration; echoed in every JSON report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub family: FamilyArg,
    #[serde(rename = "L")]
    pub length: usize,
    pub m: Option<usize>,
    pub alpha: C64,
    pub beta: C64,
    pub gamma: C64,
    pub delta: C64,
    pub mu: C64,
    #[serde(rename = "Q")]
    pub q: C64,
    pub s: C64,
    pub tol: f64,
    pub max_iter: usize,
    pub seeds: Vec<String>,
    pub sweep: bool,
    pub format: Format,
    pub out: Option<String>,
    pub threshold: f64,
}

impl RunConfig {
    fn xxx_boundary(&self) -> XxxBoundary {
        XxxBoundary::diagonal(self.alpha, self.beta, self.gamma, self.delta).with_mu(self.mu)
    }

    fn xxz_params(&self) -> XxzParams {
        XxzParams {
            q: self.q,
            alpha: self.alpha,
            beta: self.beta,
            gamma: self.gamma,
            delta: self.delta,
            s: self.s,
            length: self.length,
        }
    }

    pub fn model(&self) -> ModelSpec {
        match self.family {
            FamilyArg::XxxPeriodic => ModelSpec::periodic(self.length),
            FamilyArg::XxzOpen => self.xxz_params().spec(),
            _ => ModelSpec::xxx_open(self.length, self.xxx_boundary()),
        }
    }

    fn settings(&self) -> SolverSettings {
        SolverSettings { tol: self.tol, max_iter: self.max_iter, ..SolverSettings::default() }
    }
}

/// Parse `3`, `-0.5`, `2+1i`, `1e-3-2.5i`, `i`, `-i`.
pub fn parse_complex(text: &str) -> Result<C64, String> {
    let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || format!("cannot parse '{text}' as a complex number");
    if t.is_empty() {
        return Err(bad());
    }
    let Some(body) = t.strip_suffix(['i', 'j']) else {
        return t.parse::<f64>().map(|x| c64(x, 0.0)).map_err(|_| bad());
    };
    // split at the last sign that is not a leading sign or an exponent sign
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(i) => (&body[..i], &body[i..]),
        None => ("", body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        s => s.parse::<f64>().map_err(|_| bad())?,
    };
    let re = if re.is_empty() { 0.0 } else { re.parse::<f64>().map_err(|_| bad())? };
    Ok(c64(re, im))
}

/// Parse the `--seeds` syntax into solver seeds.
pub fn parse_seeds(items: &[String]) -> Result<Vec<Seed>, String> {
    let mut out = Vec::new();
    for item in items.iter().flat_map(|s| s.split(';')) {
        let item = item.trim();
        if item.is_empty() {
            continue;
        }
        if let Some(ks) = item.strip_prefix("k=") {
            let k = ks.split(',').map(parse_complex).collect::<Result<Vec<_>, _>>()?;
            out.push(Seed::Momenta(k));
        } else {
            let q = item
                .split(',')
                .map(|x| x.trim().parse::<i64>().map_err(|_| format!("seed '{item}': '{x}' is not an integer")))
                .collect::<Result<Vec<_>, _>>()?;
            out.push(Seed::QuantumNumbers(q));
        }
    }
    Ok(out)
}

enum Failure {
    Usage(String),
    Resource(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::TooLarge(_) => Failure::Resource(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

fn read_config(path: &Path) -> Result<ConfigFile, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("invalid config {}: {e}", path.display())))
}

fn resolve(args: &RunArgs) -> Result<RunConfig, Failure> {
    let file = match &args.config {
        Some(p) => read_config(p)?,
        None => ConfigFile::default(),
    };
    let cx = |flag: Option<C64>, cfg: &Option<ComplexInput>, default: C64| -> Result<C64, Failure> {
        match (flag, cfg) {
            (Some(v), _) => Ok(v),
            (None, Some(c)) => c.value().map_err(Failure::Usage),
            (None, None) => Ok(default),
        }
    };
    let zero = c64(0.0, 0.0);
    let family = args.family.or(file.family).ok_or_else(|| Failure::Usage("--family is required".into()))?;
    let length = args.length.or(file.length).ok_or_else(|| Failure::Usage("--L is required".into()))?;
    let mu_default = if family == FamilyArg::XxxTriangular { c64(1.0, 0.0) } else { zero };
    let mut seeds = file.seeds.clone().unwrap_or_default();
    if let Some(s) = &args.seeds {
        seeds = vec![s.clone()];
    }
    let cfg = RunConfig {
        family,
        length,
        m: args.m.or(file.m),
        alpha: cx(args.alpha, &file.alpha, zero)?,
        beta: cx(args.beta, &file.beta, zero)?,
        gamma: cx(args.gamma, &file.gamma, zero)?,
        delta: cx(args.delta, &file.delta, zero)?,
        mu: cx(args.mu, &file.mu, mu_default)?,
        q: cx(args.q, &file.q, c64(1.0, 0.0))?,
        s: cx(args.s, &file.s, zero)?,
        tol: args.tol.or(file.tol).unwrap_or(SolverSettings::default().tol),
        max_iter: args.max_iter.or(file.max_iter).unwrap_or(SolverSettings::default().max_iter),
        seeds,
        sweep: args.sweep || file.sweep.unwrap_or(false),
        format: args.format.or(file.format).unwrap_or(Format::Json),
        out: args.out.as_ref().map(|p| p.display().to_string()).or(file.out),
        threshold: args.threshold.or(file.threshold).unwrap_or(1e-8),
    };
    validate(&cfg)?;
    Ok(cfg)
}

fn validate(c: &RunConfig) -> Result<(), Failure> {
    let usage = |m: String| Err(Failure::Usage(m));
    if c.length < 2 {
        return usage(format!("--L must be at least 2 (got {})", c.length));
    }
    if let Some(m) = c.m {
        if m > c.length {
            return usage(format!("--m {m} exceeds --L {}", c.length));
        }
    }
    if !(c.tol > 0.0) {
        return usage(format!("--tol must be positive (got {})", c.tol));
    }
    if c.max_iter == 0 {
        return usage("--max-iter must be positive".into());
    }
    if !(c.threshold >= 0.0) {
        return usage(format!("--threshold must be non-negative (got {})", c.threshold));
    }
    let params = [c.alpha, c.beta, c.gamma, c.delta, c.mu, c.q, c.s];
    if params.iter().any(|p| !p.re.is_finite() || !p.im.is_finite()) {
        return usage("boundary parameters must be finite".into());
    }
    if c.family == FamilyArg::XxxDiagonal && c.mu != c64(0.0, 0.0) {
        return usage("--family xxx-diagonal requires --mu 0".into());
    }
    if c.family == FamilyArg::XxzOpen && c.q == c64(0.0, 0.0) {
        return usage("--Q must be non-zero".into());
    }
    parse_seeds(&c.seeds).map_err(Failure::Usage)?;
    Ok(())
}

#[derive(Serialize)]
struct Report<'a, R: Serialize, S: Serialize> {
    command: &'a str,
    config: &'a RunConfig,
    results: Vec<R>,
    summary: S,
}

#[derive(Serialize)]
struct SpectrumRow {
    index: usize,
    eigenvalue: C64,
    converged: bool,
}

#[derive(Serialize)]
struct SpectrumSummary {
    dimension: usize,
    sector: Option<usize>,
    all_converged: bool,
    qr_iterations: usize,
}

#[derive(Serialize)]
struct SolutionRow {
    status: &'static str,
    quantum_numbers: Option<Vec<i64>>,
    seed_momenta: Option<Vec<C64>>,
    momenta: Vec<C64>,
    energy: C64,
    residual_norm: Option<f64>,
    iterations: usize,
    slow_convergence: bool,
}

impl SolutionRow {
    fn from(s: &BetheSolution) -> Self {
        Self {
            status: s.status.name(),
            quantum_numbers: s.quantum_numbers.clone(),
            seed_momenta: match &s.seed {
                Seed::Momenta(k) => Some(k.clone()),
                Seed::QuantumNumbers(_) => None,
            },
            momenta: s.momenta.clone(),
            energy: s.energy,
            residual_norm: finite(s.residual_norm),
            iterations: s.iterations,
            slow_convergence: s.slow_convergence,
        }
    }
}

#[derive(Serialize)]
struct SolveSummary {
    seeds: usize,
    solutions: usize,
    not_converged: usize,
    singular: usize,
    irregular: usize,
}

#[derive(Serialize)]
struct VerifyRow {
    quantum_numbers: Option<Vec<i64>>,
    momenta: Vec<C64>,
    energy: C64,
    /// `‖HΨ − EΨ‖ / ‖Ψ‖`
    residual: Option<f64>,
    /// `‖HΨ − EΨ‖ / (‖H‖_∞ ‖Ψ‖)`
    scaled_residual: Option<f64>,
    matched: bool,
    exact: Option<C64>,
    distance: Option<f64>,
    error: Option<String>,
}

#[derive(Serialize)]
struct VerifySummary {
    solutions: usize,
    max_residual: Option<f64>,
    threshold: f64,
    all_within_threshold: bool,
    all_matched: bool,
    coverage: f64,
    exact_dimension: usize,
}

#[derive(Serialize)]
struct ConstraintRow {
    n: usize,
    eps: String,
    eps_prime: String,
    defect: Option<C64>,
    abs_defect: Option<f64>,
    satisfied: bool,
    error: Option<String>,
}

#[derive(Serialize)]
struct ConstraintSummary {
    rows: usize,
    satisfied: Vec<[String; 3]>,
    errors: usize,
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

fn fmt_c(z: C64) -> String {
    format!("{}{:+}i", z.re, z.im)
}

fn fmt_list(v: &[C64]) -> String {
    v.iter().map(|&z| fmt_c(z)).collect::<Vec<_>>().join(";")
}

fn fmt_opt<T: std::fmt::Display>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn fmt_qn(q: &Option<Vec<i64>>) -> String {
    q.as_ref().map(|q| q.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";")).unwrap_or_default()
}

fn to_json<R: Serialize, S: Serialize>(command: &str, cfg: &RunConfig, results: Vec<R>, summary: S) -> Result<String, Failure> {
    let report = Report { command, config: cfg, results, summary };
    let mut s = serde_json::to_string_pretty(&report).map_err(|e| Failure::Usage(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn cmd_spectrum(cfg: &RunConfig) -> Result<(String, i32), Failure> {
    let spec = cfg.model();
    let h = assemble(&spec)?;
    let matrix = match cfg.m {
        Some(m) => {
            if !spec.conserves_magnetization() {
                return Err(Failure::Usage("--m needs a magnetization-conserving family".into()));
            }
            h.sector_block(&SectorBasis::new(cfg.length, m)?)?
        }
        None => h.to_dense(),
    };
    let report = dense_eigenvalues(&matrix)?;
    let mut rows: Vec<(C64, bool)> = report.eigenvalues.iter().copied().zip(report.converged.iter().copied()).collect();
    rows.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));
    let out = match cfg.format {
        Format::Json => {
            let results = rows
                .iter()
                .enumerate()
                .map(|(index, &(eigenvalue, converged))| SpectrumRow { index, eigenvalue, converged })
                .collect();
            let summary = SpectrumSummary {
                dimension: matrix.rows(),
                sector: cfg.m,
                all_converged: report.all_converged(),
                qr_iterations: report.iterations,
            };
            to_json("spectrum", cfg, results, summary)?
        }
        Format::Csv => {
            let mut s = String::from("index,re,im,converged\n");
            for (i, (z, c)) in rows.iter().enumerate() {
                let _ = writeln!(s, "{i},{},{},{c}", z.re, z.im);
            }
            s
        }
    };
    Ok((out, EXIT_OK))
}

fn run_sweep(cfg: &RunConfig) -> Result<SweepReport, Failure> {
    if cfg.family == FamilyArg::XxzOpen {
        return Err(Failure::Usage("no Bethe equations for the XXZ family".into()));
    }
    let problem = BetheProblem::new(cfg.model(), cfg.m.unwrap_or(1))?;
    let mut seeds = parse_seeds(&cfg.seeds).map_err(Failure::Usage)?;
    if cfg.sweep {
        seeds.extend(problem.sweep_seeds());
    }
    Ok(problem.sweep(&seeds, &cfg.settings())?)
}

fn cmd_solve(cfg: &RunConfig) -> Result<(String, i32), Failure> {
    let sweep = run_sweep(cfg)?;
    let out = match cfg.format {
        Format::Json => {
            let summary = SolveSummary {
                seeds: sweep.seeds,
                solutions: sweep.solutions.len(),
                not_converged: sweep.count(SolveStatus::NotConverged),
                singular: sweep.count(SolveStatus::Singular),
                irregular: sweep.count(SolveStatus::Irregular),
            };
            let results = sweep.solutions.iter().chain(&sweep.rejected).map(SolutionRow::from).collect();
            to_json("solve", cfg, results, summary)?
        }
        Format::Csv => {
            let mut s = String::from("status,quantum_numbers,momenta,energy_re,energy_im,residual_norm,iterations\n");
            for sol in sweep.solutions.iter().chain(&sweep.rejected) {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{},{}",
                    sol.status.name(),
                    fmt_qn(&sol.quantum_numbers),
                    fmt_list(&sol.momenta),
                    sol.energy.re,
                    sol.energy.im,
                    fmt_opt(finite(sol.residual_norm)),
                    sol.iterations
                );
            }
            s
        }
    };
    Ok((out, EXIT_OK))
}

fn cmd_verify(cfg: &RunConfig) -> Result<(String, i32), Failure> {
    let sweep = run_sweep(cfg)?;
    let spec = cfg.model();
    let h = assemble(&spec)?;
    let exact = match spec.boundary {
        Boundary::XxxOpen(b) if !b.is_diagonal() => dense_eigenvalues(&h.to_dense())?.eigenvalues,
        _ => dense_eigenvalues(&h.sector_block(&SectorBasis::new(cfg.length, cfg.m.unwrap_or(1))?)?)?.eigenvalues,
    };
    let predicted: Vec<C64> = sweep.solutions.iter().map(|s| s.energy).collect();
    let matching = match_spectra(&predicted, &exact, MATCH_TOL);
    let mut rows = Vec::with_capacity(sweep.solutions.len());
    for (sol, pair) in sweep.solutions.iter().zip(&matching.pairs) {
        let (residual, scaled, error) = match build_state(&spec, &sol.momenta()) {
            Ok(st) => match (relative_residual(&h, &st.vector, st.energy), eigenpair_residual(&h, &st.vector, st.energy)) {
                (Ok(r), Ok(s)) => (finite(r), finite(s), None),
                (Err(e), _) | (_, Err(e)) => (None, None, Some(e.to_string())),
            },
            Err(e) => (None, None, Some(e.to_string())),
        };
        rows.push(VerifyRow {
            quantum_numbers: sol.quantum_numbers.clone(),
            momenta: sol.momenta.clone(),
            energy: sol.energy,
            residual,
            scaled_residual: scaled,
            matched: pair.matched,
            exact: pair.exact,
            distance: finite(pair.distance),
            error,
        });
    }
    let ok = rows.iter().all(|r| r.residual.is_some_and(|x| x <= cfg.threshold));
    let max_residual = rows.iter().map(|r| r.residual.unwrap_or(f64::INFINITY)).fold(None, |m: Option<f64>, x| {
        Some(m.map_or(x, |m| m.max(x)))
    });
    let code = if ok { EXIT_OK } else { EXIT_VERIFY_FAILED };
    let out = match cfg.format {
        Format::Json => {
            let summary = VerifySummary {
                solutions: rows.len(),
                max_residual: max_residual.and_then(finite),
                threshold: cfg.threshold,
                all_within_threshold: ok,
                all_matched: matching.all_matched(),
                coverage: matching.coverage,
                exact_dimension: exact.len(),
            };
            to_json("verify", cfg, rows, summary)?
        }
        Format::Csv => {
            let mut s = String::from("quantum_numbers,momenta,energy_re,energy_im,residual,matched,exact_re,exact_im,distance\n");
            for r in &rows {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{},{},{},{}",
                    fmt_qn(&r.quantum_numbers),
                    fmt_list(&r.momenta),
                    r.energy.re,
                    r.energy.im,
                    fmt_opt(r.residual),
                    r.matched,
                    fmt_opt(r.exact.map(|z| z.re)),
                    fmt_opt(r.exact.map(|z| z.im)),
                    fmt_opt(r.distance)
                );
            }
            s
        }
    };
    Ok((out, code))
}

fn cmd_scan(cfg: &RunConfig) -> Result<(String, i32), Failure> {
    let params = cfg.xxz_params();
    let rows: Vec<ConstraintRow> = constraint_defects(&params)?
        .into_iter()
        .map(|t| ConstraintRow {
            n: t.n,
            eps: t.eps.to_string(),
            eps_prime: t.eps_prime.to_string(),
            defect: t.defect.clone().ok(),
            abs_defect: t.defect.as_ref().ok().map(|d| d.norm()),
            satisfied: t.satisfied(),
            error: t.defect.err(),
        })
        .collect();
    let out = match cfg.format {
        Format::Json => {
            let summary = ConstraintSummary {
                rows: rows.len(),
                satisfied: rows.iter().filter(|r| r.satisfied).map(|r| [r.n.to_string(), r.eps.clone(), r.eps_prime.clone()]).collect(),
                errors: rows.iter().filter(|r| r.error.is_some()).count(),
            };
            to_json("scan-constraints", cfg, rows, summary)?
        }
        Format::Csv => {
            let mut s = String::from("n,eps,eps_prime,abs_defect,satisfied,error\n");
            for r in &rows {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{}",
                    r.n,
                    r.eps,
                    r.eps_prime,
                    fmt_opt(r.abs_defect),
                    r.satisfied,
                    r.error.as_deref().unwrap_or("").replace(',', ";")
                );
            }
            s
        }
    };
    Ok((out, EXIT_OK))
}

fn run(command: &Command) -> Result<(String, i32, Option<String>), Failure> {
    let cfg = resolve(command.args())?;
    let (text, code) = match command {
        Command::Spectrum(_) => cmd_spectrum(&cfg)?,
        Command::Solve(_) => cmd_solve(&cfg)?,
        Command::Verify(_) => cmd_verify(&cfg)?,
        Command::ScanConstraints(_) => cmd_scan(&cfg)?,
    };
    Ok((text, code, cfg.out.clone()))
}

fn use_color() -> bool {
    std::env::var_os("NO_COLOR").is_none() && std::io::stderr().is_terminal()
}

fn diagnostic(err: &mut dyn Write, label: &str, msg: &str) {
    let _ = if use_color() {
        writeln!(err, "\x1b[1;31m{label}:\x1b[0m {msg}")
    } else {
        writeln!(err, "{label}: {msg}")
    };
}

/// Run the CLI with `args` (program name first). Reports go to `out` (or the
/// `--out` file), diagnostics to `err`. Returns the process exit code.
pub fn execute<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = if use_color() { e.render().ansi().to_string() } else { e.render().to_string() };
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                EXIT_USAGE
            } else {
                let _ = write!(out, "{text}");
                EXIT_OK
            };
        }
    };
    match run(&cli.command) {
        Ok((text, code, path)) => {
            let written = match path {
                Some(p) => std::fs::write(&p, text.as_bytes()).map_err(|e| format!("cannot write {p}: {e}")),
                None => out.write_all(text.as_bytes()).map_err(|e| e.to_string()),
            };
            if let Err(msg) = written {
                diagnostic(err, "error", &msg);
                return EXIT_USAGE;
            }
            if code == EXIT_VERIFY_FAILED {
                diagnostic(err, "verification failed", &format!("{} residual above threshold", cli.command.name()));
            }
            code
        }
        Err(Failure::Usage(msg)) => {
            diagnostic(err, "error", &msg);
            EXIT_USAGE
        }
        Err(Failure::Resource(msg)) => {
            diagnostic(err, "resource limit", &msg);
            EXIT_RESOURCE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_parsing() {
        assert_eq!(parse_complex("3").unwrap(), c64(3.0, 0.0));
        assert_eq!(parse_complex("-0.5").unwrap(), c64(-0.5, 0.0));
        assert_eq!(parse_complex("2+1i").unwrap(), c64(2.0, 1.0));
        assert_eq!(parse_complex("2+i").unwrap(), c64(2.0, 1.0));
        assert_eq!(parse_complex("1e-3-2.5i").unwrap(), c64(1e-3, -2.5));
        assert_eq!(parse_complex("-1e+2+3e-1i").unwrap(), c64(-100.0, 0.3));
        assert_eq!(parse_complex("i").unwrap(), c64(0.0, 1.0));
        assert_eq!(parse_complex("-i").unwrap(), c64(0.0, -1.0));
        assert_eq!(parse_complex("-2.5i").unwrap(), c64(0.0, -2.5));
        assert!(parse_complex("abc").is_err());
        assert!(parse_complex("").is_err());
    }

    #[test]
    fn seed_parsing() {
        let s = parse_seeds(&["1,3; k=0.5,1+0.1i".into()]).unwrap();
        assert_eq!(s[0], Seed::QuantumNumbers(vec![1, 3]));
        assert_eq!(s[1], Seed::Momenta(vec![c64(0.5, 0.0), c64(1.0, 0.1)]));
        assert!(parse_seeds(&["1,x".into()]).is_err());
        assert!(parse_seeds(&["".into()]).unwrap().is_empty());
    }
}
