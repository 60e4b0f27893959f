//! Command-line front end. [`run`] parses arguments, executes one
//! subcommand and returns the process exit code.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::confstruct::{self, ConformalSpectrum, SpectrumError};
use crate::lyapsim::{self, CocycleModel, MatrixSequence, Regularity, SamplerSpec, SimError};
use crate::resonance::{self, ResonanceError};
use crate::rootsys::{self, Family, RootSystemError, RootSystemType, SCHEMA_VERSION};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Environment variable capping the worker threads.
pub const THREADS_ENV: &str = "RESONANCE_LAB_THREADS";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    RootSystem(#[from] RootSystemError),
    #[error(transparent)]
    Resonance(#[from] ResonanceError),
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            _ => EXIT_DOMAIN,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "resonance-lab", version, about = "Root-system resonance and conformal cocycle toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the roots and simple roots of a root system.
    Roots(TypeArgs),
    /// Parabolic codimension for every j0 and the minimum r(g).
    Codim {
        #[command(flatten)]
        ty: TypeArgs,
        /// Also list the complement for this (1-based) simple root.
        #[arg(long)]
        j0: Option<usize>,
    },
    /// Centers, pairings and uniform directions in the limit case.
    LimitCase(TypeArgs),
    /// Lower bounds on the optimal index.
    Bounds {
        #[arg(long = "type", value_name = "TYPE", conflicts_with = "all")]
        ty: Option<String>,
        #[arg(long, requires = "ty")]
        rank: Option<usize>,
        /// Exceptional types plus classical families up to --max-rank.
        #[arg(long)]
        all: bool,
        #[arg(long, default_value_t = 8)]
        max_rank: usize,
        #[arg(long)]
        json: bool,
    },
    /// Check a declared spectrum against the pairing rules.
    ValidateSpectrum {
        /// Spectrum document.
        #[arg(long, conflicts_with_all = ["ty", "j0"])]
        input: Option<PathBuf>,
        /// Import the limit-case configuration of this type instead.
        #[arg(long = "type", value_name = "TYPE", requires_all = ["j0", "q"])]
        ty: Option<String>,
        #[arg(long)]
        j0: Option<usize>,
        /// Signature q of the imported spectrum; p is (r - 1) / 2.
        #[arg(long)]
        q: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Estimate Lyapunov exponents of a random CO(p, q) cocycle.
    Simulate(SimulateArgs),
    /// Classify a matrix sequence for uniform Lyapunov regularity.
    ClassifySeq(ClassifyArgs),
}

#[derive(Debug, Args)]
pub struct TypeArgs {
    /// Root system type such as F4, E8, BC3, or a family letter with --rank.
    #[arg(long = "type", value_name = "TYPE")]
    pub ty: String,
    #[arg(long)]
    pub rank: Option<usize>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// JSON model file; flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub p: Option<usize>,
    #[arg(long)]
    pub q: Option<usize>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = lyapsim::DEFAULT_TOL)]
    pub tol: f64,
    /// Steps between re-orthonormalizations (1..=20).
    #[arg(long, default_value_t = 1)]
    pub interval: usize,
    #[arg(long)]
    pub boost_scale: Option<f64>,
    #[arg(long)]
    pub rotation_scale: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub conformal_log_mean: Option<f64>,
    #[arg(long)]
    pub conformal_log_spread: Option<f64>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SeqFamily {
    /// e^{-k} I_n
    Scalar,
    /// diag(e^{-k}, e^{-2k})
    Split,
    /// l_k e^{-k} I_n l'_k with bounded random l_k, l'_k
    Perturbed,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    /// Sequence document with "times" and "matrices".
    #[arg(long, conflicts_with = "family")]
    pub input: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub family: Option<SeqFamily>,
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long, default_value_t = 200)]
    pub len: usize,
    /// Bound on the norms of the multipliers and their inverses.
    #[arg(long, default_value_t = 10.0)]
    pub bound: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-2)]
    pub tol: f64,
    #[arg(long)]
    pub json: bool,
}

/// Parses `args` (including the program name), runs the subcommand and
/// writes the report to `out` and diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{text}");
                    EXIT_USAGE
                }
            };
        }
    };
    let mut buf = Vec::new();
    let result = thread_pool().and_then(|pool| pool.install(|| dispatch(&cli.command, &mut buf)));
    if out.write_all(&buf).and_then(|()| out.flush()).is_err() {
        return EXIT_DOMAIN;
    }
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.code()
        }
    }
}

fn thread_pool() -> Result<rayon::ThreadPool, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| CliError::Usage(format!("{THREADS_ENV} must be a positive integer, got {v:?}")))?;
        builder = builder.num_threads(n);
    }
    builder
        .build()
        .map_err(|e| CliError::Input(format!("thread pool: {e}")))
}

fn dispatch(cmd: &Command, out: &mut dyn Write) -> Result<(), CliError> {
    match cmd {
        Command::Roots(a) => cmd_roots(a, out),
        Command::Codim { ty, j0 } => cmd_codim(ty, *j0, out),
        Command::LimitCase(a) => cmd_limit_case(a, out),
        Command::Bounds {
            ty,
            rank,
            all,
            max_rank,
            json,
        } => cmd_bounds(ty.as_deref(), *rank, *all, *max_rank, *json, out),
        Command::ValidateSpectrum {
            input,
            ty,
            j0,
            q,
            json,
        } => cmd_validate(input.as_ref(), ty.as_deref(), *j0, *q, *json, out),
        Command::Simulate(a) => cmd_simulate(a, out),
        Command::ClassifySeq(a) => cmd_classify(a, out),
    }
}

fn parse_type(name: &str, rank: Option<usize>) -> Result<RootSystemType, CliError> {
    rootsys::parse_type(name, rank).map_err(|e| {
        CliError::Usage(format!(
            "--type {name:?}: {e}; expected A<l> (l>=1), B<l>/C<l> (l>=2), BC<l> (l>=1), D<l> (l>=4), E6, E7, E8, F4 or G2"
        ))
    })
}

fn write_json<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<(), CliError> {
    let s = serde_json::to_string_pretty(value).map_err(|e| CliError::Input(e.to_string()))?;
    writeln!(out, "{s}")?;
    Ok(())
}

fn cmd_roots(a: &TypeArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let ty = parse_type(&a.ty, a.rank)?;
    let rs = rootsys::build(ty)?;
    if a.json {
        writeln!(out, "{}", rs.to_json()?)?;
        return Ok(());
    }
    writeln!(
        out,
        "{ty}: {} roots in dimension {}, rank {}",
        rs.roots().len(),
        rs.ambient_dim(),
        rs.rank()
    )?;
    for (i, s) in rs.simple().iter().enumerate() {
        writeln!(out, "alpha_{} = {s}", i + 1)?;
    }
    for (r, c) in rs.roots().iter().zip(rs.coefficients()) {
        writeln!(out, "{r}  {c:?}")?;
    }
    Ok(())
}

#[derive(Serialize)]
struct CodimReport {
    schema_version: u32,
    #[serde(rename = "type")]
    ty: RootSystemType,
    codims: Vec<CodimEntry>,
    r_g: usize,
    minimizing_j0: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    complement: Option<rootsys::ParabolicComplement>,
}

#[derive(Serialize)]
struct CodimEntry {
    j0: usize,
    codim: usize,
}

fn cmd_codim(a: &TypeArgs, j0: Option<usize>, out: &mut dyn Write) -> Result<(), CliError> {
    let ty = parse_type(&a.ty, a.rank)?;
    let codims = rootsys::codims(ty)?;
    let complement = match j0 {
        Some(j) => Some(rootsys::parabolic_complement(&rootsys::build(ty)?, j)?),
        None => None,
    };
    let report = CodimReport {
        schema_version: SCHEMA_VERSION,
        ty,
        r_g: rootsys::minimal_resonant_codim(ty)?,
        minimizing_j0: rootsys::minimizing_j0(ty)?,
        codims: codims
            .iter()
            .enumerate()
            .map(|(i, &c)| CodimEntry { j0: i + 1, codim: c })
            .collect(),
        complement,
    };
    if a.json {
        return write_json(out, &report);
    }
    writeln!(out, "{ty}")?;
    writeln!(out, "{:>4}  {:>6}", "j0", "codim")?;
    for e in &report.codims {
        writeln!(out, "{:>4}  {:>6}", e.j0, e.codim)?;
    }
    writeln!(out, "r(g) = {} at j0 in {:?}", report.r_g, report.minimizing_j0)?;
    if let Some(pc) = &report.complement {
        writeln!(out, "complement for j0 = {} ({} roots):", pc.j0, pc.codim)?;
        for r in &pc.complement {
            writeln!(out, "  {r}")?;
        }
    }
    Ok(())
}

fn cmd_limit_case(a: &TypeArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let ty = parse_type(&a.ty, a.rank)?;
    let rep = resonance::limit_case_report(ty)?;
    if a.json {
        return write_json(out, &rep);
    }
    writeln!(out, "{ty}: r(g) = {}", rep.r_g)?;
    match rep.limit_index {
        Some(p) => writeln!(out, "limit case r(g) = 2p + 1 with p = {p}")?,
        None => writeln!(out, "r(g) is even; the limit case does not occur")?,
    }
    for c in &rep.j0_cases {
        writeln!(out, "j0 = {}: complement of {} roots", c.j0, c.complement_size)?;
        let centers: Vec<String> = c.centers.iter().map(ToString::to_string).collect();
        writeln!(out, "  centers: [{}]", centers.join(", "))?;
        writeln!(
            out,
            "  admissible configurations: {} ({} with a uniform direction)",
            c.admissible_configurations, c.with_uniform_direction
        )?;
        if let Some(conf) = &c.configuration {
            writeln!(out, "  chi = {}", conf.chi)?;
            for (i, f) in conf.functionals.iter().enumerate() {
                writeln!(out, "  chi_{} = {f}", i + 1)?;
            }
        }
        if let Some(x) = &c.uniform_direction {
            writeln!(
                out,
                "  uniform direction X = {}{}",
                x.x,
                if x.unique { " (unique)" } else { "" }
            )?;
        }
    }
    writeln!(out, "verdict: {}", rep.verdict.as_str())?;
    match rep.refined_bound {
        Some(b) => writeln!(out, "k_bound: {b} (raised by one: the limit case is infeasible)")?,
        None => writeln!(out, "k_bound: {}", rep.k_bound)?,
    }
    Ok(())
}

fn bound_types(max_rank: usize) -> Vec<RootSystemType> {
    let mut types = RootSystemType::exceptional_types();
    for family in [Family::A, Family::B, Family::C, Family::BC, Family::D] {
        for l in 2..=max_rank {
            if let Ok(t) = RootSystemType::new(family, l) {
                types.push(t);
            }
        }
    }
    types
}

fn cmd_bounds(
    ty: Option<&str>,
    rank: Option<usize>,
    all: bool,
    max_rank: usize,
    json: bool,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let types = match (ty, all) {
        (Some(name), _) => vec![parse_type(name, rank)?],
        (None, true) => bound_types(max_rank),
        (None, false) => RootSystemType::exceptional_types(),
    };
    let records = types
        .into_iter()
        .map(resonance::optimal_index_bound)
        .collect::<Result<Vec<_>, _>>()?;
    if json {
        return write_json(
            out,
            &json!({ "schema_version": SCHEMA_VERSION, "bounds": records }),
        );
    }
    writeln!(
        out,
        "{:<5} {:>5} {:>5} {:>10} {:<42} {:>3}",
        "type", "r(g)", "l-1", "resonance", "limit case", "k"
    )?;
    for b in &records {
        writeln!(
            out,
            "{:<5} {:>5} {:>5} {:>10} {:<42} {:>3}",
            b.ty.to_string(),
            b.r_g,
            b.rank_bound,
            b.resonance_bound,
            b.limit_case.to_string(),
            b.k_bound
        )?;
    }
    Ok(())
}

#[derive(Serialize)]
struct ValidationReport<'a> {
    schema_version: u32,
    spectrum: &'a ConformalSpectrum,
    r: usize,
    violations: Vec<confstruct::Violation>,
    orthogonality_obligations: Vec<(usize, usize)>,
}

fn cmd_validate(
    input: Option<&PathBuf>,
    ty: Option<&str>,
    j0: Option<usize>,
    q: Option<usize>,
    json: bool,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let spectrum = match (input, ty, j0, q) {
        (Some(path), ..) => ConformalSpectrum::from_json(&read(path)?)?,
        (None, Some(name), Some(j0), Some(q)) => {
            let ty = parse_type(name, None)?;
            let rays = resonance::complement_rays(ty, j0)?;
            let centers = resonance::find_centers(&rays)?;
            let center = *centers
                .first()
                .ok_or_else(|| CliError::Input(format!("{ty} j0 = {j0}: no admissible center")))?;
            let conf = resonance::build_configuration(&rays, center)?;
            confstruct::spectrum_from_configuration(&conf, (conf.r - 1) / 2, q)?
        }
        _ => {
            return Err(CliError::Usage(
                "validate-spectrum needs --input FILE or --type TYPE --j0 J --q Q".into(),
            ))
        }
    };
    let report = ValidationReport {
        schema_version: SCHEMA_VERSION,
        spectrum: &spectrum,
        r: spectrum.r(),
        violations: confstruct::validate(&spectrum),
        orthogonality_obligations: confstruct::orthogonality_obligations(&spectrum),
    };
    if json {
        return write_json(out, &report);
    }
    writeln!(
        out,
        "CO({},{}) spectrum with r = {}, chi = {}",
        spectrum.p(),
        spectrum.q(),
        spectrum.r(),
        spectrum.chi()
    )?;
    for (i, b) in spectrum.blocks().iter().enumerate() {
        let sig = match b.signature {
            confstruct::BlockSignature::Isotropic => "isotropic".to_string(),
            confstruct::BlockSignature::Signature { p, q } => format!("signature ({p},{q})"),
        };
        writeln!(out, "  chi_{} = {}  dim {}  {sig}", i + 1, b.functional, b.multiplicity)?;
    }
    writeln!(
        out,
        "orthogonality obligations: {}",
        report.orthogonality_obligations.len()
    )?;
    if report.violations.is_empty() {
        writeln!(out, "no violations")?;
    } else {
        for v in &report.violations {
            writeln!(out, "violation {v}")?;
        }
    }
    Ok(())
}

fn read(path: &PathBuf) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// Model file for `simulate`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub p: usize,
    pub q: usize,
    #[serde(flatten)]
    pub sampler: SamplerSpec,
    pub seed: u64,
    pub steps: usize,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        SimulationConfig {
            p: 2,
            q: 3,
            sampler: SamplerSpec::default(),
            seed: 42,
            steps: 100_000,
        }
    }
}

fn cmd_simulate(a: &SimulateArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let mut cfg = match &a.config {
        Some(path) => serde_json::from_str::<SimulationConfig>(&read(path)?)
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?,
        None => SimulationConfig::default(),
    };
    macro_rules! override_with {
        ($($field:ident).+ = $flag:expr) => {
            if let Some(v) = $flag {
                cfg.$($field).+ = v;
            }
        };
    }
    override_with!(p = a.p);
    override_with!(q = a.q);
    override_with!(steps = a.steps);
    override_with!(seed = a.seed);
    override_with!(sampler.boost_scale = a.boost_scale);
    override_with!(sampler.rotation_scale = a.rotation_scale);
    override_with!(sampler.conformal_log_mean = a.conformal_log_mean);
    override_with!(sampler.conformal_log_spread = a.conformal_log_spread);
    let model = CocycleModel::new(cfg.p, cfg.q, cfg.sampler, cfg.seed)?;
    let est = lyapsim::estimate_exponents(&model, cfg.steps, a.interval)?;
    let pairing = lyapsim::check_pairing(&est, a.tol)?;
    if a.json {
        return write_json(
            out,
            &json!({
                "schema_version": SCHEMA_VERSION,
                "model": cfg,
                "interval": a.interval,
                "estimate": est,
                "pairing": pairing,
            }),
        );
    }
    writeln!(
        out,
        "CO({},{}) seed {} steps {}",
        cfg.p, cfg.q, cfg.seed, est.steps
    )?;
    let ex: Vec<String> = est.exponents.iter().map(|x| format!("{x:.6}")).collect();
    writeln!(out, "exponents: [{}]", ex.join(", "))?;
    writeln!(out, "chi_hat: {:.6}", est.chi_hat)?;
    writeln!(out, "chi from volume growth: {:.6}", est.chi_from_volume)?;
    writeln!(
        out,
        "blocks (threshold {:.4}): {:?}",
        pairing.threshold, pairing.grouping
    )?;
    for c in &pairing.checks {
        writeln!(
            out,
            "{:<17} {}  residual {:.3e}  bound {:.3e}",
            c.rule,
            if c.pass { "pass" } else { "FAIL" },
            c.residual,
            c.bound
        )?;
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SequenceDocument {
    pub schema_version: u32,
    pub times: Vec<f64>,
    /// Row-major matrices.
    pub matrices: Vec<Vec<Vec<f64>>>,
}

impl SequenceDocument {
    pub fn from_sequence(s: &MatrixSequence) -> Self {
        SequenceDocument {
            schema_version: SCHEMA_VERSION,
            times: s.times().to_vec(),
            matrices: s
                .mats()
                .iter()
                .map(|m| m.row_iter().map(|r| r.iter().copied().collect()).collect())
                .collect(),
        }
    }

    pub fn into_sequence(self) -> Result<MatrixSequence, CliError> {
        let mats = self
            .matrices
            .iter()
            .map(|rows| {
                let n = rows.len();
                if rows.iter().any(|r| r.len() != n) {
                    return Err(CliError::Input("matrices must be square".into()));
                }
                Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(MatrixSequence::new(mats, self.times)?)
    }
}

fn cmd_classify(a: &ClassifyArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let seq = match (&a.input, a.family) {
        (Some(path), _) => serde_json::from_str::<SequenceDocument>(&read(path)?)
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?
            .into_sequence()?,
        (None, Some(SeqFamily::Scalar)) => lyapsim::scalar_family(a.n, a.len),
        (None, Some(SeqFamily::Split)) => lyapsim::split_family(a.len),
        (None, Some(SeqFamily::Perturbed)) => {
            if !(a.bound >= 1.0) {
                return Err(CliError::Usage("--bound must be at least 1".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
            lyapsim::perturb(&lyapsim::scalar_family(a.n, a.len), a.bound, &mut rng)
        }
        (None, None) => {
            return Err(CliError::Usage(
                "classify-seq needs --input FILE or --family scalar|split|perturbed".into(),
            ))
        }
    };
    if seq.is_empty() {
        return Err(SimError::SequenceTooShort(0).into());
    }
    let rep = lyapsim::classify_uniform_regularity(&seq, a.tol)?;
    if a.json {
        return write_json(
            out,
            &json!({ "schema_version": SCHEMA_VERSION, "tol": a.tol, "report": rep }),
        );
    }
    let verdict = match rep.verdict {
        Regularity::Uniform { exponent } => format!("Uniform({exponent:.6})"),
        Regularity::NotUniform => "NotUniform".into(),
        Regularity::Inconclusive => "Inconclusive".into(),
    };
    writeln!(out, "verdict: {verdict}")?;
    writeln!(
        out,
        "det slope {:.6} +- {:.2e}, norm slope {:.6} +- {:.2e}, gap {:.3e}",
        rep.chi_det, rep.chi_det_stderr, rep.top_exponent, rep.top_exponent_stderr, rep.gap
    )?;
    writeln!(out, "last a_k {:.6}, last b_k {:.6}", rep.a_last, rep.b_last)?;
    Ok(())
}

