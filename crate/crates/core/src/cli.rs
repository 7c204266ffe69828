//! Command-line front end: argument parsing, JSON input, seeded sampling
//! harness and report emission.
//!
//! Every command prints one JSON report. Reports contain no timing unless
//! `--timing` is given, so equal arguments give equal bytes. Exit codes:
//! 0 when every certified check passes, 1 when one fails, 2 on usage, input
//! or domain errors.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use num_traits::Zero;
use serde::Serialize;
use serde_json::Value;

use crate::charvar::{
    conormal_fiber_p, fiber_dichotomy_sampled, in_char_g, in_char_n, in_char_p, CotangentPoint, ExtendedCotangentPoint,
    DICHOTOMY_DEFAULT_SAMPLES,
};
use crate::error::Error;
use crate::jordan::{chevalley, is_nilpotent, is_regular_nilpotent, is_regular_semisimple, is_semisimple, jordan_type};
use crate::lie::{in_span, orbit_tangent_dim, stabilizer};
use crate::orbit::{
    ad_det_on_complement, conjugator_in_p, entry_point, krylov_dim, m_genericity, orbit_dense_check, p_index, phi_map,
    regular_nilpotent_representative, section, semisimple_witness, sigma_eval, sigma_poly, sigma_var_names,
    stratum_signature, SIGMA_SYMBOLIC_MAX,
};
use crate::ratlin::{format_rational, inverse, parse_rational, rank, rat, RatMatrix, RatVector, Rational};
use crate::sample::Sampler;
use crate::weyl::{
    principal_symbol, sl2_casimir, sl2_poisson_example, tame_check, tau_sl2, verify_sl2_with, weyl_commutator,
    BFunctionCandidate, Sl2Element, Symbol, WeylOperator,
};

#[derive(Parser, Debug, Clone)]
#[command(
    name = "glorbit",
    version,
    about = "Exact checks for orbits of the mirabolic subgroup on gl_n"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Options,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Chevalley decomposition, Jordan type and regularity of a matrix.
    Jordan,
    /// Stratum signature, Σ and density of the P-orbit.
    Stratum,
    /// Krylov dimension d(X, v), optionally summed over blocks.
    Krylov,
    /// Σ = det(v0, Xv0, …) numerically and, for n ≤ 4, symbolically.
    Sigma,
    /// Semisimple witness Φ with [Φ, X] in p⊥.
    Witness,
    /// Element of P conjugating one regular nilpotent to another.
    Conjugate,
    /// Membership of a cotangent point in the three characteristic varieties.
    Charvar,
    /// Conormal fiber dichotomy for a regular nilpotent.
    Fiber,
    /// Section φ(v) and transfer map Φ(X, v).
    Section,
    /// Genericity of Y with respect to a semisimple S.
    Mgeneric,
    /// sl_2 differential operator identities and symbol checks.
    Sl2,
    /// Root condition on a b-function candidate.
    Tame,
    /// Seeded batches over all cross-module invariants.
    Fuzz,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Jordan => "jordan",
            Command::Stratum => "stratum",
            Command::Krylov => "krylov",
            Command::Sigma => "sigma",
            Command::Witness => "witness",
            Command::Conjugate => "conjugate",
            Command::Charvar => "charvar",
            Command::Fiber => "fiber",
            Command::Section => "section",
            Command::Mgeneric => "mgeneric",
            Command::Sl2 => "sl2",
            Command::Tame => "tame",
            Command::Fuzz => "fuzz",
        }
    }
}

/// Flags shared by all commands; each command reads the ones it needs.
/// Vectors and lists are comma separated (`--v0 0,1`, `--roots -1/2,0`).
/// Matrix flags take a JSON file path or an inline JSON array.
#[derive(Args, Debug, Clone, Default)]
pub struct Options {
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Base vector; defaults to the last standard basis vector.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub v0: Option<String>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Sampled integer entries lie in [-bound, bound].
    #[arg(long, global = true, default_value_t = 5)]
    pub bound: i64,
    #[arg(long, global = true)]
    pub blocks: Option<String>,
    #[arg(long, global = true)]
    pub matrix: Option<String>,
    /// Second matrix: the target for `conjugate`.
    #[arg(long, global = true)]
    pub matrix2: Option<String>,
    /// Cotangent matrix for `charvar`, Y for `mgeneric`.
    #[arg(long = "matrix-y", global = true)]
    pub matrix_y: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub v: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub u: Option<String>,
    /// p-index of the generated regular nilpotent representative.
    #[arg(long, global = true)]
    pub p: Option<usize>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub a: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub b: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub roots: Option<String>,
    #[arg(long, global = true)]
    pub weights: Option<String>,
    /// Fault injection: run with a deliberately wrong predicate.
    #[arg(long, global = true)]
    pub mutate: bool,
    #[arg(long = "json-out", global = true)]
    pub json_out: Option<PathBuf>,
    /// Include wall time in the report (breaks byte-determinism).
    #[arg(long, global = true)]
    pub timing: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("{0}")]
    Domain(#[from] Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Resolved run parameters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub n: usize,
    pub v0: RatVector,
    pub seed: u64,
    pub samples: usize,
    pub entry_bound: i64,
    pub blocks: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Counts {
    pub pass: usize,
    pub fail: usize,
}

impl Counts {
    fn record(&mut self, ok: bool) {
        if ok {
            self.pass += 1;
        } else {
            self.fail += 1;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    pub inputs: BTreeMap<String, Value>,
    pub outputs: BTreeMap<String, Value>,
    pub certified_checks: BTreeMap<String, bool>,
    pub witnesses: BTreeMap<String, Value>,
    pub counts: Counts,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<u64>,
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report payloads serialize")
}

impl Report {
    pub fn new(command: Command) -> Self {
        Report {
            command: command.name().to_string(),
            inputs: BTreeMap::new(),
            outputs: BTreeMap::new(),
            certified_checks: BTreeMap::new(),
            witnesses: BTreeMap::new(),
            counts: Counts::default(),
            wall_time_ms: None,
        }
    }

    pub fn input<T: Serialize>(&mut self, key: &str, v: &T) {
        self.inputs.insert(key.to_string(), to_value(v));
    }

    pub fn output<T: Serialize>(&mut self, key: &str, v: &T) {
        self.outputs.insert(key.to_string(), to_value(v));
    }

    pub fn witness<T: Serialize>(&mut self, key: &str, v: &T) {
        self.witnesses.insert(key.to_string(), to_value(v));
    }

    pub fn check(&mut self, key: &str, ok: bool) {
        self.certified_checks.insert(key.to_string(), ok);
    }

    fn finish(&mut self) {
        let mut c = Counts::default();
        for ok in self.certified_checks.values() {
            c.record(*ok);
        }
        self.counts = c;
    }

    pub fn all_pass(&self) -> bool {
        self.certified_checks.values().all(|ok| *ok)
    }

    pub fn exit_code(&self) -> i32 {
        if self.all_pass() {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}

fn parse_list<T>(text: &str, what: &str, f: impl Fn(&str) -> Option<T>) -> CliResult<Vec<T>> {
    let items: Vec<&str> = text.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    items
        .iter()
        .map(|s| f(s).ok_or_else(|| CliError::Usage(format!("bad {what} entry {s:?}"))))
        .collect()
}

fn parse_rationals(text: &str, what: &str) -> CliResult<Vec<Rational>> {
    parse_list(text, what, |s| parse_rational(s).ok())
}

fn parse_vector(text: &str, what: &str) -> CliResult<RatVector> {
    Ok(RatVector::new(parse_rationals(text, what)?)?)
}

fn parse_usizes(text: &str, what: &str) -> CliResult<Vec<usize>> {
    parse_list(text, what, |s| s.parse().ok())
}

fn parse_scalar(text: &str, what: &str) -> CliResult<Rational> {
    parse_rational(text).map_err(|_| CliError::Usage(format!("bad {what} {text:?}")))
}

/// Reads a matrix from inline JSON or from a JSON file.
pub fn load_matrix(arg: &str) -> CliResult<RatMatrix> {
    let text = if arg.trim_start().starts_with('[') {
        arg.to_string()
    } else {
        std::fs::read_to_string(Path::new(arg))?
    };
    Ok(serde_json::from_str(&text)?)
}

struct Ctx<'a> {
    opts: &'a Options,
    command: Command,
}

impl Ctx<'_> {
    fn matrix(&self) -> CliResult<Option<RatMatrix>> {
        self.opts.matrix.as_deref().map(load_matrix).transpose()
    }

    fn require_matrix(&self) -> CliResult<RatMatrix> {
        self.matrix()?
            .ok_or_else(|| CliError::Usage(format!("{} needs --matrix", self.command.name())))
    }

    fn n_or(&self, fallback: usize) -> CliResult<usize> {
        let n = self.opts.n.unwrap_or(fallback);
        if n == 0 {
            return Err(CliError::Usage("--n must be at least 1".into()));
        }
        Ok(n)
    }

    fn v0(&self, n: usize) -> CliResult<RatVector> {
        let v0 = match &self.opts.v0 {
            Some(s) => parse_vector(s, "--v0")?,
            None => RatVector::unit(n, n - 1),
        };
        if v0.dim() != n {
            return Err(CliError::Usage(format!("--v0 has {} entries, expected {n}", v0.dim())));
        }
        if v0.is_zero() {
            return Err(CliError::Usage("--v0 must be nonzero".into()));
        }
        Ok(v0)
    }

    fn samples(&self, fallback: usize) -> CliResult<usize> {
        let s = self.opts.samples.unwrap_or(fallback);
        if s == 0 {
            return Err(CliError::Usage("--samples must be at least 1".into()));
        }
        Ok(s)
    }

    fn sampler(&self) -> CliResult<Sampler> {
        if self.opts.bound < 1 {
            return Err(CliError::Usage("--bound must be at least 1".into()));
        }
        Ok(Sampler::new(self.opts.seed, self.opts.bound))
    }

    fn blocks(&self) -> CliResult<Option<Vec<usize>>> {
        self.opts
            .blocks
            .as_deref()
            .map(|s| parse_usizes(s, "--blocks"))
            .transpose()
    }

    /// `--matrix`, or the regular nilpotent representative for `--n`, `--p`
    /// together with its base vector when `--v0` is absent.
    fn regular_nilpotent(&self) -> CliResult<(RatMatrix, RatVector)> {
        if let Some(x) = self.matrix()? {
            let v0 = self.v0(x.n())?;
            return Ok((x, v0));
        }
        let n = self.n_or(3)?;
        let p = self.opts.p.unwrap_or(0);
        if p >= n {
            return Err(CliError::Usage(format!("--p must be below n = {n}")));
        }
        let (x, e) = regular_nilpotent_representative(n, p);
        let v0 = match self.opts.v0 {
            Some(_) => self.v0(n)?,
            None => e,
        };
        Ok((x, v0))
    }

    fn config(&self, n: usize, v0: &RatVector, samples: usize) -> CliResult<RunConfig> {
        Ok(RunConfig {
            command: self.command.name().to_string(),
            n,
            v0: v0.clone(),
            seed: self.opts.seed,
            samples,
            entry_bound: self.opts.bound,
            blocks: self.blocks()?,
        })
    }
}

/// Parses arguments and runs the command. Clap usage errors come back as
/// `Err(clap::Error)` so the caller can print them.
pub fn run_args<I, T>(args: I) -> std::result::Result<CliResult<Report>, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args)?;
    Ok(run(&cli))
}

pub fn run(cli: &Cli) -> CliResult<Report> {
    let start = Instant::now();
    let ctx = Ctx {
        opts: &cli.opts,
        command: cli.command,
    };
    let mut report = match cli.command {
        Command::Jordan => cmd_jordan(&ctx),
        Command::Stratum => cmd_stratum(&ctx),
        Command::Krylov => cmd_krylov(&ctx),
        Command::Sigma => cmd_sigma(&ctx),
        Command::Witness => cmd_witness(&ctx),
        Command::Conjugate => cmd_conjugate(&ctx),
        Command::Charvar => cmd_charvar(&ctx),
        Command::Fiber => cmd_fiber(&ctx),
        Command::Section => cmd_section(&ctx),
        Command::Mgeneric => cmd_mgeneric(&ctx),
        Command::Sl2 => cmd_sl2(&ctx),
        Command::Tame => cmd_tame(&ctx),
        Command::Fuzz => cmd_fuzz(&ctx),
    }?;
    report.finish();
    if cli.opts.timing {
        report.wall_time_ms = Some(start.elapsed().as_millis() as u64);
    }
    Ok(report)
}

/// Entry point used by the binary; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(report) => {
            let text = report.to_json();
            print!("{text}");
            if let Some(path) = &cli.opts.json_out {
                if let Err(e) = std::fs::write(path, &text) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return 2;
                }
            }
            report.exit_code()
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn cmd_jordan(ctx: &Ctx) -> CliResult<Report> {
    let mut r = Report::new(Command::Jordan);
    let x = match ctx.matrix()? {
        Some(x) => x,
        None => ctx.sampler()?.matrix(ctx.n_or(3)?),
    };
    r.input("matrix", &x);
    let dec = chevalley(&x);
    for (name, ok) in dec.checks(&x) {
        r.check(name, ok);
    }
    let jt = jordan_type(&dec.n)?;
    r.check("partition_sums_to_n", jt.size() == x.n());
    r.output("semisimple_part", &dec.s);
    r.output("nilpotent_part", &dec.n);
    r.output("nilpotent_jordan_type", &jt);
    r.output("is_nilpotent", &is_nilpotent(&x));
    r.output("is_semisimple", &is_semisimple(&x));
    r.output("is_regular_semisimple", &is_regular_semisimple(&x));
    r.output("is_regular_nilpotent", &is_regular_nilpotent(&x));
    r.witness("polynomial_certificate", &dec.certificate);
    Ok(r)
}

fn cmd_stratum(ctx: &Ctx) -> CliResult<Report> {
    let mut r = Report::new(Command::Stratum);
    let x = ctx.require_matrix()?;
    let v0 = ctx.v0(x.n())?;
    r.input("matrix", &x);
    r.input("v0", &v0);
    let sig = stratum_signature(&x, &v0)?;
    let sigma = sigma_eval(&x, &v0)?;
    let dense = orbit_dense_check(&x, &v0)?;
    r.check("sigma_zero_iff_d_below_n", sigma.is_zero() == (sig.krylov_d < x.n()));
    r.output("signature", &sig);
    r.output("d", &sig.krylov_d);
    r.output("sigma", &format_rational(&sigma));
    r.output("p_orbit_dense", &dense);
    Ok(r)
}

fn cmd_krylov(ctx: &Ctx) -> CliResult<Report> {
    let mut r = Report::new(Command::Krylov);
    let x = ctx.require_matrix()?;
    let v = match &ctx.opts.v {
        Some(s) => parse_vector(s, "--v")?,
        None => ctx.v0(x.n())?,
    };
    let blocks = ctx.blocks()?;
    r.input("matrix", &x);
    r.input("v", &v);
    r.input("blocks", &blocks);
    let k = krylov_dim(&x, &v, blocks.as_deref())?;
    let rows: Vec<_> = k.basis.iter().map(|b| b.entries().to_vec()).collect();
    r.check("basis_independent", rows.is_empty() || rank(&rows) == k.basis.len());
    r.check("d_at_most_n", k.d <= x.n());
    r.output("d", &k.d);
    r.witness("basis", &k.basis);
    Ok(r)
}

fn cmd_sigma(ctx: &Ctx) -> CliResult<Report> {
    let mut r = Report::new(Command::Sigma);
    let x = ctx.matrix()?;
    let n = match &x {
        Some(x) => x.n(),
        None => ctx.n_or(2)?,
    };
    let v0 = ctx.v0(n)?;
    r.input("v0", &v0);
    let poly = if n <= SIGMA_SYMBOLIC_MAX {
        let p = sigma_poly(n, &v0)?;
        r.output("sigma_symbolic", &p.format_with(&sigma_var_names(n)));
        Some(p)
    } else {
        None
    };
    if let Some(x) = x {
        r.input("matrix", &x);
        let s = sigma_eval(&x, &v0)?;
        let d = krylov_dim(&x, &v0, None)?.d;
        r.check("sigma_zero_iff_d_below_n", s.is_zero() == (d < n));
        if let Some(p) = poly {
            r.check("symbolic_matches_numeric", p.eval(&entry_point(&x)) == s);
        }
        r.output("sigma", &format_rational(&s));
        r.output("d", &d);
    }
    Ok(r)
}

fn cmd_witness(ctx: &Ctx) -> CliResult<Report> {
    let mut r = Report::new(Command::Witness);
    let (x, v0) = ctx.regular_nilpotent()?;
    let a = ctx.opts.a.as_deref().map_or(Ok(rat(0)), |s| parse_scalar(s, "--a"))?;
    let b = ctx.opts.b.as_deref().map_or(Ok(rat(1)), |s| parse_scalar(s, "--b"))?;
    r.input("matrix", &x);
    r.input("v0", &v0);
    r.input("a", &format_rational(&a));
    r.input("b", &format_rational(&b));
    let class = p_index(&x, &v0)?;
    let pair = semisimple_witness(&x, &v0, &a, &b)?;
    let stab = stabilizer(&v0)?;
    for (name, ok) in pair.checks(&x, &stab) {
        r.check(name, ok);
    }
    r.output("p_index", &class.p_index);
    r.witness("phi", &pair.phi);
    r.witness("bracket", &pair.bracket_value);
    r.witness("chain_generator", &class.witness_w);
    Ok(r)
}

fn cmd_conjugate(ctx: &Ctx) -> CliResult<Report> {
    let mut r = Report::new(Command::Conjugate);
    let (x, v0) = ctx.regular_nilpotent()?;
    let x2 = match &ctx.opts.matrix2 {
        Some(s) => load_matrix(s)?,
        None => {
            let mut rng = ctx.sampler()?;
            let h = rng.invertible_fixing(&v0);
            &(&h * &x) * &inverse(&h)?
        }
    };
    r.input("matrix", &x);
    r.input("matrix2", &x2);
    r.input("v0", &v0);
    let g = conjugator_in_p(&x, &x2, &v0)?;
    r.check("g_fixes_v0", g.mul_vec(&v0) == v0);
    r.check("g_conjugates", &(&g * &x) * &inverse(&g)? == x2);
    r.witness("g", &g);
    Ok(r)
}

fn cmd_charvar(ctx: &Ctx) -> CliResult<Report> {
    let mut r = Report::new(Command::Charvar);
    let x = ctx.require_matrix()?;
    let y = match &ctx.opts.matrix_y {
        Some(s) => load_matrix(s)?,
        None => return Err(CliError::Usage("charvar needs --matrix-y".into())),
    };
    let n = x.n();
    let v0 = ctx.v0(n)?;
    let u = ctx
        .opts
        .u
        .as_deref()
        .map_or(Ok(RatVector::zeros(n)), |s| parse_vector(s, "--u"))?;
    let v = ctx
        .opts
        .v
        .as_deref()
        .map_or(Ok(RatVector::zeros(n)), |s| parse_vector(s, "--v"))?;
    r.input("x", &x);
    r.input("y", &y);
    r.input("v0", &v0);
    r.input("u", &u);
    r.input("v", &v);
    let pt = CotangentPoint {
        x: x.clone(),
        y: y.clone(),
    };
    let g = in_char_g(&pt)?;
    let p = in_char_p(&pt, &v0)?;
    let ext = in_char_n(&ExtendedCotangentPoint {
        x: x.clone(),
        u,
        y: y.clone(),
        v,
    })?;
    let ext0 = in_char_n(&ExtendedCotangentPoint {
        x,
        u: RatVector::zeros(n),
        y,
        v: RatVector::zeros(n),
    })?;
    r.check("g_implies_p", !g.verdict || p.verdict);
    r.check("n_at_zero_matches_g", ext0.verdict == g.verdict);
    r.output("in_char_g", &g);
    r.output("in_char_p", &p);
    r.output("in_char_n", &ext);
    Ok(r)
}

fn cmd_fiber(ctx: &Ctx) -> CliResult<Report> {
    let mut r = Report::new(Command::Fiber);
    let (x, v0) = ctx.regular_nilpotent()?;
    let samples = ctx.samples(DICHOTOMY_DEFAULT_SAMPLES)?;
    r.input("matrix", &x);
    r.input("v0", &v0);
    r.input("seed", &ctx.opts.seed);
    r.input("samples", &samples);
    let rep = fiber_dichotomy_sampled(&x, &v0, ctx.opts.seed, samples)?;
    for (name, ok) in &rep.checks {
        r.check(name, *ok);
    }
    r.check("dense_iff_p_zero", orbit_dense_check(&x, &v0)? == (rep.p_index == 0));
    r.output("p_index", &rep.p_index);
    r.output("fiber_dim", &rep.fiber_dim);
    r.output("outcome", &rep.label());
    r.output("sampled_evidence", &rep.sampled_evidence);
    r.witness("dichotomy", &rep.outcome);
    Ok(r)
}

fn cmd_section(ctx: &Ctx) -> CliResult<Report> {
    let mut r = Report::new(Command::Section);
    let v = match &ctx.opts.v {
        Some(s) => parse_vector(s, "--v")?,
        None => return Err(CliError::Usage("section needs --v".into())),
    };
    let v0 = ctx.v0(v.dim())?;
    r.input("v", &v);
    r.input("v0", &v0);
    let phi = section(&v, &v0)?;
    r.check("phi_maps_v0_to_v", phi.mul_vec(&v0) == v);
    r.witness("phi", &phi);
    if let Some(x) = ctx.matrix()? {
        r.input("matrix", &x);
        let big = phi_map(&x, &v, &v0)?;
        r.check(
            "transfer_preserves_d",
            krylov_dim(&big, &v0, None)?.d == krylov_dim(&x, &v, None)?.d,
        );
        r.check(
            "transfer_preserves_g_part",
            stratum_signature(&big, &v0)?.g_part() == stratum_signature(&x, &v)?.g_part(),
        );
        r.output("transfer", &big);
    }
    Ok(r)
}

fn cmd_mgeneric(ctx: &Ctx) -> CliResult<Report> {
    let mut r = Report::new(Command::Mgeneric);
    let s = ctx.require_matrix()?;
    let y = match &ctx.opts.matrix_y {
        Some(t) => load_matrix(t)?,
        None => return Err(CliError::Usage("mgeneric needs --matrix-y".into())),
    };
    r.input("s", &s);
    r.input("y", &y);
    let generic = m_genericity(&s, &y)?;
    let det = ad_det_on_complement(&s, &y)?;
    let diagonal = |m: &RatMatrix| (0..m.n()).all(|i| (0..m.n()).all(|j| i == j || m.get(i, j).is_zero()));
    if diagonal(&s) && diagonal(&y) && is_regular_semisimple(&s) {
        let n = y.n();
        let distinct = (0..n).all(|i| (i + 1..n).all(|j| y.get(i, i) != y.get(j, j)));
        r.check("diagonal_rule_agrees", generic == distinct);
    }
    r.output("generic", &generic);
    r.output("ad_determinant", &format_rational(&det));
    Ok(r)
}

fn cmd_sl2(ctx: &Ctx) -> CliResult<Report> {
    let mut r = Report::new(Command::Sl2);
    let ty = tau_sl2(Sl2Element::Y);
    let flipped = ty.scale(&rat(-1));
    let used = if ctx.opts.mutate { &flipped } else { &ty };
    r.input("mutate", &ctx.opts.mutate);
    for (which, op) in [("tau_h", tau_sl2(Sl2Element::H)), ("tau_x", tau_sl2(Sl2Element::X))] {
        r.input(which, &op.to_string());
    }
    r.input("tau_y", &used.to_string());
    for (name, ok) in &verify_sl2_with(used).identities {
        r.check(name, *ok);
    }
    let pb = sl2_poisson_example();
    let expected = Symbol::xi(pb.vars().to_vec(), 1).scale(&rat(-4));
    r.check("poisson_z_casimir_is_minus_4_eta", pb == expected);
    let z = WeylOperator::var(pb.vars().to_vec(), 2);
    let comm = weyl_commutator(&z, &sl2_casimir(&rat(0)))?;
    r.check("commutator_symbol_matches_poisson", principal_symbol(&comm)? == pb);
    r.check(
        "negative_control_detected",
        !verify_sl2_with(&flipped).identities.values().all(|ok| *ok),
    );
    r.output("poisson_z_casimir", &pb.to_string());
    r.output("commutator_z_casimir", &comm.to_string());
    r.output("symbol_tau_y", &principal_symbol(used)?.to_string());
    Ok(r)
}

fn cmd_tame(ctx: &Ctx) -> CliResult<Report> {
    let mut r = Report::new(Command::Tame);
    let roots = match &ctx.opts.roots {
        Some(s) => parse_rationals(s, "--roots")?,
        None => return Err(CliError::Usage("tame needs --roots".into())),
    };
    let weights = match &ctx.opts.weights {
        Some(s) => parse_list(s, "--weights", |t| t.parse::<u32>().ok())?,
        None => return Err(CliError::Usage("tame needs --weights".into())),
    };
    let cand = BFunctionCandidate { roots, weights };
    r.input("candidate", &cand);
    let tame = tame_check(&cand).map_err(|e| CliError::Usage(e.to_string()))?;
    let total: u32 = cand.weights.iter().sum();
    r.output("tame", &tame);
    r.output("bound", &format!("-{total}"));
    Ok(r)
}

/// Pass/fail tallies per named invariant; an `Err` counts as a failure.
#[derive(Default)]
struct Tally {
    counts: BTreeMap<String, Counts>,
}

impl Tally {
    fn record(&mut self, name: &str, ok: bool) {
        self.counts.entry(name.to_string()).or_default().record(ok);
    }

    fn record_res(&mut self, name: &str, res: crate::Result<bool>) {
        self.record(name, res.unwrap_or(false));
    }
}

fn cmd_fuzz(ctx: &Ctx) -> CliResult<Report> {
    let mut r = Report::new(Command::Fuzz);
    let n = ctx.n_or(3)?;
    let v0 = ctx.v0(n)?;
    let samples = ctx.samples(1000)?;
    let mut rng = ctx.sampler()?;
    r.input("config", &ctx.config(n, &v0, samples)?);
    r.input("mutate", &ctx.opts.mutate);
    let t = fuzz_batch(&mut rng, n, &v0, samples, ctx.opts.mutate)?;
    for (name, c) in &t.counts {
        r.check(name, c.fail == 0);
    }
    r.output("tallies", &t.counts);
    Ok(r)
}

fn fuzz_batch(rng: &mut Sampler, n: usize, v0: &RatVector, samples: usize, mutate: bool) -> CliResult<Tally> {
    let stab = stabilizer(v0)?;
    let sigma_sym = if n <= SIGMA_SYMBOLIC_MAX {
        Some(sigma_poly(n, v0)?)
    } else {
        None
    };
    let mut t = Tally::default();
    for _ in 0..samples {
        let x = rng.matrix(n);
        let v = rng.nonzero_vector(n);

        let dec = chevalley(&x);
        for (name, ok) in dec.checks(&x) {
            t.record(&format!("chevalley.{name}"), ok);
        }

        let g = rng.invertible(n);
        let gi = inverse(&g)?;
        let xg = &(&g * &x) * &gi;
        t.record_res(
            "krylov.g_equivariance",
            (|| Ok(krylov_dim(&xg, &g.mul_vec(&v), None)?.d == krylov_dim(&x, &v, None)?.d))(),
        );

        let d0 = krylov_dim(&x, v0, None)?.d;
        let s = sigma_eval(&x, v0)?;
        t.record("sigma.zero_iff_d_below_n", s.is_zero() == (d0 < n));
        if let Some(p) = &sigma_sym {
            t.record("sigma.symbolic_matches_numeric", p.eval(&entry_point(&x)) == s);
        }

        let h = rng.invertible_fixing(v0);
        let xh = &(&h * &x) * &inverse(&h)?;
        t.record_res(
            "stratum.p_invariance",
            (|| Ok(stratum_signature(&xh, v0)? == stratum_signature(&x, v0)?))(),
        );

        // a commuting pair half of the time, so that both verdicts occur
        let y = rng.nilpotent(n);
        let xc = if rng.coin() {
            &y.pow(2).scale(&rng.rational()) + &RatMatrix::scalar(n, rng.rational())
        } else {
            x.clone()
        };
        let pt = CotangentPoint {
            x: xc.clone(),
            y: y.clone(),
        };
        t.record_res(
            "charvar.g_implies_p",
            (|| Ok(!in_char_g(&pt)?.verdict || in_char_p(&pt, v0)?.verdict))(),
        );
        t.record_res(
            "charvar.n_at_zero_matches_g",
            (|| {
                let ext = ExtendedCotangentPoint {
                    x: xc.clone(),
                    u: RatVector::zeros(n),
                    y: y.clone(),
                    v: RatVector::zeros(n),
                };
                Ok(in_char_n(&ext)?.verdict == in_char_g(&pt)?.verdict)
            })(),
        );
        t.record_res(
            "conormal.dimension_count",
            (|| Ok(conormal_fiber_p(&x, v0)?.len() + orbit_tangent_dim(&x, stab.p())? == n * n))(),
        );

        t.record_res(
            "section.phi_maps_v0_to_v",
            section(&v, v0).map(|phi| phi.mul_vec(v0) == v),
        );
        t.record_res(
            "section.transfer_preserves_d",
            (|| Ok(krylov_dim(&phi_map(&x, &v, v0)?, v0, None)?.d == krylov_dim(&x, &v, None)?.d))(),
        );

        let p = rng.index(n);
        let (j, e) = regular_nilpotent_representative(n, p);
        let k = rng.invertible_fixing(&e);
        let xj = &(&k * &j) * &inverse(&k)?;
        t.record_res("nilpotent.p_index_invariant", p_index(&xj, &e).map(|c| c.p_index == p));
        t.record_res(
            "dichotomy.dense_iff_p_zero",
            orbit_dense_check(&xj, &e).map(|d| d == (p == 0)),
        );
        if p >= 1 {
            let a = rng.rational();
            let mut b = rng.rational();
            if a == b {
                b += rat(1);
            }
            let stab_e = stabilizer(&e)?;
            match semisimple_witness(&xj, &e, &a, &b) {
                Ok(w) => {
                    for (name, ok) in w.checks(&xj, &stab_e) {
                        let ok = if mutate && name == "bracket_in_p_perp" {
                            // wrong complement: rows, not columns, along v0
                            let wrong: Vec<RatMatrix> =
                                (0..n).map(|i| RatMatrix::outer(&RatVector::unit(n, i), &e)).collect();
                            in_span(&wrong, &w.bracket_value)
                        } else {
                            ok
                        };
                        t.record(&format!("witness.{name}"), ok);
                    }
                }
                Err(_) => t.record("witness.constructed", false),
            }
        }
    }
    Ok(t)
}
