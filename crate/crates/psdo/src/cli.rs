//! Command-line front end.
//!
//! Exit status: 0 when every check passes, 1 on a failed check, 2 on a
//! configuration or parse error.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use psdo_core::calculus::{combinatorial_identity_check, Convention, QuantizedSymbol};
use psdo_core::hermite::quantize_to_operator;
use psdo_core::multiindex::MultiIndex;
use psdo_core::parametrix::{
    check_hypoelliptic, hypo_invariance_check, parametrix_terms, parametrix_verify, residual_decay, HypoParams,
    HypoReport,
};
use psdo_core::scalar::{format_rational, Exact};
use psdo_core::symbol::{
    amplitude_reduce, estimate_class_constants, ClassFitOptions, DerivKind, PointSymbol, PolySymbol, TauParams,
};
use psdo_core::weights::{
    verify_conjugate_inequalities, verify_weight_axioms, ConjugateGrid, ConjugateMethod, WeightFunction, YoungConjugate,
};
use serde::Serialize;
use serde_json::{json, Value};

use crate::format::{load_symbol, LoadedSymbol, SymbolFile};
use crate::grid::{grid_apply_op_tau, GridFunction};
use crate::report::Report;
use crate::specs::{expansion_records, parse_region, parse_test_function, GridSpec};
use crate::suite;

/// Environment variable that fixes the worker thread count.
pub const THREADS_ENV: &str = "PSDO_THREADS";

#[derive(Debug, Parser, Serialize)]
#[command(name = "psdo", version, about = "Calculus of global pseudodifferential operators of infinite order")]
pub struct Cli {
    /// Seed for randomized sampling; recorded in every report.
    #[arg(long, global = true, default_value_t = 0x5eed)]
    pub seed: u64,
    /// Write the machine-readable report here.
    #[arg(long, global = true)]
    pub report: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
pub enum Command {
    /// Weight functions and their Young conjugates.
    #[command(subcommand)]
    Weights(WeightsCmd),
    /// Single-symbol operations.
    #[command(subcommand)]
    Symbol(SymbolCmd),
    /// Quantization calculus on polynomial symbols.
    #[command(subcommand)]
    Calc(CalcCmd),
    /// Exact parametrix of an elliptic polynomial symbol.
    #[command(subcommand)]
    Parametrix(ParametrixCmd),
    /// Hypoellipticity fits.
    #[command(subcommand)]
    Hypo(HypoCmd),
    /// Operator oracles on Hermite expansions and grids.
    #[command(subcommand)]
    Oracle(OracleCmd),
    /// The full acceptance battery.
    #[command(subcommand)]
    Suite(SuiteCmd),
}

#[derive(Debug, Subcommand, Serialize)]
pub enum WeightsCmd {
    /// Numeric sweep of the weight axioms.
    Check {
        #[arg(long)]
        weight: String,
        #[arg(long, default_value_t = 2000)]
        samples: usize,
    },
    /// Conjugate values and the conjugate inequalities.
    Conj {
        #[arg(long)]
        weight: String,
        /// Points at which to print φ*.
        #[arg(long, value_delimiter = ',', default_values_t = vec![0.0, 1.0, 2.0, 5.0, 10.0])]
        y: Vec<f64>,
        #[arg(long, value_enum, default_value_t = Method::Auto)]
        method: Method,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
pub enum Method {
    Auto,
    Closed,
    Numeric,
}

#[derive(Debug, Subcommand, Serialize)]
pub enum SymbolCmd {
    /// `∂^α_x ∂^β_ξ a` (or `D` derivatives).
    Derive {
        #[arg(long)]
        symbol: PathBuf,
        #[arg(long, value_delimiter = ',')]
        dx: Vec<u32>,
        #[arg(long, value_delimiter = ',')]
        dxi: Vec<u32>,
        #[arg(long, value_enum, default_value_t = Kind::Partial)]
        kind: Kind,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fits the class constants of a symbol.
    Classfit {
        #[arg(long)]
        symbol: PathBuf,
        #[arg(long)]
        weight: String,
        #[arg(long, default_value_t = 0.0)]
        m: f64,
        #[arg(long, default_value_t = 1.0)]
        rho: f64,
        #[arg(long, value_delimiter = ',', default_values_t = vec![1, 2, 4])]
        n: Vec<u32>,
        #[arg(long, default_value_t = 4)]
        max_order: u32,
        #[arg(long, default_value = "r=2..100,shells=8,dirs=24")]
        region: String,
    },
    /// Reduces an amplitude to a τ-symbol.
    Reduce {
        #[arg(long)]
        symbol: PathBuf,
        #[arg(long, default_value = "0")]
        tau: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
pub enum Kind {
    Partial,
    D,
}

#[derive(Debug, Args, Serialize)]
pub struct Output {
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub convention: Option<Conv>,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
pub enum Conv {
    Normalized,
    Paper,
}

#[derive(Debug, Subcommand, Serialize)]
pub enum CalcCmd {
    ChangeQuant {
        #[arg(long)]
        symbol: PathBuf,
        #[arg(long)]
        from: Option<String>,
        #[arg(long)]
        to: String,
        #[command(flatten)]
        output: Output,
    },
    Transpose {
        #[arg(long)]
        symbol: PathBuf,
        #[arg(long)]
        tau: Option<String>,
        #[command(flatten)]
        output: Output,
    },
    /// `a ∘ b`, either at a common `--tau` or from `--tau1`, `--tau2` to
    /// `--target`.
    Compose {
        #[arg(long)]
        symbol: PathBuf,
        #[arg(long)]
        with: PathBuf,
        #[arg(long, conflicts_with_all = ["tau1", "tau2", "target"])]
        tau: Option<String>,
        #[arg(long)]
        tau1: Option<String>,
        #[arg(long)]
        tau2: Option<String>,
        #[arg(long)]
        target: Option<String>,
        #[command(flatten)]
        output: Output,
    },
    /// Weyl composition (both symbols at τ = 1/2).
    Weyl {
        #[arg(long)]
        symbol: PathBuf,
        #[arg(long)]
        with: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// Exhaustive Vandermonde and BBR sweeps.
    Identities {
        #[arg(long, default_value_t = 12)]
        vandermonde: u32,
        #[arg(long, default_value_t = 3)]
        bbr_dim: usize,
        #[arg(long, default_value_t = 6)]
        bbr_order: u32,
    },
}

#[derive(Debug, Args, Serialize)]
pub struct ParametrixArgs {
    #[arg(long)]
    pub symbol: PathBuf,
    #[arg(long, default_value = "0")]
    pub tau: String,
    #[arg(long, default_value_t = 4)]
    pub order: usize,
}

#[derive(Debug, Subcommand, Serialize)]
pub enum ParametrixCmd {
    Build {
        #[command(flatten)]
        args: ParametrixArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Checks `r_0 = 1` and `r_j = 0` for `1 ≤ j ≤ N` exactly.
    Verify {
        #[command(flatten)]
        args: ParametrixArgs,
    },
    /// Decay slope of the leading remainder.
    Decay {
        #[command(flatten)]
        args: ParametrixArgs,
        #[arg(long, default_value_t = 1.0)]
        rho: f64,
        /// Shells `⟨z⟩ = 2^k` for `k` in `lo..hi`.
        #[arg(long, default_value = "4..9")]
        ks: String,
        #[arg(long, default_value_t = 16)]
        dirs: usize,
    },
}

#[derive(Debug, Args, Serialize)]
pub struct HypoArgs {
    #[arg(long)]
    pub symbol: PathBuf,
    #[arg(long)]
    pub weight: String,
    #[arg(long, default_value_t = 0.0)]
    pub m: f64,
    /// Defaults to `m`.
    #[arg(long)]
    pub m0: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub rho: f64,
    #[arg(long, default_value_t = 2.0)]
    pub r: f64,
    /// Gevrey `σ`; derived from the weight when absent.
    #[arg(long)]
    pub sigma: Option<String>,
    #[arg(long, default_value_t = 3)]
    pub n: u32,
    #[arg(long, default_value_t = 3)]
    pub max_order: u32,
    #[arg(long, default_value = "r=2..100,shells=8,dirs=24")]
    pub region: String,
}

#[derive(Debug, Subcommand, Serialize)]
pub enum HypoCmd {
    Check {
        #[command(flatten)]
        args: HypoArgs,
    },
    /// Refit after changing the quantization.
    Invariance {
        #[command(flatten)]
        args: HypoArgs,
        #[arg(long, default_value = "0")]
        from: String,
        #[arg(long, default_value = "1/2")]
        to: String,
    },
}

#[derive(Debug, Subcommand, Serialize)]
pub enum OracleCmd {
    /// `Op_τ₁(a) u` against `Op_τ₂(a_τ₂) u` on Hermite expansions.
    Compare {
        #[arg(long)]
        symbol: PathBuf,
        #[arg(long, default_value = "0")]
        tau: String,
        #[arg(long, default_value = "1/2")]
        tau2: String,
        #[arg(long = "test", required = true)]
        tests: Vec<String>,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Grid quadrature of `Op_τ(a) u` against the ladder oracle.
    GridApply {
        #[arg(long)]
        symbol: PathBuf,
        #[arg(long, default_value = "0")]
        tau: String,
        #[arg(long = "test")]
        test: String,
        #[arg(long, default_value = "n=1024,xmax=12")]
        grid: String,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
}

#[derive(Debug, Subcommand, Serialize)]
pub enum SuiteCmd {
    All {
        /// Run only these criteria.
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
    },
}

/// Distinguishes configuration errors (exit 2) from failed checks.
#[derive(Debug)]
pub enum Outcome {
    Done(Report),
    Config(anyhow::Error),
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        match self {
            Outcome::Done(r) if r.passed() => 0,
            Outcome::Done(_) => 1,
            Outcome::Config(_) => 2,
        }
    }
}

/// Runs the command and writes its outputs; never panics on bad input.
pub fn run(cli: &Cli) -> Outcome {
    let config = serde_json::to_value(cli).unwrap_or(Value::Null);
    match dispatch(cli, config) {
        Ok(r) => Outcome::Done(r),
        Err(e) => Outcome::Config(e),
    }
}

/// Parses `args`, runs, prints the summary and returns the exit code.
pub fn main_with_args<I, T>(args: I, out: &mut dyn std::io::Write, errout: &mut dyn std::io::Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(errout, "{e}");
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let outcome = run(&cli);
    match &outcome {
        Outcome::Done(r) => {
            if let Err(e) = r.emit(out, cli.report.as_deref()) {
                let _ = writeln!(errout, "error: writing report: {e}");
                return 2;
            }
        }
        Outcome::Config(e) => {
            let _ = writeln!(errout, "error: {e:#}");
        }
    }
    outcome.exit_code()
}

fn dispatch(cli: &Cli, config: Value) -> Result<Report> {
    let seed = cli.seed;
    match &cli.command {
        Command::Weights(c) => weights(c, seed, config),
        Command::Symbol(c) => symbol(c, seed, config),
        Command::Calc(c) => calc(c, seed, config),
        Command::Parametrix(c) => parametrix(c, seed, config),
        Command::Hypo(c) => hypo(c, seed, config),
        Command::Oracle(c) => oracle(c, seed, config),
        Command::Suite(SuiteCmd::All { only }) => {
            let ids: Vec<u8> = if only.is_empty() { (1..=11).collect() } else { only.clone() };
            if let Some(bad) = ids.iter().find(|i| !(1..=11).contains(*i)) {
                bail!("suite all: no criterion {bad}");
            }
            let results: Vec<_> = ids.iter().map(|&i| suite::run_criterion(i, seed)).collect();
            let mut r = Report::new("suite all", seed, config);
            for c in &results {
                r.check(format!("{:>2} {}", c.id, c.name), c.passed, format!("{} ({:.2}s)", c.detail, c.elapsed));
            }
            Ok(r.with_data(json!(results)))
        }
    }
}

fn weight(spec: &str) -> Result<WeightFunction> {
    spec.parse().with_context(|| format!("weight spec {spec:?}"))
}

fn tau(s: &str) -> Result<TauParams> {
    TauParams::parse(s).with_context(|| format!("tau {s:?}"))
}

fn load(path: &Path) -> Result<(SymbolFile, LoadedSymbol)> {
    Ok(load_symbol(path)?)
}

fn load_poly(path: &Path) -> Result<PolySymbol<Exact>> {
    match load(path)?.1 {
        LoadedSymbol::Poly(p) => Ok(p),
        _ => bail!("{}: a polynomial symbol is required", path.display()),
    }
}

fn load_quantized(path: &Path, tau_override: Option<&str>, conv: Option<Conv>) -> Result<QuantizedSymbol<Exact>> {
    let (file, _) = load(path)?;
    let t = tau_override.map(tau).transpose()?;
    let mut q = file.to_quantized(&path.display().to_string(), t.as_ref())?;
    if let Some(c) = conv {
        q.convention = match c {
            Conv::Normalized => Convention::Normalized,
            Conv::Paper => Convention::Paper,
        };
    }
    Ok(q)
}

fn write_symbol(file: &SymbolFile, out: Option<&Path>) -> Result<Value> {
    if let Some(p) = out {
        file.write(p)?;
    }
    Ok(serde_json::to_value(file)?)
}

/// Float view of a loaded symbol for sampling.
fn point_symbol(s: &LoadedSymbol) -> Result<Box<dyn PointSymbol + Sync>> {
    Ok(match s {
        LoadedSymbol::Poly(p) => Box::new(p.to_float()),
        LoadedSymbol::Rational(r) => Box::new(r.to_float()),
        LoadedSymbol::Expr(e) => Box::new(e.clone()),
        LoadedSymbol::Amplitude(_) => bail!("amplitudes must be reduced before sampling"),
    })
}

fn weights(c: &WeightsCmd, seed: u64, config: Value) -> Result<Report> {
    match c {
        WeightsCmd::Check { weight: spec, samples } => {
            let w = weight(spec)?;
            let a = verify_weight_axioms(&w, *samples)?;
            let mut r = Report::new("weights check", seed, config);
            r.check(
                "monotone, vanishing on [0,1]",
                a.monotone_violations == 0,
                format!("{} violations", a.monotone_violations),
            )
            .check("convexity of phi", a.convexity_violations == 0, format!("{} violations", a.convexity_violations))
            .check("alpha (doubling)", a.alpha_ok, format!("L fit {:.6}", a.l_fit))
            .check("beta (integrability)", a.beta_ok, "")
            .check("gamma (log growth)", a.gamma_ok, "");
            if let Some(v) = &a.first_violation {
                r.check("first violation", false, v.clone());
            }
            Ok(r.with_data(json!({
                "l_fit": a.l_fit, "l_closed": a.l_closed,
                "beta_partials": a.beta_partials, "gamma_ratios": a.gamma_ratios,
            })))
        }
        WeightsCmd::Conj { weight: spec, y, method } => {
            let w = weight(spec)?;
            let m = match method {
                Method::Auto => ConjugateMethod::Auto,
                Method::Closed => ConjugateMethod::ClosedForm,
                Method::Numeric => ConjugateMethod::NumericMax,
            };
            let conj = YoungConjugate::new(w.clone(), m);
            let values: Vec<(f64, f64)> = y.iter().map(|&v| (v, conj.eval(v))).collect();
            let rep = verify_conjugate_inequalities(&w, &ConjugateGrid { seed, ..ConjugateGrid::default() });
            let mut r = Report::new("weights conj", seed, config);
            r.check("phi*(0) = 0", conj.eval(0.0) == 0.0, "")
                .check(
                    "conjugate inequality (1)",
                    rep.lemma1_violations == 0,
                    format!("{}/{} ok", rep.lemma1_checked - rep.lemma1_violations, rep.lemma1_checked),
                )
                .check(
                    "conjugate inequality (2)",
                    rep.lemma2_violations == 0,
                    format!("{}/{} ok", rep.lemma2_checked - rep.lemma2_violations, rep.lemma2_checked),
                )
                .check(
                    "weight splitting (1)",
                    rep.nota1_violations == 0,
                    format!("{} violations", rep.nota1_violations),
                )
                .check(
                    "weight splitting (2)",
                    rep.nota2_violations == 0,
                    format!("{} violations", rep.nota2_violations),
                );
            let prop: Vec<Value> = rep
                .prop
                .iter()
                .map(|p| json!({"b": p.b, "c": p.c, "argmax": p.argmax, "stabilized": p.stabilized}))
                .collect();
            for p in &rep.prop {
                r.check(
                    format!("factorial bound B={}", p.b),
                    true,
                    format!("C = {:.4e}, argmax n = {}, stabilized {}", p.c, p.argmax, p.stabilized),
                );
            }
            Ok(r.with_data(json!({"values": values, "lemma_l": rep.lemma_l, "prop": prop})))
        }
    }
}

fn symbol(c: &SymbolCmd, seed: u64, config: Value) -> Result<Report> {
    match c {
        SymbolCmd::Derive { symbol, dx, dxi, kind, out } => {
            let (_, s) = load(symbol)?;
            let k = match kind {
                Kind::Partial => DerivKind::Partial,
                Kind::D => DerivKind::D,
            };
            let (ax, bx) = (MultiIndex(dx.clone()), MultiIndex(dxi.clone()));
            let file = match &s {
                LoadedSymbol::Poly(p) => {
                    check_len(p.dim(), &ax, &bx)?;
                    SymbolFile::from_poly(&p.derive(&ax, &bx, k))
                }
                LoadedSymbol::Rational(q) => {
                    check_len(q.dim(), &ax, &bx)?;
                    SymbolFile::from_rational(&q.derive(&ax, &bx, k))
                }
                _ => bail!("derive needs a polynomial or rational symbol"),
            };
            let data = write_symbol(&file, out.as_deref())?;
            let mut r = Report::new("symbol derive", seed, config);
            r.check("derivative written", true, out.as_ref().map(|p| p.display().to_string()).unwrap_or_default());
            Ok(r.with_data(data))
        }
        SymbolCmd::Classfit { symbol, weight: spec, m, rho, n, max_order, region } => {
            let w = weight(spec)?;
            let (_, s) = load(symbol)?;
            let a = point_symbol(&s)?;
            let opts = ClassFitOptions {
                m: *m,
                rho: *rho,
                ns: n.clone(),
                max_order: *max_order,
                region: parse_region(region, seed)?,
            };
            let fit = estimate_class_constants(a.as_ref(), &w, &opts)?;
            let mut r = Report::new("symbol classfit", seed, config);
            for (n, c) in fit.ns.iter().zip(&fit.c_n) {
                r.check(format!("C_{n}"), c.is_finite(), format!("{c:.6e}"));
            }
            r.check("bounded on all shells", !fit.diverging, "");
            Ok(r.with_data(json!({"ns": fit.ns, "c_n": fit.c_n, "per_shell": fit.per_shell, "witness": fit.witness})))
        }
        SymbolCmd::Reduce { symbol, tau: t, out } => {
            let LoadedSymbol::Amplitude(amp) = load(symbol)?.1 else {
                bail!("{}: an amplitude symbol is required", symbol.display());
            };
            let t = tau(t)?;
            let grades = amplitude_reduce(&amp, t.tau());
            let sum = grades.iter().fold(PolySymbol::zero(amp.dim()), |acc, g| acc.add(g));
            let q = QuantizedSymbol::new(sum, t, Convention::Normalized);
            let data = write_symbol(&SymbolFile::from_quantized(&q), out.as_deref())?;
            let mut r = Report::new("symbol reduce", seed, config);
            r.check(
                "amplitude reduced",
                true,
                format!("{} nonzero grades", grades.iter().filter(|g| !g.is_zero()).count()),
            );
            Ok(r.with_data(data))
        }
    }
}

fn check_len(d: usize, a: &MultiIndex, b: &MultiIndex) -> Result<()> {
    if a.dim() != d || b.dim() != d {
        bail!("derivative multi-indices must have length {d}");
    }
    Ok(())
}

fn calc(c: &CalcCmd, seed: u64, config: Value) -> Result<Report> {
    let emit = |name: &str, q: &QuantizedSymbol<Exact>, output: &Output, config: Value| -> Result<Report> {
        let data = write_symbol(&SymbolFile::from_quantized(q), output.out.as_deref())?;
        let mut r = Report::new(format!("calc {name}"), seed, config);
        r.check(
            "symbol computed",
            true,
            format!("tau = {}, {} terms", format_rational(q.tau.tau()), q.symbol.terms().count()),
        );
        Ok(r.with_data(data))
    };
    match c {
        CalcCmd::ChangeQuant { symbol, from, to, output } => {
            let q = load_quantized(symbol, from.as_deref(), output.convention)?;
            emit("change-quant", &q.change_quantization(&tau(to)?), output, config)
        }
        CalcCmd::Transpose { symbol, tau: t, output } => {
            let q = load_quantized(symbol, t.as_deref(), output.convention)?;
            emit("transpose", &q.transpose(), output, config)
        }
        CalcCmd::Compose { symbol, with, tau: t, tau1, tau2, target, output } => {
            let res = match (t, target) {
                (Some(t), _) => {
                    let a = load_quantized(symbol, Some(t), output.convention)?;
                    let b = load_quantized(with, Some(t), output.convention)?;
                    a.compose(&b)?
                }
                (None, Some(target)) => {
                    let a = load_quantized(symbol, tau1.as_deref(), output.convention)?;
                    let b = load_quantized(with, tau2.as_deref(), output.convention)?;
                    a.compose_general(&b, &tau(target)?)?
                }
                (None, None) => bail!("compose needs --tau, or --target with --tau1/--tau2"),
            };
            emit("compose", &res, output, config)
        }
        CalcCmd::Weyl { symbol, with, output } => {
            let a = load_quantized(symbol, Some("1/2"), output.convention)?;
            let b = load_quantized(with, Some("1/2"), output.convention)?;
            emit("weyl", &a.weyl_compose(&b)?, output, config)
        }
        CalcCmd::Identities { vandermonde, bbr_dim, bbr_order } => {
            if *bbr_dim == 0 || *bbr_dim > 3 {
                bail!("identities: bbr-dim must lie in 1..=3, got {bbr_dim}");
            }
            let rep = combinatorial_identity_check(*vandermonde, *bbr_dim, *bbr_order);
            let mut r = Report::new("calc identities", seed, config);
            r.check(
                "vandermonde",
                rep.vandermonde_violations == 0,
                format!("{} checked, {} violations", rep.vandermonde_checked, rep.vandermonde_violations),
            )
            .check(
                "bbr",
                rep.bbr_violations == 0,
                format!("{} checked, {} violations", rep.bbr_checked, rep.bbr_violations),
            );
            Ok(r.with_data(json!({"first_counterexample": rep.first_counterexample})))
        }
    }
}

fn parse_ks(s: &str) -> Result<std::ops::RangeInclusive<i32>> {
    let (a, b) = s.split_once("..").ok_or_else(|| anyhow!("ks: expected lo..hi, got {s:?}"))?;
    let (a, b): (i32, i32) = (a.trim().parse()?, b.trim().parse()?);
    if b - a < 1 {
        bail!("ks: need at least two shells");
    }
    Ok(a..=b)
}

fn parametrix(c: &ParametrixCmd, seed: u64, config: Value) -> Result<Report> {
    let build = |a: &ParametrixArgs| -> Result<(PolySymbol<Exact>, psdo_core::parametrix::ParametrixResult)> {
        let p = load_poly(&a.symbol)?;
        let res = parametrix_terms(&p, tau(&a.tau)?.tau(), a.order)?;
        Ok((p, res))
    };
    match c {
        ParametrixCmd::Build { args, out } => {
            let (_, res) = build(args)?;
            let terms: Vec<SymbolFile> = res.terms.iter().map(SymbolFile::from_rational).collect();
            let data = json!({"tau": format_rational(&res.tau), "terms": terms});
            if let Some(p) = out {
                std::fs::write(p, serde_json::to_string_pretty(&data)? + "\n")
                    .with_context(|| format!("writing {}", p.display()))?;
            }
            let mut r = Report::new("parametrix build", seed, config);
            r.check(
                "terms q_0..q_N",
                true,
                format!("{} terms, certification {:?}", res.terms.len(), res.certification),
            );
            Ok(r.with_data(data))
        }
        ParametrixCmd::Verify { args } => {
            let (p, res) = build(args)?;
            let v = parametrix_verify(&res, &p)?;
            let n = res.order();
            let mut r = Report::new("parametrix verify", seed, config);
            r.check("r_0 = 1", v.r0_is_one, "");
            let bad: Vec<usize> = v.nonzero.iter().map(|(j, _)| *j).collect();
            let label = if n == 0 { "no higher grades".to_string() } else { format!("r_1..r_{n} = 0") };
            r.check(
                label,
                bad.is_empty(),
                if bad.is_empty() { String::new() } else { format!("nonzero grades {bad:?}") },
            );
            let nonzero: Vec<Value> =
                v.nonzero.iter().map(|(j, num)| json!({"j": j, "numerator": SymbolFile::from_poly(num)})).collect();
            Ok(r.with_data(json!({"order": n, "nonzero": nonzero})))
        }
        ParametrixCmd::Decay { args, rho, ks, dirs } => {
            let (p, res) = build(args)?;
            let d = residual_decay(&res, &p, *rho, parse_ks(ks)?, *dirs, seed)?;
            let mut r = Report::new("parametrix decay", seed, config);
            r.check(
                format!("slope of r_{} <= {:.2}", d.order + 1, d.threshold),
                d.passes,
                if d.identically_zero {
                    "remainder vanishes identically".to_string()
                } else {
                    format!("slope {:.4}", d.slope)
                },
            );
            let slope = if d.slope.is_finite() { json!(d.slope) } else { Value::Null };
            Ok(r.with_data(
                json!({"brackets": d.brackets, "maxima": d.maxima, "slope": slope, "threshold": d.threshold}),
            ))
        }
    }
}

fn hypo_params(a: &HypoArgs, w: &WeightFunction) -> Result<HypoParams> {
    let sigma = match &a.sigma {
        Some(s) => weight(s)?,
        None => HypoParams::default_sigma(w, a.rho)?,
    };
    Ok(HypoParams::new(a.m, a.m0.unwrap_or(a.m), a.rho, a.r, sigma, a.n)?)
}

fn hypo_checks(r: &mut Report, label: &str, h: &HypoReport) {
    r.check(format!("{label}lower bound (i)"), h.lower_bounded, format!("C1 = {:.4e}", h.c1))
        .check(
            format!("{label}derivative bound (ii)"),
            h.derivative_bounded,
            format!("best (n, C) = ({}, {:.4e})", h.best.0, h.best.1),
        )
        .check(format!("{label}sigma relation"), h.sigma_ok, "");
}

fn hypo_data(h: &HypoReport) -> Value {
    json!({
        "c1": h.c1, "c2": h.c2, "upper_bounded": h.upper_bounded,
        "lower_per_shell": h.lower_per_shell, "upper_per_shell": h.upper_per_shell,
        "derivative_fits": h.derivative_fits, "derivative_per_shell": h.derivative_per_shell,
        "witness": h.witness.as_ref().map(|w| json!({"point": w.point, "value": w.value, "profile": w.profile})),
    })
}

fn hypo(c: &HypoCmd, seed: u64, config: Value) -> Result<Report> {
    match c {
        HypoCmd::Check { args } => {
            let w = weight(&args.weight)?;
            let hp = hypo_params(args, &w)?;
            let (_, s) = load(&args.symbol)?;
            let a = point_symbol(&s)?;
            let h = check_hypoelliptic(a.as_ref(), &w, &hp, &parse_region(&args.region, seed)?, args.max_order)?;
            let mut r = Report::new("hypo check", seed, config);
            hypo_checks(&mut r, "", &h);
            Ok(r.with_data(hypo_data(&h)))
        }
        HypoCmd::Invariance { args, from, to } => {
            let w = weight(&args.weight)?;
            let hp = hypo_params(args, &w)?;
            let a = load_poly(&args.symbol)?;
            let inv = hypo_invariance_check(
                &a,
                tau(from)?.tau(),
                tau(to)?.tau(),
                &w,
                &hp,
                &parse_region(&args.region, seed)?,
                args.max_order,
            )?;
            let mut r = Report::new("hypo invariance", seed, config);
            hypo_checks(&mut r, "before: ", &inv.before);
            r.check("after: lower bound (i)", inv.after.lower_bounded, format!("C1 ratio {:.4}", inv.lower_ratio));
            Ok(r.with_data(json!({
                "correction": SymbolFile::from_poly(&inv.correction),
                "lower_ratio": inv.lower_ratio,
                "before": hypo_data(&inv.before),
                "after": hypo_data(&inv.after),
            })))
        }
    }
}

fn oracle(c: &OracleCmd, seed: u64, config: Value) -> Result<Report> {
    match c {
        OracleCmd::Compare { symbol, tau: t1, tau2, tests, tol } => {
            let a = load_poly(symbol)?;
            let (t1, t2) = (tau(t1)?, tau(tau2)?);
            let b = psdo_core::calculus::change_quantization(&a, t1.tau(), t2.tau());
            let (oa, ob) = (quantize_to_operator(&a, t1.tau()), quantize_to_operator(&b, t2.tau()));
            let mut r = Report::new("oracle compare", seed, config);
            let mut data = Vec::new();
            for spec in tests {
                let u = parse_test_function(spec)?;
                if u.dim() != a.dim() {
                    bail!("test function {spec:?} has dimension {}, symbol has {}", u.dim(), a.dim());
                }
                let (x, y) = (oa.apply(&u)?, ob.apply(&u)?);
                let e = x.sub(&y).norm() / x.norm().max(y.norm()).max(1.0);
                r.check(spec.to_string(), e <= *tol, format!("relative error {e:.3e}"));
                data.push(json!({"test": spec, "error": e, "result": expansion_records(&x)}));
            }
            Ok(r.with_data(json!(data)))
        }
        OracleCmd::GridApply { symbol, tau: t, test, grid, tol } => {
            let a = load_poly(symbol)?;
            let t = tau(t)?;
            let spec: GridSpec = grid.parse()?;
            let u = parse_test_function(test)?;
            if a.dim() != 1 || u.dim() != 1 {
                bail!("grid-apply works in one dimension");
            }
            let g = GridFunction::from_expansion(&spec, &u);
            let out = grid_apply_op_tau(&a.to_float(), t.tau(), &g)?;
            let oracle = GridFunction::from_expansion(&spec, &quantize_to_operator(&a, t.tau()).apply(&u)?);
            let e = out.max_diff(&oracle) / oracle.max_abs().max(1.0);
            let mut r = Report::new("oracle grid-apply", seed, config);
            r.check("grid vs ladder oracle", e <= *tol, format!("relative max error {e:.3e} at N = {}", spec.n));
            let values: Vec<[f64; 2]> = out.values.iter().map(|v: &Complex64| [v.re, v.im]).collect();
            Ok(r.with_data(json!({"x0": out.x0, "h": out.h, "values": values, "error": e})))
        }
    }
}
