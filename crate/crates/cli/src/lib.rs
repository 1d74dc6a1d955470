//! Command-line front end and the a_ℓ text cache.

pub mod cache;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use falsetate::elliptic::{compute_periods, EllipticCurveModel, PeriodPair};
use falsetate::gauss::{tau_sigma_suite, tau_vs_epsilon_suite, IdentityCheck, TauConvention};
use falsetate::lfun::spec::{ap_table, seed_ap_table};
use falsetate::lfun::{assemble_spec, evaluate_l, CoeffSource, LFunctionSpec};
use falsetate::real::{MpFloat, Real};
use falsetate::reps::{classify_irreps, ArtinRepFT, DirichletChar};
use falsetate::verify::{
    bsd_quotient, compute_r, period_ratio_check, CurveData, Params, Status, Subfield, VerificationReport, VerifyError,
};
use serde::Serialize;
use thiserror::Error;

pub const CACHE_ENV: &str = "FALSETATE_CACHE_DIR";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("UNSUPPORTED: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Verify(#[from] VerifyError),
    #[error(transparent)]
    Cache(#[from] cache::CacheError),
    #[error("{0}")]
    Other(String),
}

#[derive(Debug, Parser)]
#[command(
    name = "falsetate",
    about = "Special values of elliptic curve L-functions twisted by Artin representations of the false Tate tower"
)]
pub struct Cli {
    #[command(flatten)]
    pub config: RunConfig,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct RunConfig {
    /// Working precision in decimal digits (escalation uses digits + 15).
    #[arg(long, global = true, default_value_t = 25, value_parser = clap::value_parser!(u32).range(10..))]
    pub digits: u32,
    /// Height bound for algebraic recognition.
    #[arg(long, global = true, default_value_t = 1_000_000)]
    pub height_bound: u64,
    /// a_ℓ cache directory; defaults to $FALSETATE_CACHE_DIR, then ./.falsetate-cache.
    #[arg(long, global = true)]
    pub cache_dir: Option<PathBuf>,
    /// Write the JSON result here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn params(&self) -> Params {
        Params { lo: self.digits, hi: self.digits + 15, height: self.height_bound }
    }

    pub fn cache_dir(&self) -> PathBuf {
        self.cache_dir
            .clone()
            .or_else(|| std::env::var_os(CACHE_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(".falsetate-cache"))
    }
}

#[derive(Debug, Clone, Args)]
pub struct CurveArg {
    /// Weierstrass coefficients a1,a2,a3,a4,a6.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, num_args = 1)]
    pub curve: Vec<i64>,
}

impl CurveArg {
    pub fn coeffs(&self) -> Result<[i64; 5], CliError> {
        self.curve.clone().try_into().map_err(|_| CliError::Usage("--curve takes five comma-separated integers".into()))
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Field {
    Q,
    Cyclotomic,
    Pure,
    Galois,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum TauArg {
    Psi,
    PsiBar,
    PsiUnit,
    PsiBarUnit,
}

impl TauArg {
    fn convention(self) -> TauConvention {
        let (conjugate, unit) = match self {
            TauArg::Psi => (false, false),
            TauArg::PsiBar => (true, false),
            TauArg::PsiUnit => (false, true),
            TauArg::PsiBarUnit => (true, true),
        };
        TauConvention { conjugate, unit }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Irreducible representations up to Galois conjugacy.
    Reps {
        #[arg(long, default_value_t = 3)]
        p: u64,
        #[arg(long)]
        m: u64,
        #[arg(long, default_value_t = 1)]
        n_max: u32,
        #[arg(long, default_value_t = 1)]
        k_max: u32,
    },
    /// Frobenius traces a_ℓ for primes ℓ ≤ limit.
    Ap {
        #[command(flatten)]
        curve: CurveArg,
        #[arg(long)]
        limit: u64,
    },
    /// Real and imaginary periods.
    Periods {
        #[command(flatten)]
        curve: CurveArg,
    },
    /// L(s) for a specification file (LFunctionSpec or coefficient-source JSON).
    Lvalue {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        s: f64,
    },
    /// R(E, ρ) with its Galois orbit.
    Deligne {
        #[command(flatten)]
        curve: CurveArg,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        m: u64,
        #[arg(long, default_value_t = 1)]
        n: u32,
        #[arg(long, default_value_t = 1)]
        chi_exp: u64,
        /// Modulus of φ (1 for trivial).
        #[arg(long, default_value_t = 1)]
        phi_modulus: u64,
        /// Exponents of φ on the standard generators.
        #[arg(long, value_delimiter = ',')]
        phi_exps: Vec<u64>,
        /// Corrupt the Euler factor at this split prime.
        #[arg(long)]
        perturb: Option<u64>,
        #[arg(long, value_enum, default_value_t = TauArg::Psi)]
        tau: TauArg,
    },
    /// L(E/F,1)√|Δ_F|/(Ω₊^{r₁+r₂}|Ω₋|^{r₂}) over a subfield of Q(μ₃, m^{1/3}).
    BsdQuotient {
        #[command(flatten)]
        curve: CurveArg,
        #[arg(long, value_enum)]
        field: Field,
        #[arg(long, default_value_t = 2)]
        m: u64,
        #[arg(long, value_enum, default_value_t = TauArg::Psi)]
        tau: TauArg,
    },
    /// Gauss-sum identity suites.
    GaussIdentities {
        #[arg(long, default_value_t = 20)]
        count: usize,
        #[arg(long, default_value_t = 36)]
        max_modulus: u64,
    },
    /// 2iπ³⟨f,f⟩/(Ω₊Ω₋) for d = 1.
    PeriodRatio {
        #[command(flatten)]
        curve: CurveArg,
    },
}

fn emit<T: Serialize>(cfg: &RunConfig, value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Other(e.to_string()))? + "\n";
    match &cfg.out {
        Some(p) => cache::write_atomic(p, text.as_bytes())?,
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| CliError::Other(e.to_string()))?,
    }
    Ok(())
}

fn status_code(s: Status) -> i32 {
    match s {
        Status::Pass => 0,
        Status::Fail | Status::NoRelation => 1,
        Status::Unsupported => 2,
    }
}

fn report(cfg: &RunConfig, r: &VerificationReport) -> Result<i32, CliError> {
    emit(cfg, r)?;
    eprintln!("{:?}", r.status);
    Ok(status_code(r.status))
}

/// Seed the in-process a_ℓ table from the text cache, run, then persist what was counted.
fn with_cache<R>(cfg: &RunConfig, a: [i64; 5], f: impl FnOnce() -> Result<R, CliError>) -> Result<R, CliError> {
    let dir = cfg.cache_dir();
    let e = EllipticCurveModel::new(a).map_err(VerifyError::from)?;
    if let Ok(Some(t)) = cache::read(&dir, a) {
        seed_ap_table(a, t);
    }
    let r = f()?;
    let t = ap_table(&e, 0);
    cache::store(&dir, a, &t)?;
    Ok(r)
}

fn curve_data(cfg: &RunConfig, a: [i64; 5]) -> Result<CurveData, CliError> {
    Ok(CurveData::new(a, cfg.digits, cfg.digits + 15)?)
}

fn load_spec(path: &Path) -> Result<LFunctionSpec, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    if let Ok(s) = serde_json::from_str::<LFunctionSpec>(&text) {
        return Ok(s);
    }
    let src: CoeffSource =
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    Ok(assemble_spec(src).map_err(VerifyError::from)?)
}

#[derive(Serialize)]
struct Suites {
    tau_sigma: Vec<IdentityCheck>,
    tau_vs_epsilon: Vec<IdentityCheck>,
    status: Status,
}

#[derive(Serialize)]
struct Periods {
    curve: [i64; 5],
    conductor: u64,
    omega_plus: String,
    omega_minus_abs: String,
}

#[derive(Serialize)]
struct LValue {
    s: f64,
    digits: u32,
    conductor: u64,
    re: String,
    im: String,
    fe_residual: f64,
    terms_used: usize,
}

pub fn run(cli: Cli) -> Result<i32, CliError> {
    let cfg = &cli.config;
    match &cli.command {
        Command::Reps { p, m, n_max, k_max } => {
            let reps = classify_irreps(*p, *n_max, *k_max, *m).map_err(VerifyError::from)?;
            emit(cfg, &reps)?;
            Ok(0)
        }
        Command::Ap { curve, limit } => {
            let a = curve.coeffs()?;
            let e = EllipticCurveModel::new(a).map_err(VerifyError::from)?;
            let t = cache::get_or_count(&cfg.cache_dir(), &e, *limit)?;
            let mut out = std::io::stdout().lock();
            for (l, ap) in t.primes.iter().zip(&t.ap).filter(|(l, _)| **l <= *limit) {
                writeln!(out, "{l} {ap}").map_err(|e| CliError::Other(e.to_string()))?;
            }
            Ok(0)
        }
        Command::Periods { curve } => {
            let a = curve.coeffs()?;
            let e = EllipticCurveModel::new(a).map_err(VerifyError::from)?;
            let per: PeriodPair<MpFloat> = compute_periods(&e, cfg.digits + 10).map_err(VerifyError::from)?;
            let d = cfg.digits as usize;
            emit(
                cfg,
                &Periods {
                    curve: a,
                    conductor: e.conductor,
                    omega_plus: per.omega_plus.to_decimal(d),
                    omega_minus_abs: per.omega_minus_im.to_decimal(d),
                },
            )?;
            Ok(0)
        }
        Command::Lvalue { spec, s } => {
            let spec = load_spec(spec)?;
            let r = evaluate_l::<MpFloat>(&spec, *s, cfg.digits).map_err(VerifyError::from)?;
            let d = cfg.digits as usize;
            emit(
                cfg,
                &LValue {
                    s: *s,
                    digits: cfg.digits,
                    conductor: spec.conductor,
                    re: r.value.re.to_decimal(d),
                    im: r.value.im.to_decimal(d),
                    fe_residual: r.fe_residual,
                    terms_used: r.terms_used,
                },
            )?;
            Ok(0)
        }
        Command::Deligne { curve, p, m, n, chi_exp, phi_modulus, phi_exps, perturb, tau } => {
            let a = curve.coeffs()?;
            let phi = if *phi_modulus <= 1 {
                DirichletChar::trivial(1)
            } else {
                DirichletChar::new(*phi_modulus, phi_exps.clone()).map_err(VerifyError::from)?
            };
            if *n > 0 && p.checked_pow(*n) != Some(3) {
                return Err(CliError::Unsupported(format!("numerical path needs p^n = 3, got {p}^{n}")));
            }
            let rho = if *n == 0 {
                ArtinRepFT::dirichlet(*p, *m, phi)
            } else {
                ArtinRepFT::induced(*p, *n, *m, *chi_exp, phi).map_err(VerifyError::from)?
            };
            let r = with_cache(cfg, a, || {
                let c = curve_data(cfg, a)?;
                Ok(compute_r(&c, &rho, tau.convention(), *perturb, cfg.params())?)
            })?;
            report(cfg, &r)
        }
        Command::BsdQuotient { curve, field, m, tau } => {
            let a = curve.coeffs()?;
            let f = match field {
                Field::Q => Subfield::Rationals,
                Field::Cyclotomic => Subfield::Cyclotomic,
                Field::Pure => Subfield::Pure { m: *m },
                Field::Galois => Subfield::Galois { m: *m },
            };
            let r = with_cache(cfg, a, || {
                let c = curve_data(cfg, a)?;
                Ok(bsd_quotient(&c, f, tau.convention(), cfg.params())?)
            })?;
            report(cfg, &r)
        }
        Command::GaussIdentities { count, max_modulus } => {
            let g = |e: falsetate::gauss::GaussError| CliError::Verify(e.into());
            let tau_sigma = tau_sigma_suite(*count, *max_modulus, cfg.digits).map_err(g)?;
            let tau_vs_epsilon = tau_vs_epsilon_suite(*count, *max_modulus, cfg.digits).map_err(g)?;
            let ok = tau_sigma.iter().chain(&tau_vs_epsilon).all(|c| c.pass);
            let status = if ok { Status::Pass } else { Status::Fail };
            emit(cfg, &Suites { tau_sigma, tau_vs_epsilon, status })?;
            Ok(status_code(status))
        }
        Command::PeriodRatio { curve } => {
            let a = curve.coeffs()?;
            let r = with_cache(cfg, a, || {
                let c = curve_data(cfg, a)?;
                Ok(period_ratio_check(&c, cfg.params())?)
            })?;
            report(cfg, &r)
        }
    }
}

/// Exit code for a finished run: 0 success/PASS, 1 FAIL, 2 UNSUPPORTED or usage.
pub fn exit_code(r: &Result<i32, CliError>) -> i32 {
    match r {
        Ok(c) => *c,
        Err(CliError::Usage(_)) | Err(CliError::Unsupported(_)) | Err(CliError::Verify(VerifyError::Unsupported)) => 2,
        Err(_) => 1,
    }
}
