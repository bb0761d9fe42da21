//! The `fhc` command-line front end.
//!
//! Exit codes: `0` everything passed, `1` a verification failed (or a run
//! error occurred), `2` usage error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::analysis::{
    block_bound_check, eval_circle, glue_check, glue_constant, growth_report, heat_kernel_mass, lambda_table,
    lemma_sum_check, loglinear_check, radius_grid, radius_grid_between, stirling_checks,
};
use crate::construction::{p1_schedule, SparseCoeffStream};
use crate::enumeration::{parse_overrides, ConstructionParams, Enumerator, Mode, PhiSchedule};
use crate::error::{FhcError, Result};
use crate::exponent::Exponent;
use crate::hypercyclicity::{lower_bound_probe, visit_density, visit_reports};
use crate::kernel_polys::{
    poly_pnorm, rudin_shapiro_bound, rudin_shapiro_poly, vallee_poussin_bound, vallee_poussin_poly,
};
use crate::source::{ExpSeries, SparseSeries, SumSeries};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "fhc", version, about = "Build and verify an optimally growing frequently hypercyclic entire function")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Norms and ±1 counts of the block polynomials.
    Polys(PolysArgs),
    /// Numerical checks of the inequalities behind the growth bound.
    Verify(VerifyArgs),
    /// Construct the function and run the full suite.
    BuildAndCheck(BuildArgs),
    /// Dump a window of Taylor coefficients as exact rationals.
    Coeffs(CoeffsArgs),
    /// Visit density of one class.
    Density(DensityArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Family {
    Rs,
    Vp,
}

#[derive(Args, Debug)]
struct PolysArgs {
    #[arg(long, value_enum)]
    family: Family,
    /// Inclusive range `a..b` or a single value.
    #[arg(long)]
    m: String,
    /// Comma-separated exponents; `inf` allowed.
    #[arg(long, default_value = "inf")]
    p: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Selector {
    Sum,
    Loglinear,
    Stirling,
    Heat,
    Glue,
    All,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(value_enum)]
    selector: Selector,
    #[arg(long, default_value = "1..50")]
    m: String,
    #[arg(long, default_value = "0,0.25,0.5,0.75,1")]
    a: String,
    #[arg(long, default_value = "1..512")]
    n: String,
    #[arg(long, default_value = "2..100")]
    x: String,
    /// Largest radius for the glue check.
    #[arg(long, default_value_t = 400.0)]
    r_max: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Settings shared by the construction commands; flags override the
/// config file, which overrides the defaults.
#[derive(Args, Debug, Default)]
struct ConfigArgs {
    /// Flat JSON object with any `RunConfig` fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    p: Option<String>,
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    r_max: Option<f64>,
    #[arg(long)]
    horizon: Option<u64>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[arg(long)]
    precision_bits: Option<u32>,
    /// Override file for the leading target pairs.
    #[arg(long)]
    overrides: Option<PathBuf>,
    #[arg(long)]
    k_max: Option<u32>,
    #[arg(long)]
    phi_scale: Option<f64>,
}

#[derive(Args, Debug)]
struct BuildArgs {
    #[command(flatten)]
    cfg: ConfigArgs,
}

#[derive(Args, Debug)]
struct CoeffsArgs {
    #[command(flatten)]
    cfg: ConfigArgs,
    #[arg(long)]
    lo: u64,
    #[arg(long)]
    hi: u64,
    #[arg(long)]
    nonzero: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct DensityArgs {
    #[command(flatten)]
    cfg: ConfigArgs,
    #[arg(long)]
    k: u32,
}

/// Run settings for the construction commands.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub p: String,
    pub c: f64,
    pub gamma: f64,
    pub mode: String,
    pub r_max: f64,
    pub horizon: u64,
    pub samples: usize,
    pub out_dir: PathBuf,
    pub precision_bits: u32,
    pub overrides: Option<PathBuf>,
    pub k_max: u32,
    pub phi_scale: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            p: "inf".into(),
            c: 1.0,
            gamma: 10.0,
            mode: "standard".into(),
            r_max: 2.0e4,
            horizon: 2000 * 2000,
            samples: 256,
            out_dir: PathBuf::from("fhc-out"),
            precision_bits: 53,
            overrides: None,
            k_max: 4,
            phi_scale: 1.0,
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| FhcError::InvalidArgument(format!("config: {e}")))
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [self.c, self.gamma, self.r_max, self.phi_scale];
        if positive.iter().any(|v| !(v.is_finite() && *v > 0.0)) || self.horizon == 0 || self.samples == 0 || self.k_max == 0 {
            return Err(FhcError::InvalidArgument("numeric settings must be positive".into()));
        }
        if !matches!(self.mode.as_str(), "standard" | "p1") {
            return Err(FhcError::InvalidArgument(format!("mode must be standard or p1, got {}", self.mode)));
        }
        if !matches!(self.precision_bits, 53 | 106) {
            return Err(FhcError::InvalidArgument(format!(
                "precision_bits must be 53 or 106, got {}",
                self.precision_bits
            )));
        }
        self.exponent()?;
        Ok(())
    }

    pub fn exponent(&self) -> Result<Exponent> {
        self.p.parse()
    }

    pub fn params(&self) -> Result<ConstructionParams> {
        match self.mode.as_str() {
            "p1" => ConstructionParams::p1(PhiSchedule { scale: self.phi_scale, ..PhiSchedule::default() }),
            _ => ConstructionParams::standard(self.exponent()?, self.c, self.gamma),
        }
    }

    pub fn stream(&self) -> Result<SparseCoeffStream> {
        let enumerator = match &self.overrides {
            Some(path) => Enumerator::with_overrides(parse_overrides(&fs::read_to_string(path)?)?)?,
            None => Enumerator::new(),
        };
        SparseCoeffStream::new(self.params()?, enumerator)
    }
}

fn resolve(args: &ConfigArgs) -> Result<RunConfig> {
    let mut cfg = match &args.config {
        Some(path) => RunConfig::from_json(&fs::read_to_string(path)?)?,
        None => RunConfig::default(),
    };
    macro_rules! take {
        ($($f:ident),*) => { $( if let Some(v) = &args.$f { cfg.$f = v.clone(); } )* };
    }
    take!(p, c, gamma, mode, r_max, horizon, samples, out_dir, precision_bits, k_max, phi_scale);
    if args.overrides.is_some() {
        cfg.overrides = args.overrides.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn parse_range(s: &str) -> Result<(u64, u64)> {
    let bad = || FhcError::InvalidArgument(format!("bad range {s:?}; expected a..b"));
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (a.trim().parse().map_err(|_| bad())?, b.trim().trim_start_matches('=').parse().map_err(|_| bad())?),
        None => {
            let v = s.trim().parse().map_err(|_| bad())?;
            (v, v)
        }
    };
    if lo > hi {
        return Err(bad());
    }
    Ok((lo, hi))
}

fn parse_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(|t| t.trim().parse().map_err(|_| FhcError::InvalidArgument(format!("bad list entry {t:?}"))))
        .collect()
}

fn emit(out: &mut dyn Write, path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn cmd_polys(args: &PolysArgs, out: &mut dyn Write) -> Result<bool> {
    let (lo, hi) = parse_range(&args.m)?;
    if lo == 0 {
        return Err(FhcError::InvalidArgument("m must be at least 1".into()));
    }
    let ps: Vec<Exponent> = parse_list(&args.p)?;
    let mut csv = String::from("m,family,p,norm,bound,ones_count\n");
    let mut ok = true;
    for m in lo..=hi {
        let m = m as usize;
        let (poly, name) = match args.family {
            Family::Rs => (rudin_shapiro_poly(m)?, "rs"),
            Family::Vp => (vallee_poussin_poly(m)?, "vp"),
        };
        for &p in &ps {
            let norm = poly_pnorm(&poly, p)?;
            let (bound, need) = match args.family {
                Family::Rs => (rudin_shapiro_bound(m), m.div_ceil(2)),
                Family::Vp => (vallee_poussin_bound(m, p), m / 4),
            };
            let ones = poly.count_ones();
            ok &= norm.upper <= bound && ones >= need;
            csv.push_str(&format!("{m},{name},{p},{:.12e},{:.12e},{ones}\n", norm.upper, bound));
        }
    }
    emit(out, args.out.as_deref(), &csv)?;
    Ok(ok)
}

fn cmd_verify(args: &VerifyArgs, out: &mut dyn Write) -> Result<bool> {
    let run = |s: Selector| args.selector == s || args.selector == Selector::All;
    let mut report = serde_json::Map::new();
    let mut ok = true;
    if run(Selector::Sum) {
        let (lo, hi) = parse_range(&args.m)?;
        let a_list: Vec<f64> = parse_list(&args.a)?;
        let mut rows = Vec::new();
        for m in lo.max(1)..=hi {
            for &a in &a_list {
                rows.push(lemma_sum_check(m, a)?);
            }
        }
        let pass = rows.iter().all(|r| r.pass);
        ok &= pass;
        let max_ratio = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
        report.insert("sum".into(), json!({ "pass": pass, "max_ratio": max_ratio, "rows": rows }));
    }
    if run(Selector::Loglinear) {
        let (lo, hi) = parse_range(&args.m)?;
        let mut rows = Vec::new();
        for m in lo.max(1)..=hi {
            let (x0, x1) = ((m * m) as f64, ((m + 1) * (m + 1)) as f64);
            for a in [0.0, 0.5, 1.0, 2.0] {
                rows.push(loglinear_check(a, x0, x1, 2000)?);
            }
        }
        let pass = rows.iter().all(|r| r.pass);
        ok &= pass;
        report.insert("loglinear".into(), json!({ "pass": pass, "rows": rows }));
    }
    if run(Selector::Stirling) {
        let (xlo, xhi) = parse_range(&args.x)?;
        let (mlo, mhi) = parse_range(&args.m)?;
        let rep = stirling_checks(mlo.max(1)..=mhi.max(mlo).min(100), xlo.max(2)..=xhi)?;
        ok &= rep.pass;
        report.insert("stirling".into(), serde_json::to_value(&rep)?);
    }
    if run(Selector::Heat) {
        let (lo, hi) = parse_range(&args.n)?;
        let mut rows = Vec::new();
        let mut pass = true;
        for n in lo.max(1)..=hi {
            let t = lambda_table(n)?;
            let h = heat_kernel_mass(n, None)?;
            pass &= t.pass && h.pass;
            rows.push(json!({
                "n": n,
                "max_deviation": t.max_deviation,
                "bound": t.bound,
                "mass": h.mass,
                "min_ln_g": h.min_ln_g,
                "pass": t.pass && h.pass,
            }));
        }
        ok &= pass;
        report.insert("heat".into(), json!({ "pass": pass, "rows": rows }));
    }
    if run(Selector::Glue) {
        let g = SumSeries(ExpSeries, SparseSeries::new([(0, num_complex::Complex64::new(-1.0, 0.0))]));
        let n_max = args.r_max.sqrt().ceil() as u64 + 1;
        let b = glue_constant(&g, 0.0, Exponent::Infinity, n_max)?;
        let rep = glue_check(b, 0.0, Exponent::Infinity, &g, &radius_grid(args.r_max))?;
        ok &= rep.pass;
        report.insert(
            "glue".into(),
            json!({ "pass": rep.pass, "b": b, "max_ratio": rep.max_ratio, "argmax_r": rep.argmax_r }),
        );
    }
    report.insert("pass".into(), json!(ok));
    let text = serde_json::to_string_pretty(&report)? + "\n";
    emit(out, args.out.as_deref(), &text)?;
    Ok(ok)
}

/// Guaranteed constant `C` in `M_{f,p}(r) ≤ C e^r r^{-a}` for the chain
/// through class `k`: `10³·100·ℓ_k·α_k^{-1/2}` (`p ≥ 2`) or
/// `10³·60·ℓ_k·α_k^{-1/p′}` (`p < 2`).
pub fn guaranteed_constant(params: &ConstructionParams, ell: u64, alpha: u128) -> f64 {
    let alpha = alpha as f64;
    match params.family() {
        crate::enumeration::PolyFamily::RudinShapiro => 1e5 * ell as f64 * alpha.powf(-0.5),
        crate::enumeration::PolyFamily::ValleePoussin => 6e4 * ell as f64 * alpha.powf(-params.p.conjugate().reciprocal()),
    }
}

fn cmd_build_and_check(args: &BuildArgs, out: &mut dyn Write) -> Result<bool> {
    let cfg = resolve(&args.cfg)?;
    fs::create_dir_all(&cfg.out_dir)?;
    let mut summary = serde_json::Map::new();
    summary.insert("config".into(), serde_json::to_value(&cfg)?);
    match build_and_check(&cfg, &mut summary, out) {
        Err(FhcError::ResourceExhausted(msg)) => {
            writeln!(out, "truncated: {msg}")?;
            summary.insert("truncated".into(), json!(msg));
            summary.insert("pass".into(), json!(false));
            fs::write(cfg.out_dir.join("summary.json"), serde_json::to_string_pretty(&summary)? + "\n")?;
            Ok(false)
        }
        other => other,
    }
}

fn build_and_check(cfg: &RunConfig, summary: &mut serde_json::Map<String, serde_json::Value>, out: &mut dyn Write) -> Result<bool> {
    let stream = cfg.stream()?;
    let params = *stream.params();
    let p = params.p;
    let a = params.growth_exponent();
    let mut ok = true;

    let mut classes = Vec::new();
    let mut first_nonzero: Option<u64> = None;
    let mut guaranteed: f64 = 0.0;
    for k in 1..=cfg.k_max {
        let (pair, alpha) = stream.class(k)?;
        let first = stream.first_active(k)?;
        let constant = match alpha {
            Some(al) if !pair.poly.is_zero() => {
                if let Some(n) = first {
                    first_nonzero = Some(first_nonzero.map_or(n, |f: u64| f.min(n)));
                }
                let c = guaranteed_constant(&params, pair.ell, al);
                guaranteed = guaranteed.max(c);
                Some(c)
            }
            _ => None,
        };
        classes.push(json!({
            "k": k,
            "q": pair.poly.to_string(),
            "ell": pair.ell,
            "alpha": alpha.map(|v| v.to_string()),
            "first_active": first,
            "guaranteed_constant": constant,
        }));
        if let Some(c) = constant {
            writeln!(out, "class {k}: ell={} alpha={} guaranteed constant {c:.6e}", pair.ell, alpha.unwrap_or(0))?;
        }
    }
    summary.insert("classes".into(), json!(classes));
    let metadata = json!({ "p": p.to_string(), "c": params.c, "gamma": params.gamma, "mode": cfg.mode, "a": a });

    let grid = radius_grid(cfg.r_max);
    let growth = growth_report(&stream, p, a, &grid)?;
    fs::write(cfg.out_dir.join("growth.csv"), growth.to_csv())?;
    fs::write(cfg.out_dir.join("growth.json"), growth.to_json(&metadata)?)?;
    let mut growth_pass = growth.max_ratio_upper <= guaranteed || guaranteed == 0.0 && growth.max_ratio_upper < 1e-9;
    writeln!(out, "growth on grid r <= {}: max ratio {:.6e} (certified {:.6e})", cfg.r_max, growth.max_ratio, growth.max_ratio_upper)?;

    let window = first_nonzero.filter(|n| *n <= 20_000).map(|n| (n.saturating_sub(10).max(1), n + 50));
    let mut window_json = json!(null);
    let mut blocks_json = Vec::new();
    let mut glue_json = json!(null);
    if let Some((m_lo, m_hi)) = window {
        let radii = radius_grid_between(m_lo, m_hi);
        let rep = growth_report(&stream, p, a, &radii)?;
        fs::write(cfg.out_dir.join("window.csv"), rep.to_csv())?;
        growth_pass &= rep.max_ratio_upper <= guaranteed;
        writeln!(out, "growth on window [{m_lo}², {m_hi}²]: max ratio {:.6e} (certified {:.6e})", rep.max_ratio, rep.max_ratio_upper)?;
        window_json = json!({ "m_lo": m_lo, "m_hi": m_hi, "max_ratio": rep.max_ratio, "max_ratio_upper": rep.max_ratio_upper, "convexity_defect": rep.convexity_defect() });

        if !matches!(params.mode, Mode::P1(_)) {
            let mut blocks_pass = true;
            for n in stream.nonzero_blocks(1, m_hi + 1)? {
                let b = block_bound_check(&stream, n, p)?;
                blocks_pass &= b.pass;
                blocks_json.push(serde_json::to_value(&b)?);
            }
            let b = glue_constant(&stream, a, p, m_hi + 1)?;
            let glue = glue_check(b, a, p, &stream, &radii)?;
            ok &= blocks_pass && glue.pass;
            writeln!(out, "block bounds: {}; glue max ratio {:.6e} with b = {b:.6e}", if blocks_pass { "pass" } else { "FAIL" }, glue.max_ratio)?;
            glue_json = json!({ "b": b, "max_ratio": glue.max_ratio, "argmax_r": glue.argmax_r, "pass": glue.pass });
            let probe_ns: Vec<u64> = stream.nonzero_blocks(1, m_hi + 1)?.into_iter().take(3).collect();
            if !probe_ns.is_empty() {
                let probe = lower_bound_probe(&stream, p, a, &probe_ns)?;
                writeln!(out, "lower-bound probe over {:?}: {:.6e}", probe_ns, probe.min)?;
                summary.insert("probe".into(), serde_json::to_value(&probe)?);
            }
        }
    }
    let circle_r = window.map_or(cfg.r_max, |(m_lo, m_hi)| ((m_lo + m_hi) / 2).pow(2) as f64);
    let circle = eval_circle(&stream, circle_r, cfg.samples, cfg.precision_bits)?;
    let mut csv = String::from("theta,re,im,ln_abs_scaled\n");
    for (l, z) in circle.samples.iter().enumerate() {
        let theta = 2.0 * std::f64::consts::PI * l as f64 / cfg.samples as f64;
        let ln_abs = z.norm().ln() + circle.log_scale - circle.r;
        csv.push_str(&format!("{theta:.12e},{:.12e},{:.12e},{ln_abs:.12e}\n", z.re, z.im));
    }
    fs::write(cfg.out_dir.join("circle.csv"), csv)?;
    summary.insert("circle".into(), json!({ "r": circle_r, "log_scale": circle.log_scale, "samples": cfg.samples, "precision_bits": cfg.precision_bits }));
    ok &= growth_pass;
    writeln!(out, "growth constant check: {}", if growth_pass { "pass" } else { "FAIL" })?;
    summary.insert("growth".into(), json!({ "max_ratio": growth.max_ratio, "max_ratio_upper": growth.max_ratio_upper, "guaranteed": guaranteed, "window": window_json, "pass": growth_pass }));
    summary.insert("glue".into(), glue_json);
    fs::write(cfg.out_dir.join("blocks.json"), serde_json::to_string_pretty(&blocks_json)? + "\n")?;

    if let Mode::P1(phi) = params.mode {
        let mut fits = Vec::new();
        for k in 1..=cfg.k_max.min(2) {
            let (pair, _) = stream.class(k)?;
            let fit = p1_schedule(k, &pair, phi, &params)?;
            ok &= fit.max_ratio <= 1.0;
            writeln!(out, "p1 class {k}: extra {} alpha {} max ratio {:.6e}", fit.extra, fit.alpha, fit.max_ratio)?;
            fits.push(fit);
        }
        summary.insert("p1".into(), serde_json::to_value(&fits)?);
    }

    let visits = visit_reports(&stream, cfg.k_max, cfg.samples)?;
    for v in &visits {
        ok &= v.pass;
        writeln!(out, "visit k={} n={} s={}: error {:.3e} <= {:.3e}: {}", v.k, v.n, v.s, v.sup_error, v.tolerance, if v.pass { "pass" } else { "FAIL" })?;
    }
    fs::write(cfg.out_dir.join("visits.json"), serde_json::to_string_pretty(&visits)? + "\n")?;

    let mut densities = Vec::new();
    for k in 1..=cfg.k_max {
        let d = visit_density(&stream, k, cfg.horizon)?;
        ok &= d.pass;
        densities.push(json!({ "k": k, "visits": d.visits, "density": d.density, "blocks": d.blocks.len(), "pass": d.pass }));
    }
    fs::write(cfg.out_dir.join("density.json"), serde_json::to_string_pretty(&densities)? + "\n")?;
    summary.insert("pass".into(), json!(ok));
    fs::write(cfg.out_dir.join("summary.json"), serde_json::to_string_pretty(&summary)? + "\n")?;
    writeln!(out, "overall: {}", if ok { "pass" } else { "FAIL" })?;
    Ok(ok)
}

fn cmd_coeffs(args: &CoeffsArgs, out: &mut dyn Write) -> Result<bool> {
    let cfg = resolve(&args.cfg)?;
    let stream = cfg.stream()?;
    if args.lo > args.hi {
        return Err(FhcError::InvalidArgument("lo must not exceed hi".into()));
    }
    let mut buf = Vec::new();
    stream.write_csv(args.lo, args.hi, args.nonzero, &mut buf)?;
    emit(out, args.out.as_deref(), std::str::from_utf8(&buf).expect("csv is utf-8"))?;
    Ok(true)
}

fn cmd_density(args: &DensityArgs, out: &mut dyn Write) -> Result<bool> {
    let cfg = resolve(&args.cfg)?;
    let stream = cfg.stream()?;
    let rep = visit_density(&stream, args.k, cfg.horizon)?;
    writeln!(out, "{}", serde_json::to_string_pretty(&rep)?)?;
    Ok(rep.pass)
}

/// Caps the global thread pool from `FHC_THREADS`, once per process.
pub fn init_threads() {
    if let Some(n) = std::env::var("FHC_THREADS").ok().and_then(|v| v.parse::<usize>().ok()).filter(|n| *n > 0) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

/// Parses `args` (including the program name) and runs the command,
/// writing reports to `out` and diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if e.use_stderr() { write!(err, "{}", e.render()) } else { write!(out, "{}", e.render()) };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Polys(a) => cmd_polys(a, out),
        Command::Verify(a) => cmd_verify(a, out),
        Command::BuildAndCheck(a) => cmd_build_and_check(a, out),
        Command::Coeffs(a) => cmd_coeffs(a, out),
        Command::Density(a) => cmd_density(a, out),
    };
    match result {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_FAIL,
        Err(FhcError::InvalidArgument(msg)) | Err(FhcError::Parse { msg, .. }) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_FAIL
        }
    }
}
