//! Command-line front end. Every command writes a CSV or JSON table.
//!
//! Exit codes: 0 success, 2 regime rejection, 3 numerical failure,
//! 4 bad configuration or a request outside the operation's domain.

use crate::ansatz::SpectralPoint;
use crate::coeffs::{classify, CoefficientModel, CriticalParams, ModelSpec};
use crate::error::{Error, Result};
use crate::recurrence::{poly_asymptotic_regular, poly_eval, AcPredictor};
use crate::solutions::{jost, omega_log, JostOptions};
use crate::spectral::{
    amplitude_phase, classify_spectrum, density_sweep, discrete_eigenvalues, resolvent_element, EigenOptions,
};
use crate::volterra::{DEFAULT_CAP, DEFAULT_TOL};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

pub const EXIT_OK: i32 = 0;
pub const EXIT_REGIME: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;
pub const EXIT_CONFIG: i32 = 4;

pub fn exit_code(e: &Error) -> i32 {
    match e {
        e if e.is_regime() => EXIT_REGIME,
        Error::BranchPoint { .. }
        | Error::TruncationTooShort { .. }
        | Error::ZeroCrossing(_)
        | Error::WindowMismatch(_)
        | Error::RefineGrid { .. }
        | Error::EigenvalueHit(_) => EXIT_NUMERIC,
        _ => EXIT_CONFIG,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "critjac", version, about = "Spectral data for Jacobi matrices with power-growing coefficients")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum CommandKind {
    Classify,
    Density,
    Jost,
    Poly,
    Eigs,
    Resolvent,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Regime parameters and spectral classification (JSON).
    Classify(RunArgs),
    /// Spectral density on a λ grid.
    Density(RunArgs),
    /// Jost solution values f_n(z) and Ω(z).
    Jost(RunArgs),
    /// P_n(z) by recurrence next to its large-n asymptotics.
    Poly(RunArgs),
    /// Eigenvalues in [lambda-min, lambda-max] by two methods.
    Eigs(RunArgs),
    /// Resolvent matrix element ⟨R(z)e_n, e_m⟩.
    Resolvent(RunArgs),
}

/// Flags shared by all commands. Anything left unset falls back to the
/// `--config` file, then to the defaults.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct RunArgs {
    /// JSON config file; flags override its entries.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// `laguerre`, `power`, a JSON file, or inline JSON.
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub sigma: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: Option<f64>,
    /// Complex point, e.g. `1+0.5i`, `-2`, `3i`; `1+i0` / `1-i0` for boundary values.
    #[arg(long, allow_hyphen_values = true)]
    pub z: Option<String>,
    #[arg(long = "lambda-min", allow_hyphen_values = true)]
    pub lambda_min: Option<f64>,
    #[arg(long = "lambda-max", allow_hyphen_values = true)]
    pub lambda_max: Option<f64>,
    #[arg(long = "lambda-step")]
    pub lambda_step: Option<f64>,
    #[arg(long)]
    pub n0: Option<usize>,
    /// Volterra truncation index.
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub n_max: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    /// First and last index of the printed window (jost, poly).
    #[arg(long = "n-from", allow_hyphen_values = true)]
    pub n_from: Option<i64>,
    #[arg(long = "n-to")]
    pub n_to: Option<i64>,
    /// Matrix element indices (resolvent).
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub threads: Option<usize>,
}

impl RunArgs {
    /// Flags over file entries.
    pub fn merged(self) -> Result<RunArgs> {
        let file = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
                serde_json::from_str::<RunArgs>(&text)
                    .map_err(|e| Error::Config(format!("bad config {}: {e}", path.display())))?
            }
            None => RunArgs::default(),
        };
        Ok(RunArgs {
            config: self.config,
            model: self.model.or(file.model),
            p: self.p.or(file.p),
            sigma: self.sigma.or(file.sigma),
            alpha: self.alpha.or(file.alpha),
            beta: self.beta.or(file.beta),
            gamma: self.gamma.or(file.gamma),
            z: self.z.or(file.z),
            lambda_min: self.lambda_min.or(file.lambda_min),
            lambda_max: self.lambda_max.or(file.lambda_max),
            lambda_step: self.lambda_step.or(file.lambda_step),
            n0: self.n0.or(file.n0),
            n_max: self.n_max.or(file.n_max),
            tol: self.tol.or(file.tol),
            n_from: self.n_from.or(file.n_from),
            n_to: self.n_to.or(file.n_to),
            n: self.n.or(file.n),
            m: self.m.or(file.m),
            out: self.out.or(file.out),
            format: self.format.or(file.format),
            threads: self.threads.or(file.threads),
        })
    }

    fn jost_options(&self) -> Result<JostOptions> {
        let tol = self.tol.unwrap_or(DEFAULT_TOL);
        if !(tol > 0.0) {
            return Err(Error::Config(format!("tolerance must be positive, got {tol}")));
        }
        Ok(JostOptions { n0: self.n0, n_max: self.n_max, tol, cap: DEFAULT_CAP, short: false })
    }

    fn point(&self) -> Result<SpectralPoint> {
        match &self.z {
            Some(s) => parse_point(s),
            None => match self.lambda_min {
                Some(l) => Ok(SpectralPoint::interior(Complex64::new(l, 0.0))),
                None => Err(Error::Config("--z is required".into())),
            },
        }
    }

    fn grid(&self) -> Result<Vec<f64>> {
        let lo = self.lambda_min.ok_or_else(|| Error::Config("--lambda-min is required".into()))?;
        let hi = self.lambda_max.unwrap_or(lo);
        if !lo.is_finite() || !hi.is_finite() || hi < lo {
            return Err(Error::Config(format!("bad grid [{lo}, {hi}]")));
        }
        if hi == lo {
            return Ok(vec![lo]);
        }
        let step = self.lambda_step.ok_or_else(|| Error::Config("--lambda-step is required".into()))?;
        if !(step > 0.0) || !step.is_finite() {
            return Err(Error::Config(format!("grid step must be positive, got {step}")));
        }
        let count = ((hi - lo) / step + 1e-9).floor() as usize;
        Ok((0..=count).map(|i| lo + i as f64 * step).collect())
    }
}

/// Parses `a`, `a+bi`, `a-bi`, `bi`, and the boundary forms `a+i0`, `a-i0`.
pub fn parse_point(s: &str) -> Result<SpectralPoint> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::Config(format!("cannot parse complex number '{s}'"));
    if let Some(re) = t.strip_suffix("+i0").or_else(|| t.strip_suffix("+0i")) {
        return Ok(SpectralPoint::plus(re.parse().map_err(|_| bad())?));
    }
    if let Some(re) = t.strip_suffix("-i0").or_else(|| t.strip_suffix("-0i")) {
        return Ok(SpectralPoint::minus(re.parse().map_err(|_| bad())?));
    }
    let Some(body) = t.strip_suffix('i') else {
        let re: f64 = t.parse().map_err(|_| bad())?;
        return Ok(SpectralPoint::interior(Complex64::new(re, 0.0)));
    };
    // split at the last sign that is not part of an exponent
    let bytes = body.as_bytes();
    let mut cut = 0;
    for i in (1..bytes.len()).rev() {
        if (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E') {
            cut = i;
            break;
        }
    }
    let (re_s, im_s) = body.split_at(cut);
    let re = if re_s.is_empty() { 0.0 } else { re_s.parse().map_err(|_| bad())? };
    let im = match im_s {
        "" | "+" => 1.0,
        "-" => -1.0,
        x => x.parse().map_err(|_| bad())?,
    };
    Ok(SpectralPoint::interior(Complex64::new(re, im)))
}

pub fn parse_model_spec(text: &str) -> Result<ModelSpec> {
    serde_json::from_str(text).map_err(|e| Error::Config(format!("bad model JSON: {e}")))
}

/// Builds the model from `--model` and the parameter flags.
pub fn resolve_model(args: &RunArgs) -> Result<CoefficientModel> {
    let from_spec = |text: &str| CoefficientModel::from_spec(&parse_model_spec(text)?);
    let name = match &args.model {
        Some(m) if m.trim_start().starts_with('{') => return from_spec(m),
        Some(m) if std::path::Path::new(m).is_file() => {
            let text = std::fs::read_to_string(m).map_err(|e| Error::Config(format!("cannot read {m}: {e}")))?;
            return from_spec(&text);
        }
        Some(m) => m.to_ascii_lowercase(),
        None if args.sigma.is_some() => "power".into(),
        None if args.p.is_some() => "laguerre".into(),
        None => return Err(Error::Config("no model given (use --model, --sigma or --p)".into())),
    };
    match name.as_str() {
        "laguerre" => crate::coeffs::laguerre_model(args.p.unwrap_or(0.0)),
        "power" => {
            let sigma = args.sigma.ok_or_else(|| Error::Config("power model needs --sigma".into()))?;
            let (alpha, beta, gamma) = (args.alpha.unwrap_or(0.0), args.beta.unwrap_or(0.0), args.gamma.unwrap_or(1.0));
            if ![sigma, alpha, beta, gamma].iter().all(|v| v.is_finite()) || alpha <= -1.0 {
                return Err(Error::Config("power model parameters must be finite with alpha > -1".into()));
            }
            Ok(CoefficientModel::power_unchecked(sigma, alpha, beta, gamma))
        }
        other => Err(Error::Config(format!("unknown model '{other}'"))),
    }
}

fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

struct Output {
    text: String,
    code: i32,
}

impl Output {
    fn ok(text: String) -> Self {
        Output { text, code: EXIT_OK }
    }
}

fn cmd_classify(model: &CoefficientModel, params: &CriticalParams) -> Result<Output> {
    let spectrum = classify_spectrum(params);
    let mut report = serde_json::to_value(params).map_err(|e| Error::Config(e.to_string()))?;
    let obj = report.as_object_mut().expect("params serialise to an object");
    obj.insert("model".into(), json!(model.name()));
    obj.insert("ac".into(), json!(spectrum.ac_interval));
    obj.insert("spectrum".into(), serde_json::to_value(&spectrum).expect("serialisable"));
    Ok(Output::ok(serde_json::to_string_pretty(&report).expect("serialisable") + "\n"))
}

fn cmd_density(args: &RunArgs, model: &CoefficientModel, params: &CriticalParams) -> Result<Output> {
    let grid = args.grid()?;
    let opts = args.jost_options()?;
    let rows = density_sweep(&grid, params, model, &opts);
    let code = rows.iter().filter_map(|r| r.as_ref().err()).map(exit_code).max().unwrap_or(EXIT_OK);
    let text = match args.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut s = String::from("lambda,xi,kappa,eta,w\n");
            for (l, r) in grid.iter().zip(&rows) {
                match r {
                    Ok(d) => s += &format!("{},{},{},{},{}\n", fmt(d.lambda), fmt(d.xi), fmt(d.kappa), fmt(d.eta), fmt(d.w)),
                    Err(e) => s += &format!("{},error:{},,,\n", fmt(*l), e.kind()),
                }
            }
            s
        }
        Format::Json => {
            let v: Vec<_> = grid
                .iter()
                .zip(&rows)
                .map(|(l, r)| match r {
                    Ok(d) => serde_json::to_value(d).expect("serialisable"),
                    Err(e) => json!({"lambda": l, "error": e.kind(), "message": e.to_string()}),
                })
                .collect();
            serde_json::to_string_pretty(&v).expect("serialisable") + "\n"
        }
    };
    Ok(Output { text, code })
}

fn cmd_jost(args: &RunArgs, model: &CoefficientModel, params: &CriticalParams) -> Result<Output> {
    let zp = args.point()?;
    let f = jost(&zp, params, model, &args.jost_options()?)?;
    let from = args.n_from.unwrap_or(-1).max(-1);
    let to = args.n_to.unwrap_or(f.hi().min(1000)).min(f.hi());
    let omega = -f.value(-1);
    Ok(Output::ok(match args.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut buf = Vec::new();
            f.write_csv(&mut buf, from, to, 1).map_err(|e| Error::Config(e.to_string()))?;
            String::from_utf8(buf).expect("ascii")
        }
        Format::Json => {
            let values: Vec<_> = (from..=to)
                .map(|n| {
                    let v = f.get(n);
                    json!({"n": n, "log_abs": v.ln_abs(), "phase": v.arg()})
                })
                .collect();
            let report = json!({
                "z": [zp.z.re, zp.z.im], "side": format!("{:?}", zp.side).to_lowercase(),
                "omega": [omega.re, omega.im], "meta": f.meta, "values": values,
            });
            serde_json::to_string_pretty(&report).expect("serialisable") + "\n"
        }
    }))
}

fn cmd_poly(args: &RunArgs, model: &CoefficientModel, params: &CriticalParams) -> Result<Output> {
    let zp = args.point()?;
    let from = args.n_from.unwrap_or(1).max(1) as usize;
    let to = args.n_to.map(|v| v.max(0) as usize).unwrap_or(from + 50).max(from);
    let poly = poly_eval(model, zp.z, to);
    let opts = args.jost_options()?;
    let on_ac = zp.z.im == 0.0 && params.ac_set.contains(zp.z.re);
    let mut s = String::new();
    let mut rows = Vec::new();
    if on_ac {
        let ap = amplitude_phase(zp.z.re, params, model, &opts)?;
        let mut pred = AcPredictor::new(zp.z.re, ap.kappa, ap.eta, params, ap.n_start)?;
        s += "n,poly,asymptotic,residual,envelope\n";
        for n in from..=to {
            let p = poly.value(n as i64).re;
            let a = pred.at(n)?;
            let env = pred.envelope() * (n as f64).powf(-params.rho);
            s += &format!("{},{},{},{},{}\n", n, fmt(p), fmt(a), fmt((p - a).abs()), fmt(env));
            rows.push(json!({"n": n, "poly": p, "asymptotic": a, "residual": (p - a).abs(), "envelope": env}));
        }
    } else {
        let zi = SpectralPoint::interior(zp.z);
        let f = jost(&zi, params, model, &JostOptions { short: true, ..opts })?;
        let omega = (-f.get(-1)).to_complex();
        s += "n,log_abs_poly,phase_poly,log_abs_asymptotic,phase_asymptotic,relative_residual\n";
        for n in from..=to {
            let p = poly.get(n as i64);
            let a = poly_asymptotic_regular(n, &zi, omega, params, f.meta.n0)?;
            let rel = ((p / a).to_complex() - 1.0).norm();
            s += &format!("{},{},{},{},{},{}\n", n, fmt(p.ln_abs()), fmt(p.arg()), fmt(a.ln_abs()), fmt(a.arg()), fmt(rel));
            rows.push(json!({"n": n, "log_abs_poly": p.ln_abs(), "phase_poly": p.arg(),
                "log_abs_asymptotic": a.ln_abs(), "phase_asymptotic": a.arg(), "relative_residual": rel}));
        }
    }
    Ok(Output::ok(match args.format.unwrap_or(Format::Csv) {
        Format::Csv => s,
        Format::Json => serde_json::to_string_pretty(&rows).expect("serialisable") + "\n",
    }))
}

fn cmd_eigs(args: &RunArgs, model: &CoefficientModel, params: &CriticalParams) -> Result<Output> {
    let lo = args.lambda_min.ok_or_else(|| Error::Config("--lambda-min is required".into()))?;
    let hi = args.lambda_max.ok_or_else(|| Error::Config("--lambda-max is required".into()))?;
    let opts = EigenOptions { grid_step: args.lambda_step, jost: args.jost_options()?, ..Default::default() };
    let report = discrete_eigenvalues(lo, hi, params, model, &opts)?;
    Ok(Output::ok(match args.format.unwrap_or(Format::Json) {
        Format::Json => serde_json::to_string_pretty(&report).expect("serialisable") + "\n",
        Format::Csv => {
            let mut s = String::from("index,omega_zero,matrix,deviation\n");
            for (i, e) in report.eigenvalues.iter().enumerate() {
                s += &format!("{},{},{},{}\n", i, fmt(e.omega_zero), fmt(e.matrix), fmt(e.deviation));
            }
            s
        }
    }))
}

fn cmd_resolvent(args: &RunArgs, model: &CoefficientModel, params: &CriticalParams) -> Result<Output> {
    let zp = args.point()?;
    let (n, m) = (args.n.unwrap_or(0), args.m.unwrap_or(0));
    let opts = args.jost_options()?;
    let r = resolvent_element(n, m, &zp, params, model, &opts)?;
    let om = omega_log(&zp, params, model, &JostOptions { short: true, ..opts })?.to_complex();
    Ok(Output::ok(match args.format.unwrap_or(Format::Csv) {
        Format::Csv => format!("n,m,re,im\n{},{},{},{}\n", n, m, fmt(r.re), fmt(r.im)),
        Format::Json => {
            let v = json!({"n": n, "m": m, "z": [zp.z.re, zp.z.im], "re": r.re, "im": r.im, "omega": [om.re, om.im]});
            serde_json::to_string_pretty(&v).expect("serialisable") + "\n"
        }
    }))
}

fn dispatch(kind: CommandKind, args: &RunArgs) -> Result<Output> {
    let model = resolve_model(args)?;
    let params = classify(&model)?;
    match kind {
        CommandKind::Classify => cmd_classify(&model, &params),
        CommandKind::Density => cmd_density(args, &model, &params),
        CommandKind::Jost => cmd_jost(args, &model, &params),
        CommandKind::Poly => cmd_poly(args, &model, &params),
        CommandKind::Eigs => cmd_eigs(args, &model, &params),
        CommandKind::Resolvent => cmd_resolvent(args, &model, &params),
    }
}

/// Runs the CLI on `argv`; returns the exit code.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(stderr, "{e}");
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let (kind, args) = match cli.command {
        Command::Classify(a) => (CommandKind::Classify, a),
        Command::Density(a) => (CommandKind::Density, a),
        Command::Jost(a) => (CommandKind::Jost, a),
        Command::Poly(a) => (CommandKind::Poly, a),
        Command::Eigs(a) => (CommandKind::Eigs, a),
        Command::Resolvent(a) => (CommandKind::Resolvent, a),
    };
    let args = match args.merged() {
        Ok(a) => a,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return exit_code(&e);
        }
    };
    let result = match args.threads {
        Some(t) => match rayon::ThreadPoolBuilder::new().num_threads(t).build() {
            Ok(pool) => pool.install(|| dispatch(kind, &args)),
            Err(e) => Err(Error::Config(format!("thread pool: {e}"))),
        },
        None => dispatch(kind, &args),
    };
    match result {
        Ok(out) => {
            let written = match &args.out {
                Some(path) => std::fs::write(path, &out.text).map_err(|e| e.to_string()),
                None => stdout.write_all(out.text.as_bytes()).map_err(|e| e.to_string()),
            };
            if let Err(e) = written {
                let _ = writeln!(stderr, "error: cannot write output: {e}");
                return EXIT_CONFIG;
            }
            if out.code != EXIT_OK {
                let _ = writeln!(stderr, "error: some grid points failed (see error rows)");
            }
            out.code
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {} ({})", e, e.kind());
            exit_code(&e)
        }
    }
}
