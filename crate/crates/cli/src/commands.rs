use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use ces_interp::experiments::{fh_ratio, fs_sweep, run_suite, Report, Suite, SuiteConfig, SweepRow};
use ces_interp::funcore::{t_zero, tau1, tau2, Domain, Seq, StepFunction};
use ces_interp::interp::{identity_norm, theta_inf_norm, theta_p_enclosure};
use ces_interp::kfun::{
    build_kcurve, build_kcurve_discrete, k_closed, k_discrete, k_refined, split_bounds, Couple,
    GridSpec, LpConfig, Method,
};
use ces_interp::norms::{
    ces_inf_norm, ces_log_norm, ces_norm, cop_norm, lp_weighted, seq_norm, QuadConfig, SeqSpace,
    SeqWeight,
};
use ces_interp::operators::PiecewiseSmooth;

use crate::funcfile::{self, sig17};
use crate::{names, CliError};

#[derive(Debug, Parser)]
#[command(name = "ces-interp", version, about = "Cesàro/Copson norms, K-functionals and verification suites")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a verification suite and write its report.
    Verify(VerifyArgs),
    /// Tabulate K(t, f) for a couple.
    Kcurve(KcurveArgs),
    /// Compute one norm of a function or sequence.
    Norm(NormArgs),
    /// Ratio sweeps over the two counterexample families.
    Sweep(SweepArgs),
    /// τ₁(t), τ₂(t); without --t, the crossing point t₀.
    Tau(TauArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Closed,
    Lp,
}

#[derive(Debug, Args)]
pub struct FuncArgs {
    /// Function file (`domain unit|halfline T`, then `x v` lines).
    #[arg(long, conflicts_with_all = ["breaks", "values", "seq"])]
    pub func: Option<PathBuf>,
    /// Right ends of the pieces, comma-separated.
    #[arg(long, value_delimiter = ',', requires = "values")]
    pub breaks: Vec<f64>,
    /// Values on the pieces, comma-separated.
    #[arg(long, value_delimiter = ',', requires = "breaks")]
    pub values: Vec<f64>,
    /// Use the half-line truncated at this point for inline functions.
    #[arg(long)]
    pub halfline: Option<f64>,
    /// Sequence terms x₁, x₂, … for discrete spaces.
    #[arg(long, value_delimiter = ',')]
    pub seq: Vec<f64>,
}

enum Input {
    Function(StepFunction),
    Sequence(Seq),
}

impl FuncArgs {
    fn input(&self) -> Result<Input, CliError> {
        if !self.seq.is_empty() {
            return Ok(Input::Sequence(Seq::new(self.seq.clone())?));
        }
        if let Some(path) = &self.func {
            let text = fs::read_to_string(path)?;
            return Ok(Input::Function(funcfile::parse(&text)?));
        }
        if self.breaks.is_empty() {
            return Err(CliError::Usage("give --func, --breaks/--values or --seq".into()));
        }
        let domain = match self.halfline {
            Some(t) => Domain::half_line(t)?,
            None => Domain::UnitInterval,
        };
        Ok(Input::Function(funcfile::inline(domain, &self.breaks, &self.values)?))
    }
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[arg(long, default_value_t = 1e-4)]
    pub t_min: f64,
    #[arg(long, default_value_t = 10.0)]
    pub t_max: f64,
    #[arg(long, default_value_t = 400)]
    pub per_decade: usize,
}

impl GridArgs {
    fn spec(&self) -> GridSpec {
        GridSpec {
            t_min: self.t_min,
            t_max: self.t_max,
            per_decade: self.per_decade,
        }
    }
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Suite name, or `all`.
    #[arg(long)]
    pub suite: String,
    #[arg(long)]
    pub seed: Option<u64>,
    /// JSON suite configuration; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Corpus size.
    #[arg(long)]
    pub count: Option<usize>,
    /// Exponents, comma-separated.
    #[arg(long = "p", value_delimiter = ',')]
    pub p: Vec<f64>,
    /// Directory for the report and sweep files.
    #[arg(long, env = "CES_INTERP_OUT", default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct KcurveArgs {
    #[command(flatten)]
    pub input: FuncArgs,
    #[arg(long)]
    pub couple: String,
    #[arg(long, value_enum, default_value_t = MethodArg::Closed)]
    pub method: MethodArg,
    #[arg(long, default_value_t = 64)]
    pub mesh_n: usize,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    /// Evaluate at these t instead of the grid (LP values are mesh-refined).
    #[arg(long, value_delimiter = ',')]
    pub t: Vec<f64>,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Space {
    /// `L_p(w)` with --weight
    Lp,
    Ces,
    Cop,
    CesLog,
    CesInf,
    /// `‖Cf + C*f‖` form of the `(L_1, L_1(1/t))_{1−1/p,p}` norm
    Identity,
    /// `(θ, p)` norm over --couple
    Interp,
}

#[derive(Debug, Args)]
pub struct NormArgs {
    #[command(flatten)]
    pub input: FuncArgs,
    #[arg(long, value_enum)]
    pub space: Space,
    /// Exponent; `inf` is accepted where it makes sense.
    #[arg(long)]
    pub p: f64,
    #[arg(long, default_value = "one")]
    pub weight: String,
    /// Interpolation parameter (default 1 − 1/p).
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long)]
    pub couple: Option<String>,
    #[arg(long, value_enum, default_value_t = MethodArg::Closed)]
    pub method: MethodArg,
    #[arg(long, default_value_t = 64)]
    pub mesh_n: usize,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    /// `(1−t)^{−1/2}χ_{[h,1)}`, parameter h
    Fh,
    /// `χ_{[0,s]}`, parameter s
    Fs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub family: Family,
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    /// Parameter values (default h = 1 − 2^{−k}, k = 1..10, or s = e^{−k}, k = 1..8).
    #[arg(long, value_delimiter = ',')]
    pub values: Vec<f64>,
    #[arg(long, default_value_t = 64)]
    pub mesh_n: usize,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct TauArgs {
    #[arg(long, value_delimiter = ',')]
    pub t: Vec<f64>,
}

/// Runs a parsed command line and returns the exit code.
pub fn run(cli: Cli) -> i32 {
    let r = match cli.command {
        Command::Verify(a) => verify(&a),
        Command::Kcurve(a) => kcurve(&a).map(|_| 0),
        Command::Norm(a) => norm(&a).map(|_| 0),
        Command::Sweep(a) => sweep(&a),
        Command::Tau(a) => tau(&a).map(|_| 0),
    };
    match r {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn csv_text(header: &[&str], rows: &[Vec<String>]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

fn opt(x: Option<f64>) -> String {
    x.map(sig17).unwrap_or_default()
}

fn sweep_csv(rows: &[SweepRow]) -> Result<String, CliError> {
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                sig17(r.parameter),
                sig17(r.value_lhs),
                sig17(r.value_rhs),
                sig17(r.bound),
                r.pass.to_string(),
            ]
        })
        .collect();
    csv_text(&["parameter", "value_lhs", "value_rhs", "bound", "pass"], &body)
}

fn verify(a: &VerifyArgs) -> Result<i32, CliError> {
    let suites: Vec<Suite> = if a.suite == "all" {
        Suite::ALL.to_vec()
    } else {
        vec![a.suite.parse::<Suite>()?]
    };
    let mut cfg: SuiteConfig = match &a.config {
        Some(p) => serde_json::from_str(&fs::read_to_string(p)?)?,
        None => SuiteConfig::default(),
    };
    if let Some(s) = a.seed {
        cfg.corpus.seed = s;
    }
    if a.count.is_some() {
        cfg.count = a.count;
    }
    if !a.p.is_empty() {
        cfg.p_values = a.p.clone();
    }
    cfg.validate()?;
    fs::create_dir_all(&a.out_dir)?;
    let mut code = 0;
    for s in suites {
        let report = run_suite(s, &cfg)?;
        write_report(&report, &a.out_dir)?;
        print_summary(&report);
        if !report.passed() {
            code = 1;
        }
    }
    Ok(code)
}

fn write_report(r: &Report, dir: &Path) -> Result<(), CliError> {
    let path = dir.join(format!("{}-seed{}.json", r.suite, r.seed));
    fs::write(&path, r.to_json())?;
    for sw in &r.sweeps {
        fs::write(dir.join(format!("{}.csv", sw.id)), sweep_csv(&sw.rows)?)?;
    }
    println!("report: {}", path.display());
    Ok(())
}

fn print_summary(r: &Report) {
    for a in &r.assertions {
        println!(
            "{} {} {}: {} checks, {} failures, worst margin {:e}",
            if a.pass { "PASS" } else { "FAIL" },
            r.suite,
            a.id,
            a.checks,
            a.failures,
            a.margin
        );
    }
    for o in &r.observations {
        println!(
            "OBSERVED {} {}: ratio in [{:e}, {:e}] over {} inputs, drift {}",
            r.suite,
            o.id,
            o.min,
            o.max,
            o.count,
            o.drift.map(|d| format!("{d:e}")).unwrap_or_else(|| "n/a".into())
        );
    }
    println!(
        "{}: {} assertions, {} failures",
        r.suite,
        r.assertions.len(),
        r.failures()
    );
}

#[derive(Serialize)]
struct KRow {
    t: f64,
    k: f64,
    lower_bound: Option<f64>,
    upper_bound: Option<f64>,
}

fn kcurve(a: &KcurveArgs) -> Result<(), CliError> {
    let couple = names::couple(&a.couple)?;
    let method = match a.method {
        MethodArg::Closed => Method::ClosedForm,
        MethodArg::Lp => Method::Lp {
            mesh_n: a.mesh_n,
            tol: a.tol,
        },
    };
    let bounds = |t: f64, f: &StepFunction| -> Option<(f64, f64)> {
        if couple == Couple::Ces1CesInfUnit && t < 1.0 {
            split_bounds(t, f).ok().map(|b| (b.lower, b.upper))
        } else {
            None
        }
    };
    let mut rows = Vec::new();
    match a.input.input()? {
        Input::Sequence(x) => {
            if couple != Couple::DiscreteL1L1InvK {
                return Err(CliError::Usage("sequences need --couple discrete".into()));
            }
            if a.t.is_empty() {
                let kc = build_kcurve_discrete(&x, &a.grid.spec())?;
                for (&t, &k) in kc.tgrid.iter().zip(&kc.kvals) {
                    rows.push(KRow { t, k, lower_bound: None, upper_bound: None });
                }
            } else {
                for &t in &a.t {
                    rows.push(KRow { t, k: k_discrete(t, &x), lower_bound: None, upper_bound: None });
                }
            }
        }
        Input::Function(f) => {
            if a.t.is_empty() {
                let kc = build_kcurve(&f, &couple, &a.grid.spec(), method)?;
                for (&t, &k) in kc.tgrid.iter().zip(&kc.kvals) {
                    let b = bounds(t, &f);
                    rows.push(KRow { t, k, lower_bound: b.map(|b| b.0), upper_bound: b.map(|b| b.1) });
                }
            } else {
                for &t in &a.t {
                    let k = match method {
                        Method::ClosedForm => k_closed(t, &f, &couple)?,
                        Method::Lp { mesh_n, tol } => {
                            let cfg = LpConfig {
                                mesh_n,
                                tol,
                                ..LpConfig::default()
                            };
                            k_refined(t, &f, &couple, &cfg)?.decomposition.value
                        }
                    };
                    let b = bounds(t, &f);
                    rows.push(KRow { t, k, lower_bound: b.map(|b| b.0), upper_bound: b.map(|b| b.1) });
                }
            }
        }
    }
    let text = match a.format {
        Format::Json => serde_json::to_string_pretty(&rows)? + "\n",
        Format::Csv => {
            let body: Vec<Vec<String>> = rows
                .iter()
                .map(|r| vec![sig17(r.t), sig17(r.k), opt(r.lower_bound), opt(r.upper_bound)])
                .collect();
            csv_text(&["t", "K", "lower_bound", "upper_bound"], &body)?
        }
    };
    emit(a.out.as_deref(), &text)
}

fn norm(a: &NormArgs) -> Result<(), CliError> {
    let q = QuadConfig::default();
    let p = a.p;
    let value = match a.input.input()? {
        Input::Sequence(x) => {
            let m = x.len();
            match a.space {
                Space::Lp => seq_norm(&x, SeqSpace::Lp { p, weight: seq_weight(&a.weight)? }, m, q.rel_tol)?,
                Space::Ces => seq_norm(&x, SeqSpace::Ces { p }, m, q.rel_tol)?,
                Space::Cop => seq_norm(&x, SeqSpace::Cop { p }, m, q.rel_tol)?,
                Space::CesInf => seq_norm(&x, SeqSpace::CesInf, m, q.rel_tol)?,
                Space::Interp => {
                    let kc = build_kcurve_discrete(&x, &a.grid.spec())?;
                    interp_value(&kc, a, &q)?
                }
                _ => return Err(CliError::Usage("this space is not defined for sequences".into())),
            }
        }
        Input::Function(f) => match a.space {
            Space::Lp => lp_weighted(&PiecewiseSmooth::from(&f), p, &names::weight(&a.weight)?, &q)?,
            Space::Ces => ces_norm(&f, p, &q)?,
            Space::Cop => cop_norm(&f, p, &q)?,
            Space::CesLog => ces_log_norm(&f, p, &q)?,
            Space::CesInf => ces_inf_norm(&f),
            Space::Identity => identity_norm(&f, p, &q)?,
            Space::Interp => {
                let name = a
                    .couple
                    .as_deref()
                    .ok_or_else(|| CliError::Usage("--space interp needs --couple".into()))?;
                let method = match a.method {
                    MethodArg::Closed => Method::ClosedForm,
                    MethodArg::Lp => Method::Lp {
                        mesh_n: a.mesh_n,
                        tol: a.tol,
                    },
                };
                let kc = build_kcurve(&f, &names::couple(name)?, &a.grid.spec(), method)?;
                interp_value(&kc, a, &q)?
            }
        },
    };
    let text = match a.format {
        Format::Json => {
            serde_json::json!({ "space": format!("{:?}", a.space), "p": p, "value": value }).to_string() + "\n"
        }
        Format::Csv => csv_text(
            &["space", "p", "value"],
            &[vec![format!("{:?}", a.space).to_lowercase(), sig17(p), sig17(value)]],
        )?,
    };
    emit(None, &text)
}

/// `(θ, p)` value: the enclosure midpoint, or the attained supremum for `p = ∞`.
fn interp_value(kc: &ces_interp::kfun::KCurve, a: &NormArgs, q: &QuadConfig) -> Result<f64, CliError> {
    let p = a.p;
    if p.is_infinite() {
        let theta = a
            .theta
            .ok_or_else(|| CliError::Usage("p = inf needs --theta".into()))?;
        return Ok(theta_inf_norm(kc, theta)?);
    }
    let theta = a.theta.unwrap_or(1.0 - 1.0 / p);
    Ok(theta_p_enclosure(kc, theta, p, q)?.value)
}

fn seq_weight(s: &str) -> Result<SeqWeight, CliError> {
    match s {
        "one" => Ok(SeqWeight::One),
        "inv-k" | "inv-t" => Ok(SeqWeight::InvK),
        _ => Err(CliError::Usage(format!("unknown sequence weight `{s}`"))),
    }
}

fn sweep(a: &SweepArgs) -> Result<i32, CliError> {
    let rows: Vec<SweepRow> = match a.family {
        Family::Fh => {
            let hs = if a.values.is_empty() {
                (1..=10).map(|k| 1.0 - 2f64.powi(-k)).collect()
            } else {
                a.values.clone()
            };
            let q = QuadConfig::default();
            let mut rows = Vec::new();
            for h in hs {
                let r = fh_ratio(h, a.p, &q)?;
                rows.push(SweepRow {
                    parameter: h,
                    value_lhs: r.cop.powf(r.p),
                    value_rhs: r.ces.powf(r.p),
                    bound: r.lower_bound,
                    pass: r.ratio_pow >= r.lower_bound,
                });
            }
            rows
        }
        Family::Fs => {
            let ss: Vec<f64> = if a.values.is_empty() {
                (1..=8).map(|k| (-(k as f64)).exp()).collect()
            } else {
                a.values.clone()
            };
            fs_sweep(a.p, &ss, &a.grid.spec(), a.mesh_n, a.tol)?
                .rows
                .iter()
                .map(|r| SweepRow {
                    parameter: r.s,
                    value_lhs: r.interp,
                    value_rhs: r.ces,
                    bound: r.bound,
                    pass: r.pass,
                })
                .collect()
        }
    };
    let text = match a.format {
        Format::Json => serde_json::to_string_pretty(&rows)? + "\n",
        Format::Csv => sweep_csv(&rows)?,
    };
    emit(a.out.as_deref(), &text)?;
    Ok(if rows.iter().all(|r| r.pass) { 0 } else { 1 })
}

fn tau(a: &TauArgs) -> Result<(), CliError> {
    let ts = if a.t.is_empty() { vec![t_zero()] } else { a.t.clone() };
    let mut body = Vec::new();
    for t in ts {
        if !(t > 0.0 && t.is_finite()) {
            return Err(CliError::Usage(format!("t = {t} is outside (0, ∞)")));
        }
        body.push(vec![sig17(t), sig17(tau1(t)), sig17(tau2(t))]);
    }
    emit(None, &csv_text(&["t", "tau1", "tau2"], &body)?)
}
