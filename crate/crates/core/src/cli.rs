//! `xy-discord` command-line front end.
//!
//! Every subcommand validates its flags before computing anything. Output
//! goes to stdout or, with `--out`, to a temporary file that is renamed into
//! place once complete. Exit codes: 0 success, 1 numerical failure, 2 flag
//! or validation error.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use serde_json::json;

use crate::analysis::{
    self, discord_decay_profile, psc_derivative, qcp_estimate, sudden_change_point, trajectory, DynamicsType, Wrt,
};
use crate::channels::{Channel, ParamTime};
use crate::error::Error;
use crate::quadrature::QuadratureConfig;
use crate::xstate::reduced_density_matrix;
use crate::xy_model::{Beta, ModelParams};

/// Environment variable overriding the quadrature relative tolerance.
pub const QUAD_TOL_ENV: &str = "XY_DISCORD_QUAD_TOL";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Two-site reduced density matrix and its correlations.
    State,
    /// I, C, Q versus parametrized time.
    Trajectory,
    /// Sudden-change point and dynamics type.
    Psc,
    /// p_sc and its derivative across lambda or gamma.
    Sweep,
    /// Finite-temperature critical-point estimate.
    Qcp,
    /// Discord versus spin separation at fixed p.
    Profile,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepVar {
    Lambda,
    Gamma,
}

#[derive(Debug, Parser)]
#[command(
    name = "xy-discord",
    about = "Decoherence of quantum discord and classical correlations in the transverse-field XY chain",
    args_override_self = true
)]
pub struct Args {
    #[arg(value_enum)]
    pub command: Command,
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub gamma: Option<f64>,
    /// Temperature as kT; 0 selects the ground state.
    #[arg(long, allow_negative_numbers = true)]
    pub kt: Option<f64>,
    /// Spin separation (maximum separation for `profile`).
    #[arg(long)]
    pub r: Option<usize>,
    #[arg(long)]
    pub channel: Option<String>,
    /// Parametrized time for `profile`.
    #[arg(long, allow_negative_numbers = true)]
    pub p: Option<f64>,
    #[arg(long = "p-points")]
    pub p_points: Option<usize>,
    #[arg(long = "sweep-var", value_enum)]
    pub sweep_var: Option<SweepVar>,
    /// `lo:hi:n`
    #[arg(long = "sweep-range", allow_hyphen_values = true)]
    pub sweep_range: Option<String>,
    /// Finite-difference step.
    #[arg(long, allow_negative_numbers = true)]
    pub h: Option<f64>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long = "emit-plot")]
    pub emit_plot: bool,
    /// `key = value` file supplying any of the flags above.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Failure classes mapped onto exit codes.
#[derive(Debug)]
enum Failure {
    /// `--help` / `--version` already printed.
    Informational,
    Usage(String),
    Numerical(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParams(_) => Failure::Usage(e.to_string()),
            other => Failure::Numerical(other),
        }
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

/// Formats like C's `%.12g`.
pub fn fmt_g(x: f64) -> String {
    const SIG: i32 = 12;
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{:.*e}", (SIG - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= SIG {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (SIG - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Runs the CLI on `argv` (including the program name) and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    match run_inner(&argv) {
        Ok(()) | Err(Failure::Informational) => 0,
        Err(Failure::Usage(msg)) => {
            eprintln!("xy-discord: {msg}");
            2
        }
        Err(Failure::Numerical(e)) => {
            eprintln!("xy-discord: {e}");
            1
        }
    }
}

fn parse_args(argv: &[OsString]) -> Result<Args, Failure> {
    match Args::try_parse_from(argv) {
        Ok(a) => Ok(a),
        Err(e) => match e.kind() {
            clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                let _ = e.print();
                Err(Failure::Informational)
            }
            _ => {
                let rendered = e.to_string();
                let line = rendered.lines().next().unwrap_or("invalid arguments");
                Err(usage(line.trim_start_matches("error: ").to_string()))
            }
        },
    }
}

/// Turns `key = value` lines into flags placed ahead of the real arguments,
/// so the command line wins.
fn config_flags(path: &Path) -> Result<Vec<OsString>, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
    let mut flags = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| usage(format!("{}:{}: expected key = value", path.display(), lineno + 1)))?;
        let key = key.trim().trim_start_matches("--").replace('_', "-");
        let value = value.trim().trim_matches('"');
        match key.as_str() {
            "config" => return Err(usage("config files cannot include other config files")),
            "emit-plot" => match value {
                "true" | "1" | "yes" => flags.push(OsString::from("--emit-plot")),
                "false" | "0" | "no" => {}
                other => return Err(usage(format!("emit-plot expects true or false, got '{other}'"))),
            },
            _ => {
                flags.push(OsString::from(format!("--{key}")));
                flags.push(OsString::from(value));
            }
        }
    }
    Ok(flags)
}

fn run_inner(argv: &[OsString]) -> Result<(), Failure> {
    let first = parse_args(argv)?;
    let args = match &first.config {
        Some(path) => {
            let mut merged = vec![argv.first().cloned().unwrap_or_else(|| "xy-discord".into())];
            merged.extend(config_flags(path)?);
            merged.extend(argv.iter().skip(1).cloned());
            parse_args(&merged)?
        }
        None => first,
    };

    let quad = quadrature_config()?;
    let job = Job::from_args(&args)?;
    let out = job.execute(&quad)?;
    deliver(&args, &out)
}

fn quadrature_config() -> Result<QuadratureConfig, Failure> {
    let mut quad = QuadratureConfig::default();
    if let Ok(raw) = std::env::var(QUAD_TOL_ENV) {
        let tol: f64 = raw
            .trim()
            .parse()
            .map_err(|_| usage(format!("{QUAD_TOL_ENV} is not a number: '{raw}'")))?;
        quad.rel_tol = tol;
        quad.validate()?;
    }
    Ok(quad)
}

struct SweepRange {
    lo: f64,
    hi: f64,
    n: usize,
}

impl SweepRange {
    fn parse(s: &str) -> Result<Self, Failure> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || usage(format!("sweep range must be lo:hi:n, got '{s}'"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let lo: f64 = parts[0].trim().parse().map_err(|_| bad())?;
        let hi: f64 = parts[1].trim().parse().map_err(|_| bad())?;
        let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
        if !(hi >= lo) || n < 1 || (n > 1 && hi == lo) {
            return Err(bad());
        }
        Ok(SweepRange { lo, hi, n })
    }

    fn points(&self) -> Vec<f64> {
        if self.n == 1 {
            return vec![self.lo];
        }
        let step = (self.hi - self.lo) / (self.n - 1) as f64;
        (0..self.n).map(|i| self.lo + i as f64 * step).collect()
    }
}

/// Fully validated work item.
enum Job {
    State { params: ModelParams, r: usize },
    Trajectory { params: ModelParams, r: usize, channel: Channel, p_points: usize },
    Psc { params: ModelParams, r: usize, channel: Channel },
    Sweep { params: ModelParams, r: usize, channel: Channel, var: SweepVar, range: SweepRange, h: f64 },
    Qcp { gamma: f64, kt: f64, r: usize, channel: Channel, range: SweepRange, h: f64 },
    Profile { params: ModelParams, r_max: usize, channel: Channel, p: ParamTime },
}

fn require<T: Copy>(v: Option<T>, flag: &str) -> Result<T, Failure> {
    v.ok_or_else(|| usage(format!("missing required flag --{flag}")))
}

impl Job {
    fn from_args(args: &Args) -> Result<Self, Failure> {
        let kt = args.kt.unwrap_or(0.0);
        let r = args.r.unwrap_or(1);
        let h = args.h.unwrap_or(analysis::DEFAULT_STEP);
        if !(h > 0.0) {
            return Err(usage(format!("--h must be positive, got {h}")));
        }
        let channel = || -> Result<Channel, Failure> {
            let name = args.channel.as_deref().ok_or_else(|| usage("missing required flag --channel"))?;
            Ok(name.parse::<Channel>()?)
        };
        let params = || -> Result<ModelParams, Failure> {
            let lambda = require(args.lambda, "lambda")?;
            let gamma = require(args.gamma, "gamma")?;
            Ok(ModelParams::thermal(lambda, gamma, kt)?)
        };
        let distance = |r: usize| -> Result<usize, Failure> {
            if (1..=crate::xy_model::MAX_DISTANCE).contains(&r) {
                Ok(r)
            } else {
                Err(usage(format!("--r must be in 1..={}, got {r}", crate::xy_model::MAX_DISTANCE)))
            }
        };

        if args.emit_plot {
            if args.out.is_none() {
                return Err(usage("--emit-plot requires --out"));
            }
            if matches!(args.command, Command::State | Command::Psc | Command::Qcp) {
                return Err(usage("--emit-plot is available for trajectory, sweep and profile"));
            }
        }

        Ok(match args.command {
            Command::State => Job::State { params: params()?, r: distance(r)? },
            Command::Trajectory => {
                let p_points = args.p_points.unwrap_or(analysis::DEFAULT_P_POINTS);
                if p_points < 2 {
                    return Err(usage(format!("--p-points must be at least 2, got {p_points}")));
                }
                Job::Trajectory { params: params()?, r: distance(r)?, channel: channel()?, p_points }
            }
            Command::Psc => Job::Psc { params: params()?, r: distance(r)?, channel: channel()? },
            Command::Sweep => {
                let var = require(args.sweep_var, "sweep-var")?;
                let range = SweepRange::parse(
                    args.sweep_range.as_deref().ok_or_else(|| usage("missing required flag --sweep-range"))?,
                )?;
                let params = params()?;
                for x in range.points() {
                    let wrt = match var {
                        SweepVar::Lambda => Wrt::Lambda,
                        SweepVar::Gamma => Wrt::Gamma,
                    };
                    wrt.set(&params, x).validate()?;
                }
                Job::Sweep { params, r: distance(r)?, channel: channel()?, var, range, h }
            }
            Command::Qcp => {
                let gamma = require(args.gamma, "gamma")?;
                if !(kt > 0.0) {
                    return Err(usage("qcp needs a finite temperature (--kt > 0)"));
                }
                let range = SweepRange::parse(args.sweep_range.as_deref().unwrap_or("0.6:1.4:64"))?;
                if range.n < 32 {
                    return Err(usage(format!("qcp needs at least 32 grid points, got {}", range.n)));
                }
                ModelParams::thermal(range.lo, gamma, kt)?;
                Job::Qcp { gamma, kt, r: distance(r)?, channel: channel()?, range, h }
            }
            Command::Profile => {
                let p = ParamTime::new(require(args.p, "p")?)?;
                if !(1..=8).contains(&r) {
                    return Err(usage(format!("profile needs --r in 1..=8, got {r}")));
                }
                Job::Profile { params: params()?, r_max: r, channel: channel()?, p }
            }
        })
    }

    fn execute(&self, quad: &QuadratureConfig) -> Result<Output, Failure> {
        Ok(match self {
            Job::State { params, r } => {
                let s = reduced_density_matrix(params, *r, quad)?;
                let c = s.c_representation();
                let (q, branch) = s.discord();
                let i = s.mutual_information();
                let row = [s.a, s.b, s.d, s.z, s.f, c.c1, c.c2, c.c3, c.c4, i, i - q, q];
                let mut csv = String::from("a,b,d,z,f,c1,c2,c3,c4,I,C,Q,branch\n");
                let cells: Vec<String> = row.iter().map(|&v| fmt_g(v)).collect();
                let _ = writeln!(csv, "{},{branch}", cells.join(","));
                Output { csv, json: s.matrix_json() + "\n", plot: None }
            }
            Job::Trajectory { params, r, channel, p_points } => {
                let grid = analysis::uniform_p_grid(*p_points);
                let t = trajectory(params, *r, *channel, &grid, quad)?;
                let sc = match sudden_change_point(params, *r, *channel, quad) {
                    Ok(sc) => sc.p_sc,
                    Err(Error::DegenerateState) => None,
                    Err(e) => return Err(e.into()),
                };
                let mut csv = String::from("p,I,C,Q,branch\n");
                for pt in &t.points {
                    let _ = writeln!(
                        csv,
                        "{},{},{},{},{}",
                        fmt_g(pt.p),
                        fmt_g(pt.mutual_information),
                        fmt_g(pt.classical),
                        fmt_g(pt.discord),
                        pt.branch
                    );
                }
                let points: Vec<_> = t
                    .points
                    .iter()
                    .map(|pt| {
                        json!({"p": pt.p, "I": pt.mutual_information, "C": pt.classical, "Q": pt.discord, "branch": pt.branch.to_string()})
                    })
                    .collect();
                let json = json!({
                    "lambda": params.lambda, "gamma": params.gamma, "kT": params.beta.kt(),
                    "r": r, "channel": channel.as_str(), "p_sc": sc, "points": points,
                });
                Output {
                    csv,
                    json: json.to_string() + "\n",
                    plot: Some(PlotKind::Trajectory { params: *params, channel: *channel, p_sc: sc }),
                }
            }
            Job::Psc { params, r, channel } => {
                let sc = sudden_change_point(params, *r, *channel, quad)?;
                let value = sc.p_sc.map(fmt_g).unwrap_or_else(|| "absent".into());
                let csv = format!("p_sc,{value},type,{}\n", sc.dynamics_type);
                let json = json!({
                    "p_sc": sc.p_sc,
                    "type": sc.dynamics_type.to_string(),
                    "method": format!("{:?}", sc.method),
                });
                Output { csv, json: json.to_string() + "\n", plot: None }
            }
            Job::Sweep { params, r, channel, var, range, h } => {
                let wrt = match var {
                    SweepVar::Lambda => Wrt::Lambda,
                    SweepVar::Gamma => Wrt::Gamma,
                };
                let mut csv = String::from("x,p_sc,dpsc_dx\n");
                let mut rows = Vec::new();
                for x in range.points() {
                    let at = wrt.set(params, x);
                    let p_sc = match sudden_change_point(&at, *r, *channel, quad) {
                        Ok(sc) => sc.p_sc,
                        Err(Error::DegenerateState) => None,
                        Err(e) => return Err(e.into()),
                    };
                    let deriv = match psc_derivative(&at, *r, *channel, wrt, *h, quad) {
                        Ok(d) => Some(d),
                        Err(Error::DomainEdge(_)) => None,
                        Err(e) => return Err(e.into()),
                    };
                    let show = |v: Option<f64>| v.map(fmt_g).unwrap_or_else(|| "absent".into());
                    let _ = writeln!(csv, "{},{},{}", fmt_g(x), show(p_sc), show(deriv));
                    rows.push(json!({"x": x, "p_sc": p_sc, "dpsc_dx": deriv}));
                }
                let json = json!({
                    "sweep_var": format!("{var:?}").to_lowercase(), "channel": channel.as_str(),
                    "r": r, "rows": rows,
                });
                Output {
                    csv,
                    json: json.to_string() + "\n",
                    plot: Some(PlotKind::Sweep { var: *var, channel: *channel }),
                }
            }
            Job::Qcp { gamma, kt, r, channel, range, h } => {
                let beta = Beta::from_kt(*kt)?;
                let est = qcp_estimate(*channel, *gamma, beta, *r, (range.lo, range.hi), range.n, *h, quad)?;
                let csv = format!(
                    "kT,r,channel,lambda_star,peak\n{},{r},{channel},{},{}\n",
                    fmt_g(*kt),
                    fmt_g(est.lambda_star),
                    fmt_g(est.peak)
                );
                let json = json!({
                    "kT": kt, "r": r, "channel": channel.as_str(),
                    "lambda_star": est.lambda_star, "peak": est.peak,
                    "grid_lambda": est.grid_lambda, "grid_peak": est.grid_peak,
                });
                Output { csv, json: json.to_string() + "\n", plot: None }
            }
            Job::Profile { params, r_max, channel, p } => {
                let prof = discord_decay_profile(params, *channel, *p, *r_max, quad)?;
                let mut csv = String::from("r,Q\n");
                for (r, q) in &prof {
                    let _ = writeln!(csv, "{r},{}", fmt_g(*q));
                }
                let rows: Vec<_> = prof.iter().map(|(r, q)| json!({"r": r, "Q": q})).collect();
                let json = json!({"p": p.value(), "channel": channel.as_str(), "rows": rows});
                Output {
                    csv,
                    json: json.to_string() + "\n",
                    plot: Some(PlotKind::Profile { params: *params, channel: *channel, p: p.value() }),
                }
            }
        })
    }
}

/// Whether a computed state of type II was found; used by plot titles.
fn type_label(p_sc: Option<f64>) -> DynamicsType {
    if p_sc.is_some() {
        DynamicsType::II
    } else {
        DynamicsType::III
    }
}

enum PlotKind {
    Trajectory { params: ModelParams, channel: Channel, p_sc: Option<f64> },
    Sweep { var: SweepVar, channel: Channel },
    Profile { params: ModelParams, channel: Channel, p: f64 },
}

struct Output {
    csv: String,
    json: String,
    plot: Option<PlotKind>,
}

fn gnuplot_script(kind: &PlotKind, data: &str) -> String {
    let mut s = String::from("set datafile separator ','\nset key autotitle columnhead\nset terminal pngcairo size 800,600\n");
    match kind {
        PlotKind::Trajectory { params, channel, p_sc } => {
            let _ = writeln!(s, "set output '{data}.png'");
            let _ = writeln!(
                s,
                "set title '{} channel, lambda={}, gamma={}, type {}'",
                channel.as_str().to_uppercase(),
                fmt_g(params.lambda),
                fmt_g(params.gamma),
                type_label(*p_sc)
            );
            s.push_str("set xlabel 'p'\nset xrange [0:1]\n");
            if let Some(p) = p_sc {
                let _ = writeln!(s, "set arrow from {0},graph 0 to {0},graph 1 nohead dt 3", fmt_g(*p));
            }
            let _ = writeln!(
                s,
                "plot '{data}' using 1:2 with lines lw 2 title 'I', '' using 1:3 with lines dt 2 lw 2 title 'C', '' using 1:4 with lines dt 4 lw 2 title 'Q'"
            );
        }
        PlotKind::Sweep { var, channel } => {
            let x = match var {
                SweepVar::Lambda => "lambda",
                SweepVar::Gamma => "gamma",
            };
            let _ = writeln!(s, "set output '{data}.png'");
            s.push_str("set multiplot\n");
            let _ = writeln!(s, "set title '{} channel'\nset xlabel '{x}'\nset ylabel 'p_sc'", channel.as_str().to_uppercase());
            let _ = writeln!(s, "plot '{data}' using 1:2 with lines lw 2 notitle");
            s.push_str("set origin 0.55,0.15\nset size 0.4,0.4\nunset title\n");
            let _ = writeln!(s, "set ylabel 'dp_sc/d{x}'\nplot '{data}' using 1:3 with lines notitle");
            s.push_str("unset multiplot\n");
        }
        PlotKind::Profile { params, channel, p } => {
            let _ = writeln!(s, "set output '{data}.png'");
            let _ = writeln!(
                s,
                "set title '{} channel, lambda={}, gamma={}, p={}'\nset xlabel 'r'\nset ylabel 'Q'\nset xtics 1",
                channel.as_str().to_uppercase(),
                fmt_g(params.lambda),
                fmt_g(params.gamma),
                fmt_g(*p)
            );
            let _ = writeln!(s, "plot '{data}' using 1:2 with linespoints pt 5 notitle");
        }
    }
    s
}

fn write_atomic(path: &Path, contents: &str) -> Result<(), Failure> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let fail = |e: std::io::Error| usage(format!("cannot write {}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(fail)?;
    tmp.write_all(contents.as_bytes()).map_err(fail)?;
    tmp.persist(path).map_err(|e| fail(e.error))?;
    Ok(())
}

fn deliver(args: &Args, out: &Output) -> Result<(), Failure> {
    let body = match args.format.unwrap_or(Format::Csv) {
        Format::Csv => &out.csv,
        Format::Json => &out.json,
    };
    match &args.out {
        Some(path) => {
            write_atomic(path, body)?;
            if args.emit_plot {
                if let Some(kind) = &out.plot {
                    let data = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
                    let mut script_path = path.clone().into_os_string();
                    script_path.push(".gp");
                    write_atomic(Path::new(&script_path), &gnuplot_script(kind, &data))?;
                }
            }
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(body.as_bytes())
                .and_then(|_| lock.flush())
                .map_err(|e| usage(format!("cannot write to stdout: {e}")))?;
        }
    }
    Ok(())
}
