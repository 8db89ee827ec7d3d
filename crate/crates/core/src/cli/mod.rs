//! Command-line front door: argument types, dispatch and output records.
//!
//! Each command produces an [`Emission`]; the binary renders it as plain
//! text, a JSON record `{op, inputs_digest, value, tolerance}`, or CSV.

mod registry;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::acceptance;
use crate::distributions::euler_character;
use crate::error::{Error, Result};
use crate::hamiltonian::{
    self, krein_check, krein_model,
    propagate::{normalize, snapshot_csv},
    HamiltonianConfig, Method,
};
use crate::interval_topology::{IntervalSet, Orientation};
use crate::piecewise::{test_function, Smooth};
use crate::stieltjes::{self, norms, Measure, MeasureKind};
use crate::symplectic::{check_closed_dh2, flow, HamiltonianPair, PhasePoint, Rect, Which};

pub use registry::named_function;

#[derive(Debug, Parser)]
#[command(name = "semiflux", version, about = "Semicontinuous calculus and delta-prime Hamiltonian experiments")]
pub struct Cli {
    /// TOML file with a [hamiltonian] table; flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Write the rendered output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// ⟨f, φ'⟩ under an orientation, by integration by parts.
    Pair {
        #[arg(long)]
        f: String,
        #[arg(long, default_value = "gaussian")]
        phi: String,
        #[arg(long, default_value = "left")]
        orientation: Orientation,
    },
    /// Measure of a set under the Stieltjes measure of a distribution function.
    Measures {
        #[arg(long)]
        f: String,
        #[arg(long, default_value = "left")]
        kind: String,
        #[arg(long)]
        set: IntervalSet,
    },
    /// Components minus jump atoms.
    Euler {
        #[arg(long)]
        f: String,
        #[arg(long, default_value = "standard")]
        orientation: Orientation,
    },
    /// Sorted eigenvalues of the discretized operator
    Spectrum(HamArgs),
    /// sup, L^p and BV norms over a bounded set.
    Norms {
        #[arg(long)]
        f: String,
        #[arg(long)]
        set: IntervalSet,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
    },
    /// ‖Ĥφ‖ over the bound chain for a named test function.
    NormRatio {
        #[command(flatten)]
        ham: HamArgs,
        #[arg(long, default_value = "gaussian")]
        phi: String,
    },
    /// Imaginary-time evolution of a normalized initial state.
    Propagate {
        #[command(flatten)]
        ham: HamArgs,
        #[arg(long, default_value_t = 0.1)]
        tau: f64,
        /// `exponential` or `trotter`.
        #[arg(long, default_value = "exponential")]
        method: String,
        #[arg(long, default_value_t = 64)]
        slices: usize,
        /// Gaussian bump centre of the initial state.
        #[arg(long, default_value_t = 0.3)]
        center: f64,
    },
    /// RK4 flow of H1 or H2 and the closedness residual of dH2.
    Symplectic {
        /// α(q) as smooth-function JSON; defaults to ½ tanh q.
        #[arg(long)]
        alpha: Option<String>,
        /// θ(q) as smooth-function JSON; defaults to 0.
        #[arg(long)]
        theta: Option<String>,
        #[arg(long, default_value = "h2")]
        which: String,
        #[arg(long, default_value_t = 0.0)]
        q0: f64,
        #[arg(long, default_value_t = 1.0)]
        p0: f64,
        #[arg(long, default_value_t = 1.0)]
        t_end: f64,
        #[arg(long, default_value_t = 1e-3)]
        dt: f64,
        #[arg(long, default_value_t = 32)]
        grid: usize,
    },
    /// J-symmetry and signature of the model A = -sgn(x) d²/dx².
    Krein {
        #[arg(long, alias = "grid-n", default_value_t = 64)]
        n: usize,
        #[arg(long, default_value_t = std::f64::consts::TAU)]
        circumference: f64,
        #[arg(long, default_value = "left")]
        orientation: Orientation,
    },
    /// Runs every acceptance criterion; exit status 0 iff all pass.
    CheckAll,
}

#[derive(Clone, Debug, Default, Args)]
pub struct HamArgs {
    /// Kinetic scale a [default: 1]
    #[arg(long)]
    pub a: Option<f64>,
    /// Coupling α of the sign term [default: 0]
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    /// Side on which sgn is assigned at 0 [default: left]
    #[arg(long)]
    pub orientation: Option<Orientation>,
    /// Grid nodes, even and ≥ 8 [default: 64]
    #[arg(long, alias = "n")]
    pub grid_n: Option<usize>,
    /// Period of the grid [default: 2π]
    #[arg(long)]
    pub circumference: Option<f64>,
    /// Multiplier of α in the coefficient [default: 0.25]
    #[arg(long)]
    pub factor: Option<f64>,
    /// Allow a coefficient that changes sign (complex spectrum)
    #[arg(long)]
    pub krein_override: bool,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    #[serde(default)]
    hamiltonian: Option<HamiltonianFile>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct HamiltonianFile {
    a: Option<f64>,
    alpha: Option<f64>,
    orientation: Option<Orientation>,
    grid_n: Option<usize>,
    circumference: Option<f64>,
    factor: Option<f64>,
    krein_override: Option<bool>,
}

/// Defaults, then the `[hamiltonian]` table, then flags.
pub fn hamiltonian_config(file: Option<&str>, flags: &HamArgs) -> Result<HamiltonianConfig> {
    let table = match file {
        Some(text) => toml::from_str::<ConfigFile>(text)
            .map_err(|e| Error::InvalidArgument(format!("config: {}", e.message())))?
            .hamiltonian
            .unwrap_or_default(),
        None => HamiltonianFile::default(),
    };
    let d = HamiltonianConfig::default();
    let cfg = HamiltonianConfig {
        a: flags.a.or(table.a).unwrap_or(d.a),
        alpha: flags.alpha.or(table.alpha).unwrap_or(d.alpha),
        orientation: flags.orientation.or(table.orientation).unwrap_or(d.orientation),
        grid_n: flags.grid_n.or(table.grid_n).unwrap_or(d.grid_n),
        circumference: flags.circumference.or(table.circumference).unwrap_or(d.circumference),
        factor: flags.factor.or(table.factor).unwrap_or(d.factor),
        krein_override: flags.krein_override || table.krein_override.unwrap_or(false),
    };
    cfg.validate()?;
    Ok(cfg)
}

/// The outcome of one command before rendering.
#[derive(Clone, Debug, PartialEq)]
pub struct Emission {
    pub op: &'static str,
    pub inputs: Value,
    pub value: Value,
    pub tolerance: Option<f64>,
    pub text: String,
    pub csv: Option<String>,
    /// False only for a failing `check-all`.
    pub success: bool,
}

#[derive(Serialize)]
struct Record<'a> {
    op: &'a str,
    inputs_digest: String,
    value: &'a Value,
    tolerance: Option<f64>,
}

/// SHA-256 of the compact JSON of the inputs.
pub fn digest(inputs: &Value) -> String {
    hex::encode(Sha256::digest(inputs.to_string().as_bytes()))
}

impl Emission {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => format!("{}\n", self.text),
            Format::Json => {
                let r = Record { op: self.op, inputs_digest: digest(&self.inputs), value: &self.value, tolerance: self.tolerance };
                format!("{}\n", serde_json::to_string_pretty(&r).expect("records serialize"))
            }
            Format::Csv => match &self.csv {
                Some(c) => c.clone(),
                None => format!("op,value\n{},{}\n", self.op, self.text.replace(',', ";")),
            },
        }
    }
}

/// Twelve significant digits, printed with a decimal point.
pub fn short(v: f64) -> String {
    let r: f64 = format!("{v:.11e}").parse().unwrap_or(v);
    let r = if r == 0.0 { 0.0 } else { r };
    format!("{r:?}")
}

fn emit(op: &'static str, inputs: Value, value: Value, text: String) -> Emission {
    Emission { op, inputs, value, tolerance: None, text, csv: None, success: true }
}

fn smooth_arg(arg: &Option<String>, default: Smooth) -> Result<Smooth> {
    match arg {
        None => Ok(default),
        Some(s) => match test_function(s) {
            Ok(f) => Ok(f),
            Err(_) => serde_json::from_str(s).map_err(|e| Error::InvalidArgument(format!("smooth function {s:?}: {e}"))),
        },
    }
}

fn measure_kind(s: &str) -> Result<MeasureKind> {
    match s.to_ascii_lowercase().as_str() {
        "left" | "l" => Ok(MeasureKind::StieltjesLeft),
        "right" | "r" => Ok(MeasureKind::StieltjesRight),
        "lebesgue" | "standard" => Ok(MeasureKind::Lebesgue),
        other => Err(Error::InvalidArgument(format!("unknown measure kind {other:?}"))),
    }
}

/// Dispatches a parsed command. `config` is the text of `--config`.
pub fn run(cmd: &Command, config: Option<&str>) -> Result<Emission> {
    Ok(match cmd {
        Command::Pair { f, phi, orientation } => {
            let g = named_function(f)?;
            let v = stieltjes::pair_against_test_derivative(&g, &test_function(phi)?, *orientation)?;
            let mut e = emit("pair", json!({"f": f, "phi": phi, "orientation": orientation}), json!(v), short(v));
            e.tolerance = Some(1e-8);
            e
        }
        Command::Measures { f, kind, set } => {
            let m = Measure::from_distribution(measure_kind(kind)?, named_function(f)?)?;
            let v = m.measure_of(set)?;
            emit("measures", json!({"f": f, "kind": kind, "set": set.to_string()}), json!(v), short(v))
        }
        Command::Euler { f, orientation } => {
            let v = euler_character(&named_function(f)?, *orientation);
            emit("euler", json!({"f": f, "orientation": orientation}), json!(v), v.to_string())
        }
        Command::Spectrum(args) => {
            let cfg = hamiltonian_config(config, args)?;
            let s = hamiltonian::build(&cfg)?.spectrum()?;
            let text = match &s {
                hamiltonian::Spectrum::Real(v) => v.iter().map(|x| short(*x)).collect::<Vec<_>>().join(" "),
                hamiltonian::Spectrum::Complex(v) => {
                    v.iter().map(|(re, im)| format!("{}{:+}i", short(*re), short(*im))).collect::<Vec<_>>().join(" ")
                }
            };
            let mut e = emit("spectrum", json!(cfg), json!(s), text);
            e.csv = Some(s.to_csv());
            e
        }
        Command::Norms { f, set, p } => {
            let n = norms::norms(&named_function(f)?, set, *p)?;
            let text = format!("sup {} L1 {} L2 {} L{} {} BV {}", short(n.sup), short(n.l1), short(n.l2), p, short(n.lp.1), short(n.bv));
            let mut e = emit("norms", json!({"f": f, "set": set.to_string(), "p": p}), json!(n), text);
            e.csv =
                Some(format!("sup,l1,l2,p,lp,bv\n{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n", n.sup, n.l1, n.l2, p, n.lp.1, n.bv));
            e
        }
        Command::NormRatio { ham, phi } => {
            let cfg = hamiltonian_config(config, ham)?;
            let r = hamiltonian::operator_norm_ratio(&hamiltonian::build(&cfg)?, &test_function(phi)?)?;
            let mut e = emit("norm-ratio", json!({"hamiltonian": cfg, "phi": phi}), json!(r), short(r.ratio));
            e.tolerance = Some(1e-6);
            e
        }
        Command::Propagate { ham, tau, method, slices, center } => {
            let cfg = hamiltonian_config(config, ham)?;
            let h = hamiltonian::build(&cfg)?;
            let m = match method.to_ascii_lowercase().as_str() {
                "exponential" | "exp" => Method::Exponential,
                "trotter" => Method::TrotterSlices(*slices),
                other => return Err(Error::InvalidArgument(format!("unknown method {other:?}"))),
            };
            let raw: Vec<f64> = h.grid.iter().map(|x| (-(x - center) * (x - center)).exp()).collect();
            let psi0 = normalize(&raw, cfg.spacing())?;
            let psi = hamiltonian::propagate(&h, &psi0, *tau, m)?;
            let norm = hamiltonian::propagate::grid_norm(&psi, cfg.spacing());
            let inputs = json!({"hamiltonian": cfg, "tau": tau, "method": m, "center": center});
            let mut e = emit("propagate", inputs, json!({"x": h.grid, "psi": psi, "norm": norm}), format!("norm {}", short(norm)));
            e.csv = Some(snapshot_csv(&h.grid, &psi));
            e
        }
        Command::Symplectic { alpha, theta, which, q0, p0, t_end, dt, grid } => {
            let half_tanh = Smooth::Tanh { amp: 0.5, center: 0.0, scale: 1.0 };
            let pair = HamiltonianPair::new(smooth_arg(theta, Smooth::zero())?, smooth_arg(alpha, half_tanh)?);
            let w = match which.to_ascii_lowercase().as_str() {
                "h1" => Which::H1,
                "h2" => Which::H2,
                other => return Err(Error::InvalidArgument(format!("unknown Hamiltonian {other:?}"))),
            };
            let tr = flow(&pair, w, PhasePoint::new(*q0, *p0), *t_end, *dt)?;
            let sq = Rect { q0: -1.0, q1: 1.0, p0: -1.0, p1: 1.0 };
            let closed = check_closed_dh2(&pair, sq, *grid)?;
            let last = tr.last();
            let value = json!({"drift": tr.drift(), "final": last, "closedness_residual": closed});
            let inputs = json!({"pair": pair, "which": which, "q0": q0, "p0": p0, "t_end": t_end, "dt": dt, "grid": grid});
            let text = format!("drift {:e} closedness {:e}", tr.drift(), closed);
            let mut e = emit("symplectic", inputs, value, text);
            e.csv = Some(tr.to_csv());
            e
        }
        Command::Krein { n, circumference, orientation } => {
            let (h, k) = krein_model(*n, *circumference, *orientation)?;
            let r = krein_check(&h, &k)?;
            let text = format!(
                "residual {:e} positive {} negative {} neutral {}",
                r.j_symmetry_residual, r.pos_subspace_dim, r.neg_subspace_dim, r.neutral_dim
            );
            let mut e = emit("krein", json!({"n": n, "circumference": circumference, "orientation": orientation}), json!(r), text);
            e.tolerance = Some(1e-12);
            e
        }
        Command::CheckAll => {
            let outcomes = acceptance::run_all();
            let table = outcomes.iter().map(|o| o.line()).collect::<Vec<_>>().join("\n");
            let failed = outcomes.iter().filter(|o| !o.passed).count();
            let text = format!("{table}\n{} passed, {failed} failed", outcomes.len() - failed);
            let mut csv = String::from("id,name,passed,measured,expected,tolerance\n");
            for o in &outcomes {
                csv.push_str(&format!("{},{},{},\"{}\",\"{}\",\"{}\"\n", o.id, o.name, o.passed, o.measured, o.expected, o.tolerance));
            }
            let mut e = emit("check-all", json!({}), json!(outcomes), text);
            e.csv = Some(csv);
            e.success = failed == 0;
            e
        }
    })
}
