//! Command-line front end. `run` returns the process exit code:
//! 0 pass, 1 failed or non-converged verification, 2 usage or configuration error.

use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rug::Float;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result, Side};
use crate::harness::{
    verify_density, verify_energy, verify_fixed_x, verify_moment, verify_wavefunction, MomentKind, RateReport,
    DEFAULT_TOLERANCE,
};
use crate::numeric::fmt_decimal;
use crate::potential::PotentialSpec;
use crate::saddle::{rate_map, rate_map_csv};
use crate::series::{Normalization, SeriesTable};
use crate::trajectory::{profile_csv, Trajectories, TrajectoryBranch, TrajectorySettings, DEFAULT_PROFILE_EPS};

pub const OUT_ENV: &str = "LARGEORDER_OUT";

#[derive(Debug, Parser)]
#[command(name = "largeorder", version, about = "Large-order perturbation theory and its Euclidean saddle points")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
struct Common {
    /// Potential spec file (JSON).
    #[arg(long)]
    potential: Option<PathBuf>,
    /// Run configuration file (JSON); flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long = "precision-bits")]
    precision_bits: Option<u32>,
    /// Relative quadrature tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Output directory (default: $LARGEORDER_OUT or the current directory).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Significant digits in decimal output.
    #[arg(long)]
    digits: Option<usize>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum BranchName {
    Direct,
    Return,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum NormalizationName {
    GaussianOrthogonal,
    ZeroConstant,
}

impl From<NormalizationName> for Normalization {
    fn from(n: NormalizationName) -> Self {
        match n {
            NormalizationName::GaussianOrthogonal => Normalization::GaussianOrthogonal,
            NormalizationName::ZeroConstant => Normalization::ZeroConstant,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Export the exact series through a given order.
    Series {
        #[command(flatten)]
        common: Common,
        #[arg(long, visible_alias = "kmax")]
        orders: Option<usize>,
        #[arg(long, value_enum, default_value = "gaussian-orthogonal")]
        normalization: NormalizationName,
    },
    /// Rate map A(xi0) over a grid and a tau-profile of a representative trajectory.
    Map {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "return")]
        branch: BranchName,
        #[arg(long, default_value = "+", allow_hyphen_values = true)]
        side: Side,
        #[arg(long = "xi0-min", allow_hyphen_values = true)]
        xi0_min: Option<f64>,
        #[arg(long = "xi0-max", allow_hyphen_values = true)]
        xi0_max: Option<f64>,
        #[arg(long, default_value_t = 40)]
        points: usize,
        #[arg(long, default_value_t = 101)]
        samples: usize,
    },
    /// Compare exact large-order data with the saddle-point rates.
    Verify {
        #[command(subcommand)]
        which: Verify,
    },
}

#[derive(Debug, Clone, Args)]
struct VerifyCommon {
    #[command(flatten)]
    common: Common,
    #[arg(long, visible_alias = "orders")]
    kmax: Option<usize>,
    /// Relative tolerance on the rate target.
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    tolerance: f64,
    #[arg(long, value_enum, default_value = "gaussian-orthogonal")]
    normalization: NormalizationName,
}

#[derive(Debug, Subcommand)]
enum Verify {
    Wavefunction {
        #[command(flatten)]
        v: VerifyCommon,
        #[arg(long, allow_hyphen_values = true)]
        xi0: f64,
        #[arg(long, value_enum, default_value = "return")]
        branch: BranchName,
        #[arg(long, default_value = "+", allow_hyphen_values = true)]
        side: Side,
    },
    Energy {
        #[command(flatten)]
        v: VerifyCommon,
    },
    Density {
        #[command(flatten)]
        v: VerifyCommon,
        #[arg(long, allow_hyphen_values = true)]
        xi1: f64,
        #[arg(long, allow_hyphen_values = true)]
        xi2: f64,
    },
    FixedX {
        #[command(flatten)]
        v: VerifyCommon,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        x: f64,
        /// Smallest and largest x of the growth fit.
        #[arg(long = "growth-min", default_value_t = 2.0)]
        growth_min: f64,
        #[arg(long = "growth-max", default_value_t = 4.0)]
        growth_max: f64,
    },
    Moment {
        #[command(flatten)]
        v: VerifyCommon,
        /// Scaled moments with m = round(alpha k).
        #[arg(long, default_value_t = 0.0, conflicts_with = "m")]
        alpha: f64,
        /// Fixed power x^(2m) instead of a scaled one.
        #[arg(long)]
        m: Option<usize>,
    },
}

/// Contents of a `--config` file. Every field is optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    potential: Option<PathBuf>,
    precision_bits: Option<u32>,
    k_max: Option<usize>,
    quadrature_tol: Option<f64>,
    output_dir: Option<PathBuf>,
    digits: Option<usize>,
}

/// Effective settings of a run, after merging flags over the config file
/// over defaults.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub potential: PathBuf,
    pub precision_bits: u32,
    pub k_max: usize,
    pub quadrature_tol: f64,
    pub output_dir: PathBuf,
    pub digits: usize,
}

impl RunConfig {
    fn resolve(common: &Common, k_max: Option<usize>) -> Result<Self> {
        let file = match &common.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| Error::Usage(format!("cannot read config {}: {e}", path.display())))?;
                serde_json::from_str::<ConfigFile>(&text)
                    .map_err(|e| Error::Usage(format!("invalid config {}: {e}", path.display())))?
            }
            None => ConfigFile::default(),
        };
        let potential = common
            .potential
            .clone()
            .or(file.potential)
            .ok_or_else(|| Error::Usage("no potential given (--potential or config)".into()))?;
        let output_dir = common
            .out
            .clone()
            .or(file.output_dir)
            .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("."));
        let config = RunConfig {
            potential,
            precision_bits: common.precision_bits.or(file.precision_bits).unwrap_or(256),
            k_max: k_max.or(file.k_max).unwrap_or(120),
            quadrature_tol: common.tol.or(file.quadrature_tol).unwrap_or(1e-12),
            output_dir,
            digits: common.digits.or(file.digits).unwrap_or(30),
        };
        if config.precision_bits < 64 {
            return Err(Error::Usage("precision-bits must be at least 64".into()));
        }
        if !(config.quadrature_tol > 0.0) {
            return Err(Error::Usage("quadrature tolerance must be positive".into()));
        }
        if config.digits == 0 {
            return Err(Error::Usage("digits must be positive".into()));
        }
        Ok(config)
    }

    fn load_potential(&self) -> Result<PotentialSpec> {
        if !self.potential.is_file() {
            return Err(Error::Usage(format!("potential file {} not found", self.potential.display())));
        }
        PotentialSpec::from_path(&self.potential)
    }

    fn trajectories(&self, spec: PotentialSpec) -> Result<Trajectories> {
        let settings = TrajectorySettings {
            prec: self.precision_bits,
            quad_tol: self.quadrature_tol,
            ..TrajectorySettings::default()
        };
        Trajectories::with_settings(spec, settings)
    }

    /// Metadata block embedded in every output file.
    fn metadata(&self, command: &str, spec: &PotentialSpec, parameters: Value) -> Value {
        json!({
            "command": command,
            "run": self,
            "potential_spec": spec.to_json(),
            "parameters": parameters,
        })
    }

    fn write(&self, name: &str, contents: &str) -> Result<PathBuf> {
        fs::create_dir_all(&self.output_dir)?;
        let path = self.output_dir.join(name);
        fs::write(&path, contents)?;
        Ok(path)
    }
}

fn branch_of(name: BranchName, side: Side) -> TrajectoryBranch {
    match name {
        BranchName::Direct => TrajectoryBranch::direct(side),
        BranchName::Return => TrajectoryBranch::returning(side),
    }
}

/// The decimal number `x` prints as, rounded once to `prec` bits
/// (so `0.05` means 1/20 rather than the nearest double).
fn decimal(prec: u32, x: f64) -> Float {
    match Float::parse(x.to_string()) {
        Ok(p) => Float::with_val(prec, p),
        Err(_) => Float::with_val(prec, x),
    }
}

fn csv_with_header(meta: &Value, body: &str) -> String {
    format!("# config: {meta}\n{body}")
}

/// Parse `args` (including the program name) and execute. Messages go to
/// stdout, errors to stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_usage() {
                2
            } else {
                1
            }
        }
    }
}

fn execute(command: Command) -> Result<i32> {
    match command {
        Command::Series {
            common,
            orders,
            normalization,
        } => {
            let config = RunConfig::resolve(&common, orders)?;
            let spec = config.load_potential()?;
            let k = config.k_max;
            let table = SeriesTable::build(spec.clone(), normalization.into(), k);
            let mut doc = table.to_json(k)?;
            let meta = config.metadata("series", &spec, json!({"orders": k}));
            doc.as_object_mut().expect("series export is an object").insert("config".into(), meta);
            let path = config.write("series.json", &(serde_json::to_string_pretty(&doc)? + "\n"))?;
            println!("series: orders 0..={k} written to {}", path.display());
            Ok(0)
        }
        Command::Map {
            common,
            branch,
            side,
            xi0_min,
            xi0_max,
            points,
            samples,
        } => {
            let config = RunConfig::resolve(&common, None)?;
            let spec = config.load_potential()?;
            let traj = config.trajectories(spec.clone())?;
            command_map(&config, &traj, branch_of(branch, side), xi0_min, xi0_max, points, samples)
        }
        Command::Verify { which } => command_verify(which),
    }
}

fn command_map(
    config: &RunConfig,
    traj: &Trajectories,
    branch: TrajectoryBranch,
    xi0_min: Option<f64>,
    xi0_max: Option<f64>,
    points: usize,
    samples: usize,
) -> Result<i32> {
    let prec = traj.prec();
    if points < 2 {
        return Err(Error::Usage("--points must be at least 2".into()));
    }
    let sign = branch.side.sign();
    let turn = traj.turning_point(branch.side);
    // default range: from near the origin to the branch meeting point
    let meet = match &turn {
        Some(t) => Some(traj.xi0_of_end(t, branch)?),
        None => None,
    };
    let near = decimal(prec, 0.05) * sign;
    let (lo_default, hi_default) = match (branch.is_return(), meet) {
        (true, Some(m)) => (near, m),
        (false, Some(m)) => {
            let far = Float::with_val(prec, m.abs_ref()).max(&decimal(prec, 1.0)) * 10u32 * sign;
            (m, far)
        }
        _ => (near, decimal(prec, 10.0) * sign),
    };
    let lo = xi0_min.map_or(lo_default, |x| decimal(prec, x));
    let hi = xi0_max.map_or(hi_default, |x| decimal(prec, x));
    let xi0s: Vec<Float> = (0..points)
        .map(|i| {
            if i == points - 1 {
                return hi.clone();
            }
            let step = Float::with_val(prec, &hi - &lo) * i as u32 / (points - 1) as u32;
            Float::with_val(prec, &lo + step)
        })
        .collect();
    let rows = rate_map(traj, &xi0s, branch);

    // representative endpoint: the full loop for the return branch, the turn for the direct one
    let end = match (&turn, branch.is_return()) {
        (Some(_), true) => Float::new(prec),
        (Some(t), false) => t.clone(),
        (None, _) => Float::with_val(prec, sign),
    };
    let eps = Float::with_val(prec, DEFAULT_PROFILE_EPS);
    let profile = traj.tau_profile(&end, branch, &eps, samples)?;

    let params = json!({
        "branch": branch.name(),
        "side": branch.side.to_string(),
        "xi0_min": fmt_decimal(&lo, 20),
        "xi0_max": fmt_decimal(&hi, 20),
        "points": points,
        "profile_end": fmt_decimal(&end, 20),
        "profile_eps": DEFAULT_PROFILE_EPS,
        "samples": samples,
    });
    let meta = config.metadata("map", traj.spec(), params);
    let map_path = config.write("rate_map.csv", &csv_with_header(&meta, &rate_map_csv(&rows, config.digits)))?;
    let prof_path = config.write("profile.csv", &csv_with_header(&meta, &profile_csv(&profile, config.digits)))?;
    let unavailable = rows.iter().filter(|r| r.rate.is_none()).count();
    println!(
        "map: {} rows ({unavailable} NA) to {}, {} profile samples to {}",
        rows.len(),
        map_path.display(),
        profile.len(),
        prof_path.display()
    );
    Ok(0)
}

fn write_report(config: &RunConfig, report: &RateReport, meta: &Value) -> Result<()> {
    let name = format!("verify-{}", report.test);
    let json_text = serde_json::to_string_pretty(&report.to_json(config.digits, meta))? + "\n";
    config.write(&format!("{name}.json"), &json_text)?;
    config.write(&format!("{name}.csv"), &report.to_csv(config.digits, meta))?;
    println!(
        "{}: {} extrapolated={} target={} rel_dev={:.3e} tolerance={}",
        report.test,
        report.status(),
        fmt_decimal(&report.core.extrapolated, 10),
        fmt_decimal(&report.target, 10),
        report.relative_deviation(),
        report.tolerance
    );
    Ok(())
}

fn command_verify(which: Verify) -> Result<i32> {
    let v = match &which {
        Verify::Wavefunction { v, .. }
        | Verify::Energy { v }
        | Verify::Density { v, .. }
        | Verify::FixedX { v, .. }
        | Verify::Moment { v, .. } => v.clone(),
    };
    if !(v.tolerance > 0.0) {
        return Err(Error::Usage("--tolerance must be positive".into()));
    }
    let config = RunConfig::resolve(&v.common, v.kmax)?;
    let spec = config.load_potential()?;
    let traj = config.trajectories(spec.clone())?;
    let prec = traj.prec();
    let k = config.k_max;
    let floor = config.precision_bits;
    let table = || SeriesTable::build(spec.clone(), v.normalization.into(), k);
    let f = |x: f64| decimal(prec, x);
    let report = match which {
        Verify::Wavefunction { xi0, branch, side, .. } => {
            let branch = branch_of(branch, side);
            // fail fast on unreachable xi0 before building the series
            crate::saddle::rate_a(&traj, &f(xi0), branch)?;
            verify_wavefunction(&table(), &traj, &f(xi0), branch, k, v.tolerance, floor)?
        }
        Verify::Energy { .. } => verify_energy(&table(), &traj, k, v.tolerance, floor)?,
        Verify::Density { xi1, xi2, .. } => {
            crate::saddle::density_rate_dominant(&traj, &f(xi1), &f(xi2))?;
            verify_density(&table(), &traj, &f(xi1), &f(xi2), &[], k, v.tolerance, floor)?
        }
        Verify::Moment { alpha, m, .. } => {
            let kind = match m {
                Some(m) => MomentKind::Fixed(m),
                None => MomentKind::Scaled(f(alpha)),
            };
            verify_moment(&table(), &traj, &kind, k, v.tolerance, floor)?
        }
        Verify::FixedX {
            x,
            growth_min,
            growth_max,
            ..
        } => {
            if !(growth_max > growth_min) {
                return Err(Error::Usage("--growth-max must exceed --growth-min".into()));
            }
            let xs: Vec<f64> = (0..9).map(|i| growth_min + (growth_max - growth_min) * i as f64 / 8.0).collect();
            let report = verify_fixed_x(&table(), &traj, &f(x), k, &xs, floor)?;
            let meta = config.metadata("verify fixed-x", &spec, json!({"x": x, "growth_x": xs}));
            let json_text = serde_json::to_string_pretty(&report.to_json(config.digits, &meta))? + "\n";
            config.write("verify-fixed-x.json", &json_text)?;
            config.write("verify-fixed-x.csv", &report.to_csv(config.digits, &meta))?;
            let g = report.growth.as_ref().expect("growth grid is non-empty");
            println!(
                "fixed-x: {} spread={:.4} exponent={:.4} linear_slope={:.4}",
                report.status(),
                report.spread,
                g.exponent,
                g.linear_slope
            );
            return Ok(if report.passed { 0 } else { 1 });
        }
    };
    let meta = config.metadata(
        &format!("verify {}", report.test),
        &spec,
        json!({"tolerance": v.tolerance, "normalization": Normalization::from(v.normalization).tag()}),
    );
    write_report(&config, &report, &meta)?;
    Ok(if report.passed { 0 } else { 1 })
}

