//! Command-line front end.
//!
//! Every subcommand resolves a flat JSON config (file values, then flag overrides, then defaults),
//! runs, and writes `result.json`, an optional `trials.csv`, optional plot series and a
//! `manifest.json` into the output directory. `result.json` depends only on the resolved config;
//! the timestamp lives in the manifest.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use chrono::{SecondsFormat, Utc};
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::bohr::{bohr_product, PhysicalConstants, WeighingScenario};
use crate::chsh::{chsh_monte_carlo, chsh_value, MeasurementSettings};
use crate::entangled::make_photon_box;
use crate::epr::{make_epr, wavepacket_uncertainties, PositionWindow, WavepacketParams};
use crate::extended::Extended;
use crate::rng::{trial_seed, RNG_ALGORITHM};
use crate::robertson::{random_triple, sweep_row};
use crate::spectral::{
    fourier_transform, frequency_uncertainty, load_amplitude, make_gaussian, make_rect, read_amplitude_csv,
    time_uncertainty_with, uncertainty_product_with, DivergenceTest, FrequencyGrid, SpectralAmplitude,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_INVARIANT: i32 = 3;

const BOUND_SLACK: f64 = 1e-3;
const BORN_BINS: usize = 20;
const RATE_CHECK_FLOOR: f64 = 1e-8;
const RATE_TOLERANCE: f64 = 1e-6;

#[derive(Parser, Debug)]
#[command(name = "photon-box", version, about = "Numerical experiments on the energy-time uncertainty relation")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// JSON config; flags override its values
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory
    #[arg(long, global = true, default_value = "out")]
    output: PathBuf,
    /// Worker threads for Monte Carlo trials
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Also write (x, y) CSV series under plots/
    #[arg(long, global = true)]
    emit_plot_data: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Δω·Δt of a spectral profile
    Uncertainty {
        /// gaussian, rect or csv
        #[arg(long)]
        profile: Option<String>,
        #[arg(long, allow_negative_numbers = true)]
        omega0: Option<f64>,
        #[arg(long)]
        sigma: Option<f64>,
        #[arg(long)]
        width: Option<f64>,
        #[arg(long)]
        grid_points: Option<usize>,
        /// Amplitude CSV (omega,re,im) for --profile csv
        #[arg(long)]
        amplitude: Option<String>,
        #[arg(long)]
        window_factor: Option<f64>,
    },
    /// Weighing the photon box: collapse, conservation and no-signaling
    PhotonBox {
        #[arg(long)]
        box_rest_frequency: Option<f64>,
        #[arg(long)]
        resolution: Option<f64>,
        #[arg(long)]
        trials: Option<usize>,
        /// Amplitude CSV (omega,re,im); defaults to a Gaussian at ω = 10
        #[arg(long)]
        amplitude: Option<String>,
        #[arg(long)]
        window_factor: Option<f64>,
    },
    /// Two-branch momentum state and Gaussian wavepackets
    Epr {
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long = "wavepacket-l")]
        wavepacket_l: Option<f64>,
    },
    /// CHSH value of the singlet, exact or sampled
    Chsh {
        /// Use a = 0, a' = π/2, b = π/4, b' = 3π/4
        #[arg(long, conflicts_with = "settings")]
        optimal: bool,
        /// a,a',b,b' in radians
        #[arg(long, value_delimiter = ',', num_args = 4, allow_negative_numbers = true)]
        settings: Option<Vec<f64>>,
        /// Trials per setting pair; 0 gives the exact value
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Robertson and clock bounds on random finite-dimensional triples
    Robertson {
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        min_dim: Option<usize>,
        #[arg(long)]
        max_dim: Option<usize>,
    },
    /// Bohr's weighing argument in closed form
    Bohr {
        #[arg(long)]
        hbar: Option<f64>,
        #[arg(long)]
        c: Option<f64>,
        #[arg(long)]
        g: Option<f64>,
        #[arg(long)]
        t: Option<f64>,
        #[arg(long)]
        t0: Option<f64>,
        #[arg(long)]
        delta_x: Option<f64>,
        #[arg(long)]
        delta_p: Option<f64>,
        #[arg(long)]
        shutter_delta_t: Option<f64>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Uncertainty { .. } => "uncertainty",
            Command::PhotonBox { .. } => "photon-box",
            Command::Epr { .. } => "epr",
            Command::Chsh { .. } => "chsh",
            Command::Robertson { .. } => "robertson",
            Command::Bohr { .. } => "bohr",
        }
    }

    fn known_keys(&self) -> &'static [&'static str] {
        match self {
            Command::Uncertainty { .. } => &[
                "seed",
                "profile",
                "omega0",
                "sigma",
                "width",
                "grid_points",
                "amplitude",
                "window_factor",
            ],
            Command::PhotonBox { .. } => &[
                "seed",
                "box_rest_frequency",
                "amplitude",
                "resolution",
                "trials",
                "window_factor",
            ],
            Command::Epr { .. } => &["seed", "p", "trials", "wavepacket_L"],
            Command::Chsh { .. } => &["seed", "settings", "trials"],
            Command::Robertson { .. } => &["seed", "trials", "min_dim", "max_dim"],
            Command::Bohr { .. } => &[
                "seed",
                "hbar",
                "c",
                "g",
                "t",
                "t0",
                "delta_x",
                "delta_p",
                "shutter_delta_t",
                "enforce_ratio",
            ],
        }
    }

    /// Flag values, keyed like the config file.
    fn overrides(&self) -> Vec<(&'static str, Value)> {
        let mut out: Vec<(&'static str, Option<Value>)> = Vec::new();
        match self {
            Command::Uncertainty {
                profile,
                omega0,
                sigma,
                width,
                grid_points,
                amplitude,
                window_factor,
            } => {
                out.push(("profile", profile.as_ref().map(|v| json!(v))));
                out.push(("omega0", omega0.map(|v| json!(v))));
                out.push(("sigma", sigma.map(|v| json!(v))));
                out.push(("width", width.map(|v| json!(v))));
                out.push(("grid_points", grid_points.map(|v| json!(v))));
                out.push(("amplitude", amplitude.as_ref().map(|v| json!(v))));
                out.push(("window_factor", window_factor.map(|v| json!(v))));
            }
            Command::PhotonBox {
                box_rest_frequency,
                resolution,
                trials,
                amplitude,
                window_factor,
            } => {
                out.push(("box_rest_frequency", box_rest_frequency.map(|v| json!(v))));
                out.push(("resolution", resolution.map(|v| json!(v))));
                out.push(("trials", trials.map(|v| json!(v))));
                out.push(("amplitude", amplitude.as_ref().map(|v| json!(v))));
                out.push(("window_factor", window_factor.map(|v| json!(v))));
            }
            Command::Epr { p, trials, wavepacket_l } => {
                out.push(("p", p.map(|v| json!(v))));
                out.push(("trials", trials.map(|v| json!(v))));
                out.push(("wavepacket_L", wavepacket_l.map(|v| json!(v))));
            }
            Command::Chsh {
                optimal,
                settings,
                trials,
            } => {
                let optimal = optimal.then(|| json!(MeasurementSettings::optimal().as_array()));
                out.push(("settings", optimal.or_else(|| settings.as_ref().map(|v| json!(v)))));
                out.push(("trials", trials.map(|v| json!(v))));
            }
            Command::Robertson {
                trials,
                min_dim,
                max_dim,
            } => {
                out.push(("trials", trials.map(|v| json!(v))));
                out.push(("min_dim", min_dim.map(|v| json!(v))));
                out.push(("max_dim", max_dim.map(|v| json!(v))));
            }
            Command::Bohr {
                hbar,
                c,
                g,
                t,
                t0,
                delta_x,
                delta_p,
                shutter_delta_t,
            } => {
                for (k, v) in [
                    ("hbar", hbar),
                    ("c", c),
                    ("g", g),
                    ("t", t),
                    ("t0", t0),
                    ("delta_x", delta_x),
                    ("delta_p", delta_p),
                    ("shutter_delta_t", shutter_delta_t),
                ] {
                    out.push((k, v.map(|v| json!(v))));
                }
            }
        }
        out.into_iter().filter_map(|(k, v)| v.map(|v| (k, v))).collect()
    }
}

#[derive(Debug)]
enum Failure {
    Config(String),
    Invariant(String),
    Io(String),
}

impl Failure {
    fn exit_code(&self) -> i32 {
        match self {
            Failure::Config(_) => EXIT_CONFIG,
            Failure::Invariant(_) => EXIT_INVARIANT,
            Failure::Io(_) => EXIT_IO,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Config(m) => write!(f, "config error: {m}"),
            Failure::Invariant(m) => write!(f, "invariant failure: {m}"),
            Failure::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<crate::Error> for Failure {
    fn from(e: crate::Error) -> Self {
        match e {
            crate::Error::Internal(m) => Failure::Invariant(m),
            other => Failure::Config(other.to_string()),
        }
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

/// Config values for one subcommand; records every value actually used.
struct Params {
    prefix: String,
    values: Map<String, Value>,
    resolved: Map<String, Value>,
}

impl Params {
    fn new(prefix: &str, values: Map<String, Value>, known: &[&str]) -> Outcome<Self> {
        if let Some(k) = values.keys().find(|k| !known.contains(&k.as_str())) {
            return Err(Failure::Config(format!("unknown key `{prefix}{k}`")));
        }
        Ok(Self {
            prefix: prefix.to_string(),
            values,
            resolved: Map::new(),
        })
    }

    fn bad(&self, key: &str, expected: &str) -> Failure {
        Failure::Config(format!("key `{}{key}`: expected {expected}", self.prefix))
    }

    fn get<T: Serialize>(&mut self, key: &str, default: T, parse: impl Fn(&Value) -> Option<T>, expected: &str) -> Outcome<T> {
        let v = match self.values.get(key) {
            None => default,
            Some(raw) => parse(raw).ok_or_else(|| self.bad(key, expected))?,
        };
        let echoed = serde_json::to_value(&v).map_err(|e| Failure::Io(e.to_string()))?;
        self.resolved.insert(key.to_string(), echoed);
        Ok(v)
    }

    fn f64(&mut self, key: &str, default: f64) -> Outcome<f64> {
        self.get(key, default, |v| v.as_f64().filter(|x| x.is_finite()), "a finite number")
    }

    fn u64(&mut self, key: &str, default: u64) -> Outcome<u64> {
        self.get(key, default, Value::as_u64, "a non-negative integer")
    }

    fn usize(&mut self, key: &str, default: usize) -> Outcome<usize> {
        self.get(key, default, |v| v.as_u64().and_then(|x| usize::try_from(x).ok()), "a non-negative integer")
    }

    fn bool(&mut self, key: &str, default: bool) -> Outcome<bool> {
        self.get(key, default, Value::as_bool, "true or false")
    }

    fn string(&mut self, key: &str, default: &str) -> Outcome<String> {
        self.get(key, default.to_string(), |v| v.as_str().map(str::to_string), "a string")
    }

    fn raw(&self, key: &str) -> Option<&Value> {
        self.values.get(key)
    }

    fn insert(&mut self, key: &str, v: Value) {
        self.resolved.insert(key.to_string(), v);
    }
}

/// Everything a subcommand produces besides the manifest.
struct Report {
    result: Value,
    trials: Option<Vec<u8>>,
    plots: Vec<(String, Vec<u8>)>,
    input_digests: BTreeMap<String, String>,
    failures: Vec<String>,
}

impl Report {
    fn new(result: impl Serialize) -> Outcome<Self> {
        Ok(Self {
            result: serde_json::to_value(result).map_err(|e| Failure::Io(e.to_string()))?,
            trials: None,
            plots: Vec::new(),
            input_digests: BTreeMap::new(),
            failures: Vec::new(),
        })
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(what());
        }
    }
}

/// Runs the CLI on `args` (program name first) and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            eprintln!("{f}");
            f.exit_code()
        }
    }
}

fn load_config(path: Option<&Path>) -> Outcome<Map<String, Value>> {
    let Some(path) = path else {
        return Ok(Map::new());
    };
    let text = fs::read_to_string(path).map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?;
    match serde_json::from_str(&text) {
        Ok(Value::Object(map)) => Ok(map),
        Ok(_) => Err(Failure::Config(format!("{}: top level must be an object", path.display()))),
        Err(e) => Err(Failure::Config(format!("{}: {e}", path.display()))),
    }
}

fn execute(cli: &Cli) -> Outcome<()> {
    let mut values = load_config(cli.common.config.as_deref())?;
    for (k, v) in cli.command.overrides() {
        values.insert(k.to_string(), v);
    }
    if let Some(seed) = cli.common.seed {
        values.insert("seed".into(), json!(seed));
    }
    let mut params = Params::new("", values, cli.command.known_keys())?;
    let seed = params.u64("seed", 0)?;
    let plots = cli.common.emit_plot_data;

    let work = |params: Params| -> Outcome<(Map<String, Value>, Report)> {
        match &cli.command {
            Command::Uncertainty { .. } => run_uncertainty(params, plots),
            Command::PhotonBox { .. } => run_photon_box(params, seed, plots),
            Command::Epr { .. } => run_epr(params, seed, plots),
            Command::Chsh { .. } => run_chsh(params, seed, plots),
            Command::Robertson { .. } => run_robertson(params, seed, plots),
            Command::Bohr { .. } => run_bohr(params, plots),
        }
    };
    let (resolved, report) = match cli.common.jobs {
        None => work(params)?,
        Some(0) => return Err(Failure::Config("key `jobs`: must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Failure::Io(e.to_string()))?
            .install(|| work(params))?,
    };

    write_outputs(&cli.common.output, cli.command.name(), seed, &resolved, &report)?;
    if report.failures.is_empty() {
        Ok(())
    } else {
        Err(Failure::Invariant(report.failures.join("; ")))
    }
}

/// Hex SHA-256 of the compact JSON encoding of `config` (keys sorted).
pub fn config_digest(config: &Map<String, Value>) -> String {
    let bytes = serde_json::to_vec(config).expect("JSON map always serializes");
    hex::encode(Sha256::digest(bytes))
}

fn write_outputs(dir: &Path, name: &str, seed: u64, resolved: &Map<String, Value>, report: &Report) -> Outcome<()> {
    fs::create_dir_all(dir).map_err(|e| Failure::Io(format!("{}: {e}", dir.display())))?;
    if let Some(trials) = &report.trials {
        write_atomic(&dir.join("trials.csv"), trials)?;
    }
    if !report.plots.is_empty() {
        let plot_dir = dir.join("plots");
        fs::create_dir_all(&plot_dir).map_err(|e| Failure::Io(format!("{}: {e}", plot_dir.display())))?;
        for (file, bytes) in &report.plots {
            write_atomic(&plot_dir.join(file), bytes)?;
        }
    }
    write_atomic(&dir.join("result.json"), &pretty(&report.result)?)?;
    let manifest = json!({
        "subcommand": name,
        "config_digest": config_digest(resolved),
        "seed": seed,
        "tool_version": env!("CARGO_PKG_VERSION"),
        "timestamp": Utc::now().to_rfc3339_opts(SecondsFormat::Secs, true),
        "rng_algorithm": RNG_ALGORITHM,
        "resolved_config": resolved,
        "input_digests": report.input_digests,
    });
    write_atomic(&dir.join("manifest.json"), &pretty(&manifest)?)
}

fn pretty(v: &Value) -> Outcome<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(v).map_err(|e| Failure::Io(e.to_string()))?;
    bytes.push(b'\n');
    Ok(bytes)
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Outcome<()> {
    let file = path.file_name().and_then(|f| f.to_str()).unwrap_or("out");
    let tmp = path.with_file_name(format!(".{file}.{}.tmp", std::process::id()));
    fs::write(&tmp, bytes)
        .and_then(|_| fs::rename(&tmp, path))
        .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn csv_bytes<S: Serialize>(rows: impl IntoIterator<Item = S>) -> Outcome<Vec<u8>> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    for row in rows {
        w.serialize(row).map_err(|e| Failure::Io(e.to_string()))?;
    }
    w.into_inner().map_err(|e| Failure::Io(e.to_string()))
}

#[derive(Serialize)]
struct XY {
    x: f64,
    y: f64,
}

fn spectrum_series(a: &SpectralAmplitude) -> Outcome<Vec<u8>> {
    csv_bytes(a.grid().points().zip(a.density()).map(|(x, y)| XY { x, y }))
}

fn time_series(a: &SpectralAmplitude, factor: f64) -> Outcome<Vec<u8>> {
    let p = fourier_transform(a, factor)?;
    let density = p.density();
    csv_bytes((0..p.count()).map(|k| XY { x: p.t(k), y: density[k] }))
}

/// Loads an `omega,re,im` file and records its digest.
fn load_csv_amplitude(path: &str, digests: &mut BTreeMap<String, String>) -> Outcome<SpectralAmplitude> {
    let bytes = fs::read(path).map_err(|e| Failure::Config(format!("key `amplitude`: cannot read {path}: {e}")))?;
    digests.insert(path.to_string(), hex::encode(Sha256::digest(&bytes)));
    let rows = read_amplitude_csv(bytes.as_slice())
        .map_err(|e| Failure::Config(format!("key `amplitude`: {path}: {e}")))?;
    Ok(load_amplitude(&rows)?.amplitude)
}

struct ProfileDefaults {
    omega0: f64,
    grid_points: usize,
}

/// Builds a Gaussian or rect profile from `omega0`, `sigma`/`width` and `grid_points`.
fn analytic_profile(p: &mut Params, profile: &str, d: &ProfileDefaults) -> Outcome<SpectralAmplitude> {
    let omega0 = p.f64("omega0", d.omega0)?;
    let n = p.usize("grid_points", d.grid_points)?;
    match profile {
        "gaussian" => {
            let sigma = p.f64("sigma", 1.0)?;
            let grid = FrequencyGrid::spanning(omega0 - 10.0 * sigma, omega0 + 10.0 * sigma, n)?;
            Ok(make_gaussian(omega0, sigma, grid)?)
        }
        "rect" => {
            let width = p.f64("width", 1.0)?;
            let grid = FrequencyGrid::spanning(omega0 - width, omega0 + width, n)?;
            Ok(make_rect(omega0, width, grid)?)
        }
        other => Err(Failure::Config(format!(
            "key `{}profile`: unknown profile `{other}` (gaussian, rect or csv)",
            p.prefix
        ))),
    }
}

#[derive(Serialize)]
struct UncertaintyResult {
    profile: String,
    delta_omega: f64,
    delta_t: Extended,
    product: Extended,
    bound_satisfied: bool,
    advisory: bool,
    frequency: crate::spectral::UncertaintyReport,
    time: crate::spectral::UncertaintyReport,
}

fn run_uncertainty(mut p: Params, plots: bool) -> Outcome<(Map<String, Value>, Report)> {
    let profile = p.string("profile", "gaussian")?;
    let window_factor = p.f64("window_factor", 1.0)?;
    let mut digests = BTreeMap::new();
    let a = if profile == "csv" {
        let path = p.string("amplitude", "")?;
        if path.is_empty() {
            return Err(Failure::Config("key `amplitude`: --profile csv needs an amplitude file".into()));
        }
        load_csv_amplitude(&path, &mut digests)?
    } else {
        analytic_profile(
            &mut p,
            &profile,
            &ProfileDefaults {
                omega0: 0.0,
                grid_points: 2048,
            },
        )?
    };
    let test = DivergenceTest::default();
    let u = uncertainty_product_with(&a, window_factor, &test)?;
    let freq = frequency_uncertainty(&a)?;
    let time = time_uncertainty_with(&fourier_transform(&a, window_factor)?, &test)?;
    let mut report = Report::new(UncertaintyResult {
        profile,
        delta_omega: u.delta_omega,
        delta_t: u.delta_t,
        product: u.product,
        bound_satisfied: u.bound_satisfied,
        advisory: u.advisory,
        frequency: freq,
        time,
    })?;
    report.input_digests = digests;
    report.check(u.bound_satisfied || u.advisory, || {
        format!("Δω·Δt = {:?} below 1/2", u.product)
    });
    if plots {
        report.plots.push(("spectrum.csv".into(), spectrum_series(&a)?));
        report.plots.push(("time_profile.csv".into(), time_series(&a, window_factor)?));
    }
    Ok((p.resolved, report))
}

#[derive(Serialize)]
struct PhotonTrial {
    trial: u64,
    seed: u64,
    omega_meas: f64,
    box_reading: f64,
    post_sigma_omega: f64,
    post_sigma_t: Extended,
}

#[derive(Serialize)]
struct SpreadSummary {
    mean: f64,
    sigma: f64,
}

#[derive(Serialize)]
struct PhotonBoxResult {
    box_rest_frequency: f64,
    resolution: f64,
    trials: usize,
    prior: SpreadSummary,
    conservation_violations: usize,
    born_rule: crate::stats::ChiSquare,
    born_rule_passed: bool,
    mean_post_sigma_omega: f64,
    mean_post_sigma_t: Extended,
    divergent_trials: usize,
    min_product: Extended,
}

#[derive(Serialize)]
struct CollapseRow {
    resolution: f64,
    delta_omega: f64,
    delta_t: Extended,
}

fn run_photon_box(mut p: Params, seed: u64, plots: bool) -> Outcome<(Map<String, Value>, Report)> {
    let rest = p.f64("box_rest_frequency", 100.0)?;
    let resolution = p.f64("resolution", 0.01)?;
    let trials = p.usize("trials", 1000)?;
    let window_factor = p.f64("window_factor", 1.0)?;
    let mut digests = BTreeMap::new();
    let prior = match p.raw("amplitude").cloned() {
        Some(Value::String(path)) => {
            p.insert("amplitude", json!(path));
            load_csv_amplitude(&path, &mut digests)?
        }
        Some(Value::Object(spec)) => {
            let (a, resolved) = inline_amplitude(spec)?;
            p.insert("amplitude", Value::Object(resolved));
            a
        }
        None => {
            let (a, resolved) = inline_amplitude(Map::new())?;
            p.insert("amplitude", Value::Object(resolved));
            a
        }
        Some(_) => return Err(p.bad("amplitude", "a CSV path or an object")),
    };
    let joint = make_photon_box(rest, prior)?;
    if trials == 0 {
        return Err(p.bad("trials", "at least 1"));
    }

    let rows = (0..trials as u64)
        .into_par_iter()
        .map(|i| -> Outcome<(PhotonTrial, Extended)> {
            let s = trial_seed(seed, i);
            let (record, post) = joint.measure_box_energy(resolution, s)?;
            let (photon, _) = post.marginal_uncertainties()?;
            let u = post.photon_uncertainty_product(window_factor)?;
            Ok((
                PhotonTrial {
                    trial: i,
                    seed: s,
                    omega_meas: record.outcome_frequency,
                    box_reading: record.box_energy_reading,
                    post_sigma_omega: photon.sigma,
                    post_sigma_t: u.delta_t,
                },
                u.product,
            ))
        })
        .collect::<Outcome<Vec<_>>>()?;

    let born = joint.born_rule_check(resolution, trials, BORN_BINS, seed)?;
    let violations = rows
        .iter()
        .filter(|(r, _)| r.box_reading + r.omega_meas != joint.box_rest_frequency())
        .count();
    let n = trials as f64;
    let finite_t: Vec<f64> = rows.iter().filter_map(|(r, _)| r.post_sigma_t.finite()).collect();
    let divergent = trials - finite_t.len();
    let min_product = rows
        .iter()
        .map(|(_, prod)| *prod)
        .min_by(|a, b| a.to_f64().total_cmp(&b.to_f64()))
        .unwrap_or(Extended::Infinite);
    let prior_report = frequency_uncertainty(joint.photon())?;
    let result = PhotonBoxResult {
        box_rest_frequency: joint.box_rest_frequency(),
        resolution,
        trials,
        prior: SpreadSummary {
            mean: prior_report.mean,
            sigma: prior_report.sigma,
        },
        conservation_violations: violations,
        born_rule: born.chi_square,
        born_rule_passed: born.passed,
        mean_post_sigma_omega: rows.iter().map(|(r, _)| r.post_sigma_omega).sum::<f64>() / n,
        mean_post_sigma_t: if divergent > 0 {
            Extended::Infinite
        } else {
            Extended::Finite(finite_t.iter().sum::<f64>() / n)
        },
        divergent_trials: divergent,
        min_product,
    };
    let mut report = Report::new(result)?;
    report.input_digests = digests;
    report.check(violations == 0, || format!("{violations} trials broke energy conservation"));
    report.check(min_product.to_f64() >= 0.5 - BOUND_SLACK, || {
        format!("posterior Δω·Δt = {:?} below 1/2", min_product)
    });
    report.trials = Some(csv_bytes(rows.iter().map(|(r, _)| r))?);

    if plots {
        report.plots.push(("prior_spectrum.csv".into(), spectrum_series(joint.photon())?));
        let (_, post) = joint.measure_box_energy(resolution, trial_seed(seed, 0))?;
        report.plots.push(("posterior_spectrum.csv".into(), spectrum_series(post.photon())?));
        let sweep = [0.1, 0.03, 0.01, 0.003, 0.001]
            .iter()
            .map(|&r| -> Outcome<CollapseRow> {
                let (_, post) = joint.measure_box_energy(r, trial_seed(seed, 0))?;
                let u = post.photon_uncertainty_product(window_factor)?;
                Ok(CollapseRow {
                    resolution: r,
                    delta_omega: u.delta_omega,
                    delta_t: u.delta_t,
                })
            })
            .collect::<Outcome<Vec<_>>>()?;
        report.plots.push(("delta_t_vs_resolution.csv".into(), csv_bytes(sweep)?));
    }
    Ok((p.resolved, report))
}

/// Inline `amplitude` object: `profile`, `omega0`, `sigma` or `width`, `grid_points`.
fn inline_amplitude(spec: Map<String, Value>) -> Outcome<(SpectralAmplitude, Map<String, Value>)> {
    let mut p = Params::new("amplitude.", spec, &["profile", "omega0", "sigma", "width", "grid_points"])?;
    let profile = p.string("profile", "gaussian")?;
    let a = analytic_profile(
        &mut p,
        &profile,
        &ProfileDefaults {
            omega0: 10.0,
            grid_points: 1024,
        },
    )?;
    Ok((a, p.resolved))
}

#[derive(Serialize)]
struct EprTrial {
    trial: u64,
    seed: u64,
    outcome: f64,
    second_momentum: f64,
}

#[derive(Serialize)]
struct WavepacketSummary {
    #[serde(rename = "L")]
    l: f64,
    delta_x: f64,
    delta_p: f64,
    product: f64,
}

#[derive(Serialize)]
struct EprResult {
    p: f64,
    trials: usize,
    plus_fraction: f64,
    anticorrelation_violations: usize,
    wavepacket: WavepacketSummary,
}

fn wavepacket_summary(l: f64) -> Outcome<WavepacketSummary> {
    let u = wavepacket_uncertainties(
        &WavepacketParams {
            p_center: 0.0,
            width_l: l,
        },
        &PositionWindow::default(),
    )?;
    Ok(WavepacketSummary {
        l,
        delta_x: u.delta_x,
        delta_p: u.delta_p,
        product: u.product,
    })
}

fn run_epr(mut p: Params, seed: u64, plots: bool) -> Outcome<(Map<String, Value>, Report)> {
    let momentum = p.f64("p", 1.0)?;
    let trials = p.usize("trials", 10_000)?;
    let l = p.f64("wavepacket_L", 10.0)?;
    let state = make_epr(momentum)?;
    if trials == 0 {
        return Err(p.bad("trials", "at least 1"));
    }
    let rows = (0..trials as u64)
        .into_par_iter()
        .map(|i| -> Outcome<EprTrial> {
            let s = trial_seed(seed, i);
            let (outcome, post) = state.measure_first_momentum(s)?;
            Ok(EprTrial {
                trial: i,
                seed: s,
                outcome,
                second_momentum: post.second_particle_momentum()?,
            })
        })
        .collect::<Outcome<Vec<_>>>()?;
    let violations = rows.iter().filter(|r| r.second_momentum != -r.outcome).count();
    let plus = rows.iter().filter(|r| r.outcome > 0.0).count();
    let wavepacket = wavepacket_summary(l)?;
    let product = wavepacket.product;
    let mut report = Report::new(EprResult {
        p: momentum,
        trials,
        plus_fraction: plus as f64 / trials as f64,
        anticorrelation_violations: violations,
        wavepacket,
    })?;
    report.check(violations == 0, || format!("{violations} trials were not anticorrelated"));
    report.check(product >= 0.5 - BOUND_SLACK, || format!("wavepacket Δx·Δp = {product} below 1/2"));
    report.trials = Some(csv_bytes(&rows)?);
    if plots {
        let sweep = [1.0, 3.0, 10.0, 30.0, 100.0]
            .iter()
            .map(|&l| wavepacket_summary(l))
            .collect::<Outcome<Vec<_>>>()?;
        report.plots.push(("wavepacket_vs_L.csv".into(), csv_bytes(sweep)?));
    }
    Ok((p.resolved, report))
}

#[derive(Serialize)]
struct ChshResult {
    #[serde(rename = "S")]
    s: f64,
    std_error: f64,
    settings: [f64; 4],
    trials: usize,
}

fn run_chsh(mut p: Params, seed: u64, plots: bool) -> Outcome<(Map<String, Value>, Report)> {
    let default = MeasurementSettings::optimal().as_array();
    let angles = p.get(
        "settings",
        default,
        |v| {
            let list: Vec<f64> = v.as_array()?.iter().map(Value::as_f64).collect::<Option<_>>()?;
            <[f64; 4]>::try_from(list).ok()
        },
        "an array of four angles [a, a', b, b']",
    )?;
    let trials = p.usize("trials", 0)?;
    let settings = MeasurementSettings::new(angles[0], angles[1], angles[2], angles[3])?;
    let exact = chsh_value(&settings);
    let (s, std_error) = if trials == 0 {
        (exact, 0.0)
    } else {
        let est = chsh_monte_carlo(&settings, trials, seed)?;
        (est.s_estimate, est.std_error)
    };
    let mut report = Report::new(ChshResult {
        s,
        std_error,
        settings: angles,
        trials,
    })?;
    let tsirelson = 2.0 * std::f64::consts::SQRT_2;
    report.check(exact.abs() <= tsirelson + 1e-9, || format!("|S| = {} exceeds 2√2", exact.abs()));
    if plots {
        let curve = (0..=360).map(|deg| {
            let x = (deg as f64).to_radians();
            XY {
                x,
                y: crate::chsh::singlet_correlation(0.0, x),
            }
        });
        report.plots.push(("correlation.csv".into(), csv_bytes(curve)?));
    }
    Ok((p.resolved, report))
}

#[derive(Serialize)]
struct SweepCsvRow {
    trial: u64,
    dim: usize,
    lhs: f64,
    rhs: f64,
    holds: bool,
    rate_rel_error: f64,
    et_product: Extended,
}

#[derive(Serialize)]
struct RobertsonResult {
    trials: usize,
    min_dim: usize,
    max_dim: usize,
    robertson_violations: usize,
    rate_checked: usize,
    rate_failures: usize,
    max_rate_rel_error: f64,
    clock_violations: usize,
    stationary: usize,
    min_et_product: Extended,
}

fn run_robertson(mut p: Params, seed: u64, plots: bool) -> Outcome<(Map<String, Value>, Report)> {
    let trials = p.usize("trials", 1000)?;
    let min_dim = p.usize("min_dim", 2)?;
    let max_dim = p.usize("max_dim", 8)?;
    random_triple(seed, 0, min_dim, max_dim)?;
    let rows = (0..trials as u64)
        .into_par_iter()
        .map(|i| -> Outcome<_> {
            let (q, h, psi) = random_triple(seed, i, min_dim, max_dim)?;
            Ok(sweep_row(i, &q, &h, &psi)?)
        })
        .collect::<Outcome<Vec<_>>>()?;
    let checked: Vec<_> = rows.iter().filter(|r| r.analytic_rate.abs() > RATE_CHECK_FLOOR).collect();
    let rate_failures = checked.iter().filter(|r| r.rate_rel_error >= RATE_TOLERANCE).count();
    let robertson_violations = rows.iter().filter(|r| !r.holds).count();
    let clock_violations = rows.iter().filter(|r| !r.et_holds).count();
    let result = RobertsonResult {
        trials,
        min_dim,
        max_dim,
        robertson_violations,
        rate_checked: checked.len(),
        rate_failures,
        max_rate_rel_error: checked.iter().map(|r| r.rate_rel_error).fold(0.0, f64::max),
        clock_violations,
        stationary: rows.iter().filter(|r| r.et_product.is_infinite()).count(),
        min_et_product: rows
            .iter()
            .map(|r| r.et_product)
            .min_by(|a, b| a.to_f64().total_cmp(&b.to_f64()))
            .unwrap_or(Extended::Infinite),
    };
    let mut report = Report::new(result)?;
    report.check(robertson_violations == 0, || format!("{robertson_violations} Robertson violations"));
    report.check(rate_failures == 0, || format!("{rate_failures} rate mismatches"));
    report.check(clock_violations == 0, || format!("{clock_violations} clock-bound violations"));
    report.trials = Some(csv_bytes(rows.iter().map(|r| SweepCsvRow {
        trial: r.trial,
        dim: r.dim,
        lhs: r.lhs,
        rhs: r.rhs,
        holds: r.holds,
        rate_rel_error: r.rate_rel_error,
        et_product: r.et_product,
    }))?);
    if plots {
        report
            .plots
            .push(("lhs_vs_rhs.csv".into(), csv_bytes(rows.iter().map(|r| XY { x: r.rhs, y: r.lhs }))?));
    }
    Ok((p.resolved, report))
}

fn run_bohr(mut p: Params, plots: bool) -> Outcome<(Map<String, Value>, Report)> {
    let si = PhysicalConstants::default();
    let constants = PhysicalConstants {
        hbar: p.f64("hbar", si.hbar)?,
        c: p.f64("c", si.c)?,
        g: p.f64("g", si.g)?,
    };
    let scenario = WeighingScenario {
        constants,
        weighing_duration_t: p.f64("t", 1.0)?,
        reference_time_t0: p.f64("t0", 1.0)?,
        delta_x: p.f64("delta_x", 1.0545718e-4)?,
        delta_p: p.f64("delta_p", 1e-30)?,
        shutter_delta_t: p.f64("shutter_delta_t", 1e-9)?,
        enforce_ratio: p.bool("enforce_ratio", true)?,
    };
    let b = bohr_product(&scenario)?;
    let mut report = Report::new(b)?;
    report.check(
        (b.chained_product - b.et_product).abs() <= 1e-12 * b.et_product.abs(),
        || format!("chained product {} differs from (t0/t)·Δp·Δx = {}", b.chained_product, b.et_product),
    );
    if plots {
        let k = &scenario.constants;
        let t0 = scenario.reference_time_t0;
        let limit = 0.5 * crate::bohr::WEAK_FIELD_LIMIT * k.c * k.c / k.g;
        let curve = (0..=100)
            .map(|i| {
                let x = limit * (i as f64 / 50.0 - 1.0);
                Ok(XY {
                    x,
                    y: crate::bohr::gravitational_time_lapse(x, t0, k)?,
                })
            })
            .collect::<Outcome<Vec<_>>>()?;
        report.plots.push(("time_lapse.csv".into(), csv_bytes(curve)?));
    }
    Ok((p.resolved, report))
}
