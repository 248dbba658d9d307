//! Flat `key = value` run configuration.
//!
//! One assignment per line; `#` starts a comment; blank lines are ignored.
//! Numbers accept `inf` and simple fractions such as `10/3`; lists are
//! comma-separated. Unknown and repeated keys are errors.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::Serialize;

use crate::evolution::Quadrature;
use crate::expansion::step_count_for;
use crate::randomization::{RandomLaw, WindowSpec};
use crate::spectral::{GridSpec, TimeGrid};

/// Regularity floor of the residual solver.
pub const S_INFINITY: f64 = 1.0 / 6.0;

/// Every accepted key with its default (`None` = required) and meaning.
pub const KEYS: &[(&str, Option<&str>, &str)] = &[
    ("experiment", None, "randomize | expand | solve | tail | smooth-fit | counterexample | dispersive | bilinear | gain"),
    ("seed", None, "master seed of the ensemble"),
    ("grid.points", None, "grid points M per axis (power of two, >= 8)"),
    ("grid.oversampling", Some("1"), "box scale R: the box is [0, 2πR)³"),
    ("grid.dealias", Some("2/3"), "retained fraction of the Nyquist range"),
    ("time.horizon", Some("0.35"), "horizon T (evaluation time of smooth-fit)"),
    ("time.nodes", Some("17"), "time nodes M_t on [0, T]"),
    ("time.quadrature", Some("trapezoid"), "trapezoid | gauss-legendre-2"),
    ("random.window", Some("sharp-cube"), "sharp-cube | smooth-bump"),
    ("random.width", Some("0.25"), "transition width of the smooth-bump window"),
    ("random.law", Some("gaussian"), "gaussian | circle"),
    ("random.members", Some("32"), "ensemble size"),
    ("regularity.s", Some("0.3"), "data regularity s"),
    ("regularity.sigma", Some("0.5"), "output regularity σ"),
    ("regularity.k", Some("auto"), "expansion depth k, or auto"),
    ("data.kind", Some("profiled"), "profiled | bump | plane-wave"),
    ("data.delta", Some("0.01"), "profile offset δ: ‖P_N φ‖ = N^{-(s+δ)}"),
    ("data.amplitude", Some("1"), "factor applied to the data"),
    ("data.width", Some("0.5"), "bump width"),
    ("data.mode", Some("1,0,0"), "plane-wave mode index"),
    ("output", Some("out"), "output directory"),
    ("expand.member", Some("0"), "ensemble member to expand"),
    ("expand.variant", Some("zeta"), "zeta | z"),
    ("solve.member", Some("0"), "ensemble member to solve"),
    ("solve.tolerance", Some("1e-10"), "Picard stopping tolerance"),
    ("solve.max_iterations", Some("60"), "Picard iteration cap"),
    ("tail.norm", Some("strichartz"), "strichartz | hs"),
    ("tail.q", Some("10/3"), "time exponent q"),
    ("tail.r", Some("10/3"), "space exponent r"),
    ("tail.thresholds", Some("41"), "thresholds on [0, max sample]"),
    ("smooth.k_max", Some("4"), "deepest tower index"),
    ("smooth.fit_lo", Some("4"), "smallest fitted block"),
    ("smooth.fit_hi", Some("16"), "largest fitted block"),
    ("counterexample.kind", Some("z3"), "z3 | trilinear"),
    ("counterexample.ns", Some("8,16,32"), "frequency sweep N"),
    ("counterexample.box_scale", Some("1"), "box side λ of the z3 construction (trilinear uses λ = N/2)"),
    ("counterexample.offset", Some("4"), "box offset factor c"),
    ("counterexample.nodes", Some("9"), "time nodes on [0, t_*]"),
    ("dispersive.r", Some("2,6,inf"), "Lebesgue exponents"),
    ("dispersive.times", Some("16"), "geometric time samples across the window"),
    ("bilinear.n1", Some("4"), "low block N₁"),
    ("bilinear.n2", Some("8,16,32,64"), "high blocks N₂"),
    ("bilinear.width1", Some("0.5"), "width of the low-frequency bump"),
    ("bilinear.width2", Some("0.5"), "width of the high-frequency packet"),
    ("bilinear.direction", Some("1,1.4142135623730951,1.7320508075688772"), "packet direction"),
    ("gain.k", Some("2"), "tower index of the examined term"),
    ("gain.q", Some("4"), "time exponent q"),
    ("gain.r", Some("6"), "space exponent r"),
    ("gain.axis", Some("frequency"), "frequency | time"),
    ("gain.values", Some("2,4,8"), "blocks N (frequency) or horizons T (time)"),
    ("gain.block", Some("none"), "block for time sweeps, or none"),
];

/// A configuration error, with the offending line when there is one.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl ConfigError {
    fn at(line: usize, message: impl Into<String>) -> Self {
        Self { line: Some(line), message: message.into() }
    }

    fn global(message: impl Into<String>) -> Self {
        Self { line: None, message: message.into() }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

/// The experiment a run executes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Randomize,
    Expand,
    Solve,
    Tail,
    SmoothFit,
    Counterexample,
    Dispersive,
    Bilinear,
    Gain,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 9] = [
        Self::Randomize,
        Self::Expand,
        Self::Solve,
        Self::Tail,
        Self::SmoothFit,
        Self::Counterexample,
        Self::Dispersive,
        Self::Bilinear,
        Self::Gain,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Randomize => "randomize",
            Self::Expand => "expand",
            Self::Solve => "solve",
            Self::Tail => "tail",
            Self::SmoothFit => "smooth-fit",
            Self::Counterexample => "counterexample",
            Self::Dispersive => "dispersive",
            Self::Bilinear => "bilinear",
            Self::Gain => "gain",
        }
    }
}

impl FromStr for ExperimentKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Self::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| format!("unknown experiment `{s}`"))
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DataKind {
    Profiled { delta: f64 },
    Bump { width: f64 },
    PlaneWave { mode: [i64; 3] },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DataConfig {
    pub kind: DataKind,
    pub amplitude: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RandomConfig {
    pub window: WindowSpec,
    pub law: RandomLaw,
    pub seed: u64,
    pub members: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegularityConfig {
    pub s: f64,
    pub sigma: f64,
    /// Resolved expansion depth; `None` when `auto` and `s` lies outside `(1/6, 1/2)`.
    pub k: Option<usize>,
    pub k_was_auto: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TailNorm {
    Strichartz,
    Hs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CounterexampleKind {
    Z3,
    Trilinear,
}

/// Experiment-specific parameters, all with documented defaults.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentParams {
    pub expand_member: usize,
    pub expand_full_z: bool,
    pub solve_member: usize,
    pub solve_tolerance: f64,
    pub solve_max_iterations: usize,
    pub tail_norm: TailNorm,
    pub tail_q: f64,
    pub tail_r: f64,
    pub tail_thresholds: usize,
    pub smooth_k_max: usize,
    pub smooth_fit: (u64, u64),
    pub counterexample_kind: CounterexampleKind,
    pub counterexample_ns: Vec<f64>,
    pub counterexample_box_scale: f64,
    pub counterexample_offset: f64,
    pub counterexample_nodes: usize,
    pub dispersive_r: Vec<f64>,
    pub dispersive_times: usize,
    pub bilinear_n1: u64,
    pub bilinear_n2: Vec<u64>,
    pub bilinear_widths: (f64, f64),
    pub bilinear_direction: [f64; 3],
    pub gain_k: usize,
    pub gain_q: f64,
    pub gain_r: f64,
    pub gain_time_axis: bool,
    pub gain_values: Vec<f64>,
    pub gain_block: Option<u64>,
}

/// A validated run configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub experiment: ExperimentKind,
    pub grid: GridSpec,
    pub time_grid: TimeGrid,
    pub quadrature: Quadrature,
    pub random: RandomConfig,
    pub regularity: RegularityConfig,
    pub data: DataConfig,
    pub params: ExperimentParams,
    pub output: PathBuf,
    /// Non-fatal findings such as a depth outside the bracket of `s`.
    pub warnings: Vec<String>,
}

struct Entries {
    map: BTreeMap<String, (String, usize)>,
}

impl Entries {
    fn raw(&self, key: &str) -> (String, Option<usize>) {
        match self.map.get(key) {
            Some((v, l)) => (v.clone(), Some(*l)),
            None => {
                let default = KEYS.iter().find(|(k, _, _)| *k == key).and_then(|(_, d, _)| *d);
                (default.expect("required keys are checked up front").to_string(), None)
            }
        }
    }

    fn get<T>(&self, key: &str, parse: impl Fn(&str) -> Result<T, String>) -> Result<T, ConfigError> {
        let (v, line) = self.raw(key);
        parse(&v).map_err(|e| ConfigError { line, message: format!("{key}: {e}") })
    }

    fn line(&self, key: &str) -> Option<usize> {
        self.map.get(key).map(|(_, l)| *l)
    }

    fn err(&self, key: &str, message: impl Into<String>) -> ConfigError {
        ConfigError { line: self.line(key), message: format!("{key}: {}", message.into()) }
    }
}

/// `inf`, `-inf`, fractions `a/b`, or any `f64` literal.
pub fn parse_number(s: &str) -> Result<f64, String> {
    let t = s.trim();
    let v = match t {
        "inf" | "+inf" | "infinity" => f64::INFINITY,
        "-inf" => f64::NEG_INFINITY,
        _ => match t.split_once('/') {
            Some((a, b)) => {
                let a: f64 = a.trim().parse().map_err(|_| format!("`{t}` is not a number"))?;
                let b: f64 = b.trim().parse().map_err(|_| format!("`{t}` is not a number"))?;
                if b == 0.0 {
                    return Err(format!("`{t}` divides by zero"));
                }
                a / b
            }
            None => t.parse().map_err(|_| format!("`{t}` is not a number"))?,
        },
    };
    if v.is_nan() {
        return Err(format!("`{t}` is not a number"));
    }
    Ok(v)
}

fn parse_uint(s: &str) -> Result<u64, String> {
    s.trim().parse().map_err(|_| format!("`{}` is not a non-negative integer", s.trim()))
}

fn parse_list<T>(s: &str, item: impl Fn(&str) -> Result<T, String>) -> Result<Vec<T>, String> {
    let items: Vec<T> = s.split(',').map(|p| item(p.trim())).collect::<Result<_, _>>()?;
    if items.is_empty() {
        return Err("empty list".into());
    }
    Ok(items)
}

fn finite(v: f64) -> Result<f64, String> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("{v} is not finite"))
    }
}

fn positive(v: f64) -> Result<f64, String> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("{v} is not a positive number"))
    }
}

fn tokens(text: &str) -> Result<Entries, ConfigError> {
    let mut map: BTreeMap<String, (String, usize)> = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split_once('#').map_or(raw, |(a, _)| a).trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| ConfigError::at(line_no, format!("expected `key = value`, found `{line}`")))?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() {
            return Err(ConfigError::at(line_no, "missing key before `=`"));
        }
        if !KEYS.iter().any(|(k, _, _)| *k == key) {
            return Err(ConfigError::at(line_no, format!("unknown key `{key}`")));
        }
        if value.is_empty() {
            return Err(ConfigError::at(line_no, format!("missing value for `{key}`")));
        }
        if let Some((_, first)) = map.get(key) {
            return Err(ConfigError::at(
                line_no,
                format!("duplicate key `{key}` (first set on line {first}, again on line {line_no})"),
            ));
        }
        map.insert(key.to_string(), (value.to_string(), line_no));
    }
    for (k, default, _) in KEYS {
        if default.is_none() && !map.contains_key(*k) {
            return Err(ConfigError::global(format!("missing required key `{k}`")));
        }
    }
    Ok(Entries { map })
}

/// Parse and validate a configuration.
///
/// Every parameter is range-checked here, before any computation. `k = auto`
/// resolves from `s`; an explicit `k` outside the bracket of `s` only warns.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let e = tokens(text)?;
    let experiment: ExperimentKind = e.get("experiment", |s| s.parse())?;
    let seed = e.get("seed", parse_uint)?;
    let points = e.get("grid.points", parse_uint)? as usize;
    let oversampling = e.get("grid.oversampling", parse_uint)? as usize;
    let dealias = e.get("grid.dealias", parse_number)?;
    let grid = GridSpec::with_dealias(points, oversampling, dealias).map_err(|err| e.err("grid.points", err.to_string()))?;
    let horizon = e.get("time.horizon", |s| parse_number(s).and_then(positive))?;
    let nodes = e.get("time.nodes", parse_uint)? as usize;
    if nodes < 2 {
        return Err(e.err("time.nodes", "need at least 2 nodes"));
    }
    let time_grid = TimeGrid::new(horizon, nodes).map_err(|err| e.err("time.horizon", err.to_string()))?;
    let quadrature: Quadrature = e.get("time.quadrature", |s| s.parse::<Quadrature>().map_err(|x| x.to_string()))?;

    let width = e.get("random.width", parse_number)?;
    let window = match e.get("random.window", |s| Ok(s.to_string()))?.as_str() {
        "sharp-cube" => WindowSpec::SharpCube,
        "smooth-bump" => WindowSpec::smooth_bump(width).map_err(|m| e.err("random.width", m))?,
        other => return Err(e.err("random.window", format!("unknown window `{other}`"))),
    };
    let law = match e.get("random.law", |s| Ok(s.to_string()))?.as_str() {
        "gaussian" => RandomLaw::ComplexGaussian,
        "circle" => RandomLaw::UniformCircle,
        other => return Err(e.err("random.law", format!("unknown law `{other}`"))),
    };
    let members = e.get("random.members", parse_uint)? as usize;
    if members == 0 {
        return Err(e.err("random.members", "ensemble must have at least one member"));
    }

    let s = e.get("regularity.s", |v| parse_number(v).and_then(finite))?;
    if !(0.0..1.0).contains(&s) {
        return Err(e.err("regularity.s", format!("{s} outside [0, 1)")));
    }
    let sigma = e.get("regularity.sigma", |v| parse_number(v).and_then(finite))?;
    let mut warnings = Vec::new();
    if experiment == ExperimentKind::Solve && s <= S_INFINITY {
        return Err(e.err("regularity.s", format!("{s} is not above s_∞ = 1/6; the residual solver needs s > 1/6")));
    }
    let k_raw = e.get("regularity.k", |v| Ok(v.to_string()))?;
    let (k, k_was_auto) = if k_raw == "auto" {
        (step_count_for(s).ok(), true)
    } else {
        let k = parse_uint(&k_raw).map_err(|m| e.err("regularity.k", m))? as usize;
        if k == 0 {
            return Err(e.err("regularity.k", "depth must be at least 1"));
        }
        match step_count_for(s) {
            Ok(want) if want != k => warnings.push(format!(
                "regularity.k = {k} differs from the depth {want} selected by s = {s}"
            )),
            Err(_) => warnings.push(format!("s = {s} lies outside (1/6, 1/2); k = {k} is not bracketed")),
            _ => {}
        }
        (Some(k), false)
    };
    if matches!(experiment, ExperimentKind::Solve | ExperimentKind::Expand) && k.is_none() {
        return Err(e.err("regularity.k", format!("auto depth is undefined for s = {s}; set k explicitly")));
    }

    let amplitude = e.get("data.amplitude", |v| parse_number(v).and_then(finite))?;
    let data_kind = match e.get("data.kind", |v| Ok(v.to_string()))?.as_str() {
        "profiled" => DataKind::Profiled { delta: e.get("data.delta", |v| parse_number(v).and_then(finite))? },
        "bump" => DataKind::Bump { width: e.get("data.width", |v| parse_number(v).and_then(positive))? },
        "plane-wave" => {
            let m = e.get("data.mode", |v| {
                parse_list(v, |x| x.parse::<i64>().map_err(|_| format!("`{x}` is not an integer")))
            })?;
            let mode: [i64; 3] = m.try_into().map_err(|_| e.err("data.mode", "need three components"))?;
            if !grid.is_retained(mode) {
                return Err(e.err("data.mode", "mode outside the retained range"));
            }
            DataKind::PlaneWave { mode }
        }
        other => return Err(e.err("data.kind", format!("unknown data kind `{other}`"))),
    };
    let output = PathBuf::from(e.get("output", |v| Ok(v.to_string()))?);

    let params = parse_params(&e, &grid, members, experiment)?;
    for key in e.map.keys() {
        if let Some(owner) = key_owner(key) {
            if owner != experiment {
                warnings.push(format!("`{key}` has no effect on experiment `{experiment}`"));
            }
        }
    }
    Ok(RunConfig {
        experiment,
        grid,
        time_grid,
        quadrature,
        random: RandomConfig { window, law, seed, members },
        regularity: RegularityConfig { s, sigma, k, k_was_auto },
        data: DataConfig { kind: data_kind, amplitude },
        params,
        output,
        warnings,
    })
}

/// Experiment that reads a prefixed key, if the key is experiment specific.
fn key_owner(key: &str) -> Option<ExperimentKind> {
    let prefix = key.split_once('.')?.0;
    Some(match prefix {
        "expand" => ExperimentKind::Expand,
        "solve" => ExperimentKind::Solve,
        "tail" => ExperimentKind::Tail,
        "smooth" => ExperimentKind::SmoothFit,
        "counterexample" => ExperimentKind::Counterexample,
        "dispersive" => ExperimentKind::Dispersive,
        "bilinear" => ExperimentKind::Bilinear,
        "gain" => ExperimentKind::Gain,
        _ => return None,
    })
}

/// Parameters of every experiment; checks that depend on the grid only run
/// for the selected experiment.
fn parse_params(
    e: &Entries,
    grid: &GridSpec,
    members: usize,
    experiment: ExperimentKind,
) -> Result<ExperimentParams, ConfigError> {
    let member = |key: &str| -> Result<usize, ConfigError> {
        let m = e.get(key, parse_uint)? as usize;
        if m >= members {
            return Err(e.err(key, format!("member {m} outside an ensemble of {members}")));
        }
        Ok(m)
    };
    let expand_full_z = match e.get("expand.variant", |v| Ok(v.to_string()))?.as_str() {
        "zeta" => false,
        "z" => true,
        other => return Err(e.err("expand.variant", format!("unknown variant `{other}`"))),
    };
    let tail_norm = match e.get("tail.norm", |v| Ok(v.to_string()))?.as_str() {
        "strichartz" => TailNorm::Strichartz,
        "hs" => TailNorm::Hs,
        other => return Err(e.err("tail.norm", format!("unknown norm `{other}`"))),
    };
    let exponent = |key: &str, finite_only: bool| -> Result<f64, ConfigError> {
        let v = e.get(key, parse_number)?;
        if !(v >= 2.0) || (finite_only && v.is_infinite()) {
            return Err(e.err(key, format!("{v} must be {}at least 2", if finite_only { "finite and " } else { "" })));
        }
        Ok(v)
    };
    let smooth_k_max = e.get("smooth.k_max", parse_uint)? as usize;
    if !(1..=8).contains(&smooth_k_max) {
        return Err(e.err("smooth.k_max", "must lie in 1..=8"));
    }
    let fit_lo = e.get("smooth.fit_lo", parse_uint)?;
    let fit_hi = e.get("smooth.fit_hi", parse_uint)?;
    if !(fit_lo.is_power_of_two() && fit_hi.is_power_of_two() && fit_lo < fit_hi) {
        return Err(ConfigError {
            line: e.line("smooth.fit_lo").or_else(|| e.line("smooth.fit_hi")),
            message: format!("smooth.fit_lo/fit_hi: fit window [{fit_lo}, {fit_hi}] must be dyadic with lo < hi"),
        });
    }
    let counterexample_kind = match e.get("counterexample.kind", |v| Ok(v.to_string()))?.as_str() {
        "z3" => CounterexampleKind::Z3,
        "trilinear" => CounterexampleKind::Trilinear,
        other => return Err(e.err("counterexample.kind", format!("unknown construction `{other}`"))),
    };
    let counterexample_ns = e.get("counterexample.ns", |v| parse_list(v, |x| parse_number(x).and_then(positive)))?;
    let counterexample_nodes = e.get("counterexample.nodes", parse_uint)? as usize;
    if counterexample_nodes < 2 {
        return Err(e.err("counterexample.nodes", "need at least 2 nodes"));
    }
    let dispersive_r = e.get("dispersive.r", |v| parse_list(v, parse_number))?;
    if dispersive_r.iter().any(|r| !(*r >= 2.0)) {
        return Err(e.err("dispersive.r", "exponents must be at least 2"));
    }
    let dispersive_times = e.get("dispersive.times", parse_uint)? as usize;
    if dispersive_times < 3 {
        return Err(e.err("dispersive.times", "need at least 3 times"));
    }
    let bilinear_n1 = e.get("bilinear.n1", parse_uint)?;
    let bilinear_n2 = e.get("bilinear.n2", |v| parse_list(v, parse_uint))?;
    for n in std::iter::once(&bilinear_n1).chain(&bilinear_n2) {
        if !n.is_power_of_two() {
            return Err(e.err("bilinear.n2", format!("block {n} is not dyadic")));
        }
        if experiment == ExperimentKind::Bilinear && *n as f64 > 0.5 * grid.nyquist() {
            return Err(e.err("bilinear.n2", format!("block {n} exceeds half the Nyquist frequency {}", grid.nyquist())));
        }
    }
    if bilinear_n2.iter().any(|n| *n < bilinear_n1) {
        return Err(e.err("bilinear.n2", "every N₂ must be at least N₁"));
    }
    let w1 = e.get("bilinear.width1", |v| parse_number(v).and_then(positive))?;
    let w2 = e.get("bilinear.width2", |v| parse_number(v).and_then(positive))?;
    let dir = e.get("bilinear.direction", |v| parse_list(v, |x| parse_number(x).and_then(finite)))?;
    let bilinear_direction: [f64; 3] = dir.try_into().map_err(|_| e.err("bilinear.direction", "need three components"))?;
    if bilinear_direction.iter().all(|d| *d == 0.0) {
        return Err(e.err("bilinear.direction", "direction must be non-zero"));
    }
    let gain_k = e.get("gain.k", parse_uint)? as usize;
    if !(2..=5).contains(&gain_k) {
        return Err(e.err("gain.k", "must lie in 2..=5"));
    }
    let gain_time_axis = match e.get("gain.axis", |v| Ok(v.to_string()))?.as_str() {
        "frequency" => false,
        "time" => true,
        other => return Err(e.err("gain.axis", format!("unknown axis `{other}`"))),
    };
    let gain_q = exponent("gain.q", false)?;
    let gain_r = exponent("gain.r", true)?;
    if gain_time_axis != (gain_r < 6.0) {
        return Err(e.err("gain.r", "frequency sweeps need r >= 6 and time sweeps r < 6"));
    }
    let gain_values = e.get("gain.values", |v| parse_list(v, |x| parse_number(x).and_then(positive)))?;
    if !gain_time_axis && gain_values.iter().any(|v| v.fract() != 0.0 || !(*v as u64).is_power_of_two()) {
        return Err(e.err("gain.values", "frequency sweeps take dyadic blocks"));
    }
    let gain_block = match e.get("gain.block", |v| Ok(v.to_string()))?.as_str() {
        "none" => None,
        v => {
            let n = parse_uint(v).map_err(|m| e.err("gain.block", m))?;
            if !n.is_power_of_two() {
                return Err(e.err("gain.block", "block must be dyadic"));
            }
            Some(n)
        }
    };
    Ok(ExperimentParams {
        expand_member: member("expand.member")?,
        expand_full_z,
        solve_member: member("solve.member")?,
        solve_tolerance: e.get("solve.tolerance", |v| parse_number(v).and_then(positive))?,
        solve_max_iterations: e.get("solve.max_iterations", parse_uint)? as usize,
        tail_norm,
        tail_q: exponent("tail.q", true)?,
        tail_r: exponent("tail.r", true)?,
        tail_thresholds: e.get("tail.thresholds", parse_uint)? as usize,
        smooth_k_max,
        smooth_fit: (fit_lo, fit_hi),
        counterexample_kind,
        counterexample_ns,
        counterexample_box_scale: e.get("counterexample.box_scale", |v| parse_number(v).and_then(positive))?,
        counterexample_offset: e.get("counterexample.offset", |v| parse_number(v).and_then(positive))?,
        counterexample_nodes,
        dispersive_r,
        dispersive_times,
        bilinear_n1,
        bilinear_n2,
        bilinear_widths: (w1, w2),
        bilinear_direction,
        gain_k,
        gain_q,
        gain_r,
        gain_time_axis,
        gain_values,
        gain_block,
    })
}
