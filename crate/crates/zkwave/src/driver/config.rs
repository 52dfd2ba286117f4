//! Run configuration: a flat key–value document with dotted sections,
//! overridden by environment and command-line flags.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::initial_data::{smooth_bump, ZeroMode};
use crate::kinetic::{CollisionQuadrature, Mollifier};
use crate::lattice::LatticeSpec;
use crate::expansion::{ModelParams, TimeGrid};
use crate::solver::{Scheme, SolverConfig};

/// Environment variable that overrides `output.dir`.
pub const OUT_DIR_ENV: &str = "ZKWAVE_OUT_DIR";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    #[default]
    Simulate,
    Expand,
    Count,
    Compare,
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Command::Simulate => "simulate",
            Command::Expand => "expand",
            Command::Count => "count",
            Command::Compare => "compare",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeSection {
    pub dim: usize,
    pub size: f64,
    pub radius: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelSection {
    pub lambda: f64,
    pub nu: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileSection {
    pub diameter: f64,
    pub amplitude: f64,
    pub center_radius: f64,
    pub zero_mode: ZeroMode,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeSection {
    pub t_final: f64,
    pub dt: f64,
    pub scheme: Scheme,
    pub dealias: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSection {
    pub members: u64,
    pub checkpoints: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpandSection {
    pub order: usize,
    pub steps: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountSection {
    pub sizes: Vec<f64>,
    /// Integer numerators m of k_x = m/L.
    pub kx: Vec<i64>,
    /// T/L.
    pub window_ratio: f64,
    pub radius: f64,
    pub sigma: f64,
    pub delta: f64,
    pub theta: f64,
    /// Number of β points; the first is isotropic.
    pub beta_points: usize,
    /// Cap on the total number of lattice points visited.
    pub budget: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSection {
    pub slice_count: usize,
    pub sphere_order: usize,
    /// Gaussian mollifier width; 0 selects exact co-area slicing.
    pub eta: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutputSection {
    pub dir: PathBuf,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    #[serde(skip)]
    pub command: Command,
    pub seed: u64,
    pub lattice: LatticeSection,
    pub model: ModelSection,
    pub profile: ProfileSection,
    pub time: TimeSection,
    pub ensemble: EnsembleSection,
    pub expand: ExpandSection,
    pub count: CountSection,
    pub quadrature: QuadratureSection,
    pub output: OutputSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            command: Command::Simulate,
            seed: 0,
            lattice: LatticeSection { dim: 3, size: 8.0, radius: 1.0 },
            model: ModelSection { lambda: 0.5, nu: 0.0 },
            profile: ProfileSection { diameter: 1.0, amplitude: 1.0, center_radius: 0.0, zero_mode: ZeroMode::Zero },
            time: TimeSection { t_final: 0.5, dt: 0.01, scheme: Scheme::Etdrk4, dealias: 2.0 / 3.0 },
            ensemble: EnsembleSection { members: 64, checkpoints: false },
            expand: ExpandSection { order: 2, steps: 32 },
            count: CountSection {
                sizes: vec![8.0, 16.0],
                kx: vec![1, 2, 4],
                window_ratio: 1.0,
                radius: 1.0,
                sigma: 0.0,
                delta: 1.0,
                theta: 0.1,
                beta_points: 1,
                budget: 1e9,
            },
            quadrature: QuadratureSection { slice_count: 64, sphere_order: 16, eta: 0.0 },
            output: OutputSection { dir: PathBuf::from("out") },
        }
    }
}

/// Command-line and environment overrides.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    /// Value of the output-directory environment variable, if set.
    pub env_out: Option<PathBuf>,
}

impl Overrides {
    pub fn from_env() -> Overrides {
        Overrides { env_out: std::env::var_os(OUT_DIR_ENV).map(PathBuf::from), ..Overrides::default() }
    }
}

/// Parse a configuration document, fill defaults and validate.
pub fn parse_config(text: &str, command: Command) -> Result<RunConfig> {
    let doc: toml::Table = text.parse().map_err(|e: toml::de::Error| Error::Config(e.message().to_string()))?;
    let defaults = toml::Table::try_from(RunConfig::default()).map_err(|e| Error::Config(e.to_string()))?;
    let mut known = BTreeMap::new();
    flatten("", &defaults, &mut known);
    let mut given = BTreeMap::new();
    flatten("", &doc, &mut given);
    let unknown: Vec<&str> = given.keys().filter(|k| !known.contains_key(*k)).map(String::as_str).collect();
    if !unknown.is_empty() {
        return Err(Error::Config(format!("unknown keys: {}", unknown.join(", "))));
    }
    let mut merged = defaults;
    for (key, value) in given {
        let v = coerce(&key, &known[&key], value)?;
        set_path(&mut merged, &key, v);
    }
    let mut cfg: RunConfig = toml::Value::Table(merged).try_into().map_err(|e: toml::de::Error| Error::Config(e.message().to_string()))?;
    cfg.command = command;
    cfg.validate()?;
    Ok(cfg)
}

/// Read `path` (if any), apply overrides in the order flags > env > file > defaults.
pub fn load_config(command: Command, path: Option<&std::path::Path>, ov: &Overrides) -> Result<RunConfig> {
    let text = match path {
        Some(p) => std::fs::read_to_string(p).map_err(|e| Error::Config(format!("cannot read {}: {e}", p.display())))?,
        None => String::new(),
    };
    let mut cfg = parse_config(&text, command)?;
    if let Some(d) = &ov.env_out {
        cfg.output.dir = d.clone();
    }
    if let Some(d) = &ov.out {
        cfg.output.dir = d.clone();
    }
    if let Some(s) = ov.seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

fn flatten(prefix: &str, t: &toml::Table, out: &mut BTreeMap<String, toml::Value>) {
    for (k, v) in t {
        let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
        match v {
            toml::Value::Table(inner) => flatten(&key, inner, out),
            _ => {
                out.insert(key, v.clone());
            }
        }
    }
}

fn set_path(t: &mut toml::Table, key: &str, v: toml::Value) {
    match key.split_once('.') {
        Some((head, rest)) => {
            if let Some(toml::Value::Table(inner)) = t.get_mut(head) {
                set_path(inner, rest, v);
            }
        }
        None => {
            t.insert(key.to_string(), v);
        }
    }
}

fn type_name(v: &toml::Value) -> &'static str {
    match v {
        toml::Value::String(_) => "string",
        toml::Value::Integer(_) => "integer",
        toml::Value::Float(_) => "float",
        toml::Value::Boolean(_) => "boolean",
        toml::Value::Datetime(_) => "datetime",
        toml::Value::Array(_) => "array",
        toml::Value::Table(_) => "table",
    }
}

/// Check `v` against the type of the default and widen integers to floats.
fn coerce(key: &str, default: &toml::Value, v: toml::Value) -> Result<toml::Value> {
    use toml::Value as V;
    let mismatch = |v: &V| Error::Config(format!("key `{key}`: expected {}, got {}", type_name(default), type_name(v)));
    Ok(match (default, v) {
        (V::Float(_), V::Integer(i)) => V::Float(i as f64),
        (V::Float(_), v @ V::Float(_)) => v,
        (V::Integer(_), v @ V::Integer(_)) => v,
        (V::String(_), v @ V::String(_)) => v,
        (V::Boolean(_), v @ V::Boolean(_)) => v,
        (V::Array(d), V::Array(items)) => {
            let proto = d.first().ok_or_else(|| Error::Config(format!("key `{key}`: no element type")))?;
            V::Array(items.into_iter().map(|x| coerce(key, proto, x)).collect::<Result<_>>()?)
        }
        (_, v) => return Err(mismatch(&v)),
    })
}

fn range(key: &str, ok: bool, what: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Config(format!("key `{key}`: {what}")))
    }
}

impl RunConfig {
    /// Every precondition of the modules the command touches, checked up front.
    pub fn validate(&self) -> Result<()> {
        self.spec()?;
        self.params()?;
        smooth_bump(self.lattice.dim, self.profile.diameter, self.profile.amplitude, self.profile.center_radius)?;
        self.solver()?;
        range("time.t_final", self.time.t_final >= 0.0 && self.time.t_final.is_finite(), "must be nonnegative")?;
        range("ensemble.members", self.ensemble.members >= 2, "an ensemble needs at least two members")?;
        range("expand.order", self.expand.order <= 4, "orders above 4 are not supported")?;
        range("expand.steps", self.expand.steps >= 2, "at least two time steps")?;
        if self.command == Command::Expand {
            TimeGrid::new(self.time.t_final, self.expand.steps)?;
        }
        let c = &self.count;
        range("count.sizes", !c.sizes.is_empty() && c.sizes.iter().all(|l| *l > 0.0 && l.is_finite()), "sizes must be positive")?;
        range("count.kx", !c.kx.is_empty() && c.kx.iter().all(|m| *m != 0), "k_x numerators must be nonzero")?;
        range("count.window_ratio", c.window_ratio > 0.0 && c.window_ratio <= 1.0, "T/L must lie in (0, 1]")?;
        range("count.radius", c.radius > 0.0, "must be positive")?;
        range("count.delta", c.delta > 0.0, "must be positive")?;
        range("count.theta", c.theta >= 0.0, "must be nonnegative")?;
        range("count.beta_points", c.beta_points >= 1, "at least one point")?;
        range("count.sigma", c.sigma.is_finite(), "must be finite")?;
        range("count.budget", c.budget > 0.0, "must be positive")?;
        self.quadrature()?.validate()?;
        range("quadrature.eta", self.quadrature.eta >= 0.0, "must be nonnegative")?;
        Ok(())
    }

    pub fn spec(&self) -> Result<LatticeSpec> {
        LatticeSpec::new(self.lattice.dim, self.lattice.size, self.lattice.radius)
    }

    pub fn params(&self) -> Result<ModelParams> {
        ModelParams::new(self.model.lambda, self.model.nu, self.lattice.size, self.lattice.dim)
    }

    pub fn solver(&self) -> Result<SolverConfig> {
        let cfg = SolverConfig {
            spec: self.spec()?,
            params: self.params()?,
            dt: self.time.dt,
            scheme: self.time.scheme,
            dealias: self.time.dealias,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn quadrature(&self) -> Result<CollisionQuadrature> {
        let mollifier = if self.quadrature.eta > 0.0 { Mollifier::Gaussian { eta: self.quadrature.eta } } else { Mollifier::Exact };
        Ok(CollisionQuadrature { slice_count: self.quadrature.slice_count, sphere_order: self.quadrature.sphere_order, mollifier })
    }

    /// The configuration as a document `parse_config` accepts.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    /// SHA-256 (hex) of the canonical JSON of everything except the output
    /// location, prefixed with the command.
    pub fn digest(&self) -> String {
        let mut c = self.clone();
        c.output.dir = PathBuf::new();
        let body = serde_json::to_string(&c).expect("configuration serializes");
        let mut h = Sha256::new();
        h.update(self.command.to_string().as_bytes());
        h.update(b"\n");
        h.update(body.as_bytes());
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}
