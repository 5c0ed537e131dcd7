//! Run configuration: defaults, then a `key = value` file, then flags.

use cosmoweyl::charts::{SdSParams, SdsGauge, SdsGeometry};
use serde_json::{json, Value};
use std::fmt;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "configuration error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Foliation {
    Sds,
    Ellipsoid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    DeSitter,
    Sds,
}

/// Check tolerances, all strictly positive.
#[derive(Debug, Clone, PartialEq)]
pub struct Tolerances {
    pub table1: f64,
    pub weyl: f64,
    pub energy: f64,
    pub hodge: f64,
    pub sobolev: f64,
    pub penrose: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub lambda: f64,
    pub m: f64,
    pub n_theta: usize,
    pub n_phi: usize,
    pub gauge: SdsGauge,
    pub out_dir: PathBuf,
    /// Radius of the `table1` sphere.
    pub r: f64,
    /// Outgoing optical coordinate of the sampled spheres.
    pub ustar: f64,
    /// Radial window `[r0, r1]` with `n_r` samples for tables and dumps.
    pub r0: f64,
    pub r1: f64,
    pub n_r: usize,
    pub foliation: Foliation,
    pub eps: f64,
    pub phi: f64,
    pub eps0: f64,
    pub c0: f64,
    pub model: Model,
    pub tol: Tolerances,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            lambda: 3.0,
            m: 0.1,
            n_theta: 16,
            n_phi: 32,
            gauge: SdsGauge::EF,
            out_dir: PathBuf::from("cosmoweyl-out"),
            r: 1e4,
            ustar: 0.3,
            r0: 5.0,
            r1: 10.0,
            n_r: 200,
            foliation: Foliation::Sds,
            eps: 0.06,
            phi: 0.05,
            eps0: 0.1,
            c0: 3.0,
            model: Model::DeSitter,
            tol: Tolerances { table1: 1e-3, weyl: 1e-5, energy: 1e-3, hodge: 1e-4, sobolev: 0.02, penrose: 1e-9 },
        }
    }
}

fn parse_f64(key: &str, v: &str) -> Result<f64, ConfigError> {
    let x: f64 = v.parse().map_err(|_| ConfigError(format!("{key}: not a number: {v:?}")))?;
    if !x.is_finite() {
        return Err(ConfigError(format!("{key}: must be finite")));
    }
    Ok(x)
}

fn parse_usize(key: &str, v: &str) -> Result<usize, ConfigError> {
    v.parse().map_err(|_| ConfigError(format!("{key}: not a non-negative integer: {v:?}")))
}

pub fn parse_gauge(v: &str) -> Result<SdsGauge, ConfigError> {
    match v.to_ascii_lowercase().replace('_', "-").as_str() {
        "ef" | "eddington-finkelstein" => Ok(SdsGauge::EF),
        "kruskal" => Ok(SdsGauge::Kruskal),
        "initial-data" | "id" => Ok(SdsGauge::InitialData),
        _ => Err(ConfigError(format!("gauge: expected ef, kruskal or initial-data, got {v:?}"))),
    }
}

pub fn gauge_name(g: SdsGauge) -> &'static str {
    match g {
        SdsGauge::EF => "ef",
        SdsGauge::Kruskal => "kruskal",
        SdsGauge::InitialData => "initial-data",
    }
}

impl Config {
    /// Sets one key from its textual value. Keys accept `-` or `_`.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let k = key.trim().to_ascii_lowercase().replace('-', "_");
        let v = value.trim();
        let f = |x| parse_f64(&k, x);
        match k.as_str() {
            "lambda" => self.lambda = f(v)?,
            "m" => self.m = f(v)?,
            "n_theta" => self.n_theta = parse_usize(&k, v)?,
            "n_phi" => self.n_phi = parse_usize(&k, v)?,
            "gauge" => self.gauge = parse_gauge(v)?,
            "out_dir" | "out" => {
                if v.is_empty() {
                    return Err(ConfigError("out_dir: empty path".into()));
                }
                self.out_dir = PathBuf::from(v)
            }
            "r" => self.r = f(v)?,
            "ustar" => self.ustar = f(v)?,
            "r0" => self.r0 = f(v)?,
            "r1" => self.r1 = f(v)?,
            "n_r" => self.n_r = parse_usize(&k, v)?,
            "foliation" => {
                self.foliation = match v.to_ascii_lowercase().as_str() {
                    "sds" | "spherical" => Foliation::Sds,
                    "ellipsoid" => Foliation::Ellipsoid,
                    _ => return Err(ConfigError(format!("foliation: expected sds or ellipsoid, got {v:?}"))),
                }
            }
            "eps" => self.eps = f(v)?,
            "phi" => self.phi = f(v)?,
            "eps0" => self.eps0 = f(v)?,
            "c0" => self.c0 = f(v)?,
            "model" => {
                self.model = match v.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
                    "desitter" | "ds" => Model::DeSitter,
                    "sds" | "schwarzschilddesitter" => Model::Sds,
                    _ => return Err(ConfigError(format!("model: expected desitter or sds, got {v:?}"))),
                }
            }
            "tol_table1" => self.tol.table1 = f(v)?,
            "tol_weyl" => self.tol.weyl = f(v)?,
            "tol_energy" => self.tol.energy = f(v)?,
            "tol_hodge" => self.tol.hodge = f(v)?,
            "tol_sobolev" => self.tol.sobolev = f(v)?,
            "tol_penrose" => self.tol.penrose = f(v)?,
            _ => return Err(ConfigError(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    /// Applies a config file: one `key = value` per line, `#` starts a comment.
    pub fn apply_text(&mut self, text: &str, origin: &str) -> Result<(), ConfigError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| ConfigError(format!("{origin}:{}: expected key = value", i + 1)))?;
            self.set(k, v).map_err(|e| ConfigError(format!("{origin}:{}: {}", i + 1, e.0)))?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<(), ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
        self.apply_text(&text, &path.display().to_string())
    }

    pub fn params(&self) -> Result<SdSParams<f64>, ConfigError> {
        SdSParams::new(self.lambda, self.m).map_err(|e| ConfigError(e.to_string()))
    }

    pub fn geometry(&self) -> Result<SdsGeometry<f64>, ConfigError> {
        SdsGeometry::new(self.params()?).map_err(|e| ConfigError(e.to_string()))
    }

    /// Checks the invariants that do not depend on the subcommand.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.lambda > 0.0) {
            return Err(ConfigError("lambda must be positive".into()));
        }
        if self.m < 0.0 {
            return Err(ConfigError("m must be non-negative".into()));
        }
        let geo = self.geometry()?;
        if self.n_theta < 2 || self.n_phi < 2 {
            return Err(ConfigError("n_theta and n_phi must be at least 2".into()));
        }
        let t = &self.tol;
        for (name, v) in [
            ("tol_table1", t.table1),
            ("tol_weyl", t.weyl),
            ("tol_energy", t.energy),
            ("tol_hodge", t.hodge),
            ("tol_sobolev", t.sobolev),
            ("tol_penrose", t.penrose),
        ] {
            if !(v > 0.0) {
                return Err(ConfigError(format!("{name} must be positive")));
            }
        }
        if !(self.r > geo.r_c) {
            return Err(ConfigError(format!("r = {} must exceed the cosmological horizon {}", self.r, geo.r_c)));
        }
        if !(self.r0 > geo.r_c && self.r1 > self.r0) {
            return Err(ConfigError(format!("need r_C = {} < r0 < r1", geo.r_c)));
        }
        if self.n_r < 2 {
            return Err(ConfigError("n_r must be at least 2".into()));
        }
        if !(self.eps0 > 0.0 && self.c0 > 0.0) {
            return Err(ConfigError("eps0 and c0 must be positive".into()));
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        let t = &self.tol;
        json!({
            "lambda": self.lambda,
            "m": self.m,
            "n_theta": self.n_theta,
            "n_phi": self.n_phi,
            "gauge": gauge_name(self.gauge),
            "out_dir": self.out_dir.display().to_string(),
            "r": self.r,
            "ustar": self.ustar,
            "r0": self.r0,
            "r1": self.r1,
            "n_r": self.n_r,
            "foliation": match self.foliation { Foliation::Sds => "sds", Foliation::Ellipsoid => "ellipsoid" },
            "eps": self.eps,
            "phi": self.phi,
            "eps0": self.eps0,
            "c0": self.c0,
            "model": match self.model { Model::DeSitter => "desitter", Model::Sds => "sds" },
            "tolerances": {
                "table1": t.table1, "weyl": t.weyl, "energy": t.energy,
                "hodge": t.hodge, "sobolev": t.sobolev, "penrose": t.penrose,
            },
        })
    }
}

/// Parses `COSMOWEYL_THREADS`; `None` when unset.
pub fn thread_cap(value: Option<&str>) -> Result<Option<usize>, ConfigError> {
    match value {
        None => Ok(None),
        Some(s) => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(ConfigError(format!("COSMOWEYL_THREADS must be a positive integer, got {s:?}"))),
        },
    }
}
