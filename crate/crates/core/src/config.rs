//! JSON experiment configuration.
//!
//! ```json
//! {
//!   "version": 1,
//!   "format": "json",
//!   "suites": [
//!     {"suite": "joint_convexity", "h": "log", "f": "invpower:1", "g": "invpower:1",
//!      "phi": {"m": 3, "k": 3, "kraus_count": 2, "seed": 7},
//!      "psi": {"identity": 3},
//!      "trial": {"trials": 100, "seed": 1}}
//!   ]
//! }
//! ```
//!
//! Function tags and map descriptors are checked while parsing, so serde_json
//! reports their line and column.

use std::fmt;
use std::path::PathBuf;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::CMatrix;
use crate::posmap::PositiveMap;
use crate::report::TrialReport;
use crate::scalarfun::{breve, ScalarFunction};
use crate::tracefun::{FunctionalSpec, Mode};
use crate::verify::{self, Route, TrialConfig};

pub const CONFIG_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
    Both,
}

impl OutputFormat {
    pub fn json(self) -> bool {
        matches!(self, Self::Json | Self::Both)
    }

    pub fn csv(self) -> bool {
        matches!(self, Self::Csv | Self::Both)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(deserialize_with = "version")]
    pub version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub format: OutputFormat,
    pub suites: Vec<SuiteDescriptor>,
}

fn version<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<u32, D::Error> {
    let v = u32::deserialize(d)?;
    if v != CONFIG_VERSION {
        return Err(serde::de::Error::custom(format!(
            "unsupported config version {v}, expected {CONFIG_VERSION}"
        )));
    }
    Ok(v)
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        if cfg.suites.is_empty() {
            return Err(Error::Precondition("config declares no suites".into()));
        }
        Ok(cfg)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// A catalog function tag, parsed on deserialization.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct FnTag(pub ScalarFunction);

impl TryFrom<String> for FnTag {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        Ok(Self(s.parse()?))
    }
}

impl From<FnTag> for String {
    fn from(t: FnTag) -> String {
        t.0.to_string()
    }
}

impl fmt::Display for FnTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// `{"identity": n}`, `{"m", "k", "kraus_count", "seed"}` or
/// `{"kraus": [[[re, im], ...], ...]}` with each Kraus operator given as rows.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMap", into = "RawMap")]
pub enum MapDescriptor {
    Identity(usize),
    Random {
        m: usize,
        k: usize,
        kraus_count: usize,
        seed: u64,
    },
    Explicit(Vec<Vec<Vec<[f64; 2]>>>),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum RawMap {
    Identity {
        identity: usize,
    },
    Random {
        m: usize,
        k: usize,
        kraus_count: usize,
        seed: u64,
    },
    Explicit {
        kraus: Vec<Vec<Vec<[f64; 2]>>>,
    },
}

impl TryFrom<RawMap> for MapDescriptor {
    type Error = Error;

    fn try_from(raw: RawMap) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidMap(msg));
        match raw {
            RawMap::Identity { identity: 0 } => bad("identity dimension must be >= 1".into()),
            RawMap::Identity { identity } => Ok(Self::Identity(identity)),
            RawMap::Random {
                m,
                k,
                kraus_count,
                seed,
            } => {
                if m == 0 || k == 0 || kraus_count == 0 {
                    return bad("m, k and kraus_count must be >= 1".into());
                }
                if kraus_count * m < k {
                    return bad(format!(
                        "kraus_count * m = {} is below k = {k}; Φ(I) cannot be invertible",
                        kraus_count * m
                    ));
                }
                Ok(Self::Random {
                    m,
                    k,
                    kraus_count,
                    seed,
                })
            }
            RawMap::Explicit { kraus } => {
                let Some(first) = kraus.first() else {
                    return bad("explicit map needs at least one Kraus operator".into());
                };
                let rows = first.len();
                let cols = first.first().map_or(0, Vec::len);
                if rows == 0 || cols == 0 {
                    return bad("Kraus operators must be non-empty".into());
                }
                if kraus
                    .iter()
                    .any(|c| c.len() != rows || c.iter().any(|r| r.len() != cols))
                {
                    return bad(format!("all Kraus operators must be {rows}x{cols}"));
                }
                Ok(Self::Explicit(kraus))
            }
        }
    }
}

impl From<MapDescriptor> for RawMap {
    fn from(d: MapDescriptor) -> Self {
        match d {
            MapDescriptor::Identity(identity) => RawMap::Identity { identity },
            MapDescriptor::Random {
                m,
                k,
                kraus_count,
                seed,
            } => RawMap::Random {
                m,
                k,
                kraus_count,
                seed,
            },
            MapDescriptor::Explicit(kraus) => RawMap::Explicit { kraus },
        }
    }
}

impl MapDescriptor {
    pub fn build(&self) -> Result<PositiveMap> {
        match self {
            Self::Identity(n) => Ok(PositiveMap::identity(*n)),
            Self::Random {
                m,
                k,
                kraus_count,
                seed,
            } => PositiveMap::random(*m, *k, *kraus_count, *seed),
            Self::Explicit(kraus) => PositiveMap::new(
                kraus
                    .iter()
                    .map(|rows| {
                        let data: Vec<Complex64> = rows
                            .iter()
                            .flatten()
                            .map(|[re, im]| Complex64::new(*re, *im))
                            .collect();
                        CMatrix::from_row_slice(rows.len(), rows[0].len(), &data)
                    })
                    .collect(),
            ),
        }
    }
}

/// Trial settings; omitted fields take the [`TrialConfig`] defaults.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTrial")]
pub struct TrialSettings {
    pub trials: usize,
    pub seed: u64,
    pub tol: f64,
    pub eig_range: (f64, f64),
    pub dim: usize,
    pub normalized: bool,
    pub validate: bool,
}

impl Default for TrialSettings {
    fn default() -> Self {
        let c = TrialConfig::default();
        Self {
            trials: c.trials,
            seed: c.seed,
            tol: c.tol,
            eig_range: c.eig_range,
            dim: c.dim,
            normalized: c.normalized,
            validate: c.validate,
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTrial {
    trials: Option<usize>,
    seed: Option<u64>,
    tol: Option<f64>,
    eig_range: Option<(f64, f64)>,
    dim: Option<usize>,
    normalized: Option<bool>,
    validate: Option<bool>,
}

impl TryFrom<RawTrial> for TrialSettings {
    type Error = Error;

    fn try_from(r: RawTrial) -> Result<Self> {
        let d = Self::default();
        let s = Self {
            trials: r.trials.unwrap_or(d.trials),
            seed: r.seed.unwrap_or(d.seed),
            tol: r.tol.unwrap_or(d.tol),
            eig_range: r.eig_range.unwrap_or(d.eig_range),
            dim: r.dim.unwrap_or(d.dim),
            normalized: r.normalized.unwrap_or(d.normalized),
            validate: r.validate.unwrap_or(d.validate),
        };
        s.config().check()?;
        let (lo, hi) = s.eig_range;
        if !(lo > 0.0 && hi >= lo) {
            return Err(Error::InvalidRange {
                lo,
                hi,
                reason: "need 0 < lo <= hi",
            });
        }
        Ok(s)
    }
}

impl TrialSettings {
    pub fn config(&self) -> TrialConfig {
        TrialConfig {
            trials: self.trials,
            seed: self.seed,
            tol: self.tol,
            eig_range: self.eig_range,
            dim: self.dim,
            normalized: self.normalized,
            validate: self.validate,
        }
    }
}

fn is_default_route(r: &Route) -> bool {
    *r == Route::Direct
}

fn default_true() -> bool {
    true
}

fn is_true(b: &bool) -> bool {
    *b
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "suite", rename_all = "snake_case", deny_unknown_fields)]
pub enum SuiteDescriptor {
    JointConvexity {
        h: FnTag,
        f: FnTag,
        g: FnTag,
        phi: MapDescriptor,
        psi: MapDescriptor,
        #[serde(default = "direct", skip_serializing_if = "is_default_route")]
        route: Route,
        #[serde(default)]
        trial: TrialSettings,
    },
    JointConcavity {
        h: FnTag,
        f: FnTag,
        g: FnTag,
        phi: MapDescriptor,
        psi: MapDescriptor,
        #[serde(default)]
        trial: TrialSettings,
    },
    OperatorConvexity {
        g: FnTag,
        f: FnTag,
        map: MapDescriptor,
        #[serde(default)]
        trial: TrialSettings,
    },
    JensenTrace {
        f: FnTag,
        map: MapDescriptor,
        /// Rescale the family to `Σ C_i* C_i = I` before running.
        #[serde(default = "default_true", skip_serializing_if = "is_true")]
        normalize: bool,
        #[serde(default)]
        trial: TrialSettings,
    },
    TraceMonotonicity {
        f: FnTag,
        #[serde(default)]
        trial: TrialSettings,
    },
    SharpnessSearch {
        r: f64,
        #[serde(default)]
        trial: TrialSettings,
    },
    RemarkOperatorConcave {
        h: FnTag,
        f: FnTag,
        map: MapDescriptor,
        #[serde(default)]
        trial: TrialSettings,
    },
}

fn direct() -> Route {
    Route::Direct
}

impl SuiteDescriptor {
    pub fn kind(&self) -> &'static str {
        match self {
            Self::JointConvexity { .. } => "joint_convexity",
            Self::JointConcavity { .. } => "joint_concavity",
            Self::OperatorConvexity { .. } => "operator_convexity",
            Self::JensenTrace { .. } => "jensen_trace",
            Self::TraceMonotonicity { .. } => "trace_monotonicity",
            Self::SharpnessSearch { .. } => "sharpness_search",
            Self::RemarkOperatorConcave { .. } => "remark_operator_concave",
        }
    }

    pub fn trial(&self) -> &TrialSettings {
        match self {
            Self::JointConvexity { trial, .. }
            | Self::JointConcavity { trial, .. }
            | Self::OperatorConvexity { trial, .. }
            | Self::JensenTrace { trial, .. }
            | Self::TraceMonotonicity { trial, .. }
            | Self::SharpnessSearch { trial, .. }
            | Self::RemarkOperatorConcave { trial, .. } => trial,
        }
    }

    /// Builds maps and specs and runs the suite.
    pub fn run(&self) -> Result<TrialReport> {
        let cfg = self.trial().config();
        match self {
            Self::JointConvexity {
                h,
                f,
                g,
                phi,
                psi,
                route,
                ..
            } => {
                let spec = spec(h, f, g, phi, psi, Mode::Convex)?;
                verify::joint_convexity_suite_via(&spec, *route, &cfg)
            }
            Self::JointConcavity {
                h, f, g, phi, psi, ..
            } => {
                let spec = spec(h, f, g, phi, psi, Mode::Concave)?;
                verify::joint_concavity_suite(&spec, &cfg)
            }
            Self::OperatorConvexity { g, f, map, .. } => {
                verify::operator_convexity_suite(&g.0, &f.0, &map.build()?, &cfg)
            }
            Self::JensenTrace {
                f, map, normalize, ..
            } => {
                let mut family = map.build()?;
                if *normalize {
                    family = family.normalize_unital()?;
                }
                verify::jensen_trace_suite(&f.0, &family, &cfg)
            }
            Self::TraceMonotonicity { f, .. } => verify::trace_monotonicity_suite(&f.0, &cfg),
            Self::SharpnessSearch { r, .. } => verify::sharpness_search(*r, &cfg),
            Self::RemarkOperatorConcave { h, f, map, .. } => {
                verify::remark_operator_concave_check(&breve(&h.0)?, &f.0, &map.build()?, &cfg)
            }
        }
    }
}

fn spec(
    h: &FnTag,
    f: &FnTag,
    g: &FnTag,
    phi: &MapDescriptor,
    psi: &MapDescriptor,
    mode: Mode,
) -> Result<FunctionalSpec> {
    FunctionalSpec::new(
        h.0.clone(),
        f.0.clone(),
        g.0.clone(),
        phi.build()?,
        psi.build()?,
        mode,
    )
}
