//! Run configuration: a flat JSON file, overridden by command-line flags, with every `"auto"`
//! resolved before any work starts.

use crate::CliError;
use serde::{Deserialize, Serialize};
use stairlam_construct::{ConstructOptions, Polygon, MAX_CELLS};
use stairlam_core::{choose_c, eps_auto, threshold, validate_c, ModelParams, Params};
use stairlam_staircase::design_t0;
use stairlam_verify::{empirical_i, standard_grid};
use std::path::{Path, PathBuf};

/// Either the word `"auto"` or an explicit value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(untagged)]
pub enum Auto<T> {
    #[default]
    #[serde(with = "auto_word")]
    Auto,
    Value(T),
}

mod auto_word {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str("auto")
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<(), D::Error> {
        let w = String::deserialize(d)?;
        if w == "auto" {
            Ok(())
        } else {
            Err(serde::de::Error::custom(format!("expected \"auto\", got {w:?}")))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum DomainKind {
    #[default]
    Square,
    /// The unit-diameter disc, as a regular 64-gon.
    Ball,
}

impl DomainKind {
    pub fn polygon(self) -> Polygon {
        match self {
            DomainKind::Square => Polygon::unit_square(),
            DomainKind::Ball => Polygon::regular([0.5, 0.5], 0.5, 64),
        }
    }
}

/// Where the laminates come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum SourceKind {
    #[default]
    Staircase,
    /// Small fixed laminates with unit jumps, for exercising the pipeline.
    Demo,
}

/// `"center"` or explicit coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PointSpec {
    Named(PointName),
    Explicit(Params),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PointName {
    Center,
}

impl Default for PointSpec {
    fn default() -> Self {
        PointSpec::Named(PointName::Center)
    }
}

/// Optional overrides of the construction knobs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    pub max_cells: Option<usize>,
    pub chunk: Option<usize>,
}

/// The configuration file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub p: Option<f64>,
    #[serde(default)]
    pub c: Auto<f64>,
    #[serde(default)]
    pub t0: Auto<f64>,
    #[serde(default, rename = "I")]
    pub i_start: Auto<usize>,
    #[serde(default)]
    pub eps: Auto<f64>,
    #[serde(rename = "N")]
    pub levels: Option<usize>,
    #[serde(default)]
    pub domain: DomainKind,
    #[serde(default, rename = "P")]
    pub point: PointSpec,
    #[serde(default)]
    pub source: SourceKind,
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub tolerances: Tolerances,
}

/// Default number of levels.
pub const DEFAULT_LEVELS: usize = 5;

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

/// How one value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Origin {
    Auto,
    Explicit,
}

/// Everything a run needs, with no `"auto"` left.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Resolved {
    pub model: ModelParams,
    pub origins: Origins,
    #[serde(rename = "N")]
    pub levels: usize,
    pub domain: DomainKind,
    #[serde(rename = "P")]
    pub point: Params,
    pub source: SourceKind,
    pub options: ConstructOptions,
    /// `(min, max)` of `G_p` on `[c, 2c]`, and the threshold `max{1, p−1}`.
    pub g_bounds: (f64, f64),
    pub threshold: f64,
    /// Diagnostic mode at `p = 2`: the model is not validated.
    pub diagnostic: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Origins {
    pub c: Origin,
    pub t0: Origin,
    #[serde(rename = "I")]
    pub i_start: Origin,
    pub eps: Origin,
}

fn origin<T>(a: &Auto<T>) -> Origin {
    match a {
        Auto::Auto => Origin::Auto,
        Auto::Value(_) => Origin::Explicit,
    }
}

/// Starting index used at `p = 2` when none is given.
const P2_I: usize = 16;

/// Resolves `cfg`. An explicit `c` is validated like an automatic one; `p = 2` is refused
/// unless `allow_p2`.
pub fn resolve(cfg: &RunConfig, allow_p2: bool) -> Result<Resolved, CliError> {
    let p = cfg.p.ok_or_else(|| CliError::Config("p is required".into()))?;
    if !(p > 1.0 && p.is_finite()) {
        return Err(CliError::Config(format!("p = {p} must be a finite number above 1")));
    }
    let origins = Origins {
        c: origin(&cfg.c),
        t0: origin(&cfg.t0),
        i_start: origin(&cfg.i_start),
        eps: origin(&cfg.eps),
    };
    let levels = cfg.levels.unwrap_or(DEFAULT_LEVELS);
    if levels == 0 {
        return Err(CliError::Config("N must be at least 1".into()));
    }
    let threshold = threshold(p);
    let diagnostic = p == 2.0;
    let model = if diagnostic {
        if !allow_p2 {
            return Err(CliError::P2);
        }
        let c = match cfg.c {
            Auto::Value(c) => c,
            Auto::Auto => 1.0,
        };
        let t0 = match cfg.t0 {
            Auto::Value(t) => t,
            Auto::Auto => design_t0(c, p),
        };
        let i = match cfg.i_start {
            Auto::Value(i) => i,
            Auto::Auto => P2_I,
        };
        let eps = match cfg.eps {
            Auto::Value(e) => e,
            Auto::Auto => 0.0,
        };
        ModelParams::unchecked(p, c, t0, i, eps)
    } else {
        let c = match cfg.c {
            Auto::Value(c) => {
                validate_c(c, p)?;
                c
            }
            Auto::Auto => choose_c(p)?,
        };
        let t0 = match cfg.t0 {
            Auto::Value(t) => t,
            Auto::Auto => design_t0(c, p),
        };
        let eps = match cfg.eps {
            Auto::Value(e) => e,
            Auto::Auto => eps_auto(c, p),
        };
        // the index search needs a valid model; its own I is irrelevant to the search
        let probe = ModelParams::new(p, c, t0, 1, eps)?;
        let i = match cfg.i_start {
            Auto::Value(i) => i,
            Auto::Auto => empirical_i(&probe, &standard_grid(c))?.0,
        };
        ModelParams::new(p, c, t0, i, eps)?
    };
    let point = match cfg.point {
        PointSpec::Named(PointName::Center) => Params::center(model.c),
        PointSpec::Explicit(pr) => pr,
    };
    let d = ConstructOptions::default();
    let options = ConstructOptions {
        max_cells: cfg.tolerances.max_cells.unwrap_or(MAX_CELLS),
        chunk: cfg.tolerances.chunk.unwrap_or(d.chunk),
    };
    Ok(Resolved {
        g_bounds: model.g_bounds(),
        model,
        origins,
        levels,
        domain: cfg.domain,
        point,
        source: cfg.source,
        options,
        threshold,
        diagnostic,
    })
}
