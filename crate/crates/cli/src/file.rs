//! The JSON problem file and its loader.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use splitep::convex::ConvexSet;
use splitep::equilibrium::{Bifunction, Family};
use splitep::mapping::MappingSpec;
use splitep::schedule::Schedule;
use splitep::solver::{
    mode_reduce, validate_config, DBound, Mode, ProblemInstance, SolverConfig, START_TOL,
};
use splitep::space::{LinearOperator, Vector};

use crate::CliError;

pub const FORMAT_VERSION: u32 = 1;

/// Step size used for `"gamma": "auto"` is this fraction of `1/L`.
pub const AUTO_GAMMA_FRACTION: f64 = 0.9;

/// Either the literal string `"auto"` or a number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AutoOr {
    Auto(AutoTag),
    Value(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AutoTag {
    Auto,
}

impl AutoOr {
    pub const AUTO: AutoOr = AutoOr::Auto(AutoTag::Auto);
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigBlock {
    pub gamma: AutoOr,
    pub r: Schedule,
    pub s: Schedule,
    pub alpha: Schedule,
    pub d_bound: AutoOr,
    pub tol: f64,
    pub max_iter: usize,
    pub mode: Mode,
    pub projection_tol: f64,
    pub seed: u64,
}

impl Default for ConfigBlock {
    fn default() -> Self {
        let d = SolverConfig::default();
        Self {
            gamma: AutoOr::AUTO,
            r: d.r,
            s: d.s,
            alpha: d.alpha,
            d_bound: AutoOr::AUTO,
            tol: d.tol_residual,
            max_iter: d.max_iter,
            mode: d.mode,
            projection_tol: d.projection_tol,
            seed: d.seed,
        }
    }
}

/// On-disk form of a problem. Bifunctions carry no domain here: every `f`
/// lives on `C` and every `g` on `Q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub version: u32,
    pub dim_h1: usize,
    pub dim_h2: usize,
    #[serde(rename = "C")]
    pub c: ConvexSet,
    #[serde(rename = "Q")]
    pub q: ConvexSet,
    pub f: Vec<Family>,
    pub g: Vec<Family>,
    #[serde(rename = "A")]
    pub a: Vec<LinearOperator>,
    #[serde(rename = "S")]
    pub s: Vec<MappingSpec>,
    #[serde(default)]
    pub config: ConfigBlock,
    pub x1: Vector,
}

/// A fully validated problem, ready for the engine.
#[derive(Debug, Clone, PartialEq)]
pub struct Loaded {
    pub problem: ProblemInstance,
    pub config: SolverConfig,
    pub x1: Vector,
}

impl ProblemFile {
    /// The inverse of [`ProblemFile::into_loaded`] for instances whose
    /// bifunction domains are `C` and `Q`.
    pub fn from_parts(problem: &ProblemInstance, config: &SolverConfig, x1: &Vector) -> Self {
        Self {
            version: FORMAT_VERSION,
            dim_h1: problem.dim_h1,
            dim_h2: problem.dim_h2,
            c: problem.c.clone(),
            q: problem.q.clone(),
            f: problem.f.iter().map(|b| b.family.clone()).collect(),
            g: problem.g.iter().map(|b| b.family.clone()).collect(),
            a: problem.a.clone(),
            s: problem.s.clone(),
            config: ConfigBlock {
                gamma: AutoOr::Value(config.gamma),
                r: config.r,
                s: config.s,
                alpha: config.alpha,
                d_bound: match config.d_bound {
                    DBound::Auto => AutoOr::AUTO,
                    DBound::Fixed(d) => AutoOr::Value(d),
                },
                tol: config.tol_residual,
                max_iter: config.max_iter,
                mode: config.mode,
                projection_tol: config.projection_tol,
                seed: config.seed,
            },
            x1: x1.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("problem files always serialize")
    }

    /// Builds the instance, resolves `auto` fields and checks (C1)-(C4).
    pub fn into_loaded(self, seed: Option<u64>) -> Result<Loaded, CliError> {
        if self.version != FORMAT_VERSION {
            return Err(CliError::Version(self.version));
        }
        let attach = |fams: Vec<Family>, domain: &ConvexSet| {
            fams.into_iter()
                .map(|family| Bifunction {
                    family,
                    domain: domain.clone(),
                })
                .collect::<Vec<_>>()
        };
        let problem = ProblemInstance {
            dim_h1: self.dim_h1,
            dim_h2: self.dim_h2,
            f: attach(self.f, &self.c),
            g: attach(self.g, &self.q),
            c: self.c,
            q: self.q,
            a: self.a,
            s: self.s,
        };
        problem.validate()?;

        let cfg = self.config;
        let gamma = match cfg.gamma {
            AutoOr::Value(g) => g,
            AutoOr::Auto(_) => {
                let l = problem.spectral_bound()?.l;
                if l > 0.0 {
                    AUTO_GAMMA_FRACTION / l
                } else {
                    1.0
                }
            }
        };
        let config = SolverConfig {
            gamma,
            r: cfg.r,
            s: cfg.s,
            alpha: cfg.alpha,
            d_bound: match cfg.d_bound {
                AutoOr::Auto(_) => DBound::Auto,
                AutoOr::Value(d) => DBound::Fixed(d),
            },
            tol_residual: cfg.tol,
            max_iter: cfg.max_iter,
            mode: cfg.mode,
            projection_tol: cfg.projection_tol,
            seed: seed.unwrap_or(cfg.seed),
        };

        // conditions are judged on the instance the engine will actually run
        let reduced = mode_reduce(&problem, config.mode, config.seed)?;
        let report = validate_config(&reduced, &config);
        if !report.passed() {
            return Err(CliError::Conditions(report));
        }

        let x1 = self.x1;
        if x1.dim() != problem.dim_h1 {
            return Err(CliError::Invalid(splitep::Error::DimensionMismatch {
                expected: problem.dim_h1,
                found: x1.dim(),
            }));
        }
        if !x1.is_finite() || !problem.c.contains(&x1, START_TOL) {
            return Err(CliError::Invalid(splitep::Error::InvalidArgument(
                "x1 must be a finite point of C".into(),
            )));
        }
        Ok(Loaded {
            problem,
            config,
            x1,
        })
    }
}

/// Parses a problem document; errors carry the field path and position.
pub fn parse(text: &str) -> Result<ProblemFile, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let field = e.path().to_string();
        let inner = e.into_inner();
        CliError::Parse {
            field,
            line: inner.line(),
            column: inner.column(),
            message: inner.to_string(),
        }
    })
}

pub fn load(path: &Path, seed: Option<u64>) -> Result<Loaded, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse(&text)?.into_loaded(seed)
}
