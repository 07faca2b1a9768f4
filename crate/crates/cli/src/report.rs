use std::fs;
use std::path::Path;

use distrode::solver::{Classification, Existence, GeneralizedSolution, Regime, Residual};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::fail::CliError;

#[derive(Clone, Debug, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

impl InputDigest {
    pub fn of(path: &Path, bytes: &[u8]) -> Self {
        let digest = Sha256::digest(bytes);
        InputDigest {
            path: path.display().to_string(),
            sha256: digest.iter().map(|b| format!("{b:02x}")).collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct InterfaceSummary {
    pub x: f64,
    pub classification: Classification,
    pub rank_a: usize,
    pub rank_b: usize,
    pub w: usize,
    /// The interface rows have a nonzero constant term.
    pub inhomogeneous: bool,
    pub near_threshold: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidationSummary {
    pub n: usize,
    #[serde(rename = "M")]
    pub m: usize,
    pub regime: Regime,
    pub singular_points: Vec<f64>,
    pub interfaces: Vec<InterfaceSummary>,
}

impl ValidationSummary {
    pub fn of(sol: &GeneralizedSolution) -> Self {
        let v = &sol.validation;
        ValidationSummary {
            n: v.n,
            m: v.m,
            regime: v.regime,
            singular_points: v.interface_points.clone(),
            interfaces: sol
                .interfaces
                .iter()
                .map(|s| InterfaceSummary {
                    x: s.x0,
                    classification: s.classification,
                    rank_a: s.dims.rank_a,
                    rank_b: s.dims.rank_b,
                    w: s.dims.w,
                    inhomogeneous: s.has_offset(),
                    near_threshold: s.dims.near_threshold,
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ExistenceTag {
    pub kind: &'static str,
    /// Dimension of the solution family; 0 when unique or absent.
    pub dimension: usize,
}

impl From<Existence> for ExistenceTag {
    fn from(e: Existence) -> Self {
        match e {
            Existence::Unique => ExistenceTag {
                kind: "unique",
                dimension: 0,
            },
            Existence::AffineFamily(d) => ExistenceTag {
                kind: "affine_family",
                dimension: d,
            },
            Existence::None => ExistenceTag {
                kind: "none",
                dimension: 0,
            },
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ResidualSummary {
    pub piecewise_sup: f64,
    pub delta_norm: f64,
    pub tolerance: f64,
    /// Relative residual of the assembled linear system.
    pub assembly: f64,
}

impl ResidualSummary {
    pub fn new(r: Residual, tolerance: f64, assembly: f64) -> Self {
        ResidualSummary {
            piecewise_sup: r.piecewise_sup,
            delta_norm: r.delta_norm,
            tolerance,
            assembly,
        }
    }

    pub fn within(&self) -> bool {
        self.piecewise_sup <= self.tolerance && self.delta_norm <= self.tolerance
    }
}

/// Written as `report.json`. Contains no timestamps so that reruns are
/// byte-identical.
#[derive(Clone, Debug, Serialize)]
pub struct RunReport<T: Serialize> {
    pub command: &'static str,
    pub input: Option<InputDigest>,
    #[serde(flatten)]
    pub body: T,
    /// File names inside the output directory.
    pub outputs: Vec<String>,
    pub exit_code: i32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

pub fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::runtime(e.to_string()))?;
    text.push('\n');
    write_file(dir, name, &text)
}

pub fn write_file(dir: &Path, name: &str, text: &str) -> Result<(), CliError> {
    let path = dir.join(name);
    fs::write(&path, text).map_err(|e| CliError::io(&path, e))
}

pub fn read_input(path: &Path) -> Result<(Vec<u8>, InputDigest), CliError> {
    let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
    let digest = InputDigest::of(path, &bytes);
    Ok((bytes, digest))
}

pub fn prepare_out(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

/// Full double precision for CSV cells.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}
