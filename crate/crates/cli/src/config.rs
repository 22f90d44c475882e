//! Run configuration: a JSON document plus command-line overrides
//! (flags win over the file).

use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Deserialize;

use ptfesh_core::partitioning::Alpha;
use ptfesh_core::verify::CustomBlocks;

use crate::AppError;

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub command: Option<String>,
    pub model: Option<ModelConfig>,
    pub toy: Option<ToyConfig>,
    pub basis_dim: Option<usize>,
    pub method: Option<String>,
    pub interval: Option<[f64; 2]>,
    pub tol: Option<f64>,
    pub sweep: Option<SweepConfig>,
    pub evolve: Option<EvolveConfig>,
    pub output: Option<OutputConfig>,
    pub seed: Option<u64>,
    pub custom: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    /// Complex cubic coefficient as "re+imi", e.g. "0.5", "0+0.2i", "-0.1i".
    pub f: Option<String>,
    pub g: Option<f64>,
    /// Even power 2N of the confining term; default 4.
    pub power: Option<u32>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToyConfig {
    pub omega: f64,
    pub alpha: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub param: String,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveConfig {
    pub t_max: f64,
    pub steps: usize,
    /// A basis index (number or numeric string) or "level:n" for the n-th
    /// pseudo-normalized eigenstate.
    pub initial: serde_json::Value,
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub csv: Option<PathBuf>,
    pub json: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Feshbach,
    Direct,
    Both,
}

impl Method {
    pub fn parse(s: &str) -> Result<Self, AppError> {
        match s {
            "feshbach" => Ok(Method::Feshbach),
            "direct" => Ok(Method::Direct),
            "both" => Ok(Method::Both),
            other => Err(AppError::config(format!(
                "method must be feshbach|direct|both, got {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialState {
    BasisIndex(usize),
    Level(usize),
}

#[derive(Debug, Clone)]
pub enum ModelChoice {
    Oscillator {
        cubic: Complex64,
        even_coeff: f64,
        even_power: u32,
    },
    Toy {
        omega: f64,
        alpha: Alpha,
    },
}

/// Fully resolved run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub model: ModelChoice,
    pub basis_dim: usize,
    pub method: Method,
    pub interval: Option<(f64, f64)>,
    pub tol: f64,
    pub sweep: Option<SweepConfig>,
    pub evolve: Option<ResolvedEvolve>,
    pub csv_out: Option<PathBuf>,
    pub json_out: Option<PathBuf>,
    pub seed: u64,
    pub custom: Option<CustomBlocks>,
}

#[derive(Debug, Clone)]
pub struct ResolvedEvolve {
    pub t_max: f64,
    pub steps: usize,
    pub initial: InitialState,
}

/// Parses "re+imi" strings: "0.5", "-0.2i", "0+0.2i", "1.5-0.3i", "i".
pub fn parse_complex(s: &str) -> Result<Complex64, AppError> {
    let raw = s.trim().replace(' ', "");
    let bad = || AppError::config(format!("cannot parse complex number {s:?} (expected RE+IMi)"));
    if raw.is_empty() {
        return Err(bad());
    }
    if let Some(imag_part) = raw.strip_suffix(['i', 'I']) {
        // split off a trailing signed real chunk for the imaginary coefficient
        let split = imag_part
            .char_indices()
            .skip(1)
            .filter(|(k, c)| {
                (*c == '+' || *c == '-')
                    && !matches!(imag_part.as_bytes()[k - 1], b'e' | b'E')
            })
            .map(|(k, _)| k)
            .last();
        match split {
            Some(k) => {
                let re: f64 = imag_part[..k].parse().map_err(|_| bad())?;
                let im_str = &imag_part[k..];
                let im: f64 = if im_str == "+" {
                    1.0
                } else if im_str == "-" {
                    -1.0
                } else {
                    im_str.parse().map_err(|_| bad())?
                };
                Ok(Complex64::new(re, im))
            }
            None => {
                let im: f64 = if imag_part.is_empty() || imag_part == "+" {
                    1.0
                } else if imag_part == "-" {
                    -1.0
                } else {
                    imag_part.parse().map_err(|_| bad())?
                };
                Ok(Complex64::new(0.0, im))
            }
        }
    } else {
        let re: f64 = raw.parse().map_err(|_| bad())?;
        Ok(Complex64::new(re, 0.0))
    }
}

fn parse_initial(v: &serde_json::Value) -> Result<InitialState, AppError> {
    match v {
        serde_json::Value::Number(n) => n
            .as_u64()
            .map(|k| InitialState::BasisIndex(k as usize))
            .ok_or_else(|| AppError::config("initial basis index must be a nonnegative integer")),
        serde_json::Value::String(s) => {
            if let Some(level) = s.strip_prefix("level:") {
                let n: usize = level.parse().map_err(|_| {
                    AppError::config(format!("cannot parse level index in initial {s:?}"))
                })?;
                Ok(InitialState::Level(n))
            } else {
                let n: usize = s.parse().map_err(|_| {
                    AppError::config(format!("initial must be a basis index or \"level:n\", got {s:?}"))
                })?;
                Ok(InitialState::BasisIndex(n))
            }
        }
        other => Err(AppError::config(format!(
            "initial must be a number or string, got {other}"
        ))),
    }
}

/// Custom partitioned blocks on disk: real F, G and complex A (re/im parts),
/// with an optional explicit a_dagger for negative-control checks.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct CustomBlocksFile {
    f: Vec<Vec<f64>>,
    g: Vec<Vec<f64>>,
    a_re: Vec<Vec<f64>>,
    #[serde(default)]
    a_im: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    a_dagger_re: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    a_dagger_im: Option<Vec<Vec<f64>>>,
    alpha: f64,
}

fn to_matrix(rows: &[Vec<f64>], what: &str) -> Result<DMatrix<f64>, AppError> {
    let nr = rows.len();
    if nr == 0 {
        return Err(AppError::config(format!("{what}: matrix must be nonempty")));
    }
    let nc = rows[0].len();
    if rows.iter().any(|r| r.len() != nc) {
        return Err(AppError::config(format!("{what}: ragged rows")));
    }
    Ok(DMatrix::from_fn(nr, nc, |i, j| rows[i][j]))
}

fn to_complex_matrix(
    re: &[Vec<f64>],
    im: Option<&Vec<Vec<f64>>>,
    what: &str,
) -> Result<DMatrix<Complex64>, AppError> {
    let re = to_matrix(re, what)?;
    let im = match im {
        Some(rows) => to_matrix(rows, what)?,
        None => DMatrix::zeros(re.nrows(), re.ncols()),
    };
    if im.shape() != re.shape() {
        return Err(AppError::config(format!("{what}: re/im shapes differ")));
    }
    Ok(DMatrix::from_fn(re.nrows(), re.ncols(), |i, j| {
        Complex64::new(re[(i, j)], im[(i, j)])
    }))
}

fn load_custom(path: &Path) -> Result<CustomBlocks, AppError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| AppError::config(format!("cannot read custom blocks {path:?}: {e}")))?;
    let file: CustomBlocksFile = serde_json::from_str(&text)
        .map_err(|e| AppError::config(format!("cannot parse custom blocks {path:?}: {e}")))?;
    let coupling = to_complex_matrix(&file.a_re, file.a_im.as_ref(), "a")?;
    let coupling_dagger = match (&file.a_dagger_re, &file.a_dagger_im) {
        (None, None) => None,
        (re, im) => {
            let re = re.as_ref().ok_or_else(|| {
                AppError::config("a_dagger_im given without a_dagger_re")
            })?;
            Some(to_complex_matrix(re, im.as_ref(), "a_dagger")?)
        }
    };
    let alpha = Alpha::from_sign(file.alpha)
        .map_err(|e| AppError::config(e.to_string()))?;
    Ok(CustomBlocks {
        f_block: to_matrix(&file.f, "f")?,
        g_block: to_matrix(&file.g, "g")?,
        coupling,
        coupling_dagger,
        alpha,
    })
}

/// Command-line overrides (flags win over the config file).
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub dim: Option<usize>,
    pub g: Option<f64>,
    pub f: Option<String>,
    pub method: Option<String>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
}

pub fn resolve(
    command: &str,
    config_path: Option<&Path>,
    over: &Overrides,
) -> Result<RunConfig, AppError> {
    let file: FileConfig = match config_path {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| AppError::config(format!("cannot read config {path:?}: {e}")))?;
            serde_json::from_str(&text)
                .map_err(|e| AppError::config(format!("cannot parse config {path:?}: {e}")))?
        }
        None => FileConfig::default(),
    };
    if let Some(declared) = &file.command {
        if declared != command {
            // flags (the subcommand) win; the declared command is advisory
        }
    }

    let basis_dim = over.dim.or(file.basis_dim).unwrap_or(40);
    if basis_dim < 2 {
        return Err(AppError::config(format!(
            "basis_dim must be >= 2, got {basis_dim}"
        )));
    }
    let tol = file.tol.unwrap_or(1e-10);
    if !tol.is_finite() || tol <= 0.0 {
        return Err(AppError::config(format!("tol must be > 0, got {tol}")));
    }
    let interval = match file.interval {
        Some([lo, hi]) => {
            if lo >= hi {
                return Err(AppError::config(format!(
                    "interval.lo must be < interval.hi, got [{lo}, {hi}]"
                )));
            }
            Some((lo, hi))
        }
        None => None,
    };
    let method = Method::parse(
        over.method
            .as_deref()
            .or(file.method.as_deref())
            .unwrap_or("both"),
    )?;

    let model = if let Some(toy) = &file.toy {
        let alpha = Alpha::from_sign(toy.alpha).map_err(|e| AppError::config(e.to_string()))?;
        ModelChoice::Toy {
            omega: toy.omega,
            alpha,
        }
    } else {
        let mc = file.model.clone().unwrap_or(ModelConfig {
            f: None,
            g: None,
            power: None,
        });
        let f_str = over.f.clone().or(mc.f).unwrap_or_else(|| "0".into());
        let cubic = parse_complex(&f_str)?;
        let even_coeff = over.g.or(mc.g).unwrap_or(0.1);
        let even_power = mc.power.unwrap_or(4);
        if !even_power.is_multiple_of(2) || even_power < 4 {
            return Err(AppError::config(format!(
                "model.power must be even and >= 4, got {even_power}"
            )));
        }
        ModelChoice::Oscillator {
            cubic,
            even_coeff,
            even_power,
        }
    };

    let sweep = file.sweep.clone();
    if let Some(s) = &sweep {
        if s.steps < 1 {
            return Err(AppError::config("sweep.steps must be >= 1"));
        }
        if s.from >= s.to {
            return Err(AppError::config(format!(
                "sweep.from must be < sweep.to, got {} and {}",
                s.from, s.to
            )));
        }
    }
    let evolve = match &file.evolve {
        Some(e) => {
            if e.steps < 1 {
                return Err(AppError::config("evolve.steps must be >= 1"));
            }
            if !e.t_max.is_finite() || e.t_max <= 0.0 {
                return Err(AppError::config("evolve.t_max must be > 0"));
            }
            Some(ResolvedEvolve {
                t_max: e.t_max,
                steps: e.steps,
                initial: parse_initial(&e.initial)?,
            })
        }
        None => None,
    };

    let output = file.output.unwrap_or_default();
    let (mut csv_out, mut json_out) = (output.csv, output.json);
    if let Some(out) = &over.out {
        if command == "check" {
            json_out = Some(out.clone());
        } else {
            csv_out = Some(out.clone());
        }
    }

    let custom = match &file.custom {
        Some(path) => Some(load_custom(path)?),
        None => None,
    };

    Ok(RunConfig {
        model,
        basis_dim,
        method,
        interval,
        tol,
        sweep,
        evolve,
        csv_out,
        json_out,
        seed: over.seed.or(file.seed).unwrap_or(7),
        custom,
    })
}
