//! `sweep`: phase-diagram rows over a parameter grid, with the first
//! breaking transition bracketed in the summary.

use ptfesh_core::hobasis::{BasisSpec, ModelSpec};
use ptfesh_core::selfconsist::{first_transition, sweep, ModelFamily, SweepParameter};

use crate::config::{ModelChoice, RunConfig};
use crate::emit::{full, CsvDoc};
use crate::AppError;

pub fn run(cfg: &RunConfig) -> Result<(), AppError> {
    let sweep_cfg = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| AppError::config("sweep requires a sweep block in the config"))?;

    let family = match &cfg.model {
        ModelChoice::Oscillator {
            cubic,
            even_coeff,
            even_power,
        } => {
            let swept = match sweep_cfg.param.as_str() {
                "f_re" => SweepParameter::CubicRe,
                "f_im" => SweepParameter::CubicIm,
                "g" => SweepParameter::EvenCoeff,
                other => {
                    return Err(AppError::config(format!(
                        "sweep.param must be f_re|f_im|g for oscillator models, got {other:?}"
                    )))
                }
            };
            let base = ModelSpec::new(*cubic, *even_power, *even_coeff)
                .map_err(|e| AppError::config(e.to_string()))?;
            ModelFamily::Oscillator { base, swept }
        }
        ModelChoice::Toy { alpha, .. } => {
            if sweep_cfg.param != "omega" {
                return Err(AppError::config(format!(
                    "sweep.param must be omega for the toy model, got {:?}",
                    sweep_cfg.param
                )));
            }
            ModelFamily::Toy { alpha: *alpha }
        }
    };

    let basis = BasisSpec::new(cfg.basis_dim).map_err(|e| AppError::config(e.to_string()))?;
    let grid: Vec<f64> = if sweep_cfg.steps == 1 {
        vec![sweep_cfg.from]
    } else {
        let h = (sweep_cfg.to - sweep_cfg.from) / (sweep_cfg.steps - 1) as f64;
        (0..sweep_cfg.steps)
            .map(|k| sweep_cfg.from + h * k as f64)
            .collect()
    };

    let rows = sweep(&family, &grid, basis).map_err(|e| AppError::config(e.to_string()))?;

    let mut doc = CsvDoc::new();
    doc.header(&[
        "param",
        "level",
        "energy_re",
        "energy_im",
        "self_pseudo_norm",
        "broken_count",
    ]);
    for row in &rows {
        if let Some(err) = &row.error {
            doc.comment(&format!("param = {} failed: {err}", full(row.parameter)));
            continue;
        }
        for (level, e) in row.energies.iter().enumerate() {
            doc.row(&[
                full(row.parameter),
                level.to_string(),
                full(e.re),
                full(e.im),
                full(row.self_pseudo_norms[level]),
                row.broken_count.to_string(),
            ]);
        }
    }
    match first_transition(&rows) {
        Some((a, b)) => {
            doc.comment(&format!(
                "first_breaking_bracket = [{}, {}]",
                full(a),
                full(b)
            ));
            println!("first breaking transition inside [{}, {}]", full(a), full(b));
        }
        None => {
            doc.comment("no_breaking_transition");
            println!("no breaking transition on this grid");
        }
    }
    doc.write(cfg.csv_out.as_deref())
}
