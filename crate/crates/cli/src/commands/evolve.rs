//! `evolve`: pseudo-unitary propagation trace of an initial state.

use nalgebra::DVector;
use num_complex::Complex64;

use ptfesh_core::evolve::trace_conservation;
use ptfesh_core::oracle::direct_spectrum;
use ptfesh_core::pseudometric::pseudo_normalize;

use crate::config::{InitialState, RunConfig};
use crate::emit::{full, CsvDoc};
use crate::prepare::prepare;
use crate::AppError;

pub fn run(cfg: &RunConfig) -> Result<(), AppError> {
    let evolve_cfg = cfg
        .evolve
        .as_ref()
        .ok_or_else(|| AppError::config("evolve requires an evolve block in the config"))?;
    let prep = prepare(cfg)?;

    // spectral preparation: oracle + pseudo-normalization
    let data = direct_spectrum(&prep.hamiltonian)
        .and_then(|d| pseudo_normalize(&d, &prep.parity))
        .map_err(|e| AppError::solver(format!("spectral preparation failed: {e}")))?;

    let dim = prep.hamiltonian.dim();
    let psi0: DVector<Complex64> = match evolve_cfg.initial {
        InitialState::BasisIndex(k) => {
            if k >= dim {
                return Err(AppError::config(format!(
                    "initial basis index {k} out of range for dim {dim}"
                )));
            }
            let mut v = DVector::zeros(dim);
            v[k] = Complex64::new(1.0, 0.0);
            v
        }
        InitialState::Level(n) => {
            if n >= data.len() {
                return Err(AppError::config(format!(
                    "initial level {n} out of range ({} levels)",
                    data.len()
                )));
            }
            data.vector(n).clone()
        }
    };

    let times: Vec<f64> = (0..=evolve_cfg.steps)
        .map(|k| evolve_cfg.t_max * k as f64 / evolve_cfg.steps as f64)
        .collect();
    let trace = trace_conservation(&data, &prep.parity, &psi0, &times, false)
        .map_err(|e| AppError::solver(e.to_string()))?;

    let mut doc = CsvDoc::new();
    let p0 = trace.pseudo_norms[0];
    doc.comment(&format!(
        "pseudo_norm_t0 = {} {}",
        full(p0.re),
        full(p0.im)
    ));
    doc.header(&["t", "pseudo_re", "pseudo_im", "euclid"]);
    for (k, &t) in trace.times.iter().enumerate() {
        doc.row(&[
            full(t),
            full(trace.pseudo_norms[k].re),
            full(trace.pseudo_norms[k].im),
            full(trace.euclidean_norms[k]),
        ]);
    }
    doc.write(cfg.csv_out.as_deref())
}
