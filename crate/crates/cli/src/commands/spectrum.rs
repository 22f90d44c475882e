//! `spectrum`: levels by the Feshbach route, the dense oracle, or both.

use nalgebra::DVector;
use num_complex::Complex64;

use ptfesh_core::error::Error;
use ptfesh_core::feshbach::FeshbachReducer;
use ptfesh_core::oracle::direct_spectrum;
use ptfesh_core::partitioning::{assemble_full, block_parity};
use ptfesh_core::pseudometric::{assign_quasi_parity, pseudo_inner, InnerMode, QuasiParity};
use ptfesh_core::selfconsist::detect_breaking_with_tol;

use crate::config::{Method, RunConfig};
use crate::emit::{full, CsvDoc};
use crate::prepare::{prepare, Prepared};
use crate::AppError;

struct LevelRow {
    energy: Complex64,
    quasi: i8,
    self_norm: f64,
    residual: f64,
}

fn quasi_code(q: QuasiParity) -> i8 {
    match q {
        QuasiParity::Plus => 1,
        QuasiParity::Minus => -1,
        QuasiParity::Undefined => 0,
    }
}

fn solver_error(e: Error) -> AppError {
    match e {
        Error::Coverage { .. } | Error::InvalidArgument(_) => AppError::config(e.to_string()),
        other => AppError::solver(other.to_string()),
    }
}

fn sort_rows(rows: &mut [LevelRow]) {
    rows.sort_by(|a, b| {
        a.energy
            .re
            .total_cmp(&b.energy.re)
            .then(a.energy.im.total_cmp(&b.energy.im))
    });
}

fn direct_rows(prep: &Prepared) -> Result<Vec<LevelRow>, AppError> {
    let data = direct_spectrum(&prep.hamiltonian).map_err(solver_error)?;
    let h = prep.hamiltonian.matrix();
    let mut rows = Vec::with_capacity(data.len());
    for i in 0..data.len() {
        let e = data.eigenvalues()[i];
        let v = data.vector(i) / Complex64::new(data.vector(i).norm(), 0.0);
        let self_norm = pseudo_inner(&v, &v, &prep.parity, InnerMode::Metric)
            .map_err(solver_error)?
            .re;
        let quasi = quasi_code(assign_quasi_parity(&v, &prep.parity));
        let residual = (h * &v - &v * e).norm();
        rows.push(LevelRow {
            energy: e,
            quasi,
            self_norm,
            residual,
        });
    }
    sort_rows(&mut rows);
    Ok(rows)
}

fn feshbach_rows(prep: &Prepared, tol: f64) -> Result<Vec<LevelRow>, AppError> {
    let report =
        detect_breaking_with_tol(&prep.partitioned, prep.interval, tol).map_err(solver_error)?;
    let reducer = FeshbachReducer::new(&prep.partitioned);
    let parity = block_parity(prep.partitioned.even_dim(), prep.partitioned.odd_dim());
    let mut rows = Vec::new();
    // decoupled G-modes are exact levels the self-consistency scan excludes
    for (energy, mode) in reducer.decoupled_pole_modes(1e-12) {
        let ne = prep.partitioned.even_dim();
        let mut stacked = DVector::<Complex64>::zeros(ne + mode.len());
        for (i, z) in mode.iter().enumerate() {
            stacked[ne + i] = *z;
        }
        let self_norm = pseudo_inner(&stacked, &stacked, &parity, InnerMode::Metric)
            .map_err(solver_error)?
            .re;
        let quasi = quasi_code(assign_quasi_parity(&stacked, &parity));
        rows.push(LevelRow {
            energy: Complex64::new(energy, 0.0),
            quasi,
            self_norm,
            residual: 0.0,
        });
    }
    for root in &report.roots {
        let spec = reducer.spectrum(root.energy).map_err(solver_error)?;
        let branch = (0..spec.energies.len())
            .min_by(|&a, &b| {
                (spec.energies[a] - root.energy)
                    .abs()
                    .total_cmp(&(spec.energies[b] - root.energy).abs())
            })
            .expect("spectrum is nonempty");
        let v = spec.vectors.column(branch).into_owned();
        let w = reducer.eliminated(root.energy, &v).map_err(solver_error)?;
        let mut stacked = DVector::<Complex64>::zeros(v.len() + w.len());
        for (i, z) in v.iter().enumerate() {
            stacked[i] = *z;
        }
        for (i, z) in w.iter().enumerate() {
            stacked[v.len() + i] = *z;
        }
        stacked /= Complex64::new(stacked.norm(), 0.0);
        let self_norm = pseudo_inner(&stacked, &stacked, &parity, InnerMode::Metric)
            .map_err(solver_error)?
            .re;
        let quasi = quasi_code(assign_quasi_parity(&stacked, &parity));
        rows.push(LevelRow {
            energy: Complex64::new(root.energy, 0.0),
            quasi,
            self_norm,
            residual: root.residual,
        });
    }
    if !report.complex_pairs.is_empty() {
        let assembled = assemble_full(&prep.partitioned);
        let data = direct_spectrum(&assembled).map_err(solver_error)?;
        let m = assembled.matrix();
        for pair in &report.complex_pairs {
            for e in [pair.e_plus, pair.e_minus] {
                let i = (0..data.len())
                    .min_by(|&a, &b| {
                        (data.eigenvalues()[a] - e)
                            .norm()
                            .total_cmp(&(data.eigenvalues()[b] - e).norm())
                    })
                    .expect("oracle spectrum is nonempty");
                let v = data.vector(i) / Complex64::new(data.vector(i).norm(), 0.0);
                let self_norm = pseudo_inner(&v, &v, &parity, InnerMode::Metric)
                    .map_err(solver_error)?
                    .re;
                rows.push(LevelRow {
                    energy: e,
                    quasi: 0,
                    self_norm,
                    residual: (m * &v - &v * e).norm(),
                });
            }
        }
    }
    sort_rows(&mut rows);
    Ok(rows)
}

fn push_rows(doc: &mut CsvDoc, rows: &[LevelRow], method: &str) {
    for (i, row) in rows.iter().enumerate() {
        doc.row(&[
            i.to_string(),
            full(row.energy.re),
            full(row.energy.im),
            row.quasi.to_string(),
            full(row.self_norm),
            full(row.residual),
            method.to_string(),
        ]);
    }
}

pub fn run(cfg: &RunConfig) -> Result<(), AppError> {
    let prep = prepare(cfg)?;
    let mut doc = CsvDoc::new();
    doc.header(&[
        "index",
        "energy_re",
        "energy_im",
        "quasi_parity",
        "self_pseudo_norm",
        "residual",
        "method",
    ]);
    let mut discrepancy: Option<f64> = None;
    match cfg.method {
        Method::Feshbach => {
            let rows = feshbach_rows(&prep, cfg.tol)?;
            push_rows(&mut doc, &rows, "feshbach");
        }
        Method::Direct => {
            let rows = direct_rows(&prep)?;
            push_rows(&mut doc, &rows, "direct");
        }
        Method::Both => {
            let fesh = feshbach_rows(&prep, cfg.tol)?;
            let direct = direct_rows(&prep)?;
            if fesh.len() != direct.len() {
                return Err(AppError::solver(format!(
                    "level count mismatch: feshbach {} vs direct {}",
                    fesh.len(),
                    direct.len()
                )));
            }
            // nearest-level matching in both directions: sorted positions of
            // conjugate partners can swap across methods at rounding level
            let one_way = |from: &[LevelRow], to: &[LevelRow]| -> f64 {
                from.iter()
                    .map(|a| {
                        to.iter()
                            .map(|b| (a.energy - b.energy).norm())
                            .fold(f64::INFINITY, f64::min)
                    })
                    .fold(0.0f64, f64::max)
            };
            let worst = one_way(&fesh, &direct).max(one_way(&direct, &fesh));
            discrepancy = Some(worst);
            push_rows(&mut doc, &fesh, "feshbach");
            push_rows(&mut doc, &direct, "direct");
        }
    }
    if let Some(d) = discrepancy {
        doc.comment(&format!("max_discrepancy = {}", full(d)));
        println!("max |feshbach - direct| discrepancy: {}", full(d));
    }
    doc.write(cfg.csv_out.as_deref())
}
