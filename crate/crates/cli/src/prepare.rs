//! Shared model preparation for the commands.

use ptfesh_core::hobasis::{
    build_model, build_parity, BasisSpec, ModelSpec, OperatorMatrix,
};
use ptfesh_core::partitioning::{
    assemble_full, block_parity, parity_partition, PartitionedHamiltonian,
};
use ptfesh_core::selfconsist::spectral_interval;

use crate::config::{ModelChoice, RunConfig};
use crate::AppError;

/// A model resolved into both frames: the partitioned blocks for the
/// Feshbach route, and the Hamiltonian + parity pair for the dense oracle
/// and the pseudo-metric machinery.
pub struct Prepared {
    pub partitioned: PartitionedHamiltonian,
    pub hamiltonian: OperatorMatrix,
    pub parity: OperatorMatrix,
    pub interval: (f64, f64),
}

pub fn prepare(cfg: &RunConfig) -> Result<Prepared, AppError> {
    let (partitioned, hamiltonian, parity) = match &cfg.model {
        ModelChoice::Oscillator {
            cubic,
            even_coeff,
            even_power,
        } => {
            let basis = BasisSpec::new(cfg.basis_dim)
                .map_err(|e| AppError::config(e.to_string()))?;
            let spec = ModelSpec::new(*cubic, *even_power, *even_coeff)
                .map_err(|e| AppError::config(e.to_string()))?;
            let h = build_model(&spec, basis).map_err(|e| AppError::solver(e.to_string()))?;
            let p = build_parity(basis);
            let pp =
                parity_partition(&h, &p).map_err(|e| AppError::solver(e.to_string()))?;
            (pp, h, p)
        }
        ModelChoice::Toy { omega, alpha } => {
            let pp = PartitionedHamiltonian::toy(*omega, *alpha);
            let h = assemble_full(&pp);
            let p = block_parity(1, 1);
            (pp, h, p)
        }
    };
    let interval = cfg.interval.unwrap_or_else(|| spectral_interval(&partitioned));
    Ok(Prepared {
        partitioned,
        hamiltonian,
        parity,
        interval,
    })
}
