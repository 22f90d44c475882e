//! Energy-dependent effective Hamiltonian H_eff(ρ) = F − α·A·(G − ρI)⁻¹·A†.
//!
//! H_eff is Hermitian for every real ρ away from the eigenvalues of G, no
//! matter which sign α carries: the minus branch (α = +1) is the Hermitian
//! reduction, the plus branch (α = −1) the PT-symmetric one. The resolvent
//! is applied spectrally from a single cached eigendecomposition of G, so
//! repeated evaluations at different ρ are cheap and pole locations come
//! for free.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{self, C64};
use crate::partitioning::PartitionedHamiltonian;

/// Guard band around eigenvalues of G inside which ρ is rejected.
pub fn pole_guard(rho: f64) -> f64 {
    1e-8 * (1.0 + rho.abs())
}

/// One evaluation of the effective Hamiltonian at fixed ρ.
#[derive(Debug, Clone)]
pub struct EffectiveEvaluation {
    pub rho: f64,
    /// n₊×n₊ Hermitian matrix; purely real whenever the coupling is real.
    pub h_eff: DMatrix<C64>,
    /// min |ρ − eig(G)|, always beyond the pole guard.
    pub pole_distance: f64,
}

/// Eigendecomposition of H_eff(ρ): energies ascending, eigenvector columns
/// orthonormal under the ordinary dot product.
#[derive(Debug, Clone)]
pub struct LinearizedSpectrum {
    pub rho: f64,
    pub energies: Vec<f64>,
    pub vectors: DMatrix<C64>,
}

/// Reusable reduction state for one partitioned Hamiltonian.
#[derive(Debug, Clone)]
pub struct FeshbachReducer {
    f_block: DMatrix<C64>,
    /// A·U where G = U·diag(g)·Uᵀ.
    coupling_modes: DMatrix<C64>,
    /// U, kept to express eliminated components in the original odd basis.
    g_vectors: DMatrix<C64>,
    g_eigenvalues: Vec<f64>,
    alpha: f64,
}

impl FeshbachReducer {
    pub fn new(p: &PartitionedHamiltonian) -> Self {
        let (g_eigenvalues, g_vectors_real) = linalg::sorted_symmetric_eigen(p.g_block());
        let g_vectors = linalg::to_complex(&g_vectors_real);
        let coupling_modes = p.coupling() * &g_vectors;
        FeshbachReducer {
            f_block: linalg::to_complex(p.f_block()),
            coupling_modes,
            g_vectors,
            g_eigenvalues,
            alpha: p.alpha().sign(),
        }
    }

    /// Eigenvalues of G, ascending: the poles of the resolvent.
    pub fn poles(&self) -> &[f64] {
        &self.g_eigenvalues
    }

    /// Poles whose G-eigenmode carries no coupling: exact eigenvalues of the
    /// assembled problem with eigenvector (0, uᵢ), invisible to the
    /// self-consistency condition because (G − ρI)⁻¹ diverges there.
    pub fn decoupled_pole_modes(&self, tol: f64) -> Vec<(f64, DVector<C64>)> {
        let scale = 1.0 + linalg::max_abs(&self.coupling_modes);
        let mut out = Vec::new();
        for (i, &g) in self.g_eigenvalues.iter().enumerate() {
            if self.coupling_modes.column(i).norm() <= tol * scale {
                out.push((g, self.g_vectors.column(i).into_owned()));
            }
        }
        out
    }

    pub fn model_dim(&self) -> usize {
        self.f_block.nrows()
    }

    pub fn pole_distance(&self, rho: f64) -> f64 {
        self.g_eigenvalues
            .iter()
            .map(|g| (g - rho).abs())
            .fold(f64::INFINITY, f64::min)
    }

    fn guard_rho(&self, rho: f64) -> Result<f64> {
        let dist = self.pole_distance(rho);
        if dist <= pole_guard(rho) {
            let pole = self
                .g_eigenvalues
                .iter()
                .copied()
                .min_by(|a, b| (a - rho).abs().total_cmp(&(b - rho).abs()))
                .unwrap_or(f64::NAN);
            return Err(Error::PoleProximity { rho, pole });
        }
        Ok(dist)
    }

    /// H_eff(ρ) = F − α·A·(G − ρI)⁻¹·A†.
    pub fn effective(&self, rho: f64) -> Result<EffectiveEvaluation> {
        let pole_distance = self.guard_rho(rho)?;
        let ne = self.model_dim();
        let nm = self.g_eigenvalues.len();
        let mut h_eff = self.f_block.clone();
        // rank-one spectral terms: −α Σ_i (A u_i)(A u_i)† / (g_i − ρ)
        for i in 0..nm {
            let w = 1.0 / (self.g_eigenvalues[i] - rho);
            let col = self.coupling_modes.column(i);
            for r in 0..ne {
                for c in 0..ne {
                    h_eff[(r, c)] -= col[r] * col[c].conj() * (self.alpha * w);
                }
            }
        }
        Ok(EffectiveEvaluation {
            rho,
            h_eff,
            pole_distance,
        })
    }

    /// Full spectrum of H_eff(ρ), ascending.
    pub fn spectrum(&self, rho: f64) -> Result<LinearizedSpectrum> {
        let eval = self.effective(rho)?;
        let (energies, vectors) = linalg::sorted_hermitian_eigen(&eval.h_eff);
        Ok(LinearizedSpectrum {
            rho,
            energies,
            vectors,
        })
    }

    /// Eliminated out-of-model-space components w = −(G − ρI)⁻¹·A†·v.
    ///
    /// Stacking (v, w) solves the assembled problem whenever ρ is a
    /// self-consistent root with model-space eigenvector v.
    pub fn eliminated(&self, rho: f64, v: &DVector<C64>) -> Result<DVector<C64>> {
        self.guard_rho(rho)?;
        if v.len() != self.model_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.model_dim(),
                got: v.len(),
            });
        }
        if v.norm() == 0.0 {
            return Err(Error::invalid("model-space vector must be nonzero"));
        }
        // (A·U)† v, weighted by the resolvent in the eigenbasis of G
        let mut coeffs = self.coupling_modes.adjoint() * v;
        for (i, c) in coeffs.iter_mut().enumerate() {
            *c *= -1.0 / (self.g_eigenvalues[i] - rho);
        }
        Ok(&self.g_vectors * coeffs)
    }
}

/// One-shot evaluation of H_eff(ρ).
pub fn effective_hamiltonian(p: &PartitionedHamiltonian, rho: f64) -> Result<EffectiveEvaluation> {
    FeshbachReducer::new(p).effective(rho)
}

/// One-shot linearized spectrum at fixed ρ.
pub fn linearized_spectrum(p: &PartitionedHamiltonian, rho: f64) -> Result<LinearizedSpectrum> {
    FeshbachReducer::new(p).spectrum(rho)
}

/// One-shot reconstruction of the eliminated components.
pub fn reconstruct_eliminated(
    p: &PartitionedHamiltonian,
    rho: f64,
    v: &DVector<C64>,
) -> Result<DVector<C64>> {
    FeshbachReducer::new(p).eliminated(rho, v)
}
