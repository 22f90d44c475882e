//! Pseudo-unitary time evolution from the spectral decomposition.
//!
//! ψ[t] = Σ_real |ψ_n⟩ Q_n e^{−iE_n t} ⟨ψ_n|𝒫|ψ0⟩
//!       + Σ_pairs |ψ₊⟩ (1/c*) e^{−iEt} ⟨ψ₋|𝒫|ψ0⟩ + |ψ₋⟩ (1/c) e^{−iE*t} ⟨ψ₊|𝒫|ψ0⟩.
//!
//! The quasi-parity enters as the metric weight, not in the exponent, which
//! is the reading consistent with ψ'[t] = −iHψ[t]. The indefinite product
//! ⟨ψ[t]|𝒫|ψ[t]⟩ is conserved exactly in this representation even when the
//! Euclidean norm grows (broken phase).

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::hobasis::OperatorMatrix;
use crate::linalg::C64;
use crate::pseudometric::{pseudo_inner, InnerMode, SpectralData};

#[derive(Debug, Clone)]
pub struct EvolutionTrace {
    pub times: Vec<f64>,
    pub pseudo_norms: Vec<C64>,
    pub euclidean_norms: Vec<f64>,
    pub state_snapshots: Option<Vec<DVector<C64>>>,
}

fn check_ready(spectral: &SpectralData, p: &OperatorMatrix, psi0: &DVector<C64>) -> Result<()> {
    if !spectral.is_normalized() {
        return Err(Error::NotNormalized);
    }
    if psi0.len() != spectral.dim() || p.dim() != spectral.dim() {
        return Err(Error::DimensionMismatch {
            expected: spectral.dim(),
            got: psi0.len(),
        });
    }
    Ok(())
}

/// Propagates ψ0 to time t through the pseudo-normalized spectral data.
pub fn evolve_state(
    spectral: &SpectralData,
    p: &OperatorMatrix,
    psi0: &DVector<C64>,
    t: f64,
) -> Result<DVector<C64>> {
    check_ready(spectral, p, psi0)?;
    let mut psi = DVector::<C64>::zeros(spectral.dim());
    let minus_i = C64::new(0.0, -1.0);
    for &n in &spectral.real_level_indices() {
        let q = spectral.quasi_parities()[n].value().ok_or(Error::Degeneracy {
            level: n,
            pseudo_norm: 0.0,
        })?;
        let amp = pseudo_inner(spectral.vector(n), psi0, p, InnerMode::Metric)?;
        let phase = (minus_i * spectral.eigenvalues()[n] * t).exp();
        psi += spectral.vector(n) * (amp * phase * q);
    }
    for link in spectral.pairs() {
        let e = spectral.eigenvalues()[link.plus];
        let amp_minus = pseudo_inner(spectral.vector(link.minus), psi0, p, InnerMode::Metric)?;
        let amp_plus = pseudo_inner(spectral.vector(link.plus), psi0, p, InnerMode::Metric)?;
        psi += spectral.vector(link.plus)
            * (amp_minus * (minus_i * e * t).exp() / link.c.conj());
        psi += spectral.vector(link.minus)
            * (amp_plus * (minus_i * e.conj() * t).exp() / link.c);
    }
    Ok(psi)
}

/// Records ⟨ψ[t]|𝒫|ψ[t]⟩ and ‖ψ[t]‖ along a strictly increasing time list.
pub fn trace_conservation(
    spectral: &SpectralData,
    p: &OperatorMatrix,
    psi0: &DVector<C64>,
    times: &[f64],
    keep_snapshots: bool,
) -> Result<EvolutionTrace> {
    check_ready(spectral, p, psi0)?;
    for w in times.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::invalid("times must be strictly increasing"));
        }
    }
    let mut pseudo_norms = Vec::with_capacity(times.len());
    let mut euclidean_norms = Vec::with_capacity(times.len());
    let mut snapshots = keep_snapshots.then(Vec::new);
    for &t in times {
        let psi = evolve_state(spectral, p, psi0, t)?;
        pseudo_norms.push(pseudo_inner(&psi, &psi, p, InnerMode::Metric)?);
        euclidean_norms.push(psi.norm());
        if let Some(s) = snapshots.as_mut() {
            s.push(psi);
        }
    }
    Ok(EvolutionTrace {
        times: times.to_vec(),
        pseudo_norms,
        euclidean_norms,
        state_snapshots: snapshots,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hobasis::{build_model, build_parity, BasisSpec, ModelSpec};
    use crate::oracle::{dense_expm, direct_spectrum};
    use crate::partitioning::{assemble_full, block_parity, Alpha, PartitionedHamiltonian};
    use crate::pseudometric::pseudo_normalize;

    fn basis_vector(dim: usize, k: usize) -> DVector<C64> {
        let mut v = DVector::<C64>::zeros(dim);
        v[k] = C64::new(1.0, 0.0);
        v
    }

    #[test]
    fn stationary_state_picks_up_a_phase_only() {
        let basis = BasisSpec::new(12).unwrap();
        let p = build_parity(basis);
        let h = build_model(&ModelSpec::pt(0.2, 1.0).unwrap(), basis).unwrap();
        let data = pseudo_normalize(&direct_spectrum(&h).unwrap(), &p).unwrap();
        let n = 2;
        let psi0 = data.vector(n).clone();
        let e = data.eigenvalues()[n];
        let t = 1.7;
        let psi = evolve_state(&data, &p, &psi0, t).unwrap();
        let expected = &psi0 * (C64::new(0.0, -1.0) * e * t).exp();
        assert!((psi - expected).norm() < 1e-8);
    }

    #[test]
    fn time_zero_reproduces_the_state() {
        let basis = BasisSpec::new(14).unwrap();
        let p = build_parity(basis);
        let h = build_model(&ModelSpec::pt(0.2, 0.1).unwrap(), basis).unwrap();
        let data = pseudo_normalize(&direct_spectrum(&h).unwrap(), &p).unwrap();
        let psi0 = basis_vector(14, 0);
        let psi = evolve_state(&data, &p, &psi0, 0.0).unwrap();
        assert!((psi - psi0).norm() < 1e-8);
    }

    #[test]
    fn matches_direct_matrix_exponential() {
        let p2 = block_parity(1, 1);
        for omega in [0.3, 0.6] {
            let toy = PartitionedHamiltonian::toy(omega, Alpha::Minus);
            let full = assemble_full(&toy);
            let data = pseudo_normalize(&direct_spectrum(&full).unwrap(), &p2).unwrap();
            let psi0 = basis_vector(2, 0);
            for t in [0.5, 1.0, 3.0] {
                let u = dense_expm(&(full.matrix() * C64::new(0.0, -t)));
                let expected = &u * &psi0;
                let got = evolve_state(&data, &p2, &psi0, t).unwrap();
                assert!(
                    (&got - &expected).norm() < 1e-10,
                    "omega {omega}, t {t}: deviation {}",
                    (got - expected).norm()
                );
            }
        }
    }

    #[test]
    fn broken_pair_grows_euclidean_but_conserves_pseudo_norm() {
        let p2 = block_parity(1, 1);
        let toy = PartitionedHamiltonian::toy(0.6, Alpha::Minus);
        let data =
            pseudo_normalize(&direct_spectrum(&assemble_full(&toy)).unwrap(), &p2).unwrap();
        let psi0 = basis_vector(2, 0);
        let times: Vec<f64> = (0..=40).map(|k| 0.25 * k as f64).collect();
        let trace = trace_conservation(&data, &p2, &psi0, &times, false).unwrap();
        let first = trace.pseudo_norms[0];
        for v in &trace.pseudo_norms {
            assert!((v - first).norm() <= 1e-8 * (1.0 + first.norm()));
        }
        assert!(trace.euclidean_norms.last().unwrap() > &(trace.euclidean_norms[0] * 2.0));
    }

    #[test]
    fn group_property_holds() {
        let basis = BasisSpec::new(10).unwrap();
        let p = build_parity(basis);
        let h = build_model(&ModelSpec::pt(0.25, 1.0).unwrap(), basis).unwrap();
        let data = pseudo_normalize(&direct_spectrum(&h).unwrap(), &p).unwrap();
        let psi0 = basis_vector(10, 1);
        let (t1, t2) = (0.8, 1.4);
        let once = evolve_state(&data, &p, &psi0, t1 + t2).unwrap();
        let mid = evolve_state(&data, &p, &psi0, t1).unwrap();
        let twice = evolve_state(&data, &p, &mid, t2).unwrap();
        assert!((once - twice).norm() < 1e-8);
    }

    #[test]
    fn generator_consistency() {
        let basis = BasisSpec::new(10).unwrap();
        let p = build_parity(basis);
        let h = build_model(&ModelSpec::pt(0.25, 1.0).unwrap(), basis).unwrap();
        let data = pseudo_normalize(&direct_spectrum(&h).unwrap(), &p).unwrap();
        let psi0 = basis_vector(10, 0);
        let delta = 1e-6;
        let psi_d = evolve_state(&data, &p, &psi0, delta).unwrap();
        let finite = (psi_d - &psi0) / C64::new(delta, 0.0);
        let hpsi = h.matrix() * &psi0;
        let generated = &hpsi * C64::new(0.0, -1.0);
        assert!((finite - generated).norm() < 1e-4 * hpsi.norm());
    }

    #[test]
    fn requires_normalized_data_and_increasing_times() {
        let p2 = block_parity(1, 1);
        let toy = PartitionedHamiltonian::toy(0.3, Alpha::Minus);
        let raw = direct_spectrum(&assemble_full(&toy)).unwrap();
        let psi0 = basis_vector(2, 0);
        assert!(matches!(
            evolve_state(&raw, &p2, &psi0, 1.0),
            Err(Error::NotNormalized)
        ));
        let data = pseudo_normalize(&raw, &p2).unwrap();
        assert!(trace_conservation(&data, &p2, &psi0, &[0.0, 0.5, 0.5], false).is_err());
    }
}
