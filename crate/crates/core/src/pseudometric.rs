//! Indefinite inner product ⟨ψ|𝒫|φ⟩, quasi-parity, pseudo-normalization, and
//! the spectral reconstructions it supports.
//!
//! Real levels are scaled to ⟨ψ_n|𝒫|ψ_n⟩ = Q_n with quasi-parity Q_n = ±1.
//! Complex-conjugate doublets have vanishing self-overlaps, so they carry an
//! off-diagonal constant c = ⟨ψ₊|𝒫|ψ₋⟩ instead, with ψ₋ chosen as the
//! antilinear (𝒫𝒯) image of ψ₊. Completeness and the spectral form of H then
//! read
//!
//!   I = Σ_n |ψ_n⟩ Q_n ⟨ψ_n|𝒫 + Σ_pairs |ψ₊⟩(1/c*)⟨ψ₋|𝒫 + |ψ₋⟩(1/c)⟨ψ₊|𝒫,
//!   H = Σ_n |ψ_n⟩ E_n Q_n ⟨ψ_n|𝒫 + Σ_pairs |ψ₊⟩(E/c*)⟨ψ₋|𝒫 + |ψ₋⟩(E*/c)⟨ψ₊|𝒫.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::hobasis::OperatorMatrix;
use crate::linalg::{self, C64};
use crate::partitioning::normalize_pt_phase;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuasiParity {
    Plus,
    Minus,
    Undefined,
}

impl QuasiParity {
    pub fn value(self) -> Option<f64> {
        match self {
            QuasiParity::Plus => Some(1.0),
            QuasiParity::Minus => Some(-1.0),
            QuasiParity::Undefined => None,
        }
    }
}

/// Indices of a complex-conjugate doublet and its pseudo-normalization
/// constant c = ⟨ψ₊|𝒫|ψ₋⟩ (set by [`pseudo_normalize`]).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairLink {
    pub plus: usize,
    pub minus: usize,
    pub c: C64,
}

/// Eigenvalues, right eigenvectors, quasi-parities and pair links of one
/// Hamiltonian, with the source matrix kept for reconstruction checks.
#[derive(Debug, Clone)]
pub struct SpectralData {
    eigenvalues: Vec<C64>,
    vectors: Vec<DVector<C64>>,
    quasi_parities: Vec<QuasiParity>,
    pairs: Vec<PairLink>,
    hamiltonian: DMatrix<C64>,
    normalized: bool,
}

const PAIR_TOL: f64 = 1e-10;

/// |self pseudo-norm| below this fraction of ‖ψ‖² counts as vanished.
pub const DEGENERACY_THRESHOLD: f64 = 1e-8;

impl SpectralData {
    pub fn new(
        eigenvalues: Vec<C64>,
        vectors: Vec<DVector<C64>>,
        pairs: Vec<PairLink>,
        hamiltonian: DMatrix<C64>,
    ) -> Result<Self> {
        if eigenvalues.len() != vectors.len() {
            return Err(Error::DimensionMismatch {
                expected: eigenvalues.len(),
                got: vectors.len(),
            });
        }
        let mut in_pair = vec![false; eigenvalues.len()];
        for link in &pairs {
            if link.plus >= eigenvalues.len() || link.minus >= eigenvalues.len() {
                return Err(Error::invalid("pair link index out of range"));
            }
            in_pair[link.plus] = true;
            in_pair[link.minus] = true;
            let ep = eigenvalues[link.plus];
            let em = eigenvalues[link.minus];
            let dev = (em - ep.conj()).norm();
            if dev > PAIR_TOL * (1.0 + ep.norm()) {
                return Err(Error::Structure {
                    context: format!("pair ({}, {}) is not conjugate", link.plus, link.minus),
                    violation: dev,
                });
            }
        }
        for (i, e) in eigenvalues.iter().enumerate() {
            if !in_pair[i] && e.im.abs() > PAIR_TOL * (1.0 + e.re.abs()) {
                return Err(Error::Structure {
                    context: format!("unpaired eigenvalue {i} is not real"),
                    violation: e.im.abs(),
                });
            }
        }
        for (i, v) in vectors.iter().enumerate() {
            if v.norm() == 0.0 {
                return Err(Error::invalid(format!("eigenvector {i} is zero")));
            }
        }
        let n = eigenvalues.len();
        Ok(SpectralData {
            eigenvalues,
            vectors,
            quasi_parities: vec![QuasiParity::Undefined; n],
            pairs,
            hamiltonian,
            normalized: false,
        })
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.nrows()
    }

    pub fn eigenvalues(&self) -> &[C64] {
        &self.eigenvalues
    }

    pub fn vector(&self, i: usize) -> &DVector<C64> {
        &self.vectors[i]
    }

    pub fn quasi_parities(&self) -> &[QuasiParity] {
        &self.quasi_parities
    }

    pub fn pairs(&self) -> &[PairLink] {
        &self.pairs
    }

    pub fn hamiltonian(&self) -> &DMatrix<C64> {
        &self.hamiltonian
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// Indices that are not members of any conjugate pair.
    pub fn real_level_indices(&self) -> Vec<usize> {
        let mut paired = vec![false; self.len()];
        for link in &self.pairs {
            paired[link.plus] = true;
            paired[link.minus] = true;
        }
        (0..self.len()).filter(|&i| !paired[i]).collect()
    }

    /// Real eigenvalues, ascending, including snapped pair-free levels only.
    pub fn real_eigenvalues(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self
            .real_level_indices()
            .iter()
            .map(|&i| self.eigenvalues[i].re)
            .collect();
        out.sort_by(f64::total_cmp);
        out
    }

    /// Drops the level with the given index; for negative-control tests.
    pub fn without_level(&self, index: usize) -> Self {
        let mut out = self.clone();
        out.eigenvalues.remove(index);
        out.vectors.remove(index);
        out.quasi_parities.remove(index);
        out.pairs.retain(|l| l.plus != index && l.minus != index);
        for link in &mut out.pairs {
            if link.plus > index {
                link.plus -= 1;
            }
            if link.minus > index {
                link.minus -= 1;
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InnerMode {
    /// conj(ψ)ᵀ·𝒫·φ — Hermitian-conjugate left factor with metric 𝒫.
    Metric,
    /// ψᵀ·φ — no conjugation; the ⟨ψ|𝒯⃗|ψ'⟩ form with 𝒫² = 1 dropped.
    Bilinear,
}

pub fn pseudo_inner(
    psi: &DVector<C64>,
    phi: &DVector<C64>,
    p: &OperatorMatrix,
    mode: InnerMode,
) -> Result<C64> {
    if psi.len() != phi.len() {
        return Err(Error::DimensionMismatch {
            expected: psi.len(),
            got: phi.len(),
        });
    }
    match mode {
        InnerMode::Metric => {
            if psi.len() != p.dim() {
                return Err(Error::DimensionMismatch {
                    expected: p.dim(),
                    got: psi.len(),
                });
            }
            Ok((0..psi.len())
                .map(|i| psi[i].conj() * p.matrix()[(i, i)] * phi[i])
                .sum())
        }
        InnerMode::Bilinear => Ok((0..psi.len()).map(|i| psi[i] * phi[i]).sum()),
    }
}

fn metric_self(psi: &DVector<C64>, p: &OperatorMatrix) -> C64 {
    pseudo_inner(psi, psi, p, InnerMode::Metric).expect("matching dimensions")
}

/// Sign of the self pseudo-norm; Undefined when it has vanished (exceptional
/// point) or is genuinely complex (custom couplings).
pub fn assign_quasi_parity(psi: &DVector<C64>, p: &OperatorMatrix) -> QuasiParity {
    assert_eq!(psi.len(), p.dim(), "quasi-parity needs matching dimensions");
    let s = metric_self(psi, p);
    let scale = psi.norm_squared();
    if s.norm() < DEGENERACY_THRESHOLD * scale || s.im.abs() > 1e-6 * s.norm() {
        QuasiParity::Undefined
    } else if s.re > 0.0 {
        QuasiParity::Plus
    } else {
        QuasiParity::Minus
    }
}

/// Antilinear symmetry that maps ψ₊ to its conjugate-pair partner.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum PairImage {
    /// Real Hamiltonian: plain conjugation.
    Conjugation,
    /// Complex PT-symmetric Hamiltonian: parity times conjugation.
    ParityConjugation,
    /// No antilinear symmetry detected; keep solver vectors as given.
    None,
}

fn detect_pair_image(h: &DMatrix<C64>, p: &OperatorMatrix) -> PairImage {
    let scale = 1.0 + linalg::max_abs(h);
    if linalg::max_imag(h) <= 1e-13 * scale {
        return PairImage::Conjugation;
    }
    let pm = p.matrix();
    let pt = pm * h.map(|z| z.conj()) * pm;
    if linalg::max_abs(&(&pt - h)) <= 1e-10 * scale {
        return PairImage::ParityConjugation;
    }
    PairImage::None
}

fn apply_image(v: &DVector<C64>, p: &OperatorMatrix, image: PairImage) -> DVector<C64> {
    match image {
        PairImage::Conjugation => v.map(|z| z.conj()),
        PairImage::ParityConjugation => {
            DVector::from_fn(v.len(), |i, _| p.matrix()[(i, i)] * v[i].conj())
        }
        PairImage::None => v.clone(),
    }
}

/// Scales real levels to ⟨ψ_n|𝒫|ψ_n⟩ = Q_n and rebuilds each conjugate pair
/// from the 𝒫𝒯 image of its ψ₊ member, recording c = ⟨ψ₊|𝒫|ψ₋⟩.
pub fn pseudo_normalize(spectral: &SpectralData, p: &OperatorMatrix) -> Result<SpectralData> {
    if spectral.dim() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: spectral.dim(),
            got: p.dim(),
        });
    }
    let image = detect_pair_image(&spectral.hamiltonian, p);
    let mut out = spectral.clone();

    for &i in &spectral.real_level_indices() {
        let mut v = spectral.vectors[i].clone();
        v /= C64::new(v.norm(), 0.0);
        v = match image {
            PairImage::ParityConjugation => {
                normalize_pt_phase(&v, p).unwrap_or_else(|_| linalg::canonical_phase(&v))
            }
            _ => linalg::canonical_phase(&v),
        };
        let s = metric_self(&v, p);
        if s.norm() < DEGENERACY_THRESHOLD {
            return Err(Error::Degeneracy {
                level: i,
                pseudo_norm: s.norm(),
            });
        }
        let q = if s.im.abs() > 1e-6 * s.norm() {
            QuasiParity::Undefined
        } else if s.re > 0.0 {
            QuasiParity::Plus
        } else {
            QuasiParity::Minus
        };
        v /= C64::new(s.norm().sqrt(), 0.0);
        out.vectors[i] = v;
        out.quasi_parities[i] = q;
    }

    for k in 0..out.pairs.len() {
        let mut link = out.pairs[k];
        // the "+" member carries the positive imaginary part
        if spectral.eigenvalues[link.plus].im < spectral.eigenvalues[link.minus].im {
            std::mem::swap(&mut link.plus, &mut link.minus);
        }
        let mut vp = spectral.vectors[link.plus].clone();
        vp /= C64::new(vp.norm(), 0.0);
        vp = linalg::canonical_phase(&vp);
        let vm = match image {
            PairImage::None => {
                let mut w = spectral.vectors[link.minus].clone();
                w /= C64::new(w.norm(), 0.0);
                linalg::canonical_phase(&w)
            }
            _ => apply_image(&vp, p, image),
        };
        let c = pseudo_inner(&vp, &vm, p, InnerMode::Metric)?;
        if c.norm() < DEGENERACY_THRESHOLD {
            return Err(Error::Degeneracy {
                level: link.plus,
                pseudo_norm: c.norm(),
            });
        }
        out.vectors[link.plus] = vp;
        out.vectors[link.minus] = vm;
        out.quasi_parities[link.plus] = QuasiParity::Undefined;
        out.quasi_parities[link.minus] = QuasiParity::Undefined;
        out.pairs[k] = PairLink { c, ..link };
    }

    out.normalized = true;
    Ok(out)
}

/// Gram matrix of pseudo-inner products and the worst off-diagonal entry
/// outside linked pairs.
#[derive(Debug, Clone)]
pub struct PseudoNormReport {
    pub gram: DMatrix<C64>,
    pub max_offdiag_violation: f64,
    pub self_norms: Vec<C64>,
}

pub fn pseudo_norm_report(spectral: &SpectralData, p: &OperatorMatrix) -> Result<PseudoNormReport> {
    let n = spectral.len();
    let mut gram = DMatrix::<C64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            gram[(i, j)] =
                pseudo_inner(&spectral.vectors[i], &spectral.vectors[j], p, InnerMode::Metric)?;
        }
    }
    let mut linked = vec![vec![false; n]; n];
    for link in &spectral.pairs {
        linked[link.plus][link.minus] = true;
        linked[link.minus][link.plus] = true;
    }
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j && !linked[i][j] {
                worst = worst.max(gram[(i, j)].norm());
            }
        }
    }
    let self_norms = (0..n).map(|i| gram[(i, i)]).collect();
    Ok(PseudoNormReport {
        gram,
        max_offdiag_violation: worst,
        self_norms,
    })
}

fn require_normalized(spectral: &SpectralData) -> Result<()> {
    if !spectral.normalized {
        return Err(Error::NotNormalized);
    }
    Ok(())
}

/// Row functional ⟨ψ|𝒫 as a row vector.
fn metric_row(v: &DVector<C64>, p: &OperatorMatrix) -> nalgebra::RowDVector<C64> {
    nalgebra::RowDVector::from_fn(v.len(), |_, j| v[j].conj() * p.matrix()[(j, j)])
}

fn spectral_sum(
    spectral: &SpectralData,
    p: &OperatorMatrix,
    real_weight: impl Fn(usize) -> C64,
    pair_weights: impl Fn(&PairLink) -> (C64, C64),
) -> Result<DMatrix<C64>> {
    let dim = spectral.dim();
    let mut acc = DMatrix::<C64>::zeros(dim, dim);
    for &i in &spectral.real_level_indices() {
        let q = spectral.quasi_parities[i]
            .value()
            .ok_or(Error::Degeneracy {
                level: i,
                pseudo_norm: 0.0,
            })?;
        let row = metric_row(&spectral.vectors[i], p);
        acc += &spectral.vectors[i] * row * (real_weight(i) * q);
    }
    for link in &spectral.pairs {
        let (w_plus, w_minus) = pair_weights(link);
        let row_minus = metric_row(&spectral.vectors[link.minus], p);
        let row_plus = metric_row(&spectral.vectors[link.plus], p);
        acc += &spectral.vectors[link.plus] * row_minus * w_plus;
        acc += &spectral.vectors[link.minus] * row_plus * w_minus;
    }
    Ok(acc)
}

/// Largest-entry deviation of the resolved completeness sum from identity.
pub fn reconstruct_identity(spectral: &SpectralData, p: &OperatorMatrix) -> Result<f64> {
    require_normalized(spectral)?;
    let one = C64::new(1.0, 0.0);
    let sum = spectral_sum(
        spectral,
        p,
        |_| one,
        |link| (one / link.c.conj(), one / link.c),
    )?;
    let identity = DMatrix::<C64>::identity(spectral.dim(), spectral.dim());
    Ok(linalg::max_abs(&(sum - identity)))
}

/// Largest-entry deviation of the spectral sum from H, relative to ‖H‖.
pub fn reconstruct_hamiltonian(spectral: &SpectralData, p: &OperatorMatrix) -> Result<f64> {
    require_normalized(spectral)?;
    let sum = spectral_sum(
        spectral,
        p,
        |i| spectral.eigenvalues[i],
        |link| {
            let e = spectral.eigenvalues[link.plus];
            (e / link.c.conj(), e.conj() / link.c)
        },
    )?;
    let scale = linalg::max_abs(&spectral.hamiltonian).max(1e-300);
    Ok(linalg::max_abs(&(sum - &spectral.hamiltonian)) / scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hobasis::{build_model, build_parity, BasisSpec, ModelSpec};
    use crate::oracle::direct_spectrum;
    use crate::partitioning::{assemble_full, block_parity, Alpha, PartitionedHamiltonian};

    #[test]
    fn metric_on_basis_vectors_gives_parity() {
        let p = build_parity(BasisSpec::new(2).unwrap());
        let e0 = DVector::from_vec(vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
        let e1 = DVector::from_vec(vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)]);
        assert_eq!(pseudo_inner(&e0, &e0, &p, InnerMode::Metric).unwrap().re, 1.0);
        assert_eq!(pseudo_inner(&e1, &e1, &p, InnerMode::Metric).unwrap().re, -1.0);
        let short = DVector::from_vec(vec![C64::new(1.0, 0.0)]);
        assert!(pseudo_inner(&e0, &short, &p, InnerMode::Metric).is_err());
    }

    #[test]
    fn distinct_pt_levels_are_pseudo_orthogonal() {
        let basis = BasisSpec::new(14).unwrap();
        let p = build_parity(basis);
        let h = build_model(&ModelSpec::pt(0.2, 1.0).unwrap(), basis).unwrap();
        let data = direct_spectrum(&h).unwrap();
        assert!(data.pairs().is_empty(), "this model is unbroken at dim 14");
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    let s =
                        pseudo_inner(data.vector(i), data.vector(j), &p, InnerMode::Metric)
                            .unwrap();
                    assert!(s.norm() < 1e-10, "levels {i},{j}: overlap {s}");
                }
            }
        }
    }

    #[test]
    fn quasi_parities_alternate_in_hermitian_quartic() {
        let basis = BasisSpec::new(20).unwrap();
        let p = build_parity(basis);
        let h = build_model(&ModelSpec::hermitian(0.0, 0.5).unwrap(), basis).unwrap();
        let data = pseudo_normalize(&direct_spectrum(&h).unwrap(), &p).unwrap();
        for (n, q) in data.quasi_parities().iter().take(10).enumerate() {
            let expected = if n % 2 == 0 {
                QuasiParity::Plus
            } else {
                QuasiParity::Minus
            };
            assert_eq!(*q, expected, "level {n}");
        }
        let report = pseudo_norm_report(&data, &p).unwrap();
        assert!(report.max_offdiag_violation < 1e-10);
        for (n, s) in report.self_norms.iter().take(10).enumerate() {
            let want = if n % 2 == 0 { 1.0 } else { -1.0 };
            assert!((s.re - want).abs() < 1e-10 && s.im.abs() < 1e-12);
        }
    }

    #[test]
    fn broken_pair_self_overlap_vanishes() {
        let p2 = block_parity(1, 1);
        let toy = PartitionedHamiltonian::toy(0.6, Alpha::Minus);
        let data = direct_spectrum(&assemble_full(&toy)).unwrap();
        assert_eq!(data.pairs().len(), 1);
        for i in 0..2 {
            let q = assign_quasi_parity(data.vector(i), &p2);
            assert_eq!(q, QuasiParity::Undefined);
            let s = metric_self(&(data.vector(i) / C64::new(data.vector(i).norm(), 0.0)), &p2);
            assert!(s.norm() < 1e-10, "self overlap {s}");
        }
        let normalized = pseudo_normalize(&data, &p2).unwrap();
        let link = normalized.pairs()[0];
        assert!(link.c.norm() > 1e-3, "pair constant should be nonzero");
        let report = pseudo_norm_report(&normalized, &p2).unwrap();
        assert!(report.gram[(link.plus, link.plus)].norm() < 1e-10);
        assert!(report.gram[(link.minus, link.minus)].norm() < 1e-10);
        assert!((report.gram[(link.plus, link.minus)] - link.c).norm() < 1e-12);
        assert!((report.gram[(link.minus, link.plus)] - link.c.conj()).norm() < 1e-12);
    }

    #[test]
    fn degeneracy_error_at_exceptional_point() {
        let toy = PartitionedHamiltonian::toy(0.5, Alpha::Minus);
        let data = direct_spectrum(&assemble_full(&toy)).unwrap();
        let p2 = block_parity(1, 1);
        assert!(matches!(
            pseudo_normalize(&data, &p2),
            Err(Error::Degeneracy { .. })
        ));
    }

    #[test]
    fn metric_and_bilinear_agree_for_phase_normalized_states() {
        let basis = BasisSpec::new(12).unwrap();
        let p = build_parity(basis);
        let h = build_model(&ModelSpec::pt(0.2, 0.1).unwrap(), basis).unwrap();
        let data = pseudo_normalize(&direct_spectrum(&h).unwrap(), &p).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let metric =
                    pseudo_inner(data.vector(i), data.vector(j), &p, InnerMode::Metric).unwrap();
                let bilinear =
                    pseudo_inner(data.vector(i), data.vector(j), &p, InnerMode::Bilinear)
                        .unwrap();
                assert!(
                    (metric - bilinear).norm() < 1e-12,
                    "modes disagree at ({i},{j}): {metric} vs {bilinear}"
                );
            }
        }
    }

    #[test]
    fn reconstructions_toy_unbroken_and_broken() {
        let p2 = block_parity(1, 1);
        for omega in [0.3, 0.6] {
            let toy = PartitionedHamiltonian::toy(omega, Alpha::Minus);
            let data =
                pseudo_normalize(&direct_spectrum(&assemble_full(&toy)).unwrap(), &p2).unwrap();
            let rid = reconstruct_identity(&data, &p2).unwrap();
            let rh = reconstruct_hamiltonian(&data, &p2).unwrap();
            assert!(rid < 1e-12, "identity residual {rid} at omega {omega}");
            assert!(rh < 1e-12, "hamiltonian residual {rh} at omega {omega}");
        }
    }

    #[test]
    fn dropping_a_level_breaks_completeness() {
        let basis = BasisSpec::new(8).unwrap();
        let p = build_parity(basis);
        let h = build_model(&ModelSpec::hermitian(0.0, 0.3).unwrap(), basis).unwrap();
        let data = pseudo_normalize(&direct_spectrum(&h).unwrap(), &p).unwrap();
        assert!(reconstruct_identity(&data, &p).unwrap() < 1e-10);
        let truncated = data.without_level(3);
        let residual = reconstruct_identity(&truncated, &p).unwrap();
        assert!(residual > 0.5, "rank-deficient sum should fail loudly, got {residual}");
    }

    #[test]
    fn diagonal_hamiltonian_reconstructs_exactly() {
        let m = DMatrix::from_row_slice(2, 2, &[
            C64::new(1.0, 0.0), C64::new(0.0, 0.0),
            C64::new(0.0, 0.0), C64::new(3.0, 0.0),
        ]);
        let h = OperatorMatrix::new(m, crate::hobasis::SymmetryTag::Hermitian).unwrap();
        let p = build_parity(BasisSpec::new(2).unwrap());
        let data = pseudo_normalize(&direct_spectrum(&h).unwrap(), &p).unwrap();
        assert!(reconstruct_hamiltonian(&data, &p).unwrap() < 1e-15);
    }

    #[test]
    fn pair_member_is_pt_image() {
        let p2 = block_parity(1, 1);
        let toy = PartitionedHamiltonian::toy(0.6, Alpha::Minus);
        let data = pseudo_normalize(&direct_spectrum(&assemble_full(&toy)).unwrap(), &p2).unwrap();
        let link = data.pairs()[0];
        // real frame: the antilinear image is plain conjugation
        let image = data.vector(link.plus).map(|z| z.conj());
        assert!((data.vector(link.minus) - image).norm() < 1e-12);
    }

    #[test]
    fn not_normalized_contract() {
        let p2 = block_parity(1, 1);
        let toy = PartitionedHamiltonian::toy(0.3, Alpha::Minus);
        let data = direct_spectrum(&assemble_full(&toy)).unwrap();
        assert!(matches!(
            reconstruct_identity(&data, &p2),
            Err(Error::NotNormalized)
        ));
    }
}
