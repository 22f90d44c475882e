//! Parity partitioning of Hamiltonians into even/odd blocks.
//!
//! Three input structures are recognized and mapped onto the same real
//! partitioned form [[F, αA], [A†, G]]:
//!
//!  * real symmetric H           → α = +1, A = even/odd coupling block;
//!  * PT-symmetric H with purely imaginary coupling i·Ω → the odd-sector
//!    coefficients are rotated by the phase i, leaving a real A and α = −1;
//!  * the already-rotated real form with antisymmetric coupling pattern
//!    (as produced by [`assemble_full`] at α = −1), so that
//!    parity_partition ∘ assemble_full is the identity on blocks.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::hobasis::{OperatorMatrix, SymmetryTag};
use crate::linalg::{self, C64};

/// Sign of the coupling correction: +1 Hermitian, −1 PT-symmetric.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Alpha {
    Plus,
    Minus,
}

impl Alpha {
    pub fn sign(self) -> f64 {
        match self {
            Alpha::Plus => 1.0,
            Alpha::Minus => -1.0,
        }
    }

    pub fn from_sign(s: f64) -> Result<Self> {
        if s == 1.0 {
            Ok(Alpha::Plus)
        } else if s == -1.0 {
            Ok(Alpha::Minus)
        } else {
            Err(Error::invalid(format!("alpha must be +1 or -1, got {s}")))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    HermitianModel,
    PtModel,
    Custom,
}

/// Blocks of the partitioned eigenproblem [[F − EI, αA], [A†, G − EI]].
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionedHamiltonian {
    f_block: DMatrix<f64>,
    g_block: DMatrix<f64>,
    coupling: DMatrix<C64>,
    alpha: Alpha,
    provenance: Provenance,
}

/// Symmetry tolerance on the stored F and G blocks.
const BLOCK_TOL: f64 = 1e-12;

/// Tolerance for classifying an input as Hermitian vs PT-symmetric.
pub const STRUCTURE_TOL: f64 = 1e-10;

impl PartitionedHamiltonian {
    fn build(
        f_block: DMatrix<f64>,
        g_block: DMatrix<f64>,
        coupling: DMatrix<C64>,
        alpha: Alpha,
        provenance: Provenance,
    ) -> Result<Self> {
        if f_block.nrows() != f_block.ncols() {
            return Err(Error::invalid("F block must be square"));
        }
        if g_block.nrows() != g_block.ncols() {
            return Err(Error::invalid("G block must be square"));
        }
        if coupling.nrows() != f_block.nrows() || coupling.ncols() != g_block.nrows() {
            return Err(Error::DimensionMismatch {
                expected: f_block.nrows(),
                got: coupling.nrows(),
            });
        }
        let scale = 1.0 + linalg::max_abs_real(&f_block).max(linalg::max_abs_real(&g_block));
        let v = linalg::symmetry_violation(&f_block).max(linalg::symmetry_violation(&g_block));
        if v > BLOCK_TOL * scale {
            return Err(Error::Structure {
                context: "F and G must be symmetric".into(),
                violation: v,
            });
        }
        Ok(PartitionedHamiltonian {
            f_block,
            g_block,
            coupling,
            alpha,
            provenance,
        })
    }

    /// Custom partitioned instance; the coupling block may be complex.
    pub fn custom(
        f_block: DMatrix<f64>,
        g_block: DMatrix<f64>,
        coupling: DMatrix<C64>,
        alpha: Alpha,
    ) -> Result<Self> {
        Self::build(f_block, g_block, coupling, alpha, Provenance::Custom)
    }

    /// Custom instance with a real coupling block.
    pub fn custom_real(
        f_block: DMatrix<f64>,
        g_block: DMatrix<f64>,
        coupling: &DMatrix<f64>,
        alpha: Alpha,
    ) -> Result<Self> {
        Self::build(
            f_block,
            g_block,
            linalg::to_complex(coupling),
            alpha,
            Provenance::Custom,
        )
    }

    /// The 2×2 single-mode instance F = [1], G = [2], A = [ω].
    pub fn toy(omega: f64, alpha: Alpha) -> Self {
        PartitionedHamiltonian {
            f_block: DMatrix::from_element(1, 1, 1.0),
            g_block: DMatrix::from_element(1, 1, 2.0),
            coupling: DMatrix::from_element(1, 1, C64::new(omega, 0.0)),
            alpha,
            provenance: Provenance::Custom,
        }
    }

    pub fn f_block(&self) -> &DMatrix<f64> {
        &self.f_block
    }

    pub fn g_block(&self) -> &DMatrix<f64> {
        &self.g_block
    }

    pub fn coupling(&self) -> &DMatrix<C64> {
        &self.coupling
    }

    pub fn alpha(&self) -> Alpha {
        self.alpha
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn even_dim(&self) -> usize {
        self.f_block.nrows()
    }

    pub fn odd_dim(&self) -> usize {
        self.g_block.nrows()
    }

    pub fn dim(&self) -> usize {
        self.even_dim() + self.odd_dim()
    }

    /// True when the coupling block has no imaginary part.
    pub fn coupling_is_real(&self) -> bool {
        linalg::max_imag(&self.coupling) == 0.0
    }

    /// Coupling with flipped sign, A → −A.
    pub fn flipped_coupling(&self) -> Self {
        PartitionedHamiltonian {
            coupling: -&self.coupling,
            ..self.clone()
        }
    }
}

/// Extracts the index sets of the ±1 entries of a diagonal parity operator.
fn parity_index_sets(p: &OperatorMatrix) -> Result<(Vec<usize>, Vec<usize>)> {
    let dim = p.dim();
    let m = p.matrix();
    let mut even = Vec::new();
    let mut odd = Vec::new();
    for i in 0..dim {
        for j in 0..dim {
            if i != j && m[(i, j)].norm() > 1e-14 {
                return Err(Error::invalid("parity operator must be diagonal"));
            }
        }
        let d = m[(i, i)];
        if (d - C64::new(1.0, 0.0)).norm() < 1e-12 {
            even.push(i);
        } else if (d + C64::new(1.0, 0.0)).norm() < 1e-12 {
            odd.push(i);
        } else {
            return Err(Error::invalid(format!(
                "parity diagonal entries must be +1 or -1, got {d}"
            )));
        }
    }
    Ok((even, odd))
}

fn gather(m: &DMatrix<C64>, rows: &[usize], cols: &[usize]) -> DMatrix<C64> {
    DMatrix::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])])
}

/// Parity operator in the partitioned ordering, diag(+1 × n₊, −1 × n₋).
pub fn block_parity(even_dim: usize, odd_dim: usize) -> OperatorMatrix {
    let dim = even_dim + odd_dim;
    let m = DMatrix::<C64>::from_fn(dim, dim, |i, j| {
        if i == j {
            C64::new(if i < even_dim { 1.0 } else { -1.0 }, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    OperatorMatrix::new(m, SymmetryTag::Hermitian).expect("diagonal sign matrix is hermitian")
}

/// Reorders H into even/odd blocks and normalizes the phase convention so
/// that the stored blocks are real.
pub fn parity_partition(
    h: &OperatorMatrix,
    p: &OperatorMatrix,
) -> Result<PartitionedHamiltonian> {
    if h.dim() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            got: p.dim(),
        });
    }
    let (even, odd) = parity_index_sets(p)?;
    let m = h.matrix();
    let hee = gather(m, &even, &even);
    let hoo = gather(m, &odd, &odd);
    let heo = gather(m, &even, &odd);
    let hoe = gather(m, &odd, &even);

    let diag_imag = linalg::max_imag(&hee).max(linalg::max_imag(&hoo));
    let diag_asym = linalg::symmetry_violation(&linalg::real_part(&hee))
        .max(linalg::symmetry_violation(&linalg::real_part(&hoo)));
    let scale = 1.0 + linalg::max_abs(m);
    let tol = STRUCTURE_TOL * scale;

    // Hermitian (real symmetric) structure: coupling real, H_oe = H_eoᵀ.
    let herm_violation = diag_imag
        .max(diag_asym)
        .max(linalg::max_imag(&heo))
        .max(linalg::max_imag(&hoe))
        .max(linalg::max_abs(&(&heo - hoe.transpose())));

    // PT structure in the original frame: coupling purely imaginary,
    // H_eo = i·A, H_oe = i·Aᵀ.
    let pt_violation = diag_imag
        .max(diag_asym)
        .max(linalg::max_abs_real(&linalg::real_part(&heo)))
        .max(linalg::max_abs_real(&linalg::real_part(&hoe)))
        .max(linalg::max_abs_real(
            &(linalg::imag_part(&heo) - linalg::imag_part(&hoe).transpose()),
        ));

    // Already-rotated real PT form: H_eo = −A, H_oe = Aᵀ.
    let rotated_violation = diag_imag
        .max(diag_asym)
        .max(linalg::max_imag(&heo))
        .max(linalg::max_imag(&hoe))
        .max(linalg::max_abs(&(&heo + hoe.transpose())));

    let f_block = linalg::real_part(&hee);
    let g_block = linalg::real_part(&hoo);

    if herm_violation <= tol {
        let coupling = linalg::to_complex(&linalg::real_part(&heo));
        return PartitionedHamiltonian::build(
            f_block,
            g_block,
            coupling,
            Alpha::Plus,
            Provenance::HermitianModel,
        );
    }
    if pt_violation <= tol {
        let coupling = linalg::to_complex(&linalg::imag_part(&heo));
        return PartitionedHamiltonian::build(
            f_block,
            g_block,
            coupling,
            Alpha::Minus,
            Provenance::PtModel,
        );
    }
    if rotated_violation <= tol {
        let coupling = linalg::to_complex(&linalg::real_part(&hoe).transpose());
        return PartitionedHamiltonian::build(
            f_block,
            g_block,
            coupling,
            Alpha::Minus,
            Provenance::PtModel,
        );
    }
    Err(Error::Structure {
        context: "input is neither Hermitian nor PT-symmetric in the parity basis".into(),
        violation: herm_violation.min(pt_violation).min(rotated_violation),
    })
}

/// Assembles [[F, αA], [A†, G]] in the partitioned (even-first) ordering.
pub fn assemble_full(p: &PartitionedHamiltonian) -> OperatorMatrix {
    let ne = p.even_dim();
    let no = p.odd_dim();
    let dim = ne + no;
    let mut m = DMatrix::<C64>::zeros(dim, dim);
    for i in 0..ne {
        for j in 0..ne {
            m[(i, j)] = C64::new(p.f_block[(i, j)], 0.0);
        }
    }
    for i in 0..no {
        for j in 0..no {
            m[(ne + i, ne + j)] = C64::new(p.g_block[(i, j)], 0.0);
        }
    }
    let alpha = p.alpha.sign();
    for i in 0..ne {
        for j in 0..no {
            m[(i, ne + j)] = p.coupling[(i, j)] * alpha;
            m[(ne + j, i)] = p.coupling[(i, j)].conj();
        }
    }
    let tag = match p.alpha {
        Alpha::Plus => SymmetryTag::Hermitian,
        Alpha::Minus => SymmetryTag::General,
    };
    OperatorMatrix::new(m, tag).expect("assembled block structure matches its tag")
}

/// Real block data extracted from the PT expansion
/// H = Σ |S⟩F⟨S| + |L⟩G⟨L| + i|S⟩C⟨L| + i|L⟩D⟨S|.
#[derive(Debug, Clone, PartialEq)]
pub struct PtStructureReport {
    pub f_block: DMatrix<f64>,
    pub g_block: DMatrix<f64>,
    pub c_block: DMatrix<f64>,
    pub d_block: DMatrix<f64>,
    pub max_violation: f64,
}

impl PtStructureReport {
    pub fn is_pt_symmetric(&self, tol: f64) -> bool {
        self.max_violation <= tol
    }
}

/// Extracts the four real coefficient matrices of the PT expansion and the
/// largest residual that violates the reality constraint (imaginary parts on
/// the parity-diagonal blocks, real parts on the off-diagonal ones).
pub fn validate_pt_structure(h: &OperatorMatrix, p: &OperatorMatrix) -> Result<PtStructureReport> {
    if h.dim() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            got: p.dim(),
        });
    }
    let (even, odd) = parity_index_sets(p)?;
    let m = h.matrix();
    let hee = gather(m, &even, &even);
    let hoo = gather(m, &odd, &odd);
    let heo = gather(m, &even, &odd);
    let hoe = gather(m, &odd, &even);
    let max_violation = linalg::max_imag(&hee)
        .max(linalg::max_imag(&hoo))
        .max(linalg::max_abs_real(&linalg::real_part(&heo)))
        .max(linalg::max_abs_real(&linalg::real_part(&hoe)));
    Ok(PtStructureReport {
        f_block: linalg::real_part(&hee),
        g_block: linalg::real_part(&hoo),
        c_block: linalg::imag_part(&heo),
        d_block: linalg::imag_part(&hoe),
        max_violation,
    })
}

/// Tolerance for accepting a vector as a PT eigenstate.
const PT_EIGENSTATE_TOL: f64 = 1e-8;

/// Rotates a PT eigenstate ψ (𝒫𝒯ψ = e^{iφ}ψ) by β = φ/2 so that the result
/// is a fixed point of 𝒫𝒯: even-sector components become real, odd-sector
/// ones purely imaginary. The global sign is fixed by making the
/// largest-magnitude even component positive.
pub fn normalize_pt_phase(psi: &DVector<C64>, p: &OperatorMatrix) -> Result<DVector<C64>> {
    if psi.len() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            got: psi.len(),
        });
    }
    let norm_sq = psi.norm_squared();
    if norm_sq == 0.0 {
        return Err(Error::invalid("cannot phase-normalize the zero vector"));
    }
    let (even, _odd) = parity_index_sets(p)?;
    // u = PT psi = P conj(psi)
    let u = DVector::from_fn(psi.len(), |i, _| p.matrix()[(i, i)] * psi[i].conj());
    let overlap: C64 = psi.dotc(&u); // psi† u = e^{iφ} ‖psi‖² for an eigenstate
    if overlap.norm() < PT_EIGENSTATE_TOL * norm_sq {
        return Err(Error::PhaseUndefined { residual: 1.0 });
    }
    let phi = overlap.arg();
    let rot = C64::from_polar(1.0, phi / 2.0);
    let mut chi = psi.map(|z| z * rot);
    // verify PT chi = chi
    let chi_pt = DVector::from_fn(chi.len(), |i, _| p.matrix()[(i, i)] * chi[i].conj());
    let residual = (&chi_pt - &chi).norm() / chi.norm();
    if residual > PT_EIGENSTATE_TOL {
        return Err(Error::PhaseUndefined { residual });
    }
    // deterministic global sign: largest-magnitude even component positive,
    // falling back to the odd sector for states with no even support
    let mut lead = 0.0f64;
    let mut flip = false;
    for &i in &even {
        if chi[i].norm() > lead * (1.0 + 1e-12) {
            lead = chi[i].norm();
            flip = chi[i].re < 0.0;
        }
    }
    if lead == 0.0 {
        for i in 0..chi.len() {
            if chi[i].norm() > lead * (1.0 + 1e-12) {
                lead = chi[i].norm();
                flip = chi[i].im < 0.0;
            }
        }
    }
    if flip {
        chi = -chi;
    }
    Ok(chi)
}
