//! Harmonic-oscillator-basis matrix representations.
//!
//! Units fix H₀ = p² + x² with eigenvalues 2n + 1, so the position operator
//! is x = (a + a†)/√2 and ⟨m|x|n⟩ = √(n/2) δ_{m,n−1} + √((n+1)/2) δ_{m,n+1}.
//! Powers x^k are computed in a basis enlarged by k and then truncated, which
//! makes every retained entry exact: a product chain from states below `dim`
//! never reaches past index dim + k − 1.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{self, C64};

/// Truncated oscillator basis |0⟩ … |dim−1⟩.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BasisSpec {
    dim: usize,
}

impl BasisSpec {
    pub fn new(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::invalid(format!("basis dim must be >= 2, got {dim}")));
        }
        Ok(BasisSpec { dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of even-parity states, ⌈dim/2⌉.
    pub fn even_dim(&self) -> usize {
        self.dim.div_ceil(2)
    }

    /// Number of odd-parity states, ⌊dim/2⌋.
    pub fn odd_dim(&self) -> usize {
        self.dim / 2
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymmetryTag {
    Hermitian,
    ComplexSymmetric,
    General,
}

/// Dense complex square matrix with a structural tag.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    matrix: DMatrix<C64>,
    tag: SymmetryTag,
}

/// Tolerance for the structural claims carried by a tag.
const TAG_TOL: f64 = 1e-14;

impl OperatorMatrix {
    pub fn new(matrix: DMatrix<C64>, tag: SymmetryTag) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                got: matrix.ncols(),
            });
        }
        let scale = 1.0 + linalg::max_abs(&matrix);
        match tag {
            SymmetryTag::Hermitian => {
                let v = linalg::hermiticity_violation(&matrix);
                if v > TAG_TOL * scale {
                    return Err(Error::Structure {
                        context: "hermitian tag".into(),
                        violation: v,
                    });
                }
            }
            SymmetryTag::ComplexSymmetric => {
                let v = transpose_violation(&matrix);
                if v > TAG_TOL * scale {
                    return Err(Error::Structure {
                        context: "complex-symmetric tag".into(),
                        violation: v,
                    });
                }
            }
            SymmetryTag::General => {}
        }
        Ok(OperatorMatrix { matrix, tag })
    }

    pub fn general(matrix: DMatrix<C64>) -> Self {
        OperatorMatrix {
            matrix,
            tag: SymmetryTag::General,
        }
    }

    pub fn from_real(matrix: &DMatrix<f64>, tag: SymmetryTag) -> Result<Self> {
        Self::new(linalg::to_complex(matrix), tag)
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn tag(&self) -> SymmetryTag {
        self.tag
    }

    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.matrix[(row, col)]
    }
}

fn transpose_violation(m: &DMatrix<C64>) -> f64 {
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..i {
            worst = worst.max((m[(i, j)] - m[(j, i)]).norm());
        }
    }
    worst
}

/// Anharmonic model H = p² + x² + f·x³ + g·x^{2N}.
///
/// Real f gives the Hermitian oscillator, purely imaginary f the
/// PT-symmetric one; both share the same x³ matrix elements.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelSpec {
    cubic: C64,
    even_power: u32,
    even_coeff: f64,
}

impl ModelSpec {
    pub fn new(cubic: C64, even_power: u32, even_coeff: f64) -> Result<Self> {
        if !even_power.is_multiple_of(2) || even_power < 4 {
            return Err(Error::invalid(format!(
                "high power must be even and >= 4, got {even_power}"
            )));
        }
        if !even_coeff.is_finite() || !cubic.re.is_finite() || !cubic.im.is_finite() {
            return Err(Error::invalid("model coefficients must be finite"));
        }
        Ok(ModelSpec {
            cubic,
            even_power,
            even_coeff,
        })
    }

    /// H(f, g) = p² + x² + f·x³ + g·x⁴ with real f.
    pub fn hermitian(f: f64, g: f64) -> Result<Self> {
        Self::new(C64::new(f, 0.0), 4, g)
    }

    /// H(if, g) = p² + x² + i·f·x³ + g·x⁴.
    pub fn pt(f: f64, g: f64) -> Result<Self> {
        Self::new(C64::new(0.0, f), 4, g)
    }

    pub fn cubic(&self) -> C64 {
        self.cubic
    }

    pub fn even_power(&self) -> u32 {
        self.even_power
    }

    pub fn even_coeff(&self) -> f64 {
        self.even_coeff
    }

    pub fn with_cubic(self, cubic: C64) -> Self {
        ModelSpec { cubic, ..self }
    }

    pub fn with_even_coeff(self, even_coeff: f64) -> Self {
        ModelSpec { even_coeff, ..self }
    }
}

/// One-step ladder matrix of x in an n-state basis.
fn ladder_x(n: usize) -> DMatrix<f64> {
    let mut x = DMatrix::<f64>::zeros(n, n);
    for m in 1..n {
        let v = (m as f64 / 2.0).sqrt();
        x[(m - 1, m)] = v;
        x[(m, m - 1)] = v;
    }
    x
}

/// Exact dim×dim block of x^k, built in a basis enlarged by k and truncated.
pub fn build_position_power(k: u32, basis: BasisSpec) -> Result<OperatorMatrix> {
    if k == 0 {
        return Err(Error::invalid("position power k must be >= 1"));
    }
    let dim = basis.dim();
    let big = dim + k as usize;
    let x = ladder_x(big);
    let mut power = x.clone();
    for _ in 1..k {
        power = &power * &x;
    }
    let block = power.view((0, 0), (dim, dim)).into_owned();
    OperatorMatrix::from_real(&block, SymmetryTag::Hermitian)
}

/// Matrix of p² + x²: diag(2n + 1).
pub fn build_kinetic_plus_quadratic(basis: BasisSpec) -> OperatorMatrix {
    let dim = basis.dim();
    let d = DMatrix::<C64>::from_fn(dim, dim, |i, j| {
        if i == j {
            C64::new((2 * i + 1) as f64, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    OperatorMatrix {
        matrix: d,
        tag: SymmetryTag::Hermitian,
    }
}

/// Parity matrix diag((−1)^n); involutory.
pub fn build_parity(basis: BasisSpec) -> OperatorMatrix {
    let dim = basis.dim();
    let d = DMatrix::<C64>::from_fn(dim, dim, |i, j| {
        if i == j {
            C64::new(if i % 2 == 0 { 1.0 } else { -1.0 }, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    OperatorMatrix {
        matrix: d,
        tag: SymmetryTag::Hermitian,
    }
}

/// H = diag(2n+1) + f·X³ + g·X^{2N} with exact truncated-block powers.
pub fn build_model(spec: &ModelSpec, basis: BasisSpec) -> Result<OperatorMatrix> {
    let dim = basis.dim();
    let mut h = build_kinetic_plus_quadratic(basis).matrix.clone();
    if spec.cubic != C64::new(0.0, 0.0) {
        let x3 = build_position_power(3, basis)?;
        h += x3.matrix() * spec.cubic;
    }
    if spec.even_coeff != 0.0 {
        let xp = build_position_power(spec.even_power, basis)?;
        h += xp.matrix() * C64::new(spec.even_coeff, 0.0);
    }
    let tag = if spec.cubic.im == 0.0 {
        SymmetryTag::Hermitian
    } else {
        SymmetryTag::ComplexSymmetric
    };
    debug_assert_eq!(h.nrows(), dim);
    OperatorMatrix::new(h, tag)
}
