//! Ground-truth providers: dense complex eigendecomposition, the exactly
//! solvable spiked harmonic oscillator, and a dense matrix exponential.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::hobasis::OperatorMatrix;
use crate::linalg::{self, C64};
use crate::pseudometric::{PairLink, QuasiParity, SpectralData};

/// Largest dimension the dense oracle will accept.
pub const ORACLE_DIM_LIMIT: usize = 512;

/// Relative threshold below which an imaginary part is snapped to zero.
const REAL_SNAP: f64 = 1e-10;

/// Right eigenvectors of an upper-triangular matrix by back-substitution,
/// mapped back through the unitary Schur factor.
fn eigenvectors_from_schur(q: &DMatrix<C64>, t: &DMatrix<C64>) -> Vec<DVector<C64>> {
    let n = t.nrows();
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let lambda = t[(k, k)];
        let mut y = DVector::<C64>::zeros(n);
        y[k] = C64::new(1.0, 0.0);
        for i in (0..k).rev() {
            let mut s = C64::new(0.0, 0.0);
            for j in (i + 1)..=k {
                s += t[(i, j)] * y[j];
            }
            let mut d = t[(i, i)] - lambda;
            // small-divisor guard in the spirit of LAPACK's ztrevc
            let smin = f64::EPSILON * lambda.norm() + f64::MIN_POSITIVE;
            if d.norm() < smin {
                d = C64::new(smin, 0.0);
            }
            y[i] = -s / d;
            if y[i].norm() > 1e250 {
                // rescale the partial column to dodge overflow
                let scale = C64::new(1.0 / y[i].norm(), 0.0);
                for z in y.iter_mut() {
                    *z *= scale;
                }
            }
        }
        let mut v = q * y;
        v /= C64::new(v.norm(), 0.0);
        out.push(v);
    }
    out
}

/// Full eigendecomposition of a dense complex matrix.
///
/// Hermitian inputs take the symmetric path; everything else goes through
/// the complex Schur decomposition. Eigenvalues with relatively tiny
/// imaginary parts are snapped to the real axis, the rest are linked into
/// conjugate pairs; a spectrum that is not closed under conjugation is
/// rejected rather than silently approximated.
pub fn direct_spectrum(h: &OperatorMatrix) -> Result<SpectralData> {
    let dim = h.dim();
    if dim > ORACLE_DIM_LIMIT {
        return Err(Error::OracleFailure(format!(
            "dimension {dim} exceeds oracle limit {ORACLE_DIM_LIMIT}"
        )));
    }
    let m = h.matrix();
    let scale = 1.0 + linalg::max_abs(m);

    let (mut values, vectors): (Vec<C64>, Vec<DVector<C64>>);
    if linalg::hermiticity_violation(m) <= 1e-12 * scale {
        let (vals, vecs) = linalg::sorted_hermitian_eigen(m);
        values = vals.iter().map(|&x| C64::new(x, 0.0)).collect();
        vectors = (0..dim).map(|k| vecs.column(k).into_owned()).collect();
    } else {
        let schur = nalgebra::linalg::Schur::try_new(m.clone(), f64::EPSILON, 100 * dim.max(10))
            .ok_or_else(|| Error::OracleFailure("Schur iteration did not converge".into()))?;
        let (q, t) = schur.unpack();
        vectors = eigenvectors_from_schur(&q, &t);
        values = (0..dim).map(|k| t[(k, k)]).collect();
    }

    // snap near-real eigenvalues onto the axis
    for v in values.iter_mut() {
        if v.im.abs() <= REAL_SNAP * (1.0 + v.re.abs()) {
            *v = C64::new(v.re, 0.0);
        }
    }

    // sort ascending by (re, im), keeping vectors aligned
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| {
        values[a]
            .re
            .total_cmp(&values[b].re)
            .then(values[a].im.total_cmp(&values[b].im))
    });
    let values: Vec<C64> = order.iter().map(|&i| values[i]).collect();
    let vectors: Vec<DVector<C64>> = order
        .iter()
        .map(|&i| linalg::canonical_phase(&vectors[i]))
        .collect();

    // nearest-conjugate pairing of the remaining complex eigenvalues
    let mut pairs = Vec::new();
    let mut minus_pool: Vec<usize> = (0..dim).filter(|&i| values[i].im < 0.0).collect();
    for i in 0..dim {
        if values[i].im > 0.0 {
            let target = values[i].conj();
            let (slot, &j) = minus_pool
                .iter()
                .enumerate()
                .min_by(|(_, &a), (_, &b)| {
                    (values[a] - target).norm().total_cmp(&(values[b] - target).norm())
                })
                .ok_or_else(|| Error::Structure {
                    context: "spectrum not closed under conjugation".into(),
                    violation: values[i].im.abs(),
                })?;
            let dev = (values[j] - target).norm();
            if dev > 1e-8 * (1.0 + target.norm()) {
                return Err(Error::Structure {
                    context: format!("no conjugate partner for eigenvalue {}", values[i]),
                    violation: dev,
                });
            }
            pairs.push(PairLink {
                plus: i,
                minus: j,
                c: C64::new(0.0, 0.0),
            });
            minus_pool.remove(slot);
        }
    }
    if !minus_pool.is_empty() {
        return Err(Error::Structure {
            context: "spectrum not closed under conjugation".into(),
            violation: values[minus_pool[0]].im.abs(),
        });
    }

    SpectralData::new(values, vectors, pairs, m.clone())
}

/// Spiked harmonic oscillator H = p² + r² + G/r².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpikedSpec {
    coupling: f64,
    n_max: usize,
}

impl SpikedSpec {
    pub fn new(coupling: f64, n_max: usize) -> Result<Self> {
        if !coupling.is_finite() {
            return Err(Error::invalid("spike coupling must be finite"));
        }
        Ok(SpikedSpec { coupling, n_max })
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpikedLevel {
    pub n: usize,
    pub quasi_parity: QuasiParity,
    pub energy: C64,
}

/// Closed-form spiked-oscillator spectrum.
///
/// For G ≥ −1/4 the levels are real, E = 4n + 2 − 2Qγ with γ = √(G + 1/4);
/// past the breaking point G < −1/4 every doublet turns into a conjugate
/// pair at once, E = 4n + 2 − 2iQδ with δ = √(−G − 1/4). Both branches meet
/// at G = −1/4, where all doublets degenerate at 4n + 2.
pub fn spiked_oscillator_levels(spec: &SpikedSpec) -> Vec<SpikedLevel> {
    let g = spec.coupling();
    let mut out = Vec::with_capacity(2 * (spec.n_max() + 1));
    for n in 0..=spec.n_max() {
        let base = (4 * n + 2) as f64;
        for quasi_parity in [QuasiParity::Plus, QuasiParity::Minus] {
            let q = match quasi_parity {
                QuasiParity::Plus => 1.0,
                QuasiParity::Minus => -1.0,
                QuasiParity::Undefined => unreachable!(),
            };
            let energy = if g >= -0.25 {
                let gamma = (g + 0.25).sqrt();
                C64::new(base - 2.0 * q * gamma, 0.0)
            } else {
                let delta = (-g - 0.25).sqrt();
                C64::new(base, -2.0 * q * delta)
            };
            out.push(SpikedLevel {
                n,
                quasi_parity,
                energy,
            });
        }
    }
    out
}

/// Dense exp(M) by scaling-and-squaring with a Taylor kernel.
pub fn dense_expm(m: &DMatrix<C64>) -> DMatrix<C64> {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "expm needs a square matrix");
    let norm = linalg::max_abs(m) * n as f64;
    let s = if norm > 0.25 {
        (norm / 0.25).log2().ceil() as i32
    } else {
        0
    };
    let scaled = m.map(|z| z / C64::new(2f64.powi(s), 0.0));
    let mut result = DMatrix::<C64>::identity(n, n);
    let mut term = DMatrix::<C64>::identity(n, n);
    // ‖scaled‖ ≤ 1/4, so 24 terms put the truncation far below roundoff
    for k in 1..=24 {
        term = &term * &scaled / C64::new(k as f64, 0.0);
        result += &term;
    }
    for _ in 0..s {
        result = &result * &result;
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hobasis::SymmetryTag;
    use crate::partitioning::{assemble_full, Alpha, PartitionedHamiltonian};

    #[test]
    fn two_by_two_closed_forms() {
        // symmetric: roots of E² − 3E + 2 − 0.36
        let sym = OperatorMatrix::new(
            DMatrix::from_row_slice(2, 2, &[
                C64::new(1.0, 0.0), C64::new(0.6, 0.0),
                C64::new(0.6, 0.0), C64::new(2.0, 0.0),
            ]),
            SymmetryTag::Hermitian,
        )
        .unwrap();
        let data = direct_spectrum(&sym).unwrap();
        assert!((data.eigenvalues()[0].re - 0.7189750324093346).abs() < 1e-12);
        assert!((data.eigenvalues()[1].re - 2.2810249675906653).abs() < 1e-12);

        // rotated PT form: complex pair 1.5 ± 0.3316624790…i
        let rot = OperatorMatrix::general(DMatrix::from_row_slice(2, 2, &[
            C64::new(1.0, 0.0), C64::new(-0.6, 0.0),
            C64::new(0.6, 0.0), C64::new(2.0, 0.0),
        ]));
        let data = direct_spectrum(&rot).unwrap();
        assert_eq!(data.pairs().len(), 1);
        let plus = data.pairs()[0].plus;
        assert!((data.eigenvalues()[plus].re - 1.5).abs() < 1e-12);
        assert!((data.eigenvalues()[plus].im - 0.33166247903554).abs() < 1e-10);

        let id = OperatorMatrix::new(DMatrix::identity(2, 2), SymmetryTag::Hermitian).unwrap();
        let data = direct_spectrum(&id).unwrap();
        assert_eq!(data.eigenvalues(), &[C64::new(1.0, 0.0), C64::new(1.0, 0.0)]);
    }

    #[test]
    fn eigenpairs_have_small_residuals() {
        let toy = PartitionedHamiltonian::toy(0.6, Alpha::Minus);
        let full = assemble_full(&toy);
        let data = direct_spectrum(&full).unwrap();
        for i in 0..data.len() {
            let v = data.vector(i);
            let r = (full.matrix() * v - v * data.eigenvalues()[i]).norm();
            assert!(r < 1e-12, "residual {r}");
        }
    }

    #[test]
    fn conjugation_closure_is_enforced() {
        // real matrices always pair up exactly
        let m = DMatrix::from_fn(6, 6, |i, j| {
            C64::new(((i * 7 + j * 3) % 5) as f64 - 2.0 + if i == j { 4.0 } else { 0.0 }, 0.0)
        });
        let data = direct_spectrum(&OperatorMatrix::general(m)).unwrap();
        let n_paired: usize = data.pairs().len() * 2;
        let n_real = data.real_level_indices().len();
        assert_eq!(n_paired + n_real, 6);
    }

    #[test]
    fn spiked_levels_reduce_to_harmonic_at_zero_coupling() {
        let levels = spiked_oscillator_levels(&SpikedSpec::new(0.0, 2).unwrap());
        let mut energies: Vec<f64> = levels.iter().map(|l| l.energy.re).collect();
        energies.sort_by(f64::total_cmp);
        assert_eq!(energies, vec![1.0, 3.0, 5.0, 7.0, 9.0, 11.0]);
    }

    #[test]
    fn spiked_levels_merge_at_quarter() {
        let levels = spiked_oscillator_levels(&SpikedSpec::new(-0.25, 2).unwrap());
        for l in &levels {
            assert_eq!(l.energy.im, 0.0);
            assert_eq!(l.energy.re, (4 * l.n + 2) as f64);
        }
    }

    #[test]
    fn spiked_levels_complex_past_quarter() {
        let levels = spiked_oscillator_levels(&SpikedSpec::new(-0.5, 1).unwrap());
        for l in &levels {
            assert_eq!(l.energy.re, (4 * l.n + 2) as f64);
            let expected_im = match l.quasi_parity {
                QuasiParity::Plus => -1.0,
                QuasiParity::Minus => 1.0,
                QuasiParity::Undefined => unreachable!(),
            };
            assert_eq!(l.energy.im, expected_im);
        }
    }

    #[test]
    fn spiked_branches_agree_approaching_quarter() {
        let eps = 1e-12;
        let below = spiked_oscillator_levels(&SpikedSpec::new(-0.25 - eps, 1).unwrap());
        let above = spiked_oscillator_levels(&SpikedSpec::new(-0.25 + eps, 1).unwrap());
        for (b, a) in below.iter().zip(&above) {
            assert!((b.energy - a.energy).norm() < 1e-5);
        }
    }

    #[test]
    fn oracle_refuses_oversized_inputs() {
        let n = ORACLE_DIM_LIMIT + 1;
        let h = OperatorMatrix::new(DMatrix::identity(n, n), SymmetryTag::Hermitian).unwrap();
        assert!(matches!(direct_spectrum(&h), Err(crate::error::Error::OracleFailure(_))));
    }

    #[test]
    fn expm_matches_scalar_and_rotation() {
        let a = DMatrix::from_element(1, 1, C64::new(0.7, -0.3));
        let e = dense_expm(&a);
        assert!((e[(0, 0)] - a[(0, 0)].exp()).norm() < 1e-14);

        // exp of i·t·sigma_y rotation block
        let t = 0.9;
        let g = DMatrix::from_row_slice(2, 2, &[
            C64::new(0.0, 0.0), C64::new(t, 0.0),
            C64::new(-t, 0.0), C64::new(0.0, 0.0),
        ]);
        let e = dense_expm(&g);
        assert!((e[(0, 0)].re - t.cos()).abs() < 1e-14);
        assert!((e[(0, 1)].re - t.sin()).abs() < 1e-14);
    }
}
