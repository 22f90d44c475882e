//! Property tests for the structural invariants.

use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

use ptfesh_core::hobasis::{build_parity, build_position_power, BasisSpec};
use ptfesh_core::linalg::{self, C64};
use ptfesh_core::partitioning::{
    assemble_full, block_parity, normalize_pt_phase, parity_partition, Alpha,
    PartitionedHamiltonian,
};

fn symmetric_matrix(n: usize, entries: &[f64]) -> DMatrix<f64> {
    let mut m = DMatrix::<f64>::zeros(n, n);
    let mut k = 0;
    for i in 0..n {
        for j in 0..=i {
            m[(i, j)] = entries[k];
            m[(j, i)] = entries[k];
            k += 1;
        }
    }
    m
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn parity_selection_rule_holds(k in 1u32..6, dim in 2usize..12) {
        let basis = BasisSpec::new(dim).unwrap();
        let op = build_position_power(k, basis).unwrap();
        for m in 0..dim {
            for n in 0..dim {
                if (m + n + k as usize) % 2 == 1 {
                    prop_assert_eq!(op.entry(m, n), C64::new(0.0, 0.0));
                }
            }
        }
    }

    #[test]
    fn partition_assemble_round_trip(
        ne in 1usize..5,
        no in 1usize..5,
        seed_f in proptest::collection::vec(-3.0f64..3.0, 15),
        seed_g in proptest::collection::vec(-3.0f64..3.0, 15),
        seed_a in proptest::collection::vec(-2.0f64..2.0, 25),
        minus in proptest::bool::ANY,
    ) {
        let f = symmetric_matrix(ne, &seed_f);
        let g = symmetric_matrix(no, &seed_g);
        let a = DMatrix::from_fn(ne, no, |i, j| seed_a[i * no + j]);
        let alpha = if minus { Alpha::Minus } else { Alpha::Plus };
        let p = PartitionedHamiltonian::custom_real(f, g, &a, alpha).unwrap();
        let full = assemble_full(&p);
        let parity = block_parity(ne, no);
        let back = parity_partition(&full, &parity).unwrap();
        prop_assert!(linalg::max_abs_real(&(back.f_block() - p.f_block())) <= 1e-12);
        prop_assert!(linalg::max_abs_real(&(back.g_block() - p.g_block())) <= 1e-12);
        prop_assert!(linalg::max_abs(&(back.coupling() - p.coupling())) <= 1e-12);
        if linalg::max_abs(p.coupling()) > 1e-9 {
            prop_assert_eq!(back.alpha(), p.alpha());
        }
        // Hermitian assembly is symmetric, PT assembly is real
        let m = full.matrix();
        match alpha {
            Alpha::Plus => prop_assert!(linalg::hermiticity_violation(m) <= 1e-12),
            Alpha::Minus => prop_assert!(linalg::max_imag(m) == 0.0),
        }
    }

    #[test]
    fn pt_phase_normalization_is_idempotent(
        dim in 2usize..9,
        entries in proptest::collection::vec(-1.0f64..1.0, 18),
        phase in 0.0f64..std::f64::consts::TAU,
    ) {
        let basis = BasisSpec::new(dim).unwrap();
        let parity = build_parity(basis);
        // build a PT eigenstate: even components real, odd purely imaginary
        let mut v = DVector::<C64>::zeros(dim);
        for i in 0..dim {
            let x = entries[i % entries.len()] + 0.1;
            v[i] = if i % 2 == 0 { C64::new(x, 0.0) } else { C64::new(0.0, x) };
        }
        let rotated = v.map(|z| z * C64::from_polar(1.0, phase));
        let once = normalize_pt_phase(&rotated, &parity).unwrap();
        let twice = normalize_pt_phase(&once, &parity).unwrap();
        let same = (&twice - &once).norm();
        let flipped = (&twice + &once).norm();
        prop_assert!(same <= 1e-10 || flipped <= 1e-10);
        // result is a PT fixed point
        for i in 0..dim {
            if i % 2 == 0 {
                prop_assert!(once[i].im.abs() <= 1e-10);
            } else {
                prop_assert!(once[i].re.abs() <= 1e-10);
            }
        }
    }
}
