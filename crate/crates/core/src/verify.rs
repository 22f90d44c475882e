//! Seeded cross-module invariant suite, shared by the CLI `check` command
//! and the integration tests.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::evolve::trace_conservation;
use crate::feshbach::{pole_guard, FeshbachReducer};
use crate::hobasis::{build_model, build_parity, BasisSpec, ModelSpec};
use crate::linalg::{self, C64};
use crate::oracle::direct_spectrum;
use crate::partitioning::{assemble_full, block_parity, Alpha, PartitionedHamiltonian};
use crate::pseudometric::{pseudo_normalize, pseudo_norm_report, reconstruct_hamiltonian};
use crate::pseudometric::reconstruct_identity;
use crate::selfconsist::{solve_selfconsistent, spectral_interval, RootClass};

/// Result of one invariant check.
#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub pass: bool,
    pub measured: f64,
    pub threshold: f64,
    pub detail: String,
}

impl CheckOutcome {
    fn judged(name: &'static str, measured: f64, threshold: f64, detail: String) -> Self {
        CheckOutcome {
            name,
            pass: measured.is_finite() && measured <= threshold,
            measured,
            threshold,
            detail,
        }
    }

    fn failed(name: &'static str, threshold: f64, detail: String) -> Self {
        CheckOutcome {
            name,
            pass: false,
            measured: f64::INFINITY,
            threshold,
            detail,
        }
    }
}

/// Raw partitioned blocks, with an optional explicit A† override so that a
/// deliberately corrupted pair (A, A†) can be fed to the Hermiticity check.
#[derive(Debug, Clone)]
pub struct CustomBlocks {
    pub f_block: DMatrix<f64>,
    pub g_block: DMatrix<f64>,
    pub coupling: DMatrix<C64>,
    pub coupling_dagger: Option<DMatrix<C64>>,
    pub alpha: Alpha,
}

/// Random symmetric matrix with entries in [-scale, scale].
fn random_symmetric(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> DMatrix<f64> {
    let mut m = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let v = rng.gen_range(-scale..scale);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    m
}

/// Random partitioned instance with moderate coupling.
pub fn random_partitioned(rng: &mut ChaCha8Rng, dim: usize, alpha: Alpha) -> PartitionedHamiltonian {
    let ne = dim.div_ceil(2);
    let no = dim / 2;
    let f = random_symmetric(rng, ne, 2.0) + DMatrix::identity(ne, ne).map(|x: f64| x * 1.0);
    let g = random_symmetric(rng, no, 2.0) + DMatrix::identity(no, no).map(|x: f64| x * 5.0);
    let mut a = DMatrix::<f64>::zeros(ne, no);
    for v in a.iter_mut() {
        *v = rng.gen_range(-0.5..0.5);
    }
    PartitionedHamiltonian::custom_real(f, g, &a, alpha).expect("random blocks are symmetric")
}

fn random_rho(rng: &mut ChaCha8Rng, reducer: &FeshbachReducer, lo: f64, hi: f64) -> f64 {
    loop {
        let rho = rng.gen_range(lo..hi);
        if reducer.pole_distance(rho) > 10.0 * pole_guard(rho) {
            return rho;
        }
    }
}

fn bundled_models(dim: usize) -> Result<Vec<PartitionedHamiltonian>> {
    let basis = BasisSpec::new(dim)?;
    let parity = build_parity(basis);
    let mut out = Vec::new();
    for spec in [
        ModelSpec::hermitian(0.5, 0.1)?,
        ModelSpec::hermitian(0.0, 1.0)?,
        ModelSpec::pt(0.2, 0.1)?,
    ] {
        let h = build_model(&spec, basis)?;
        out.push(crate::partitioning::parity_partition(&h, &parity)?);
    }
    Ok(out)
}

fn check_h_eff_hermitian(seed: u64) -> CheckOutcome {
    let name = "h_eff_hermitian";
    let threshold = 1e-12;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for trial in 0..100 {
        let dim = 2 + (trial % 11);
        let alpha = if trial % 2 == 0 { Alpha::Plus } else { Alpha::Minus };
        let p = random_partitioned(&mut rng, dim, alpha);
        let reducer = FeshbachReducer::new(&p);
        for _ in 0..50 {
            let rho = random_rho(&mut rng, &reducer, -15.0, 15.0);
            match reducer.effective(rho) {
                Ok(eval) => {
                    worst = worst.max(linalg::hermiticity_violation(&eval.h_eff));
                }
                Err(e) => return CheckOutcome::failed(name, threshold, e.to_string()),
            }
        }
    }
    CheckOutcome::judged(
        name,
        worst,
        threshold,
        "max |H_eff − H_eff†| over 100 random instances × 50 ρ".into(),
    )
}

fn check_custom_h_eff_hermitian(custom: &CustomBlocks, seed: u64) -> CheckOutcome {
    let name = "custom_h_eff_hermitian";
    let threshold = 1e-12;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xc0ffee);
    // resolvent straight from the given blocks so that a corrupted A† is
    // used verbatim instead of being recomputed from A
    let g = linalg::to_complex(&custom.g_block);
    let f = linalg::to_complex(&custom.f_block);
    let a = custom.coupling.clone();
    let a_dag = custom
        .coupling_dagger
        .clone()
        .unwrap_or_else(|| a.adjoint());
    let (g_eigs, _) = linalg::sorted_symmetric_eigen(&custom.g_block);
    let n = custom.g_block.nrows();
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let rho = loop {
            let r = rng.gen_range(-20.0..20.0);
            if g_eigs.iter().all(|ev| (ev - r).abs() > 10.0 * pole_guard(r)) {
                break r;
            }
        };
        let mut resolvent = &g - DMatrix::<C64>::identity(n, n) * C64::new(rho, 0.0);
        if resolvent.try_inverse_mut() {
            let h_eff = &f - (&a * resolvent * &a_dag) * C64::new(custom.alpha.sign(), 0.0);
            worst = worst.max(linalg::hermiticity_violation(&h_eff));
        } else {
            return CheckOutcome::failed(name, threshold, "singular G − ρI".into());
        }
    }
    CheckOutcome::judged(
        name,
        worst,
        threshold,
        "max |H_eff − H_eff†| on the custom blocks, 50 random ρ".into(),
    )
}

fn check_sign_flip(seed: u64) -> CheckOutcome {
    let name = "sign_flip_invariance";
    let threshold = 1e-12;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x51f1);
    let mut instances = match bundled_models(16) {
        Ok(m) => m,
        Err(e) => return CheckOutcome::failed(name, threshold, e.to_string()),
    };
    for trial in 0..10 {
        let alpha = if trial % 2 == 0 { Alpha::Plus } else { Alpha::Minus };
        instances.push(random_partitioned(&mut rng, 2 + trial, alpha));
    }
    let mut worst: f64 = 0.0;
    for p in &instances {
        let flipped = p.flipped_coupling();
        let ra = FeshbachReducer::new(p);
        let rb = FeshbachReducer::new(&flipped);
        for _ in 0..8 {
            let rho = random_rho(&mut rng, &ra, -10.0, 10.0);
            let (sa, sb) = match (ra.spectrum(rho), rb.spectrum(rho)) {
                (Ok(a), Ok(b)) => (a, b),
                _ => continue,
            };
            for (x, y) in sa.energies.iter().zip(&sb.energies) {
                worst = worst.max((x - y).abs());
            }
            let v = DVector::from_fn(ra.model_dim(), |i, _| {
                C64::new(1.0 + i as f64, 0.0)
            });
            if let (Ok(wa), Ok(wb)) = (ra.eliminated(rho, &v), rb.eliminated(rho, &v)) {
                worst = worst.max((wa + wb).norm());
            }
        }
    }
    CheckOutcome::judged(
        name,
        worst,
        threshold,
        "spectra equal and eliminated components flip under A → −A".into(),
    )
}

/// Worst two-way mismatch between clean self-consistent roots and oracle
/// reals, with pole-coincident levels excluded from both directions.
pub fn root_oracle_mismatch(p: &PartitionedHamiltonian) -> Result<f64> {
    let interval = spectral_interval(p);
    let roots = solve_selfconsistent(p, interval, 1e-10)?;
    let oracle = direct_spectrum(&assemble_full(p))?;
    let reducer = FeshbachReducer::new(p);
    let reals: Vec<f64> = oracle
        .real_eigenvalues()
        .into_iter()
        .filter(|e| reducer.pole_distance(*e) > crate::selfconsist::pole_exclusion(*e))
        .collect();
    let clean: Vec<f64> = roots
        .iter()
        .filter(|r| r.classification == RootClass::RealRoot)
        .map(|r| r.energy)
        .collect();
    let mut worst: f64 = 0.0;
    for root in &clean {
        let nearest = reals
            .iter()
            .map(|e| (e - root).abs())
            .fold(f64::INFINITY, f64::min);
        worst = worst.max(nearest);
    }
    for e in &reals {
        let nearest = clean
            .iter()
            .map(|r| (r - e).abs())
            .fold(f64::INFINITY, f64::min);
        worst = worst.max(nearest);
    }
    Ok(worst)
}

fn check_schur_identity(seed: u64) -> CheckOutcome {
    let name = "schur_identity";
    let threshold = 1e-9;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5c0b);
    let mut worst: f64 = 0.0;
    for trial in 0..100 {
        let alpha = if trial % 2 == 0 { Alpha::Plus } else { Alpha::Minus };
        let p = random_partitioned(&mut rng, 6, alpha);
        match root_oracle_mismatch(&p) {
            Ok(m) => worst = worst.max(m),
            Err(e) => return CheckOutcome::failed(name, threshold, e.to_string()),
        }
    }
    CheckOutcome::judged(
        name,
        worst,
        threshold,
        "self-consistent roots ⇔ real eigenvalues of the assembled matrix (100 random 6×6)".into(),
    )
}

fn check_orthogonality() -> CheckOutcome {
    let name = "orthogonality";
    let threshold = 1e-10;
    let run = || -> Result<f64> {
        let basis = BasisSpec::new(16)?;
        let parity = build_parity(basis);
        let h = build_model(&ModelSpec::pt(0.2, 1.0)?, basis)?;
        let data = pseudo_normalize(&direct_spectrum(&h)?, &parity)?;
        let report = pseudo_norm_report(&data, &parity)?;
        let mut worst = report.max_offdiag_violation;
        let toy = PartitionedHamiltonian::toy(0.6, Alpha::Minus);
        let p2 = block_parity(1, 1);
        let data = pseudo_normalize(&direct_spectrum(&assemble_full(&toy))?, &p2)?;
        let report = pseudo_norm_report(&data, &p2)?;
        worst = worst.max(report.max_offdiag_violation);
        for (i, s) in report.self_norms.iter().enumerate() {
            let _ = i;
            worst = worst.max(s.norm()); // broken doublet: self-overlaps vanish
        }
        Ok(worst)
    };
    match run() {
        Ok(worst) => CheckOutcome::judged(
            name,
            worst,
            threshold,
            "pseudo-orthogonality of distinct levels; vanishing broken self-overlaps".into(),
        ),
        Err(e) => CheckOutcome::failed(name, threshold, e.to_string()),
    }
}

fn check_reconstructions() -> [CheckOutcome; 2] {
    let threshold = 1e-8;
    let run = || -> Result<(f64, f64)> {
        let basis = BasisSpec::new(20)?;
        let parity = build_parity(basis);
        let mut worst_id: f64 = 0.0;
        let mut worst_h: f64 = 0.0;
        for spec in [ModelSpec::hermitian(0.0, 1.0)?, ModelSpec::pt(0.2, 0.1)?] {
            let h = build_model(&spec, basis)?;
            let data = pseudo_normalize(&direct_spectrum(&h)?, &parity)?;
            worst_id = worst_id.max(reconstruct_identity(&data, &parity)?);
            worst_h = worst_h.max(reconstruct_hamiltonian(&data, &parity)?);
        }
        let toy = PartitionedHamiltonian::toy(0.6, Alpha::Minus);
        let p2 = block_parity(1, 1);
        let data = pseudo_normalize(&direct_spectrum(&assemble_full(&toy))?, &p2)?;
        worst_id = worst_id.max(reconstruct_identity(&data, &p2)?);
        worst_h = worst_h.max(reconstruct_hamiltonian(&data, &p2)?);
        Ok((worst_id, worst_h))
    };
    match run() {
        Ok((id, h)) => [
            CheckOutcome::judged(
                "identity_reconstruction",
                id,
                threshold,
                "completeness sum vs identity, unbroken and broken".into(),
            ),
            CheckOutcome::judged(
                "hamiltonian_reconstruction",
                h,
                threshold,
                "spectral sum vs H, relative".into(),
            ),
        ],
        Err(e) => [
            CheckOutcome::failed("identity_reconstruction", threshold, e.to_string()),
            CheckOutcome::failed("hamiltonian_reconstruction", threshold, e.to_string()),
        ],
    }
}

fn check_conservation() -> CheckOutcome {
    let name = "pseudo_norm_conservation";
    let threshold = 1e-8;
    let run = || -> Result<f64> {
        let times: Vec<f64> = (0..=100).map(|k| 0.1 * k as f64).collect();
        let mut worst: f64 = 0.0;
        let basis = BasisSpec::new(14)?;
        let parity = build_parity(basis);
        // g = 1 keeps the truncated PT model entirely inside the unbroken
        // phase at this dimension (no truncation-induced complex doublets)
        for spec in [ModelSpec::hermitian(0.0, 1.0)?, ModelSpec::pt(0.2, 1.0)?] {
            let h = build_model(&spec, basis)?;
            let data = pseudo_normalize(&direct_spectrum(&h)?, &parity)?;
            let mut psi0 = DVector::<C64>::zeros(14);
            psi0[0] = C64::new(1.0, 0.0);
            psi0[2] = C64::new(0.7, 0.2);
            let trace = trace_conservation(&data, &parity, &psi0, &times, false)?;
            let first = trace.pseudo_norms[0];
            for v in &trace.pseudo_norms {
                worst = worst.max((v - first).norm() / (1.0 + first.norm()));
            }
        }
        let toy = PartitionedHamiltonian::toy(0.6, Alpha::Minus);
        let p2 = block_parity(1, 1);
        let data = pseudo_normalize(&direct_spectrum(&assemble_full(&toy))?, &p2)?;
        let psi0 = DVector::from_vec(vec![C64::new(1.0, 0.0), C64::new(0.3, 0.1)]);
        let trace = trace_conservation(&data, &p2, &psi0, &times, false)?;
        let first = trace.pseudo_norms[0];
        for v in &trace.pseudo_norms {
            worst = worst.max((v - first).norm() / (1.0 + first.norm()));
        }
        Ok(worst)
    };
    match run() {
        Ok(worst) => CheckOutcome::judged(
            name,
            worst,
            threshold,
            "⟨ψ[t]|𝒫|ψ[t]⟩ constant over t ∈ [0, 10] for all model classes".into(),
        ),
        Err(e) => CheckOutcome::failed(name, threshold, e.to_string()),
    }
}

fn check_oracle_equivalence() -> CheckOutcome {
    let name = "oracle_equivalence";
    let threshold = 1e-8;
    let run = || -> Result<f64> {
        let mut worst: f64 = 0.0;
        for p in bundled_models(20)? {
            worst = worst.max(root_oracle_mismatch(&p)?);
        }
        Ok(worst)
    };
    match run() {
        Ok(worst) => CheckOutcome::judged(
            name,
            worst,
            threshold,
            "Feshbach roots vs dense oracle on the bundled models".into(),
        ),
        Err(e) => CheckOutcome::failed(name, threshold, e.to_string()),
    }
}

/// Runs the whole invariant suite; `custom` adds a Hermiticity check on
/// user-provided raw blocks (which may carry a corrupted A†).
pub fn run_invariant_checks(seed: u64, custom: Option<&CustomBlocks>) -> Vec<CheckOutcome> {
    let mut out = vec![
        check_h_eff_hermitian(seed),
        check_sign_flip(seed),
        check_schur_identity(seed),
        check_orthogonality(),
    ];
    out.extend(check_reconstructions());
    out.push(check_conservation());
    out.push(check_oracle_equivalence());
    if let Some(blocks) = custom {
        out.push(check_custom_h_eff_hermitian(blocks, seed));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_suite_passes_on_default_seed() {
        let outcomes = run_invariant_checks(7, None);
        for o in &outcomes {
            assert!(o.pass, "{}: measured {} > {}", o.name, o.measured, o.threshold);
        }
    }

    #[test]
    fn corrupted_coupling_fails_hermiticity() {
        let f = DMatrix::from_row_slice(2, 2, &[1.0, 0.2, 0.2, 2.0]);
        let g = DMatrix::from_row_slice(2, 2, &[5.0, 0.1, 0.1, 6.0]);
        let a = DMatrix::from_fn(2, 2, |i, j| C64::new(0.3 + i as f64 * 0.1 - j as f64 * 0.2, 0.0));
        let mut bad = a.adjoint();
        bad[(0, 1)] += C64::new(0.5, 0.0);
        let blocks = CustomBlocks {
            f_block: f,
            g_block: g,
            coupling: a,
            coupling_dagger: Some(bad),
            alpha: Alpha::Plus,
        };
        let outcomes = run_invariant_checks(7, Some(&blocks));
        let custom = outcomes
            .iter()
            .find(|o| o.name == "custom_h_eff_hermitian")
            .unwrap();
        assert!(!custom.pass, "corrupted A† must fail the Hermiticity check");
    }

    #[test]
    fn determinism_of_random_instances() {
        let mut r1 = ChaCha8Rng::seed_from_u64(42);
        let mut r2 = ChaCha8Rng::seed_from_u64(42);
        let a = random_partitioned(&mut r1, 8, Alpha::Minus);
        let b = random_partitioned(&mut r2, 8, Alpha::Minus);
        assert_eq!(a.f_block(), b.f_block());
        assert_eq!(a.coupling(), b.coupling());
    }
}
