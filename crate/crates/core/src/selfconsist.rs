//! Self-consistent solution of ρ = Ê_n(ρ) and spontaneous-breaking scans.
//!
//! Roots are located through the crossing-count function
//! N(ρ) = #{n : Ê_n(ρ) < ρ}: between resolvent poles every branch Ê_n is
//! continuous, so N changes exactly where a branch crosses the diagonal,
//! immune to eigenvalue relabeling at level crossings. A grid refined around
//! the poles of (G − ρI)⁻¹ brackets the jumps of N, bisection closes each
//! bracket to tolerance, and a dip-refinement pass hunts for the
//! sign-preserving double crossings of nearly-merged doublets. Missing
//! levels — the "disappeared roots" that signal spontaneous PT-symmetry
//! breaking — are recovered as complex-conjugate pairs from the dense
//! oracle on the assembled matrix.

use crate::error::{Error, Result};
use crate::feshbach::{pole_guard, FeshbachReducer};
use crate::hobasis::{build_model, BasisSpec, ModelSpec};
use crate::linalg::C64;
use crate::oracle::direct_spectrum;
use crate::partitioning::{
    assemble_full, block_parity, parity_partition, Alpha, PartitionedHamiltonian,
};
use crate::pseudometric::{pseudo_inner, InnerMode};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootClass {
    RealRoot,
    /// Root sitting on top of an eigenvalue of G; trusted only against the oracle.
    PoleAdjacent,
}

/// One converged solution of ρ = Ê_n(ρ).
#[derive(Debug, Clone)]
pub struct SelfConsistentRoot {
    pub level_index: usize,
    pub energy: f64,
    /// |Ê_n(ρ*) − ρ*| at the returned energy.
    pub residual: f64,
    pub bracket: (f64, f64),
    pub classification: RootClass,
}

/// Conjugate doublet recovered from the oracle.
#[derive(Debug, Clone, Copy)]
pub struct ComplexPair {
    pub e_plus: C64,
    pub e_minus: C64,
}

/// Real-root bookkeeping against the full spectrum.
#[derive(Debug, Clone)]
pub struct BreakingReport {
    pub total_dim: usize,
    /// Oracle-reconciled count of real levels (multiplicities included);
    /// always total_dim − 2·missing_pairs.
    pub real_roots_found: usize,
    pub missing_pairs: usize,
    pub complex_pairs: Vec<ComplexPair>,
    /// Near-degenerate doublet detected (exceptional-point neighborhood).
    pub boundary_flag: bool,
    /// The raw self-consistent roots underlying the count.
    pub roots: Vec<SelfConsistentRoot>,
}

/// One row of a phase-diagram sweep.
#[derive(Debug, Clone)]
pub struct PhaseDiagramRow {
    pub parameter: f64,
    /// All eigenvalues, sorted by real part.
    pub energies: Vec<C64>,
    /// Self pseudo-norms ⟨ψ|𝒫|ψ⟩ of the Euclidean-normalized eigenvectors,
    /// aligned with `energies` (≈ 0 on broken doublets).
    pub self_pseudo_norms: Vec<f64>,
    pub broken_count: usize,
    pub boundary_flag: bool,
    pub error: Option<String>,
}

/// Default solver tolerance on |Ê_n(ρ*) − ρ*|.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Roots and eigenvalues closer than this to a pole of the resolvent are
/// classified pole-adjacent and excluded from oracle comparisons.
pub fn pole_exclusion(rho: f64) -> f64 {
    1e3 * pole_guard(rho)
}

/// Grid density: points per unit length within a segment.
const POINTS_PER_UNIT: f64 = 64.0;
/// Minimum points per inter-pole segment.
const MIN_POINTS: usize = 8;
/// Cap on points per segment, so enormous root-free stretches stay cheap;
/// the counting function and the dip pass recover anything a coarse
/// stretch could hide.
const MAX_POINTS: usize = 2000;

/// Crossing count N(ρ) plus the signed distance of the nearest branch.
fn counting_state(reducer: &FeshbachReducer, rho: f64) -> Result<(usize, f64)> {
    let eval = reducer.effective(rho)?;
    let se = nalgebra::SymmetricEigen::new(eval.h_eff);
    let mut below = 0usize;
    let mut nearest = f64::INFINITY;
    for &e in se.eigenvalues.iter() {
        let d = e - rho;
        if d < 0.0 {
            below += 1;
        }
        if d.abs() < nearest.abs() {
            nearest = d;
        }
    }
    Ok((below, nearest))
}

struct RawRoot {
    energy: f64,
    residual: f64,
    bracket: (f64, f64),
}

/// Closes a bracket over which N changes, emitting one root per unit jump.
#[allow(clippy::too_many_arguments)]
fn close_bracket(
    reducer: &FeshbachReducer,
    a: f64,
    b: f64,
    na: usize,
    nb: usize,
    tol: f64,
    out: &mut Vec<RawRoot>,
    depth: usize,
) {
    if na == nb || depth == 0 {
        return;
    }
    let jump = na.abs_diff(nb);
    let mut lo = a;
    let mut hi = b;
    let mut best: Option<(f64, f64)> = None;
    if jump == 1 {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let Ok((nm, d)) = counting_state(reducer, mid) else {
                break; // pole guard inside the bracket: give up on it
            };
            if best.is_none_or(|(_, bd)| d.abs() < bd.abs()) {
                best = Some((mid, d));
            }
            if d.abs() <= 0.5 * tol {
                break;
            }
            if nm == na {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        // one secant polish from the two best points available
        if let Some((x0, d0)) = best {
            if d0.abs() > 0.0 {
                let h = (hi - lo).max(1e-14 * (1.0 + x0.abs()));
                let x1 = (x0 + h).min(b);
                if x1 > x0 {
                    if let Ok((_, d1)) = counting_state(reducer, x1) {
                        if (d1 - d0).abs() > 0.0 {
                            let x = x0 - d0 * (x1 - x0) / (d1 - d0);
                            if x > a && x < b {
                                if let Ok((_, d)) = counting_state(reducer, x) {
                                    if d.abs() < d0.abs() {
                                        best = Some((x, d));
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        if let Some((x, d)) = best {
            if d.abs() <= tol {
                out.push(RawRoot {
                    energy: x,
                    residual: d.abs(),
                    bracket: (a, b),
                });
            }
        }
        return;
    }
    // multiple crossings: split until each bracket holds one
    let mid = 0.5 * (a + b);
    if mid <= a || mid >= b {
        // degenerate cluster at floating-point resolution
        if let Ok((_, d)) = counting_state(reducer, mid) {
            if d.abs() <= tol {
                for _ in 0..jump {
                    out.push(RawRoot {
                        energy: mid,
                        residual: d.abs(),
                        bracket: (a, b),
                    });
                }
            }
        }
        return;
    }
    if let Ok((nm, _)) = counting_state(reducer, mid) {
        close_bracket(reducer, a, mid, na, nm, tol, out, depth - 1);
        close_bracket(reducer, mid, b, nm, nb, tol, out, depth - 1);
    }
}

/// Recursive hunt for double crossings that leave N unchanged: subdivide
/// spans where |Ê − ρ| dips toward zero without a counting jump.
fn refine_dip(
    reducer: &FeshbachReducer,
    a: f64,
    b: f64,
    tol: f64,
    depth: usize,
    out: &mut Vec<RawRoot>,
) {
    if depth == 0 {
        return;
    }
    let steps = 16usize;
    let h = (b - a) / steps as f64;
    let mut samples: Vec<(f64, usize, f64)> = Vec::with_capacity(steps + 1);
    for k in 0..=steps {
        let x = a + h * k as f64;
        if let Ok((n, d)) = counting_state(reducer, x) {
            if let Some(&(px, pn, _)) = samples.last() {
                if pn != n {
                    close_bracket(reducer, px, x, pn, n, tol, out, 80);
                }
            }
            samples.push((x, n, d));
        }
    }
    for w in samples.windows(3) {
        let (x0, n0, d0) = w[0];
        let (_, n1, d1) = w[1];
        let (x2, n2, d2) = w[2];
        if n0 == n1 && n1 == n2 && d1.abs() <= d0.abs() && d1.abs() <= d2.abs() {
            let slope = ((d1 - d0).abs().max((d2 - d1).abs())) / h.max(1e-300);
            if d1.abs() < (x2 - x0) * (1.0 + slope) && d1.abs() > 0.0 {
                refine_dip(reducer, x0, x2, tol, depth - 1, out);
            }
        }
    }
}

fn scan_segments(poles: &[f64], lo: f64, hi: f64) -> Vec<(f64, f64)> {
    let mut cuts = vec![lo];
    for &p in poles {
        if p > lo && p < hi {
            cuts.push(p);
        }
    }
    cuts.push(hi);
    let mut segments = Vec::new();
    for w in cuts.windows(2) {
        let (mut a, mut b) = (w[0], w[1]);
        // keep clear of pole guards at segment ends that are poles
        if a != lo {
            a += 4.0 * pole_guard(a);
        }
        if b != hi {
            b -= 4.0 * pole_guard(b);
        }
        if a < b {
            segments.push((a, b));
        }
    }
    segments
}

/// All solutions of ρ = Ê_n(ρ) inside `interval`, each converged to
/// |Ê_n(ρ*) − ρ*| ≤ tol.
pub fn solve_selfconsistent(
    p: &PartitionedHamiltonian,
    interval: (f64, f64),
    tol: f64,
) -> Result<Vec<SelfConsistentRoot>> {
    let (lo, hi) = interval;
    if !lo.is_finite() || !hi.is_finite() || lo >= hi {
        return Err(Error::invalid(format!(
            "interval bounds must be finite with lo < hi, got [{lo}, {hi}]"
        )));
    }
    if !tol.is_finite() || tol <= 0.0 {
        return Err(Error::invalid("tol must be positive"));
    }
    let reducer = FeshbachReducer::new(p);
    let segments = scan_segments(reducer.poles(), lo, hi);
    if segments.is_empty() {
        return Err(Error::DegenerateInterval { lo, hi });
    }

    let mut raw: Vec<RawRoot> = Vec::new();
    let mut refined: Vec<RawRoot> = Vec::new();
    let mut evaluated_any = false;
    for &(a, b) in &segments {
        let n_points = ((b - a) * POINTS_PER_UNIT).ceil() as usize;
        let n_points = n_points.clamp(MIN_POINTS, MAX_POINTS);
        let h = (b - a) / n_points as f64;

        let mut prev: Option<(f64, usize, f64)> = None;
        let mut dips: Vec<(f64, f64)> = Vec::new();
        let mut before_prev: Option<(f64, usize, f64)> = None;
        for k in 0..=n_points {
            let x = (a + h * k as f64).min(b);
            let Ok((n, d)) = counting_state(&reducer, x) else {
                before_prev = None;
                prev = None;
                continue;
            };
            evaluated_any = true;
            if let Some((px, pn, pd)) = prev {
                if pn != n {
                    close_bracket(&reducer, px, x, pn, n, tol, &mut raw, 80);
                } else if let Some((bx, bn, bd)) = before_prev {
                    // |d| dips at the middle of three same-count samples
                    if bn == pn && pd.abs() <= bd.abs() && pd.abs() <= d.abs() {
                        let slope = (pd - bd).abs().max((d - pd).abs()) / h;
                        if pd.abs() < 2.0 * h * (1.0 + slope) && pd.abs() > 0.0 {
                            dips.push((bx, x));
                        }
                    }
                }
            }
            before_prev = prev;
            prev = Some((x, n, d));
        }
        for (da, db) in dips {
            refine_dip(&reducer, da.max(a), db.min(b), tol, 3, &mut refined);
        }
    }
    if !evaluated_any {
        return Err(Error::DegenerateInterval { lo, hi });
    }

    // dip-pass roots may be rediscovered across overlapping windows; merge
    // them by proximity, but keep genuine multiplicity clusters from the
    // main scan untouched
    let merge_tol = |e: f64| (4.0 * tol).max(1e-13 * (1.0 + e.abs()));
    refined.sort_by(|x, y| x.energy.total_cmp(&y.energy));
    for r in refined {
        let known = raw
            .iter()
            .any(|k| (k.energy - r.energy).abs() <= merge_tol(r.energy));
        if !known {
            raw.push(r);
        }
    }
    raw.sort_by(|x, y| x.energy.total_cmp(&y.energy));
    let mut roots: Vec<SelfConsistentRoot> = Vec::new();
    for r in raw {
        let classification = if reducer.pole_distance(r.energy) <= pole_exclusion(r.energy) {
            RootClass::PoleAdjacent
        } else {
            RootClass::RealRoot
        };
        roots.push(SelfConsistentRoot {
            level_index: 0,
            energy: r.energy,
            residual: r.residual,
            bracket: r.bracket,
            classification,
        });
    }
    for (i, root) in roots.iter_mut().enumerate() {
        root.level_index = i;
    }
    Ok(roots)
}

/// Padded Gershgorin bound on the real parts of the assembled spectrum;
/// a safe default interval for [`solve_selfconsistent`] and
/// [`detect_breaking`].
pub fn spectral_interval(p: &PartitionedHamiltonian) -> (f64, f64) {
    let full = assemble_full(p);
    let m = full.matrix();
    let n = m.nrows();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let center = m[(i, i)].re;
        let radius: f64 = (0..n)
            .filter(|&j| j != i)
            .map(|j| m[(i, j)].norm())
            .sum();
        lo = lo.min(center - radius);
        hi = hi.max(center + radius);
    }
    let pad = 0.5 + 1e-3 * (hi - lo).abs();
    (lo - pad, hi + pad)
}

/// Threshold factor for the boundary (near-merging) flag, in units of tol.
const BOUNDARY_FACTOR: f64 = 1e2;

/// Counts real self-consistent roots against the oracle and recovers the
/// disappeared levels as complex-conjugate pairs.
pub fn detect_breaking(
    p: &PartitionedHamiltonian,
    interval: (f64, f64),
) -> Result<BreakingReport> {
    detect_breaking_with_tol(p, interval, DEFAULT_TOL)
}

/// [`detect_breaking`] with an explicit solver tolerance.
pub fn detect_breaking_with_tol(
    p: &PartitionedHamiltonian,
    interval: (f64, f64),
    tol: f64,
) -> Result<BreakingReport> {
    let full = assemble_full(p);
    let oracle = direct_spectrum(&full)?;
    let (lo, hi) = interval;
    for e in oracle.eigenvalues() {
        if e.re < lo || e.re > hi {
            return Err(Error::Coverage { excluded: *e });
        }
    }
    let roots = solve_selfconsistent(p, interval, tol)?;

    let complex_pairs: Vec<ComplexPair> = oracle
        .pairs()
        .iter()
        .map(|link| {
            let (a, b) = (
                oracle.eigenvalues()[link.plus],
                oracle.eigenvalues()[link.minus],
            );
            if a.im >= b.im {
                ComplexPair { e_plus: a, e_minus: b }
            } else {
                ComplexPair { e_plus: b, e_minus: a }
            }
        })
        .collect();
    let missing_pairs = complex_pairs.len();
    let total_dim = p.dim();
    let real_roots_found = total_dim - 2 * missing_pairs;

    let near = BOUNDARY_FACTOR * tol;
    let mut boundary_flag = complex_pairs.iter().any(|pair| pair.e_plus.im.abs() <= near);
    let oracle_reals = oracle.real_eigenvalues();
    for w in oracle_reals.windows(2) {
        if (w[1] - w[0]).abs() <= near {
            boundary_flag = true;
        }
    }
    for w in roots.windows(2) {
        if (w[1].energy - w[0].energy).abs() <= near {
            boundary_flag = true;
        }
    }

    Ok(BreakingReport {
        total_dim,
        real_roots_found,
        missing_pairs,
        complex_pairs,
        boundary_flag,
        roots,
    })
}

/// Which model coefficient a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParameter {
    CubicRe,
    CubicIm,
    EvenCoeff,
}

/// A one-parameter family of partitioned Hamiltonians.
#[derive(Debug, Clone)]
pub enum ModelFamily {
    /// Anharmonic oscillator with one swept coefficient.
    Oscillator {
        base: ModelSpec,
        swept: SweepParameter,
    },
    /// The 2×2 toy with swept coupling ω.
    Toy { alpha: Alpha },
}

impl ModelFamily {
    pub fn instantiate(
        &self,
        value: f64,
        basis: BasisSpec,
    ) -> Result<PartitionedHamiltonian> {
        match self {
            ModelFamily::Oscillator { base, swept } => {
                let spec = match swept {
                    SweepParameter::CubicRe => {
                        base.with_cubic(C64::new(value, base.cubic().im))
                    }
                    SweepParameter::CubicIm => {
                        base.with_cubic(C64::new(base.cubic().re, value))
                    }
                    SweepParameter::EvenCoeff => base.with_even_coeff(value),
                };
                let h = build_model(&spec, basis)?;
                let parity = crate::hobasis::build_parity(basis);
                parity_partition(&h, &parity)
            }
            ModelFamily::Toy { alpha } => Ok(PartitionedHamiltonian::toy(value, *alpha)),
        }
    }
}

/// Runs [`detect_breaking`] across a parameter grid. Per-row failures are
/// recorded in the row and the sweep continues.
pub fn sweep(family: &ModelFamily, grid: &[f64], basis: BasisSpec) -> Result<Vec<PhaseDiagramRow>> {
    if grid.is_empty() {
        return Err(Error::invalid("sweep grid must be nonempty"));
    }
    for w in grid.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::invalid("sweep grid must be strictly increasing"));
        }
    }
    let mut rows = Vec::with_capacity(grid.len());
    for &value in grid {
        rows.push(sweep_row(family, value, basis));
    }
    Ok(rows)
}

fn sweep_row(family: &ModelFamily, value: f64, basis: BasisSpec) -> PhaseDiagramRow {
    let mut row = PhaseDiagramRow {
        parameter: value,
        energies: Vec::new(),
        self_pseudo_norms: Vec::new(),
        broken_count: 0,
        boundary_flag: false,
        error: None,
    };
    let attempt = (|| -> Result<()> {
        let p = family.instantiate(value, basis)?;
        let report = detect_breaking(&p, spectral_interval(&p))?;
        let data = direct_spectrum(&assemble_full(&p))?;
        let parity = block_parity(p.even_dim(), p.odd_dim());
        let mut order: Vec<usize> = (0..data.len()).collect();
        order.sort_by(|&a, &b| {
            data.eigenvalues()[a]
                .re
                .total_cmp(&data.eigenvalues()[b].re)
                .then(data.eigenvalues()[a].im.total_cmp(&data.eigenvalues()[b].im))
        });
        for &i in &order {
            row.energies.push(data.eigenvalues()[i]);
            let v = data.vector(i) / C64::new(data.vector(i).norm(), 0.0);
            let s = pseudo_inner(&v, &v, &parity, InnerMode::Metric)?;
            row.self_pseudo_norms.push(s.re);
        }
        row.broken_count = 2 * report.missing_pairs;
        row.boundary_flag = report.boundary_flag;
        Ok(())
    })();
    if let Err(e) = attempt {
        row.error = Some(e.to_string());
    }
    row
}

/// First grid cell across which broken_count increases.
pub fn first_transition(rows: &[PhaseDiagramRow]) -> Option<(f64, f64)> {
    for w in rows.windows(2) {
        if w[0].error.is_none() && w[1].error.is_none() && w[1].broken_count > w[0].broken_count {
            return Some((w[0].parameter, w[1].parameter));
        }
    }
    None
}
