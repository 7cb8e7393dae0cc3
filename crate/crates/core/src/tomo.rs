//! Density-matrix reconstruction from count records.
//!
//! Both estimators work on the qubits in the records' common scope, relabeled
//! `0..m` in ascending order. Records whose projectors coincide (the same
//! product of single-qubit Bloch directions) are merged by adding counts.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::linalg::{c, max_eigenvalue, CMatrix, DensityMatrix};
use crate::measure::CountRecord;
use crate::witness::LocalSpectrum;

pub const MAX_ITERATIONS: usize = 10_000;
pub const GRAD_TOL: f64 = 1e-8;
pub const REL_LL_TOL: f64 = 1e-12;
const ARMIJO: f64 = 1e-4;
const INIT_MIX: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructionResult {
    pub rho: DensityMatrix,
    /// `sum_k n_k log p_k` at the estimate.
    pub log_likelihood: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Log-likelihood after every accepted step.
    pub ll_history: Vec<f64>,
}

/// One distinct rank-1 product projector with its pooled count.
struct Effect {
    ket: DVector<Complex64>,
    /// Per-qubit Bloch vectors, used by linear inversion.
    bloch: Vec<[f64; 3]>,
    count: f64,
}

fn collect_effects(records: &[CountRecord], dim: usize) -> Result<(usize, Vec<Effect>)> {
    if dim < 2 || !dim.is_power_of_two() {
        return invalid(format!("dimension {dim} is not 2^m"));
    }
    let m = dim.trailing_zeros() as usize;
    if records.is_empty() {
        return invalid("no records");
    }
    let mut pooled: BTreeMap<Vec<(i8, i8, i8)>, Effect> = BTreeMap::new();
    for rec in records {
        let s = &rec.setting;
        if s.scope().len() != m {
            return invalid(format!("setting {} has scope {} but dimension {dim} needs {m}", s.id(), s.scope().len()));
        }
        if rec.counts.len() != s.num_outcomes() {
            return invalid(format!("setting {} has {} counts", s.id(), rec.counts.len()));
        }
        for (k, &n) in rec.counts.iter().enumerate() {
            let bits = s.outcome_bits(k);
            let bloch: Vec<[f64; 3]> = s.analyzers().iter().zip(&bits).map(|(a, &b)| a.bloch(b)).collect();
            let key = bloch.iter().map(|r| (r[0] as i8, r[1] as i8, r[2] as i8)).collect();
            pooled
                .entry(key)
                .or_insert_with(|| Effect { ket: s.outcome_vector(k), bloch, count: 0.0 })
                .count += n as f64;
        }
    }
    let effects: Vec<Effect> = pooled.into_values().collect();
    if effects.iter().map(|e| e.count).sum::<f64>() <= 0.0 {
        return invalid("records contain no counts");
    }
    Ok((m, effects))
}

fn pauli(index: usize) -> [[Complex64; 2]; 2] {
    let (o, z) = (Complex64::ONE, Complex64::ZERO);
    match index {
        0 => [[o, z], [z, o]],
        1 => [[z, o], [o, z]],
        2 => [[z, c(0.0, -1.0)], [c(0.0, 1.0), z]],
        _ => [[o, z], [z, -o]],
    }
}

fn pauli_string_matrix(code: usize, m: usize) -> CMatrix {
    let dim = 1 << m;
    CMatrix::from_fn(dim, dim, |r, col| {
        (0..m).fold(Complex64::ONE, |acc, j| {
            let p = pauli((code >> (2 * (m - 1 - j))) & 3);
            let rb = (r >> (m - 1 - j)) & 1;
            let cb = (col >> (m - 1 - j)) & 1;
            acc * p[rb][cb]
        })
    })
}

/// Least-squares Born-rule inversion in the Pauli basis with the identity
/// coefficient fixed by the trace. Hermitian with unit trace; not
/// necessarily positive.
pub fn linear_inversion(records: &[CountRecord], dim: usize) -> Result<CMatrix> {
    let (m, effects) = collect_effects(records, dim)?;
    linear_inversion_effects(m, &effects, records)
}

fn setting_frequencies(records: &[CountRecord]) -> BTreeMap<Vec<(i8, i8, i8)>, (f64, f64)> {
    // Per distinct projector: (sum of counts, sum of the owning settings' totals).
    let mut out: BTreeMap<Vec<(i8, i8, i8)>, (f64, f64)> = BTreeMap::new();
    for rec in records {
        let total = rec.total() as f64;
        let s = &rec.setting;
        for (k, &n) in rec.counts.iter().enumerate() {
            let key = s
                .analyzers()
                .iter()
                .zip(s.outcome_bits(k))
                .map(|(a, b)| {
                    let r = a.bloch(b);
                    (r[0] as i8, r[1] as i8, r[2] as i8)
                })
                .collect();
            let e = out.entry(key).or_insert((0.0, 0.0));
            e.0 += n as f64;
            e.1 += total;
        }
    }
    out
}

fn linear_inversion_effects(m: usize, effects: &[Effect], records: &[CountRecord]) -> Result<CMatrix> {
    let dim = 1usize << m;
    let n_params = dim * dim - 1;
    let freqs = setting_frequencies(records);
    let rows: Vec<(&Effect, f64)> = effects
        .iter()
        .filter_map(|e| {
            let key: Vec<(i8, i8, i8)> = e.bloch.iter().map(|r| (r[0] as i8, r[1] as i8, r[2] as i8)).collect();
            let (n, total) = freqs[&key];
            (total > 0.0).then_some((e, n / total))
        })
        .collect();
    // Tr(rho P) for rho = (I + sum_s c_s sigma_s) / dim and P = prod (I + r.sigma)/2.
    let weight = |e: &Effect, code: usize| -> f64 {
        (0..m).fold(1.0, |acc, j| {
            let p = (code >> (2 * (m - 1 - j))) & 3;
            let r = e.bloch[j];
            acc * match p {
                0 => 1.0,
                1 => r[0],
                2 => r[1],
                _ => r[2],
            }
        }) / dim as f64
    };
    let a = DMatrix::from_fn(rows.len(), n_params, |i, jcol| weight(rows[i].0, jcol + 1));
    let b = DVector::from_fn(rows.len(), |i, _| rows[i].1 - weight(rows[i].0, 0));
    let svd = a.svd(true, true);
    let smax = svd.singular_values.max();
    let rank = svd.singular_values.iter().filter(|s| **s > 1e-10 * smax.max(1e-300)).count();
    if rank < n_params {
        return Err(Error::NotInformationallyComplete { rank: rank + 1, required: dim * dim });
    }
    let coeffs = svd.solve(&b, 1e-12 * smax).map_err(|e| Error::Numeric(e.to_string()))?;
    let mut rho = CMatrix::identity(dim, dim);
    for code in 1..dim * dim {
        rho += pauli_string_matrix(code, m).scale(coeffs[code - 1]);
    }
    rho.unscale_mut(dim as f64);
    // Symmetrize away round-off.
    Ok((&rho + rho.adjoint()).scale(0.5))
}

/// Clips negative eigenvalues and renormalizes.
pub fn project_psd(m: &CMatrix) -> Result<CMatrix> {
    let eig = m.clone().symmetric_eigen();
    let clipped = eig.eigenvalues.map(|l| l.max(0.0));
    let total: f64 = clipped.iter().sum();
    if total <= 0.0 {
        return Err(Error::Numeric("PSD projection removed the whole spectrum".into()));
    }
    let d = CMatrix::from_diagonal(&clipped.map(|l| c(l / total, 0.0)));
    let v = &eig.eigenvectors;
    let out = v * d * v.adjoint();
    Ok((&out + out.adjoint()).scale(0.5))
}

/// Lower-triangular `T` with `T^dag T = rho` (Cholesky of the index-reversed
/// matrix).
fn lower_factor(rho: &CMatrix) -> Result<CMatrix> {
    let n = rho.nrows();
    let rev = CMatrix::from_fn(n, n, |i, j| rho[(n - 1 - i, n - 1 - j)]);
    let l = rev
        .cholesky()
        .ok_or_else(|| Error::Numeric("initial estimate is not positive definite".into()))?
        .unpack();
    // rev = L L^dag, so rho = U U^dag with U = J L J upper triangular; T = U^dag.
    let u = CMatrix::from_fn(n, n, |i, j| l[(n - 1 - i, n - 1 - j)]);
    Ok(u.adjoint())
}

struct Objective<'a> {
    effects: &'a [Effect],
    freqs: Vec<f64>,
}

impl Objective<'_> {
    fn probabilities(&self, rho: &CMatrix) -> Vec<f64> {
        self.effects.iter().map(|e| e.ket.dotc(&(rho * &e.ket)).re).collect()
    }

    fn value(&self, rho: &CMatrix) -> f64 {
        let p = self.probabilities(rho);
        self.freqs
            .iter()
            .zip(&p)
            .filter(|(f, _)| **f > 0.0)
            .map(|(f, p)| if *p > 0.0 { f * p.ln() } else { f64::NEG_INFINITY })
            .sum()
    }

    /// `R = sum_k f_k P_k / p_k`.
    fn r_operator(&self, rho: &CMatrix) -> CMatrix {
        let dim = rho.nrows();
        let p = self.probabilities(rho);
        let mut r = CMatrix::zeros(dim, dim);
        for ((e, f), pk) in self.effects.iter().zip(&self.freqs).zip(&p) {
            if *f > 0.0 && *pk > 0.0 {
                r += (&e.ket * e.ket.adjoint()).scale(f / pk);
            }
        }
        r
    }
}

fn rho_from(t: &CMatrix) -> CMatrix {
    let m = t.adjoint() * t;
    let tr = m.trace().re;
    m.unscale(tr)
}

fn lower_triangle(mut m: CMatrix) -> CMatrix {
    let n = m.nrows();
    for i in 0..n {
        for j in i + 1..n {
            m[(i, j)] = Complex64::ZERO;
        }
    }
    m
}

/// Maximum-likelihood estimate over `rho = T^dag T / Tr(T^dag T)`, by
/// gradient ascent with backtracking on the triangular factor.
pub fn mle_reconstruct(records: &[CountRecord], dim: usize) -> Result<ReconstructionResult> {
    let (_, effects) = collect_effects(records, dim)?;
    let total: f64 = effects.iter().map(|e| e.count).sum();
    let init = linear_inversion_effects(dim.trailing_zeros() as usize, &effects, records)?;
    let init = project_psd(&init)?;
    let init = init.scale(1.0 - INIT_MIX) + CMatrix::identity(dim, dim).scale(INIT_MIX / dim as f64);

    let obj = Objective { effects: &effects, freqs: effects.iter().map(|e| e.count / total).collect() };
    let mut t = lower_factor(&init)?;
    t.unscale_mut(t.norm());
    let mut rho = rho_from(&t);
    let mut ll = obj.value(&rho);
    if !ll.is_finite() {
        return Err(Error::Numeric("initial estimate assigns zero probability to observed counts".into()));
    }
    let mut history = vec![ll * total];
    let mut step = 1.0;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let r = obj.r_operator(&rho);
        let tr_r = (&r * &rho).trace().re;
        let g = (r - CMatrix::identity(dim, dim).scale(tr_r)).scale(1.0 / t.norm_squared());
        let grad = lower_triangle(&t * g).scale(2.0);
        let gnorm2 = grad.norm_squared();
        if gnorm2.sqrt() < GRAD_TOL {
            converged = true;
            break;
        }
        let mut accepted = None;
        for _ in 0..60 {
            let mut cand = &t + grad.scale(step);
            cand.unscale_mut(cand.norm());
            let cand_rho = rho_from(&cand);
            let cand_ll = obj.value(&cand_rho);
            if cand_ll.is_finite() && cand_ll >= ll + ARMIJO * step * gnorm2 {
                accepted = Some((cand, cand_rho, cand_ll));
                break;
            }
            step *= 0.5;
        }
        let Some((cand, cand_rho, cand_ll)) = accepted else {
            // No ascent direction at working precision.
            converged = true;
            break;
        };
        let rel = (cand_ll - ll).abs() / ll.abs().max(1e-300);
        t = cand;
        rho = cand_rho;
        ll = cand_ll;
        history.push(ll * total);
        step *= 2.0;
        if rel < REL_LL_TOL {
            converged = true;
            break;
        }
    }

    let rho = (&rho + rho.adjoint()).scale(0.5);
    let m = dim.trailing_zeros() as usize;
    Ok(ReconstructionResult {
        rho: DensityMatrix::from_parts(m, rho),
        log_likelihood: ll * total,
        iterations,
        converged,
        ll_history: history,
    })
}

/// Per-qubit MLE on single-qubit records, then the larger eigenvalue of each.
/// Records are grouped by their scope qubit; result entry `i` belongs to the
/// `i`-th smallest qubit index present.
pub fn local_spectrum_from_counts(records: &[CountRecord]) -> Result<LocalSpectrum> {
    let mut groups: BTreeMap<usize, Vec<CountRecord>> = BTreeMap::new();
    for r in records {
        if r.setting.scope().len() != 1 {
            return invalid(format!("setting {} is not a single-qubit setting", r.setting.id()));
        }
        groups.entry(r.setting.scope()[0]).or_default().push(r.clone());
    }
    let lambdas = groups
        .values()
        .map(|g| {
            let res = mle_reconstruct(g, 2)?;
            max_eigenvalue(&res.rho)
        })
        .collect::<Result<Vec<f64>>>()?;
    LocalSpectrum::new(lambdas.into_iter().map(|l| l.clamp(0.5, 1.0)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs, fidelity, haar_random_pure, purity, trace_distance, PureState};
    use crate::measure::{expected_records, full_tomography_plan, local_tomography_plan, simulate_plan, DetectorModel};
    use crate::prep::{canonical_three_qubit, ThreeQubitClass};
    use approx::assert_abs_diff_eq;

    #[test]
    fn exact_zero_state() {
        let rho = PureState::basis(1, 0).unwrap().projector();
        let recs = expected_records(&rho, &local_tomography_plan(1).unwrap(), &DetectorModel::ideal(1e6)).unwrap();
        let res = mle_reconstruct(&recs, 2).unwrap();
        assert!(max_abs(&(res.rho.matrix() - rho.matrix())) < 1e-6);
    }

    #[test]
    fn linear_inversion_is_exact_on_exact_data() {
        let psi = haar_random_pure(2, 4).unwrap();
        let rho = psi.projector();
        let plan = full_tomography_plan(2).unwrap();
        let probs_records: Vec<CountRecord> = plan
            .iter()
            .map(|s| {
                // Large scale keeps rounding below 1e-10 relative.
                let p = crate::measure::outcome_probabilities(&rho, s).unwrap();
                let counts = p.iter().map(|x| (x * 1e15).round() as u64).collect();
                CountRecord::new(s.clone(), counts, None, DetectorModel::default()).unwrap()
            })
            .collect();
        let est = linear_inversion(&probs_records, 4).unwrap();
        assert!(max_abs(&(est - rho.matrix())) < 1e-10);
        let mixed = DensityMatrix::maximally_mixed(1).unwrap();
        let recs = expected_records(&mixed, &local_tomography_plan(1).unwrap(), &DetectorModel::ideal(1e4)).unwrap();
        assert!(max_abs(&(linear_inversion(&recs, 2).unwrap() - mixed.matrix())) < 1e-12);
    }

    #[test]
    fn incomplete_records_rejected() {
        let rho = PureState::basis(1, 0).unwrap().projector();
        let recs = expected_records(&rho, &local_tomography_plan(1).unwrap()[..2], &DetectorModel::ideal(1e4)).unwrap();
        assert!(matches!(mle_reconstruct(&recs, 2), Err(Error::NotInformationallyComplete { .. })));
        let mut zero = expected_records(&rho, &local_tomography_plan(1).unwrap(), &DetectorModel::ideal(1e4)).unwrap();
        zero.iter_mut().for_each(|r| r.counts.iter_mut().for_each(|n| *n = 0));
        assert!(matches!(mle_reconstruct(&zero, 2), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn likelihood_never_decreases_and_state_is_physical() {
        let rho = crate::linalg::mix_white_noise(&canonical_three_qubit(ThreeQubitClass::W), 0.9).unwrap();
        let recs = simulate_plan(&rho, &full_tomography_plan(3).unwrap(), &DetectorModel::ideal(1e3), 8).unwrap();
        let res = mle_reconstruct(&recs, 8).unwrap();
        assert!(res.ll_history.windows(2).all(|w| w[1] >= w[0]));
        let ev = res.rho.eigenvalues();
        assert!(ev.iter().all(|l| *l >= -1e-12));
        assert_abs_diff_eq!(res.rho.matrix().trace().re, 1.0, epsilon = 1e-10);
        assert!(DensityMatrix::new(res.rho.matrix().clone()).is_ok());
        assert!(purity(&res.rho) < 1.0);
    }

    #[test]
    fn noiseless_local_spectra() {
        let plan = local_tomography_plan(3).unwrap();
        for (class, target) in [(ThreeQubitClass::Ghz, 0.5), (ThreeQubitClass::W, 2.0 / 3.0), (ThreeQubitClass::S, 1.0)] {
            let rho = canonical_three_qubit(class).projector();
            let recs = expected_records(&rho, &plan, &DetectorModel::ideal(1e8)).unwrap();
            let s = local_spectrum_from_counts(&recs).unwrap();
            for l in s.lambdas {
                assert_abs_diff_eq!(l, target, epsilon = 1e-6);
            }
        }
    }

    #[test]
    fn ghz_global_reconstruction() {
        let psi = canonical_three_qubit(ThreeQubitClass::Ghz);
        let recs = simulate_plan(&psi.projector(), &full_tomography_plan(3).unwrap(), &DetectorModel::ideal(1e4), 1).unwrap();
        let res = mle_reconstruct(&recs, 8).unwrap();
        assert!(fidelity(&res.rho, &psi).unwrap() >= 0.98);
        let lin = linear_inversion(&recs, 8).unwrap();
        assert!(trace_distance(&lin, res.rho.matrix()) < 0.05);
    }

    #[test]
    fn scope_mismatch_rejected() {
        let rho = canonical_three_qubit(ThreeQubitClass::Ghz).projector();
        let recs = expected_records(&rho, &local_tomography_plan(3).unwrap(), &DetectorModel::ideal(1e4)).unwrap();
        assert!(mle_reconstruct(&recs, 8).is_err());
        assert!(mle_reconstruct(&recs, 3).is_err());
    }
}
