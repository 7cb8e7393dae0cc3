//! Dense complex linear algebra for few-qubit systems.
//!
//! Basis ordering: qubit 0 is the leftmost ket symbol, i.e. the most
//! significant bit of a computational-basis index. For the photonic
//! circuits that is `A_p B_p A_s` (three qubits) or `A_p B_p A_s B_s` (four).

use nalgebra::{DMatrix, DVector, Matrix2};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid, Error, Result};
use crate::seeding;

pub const MAX_QUBITS: usize = 6;

pub const NORM_TOL: f64 = 1e-12;
pub const HERMITIAN_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;
pub const PSD_TOL: f64 = 1e-9;

pub type CMatrix = DMatrix<Complex64>;

#[inline]
pub(crate) fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn qubits_for_len(len: usize) -> Result<usize> {
    if len < 2 || !len.is_power_of_two() {
        return invalid(format!("length {len} is not 2^N with N >= 1"));
    }
    let n = len.trailing_zeros() as usize;
    if n > MAX_QUBITS {
        return Err(Error::ResourceLimit(format!(
            "{n} qubits exceeds the supported maximum of {MAX_QUBITS}"
        )));
    }
    Ok(n)
}

/// Unit-norm state vector on `N` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    num_qubits: usize,
    amplitudes: DVector<Complex64>,
}

impl PureState {
    /// Wraps amplitudes that are already normalized.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let num_qubits = qubits_for_len(amplitudes.len())?;
        let amplitudes = DVector::from_vec(amplitudes);
        let norm_sqr = amplitudes.norm_squared();
        if (norm_sqr - 1.0).abs() > NORM_TOL {
            return invalid(format!("squared norm {norm_sqr} differs from 1"));
        }
        Ok(Self { num_qubits, amplitudes })
    }

    /// Normalizes `amplitudes`; fails if the vector is (numerically) zero.
    pub fn normalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        let num_qubits = qubits_for_len(amplitudes.len())?;
        let mut amplitudes = DVector::from_vec(amplitudes);
        let norm = amplitudes.norm();
        if norm < NORM_TOL || !norm.is_finite() {
            return invalid(format!("cannot normalize a vector of norm {norm:e}"));
        }
        amplitudes.unscale_mut(norm);
        Ok(Self { num_qubits, amplitudes })
    }

    /// Computational basis state `|index>`.
    pub fn basis(num_qubits: usize, index: usize) -> Result<Self> {
        let dim = 1usize << num_qubits;
        if index >= dim {
            return invalid(format!("basis index {index} out of range for {num_qubits} qubits"));
        }
        let mut amps = vec![Complex64::ZERO; dim];
        amps[index] = Complex64::ONE;
        Self::new(amps)
    }

    pub(crate) fn from_vector_unchecked(num_qubits: usize, amplitudes: DVector<Complex64>) -> Self {
        Self { num_qubits, amplitudes }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amplitudes[index]
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &PureState) -> Complex64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    pub fn projector(&self) -> DensityMatrix {
        let m = &self.amplitudes * self.amplitudes.adjoint();
        DensityMatrix::from_parts(self.num_qubits, m)
    }

    /// Applies a 2x2 operator to `qubit`, returning an unnormalized vector.
    pub(crate) fn apply_local_unnormalized(&self, qubit: usize, op: &Matrix2<Complex64>) -> DVector<Complex64> {
        let mut out = self.amplitudes.clone();
        apply_single_qubit(out.as_mut_slice(), self.num_qubits, qubit, op);
        out
    }
}

pub(crate) fn apply_single_qubit(amps: &mut [Complex64], num_qubits: usize, qubit: usize, op: &Matrix2<Complex64>) {
    let stride = 1usize << (num_qubits - 1 - qubit);
    for base in 0..amps.len() {
        if base & stride != 0 {
            continue;
        }
        let a0 = amps[base];
        let a1 = amps[base | stride];
        amps[base] = op[(0, 0)] * a0 + op[(0, 1)] * a1;
        amps[base | stride] = op[(1, 0)] * a0 + op[(1, 1)] * a1;
    }
}

/// Hermitian, positive-semidefinite, unit-trace operator on `N` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    num_qubits: usize,
    matrix: CMatrix,
}

impl DensityMatrix {
    /// Validates the density-operator invariants.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return invalid(format!("matrix is {}x{}, not square", matrix.nrows(), matrix.ncols()));
        }
        let num_qubits = qubits_for_len(matrix.nrows())?;
        let dim = matrix.nrows();
        for i in 0..dim {
            for j in i..dim {
                let diff = matrix[(i, j)] - matrix[(j, i)].conj();
                if diff.re.abs() > HERMITIAN_TOL || diff.im.abs() > HERMITIAN_TOL {
                    return invalid(format!("not Hermitian at ({i}, {j}): deviation {}", diff.norm()));
                }
            }
        }
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > TRACE_TOL || trace.im.abs() > TRACE_TOL {
            return invalid(format!("trace {trace} differs from 1"));
        }
        let min_eig = hermitian_eigenvalues(&matrix).last().copied().unwrap_or(0.0);
        if min_eig < -PSD_TOL {
            return invalid(format!("not positive semidefinite: minimum eigenvalue {min_eig:e}"));
        }
        Ok(Self { num_qubits, matrix })
    }

    pub(crate) fn from_parts(num_qubits: usize, matrix: CMatrix) -> Self {
        Self { num_qubits, matrix }
    }

    pub fn from_pure(psi: &PureState) -> Self {
        psi.projector()
    }

    pub fn maximally_mixed(num_qubits: usize) -> Result<Self> {
        if num_qubits == 0 || num_qubits > MAX_QUBITS {
            return invalid(format!("qubit count {num_qubits} outside 1..={MAX_QUBITS}"));
        }
        let dim = 1usize << num_qubits;
        let m = CMatrix::identity(dim, dim).unscale(dim as f64);
        Ok(Self::from_parts(num_qubits, m))
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    /// Eigenvalues in descending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.matrix)
    }

    /// Convex combination `w * self + (1 - w) * other`.
    pub fn mix(&self, other: &DensityMatrix, weight: f64) -> Result<Self> {
        if self.num_qubits != other.num_qubits {
            return invalid("cannot mix density matrices of different sizes");
        }
        if !(0.0..=1.0).contains(&weight) {
            return invalid(format!("mixing weight {weight} outside [0, 1]"));
        }
        let m = self.matrix.scale(weight) + other.matrix.scale(1.0 - weight);
        Ok(Self::from_parts(self.num_qubits, m))
    }
}

/// Eigenvalues of a Hermitian matrix in descending order.
///
/// 2x2 inputs use the closed form; larger ones go through nalgebra's
/// Hermitian eigen-solver.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    match m.nrows() {
        0 => Vec::new(),
        1 => vec![m[(0, 0)].re],
        2 => {
            let (lo, hi) = eigenvalues_2x2(m[(0, 0)].re, m[(1, 1)].re, m[(0, 1)]);
            vec![hi, lo]
        }
        _ => {
            let mut ev: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
            ev.sort_by(|a, b| b.total_cmp(a));
            ev
        }
    }
}

/// Returns `(smaller, larger)` eigenvalue of `[[a, b], [b*, d]]`.
#[inline]
fn eigenvalues_2x2(a: f64, d: f64, b: Complex64) -> (f64, f64) {
    let mean = 0.5 * (a + d);
    let half_gap = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
    (mean - half_gap, mean + half_gap)
}

/// Scatters the bits of `value` (MSB first, one per entry of `qubits`) into a
/// full `num_qubits` index.
fn scatter_bits(value: usize, qubits: &[usize], num_qubits: usize) -> usize {
    let m = qubits.len();
    qubits.iter().enumerate().fold(0, |acc, (pos, &q)| {
        let bit = (value >> (m - 1 - pos)) & 1;
        acc | (bit << (num_qubits - 1 - q))
    })
}

fn normalize_subset(keep: &[usize], num_qubits: usize) -> Result<Vec<usize>> {
    if keep.is_empty() {
        return invalid("keep set is empty");
    }
    if let Some(&q) = keep.iter().find(|&&q| q >= num_qubits) {
        return invalid(format!("qubit index {q} out of range for {num_qubits} qubits"));
    }
    let mut keep = keep.to_vec();
    keep.sort_unstable();
    keep.dedup();
    Ok(keep)
}

/// Reduced state on the qubits in `keep` (treated as a set; the result is
/// ordered by ascending qubit index).
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let n = rho.num_qubits;
    let keep = normalize_subset(keep, n)?;
    let traced: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
    let kept_dim = 1usize << keep.len();
    let traced_dim = 1usize << traced.len();

    let keep_part: Vec<usize> = (0..kept_dim).map(|i| scatter_bits(i, &keep, n)).collect();
    let trace_part: Vec<usize> = (0..traced_dim).map(|t| scatter_bits(t, &traced, n)).collect();

    let m = rho.matrix();
    let out = CMatrix::from_fn(kept_dim, kept_dim, |i, j| {
        trace_part
            .iter()
            .map(|&t| m[(keep_part[i] | t, keep_part[j] | t)])
            .sum()
    });
    Ok(DensityMatrix::from_parts(keep.len(), out))
}

/// Larger eigenvalue of a single-qubit density matrix.
pub fn max_eigenvalue(rho: &DensityMatrix) -> Result<f64> {
    if rho.dim() != 2 {
        return invalid(format!("max_eigenvalue needs a 2x2 state, got {}x{}", rho.dim(), rho.dim()));
    }
    let m = rho.matrix();
    Ok(eigenvalues_2x2(m[(0, 0)].re, m[(1, 1)].re, m[(0, 1)]).1)
}

/// Maximal eigenvalue of every single-qubit marginal.
pub fn local_max_eigenvalues(rho: &DensityMatrix) -> Vec<f64> {
    (0..rho.num_qubits())
        .map(|q| {
            let r = partial_trace(rho, &[q]).expect("qubit index in range");
            max_eigenvalue(&r).expect("single-qubit marginal")
        })
        .collect()
}

/// Rank of each single-qubit marginal (1 when the marginal is pure).
pub fn marginal_ranks(rho: &DensityMatrix, tol: f64) -> Vec<usize> {
    local_max_eigenvalues(rho)
        .into_iter()
        .map(|l| if l > 1.0 - tol { 1 } else { 2 })
        .collect()
}

/// `Tr(rho^2)`.
pub fn purity(rho: &DensityMatrix) -> f64 {
    // Tr(rho^2) = sum |rho_ij|^2 for Hermitian rho.
    rho.matrix().iter().map(|z| z.norm_sqr()).sum()
}

/// `<target| rho |target>`.
pub fn fidelity(rho: &DensityMatrix, target: &PureState) -> Result<f64> {
    if rho.dim() != target.dim() {
        return invalid(format!("dimension mismatch: {} vs {}", rho.dim(), target.dim()));
    }
    let v = target.amplitudes();
    Ok(v.dotc(&(rho.matrix() * v)).re)
}

/// Largest entrywise modulus.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Half the trace norm of `a - b`.
pub fn trace_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    let diff = a - b;
    0.5 * hermitian_eigenvalues(&diff).iter().map(|e| e.abs()).sum::<f64>()
}

/// Haar-random pure state from normalized i.i.d. complex Gaussians.
pub fn haar_random_pure(num_qubits: usize, seed: u64) -> Result<PureState> {
    let mut rng = seeding::rng(seed);
    haar_random_pure_with(num_qubits, &mut rng)
}

pub(crate) fn haar_random_pure_with<R: Rng + ?Sized>(num_qubits: usize, rng: &mut R) -> Result<PureState> {
    if num_qubits == 0 || num_qubits > MAX_QUBITS {
        return invalid(format!("qubit count {num_qubits} outside 1..={MAX_QUBITS}"));
    }
    let dim = 1usize << num_qubits;
    let amps = (0..dim).map(|_| complex_gaussian(rng)).collect();
    PureState::normalized(amps)
}

pub(crate) fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    c(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// `v |psi><psi| + (1 - v) I / 2^N`.
pub fn mix_white_noise(psi: &PureState, visibility: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&visibility) {
        return invalid(format!("visibility {visibility} outside [0, 1]"));
    }
    let noise = DensityMatrix::maximally_mixed(psi.num_qubits())?;
    psi.projector().mix(&noise, visibility)
}

/// Single-qubit unitary acting on one target.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalUnitary {
    target: usize,
    matrix: Matrix2<Complex64>,
}

impl LocalUnitary {
    pub fn new(target: usize, matrix: Matrix2<Complex64>) -> Result<Self> {
        let defect = (matrix.adjoint() * matrix - Matrix2::identity()).map(|z| z.norm()).max();
        if defect > 1e-12 {
            return invalid(format!("matrix is not unitary (|U^dag U - I| = {defect:e})"));
        }
        Ok(Self { target, matrix })
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn matrix(&self) -> &Matrix2<Complex64> {
        &self.matrix
    }

    pub fn apply(&self, psi: &PureState) -> Result<PureState> {
        if self.target >= psi.num_qubits() {
            return invalid(format!("target {} out of range", self.target));
        }
        let out = psi.apply_local_unnormalized(self.target, &self.matrix);
        Ok(PureState::from_vector_unchecked(psi.num_qubits(), out))
    }
}

/// Pauli X.
pub fn pauli_x() -> Matrix2<Complex64> {
    Matrix2::new(c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0))
}

/// Pauli Z.
pub fn pauli_z() -> Matrix2<Complex64> {
    Matrix2::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0))
}

/// Product of invertible 2x2 operators `O_0 (x) ... (x) O_{N-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SlocOperator {
    ops: Vec<Matrix2<Complex64>>,
}

impl SlocOperator {
    pub const MIN_DET: f64 = 1e-9;

    pub fn new(ops: Vec<Matrix2<Complex64>>) -> Result<Self> {
        if ops.is_empty() {
            return invalid("SLOCC operator needs at least one factor");
        }
        for (q, op) in ops.iter().enumerate() {
            let det = op.determinant().norm();
            if det <= Self::MIN_DET {
                return invalid(format!("factor {q} is not invertible (|det| = {det:e})"));
            }
        }
        Ok(Self { ops })
    }

    pub fn identity(num_qubits: usize) -> Self {
        Self { ops: vec![Matrix2::identity(); num_qubits] }
    }

    pub fn factors(&self) -> &[Matrix2<Complex64>] {
        &self.ops
    }

    pub fn num_qubits(&self) -> usize {
        self.ops.len()
    }
}

/// `normalize(O_0 (x) ... (x) O_{N-1} |psi>)`.
pub fn apply_sloc(op: &SlocOperator, psi: &PureState) -> Result<PureState> {
    if op.num_qubits() != psi.num_qubits() {
        return invalid(format!(
            "operator acts on {} qubits, state has {}",
            op.num_qubits(),
            psi.num_qubits()
        ));
    }
    let n = psi.num_qubits();
    let mut amps = psi.amplitudes().clone();
    for (q, m) in op.factors().iter().enumerate() {
        apply_single_qubit(amps.as_mut_slice(), n, q, m);
    }
    let norm = amps.norm();
    if norm < NORM_TOL {
        return Err(Error::DegenerateOperator(norm));
    }
    amps.unscale_mut(norm);
    Ok(PureState::from_vector_unchecked(n, amps))
}
