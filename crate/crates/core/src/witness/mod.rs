//! Local-spectrum witnesses: polygon feasibility, the purity-dependent noise
//! bound, polytope regions and class verdicts.

mod classify;
mod polytope;

pub use classify::{classify, classify3, classify4, Margin, Statement, Verdict};
pub use polytope::{
    four_qubit_facets, four_qubit_region, four_qubit_vertices, hull_membership, inside_four_qubit_facets,
    three_qubit_membership, three_qubit_region, Facet, HullMembership, PolytopeRegion, Sense,
};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Tolerance for treating a spectrum as on a facet.
pub const FACET_TOL: f64 = 1e-9;

/// Largest eigenvalue of each single-qubit marginal, with optional standard
/// errors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalSpectrum {
    pub lambdas: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub std_errors: Option<Vec<f64>>,
}

impl LocalSpectrum {
    pub fn new(lambdas: Vec<f64>) -> Result<Self> {
        if lambdas.is_empty() {
            return invalid("spectrum is empty");
        }
        if let Some((i, l)) = lambdas
            .iter()
            .enumerate()
            .find(|(_, l)| !(**l >= 0.5 - FACET_TOL && **l <= 1.0 + FACET_TOL))
        {
            return invalid(format!("lambda[{i}] = {l} outside [1/2, 1]"));
        }
        Ok(Self { lambdas, std_errors: None })
    }

    pub fn with_errors(mut self, std_errors: Vec<f64>) -> Result<Self> {
        if std_errors.len() != self.lambdas.len() || std_errors.iter().any(|s| !(*s >= 0.0)) {
            return invalid("standard errors must be non-negative, one per entry");
        }
        self.std_errors = Some(std_errors);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.lambdas.iter().sum()
    }

    /// L1 distance to another spectrum of the same length.
    pub fn l1_distance(&self, other: &LocalSpectrum) -> f64 {
        self.lambdas.iter().zip(&other.lambdas).map(|(a, b)| (a - b).abs()).sum()
    }
}

/// Polygon inequality check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolygonCheck {
    pub feasible: bool,
    pub violated: Vec<usize>,
}

/// `lambda_k - sum_{i != k} lambda_i + (N - 2)` for every `k`; all must be
/// non-negative for a pure-state spectrum.
pub fn polygon_slacks(lambdas: &[f64]) -> Vec<f64> {
    let n = lambdas.len() as f64;
    let total: f64 = lambdas.iter().sum();
    lambdas.iter().map(|&l| 2.0 * l - total + (n - 2.0)).collect()
}

pub fn check_polygon(spectrum: &LocalSpectrum) -> PolygonCheck {
    let violated: Vec<usize> = polygon_slacks(&spectrum.lambdas)
        .iter()
        .enumerate()
        .filter(|(_, s)| **s < -FACET_TOL)
        .map(|(k, _)| k)
        .collect();
    PolygonCheck { feasible: violated.is_empty(), violated }
}

/// Purity-dependent shrinkage of the certification boundaries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseBound {
    pub epsilon: f64,
    pub purity_used: f64,
    pub num_qubits: usize,
}

impl NoiseBound {
    /// Pure-state bound, `epsilon = 0`.
    pub fn exact(num_qubits: usize) -> Self {
        Self { epsilon: 0.0, purity_used: 1.0, num_qubits }
    }

    /// Bound with a given `epsilon`, recording the purity it corresponds to.
    pub fn from_epsilon(num_qubits: usize, epsilon: f64) -> Result<Self> {
        let n = num_qubits as f64;
        if num_qubits == 0 || !(0.0..n / 2.0).contains(&epsilon) {
            return invalid(format!("epsilon {epsilon} outside [0, N/2) for N = {num_qubits}"));
        }
        let root = 1.0 - 2.0 * epsilon / n;
        Ok(Self { epsilon, purity_used: 0.5 * (root * root + 1.0), num_qubits })
    }

    /// Per-coordinate half-width `epsilon / N`: each local eigenvalue moves by
    /// at most this much between the prepared state and the nearest pure one.
    pub fn delta(&self) -> f64 {
        self.epsilon / self.num_qubits as f64
    }
}

/// `epsilon = N/2 (1 - sqrt(2p - 1))`, defined for `p > 1/2`.
pub fn epsilon_bound(num_qubits: usize, purity: f64) -> Result<NoiseBound> {
    if num_qubits == 0 {
        return invalid("epsilon bound needs at least one qubit");
    }
    if !(purity > 0.5) {
        return Err(Error::BoundInapplicable(purity));
    }
    if purity > 1.0 + 1e-10 {
        return invalid(format!("purity {purity} exceeds 1"));
    }
    let p = purity.min(1.0);
    let epsilon = num_qubits as f64 / 2.0 * (1.0 - (2.0 * p - 1.0).sqrt());
    Ok(NoiseBound { epsilon, purity_used: p, num_qubits })
}

/// Bound from the lowest purity of a batch.
pub fn epsilon_bound_worst(num_qubits: usize, purities: &[f64]) -> Result<NoiseBound> {
    let worst = purities.iter().copied().fold(f64::INFINITY, f64::min);
    if !worst.is_finite() {
        return invalid("no purities supplied");
    }
    epsilon_bound(num_qubits, worst)
}

/// Planar projection `(lambda_i + lambda_j, lambda_k)`: the pair is the
/// maximum together with the next largest entry, ties resolving to the lower
/// index, so the point stays under the line `y = x / 2`.
pub fn project_for_plot(spectrum: &LocalSpectrum) -> Result<(f64, f64)> {
    let l = &spectrum.lambdas;
    if l.len() != 3 {
        return invalid(format!("projection needs three entries, got {}", l.len()));
    }
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| l[b].total_cmp(&l[a]).then(a.cmp(&b)));
    Ok((l[order[0]] + l[order[1]], l[order[2]]))
}
