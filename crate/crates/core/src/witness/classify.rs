//! Class verdicts from a local spectrum and a noise bound.
//!
//! The bound says each local eigenvalue of the prepared state lies within
//! `delta = epsilon / N` of that of some pure state, so a verdict is a
//! statement about the box `[lambda_i - delta_i, lambda_i + delta_i]`: a
//! class is excluded only when the whole box misses its polytope. Sums over
//! `k` coordinates are widened by the full `epsilon` as in the published
//! certification thresholds. Optional per-entry standard errors widen each
//! `delta_i` by `stat_sigmas * sigma_i`.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::polytope::{four_qubit_region, hull_membership, HullMembership};
use super::{check_polygon, polygon_slacks, LocalSpectrum, NoiseBound, FACET_TOL};
use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "statement")]
pub enum Statement {
    #[serde(rename = "SEPARABLE-CONSISTENT")]
    SeparableConsistent,
    /// `separable` lists the qubits left in a product state.
    #[serde(rename = "BISEPARABLE-CONSISTENT")]
    BiseparableConsistent { separable: Vec<usize> },
    #[serde(rename = "GENUINE-MULTIPARTITE-CLASS-UNDETERMINED")]
    GenuineMultipartiteClassUndetermined { parties: Vec<usize> },
    #[serde(rename = "GHZ-CLASS-CERTIFIED")]
    GhzClassCertified { parties: Vec<usize> },
    #[serde(rename = "INDETERMINATE-WITHIN-EPSILON")]
    IndeterminateWithinEpsilon,
}

impl Statement {
    pub fn label(&self) -> &'static str {
        match self {
            Self::SeparableConsistent => "SEPARABLE-CONSISTENT",
            Self::BiseparableConsistent { .. } => "BISEPARABLE-CONSISTENT",
            Self::GenuineMultipartiteClassUndetermined { .. } => "GENUINE-MULTIPARTITE-CLASS-UNDETERMINED",
            Self::GhzClassCertified { .. } => "GHZ-CLASS-CERTIFIED",
            Self::IndeterminateWithinEpsilon => "INDETERMINATE-WITHIN-EPSILON",
        }
    }
}

impl fmt::Display for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |v: &[usize]| v.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(",");
        match self {
            Self::BiseparableConsistent { separable } => write!(f, "{}({})", self.label(), list(separable)),
            Self::GenuineMultipartiteClassUndetermined { parties } | Self::GhzClassCertified { parties } => {
                write!(f, "{}({})", self.label(), list(parties))
            }
            _ => f.write_str(self.label()),
        }
    }
}

/// Signed distance to one certification boundary; positive means the box
/// lies on the side named by `facet`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Margin {
    pub facet: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    /// Pure-state polygon feasibility of the spectrum as given.
    pub feasible: bool,
    pub excluded_classes: BTreeSet<String>,
    pub statement: Statement,
    pub margins: Vec<Margin>,
    pub epsilon: NoiseBound,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hull: Option<HullMembership>,
}

struct Box_ {
    lambdas: Vec<f64>,
    half: Vec<f64>,
    epsilon: f64,
    widen: Vec<f64>,
}

impl Box_ {
    fn new(spectrum: &LocalSpectrum, bound: &NoiseBound, stat_sigmas: f64) -> Result<Self> {
        let n = spectrum.len();
        if bound.num_qubits != n {
            return invalid(format!("bound is for {} qubits, spectrum has {n}", bound.num_qubits));
        }
        if !(stat_sigmas >= 0.0) {
            return invalid(format!("stat_sigmas {stat_sigmas} must be non-negative"));
        }
        let widen: Vec<f64> = match &spectrum.std_errors {
            Some(s) => s.iter().map(|s| stat_sigmas * s).collect(),
            None => vec![0.0; n],
        };
        let delta = bound.delta();
        Ok(Self {
            lambdas: spectrum.lambdas.clone(),
            half: widen.iter().map(|w| delta + w).collect(),
            epsilon: bound.epsilon,
            widen,
        })
    }

    /// Widened sum threshold over `parties`.
    fn sum_eps(&self, parties: &[usize]) -> f64 {
        self.epsilon + parties.iter().map(|&i| self.widen[i]).sum::<f64>()
    }

    fn sum(&self, parties: &[usize]) -> f64 {
        parties.iter().map(|&i| self.lambdas[i]).sum()
    }

    /// `lambda_k + delta_k - 1`: non-negative when qubit `k` can be pure.
    fn product_margin(&self, k: usize) -> f64 {
        self.lambdas[k] + self.half[k] - 1.0
    }

    /// `delta_i + delta_j - |lambda_i - lambda_j|`.
    fn pair_margin(&self, i: usize, j: usize) -> f64 {
        self.half[i] + self.half[j] - (self.lambdas[i] - self.lambdas[j]).abs()
    }

    /// Fails when no point of the box satisfies the polygon inequalities.
    fn require_feasible(&self) -> Result<()> {
        let n = self.lambdas.len();
        let total_half: f64 = self.half.iter().sum();
        let bad: Vec<usize> = polygon_slacks(&self.lambdas)
            .iter()
            .enumerate()
            .filter(|(_, s)| **s + total_half < -FACET_TOL)
            .map(|(k, _)| k)
            .collect();
        if bad.is_empty() || n < 3 {
            Ok(())
        } else {
            Err(Error::MarginalInfeasible(bad))
        }
    }
}

/// Dispatches on the spectrum length.
pub fn classify(spectrum: &LocalSpectrum, bound: &NoiseBound, stat_sigmas: f64) -> Result<Verdict> {
    match spectrum.len() {
        3 => classify3(spectrum, bound, stat_sigmas),
        4 => classify4(spectrum, bound, stat_sigmas),
        n => invalid(format!("no polytope witness for {n} qubits")),
    }
}

fn margin(facet: impl Into<String>, value: f64) -> Margin {
    Margin { facet: facet.into(), value }
}

/// Three-qubit verdict along `S ⊂ BS ⊂ W ⊂ GHZ`.
pub fn classify3(spectrum: &LocalSpectrum, bound: &NoiseBound, stat_sigmas: f64) -> Result<Verdict> {
    if spectrum.len() != 3 {
        return invalid(format!("classify3 needs three entries, got {}", spectrum.len()));
    }
    let b = Box_::new(spectrum, bound, stat_sigmas)?;
    b.require_feasible()?;
    let all = [0usize, 1, 2];

    let w_margin = b.sum(&all) - (2.0 - b.sum_eps(&all));
    let mut margins = vec![margin("sum>=2-eps", w_margin)];
    let mut excluded = BTreeSet::new();

    let s_excluded = (0..3).any(|k| b.product_margin(k) < -FACET_TOL);
    if s_excluded {
        excluded.insert("S".to_string());
    }
    let bs_labels = ["BS_BC_A", "BS_AC_B", "BS_AB_C"];
    let mut bs_consistent = Vec::new();
    for k in 0..3 {
        let (i, j) = match k {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        };
        let pm = b.product_margin(k);
        let qm = b.pair_margin(i, j);
        margins.push(margin(format!("lambda{k}>=1-delta"), pm));
        margins.push(margin(format!("|lambda{i}-lambda{j}|<=2delta"), qm));
        if pm < -FACET_TOL || qm < -FACET_TOL {
            excluded.insert(bs_labels[k].to_string());
        } else {
            bs_consistent.push(k);
        }
    }
    let w_excluded = w_margin < -FACET_TOL;
    if w_excluded {
        excluded.insert("W".to_string());
    }

    let statement = if w_excluded {
        Statement::GhzClassCertified { parties: all.to_vec() }
    } else if s_excluded && bs_consistent.is_empty() {
        Statement::GenuineMultipartiteClassUndetermined { parties: all.to_vec() }
    } else if !s_excluded {
        Statement::SeparableConsistent
    } else if bs_consistent.len() == 1 {
        Statement::BiseparableConsistent { separable: bs_consistent }
    } else {
        Statement::IndeterminateWithinEpsilon
    };

    Ok(Verdict {
        feasible: check_polygon(spectrum).feasible,
        excluded_classes: excluded,
        statement,
        margins,
        epsilon: *bound,
        hull: None,
    })
}

/// Four-qubit verdict: product pattern first, then the sum facets of the
/// remaining parties, plus LP hull membership against the pure-state polytope.
pub fn classify4(spectrum: &LocalSpectrum, bound: &NoiseBound, stat_sigmas: f64) -> Result<Verdict> {
    if spectrum.len() != 4 {
        return invalid(format!("classify4 needs four entries, got {}", spectrum.len()));
    }
    let b = Box_::new(spectrum, bound, stat_sigmas)?;
    b.require_feasible()?;
    let all = [0usize, 1, 2, 3];

    let mut margins = Vec::new();
    let mut excluded = BTreeSet::new();
    let mut product = Vec::new();
    for k in all {
        let pm = b.product_margin(k);
        margins.push(margin(format!("lambda{k}>=1-delta"), pm));
        if pm >= -FACET_TOL {
            product.push(k);
        }
    }
    let rest: Vec<usize> = all.iter().copied().filter(|k| !product.contains(k)).collect();
    if !rest.is_empty() {
        excluded.insert("S".to_string());
    }
    let sum4 = b.sum(&all) - (3.0 - b.sum_eps(&all));
    margins.push(margin("sum4>=3-eps", sum4));

    let statement = match rest.len() {
        0 => Statement::SeparableConsistent,
        1 => Statement::IndeterminateWithinEpsilon,
        2 => {
            let qm = b.pair_margin(rest[0], rest[1]);
            margins.push(margin(format!("|lambda{}-lambda{}|<=2delta", rest[0], rest[1]), qm));
            if qm >= -FACET_TOL {
                Statement::BiseparableConsistent { separable: product.clone() }
            } else {
                Statement::IndeterminateWithinEpsilon
            }
        }
        3 => {
            let m3 = b.sum(&rest) - (2.0 - b.sum_eps(&rest));
            let name = rest.iter().map(|i| i.to_string()).collect::<String>();
            margins.push(margin(format!("sum{name}>=2-eps"), m3));
            if m3 < -FACET_TOL {
                excluded.insert(format!("W3_{name}"));
                Statement::GhzClassCertified { parties: rest.clone() }
            } else {
                Statement::GenuineMultipartiteClassUndetermined { parties: rest.clone() }
            }
        }
        _ => {
            if sum4 < -FACET_TOL {
                excluded.insert("SUM4>=3".to_string());
                Statement::GhzClassCertified { parties: all.to_vec() }
            } else {
                Statement::GenuineMultipartiteClassUndetermined { parties: all.to_vec() }
            }
        }
    };

    let hull = hull_membership(&spectrum.lambdas, &four_qubit_region())?;
    margins.push(margin("hull", hull.margin));
    Ok(Verdict {
        feasible: check_polygon(spectrum).feasible,
        excluded_classes: excluded,
        statement,
        margins,
        epsilon: *bound,
        hull: Some(hull),
    })
}
