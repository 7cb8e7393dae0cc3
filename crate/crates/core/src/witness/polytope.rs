use microlp::{ComparisonOp, OptimizationDirection, Problem};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::polygon_slacks;
use crate::error::{invalid, Error, Result};
use crate::prep::ThreeQubitClass;

/// LP residual below which a point counts as inside the hull.
pub const HULL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    Le,
    Ge,
}

/// `normal . x <= bound` or `normal . x >= bound`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Facet {
    pub normal: Vec<f64>,
    pub bound: f64,
    pub sense: Sense,
}

impl Facet {
    pub fn new(normal: Vec<f64>, bound: f64, sense: Sense) -> Self {
        Self { normal, bound, sense }
    }

    /// Signed Euclidean distance to the hyperplane, positive on the allowed side.
    pub fn signed_distance(&self, x: &[f64]) -> f64 {
        let dot: f64 = self.normal.iter().zip(x).map(|(a, b)| a * b).sum();
        let slack = match self.sense {
            Sense::Le => self.bound - dot,
            Sense::Ge => dot - self.bound,
        };
        slack / self.normal.iter().map(|a| a * a).sum::<f64>().sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolytopeRegion {
    pub vertices: Vec<Vec<f64>>,
    pub facets: Vec<Facet>,
}

fn combinations(n: usize, k: usize, mut visit: impl FnMut(&[usize])) {
    let mut idx: Vec<usize> = (0..k).collect();
    if k > n {
        return;
    }
    loop {
        visit(&idx);
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 {
                return;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

impl PolytopeRegion {
    /// Facets by brute force over `d`-subsets of vertices; the hull must be
    /// full-dimensional. Fine for the handful of vertices used here.
    pub fn from_vertices(vertices: Vec<Vec<f64>>) -> Result<Self> {
        let d = vertices.first().map(Vec::len).unwrap_or(0);
        if d == 0 || vertices.iter().any(|v| v.len() != d) {
            return invalid("vertices must be non-empty and of equal dimension");
        }
        let mut facets: Vec<Facet> = Vec::new();
        combinations(vertices.len(), d, |subset| {
            // Rows [v, -1] . [a; b] = 0, padded square for a full V^T.
            let m = DMatrix::from_fn(d + 1, d + 1, |r, col| match (subset.get(r), col == d) {
                (Some(_), true) => -1.0,
                (Some(&v), false) => vertices[v][col],
                (None, _) => 0.0,
            });
            let svd = m.svd(false, true);
            let mut sv: Vec<(f64, usize)> = svd.singular_values.iter().copied().zip(0..).collect();
            sv.sort_by(|a, b| a.0.total_cmp(&b.0));
            // One-dimensional null space only.
            if sv[1].0 < 1e-9 {
                return;
            }
            let v_t = svd.v_t.expect("requested V^T");
            let row = v_t.row(sv[0].1);
            let mut normal: Vec<f64> = (0..d).map(|i| row[i]).collect();
            let mut bound = row[d];
            let norm = normal.iter().map(|a| a * a).sum::<f64>().sqrt();
            if norm < 1e-12 {
                return;
            }
            normal.iter_mut().for_each(|a| *a /= norm);
            bound /= norm;
            let side: Vec<f64> = vertices
                .iter()
                .map(|v| v.iter().zip(&normal).map(|(x, a)| x * a).sum::<f64>() - bound)
                .collect();
            let (lo, hi) = side.iter().fold((0.0f64, 0.0f64), |(lo, hi), s| (lo.min(*s), hi.max(*s)));
            if lo < -1e-9 && hi > 1e-9 {
                return;
            }
            if hi > 1e-9 {
                normal.iter_mut().for_each(|a| *a = -*a);
                bound = -bound;
            }
            let dup = facets.iter().any(|f| {
                (f.bound - bound).abs() < 1e-9 && f.normal.iter().zip(&normal).all(|(a, b)| (a - b).abs() < 1e-9)
            });
            if !dup {
                facets.push(Facet::new(normal, bound, Sense::Le));
            }
        });
        if facets.len() < d + 1 {
            return invalid(format!("hull of {} points is not full-dimensional in R^{d}", vertices.len()));
        }
        Ok(Self { vertices, facets })
    }

    pub fn dim(&self) -> usize {
        self.vertices.first().map(Vec::len).unwrap_or(0)
    }

    /// Minimum signed facet distance, positive inside.
    pub fn margin(&self, x: &[f64]) -> f64 {
        self.facets.iter().map(|f| f.signed_distance(x)).fold(f64::INFINITY, f64::min)
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        self.margin(x) >= -tol
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HullMembership {
    pub inside: bool,
    pub margin: f64,
    /// L1 distance between the point and the best convex combination.
    pub residual: f64,
    pub weights: Vec<f64>,
}

/// Convex-combination feasibility, relaxed to minimizing the L1 residual so
/// the LP is always feasible.
pub fn hull_membership(point: &[f64], region: &PolytopeRegion) -> Result<HullMembership> {
    let d = region.dim();
    if point.len() != d {
        return invalid(format!("point has {} coordinates, region has {d}", point.len()));
    }
    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let w: Vec<_> = region.vertices.iter().map(|_| lp.add_var(0.0, (0.0, f64::INFINITY))).collect();
    let s_pos: Vec<_> = (0..d).map(|_| lp.add_var(1.0, (0.0, f64::INFINITY))).collect();
    let s_neg: Vec<_> = (0..d).map(|_| lp.add_var(1.0, (0.0, f64::INFINITY))).collect();
    for i in 0..d {
        let mut row: Vec<_> = w.iter().zip(&region.vertices).map(|(&wj, v)| (wj, v[i])).collect();
        row.push((s_pos[i], -1.0));
        row.push((s_neg[i], 1.0));
        lp.add_constraint(row.as_slice(), ComparisonOp::Eq, point[i]);
    }
    let ones: Vec<_> = w.iter().map(|&wj| (wj, 1.0)).collect();
    lp.add_constraint(ones.as_slice(), ComparisonOp::Eq, 1.0);

    let outcome = lp.solve().map_err(|e| Error::Numeric(format!("hull LP failed: {e} ({lp:?})")))?;
    let sol = outcome
        .into_solution()
        .map_err(|i| Error::Numeric(format!("hull LP interrupted: {:?}", i.termination_reason())))?;
    let residual = sol.objective().max(0.0);
    Ok(HullMembership {
        inside: residual <= HULL_TOL,
        margin: region.margin(point),
        residual,
        weights: w.iter().map(|&wj| sol.var_value(wj)).collect(),
    })
}

/// The twelve extreme points of the four-qubit pure-state polytope.
pub fn four_qubit_vertices() -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(12);
    for mask in 0u32..16 {
        let halves = mask.count_ones();
        if matches!(halves, 0 | 2 | 3 | 4) {
            out.push((0..4).map(|i| if mask >> (3 - i) & 1 == 1 { 0.5 } else { 1.0 }).collect());
        }
    }
    out
}

pub fn four_qubit_region() -> PolytopeRegion {
    PolytopeRegion::from_vertices(four_qubit_vertices()).expect("four-qubit polytope is full-dimensional")
}

/// Explicit description: `1/2 <= lambda_i <= 1` and the polygon inequalities.
pub fn four_qubit_facets() -> Vec<Facet> {
    let unit = |i: usize| (0..4).map(|j| if i == j { 1.0 } else { 0.0 }).collect::<Vec<_>>();
    let mut out = Vec::with_capacity(12);
    for i in 0..4 {
        out.push(Facet::new(unit(i), 0.5, Sense::Ge));
        out.push(Facet::new(unit(i), 1.0, Sense::Le));
        let poly = (0..4).map(|j| if i == j { 1.0 } else { -1.0 }).collect();
        out.push(Facet::new(poly, -2.0, Sense::Ge));
    }
    out
}

pub fn inside_four_qubit_facets(lambdas: &[f64], tol: f64) -> bool {
    lambdas.len() == 4 && four_qubit_facets().iter().all(|f| f.signed_distance(lambdas) >= -tol)
}

/// Full-dimensional three-qubit polytopes (W and GHZ); the others are
/// lower-dimensional and only available through [`three_qubit_membership`].
pub fn three_qubit_region(class: ThreeQubitClass) -> Result<PolytopeRegion> {
    let mut v = vec![vec![1.0, 1.0, 1.0], vec![1.0, 0.5, 0.5], vec![0.5, 1.0, 0.5], vec![0.5, 0.5, 1.0]];
    match class {
        ThreeQubitClass::W => v.push(vec![2.0 / 3.0; 3]),
        ThreeQubitClass::Ghz => v.push(vec![0.5; 3]),
        _ => return invalid(format!("the {} polytope is not full-dimensional", class.label())),
    }
    PolytopeRegion::from_vertices(v)
}

/// Explicit membership test for each three-qubit polytope.
pub fn three_qubit_membership(class: ThreeQubitClass, l: &[f64], tol: f64) -> bool {
    if l.len() != 3 || l.iter().any(|x| *x < 0.5 - tol || *x > 1.0 + tol) {
        return false;
    }
    let polygon = polygon_slacks(l).iter().all(|s| *s >= -tol);
    match class {
        ThreeQubitClass::S => l.iter().all(|x| *x >= 1.0 - tol),
        ThreeQubitClass::W => polygon && l.iter().sum::<f64>() >= 2.0 - tol,
        ThreeQubitClass::Ghz => polygon,
        bs => {
            let k = bs.separable_qubit().expect("biseparable class");
            let others: Vec<f64> = (0..3).filter(|&i| i != k).map(|i| l[i]).collect();
            l[k] >= 1.0 - tol && (others[0] - others[1]).abs() <= tol
        }
    }
}
