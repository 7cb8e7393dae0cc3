//! Projective measurements with lossy detectors and Poisson coincidence counts.
//!
//! Each qubit is analyzed by one of four projectors, `H=|0>`, `V=|1>`,
//! `D=|+>`, `R=|+i>`, always recorded together with its complement, so a
//! setting on `m` qubits has `2^m` outcomes. Outcome index bit `m-1-j` is 1
//! when qubit `scope[j]` landed in the complement.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::{c, partial_trace, DensityMatrix, MAX_QUBITS};
use crate::seeding;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Analyzer {
    H,
    V,
    D,
    R,
}

impl Analyzer {
    pub const ALL: [Analyzer; 4] = [Analyzer::H, Analyzer::V, Analyzer::D, Analyzer::R];

    pub fn symbol(self) -> char {
        match self {
            Self::H => 'H',
            Self::V => 'V',
            Self::D => 'D',
            Self::R => 'R',
        }
    }

    pub fn from_symbol(ch: char) -> Option<Self> {
        Self::ALL.into_iter().find(|a| a.symbol() == ch.to_ascii_uppercase())
    }

    /// Bloch vector of the projector picked out by `outcome` (0 = analyzer
    /// state, 1 = its complement).
    pub fn bloch(self, outcome: usize) -> [f64; 3] {
        let r = match self {
            Self::H => [0.0, 0.0, 1.0],
            Self::V => [0.0, 0.0, -1.0],
            Self::D => [1.0, 0.0, 0.0],
            Self::R => [0.0, 1.0, 0.0],
        };
        if outcome == 0 {
            r
        } else {
            r.map(|x| -x)
        }
    }

    /// Unit vector spanning the projector for `outcome`.
    pub fn ket(self, outcome: usize) -> [Complex64; 2] {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let [x, y, z] = self.bloch(outcome);
        if z > 0.5 {
            [Complex64::ONE, Complex64::ZERO]
        } else if z < -0.5 {
            [Complex64::ZERO, Complex64::ONE]
        } else {
            [c(s, 0.0), c(s * x, s * y)]
        }
    }
}

/// Analyzers on an ascending list of jointly detected qubits.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MeasurementSetting {
    scope: Vec<usize>,
    analyzers: Vec<Analyzer>,
}

impl MeasurementSetting {
    pub fn new(scope: Vec<usize>, analyzers: Vec<Analyzer>) -> Result<Self> {
        if scope.is_empty() || scope.len() != analyzers.len() {
            return invalid("scope and analyzers must be non-empty and of equal length");
        }
        if scope.windows(2).any(|w| w[0] >= w[1]) {
            return invalid(format!("scope {scope:?} must be strictly ascending"));
        }
        if scope.len() > MAX_QUBITS {
            return Err(Error::ResourceLimit(format!("scope of {} qubits", scope.len())));
        }
        Ok(Self { scope, analyzers })
    }

    pub fn scope(&self) -> &[usize] {
        &self.scope
    }

    pub fn analyzers(&self) -> &[Analyzer] {
        &self.analyzers
    }

    pub fn num_outcomes(&self) -> usize {
        1 << self.scope.len()
    }

    /// Per-qubit outcome bits of `outcome`, in scope order.
    pub fn outcome_bits(&self, outcome: usize) -> Vec<usize> {
        let m = self.scope.len();
        (0..m).map(|j| (outcome >> (m - 1 - j)) & 1).collect()
    }

    pub fn outcome_label(&self, outcome: usize) -> String {
        self.outcome_bits(outcome).iter().map(|b| if *b == 0 { '0' } else { '1' }).collect()
    }

    pub fn parse_outcome(&self, label: &str) -> Result<usize> {
        if label.len() != self.scope.len() || !label.chars().all(|ch| ch == '0' || ch == '1') {
            return invalid(format!("outcome {label:?} does not fit setting {}", self.id()));
        }
        Ok(usize::from_str_radix(label, 2).expect("validated binary"))
    }

    /// Compact id such as `0H` or `0H1D2R`.
    pub fn id(&self) -> String {
        self.scope
            .iter()
            .zip(&self.analyzers)
            .map(|(q, a)| format!("{q}{}", a.symbol()))
            .collect()
    }

    pub fn parse_id(id: &str) -> Result<Self> {
        let mut scope = Vec::new();
        let mut analyzers = Vec::new();
        let mut digits = String::new();
        for ch in id.chars() {
            if ch.is_ascii_digit() {
                digits.push(ch);
                continue;
            }
            let a = Analyzer::from_symbol(ch).ok_or_else(|| Error::InvalidArgument(format!("bad analyzer {ch:?} in {id:?}")))?;
            let q = digits.parse().map_err(|_| Error::InvalidArgument(format!("missing qubit index in {id:?}")))?;
            digits.clear();
            scope.push(q);
            analyzers.push(a);
        }
        if !digits.is_empty() {
            return invalid(format!("trailing qubit index in {id:?}"));
        }
        Self::new(scope, analyzers)
    }

    /// Product vector of the rank-1 projector for `outcome` on the scope.
    pub fn outcome_vector(&self, outcome: usize) -> DVector<Complex64> {
        let bits = self.outcome_bits(outcome);
        let mut v = vec![Complex64::ONE];
        for (a, b) in self.analyzers.iter().zip(bits) {
            let k = a.ket(b);
            v = v.iter().flat_map(|x| [x * k[0], x * k[1]]).collect();
        }
        DVector::from_vec(v)
    }
}

/// Detector efficiency `eta`, source rate `rate` (1/s), integration `time` (s).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorModel {
    pub eta: f64,
    pub rate: f64,
    pub time: f64,
}

impl DetectorModel {
    pub fn new(eta: f64, rate: f64, time: f64) -> Result<Self> {
        let d = Self { eta, rate, time };
        d.validate()?;
        Ok(d)
    }

    /// Ideal detectors collecting `events` pairs per setting in one second.
    pub fn ideal(events: f64) -> Self {
        Self { eta: 1.0, rate: events, time: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return invalid(format!("efficiency {} outside (0, 1]", self.eta));
        }
        if !(self.rate > 0.0 && self.rate.is_finite()) || !(self.time > 0.0 && self.time.is_finite()) {
            return invalid(format!("rate {} and time {} must be positive", self.rate, self.time));
        }
        Ok(())
    }

    /// Expected number of `m`-fold coincidences per setting.
    pub fn expected_events(&self, m: usize) -> f64 {
        self.eta.powi(m as i32) * self.rate * self.time
    }
}

impl Default for DetectorModel {
    fn default() -> Self {
        Self::ideal(1e4)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountRecord {
    pub setting: MeasurementSetting,
    pub counts: Vec<u64>,
    pub seed: Option<u64>,
    pub detector: DetectorModel,
}

impl CountRecord {
    pub fn new(setting: MeasurementSetting, counts: Vec<u64>, seed: Option<u64>, detector: DetectorModel) -> Result<Self> {
        if counts.len() != setting.num_outcomes() {
            return invalid(format!(
                "setting {} needs {} outcome counts, got {}",
                setting.id(),
                setting.num_outcomes(),
                counts.len()
            ));
        }
        Ok(Self { setting, counts, seed, detector })
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

/// Born-rule probabilities of a setting's outcomes.
pub fn outcome_probabilities(state: &DensityMatrix, setting: &MeasurementSetting) -> Result<Vec<f64>> {
    if let Some(&q) = setting.scope().iter().find(|&&q| q >= state.num_qubits()) {
        return invalid(format!("scope qubit {q} outside a {}-qubit state", state.num_qubits()));
    }
    let reduced = if setting.scope().len() == state.num_qubits() {
        state.clone()
    } else {
        partial_trace(state, setting.scope())?
    };
    let m = reduced.matrix();
    Ok((0..setting.num_outcomes())
        .map(|k| {
            let v = setting.outcome_vector(k);
            v.dotc(&(m * &v)).re
        })
        .collect())
}

fn poisson<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    Poisson::new(mean).expect("positive finite mean").sample(rng) as u64
}

/// Draws one count per outcome with mean `eta^m R T p`.
pub fn simulate_counts(
    state: &DensityMatrix,
    setting: &MeasurementSetting,
    detector: &DetectorModel,
    seed: u64,
) -> Result<CountRecord> {
    simulate_with(state, setting, detector, seed, &mut seeding::rng(seed))
}

fn simulate_with<R: Rng + ?Sized>(
    state: &DensityMatrix,
    setting: &MeasurementSetting,
    detector: &DetectorModel,
    seed: u64,
    rng: &mut R,
) -> Result<CountRecord> {
    detector.validate()?;
    let probs = outcome_probabilities(state, setting)?;
    let scale = detector.expected_events(setting.scope().len());
    let counts = probs.iter().map(|p| poisson(scale * p.max(0.0), rng)).collect();
    CountRecord::new(setting.clone(), counts, Some(seed), *detector)
}

/// Simulates every setting of `plan`; setting `i` draws from stream `i`.
pub fn simulate_plan(
    state: &DensityMatrix,
    plan: &[MeasurementSetting],
    detector: &DetectorModel,
    seed: u64,
) -> Result<Vec<CountRecord>> {
    plan.par_iter()
        .enumerate()
        .map(|(i, s)| simulate_with(state, s, detector, seed, &mut seeding::stream(seed, i as u64)))
        .collect()
}

/// Noise-free records: each count is the rounded mean.
pub fn expected_records(state: &DensityMatrix, plan: &[MeasurementSetting], detector: &DetectorModel) -> Result<Vec<CountRecord>> {
    detector.validate()?;
    plan.iter()
        .map(|s| {
            let scale = detector.expected_events(s.scope().len());
            let counts = outcome_probabilities(state, s)?
                .into_iter()
                .map(|p| (scale * p.max(0.0)).round() as u64)
                .collect();
            CountRecord::new(s.clone(), counts, None, *detector)
        })
        .collect()
}

/// Four single-qubit settings per qubit.
pub fn local_tomography_plan(num_qubits: usize) -> Result<Vec<MeasurementSetting>> {
    if num_qubits == 0 {
        return invalid("local plan needs at least one qubit");
    }
    Ok((0..num_qubits)
        .flat_map(|q| Analyzer::ALL.map(|a| MeasurementSetting { scope: vec![q], analyzers: vec![a] }))
        .collect())
}

/// All `4^N` product settings on every qubit.
pub fn full_tomography_plan(num_qubits: usize) -> Result<Vec<MeasurementSetting>> {
    if num_qubits == 0 {
        return invalid("full plan needs at least one qubit");
    }
    if num_qubits > MAX_QUBITS {
        return Err(Error::ResourceLimit(format!(
            "full tomography on {num_qubits} qubits needs 4^{num_qubits} settings"
        )));
    }
    let scope: Vec<usize> = (0..num_qubits).collect();
    Ok((0..1usize << (2 * num_qubits))
        .map(|code| {
            let analyzers = (0..num_qubits)
                .map(|j| Analyzer::ALL[(code >> (2 * (num_qubits - 1 - j))) & 3])
                .collect();
            MeasurementSetting { scope: scope.clone(), analyzers }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prep::{canonical_three_qubit, ThreeQubitClass};
    use approx::assert_abs_diff_eq;

    fn ghz() -> DensityMatrix {
        canonical_three_qubit(ThreeQubitClass::Ghz).projector()
    }

    #[test]
    fn ghz_z_basis() {
        let s = MeasurementSetting::parse_id("0H1H2H").unwrap();
        let p = outcome_probabilities(&ghz(), &s).unwrap();
        assert_abs_diff_eq!(p[0], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(p[7], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(p[1..7].iter().sum::<f64>(), 0.0, epsilon = 1e-12);
        let single = MeasurementSetting::parse_id("0H").unwrap();
        let p = outcome_probabilities(&ghz(), &single).unwrap();
        assert_abs_diff_eq!(p[0], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(p[1], 0.5, epsilon = 1e-12);
    }

    #[test]
    fn w_z_basis() {
        let w = canonical_three_qubit(ThreeQubitClass::W).projector();
        let p = outcome_probabilities(&w, &MeasurementSetting::parse_id("0H1H2H").unwrap()).unwrap();
        for (k, pk) in p.iter().enumerate() {
            let expected = if [0b001, 0b010, 0b100].contains(&k) { 1.0 / 3.0 } else { 0.0 };
            assert_abs_diff_eq!(*pk, expected, epsilon = 1e-12);
        }
    }

    #[test]
    fn scope_checks() {
        assert!(MeasurementSetting::new(vec![1, 0], vec![Analyzer::H, Analyzer::H]).is_err());
        let s = MeasurementSetting::parse_id("3H").unwrap();
        assert!(outcome_probabilities(&ghz(), &s).is_err());
        assert!(MeasurementSetting::parse_id("0X").is_err());
        assert!(MeasurementSetting::parse_id("H").is_err());
        assert!(MeasurementSetting::parse_id("0H1").is_err());
    }

    #[test]
    fn ids_round_trip() {
        for s in full_tomography_plan(3).unwrap() {
            assert_eq!(MeasurementSetting::parse_id(&s.id()).unwrap(), s);
            for k in 0..s.num_outcomes() {
                assert_eq!(s.parse_outcome(&s.outcome_label(k)).unwrap(), k);
            }
        }
    }

    #[test]
    fn plan_sizes() {
        assert_eq!(local_tomography_plan(1).unwrap().len(), 4);
        assert_eq!(local_tomography_plan(3).unwrap().len(), 12);
        assert_eq!(local_tomography_plan(4).unwrap().len(), 16);
        assert_eq!(full_tomography_plan(2).unwrap().len(), 16);
        assert_eq!(full_tomography_plan(3).unwrap().len(), 64);
        assert_eq!(full_tomography_plan(4).unwrap().len(), 256);
        assert!(matches!(full_tomography_plan(7), Err(Error::ResourceLimit(_))));
    }

    #[test]
    fn complementary_projectors_sum_to_identity() {
        for a in Analyzer::ALL {
            let k0 = a.ket(0);
            let k1 = a.ket(1);
            for i in 0..2 {
                for j in 0..2 {
                    let s = k0[i] * k0[j].conj() + k1[i] * k1[j].conj();
                    let id = if i == j { 1.0 } else { 0.0 };
                    assert_abs_diff_eq!(s.re, id, epsilon = 1e-12);
                    assert_abs_diff_eq!(s.im, 0.0, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn zero_probability_gives_zero_counts() {
        let s = MeasurementSetting::parse_id("0H1H2H").unwrap();
        let rec = simulate_counts(&ghz(), &s, &DetectorModel::ideal(1e4), 3).unwrap();
        assert!(rec.counts[1..7].iter().all(|&n| n == 0));
        assert_eq!(rec, simulate_counts(&ghz(), &s, &DetectorModel::ideal(1e4), 3).unwrap());
    }

    #[test]
    fn detector_validation() {
        assert!(DetectorModel::new(0.0, 1.0, 1.0).is_err());
        assert!(DetectorModel::new(1.2, 1.0, 1.0).is_err());
        assert!(DetectorModel::new(0.5, -1.0, 1.0).is_err());
        assert!(DetectorModel::new(0.5, 1.0, 1.0).is_ok());
    }

    #[test]
    fn coincidence_scaling() {
        let d = DetectorModel::new(0.25, 1000.0, 1.0).unwrap();
        assert_abs_diff_eq!(d.expected_events(4) / d.expected_events(1), 1.0 / 64.0, epsilon = 1e-15);
    }

    #[test]
    fn record_length_is_checked() {
        let s = MeasurementSetting::parse_id("0H").unwrap();
        assert!(CountRecord::new(s, vec![1, 2, 3], None, DetectorModel::default()).is_err());
    }
}
