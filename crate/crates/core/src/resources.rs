//! Measurement budgets, detection overheads and Monte Carlo error bars.

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::measure::CountRecord;
use crate::seeding;
use crate::tomo::{local_spectrum_from_counts, mle_reconstruct};
use crate::linalg::purity;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum MethodSpec {
    Lpm,
    Fqst,
    Csqst { rank: u32 },
    WitnessA,
    WitnessB,
}

impl MethodSpec {
    pub const ALL_DEFAULT: [MethodSpec; 5] =
        [Self::Lpm, Self::Fqst, Self::Csqst { rank: 1 }, Self::WitnessA, Self::WitnessB];

    pub fn label(&self) -> &'static str {
        match self {
            Self::Lpm => "LPM",
            Self::Fqst => "FQST",
            Self::Csqst { .. } => "CSQST",
            Self::WitnessA => "WITNESS_A",
            Self::WitnessB => "WITNESS_B",
        }
    }

    /// Number of detectors that must fire together for one event.
    pub fn scope(&self, n: usize) -> usize {
        match self {
            Self::Lpm => 1,
            Self::WitnessB => 2,
            _ => n,
        }
    }
}

impl std::str::FromStr for MethodSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "LPM" => Ok(Self::Lpm),
            "FQST" => Ok(Self::Fqst),
            "CSQST" => Ok(Self::Csqst { rank: 1 }),
            "WITNESS_A" | "A" => Ok(Self::WitnessA),
            "WITNESS_B" | "B" => Ok(Self::WitnessB),
            _ => invalid(format!("unknown method {s:?}")),
        }
    }
}

pub fn measurement_count(method: MethodSpec, n: usize) -> Result<u64> {
    if n == 0 {
        return invalid("measurement count needs N >= 1");
    }
    let n64 = n as u64;
    let out = match method {
        MethodSpec::Lpm => Some(4 * n64),
        MethodSpec::Fqst => 4u64.checked_pow(n as u32),
        MethodSpec::Csqst { rank } => {
            if rank == 0 {
                return invalid("CSQST rank must be at least 1");
            }
            2u64.checked_pow(n as u32).and_then(|p| p.checked_mul(rank as u64 * n64 * n64))
        }
        MethodSpec::WitnessA => Some(2),
        MethodSpec::WitnessB => Some(n64 * (n64 - 1)),
    };
    out.ok_or_else(|| Error::ResourceLimit(format!("{} count overflows for N = {n}", method.label())))
}

/// `eta^m R` events per second.
pub fn count_rate(eta: f64, rate: f64, m: usize) -> Result<f64> {
    check_eta(eta)?;
    if !(rate > 0.0) {
        return invalid(format!("rate {rate} must be positive"));
    }
    Ok(eta.powi(m as i32) * rate)
}

fn check_eta(eta: f64) -> Result<()> {
    if !(eta > 0.0 && eta <= 1.0) {
        return invalid(format!("efficiency {eta} outside (0, 1]"));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OverheadReport {
    pub method: MethodSpec,
    pub num_qubits: usize,
    pub eta: f64,
    pub measurements: u64,
    pub efficiency: f64,
    pub overhead: f64,
}

/// `measurements / eta^scope`.
pub fn overhead(method: MethodSpec, n: usize, eta: f64) -> Result<OverheadReport> {
    check_eta(eta)?;
    let measurements = measurement_count(method, n)?;
    let efficiency = eta.powi(method.scope(n) as i32);
    Ok(OverheadReport {
        method,
        num_qubits: n,
        eta,
        measurements,
        efficiency,
        overhead: measurements as f64 / efficiency,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WitnessKind {
    A,
    B,
}

/// Efficiency below which the local method needs less overhead than the
/// witness; `1` means it always does.
pub fn crossing_efficiency(n: usize, witness: WitnessKind) -> Result<f64> {
    if n < 2 {
        return invalid("crossing efficiency needs N >= 2");
    }
    let nf = n as f64;
    Ok(match witness {
        WitnessKind::A => (2.0 * nf).powf(-1.0 / (nf - 1.0)),
        WitnessKind::B => ((nf - 1.0) / 4.0).min(1.0),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorEstimate {
    /// Statistic of the observed records.
    pub point: Vec<f64>,
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
    pub trials: usize,
    pub aborted: usize,
    pub seed: u64,
}

/// Fraction of aborted trials above which the estimate is refused.
pub const MAX_ABORTED_FRACTION: f64 = 0.10;

fn resample<R: Rng + ?Sized>(records: &[CountRecord], rng: &mut R) -> Vec<CountRecord> {
    records
        .iter()
        .map(|r| {
            let mut out = r.clone();
            for n in out.counts.iter_mut() {
                if *n > 0 {
                    *n = Poisson::new(*n as f64).expect("positive mean").sample(rng) as u64;
                }
            }
            out
        })
        .collect()
}

/// Poisson-resampling Monte Carlo of any statistic of the records.
///
/// Trial `t` draws from stream `t`; statistics are aggregated in trial order,
/// so the result does not depend on thread scheduling.
pub fn monte_carlo<F>(records: &[CountRecord], trials: usize, seed: u64, statistic: F) -> Result<ErrorEstimate>
where
    F: Fn(&[CountRecord]) -> Result<Vec<f64>> + Sync,
{
    if trials < 2 {
        return invalid(format!("need at least 2 trials, got {trials}"));
    }
    let point = statistic(records)?;
    let outcomes: Vec<Option<Vec<f64>>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = seeding::stream(seed, t as u64);
            statistic(&resample(records, &mut rng)).ok().filter(|v| v.len() == point.len())
        })
        .collect();
    let ok: Vec<&Vec<f64>> = outcomes.iter().flatten().collect();
    let aborted = trials - ok.len();
    if aborted as f64 > MAX_ABORTED_FRACTION * trials as f64 || ok.len() < 2 {
        return Err(Error::UnreliableEstimate { aborted, trials });
    }
    let k = ok.len() as f64;
    let dims = point.len();
    let mut mean = vec![0.0; dims];
    let mut std = vec![0.0; dims];
    for d in 0..dims {
        let mut col: Vec<f64> = ok.iter().map(|v| v[d]).collect();
        col.sort_by(f64::total_cmp);
        let m = col.iter().sum::<f64>() / k;
        let var = col.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (k - 1.0);
        mean[d] = m;
        std[d] = var.sqrt();
    }
    Ok(ErrorEstimate { point, mean, std, trials, aborted, seed })
}

/// Local spectrum error bars from single-qubit records.
pub fn monte_carlo_spectrum(records: &[CountRecord], trials: usize, seed: u64) -> Result<ErrorEstimate> {
    monte_carlo(records, trials, seed, |r| Ok(local_spectrum_from_counts(r)?.lambdas))
}

/// Purity error bar from global records on `dim`-dimensional states.
pub fn monte_carlo_purity(records: &[CountRecord], dim: usize, trials: usize, seed: u64) -> Result<ErrorEstimate> {
    monte_carlo(records, trials, seed, |r| Ok(vec![purity(&mle_reconstruct(r, dim)?.rho)]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn counts() {
        assert_eq!(measurement_count(MethodSpec::Lpm, 4).unwrap(), 16);
        assert_eq!(measurement_count(MethodSpec::Fqst, 4).unwrap(), 256);
        assert_eq!(measurement_count(MethodSpec::WitnessB, 4).unwrap(), 12);
        assert_eq!(measurement_count(MethodSpec::WitnessA, 9).unwrap(), 2);
        assert_eq!(measurement_count(MethodSpec::Csqst { rank: 2 }, 3).unwrap(), 2 * 9 * 8);
        assert!(measurement_count(MethodSpec::Csqst { rank: 0 }, 3).is_err());
        assert!(matches!(measurement_count(MethodSpec::Fqst, 40), Err(Error::ResourceLimit(_))));
    }

    #[test]
    fn rates_and_overheads() {
        assert_abs_diff_eq!(count_rate(0.5, 1000.0, 2).unwrap(), 250.0);
        assert_abs_diff_eq!(count_rate(1.0, 77.0, 5).unwrap(), 77.0);
        assert_abs_diff_eq!(overhead(MethodSpec::Lpm, 4, 0.5).unwrap().overhead, 32.0, epsilon = 1e-12);
        assert_abs_diff_eq!(overhead(MethodSpec::WitnessA, 4, 0.5).unwrap().overhead, 32.0, epsilon = 1e-12);
        assert_abs_diff_eq!(overhead(MethodSpec::WitnessB, 4, 0.75).unwrap().overhead, 64.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(overhead(MethodSpec::Lpm, 8, 1.0).unwrap().overhead, 32.0);
        assert!(overhead(MethodSpec::Lpm, 4, 0.0).is_err());
    }

    #[test]
    fn crossings() {
        assert_abs_diff_eq!(crossing_efficiency(4, WitnessKind::A).unwrap(), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(crossing_efficiency(4, WitnessKind::B).unwrap(), 0.75, epsilon = 1e-15);
        assert_eq!(crossing_efficiency(9, WitnessKind::B).unwrap(), 1.0);
        for n in 2..12 {
            let e = crossing_efficiency(n, WitnessKind::A).unwrap();
            let lhs = 4.0 * n as f64 / e;
            let rhs = 2.0 * e.powi(-(n as i32));
            assert!((lhs - rhs).abs() / rhs < 1e-12);
        }
    }

    #[test]
    fn monte_carlo_needs_two_trials() {
        assert!(monte_carlo(&[], 1, 0, |_| Ok(vec![0.0])).is_err());
    }

    #[test]
    fn failing_statistic_is_unreliable() {
        let r = monte_carlo(&[], 10, 0, |r| if r.is_empty() { Ok(vec![1.0]) } else { Ok(vec![]) });
        // Empty record sets always succeed; the statistic is constant.
        let e = r.unwrap();
        assert_eq!(e.std, vec![0.0]);
        let bad = monte_carlo(&[], 10, 0, {
            let calls = std::sync::atomic::AtomicUsize::new(0);
            move |_| {
                if calls.fetch_add(1, std::sync::atomic::Ordering::SeqCst) == 0 {
                    Ok(vec![1.0])
                } else {
                    Err(Error::Numeric("boom".into()))
                }
            }
        });
        assert!(matches!(bad, Err(Error::UnreliableEstimate { aborted: 10, trials: 10 })));
    }

    #[test]
    fn methods_parse() {
        assert_eq!("lpm".parse::<MethodSpec>().unwrap(), MethodSpec::Lpm);
        assert_eq!("WITNESS_B".parse::<MethodSpec>().unwrap(), MethodSpec::WitnessB);
        assert!("x".parse::<MethodSpec>().is_err());
    }
}
