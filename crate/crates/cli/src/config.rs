//! State sources and experiment configuration.

use std::path::Path;
use std::str::FromStr;

use entpoly::{
    canonical_four_qubit, canonical_three_qubit, prepare_four_qubit, prepare_three_qubit, Complex64, DetectorModel,
    FamilySpec, FourQubitFamily, PureState, ThreeQubitClass, WaveplateConfig3, WaveplateConfig4,
};
use serde::{Deserialize, Serialize};

use crate::args::{PuritySourceArg, RunArgs, StateArgs};
use crate::{config_error, io, Failure};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StateSpec {
    /// Canonical three-qubit representative.
    Class { class: ThreeQubitClass },
    /// Circuit preset named by a three-qubit class or four-qubit family label.
    Preset { name: String },
    Waveplates3(WaveplateConfig3),
    Waveplates4(WaveplateConfig4),
    Family(FamilySpec),
}

impl StateSpec {
    pub fn build(&self) -> Result<PureState, Failure> {
        Ok(match self {
            StateSpec::Class { class } => canonical_three_qubit(*class),
            StateSpec::Preset { name } => {
                if let Ok(class) = ThreeQubitClass::from_str(name) {
                    let cfg = WaveplateConfig3::preset(class).ok_or_else(|| no_preset(name))?;
                    prepare_three_qubit(&cfg)?
                } else if let Ok(family) = FourQubitFamily::from_str(name) {
                    let cfg = WaveplateConfig4::preset(family).ok_or_else(|| no_preset(name))?;
                    prepare_four_qubit(&cfg)?
                } else {
                    return config_error(format!("unknown preset {name:?}"));
                }
            }
            StateSpec::Waveplates3(cfg) => prepare_three_qubit(cfg)?,
            StateSpec::Waveplates4(cfg) => prepare_four_qubit(cfg)?,
            StateSpec::Family(spec) => canonical_four_qubit(spec)?,
        })
    }

    pub fn label(&self) -> String {
        match self {
            StateSpec::Class { class } => class.label().to_string(),
            StateSpec::Preset { name } => name.clone(),
            StateSpec::Waveplates3(_) => "waveplates3".into(),
            StateSpec::Waveplates4(_) => "waveplates4".into(),
            StateSpec::Family(spec) => spec.family.label().to_string(),
        }
    }
}

fn no_preset(name: &str) -> Failure {
    Failure::Config(format!("the circuit has no preset for {name}"))
}

fn parse_list<T: FromStr>(text: &str, what: &str) -> Result<Vec<T>, Failure> {
    text.split(',')
        .map(|s| s.trim().parse::<T>().map_err(|_| Failure::Config(format!("cannot parse {s:?} in {what}"))))
        .collect()
}

pub fn parse_reals(text: &str, what: &str) -> Result<Vec<f64>, Failure> {
    let v: Vec<f64> = parse_list(text, what)?;
    if v.iter().any(|x| !x.is_finite()) {
        return config_error(format!("{what} must be finite"));
    }
    Ok(v)
}

fn parse_complex(text: &str, what: &str) -> Result<Complex64, Failure> {
    Complex64::from_str(text.trim()).map_err(|_| Failure::Config(format!("cannot parse {text:?} in {what}")))
}

fn fixed<const K: usize>(v: Vec<f64>, what: &str) -> Result<[f64; K], Failure> {
    let n = v.len();
    v.try_into().map_err(|_| Failure::Config(format!("{what} needs {K} values, got {n}")))
}

/// Resolves the state flags; exactly one source must be given.
pub fn state_from_args(a: &StateArgs) -> Result<StateSpec, Failure> {
    let given = [
        a.class.is_some(),
        a.preset.is_some(),
        a.waveplates3.is_some(),
        a.waveplates4.is_some(),
        a.angles.is_some(),
        a.family.is_some(),
    ]
    .iter()
    .filter(|x| **x)
    .count();
    if given != 1 {
        return config_error(
            "give exactly one of --class, --preset, --waveplates3, --waveplates4, --angles, --family",
        );
    }
    let angle = |x: f64| if a.degrees { x.to_radians() } else { x };
    if let Some(c) = &a.class {
        return Ok(StateSpec::Class { class: ThreeQubitClass::from_str(c)? });
    }
    if let Some(p) = &a.preset {
        return Ok(StateSpec::Preset { name: p.clone() });
    }
    if let Some(text) = a.waveplates3.as_ref().or(a.waveplates4.as_ref()) {
        let parts: Vec<&str> = text.split(',').collect();
        let four = a.waveplates4.is_some();
        let want = if four { 6 } else { 4 };
        if parts.len() != want {
            return config_error(format!("expected {want} comma-separated values, got {}", parts.len()));
        }
        let alpha = parse_complex(parts[0], "alpha")?;
        let beta = parse_complex(parts[1], "beta")?;
        let rest: Vec<f64> = parse_reals(&parts[2..].join(","), "angles")?.into_iter().map(angle).collect();
        return Ok(if four {
            StateSpec::Waveplates4(WaveplateConfig4::new(alpha, beta, fixed::<4>(rest, "angles")?)?)
        } else {
            StateSpec::Waveplates3(WaveplateConfig3::new(alpha, beta, rest[0], rest[1])?)
        });
    }
    if let Some(text) = &a.angles {
        let m: Vec<f64> = parse_reals(text, "--angles")?.into_iter().map(angle).collect();
        return match m.len() {
            3 => {
                let (alpha, beta) = entpoly::prep::pump_amplitudes(m[0]);
                Ok(StateSpec::Waveplates3(WaveplateConfig3::new(alpha, beta, m[1], m[2])?))
            }
            5 => Ok(StateSpec::Waveplates4(WaveplateConfig4::from_angle_set(fixed::<5>(m, "--angles")?)?)),
            n => config_error(format!("--angles needs 3 or 5 values, got {n}")),
        };
    }
    let family = FourQubitFamily::from_str(a.family.as_deref().expect("one source given"))?;
    let params: Vec<Complex64> =
        a.params.split(',').map(|s| parse_complex(s, "--params")).collect::<Result<_, _>>()?;
    let params: [Complex64; 4] = params
        .try_into()
        .map_err(|_| Failure::Config("--params needs 4 values".into()))?;
    Ok(StateSpec::Family(FamilySpec::new(family, params)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PuritySource {
    Tomography,
    State,
}

impl From<PuritySourceArg> for PuritySource {
    fn from(a: PuritySourceArg) -> Self {
        match a {
            PuritySourceArg::Tomography => Self::Tomography,
            PuritySourceArg::State => Self::State,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub state: StateSpec,
    pub visibility: f64,
    /// `rate * time` is the expected number of events per setting at unit
    /// efficiency.
    pub detector: DetectorModel,
    pub seed: u64,
    pub purity_source: PuritySource,
    pub stat_sigmas: f64,
    /// Monte Carlo trials for the local error bars; 0 disables them.
    pub mc_trials: usize,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), Failure> {
        if !(0.0..=1.0).contains(&self.visibility) {
            return config_error(format!("visibility {} outside [0, 1]", self.visibility));
        }
        self.detector.validate()?;
        if !(self.stat_sigmas >= 0.0 && self.stat_sigmas.is_finite()) {
            return config_error(format!("stat_sigmas {} must be a non-negative number", self.stat_sigmas));
        }
        if self.mc_trials == 1 {
            return config_error("mc_trials must be 0 or at least 2");
        }
        Ok(())
    }

    pub fn from_run_args(a: &RunArgs) -> Result<Self, Failure> {
        let cfg = match &a.config {
            Some(path) => Self::load(path)?,
            None => Self {
                state: state_from_args(&a.state)?,
                visibility: a.visibility,
                detector: DetectorModel::new(a.eta, a.counts, 1.0)?,
                seed: a.seed.ok_or_else(|| Failure::Config("--seed is required".into()))?,
                purity_source: a.purity_source.into(),
                stat_sigmas: a.stat_sigmas,
                mc_trials: a.mc_trials,
            },
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, Failure> {
        io::read_json(path)
    }
}
