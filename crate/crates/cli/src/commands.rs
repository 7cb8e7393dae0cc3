//! Subcommand implementations. Each returns the text printed on stdout.

use std::path::Path;

use entpoly::resources::monte_carlo_spectrum;
use entpoly::witness::epsilon_bound;
use entpoly::{
    classify, crossing_efficiency, fidelity, full_tomography_plan, local_max_eigenvalues, local_spectrum_from_counts,
    local_tomography_plan, mix_white_noise, mle_reconstruct, overhead as overhead_of, project_for_plot, purity,
    simulate_plan, CountRecord, DetectorModel, LocalSpectrum, MethodSpec, NoiseBound, OverheadReport, Verdict,
    WitnessKind,
};
use serde::{Deserialize, Serialize};

use crate::args::{
    Format, MeasureArgs, OverheadArgs, PlanKind, PrepareArgs, ReconstructArgs, ReconstructMode, RunArgs, WitnessArgs,
};
use crate::config::{parse_reals, state_from_args, ExperimentConfig, PuritySource};
use crate::io::{self, canonical_json, fmt_num, Bundle, DensityFile};
use crate::{config_error, AtStage, CliResult, Failure};

/// Seed for an independent sub-computation `index` of a run.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    seed ^ (index + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

const MEASURE_STREAM: u64 = 0;
const GLOBAL_STREAM: u64 = 1;
const MC_STREAM: u64 = 2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub seed: Option<u64>,
    pub config_hash: String,
}

impl Provenance {
    pub fn new<T: Serialize>(command: &str, seed: Option<u64>, config: &T) -> Result<Self, Failure> {
        Ok(Self {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            seed,
            config_hash: io::config_hash(config)?,
        })
    }
}

fn summary(paths: &[std::path::PathBuf]) -> String {
    paths.iter().map(|p| format!("wrote {}\n", p.display())).collect()
}

pub fn prepare(a: &PrepareArgs) -> CliResult<String> {
    let spec = state_from_args(&a.state).at("config")?;
    let psi = spec.build().at("prepare")?;
    let rho = mix_white_noise(&psi, a.visibility).at("prepare")?;
    let mut bundle = Bundle::default();
    let text = canonical_json(&DensityFile::from_density(&rho), false).at("report")?;
    bundle.add(a.out_dir.join("state.json"), text);
    Ok(summary(&bundle.commit().at("report")?))
}

pub fn measure(a: &MeasureArgs) -> CliResult<String> {
    let seed = a.seed.ok_or_else(|| Failure::Config("--seed is required".into())).at("config")?;
    let detector = DetectorModel::new(a.eta, a.counts, 1.0).at("config")?;
    let rho = io::read_json::<DensityFile>(&a.state).and_then(|f| f.to_density()).at("input")?;
    let n = rho.num_qubits();
    let plan = match a.plan {
        PlanKind::Local => local_tomography_plan(n),
        PlanKind::Full => full_tomography_plan(n),
    }
    .at("measure")?;
    let records = simulate_plan(&rho, &plan, &detector, seed).at("measure")?;
    let mut bundle = Bundle::default();
    match a.format {
        Format::Csv => bundle.add(a.out_dir.join("counts.csv"), io::counts_to_csv(&records).at("report")?),
        Format::Json => bundle.add(a.out_dir.join("counts.json"), canonical_json(&records, false).at("report")?),
    }
    Ok(summary(&bundle.commit().at("report")?))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumFile {
    pub lambdas: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub std_errors: Option<Vec<f64>>,
}

#[derive(Debug, Serialize)]
struct GlobalSummary {
    num_qubits: usize,
    log_likelihood: f64,
    iterations: usize,
    converged: bool,
    purity: f64,
    local_spectrum: Vec<f64>,
}

pub fn reconstruct(a: &ReconstructArgs) -> CliResult<String> {
    let records = io::counts_from_csv(&a.input).at("input")?;
    let local = match a.mode {
        ReconstructMode::Auto => records.iter().all(|r| r.setting.scope().len() == 1),
        ReconstructMode::Local => true,
        ReconstructMode::Global => false,
    };
    let mut bundle = Bundle::default();
    let out = if local {
        let spectrum = local_spectrum_from_counts(&records).at("reconstruct")?;
        let std_errors = if a.mc_trials > 0 {
            let seed = a.seed.ok_or_else(|| Failure::Config("--seed is required with --mc-trials".into())).at("config")?;
            Some(monte_carlo_spectrum(&records, a.mc_trials, seed).at("reconstruct")?.std)
        } else {
            None
        };
        let file = SpectrumFile { lambdas: spectrum.lambdas, std_errors };
        let text = canonical_json(&file, false).at("report")?;
        bundle.add(a.out_dir.join("spectrum.json"), text.clone());
        text
    } else {
        let n = global_qubits(&records).at("reconstruct")?;
        let res = mle_reconstruct(&records, 1 << n).at("reconstruct")?;
        bundle.add(a.out_dir.join("rho.json"), canonical_json(&DensityFile::from_density(&res.rho), false).at("report")?);
        let s = GlobalSummary {
            num_qubits: n,
            log_likelihood: res.log_likelihood,
            iterations: res.iterations,
            converged: res.converged,
            purity: purity(&res.rho),
            local_spectrum: local_max_eigenvalues(&res.rho),
        };
        canonical_json(&s, true).at("report")?
    };
    bundle.commit().at("report")?;
    Ok(out)
}

fn global_qubits(records: &[CountRecord]) -> Result<usize, Failure> {
    let n = records.iter().map(|r| r.setting.scope().len()).max().unwrap_or(0);
    if n == 0 || records.iter().any(|r| r.setting.scope() != (0..n).collect::<Vec<_>>().as_slice()) {
        return config_error("global reconstruction needs every setting to cover all qubits 0..N");
    }
    Ok(n)
}

fn bound_from(n: usize, purity_arg: Option<f64>, eps: Option<f64>) -> Result<NoiseBound, Failure> {
    match (eps, purity_arg) {
        (Some(e), _) => Ok(NoiseBound::from_epsilon(n, e)?),
        (None, Some(p)) => Ok(epsilon_bound(n, p)?),
        (None, None) => Ok(NoiseBound::exact(n)),
    }
}

fn verdict_csv(v: &Verdict) -> String {
    let mut s = String::from("statement,feasible,epsilon,facet,margin\n");
    for m in &v.margins {
        s.push_str(&format!("{},{},{},{},{}\n", v.statement, v.feasible, fmt_num(v.epsilon.epsilon), m.facet, fmt_num(m.value)));
    }
    if v.margins.is_empty() {
        s.push_str(&format!("{},{},{},,\n", v.statement, v.feasible, fmt_num(v.epsilon.epsilon)));
    }
    s
}

pub fn witness(a: &WitnessArgs) -> CliResult<String> {
    let file = match (&a.lambdas, &a.spectrum) {
        (Some(text), None) => SpectrumFile { lambdas: parse_reals(text, "--lambdas").at("config")?, std_errors: None },
        (None, Some(path)) => io::read_json::<SpectrumFile>(path).at("input")?,
        _ => return config_error("give exactly one of --lambdas, --spectrum").at("config"),
    };
    let mut spectrum = LocalSpectrum::new(file.lambdas).at("config")?;
    if let Some(e) = file.std_errors {
        spectrum = spectrum.with_errors(e).at("config")?;
    }
    let bound = bound_from(spectrum.len(), a.purity, a.epsilon).at("witness")?;
    let verdict = classify(&spectrum, &bound, a.stat_sigmas).at("witness")?;
    let json = canonical_json(&verdict, true).at("report")?;
    if let Some(dir) = &a.out_dir {
        let mut bundle = Bundle::default();
        bundle.add(dir.join("verdict.json"), json.clone());
        bundle.commit().at("report")?;
    }
    Ok(match a.format {
        Format::Json => json,
        Format::Csv => verdict_csv(&verdict),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub num_qubits: usize,
    pub witness: WitnessKind,
    pub efficiency: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverheadTable {
    pub rows: Vec<OverheadReport>,
    pub crossings: Vec<Crossing>,
}

pub fn overhead_table(qubits: &[usize], etas: &[f64], methods: &[MethodSpec]) -> Result<OverheadTable, Failure> {
    let mut rows = Vec::new();
    let mut crossings = Vec::new();
    for &n in qubits {
        for &eta in etas {
            for &m in methods {
                rows.push(overhead_of(m, n, eta)?);
            }
        }
        if n >= 2 {
            for w in [WitnessKind::A, WitnessKind::B] {
                crossings.push(Crossing { num_qubits: n, witness: w, efficiency: crossing_efficiency(n, w)? });
            }
        }
    }
    Ok(OverheadTable { rows, crossings })
}

pub fn overhead_csv(t: &OverheadTable) -> String {
    let mut s = String::from("method,num_qubits,eta,measurements,efficiency,overhead\n");
    for r in &t.rows {
        s.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.method.label(),
            r.num_qubits,
            fmt_num(r.eta),
            r.measurements,
            fmt_num(r.efficiency),
            fmt_num(r.overhead)
        ));
    }
    s
}

pub fn overhead(a: &OverheadArgs) -> CliResult<String> {
    let qubits: Vec<usize> = a
        .qubits
        .split(',')
        .map(|s| s.trim().parse().map_err(|_| Failure::Config(format!("bad qubit number {s:?}"))))
        .collect::<Result<_, _>>()
        .at("config")?;
    let etas = parse_reals(&a.eta, "--eta").at("config")?;
    let methods: Vec<MethodSpec> =
        a.methods.split(',').map(|s| s.trim().parse::<MethodSpec>()).collect::<Result<_, _>>().at("config")?;
    let table = overhead_table(&qubits, &etas, &methods).at("overhead")?;
    let json = canonical_json(&table, true).at("report")?;
    let csv = overhead_csv(&table);
    if let Some(dir) = &a.out_dir {
        let mut bundle = Bundle::default();
        bundle.add(dir.join("overhead.json"), json.clone());
        bundle.add(dir.join("overhead.csv"), csv.clone());
        bundle.commit().at("report")?;
    }
    Ok(match a.format {
        Format::Json => json,
        Format::Csv => csv,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    /// Spectrum of the simulated local counts.
    pub lambdas: Vec<f64>,
    pub std_errors: Option<Vec<f64>>,
    /// Spectrum of the noiseless target state.
    pub ideal: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PurityReport {
    /// Value fed into the epsilon bound.
    pub value: f64,
    pub source: PuritySource,
    /// Exact purity of the simulated state.
    pub state: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FidelityReport {
    /// Fidelity of the simulated noisy state to the target.
    pub state: f64,
    /// Fidelity of the global reconstruction, when one was made.
    pub reconstruction: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub provenance: Provenance,
    pub config: ExperimentConfig,
    pub label: String,
    pub num_qubits: usize,
    pub spectrum: SpectrumReport,
    pub purity: PurityReport,
    pub verdict: Verdict,
    pub fidelity: FidelityReport,
    /// `(lambda_i + lambda_j, lambda_k)` for three qubits.
    pub projection: Option<[f64; 2]>,
    pub overhead: Vec<OverheadReport>,
}

/// Runs the whole pipeline in memory.
pub fn execute_run(cfg: &ExperimentConfig) -> CliResult<RunReport> {
    cfg.validate().at("config")?;
    let psi = cfg.state.build().at("prepare")?;
    let n = psi.num_qubits();
    let rho = mix_white_noise(&psi, cfg.visibility).at("prepare")?;

    let local_plan = local_tomography_plan(n).at("measure")?;
    let records = simulate_plan(&rho, &local_plan, &cfg.detector, derive_seed(cfg.seed, MEASURE_STREAM)).at("measure")?;
    let mut spectrum = local_spectrum_from_counts(&records).at("reconstruct")?;
    let std_errors = if cfg.mc_trials > 0 {
        let e = monte_carlo_spectrum(&records, cfg.mc_trials, derive_seed(cfg.seed, MC_STREAM)).at("reconstruct")?;
        spectrum = spectrum.with_errors(e.std.clone()).at("reconstruct")?;
        Some(e.std)
    } else {
        None
    };

    let state_purity = purity(&rho);
    let (purity_value, reconstruction) = match cfg.purity_source {
        PuritySource::State => (state_purity, None),
        PuritySource::Tomography => {
            let plan = full_tomography_plan(n).at("measure")?;
            let global = simulate_plan(&rho, &plan, &cfg.detector, derive_seed(cfg.seed, GLOBAL_STREAM)).at("measure")?;
            let res = mle_reconstruct(&global, 1 << n).at("reconstruct")?;
            (purity(&res.rho), Some(fidelity(&res.rho, &psi).at("reconstruct")?))
        }
    };
    let bound = epsilon_bound(n, purity_value).at("witness")?;
    let verdict = classify(&spectrum, &bound, cfg.stat_sigmas).at("witness")?;
    let projection = if n == 3 { Some(project_for_plot(&spectrum).at("witness")?.into()) } else { None };
    let overhead = MethodSpec::ALL_DEFAULT
        .iter()
        .map(|&m| overhead_of(m, n, cfg.detector.eta))
        .collect::<Result<Vec<_>, _>>()
        .at("overhead")?;

    Ok(RunReport {
        provenance: Provenance::new("run", Some(cfg.seed), cfg).at("report")?,
        config: cfg.clone(),
        label: cfg.state.label(),
        num_qubits: n,
        spectrum: SpectrumReport {
            lambdas: spectrum.lambdas.clone(),
            std_errors,
            ideal: local_max_eigenvalues(&psi.projector()),
        },
        purity: PurityReport { value: purity_value, source: cfg.purity_source, state: state_purity },
        verdict,
        fidelity: FidelityReport { state: fidelity(&rho, &psi).at("reconstruct")?, reconstruction },
        projection,
        overhead,
    })
}

/// Plot tables; every value is taken from the (rounded) report.
pub fn run_csvs(report: &RunReport) -> Vec<(&'static str, String)> {
    let mut spectrum = String::from("qubit,lambda,std_error,ideal\n");
    for (k, l) in report.spectrum.lambdas.iter().enumerate() {
        let se = report.spectrum.std_errors.as_ref().map(|s| fmt_num(s[k])).unwrap_or_default();
        spectrum.push_str(&format!("{k},{},{se},{}\n", fmt_num(*l), fmt_num(report.spectrum.ideal[k])));
    }
    let mut purity = String::from("label,purity,purity_source,state_purity,fidelity_state,fidelity_reconstruction\n");
    purity.push_str(&format!(
        "{},{},{},{},{},{}\n",
        report.label,
        fmt_num(report.purity.value),
        match report.purity.source {
            PuritySource::State => "state",
            PuritySource::Tomography => "tomography",
        },
        fmt_num(report.purity.state),
        fmt_num(report.fidelity.state),
        report.fidelity.reconstruction.map(fmt_num).unwrap_or_default()
    ));
    let mut out = vec![("spectrum.csv", spectrum), ("purity.csv", purity)];
    if let Some([x, y]) = report.projection {
        out.push(("projection.csv", format!("label,x,y,statement\n{},{},{},\"{}\"\n", report.label, fmt_num(x), fmt_num(y), report.verdict.statement)));
    }
    out
}

pub fn write_run(report: &RunReport, out_dir: &Path) -> CliResult<Vec<std::path::PathBuf>> {
    let mut bundle = Bundle::default();
    bundle.add(out_dir.join("report.json"), canonical_json(report, true).at("report")?);
    for (name, text) in run_csvs(report) {
        bundle.add(out_dir.join(name), text);
    }
    bundle.commit().at("report")
}

pub fn run(a: &RunArgs) -> CliResult<String> {
    let cfg = ExperimentConfig::from_run_args(a).at("config")?;
    let report = execute_run(&cfg)?;
    write_run(&report, &a.out_dir)?;
    Ok(match a.format {
        Format::Json => canonical_json(&report.verdict, true).at("report")?,
        Format::Csv => run_csvs(&report).into_iter().map(|(_, t)| t).collect::<Vec<_>>().join("\n"),
    })
}
