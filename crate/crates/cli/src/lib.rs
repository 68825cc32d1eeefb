//! Experiment drivers behind the `eof` binary.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use eof_core::entanglement::{self, ConvexRoofConfig, PairLabels};
use eof_core::families::{self, Condition, ConditionReport, FamilyParams};
use eof_core::qstate::{self, StateFile};
use eof_core::sampling::{self, RngStream};
use eof_core::{Bipartition, PureState, SubsystemLayout};
use rayon::prelude::*;
use serde::Serialize;

/// Below this a sampled `ΔE_F` is treated as a bug rather than round-off.
pub const HARD_NEGATIVE: f64 = -1e-6;

/// Reference values for the counterexample and the allowed deviation.
pub const COUNTEREXAMPLE_S: f64 = 1.25163;
pub const COUNTEREXAMPLE_R: f64 = 1.333333;
pub const COUNTEREXAMPLE_EOF_SUM: f64 = 0.374597;
pub const COUNTEREXAMPLE_DELTA: f64 = 0.877033;
pub const COUNTEREXAMPLE_TOLERANCE: f64 = 2e-4;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("counterexample values deviate from the reference: {0}")]
    Deviation(String),
    #[error("sample {index} has ΔE_F = {value:e}; state written to {}", dump.display())]
    NegativeDelta { index: u64, value: f64, dump: PathBuf },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Validation(_) | Self::NegativeDelta { .. } => 1,
            Self::Io { .. } => 2,
            Self::Deviation(_) => 3,
        }
    }

    fn io(path: &Path, source: std::io::Error) -> Self {
        Self::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

impl From<eof_core::Error> for CliError {
    fn from(e: eof_core::Error) -> Self {
        Self::Validation(e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SampleFamily {
    #[value(name = "random")]
    RandomFourQubit,
    #[value(name = "symmetric")]
    SymmetricFourQubit,
}

impl SampleFamily {
    pub fn name(self) -> &'static str {
        match self {
            Self::RandomFourQubit => "random",
            Self::SymmetricFourQubit => "symmetric",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub family: SampleFamily,
    pub samples: usize,
    pub bins: usize,
    pub seed: u64,
    pub workers: usize,
    pub output_path: PathBuf,
}

impl ExperimentConfig {
    pub fn new(family: SampleFamily, output_path: impl Into<PathBuf>) -> Self {
        Self {
            family,
            samples: 50_000,
            bins: 30,
            seed: 0,
            workers: default_workers(),
            output_path: output_path.into(),
        }
    }

    pub fn validate(&self) -> CliResult<()> {
        if self.samples == 0 {
            return Err(CliError::Validation("samples must be at least 1".into()));
        }
        if self.bins == 0 {
            return Err(CliError::Validation("bins must be at least 1".into()));
        }
        if self.workers == 0 {
            return Err(CliError::Validation("workers must be at least 1".into()));
        }
        Ok(())
    }
}

pub fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HistogramResult {
    pub bin_edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub probabilities: Vec<f64>,
    pub min_delta: f64,
    pub max_delta: f64,
    pub negative_count: u64,
}

/// Sample `index` of a histogram run, labeled `A1 B1 A2 B2`.
pub fn sample_state(family: SampleFamily, seed: u64, index: u64) -> PureState {
    let mut rng = RngStream::new(seed, index);
    let layout = SubsystemLayout::four_party([2; 4]).expect("qubit layout");
    match family {
        SampleFamily::RandomFourQubit => sampling::haar_random_pure(&layout, &mut rng),
        SampleFamily::SymmetricFourQubit => sampling::haar_random_symmetric(4, &mut rng)
            .and_then(|psi| psi.relabel(layout))
            .expect("four-qubit symmetric state"),
    }
}

/// `ΔE_F` of every sample, in index order.
pub fn sample_deltas(config: &ExperimentConfig) -> CliResult<Vec<f64>> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| CliError::Validation(format!("thread pool: {e}")))?;
    let deltas = pool.install(|| {
        (0..config.samples as u64)
            .into_par_iter()
            .map(|i| entanglement::delta_ef(&sample_state(config.family, config.seed, i)))
            .collect::<eof_core::Result<Vec<f64>>>()
    })?;
    Ok(deltas)
}

/// Equal-width bins over `[0, max]`; negative values land in bin 0.
pub fn bin_deltas(deltas: &[f64], bins: usize) -> HistogramResult {
    let min_delta = deltas.iter().copied().fold(f64::INFINITY, f64::min);
    let max_delta = deltas.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let upper = if max_delta > 0.0 { max_delta } else { 1.0 };
    let bin_edges: Vec<f64> = (0..=bins).map(|k| upper * k as f64 / bins as f64).collect();
    let mut counts = vec![0u64; bins];
    let mut negative_count = 0;
    for &d in deltas {
        if d < 0.0 {
            negative_count += 1;
        }
        let k = ((d.max(0.0) / upper) * bins as f64) as usize;
        counts[k.min(bins - 1)] += 1;
    }
    let n = deltas.len() as f64;
    let probabilities = counts.iter().map(|&c| c as f64 / n).collect();
    HistogramResult {
        bin_edges,
        counts,
        probabilities,
        min_delta,
        max_delta,
        negative_count,
    }
}

pub fn histogram_csv(result: &HistogramResult, config: &ExperimentConfig) -> String {
    let mut out = format!(
        "# family={} samples={} seed={} min={} max={} negatives={}\n",
        config.family.name(),
        config.samples,
        config.seed,
        result.min_delta,
        result.max_delta,
        result.negative_count
    );
    out.push_str("bin_lo,bin_hi,count,probability\n");
    for (k, (&count, &p)) in result.counts.iter().zip(&result.probabilities).enumerate() {
        let _ = writeln!(out, "{},{},{},{}", result.bin_edges[k], result.bin_edges[k + 1], count, p);
    }
    out
}

fn offending_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".offending.json");
    PathBuf::from(name)
}

/// Samples, bins and writes the CSV to `config.output_path`.
pub fn run_delta_histogram(config: &ExperimentConfig) -> CliResult<HistogramResult> {
    let deltas = sample_deltas(config)?;
    if let Some((index, &value)) = deltas.iter().enumerate().find(|(_, &d)| d < HARD_NEGATIVE) {
        let index = index as u64;
        let psi = sample_state(config.family, config.seed, index);
        let dump = offending_path(&config.output_path);
        fs::write(&dump, StateFile::Pure(psi).to_json()).map_err(|e| CliError::io(&dump, e))?;
        return Err(CliError::NegativeDelta { index, value, dump });
    }
    let result = bin_deltas(&deltas, config.bins);
    fs::write(&config.output_path, histogram_csv(&result, config))
        .map_err(|e| CliError::io(&config.output_path, e))?;
    Ok(result)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CounterexampleReport {
    #[serde(rename = "S_A1A2")]
    pub s_a1a2: f64,
    #[serde(rename = "R_chi")]
    pub r_chi: f64,
    pub eof_sum: f64,
    pub delta_ef: f64,
}

impl CounterexampleReport {
    /// Quantities outside the reference tolerance, as readable lines.
    pub fn deviations(&self) -> Vec<String> {
        [
            ("S_A1A2", self.s_a1a2, COUNTEREXAMPLE_S),
            ("R_chi", self.r_chi, COUNTEREXAMPLE_R),
            ("eof_sum", self.eof_sum, COUNTEREXAMPLE_EOF_SUM),
            ("delta_ef", self.delta_ef, COUNTEREXAMPLE_DELTA),
        ]
        .into_iter()
        .filter(|(_, got, want)| (got - want).abs() > COUNTEREXAMPLE_TOLERANCE)
        .map(|(name, got, want)| format!("{name} = {got} (expected {want})"))
        .collect()
    }

    pub fn to_text(&self) -> String {
        format!(
            "S(rho_A1A2)            = {:.6}\nR(chi)                 = {:.6}\nEoF(A1B1) + EoF(A2B2)  = {:.6}\nDelta E_F              = {:.6}\n",
            self.s_a1a2, self.r_chi, self.eof_sum, self.delta_ef
        )
    }
}

pub fn verify_counterexample() -> CliResult<CounterexampleReport> {
    let chi = families::counterexample_chi();
    let terms = entanglement::delta_ef_terms(&chi)?;
    let r = entanglement::r_quantity(&chi, &PairLabels::default())?;
    Ok(CounterexampleReport {
        s_a1a2: terms.global,
        r_chi: r,
        eof_sum: terms.first_pair + terms.second_pair,
        delta_ef: terms.delta,
    })
}

/// Reads a state file, or family parameters if the object has a `"family"` key.
pub fn load_input(path: &Path) -> CliResult<StateFile> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let parsed = parse_input(&text).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    Ok(parsed)
}

pub fn parse_input(text: &str) -> eof_core::Result<StateFile> {
    let is_family = serde_json::from_str::<serde_json::Value>(text)
        .ok()
        .is_some_and(|v| v.get("family").is_some());
    if is_family {
        FamilyParams::from_json(text)?.build()
    } else {
        qstate::parse_state(text)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckOutput {
    pub reports: Vec<ConditionReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_ef: Option<f64>,
}

pub fn check_state(state: &StateFile, conditions: &[Condition]) -> CliResult<CheckOutput> {
    if !state.layout().is_four_party() {
        return Err(CliError::Validation(format!(
            "expected subsystems A1, B1, A2, B2, got {:?}",
            state.layout().labels()
        )));
    }
    let mut reports = Vec::new();
    for &condition in conditions {
        let report = match (condition, state) {
            (Condition::One, StateFile::Pure(psi)) => families::check_condition1(psi)?,
            (Condition::Two, StateFile::Pure(psi)) => families::check_condition2(psi)?,
            (Condition::Three, _) => families::check_condition3(state)?,
            (c, StateFile::Mixed(_)) => {
                return Err(CliError::Validation(format!(
                    "condition {} is defined for pure states only",
                    c.number()
                )))
            }
        };
        reports.push(report);
    }
    let delta_ef = match state {
        StateFile::Pure(psi) if psi.layout().dims() == [2, 2, 2, 2] => Some(entanglement::delta_ef(psi)?),
        _ => None,
    };
    Ok(CheckOutput { reports, delta_ef })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EofMethod {
    PureState,
    Wootters,
    ConvexRoof,
}

#[derive(Debug, Clone, Serialize)]
pub struct EofOutput {
    pub value: f64,
    pub method: EofMethod,
    /// False when `value` is only an upper bound.
    pub exact: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub converged: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ensemble_probabilities: Option<Vec<f64>>,
}

/// EoF across `side | rest`. Pure states use the entropy of entanglement,
/// two-qubit states the concurrence formula, and everything else the
/// convex-roof optimizer.
pub fn eof_state(state: &StateFile, side: &[String], config: &ConvexRoofConfig) -> CliResult<EofOutput> {
    let cut = Bipartition::new(state.layout(), side)?;
    if let StateFile::Pure(psi) = state {
        return Ok(EofOutput {
            value: entanglement::pure_state_eof(psi, &cut)?,
            method: EofMethod::PureState,
            exact: true,
            converged: None,
            ensemble_probabilities: None,
        });
    }
    let rho = state.density();
    if rho.layout().dims() == [2, 2] {
        return Ok(EofOutput {
            value: entanglement::eof_two_qubit(&rho)?,
            method: EofMethod::Wootters,
            exact: true,
            converged: None,
            ensemble_probabilities: None,
        });
    }
    let res = entanglement::convex_roof_eof_upper(&rho, &cut, config)?;
    Ok(EofOutput {
        value: res.value,
        method: EofMethod::ConvexRoof,
        exact: false,
        converged: Some(res.converged),
        ensemble_probabilities: Some(res.ensemble.probabilities),
    })
}
