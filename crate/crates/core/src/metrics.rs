//! Error metrics and the benchmark harness.
//!
//! [`absolute_error`] is the L1 distance between noisy and exact answers;
//! [`relative_error`] divides it by the exact answer magnitude (guarded by
//! `max(.., 1)` so all-zero answers stay finite). [`run_experiment`] sweeps
//! mechanism x workload x domain x ε grids over a fixed dataset, one seed
//! substream per trial, and produces rows that serialize to a stable CSV:
//! rerunning a spec with the same base seed reproduces the bytes exactly.

use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::{build_data_vector, parse_table, DataVector, Domain, TableSchema};
use crate::error::{Error, Result};
use crate::mechanisms::{self, PrivacyParams, Strategy};
use crate::rng::{RngSeed, SplitMix64};
use crate::workload::{all_range, evaluate, k_way_marginal, Workload, WorkloadKind};

/// `sum_q |r'[q] - r[q]|`.
pub fn absolute_error(noisy: &[f64], exact: &[f64]) -> Result<f64> {
    if noisy.len() != exact.len() {
        return Err(Error::DimensionMismatch(format!(
            "answer vectors differ in length: {} vs {}",
            noisy.len(),
            exact.len()
        )));
    }
    Ok(noisy.iter().zip(exact).map(|(a, b)| (a - b).abs()).sum())
}

/// `absolute_error / max(||r||_1, 1)`, plus whether the guard clamped the
/// denominator (true answers summing below one record).
pub fn relative_error_guarded(noisy: &[f64], exact: &[f64]) -> Result<(f64, bool)> {
    let abs = absolute_error(noisy, exact)?;
    let magnitude: f64 = exact.iter().map(|v| v.abs()).sum();
    let guarded = magnitude < 1.0;
    Ok((abs / magnitude.max(1.0), guarded))
}

/// `absolute_error / max(||r||_1, 1)`.
pub fn relative_error(noisy: &[f64], exact: &[f64]) -> Result<f64> {
    Ok(relative_error_guarded(noisy, exact)?.0)
}

/// A named domain shape, e.g. `4x8` or `2^5`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DomainSetting {
    pub label: String,
    pub domain: Domain,
}

impl DomainSetting {
    pub fn new(label: impl Into<String>, domain: Domain) -> Self {
        Self {
            label: label.into(),
            domain,
        }
    }

    /// Parse a shape like `4x8` or `32` into uniform attribute names a0..ak.
    pub fn parse(shape: &str) -> Result<Self> {
        let cards = shape
            .split('x')
            .map(|s| {
                s.trim().parse::<usize>().map_err(|_| {
                    Error::InvalidParameter(format!("bad dimension setting '{shape}'"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let domain = Domain::new(
            cards
                .iter()
                .enumerate()
                .map(|(i, &c)| (format!("a{i}"), c))
                .collect::<Vec<_>>(),
        )?;
        Ok(Self {
            label: shape.to_string(),
            domain,
        })
    }
}

/// The five benchmark dimension settings (all describe 32 cells).
pub fn dimension_settings() -> Vec<DomainSetting> {
    let mk = |label: &str, cards: &[usize]| {
        let domain = Domain::new(
            cards
                .iter()
                .enumerate()
                .map(|(i, &c)| (format!("a{i}"), c))
                .collect::<Vec<_>>(),
        )
        .expect("static settings are valid");
        DomainSetting::new(label, domain)
    };
    vec![
        mk("32", &[32]),
        mk("4x8", &[4, 8]),
        mk("4x4x2", &[4, 4, 2]),
        mk("4x2x2x2", &[4, 2, 2, 2]),
        mk("2^5", &[2, 2, 2, 2, 2]),
    ]
}

/// The ε values swept by the relative-error family.
pub const EPSILON_SWEEP: [f64; 5] = [0.1, 0.2, 0.5, 1.0, 2.5];

/// The ε the absolute-error family is fixed to.
pub const ABSOLUTE_EPSILON: f64 = 0.5;

/// Where the benchmark data comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum DataSource {
    /// CSV table + JSON schema on disk; only valid for a single domain
    /// setting matching the schema.
    Fixture { table: PathBuf, schema: PathBuf },
    /// Dirichlet-multinomial cell counts: `records` draws over cell
    /// probabilities sampled with symmetric `concentration`.
    Synthetic { records: u64, concentration: f64 },
}

impl Default for DataSource {
    fn default() -> Self {
        DataSource::Synthetic {
            records: 10_000,
            concentration: 1.0,
        }
    }
}

/// One benchmark grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub id: String,
    pub mechanisms: Vec<Strategy>,
    pub workloads: Vec<WorkloadKind>,
    pub domains: Vec<DomainSetting>,
    pub epsilons: Vec<f64>,
    pub trials: u32,
    pub base_seed: RngSeed,
    pub data: DataSource,
    /// Testing-only bypass; propagated into every mechanism invocation.
    pub noise_enabled: bool,
}

impl ExperimentSpec {
    fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidParameter("trials must be >= 1".into()));
        }
        if self.epsilons.iter().any(|&e| e <= 0.0 || !e.is_finite()) {
            return Err(Error::InvalidParameter(
                "epsilon values must be positive".into(),
            ));
        }
        if self.mechanisms.is_empty() || self.workloads.is_empty() || self.domains.is_empty() {
            return Err(Error::IncompatibleConfig(
                "need at least one mechanism, workload and domain".into(),
            ));
        }
        if matches!(self.data, DataSource::Fixture { .. }) && self.domains.len() != 1 {
            return Err(Error::IncompatibleConfig(
                "a fixture data source pins exactly one domain setting".into(),
            ));
        }
        for w in &self.workloads {
            if matches!(w, WorkloadKind::Custom) {
                return Err(Error::IncompatibleConfig(
                    "the harness generates all-range and k-way marginal workloads only".into(),
                ));
            }
        }
        Ok(())
    }
}

/// The relative-error family: the four query strategies, both workloads,
/// the 4x8 setting, swept over ε.
pub fn preset_relative(trials: u32, base_seed: RngSeed) -> ExperimentSpec {
    ExperimentSpec {
        id: "relative".into(),
        mechanisms: Strategy::BENCH.to_vec(),
        workloads: vec![WorkloadKind::AllRange, WorkloadKind::KWayMarginal(1)],
        domains: vec![dimension_settings().remove(1)],
        epsilons: EPSILON_SWEEP.to_vec(),
        trials,
        base_seed,
        data: DataSource::default(),
        noise_enabled: true,
    }
}

/// The absolute-error family: ε fixed to 0.5, swept over dimension settings.
/// The data-cube strategy is excluded here; its measured-marginal answers
/// are dataset-dependent in a way that makes absolute errors incomparable.
pub fn preset_absolute(trials: u32, base_seed: RngSeed) -> ExperimentSpec {
    ExperimentSpec {
        id: "absolute".into(),
        mechanisms: vec![Strategy::Fourier, Strategy::Wavelet, Strategy::Hierarchical],
        workloads: vec![WorkloadKind::AllRange, WorkloadKind::KWayMarginal(1)],
        domains: dimension_settings(),
        epsilons: vec![ABSOLUTE_EPSILON],
        trials,
        base_seed,
        data: DataSource::default(),
        noise_enabled: true,
    }
}

/// One benchmark trial outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub experiment: String,
    pub mechanism: String,
    pub workload: String,
    pub domain: String,
    pub epsilon: f64,
    pub trial: u32,
    pub abs_error: f64,
    pub rel_error: f64,
    pub seed: u64,
}

/// Everything a run produced.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub rows: Vec<ResultRow>,
    /// Trials where the relative-error denominator guard was active.
    pub guard_activations: usize,
}

/// Sample Dirichlet-multinomial counts for one domain.
pub fn synthetic_counts(
    domain: &Domain,
    records: u64,
    concentration: f64,
    rng: &mut SplitMix64,
) -> DataVector {
    let n = domain.total_size();
    let mut probs: Vec<f64> = (0..n).map(|_| rng.gamma(concentration.max(1e-6))).collect();
    let total: f64 = probs.iter().sum();
    for p in &mut probs {
        *p /= total;
    }
    let mut counts = vec![0.0f64; n];
    for _ in 0..records {
        let u = rng.next_f64();
        let mut acc = 0.0;
        let mut cell = n - 1;
        for (i, &p) in probs.iter().enumerate() {
            acc += p;
            if u < acc {
                cell = i;
                break;
            }
        }
        counts[cell] += 1.0;
    }
    DataVector::new(domain.clone(), counts).expect("synthetic counts are non-negative")
}

fn materialize_data(spec: &ExperimentSpec, setting_index: usize) -> Result<DataVector> {
    let setting = &spec.domains[setting_index];
    match &spec.data {
        DataSource::Synthetic {
            records,
            concentration,
        } => {
            let mut rng = spec
                .base_seed
                .substream_named("data")
                .substream(setting_index as u64)
                .rng();
            Ok(synthetic_counts(
                &setting.domain,
                *records,
                *concentration,
                &mut rng,
            ))
        }
        DataSource::Fixture { table, schema } => {
            let schema = TableSchema::load(schema)?;
            let table = parse_table(table, &schema)?;
            build_data_vector(&table, &setting.domain)
        }
    }
}

fn build_workload(kind: WorkloadKind, domain: &Domain) -> Result<Workload> {
    match kind {
        WorkloadKind::AllRange => Ok(all_range(domain)),
        WorkloadKind::KWayMarginal(k) => k_way_marginal(domain, k),
        WorkloadKind::Custom => Err(Error::IncompatibleConfig(
            "custom workloads have no generator".into(),
        )),
    }
}

fn trial_substream(
    spec: &ExperimentSpec,
    di: usize,
    wi: usize,
    mi: usize,
    ei: usize,
    t: u32,
) -> RngSeed {
    spec.base_seed
        .substream_named("trial")
        .substream(di as u64)
        .substream(wi as u64)
        .substream(mi as u64)
        .substream(ei as u64)
        .substream(u64::from(t))
}

pub const MECHANISM_METADATA_CSV_HEADER: &str =
    "experiment,mechanism,workload,domain,epsilon,seed,metadata";

/// One row per grid cell describing the strategy's internal measurements
/// (coefficient counts, chosen marginals, tree depth, hybrid decisions),
/// taken from the first trial of each cell.
pub fn mechanism_metadata_csv(spec: &ExperimentSpec) -> Result<String> {
    spec.validate()?;
    let mut out = String::from(MECHANISM_METADATA_CSV_HEADER);
    out.push('\n');
    for (di, setting) in spec.domains.iter().enumerate() {
        let x = materialize_data(spec, di)?;
        for (wi, &kind) in spec.workloads.iter().enumerate() {
            let workload = build_workload(kind, &setting.domain)?;
            for (mi, &mech) in spec.mechanisms.iter().enumerate() {
                for (ei, &epsilon) in spec.epsilons.iter().enumerate() {
                    let seed = trial_substream(spec, di, wi, mi, ei, 0);
                    let params = if spec.noise_enabled {
                        PrivacyParams::new(epsilon)?
                    } else {
                        PrivacyParams::exact(epsilon)?
                    };
                    let r = mechanisms::run(mech, &workload, &x, &params, seed)?;
                    out.push_str(&format!(
                        "{},{},{},{},{},{},{}\n",
                        spec.id,
                        mech,
                        kind,
                        setting.label,
                        epsilon,
                        seed.0,
                        r.measurements.summary()
                    ));
                }
            }
        }
    }
    Ok(out)
}

/// Check a (mechanism, workload, domain) combination before running it.
fn preflight(strategy: Strategy, workload: &Workload, domain: &Domain) -> Result<()> {
    match strategy {
        Strategy::Fourier => {
            crate::domain::binarize(domain)?;
            if workload.marginals().is_none() {
                return Err(Error::NonMarginalWorkload(
                    "fourier needs marginal structure".into(),
                ));
            }
        }
        Strategy::DataCube if workload.marginals().is_none() => {
            return Err(Error::NonMarginalWorkload(
                "datacube needs marginal structure".into(),
            ));
        }
        _ => {}
    }
    Ok(())
}

/// Run the full grid. Trials execute in parallel on independent seed
/// substreams; rows come back in deterministic
/// (domain, workload, mechanism, ε, trial) order regardless of scheduling.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<RunOutcome> {
    spec.validate()?;

    struct Job {
        row_meta: (usize, usize, usize, usize, u32),
        seed: RngSeed,
        epsilon: f64,
    }

    let mut datasets = Vec::with_capacity(spec.domains.len());
    for di in 0..spec.domains.len() {
        datasets.push(materialize_data(spec, di)?);
    }

    let mut workloads = Vec::new(); // indexed [di][wi]
    let mut exacts = Vec::new();
    for (di, setting) in spec.domains.iter().enumerate() {
        let mut per_domain = Vec::new();
        let mut per_domain_exact = Vec::new();
        for &kind in &spec.workloads {
            let w = build_workload(kind, &setting.domain)?;
            for &m in &spec.mechanisms {
                preflight(m, &w, &setting.domain).map_err(|e| {
                    Error::IncompatibleConfig(format!("{m} on {} / {}: {e}", setting.label, kind))
                })?;
            }
            per_domain_exact.push(evaluate(&w, &datasets[di])?);
            per_domain.push(w);
        }
        workloads.push(per_domain);
        exacts.push(per_domain_exact);
    }

    let trial_seed = |di: usize, wi: usize, mi: usize, ei: usize, t: u32| {
        trial_substream(spec, di, wi, mi, ei, t)
    };

    let mut jobs = Vec::new();
    for di in 0..spec.domains.len() {
        for wi in 0..spec.workloads.len() {
            for mi in 0..spec.mechanisms.len() {
                for (ei, &epsilon) in spec.epsilons.iter().enumerate() {
                    for t in 0..spec.trials {
                        jobs.push(Job {
                            row_meta: (di, wi, mi, ei, t),
                            seed: trial_seed(di, wi, mi, ei, t),
                            epsilon,
                        });
                    }
                }
            }
        }
    }

    let results: Vec<Result<(ResultRow, bool)>> = jobs
        .par_iter()
        .map(|job| {
            let (di, wi, mi, _brk, t) = job.row_meta;
            let params = if spec.noise_enabled {
                PrivacyParams::new(job.epsilon)?
            } else {
                PrivacyParams::exact(job.epsilon)?
            };
            let workload = &workloads[di][wi];
            let exact = &exacts[di][wi];
            let out = mechanisms::run(
                spec.mechanisms[mi],
                workload,
                &datasets[di],
                &params,
                job.seed,
            )?;
            let abs = absolute_error(&out.answers, exact)?;
            let (rel, guarded) = relative_error_guarded(&out.answers, exact)?;
            Ok((
                ResultRow {
                    experiment: spec.id.clone(),
                    mechanism: spec.mechanisms[mi].to_string(),
                    workload: spec.workloads[wi].to_string(),
                    domain: spec.domains[di].label.clone(),
                    epsilon: job.epsilon,
                    trial: t,
                    abs_error: abs,
                    rel_error: rel,
                    seed: job.seed.0,
                },
                guarded,
            ))
        })
        .collect();

    let mut rows = Vec::with_capacity(results.len());
    let mut guard_activations = 0usize;
    for r in results {
        let (row, guarded) = r?;
        guard_activations += usize::from(guarded);
        rows.push(row);
    }
    Ok(RunOutcome {
        rows,
        guard_activations,
    })
}

/// Aggregate statistics for one (mechanism, workload, domain, ε) cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub experiment: String,
    pub mechanism: String,
    pub workload: String,
    pub domain: String,
    pub epsilon: f64,
    pub metric: String,
    pub mean: f64,
    pub stderr: f64,
    pub median: f64,
}

fn mean_stderr_median(values: &mut [f64]) -> (f64, f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let stderr = if values.len() > 1 {
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (var / n).sqrt()
    } else {
        0.0
    };
    values.sort_by(|a, b| a.partial_cmp(b).expect("errors are finite"));
    let mid = values.len() / 2;
    let median = if values.len() % 2 == 1 {
        values[mid]
    } else {
        (values[mid - 1] + values[mid]) / 2.0
    };
    (mean, stderr, median)
}

/// Collapse trial rows into per-cell mean / stderr / median, one output row
/// per metric, preserving first-appearance cell order.
pub fn summarize(rows: &[ResultRow]) -> Vec<SummaryRow> {
    let mut order: Vec<(String, String, String, String, f64)> = Vec::new();
    let mut groups: std::collections::HashMap<String, (Vec<f64>, Vec<f64>)> = Default::default();
    for row in rows {
        let key = format!(
            "{}\u{1f}{}\u{1f}{}\u{1f}{}\u{1f}{}",
            row.experiment, row.mechanism, row.workload, row.domain, row.epsilon
        );
        if !groups.contains_key(&key) {
            order.push((
                row.experiment.clone(),
                row.mechanism.clone(),
                row.workload.clone(),
                row.domain.clone(),
                row.epsilon,
            ));
        }
        let entry = groups.entry(key).or_default();
        entry.0.push(row.abs_error);
        entry.1.push(row.rel_error);
    }
    let mut out = Vec::new();
    for (experiment, mechanism, workload, domain, epsilon) in order {
        let key =
            format!("{experiment}\u{1f}{mechanism}\u{1f}{workload}\u{1f}{domain}\u{1f}{epsilon}");
        let (mut abs, mut rel) = groups.remove(&key).expect("key recorded on insert");
        for (metric, values) in [("abs_error", &mut abs), ("rel_error", &mut rel)] {
            let (mean, stderr, median) = mean_stderr_median(values);
            out.push(SummaryRow {
                experiment: experiment.clone(),
                mechanism: mechanism.clone(),
                workload: workload.clone(),
                domain: domain.clone(),
                epsilon,
                metric: metric.into(),
                mean,
                stderr,
                median,
            });
        }
    }
    out
}

pub const RESULTS_CSV_HEADER: &str =
    "experiment,mechanism,workload,domain,epsilon,trial,abs_error,rel_error,seed";

/// Serialize trial rows; stable bytes for a given row list.
pub fn results_csv(rows: &[ResultRow]) -> String {
    let mut out = String::from(RESULTS_CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.experiment,
            r.mechanism,
            r.workload,
            r.domain,
            r.epsilon,
            r.trial,
            r.abs_error,
            r.rel_error,
            r.seed
        ));
    }
    out
}

pub const SUMMARY_CSV_HEADER: &str =
    "experiment,mechanism,workload,domain,epsilon,metric,mean,stderr,median";

pub fn summary_csv(rows: &[SummaryRow]) -> String {
    let mut out = String::from(SUMMARY_CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.experiment,
            r.mechanism,
            r.workload,
            r.domain,
            r.epsilon,
            r.metric,
            r.mean,
            r.stderr,
            r.median
        ));
    }
    out
}

/// A non-blocking textual comparison of mechanism orderings: which strategy
/// wins per workload/ε cell, whether errors shrink as ε grows, and how the
/// data-cube strategy ranks. Observational output, not an assertion.
pub fn trend_report(summary: &[SummaryRow]) -> String {
    let rel: Vec<&SummaryRow> = summary.iter().filter(|r| r.metric == "rel_error").collect();
    let mut out = String::from("mechanism comparison report\n===========================\n");
    if rel.is_empty() {
        out.push_str("no relative-error rows\n");
        return out;
    }

    let mut cells: Vec<(String, String, f64)> = rel
        .iter()
        .map(|r| (r.workload.clone(), r.domain.clone(), r.epsilon.to_string()))
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .map(|(w, d, e)| {
            let eps: f64 = e.parse().expect("eps round-trips through Display");
            (w, d, eps)
        })
        .collect();
    cells.sort_by(|a, b| a.partial_cmp(b).expect("labels and finite eps"));

    for (workload, domain, epsilon) in &cells {
        let mut ranked: Vec<(&str, f64)> = rel
            .iter()
            .filter(|r| r.workload == *workload && r.domain == *domain && r.epsilon == *epsilon)
            .map(|r| (r.mechanism.as_str(), r.mean))
            .collect();
        ranked.sort_by(|a, b| a.1.partial_cmp(&b.1).expect("finite means"));
        let line = ranked
            .iter()
            .map(|(m, v)| format!("{m}={v:.4}"))
            .collect::<Vec<_>>()
            .join(" <= ");
        out.push_str(&format!("{workload} {domain} eps={epsilon}: {line}\n"));
    }

    // per-mechanism monotonicity in eps
    let mechs: std::collections::BTreeSet<&str> =
        rel.iter().map(|r| r.mechanism.as_str()).collect();
    out.push('\n');
    for mech in mechs {
        for (workload, domain, _) in cells.iter().filter(|(_, _, e)| *e == cells[0].2) {
            let mut series: Vec<(f64, f64)> = rel
                .iter()
                .filter(|r| r.mechanism == mech && r.workload == *workload && r.domain == *domain)
                .map(|r| (r.epsilon, r.mean))
                .collect();
            if series.len() < 2 {
                continue;
            }
            series.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite eps"));
            let monotone = series.windows(2).all(|w| w[1].1 <= w[0].1);
            out.push_str(&format!(
                "{mech} on {workload} {domain}: error {} in eps\n",
                if monotone {
                    "non-increasing"
                } else {
                    "NOT monotone"
                }
            ));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn absolute_error_is_the_l1_distance() {
        assert_eq!(absolute_error(&[103.0], &[100.0]).unwrap(), 3.0);
        assert_eq!(absolute_error(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        let mut rng = RngSeed(1).rng();
        let a: Vec<f64> = (0..12).map(|_| rng.next_f64() * 10.0).collect();
        let b: Vec<f64> = (0..12).map(|_| rng.next_f64() * 10.0).collect();
        let brute: f64 = (0..12).map(|i| (a[i] - b[i]).abs()).sum();
        assert_eq!(absolute_error(&a, &b).unwrap(), brute);
        assert!(absolute_error(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn relative_error_divides_by_answer_magnitude() {
        assert_eq!(relative_error(&[103.0], &[100.0]).unwrap(), 0.03);
        assert_eq!(relative_error(&[0.0, 0.0], &[0.0, 0.0]).unwrap(), 0.0);
        // zero true answers trip the guard
        let (err, guarded) = relative_error_guarded(&[2.0, 3.0], &[0.0, 0.0]).unwrap();
        assert_eq!(err, 5.0);
        assert!(guarded);
        let (_, guarded) = relative_error_guarded(&[103.0], &[100.0]).unwrap();
        assert!(!guarded);
    }

    #[test]
    fn noise_free_runs_have_exactly_zero_error() {
        let mut spec = preset_relative(1, RngSeed(77));
        spec.noise_enabled = false;
        spec.epsilons = vec![0.5];
        let out = run_experiment(&spec).unwrap();
        assert_eq!(out.rows.len(), 4 * 2);
        assert!(out
            .rows
            .iter()
            .all(|r| r.abs_error == 0.0 && r.rel_error == 0.0));
    }

    #[test]
    fn rerunning_a_spec_reproduces_the_csv_bytes() {
        let spec = preset_relative(5, RngSeed(123));
        let a = results_csv(&run_experiment(&spec).unwrap().rows);
        let b = results_csv(&run_experiment(&spec).unwrap().rows);
        assert_eq!(a, b);
        assert!(a.starts_with(RESULTS_CSV_HEADER));
    }

    #[test]
    fn different_base_seeds_change_the_rows() {
        let a = run_experiment(&preset_relative(2, RngSeed(1))).unwrap();
        let b = run_experiment(&preset_relative(2, RngSeed(2))).unwrap();
        assert_ne!(a.rows, b.rows);
    }

    #[test]
    fn relative_preset_covers_the_full_grid() {
        let spec = preset_relative(3, RngSeed(9));
        let out = run_experiment(&spec).unwrap();
        // 1 domain x 2 workloads x 4 mechanisms x 5 eps x 3 trials
        assert_eq!(out.rows.len(), 2 * 4 * 5 * 3);
        let summary = summarize(&out.rows);
        // two metrics per cell
        assert_eq!(summary.len(), 2 * 4 * 5 * 2);
    }

    #[test]
    fn absolute_preset_spans_dimension_settings_without_datacube() {
        let spec = preset_absolute(2, RngSeed(9));
        assert!(!spec.mechanisms.contains(&Strategy::DataCube));
        let out = run_experiment(&spec).unwrap();
        // 5 domains x 2 workloads x 3 mechanisms x 1 eps x 2 trials
        assert_eq!(out.rows.len(), 5 * 2 * 3 * 2);
        let labels: std::collections::BTreeSet<&str> =
            out.rows.iter().map(|r| r.domain.as_str()).collect();
        assert_eq!(labels.len(), 5);
        assert!(labels.contains("2^5"));
    }

    #[test]
    fn fourier_on_a_non_binarizable_domain_is_rejected_up_front() {
        let mut spec = preset_relative(1, RngSeed(3));
        spec.domains = vec![DomainSetting::parse("3x5").unwrap()];
        assert!(matches!(
            run_experiment(&spec),
            Err(Error::IncompatibleConfig(_))
        ));
    }

    #[test]
    fn synthetic_counts_sum_to_the_record_total() {
        let d = Domain::new(vec![("A", 4), ("B", 8)]).unwrap();
        let mut rng = RngSeed(5).rng();
        let x = synthetic_counts(&d, 10_000, 1.0, &mut rng);
        assert_eq!(x.total(), 10_000.0);
    }

    #[test]
    fn summary_stats_are_correct_on_a_tiny_group() {
        let rows = vec![
            ResultRow {
                experiment: "e".into(),
                mechanism: "identity".into(),
                workload: "all-range".into(),
                domain: "4x8".into(),
                epsilon: 0.5,
                trial: 0,
                abs_error: 1.0,
                rel_error: 0.1,
                seed: 0,
            },
            ResultRow {
                experiment: "e".into(),
                mechanism: "identity".into(),
                workload: "all-range".into(),
                domain: "4x8".into(),
                epsilon: 0.5,
                trial: 1,
                abs_error: 3.0,
                rel_error: 0.3,
                seed: 1,
            },
        ];
        let s = summarize(&rows);
        assert_eq!(s.len(), 2);
        assert_eq!(s[0].metric, "abs_error");
        assert_eq!(s[0].mean, 2.0);
        assert_eq!(s[0].median, 2.0);
        // stderr = sample std / sqrt(n) = sqrt(2) / sqrt(2) = 1
        assert!((s[0].stderr - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mechanism_metadata_lists_internal_measurements() {
        let spec = preset_relative(1, RngSeed(4));
        let csv = mechanism_metadata_csv(&spec).unwrap();
        assert!(csv.starts_with(MECHANISM_METADATA_CSV_HEADER));
        // 4 mechanisms x 2 workloads x 5 eps
        assert_eq!(csv.lines().count(), 1 + 4 * 2 * 5);
        assert!(
            csv.contains("coefficients=11"),
            "fourier coefficient count missing"
        );
        assert!(csv.contains("levels=6"), "tree depth missing");
        assert!(
            csv.contains("bases=identity|haar"),
            "hybrid decision missing"
        );
        assert!(
            csv.contains("chosen=a0|a1"),
            "chosen marginal subset missing"
        );
    }

    #[test]
    fn trend_report_mentions_every_mechanism() {
        let out = run_experiment(&preset_relative(10, RngSeed(33))).unwrap();
        let report = trend_report(&summarize(&out.rows));
        for m in Strategy::BENCH {
            assert!(report.contains(&m.to_string()), "missing {m} in report");
        }
    }
}
