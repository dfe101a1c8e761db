//! ε-differentially-private strategies for answering linear query workloads.
//!
//! Every strategy takes a [`Workload`], a [`DataVector`], privacy parameters
//! and a seed, and returns noisy answers plus a description of the internal
//! measurements it made. All strategies are pure given `(inputs, seed)`:
//! identical calls produce bit-identical results, and independent trials
//! should use seed substreams.
//!
//! * [`identity_mechanism`]: Laplace noise straight on the query answers,
//!   scale `sensitivity / ε`. The baseline every other strategy is judged
//!   against, and the textbook realization of the privacy definition.
//! * [`fourier_mechanism`]: measures only the parity-basis coefficients a
//!   marginal workload actually needs, then reconstructs the marginals.
//! * [`wavelet_mechanism`]: noises Haar wavelet coefficients per dimension
//!   with weight-calibrated scales, hybridized with the identity basis on
//!   small dimensions.
//! * [`hierarchical_mechanism`]: noises a binary tree of interval sums and
//!   answers ranges with minimal node covers.
//! * [`datacube_mechanism`]: picks a subset of the workload's marginals to
//!   measure, minimizing the worst-case answer variance.
//! * [`dp_ratio_probe`]: empirically checks the ε guarantee by comparing
//!   output histograms on neighboring datasets.

mod datacube;
mod fourier;
mod hierarchical;
mod identity;
mod probe;
mod wavelet;

pub use datacube::datacube_mechanism;
pub use fourier::fourier_mechanism;
pub use hierarchical::{hierarchical_mechanism, hierarchical_mechanism_with, HierarchicalConfig};
pub use identity::identity_mechanism;
pub use probe::{dp_ratio_probe, probe_bins, PROBE_MIN_BIN_COUNT};
pub use wavelet::{wavelet_mechanism, wavelet_mechanism_with, WaveletConfig};

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::domain::DataVector;
use crate::error::{Error, Result};
use crate::rng::RngSeed;
use crate::workload::Workload;

/// Privacy-loss budget for one strategy invocation.
///
/// `noise_enabled = false` is a testing-only bypass for checking exact
/// reconstruction; it is recorded in the result and rejected by the privacy
/// probe, because a deterministic mechanism is not private.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrivacyParams {
    pub epsilon: f64,
    pub noise_enabled: bool,
}

impl PrivacyParams {
    pub fn new(epsilon: f64) -> Result<Self> {
        if epsilon <= 0.0 || !epsilon.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "epsilon must be positive and finite, got {epsilon}"
            )));
        }
        Ok(Self {
            epsilon,
            noise_enabled: true,
        })
    }

    /// Noise bypass for exactness tests. NON-PRIVATE.
    pub fn exact(epsilon: f64) -> Result<Self> {
        Ok(Self {
            noise_enabled: false,
            ..Self::new(epsilon)?
        })
    }
}

/// Strategy tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Strategy {
    Identity,
    Fourier,
    Wavelet,
    DataCube,
    Hierarchical,
}

impl Strategy {
    pub const ALL: [Strategy; 5] = [
        Strategy::Identity,
        Strategy::Fourier,
        Strategy::Wavelet,
        Strategy::DataCube,
        Strategy::Hierarchical,
    ];

    /// The four workload-answering strategies benchmarked against each other.
    pub const BENCH: [Strategy; 4] = [
        Strategy::Fourier,
        Strategy::Wavelet,
        Strategy::DataCube,
        Strategy::Hierarchical,
    ];

    pub fn parse(s: &str) -> Result<Strategy> {
        match s.to_ascii_lowercase().as_str() {
            "identity" => Ok(Strategy::Identity),
            "fourier" => Ok(Strategy::Fourier),
            "wavelet" => Ok(Strategy::Wavelet),
            "datacube" => Ok(Strategy::DataCube),
            "hierarchical" => Ok(Strategy::Hierarchical),
            other => Err(Error::InvalidParameter(format!(
                "unknown mechanism '{other}'"
            ))),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Strategy::Identity => "identity",
            Strategy::Fourier => "fourier",
            Strategy::Wavelet => "wavelet",
            Strategy::DataCube => "datacube",
            Strategy::Hierarchical => "hierarchical",
        };
        write!(f, "{s}")
    }
}

/// What a strategy measured internally: chosen marginal subsets, tree depth,
/// coefficient counts, hybrid decisions. Key-value pairs, `;`-joined in CSV
/// metadata (keys and values never contain commas).
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Measurements {
    entries: Vec<(String, String)>,
}

impl Measurements {
    pub fn push(&mut self, key: &str, value: impl fmt::Display) {
        self.entries.push((key.to_string(), value.to_string()));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    /// `key=value;key=value` summary for CSV embedding.
    pub fn summary(&self) -> String {
        self.entries
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(";")
    }
}

/// Noisy answers plus run metadata.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrategyResult {
    pub answers: Vec<f64>,
    pub strategy: Strategy,
    pub epsilon: f64,
    /// False only in test/diagnostic runs; such results are NOT private.
    pub noise_enabled: bool,
    pub seed: RngSeed,
    pub measurements: Measurements,
}

/// Dispatch on the strategy tag.
pub fn run(
    strategy: Strategy,
    workload: &Workload,
    x: &DataVector,
    params: &PrivacyParams,
    seed: RngSeed,
) -> Result<StrategyResult> {
    match strategy {
        Strategy::Identity => identity_mechanism(workload, x, params, seed),
        Strategy::Fourier => fourier_mechanism(workload, x, params, seed),
        Strategy::Wavelet => wavelet_mechanism(workload, x, params, seed),
        Strategy::DataCube => datacube_mechanism(workload, x, params, seed),
        Strategy::Hierarchical => hierarchical_mechanism(workload, x, params, seed),
    }
}

pub(crate) fn check_domains(workload: &Workload, x: &DataVector) -> Result<()> {
    if workload.domain() != x.domain() {
        return Err(Error::DomainMismatch(format!(
            "workload over {}, data vector over {}",
            workload.domain().label(),
            x.domain().label()
        )));
    }
    Ok(())
}

/// Evaluate a workload against an arbitrary (possibly negative) cell vector,
/// e.g. a noisy reconstruction.
pub(crate) fn evaluate_dense(workload: &Workload, cells: &[f64]) -> Vec<f64> {
    workload
        .rows()
        .iter()
        .map(|row| row.iter().map(|&(c, w)| w * cells[c]).sum())
        .collect()
}


#[cfg(test)]
mod tests {
    use super::test_support::*;
    use super::*;
    use crate::workload::{all_range, evaluate, k_way_marginal};

    #[test]
    fn privacy_params_reject_bad_epsilon() {
        assert!(PrivacyParams::new(0.0).is_err());
        assert!(PrivacyParams::new(-1.0).is_err());
        assert!(PrivacyParams::new(f64::NAN).is_err());
        assert!(PrivacyParams::new(0.5).is_ok());
    }

    #[test]
    fn all_strategies_are_deterministic_given_seed() {
        let d = domain_4x8();
        let x = random_vector(&d, 3);
        let p = PrivacyParams::new(0.5).unwrap();
        for strategy in Strategy::ALL {
            let w = k_way_marginal(&d, 1).unwrap();
            let a = run(strategy, &w, &x, &p, RngSeed(99)).unwrap();
            let b = run(strategy, &w, &x, &p, RngSeed(99)).unwrap();
            assert_eq!(a, b, "{strategy} not deterministic");
            let c = run(strategy, &w, &x, &p, RngSeed(100)).unwrap();
            assert_ne!(a.answers, c.answers, "{strategy} ignores the seed");
        }
    }

    #[test]
    fn every_strategy_is_exact_with_noise_disabled_on_all_bench_domains() {
        let p = PrivacyParams::exact(0.5).unwrap();
        for domain in bench_domains() {
            let x = random_vector(&domain, 21);
            for workload in [all_range(&domain), k_way_marginal(&domain, 1).unwrap()] {
                let want = evaluate(&workload, &x).unwrap();
                for strategy in Strategy::ALL {
                    let got = run(strategy, &workload, &x, &p, RngSeed(7)).unwrap();
                    assert!(!got.noise_enabled);
                    let err = max_rel_err(&got.answers, &want);
                    assert!(
                        err <= 1e-9,
                        "{strategy} on {} / {}: rel err {err}",
                        domain.label(),
                        workload.kind()
                    );
                }
            }
        }
    }

    #[test]
    fn mean_error_shrinks_as_epsilon_grows() {
        // noise scale is proportional to 1/ε for every strategy
        let d = domain_4x8();
        let x = random_vector(&d, 13);
        let w = k_way_marginal(&d, 1).unwrap();
        let exact = evaluate(&w, &x).unwrap();
        for strategy in Strategy::ALL {
            let mut last = f64::INFINITY;
            for (ei, &eps) in [0.1, 0.5, 2.5].iter().enumerate() {
                let p = PrivacyParams::new(eps).unwrap();
                let trials = 400u32;
                let mut total = 0.0;
                for t in 0..trials {
                    let seed = RngSeed(500 + ei as u64).substream(u64::from(t));
                    let r = run(strategy, &w, &x, &p, seed).unwrap();
                    total += r
                        .answers
                        .iter()
                        .zip(&exact)
                        .map(|(a, b)| (a - b).abs())
                        .sum::<f64>();
                }
                let mean = total / f64::from(trials);
                assert!(mean < last, "{strategy}: error did not shrink at eps={eps}");
                last = mean;
            }
        }
    }
}
