//! Empirical check of the ε guarantee on neighboring datasets.
//!
//! For datasets differing in at most one record, an ε-private mechanism's
//! output distributions satisfy `Pr[K(D1) in S] <= exp(ε) * Pr[K(D2) in S]`
//! for every outcome set S. The probe samples the mechanism many times on
//! both datasets, histograms the first query's answer over shared bins, and
//! returns the largest `|log(p1 / p2)|` over bins with enough mass on both
//! sides. For a correctly calibrated mechanism this stays at or below ε plus
//! statistical slack.

use crate::domain::DataVector;
use crate::error::{Error, Result};
use crate::mechanisms::{run, PrivacyParams, Strategy};
use crate::rng::RngSeed;
use crate::workload::Workload;

/// Bins with fewer samples than this on either side are ignored; the
/// log-ratio of tiny counts is pure noise.
pub const PROBE_MIN_BIN_COUNT: usize = 50;

/// Histogram `samples` runs of the mechanism on each dataset and return the
/// empirical max absolute log-ratio over well-populated bins.
///
/// `bin_edges` must be ascending; two open-ended tail bins are added
/// implicitly. The datasets must be neighbors (counts differing by at most
/// one record in L1). Mechanisms with noise disabled are rejected outright:
/// a deterministic mechanism violates differential privacy.
#[allow(clippy::too_many_arguments)]
pub fn dp_ratio_probe(
    strategy: Strategy,
    workload: &Workload,
    d1: &DataVector,
    d2: &DataVector,
    params: &PrivacyParams,
    samples: usize,
    bin_edges: &[f64],
    seed: RngSeed,
) -> Result<f64> {
    if !params.noise_enabled {
        return Err(Error::NonPrivateBypass);
    }
    if d1.domain() != d2.domain() {
        return Err(Error::DomainMismatch(
            "probe datasets live on different domains".into(),
        ));
    }
    let l1: f64 = d1
        .counts()
        .iter()
        .zip(d2.counts())
        .map(|(a, b)| (a - b).abs())
        .sum();
    if l1 > 1.0 + 1e-9 {
        return Err(Error::InvalidParameter(format!(
            "datasets differ by {l1} records in L1; neighbors differ by at most one"
        )));
    }
    if samples == 0 {
        return Err(Error::InvalidParameter(
            "probe needs at least one sample".into(),
        ));
    }
    if bin_edges.len() < 2 || bin_edges.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter(
            "bin edges must be ascending, >= 2 of them".into(),
        ));
    }

    let bins = bin_edges.len() + 1;
    let mut hist1 = vec![0usize; bins];
    let mut hist2 = vec![0usize; bins];
    let bin_of = |v: f64| -> usize { bin_edges.partition_point(|&e| e <= v) };

    let seed1 = seed.substream_named("probe-d1");
    let seed2 = seed.substream_named("probe-d2");
    for i in 0..samples {
        let r1 = run(strategy, workload, d1, params, seed1.substream(i as u64))?;
        let r2 = run(strategy, workload, d2, params, seed2.substream(i as u64))?;
        hist1[bin_of(r1.answers[0])] += 1;
        hist2[bin_of(r2.answers[0])] += 1;
    }

    let mut max_ratio: Option<f64> = None;
    for (&c1, &c2) in hist1.iter().zip(&hist2) {
        if c1 >= PROBE_MIN_BIN_COUNT && c2 >= PROBE_MIN_BIN_COUNT {
            let ratio = ((c1 as f64) / (c2 as f64)).ln().abs();
            max_ratio = Some(max_ratio.map_or(ratio, |m: f64| m.max(ratio)));
        }
    }
    max_ratio.ok_or(Error::InsufficientSamples {
        min_count: PROBE_MIN_BIN_COUNT,
    })
}

/// Evenly spaced probe bins bracketing the expected output location:
/// `span` scale units on both sides of `center`, `width` scale units per bin.
pub fn probe_bins(center: f64, scale: f64, span: f64, width: f64) -> Vec<f64> {
    let mut edges = Vec::new();
    let mut e = -span;
    while e <= span + 1e-12 {
        edges.push(center + e * scale);
        e += width;
    }
    edges
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{DataVector, Domain};
    use crate::workload::all_range;

    fn two_cell_neighbors() -> (Domain, DataVector, DataVector) {
        let d = Domain::new(vec![("b", 2)]).unwrap();
        let d1 = DataVector::new(d.clone(), vec![40.0, 60.0]).unwrap();
        let d2 = DataVector::new(d.clone(), vec![41.0, 60.0]).unwrap();
        (d, d1, d2)
    }

    #[test]
    fn identical_datasets_probe_near_zero() {
        let (d, d1, _) = two_cell_neighbors();
        let w = all_range(&d);
        let p = PrivacyParams::new(0.5).unwrap();
        let edges = probe_bins(100.0, 2.0, 3.0, 1.5);
        let probe = dp_ratio_probe(
            Strategy::Identity,
            &w,
            &d1,
            &d1,
            &p,
            30_000,
            &edges,
            RngSeed(7),
        )
        .unwrap();
        assert!(probe < 0.15, "probe on identical data was {probe}");
    }

    #[test]
    fn neighboring_datasets_stay_within_epsilon_plus_slack() {
        let (d, d1, d2) = two_cell_neighbors();
        let w = all_range(&d);
        let p = PrivacyParams::new(0.5).unwrap();
        let edges = probe_bins(100.5, 2.0, 4.0, 2.0);
        let probe = dp_ratio_probe(
            Strategy::Identity,
            &w,
            &d1,
            &d2,
            &p,
            30_000,
            &edges,
            RngSeed(7),
        )
        .unwrap();
        assert!(probe <= 0.5 + 0.15, "probe {probe} exceeds eps + slack");
    }

    #[test]
    fn noise_bypass_is_flagged_as_non_private() {
        let (d, d1, d2) = two_cell_neighbors();
        let w = all_range(&d);
        let p = PrivacyParams::exact(0.5).unwrap();
        let edges = probe_bins(100.0, 2.0, 4.0, 2.0);
        assert!(matches!(
            dp_ratio_probe(
                Strategy::Identity,
                &w,
                &d1,
                &d2,
                &p,
                1000,
                &edges,
                RngSeed(7)
            ),
            Err(Error::NonPrivateBypass)
        ));
    }

    #[test]
    fn non_neighboring_datasets_are_rejected() {
        let (d, d1, _) = two_cell_neighbors();
        let far = DataVector::new(d.clone(), vec![10.0, 10.0]).unwrap();
        let w = all_range(&d);
        let p = PrivacyParams::new(0.5).unwrap();
        let edges = probe_bins(100.0, 2.0, 4.0, 2.0);
        assert!(dp_ratio_probe(
            Strategy::Identity,
            &w,
            &d1,
            &far,
            &p,
            100,
            &edges,
            RngSeed(7)
        )
        .is_err());
    }

    #[test]
    fn too_few_samples_in_every_bin_errors() {
        let (d, d1, d2) = two_cell_neighbors();
        let w = all_range(&d);
        let p = PrivacyParams::new(0.5).unwrap();
        // 30 samples can never fill a bin past the 50-count threshold
        let edges = probe_bins(100.0, 2.0, 4.0, 2.0);
        assert!(matches!(
            dp_ratio_probe(Strategy::Identity, &w, &d1, &d2, &p, 30, &edges, RngSeed(7)),
            Err(Error::InsufficientSamples { .. })
        ));
    }
}
