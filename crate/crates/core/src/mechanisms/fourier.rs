//! Parity-basis (Fourier) strategy for marginal workloads.
//!
//! Over a binarized domain `{0,1}^d`, the cell counts have parity-basis
//! coefficients
//!
//! ```text
//! theta[a] = 2^-d * sum_x (-1)^<a, bits(x)> * counts[x]
//! ```
//!
//! A marginal over attribute bits `T` is reconstructible from just the
//! coefficients supported inside `T`:
//!
//! ```text
//! answer(t) = 2^(d-|T|) * sum_{a subset T} theta[a] * (-1)^<a, t>
//! ```
//!
//! so only the coefficient set `A = union over workload marginals of
//! {a : support(a) subset bits(M)}` is measured; everything else is
//! eliminated, which keeps the coefficient-vector sensitivity at `|A| / 2^d`
//! (one record moves every coefficient by exactly `2^-d`). Each measured
//! coefficient gets Laplace noise of scale `|A| / (2^d * ε)`.

use std::collections::BTreeSet;

use crate::domain::{binarize, DataVector};
use crate::error::{Error, Result};
use crate::mechanisms::{check_domains, Measurements, PrivacyParams, Strategy, StrategyResult};
use crate::rng::RngSeed;
use crate::workload::Workload;

pub fn fourier_mechanism(
    workload: &Workload,
    x: &DataVector,
    params: &PrivacyParams,
    seed: RngSeed,
) -> Result<StrategyResult> {
    check_domains(workload, x)?;
    let marginals = workload.marginals().ok_or_else(|| {
        Error::NonMarginalWorkload(format!(
            "{} workload has no marginal structure",
            workload.kind()
        ))
    })?;
    let bin = binarize(workload.domain())?;
    let d = bin.bits();
    let cells = 1usize << d;
    debug_assert_eq!(cells, workload.domain().total_size());

    // Required coefficient set: all sub-masks of every marginal's bit mask.
    let masks: Vec<u64> = marginals
        .iter()
        .map(|m| bin.subset_mask(&m.attrs))
        .collect();
    let mut coeff_set: BTreeSet<u64> = BTreeSet::new();
    for &mask in &masks {
        let mut s = mask;
        loop {
            coeff_set.insert(s);
            if s == 0 {
                break;
            }
            s = (s - 1) & mask;
        }
    }
    let coeff_count = coeff_set.len();
    let scale = coeff_count as f64 / (cells as f64 * params.epsilon);

    // Transform, then perturb, in ascending coefficient order.
    let counts = x.counts();
    let norm = 1.0 / cells as f64;
    let mut rng = seed.rng();
    let mut theta: Vec<(u64, f64)> = Vec::with_capacity(coeff_count);
    for &alpha in &coeff_set {
        let mut acc = 0.0;
        for (cell, &count) in counts.iter().enumerate() {
            let sign = if (alpha & bin.cell_bits(cell)).count_ones() % 2 == 0 {
                1.0
            } else {
                -1.0
            };
            acc += sign * count;
        }
        let mut value = acc * norm;
        if params.noise_enabled {
            value += rng.laplace(scale);
        }
        theta.push((alpha, value));
    }
    // theta is ascending in alpha (BTreeSet iteration order)
    let coeff_of = |alpha: u64| -> f64 {
        let idx = theta
            .binary_search_by_key(&alpha, |t| t.0)
            .expect("coefficient in A");
        theta[idx].1
    };

    // Reconstruct each marginal block from its own coefficients.
    let mut answers = vec![0.0f64; workload.num_rows()];
    for (m, &mask) in marginals.iter().zip(&masks) {
        let amplification = (cells >> mask.count_ones()) as f64;
        for i in 0..m.row_count {
            let row = &workload.rows()[m.row_offset + i];
            // all cells of the row share the masked bits; take them from the first
            let t_bits = bin.cell_bits(row[0].0) & mask;
            let mut acc = 0.0;
            let mut alpha = mask;
            loop {
                let sign = if (alpha & t_bits).count_ones() % 2 == 0 {
                    1.0
                } else {
                    -1.0
                };
                acc += sign * coeff_of(alpha);
                if alpha == 0 {
                    break;
                }
                alpha = (alpha - 1) & mask;
            }
            answers[m.row_offset + i] = amplification * acc;
        }
    }

    let mut measurements = Measurements::default();
    measurements.push("coefficients", coeff_count);
    measurements.push("bits", d);
    if params.noise_enabled {
        measurements.push("scale", scale);
    } else {
        measurements.push("non_private_bypass", true);
    }

    Ok(StrategyResult {
        answers,
        strategy: Strategy::Fourier,
        epsilon: params.epsilon,
        noise_enabled: params.noise_enabled,
        seed,
        measurements,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{DataVector, Domain};
    use crate::mechanisms::test_support::*;
    use crate::workload::{all_range, evaluate, k_way_marginal, Workload};

    #[test]
    fn all_range_needs_only_the_empty_support_coefficient() {
        let d = domain_4x8();
        let x = random_vector(&d, 8);
        let p = PrivacyParams::exact(0.5).unwrap();
        let r = fourier_mechanism(&all_range(&d), &x, &p, RngSeed(1)).unwrap();
        assert_eq!(r.measurements.get("coefficients"), Some("1"));
        // answer = 2^5 * theta_0 = total
        assert!((r.answers[0] - x.total()).abs() < 1e-9);
    }

    #[test]
    fn one_way_marginals_on_4x8_use_eleven_coefficients() {
        let d = domain_4x8();
        let x = random_vector(&d, 8);
        let p = PrivacyParams::new(0.5).unwrap();
        let w = k_way_marginal(&d, 1).unwrap();
        let r = fourier_mechanism(&w, &x, &p, RngSeed(1)).unwrap();
        // submasks of 0b11000 (4) plus submasks of 0b00111 (8), sharing alpha=0
        assert_eq!(r.measurements.get("coefficients"), Some("11"));
        // scale = |A| / (2^d * eps) = 11 / 16
        assert_eq!(r.measurements.get("scale"), Some("0.6875"));
    }

    #[test]
    fn zero_vector_with_noise_disabled_gives_zero_answers() {
        let d = domain_4x8();
        let x = DataVector::zeros(d.clone());
        let p = PrivacyParams::exact(1.0).unwrap();
        let w = k_way_marginal(&d, 1).unwrap();
        let r = fourier_mechanism(&w, &x, &p, RngSeed(1)).unwrap();
        assert!(r.answers.iter().all(|&a| a == 0.0));
    }

    #[test]
    fn noise_free_reconstruction_matches_exact_evaluation() {
        let d = domain_4x8();
        let x = random_vector(&d, 5);
        let p = PrivacyParams::exact(1.0).unwrap();
        let w = k_way_marginal(&d, 1).unwrap();
        let r = fourier_mechanism(&w, &x, &p, RngSeed(1)).unwrap();
        let want = evaluate(&w, &x).unwrap();
        assert!(max_rel_err(&r.answers, &want) <= 1e-9);
    }

    #[test]
    fn custom_workloads_are_rejected() {
        let d = domain_4x8();
        let x = random_vector(&d, 5);
        let p = PrivacyParams::new(1.0).unwrap();
        let w = Workload::from_rows(d, vec![vec![(0, 1.0), (3, 2.0)]]).unwrap();
        assert!(matches!(
            fourier_mechanism(&w, &x, &p, RngSeed(1)),
            Err(Error::NonMarginalWorkload(_))
        ));
    }

    #[test]
    fn non_binarizable_domains_are_rejected() {
        let d = Domain::new(vec![("A", 3), ("B", 2)]).unwrap();
        let x = DataVector::zeros(d.clone());
        let p = PrivacyParams::new(1.0).unwrap();
        let w = k_way_marginal(&d, 1).unwrap();
        assert!(matches!(
            fourier_mechanism(&w, &x, &p, RngSeed(1)),
            Err(Error::NonBinarizableDomain(_))
        ));
    }
}
