//! Direct Laplace perturbation of the query answers.

use crate::domain::DataVector;
use crate::error::Result;
use crate::mechanisms::{check_domains, Measurements, PrivacyParams, Strategy, StrategyResult};
use crate::rng::RngSeed;
use crate::workload::{evaluate, l1_sensitivity, Workload};

/// Answer `r' = r + Laplace(sensitivity / ε)` independently per query.
///
/// A workload with zero sensitivity (no cell influences any answer) is
/// returned exactly; no record can change it.
pub fn identity_mechanism(
    workload: &Workload,
    x: &DataVector,
    params: &PrivacyParams,
    seed: RngSeed,
) -> Result<StrategyResult> {
    check_domains(workload, x)?;
    let sensitivity = l1_sensitivity(workload);
    let mut answers = evaluate(workload, x)?;

    let mut measurements = Measurements::default();
    measurements.push("sensitivity", sensitivity);
    if params.noise_enabled && sensitivity > 0.0 {
        let scale = sensitivity / params.epsilon;
        measurements.push("scale", scale);
        let mut rng = seed.rng();
        for a in &mut answers {
            *a += rng.laplace(scale);
        }
    } else {
        measurements.push("non_private_bypass", !params.noise_enabled);
    }

    Ok(StrategyResult {
        answers,
        strategy: Strategy::Identity,
        epsilon: params.epsilon,
        noise_enabled: params.noise_enabled,
        seed,
        measurements,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mechanisms::test_support::*;
    use crate::workload::{all_range, k_way_marginal};

    #[test]
    fn all_range_uses_scale_two_at_half_epsilon() {
        let d = domain_4x8();
        let x = random_vector(&d, 1);
        let p = PrivacyParams::new(0.5).unwrap();
        let r = identity_mechanism(&all_range(&d), &x, &p, RngSeed(4)).unwrap();
        assert_eq!(r.measurements.get("scale"), Some("2"));
    }

    #[test]
    fn one_way_marginal_over_two_attributes_uses_scale_four() {
        let d = domain_4x8();
        let x = random_vector(&d, 1);
        let p = PrivacyParams::new(0.5).unwrap();
        let w = k_way_marginal(&d, 1).unwrap();
        let r = identity_mechanism(&w, &x, &p, RngSeed(4)).unwrap();
        assert_eq!(r.measurements.get("scale"), Some("4"));
    }

    #[test]
    fn bypass_returns_exact_answers() {
        let d = domain_4x8();
        let x = random_vector(&d, 2);
        let p = PrivacyParams::exact(0.5).unwrap();
        let w = all_range(&d);
        let r = identity_mechanism(&w, &x, &p, RngSeed(4)).unwrap();
        assert_eq!(r.answers, vec![x.total()]);
        assert_eq!(r.measurements.get("non_private_bypass"), Some("true"));
    }
}
