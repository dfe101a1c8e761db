//! Haar-wavelet strategy with an identity hybrid for small dimensions.
//!
//! The cell vector is transformed one dimension at a time (standard
//! decomposition). Along a power-of-two dimension of size `m = 2^l` the 1-D
//! Haar transform stores the fiber mean as the base coefficient and
//! `(mean(left half) - mean(right half)) / 2` at every node of the implicit
//! binary tree. Coefficient `c` carries weight `W(c)`: `m` for the base,
//! `2^(h-1)` for a detail whose subtree spans `2^h` leaves. The transform's
//! generalized sensitivity is `rho = 1 + l/2`: adding one record changes the
//! weighted coefficient sum by at most that. Weights and
//! sensitivities multiply across dimensions, so noising coefficient `c` with
//! `Laplace(rho_total / (W_total(c) * ε))` yields ε-differential privacy.
//!
//! Dimensions with few distinct values gain nothing from the tree, so the
//! hybrid rule keeps any dimension with cardinality <= `hybrid_threshold`
//! (and any non-power-of-two dimension) in the identity basis, where the
//! weight is 1 everywhere and the per-dimension sensitivity is 1.
//!
//! Answers are produced by inverting the noisy transform and evaluating the
//! workload against the reconstructed cell vector.

use crate::domain::DataVector;
use crate::error::{Error, Result};
use crate::mechanisms::{
    check_domains, evaluate_dense, Measurements, PrivacyParams, Strategy, StrategyResult,
};
use crate::rng::RngSeed;
use crate::workload::Workload;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveletConfig {
    /// Keep small dimensions in the identity basis.
    pub hybrid: bool,
    /// Largest cardinality still handled by the identity basis when hybrid.
    pub hybrid_threshold: usize,
}

impl Default for WaveletConfig {
    fn default() -> Self {
        Self {
            hybrid: true,
            hybrid_threshold: 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum DimBasis {
    Identity,
    Haar,
}

/// [`wavelet_mechanism_with`] under the default hybrid configuration.
pub fn wavelet_mechanism(
    workload: &Workload,
    x: &DataVector,
    params: &PrivacyParams,
    seed: RngSeed,
) -> Result<StrategyResult> {
    wavelet_mechanism_with(&WaveletConfig::default(), workload, x, params, seed)
}

pub fn wavelet_mechanism_with(
    config: &WaveletConfig,
    workload: &Workload,
    x: &DataVector,
    params: &PrivacyParams,
    seed: RngSeed,
) -> Result<StrategyResult> {
    check_domains(workload, x)?;
    let domain = workload.domain();
    let shape: Vec<usize> = domain.attributes().iter().map(|a| a.cardinality).collect();

    let mut bases = Vec::with_capacity(shape.len());
    for (attr, &m) in domain.attributes().iter().zip(&shape) {
        let basis = if !m.is_power_of_two() {
            if config.hybrid {
                DimBasis::Identity
            } else {
                return Err(Error::InvalidParameter(format!(
                    "wavelet requires a power-of-two cardinality on dimension '{}' (got {m}, hybrid disabled)",
                    attr.name
                )));
            }
        } else if config.hybrid && m <= config.hybrid_threshold {
            DimBasis::Identity
        } else {
            DimBasis::Haar
        };
        bases.push(basis);
    }

    // Per-dimension coefficient weights and sensitivities.
    let mut dim_weights: Vec<Vec<f64>> = Vec::with_capacity(shape.len());
    let mut rho_total = 1.0f64;
    for (&m, &basis) in shape.iter().zip(&bases) {
        match basis {
            DimBasis::Identity => {
                dim_weights.push(vec![1.0; m]);
                // rho *= 1
            }
            DimBasis::Haar => {
                let l = m.trailing_zeros();
                let mut w = vec![0.0; m];
                w[0] = m as f64;
                for (i, slot) in w.iter_mut().enumerate().skip(1) {
                    let depth = i.ilog2(); // 0 for the root detail
                    *slot = f64::from(1u32 << (l - 1 - depth));
                }
                dim_weights.push(w);
                rho_total *= 1.0 + f64::from(l) / 2.0;
            }
        }
    }

    // Forward transform along each Haar dimension.
    let mut coeffs = x.counts().to_vec();
    for (dim, &basis) in bases.iter().enumerate() {
        if basis == DimBasis::Haar {
            for_each_fiber(&shape, dim, &mut coeffs, haar_forward);
        }
    }

    // Perturb every coefficient, flat row-major order.
    if params.noise_enabled {
        let mut rng = seed.rng();
        for (flat, c) in coeffs.iter_mut().enumerate() {
            let mut weight = 1.0;
            let mut rest = flat;
            for dim in (0..shape.len()).rev() {
                weight *= dim_weights[dim][rest % shape[dim]];
                rest /= shape[dim];
            }
            *c += rng.laplace(rho_total / (weight * params.epsilon));
        }
    }

    // Invert and answer.
    for (dim, &basis) in bases.iter().enumerate().rev() {
        if basis == DimBasis::Haar {
            for_each_fiber(&shape, dim, &mut coeffs, haar_inverse);
        }
    }
    let answers = evaluate_dense(workload, &coeffs);

    let mut measurements = Measurements::default();
    measurements.push(
        "bases",
        bases
            .iter()
            .map(|b| match b {
                DimBasis::Identity => "identity",
                DimBasis::Haar => "haar",
            })
            .collect::<Vec<_>>()
            .join("|"),
    );
    measurements.push("sensitivity", rho_total);
    measurements.push("coefficients", coeffs.len());
    if !params.noise_enabled {
        measurements.push("non_private_bypass", true);
    }

    Ok(StrategyResult {
        answers,
        strategy: Strategy::Wavelet,
        epsilon: params.epsilon,
        noise_enabled: params.noise_enabled,
        seed,
        measurements,
    })
}

/// Apply `f` to every 1-D fiber along `dim` of a row-major array.
fn for_each_fiber(shape: &[usize], dim: usize, data: &mut [f64], f: impl Fn(&mut [f64])) {
    let n = shape[dim];
    let stride: usize = shape[dim + 1..].iter().product();
    let outer: usize = shape[..dim].iter().product();
    let mut fiber = vec![0.0; n];
    for o in 0..outer {
        for r in 0..stride {
            let base = o * n * stride + r;
            for (t, slot) in fiber.iter_mut().enumerate() {
                *slot = data[base + t * stride];
            }
            f(&mut fiber);
            for (t, value) in fiber.iter().enumerate() {
                data[base + t * stride] = *value;
            }
        }
    }
}

/// In-place 1-D Haar transform of a power-of-two-length slice.
///
/// Output layout: index 0 is the base coefficient (overall mean); index
/// `i >= 1` is the detail of the tree node at depth `ilog2(i)` from the root.
fn haar_forward(v: &mut [f64]) {
    debug_assert!(v.len().is_power_of_two());
    let mut len = v.len();
    let mut tmp = vec![0.0; len];
    while len > 1 {
        let half = len / 2;
        for i in 0..half {
            tmp[i] = (v[2 * i] + v[2 * i + 1]) / 2.0;
            tmp[half + i] = (v[2 * i] - v[2 * i + 1]) / 2.0;
        }
        v[..len].copy_from_slice(&tmp[..len]);
        len = half;
    }
}

/// Inverse of [`haar_forward`].
fn haar_inverse(v: &mut [f64]) {
    debug_assert!(v.len().is_power_of_two());
    let mut len = 2;
    let mut tmp = vec![0.0; v.len()];
    while len <= v.len() {
        let half = len / 2;
        for i in 0..half {
            tmp[2 * i] = v[i] + v[half + i];
            tmp[2 * i + 1] = v[i] - v[half + i];
        }
        v[..len].copy_from_slice(&tmp[..len]);
        len *= 2;
    }
}
