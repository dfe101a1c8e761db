//! Noisy binary interval tree over the flattened cell vector.
//!
//! The first measurement is the sum of all cells; each further level halves
//! the intervals down to single cells. With `L = ceil(log2(n)) + 1` levels a
//! record touches one node per level, so the tree's sensitivity is `L` and
//! every node is measured with `Laplace(L / ε)`. Multi-dimensional domains
//! are flattened row-major; sizes that are not a power of two are padded with
//! structurally-zero cells (recorded in the measurements).
//!
//! A workload row is answered by the canonical minimal node cover of its
//! selected cells: each maximal run of equally-weighted cells decomposes into
//! at most `2 * log2(n)` tree nodes, whose noisy values are summed.
//!
//! An optional least-squares consistency pass (off by default) re-estimates
//! every node from the whole tree so that children sum exactly to parents;
//! it is linear in the measurements, hence still unbiased.

use crate::domain::DataVector;
use crate::error::Result;
use crate::mechanisms::{check_domains, Measurements, PrivacyParams, Strategy, StrategyResult};
use crate::rng::RngSeed;
use crate::workload::Workload;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct HierarchicalConfig {
    /// Enable the least-squares consistency pass.
    pub consistency: bool,
}

/// [`hierarchical_mechanism_with`] with consistency disabled.
pub fn hierarchical_mechanism(
    workload: &Workload,
    x: &DataVector,
    params: &PrivacyParams,
    seed: RngSeed,
) -> Result<StrategyResult> {
    hierarchical_mechanism_with(&HierarchicalConfig::default(), workload, x, params, seed)
}

pub fn hierarchical_mechanism_with(
    config: &HierarchicalConfig,
    workload: &Workload,
    x: &DataVector,
    params: &PrivacyParams,
    seed: RngSeed,
) -> Result<StrategyResult> {
    check_domains(workload, x)?;
    let n = workload.domain().total_size();
    let n_pad = n.next_power_of_two();
    let levels = n_pad.trailing_zeros() + 1; // == ceil(log2(n)) + 1
    let scale = f64::from(levels) / params.epsilon;

    // Heap-ordered tree: node i has children 2i+1 and 2i+2; leaf j sits at
    // n_pad - 1 + j. True interval sums first.
    let node_count = 2 * n_pad - 1;
    let mut nodes = vec![0.0f64; node_count];
    nodes[n_pad - 1..n_pad - 1 + n].copy_from_slice(x.counts());
    for i in (0..n_pad - 1).rev() {
        nodes[i] = nodes[2 * i + 1] + nodes[2 * i + 2];
    }

    // Measure every node, level order.
    if params.noise_enabled {
        let mut rng = seed.rng();
        for v in &mut nodes {
            *v += rng.laplace(scale);
        }
    }

    if config.consistency {
        enforce_consistency(&mut nodes, n_pad);
    }

    // Answer rows by canonical interval covers of equal-weight runs.
    let mut max_cover = 0usize;
    let mut answers = Vec::with_capacity(workload.num_rows());
    for row in workload.rows() {
        let mut acc = 0.0;
        let mut cover_size = 0usize;
        let mut i = 0;
        while i < row.len() {
            let (start, weight) = row[i];
            let mut end = start + 1;
            let mut j = i + 1;
            while j < row.len() && row[j].0 == end && row[j].1 == weight {
                end += 1;
                j += 1;
            }
            if weight != 0.0 {
                let mut run = 0.0;
                cover_size += cover_sum(&nodes, 0, 0, n_pad, start, end, &mut run);
                acc += weight * run;
            }
            i = j;
        }
        max_cover = max_cover.max(cover_size);
        answers.push(acc);
    }

    let mut measurements = Measurements::default();
    measurements.push("levels", levels);
    measurements.push("padded_cells", n_pad - n);
    measurements.push("max_cover", max_cover);
    measurements.push("consistency", config.consistency);
    if params.noise_enabled {
        measurements.push("scale", scale);
    } else {
        measurements.push("non_private_bypass", true);
    }

    Ok(StrategyResult {
        answers,
        strategy: Strategy::Hierarchical,
        epsilon: params.epsilon,
        noise_enabled: params.noise_enabled,
        seed,
        measurements,
    })
}

/// Sum the canonical node cover of `[a, b)` into `acc`; returns nodes used.
fn cover_sum(
    nodes: &[f64],
    idx: usize,
    lo: usize,
    hi: usize,
    a: usize,
    b: usize,
    acc: &mut f64,
) -> usize {
    if a <= lo && hi <= b {
        *acc += nodes[idx];
        return 1;
    }
    let mid = (lo + hi) / 2;
    let mut used = 0;
    if a < mid {
        used += cover_sum(nodes, 2 * idx + 1, lo, mid, a, b.min(mid), acc);
    }
    if b > mid {
        used += cover_sum(nodes, 2 * idx + 2, mid, hi, a.max(mid), b, acc);
    }
    used
}

/// Least-squares consistency (binary tree): an upward sweep combines each
/// node's own measurement with its children's estimates by inverse variance,
/// then a downward sweep spreads the residual so children sum to parents.
fn enforce_consistency(nodes: &mut [f64], n_pad: usize) {
    let height_of = |idx: usize| -> u32 {
        let depth = (idx + 1).ilog2();
        n_pad.trailing_zeros() - depth
    };
    let mut z = nodes.to_vec();
    for idx in (0..n_pad - 1).rev() {
        let h = height_of(idx);
        // alpha = 2^h / (2^(h+1) - 1)
        let alpha = (1u64 << h) as f64 / ((1u64 << (h + 1)) as f64 - 1.0);
        z[idx] = alpha * nodes[idx] + (1.0 - alpha) * (z[2 * idx + 1] + z[2 * idx + 2]);
    }
    nodes[0] = z[0];
    for idx in 0..n_pad - 1 {
        let (l, r) = (2 * idx + 1, 2 * idx + 2);
        let residual = (nodes[idx] - z[l] - z[r]) / 2.0;
        nodes[l] = z[l] + residual;
        nodes[r] = z[r] + residual;
    }
}
