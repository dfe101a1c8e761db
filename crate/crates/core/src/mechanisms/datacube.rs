//! Measured-marginal selection (max-error minimizing) for marginal workloads.
//!
//! Candidates are the workload's own marginals. A subset `C` is feasible when
//! every workload marginal `M` has a chosen `M'` with `attrs(M) ⊆ attrs(M')`,
//! in which case `M` is answered by aggregating the measured cells of the
//! covering `M'`. The privacy budget splits sequentially across the chosen
//! marginals (per-marginal sensitivity is 1: a record lands in exactly one
//! cell of each), so every measured cell gets `Laplace(|C| / ε)` and the
//! variance of answering `M` from `M'` is
//!
//! ```text
//! var(M from M') = 2 * (|C| / ε)^2 * g,   g = cells of M' per cell of M
//! ```
//!
//! Selection starts from the forced set (marginals not contained in any other
//! candidate can only cover themselves) and greedily adds candidates while
//! the worst-case variance strictly improves; ties prefer fewer cells, then
//! lexicographic attribute order. The grand total (all-range) is the 0-way
//! marginal, coverable by anything.

use std::collections::BTreeSet;

use crate::domain::{DataVector, Domain};
use crate::error::{Error, Result};
use crate::mechanisms::{check_domains, Measurements, PrivacyParams, Strategy, StrategyResult};
use crate::rng::RngSeed;
use crate::workload::Workload;

pub fn datacube_mechanism(
    workload: &Workload,
    x: &DataVector,
    params: &PrivacyParams,
    seed: RngSeed,
) -> Result<StrategyResult> {
    check_domains(workload, x)?;
    let specs = workload.marginals().ok_or_else(|| {
        Error::NonMarginalWorkload(format!(
            "{} workload has no marginal structure",
            workload.kind()
        ))
    })?;
    let domain = workload.domain();

    let candidates: Vec<Vec<usize>> = specs
        .iter()
        .map(|m| m.attrs.clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let targets = &candidates; // every workload marginal must be answerable

    let chosen = select_marginals(domain, &candidates, targets);
    let chosen_count = chosen.len();
    let scale = chosen_count as f64 / params.epsilon;

    // Measure each chosen marginal: true per-value-tuple counts plus noise,
    // cells in row-major value order, marginals in lexicographic order.
    let mut rng = seed.rng();
    let mut measured: Vec<Vec<f64>> = Vec::with_capacity(chosen_count);
    for attrs in &chosen {
        let mut table = marginal_table(domain, x.counts(), attrs);
        if params.noise_enabled {
            for v in &mut table {
                *v += rng.laplace(scale);
            }
        }
        measured.push(table);
    }

    // Answer every workload marginal from its best covering measurement.
    let mut answers = vec![0.0f64; workload.num_rows()];
    for spec in specs {
        let (ci, _) = best_cover(domain, &chosen, &spec.attrs)
            .expect("selection guarantees every workload marginal is covered");
        let source_attrs = &chosen[ci];
        let table = &measured[ci];
        let src_cards: Vec<usize> = source_attrs
            .iter()
            .map(|&a| domain.cardinality(a))
            .collect();
        for (u, value) in table.iter().enumerate() {
            // decode the source tuple, project onto the target subset
            let mut coords = vec![0usize; source_attrs.len()];
            let mut rest = u;
            for i in (0..source_attrs.len()).rev() {
                coords[i] = rest % src_cards[i];
                rest /= src_cards[i];
            }
            let mut t = 0usize;
            for &a in &spec.attrs {
                let pos = source_attrs
                    .iter()
                    .position(|&b| b == a)
                    .expect("cover is a superset");
                t = t * domain.cardinality(a) + coords[pos];
            }
            answers[spec.row_offset + t] += value;
        }
    }

    let mut measurements = Measurements::default();
    measurements.push("chosen", format_subsets(domain, &chosen));
    measurements.push("chosen_count", chosen_count);
    measurements.push(
        "measured_cells",
        measured.iter().map(Vec::len).sum::<usize>(),
    );
    let worst = objective(domain, &chosen, targets);
    measurements.push(
        "max_variance",
        2.0 * (scale * scale) * (worst / (chosen_count * chosen_count) as f64),
    );
    if params.noise_enabled {
        measurements.push("scale", scale);
    } else {
        measurements.push("non_private_bypass", true);
    }

    Ok(StrategyResult {
        answers,
        strategy: Strategy::DataCube,
        epsilon: params.epsilon,
        noise_enabled: params.noise_enabled,
        seed,
        measurements,
    })
}

fn is_subset(a: &[usize], b: &[usize]) -> bool {
    a.iter().all(|x| b.contains(x))
}

fn subset_cells(domain: &Domain, attrs: &[usize]) -> usize {
    attrs.iter().map(|&a| domain.cardinality(a)).product()
}

/// Cells of `from` aggregated per cell of `to` (`to ⊆ from`).
fn group_factor(domain: &Domain, to: &[usize], from: &[usize]) -> usize {
    from.iter()
        .filter(|a| !to.contains(a))
        .map(|&a| domain.cardinality(a))
        .product()
}

/// The covering marginal minimizing the aggregation factor; ties prefer
/// fewer cells, then lexicographic order (which the sorted `chosen` gives).
fn best_cover(domain: &Domain, chosen: &[Vec<usize>], target: &[usize]) -> Option<(usize, usize)> {
    chosen
        .iter()
        .enumerate()
        .filter(|(_, c)| is_subset(target, c))
        .map(|(i, c)| (group_factor(domain, target, c), subset_cells(domain, c), i))
        .min()
        .map(|(g, _, i)| (i, g))
}

/// Worst-case `|C|^2 * g` over the targets (the ε-free part of the variance);
/// infinite when some target is uncovered.
fn objective(domain: &Domain, chosen: &[Vec<usize>], targets: &[Vec<usize>]) -> f64 {
    let c2 = (chosen.len() * chosen.len()) as f64;
    targets
        .iter()
        .map(|t| best_cover(domain, chosen, t).map_or(f64::INFINITY, |(_, g)| c2 * g as f64))
        .fold(0.0, f64::max)
}

/// Greedy subset selection minimizing the max-variance objective.
fn select_marginals(
    domain: &Domain,
    candidates: &[Vec<usize>],
    targets: &[Vec<usize>],
) -> Vec<Vec<usize>> {
    // Forced: candidates not strictly contained in any other candidate can
    // only be covered by themselves.
    let mut chosen: Vec<Vec<usize>> = candidates
        .iter()
        .filter(|c| !candidates.iter().any(|o| *o != **c && is_subset(c, o)))
        .cloned()
        .collect();
    chosen.sort();

    loop {
        let current = objective(domain, &chosen, targets);
        let mut best: Option<(f64, usize, Vec<usize>)> = None;
        for cand in candidates {
            if chosen.contains(cand) {
                continue;
            }
            let mut with = chosen.clone();
            with.push(cand.clone());
            with.sort();
            let obj = objective(domain, &with, targets);
            if obj < current {
                let key = (obj, subset_cells(domain, cand), cand.clone());
                if best.as_ref().is_none_or(|b| key < *b) {
                    best = Some(key);
                }
            }
        }
        match best {
            Some((_, _, cand)) => {
                chosen.push(cand);
                chosen.sort();
            }
            None => return chosen,
        }
    }
}

fn format_subsets(domain: &Domain, subsets: &[Vec<usize>]) -> String {
    subsets
        .iter()
        .map(|s| {
            if s.is_empty() {
                "total".to_string()
            } else {
                s.iter()
                    .map(|&a| domain.attributes()[a].name.clone())
                    .collect::<Vec<_>>()
                    .join("+")
            }
        })
        .collect::<Vec<_>>()
        .join("|")
}

/// True marginal counts of `attrs`, row-major value order.
fn marginal_table(domain: &Domain, counts: &[f64], attrs: &[usize]) -> Vec<f64> {
    let size = subset_cells(domain, attrs);
    let mut table = vec![0.0f64; size];
    for (cell, &c) in counts.iter().enumerate() {
        let coords = domain.decode(cell);
        let mut v = 0usize;
        for &a in attrs {
            v = v * domain.cardinality(a) + coords[a];
        }
        table[v] += c;
    }
    table
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Domain;
    use crate::mechanisms::test_support::*;
    use crate::workload::{all_range, evaluate, k_way_marginal, Workload};

    #[test]
    fn single_marginal_workload_measures_itself() {
        let d = Domain::new(vec![("A", 4)]).unwrap();
        let x = random_vector(&d, 3);
        let p = PrivacyParams::new(0.5).unwrap();
        let w = k_way_marginal(&d, 1).unwrap();
        let r = datacube_mechanism(&w, &x, &p, RngSeed(5)).unwrap();
        assert_eq!(r.measurements.get("chosen"), Some("A"));
        assert_eq!(r.measurements.get("chosen_count"), Some("1"));
        assert_eq!(r.measurements.get("scale"), Some("2")); // 1 / 0.5
    }

    #[test]
    fn incomparable_one_way_marginals_force_the_full_set() {
        let d = Domain::new(vec![("a", 2), ("b", 2), ("c", 2)]).unwrap();
        let x = random_vector(&d, 3);
        let p = PrivacyParams::new(1.0).unwrap();
        let w = k_way_marginal(&d, 1).unwrap();
        let r = datacube_mechanism(&w, &x, &p, RngSeed(5)).unwrap();
        assert_eq!(r.measurements.get("chosen"), Some("a|b|c"));
        assert_eq!(r.measurements.get("scale"), Some("3")); // budget eps/3 each
    }

    #[test]
    fn greedy_matches_exhaustive_search_on_binary_cube() {
        let d = Domain::new(vec![("a", 2), ("b", 2), ("c", 2)]).unwrap();
        let w = k_way_marginal(&d, 1).unwrap();
        let specs = w.marginals().unwrap();
        let candidates: Vec<Vec<usize>> = specs.iter().map(|m| m.attrs.clone()).collect();

        let greedy = select_marginals(&d, &candidates, &candidates);
        let greedy_obj = objective(&d, &greedy, &candidates);

        // exhaustive over the 2^3 - 1 non-empty candidate subsets
        let mut best = f64::INFINITY;
        for mask in 1usize..(1 << candidates.len()) {
            let subset: Vec<Vec<usize>> = candidates
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, c)| c.clone())
                .collect();
            best = best.min(objective(&d, &subset, &candidates));
        }
        assert_eq!(greedy_obj, best);
    }

    #[test]
    fn all_range_is_the_zero_way_marginal() {
        let d = domain_4x8();
        let x = random_vector(&d, 3);
        let p = PrivacyParams::new(1.0).unwrap();
        let r = datacube_mechanism(&all_range(&d), &x, &p, RngSeed(5)).unwrap();
        assert_eq!(r.measurements.get("chosen"), Some("total"));
        assert_eq!(r.measurements.get("scale"), Some("1"));
        assert_eq!(r.answers.len(), 1);
    }

    #[test]
    fn aggregated_answers_are_exact_without_noise() {
        let d = domain_4x8();
        let x = random_vector(&d, 6);
        let p = PrivacyParams::exact(1.0).unwrap();
        let w = k_way_marginal(&d, 1).unwrap();
        let r = datacube_mechanism(&w, &x, &p, RngSeed(5)).unwrap();
        let want = evaluate(&w, &x).unwrap();
        assert!(max_rel_err(&r.answers, &want) <= 1e-9);
    }

    #[test]
    fn projection_from_a_covering_marginal_aggregates_correctly() {
        // workload: 1-way and 2-way marginals together; the 1-ways are
        // covered by 2-way supersets instead of being measured separately
        let d = Domain::new(vec![("a", 2), ("b", 2)]).unwrap();
        let x = random_vector(&d, 6);
        let one = k_way_marginal(&d, 1).unwrap();
        let two = k_way_marginal(&d, 2).unwrap();
        let mut rows = two.rows().to_vec();
        rows.extend(one.rows().iter().cloned());
        // stitch a combined workload with both marginal blocks
        let w = {
            let mut m = two.marginals().unwrap().to_vec();
            for spec in one.marginals().unwrap() {
                m.push(crate::workload::MarginalSpec {
                    attrs: spec.attrs.clone(),
                    row_offset: spec.row_offset + two.num_rows(),
                    row_count: spec.row_count,
                });
            }
            Workload::from_marginal_rows(d.clone(), rows, m).unwrap()
        };
        let p = PrivacyParams::exact(1.0).unwrap();
        let r = datacube_mechanism(&w, &x, &p, RngSeed(5)).unwrap();
        assert_eq!(r.measurements.get("chosen"), Some("a+b"));
        let want = evaluate(&w, &x).unwrap();
        assert!(max_rel_err(&r.answers, &want) <= 1e-9);
    }

    #[test]
    fn custom_workloads_are_rejected() {
        let d = domain_4x8();
        let x = random_vector(&d, 3);
        let p = PrivacyParams::new(1.0).unwrap();
        let w = Workload::from_rows(d, vec![vec![(0, 1.0)]]).unwrap();
        assert!(matches!(
            datacube_mechanism(&w, &x, &p, RngSeed(5)),
            Err(Error::NonMarginalWorkload(_))
        ));
    }
}
