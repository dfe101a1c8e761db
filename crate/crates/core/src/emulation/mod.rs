//! Fleet data-sharing emulation: vehicle nodes, a central aggregator, and
//! the two privacy regimes.
//!
//! * **GDP** (global): every node ships its raw training data; the
//!   aggregator pools it in node-id order, perturbs the pooled records once,
//!   and trains a single shared predictor.
//! * **LDP** (local): each node perturbs its own records before anything
//!   leaves the vehicle, and a personal predictor is trained per node.
//!
//! Service quality is validation accuracy on each node's clean held-out
//! split (the deployed predictor serves un-noised inputs). Both pipelines
//! exist in-process here and over a loopback TCP protocol in [`wire`]; the
//! randomized steps are keyed to seed substreams by role and node id, so the
//! two transports produce bit-identical reports.
//!
//! The synthetic fleet mimics per-driver heterogeneity: class-conditional
//! feature clusters whose means drift per node with strength `h`. At `h = 0`
//! all nodes share one distribution; as `h` grows, a pooled model fits no
//! node particularly well while per-node models stay matched, which is what
//! gives local training its edge.

pub mod predictor;
pub mod wire;

pub use predictor::{train_predictor, Hyperparams, LinearModel};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{RngSeed, SplitMix64};

/// A feature matrix (unit-interval rows) with one categorical label each.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSet {
    pub features: Vec<Vec<f64>>,
    pub labels: Vec<u32>,
}

impl SampleSet {
    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }
}

/// One vehicle node's data: an 80/20 train/validation split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeDataset {
    pub node_id: u32,
    pub train: SampleSet,
    pub valid: SampleSet,
}

/// Synthetic fleet shape.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FleetConfig {
    pub nodes: u32,
    /// Records per node before the 80/20 split.
    pub per_node: usize,
    pub feature_dim: usize,
    pub classes: u32,
    /// Heterogeneity strength: per-node, per-class mean drift amplitude.
    pub heterogeneity: f64,
    pub seed: RngSeed,
}

impl Default for FleetConfig {
    fn default() -> Self {
        // heterogeneity 0.5 makes per-node training beat pooled training
        // once feature noise is moderate (eps >= 1), while pooled training
        // still clears chance level; smaller values let the aggregator's
        // 10x data volume win instead
        Self {
            nodes: 10,
            per_node: 150,
            feature_dim: 12,
            classes: 4,
            heterogeneity: 0.5,
            seed: RngSeed(0),
        }
    }
}

/// Amplitude of the fixed class-mean pattern around 0.5.
const CLASS_AMPLITUDE: f64 = 0.18;
/// Within-class feature scatter.
const CLASS_SCATTER: f64 = 0.08;

/// The global mean of feature `j` for class `c`: a fixed +-amplitude pattern
/// independent of the fleet seed, so different seeds share one geometry.
fn class_mean(class: u32, feature: usize) -> f64 {
    let bit = crate::rng::mix64(((u64::from(class)) << 32) ^ feature as u64) & 1;
    if bit == 1 {
        0.5 + CLASS_AMPLITUDE
    } else {
        0.5 - CLASS_AMPLITUDE
    }
}

/// Generate the synthetic fleet. Deterministic given the config.
pub fn gen_fleet(cfg: &FleetConfig) -> Result<Vec<NodeDataset>> {
    if cfg.nodes == 0 {
        return Err(Error::InvalidParameter(
            "fleet needs at least one node".into(),
        ));
    }
    if cfg.classes == 0 || cfg.feature_dim == 0 {
        return Err(Error::InvalidParameter(
            "degenerate fleet configuration".into(),
        ));
    }
    if cfg.per_node < 5 * cfg.classes as usize {
        return Err(Error::InvalidParameter(format!(
            "per_node must be at least 5x the class count, got {} for {} classes",
            cfg.per_node, cfg.classes
        )));
    }
    if cfg.heterogeneity < 0.0 {
        return Err(Error::InvalidParameter("heterogeneity must be >= 0".into()));
    }

    let mut fleet = Vec::with_capacity(cfg.nodes as usize);
    for node_id in 0..cfg.nodes {
        let mut rng = cfg
            .seed
            .substream_named("fleet")
            .substream(u64::from(node_id))
            .rng();
        // node-specific per-class mean drift of magnitude h
        let mut drift = vec![0.0f64; cfg.classes as usize * cfg.feature_dim];
        for d in &mut drift {
            *d = cfg.heterogeneity * (2.0 * rng.next_f64() - 1.0);
        }
        let mut features = Vec::with_capacity(cfg.per_node);
        let mut labels = Vec::with_capacity(cfg.per_node);
        for i in 0..cfg.per_node {
            // the first k records cycle the classes so that every class is
            // present at every node (class counts must agree globally)
            let class = if i < cfg.classes as usize {
                i as u32
            } else {
                rng.next_below(u64::from(cfg.classes)) as u32
            };
            let row: Vec<f64> = (0..cfg.feature_dim)
                .map(|j| {
                    let mu = class_mean(class, j) + drift[class as usize * cfg.feature_dim + j];
                    (mu + CLASS_SCATTER * rng.normal()).clamp(0.0, 1.0)
                })
                .collect();
            features.push(row);
            labels.push(class);
        }
        let train_len = cfg.per_node * 4 / 5;
        let valid = SampleSet {
            features: features.split_off(train_len),
            labels: labels.split_off(train_len),
        };
        fleet.push(NodeDataset {
            node_id,
            train: SampleSet { features, labels },
            valid,
        });
    }
    Ok(fleet)
}

/// Per-element `Laplace(1/ε)` on unit-interval features, clamped back.
pub fn noise_features(
    features: &[Vec<f64>],
    epsilon: f64,
    rng: &mut SplitMix64,
) -> Result<Vec<Vec<f64>>> {
    if epsilon <= 0.0 || !epsilon.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    let scale = 1.0 / epsilon;
    Ok(features
        .iter()
        .map(|row| {
            row.iter()
                .map(|&v| (v + rng.laplace(scale)).clamp(0.0, 1.0))
                .collect()
        })
        .collect())
}

/// k-ary randomized response: keep the label with probability
/// `e^ε / (e^ε + k - 1)`, otherwise draw uniformly from the other classes.
pub fn noise_labels(
    labels: &[u32],
    classes: u32,
    epsilon: f64,
    rng: &mut SplitMix64,
) -> Result<Vec<u32>> {
    if epsilon <= 0.0 || !epsilon.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    if classes == 0 {
        return Err(Error::InvalidParameter("need at least one class".into()));
    }
    let keep = keep_probability(classes, epsilon);
    Ok(labels
        .iter()
        .map(|&y| {
            if classes == 1 || rng.next_f64() < keep {
                y
            } else {
                let other = rng.next_below(u64::from(classes) - 1) as u32;
                if other < y {
                    other
                } else {
                    other + 1
                }
            }
        })
        .collect())
}

/// `e^ε / (e^ε + k - 1)`.
pub fn keep_probability(classes: u32, epsilon: f64) -> f64 {
    let e = epsilon.exp();
    e / (e + f64::from(classes) - 1.0)
}

/// Validation accuracy of one node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeAccuracy {
    pub node_id: u32,
    pub accuracy: f64,
}

/// Outcome of one pipeline run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineReport {
    pub mode: String,
    pub eps_image: f64,
    pub eps_text: Option<f64>,
    pub per_node: Vec<NodeAccuracy>,
    pub mean_accuracy: f64,
    pub seed: u64,
}

impl PipelineReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_csv(&self) -> String {
        let eps_text = self
            .eps_text
            .map_or_else(|| "none".into(), |e| e.to_string());
        let mut out = String::from("mode,eps_img,eps_txt,node_id,accuracy,seed\n");
        for n in &self.per_node {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                self.mode, self.eps_image, eps_text, n.node_id, n.accuracy, self.seed
            ));
        }
        out.push_str(&format!(
            "{},{},{},mean,{},{}\n",
            self.mode, self.eps_image, eps_text, self.mean_accuracy, self.seed
        ));
        out
    }
}

fn check_fleet(nodes: &[NodeDataset]) -> Result<()> {
    if nodes.is_empty() {
        return Err(Error::InvalidParameter("empty fleet".into()));
    }
    let mut ids: Vec<u32> = nodes.iter().map(|n| n.node_id).collect();
    ids.sort_unstable();
    if ids.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidParameter("duplicate node_id in fleet".into()));
    }
    Ok(())
}

pub(crate) fn infer_classes(nodes: &[NodeDataset]) -> u32 {
    nodes
        .iter()
        .flat_map(|n| n.train.labels.iter().chain(&n.valid.labels))
        .copied()
        .max()
        .map_or(1, |m| m + 1)
}

fn sorted_refs(nodes: &[NodeDataset]) -> Vec<&NodeDataset> {
    let mut refs: Vec<&NodeDataset> = nodes.iter().collect();
    refs.sort_by_key(|n| n.node_id);
    refs
}

/// The node-local half of the LDP pipeline: perturb one node's training set
/// exactly as the in-process pipeline would. This is everything that leaves
/// the vehicle in LDP mode.
pub fn ldp_localize(
    node: &NodeDataset,
    classes: u32,
    eps_image: f64,
    eps_text: Option<f64>,
    seed: RngSeed,
) -> Result<SampleSet> {
    let mut rng = seed
        .substream_named("ldp-noise")
        .substream(u64::from(node.node_id))
        .rng();
    let features = noise_features(&node.train.features, eps_image, &mut rng)?;
    let labels = match eps_text {
        Some(eps) => {
            let mut lrng = seed
                .substream_named("ldp-labels")
                .substream(u64::from(node.node_id))
                .rng();
            noise_labels(&node.train.labels, classes, eps, &mut lrng)?
        }
        None => node.train.labels.clone(),
    };
    Ok(SampleSet { features, labels })
}

/// Global-DP pipeline: pool raw training data in node-id order, perturb the
/// pool once, train one shared model, validate per node on clean splits.
pub fn gdp_pipeline(
    nodes: &[NodeDataset],
    eps_image: f64,
    eps_text: Option<f64>,
    seed: RngSeed,
) -> Result<PipelineReport> {
    check_fleet(nodes)?;
    let ordered = sorted_refs(nodes);
    let classes = infer_classes(nodes);

    let mut pooled_features = Vec::new();
    let mut pooled_labels = Vec::new();
    for node in &ordered {
        pooled_features.extend(node.train.features.iter().cloned());
        pooled_labels.extend(node.train.labels.iter().copied());
    }

    let mut rng = seed.substream_named("gdp-noise").rng();
    let noised_features = noise_features(&pooled_features, eps_image, &mut rng)?;
    let noised_labels = match eps_text {
        Some(eps) => {
            let mut lrng = seed.substream_named("gdp-labels").rng();
            noise_labels(&pooled_labels, classes, eps, &mut lrng)?
        }
        None => pooled_labels,
    };

    let model = train_predictor(
        &noised_features,
        &noised_labels,
        classes,
        &Hyperparams::default(),
    )?;
    let per_node: Vec<NodeAccuracy> = ordered
        .iter()
        .map(|n| NodeAccuracy {
            node_id: n.node_id,
            accuracy: model.accuracy(&n.valid.features, &n.valid.labels),
        })
        .collect();
    let mean_accuracy = per_node.iter().map(|n| n.accuracy).sum::<f64>() / per_node.len() as f64;

    Ok(PipelineReport {
        mode: "gdp".into(),
        eps_image,
        eps_text,
        per_node,
        mean_accuracy,
        seed: seed.0,
    })
}

/// Train per-node models from already-localized (noised) training sets and
/// evaluate on the clean validation splits. Shared by the in-process LDP
/// pipeline and the networked aggregator.
pub fn ldp_train_eval(
    localized: &[(u32, SampleSet)],
    valid: &[(u32, &SampleSet)],
    classes: u32,
    eps_image: f64,
    eps_text: Option<f64>,
    seed: RngSeed,
) -> Result<PipelineReport> {
    let mut per_node = Vec::with_capacity(localized.len());
    for ((node_id, train), (vid, vset)) in localized.iter().zip(valid) {
        debug_assert_eq!(node_id, vid);
        let model = train_predictor(
            &train.features,
            &train.labels,
            classes,
            &Hyperparams::default(),
        )?;
        per_node.push(NodeAccuracy {
            node_id: *node_id,
            accuracy: model.accuracy(&vset.features, &vset.labels),
        });
    }
    let mean_accuracy = per_node.iter().map(|n| n.accuracy).sum::<f64>() / per_node.len() as f64;
    Ok(PipelineReport {
        mode: "ldp".into(),
        eps_image,
        eps_text,
        per_node,
        mean_accuracy,
        seed: seed.0,
    })
}

/// Local-DP pipeline: each node perturbs its own training data (features,
/// and labels when `eps_text` is given), trains a personal model, and
/// validates on its clean split.
pub fn ldp_pipeline(
    nodes: &[NodeDataset],
    eps_image: f64,
    eps_text: Option<f64>,
    seed: RngSeed,
) -> Result<PipelineReport> {
    check_fleet(nodes)?;
    let ordered = sorted_refs(nodes);
    let classes = infer_classes(nodes);
    let localized = ordered
        .iter()
        .map(|n| {
            Ok((
                n.node_id,
                ldp_localize(n, classes, eps_image, eps_text, seed)?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let valid: Vec<(u32, &SampleSet)> = ordered.iter().map(|n| (n.node_id, &n.valid)).collect();
    ldp_train_eval(&localized, &valid, classes, eps_image, eps_text, seed)
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let rank = |v: &[f64]| -> Vec<f64> {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&a, &b| v[a].partial_cmp(&v[b]).expect("finite values"));
        let mut ranks = vec![0.0; v.len()];
        let mut i = 0;
        while i < idx.len() {
            let mut j = i;
            while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
                j += 1;
            }
            let avg = (i + j) as f64 / 2.0 + 1.0;
            for &k in &idx[i..=j] {
                ranks[k] = avg;
            }
            i = j + 1;
        }
        ranks
    };
    let rx = rank(xs);
    let ry = rank(ys);
    let n = xs.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    if vx == 0.0 || vy == 0.0 {
        return 0.0;
    }
    cov / (vx * vy).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fleet_generation_is_deterministic() {
        let cfg = FleetConfig::default();
        assert_eq!(gen_fleet(&cfg).unwrap(), gen_fleet(&cfg).unwrap());
        let other = FleetConfig {
            seed: RngSeed(1),
            ..cfg
        };
        assert_ne!(
            gen_fleet(&other).unwrap(),
            gen_fleet(&FleetConfig::default()).unwrap()
        );
    }

    #[test]
    fn fleet_respects_shape_and_split() {
        let cfg = FleetConfig {
            nodes: 3,
            per_node: 50,
            ..Default::default()
        };
        let fleet = gen_fleet(&cfg).unwrap();
        assert_eq!(fleet.len(), 3);
        for (i, node) in fleet.iter().enumerate() {
            assert_eq!(node.node_id, i as u32);
            assert_eq!(node.train.len(), 40);
            assert_eq!(node.valid.len(), 10);
            assert!(node
                .train
                .features
                .iter()
                .chain(&node.valid.features)
                .all(|row| row.len() == cfg.feature_dim
                    && row.iter().all(|v| (0.0..=1.0).contains(v))));
        }
    }

    #[test]
    fn zero_heterogeneity_gives_one_shared_distribution() {
        // with h=0 the per-class sample means agree across nodes up to scatter
        let cfg = FleetConfig {
            nodes: 10,
            per_node: 400,
            heterogeneity: 0.0,
            ..Default::default()
        };
        let fleet = gen_fleet(&cfg).unwrap();
        let mean_of = |node: &NodeDataset, class: u32| -> f64 {
            let rows: Vec<&Vec<f64>> = node
                .train
                .features
                .iter()
                .zip(&node.train.labels)
                .filter(|(_, &y)| y == class)
                .map(|(f, _)| f)
                .collect();
            rows.iter().map(|r| r[0]).sum::<f64>() / rows.len() as f64
        };
        let first = mean_of(&fleet[0], 0);
        for node in &fleet[1..] {
            assert!((mean_of(node, 0) - first).abs() < 0.06);
        }
    }

    #[test]
    fn heterogeneous_nodes_favor_per_node_models_on_clean_data() {
        let cfg = FleetConfig {
            heterogeneity: 0.3,
            per_node: 200,
            ..Default::default()
        };
        let fleet = gen_fleet(&cfg).unwrap();
        // pooled model
        let mut pf = Vec::new();
        let mut pl = Vec::new();
        for n in &fleet {
            pf.extend(n.train.features.iter().cloned());
            pl.extend(n.train.labels.iter().copied());
        }
        let pooled = train_predictor(&pf, &pl, cfg.classes, &Hyperparams::default()).unwrap();
        let mut pooled_acc = 0.0;
        let mut local_acc = 0.0;
        for n in &fleet {
            pooled_acc += pooled.accuracy(&n.valid.features, &n.valid.labels);
            let local = train_predictor(
                &n.train.features,
                &n.train.labels,
                cfg.classes,
                &Hyperparams::default(),
            )
            .unwrap();
            local_acc += local.accuracy(&n.valid.features, &n.valid.labels);
        }
        assert!(
            local_acc > pooled_acc,
            "local {local_acc} should beat pooled {pooled_acc} on a heterogeneous fleet"
        );
    }

    #[test]
    fn huge_epsilon_barely_perturbs_features() {
        let features = vec![vec![0.5; 64]; 50];
        let mut rng = RngSeed(4).rng();
        let noised = noise_features(&features, 1000.0, &mut rng).unwrap();
        let mean_abs: f64 = noised
            .iter()
            .flatten()
            .zip(features.iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
            / (64.0 * 50.0);
        assert!(mean_abs < 0.01, "mean |delta| = {mean_abs}");
    }

    #[test]
    fn noised_features_stay_clamped() {
        let features = vec![vec![0.0; 32]; 20];
        let mut rng = RngSeed(4).rng();
        let noised = noise_features(&features, 0.1, &mut rng).unwrap();
        assert!(noised.iter().flatten().all(|v| (0.0..=1.0).contains(v)));
        assert!(noise_features(&features, 0.0, &mut rng).is_err());
    }

    #[test]
    fn randomized_response_keep_rate_matches_closed_form() {
        // k=4, eps=0.9: e^0.9 / (e^0.9 + 3) ~ 0.4505
        let keep = keep_probability(4, 0.9);
        assert!((keep - 0.4505).abs() < 5e-4);
        let labels = vec![1u32; 100_000];
        let mut rng = RngSeed(6).rng();
        let noised = noise_labels(&labels, 4, 0.9, &mut rng).unwrap();
        let kept = noised.iter().filter(|&&y| y == 1).count() as f64 / labels.len() as f64;
        assert!(
            (kept - keep).abs() < 0.01,
            "empirical keep {kept} vs {keep}"
        );
        // flipped labels spread over the other classes only
        assert!(noised.iter().all(|&y| y < 4));
    }

    #[test]
    fn single_class_labels_are_always_kept() {
        let labels = vec![0u32; 1000];
        let mut rng = RngSeed(6).rng();
        assert_eq!(noise_labels(&labels, 1, 0.5, &mut rng).unwrap(), labels);
    }

    #[test]
    fn enormous_epsilon_keeps_labels() {
        let labels: Vec<u32> = (0..1000).map(|i| i % 4).collect();
        let mut rng = RngSeed(6).rng();
        assert_eq!(noise_labels(&labels, 4, 50.0, &mut rng).unwrap(), labels);
    }

    #[test]
    fn gdp_pools_every_training_record() {
        let cfg = FleetConfig {
            nodes: 4,
            per_node: 50,
            ..Default::default()
        };
        let fleet = gen_fleet(&cfg).unwrap();
        let report = gdp_pipeline(&fleet, 5.0, None, RngSeed(11)).unwrap();
        assert_eq!(report.per_node.len(), 4);
        assert_eq!(report.mode, "gdp");
        // aggregate size = sum of node training sizes is implicit; accuracy
        // must be a valid fraction on every node
        assert!(report
            .per_node
            .iter()
            .all(|n| (0.0..=1.0).contains(&n.accuracy)));
    }

    #[test]
    fn near_zero_noise_gdp_approaches_clean_pooled_training() {
        let cfg = FleetConfig {
            heterogeneity: 0.0,
            per_node: 200,
            ..Default::default()
        };
        let fleet = gen_fleet(&cfg).unwrap();
        // clean pooled baseline
        let mut pf = Vec::new();
        let mut pl = Vec::new();
        for n in &fleet {
            pf.extend(n.train.features.iter().cloned());
            pl.extend(n.train.labels.iter().copied());
        }
        let clean = train_predictor(&pf, &pl, cfg.classes, &Hyperparams::default()).unwrap();
        let clean_mean = fleet
            .iter()
            .map(|n| clean.accuracy(&n.valid.features, &n.valid.labels))
            .sum::<f64>()
            / fleet.len() as f64;
        let report = gdp_pipeline(&fleet, 1e6, None, RngSeed(11)).unwrap();
        assert!(
            (report.mean_accuracy - clean_mean).abs() <= 0.02,
            "noise-free limit {} vs clean {clean_mean}",
            report.mean_accuracy
        );
    }

    #[test]
    fn single_node_fleets_differ_only_in_rng_stream() {
        let cfg = FleetConfig {
            nodes: 1,
            per_node: 100,
            ..Default::default()
        };
        let fleet = gen_fleet(&cfg).unwrap();
        let g = gdp_pipeline(&fleet, 2.0, None, RngSeed(5)).unwrap();
        let l = ldp_pipeline(&fleet, 2.0, None, RngSeed(5)).unwrap();
        // same structure: one node validated on the same clean split
        assert_eq!(g.per_node.len(), 1);
        assert_eq!(l.per_node.len(), 1);
        assert_eq!(g.per_node[0].node_id, l.per_node[0].node_id);
    }

    #[test]
    fn empty_fleet_is_rejected() {
        assert!(gdp_pipeline(&[], 1.0, None, RngSeed(1)).is_err());
        assert!(ldp_pipeline(&[], 1.0, None, RngSeed(1)).is_err());
    }

    #[test]
    fn pipelines_are_deterministic_given_seed() {
        let fleet = gen_fleet(&FleetConfig {
            nodes: 3,
            per_node: 50,
            ..Default::default()
        })
        .unwrap();
        for f in [gdp_pipeline, ldp_pipeline] {
            let a = f(&fleet, 0.5, Some(0.9), RngSeed(8)).unwrap();
            let b = f(&fleet, 0.5, Some(0.9), RngSeed(8)).unwrap();
            assert_eq!(a.to_json(), b.to_json());
        }
    }

    #[test]
    fn spearman_agrees_with_hand_ranks() {
        assert_eq!(spearman(&[1.0, 2.0, 3.0], &[10.0, 20.0, 30.0]), 1.0);
        assert_eq!(spearman(&[1.0, 2.0, 3.0], &[30.0, 20.0, 10.0]), -1.0);
        let r = spearman(&[1.0, 2.0, 3.0, 4.0], &[1.0, 3.0, 2.0, 4.0]);
        assert!(r > 0.0 && r < 1.0);
    }
}
