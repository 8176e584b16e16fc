//! Clustering of sampled answers and majority-vote selection.

use std::collections::HashMap;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use sha2::{Digest, Sha256};

use crate::answer::{AnswerKind, CanonicalAnswer};
use crate::error::{Error, Result};
use crate::record::Instance;

/// Samples sharing one canonical answer.
#[derive(Debug, Clone, PartialEq)]
pub struct Cluster {
    pub answer: CanonicalAnswer,
    /// Strictly increasing sample indices.
    pub member_indices: Vec<usize>,
}

impl Cluster {
    pub fn size(&self) -> usize {
        self.member_indices.len()
    }
}

/// Partition of an instance's samples into answer clusters, with the
/// majority cluster marked.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterSet {
    /// Ordered by first-member index.
    pub clusters: Vec<Cluster>,
    pub total_samples: usize,
    /// Index of the winning cluster; `None` means abstain (every sample
    /// was unparseable).
    pub selected: Option<usize>,
}

impl ClusterSet {
    pub fn cluster_count(&self) -> usize {
        self.clusters.len()
    }

    pub fn selected_cluster(&self) -> Option<&Cluster> {
        self.selected.map(|i| &self.clusters[i])
    }

    pub fn is_abstain(&self) -> bool {
        self.selected.is_none()
    }
}

/// Group answers by exact canonical equality and select the largest valid
/// cluster.
///
/// Invalid answers all land in a single cluster that counts toward the
/// total and the cluster number but can never be selected. Size ties are
/// broken in favor of the cluster whose first member was sampled earliest.
///
/// # Panics
///
/// Panics on an empty answer list.
pub fn cluster_samples(answers: &[CanonicalAnswer]) -> ClusterSet {
    assert!(!answers.is_empty(), "cluster_samples: empty answer list");

    let mut by_answer: HashMap<CanonicalAnswer, usize> = HashMap::new();
    let mut clusters: Vec<Cluster> = Vec::new();
    for (i, answer) in answers.iter().enumerate() {
        // Any invalid answer keys the same cluster regardless of its value.
        let key = if answer.kind == AnswerKind::Invalid {
            CanonicalAnswer::invalid()
        } else {
            answer.clone()
        };
        let idx = *by_answer.entry(key.clone()).or_insert_with(|| {
            clusters.push(Cluster {
                answer: key,
                member_indices: Vec::new(),
            });
            clusters.len() - 1
        });
        clusters[idx].member_indices.push(i);
    }

    // Clusters are in first-member order, so a strict size comparison
    // gives the first-occurrence tie rule for free.
    let mut selected: Option<usize> = None;
    for (idx, cluster) in clusters.iter().enumerate() {
        if cluster.answer.kind == AnswerKind::Invalid {
            continue;
        }
        match selected {
            Some(best) if clusters[best].size() >= cluster.size() => {}
            _ => selected = Some(idx),
        }
    }

    ClusterSet {
        total_samples: answers.len(),
        clusters,
        selected,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubsampleMode {
    /// First n samples in original order.
    Prefix,
    /// Uniform without replacement, order-preserving, keyed by
    /// (seed, instance id, n).
    SeededRandom(u64),
}

/// Restrict an instance to n of its samples.
pub fn subsample(instance: &Instance, n: usize, mode: SubsampleMode) -> Result<Instance> {
    let available = instance.samples.len();
    if n == 0 || n > available {
        return Err(Error::SubsampleOutOfRange {
            id: instance.id.clone(),
            n,
            available,
        });
    }
    let keep: Vec<usize> = match mode {
        SubsampleMode::Prefix => (0..n).collect(),
        SubsampleMode::SeededRandom(seed) => {
            let mut rng = instance_rng(seed, &instance.id, n);
            let mut picked = index::sample(&mut rng, available, n).into_vec();
            picked.sort_unstable();
            picked
        }
    };
    let mut out = instance.clone();
    out.samples = keep.into_iter().map(|i| instance.samples[i].clone()).collect();
    Ok(out)
}

/// Stable per-instance RNG so subsampling does not depend on dataset order
/// or platform hashing.
fn instance_rng(seed: u64, id: &str, n: usize) -> ChaCha12Rng {
    let mut hasher = Sha256::new();
    hasher.update(seed.to_le_bytes());
    hasher.update((id.len() as u64).to_le_bytes());
    hasher.update(id.as_bytes());
    hasher.update((n as u64).to_le_bytes());
    let digest = hasher.finalize();
    ChaCha12Rng::from_seed(digest.into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::record::Sample;

    fn numerics(values: &[&str]) -> Vec<CanonicalAnswer> {
        values.iter().map(|v| CanonicalAnswer::numeric(*v)).collect()
    }

    /// 8 x "4", 5 x "6", 3 x invalid, interleaved.
    pub(crate) fn canonical_16_sample_answers() -> Vec<CanonicalAnswer> {
        (0..16)
            .map(|i| match i {
                0 | 2 | 4 | 6 | 8 | 10 | 12 | 14 => CanonicalAnswer::numeric("4"),
                1 | 3 | 5 | 7 | 9 => CanonicalAnswer::numeric("6"),
                _ => CanonicalAnswer::invalid(),
            })
            .collect()
    }

    #[test]
    fn simple_majority() {
        let cs = cluster_samples(&numerics(&["12", "12", "7"]));
        assert_eq!(cs.cluster_count(), 2);
        assert_eq!(cs.clusters[0].size(), 2);
        assert_eq!(cs.clusters[1].size(), 1);
        assert_eq!(cs.selected_cluster().unwrap().answer.value, "12");
    }

    #[test]
    fn tie_goes_to_first_sampled() {
        let cs = cluster_samples(&numerics(&["5", "9", "5", "9"]));
        assert_eq!(cs.selected_cluster().unwrap().answer.value, "5");
    }

    #[test]
    fn all_invalid_abstains_as_one_cluster() {
        let cs = cluster_samples(&[CanonicalAnswer::invalid(), CanonicalAnswer::invalid()]);
        assert_eq!(cs.cluster_count(), 1);
        assert!(cs.is_abstain());
        assert_eq!(cs.clusters[0].size(), 2);
    }

    #[test]
    fn canonical_16_sample_partition() {
        let cs = cluster_samples(&canonical_16_sample_answers());
        assert_eq!(cs.cluster_count(), 3);
        assert_eq!(cs.total_samples, 16);
        let mut sizes: Vec<usize> = cs.clusters.iter().map(Cluster::size).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![3, 5, 8]);
        assert_eq!(cs.selected_cluster().unwrap().answer.value, "4");
        assert_eq!(cs.selected_cluster().unwrap().size(), 8);
    }

    #[test]
    fn invalid_cluster_never_selected_even_when_largest() {
        let answers = vec![
            CanonicalAnswer::invalid(),
            CanonicalAnswer::invalid(),
            CanonicalAnswer::invalid(),
            CanonicalAnswer::numeric("2"),
        ];
        let cs = cluster_samples(&answers);
        assert_eq!(cs.selected_cluster().unwrap().answer.value, "2");
    }

    #[test]
    fn member_indices_are_strictly_increasing() {
        let cs = cluster_samples(&numerics(&["1", "2", "1", "2", "1"]));
        for cluster in &cs.clusters {
            assert!(cluster.member_indices.windows(2).all(|w| w[0] < w[1]));
        }
    }

    fn instance_with(n: usize) -> Instance {
        Instance {
            id: "inst".into(),
            question: "?".into(),
            gold_answer: "1".into(),
            task_type: crate::record::TaskType::Numeric,
            choices: None,
            samples: (0..n)
                .map(|i| Sample::from_text(format!("The answer is {i}.")))
                .collect(),
        }
    }

    #[test]
    fn subsample_full_size_is_identity() {
        let inst = instance_with(16);
        let out = subsample(&inst, 16, SubsampleMode::Prefix).unwrap();
        assert_eq!(out, inst);
        let out = subsample(&inst, 16, SubsampleMode::SeededRandom(7)).unwrap();
        assert_eq!(out, inst);
    }

    #[test]
    fn subsample_prefix_takes_first_n() {
        let inst = instance_with(16);
        let out = subsample(&inst, 4, SubsampleMode::Prefix).unwrap();
        assert_eq!(out.samples, inst.samples[..4].to_vec());
    }

    #[test]
    fn subsample_seeded_is_deterministic_and_order_preserving() {
        let inst = instance_with(16);
        let a = subsample(&inst, 5, SubsampleMode::SeededRandom(99)).unwrap();
        let b = subsample(&inst, 5, SubsampleMode::SeededRandom(99)).unwrap();
        assert_eq!(a, b);

        // Order preserved: each chosen text appears in the original order.
        let positions: Vec<usize> = a
            .samples
            .iter()
            .map(|s| inst.samples.iter().position(|o| o == s).unwrap())
            .collect();
        assert!(positions.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn subsample_out_of_range_errors() {
        let inst = instance_with(8);
        assert!(matches!(
            subsample(&inst, 16, SubsampleMode::Prefix),
            Err(Error::SubsampleOutOfRange { n: 16, .. })
        ));
        assert!(subsample(&inst, 0, SubsampleMode::Prefix).is_err());
    }
}
