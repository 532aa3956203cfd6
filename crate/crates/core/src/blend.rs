//! Mixture-controlled batch blending.
//!
//! Every batch is composed to match a global domain mixture: per-batch quotas
//! come from largest-remainder apportionment of `weight * batch_size`, and
//! samples are drawn without replacement inside each domain under a seeded
//! PRNG, so a fixed seed always yields the same stream.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Domain weights. Normalized on construction so they sum to 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureSpec {
    weights: BTreeMap<String, f64>,
}

impl MixtureSpec {
    pub fn new(weights: BTreeMap<String, f64>) -> Result<Self, BlendError> {
        if weights.values().any(|&w| w < 0.0 || !w.is_finite()) {
            return Err(BlendError::NegativeWeight);
        }
        let total: f64 = weights.values().sum();
        if total <= 0.0 {
            return Err(BlendError::AllZeroWeights);
        }
        let weights = weights
            .into_iter()
            .filter(|(_, w)| *w > 0.0)
            .map(|(k, w)| (k, w / total))
            .collect();
        Ok(Self { weights })
    }

    pub fn weights(&self) -> &BTreeMap<String, f64> {
        &self.weights
    }

    pub fn weight(&self, domain: &str) -> f64 {
        self.weights.get(domain).copied().unwrap_or(0.0)
    }
}

/// One composed batch: `(domain, sample id)` in emission order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Batch {
    pub index: usize,
    pub members: Vec<(String, String)>,
}

impl Batch {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn domain_count(&self, domain: &str) -> usize {
        self.members.iter().filter(|(d, _)| d == domain).count()
    }
}

/// Why the stream stopped and how much it produced.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlendReport {
    pub batches_produced: usize,
    /// Domain whose pool ran out, when the stream ended early.
    pub exhausted_domain: Option<String>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BlendError {
    #[error("mixture weights are all zero")]
    AllZeroWeights,
    #[error("mixture weights must be nonnegative and finite")]
    NegativeWeight,
    #[error("domain `{0}` has positive weight but no pool")]
    MissingPool(String),
    #[error("batch size must be positive")]
    ZeroBatch,
}

/// Largest-remainder apportionment of `batch_size` slots across the mixture.
/// Floors `w * batch_size` per domain, then hands remaining slots to the
/// largest fractional remainders (ties: larger weight, then domain name).
pub fn batch_quotas(mixture: &MixtureSpec, batch_size: usize) -> BTreeMap<String, usize> {
    let mut quotas: BTreeMap<String, usize> = BTreeMap::new();
    let mut remainders: Vec<(&String, f64, f64)> = Vec::new();
    let mut assigned = 0usize;
    for (domain, &w) in &mixture.weights {
        let exact = w * batch_size as f64;
        let floor = exact as usize;
        quotas.insert(domain.clone(), floor);
        assigned += floor;
        remainders.push((domain, exact - floor as f64, w));
    }
    let mut short = batch_size.saturating_sub(assigned);
    remainders.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .unwrap_or(core::cmp::Ordering::Equal)
            .then_with(|| b.2.partial_cmp(&a.2).unwrap_or(core::cmp::Ordering::Equal))
            .then_with(|| a.0.cmp(b.0))
    });
    for (domain, _, _) in remainders {
        if short == 0 {
            break;
        }
        *quotas.get_mut(domain).expect("quota exists") += 1;
        short -= 1;
    }
    quotas
}

struct DomainPool {
    ids: Vec<String>,
    /// Shuffled draw order, consumed from the front.
    order: Vec<usize>,
    cursor: usize,
    rng: ChaCha8Rng,
}

impl DomainPool {
    fn new(domain: &str, ids: Vec<String>, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ fnv1a(domain.as_bytes()));
        let mut order: Vec<usize> = (0..ids.len()).collect();
        shuffle(&mut order, &mut rng);
        Self {
            ids,
            order,
            cursor: 0,
            rng,
        }
    }

    fn remaining(&self) -> usize {
        self.order.len() - self.cursor
    }

    /// Draws one id; reshuffles and starts over when `reuse` is set and the
    /// pool is spent.
    fn draw(&mut self, reuse: bool) -> Option<&str> {
        if self.cursor == self.order.len() {
            if !reuse || self.ids.is_empty() {
                return None;
            }
            shuffle(&mut self.order, &mut self.rng);
            self.cursor = 0;
        }
        let idx = self.order[self.cursor];
        self.cursor += 1;
        Some(&self.ids[idx])
    }
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x100000001b3);
    }
    hash
}

fn shuffle(order: &mut [usize], rng: &mut ChaCha8Rng) {
    for i in (1..order.len()).rev() {
        let j = rng.random_range(0..=i);
        order.swap(i, j);
    }
}

/// Deterministic batch stream over per-domain pools.
pub struct BatchStream {
    pools: BTreeMap<String, DomainPool>,
    quotas: BTreeMap<String, usize>,
    reuse: bool,
    next_index: usize,
    exhausted: Option<String>,
}

impl BatchStream {
    pub fn report(&self) -> BlendReport {
        BlendReport {
            batches_produced: self.next_index,
            exhausted_domain: self.exhausted.clone(),
        }
    }
}

impl Iterator for BatchStream {
    type Item = Batch;

    fn next(&mut self) -> Option<Batch> {
        if self.exhausted.is_some() {
            return None;
        }
        // A batch is emitted only when every quota can be met in full.
        if !self.reuse {
            for (domain, &quota) in &self.quotas {
                let pool = self.pools.get(domain).expect("pool exists");
                if pool.remaining() < quota {
                    self.exhausted = Some(domain.clone());
                    return None;
                }
            }
        }
        let mut members = Vec::new();
        for (domain, &quota) in &self.quotas {
            let pool = self.pools.get_mut(domain).expect("pool exists");
            for _ in 0..quota {
                match pool.draw(self.reuse) {
                    Some(id) => members.push((domain.clone(), id.to_string())),
                    None => {
                        self.exhausted = Some(domain.clone());
                        return None;
                    }
                }
            }
        }
        let batch = Batch {
            index: self.next_index,
            members,
        };
        self.next_index += 1;
        Some(batch)
    }
}

/// Builds the deterministic batch stream. With `reuse` unset the stream ends
/// cleanly when some domain can no longer fill its quota; with it set, spent
/// pools reshuffle and cycle.
pub fn blend_batches(
    pools: &BTreeMap<String, Vec<String>>,
    mixture: &MixtureSpec,
    batch_size: usize,
    seed: u64,
    reuse: bool,
) -> Result<BatchStream, BlendError> {
    if batch_size == 0 {
        return Err(BlendError::ZeroBatch);
    }
    for domain in mixture.weights.keys() {
        match pools.get(domain) {
            Some(pool) if !pool.is_empty() => {}
            _ => return Err(BlendError::MissingPool(domain.clone())),
        }
    }
    let quotas = batch_quotas(mixture, batch_size);
    let pools = mixture
        .weights
        .keys()
        .map(|domain| {
            (
                domain.clone(),
                DomainPool::new(domain, pools[domain].clone(), seed),
            )
        })
        .collect();
    Ok(BatchStream {
        pools,
        quotas,
        reuse,
        next_index: 0,
        exhausted: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::format;

    fn mixture(pairs: &[(&str, f64)]) -> MixtureSpec {
        MixtureSpec::new(pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()).unwrap()
    }

    fn pools(sizes: &[(&str, usize)]) -> BTreeMap<String, Vec<String>> {
        sizes
            .iter()
            .map(|(domain, n)| {
                (
                    domain.to_string(),
                    (0..*n).map(|i| format!("{domain}-{i:04}")).collect(),
                )
            })
            .collect()
    }

    #[test]
    fn even_split_quotas() {
        let m = mixture(&[("A", 0.5), ("B", 0.5)]);
        let q = batch_quotas(&m, 4);
        assert_eq!(q["A"], 2);
        assert_eq!(q["B"], 2);
    }

    #[test]
    fn largest_remainder_on_reasoning_mixture() {
        // Weights 32/28/21/12/12 over a 105 total; batch 128.
        // Floors: 39+34+25+14+14 = 126; the two spare slots go to the
        // largest remainders (.6286 for both 12-weight domains).
        let m = mixture(&[
            ("Math", 32.0),
            ("Code", 28.0),
            ("STEM", 21.0),
            ("IF", 12.0),
            ("SO", 12.0),
        ]);
        let q = batch_quotas(&m, 128);
        assert_eq!(q["Math"], 39);
        assert_eq!(q["Code"], 34);
        assert_eq!(q["STEM"], 25);
        assert_eq!(q["IF"], 15);
        assert_eq!(q["SO"], 15);
        assert_eq!(q.values().sum::<usize>(), 128);
    }

    #[test]
    fn quota_sums_match_batch_size() {
        let m = mixture(&[("a", 1.0), ("b", 2.0), ("c", 4.0)]);
        for batch_size in [1usize, 3, 7, 64, 127] {
            let q = batch_quotas(&m, batch_size);
            assert_eq!(q.values().sum::<usize>(), batch_size, "batch {batch_size}");
        }
    }

    #[test]
    fn every_batch_is_exact() {
        let m = mixture(&[("A", 0.5), ("B", 0.5)]);
        let p = pools(&[("A", 20), ("B", 20)]);
        let stream = blend_batches(&p, &m, 4, 7, false).unwrap();
        let batches: Vec<Batch> = stream.collect();
        assert_eq!(batches.len(), 10);
        for b in &batches {
            assert_eq!(b.domain_count("A"), 2);
            assert_eq!(b.domain_count("B"), 2);
        }
    }

    #[test]
    fn identical_seed_identical_stream() {
        let m = mixture(&[("A", 0.7), ("B", 0.3)]);
        let p = pools(&[("A", 50), ("B", 50)]);
        let run = |seed| -> Vec<Batch> { blend_batches(&p, &m, 10, seed, false).unwrap().collect() };
        assert_eq!(run(42), run(42));
        assert_ne!(run(42), run(43));
    }

    #[test]
    fn without_replacement_within_domain() {
        let m = mixture(&[("A", 1.0)]);
        let p = pools(&[("A", 12)]);
        let batches: Vec<Batch> = blend_batches(&p, &m, 4, 1, false).unwrap().collect();
        assert_eq!(batches.len(), 3);
        let mut ids: Vec<String> = batches
            .iter()
            .flat_map(|b| b.members.iter().map(|(_, id)| id.clone()))
            .collect();
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), 12);
    }

    #[test]
    fn clean_end_when_pool_runs_dry() {
        let m = mixture(&[("A", 0.5), ("B", 0.5)]);
        let p = pools(&[("A", 20), ("B", 6)]);
        let mut stream = blend_batches(&p, &m, 4, 3, false).unwrap();
        let mut produced = 0;
        while stream.next().is_some() {
            produced += 1;
        }
        assert_eq!(produced, 3); // B supplies 2 per batch, 6 total
        let report = stream.report();
        assert_eq!(report.batches_produced, 3);
        assert_eq!(report.exhausted_domain.as_deref(), Some("B"));
    }

    #[test]
    fn reuse_cycles_pools() {
        let m = mixture(&[("A", 1.0)]);
        let p = pools(&[("A", 3)]);
        let stream = blend_batches(&p, &m, 2, 5, true).unwrap();
        let batches: Vec<Batch> = stream.take(10).collect();
        assert_eq!(batches.len(), 10);
    }

    #[test]
    fn all_zero_weights_rejected() {
        let err = MixtureSpec::new(
            [("A".to_string(), 0.0), ("B".to_string(), 0.0)]
                .into_iter()
                .collect(),
        )
        .unwrap_err();
        assert_eq!(err, BlendError::AllZeroWeights);
    }

    #[test]
    fn missing_pool_rejected() {
        let m = mixture(&[("A", 0.5), ("B", 0.5)]);
        let p = pools(&[("A", 4)]);
        assert_eq!(
            blend_batches(&p, &m, 4, 0, false).err(),
            Some(BlendError::MissingPool("B".to_string()))
        );
    }

    #[test]
    fn zero_weight_domains_are_dropped() {
        let m = mixture(&[("A", 1.0), ("B", 0.0)]);
        assert_eq!(m.weights().len(), 1);
        let p = pools(&[("A", 4)]);
        // B has no pool but also no weight: fine.
        let batches: Vec<Batch> = blend_batches(&p, &m, 2, 0, false).unwrap().collect();
        assert_eq!(batches.len(), 2);
    }

    #[test]
    fn normalization() {
        let m = mixture(&[("A", 2.0), ("B", 6.0)]);
        assert!((m.weight("A") - 0.25).abs() < 1e-12);
        assert!((m.weight("B") - 0.75).abs() < 1e-12);
        let sum: f64 = m.weights().values().sum();
        assert!((sum - 1.0).abs() < 1e-12);
    }
}
