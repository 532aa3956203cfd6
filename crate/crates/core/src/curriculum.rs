//! Difficulty scoring and difficulty-aware curriculum selection.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// The six factors a difficulty score is built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Factor {
    AlgorithmicComplexity,
    ReasoningDepth,
    EdgeCaseRichness,
    ConstraintPressure,
    ImplementationLoad,
    ConceptualAbstraction,
}

impl Factor {
    pub const ALL: [Factor; 6] = [
        Factor::AlgorithmicComplexity,
        Factor::ReasoningDepth,
        Factor::EdgeCaseRichness,
        Factor::ConstraintPressure,
        Factor::ImplementationLoad,
        Factor::ConceptualAbstraction,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Factor::AlgorithmicComplexity => "algorithmic_complexity",
            Factor::ReasoningDepth => "reasoning_depth",
            Factor::EdgeCaseRichness => "edge_case_richness",
            Factor::ConstraintPressure => "constraint_pressure",
            Factor::ImplementationLoad => "implementation_load",
            Factor::ConceptualAbstraction => "conceptual_abstraction",
        }
    }
}

/// A 1.0-5.0 difficulty score with its factor breakdown.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DifficultyScore {
    pub score: f64,
    pub sub_scores: BTreeMap<Factor, u8>,
    pub test_case_count: Option<usize>,
    pub statement_length: Option<usize>,
}

/// Five difficulty bins over the 1.0-5.0 scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DifficultyBin {
    VeryEasy,
    Easy,
    Medium,
    Difficult,
    VeryDifficult,
}

impl DifficultyBin {
    pub const ALL: [DifficultyBin; 5] = [
        DifficultyBin::VeryEasy,
        DifficultyBin::Easy,
        DifficultyBin::Medium,
        DifficultyBin::Difficult,
        DifficultyBin::VeryDifficult,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DifficultyBin::VeryEasy => "VeryEasy",
            DifficultyBin::Easy => "Easy",
            DifficultyBin::Medium => "Medium",
            DifficultyBin::Difficult => "Difficult",
            DifficultyBin::VeryDifficult => "VeryDifficult",
        }
    }

    pub fn parse(text: &str) -> Option<Self> {
        Self::ALL.iter().copied().find(|b| b.name() == text)
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum CurriculumError {
    #[error("factor weights must sum to 1 (sum was {0})")]
    BadWeights(f64),
    #[error("sub-score {0} outside 1..=5")]
    SubScoreRange(u8),
    #[error("difficulty score {0} outside [1.0, 5.0]")]
    ScoreOutOfRange(f64),
    #[error("no sub-scores and no coarse signals to seed them from")]
    NoSignal,
}

const WEIGHT_TOL: f64 = 1e-9;

/// Bucket a test-case count onto the 1-5 scale.
pub fn test_case_bucket(count: usize) -> u8 {
    match count {
        0..=2 => 1,
        3..=5 => 2,
        6..=10 => 3,
        11..=20 => 4,
        _ => 5,
    }
}

/// Bucket a problem-statement length (characters) onto the 1-5 scale.
pub fn statement_length_bucket(chars: usize) -> u8 {
    match chars {
        0..=200 => 1,
        201..=500 => 2,
        501..=1000 => 3,
        1001..=2000 => 4,
        _ => 5,
    }
}

/// Combines factor sub-scores into a weighted 1.0-5.0 score.
///
/// Missing sub-scores are seeded from the coarse prior: the mean of the
/// test-case and statement-length buckets, rounded to the nearest integer.
/// Weights default to uniform 1/6 and must sum to 1.
pub fn score_code_difficulty(
    sub_scores: &BTreeMap<Factor, u8>,
    test_case_count: Option<usize>,
    statement_length: Option<usize>,
    weights: Option<&BTreeMap<Factor, f64>>,
) -> Result<DifficultyScore, CurriculumError> {
    for &s in sub_scores.values() {
        if !(1..=5).contains(&s) {
            return Err(CurriculumError::SubScoreRange(s));
        }
    }

    let coarse: Option<f64> = {
        let mut parts = Vec::new();
        if let Some(n) = test_case_count {
            parts.push(test_case_bucket(n) as f64);
        }
        if let Some(n) = statement_length {
            parts.push(statement_length_bucket(n) as f64);
        }
        if parts.is_empty() {
            None
        } else {
            Some(parts.iter().sum::<f64>() / parts.len() as f64)
        }
    };

    let mut filled: BTreeMap<Factor, u8> = BTreeMap::new();
    for f in Factor::ALL {
        match sub_scores.get(&f) {
            Some(&s) => {
                filled.insert(f, s);
            }
            None => {
                let coarse = coarse.ok_or(CurriculumError::NoSignal)?;
                let seeded = round_half_up(coarse).clamp(1.0, 5.0) as u8;
                filled.insert(f, seeded);
            }
        }
    }

    let score = match weights {
        // Uniform 1/6 weights reduce to the arithmetic mean, computed over
        // integers so the endpoints land exactly on 1.0 and 5.0.
        None => filled.values().map(|&s| s as u32).sum::<u32>() as f64 / 6.0,
        Some(weights) => {
            let total: f64 = Factor::ALL
                .iter()
                .map(|f| weights.get(f).copied().unwrap_or(0.0))
                .sum();
            if (total - 1.0).abs() > WEIGHT_TOL {
                return Err(CurriculumError::BadWeights(total));
            }
            Factor::ALL
                .iter()
                .map(|f| weights.get(f).copied().unwrap_or(0.0) * filled[f] as f64)
                .sum::<f64>()
                .clamp(1.0, 5.0)
        }
    };

    Ok(DifficultyScore {
        score,
        sub_scores: filled,
        test_case_count,
        statement_length,
    })
}

// Round half up; inputs here are always positive and small.
fn round_half_up(x: f64) -> f64 {
    let floor = x as u64 as f64;
    if x - floor >= 0.5 {
        floor + 1.0
    } else {
        floor
    }
}

/// Maps a score onto its bin: `[1.0,1.5) [1.5,2.5) [2.5,3.5) [3.5,4.5)
/// [4.5,5.0]`. Lower bounds inclusive; 5.0 lands in the last bin.
pub fn bin_difficulty(score: f64) -> Result<DifficultyBin, CurriculumError> {
    if !(1.0..=5.0).contains(&score) {
        return Err(CurriculumError::ScoreOutOfRange(score));
    }
    Ok(if score < 1.5 {
        DifficultyBin::VeryEasy
    } else if score < 2.5 {
        DifficultyBin::Easy
    } else if score < 3.5 {
        DifficultyBin::Medium
    } else if score < 4.5 {
        DifficultyBin::Difficult
    } else {
        DifficultyBin::VeryDifficult
    })
}

/// Per-bin accounting of a selection run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinOutcome {
    pub bin: DifficultyBin,
    pub target: usize,
    pub selected: usize,
    pub shortfall: usize,
}

/// Curriculum selection output: chosen ids plus the shortfall report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelectionOutcome {
    pub selected: Vec<String>,
    pub bins: Vec<BinOutcome>,
}

/// Seeded per-bin sampling without replacement to the target counts.
///
/// A bin shorter than its target yields everything it has and reports the
/// shortfall; it is never topped up from other bins.
pub fn select_curriculum(
    scored: &[(String, f64)],
    targets: &BTreeMap<DifficultyBin, usize>,
    seed: u64,
) -> Result<SelectionOutcome, CurriculumError> {
    let mut by_bin: BTreeMap<DifficultyBin, Vec<&str>> = BTreeMap::new();
    for (id, score) in scored {
        by_bin.entry(bin_difficulty(*score)?).or_default().push(id);
    }

    let mut selected = Vec::new();
    let mut bins = Vec::new();
    for bin in DifficultyBin::ALL {
        let target = targets.get(&bin).copied().unwrap_or(0);
        if target == 0 {
            continue;
        }
        let pool = by_bin.get(&bin).map(|v| v.as_slice()).unwrap_or(&[]);
        let take = target.min(pool.len());
        let mut order: Vec<usize> = (0..pool.len()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ fnv1a(bin.name().as_bytes()));
        for i in (1..order.len()).rev() {
            let j = rng.random_range(0..=i);
            order.swap(i, j);
        }
        for &idx in order.iter().take(take) {
            selected.push(pool[idx].to_string());
        }
        bins.push(BinOutcome {
            bin,
            target,
            selected: take,
            shortfall: target - take,
        });
    }
    Ok(SelectionOutcome { selected, bins })
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x100000001b3);
    }
    hash
}
