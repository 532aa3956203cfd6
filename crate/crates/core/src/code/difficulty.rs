//! Difficulty labeling from algorithm-category tags.
//!
//! Each tag maps through a fixed category table; the sample's difficulty is
//! the maximum over its tags. Unknown tags map to Easy and are reported so
//! bulk corpora keep flowing.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

/// Three-level code difficulty.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Difficulty {
    Easy,
    Medium,
    Hard,
}

impl Difficulty {
    pub fn name(self) -> &'static str {
        match self {
            Difficulty::Easy => "Easy",
            Difficulty::Medium => "Medium",
            Difficulty::Hard => "Hard",
        }
    }

    pub fn parse(text: &str) -> Option<Self> {
        match text {
            "Easy" => Some(Difficulty::Easy),
            "Medium" => Some(Difficulty::Medium),
            "Hard" => Some(Difficulty::Hard),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DifficultyError {
    #[error("no algorithm tags supplied")]
    NoTags,
}

/// The category table. Lookup is case- and punctuation-insensitive.
const CATEGORY_TABLE: [(&str, Difficulty); 44] = [
    // Easy tier.
    ("array", Difficulty::Easy),
    ("string", Difficulty::Easy),
    ("hash table", Difficulty::Easy),
    ("hash map", Difficulty::Easy),
    ("math", Difficulty::Easy),
    ("simulation", Difficulty::Easy),
    ("two pointers", Difficulty::Easy),
    ("sorting", Difficulty::Easy),
    ("stack", Difficulty::Easy),
    ("queue", Difficulty::Easy),
    ("linked list", Difficulty::Easy),
    ("prefix sum", Difficulty::Easy),
    ("counting", Difficulty::Easy),
    // Medium tier.
    ("binary search", Difficulty::Medium),
    ("sliding window", Difficulty::Medium),
    ("greedy", Difficulty::Medium),
    ("heap", Difficulty::Medium),
    ("priority queue", Difficulty::Medium),
    ("backtracking", Difficulty::Medium),
    ("topological sort", Difficulty::Medium),
    ("union find", Difficulty::Medium),
    ("disjoint set", Difficulty::Medium),
    ("tree", Difficulty::Medium),
    ("graph", Difficulty::Medium),
    ("tree graph", Difficulty::Medium),
    ("dp", Difficulty::Medium),
    ("dynamic programming", Difficulty::Medium),
    ("recursion", Difficulty::Medium),
    ("bfs", Difficulty::Medium),
    ("dfs", Difficulty::Medium),
    ("bit manipulation", Difficulty::Medium),
    ("trie", Difficulty::Medium),
    // Hard tier.
    ("suffix array", Difficulty::Hard),
    ("aho corasick", Difficulty::Hard),
    ("min cost max flow", Difficulty::Hard),
    ("max flow", Difficulty::Hard),
    ("heavy light decomposition", Difficulty::Hard),
    ("li chao tree", Difficulty::Hard),
    ("convex hull trick", Difficulty::Hard),
    ("matrix exponentiation", Difficulty::Hard),
    ("digit dp", Difficulty::Hard),
    ("tree dp", Difficulty::Hard),
    ("segment tree", Difficulty::Hard),
    ("fenwick tree", Difficulty::Hard),
];

/// Lowercase, strip everything non-alphanumeric to single spaces.
pub fn normalize_tag(tag: &str) -> String {
    let mut out = String::new();
    let mut pending_space = false;
    for c in tag.chars() {
        if c.is_alphanumeric() {
            if pending_space && !out.is_empty() {
                out.push(' ');
            }
            pending_space = false;
            for lc in c.to_lowercase() {
                out.push(lc);
            }
        } else {
            pending_space = true;
        }
    }
    out
}

/// Maps one normalized tag through the table. `Tree/Graph` style compound
/// tags match if any component does.
fn lookup(tag: &str) -> Option<Difficulty> {
    let norm = normalize_tag(tag);
    if let Some(&(_, d)) = CATEGORY_TABLE.iter().find(|(name, _)| *name == norm) {
        return Some(d);
    }
    // Compound tags split on the original separators collapse to spaces;
    // retry on each whole word group of 1..=3 words.
    let words: Vec<&str> = norm.split(' ').collect();
    for len in (1..=3.min(words.len())).rev() {
        for window in words.windows(len) {
            let joined = window.join(" ");
            if let Some(&(_, d)) = CATEGORY_TABLE.iter().find(|(name, _)| *name == joined) {
                return Some(d);
            }
        }
    }
    None
}

/// Labeling result: the max-rule difficulty plus any tags that missed the
/// table (mapped to Easy, reported for logging).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DifficultyLabel {
    pub difficulty: Difficulty,
    pub unknown_tags: Vec<String>,
}

/// Labels a tag list: each tag maps via the table, the result is the
/// maximum. Unknown tags map to Easy and are reported, not fatal.
pub fn label_difficulty(tags: &[&str]) -> Result<DifficultyLabel, DifficultyError> {
    if tags.is_empty() {
        return Err(DifficultyError::NoTags);
    }
    let mut difficulty = Difficulty::Easy;
    let mut unknown = Vec::new();
    for tag in tags {
        match lookup(tag) {
            Some(d) => difficulty = difficulty.max(d),
            None => unknown.push(tag.to_string()),
        }
    }
    Ok(DifficultyLabel {
        difficulty,
        unknown_tags: unknown,
    })
}

/// Fallback when a sample carries no tags: scan problem text for category
/// keywords and label from whatever is found; Easy when nothing matches.
pub fn difficulty_from_text(text: &str) -> DifficultyLabel {
    let norm = normalize_tag(text);
    let padded = alloc::format!(" {norm} ");
    let mut difficulty = Difficulty::Easy;
    for (name, d) in CATEGORY_TABLE {
        // Whole-word containment, so "string" does not fire on "substring".
        if padded.contains(&alloc::format!(" {name} ")) {
            difficulty = difficulty.max(d);
        }
    }
    DifficultyLabel {
        difficulty,
        unknown_tags: Vec::new(),
    }
}
