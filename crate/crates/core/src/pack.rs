//! Best-fit-decreasing sequence packing with efficiency accounting.
//!
//! Items are sorted by length descending and each is placed into the open
//! sequence with the smallest residual that still fits it; when none fits, a
//! new sequence opens. Efficiency is total packed length over total capacity
//! consumed, 1.0 by convention for empty input.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// An item to pack: a sample id plus its token length.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PackItem {
    pub id: String,
    pub length_tokens: usize,
}

impl PackItem {
    pub fn new(id: impl Into<String>, length_tokens: usize) -> Self {
        Self {
            id: id.into(),
            length_tokens,
        }
    }
}

/// One packed training sequence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PackedSequence {
    pub capacity: usize,
    pub items: Vec<PackItem>,
    pub used: usize,
}

impl PackedSequence {
    pub fn residual(&self) -> usize {
        self.capacity - self.used
    }
}

/// Packing output: the sequences plus the corpus-global efficiency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PackOutcome {
    pub sequences: Vec<PackedSequence>,
    pub efficiency: f64,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PackError {
    #[error("capacity must be positive")]
    ZeroCapacity,
    #[error("items longer than capacity {capacity}: [{ids}]")]
    Oversize { capacity: usize, ids: String },
}

/// Default maximum sequence length: 64k tokens.
pub const DEFAULT_CAPACITY: usize = 65536;

/// Best-fit-decreasing packing. Rejects the whole input if any item exceeds
/// the capacity, naming every oversize id.
pub fn pack(items: &[PackItem], capacity: usize) -> Result<PackOutcome, PackError> {
    if capacity == 0 {
        return Err(PackError::ZeroCapacity);
    }
    let oversize: Vec<&str> = items
        .iter()
        .filter(|it| it.length_tokens > capacity)
        .map(|it| it.id.as_str())
        .collect();
    if !oversize.is_empty() {
        return Err(PackError::Oversize {
            capacity,
            ids: oversize.join(", "),
        });
    }

    let mut order: Vec<&PackItem> = items.iter().collect();
    // Longest first; ties broken by id ascending for determinism.
    order.sort_by(|a, b| {
        b.length_tokens
            .cmp(&a.length_tokens)
            .then_with(|| a.id.cmp(&b.id))
    });

    let mut sequences: Vec<PackedSequence> = Vec::new();
    for item in order {
        let mut best: Option<usize> = None;
        for (i, seq) in sequences.iter().enumerate() {
            let residual = seq.residual();
            if residual < item.length_tokens {
                continue;
            }
            // Smallest sufficient residual wins; ties go to the lowest index,
            // which the strict `<` on a forward scan already guarantees.
            match best {
                Some(j) if sequences[j].residual() <= residual => {}
                _ => best = Some(i),
            }
        }
        match best {
            Some(i) => {
                sequences[i].used += item.length_tokens;
                sequences[i].items.push(item.clone());
            }
            None => sequences.push(PackedSequence {
                capacity,
                items: alloc::vec![item.clone()],
                used: item.length_tokens,
            }),
        }
    }

    let total: usize = items.iter().map(|it| it.length_tokens).sum();
    let efficiency = if sequences.is_empty() {
        1.0
    } else {
        total as f64 / (sequences.len() * capacity) as f64
    };
    Ok(PackOutcome {
        sequences,
        efficiency,
    })
}

/// First-come-first-served packing: items in input order, appended to the
/// last open sequence only. Baseline for comparing against best-fit.
pub fn pack_sequential(items: &[PackItem], capacity: usize) -> Result<PackOutcome, PackError> {
    if capacity == 0 {
        return Err(PackError::ZeroCapacity);
    }
    let oversize: Vec<&str> = items
        .iter()
        .filter(|it| it.length_tokens > capacity)
        .map(|it| it.id.as_str())
        .collect();
    if !oversize.is_empty() {
        return Err(PackError::Oversize {
            capacity,
            ids: oversize.join(", "),
        });
    }
    let mut sequences: Vec<PackedSequence> = Vec::new();
    for item in items {
        match sequences.last_mut() {
            Some(seq) if seq.residual() >= item.length_tokens => {
                seq.used += item.length_tokens;
                seq.items.push(item.clone());
            }
            _ => sequences.push(PackedSequence {
                capacity,
                items: alloc::vec![item.clone()],
                used: item.length_tokens,
            }),
        }
    }
    let total: usize = items.iter().map(|it| it.length_tokens).sum();
    let efficiency = if sequences.is_empty() {
        1.0
    } else {
        total as f64 / (sequences.len() * capacity) as f64
    };
    Ok(PackOutcome {
        sequences,
        efficiency,
    })
}

/// Minimum number of sequences over every possible assignment. Exponential;
/// intended for instances of at most a handful of items.
pub fn optimal_sequence_count(lengths: &[usize], capacity: usize) -> usize {
    fn place(lengths: &[usize], idx: usize, bins: &mut Vec<usize>, capacity: usize, best: &mut usize) {
        if bins.len() >= *best {
            return; // can't improve
        }
        if idx == lengths.len() {
            *best = bins.len();
            return;
        }
        let len = lengths[idx];
        for i in 0..bins.len() {
            if bins[i] + len <= capacity {
                bins[i] += len;
                place(lengths, idx + 1, bins, capacity, best);
                bins[i] -= len;
            }
        }
        bins.push(len);
        place(lengths, idx + 1, bins, capacity, best);
        bins.pop();
    }
    let mut best = lengths.len().max(1);
    if lengths.is_empty() {
        return 0;
    }
    let mut bins = Vec::new();
    place(lengths, 0, &mut bins, capacity, &mut best);
    best
}

/// Check every structural invariant of a packing against its input.
pub fn validate_packing(items: &[PackItem], outcome: &PackOutcome) -> Result<(), String> {
    let mut seen: Vec<&str> = Vec::new();
    for seq in &outcome.sequences {
        let sum: usize = seq.items.iter().map(|it| it.length_tokens).sum();
        if sum != seq.used {
            return Err("used does not match item sum".to_string());
        }
        if seq.used > seq.capacity {
            return Err("sequence exceeds capacity".to_string());
        }
        for it in &seq.items {
            seen.push(it.id.as_str());
        }
    }
    seen.sort_unstable();
    if seen.windows(2).any(|w| w[0] == w[1]) {
        return Err("sample appears in two sequences".to_string());
    }
    let mut expected: Vec<&str> = items.iter().map(|it| it.id.as_str()).collect();
    expected.sort_unstable();
    if seen != expected {
        return Err("packed ids do not match input ids".to_string());
    }
    Ok(())
}
