//! Response-structure statistics: per-text counts, corpus means, before/after
//! deltas, and the bullet-count histogram.

use alloc::string::String;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Structural counts for one response text.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StyleStats {
    pub char_count: usize,
    /// Count of `\n` characters.
    pub line_breaks: usize,
    /// `char_count / max(1, line_breaks + 1)`.
    pub chars_per_line: f64,
    /// Maximal runs of nonblank lines.
    pub paragraph_count: usize,
    /// Lines starting with 1-6 `#` then a space.
    pub heading_count: usize,
    /// Trimmed lines starting `-`, `*`, `+`, or an `N.`/`N)` ordinal.
    pub bullet_count: usize,
    /// Closed fenced-block pairs.
    pub code_block_count: usize,
    /// Set when a fence opens but never closes; the dangling fence counts as
    /// zero blocks.
    pub unclosed_fence: bool,
}

/// Per-column means over a corpus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StyleMeans {
    pub char_count: f64,
    pub line_breaks: f64,
    pub chars_per_line: f64,
    pub paragraph_count: f64,
    pub heading_count: f64,
    pub bullet_count: f64,
    pub code_block_count: f64,
}

impl StyleMeans {
    pub fn columns(&self) -> [(&'static str, f64); 7] {
        [
            ("character", self.char_count),
            ("line_break", self.line_breaks),
            ("chars_per_line", self.chars_per_line),
            ("paragraph", self.paragraph_count),
            ("heading", self.heading_count),
            ("bullet", self.bullet_count),
            ("code_block", self.code_block_count),
        ]
    }
}

/// One column of a before/after comparison. `percent` is
/// `100 * (after - before) / before`, undefined when `before == 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaColumn {
    pub column: String,
    pub before: f64,
    pub after: f64,
    pub diff: f64,
    pub percent: Option<f64>,
}

/// The full before/after delta table (7 columns).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StyleDelta {
    pub columns: Vec<DeltaColumn>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StyleError {
    #[error("empty stats list")]
    EmptyInput,
}

fn is_heading(line: &str) -> bool {
    let hashes = line.chars().take_while(|&c| c == '#').count();
    (1..=6).contains(&hashes) && line[hashes..].starts_with(' ')
}

fn is_bullet(line: &str) -> bool {
    let t = line.trim_start();
    for marker in ['-', '*', '+'] {
        if let Some(rest) = t.strip_prefix(marker) {
            return rest.is_empty() || rest.starts_with(' ');
        }
    }
    // Ordinal bullets: digits then '.' or ')'.
    let digits = t.chars().take_while(|c| c.is_ascii_digit()).count();
    if digits == 0 {
        return false;
    }
    let rest = &t[digits..];
    match rest.chars().next() {
        Some('.') | Some(')') => {
            let after = &rest[1..];
            after.is_empty() || after.starts_with(' ')
        }
        _ => false,
    }
}

fn is_fence(line: &str) -> bool {
    line.trim_start().starts_with("```")
}

/// Computes structural counts for one text. Pure and total.
pub fn analyze(text: &str) -> StyleStats {
    let char_count = text.chars().count();
    let line_breaks = text.chars().filter(|&c| c == '\n').count();
    let chars_per_line = char_count as f64 / core::cmp::max(1, line_breaks + 1) as f64;

    let mut paragraph_count = 0usize;
    let mut heading_count = 0usize;
    let mut bullet_count = 0usize;
    let mut fence_lines = 0usize;
    let mut in_paragraph = false;

    for line in text.split('\n') {
        if line.trim().is_empty() {
            in_paragraph = false;
            continue;
        }
        if !in_paragraph {
            in_paragraph = true;
            paragraph_count += 1;
        }
        if is_fence(line) {
            fence_lines += 1;
        } else if is_heading(line) {
            heading_count += 1;
        } else if is_bullet(line) {
            bullet_count += 1;
        }
    }

    StyleStats {
        char_count,
        line_breaks,
        chars_per_line,
        paragraph_count,
        heading_count,
        bullet_count,
        code_block_count: fence_lines / 2,
        unclosed_fence: fence_lines % 2 == 1,
    }
}

/// Arithmetic means per column. Errors on an empty list.
pub fn aggregate(stats: &[StyleStats]) -> Result<StyleMeans, StyleError> {
    if stats.is_empty() {
        return Err(StyleError::EmptyInput);
    }
    let n = stats.len() as f64;
    Ok(StyleMeans {
        char_count: stats.iter().map(|s| s.char_count as f64).sum::<f64>() / n,
        line_breaks: stats.iter().map(|s| s.line_breaks as f64).sum::<f64>() / n,
        chars_per_line: stats.iter().map(|s| s.chars_per_line).sum::<f64>() / n,
        paragraph_count: stats.iter().map(|s| s.paragraph_count as f64).sum::<f64>() / n,
        heading_count: stats.iter().map(|s| s.heading_count as f64).sum::<f64>() / n,
        bullet_count: stats.iter().map(|s| s.bullet_count as f64).sum::<f64>() / n,
        code_block_count: stats.iter().map(|s| s.code_block_count as f64).sum::<f64>() / n,
    })
}

/// Builds the before/after delta table from two sets of per-column means.
pub fn delta_report(before: &StyleMeans, after: &StyleMeans) -> StyleDelta {
    let columns = before
        .columns()
        .iter()
        .zip(after.columns().iter())
        .map(|(&(name, b), &(_, a))| DeltaColumn {
            column: String::from(name),
            before: b,
            after: a,
            diff: a - b,
            percent: if b != 0.0 {
                Some(100.0 * (a - b) / b)
            } else {
                None
            },
        })
        .collect();
    StyleDelta { columns }
}

/// Bullet-count histogram buckets.
pub const BULLET_BUCKETS: [&str; 4] = ["0", "1-5", "6-20", "21+"];

/// Fraction of documents per bullet-count bucket `{0, 1-5, 6-20, 21+}`.
pub fn bullet_histogram(stats: &[StyleStats]) -> Result<[f64; 4], StyleError> {
    if stats.is_empty() {
        return Err(StyleError::EmptyInput);
    }
    let mut counts = [0usize; 4];
    for s in stats {
        let bucket = match s.bullet_count {
            0 => 0,
            1..=5 => 1,
            6..=20 => 2,
            _ => 3,
        };
        counts[bucket] += 1;
    }
    let n = stats.len() as f64;
    Ok([
        counts[0] as f64 / n,
        counts[1] as f64 / n,
        counts[2] as f64 / n,
        counts[3] as f64 / n,
    ])
}
