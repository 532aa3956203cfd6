//! Rule-based file-level noise detector: drops whole sources whose samples
//! show systematic problems rather than inspecting each sample alone.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use super::lang::fenced_blocks;
use crate::model::Sample;

/// Thresholds for the three drop rules. All comparisons are strict, so a
/// group exactly at a threshold is kept.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FileFilterConfig {
    /// A sample is "low code" when code chars / total chars < this.
    pub theta_code: f64,
    /// Drop when the low-code fraction exceeds this.
    pub theta_a: f64,
    /// Drop when the fraction scoring <= 3 exceeds this.
    pub theta_b: f64,
    /// Drop when the fraction with multiple unrelated top-level definitions
    /// exceeds this.
    pub theta_c: f64,
}

impl Default for FileFilterConfig {
    fn default() -> Self {
        Self {
            theta_code: 0.3,
            theta_a: 0.5,
            theta_b: 0.6,
            theta_c: 0.5,
        }
    }
}

/// Why a source was dropped, with the measured fraction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum FileDropRule {
    LowCodeRatio { fraction: f64 },
    LowQualityScores { fraction: f64 },
    UnrelatedDefinitions { fraction: f64 },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FileFilterError {
    #[error("empty group for source `{0}`")]
    EmptyGroup(String),
}

/// Keep/drop decision for one source group. Samples must share a source and
/// already carry `quality_score` metadata.
pub fn filter_file_level(
    source: &str,
    group: &[Sample],
    config: &FileFilterConfig,
) -> Result<Option<FileDropRule>, FileFilterError> {
    if group.is_empty() {
        return Err(FileFilterError::EmptyGroup(source.to_string()));
    }
    let n = group.len() as f64;

    let low_code = group
        .iter()
        .filter(|s| code_fraction(s) < config.theta_code)
        .count() as f64
        / n;
    if low_code > config.theta_a {
        return Ok(Some(FileDropRule::LowCodeRatio { fraction: low_code }));
    }

    let low_quality = group
        .iter()
        .filter(|s| {
            s.meta
                .get("quality_score")
                .and_then(|v| v.as_u64())
                .is_some_and(|q| q <= 3)
        })
        .count() as f64
        / n;
    if low_quality > config.theta_b {
        return Ok(Some(FileDropRule::LowQualityScores {
            fraction: low_quality,
        }));
    }

    let unrelated = group
        .iter()
        .filter(|s| has_unrelated_definitions(s))
        .count() as f64
        / n;
    if unrelated > config.theta_c {
        return Ok(Some(FileDropRule::UnrelatedDefinitions {
            fraction: unrelated,
        }));
    }

    Ok(None)
}

/// Code chars over total chars, where code is what sits inside fences (or
/// everything, for raw-code samples).
fn code_fraction(sample: &Sample) -> f64 {
    if sample.length_chars == 0 {
        return 0.0;
    }
    if sample.meta.get("raw_code").and_then(|v| v.as_bool()) == Some(true) {
        return 1.0;
    }
    let text = sample.full_text();
    let code_chars: usize = fenced_blocks(&text)
        .iter()
        .map(|b| b.body.chars().count())
        .sum();
    code_chars as f64 / sample.length_chars as f64
}

/// True when the sample's code has more than one group of top-level
/// definitions sharing no identifiers: disjoint definitions interleaved in
/// one sample make the training unit unclear.
fn has_unrelated_definitions(sample: &Sample) -> bool {
    let code = match super::lang::code_text(sample) {
        Some(code) => code,
        None => return false,
    };
    let defs = top_level_definitions(&code);
    if defs.len() < 2 {
        return false;
    }
    // Union-find over definitions; edges between those sharing identifiers.
    let idents: Vec<Vec<String>> = defs.iter().map(|d| identifier_set(d)).collect();
    let mut parent: Vec<usize> = (0..defs.len()).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        if parent[i] != i {
            let root = find(parent, parent[i]);
            parent[i] = root;
        }
        parent[i]
    }
    for i in 0..defs.len() {
        for j in (i + 1)..defs.len() {
            if idents[i].iter().any(|t| idents[j].binary_search(t).is_ok()) {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri] = rj;
                }
            }
        }
    }
    let mut roots: Vec<usize> = (0..defs.len()).map(|i| find(&mut parent, i)).collect();
    roots.sort_unstable();
    roots.dedup();
    roots.len() > 1
}

/// Splits code into top-level definition chunks: a definition opens at an
/// unindented `def`/`class`/`fn`/`function`/type-and-name line and runs
/// until the next one.
fn top_level_definitions(code: &str) -> Vec<String> {
    const OPENERS: [&str; 9] = [
        "def ", "class ", "fn ", "pub fn ", "function ", "func ", "int ", "void ", "static ",
    ];
    let mut defs: Vec<String> = Vec::new();
    for line in code.lines() {
        let top_level = !line.starts_with(' ') && !line.starts_with('\t');
        if top_level && OPENERS.iter().any(|o| line.starts_with(o)) {
            defs.push(String::new());
        }
        if let Some(last) = defs.last_mut() {
            last.push_str(line);
            last.push('\n');
        }
    }
    defs
}

fn identifier_set(code: &str) -> Vec<String> {
    const STOP: [&str; 24] = [
        "def", "class", "fn", "pub", "function", "func", "return", "if", "else", "elif", "for",
        "while", "in", "int", "void", "static", "self", "print", "range", "len", "let", "var",
        "const", "new",
    ];
    let mut idents: Vec<String> = code
        .split(|c: char| !(c == '_' || c.is_alphanumeric()))
        .filter(|w| !w.is_empty())
        .filter(|w| w.chars().next().is_some_and(|c| c == '_' || c.is_alphabetic()))
        .filter(|w| !STOP.contains(w))
        .map(|w| w.to_string())
        .collect();
    idents.sort();
    idents.dedup();
    idents
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{DefaultLength, Message, MetaMap, Role};
    use alloc::vec;

    fn scored_sample(id: &str, score: u64, body: &str) -> Sample {
        let mut meta = MetaMap::new();
        meta.insert("quality_score".to_string(), serde_json::Value::from(score));
        Sample::new(
            id,
            "srcA",
            vec![Message::new(Role::User, body)],
            meta,
            &DefaultLength,
        )
    }

    fn codey(id: &str, score: u64) -> Sample {
        scored_sample(
            id,
            score,
            "```python\ndef f(x):\n    return x + 1\n```\n",
        )
    }

    #[test]
    fn mostly_low_scores_drop_the_source() {
        let mut group: Vec<Sample> = (0..8).map(|i| codey(&alloc::format!("s{i}"), 2)).collect();
        group.extend((8..10).map(|i| codey(&alloc::format!("s{i}"), 5)));
        let rule = filter_file_level("srcA", &group, &FileFilterConfig::default())
            .unwrap()
            .expect("should drop");
        match rule {
            FileDropRule::LowQualityScores { fraction } => assert!((fraction - 0.8).abs() < 1e-12),
            other => panic!("wrong rule: {other:?}"),
        }
    }

    #[test]
    fn clean_group_is_kept() {
        let group: Vec<Sample> = (0..10).map(|i| codey(&alloc::format!("s{i}"), 5)).collect();
        assert_eq!(
            filter_file_level("srcA", &group, &FileFilterConfig::default()).unwrap(),
            None
        );
    }

    #[test]
    fn exactly_at_threshold_is_kept() {
        // 6 of 10 low scores = 0.6, not > 0.6.
        let mut group: Vec<Sample> = (0..6).map(|i| codey(&alloc::format!("s{i}"), 3)).collect();
        group.extend((6..10).map(|i| codey(&alloc::format!("s{i}"), 5)));
        assert_eq!(
            filter_file_level("srcA", &group, &FileFilterConfig::default()).unwrap(),
            None
        );
    }

    #[test]
    fn empty_group_errors() {
        assert_eq!(
            filter_file_level("ghost", &[], &FileFilterConfig::default()),
            Err(FileFilterError::EmptyGroup("ghost".to_string()))
        );
    }

    #[test]
    fn prose_heavy_sources_drop() {
        let prose = "This is a very long natural language explanation that keeps going and going with lots of words. ".repeat(5);
        let body = alloc::format!("{prose}\n```python\nx = 1\n```\n{prose}");
        let group: Vec<Sample> = (0..4)
            .map(|i| scored_sample(&alloc::format!("s{i}"), 5, &body))
            .collect();
        let rule = filter_file_level("srcA", &group, &FileFilterConfig::default())
            .unwrap()
            .expect("should drop");
        assert!(matches!(rule, FileDropRule::LowCodeRatio { .. }));
    }

    #[test]
    fn unrelated_definitions_detected() {
        let body = "```python\ndef parse_config(path):\n    return path\n\ndef knapsack(weights, limit):\n    return weights, limit\n```\n";
        let group: Vec<Sample> = (0..4)
            .map(|i| scored_sample(&alloc::format!("s{i}"), 5, body))
            .collect();
        let rule = filter_file_level("srcA", &group, &FileFilterConfig::default())
            .unwrap()
            .expect("should drop");
        assert!(matches!(rule, FileDropRule::UnrelatedDefinitions { .. }));
    }

    #[test]
    fn related_definitions_are_fine() {
        let body = "```python\ndef helper(x):\n    return x * 2\n\ndef main(x):\n    return helper(x)\n```\n";
        let group: Vec<Sample> = (0..4)
            .map(|i| scored_sample(&alloc::format!("s{i}"), 5, body))
            .collect();
        assert_eq!(
            filter_file_level("srcA", &group, &FileFilterConfig::default()).unwrap(),
            None
        );
    }
}
