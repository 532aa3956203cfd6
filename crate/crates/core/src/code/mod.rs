//! Staged code-corpus refinement: language identification, education-score
//! filtering, file-level noise filtering, executability checking, difficulty
//! labeling, task classification, and distribution reporting.
//!
//! Stage order is fixed: language -> education score -> file filter ->
//! executability -> difficulty -> task. No stage mutates metadata written by
//! an earlier stage, and every drop lands in the [`DropLog`].

pub mod difficulty;
pub mod education;
pub mod exec;
pub mod filefilter;
pub mod lang;
pub mod python;
pub mod task;

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::model::{DropLog, MetaValue, Sample, Stage};
use difficulty::{difficulty_from_text, label_difficulty, Difficulty};
use education::{EducationScorer, RuleScorer, MIN_RETAINED_SCORE};
use exec::check_executability;
use filefilter::{filter_file_level, FileFilterConfig};
use lang::{code_text, identify_language, Language};
use task::{classify_task, Task};

/// The five meta tags every surviving sample carries, plus the optional
/// fine-grained score.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodeMeta {
    pub language: Language,
    pub quality_score: u8,
    pub is_executable: bool,
    pub difficulty: Difficulty,
    pub task: Task,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub difficulty_score: Option<f64>,
}

impl CodeMeta {
    /// Writes the tags into a sample's metadata map.
    pub fn apply(&self, sample: &Sample) -> Sample {
        let mut out = sample.clone();
        out.meta
            .insert("language".to_string(), MetaValue::from(self.language.name()));
        out.meta.insert(
            "quality_score".to_string(),
            MetaValue::from(self.quality_score),
        );
        out.meta.insert(
            "is_executable".to_string(),
            MetaValue::from(self.is_executable),
        );
        out.meta.insert(
            "difficulty".to_string(),
            MetaValue::from(self.difficulty.name()),
        );
        out.meta
            .insert("task".to_string(), MetaValue::from(self.task.name()));
        if let Some(score) = self.difficulty_score {
            out.meta
                .insert("difficulty_score".to_string(), MetaValue::from(score));
        }
        out
    }

    /// Reads the tags back out of sample metadata.
    pub fn read(sample: &Sample) -> Option<CodeMeta> {
        Some(CodeMeta {
            language: Language::parse(sample.meta_str("language")?)?,
            quality_score: sample.meta.get("quality_score")?.as_u64()? as u8,
            is_executable: sample.meta.get("is_executable")?.as_bool()?,
            difficulty: Difficulty::parse(sample.meta_str("difficulty")?)?,
            task: Task::parse(sample.meta_str("task")?)?,
            difficulty_score: sample
                .meta
                .get("difficulty_score")
                .and_then(|v| v.as_f64()),
        })
    }
}

/// Pipeline configuration.
#[derive(Debug, Clone)]
pub struct CodePipelineConfig {
    pub file_filter: FileFilterConfig,
    /// Meta key carrying algorithm-category tags (array of strings).
    pub tags_key: String,
    /// Dominance threshold for distribution reports.
    pub dominance_threshold: f64,
}

impl Default for CodePipelineConfig {
    fn default() -> Self {
        Self {
            file_filter: FileFilterConfig::default(),
            tags_key: "tags".to_string(),
            dominance_threshold: 0.5,
        }
    }
}

/// Warnings emitted without dropping anything (unknown difficulty tags).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PipelineWarnings {
    pub unknown_tags: Vec<(String, String)>,
}

/// Output of a full pipeline run.
#[derive(Debug, Clone)]
pub struct CodePipelineOutcome {
    pub samples: Vec<Sample>,
    pub drops: DropLog,
    pub warnings: PipelineWarnings,
}

/// Runs the staged pipeline with the default rule scorer.
pub fn run_code_pipeline(samples: &[Sample], config: &CodePipelineConfig) -> CodePipelineOutcome {
    run_code_pipeline_with(samples, config, &RuleScorer)
}

/// Runs the staged pipeline with a custom education scorer. A stage failure
/// on one sample never aborts the run: the sample drops with a named reason
/// (scorer failures route to review rather than silent loss).
pub fn run_code_pipeline_with(
    samples: &[Sample],
    config: &CodePipelineConfig,
    scorer: &dyn EducationScorer,
) -> CodePipelineOutcome {
    let mut drops = DropLog::new();
    let mut warnings = PipelineWarnings::default();

    // Stage i: language identification.
    let mut staged: Vec<(Sample, Language)> = Vec::new();
    for sample in samples {
        match identify_language(sample) {
            Ok(call) => {
                let tagged = sample.with_meta("language", MetaValue::from(call.language.name()));
                staged.push((tagged, call.language));
            }
            Err(e) => drops.record(&sample.id, Stage::Language, e.to_string()),
        }
    }

    // Stage ii: education score filter.
    let mut scored: Vec<(Sample, Language)> = Vec::new();
    for (sample, language) in staged {
        match scorer.score(&sample, language) {
            Ok(score) => {
                let score = score.clamp(1, 5);
                if score >= MIN_RETAINED_SCORE {
                    let tagged = sample.with_meta("quality_score", MetaValue::from(score));
                    scored.push((tagged, language));
                } else {
                    drops.record(
                        &sample.id,
                        Stage::EducationScore,
                        alloc::format!("quality_score {score} below {MIN_RETAINED_SCORE}"),
                    );
                }
            }
            Err(e) => {
                // Review routing: excluded from the refined output, never
                // silently lost.
                drops.record(
                    &sample.id,
                    Stage::EducationScore,
                    alloc::format!("routed to review: {e}"),
                );
            }
        }
    }

    // Stage iii: file-level filter over source groups.
    let mut groups: BTreeMap<String, Vec<(Sample, Language)>> = BTreeMap::new();
    for (sample, language) in scored {
        groups
            .entry(sample.source.clone())
            .or_default()
            .push((sample, language));
    }
    let mut kept: Vec<(Sample, Language)> = Vec::new();
    for (source, group) in groups {
        let group_samples: Vec<Sample> = group.iter().map(|(s, _)| s.clone()).collect();
        match filter_file_level(&source, &group_samples, &config.file_filter) {
            Ok(None) => kept.extend(group),
            Ok(Some(rule)) => {
                for (sample, _) in group {
                    drops.record(
                        &sample.id,
                        Stage::FileFilter,
                        alloc::format!("source `{source}` dropped: {rule:?}"),
                    );
                }
            }
            Err(e) => {
                for (sample, _) in group {
                    drops.record(&sample.id, Stage::FileFilter, e.to_string());
                }
            }
        }
    }

    // Stage iv: executability.
    let mut executable: Vec<(Sample, Language)> = Vec::new();
    for (sample, language) in kept {
        let code = code_text(&sample).unwrap_or_default();
        let verdict = check_executability(&code, language);
        if verdict.executable {
            let tagged = sample.with_meta("is_executable", MetaValue::Bool(true));
            executable.push((tagged, language));
        } else {
            drops.record(
                &sample.id,
                Stage::Executability,
                alloc::format!(
                    "{:?}{}",
                    verdict.reason,
                    verdict
                        .detail
                        .map(|d| alloc::format!(": {d}"))
                        .unwrap_or_default()
                ),
            );
        }
    }

    // Stage v: difficulty labeling.
    let mut labeled: Vec<(Sample, Language)> = Vec::new();
    for (sample, language) in executable {
        let tags: Vec<String> = sample
            .meta
            .get(&config.tags_key)
            .and_then(|v| v.as_array())
            .map(|arr| {
                arr.iter()
                    .filter_map(|v| v.as_str().map(|s| s.to_string()))
                    .collect()
            })
            .unwrap_or_default();
        let tag_refs: Vec<&str> = tags.iter().map(|s| s.as_str()).collect();
        let label = match label_difficulty(&tag_refs) {
            Ok(label) => label,
            // No tags: fall back to keyword detection over the full text.
            Err(_) => difficulty_from_text(&sample.full_text()),
        };
        for unknown in &label.unknown_tags {
            warnings.unknown_tags.push((sample.id.clone(), unknown.clone()));
        }
        let tagged = sample.with_meta("difficulty", MetaValue::from(label.difficulty.name()));
        labeled.push((tagged, language));
    }

    // Stage vi: task classification.
    let mut finished: Vec<Sample> = Vec::new();
    for (sample, _) in labeled {
        match classify_task(&sample) {
            Ok(task) => finished.push(sample.with_meta("task", MetaValue::from(task.name()))),
            Err(e) => drops.record(&sample.id, Stage::Task, e.to_string()),
        }
    }

    CodePipelineOutcome {
        samples: finished,
        drops,
        warnings,
    }
}

/// One bucket of a distribution axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BucketStat {
    pub bucket: String,
    pub count: usize,
    pub fraction: f64,
    pub dominant: bool,
}

/// Counts and fractions for one metadata axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisReport {
    pub axis: String,
    pub buckets: Vec<BucketStat>,
}

/// Distribution report over several metadata axes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionReport {
    pub total: usize,
    pub axes: Vec<AxisReport>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReportError {
    #[error("sample `{id}` is missing axis key `{key}`")]
    MissingKey { id: String, key: String },
}

fn bucket_name(value: &MetaValue) -> String {
    match value {
        MetaValue::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Per-bucket counts and fractions for each axis, flagging buckets whose
/// share exceeds the dominance threshold.
pub fn distribution_report(
    samples: &[Sample],
    axes: &[&str],
    dominance_threshold: f64,
) -> Result<DistributionReport, ReportError> {
    let mut reports = Vec::new();
    for &axis in axes {
        let mut counts: BTreeMap<String, usize> = BTreeMap::new();
        for sample in samples {
            let value = sample.meta.get(axis).ok_or_else(|| ReportError::MissingKey {
                id: sample.id.clone(),
                key: axis.to_string(),
            })?;
            *counts.entry(bucket_name(value)).or_insert(0) += 1;
        }
        let total = samples.len();
        let buckets = counts
            .into_iter()
            .map(|(bucket, count)| {
                let fraction = if total == 0 {
                    0.0
                } else {
                    count as f64 / total as f64
                };
                BucketStat {
                    bucket,
                    count,
                    fraction,
                    dominant: fraction > dominance_threshold,
                }
            })
            .collect();
        reports.push(AxisReport {
            axis: axis.to_string(),
            buckets,
        });
    }
    Ok(DistributionReport {
        total: samples.len(),
        axes: reports,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{DefaultLength, Message, MetaMap, Role};
    use alloc::vec;

    fn code_sample(id: &str, source: &str, user: &str) -> Sample {
        Sample::new(
            id,
            source,
            vec![Message::new(Role::User, user)],
            MetaMap::new(),
            &DefaultLength,
        )
    }

    fn good_sample(id: &str) -> Sample {
        code_sample(
            id,
            "srcA",
            "Fix my code, it throws an error:\n```python\ndef total(n):\n    acc = 0\n    for i in range(n):\n        acc += i\n    return acc\n```\n",
        )
    }

    #[test]
    fn healthy_corpus_survives_with_full_meta() {
        let samples: Vec<Sample> = (0..3).map(|i| good_sample(&alloc::format!("s{i}"))).collect();
        let out = run_code_pipeline(&samples, &CodePipelineConfig::default());
        assert_eq!(out.samples.len(), 3);
        assert!(out.drops.is_empty());
        for s in &out.samples {
            let meta = CodeMeta::read(s).expect("full meta present");
            assert_eq!(meta.language, Language::Python);
            assert!(meta.quality_score >= 4);
            assert!(meta.is_executable);
        }
    }

    #[test]
    fn executability_failure_drops_with_stage() {
        let mut samples: Vec<Sample> = (0..2).map(|i| good_sample(&alloc::format!("s{i}"))).collect();
        samples.push(code_sample(
            "broken",
            "srcB",
            "Fix my code, it throws an error:\n```python\ndef f(n):\n    acc = 0\n    for i in range(n):\n      acc += i\n        acc -= 1\n    return acc\n```\n",
        ));
        let out = run_code_pipeline(&samples, &CodePipelineConfig::default());
        let dropped: Vec<&str> = out
            .drops
            .entries
            .iter()
            .map(|e| e.sample_id.as_str())
            .collect();
        assert!(dropped.contains(&"broken"));
        let entry = out
            .drops
            .entries
            .iter()
            .find(|e| e.sample_id == "broken")
            .unwrap();
        assert!(matches!(
            entry.stage,
            Stage::Executability | Stage::EducationScore
        ));
        // Conservation.
        assert_eq!(samples.len(), out.samples.len() + out.drops.distinct_ids());
    }

    #[test]
    fn empty_corpus_is_fine() {
        let out = run_code_pipeline(&[], &CodePipelineConfig::default());
        assert!(out.samples.is_empty());
        assert!(out.drops.is_empty());
    }

    #[test]
    fn non_code_sample_drops_at_language_stage() {
        let samples = vec![code_sample("prose", "srcA", "what is a monad?")];
        let out = run_code_pipeline(&samples, &CodePipelineConfig::default());
        assert!(out.samples.is_empty());
        assert_eq!(out.drops.entries[0].stage, Stage::Language);
    }

    #[test]
    fn stage_monotonicity_language_survives_to_end() {
        let samples: Vec<Sample> = (0..3).map(|i| good_sample(&alloc::format!("s{i}"))).collect();
        let out = run_code_pipeline(&samples, &CodePipelineConfig::default());
        for s in &out.samples {
            assert_eq!(s.meta_str("language"), Some("python"));
        }
    }

    #[test]
    fn difficulty_from_meta_tags() {
        let mut s = good_sample("tagged");
        s.meta.insert(
            "tags".to_string(),
            serde_json::json!(["Heap", "Array"]),
        );
        let out = run_code_pipeline(&[s], &CodePipelineConfig::default());
        assert_eq!(out.samples[0].meta_str("difficulty"), Some("Medium"));
    }

    #[test]
    fn filter_soundness_invariant() {
        let mut samples: Vec<Sample> = (0..5).map(|i| good_sample(&alloc::format!("g{i}"))).collect();
        samples.push(code_sample("weak", "srcC", "```python\nx\n```\n"));
        let out = run_code_pipeline(&samples, &CodePipelineConfig::default());
        for s in &out.samples {
            let meta = CodeMeta::read(s).unwrap();
            assert!(meta.quality_score >= 4);
            assert!(meta.is_executable);
        }
    }

    #[test]
    fn distribution_report_flags_dominant() {
        let mut samples = Vec::new();
        for i in 0..10 {
            let task = if i < 6 { "SelfRepair" } else { "CodeGeneration" };
            let mut s = code_sample(&alloc::format!("s{i}"), "src", "x");
            s.meta.insert("task".to_string(), MetaValue::from(task));
            samples.push(s);
        }
        let report = distribution_report(&samples, &["task"], 0.5).unwrap();
        let buckets = &report.axes[0].buckets;
        let repair = buckets.iter().find(|b| b.bucket == "SelfRepair").unwrap();
        assert_eq!(repair.count, 6);
        assert!((repair.fraction - 0.6).abs() < 1e-12);
        assert!(repair.dominant);
        let generation = buckets.iter().find(|b| b.bucket == "CodeGeneration").unwrap();
        assert!(!generation.dominant);
    }

    #[test]
    fn distribution_single_sample() {
        let mut s = code_sample("only", "src", "x");
        s.meta.insert("language".to_string(), MetaValue::from("python"));
        let report = distribution_report(&[s], &["language"], 0.5).unwrap();
        assert_eq!(report.axes[0].buckets[0].fraction, 1.0);
    }

    #[test]
    fn distribution_uniform_no_flags() {
        let mut samples = Vec::new();
        for (i, task) in ["A", "B", "C", "D"].iter().enumerate() {
            let mut s = code_sample(&alloc::format!("s{i}"), "src", "x");
            s.meta.insert("task".to_string(), MetaValue::from(*task));
            samples.push(s);
        }
        let report = distribution_report(&samples, &["task"], 0.5).unwrap();
        assert!(report.axes[0].buckets.iter().all(|b| !b.dominant));
        let sum: f64 = report.axes[0].buckets.iter().map(|b| b.fraction).sum();
        assert!((sum - 1.0).abs() < 1e-9);
    }

    #[test]
    fn distribution_missing_key_names_sample() {
        let s = code_sample("nometa", "src", "x");
        let err = distribution_report(&[s], &["task"], 0.5).unwrap_err();
        assert_eq!(
            err,
            ReportError::MissingKey {
                id: "nometa".to_string(),
                key: "task".to_string()
            }
        );
    }
}
