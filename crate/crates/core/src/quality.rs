//! Quality gate: the binary judge contract, Pass/Review/Reject triage, and
//! judge-vs-gold agreement metrics.
//!
//! Judges are transport-agnostic: anything that maps a sample to raw text can
//! act as one, and the raw text must parse as
//! `{"valid": <bool>, "issues": [{"category": <string>, "explanation": <string>}]}`.
//! Malformed output is retried once, then the sample routes to Review.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Role, Sample};

/// One flagged issue.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Issue {
    pub category: String,
    pub explanation: String,
}

/// A judge verdict. `valid` is true exactly when `issues` is empty; the
/// constructors enforce that, and the wire parser rejects payloads that
/// violate it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QualityVerdict {
    pub valid: bool,
    pub issues: Vec<Issue>,
}

impl QualityVerdict {
    pub fn pass() -> Self {
        Self {
            valid: true,
            issues: Vec::new(),
        }
    }

    pub fn flagged(issues: Vec<Issue>) -> Result<Self, QualityError> {
        if issues.is_empty() {
            return Err(QualityError::ContractViolation(
                "invalid verdict requires at least one issue".to_string(),
            ));
        }
        Ok(Self {
            valid: false,
            issues,
        })
    }

    pub fn contract_holds(&self) -> bool {
        self.valid == self.issues.is_empty()
    }
}

/// Triage outcome. Only `Reject` is excluded from training downstream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TriageLabel {
    Pass,
    Review,
    Reject,
}

/// Issue categories recognized out of the box. The vocabulary is open:
/// unknown categories are treated as minor with a warning, never an error.
pub const DEFAULT_VOCABULARY: [&str; 12] = [
    "Response Diversity",
    "High Difficulty Task Capability",
    "Multilingual Balance",
    "Specialized Capabilities",
    "System Prompt Acceptability",
    "Instruction Following",
    "New Task Generalization",
    "Cultural and Contextual Alignment",
    "Safety Balance",
    "Honesty & Transparency",
    "Role Consistency",
    "Response Consistency",
];

/// Default critical set: the safety/consistency categories.
pub const DEFAULT_CRITICAL: [&str; 4] = [
    "Safety Balance",
    "Honesty & Transparency",
    "Role Consistency",
    "Response Consistency",
];

#[derive(Debug, Error, PartialEq, Eq)]
pub enum QualityError {
    #[error("judge unavailable: {0}")]
    JudgeUnavailable(String),
    #[error("judge output violates contract: {0}")]
    ContractViolation(String),
    #[error("predictions and gold labels differ in length ({predictions} vs {gold})")]
    LengthMismatch { predictions: usize, gold: usize },
}

/// Anything that can judge a sample and answer with raw contract text.
pub trait Judge {
    fn judge(&self, sample: &Sample) -> Result<String, QualityError>;
}

impl<F: Fn(&Sample) -> Result<String, QualityError>> Judge for F {
    fn judge(&self, sample: &Sample) -> Result<String, QualityError> {
        self(sample)
    }
}

/// Parses raw judge text against the wire contract, including the
/// valid-iff-no-issues invariant.
pub fn parse_verdict(raw: &str) -> Result<QualityVerdict, QualityError> {
    let verdict: QualityVerdict = serde_json::from_str(raw)
        .map_err(|e| QualityError::ContractViolation(e.to_string()))?;
    if !verdict.contract_holds() {
        return Err(QualityError::ContractViolation(
            "valid flag disagrees with issue list".to_string(),
        ));
    }
    Ok(verdict)
}

/// Result of assessing one sample.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Assessment {
    /// The judge produced a contract-conforming verdict.
    Verdict(QualityVerdict),
    /// The judge failed the contract twice; the sample routes to Review.
    ReviewFallback { warning: String },
}

impl Assessment {
    pub fn verdict(&self) -> Option<&QualityVerdict> {
        match self {
            Assessment::Verdict(v) => Some(v),
            Assessment::ReviewFallback { .. } => None,
        }
    }
}

/// Runs one judge call with a single retry on contract failure. Transport
/// failures surface immediately and leave the sample untouched.
pub fn assess(sample: &Sample, judge: &dyn Judge) -> Result<Assessment, QualityError> {
    let mut last_failure = String::new();
    for _ in 0..2 {
        let raw = judge.judge(sample)?;
        match parse_verdict(&raw) {
            Ok(verdict) => return Ok(Assessment::Verdict(verdict)),
            Err(e) => last_failure = e.to_string(),
        }
    }
    Ok(Assessment::ReviewFallback {
        warning: last_failure,
    })
}

/// Triage per the partition rule: Pass iff valid; Reject iff some issue is in
/// the critical set; Review otherwise. Unknown categories are minor and come
/// back in `unknown_categories`.
pub fn triage(
    verdict: &QualityVerdict,
    critical_set: &[&str],
    vocabulary: &[&str],
) -> (TriageLabel, Vec<String>) {
    let unknown: Vec<String> = verdict
        .issues
        .iter()
        .filter(|i| !vocabulary.contains(&i.category.as_str()))
        .map(|i| i.category.clone())
        .collect();
    if verdict.valid {
        return (TriageLabel::Pass, unknown);
    }
    let critical = verdict
        .issues
        .iter()
        .any(|i| critical_set.contains(&i.category.as_str()));
    let label = if critical {
        TriageLabel::Reject
    } else {
        TriageLabel::Review
    };
    (label, unknown)
}

/// Judge-vs-gold agreement. The positive class is "flagged invalid".
/// Undefined ratios (zero denominators) stay `None` rather than collapsing
/// to zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgreementStats {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
    pub tn: usize,
    pub accuracy: Option<f64>,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
}

impl AgreementStats {
    pub fn from_confusion(tp: usize, fp: usize, fn_: usize, tn: usize) -> Self {
        let ratio = |num: usize, den: usize| {
            if den == 0 {
                None
            } else {
                Some(num as f64 / den as f64)
            }
        };
        Self {
            tp,
            fp,
            fn_,
            tn,
            accuracy: ratio(tp + tn, tp + fp + fn_ + tn),
            precision: ratio(tp, tp + fp),
            recall: ratio(tp, tp + fn_),
        }
    }
}

/// Compares predicted verdicts against gold invalid-flags, aligned by index.
pub fn agreement(
    predictions: &[QualityVerdict],
    gold_invalid: &[bool],
) -> Result<AgreementStats, QualityError> {
    if predictions.len() != gold_invalid.len() {
        return Err(QualityError::LengthMismatch {
            predictions: predictions.len(),
            gold: gold_invalid.len(),
        });
    }
    let (mut tp, mut fp, mut fn_, mut tn) = (0usize, 0usize, 0usize, 0usize);
    for (pred, &gold) in predictions.iter().zip(gold_invalid) {
        match (!pred.valid, gold) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
            (false, false) => tn += 1,
        }
    }
    Ok(AgreementStats::from_confusion(tp, fp, fn_, tn))
}

/// Deterministic rule judge: flags empty assistant responses, detectable
/// format-instruction violations, and self-contradicting sentence pairs.
/// Emits contract JSON like any remote judge would.
#[derive(Debug, Clone, Copy, Default)]
pub struct RuleJudge;

impl Judge for RuleJudge {
    fn judge(&self, sample: &Sample) -> Result<String, QualityError> {
        let verdict = rule_verdict(sample);
        serde_json::to_string(&verdict).map_err(|e| QualityError::JudgeUnavailable(e.to_string()))
    }
}

fn rule_verdict(sample: &Sample) -> QualityVerdict {
    let mut issues = Vec::new();
    let response = sample.role_text(Role::Assistant);
    let instruction = sample.role_text(Role::User);

    if response.trim().is_empty() {
        issues.push(Issue {
            category: "Instruction Following".to_string(),
            explanation: "assistant response is empty".to_string(),
        });
    } else {
        if let Some(want) = requested_sentence_count(&instruction) {
            let got = count_sentences(&response);
            if got != want {
                issues.push(Issue {
                    category: "Instruction Following".to_string(),
                    explanation: alloc::format!(
                        "instruction asks for {want} sentences, response has {got}"
                    ),
                });
            }
        }
        if asks_for_bullets(&instruction) && !has_bullet_line(&response) {
            issues.push(Issue {
                category: "Instruction Following".to_string(),
                explanation: "instruction asks for bullet points, response has none".to_string(),
            });
        }
        if let Some(pair) = contradicting_pair(&response) {
            issues.push(Issue {
                category: "Response Consistency".to_string(),
                explanation: alloc::format!("contradictory sentences: {pair}"),
            });
        }
    }

    if issues.is_empty() {
        QualityVerdict::pass()
    } else {
        QualityVerdict {
            valid: false,
            issues,
        }
    }
}

fn requested_sentence_count(instruction: &str) -> Option<usize> {
    // Patterns like "in 3 sentences" / "in three sentences" (digits only).
    let lower = lowercase(instruction);
    let words: Vec<&str> = lower.split_whitespace().collect();
    for w in words.windows(3) {
        if w[0] == "in" && (w[2].starts_with("sentence")) {
            if let Ok(n) = w[1].parse::<usize>() {
                return Some(n);
            }
        }
    }
    None
}

fn asks_for_bullets(instruction: &str) -> bool {
    let lower = lowercase(instruction);
    lower.contains("bullet point") || lower.contains("bulleted list") || lower.contains("as bullets")
}

fn has_bullet_line(response: &str) -> bool {
    response.lines().any(|l| {
        let t = l.trim_start();
        t.starts_with("- ") || t.starts_with("* ") || t.starts_with("+ ")
    })
}

fn count_sentences(text: &str) -> usize {
    text.split(['.', '!', '?'])
        .filter(|part| !part.trim().is_empty())
        .count()
}

fn lowercase(text: &str) -> String {
    text.chars().flat_map(|c| c.to_lowercase()).collect()
}

const NEGATORS: [&str; 5] = ["not", "never", "no", "cannot", "n't"];

/// Looks for two sentences that are identical once negators are removed,
/// where exactly one of the pair carried a negator.
fn contradicting_pair(response: &str) -> Option<String> {
    struct Norm {
        original: String,
        stripped: Vec<String>,
        negated: bool,
    }
    let sentences: Vec<Norm> = response
        .split(['.', '!', '?'])
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            let mut stripped = Vec::new();
            let mut negated = false;
            for word in lowercase(s).split_whitespace() {
                let word = word.trim_matches(|c: char| c.is_ascii_punctuation());
                if word.is_empty() {
                    continue;
                }
                if NEGATORS.contains(&word) || word.ends_with("n't") {
                    negated = true;
                    continue;
                }
                stripped.push(word.to_string());
            }
            Norm {
                original: s.trim().to_string(),
                stripped,
                negated,
            }
        })
        .collect();
    for (i, a) in sentences.iter().enumerate() {
        for b in &sentences[i + 1..] {
            if !a.stripped.is_empty() && a.stripped == b.stripped && a.negated != b.negated {
                return Some(alloc::format!("`{}` vs `{}`", a.original, b.original));
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{DefaultLength, Message, MetaMap};
    use alloc::vec;

    fn chat(user: &str, assistant: &str) -> Sample {
        Sample::new(
            "s1",
            "src",
            vec![
                Message::new(Role::User, user),
                Message::new(Role::Assistant, assistant),
            ],
            MetaMap::new(),
            &DefaultLength,
        )
    }

    #[test]
    fn compliant_sample_passes_with_exact_contract_shape() {
        let sample = chat("explain gravity", "Gravity pulls masses together.");
        let raw = RuleJudge.judge(&sample).unwrap();
        assert_eq!(raw, r#"{"valid":true,"issues":[]}"#);
        let assessment = assess(&sample, &RuleJudge).unwrap();
        assert_eq!(assessment.verdict().unwrap(), &QualityVerdict::pass());
    }

    #[test]
    fn sentence_count_violation_flags_instruction_following() {
        let sample = chat(
            "Describe rain in 3 sentences.",
            "One. Two. Three. Four. Five. Six. Seven.",
        );
        let assessment = assess(&sample, &RuleJudge).unwrap();
        let verdict = assessment.verdict().unwrap();
        assert!(!verdict.valid);
        assert_eq!(verdict.issues[0].category, "Instruction Following");
    }

    #[test]
    fn empty_response_is_flagged() {
        let sample = chat("hello", "   ");
        let verdict = rule_verdict(&sample);
        assert!(!verdict.valid);
    }

    #[test]
    fn contradiction_is_flagged() {
        let sample = chat(
            "is the sky blue?",
            "The sky is blue. The sky is not blue.",
        );
        let verdict = rule_verdict(&sample);
        assert!(!verdict.valid);
        assert!(verdict
            .issues
            .iter()
            .any(|i| i.category == "Response Consistency"));
    }

    #[test]
    fn malformed_judge_routes_to_review_after_retry() {
        let bad = |_: &Sample| Ok("not json at all".to_string());
        let sample = chat("q", "a");
        match assess(&sample, &bad).unwrap() {
            Assessment::ReviewFallback { warning } => assert!(!warning.is_empty()),
            other => panic!("expected review fallback, got {other:?}"),
        }
    }

    #[test]
    fn contract_invariant_enforced_on_parse() {
        assert!(parse_verdict(r#"{"valid": true, "issues": []}"#).is_ok());
        assert!(parse_verdict(
            r#"{"valid": true, "issues": [{"category": "x", "explanation": "y"}]}"#
        )
        .is_err());
        assert!(parse_verdict(r#"{"valid": false, "issues": []}"#).is_err());
        assert!(parse_verdict(r#"{"valid": false}"#).is_err());
    }

    #[test]
    fn transport_failure_surfaces() {
        let down = |_: &Sample| Err(QualityError::JudgeUnavailable("socket closed".to_string()));
        let sample = chat("q", "a");
        assert!(matches!(
            assess(&sample, &down),
            Err(QualityError::JudgeUnavailable(_))
        ));
    }

    #[test]
    fn triage_partition() {
        let critical: Vec<&str> = DEFAULT_CRITICAL.to_vec();
        let vocab: Vec<&str> = DEFAULT_VOCABULARY.to_vec();

        let (label, _) = triage(&QualityVerdict::pass(), &critical, &vocab);
        assert_eq!(label, TriageLabel::Pass);

        let reject = QualityVerdict::flagged(vec![Issue {
            category: "Safety Balance".to_string(),
            explanation: "over-compliance".to_string(),
        }])
        .unwrap();
        assert_eq!(triage(&reject, &critical, &vocab).0, TriageLabel::Reject);

        let review = QualityVerdict::flagged(vec![Issue {
            category: "Response Diversity".to_string(),
            explanation: "templated".to_string(),
        }])
        .unwrap();
        assert_eq!(triage(&review, &critical, &vocab).0, TriageLabel::Review);
    }

    #[test]
    fn unknown_category_is_minor_with_warning() {
        let verdict = QualityVerdict::flagged(vec![Issue {
            category: "Mystery Axis".to_string(),
            explanation: "??".to_string(),
        }])
        .unwrap();
        let vocab: Vec<&str> = DEFAULT_VOCABULARY.to_vec();
        let (label, unknown) = triage(&verdict, &DEFAULT_CRITICAL, &vocab);
        assert_eq!(label, TriageLabel::Review);
        assert_eq!(unknown, vec!["Mystery Axis".to_string()]);
    }

    #[test]
    fn agreement_perfect() {
        let preds = vec![QualityVerdict::pass(); 4];
        let gold = vec![false; 4];
        let stats = agreement(&preds, &gold).unwrap();
        assert_eq!(stats.accuracy, Some(1.0));
        // No positives anywhere: precision and recall are undefined.
        assert_eq!(stats.precision, None);
        assert_eq!(stats.recall, None);
    }

    #[test]
    fn agreement_formula_fixture() {
        // tp=2, fp=1, fn=1, tn=6 -> accuracy 0.8, precision 2/3, recall 2/3
        let invalid = QualityVerdict::flagged(vec![Issue {
            category: "Instruction Following".to_string(),
            explanation: "x".to_string(),
        }])
        .unwrap();
        let valid = QualityVerdict::pass();
        let preds = vec![
            invalid.clone(),
            invalid.clone(),
            invalid.clone(),
            valid.clone(),
            valid.clone(),
            valid.clone(),
            valid.clone(),
            valid.clone(),
            valid.clone(),
            valid.clone(),
        ];
        let gold = vec![
            true, true, false, true, false, false, false, false, false, false,
        ];
        let stats = agreement(&preds, &gold).unwrap();
        assert_eq!((stats.tp, stats.fp, stats.fn_, stats.tn), (2, 1, 1, 6));
        assert_eq!(stats.accuracy, Some(0.8));
        assert_eq!(stats.precision, Some(2.0 / 3.0));
        assert_eq!(stats.recall, Some(2.0 / 3.0));
    }

    #[test]
    fn agreement_length_mismatch() {
        let preds = vec![QualityVerdict::pass()];
        assert!(matches!(
            agreement(&preds, &[]),
            Err(QualityError::LengthMismatch { .. })
        ));
    }
}
