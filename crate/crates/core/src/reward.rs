//! Verifiable reward computation: shared format/repetition penalties,
//! pass-rate code rewards, multiple-choice rewards, structural-schema
//! rewards, [-1,1] normalization, and the judge output contract.
//!
//! The shared penalty is a pre-accuracy gate: when it fires, accuracy
//! computation is skipped and the response earns -1 outright.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::model::{DefaultLength, LengthFn};

/// What produced the reward value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RewardKind {
    PenaltyFormat,
    PenaltyRepetition,
    Accuracy,
}

/// A reward in [-1, 1]. Penalty kinds always carry -1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RewardOutcome {
    pub value: f64,
    pub kind: RewardKind,
    pub detail: String,
}

impl RewardOutcome {
    fn format_penalty(detail: impl Into<String>) -> Self {
        Self {
            value: -1.0,
            kind: RewardKind::PenaltyFormat,
            detail: detail.into(),
        }
    }

    fn repetition_penalty(detail: impl Into<String>) -> Self {
        Self {
            value: -1.0,
            kind: RewardKind::PenaltyRepetition,
            detail: detail.into(),
        }
    }

    fn accuracy(value: f64, detail: impl Into<String>) -> Self {
        Self {
            value,
            kind: RewardKind::Accuracy,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum RewardError {
    #[error("raw reward {0} outside [0, 1]")]
    RawOutOfRange(f64),
    #[error("test runner unavailable: {0}")]
    RunnerUnavailable(String),
    #[error("runner reported {passed} passes out of {total} tests")]
    BadRunnerReport { passed: usize, total: usize },
    #[error("unsupported schema feature: {0}")]
    UnsupportedSchemaFeature(String),
    #[error("judge contract violation in `{field}`: {detail}")]
    ContractViolation { field: String, detail: String },
}

/// Shared penalty configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PenaltyRules {
    /// Reasoning trace open/close token pair.
    pub reasoning_open: String,
    pub reasoning_close: String,
    /// Tokens whose consecutive repetition is capped.
    pub special_tokens: Vec<String>,
    /// Maximum allowed consecutive repetitions of a special token.
    pub special_repeat_cap: usize,
    /// Window length for the n-gram repetition rule.
    pub ngram_len: usize,
    /// Minimum occurrences of one window before the rule fires.
    pub ngram_repeats: usize,
}

impl Default for PenaltyRules {
    fn default() -> Self {
        Self {
            reasoning_open: "<think>".to_string(),
            reasoning_close: "</think>".to_string(),
            special_tokens: alloc::vec!["<think>".to_string(), "</think>".to_string()],
            special_repeat_cap: 8,
            ngram_len: 20,
            ngram_repeats: 4,
        }
    }
}

/// Checks the shared penalties. `None` means the response is clean and the
/// caller may compute an accuracy reward; `Some` means the penalty stands
/// and accuracy computation must be skipped.
pub fn shared_penalty(response: &str, rules: &PenaltyRules) -> Option<RewardOutcome> {
    // Unterminated reasoning trace.
    if let Some(open_at) = response.find(rules.reasoning_open.as_str()) {
        let after = &response[open_at + rules.reasoning_open.len()..];
        if !after.contains(rules.reasoning_close.as_str()) {
            return Some(RewardOutcome::format_penalty(alloc::format!(
                "reasoning trace opened with `{}` but never closed",
                rules.reasoning_open
            )));
        }
    }

    // Runaway consecutive special tokens. Whitespace between repeats still
    // counts as consecutive.
    for token in &rules.special_tokens {
        if token.is_empty() {
            continue;
        }
        let mut rest = response;
        while let Some(at) = rest.find(token.as_str()) {
            let mut run = 1usize;
            let mut cursor = &rest[at + token.len()..];
            while let Some(next) = cursor.trim_start().strip_prefix(token.as_str()) {
                run += 1;
                cursor = next;
            }
            if run > rules.special_repeat_cap {
                return Some(RewardOutcome::repetition_penalty(alloc::format!(
                    "special token `{token}` repeated {run} times consecutively (cap {})",
                    rules.special_repeat_cap
                )));
            }
            rest = cursor;
        }
    }

    // Repeated n-gram windows.
    if rules.ngram_len > 0 && rules.ngram_repeats > 0 {
        let tokens = tokenize(response);
        if tokens.len() >= rules.ngram_len {
            let mut interner: BTreeMap<&str, u32> = BTreeMap::new();
            let ids: Vec<u32> = tokens
                .iter()
                .map(|t| {
                    let next = interner.len() as u32;
                    *interner.entry(t.as_str()).or_insert(next)
                })
                .collect();
            let mut counts: BTreeMap<&[u32], usize> = BTreeMap::new();
            for window in ids.windows(rules.ngram_len) {
                let count = counts.entry(window).or_insert(0);
                *count += 1;
                if *count >= rules.ngram_repeats {
                    return Some(RewardOutcome::repetition_penalty(alloc::format!(
                        "a {}-token window repeats {} times",
                        rules.ngram_len,
                        rules.ngram_repeats
                    )));
                }
            }
        }
    }

    None
}

fn tokenize(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    for c in text.chars() {
        if c.is_whitespace() {
            if !current.is_empty() {
                tokens.push(core::mem::take(&mut current));
            }
        } else if c.is_ascii_punctuation() {
            if !current.is_empty() {
                tokens.push(core::mem::take(&mut current));
            }
            tokens.push(c.to_string());
        } else {
            current.push(c);
        }
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    tokens
}

/// Affine map from [0,1] accuracy onto the [-1,1] reward range.
pub fn normalize_reward(raw: f64) -> Result<f64, RewardError> {
    if !(0.0..=1.0).contains(&raw) {
        return Err(RewardError::RawOutOfRange(raw));
    }
    Ok(2.0 * raw - 1.0)
}

/// Test execution report: how many of the predefined cases passed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestReport {
    pub passed: usize,
    pub total: usize,
}

/// Executes extracted code against predefined tests. The shipped default is
/// a result-replay stub so suites run without a sandbox; real runners plug
/// in behind the same trait.
pub trait TestRunner {
    fn run(&self, code: &str) -> Result<TestReport, RewardError>;
}

impl<F: Fn(&str) -> Result<TestReport, RewardError>> TestRunner for F {
    fn run(&self, code: &str) -> Result<TestReport, RewardError> {
        self(code)
    }
}

/// Replay runner: answers every run with a fixed precomputed report.
#[derive(Debug, Clone, Copy)]
pub struct ReplayRunner(pub TestReport);

impl TestRunner for ReplayRunner {
    fn run(&self, _code: &str) -> Result<TestReport, RewardError> {
        Ok(self.0)
    }
}

/// Extracts the last fenced code block from a response.
pub fn last_fenced_block(response: &str) -> Option<String> {
    let mut blocks: Vec<String> = Vec::new();
    let mut current: Option<String> = None;
    for line in response.lines() {
        if line.trim_start().starts_with("```") {
            match current.take() {
                Some(block) => blocks.push(block),
                None => current = Some(String::new()),
            }
            continue;
        }
        if let Some(block) = current.as_mut() {
            block.push_str(line);
            block.push('\n');
        }
    }
    blocks.pop()
}

/// Pass-rate code reward: extract the last fenced block, run it, normalize
/// `passes / total` onto [-1,1]. No block at all is a format penalty.
pub fn code_reward(response: &str, runner: &dyn TestRunner) -> Result<RewardOutcome, RewardError> {
    let code = match last_fenced_block(response) {
        Some(code) => code,
        None => {
            return Ok(RewardOutcome::format_penalty(
                "no fenced code block in response",
            ))
        }
    };
    let report = runner.run(&code)?;
    if report.total == 0 || report.passed > report.total {
        return Err(RewardError::BadRunnerReport {
            passed: report.passed,
            total: report.total,
        });
    }
    let raw = report.passed as f64 / report.total as f64;
    Ok(RewardOutcome::accuracy(
        normalize_reward(raw)?,
        alloc::format!("{}/{} tests passed", report.passed, report.total),
    ))
}

/// Answer-extraction pattern for multiple-choice responses: the last line
/// starting with the prefix carries the answer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnswerPattern {
    pub prefix: String,
}

impl Default for AnswerPattern {
    fn default() -> Self {
        Self {
            prefix: "Answer:".to_string(),
        }
    }
}

impl AnswerPattern {
    /// Parses the answer out of a response, scanning lines from the end.
    pub fn extract<'a>(&self, response: &'a str) -> Option<&'a str> {
        response.lines().rev().find_map(|line| {
            let t = line.trim();
            t.strip_prefix(self.prefix.as_str()).map(|rest| {
                rest.trim()
                    .trim_end_matches(['.', ',', ';', ':', '!', '?'])
                    .trim()
            })
        })
    }
}

/// Multiple-choice reward: parsed answer matching the gold label earns +1,
/// a parseable wrong answer earns -1, an unparseable response is a format
/// penalty. Case-insensitive label comparison.
pub fn choice_reward(response: &str, gold: &str, format: &AnswerPattern) -> RewardOutcome {
    match format.extract(response) {
        None => RewardOutcome::format_penalty(alloc::format!(
            "no line matching `{} <label>`",
            format.prefix
        )),
        Some(answer) => {
            let matches = eq_ignore_case(answer, gold.trim());
            let raw = if matches { 1.0 } else { 0.0 };
            RewardOutcome::accuracy(
                2.0 * raw - 1.0,
                alloc::format!("parsed `{answer}`, gold `{gold}`"),
            )
        }
    }
}

fn eq_ignore_case(a: &str, b: &str) -> bool {
    a.chars().flat_map(|c| c.to_lowercase()).eq(b.chars().flat_map(|c| c.to_lowercase()))
}

/// Schema reward mode: binary validity or graded constraint fraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemaMode {
    Binary,
    Graded,
}

const SUPPORTED_SCHEMA_KEYS: [&str; 5] = ["type", "required", "properties", "items", "enum"];

struct ConstraintTally {
    satisfied: usize,
    total: usize,
}

fn check_schema(instance: &Value, schema: &Value, tally: &mut ConstraintTally) -> Result<(), RewardError> {
    let obj = match schema {
        Value::Object(map) => map,
        _ => {
            return Err(RewardError::UnsupportedSchemaFeature(
                "schema must be an object".to_string(),
            ))
        }
    };
    for key in obj.keys() {
        if !SUPPORTED_SCHEMA_KEYS.contains(&key.as_str()) {
            return Err(RewardError::UnsupportedSchemaFeature(key.clone()));
        }
    }

    if let Some(type_spec) = obj.get("type") {
        let name = type_spec.as_str().ok_or_else(|| {
            RewardError::UnsupportedSchemaFeature("non-string `type`".to_string())
        })?;
        let ok = match name {
            "object" => instance.is_object(),
            "array" => instance.is_array(),
            "string" => instance.is_string(),
            "number" => instance.is_number(),
            "integer" => instance.as_i64().is_some() || instance.as_u64().is_some(),
            "boolean" => instance.is_boolean(),
            "null" => instance.is_null(),
            other => {
                return Err(RewardError::UnsupportedSchemaFeature(alloc::format!(
                    "type `{other}`"
                )))
            }
        };
        tally.total += 1;
        tally.satisfied += usize::from(ok);
    }

    if let Some(required) = obj.get("required") {
        let keys = required.as_array().ok_or_else(|| {
            RewardError::UnsupportedSchemaFeature("non-array `required`".to_string())
        })?;
        for key in keys {
            let key = key.as_str().ok_or_else(|| {
                RewardError::UnsupportedSchemaFeature("non-string required key".to_string())
            })?;
            tally.total += 1;
            let present = instance
                .as_object()
                .is_some_and(|map| map.contains_key(key));
            tally.satisfied += usize::from(present);
        }
    }

    if let Some(allowed) = obj.get("enum") {
        let allowed = allowed.as_array().ok_or_else(|| {
            RewardError::UnsupportedSchemaFeature("non-array `enum`".to_string())
        })?;
        tally.total += 1;
        tally.satisfied += usize::from(allowed.contains(instance));
    }

    if let Some(props) = obj.get("properties") {
        let props = props.as_object().ok_or_else(|| {
            RewardError::UnsupportedSchemaFeature("non-object `properties`".to_string())
        })?;
        // Present keys are checked against their subschema; absent optional
        // keys contribute no constraints.
        for (key, subschema) in props {
            if let Some(value) = instance.as_object().and_then(|map| map.get(key)) {
                check_schema(value, subschema, tally)?;
            }
        }
    }

    if let Some(items) = obj.get("items") {
        if let Some(elements) = instance.as_array() {
            for element in elements {
                check_schema(element, items, tally)?;
            }
        } else {
            // `items` on a non-array only applies when `type: array` also
            // failed; the type constraint already accounts for it.
            let _ = items;
        }
    }

    Ok(())
}

/// Structural-schema reward over the supported subset (`type`, `required`,
/// `properties`, `items`, `enum`, nested composition). Binary mode maps
/// validity to +/-1; graded mode normalizes the satisfied-constraint
/// fraction. A vacuous schema (no constraints) counts as fully satisfied.
pub fn schema_reward(
    instance: &Value,
    schema: &Value,
    mode: SchemaMode,
) -> Result<RewardOutcome, RewardError> {
    let mut tally = ConstraintTally {
        satisfied: 0,
        total: 0,
    };
    check_schema(instance, schema, &mut tally)?;
    let raw = if tally.total == 0 {
        1.0
    } else {
        tally.satisfied as f64 / tally.total as f64
    };
    let value = match mode {
        SchemaMode::Binary => {
            if raw == 1.0 {
                1.0
            } else {
                -1.0
            }
        }
        SchemaMode::Graded => normalize_reward(raw)?,
    };
    Ok(RewardOutcome::accuracy(
        value,
        alloc::format!("{}/{} constraints satisfied", tally.satisfied, tally.total),
    ))
}

/// Scoring rubric for judge outputs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JudgeRubric {
    pub min_score: f64,
    pub max_score: f64,
    /// Discrete rubrics require integer-valued scores.
    pub discrete: bool,
}

/// Parsed judge output: final reward score, rationale, optional
/// per-dimension sub-scores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JudgeResult {
    pub score: f64,
    pub reasoning: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sub_scores: Option<BTreeMap<String, f64>>,
}

/// Parses structured judge output, enforcing the rubric range, discreteness,
/// and a nonempty reasoning field. Out-of-contract output errors so callers
/// can retry.
pub fn parse_judge(raw: &str, rubric: &JudgeRubric) -> Result<JudgeResult, RewardError> {
    let result: JudgeResult =
        serde_json::from_str(raw).map_err(|e| RewardError::ContractViolation {
            field: "payload".to_string(),
            detail: e.to_string(),
        })?;
    if !(rubric.min_score..=rubric.max_score).contains(&result.score) {
        return Err(RewardError::ContractViolation {
            field: "score".to_string(),
            detail: alloc::format!(
                "{} outside [{}, {}]",
                result.score,
                rubric.min_score,
                rubric.max_score
            ),
        });
    }
    if rubric.discrete && result.score != (result.score as i64) as f64 {
        return Err(RewardError::ContractViolation {
            field: "score".to_string(),
            detail: alloc::format!("{} is not an integer under a discrete rubric", result.score),
        });
    }
    if result.reasoning.trim().is_empty() {
        return Err(RewardError::ContractViolation {
            field: "reasoning".to_string(),
            detail: "must be nonempty".to_string(),
        });
    }
    Ok(result)
}

/// Composite entry point: shared penalties gate accuracy computation. The
/// accuracy closure runs only on clean responses.
pub fn composite_reward<F>(
    response: &str,
    rules: &PenaltyRules,
    accuracy: F,
) -> Result<RewardOutcome, RewardError>
where
    F: FnOnce(&str) -> Result<RewardOutcome, RewardError>,
{
    if let Some(penalty) = shared_penalty(response, rules) {
        return Ok(penalty);
    }
    accuracy(response)
}

/// Token count under the default length proxy; exposed for reward configs
/// that express limits in tokens.
pub fn token_count(text: &str) -> usize {
    DefaultLength.measure(text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use serde_json::json;

    #[test]
    fn clean_response_earns_no_penalty() {
        let rules = PenaltyRules::default();
        let response = "<think>work through it</think>\nThe answer is 4.";
        assert_eq!(shared_penalty(response, &rules), None);
    }

    #[test]
    fn unterminated_reasoning_is_format_penalty() {
        let rules = PenaltyRules::default();
        let response = "<think>still going";
        let outcome = shared_penalty(response, &rules).unwrap();
        assert_eq!(outcome.kind, RewardKind::PenaltyFormat);
        assert_eq!(outcome.value, -1.0);
    }

    #[test]
    fn nine_consecutive_specials_with_cap_eight() {
        let mut rules = PenaltyRules::default();
        rules.special_tokens = vec!["<end>".to_string()];
        rules.special_repeat_cap = 8;
        let response = "<end>".repeat(9);
        let outcome = shared_penalty(&response, &rules).unwrap();
        assert_eq!(outcome.kind, RewardKind::PenaltyRepetition);
        assert_eq!(outcome.value, -1.0);

        let eight = "<end>".repeat(8);
        assert_eq!(shared_penalty(&eight, &rules), None);
    }

    #[test]
    fn repeated_window_fires_ngram_rule() {
        let mut rules = PenaltyRules::default();
        rules.ngram_len = 4;
        rules.ngram_repeats = 3;
        let response = "alpha beta gamma delta ".repeat(6);
        let outcome = shared_penalty(&response, &rules).unwrap();
        assert_eq!(outcome.kind, RewardKind::PenaltyRepetition);
    }

    #[test]
    fn normalize_endpoints_and_midpoint() {
        assert_eq!(normalize_reward(0.0).unwrap(), -1.0);
        assert_eq!(normalize_reward(1.0).unwrap(), 1.0);
        assert_eq!(normalize_reward(0.5).unwrap(), 0.0);
        assert!(matches!(
            normalize_reward(1.5),
            Err(RewardError::RawOutOfRange(_))
        ));
    }

    #[test]
    fn code_reward_pass_rates() {
        let response = "Here you go:\n```python\nprint(1)\n```\n";
        let all = ReplayRunner(TestReport {
            passed: 10,
            total: 10,
        });
        assert_eq!(code_reward(response, &all).unwrap().value, 1.0);

        let some = ReplayRunner(TestReport { passed: 3, total: 4 });
        assert_eq!(code_reward(response, &some).unwrap().value, 0.5);
    }

    #[test]
    fn code_reward_without_block_is_format_penalty() {
        let runner = ReplayRunner(TestReport { passed: 1, total: 1 });
        let outcome = code_reward("no code here", &runner).unwrap();
        assert_eq!(outcome.kind, RewardKind::PenaltyFormat);
        assert_eq!(outcome.value, -1.0);
    }

    #[test]
    fn code_reward_runner_failure_surfaces() {
        let down = |_: &str| Err(RewardError::RunnerUnavailable("sandbox offline".to_string()));
        assert!(matches!(
            code_reward("```py\nx\n```", &down),
            Err(RewardError::RunnerUnavailable(_))
        ));
    }

    #[test]
    fn last_block_wins() {
        let response = "```py\nfirst\n```\ntext\n```py\nsecond\n```\n";
        assert_eq!(last_fenced_block(response).unwrap(), "second\n");
    }

    #[test]
    fn choice_reward_outcomes() {
        let fmt = AnswerPattern::default();
        assert_eq!(choice_reward("Answer: B", "B", &fmt).value, 1.0);
        assert_eq!(choice_reward("Answer: c.", "C", &fmt).value, 1.0);
        assert_eq!(choice_reward("Answer: A", "B", &fmt).value, -1.0);
        let missing = choice_reward("I think it's B", "B", &fmt);
        assert_eq!(missing.kind, RewardKind::PenaltyFormat);
    }

    #[test]
    fn choice_reward_ignores_preamble() {
        let fmt = AnswerPattern::default();
        let long = "Lots of reasoning.\nMore text.\nAnswer: D\n";
        let short = "Answer: D";
        assert_eq!(choice_reward(long, "D", &fmt).value, choice_reward(short, "D", &fmt).value);
    }

    #[test]
    fn schema_reward_binary() {
        let schema = json!({"type": "object", "required": ["a"]});
        let ok = json!({"a": 1});
        let missing = json!({"b": 1});
        assert_eq!(
            schema_reward(&ok, &schema, SchemaMode::Binary).unwrap().value,
            1.0
        );
        assert_eq!(
            schema_reward(&missing, &schema, SchemaMode::Binary)
                .unwrap()
                .value,
            -1.0
        );
    }

    #[test]
    fn schema_reward_graded_fraction() {
        // 4 constraints: type object, required a, required b, a's type.
        let schema = json!({
            "type": "object",
            "required": ["a", "b"],
            "properties": {"a": {"type": "integer"}}
        });
        let instance = json!({"a": "not an int"});
        // satisfied: type object, required a, a's type fails, required b fails -> 2/4
        let outcome = schema_reward(&instance, &schema, SchemaMode::Graded).unwrap();
        assert_eq!(outcome.value, 0.0);

        let three_of_four = json!({"a": "not an int", "b": 0});
        let outcome = schema_reward(&three_of_four, &schema, SchemaMode::Graded).unwrap();
        assert_eq!(outcome.value, 0.5);
    }

    #[test]
    fn schema_nested_and_enum() {
        let schema = json!({
            "type": "object",
            "required": ["kind", "items"],
            "properties": {
                "kind": {"enum": ["a", "b"]},
                "items": {"type": "array", "items": {"type": "integer"}}
            }
        });
        let good = json!({"kind": "a", "items": [1, 2, 3]});
        assert_eq!(
            schema_reward(&good, &schema, SchemaMode::Binary).unwrap().value,
            1.0
        );
        let bad_element = json!({"kind": "a", "items": [1, "x"]});
        assert_eq!(
            schema_reward(&bad_element, &schema, SchemaMode::Binary)
                .unwrap()
                .value,
            -1.0
        );
    }

    #[test]
    fn unsupported_schema_feature_errors() {
        let schema = json!({"type": "integer", "minimum": 3});
        assert_eq!(
            schema_reward(&json!(4), &schema, SchemaMode::Binary),
            Err(RewardError::UnsupportedSchemaFeature("minimum".to_string()))
        );
    }

    #[test]
    fn judge_contract_enforced() {
        let rubric = JudgeRubric {
            min_score: 1.0,
            max_score: 5.0,
            discrete: true,
        };
        let ok = parse_judge(r#"{"score": 4, "reasoning": "clear and complete"}"#, &rubric).unwrap();
        assert_eq!(ok.score, 4.0);

        let out_of_range = parse_judge(r#"{"score": 7, "reasoning": "x"}"#, &rubric);
        assert!(matches!(
            out_of_range,
            Err(RewardError::ContractViolation { ref field, .. }) if field == "score"
        ));

        let empty_reasoning = parse_judge(r#"{"score": 3, "reasoning": "  "}"#, &rubric);
        assert!(matches!(
            empty_reasoning,
            Err(RewardError::ContractViolation { ref field, .. }) if field == "reasoning"
        ));

        let fractional = parse_judge(r#"{"score": 3.5, "reasoning": "x"}"#, &rubric);
        assert!(fractional.is_err());

        let continuous = JudgeRubric {
            min_score: 0.0,
            max_score: 1.0,
            discrete: false,
        };
        let sub = parse_judge(
            r#"{"score": 0.75, "reasoning": "x", "sub_scores": {"accuracy": 0.9}}"#,
            &continuous,
        )
        .unwrap();
        assert_eq!(sub.sub_scores.unwrap()["accuracy"], 0.9);
    }

    #[test]
    fn penalty_precedence_over_perfect_accuracy() {
        let rules = PenaltyRules::default();
        let response = "<think>never closed\n```py\ncode\n```";
        let runner = ReplayRunner(TestReport {
            passed: 10,
            total: 10,
        });
        let outcome = composite_reward(response, &rules, |r| code_reward(r, &runner)).unwrap();
        assert_eq!(outcome.value, -1.0);
        assert_eq!(outcome.kind, RewardKind::PenaltyFormat);
    }
}
