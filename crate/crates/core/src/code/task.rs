//! Task-type classification over the user turn.
//!
//! Ordered rules: repair requests, test-output prediction, execution tracing,
//! then generation as the default. A post-processing rule keeps samples that
//! already contain a complete solving program out of the generation bucket.

use alloc::string::String;
use serde::{Deserialize, Serialize};

use super::exec::check_executability;
use super::lang::{fenced_blocks, normalize_tag, Language};
use crate::model::{Role, Sample};

/// The four task types.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Task {
    CodeGeneration,
    SelfRepair,
    TestOutputPrediction,
    CodeExecution,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::CodeGeneration => "CodeGeneration",
            Task::SelfRepair => "SelfRepair",
            Task::TestOutputPrediction => "TestOutputPrediction",
            Task::CodeExecution => "CodeExecution",
        }
    }

    pub fn parse(text: &str) -> Option<Self> {
        match text {
            "CodeGeneration" => Some(Task::CodeGeneration),
            "SelfRepair" => Some(Task::SelfRepair),
            "TestOutputPrediction" => Some(Task::TestOutputPrediction),
            "CodeExecution" => Some(Task::CodeExecution),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TaskError {
    #[error("malformed sample: no user message")]
    MalformedSample,
}

const ERROR_SIGNALS: [&str; 12] = [
    "traceback",
    "error",
    "exception",
    "throws",
    "fails",
    "failed",
    "crash",
    "segfault",
    "stack trace",
    "wrong answer",
    "doesn't work",
    "does not work",
];

const FIX_SIGNALS: [&str; 8] = [
    "fix", "repair", "debug", "what's wrong", "what is wrong", "correct it", "correct the",
    "resolve",
];

const TEST_SIGNALS: [&str; 6] = [
    "test case",
    "test input",
    "unit test",
    "the test",
    "these tests",
    "assert",
];

const OUTPUT_ASK_SIGNALS: [&str; 8] = [
    "what does it return",
    "what does it print",
    "what will it print",
    "what is the output",
    "what's the output",
    "what does this output",
    "output of",
    "evaluate",
];

fn lowercase(text: &str) -> String {
    text.chars().flat_map(|c| c.to_lowercase()).collect()
}

fn contains_any(haystack: &str, needles: &[&str]) -> bool {
    needles.iter().any(|n| haystack.contains(n))
}

/// A user turn "contains code" when it has a fenced block or dense
/// indented-code-looking lines.
fn user_has_code(user_text: &str) -> bool {
    !fenced_blocks(user_text).is_empty()
}

/// Whether the user turn already contains a complete solving program: an
/// executable block that defines something.
fn contains_complete_program(user_text: &str) -> bool {
    for block in fenced_blocks(user_text) {
        let language = block
            .tag
            .as_deref()
            .and_then(normalize_tag)
            .unwrap_or(Language::Python);
        let verdict = check_executability(&block.body, language);
        let has_definition = block.body.contains("def ")
            || block.body.contains("fn ")
            || block.body.contains("function ")
            || block.body.contains("func ")
            || block.body.contains("int main")
            || block.body.contains("class ");
        if verdict.executable && has_definition {
            return true;
        }
    }
    false
}

/// Classifies the task type of one sample from its user turn.
pub fn classify_task(sample: &Sample) -> Result<Task, TaskError> {
    let user_text = sample.role_text(Role::User);
    if !sample.messages.iter().any(|m| m.role == Role::User) {
        return Err(TaskError::MalformedSample);
    }
    let lower = lowercase(&user_text);
    let has_code = user_has_code(&user_text);

    // Rule 1: code plus an error/failure report plus a fix ask.
    if has_code && contains_any(&lower, &ERROR_SIGNALS) && contains_any(&lower, &FIX_SIGNALS) {
        return Ok(Task::SelfRepair);
    }
    // Rule 2: code plus test inputs plus an ask for the test's output.
    if has_code
        && contains_any(&lower, &TEST_SIGNALS)
        && (contains_any(&lower, &OUTPUT_ASK_SIGNALS) || lower.contains("pass or fail"))
    {
        return Ok(Task::TestOutputPrediction);
    }
    // Rule 3: code plus a concrete input plus an evaluate/print ask.
    if has_code
        && contains_any(&lower, &OUTPUT_ASK_SIGNALS)
        && (lower.contains("input") || lower.contains("given") || lower.contains("with ") || lower.contains("for "))
    {
        return Ok(Task::CodeExecution);
    }
    if has_code && contains_any(&lower, &OUTPUT_ASK_SIGNALS) {
        return Ok(Task::CodeExecution);
    }

    // Default is generation, unless the turn already ships a complete
    // solving program; those reclassify as execution-style samples.
    if contains_complete_program(&user_text) {
        return Ok(Task::CodeExecution);
    }
    Ok(Task::CodeGeneration)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{DefaultLength, Message, MetaMap};
    use alloc::vec;

    fn user_sample(content: &str) -> Sample {
        Sample::new(
            "t1",
            "src",
            vec![Message::new(Role::User, content)],
            MetaMap::new(),
            &DefaultLength,
        )
    }

    #[test]
    fn repair_request() {
        let s = user_sample(
            "Here is my code, it throws IndexError, please fix it:\n```python\ndef f(xs):\n    return xs[10]\n```\n",
        );
        assert_eq!(classify_task(&s).unwrap(), Task::SelfRepair);
    }

    #[test]
    fn test_output_prediction() {
        let s = user_sample(
            "Given this function and the test case below, what is the output of the assert?\n```python\ndef double(x):\n    return 2 * x\n\nassert double(3) == 6\n```\n",
        );
        assert_eq!(classify_task(&s).unwrap(), Task::TestOutputPrediction);
    }

    #[test]
    fn code_execution() {
        let s = user_sample(
            "Given this function and input [1,2], what does it return?\n```python\ndef f(xs):\n    return xs[0]\n```\n",
        );
        assert_eq!(classify_task(&s).unwrap(), Task::CodeExecution);
    }

    #[test]
    fn plain_generation() {
        let s = user_sample("Write a function that reverses a string.");
        assert_eq!(classify_task(&s).unwrap(), Task::CodeGeneration);
    }

    #[test]
    fn no_user_message_is_malformed() {
        let s = Sample::new(
            "t1",
            "src",
            vec![Message::new(Role::Assistant, "hello")],
            MetaMap::new(),
            &DefaultLength,
        );
        assert_eq!(classify_task(&s), Err(TaskError::MalformedSample));
    }

    #[test]
    fn complete_program_never_classifies_as_generation() {
        let s = user_sample(
            "Write a function that sums a list.\n```python\ndef solve(xs):\n    total = 0\n    for x in xs:\n        total += x\n    return total\n```\n",
        );
        let task = classify_task(&s).unwrap();
        assert_ne!(task, Task::CodeGeneration);
    }

    #[test]
    fn incomplete_snippet_still_generates() {
        let s = user_sample(
            "Finish this:\n```python\ndef solve(xs:\n```\n",
        );
        assert_eq!(classify_task(&s).unwrap(), Task::CodeGeneration);
    }
}
