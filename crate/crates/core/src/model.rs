//! Shared data model: samples, messages, drop accounting, and length measurement.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

/// Metadata values attached to a sample. JSON-shaped so unknown keys pass
/// through every stage verbatim.
pub type MetaValue = serde_json::Value;

/// String-keyed metadata map. `BTreeMap` keeps serialization order stable.
pub type MetaMap = BTreeMap<String, MetaValue>;

/// Speaker role of a message.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    System,
    User,
    Assistant,
    Tool,
}

/// One turn of a training record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Message {
    pub role: Role,
    pub content: String,
}

impl Message {
    pub fn new(role: Role, content: impl Into<String>) -> Self {
        Self {
            role,
            content: content.into(),
        }
    }
}

/// One training record: the unit flowing through every pipeline stage.
///
/// Immutable by convention once constructed; stages produce new samples via
/// [`Sample::with_meta`] rather than mutating in place, so samples can be
/// shared freely across parallel workers.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub id: String,
    pub source: String,
    pub messages: Vec<Message>,
    pub meta: MetaMap,
    /// Character count of all message contents concatenated.
    pub length_chars: usize,
    /// Length under the length function the sample was constructed with.
    pub length_tokens: usize,
}

impl Sample {
    /// Builds a sample, recomputing both length fields from the messages.
    pub fn new(
        id: impl Into<String>,
        source: impl Into<String>,
        messages: Vec<Message>,
        meta: MetaMap,
        length_fn: &dyn LengthFn,
    ) -> Self {
        let text = concat_contents(&messages);
        Self {
            id: id.into(),
            source: source.into(),
            messages,
            meta,
            length_chars: text.chars().count(),
            length_tokens: length_fn.measure(&text),
        }
    }

    /// All message contents concatenated, in order.
    pub fn full_text(&self) -> String {
        concat_contents(&self.messages)
    }

    /// Content of the first message with the given role, if any.
    pub fn first_content(&self, role: Role) -> Option<&str> {
        self.messages
            .iter()
            .find(|m| m.role == role)
            .map(|m| m.content.as_str())
    }

    /// Concatenated content of every message with the given role.
    pub fn role_text(&self, role: Role) -> String {
        let mut out = String::new();
        for m in self.messages.iter().filter(|m| m.role == role) {
            if !out.is_empty() {
                out.push('\n');
            }
            out.push_str(&m.content);
        }
        out
    }

    /// Copy of the sample with one metadata key set.
    pub fn with_meta(&self, key: &str, value: MetaValue) -> Self {
        let mut next = self.clone();
        next.meta.insert(key.to_string(), value);
        next
    }

    /// String-valued metadata lookup.
    pub fn meta_str(&self, key: &str) -> Option<&str> {
        self.meta.get(key).and_then(|v| v.as_str())
    }
}

fn concat_contents(messages: &[Message]) -> String {
    let mut text = String::new();
    for m in messages {
        text.push_str(&m.content);
    }
    text
}

/// Pluggable text-length function used wherever a token count is needed.
///
/// The default is a whitespace/punctuation proxy, not a real tokenizer; real
/// tokenizers plug in through this trait.
pub trait LengthFn {
    fn measure(&self, text: &str) -> usize;
}

impl<F: Fn(&str) -> usize> LengthFn for F {
    fn measure(&self, text: &str) -> usize {
        self(text)
    }
}

/// Default length proxy: each maximal run of non-whitespace, non-punctuation
/// characters counts once, and each ASCII punctuation character counts once.
///
/// `"f(x)=1"` measures 6: `f`, `(`, `x`, `)`, `=`, `1`.
#[derive(Debug, Clone, Copy, Default)]
pub struct DefaultLength;

impl LengthFn for DefaultLength {
    fn measure(&self, text: &str) -> usize {
        let mut count = 0usize;
        let mut in_run = false;
        for c in text.chars() {
            if c.is_whitespace() {
                in_run = false;
            } else if c.is_ascii_punctuation() {
                in_run = false;
                count += 1;
            } else if !in_run {
                in_run = true;
                count += 1;
            }
        }
        count
    }
}

/// Measures `text` with the supplied length function.
pub fn measure_length(text: &str, length_fn: &dyn LengthFn) -> usize {
    length_fn.measure(text)
}

/// Pipeline stages that may drop samples. The order of the variants is the
/// order stages run in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Language,
    EducationScore,
    FileFilter,
    Executability,
    Difficulty,
    Task,
    QualityGate,
}

impl Stage {
    pub fn name(self) -> &'static str {
        match self {
            Stage::Language => "language",
            Stage::EducationScore => "education_score",
            Stage::FileFilter => "file_filter",
            Stage::Executability => "executability",
            Stage::Difficulty => "difficulty",
            Stage::Task => "task",
            Stage::QualityGate => "quality_gate",
        }
    }
}

/// One dropped sample: which stage removed it and why.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DropEntry {
    pub sample_id: String,
    pub stage: Stage,
    pub reason: String,
}

/// Accounting for every sample removed during a pipeline run.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DropLog {
    pub entries: Vec<DropEntry>,
}

impl DropLog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, sample_id: impl Into<String>, stage: Stage, reason: impl Into<String>) {
        self.entries.push(DropEntry {
            sample_id: sample_id.into(),
            stage,
            reason: reason.into(),
        });
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Number of distinct sample ids present in the log.
    pub fn distinct_ids(&self) -> usize {
        let mut ids: Vec<&str> = self.entries.iter().map(|e| e.sample_id.as_str()).collect();
        ids.sort_unstable();
        ids.dedup();
        ids.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn sample(messages: Vec<Message>) -> Sample {
        Sample::new("s1", "src", messages, MetaMap::new(), &DefaultLength)
    }

    #[test]
    fn default_length_empty() {
        assert_eq!(measure_length("", &DefaultLength), 0);
    }

    #[test]
    fn default_length_words() {
        assert_eq!(measure_length("a b c", &DefaultLength), 3);
    }

    #[test]
    fn default_length_punctuation() {
        // f ( x ) = 1
        assert_eq!(measure_length("f(x)=1", &DefaultLength), 6);
    }

    #[test]
    fn default_length_deterministic() {
        let text = "for i in range(10):\n    print(i)";
        let a = measure_length(text, &DefaultLength);
        let b = measure_length(text, &DefaultLength);
        assert_eq!(a, b);
    }

    #[test]
    fn length_fn_pluggable() {
        let chars = |t: &str| t.chars().count();
        assert_eq!(measure_length("abc", &chars), 3);
    }

    #[test]
    fn sample_lengths_recomputed() {
        let s = sample(vec![
            Message::new(Role::User, "ab"),
            Message::new(Role::Assistant, "cd"),
        ]);
        assert_eq!(s.length_chars, 4);
        assert_eq!(s.length_tokens, 1); // "abcd" is one run
    }

    #[test]
    fn length_chars_counts_chars_not_bytes() {
        let s = sample(vec![Message::new(Role::User, "héé")]);
        assert_eq!(s.length_chars, 3);
    }

    #[test]
    fn droplog_distinct_ids() {
        let mut log = DropLog::new();
        log.record("a", Stage::Language, "x");
        log.record("b", Stage::Task, "y");
        log.record("a", Stage::Language, "x again");
        assert_eq!(log.len(), 3);
        assert_eq!(log.distinct_ids(), 2);
    }
}
