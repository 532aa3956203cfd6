//! Two-step programming-language identification: fence tags first, then a
//! deterministic weighted-signature classifier.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::model::Sample;

/// The predefined language set. Everything else maps to `Other`.
/// Declaration order doubles as the tie-break priority in the classifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Language {
    Python,
    Cpp,
    C,
    Java,
    JavaScript,
    TypeScript,
    Go,
    Rust,
    CSharp,
    Sql,
    Shell,
    Other,
}

impl Language {
    pub const ALL: [Language; 12] = [
        Language::Python,
        Language::Cpp,
        Language::C,
        Language::Java,
        Language::JavaScript,
        Language::TypeScript,
        Language::Go,
        Language::Rust,
        Language::CSharp,
        Language::Sql,
        Language::Shell,
        Language::Other,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Language::Python => "python",
            Language::Cpp => "cpp",
            Language::C => "c",
            Language::Java => "java",
            Language::JavaScript => "javascript",
            Language::TypeScript => "typescript",
            Language::Go => "go",
            Language::Rust => "rust",
            Language::CSharp => "csharp",
            Language::Sql => "sql",
            Language::Shell => "shell",
            Language::Other => "other",
        }
    }

    pub fn parse(text: &str) -> Option<Self> {
        Self::ALL.iter().copied().find(|l| l.name() == text)
    }

    /// Languages checked by balancing braces rather than a full parse.
    pub fn is_brace_language(self) -> bool {
        matches!(
            self,
            Language::Cpp
                | Language::C
                | Language::Java
                | Language::JavaScript
                | Language::TypeScript
                | Language::Go
                | Language::Rust
                | Language::CSharp
        )
    }
}

/// Normalizes a fence tag through the alias table.
pub fn normalize_tag(tag: &str) -> Option<Language> {
    let lower: String = tag.trim().chars().flat_map(|c| c.to_lowercase()).collect();
    let lang = match lower.as_str() {
        "python" | "python3" | "python2" | "py" | "pyi" => Language::Python,
        "cpp" | "c++" | "cxx" | "cc" | "hpp" => Language::Cpp,
        "c" | "h" => Language::C,
        "java" => Language::Java,
        "javascript" | "js" | "jsx" | "node" | "mjs" => Language::JavaScript,
        "typescript" | "ts" | "tsx" => Language::TypeScript,
        "go" | "golang" => Language::Go,
        "rust" | "rs" => Language::Rust,
        "csharp" | "c#" | "cs" | "dotnet" => Language::CSharp,
        "sql" | "mysql" | "postgres" | "postgresql" | "sqlite" | "tsql" | "plsql" => Language::Sql,
        "shell" | "sh" | "bash" | "zsh" | "console" | "shellscript" => Language::Shell,
        _ => return None,
    };
    Some(lang)
}

/// One fenced code block: optional tag plus body.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeBlock {
    pub tag: Option<String>,
    pub body: String,
}

/// Extracts fenced blocks from text, in order.
pub fn fenced_blocks(text: &str) -> Vec<CodeBlock> {
    let mut blocks = Vec::new();
    let mut current: Option<CodeBlock> = None;
    for line in text.lines() {
        let trimmed = line.trim_start();
        if trimmed.starts_with("```") {
            match current.take() {
                Some(block) => blocks.push(block),
                None => {
                    let tag = trimmed.trim_start_matches('`').trim();
                    current = Some(CodeBlock {
                        tag: if tag.is_empty() {
                            None
                        } else {
                            Some(tag.to_string())
                        },
                        body: String::new(),
                    });
                }
            }
            continue;
        }
        if let Some(block) = current.as_mut() {
            block.body.push_str(line);
            block.body.push('\n');
        }
    }
    blocks
}

/// The code content of a sample: fenced blocks joined, or the full text when
/// the sample is flagged as raw code (`meta.raw_code = true`).
pub fn code_text(sample: &Sample) -> Option<String> {
    if sample.meta.get("raw_code").and_then(|v| v.as_bool()) == Some(true) {
        return Some(sample.full_text());
    }
    let blocks = fenced_blocks(&sample.full_text());
    if blocks.is_empty() {
        return None;
    }
    Some(
        blocks
            .into_iter()
            .map(|b| b.body)
            .collect::<Vec<_>>()
            .join("\n"),
    )
}

/// Weighted signature table for the fallback classifier. Weights reflect how
/// specific a marker is to its language.
const SIGNATURES: [(Language, &[(&str, u32)]); 11] = [
    (
        Language::Python,
        &[
            ("def ", 3),
            ("import ", 2),
            ("elif ", 4),
            ("self.", 3),
            ("print(", 2),
            ("lambda ", 3),
            ("__init__", 5),
            ("None", 2),
            ("range(", 2),
            ("#!/usr/bin/env python", 6),
        ],
    ),
    (
        Language::Cpp,
        &[
            ("#include <", 3),
            ("std::", 5),
            ("cout", 4),
            ("template <", 4),
            ("template<", 4),
            ("nullptr", 3),
            ("::", 1),
            ("vector<", 3),
            ("using namespace", 5),
        ],
    ),
    (
        Language::C,
        &[
            ("#include <stdio.h>", 6),
            ("#include <stdlib.h>", 6),
            ("printf(", 3),
            ("malloc(", 4),
            ("typedef struct", 4),
            ("int main(", 2),
            ("->", 1),
        ],
    ),
    (
        Language::Java,
        &[
            ("public static void main", 6),
            ("public class", 5),
            ("System.out.println", 6),
            ("extends ", 2),
            ("implements ", 3),
            ("import java.", 6),
            ("@Override", 5),
        ],
    ),
    (
        Language::JavaScript,
        &[
            ("function ", 2),
            ("const ", 2),
            ("=>", 2),
            ("console.log", 5),
            ("let ", 2),
            ("document.", 4),
            ("require(", 3),
            ("async function", 3),
        ],
    ),
    (
        Language::TypeScript,
        &[
            (": string", 4),
            (": number", 4),
            ("interface ", 4),
            ("readonly ", 3),
            ("console.log", 2),
            ("export type", 5),
            ("implements ", 1),
            ("=>", 1),
        ],
    ),
    (
        Language::Go,
        &[
            ("func ", 4),
            ("package main", 6),
            (":=", 4),
            ("fmt.", 5),
            ("go func", 5),
            ("chan ", 4),
            ("defer ", 4),
        ],
    ),
    (
        Language::Rust,
        &[
            ("fn ", 4),
            ("let mut", 4),
            ("impl ", 4),
            ("match ", 2),
            ("println!", 6),
            ("pub fn", 5),
            ("&str", 5),
            ("::new()", 3),
        ],
    ),
    (
        Language::CSharp,
        &[
            ("using System", 6),
            ("namespace ", 4),
            ("Console.WriteLine", 6),
            ("public void", 3),
            ("var ", 1),
            ("string[]", 3),
            ("async Task", 4),
        ],
    ),
    (
        Language::Sql,
        &[
            ("select ", 4),
            ("from ", 2),
            ("where ", 2),
            ("insert into", 5),
            ("create table", 5),
            ("group by", 4),
            ("join ", 3),
        ],
    ),
    (
        Language::Shell,
        &[
            ("#!/bin/bash", 6),
            ("#!/bin/sh", 6),
            ("echo ", 3),
            ("grep ", 3),
            ("fi\n", 3),
            ("esac", 5),
            ("$(", 2),
            ("${", 2),
        ],
    ),
];

/// Generic code evidence: structure that distinguishes code from prose even
/// when no language signature matches.
const GENERIC_MARKERS: [&str; 8] = ["{", "}", ";", "=", "(", ")", "==", "return"];

/// Fallback classifier score for every language, case-sensitive except SQL
/// and shell keywords which are matched on the lowercased text.
pub fn signature_scores(code: &str) -> Vec<(Language, u32)> {
    let lower: String = code.chars().flat_map(|c| c.to_lowercase()).collect();
    SIGNATURES
        .iter()
        .map(|(lang, patterns)| {
            let haystack = if matches!(lang, Language::Sql | Language::Shell) {
                lower.as_str()
            } else {
                code
            };
            let score = patterns
                .iter()
                .filter(|(p, _)| haystack.contains(p))
                .map(|(_, w)| w)
                .sum();
            (*lang, score)
        })
        .collect()
}

fn generic_evidence(code: &str) -> bool {
    GENERIC_MARKERS.iter().any(|m| code.contains(m))
}

/// Identification outcome when the content genuinely is code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LanguageCall {
    pub language: Language,
    /// True when a fence tag decided; false when the classifier did.
    pub from_tag: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LanguageError {
    #[error("not a code sample: {0}")]
    NotACodeSample(String),
}

/// Two-step identification. A tagged fence is the primary signal; otherwise
/// the weighted-signature classifier decides, with the declaration order of
/// [`Language`] breaking ties. Content with no code evidence at all is not a
/// code sample.
pub fn identify_language(sample: &Sample) -> Result<LanguageCall, LanguageError> {
    let text = sample.full_text();
    let blocks = fenced_blocks(&text);
    let raw = sample.meta.get("raw_code").and_then(|v| v.as_bool()) == Some(true);
    if blocks.is_empty() && !raw {
        return Err(LanguageError::NotACodeSample(
            "no fenced code block and not flagged raw".to_string(),
        ));
    }

    // Primary signal: the first tagged fence.
    for block in &blocks {
        if let Some(tag) = &block.tag {
            if let Some(language) = normalize_tag(tag) {
                return Ok(LanguageCall {
                    language,
                    from_tag: true,
                });
            }
            // An unrecognized explicit tag still marks the sample as code.
            return Ok(LanguageCall {
                language: Language::Other,
                from_tag: true,
            });
        }
    }

    let code = code_text(sample).unwrap_or_default();
    let scores = signature_scores(&code);
    // Strict `>` keeps the first maximum, so ties resolve to the earliest
    // declared language.
    let mut best = (Language::Other, 0u32);
    for &(lang, score) in &scores {
        if score > best.1 {
            best = (lang, score);
        }
    }

    const MIN_SIGNATURE_SCORE: u32 = 3;
    if best.1 >= MIN_SIGNATURE_SCORE {
        return Ok(LanguageCall {
            language: best.0,
            from_tag: false,
        });
    }
    if best.1 > 0 || generic_evidence(&code) {
        return Ok(LanguageCall {
            language: Language::Other,
            from_tag: false,
        });
    }
    Err(LanguageError::NotACodeSample(
        "content carries no code signal".to_string(),
    ))
}
