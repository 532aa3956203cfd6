//! Education (training-suitability) scoring on the 1-5 scale.
//!
//! Scores 1-3 are training-incompatible and filtered; 4-5 are retained.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::exec::check_executability;
use super::lang::{code_text, Language};
use crate::model::Sample;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScorerError {
    #[error("scorer failed: {0}")]
    Failure(String),
}

/// Pluggable suitability scorer. External judge-backed scorers implement
/// this; the default is a deterministic rule scorer.
pub trait EducationScorer {
    fn score(&self, sample: &Sample, language: Language) -> Result<u8, ScorerError>;
}

impl<F: Fn(&Sample, Language) -> Result<u8, ScorerError>> EducationScorer for F {
    fn score(&self, sample: &Sample, language: Language) -> Result<u8, ScorerError> {
        self(sample, language)
    }
}

/// Scores below this are dropped.
pub const MIN_RETAINED_SCORE: u8 = 4;

/// Default rule scorer: one base point, plus one point each for parsing,
/// containing a definition, containing control flow, and being
/// self-contained under a shallow name check. Clamped to 1-5.
#[derive(Debug, Clone, Copy, Default)]
pub struct RuleScorer;

impl EducationScorer for RuleScorer {
    fn score(&self, sample: &Sample, language: Language) -> Result<u8, ScorerError> {
        let code = code_text(sample).unwrap_or_default();
        Ok(rule_score(&code, language))
    }
}

pub fn rule_score(code: &str, language: Language) -> u8 {
    let mut score = 1u8;
    let parseable = !code.trim().is_empty() && check_executability(code, language).executable;
    if parseable {
        score += 1;
    }
    if has_definition(code, language) {
        score += 1;
    }
    if has_control_flow(code, language) {
        score += 1;
    }
    // Unresolved names cannot be judged in code that does not parse.
    if parseable && is_self_contained(code, language) {
        score += 1;
    }
    score.clamp(1, 5)
}

fn has_definition(code: &str, language: Language) -> bool {
    let patterns: &[&str] = match language {
        Language::Python => &["def ", "class ", "lambda "],
        Language::Rust => &["fn ", "impl ", "struct ", "enum ", "trait "],
        Language::Go => &["func "],
        Language::JavaScript | Language::TypeScript => {
            &["function ", "=> ", "=>{", "class ", "constructor("]
        }
        Language::Java | Language::CSharp => &["class ", "void ", "interface ", "enum "],
        Language::C | Language::Cpp => &["int main", "void ", "struct ", "template", "class "],
        Language::Sql => &["create function", "create procedure", "create table", "create view"],
        Language::Shell => &["function ", "() {", "(){"],
        Language::Other => &["def ", "fn ", "function ", "func ", "class ", "sub ", "proc "],
    };
    let haystack: String = if matches!(language, Language::Sql) {
        code.chars().flat_map(|c| c.to_lowercase()).collect()
    } else {
        code.to_string()
    };
    patterns.iter().any(|p| haystack.contains(p))
}

fn has_control_flow(code: &str, language: Language) -> bool {
    let generic = [
        "if ", "if(", "for ", "for(", "while ", "while(", "switch", "match ", "case ", "elif ",
        "else", "loop ", "loop{",
    ];
    let haystack: String = if matches!(language, Language::Sql) {
        code.chars().flat_map(|c| c.to_lowercase()).collect()
    } else {
        code.to_string()
    };
    generic.iter().any(|p| haystack.contains(p))
}

/// Shallow name check: every identifier used must be defined locally or be a
/// builtin/keyword of the language. Token-level, deliberately approximate.
fn is_self_contained(code: &str, language: Language) -> bool {
    let idents = identifiers(code);
    if idents.is_empty() {
        return false;
    }
    let defined = defined_names(code, language);
    let builtins = builtin_names(language);
    idents.iter().all(|name| {
        defined.contains(name)
            || builtins.contains(&name.as_str())
            || name.chars().next().is_some_and(|c| c.is_uppercase())
    })
}

fn identifiers(code: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut current = String::new();
    let mut in_string: Option<char> = None;
    let mut prev = ' ';
    let mut word_start = ' ';
    for c in code.chars() {
        if let Some(q) = in_string {
            if c == q && prev != '\\' {
                in_string = None;
            }
            prev = c;
            continue;
        }
        if c == '"' || c == '\'' {
            in_string = Some(c);
            if !current.is_empty() && word_start != '.' {
                out.push(core::mem::take(&mut current));
            }
            current.clear();
            prev = c;
            continue;
        }
        if c == '_' || c.is_alphanumeric() {
            if current.is_empty() {
                word_start = prev;
            }
            current.push(c);
        } else if !current.is_empty() {
            // Attribute accesses (`obj.attr`) are not free names.
            if word_start != '.' {
                out.push(core::mem::take(&mut current));
            }
            current.clear();
        }
        prev = c;
    }
    if !current.is_empty() && word_start != '.' {
        out.push(current);
    }
    out.retain(|t| t.chars().next().is_some_and(|c| c == '_' || c.is_alphabetic()));
    out.sort();
    out.dedup();
    out
}

/// Names bound by the code itself: definition names, parameters, assignment
/// targets, loop variables, imports.
fn defined_names(code: &str, language: Language) -> Vec<String> {
    let mut defined = Vec::new();
    let def_keywords: &[&str] = match language {
        Language::Python => &["def", "class", "import", "from", "as", "for", "lambda", "global", "nonlocal", "except"],
        Language::Rust => &["fn", "struct", "enum", "trait", "impl", "let", "for", "use", "mod", "const", "static"],
        Language::Go => &["func", "type", "var", "const", "import", "for", "range", "package"],
        _ => &["function", "class", "var", "let", "const", "for", "def", "import", "int", "float", "double", "char", "void", "auto", "long"],
    };
    let words: Vec<String> = code
        .split(|c: char| !(c == '_' || c.is_alphanumeric()))
        .filter(|w| !w.is_empty())
        .map(|w| w.to_string())
        .collect();
    for pair in words.windows(2) {
        if def_keywords.contains(&pair[0].as_str()) {
            defined.push(pair[1].clone());
        }
    }
    // Assignment targets and parameter-position names: a word directly
    // followed by `=` (not `==`), `:`, `,`, `(`, or `)`.
    let mut chars = code.chars().peekable();
    let mut word = String::new();
    while let Some(c) = chars.next() {
        if c == '_' || c.is_alphanumeric() {
            word.push(c);
            continue;
        }
        if !word.is_empty() {
            let completed = core::mem::take(&mut word);
            let binds = match c {
                '=' => chars.peek() != Some(&'='),
                ':' | ',' | ')' => true,
                ' ' => chars.peek() == Some(&'='), // loose `x =` with a space
                _ => false,
            };
            if binds {
                defined.push(completed);
            }
        }
    }
    defined.sort();
    defined.dedup();
    defined
}

fn builtin_names(language: Language) -> &'static [&'static str] {
    match language {
        Language::Python => &[
            "abs", "all", "any", "bool", "dict", "enumerate", "filter", "float", "format",
            "frozenset", "input", "int", "isinstance", "len", "list", "map", "max", "min", "open",
            "ord", "chr", "print", "range", "repr", "reversed", "round", "set", "sorted", "str",
            "sum", "tuple", "type", "zip", "True", "False", "None", "and", "or", "not", "in",
            "is", "if", "else", "elif", "for", "while", "def", "class", "return", "yield",
            "import", "from", "as", "try", "except", "finally", "raise", "with", "pass", "break",
            "continue", "lambda", "global", "nonlocal", "del", "assert", "self", "cls",
            "Exception", "ValueError", "TypeError", "IndexError", "KeyError", "StopIteration",
            "__name__", "__main__", "__init__",
        ],
        Language::Rust => &[
            "fn", "let", "mut", "pub", "use", "mod", "impl", "struct", "enum", "trait", "match",
            "if", "else", "for", "while", "loop", "return", "in", "as", "ref", "move", "self",
            "Self", "super", "crate", "where", "dyn", "println", "print", "vec", "format",
            "Some", "None", "Ok", "Err", "String", "Vec", "Box", "usize", "isize", "u8", "u16",
            "u32", "u64", "i8", "i16", "i32", "i64", "f32", "f64", "bool", "str", "char", "true",
            "false", "const", "static", "unsafe", "async", "await", "break", "continue",
        ],
        _ => &[
            "if", "else", "for", "while", "switch", "case", "return", "break", "continue", "int",
            "float", "double", "char", "void", "bool", "true", "false", "new", "delete", "null",
            "nullptr", "const", "static", "public", "private", "protected", "class", "struct",
            "function", "var", "let", "this", "std", "cout", "cin", "endl", "printf", "scanf",
            "main", "String", "System", "console", "log", "require", "module", "exports",
            "import", "export", "package", "func", "fmt", "Println", "len", "cap", "make",
            "append", "default", "do", "try", "catch", "finally", "throw", "throws", "using",
            "namespace", "template", "typename", "auto", "vector", "string", "include", "define",
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{DefaultLength, Message, MetaMap, Role};
    use alloc::vec;

    fn code_sample(tag: &str, code: &str) -> Sample {
        Sample::new(
            "s1",
            "src",
            vec![Message::new(
                Role::User,
                alloc::format!("```{tag}\n{code}```\n"),
            )],
            MetaMap::new(),
            &DefaultLength,
        )
    }

    #[test]
    fn empty_block_scores_one() {
        let s = code_sample("python", "");
        assert_eq!(RuleScorer.score(&s, Language::Python).unwrap(), 1);
    }

    #[test]
    fn complete_function_with_loop_scores_five() {
        let code = "def total(n):\n    acc = 0\n    for i in range(n):\n        acc += i\n    return acc\n";
        let s = code_sample("python", code);
        assert_eq!(RuleScorer.score(&s, Language::Python).unwrap(), 5);
    }

    #[test]
    fn broken_snippet_with_loop_is_filtered() {
        // Unbalanced parenthesis: not parseable, so at most base + def + flow.
        let code = "def f(:\n    for i in range(3):\n        print(i\n";
        let s = code_sample("python", code);
        let score = RuleScorer.score(&s, Language::Python).unwrap();
        assert!(score <= 3, "got {score}");
        assert!(score < MIN_RETAINED_SCORE);
    }

    #[test]
    fn free_names_lose_the_self_contained_point() {
        // `helper` is never defined.
        let code = "def f(x):\n    return helper(x)\n";
        let s = code_sample("python", code);
        let score = RuleScorer.score(&s, Language::Python).unwrap();
        assert_eq!(score, 3); // base + parseable + def, no flow, not self-contained
    }

    #[test]
    fn scorer_is_pluggable() {
        let fixed = |_: &Sample, _: Language| Ok(5u8);
        let s = code_sample("python", "");
        assert_eq!(fixed.score(&s, Language::Python).unwrap(), 5);
    }
}
