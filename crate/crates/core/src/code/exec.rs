//! Executability checking across languages.
//!
//! Python gets the full tokenizer and statement-grammar check. Brace
//! languages get context-aware delimiter balancing (string, char, and
//! comment contexts respected) plus a nonempty top-level declaration
//! requirement. SQL, shell, and unknown languages get delimiter balance
//! only, and passing verdicts are marked as approximate.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use super::lang::Language;
use super::python::{check_python, PyFailure};

/// Why a check failed, or how it passed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExecReason {
    Ok,
    TokenizeError,
    UnbalancedDelimiters,
    IndentationInconsistent,
    GrammarViolation,
    /// The language has no full parser here; only delimiter balance ran.
    UnsupportedLanguageApprox,
}

/// Verdict of the executability check.
///
/// `executable == true` with `reason == Ok` means the full check for the
/// language passed; `executable == true` with `UnsupportedLanguageApprox`
/// means only the approximate check was available and it passed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExecutabilityVerdict {
    pub executable: bool,
    pub reason: ExecReason,
    pub location: Option<(usize, usize)>,
    pub detail: Option<String>,
}

impl ExecutabilityVerdict {
    fn pass() -> Self {
        Self {
            executable: true,
            reason: ExecReason::Ok,
            location: None,
            detail: None,
        }
    }

    fn pass_approx() -> Self {
        Self {
            executable: true,
            reason: ExecReason::UnsupportedLanguageApprox,
            location: None,
            detail: None,
        }
    }

    fn fail(reason: ExecReason, location: Option<(usize, usize)>, detail: String) -> Self {
        Self {
            executable: false,
            reason,
            location,
            detail: Some(detail),
        }
    }
}

/// Checks one piece of code under its language's rules.
pub fn check_executability(code: &str, language: Language) -> ExecutabilityVerdict {
    match language {
        Language::Python => match check_python(code) {
            Ok(()) => ExecutabilityVerdict::pass(),
            Err(failure) => {
                let loc = failure.location();
                let (reason, detail) = match failure {
                    PyFailure::Tokenize(d, _) => (ExecReason::TokenizeError, d),
                    PyFailure::Unbalanced(d, _) => (ExecReason::UnbalancedDelimiters, d),
                    PyFailure::Indentation(d, _) => (ExecReason::IndentationInconsistent, d),
                    PyFailure::Grammar(d, _) => (ExecReason::GrammarViolation, d),
                };
                ExecutabilityVerdict::fail(reason, Some((loc.line, loc.col)), detail)
            }
        },
        Language::Cpp
        | Language::C
        | Language::Java
        | Language::JavaScript
        | Language::TypeScript
        | Language::Go
        | Language::Rust
        | Language::CSharp => check_brace_language(code, language),
        Language::Sql => match balance_delimiters(code, &DelimiterStyle::sql()) {
            Ok(()) => ExecutabilityVerdict::pass_approx(),
            Err((detail, loc)) => {
                ExecutabilityVerdict::fail(ExecReason::UnbalancedDelimiters, Some(loc), detail)
            }
        },
        Language::Shell | Language::Other => {
            match balance_delimiters(code, &DelimiterStyle::shell_like()) {
                Ok(()) => ExecutabilityVerdict::pass_approx(),
                Err((detail, loc)) => {
                    ExecutabilityVerdict::fail(ExecReason::UnbalancedDelimiters, Some(loc), detail)
                }
            }
        }
    }
}

/// Comment/string conventions for the delimiter automaton.
struct DelimiterStyle {
    line_comments: Vec<&'static str>,
    block_comment: Option<(&'static str, &'static str)>,
    nested_block_comments: bool,
    /// Quote characters with escape handling.
    escaped_quotes: Vec<char>,
    /// Quote characters where backslash is literal (raw-ish strings).
    verbatim_quotes: Vec<char>,
    /// Template literals: quote char within which `${ ... }` nests.
    template_quote: Option<char>,
    /// `'` doubles as the lifetime sigil: only treat it as a char literal
    /// when a closing `'` sits one (or one escaped) character away.
    rust_char_literals: bool,
}

impl DelimiterStyle {
    fn for_language(lang: Language) -> Self {
        match lang {
            Language::JavaScript | Language::TypeScript => Self {
                line_comments: alloc::vec!["//"],
                block_comment: Some(("/*", "*/")),
                nested_block_comments: false,
                escaped_quotes: alloc::vec!['"', '\''],
                verbatim_quotes: Vec::new(),
                template_quote: Some('`'),
                rust_char_literals: false,
            },
            Language::Go => Self {
                line_comments: alloc::vec!["//"],
                block_comment: Some(("/*", "*/")),
                nested_block_comments: false,
                escaped_quotes: alloc::vec!['"', '\''],
                verbatim_quotes: alloc::vec!['`'],
                template_quote: None,
                rust_char_literals: false,
            },
            Language::Rust => Self {
                line_comments: alloc::vec!["//"],
                block_comment: Some(("/*", "*/")),
                nested_block_comments: true,
                escaped_quotes: alloc::vec!['"'],
                verbatim_quotes: Vec::new(),
                template_quote: None,
                rust_char_literals: true,
            },
            _ => Self {
                // C, C++, Java, C#.
                line_comments: alloc::vec!["//"],
                block_comment: Some(("/*", "*/")),
                nested_block_comments: false,
                escaped_quotes: alloc::vec!['"', '\''],
                verbatim_quotes: Vec::new(),
                template_quote: None,
                rust_char_literals: false,
            },
        }
    }

    fn sql() -> Self {
        Self {
            line_comments: alloc::vec!["--", "#"],
            block_comment: Some(("/*", "*/")),
            nested_block_comments: false,
            escaped_quotes: alloc::vec!['\'', '"'],
            verbatim_quotes: Vec::new(),
            template_quote: None,
            rust_char_literals: false,
        }
    }

    fn shell_like() -> Self {
        Self {
            line_comments: alloc::vec!["#"],
            block_comment: None,
            nested_block_comments: false,
            escaped_quotes: alloc::vec!['"'],
            verbatim_quotes: alloc::vec!['\''],
            template_quote: None,
            rust_char_literals: false,
        }
    }
}

/// Balances `{}`, `()`, `[]` outside strings and comments. On failure,
/// reports the offending location (line, col), 1-based.
fn balance_delimiters(code: &str, style: &DelimiterStyle) -> Result<(), (String, (usize, usize))> {
    let chars: Vec<char> = code.chars().collect();
    let mut stack: Vec<(char, (usize, usize))> = Vec::new();
    let mut template_brace_depths: Vec<usize> = Vec::new();
    let mut i = 0usize;
    let mut line = 1usize;
    let mut col = 1usize;

    let starts_with = |i: usize, pat: &str| -> bool {
        pat.chars()
            .enumerate()
            .all(|(k, pc)| chars.get(i + k) == Some(&pc))
    };

    macro_rules! advance {
        () => {{
            if chars[i] == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            i += 1;
        }};
    }

    while i < chars.len() {
        let c = chars[i];

        // Comments.
        if style.line_comments.iter().any(|lc| starts_with(i, lc)) {
            while i < chars.len() && chars[i] != '\n' {
                advance!();
            }
            continue;
        }
        if let Some((open, close)) = style.block_comment {
            if starts_with(i, open) {
                let mut depth = 1usize;
                for _ in 0..open.len() {
                    advance!();
                }
                while i < chars.len() && depth > 0 {
                    if style.nested_block_comments && starts_with(i, open) {
                        depth += 1;
                        for _ in 0..open.len() {
                            advance!();
                        }
                    } else if starts_with(i, close) {
                        depth -= 1;
                        for _ in 0..close.len() {
                            advance!();
                        }
                    } else {
                        advance!();
                    }
                }
                continue;
            }
        }

        // Rust: decide between a char literal and a lifetime.
        if style.rust_char_literals && c == '\'' {
            let is_char = match chars.get(i + 1) {
                Some('\\') => true,
                Some(_) => chars.get(i + 2) == Some(&'\''),
                None => false,
            };
            if is_char {
                advance!(); // opening quote
                while i < chars.len() {
                    if chars[i] == '\\' {
                        advance!();
                        if i < chars.len() {
                            advance!();
                        }
                    } else if chars[i] == '\'' {
                        advance!();
                        break;
                    } else {
                        advance!();
                    }
                }
            } else {
                // Lifetime: consume the sigil and identifier.
                advance!();
                while i < chars.len() && (chars[i] == '_' || chars[i].is_alphanumeric()) {
                    advance!();
                }
            }
            continue;
        }

        // Strings.
        if style.escaped_quotes.contains(&c) {
            let quote = c;
            advance!();
            while i < chars.len() {
                if chars[i] == '\\' {
                    advance!();
                    if i < chars.len() {
                        advance!();
                    }
                } else if chars[i] == quote {
                    advance!();
                    break;
                } else {
                    advance!();
                }
            }
            continue;
        }
        if style.verbatim_quotes.contains(&c) {
            let quote = c;
            advance!();
            while i < chars.len() && chars[i] != quote {
                advance!();
            }
            if i < chars.len() {
                advance!();
            }
            continue;
        }
        if style.template_quote == Some(c) {
            // Template literal: `${` re-enters code context.
            advance!();
            while i < chars.len() {
                if chars[i] == '\\' {
                    advance!();
                    if i < chars.len() {
                        advance!();
                    }
                } else if chars[i] == '$' && chars.get(i + 1) == Some(&'{') {
                    advance!();
                    advance!();
                    template_brace_depths.push(stack.len());
                    stack.push(('{', (line, col)));
                    break;
                } else if style.template_quote == Some(chars[i]) {
                    advance!();
                    break;
                } else {
                    advance!();
                }
            }
            continue;
        }

        match c {
            '(' | '[' | '{' => {
                stack.push((c, (line, col)));
                advance!();
            }
            ')' | ']' | '}' => {
                let expected = match c {
                    ')' => '(',
                    ']' => '[',
                    _ => '{',
                };
                let at = (line, col);
                match stack.pop() {
                    Some((open, _)) if open == expected => {
                        // Closing a template substitution returns to string
                        // context; skip to the end of the literal.
                        if c == '}' && template_brace_depths.last() == Some(&stack.len()) {
                            template_brace_depths.pop();
                            advance!();
                            while i < chars.len() {
                                if chars[i] == '\\' {
                                    advance!();
                                    if i < chars.len() {
                                        advance!();
                                    }
                                } else if chars[i] == '$' && chars.get(i + 1) == Some(&'{') {
                                    advance!();
                                    advance!();
                                    template_brace_depths.push(stack.len());
                                    stack.push(('{', (line, col)));
                                    break;
                                } else if style.template_quote == Some(chars[i]) {
                                    advance!();
                                    break;
                                } else {
                                    advance!();
                                }
                            }
                            continue;
                        }
                        advance!();
                    }
                    Some((open, _)) => {
                        return Err((alloc::format!("`{c}` closes `{open}`"), at));
                    }
                    None => {
                        return Err((alloc::format!("unmatched `{c}`"), at));
                    }
                }
            }
            _ => {
                advance!();
            }
        }
    }

    if let Some((open, at)) = stack.last() {
        return Err((alloc::format!("`{open}` is never closed"), *at));
    }
    Ok(())
}

const DECLARATION_MARKERS: [(Language, &[&str]); 8] = [
    (
        Language::Cpp,
        &["#include", "int main", "void ", "template", "class ", "struct ", "namespace ", "auto "],
    ),
    (
        Language::C,
        &["#include", "int main", "void ", "struct ", "typedef", "static ", "char ", "int "],
    ),
    (
        Language::Java,
        &["class ", "interface ", "enum ", "void ", "public ", "private ", "import "],
    ),
    (
        Language::JavaScript,
        &["function ", "const ", "let ", "var ", "class ", "import ", "export ", "=>"],
    ),
    (
        Language::TypeScript,
        &["function ", "const ", "let ", "interface ", "type ", "class ", "import ", "export ", "=>"],
    ),
    (
        Language::Go,
        &["package ", "func ", "import ", "type ", "var ", "const "],
    ),
    (
        Language::Rust,
        &["fn ", "struct ", "enum ", "impl ", "trait ", "use ", "mod ", "pub ", "let "],
    ),
    (
        Language::CSharp,
        &["using ", "namespace ", "class ", "interface ", "void ", "public ", "static "],
    ),
];

fn check_brace_language(code: &str, lang: Language) -> ExecutabilityVerdict {
    let style = DelimiterStyle::for_language(lang);
    if let Err((detail, loc)) = balance_delimiters(code, &style) {
        return ExecutabilityVerdict::fail(ExecReason::UnbalancedDelimiters, Some(loc), detail);
    }
    let markers = DECLARATION_MARKERS
        .iter()
        .find(|(l, _)| *l == lang)
        .map(|(_, m)| *m)
        .unwrap_or(&[]);
    let has_declaration =
        markers.iter().any(|m| code.contains(m)) || (code.contains('{') && code.contains('}'));
    let has_statement = code.contains(';');
    if !has_declaration && !has_statement {
        return ExecutabilityVerdict::fail(
            ExecReason::GrammarViolation,
            None,
            "no top-level declaration or statement".to_string(),
        );
    }
    ExecutabilityVerdict::pass()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn python_minimal_program_passes() {
        let v = check_executability("def f():\n    return 1\n", Language::Python);
        assert!(v.executable);
        assert_eq!(v.reason, ExecReason::Ok);
    }

    #[test]
    fn python_bad_indent_reports_location() {
        let v = check_executability("def f():\n    x = 1\n      y = 2\n", Language::Python);
        assert!(!v.executable);
        assert_eq!(v.reason, ExecReason::IndentationInconsistent);
        assert!(v.location.is_some());
    }

    #[test]
    fn cpp_brace_in_string_respected() {
        let code = "int main() {\n    const char* s = \"}\";\n    return 0;\n}\n";
        let v = check_executability(code, Language::Cpp);
        assert!(v.executable, "{v:?}");
        assert_eq!(v.reason, ExecReason::Ok);
    }

    #[test]
    fn cpp_unbalanced_detected() {
        let code = "int main() {\n    return 0;\n";
        let v = check_executability(code, Language::Cpp);
        assert!(!v.executable);
        assert_eq!(v.reason, ExecReason::UnbalancedDelimiters);
    }

    #[test]
    fn cpp_brace_in_comment_respected() {
        let code = "// closing } here\nint main() { return 0; /* { */ }\n";
        let v = check_executability(code, Language::Cpp);
        assert!(v.executable, "{v:?}");
    }

    #[test]
    fn rust_nested_comments_and_char_literals() {
        let code = "/* outer /* inner */ still comment */\nfn main() { let c = '{'; }\n";
        let v = check_executability(code, Language::Rust);
        assert!(v.executable, "{v:?}");
    }

    #[test]
    fn rust_lifetimes_are_not_strings() {
        let code = "fn id<'a>(x: &'a str) -> &'a str { x }\n";
        let v = check_executability(code, Language::Rust);
        assert!(v.executable, "{v:?}");
        let escaped = "fn main() { let c = '\\n'; let d = '}'; }\n";
        assert!(check_executability(escaped, Language::Rust).executable);
    }

    #[test]
    fn js_template_literal_with_substitution() {
        let code = "const x = `value ${compute({a: 1})} end`;\nconsole.log(x);\n";
        let v = check_executability(code, Language::JavaScript);
        assert!(v.executable, "{v:?}");
    }

    #[test]
    fn js_brace_inside_template_text_ignored() {
        let code = "const s = `unmatched } here`;\nfunction f() { return s; }\n";
        let v = check_executability(code, Language::JavaScript);
        assert!(v.executable, "{v:?}");
    }

    #[test]
    fn go_raw_string_ignores_braces() {
        let code = "package main\nfunc main() {\n    s := `has } brace`\n    _ = s\n}\n";
        let v = check_executability(code, Language::Go);
        assert!(v.executable, "{v:?}");
    }

    #[test]
    fn prose_in_brace_language_fails_declaration_check() {
        let v = check_executability("just some words\n", Language::Java);
        assert!(!v.executable);
        assert_eq!(v.reason, ExecReason::GrammarViolation);
    }

    #[test]
    fn sql_balanced_is_approx_pass() {
        let v = check_executability(
            "SELECT a, b FROM t WHERE c IN (1, 2, 3); -- trailing ( in comment\n",
            Language::Sql,
        );
        assert!(v.executable);
        assert_eq!(v.reason, ExecReason::UnsupportedLanguageApprox);
    }

    #[test]
    fn sql_unbalanced_fails() {
        let v = check_executability("SELECT a FROM t WHERE c IN (1, 2;\n", Language::Sql);
        assert!(!v.executable);
        assert_eq!(v.reason, ExecReason::UnbalancedDelimiters);
    }

    #[test]
    fn shell_quotes_respected() {
        let v = check_executability("echo \"a ( b\"\nif [ -f x ]; then\n  echo '}'\nfi\n", Language::Shell);
        assert!(v.executable, "{v:?}");
        assert_eq!(v.reason, ExecReason::UnsupportedLanguageApprox);
    }

    #[test]
    fn other_language_balance_only() {
        let v = check_executability("main = putStrLn (show [1, 2])\n", Language::Other);
        assert!(v.executable);
        assert_eq!(v.reason, ExecReason::UnsupportedLanguageApprox);
    }
}
