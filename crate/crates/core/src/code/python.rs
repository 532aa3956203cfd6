//! Syntactic/structural executability checking for Python.
//!
//! Two passes: a faithful line-structure tokenizer (strings, comments,
//! implicit and explicit line joining, INDENT/DEDENT with tab-size-1 vs
//! tab-size-8 consistency, delimiter balancing), then a recursive-descent
//! statement checker over the token stream covering simple statements,
//! compound statements, and a full expression grammar with comprehensions.
//!
//! Known gaps, accepted deliberately: f-string interiors are opaque,
//! `match`/`case` statements are not recognized, and `await`/`async for`
//! placement is not validated against enclosing `async def`.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

/// Where a failure was detected (1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Location {
    pub line: usize,
    pub col: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PyFailure {
    Tokenize(String, Location),
    Unbalanced(String, Location),
    Indentation(String, Location),
    Grammar(String, Location),
}

impl PyFailure {
    pub fn location(&self) -> Location {
        match self {
            PyFailure::Tokenize(_, l)
            | PyFailure::Unbalanced(_, l)
            | PyFailure::Indentation(_, l)
            | PyFailure::Grammar(_, l) => *l,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum TokKind {
    Name(String),
    Number,
    Str,
    Op(&'static str),
    Newline,
    Indent,
    Dedent,
    EndMarker,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Token {
    kind: TokKind,
    line: usize,
    col: usize,
}

const KEYWORDS: [&str; 35] = [
    "False", "None", "True", "and", "as", "assert", "async", "await", "break", "class",
    "continue", "def", "del", "elif", "else", "except", "finally", "for", "from", "global",
    "if", "import", "in", "is", "lambda", "nonlocal", "not", "or", "pass", "raise", "return",
    "try", "while", "with", "yield",
];

// Longest first, so multi-character operators win. Brackets are tokenized by
// the balancing logic, not here.
const OPERATORS: [&str; 41] = [
    "**=", "//=", ">>=", "<<=", "...", "!=", ">=", "<=", "==", "->", ":=", "+=", "-=", "*=",
    "/=", "%=", "@=", "&=", "|=", "^=", ">>", "<<", "**", "//", "<", ">", "=", "+", "-", "*",
    "/", "%", "@", "&", "|", "^", "~", ":", ",", ".", ";",
];

struct Tokenizer {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    col: usize,
    indents: Vec<(usize, usize)>, // (width tab=8, width tab=1)
    brackets: Vec<(char, Location)>,
    tokens: Vec<Token>,
}

impl Tokenizer {
    fn new(source: &str) -> Self {
        Self {
            chars: source.chars().collect(),
            pos: 0,
            line: 1,
            col: 1,
            indents: alloc::vec![(0, 0)],
            brackets: Vec::new(),
            tokens: Vec::new(),
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn peek_at(&self, offset: usize) -> Option<char> {
        self.chars.get(self.pos + offset).copied()
    }

    fn here(&self) -> Location {
        Location {
            line: self.line,
            col: self.col,
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn push(&mut self, kind: TokKind, at: Location) {
        self.tokens.push(Token {
            kind,
            line: at.line,
            col: at.col,
        });
    }

    fn run(mut self) -> Result<Vec<Token>, PyFailure> {
        loop {
            if self.brackets.is_empty() {
                self.handle_indentation()?;
            }
            if self.peek().is_none() {
                break;
            }
            self.logical_line()?;
        }
        if let Some((open, at)) = self.brackets.last() {
            return Err(PyFailure::Unbalanced(
                alloc::format!("`{open}` is never closed"),
                *at,
            ));
        }
        let at = self.here();
        while self.indents.len() > 1 {
            self.indents.pop();
            self.push(TokKind::Dedent, at);
        }
        self.push(TokKind::EndMarker, at);
        Ok(self.tokens)
    }

    /// Measures leading whitespace of the next nonblank line and emits
    /// INDENT/DEDENT tokens. Blank and comment-only lines are skipped whole.
    fn handle_indentation(&mut self) -> Result<(), PyFailure> {
        loop {
            let mut w8 = 0usize;
            let mut w1 = 0usize;
            while let Some(c) = self.peek() {
                match c {
                    ' ' => {
                        w8 += 1;
                        w1 += 1;
                        self.bump();
                    }
                    '\t' => {
                        w8 = (w8 / 8 + 1) * 8;
                        w1 += 1;
                        self.bump();
                    }
                    '\u{c}' => {
                        w8 = 0;
                        w1 = 0;
                        self.bump();
                    }
                    _ => break,
                }
            }
            match self.peek() {
                None => return Ok(()),
                Some('\n') => {
                    self.bump();
                    continue;
                }
                Some('#') => {
                    while let Some(c) = self.peek() {
                        if c == '\n' {
                            break;
                        }
                        self.bump();
                    }
                    continue;
                }
                Some('\r') => {
                    self.bump();
                    continue;
                }
                Some(_) => {
                    let at = self.here();
                    let (top8, top1) = *self.indents.last().expect("stack nonempty");
                    // The comparison must agree under tab size 1 and 8,
                    // otherwise the mix of tabs and spaces is ambiguous.
                    let cmp8 = w8.cmp(&top8);
                    let cmp1 = w1.cmp(&top1);
                    if cmp8 != cmp1 {
                        return Err(PyFailure::Indentation(
                            "inconsistent use of tabs and spaces".to_string(),
                            at,
                        ));
                    }
                    match cmp8 {
                        core::cmp::Ordering::Equal => {}
                        core::cmp::Ordering::Greater => {
                            self.indents.push((w8, w1));
                            self.push(TokKind::Indent, at);
                        }
                        core::cmp::Ordering::Less => {
                            while self.indents.len() > 1 {
                                let (t8, _) = *self.indents.last().expect("nonempty");
                                if t8 > w8 {
                                    self.indents.pop();
                                    self.push(TokKind::Dedent, at);
                                } else {
                                    break;
                                }
                            }
                            let (t8, t1) = *self.indents.last().expect("nonempty");
                            if t8 != w8 || t1 != w1 {
                                return Err(PyFailure::Indentation(
                                    "dedent does not match any outer level".to_string(),
                                    at,
                                ));
                            }
                        }
                    }
                    return Ok(());
                }
            }
        }
    }

    /// Tokenizes one logical line (through implicit/explicit joins) and the
    /// trailing NEWLINE.
    fn logical_line(&mut self) -> Result<(), PyFailure> {
        let mut emitted = false;
        loop {
            let Some(c) = self.peek() else {
                if emitted {
                    let at = self.here();
                    self.push(TokKind::Newline, at);
                }
                return Ok(());
            };
            let at = self.here();
            match c {
                ' ' | '\t' | '\r' | '\u{c}' => {
                    self.bump();
                }
                '\n' => {
                    self.bump();
                    if self.brackets.is_empty() {
                        if emitted {
                            self.push(TokKind::Newline, at);
                        }
                        return Ok(());
                    }
                }
                '#' => {
                    while let Some(c) = self.peek() {
                        if c == '\n' {
                            break;
                        }
                        self.bump();
                    }
                }
                '\\' => {
                    if self.peek_at(1) == Some('\n') || self.peek_at(1).is_none() {
                        self.bump();
                        self.bump();
                    } else if self.peek_at(1) == Some('\r') && self.peek_at(2) == Some('\n') {
                        self.bump();
                        self.bump();
                        self.bump();
                    } else {
                        return Err(PyFailure::Tokenize(
                            "unexpected character after line continuation".to_string(),
                            at,
                        ));
                    }
                }
                '\'' | '"' => {
                    self.string(at, false)?;
                    emitted = true;
                }
                c if c.is_ascii_digit() => {
                    self.number(at)?;
                    emitted = true;
                }
                '.' if self.peek_at(1).is_some_and(|d| d.is_ascii_digit()) => {
                    self.number(at)?;
                    emitted = true;
                }
                c if c == '_' || c.is_alphabetic() => {
                    self.name_or_string(at)?;
                    emitted = true;
                }
                '(' | '[' | '{' => {
                    self.bump();
                    self.brackets.push((c, at));
                    let op = match c {
                        '(' => "(",
                        '[' => "[",
                        _ => "{",
                    };
                    self.push(TokKind::Op(op), at);
                    emitted = true;
                }
                ')' | ']' | '}' => {
                    self.bump();
                    let expected = match c {
                        ')' => '(',
                        ']' => '[',
                        _ => '{',
                    };
                    match self.brackets.pop() {
                        Some((open, _)) if open == expected => {}
                        Some((open, _)) => {
                            return Err(PyFailure::Unbalanced(
                                alloc::format!("`{c}` closes `{open}`"),
                                at,
                            ))
                        }
                        None => {
                            return Err(PyFailure::Unbalanced(
                                alloc::format!("unmatched `{c}`"),
                                at,
                            ))
                        }
                    }
                    let op = match c {
                        ')' => ")",
                        ']' => "]",
                        _ => "}",
                    };
                    self.push(TokKind::Op(op), at);
                    emitted = true;
                }
                _ => {
                    if let Some(op) = self.operator() {
                        self.push(TokKind::Op(op), at);
                        emitted = true;
                    } else {
                        return Err(PyFailure::Tokenize(
                            alloc::format!("invalid character `{c}`"),
                            at,
                        ));
                    }
                }
            }
        }
    }

    fn operator(&mut self) -> Option<&'static str> {
        for op in OPERATORS {
            if op.chars().count() <= self.chars.len() - self.pos
                && op
                    .chars()
                    .enumerate()
                    .all(|(i, oc)| self.peek_at(i) == Some(oc))
            {
                for _ in 0..op.chars().count() {
                    self.bump();
                }
                return Some(op);
            }
        }
        // "]" "}" never reach here; they go through the bracket arm.
        None
    }

    fn name_or_string(&mut self, at: Location) -> Result<(), PyFailure> {
        let mut name = String::new();
        while let Some(c) = self.peek() {
            if c == '_' || c.is_alphanumeric() {
                name.push(c);
                self.bump();
            } else {
                break;
            }
        }
        // String prefix? r/b/f/u combinations up to two characters.
        let is_prefix = name.len() <= 2
            && !name.is_empty()
            && name
                .chars()
                .all(|c| matches!(c, 'r' | 'R' | 'b' | 'B' | 'f' | 'F' | 'u' | 'U'));
        if is_prefix && matches!(self.peek(), Some('\'') | Some('"')) {
            let fstring = name.chars().any(|c| matches!(c, 'f' | 'F'));
            return self.string(at, fstring);
        }
        self.push(TokKind::Name(name), at);
        Ok(())
    }

    fn string(&mut self, at: Location, fstring: bool) -> Result<(), PyFailure> {
        let quote = self.bump().expect("quote present");
        let triple = self.peek() == Some(quote) && self.peek_at(1) == Some(quote);
        let mut body = String::new();
        if triple {
            self.bump();
            self.bump();
            loop {
                match self.peek() {
                    None => {
                        return Err(PyFailure::Tokenize(
                            "unterminated triple-quoted string".to_string(),
                            at,
                        ))
                    }
                    Some('\\') => {
                        body.push(self.bump().expect("char"));
                        if let Some(c) = self.bump() {
                            body.push(c);
                        }
                    }
                    Some(c) if c == quote => {
                        if self.peek_at(1) == Some(quote) && self.peek_at(2) == Some(quote) {
                            self.bump();
                            self.bump();
                            self.bump();
                            break;
                        }
                        body.push(self.bump().expect("char"));
                    }
                    Some(_) => {
                        body.push(self.bump().expect("char"));
                    }
                }
            }
        } else if self.peek() == Some(quote) {
            // Empty string: "" or ''.
            self.bump();
        } else {
            loop {
                match self.peek() {
                    None | Some('\n') => {
                        return Err(PyFailure::Tokenize(
                            "unterminated string literal".to_string(),
                            at,
                        ))
                    }
                    Some('\\') => {
                        // Backslash consumes the next character even in raw
                        // strings, matching how the reference tokenizer
                        // decides where a literal ends.
                        body.push(self.bump().expect("char"));
                        if let Some(c) = self.bump() {
                            body.push(c);
                        }
                    }
                    Some(c) if c == quote => {
                        self.bump();
                        break;
                    }
                    Some(_) => {
                        body.push(self.bump().expect("char"));
                    }
                }
            }
        }
        // The interior expressions of an f-string stay opaque, but the
        // replacement-field braces must balance ({{ and }} escape).
        if fstring && !fstring_braces_balance(&body) {
            return Err(PyFailure::Tokenize(
                "unbalanced braces in f-string".to_string(),
                at,
            ));
        }
        self.push(TokKind::Str, at);
        Ok(())
    }

    fn number(&mut self, at: Location) -> Result<(), PyFailure> {
        let mut text = String::new();
        let mut prev = ' ';
        while let Some(c) = self.peek() {
            let take = c.is_ascii_alphanumeric()
                || c == '_'
                || c == '.'
                || ((c == '+' || c == '-') && matches!(prev, 'e' | 'E') && is_exponent_context(&text));
            if !take {
                break;
            }
            text.push(c);
            prev = c;
            self.bump();
        }
        if validate_number(&text) {
            self.push(TokKind::Number, at);
            Ok(())
        } else {
            Err(PyFailure::Tokenize(
                alloc::format!("invalid numeric literal `{text}`"),
                at,
            ))
        }
    }
}

fn fstring_braces_balance(body: &str) -> bool {
    let chars: Vec<char> = body.chars().collect();
    let mut depth = 0i64;
    let mut i = 0usize;
    while i < chars.len() {
        match chars[i] {
            '{' if chars.get(i + 1) == Some(&'{') && depth == 0 => i += 2,
            '{' => {
                depth += 1;
                i += 1;
            }
            '}' if chars.get(i + 1) == Some(&'}') && depth == 0 => i += 2,
            '}' => {
                depth -= 1;
                if depth < 0 {
                    return false;
                }
                i += 1;
            }
            _ => i += 1,
        }
    }
    depth == 0
}

fn is_exponent_context(text: &str) -> bool {
    // The 'e' must belong to a decimal literal, not a hex one.
    !(text.starts_with("0x") || text.starts_with("0X"))
}

fn validate_number(text: &str) -> bool {
    let t = text.trim_end_matches(['j', 'J']);
    let imaginary = t.len() != text.len();
    if t.is_empty() || text.len() - t.len() > 1 {
        return false;
    }
    let lower: String = t.chars().flat_map(|c| c.to_lowercase()).collect();
    let digits_with = |s: &str, pred: fn(char) -> bool| -> bool {
        !s.is_empty()
            && s.chars().all(|c| pred(c) || c == '_')
            && s.chars().any(pred)
            && !s.starts_with('_')
            && !s.ends_with('_')
            && !s.contains("__")
    };
    if let Some(rest) = lower.strip_prefix("0x") {
        return digits_with(rest, |c| c.is_ascii_hexdigit());
    }
    if let Some(rest) = lower.strip_prefix("0o") {
        return digits_with(rest, |c| ('0'..='7').contains(&c));
    }
    if let Some(rest) = lower.strip_prefix("0b") {
        return digits_with(rest, |c| c == '0' || c == '1');
    }
    // Decimal / float / exponent form.
    let (mantissa, exponent) = match lower.split_once('e') {
        Some((m, e)) => (m, Some(e)),
        None => (lower.as_str(), None),
    };
    let mantissa_ok = {
        let parts: Vec<&str> = mantissa.split('.').collect();
        match parts.as_slice() {
            [int] => digits_with(int, |c| c.is_ascii_digit()),
            [int, frac] => {
                let int_ok = int.is_empty() || digits_with(int, |c| c.is_ascii_digit());
                let frac_ok = frac.is_empty() || digits_with(frac, |c| c.is_ascii_digit());
                (int_ok && frac_ok) && !(int.is_empty() && frac.is_empty())
            }
            _ => false,
        }
    };
    if !mantissa_ok {
        return false;
    }
    // Plain integers may not carry leading zeros; floats, imaginaries, and
    // zero itself may.
    if exponent.is_none()
        && !imaginary
        && !mantissa.contains('.')
        && mantissa.starts_with('0')
        && mantissa.chars().any(|c| ('1'..='9').contains(&c))
    {
        return false;
    }
    match exponent {
        None => true,
        Some(e) => {
            let e = e.strip_prefix(['+', '-']).unwrap_or(e);
            digits_with(e, |c| c.is_ascii_digit())
        }
    }
}

// ---------------------------------------------------------------------------
// Statement checker
// ---------------------------------------------------------------------------

/// What an expression can be used for on the left of an assignment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ExprShape {
    Name,
    AttributeOrSubscript,
    /// Tuple or list display whose elements are all assignable.
    TargetGroup,
    Starred,
    Other,
}

impl ExprShape {
    fn assignable(self) -> bool {
        !matches!(self, ExprShape::Other)
    }

    fn augmentable(self) -> bool {
        matches!(self, ExprShape::Name | ExprShape::AttributeOrSubscript)
    }
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    in_function: usize,
    in_loop: usize,
}

type ParseResult<T> = Result<T, PyFailure>;

impl Parser {
    fn current(&self) -> &Token {
        &self.tokens[self.pos.min(self.tokens.len() - 1)]
    }

    fn kind(&self) -> &TokKind {
        &self.current().kind
    }

    fn at(&self) -> Location {
        Location {
            line: self.current().line,
            col: self.current().col,
        }
    }

    fn fail<T>(&self, message: impl Into<String>) -> ParseResult<T> {
        Err(PyFailure::Grammar(message.into(), self.at()))
    }

    fn advance(&mut self) {
        if self.pos < self.tokens.len() - 1 {
            self.pos += 1;
        }
    }

    fn is_op(&self, op: &str) -> bool {
        matches!(self.kind(), TokKind::Op(o) if *o == op)
    }

    fn eat_op(&mut self, op: &str) -> bool {
        if self.is_op(op) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn expect_op(&mut self, op: &str) -> ParseResult<()> {
        if self.eat_op(op) {
            Ok(())
        } else {
            self.fail(alloc::format!("expected `{op}`"))
        }
    }

    fn name_is(&self, word: &str) -> bool {
        matches!(self.kind(), TokKind::Name(n) if n == word)
    }

    fn eat_name(&mut self, word: &str) -> bool {
        if self.name_is(word) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn expect_name_token(&mut self) -> ParseResult<()> {
        match self.kind() {
            TokKind::Name(n) if !KEYWORDS.contains(&n.as_str()) => {
                self.advance();
                Ok(())
            }
            _ => self.fail("expected identifier"),
        }
    }

    fn expect_newline(&mut self) -> ParseResult<()> {
        match self.kind() {
            TokKind::Newline => {
                self.advance();
                Ok(())
            }
            TokKind::EndMarker => Ok(()),
            _ => self.fail("expected end of statement"),
        }
    }

    fn module(&mut self) -> ParseResult<()> {
        while !matches!(self.kind(), TokKind::EndMarker) {
            self.statement()?;
        }
        Ok(())
    }

    fn statement(&mut self) -> ParseResult<()> {
        match self.kind().clone() {
            TokKind::Name(n) => match n.as_str() {
                "if" => self.if_stmt(),
                "while" => self.while_stmt(),
                "for" => self.for_stmt(),
                "def" => self.def_stmt(),
                "class" => self.class_stmt(),
                "try" => self.try_stmt(),
                "with" => self.with_stmt(),
                "async" => self.async_stmt(),
                _ => self.simple_line(),
            },
            TokKind::Op("@") => self.decorated(),
            TokKind::Indent => Err(PyFailure::Indentation(
                "unexpected indent".to_string(),
                self.at(),
            )),
            _ => self.simple_line(),
        }
    }

    fn simple_line(&mut self) -> ParseResult<()> {
        self.small_stmt()?;
        while self.eat_op(";") {
            if matches!(self.kind(), TokKind::Newline | TokKind::EndMarker) {
                break;
            }
            self.small_stmt()?;
        }
        self.expect_newline()
    }

    fn small_stmt(&mut self) -> ParseResult<()> {
        if let TokKind::Name(n) = self.kind().clone() {
            match n.as_str() {
                "pass" => {
                    self.advance();
                    return Ok(());
                }
                "break" => {
                    if self.in_loop == 0 {
                        return self.fail("`break` outside loop");
                    }
                    self.advance();
                    return Ok(());
                }
                "continue" => {
                    if self.in_loop == 0 {
                        return self.fail("`continue` outside loop");
                    }
                    self.advance();
                    return Ok(());
                }
                "return" => {
                    if self.in_function == 0 {
                        return self.fail("`return` outside function");
                    }
                    self.advance();
                    if !matches!(self.kind(), TokKind::Newline | TokKind::EndMarker)
                        && !self.is_op(";")
                    {
                        self.testlist()?;
                    }
                    return Ok(());
                }
                "raise" => {
                    self.advance();
                    if !matches!(self.kind(), TokKind::Newline | TokKind::EndMarker)
                        && !self.is_op(";")
                    {
                        self.expr()?;
                        if self.eat_name("from") {
                            self.expr()?;
                        }
                    }
                    return Ok(());
                }
                "import" => return self.import_stmt(),
                "from" => return self.from_import_stmt(),
                "global" | "nonlocal" => {
                    if n == "nonlocal" && self.in_function == 0 {
                        return self.fail("`nonlocal` outside function");
                    }
                    self.advance();
                    self.expect_name_token()?;
                    while self.eat_op(",") {
                        self.expect_name_token()?;
                    }
                    return Ok(());
                }
                "del" => {
                    self.advance();
                    let shape = self.testlist()?;
                    if !shape.assignable() {
                        return self.fail("cannot delete this expression");
                    }
                    return Ok(());
                }
                "assert" => {
                    self.advance();
                    self.expr()?;
                    if self.eat_op(",") {
                        self.expr()?;
                    }
                    return Ok(());
                }
                "yield" => {
                    self.yield_expr()?;
                    return Ok(());
                }
                _ => {}
            }
        }
        self.expr_stmt()
    }

    fn expr_stmt(&mut self) -> ParseResult<()> {
        let first = self.testlist()?;

        // Annotated assignment: `target: type [= value]`.
        if self.eat_op(":") {
            if !matches!(first, ExprShape::Name | ExprShape::AttributeOrSubscript) {
                return self.fail("illegal annotation target");
            }
            self.expr()?;
            if self.eat_op("=") {
                if self.name_is("yield") {
                    self.yield_expr()?;
                } else {
                    self.testlist()?;
                }
            }
            return Ok(());
        }

        // Augmented assignment.
        const AUG: [&str; 12] = [
            "+=", "-=", "*=", "/=", "//=", "%=", "@=", "&=", "|=", "^=", ">>=", "<<=",
        ];
        for op in AUG {
            if self.is_op(op) {
                if !first.augmentable() {
                    return self.fail(alloc::format!("illegal target for `{op}`"));
                }
                self.advance();
                if self.name_is("yield") {
                    self.yield_expr()?;
                } else {
                    self.testlist()?;
                }
                return Ok(());
            }
        }

        // Chained plain assignment.
        let mut last = first;
        while self.is_op("=") {
            if !last.assignable() {
                return self.fail("cannot assign to this expression");
            }
            self.advance();
            if self.name_is("yield") {
                self.yield_expr()?;
                return Ok(());
            }
            last = self.testlist()?;
        }
        Ok(())
    }

    fn import_stmt(&mut self) -> ParseResult<()> {
        self.advance(); // import
        loop {
            self.dotted_name()?;
            if self.eat_name("as") {
                self.expect_name_token()?;
            }
            if !self.eat_op(",") {
                break;
            }
        }
        Ok(())
    }

    fn from_import_stmt(&mut self) -> ParseResult<()> {
        self.advance(); // from
        let mut leading_dots = false;
        while self.eat_op(".") || self.eat_op("...") {
            leading_dots = true;
        }
        if !leading_dots || matches!(self.kind(), TokKind::Name(n) if n != "import") {
            self.dotted_name()?;
        }
        if !self.eat_name("import") {
            return self.fail("expected `import`");
        }
        if self.eat_op("*") {
            return Ok(());
        }
        let parenthesized = self.eat_op("(");
        loop {
            self.expect_name_token()?;
            if self.eat_name("as") {
                self.expect_name_token()?;
            }
            if !self.eat_op(",") {
                break;
            }
            if parenthesized && self.is_op(")") {
                break;
            }
        }
        if parenthesized {
            self.expect_op(")")?;
        }
        Ok(())
    }

    fn dotted_name(&mut self) -> ParseResult<()> {
        self.expect_name_token()?;
        while self.eat_op(".") {
            self.expect_name_token()?;
        }
        Ok(())
    }

    fn if_stmt(&mut self) -> ParseResult<()> {
        self.advance();
        self.expr()?;
        self.suite(self.in_function, self.in_loop)?;
        loop {
            if self.eat_name("elif") {
                self.expr()?;
                self.suite(self.in_function, self.in_loop)?;
            } else if self.eat_name("else") {
                self.suite(self.in_function, self.in_loop)?;
                break;
            } else {
                break;
            }
        }
        Ok(())
    }

    fn while_stmt(&mut self) -> ParseResult<()> {
        self.advance();
        self.expr()?;
        self.suite(self.in_function, self.in_loop + 1)?;
        if self.eat_name("else") {
            self.suite(self.in_function, self.in_loop)?;
        }
        Ok(())
    }

    fn for_stmt(&mut self) -> ParseResult<()> {
        self.advance();
        // Targets parse at primary level so the `in` stays unconsumed.
        let target = self.target_list_no_in()?;
        if !target.assignable() {
            return self.fail("illegal `for` target");
        }
        if !self.eat_name("in") {
            return self.fail("expected `in`");
        }
        self.testlist()?;
        self.suite(self.in_function, self.in_loop + 1)?;
        if self.eat_name("else") {
            self.suite(self.in_function, self.in_loop)?;
        }
        Ok(())
    }

    fn def_stmt(&mut self) -> ParseResult<()> {
        self.advance();
        self.expect_name_token()?;
        self.expect_op("(")?;
        self.parameters()?;
        self.expect_op(")")?;
        if self.eat_op("->") {
            self.expr()?;
        }
        // Function bodies reset the loop context.
        self.suite(self.in_function + 1, 0)
    }

    fn parameters(&mut self) -> ParseResult<()> {
        let mut saw_kwargs = false;
        loop {
            if self.is_op(")") {
                return Ok(());
            }
            if saw_kwargs {
                return self.fail("parameter after **kwargs");
            }
            if self.eat_op("*") {
                // Bare `*`, or `*args` with optional annotation.
                if !self.is_op(",") && !self.is_op(")") {
                    self.expect_name_token()?;
                    if self.eat_op(":") {
                        self.expr()?;
                    }
                }
            } else if self.eat_op("**") {
                saw_kwargs = true;
                self.expect_name_token()?;
                if self.eat_op(":") {
                    self.expr()?;
                }
            } else if self.eat_op("/") {
                // Positional-only marker.
            } else {
                self.expect_name_token()?;
                if self.eat_op(":") {
                    self.expr()?;
                }
                if self.eat_op("=") {
                    self.expr()?;
                }
            }
            if !self.eat_op(",") {
                return Ok(());
            }
        }
    }

    fn class_stmt(&mut self) -> ParseResult<()> {
        self.advance();
        self.expect_name_token()?;
        if self.eat_op("(") {
            if !self.is_op(")") {
                self.call_args()?;
            }
            self.expect_op(")")?;
        }
        // Class bodies reset both function and loop context.
        self.suite(0, 0)
    }

    fn try_stmt(&mut self) -> ParseResult<()> {
        self.advance();
        self.suite(self.in_function, self.in_loop)?;
        let mut any_handler = false;
        while self.eat_name("except") {
            any_handler = true;
            if !self.is_op(":") {
                self.expr()?;
                if self.eat_name("as") {
                    self.expect_name_token()?;
                }
            }
            self.suite(self.in_function, self.in_loop)?;
        }
        if any_handler && self.eat_name("else") {
            self.suite(self.in_function, self.in_loop)?;
        }
        if self.eat_name("finally") {
            self.suite(self.in_function, self.in_loop)?;
        } else if !any_handler {
            return self.fail("`try` without `except` or `finally`");
        }
        Ok(())
    }

    fn with_stmt(&mut self) -> ParseResult<()> {
        self.advance();
        loop {
            self.expr()?;
            if self.eat_name("as") {
                let target = self.primary_target()?;
                if !target.assignable() {
                    return self.fail("illegal `with` target");
                }
            }
            if !self.eat_op(",") {
                break;
            }
        }
        self.suite(self.in_function, self.in_loop)
    }

    fn async_stmt(&mut self) -> ParseResult<()> {
        self.advance(); // async
        if self.name_is("def") {
            self.def_stmt()
        } else if self.name_is("for") {
            self.for_stmt()
        } else if self.name_is("with") {
            self.with_stmt()
        } else {
            self.fail("expected `def`, `for`, or `with` after `async`")
        }
    }

    fn decorated(&mut self) -> ParseResult<()> {
        while self.eat_op("@") {
            self.expr()?;
            self.expect_newline()?;
        }
        if self.name_is("def") {
            self.def_stmt()
        } else if self.name_is("class") {
            self.class_stmt()
        } else if self.name_is("async") {
            self.async_stmt()
        } else {
            self.fail("decorator must precede `def` or `class`")
        }
    }

    fn suite(&mut self, in_function: usize, in_loop: usize) -> ParseResult<()> {
        self.expect_op(":")?;
        let saved = (self.in_function, self.in_loop);
        self.in_function = in_function;
        self.in_loop = in_loop;
        let result = (|| {
            if matches!(self.kind(), TokKind::Newline) {
                self.advance();
                if !matches!(self.kind(), TokKind::Indent) {
                    return self.fail("expected an indented block");
                }
                self.advance();
                while !matches!(self.kind(), TokKind::Dedent | TokKind::EndMarker) {
                    self.statement()?;
                }
                if matches!(self.kind(), TokKind::Dedent) {
                    self.advance();
                }
                Ok(())
            } else {
                // Inline suite on the same line.
                self.small_stmt()?;
                while self.eat_op(";") {
                    if matches!(self.kind(), TokKind::Newline | TokKind::EndMarker) {
                        break;
                    }
                    self.small_stmt()?;
                }
                self.expect_newline()
            }
        })();
        self.in_function = saved.0;
        self.in_loop = saved.1;
        result
    }

    // -- expressions --------------------------------------------------------

    /// Comma-separated expressions (an unparenthesized tuple when more than
    /// one). Allows starred elements, as in `a, *rest = ...`.
    fn testlist(&mut self) -> ParseResult<ExprShape> {
        let first = self.star_or_expr()?;
        if !self.is_op(",") {
            // A starred expression is only legal as part of a tuple.
            if matches!(first, ExprShape::Starred) {
                return self.fail("starred expression outside tuple context");
            }
            return Ok(first);
        }
        let mut all_assignable = first.assignable();
        while self.eat_op(",") {
            if self.expression_over() {
                break; // trailing comma
            }
            let shape = self.star_or_expr()?;
            all_assignable &= shape.assignable();
        }
        Ok(if all_assignable {
            ExprShape::TargetGroup
        } else {
            ExprShape::Other
        })
    }

    fn expression_over(&self) -> bool {
        matches!(self.kind(), TokKind::Newline | TokKind::EndMarker)
            || self.is_op("=")
            || self.is_op(";")
            || self.is_op(")")
            || self.is_op("]")
            || self.is_op("}")
            || self.is_op(":")
            || self.name_is("in")
    }

    fn star_or_expr(&mut self) -> ParseResult<ExprShape> {
        if self.eat_op("*") {
            let inner = self.expr()?;
            return Ok(if inner.assignable() {
                ExprShape::Starred
            } else {
                ExprShape::Other
            });
        }
        self.expr()
    }

    fn yield_expr(&mut self) -> ParseResult<ExprShape> {
        if self.in_function == 0 {
            return self.fail("`yield` outside function");
        }
        self.advance(); // yield
        if self.eat_name("from") {
            self.expr()?;
        } else if !matches!(self.kind(), TokKind::Newline | TokKind::EndMarker)
            && !self.is_op(")")
            && !self.is_op("]")
            && !self.is_op("}")
            && !self.is_op(";")
        {
            self.testlist()?;
        }
        Ok(ExprShape::Other)
    }

    /// Full conditional expression, including `lambda` and walrus.
    fn expr(&mut self) -> ParseResult<ExprShape> {
        if self.name_is("lambda") {
            self.advance();
            if !self.is_op(":") {
                self.lambda_params()?;
            }
            self.expect_op(":")?;
            self.expr()?;
            return Ok(ExprShape::Other);
        }
        let shape = self.or_test()?;
        if self.eat_op(":=") {
            if shape != ExprShape::Name {
                return self.fail("illegal walrus target");
            }
            self.expr()?;
            return Ok(ExprShape::Other);
        }
        if self.eat_name("if") {
            self.or_test()?;
            if !self.eat_name("else") {
                return self.fail("conditional expression missing `else`");
            }
            self.expr()?;
            return Ok(ExprShape::Other);
        }
        Ok(shape)
    }

    fn lambda_params(&mut self) -> ParseResult<()> {
        let mut saw_kwargs = false;
        loop {
            if saw_kwargs {
                return self.fail("parameter after **kwargs");
            }
            if self.eat_op("*") {
                if !self.is_op(",") && !self.is_op(":") {
                    self.expect_name_token()?;
                }
            } else if self.eat_op("**") {
                saw_kwargs = true;
                self.expect_name_token()?;
            } else {
                self.expect_name_token()?;
                if self.eat_op("=") {
                    self.expr()?;
                }
            }
            if !self.eat_op(",") {
                return Ok(());
            }
        }
    }

    fn or_test(&mut self) -> ParseResult<ExprShape> {
        let mut shape = self.and_test()?;
        while self.eat_name("or") {
            self.and_test()?;
            shape = ExprShape::Other;
        }
        Ok(shape)
    }

    fn and_test(&mut self) -> ParseResult<ExprShape> {
        let mut shape = self.not_test()?;
        while self.eat_name("and") {
            self.not_test()?;
            shape = ExprShape::Other;
        }
        Ok(shape)
    }

    fn not_test(&mut self) -> ParseResult<ExprShape> {
        if self.eat_name("not") {
            self.not_test()?;
            return Ok(ExprShape::Other);
        }
        self.comparison()
    }

    fn comparison(&mut self) -> ParseResult<ExprShape> {
        let mut shape = self.bit_or()?;
        loop {
            let compared = if self.eat_op("<")
                || self.eat_op(">")
                || self.eat_op("==")
                || self.eat_op("!=")
                || self.eat_op("<=")
                || self.eat_op(">=")
            {
                true
            } else if self.name_is("in") {
                self.advance();
                true
            } else if self.name_is("not") {
                self.advance();
                if !self.eat_name("in") {
                    return self.fail("expected `in` after `not`");
                }
                true
            } else if self.name_is("is") {
                self.advance();
                self.eat_name("not");
                true
            } else {
                false
            };
            if !compared {
                return Ok(shape);
            }
            self.bit_or()?;
            shape = ExprShape::Other;
        }
    }

    fn bit_or(&mut self) -> ParseResult<ExprShape> {
        let mut shape = self.bit_xor()?;
        while self.eat_op("|") {
            self.bit_xor()?;
            shape = ExprShape::Other;
        }
        Ok(shape)
    }

    fn bit_xor(&mut self) -> ParseResult<ExprShape> {
        let mut shape = self.bit_and()?;
        while self.eat_op("^") {
            self.bit_and()?;
            shape = ExprShape::Other;
        }
        Ok(shape)
    }

    fn bit_and(&mut self) -> ParseResult<ExprShape> {
        let mut shape = self.shift()?;
        while self.eat_op("&") {
            self.shift()?;
            shape = ExprShape::Other;
        }
        Ok(shape)
    }

    fn shift(&mut self) -> ParseResult<ExprShape> {
        let mut shape = self.arith()?;
        while self.eat_op("<<") || self.eat_op(">>") {
            self.arith()?;
            shape = ExprShape::Other;
        }
        Ok(shape)
    }

    fn arith(&mut self) -> ParseResult<ExprShape> {
        let mut shape = self.term()?;
        while self.eat_op("+") || self.eat_op("-") {
            self.term()?;
            shape = ExprShape::Other;
        }
        Ok(shape)
    }

    fn term(&mut self) -> ParseResult<ExprShape> {
        let mut shape = self.factor()?;
        while self.eat_op("*")
            || self.eat_op("/")
            || self.eat_op("//")
            || self.eat_op("%")
            || self.eat_op("@")
        {
            self.factor()?;
            shape = ExprShape::Other;
        }
        Ok(shape)
    }

    fn factor(&mut self) -> ParseResult<ExprShape> {
        if self.eat_op("+") || self.eat_op("-") || self.eat_op("~") {
            self.factor()?;
            return Ok(ExprShape::Other);
        }
        self.power()
    }

    fn power(&mut self) -> ParseResult<ExprShape> {
        let shape = self.await_primary()?;
        if self.eat_op("**") {
            self.factor()?;
            return Ok(ExprShape::Other);
        }
        Ok(shape)
    }

    fn await_primary(&mut self) -> ParseResult<ExprShape> {
        if self.eat_name("await") {
            self.primary()?;
            return Ok(ExprShape::Other);
        }
        self.primary()
    }

    /// Target usable after `as`: a name with optional trailers.
    fn primary_target(&mut self) -> ParseResult<ExprShape> {
        self.primary()
    }

    fn primary(&mut self) -> ParseResult<ExprShape> {
        let mut shape = self.atom()?;
        loop {
            if self.eat_op("(") {
                if !self.is_op(")") {
                    self.call_args()?;
                }
                self.expect_op(")")?;
                shape = ExprShape::Other;
            } else if self.eat_op("[") {
                self.subscript()?;
                self.expect_op("]")?;
                shape = ExprShape::AttributeOrSubscript;
            } else if self.eat_op(".") {
                self.expect_name_token()?;
                shape = ExprShape::AttributeOrSubscript;
            } else {
                return Ok(shape);
            }
        }
    }

    fn call_args(&mut self) -> ParseResult<()> {
        loop {
            if self.is_op(")") {
                return Ok(());
            }
            if self.eat_op("*") || self.eat_op("**") {
                self.expr()?;
            } else {
                let before = self.pos;
                let shape = self.expr()?;
                if self.is_op("=") && shape == ExprShape::Name && self.pos == before + 1 {
                    // Keyword argument.
                    self.advance();
                    self.expr()?;
                } else if self.name_is("for") || self.name_is("async") {
                    // Bare generator expression argument.
                    self.comp_clauses()?;
                    return Ok(());
                }
            }
            if !self.eat_op(",") {
                return Ok(());
            }
        }
    }

    fn subscript(&mut self) -> ParseResult<()> {
        loop {
            // Slice forms: [a:b:c], [:], [::], [a:], [:b] plus plain indexes
            // and tuple subscripts.
            if !self.is_op(":") && !self.is_op("]") && !self.is_op(",") {
                self.star_or_expr()?;
            }
            if self.eat_op(":") {
                if !self.is_op(":") && !self.is_op("]") && !self.is_op(",") {
                    self.expr()?;
                }
                if self.eat_op(":") {
                    if !self.is_op("]") && !self.is_op(",") {
                        self.expr()?;
                    }
                }
            }
            if !self.eat_op(",") {
                return Ok(());
            }
            if self.is_op("]") {
                return Ok(()); // trailing comma
            }
        }
    }

    fn comp_clauses(&mut self) -> ParseResult<()> {
        loop {
            if self.eat_name("async") {
                if !self.eat_name("for") {
                    return self.fail("expected `for` after `async`");
                }
            } else if !self.eat_name("for") {
                return self.fail("expected `for` in comprehension");
            }
            let target = self.target_list_no_in()?;
            if !target.assignable() {
                return self.fail("illegal comprehension target");
            }
            if !self.eat_name("in") {
                return self.fail("expected `in`");
            }
            self.or_test()?;
            while self.eat_name("if") {
                self.or_test()?;
            }
            if !self.name_is("for") && !self.name_is("async") {
                return Ok(());
            }
        }
    }

    /// Comprehension targets: comma-separated, stopping before `in`.
    fn target_list_no_in(&mut self) -> ParseResult<ExprShape> {
        let first = self.star_or_target_atom()?;
        if !self.is_op(",") {
            if matches!(first, ExprShape::Starred) {
                return self.fail("starred target outside tuple context");
            }
            return Ok(first);
        }
        let mut all = first.assignable();
        while self.eat_op(",") {
            if self.name_is("in") {
                break;
            }
            let shape = self.star_or_target_atom()?;
            all &= shape.assignable();
        }
        Ok(if all {
            ExprShape::TargetGroup
        } else {
            ExprShape::Other
        })
    }

    fn star_or_target_atom(&mut self) -> ParseResult<ExprShape> {
        if self.eat_op("*") {
            let inner = self.primary()?;
            return Ok(if inner.assignable() {
                ExprShape::Starred
            } else {
                ExprShape::Other
            });
        }
        self.primary()
    }

    fn atom(&mut self) -> ParseResult<ExprShape> {
        match self.kind().clone() {
            TokKind::Number => {
                self.advance();
                Ok(ExprShape::Other)
            }
            TokKind::Str => {
                // Adjacent string literals concatenate.
                while matches!(self.kind(), TokKind::Str) {
                    self.advance();
                }
                Ok(ExprShape::Other)
            }
            TokKind::Name(name) => {
                match name.as_str() {
                    "True" | "False" | "None" => {
                        self.advance();
                        Ok(ExprShape::Other)
                    }
                    "yield" => self.yield_expr(),
                    "lambda" => self.expr(),
                    kw if KEYWORDS.contains(&kw) => {
                        self.fail(alloc::format!("unexpected keyword `{kw}`"))
                    }
                    _ => {
                        self.advance();
                        Ok(ExprShape::Name)
                    }
                }
            }
            TokKind::Op("(") => {
                self.advance();
                if self.eat_op(")") {
                    return Ok(ExprShape::TargetGroup); // empty tuple is a valid target
                }
                let first = if self.name_is("yield") {
                    self.yield_expr()?
                } else {
                    self.star_or_expr()?
                };
                if self.name_is("for") || self.name_is("async") {
                    self.comp_clauses()?;
                    self.expect_op(")")?;
                    return Ok(ExprShape::Other);
                }
                let mut all = first.assignable();
                let mut tuple = false;
                while self.eat_op(",") {
                    tuple = true;
                    if self.is_op(")") {
                        break;
                    }
                    let shape = self.star_or_expr()?;
                    all &= shape.assignable();
                }
                self.expect_op(")")?;
                Ok(if tuple {
                    if all {
                        ExprShape::TargetGroup
                    } else {
                        ExprShape::Other
                    }
                } else {
                    first // parenthesized single expression keeps its shape
                })
            }
            TokKind::Op("[") => {
                self.advance();
                if self.eat_op("]") {
                    return Ok(ExprShape::TargetGroup); // empty list is a valid target group
                }
                let first = self.star_or_expr()?;
                if self.name_is("for") || self.name_is("async") {
                    self.comp_clauses()?;
                    self.expect_op("]")?;
                    return Ok(ExprShape::Other);
                }
                let mut all = first.assignable();
                while self.eat_op(",") {
                    if self.is_op("]") {
                        break;
                    }
                    let shape = self.star_or_expr()?;
                    all &= shape.assignable();
                }
                self.expect_op("]")?;
                Ok(if all {
                    ExprShape::TargetGroup
                } else {
                    ExprShape::Other
                })
            }
            TokKind::Op("{") => {
                self.advance();
                if self.eat_op("}") {
                    return Ok(ExprShape::Other); // empty dict
                }
                // Dict: key: value / **expr. Set: expr. Either allows a
                // trailing comprehension.
                if self.eat_op("**") {
                    self.expr()?;
                } else {
                    self.star_or_expr()?;
                    if self.eat_op(":") {
                        self.expr()?;
                        if self.name_is("for") || self.name_is("async") {
                            self.comp_clauses()?;
                            self.expect_op("}")?;
                            return Ok(ExprShape::Other);
                        }
                        while self.eat_op(",") {
                            if self.is_op("}") {
                                break;
                            }
                            if self.eat_op("**") {
                                self.expr()?;
                            } else {
                                self.expr()?;
                                self.expect_op(":")?;
                                self.expr()?;
                            }
                        }
                        self.expect_op("}")?;
                        return Ok(ExprShape::Other);
                    }
                    if self.name_is("for") || self.name_is("async") {
                        self.comp_clauses()?;
                        self.expect_op("}")?;
                        return Ok(ExprShape::Other);
                    }
                }
                while self.eat_op(",") {
                    if self.is_op("}") {
                        break;
                    }
                    if self.eat_op("**") {
                        self.expr()?;
                    } else {
                        self.expr()?;
                        if self.eat_op(":") {
                            self.expr()?;
                        }
                    }
                }
                self.expect_op("}")?;
                Ok(ExprShape::Other)
            }
            TokKind::Op("...") => {
                self.advance();
                Ok(ExprShape::Other)
            }
            _ => self.fail("expected expression"),
        }
    }
}

/// Tokenizes and grammar-checks a Python module. `Ok` means the source
/// passes every structural check.
pub fn check_python(source: &str) -> Result<(), PyFailure> {
    let tokens = Tokenizer::new(source).run()?;
    // A module with no statements carries no executable structure.
    if tokens.len() == 1 {
        return Err(PyFailure::Grammar(
            "empty module".to_string(),
            Location { line: 1, col: 1 },
        ));
    }
    let mut parser = Parser {
        tokens,
        pos: 0,
        in_function: 0,
        in_loop: 0,
    };
    parser.module()
}
