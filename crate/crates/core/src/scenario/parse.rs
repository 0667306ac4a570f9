//! Tokenizer and recursive-descent parser for scenario files.
//!
//! Tokens are words, braces, and bracket blobs (`[...]`, brackets nesting);
//! `#` comments run to end of line. The simple declarations (`parties`,
//! `state`, `analyze`) are line-oriented; protocol blocks are delimited by
//! braces and may span lines freely. Every token carries its line and
//! column, so each error points at its source.

use num_complex::Complex64;

use super::{
    compile, Diagnostic, Directive, DirectiveDecl, InstrumentDecl, PartiesDecl, ProtocolDecl,
    ScenarioFile, StateCtor, StateDecl, TreeDecl,
};
use crate::locc::Answer;
use crate::measure::Axis;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum TokenKind {
    Word,
    OpenBrace,
    CloseBrace,
    /// A `[...]` group; the text is the content without the outer brackets.
    Blob,
}

#[derive(Debug, Clone)]
struct Token {
    kind: TokenKind,
    text: String,
    line: usize,
    col: usize,
}

impl Token {
    fn error(&self, message: impl Into<String>) -> Diagnostic {
        Diagnostic::new(self.line, self.col, message)
    }
}

fn tokenize(text: &str) -> Result<Vec<Token>, Diagnostic> {
    let mut tokens = Vec::new();
    let mut chars = text.chars().peekable();
    let mut line = 1usize;
    let mut col = 1usize;
    while let Some(&c) = chars.peek() {
        match c {
            '\n' => {
                chars.next();
                line += 1;
                col = 1;
            }
            _ if c.is_whitespace() => {
                chars.next();
                col += 1;
            }
            '#' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    chars.next();
                    col += 1;
                }
            }
            '{' | '}' => {
                let kind = if c == '{' {
                    TokenKind::OpenBrace
                } else {
                    TokenKind::CloseBrace
                };
                tokens.push(Token {
                    kind,
                    text: c.to_string(),
                    line,
                    col,
                });
                chars.next();
                col += 1;
            }
            '[' => {
                let (start_line, start_col) = (line, col);
                chars.next();
                col += 1;
                let mut depth = 1usize;
                let mut content = String::new();
                loop {
                    let Some(c) = chars.next() else {
                        return Err(Diagnostic::new(start_line, start_col, "unterminated `[`"));
                    };
                    match c {
                        '\n' => {
                            line += 1;
                            col = 1;
                            content.push(c);
                        }
                        '[' => {
                            depth += 1;
                            col += 1;
                            content.push(c);
                        }
                        ']' => {
                            depth -= 1;
                            col += 1;
                            if depth == 0 {
                                break;
                            }
                            content.push(c);
                        }
                        _ => {
                            col += 1;
                            content.push(c);
                        }
                    }
                }
                tokens.push(Token {
                    kind: TokenKind::Blob,
                    text: content,
                    line: start_line,
                    col: start_col,
                });
            }
            ']' => return Err(Diagnostic::new(line, col, "unexpected `]`")),
            _ => {
                let (start_line, start_col) = (line, col);
                let mut word = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_whitespace() || matches!(c, '{' | '}' | '[' | ']' | '#') {
                        break;
                    }
                    word.push(c);
                    chars.next();
                    col += 1;
                }
                tokens.push(Token {
                    kind: TokenKind::Word,
                    text: word,
                    line: start_line,
                    col: start_col,
                });
            }
        }
    }
    Ok(tokens)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let token = self.tokens.get(self.pos).cloned();
        if token.is_some() {
            self.pos += 1;
        }
        token
    }

    /// Diagnostic at end of input, anchored to the last token seen.
    fn eof(&self, message: impl Into<String>) -> Diagnostic {
        match self.tokens.last() {
            Some(t) => Diagnostic::new(t.line, t.col, message),
            None => Diagnostic::new(1, 1, message),
        }
    }

    fn expect_word(&mut self, what: &str) -> Result<Token, Diagnostic> {
        match self.next() {
            Some(t) if t.kind == TokenKind::Word => Ok(t),
            Some(t) => Err(t.error(format!("expected {what}, found `{}`", t.text))),
            None => Err(self.eof(format!("expected {what}, found end of input"))),
        }
    }

    fn expect_kind(&mut self, kind: TokenKind, what: &str) -> Result<Token, Diagnostic> {
        match self.next() {
            Some(t) if t.kind == kind => Ok(t),
            Some(t) => Err(t.error(format!("expected {what}, found `{}`", t.text))),
            None => Err(self.eof(format!("expected {what}, found end of input"))),
        }
    }

    /// Consumes word tokens on the given line, for the line-oriented
    /// declarations.
    fn same_line_words(&mut self, line: usize) -> Vec<Token> {
        let mut words = Vec::new();
        while let Some(t) = self.peek() {
            if t.kind == TokenKind::Word && t.line == line {
                words.push(self.next().expect("peeked"));
            } else {
                break;
            }
        }
        words
    }
}

fn parse_complex(text: &str, token: &Token) -> Result<Complex64, Diagnostic> {
    let Some((re, im)) = text.split_once(',') else {
        return Err(token.error(format!(
            "invalid complex literal `{text}` (expected `re,im`)"
        )));
    };
    let parse_part = |part: &str| -> Result<f64, Diagnostic> {
        let value: f64 = part
            .trim()
            .parse()
            .map_err(|_| token.error(format!("invalid number `{}`", part.trim())))?;
        if !value.is_finite() {
            return Err(token.error(format!("non-finite number `{}`", part.trim())));
        }
        Ok(value)
    };
    Ok(Complex64::new(parse_part(re)?, parse_part(im)?))
}

/// `re,im; re,im; ...`: the content of an amplitude blob.
fn parse_complex_list(text: &str, token: &Token) -> Result<Vec<Complex64>, Diagnostic> {
    text.split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|entry| parse_complex(entry, token))
        .collect()
}

/// Splits on `sep` at bracket depth zero.
fn split_top_level(text: &str, sep: char) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0usize;
    let mut start = 0usize;
    for (i, c) in text.char_indices() {
        match c {
            '[' => depth += 1,
            ']' => depth = depth.saturating_sub(1),
            c if c == sep && depth == 0 => {
                parts.push(&text[start..i]);
                start = i + c.len_utf8();
            }
            _ => {}
        }
    }
    parts.push(&text[start..]);
    parts
}

/// `[re,im; ...]; [re,im; ...]`: the content of a projectors blob.
fn parse_projector_list(text: &str, token: &Token) -> Result<Vec<Vec<Complex64>>, Diagnostic> {
    let mut vectors = Vec::new();
    for part in split_top_level(text, ';') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let Some(inner) = part.strip_prefix('[').and_then(|p| p.strip_suffix(']')) else {
            return Err(token.error(format!(
                "invalid projector vector `{part}` (expected `[re,im; ...]`)"
            )));
        };
        vectors.push(parse_complex_list(inner, token)?);
    }
    if vectors.is_empty() {
        return Err(token.error("projectors need at least one vector"));
    }
    Ok(vectors)
}

fn parse_parties(
    parser: &mut Parser,
    keyword: &Token,
    file: &mut ScenarioFile,
) -> Result<(), Diagnostic> {
    if file.parties.is_some() {
        return Err(keyword.error("duplicate `parties` declaration"));
    }
    let words = parser.same_line_words(keyword.line);
    if words.is_empty() {
        return Err(keyword.error("`parties` needs at least one dimension"));
    }
    let mut dims = Vec::with_capacity(words.len());
    for word in words {
        let dim: usize = word
            .text
            .parse()
            .map_err(|_| word.error(format!("invalid party dimension `{}`", word.text)))?;
        dims.push(dim);
    }
    file.parties = Some(PartiesDecl {
        dims,
        line: keyword.line,
    });
    Ok(())
}

fn parse_state(
    parser: &mut Parser,
    keyword: &Token,
    file: &mut ScenarioFile,
) -> Result<(), Diagnostic> {
    let name = parser.expect_word("a state name")?;
    let equals = parser.expect_word("`=`")?;
    if equals.text != "=" {
        return Err(equals.error(format!(
            "expected `=` after state name `{}`, found `{}`",
            name.text, equals.text
        )));
    }
    let ctor_token = parser.expect_word("a state constructor")?;
    let ctor = match ctor_token.text.as_str() {
        "bell:phi+" => StateCtor::BellPhiPlus,
        "bell:phi-" => StateCtor::BellPhiMinus,
        "bell:psi+" => StateCtor::BellPsiPlus,
        "bell:psi-" => StateCtor::BellPsiMinus,
        "psi4" => StateCtor::Psi4,
        "amps" => {
            let blob = parser.expect_kind(TokenKind::Blob, "`[...]` after `amps`")?;
            StateCtor::Amps(parse_complex_list(&blob.text, &blob)?)
        }
        text => {
            if let Some(index) = text.strip_prefix("basis:") {
                let index: usize = index
                    .parse()
                    .map_err(|_| ctor_token.error(format!("invalid basis index `{index}`")))?;
                StateCtor::Basis(index)
            } else {
                return Err(ctor_token.error(format!(
                    "unknown state constructor `{text}` (expected bell:phi+, bell:phi-, \
                     bell:psi+, bell:psi-, basis:<i>, psi4, or amps [...])"
                )));
            }
        }
    };
    file.states.push(StateDecl {
        name: name.text,
        ctor,
        line: keyword.line,
    });
    Ok(())
}

fn parse_answer(parser: &mut Parser) -> Result<TreeDecl, Diagnostic> {
    let token = parser.expect_word("an answer")?;
    let answer = match token.text.as_str() {
        "0" => Answer::Bit(0),
        "1" => Answer::Bit(1),
        "inconclusive" => Answer::Inconclusive,
        text => match text.strip_prefix("label:") {
            Some(label) if !label.is_empty() => Answer::Label(label.to_string()),
            _ => {
                return Err(token.error(format!(
                    "invalid answer `{text}` (expected 0, 1, inconclusive, or label:<name>)"
                )))
            }
        },
    };
    Ok(TreeDecl::Answer(answer))
}

fn parse_measure(parser: &mut Parser) -> Result<TreeDecl, Diagnostic> {
    let party_token = parser.expect_word("`party=<index>`")?;
    let Some(party_text) = party_token.text.strip_prefix("party=") else {
        return Err(party_token.error(format!(
            "expected `party=<index>`, found `{}`",
            party_token.text
        )));
    };
    let party: usize = party_text
        .parse()
        .map_err(|_| party_token.error(format!("invalid party index `{party_text}`")))?;

    let instrument_token = parser.expect_word("`instrument=...`")?;
    let Some(spec) = instrument_token.text.strip_prefix("instrument=") else {
        return Err(instrument_token.error(format!(
            "expected `instrument=...`, found `{}`",
            instrument_token.text
        )));
    };
    let instrument = match spec {
        "pauli:x" => InstrumentDecl::Pauli(Axis::X),
        "pauli:y" => InstrumentDecl::Pauli(Axis::Y),
        "pauli:z" => InstrumentDecl::Pauli(Axis::Z),
        "projectors:" => {
            let blob = parser.expect_kind(TokenKind::Blob, "`[...]` after `projectors:`")?;
            InstrumentDecl::Projectors(parse_projector_list(&blob.text, &blob)?)
        }
        other => {
            return Err(instrument_token.error(format!(
                "unknown instrument `{other}` (expected pauli:x, pauli:y, pauli:z, \
                 or projectors:[...])"
            )))
        }
    };

    parser.expect_kind(TokenKind::OpenBrace, "`{` opening the outcome list")?;
    let mut outcomes: Vec<(String, TreeDecl)> = Vec::new();
    loop {
        match parser.peek() {
            Some(t) if t.kind == TokenKind::CloseBrace => {
                parser.next();
                break;
            }
            _ => {}
        }
        let keyword = parser.expect_word("`outcome` or `}`")?;
        if keyword.text != "outcome" {
            return Err(keyword.error(format!(
                "expected `outcome` or `}}`, found `{}`",
                keyword.text
            )));
        }
        let label = parser.expect_word("an outcome label")?;
        if outcomes.iter().any(|(l, _)| l == &label.text) {
            return Err(label.error(format!("duplicate outcome `{}`", label.text)));
        }
        parser.expect_kind(TokenKind::OpenBrace, "`{` opening the outcome body")?;
        let sub = parse_tree(parser)?;
        parser.expect_kind(TokenKind::CloseBrace, "`}` closing the outcome body")?;
        outcomes.push((label.text, sub));
    }
    Ok(TreeDecl::Measure {
        party,
        instrument,
        outcomes,
    })
}

/// One block body: a single `measure` node or a single `answer` leaf.
fn parse_tree(parser: &mut Parser) -> Result<TreeDecl, Diagnostic> {
    let keyword = parser.expect_word("`measure` or `answer`")?;
    match keyword.text.as_str() {
        "answer" => parse_answer(parser),
        "measure" => parse_measure(parser),
        other => Err(keyword.error(format!("expected `measure` or `answer`, found `{other}`"))),
    }
}

fn parse_protocol(
    parser: &mut Parser,
    keyword: &Token,
    file: &mut ScenarioFile,
) -> Result<(), Diagnostic> {
    let name = parser.expect_word("a protocol name")?;
    parser.expect_kind(TokenKind::OpenBrace, "`{` opening the protocol body")?;
    let tree = parse_tree(parser)?;
    parser.expect_kind(TokenKind::CloseBrace, "`}` closing the protocol body")?;
    file.protocols.push(ProtocolDecl {
        name: name.text,
        tree,
        line: keyword.line,
    });
    Ok(())
}

/// Key=value arguments of an `analyze` line, with duplicate detection.
struct Args {
    entries: Vec<(String, String, Token)>,
}

impl Args {
    fn parse(tokens: Vec<Token>) -> Result<Args, Diagnostic> {
        let mut entries: Vec<(String, String, Token)> = Vec::new();
        for token in tokens {
            let Some((key, value)) = token.text.split_once('=') else {
                return Err(token.error(format!(
                    "expected `key=value` argument, found `{}`",
                    token.text
                )));
            };
            if entries.iter().any(|(k, _, _)| k == key) {
                return Err(token.error(format!("duplicate argument `{key}`")));
            }
            entries.push((key.to_string(), value.to_string(), token));
        }
        Ok(Args { entries })
    }

    fn take(&mut self, key: &str) -> Option<(String, Token)> {
        let index = self.entries.iter().position(|(k, _, _)| k == key)?;
        let (_, value, token) = self.entries.remove(index);
        Some((value, token))
    }

    fn require(&mut self, key: &str, keyword: &Token) -> Result<(String, Token), Diagnostic> {
        self.take(key)
            .ok_or_else(|| keyword.error(format!("missing `{key}=` argument")))
    }

    fn finish(self) -> Result<(), Diagnostic> {
        match self.entries.first() {
            Some((key, _, token)) => Err(token.error(format!("unexpected argument `{key}`"))),
            None => Ok(()),
        }
    }
}

fn parse_question(value: &str, token: &Token) -> Result<usize, Diagnostic> {
    let question: usize = value
        .parse()
        .map_err(|_| token.error(format!("invalid question number `{value}`")))?;
    if question == 0 {
        return Err(token.error("question numbers start at 1"));
    }
    Ok(question)
}

fn parse_analyze(
    parser: &mut Parser,
    keyword: &Token,
    file: &mut ScenarioFile,
) -> Result<(), Diagnostic> {
    let kind = parser.expect_word("an analysis kind")?;
    let mut args = Args::parse(parser.same_line_words(keyword.line))?;
    let directive = match kind.text.as_str() {
        "verify" => {
            let (question, question_token) = args.require("question", &kind)?;
            let (protocol, _) = args.require("protocol", &kind)?;
            Directive::Verify {
                question: parse_question(&question, &question_token)?,
                protocol,
            }
        }
        "complete" => {
            let protocols = args.take("protocols").map(|(value, _)| {
                value
                    .split(',')
                    .filter(|s| !s.is_empty())
                    .map(str::to_string)
                    .collect()
            });
            Directive::Complete { protocols }
        }
        "nullspace" => {
            let (question, question_token) = args.require("question", &kind)?;
            let (party, party_token) = args.require("party", &kind)?;
            Directive::Nullspace {
                question: parse_question(&question, &question_token)?,
                party: party
                    .parse()
                    .map_err(|_| party_token.error(format!("invalid party index `{party}`")))?,
            }
        }
        "classify" => Directive::Classify,
        "conclusive" => {
            let (question, question_token) = args.require("question", &kind)?;
            let (protocol, _) = args.require("protocol", &kind)?;
            let label = args.take("label").map(|(value, _)| value);
            Directive::Conclusive {
                question: parse_question(&question, &question_token)?,
                protocol,
                label,
            }
        }
        "prop2" => Directive::Prop2,
        other => {
            return Err(kind.error(format!(
                "unknown analysis `{other}` (expected verify, complete, nullspace, \
                 classify, conclusive, or prop2)"
            )))
        }
    };
    args.finish()?;
    file.directives.push(DirectiveDecl {
        directive,
        line: keyword.line,
    });
    Ok(())
}

fn parse_file(text: &str) -> Result<ScenarioFile, Diagnostic> {
    let tokens = tokenize(text)?;
    let mut parser = Parser { tokens, pos: 0 };
    let mut file = ScenarioFile::default();
    while let Some(token) = parser.peek().cloned() {
        if token.kind != TokenKind::Word {
            return Err(token.error(format!(
                "expected a declaration (`parties`, `state`, `protocol`, or `analyze`), \
                 found `{}`",
                token.text
            )));
        }
        parser.next();
        match token.text.as_str() {
            "parties" => parse_parties(&mut parser, &token, &mut file)?,
            "state" => parse_state(&mut parser, &token, &mut file)?,
            "protocol" => parse_protocol(&mut parser, &token, &mut file)?,
            "analyze" => parse_analyze(&mut parser, &token, &mut file)?,
            other => {
                return Err(token.error(format!(
                    "unknown declaration `{other}` (expected `parties`, `state`, \
                     `protocol`, or `analyze`)"
                )))
            }
        }
    }
    Ok(file)
}

/// Parses and semantically validates a scenario file. The returned file is
/// guaranteed to [`compile`](super::compile).
pub fn parse_scenario(text: &str) -> Result<ScenarioFile, Vec<Diagnostic>> {
    let file = parse_file(text).map_err(|d| vec![d])?;
    compile(&file)?;
    Ok(file)
}
