use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::model::{Ident, Interval, StateVarName, Time, Value};

/// Location of a token: 1-based line and column, length in characters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SourceSpan {
    pub file: Arc<str>,
    pub line: usize,
    pub column: usize,
    pub len: usize,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.file, self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParseError {
    pub span: SourceSpan,
    pub message: String,
    pub expected: Vec<String>,
}

impl ParseError {
    pub fn new(span: SourceSpan, message: impl Into<String>) -> Self {
        ParseError {
            span,
            message: message.into(),
            expected: Vec::new(),
        }
    }

    pub fn expecting(mut self, expected: &[&str]) -> Self {
        self.expected = expected.iter().map(|s| s.to_string()).collect();
        self
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.span, self.message)?;
        if !self.expected.is_empty() {
            write!(f, " (expected {})", self.expected.join(" or "))?;
        }
        Ok(())
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Tok {
    Word,
    Int,
    Star,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Colon,
    Eq,
    Arrow,
    Bad,
}

impl Tok {
    fn describe(self) -> &'static str {
        match self {
            Tok::Word => "identifier",
            Tok::Int => "integer",
            Tok::Star => "`*`",
            Tok::LParen => "`(`",
            Tok::RParen => "`)`",
            Tok::LBracket => "`[`",
            Tok::RBracket => "`]`",
            Tok::Comma => "`,`",
            Tok::Colon => "`:`",
            Tok::Eq => "`=`",
            Tok::Arrow => "`->`",
            Tok::Bad => "character",
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Token<'a> {
    pub kind: Tok,
    pub text: &'a str,
    pub col: usize,
    pub len: usize,
}

fn tokenize(line: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let chars: Vec<(usize, char)> = line.char_indices().collect();
    let mut i = 0;
    while i < chars.len() {
        let (start, c) = chars[i];
        let col = i + 1;
        if c == '#' {
            break;
        }
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let single = match c {
            '*' => Some(Tok::Star),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '[' => Some(Tok::LBracket),
            ']' => Some(Tok::RBracket),
            ',' => Some(Tok::Comma),
            ':' => Some(Tok::Colon),
            '=' => Some(Tok::Eq),
            _ => None,
        };
        if let Some(kind) = single {
            out.push(Token {
                kind,
                text: &line[start..start + 1],
                col,
                len: 1,
            });
            i += 1;
            continue;
        }
        if c == '-' && chars.get(i + 1).map(|p| p.1) == Some('>') {
            out.push(Token {
                kind: Tok::Arrow,
                text: &line[start..start + 2],
                col,
                len: 2,
            });
            i += 2;
            continue;
        }
        let mut j = i + 1;
        let kind = if c.is_ascii_digit() {
            while j < chars.len() && chars[j].1.is_ascii_digit() {
                j += 1;
            }
            Tok::Int
        } else if c.is_ascii_alphabetic() {
            while j < chars.len() {
                let d = chars[j].1;
                let arrow = d == '-' && chars.get(j + 1).map(|p| p.1) == Some('>');
                if (d.is_ascii_alphanumeric() || d == '_' || d == '-') && !arrow {
                    j += 1;
                } else {
                    break;
                }
            }
            Tok::Word
        } else {
            // Swallow the rest of a run of unexpected characters as one token.
            while j < chars.len() && !chars[j].1.is_whitespace() && !chars[j].1.is_ascii_alphanumeric()
            {
                j += 1;
            }
            Tok::Bad
        };
        let end = chars.get(j).map(|p| p.0).unwrap_or(line.len());
        out.push(Token {
            kind,
            text: &line[start..end],
            col,
            len: j - i,
        });
        i = j;
    }
    out
}

/// Cursor over the tokens of one source line.
pub(crate) struct Line<'a> {
    pub file: Arc<str>,
    pub number: usize,
    pub tokens: Vec<Token<'a>>,
    pub pos: usize,
    width: usize,
}

pub(crate) type Res<T> = Result<T, ParseError>;

impl<'a> Line<'a> {
    pub fn span_of(&self, t: &Token<'_>) -> SourceSpan {
        SourceSpan {
            file: self.file.clone(),
            line: self.number,
            column: t.col,
            len: t.len,
        }
    }

    /// Span of the current token, or of the end of the line.
    pub fn here(&self) -> SourceSpan {
        match self.tokens.get(self.pos) {
            Some(t) => self.span_of(t),
            None => SourceSpan {
                file: self.file.clone(),
                line: self.number,
                column: self.width + 1,
                len: 1,
            },
        }
    }

    pub fn peek(&self) -> Option<&Token<'a>> {
        self.tokens.get(self.pos)
    }

    pub fn at_end(&self) -> bool {
        self.pos >= self.tokens.len()
    }

    pub fn eat(&mut self, kind: Tok) -> bool {
        if self.peek().is_some_and(|t| t.kind == kind) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub fn err_here(&self, msg: impl Into<String>, expected: &[&str]) -> ParseError {
        ParseError::new(self.here(), msg).expecting(expected)
    }

    fn unexpected(&self, expected: &[&str]) -> ParseError {
        let msg = match self.peek() {
            Some(t) => format!("unexpected {} `{}`", t.kind.describe(), t.text),
            None => "unexpected end of line".to_string(),
        };
        self.err_here(msg, expected)
    }

    pub fn expect(&mut self, kind: Tok) -> Res<Token<'a>> {
        match self.peek() {
            Some(t) if t.kind == kind => {
                let t = t.clone();
                self.pos += 1;
                Ok(t)
            }
            _ => Err(self.unexpected(&[kind.describe()])),
        }
    }

    pub fn ident(&mut self) -> Res<(Ident, SourceSpan)> {
        let t = self.expect(Tok::Word)?;
        let span = self.span_of(&t);
        match Ident::new(t.text) {
            Ok(i) => Ok((i, span)),
            Err(_) => Err(ParseError::new(
                span,
                format!("`{}` is reserved and cannot be used as an identifier", t.text),
            )),
        }
    }

    /// Identifiers up to the end of the line.
    pub fn ident_list(&mut self) -> Res<Vec<(Ident, SourceSpan)>> {
        let mut out = Vec::new();
        while !self.at_end() {
            out.push(self.ident()?);
        }
        Ok(out)
    }

    pub fn int(&mut self) -> Res<(Time, SourceSpan)> {
        let t = self.expect(Tok::Int)?;
        let span = self.span_of(&t);
        t.text
            .parse::<Time>()
            .map(|v| (v, span.clone()))
            .map_err(|_| ParseError::new(span, format!("integer `{}` is too large", t.text)))
    }

    pub fn finish(&self) -> Res<()> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.unexpected(&["end of line"]))
        }
    }

    /// `functor` or `functor(arg, ...)`.
    pub fn state_var_name(&mut self) -> Res<(StateVarName, SourceSpan)> {
        let (functor, mut span) = self.ident()?;
        let mut args = Vec::new();
        if self.eat(Tok::LParen) {
            loop {
                let (a, _) = self.ident()?;
                args.push(a);
                if self.eat(Tok::Comma) {
                    continue;
                }
                let close = self.expect(Tok::RParen)?;
                span.len = close.col + close.len - span.column;
                break;
            }
        }
        Ok((StateVarName::new(functor, args), span))
    }

    /// `true`, `false`, `none` or an identifier.
    pub fn value(&mut self) -> Res<(Value, SourceSpan)> {
        let t = self.expect(Tok::Word)?;
        let span = self.span_of(&t);
        let v = Value::parse(t.text).ok_or_else(|| {
            ParseError::new(span.clone(), format!("invalid value `{}`", t.text))
        })?;
        Ok((v, span))
    }

    /// `[a,b]`, rejecting empty intervals.
    pub fn interval(&mut self) -> Res<(Interval, SourceSpan)> {
        let open = self.expect(Tok::LBracket)?;
        let (a, _) = self.int()?;
        self.expect(Tok::Comma)?;
        let (b, _) = self.int()?;
        let close = self.expect(Tok::RBracket)?;
        let mut span = self.span_of(&open);
        span.len = close.col + close.len - open.col;
        match Interval::new(a, b) {
            Some(i) => Ok((i, span)),
            None => Err(ParseError::new(span, format!("empty interval [{a},{b}]"))),
        }
    }
}

/// Splits `text` into non-blank, comment-stripped lines ready for parsing.
pub(crate) fn lines<'a>(file: &str, text: &'a str) -> Vec<Line<'a>> {
    let file: Arc<str> = Arc::from(file);
    text.lines()
        .enumerate()
        .filter_map(|(i, l)| {
            let tokens = tokenize(l);
            (!tokens.is_empty()).then(|| Line {
                file: file.clone(),
                number: i + 1,
                tokens,
                pos: 0,
                width: l.chars().count(),
            })
        })
        .collect()
}

pub(crate) fn file_start(file: &str) -> SourceSpan {
    SourceSpan {
        file: Arc::from(file),
        line: 1,
        column: 1,
        len: 1,
    }
}
