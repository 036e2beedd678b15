use std::fmt;

use crate::diag::{Code, Diagnostic, Pos, Span};

use super::SourceFile;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Keyword {
    Model,
    Kind,
    Topic,
    Service,
    Action,
    Parameter,
    Message,
    Srv,
    ActionSchema,
    Group,
    Field,
    Obligation,
    Category,
    Direction,
    Unit,
    Default,
    Requires,
}

impl Keyword {
    pub const ALL: [Keyword; 17] = [
        Keyword::Model,
        Keyword::Kind,
        Keyword::Topic,
        Keyword::Service,
        Keyword::Action,
        Keyword::Parameter,
        Keyword::Message,
        Keyword::Srv,
        Keyword::ActionSchema,
        Keyword::Group,
        Keyword::Field,
        Keyword::Obligation,
        Keyword::Category,
        Keyword::Direction,
        Keyword::Unit,
        Keyword::Default,
        Keyword::Requires,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Keyword::Model => "model",
            Keyword::Kind => "kind",
            Keyword::Topic => "topic",
            Keyword::Service => "service",
            Keyword::Action => "action",
            Keyword::Parameter => "parameter",
            Keyword::Message => "message",
            Keyword::Srv => "srv",
            Keyword::ActionSchema => "action_schema",
            Keyword::Group => "group",
            Keyword::Field => "field",
            Keyword::Obligation => "obligation",
            Keyword::Category => "category",
            Keyword::Direction => "direction",
            Keyword::Unit => "unit",
            Keyword::Default => "default",
            Keyword::Requires => "requires",
        }
    }

    fn lookup(word: &str) -> Option<Keyword> {
        Keyword::ALL.into_iter().find(|k| k.as_str() == word)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    Keyword(Keyword),
    Ident(String),
    /// A digit-led alphanumeric run that is not a number, e.g. `0a1b`.
    Word(String),
    Number(String),
    Str(String),
    /// `@name`
    Directive(String),
    LBrace,
    RBrace,
    Colon,
    Comma,
    LBracket,
    RBracket,
    Eof,
}

impl TokenKind {
    /// The text of identifier-like tokens, keywords included.
    pub fn word_text(&self) -> Option<&str> {
        match self {
            TokenKind::Keyword(k) => Some(k.as_str()),
            TokenKind::Ident(s) => Some(s),
            _ => None,
        }
    }
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenKind::Keyword(k) => write!(f, "keyword `{}`", k.as_str()),
            TokenKind::Ident(s) => write!(f, "identifier `{s}`"),
            TokenKind::Word(s) => write!(f, "`{s}`"),
            TokenKind::Number(s) => write!(f, "number `{s}`"),
            TokenKind::Str(s) => write!(f, "string \"{s}\""),
            TokenKind::Directive(s) => write!(f, "directive `@{s}`"),
            TokenKind::LBrace => f.write_str("`{`"),
            TokenKind::RBrace => f.write_str("`}`"),
            TokenKind::Colon => f.write_str("`:`"),
            TokenKind::Comma => f.write_str("`,`"),
            TokenKind::LBracket => f.write_str("`[`"),
            TokenKind::RBracket => f.write_str("`]`"),
            TokenKind::Eof => f.write_str("end of file"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub span: Span,
}

/// Streaming tokenizer. Yields an error item for each illegal character or
/// unterminated string and keeps going after it.
pub struct Lexer<'a> {
    text: &'a str,
    pos: usize,
    line: u32,
    col: u32,
    done: bool,
}

impl<'a> Lexer<'a> {
    pub fn new(source: &'a SourceFile) -> Self {
        Lexer { text: source.text(), pos: 0, line: 1, col: 1, done: false }
    }

    fn here(&self) -> Pos {
        Pos { line: self.line, col: self.col, offset: self.pos }
    }

    fn peek(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    fn peek_at(&self, n: usize) -> Option<char> {
        self.text[self.pos..].chars().nth(n)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn skip_trivia(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == '#' {
                while self.peek().is_some_and(|c| c != '\n') {
                    self.bump();
                }
            } else {
                break;
            }
        }
    }

    fn take_while(&mut self, pred: impl Fn(char) -> bool) -> &'a str {
        let start = self.pos;
        while self.peek().is_some_and(&pred) {
            self.bump();
        }
        &self.text[start..self.pos]
    }

    fn string(&mut self, start: Pos) -> Result<TokenKind, Diagnostic> {
        let quote_end = {
            self.bump();
            self.here()
        };
        let unterminated = || {
            Diagnostic::error(Code::E_UNTERMINATED_STRING, "unterminated string literal", Span::new(start, quote_end))
        };
        let mut value = String::new();
        loop {
            match self.peek() {
                None | Some('\n') => return Err(unterminated()),
                Some('"') => {
                    self.bump();
                    return Ok(TokenKind::Str(value));
                }
                Some('\\') => {
                    let escape_start = self.here();
                    self.bump();
                    match self.peek() {
                        Some(c @ ('"' | '\\')) => {
                            self.bump();
                            value.push(c);
                        }
                        None | Some('\n') => return Err(unterminated()),
                        Some(c) => {
                            self.bump();
                            return Err(Diagnostic::error(
                                Code::E_ILLEGAL_CHAR,
                                format!("unknown escape `\\{c}`"),
                                Span::new(escape_start, self.here()),
                            ));
                        }
                    }
                }
                Some(c) => {
                    self.bump();
                    value.push(c);
                }
            }
        }
    }

    fn number_or_word(&mut self, start: Pos) -> Result<TokenKind, Diagnostic> {
        let begin = self.pos;
        if self.peek() == Some('-') {
            self.bump();
        }
        loop {
            self.take_while(|c| c.is_ascii_alphanumeric() || c == '_' || c == '.');
            let text = &self.text[begin..self.pos];
            let exponent_sign = matches!(text.as_bytes().last(), Some(b'e' | b'E'))
                && matches!(self.peek(), Some('+' | '-'))
                && self.peek_at(1).is_some_and(|c| c.is_ascii_digit());
            if exponent_sign {
                self.bump();
            } else {
                break;
            }
        }
        let text = &self.text[begin..self.pos];
        if is_number(text) {
            Ok(TokenKind::Number(text.to_string()))
        } else if text.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_') {
            Ok(TokenKind::Word(text.to_string()))
        } else {
            Err(Diagnostic::error(
                Code::E_ILLEGAL_CHAR,
                format!("malformed number `{text}`"),
                Span::new(start, self.here()),
            ))
        }
    }
}

/// `-?[0-9]+(\.[0-9]+)?([eE][+-]?[0-9]+)?`
pub fn is_number(text: &str) -> bool {
    let digits = |s: &str| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit());
    let body = text.strip_prefix('-').unwrap_or(text);
    let (mantissa, exponent) = match body.find(['e', 'E']) {
        Some(i) => (&body[..i], Some(&body[i + 1..])),
        None => (body, None),
    };
    let mantissa_ok = match mantissa.split_once('.') {
        Some((int, frac)) => digits(int) && digits(frac),
        None => digits(mantissa),
    };
    let exponent_ok = exponent.is_none_or(|e| digits(e.strip_prefix(['+', '-']).unwrap_or(e)));
    mantissa_ok && exponent_ok
}

impl Iterator for Lexer<'_> {
    type Item = Result<Token, Diagnostic>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        self.skip_trivia();
        let start = self.here();
        let Some(c) = self.peek() else {
            self.done = true;
            return Some(Ok(Token { kind: TokenKind::Eof, span: Span::new(start, start) }));
        };
        let kind = match c {
            '{' | '}' | ':' | ',' | '[' | ']' => {
                self.bump();
                Ok(match c {
                    '{' => TokenKind::LBrace,
                    '}' => TokenKind::RBrace,
                    ':' => TokenKind::Colon,
                    ',' => TokenKind::Comma,
                    '[' => TokenKind::LBracket,
                    _ => TokenKind::RBracket,
                })
            }
            '"' => self.string(start),
            '@' => {
                self.bump();
                let name = self.take_while(|c| c.is_ascii_alphanumeric() || c == '_');
                if name.is_empty() {
                    Err(Diagnostic::error(Code::E_ILLEGAL_CHAR, "expected directive name after `@`", Span::new(start, self.here())))
                } else {
                    Ok(TokenKind::Directive(name.to_string()))
                }
            }
            c if c.is_ascii_digit() || (c == '-' && self.peek_at(1).is_some_and(|d| d.is_ascii_digit())) => {
                self.number_or_word(start)
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let word = self.take_while(|c| c.is_ascii_alphanumeric() || c == '_');
                Ok(match Keyword::lookup(word) {
                    Some(k) => TokenKind::Keyword(k),
                    None => TokenKind::Ident(word.to_string()),
                })
            }
            c => {
                self.bump();
                Err(Diagnostic::error(
                    Code::E_ILLEGAL_CHAR,
                    format!("illegal character `{}`", c.escape_default()),
                    Span::new(start, self.here()),
                ))
            }
        };
        Some(kind.map(|kind| Token { kind, span: Span::new(start, self.here()) }))
    }
}

/// Tokenizes a whole file, stopping at the first lexical error. The
/// returned stream always ends with [`TokenKind::Eof`].
pub fn tokenize(source: &SourceFile) -> Result<Vec<Token>, Diagnostic> {
    Lexer::new(source).collect()
}
