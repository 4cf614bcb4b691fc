use std::fmt;

use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TokenKind {
    Ident,
    Int,
    // keywords
    Tree,
    Env,
    Blackboard,
    Root,
    IntKw,
    BoolKw,
    EnumKw,
    Frozen,
    Fallback,
    FallbackM,
    Sequence,
    SequenceM,
    Parallel,
    Inverter,
    ForceSuccess,
    ForceFailure,
    Check,
    Action,
    On,
    Return,
    Success,
    Failure,
    Running,
    Invalid,
    Spec,
    Status,
    True,
    False,
    Globally,
    Finally,
    Next,
    Until,
    StrongRelease,
    // punctuation
    LBrace,
    RBrace,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Colon,
    Semi,
    Comma,
    Equals,
    Assign,
    DotDot,
    Arrow,
    Plus,
    Minus,
    EqEq,
    NotEq,
    Lt,
    Le,
    Gt,
    Ge,
    AndAnd,
    OrOr,
    Bang,
    Eof,
}

const KEYWORDS: &[(&str, TokenKind)] = &[
    ("tree", TokenKind::Tree),
    ("env", TokenKind::Env),
    ("blackboard", TokenKind::Blackboard),
    ("root", TokenKind::Root),
    ("int", TokenKind::IntKw),
    ("bool", TokenKind::BoolKw),
    ("enum", TokenKind::EnumKw),
    ("frozen", TokenKind::Frozen),
    ("fallback", TokenKind::Fallback),
    ("fallback_m", TokenKind::FallbackM),
    ("sequence", TokenKind::Sequence),
    ("sequence_m", TokenKind::SequenceM),
    ("parallel", TokenKind::Parallel),
    ("inverter", TokenKind::Inverter),
    ("force_success", TokenKind::ForceSuccess),
    ("force_failure", TokenKind::ForceFailure),
    ("check", TokenKind::Check),
    ("action", TokenKind::Action),
    ("on", TokenKind::On),
    ("return", TokenKind::Return),
    ("success", TokenKind::Success),
    ("failure", TokenKind::Failure),
    ("running", TokenKind::Running),
    ("invalid", TokenKind::Invalid),
    ("spec", TokenKind::Spec),
    ("status", TokenKind::Status),
    ("true", TokenKind::True),
    ("false", TokenKind::False),
    ("G", TokenKind::Globally),
    ("F", TokenKind::Finally),
    ("X", TokenKind::Next),
    ("U", TokenKind::Until),
    ("M", TokenKind::StrongRelease),
];

/// True if `word` lexes as a keyword rather than an identifier.
pub fn is_keyword(word: &str) -> bool {
    KEYWORDS.iter().any(|(k, _)| *k == word)
}

impl TokenKind {
    pub fn describe(self) -> &'static str {
        use TokenKind::*;
        if let Some((k, _)) = KEYWORDS.iter().find(|(_, t)| *t == self) {
            return k;
        }
        match self {
            Ident => "identifier",
            Int => "integer",
            LBrace => "{",
            RBrace => "}",
            LParen => "(",
            RParen => ")",
            LBracket => "[",
            RBracket => "]",
            Colon => ":",
            Semi => ";",
            Comma => ",",
            Equals => "=",
            Assign => ":=",
            DotDot => "..",
            Arrow => "->",
            Plus => "+",
            Minus => "-",
            EqEq => "==",
            NotEq => "!=",
            Lt => "<",
            Le => "<=",
            Gt => ">",
            Ge => ">=",
            AndAnd => "&&",
            OrOr => "||",
            Bang => "!",
            Eof => "end of input",
            _ => unreachable!("keywords handled above"),
        }
    }
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.describe())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub lexeme: String,
    /// 1-based line.
    pub line: usize,
    /// 1-based column, counted in characters.
    pub column: usize,
    /// Byte offset of the lexeme in the source.
    pub offset: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{line}:{column}: unexpected character `{ch}`")]
pub struct LexError {
    pub ch: char,
    pub line: usize,
    pub column: usize,
}

struct Cursor<'a> {
    source: &'a str,
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
    line: usize,
    column: usize,
}

impl Cursor<'_> {
    fn peek(&mut self) -> Option<(usize, char)> {
        self.chars.peek().copied()
    }

    fn peek_char(&mut self) -> Option<char> {
        self.peek().map(|(_, c)| c)
    }

    fn bump(&mut self) -> Option<char> {
        let (_, c) = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn bump_while(&mut self, pred: impl Fn(char) -> bool) {
        while self.peek_char().is_some_and(&pred) {
            self.bump();
        }
    }

    fn offset(&mut self) -> usize {
        let len = self.source.len();
        self.peek().map_or(len, |(o, _)| o)
    }
}

pub fn tokenize(source: &str) -> Result<Vec<Token>, LexError> {
    let mut tokens = Vec::new();
    let mut cur = Cursor {
        source,
        chars: source.char_indices().peekable(),
        line: 1,
        column: 1,
    };

    while let Some((offset, ch)) = cur.peek() {
        let (line, column) = (cur.line, cur.column);
        if ch.is_whitespace() {
            cur.bump();
            continue;
        }
        if ch == '#' {
            cur.bump_while(|c| c != '\n');
            continue;
        }

        let kind = if ch.is_ascii_alphabetic() || ch == '_' {
            cur.bump_while(|c| c.is_ascii_alphanumeric() || c == '_');
            let word = &source[offset..cur.offset()];
            KEYWORDS
                .iter()
                .find(|(k, _)| *k == word)
                .map_or(TokenKind::Ident, |(_, t)| *t)
        } else if ch.is_ascii_digit() {
            cur.bump_while(|c| c.is_ascii_digit());
            TokenKind::Int
        } else {
            cur.bump();
            let paired = match (ch, cur.peek_char()) {
                (':', Some('=')) => Some(TokenKind::Assign),
                ('.', Some('.')) => Some(TokenKind::DotDot),
                ('-', Some('>')) => Some(TokenKind::Arrow),
                ('=', Some('=')) => Some(TokenKind::EqEq),
                ('!', Some('=')) => Some(TokenKind::NotEq),
                ('<', Some('=')) => Some(TokenKind::Le),
                ('>', Some('=')) => Some(TokenKind::Ge),
                ('&', Some('&')) => Some(TokenKind::AndAnd),
                ('|', Some('|')) => Some(TokenKind::OrOr),
                _ => None,
            };
            if let Some(kind) = paired {
                cur.bump();
                kind
            } else {
                match ch {
                    '{' => TokenKind::LBrace,
                    '}' => TokenKind::RBrace,
                    '(' => TokenKind::LParen,
                    ')' => TokenKind::RParen,
                    '[' => TokenKind::LBracket,
                    ']' => TokenKind::RBracket,
                    ':' => TokenKind::Colon,
                    ';' => TokenKind::Semi,
                    ',' => TokenKind::Comma,
                    '=' => TokenKind::Equals,
                    '+' => TokenKind::Plus,
                    '-' => TokenKind::Minus,
                    '<' => TokenKind::Lt,
                    '>' => TokenKind::Gt,
                    '!' => TokenKind::Bang,
                    _ => return Err(LexError { ch, line, column }),
                }
            }
        };
        let end = cur.offset();
        tokens.push(Token {
            kind,
            lexeme: source[offset..end].to_string(),
            line,
            column,
            offset,
        });
    }

    tokens.push(Token {
        kind: TokenKind::Eof,
        lexeme: String::new(),
        line: cur.line,
        column: cur.column,
        offset: source.len(),
    });
    Ok(tokens)
}
