use super::ParseError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    LParen,
    RParen,
    LBrack,
    RBrack,
    Comma,
    Dot,
    Semi,
    Colon,
    At,
    Tilde,
    Bar,
    Amp,
    Arrow,
    Diamond,
    Box,
    Turnstile,
    Bottom,
    Top,
    Exists,
    Forall,
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Eof => "end of input".to_string(),
            other => format!("`{}`", other.text()),
        }
    }

    fn text(&self) -> &'static str {
        match self {
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBrack => "[",
            Tok::RBrack => "]",
            Tok::Comma => ",",
            Tok::Dot => ".",
            Tok::Semi => ";",
            Tok::Colon => ":",
            Tok::At => "@",
            Tok::Tilde => "~",
            Tok::Bar => "|",
            Tok::Amp => "&",
            Tok::Arrow => "->",
            Tok::Diamond => "<>",
            Tok::Box => "[]",
            Tok::Turnstile => "|-",
            Tok::Bottom => "false",
            Tok::Top => "true",
            Tok::Exists => "exists",
            Tok::Forall => "forall",
            Tok::Ident(_) | Tok::Eof => "",
        }
    }
}

pub(crate) fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

pub(crate) fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

/// Splits input into tokens paired with their byte offsets. Accepts both the
/// ASCII syntax and the usual unicode symbols.
pub(crate) fn tokenize(input: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let mut out = Vec::new();
    let mut chars = input.char_indices().peekable();
    while let Some(&(pos, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
            continue;
        }
        let rest = &input[pos..];
        let two = |s: &str| rest.starts_with(s);
        let (tok, len) = if two("|-") {
            (Tok::Turnstile, 2)
        } else if two("->") {
            (Tok::Arrow, 2)
        } else if two("<>") {
            (Tok::Diamond, 2)
        } else if two("[]") {
            (Tok::Box, 2)
        } else {
            let single = match c {
                '(' => Some(Tok::LParen),
                ')' => Some(Tok::RParen),
                '[' => Some(Tok::LBrack),
                ']' => Some(Tok::RBrack),
                ',' => Some(Tok::Comma),
                '.' => Some(Tok::Dot),
                ';' => Some(Tok::Semi),
                ':' => Some(Tok::Colon),
                '@' => Some(Tok::At),
                '~' | '¬' => Some(Tok::Tilde),
                '|' | '∨' => Some(Tok::Bar),
                '&' | '∧' => Some(Tok::Amp),
                '→' => Some(Tok::Arrow),
                '◇' => Some(Tok::Diamond),
                '□' => Some(Tok::Box),
                '⊢' => Some(Tok::Turnstile),
                '⊥' => Some(Tok::Bottom),
                '⊤' => Some(Tok::Top),
                '∃' => Some(Tok::Exists),
                '∀' => Some(Tok::Forall),
                _ => None,
            };
            match single {
                Some(t) => (t, c.len_utf8()),
                None if is_ident_start(c) => {
                    let len = rest
                        .char_indices()
                        .find(|&(_, ch)| !is_ident_char(ch))
                        .map_or(rest.len(), |(i, _)| i);
                    let word = &rest[..len];
                    let tok = match word {
                        "false" => Tok::Bottom,
                        "true" => Tok::Top,
                        "exists" => Tok::Exists,
                        "forall" => Tok::Forall,
                        _ => Tok::Ident(word.to_string()),
                    };
                    (tok, len)
                }
                None => {
                    return Err(ParseError::Syntax {
                        pos,
                        message: format!("unexpected character `{c}`"),
                    })
                }
            }
        };
        out.push((tok, pos));
        // advance by `len` bytes
        while let Some(&(p, _)) = chars.peek() {
            if p < pos + len {
                chars.next();
            } else {
                break;
            }
        }
    }
    out.push((Tok::Eof, input.len()));
    Ok(out)
}

/// Cursor over a token stream shared by the formula and sequent parsers.
pub(crate) struct Cursor {
    toks: Vec<(Tok, usize)>,
    idx: usize,
}

impl Cursor {
    pub(crate) fn new(input: &str) -> Result<Self, ParseError> {
        Ok(Cursor {
            toks: tokenize(input)?,
            idx: 0,
        })
    }

    pub(crate) fn peek(&self) -> &Tok {
        &self.toks[self.idx].0
    }

    pub(crate) fn pos(&self) -> usize {
        self.toks[self.idx].1
    }

    pub(crate) fn bump(&mut self) -> Tok {
        let t = self.toks[self.idx].0.clone();
        if self.idx + 1 < self.toks.len() {
            self.idx += 1;
        }
        t
    }

    pub(crate) fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    pub(crate) fn expect(&mut self, tok: &Tok) -> Result<(), ParseError> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(self.unexpected(&tok.describe()))
        }
    }

    pub(crate) fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            _ => Err(self.unexpected("identifier")),
        }
    }

    pub(crate) fn unexpected(&self, wanted: &str) -> ParseError {
        ParseError::Syntax {
            pos: self.pos(),
            message: format!("expected {wanted}, found {}", self.peek().describe()),
        }
    }

    pub(crate) fn finish(&self) -> Result<(), ParseError> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            Err(self.unexpected("end of input"))
        }
    }
}
