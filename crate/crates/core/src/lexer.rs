use std::fmt;

use crate::diagnostic::{DiagCode, Diagnostic, Span};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Keyword {
    Protocol,
    Role,
    Field,
    Choice,
    At,
    Rec,
    Do,
    Interrupt,
    From,
    Trigger,
    Funds,
    Slot,
    String,
    HashedString,
    PubKeyHash,
    Value,
    Token,
    Contract,
}

impl Keyword {
    const TABLE: [(&'static str, Keyword); 18] = [
        ("protocol", Keyword::Protocol),
        ("role", Keyword::Role),
        ("field", Keyword::Field),
        ("choice", Keyword::Choice),
        ("at", Keyword::At),
        ("rec", Keyword::Rec),
        ("do", Keyword::Do),
        ("interrupt", Keyword::Interrupt),
        ("from", Keyword::From),
        ("trigger", Keyword::Trigger),
        ("funds", Keyword::Funds),
        ("slot", Keyword::Slot),
        ("String", Keyword::String),
        ("HashedString", Keyword::HashedString),
        ("PubKeyHash", Keyword::PubKeyHash),
        ("Value", Keyword::Value),
        ("Token", Keyword::Token),
        ("Contract", Keyword::Contract),
    ];

    pub fn lookup(word: &str) -> Option<Keyword> {
        Self::TABLE.iter().find(|(w, _)| *w == word).map(|(_, k)| *k)
    }

    pub fn as_str(self) -> &'static str {
        Self::TABLE.iter().find(|(_, k)| *k == self).map(|(w, _)| *w).unwrap_or("?")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Punct {
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Semi,
    Colon,
    EqEq,
}

impl Punct {
    pub fn as_str(self) -> &'static str {
        match self {
            Punct::LParen => "(",
            Punct::RParen => ")",
            Punct::LBrace => "{",
            Punct::RBrace => "}",
            Punct::Comma => ",",
            Punct::Semi => ";",
            Punct::Colon => ":",
            Punct::EqEq => "==",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TokenKind {
    Keyword(Keyword),
    Ident,
    Punct(Punct),
    Int(u64),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub lexeme: String,
    pub span: Span,
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            TokenKind::Keyword(_) => write!(f, "keyword `{}`", self.lexeme),
            TokenKind::Ident => write!(f, "identifier `{}`", self.lexeme),
            TokenKind::Punct(_) => write!(f, "`{}`", self.lexeme),
            TokenKind::Int(_) => write!(f, "integer `{}`", self.lexeme),
        }
    }
}

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
    line: u32,
    col: u32,
}

impl Cursor<'_> {
    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek2(&self) -> Option<char> {
        let mut it = self.src[self.pos..].chars();
        it.next();
        it.next()
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

    fn span_from(&self, line: u32, col: u32, start: usize) -> Span {
        Span::new(line, col, start, self.pos - start)
    }
}

/// Splits source text into tokens. `//` comments run to end of line.
///
/// Lexing continues past bad characters so that every offending character is
/// reported in one run.
pub fn tokenize(source: &str) -> Result<Vec<Token>, Vec<Diagnostic>> {
    let mut cur = Cursor { src: source, pos: 0, line: 1, col: 1 };
    let mut tokens = Vec::new();
    let mut errors = Vec::new();

    while let Some(c) = cur.peek() {
        let (line, col, start) = (cur.line, cur.col, cur.pos);
        if c.is_whitespace() {
            cur.bump();
            continue;
        }
        if c == '/' && cur.peek2() == Some('/') {
            while let Some(c) = cur.peek() {
                if c == '\n' {
                    break;
                }
                cur.bump();
            }
            continue;
        }
        if c.is_ascii_alphabetic() {
            while matches!(cur.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '_') {
                cur.bump();
            }
            let word = &source[start..cur.pos];
            let kind = match Keyword::lookup(word) {
                Some(k) => TokenKind::Keyword(k),
                None => TokenKind::Ident,
            };
            tokens.push(Token { kind, lexeme: word.to_string(), span: cur.span_from(line, col, start) });
            continue;
        }
        if c.is_ascii_digit() {
            while matches!(cur.peek(), Some(c) if c.is_ascii_digit()) {
                cur.bump();
            }
            let text = &source[start..cur.pos];
            let span = cur.span_from(line, col, start);
            match text.parse::<u64>() {
                Ok(v) => tokens.push(Token { kind: TokenKind::Int(v), lexeme: text.to_string(), span }),
                Err(_) => errors.push(Diagnostic::new(
                    DiagCode::IntegerOutOfRange,
                    format!("integer literal `{}` does not fit in 64 bits", text),
                    span,
                )),
            }
            continue;
        }
        let punct = match c {
            '(' => Some(Punct::LParen),
            ')' => Some(Punct::RParen),
            '{' => Some(Punct::LBrace),
            '}' => Some(Punct::RBrace),
            ',' => Some(Punct::Comma),
            ';' => Some(Punct::Semi),
            ':' => Some(Punct::Colon),
            '=' if cur.peek2() == Some('=') => Some(Punct::EqEq),
            _ => None,
        };
        match punct {
            Some(p) => {
                for _ in 0..p.as_str().len() {
                    cur.bump();
                }
                tokens.push(Token {
                    kind: TokenKind::Punct(p),
                    lexeme: p.as_str().to_string(),
                    span: cur.span_from(line, col, start),
                });
            }
            None => {
                cur.bump();
                errors.push(Diagnostic::new(
                    DiagCode::UnexpectedCharacter,
                    format!("unexpected character {:?}", c),
                    cur.span_from(line, col, start),
                ));
            }
        }
    }

    if errors.is_empty() {
        Ok(tokens)
    } else {
        Err(errors)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<(TokenKind, String)> {
        tokenize(src).unwrap().into_iter().map(|t| (t.kind, t.lexeme)).collect()
    }

    #[test]
    fn lock_interaction() {
        use Keyword as K;
        use Punct as P;
        let expect = vec![
            (TokenKind::Ident, "lock"),
            (TokenKind::Punct(P::LParen), "("),
            (TokenKind::Keyword(K::String), "String"),
            (TokenKind::Punct(P::Comma), ","),
            (TokenKind::Keyword(K::Value), "Value"),
            (TokenKind::Punct(P::RParen), ")"),
            (TokenKind::Keyword(K::From), "from"),
            (TokenKind::Ident, "Owner"),
            (TokenKind::Punct(P::Semi), ";"),
        ];
        let expect: Vec<_> = expect.into_iter().map(|(k, s)| (k, s.to_string())).collect();
        assert_eq!(kinds("lock (String, Value) from Owner;"), expect);
    }

    #[test]
    fn empty_source() {
        assert!(tokenize("").unwrap().is_empty());
        assert!(tokenize("  // only a comment\n\t").unwrap().is_empty());
    }

    #[test]
    fn conditional_trigger() {
        let toks = kinds("slot trigger (slot == 10, endAuction);");
        assert!(toks.contains(&(TokenKind::Int(10), "10".to_string())));
        assert!(toks.contains(&(TokenKind::Punct(Punct::EqEq), "==".to_string())));
        assert_eq!(toks[0].0, TokenKind::Keyword(Keyword::Slot));
    }

    #[test]
    fn spans_are_ordered_and_positioned() {
        let toks = tokenize("protocol P\n  (role A)").unwrap();
        for w in toks.windows(2) {
            assert!(w[0].span.end() <= w[1].span.offset);
        }
        let lparen = &toks[2];
        assert_eq!((lparen.span.line, lparen.span.column, lparen.span.offset), (2, 3, 13));
    }

    #[test]
    fn bad_characters_reported_with_span() {
        let errs = tokenize("lock # $").unwrap_err();
        assert_eq!(errs.len(), 2);
        assert_eq!(errs[0].code, DiagCode::UnexpectedCharacter);
        assert_eq!(errs[0].span.unwrap().column, 6);
        assert_eq!(errs[1].span.unwrap().column, 8);
    }

    #[test]
    fn single_equals_is_rejected() {
        assert!(tokenize("slot = 3").is_err());
    }

    #[test]
    fn identifiers_cannot_start_with_underscore() {
        assert!(tokenize("_x").is_err());
        assert_eq!(kinds("a_1")[0].0, TokenKind::Ident);
    }

    #[test]
    fn huge_integer() {
        let errs = tokenize("99999999999999999999999").unwrap_err();
        assert_eq!(errs[0].code, DiagCode::IntegerOutOfRange);
    }
}
