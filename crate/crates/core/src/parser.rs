//! Recursive-descent parser for protocol sources.
//!
//! The grammar is LL(1) once interactions and `Label;` continuations are
//! left-factored on their leading identifier; see `docs/grammar.md`.
//! Errors are recorded and the parser resynchronises at the next `;` or `}`
//! of the current block, so one run reports every independent mistake.

use crate::ast::*;
use crate::diagnostic::{DiagCode, Diagnostic, Span};
use crate::lexer::{tokenize, Keyword, Punct, Token, TokenKind};

/// Maximum block nesting accepted before the parser gives up on a subtree.
pub const MAX_NESTING: usize = 64;

/// The error has already been recorded in `Parser::diags`.
struct Reported;

type PResult<T> = Result<T, Reported>;

pub fn parse_protocol(source: &str) -> Result<ProtocolDecl, Vec<Diagnostic>> {
    let tokens = tokenize(source)?;
    let eof = eof_span(source);
    let mut p = Parser { tokens, pos: 0, diags: Vec::new(), depth: 0, eof };
    let decl = p.protocol();
    match decl {
        Ok(decl) if p.diags.is_empty() => Ok(decl),
        _ => Err(p.diags),
    }
}

fn eof_span(source: &str) -> Span {
    let line = source.matches('\n').count() as u32 + 1;
    let col = source.rsplit('\n').next().map_or(0, |l| l.chars().count()) as u32 + 1;
    Span::new(line, col, source.len(), 0)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    diags: Vec<Diagnostic>,
    depth: usize,
    eof: Span,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn peek_kind(&self) -> Option<TokenKind> {
        self.peek().map(|t| t.kind)
    }

    fn peek_nth_kind(&self, n: usize) -> Option<TokenKind> {
        self.tokens.get(self.pos + n).map(|t| t.kind)
    }

    fn advance(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn at_punct(&self, p: Punct) -> bool {
        self.peek_kind() == Some(TokenKind::Punct(p))
    }

    fn at_keyword(&self, k: Keyword) -> bool {
        self.peek_kind() == Some(TokenKind::Keyword(k))
    }

    fn error_here(&mut self, expected: &str) -> Reported {
        let diag = match self.peek() {
            Some(tok) => {
                Diagnostic::new(DiagCode::UnexpectedToken, format!("expected {}, found {}", expected, tok), tok.span)
            }
            None => Diagnostic::new(
                DiagCode::UnexpectedEof,
                format!("unexpected end of input, expected {}", expected),
                self.eof,
            ),
        };
        self.diags.push(diag);
        Reported
    }

    fn expect_punct(&mut self, p: Punct) -> PResult<Span> {
        if self.at_punct(p) {
            Ok(self.advance().map(|t| t.span).unwrap_or(self.eof))
        } else {
            Err(self.error_here(&format!("`{}`", p.as_str())))
        }
    }

    fn expect_keyword(&mut self, k: Keyword) -> PResult<Span> {
        if self.at_keyword(k) {
            Ok(self.advance().map(|t| t.span).unwrap_or(self.eof))
        } else {
            Err(self.error_here(&format!("`{}`", k.as_str())))
        }
    }

    fn expect_ident(&mut self, what: &str) -> PResult<Spanned<String>> {
        if self.peek_kind() == Some(TokenKind::Ident) {
            let t = self.advance().expect("peeked");
            Ok(Spanned::new(t.lexeme, t.span))
        } else {
            Err(self.error_here(what))
        }
    }

    /// A role reference: any identifier, or the reserved `Contract`.
    fn role_ref(&mut self) -> PResult<Spanned<RoleName>> {
        match self.peek_kind() {
            Some(TokenKind::Ident) | Some(TokenKind::Keyword(Keyword::Contract)) => {
                let t = self.advance().expect("peeked");
                Ok(Spanned::new(RoleName::new(t.lexeme), t.span))
            }
            _ => Err(self.error_here("role name")),
        }
    }

    fn base_type(&mut self) -> Option<Spanned<BaseType>> {
        let tok = self.peek()?;
        let ty = match tok.kind {
            TokenKind::Keyword(Keyword::String) => BaseType::String,
            TokenKind::Keyword(Keyword::HashedString) => BaseType::HashedString,
            TokenKind::Keyword(Keyword::PubKeyHash) => BaseType::PubKeyHash,
            TokenKind::Keyword(Keyword::Value) => BaseType::Value,
            TokenKind::Keyword(Keyword::Token) => BaseType::Token,
            _ => return None,
        };
        let span = tok.span;
        self.pos += 1;
        Some(Spanned::new(ty, span))
    }

    /// Skips to just past the next `;`, or up to the next `}`, of the
    /// current block.
    fn synchronize(&mut self) {
        let mut depth = 0usize;
        while let Some(kind) = self.peek_kind() {
            match kind {
                TokenKind::Punct(Punct::LBrace) => depth += 1,
                TokenKind::Punct(Punct::RBrace) => {
                    if depth == 0 {
                        return;
                    }
                    depth -= 1;
                    if depth == 0 && self.peek_nth_kind(1) != Some(TokenKind::Punct(Punct::Semi)) {
                        self.pos += 1;
                        return;
                    }
                }
                TokenKind::Punct(Punct::Semi) if depth == 0 => {
                    self.pos += 1;
                    return;
                }
                _ => {}
            }
            self.pos += 1;
        }
    }

    fn protocol(&mut self) -> PResult<ProtocolDecl> {
        self.expect_keyword(Keyword::Protocol)?;
        let name = self.expect_ident("protocol name")?;
        self.expect_punct(Punct::LParen)?;
        let roles = self.role_list()?;
        self.expect_punct(Punct::LBrace)?;

        let mut fields = Vec::new();
        while self.at_keyword(Keyword::Field) {
            if self.field_decl(&mut fields).is_err() {
                self.synchronize();
            }
        }
        let body = self.block_items()?;
        self.expect_punct(Punct::RBrace)?;
        if let Some(tok) = self.peek() {
            let msg = format!("unexpected {} after the end of the protocol; a file holds one protocol", tok);
            self.diags.push(Diagnostic::new(DiagCode::UnexpectedToken, msg, tok.span));
            return Err(Reported);
        }
        Ok(ProtocolDecl { name, roles, fields, body })
    }

    fn role_list(&mut self) -> PResult<Vec<Spanned<RoleName>>> {
        let mut roles = Vec::new();
        if self.at_punct(Punct::RParen) {
            self.advance();
            return Ok(roles);
        }
        loop {
            self.expect_keyword(Keyword::Role)?;
            roles.push(self.role_ref()?);
            if self.at_punct(Punct::Comma) {
                self.advance();
            } else if self.at_punct(Punct::RParen) {
                self.advance();
                return Ok(roles);
            } else {
                return Err(self.error_here("`)` or `,` in role list"));
            }
        }
    }

    fn field_decl(&mut self, fields: &mut Vec<Spanned<BaseType>>) -> PResult<()> {
        self.expect_keyword(Keyword::Field)?;
        loop {
            match self.base_type() {
                Some(t) => fields.push(t),
                None => return Err(self.error_here("field type")),
            }
            if self.at_punct(Punct::Comma) {
                self.advance();
            } else {
                self.expect_punct(Punct::Semi)?;
                return Ok(());
            }
        }
    }

    /// Items up to (not including) the closing `}` of the current block.
    fn block_items(&mut self) -> PResult<Vec<ProtocolItem>> {
        self.depth += 1;
        if self.depth > MAX_NESTING {
            self.depth -= 1;
            let span = self.peek().map_or(self.eof, |t| t.span);
            self.diags.push(Diagnostic::new(
                DiagCode::NestingTooDeep,
                format!("blocks nested deeper than {} levels", MAX_NESTING),
                span,
            ));
            return Err(Reported);
        }
        let mut items = Vec::new();
        while self.peek().is_some() && !self.at_punct(Punct::RBrace) {
            match self.item() {
                Ok(item) => items.push(item),
                Err(Reported) => self.synchronize(),
            }
        }
        self.depth -= 1;
        Ok(items)
    }

    fn braced_block(&mut self) -> PResult<Vec<ProtocolItem>> {
        self.expect_punct(Punct::LBrace)?;
        let items = self.block_items()?;
        self.expect_punct(Punct::RBrace)?;
        Ok(items)
    }

    fn item(&mut self) -> PResult<ProtocolItem> {
        match self.peek_kind() {
            Some(TokenKind::Keyword(Keyword::Choice)) => self.choice().map(ProtocolItem::Choice),
            Some(TokenKind::Keyword(Keyword::Rec)) => self.rec().map(ProtocolItem::Rec),
            Some(TokenKind::Keyword(Keyword::Do)) => self.do_interrupt().map(ProtocolItem::DoInterrupt),
            Some(TokenKind::Keyword(Keyword::Field)) => {
                let span = self.peek().expect("peeked").span;
                self.diags.push(Diagnostic::new(
                    DiagCode::UnexpectedToken,
                    "field declarations must come before the first protocol item",
                    span,
                ));
                Err(Reported)
            }
            Some(TokenKind::Ident) => {
                let name = self.expect_ident("endpoint name")?;
                if self.at_punct(Punct::Semi) {
                    self.advance();
                    Ok(ProtocolItem::Continue(name))
                } else if self.at_punct(Punct::LParen) {
                    self.interaction_rest(name).map(ProtocolItem::Interact)
                } else {
                    Err(self.error_here("`(` or `;` after identifier"))
                }
            }
            _ => Err(self.error_here("protocol item")),
        }
    }

    fn interaction(&mut self) -> PResult<Interaction> {
        let name = self.expect_ident("endpoint name")?;
        self.interaction_rest(name)
    }

    fn interaction_rest(&mut self, endpoint: Spanned<String>) -> PResult<Interaction> {
        self.expect_punct(Punct::LParen)?;
        let mut params = Vec::new();
        if self.at_punct(Punct::RParen) {
            self.advance();
        } else {
            loop {
                match self.base_type() {
                    Some(t) => params.push(t.node),
                    None => return Err(self.error_here("parameter type")),
                }
                if self.at_punct(Punct::Comma) {
                    self.advance();
                } else if self.at_punct(Punct::RParen) {
                    self.advance();
                    break;
                } else {
                    return Err(self.error_here("`)` or `,` in parameter list"));
                }
            }
        }
        self.expect_keyword(Keyword::From)?;
        let role = self.role_ref()?;
        let mut triggers = Vec::new();
        if self.at_punct(Punct::LBrace) {
            self.advance();
            while !self.at_punct(Punct::RBrace) {
                if self.peek().is_none() {
                    return Err(self.error_here("`}` closing the trigger block"));
                }
                match self.trigger() {
                    Ok(t) => triggers.push(t),
                    Err(Reported) => self.synchronize(),
                }
            }
            self.advance();
        }
        self.expect_punct(Punct::Semi)?;
        Ok(Interaction { endpoint, params, role, triggers })
    }

    fn trigger(&mut self) -> PResult<TriggerDecl> {
        let start = self.peek().map_or(self.eof, |t| t.span);
        let kind = match self.peek_kind() {
            Some(TokenKind::Keyword(Keyword::Funds)) => TriggerKind::Funds,
            Some(TokenKind::Keyword(Keyword::Slot)) => TriggerKind::Slot,
            _ => return Err(self.error_here("`funds` or `slot` trigger")),
        };
        self.advance();
        self.expect_keyword(Keyword::Trigger)?;
        let (target, condition) = if self.at_punct(Punct::LParen) {
            self.advance();
            let subject = match self.peek_kind() {
                Some(TokenKind::Keyword(Keyword::Slot)) => TriggerKind::Slot,
                Some(TokenKind::Keyword(Keyword::Funds)) => TriggerKind::Funds,
                _ => return Err(self.error_here("`slot` or `funds` in trigger condition")),
            };
            self.advance();
            self.expect_punct(Punct::EqEq)?;
            let value = match self.peek_kind() {
                Some(TokenKind::Int(v)) => {
                    self.advance();
                    v
                }
                _ => return Err(self.error_here("integer literal")),
            };
            self.expect_punct(Punct::Comma)?;
            let target = self.expect_ident("interrupt endpoint name")?;
            self.expect_punct(Punct::RParen)?;
            (target, Some(TriggerCondition { subject, value }))
        } else {
            (self.expect_ident("interrupt endpoint name")?, None)
        };
        let end = self.expect_punct(Punct::Semi)?;
        let span = Span::new(start.line, start.column, start.offset, end.end() - start.offset);
        Ok(TriggerDecl { kind, target, condition, span })
    }

    fn choice(&mut self) -> PResult<Choice> {
        let span = self.expect_keyword(Keyword::Choice)?;
        self.expect_keyword(Keyword::At)?;
        let at = self.role_ref()?;
        self.expect_punct(Punct::LBrace)?;
        let mut branches = Vec::new();
        while !self.at_punct(Punct::RBrace) {
            if self.peek().is_none() {
                return Err(self.error_here("`}` closing the choice"));
            }
            match self.branch() {
                Ok(b) => branches.push(b),
                Err(Reported) => self.synchronize(),
            }
        }
        self.advance();
        Ok(Choice { at, branches, span })
    }

    fn branch(&mut self) -> PResult<Branch> {
        let label = self.expect_ident("branch label")?;
        self.expect_punct(Punct::Colon)?;
        let body = self.braced_block()?;
        Ok(Branch { label, body })
    }

    fn rec(&mut self) -> PResult<Rec> {
        self.expect_keyword(Keyword::Rec)?;
        let label = self.expect_ident("recursion label")?;
        let body = self.braced_block()?;
        Ok(Rec { label, body })
    }

    fn do_interrupt(&mut self) -> PResult<DoInterrupt> {
        let span = self.expect_keyword(Keyword::Do)?;
        let body = self.braced_block()?;
        self.expect_keyword(Keyword::Interrupt)?;
        self.expect_punct(Punct::LBrace)?;
        let handler = self.interaction()?;
        self.expect_punct(Punct::RBrace)?;
        Ok(DoInterrupt { body, handler, span })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const GUESSING_GAME: &str = include_str!("../../../protocols/guessing_game.psc");
    const CROWDFUNDING: &str = include_str!("../../../protocols/crowdfunding.psc");

    fn interact(name: &str, params: Vec<BaseType>, role: &str) -> Interaction {
        Interaction::new(name, params, role)
    }

    fn trig(kind: TriggerKind, target: &str) -> TriggerDecl {
        TriggerDecl { kind, target: Spanned::bare(target.into()), condition: None, span: Span::DUMMY }
    }

    #[test]
    fn guessing_game_tree() {
        use BaseType::*;
        let decl = parse_protocol(GUESSING_GAME).unwrap();
        let mut lock = interact("lock", vec![String, Value], "Owner");
        lock.triggers = vec![trig(TriggerKind::Funds, "closeGame"), trig(TriggerKind::Slot, "closeGame")];
        let expected = ProtocolDecl {
            name: Spanned::bare("GuessingGame".into()),
            roles: vec![Spanned::bare(RoleName::new("Owner")), Spanned::bare(RoleName::new("Player"))],
            fields: vec![Spanned::bare(HashedString)],
            body: vec![
                ProtocolItem::Interact(lock),
                ProtocolItem::DoInterrupt(DoInterrupt {
                    body: vec![ProtocolItem::Rec(Rec {
                        label: Spanned::bare("Loop".into()),
                        body: vec![
                            ProtocolItem::Interact(interact("guess", vec![String], "Player")),
                            ProtocolItem::Continue(Spanned::bare("Loop".into())),
                        ],
                    })],
                    handler: interact("closeGame", vec![], "Contract"),
                    span: Span::DUMMY,
                }),
            ],
        };
        assert_eq!(decl, expected);
    }

    #[test]
    fn crowdfunding_choice() {
        let decl = parse_protocol(CROWDFUNDING).unwrap();
        let ProtocolItem::Rec(rec) = &decl.body[1] else { panic!("expected rec") };
        let ProtocolItem::Choice(choice) = &rec.body[0] else { panic!("expected choice") };
        assert_eq!(choice.at.node.as_str(), "Owner");
        assert_eq!(choice.branches.len(), 2);
        assert_eq!(choice.branches[0].label.node, "continue");
        assert_eq!(
            choice.branches[0].body,
            vec![
                ProtocolItem::Interact(interact("contribute", vec![BaseType::Value], "Contributor")),
                ProtocolItem::Continue(Spanned::bare("Loop".into())),
            ]
        );
        assert_eq!(choice.branches[1].label.node, "closeCrowdfund");
        assert!(choice.branches[1].body.is_empty());
    }

    #[test]
    fn missing_paren_in_parameter_list() {
        let src = "protocol P (role A) { lock (String from A; }";
        let diags = parse_protocol(src).unwrap_err();
        assert_eq!(diags.len(), 1);
        let d = &diags[0];
        assert_eq!(d.code, DiagCode::UnexpectedToken);
        assert!(d.message.contains("`)` or `,` in parameter list"), "{}", d.message);
        let span = d.span.unwrap();
        assert_eq!(&src[span.offset..span.end()], "from");
    }

    #[test]
    fn recovers_and_reports_multiple_errors() {
        let src = "protocol P (role A) {\n  a (Strin) from A;\n  b () frm A;\n  c () from A;\n}\n";
        let diags = parse_protocol(src).unwrap_err();
        assert_eq!(diags.len(), 2, "{:?}", diags);
        assert_eq!(diags[0].span.unwrap().line, 2);
        assert_eq!(diags[1].span.unwrap().line, 3);
    }

    #[test]
    fn recovers_inside_nested_blocks() {
        let src = "protocol P (role A) {\n rec L {\n  x ( from A;\n  L;\n }\n y (,) from A;\n}\n";
        let diags = parse_protocol(src).unwrap_err();
        assert_eq!(diags.len(), 2, "{:?}", diags);
    }

    #[test]
    fn conditional_trigger() {
        let src = "protocol P (role A) { f () from A { slot trigger (slot == 10, h); }; do { g () from A; } interrupt { h () from Contract; } }";
        let decl = parse_protocol(src).unwrap();
        let ProtocolItem::Interact(f) = &decl.body[0] else { panic!() };
        assert_eq!(f.triggers[0].condition, Some(TriggerCondition { subject: TriggerKind::Slot, value: 10 }));
    }

    #[test]
    fn trigger_block_requires_trailing_semicolon() {
        let src = "protocol P (role A) { f () from A { slot trigger h; } }";
        assert!(parse_protocol(src).is_err());
    }

    #[test]
    fn eof_diagnostic_within_bounds() {
        let src = "protocol P (role A) {\n  f () from A;";
        let diags = parse_protocol(src).unwrap_err();
        assert_eq!(diags[0].code, DiagCode::UnexpectedEof);
        assert!(diags[0].span.unwrap().end() <= src.len());
    }

    #[test]
    fn rejects_trailing_protocol() {
        let src = "protocol P () {} protocol Q () {}";
        assert!(parse_protocol(src).is_err());
    }

    #[test]
    fn nesting_limit() {
        let mut src = String::from("protocol P (role A) {");
        for i in 0..200 {
            src.push_str(&format!("rec L{} {{", i));
        }
        for _ in 0..200 {
            src.push('}');
        }
        src.push('}');
        let diags = parse_protocol(&src).unwrap_err();
        assert!(diags.iter().any(|d| d.code == DiagCode::NestingTooDeep));
    }

    #[test]
    fn field_after_item_is_rejected() {
        let src = "protocol P (role A) { f () from A; field Value; }";
        let diags = parse_protocol(src).unwrap_err();
        assert_eq!(diags.len(), 1);
    }
}
