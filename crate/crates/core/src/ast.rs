//! Syntax tree of the protocol language.
//!
//! Trees are plain immutable values. Every name carries the [`Span`] it was
//! parsed from; spans are ignored by `==`, so a tree built by hand compares
//! equal to the same tree produced by the parser.

use std::fmt;

use crate::diagnostic::Span;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BaseType {
    String,
    HashedString,
    PubKeyHash,
    Value,
    Token,
}

impl BaseType {
    pub const ALL: [BaseType; 5] =
        [BaseType::String, BaseType::HashedString, BaseType::PubKeyHash, BaseType::Value, BaseType::Token];

    pub fn keyword(self) -> &'static str {
        match self {
            BaseType::String => "String",
            BaseType::HashedString => "HashedString",
            BaseType::PubKeyHash => "PubKeyHash",
            BaseType::Value => "Value",
            BaseType::Token => "Token",
        }
    }

    pub fn from_keyword(s: &str) -> Option<BaseType> {
        BaseType::ALL.into_iter().find(|t| t.keyword() == s)
    }
}

impl fmt::Display for BaseType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

/// A role name. `Contract` is the reserved role of automatic interactions.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RoleName(String);

impl RoleName {
    pub const CONTRACT: &'static str = "Contract";

    pub fn new(name: impl Into<String>) -> Self {
        RoleName(name.into())
    }

    pub fn contract() -> Self {
        RoleName(Self::CONTRACT.to_string())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn is_contract(&self) -> bool {
        self.0 == Self::CONTRACT
    }
}

impl fmt::Display for RoleName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Spanned<T> {
    pub node: T,
    pub span: Span,
}

impl<T> Spanned<T> {
    pub fn new(node: T, span: Span) -> Self {
        Spanned { node, span }
    }

    pub fn bare(node: T) -> Self {
        Spanned { node, span: Span::DUMMY }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TriggerKind {
    Funds,
    Slot,
}

impl TriggerKind {
    pub fn keyword(self) -> &'static str {
        match self {
            TriggerKind::Funds => "funds",
            TriggerKind::Slot => "slot",
        }
    }

    /// Suffix of the generated hook name, e.g. `lockFundTrigger`.
    pub fn hook_suffix(self) -> &'static str {
        match self {
            TriggerKind::Funds => "FundTrigger",
            TriggerKind::Slot => "SlotTrigger",
        }
    }
}

/// `subject == value` inside a parenthesized trigger.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TriggerCondition {
    pub subject: TriggerKind,
    pub value: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TriggerDecl {
    pub kind: TriggerKind,
    pub target: Spanned<String>,
    pub condition: Option<TriggerCondition>,
    pub span: Span,
}

impl TriggerDecl {
    pub fn hook_name(&self, endpoint: &str) -> String {
        format!("{}{}", endpoint, self.kind.hook_suffix())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interaction {
    pub endpoint: Spanned<String>,
    pub params: Vec<BaseType>,
    pub role: Spanned<RoleName>,
    pub triggers: Vec<TriggerDecl>,
}

impl Interaction {
    pub fn new(endpoint: &str, params: Vec<BaseType>, role: &str) -> Self {
        Interaction {
            endpoint: Spanned::bare(endpoint.to_string()),
            params,
            role: Spanned::bare(RoleName::new(role)),
            triggers: Vec::new(),
        }
    }

    pub fn name(&self) -> &str {
        &self.endpoint.node
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Branch {
    pub label: Spanned<String>,
    pub body: Vec<ProtocolItem>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Choice {
    pub at: Spanned<RoleName>,
    pub branches: Vec<Branch>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rec {
    pub label: Spanned<String>,
    pub body: Vec<ProtocolItem>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DoInterrupt {
    pub body: Vec<ProtocolItem>,
    pub handler: Interaction,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProtocolItem {
    Interact(Interaction),
    Choice(Choice),
    Rec(Rec),
    Continue(Spanned<String>),
    DoInterrupt(DoInterrupt),
}

impl ProtocolItem {
    pub fn span(&self) -> Span {
        match self {
            ProtocolItem::Interact(i) => i.endpoint.span,
            ProtocolItem::Choice(c) => c.span,
            ProtocolItem::Rec(r) => r.label.span,
            ProtocolItem::Continue(l) => l.span,
            ProtocolItem::DoInterrupt(d) => d.span,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProtocolDecl {
    pub name: Spanned<String>,
    pub roles: Vec<Spanned<RoleName>>,
    /// Declared fields only; the implicit funds field is not listed.
    pub fields: Vec<Spanned<BaseType>>,
    pub body: Vec<ProtocolItem>,
}

impl ProtocolDecl {
    pub fn role_names(&self) -> impl Iterator<Item = &RoleName> {
        self.roles.iter().map(|r| &r.node)
    }

    pub fn field_types(&self) -> Vec<BaseType> {
        self.fields.iter().map(|f| f.node).collect()
    }

    /// Declared fields followed by the implicit funds field.
    pub fn state_signature(&self) -> Vec<BaseType> {
        let mut sig = self.field_types();
        sig.push(BaseType::Value);
        sig
    }

    /// Every interaction in source order, interrupt handlers included.
    pub fn interactions(&self) -> Vec<&Interaction> {
        let mut out = Vec::new();
        collect_interactions(&self.body, &mut out);
        out
    }

    /// Every choice branch label in source order, with the role that picks it.
    pub fn choice_labels(&self) -> Vec<(&Spanned<String>, &RoleName)> {
        let mut out = Vec::new();
        collect_labels(&self.body, &mut out);
        out
    }

    /// Handlers of all `do ... interrupt` blocks.
    pub fn interrupt_handlers(&self) -> Vec<&Interaction> {
        let mut out = Vec::new();
        collect_handlers(&self.body, &mut out);
        out
    }
}

fn collect_interactions<'a>(items: &'a [ProtocolItem], out: &mut Vec<&'a Interaction>) {
    for item in items {
        match item {
            ProtocolItem::Interact(i) => out.push(i),
            ProtocolItem::Choice(c) => {
                for b in &c.branches {
                    collect_interactions(&b.body, out);
                }
            }
            ProtocolItem::Rec(r) => collect_interactions(&r.body, out),
            ProtocolItem::Continue(_) => {}
            ProtocolItem::DoInterrupt(d) => {
                collect_interactions(&d.body, out);
                out.push(&d.handler);
            }
        }
    }
}

fn collect_labels<'a>(items: &'a [ProtocolItem], out: &mut Vec<(&'a Spanned<String>, &'a RoleName)>) {
    for item in items {
        match item {
            ProtocolItem::Choice(c) => {
                for b in &c.branches {
                    out.push((&b.label, &c.at.node));
                    collect_labels(&b.body, out);
                }
            }
            ProtocolItem::Rec(r) => collect_labels(&r.body, out),
            ProtocolItem::DoInterrupt(d) => collect_labels(&d.body, out),
            ProtocolItem::Interact(_) | ProtocolItem::Continue(_) => {}
        }
    }
}

fn collect_handlers<'a>(items: &'a [ProtocolItem], out: &mut Vec<&'a Interaction>) {
    for item in items {
        match item {
            ProtocolItem::Choice(c) => {
                for b in &c.branches {
                    collect_handlers(&b.body, out);
                }
            }
            ProtocolItem::Rec(r) => collect_handlers(&r.body, out),
            ProtocolItem::DoInterrupt(d) => {
                collect_handlers(&d.body, out);
                out.push(&d.handler);
            }
            ProtocolItem::Interact(_) | ProtocolItem::Continue(_) => {}
        }
    }
}

// Canonical pretty-printer. Parsing its output yields an equal tree.

const INDENT: &str = "  ";

impl fmt::Display for ProtocolDecl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "protocol {} (", self.name.node)?;
        for (i, role) in self.roles.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "role {}", role.node)?;
        }
        f.write_str(") {\n")?;
        if !self.fields.is_empty() {
            f.write_str(INDENT)?;
            f.write_str("field ")?;
            write_types(f, self.fields.iter().map(|t| t.node))?;
            f.write_str(";\n")?;
        }
        write_block(f, &self.body, 1)?;
        f.write_str("}\n")
    }
}

fn write_types(f: &mut fmt::Formatter<'_>, types: impl Iterator<Item = BaseType>) -> fmt::Result {
    for (i, t) in types.enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        f.write_str(t.keyword())?;
    }
    Ok(())
}

fn pad(f: &mut fmt::Formatter<'_>, depth: usize) -> fmt::Result {
    for _ in 0..depth {
        f.write_str(INDENT)?;
    }
    Ok(())
}

fn write_block(f: &mut fmt::Formatter<'_>, items: &[ProtocolItem], depth: usize) -> fmt::Result {
    for item in items {
        write_item(f, item, depth)?;
    }
    Ok(())
}

fn write_interaction(f: &mut fmt::Formatter<'_>, i: &Interaction, depth: usize) -> fmt::Result {
    pad(f, depth)?;
    write!(f, "{} (", i.endpoint.node)?;
    write_types(f, i.params.iter().copied())?;
    write!(f, ") from {}", i.role.node)?;
    if i.triggers.is_empty() {
        return f.write_str(";\n");
    }
    f.write_str(" {\n")?;
    for t in &i.triggers {
        pad(f, depth + 1)?;
        match t.condition {
            None => writeln!(f, "{} trigger {};", t.kind.keyword(), t.target.node)?,
            Some(c) => writeln!(
                f,
                "{} trigger ({} == {}, {});",
                t.kind.keyword(),
                c.subject.keyword(),
                c.value,
                t.target.node
            )?,
        }
    }
    pad(f, depth)?;
    f.write_str("};\n")
}

fn write_item(f: &mut fmt::Formatter<'_>, item: &ProtocolItem, depth: usize) -> fmt::Result {
    match item {
        ProtocolItem::Interact(i) => write_interaction(f, i, depth),
        ProtocolItem::Choice(c) => {
            pad(f, depth)?;
            writeln!(f, "choice at {} {{", c.at.node)?;
            for b in &c.branches {
                pad(f, depth + 1)?;
                writeln!(f, "{}: {{", b.label.node)?;
                write_block(f, &b.body, depth + 2)?;
                pad(f, depth + 1)?;
                f.write_str("}\n")?;
            }
            pad(f, depth)?;
            f.write_str("}\n")
        }
        ProtocolItem::Rec(r) => {
            pad(f, depth)?;
            writeln!(f, "rec {} {{", r.label.node)?;
            write_block(f, &r.body, depth + 1)?;
            pad(f, depth)?;
            f.write_str("}\n")
        }
        ProtocolItem::Continue(label) => {
            pad(f, depth)?;
            writeln!(f, "{};", label.node)
        }
        ProtocolItem::DoInterrupt(d) => {
            pad(f, depth)?;
            f.write_str("do {\n")?;
            write_block(f, &d.body, depth + 1)?;
            pad(f, depth)?;
            f.write_str("}\n")?;
            pad(f, depth)?;
            f.write_str("interrupt {\n")?;
            write_interaction(f, &d.handler, depth + 1)?;
            pad(f, depth)?;
            f.write_str("}\n")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn signature_appends_funds() {
        let decl = ProtocolDecl {
            name: Spanned::bare("P".into()),
            roles: vec![],
            fields: vec![Spanned::bare(BaseType::PubKeyHash), Spanned::bare(BaseType::Value)],
            body: vec![],
        };
        assert_eq!(decl.state_signature(), vec![BaseType::PubKeyHash, BaseType::Value, BaseType::Value]);
    }

    #[test]
    fn pretty_prints_empty_protocol() {
        let decl = ProtocolDecl { name: Spanned::bare("Empty".into()), roles: vec![], fields: vec![], body: vec![] };
        assert_eq!(decl.to_string(), "protocol Empty () {\n}\n");
    }

    #[test]
    fn hook_names() {
        let t = TriggerDecl {
            kind: TriggerKind::Funds,
            target: Spanned::bare("closeGame".into()),
            condition: None,
            span: Span::DUMMY,
        };
        assert_eq!(t.hook_name("lock"), "lockFundTrigger");
    }
}
