use std::fmt;

/// Location of a fragment of source text.
///
/// `line` and `column` are 1-based; `offset` and `len` are in bytes.
/// Spans never take part in AST equality: two trees that differ only in
/// where they were parsed from compare equal. Use [`Span::same_location`]
/// when positions matter.
#[derive(Clone, Copy, Debug, Default, Eq)]
pub struct Span {
    pub line: u32,
    pub column: u32,
    pub offset: usize,
    pub len: usize,
}

impl PartialEq for Span {
    fn eq(&self, _other: &Self) -> bool {
        true
    }
}

impl Span {
    pub const DUMMY: Span = Span { line: 0, column: 0, offset: 0, len: 0 };

    pub fn new(line: u32, column: u32, offset: usize, len: usize) -> Self {
        Span { line, column, offset, len }
    }

    pub fn end(&self) -> usize {
        self.offset + self.len
    }

    pub fn same_location(&self, other: &Span) -> bool {
        (self.line, self.column, self.offset, self.len) == (other.line, other.column, other.offset, other.len)
    }
}

/// Closed set of diagnostic codes.
///
/// `E0xx` are lexical, `E1xx` syntactic, `V0xx` well-formedness and `S0xx`
/// scenario errors. Codes are stable; messages are not.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DiagCode {
    UnexpectedCharacter,
    IntegerOutOfRange,
    UnexpectedToken,
    UnexpectedEof,
    NestingTooDeep,
    UndeclaredRole,
    UnboundLabel,
    DuplicateChoiceLabel,
    DuplicateEndpoint,
    UnknownTriggerTarget,
    ReservedRole,
    ShadowedLabel,
    TooFewBranches,
    UnreachableItem,
    HandlerNotContract,
    HandlerHasParams,
    ContractOutsideInterrupt,
    InvalidTriggerCondition,
    LabelCrossesInterrupt,
    DuplicateRole,
    HandlerHasTriggers,
    DuplicateTrigger,
    MalformedScenario,
    UnknownWallet,
    UnknownEndpoint,
    ArityMismatch,
    LiteralType,
    DuplicateKey,
    InvalidWait,
}

impl DiagCode {
    pub const ALL: [DiagCode; 29] = [
        DiagCode::UnexpectedCharacter,
        DiagCode::IntegerOutOfRange,
        DiagCode::UnexpectedToken,
        DiagCode::UnexpectedEof,
        DiagCode::NestingTooDeep,
        DiagCode::UndeclaredRole,
        DiagCode::UnboundLabel,
        DiagCode::DuplicateChoiceLabel,
        DiagCode::DuplicateEndpoint,
        DiagCode::UnknownTriggerTarget,
        DiagCode::ReservedRole,
        DiagCode::ShadowedLabel,
        DiagCode::TooFewBranches,
        DiagCode::UnreachableItem,
        DiagCode::HandlerNotContract,
        DiagCode::HandlerHasParams,
        DiagCode::ContractOutsideInterrupt,
        DiagCode::InvalidTriggerCondition,
        DiagCode::LabelCrossesInterrupt,
        DiagCode::DuplicateRole,
        DiagCode::HandlerHasTriggers,
        DiagCode::DuplicateTrigger,
        DiagCode::MalformedScenario,
        DiagCode::UnknownWallet,
        DiagCode::UnknownEndpoint,
        DiagCode::ArityMismatch,
        DiagCode::LiteralType,
        DiagCode::DuplicateKey,
        DiagCode::InvalidWait,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            DiagCode::UnexpectedCharacter => "E001",
            DiagCode::IntegerOutOfRange => "E002",
            DiagCode::UnexpectedToken => "E101",
            DiagCode::UnexpectedEof => "E102",
            DiagCode::NestingTooDeep => "E103",
            DiagCode::UndeclaredRole => "V001",
            DiagCode::UnboundLabel => "V002",
            DiagCode::DuplicateChoiceLabel => "V003",
            DiagCode::DuplicateEndpoint => "V004",
            DiagCode::UnknownTriggerTarget => "V005",
            DiagCode::ReservedRole => "V006",
            DiagCode::ShadowedLabel => "V007",
            DiagCode::TooFewBranches => "V008",
            DiagCode::UnreachableItem => "V009",
            DiagCode::HandlerNotContract => "V010",
            DiagCode::HandlerHasParams => "V011",
            DiagCode::ContractOutsideInterrupt => "V012",
            DiagCode::InvalidTriggerCondition => "V013",
            DiagCode::LabelCrossesInterrupt => "V014",
            DiagCode::DuplicateRole => "V015",
            DiagCode::HandlerHasTriggers => "V016",
            DiagCode::DuplicateTrigger => "V017",
            DiagCode::MalformedScenario => "S001",
            DiagCode::UnknownWallet => "S002",
            DiagCode::UnknownEndpoint => "S003",
            DiagCode::ArityMismatch => "S004",
            DiagCode::LiteralType => "S005",
            DiagCode::DuplicateKey => "S006",
            DiagCode::InvalidWait => "S007",
        }
    }
}

impl fmt::Display for DiagCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub code: DiagCode,
    pub message: String,
    /// Absent only for scenario errors that serde cannot position.
    pub span: Option<Span>,
}

impl Diagnostic {
    pub fn new(code: DiagCode, message: impl Into<String>, span: Span) -> Self {
        Diagnostic { code, message: message.into(), span: Some(span) }
    }

    pub fn unpositioned(code: DiagCode, message: impl Into<String>) -> Self {
        Diagnostic { code, message: message.into(), span: None }
    }

    /// Renders as `file:line:col: code: message`.
    pub fn render(&self, file: &str) -> String {
        match self.span {
            Some(span) => format!("{}:{}:{}: {}: {}", file, span.line, span.column, self.code, self.message),
            None => format!("{}: {}: {}", file, self.code, self.message),
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.span {
            Some(span) => write!(f, "{}:{}: {}: {}", span.line, span.column, self.code, self.message),
            None => write!(f, "{}: {}", self.code, self.message),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn codes_are_unique() {
        let codes: HashSet<_> = DiagCode::ALL.iter().map(|c| c.as_str()).collect();
        assert_eq!(codes.len(), DiagCode::ALL.len());
    }

    #[test]
    fn render_format() {
        let d = Diagnostic::new(DiagCode::UnboundLabel, "unbound label `Loap`", Span::new(6, 5, 80, 4));
        assert_eq!(d.render("p.psc"), "p.psc:6:5: V002: unbound label `Loap`");
        let u = Diagnostic::unpositioned(DiagCode::UnknownWallet, "nope");
        assert_eq!(u.render("s.json"), "s.json: S002: nope");
    }

    #[test]
    fn span_equality_ignores_position() {
        let a = Span::new(1, 1, 0, 3);
        let b = Span::new(9, 2, 40, 1);
        assert_eq!(a, b);
        assert!(!a.same_location(&b));
    }
}
