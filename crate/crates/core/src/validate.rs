//! Well-formedness rules the grammar alone cannot express.

use std::collections::{BTreeMap, BTreeSet};

use crate::ast::*;
use crate::diagnostic::{DiagCode, Diagnostic, Span};

/// Returns every violation found in `decl`; an empty list means the
/// protocol is well formed and can be translated to an automaton.
pub fn validate(decl: &ProtocolDecl) -> Vec<Diagnostic> {
    let mut v = Validator {
        diags: Vec::new(),
        roles: BTreeSet::new(),
        endpoints: BTreeMap::new(),
        interrupts: decl.interrupt_handlers().iter().map(|h| h.name().to_string()).collect(),
        scope: Vec::new(),
    };
    for role in &decl.roles {
        if role.node.is_contract() {
            v.push(
                DiagCode::ReservedRole,
                "`Contract` is a reserved role and cannot be declared".to_string(),
                role.span,
            );
        } else if !v.roles.insert(role.node.clone()) {
            v.push(DiagCode::DuplicateRole, format!("role `{}` declared twice", role.node), role.span);
        }
    }
    v.block(&decl.body, 0);
    v.diags
}

/// Whether control can leave `item` other than through a `Label;` jump.
pub fn falls_through(item: &ProtocolItem) -> bool {
    match item {
        ProtocolItem::Interact(_) | ProtocolItem::DoInterrupt(_) => true,
        ProtocolItem::Continue(_) => false,
        ProtocolItem::Choice(c) => c.branches.iter().any(|b| block_falls_through(&b.body)),
        ProtocolItem::Rec(r) => block_falls_through(&r.body),
    }
}

pub fn block_falls_through(items: &[ProtocolItem]) -> bool {
    items.iter().all(falls_through)
}

struct Validator {
    diags: Vec<Diagnostic>,
    roles: BTreeSet<RoleName>,
    endpoints: BTreeMap<String, Span>,
    interrupts: BTreeSet<String>,
    /// Enclosing `rec` labels with the `do` depth they were bound at.
    scope: Vec<(String, usize)>,
}

impl Validator {
    fn push(&mut self, code: DiagCode, message: String, span: Span) {
        self.diags.push(Diagnostic::new(code, message, span));
    }

    fn register_endpoint(&mut self, name: &Spanned<String>) {
        if self.endpoints.contains_key(&name.node) {
            self.push(
                DiagCode::DuplicateEndpoint,
                format!("endpoint `{}` is declared more than once", name.node),
                name.span,
            );
        } else {
            self.endpoints.insert(name.node.clone(), name.span);
        }
    }

    fn check_user_role(&mut self, role: &Spanned<RoleName>) {
        if role.node.is_contract() {
            self.push(
                DiagCode::ContractOutsideInterrupt,
                "role `Contract` may only sign interrupt handlers".to_string(),
                role.span,
            );
        } else if !self.roles.contains(&role.node) {
            self.push(DiagCode::UndeclaredRole, format!("role `{}` is not declared", role.node), role.span);
        }
    }

    fn block(&mut self, items: &[ProtocolItem], do_depth: usize) {
        let mut reported_unreachable = false;
        for (i, item) in items.iter().enumerate() {
            if i > 0 && !falls_through(&items[i - 1]) && !reported_unreachable {
                self.push(
                    DiagCode::UnreachableItem,
                    "item can never be reached; nothing may follow a recursion jump".to_string(),
                    item.span(),
                );
                reported_unreachable = true;
            }
            self.item(item, do_depth);
        }
    }

    fn interaction(&mut self, i: &Interaction) {
        self.register_endpoint(&i.endpoint);
        self.check_user_role(&i.role);
        for (n, t) in i.triggers.iter().enumerate() {
            if i.triggers[..n].iter().any(|u| u.kind == t.kind) {
                self.push(
                    DiagCode::DuplicateTrigger,
                    format!("`{}` declares more than one {} trigger", i.name(), t.kind.keyword()),
                    t.span,
                );
            }
            if !self.interrupts.contains(&t.target.node) {
                self.push(
                    DiagCode::UnknownTriggerTarget,
                    format!("trigger targets `{}`, which is not an interrupt endpoint", t.target.node),
                    t.target.span,
                );
            }
            if let Some(c) = t.condition {
                if t.kind != TriggerKind::Slot || c.subject != TriggerKind::Slot {
                    self.push(
                        DiagCode::InvalidTriggerCondition,
                        "only slot triggers take a condition, of the form `slot == N`".to_string(),
                        t.span,
                    );
                }
            }
        }
    }

    fn item(&mut self, item: &ProtocolItem, do_depth: usize) {
        match item {
            ProtocolItem::Interact(i) => self.interaction(i),
            ProtocolItem::Choice(c) => {
                self.check_user_role(&c.at);
                if c.branches.len() < 2 {
                    self.push(
                        DiagCode::TooFewBranches,
                        format!("choice needs at least two branches, found {}", c.branches.len()),
                        c.span,
                    );
                }
                let mut seen = BTreeSet::new();
                for b in &c.branches {
                    if !seen.insert(b.label.node.as_str()) {
                        self.push(
                            DiagCode::DuplicateChoiceLabel,
                            format!("choice label `{}` appears twice", b.label.node),
                            b.label.span,
                        );
                    } else {
                        self.register_endpoint(&b.label);
                    }
                    self.block(&b.body, do_depth);
                }
            }
            ProtocolItem::Rec(r) => {
                if self.scope.iter().any(|(l, _)| *l == r.label.node) {
                    self.push(
                        DiagCode::ShadowedLabel,
                        format!("recursion label `{}` shadows an enclosing label", r.label.node),
                        r.label.span,
                    );
                }
                self.scope.push((r.label.node.clone(), do_depth));
                self.block(&r.body, do_depth);
                self.scope.pop();
            }
            ProtocolItem::Continue(label) => match self.scope.iter().rev().find(|(l, _)| *l == label.node) {
                None => self.push(
                    DiagCode::UnboundLabel,
                    format!("recursion label `{}` is not bound by an enclosing `rec`", label.node),
                    label.span,
                ),
                Some((_, depth)) if *depth != do_depth => self.push(
                    DiagCode::LabelCrossesInterrupt,
                    format!("`{};` jumps out of a `do` block", label.node),
                    label.span,
                ),
                Some(_) => {}
            },
            ProtocolItem::DoInterrupt(d) => {
                self.block(&d.body, do_depth + 1);
                let h = &d.handler;
                self.register_endpoint(&h.endpoint);
                if !h.role.node.is_contract() {
                    self.push(
                        DiagCode::HandlerNotContract,
                        format!("interrupt handler `{}` must be signed by `Contract`", h.name()),
                        h.role.span,
                    );
                }
                if !h.params.is_empty() {
                    self.push(
                        DiagCode::HandlerHasParams,
                        format!("interrupt handler `{}` takes no parameters", h.name()),
                        h.endpoint.span,
                    );
                }
                if !h.triggers.is_empty() {
                    self.push(
                        DiagCode::HandlerHasTriggers,
                        format!("interrupt handler `{}` cannot declare triggers", h.name()),
                        h.endpoint.span,
                    );
                }
            }
        }
    }
}
