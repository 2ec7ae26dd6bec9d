use proptest::prelude::*;

use psc_core::ast::*;
use psc_core::diagnostic::Span;
use psc_core::{build_automaton, load_scenario, parse_protocol, tokenize, validate};

const LOWER_KEYWORDS: [&str; 12] =
    ["protocol", "role", "field", "choice", "at", "rec", "do", "interrupt", "from", "trigger", "funds", "slot"];

fn ident() -> impl Strategy<Value = String> {
    "[a-z][a-zA-Z0-9_]{0,6}".prop_filter("keyword", |s| !LOWER_KEYWORDS.contains(&s.as_str()))
}

fn role() -> impl Strategy<Value = RoleName> {
    prop_oneof![
        4 => "[A-Z][a-z]{0,5}".prop_filter("keyword", |s| BaseType::from_keyword(s).is_none() && s != "Contract"),
        1 => Just("Contract".to_string()),
    ]
    .prop_map(RoleName::new)
}

fn base_type() -> impl Strategy<Value = BaseType> {
    prop::sample::select(BaseType::ALL.to_vec())
}

fn kind() -> impl Strategy<Value = TriggerKind> {
    prop_oneof![Just(TriggerKind::Funds), Just(TriggerKind::Slot)]
}

fn trigger() -> impl Strategy<Value = TriggerDecl> {
    (kind(), ident(), prop::option::of((kind(), any::<u64>()))).prop_map(|(kind, target, cond)| TriggerDecl {
        kind,
        target: Spanned::bare(target),
        condition: cond.map(|(subject, value)| TriggerCondition { subject, value }),
        span: Span::DUMMY,
    })
}

fn interaction() -> impl Strategy<Value = Interaction> {
    (ident(), prop::collection::vec(base_type(), 0..3), role(), prop::collection::vec(trigger(), 0..3)).prop_map(
        |(name, params, role, triggers)| Interaction {
            endpoint: Spanned::bare(name),
            params,
            role: Spanned::bare(role),
            triggers,
        },
    )
}

fn item() -> impl Strategy<Value = ProtocolItem> {
    let leaf = prop_oneof![
        3 => interaction().prop_map(ProtocolItem::Interact),
        1 => ident().prop_map(|l| ProtocolItem::Continue(Spanned::bare(l))),
    ];
    leaf.prop_recursive(4, 32, 4, |inner| {
        let block = prop::collection::vec(inner, 0..4);
        prop_oneof![
            (role(), prop::collection::vec((ident(), block.clone()), 0..3)).prop_map(|(at, branches)| {
                ProtocolItem::Choice(Choice {
                    at: Spanned::bare(at),
                    branches: branches
                        .into_iter()
                        .map(|(label, body)| Branch { label: Spanned::bare(label), body })
                        .collect(),
                    span: Span::DUMMY,
                })
            }),
            (ident(), block.clone())
                .prop_map(|(label, body)| ProtocolItem::Rec(Rec { label: Spanned::bare(label), body })),
            (block, interaction()).prop_map(|(body, handler)| ProtocolItem::DoInterrupt(DoInterrupt {
                body,
                handler,
                span: Span::DUMMY
            })),
        ]
    })
}

fn protocol() -> impl Strategy<Value = ProtocolDecl> {
    (
        "[A-Z][A-Za-z]{0,8}".prop_filter("keyword", |s| BaseType::from_keyword(s).is_none() && s != "Contract"),
        prop::collection::vec(role(), 0..3),
        prop::collection::vec(base_type(), 0..3),
        prop::collection::vec(item(), 0..5),
    )
        .prop_map(|(name, roles, fields, body)| ProtocolDecl {
            name: Spanned::bare(name),
            roles: roles.into_iter().map(Spanned::bare).collect(),
            fields: fields.into_iter().map(Spanned::bare).collect(),
            body,
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn pretty_print_round_trips(decl in protocol()) {
        let printed = decl.to_string();
        let reparsed = parse_protocol(&printed).map_err(|d| TestCaseError::fail(format!("{:?}\n{}", d, printed)))?;
        prop_assert_eq!(&reparsed, &decl);
        prop_assert_eq!(reparsed.to_string(), printed);
    }

    #[test]
    fn valid_protocols_build(decl in protocol()) {
        if validate(&decl).is_empty() {
            let a = build_automaton(&decl);
            prop_assert!(a.check_invariants().is_empty(), "{:?}\n{}", a.check_invariants(), decl);
        }
    }

    #[test]
    fn parser_is_total(src in "\\PC{0,200}") {
        let _ = tokenize(&src);
        if let Err(diags) = parse_protocol(&src) {
            prop_assert!(!diags.is_empty());
            for d in diags {
                if let Some(s) = d.span {
                    prop_assert!(s.end() <= src.len());
                }
            }
        }
    }

    #[test]
    fn token_soup_never_panics(words in prop::collection::vec(prop::sample::select(vec![
        "protocol", "P", "(", ")", "{", "}", "role", "A", ",", ";", ":", "field", "Value", "choice", "at",
        "rec", "L", "L;", "do", "interrupt", "from", "Contract", "trigger", "funds", "slot", "==", "3", "f",
    ]), 0..60)) {
        let src = words.join(" ");
        let _ = parse_protocol(&src);
    }

    #[test]
    fn scenario_loader_is_total(src in "\\PC{0,200}") {
        let _ = load_scenario(&src);
    }

    #[test]
    fn reprinting_real_sources_is_stable(idx in 0usize..7) {
        let sources = [
            include_str!("../../../protocols/straight_line_guessing_game.psc"),
            include_str!("../../../protocols/choice_guessing_game.psc"),
            include_str!("../../../protocols/rec_guessing_game.psc"),
            include_str!("../../../protocols/guessing_game.psc"),
            include_str!("../../../protocols/ping_pong.psc"),
            include_str!("../../../protocols/crowdfunding.psc"),
            include_str!("../../../protocols/auction.psc"),
        ];
        let decl = parse_protocol(sources[idx]).unwrap();
        let once = decl.to_string();
        prop_assert_eq!(parse_protocol(&once).unwrap(), decl);
        prop_assert_eq!(parse_protocol(&once).unwrap().to_string(), once);
    }
}

#[test]
fn deep_nesting_is_an_error_not_a_crash() {
    let src = format!("protocol P (role A) {{ {} {} }}", "rec L { ".repeat(500), "} ".repeat(500));
    assert!(parse_protocol(&src).is_err());
}
