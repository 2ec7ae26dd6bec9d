//! Generated artifacts for a protocol: a line-oriented contract manifest and
//! Rust handler stubs for [`crate::logic::HandlerTable`].
//!
//! Manifest layout, one record per line, fields separated by single spaces:
//!
//! ```text
//! protocol GuessingGame
//! role Owner
//! role Player
//! field HashedString
//! endpoint closeGame Contract interrupt - edges 2->3
//! endpoint guess Player user String edges 2->2
//! endpoint lock Owner user String,Value edges 1->2
//! hook lockFundTrigger funds lock closeGame
//! hook lockSlotTrigger slot lock closeGame
//! ```
//!
//! Endpoints are sorted by name and hooks by name. `-` stands for an empty
//! parameter or edge list. A conditional trigger adds a final `slot==N`.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::ast::{BaseType, ProtocolDecl, TriggerKind};
use crate::automaton::{Automaton, EdgeKind};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Manifest {
    pub name: String,
    pub roles: Vec<String>,
    pub fields: Vec<BaseType>,
    pub endpoints: Vec<ManifestEndpoint>,
    pub hooks: Vec<ManifestHook>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ManifestEndpoint {
    pub name: String,
    pub role: String,
    pub kind: EdgeKind,
    pub params: Vec<BaseType>,
    /// `(from, to)` state pairs, ascending.
    pub edges: Vec<(u32, u32)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ManifestHook {
    pub name: String,
    pub kind: TriggerKind,
    /// Interaction that arms the trigger.
    pub endpoint: String,
    /// Interrupt endpoint the trigger runs.
    pub target: String,
    pub slot_condition: Option<u64>,
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("manifest line {line}: {message}")]
pub struct ManifestError {
    pub line: usize,
    pub message: String,
}

impl Manifest {
    pub fn from_protocol(decl: &ProtocolDecl, automaton: &Automaton) -> Manifest {
        let mut endpoints = BTreeMap::new();
        for i in decl.interactions() {
            let kind = if i.role.node.is_contract() { EdgeKind::AutoInterrupt } else { EdgeKind::UserCall };
            endpoints.insert(i.name().to_string(), (i.role.node.to_string(), kind, i.params.clone()));
        }
        for (label, role) in decl.choice_labels() {
            endpoints.insert(label.node.clone(), (role.to_string(), EdgeKind::UserCall, Vec::new()));
        }
        let endpoints = endpoints
            .into_iter()
            .map(|(name, (role, kind, params))| {
                let mut edges: Vec<(u32, u32)> = automaton.edges_for(&name).map(|t| (t.from.0, t.to.0)).collect();
                edges.sort_unstable();
                ManifestEndpoint { name, role, kind, params, edges }
            })
            .collect();
        let mut hooks: Vec<ManifestHook> = decl
            .interactions()
            .into_iter()
            .flat_map(|i| {
                i.triggers.iter().map(move |t| ManifestHook {
                    name: t.hook_name(i.name()),
                    kind: t.kind,
                    endpoint: i.name().to_string(),
                    target: t.target.node.clone(),
                    slot_condition: t.condition.map(|c| c.value),
                })
            })
            .collect();
        hooks.sort_by(|a, b| a.name.cmp(&b.name));
        Manifest {
            name: decl.name.node.clone(),
            roles: decl.role_names().map(|r| r.to_string()).collect(),
            fields: decl.field_types(),
            endpoints,
            hooks,
        }
    }

    pub fn parse(text: &str) -> Result<Manifest, ManifestError> {
        let mut name = None;
        let mut m = Manifest {
            name: String::new(),
            roles: Vec::new(),
            fields: Vec::new(),
            endpoints: Vec::new(),
            hooks: Vec::new(),
        };
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let err = |message: String| ManifestError { line, message };
            let words: Vec<&str> = raw.split(' ').collect();
            match words.as_slice() {
                [""] => continue,
                ["protocol", n] if name.is_none() => name = Some(ident(n).map_err(err)?),
                _ if name.is_none() => return Err(err("expected `protocol <name>` first".into())),
                ["role", r] => m.roles.push(ident(r).map_err(err)?),
                ["field", t] => {
                    m.fields.push(BaseType::from_keyword(t).ok_or_else(|| err(format!("unknown type `{}`", t)))?)
                }
                ["endpoint", n, role, kind, params, "edges", edges] => m.endpoints.push(ManifestEndpoint {
                    name: ident(n).map_err(err)?,
                    role: ident(role).map_err(err)?,
                    kind: EdgeKind::parse(kind).ok_or_else(|| err(format!("unknown edge kind `{}`", kind)))?,
                    params: parse_list(params, |t| BaseType::from_keyword(t).ok_or(format!("unknown type `{}`", t)))
                        .map_err(err)?,
                    edges: parse_list(edges, parse_edge).map_err(err)?,
                }),
                ["hook", n, kind, endpoint, target, cond @ ..] if cond.len() <= 1 => {
                    let kind = match *kind {
                        "funds" => TriggerKind::Funds,
                        "slot" => TriggerKind::Slot,
                        other => return Err(err(format!("unknown trigger kind `{}`", other))),
                    };
                    let slot_condition = match cond {
                        [] => None,
                        [c] => Some(
                            c.strip_prefix("slot==")
                                .and_then(|n| n.parse::<u64>().ok())
                                .ok_or_else(|| err(format!("bad condition `{}`", c)))?,
                        ),
                        _ => unreachable!(),
                    };
                    m.hooks.push(ManifestHook {
                        name: ident(n).map_err(err)?,
                        kind,
                        endpoint: ident(endpoint).map_err(err)?,
                        target: ident(target).map_err(err)?,
                        slot_condition,
                    })
                }
                _ => return Err(err(format!("unrecognised record `{}`", raw))),
            }
        }
        m.name = name.ok_or(ManifestError { line: 0, message: "missing `protocol` line".into() })?;
        Ok(m)
    }

    pub fn endpoint(&self, name: &str) -> Option<&ManifestEndpoint> {
        self.endpoints.iter().find(|e| e.name == name)
    }
}

fn ident(w: &str) -> Result<String, String> {
    let mut chars = w.chars();
    let ok =
        chars.next().is_some_and(|c| c.is_ascii_alphabetic()) && chars.all(|c| c.is_ascii_alphanumeric() || c == '_');
    if ok {
        Ok(w.to_string())
    } else {
        Err(format!("bad identifier `{}`", w))
    }
}

fn parse_list<T>(w: &str, item: impl Fn(&str) -> Result<T, String>) -> Result<Vec<T>, String> {
    if w == "-" {
        return Ok(Vec::new());
    }
    w.split(',').map(item).collect()
}

fn parse_edge(w: &str) -> Result<(u32, u32), String> {
    let bad = || format!("bad edge `{}`", w);
    let (a, b) = w.split_once("->").ok_or_else(bad)?;
    Ok((a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?))
}

fn join_list<T>(items: &[T], f: impl Fn(&T) -> String) -> String {
    if items.is_empty() {
        "-".to_string()
    } else {
        items.iter().map(f).collect::<Vec<_>>().join(",")
    }
}

impl fmt::Display for Manifest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "protocol {}", self.name)?;
        for r in &self.roles {
            writeln!(f, "role {}", r)?;
        }
        for t in &self.fields {
            writeln!(f, "field {}", t)?;
        }
        for e in &self.endpoints {
            writeln!(
                f,
                "endpoint {} {} {} {} edges {}",
                e.name,
                e.role,
                e.kind.as_str(),
                join_list(&e.params, |t| t.keyword().to_string()),
                join_list(&e.edges, |(a, b)| format!("{}->{}", a, b)),
            )?;
        }
        for h in &self.hooks {
            write!(f, "hook {} {} {} {}", h.name, h.kind.keyword(), h.endpoint, h.target)?;
            if let Some(n) = h.slot_condition {
                write!(f, " slot=={}", n)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

pub fn emit_manifest(decl: &ProtocolDecl, automaton: &Automaton) -> String {
    Manifest::from_protocol(decl, automaton).to_string()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum StubKind {
    Endpoint,
    ChoiceLabel,
    TriggerHook,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stub {
    /// Endpoint or hook name as registered in the handler table.
    pub name: String,
    /// Rust function name in the generated file.
    pub function: String,
    pub kind: StubKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StubFile {
    pub source: String,
    pub stubs: Vec<Stub>,
}

impl StubFile {
    pub fn loc(&self) -> usize {
        count_loc(&self.source)
    }
}

/// Non-blank lines.
pub fn count_loc(text: &str) -> usize {
    text.lines().filter(|l| !l.trim().is_empty()).count()
}

/// Snake-case file stem for a protocol name, e.g. `guessing_game`.
pub fn file_stem(protocol: &str) -> String {
    let mut out = String::new();
    let chars: Vec<char> = protocol.chars().collect();
    for (i, &c) in chars.iter().enumerate() {
        if c.is_ascii_uppercase() {
            let prev_lower = i > 0 && (chars[i - 1].is_ascii_lowercase() || chars[i - 1].is_ascii_digit());
            let next_lower = chars.get(i + 1).is_some_and(|n| n.is_ascii_lowercase());
            if i > 0 && (prev_lower || next_lower) && !out.ends_with('_') {
                out.push('_');
            }
            out.push(c.to_ascii_lowercase());
        } else {
            out.push(c);
        }
    }
    out
}

const TABLE_FN: &str = "handler_table";

const RUST_KEYWORDS: &[&str] = &[
    "abstract", "as", "async", "await", "become", "box", "break", "const", "continue", "do", "dyn", "else", "enum",
    "extern", "false", "final", "fn", "for", "gen", "if", "impl", "in", "let", "loop", "macro", "match", "mod", "move",
    "mut", "override", "priv", "pub", "ref", "return", "static", "struct", "trait", "true", "try", "type", "typeof",
    "unsafe", "unsized", "use", "virtual", "where", "while", "yield",
];

fn rust_fn_name(name: &str) -> String {
    match name {
        "self" | "Self" | "super" | "crate" | TABLE_FN => format!("{}_", name),
        n if RUST_KEYWORDS.contains(&n) => format!("r#{}", n),
        n => n.to_string(),
    }
}

/// Function name for `name` that no earlier stub uses; an endpoint may
/// itself be called like another endpoint's trigger hook.
fn unique_fn(name: &str, taken: &[Stub]) -> String {
    let mut func = rust_fn_name(name);
    while taken.iter().any(|s| s.function == func) {
        func.push('_');
    }
    func
}

fn param_list(params: &[BaseType]) -> String {
    params.iter().map(|t| t.keyword()).collect::<Vec<_>>().join(", ")
}

/// Handler stubs for every endpoint, choice label and trigger of `decl`,
/// plus a `handler_table()` function registering them all. The generated
/// module compiles against this crate as is; every stub keeps the state
/// unchanged until filled in.
pub fn emit_stubs(decl: &ProtocolDecl) -> StubFile {
    let name = &decl.name.node;
    let sig = decl.state_signature();
    let mut out = String::new();
    let mut stubs = Vec::new();

    let _ = writeln!(out, "//! Business logic for protocol `{}`.", name);
    let _ = writeln!(out, "//!");
    let roles: Vec<String> = decl.role_names().map(|r| r.to_string()).collect();
    if roles.is_empty() {
        let _ = writeln!(out, "//! Roles: none.");
    } else {
        let _ = writeln!(out, "//! Roles: {}.", roles.join(", "));
    }
    let _ = writeln!(out, "//! State contents: ({}). The last value is the funds held by", param_list(&sig));
    let _ = writeln!(out, "//! the contract.");
    let _ = writeln!(out, "//!");
    let _ = writeln!(out, "//! A handler returns `HandlerResult::NewState` with the contents of the");
    let _ = writeln!(out, "//! next state, or `HandlerResult::Err` to refuse the call, in which case");
    let _ = writeln!(out, "//! nothing changes. Raising the funds value charges the caller the");
    let _ = writeln!(out, "//! difference; lowering it pays the difference to the caller.");
    let _ = writeln!(out);
    let _ = writeln!(out, "#![allow(non_snake_case)]");
    let _ = writeln!(out);

    let interactions = decl.interactions();
    let labels = decl.choice_labels();
    let has_triggers = interactions.iter().any(|i| !i.triggers.is_empty());
    let has_handlers = !interactions.is_empty() || !labels.is_empty();
    let mut imports = Vec::new();
    if has_handlers {
        imports.extend(["CallContext", "FieldValue", "HandlerResult"]);
    } else if has_triggers {
        imports.push("FieldValue");
    }
    imports.push("HandlerTable");
    if has_handlers {
        imports.push("StateContents");
    }
    if has_triggers {
        imports.push("TriggerSpec");
    }
    let _ = writeln!(out, "use psc_core::logic::{{{}}};", imports.join(", "));

    let mut endpoint_stub = |out: &mut String, ep: &str, header: String, params: &[BaseType], kind: StubKind| {
        let func = unique_fn(ep, &stubs);
        let _ = writeln!(out);
        let _ = writeln!(out, "/// {}", header);
        let _ = writeln!(out, "///");
        if params.is_empty() {
            let _ = writeln!(out, "/// Takes no arguments.");
        } else {
            let _ = writeln!(out, "/// Arguments:");
            for (i, t) in params.iter().enumerate() {
                let _ = writeln!(out, "/// - `args[{}]`: {}", i, t);
            }
        }
        let _ = writeln!(out, "///");
        let _ = writeln!(out, "/// `current` holds ({}).", param_list(&sig));
        let _ = writeln!(
            out,
            "pub fn {}(ctx: &mut CallContext, args: &[FieldValue], current: &StateContents) -> HandlerResult {{",
            func
        );
        let _ = writeln!(out, "    let _ = (ctx, args);");
        let _ = writeln!(out, "    // TODO: compute the contents of the next state.");
        let _ = writeln!(out, "    HandlerResult::NewState(current.clone())");
        let _ = writeln!(out, "}}");
        stubs.push(Stub { name: ep.to_string(), function: func, kind });
    };

    for i in &interactions {
        let header = if i.role.node.is_contract() {
            format!("Interrupt `{} ()`, run by the contract when one of its triggers fires.", i.name())
        } else {
            format!("Endpoint `{} ({})` called by {}.", i.name(), param_list(&i.params), i.role.node)
        };
        endpoint_stub(&mut out, i.name(), header, &i.params, StubKind::Endpoint);
    }
    for (label, role) in &labels {
        let header = format!("Choice `{}` taken by {}.", label.node, role);
        endpoint_stub(&mut out, &label.node, header, &[], StubKind::ChoiceLabel);
    }

    for i in &interactions {
        for t in &i.triggers {
            let hook = t.hook_name(i.name());
            let func = unique_fn(&hook, &stubs);
            let _ = writeln!(out);
            let _ = writeln!(
                out,
                "/// {} trigger armed by `{}`; when it holds, `{}` runs.",
                capitalise(t.kind.keyword()),
                i.name(),
                t.target.node
            );
            let _ = writeln!(out, "///");
            let _ = writeln!(out, "/// Receives the arguments of `{}` ({}).", i.name(), param_list(&i.params));
            let _ = writeln!(out, "pub fn {}(args: &[FieldValue]) -> TriggerSpec {{", func);
            let _ = writeln!(out, "    let _ = args;");
            match (t.kind, t.condition) {
                (_, Some(c)) => {
                    let _ = writeln!(out, "    // Fixed by the protocol: `slot == {}`.", c.value);
                    let _ = writeln!(out, "    TriggerSpec::SlotAt({})", c.value);
                }
                (TriggerKind::Funds, None) => {
                    let _ = writeln!(out, "    // TODO: condition on the contract's funds.");
                    let _ = writeln!(out, "    TriggerSpec::funds(|funds| funds == 0)");
                }
                (TriggerKind::Slot, None) => {
                    let _ = writeln!(out, "    // TODO: slot at which the trigger fires.");
                    let _ = writeln!(out, "    TriggerSpec::SlotAt(u64::MAX)");
                }
            }
            let _ = writeln!(out, "}}");
            stubs.push(Stub { name: hook, function: func, kind: StubKind::TriggerHook });
        }
    }

    let _ = writeln!(out);
    let _ = writeln!(out, "/// Every handler above, keyed by the names the simulator dispatches on.");
    let _ = writeln!(out, "pub fn {}() -> HandlerTable {{", TABLE_FN);
    if stubs.is_empty() {
        let _ = writeln!(out, "    HandlerTable::new()");
    } else {
        let _ = writeln!(out, "    HandlerTable::new()");
        for s in &stubs {
            let method = if s.kind == StubKind::TriggerHook { "trigger" } else { "endpoint" };
            let _ = writeln!(out, "        .{}({:?}, {})", method, s.name, s.function);
        }
    }
    let _ = writeln!(out, "}}");
    StubFile { source: out, stubs }
}

fn capitalise(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(first) => first.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::build_automaton;
    use crate::parser::parse_protocol;

    fn manifest(src: &str) -> Manifest {
        let decl = parse_protocol(src).unwrap();
        Manifest::from_protocol(&decl, &build_automaton(&decl))
    }

    #[test]
    fn guessing_game_manifest() {
        let m = manifest(include_str!("../../../protocols/guessing_game.psc"));
        let text = m.to_string();
        assert_eq!(
            text,
            "protocol GuessingGame\nrole Owner\nrole Player\nfield HashedString\n\
             endpoint closeGame Contract interrupt - edges 2->3\n\
             endpoint guess Player user String edges 2->2\n\
             endpoint lock Owner user String,Value edges 1->2\n\
             hook lockFundTrigger funds lock closeGame\n\
             hook lockSlotTrigger slot lock closeGame\n"
        );
        assert_eq!(Manifest::parse(&text).unwrap(), m);
    }

    #[test]
    fn ping_pong_and_empty_manifests() {
        let m = manifest(include_str!("../../../protocols/ping_pong.psc"));
        assert_eq!((m.endpoints.len(), m.fields.len(), m.hooks.len()), (3, 0, 0));
        let m = manifest("protocol Empty () { }");
        assert!(m.endpoints.is_empty());
        assert_eq!(m.to_string(), "protocol Empty\n");
        assert_eq!(Manifest::parse(&m.to_string()).unwrap(), m);
    }

    #[test]
    fn auction_manifest_keeps_condition() {
        let m = manifest(include_str!("../../../protocols/auction.psc"));
        assert_eq!(m.hooks[0].slot_condition, Some(10));
        assert!(m.to_string().contains("hook beginAuctionSlotTrigger slot beginAuction endAuction slot==10\n"));
        assert_eq!(Manifest::parse(&m.to_string()).unwrap(), m);
    }

    #[test]
    fn manifest_parse_errors() {
        assert_eq!(Manifest::parse("").unwrap_err().line, 0);
        assert_eq!(Manifest::parse("role A\n").unwrap_err().line, 1);
        assert_eq!(Manifest::parse("protocol P\nfield Float\n").unwrap_err().line, 2);
        assert!(Manifest::parse("protocol P\nendpoint f A user - edges 1-2\n").is_err());
        assert!(Manifest::parse("protocol P\nhook h slot f g slot=10\n").is_err());
        assert!(Manifest::parse("protocol P\nprotocol Q\n").is_err());
    }

    #[test]
    fn guessing_game_has_five_stubs() {
        let decl = parse_protocol(include_str!("../../../protocols/guessing_game.psc")).unwrap();
        let f = emit_stubs(&decl);
        let names: Vec<&str> = f.stubs.iter().map(|s| s.name.as_str()).collect();
        assert_eq!(names, ["lock", "guess", "closeGame", "lockFundTrigger", "lockSlotTrigger"]);
    }

    #[test]
    fn crowdfunding_stubs_escape_keywords() {
        let decl = parse_protocol(include_str!("../../../protocols/crowdfunding.psc")).unwrap();
        let f = emit_stubs(&decl);
        let mut names: Vec<&str> = f.stubs.iter().map(|s| s.name.as_str()).collect();
        names.sort_unstable();
        assert_eq!(names, ["closeCrowdfund", "continue", "contribute", "init"]);
        assert!(f.source.contains("pub fn r#continue("));
        assert!(f.source.contains(".endpoint(\"continue\", r#continue)"));
    }

    #[test]
    fn empty_protocol_stub_file() {
        let decl = parse_protocol("protocol Empty () { }").unwrap();
        let f = emit_stubs(&decl);
        assert!(f.stubs.is_empty());
        assert!(f.source.contains("pub fn handler_table() -> HandlerTable"));
        assert!(!f.source.contains("CallContext"));
    }

    #[test]
    fn stems() {
        assert_eq!(file_stem("GuessingGame"), "guessing_game");
        assert_eq!(file_stem("PingPongRec"), "ping_pong_rec");
        assert_eq!(file_stem("HTTPServer"), "http_server");
        assert_eq!(file_stem("P"), "p");
    }

    #[test]
    fn fn_names() {
        assert_eq!(rust_fn_name("lock"), "lock");
        assert_eq!(rust_fn_name("match"), "r#match");
        assert_eq!(rust_fn_name("self"), "self_");
        assert_eq!(rust_fn_name("handler_table"), "handler_table_");
    }
}
