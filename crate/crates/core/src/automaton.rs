//! Translation of protocols into finite state automata.
//!
//! Endpoints are edges; the points before and after each interaction are
//! states. Construction first allocates nodes freely and then identifies
//! nodes that the protocol says are the same place (a `Label;` jump and its
//! `rec`, the fall-through ends of a choice). The surviving nodes are
//! numbered depth-first from the initial state, following edges in source
//! order, so numbers match a reading of the protocol from top to bottom.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::ast::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateId(pub u32);

impl fmt::Display for StateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EdgeKind {
    UserCall,
    AutoInterrupt,
}

impl EdgeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EdgeKind::UserCall => "user",
            EdgeKind::AutoInterrupt => "interrupt",
        }
    }

    pub fn parse(s: &str) -> Option<EdgeKind> {
        match s {
            "user" => Some(EdgeKind::UserCall),
            "interrupt" => Some(EdgeKind::AutoInterrupt),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct EdgeLabel {
    pub endpoint: String,
    pub role: RoleName,
    pub params: Vec<BaseType>,
    pub kind: EdgeKind,
}

impl EdgeLabel {
    fn new(endpoint: &str, role: &RoleName, params: &[BaseType]) -> Self {
        let kind = if role.is_contract() { EdgeKind::AutoInterrupt } else { EdgeKind::UserCall };
        EdgeLabel { endpoint: endpoint.to_string(), role: role.clone(), params: params.to_vec(), kind }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transition {
    pub from: StateId,
    pub label: EdgeLabel,
    pub to: StateId,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Automaton {
    pub name: String,
    /// States are `1..=state_count`.
    pub state_count: u32,
    pub initial: StateId,
    pub terminals: BTreeSet<StateId>,
    /// Sorted by source state, then endpoint, then target.
    pub transitions: Vec<Transition>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AutomatonError {
    #[error("unknown state {0}")]
    UnknownState(StateId),
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct DumpError {
    pub line: usize,
    pub message: String,
}

impl Automaton {
    pub fn states(&self) -> impl Iterator<Item = StateId> {
        (1..=self.state_count).map(StateId)
    }

    pub fn contains(&self, s: StateId) -> bool {
        s.0 >= 1 && s.0 <= self.state_count
    }

    /// Labels of the transitions leaving `s`, sorted by endpoint name.
    pub fn enabled(&self, s: StateId) -> Result<Vec<EdgeLabel>, AutomatonError> {
        if !self.contains(s) {
            return Err(AutomatonError::UnknownState(s));
        }
        let mut labels: Vec<EdgeLabel> =
            self.transitions.iter().filter(|t| t.from == s).map(|t| t.label.clone()).collect();
        labels.sort_by(|a, b| a.endpoint.cmp(&b.endpoint));
        Ok(labels)
    }

    /// The transition taken from `s` on `endpoint`, if any.
    pub fn step(&self, s: StateId, endpoint: &str) -> Option<&Transition> {
        self.transitions.iter().find(|t| t.from == s && t.label.endpoint == endpoint)
    }

    pub fn edges_for(&self, endpoint: &str) -> impl Iterator<Item = &Transition> + '_ {
        let endpoint = endpoint.to_string();
        self.transitions.iter().filter(move |t| t.label.endpoint == endpoint)
    }

    /// Checks determinism, reachability and that terminals are sinks.
    /// Returns one message per violation.
    pub fn check_invariants(&self) -> Vec<String> {
        let mut problems = Vec::new();
        let mut seen = BTreeSet::new();
        for t in &self.transitions {
            if !self.contains(t.from) || !self.contains(t.to) {
                problems.push(format!("transition {} -> {} leaves the state set", t.from, t.to));
            }
            if !seen.insert((t.from, t.label.endpoint.as_str())) {
                problems.push(format!("state {} has two `{}` transitions", t.from, t.label.endpoint));
            }
            if (t.label.kind == EdgeKind::AutoInterrupt) != t.label.role.is_contract() {
                problems.push(format!("edge `{}` kind disagrees with its role", t.label.endpoint));
            }
        }
        let mut reached = BTreeSet::from([self.initial]);
        let mut stack = vec![self.initial];
        while let Some(s) = stack.pop() {
            for t in self.transitions.iter().filter(|t| t.from == s) {
                if reached.insert(t.to) {
                    stack.push(t.to);
                }
            }
        }
        for s in self.states() {
            if !reached.contains(&s) {
                problems.push(format!("state {} is unreachable", s));
            }
        }
        for &s in &self.terminals {
            if self.transitions.iter().any(|t| t.from == s) {
                problems.push(format!("terminal state {} has outgoing transitions", s));
            }
        }
        problems
    }

    /// Graphviz rendering. Interrupt edges are dashed and terminal states
    /// double-circled; output is sorted, so identical automata render
    /// byte-identically.
    pub fn to_dot(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "digraph {} {{", self.name);
        out.push_str("  rankdir=LR;\n");
        out.push_str("  node [shape=circle];\n");
        for s in self.states() {
            if self.terminals.contains(&s) {
                let _ = writeln!(out, "  {} [shape=doublecircle];", s);
            } else {
                let _ = writeln!(out, "  {};", s);
            }
        }
        for t in &self.transitions {
            match t.label.kind {
                EdgeKind::UserCall => {
                    let _ = writeln!(out, "  {} -> {} [label=\"{}\"];", t.from, t.to, t.label.endpoint);
                }
                EdgeKind::AutoInterrupt => {
                    let _ = writeln!(out, "  {} -> {} [label=\"{}\", style=dashed];", t.from, t.to, t.label.endpoint);
                }
            }
        }
        out.push_str("}\n");
        out
    }

    /// Lossless line-oriented dump; the inverse of [`Automaton::from_dump`].
    ///
    /// ```text
    /// automaton GuessingGame
    /// states 3
    /// initial 1
    /// terminal 3
    /// edge 1 2 lock Owner user String Value
    /// ```
    pub fn to_dump(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "automaton {}", self.name);
        let _ = writeln!(out, "states {}", self.state_count);
        let _ = writeln!(out, "initial {}", self.initial);
        for t in &self.terminals {
            let _ = writeln!(out, "terminal {}", t);
        }
        for t in &self.transitions {
            let _ =
                write!(out, "edge {} {} {} {} {}", t.from, t.to, t.label.endpoint, t.label.role, t.label.kind.as_str());
            for p in &t.label.params {
                let _ = write!(out, " {}", p);
            }
            out.push('\n');
        }
        out
    }

    pub fn from_dump(text: &str) -> Result<Automaton, DumpError> {
        let mut name = None;
        let mut state_count = None;
        let mut initial = None;
        let mut terminals = BTreeSet::new();
        let mut transitions = Vec::new();

        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let err = |message: String| DumpError { line, message };
            let words: Vec<&str> = raw.split_whitespace().collect();
            let Some((&head, rest)) = words.split_first() else { continue };
            let state = |w: &str| -> Result<StateId, DumpError> {
                w.parse::<u32>().map(StateId).map_err(|_| err(format!("bad state id `{}`", w)))
            };
            match (head, rest) {
                ("automaton", [n]) if name.is_none() => name = Some(n.to_string()),
                ("states", [n]) if state_count.is_none() => {
                    state_count = Some(n.parse::<u32>().map_err(|_| err(format!("bad state count `{}`", n)))?)
                }
                ("initial", [s]) if initial.is_none() => initial = Some(state(s)?),
                ("terminal", [s]) => {
                    terminals.insert(state(s)?);
                }
                ("edge", [from, to, endpoint, role, kind, params @ ..]) => {
                    let kind = match *kind {
                        "user" => EdgeKind::UserCall,
                        "interrupt" => EdgeKind::AutoInterrupt,
                        other => return Err(err(format!("bad edge kind `{}`", other))),
                    };
                    let params = params
                        .iter()
                        .map(|p| BaseType::from_keyword(p).ok_or_else(|| err(format!("bad type `{}`", p))))
                        .collect::<Result<Vec<_>, _>>()?;
                    let role = RoleName::new(*role);
                    if (kind == EdgeKind::AutoInterrupt) != role.is_contract() {
                        return Err(err("interrupt edges belong to role Contract and only them".into()));
                    }
                    transitions.push(Transition {
                        from: state(from)?,
                        label: EdgeLabel { endpoint: endpoint.to_string(), role, params, kind },
                        to: state(to)?,
                    });
                }
                _ => return Err(err(format!("unrecognised line `{}`", raw.trim()))),
            }
        }

        let end = text.lines().count();
        let missing = |what: &str| DumpError { line: end, message: format!("missing `{}` line", what) };
        let automaton = Automaton {
            name: name.ok_or_else(|| missing("automaton"))?,
            state_count: state_count.ok_or_else(|| missing("states"))?,
            initial: initial.ok_or_else(|| missing("initial"))?,
            terminals,
            transitions,
        };
        let out_of_range = std::iter::once(automaton.initial)
            .chain(automaton.terminals.iter().copied())
            .chain(automaton.transitions.iter().flat_map(|t| [t.from, t.to]))
            .find(|s| !automaton.contains(*s));
        if let Some(s) = out_of_range {
            return Err(DumpError { line: end, message: format!("state {} outside 1..={}", s, automaton.state_count) });
        }
        let mut sorted = automaton.clone();
        sort_transitions(&mut sorted.transitions);
        if sorted.transitions != automaton.transitions {
            return Err(DumpError { line: end, message: "edges are not in canonical order".into() });
        }
        Ok(automaton)
    }
}

fn sort_transitions(ts: &mut [Transition]) {
    ts.sort_by(|a, b| (a.from, &a.label.endpoint, a.to).cmp(&(b.from, &b.label.endpoint, b.to)));
}

/// Free-function form of [`Automaton::to_dot`].
pub fn to_dot(a: &Automaton) -> String {
    a.to_dot()
}

/// Translates a validated protocol into its automaton.
///
/// Input that fails [`crate::validate::validate`] still produces an
/// automaton, but it may violate the automaton invariants.
pub fn build_automaton(decl: &ProtocolDecl) -> Automaton {
    let mut b = Builder::default();
    let initial = b.fresh();
    let end = b.block(&decl.body, initial, &mut Vec::new());
    b.finish(&decl.name.node, initial, end)
}

#[derive(Default)]
struct Builder {
    parent: Vec<usize>,
    edges: Vec<(usize, EdgeLabel, usize)>,
}

impl Builder {
    fn fresh(&mut self) -> usize {
        self.parent.push(self.parent.len());
        self.parent.len() - 1
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Identifies `from` with `into`; `into`'s representative survives.
    fn union(&mut self, from: usize, into: usize) {
        let (a, b) = (self.find(from), self.find(into));
        if a != b {
            self.parent[a] = b;
        }
    }

    /// Builds `items` starting at `entry`; returns the node where control
    /// falls out of the block, or `None` if every path ends in a jump.
    fn block(&mut self, items: &[ProtocolItem], entry: usize, anchors: &mut Vec<(String, usize)>) -> Option<usize> {
        let mut current = entry;
        for item in items {
            match item {
                ProtocolItem::Interact(i) => {
                    let next = self.fresh();
                    self.edges.push((current, EdgeLabel::new(i.name(), &i.role.node, &i.params), next));
                    current = next;
                }
                ProtocolItem::Choice(c) => {
                    let mut merge: Option<usize> = None;
                    for branch in &c.branches {
                        let start = self.fresh();
                        self.edges.push((current, EdgeLabel::new(&branch.label.node, &c.at.node, &[]), start));
                        if let Some(end) = self.block(&branch.body, start, anchors) {
                            match merge {
                                Some(m) => self.union(end, m),
                                None => merge = Some(end),
                            }
                        }
                    }
                    current = merge?;
                }
                ProtocolItem::Rec(r) => {
                    anchors.push((r.label.node.clone(), current));
                    let end = self.block(&r.body, current, anchors);
                    anchors.pop();
                    current = end?;
                }
                ProtocolItem::Continue(label) => {
                    if let Some(&(_, anchor)) = anchors.iter().rev().find(|(l, _)| *l == label.node) {
                        self.union(current, anchor);
                    }
                    return None;
                }
                ProtocolItem::DoInterrupt(d) => {
                    let first_new = self.parent.len();
                    self.block(&d.body, current, anchors);
                    let mut body_nodes = BTreeSet::from([self.find(current)]);
                    for n in first_new..self.parent.len() {
                        let rep = self.find(n);
                        body_nodes.insert(rep);
                    }
                    let after = self.fresh();
                    let label = EdgeLabel::new(d.handler.name(), &d.handler.role.node, &d.handler.params);
                    for n in body_nodes {
                        self.edges.push((n, label.clone(), after));
                    }
                    current = after;
                }
            }
        }
        Some(current)
    }

    fn finish(mut self, name: &str, initial: usize, end: Option<usize>) -> Automaton {
        let edges: Vec<(usize, EdgeLabel, usize)> =
            std::mem::take(&mut self.edges).into_iter().map(|(f, l, t)| (self.find(f), l, self.find(t))).collect();
        let mut out_edges: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (idx, (f, _, _)) in edges.iter().enumerate() {
            out_edges.entry(*f).or_default().push(idx);
        }

        // Preorder numbering; explicit stack to stay safe on deep inputs.
        let mut number: BTreeMap<usize, u32> = BTreeMap::new();
        let root = self.find(initial);
        number.insert(root, 1);
        let mut stack: Vec<(usize, usize)> = vec![(root, 0)];
        while let Some((node, next_edge)) = stack.pop() {
            let Some(&edge_idx) = out_edges.get(&node).and_then(|v| v.get(next_edge)) else {
                continue;
            };
            stack.push((node, next_edge + 1));
            let target = edges[edge_idx].2;
            if !number.contains_key(&target) {
                let n = number.len() as u32 + 1;
                number.insert(target, n);
                stack.push((target, 0));
            }
        }

        let mut transitions: Vec<Transition> = Vec::new();
        for (f, label, t) in edges {
            let (Some(&from), Some(&to)) = (number.get(&f), number.get(&t)) else { continue };
            let tr = Transition { from: StateId(from), label, to: StateId(to) };
            if !transitions.contains(&tr) {
                transitions.push(tr);
            }
        }
        sort_transitions(&mut transitions);

        let terminals =
            end.map(|e| self.find(e)).and_then(|e| number.get(&e).copied()).map(StateId).into_iter().collect();
        Automaton {
            name: name.to_string(),
            state_count: number.len() as u32,
            initial: StateId(1),
            terminals,
            transitions,
        }
    }
}
