//! Deterministic slot-based ledger.
//!
//! Wallets hold balances, the contract holds a pot, and every endpoint call
//! goes through the protocol's automaton (guarded mode) or straight to the
//! business logic (unguarded mode, which behaves like a contract with no
//! interaction control). Funds move only by the value-delta rule: when a
//! handler changes the funds field from `old` to `new`, the caller pays
//! `new - old` into the pot, or receives `old - new` from it.
//!
//! Every operation takes a state and returns a new one; states are plain
//! values, so a run can be forked at any point.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ast::{BaseType, ProtocolDecl, RoleName, TriggerDecl, TriggerKind};
use crate::automaton::{build_automaton, Automaton, EdgeKind, StateId};
use crate::diagnostic::Diagnostic;
use crate::logic::{
    CallContext, EndpointHandler, FieldValue, HandlerResult, HandlerTable, Lovelace, Slot, StateContents, TriggerSpec,
    WalletId,
};
use crate::scenario::{ResolvedAction, Scenario};
use crate::validate::validate;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Guarded,
    Unguarded,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Party {
    Wallet(WalletId),
    Contract,
}

impl fmt::Display for Party {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Party::Wallet(w) => write!(f, "{}", w),
            Party::Contract => f.write_str("contract"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EventKind {
    CallAccepted {
        endpoint: String,
        args: Vec<FieldValue>,
        /// Automaton states; absent in unguarded mode.
        step: Option<(StateId, StateId)>,
    },
    CallRejected {
        endpoint: String,
        args: Vec<FieldValue>,
        reason: String,
    },
    TriggerFired {
        trigger: TriggerKind,
        endpoint: String,
        from: StateId,
        to: StateId,
    },
    Transfer {
        from: Party,
        to: Party,
        amount: Lovelace,
    },
    Message(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimEvent {
    pub slot: Slot,
    /// Wallet the entry is attributed to; `None` renders as `Contract`.
    pub wallet: Option<WalletId>,
    pub kind: EventKind,
}

impl fmt::Display for SimEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.wallet {
            Some(w) => write!(f, "{}: ", w)?,
            None => f.write_str("Contract: ")?,
        }
        match &self.kind {
            EventKind::CallAccepted { endpoint, args, step } => {
                write!(f, "EndpointCall {}", endpoint)?;
                write_args(f, args)?;
                match step {
                    Some((from, to)) => write!(f, " accepted, state {} -> {}", from, to),
                    None => f.write_str(" accepted"),
                }
            }
            EventKind::CallRejected { endpoint, args, reason } => {
                write!(f, "EndpointCall {}", endpoint)?;
                write_args(f, args)?;
                write!(f, " rejected: {}", reason)
            }
            EventKind::TriggerFired { trigger, endpoint, from, to } => {
                write!(f, "{} trigger fired {}, state {} -> {}", trigger.keyword(), endpoint, from, to)
            }
            EventKind::Transfer { from, to, amount } => write!(f, "transfer {} from {} to {}", amount, from, to),
            EventKind::Message(m) => f.write_str(m),
        }
    }
}

fn write_args(f: &mut fmt::Formatter<'_>, args: &[FieldValue]) -> fmt::Result {
    f.write_str("(")?;
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        match a {
            FieldValue::Funds(v) => write!(f, "{}", v)?,
            FieldValue::Key(k) => write!(f, "{:?}", k.as_str())?,
            FieldValue::Str(s) | FieldValue::Hashed(s) | FieldValue::Tok(s) => write!(f, "{:?}", s)?,
        }
    }
    f.write_str(")")
}

#[derive(Clone, Debug)]
pub struct ArmedTrigger {
    pub kind: TriggerKind,
    pub spec: TriggerSpec,
    pub endpoint: String,
}

#[derive(Clone, Debug)]
pub struct LedgerState {
    pub slot: Slot,
    pub balances: BTreeMap<WalletId, Lovelace>,
    /// Funds held by the contract.
    pub pot: Lovelace,
    pub machine_state: StateId,
    pub contents: StateContents,
    pub armed: Vec<ArmedTrigger>,
    pub mode: Mode,
    /// Unguarded mode only: every stored contract output.
    pub outputs: Vec<StateContents>,
    pub log: Vec<SimEvent>,
    pub role_of: BTreeMap<WalletId, RoleName>,
    /// Counterparty for funds released by interrupt handlers.
    pub owner_wallet: Option<WalletId>,
}

impl LedgerState {
    pub fn balance(&self, wallet: &str) -> Option<Lovelace> {
        self.balances.get(&WalletId::new(wallet)).copied()
    }

    /// Sum of all wallet balances plus the pot.
    pub fn total_funds(&self) -> u128 {
        self.balances.values().map(|&b| b as u128).sum::<u128>() + self.pot as u128
    }

    /// Log with a `=== Slot k ===` header for every slot from 0 to the
    /// current one, each followed by the entries recorded in that slot.
    pub fn render_log(&self) -> String {
        let mut out = String::new();
        let mut events = self.log.iter().peekable();
        for slot in 0..=self.slot {
            let _ = writeln!(out, "=== Slot {} ===", slot);
            while let Some(e) = events.next_if(|e| e.slot == slot) {
                let _ = writeln!(out, "{}", e);
            }
        }
        out
    }

    pub fn render_balances(&self) -> String {
        let mut out = String::from("=== Final balances ===\n");
        for (w, b) in &self.balances {
            let _ = writeln!(out, "{}: {}", w, b);
        }
        let _ = writeln!(out, "contract: {}", self.pot);
        out
    }

    fn event(&mut self, wallet: Option<WalletId>, kind: EventKind) {
        self.log.push(SimEvent { slot: self.slot, wallet, kind });
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SimError {
    #[error("unknown endpoint `{0}`")]
    UnknownEndpoint(String),
    #[error("unknown wallet `{0}`")]
    UnknownWallet(String),
    #[error("wallet `{0}` listed twice")]
    DuplicateWallet(String),
    #[error("role `{0}` is not declared by the protocol")]
    UnknownRole(String),
    #[error("role `{0}` has no wallet assigned")]
    UnassignedRole(String),
    #[error("endpoint `{endpoint}` expects ({expected}), got ({got})")]
    ArgMismatch { endpoint: String, expected: String, got: String },
    #[error("no handler for endpoint `{0}`")]
    MissingHandler(String),
    #[error("no trigger hook `{0}`")]
    MissingTriggerHook(String),
    #[error("handler for `{endpoint}` broke its contract: {reason}")]
    HandlerContract { endpoint: String, reason: String },
    #[error("slot advance must be at least 1")]
    InvalidWait,
}

#[derive(Clone, Debug)]
struct EndpointInfo {
    params: Vec<BaseType>,
    triggers: Vec<TriggerDecl>,
}

/// A protocol bound to its automaton and business logic.
#[derive(Clone, Debug)]
pub struct Simulation {
    automaton: Automaton,
    handlers: HandlerTable,
    signature: Vec<BaseType>,
    roles: Vec<RoleName>,
    endpoints: BTreeMap<String, EndpointInfo>,
    /// Endpoints callable from the initial state; in unguarded mode these
    /// create a new contract output instead of spending existing ones.
    initializers: BTreeSet<String>,
}

fn type_list(types: impl IntoIterator<Item = BaseType>) -> String {
    types.into_iter().map(|t| t.keyword()).collect::<Vec<_>>().join(", ")
}

fn identity_handler(_: &mut CallContext, _: &[FieldValue], current: &StateContents) -> HandlerResult {
    HandlerResult::NewState(current.clone())
}

impl Simulation {
    /// Binds `handlers` to a validated protocol. Every interaction needs a
    /// handler; choice labels without one keep the state unchanged. Every
    /// trigger without an inline condition needs its hook.
    pub fn new(decl: &ProtocolDecl, automaton: Automaton, handlers: HandlerTable) -> Result<Self, SimError> {
        let mut handlers = handlers;
        let mut endpoints = BTreeMap::new();
        for i in decl.interactions() {
            if handlers.get_endpoint(i.name()).is_none() {
                return Err(SimError::MissingHandler(i.name().to_string()));
            }
            for t in i.triggers.iter().filter(|t| t.condition.is_none()) {
                let hook = t.hook_name(i.name());
                if handlers.get_trigger(&hook).is_none() {
                    return Err(SimError::MissingTriggerHook(hook));
                }
            }
            endpoints
                .insert(i.name().to_string(), EndpointInfo { params: i.params.clone(), triggers: i.triggers.clone() });
        }
        for (label, _) in decl.choice_labels() {
            if handlers.get_endpoint(&label.node).is_none() {
                handlers = handlers.endpoint(&label.node, identity_handler);
            }
            endpoints.insert(label.node.clone(), EndpointInfo { params: Vec::new(), triggers: Vec::new() });
        }
        let initializers = automaton
            .transitions
            .iter()
            .filter(|t| t.from == automaton.initial)
            .map(|t| t.label.endpoint.clone())
            .collect();
        Ok(Simulation {
            automaton,
            handlers,
            signature: decl.state_signature(),
            roles: decl.role_names().cloned().collect(),
            endpoints,
            initializers,
        })
    }

    pub fn automaton(&self) -> &Automaton {
        &self.automaton
    }

    pub fn params_of(&self, endpoint: &str) -> Option<&[BaseType]> {
        self.endpoints.get(endpoint).map(|e| e.params.as_slice())
    }

    /// Fresh ledger at slot 0 with an empty pot and the machine in its
    /// initial state.
    pub fn init(
        &self,
        balances: impl IntoIterator<Item = (WalletId, Lovelace)>,
        roles: impl IntoIterator<Item = (WalletId, RoleName)>,
        mode: Mode,
    ) -> Result<LedgerState, SimError> {
        let mut wallets = BTreeMap::new();
        for (w, b) in balances {
            if wallets.insert(w.clone(), b).is_some() {
                return Err(SimError::DuplicateWallet(w.to_string()));
            }
        }
        let mut role_of = BTreeMap::new();
        for (w, r) in roles {
            if !wallets.contains_key(&w) {
                return Err(SimError::UnknownWallet(w.to_string()));
            }
            if !self.roles.contains(&r) {
                return Err(SimError::UnknownRole(r.to_string()));
            }
            if role_of.insert(w.clone(), r).is_some() {
                return Err(SimError::DuplicateWallet(w.to_string()));
            }
        }
        for r in &self.roles {
            if !role_of.values().any(|assigned| assigned == r) {
                return Err(SimError::UnassignedRole(r.to_string()));
            }
        }
        let owner_wallet =
            self.roles.first().and_then(|first| role_of.iter().find(|(_, r)| *r == first).map(|(w, _)| w.clone()));
        Ok(LedgerState {
            slot: 0,
            balances: wallets,
            pot: 0,
            machine_state: self.automaton.initial,
            contents: StateContents::initial(&self.signature),
            armed: Vec::new(),
            mode,
            outputs: Vec::new(),
            log: Vec::new(),
            role_of,
            owner_wallet,
        })
    }

    /// Executes one endpoint call at the current slot. Calls the protocol or
    /// the business logic refuses are logged as rejections and leave
    /// balances, pot, contents and machine state untouched; `Err` is kept
    /// for malformed requests and broken handlers.
    pub fn submit_call(
        &self,
        st: &LedgerState,
        caller: &WalletId,
        endpoint: &str,
        args: &[FieldValue],
    ) -> Result<LedgerState, SimError> {
        if !st.balances.contains_key(caller) {
            return Err(SimError::UnknownWallet(caller.to_string()));
        }
        let info = self.endpoints.get(endpoint).ok_or_else(|| SimError::UnknownEndpoint(endpoint.to_string()))?;
        if args.len() != info.params.len() || args.iter().zip(&info.params).any(|(a, t)| a.base_type() != *t) {
            return Err(SimError::ArgMismatch {
                endpoint: endpoint.to_string(),
                expected: type_list(info.params.iter().copied()),
                got: type_list(args.iter().map(FieldValue::base_type)),
            });
        }
        match st.mode {
            Mode::Guarded => self.guarded_call(st, caller, endpoint, args, info),
            Mode::Unguarded => self.unguarded_call(st, caller, endpoint, args),
        }
    }

    fn handler(&self, endpoint: &str) -> Result<&EndpointHandler, SimError> {
        self.handlers.get_endpoint(endpoint).ok_or_else(|| SimError::MissingHandler(endpoint.to_string()))
    }

    fn reject(st: &LedgerState, caller: &WalletId, endpoint: &str, args: &[FieldValue], reason: String) -> LedgerState {
        let mut next = st.clone();
        next.event(
            Some(caller.clone()),
            EventKind::CallRejected { endpoint: endpoint.to_string(), args: args.to_vec(), reason },
        );
        next
    }

    fn check_contents(&self, endpoint: &str, c: &StateContents) -> Result<(), SimError> {
        if c.matches(&self.signature) {
            Ok(())
        } else {
            Err(SimError::HandlerContract {
                endpoint: endpoint.to_string(),
                reason: format!("returned {} for signature ({})", c, type_list(self.signature.iter().copied())),
            })
        }
    }

    /// Net amount `counterparty` must pay into the pot (negative: receives)
    /// so that the pot moves from `old` to `new` after `payouts` are made.
    fn settlement(
        &self,
        st: &LedgerState,
        endpoint: &str,
        old: Lovelace,
        new: Lovelace,
        payouts: &[(WalletId, Lovelace)],
    ) -> Result<i128, SimError> {
        for (w, _) in payouts {
            if !st.balances.contains_key(w) {
                return Err(SimError::HandlerContract {
                    endpoint: endpoint.to_string(),
                    reason: format!("pays unknown wallet `{}`", w),
                });
            }
        }
        let paid: i128 = payouts.iter().map(|(_, a)| *a as i128).sum();
        Ok(new as i128 - old as i128 + paid)
    }

    fn apply_transfers(
        next: &mut LedgerState,
        counterparty: &WalletId,
        net_in: i128,
        payouts: &[(WalletId, Lovelace)],
        attribute_to: Option<WalletId>,
    ) {
        if net_in > 0 {
            let amount = net_in as Lovelace;
            *next.balances.get_mut(counterparty).expect("checked wallet") -= amount;
            next.pot += amount;
            next.event(
                attribute_to.clone(),
                EventKind::Transfer { from: Party::Wallet(counterparty.clone()), to: Party::Contract, amount },
            );
        }
        for (w, amount) in payouts {
            next.pot -= amount;
            *next.balances.get_mut(w).expect("checked wallet") += amount;
            next.event(
                attribute_to.clone(),
                EventKind::Transfer { from: Party::Contract, to: Party::Wallet(w.clone()), amount: *amount },
            );
        }
        if net_in < 0 {
            let amount = (-net_in) as Lovelace;
            next.pot -= amount;
            *next.balances.get_mut(counterparty).expect("checked wallet") += amount;
            next.event(
                attribute_to,
                EventKind::Transfer { from: Party::Contract, to: Party::Wallet(counterparty.clone()), amount },
            );
        }
    }

    fn guarded_call(
        &self,
        st: &LedgerState,
        caller: &WalletId,
        endpoint: &str,
        args: &[FieldValue],
        info: &EndpointInfo,
    ) -> Result<LedgerState, SimError> {
        let from = st.machine_state;
        let Some(edge) = self.automaton.step(from, endpoint) else {
            return Ok(Self::reject(st, caller, endpoint, args, self.not_enabled_reason(st, endpoint)));
        };
        let role = st.role_of.get(caller);
        if role != Some(&edge.label.role) {
            let reason = match role {
                Some(r) => format!("role {} may not call {} (requires {})", r, endpoint, edge.label.role),
                None => format!("wallet has no role; {} requires {}", endpoint, edge.label.role),
            };
            return Ok(Self::reject(st, caller, endpoint, args, reason));
        }

        let mut ctx = CallContext::new(Some(caller.clone()), st.slot);
        let new_contents = match self.handler(endpoint)?(&mut ctx, args, &st.contents) {
            HandlerResult::Err(msg) => return Ok(Self::reject(st, caller, endpoint, args, msg)),
            HandlerResult::NewState(c) => c,
        };
        self.check_contents(endpoint, &new_contents)?;
        let net_in = self.settlement(st, endpoint, st.pot, new_contents.funds(), &ctx.payouts)?;
        let balance = st.balances[caller];
        if net_in > balance as i128 {
            let reason = format!("insufficient funds: {} needed, {} available", net_in, balance);
            return Ok(Self::reject(st, caller, endpoint, args, reason));
        }

        let mut next = st.clone();
        next.event(
            Some(caller.clone()),
            EventKind::CallAccepted {
                endpoint: endpoint.to_string(),
                args: args.to_vec(),
                step: Some((from, edge.to)),
            },
        );
        for m in ctx.messages.drain(..) {
            next.event(Some(caller.clone()), EventKind::Message(m));
        }
        Self::apply_transfers(&mut next, caller, net_in, &ctx.payouts, Some(caller.clone()));
        next.contents = new_contents;
        next.machine_state = edge.to;

        for t in &info.triggers {
            let spec = match t.condition {
                Some(c) => TriggerSpec::SlotAt(c.value),
                None => {
                    let hook = t.hook_name(endpoint);
                    let hook_fn = self.handlers.get_trigger(&hook).ok_or(SimError::MissingTriggerHook(hook))?;
                    hook_fn(args)
                }
            };
            let when = match &spec {
                TriggerSpec::SlotAt(s) => format!(" at slot {}", s),
                TriggerSpec::FundsPredicate(_) => String::new(),
            };
            next.event(
                None,
                EventKind::Message(format!("armed {} trigger for {}{}", t.kind.keyword(), t.target.node, when)),
            );
            next.armed.push(ArmedTrigger { kind: t.kind, spec, endpoint: t.target.node.clone() });
        }
        Ok(next)
    }

    fn not_enabled_reason(&self, st: &LedgerState, endpoint: &str) -> String {
        let only_initial = self.automaton.edges_for(endpoint).all(|t| t.from == self.automaton.initial);
        if only_initial && st.machine_state != self.automaton.initial {
            format!("Previous {0} detected. This {0} produces no effect", endpoint)
        } else {
            format!("{} is not enabled in state {}. This call produces no effect", endpoint, st.machine_state)
        }
    }

    fn unguarded_call(
        &self,
        st: &LedgerState,
        caller: &WalletId,
        endpoint: &str,
        args: &[FieldValue],
    ) -> Result<LedgerState, SimError> {
        let handler = self.handler(endpoint)?;
        let old: Vec<StateContents> = if self.initializers.contains(endpoint) {
            vec![StateContents::initial(&self.signature)]
        } else if st.outputs.is_empty() {
            let reason = "Validation failed: no contract output to spend".to_string();
            return Ok(Self::reject(st, caller, endpoint, args, reason));
        } else {
            st.outputs.clone()
        };

        let mut messages = Vec::new();
        let mut payouts = Vec::new();
        let mut new = Vec::with_capacity(old.len());
        for (i, output) in old.iter().enumerate() {
            let mut ctx = CallContext::new(Some(caller.clone()), st.slot);
            match handler(&mut ctx, args, output) {
                HandlerResult::Err(msg) => {
                    let reason = format!("Validation failed on output {} of {}: {}", i + 1, old.len(), msg);
                    return Ok(Self::reject(st, caller, endpoint, args, reason));
                }
                HandlerResult::NewState(c) => {
                    self.check_contents(endpoint, &c)?;
                    messages.append(&mut ctx.messages);
                    payouts.append(&mut ctx.payouts);
                    new.push(c);
                }
            }
        }
        let old_total: Lovelace = old.iter().map(StateContents::funds).sum();
        let new_total: Lovelace = new.iter().map(StateContents::funds).sum();
        let net_in = self.settlement(st, endpoint, old_total, new_total, &payouts)?;
        let balance = st.balances[caller];
        if net_in > balance as i128 {
            let reason = format!("insufficient funds: {} needed, {} available", net_in, balance);
            return Ok(Self::reject(st, caller, endpoint, args, reason));
        }

        let mut next = st.clone();
        next.event(
            Some(caller.clone()),
            EventKind::CallAccepted { endpoint: endpoint.to_string(), args: args.to_vec(), step: None },
        );
        for m in messages {
            next.event(Some(caller.clone()), EventKind::Message(m));
        }
        Self::apply_transfers(&mut next, caller, net_in, &payouts, Some(caller.clone()));
        if self.initializers.contains(endpoint) {
            next.outputs.extend(new.iter().cloned());
        } else {
            next.outputs = new.clone();
        }
        if let Some(last) = new.last() {
            next.contents = last.clone();
        }
        Ok(next)
    }

    /// Moves the ledger forward `n` slots, one at a time, firing at most
    /// one armed trigger per slot. Funds triggers are checked before slot
    /// triggers. A trigger whose interrupt is not enabled in the current
    /// machine state stays armed.
    pub fn advance_slot(&self, st: &LedgerState, n: u64) -> Result<LedgerState, SimError> {
        if n == 0 {
            return Err(SimError::InvalidWait);
        }
        let mut next = st.clone();
        for _ in 0..n {
            next.slot += 1;
            if next.mode == Mode::Guarded && !next.armed.is_empty() {
                self.fire_triggers(&mut next)?;
            }
        }
        Ok(next)
    }

    fn fire_triggers(&self, st: &mut LedgerState) -> Result<(), SimError> {
        let order = st
            .armed
            .iter()
            .filter(|t| t.kind == TriggerKind::Funds)
            .chain(st.armed.iter().filter(|t| t.kind == TriggerKind::Slot));
        let due = order
            .filter(|t| match &t.spec {
                TriggerSpec::FundsPredicate(p) => p(st.pot),
                TriggerSpec::SlotAt(k) => st.slot >= *k,
            })
            .find_map(|t| {
                self.automaton
                    .step(st.machine_state, &t.endpoint)
                    .filter(|e| e.label.kind == EdgeKind::AutoInterrupt)
                    .map(|e| (t.kind, e.clone()))
            });
        let Some((kind, edge)) = due else { return Ok(()) };
        let endpoint = edge.label.endpoint.as_str();

        let mut ctx = CallContext::new(None, st.slot);
        let new_contents = match self.handler(endpoint)?(&mut ctx, &[], &st.contents) {
            HandlerResult::Err(msg) => {
                st.event(None, EventKind::Message(format!("interrupt {} failed: {}", endpoint, msg)));
                return Ok(());
            }
            HandlerResult::NewState(c) => c,
        };
        self.check_contents(endpoint, &new_contents)?;
        let net_in = self.settlement(st, endpoint, st.pot, new_contents.funds(), &ctx.payouts)?;
        let owner = st.owner_wallet.clone();
        if net_in > 0 || (net_in < 0 && owner.is_none()) {
            return Err(SimError::HandlerContract {
                endpoint: endpoint.to_string(),
                reason: "interrupt handlers can only release funds to the owner wallet".to_string(),
            });
        }

        st.event(
            None,
            EventKind::TriggerFired { trigger: kind, endpoint: endpoint.to_string(), from: edge.from, to: edge.to },
        );
        for m in ctx.messages.drain(..) {
            st.event(owner.clone(), EventKind::Message(m));
        }
        if let Some(owner) = &owner {
            Self::apply_transfers(st, owner, net_in, &ctx.payouts, Some(owner.clone()));
        } else {
            Self::apply_transfers(st, &WalletId::new(""), 0, &ctx.payouts, None);
        }
        st.contents = new_contents;
        st.machine_state = edge.to;
        st.armed.clear();
        Ok(())
    }
}

/// Outcome of [`run_scenario`]: the final ledger and its rendered log,
/// followed by the final balances table.
#[derive(Clone, Debug)]
pub struct ScenarioRun {
    pub state: LedgerState,
    pub log: String,
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error("protocol has {} diagnostic(s)", .0.len())]
    Protocol(Vec<Diagnostic>),
    #[error("scenario has {} diagnostic(s)", .0.len())]
    Scenario(Vec<Diagnostic>),
    #[error(transparent)]
    Sim(#[from] SimError),
}

/// Validates the protocol and the scenario, then executes the scenario's
/// actions in order. `mode` overrides the scenario's own mode.
pub fn run_scenario(
    decl: &ProtocolDecl,
    handlers: &HandlerTable,
    scenario: &Scenario,
    mode: Option<Mode>,
) -> Result<ScenarioRun, RunError> {
    let diags = validate(decl);
    if !diags.is_empty() {
        return Err(RunError::Protocol(diags));
    }
    let actions = scenario.resolve(decl).map_err(RunError::Scenario)?;
    let sim = Simulation::new(decl, build_automaton(decl), handlers.clone())?;
    let mut st = sim.init(
        scenario.initial_balances.iter().map(|(w, b)| (w.clone(), *b)),
        scenario.role_assignment(),
        mode.unwrap_or(scenario.mode),
    )?;
    for action in &actions {
        st = match action {
            ResolvedAction::Call { wallet, endpoint, args } => sim.submit_call(&st, wallet, endpoint, args)?,
            ResolvedAction::Wait(n) => sim.advance_slot(&st, *n)?,
        };
    }
    let log = st.render_log() + &st.render_balances();
    Ok(ScenarioRun { state: st, log })
}
