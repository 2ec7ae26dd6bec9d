//! Business logic: the handler contract between the simulator and user code,
//! and the built-in packs for the shipped protocols.
//!
//! A handler receives the endpoint arguments and the current state contents
//! and returns either the contents of the next state or an error. It never
//! moves funds itself: the simulator compares the funds field before and
//! after and settles the difference with the caller. A handler that must pay
//! a third party (an outbid bidder, say) asks for it through
//! [`CallContext::pay`].

mod packs;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::ast::BaseType;

pub use packs::{
    gg_close_game, gg_guess, gg_lock, pack_for_protocol, register_pack, GG_DEFAULT_SLOT_HORIZON, PACK_NAMES,
};

/// Amounts are integers in Lovelace (1 ADA = 1,000,000 Lovelace).
pub type Lovelace = u64;
pub type Slot = u64;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WalletId(String);

impl WalletId {
    pub fn new(name: impl Into<String>) -> Self {
        WalletId(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for WalletId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for WalletId {
    fn from(s: &str) -> Self {
        WalletId(s.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum FieldValue {
    Str(String),
    /// Lowercase hex digest, see [`hash_string`].
    Hashed(String),
    Key(WalletId),
    Funds(Lovelace),
    Tok(String),
}

impl FieldValue {
    pub fn base_type(&self) -> BaseType {
        match self {
            FieldValue::Str(_) => BaseType::String,
            FieldValue::Hashed(_) => BaseType::HashedString,
            FieldValue::Key(_) => BaseType::PubKeyHash,
            FieldValue::Funds(_) => BaseType::Value,
            FieldValue::Tok(_) => BaseType::Token,
        }
    }

    pub fn default_for(ty: BaseType) -> FieldValue {
        match ty {
            BaseType::String => FieldValue::Str(String::new()),
            BaseType::HashedString => FieldValue::Hashed(String::new()),
            BaseType::PubKeyHash => FieldValue::Key(WalletId::new("")),
            BaseType::Value => FieldValue::Funds(0),
            BaseType::Token => FieldValue::Tok(String::new()),
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            FieldValue::Str(s) | FieldValue::Hashed(s) | FieldValue::Tok(s) => Some(s),
            FieldValue::Key(k) => Some(k.as_str()),
            FieldValue::Funds(_) => None,
        }
    }

    pub fn as_funds(&self) -> Option<Lovelace> {
        match self {
            FieldValue::Funds(v) => Some(*v),
            _ => None,
        }
    }
}

impl fmt::Display for FieldValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldValue::Str(s) | FieldValue::Tok(s) => write!(f, "{:?}", s),
            FieldValue::Hashed(h) => write!(f, "#{}", h.get(..12).unwrap_or(h)),
            FieldValue::Key(k) => write!(f, "{}", k),
            FieldValue::Funds(v) => write!(f, "{}", v),
        }
    }
}

/// Field values of one machine state; the last one is always the implicit
/// funds field.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StateContents {
    values: Vec<FieldValue>,
}

impl StateContents {
    pub fn new(mut declared: Vec<FieldValue>, funds: Lovelace) -> Self {
        declared.push(FieldValue::Funds(funds));
        StateContents { values: declared }
    }

    /// Default value for every position of `signature` (which includes the
    /// trailing funds type).
    pub fn initial(signature: &[BaseType]) -> Self {
        let declared =
            signature[..signature.len().saturating_sub(1)].iter().map(|t| FieldValue::default_for(*t)).collect();
        StateContents::new(declared, 0)
    }

    pub fn values(&self) -> &[FieldValue] {
        &self.values
    }

    /// The declared fields, without the funds field.
    pub fn fields(&self) -> &[FieldValue] {
        &self.values[..self.values.len() - 1]
    }

    pub fn funds(&self) -> Lovelace {
        match self.values.last() {
            Some(FieldValue::Funds(v)) => *v,
            _ => unreachable!("state contents always end with funds"),
        }
    }

    pub fn with_funds(&self, funds: Lovelace) -> Self {
        StateContents::new(self.fields().to_vec(), funds)
    }

    pub fn matches(&self, signature: &[BaseType]) -> bool {
        self.values.len() == signature.len() && self.values.iter().zip(signature).all(|(v, t)| v.base_type() == *t)
    }
}

impl fmt::Display for StateContents {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, v) in self.values.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}", v)?;
        }
        f.write_str(")")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HandlerResult {
    NewState(StateContents),
    Err(String),
}

pub type FundsPredicate = Arc<dyn Fn(Lovelace) -> bool + Send + Sync>;

/// When an armed trigger fires.
#[derive(Clone)]
pub enum TriggerSpec {
    /// Fires when the predicate holds for the contract's funds.
    FundsPredicate(FundsPredicate),
    /// Fires once the ledger reaches this slot.
    SlotAt(Slot),
}

impl TriggerSpec {
    pub fn funds(pred: impl Fn(Lovelace) -> bool + Send + Sync + 'static) -> Self {
        TriggerSpec::FundsPredicate(Arc::new(pred))
    }

    pub fn slot(&self) -> Option<Slot> {
        match self {
            TriggerSpec::SlotAt(s) => Some(*s),
            TriggerSpec::FundsPredicate(_) => None,
        }
    }
}

impl fmt::Debug for TriggerSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TriggerSpec::FundsPredicate(_) => f.write_str("FundsPredicate(..)"),
            TriggerSpec::SlotAt(s) => write!(f, "SlotAt({})", s),
        }
    }
}

/// What a handler knows about the call besides its arguments, and where it
/// leaves side requests (log lines, third-party payouts). Requests are
/// discarded when the handler returns an error.
#[derive(Clone, Debug, Default)]
pub struct CallContext {
    /// `None` for interrupt handlers, which run as `Contract`.
    pub caller: Option<WalletId>,
    pub slot: Slot,
    pub messages: Vec<String>,
    pub payouts: Vec<(WalletId, Lovelace)>,
}

impl CallContext {
    pub fn new(caller: Option<WalletId>, slot: Slot) -> Self {
        CallContext { caller, slot, messages: Vec::new(), payouts: Vec::new() }
    }

    pub fn log(&mut self, message: impl Into<String>) {
        self.messages.push(message.into());
    }

    /// Asks the simulator to pay `amount` from the contract to `to`.
    pub fn pay(&mut self, to: WalletId, amount: Lovelace) {
        if amount > 0 {
            self.payouts.push((to, amount));
        }
    }
}

pub type EndpointHandler = Arc<dyn Fn(&mut CallContext, &[FieldValue], &StateContents) -> HandlerResult + Send + Sync>;
pub type TriggerHook = Arc<dyn Fn(&[FieldValue]) -> TriggerSpec + Send + Sync>;

/// Handlers by endpoint name, and trigger hooks by hook name
/// (`<endpoint>FundTrigger` / `<endpoint>SlotTrigger`).
#[derive(Clone, Default)]
pub struct HandlerTable {
    endpoints: BTreeMap<String, EndpointHandler>,
    triggers: BTreeMap<String, TriggerHook>,
}

impl HandlerTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn endpoint(
        mut self,
        name: &str,
        handler: impl Fn(&mut CallContext, &[FieldValue], &StateContents) -> HandlerResult + Send + Sync + 'static,
    ) -> Self {
        self.endpoints.insert(name.to_string(), Arc::new(handler));
        self
    }

    pub fn trigger(mut self, name: &str, hook: impl Fn(&[FieldValue]) -> TriggerSpec + Send + Sync + 'static) -> Self {
        self.triggers.insert(name.to_string(), Arc::new(hook));
        self
    }

    pub fn get_endpoint(&self, name: &str) -> Option<&EndpointHandler> {
        self.endpoints.get(name)
    }

    pub fn get_trigger(&self, name: &str) -> Option<&TriggerHook> {
        self.triggers.get(name)
    }

    pub fn endpoint_names(&self) -> impl Iterator<Item = &str> {
        self.endpoints.keys().map(String::as_str)
    }

    pub fn trigger_names(&self) -> impl Iterator<Item = &str> {
        self.triggers.keys().map(String::as_str)
    }
}

impl fmt::Debug for HandlerTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HandlerTable")
            .field("endpoints", &self.endpoints.keys().collect::<Vec<_>>())
            .field("triggers", &self.triggers.keys().collect::<Vec<_>>())
            .finish()
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LogicError {
    #[error("unknown logic pack `{0}` (available: guessing_game, ping_pong, crowdfunding, auction)")]
    UnknownPack(String),
}

/// Lowercase hex SHA-256 of `s`.
pub fn hash_string(s: &str) -> String {
    format!("{:x}", Sha256::digest(s.as_bytes()))
}
