//! Scenario files: initial wallets, role assignment and a list of calls and
//! waits, in JSON.
//!
//! ```json
//! {
//!   "initial_balances": { "wallet1": 10, "wallet2": 10 },
//!   "roles": { "wallet1": "Owner", "wallet2": "Player" },
//!   "mode": "guarded",
//!   "actions": [
//!     { "type": "call", "wallet": "wallet1", "tag": "lock", "args": ["Pink Floyd", 3] },
//!     { "type": "wait", "slots": 2 }
//!   ]
//! }
//! ```
//!
//! `mode` is optional and defaults to `guarded`. Unknown keys, duplicate
//! keys and literals other than strings and integers are rejected.

use std::collections::BTreeMap;
use std::fmt;
use std::marker::PhantomData;

use serde::de::{self, Deserializer, MapAccess, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use crate::ast::{BaseType, ProtocolDecl, RoleName};
use crate::diagnostic::{DiagCode, Diagnostic, Span};
use crate::logic::{hash_string, FieldValue, Lovelace, WalletId};
use crate::simulator::Mode;

const DUPLICATE_KEY: &str = "duplicate key";
const BAD_LITERAL: &str = "literal must be a string or an integer";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(deserialize_with = "unique_map")]
    pub initial_balances: BTreeMap<WalletId, Lovelace>,
    #[serde(deserialize_with = "unique_map")]
    pub roles: BTreeMap<WalletId, String>,
    #[serde(default)]
    pub mode: Mode,
    pub actions: Vec<Action>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum Action {
    Call {
        wallet: WalletId,
        /// Endpoint name.
        tag: String,
        #[serde(default)]
        args: Vec<Literal>,
    },
    Wait {
        slots: u64,
    },
}

/// An argument as written in the scenario, before it is typed against the
/// endpoint's parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Literal {
    Str(String),
    Int(i128),
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Literal::Str(s) => write!(f, "{:?}", s),
            Literal::Int(i) => write!(f, "{}", i),
        }
    }
}

impl Serialize for Literal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Literal::Str(v) => s.serialize_str(v),
            Literal::Int(i) => match (u64::try_from(*i), i64::try_from(*i)) {
                (Ok(u), _) => s.serialize_u64(u),
                (_, Ok(n)) => s.serialize_i64(n),
                _ => Err(serde::ser::Error::custom("integer literal out of range")),
            },
        }
    }
}

impl<'de> Deserialize<'de> for Literal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct LiteralVisitor;

        impl<'de> Visitor<'de> for LiteralVisitor {
            type Value = Literal;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a string or an integer")
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Literal, E> {
                Ok(Literal::Str(v.to_string()))
            }

            fn visit_string<E: de::Error>(self, v: String) -> Result<Literal, E> {
                Ok(Literal::Str(v))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Literal, E> {
                Ok(Literal::Int(v as i128))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Literal, E> {
                Ok(Literal::Int(v as i128))
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Literal, E> {
                Err(E::custom(format!("{}, found number {}", BAD_LITERAL, v)))
            }

            fn visit_bool<E: de::Error>(self, v: bool) -> Result<Literal, E> {
                Err(E::custom(format!("{}, found boolean {}", BAD_LITERAL, v)))
            }

            fn visit_unit<E: de::Error>(self) -> Result<Literal, E> {
                Err(E::custom(format!("{}, found null", BAD_LITERAL)))
            }

            fn visit_seq<A: de::SeqAccess<'de>>(self, _: A) -> Result<Literal, A::Error> {
                Err(de::Error::custom(format!("{}, found array", BAD_LITERAL)))
            }

            fn visit_map<A: MapAccess<'de>>(self, _: A) -> Result<Literal, A::Error> {
                Err(de::Error::custom(format!("{}, found object", BAD_LITERAL)))
            }
        }

        d.deserialize_any(LiteralVisitor)
    }
}

fn unique_map<'de, D, K, V>(d: D) -> Result<BTreeMap<K, V>, D::Error>
where
    D: Deserializer<'de>,
    K: Deserialize<'de> + Ord + fmt::Display,
    V: Deserialize<'de>,
{
    struct UniqueMap<K, V>(PhantomData<(K, V)>);

    impl<'de, K, V> Visitor<'de> for UniqueMap<K, V>
    where
        K: Deserialize<'de> + Ord + fmt::Display,
        V: Deserialize<'de>,
    {
        type Value = BTreeMap<K, V>;

        fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
            f.write_str("an object")
        }

        fn visit_map<A: MapAccess<'de>>(self, mut access: A) -> Result<Self::Value, A::Error> {
            let mut map = BTreeMap::new();
            while let Some((k, v)) = access.next_entry::<K, V>()? {
                if map.contains_key(&k) {
                    return Err(de::Error::custom(format!("{} `{}`", DUPLICATE_KEY, k)));
                }
                map.insert(k, v);
            }
            Ok(map)
        }
    }

    d.deserialize_map(UniqueMap(PhantomData))
}

/// An action whose arguments have been typed against the protocol.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ResolvedAction {
    Call { wallet: WalletId, endpoint: String, args: Vec<FieldValue> },
    Wait(u64),
}

/// Parses and checks a scenario. Syntax and schema errors carry the JSON
/// position; referential errors name the offending path instead.
pub fn load_scenario(text: &str) -> Result<Scenario, Vec<Diagnostic>> {
    let scenario: Scenario = serde_json::from_str(text).map_err(|e| vec![json_diagnostic(text, &e)])?;
    let mut diags = Vec::new();
    for wallet in scenario.roles.keys() {
        if !scenario.initial_balances.contains_key(wallet) {
            diags.push(Diagnostic::unpositioned(
                DiagCode::UnknownWallet,
                format!("roles: wallet `{}` is not in initial_balances", wallet),
            ));
        }
    }
    for (i, action) in scenario.actions.iter().enumerate() {
        match action {
            Action::Call { wallet, .. } if !scenario.initial_balances.contains_key(wallet) => {
                diags.push(Diagnostic::unpositioned(
                    DiagCode::UnknownWallet,
                    format!("actions[{}]: wallet `{}` is not in initial_balances", i, wallet),
                ));
            }
            Action::Wait { slots: 0 } => diags.push(Diagnostic::unpositioned(
                DiagCode::InvalidWait,
                format!("actions[{}]: wait must be at least one slot", i),
            )),
            _ => {}
        }
    }
    if diags.is_empty() {
        Ok(scenario)
    } else {
        Err(diags)
    }
}

fn json_diagnostic(text: &str, e: &serde_json::Error) -> Diagnostic {
    let full = e.to_string();
    let message = match full.rfind(" at line ") {
        Some(i) if e.line() > 0 => full[..i].to_string(),
        _ => full,
    };
    let code = if message.starts_with(DUPLICATE_KEY) {
        DiagCode::DuplicateKey
    } else if message.contains(BAD_LITERAL) {
        DiagCode::LiteralType
    } else {
        DiagCode::MalformedScenario
    };
    if e.line() == 0 {
        return Diagnostic::unpositioned(code, message);
    }
    let line_start: usize = text.split_inclusive('\n').take(e.line() - 1).map(str::len).sum();
    let offset = (line_start + e.column().saturating_sub(1)).min(text.len());
    let column = e.column().max(1);
    Diagnostic::new(code, message, Span::new(e.line() as u32, column as u32, offset, 0))
}

impl Scenario {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    /// Role assignment as protocol roles.
    pub fn role_assignment(&self) -> impl Iterator<Item = (WalletId, RoleName)> + '_ {
        self.roles.iter().map(|(w, r)| (w.clone(), RoleName::new(r.as_str())))
    }

    /// Types every call against `decl`: the endpoint must exist, the
    /// argument count must match, and each literal must fit its parameter.
    /// Strings become `Str`, `Key` or `Tok` values as the parameter demands;
    /// a `HashedString` parameter receives the digest of the given text.
    /// Roles must be the protocol's own, and each must be assigned.
    pub fn resolve(&self, decl: &ProtocolDecl) -> Result<Vec<ResolvedAction>, Vec<Diagnostic>> {
        let mut params: BTreeMap<&str, &[BaseType]> = BTreeMap::new();
        for i in decl.interactions() {
            params.insert(i.name(), &i.params);
        }
        for (label, _) in decl.choice_labels() {
            params.insert(&label.node, &[]);
        }

        let mut diags = Vec::new();
        let declared: Vec<&RoleName> = decl.role_names().collect();
        for (wallet, role) in &self.roles {
            if !declared.iter().any(|r| r.as_str() == role) {
                diags.push(Diagnostic::unpositioned(
                    DiagCode::MalformedScenario,
                    format!(
                        "roles: wallet `{}` has role `{}`, which {} does not declare",
                        wallet, role, decl.name.node
                    ),
                ));
            }
        }
        for role in &declared {
            if !self.roles.values().any(|r| r == role.as_str()) {
                diags.push(Diagnostic::unpositioned(
                    DiagCode::MalformedScenario,
                    format!("roles: no wallet is assigned role `{}`", role),
                ));
            }
        }

        let mut out = Vec::with_capacity(self.actions.len());
        for (i, action) in self.actions.iter().enumerate() {
            match action {
                Action::Wait { slots } => out.push(ResolvedAction::Wait(*slots)),
                Action::Call { wallet, tag, args } => {
                    let Some(types) = params.get(tag.as_str()) else {
                        diags.push(Diagnostic::unpositioned(
                            DiagCode::UnknownEndpoint,
                            format!("actions[{}]: {} has no endpoint `{}`", i, decl.name.node, tag),
                        ));
                        continue;
                    };
                    if types.len() != args.len() {
                        diags.push(Diagnostic::unpositioned(
                            DiagCode::ArityMismatch,
                            format!("actions[{}]: `{}` takes {} argument(s), got {}", i, tag, types.len(), args.len()),
                        ));
                        continue;
                    }
                    let mut values = Vec::with_capacity(args.len());
                    for (j, (lit, ty)) in args.iter().zip(types.iter()).enumerate() {
                        match coerce(lit, *ty) {
                            Ok(v) => values.push(v),
                            Err(why) => diags.push(Diagnostic::unpositioned(
                                DiagCode::LiteralType,
                                format!("actions[{}].args[{}]: {}", i, j, why),
                            )),
                        }
                    }
                    if values.len() == args.len() {
                        out.push(ResolvedAction::Call { wallet: wallet.clone(), endpoint: tag.clone(), args: values });
                    }
                }
            }
        }
        if diags.is_empty() {
            Ok(out)
        } else {
            Err(diags)
        }
    }
}

/// Types one literal against a parameter type.
pub fn coerce(lit: &Literal, ty: BaseType) -> Result<FieldValue, String> {
    match (lit, ty) {
        (Literal::Str(s), BaseType::String) => Ok(FieldValue::Str(s.clone())),
        (Literal::Str(s), BaseType::HashedString) => Ok(FieldValue::Hashed(hash_string(s))),
        (Literal::Str(s), BaseType::PubKeyHash) => Ok(FieldValue::Key(WalletId::new(s.as_str()))),
        (Literal::Str(s), BaseType::Token) => Ok(FieldValue::Tok(s.clone())),
        (Literal::Int(n), BaseType::Value) => match Lovelace::try_from(*n) {
            Ok(v) => Ok(FieldValue::Funds(v)),
            Err(_) if *n < 0 => Err(format!("amount {} is negative", n)),
            Err(_) => Err(format!("amount {} is out of range", n)),
        },
        (lit, ty) => Err(format!("{} is not a valid {}", lit, ty)),
    }
}
