//! Protocol language for smart contracts.
//!
//! A protocol names the roles that may call each endpoint of a contract and
//! the order in which they may do so. This crate parses protocol sources,
//! checks them, translates them into finite state automata, generates
//! business-logic stubs, and runs contracts on a simulated slot-based ledger
//! where the automaton guards every endpoint call.

pub mod ast;
pub mod automaton;
pub mod codegen;
pub mod diagnostic;
pub mod lexer;
pub mod logic;
pub mod parser;
pub mod scenario;
pub mod simulator;
pub mod validate;

pub use ast::{BaseType, ProtocolDecl, ProtocolItem, RoleName};
pub use automaton::{build_automaton, Automaton, EdgeKind, EdgeLabel, StateId};
pub use codegen::{emit_manifest, emit_stubs, Manifest};
pub use diagnostic::{DiagCode, Diagnostic, Span};
pub use lexer::tokenize;
pub use logic::{register_pack, FieldValue, HandlerResult, HandlerTable, StateContents, WalletId};
pub use parser::parse_protocol;
pub use scenario::{load_scenario, Scenario};
pub use simulator::{run_scenario, LedgerState, Mode, Simulation};
pub use validate::validate;
