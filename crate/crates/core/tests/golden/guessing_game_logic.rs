//! Business logic for protocol `GuessingGame`.
//!
//! Roles: Owner, Player.
//! State contents: (HashedString, Value). The last value is the funds held by
//! the contract.
//!
//! A handler returns `HandlerResult::NewState` with the contents of the
//! next state, or `HandlerResult::Err` to refuse the call, in which case
//! nothing changes. Raising the funds value charges the caller the
//! difference; lowering it pays the difference to the caller.

#![allow(non_snake_case)]

use psc_core::logic::{CallContext, FieldValue, HandlerResult, HandlerTable, StateContents, TriggerSpec};

/// Endpoint `lock (String, Value)` called by Owner.
///
/// Arguments:
/// - `args[0]`: String
/// - `args[1]`: Value
///
/// `current` holds (HashedString, Value).
pub fn lock(ctx: &mut CallContext, args: &[FieldValue], current: &StateContents) -> HandlerResult {
    let _ = (ctx, args);
    // TODO: compute the contents of the next state.
    HandlerResult::NewState(current.clone())
}

/// Endpoint `guess (String)` called by Player.
///
/// Arguments:
/// - `args[0]`: String
///
/// `current` holds (HashedString, Value).
pub fn guess(ctx: &mut CallContext, args: &[FieldValue], current: &StateContents) -> HandlerResult {
    let _ = (ctx, args);
    // TODO: compute the contents of the next state.
    HandlerResult::NewState(current.clone())
}

/// Interrupt `closeGame ()`, run by the contract when one of its triggers fires.
///
/// Takes no arguments.
///
/// `current` holds (HashedString, Value).
pub fn closeGame(ctx: &mut CallContext, args: &[FieldValue], current: &StateContents) -> HandlerResult {
    let _ = (ctx, args);
    // TODO: compute the contents of the next state.
    HandlerResult::NewState(current.clone())
}

/// Funds trigger armed by `lock`; when it holds, `closeGame` runs.
///
/// Receives the arguments of `lock` (String, Value).
pub fn lockFundTrigger(args: &[FieldValue]) -> TriggerSpec {
    let _ = args;
    // TODO: condition on the contract's funds.
    TriggerSpec::funds(|funds| funds == 0)
}

/// Slot trigger armed by `lock`; when it holds, `closeGame` runs.
///
/// Receives the arguments of `lock` (String, Value).
pub fn lockSlotTrigger(args: &[FieldValue]) -> TriggerSpec {
    let _ = args;
    // TODO: slot at which the trigger fires.
    TriggerSpec::SlotAt(u64::MAX)
}

/// Every handler above, keyed by the names the simulator dispatches on.
pub fn handler_table() -> HandlerTable {
    HandlerTable::new()
        .endpoint("lock", lock)
        .endpoint("guess", guess)
        .endpoint("closeGame", closeGame)
        .trigger("lockFundTrigger", lockFundTrigger)
        .trigger("lockSlotTrigger", lockSlotTrigger)
}
