//! Business logic for protocol `Crowdfunding`.
//!
//! Roles: Contributor, Owner.
//! State contents: (Value). The last value is the funds held by
//! the contract.
//!
//! A handler returns `HandlerResult::NewState` with the contents of the
//! next state, or `HandlerResult::Err` to refuse the call, in which case
//! nothing changes. Raising the funds value charges the caller the
//! difference; lowering it pays the difference to the caller.

#![allow(non_snake_case)]

use psc_core::logic::{CallContext, FieldValue, HandlerResult, HandlerTable, StateContents};

/// Endpoint `init (Value)` called by Owner.
///
/// Arguments:
/// - `args[0]`: Value
///
/// `current` holds (Value).
pub fn init(ctx: &mut CallContext, args: &[FieldValue], current: &StateContents) -> HandlerResult {
    let _ = (ctx, args);
    // TODO: compute the contents of the next state.
    HandlerResult::NewState(current.clone())
}

/// Endpoint `contribute (Value)` called by Contributor.
///
/// Arguments:
/// - `args[0]`: Value
///
/// `current` holds (Value).
pub fn contribute(ctx: &mut CallContext, args: &[FieldValue], current: &StateContents) -> HandlerResult {
    let _ = (ctx, args);
    // TODO: compute the contents of the next state.
    HandlerResult::NewState(current.clone())
}

/// Choice `continue` taken by Owner.
///
/// Takes no arguments.
///
/// `current` holds (Value).
pub fn r#continue(ctx: &mut CallContext, args: &[FieldValue], current: &StateContents) -> HandlerResult {
    let _ = (ctx, args);
    // TODO: compute the contents of the next state.
    HandlerResult::NewState(current.clone())
}

/// Choice `closeCrowdfund` taken by Owner.
///
/// Takes no arguments.
///
/// `current` holds (Value).
pub fn closeCrowdfund(ctx: &mut CallContext, args: &[FieldValue], current: &StateContents) -> HandlerResult {
    let _ = (ctx, args);
    // TODO: compute the contents of the next state.
    HandlerResult::NewState(current.clone())
}

/// Every handler above, keyed by the names the simulator dispatches on.
pub fn handler_table() -> HandlerTable {
    HandlerTable::new()
        .endpoint("init", init)
        .endpoint("contribute", contribute)
        .endpoint("continue", r#continue)
        .endpoint("closeCrowdfund", closeCrowdfund)
}
