//! Business logic for protocol `Auction`.
//!
//! Roles: Seller, Buyer.
//! State contents: (PubKeyHash, Value, Value). The last value is the funds held by
//! the contract.
//!
//! A handler returns `HandlerResult::NewState` with the contents of the
//! next state, or `HandlerResult::Err` to refuse the call, in which case
//! nothing changes. Raising the funds value charges the caller the
//! difference; lowering it pays the difference to the caller.

#![allow(non_snake_case)]

use psc_core::logic::{CallContext, FieldValue, HandlerResult, HandlerTable, StateContents, TriggerSpec};

/// Endpoint `beginAuction (Token, Value)` called by Seller.
///
/// Arguments:
/// - `args[0]`: Token
/// - `args[1]`: Value
///
/// `current` holds (PubKeyHash, Value, Value).
pub fn beginAuction(ctx: &mut CallContext, args: &[FieldValue], current: &StateContents) -> HandlerResult {
    let _ = (ctx, args);
    // TODO: compute the contents of the next state.
    HandlerResult::NewState(current.clone())
}

/// Endpoint `bid (Value)` called by Buyer.
///
/// Arguments:
/// - `args[0]`: Value
///
/// `current` holds (PubKeyHash, Value, Value).
pub fn bid(ctx: &mut CallContext, args: &[FieldValue], current: &StateContents) -> HandlerResult {
    let _ = (ctx, args);
    // TODO: compute the contents of the next state.
    HandlerResult::NewState(current.clone())
}

/// Interrupt `endAuction ()`, run by the contract when one of its triggers fires.
///
/// Takes no arguments.
///
/// `current` holds (PubKeyHash, Value, Value).
pub fn endAuction(ctx: &mut CallContext, args: &[FieldValue], current: &StateContents) -> HandlerResult {
    let _ = (ctx, args);
    // TODO: compute the contents of the next state.
    HandlerResult::NewState(current.clone())
}

/// Slot trigger armed by `beginAuction`; when it holds, `endAuction` runs.
///
/// Receives the arguments of `beginAuction` (Token, Value).
pub fn beginAuctionSlotTrigger(args: &[FieldValue]) -> TriggerSpec {
    let _ = args;
    // Fixed by the protocol: `slot == 10`.
    TriggerSpec::SlotAt(10)
}

/// Every handler above, keyed by the names the simulator dispatches on.
pub fn handler_table() -> HandlerTable {
    HandlerTable::new()
        .endpoint("beginAuction", beginAuction)
        .endpoint("bid", bid)
        .endpoint("endAuction", endAuction)
        .trigger("beginAuctionSlotTrigger", beginAuctionSlotTrigger)
}
