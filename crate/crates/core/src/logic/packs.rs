use super::*;

pub const PACK_NAMES: [&str; 4] = ["guessing_game", "ping_pong", "crowdfunding", "auction"];

/// Slot at which an unresolved guessing game closes itself.
pub const GG_DEFAULT_SLOT_HORIZON: Slot = 20;

const AUCTION_END_SLOT: Slot = 10;

pub fn register_pack(name: &str) -> Result<HandlerTable, LogicError> {
    match name {
        "guessing_game" => Ok(guessing_game()),
        "ping_pong" => Ok(ping_pong()),
        "crowdfunding" => Ok(crowdfunding()),
        "auction" => Ok(auction()),
        other => Err(LogicError::UnknownPack(other.to_string())),
    }
}

/// Pack conventionally used with a protocol of the given name.
pub fn pack_for_protocol(protocol: &str) -> Option<&'static str> {
    match protocol {
        p if p.ends_with("GuessingGame") => Some("guessing_game"),
        "PingPongRec" | "PingPong" => Some("ping_pong"),
        "Crowdfunding" => Some("crowdfunding"),
        "Auction" => Some("auction"),
        _ => None,
    }
}

fn str_arg(args: &[FieldValue], i: usize) -> Result<&str, String> {
    args.get(i).and_then(FieldValue::as_str).ok_or_else(|| format!("argument {} must be a string", i + 1))
}

fn funds_arg(args: &[FieldValue], i: usize) -> Result<Lovelace, String> {
    args.get(i).and_then(FieldValue::as_funds).ok_or_else(|| format!("argument {} must be a value", i + 1))
}

macro_rules! try_arg {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(msg) => return HandlerResult::Err(msg),
        }
    };
}

// Guessing game

pub fn gg_lock(secret: &str, amount: i64) -> HandlerResult {
    if amount <= 0 {
        return HandlerResult::Err(format!("Value must be positive, got {}", amount));
    }
    HandlerResult::NewState(StateContents::new(vec![FieldValue::Hashed(hash_string(secret))], amount as Lovelace))
}

/// Pays out the whole pot when `word` hashes to the stored secret.
pub fn gg_guess(word: &str, current: &StateContents) -> HandlerResult {
    match current.fields() {
        [FieldValue::Hashed(h)] if *h == hash_string(word) => HandlerResult::NewState(current.with_funds(0)),
        [FieldValue::Hashed(_)] => HandlerResult::Err("Wrong guess".to_string()),
        _ => HandlerResult::Err("Unexpected state contents".to_string()),
    }
}

pub fn gg_close_game(_current: &StateContents) -> HandlerResult {
    HandlerResult::NewState(StateContents::new(vec![FieldValue::Hashed(hash_string("Game over"))], 0))
}

fn guessing_game() -> HandlerTable {
    HandlerTable::new()
        .endpoint("lock", |ctx, args, _| {
            let secret = try_arg!(str_arg(args, 0));
            let value = try_arg!(funds_arg(args, 1));
            let result = gg_lock(secret, i64::try_from(value).unwrap_or(i64::MAX));
            if matches!(result, HandlerResult::NewState(_)) {
                ctx.log(format!("Initialising state machine with a locked secret and value {}", value));
            }
            result
        })
        .endpoint("guess", |ctx, args, current| {
            let word = try_arg!(str_arg(args, 0));
            let result = gg_guess(word, current);
            if matches!(result, HandlerResult::NewState(_)) {
                ctx.log("Congratulations, you won!");
            }
            result
        })
        .endpoint("closeGame", |ctx, _, current| {
            ctx.log("Closing the game");
            gg_close_game(current)
        })
        // funds <= 0, on unsigned amounts
        .trigger("lockFundTrigger", |_| TriggerSpec::funds(|funds| funds == 0))
        .trigger("lockSlotTrigger", |_| TriggerSpec::SlotAt(GG_DEFAULT_SLOT_HORIZON))
}

// Ping pong: interaction only, no business logic.

fn ping_pong() -> HandlerTable {
    let unchanged =
        |_: &mut CallContext, _: &[FieldValue], current: &StateContents| HandlerResult::NewState(current.with_funds(0));
    HandlerTable::new().endpoint("init", unchanged).endpoint("ping", unchanged).endpoint("pong", unchanged)
}

// Crowdfunding: contributions accumulate in the pot; the owner collects on close.

fn crowdfunding() -> HandlerTable {
    HandlerTable::new()
        .endpoint("init", |ctx, args, current| {
            let goal = try_arg!(funds_arg(args, 0));
            if goal == 0 {
                return HandlerResult::Err("Campaign goal must be positive".to_string());
            }
            ctx.log(format!("Campaign opened with a goal of {}", goal));
            HandlerResult::NewState(current.clone())
        })
        .endpoint("continue", |_, _, current| HandlerResult::NewState(current.clone()))
        .endpoint("contribute", |ctx, args, current| {
            let amount = try_arg!(funds_arg(args, 0));
            if amount == 0 {
                return HandlerResult::Err("Contribution must be positive".to_string());
            }
            let Some(total) = current.funds().checked_add(amount) else {
                return HandlerResult::Err("Contribution overflows the campaign total".to_string());
            };
            ctx.log(format!("Contribution of {} received, total {}", amount, total));
            HandlerResult::NewState(current.with_funds(total))
        })
        .endpoint("closeCrowdfund", |ctx, _, current| {
            ctx.log(format!("Campaign closed, collecting {}", current.funds()));
            HandlerResult::NewState(current.with_funds(0))
        })
}

// Auction: fields (highest bidder, highest bid); the pot holds the highest bid.

fn auction() -> HandlerTable {
    HandlerTable::new()
        .endpoint("beginAuction", |ctx, args, _| {
            let token = try_arg!(str_arg(args, 0));
            let reserve = try_arg!(funds_arg(args, 1));
            ctx.log(format!("Auction opened for token {:?} with reserve {}", token, reserve));
            HandlerResult::NewState(StateContents::new(
                vec![FieldValue::Key(WalletId::new("")), FieldValue::Funds(reserve)],
                0,
            ))
        })
        .endpoint("bid", |ctx, args, current| {
            let amount = try_arg!(funds_arg(args, 0));
            let Some(bidder) = ctx.caller.clone() else {
                return HandlerResult::Err("Bids need a bidder".to_string());
            };
            let [FieldValue::Key(leader), FieldValue::Funds(highest)] = current.fields() else {
                return HandlerResult::Err("Unexpected state contents".to_string());
            };
            if amount <= *highest {
                return HandlerResult::Err(format!("Bid of {} does not beat {}", amount, highest));
            }
            if !leader.as_str().is_empty() {
                ctx.pay(leader.clone(), current.funds());
            }
            ctx.log(format!("New highest bid: {} by {}", amount, bidder));
            HandlerResult::NewState(StateContents::new(
                vec![FieldValue::Key(bidder), FieldValue::Funds(amount)],
                amount,
            ))
        })
        .endpoint("endAuction", |ctx, _, current| {
            match current.fields() {
                [FieldValue::Key(leader), FieldValue::Funds(highest)] if !leader.as_str().is_empty() => {
                    ctx.log(format!("Auction over: token transferred to {} for {}", leader, highest));
                }
                _ => ctx.log("Auction over without bids"),
            }
            HandlerResult::NewState(current.with_funds(0))
        })
        .trigger("beginAuctionSlotTrigger", |_| TriggerSpec::SlotAt(AUCTION_END_SLOT))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn locked(secret: &str, funds: Lovelace) -> StateContents {
        StateContents::new(vec![FieldValue::Hashed(hash_string(secret))], funds)
    }

    #[test]
    fn lock_rules() {
        assert_eq!(gg_lock("Pink Floyd", 3), HandlerResult::NewState(locked("Pink Floyd", 3)));
        for bad in [0, -1] {
            match gg_lock("x", bad) {
                HandlerResult::Err(msg) => assert!(msg.contains(&bad.to_string())),
                other => panic!("{:?}", other),
            }
        }
    }

    #[test]
    fn guess_rules() {
        let state = locked("Pink Floyd", 3);
        assert_eq!(gg_guess("Pink Floyd", &state), HandlerResult::NewState(locked("Pink Floyd", 0)));
        assert!(matches!(gg_guess("Led Zeppelin", &state), HandlerResult::Err(_)));
        assert_eq!(gg_guess("", &locked("", 1)), HandlerResult::NewState(locked("", 0)));
    }

    #[test]
    fn guess_compares_digests_not_plaintext() {
        // a state holding the plaintext instead of its digest never matches
        let state = StateContents::new(vec![FieldValue::Hashed("Pink Floyd".into())], 3);
        assert!(matches!(gg_guess("Pink Floyd", &state), HandlerResult::Err(_)));
    }

    #[test]
    fn close_game_is_constant() {
        let over = locked("Game over", 0);
        assert_eq!(gg_close_game(&locked("x", 0)), HandlerResult::NewState(over.clone()));
        assert_eq!(gg_close_game(&locked("x", 5)), HandlerResult::NewState(over.clone()));
        assert_eq!(gg_close_game(&over), HandlerResult::NewState(over));
    }

    #[test]
    fn pack_tables() {
        let gg = register_pack("guessing_game").unwrap();
        assert_eq!(gg.endpoint_names().collect::<Vec<_>>(), vec!["closeGame", "guess", "lock"]);
        assert_eq!(gg.trigger_names().collect::<Vec<_>>(), vec!["lockFundTrigger", "lockSlotTrigger"]);

        let pp = register_pack("ping_pong").unwrap();
        assert_eq!(pp.endpoint_names().collect::<Vec<_>>(), vec!["init", "ping", "pong"]);
        let start = StateContents::new(vec![], 0);
        let mut ctx = CallContext::default();
        for name in ["init", "ping", "pong"] {
            let h = pp.get_endpoint(name).unwrap();
            assert_eq!(h(&mut ctx, &[], &start), HandlerResult::NewState(start.clone()));
        }

        let auction = register_pack("auction").unwrap();
        assert_eq!(auction.endpoint_names().collect::<Vec<_>>(), vec!["beginAuction", "bid", "endAuction"]);
        let hook = auction.get_trigger("beginAuctionSlotTrigger").unwrap();
        assert_eq!(hook(&[]).slot(), Some(10));

        assert_eq!(register_pack("nope").unwrap_err(), LogicError::UnknownPack("nope".into()));
    }

    #[test]
    fn default_fund_trigger_is_empty_pot() {
        let gg = register_pack("guessing_game").unwrap();
        let TriggerSpec::FundsPredicate(p) = gg.get_trigger("lockFundTrigger").unwrap()(&[]) else {
            panic!("expected funds predicate")
        };
        assert!(p(0));
        assert!(!p(1));
        let slot = gg.get_trigger("lockSlotTrigger").unwrap()(&[]);
        assert_eq!(slot.slot(), Some(GG_DEFAULT_SLOT_HORIZON));
    }

    #[test]
    fn handlers_do_not_mutate_on_error() {
        let gg = register_pack("guessing_game").unwrap();
        let state = locked("a", 3);
        let before = state.clone();
        let mut ctx = CallContext::new(Some("w".into()), 1);
        let r = gg.get_endpoint("guess").unwrap()(&mut ctx, &[FieldValue::Str("b".into())], &state);
        assert!(matches!(r, HandlerResult::Err(_)));
        assert_eq!(state, before);
        assert!(ctx.messages.is_empty());
    }

    #[test]
    fn auction_refunds_outbid_leader() {
        let a = register_pack("auction").unwrap();
        let bid = a.get_endpoint("bid").unwrap();
        let state = StateContents::new(vec![FieldValue::Key("alice".into()), FieldValue::Funds(10)], 10);
        let mut ctx = CallContext::new(Some("bob".into()), 4);
        let r = bid(&mut ctx, &[FieldValue::Funds(20)], &state);
        assert_eq!(
            r,
            HandlerResult::NewState(StateContents::new(vec![FieldValue::Key("bob".into()), FieldValue::Funds(20)], 20))
        );
        assert_eq!(ctx.payouts, vec![("alice".into(), 10)]);

        let mut ctx = CallContext::new(Some("bob".into()), 4);
        assert!(matches!(bid(&mut ctx, &[FieldValue::Funds(10)], &state), HandlerResult::Err(_)));
    }

    #[test]
    fn crowdfunding_accumulates() {
        let c = register_pack("crowdfunding").unwrap();
        let mut ctx = CallContext::default();
        let start = StateContents::new(vec![], 4);
        let r = c.get_endpoint("contribute").unwrap()(&mut ctx, &[FieldValue::Funds(5)], &start);
        assert_eq!(r, HandlerResult::NewState(StateContents::new(vec![], 9)));
        let r = c.get_endpoint("closeCrowdfund").unwrap()(&mut ctx, &[], &start);
        assert_eq!(r, HandlerResult::NewState(StateContents::new(vec![], 0)));
    }
}
