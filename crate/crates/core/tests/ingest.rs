use std::collections::HashMap;

use cross_impact::itch::{
    parse_messages, quotes_to_csv, reconstruct, trades_to_csv, ItchMessage, MsgType, Price,
};
use proptest::prelude::*;

const FIXTURES: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures");

fn fixture(name: &str) -> String {
    std::fs::read_to_string(format!("{FIXTURES}/{name}")).unwrap()
}

#[test]
fn golden_script_matches_hand_simulation() {
    let msgs = parse_messages(&fixture("golden_messages.csv"), false).unwrap();
    assert_eq!(msgs.len(), 20);
    let tapes = reconstruct(&msgs).unwrap();
    assert_eq!(quotes_to_csv(&tapes.quotes), fixture("golden_quotes.csv"));
    assert_eq!(trades_to_csv(&tapes.trades), fixture("golden_trades.csv"));
}

#[test]
fn golden_lines_round_trip() {
    for line in fixture("golden_messages.csv").lines() {
        let m = cross_impact::itch::parse_message_line(line, 1).unwrap();
        assert_eq!(m.to_string(), line);
    }
}

#[derive(Debug, Clone)]
enum Action {
    Submit { buy: bool, offset: i64, volume: u64 },
    Touch { pick: usize, kind: u8, frac: f64 },
}

fn arb_action() -> impl Strategy<Value = Action> {
    prop_oneof![
        (any::<bool>(), 1i64..20, 1u64..500).prop_map(|(buy, offset, volume)| Action::Submit {
            buy,
            offset,
            volume
        }),
        (any::<usize>(), 0u8..4, 0.0f64..1.0).prop_map(|(pick, kind, frac)| Action::Touch {
            pick,
            kind,
            frac
        }),
    ]
}

/// Turns abstract actions into a stream that is valid by construction.
fn build_stream(actions: &[Action]) -> Vec<ItchMessage> {
    let mut live: Vec<(u64, bool, i64, u64)> = Vec::new();
    let mut out = Vec::new();
    let mut next_id = 1u64;
    for (t, a) in actions.iter().enumerate() {
        let t = t as u64 / 2;
        match *a {
            Action::Submit {
                buy,
                offset,
                volume,
            } => {
                let best_bid = live.iter().filter(|o| o.1).map(|o| o.2).max();
                let best_ask = live.iter().filter(|o| !o.1).map(|o| o.2).min();
                let price = if buy {
                    best_ask.map_or(1000 - offset, |a| a - offset)
                } else {
                    best_bid.map_or(1000 + offset, |b| b + offset)
                };
                if price <= 0 {
                    continue;
                }
                out.push(ItchMessage {
                    timestamp: t,
                    kind: if buy {
                        MsgType::SubmitBuy
                    } else {
                        MsgType::SubmitSell
                    },
                    order_id: next_id,
                    price: Some(Price(price * 100)),
                    volume,
                    stock: "P".into(),
                });
                live.push((next_id, buy, price, volume));
                next_id += 1;
            }
            Action::Touch { pick, kind, frac } => {
                if live.is_empty() {
                    continue;
                }
                let k = pick % live.len();
                let (id, _, _, rem) = live[k];
                let partial = ((rem as f64 * frac) as u64).max(1);
                let (kind, vol) = match kind {
                    0 => (MsgType::CancelPart, partial),
                    1 => (MsgType::CancelFull, 0),
                    2 => (MsgType::ExecutePart, partial),
                    _ => (MsgType::ExecuteFull, rem),
                };
                let left = match kind {
                    MsgType::CancelPart | MsgType::ExecutePart => rem - vol,
                    _ => 0,
                };
                out.push(ItchMessage {
                    timestamp: t,
                    kind,
                    order_id: id,
                    price: None,
                    volume: vol,
                    stock: "P".into(),
                });
                if left == 0 {
                    live.remove(k);
                } else {
                    live[k].3 = left;
                }
            }
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn replay_invariants(actions in prop::collection::vec(arb_action(), 1..200)) {
        let stream = build_stream(&actions);
        let tapes = reconstruct(&stream).unwrap();

        // executed volume per order never exceeds what was submitted
        let submitted: HashMap<u64, u64> = stream
            .iter()
            .filter(|m| m.kind.is_submission())
            .map(|m| (m.order_id, m.volume))
            .collect();
        let mut executed: HashMap<u64, u64> = HashMap::new();
        let mut trades = tapes.trades.iter();
        for m in &stream {
            if matches!(m.kind, MsgType::ExecutePart | MsgType::ExecuteFull) {
                let t = trades.next().unwrap();
                *executed.entry(m.order_id).or_default() += t.volume;
            }
        }
        for (id, v) in executed {
            prop_assert!(v <= submitted[&id]);
        }

        // change-triggered quotes
        for w in tapes.quotes.windows(2) {
            prop_assert!(w[0].bid != w[1].bid || w[0].ask != w[1].ask);
        }
        for q in &tapes.quotes {
            if let (Some(b), Some(a)) = (q.bid, q.ask) {
                prop_assert!(b.price < a.price);
            }
        }

        // determinism
        let again = reconstruct(&stream).unwrap();
        prop_assert_eq!(quotes_to_csv(&again.quotes), quotes_to_csv(&tapes.quotes));
        prop_assert_eq!(trades_to_csv(&again.trades), trades_to_csv(&tapes.trades));
    }
}
