use std::collections::{BTreeMap, HashMap, VecDeque};

use super::message::{ItchMessage, MsgType, Price};
use super::tape::{QuoteRecord, QuoteSide, Sign, TradeEvent};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Bid,
    Ask,
}

#[derive(Debug, Clone, Copy)]
struct Resting {
    side: Side,
    price: Price,
    remaining: u64,
}

#[derive(Debug, Clone, Default)]
struct Level {
    queue: VecDeque<(u64, u64)>,
    total: u64,
}

/// Best bid and best ask (price, aggregate level volume), either may be absent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BestQuote {
    pub bid: Option<QuoteSide>,
    pub ask: Option<QuoteSide>,
}

/// What one message did to the book.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Applied {
    pub trade: Option<TradeEvent>,
    pub quote: Option<QuoteRecord>,
}

/// Order pool for a single stock.
///
/// Levels hold their orders in ascending id order; an emptied level is
/// removed together with its price. Submissions that would cross the book
/// are rejected, since executions arrive as explicit E/F messages.
#[derive(Debug, Clone, Default)]
pub struct OrderBook {
    bids: BTreeMap<Price, Level>,
    asks: BTreeMap<Price, Level>,
    orders: HashMap<u64, Resting>,
    last_submitted: Option<u64>,
    best: BestQuote,
}

impl OrderBook {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn best(&self) -> BestQuote {
        self.best
    }

    pub fn len(&self) -> usize {
        self.orders.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orders.is_empty()
    }

    /// Remaining volume of a resting order.
    pub fn remaining(&self, order_id: u64) -> Option<u64> {
        self.orders.get(&order_id).map(|o| o.remaining)
    }

    /// Side of a resting order.
    pub fn side_of(&self, order_id: u64) -> Option<Side> {
        self.orders.get(&order_id).map(|o| o.side)
    }

    /// Order ids queued at a price level, front first.
    pub fn level_orders(&self, side: Side, price: Price) -> Vec<u64> {
        self.levels(side)
            .get(&price)
            .map(|l| l.queue.iter().map(|&(id, _)| id).collect())
            .unwrap_or_default()
    }

    fn levels(&self, side: Side) -> &BTreeMap<Price, Level> {
        match side {
            Side::Bid => &self.bids,
            Side::Ask => &self.asks,
        }
    }

    fn levels_mut(&mut self, side: Side) -> &mut BTreeMap<Price, Level> {
        match side {
            Side::Bid => &mut self.bids,
            Side::Ask => &mut self.asks,
        }
    }

    fn compute_best(&self) -> BestQuote {
        let side = |(p, l): (&Price, &Level)| QuoteSide {
            price: *p,
            volume: l.total,
        };
        BestQuote {
            bid: self.bids.iter().next_back().map(side),
            ask: self.asks.iter().next().map(side),
        }
    }

    /// Applies one message. `index` is the message position used in errors.
    pub fn apply(&mut self, msg: &ItchMessage, index: usize) -> Result<Applied> {
        let fail = |msg: String| Error::StreamIntegrity { index, msg };
        let mut trade = None;

        match msg.kind {
            MsgType::Cross | MsgType::Hidden => return Ok(Applied::default()),
            MsgType::SubmitBuy | MsgType::SubmitSell => {
                let side = if msg.kind == MsgType::SubmitBuy {
                    Side::Bid
                } else {
                    Side::Ask
                };
                let price = msg
                    .price
                    .ok_or_else(|| fail("submission without price".into()))?;
                if self.orders.contains_key(&msg.order_id) {
                    return Err(fail(format!("duplicate order id {}", msg.order_id)));
                }
                if let Some(last) = self.last_submitted {
                    if msg.order_id <= last {
                        return Err(fail(format!(
                            "order id {} not above previous submission {last}",
                            msg.order_id
                        )));
                    }
                }
                let crosses = match side {
                    Side::Bid => self.best.ask.is_some_and(|a| price >= a.price),
                    Side::Ask => self.best.bid.is_some_and(|b| price <= b.price),
                };
                if crosses {
                    return Err(fail(format!(
                        "submission {} at {price} crosses the book",
                        msg.order_id
                    )));
                }
                let level = self.levels_mut(side).entry(price).or_default();
                level.queue.push_back((msg.order_id, msg.volume));
                level.total += msg.volume;
                self.orders.insert(
                    msg.order_id,
                    Resting {
                        side,
                        price,
                        remaining: msg.volume,
                    },
                );
                self.last_submitted = Some(msg.order_id);
            }
            MsgType::CancelPart
            | MsgType::CancelFull
            | MsgType::ExecutePart
            | MsgType::ExecuteFull => {
                let order = *self
                    .orders
                    .get(&msg.order_id)
                    .ok_or_else(|| fail(format!("unknown order id {}", msg.order_id)))?;
                let full = matches!(msg.kind, MsgType::CancelFull | MsgType::ExecuteFull);
                let amount = if full {
                    if msg.volume != 0 && msg.volume != order.remaining {
                        return Err(fail(format!(
                            "{} volume {} differs from remaining {} of order {}",
                            msg.kind.code(),
                            msg.volume,
                            order.remaining,
                            msg.order_id
                        )));
                    }
                    order.remaining
                } else {
                    if msg.volume > order.remaining {
                        return Err(fail(format!(
                            "{} volume {} exceeds remaining {} of order {}",
                            msg.kind.code(),
                            msg.volume,
                            order.remaining,
                            msg.order_id
                        )));
                    }
                    msg.volume
                };
                self.reduce(msg.order_id, order, amount);
                if matches!(msg.kind, MsgType::ExecutePart | MsgType::ExecuteFull) {
                    // The market order sits on the opposite side of the executed limit order.
                    let sign = match order.side {
                        Side::Ask => Sign::Buy,
                        Side::Bid => Sign::Sell,
                    };
                    trade = Some(TradeEvent {
                        timestamp: msg.timestamp,
                        price: order.price,
                        volume: amount,
                        sign,
                    });
                }
            }
        }

        let best = self.compute_best();
        let quote = (best != self.best).then(|| QuoteRecord {
            timestamp: msg.timestamp,
            bid: best.bid,
            ask: best.ask,
        });
        self.best = best;
        Ok(Applied { trade, quote })
    }

    fn reduce(&mut self, id: u64, order: Resting, amount: u64) {
        let levels = self.levels_mut(order.side);
        let level = levels
            .get_mut(&order.price)
            .expect("resting order has a level");
        level.total -= amount;
        let left = order.remaining - amount;
        if left == 0 {
            level.queue.retain(|&(oid, _)| oid != id);
            if level.queue.is_empty() {
                levels.remove(&order.price);
            }
            self.orders.remove(&id);
        } else {
            if let Some(slot) = level.queue.iter_mut().find(|(oid, _)| *oid == id) {
                slot.1 = left;
            }
            self.orders.get_mut(&id).expect("order present").remaining = left;
        }
    }
}
