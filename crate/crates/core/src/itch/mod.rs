//! ITCH-style order-flow ingestion.
//!
//! Messages arrive as canonical CSV lines (`timestamp_ms,msg_type,order_id,
//! price,volume,stock`). Each stock's stream is replayed through an
//! [`OrderBook`] under price-time priority, which yields a best-quote tape
//! (one record per change of the best bid/ask price or volume) and a trade
//! tape derived from executions of resting limit orders.

mod book;
mod message;
mod tape;

pub use book::{Applied, BestQuote, OrderBook, Side};
pub use message::{
    parse_message_line, parse_messages, split_by_stock, ItchMessage, MsgType, Price,
};
pub use tape::{
    dedupe_millisecond_trades, filter_session, quotes_to_csv, read_quotes_csv, read_stock_meta,
    read_trades_csv, reconstruct, stock_meta, trades_to_csv, write_quotes_csv, write_stock_meta,
    write_trades_csv, QuoteRecord, QuoteSide, Sign, Stamped, StockMeta, Tapes, TradeEvent,
};
