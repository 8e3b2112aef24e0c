use std::fmt::Write as _;
use std::path::Path;

use super::book::OrderBook;
use super::message::{ItchMessage, Price};
use crate::error::{Error, Result};

/// Anything carrying a millisecond timestamp.
pub trait Stamped {
    fn timestamp(&self) -> u64;
}

/// One side of the best quote: price and aggregate volume at that price.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuoteSide {
    pub price: Price,
    pub volume: u64,
}

/// Best-quote snapshot, emitted whenever the best bid/ask price or volume
/// changes. A side is `None` while that side of the book is empty.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuoteRecord {
    pub timestamp: u64,
    pub bid: Option<QuoteSide>,
    pub ask: Option<QuoteSide>,
}

impl QuoteRecord {
    /// Midpoint in dollars; undefined unless both sides are present.
    pub fn midpoint(&self) -> Option<f64> {
        match (self.bid, self.ask) {
            (Some(b), Some(a)) => {
                Some((b.price.ticks() + a.price.ticks()) as f64 / 2.0 / Price::SCALE as f64)
            }
            _ => None,
        }
    }

    pub fn spread(&self) -> Option<f64> {
        match (self.bid, self.ask) {
            (Some(b), Some(a)) => {
                Some((a.price.ticks() - b.price.ticks()) as f64 / Price::SCALE as f64)
            }
            _ => None,
        }
    }
}

impl Stamped for QuoteRecord {
    fn timestamp(&self) -> u64 {
        self.timestamp
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Buy,
    Sell,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Buy => 1.0,
            Sign::Sell => -1.0,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Sign::Buy => Sign::Sell,
            Sign::Sell => Sign::Buy,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TradeEvent {
    pub timestamp: u64,
    pub price: Price,
    pub volume: u64,
    pub sign: Sign,
}

impl Stamped for TradeEvent {
    fn timestamp(&self) -> u64 {
        self.timestamp
    }
}

/// Quote and trade tapes of one stock.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Tapes {
    pub quotes: Vec<QuoteRecord>,
    pub trades: Vec<TradeEvent>,
}

/// Replays one stock's time-ordered stream.
pub fn reconstruct(stream: &[ItchMessage]) -> Result<Tapes> {
    let mut book = OrderBook::new();
    let mut tapes = Tapes::default();
    let mut last_t = 0u64;
    for (index, msg) in stream.iter().enumerate() {
        if let Some(first) = stream.first() {
            if msg.stock != first.stock {
                return Err(Error::StreamIntegrity {
                    index,
                    msg: format!("stock `{}` in stream of `{}`", msg.stock, first.stock),
                });
            }
        }
        if msg.timestamp < last_t {
            return Err(Error::StreamIntegrity {
                index,
                msg: format!("timestamp {} before {last_t}", msg.timestamp),
            });
        }
        last_t = msg.timestamp;
        let applied = book.apply(msg, index)?;
        tapes.trades.extend(applied.trade);
        tapes.quotes.extend(applied.quote);
    }
    Ok(tapes)
}

/// Keeps records with `start_ms <= t <= end_ms`.
pub fn filter_session<T: Stamped + Clone>(series: &[T], start_ms: u64, end_ms: u64) -> Vec<T> {
    series
        .iter()
        .filter(|r| (start_ms..=end_ms).contains(&r.timestamp()))
        .cloned()
        .collect()
}

/// Drops every trade that shares its millisecond with another trade of the
/// same stock. Returns the kept trades and the excluded fraction (0 for an
/// empty tape).
pub fn dedupe_millisecond_trades(trades: &[TradeEvent]) -> (Vec<TradeEvent>, f64) {
    let mut kept = Vec::with_capacity(trades.len());
    for group in trades.chunk_by(|a, b| a.timestamp == b.timestamp) {
        if group.len() == 1 {
            kept.push(group[0]);
        }
    }
    let fraction = if trades.is_empty() {
        0.0
    } else {
        (trades.len() - kept.len()) as f64 / trades.len() as f64
    };
    (kept, fraction)
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn opt<T: std::fmt::Display>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

pub fn quotes_to_csv(quotes: &[QuoteRecord]) -> String {
    let mut s = String::from("t_ms,bid,ask,bid_vol,ask_vol\n");
    for q in quotes {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            q.timestamp,
            opt(q.bid.map(|b| b.price)),
            opt(q.ask.map(|a| a.price)),
            opt(q.bid.map(|b| b.volume)),
            opt(q.ask.map(|a| a.volume)),
        );
    }
    s
}

pub fn trades_to_csv(trades: &[TradeEvent]) -> String {
    let mut s = String::from("t_ms,price,volume,sign\n");
    for t in trades {
        let sign = match t.sign {
            Sign::Buy => 1,
            Sign::Sell => -1,
        };
        let _ = writeln!(s, "{},{},{},{}", t.timestamp, t.price, t.volume, sign);
    }
    s
}

pub fn write_quotes_csv(path: &Path, quotes: &[QuoteRecord]) -> Result<()> {
    write_file(path, &quotes_to_csv(quotes))
}

pub fn write_trades_csv(path: &Path, trades: &[TradeEvent]) -> Result<()> {
    write_file(path, &trades_to_csv(trades))
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .skip(1)
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| (i + 1, l))
}

fn field<T: std::str::FromStr>(raw: &str, line: usize, name: &str) -> Result<T> {
    raw.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("bad {name} `{raw}`"),
    })
}

pub fn read_quotes_csv(path: &Path) -> Result<Vec<QuoteRecord>> {
    let text = read_file(path)?;
    let mut out = Vec::new();
    for (line, l) in data_lines(&text) {
        let f: Vec<&str> = l.split(',').collect();
        if f.len() != 5 {
            return Err(Error::Parse {
                line,
                msg: format!("{}: expected 5 fields", path.display()),
            });
        }
        let side = |p: &str, v: &str| -> Result<Option<QuoteSide>> {
            if p.is_empty() {
                return Ok(None);
            }
            let price = p
                .parse::<Price>()
                .map_err(|msg| Error::Parse { line, msg })?;
            Ok(Some(QuoteSide {
                price,
                volume: field(v, line, "volume")?,
            }))
        };
        out.push(QuoteRecord {
            timestamp: field(f[0], line, "timestamp")?,
            bid: side(f[1], f[3])?,
            ask: side(f[2], f[4])?,
        });
    }
    Ok(out)
}

pub fn read_trades_csv(path: &Path) -> Result<Vec<TradeEvent>> {
    let text = read_file(path)?;
    let mut out = Vec::new();
    for (line, l) in data_lines(&text) {
        let f: Vec<&str> = l.split(',').collect();
        if f.len() != 4 {
            return Err(Error::Parse {
                line,
                msg: format!("{}: expected 4 fields", path.display()),
            });
        }
        let sign = match f[3] {
            "1" => Sign::Buy,
            "-1" => Sign::Sell,
            other => {
                return Err(Error::Parse {
                    line,
                    msg: format!("bad trade sign `{other}`"),
                })
            }
        };
        out.push(TradeEvent {
            timestamp: field(f[0], line, "timestamp")?,
            price: f[1]
                .parse::<Price>()
                .map_err(|msg| Error::Parse { line, msg })?,
            volume: field(f[2], line, "volume")?,
            sign,
        });
    }
    Ok(out)
}

/// Per-stock summary row: trades, quotes and mean quoted spread in dollars.
#[derive(Debug, Clone, PartialEq)]
pub struct StockMeta {
    pub index: usize,
    pub symbol: String,
    pub n_trades: usize,
    pub n_quotes: usize,
    pub spread: f64,
}

pub fn stock_meta(index: usize, symbol: &str, tapes: &Tapes) -> StockMeta {
    let spreads: Vec<f64> = tapes
        .quotes
        .iter()
        .filter_map(QuoteRecord::spread)
        .collect();
    let spread = if spreads.is_empty() {
        0.0
    } else {
        spreads.iter().sum::<f64>() / spreads.len() as f64
    };
    StockMeta {
        index,
        symbol: symbol.to_string(),
        n_trades: tapes.trades.len(),
        n_quotes: tapes.quotes.len(),
        spread,
    }
}

pub fn write_stock_meta(path: &Path, rows: &[StockMeta]) -> Result<()> {
    let mut s = String::from("index,symbol,n_trades,n_quotes,spread\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{:.4}",
            r.index, r.symbol, r.n_trades, r.n_quotes, r.spread
        );
    }
    write_file(path, &s)
}

pub fn read_stock_meta(path: &Path) -> Result<Vec<StockMeta>> {
    let text = read_file(path)?;
    let mut out = Vec::new();
    for (line, l) in data_lines(&text) {
        let f: Vec<&str> = l.split(',').collect();
        if f.len() != 5 {
            return Err(Error::Parse {
                line,
                msg: format!("{}: expected 5 fields", path.display()),
            });
        }
        out.push(StockMeta {
            index: field(f[0], line, "index")?,
            symbol: f[1].to_string(),
            n_trades: field(f[2], line, "n_trades")?,
            n_quotes: field(f[3], line, "n_quotes")?,
            spread: field(f[4], line, "spread")?,
        });
    }
    Ok(out)
}
