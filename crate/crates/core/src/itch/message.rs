use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Price in integer ten-thousandths of a dollar.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Price(pub i64);

impl Price {
    pub const SCALE: i64 = 10_000;

    pub fn from_ticks(ticks: i64) -> Self {
        Price(ticks)
    }

    pub fn ticks(self) -> i64 {
        self.0
    }

    pub fn to_f64(self) -> f64 {
        self.0 as f64 / Self::SCALE as f64
    }
}

/// Canonical rendering: at least two decimals, trailing zeros beyond the
/// second decimal dropped (`10.00`, `10.05`, `10.125`, `10.1234`).
impl fmt::Display for Price {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.0 < 0 { "-" } else { "" };
        let abs = self.0.unsigned_abs();
        let whole = abs / Self::SCALE as u64;
        let frac = abs % Self::SCALE as u64;
        let mut digits = format!("{frac:04}");
        while digits.len() > 2 && digits.ends_with('0') {
            digits.pop();
        }
        write!(f, "{sign}{whole}.{digits}")
    }
}

impl FromStr for Price {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let (whole, frac) = match s.split_once('.') {
            Some((w, f)) => (w, f),
            None => (s, ""),
        };
        if whole.is_empty() || !whole.bytes().all(|b| b.is_ascii_digit()) {
            return Err(format!("bad price `{s}`"));
        }
        if frac.len() > 4 || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(format!("bad price `{s}` (at most 4 decimals)"));
        }
        let whole: i64 = whole.parse().map_err(|_| format!("bad price `{s}`"))?;
        let mut frac_ticks = 0i64;
        for (k, b) in frac.bytes().enumerate() {
            frac_ticks += i64::from(b - b'0') * 10i64.pow(3 - k as u32);
        }
        whole
            .checked_mul(Self::SCALE)
            .and_then(|w| w.checked_add(frac_ticks))
            .map(Price)
            .ok_or_else(|| format!("price `{s}` out of range"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MsgType {
    /// B: submission of a buy limit order.
    SubmitBuy,
    /// S: submission of a sell limit order.
    SubmitSell,
    /// C: partial cancellation.
    CancelPart,
    /// D: full cancellation.
    CancelFull,
    /// E: partial execution.
    ExecutePart,
    /// F: full execution.
    ExecuteFull,
    /// X: bulk volume for cross events (ignored).
    Cross,
    /// T: execution of a non-displayed order (ignored).
    Hidden,
}

impl MsgType {
    pub fn code(self) -> char {
        match self {
            MsgType::SubmitBuy => 'B',
            MsgType::SubmitSell => 'S',
            MsgType::CancelPart => 'C',
            MsgType::CancelFull => 'D',
            MsgType::ExecutePart => 'E',
            MsgType::ExecuteFull => 'F',
            MsgType::Cross => 'X',
            MsgType::Hidden => 'T',
        }
    }

    pub fn from_code(code: &str) -> Option<Self> {
        Some(match code {
            "B" => MsgType::SubmitBuy,
            "S" => MsgType::SubmitSell,
            "C" => MsgType::CancelPart,
            "D" => MsgType::CancelFull,
            "E" => MsgType::ExecutePart,
            "F" => MsgType::ExecuteFull,
            "X" => MsgType::Cross,
            "T" => MsgType::Hidden,
            _ => return None,
        })
    }

    pub fn is_submission(self) -> bool {
        matches!(self, MsgType::SubmitBuy | MsgType::SubmitSell)
    }

    /// X and T messages are recognised but never touch the book.
    pub fn is_ignored(self) -> bool {
        matches!(self, MsgType::Cross | MsgType::Hidden)
    }
}

/// One order-flow event.
///
/// For D and F a volume of 0 means "the whole remainder"; a non-zero volume
/// must match the remaining volume of the referenced order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ItchMessage {
    pub timestamp: u64,
    pub kind: MsgType,
    pub order_id: u64,
    pub price: Option<Price>,
    pub volume: u64,
    pub stock: String,
}

impl ItchMessage {
    pub fn is_ignored(&self) -> bool {
        self.kind.is_ignored()
    }
}

impl fmt::Display for ItchMessage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{},{},{},",
            self.timestamp,
            self.kind.code(),
            self.order_id
        )?;
        if let Some(p) = self.price {
            write!(f, "{p}")?;
        }
        write!(f, ",{},{}", self.volume, self.stock)
    }
}

/// Parses one CSV message line. `line_no` is only used for error context.
pub fn parse_message_line(line: &str, line_no: usize) -> Result<ItchMessage> {
    let err = |msg: String| Error::Parse { line: line_no, msg };
    let fields: Vec<&str> = line.split(',').collect();
    if fields.len() != 6 {
        return Err(err(format!("expected 6 fields, found {}", fields.len())));
    }
    let timestamp: u64 = fields[0]
        .parse()
        .map_err(|_| err(format!("bad timestamp `{}`", fields[0])))?;
    let kind = MsgType::from_code(fields[1]).ok_or_else(|| {
        err(format!(
            "rejected line: unknown message type `{}`",
            fields[1]
        ))
    })?;
    let order_id: u64 = fields[2]
        .parse()
        .map_err(|_| err(format!("bad order id `{}`", fields[2])))?;
    let price = if fields[3].is_empty() {
        None
    } else {
        Some(fields[3].parse::<Price>().map_err(err)?)
    };
    let volume: u64 = fields[4]
        .parse()
        .map_err(|_| err(format!("bad volume `{}`", fields[4])))?;
    let stock = fields[5];
    if stock.is_empty() || stock.chars().any(char::is_whitespace) {
        return Err(err(format!("bad stock symbol `{stock}`")));
    }

    match kind {
        MsgType::SubmitBuy | MsgType::SubmitSell => {
            match price {
                Some(p) if p.0 > 0 => {}
                _ => return Err(err("submission needs a positive price".into())),
            }
            if volume == 0 {
                return Err(err("submission needs a positive volume".into()));
            }
        }
        MsgType::CancelPart | MsgType::ExecutePart => {
            if price.is_some() {
                return Err(err(format!("{} carries no price", kind.code())));
            }
            if volume == 0 {
                return Err(err(format!("{} needs a positive volume", kind.code())));
            }
        }
        MsgType::CancelFull | MsgType::ExecuteFull => {
            if price.is_some() {
                return Err(err(format!("{} carries no price", kind.code())));
            }
        }
        MsgType::Cross | MsgType::Hidden => {}
    }

    Ok(ItchMessage {
        timestamp,
        kind,
        order_id,
        price,
        volume,
        stock: stock.to_string(),
    })
}

/// Parses a whole message file. Blank lines are skipped; with `header` the
/// first line is skipped.
pub fn parse_messages(text: &str, header: bool) -> Result<Vec<ItchMessage>> {
    text.lines()
        .enumerate()
        .skip(usize::from(header))
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| parse_message_line(l.trim_end_matches('\r'), i + 1))
        .collect()
}

/// Splits a mixed stream into per-stock streams, keeping input order within
/// each stock. Stocks are returned in order of first appearance.
pub fn split_by_stock(messages: Vec<ItchMessage>) -> Vec<(String, Vec<ItchMessage>)> {
    let mut out: Vec<(String, Vec<ItchMessage>)> = Vec::new();
    let mut slot = std::collections::HashMap::new();
    for m in messages {
        let k = *slot.entry(m.stock.clone()).or_insert_with(|| {
            out.push((m.stock.clone(), Vec::new()));
            out.len() - 1
        });
        out[k].1.push(m);
    }
    out
}
