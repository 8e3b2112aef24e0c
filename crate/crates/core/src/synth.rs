//! Seeded synthetic order flow with planted cross-impacts.
//!
//! All stocks share one event clock. Each event is either a trade episode
//! of one stock (one trade, or two same-sign trades on consecutive
//! milliseconds) followed one millisecond later by the planted responses of
//! its targets, or a zero-mean background move of one stock's midpoint.
//! Events are separated by at least `min_gap_ms`, so nothing else happens
//! between a trade and its planted response.
//!
//! Every midpoint move is realized as exactly one change of the best quote:
//! either a new order that improves one side (the old best is then
//! cancelled behind it), or a deeper order on the other side followed by a
//! cancellation of the best there. Each side holds a single best order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::itch::{ItchMessage, MsgType, Price};

/// A planted response of `target` to trades of `source`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlantedImpact {
    pub source: usize,
    pub target: usize,
    /// Log-midpoint shift of the target per aligned trade.
    pub delta: f64,
    /// Chance that a trade episode triggers the response at all.
    pub probability: f64,
    /// `rho` in [-1, 1]: the shift follows the trade sign with probability
    /// `(1 + rho) / 2`, so the expected response is `probability * rho * delta`.
    pub sign_correlation: f64,
    /// Standard deviation of the Gaussian log jitter added to the shift.
    pub jitter: f64,
}

impl PlantedImpact {
    pub fn expected_response(&self) -> f64 {
        self.probability * self.sign_correlation * self.delta
    }
}

/// A thinly traded stock that strongly and deterministically impacts, and
/// is impacted by, every other stock.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HubConfig {
    pub stock: usize,
    pub delta: f64,
    /// Trade episodes per minute for the hub.
    pub trade_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthConfig {
    pub n_stocks: usize,
    /// Symbols; generated as `S00, S01, ...` when empty.
    pub symbols: Vec<String>,
    pub start_ms: u64,
    pub session_ms: u64,
    /// Trade episodes per minute for every stock without an override.
    pub trade_rate: f64,
    /// Optional per-stock trade episode rates (per minute).
    pub trade_rates: Vec<f64>,
    /// Background midpoint moves per minute per stock.
    pub quote_rate: f64,
    /// Log-midpoint standard deviation of background moves.
    pub background_sigma: f64,
    /// Target fraction of trades that fall into the multiple case on a
    /// planted pair with certain response.
    pub cluster_rate: f64,
    /// Chance per single-trade episode of a duplicate execution in the same
    /// millisecond (removed downstream by deduplication).
    pub collision_rate: f64,
    pub planted: Vec<PlantedImpact>,
    pub hub: Option<HubConfig>,
    /// Target quoted spread in price ticks of 0.0001.
    pub spread_ticks: i64,
    pub min_gap_ms: u64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            n_stocks: 12,
            symbols: Vec::new(),
            start_ms: 34_800_000,
            session_ms: 3_600_000,
            trade_rate: 12.0,
            trade_rates: Vec::new(),
            quote_rate: 12.0,
            background_sigma: 5e-4,
            cluster_rate: 0.35,
            collision_rate: 0.0,
            planted: Vec::new(),
            hub: None,
            spread_ticks: 200,
            min_gap_ms: 4,
            seed: 1,
        }
    }
}

impl SynthConfig {
    /// Demonstration setup: a ring of planted impacts `j -> j+1` with
    /// alternating strength, plus a hub at `n / 2`.
    pub fn demo(n: usize, seed: u64) -> Self {
        let planted = (0..n)
            .map(|j| PlantedImpact {
                source: j,
                target: (j + 1) % n,
                delta: if j % 2 == 0 { 1e-3 } else { 5e-4 },
                probability: 0.9,
                sign_correlation: 1.0,
                jitter: 2e-4,
            })
            .filter(|p| p.source != n / 2 && p.target != n / 2)
            .collect();
        SynthConfig {
            n_stocks: n,
            planted,
            hub: Some(HubConfig {
                stock: n / 2,
                delta: 4e-3,
                trade_rate: 2.0,
            }),
            seed,
            ..SynthConfig::default()
        }
    }

    pub fn symbol_list(&self) -> Vec<String> {
        if self.symbols.is_empty() {
            (0..self.n_stocks).map(|k| format!("S{k:02}")).collect()
        } else {
            self.symbols.clone()
        }
    }

    fn rates(&self) -> Vec<f64> {
        let mut r = if self.trade_rates.is_empty() {
            vec![self.trade_rate; self.n_stocks]
        } else {
            self.trade_rates.clone()
        };
        if let Some(h) = self.hub {
            r[h.stock] = h.trade_rate;
        }
        r
    }

    /// Planted map including the hub's links.
    pub fn all_planted(&self) -> Vec<PlantedImpact> {
        let mut p = self.planted.clone();
        if let Some(h) = self.hub {
            for k in (0..self.n_stocks).filter(|&k| k != h.stock) {
                for (source, target) in [(h.stock, k), (k, h.stock)] {
                    p.push(PlantedImpact {
                        source,
                        target,
                        delta: h.delta,
                        probability: 1.0,
                        sign_correlation: 1.0,
                        jitter: 0.0,
                    });
                }
            }
        }
        p
    }

    /// Episode probability of a two-trade cluster giving the configured
    /// multiple-case fraction: `2p / (1 + p) = f`.
    pub fn cluster_probability(&self) -> f64 {
        self.cluster_rate / (2.0 - self.cluster_rate)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.n_stocks < 2 {
            return bad(format!("need at least 2 stocks, got {}", self.n_stocks));
        }
        if !self.symbols.is_empty() && self.symbols.len() != self.n_stocks {
            return bad(format!(
                "{} symbols for {} stocks",
                self.symbols.len(),
                self.n_stocks
            ));
        }
        if !self.trade_rates.is_empty() && self.trade_rates.len() != self.n_stocks {
            return bad(format!(
                "{} trade rates for {} stocks",
                self.trade_rates.len(),
                self.n_stocks
            ));
        }
        let rates = self.rates();
        if rates
            .iter()
            .chain([&self.quote_rate])
            .any(|r| !(*r > 0.0 && r.is_finite()))
        {
            return bad("intensities must be positive".into());
        }
        for (name, v) in [
            ("cluster_rate", self.cluster_rate),
            ("collision_rate", self.collision_rate),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return bad(format!("{name} {v} outside [0, 1]"));
            }
        }
        if !(self.background_sigma >= 0.0) || self.spread_ticks < 2 || self.min_gap_ms < 3 {
            return bad(
                "background_sigma >= 0, spread_ticks >= 2 and min_gap_ms >= 3 required".into(),
            );
        }
        let planted = self.all_planted();
        let mut seen = std::collections::HashSet::new();
        for p in &planted {
            if p.source >= self.n_stocks || p.target >= self.n_stocks {
                return bad(format!("planted impact {p:?} refers to an unknown stock"));
            }
            if !p.delta.is_finite()
                || !(0.0..=1.0).contains(&p.probability)
                || !(-1.0..=1.0).contains(&p.sign_correlation)
                || !(p.jitter >= 0.0)
            {
                return bad(format!("invalid planted impact {p:?}"));
            }
            if !seen.insert((p.source, p.target)) {
                return bad(format!(
                    "duplicate planted pair {} -> {}",
                    p.source, p.target
                ));
            }
        }
        if let Some(h) = self.hub {
            if h.stock >= self.n_stocks || !h.delta.is_finite() {
                return bad(format!("invalid hub {h:?}"));
            }
        }
        // Events are spaced by the dead time; keep it a small share of the clock.
        let per_ms =
            (rates.iter().sum::<f64>() + self.quote_rate * self.n_stocks as f64) / 60_000.0;
        if per_ms * (self.min_gap_ms + 2) as f64 > 0.5 {
            return bad(format!(
                "total intensity {:.1}/s too high for {} ms event spacing",
                per_ms * 1000.0,
                self.min_gap_ms
            ));
        }
        Ok(())
    }
}

/// Realized counts per planted pair, written next to the configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantedTruth {
    pub impact: PlantedImpact,
    pub expected_response: f64,
    pub triggered: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthManifest {
    pub config: SynthConfig,
    pub symbols: Vec<String>,
    pub cluster_probability: f64,
    pub episodes: Vec<usize>,
    pub clusters: Vec<usize>,
    pub collisions: usize,
    pub background_moves: usize,
    pub planted: Vec<PlantedTruth>,
    pub hub: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthFlow {
    pub symbols: Vec<String>,
    /// All messages in global time order.
    pub messages: Vec<ItchMessage>,
    pub manifest: SynthManifest,
}

impl SynthFlow {
    /// Message file contents, one message per line, no header.
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        for m in &self.messages {
            s.push_str(&m.to_string());
            s.push('\n');
        }
        s
    }

    /// Per-stock streams in symbol order.
    pub fn streams(&self) -> Vec<Vec<ItchMessage>> {
        let mut out = vec![Vec::new(); self.symbols.len()];
        let index: std::collections::HashMap<&str, usize> = self
            .symbols
            .iter()
            .enumerate()
            .map(|(k, s)| (s.as_str(), k))
            .collect();
        for m in &self.messages {
            out[index[m.stock.as_str()]].push(m.clone());
        }
        out
    }
}

const RESTING_VOLUME: u64 = 100_000_000;

#[derive(Debug, Clone, Copy)]
struct Resting {
    price: i64,
    id: u64,
}

struct Book {
    symbol: String,
    bid: Resting,
    ask: Resting,
}

struct Generator<'a> {
    cfg: &'a SynthConfig,
    rng: ChaCha8Rng,
    books: Vec<Book>,
    next_id: u64,
    out: Vec<ItchMessage>,
}

impl Generator<'_> {
    fn emit(
        &mut self,
        t: u64,
        kind: MsgType,
        order_id: u64,
        price: Option<i64>,
        volume: u64,
        stock: usize,
    ) {
        self.out.push(ItchMessage {
            timestamp: t,
            kind,
            order_id,
            price: price.map(Price::from_ticks),
            volume,
            stock: self.books[stock].symbol.clone(),
        });
    }

    fn submit(&mut self, t: u64, stock: usize, buy: bool, price: i64) -> Result<Resting> {
        if price <= 0 {
            return Err(Error::Config(format!(
                "synthetic price of {} fell to zero; lower the move sizes",
                self.books[stock].symbol
            )));
        }
        self.next_id += 1;
        let id = self.next_id;
        let kind = if buy {
            MsgType::SubmitBuy
        } else {
            MsgType::SubmitSell
        };
        self.emit(t, kind, id, Some(price), RESTING_VOLUME, stock);
        Ok(Resting { price, id })
    }

    fn cancel(&mut self, t: u64, stock: usize, id: u64) {
        self.emit(t, MsgType::CancelFull, id, None, 0, stock);
    }

    /// Moves the midpoint by `x` in log terms (at least one tick on one side).
    fn shift(&mut self, t: u64, stock: usize, x: f64) -> Result<()> {
        let (bid, ask) = (self.books[stock].bid, self.books[stock].ask);
        let mid = 0.5 * (bid.price + ask.price) as f64;
        let mut d = (2.0 * mid * x.exp_m1()).round() as i64;
        if d == 0 {
            d = if x > 0.0 || (x == 0.0 && self.rng.random::<bool>()) {
                1
            } else {
                -1
            };
        }
        let spread = ask.price - bid.price;
        let target = self.cfg.spread_ticks;
        let step = d.abs();
        let improve =
            step < spread && (spread - step - target).abs() <= (spread + step - target).abs();
        match (d > 0, improve) {
            (true, true) => {
                let new = self.submit(t, stock, true, bid.price + step)?;
                self.cancel(t, stock, bid.id);
                self.books[stock].bid = new;
            }
            (true, false) => {
                let new = self.submit(t, stock, false, ask.price + step)?;
                self.cancel(t, stock, ask.id);
                self.books[stock].ask = new;
            }
            (false, true) => {
                let new = self.submit(t, stock, false, ask.price - step)?;
                self.cancel(t, stock, ask.id);
                self.books[stock].ask = new;
            }
            (false, false) => {
                let new = self.submit(t, stock, true, bid.price - step)?;
                self.cancel(t, stock, bid.id);
                self.books[stock].bid = new;
            }
        }
        Ok(())
    }

    /// Market order of `sign` executed against the opposite best order.
    fn execute(&mut self, t: u64, stock: usize, buy: bool) {
        let volume = 100 * self.rng.random_range(1..=5u64);
        let id = if buy {
            self.books[stock].ask.id
        } else {
            self.books[stock].bid.id
        };
        self.emit(t, MsgType::ExecutePart, id, None, volume, stock);
    }
}

pub fn generate(cfg: &SynthConfig) -> Result<SynthFlow> {
    cfg.validate()?;
    let n = cfg.n_stocks;
    let symbols = cfg.symbol_list();
    let planted = cfg.all_planted();
    let rates = cfg.rates();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let mut books = Vec::with_capacity(n);
    let mut next_id = 0;
    let mut out = Vec::new();
    for sym in &symbols {
        let mid = 200_000 + 10_000 * rng.random_range(0..80i64);
        let half = cfg.spread_ticks / 2;
        books.push(Book {
            symbol: sym.clone(),
            bid: Resting {
                price: mid - half,
                id: next_id + 1,
            },
            ask: Resting {
                price: mid - half + cfg.spread_ticks,
                id: next_id + 2,
            },
        });
        next_id += 2;
    }
    for b in &books {
        for (kind, r) in [(MsgType::SubmitBuy, b.bid), (MsgType::SubmitSell, b.ask)] {
            out.push(ItchMessage {
                timestamp: cfg.start_ms,
                kind,
                order_id: r.id,
                price: Some(Price::from_ticks(r.price)),
                volume: RESTING_VOLUME,
                stock: b.symbol.clone(),
            });
        }
    }
    let mut g = Generator {
        cfg,
        rng,
        books,
        next_id,
        out,
    };

    let bg_total = cfg.quote_rate * n as f64;
    let total_per_ms = (rates.iter().sum::<f64>() + bg_total) / 60_000.0;
    let wait = Exp::new(total_per_ms).map_err(|e| Error::Config(e.to_string()))?;
    let bg = Normal::new(0.0, cfg.background_sigma).map_err(|e| Error::Config(e.to_string()))?;
    let p_cluster = cfg.cluster_probability();
    let mut by_source: Vec<Vec<(usize, PlantedImpact)>> = vec![Vec::new(); n];
    for (k, p) in planted.iter().enumerate() {
        by_source[p.source].push((k, *p));
    }

    let mut manifest = SynthManifest {
        config: cfg.clone(),
        symbols: symbols.clone(),
        cluster_probability: p_cluster,
        episodes: vec![0; n],
        clusters: vec![0; n],
        collisions: 0,
        background_moves: 0,
        planted: planted
            .iter()
            .map(|p| PlantedTruth {
                impact: *p,
                expected_response: p.expected_response(),
                triggered: 0,
            })
            .collect(),
        hub: cfg.hub.map(|h| h.stock),
    };

    let end = cfg.start_ms + cfg.session_ms;
    let mut t = cfg.start_ms;
    loop {
        t += cfg.min_gap_ms + wait.sample(&mut g.rng).floor() as u64;
        if t + 3 > end {
            break;
        }
        let mut pick = g.rng.random::<f64>() * total_per_ms * 60_000.0;
        let mut source = None;
        for (j, r) in rates.iter().enumerate() {
            if pick < *r {
                source = Some(j);
                break;
            }
            pick -= r;
        }
        let Some(j) = source else {
            let i = ((pick / cfg.quote_rate) as usize).min(n - 1);
            let x = bg.sample(&mut g.rng);
            g.shift(t, i, x)?;
            manifest.background_moves += 1;
            continue;
        };

        manifest.episodes[j] += 1;
        let buy = g.rng.random::<bool>();
        let sign = if buy { 1.0 } else { -1.0 };
        g.execute(t, j, buy);
        if g.rng.random::<f64>() < p_cluster {
            manifest.clusters[j] += 1;
            t += 1;
            g.execute(t, j, buy);
        } else if cfg.collision_rate > 0.0 && g.rng.random::<f64>() < cfg.collision_rate {
            manifest.collisions += 1;
            g.execute(t, j, buy);
        }
        t += 1;
        for &(k, p) in &by_source[j] {
            // Draws happen for every link so the stream does not depend on outcomes.
            let fire = g.rng.random::<f64>() < p.probability;
            let aligned = g.rng.random::<f64>() < 0.5 * (1.0 + p.sign_correlation);
            let eta = if p.jitter > 0.0 {
                Normal::new(0.0, p.jitter)
                    .map_err(|e| Error::Config(e.to_string()))?
                    .sample(&mut g.rng)
            } else {
                0.0
            };
            if fire {
                let s = if aligned { sign } else { -sign };
                g.shift(t, p.target, s * p.delta + eta)?;
                manifest.planted[k].triggered += 1;
            }
        }
    }
    Ok(SynthFlow {
        symbols,
        messages: g.out,
        manifest,
    })
}
