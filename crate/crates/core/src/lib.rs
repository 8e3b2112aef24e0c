//! Immediate cross-impact analysis from order-flow messages.
//!
//! The crate covers the whole chain: replaying an ITCH-style message stream
//! into per-stock order books, pairing trades with the surrounding quotes of
//! every other stock, building response matrices, fitting stable laws to their
//! entries, and measuring asymmetry, antisymmetric spectra and the entropy of
//! impacts. [`pipeline`] wires the stages together with CSV/JSON artifacts.

pub mod asymmetry;
pub mod entropy;
pub mod error;
pub mod io;
pub mod itch;
pub mod network;
pub mod optim;
pub mod pipeline;
pub mod response;
pub mod seed;
pub mod spectra;
pub mod stable;
pub mod synth;

pub use error::{Error, Result};
