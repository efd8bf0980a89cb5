//! Achievable transmission rates for the two-user Gaussian interference
//! relay channel (IRC).
//!
//! Two source/destination pairs `S1 -> D1` and `S2 -> D2` share one
//! full-duplex relay `R`. This crate evaluates the rate pairs reachable under
//! three relaying protocols and picks the relay parameters that maximise them:
//!
//! * [`af`]: zero-delay scalar amplify-and-forward, including the closed-form
//!   per-user optimal amplification gain and a sum-rate gain search.
//! * [`df`]: decode-and-forward with cooperation degrees and relay power split.
//! * [`ef`]: estimate-and-forward with single-level or bi-level Wyner-Ziv
//!   compression at the relay.
//! * [`discrete`]: exact information measures on finite-alphabet joint
//!   distributions, used to evaluate the discrete-channel EF bounds.
//! * [`scenario`]: per-relay-position protocol comparison on a path-loss
//!   geometry (dominance maps, slices, SL-vs-BL maps).
//!
//! All rates are in bits per channel use. The crate is `no_std` and only
//! needs `alloc`.

#![no_std]

extern crate alloc;

pub mod af;
pub mod channel;
pub mod df;
pub mod discrete;
pub mod ef;
mod error;
pub mod scenario;

pub use channel::{capacity, ChannelInstance, NodeLayout, Point2, RatePair, User};
pub use error::{Error, Result};
