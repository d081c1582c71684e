//! Exact computation and verification of extensive-form correlated
//! equilibria (EFCE) and behavioral correlated equilibria (BCE), and the
//! outcome-preserving conversion from the former to the latter.

pub mod checks;
pub mod convert;
pub mod deviation;
pub mod equilibrium;
pub mod error;
pub mod fixtures;
pub mod format;
pub mod game;
pub mod gap;
pub mod gen;
pub mod lp;
pub mod metrics;
pub mod oracles;
pub mod profile_io;
pub mod rational;
pub mod strategy;

pub use error::{Error, Result};
pub use format::{parse_game, serialize_game};
pub use game::{Game, GameTree, InfosetId, NodeId, SeqId, Sequence, TerminalId, ValidationReport, EMPTY_SEQ};
pub use rational::Rational;
pub use strategy::{BehaviorStrategy, MixtureOfProducts, PureProfile, PureStrategy, SequenceFormVector};
