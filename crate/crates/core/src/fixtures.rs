//! Bundled example games and profiles.

use crate::format::parse_game;
use crate::game::Game;
use crate::profile_io::{parse_profile, read_profile};
use crate::strategy::MixtureOfProducts;

/// Extended battle of the sexes.
pub const EBOS_JSON: &str = include_str!("../fixtures/ebos.game.json");
/// One-player game: `L` ends with 2, `R` leads to infoset `B` with `L'` → 1, `R'` → 0.
pub const LRR_JSON: &str = include_str!("../fixtures/lrr.game.json");
/// Chance mixes a matching-pennies subtree with a coordination subtree P2 can exit.
pub const SURJ_JSON: &str = include_str!("../fixtures/surj.game.json");

/// EBOS: uniform over `(¬U, X1|U, X1|¬U; X2)` and `(¬U, Y1|U, Y1|¬U; Y2)`.
pub const EBOS_PI_JSON: &str = include_str!("../fixtures/ebos.pi.json");
/// LRR: the behavior strategy `(0.9 L + 0.1 R, R')`.
pub const LRR_PI_BEHAVIOR_JSON: &str = include_str!("../fixtures/lrr.pi.behavior.json");
/// LRR: the pure strategy `(L, R')`.
pub const LRR_LRPRIME_JSON: &str = include_str!("../fixtures/lrr.lrprime.json");
/// SURJ: P2 exits and perfectly coordinates with P1 inside the coordination subtree.
pub const SURJ_BCE_JSON: &str = include_str!("../fixtures/surj.bce.json");

fn load(text: &str) -> Game {
    Game::new(parse_game(text).expect("bundled game parses")).expect("bundled game validates")
}

pub fn ebos() -> Game {
    load(EBOS_JSON)
}

pub fn lrr() -> Game {
    load(LRR_JSON)
}

pub fn surj() -> Game {
    load(SURJ_JSON)
}

pub fn ebos_pi() -> MixtureOfProducts {
    parse_profile(&ebos(), EBOS_PI_JSON).expect("bundled profile parses")
}

/// The behavior strategy as a recommendation device: both local draws independent.
pub fn lrr_pi() -> MixtureOfProducts {
    let g = lrr();
    read_profile(&g, LRR_PI_BEHAVIOR_JSON).and_then(|d| d.expanded(&g, 16)).expect("bundled profile parses")
}

/// The same behavior strategy after the sequence-form decomposition.
pub fn lrr_pi_decomposed() -> MixtureOfProducts {
    parse_profile(&lrr(), LRR_PI_BEHAVIOR_JSON).expect("bundled profile parses")
}

pub fn lrr_lrprime() -> MixtureOfProducts {
    parse_profile(&lrr(), LRR_LRPRIME_JSON).expect("bundled profile parses")
}

pub fn surj_bce() -> MixtureOfProducts {
    parse_profile(&surj(), SURJ_BCE_JSON).expect("bundled profile parses")
}

/// `(name, game document)` for every bundled game.
pub fn all() -> [(&'static str, &'static str); 3] {
    [("ebos", EBOS_JSON), ("lrr", LRR_JSON), ("surj", SURJ_JSON)]
}
