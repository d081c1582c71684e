//! Counterfactual best responses and the EFCE → BCE conversion.

use std::collections::BTreeMap;

use serde_json::{json, Value};

use crate::deviation::{regret, Deviation, Scope};
use crate::game::{Game, InfosetId, SeqId, EMPTY_SEQ};
use crate::metrics::{conditional_reach, ConditionalReach};
use crate::profile_io::pure_to_labels;
use crate::rational::Rational;
use crate::strategy::{Component, MixtureOfProducts, PureStrategy};

/// `Σ_{z : σ_i(z) = s} u_i(z)·p(z)·w(z)` for every sequence `s` of player `i`.
pub(crate) fn leaf_values(game: &Game, i: usize, w: &[Rational]) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); game.num_sequences(i)];
    for (z, wz) in w.iter().enumerate() {
        if !wz.is_zero() {
            out[game.terminal_seq(z, i)] += game.payoff(z, i) * game.chance_reach(z) * wz;
        }
    }
    out
}

/// Backward induction over the player's infosets at or below `top` (every
/// infoset when `None`). Ties go to the lexicographically first label;
/// infosets outside the traversal keep their lexicographically first action.
pub(crate) fn backward_induction(
    game: &Game,
    i: usize,
    leaf: &[Rational],
    top: Option<InfosetId>,
) -> (PureStrategy, Rational) {
    let mut x = PureStrategy::lex_first(game, i);
    let value = match top {
        None => best_seq(game, i, leaf, EMPTY_SEQ, &mut x),
        Some(iid) => best_infoset(game, i, leaf, iid, &mut x),
    };
    (x, value)
}

fn best_seq(game: &Game, i: usize, leaf: &[Rational], s: SeqId, x: &mut PureStrategy) -> Rational {
    let mut v = leaf[s].clone();
    for &k in &game.seq_table(i).child_infosets[s] {
        v += best_infoset(game, i, leaf, k, x);
    }
    v
}

fn best_infoset(game: &Game, i: usize, leaf: &[Rational], iid: InfosetId, x: &mut PureStrategy) -> Rational {
    let info = game.infoset(iid);
    let mut best: Option<(usize, Rational)> = None;
    for &a in &info.lex {
        let v = best_seq(game, i, leaf, info.seq(a), x);
        if best.as_ref().is_none_or(|(_, b)| v > *b) {
            best = Some((a, v));
        }
    }
    let (a, v) = best.expect("infosets have actions");
    x.set_action(game, iid, a);
    v
}

/// One row of a [`CbrTable`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cbr {
    pub strategy: PureStrategy,
    /// Conditional counterfactual value at the sequence's infoset (whole game for `∅`).
    pub value: Rational,
    pub reach: ConditionalReach,
    /// The conditioning event had zero mass and the unconditional law was used.
    pub fallback: bool,
}

/// Counterfactual best responses `x_i^{σ}` for the sequences they were asked for.
#[derive(Clone, Debug, Default)]
pub struct CbrTable {
    pub player: usize,
    pub rows: BTreeMap<SeqId, Cbr>,
}

impl CbrTable {
    pub fn new(player: usize) -> Self {
        CbrTable { player, rows: BTreeMap::new() }
    }

    pub fn get_or_compute(&mut self, game: &Game, pi: &MixtureOfProducts, seq: SeqId) -> &Cbr {
        let player = self.player;
        self.rows.entry(seq).or_insert_with(|| counterfactual_best_response(game, pi, player, seq))
    }
}

pub fn counterfactual_best_response(game: &Game, pi: &MixtureOfProducts, i: usize, seq: SeqId) -> Cbr {
    let mut reach = conditional_reach(game, pi, i, seq);
    let fallback = reach.event_mass.is_zero();
    if fallback {
        reach = conditional_reach(game, pi, i, EMPTY_SEQ);
    }
    let top = game.seq_infoset_action(i, seq).map(|(j, _)| j);
    let leaf = leaf_values(game, i, &reach.reach);
    let (strategy, raw) = backward_induction(game, i, &leaf, top);
    let value = raw / &reach.event_mass;
    Cbr { strategy, value, reach, fallback }
}

pub fn cbr_to_json(game: &Game, seq: SeqId, player: usize, cbr: &Cbr) -> Value {
    json!({
        "player": game.player_name(player),
        "sequence": game.seq_name(player, seq),
        "strategy": pure_to_labels(game, &cbr.strategy),
        "value": cbr.value.to_string(),
        "value_decimal": cbr.value.to_decimal(20),
        "event_mass": cbr.reach.event_mass.to_string(),
        "fallback": cbr.fallback,
    })
}

/// The sequence `Ja` at which `x` leaves the path to `iid`: `x(Ja) = 1`,
/// `J ⪯ I`, `Ja ⋠ I`. `None` when `x` reaches `iid`.
pub fn deviation_point(game: &Game, x: &PureStrategy, iid: InfosetId) -> Option<SeqId> {
    game.seq_path(x.player, game.infoset(iid).parent_seq)
        .into_iter()
        .find(|&(j, a)| x.action_at(game, j) != a)
        .map(|(j, _)| game.infoset(j).seq(x.action_at(game, j)))
}

/// Replace every off-path local action of every support strategy with the
/// counterfactual best response at its deviation point. Weights and
/// structure are kept as they are.
pub fn efce_to_bce(game: &Game, pi: &MixtureOfProducts) -> MixtureOfProducts {
    let mut tables: Vec<CbrTable> = (0..game.num_players()).map(CbrTable::new).collect();
    let components = pi
        .components
        .iter()
        .map(|c| Component {
            alpha: c.alpha.clone(),
            strategies: c
                .strategies
                .iter()
                .enumerate()
                .map(|(i, list)| {
                    list.iter()
                        .map(|(beta, x)| (beta.clone(), replace_off_path(game, pi, &mut tables[i], x)))
                        .collect()
                })
                .collect(),
        })
        .collect();
    MixtureOfProducts { components }
}

fn replace_off_path(game: &Game, pi: &MixtureOfProducts, table: &mut CbrTable, x: &PureStrategy) -> PureStrategy {
    let reach = x.reach(game);
    let mut out = x.clone();
    for &iid in game.player_infosets(x.player) {
        if reach[game.infoset(iid).parent_seq] {
            continue;
        }
        let ja = deviation_point(game, x, iid).expect("off-path infoset has a deviation point");
        debug_assert!(reach[ja]);
        let cbr = table.get_or_compute(game, pi, ja);
        out.set_action(game, iid, cbr.strategy.action_at(game, iid));
    }
    out
}

/// `R_i(π, φ^{⪰I})`: the ordinary regret of `dev` applied only at infosets `J ⪰ I`.
pub fn restricted_deviation_value(game: &Game, pi: &MixtureOfProducts, dev: &Deviation, iid: InfosetId) -> Rational {
    regret(game, pi, dev, Scope::RestrictedFrom(iid))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deviation::Rule;
    use crate::fixtures;
    use crate::metrics::outcome_equivalent;
    use crate::rational::q;
    use crate::strategy::PureProfile;

    fn pure(g: &Game, p: usize, labels: &[&str]) -> PureStrategy {
        let actions = g
            .player_infosets(p)
            .iter()
            .zip(labels)
            .map(|(&i, l)| g.infoset(i).action_index(l).unwrap())
            .collect();
        PureStrategy { player: p, actions }
    }

    #[test]
    fn ebos_cbr_after_not_u() {
        let g = fixtures::ebos();
        let pi = fixtures::ebos_pi();
        let cbr = counterfactual_best_response(&g, &pi, 0, g.parse_seq(0, "root:¬U").unwrap());
        assert_eq!(cbr.strategy, pure(&g, 0, &["U", "X1", "X1"]));
        assert_eq!(cbr.value, q("3/2"));
        assert!(!cbr.fallback);
    }

    #[test]
    fn lrr_cbr_after_l() {
        let g = fixtures::lrr();
        let cbr = counterfactual_best_response(&g, &fixtures::lrr_pi(), 0, g.parse_seq(0, "R0:L").unwrap());
        assert_eq!(cbr.strategy, pure(&g, 0, &["L", "L'"]));
        assert_eq!(cbr.value, q("2"));
    }

    #[test]
    fn zero_payoff_cbr_is_lex_first() {
        let t = crate::parse_game(
            r#"{"players":["A"],"root":{"kind":"decision","player":0,"infoset":"r","actions":[
                {"label":"b","child":{"kind":"terminal","payoffs":["0"]}},
                {"label":"a","child":{"kind":"decision","player":0,"infoset":"s","actions":[
                    {"label":"y","child":{"kind":"terminal","payoffs":["0"]}},
                    {"label":"x","child":{"kind":"terminal","payoffs":["0"]}}]}}]}}"#,
        )
        .unwrap();
        let g = Game::new(t).unwrap();
        let pi = MixtureOfProducts::pure(PureProfile(vec![pure(&g, 0, &["b", "y"])]));
        let cbr = counterfactual_best_response(&g, &pi, 0, EMPTY_SEQ);
        assert_eq!(cbr.strategy, PureStrategy::lex_first(&g, 0));
        assert_eq!(cbr.strategy, pure(&g, 0, &["a", "x"]));
        assert_eq!(cbr.value, q("0"));
        // Unreached sequence falls back to the unconditional law.
        let fb = counterfactual_best_response(&g, &pi, 0, g.parse_seq(0, "s:x").unwrap());
        assert!(fb.fallback);
    }

    #[test]
    fn ebos_conversion_matches_expected_profile() {
        let g = fixtures::ebos();
        let pi = fixtures::ebos_pi();
        let conv = efce_to_bce(&g, &pi);
        let expect = MixtureOfProducts::from_profiles(vec![
            (q("1/2"), PureProfile(vec![pure(&g, 0, &["¬U", "X1", "X1"]), pure(&g, 1, &["X2"])])),
            (q("1/2"), PureProfile(vec![pure(&g, 0, &["¬U", "Y1", "X1"]), pure(&g, 1, &["Y2"])])),
        ]);
        // Infoset order for P1 is (root, ¬U, U).
        let names: Vec<&str> = g.player_infosets(0).iter().map(|&i| g.infoset(i).name.as_str()).collect();
        assert_eq!(names, ["root", "¬U", "U"]);
        assert_eq!(conv, expect);
        assert!(outcome_equivalent(&g, &pi, &conv));
    }

    #[test]
    fn lrr_conversion() {
        let g = fixtures::lrr();
        let conv = efce_to_bce(&g, &fixtures::lrr_pi());
        let support: Vec<(Rational, String)> =
            conv.profile_support().map(|(w, p)| (w, p.0[0].describe(&g))).collect();
        assert_eq!(support, vec![(q("9/10"), "(L,L')".to_string()), (q("1/10"), "(R,R')".to_string())]);
    }

    #[test]
    fn fully_reaching_profile_is_unchanged() {
        let g = fixtures::ebos();
        // P2 has one infoset, always reached.
        let pi = fixtures::ebos_pi();
        let conv = efce_to_bce(&g, &pi);
        for (a, b) in pi.components.iter().zip(&conv.components) {
            assert_eq!(a.strategies[1], b.strategies[1]);
        }
    }

    #[test]
    fn deviation_point_is_unique_and_reached() {
        let g = fixtures::ebos();
        let x = pure(&g, 0, &["¬U", "Y1", "Y1"]);
        let u = g.infoset_by_name("U").unwrap();
        assert_eq!(deviation_point(&g, &x, u), Some(g.parse_seq(0, "root:¬U").unwrap()));
        assert_eq!(deviation_point(&g, &x, g.infoset_by_name("¬U").unwrap()), None);
    }

    #[test]
    fn restricted_values() {
        let g = fixtures::lrr();
        let conv = efce_to_bce(&g, &fixtures::lrr_pi());
        let b = g.infoset_by_name("B").unwrap();
        let always_l = Deviation::Behavioral { player: 0, rules: vec![Rule { infoset: b, history: None, action: 0 }] };
        assert_eq!(g.infoset(b).actions[0], "L'");
        assert_eq!(restricted_deviation_value(&g, &conv, &always_l, b), q("1/10"));
        let id = Deviation::Identity { player: 0 };
        for &iid in g.player_infosets(0) {
            assert_eq!(restricted_deviation_value(&g, &conv, &id, iid), q("0"));
        }

        let e = fixtures::ebos();
        let pi2 = efce_to_bce(&e, &fixtures::ebos_pi());
        let root = e.infoset_by_name("root").unwrap();
        let play_u = Deviation::Behavioral {
            player: 0,
            rules: vec![Rule { infoset: root, history: None, action: e.infoset(root).action_index("U").unwrap() }],
        };
        assert!(restricted_deviation_value(&e, &pi2, &play_u, root) <= q("0"));
    }
}
