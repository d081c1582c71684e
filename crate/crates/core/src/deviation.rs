//! Deviations `φ: X_i → X_i` in the shapes the gap computations produce,
//! and exact (counterfactual) regret of a deviation against a profile.

use std::collections::BTreeMap;

use serde_json::{json, Value};

use crate::game::{Game, InfosetId, SeqId, TerminalId, EMPTY_SEQ};
use crate::profile_io::pure_to_labels;
use crate::rational::Rational;
use crate::strategy::{MixtureOfProducts, PureStrategy};

/// One local rule of a behavioral deviation: at `infoset`, when the
/// recommendations at the infosets of `infoset_chain(infoset)` were
/// `history` (any history if `None`), play `action`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    pub infoset: InfosetId,
    pub history: Option<Vec<usize>>,
    pub action: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Deviation {
    Identity { player: usize },
    Constant(PureStrategy),
    /// Obey until a recommended sequence in the map, then commit to its continuation.
    /// Key `EMPTY_SEQ` commits from the root.
    Trigger { player: usize, triggers: BTreeMap<SeqId, PureStrategy> },
    /// Rules keyed by the local recommendations seen so far; unmatched states obey.
    Behavioral { player: usize, rules: Vec<Rule> },
    /// An explicit table over pure strategies; unlisted inputs map to themselves.
    Table { player: usize, map: BTreeMap<PureStrategy, PureStrategy> },
}

impl Deviation {
    pub fn player(&self) -> usize {
        match self {
            Deviation::Identity { player }
            | Deviation::Trigger { player, .. }
            | Deviation::Behavioral { player, .. }
            | Deviation::Table { player, .. } => *player,
            Deviation::Constant(x) => x.player,
        }
    }

    pub fn apply(&self, game: &Game, x: &PureStrategy) -> PureStrategy {
        match self {
            Deviation::Identity { .. } => x.clone(),
            Deviation::Constant(y) => y.clone(),
            Deviation::Table { map, .. } => map.get(x).cloned().unwrap_or_else(|| x.clone()),
            Deviation::Trigger { triggers, .. } => {
                if let Some(y) = triggers.get(&EMPTY_SEQ) {
                    return y.clone();
                }
                let mut out = x.clone();
                for &iid in game.player_infosets(x.player) {
                    out.set_action(game, iid, trigger_action(game, triggers, x, iid));
                }
                out
            }
            Deviation::Behavioral { rules, .. } => {
                let mut out = x.clone();
                for &iid in game.player_infosets(x.player) {
                    let hist = history(game, x, iid);
                    if let Some(r) = rules
                        .iter()
                        .find(|r| r.infoset == iid && r.history.as_ref().is_none_or(|h| *h == hist))
                    {
                        out.set_action(game, iid, r.action);
                    }
                }
                out
            }
        }
    }

    pub fn to_json(&self, game: &Game) -> Value {
        let name = |p: usize| game.player_name(p).to_string();
        match self {
            Deviation::Identity { player } => json!({"player": name(*player), "kind": "identity"}),
            Deviation::Constant(x) => {
                json!({"player": name(x.player), "kind": "constant", "strategy": pure_to_labels(game, x)})
            }
            Deviation::Trigger { player, triggers } => {
                let list: Vec<Value> = triggers
                    .iter()
                    .map(|(s, y)| {
                        json!({"sequence": game.seq_name(*player, *s), "continuation": continuation_labels(game, *s, y)})
                    })
                    .collect();
                json!({"player": name(*player), "kind": "trigger", "triggers": list})
            }
            Deviation::Behavioral { player, rules } => {
                let list: Vec<Value> = rules
                    .iter()
                    .map(|r| {
                        let info = game.infoset(r.infoset);
                        let hist = match &r.history {
                            None => Value::String("*".into()),
                            Some(h) => Value::Array(
                                game.infoset_chain(r.infoset)
                                    .iter()
                                    .zip(h)
                                    .map(|(&j, &a)| {
                                        let ji = game.infoset(j);
                                        Value::String(format!("{}:{}", ji.name, ji.actions[a]))
                                    })
                                    .collect(),
                            ),
                        };
                        json!({"infoset": info.name, "recommendations": hist, "play": info.actions[r.action]})
                    })
                    .collect();
                json!({"player": name(*player), "kind": "behavioral", "rules": list})
            }
            Deviation::Table { player, map } => {
                let list: Vec<Value> = map
                    .iter()
                    .filter(|(a, b)| a != b)
                    .map(|(a, b)| json!({"from": a.describe(game), "to": b.describe(game)}))
                    .collect();
                json!({"player": name(*player), "kind": "table", "changes": list})
            }
        }
    }
}

/// Continuation restricted to the infosets at or below the trigger's infoset.
fn continuation_labels(game: &Game, s: SeqId, y: &PureStrategy) -> Value {
    let mut m = serde_json::Map::new();
    let top = game.seq_infoset_action(y.player, s).map(|(j, _)| j);
    for &iid in game.player_infosets(y.player) {
        if top.is_none_or(|j| game.infoset_precedes(j, iid)) {
            m.insert(game.infoset(iid).name.clone(), Value::String(y.label(game, iid).to_string()));
        }
    }
    Value::Object(m)
}

/// Recommendations of `x` at every infoset of `infoset_chain(iid)`.
pub fn history(game: &Game, x: &PureStrategy, iid: InfosetId) -> Vec<usize> {
    game.infoset_chain(iid).iter().map(|&j| x.action_at(game, j)).collect()
}

/// Local action of a trigger deviation at `iid`. Depends only on which of
/// the player's sequences along the path to `iid` the recommendation reaches.
fn trigger_action(game: &Game, triggers: &BTreeMap<SeqId, PureStrategy>, x: &PureStrategy, iid: InfosetId) -> usize {
    let chain = game.infoset_chain(iid);
    let path = game.seq_path(x.player, game.infoset(iid).parent_seq);
    for (l, &j) in chain.iter().enumerate() {
        let rec = x.action_at(game, j);
        if let Some(y) = triggers.get(&game.infoset(j).seq(rec)) {
            return y.action_at(game, iid);
        }
        if l + 1 == chain.len() {
            return rec;
        }
        if rec != path[l].1 {
            // Recommendation left the path to `iid`; play never gets here.
            return game.infoset(iid).first_action();
        }
    }
    unreachable!("chain ends with iid")
}

/// Which part of the game a regret is measured on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scope {
    /// Ordinary regret `R_i(π, φ)`.
    Full,
    /// Counterfactual regret `R_i(π, φ; I)`.
    Counterfactual(InfosetId),
    /// Ordinary regret of `φ` applied only at infosets `J ⪰ I`.
    RestrictedFrom(InfosetId),
}

/// `x(z|I)`: the strategy plays every own action from `I` down to `z`.
pub fn plays_from(game: &Game, x: &PureStrategy, iid: InfosetId, z: TerminalId) -> bool {
    let path = game.seq_path(x.player, game.terminal_seq(z, x.player));
    match path.iter().position(|&(j, _)| j == iid) {
        None => false,
        Some(pos) => path[pos..].iter().all(|&(j, a)| x.action_at(game, j) == a),
    }
}

/// Exact regret of `dev` against `π` for the deviating player, factorized per component.
pub fn regret(game: &Game, pi: &MixtureOfProducts, dev: &Deviation, scope: Scope) -> Rational {
    let i = dev.player();
    let opp = pi.reach_products(game, Some(i));
    let lv: Vec<Rational> = (0..game.num_terminals()).map(|z| game.payoff(z, i) * game.chance_reach(z)).collect();
    let mut total = Rational::zero();
    for (t, c) in pi.components.iter().enumerate() {
        for (beta, x) in &c.strategies[i] {
            let w = &c.alpha * beta;
            if w.is_zero() {
                continue;
            }
            let mut y = dev.apply(game, x);
            if let Scope::RestrictedFrom(top) = scope {
                for &j in game.player_infosets(i) {
                    if !game.infoset_precedes(top, j) {
                        y.set_action(game, j, x.action_at(game, j));
                    }
                }
            }
            let diff: Rational = match scope {
                Scope::Full | Scope::RestrictedFrom(_) => {
                    let (ry, rx) = (y.reach(game), x.reach(game));
                    (0..game.num_terminals())
                        .filter_map(|z| {
                            let s = game.terminal_seq(z, i);
                            match (ry[s], rx[s]) {
                                (true, false) => Some(&lv[z] * &opp[t][z]),
                                (false, true) => Some(-(&lv[z] * &opp[t][z])),
                                _ => None,
                            }
                        })
                        .sum()
                }
                Scope::Counterfactual(top) => game
                    .infoset(top)
                    .terminals
                    .iter()
                    .filter_map(|&z| match (plays_from(game, &y, top, z), plays_from(game, x, top, z)) {
                        (true, false) => Some(&lv[z] * &opp[t][z]),
                        (false, true) => Some(-(&lv[z] * &opp[t][z])),
                        _ => None,
                    })
                    .sum(),
            };
            total += w * diff;
        }
    }
    total
}
