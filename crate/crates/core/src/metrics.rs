//! Utilities, reach probabilities and outcome distributions of correlated profiles.

use std::collections::BTreeMap;

use serde_json::{Map, Value};

use crate::deviation::plays_from;
use crate::game::{Game, InfosetId, SeqId, TerminalId};
use crate::rational::Rational;
use crate::strategy::{MixtureOfProducts, PureProfile};

/// Probability of each terminal; terminals with zero mass are omitted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OutcomeDistribution(pub BTreeMap<TerminalId, Rational>);

impl OutcomeDistribution {
    pub fn get(&self, z: TerminalId) -> Rational {
        self.0.get(&z).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn total(&self) -> Rational {
        self.0.values().sum()
    }

    pub fn to_json(&self, game: &Game) -> Value {
        let mut m = Map::new();
        for (z, p) in &self.0 {
            m.insert(game.terminal_label(*z).to_string(), Value::String(p.to_string()));
        }
        Value::Object(m)
    }
}

pub fn expected_utility(game: &Game, pi: &MixtureOfProducts, i: usize) -> Rational {
    let reach = pi.reach_products(game, None);
    pi.components
        .iter()
        .zip(&reach)
        .map(|(c, r)| {
            let v: Rational = (0..game.num_terminals())
                .filter(|&z| !r[z].is_zero())
                .map(|z| game.payoff(z, i) * game.chance_reach(z) * &r[z])
                .sum();
            &c.alpha * v
        })
        .sum()
}

/// Expected value of an arbitrary terminal objective `c` (missing terminals count 0).
pub fn objective_value(game: &Game, pi: &MixtureOfProducts, c: &BTreeMap<TerminalId, Rational>) -> Rational {
    let dist = outcome_distribution(game, pi);
    c.iter().map(|(z, v)| v * dist.get(*z)).sum()
}

pub fn outcome_distribution(game: &Game, pi: &MixtureOfProducts) -> OutcomeDistribution {
    let reach = pi.reach_products(game, None);
    let mut out = BTreeMap::new();
    for z in 0..game.num_terminals() {
        let p: Rational = pi.components.iter().zip(&reach).map(|(c, r)| &c.alpha * &r[z]).sum::<Rational>()
            * game.chance_reach(z);
        if !p.is_zero() {
            out.insert(z, p);
        }
    }
    OutcomeDistribution(out)
}

pub fn outcome_equivalent(game: &Game, a: &MixtureOfProducts, b: &MixtureOfProducts) -> bool {
    outcome_distribution(game, a) == outcome_distribution(game, b)
}

/// `u_i(x; I) = Σ_{z ≻ I} u_i(z)·p(z)·x_i(z|I)·x_{-i}(z)`.
pub fn counterfactual_utility(game: &Game, x: &PureProfile, i: usize, iid: InfosetId) -> Rational {
    let reach: Vec<Vec<bool>> = x.0.iter().map(|s| s.reach(game)).collect();
    game.infoset(iid)
        .terminals
        .iter()
        .filter(|&&z| plays_from(game, &x.0[i], iid, z))
        .filter(|&&z| (0..game.num_players()).all(|j| j == i || reach[j][game.terminal_seq(z, j)]))
        .map(|&z| game.payoff(z, i) * game.chance_reach(z))
        .sum()
}

/// `E_π[x_{-i}(z)·1[x_i(σ)=1]]` for every terminal, with the event mass `P[x_i(σ)=1]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConditionalReach {
    pub player: usize,
    pub seq: SeqId,
    pub event_mass: Rational,
    pub reach: Vec<Rational>,
}

impl ConditionalReach {
    /// Normalized reach; `None` when the conditioning event has no mass.
    pub fn conditional(&self) -> Option<Vec<Rational>> {
        if self.event_mass.is_zero() {
            return None;
        }
        Some(self.reach.iter().map(|r| r / &self.event_mass).collect())
    }
}

/// Factorized per component: never expands the product support.
pub fn conditional_reach(game: &Game, pi: &MixtureOfProducts, i: usize, seq: SeqId) -> ConditionalReach {
    let opp = pi.reach_products(game, Some(i));
    let mut event_mass = Rational::zero();
    let mut reach = vec![Rational::zero(); game.num_terminals()];
    for (c, opp_t) in pi.components.iter().zip(&opp) {
        let mass_t: Rational = c.strategies[i].iter().filter(|(_, x)| x.reach(game)[seq]).map(|(b, _)| b).sum();
        if mass_t.is_zero() {
            continue;
        }
        let w = &c.alpha * &mass_t;
        for (r, o) in reach.iter_mut().zip(opp_t) {
            if !o.is_zero() {
                *r += &w * o;
            }
        }
        event_mass += w;
    }
    ConditionalReach { player: i, seq, event_mass, reach }
}

/// Equality of `E[x_i(z|I)·x_{-i}(z)]` for every player, infoset, and terminal below it.
pub fn counterfactually_outcome_equivalent(game: &Game, a: &MixtureOfProducts, b: &MixtureOfProducts) -> bool {
    (0..game.num_players()).all(|i| {
        let (ra, rb) = (counterfactual_reach(game, a, i), counterfactual_reach(game, b, i));
        ra == rb
    })
}

/// `[(I, z)] ↦ E_π[x_i(z|I)·x_{-i}(z)]` for one player, nonzero entries only.
pub fn counterfactual_reach(game: &Game, pi: &MixtureOfProducts, i: usize) -> BTreeMap<(InfosetId, TerminalId), Rational> {
    let opp = pi.reach_products(game, Some(i));
    let mut out: BTreeMap<(InfosetId, TerminalId), Rational> = BTreeMap::new();
    for (c, opp_t) in pi.components.iter().zip(&opp) {
        for (beta, x) in &c.strategies[i] {
            let w = &c.alpha * beta;
            for &iid in game.player_infosets(i) {
                for &z in &game.infoset(iid).terminals {
                    if !opp_t[z].is_zero() && plays_from(game, x, iid, z) {
                        *out.entry((iid, z)).or_insert_with(Rational::zero) += &w * &opp_t[z];
                    }
                }
            }
        }
    }
    out.retain(|_, v| !v.is_zero());
    out
}

/// Expected utility of `player` from `node` on, assuming play reaches it:
/// chance and every player's own actions are counted from `node` down only.
pub fn subtree_conditional_utility(game: &Game, pi: &MixtureOfProducts, node: usize, player: usize) -> Rational {
    let tree = game.tree();
    let mut total = Rational::zero();
    for z in 0..game.num_terminals() {
        let zn = game.terminals()[z];
        if !game.node_precedes(node, zn) {
            continue;
        }
        // Chance probability and (player, infoset, action) choices on the node→z path.
        let mut chance = Rational::one();
        let mut choices = Vec::new();
        let mut cur = zn;
        while cur != node {
            let parent = tree.nodes[cur].parent.expect("node is an ancestor");
            let k = tree.nodes[parent].edges().iter().position(|e| e.child == cur).expect("child edge");
            match &tree.nodes[parent].kind {
                crate::game::NodeKind::Chance { probs, .. } => chance *= &probs[k],
                crate::game::NodeKind::Decision { player: q, .. } => {
                    choices.push((*q, game.node_infoset(parent).expect("decision infoset"), k))
                }
                crate::game::NodeKind::Terminal { .. } => unreachable!(),
            }
            cur = parent;
        }
        let reach: Rational = pi
            .profile_support()
            .filter(|(_, prof)| choices.iter().all(|&(q, iid, a)| prof.0[q].action_at(game, iid) == a))
            .map(|(w, _)| w)
            .sum();
        total += game.payoff(z, player) * chance * reach;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::rational::q;
    use crate::strategy::{enumerate_pure, PureStrategy};

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
    fn ebos_utilities_and_outcomes() {
        let g = fixtures::ebos();
        let pi = fixtures::ebos_pi();
        assert_eq!(expected_utility(&g, &pi, 0), q("3/2"));
        assert_eq!(expected_utility(&g, &pi, 1), q("3/2"));
        let d = outcome_distribution(&g, &pi);
        assert_eq!(d.total(), q("1"));
        assert_eq!(d.0.len(), 2);
        assert_eq!(d.get(g.terminal_by_label("(¬U,X1,X2)").unwrap()), q("1/2"));
        assert_eq!(d.get(g.terminal_by_label("(¬U,Y1,Y2)").unwrap()), q("1/2"));
    }

    #[test]
    fn lrr_utility() {
        let g = fixtures::lrr();
        assert_eq!(expected_utility(&g, &fixtures::lrr_pi(), 0), q("9/5"));
    }

    #[test]
    fn constant_game_utility() {
        let t = crate::parse_game(
            r#"{"players":["A","B"],"root":{"kind":"decision","player":0,"infoset":"r","actions":[
                {"label":"l","child":{"kind":"chance","actions":[
                    {"label":"h","prob":"1/3","child":{"kind":"terminal","payoffs":["7/2","7/2"]}},
                    {"label":"t","prob":"2/3","child":{"kind":"terminal","payoffs":["7/2","7/2"]}}]}},
                {"label":"r","child":{"kind":"terminal","payoffs":["7/2","7/2"]}}]}}"#,
        )
        .unwrap();
        let g = Game::new(t).unwrap();
        let mix = crate::strategy::mixture_from_behavior_products(
            &g,
            &[(q("1"), vec![crate::BehaviorStrategy::uniform(&g, 0), crate::BehaviorStrategy::uniform(&g, 1)])],
        )
        .unwrap();
        assert_eq!(expected_utility(&g, &mix, 0), q("7/2"));
        assert_eq!(outcome_distribution(&g, &mix).total(), q("1"));
    }

    #[test]
    fn counterfactual_utility_lrr() {
        let g = fixtures::lrr();
        let b = g.infoset_by_name("B").unwrap();
        let lr = PureProfile(vec![pure(&g, 0, &["L", "R'"])]);
        let ll = PureProfile(vec![pure(&g, 0, &["L", "L'"])]);
        assert_eq!(counterfactual_utility(&g, &lr, 0, b), q("0"));
        assert_eq!(counterfactual_utility(&g, &ll, 0, b), q("1"));
        // At the always-reached root infoset it is the plain utility.
        let root = g.infoset_by_name("R0").unwrap();
        for x in enumerate_pure(&g, 0, 10).unwrap() {
            let prof = PureProfile(vec![x]);
            assert_eq!(
                counterfactual_utility(&g, &prof, 0, root),
                expected_utility(&g, &MixtureOfProducts::pure(prof.clone()), 0)
            );
        }
    }

    #[test]
    fn conditional_reach_examples() {
        let g = fixtures::ebos();
        let pi = fixtures::ebos_pi();
        let s = g.parse_seq(0, "root:¬U").unwrap();
        let cr = conditional_reach(&g, &pi, 0, s);
        assert_eq!(cr.event_mass, q("1"));
        for (z, r) in cr.reach.iter().enumerate() {
            let label = g.terminal_label(z);
            let expect = if label.ends_with("X2)") || label.ends_with("Y2)") { q("1/2") } else { q("0") };
            assert_eq!(*r, expect, "{label}");
        }
        let empty = conditional_reach(&g, &pi, 1, crate::EMPTY_SEQ);
        assert_eq!(empty.event_mass, q("1"));

        let l = fixtures::lrr();
        let conv = fixtures::lrr_pi();
        let r = conditional_reach(&l, &conv, 0, l.parse_seq(0, "R0:R").unwrap());
        assert_eq!(r.event_mass, q("1/10"));
        assert!(r.reach.iter().all(|v| *v == q("1/10")));
    }

    #[test]
    fn outcome_equivalence_examples() {
        let g = fixtures::lrr();
        let behavior = fixtures::lrr_pi();
        let pure_mix = MixtureOfProducts::from_profiles(vec![
            (q("9/10"), PureProfile(vec![pure(&g, 0, &["L", "R'"])])),
            (q("1/10"), PureProfile(vec![pure(&g, 0, &["R", "R'"])])),
        ]);
        assert!(outcome_equivalent(&g, &behavior, &pure_mix));
        let moved = MixtureOfProducts::from_profiles(vec![
            (q("9/10"), PureProfile(vec![pure(&g, 0, &["L", "R'"])])),
            (q("1/10"), PureProfile(vec![pure(&g, 0, &["R", "L'"])])),
        ]);
        assert!(!outcome_equivalent(&g, &behavior, &moved));
    }

    #[test]
    fn counterfactual_equivalence_examples() {
        let g = fixtures::lrr();
        let lr = fixtures::lrr_lrprime();
        assert!(counterfactually_outcome_equivalent(&g, &lr, &lr));
        let conv = MixtureOfProducts::from_profiles(vec![
            (q("9/10"), PureProfile(vec![pure(&g, 0, &["L", "L'"])])),
            (q("1/10"), PureProfile(vec![pure(&g, 0, &["R", "R'"])])),
        ]);
        assert!(!counterfactually_outcome_equivalent(&g, &lr, &conv));
        let b = g.infoset_by_name("B").unwrap();
        let zl = g.terminal_by_label("(R,L')").unwrap();
        assert_eq!(counterfactual_reach(&g, &conv, 0).get(&(b, zl)), Some(&q("9/10")));
        assert_eq!(counterfactual_reach(&g, &lr, 0).get(&(b, zl)), None);

        // Same utilities everywhere below B, different reach: still not equivalent.
        let flat = crate::parse_game(
            r#"{"players":["A"],"root":{"kind":"decision","player":0,"infoset":"r","actions":[
                {"label":"a","child":{"kind":"terminal","payoffs":["0"]}},
                {"label":"b","child":{"kind":"terminal","payoffs":["0"]}}]}}"#,
        )
        .unwrap();
        let f = Game::new(flat).unwrap();
        let pa = MixtureOfProducts::pure(PureProfile(vec![pure(&f, 0, &["a"])]));
        let pb = MixtureOfProducts::pure(PureProfile(vec![pure(&f, 0, &["b"])]));
        assert!(!counterfactually_outcome_equivalent(&f, &pa, &pb));
    }

    #[test]
    fn surj_subtree_utility() {
        let g = fixtures::surj();
        let pi = fixtures::surj_bce();
        let s_root = g.infoset(g.infoset_by_name("S").unwrap()).nodes[0];
        let s_top = g.tree().nodes[s_root].parent.unwrap();
        assert_eq!(subtree_conditional_utility(&g, &pi, s_top, 0), q("1"));
    }
}
