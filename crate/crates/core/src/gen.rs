//! Seeded random games and profiles for property tests and the demo.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::game::{Edge, Game, GameTree, Node, NodeId, NodeKind, TerminalId};
use crate::rational::Rational;
use crate::strategy::{
    enumerate_pure, mixture_from_behavior_supports, BehaviorStrategy, Component, MixtureOfProducts,
};

pub type GenRng = ChaCha8Rng;

pub fn rng(seed: u64) -> GenRng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Clone, Debug)]
pub struct GenConfig {
    pub max_nodes: usize,
    pub max_players: usize,
    pub max_depth: usize,
    /// Upper bound on Π_i |X_i|; larger draws are rejected.
    pub profile_limit: u128,
    pub chance_prob: f64,
    pub merge_prob: f64,
    pub terminal_prob: f64,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            max_nodes: 30,
            max_players: 3,
            max_depth: 6,
            profile_limit: 64,
            chance_prob: 0.2,
            merge_prob: 0.8,
            terminal_prob: 0.3,
        }
    }
}

impl GenConfig {
    /// Games small enough for the brute-force oracle on every notion.
    pub fn tiny() -> Self {
        GenConfig { max_nodes: 12, max_players: 2, max_depth: 4, profile_limit: 16, ..GenConfig::default() }
    }
}

struct Builder<'a> {
    rng: &'a mut GenRng,
    cfg: &'a GenConfig,
    players: usize,
    nodes: Vec<Node>,
    budget: usize,
}

impl Builder<'_> {
    fn payoff(&mut self) -> Rational {
        Rational::new(self.rng.gen_range(-6..=6), 2)
    }

    fn node(&mut self, parent: Option<NodeId>, depth: usize) -> NodeId {
        let id = self.nodes.len();
        self.nodes.push(Node { parent, kind: NodeKind::Terminal { payoffs: Vec::new() } });
        let arity = if self.rng.gen_bool(0.15) { 3 } else { 2 };
        let leaf = depth >= self.cfg.max_depth
            || self.budget < arity
            || (depth > 0 && self.rng.gen_bool(self.cfg.terminal_prob));
        if leaf {
            let payoffs = (0..self.players).map(|_| self.payoff()).collect();
            self.nodes[id].kind = NodeKind::Terminal { payoffs };
            return id;
        }
        self.budget -= arity;
        let chance = self.rng.gen_bool(self.cfg.chance_prob);
        let player = self.rng.gen_range(0..self.players);
        let mut edges = Vec::with_capacity(arity);
        for k in 0..arity {
            let child = self.node(Some(id), depth + 1);
            edges.push(Edge { label: ["l", "r", "m"][k].to_string(), child });
        }
        self.nodes[id].kind = if chance {
            let weights: Vec<i64> = (0..arity).map(|_| self.rng.gen_range(1..=4)).collect();
            let total: i64 = weights.iter().sum();
            NodeKind::Chance { actions: edges, probs: weights.iter().map(|&w| Rational::new(w, total)).collect() }
        } else {
            NodeKind::Decision { player, infoset: String::new(), actions: edges }
        };
        id
    }
}

/// Player's own (infoset, action) history at `node`.
fn own_history(nodes: &[Node], node: NodeId, player: usize) -> Vec<(String, String)> {
    let mut out = Vec::new();
    let mut cur = node;
    while let Some(p) = nodes[cur].parent {
        if let NodeKind::Decision { player: q, infoset, actions } = &nodes[p].kind {
            if *q == player {
                let e = actions.iter().find(|e| e.child == cur).expect("child edge");
                out.push((infoset.clone(), e.label.clone()));
            }
        }
        cur = p;
    }
    out.reverse();
    out
}

/// Name infosets in preorder, merging a node into an earlier infoset of the
/// same player with identical own history and arity at random. Ancestors
/// are final by the time a node is visited, so recall is preserved.
fn assign_infosets(nodes: &mut [Node], rng: &mut GenRng, merge_prob: f64) {
    // (player, own history, arity, name) of every infoset so far.
    type Known = (usize, Vec<(String, String)>, usize, String);
    let mut infosets: Vec<Known> = Vec::new();
    let mut counter = 0;
    for id in 0..nodes.len() {
        let NodeKind::Decision { player, actions, .. } = &nodes[id].kind else { continue };
        let (player, arity) = (*player, actions.len());
        let hist = own_history(nodes, id, player);
        let candidates: Vec<&String> = infosets
            .iter()
            .filter(|(p, h, a, _)| *p == player && *h == hist && *a == arity)
            .map(|(_, _, _, name)| name)
            .collect();
        let name = match candidates.choose(rng) {
            Some(name) if rng.gen_bool(merge_prob) => (*name).clone(),
            _ => {
                counter += 1;
                let name = format!("P{}.{}", player + 1, counter);
                infosets.push((player, hist, arity, name.clone()));
                name
            }
        };
        let suffix = name.rsplit('.').next().unwrap_or("0").to_string();
        if let NodeKind::Decision { infoset, actions, .. } = &mut nodes[id].kind {
            for (k, e) in actions.iter_mut().enumerate() {
                e.label = format!("{}{}", ["l", "r", "m"][k], suffix);
            }
            *infoset = name;
        }
    }
}

fn profile_count(game: &Game, cap: u128) -> Option<u128> {
    let mut total: u128 = 1;
    for i in 0..game.num_players() {
        total = total.checked_mul(enumerate_pure(game, i, cap).ok()?.len() as u128)?;
        if total > cap {
            return None;
        }
    }
    Some(total)
}

/// A valid random game; draws are repeated until one fits `profile_limit`.
pub fn random_game(rng: &mut GenRng, cfg: &GenConfig) -> Game {
    loop {
        let players = rng.gen_range(1..=cfg.max_players.max(1));
        let mut b = Builder { rng: &mut *rng, cfg, players, nodes: Vec::new(), budget: cfg.max_nodes.saturating_sub(1) };
        b.node(None, 0);
        let mut nodes = b.nodes;
        if nodes.len() == 1 {
            continue;
        }
        assign_infosets(&mut nodes, rng, cfg.merge_prob);
        let tree = GameTree { players: (1..=players).map(|p| format!("P{p}")).collect(), nodes };
        let Ok(game) = Game::new(tree) else { continue };
        if profile_count(&game, cfg.profile_limit).is_some() {
            return game;
        }
    }
}

fn random_distribution(rng: &mut GenRng, k: usize) -> Vec<Rational> {
    if rng.gen_bool(0.3) {
        let a = rng.gen_range(0..k);
        return (0..k).map(|b| if a == b { Rational::one() } else { Rational::zero() }).collect();
    }
    let weights: Vec<i64> = (0..k).map(|_| rng.gen_range(0..=4)).collect();
    let total: i64 = weights.iter().sum();
    if total == 0 {
        return vec![Rational::new(1, k as i64); k];
    }
    weights.iter().map(|&w| Rational::new(w, total)).collect()
}

pub fn random_behavior(rng: &mut GenRng, game: &Game, player: usize) -> BehaviorStrategy {
    let locals =
        game.player_infosets(player).iter().map(|&i| random_distribution(rng, game.infoset(i).actions.len())).collect();
    BehaviorStrategy { player, locals }
}

/// One or two components of independent behavior strategies, expanded into
/// their product supports.
pub fn random_mixture(rng: &mut GenRng, game: &Game) -> MixtureOfProducts {
    let k = rng.gen_range(1..=2i64);
    let mut comps: Vec<(Rational, Vec<BehaviorStrategy>)> = Vec::new();
    for _ in 0..k {
        let mut b = Vec::new();
        for i in 0..game.num_players() {
            b.push(random_behavior(rng, game, i));
        }
        comps.push((Rational::new(1, k), b));
    }
    mixture_from_behavior_supports(game, &comps, u128::MAX).expect("valid random behaviors")
}

/// A random mixture of pure profiles, each player drawn independently.
pub fn random_pure_mixture(rng: &mut GenRng, game: &Game, size: usize) -> MixtureOfProducts {
    let size = size.max(1);
    let mut components = Vec::with_capacity(size);
    for _ in 0..size {
        let mut strategies = Vec::with_capacity(game.num_players());
        for i in 0..game.num_players() {
            let support = random_behavior(rng, game, i).product_support(game, u128::MAX).expect("finite support");
            let x = support.choose(rng).expect("nonempty support").1.clone();
            strategies.push(vec![(Rational::one(), x)]);
        }
        components.push(Component { alpha: Rational::new(1, size as i64), strategies });
    }
    MixtureOfProducts { components }
}

pub fn random_objective(rng: &mut GenRng, game: &Game) -> BTreeMap<TerminalId, Rational> {
    let mut c = BTreeMap::new();
    for z in 0..game.num_terminals() {
        if rng.gen_bool(0.7) {
            c.insert(z, Rational::new(rng.gen_range(-4..=4), rng.gen_range(1..=3)));
        }
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::serialize_game;

    #[test]
    fn games_are_valid_and_small() {
        let mut r = rng(7);
        let cfg = GenConfig::default();
        let mut with_chance = 0;
        let mut merged = 0;
        for _ in 0..100 {
            let g = random_game(&mut r, &cfg);
            assert!(g.num_nodes() <= cfg.max_nodes);
            assert!(g.num_players() <= cfg.max_players);
            assert!(profile_count(&g, cfg.profile_limit).is_some());
            if g.tree().nodes.iter().any(|n| matches!(n.kind, NodeKind::Chance { .. })) {
                with_chance += 1;
            }
            if g.infosets().iter().any(|i| i.nodes.len() > 1) {
                merged += 1;
            }
        }
        assert!(with_chance > 10 && merged > 10, "chance {with_chance}, merged {merged}");
    }

    #[test]
    fn generation_is_seeded() {
        let a = random_game(&mut rng(3), &GenConfig::default());
        let b = random_game(&mut rng(3), &GenConfig::default());
        assert_eq!(serialize_game(a.tree()), serialize_game(b.tree()));
    }

    #[test]
    fn random_profiles_check() {
        let mut r = rng(11);
        for _ in 0..30 {
            let g = random_game(&mut r, &GenConfig::default());
            random_mixture(&mut r, &g).check(&g).unwrap();
            random_pure_mixture(&mut r, &g, 3).check(&g).unwrap();
        }
    }
}
