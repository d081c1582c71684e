//! Strategy representations: pure, behavior, sequence-form, and mixtures of
//! small-support products, plus the greedy sequence-form decomposition.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::game::{Game, InfosetId, SeqId, TerminalId, EMPTY_SEQ};
use crate::rational::Rational;

/// One action per infoset of `player`, indexed by the infoset's local position.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PureStrategy {
    pub player: usize,
    pub actions: Vec<usize>,
}

impl PureStrategy {
    /// The lexicographically first action everywhere.
    pub fn lex_first(game: &Game, player: usize) -> PureStrategy {
        let actions = game.player_infosets(player).iter().map(|&i| game.infoset(i).first_action()).collect();
        PureStrategy { player, actions }
    }

    pub fn action_at(&self, game: &Game, iid: InfosetId) -> usize {
        self.actions[game.infoset(iid).local]
    }

    pub fn set_action(&mut self, game: &Game, iid: InfosetId, a: usize) {
        self.actions[game.infoset(iid).local] = a;
    }

    /// Reach indicators `x(σ)` for every sequence of the player.
    pub fn reach(&self, game: &Game) -> Vec<bool> {
        let mut r = vec![false; game.num_sequences(self.player)];
        r[EMPTY_SEQ] = true;
        for &iid in game.player_infosets(self.player) {
            let info = game.infoset(iid);
            if r[info.parent_seq] {
                r[info.seq(self.actions[info.local])] = true;
            }
        }
        r
    }

    /// `x(I)`: whether the strategy plays to infoset `iid`.
    pub fn reaches_infoset(&self, game: &Game, iid: InfosetId) -> bool {
        game.seq_path(self.player, game.infoset(iid).parent_seq)
            .iter()
            .all(|&(j, a)| self.action_at(game, j) == a)
    }

    pub fn sequence_form(&self, game: &Game) -> SequenceFormVector {
        let reach = self.reach(game).into_iter().map(|b| if b { Rational::one() } else { Rational::zero() }).collect();
        SequenceFormVector { player: self.player, reach }
    }

    pub fn label<'g>(&self, game: &'g Game, iid: InfosetId) -> &'g str {
        &game.infoset(iid).actions[self.action_at(game, iid)]
    }

    /// `(L,R')`-style rendering in infoset order.
    pub fn describe(&self, game: &Game) -> String {
        let parts: Vec<&str> = game.player_infosets(self.player).iter().map(|&i| self.label(game, i)).collect();
        format!("({})", parts.join(","))
    }

    /// Lexicographic comparison by action labels, infosets in document order.
    pub fn lex_cmp(&self, other: &PureStrategy, game: &Game) -> Ordering {
        for &iid in game.player_infosets(self.player) {
            let info = game.infoset(iid);
            let a = info.actions[self.actions[info.local]].as_bytes();
            let b = info.actions[other.actions[info.local]].as_bytes();
            match a.cmp(b) {
                Ordering::Equal => continue,
                o => return o,
            }
        }
        Ordering::Equal
    }
}

/// Independent local distributions, indexed by local infoset position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BehaviorStrategy {
    pub player: usize,
    pub locals: Vec<Vec<Rational>>,
}

impl BehaviorStrategy {
    pub fn check(&self, game: &Game) -> Result<()> {
        let isets = game.player_infosets(self.player);
        if self.locals.len() != isets.len() {
            return Err(Error::InvalidProfile(format!(
                "behavior strategy has {} local distributions, player has {} infosets",
                self.locals.len(),
                isets.len()
            )));
        }
        for (&iid, dist) in isets.iter().zip(&self.locals) {
            let info = game.infoset(iid);
            if dist.len() != info.actions.len() {
                return Err(Error::InvalidProfile(format!("wrong action count at infoset {:?}", info.name)));
            }
            if dist.iter().any(Rational::is_negative) || !dist.iter().sum::<Rational>().is_one() {
                return Err(Error::InvalidProfile(format!(
                    "local distribution at infoset {:?} is not a probability vector",
                    info.name
                )));
            }
        }
        Ok(())
    }

    pub fn uniform(game: &Game, player: usize) -> BehaviorStrategy {
        let locals = game
            .player_infosets(player)
            .iter()
            .map(|&i| {
                let k = game.infoset(i).actions.len() as i64;
                vec![Rational::new(1, k); k as usize]
            })
            .collect();
        BehaviorStrategy { player, locals }
    }

    pub fn from_pure(game: &Game, x: &PureStrategy) -> BehaviorStrategy {
        let locals = game
            .player_infosets(x.player)
            .iter()
            .map(|&i| {
                let info = game.infoset(i);
                (0..info.actions.len())
                    .map(|a| if a == x.actions[info.local] { Rational::one() } else { Rational::zero() })
                    .collect()
            })
            .collect();
        BehaviorStrategy { player: x.player, locals }
    }

    /// The exact distribution over pure strategies when every local
    /// recommendation is drawn independently. Zero-probability strategies are omitted.
    pub fn product_support(&self, game: &Game, cap: u128) -> Result<Vec<(Rational, PureStrategy)>> {
        let isets = game.player_infosets(self.player);
        let supports: Vec<Vec<usize>> = isets
            .iter()
            .zip(&self.locals)
            .map(|(&i, dist)| game.infoset(i).lex.iter().copied().filter(|&a| !dist[a].is_zero()).collect())
            .collect();
        let count: u128 = supports.iter().map(|s| s.len() as u128).product();
        if count > cap {
            return Err(Error::CapExceeded { what: "behavior strategy support".into(), needed: count, cap });
        }
        let mut out = Vec::with_capacity(count as usize);
        let mut pos = vec![0usize; isets.len()];
        loop {
            let actions: Vec<usize> = supports.iter().zip(&pos).map(|(s, &k)| s[k]).collect();
            let w = actions.iter().zip(&self.locals).map(|(&a, d)| &d[a]).product();
            out.push((w, PureStrategy { player: self.player, actions }));
            let mut k = isets.len();
            loop {
                if k == 0 {
                    return Ok(out);
                }
                k -= 1;
                pos[k] += 1;
                if pos[k] < supports[k].len() {
                    break;
                }
                pos[k] = 0;
            }
        }
    }

    /// Multiply local probabilities along each sequence.
    pub fn sequence_form(&self, game: &Game) -> SequenceFormVector {
        let mut reach = vec![Rational::zero(); game.num_sequences(self.player)];
        reach[EMPTY_SEQ] = Rational::one();
        for &iid in game.player_infosets(self.player) {
            let info = game.infoset(iid);
            let base = reach[info.parent_seq].clone();
            for (a, p) in self.locals[info.local].iter().enumerate() {
                reach[info.seq(a)] = &base * p;
            }
        }
        SequenceFormVector { player: self.player, reach }
    }
}

/// Reach probabilities over one player's sequences.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SequenceFormVector {
    pub player: usize,
    pub reach: Vec<Rational>,
}

impl SequenceFormVector {
    pub fn zeros(game: &Game, player: usize) -> SequenceFormVector {
        SequenceFormVector { player, reach: vec![Rational::zero(); game.num_sequences(player)] }
    }

    /// Root mass one, nonnegativity, and flow conservation at every infoset.
    pub fn check(&self, game: &Game) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidProfile(m));
        if self.reach.len() != game.num_sequences(self.player) {
            return bad("sequence-form vector has the wrong length".into());
        }
        if !self.reach[EMPTY_SEQ].is_one() {
            return bad(format!("reach of the empty sequence is {}", self.reach[EMPTY_SEQ]));
        }
        if let Some(s) = self.reach.iter().position(Rational::is_negative) {
            return bad(format!("negative reach at {}", game.seq_name(self.player, s)));
        }
        for &iid in game.player_infosets(self.player) {
            let info = game.infoset(iid);
            let total: Rational = (0..info.actions.len()).map(|a| &self.reach[info.seq(a)]).sum();
            if total != self.reach[info.parent_seq] {
                return bad(format!("flow is not conserved at infoset {:?}", info.name));
            }
        }
        Ok(())
    }

    pub fn add_scaled(&mut self, w: &Rational, other: &SequenceFormVector) {
        for (r, o) in self.reach.iter_mut().zip(&other.reach) {
            *r += w * o;
        }
    }
}

/// Write `v` as a convex combination of pure sequence-form vectors.
///
/// Each round traces a pure strategy through positive residual mass (the
/// lexicographically first positive action at residual-reachable infosets,
/// the lexicographically first action elsewhere) and subtracts it with the
/// largest feasible coefficient. Every round zeroes at least one residual
/// coordinate, so at most `|Σ_i|` terms are produced.
pub fn decompose(game: &Game, v: &SequenceFormVector) -> Result<Vec<(Rational, PureStrategy)>> {
    v.check(game)?;
    let p = v.player;
    let mut residual = v.reach.clone();
    let mut out = Vec::new();
    while residual[EMPTY_SEQ].is_positive() {
        let nonzero_before = residual.iter().filter(|r| !r.is_zero()).count();
        let mut x = PureStrategy::lex_first(game, p);
        let mut live = vec![false; residual.len()];
        live[EMPTY_SEQ] = true;
        for &iid in game.player_infosets(p) {
            let info = game.infoset(iid);
            if live[info.parent_seq] && residual[info.parent_seq].is_positive() {
                let a = info
                    .lex
                    .iter()
                    .copied()
                    .find(|&a| residual[info.seq(a)].is_positive())
                    .ok_or_else(|| Error::Internal("flow conservation broken during decomposition".into()))?;
                x.actions[info.local] = a;
                live[info.seq(a)] = true;
            }
        }
        let reached: Vec<SeqId> = x.reach(game).iter().enumerate().filter(|(_, &b)| b).map(|(s, _)| s).collect();
        let beta = reached
            .iter()
            .map(|&s| residual[s].clone())
            .min()
            .expect("empty sequence is always reached");
        for &s in &reached {
            residual[s] -= &beta;
        }
        let nonzero_after = residual.iter().filter(|r| !r.is_zero()).count();
        if nonzero_after >= nonzero_before {
            return Err(Error::Internal("decomposition made no progress".into()));
        }
        out.push((beta, x));
    }
    Ok(out)
}

/// Per-player components of one product term.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    pub alpha: Rational,
    /// `strategies[i]` lists `(β, x)` pairs for player `i`.
    pub strategies: Vec<Vec<(Rational, PureStrategy)>>,
}

/// `π = Σ_t α_t ⊗_i Σ_k β_{i,t,k} x_{i,t,k}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MixtureOfProducts {
    pub components: Vec<Component>,
}

/// One pure strategy per player.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PureProfile(pub Vec<PureStrategy>);

impl MixtureOfProducts {
    pub fn pure(profile: PureProfile) -> MixtureOfProducts {
        MixtureOfProducts {
            components: vec![Component {
                alpha: Rational::one(),
                strategies: profile.0.into_iter().map(|x| vec![(Rational::one(), x)]).collect(),
            }],
        }
    }

    /// Mixture of pure profiles (`K = 1` everywhere); zero weights are dropped.
    pub fn from_profiles(weighted: Vec<(Rational, PureProfile)>) -> MixtureOfProducts {
        MixtureOfProducts {
            components: weighted
                .into_iter()
                .filter(|(w, _)| !w.is_zero())
                .map(|(alpha, prof)| Component {
                    alpha,
                    strategies: prof.0.into_iter().map(|x| vec![(Rational::one(), x)]).collect(),
                })
                .collect(),
        }
    }

    pub fn check(&self, game: &Game) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidProfile(m));
        if self.components.is_empty() {
            return bad("profile has no components".into());
        }
        let total: Rational = self.components.iter().map(|c| &c.alpha).sum();
        if !total.is_one() {
            return bad(format!("component weights sum to {total}"));
        }
        for (t, c) in self.components.iter().enumerate() {
            if c.alpha.is_negative() {
                return bad(format!("component {t} has negative weight"));
            }
            if c.strategies.len() != game.num_players() {
                return bad(format!("component {t} lists {} players", c.strategies.len()));
            }
            for (i, list) in c.strategies.iter().enumerate() {
                if list.is_empty() {
                    return bad(format!("component {t} has no strategy for player {i}"));
                }
                let s: Rational = list.iter().map(|(b, _)| b).sum();
                if !s.is_one() || list.iter().any(|(b, _)| b.is_negative()) {
                    return bad(format!("component {t}, player {i}: weights are not a distribution"));
                }
                for (_, x) in list {
                    if x.player != i || x.actions.len() != game.player_infosets(i).len() {
                        return bad(format!("component {t}, player {i}: strategy has the wrong shape"));
                    }
                    for &iid in game.player_infosets(i) {
                        if x.action_at(game, iid) >= game.infoset(iid).actions.len() {
                            return bad(format!("component {t}, player {i}: illegal action"));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Sequence-form marginal `π_j^{(t)}` of every component and player: `[t][j][σ]`.
    pub fn marginals(&self, game: &Game) -> Vec<Vec<Vec<Rational>>> {
        self.components
            .iter()
            .map(|c| {
                c.strategies
                    .iter()
                    .enumerate()
                    .map(|(j, list)| {
                        let mut v = SequenceFormVector::zeros(game, j);
                        for (b, x) in list {
                            v.add_scaled(b, &x.sequence_form(game));
                        }
                        v.reach
                    })
                    .collect()
            })
            .collect()
    }

    /// `Π_{j ∉ skip} π_j^{(t)}(z)` for every component and terminal.
    pub fn reach_products(&self, game: &Game, skip: Option<usize>) -> Vec<Vec<Rational>> {
        let m = self.marginals(game);
        m.iter()
            .map(|per_player| {
                (0..game.num_terminals())
                    .map(|z: TerminalId| {
                        let mut r = Rational::one();
                        for (j, marg) in per_player.iter().enumerate() {
                            if Some(j) != skip {
                                r *= &marg[game.terminal_seq(z, j)];
                            }
                        }
                        r
                    })
                    .collect()
            })
            .collect()
    }

    /// Enumerate `(weight, pure profile)` over every `(t, k_1, …, k_n)`.
    pub fn profile_support(&self) -> ProfileSupport<'_> {
        ProfileSupport { mix: self, t: 0, ks: Vec::new() }
    }

    pub fn support_size(&self) -> u128 {
        self.components
            .iter()
            .map(|c| c.strategies.iter().map(|l| l.len() as u128).product::<u128>())
            .sum()
    }

    /// `(1 - λ)·self + λ·other`.
    pub fn blend(&self, other: &MixtureOfProducts, lambda: &Rational) -> MixtureOfProducts {
        let keep = Rational::one() - lambda;
        let mut components = Vec::new();
        for c in &self.components {
            components.push(Component { alpha: &c.alpha * &keep, strategies: c.strategies.clone() });
        }
        for c in &other.components {
            components.push(Component { alpha: &c.alpha * lambda, strategies: c.strategies.clone() });
        }
        components.retain(|c| !c.alpha.is_zero());
        MixtureOfProducts { components }
    }
}

pub struct ProfileSupport<'a> {
    mix: &'a MixtureOfProducts,
    t: usize,
    ks: Vec<usize>,
}

impl Iterator for ProfileSupport<'_> {
    type Item = (Rational, PureProfile);

    fn next(&mut self) -> Option<Self::Item> {
        let comps = &self.mix.components;
        if self.t >= comps.len() {
            return None;
        }
        let c = &comps[self.t];
        if self.ks.is_empty() {
            self.ks = vec![0; c.strategies.len()];
        }
        let mut w = c.alpha.clone();
        let mut prof = Vec::with_capacity(c.strategies.len());
        for (list, &k) in c.strategies.iter().zip(&self.ks) {
            w *= &list[k].0;
            prof.push(list[k].1.clone());
        }
        // Advance the odometer.
        let mut carry = true;
        for (pos, k) in self.ks.iter_mut().enumerate().rev() {
            if !carry {
                break;
            }
            *k += 1;
            if *k < c.strategies[pos].len() {
                carry = false;
            } else {
                *k = 0;
            }
        }
        if carry {
            self.t += 1;
            self.ks.clear();
        }
        Some((w, PureProfile(prof)))
    }
}

/// Decompose each behavior strategy of each component.
pub fn mixture_from_behavior_products(
    game: &Game,
    comps: &[(Rational, Vec<BehaviorStrategy>)],
) -> Result<MixtureOfProducts> {
    let total: Rational = comps.iter().map(|(a, _)| a).sum();
    if !total.is_one() {
        return Err(Error::InvalidProfile(format!("component weights sum to {total}")));
    }
    let mut components = Vec::with_capacity(comps.len());
    for (alpha, behaviors) in comps {
        if behaviors.len() != game.num_players() {
            return Err(Error::InvalidProfile("one behavior strategy per player is required".into()));
        }
        let mut strategies = Vec::with_capacity(behaviors.len());
        for (i, b) in behaviors.iter().enumerate() {
            if b.player != i {
                return Err(Error::InvalidProfile("behavior strategies out of player order".into()));
            }
            b.check(game)?;
            strategies.push(decompose(game, &b.sequence_form(game))?);
        }
        components.push(Component { alpha: alpha.clone(), strategies });
    }
    Ok(MixtureOfProducts { components })
}

/// Like [`mixture_from_behavior_products`], but each behavior strategy is
/// expanded into its full product support instead of being decomposed. This
/// keeps the joint law of off-path recommendations, which the decomposition
/// does not.
pub fn mixture_from_behavior_supports(
    game: &Game,
    comps: &[(Rational, Vec<BehaviorStrategy>)],
    cap: u128,
) -> Result<MixtureOfProducts> {
    let total: Rational = comps.iter().map(|(a, _)| a).sum();
    if !total.is_one() {
        return Err(Error::InvalidProfile(format!("component weights sum to {total}")));
    }
    let mut components = Vec::with_capacity(comps.len());
    for (alpha, behaviors) in comps {
        if behaviors.len() != game.num_players() {
            return Err(Error::InvalidProfile("one behavior strategy per player is required".into()));
        }
        let mut strategies = Vec::with_capacity(behaviors.len());
        for (i, b) in behaviors.iter().enumerate() {
            if b.player != i {
                return Err(Error::InvalidProfile("behavior strategies out of player order".into()));
            }
            b.check(game)?;
            strategies.push(b.product_support(game, cap)?);
        }
        components.push(Component { alpha: alpha.clone(), strategies });
    }
    Ok(MixtureOfProducts { components })
}

/// Every pure strategy of `player`, lexicographic order.
pub fn enumerate_pure(game: &Game, player: usize, cap: u128) -> Result<Vec<PureStrategy>> {
    game.check_player(player)?;
    let isets = game.player_infosets(player);
    let count: u128 = isets.iter().map(|&i| game.infoset(i).actions.len() as u128).product();
    if count > cap {
        return Err(Error::CapExceeded { what: format!("pure strategies of player {player}"), needed: count, cap });
    }
    let mut out = Vec::with_capacity(count as usize);
    let mut ranks = vec![0usize; isets.len()];
    loop {
        let actions = isets.iter().zip(&ranks).map(|(&i, &r)| game.infoset(i).lex[r]).collect();
        out.push(PureStrategy { player, actions });
        let mut pos = isets.len();
        loop {
            if pos == 0 {
                return Ok(out);
            }
            pos -= 1;
            ranks[pos] += 1;
            if ranks[pos] < game.infoset(isets[pos]).actions.len() {
                break;
            }
            ranks[pos] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::rational::q;

    fn lrr_behavior(g: &Game) -> BehaviorStrategy {
        let _ = g;
        BehaviorStrategy { player: 0, locals: vec![vec![q("9/10"), q("1/10")], vec![q("0"), q("1")]] }
    }

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
    fn behavior_sequence_form() {
        let g = fixtures::lrr();
        let v = lrr_behavior(&g).sequence_form(&g);
        assert_eq!(v.reach, vec![q("1"), q("9/10"), q("1/10"), q("0"), q("1/10")]);
        v.check(&g).unwrap();
    }

    #[test]
    fn pure_sequence_form() {
        let g = fixtures::lrr();
        let v = pure(&g, 0, &["L", "L'"]).sequence_form(&g);
        assert_eq!(v.reach, vec![q("1"), q("1"), q("0"), q("0"), q("0")]);
    }

    #[test]
    fn uniform_single_infoset() {
        let g = fixtures::ebos();
        let v = BehaviorStrategy::uniform(&g, 1).sequence_form(&g);
        assert_eq!(v.reach, vec![q("1"), q("1/2"), q("1/2")]);
        let d = decompose(&g, &v).unwrap();
        assert_eq!(d, vec![(q("1/2"), pure(&g, 1, &["X2"])), (q("1/2"), pure(&g, 1, &["Y2"]))]);
    }

    #[test]
    fn lrr_decomposition() {
        let g = fixtures::lrr();
        let d = decompose(&g, &lrr_behavior(&g).sequence_form(&g)).unwrap();
        assert_eq!(d, vec![(q("9/10"), pure(&g, 0, &["L", "L'"])), (q("1/10"), pure(&g, 0, &["R", "R'"]))]);
    }

    #[test]
    fn pure_decomposes_to_itself() {
        let g = fixtures::ebos();
        for x in enumerate_pure(&g, 0, 100).unwrap() {
            let d = decompose(&g, &x.sequence_form(&g)).unwrap();
            assert_eq!(d.len(), 1);
            assert_eq!(d[0].0, q("1"));
            assert_eq!(d[0].1.sequence_form(&g), x.sequence_form(&g));
            // Off-path infosets come back with their lexicographically first action.
            let onpath_only = g
                .player_infosets(0)
                .iter()
                .all(|&i| x.reaches_infoset(&g, i) || x.action_at(&g, i) == g.infoset(i).first_action());
            if onpath_only {
                assert_eq!(d[0].1, x);
            }
        }
    }

    #[test]
    fn decompose_rejects_invalid_vectors() {
        let g = fixtures::lrr();
        let bad = SequenceFormVector { player: 0, reach: vec![q("1"), q("1/2"), q("1/4"), q("0"), q("0")] };
        assert!(decompose(&g, &bad).is_err());
        let neg = SequenceFormVector { player: 0, reach: vec![q("1"), q("3/2"), q("-1/2"), q("0"), q("-1/2")] };
        assert!(decompose(&g, &neg).is_err());
    }

    #[test]
    fn enumerate_lrr_and_ebos() {
        let g = fixtures::lrr();
        let all: Vec<String> = enumerate_pure(&g, 0, 100).unwrap().iter().map(|x| x.describe(&g)).collect();
        assert_eq!(all, ["(L,L')", "(L,R')", "(R,L')", "(R,R')"]);
        let e = fixtures::ebos();
        assert_eq!(enumerate_pure(&e, 1, 100).unwrap().len(), 2);
        assert_eq!(enumerate_pure(&e, 0, 100).unwrap().len(), 8);
        assert!(matches!(enumerate_pure(&e, 0, 4), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn support_enumeration() {
        let g = fixtures::ebos();
        let pi = fixtures::ebos_pi();
        let sup: Vec<_> = pi.profile_support().collect();
        assert_eq!(sup.len(), 2);
        assert!(sup.iter().all(|(w, _)| *w == q("1/2")));

        // T = 1, two players with K = 2 each.
        let xs0 = enumerate_pure(&g, 0, 100).unwrap();
        let xs1 = enumerate_pure(&g, 1, 100).unwrap();
        let mix = MixtureOfProducts {
            components: vec![Component {
                alpha: q("1"),
                strategies: vec![
                    vec![(q("1/3"), xs0[0].clone()), (q("2/3"), xs0[1].clone())],
                    vec![(q("1/4"), xs1[0].clone()), (q("3/4"), xs1[1].clone())],
                ],
            }],
        };
        mix.check(&g).unwrap();
        let sup: Vec<_> = mix.profile_support().collect();
        assert_eq!(sup.len(), 4);
        let ws: Vec<Rational> = sup.iter().map(|(w, _)| w.clone()).collect();
        assert_eq!(ws, vec![q("1/12"), q("1/4"), q("1/6"), q("1/2")]);
        assert_eq!(ws.iter().sum::<Rational>(), q("1"));
    }

    #[test]
    fn product_support_keeps_off_path_law() {
        let g = crate::fixtures::lrr();
        let sup = lrr_behavior(&g).product_support(&g, 100).unwrap();
        assert_eq!(
            sup,
            vec![(q("9/10"), pure(&g, 0, &["L", "R'"])), (q("1/10"), pure(&g, 0, &["R", "R'"]))]
        );
        let u = BehaviorStrategy::uniform(&g, 0).product_support(&g, 100).unwrap();
        assert_eq!(u.len(), 4);
        assert!(u.iter().all(|(w, _)| *w == q("1/4")));
        assert!(BehaviorStrategy::uniform(&g, 0).product_support(&g, 3).is_err());
    }

    #[test]
    fn behavior_mixture_lrr() {
        let g = fixtures::lrr();
        let mix = mixture_from_behavior_products(&g, &[(q("1"), vec![lrr_behavior(&g)])]).unwrap();
        assert_eq!(mix.components.len(), 1);
        assert_eq!(
            mix.components[0].strategies[0],
            vec![(q("9/10"), pure(&g, 0, &["L", "L'"])), (q("1/10"), pure(&g, 0, &["R", "R'"]))]
        );
        let sup: Vec<_> = mix.profile_support().map(|(w, p)| (w, p.0[0].describe(&g))).collect();
        assert_eq!(sup, vec![(q("9/10"), "(L,L')".to_string()), (q("1/10"), "(R,R')".to_string())]);
    }

    #[test]
    fn pure_reach_is_product_of_locals() {
        let g = fixtures::ebos();
        for x in enumerate_pure(&g, 0, 100).unwrap() {
            let r = x.reach(&g);
            for &iid in g.player_infosets(0) {
                let info = g.infoset(iid);
                for a in 0..info.actions.len() {
                    let local = x.action_at(&g, iid) == a;
                    assert_eq!(r[info.seq(a)], r[info.parent_seq] && local);
                }
                assert_eq!(x.reaches_infoset(&g, iid), r[info.parent_seq]);
            }
        }
    }
}
