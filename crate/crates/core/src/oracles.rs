//! Brute-force regret oracles, straight from the definitions.
//!
//! Deviations are explicit tables `φ: X_i → X_i`. Class membership is
//! checked with the definitional predicates, and regrets are evaluated by
//! walking the tree once per support profile. Nothing here goes through
//! sequence-form vectors, so these functions can check the DPs in `gap`.

use std::collections::BTreeMap;

use crate::deviation::Deviation;
use crate::error::{Error, Result};
use crate::gap::{GapReport, Notion};
use crate::game::{Game, InfosetId, NodeId, NodeKind, SeqId, TerminalId};
use crate::metrics::ConditionalReach;
use crate::rational::Rational;
use crate::strategy::{enumerate_pure, MixtureOfProducts, PureProfile, PureStrategy};

#[derive(Clone, Debug)]
pub struct OracleOptions {
    /// Maximum number of pure strategies of one player.
    pub strategy_cap: u128,
    /// Maximum number of deviation tables enumerated for one player.
    pub table_cap: u128,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions { strategy_cap: 4096, table_cap: 200_000 }
    }
}

/// A total map `X_i → X_i`, stored against the lexicographic list of `X_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeviationTable {
    pub player: usize,
    pub table: BTreeMap<PureStrategy, PureStrategy>,
}

impl DeviationTable {
    pub fn identity(xs: &[PureStrategy], player: usize) -> Self {
        DeviationTable { player, table: xs.iter().map(|x| (x.clone(), x.clone())).collect() }
    }

    pub fn apply(&self, x: &PureStrategy) -> &PureStrategy {
        &self.table[x]
    }

    pub fn to_deviation(&self) -> Deviation {
        Deviation::Table { player: self.player, map: self.table.clone() }
    }
}

/// Every function `X_i → X_i`; refuses when there are more than `cap`.
pub fn enumerate_tables(game: &Game, i: usize, opts: &OracleOptions) -> Result<Vec<DeviationTable>> {
    let xs = enumerate_pure(game, i, opts.strategy_cap)?;
    let n = xs.len() as u128;
    let count = (0..n).try_fold(1u128, |acc, _| acc.checked_mul(n)).unwrap_or(u128::MAX);
    if count > opts.table_cap {
        return Err(Error::CapExceeded { what: format!("deviation tables of player {i}"), needed: count, cap: opts.table_cap });
    }
    let mut out = Vec::with_capacity(count as usize);
    let mut digits = vec![0usize; xs.len()];
    loop {
        let table = xs.iter().zip(&digits).map(|(x, &d)| (x.clone(), xs[d].clone())).collect();
        out.push(DeviationTable { player: i, table });
        let mut k = digits.len();
        loop {
            if k == 0 {
                return Ok(out);
            }
            k -= 1;
            digits[k] += 1;
            if digits[k] < xs.len() {
                break;
            }
            digits[k] = 0;
        }
    }
}

/// `x_i(Ja)` for every `J ⪯ I` and `a ∈ A_J`.
fn causal_key(game: &Game, x: &PureStrategy, iid: InfosetId) -> Vec<bool> {
    let reach = x.reach(game);
    game.infoset_chain(iid)
        .iter()
        .flat_map(|&j| {
            let info = game.infoset(j);
            (0..info.actions.len()).map(|a| reach[info.seq(a)]).collect::<Vec<_>>()
        })
        .collect()
}

/// `x_i(·|J)` for every `J ⪯ I`.
fn behavioral_key(game: &Game, x: &PureStrategy, iid: InfosetId) -> Vec<usize> {
    game.infoset_chain(iid).iter().map(|&j| x.action_at(game, j)).collect()
}

/// Local play is only observable where the deviated strategy gets to, so the
/// dependence condition is checked on outputs that reach the infoset. A
/// strict reading would exclude even the identity.
fn depends_only_on<K: Ord>(game: &Game, phi: &DeviationTable, key: impl Fn(&PureStrategy, InfosetId) -> K) -> bool {
    game.player_infosets(phi.player).iter().all(|&iid| {
        let mut seen: BTreeMap<K, usize> = BTreeMap::new();
        phi.table.iter().filter(|(_, y)| y.reaches_infoset(game, iid)).all(|(x, y)| {
            let out = y.action_at(game, iid);
            *seen.entry(key(x, iid)).or_insert(out) == out
        })
    })
}

pub fn is_causal(game: &Game, phi: &DeviationTable) -> bool {
    depends_only_on(game, phi, |x, iid| causal_key(game, x, iid))
}

pub fn is_behavioral(game: &Game, phi: &DeviationTable) -> bool {
    depends_only_on(game, phi, |x, iid| behavioral_key(game, x, iid))
}

pub fn is_constant(phi: &DeviationTable) -> bool {
    let mut outs = phi.table.values();
    let first = outs.next();
    outs.all(|y| Some(y) == first)
}

/// Class members built from their definition: one local rule per infoset and
/// conditioning key, every combination. Used when raw tables are too many.
/// Up to play at unreached infosets this is the same class as the filter.
fn enumerate_by_keys<K: Ord + Clone>(
    game: &Game,
    i: usize,
    opts: &OracleOptions,
    key: impl Fn(&PureStrategy, InfosetId) -> K,
) -> Result<Vec<DeviationTable>> {
    let xs = enumerate_pure(game, i, opts.strategy_cap)?;
    let isets = game.player_infosets(i);
    // Distinct keys per infoset, in first-seen order.
    let keys: Vec<Vec<K>> = isets
        .iter()
        .map(|&iid| {
            let mut ks: Vec<K> = Vec::new();
            for x in &xs {
                let k = key(x, iid);
                if !ks.contains(&k) {
                    ks.push(k);
                }
            }
            ks
        })
        .collect();
    // One digit per (infoset, key), ranging over the infoset's actions.
    let slots: Vec<(usize, usize)> =
        keys.iter().enumerate().flat_map(|(l, ks)| (0..ks.len()).map(move |k| (l, k))).collect();
    let radix: Vec<usize> = slots.iter().map(|&(l, _)| game.infoset(isets[l]).actions.len()).collect();
    let count = radix.iter().try_fold(1u128, |acc, &r| acc.checked_mul(r as u128)).unwrap_or(u128::MAX);
    if count > opts.table_cap {
        return Err(Error::CapExceeded { what: format!("deviations of player {i}"), needed: count, cap: opts.table_cap });
    }
    let key_index: Vec<Vec<usize>> = xs
        .iter()
        .map(|x| isets.iter().zip(&keys).map(|(&iid, ks)| ks.iter().position(|k| *k == key(x, iid)).unwrap_or(0)).collect())
        .collect();
    let mut offsets = vec![0usize; isets.len()];
    for l in 1..isets.len() {
        offsets[l] = offsets[l - 1] + keys[l - 1].len();
    }
    let mut out = Vec::with_capacity(count as usize);
    let mut digits = vec![0usize; slots.len()];
    loop {
        let table = xs
            .iter()
            .zip(&key_index)
            .map(|(x, ki)| {
                let actions = (0..isets.len())
                    .map(|l| game.infoset(isets[l]).lex[digits[offsets[l] + ki[l]]])
                    .collect();
                (x.clone(), PureStrategy { player: i, actions })
            })
            .collect();
        out.push(DeviationTable { player: i, table });
        let mut k = digits.len();
        loop {
            if k == 0 {
                return Ok(out);
            }
            k -= 1;
            digits[k] += 1;
            if digits[k] < radix[k] {
                break;
            }
            digits[k] = 0;
        }
    }
}

/// The members of a notion's deviation class for player `i`. Raw tables are
/// enumerated and filtered when there are few enough; otherwise the class is
/// generated from its defining dependence structure.
pub fn class_members(game: &Game, i: usize, notion: Notion, opts: &OracleOptions) -> Result<Vec<DeviationTable>> {
    let xs = enumerate_pure(game, i, opts.strategy_cap)?;
    if notion == Notion::Nfcce {
        let mut out = vec![DeviationTable::identity(&xs, i)];
        out.extend(xs.iter().map(|y| DeviationTable { player: i, table: xs.iter().map(|x| (x.clone(), y.clone())).collect() }));
        return Ok(out);
    }
    let causal = notion == Notion::Efce;
    match enumerate_tables(game, i, opts) {
        Ok(all) => Ok(all
            .into_iter()
            .filter(|phi| if causal { is_causal(game, phi) } else { is_behavioral(game, phi) })
            .collect()),
        Err(Error::CapExceeded { .. }) if causal => enumerate_by_keys(game, i, opts, |x, iid| causal_key(game, x, iid)),
        Err(Error::CapExceeded { .. }) => enumerate_by_keys(game, i, opts, |x, iid| behavioral_key(game, x, iid)),
        Err(e) => Err(e),
    }
}

/// `u_i(x)` by walking the tree.
pub fn walk_utility(game: &Game, profile: &PureProfile, i: usize) -> Rational {
    walk(game, profile, i, 0, None, true)
}

/// `u_i(x; I)`: chance and opponents everywhere, `i`'s own moves counted only from `I` down.
pub fn walk_counterfactual_utility(game: &Game, profile: &PureProfile, i: usize, iid: InfosetId) -> Rational {
    walk(game, profile, i, 0, Some(iid), false)
}

fn walk(game: &Game, profile: &PureProfile, i: usize, node: NodeId, from: Option<InfosetId>, inside: bool) -> Rational {
    let inside = inside || (from.is_some() && game.node_infoset(node) == from);
    match &game.tree().nodes[node].kind {
        NodeKind::Terminal { payoffs } => {
            if inside {
                payoffs[i].clone()
            } else {
                Rational::zero()
            }
        }
        NodeKind::Chance { actions, probs } => actions
            .iter()
            .zip(probs)
            .map(|(e, p)| p * walk(game, profile, i, e.child, from, inside))
            .sum(),
        NodeKind::Decision { player, actions, .. } => {
            let iid = game.node_infoset(node).expect("decision nodes have infosets");
            if *player == i && !inside {
                actions.iter().map(|e| walk(game, profile, i, e.child, from, inside)).sum()
            } else {
                let a = profile.0[*player].action_at(game, iid);
                walk(game, profile, i, actions[a].child, from, inside)
            }
        }
    }
}

/// `gain[x][y] = Σ_{p: x_i(p) = x} w_p (u(p with x→y) − u(p))`, so that the
/// regret of a table φ is `Σ_x gain[x][φ(x)]`. Utilities come from tree walks.
fn gain_matrix(
    game: &Game,
    support: &[(Rational, PureProfile)],
    xs: &[PureStrategy],
    i: usize,
    at: Option<InfosetId>,
) -> BTreeMap<PureStrategy, Vec<Rational>> {
    let value = |prof: &PureProfile| match at {
        None => walk_utility(game, prof, i),
        Some(iid) => walk_counterfactual_utility(game, prof, i, iid),
    };
    let mut gain: BTreeMap<PureStrategy, Vec<Rational>> = BTreeMap::new();
    for (w, prof) in support {
        let base = value(prof);
        let row = gain.entry(prof.0[i].clone()).or_insert_with(|| vec![Rational::zero(); xs.len()]);
        let mut dev = prof.clone();
        for (k, y) in xs.iter().enumerate() {
            dev.0[i] = y.clone();
            row[k] += w * (value(&dev) - &base);
        }
    }
    gain
}

fn best_of(
    game: &Game,
    support: &[(Rational, PureProfile)],
    members: &[DeviationTable],
    at: Option<InfosetId>,
) -> (Rational, usize) {
    let i = members[0].player;
    let xs: Vec<PureStrategy> = members[0].table.keys().cloned().collect();
    let gain = gain_matrix(game, support, &xs, i, at);
    let index: BTreeMap<&PureStrategy, usize> = xs.iter().enumerate().map(|(k, x)| (x, k)).collect();
    let mut best = (Rational::zero(), None);
    for (k, phi) in members.iter().enumerate() {
        let r: Rational = gain.iter().map(|(x, row)| &row[index[phi.apply(x)]]).sum();
        if best.1.is_none() || r > best.0 {
            best = (r, Some(k));
        }
    }
    (best.0, best.1.expect("every class contains the identity"))
}

/// Exact gap by exhaustive search over the notion's deviation class.
pub fn brute_force_gap(game: &Game, pi: &MixtureOfProducts, notion: Notion, opts: &OracleOptions) -> Result<GapReport> {
    pi.check(game)?;
    let support: Vec<(Rational, PureProfile)> = pi.profile_support().filter(|(w, _)| !w.is_zero()).collect();
    let mut per_player = Vec::new();
    let mut per_infoset = BTreeMap::new();
    let mut best_player: Option<(Rational, Deviation, Option<InfosetId>)> = None;
    for i in 0..game.num_players() {
        let members = class_members(game, i, notion, opts)?;
        let (g, dev, at) = if notion == Notion::Bce {
            let mut top: Option<(Rational, usize, InfosetId)> = None;
            for &iid in game.player_infosets(i) {
                let (r, k) = best_of(game, &support, &members, Some(iid));
                per_infoset.insert(iid, r.clone());
                if top.as_ref().is_none_or(|(b, _, _)| r > *b) {
                    top = Some((r, k, iid));
                }
            }
            match top {
                Some((r, k, iid)) => (r, members[k].to_deviation(), Some(iid)),
                None => (Rational::zero(), Deviation::Identity { player: i }, None),
            }
        } else {
            let (r, k) = best_of(game, &support, &members, None);
            (r, members[k].to_deviation(), None)
        };
        if best_player.as_ref().is_none_or(|(b, _, _)| g > *b) {
            best_player = Some((g.clone(), dev, at));
        }
        per_player.push(g);
    }
    let (gap, witness, witness_infoset) = best_player.expect("games have players");
    Ok(GapReport { notion, gap, per_player, per_infoset, witness, witness_infoset })
}

/// Own, chance and opponent choices on the root path of every terminal.
fn path_choices(game: &Game, z: TerminalId) -> Vec<(usize, InfosetId, usize)> {
    let tree = game.tree();
    let mut out = Vec::new();
    let mut cur = game.terminals()[z];
    while let Some(parent) = tree.nodes[cur].parent {
        if let NodeKind::Decision { player, actions, .. } = &tree.nodes[parent].kind {
            let a = actions.iter().position(|e| e.child == cur).expect("child edge");
            out.push((*player, game.node_infoset(parent).expect("decision infoset"), a));
        }
        cur = parent;
    }
    out
}

/// [`crate::metrics::conditional_reach`] by expanding the support profile by profile.
pub fn conditional_reach_expanded(game: &Game, pi: &MixtureOfProducts, i: usize, seq: SeqId) -> ConditionalReach {
    let paths: Vec<Vec<(usize, InfosetId, usize)>> = (0..game.num_terminals()).map(|z| path_choices(game, z)).collect();
    let own_path = game.seq_path(i, seq);
    let mut event_mass = Rational::zero();
    let mut reach = vec![Rational::zero(); game.num_terminals()];
    for (w, prof) in pi.profile_support() {
        if !own_path.iter().all(|&(j, a)| prof.0[i].action_at(game, j) == a) {
            continue;
        }
        for (z, path) in paths.iter().enumerate() {
            if path.iter().all(|&(p, iid, a)| p == i || prof.0[p].action_at(game, iid) == a) {
                reach[z] += &w;
            }
        }
        event_mass += w;
    }
    ConditionalReach { player: i, seq, event_mass, reach }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::gap::{gap, GapOptions};
    use crate::rational::q;

    fn x(g: &Game, labels: &[&str]) -> PureStrategy {
        let actions = g
            .player_infosets(0)
            .iter()
            .zip(labels)
            .map(|(&i, l)| g.infoset(i).action_index(l).unwrap())
            .collect();
        PureStrategy { player: 0, actions }
    }

    #[test]
    fn class_counts_on_lrr() {
        let g = fixtures::lrr();
        let opts = OracleOptions::default();
        let all = enumerate_tables(&g, 0, &opts).unwrap();
        assert_eq!(all.len(), 256);
        let constants = all.iter().filter(|p| is_constant(p)).count();
        let causal = all.iter().filter(|p| is_causal(&g, p)).count();
        let behavioral = all.iter().filter(|p| is_behavioral(&g, p)).count();
        assert!(constants < causal && causal < behavioral && behavioral < all.len());
        assert!(all.iter().filter(|p| is_causal(&g, p)).all(|p| is_behavioral(&g, p)));
        assert!(all.iter().filter(|p| is_constant(p)).all(|p| is_causal(&g, p)));
    }

    #[test]
    fn key_enumeration_matches_filtered_tables() {
        let g = fixtures::lrr();
        let opts = OracleOptions::default();
        let all = enumerate_tables(&g, 0, &opts).unwrap();
        let profiles = [fixtures::lrr_pi(), fixtures::lrr_pi_decomposed(), fixtures::lrr_lrprime()];
        for causal in [true, false] {
            let filtered: Vec<DeviationTable> = all
                .iter()
                .filter(|p| if causal { is_causal(&g, p) } else { is_behavioral(&g, p) })
                .cloned()
                .collect();
            let generated = if causal {
                enumerate_by_keys(&g, 0, &opts, |x, i| causal_key(&g, x, i)).unwrap()
            } else {
                enumerate_by_keys(&g, 0, &opts, |x, i| behavioral_key(&g, x, i)).unwrap()
            };
            assert!(generated.iter().all(|p| filtered.contains(p)));
            // Every filtered table plays like some generated one.
            let plays = |p: &DeviationTable| -> Vec<Vec<bool>> { p.table.values().map(|y| y.reach(&g)).collect() };
            let generated_play: Vec<_> = generated.iter().map(plays).collect();
            assert!(filtered.iter().all(|p| generated_play.contains(&plays(p))));
            for pi in &profiles {
                let support: Vec<_> = pi.profile_support().collect();
                for at in [None, g.infoset_by_name("B")] {
                    assert_eq!(best_of(&g, &support, &filtered, at).0, best_of(&g, &support, &generated, at).0);
                }
            }
        }
    }

    #[test]
    fn membership_examples() {
        let g = fixtures::lrr();
        let xs = enumerate_pure(&g, 0, 16).unwrap();
        let id = DeviationTable::identity(&xs, 0);
        assert!(is_causal(&g, &id));
        assert!(is_behavioral(&g, &id));

        // Root output differs between two strategies that both recommend L.
        let mut bad = id.clone();
        bad.table.insert(x(&g, &["L", "L'"]), x(&g, &["R", "L'"]));
        assert!(!is_causal(&g, &bad));

        // At B, copy the root letter; elsewhere obey. Depends on x(·|R0), x(·|B) only.
        let mut copy = id.clone();
        for s in &xs {
            let mut y = s.clone();
            let b = g.infoset_by_name("B").unwrap();
            let letter = if s.label(&g, g.infoset_by_name("R0").unwrap()) == "L" { "L'" } else { "R'" };
            y.set_action(&g, b, g.infoset(b).action_index(letter).unwrap());
            copy.table.insert(s.clone(), y);
        }
        assert!(is_behavioral(&g, &copy));

        // On root recommendation L play R, then follow the unreached recommendation at B.
        let mut peek = id.clone();
        peek.table.insert(x(&g, &["L", "L'"]), x(&g, &["R", "L'"]));
        peek.table.insert(x(&g, &["L", "R'"]), x(&g, &["R", "R'"]));
        assert!(is_behavioral(&g, &peek));
        assert!(!is_causal(&g, &peek));

        // Root output depends on the recommendation at B, which comes later.
        let mut incomparable = id.clone();
        incomparable.table.insert(x(&g, &["L", "L'"]), x(&g, &["R", "L'"]));
        assert!(!is_behavioral(&g, &incomparable));
    }

    #[test]
    fn lrr_oracle_values() {
        let g = fixtures::lrr();
        let pi = fixtures::lrr_pi();
        let opts = OracleOptions::default();
        let bce = brute_force_gap(&g, &pi, Notion::Bce, &opts).unwrap();
        assert_eq!(bce.gap, q("1"));
        assert_eq!(bce.witness_infoset, g.infoset_by_name("B"));
        let efce = brute_force_gap(&g, &pi, Notion::Efce, &opts).unwrap();
        assert_eq!(efce.gap, q("1/5"));
        if let Deviation::Table { map, .. } = &efce.witness {
            assert_eq!(map[&x(&g, &["R", "R'"])].label(&g, g.infoset_by_name("R0").unwrap()), "L");
        } else {
            panic!("table witness expected");
        }
    }

    #[test]
    fn oracle_agrees_with_dp_on_fixtures() {
        let opts = OracleOptions::default();
        for (g, pi) in [
            (fixtures::lrr(), fixtures::lrr_pi()),
            (fixtures::lrr(), fixtures::lrr_pi_decomposed()),
            (fixtures::lrr(), fixtures::lrr_lrprime()),
            (fixtures::ebos(), fixtures::ebos_pi()),
        ] {
            for n in Notion::ALL {
                let a = brute_force_gap(&g, &pi, n, &opts).unwrap();
                let b = gap(&g, &pi, n, &GapOptions::default()).unwrap();
                assert_eq!(a.gap, b.gap, "{n}");
                assert_eq!(a.per_player, b.per_player, "{n}");
                assert_eq!(a.per_infoset, b.per_infoset, "{n}");
            }
        }
    }

    #[test]
    fn expanded_reach_matches_factorized() {
        for (g, pi) in [
            (fixtures::ebos(), fixtures::ebos_pi()),
            (fixtures::lrr(), fixtures::lrr_pi()),
            (fixtures::surj(), fixtures::surj_bce()),
        ] {
            for i in 0..g.num_players() {
                for s in 0..g.num_sequences(i) {
                    assert_eq!(conditional_reach_expanded(&g, &pi, i, s), crate::metrics::conditional_reach(&g, &pi, i, s));
                }
            }
        }
    }

    #[test]
    fn walk_matches_counterfactual_utility() {
        let g = fixtures::surj();
        for (_, prof) in fixtures::surj_bce().profile_support() {
            for i in 0..2 {
                assert_eq!(walk_utility(&g, &prof, i), crate::metrics::expected_utility(&g, &MixtureOfProducts::pure(prof.clone()), i));
                for &iid in g.player_infosets(i) {
                    assert_eq!(
                        walk_counterfactual_utility(&g, &prof, i, iid),
                        crate::metrics::counterfactual_utility(&g, &prof, i, iid)
                    );
                }
            }
        }
    }
}
