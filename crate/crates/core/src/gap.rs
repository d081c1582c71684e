//! Exact worst-case regret ("gap") of a correlated profile for each equilibrium notion.
//!
//! * `efce`: causal deviations, ordinary regret. Computed by an obedient walk
//!   over recommendation states, where each state may commit to a
//!   counterfactual best response.
//! * `bce`: behavioral deviations, counterfactual regret at every infoset.
//! * `full-efce`: behavioral deviations, ordinary regret.
//! * `nfcce`: constant deviations.
//!
//! The behavioral DPs group support strategies by the tuple of local
//! recommendations along each infoset's chain; only realized tuples are kept.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde_json::{json, Map, Value};

use crate::convert::{backward_induction, leaf_values};
use crate::deviation::{history, Deviation, Rule};
use crate::error::{Error, Result};
use crate::game::{Game, InfosetId, SeqId, EMPTY_SEQ};
use crate::rational::Rational;
use crate::strategy::{MixtureOfProducts, PureStrategy};

pub const DEFAULT_STATE_CAP: u128 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Notion {
    Efce,
    Bce,
    FullEfce,
    Nfcce,
}

impl Notion {
    pub const ALL: [Notion; 4] = [Notion::Efce, Notion::Bce, Notion::FullEfce, Notion::Nfcce];

    pub fn as_str(self) -> &'static str {
        match self {
            Notion::Efce => "efce",
            Notion::Bce => "bce",
            Notion::FullEfce => "full-efce",
            Notion::Nfcce => "nfcce",
        }
    }
}

impl fmt::Display for Notion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Notion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Notion::ALL
            .into_iter()
            .find(|n| n.as_str() == s)
            .ok_or_else(|| Error::UnknownNotion(s.to_string()))
    }
}

#[derive(Clone, Debug)]
pub struct GapOptions {
    /// Upper bound on recommendation-history states for the behavioral DPs.
    pub state_cap: u128,
}

impl Default for GapOptions {
    fn default() -> Self {
        GapOptions { state_cap: DEFAULT_STATE_CAP }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GapReport {
    pub notion: Notion,
    pub gap: Rational,
    pub per_player: Vec<Rational>,
    /// Counterfactual gap of every infoset (bce only).
    pub per_infoset: BTreeMap<InfosetId, Rational>,
    /// A best deviation of the first player attaining `gap`.
    pub witness: Deviation,
    /// Infoset at which the witness is measured (bce only).
    pub witness_infoset: Option<InfosetId>,
}

impl GapReport {
    fn assemble(
        notion: Notion,
        per_player: Vec<Rational>,
        witnesses: Vec<(Deviation, Option<InfosetId>)>,
        per_infoset: BTreeMap<InfosetId, Rational>,
    ) -> GapReport {
        let mut best = 0;
        for (i, g) in per_player.iter().enumerate() {
            if *g > per_player[best] {
                best = i;
            }
        }
        let gap = per_player[best].clone();
        let (witness, witness_infoset) = witnesses.into_iter().nth(best).expect("one witness per player");
        GapReport { notion, gap, per_player, per_infoset, witness, witness_infoset }
    }

    pub fn to_json(&self, game: &Game) -> Value {
        let mut m = Map::new();
        m.insert("notion".into(), json!(self.notion.as_str()));
        m.insert("gap".into(), json!(self.gap.to_string()));
        m.insert("gap_decimal".into(), json!(self.gap.to_decimal(20)));
        let per_player: Vec<Value> = self
            .per_player
            .iter()
            .enumerate()
            .map(|(i, g)| json!({"player": game.player_name(i), "gap": g.to_string()}))
            .collect();
        m.insert("per_player".into(), Value::Array(per_player));
        if self.notion == Notion::Bce {
            let mut pi = Map::new();
            for (iid, g) in &self.per_infoset {
                pi.insert(game.infoset(*iid).name.clone(), json!(g.to_string()));
            }
            m.insert("per_infoset".into(), Value::Object(pi));
        }
        let mut w = self.witness.to_json(game);
        if let (Some(iid), Value::Object(o)) = (self.witness_infoset, &mut w) {
            o.insert("infoset".into(), json!(game.infoset(iid).name));
        }
        m.insert("witness".into(), w);
        Value::Object(m)
    }
}

/// Per-player data shared by the DPs.
struct PlayerView<'a> {
    game: &'a Game,
    i: usize,
    /// `(α·β, component, recommended strategy)`.
    entries: Vec<(Rational, usize, &'a PureStrategy)>,
    /// `D[t][s] = Σ_{z: σ_i(z)=s} u_i(z)·p(z)·Π_{j≠i} π_j^{(t)}(z)`.
    d: Vec<Vec<Rational>>,
}

impl<'a> PlayerView<'a> {
    fn new(game: &'a Game, pi: &'a MixtureOfProducts, i: usize) -> Self {
        let opp = pi.reach_products(game, Some(i));
        let d = opp.iter().map(|o| leaf_values(game, i, o)).collect();
        let mut entries = Vec::new();
        for (t, c) in pi.components.iter().enumerate() {
            for (beta, x) in &c.strategies[i] {
                let w = &c.alpha * beta;
                if !w.is_zero() {
                    entries.push((w, t, x));
                }
            }
        }
        PlayerView { game, i, entries, d }
    }

    fn components(&self) -> usize {
        self.d.len()
    }

    /// Per-component mass of entries whose recommendation reaches every sequence.
    fn seq_mass(&self) -> Vec<Vec<Rational>> {
        let n = self.game.num_sequences(self.i);
        let mut m = vec![vec![Rational::zero(); self.components()]; n];
        for (w, t, x) in &self.entries {
            for (s, r) in x.reach(self.game).into_iter().enumerate() {
                if r {
                    m[s][*t] += w;
                }
            }
        }
        m
    }

    fn leaf_for(&self, mass: &[Rational]) -> Vec<Rational> {
        (0..self.game.num_sequences(self.i))
            .map(|s| mass.iter().zip(&self.d).map(|(m, d)| m * &d[s]).sum())
            .collect()
    }

    fn expected_utility(&self) -> Rational {
        let mass = self.seq_mass();
        (0..self.game.num_sequences(self.i))
            .map(|s| mass[s].iter().zip(&self.d).map(|(m, d)| m * &d[s]).sum::<Rational>())
            .sum()
    }
}

pub fn gap(game: &Game, pi: &MixtureOfProducts, notion: Notion, opts: &GapOptions) -> Result<GapReport> {
    pi.check(game)?;
    match notion {
        Notion::Efce => Ok(efce_gap(game, pi)),
        Notion::Nfcce => Ok(nfcce_gap(game, pi)),
        Notion::Bce | Notion::FullEfce => behavioral_gap(game, pi, notion, opts),
    }
}

fn nfcce_gap(game: &Game, pi: &MixtureOfProducts) -> GapReport {
    let mut per_player = Vec::new();
    let mut witnesses = Vec::new();
    for i in 0..game.num_players() {
        let v = PlayerView::new(game, pi, i);
        let mass: Vec<Rational> = pi.components.iter().map(|c| c.alpha.clone()).collect();
        let (y, best) = backward_induction(game, i, &v.leaf_for(&mass), None);
        let g = best - v.expected_utility();
        if g.is_positive() {
            witnesses.push((Deviation::Constant(y), None));
        } else {
            witnesses.push((Deviation::Identity { player: i }, None));
        }
        per_player.push(g.max(Rational::zero()));
    }
    GapReport::assemble(Notion::Nfcce, per_player, witnesses, BTreeMap::new())
}

fn efce_gap(game: &Game, pi: &MixtureOfProducts) -> GapReport {
    let mut per_player = Vec::new();
    let mut witnesses = Vec::new();
    for i in 0..game.num_players() {
        let (g, dev) = efce_player(game, pi, i);
        per_player.push(g);
        witnesses.push((dev, None));
    }
    GapReport::assemble(Notion::Efce, per_player, witnesses, BTreeMap::new())
}

struct EfceWalk<'v, 'a> {
    view: &'v PlayerView<'a>,
    alpha_mass: Vec<Vec<Rational>>,
    /// Commit decision per sequence: `Some(continuation)` when committing beats obeying.
    commits: BTreeMap<SeqId, PureStrategy>,
}

impl EfceWalk<'_, '_> {
    /// Best value over terminals below the sequence's infoset for recommendations reaching `s`.
    fn state(&mut self, s: SeqId) -> Rational {
        let game = self.view.game;
        let i = self.view.i;
        if self.alpha_mass[s].iter().all(Rational::is_zero) {
            return Rational::zero();
        }
        let obey = self.obey(s);
        let top = game.seq_infoset_action(i, s).map(|(j, _)| j);
        let (y, commit) = backward_induction(game, i, &self.view.leaf_for(&self.alpha_mass[s]), top);
        if commit > obey {
            self.commits.insert(s, y);
            commit
        } else {
            obey
        }
    }

    /// Value of obeying the recommendation at `s`, deciding optimally below.
    fn obey(&mut self, s: SeqId) -> Rational {
        let game = self.view.game;
        let i = self.view.i;
        let mut v: Rational = self.alpha_mass[s].iter().zip(&self.view.d).map(|(m, d)| m * &d[s]).sum();
        for &k in &game.seq_table(i).child_infosets[s] {
            for a in 0..game.infoset(k).actions.len() {
                v += self.state(game.infoset(k).seq(a));
            }
        }
        v
    }
}

fn efce_player(game: &Game, pi: &MixtureOfProducts, i: usize) -> (Rational, Deviation) {
    let view = PlayerView::new(game, pi, i);
    let alpha_mass = view.seq_mass();
    let eu = view.expected_utility();
    let mut walk = EfceWalk { view: &view, alpha_mass, commits: BTreeMap::new() };
    let best = walk.state(EMPTY_SEQ);
    let g = best - eu;
    // Keep only commits not shadowed by a commit above them.
    let mut triggers = BTreeMap::new();
    for (s, y) in &walk.commits {
        let shadowed = walk.commits.keys().any(|t| t != s && game.seq_precedes(i, *t, *s));
        if !shadowed {
            triggers.insert(*s, y.clone());
        }
    }
    let dev = if triggers.is_empty() {
        Deviation::Identity { player: i }
    } else {
        Deviation::Trigger { player: i, triggers }
    };
    (g, dev)
}

/// Per (infoset, recommendation history): per-component weight.
type Groups = BTreeMap<Vec<usize>, Vec<Rational>>;

struct BehavioralDp {
    /// Optimal and obedient value of every state, keyed by infoset then history.
    best: Vec<BTreeMap<Vec<usize>, (Rational, Rational, usize)>>,
}

fn behavioral_dp(view: &PlayerView<'_>, opts: &GapOptions) -> Result<BehavioralDp> {
    let game = view.game;
    let i = view.i;
    let isets = game.player_infosets(i);
    let mut groups: Vec<Groups> = vec![Groups::new(); isets.len()];
    let mut states: u128 = 0;
    for (w, t, x) in &view.entries {
        for (local, &iid) in isets.iter().enumerate() {
            let g = groups[local].entry(history(game, x, iid)).or_insert_with(|| {
                states += 1;
                vec![Rational::zero(); view.components()]
            });
            g[*t] += w;
        }
        if states > opts.state_cap {
            return Err(Error::CapExceeded {
                what: "recommendation-history states".into(),
                needed: states,
                cap: opts.state_cap,
            });
        }
    }
    // Children before parents: longer chains first.
    let mut order: Vec<InfosetId> = isets.to_vec();
    order.sort_by_key(|&k| std::cmp::Reverse(game.infoset_chain(k).len()));
    let mut best: Vec<BTreeMap<Vec<usize>, (Rational, Rational, usize)>> = vec![BTreeMap::new(); isets.len()];
    // Sums of child-state values grouped by the parent's history.
    let mut agg: Vec<BTreeMap<Vec<usize>, (Rational, Rational)>> = vec![BTreeMap::new(); isets.len()];
    for &k in &order {
        let info = game.infoset(k);
        let local = info.local;
        for (h, weights) in &groups[local] {
            let rec = *h.last().expect("history includes the infoset itself");
            let value_of = |a: usize| -> (Rational, Rational) {
                let s = info.seq(a);
                let direct: Rational = weights.iter().zip(&view.d).map(|(w, d)| w * &d[s]).sum();
                let (mut dev, mut obey) = (direct.clone(), direct);
                for &c in &game.seq_table(i).child_infosets[s] {
                    if let Some((dv, ov)) = agg[game.infoset(c).local].get(h) {
                        dev += dv;
                        obey += ov;
                    }
                }
                (dev, obey)
            };
            let (rec_dev, obey) = value_of(rec);
            let mut choice = (rec, rec_dev);
            for &a in &info.lex {
                if a == rec {
                    continue;
                }
                let (v, _) = value_of(a);
                if v > choice.1 {
                    choice = (a, v);
                }
            }
            best[local].insert(h.clone(), (choice.1, obey, choice.0));
        }
        {
            let mut sums: BTreeMap<Vec<usize>, (Rational, Rational)> = BTreeMap::new();
            for (h, (dv, ov, _)) in &best[local] {
                let e = sums.entry(h[..h.len() - 1].to_vec()).or_insert_with(|| (Rational::zero(), Rational::zero()));
                e.0 += dv;
                e.1 += ov;
            }
            agg[local] = sums;
        }
    }
    Ok(BehavioralDp { best })
}

fn behavioral_gap(game: &Game, pi: &MixtureOfProducts, notion: Notion, opts: &GapOptions) -> Result<GapReport> {
    let mut per_player = Vec::new();
    let mut witnesses = Vec::new();
    let mut per_infoset = BTreeMap::new();
    for i in 0..game.num_players() {
        let view = PlayerView::new(game, pi, i);
        let dp = behavioral_dp(&view, opts)?;
        let local_gap = |k: InfosetId| -> Rational {
            dp.best[game.infoset(k).local].values().map(|(dv, ov, _)| dv - ov).sum()
        };
        let rules_from = |top: Option<InfosetId>| -> Vec<Rule> {
            let mut rules = Vec::new();
            for &k in game.player_infosets(i) {
                if top.is_some_and(|t| !game.infoset_precedes(t, k)) {
                    continue;
                }
                for (h, (_, _, a)) in &dp.best[game.infoset(k).local] {
                    if *a != *h.last().expect("nonempty history") {
                        rules.push(Rule { infoset: k, history: Some(h.clone()), action: *a });
                    }
                }
            }
            rules
        };
        let deviation = |rules: Vec<Rule>| {
            if rules.is_empty() {
                Deviation::Identity { player: i }
            } else {
                Deviation::Behavioral { player: i, rules }
            }
        };
        match notion {
            Notion::Bce => {
                let mut best: Option<(InfosetId, Rational)> = None;
                for &k in game.player_infosets(i) {
                    let g = local_gap(k);
                    if best.as_ref().is_none_or(|(_, b)| g > *b) {
                        best = Some((k, g.clone()));
                    }
                    per_infoset.insert(k, g);
                }
                match best {
                    Some((k, g)) => {
                        witnesses.push((deviation(rules_from(Some(k))), Some(k)));
                        per_player.push(g);
                    }
                    None => {
                        witnesses.push((Deviation::Identity { player: i }, None));
                        per_player.push(Rational::zero());
                    }
                }
            }
            _ => {
                let g: Rational = game.seq_table(i).child_infosets[EMPTY_SEQ].iter().map(|&k| local_gap(k)).sum();
                witnesses.push((deviation(rules_from(None)), None));
                per_player.push(g);
            }
        }
    }
    Ok(GapReport::assemble(notion, per_player, witnesses, per_infoset))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convert::efce_to_bce;
    use crate::deviation::{regret, Scope};
    use crate::fixtures;
    use crate::rational::q;

    fn run(g: &Game, pi: &MixtureOfProducts, n: Notion) -> GapReport {
        gap(g, pi, n, &GapOptions::default()).unwrap()
    }

    fn witness_regret(g: &Game, pi: &MixtureOfProducts, r: &GapReport) -> Rational {
        let scope = match r.witness_infoset {
            Some(k) => Scope::Counterfactual(k),
            None => Scope::Full,
        };
        regret(g, pi, &r.witness, scope)
    }

    #[test]
    fn ebos_gaps() {
        let g = fixtures::ebos();
        let pi = fixtures::ebos_pi();
        assert_eq!(run(&g, &pi, Notion::Efce).gap, q("0"));
        let bce = run(&g, &pi, Notion::Bce);
        assert_eq!(bce.gap, q("1"));
        assert_eq!(witness_regret(&g, &pi, &bce), q("1"));
        let conv = efce_to_bce(&g, &pi);
        assert_eq!(run(&g, &conv, Notion::Bce).gap, q("0"));
    }

    #[test]
    fn lrr_gaps() {
        let g = fixtures::lrr();
        let pi = fixtures::lrr_pi();
        let efce = run(&g, &pi, Notion::Efce);
        assert_eq!(efce.gap, q("1/5"));
        assert_eq!(witness_regret(&g, &pi, &efce), q("1/5"));
        let bce = run(&g, &pi, Notion::Bce);
        assert_eq!(bce.gap, q("1"));
        assert_eq!(bce.witness_infoset, g.infoset_by_name("B"));
        assert_eq!(witness_regret(&g, &pi, &bce), q("1"));
        let conv = efce_to_bce(&g, &pi);
        let r = run(&g, &conv, Notion::Bce);
        assert_eq!(r.gap, q("1/5"));
        assert_eq!(r.per_infoset[&g.infoset_by_name("B").unwrap()], q("1/10"));
    }

    #[test]
    fn gaps_are_nonnegative_and_ordered() {
        for (g, pi) in [
            (fixtures::ebos(), fixtures::ebos_pi()),
            (fixtures::lrr(), fixtures::lrr_pi()),
            (fixtures::surj(), fixtures::surj_bce()),
        ] {
            let reports: Vec<GapReport> = Notion::ALL.iter().map(|&n| run(&g, &pi, n)).collect();
            for r in &reports {
                assert!(!r.gap.is_negative());
                assert_eq!(witness_regret(&g, &pi, r), r.gap, "{}", r.notion);
            }
            assert!(reports[0].gap <= reports[2].gap);
            assert!(reports[3].gap <= reports[0].gap);
        }
    }

    #[test]
    fn surj_reference_profile_is_bce() {
        let g = fixtures::surj();
        assert_eq!(run(&g, &fixtures::surj_bce(), Notion::Bce).gap, q("0"));
    }

    #[test]
    fn state_cap_refuses() {
        let g = fixtures::ebos();
        let pi = fixtures::ebos_pi();
        let err = gap(&g, &pi, Notion::Bce, &GapOptions { state_cap: 1 }).unwrap_err();
        assert!(matches!(err, Error::CapExceeded { .. }));
    }

    #[test]
    fn notion_names() {
        for n in Notion::ALL {
            assert_eq!(n.as_str().parse::<Notion>().unwrap(), n);
        }
        assert!(matches!("ce".parse::<Notion>(), Err(Error::UnknownNotion(_))));
    }
}
