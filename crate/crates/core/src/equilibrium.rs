//! Desk-scale (optimal) EFCE by an exact LP over pure profiles with trigger
//! incentive rows, and BCE through the conversion. Every result is
//! re-verified with the gap DPs.

use std::collections::{BTreeMap, HashMap};

use serde_json::Value;

use crate::convert::efce_to_bce;
use crate::error::{Error, Result};
use crate::game::{Game, SeqId, TerminalId, EMPTY_SEQ};
use crate::gap::{gap, GapOptions, Notion};
use crate::lp::{lp_solve, LinearProgram, LpOutcome, Relation};
use crate::metrics::objective_value;
use crate::rational::Rational;
use crate::strategy::{enumerate_pure, MixtureOfProducts, PureProfile, PureStrategy};

pub const DEFAULT_PROFILE_CAP: u128 = 4096;

#[derive(Clone, Debug)]
pub struct EquilibriumOptions {
    /// Maximum number of pure profiles (LP variables).
    pub profile_cap: u128,
    pub gap: GapOptions,
}

impl Default for EquilibriumOptions {
    fn default() -> Self {
        EquilibriumOptions { profile_cap: DEFAULT_PROFILE_CAP, gap: GapOptions::default() }
    }
}

/// Terminal → coefficient; missing terminals count 0.
pub type Objective = BTreeMap<TerminalId, Rational>;

/// `{"c": {"(a,b)": "p/q", ...}}` keyed by terminal path labels.
pub fn parse_objective(game: &Game, text: &str) -> Result<Objective> {
    let doc: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let c = doc
        .get("c")
        .and_then(Value::as_object)
        .ok_or_else(|| Error::Parse("objective: expected an object field \"c\"".into()))?;
    let mut out = Objective::new();
    for (label, v) in c {
        let z = game
            .terminal_by_label(label)
            .ok_or_else(|| Error::Semantic(format!("objective: unknown terminal {label:?}")))?;
        let s = v.as_str().ok_or_else(|| Error::Parse(format!("objective: {label}: expected a rational string")))?;
        let r: Rational = s.parse().map_err(|_| Error::Parse(format!("objective: {label}: invalid rational {s:?}")))?;
        out.insert(z, r);
    }
    Ok(out)
}

/// `c(z) = Σ_{i ∈ players} u_i(z)`.
pub fn utility_objective(game: &Game, players: &[usize]) -> Objective {
    (0..game.num_terminals()).map(|z| (z, players.iter().map(|&i| game.payoff(z, i)).sum())).collect()
}

/// One incentive row: obey until the recommendation reaches `trigger`, then
/// play `continuation` at the trigger's infoset and below.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TriggerConstraint {
    pub player: usize,
    pub trigger: SeqId,
    pub continuation: PureStrategy,
    /// Coefficient per pure profile, in [`EfceProgram::profiles`] order.
    pub row: Vec<Rational>,
}

/// The pure-profile LP data shared by the solvers.
pub struct EfceProgram {
    pub profiles: Vec<PureProfile>,
    pub triggers: Vec<TriggerConstraint>,
}

struct ProfileSpace {
    strategies: Vec<Vec<PureStrategy>>,
    index: Vec<HashMap<PureStrategy, usize>>,
    /// `[i][profile]`.
    utility: Vec<Vec<Rational>>,
    /// Chance-weighted reach of every terminal per profile, nonzero only.
    outcomes: Vec<Vec<(TerminalId, Rational)>>,
}

impl ProfileSpace {
    fn new(game: &Game, cap: u128) -> Result<ProfileSpace> {
        let n = game.num_players();
        let strategies = (0..n).map(|i| enumerate_pure(game, i, cap)).collect::<Result<Vec<_>>>()?;
        let count = strategies.iter().try_fold(1u128, |acc, s| acc.checked_mul(s.len() as u128)).unwrap_or(u128::MAX);
        if count > cap {
            return Err(Error::CapExceeded { what: "pure profiles".into(), needed: count, cap });
        }
        let index = strategies.iter().map(|l| l.iter().cloned().enumerate().map(|(k, x)| (x, k)).collect()).collect();
        let reach: Vec<Vec<Vec<bool>>> =
            strategies.iter().map(|l| l.iter().map(|x| x.reach(game)).collect()).collect();
        let mut space = ProfileSpace { strategies, index, utility: vec![Vec::new(); n], outcomes: Vec::new() };
        for p in 0..count as usize {
            let ks = space.digits(p);
            let outs: Vec<(TerminalId, Rational)> = (0..game.num_terminals())
                .filter(|&z| (0..n).all(|j| reach[j][ks[j]][game.terminal_seq(z, j)]))
                .map(|z| (z, game.chance_reach(z).clone()))
                .collect();
            for (i, u) in space.utility.iter_mut().enumerate() {
                u.push(outs.iter().map(|(z, pz)| game.payoff(*z, i) * pz).sum());
            }
            space.outcomes.push(outs);
        }
        Ok(space)
    }

    fn len(&self) -> usize {
        self.outcomes.len()
    }

    /// Mixed-radix digits of a profile index, last player fastest.
    fn digits(&self, mut p: usize) -> Vec<usize> {
        let mut ks = vec![0; self.strategies.len()];
        for (j, l) in self.strategies.iter().enumerate().rev() {
            ks[j] = p % l.len();
            p /= l.len();
        }
        ks
    }

    fn number(&self, ks: &[usize]) -> usize {
        ks.iter().zip(&self.strategies).fold(0, |acc, (k, l)| acc * l.len() + k)
    }

    fn profile(&self, p: usize) -> PureProfile {
        PureProfile(self.digits(p).iter().zip(&self.strategies).map(|(&k, l)| l[k].clone()).collect())
    }
}

#[allow(clippy::needless_range_loop)]
fn trigger_rows(game: &Game, space: &ProfileSpace) -> Vec<TriggerConstraint> {
    let mut out = Vec::new();
    for i in 0..game.num_players() {
        let xs = &space.strategies[i];
        let reach: Vec<Vec<bool>> = xs.iter().map(|x| x.reach(game)).collect();
        for s in 0..game.num_sequences(i) {
            let top = game.seq_infoset_action(i, s).map(|(j, _)| j);
            let below: Vec<_> = game
                .player_infosets(i)
                .iter()
                .copied()
                .filter(|&k| top.is_none_or(|j| game.infoset_precedes(j, k)))
                .collect();
            let mut seen: Vec<Vec<Rational>> = Vec::new();
            let mut continuations: Vec<Vec<usize>> = Vec::new();
            for y in xs {
                let key: Vec<usize> = below.iter().map(|&k| y.action_at(game, k)).collect();
                if !continuations.contains(&key) {
                    continuations.push(key);
                }
            }
            for key in continuations {
                let mut row = vec![Rational::zero(); space.len()];
                let mut cont = PureStrategy::lex_first(game, i);
                for (&k, &a) in below.iter().zip(&key) {
                    cont.set_action(game, k, a);
                }
                let mut any_positive = false;
                for (p, r) in row.iter_mut().enumerate() {
                    let mut ks = space.digits(p);
                    if !reach[ks[i]][s] {
                        continue;
                    }
                    let mut dev = xs[ks[i]].clone();
                    for (&k, &a) in below.iter().zip(&key) {
                        dev.set_action(game, k, a);
                    }
                    ks[i] = space.index[i][&dev];
                    *r = &space.utility[i][space.number(&ks)] - &space.utility[i][p];
                    any_positive |= r.is_positive();
                }
                // Rows that can never be violated carry no information.
                if !any_positive || seen.contains(&row) {
                    continue;
                }
                seen.push(row.clone());
                out.push(TriggerConstraint { player: i, trigger: s, continuation: cont, row });
            }
        }
    }
    out
}

pub fn efce_program(game: &Game, opts: &EquilibriumOptions) -> Result<EfceProgram> {
    let space = ProfileSpace::new(game, opts.profile_cap)?;
    let triggers = trigger_rows(game, &space);
    Ok(EfceProgram { profiles: (0..space.len()).map(|p| space.profile(p)).collect(), triggers })
}

#[derive(Clone, Debug)]
pub struct Solved {
    pub notion: Notion,
    pub profile: MixtureOfProducts,
    /// Measured gap of `profile` for `notion`.
    pub gap: Rational,
    /// Objective value, when an objective was given.
    pub value: Option<Rational>,
    pub lp_variables: usize,
    pub lp_rows: usize,
    pub pivots: usize,
}

/// Build and solve the LP. With `eps > 0`, per-sequence slack variables
/// bound the total causal regret, since several triggers may fire in one play.
fn solve_efce_lp(
    game: &Game,
    eps: &Rational,
    objective: Option<&Objective>,
    opts: &EquilibriumOptions,
) -> Result<Solved> {
    if eps.is_negative() {
        return Err(Error::Semantic(format!("epsilon must be nonnegative, got {eps}")));
    }
    let space = ProfileSpace::new(game, opts.profile_cap)?;
    let triggers = trigger_rows(game, &space);
    let n = space.len();
    // Slack variable per (player, sequence) when eps > 0.
    let mut slack: Vec<Vec<usize>> = Vec::new();
    let mut num_vars = n;
    if eps.is_positive() {
        for i in 0..game.num_players() {
            slack.push((num_vars..num_vars + game.num_sequences(i)).collect());
            num_vars += game.num_sequences(i);
        }
    }
    let mut lp = LinearProgram::new(num_vars);
    lp.add((0..n).map(|p| (p, Rational::one())).collect(), Relation::Eq, Rational::one());
    for t in &triggers {
        let mut coeffs: Vec<(usize, Rational)> =
            t.row.iter().enumerate().filter(|(_, r)| !r.is_zero()).map(|(p, r)| (p, r.clone())).collect();
        if eps.is_positive() {
            coeffs.push((slack[t.player][t.trigger], -Rational::one()));
        }
        lp.add(coeffs, Relation::Le, Rational::zero());
    }
    if eps.is_positive() {
        for (i, d) in slack.iter().enumerate() {
            for s in 0..game.num_sequences(i) {
                let mut coeffs = vec![(d[s], -Rational::one())];
                for &k in &game.seq_table(i).child_infosets[s] {
                    for a in 0..game.infoset(k).actions.len() {
                        coeffs.push((d[game.infoset(k).seq(a)], Rational::one()));
                    }
                }
                if coeffs.len() > 1 {
                    lp.add(coeffs, Relation::Le, Rational::zero());
                }
            }
            lp.add(vec![(d[EMPTY_SEQ], Rational::one())], Relation::Le, eps.clone());
        }
    }
    if let Some(c) = objective {
        lp.maximize = true;
        for (p, outs) in space.outcomes.iter().enumerate() {
            lp.objective[p] = outs.iter().filter_map(|(z, pz)| c.get(z).map(|cz| cz * pz)).sum();
        }
    }
    let (x, value, pivots) = match lp_solve(&lp)? {
        LpOutcome::Optimal { x, value, pivots } => (x, value, pivots),
        LpOutcome::Infeasible => {
            return Err(Error::Internal("the EFCE program reported infeasible; correlated equilibria always exist".into()))
        }
        LpOutcome::Unbounded => return Err(Error::Internal("the EFCE program reported unbounded".into())),
    };
    let weighted: Vec<(Rational, PureProfile)> =
        (0..n).filter(|&p| !x[p].is_zero()).map(|p| (x[p].clone(), space.profile(p))).collect();
    let profile = MixtureOfProducts::from_profiles(weighted);
    let measured = gap(game, &profile, Notion::Efce, &opts.gap)?.gap;
    if measured > *eps {
        return Err(Error::Internal(format!("LP solution has efce gap {measured}, above {eps}")));
    }
    let value = match objective {
        Some(c) => {
            let direct = objective_value(game, &profile, c);
            if direct != value {
                return Err(Error::Internal("objective value disagrees with the LP".into()));
            }
            Some(direct)
        }
        None => None,
    };
    Ok(Solved {
        notion: Notion::Efce,
        profile,
        gap: measured,
        value,
        lp_variables: num_vars,
        lp_rows: lp.constraints.len(),
        pivots,
    })
}

pub fn compute_efce(game: &Game, eps: &Rational, opts: &EquilibriumOptions) -> Result<Solved> {
    solve_efce_lp(game, eps, None, opts)
}

pub fn optimal_efce(game: &Game, c: &Objective, opts: &EquilibriumOptions) -> Result<Solved> {
    solve_efce_lp(game, &Rational::zero(), Some(c), opts)
}

fn to_bce(game: &Game, efce: Solved, c: Option<&Objective>, opts: &EquilibriumOptions) -> Result<Solved> {
    let profile = efce_to_bce(game, &efce.profile);
    let measured = gap(game, &profile, Notion::Bce, &opts.gap)?.gap;
    if !measured.is_zero() {
        return Err(Error::Internal(format!("converted EFCE has bce gap {measured}")));
    }
    let value = match c {
        Some(c) => {
            let v = objective_value(game, &profile, c);
            if Some(&v) != efce.value.as_ref() {
                return Err(Error::Internal("conversion changed the objective value".into()));
            }
            Some(v)
        }
        None => None,
    };
    Ok(Solved { notion: Notion::Bce, profile, gap: measured, value, ..efce })
}

pub fn compute_bce(game: &Game, opts: &EquilibriumOptions) -> Result<Solved> {
    let efce = compute_efce(game, &Rational::zero(), opts)?;
    to_bce(game, efce, None, opts)
}

pub fn optimal_bce(game: &Game, c: &Objective, opts: &EquilibriumOptions) -> Result<Solved> {
    let efce = optimal_efce(game, c, opts)?;
    to_bce(game, efce, Some(c), opts)
}

/// Front door for `gt solve`: efce or bce, optional objective, optional ε.
/// A bce request with ε > 0 converts an ε-EFCE and checks the bce gap ≤ ε.
pub fn solve(
    game: &Game,
    notion: Notion,
    eps: &Rational,
    objective: Option<&Objective>,
    opts: &EquilibriumOptions,
) -> Result<Solved> {
    let efce = solve_efce_lp(game, eps, objective, opts)?;
    match notion {
        Notion::Efce => Ok(efce),
        Notion::Bce if eps.is_zero() => to_bce(game, efce, objective, opts),
        Notion::Bce => {
            let profile = efce_to_bce(game, &efce.profile);
            let measured = gap(game, &profile, Notion::Bce, &opts.gap)?.gap;
            if measured > *eps {
                return Err(Error::Internal(format!("converted ε-EFCE has bce gap {measured}, above {eps}")));
            }
            let value = objective.map(|c| objective_value(game, &profile, c));
            Ok(Solved { notion: Notion::Bce, profile, gap: measured, value, ..efce })
        }
        other => Err(Error::Semantic(format!("solving is supported for efce and bce, not {other}"))),
    }
}

impl Solved {
    pub fn to_json(&self, game: &Game) -> Value {
        let mut out = serde_json::Map::new();
        out.insert("notion".into(), Value::from(self.notion.as_str()));
        out.insert("gap".into(), Value::from(self.gap.to_string()));
        out.insert("gap_decimal".into(), Value::from(self.gap.to_decimal(20)));
        if let Some(v) = &self.value {
            out.insert("value".into(), Value::from(v.to_string()));
            out.insert("value_decimal".into(), Value::from(v.to_decimal(20)));
        }
        out.insert("profile".into(), crate::profile_io::profile_to_json(game, &self.profile));
        out.insert(
            "lp".into(),
            serde_json::json!({"variables": self.lp_variables, "rows": self.lp_rows, "pivots": self.pivots}),
        );
        Value::Object(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::rational::q;

    fn opts() -> EquilibriumOptions {
        EquilibriumOptions::default()
    }

    #[test]
    fn lrr_equilibria() {
        let g = fixtures::lrr();
        let e = compute_efce(&g, &q("0"), &opts()).unwrap();
        assert_eq!(e.gap, q("0"));
        let best = optimal_efce(&g, &utility_objective(&g, &[0]), &opts()).unwrap();
        assert_eq!(best.value, Some(q("2")));
        let bce = optimal_bce(&g, &utility_objective(&g, &[0]), &opts()).unwrap();
        assert_eq!(bce.value, Some(q("2")));
        assert_eq!(bce.gap, q("0"));
    }

    #[test]
    fn ebos_equilibria() {
        let g = fixtures::ebos();
        let e = compute_efce(&g, &q("0"), &opts()).unwrap();
        assert_eq!(e.gap, q("0"));
        let b = compute_bce(&g, &opts()).unwrap();
        assert_eq!(b.gap, q("0"));
        // Welfare optimum: the best terminal welfare is 5 and a pure equilibrium reaches it.
        let w = utility_objective(&g, &[0, 1]);
        let max_terminal = w.values().max().unwrap().clone();
        assert_eq!(max_terminal, q("5"));
        let best = optimal_efce(&g, &w, &opts()).unwrap();
        assert_eq!(best.value, Some(max_terminal));
        assert_eq!(optimal_bce(&g, &w, &opts()).unwrap().value, best.value);
    }

    #[test]
    fn ebos_reference_profile_is_feasible() {
        let g = fixtures::ebos();
        let prog = efce_program(&g, &opts()).unwrap();
        let pi = fixtures::ebos_pi();
        let mut mu = vec![Rational::zero(); prog.profiles.len()];
        for (w, p) in pi.profile_support() {
            let k = prog.profiles.iter().position(|x| *x == p).unwrap();
            mu[k] += w;
        }
        for t in &prog.triggers {
            let v: Rational = t.row.iter().zip(&mu).map(|(r, m)| r * m).sum();
            assert!(!v.is_positive());
        }
    }

    #[test]
    fn surj_equilibria_exit() {
        let g = fixtures::surj();
        let c = g.infoset_by_name("C").unwrap();
        let e_action = g.infoset(c).action_index("E").unwrap();
        for solved in [compute_efce(&g, &q("0"), &opts()).unwrap(), compute_bce(&g, &opts()).unwrap()] {
            assert_eq!(solved.gap, q("0"));
            for (w, p) in solved.profile.profile_support() {
                assert!(w.is_zero() || p.0[1].action_at(&g, c) == e_action);
            }
        }
    }

    #[test]
    fn approximate_equilibria() {
        let g = fixtures::lrr();
        // Minimizing u1 under a regret budget of 1/2 pushes down to utility 3/2.
        let mut c = utility_objective(&g, &[0]);
        for v in c.values_mut() {
            *v = -v.clone();
        }
        let s = solve_efce_lp(&g, &q("1/2"), Some(&c), &opts()).unwrap();
        assert!(s.gap <= q("1/2"));
        assert_eq!(s.value, Some(q("-3/2")));
    }

    #[test]
    fn solve_front_door() {
        let g = fixtures::lrr();
        let c = utility_objective(&g, &[0]);
        let s = solve(&g, Notion::Bce, &q("1/10"), Some(&c), &opts()).unwrap();
        assert!(s.gap <= q("1/10"));
        assert_eq!(s.value, Some(q("2")));
        assert!(matches!(solve(&g, Notion::Nfcce, &q("0"), None, &opts()), Err(Error::Semantic(_))));
        let j = s.to_json(&g);
        assert_eq!(j["value"], "2");
    }

    #[test]
    fn objective_documents() {
        let g = fixtures::lrr();
        let c = parse_objective(&g, r#"{"c":{"(L)":"2","(R,L')":"1/2"}}"#).unwrap();
        assert_eq!(c.len(), 2);
        assert!(matches!(parse_objective(&g, r#"{"c":{"(Q)":"1"}}"#), Err(Error::Semantic(_))));
        assert!(matches!(parse_objective(&g, "[]"), Err(Error::Parse(_))));
    }

    #[test]
    fn profile_cap_refuses() {
        let g = fixtures::ebos();
        let o = EquilibriumOptions { profile_cap: 4, ..opts() };
        assert!(matches!(compute_efce(&g, &q("0"), &o), Err(Error::CapExceeded { .. })));
    }
}
