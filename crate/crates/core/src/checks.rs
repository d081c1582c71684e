//! The reproduction suite: fixture values, conversion properties on random
//! games, and oracle agreement. Shared by the `acceptance` test target and
//! `gt paper-check`.

use std::collections::BTreeMap;
use std::fmt::Debug;
use std::time::{Duration, Instant};

use rand::Rng;

use crate::convert::efce_to_bce;
use crate::equilibrium::{compute_bce, compute_efce, optimal_bce, optimal_efce, utility_objective, EquilibriumOptions};
use crate::error::Result;
use crate::fixtures;
use crate::game::Game;
use crate::gap::{gap, GapOptions, Notion};
use crate::gen::{self, GenConfig};
use crate::metrics::{
    conditional_reach, counterfactual_utility, counterfactually_outcome_equivalent, expected_utility,
    outcome_equivalent, subtree_conditional_utility,
};
use crate::oracles::{brute_force_gap, conditional_reach_expanded, OracleOptions};
use crate::rational::Rational;
use crate::strategy::{
    decompose, enumerate_pure, mixture_from_behavior_products, MixtureOfProducts, PureProfile, PureStrategy,
    SequenceFormVector,
};

#[derive(Clone, Debug)]
pub struct SuiteOptions {
    pub seed: u64,
    pub random_games: usize,
    pub tiny_games: usize,
    pub behaviors_per_fixture: usize,
    pub objective_pairs: usize,
    /// Enforce the wall-clock bounds.
    pub timed: bool,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            seed: 20_240_601,
            random_games: 200,
            tiny_games: 50,
            behaviors_per_fixture: 100,
            objective_pairs: 20,
            timed: true,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CriterionResult {
    pub id: u32,
    pub title: &'static str,
    pub checks: usize,
    pub failures: Vec<String>,
    pub notes: Vec<String>,
    pub elapsed: Duration,
    pub bound: Duration,
}

impl CriterionResult {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    /// `PASS 3 conversion property on random games (812 checks, 41.2s)`.
    pub fn line(&self) -> String {
        format!(
            "{} {:>2} {} ({} checks, {:.1}s)",
            if self.passed() { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.checks,
            self.elapsed.as_secs_f64()
        )
    }
}

struct Checker {
    checks: usize,
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Checker {
    fn new() -> Self {
        Checker { checks: 0, failures: Vec::new(), notes: Vec::new() }
    }

    fn eq<T: PartialEq + Debug>(&mut self, what: impl Into<String>, got: T, want: T) {
        self.checks += 1;
        if got != want {
            self.failures.push(format!("{}: got {got:?}, want {want:?}", what.into()));
        }
    }

    fn truth(&mut self, what: impl Into<String>, ok: bool) {
        self.checks += 1;
        if !ok {
            self.failures.push(what.into());
        }
    }

    fn ok<T>(&mut self, what: impl Into<String>, r: Result<T>) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.checks += 1;
                self.failures.push(format!("{}: {e}", what.into()));
                None
            }
        }
    }
}

fn run(id: u32, title: &'static str, bound_secs: u64, opts: &SuiteOptions, body: impl FnOnce(&mut Checker)) -> CriterionResult {
    let start = Instant::now();
    let mut ck = Checker::new();
    body(&mut ck);
    let elapsed = start.elapsed();
    let bound = Duration::from_secs(bound_secs);
    if opts.timed && elapsed > bound {
        ck.failures.push(format!("took {:.1}s, bound {bound_secs}s", elapsed.as_secs_f64()));
    }
    CriterionResult { id, title, checks: ck.checks, failures: ck.failures, notes: ck.notes, elapsed, bound }
}

fn q(s: &str) -> Rational {
    s.parse().expect("literal rational")
}

/// Pure strategy from one action label per infoset, in the player's infoset order.
pub fn pure_from_actions(game: &Game, player: usize, labels: &[&str]) -> PureStrategy {
    let actions = game
        .player_infosets(player)
        .iter()
        .zip(labels)
        .map(|(&i, l)| game.infoset(i).action_index(l).unwrap_or_else(|| panic!("no action {l}")))
        .collect();
    PureStrategy { player, actions }
}

fn gap_of(game: &Game, pi: &MixtureOfProducts, notion: Notion) -> Result<Rational> {
    Ok(gap(game, pi, notion, &GapOptions::default())?.gap)
}

/// Joint law over pure profiles, merged.
fn law(pi: &MixtureOfProducts) -> BTreeMap<PureProfile, Rational> {
    let mut out: BTreeMap<PureProfile, Rational> = BTreeMap::new();
    for (w, p) in pi.profile_support() {
        if !w.is_zero() {
            *out.entry(p).or_insert_with(Rational::zero) += w;
        }
    }
    out
}

pub fn criterion_1(opts: &SuiteOptions) -> CriterionResult {
    run(1, "EBOS values and conversion", 5, opts, |ck| {
        let g = fixtures::ebos();
        let pi = fixtures::ebos_pi();
        for i in 0..2 {
            ck.eq(format!("EU player {}", i + 1), expected_utility(&g, &pi, i), q("3/2"));
        }
        ck.eq("efce gap", gap_of(&g, &pi, Notion::Efce).ok(), Some(q("0")));
        ck.eq("bce gap", gap_of(&g, &pi, Notion::Bce).ok(), Some(q("1")));
        let oracle = brute_force_gap(&g, &pi, Notion::Bce, &OracleOptions::default()).map(|r| r.gap);
        ck.eq("bce gap (oracle)", oracle.ok(), Some(q("1")));
        let conv = efce_to_bce(&g, &pi);
        let expect = MixtureOfProducts::from_profiles(vec![
            (
                q("1/2"),
                PureProfile(vec![pure_from_actions(&g, 0, &["¬U", "X1", "X1"]), pure_from_actions(&g, 1, &["X2"])]),
            ),
            (
                q("1/2"),
                PureProfile(vec![pure_from_actions(&g, 0, &["¬U", "Y1", "X1"]), pure_from_actions(&g, 1, &["Y2"])]),
            ),
        ]);
        ck.eq("converted support and weights", law(&conv), law(&expect));
        ck.eq("converted bce gap", gap_of(&g, &conv, Notion::Bce).ok(), Some(q("0")));
        ck.truth("outcome equivalent", outcome_equivalent(&g, &pi, &conv));
    })
}

pub fn criterion_2(opts: &SuiteOptions) -> CriterionResult {
    run(2, "LRR values and conversion", 5, opts, |ck| {
        let g = fixtures::lrr();
        let pi = fixtures::lrr_pi();
        ck.eq("efce gap", gap_of(&g, &pi, Notion::Efce).ok(), Some(q("1/5")));
        ck.eq("bce gap", gap_of(&g, &pi, Notion::Bce).ok(), Some(q("1")));
        let Some(decomposed) = ck.ok(
            "decomposition",
            crate::profile_io::read_profile(&g, fixtures::LRR_PI_BEHAVIOR_JSON).and_then(|d| match d {
                crate::profile_io::ProfileDoc::Behavior(comps) => mixture_from_behavior_products(&g, &comps),
                crate::profile_io::ProfileDoc::Mixture(m) => Ok(m),
            }),
        ) else {
            return;
        };
        let conv = efce_to_bce(&g, &decomposed);
        let expect = MixtureOfProducts::from_profiles(vec![
            (q("9/10"), PureProfile(vec![pure_from_actions(&g, 0, &["L", "L'"])])),
            (q("1/10"), PureProfile(vec![pure_from_actions(&g, 0, &["R", "R'"])])),
        ]);
        ck.eq("converted profile", law(&conv), law(&expect));
        ck.eq("conversion of the product form", law(&efce_to_bce(&g, &pi)), law(&expect));
        ck.truth("outcome preserved", outcome_equivalent(&g, &pi, &conv));
        let Some(report) = ck.ok("bce gap of π′", gap(&g, &conv, Notion::Bce, &GapOptions::default())) else {
            return;
        };
        let b = g.infoset_by_name("B").expect("infoset B");
        ck.eq("bce gap of π′ at B", report.per_infoset.get(&b).cloned(), Some(q("1/10")));
        ck.truth("bce gap of π′ ≤ 1/5", report.gap <= q("1/5"));
        // Exhaustive search over every deviation table settles the total.
        let oracle = brute_force_gap(&g, &conv, Notion::Bce, &OracleOptions::default()).map(|r| r.gap);
        ck.eq("bce gap of π′ (DP vs oracle)", Some(report.gap.clone()), oracle.ok());
        ck.eq("bce gap of π′", report.gap.clone(), q("1/5"));
        ck.notes.push(format!(
            "bce gap of π′ is {} overall: 1/10 at B, and 1/5 at the root (R is recommended w.p. 1/10, L pays 2 instead of 0)",
            report.gap
        ));
    })
}

/// The random games shared by criteria 3, 6 and 7.
fn random_games(opts: &SuiteOptions) -> Vec<Game> {
    let mut rng = gen::rng(opts.seed);
    (0..opts.random_games).map(|_| gen::random_game(&mut rng, &GenConfig::default())).collect()
}

fn conversion_checks(ck: &mut Checker, label: &str, g: &Game, pi: &MixtureOfProducts, eps: &Rational) {
    let conv = efce_to_bce(g, pi);
    ck.truth(format!("{label}: outcome equivalent"), outcome_equivalent(g, pi, &conv));
    if let Some(b) = ck.ok(format!("{label}: bce gap"), gap_of(g, &conv, Notion::Bce)) {
        ck.truth(format!("{label}: bce gap {b} > efce gap {eps}"), b <= *eps);
    }
}

pub fn criterion_3(opts: &SuiteOptions) -> CriterionResult {
    run(3, "EFCE to BCE conversion on random games", 180, opts, |ck| {
        let eq = EquilibriumOptions::default();
        let mut rng = gen::rng(opts.seed ^ 0x33);
        let lambdas = [q("1/10"), q("1/4"), q("1/2")];
        let mut positive = 0;
        for (n, g) in random_games(opts).iter().enumerate() {
            if let Some(s) = ck.ok(format!("game {n}: compute_efce"), compute_efce(g, &Rational::zero(), &eq)) {
                conversion_checks(ck, &format!("game {n} compute_efce"), g, &s.profile, &Rational::zero());
                // Perturb towards a random profile; the measured efce gap is ε.
                let noise = gen::random_mixture(&mut rng, g);
                let lambda = &lambdas[rng.gen_range(0..lambdas.len())];
                let mixed = s.profile.blend(&noise, lambda);
                if let Some(eps) = ck.ok(format!("game {n}: efce gap"), gap_of(g, &mixed, Notion::Efce)) {
                    positive += usize::from(eps.is_positive());
                    conversion_checks(ck, &format!("game {n} perturbed"), g, &mixed, &eps);
                }
            }
            let c = gen::random_objective(&mut rng, g);
            if let Some(s) = ck.ok(format!("game {n}: optimal_efce"), optimal_efce(g, &c, &eq)) {
                conversion_checks(ck, &format!("game {n} optimal_efce"), g, &s.profile, &Rational::zero());
            }
        }
        ck.notes.push(format!("{} games, {positive} perturbed profiles with positive efce gap", opts.random_games));
    })
}

pub fn criterion_4(opts: &SuiteOptions) -> CriterionResult {
    run(4, "DP gap equals brute-force oracle", 60, opts, |ck| {
        let oo = OracleOptions::default();
        let compare = |ck: &mut Checker, label: &str, g: &Game, pi: &MixtureOfProducts| -> bool {
            let mut all = true;
            for notion in Notion::ALL {
                match brute_force_gap(g, pi, notion, &oo) {
                    Ok(o) => {
                        let dp = gap_of(g, pi, notion).ok();
                        ck.eq(format!("{label} {notion}"), dp, Some(o.gap));
                    }
                    Err(crate::Error::CapExceeded { .. }) => all = false,
                    Err(e) => ck.truth(format!("{label} {notion}: {e}"), false),
                }
            }
            all
        };
        let lrr = fixtures::lrr();
        compare(ck, "lrr π", &lrr, &fixtures::lrr_pi());
        compare(ck, "lrr decomposed π", &lrr, &fixtures::lrr_pi_decomposed());
        compare(ck, "lrr (L,R′)", &lrr, &fixtures::lrr_lrprime());
        compare(ck, "lrr π′", &lrr, &efce_to_bce(&lrr, &fixtures::lrr_pi()));
        let ebos = fixtures::ebos();
        compare(ck, "ebos π", &ebos, &fixtures::ebos_pi());
        compare(ck, "ebos π′", &ebos, &efce_to_bce(&ebos, &fixtures::ebos_pi()));
        let mut rng = gen::rng(opts.seed ^ 0x44);
        let mut feasible = 0;
        let mut drawn = 0;
        while feasible < opts.tiny_games && drawn < 20 * opts.tiny_games.max(1) {
            drawn += 1;
            let g = gen::random_game(&mut rng, &GenConfig::tiny());
            let pi = gen::random_mixture(&mut rng, &g);
            if compare(ck, &format!("tiny game {drawn}"), &g, &pi) {
                feasible += 1;
            }
        }
        ck.truth(format!("only {feasible} tiny games fit the oracle"), feasible >= opts.tiny_games);
        ck.notes.push(format!("{feasible} tiny games with all four notions checked ({drawn} drawn)"));
    })
}

pub fn criterion_5(opts: &SuiteOptions) -> CriterionResult {
    run(5, "decomposition of behavior strategies", 30, opts, |ck| {
        let mut rng = gen::rng(opts.seed ^ 0x55);
        for (name, g) in [("ebos", fixtures::ebos()), ("lrr", fixtures::lrr()), ("surj", fixtures::surj())] {
            for i in 0..g.num_players() {
                for k in 0..opts.behaviors_per_fixture {
                    let v = gen::random_behavior(&mut rng, &g, i).sequence_form(&g);
                    let Some(parts) = ck.ok(format!("{name} P{} #{k}", i + 1), decompose(&g, &v)) else { continue };
                    let mut back = SequenceFormVector::zeros(&g, i);
                    for (w, x) in &parts {
                        back.add_scaled(w, &x.sequence_form(&g));
                    }
                    ck.eq(format!("{name} P{} #{k} reconstruction", i + 1), &back, &v);
                    ck.truth(
                        format!("{name} P{} #{k}: K = {} > |Σ_i|", i + 1, parts.len()),
                        parts.len() <= g.num_sequences(i),
                    );
                }
            }
        }
    })
}

pub fn criterion_6(opts: &SuiteOptions) -> CriterionResult {
    run(6, "exact BCE computation", 180, opts, |ck| {
        let eq = EquilibriumOptions::default();
        let fixtures = [("ebos", fixtures::ebos()), ("lrr", fixtures::lrr()), ("surj", fixtures::surj())];
        let games = random_games(opts);
        let named = fixtures.iter().map(|(n, g)| (n.to_string(), g)).chain(games.iter().enumerate().map(|(k, g)| (format!("game {k}"), g)));
        for (name, g) in named {
            if let Some(s) = ck.ok(format!("{name}: compute_bce"), compute_bce(g, &eq)) {
                ck.eq(format!("{name}: bce gap"), gap_of(g, &s.profile, Notion::Bce).ok(), Some(Rational::zero()));
            }
        }
    })
}

pub fn criterion_7(opts: &SuiteOptions) -> CriterionResult {
    run(7, "optimal EFCE and optimal BCE values agree", 120, opts, |ck| {
        let eq = EquilibriumOptions::default();
        let mut rng = gen::rng(opts.seed ^ 0x77);
        let mut pairs: Vec<(String, Game, BTreeMap<usize, Rational>)> = Vec::new();
        for (name, g) in [("ebos", fixtures::ebos()), ("lrr", fixtures::lrr()), ("surj", fixtures::surj())] {
            for i in 0..g.num_players() {
                pairs.push((format!("{name} u{}", i + 1), g.clone(), utility_objective(&g, &[i])));
            }
            let all: Vec<usize> = (0..g.num_players()).collect();
            pairs.push((format!("{name} welfare"), g.clone(), utility_objective(&g, &all)));
        }
        for k in 0..opts.objective_pairs {
            let g = gen::random_game(&mut rng, &GenConfig::default());
            let c = gen::random_objective(&mut rng, &g);
            pairs.push((format!("random pair {k}"), g, c));
        }
        for (name, g, c) in &pairs {
            let e = ck.ok(format!("{name}: optimal_efce"), optimal_efce(g, c, &eq));
            let b = ck.ok(format!("{name}: optimal_bce"), optimal_bce(g, c, &eq));
            if let (Some(e), Some(b)) = (e, b) {
                ck.eq(format!("{name}: values"), &e.value, &b.value);
                ck.eq(format!("{name}: bce gap"), b.gap, Rational::zero());
            }
        }
        ck.notes.push(format!("{} (game, objective) pairs", pairs.len()));
    })
}

pub fn criterion_8(opts: &SuiteOptions) -> CriterionResult {
    run(8, "SURJ: conversion is not surjective", 5, opts, |ck| {
        let g = fixtures::surj();
        let pi = fixtures::surj_bce();
        ck.eq("bce gap", gap_of(&g, &pi, Notion::Bce).ok(), Some(q("0")));
        let s_node = g.infoset(g.infoset_by_name("S").expect("infoset S")).nodes[0];
        let top = g.tree().nodes[s_node].parent.expect("S has a parent");
        ck.eq("P1 utility in S", subtree_conditional_utility(&g, &pi, top, 0), q("1"));
        let conv = efce_to_bce(&g, &pi);
        ck.truth("converted profile differs", law(&conv) != law(&pi));
        ck.truth("outcome equivalent", outcome_equivalent(&g, &pi, &conv));
        ck.eq("converted bce gap", gap_of(&g, &conv, Notion::Bce).ok(), Some(q("0")));
        ck.eq("P1 utility in S after conversion", subtree_conditional_utility(&g, &conv, top, 0), q("1/2"));
    })
}

/// Mixtures over P1's pure strategies in LRR on a 1/4 grid, plus the point
/// (L,R′) written as several identical components.
fn lrr_family(g: &Game) -> Vec<MixtureOfProducts> {
    let xs = enumerate_pure(g, 0, 16).expect("four strategies");
    let mut out = Vec::new();
    let n = xs.len();
    let mut weights = vec![0usize; n];
    loop {
        if weights.iter().sum::<usize>() == 4 {
            out.push(MixtureOfProducts::from_profiles(
                xs.iter()
                    .zip(&weights)
                    .map(|(x, &w)| (Rational::new(w as i64, 4), PureProfile(vec![x.clone()])))
                    .collect(),
            ));
        }
        let mut pos = 0;
        loop {
            if pos == n {
                return out;
            }
            weights[pos] += 1;
            if weights[pos] <= 4 {
                break;
            }
            weights[pos] = 0;
            pos += 1;
        }
    }
}

pub fn criterion_9(opts: &SuiteOptions) -> CriterionResult {
    run(9, "counterfactual outcome equivalence counterexample", 10, opts, |ck| {
        let g = fixtures::lrr();
        let point = PureProfile(vec![pure_from_actions(&g, 0, &["L", "R'"])]);
        let b = g.infoset_by_name("B").expect("infoset B");
        ck.eq("counterfactual utility at B", counterfactual_utility(&g, &point, 0, b), q("0"));
        ck.eq("(L,R′) is an EFCE", gap_of(&g, &fixtures::lrr_lrprime(), Notion::Efce).ok(), Some(q("0")));
        let target = MixtureOfProducts::pure(point.clone());
        let mut family = lrr_family(&g);
        family.push(MixtureOfProducts::from_profiles(vec![(q("1/3"), point.clone()), (q("2/3"), point.clone())]));
        let mut equivalent = 0;
        for (k, pi) in family.iter().enumerate() {
            if !counterfactually_outcome_equivalent(&g, pi, &target) {
                continue;
            }
            equivalent += 1;
            if let Some(b) = ck.ok(format!("member {k}: bce gap"), gap_of(&g, pi, Notion::Bce)) {
                ck.truth(format!("member {k}: bce gap {b} < 1"), b >= q("1"));
            }
        }
        ck.truth("the family contains equivalent profiles", equivalent >= 2);
        ck.notes.push(format!("{equivalent} of {} candidates counterfactually equivalent to (L,R′)", family.len()));
    })
}

pub fn criterion_10(opts: &SuiteOptions) -> CriterionResult {
    run(10, "factorized and expanded conditional reach agree", 60, opts, |ck| {
        let mut cases: Vec<(String, Game, MixtureOfProducts)> = vec![
            ("ebos π".into(), fixtures::ebos(), fixtures::ebos_pi()),
            ("lrr π".into(), fixtures::lrr(), fixtures::lrr_pi()),
            ("lrr decomposed π".into(), fixtures::lrr(), fixtures::lrr_pi_decomposed()),
            ("lrr (L,R′)".into(), fixtures::lrr(), fixtures::lrr_lrprime()),
            ("surj".into(), fixtures::surj(), fixtures::surj_bce()),
        ];
        let mut rng = gen::rng(opts.seed ^ 0xaa);
        for k in 0..opts.random_games.min(100) {
            let g = gen::random_game(&mut rng, &GenConfig::default());
            let pi = gen::random_mixture(&mut rng, &g);
            cases.push((format!("random game {k}"), g, pi));
        }
        for (name, g, pi) in &cases {
            for i in 0..g.num_players() {
                for s in 0..g.num_sequences(i) {
                    ck.eq(
                        format!("{name} P{} {}", i + 1, g.seq_name(i, s)),
                        conditional_reach(g, pi, i, s),
                        conditional_reach_expanded(g, pi, i, s),
                    );
                }
            }
        }
    })
}

pub fn run_all(opts: &SuiteOptions) -> Vec<CriterionResult> {
    vec![
        criterion_1(opts),
        criterion_2(opts),
        criterion_3(opts),
        criterion_4(opts),
        criterion_5(opts),
        criterion_6(opts),
        criterion_7(opts),
        criterion_8(opts),
        criterion_9(opts),
        criterion_10(opts),
    ]
}
