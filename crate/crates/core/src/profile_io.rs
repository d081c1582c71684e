//! Profile documents.
//!
//! Mixture of products:
//! `{"components":[{"alpha":"1/2","strategies":[[{"beta":"1","actions":{"root":"L"}}], ...]}]}`
//!
//! Mixture of behavior products (decomposed on load):
//! `{"components":[{"alpha":"1","behaviors":[{"root":{"L":"9/10","R":"1/10"}}, ...]}]}`
//! Omitted action labels carry probability zero.
//!
//! Behavior documents can be read two ways: decomposed into small supports
//! (same outcomes and reach), or expanded into the exact product of the
//! local distributions (same joint law of every recommendation).

use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::game::Game;
use crate::rational::Rational;
use crate::strategy::{
    mixture_from_behavior_products, mixture_from_behavior_supports, BehaviorStrategy, Component, MixtureOfProducts,
    PureStrategy,
};

fn field<'a>(obj: &'a Value, key: &str, path: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| Error::Parse(format!("{path}: missing field {key:?}")))
}

fn rational(v: &Value, path: &str) -> Result<Rational> {
    match v {
        Value::String(s) => s.parse().map_err(|_| Error::Parse(format!("{path}: invalid rational {s:?}"))),
        Value::Number(n) if n.is_i64() => Ok(Rational::from_int(n.as_i64().unwrap_or_default())),
        _ => Err(Error::Parse(format!("{path}: expected a rational string"))),
    }
}

fn array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| Error::Parse(format!("{path}: expected an array")))
}

fn object<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| Error::Parse(format!("{path}: expected an object")))
}

/// Build a pure strategy from `{infoset: label}`; every infoset of the player must appear.
pub fn pure_from_labels(game: &Game, player: usize, map: &Map<String, Value>, path: &str) -> Result<PureStrategy> {
    let mut actions = Vec::with_capacity(game.player_infosets(player).len());
    for &iid in game.player_infosets(player) {
        let info = game.infoset(iid);
        let label = map
            .get(&info.name)
            .and_then(Value::as_str)
            .ok_or_else(|| Error::Semantic(format!("{path}: no action for infoset {:?}", info.name)))?;
        let a = info
            .action_index(label)
            .ok_or_else(|| Error::Semantic(format!("{path}: infoset {:?} has no action {label:?}", info.name)))?;
        actions.push(a);
    }
    for key in map.keys() {
        match game.infoset_by_name(key) {
            Some(iid) if game.infoset(iid).player == player => {}
            _ => return Err(Error::Semantic(format!("{path}: infoset {key:?} is not an infoset of player {player}"))),
        }
    }
    Ok(PureStrategy { player, actions })
}

pub fn pure_to_labels(game: &Game, x: &PureStrategy) -> Value {
    let mut m = Map::new();
    for &iid in game.player_infosets(x.player) {
        m.insert(game.infoset(iid).name.clone(), Value::String(x.label(game, iid).to_string()));
    }
    Value::Object(m)
}

fn behavior_from_json(game: &Game, player: usize, v: &Value, path: &str) -> Result<BehaviorStrategy> {
    let map = object(v, path)?;
    let mut locals = Vec::new();
    for &iid in game.player_infosets(player) {
        let info = game.infoset(iid);
        let p = format!("{path}.{}", info.name);
        let dist = map
            .get(&info.name)
            .ok_or_else(|| Error::Semantic(format!("{path}: no distribution for infoset {:?}", info.name)))?;
        let dist = object(dist, &p)?;
        let mut local = vec![Rational::zero(); info.actions.len()];
        for (label, pr) in dist {
            let a = info
                .action_index(label)
                .ok_or_else(|| Error::Semantic(format!("{p}: no action {label:?}")))?;
            local[a] = rational(pr, &format!("{p}.{label}"))?;
        }
        locals.push(local);
    }
    let b = BehaviorStrategy { player, locals };
    b.check(game)?;
    Ok(b)
}

/// A parsed profile document, before behavior strategies are turned into supports.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProfileDoc {
    Mixture(MixtureOfProducts),
    Behavior(Vec<(Rational, Vec<BehaviorStrategy>)>),
}

impl ProfileDoc {
    pub fn is_behavior(&self) -> bool {
        matches!(self, ProfileDoc::Behavior(_))
    }

    /// Small supports via the sequence-form decomposition.
    pub fn decomposed(&self, game: &Game) -> Result<MixtureOfProducts> {
        match self {
            ProfileDoc::Mixture(m) => Ok(m.clone()),
            ProfileDoc::Behavior(b) => mixture_from_behavior_products(game, b),
        }
    }

    /// Exact product supports; refuses past `cap` strategies per behavior strategy.
    pub fn expanded(&self, game: &Game, cap: u128) -> Result<MixtureOfProducts> {
        match self {
            ProfileDoc::Mixture(m) => Ok(m.clone()),
            ProfileDoc::Behavior(b) => mixture_from_behavior_supports(game, b, cap),
        }
    }
}

/// Parse either profile document flavour; behavior documents are decomposed.
pub fn parse_profile(game: &Game, text: &str) -> Result<MixtureOfProducts> {
    read_profile(game, text)?.decomposed(game)
}

pub fn read_profile(game: &Game, text: &str) -> Result<ProfileDoc> {
    let doc: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let comps = array(field(&doc, "components", "profile")?, "components")?;
    let n = game.num_players();
    if comps.iter().any(|c| c.get("behaviors").is_some()) {
        let mut parsed = Vec::with_capacity(comps.len());
        for (t, c) in comps.iter().enumerate() {
            let path = format!("components[{t}]");
            let alpha = rational(field(c, "alpha", &path)?, &format!("{path}.alpha"))?;
            let bs = array(field(c, "behaviors", &path)?, &format!("{path}.behaviors"))?;
            if bs.len() != n {
                return Err(Error::Semantic(format!("{path}: {} behaviors for {n} players", bs.len())));
            }
            let behaviors = bs
                .iter()
                .enumerate()
                .map(|(i, b)| behavior_from_json(game, i, b, &format!("{path}.behaviors[{i}]")))
                .collect::<Result<Vec<_>>>()?;
            parsed.push((alpha, behaviors));
        }
        let total: Rational = parsed.iter().map(|(a, _)| a).sum();
        if !total.is_one() || parsed.iter().any(|(a, _)| a.is_negative()) {
            return Err(Error::InvalidProfile(format!("component weights sum to {total}")));
        }
        return Ok(ProfileDoc::Behavior(parsed));
    }
    let mut components = Vec::with_capacity(comps.len());
    for (t, c) in comps.iter().enumerate() {
        let path = format!("components[{t}]");
        let alpha = rational(field(c, "alpha", &path)?, &format!("{path}.alpha"))?;
        let per_player = array(field(c, "strategies", &path)?, &format!("{path}.strategies"))?;
        if per_player.len() != n {
            return Err(Error::Semantic(format!("{path}: {} strategy lists for {n} players", per_player.len())));
        }
        let mut strategies = Vec::with_capacity(n);
        for (i, list) in per_player.iter().enumerate() {
            let lp = format!("{path}.strategies[{i}]");
            let mut entries = Vec::new();
            for (k, e) in array(list, &lp)?.iter().enumerate() {
                let ep = format!("{lp}[{k}]");
                let beta = rational(field(e, "beta", &ep)?, &format!("{ep}.beta"))?;
                let acts = object(field(e, "actions", &ep)?, &format!("{ep}.actions"))?;
                entries.push((beta, pure_from_labels(game, i, acts, &ep)?));
            }
            strategies.push(entries);
        }
        components.push(Component { alpha, strategies });
    }
    let mix = MixtureOfProducts { components };
    mix.check(game)?;
    Ok(ProfileDoc::Mixture(mix))
}

pub fn profile_to_json(game: &Game, mix: &MixtureOfProducts) -> Value {
    let comps: Vec<Value> = mix
        .components
        .iter()
        .map(|c| {
            let strategies: Vec<Value> = c
                .strategies
                .iter()
                .map(|list| {
                    Value::Array(
                        list.iter()
                            .map(|(b, x)| {
                                let mut m = Map::new();
                                m.insert("beta".into(), Value::String(b.to_string()));
                                m.insert("actions".into(), pure_to_labels(game, x));
                                Value::Object(m)
                            })
                            .collect(),
                    )
                })
                .collect();
            let mut m = Map::new();
            m.insert("alpha".into(), Value::String(c.alpha.to_string()));
            m.insert("strategies".into(), Value::Array(strategies));
            Value::Object(m)
        })
        .collect();
    let mut m = Map::new();
    m.insert("components".into(), Value::Array(comps));
    Value::Object(m)
}

pub fn serialize_profile(game: &Game, mix: &MixtureOfProducts) -> String {
    let mut s = serde_json::to_string_pretty(&profile_to_json(game, mix)).expect("profiles always serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn profile_round_trip() {
        let g = fixtures::ebos();
        let pi = fixtures::ebos_pi();
        let text = serialize_profile(&g, &pi);
        assert_eq!(parse_profile(&g, &text).unwrap(), pi);
    }

    #[test]
    fn behavior_document_is_decomposed() {
        let g = fixtures::lrr();
        let mix = parse_profile(&g, fixtures::LRR_PI_BEHAVIOR_JSON).unwrap();
        assert_eq!(mix.components[0].strategies[0].len(), 2);
    }

    #[test]
    fn behavior_document_can_be_expanded() {
        let g = fixtures::lrr();
        let doc = read_profile(&g, fixtures::LRR_PI_BEHAVIOR_JSON).unwrap();
        assert!(doc.is_behavior());
        let exact = doc.expanded(&g, 1000).unwrap();
        let labels: Vec<String> = exact.components[0].strategies[0].iter().map(|(_, x)| x.describe(&g)).collect();
        assert_eq!(labels, ["(L,R')", "(R,R')"]);
        assert!(crate::metrics::outcome_equivalent(&g, &exact, &doc.decomposed(&g).unwrap()));
    }

    #[test]
    fn rejects_bad_profiles() {
        let g = fixtures::lrr();
        let missing = r#"{"components":[{"alpha":"1","strategies":[[{"beta":"1","actions":{"R0":"L"}}]]}]}"#;
        assert!(matches!(parse_profile(&g, missing), Err(Error::Semantic(_))));
        let weights = r#"{"components":[{"alpha":"1/2","strategies":[[{"beta":"1","actions":{"R0":"L","B":"L'"}}]]}]}"#;
        assert!(matches!(parse_profile(&g, weights), Err(Error::InvalidProfile(_))));
        let label = r#"{"components":[{"alpha":"1","strategies":[[{"beta":"1","actions":{"R0":"Q","B":"L'"}}]]}]}"#;
        assert!(matches!(parse_profile(&g, label), Err(Error::Semantic(_))));
        assert!(matches!(parse_profile(&g, "{"), Err(Error::Parse(_))));
    }
}
