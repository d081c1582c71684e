//! Three operations for the static page in `www/`: the LRR mixing
//! explorer, the gap of a pasted profile, and EFCE → BCE conversion.
//! The `*_json` functions are plain Rust so they run in native tests too.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use gt_core::convert::efce_to_bce;
use gt_core::gap::{gap, GapOptions, Notion};
use gt_core::metrics::{expected_utility, outcome_distribution, outcome_equivalent};
use gt_core::profile_io::{profile_to_json, read_profile};
use gt_core::strategy::{mixture_from_behavior_supports, BehaviorStrategy};
use gt_core::{fixtures, parse_game, Game, MixtureOfProducts, Rational};

const EXPANSION_CAP: u128 = 1 << 12;

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("values serialize")
}

fn load(game: &str, profile: &str, expand: bool) -> Result<(Game, MixtureOfProducts), String> {
    let g = Game::new(parse_game(game).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let doc = read_profile(&g, profile).map_err(|e| e.to_string())?;
    let pi = if expand { doc.expanded(&g, EXPANSION_CAP) } else { doc.decomposed(&g) };
    Ok((g, pi.map_err(|e| e.to_string())?))
}

/// LRR with P1 playing R at the root with probability `p` and R′ at B.
pub fn lrr_explore_json(p: &str) -> Result<String, String> {
    let p: Rational = p.parse().map_err(|_| format!("not a rational: {p:?}"))?;
    if p.is_negative() || p > Rational::one() {
        return Err("p must lie in [0, 1]".into());
    }
    let g = fixtures::lrr();
    let b = BehaviorStrategy { player: 0, locals: vec![vec![Rational::one() - &p, p.clone()], vec![Rational::zero(), Rational::one()]] };
    let pi = mixture_from_behavior_supports(&g, &[(Rational::one(), vec![b])], EXPANSION_CAP).map_err(|e| e.to_string())?;
    let conv = efce_to_bce(&g, &pi);
    let opts = GapOptions::default();
    let gap_of = |m: &MixtureOfProducts, n: Notion| gap(&g, m, n, &opts).map(|r| r.gap.to_string()).map_err(|e| e.to_string());
    Ok(pretty(&json!({
        "p": p.to_string(),
        "utility": expected_utility(&g, &pi, 0).to_string(),
        "efce_gap": gap_of(&pi, Notion::Efce)?,
        "bce_gap": gap_of(&pi, Notion::Bce)?,
        "converted": profile_to_json(&g, &conv),
        "converted_bce_gap": gap_of(&conv, Notion::Bce)?,
        "outcome_equivalent": outcome_equivalent(&g, &pi, &conv),
    })))
}

pub fn gap_json(game: &str, profile: &str, notion: &str) -> Result<String, String> {
    let notion: Notion = notion.parse().map_err(|e: gt_core::Error| e.to_string())?;
    let (g, pi) = load(game, profile, true)?;
    let report = gap(&g, &pi, notion, &GapOptions::default()).map_err(|e| e.to_string())?;
    Ok(pretty(&report.to_json(&g)))
}

pub fn convert_json(game: &str, profile: &str) -> Result<String, String> {
    let (g, pi) = load(game, profile, false)?;
    let conv = efce_to_bce(&g, &pi);
    let opts = GapOptions::default();
    let efce = gap(&g, &pi, Notion::Efce, &opts).map_err(|e| e.to_string())?;
    let bce = gap(&g, &conv, Notion::Bce, &opts).map_err(|e| e.to_string())?;
    Ok(pretty(&json!({
        "efce_gap_in": efce.gap.to_string(),
        "bce_gap_out": bce.gap.to_string(),
        "outcome_equivalent": outcome_equivalent(&g, &pi, &conv),
        "outcomes": outcome_distribution(&g, &conv).to_json(&g),
        "profile": profile_to_json(&g, &conv),
    })))
}

/// Bundled documents for the page's presets.
pub fn fixture_text(name: &str) -> Option<&'static str> {
    Some(match name {
        "ebos" => fixtures::EBOS_JSON,
        "ebos.pi" => fixtures::EBOS_PI_JSON,
        "lrr" => fixtures::LRR_JSON,
        "lrr.pi" => fixtures::LRR_PI_BEHAVIOR_JSON,
        "surj" => fixtures::SURJ_JSON,
        "surj.pi" => fixtures::SURJ_BCE_JSON,
        _ => return None,
    })
}

#[wasm_bindgen]
pub fn lrr_explore(p: &str) -> Result<String, JsValue> {
    lrr_explore_json(p).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn profile_gap(game: &str, profile: &str, notion: &str) -> Result<String, JsValue> {
    gap_json(game, profile, notion).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn convert(game: &str, profile: &str) -> Result<String, JsValue> {
    convert_json(game, profile).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn fixture(name: &str) -> Option<String> {
    fixture_text(name).map(str::to_string)
}
