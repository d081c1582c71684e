use gt_demo::{convert_json, fixture_text, gap_json, lrr_explore_json};
use serde_json::Value;

fn parse(s: &str) -> Value {
    serde_json::from_str(s).unwrap()
}

#[test]
fn explorer_at_one_tenth() {
    let v = parse(&lrr_explore_json("1/10").unwrap());
    assert_eq!(v["efce_gap"], "1/5");
    assert_eq!(v["bce_gap"], "1");
    assert_eq!(v["outcome_equivalent"], true);
    assert_eq!(v["utility"], "9/5");
}

#[test]
fn explorer_endpoints_and_errors() {
    let v = parse(&lrr_explore_json("0").unwrap());
    assert_eq!(v["efce_gap"], "0");
    assert_eq!(v["converted_bce_gap"], "0");
    assert!(lrr_explore_json("3/2").is_err());
    assert!(lrr_explore_json("abc").is_err());
}

#[test]
fn gap_and_convert_on_presets() {
    let g = fixture_text("ebos").unwrap();
    let pi = fixture_text("ebos.pi").unwrap();
    assert_eq!(parse(&gap_json(g, pi, "bce").unwrap())["gap"], "1");
    let c = parse(&convert_json(g, pi).unwrap());
    assert_eq!(c["bce_gap_out"], "0");
    assert_eq!(c["outcome_equivalent"], true);
    assert!(gap_json(g, pi, "nash").is_err());
    assert!(gap_json("{", pi, "efce").is_err());
}
